//! Small scalar numerics shared across modules.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7/15 panel: (Kronrod estimate, |Kronrod − Gauss|).
pub(crate) fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod integration to `rel_tol` (with a tiny absolute floor).
pub(crate) fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (whole, _) = gk15(f, a, b);
    let abs_floor = 1e-15 * whole.abs().max(1e-300);
    recurse(f, a, b, rel_tol, abs_floor, 0)
}

fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64, floor: f64, depth: u32) -> f64 {
    let (est, err) = gk15(f, a, b);
    if err <= (rel * est.abs()).max(floor) || depth >= 40 {
        return est;
    }
    let m = 0.5 * (a + b);
    recurse(f, a, m, rel, 0.5 * floor, depth + 1) + recurse(f, m, b, rel, 0.5 * floor, depth + 1)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimisation of a unimodal `f` on `[a, b]`; returns `(x_min, f(x_min))`.
pub(crate) fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bisection for a sign change of `f` on `[a, b]` with `f(a) > 0 >= f(b)`.
pub(crate) fn bisect_decreasing<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    while b - a > tol {
        let m = 0.5 * (a + b);
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// First root in `[0, 1]` (fraction of the step) of the cubic Hermite interpolant
/// through `(0, y0, d0)` and `(h, y1, d1)`, given `y0 > 0 >= y1`. Derivatives are
/// with respect to the physical variable over a step of length `h`.
pub(crate) fn hermite_root(y0: f64, d0: f64, y1: f64, d1: f64, h: f64) -> f64 {
    let p = |s: f64| {
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * d1
    };
    // The interpolant may dip below zero before s = 1; scan for the first crossing.
    let n = 16;
    let mut lo = 0.0;
    let mut hi = 1.0;
    for i in 1..=n {
        let s = i as f64 / n as f64;
        if p(s) <= 0.0 {
            hi = s;
            break;
        }
        lo = s;
    }
    bisect_decreasing(p, lo, hi, 1e-15)
}

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{GridFunction, NormMode, NormSpec};
use crate::error::{Error, Result};
use crate::numeric::golden_min;

/// Squared multiplier `|ξ|^{2s}(1+|ln|ξ||)^{−2β}`.
///
/// The zero frequency only counts in the plain `L²` case `s = β = 0`, where the
/// multiplier is identically one.
fn weight(xi: f64, s: f64, beta: f64) -> f64 {
    if xi == 0.0 {
        return if s == 0.0 && beta == 0.0 { 1.0 } else { 0.0 };
    }
    xi.powf(2.0 * s) * (1.0 + xi.ln().abs()).powf(-2.0 * beta)
}

/// Frequencies in cycles per unit length for an `n`-point transform with spacing `h`.
fn frequencies(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let k = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            k / (n as f64 * h)
        })
        .collect()
}

/// Discrete `Ḣ^s(ln H)^{−β}` norm via the unitary DFT.
pub fn spectral_norm(f: &GridFunction, spec: &NormSpec) -> Result<f64> {
    spec.validate()?;
    if spec.mode != NormMode::Spectral {
        return Err(Error::Input("spectral_norm needs a spectral NormSpec".into()));
    }
    let [nx, ny] = f.shape();
    let h = f.h();
    let mut data: Vec<Complex<f64>> = f.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let fx = planner.plan_fft_forward(nx);
    for row in data.chunks_exact_mut(nx) {
        fx.process(row);
    }
    if ny > 1 {
        let fy = planner.plan_fft_forward(ny);
        let mut col = vec![Complex::new(0.0, 0.0); ny];
        for i in 0..nx {
            for j in 0..ny {
                col[j] = data[j * nx + i];
            }
            fy.process(&mut col);
            for j in 0..ny {
                data[j * nx + i] = col[j];
            }
        }
    }
    let xi_x = frequencies(nx, h);
    let xi_y = frequencies(ny, h);
    let norm = 1.0 / (nx * ny) as f64;
    let mut acc = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let xi = xi_x[i].hypot(xi_y[j]);
            acc += data[j * nx + i].norm_sqr() * norm * weight(xi, spec.s, spec.beta);
        }
    }
    let cell = if ny > 1 { h * h } else { h };
    Ok((cell * acc).sqrt())
}

/// Suprema of the multiplier comparisons behind the embedding
/// `Ḣ^s(ln H)^{−β} ⊂ Ḣ^{s−λ}` (high frequencies) and of `(1+|ln ξ|)^{−β}`
/// below `|ξ| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub s: f64,
    pub beta: f64,
    pub lambda: f64,
    pub xi_range: (f64, f64),
    /// `sup (1+ln ξ)^β ξ^{−λ}` over `[max(1, lo), hi]` and its location.
    pub high_sup: f64,
    pub high_argmax: f64,
    /// Global maximiser `e^{β/λ − 1}` when `λ > 0` and `β ≥ λ`.
    pub peak_location: Option<f64>,
    /// Maximum of the ratio over `[1, ∞)` located numerically (finite only if the embedding holds).
    pub global_sup: f64,
    /// The ratio keeps growing at the far end of an extended range.
    pub diverges: bool,
    /// `sup (1+|ln ξ|)^{−β}` over `[lo, min(1, hi)]`.
    pub low_sup: f64,
    pub low_argmax: f64,
}

/// Scans the multiplier ratios on a log-spaced frequency grid.
pub fn multiplier_embedding_check(s: f64, beta: f64, lambda: f64, xi_range: (f64, f64)) -> Result<EmbeddingReport> {
    let (lo, hi) = xi_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Input(format!("frequency range ({lo}, {hi}) must satisfy 0 < lo < hi")));
    }
    if !(lambda >= 0.0 && beta.is_finite() && s.is_finite()) {
        return Err(Error::Input("embedding check needs lambda >= 0 and finite s, beta".into()));
    }
    // in ℓ = ln ξ the high-frequency ratio is (1+ℓ)^β e^{−λℓ}
    let ratio = |l: f64| beta * (1.0 + l).ln() - lambda * l;
    let scan = |a: f64, b: f64| -> (f64, f64) {
        let n = 4096;
        let (mut best_l, mut best) = (a, ratio(a));
        for k in 1..=n {
            let l = a + (b - a) * k as f64 / n as f64;
            let r = ratio(l);
            if r > best {
                best = r;
                best_l = l;
            }
        }
        let step = (b - a) / n as f64;
        let (l, r) = golden_min(|l| -ratio(l), (best_l - step).max(a), (best_l + step).min(b), 1e-12 * (1.0 + best_l.abs()));
        if -r > best {
            (l, -r)
        } else {
            (best_l, best)
        }
    };
    let (h_lo, h_hi) = (lo.max(1.0).ln(), hi.ln().max(0.0));
    let (high_l, high) = if hi >= 1.0 { scan(h_lo, h_hi) } else { (0.0, 0.0) };

    // far end of the extended range ξ ≤ 1e300
    let far = 300.0 * std::f64::consts::LN_10;
    let (glob_l, glob) = scan(0.0, far);
    let diverges = far - glob_l < 1e-6 * far && glob > high + 1e-9 * high.abs().max(1.0);
    let peak_location = (lambda > 0.0 && beta >= lambda).then(|| (beta / lambda - 1.0).exp());

    let (low_sup, low_argmax) = if lo < 1.0 {
        let top = hi.min(1.0);
        // (1+|ln ξ|)^{−β} is monotone in ξ on (0, 1]
        let (a, b) = ((1.0 + lo.ln().abs()).powf(-beta), (1.0 + top.ln().abs()).powf(-beta));
        if a > b {
            (a, lo)
        } else {
            (b, top)
        }
    } else {
        (0.0, f64::NAN)
    };

    Ok(EmbeddingReport {
        s,
        beta,
        lambda,
        xi_range,
        high_sup: high.exp(),
        high_argmax: high_l.exp(),
        peak_location,
        global_sup: if diverges { f64::INFINITY } else { glob.exp() },
        diverges,
        low_sup,
        low_argmax,
    })
}

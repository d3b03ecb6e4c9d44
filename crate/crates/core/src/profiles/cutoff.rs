use super::{smoothstep, Jet, Profile};

/// Plateau cutoff: 1 on `[center − δ, center + δ]`, 0 outside `[center − 2δ, center + 2δ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCutoff {
    center: f64,
    delta: f64,
}

impl WindowCutoff {
    pub fn new(center: f64, delta: f64) -> Self {
        assert!(delta > 0.0, "cutoff half-width must be positive");
        Self { center, delta }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same profile moved to a new center.
    pub fn recentered(&self, center: f64) -> Self {
        Self { center, ..*self }
    }
}

impl Profile for WindowCutoff {
    fn support(&self) -> (f64, f64) {
        (self.center - 2.0 * self.delta, self.center + 2.0 * self.delta)
    }

    fn jet_unchecked(&self, x: f64) -> Jet {
        let r = x - self.center;
        let u = (2.0 * self.delta - r.abs()) / self.delta;
        let s = smoothstep(u);
        // d/dx of u is -sign(r)/δ
        let sign = if r >= 0.0 { 1.0 } else { -1.0 };
        Jet {
            value: s.value.min(1.0),
            d1: -sign * s.d1 / self.delta,
            d2: s.d2 / (self.delta * self.delta),
        }
    }
}

/// `(ψ¹, ψ²)`: the x₁ cutoff centred at `center_x1`, the x₂ cutoff centred at 0.
pub fn build_cutoffs(center_x1: f64, delta_eps: f64) -> (WindowCutoff, WindowCutoff) {
    (WindowCutoff::new(center_x1, delta_eps), WindowCutoff::new(0.0, delta_eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        let (p1, p2) = build_cutoffs(0.24, 0.0025);
        assert_eq!(p1.value(0.24).unwrap(), 1.0);
        assert_eq!(p1.value(0.24 + 3.0 * 0.0025).unwrap(), 0.0);
        assert_eq!(p1.value(0.24 - 0.0025).unwrap(), 1.0);
        let mid = p2.value(1.5 * 0.0025).unwrap();
        assert!(mid > 0.0 && mid < 1.0);
        assert_eq!(p2.value(-2.0 * 0.0025).unwrap(), 0.0);
    }

    #[test]
    fn derivatives_match_differences() {
        let c = WindowCutoff::new(0.3, 0.01);
        let h = 1e-7;
        for i in 0..400 {
            let x = 0.25 + 0.1 * i as f64 / 400.0;
            let fd = (c.jet_unchecked(x + h).value - c.jet_unchecked(x - h).value) / (2.0 * h);
            assert!((fd - c.jet_unchecked(x).d1).abs() < 1e-5, "x={x} {fd} {:?}", c.jet_unchecked(x));
            let fd2 = (c.jet_unchecked(x + h).d1 - c.jet_unchecked(x - h).d1) / (2.0 * h);
            // third derivative is bounded by 60/δ³, so the kinks cost at most 60h/δ³
            assert!((fd2 - c.jet_unchecked(x).d2).abs() < 1e-2 * (1.0 + fd2.abs()) + 60.0 * h / 1e-6, "x={x} {fd2} {:?}", c.jet_unchecked(x));
        }
    }
}

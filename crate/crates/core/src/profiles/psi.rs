use super::{smoothstep, Jet, Profile};

/// Monotone ramp `ψ_ε`: 0 on `(-∞, ε/2]`, 1 on `[ε, ∞)`, quintic smoothstep between.
///
/// The steepest slope is `3.75/ε`, attained at `3ε/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    eps: f64,
}

impl Mollifier {
    pub(crate) fn new(eps: f64) -> Self {
        Self { eps }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Upper bound on `|ψ'|` used by the bound audits.
    pub fn slope_bound(&self) -> f64 {
        4.0 / self.eps
    }

    /// Smallest `x` with `ψ(x) ≥ level`, for `level ∈ (0, 1)`.
    pub fn level_point(&self, level: f64) -> f64 {
        let half = 0.5 * self.eps;
        let u = crate::numeric::bisect_decreasing(|u| level - smoothstep(u).value, 0.0, 1.0, 1e-15);
        half + half * u
    }
}

impl Profile for Mollifier {
    fn support(&self) -> (f64, f64) {
        (0.5 * self.eps, self.eps)
    }

    fn jet_unchecked(&self, x: f64) -> Jet {
        let half = 0.5 * self.eps;
        let s = smoothstep((x - half) / half);
        Jet {
            value: s.value,
            d1: s.d1 / half,
            d2: s.d2 / (half * half),
        }
    }
}

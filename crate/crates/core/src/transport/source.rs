use serde::{Deserialize, Serialize};

/// `g` and the partial derivatives the augmented system needs.
///
/// Index convention: `1` is the derivative in `x₁`, `3` the derivative in `v`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SourceJet {
    pub g: f64,
    pub d1: f64,
    pub d3: f64,
    pub d11: f64,
    pub d13: f64,
    pub d33: f64,
}

impl SourceJet {
    pub fn max_abs(&self) -> f64 {
        [self.g, self.d1, self.d3, self.d11, self.d13, self.d33]
            .iter()
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Right-hand side `g(t, x₁, x₂, v)` of `∂_t(v∘φ) = g`.
pub trait SourceTerm: Send + Sync {
    fn eval(&self, t: f64, x1: f64, x2: f64, v: f64) -> SourceJet;

    /// Uniform bound `C_g` on `|g|` and every exposed partial for `v ≤ 1/2`.
    fn bound(&self) -> f64;
}

/// Built-in source terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    /// `g ≡ 0`: the model equation.
    Zero,
    /// `g = c v`: the closed-form damped/forced variant.
    Linear { c: f64 },
    /// `g = A sin(k₁x₁ + k₂x₂ + ωt + θ)/(1 + v²)`.
    Sine {
        amplitude: f64,
        k1: f64,
        k2: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl Default for SourceSpec {
    /// Phase `π/2` puts the earliest blow-up strictly inside the `x₂` range.
    fn default() -> Self {
        SourceSpec::Sine { amplitude: 0.25, k1: 1.0, k2: 1.0, omega: 1.0, phase: std::f64::consts::FRAC_PI_2 }
    }
}

impl SourceTerm for SourceSpec {
    #[inline]
    fn eval(&self, t: f64, x1: f64, x2: f64, v: f64) -> SourceJet {
        match *self {
            SourceSpec::Zero => SourceJet::default(),
            SourceSpec::Linear { c } => SourceJet { g: c * v, d3: c, ..Default::default() },
            SourceSpec::Sine { amplitude, k1, k2, omega, phase } => {
                let (s, co) = (k1 * x1 + k2 * x2 + omega * t + phase).sin_cos();
                let q = 1.0 / (1.0 + v * v);
                let dq = -2.0 * v * q * q;
                let ddq = (6.0 * v * v - 2.0) * q * q * q;
                SourceJet {
                    g: amplitude * s * q,
                    d1: amplitude * k1 * co * q,
                    d3: amplitude * s * dq,
                    d11: -amplitude * k1 * k1 * s * q,
                    d13: amplitude * k1 * co * dq,
                    d33: amplitude * s * ddq,
                }
            }
        }
    }

    fn bound(&self) -> f64 {
        match *self {
            SourceSpec::Zero => 0.0,
            // on v ∈ [−1, 1/2]
            SourceSpec::Linear { c } => c.abs(),
            SourceSpec::Sine { amplitude, k1, .. } => {
                amplitude.abs() * [1.0, k1.abs(), k1 * k1, 2.0].iter().fold(0.0f64, |m, &x| m.max(x))
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::profiles::Jet;

/// Perturbation `ṽ(x₁, x₂)` of the initial value of `v`; the jet is in `x₁`.
pub trait Perturbation: Send + Sync {
    fn jet(&self, x1: f64, x2: f64) -> Jet;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSpec {
    #[default]
    None,
    /// `a exp(−((x₁−m₁)² + (x₂−m₂)²)/s²)`
    Gaussian { amplitude: f64, m1: f64, m2: f64, width: f64 },
}

impl PerturbationSpec {
    /// A small bump that leaves the blow-up mechanism intact.
    pub fn default_bump() -> Self {
        PerturbationSpec::Gaussian { amplitude: -0.01, m1: 0.05, m2: 0.0, width: 0.05 }
    }
}

impl Perturbation for PerturbationSpec {
    fn jet(&self, x1: f64, x2: f64) -> Jet {
        match *self {
            PerturbationSpec::None => Jet::default(),
            PerturbationSpec::Gaussian { amplitude, m1, m2, width } => {
                let s2 = width * width;
                let dx = x1 - m1;
                let dy = x2 - m2;
                let value = amplitude * (-(dx * dx + dy * dy) / s2).exp();
                Jet {
                    value,
                    d1: -2.0 * dx / s2 * value,
                    d2: (4.0 * dx * dx / (s2 * s2) - 2.0 / s2) * value,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_derivatives() {
        let p = PerturbationSpec::default_bump();
        let h = 1e-6;
        for i in 0..50 {
            let x = 0.01 * i as f64;
            let j = p.jet(x, 0.01);
            let fd = (p.jet(x + h, 0.01).value - p.jet(x - h, 0.01).value) / (2.0 * h);
            let fd2 = (p.jet(x + h, 0.01).d1 - p.jet(x - h, 0.01).d1) / (2.0 * h);
            assert!((fd - j.d1).abs() < 1e-8);
            assert!((fd2 - j.d2).abs() < 1e-5);
        }
        assert_eq!(PerturbationSpec::None.jet(0.1, 0.2), Jet::default());
    }
}

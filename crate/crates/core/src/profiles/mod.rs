//! Scalar profiles: the mollifier `ψ_ε`, the singular initial profile `χ_ε`,
//! the window cutoffs and the `Ω₀` membership test.

mod chi;
mod cutoff;
mod omega;
mod psi;

pub use chi::ChiProfile;
pub use cutoff::{build_cutoffs, WindowCutoff};
pub use omega::in_omega0;
pub use psi::Mollifier;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Value and first two derivatives of a scalar function at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// A scalar function of one variable with closed-form first and second derivatives.
pub trait Profile: Send + Sync {
    /// Closed interval on which evaluation is permitted.
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Closed interval outside which the profile is identically zero or one.
    fn support(&self) -> (f64, f64);

    /// Evaluates without a domain check.
    fn jet_unchecked(&self, x: f64) -> Jet;

    fn jet(&self, x: f64) -> Result<Jet> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain { x, lo, hi });
        }
        Ok(self.jet_unchecked(x))
    }

    fn value(&self, x: f64) -> Result<f64> {
        self.jet(x).map(|j| j.value)
    }
}

/// Quintic smoothstep `6u⁵ − 15u⁴ + 10u³` clamped to `[0, 1]`, with derivatives in `u`.
pub(crate) fn smoothstep(u: f64) -> Jet {
    if u <= 0.0 {
        return Jet::default();
    }
    if u >= 1.0 {
        return Jet { value: 1.0, d1: 0.0, d2: 0.0 };
    }
    let u2 = u * u;
    let um = u - 1.0;
    Jet {
        value: u2 * u * (10.0 + u * (6.0 * u - 15.0)),
        d1: 30.0 * u2 * um * um,
        d2: 60.0 * u * (2.0 * u - 1.0) * um,
    }
}

/// ψ_ε for the given parameters.
pub fn build_psi(params: &ModelParams) -> Result<Mollifier> {
    params.validate()?;
    Ok(Mollifier::new(params.eps))
}

/// χ_ε for the given parameters.
pub fn build_chi(params: &ModelParams) -> Result<ChiProfile> {
    params.validate()?;
    Ok(ChiProfile::new(params.eps, params.alpha))
}

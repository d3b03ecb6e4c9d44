use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Violations of the admissibility constraints on [`ModelParams`].
///
/// Every message names the constraint it checks so that front ends can surface
/// it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("constraint 0 < eps <= 0.25 violated (eps = {0})")]
    Eps(f64),
    #[error("constraint alpha > 0 violated (alpha = {0})")]
    Alpha(f64),
    #[error("constraint beta > 1/2 violated (beta = {0})")]
    Beta(f64),
    #[error("constraint delta > 0 violated (delta = {0})")]
    Delta(f64),
    #[error("constraint 0 <= lambda < 1/8 violated (lambda = {0})")]
    Lambda(f64),
    #[error("constraint 2*alpha - 2*beta - delta < -1 violated (value = {0})")]
    Admissibility(f64),
    #[error("constraint c finite violated (c = {0})")]
    C(f64),
}

/// The experiment parameter tuple `(ε, α, β, δ, c, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub eps: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub c: f64,
    pub lambda: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            eps: 0.01,
            alpha: 0.5,
            beta: 1.0,
            delta: 0.5,
            c: 0.2,
            lambda: 0.05,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let finite = |x: f64| x.is_finite();
        if !(finite(self.eps) && self.eps > 0.0 && self.eps <= 0.25) {
            return Err(ParamError::Eps(self.eps));
        }
        if !(finite(self.alpha) && self.alpha > 0.0) {
            return Err(ParamError::Alpha(self.alpha));
        }
        if !(finite(self.beta) && self.beta > 0.5) {
            return Err(ParamError::Beta(self.beta));
        }
        if !(finite(self.delta) && self.delta > 0.0) {
            return Err(ParamError::Delta(self.delta));
        }
        if !(finite(self.lambda) && (0.0..0.125).contains(&self.lambda)) {
            return Err(ParamError::Lambda(self.lambda));
        }
        if !finite(self.c) {
            return Err(ParamError::C(self.c));
        }
        let adm = self.admissibility();
        if adm >= -1.0 {
            return Err(ParamError::Admissibility(adm));
        }
        Ok(())
    }

    /// `2α − 2β − δ`, which must stay below −1.
    pub fn admissibility(&self) -> f64 {
        2.0 * self.alpha - 2.0 * self.beta - self.delta
    }

    /// `|ln ε|^α`, the slope scale of the initial profile at `y = ε`.
    pub fn log_scale(&self) -> f64 {
        self.eps.ln().abs().powf(self.alpha)
    }

    pub fn with_eps(self, eps: f64) -> Self {
        Self { eps, ..self }
    }

    pub fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set_is_admissible() {
        let p = ModelParams::default();
        p.validate().unwrap();
        assert!((p.admissibility() + 1.5).abs() < 1e-15);
    }

    #[test]
    fn beta_below_half_names_the_constraint() {
        let p = ModelParams {
            beta: 0.4,
            ..Default::default()
        };
        let err = p.validate().unwrap_err();
        assert_eq!(err, ParamError::Beta(0.4));
        assert!(err.to_string().contains("beta > 1/2"));
    }

    #[test]
    fn rejects_out_of_range_values() {
        let base = ModelParams::default();
        assert!(matches!(base.with_eps(0.3).validate(), Err(ParamError::Eps(_))));
        assert!(matches!(base.with_eps(0.0).validate(), Err(ParamError::Eps(_))));
        let p = ModelParams { lambda: 0.125, ..base };
        assert!(matches!(p.validate(), Err(ParamError::Lambda(_))));
        let p = ModelParams { alpha: 1.0, beta: 0.6, delta: 0.1, ..base };
        assert!(matches!(p.validate(), Err(ParamError::Admissibility(_))));
        let p = ModelParams { delta: 0.0, ..base };
        assert!(matches!(p.validate(), Err(ParamError::Delta(_))));
    }
}

use serde::{Deserialize, Serialize};

use super::field::CharacteristicField;
use super::state::CharacteristicState;

/// Counts of sign-condition violations over accepted steps.
///
/// The `w ≤ 0` condition is only counted on seeds where it is claimed
/// (`ψ_ε(x₁) ≥ 1/10`); elsewhere `χ′` is tiny and a bounded source can flip it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignLedger {
    pub seeds: u64,
    pub steps: u64,
    pub w_checked_steps: u64,
    pub phi_x_nonpositive: u64,
    pub v_above_half: u64,
    pub chi_positive: u64,
    pub chi_prime_positive: u64,
    pub w_positive: u64,
}

impl SignLedger {
    pub(crate) fn at_seed(chi: f64, chi_prime: f64) -> Self {
        Self {
            seeds: 1,
            chi_positive: u64::from(chi > 0.0),
            chi_prime_positive: u64::from(chi_prime > 0.0),
            ..Self::default()
        }
    }

    pub(crate) fn record_step(&mut self, s: &CharacteristicState, check_w: bool) {
        self.steps += 1;
        self.phi_x_nonpositive += u64::from(!(s.phi_x > 0.0));
        self.v_above_half += u64::from(!(s.v <= 0.5));
        if check_w {
            self.w_checked_steps += 1;
            self.w_positive += u64::from(!(s.w <= 0.0));
        }
    }

    pub fn merged(&self, o: &Self) -> Self {
        Self {
            seeds: self.seeds + o.seeds,
            steps: self.steps + o.steps,
            w_checked_steps: self.w_checked_steps + o.w_checked_steps,
            phi_x_nonpositive: self.phi_x_nonpositive + o.phi_x_nonpositive,
            v_above_half: self.v_above_half + o.v_above_half,
            chi_positive: self.chi_positive + o.chi_positive,
            chi_prime_positive: self.chi_prime_positive + o.chi_prime_positive,
            w_positive: self.w_positive + o.w_positive,
        }
    }

    pub fn violations(&self) -> u64 {
        self.phi_x_nonpositive + self.v_above_half + self.chi_positive + self.chi_prime_positive + self.w_positive
    }
}

/// Empirical suprema of the derivative estimates over `t ≤ 0.999 t_ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeBoundAudit {
    pub t_eps: f64,
    pub t_cut: f64,
    /// `sup |w|`.
    pub sup_w: f64,
    /// `|ln ε|^α`, the scale `sup_w` is compared against.
    pub log_scale: f64,
    /// `sup |v_xx| φ_x³`.
    pub sup_vxx_phi_x3: f64,
    /// `sup |A| φ_x² / |ln(t_ε − t)|`.
    pub sup_a_over_log: f64,
    pub samples: u64,
    pub all_finite: bool,
}

impl DerivativeBoundAudit {
    pub fn w_within(&self, factor: f64) -> bool {
        self.sup_w <= factor * self.log_scale
    }
}

pub(crate) fn derivative_bound_audit(field: &CharacteristicField, t_eps: f64, log_scale: f64) -> DerivativeBoundAudit {
    let t_cut = 0.999 * t_eps;
    let mut out = DerivativeBoundAudit {
        t_eps,
        t_cut,
        sup_w: 0.0,
        log_scale,
        sup_vxx_phi_x3: 0.0,
        sup_a_over_log: 0.0,
        samples: 0,
        all_finite: true,
    };
    for s in field.trajectories.iter().flat_map(|tr| tr.samples.iter()) {
        if s.t > t_cut {
            continue;
        }
        let p3 = s.phi_x.powi(3);
        let vxx = s.v_xx() * p3;
        let a = s.a_part() * s.phi_x * s.phi_x / (t_eps - s.t).ln().abs().max(f64::MIN_POSITIVE);
        out.samples += 1;
        out.all_finite &= s.w.is_finite() && vxx.is_finite() && a.is_finite();
        out.sup_w = out.sup_w.max(s.w.abs());
        out.sup_vxx_phi_x3 = out.sup_vxx_phi_x3.max(vxx.abs());
        out.sup_a_over_log = out.sup_a_over_log.max(a.abs());
    }
    out
}

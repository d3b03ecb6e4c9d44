use super::audit::{derivative_bound_audit, DerivativeBoundAudit};
use super::field::{CharacteristicField, IntegrationSettings, TransportProblem};
use crate::characteristics::{Audit, BlowupReport};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::numeric::golden_min;
use crate::profiles::Profile;

/// Fraction of `[0, t_ε]` re-integrated with the reduced step.
const FINE_FRACTION: f64 = 0.02;
const FINE_FACTOR: f64 = 10.0;
/// Seed spacing used for the `x₂` finite difference of `φ_{x₁x₁}`.
const X2_DIFF_STEP: f64 = 1e-4;

impl TransportProblem {
    /// Degeneracy time of one seed with the refined step near `t_hint`; `+∞` if none.
    fn refined_degeneracy(&self, x1: f64, x2: f64, dt: f64, t_hint: f64) -> Result<f64> {
        let t_fine = (1.0 - FINE_FRACTION) * t_hint;
        let t_end = (1.0 + FINE_FRACTION) * t_hint + 4.0 * dt;
        let (_, deg) = self.run_single(x1, x2, t_end, dt, t_fine, dt / FINE_FACTOR)?;
        Ok(deg.unwrap_or(f64::INFINITY))
    }

    /// Golden-section refinement of the degeneracy time over one seed coordinate.
    fn refine_axis(
        &self,
        seed: (f64, f64),
        bracket: (f64, f64),
        along_x2: bool,
        dt: f64,
        t_hint: f64,
    ) -> (f64, f64) {
        let f = |s: f64| {
            let (x1, x2) = if along_x2 { (seed.0, s) } else { (s, seed.1) };
            self.refined_degeneracy(x1, x2, dt, t_hint).unwrap_or(f64::INFINITY)
        };
        let tol = 1e-9 * (bracket.1 - bracket.0).abs().max(1e-300) + 1e-13;
        golden_min(f, bracket.0, bracket.1, tol)
    }

    /// Earliest degeneracy in `field`, refined in time and over the seed coordinates.
    pub fn detect_blowup(&self, field: &CharacteristicField) -> Result<BlowupReport> {
        let n1 = field.x1_seeds.len();
        let (best, t0) = field
            .trajectories
            .iter()
            .enumerate()
            .filter_map(|(k, tr)| tr.degenerate_at.map(|t| (k, t)))
            .fold(None, |acc: Option<(usize, f64)>, (k, t)| match acc {
                Some((_, tb)) if tb <= t => acc,
                _ => Some((k, t)),
            })
            .ok_or(Error::NoBlowup { t_max: field.settings.t_end })?;
        let dt = field.settings.dt;
        let (i, j) = (best % n1, best / n1);
        let neighbours = |nodes: &[f64], k: usize| (nodes[k.saturating_sub(1)], nodes[(k + 1).min(nodes.len() - 1)]);

        let mut seed = (field.x1_seeds[i], field.x2_seeds[j]);
        let mut t_eps = self.refined_degeneracy(seed.0, seed.1, dt, t0)?;
        if !t_eps.is_finite() {
            t_eps = t0;
        }
        let passes: &[bool] = if field.x2_seeds.len() > 1 { &[false, true, false] } else { &[false] };
        for &along_x2 in passes {
            let bracket = if along_x2 { neighbours(&field.x2_seeds, j) } else { neighbours(&field.x1_seeds, i) };
            if bracket.0 == bracket.1 {
                continue;
            }
            let (s, t) = self.refine_axis(seed, bracket, along_x2, dt, t_eps);
            if t < t_eps {
                t_eps = t;
                if along_x2 {
                    seed.1 = s;
                } else {
                    seed.0 = s;
                }
            }
        }
        let (nu1, nu2) = seed;

        let t_fine = (1.0 - FINE_FRACTION) * t_eps;
        let (last, _) = self.run_single(nu1, nu2, t_eps, dt, t_fine, dt / FINE_FACTOR)?;
        let x_star = if t_eps > last.t { self.step(&last, t_eps - last.t)?.phi } else { last.phi };

        let t_first = t0.min(t_eps);
        let history: Vec<(f64, f64)> =
            field.min_phi_x_history().into_iter().filter(|&(t, _)| t < t_first).collect();
        let monotone = history.windows(2).all(|p| p[1].1 <= p[0].1 + 1e-12 * p[0].1.abs());

        let phi_x2x1x1 = {
            let h = X2_DIFF_STEP;
            let at = |x2: f64| {
                self.run_single(nu1, x2, t_eps, dt, t_fine, dt / FINE_FACTOR)
                    .map(|(s, _)| s.phi_xx)
            };
            if nu2 - h >= -0.5 && nu2 + h <= 0.5 {
                Some((at(nu2 + h)? - at(nu2 - h)?) / (2.0 * h))
            } else {
                None
            }
        };

        let log_scale = self.chi.alpha_log_scale();
        let psi_nu = self.chi.mollifier().jet_unchecked(nu1).value;
        let t_bound = 4.0 / log_scale;
        let audits = vec![
            Audit::new("t_eps_le_4_over_log_eps_pow_alpha", t_eps <= t_bound, t_eps, t_bound),
            Audit::new("psi_at_nu1_above_one_ninth", psi_nu > 1.0 / 9.0, psi_nu, 1.0 / 9.0),
            Audit::new(
                "min_phi_x_nonincreasing",
                monotone,
                history.last().map_or(f64::NAN, |h| h.1),
                0.0,
            ),
        ];
        Ok(BlowupReport {
            t_eps,
            nu1,
            nu2: Some(nu2),
            x_star,
            min_phi_x_history: history,
            audits,
            phi_x2x1x1,
        })
    }

    /// Two-pass search: a coarse field on `[0, t_max]` locates the first
    /// degeneracy, a field with step `dt` up to slightly past it is then
    /// handed to [`TransportProblem::detect_blowup`].
    pub fn search_blowup(
        &self,
        x1_seeds: &Grid1D,
        x2_seeds: &Grid1D,
        t_max: f64,
        dt: f64,
    ) -> Result<(CharacteristicField, BlowupReport)> {
        let coarse = self.integrate(x1_seeds, x2_seeds, &IntegrationSettings::new(t_max, t_max / 2000.0))?;
        let t_star = coarse
            .trajectories
            .iter()
            .filter_map(|t| t.degenerate_at)
            .fold(f64::INFINITY, f64::min);
        if !t_star.is_finite() {
            return Err(Error::NoBlowup { t_max });
        }
        let t_end = (1.1 * t_star).min(t_max);
        let steps = (t_end / dt).ceil() as usize;
        let settings = IntegrationSettings::new(t_end, dt).recording_every((steps / 256).max(1));
        let field = self.integrate(x1_seeds, x2_seeds, &settings)?;
        let report = self.detect_blowup(&field)?;
        Ok((field, report))
    }

    /// Suprema of the derivative estimates along every trajectory of `field`.
    pub fn derivative_bound_audit(&self, field: &CharacteristicField, report: &BlowupReport) -> DerivativeBoundAudit {
        derivative_bound_audit(field, report.t_eps, self.chi.alpha_log_scale())
    }
}

//! Closed-form characteristic maps for the model equation (`c = 0`) and the
//! damped/forced variant `∂_t v = c v` along characteristics, plus blow-up
//! detection from those closed forms.
//!
//! With `E = e^{ct}` the transported value is `v(t, φ(t,y)) = E χ(y)` and
//!
//! ```text
//! φ(t,y) = y + t + (2/c) ln((1 − χ)/(1 − Eχ))        (c ≠ 0)
//! φ(t,y) = y + t + 2t χ/(1 − χ)                        (c = 0)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::Grid1D;
use crate::numeric::{bisect_decreasing, golden_min};
use crate::params::ModelParams;
use crate::profiles::{build_chi, ChiProfile, Jet, Profile};
use crate::transport::CharacteristicState;

/// Minimum admissible value of `1 − e^{ct}χ(y)`.
pub const REGIME_MARGIN: f64 = 0.8;

/// A named pass/fail check with the measured value and the bound it was held to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

impl Audit {
    pub fn new(name: impl Into<String>, passed: bool, value: f64, bound: f64) -> Self {
        Self { name: name.into(), passed, value, bound }
    }
}

/// First degeneracy of the characteristic map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub t_eps: f64,
    /// Seed coordinate `ν¹` of the degeneracy.
    pub nu1: f64,
    /// Transverse seed coordinate `ν²` (two-dimensional scenarios only).
    pub nu2: Option<f64>,
    /// Physical position `φ(t_ε, ν)` where the cutoffs are centred.
    pub x_star: f64,
    /// `(t, min over seeds of φ_{x₁})`.
    pub min_phi_x_history: Vec<(f64, f64)>,
    pub audits: Vec<Audit>,
    /// `∂_{x₂}φ_{x₁x₁}` at the blow-up point, when it could be estimated.
    pub phi_x2x1x1: Option<f64>,
}

impl BlowupReport {
    pub fn audit(&self, name: &str) -> Option<&Audit> {
        self.audits.iter().find(|a| a.name == name)
    }

    pub fn all_audits_pass(&self) -> bool {
        self.audits.iter().all(|a| a.passed)
    }
}

/// The four derivatives of `φ` available in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiDerivatives {
    pub phi_y: f64,
    pub phi_ty: f64,
    pub phi_yy: f64,
    pub phi_tyy: f64,
}

#[derive(Debug, Clone)]
pub struct ClosedFormCharacteristics {
    params: ModelParams,
    chi: ChiProfile,
    exec: Execution,
}

impl ClosedFormCharacteristics {
    pub fn new(params: ModelParams) -> Result<Self> {
        let chi = build_chi(&params)?;
        Ok(Self { params, chi, exec: Execution::default() })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn chi(&self) -> &ChiProfile {
        &self.chi
    }

    /// `(χ jet, e^{ct}, (e^{ct} − 1)/c)` after checking `t ≥ 0` and the regime.
    fn setup(&self, t: f64, y: f64) -> Result<(Jet, f64, f64)> {
        if !(t >= 0.0) {
            return Err(Error::Input(format!("time must be non-negative, got {t}")));
        }
        let chi = self.chi.jet(y)?;
        let c = self.params.c;
        let (e, q) = if c == 0.0 {
            (1.0, t)
        } else {
            let em1 = (c * t).exp_m1();
            (1.0 + em1, em1 / c)
        };
        let margin = 1.0 - e * chi.value;
        if margin < REGIME_MARGIN {
            return Err(Error::Regime { t, y, margin });
        }
        Ok((chi, e, q))
    }

    pub fn phi(&self, t: f64, y: f64) -> Result<f64> {
        let (chi, e, _) = self.setup(t, y)?;
        let x = chi.value;
        let c = self.params.c;
        if c == 0.0 {
            return Ok(y + t + 2.0 * t * x / (1.0 - x));
        }
        // ln((1−χ)/(1−Eχ)) = ln(1 + (E−1)χ/(1−Eχ))
        let em1 = (c * t).exp_m1();
        Ok(y + t + 2.0 / c * (em1 * x / (1.0 - e * x)).ln_1p())
    }

    /// `∂_t φ = (1 + e^{ct}χ)/(1 − e^{ct}χ)`.
    pub fn phi_t(&self, t: f64, y: f64) -> Result<f64> {
        let (chi, e, _) = self.setup(t, y)?;
        let v = e * chi.value;
        Ok((1.0 + v) / (1.0 - v))
    }

    pub fn phi_derivatives(&self, t: f64, y: f64) -> Result<PhiDerivatives> {
        let (chi, e, q) = self.setup(t, y)?;
        Ok(derivatives_from(chi, e, q))
    }

    /// `v(t, φ(t,y)) = e^{ct} χ(y)`.
    pub fn transported_value(&self, t: f64, y: f64) -> Result<f64> {
        let (chi, e, _) = self.setup(t, y)?;
        Ok(e * chi.value)
    }

    /// The augmented characteristic state at `(t, y)`, as the transport solver
    /// would carry it: `w = e^{ct}χ'`, `W = e^{ct}χ''`.
    pub fn state(&self, t: f64, y: f64, x2: f64) -> Result<CharacteristicState> {
        let (chi, e, q) = self.setup(t, y)?;
        let d = derivatives_from(chi, e, q);
        Ok(CharacteristicState {
            t,
            x1: y,
            x2,
            phi: self.phi(t, y)?,
            v: e * chi.value,
            phi_x: d.phi_y,
            w: e * chi.d1,
            phi_xx: d.phi_yy,
            w_x: e * chi.d2,
        })
    }

    /// [`Self::state`] for every seed, in seed order.
    pub fn states(&self, t: f64, seeds: &[f64], x2: f64) -> Result<Vec<CharacteristicState>> {
        self.exec.try_map(seeds, |&y| self.state(t, y, x2))
    }

    /// Golden-section refinement of `min_y φ_y(t, y)` around the grid minimiser.
    fn refined_min(&self, t: f64, nodes: &[f64]) -> Result<(f64, f64)> {
        let vals = self
            .exec
            .try_map(nodes, |&y| self.phi_derivatives(t, y).map(|d| d.phi_y))?;
        let (imin, _) = vals
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let lo = nodes[imin.saturating_sub(1)];
        let hi = nodes[(imin + 1).min(nodes.len() - 1)];
        let f = |y: f64| self.phi_derivatives(t, y).map(|d| d.phi_y).unwrap_or(f64::INFINITY);
        let (y, v) = golden_min(f, lo, hi, 1e-14);
        if v <= vals[imin] {
            Ok((y, v))
        } else {
            Ok((nodes[imin], vals[imin]))
        }
    }

    /// Locates `(t_ε, ν_ε)`: bisection on `t` of the refined grid minimum of `φ_y`.
    pub fn detect_blowup(&self, y_grid: &Grid1D) -> Result<BlowupReport> {
        let eps = self.params.eps;
        if y_grid.lo() > 0.25 * eps * (1.0 + 1e-9) || y_grid.hi() < 0.5 * (1.0 - 1e-9) {
            return Err(Error::Input(format!(
                "blow-up grid [{}, {}] must cover [eps/4, 1/2]",
                y_grid.lo(),
                y_grid.hi()
            )));
        }
        let nodes = y_grid.nodes();
        let log_scale = self.params.log_scale();
        let t_max = (10.0 / log_scale).min(1.0);
        let (_, m_max) = self.refined_min(t_max, nodes)?;
        if m_max > 0.0 {
            return Err(Error::NoBlowup { t_max });
        }
        let t_eps = bisect_decreasing(
            |t| self.refined_min(t, nodes).map(|r| r.1).unwrap_or(f64::NEG_INFINITY),
            0.0,
            t_max,
            1e-12,
        );
        let (nu, _) = self.refined_min(t_eps, nodes)?;
        let x_star = self.phi(t_eps, nu)?;

        let n_hist = 64;
        let history = (0..=n_hist)
            .map(|k| {
                let t = t_eps * k as f64 / n_hist as f64;
                self.refined_min(t, nodes).map(|(_, m)| (t, m))
            })
            .collect::<Result<Vec<_>>>()?;

        let at = self.phi_derivatives(t_eps, nu)?;
        let grid_d = self.exec.try_map(nodes, |&y| self.phi_derivatives(t_eps, y))?;
        let yy_scale = grid_d.iter().map(|d| d.phi_yy.abs()).fold(0.0, f64::max);
        let tyy_scale = grid_d.iter().map(|d| d.phi_tyy.abs()).fold(0.0, f64::max);
        let margin = self
            .exec
            .try_map(nodes, |&y| self.transported_value(t_eps, y).map(|v| 1.0 - v))?
            .into_iter()
            .fold(f64::INFINITY, f64::min);

        let t_bound = 5.0 / log_scale;
        let audits = vec![
            Audit::new("t_eps_le_5_over_log_eps_pow_alpha", t_eps <= t_bound, t_eps, t_bound),
            Audit::new("nu_below_eps", nu < eps, nu, eps),
            Audit::new("phi_yy_vanishes_at_nu", at.phi_yy.abs() <= 1e-4 * yy_scale, at.phi_yy, 1e-4 * yy_scale),
            if self.params.c == 0.0 {
                // φ_y is affine in t here, so φ_tyy = φ_yy / t and both vanish at ν.
                Audit::new("phi_tyy_vanishes_with_phi_yy_at_nu", at.phi_tyy.abs() <= 1e-4 * tyy_scale, at.phi_tyy, 1e-4 * tyy_scale)
            } else {
                Audit::new("phi_tyy_nonzero_at_nu", at.phi_tyy.abs() >= 1e-6 * tyy_scale, at.phi_tyy, 1e-6 * tyy_scale)
            },
            Audit::new("regime_margin", margin >= REGIME_MARGIN, margin, REGIME_MARGIN),
        ];

        Ok(BlowupReport {
            t_eps,
            nu1: nu,
            nu2: None,
            x_star,
            min_phi_x_history: history,
            audits,
            phi_x2x1x1: None,
        })
    }

    /// Empirical constants of the local estimates around `(t_ε, ν_ε)`.
    pub fn sandwich_audit(&self, report: &BlowupReport, window: f64) -> Result<SandwichAudit> {
        let nu = report.nu1;
        let te = report.t_eps;
        let n = 41;
        let mut r1 = (f64::INFINITY, f64::NEG_INFINITY);
        let mut r2 = (f64::INFINITY, f64::NEG_INFINITY);
        let mut finite = true;
        let excluded = 1e-8;
        for i in 0..n {
            let y = nu - window + 2.0 * window * i as f64 / (n - 1) as f64;
            if !(0.0..=0.5).contains(&y) {
                continue;
            }
            for k in 0..n {
                let s = window * window * k as f64 / (n - 1) as f64;
                if (y - nu).abs() < excluded && s < excluded {
                    continue;
                }
                let t = te - s;
                let d = self.phi_derivatives(t, y)?;
                let ratio = d.phi_y / ((y - nu).powi(2) + s);
                finite &= ratio.is_finite();
                r1 = (r1.0.min(ratio), r1.1.max(ratio));
            }
            if (y - nu).abs() >= excluded {
                let d = self.phi_derivatives(te, y)?;
                let ratio = d.phi_yy / (nu - y);
                finite &= ratio.is_finite();
                r2 = (r2.0.min(ratio), r2.1.max(ratio));
            }
        }
        Ok(SandwichAudit {
            window,
            phi_y_ratio: r1,
            phi_yy_ratio: r2,
            phi_y_ratio_bounded: finite && r1.0 > 0.0,
            phi_yy_ratio_bounded: finite && (r2.0 > 0.0 || r2.1 < 0.0),
        })
    }
}

fn derivatives_from(chi: Jet, e: f64, q: f64) -> PhiDerivatives {
    let (x, x1, x2) = (chi.value, chi.d1, chi.d2);
    let a = 1.0 - x;
    let b = 1.0 - e * x;
    PhiDerivatives {
        phi_y: 1.0 + 2.0 * q * x1 / (a * b),
        phi_ty: 2.0 * x1 * e / (b * b),
        phi_yy: 2.0 * q * ((1.0 + e - 2.0 * e * x) * x1 * x1 + a * b * x2) / (a * a * b * b),
        phi_tyy: 2.0 * e * (x2 * b + 2.0 * x1 * x1 * e) / (b * b * b),
    }
}

/// Ratios `φ_y / ((y−ν)² + (t_ε−t))` and `φ_yy(t_ε, y)/(ν − y)` over a window.
///
/// `phi_yy_ratio_bounded` asks for a ratio of constant sign bounded away from zero;
/// near a quadratic minimum of `φ_y(t_ε, ·)` it is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichAudit {
    pub window: f64,
    pub phi_y_ratio: (f64, f64),
    pub phi_yy_ratio: (f64, f64),
    pub phi_y_ratio_bounded: bool,
    pub phi_yy_ratio_bounded: bool,
}

/// Geometric seed grid on `[ε/4, 1/2]`.
pub fn default_blowup_grid(eps: f64, n: usize) -> Result<Grid1D> {
    Grid1D::geometric(0.25 * eps, 0.5, n)
}

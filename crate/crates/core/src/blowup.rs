//! Rate extraction, decomposition audits and ε-sweeps on top of the detection
//! and norm pipelines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{Detection, Experiment, ExperimentConfig};
use crate::norms::WindowedI;

/// `(t_k, I_k)` with `t_k ↑ t_ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub t_eps: f64,
    pub points: Vec<(f64, f64)>,
}

impl NormSeries {
    pub fn new(t_eps: f64, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Input("series times must be strictly increasing".into()));
        }
        if let Some(&(t, i)) = points.iter().find(|p| !(p.0 < t_eps && p.1 > 0.0 && p.1.is_finite())) {
            return Err(Error::Input(format!("series point ({t}, {i}) needs t < t_eps and a positive finite value")));
        }
        Ok(Self { t_eps, points })
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 > w[0].1)
    }
}

/// `I ≈ C (t_ε − t)^{−p}` fitted over `points[window.0..window.1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (usize, usize),
}

/// Least squares of `ln I` against `ln(t_ε − t)` over the last full decade of
/// `t_ε − t`; the exponent is minus the slope.
pub fn fit_rate(series: &NormSeries) -> Result<RateFit> {
    let pts = &series.points;
    if pts.len() < 6 {
        return Err(Error::FitWindow(format!("need at least 6 points, got {}", pts.len())));
    }
    let gaps: Vec<f64> = pts.iter().map(|p| series.t_eps - p.0).collect();
    let (g_min, g_max) = (gaps[gaps.len() - 1], gaps[0]);
    let span = (g_max / g_min).log10();
    if span < 1.5 {
        return Err(Error::FitWindow(format!("t_eps - t spans {span:.3} decades, need at least 1.5")));
    }
    let start = gaps.iter().position(|&g| g <= 10.0 * g_min * (1.0 + 1e-12)).unwrap_or(0);
    let window = (start, pts.len());
    if window.1 - window.0 < 3 {
        return Err(Error::FitWindow("the last decade holds fewer than 3 points".into()));
    }
    let xs: Vec<f64> = gaps[start..].iter().map(|g| g.ln()).collect();
    let ys: Vec<f64> = pts[start..].iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(RateFit { exponent: -slope, intercept, r_squared, window })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub t: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// `(|I¹| + |I³|)/I²`.
    pub ratio: f64,
    /// `|I¹ + I² + I³ − I| / |I|`.
    pub identity_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionAudit {
    pub rows: Vec<DecompositionRow>,
    pub all_finite: bool,
    /// Ratio strictly decreasing over every listed time.
    pub ratio_decreasing: bool,
    /// Ratio strictly decreasing over the last four times.
    pub ratio_decreasing_last4: bool,
}

pub fn decomposition_audit(points: &[WindowedI]) -> DecompositionAudit {
    let rows: Vec<DecompositionRow> = points
        .iter()
        .map(|w| {
            let [i1, i2, i3] = w.parts;
            DecompositionRow {
                t: w.t,
                i1,
                i2,
                i3,
                ratio: w.outer_ratio(),
                identity_error: ((i1 + i2 + i3) - w.total).abs() / w.total.abs().max(f64::MIN_POSITIVE),
            }
        })
        .collect();
    let decreasing = |r: &[DecompositionRow]| r.windows(2).all(|w| w[1].ratio < w[0].ratio);
    let last4 = &rows[rows.len().saturating_sub(4)..];
    DecompositionAudit {
        all_finite: rows.iter().all(|r| r.i1.is_finite() && r.i2.is_finite() && r.i3.is_finite()),
        ratio_decreasing: decreasing(&rows),
        ratio_decreasing_last4: rows.len() >= 4 && decreasing(last4),
        rows,
    }
}

/// One point of a rate study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub k: u32,
    pub t: f64,
    /// `t_ε − t`.
    pub gap: f64,
    pub value: WindowedI,
    /// `min φ_x ≥ 10 h` with `h` the seed spacing where the minimum sits.
    pub resolved: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateStudy {
    pub detection: Detection,
    pub points: Vec<RatePoint>,
    /// First `k` dropped by the resolution cap, if any.
    pub capped_at: Option<u32>,
    pub strictly_increasing: bool,
    pub fit: Option<RateFit>,
    pub fit_error: Option<String>,
    pub decomposition: DecompositionAudit,
}

impl RateStudy {
    pub fn series(&self) -> NormSeries {
        NormSeries {
            t_eps: self.detection.report.t_eps,
            points: self.points.iter().map(|p| (p.t, p.value.total)).collect(),
        }
    }
}

/// Detection, `I_ε(t_k)` on `t_k = t_ε(1 − 2^{−k})`, rate fit and decomposition.
pub fn rate_study(experiment: &Experiment) -> Result<RateStudy> {
    let detection = experiment.detect()?;
    let report = &detection.report;
    let ks = experiment.rate_times(report);
    let times: Vec<f64> = ks.iter().map(|p| p.1).collect();
    let values = experiment.windowed_series(report, &times)?;
    let mut points = Vec::with_capacity(values.len());
    let mut capped_at = None;
    for ((k, t), value) in ks.into_iter().zip(values) {
        let resolved = value.min_phi_x >= 10.0 * value.spacing_at_min;
        if !resolved {
            capped_at = Some(k);
            break;
        }
        points.push(RatePoint { k, t, gap: report.t_eps - t, value, resolved });
    }
    let windows: Vec<WindowedI> = points.iter().map(|p| p.value).collect();
    let decomposition = decomposition_audit(&windows);
    let mut study = RateStudy {
        detection,
        points,
        capped_at,
        strictly_increasing: false,
        fit: None,
        fit_error: None,
        decomposition,
    };
    let series = study.series();
    study.strictly_increasing = series.is_strictly_increasing();
    match NormSeries::new(series.t_eps, series.points).and_then(|s| fit_rate(&s)) {
        Ok(f) => study.fit = Some(f),
        Err(e) => study.fit_error = Some(e.to_string()),
    }
    Ok(study)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub t_eps: f64,
    pub nu1: f64,
    pub nu2: Option<f64>,
    pub x_star: f64,
    pub t_bound: f64,
    pub t_bound_ok: bool,
    pub audits_pass: bool,
    pub sign_violations: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub t_eps_decreasing: bool,
    pub all_bounds_ok: bool,
}

/// Detection for each ε of `config.eps_list` (descending).
pub fn epsilon_sweep(config: &ExperimentConfig) -> Result<Sweep> {
    config.validate()?;
    let rows = config.execution.try_map(&config.eps_list, |&eps| -> Result<SweepRow> {
        let d = Experiment::new(config.with_eps(eps))?.detect()?;
        Ok(SweepRow {
            eps,
            t_eps: d.report.t_eps,
            nu1: d.report.nu1,
            nu2: d.report.nu2,
            x_star: d.report.x_star,
            t_bound: d.t_bound,
            t_bound_ok: d.t_bound_ok,
            audits_pass: d.report.all_audits_pass(),
            sign_violations: d.ledger.violations(),
        })
    })?;
    Ok(Sweep {
        t_eps_decreasing: rows.windows(2).all(|w| w[1].t_eps < w[0].t_eps),
        all_bounds_ok: rows.iter().all(|r| r.t_bound_ok),
        rows,
    })
}

use serde::{Deserialize, Serialize};

use super::kernel::kernel_form_rows;
use crate::characteristics::BlowupReport;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::profiles::{Profile, WindowCutoff};
use crate::transport::{CharacteristicField, RowSnapshot};

/// Centres and half-width `δ_ε` of the cutoffs `ψ¹(x₁)ψ²(x₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub center_x1: f64,
    pub center_x2: f64,
    pub delta: f64,
}

impl WindowSpec {
    /// Window at the blow-up point `(φ(t_ε, ν_ε), ν_ε²)`.
    pub fn from_report(report: &BlowupReport, delta: f64) -> Self {
        Self { center_x1: report.x_star, center_x2: report.nu2.unwrap_or(0.0), delta }
    }

    pub fn cutoffs(&self) -> (WindowCutoff, WindowCutoff) {
        (WindowCutoff::new(self.center_x1, self.delta), WindowCutoff::new(self.center_x2, self.delta))
    }

    /// `[center − 2δ, center + 2δ]` in `x₁`.
    pub fn x1_support(&self) -> (f64, f64) {
        (self.center_x1 - 2.0 * self.delta, self.center_x1 + 2.0 * self.delta)
    }
}

/// `I_ε(t)` and its split by outer-variable position: left transition zone,
/// plateau `|x₁ − X*| ≤ δ`, right transition zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowedI {
    pub t: f64,
    pub total: f64,
    pub parts: [f64; 3],
    pub rows: usize,
    /// Fewest seeds falling inside the window over the rows used.
    pub min_nodes: usize,
    /// Smallest `φ_x` among the seeds inside the window.
    pub min_phi_x: f64,
    /// Seed spacing around the seed attaining `min_phi_x`.
    pub spacing_at_min: f64,
}

impl WindowedI {
    /// `(|I¹| + |I³|)/I²`.
    pub fn outer_ratio(&self) -> f64 {
        (self.parts[0].abs() + self.parts[2].abs()) / self.parts[1]
    }
}

/// Trapezoid weights on `nodes`; a single node gets weight one.
pub fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|j| {
            let left = if j > 0 { nodes[j] - nodes[j - 1] } else { 0.0 };
            let right = if j + 1 < n { nodes[j + 1] - nodes[j] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

struct RowForm {
    parts: [f64; 3],
    nodes: usize,
    min_phi_x: f64,
    spacing_at_min: f64,
}

fn row_form(row: &RowSnapshot, psi1: &WindowCutoff, lambda: f64, exec: Execution) -> Result<RowForm> {
    let (lo, hi) = psi1.support();
    let states = &row.states;
    if states.windows(2).any(|p| !(p[1].phi > p[0].phi)) {
        return Err(Error::Input(format!("characteristic map is not increasing on row x2 = {}", row.x2)));
    }
    let covered = states.first().is_some_and(|s| s.phi <= lo) && states.last().is_some_and(|s| s.phi >= hi);
    if !covered {
        return Err(Error::Input(format!(
            "seed row x2 = {} does not cover the cutoff window [{lo}, {hi}]",
            row.x2
        )));
    }
    let inside: Vec<_> = states.iter().filter(|s| s.phi > lo && s.phi < hi).collect();
    if inside.len() < 4 {
        return Err(Error::Input(format!(
            "only {} seeds of row x2 = {} fall inside the cutoff window",
            inside.len(),
            row.x2
        )));
    }
    // g and its first two derivatives vanish at the support ends
    let mut nodes = Vec::with_capacity(inside.len() + 2);
    nodes.push(lo);
    nodes.extend(inside.iter().map(|s| s.phi));
    nodes.push(hi);
    let mut g = Vec::with_capacity(nodes.len());
    g.push(0.0);
    g.extend(inside.iter().map(|s| {
        let c = psi1.jet_unchecked(s.phi);
        c.d2 * s.v + 2.0 * c.d1 * s.v_x() + c.value * s.v_xx()
    }));
    g.push(0.0);
    let contrib = kernel_form_rows(&nodes, &g, &g, lambda, exec)?;
    let (c, d) = (psi1.center(), psi1.delta());
    let mut parts = [0.0; 3];
    for (x, r) in nodes.iter().zip(&contrib) {
        let k = if *x < c - d {
            0
        } else if *x <= c + d {
            1
        } else {
            2
        };
        parts[k] += r;
    }
    let (k, min_phi_x) = inside
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, s)| if s.phi_x < acc.1 { (k, s.phi_x) } else { acc });
    let left = if k > 0 { inside[k].x1 - inside[k - 1].x1 } else { 0.0 };
    let right = if k + 1 < inside.len() { inside[k + 1].x1 - inside[k].x1 } else { 0.0 };
    Ok(RowForm { parts, nodes: inside.len(), min_phi_x, spacing_at_min: left.max(right) })
}

/// `I_ε(t)` from row snapshots by the change of variables `x₁ = φ(t, seed, x₂)`.
///
/// `x2_weights[j]` is the quadrature weight of `rows[j]`. Rows whose `ψ²` weight
/// vanishes are skipped.
pub fn windowed_i_rows(
    rows: &[RowSnapshot],
    x2_weights: &[f64],
    spec: &WindowSpec,
    t: f64,
    lambda: f64,
    exec: Execution,
) -> Result<WindowedI> {
    if rows.len() != x2_weights.len() || rows.is_empty() {
        return Err(Error::Input("windowed I needs one weight per row and at least one row".into()));
    }
    let (psi1, psi2) = spec.cutoffs();
    let scale: Vec<f64> = rows
        .iter()
        .zip(x2_weights)
        .map(|(r, w)| {
            let p = psi2.jet_unchecked(r.x2).value;
            p * p * w
        })
        .collect();
    let active: Vec<usize> = (0..rows.len()).filter(|&j| scale[j] != 0.0).collect();
    let forms = exec.try_map(&active, |&j| row_form(&rows[j], &psi1, lambda, exec))?;
    let mut out = WindowedI {
        t,
        total: 0.0,
        parts: [0.0; 3],
        rows: active.len(),
        min_nodes: usize::MAX,
        min_phi_x: f64::INFINITY,
        spacing_at_min: 0.0,
    };
    for (f, &j) in forms.iter().zip(&active) {
        for k in 0..3 {
            out.parts[k] += scale[j] * f.parts[k];
        }
        out.min_nodes = out.min_nodes.min(f.nodes);
        if f.min_phi_x < out.min_phi_x {
            out.min_phi_x = f.min_phi_x;
            out.spacing_at_min = f.spacing_at_min;
        }
    }
    if active.is_empty() {
        out.min_nodes = 0;
    }
    out.total = out.parts.iter().sum();
    Ok(out)
}

/// `I_ε(t)` on a characteristic field, with the cutoffs built at the blow-up point.
pub fn windowed_i(
    field: &CharacteristicField,
    report: &BlowupReport,
    t: f64,
    delta: f64,
    lambda: f64,
    exec: Execution,
) -> Result<WindowedI> {
    if !(t < report.t_eps) {
        return Err(Error::PastBlowup { t, t_eps: report.t_eps });
    }
    let spec = WindowSpec::from_report(report, delta);
    let (_, psi2) = spec.cutoffs();
    let all_weights = trapezoid_weights(&field.x2_seeds);
    let keep = |x2: f64| psi2.jet_unchecked(x2).value != 0.0;
    let rows = field.rows_at_filtered(t, keep)?;
    let weights: Vec<f64> = field
        .x2_seeds
        .iter()
        .zip(&all_weights)
        .filter(|(x2, _)| keep(**x2))
        .map(|(_, w)| *w)
        .collect();
    if rows.is_empty() {
        return Err(Error::Input("no x2 seed row falls inside the cutoff window".into()));
    }
    windowed_i_rows(&rows, &weights, &spec, t, lambda, exec)
}


//! Scenario pipelines shared by the sweep, the rate study and the CLI.

use serde::{Deserialize, Serialize};

use crate::characteristics::{default_blowup_grid, BlowupReport, ClosedFormCharacteristics};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::Grid1D;
use crate::norms::{trapezoid_weights, windowed_i_rows, WindowSpec, WindowedI};
use crate::numeric::bisect_decreasing;
use crate::params::ModelParams;
use crate::profiles::{build_chi, Profile};
use crate::transport::{
    CharacteristicField, IntegrationSettings, PerturbationSpec, RowSnapshot, SignLedger, SourceSpec, TransportProblem,
};

/// Version tag embedded in every JSON artifact.
pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// `c = 0`, closed form.
    Model,
    /// `∂_t v = c v` along characteristics, closed form.
    #[default]
    CVariant,
    /// Bounded source `g(t, x₁, x₂, v)`, numerical transport.
    SourceTerm,
    /// Source term plus a perturbation of the initial data.
    PerturbedData,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Model, Scenario::CVariant, Scenario::SourceTerm, Scenario::PerturbedData];

    pub fn is_closed_form(self) -> bool {
        matches!(self, Scenario::Model | Scenario::CVariant)
    }

    /// `K` in the blow-up time bound `t_ε ≤ K/|ln ε|^α`.
    pub fn blowup_bound_constant(self) -> f64 {
        if self.is_closed_form() {
            5.0
        } else {
            4.0
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Model => "model",
            Scenario::CVariant => "c_variant",
            Scenario::SourceTerm => "source_term",
            Scenario::PerturbedData => "perturbed_data",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown scenario '{s}' (expected model, c_variant, source_term or perturbed_data)")))
    }
}

/// Grid and time-step choices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Resolution {
    /// `x₁` seeds for detection (geometric on `[ε/4, 1/2]`) and for the cutoff window.
    pub seeds_x1: usize,
    /// `x₂` seeds for detection and for the cutoff window (numerical scenarios).
    pub seeds_x2: usize,
    /// Detection seeds cover `x₂ ∈ [−r, r]`.
    pub x2_half_range: f64,
    /// Seed count of the closed-form detection grid.
    pub closed_form_grid: usize,
    /// Time step; defaults to `t_bracket / 2·10⁴`.
    pub dt: Option<f64>,
    /// Cutoff half-width `δ_ε`; defaults to `1.25·t_ε·2^{−k_min}`, which keeps the
    /// moving singular point `φ(t, ν_ε)` inside the plateau for every rate time.
    pub delta_eps: Option<f64>,
    /// Rate study times `t_k = t_ε(1 − 2^{−k})`, `k_min ≤ k ≤ k_max`.
    pub k_min: u32,
    pub k_max: u32,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            seeds_x1: 200,
            seeds_x2: 9,
            x2_half_range: 0.04,
            closed_form_grid: 2000,
            dt: None,
            delta_eps: None,
            k_min: 3,
            k_max: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub params: ModelParams,
    pub source: SourceSpec,
    pub perturbation: PerturbationSpec,
    pub resolution: Resolution,
    /// ε values of the sweep, descending.
    pub eps_list: Vec<f64>,
    /// `norm` evaluates `I_ε` at `t = fraction · t_ε`.
    pub norm_time_fraction: f64,
    pub execution: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::default(),
            params: ModelParams::default(),
            source: SourceSpec::default(),
            perturbation: PerturbationSpec::default_bump(),
            resolution: Resolution::default(),
            eps_list: vec![1e-2, 1e-3, 1e-4],
            norm_time_fraction: 0.5,
            execution: Execution::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn for_scenario(scenario: Scenario) -> Self {
        Self { scenario, ..Self::default() }
    }

    /// Same configuration at another ε.
    pub fn with_eps(&self, eps: f64) -> Self {
        Self { params: self.params.with_eps(eps), ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let r = &self.resolution;
        let bad = |m: String| Err(Error::Input(m));
        if r.seeds_x1 < 8 {
            return bad(format!("seeds_x1 must be at least 8, got {}", r.seeds_x1));
        }
        if r.seeds_x2 < 1 {
            return bad("seeds_x2 must be at least 1".into());
        }
        if r.closed_form_grid < 16 {
            return bad(format!("closed_form_grid must be at least 16, got {}", r.closed_form_grid));
        }
        if !(r.x2_half_range > 0.0 && r.x2_half_range <= 0.5) {
            return bad(format!("x2_half_range must lie in (0, 1/2], got {}", r.x2_half_range));
        }
        if let Some(dt) = r.dt {
            if !(dt > 0.0 && dt < 0.1) {
                return bad(format!("dt must lie in (0, 0.1), got {dt}"));
            }
        }
        if let Some(d) = r.delta_eps {
            if !(d > 0.0 && d < 0.1) {
                return bad(format!("delta_eps must lie in (0, 0.1), got {d}"));
            }
        }
        if !(r.k_min >= 1 && r.k_min < r.k_max && r.k_max <= 30) {
            return bad(format!("rate times need 1 <= k_min < k_max <= 30, got {}..{}", r.k_min, r.k_max));
        }
        if !(self.norm_time_fraction > 0.0 && self.norm_time_fraction < 1.0) {
            return bad(format!("norm_time_fraction must lie in (0, 1), got {}", self.norm_time_fraction));
        }
        if self.eps_list.is_empty() {
            return bad("eps_list must not be empty".into());
        }
        for &e in &self.eps_list {
            self.params.with_eps(e).validate()?;
        }
        if self.eps_list.windows(2).any(|w| !(w[1] < w[0])) {
            return bad("eps_list must be strictly descending".into());
        }
        Ok(())
    }

    /// `φ_t < 1`, so after `t_k` the singular point moves by less than `t_ε·2^{−k}`.
    pub fn delta_eps(&self, t_eps: f64) -> f64 {
        self.resolution.delta_eps.unwrap_or(1.25 * t_eps * 0.5f64.powi(self.resolution.k_min as i32))
    }
}

/// Outcome of blow-up detection for one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Detection {
    pub report: BlowupReport,
    pub ledger: SignLedger,
    pub t_bound: f64,
    pub t_bound_ok: bool,
}

enum Engine {
    Closed(ClosedFormCharacteristics),
    Transport(TransportProblem),
}

/// A validated configuration with its solver.
pub struct Experiment {
    config: ExperimentConfig,
    engine: Engine,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let exec = config.execution;
        let engine = match config.scenario {
            Scenario::Model => {
                let params = config.params.with_c(0.0);
                Engine::Closed(ClosedFormCharacteristics::new(params)?.with_execution(exec))
            }
            Scenario::CVariant => Engine::Closed(ClosedFormCharacteristics::new(config.params)?.with_execution(exec)),
            Scenario::SourceTerm | Scenario::PerturbedData => {
                let chi = build_chi(&config.params)?;
                let mut p = TransportProblem::new(chi, config.source.clone()).with_execution(exec);
                if config.scenario == Scenario::PerturbedData {
                    p = p.with_perturbation(config.perturbation.clone());
                }
                Engine::Transport(p)
            }
        };
        Ok(Self { config, engine })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn closed_form(&self) -> Option<&ClosedFormCharacteristics> {
        match &self.engine {
            Engine::Closed(cf) => Some(cf),
            Engine::Transport(_) => None,
        }
    }

    pub fn transport(&self) -> Option<&TransportProblem> {
        match &self.engine {
            Engine::Transport(p) => Some(p),
            Engine::Closed(_) => None,
        }
    }

    /// Search bracket `[0, min(1, 10/|ln ε|^α)]`.
    pub fn t_max(&self) -> f64 {
        (10.0 / self.config.params.log_scale()).min(1.0)
    }

    pub fn dt(&self) -> f64 {
        self.config.resolution.dt.unwrap_or(self.t_max() / 2e4)
    }

    fn detection_seeds(&self) -> Result<(Grid1D, Grid1D)> {
        let r = &self.config.resolution;
        let x1 = default_blowup_grid(self.config.params.eps, r.seeds_x1)?;
        let x2 = if r.seeds_x2 == 1 {
            Grid1D::single(0.0)
        } else {
            Grid1D::uniform(-r.x2_half_range, r.x2_half_range, r.seeds_x2)?
        };
        Ok((x1, x2))
    }

    /// Detection plus the sign ledger of the pre-blow-up states.
    pub fn detect(&self) -> Result<Detection> {
        let params = &self.config.params;
        let (report, ledger) = match &self.engine {
            Engine::Closed(cf) => {
                let grid = default_blowup_grid(params.eps, self.config.resolution.closed_form_grid)?;
                let report = cf.detect_blowup(&grid)?;
                let ledger = closed_form_ledger(cf, &report, &grid)?;
                (report, ledger)
            }
            Engine::Transport(p) => {
                let (x1, x2) = self.detection_seeds()?;
                let (field, report) = p.search_blowup(&x1, &x2, self.t_max(), self.dt())?;
                (report, field.sign_ledger())
            }
        };
        let t_bound = self.config.scenario.blowup_bound_constant() / params.log_scale();
        Ok(Detection { t_bound_ok: report.t_eps <= t_bound, t_bound, report, ledger })
    }

    /// Field on the detection seeds, sampled at `times` (numerical scenarios only).
    pub fn simulate(&self, t_end: f64, record_every: usize) -> Result<CharacteristicField> {
        let (x1, x2) = self.detection_seeds()?;
        match &self.engine {
            Engine::Transport(p) => {
                let settings = IntegrationSettings::new(t_end, self.dt()).recording_every(record_every);
                p.integrate(&x1, &x2, &settings)
            }
            Engine::Closed(cf) => closed_form_field(cf, &x1, t_end, self.dt(), record_every),
        }
    }

    pub fn window_spec(&self, report: &BlowupReport) -> WindowSpec {
        WindowSpec::from_report(report, self.config.delta_eps(report.t_eps))
    }

    /// `t_k = t_ε(1 − 2^{−k})` for the configured `k` range.
    pub fn rate_times(&self, report: &BlowupReport) -> Vec<(u32, f64)> {
        let r = &self.config.resolution;
        (r.k_min..=r.k_max).map(|k| (k, report.t_eps * (1.0 - 0.5f64.powi(k as i32)))).collect()
    }

    /// Seed interval whose image covers the `x₁` cutoff window for every `t` in `[t_lo, t_hi]`.
    fn seed_window(&self, report: &BlowupReport, spec: &WindowSpec, t_lo: f64, t_hi: f64) -> Result<(f64, f64)> {
        let (lo, hi) = spec.x1_support();
        let nu2 = report.nu2.unwrap_or(0.0);
        let phi = |t: f64, y: f64| -> Result<f64> {
            match &self.engine {
                Engine::Closed(cf) => cf.phi(t, y),
                Engine::Transport(p) => p.state_at(y, nu2, t, self.dt()).map(|s| s.phi),
            }
        };
        let preimage = |t: f64, x: f64| -> Result<f64> {
            if phi(t, -0.5)? >= x {
                return Ok(-0.5);
            }
            if phi(t, 0.5)? <= x {
                return Ok(0.5);
            }
            Ok(bisect_decreasing(|y| x - phi(t, y).unwrap_or(f64::NAN), -0.5, 0.5, 1e-12))
        };
        // φ increases in t, so the left edge is reached last and the right edge first
        let a = preimage(t_hi, lo)?;
        let b = preimage(t_lo, hi)?;
        let margin = 0.02 * (b - a);
        Ok(((a - margin).max(-0.5), (b + margin).min(0.5)))
    }

    /// `I_ε(t)` at each requested time (all before `t_ε`), on seeds graded towards `ν_ε¹`.
    pub fn windowed_series(&self, report: &BlowupReport, times: &[f64]) -> Result<Vec<WindowedI>> {
        if let Some(&t) = times.iter().find(|&&t| !(t > 0.0 && t < report.t_eps)) {
            return Err(Error::PastBlowup { t, t_eps: report.t_eps });
        }
        if times.is_empty() {
            return Ok(Vec::new());
        }
        let lambda = self.config.params.lambda;
        let exec = self.config.execution;
        let spec = self.window_spec(report);
        let t_lo = times.iter().cloned().fold(f64::INFINITY, f64::min);
        let t_hi = times.iter().cloned().fold(0.0, f64::max);
        let (a, b) = self.seed_window(report, &spec, t_lo, t_hi)?;
        let core = 1e-3 * self.config.params.eps;
        let seeds = graded_grid(a, b, report.nu1.clamp(a, b), self.config.resolution.seeds_x1, core)?;
        match &self.engine {
            Engine::Closed(cf) => times
                .iter()
                .map(|&t| {
                    let states = cf.states(t, seeds.nodes(), 0.0)?;
                    let row = RowSnapshot { x2: spec.center_x2, states };
                    windowed_i_rows(&[row], &[1.0], &spec, t, lambda, exec)
                })
                .collect(),
            Engine::Transport(p) => {
                let n2 = self.config.resolution.seeds_x2;
                let d = spec.delta;
                let x2 = if n2 == 1 {
                    Grid1D::single(spec.center_x2)
                } else {
                    let lo = (spec.center_x2 - 2.0 * d).max(-0.5);
                    let hi = (spec.center_x2 + 2.0 * d).min(0.5);
                    Grid1D::uniform(lo, hi, n2)?
                };
                let settings = IntegrationSettings::new(t_hi, self.dt()).recording_at(times.iter().copied());
                let field = p.integrate(&seeds, &x2, &settings)?;
                let weights = trapezoid_weights(x2.nodes());
                times
                    .iter()
                    .map(|&t| {
                        let rows = field.rows_at(t)?;
                        windowed_i_rows(&rows, &weights, &spec, t, lambda, exec)
                    })
                    .collect()
            }
        }
    }
}

/// `n` nodes on `[a, b]`: half uniform, half `c + core·sinh(u)` for uniform `u`
/// (spacing about `core·du` at `c`, growing geometrically away from it).
pub fn graded_grid(a: f64, b: f64, c: f64, n: usize, core: f64) -> Result<Grid1D> {
    if !(a < b && a <= c && c <= b && core > 0.0 && n >= 4) {
        return Err(Error::Input(format!("graded grid needs a <= c <= b, a < b, n >= 4, got ({a}, {c}, {b}), n = {n}")));
    }
    let n_uniform = n / 2;
    let n_graded = n - n_uniform;
    let ua = ((a - c) / core).asinh();
    let ub = ((b - c) / core).asinh();
    let mut nodes: Vec<f64> = (0..n_graded)
        .map(|k| c + core * (ua + (ub - ua) * k as f64 / (n_graded - 1) as f64).sinh())
        .chain((0..n_uniform).map(|k| a + (b - a) * k as f64 / (n_uniform - 1) as f64))
        .map(|y| y.clamp(a, b))
        .collect();
    nodes.sort_by(f64::total_cmp);
    // drop near-duplicates so cells stay non-degenerate
    let min_gap = 1e-12 * (b - a);
    let mut out: Vec<f64> = Vec::with_capacity(nodes.len());
    for y in nodes {
        if out.last().map_or(true, |&l| y - l > min_gap) {
            out.push(y);
        }
    }
    let last = out.len() - 1;
    (out[0], out[last]) = (a, b);
    Grid1D::from_nodes(out)
}

/// Sign ledger of closed-form states over the detection grid and the recorded
/// history times before `t_ε`.
fn closed_form_ledger(cf: &ClosedFormCharacteristics, report: &BlowupReport, grid: &Grid1D) -> Result<SignLedger> {
    let psi = cf.chi().mollifier();
    let times: Vec<f64> = report
        .min_phi_x_history
        .iter()
        .map(|h| h.0)
        .filter(|&t| t > 0.0 && t < report.t_eps)
        .collect();
    let ledgers = cf.execution().try_map(grid.nodes(), |&y| -> Result<SignLedger> {
        let j = cf.chi().jet(y)?;
        let mut l = SignLedger::at_seed(j.value, j.d1);
        let check_w = psi.jet_unchecked(y).value >= 0.1;
        for &t in &times {
            l.record_step(&cf.state(t, y, 0.0)?, check_w);
        }
        Ok(l)
    })?;
    Ok(ledgers.iter().fold(SignLedger::default(), |a, b| a.merged(b)))
}

/// Closed-form states arranged as a characteristic field on one `x₂` row.
fn closed_form_field(
    cf: &ClosedFormCharacteristics,
    seeds: &Grid1D,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<CharacteristicField> {
    let settings = IntegrationSettings::new(t_end, dt).recording_every(record_every);
    let n = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let every = record_every.max(1).min(n);
    let mut times = vec![0.0];
    times.extend((1..=n).filter(|k| k % every == 0 || *k == n).map(|k| (k as f64 * dt).min(t_end)));
    let trajectories = cf.execution().try_map(seeds.nodes(), |&y| -> Result<crate::transport::Trajectory> {
        let j = cf.chi().jet(y)?;
        let mut ledger = SignLedger::at_seed(j.value, j.d1);
        let check_w = cf.chi().mollifier().jet_unchecked(y).value >= 0.1;
        let mut samples = Vec::with_capacity(times.len());
        let mut degenerate_at = None;
        for &t in &times {
            let s = cf.state(t, y, 0.0)?;
            if s.phi_x <= 0.0 {
                degenerate_at = Some(t);
                break;
            }
            if t > 0.0 {
                ledger.record_step(&s, check_w);
            }
            samples.push(s);
        }
        let last = *samples.last().expect("t = 0 is always regular");
        Ok(crate::transport::Trajectory { x1: y, x2: 0.0, samples, last, degenerate_at, ledger })
    })?;
    Ok(CharacteristicField {
        x1_seeds: seeds.nodes().to_vec(),
        x2_seeds: vec![0.0],
        times,
        trajectories,
        settings,
    })
}

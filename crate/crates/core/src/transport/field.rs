use std::sync::Arc;

use serde::Serialize;

use super::audit::SignLedger;
use super::perturbation::{Perturbation, PerturbationSpec};
use super::source::{SourceSpec, SourceTerm};
use super::state::{rk4_step, speed, CharacteristicState};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::Grid1D;
use crate::numeric::hermite_root;
use crate::profiles::{ChiProfile, Profile};

/// `φ_x` below this freezes a trajectory as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;
/// `v` at or above `1 − SPEED_GUARD` is a characteristic-speed singularity.
pub const SPEED_GUARD: f64 = 1e-9;

/// Time stepping and sampling for [`TransportProblem::integrate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrationSettings {
    pub t_end: f64,
    pub dt: f64,
    /// Record every `n`-th step (0 records only `t = 0`, `t_end` and `record_times`).
    pub record_every: usize,
    /// Extra sample times; steps are shortened to land on them exactly.
    pub record_times: Vec<f64>,
}

impl IntegrationSettings {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self { t_end, dt, record_every: 0, record_times: Vec::new() }
    }

    pub fn recording_every(mut self, n: usize) -> Self {
        self.record_every = n;
        self
    }

    pub fn recording_at(mut self, times: impl IntoIterator<Item = f64>) -> Self {
        self.record_times.extend(times);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Input(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Input(format!("t_end must be positive, got {}", self.t_end)));
        }
        Ok(())
    }

    /// Step end points with their record flags.
    fn schedule(&self) -> Vec<(f64, bool)> {
        let n = ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize;
        let mut steps: Vec<(f64, bool)> = (1..=n)
            .map(|k| {
                let t = (k as f64 * self.dt).min(self.t_end);
                (t, self.record_every > 0 && k % self.record_every == 0)
            })
            .collect();
        if let Some(last) = steps.last_mut() {
            last.0 = self.t_end;
            last.1 = true;
        }
        let mut extra: Vec<f64> = self
            .record_times
            .iter()
            .copied()
            .filter(|&t| t > 0.0 && t <= self.t_end)
            .collect();
        extra.sort_by(f64::total_cmp);
        for t in extra {
            let pos = steps.partition_point(|s| s.0 < t);
            if pos < steps.len() && (steps[pos].0 - t).abs() <= 1e-14 * t.max(1.0) {
                steps[pos].1 = true;
            } else if pos > 0 && (steps[pos - 1].0 - t).abs() <= 1e-14 * t.max(1.0) {
                steps[pos - 1].1 = true;
            } else {
                steps.insert(pos, (t, true));
            }
        }
        steps
    }
}

/// One integrated characteristic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub x1: f64,
    pub x2: f64,
    /// States at the field's sample times (a prefix when the trajectory degenerates).
    pub samples: Vec<CharacteristicState>,
    /// Last accepted state.
    pub last: CharacteristicState,
    /// Time at which `φ_x` reached zero, if it did.
    pub degenerate_at: Option<f64>,
    pub ledger: SignLedger,
}

/// States at one sample time for one `x₂` row, ordered by seed `x₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSnapshot {
    pub x2: f64,
    pub states: Vec<CharacteristicState>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacteristicField {
    pub x1_seeds: Vec<f64>,
    pub x2_seeds: Vec<f64>,
    pub times: Vec<f64>,
    /// Row-major over `(x₂, x₁)`: index `j * x1_seeds.len() + i`.
    pub trajectories: Vec<Trajectory>,
    pub settings: IntegrationSettings,
}

impl CharacteristicField {
    pub fn trajectory(&self, i: usize, j: usize) -> &Trajectory {
        &self.trajectories[j * self.x1_seeds.len() + i]
    }

    pub fn time_index(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * t.abs().max(1.0);
        self.times.iter().position(|&s| (s - t).abs() <= tol)
    }

    /// Row snapshots at a recorded sample time, only for the given rows.
    pub fn rows_at_filtered(&self, t: f64, keep_row: impl Fn(f64) -> bool) -> Result<Vec<RowSnapshot>> {
        let k = self.time_index(t).ok_or(Error::MissingSample { t })?;
        let n1 = self.x1_seeds.len();
        let mut rows = Vec::new();
        for (j, &x2) in self.x2_seeds.iter().enumerate() {
            if !keep_row(x2) {
                continue;
            }
            let mut states = Vec::with_capacity(n1);
            for traj in &self.trajectories[j * n1..(j + 1) * n1] {
                match traj.samples.get(k) {
                    Some(s) => states.push(*s),
                    None => {
                        return Err(Error::Resolution {
                            x1: traj.x1,
                            x2: traj.x2,
                            t,
                            t_degenerate: traj.degenerate_at.unwrap_or(traj.last.t),
                        })
                    }
                }
            }
            rows.push(RowSnapshot { x2, states });
        }
        Ok(rows)
    }

    pub fn rows_at(&self, t: f64) -> Result<Vec<RowSnapshot>> {
        self.rows_at_filtered(t, |_| true)
    }

    /// Sum of all per-trajectory sign ledgers.
    pub fn sign_ledger(&self) -> SignLedger {
        self.trajectories
            .iter()
            .fold(SignLedger::default(), |acc, t| acc.merged(&t.ledger))
    }

    /// `(t, min φ_x)` over trajectories that are still regular at each sample time.
    pub fn min_phi_x_history(&self) -> Vec<(f64, f64)> {
        self.times
            .iter()
            .enumerate()
            .filter_map(|(k, &t)| {
                let m = self
                    .trajectories
                    .iter()
                    .filter_map(|tr| tr.samples.get(k).map(|s| s.phi_x))
                    .fold(f64::INFINITY, f64::min);
                m.is_finite().then_some((t, m))
            })
            .collect()
    }
}

/// Initial profile, source and optional perturbation of the transported value.
#[derive(Clone)]
pub struct TransportProblem {
    pub(crate) chi: ChiProfile,
    pub(crate) source: Arc<dyn SourceTerm>,
    pub(crate) perturbation: Arc<dyn Perturbation>,
    pub(crate) exec: Execution,
}

impl std::fmt::Debug for TransportProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransportProblem")
            .field("eps", &self.chi.eps())
            .field("alpha", &self.chi.alpha())
            .field("source_bound", &self.source.bound())
            .field("exec", &self.exec)
            .finish()
    }
}

impl TransportProblem {
    pub fn new(chi: ChiProfile, source: impl SourceTerm + 'static) -> Self {
        Self {
            chi,
            source: Arc::new(source),
            perturbation: Arc::new(PerturbationSpec::None),
            exec: Execution::default(),
        }
    }

    /// The model equation: no source, no perturbation.
    pub fn model(chi: ChiProfile) -> Self {
        Self::new(chi, SourceSpec::Zero)
    }

    pub fn with_perturbation(mut self, p: impl Perturbation + 'static) -> Self {
        self.perturbation = Arc::new(p);
        self
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn chi(&self) -> &ChiProfile {
        &self.chi
    }

    pub fn source(&self) -> &dyn SourceTerm {
        self.source.as_ref()
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    pub fn initial_state(&self, x1: f64, x2: f64) -> Result<CharacteristicState> {
        if !(-0.5..=0.5).contains(&x2) {
            return Err(Error::Domain { x: x2, lo: -0.5, hi: 0.5 });
        }
        let c = self.chi.jet(x1)?;
        let p = self.perturbation.jet(x1, x2);
        Ok(CharacteristicState {
            t: 0.0,
            x1,
            x2,
            phi: x1,
            v: c.value + p.value,
            phi_x: 1.0,
            w: c.d1 + p.d1,
            phi_xx: 0.0,
            w_x: c.d2 + p.d2,
        })
    }

    /// Whether the `w ≤ 0` sign condition is claimed at this seed (`ψ_ε(x₁) ≥ 1/10`).
    fn w_sign_claimed(&self, x1: f64) -> bool {
        self.chi.mollifier().jet_unchecked(x1).value >= 0.1
    }

    /// Advances `state` by `h`, checking the speed guard.
    pub(crate) fn step(&self, state: &CharacteristicState, h: f64) -> Result<CharacteristicState> {
        let y = rk4_step(self.source.as_ref(), state.t, h, state.x2, &state.vector());
        let next = state.with_vector(state.t + h, y);
        if !(next.v < 1.0 - SPEED_GUARD) {
            return Err(Error::SpeedSingularity { t: next.t, v: next.v, x1: state.x1, x2: state.x2 });
        }
        Ok(next)
    }

    /// Time at which `φ_x` crosses zero inside the step `prev → next`.
    pub(crate) fn crossing_time(&self, prev: &CharacteristicState, next: &CharacteristicState) -> f64 {
        let h = next.t - prev.t;
        let d0 = speed(prev.v).1 * prev.w;
        let d1 = speed(next.v).1 * next.w;
        prev.t + h * hermite_root(prev.phi_x, d0, next.phi_x, d1, h)
    }

    fn integrate_seed(&self, x1: f64, x2: f64, schedule: &[(f64, bool)]) -> Result<Trajectory> {
        let init = self.initial_state(x1, x2)?;
        let chi = self.chi.jet_unchecked(x1);
        let mut ledger = SignLedger::at_seed(chi.value, chi.d1);
        let check_w = self.w_sign_claimed(x1);
        let mut samples = vec![init];
        let mut state = init;
        let mut degenerate_at = None;
        for &(t_next, record) in schedule {
            let next = self.step(&state, t_next - state.t)?;
            let next = CharacteristicState { t: t_next, ..next };
            if next.phi_x <= DEGENERACY_THRESHOLD {
                degenerate_at = Some(self.crossing_time(&state, &next));
                break;
            }
            ledger.record_step(&next, check_w);
            if record {
                samples.push(next);
            }
            state = next;
        }
        Ok(Trajectory { x1, x2, samples, last: state, degenerate_at, ledger })
    }

    /// Integrates every seed of `x1_seeds × x2_seeds` with classical RK4.
    pub fn integrate(
        &self,
        x1_seeds: &Grid1D,
        x2_seeds: &Grid1D,
        settings: &IntegrationSettings,
    ) -> Result<CharacteristicField> {
        settings.validate()?;
        let schedule = settings.schedule();
        let seeds: Vec<(f64, f64)> = x2_seeds
            .nodes()
            .iter()
            .flat_map(|&x2| x1_seeds.nodes().iter().map(move |&x1| (x1, x2)))
            .collect();
        let trajectories = self
            .exec
            .try_map(&seeds, |&(x1, x2)| self.integrate_seed(x1, x2, &schedule))?;
        let mut times = vec![0.0];
        times.extend(schedule.iter().filter(|s| s.1).map(|s| s.0));
        Ok(CharacteristicField {
            x1_seeds: x1_seeds.nodes().to_vec(),
            x2_seeds: x2_seeds.nodes().to_vec(),
            times,
            trajectories,
            settings: settings.clone(),
        })
    }

    /// Integrates one seed to `t_end` (or to degeneracy) without recording.
    ///
    /// Steps are `dt` until `t_fine`, then `dt_fine`. Returns the last regular
    /// state and the degeneracy time, if any.
    pub fn run_single(
        &self,
        x1: f64,
        x2: f64,
        t_end: f64,
        dt: f64,
        t_fine: f64,
        dt_fine: f64,
    ) -> Result<(CharacteristicState, Option<f64>)> {
        let mut state = self.initial_state(x1, x2)?;
        let mut k: u64 = 0;
        let mut base = 0.0;
        let mut fine = false;
        while state.t < t_end {
            let target = if !fine {
                let t = (k + 1) as f64 * dt;
                if t >= t_fine {
                    fine = true;
                    base = t_fine.max(state.t);
                    k = 0;
                    t_fine.max(state.t).min(t_end)
                } else {
                    t.min(t_end)
                }
            } else {
                (base + (k + 1) as f64 * dt_fine).min(t_end)
            };
            if target <= state.t {
                k += 1;
                continue;
            }
            let next = self.step(&state, target - state.t)?;
            let next = CharacteristicState { t: target, ..next };
            if next.phi_x <= DEGENERACY_THRESHOLD {
                return Ok((state, Some(self.crossing_time(&state, &next))));
            }
            state = next;
            k += 1;
        }
        Ok((state, None))
    }

    /// State of one seed at exactly time `t` (which must precede any degeneracy).
    pub fn state_at(&self, x1: f64, x2: f64, t: f64, dt: f64) -> Result<CharacteristicState> {
        let (s, deg) = self.run_single(x1, x2, t, dt, t, dt)?;
        match deg {
            Some(td) => Err(Error::Resolution { x1, x2, t, t_degenerate: td }),
            None => Ok(s),
        }
    }
}

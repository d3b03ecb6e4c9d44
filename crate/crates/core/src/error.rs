use thiserror::Error;

use crate::params::ParamError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Params(#[from] ParamError),

    #[error("point {x} lies outside the profile domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("characteristic regime violated at t={t}, y={y}: 1 - e^(ct)χ(y) = {margin} < 4/5")]
    Regime { t: f64, y: f64, margin: f64 },

    #[error("no blow-up detected in [0, {t_max}]")]
    NoBlowup { t_max: f64 },

    #[error("characteristic speed singularity: v = {v} reached 1 at t={t} (seed {x1}, {x2})")]
    SpeedSingularity { t: f64, v: f64, x1: f64, x2: f64 },

    #[error("evaluation at t={t} is not before the blow-up time {t_eps}")]
    PastBlowup { t: f64, t_eps: f64 },

    #[error("trajectory at seed ({x1}, {x2}) degenerated at t={t_degenerate} before the requested t={t}")]
    Resolution { x1: f64, x2: f64, t: f64, t_degenerate: f64 },

    #[error("time {t} is not a recorded sample of the field")]
    MissingSample { t: f64 },

    #[error("fit window error: {0}")]
    FitWindow(String),

    #[error("invalid input: {0}")]
    Input(String),
}

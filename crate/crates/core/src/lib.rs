//! Numerical laboratory for geometric blow-up in 2D quasi-linear wave equations.
//!
//! The crate builds the singular initial profile `χ_ε`, follows the solution along
//! characteristics (in closed form where one exists, with an augmented RK4 system
//! otherwise), locates the first degeneracy of the characteristic map and measures
//! how a cut-off `Ḣ^{7/4-λ}`-type quantity diverges as that time is approached.
//!
//! Module map:
//!
//! * [`profiles`]: mollifier `ψ_ε`, profile `χ_ε`, window cutoffs, `Ω₀` membership.
//! * [`characteristics`]: closed-form characteristic maps and blow-up detection.
//! * [`transport`]: augmented characteristic ODE solver with source terms.
//! * [`norms`]: spectral log-Sobolev norm, singular kernel form, windowed `I_ε(t)`.
//! * [`blowup`]: rate fitting, decomposition audit, ε-sweeps.
//! * [`experiment`]: scenario pipelines shared by the sweep and the CLI.

pub mod blowup;
pub mod characteristics;
mod error;
pub mod exec;
pub mod experiment;
pub mod grid;
pub mod norms;
mod numeric;
mod params;
pub mod profiles;
pub mod transport;

pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::Grid1D;
pub use params::{ModelParams, ParamError};

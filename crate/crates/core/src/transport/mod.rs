//! Augmented characteristic solver for the source-term and perturbed-data problems.
//!
//! Along the characteristic started at seed `(x₁, x₂)` the solver carries
//! `φ`, `v = v(t, φ, x₂)` and their first and second derivatives with respect
//! to the seed coordinate `x₁`:
//!
//! ```text
//! φ'    = F(v)                       v'   = g(t, φ, x₂, v)
//! φ_x'  = F'(v) w                    w'   = φ_x ∂₁g + w ∂₃g
//! φ_xx' = F''(v) w² + F'(v) W
//! W'    = φ_x² ∂₁²g + 2 φ_x w ∂₁∂₃g + w² ∂₃²g + φ_xx ∂₁g + W ∂₃g
//! ```
//!
//! with `F(v) = (1+v)/(1−v)`, `w = ∂_{x₁}(v∘φ)` and `W = ∂_{x₁}w`. The spatial
//! derivatives of `v` follow as `v_x = w/φ_x` and `v_xx = W/φ_x² − φ_xx w/φ_x³`.

mod audit;
mod detect;
mod field;
mod perturbation;
mod source;
mod state;

pub use audit::{DerivativeBoundAudit, SignLedger};
pub use field::{CharacteristicField, IntegrationSettings, RowSnapshot, Trajectory, TransportProblem};
pub use perturbation::{Perturbation, PerturbationSpec};
pub use source::{SourceJet, SourceSpec, SourceTerm};
pub use state::CharacteristicState;

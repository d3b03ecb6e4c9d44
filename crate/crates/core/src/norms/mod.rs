//! Norm engines: the spectral logarithmic Sobolev norm and the singular-kernel
//! bilinear form, plus the cut-off quantity `I_ε(t)` evaluated on characteristic
//! fields.
//!
//! The spectral norm of `f` is
//!
//! ```text
//! ‖f‖² = ∫ |f̂(ξ)|² |ξ|^{2s} (1 + |ln|ξ||)^{−2β} dξ
//! ```
//!
//! and the kernel form is `∬ g₁(x) |x − y|^{−γ} g₂(y) dx dy` with `γ = 1/2 − 2λ`.

mod kernel;
mod spectral;
mod window;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use kernel::{kernel_exponent, kernel_form, kernel_form_nonuniform, kernel_form_rows};
pub use spectral::{multiplier_embedding_check, spectral_norm, EmbeddingReport};
pub use window::{trapezoid_weights, windowed_i, windowed_i_rows, WindowSpec, WindowedI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    Spectral,
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub s: f64,
    pub beta: f64,
    pub lambda: f64,
    pub mode: NormMode,
}

impl NormSpec {
    pub fn spectral(s: f64, beta: f64) -> Self {
        Self { s, beta, lambda: 0.0, mode: NormMode::Spectral }
    }

    pub fn kernel(lambda: f64) -> Self {
        Self { s: 1.75 - lambda, beta: 0.0, lambda, mode: NormMode::Kernel }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::Input(format!("Sobolev index s must be >= 0, got {}", self.s)));
        }
        if !self.beta.is_finite() {
            return Err(Error::Input(format!("log weight beta must be finite, got {}", self.beta)));
        }
        check_lambda(self.lambda)
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..0.125).contains(&lambda) {
        return Err(crate::ParamError::Lambda(lambda).into());
    }
    Ok(())
}

/// Samples on a uniform 1D or 2D grid with spacing `h` in every direction.
///
/// Values are stored row-major, `x` fastest: index `j * nx + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    origin: [f64; 2],
    h: f64,
    shape: [usize; 2],
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new_1d(x0: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new_2d([x0, 0.0], h, [n, 1], values)
    }

    pub fn new_2d(origin: [f64; 2], h: f64, shape: [usize; 2], values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || shape[0] * shape[1] != values.len() {
            return Err(Error::Input(format!(
                "grid shape {}x{} does not match {} samples",
                shape[0],
                shape[1],
                values.len()
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Input(format!("grid spacing must be positive, got {h}")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite sample {v}")));
        }
        Ok(Self { origin, h, shape, values })
    }

    /// `f` sampled at `x0 + i h`, `i < n`.
    pub fn sample_1d(x0: f64, h: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new_1d(x0, h, (0..n).map(|i| f(x0 + i as f64 * h)).collect())
    }

    pub fn sample_2d(origin: [f64; 2], h: f64, shape: [usize; 2], f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(shape[0] * shape[1]);
        for j in 0..shape[1] {
            for i in 0..shape[0] {
                values.push(f(origin[0] + i as f64 * h, origin[1] + j as f64 * h));
            }
        }
        Self::new_2d(origin, h, shape, values)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    pub fn is_1d(&self) -> bool {
        self.shape[1] == 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.origin[0] + i as f64 * self.h
    }

    /// Bounding box (in index space) of the nonzero samples, if any.
    pub fn support(&self) -> Option<([usize; 2], [usize; 2])> {
        let [nx, _] = self.shape;
        let mut lo = [usize::MAX; 2];
        let mut hi = [0usize; 2];
        for (k, v) in self.values.iter().enumerate() {
            if *v != 0.0 {
                let (i, j) = (k % nx, k / nx);
                lo = [lo[0].min(i), lo[1].min(j)];
                hi = [hi[0].max(i), hi[1].max(j)];
            }
        }
        (lo[0] != usize::MAX).then_some((lo, hi))
    }

    /// Whether the samples vanish to within `tol` (relative to the peak) on the
    /// outermost grid lines, i.e. the support sits strictly inside the grid.
    pub fn is_compactly_supported(&self, tol: f64) -> bool {
        let [nx, ny] = self.shape;
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let edge = |i: usize, j: usize| self.values[j * nx + i].abs() <= tol * peak;
        let x_ok = (0..ny).all(|j| edge(0, j) && edge(nx - 1, j));
        let y_ok = ny == 1 || (0..nx).all(|i| edge(i, 0) && edge(i, ny - 1));
        x_ok && y_ok
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { values: self.values.iter().map(|v| a * v).collect(), ..self.clone() }
    }

    /// Discrete `L²` norm `(h^d Σ |f|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let cell = if self.is_1d() { self.h } else { self.h * self.h };
        (cell * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_function_validation() {
        assert!(GridFunction::new_1d(0.0, 0.1, vec![]).is_err());
        assert!(GridFunction::new_1d(0.0, 0.0, vec![1.0]).is_err());
        assert!(GridFunction::new_1d(0.0, 0.1, vec![f64::NAN]).is_err());
        assert!(GridFunction::new_2d([0.0; 2], 0.1, [2, 2], vec![0.0; 3]).is_err());
        let g = GridFunction::new_1d(0.0, 0.1, vec![0.0, 1.0, 2.0, 0.0]).unwrap();
        assert_eq!(g.support(), Some(([1, 0], [2, 0])));
        assert!(g.is_compactly_supported(0.0));
        assert!(NormSpec::spectral(-0.1, 0.0).validate().is_err());
        assert!(NormSpec::kernel(0.125).validate().is_err());
        assert!(NormSpec::kernel(0.05).validate().is_ok());
    }
}

use super::{check_lambda, GridFunction};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// `γ = 1/2 − 2λ`, the kernel exponent.
pub fn kernel_exponent(lambda: f64) -> f64 {
    0.5 - 2.0 * lambda
}

/// Antiderivative of `|u|^{−γ}`.
#[inline]
fn antiderivative(u: f64, one_minus_gamma: f64) -> f64 {
    u.signum() * u.abs().powf(one_minus_gamma) / one_minus_gamma
}

/// `∬ g₁(x)|x−y|^{−γ}g₂(y)` on a shared uniform 1D grid.
///
/// Each cell `[x_j − h/2, x_j + h/2]` carries the exact kernel integral against
/// the node value, including the singular diagonal cell. The double sum is
/// symmetrised so swapping `g₁` and `g₂` gives a bitwise identical result.
pub fn kernel_form(g1: &GridFunction, g2: &GridFunction, lambda: f64, exec: Execution) -> Result<f64> {
    check_lambda(lambda)?;
    if !g1.is_1d() || !g2.is_1d() || g1.shape() != g2.shape() || g1.h() != g2.h() || g1.coordinate(0) != g2.coordinate(0) {
        return Err(Error::Input("kernel_form needs two 1D functions on the same grid".into()));
    }
    let gamma = kernel_exponent(lambda);
    let p = 1.0 - gamma;
    let n = g1.values().len();
    // k(m) = ∫_{m−1/2}^{m+1/2} |u|^{−γ} du
    let k: Vec<f64> = (0..n)
        .map(|m| {
            let m = m as f64;
            antiderivative(m + 0.5, p) - antiderivative(m - 0.5, p)
        })
        .collect();
    let (a, b) = (g1.values(), g2.values());
    let rows = exec.map_range(n, |i| {
        let mut acc = 0.0;
        for j in 0..n {
            acc += k[i.abs_diff(j)] * 0.5 * (a[i] * b[j] + a[j] * b[i]);
        }
        acc
    });
    Ok(g1.h().powf(2.0 - gamma) * rows.iter().sum::<f64>())
}

/// `|u|^{2−γ}/(2−γ)`, antiderivative of `u|u|^{−γ}`.
#[inline]
fn first_moment(u: f64, one_minus_gamma: f64) -> f64 {
    let q = one_minus_gamma + 1.0;
    u.abs().powf(q) / q
}

/// `K[j] = ∫ |x − y|^{−γ} e_j(y) dy` for the hat functions `e_j` on `nodes`.
fn hat_weights(x: f64, nodes: &[f64], p: f64, out: &mut [f64]) {
    out.iter_mut().for_each(|k| *k = 0.0);
    for j in 0..nodes.len() - 1 {
        let (a, b) = (nodes[j] - x, nodes[j + 1] - x);
        let len = b - a;
        let m0 = antiderivative(b, p) - antiderivative(a, p);
        let m1 = first_moment(b, p) - first_moment(a, p);
        out[j] += (b * m0 - m1) / len;
        out[j + 1] += (m1 - a * m0) / len;
    }
}

/// Per-node contributions `r_i` of the nonuniform form, `Σ r_i` being the form.
///
/// The inner integral is exact for the piecewise-linear interpolants of `g₁, g₂`
/// on `nodes`; the outer one is the trapezoid rule on the same nodes. Both are
/// second order on any mesh. The weights `½(w_i K_ij + w_j K_ji)` are symmetric,
/// so swapping `g₁` and `g₂` gives bitwise identical rows.
pub fn kernel_form_rows(nodes: &[f64], g1: &[f64], g2: &[f64], lambda: f64, exec: Execution) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let n = nodes.len();
    if g1.len() != n || g2.len() != n || n < 2 {
        return Err(Error::Input("nonuniform kernel form: inconsistent lengths or fewer than 2 nodes".into()));
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("nonuniform kernel form: nodes must be strictly increasing".into()));
    }
    let p = 1.0 - kernel_exponent(lambda);
    let w = super::trapezoid_weights(nodes);
    let k: Vec<Vec<f64>> = exec.map_range(n, |i| {
        let mut row = vec![0.0; n];
        hat_weights(nodes[i], nodes, p, &mut row);
        row
    });
    Ok(exec.map_range(n, |i| {
        let mut acc = 0.0;
        for j in 0..n {
            let m = 0.5 * (w[i] * k[i][j] + w[j] * k[j][i]);
            acc += m * 0.5 * (g1[i] * g2[j] + g1[j] * g2[i]);
        }
        acc
    }))
}

/// Nonuniform version of [`kernel_form`]; see [`kernel_form_rows`].
pub fn kernel_form_nonuniform(nodes: &[f64], g1: &[f64], g2: &[f64], lambda: f64, exec: Execution) -> Result<f64> {
    Ok(kernel_form_rows(nodes, g1, g2, lambda, exec)?.iter().sum())
}

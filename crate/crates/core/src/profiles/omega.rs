use crate::params::ModelParams;

/// Membership in `Ω₀ = {x₁ ≥ 0, |x₂| ≤ √x₁ / |ln x₁|^δ} ∩ [0, 1/2]²`.
///
/// At `x₁ = 0` only `x₂ = 0` belongs (the limit of the constraint).
pub fn in_omega0(x1: f64, x2: f64, params: &ModelParams) -> bool {
    if !(0.0..=0.5).contains(&x1) || x2.abs() > 0.5 || !x2.is_finite() {
        return false;
    }
    if x1 == 0.0 {
        return x2 == 0.0;
    }
    x2.abs() <= x1.sqrt() / x1.ln().abs().powf(params.delta)
}

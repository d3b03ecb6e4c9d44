use serde::{Deserialize, Serialize};

use super::source::SourceTerm;

/// State carried along one characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicState {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub phi: f64,
    pub v: f64,
    pub phi_x: f64,
    /// `∂_{x₁}(v∘φ)`
    pub w: f64,
    pub phi_xx: f64,
    /// `∂²_{x₁}(v∘φ)`
    pub w_x: f64,
}

impl CharacteristicState {
    pub fn v_x(&self) -> f64 {
        self.w / self.phi_x
    }

    /// `A − B` with `A = W/φ_x²`, `B = φ_xx w/φ_x³`.
    pub fn v_xx(&self) -> f64 {
        self.a_part() - self.b_part()
    }

    pub fn a_part(&self) -> f64 {
        self.w_x / (self.phi_x * self.phi_x)
    }

    pub fn b_part(&self) -> f64 {
        self.phi_xx * self.w / (self.phi_x * self.phi_x * self.phi_x)
    }

    pub(crate) fn vector(&self) -> [f64; 6] {
        [self.phi, self.v, self.phi_x, self.w, self.phi_xx, self.w_x]
    }

    pub(crate) fn with_vector(&self, t: f64, y: [f64; 6]) -> Self {
        Self {
            t,
            x1: self.x1,
            x2: self.x2,
            phi: y[0],
            v: y[1],
            phi_x: y[2],
            w: y[3],
            phi_xx: y[4],
            w_x: y[5],
        }
    }
}

/// `(F, F', F'')` for `F(v) = (1+v)/(1−v)`.
#[inline]
pub(crate) fn speed(v: f64) -> (f64, f64, f64) {
    let r = 1.0 / (1.0 - v);
    ((1.0 + v) * r, 2.0 * r * r, 4.0 * r * r * r)
}

#[inline]
pub(crate) fn rhs(g: &dyn SourceTerm, t: f64, x2: f64, y: &[f64; 6]) -> [f64; 6] {
    let [phi, v, phi_x, w, phi_xx, w_x] = *y;
    let (f, f1, f2) = speed(v);
    let s = g.eval(t, phi, x2, v);
    [
        f,
        s.g,
        f1 * w,
        phi_x * s.d1 + w * s.d3,
        f2 * w * w + f1 * w_x,
        phi_x * phi_x * s.d11 + 2.0 * phi_x * w * s.d13 + w * w * s.d33 + phi_xx * s.d1 + w_x * s.d3,
    ]
}

/// One classical fourth-order Runge–Kutta step.
#[inline]
pub(crate) fn rk4_step(g: &dyn SourceTerm, t: f64, h: f64, x2: f64, y: &[f64; 6]) -> [f64; 6] {
    let add = |a: &[f64; 6], k: &[f64; 6], s: f64| {
        let mut out = *a;
        for i in 0..6 {
            out[i] += s * k[i];
        }
        out
    };
    let k1 = rhs(g, t, x2, y);
    let k2 = rhs(g, t + 0.5 * h, x2, &add(y, &k1, 0.5 * h));
    let k3 = rhs(g, t + 0.5 * h, x2, &add(y, &k2, 0.5 * h));
    let k4 = rhs(g, t + h, x2, &add(y, &k3, h));
    let mut out = *y;
    for i in 0..6 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_minus_b_split() {
        let s = CharacteristicState {
            t: 0.0,
            x1: 0.1,
            x2: 0.0,
            phi: 0.1,
            v: -0.2,
            phi_x: 0.5,
            w: -2.0,
            phi_xx: 3.0,
            w_x: 7.0,
        };
        assert_eq!(s.v_x(), -4.0);
        assert_eq!(s.a_part(), 28.0);
        assert_eq!(s.b_part(), -48.0);
        assert_eq!(s.v_xx(), 76.0);
    }

    #[test]
    fn speed_derivatives() {
        let h = 1e-6;
        for v in [-0.6, -0.1, 0.0, 0.4] {
            let (_, f1, f2) = speed(v);
            assert!(((speed(v + h).0 - speed(v - h).0) / (2.0 * h) - f1).abs() < 1e-7);
            assert!(((speed(v + h).1 - speed(v - h).1) / (2.0 * h) - f2).abs() < 1e-6);
        }
    }
}

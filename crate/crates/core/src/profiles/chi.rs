use super::{Jet, Mollifier, Profile};
use crate::numeric::{gk15, integrate_adaptive};

const RAMP_CELLS: usize = 512;
const TAIL_CELLS: usize = 4096;
const CELL_TOL: f64 = 1e-13;

/// `χ_ε(y) = −∫₀^y ψ_ε(s)|ln s|^α ds` on `[−1/2, 1/2]` (zero for `y ≤ ε/2`).
///
/// Values come from a table of per-cell integrals (uniform cells on the ramp
/// `[ε/2, ε]`, geometric cells on `[ε, 1/2]`) plus one Gauss–Kronrod panel on the
/// partial cell, so every value is a quadrature of the definition rather than an
/// interpolant. Derivatives use the closed forms.
#[derive(Debug, Clone)]
pub struct ChiProfile {
    psi: Mollifier,
    alpha: f64,
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
}

impl ChiProfile {
    pub(crate) fn new(eps: f64, alpha: f64) -> Self {
        let psi = Mollifier::new(eps);
        let half = 0.5 * eps;
        let mut nodes = Vec::with_capacity(RAMP_CELLS + TAIL_CELLS + 1);
        for i in 0..RAMP_CELLS {
            nodes.push(half + half * i as f64 / RAMP_CELLS as f64);
        }
        let (a, b) = (eps.ln(), 0.5f64.ln());
        for i in 0..TAIL_CELLS {
            nodes.push((a + (b - a) * i as f64 / TAIL_CELLS as f64).exp());
        }
        nodes.push(0.5);
        nodes[RAMP_CELLS] = eps;

        let mut chi = Self { psi, alpha, nodes, cumulative: Vec::new() };
        let f = |s: f64| chi.integrand(s);
        let mut cumulative = Vec::with_capacity(chi.nodes.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in chi.nodes.windows(2) {
            acc += integrate_adaptive(&f, w[0], w[1], CELL_TOL);
            cumulative.push(acc);
        }
        chi.cumulative = cumulative;
        chi
    }

    pub fn mollifier(&self) -> &Mollifier {
        &self.psi
    }

    pub fn eps(&self) -> f64 {
        self.psi.eps()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `|ln ε|^α`.
    pub fn alpha_log_scale(&self) -> f64 {
        self.eps().ln().abs().powf(self.alpha)
    }

    /// `ψ_ε(s)|ln s|^α`, i.e. `−χ'(s)`.
    fn integrand(&self, s: f64) -> f64 {
        if s <= 0.5 * self.eps() {
            return 0.0;
        }
        self.psi.jet_unchecked(s).value * (-s.ln()).powf(self.alpha)
    }

    fn value_at(&self, y: f64) -> f64 {
        if y <= self.nodes[0] {
            return 0.0;
        }
        let i = match self.nodes.binary_search_by(|n| n.total_cmp(&y)) {
            Ok(i) => return -self.cumulative[i],
            Err(i) => i - 1,
        };
        let i = i.min(self.nodes.len() - 2);
        let (partial, _) = gk15(&|s| self.integrand(s), self.nodes[i], y);
        -(self.cumulative[i] + partial)
    }
}

impl Profile for ChiProfile {
    fn domain(&self) -> (f64, f64) {
        (-0.5, 0.5)
    }

    fn support(&self) -> (f64, f64) {
        (0.5 * self.eps(), 0.5)
    }

    fn jet_unchecked(&self, y: f64) -> Jet {
        if y <= 0.5 * self.eps() {
            return Jet::default();
        }
        let log = -y.ln();
        let la = log.powf(self.alpha);
        let p = self.psi.jet_unchecked(y);
        Jet {
            value: self.value_at(y),
            d1: -p.value * la,
            d2: -p.d1 * la + p.value * self.alpha * log.powf(self.alpha - 1.0) / y,
        }
    }
}

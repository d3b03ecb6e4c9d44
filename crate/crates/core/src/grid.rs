use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-dimensional node set, uniform or geometrically graded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    nodes: Vec<f64>,
}

impl Grid1D {
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        check_bounds(lo, hi, n)?;
        let h = (hi - lo) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
        nodes[n - 1] = hi;
        Ok(Self { nodes })
    }

    /// Nodes equally spaced in `ln x`; requires `0 < lo`.
    pub fn geometric(lo: f64, hi: f64, n: usize) -> Result<Self> {
        check_bounds(lo, hi, n)?;
        if lo <= 0.0 {
            return Err(Error::Input(format!("geometric grid needs lo > 0, got {lo}")));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let h = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| (a + h * i as f64).exp()).collect();
        nodes[0] = lo;
        nodes[n - 1] = hi;
        Ok(Self { nodes })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Input("grid must not be empty".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("grid nodes must be finite and strictly increasing".into()));
        }
        Ok(Self { nodes })
    }

    pub fn single(x: f64) -> Self {
        Self { nodes: vec![x] }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Inserts the midpoint of every cell, doubling the resolution.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len());
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.extend(self.nodes.last());
        Self { nodes }
    }
}

fn check_bounds(lo: f64, hi: f64, n: usize) -> Result<()> {
    if n < 2 || !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::Input(format!("bad grid [{lo}, {hi}] with {n} nodes")));
    }
    Ok(())
}

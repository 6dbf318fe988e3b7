//! Periodic trapezoidal quadrature on `[0, 2 pi)`.
//!
//! For analytic periodic integrands the error decays geometrically with the
//! number of nodes.

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct PeriodicRule {
    nodes: Vec<f64>,
    weight: f64,
}

impl PeriodicRule {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature needs at least one node");
        let h = 2.0 * PI / n as f64;
        Self {
            nodes: (0..n).map(|j| j as f64 * h).collect(),
            weight: h,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.weight * self.nodes.iter().map(|&x| f(x)).sum::<f64>()
    }
}

use crate::error::{Error, Result};
use crate::universe::Universe;

/// A database as a vector of non-negative counts over the universe.
#[derive(Debug, Clone, PartialEq)]
pub struct DataHistogram {
    universe: Universe,
    weights: Vec<f64>,
}

impl DataHistogram {
    pub fn new(universe: Universe, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != universe.size() {
            return Err(Error::DimensionMismatch { expected: universe.size(), got: weights.len() });
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Validation(format!("weight {i} = {w} is not a finite non-negative count")));
        }
        Ok(Self { universe, weights })
    }

    pub fn zeros(universe: Universe) -> Self {
        Self { universe, weights: vec![0.0; universe.size()] }
    }

    /// A simple graph on `vertex_count` vertices. Edge order is irrelevant;
    /// duplicate edges and self-loops are rejected.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let universe = Universe::graph(vertex_count)?;
        let mut weights = vec![0.0; universe.size()];
        for &(i, j) in edges {
            let e = universe.pair_index(i, j)?;
            if weights[e] != 0.0 {
                return Err(Error::Validation(format!("duplicate edge {{{i}, {j}}}")));
            }
            weights[e] = 1.0;
        }
        Ok(Self { universe, weights })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// L1 norm: the database size.
    pub fn n(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Squared L2 norm.
    pub fn n2(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    /// Edges `(i, j)`, `i < j`, with nonzero weight.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.universe
            .pairs()
            .filter(|&(e, _, _)| self.weights[e] != 0.0)
            .map(|(_, i, j)| (i, j))
            .collect()
    }
}

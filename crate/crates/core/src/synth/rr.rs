use crate::error::{Error, Result};
use crate::histogram::DataHistogram;
use crate::linalg::DenseMatrix;
use crate::noise::{NoiseSource, PrivacyParams};
use crate::universe::Universe;

/// Adjacency indicators plus independent Laplace noise, one real per
/// unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyGraph {
    pub vertex_count: usize,
    pub z: Vec<f64>,
}

/// A fractional graph with every pair weight in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSyntheticGraph {
    vertex_count: usize,
    x: Vec<f64>,
}

fn check_len(vertex_count: usize, len: usize) -> Result<Universe> {
    let u = Universe::graph(vertex_count)?;
    if u.size() != len {
        return Err(Error::DimensionMismatch { expected: u.size(), got: len });
    }
    Ok(u)
}

impl NoisyGraph {
    pub fn new(vertex_count: usize, z: Vec<f64>) -> Result<Self> {
        check_len(vertex_count, z.len())?;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("noisy pair weights must be finite".into()));
        }
        Ok(Self { vertex_count, z })
    }

    pub fn universe(&self) -> Universe {
        Universe::graph(self.vertex_count).expect("validated at construction")
    }

    /// Entrywise clip to `[0,1]`.
    pub fn clipped(&self) -> WeightedSyntheticGraph {
        WeightedSyntheticGraph { vertex_count: self.vertex_count, x: self.z.iter().map(|v| v.clamp(0.0, 1.0)).collect() }
    }

    pub fn matrix(&self) -> DenseMatrix {
        DenseMatrix::from_pair_vector(&self.universe(), &self.z).expect("validated at construction")
    }
}

impl WeightedSyntheticGraph {
    pub fn new(vertex_count: usize, x: Vec<f64>) -> Result<Self> {
        check_len(vertex_count, x.len())?;
        if let Some(bad) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Validation(format!("synthetic pair weight {bad} outside [0,1]")));
        }
        Ok(Self { vertex_count, x })
    }

    pub fn from_graph(g: &DataHistogram) -> Result<Self> {
        let v = g.universe().require_graph()?;
        Self::new(v, g.weights().to_vec())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn weights(&self) -> &[f64] {
        &self.x
    }

    pub fn universe(&self) -> Universe {
        Universe::graph(self.vertex_count).expect("validated at construction")
    }

    pub fn matrix(&self) -> DenseMatrix {
        DenseMatrix::from_pair_vector(&self.universe(), &self.x).expect("validated at construction")
    }
}

/// Add `Lap(1/epsilon)` to every pair indicator. `(epsilon, 0)`-private:
/// each edge changes one coordinate by 1.
pub fn randomized_response(g: &DataHistogram, epsilon: f64, noise: &mut NoiseSource) -> Result<NoisyGraph> {
    let v = g.universe().require_graph()?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Validation(format!("epsilon must be positive, got {epsilon}")));
    }
    if g.weights().iter().any(|&w| w != 0.0 && w != 1.0) {
        return Err(Error::Validation("randomized response expects a simple graph (0/1 pair weights)".into()));
    }
    let z = g
        .weights()
        .iter()
        .map(|&a| Ok(a + noise.laplace(1.0 / epsilon)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(NoisyGraph { vertex_count: v, z })
}

/// The pipeline's privacy: the noisy graph is `(epsilon, 0)`-private and
/// projection and rounding are post-processing.
pub fn rr_privacy(epsilon: f64) -> Result<PrivacyParams> {
    PrivacyParams::pure(epsilon)
}

/// Keep each pair independently with probability equal to its weight.
pub fn round_to_unweighted(x: &WeightedSyntheticGraph, noise: &mut NoiseSource) -> DataHistogram {
    let weights = x.x.iter().map(|&p| if noise.bernoulli(p) { 1.0 } else { 0.0 }).collect();
    DataHistogram::new(x.universe(), weights).expect("0/1 weights over the graph universe")
}

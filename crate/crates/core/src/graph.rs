//! Random graphs and cut-query streams for experiments.

use rand::Rng;

use crate::error::{Error, Result};
use crate::histogram::DataHistogram;
use crate::linalg::DenseMatrix;
use crate::query::CutQuery;
use crate::synth::cut_norm_bruteforce;
use crate::universe::Universe;

/// Erdős–Rényi `G(V, p)`: each pair present independently with probability `p`.
pub fn gnp<R: Rng + ?Sized>(vertex_count: usize, p: f64, rng: &mut R) -> Result<DataHistogram> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation(format!("edge probability must lie in [0, 1], got {p}")));
    }
    let u = Universe::graph(vertex_count)?;
    let weights = (0..u.size()).map(|_| if rng.random::<f64>() < p { 1.0 } else { 0.0 }).collect();
    DataHistogram::new(u, weights)
}

/// A cut with every vertex in `S` (and, independently, in `T`) with probability 1/2.
pub fn random_cut<R: Rng + ?Sized>(vertex_count: usize, rng: &mut R) -> CutQuery {
    let mut pick = || (0..vertex_count).filter(|_| rng.random::<bool>()).collect::<Vec<_>>();
    let s = pick();
    let t = pick();
    CutQuery { s, t }
}

pub fn random_cuts<R: Rng + ?Sized>(vertex_count: usize, k: usize, rng: &mut R) -> Vec<CutQuery> {
    (0..k).map(|_| random_cut(vertex_count, rng)).collect()
}

/// The cut maximizing `|Q(D) - Q(H)|` for pair vectors `d` and `h`, found by
/// exhaustive search, with the (public-scale) gap it achieves.
pub fn max_gap_cut(universe: &Universe, d: &[f64], h: &[f64]) -> Result<(CutQuery, f64)> {
    if d.len() != universe.size() || h.len() != universe.size() {
        return Err(Error::DimensionMismatch { expected: universe.size(), got: d.len().min(h.len()) });
    }
    let diff: Vec<f64> = d.iter().zip(h).map(|(a, b)| a - b).collect();
    let a = DenseMatrix::from_pair_vector(universe, &diff)?;
    let c = cut_norm_bruteforce(&a)?;
    Ok((CutQuery { s: c.s, t: c.t }, c.value))
}

//! Error measurement of released graphs against the truth, and the bound
//! formulas reported next to it.
//!
//! Errors are on the canonical query scale, the same scale as alpha, the
//! online threshold and the randomized-response bound: half the ordered-pair
//! sum `A(S,T)`.

use idc_release::graph::random_cuts;
use idc_release::linalg::DenseMatrix;
use idc_release::noise::rr_error_bound;
use idc_release::synth::cut_norm_bruteforce;
use idc_release::{DataHistogram, Result, Universe};
use rand::seq::index::sample;
use rand::Rng;

/// Largest |V| at which the exact max error over all cuts is computed.
pub const BRUTE_FORCE_MAX_VERTICES: usize = 14;

fn difference(u: &Universe, truth: &[f64], released: &[f64]) -> Result<DenseMatrix> {
    let diff: Vec<f64> = truth.iter().zip(released).map(|(a, b)| a - b).collect();
    DenseMatrix::from_pair_vector(u, &diff)
}

/// Max canonical cut error over `samples` uniformly random cuts.
pub fn sampled_max_error<R: Rng + ?Sized>(
    u: &Universe,
    truth: &[f64],
    released: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let v = u.require_graph()?;
    let a = difference(u, truth, released)?;
    Ok(random_cuts(v, samples, rng).iter().map(|c| 0.5 * a.block_sum(&c.s, &c.t).abs()).fold(0.0, f64::max))
}

/// Exact max canonical cut error (half the cut norm of the difference), when
/// small enough to enumerate.
pub fn bruteforce_max_error(u: &Universe, truth: &[f64], released: &[f64]) -> Result<Option<f64>> {
    if u.require_graph()? > BRUTE_FORCE_MAX_VERTICES {
        return Ok(None);
    }
    Ok(Some(0.5 * cut_norm_bruteforce(&difference(u, truth, released)?)?.value))
}

pub fn mw_shape(n: f64, k: usize, universe_size: usize, eps: f64) -> f64 {
    n.sqrt() * (k as f64).ln().sqrt() * (universe_size as f64).ln().powf(0.25) / eps.sqrt()
}

pub fn fk_shape(n2: f64, k: usize, universe_size: usize, eps: f64) -> f64 {
    n2.powf(0.25) * (k as f64).ln().sqrt() * (universe_size as f64).powf(0.25) / eps.sqrt()
}

pub fn rr_bound(universe_size: usize, samples: usize, beta: f64, eps: f64) -> f64 {
    rr_error_bound(universe_size, samples as f64, beta, eps)
}

/// A uniformly random graph with exactly `edges` edges.
pub fn gnm<R: Rng + ?Sized>(v: usize, edges: usize, rng: &mut R) -> Result<DataHistogram> {
    let u = Universe::graph(v)?;
    if edges > u.size() {
        return Err(idc_release::Error::Config(format!("{edges} edges do not fit in {} pairs", u.size())));
    }
    let mut w = vec![0.0; u.size()];
    for i in sample(rng, u.size(), edges) {
        w[i] = 1.0;
    }
    DataHistogram::new(u, w)
}

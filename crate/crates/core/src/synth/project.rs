use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::synth::{NoisyGraph, SeparationOracle, WeightedSyntheticGraph};
use crate::universe::Universe;

#[derive(Debug, Clone)]
pub struct Projection {
    /// Best iterate found.
    pub graph: WeightedSyntheticGraph,
    /// Oracle violation `|(x - z)(S,T)|` (normalized if the oracle is) at the
    /// best iterate.
    pub residual: f64,
    /// Violation at the clipped start `clip(z)`.
    pub initial_residual: f64,
    /// Oracle violation of every evaluated iterate, in order.
    pub history: Vec<f64>,
    pub oracle_calls: usize,
}

/// Look for `x` in the `[0,1]` box whose cuts all match the noisy graph `z`.
///
/// Starts from `clip(z)`. Each step asks the oracle for a violated constraint
/// `(S,T)` of `x - z`, then moves `x` along the pair indicator `g` of `S x T`
/// (ordered-pair counts per unordered pair) by `violation / ||g||^2`, which
/// zeroes that constraint before clipping back into the box. The best iterate
/// by oracle violation is returned; the loop stops early once the violation
/// is numerically zero.
pub fn project_to_synthetic(z: &NoisyGraph, oracle: &dyn SeparationOracle, budget: usize) -> Result<Projection> {
    if budget == 0 {
        return Err(Error::Config("projection budget must be at least 1".into()));
    }
    let u = z.universe();
    let v = z.vertex_count;
    let scale = z.z.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut x: Vec<f64> = z.z.iter().map(|w| w.clamp(0.0, 1.0)).collect();
    let mut best = (f64::INFINITY, x.clone());
    let mut history = Vec::with_capacity(budget);
    for _ in 0..budget {
        let diff: Vec<f64> = x.iter().zip(&z.z).map(|(a, b)| a - b).collect();
        let a = DenseMatrix::from_pair_vector(&u, &diff)?;
        let sep = oracle.separate(&a)?;
        let violation = sep.violation();
        history.push(violation);
        if violation < best.0 {
            best = (violation, x.clone());
        }
        if violation <= 1e-12 * scale {
            break;
        }
        let g = pair_indicator(&u, v, &sep.s, &sep.t)?;
        let g2: f64 = g.iter().map(|c| c * c).sum();
        if g2 == 0.0 {
            break;
        }
        let raw = a.block_sum(&sep.s, &sep.t);
        let eta = raw / g2;
        for (xi, gi) in x.iter_mut().zip(&g) {
            if *gi != 0.0 {
                *xi = (*xi - eta * gi).clamp(0.0, 1.0);
            }
        }
    }
    Ok(Projection {
        graph: WeightedSyntheticGraph::new(v, best.1)?,
        residual: best.0,
        initial_residual: history[0],
        oracle_calls: history.len(),
        history,
    })
}

/// Per unordered pair `{i,j}`, the number of ordered pairs of `S x T` it
/// covers: `1[i in S, j in T] + 1[j in S, i in T]`.
fn pair_indicator(u: &Universe, v: usize, s: &[usize], t: &[usize]) -> Result<Vec<f64>> {
    let mut in_s = vec![false; v];
    let mut in_t = vec![false; v];
    s.iter().for_each(|&i| in_s[i] = true);
    t.iter().for_each(|&j| in_t[j] = true);
    Ok(u
        .pairs()
        .map(|(_, i, j)| (in_s[i] && in_t[j]) as u8 as f64 + (in_s[j] && in_t[i]) as u8 as f64)
        .collect())
}

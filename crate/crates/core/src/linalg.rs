//! Small dense matrices and the power method for the top singular pair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::universe::Universe;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Validation("ragged matrix rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.concat() })
    }

    /// The symmetric, zero-diagonal `|V| x |V|` matrix of a pair-indexed vector.
    pub fn from_pair_vector(universe: &Universe, values: &[f64]) -> Result<Self> {
        let v = universe.require_graph()?;
        if values.len() != universe.size() {
            return Err(Error::DimensionMismatch { expected: universe.size(), got: values.len() });
        }
        let mut m = Self::zeros(v, v);
        for (e, i, j) in universe.pairs() {
            m.set(i, j, values[e]);
            m.set(j, i, values[e]);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    /// `A(S,T) = sum_{i in S, j in T} A[i][j]`.
    pub fn block_sum(&self, s: &[usize], t: &[usize]) -> f64 {
        s.iter().map(|&i| t.iter().map(|&j| self.get(i, j)).sum::<f64>()).sum()
    }

    /// `u^T A v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        (0..self.rows)
            .filter(|&i| u[i] != 0.0)
            .map(|i| u[i] * self.row(i).iter().zip(v).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn mul_vec_transposed(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                for (o, a) in out.iter_mut().zip(self.row(i)) {
                    *o += yi * a;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    /// Relative change of the singular value estimate at which to stop.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed of the deterministic random start vector.
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 1000, seed: 0x5eed }
    }
}

/// Top singular triple `(sigma, left, right)` with `A right = sigma left`.
#[derive(Debug, Clone)]
pub struct SingularPair {
    pub value: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|a| *a /= norm);
    }
    norm
}

/// Power iteration on `A^T A`. The returned value is `||A right||`, a lower
/// bound on the true top singular value that converges to it.
pub fn top_singular_pair(a: &DenseMatrix, opts: PowerOptions) -> SingularPair {
    let zero = SingularPair {
        value: 0.0,
        left: vec![0.0; a.rows()],
        right: vec![0.0; a.cols()],
        iterations: 0,
        converged: true,
    };
    if a.rows() == 0 || a.cols() == 0 || a.is_zero() {
        return zero;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut right: Vec<f64> = (0..a.cols()).map(|_| 1.0 + rng.random::<f64>()).collect();
    normalize(&mut right);

    let mut left = a.mul_vec(&right);
    let mut sigma = normalize(&mut left);
    if sigma == 0.0 {
        // start vector happened to lie in the null space
        right = (0..a.cols()).map(|_| rng.random::<f64>() - 0.5).collect();
        normalize(&mut right);
        left = a.mul_vec(&right);
        sigma = normalize(&mut left);
    }
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut next_right = a.mul_vec_transposed(&left);
        if normalize(&mut next_right) == 0.0 {
            break;
        }
        let mut next_left = a.mul_vec(&next_right);
        let next_sigma = normalize(&mut next_left);
        let change = (next_sigma - sigma).abs();
        right = next_right;
        left = next_left;
        sigma = next_sigma;
        if change <= opts.tol * sigma {
            converged = true;
            break;
        }
    }
    SingularPair { value: sigma, left, right, iterations, converged }
}

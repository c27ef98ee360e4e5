use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{top_singular_pair, DenseMatrix, PowerOptions};

/// Largest row count accepted by the exhaustive cut-norm routines.
pub const BRUTE_FORCE_MAX_ROWS: usize = 20;

/// An exact cut norm with a maximizing pair; `value` is `|A(S,T)|`, or
/// `|A(S,T)| / sqrt(|S||T|)` for the normalized norm.
#[derive(Debug, Clone, PartialEq)]
pub struct CutNorm {
    pub value: f64,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

/// A pair of vertex sets witnessing a large (normalized) cut of some matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationResult {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    /// Signed `A(S,T)`, divided by `sqrt(|S||T|)` when normalized.
    pub value: f64,
    pub normalized: bool,
    /// False when the power iteration hit its cap; the result is still the
    /// best pair found from the last iterate.
    pub converged: bool,
}

impl SeparationResult {
    pub fn violation(&self) -> f64 {
        self.value.abs()
    }

    fn empty(normalized: bool) -> Self {
        Self { s: Vec::new(), t: Vec::new(), value: 0.0, normalized, converged: true }
    }
}

fn check_cap(a: &DenseMatrix) -> Result<()> {
    if a.rows() > BRUTE_FORCE_MAX_ROWS {
        return Err(Error::SizeCap(format!(
            "exhaustive cut norm limited to {BRUTE_FORCE_MAX_ROWS} rows, got {}",
            a.rows()
        )));
    }
    Ok(())
}

fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Walk every row subset in Gray-code order, keeping the column sums of the
/// current subset up to date.
fn for_each_row_subset(a: &DenseMatrix, mut f: impl FnMut(u64, &[f64])) {
    let (n, m) = (a.rows(), a.cols());
    let mut sums = vec![0.0; m];
    let mut mask = 0u64;
    f(mask, &sums);
    for k in 1u64..(1u64 << n) {
        let bit = k.trailing_zeros() as usize;
        mask ^= 1 << bit;
        let sign = if mask >> bit & 1 == 1 { 1.0 } else { -1.0 };
        for (s, x) in sums.iter_mut().zip(a.row(bit)) {
            *s += sign * x;
        }
        f(mask, &sums);
    }
}

/// `max_{S,T} |A(S,T)|` by enumerating `S`; for a fixed `S` the best `T`
/// takes every column whose sum over `S` has the winning sign.
/// `O(2^rows * cols)`.
pub fn cut_norm_bruteforce(a: &DenseMatrix) -> Result<CutNorm> {
    check_cap(a)?;
    let mut best = (0.0, 0u64, false);
    for_each_row_subset(a, |mask, sums| {
        let pos: f64 = sums.iter().filter(|&&c| c > 0.0).sum();
        let neg: f64 = -sums.iter().filter(|&&c| c < 0.0).sum::<f64>();
        if pos > best.0 {
            best = (pos, mask, true);
        }
        if neg > best.0 {
            best = (neg, mask, false);
        }
    });
    let s = members(best.1, a.rows());
    let sums = column_sums(a, &s);
    let t = (0..a.cols()).filter(|&j| if best.2 { sums[j] > 0.0 } else { sums[j] < 0.0 }).collect();
    Ok(CutNorm { value: best.0, s, t })
}

fn column_sums(a: &DenseMatrix, s: &[usize]) -> Vec<f64> {
    let mut sums = vec![0.0; a.cols()];
    for &i in s {
        for (c, x) in sums.iter_mut().zip(a.row(i)) {
            *c += x;
        }
    }
    sums
}

/// `max_{S,T nonempty} |A(S,T)| / sqrt(|S||T|)`. For a fixed `S` and size
/// `|T| = k` the best `T` holds the `k` largest (or smallest) column sums.
pub fn normalized_cut_norm_bruteforce(a: &DenseMatrix) -> Result<CutNorm> {
    check_cap(a)?;
    let m = a.cols();
    let mut best = (0.0, 0u64, 0usize, true);
    let mut sorted = vec![0.0; m];
    for_each_row_subset(a, |mask, sums| {
        let size_s = mask.count_ones() as f64;
        if mask == 0 {
            return;
        }
        sorted.copy_from_slice(sums);
        sorted.sort_by(|x, y| y.total_cmp(x));
        let (mut top, mut bottom) = (0.0, 0.0);
        for k in 1..=m {
            top += sorted[k - 1];
            bottom += sorted[m - k];
            let norm = (size_s * k as f64).sqrt();
            if top / norm > best.0 {
                best = (top / norm, mask, k, true);
            }
            if -bottom / norm > best.0 {
                best = (-bottom / norm, mask, k, false);
            }
        }
    });
    if best.1 == 0 {
        return Ok(CutNorm { value: 0.0, s: Vec::new(), t: Vec::new() });
    }
    let s = members(best.1, a.rows());
    let sums = column_sums(a, &s);
    let mut order: Vec<usize> = (0..m).collect();
    if best.3 {
        order.sort_by(|&x, &y| sums[y].total_cmp(&sums[x]));
    } else {
        order.sort_by(|&x, &y| sums[x].total_cmp(&sums[y]));
    }
    let mut t: Vec<usize> = order[..best.2].to_vec();
    t.sort_unstable();
    Ok(CutNorm { value: best.0, s, t })
}

/// Round the top singular pair of `a` to vertex sets.
///
/// Rows are ordered by `+left` and by `-left`, columns by `+right` and by
/// `-right`; for each of the four orderings every (row prefix, column prefix)
/// pair is scored with 2-D prefix sums and the best `|A(S,T)|` (or its
/// normalized version) is returned. A zero matrix gives empty sets and value 0.
pub fn spectral_separation(a: &DenseMatrix, normalized: bool, opts: PowerOptions) -> SeparationResult {
    if a.is_zero() {
        return SeparationResult::empty(normalized);
    }
    let sp = top_singular_pair(a, opts);
    let order = |x: &[f64], sign: f64| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..x.len()).collect();
        idx.sort_by(|&i, &j| (sign * x[j]).total_cmp(&(sign * x[i])));
        idx
    };
    let (n, m) = (a.rows(), a.cols());
    let mut best = SeparationResult { converged: sp.converged, ..SeparationResult::empty(normalized) };
    let mut prefix = vec![0.0; (n + 1) * (m + 1)];
    for su in [1.0, -1.0] {
        let rows = order(&sp.left, su);
        for sv in [1.0, -1.0] {
            let cols = order(&sp.right, sv);
            // prefix[(a+1)(m+1) + b+1] = sum of A over the first a+1 rows and b+1 columns
            for (pa, &i) in rows.iter().enumerate() {
                let mut run = 0.0;
                for (pb, &j) in cols.iter().enumerate() {
                    run += a.get(i, j);
                    prefix[(pa + 1) * (m + 1) + pb + 1] = prefix[pa * (m + 1) + pb + 1] + run;
                }
            }
            for ka in 1..=n {
                for kb in 1..=m {
                    let sum = prefix[ka * (m + 1) + kb];
                    let value = if normalized { sum / ((ka * kb) as f64).sqrt() } else { sum };
                    if value.abs() > best.value.abs() {
                        let mut s = rows[..ka].to_vec();
                        let mut t = cols[..kb].to_vec();
                        s.sort_unstable();
                        t.sort_unstable();
                        best = SeparationResult { s, t, value, normalized, converged: sp.converged };
                    }
                }
            }
        }
    }
    // report the exact recomputation, not the prefix-sum accumulation
    let exact = a.block_sum(&best.s, &best.t);
    best.value = if normalized && !best.s.is_empty() {
        exact / ((best.s.len() * best.t.len()) as f64).sqrt()
    } else {
        exact
    };
    best
}

/// Finds a most-violated cut constraint of a residual matrix.
pub trait SeparationOracle {
    fn name(&self) -> &'static str;
    fn normalized(&self) -> bool;
    fn separate(&self, a: &DenseMatrix) -> Result<SeparationResult>;
}

/// Spectral oracle: power iteration plus sweep rounding.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpectralOracle {
    pub normalized: bool,
    pub power: PowerOptions,
}

impl SpectralOracle {
    pub fn new(normalized: bool) -> Self {
        Self { normalized, power: PowerOptions::default() }
    }
}

impl SeparationOracle for SpectralOracle {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn normalized(&self) -> bool {
        self.normalized
    }

    fn separate(&self, a: &DenseMatrix) -> Result<SeparationResult> {
        Ok(spectral_separation(a, self.normalized, self.power))
    }
}

/// Exact oracle by exhaustive enumeration (at most [`BRUTE_FORCE_MAX_ROWS`] rows).
#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForceOracle {
    pub normalized: bool,
}

impl SeparationOracle for BruteForceOracle {
    fn name(&self) -> &'static str {
        "brute-force"
    }

    fn normalized(&self) -> bool {
        self.normalized
    }

    fn separate(&self, a: &DenseMatrix) -> Result<SeparationResult> {
        let c = if self.normalized { normalized_cut_norm_bruteforce(a)? } else { cut_norm_bruteforce(a)? };
        let sum = a.block_sum(&c.s, &c.t);
        let value = if self.normalized && !c.s.is_empty() {
            sum / ((c.s.len() * c.t.len()) as f64).sqrt()
        } else {
            sum
        };
        Ok(SeparationResult { s: c.s, t: c.t, value, normalized: self.normalized, converged: true })
    }
}

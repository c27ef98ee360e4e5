use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::DataHistogram;
use crate::linalg::{top_singular_pair, DenseMatrix, PowerOptions};
use crate::noise::NoiseSource;
use crate::query::{compile_rank1_query, LinearQuery, QueryTag};
use crate::universe::Universe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrivacyFlag {
    Private,
    #[serde(rename = "NON-PRIVATE-EXPERIMENTAL")]
    NonPrivateExperimental,
}

/// Finds a query on which a hypothesis and the data disagree nearly as much
/// as on the worst query of its class.
pub trait Distinguisher {
    fn name(&self) -> &'static str;

    fn privacy(&self) -> PrivacyFlag;

    /// Probability that the additive guarantee `F` fails.
    fn gamma(&self) -> f64;

    /// Additive loss `F(eps)` against the best query in the class, when one
    /// is known.
    fn loss(&self, eps: f64) -> Option<f64>;

    /// Human-readable statement of the guarantee.
    fn guarantee(&self) -> String;

    /// Whether `query` belongs to the declared class.
    fn admits(&self, query: &LinearQuery) -> bool;

    /// `hypothesis` is the hypothesis as a vector over the universe, on the
    /// same scale as the data.
    fn distinguish(
        &self,
        eps0: f64,
        db: &DataHistogram,
        hypothesis: &[f64],
        noise: &mut NoiseSource,
    ) -> Result<LinearQuery>;
}

/// Exponential mechanism over an explicit finite class, scoring a query by
/// its canonical discrepancy `|Q(D) - Q(H)|` (sensitivity 1).
#[derive(Debug, Clone)]
pub struct ExpMechDistinguisher {
    class: Vec<LinearQuery>,
    gamma: f64,
}

impl ExpMechDistinguisher {
    pub fn new(class: Vec<LinearQuery>, gamma: f64) -> Result<Self> {
        if class.is_empty() {
            return Err(Error::Validation("query class is empty".into()));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Validation(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        let dim = class[0].dim();
        if class.iter().any(|q| q.dim() != dim) {
            return Err(Error::Validation("queries in a class must share one universe".into()));
        }
        Ok(Self { class, gamma })
    }

    pub fn class(&self) -> &[LinearQuery] {
        &self.class
    }

    /// Canonical discrepancy of every query in the class.
    pub fn scores(&self, db: &DataHistogram, hypothesis: &[f64]) -> Result<Vec<f64>> {
        self.class
            .iter()
            .map(|q| Ok((q.canonical(db.weights())? - q.canonical(hypothesis)?).abs()))
            .collect()
    }

    /// Index drawn with probability proportional to `exp(eps0 * score / 2)`;
    /// argmax (first on ties) under the zero-noise hook.
    pub fn sample_index(&self, eps0: f64, scores: &[f64], noise: &mut NoiseSource) -> Result<usize> {
        if !(eps0 > 0.0) {
            return Err(Error::Validation(format!("eps0 must be positive, got {eps0}")));
        }
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if noise.is_zero_noise() {
            return Ok(scores.iter().position(|&s| s == best).unwrap_or(0));
        }
        // shift by the max so the largest weight is 1
        let weights: Vec<f64> = scores.iter().map(|s| (eps0 * (s - best) / 2.0).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mut target = noise.uniform() * total;
        for (i, w) in weights.iter().enumerate() {
            if target < *w {
                return Ok(i);
            }
            target -= w;
        }
        Ok(weights.len() - 1)
    }
}

impl Distinguisher for ExpMechDistinguisher {
    fn name(&self) -> &'static str {
        "exponential-mechanism"
    }

    fn privacy(&self) -> PrivacyFlag {
        PrivacyFlag::Private
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn loss(&self, eps: f64) -> Option<f64> {
        Some(2.0 * (self.class.len() as f64 / self.gamma).ln() / eps)
    }

    fn guarantee(&self) -> String {
        format!("F(eps) = 2 ln(|Q|/gamma)/eps with |Q| = {}, gamma = {}", self.class.len(), self.gamma)
    }

    fn admits(&self, query: &LinearQuery) -> bool {
        self.class.iter().any(|q| q == query)
    }

    fn distinguish(&self, eps0: f64, db: &DataHistogram, hypothesis: &[f64], noise: &mut NoiseSource) -> Result<LinearQuery> {
        let scores = self.scores(db, hypothesis)?;
        let i = self.sample_index(eps0, &scores, noise)?;
        Ok(self.class[i].clone())
    }
}

/// Rank-1 distinguisher from the top singular pair of `D - H`.
///
/// NOT differentially private: it reads the data exactly. It exists to
/// measure what a private rank-1 approximation could buy, and the IC privacy
/// report refuses to certify runs that use it.
#[derive(Debug, Clone)]
pub struct SvdRank1Distinguisher {
    universe: Universe,
    power: PowerOptions,
    refine_rounds: usize,
}

impl SvdRank1Distinguisher {
    pub fn new(universe: Universe) -> Result<Self> {
        universe.require_graph()?;
        Ok(Self { universe, power: PowerOptions::default(), refine_rounds: 100 })
    }

    /// Disable (0) or cap the alternating 0/1 refinement of the rounded pair.
    pub fn with_refinement(self, rounds: usize) -> Self {
        Self { refine_rounds: rounds, ..self }
    }

    /// Best `(u, v)` in `[0,1]^|V|` found for `|u^T A v|`, and that value.
    pub fn rank1_pair(&self, a: &DenseMatrix) -> (Vec<f64>, Vec<f64>, f64) {
        let n = a.rows();
        if a.is_zero() {
            return (vec![0.0; n], vec![0.0; n], 0.0);
        }
        let sp = top_singular_pair(a, self.power);
        let parts = |x: &[f64], sign: f64| -> Vec<f64> {
            let p: Vec<f64> = x.iter().map(|&t| (sign * t).max(0.0)).collect();
            let m = p.iter().copied().fold(0.0, f64::max);
            if m > 0.0 {
                p.iter().map(|t| t / m).collect()
            } else {
                p
            }
        };
        let mut best = (vec![0.0; n], vec![0.0; n], 0.0);
        let mut consider = |u: Vec<f64>, v: Vec<f64>| {
            let (u, v, val) = self.refine(a, u, v);
            if val > best.2 {
                best = (u, v, val);
            }
        };
        for (su, sv) in [(1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
            consider(parts(&sp.left, su), parts(&sp.right, sv));
        }
        if self.refine_rounds > 0 {
            // threshold sweeps of the left vector as extra starting rows
            for sign in [1.0, -1.0] {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&i, &j| (sign * sp.left[j]).total_cmp(&(sign * sp.left[i])));
                let mut u = vec![0.0; n];
                for &i in &order {
                    u[i] = 1.0;
                    for vsign in [1.0, -1.0] {
                        let cols = a.mul_vec_transposed(&u);
                        let v = cols.iter().map(|&c| if vsign * c > 0.0 { 1.0 } else { 0.0 }).collect();
                        consider(u.clone(), v);
                    }
                }
            }
        }
        best
    }

    /// Alternate exact best responses: for fixed `u` the best `v` in the box
    /// is the 0/1 indicator of the columns whose sum has the right sign.
    fn refine(&self, a: &DenseMatrix, mut u: Vec<f64>, mut v: Vec<f64>) -> (Vec<f64>, Vec<f64>, f64) {
        let mut val = a.bilinear(&u, &v);
        let sign = if val < 0.0 { -1.0 } else { 1.0 };
        for _ in 0..self.refine_rounds {
            let cols = a.mul_vec_transposed(&u);
            let v2: Vec<f64> = cols.iter().map(|&c| if sign * c > 0.0 { 1.0 } else { 0.0 }).collect();
            let rows = a.mul_vec(&v2);
            let u2: Vec<f64> = rows.iter().map(|&r| if sign * r > 0.0 { 1.0 } else { 0.0 }).collect();
            let val2 = a.bilinear(&u2, &v2);
            if sign * val2 <= sign * val + 1e-12 {
                break;
            }
            (u, v, val) = (u2, v2, val2);
        }
        (u, v, val.abs())
    }
}

impl Distinguisher for SvdRank1Distinguisher {
    fn name(&self) -> &'static str {
        "svd-rank1"
    }

    fn privacy(&self) -> PrivacyFlag {
        PrivacyFlag::NonPrivateExperimental
    }

    fn gamma(&self) -> f64 {
        0.0
    }

    fn loss(&self, _eps: f64) -> Option<f64> {
        None
    }

    fn guarantee(&self) -> String {
        "NON-PRIVATE-EXPERIMENTAL: score >= sigma_1(D - H)/4, no additive guarantee against the best rank-1 query".into()
    }

    fn admits(&self, query: &LinearQuery) -> bool {
        matches!(query.tag(), QueryTag::Rank1(_) | QueryTag::Cut(_)) && query.dim() == self.universe.size()
    }

    fn distinguish(&self, _eps0: f64, db: &DataHistogram, hypothesis: &[f64], _noise: &mut NoiseSource) -> Result<LinearQuery> {
        if hypothesis.len() != db.weights().len() {
            return Err(Error::DimensionMismatch { expected: db.weights().len(), got: hypothesis.len() });
        }
        let diff: Vec<f64> = db.weights().iter().zip(hypothesis).map(|(d, h)| d - h).collect();
        let a = DenseMatrix::from_pair_vector(&self.universe, &diff)?;
        let (u, v, _) = self.rank1_pair(&a);
        compile_rank1_query(&u, &v, &self.universe)
    }
}

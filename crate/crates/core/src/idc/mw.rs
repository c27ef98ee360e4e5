use crate::error::{Error, Result};
use crate::idc::{ceil_budget, check_alpha, Idc};
use crate::query::LinearQuery;
use crate::universe::Universe;

/// A probability distribution over the universe plus the public database size.
#[derive(Debug, Clone, PartialEq)]
pub struct MwHypothesis {
    pub distribution: Vec<f64>,
    pub public_n: f64,
}

impl MwHypothesis {
    pub fn uniform(size: usize, public_n: f64) -> Self {
        Self { distribution: vec![1.0 / size as f64; size], public_n }
    }
}

/// Multiplicative weights over the normalized database.
#[derive(Debug, Clone)]
pub struct MultiplicativeWeights {
    universe: Universe,
    n: f64,
}

impl MultiplicativeWeights {
    /// `n` is the L1 norm of the database, treated as public.
    pub fn new(universe: Universe, n: f64) -> Result<Self> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Validation(format!("database size n must be positive, got {n}")));
        }
        Ok(Self { universe, n })
    }

    pub fn n(&self) -> f64 {
        self.n
    }
}

/// One multiplicative-weights step with learning rate `alpha / (2n)`.
///
/// Penalizes `q` when the hypothesis over-answers and `1 - q` when it
/// under-answers, then renormalizes. Answers are compared after dividing the
/// canonical noisy answer by `public_n`.
pub fn mw_update(h: &MwHypothesis, query: &LinearQuery, noisy_answer: f64, alpha: f64) -> Result<MwHypothesis> {
    check_alpha(alpha)?;
    query.check_dim(h.distribution.len())?;
    let n = h.public_n;
    let eta = alpha / (2.0 * n);
    let target = noisy_answer / n;
    let current = query.dot(&h.distribution);
    let penalize_query = if target < current {
        true
    } else if target > current {
        false
    } else {
        return Ok(h.clone());
    };
    let mut next: Vec<f64> = h
        .distribution
        .iter()
        .zip(query.coefficients())
        .map(|(p, q)| {
            let r = if penalize_query { *q } else { 1.0 - q };
            p * (-eta * r).exp()
        })
        .collect();
    let total: f64 = next.iter().sum();
    next.iter_mut().for_each(|p| *p /= total);
    Ok(MwHypothesis { distribution: next, public_n: n })
}

/// `ceil(4 n^2 ln|X| / alpha^2)`.
pub fn mw_bound(n: f64, universe_size: usize, alpha: f64) -> u64 {
    ceil_budget(4.0 * n * n * (universe_size as f64).ln() / (alpha * alpha))
}

impl Idc for MultiplicativeWeights {
    type Hypothesis = MwHypothesis;

    fn name(&self) -> &'static str {
        "mw"
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }

    fn init(&self) -> MwHypothesis {
        MwHypothesis::uniform(self.universe.size(), self.n)
    }

    fn update(&self, h: &MwHypothesis, query: &LinearQuery, noisy_answer: f64, alpha: f64) -> Result<MwHypothesis> {
        mw_update(h, query, noisy_answer, alpha)
    }

    fn eval(&self, h: &MwHypothesis, query: &LinearQuery) -> f64 {
        h.public_n * query.dot(&h.distribution)
    }

    fn bound_real(&self, alpha: f64) -> f64 {
        4.0 * self.n * self.n * (self.universe.size() as f64).ln() / (alpha * alpha)
    }

    fn dense(&self, h: &MwHypothesis) -> Option<Vec<f64>> {
        Some(h.distribution.iter().map(|p| p * h.public_n).collect())
    }
}

use crate::error::{Error, Result};
use crate::idc::{ceil_budget, check_alpha, Idc};
use crate::query::LinearQuery;
use crate::universe::Universe;

/// Real-valued hypothesis, unconstrained in sign and magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct FkHypothesis {
    pub weights: Vec<f64>,
}

/// Additive low-rank (cut decomposition) construction: each update moves the
/// hypothesis by `alpha/|X|` times the query vector, toward the noisy answer.
#[derive(Debug, Clone)]
pub struct FriezeKannan {
    universe: Universe,
    n2: f64,
}

impl FriezeKannan {
    /// `n2` is the squared L2 norm of the database, treated as public.
    pub fn new(universe: Universe, n2: f64) -> Result<Self> {
        if !(n2 >= 0.0 && n2.is_finite()) {
            return Err(Error::Validation(format!("n2 must be finite and non-negative, got {n2}")));
        }
        Ok(Self { universe, n2 })
    }

    pub fn n2(&self) -> f64 {
        self.n2
    }
}

pub fn fk_update(h: &FkHypothesis, query: &LinearQuery, noisy_answer: f64, alpha: f64) -> Result<FkHypothesis> {
    check_alpha(alpha)?;
    query.check_dim(h.weights.len())?;
    let current = query.dot(&h.weights);
    let step = alpha / h.weights.len() as f64;
    let direction = if current > noisy_answer {
        -1.0
    } else if current < noisy_answer {
        1.0
    } else {
        return Ok(h.clone());
    };
    let weights = h
        .weights
        .iter()
        .zip(query.coefficients())
        .map(|(w, q)| w + direction * step * q)
        .collect();
    Ok(FkHypothesis { weights })
}

/// `ceil(n2 |X| / alpha^2)`.
pub fn fk_bound(n2: f64, universe_size: usize, alpha: f64) -> u64 {
    ceil_budget(n2 * universe_size as f64 / (alpha * alpha))
}

impl Idc for FriezeKannan {
    type Hypothesis = FkHypothesis;

    fn name(&self) -> &'static str {
        "fk"
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }

    fn init(&self) -> FkHypothesis {
        FkHypothesis { weights: vec![0.0; self.universe.size()] }
    }

    fn update(&self, h: &FkHypothesis, query: &LinearQuery, noisy_answer: f64, alpha: f64) -> Result<FkHypothesis> {
        fk_update(h, query, noisy_answer, alpha)
    }

    fn eval(&self, h: &FkHypothesis, query: &LinearQuery) -> f64 {
        query.dot(&h.weights)
    }

    fn bound_real(&self, alpha: f64) -> f64 {
        self.n2 * self.universe.size() as f64 / (alpha * alpha)
    }

    fn dense(&self, h: &FkHypothesis) -> Option<Vec<f64>> {
        Some(h.weights.clone())
    }
}

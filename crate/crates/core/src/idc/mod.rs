//! Iterative database constructions.
//!
//! An IDC keeps a hypothesis about the private database and improves it
//! whenever it is shown a query on which the hypothesis is off by at least
//! `alpha`, together with a noisy answer that is within `alpha` of the truth.
//! `bound(alpha)` certifies how many such updates can happen in a row.
//!
//! All values here are on the canonical query scale (see [`crate::query`]).

mod dus;
mod fk;
mod mm;
mod mw;

use std::fmt::Debug;

pub use dus::{verify_dus, DusReport, DusViolation, UpdateRound};
pub use fk::{fk_bound, fk_update, FkHypothesis, FriezeKannan};
pub use mm::{enumerate_candidates, mm_bound, mm_candidate_size, MedianMechanism, MmHypothesis, DEFAULT_CANDIDATE_CAP};
pub use mw::{mw_bound, mw_update, MultiplicativeWeights, MwHypothesis};

use crate::error::Result;
use crate::query::LinearQuery;
use crate::universe::Universe;

pub trait Idc {
    type Hypothesis: Clone + PartialEq + Debug;

    fn name(&self) -> &'static str;

    fn universe(&self) -> &Universe;

    /// The hypothesis before any update.
    fn init(&self) -> Self::Hypothesis;

    /// One update at scale `alpha` given a distinguishing query and a noisy
    /// answer. `noisy_answer == eval(h, query)` is a no-op.
    fn update(&self, h: &Self::Hypothesis, query: &LinearQuery, noisy_answer: f64, alpha: f64)
        -> Result<Self::Hypothesis>;

    /// Canonical answer of `query` on the hypothesis.
    fn eval(&self, h: &Self::Hypothesis, query: &LinearQuery) -> f64;

    /// Unrounded update bound `B(alpha)`.
    fn bound_real(&self, alpha: f64) -> f64;

    /// Maximum length of an `alpha` database update sequence.
    fn bound(&self, alpha: f64) -> u64 {
        ceil_budget(self.bound_real(alpha))
    }

    /// The hypothesis as a real vector over the universe, on the same scale as
    /// the database, when it has one.
    fn dense(&self, h: &Self::Hypothesis) -> Option<Vec<f64>>;
}

pub(crate) fn ceil_budget(x: f64) -> u64 {
    // guard against 40.000000000000007 style ceilings
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(crate::error::Error::Validation(format!("alpha must be positive, got {alpha}")))
    }
}

use serde::Serialize;

use crate::histogram::DataHistogram;
use crate::idc::Idc;
use crate::query::LinearQuery;

/// One update step as seen by an IDC.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateRound<H> {
    pub before: H,
    pub query: LinearQuery,
    pub noisy_answer: f64,
    pub after: H,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum DusViolation {
    /// The first hypothesis is not the IDC's initial hypothesis.
    Initialization,
    /// `|Q(D) - Q(h_t)| < alpha`: the query did not distinguish.
    NotDistinguishing { round: usize, gap: f64 },
    /// `|Q(D) - a_t| >= alpha`: the noisy answer was too far from the truth.
    InaccurateAnswer { round: usize, error: f64 },
    /// `h_{t+1}` of one round differs from `h_t` of the next.
    Chaining { round: usize },
    /// `h_{t+1}` is not what the IDC's update produces.
    UpdateMismatch { round: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DusReport {
    pub rounds: usize,
    pub violation: Option<DusViolation>,
}

impl DusReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

/// Check that `trace` is an `alpha` database update sequence for `true_db`
/// under `idc`, stopping at the first violation.
///
/// Comparisons against `alpha` allow a relative slack of 1e-9 so that exact
/// constructions are not rejected by rounding.
pub fn verify_dus<I: Idc>(
    idc: &I,
    trace: &[UpdateRound<I::Hypothesis>],
    true_db: &DataHistogram,
    alpha: f64,
) -> DusReport {
    let slack = 1e-9 * alpha.abs().max(1.0);
    let fail = |v| DusReport { rounds: trace.len(), violation: Some(v) };
    if let Some(first) = trace.first() {
        if first.before != idc.init() {
            return fail(DusViolation::Initialization);
        }
    }
    for (t, round) in trace.iter().enumerate() {
        if t > 0 && trace[t - 1].after != round.before {
            return fail(DusViolation::Chaining { round: t });
        }
        let truth = match round.query.canonical(true_db.weights()) {
            Ok(v) => v,
            Err(_) => return fail(DusViolation::UpdateMismatch { round: t }),
        };
        let gap = (truth - idc.eval(&round.before, &round.query)).abs();
        if gap < alpha - slack {
            return fail(DusViolation::NotDistinguishing { round: t, gap });
        }
        let error = (truth - round.noisy_answer).abs();
        if error >= alpha + slack {
            return fail(DusViolation::InaccurateAnswer { round: t, error });
        }
        match idc.update(&round.before, &round.query, round.noisy_answer, alpha) {
            Ok(h) if h == round.after => {}
            _ => return fail(DusViolation::UpdateMismatch { round: t }),
        }
    }
    DusReport { rounds: trace.len(), violation: None }
}

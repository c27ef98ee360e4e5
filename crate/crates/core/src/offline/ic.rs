use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::DataHistogram;
use crate::idc::{Idc, UpdateRound};
use crate::noise::{compose_budget, AccessesPerRound, NoiseSource, PrivacyParams};
use crate::offline::{Distinguisher, PrivacyFlag};
use crate::query::QueryTag;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcConfig {
    pub privacy: PrivacyParams,
    pub alpha: f64,
    /// When set, require the distinguisher's failure probability to be at
    /// most `beta / (2B)` so the accuracy guarantee applies.
    pub certify_beta: Option<f64>,
}

impl IcConfig {
    pub fn new(privacy: PrivacyParams, alpha: f64) -> Self {
        Self { privacy, alpha, certify_beta: None }
    }

    pub fn with_certification(self, beta: f64) -> Self {
        Self { certify_beta: Some(beta), ..self }
    }

    /// `eps0 = epsilon / (4 sqrt(B ln(1/delta)))`.
    pub fn eps0(&self, budget: u64) -> f64 {
        self.privacy.epsilon / (4.0 * (budget as f64 * (1.0 / self.privacy.delta).ln()).sqrt())
    }

    fn validate(&self) -> Result<()> {
        let p = self.privacy;
        if !(p.epsilon > 0.0 && p.epsilon.is_finite()) || !(p.delta > 0.0 && p.delta < 1.0) {
            return Err(Error::Config(format!(
                "iterative construction needs epsilon > 0 and delta in (0, 1), got ({}, {})",
                p.epsilon, p.delta
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if let Some(beta) = self.certify_beta {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::Config(format!("beta must lie in (0, 1), got {beta}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PrivacyReport {
    Certified { epsilon: f64, delta: f64 },
    /// No `(epsilon, delta)` claim is made, e.g. because a non-private
    /// distinguisher was used.
    Refused { reason: String },
}

impl PrivacyReport {
    pub fn params(&self) -> Option<PrivacyParams> {
        match *self {
            PrivacyReport::Certified { epsilon, delta } => Some(PrivacyParams { epsilon, delta }),
            PrivacyReport::Refused { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcRound {
    pub t: usize,
    pub query: QueryTag,
    /// Canonical noisy answer.
    pub noisy_answer: f64,
    pub hypothesis_answer: f64,
    /// Internal only.
    pub true_answer: f64,
    pub updated: bool,
}

#[derive(Debug, Clone)]
pub struct IcOutput<H> {
    pub hypothesis: H,
    pub rounds: Vec<IcRound>,
    /// Update rounds, a candidate update sequence at scale `alpha/2`.
    pub trace: Vec<UpdateRound<H>>,
    pub budget: u64,
    pub eps0: f64,
    /// True when a round found no large enough discrepancy.
    pub early_exit: bool,
    pub privacy: PrivacyReport,
}

/// Iterative construction: for up to `B(alpha)` rounds, ask the distinguisher
/// for a query at privacy `eps0`, measure it with `Lap(1/eps0)` noise, stop if
/// the hypothesis is within `3 alpha/4` of the noisy answer, otherwise update
/// the IDC at scale `alpha/2`.
pub fn ic_release<I, D>(
    db: &DataHistogram,
    idc: &I,
    dist: &D,
    cfg: IcConfig,
    noise: &mut NoiseSource,
) -> Result<IcOutput<I::Hypothesis>>
where
    I: Idc,
    D: Distinguisher + ?Sized,
{
    cfg.validate()?;
    if db.universe().size() != idc.universe().size() {
        return Err(Error::DimensionMismatch { expected: idc.universe().size(), got: db.universe().size() });
    }
    let budget = idc.bound(cfg.alpha);
    if budget == 0 {
        return Err(Error::Config("update bound B(alpha) is 0; nothing to construct".into()));
    }
    if let Some(beta) = cfg.certify_beta {
        let limit = beta / (2.0 * budget as f64);
        if dist.gamma() > limit {
            return Err(Error::Config(format!(
                "distinguisher failure probability {} exceeds beta/(2B) = {limit}",
                dist.gamma()
            )));
        }
    }
    let eps0 = cfg.eps0(budget);
    let mut h = idc.init();
    let mut rounds = Vec::new();
    let mut trace = Vec::new();
    let mut early_exit = false;
    for t in 1..=budget as usize {
        let dense = idc
            .dense(&h)
            .ok_or_else(|| Error::Config(format!("the {} construction has no vector form to distinguish against", idc.name())))?;
        let query = dist.distinguish(eps0, db, &dense, noise)?;
        if !dist.admits(&query) {
            return Err(Error::Contract(format!("{} returned a query outside its class", dist.name())));
        }
        let truth = query.canonical(db.weights())?;
        let noisy = truth + noise.laplace(1.0 / eps0)?;
        let fake = idc.eval(&h, &query);
        let updated = (noisy - fake).abs() >= 0.75 * cfg.alpha;
        rounds.push(IcRound {
            t,
            query: query.tag().clone(),
            noisy_answer: noisy,
            hypothesis_answer: fake,
            true_answer: truth,
            updated,
        });
        if !updated {
            early_exit = true;
            break;
        }
        let next = idc.update(&h, &query, noisy, cfg.alpha / 2.0)?;
        let before = std::mem::replace(&mut h, next);
        trace.push(UpdateRound { before, query, noisy_answer: noisy, after: h.clone() });
    }
    let privacy = match dist.privacy() {
        PrivacyFlag::Private => {
            let p = compose_budget(budget, eps0, cfg.privacy.delta, AccessesPerRound::Two)?;
            PrivacyReport::Certified { epsilon: p.epsilon, delta: p.delta }
        }
        PrivacyFlag::NonPrivateExperimental => PrivacyReport::Refused {
            reason: format!("{} is NON-PRIVATE-EXPERIMENTAL", dist.name()),
        },
    };
    Ok(IcOutput { hypothesis: h, rounds, trace, budget, eps0, early_exit, privacy })
}

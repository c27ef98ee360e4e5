use crate::error::{Error, Result};
use crate::idc::{ceil_budget, check_alpha, Idc};
use crate::query::LinearQuery;
use crate::universe::Universe;

/// Refuse to enumerate more initial candidates than this by default.
pub const DEFAULT_CANDIDATE_CAP: u64 = 1_000_000;

/// A nonempty set of candidate histograms of L1 norm `m`. Query answers on
/// the set are the lower median, multiplied by `scale = n/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MmHypothesis {
    pub candidates: Vec<Vec<u32>>,
    pub m: u32,
    pub scale: f64,
}

impl MmHypothesis {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    fn values(&self, query: &LinearQuery) -> Vec<f64> {
        self.candidates.iter().map(|c| candidate_value(c, query)).collect()
    }

    /// Lower median of the unscaled candidate answers.
    pub fn median(&self, query: &LinearQuery) -> f64 {
        let mut v = self.values(query);
        lower_median(&mut v)
    }
}

fn candidate_value(c: &[u32], query: &LinearQuery) -> f64 {
    c.iter().zip(query.coefficients()).map(|(&x, q)| x as f64 * q).sum()
}

fn lower_median(v: &mut [f64]) -> f64 {
    let mid = (v.len() - 1) / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

/// Candidate database size `m = ceil(n^2 ln k / alpha^2)`, at least 1.
pub fn mm_candidate_size(n: f64, k: usize, alpha: f64) -> u32 {
    let m = ceil_budget(n * n * (k as f64).ln() / (alpha * alpha));
    m.clamp(1, u32::MAX as u64) as u32
}

fn initial_set_size(universe_size: usize, m: u32) -> Option<u64> {
    (universe_size as u64).checked_pow(m)
}

fn check_cap(universe_size: usize, m: u32, cap: u64) -> Result<u64> {
    match initial_set_size(universe_size, m) {
        Some(s) if s <= cap => Ok(s),
        _ => Err(Error::ToyScaleCap(format!(
            "median mechanism needs |X|^m = {universe_size}^{m} initial candidates, above the cap of {cap}; \
             it is only runnable on toy universes"
        ))),
    }
}

/// `ceil(n^2 ln|X| ln k / alpha^2)`, refusing configurations whose candidate
/// set would exceed `cap`.
pub fn mm_bound(n: f64, universe_size: usize, k: usize, alpha: f64, cap: u64) -> Result<u64> {
    check_alpha(alpha)?;
    check_cap(universe_size, mm_candidate_size(n, k, alpha), cap)?;
    Ok(ceil_budget(mm_bound_real(n, universe_size, k, alpha)))
}

fn mm_bound_real(n: f64, universe_size: usize, k: usize, alpha: f64) -> f64 {
    n * n * (universe_size as f64).ln() * (k as f64).ln() / (alpha * alpha)
}

/// Histograms of every length-`m` sequence over the universe, in
/// lexicographic sequence order. Distinct sequences with the same histogram
/// are kept as separate candidates, so there are exactly `|X|^m` of them.
pub fn enumerate_candidates(universe_size: usize, m: u32, cap: u64) -> Result<Vec<Vec<u32>>> {
    if universe_size == 0 {
        return Err(Error::Validation("empty universe".into()));
    }
    let total = check_cap(universe_size, m, cap)? as usize;
    let mut out = Vec::with_capacity(total);
    let mut seq = vec![0usize; m as usize];
    let mut hist = vec![0u32; universe_size];
    hist[0] = m;
    loop {
        out.push(hist.clone());
        // odometer increment, last position fastest
        let mut pos = seq.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            hist[seq[pos]] -= 1;
            if seq[pos] + 1 < universe_size {
                seq[pos] += 1;
                hist[seq[pos]] += 1;
                break;
            }
            seq[pos] = 0;
            hist[0] += 1;
        }
    }
}

/// Median mechanism over an explicit candidate set (toy universes only).
#[derive(Debug, Clone)]
pub struct MedianMechanism {
    universe: Universe,
    n: f64,
    k: usize,
    m: u32,
    cap: u64,
}

impl MedianMechanism {
    /// `n` is the public database size, `k` the number of queries and `alpha`
    /// the accuracy the candidate size is tuned for.
    pub fn new(universe: Universe, n: f64, k: usize, alpha: f64, cap: u64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Validation(format!("database size n must be positive, got {n}")));
        }
        if k == 0 {
            return Err(Error::Validation("query count k must be at least 1".into()));
        }
        let m = mm_candidate_size(n, k, alpha);
        check_cap(universe.size(), m, cap)?;
        Ok(Self { universe, n, k, m, cap })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn initial_size(&self) -> u64 {
        initial_set_size(self.universe.size(), self.m).unwrap_or(u64::MAX)
    }
}

impl Idc for MedianMechanism {
    type Hypothesis = MmHypothesis;

    fn name(&self) -> &'static str {
        "mm"
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }

    fn init(&self) -> MmHypothesis {
        let candidates = enumerate_candidates(self.universe.size(), self.m, self.cap)
            .expect("cap checked at construction");
        MmHypothesis { candidates, m: self.m, scale: self.n / self.m as f64 }
    }

    fn update(&self, h: &MmHypothesis, query: &LinearQuery, noisy_answer: f64, _alpha: f64) -> Result<MmHypothesis> {
        query.check_dim(self.universe.size())?;
        let target = noisy_answer / h.scale;
        let values = h.values(query);
        let mut sorted = values.clone();
        let med = lower_median(&mut sorted);
        let keep: Box<dyn Fn(f64) -> bool> = if med > target {
            Box::new(move |v| v < med)
        } else if med < target {
            Box::new(move |v| v > med)
        } else {
            return Ok(h.clone());
        };
        let candidates: Vec<Vec<u32>> = h
            .candidates
            .iter()
            .zip(&values)
            .filter(|(_, &v)| keep(v))
            .map(|(c, _)| c.clone())
            .collect();
        if candidates.is_empty() {
            return Err(Error::Invariant(
                "median mechanism update would empty the candidate set".into(),
            ));
        }
        Ok(MmHypothesis { candidates, m: h.m, scale: h.scale })
    }

    fn eval(&self, h: &MmHypothesis, query: &LinearQuery) -> f64 {
        h.scale * h.median(query)
    }

    fn bound_real(&self, alpha: f64) -> f64 {
        mm_bound_real(self.n, self.universe.size(), self.k, alpha)
    }

    fn dense(&self, _h: &MmHypothesis) -> Option<Vec<f64>> {
        None
    }
}

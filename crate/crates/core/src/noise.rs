//! Laplace noise, concentration bounds and privacy accounting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Target `(epsilon, delta)` of a mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::Config(format!("delta must lie in [0, 1), got {delta}")));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }
}

/// Source of all randomness for one run.
///
/// Streams are ChaCha20 keyed by the seed, with the stream id selecting an
/// independent sub-sequence so that parallel trials are reproducible. In
/// zero-noise mode every Laplace draw is exactly 0 and the exponential
/// mechanism returns its argmax; uniform draws used for non-private
/// randomness (query sampling, rounding) still come from the stream.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    rng: ChaCha20Rng,
    zero_noise: bool,
}

impl NoiseSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Sub-stream `stream` of `seed`, e.g. one per trial.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, zero_noise: false }
    }

    /// Test hook: Laplace draws return exactly 0.
    pub fn zero_noise(seed: u64) -> Self {
        Self { zero_noise: true, ..Self::new(seed) }
    }

    pub fn is_zero_noise(&self) -> bool {
        self.zero_noise
    }

    /// One draw from `Lap(scale)`, density `exp(-|x|/scale) / (2 scale)`,
    /// by inverse CDF.
    pub fn laplace(&mut self, scale: f64) -> Result<f64> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Validation(format!("Laplace scale must be positive, got {scale}")));
        }
        if self.zero_noise {
            return Ok(0.0);
        }
        loop {
            let u: f64 = self.rng.random::<f64>() - 0.5;
            let tail = 1.0 - 2.0 * u.abs();
            if tail > 0.0 {
                return Ok(-scale * u.signum() * tail.ln());
            }
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }
}

/// Upper bound on `Pr[sum_i q_i Y_i >= alpha]` for `k` i.i.d. `Lap(b)` draws
/// and weights `q_i` in `[0,1]`.
pub fn laplace_sum_tail_bound(k: usize, b: f64, alpha: f64) -> Result<f64> {
    if k == 0 || !(b > 0.0) || !(alpha > 0.0) {
        return Err(Error::Validation(format!(
            "tail bound needs k >= 1, b > 0, alpha > 0 (got k={k}, b={b}, alpha={alpha})"
        )));
    }
    let kb = k as f64 * b;
    Ok(if alpha <= kb {
        (-alpha * alpha / (6.0 * k as f64 * b * b)).exp()
    } else {
        (-alpha / (6.0 * b)).exp()
    })
}

/// Whether a class of `num_queries` queries is small enough for the
/// small-class randomized-response bound: `|Q| <= (beta/2) 2^{|X|/6}`.
pub fn rr_small_class(universe_size: usize, num_queries: f64, beta: f64) -> bool {
    num_queries.ln() <= (beta / 2.0).ln() + universe_size as f64 / 6.0 * std::f64::consts::LN_2
}

/// `sqrt(6 |X| ln(|Q|/beta)) / epsilon`, the small-class error bound.
pub fn rr_error_bound_small_class(universe_size: usize, num_queries: f64, beta: f64, epsilon: f64) -> f64 {
    (6.0 * universe_size as f64 * (num_queries / beta).ln()).sqrt() / epsilon
}

/// Additive error that randomized response achieves on every query of a
/// class of `num_queries` linear queries with probability `1 - beta`.
///
/// Classes larger than `(beta/2) 2^{|X|/6}` get the general bound, which
/// carries an extra `sqrt(ln(|X|/beta))` factor (constant taken as 1).
pub fn rr_error_bound(universe_size: usize, num_queries: f64, beta: f64, epsilon: f64) -> f64 {
    let small = rr_error_bound_small_class(universe_size, num_queries, beta, epsilon);
    if rr_small_class(universe_size, num_queries, beta) {
        small
    } else {
        small * (universe_size as f64 / beta).ln().sqrt()
    }
}

/// How many `eps0`-private data accesses each round makes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessesPerRound {
    One,
    Two,
}

/// Advanced composition of `accesses` `eps0`-private steps:
/// `sqrt(2 k ln(1/delta)) eps0 + k eps0 (e^eps0 - 1)`.
pub fn compose_accesses(accesses: u64, eps0: f64, delta: f64) -> Result<PrivacyParams> {
    if !(eps0 > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("composition needs eps0 > 0 and delta in (0,1), got {eps0}, {delta}")));
    }
    let k = accesses as f64;
    let epsilon = (2.0 * k * (1.0 / delta).ln()).sqrt() * eps0 + k * eps0 * eps0.exp_m1();
    Ok(PrivacyParams { epsilon, delta })
}

/// Privacy of `rounds` rounds of `eps0`-private accesses. With two accesses
/// per round this is `sqrt(4 B ln(1/delta)) eps0 + 2 B eps0 (e^eps0 - 1)`.
pub fn compose_budget(rounds: u64, eps0: f64, delta: f64, per_round: AccessesPerRound) -> Result<PrivacyParams> {
    let accesses = match per_round {
        AccessesPerRound::One => rounds,
        AccessesPerRound::Two => 2 * rounds,
    };
    compose_accesses(accesses, eps0, delta)
}

/// Privacy guaranteed by the online mechanism when its noise scale uses
/// `sigma_constant` instead of the analysed constant 1000: shrinking the
/// constant by a factor `c` multiplies epsilon by `c`.
pub fn online_privacy(target: PrivacyParams, sigma_constant: f64) -> PrivacyParams {
    PrivacyParams { epsilon: target.epsilon * ONLINE_SIGMA_CONSTANT / sigma_constant, delta: target.delta }
}

/// Noise-scale constant under which the online mechanism's privacy analysis holds.
pub const ONLINE_SIGMA_CONSTANT: f64 = 1000.0;

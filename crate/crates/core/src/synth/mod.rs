//! Synthetic graphs for cut queries: randomized response, projection of the
//! noisy graph back to the `[0,1]` box under a cut-norm separation oracle, and
//! randomized rounding.

mod cutnorm;
mod project;
mod rr;

pub use cutnorm::{
    cut_norm_bruteforce, normalized_cut_norm_bruteforce, spectral_separation, BruteForceOracle, CutNorm,
    SeparationOracle, SeparationResult, SpectralOracle, BRUTE_FORCE_MAX_ROWS,
};
pub use project::{project_to_synthetic, Projection};
pub use rr::{randomized_response, round_to_unweighted, rr_privacy, NoisyGraph, WeightedSyntheticGraph};

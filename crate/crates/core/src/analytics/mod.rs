//! Exact and empirical output laws, total variation distance, and the
//! sampling-separation analytics.

mod adversary;
mod distribution;
mod gamma;

pub use adversary::{
    adversary_law, adversary_strategies, adversary_tv, bias_grid, min_tv_affine_adversary, AdversaryResult,
    AdversarySpec,
};
pub use distribution::{marginal, tv_distance, DistributionKind, OutcomeDistribution};
pub use gamma::{
    empirical_distribution, exact_classical_distribution, exact_gamma, law_to_distribution, MAX_GAMMA_D,
};

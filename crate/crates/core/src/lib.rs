//! Coverage probability, rate coverage and ergodic spectral efficiency of
//! finite-extent millimeter-wave device-to-device networks in which human
//! bodies block links.
//!
//! The crate pairs exact closed-form analysis (conditioned on user positions
//! or averaged over them under an equivalent LOS ball) with a seeded Monte
//! Carlo engine that places users, resolves blockage geometrically and
//! evaluates the conditional closed form per placement.

pub mod antenna;
pub mod blockage;
pub mod channel;
pub mod cli;
pub mod coverage;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod quad;
pub mod scenario;
pub mod spatial;
pub mod specfun;

pub use antenna::{mainlobe_prob, radiated_power_integral, upa_pattern, AntennaPattern};
pub use blockage::{block_prob, los_ball, pairwise_block_prob, BlockProbProfile, LosBall};
pub use channel::{
    beta0, interferer_gain_pmf, omega_vector, LinkModel, OmegaVector, PowerRatios, ReferenceLink,
};
pub use coverage::{
    coverage_conditional, ergodic_spectral_efficiency, g_ti, rate_ccdf, ConditionalCoverage,
    CoverageCurve, ErgodicOptions, ErgodicResult, MultinomialPlan,
};
pub use error::{Error, Result};
pub use geometry::{
    blocked_set, grid_placement, orbital_positions, sample_bpp, AnnulusRegion, BlockageReport,
    PlanarPoint, UserSet,
};
pub use montecarlo::{run_trials, AssumptionLevel, Estimate, Metric, MonteCarlo};
pub use scenario::ScenarioConfig;
pub use spatial::{expected_g_ti, OmegaDensity, SpatialCoverage};

//! Small-scale ground truth: exact output distributions from permanents
//! and determinants, correlators read off those distributions, finite-shot
//! estimates and Monte Carlo Haar averages of the closed-form correlators.

mod distribution;
mod haar_mc;
mod permanent;
mod sampling;

pub use distribution::{
    boson_distribution, distinguishable_distribution, exact_distribution, fermion_distribution,
    oracle_correlator, simulated_distribution, simulated_phase_correlator,
    simulated_phase_correlators, OutputConfiguration, OutputDistribution, PhaseEstimate,
    BOSON_MAX_M, BOSON_MAX_N, DEFAULT_PHASE_SAMPLES, FERMION_MAX_M, FERMION_MAX_N,
};
pub use haar_mc::{mc_haar_moments, MomentEstimate, MIN_TRIALS};
pub use permanent::{determinant, permanent, PERMANENT_MAX_N};
pub use sampling::{sampled_counts, SampledCorrelators};

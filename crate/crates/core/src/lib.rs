//! Exact two-point mode correlators for bosons, fermions, distinguishable
//! particles and mean-field "simulated bosons" scattered by Haar-random
//! interferometers, closed-form ensemble predictions of their first three
//! moments, and the statistics used to tell the species apart.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the double-precision instantiation used by the CLI.

pub mod correlators;
pub mod error;
pub mod experiments;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod rmt;
pub mod rng;
pub mod scalar;
pub mod species;
pub mod stats;
pub mod unitary;

pub use correlators::{c_dataset, c_datasets_all, correlator, pair_terms, CDataset, PairTerms};
pub use error::{Error, Result};
pub use matrix::CMatrix;
pub use rmt::{rmt_moments, rmt_moments_exact, rmt_statistics, BenchmarkStatistics, MomentTriple};
pub use rng::RngSeed;
pub use scalar::Real;
pub use species::Species;
pub use stats::{
    certify, cloud_summary, dataset_moments, dataset_statistics, CertificationVerdict, CloudSummary,
};
pub use unitary::{
    extract_submatrix, haar_submatrix_with, haar_unitary, haar_unitary_with, unitarity_residual,
    InputSelection, InterferometerSubmatrix, UnitaryMatrix,
};

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;

pub type CMatrix64 = CMatrix<f64>;
pub type Unitary64 = UnitaryMatrix<f64>;
pub type Unitary32 = UnitaryMatrix<f32>;
pub type Submatrix64 = InterferometerSubmatrix<f64>;
pub type Submatrix32 = InterferometerSubmatrix<f32>;
pub type CDataset64 = CDataset<f64>;
pub type CDataset32 = CDataset<f32>;
pub type Moments64 = MomentTriple<f64>;
pub type Statistics64 = BenchmarkStatistics<f64>;
pub type Cloud64 = CloudSummary<f64>;
pub type Verdict64 = CertificationVerdict<f64>;
pub type Distribution64 = oracle::OutputDistribution<f64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

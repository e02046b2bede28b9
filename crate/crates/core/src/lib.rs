//! Component-wise MCMC for multivariate Gaussian targets: block Gibbs and
//! block MALA kernels under random and deterministic scans, closed-form
//! spectral-gap and asymptotic-variance bound calculators, and brute-force
//! grid-discretization oracles that verify every bound numerically.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod kernels;
pub mod linalg;
pub mod normal;
pub mod oracle;
pub mod rng;
pub mod scans;
pub mod target;

pub use error::{Error, Result};

//! Certified numerical checks of totient-function inequalities over
//! primorials, Mertens sums, Chebyshev's theta function and the distribution
//! of n/φ(n).

pub mod checkpoint;
pub mod constants;
pub mod density;
pub mod error;
pub mod mertens;
pub mod primorial;
pub mod rigor;
pub mod sieve;
pub mod theta;

pub use checkpoint::CheckpointPolicy;
pub use constants::{ConstantValue, ScanConstants};
pub use density::{
    density_estimate, omega_normal_order, theorem4_exceptions, weingartner_prediction, DensityRecord,
    Formula, Threshold,
};
pub use error::{Error, Result};
pub use mertens::{mertens_ap_scan, mertens_scan, MertensConfig, MertensRecord};
pub use primorial::{primorial_scan, PrimorialConfig, PrimorialRecord, ScanBound};
pub use rigor::{
    certified_compare, compensated_sum, et_add, et_log, CompensatedSum, ErrorTracked, Outcome,
    Verdict,
};
pub use sieve::{primes_up_to, totient_table, PrimeStream, SieveConfig, TotientTable};
pub use theta::{theta_at, theta_scan, ThetaConfig, ThetaRecord};

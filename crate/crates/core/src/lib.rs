//! Exact computation with interval exchange transformations.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalar`]: exact rational / real-quadratic arithmetic.
//! * [`iet`]: the transformation itself, orbits, and i.d.o.c. / `D'` probes.
//! * [`induction`]: first-return maps, basic intervals, stacks and the
//!   tall-stack construction.
//! * [`diophantine`]: orbit-separation functions `rho`, `rho_n`, `delta_n`,
//!   `rho'_n`, the `n * rho'_n` record series and critical-set scans.
//! * [`spectral`]: visit-count cocycles, Weyl sums and eigenvalue scans.
//!
//! Everything that decides control flow is exact; floats appear only in the
//! spectral sums and in reported summaries.

pub mod diophantine;
pub mod error;
pub mod iet;
pub mod induction;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result, ScalarError};
pub use iet::{Iet, IetConfig, Interval, Permutation};
pub use scalar::Scalar;

/// Version tag written into every machine-readable output.
pub const SCHEMA_VERSION: u32 = 1;

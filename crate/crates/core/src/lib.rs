//! Simultaneous approximation of all roots of a complex univariate polynomial.
//!
//! The crate covers the classical Durand-Kerner (Weierstrass) iteration, the
//! Maehly-Ehrlich-Aberth and Ostrowski-Gargantini methods, the generalized
//! `m`-th root family, simultaneous Householder methods of arbitrary order and
//! two Weierstrass-like generalizations. Every method beyond Durand-Kerner is
//! assembled from exact symmetric-function identities: Newton's identities for
//! power sums, the partition expansion of complete homogeneous polynomials and
//! the logarithmic-derivative relation `f^(k)(z) / (k! f(z)) = e_k(1/(z - λ_j))`.
//!
//! ```
//! use simroots::{driver, MethodSpec, Polynomial, SolveConfig, Termination};
//! use num_complex::Complex64;
//!
//! let p = Polynomial::from_roots(&[
//!     Complex64::new(1.0, 0.0),
//!     Complex64::new(-2.0, 0.5),
//!     Complex64::new(0.0, 3.0),
//! ]).unwrap();
//! let init = driver::initial_guesses(&p);
//! let trace = driver::run(MethodSpec::Householder(2), &p, &init, &SolveConfig::default(), None).unwrap();
//! assert_eq!(trace.termination, Termination::ResidualMet);
//! ```

pub mod driver;
mod error;
pub mod oracle;
pub mod poly;
pub mod selftest;
pub mod step;
pub mod symmetric;

pub use driver::{IterationTrace, OrderEstimate, SolveConfig, Termination};
pub use error::{Error, Result};
pub use poly::Polynomial;
pub use step::{CoordFlag, MethodSpec, StepOutcome, StepParams};

pub use num_complex::Complex64;

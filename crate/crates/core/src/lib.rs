//! Expected meeting time of two independent random walks on regular graphs.
//!
//! Two walkers step simultaneously on a d-regular graph and meet when they
//! occupy the same vertex after a step. This crate computes the expectation
//! of that meeting time by four mutually validating routes:
//!
//! * **spectral** — sum of reciprocals of the nonzero eigenvalues of the
//!   walk Laplacian `L = I - P P^T` ([`meeting::spectral_meeting_time`]);
//! * **absorbing** — exact expectation on the product chain `Q = P (x) P`
//!   with the diagonal states absorbing ([`meeting::absorbing_meeting_time`]);
//! * **relative** — hitting time of the zero state of the relative-position
//!   chain `M = P P^T`, valid on circles and tori
//!   ([`meeting::relative_meeting_time`]);
//! * **Monte Carlo** — seeded simulation ([`montecarlo::simulate_meeting`]).
//!
//! On circles and tori the first three agree to solver precision. On
//! arbitrary regular graphs the spectral sum is an experimental conjecture;
//! [`analysis::conjecture1_experiment`] measures how close it lands. The
//! [`analysis`] module also verifies the growth orders (`N^2` for circles,
//! `N^2 log N` for tori) through circulant closed forms ([`circulant`]),
//! with no dense eigensolve involved.
//!
//! All numeric code is generic over the scalar ([`Scalar`]: `f32` or `f64`);
//! the aliases below fix `f64`, which every shipped tolerance targets.

pub mod analysis;
pub mod circulant;
pub mod error;
pub mod graphs;
pub mod linalg;
pub mod meeting;
pub mod montecarlo;
mod scalar;
pub mod tol;
pub mod walks;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Dense `f64` matrix.
pub type Matrix = linalg::DenseMatrix<f64>;
/// Dense `f32` matrix.
pub type Matrix32 = linalg::DenseMatrix<f32>;
/// `f64` eigendecomposition.
pub type EigenDecomposition = linalg::Spectrum<f64>;
/// `f64` walk specification.
pub type Walk = walks::WalkSpec<f64>;
/// `f64` meeting-time estimate.
pub type Estimate = meeting::MeetingEstimate<f64>;

//! Exact sum-over-paths engine for Clifford circuits on odd-prime-dimensional
//! systems, together with the discrete phase-space layer that certifies the
//! path-sum phase as a classical action.
//!
//! The crate is organized around two independently built routes to the same
//! quantities:
//!
//! * a quantum route: exact cyclotomic path sums ([`pathsum`]) checked
//!   against a dense matrix oracle ([`densesim`]);
//! * a classical route: affine symplectomorphisms ([`phasespace`]) whose
//!   generating polynomials, reconstructed by formal integration
//!   ([`algebra::forms`]), assemble into an action functional ([`action`]).
//!
//! [`verify`] hosts the campaigns that mechanically compare the two routes,
//! and [`cv`] carries the continuous-variable mirror of the whole story in
//! exact rational arithmetic.

pub mod action;
pub mod algebra;
pub mod circuit;
pub mod cv;
pub mod densesim;
pub mod pathsum;
pub mod phasespace;
pub mod random;
pub mod verify;

pub use algebra::{chi, CyclotomicAmplitude, Fp, MatFp, Polynomial, Var};
pub use circuit::{CircuitIr, Gate};
pub use densesim::DenseMatrix;
pub use phasespace::AffineSymplectomorphism;

//! Exact verification toolkit for the jet surfaces of binary cubic forms.
//!
//! A binary cubic `phi(t, s) = a t^3 + b t^2 s + c t s^2 + d s^3` gives rise to
//! the two-dimensional surface `(t, s, phi_t, phi_s, phi)` in `R^5`. This crate
//! provides exact tools around that surface:
//!
//! * [`cubic`] — exact coefficient algebra: non-degeneracy rank, partial
//!   derivatives, the lattice embeddings of the surface and its
//!   second-derivative variant, and the graded shift decomposition of
//!   `phi(t + dt, s + ds)`.
//! * [`lattice`] — exact counting of integer solutions of the five-equation
//!   additive system attached to the surface, via sparse representation-table
//!   convolution, with an independent brute-force oracle and a cross-check
//!   between the two surface variants.
//! * [`transversality`] — exact-rational verification of the Brascamp-Lieb
//!   transversality inequalities for the first- and second-order tangent
//!   spaces, plus a witness search that falsifies them on degenerate forms.
//! * [`exponents`] — exact rational evaluation of the interpolation exponents,
//!   weight sequences, closed-form series and the resulting decoupling
//!   exponent, together with the solution-count exponent arithmetic.
//! * [`fit`] / [`experiment`] — log-log growth-exponent fitting and the
//!   scaling-experiment driver used by the CLI.
//!
//! All counting and linear algebra is exact (64-bit integers with checked
//! promotion to big integers, and arbitrary-precision rationals). Floating
//! point appears only in the growth-exponent fit, which is approximate by
//! nature.
//!
//! With the default `parallel` feature the counting and sampling inner loops
//! run on rayon; results are bit-identical to the sequential fallback.

pub mod cubic;
pub mod exponents;
pub mod experiment;
pub mod fit;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod rat;
pub mod transversality;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

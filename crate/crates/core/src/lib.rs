//! Constructive Agler decompositions of matrix polynomials on the polydisk.
//!
//! The crate works with matrix-valued polynomials `P(z)` in `N` complex
//! variables and the identity
//!
//! ```text
//! I - P(z)P(w)* = R + P0(z)P0(w)* + sum_i (1 - z_i conj(w_i)) P_i(z)P_i(w)*
//! ```
//!
//! which certifies `||P(T)|| <= sqrt(1 - min_eig(R))` for every commuting
//! tuple of strict contractions `T`. The pieces:
//!
//! * [`poly`] / [`kernel`] — sparse arithmetic for matrix polynomials and
//!   Hermitian kernel polynomials in `(z, conj(w))`.
//! * [`factorization`] — expansion of structured factorizations
//!   `C0 D1(z) C1 ... Dl(z) Cl` and the inductive construction of the
//!   decomposition above, plus symbolic verification.
//! * [`approx`] — Cesaro/Fejer approximants and their norm checks.
//! * [`tuple`] — commuting-tuple evaluation via Kronecker products and
//!   randomized lower-bound search for the u-norm.
//! * [`kernelcheck`] — pointwise positive-definiteness certification and
//!   pivoted-Cholesky realizations of sampled kernels.
//! * [`gramfit`] — degree-bounded Gram-matrix feasibility search by
//!   alternating projections with Dykstra correction.
//! * [`json`] — the stable JSON schemas used by the CLI.
//!
//! With the default `parallel` feature the data-parallel inner loops
//! (randomized suites, grid sups, search restarts) run on rayon; disabling
//! it yields a dependency-free sequential build with identical results.

pub mod approx;
pub mod cmatrix;
pub mod error;
pub mod exec;
pub mod factorization;
pub mod gramfit;
pub mod json;
pub mod kernel;
pub mod kernelcheck;
pub mod multiindex;
pub mod poly;
pub mod sample;
pub mod tuple;

pub use cmatrix::CMatrix;
pub use error::Error;
pub use kernel::HermitianKernelPoly;
pub use multiindex::MultiIndex;
pub use poly::MatrixPoly;

/// Complex scalar used throughout: double-precision real/imag parts.
pub type C64 = num_complex::Complex<f64>;

//! Numerical laboratory for the asymmetric quantum Rabi model (AQRM).
//!
//! The AQRM Hamiltonian `a†a + Δσ_z + g(a + a†)σ_x + εσ_x` (with ω = 1) has a
//! partition function given by an explicit uniformly convergent series of
//! integrals over ordered simplices. This crate evaluates that series, builds
//! Fock-space truncations of the Hamiltonian, and computes the Hurwitz-type
//! spectral zeta function `Σ_j (λ_j + τ)^{-s}` by two independent routes
//! (eigenvalue sums and the Mellin transform of the partition function),
//! together with the closed-form limits the model satisfies as g → 0, Δ → 0
//! and g → ∞.
//!
//! Module map:
//! * [`specfun`] — Gamma, Hurwitz/Riemann zeta, the alternating Dirichlet
//!   L-series, Bernoulli numbers and polynomials (exact rationals).
//! * [`linalg`] — symmetric eigensolvers (dense, banded, tridiagonal).
//! * [`quad`] — Gauss–Legendre / Gauss–Hermite rules and composite panels.
//! * [`fock`] — Hamiltonian truncations, adaptive spectra, spectral curves.
//! * [`simplex`] — sampling and quadrature over ordered simplices.
//! * [`partition`] — the partition-function series, parity decomposition and
//!   the oscillator heat-kernel term.
//! * [`jfun`] — the simplex exponential integrals J_λ(t) and their
//!   integration-by-parts recursion.
//! * [`zeta`] — spectral zeta evaluation, limit reports, Rabi–Bernoulli
//!   polynomials and special values.
//! * [`serial`] — canonical JSON/CSV emitters and strict parsers.

pub mod error;
pub mod fock;
pub mod jfun;
pub mod linalg;
pub mod parallel;
pub mod partition;
pub mod quad;
pub mod rational;
pub mod serial;
pub mod simplex;
pub mod specfun;
pub mod zeta;

pub use error::CoreError;
pub use fock::ModelParams;

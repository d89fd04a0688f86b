//! Energy-constrained Haar-random states and the eigenstate condensation
//! transition.
//!
//! The crate is organised bottom-up:
//!
//! * [`statespace`] holds state vectors, Hermitian operators in several
//!   representations, Haar sampling and spectral moments.
//! * [`models`] builds the Hamiltonian catalog (Ising chains and lattices,
//!   Heisenberg ring, Gaussian β-ensembles).
//! * [`freefermion`] reduces the open transverse-field Ising chain to free
//!   fermions and evaluates resolvent sums by stable quadrature.
//! * [`sampler`] runs nested sampling with Galilean Monte Carlo moves on the
//!   constrained state manifold.
//! * [`ensemble`] evaluates the typical-weight ensemble `p ∝ 1/(1 + βE)`.
//! * [`critical`] estimates critical energies by exact sums, stochastic
//!   traces and random-matrix ensemble statistics.

pub mod critical;
pub mod ensemble;
mod error;
pub mod freefermion;
pub mod io;
pub mod linalg;
pub mod models;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod statespace;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

//! Numerical laboratory for spectra of heavy-tailed random Laplacian matrices.
//!
//! The central object is the random Laplacian `L_n = A_n - D_n`, where `A_n`
//! is a real symmetric random matrix with zero diagonal and `(D_n)_ii =
//! sum_j (A_n)_ij`. Row sums of `A_n` converge, for the ensembles sampled
//! here, to infinitely divisible laws whose Levy measure `m` has no Gaussian
//! part and no atom at zero: sparse graphs give compound Poisson limits,
//! heavy-tailed entries give stable limits. The empirical spectral measure of
//! `L_n` then converges to a deterministic limit depending only on `m`.
//!
//! The crate computes that limit twice, by unrelated routes, and checks the
//! two against each other:
//!
//! * **Matrix route** ([`ensemble`], [`eigen`]): sample `L_n`, reduce to
//!   tridiagonal form by Householder reflections, extract all eigenvalues by
//!   the implicit-shift QL iteration, and form the empirical spectral measure
//!   and its Stieltjes transform.
//! * **Recursion route** ([`tree`], [`rde`]): the local weak limit of the
//!   graph underlying `L_n` is a Poisson-weighted random tree carrying
//!   compensating loop weights, and the root resolvent of that tree satisfies
//!   a recursive distributional equation. Population dynamics solves the
//!   recursion directly; truncated-tree Monte Carlo samples the root
//!   resolvent without ever iterating the recursion, giving an independent
//!   oracle for the same quantity.
//!
//! [`measure`] defines the Levy measures and their summability checks,
//! [`point_process`] samples the associated Poisson point processes,
//! [`estimate`] turns spectra and Stieltjes data into comparable measures and
//! distances, and [`cli`] wires everything into reproducible experiments with
//! deterministic, worker-count-independent output.

pub mod cli;
pub mod eigen;
pub mod ensemble;
pub mod error;
pub mod estimate;
pub mod measure;
pub mod point_process;
pub mod quad;
pub mod rde;
pub mod stream;
pub mod tree;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

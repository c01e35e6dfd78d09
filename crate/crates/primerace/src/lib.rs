//! Prime number race densities δ_{q;a₁,…,a_r}.
//!
//! Under GRH and LI, the normalized prime-counting error vector
//! E(x;q,a) = (log x/√x)(φ(q)π(x;q,a) − π(x)) has a limiting distribution:
//! the law of a random vector built from the nontrivial zeros of the
//! Dirichlet L-functions mod q, with one uniform phase per (character, zero
//! ordinate) pair. The density δ_{q;a₁,…,a_r} of the set of x where
//! π(x;q,a₁) > ⋯ > π(x;q,a_r) is the measure of the ordering cone under
//! that law.
//!
//! This crate computes the densities by four mutually cross-checking
//! engines (Monte Carlo over the random model, characteristic-function
//! inversion for r = 2, Gaussian ordering probability, asymptotic
//! formulas), driven by zero ordinates it computes itself via a
//! Hurwitz-zeta evaluation of L(1/2 + it, χ) — and validates the model
//! against empirical races over actual primes via a segmented sieve.

pub mod characters;
pub mod config;
pub mod density;
pub mod empirical;
pub mod error;
pub mod lzeros;
pub mod numerics;
pub mod racemodel;
pub mod report;
pub mod spectrum;

pub use error::RaceError;

pub type Result<T> = std::result::Result<T, RaceError>;

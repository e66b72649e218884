//! Exact-arithmetic toolkit for tridiagonal pairs of linear transformations.
//!
//! A tridiagonal pair is a pair of diagonalizable operators A, A* on a
//! finite-dimensional vector space, each acting block-tridiagonally on the
//! other's ordered eigenspaces, admitting no common proper invariant
//! subspace. This crate verifies the defining conditions over exact fields
//! (rationals, GF(p), quadratic extension towers), builds the associated
//! systems and parameter arrays, recognizes q-Racah eigenvalue sequences,
//! constructs split-basis candidates, and stress-tests the scalar-action
//! identities behind them. Everything is exact: no floats, no tolerances.
//!
//! Modules, bottom-up:
//! - [`field`]: scalars: rationals, prime fields, quadratic towers.
//! - [`linalg`]: dense exact matrices, kernels, eigenspaces, spin-up, and
//!   the Norton-style irreducibility test with its exhaustive oracle.
//! - [`tdsystem`]: tridiagonal pair verification and system assembly.
//! - [`paramarray`]: tau/eta polynomials, split sequences, parameter arrays
//!   and the classification conditions.
//! - [`qracah`]: q-Racah sequence generation and recognition.
//! - [`synthesis`]: split-basis candidate construction and the scalar-action
//!   (mu) witness machinery.
//! - [`cli`]: the job layer behind the `tdpkit` binary: JSON reports,
//!   deterministic corpus generation.

pub mod cli;
pub mod field;
pub mod linalg;
pub mod paramarray;
pub mod qracah;
pub mod synthesis;
pub mod tdsystem;

//! Approximate equilibria for linear congestion games.
//!
//! The crate covers both game classes with one set of tools:
//!
//! * [`atomic`] — finitely many players over facilities with latencies
//!   `a x + b`: cost accounting, multiplicative `eps`-equilibrium
//!   verification, the `eps`-potential, exhaustive solvers, and dynamics.
//! * [`nonatomic`] — infinitesimal traffic split across strategies:
//!   `eps`-equilibrium flows, the quadratic `eps`-potential, and the
//!   equilibrium/variational inequalities.
//! * [`nonatomic::solvers`] — conditional-gradient minimization of either
//!   the potential (yielding equilibria) or the social cost (yielding
//!   optima), with duality-gap certificates.
//! * [`network`] — directed graphs compiled into strategy-set games by
//!   simple-path enumeration.
//! * [`bounds`] — closed-form anarchy/stability bounds as functions of
//!   `eps`, and checkers for the inequalities behind them.
//! * [`instances`] — generators for the tight lower-bound families, each
//!   self-verifying at generation time.
//! * [`report`] — the reproduction suite that measures every headline value
//!   against its closed form.
//!
//! Everything is deterministic: identical inputs (and seeds) produce
//! identical outputs, including under the parallel enumeration paths.

// validation guards are written `!(x >= 0.0)` on purpose: NaN fails the
// comparison and is rejected, which `x < 0.0` would not do
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod bounds;
mod error;
pub mod instances;
pub mod network;
pub mod nonatomic;
pub mod random;
mod rational;
pub mod report;

pub use error::{Error, Result};

/// Verifier equality tolerance: a profile or flow passes at `eps` when its
/// measured value does not exceed `eps` by more than this.
pub const EQ_TOL: f64 = 1e-9;

/// Minimal potential decrease for a descent step to count as an improvement.
pub const DESCENT_TOL: f64 = 1e-12;

/// Relative margin a best-response move must clear, so float noise cannot
/// make the dynamics oscillate.
pub const BR_MARGIN: f64 = 1e-12;

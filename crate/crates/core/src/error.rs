use thiserror::Error;

/// Errors produced by game validation, generators, and solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A game failed structural validation (bad ids, empty strategies, negative latencies).
    #[error("invalid game: {0}")]
    InvalidGame(String),

    /// A profile does not match the game it is evaluated against.
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// A flow is structurally wrong for its game (wrong arity, negative weight).
    #[error("invalid flow: {0}")]
    InvalidFlow(String),

    /// A flow violates the per-commodity rate constraint.
    #[error("infeasible flow: commodity {commodity} carries {actual} but its rate is {rate}")]
    InfeasibleFlow {
        commodity: usize,
        rate: f64,
        actual: f64,
    },

    /// Exhaustive enumeration was refused because the profile space is too large.
    #[error("profile space too large: {profiles} profiles exceed cap {cap}")]
    EnumerationCap { profiles: u128, cap: u128 },

    /// Path enumeration hit its cap before finishing.
    #[error("more than {cap} simple paths from {from_node} to {to_node}")]
    PathCap {
        from_node: String,
        to_node: String,
        cap: usize,
    },

    /// A commodity has no route at all.
    #[error("no path from {from_node} to {to_node}")]
    NoPath { from_node: String, to_node: String },

    /// An argument is outside the domain a formula is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// An instance generator could not realize the requested parameters.
    #[error("construction error: {0}")]
    Construction(String),

    /// An iterative solver ran out of budget before reaching its tolerance.
    #[error("solver did not converge: duality gap {gap} after {iterations} iterations")]
    Nonconvergence { gap: f64, iterations: usize },

    /// An internal invariant failed (a bug, not a user error).
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

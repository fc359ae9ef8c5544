//! Model checking for freezing automata networks.
//!
//! A freezing automata network is a finite set of nodes on an undirected
//! connected graph. Each node holds a state from a finite partially ordered
//! alphabet and updates through a local rule that reads the closed
//! neighborhood. Along every orbit each node's state sequence must be
//! non-decreasing in the partial order, so every node changes state at most
//! `|Q| - 1` times.
//!
//! The central question answered here: given a network, a horizon `t`, and a
//! per-node set of admissible state sequences, does some orbit of length
//! `t + 1` satisfy every node's constraint? The [`solver`] module answers
//! this by dynamic programming over a tree decomposition of the interaction
//! graph, with cost driven by the decomposition width rather than the node
//! count. The [`problems`] module reduces prediction, predecessor search,
//! nilpotency, and asynchronous reachability to that single question.
//! [`oracle`] holds independent brute-force implementations used to
//! cross-check the solver, and [`gadgets`] builds the hard instances that
//! witness lower bounds: dominating-set encodings on grids and circuit
//! embeddings over bramble-routed host graphs.

pub mod core;
pub mod gadgets;
pub mod oracle;
pub mod problems;
pub mod solver;
pub mod traces;
pub mod treedecomp;
pub mod validity;

/// Errors shared by every module in the crate.
///
/// Budget errors carry what ran out and how much would have been needed, so
/// callers can distinguish "refused to start exponential work" from a wrong
/// input. `Internal` marks invariant violations inside the solver or a
/// gadget schedule; these are bugs, never user errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input failed a structural or semantic precondition.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Work estimate exceeded a configured resource cap.
    #[error("{what}: needed {needed}, cap {cap}")]
    Budget { what: String, needed: u64, cap: u64 },

    /// An internal invariant broke; indicates a bug in this crate.
    #[error("internal error: {0}")]
    Internal(String),

    /// Operation is not defined for this input variant.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for a validation failure with a formatted message.
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Shorthand for an internal invariant violation.
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

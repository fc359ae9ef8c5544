//! Hardness gadget constructions.
//!
//! Each submodule builds a family of freezing networks that decides a
//! classical hard problem, so that the surrounding solvers and oracles
//! can be exercised against instances whose answers are known from first
//! principles. The shared plumbing lives in [`bramble`], [`route`] and
//! [`channel`]: a perfect bramble pins down well-connected territories of
//! a host graph, the router embeds a bounded-degree digraph into them
//! with bounded congestion, and the channel layout turns the routed
//! embedding into per-vertex value slots with a common tagged alphabet.
//!
//! The circuit gadgets all share that slot shape. [`prediction`]
//! evaluates a monotone alternating circuit by latching values along the
//! routed wire paths, [`predecessor`] makes the satisfying evaluations of
//! a circuit the sole predecessors of a distinguished configuration,
//! [`asyncnet`] turns update order under asynchronous schedules into the
//! choice of an input assignment, and [`nilpotent`] gives a circuit a
//! second fixed point exactly when it is satisfiable. [`domset`] stands
//! apart: it encodes dominating sets of an arbitrary graph on a grid,
//! racing signal waves against a clock to audit the chosen marking.

pub mod asyncnet;
pub mod bramble;
pub mod channel;
pub mod circuit;
pub mod domset;
pub mod nilpotent;
pub mod prediction;
pub mod predecessor;
pub mod route;

pub use asyncnet::{circuit_async_gadget, AsyncGadget};
pub use bramble::{grid_bramble, validate_bramble, Bramble, BrambleViolation};
pub use circuit::{CircuitDag, GateKind};
pub use domset::{dominating_set_gadget, DominatingGadget};
pub use nilpotent::{sat_nilpotency_gadget, NilpotencyGadget};
pub use prediction::{routed_prediction_gadget, PredictionGadget};
pub use predecessor::{circuit_predecessor_gadget, PredecessorGadget};
pub use route::{route, square_coloring, Digraph, RoutedEmbedding};

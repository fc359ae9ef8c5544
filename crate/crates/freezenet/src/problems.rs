//! The four canonical questions about a freezing network, each phrased as
//! an orbit specification and answered by the decomposition solver.
//!
//! Prediction pins every node's starting state and asks about one node's
//! trace. Predecessor pins every node's final state. Nilpotency asks, node
//! by node, which states remain reachable once every orbit has settled;
//! the network is nilpotent exactly when each node has a single such
//! state. Asynchronous reachability lifts the network so each node may
//! stall, then pins both endpoints.
//!
//! Nilpotency and reachability need a horizon long enough that settling is
//! guaranteed. In a deterministic freezing network every step either
//! raises some node or repeats forever, so orbits are fixed after
//! `n * max_changes` steps; asynchronous runs reach whatever they reach
//! within that many non-stalling steps, and stalls pad the rest. That
//! bound is far below the generic worst-case orbit length
//! ([`crate::core::max_orbit_length`]) and keeps the sweeps tractable.

use std::collections::BTreeMap;

use crate::core::{Config, Network, State};
use crate::solver::{check_spec, SolveOptions, SolverStats, Verdict};
use crate::traces::{enumerate_traces, RleTrace, Specification, TraceBounds, TraceSet,
    TRACE_ENUMERATION_CAP};
use crate::treedecomp::standard_decomposition;
use crate::{Error, Result};

/// Nodes whose rule is applied at each step of an asynchronous run.
pub type Schedule = Vec<Vec<usize>>;

/// Steps after which every orbit of a deterministic freezing network is
/// guaranteed to sit at its fixed point; at least 1.
pub fn settling_horizon(net: &Network) -> u32 {
    let steps = (net.n() as u64).saturating_mul(net.alphabet().max_changes() as u64);
    steps.clamp(1, u32::MAX as u64) as u32
}

fn check_config(net: &Network, c: &Config, what: &str) -> Result<()> {
    if c.len() != net.n() {
        return Err(Error::validation(format!(
            "{what} has {} entries, network has {} nodes",
            c.len(),
            net.n()
        )));
    }
    for (v, &s) in c.iter().enumerate() {
        if (s as usize) >= net.alphabet().len() {
            return Err(Error::validation(format!("{what} holds unknown state {s} at node {v}")));
        }
    }
    Ok(())
}

fn bounded_set(net: &Network, t: u32, bounds: TraceBounds) -> Result<TraceSet> {
    Ok(TraceSet::new(enumerate_traces(net.alphabet(), t, bounds, TRACE_ENUMERATION_CAP)?))
}

fn require_deterministic(net: &Network, what: &str) -> Result<()> {
    if !net.is_deterministic() {
        return Err(Error::validation(format!("{what} is defined for deterministic networks")));
    }
    Ok(())
}

/// Whether the deterministic orbit of `c` gives node `v` a trace inside
/// `spec_v`. Every trace of `spec_v` must start at `c[v]`.
///
/// All other nodes are pinned to their starting states only, so the unique
/// orbit of `c` is the one candidate and the verdict carries it as witness.
pub fn solve_prediction(
    net: &Network,
    c: &Config,
    v: usize,
    spec_v: TraceSet,
    t: u32,
    opts: &SolveOptions,
) -> Result<Verdict> {
    require_deterministic(net, "prediction")?;
    check_config(net, c, "initial configuration")?;
    if v >= net.n() {
        return Err(Error::validation(format!("node {v} out of range")));
    }
    for trace in spec_v.iter() {
        if trace.len() != t + 1 {
            return Err(Error::validation(format!(
                "node specification holds a trace of {} symbols, expected {}",
                trace.len(),
                t + 1
            )));
        }
        if trace.first_state() != c[v] {
            return Err(Error::validation(format!(
                "node specification must start at the pinned state {}",
                c[v]
            )));
        }
    }
    let mut nodes = BTreeMap::new();
    for u in 0..net.n() {
        if u != v {
            nodes.insert(u, bounded_set(net, t, TraceBounds { start: Some(c[u]), end: None })?);
        }
    }
    nodes.insert(v, spec_v);
    let spec = Specification::from_sets(t, nodes)?;
    let d = standard_decomposition(net.graph())?;
    check_spec(net, &spec, &d, opts)
}

/// Result of a predecessor search.
#[derive(Clone, Debug)]
pub struct PredecessorAnswer {
    /// A configuration whose orbit ends at the target, re-verified by
    /// simulation; present exactly when satisfiable.
    pub predecessor: Option<Config>,
    pub verdict: Verdict,
}

/// Finds a configuration mapped onto `c` after exactly `t` steps, if any.
pub fn solve_predecessor(
    net: &Network,
    c: &Config,
    t: u32,
    opts: &SolveOptions,
) -> Result<PredecessorAnswer> {
    require_deterministic(net, "predecessor search")?;
    check_config(net, c, "target configuration")?;
    let mut nodes = BTreeMap::new();
    for u in 0..net.n() {
        nodes.insert(u, bounded_set(net, t, TraceBounds { start: None, end: Some(c[u]) })?);
    }
    let spec = Specification::from_sets(t, nodes)?;
    let d = standard_decomposition(net.graph())?;
    let mut opts = *opts;
    opts.want_witness = true;
    let verdict = check_spec(net, &spec, &d, &opts)?;
    let predecessor = match &verdict.witness {
        None => None,
        Some(traces) => {
            let y: Config = (0..net.n()).map(|v| traces[&v].first_state()).collect();
            let orbit = net.orbit(&y, t)?;
            if orbit.last() != Some(c) {
                return Err(Error::internal(
                    "extracted predecessor does not simulate onto the target".to_string(),
                ));
            }
            Some(y)
        }
    };
    Ok(PredecessorAnswer { predecessor, verdict })
}

/// Result of a nilpotency check.
#[derive(Clone, Debug)]
pub struct NilpotencyAnswer {
    pub nilpotent: bool,
    /// Satisfiability queries issued before the answer was known.
    pub queries: u32,
    /// Aggregated over all queries; width and horizon from the shared
    /// sub-instances.
    pub stats: SolverStats,
}

/// Whether every configuration settles onto one common fixed point.
///
/// For each node, each state is probed with a specification demanding that
/// the node end there after the settling horizon; the reached-state set has
/// size one for every node exactly when a single fixed point attracts
/// everything. A second reachable end state anywhere refutes immediately.
pub fn solve_nilpotency(net: &Network, opts: &SolveOptions) -> Result<NilpotencyAnswer> {
    require_deterministic(net, "nilpotency")?;
    let t = settling_horizon(net);
    let d = standard_decomposition(net.graph())?;
    let mut sub = *opts;
    sub.want_witness = false;
    let mut stats = SolverStats::default();
    let mut queries = 0u32;
    for v in 0..net.n() {
        let mut reachable = 0u32;
        for q in 0..net.alphabet().len() as State {
            let mut nodes = BTreeMap::new();
            nodes.insert(v, bounded_set(net, t, TraceBounds { start: None, end: Some(q) })?);
            let spec = Specification::from_sets(t, nodes)?;
            let verdict = check_spec(net, &spec, &d, &sub)?;
            queries += 1;
            absorb(&mut stats, &verdict.stats);
            if verdict.satisfiable {
                reachable += 1;
                if reachable >= 2 {
                    return Ok(NilpotencyAnswer { nilpotent: false, queries, stats });
                }
            }
        }
        if reachable == 0 {
            return Err(Error::internal(format!(
                "node {v} reaches no state at all, which no orbit allows"
            )));
        }
    }
    Ok(NilpotencyAnswer { nilpotent: true, queries, stats })
}

/// Result of an asynchronous reachability check.
#[derive(Clone, Debug)]
pub struct AsyncAnswer {
    pub reachable: bool,
    /// Node sets to apply, in order, to drive `c0` to `c1`; replayed
    /// against the base rules before being returned. Stall-only steps are
    /// dropped, so reaching a configuration from itself yields `[]`.
    pub schedule: Option<Schedule>,
    /// Verdict of the underlying orbit question on the lifted network.
    pub verdict: Verdict,
}

/// Whether `c1` is reachable from `c0` when any subset of nodes may update
/// at each step.
pub fn solve_async_reachability(
    net: &Network,
    c0: &Config,
    c1: &Config,
    opts: &SolveOptions,
) -> Result<AsyncAnswer> {
    require_deterministic(net, "asynchronous reachability")?;
    check_config(net, c0, "start configuration")?;
    check_config(net, c1, "goal configuration")?;
    let lifted = net.async_lift()?;
    let t = settling_horizon(net);
    let mut nodes = BTreeMap::new();
    for u in 0..net.n() {
        nodes.insert(u, bounded_set(net, t, TraceBounds { start: Some(c0[u]), end: Some(c1[u]) })?);
    }
    let spec = Specification::from_sets(t, nodes)?;
    let d = standard_decomposition(net.graph())?;
    let mut sub = *opts;
    sub.want_witness = true;
    let verdict = check_spec(&lifted, &spec, &d, &sub)?;
    let schedule = match &verdict.witness {
        None => None,
        Some(traces) => Some(schedule_from_witness(net, c0, c1, traces, t)?),
    };
    Ok(AsyncAnswer { reachable: verdict.satisfiable, schedule, verdict })
}

/// Applies update sets in order, rewriting each listed node to its first
/// successor state while the rest stay put.
pub fn apply_schedule(net: &Network, c: &Config, schedule: &[Vec<usize>]) -> Result<Config> {
    check_config(net, c, "schedule start")?;
    let mut x = c.clone();
    let mut inputs: Vec<State> = Vec::new();
    for (i, step) in schedule.iter().enumerate() {
        let mut y = x.clone();
        for &v in step {
            if v >= net.n() {
                return Err(Error::validation(format!(
                    "schedule step {i} mentions node {v}, network has {} nodes",
                    net.n()
                )));
            }
            inputs.clear();
            inputs.extend(net.graph().closed_neighborhood(v).iter().map(|&u| x[u]));
            let image = net.successor_states(v, &inputs)?;
            y[v] = image[0];
        }
        x = y;
    }
    Ok(x)
}

/// Reads update sets off a lifted-orbit witness and replays them against
/// the base rules.
fn schedule_from_witness(
    net: &Network,
    c0: &Config,
    c1: &Config,
    traces: &BTreeMap<usize, RleTrace>,
    t: u32,
) -> Result<Schedule> {
    let mut schedule = Schedule::new();
    for s in 0..t {
        let mut applied = Vec::new();
        for v in 0..net.n() {
            let now = traces[&v].state_at(s);
            let next = traces[&v].state_at(s + 1);
            if now != next {
                applied.push(v);
            }
        }
        if !applied.is_empty() {
            schedule.push(applied);
        }
    }
    if apply_schedule(net, c0, &schedule)? != *c1 {
        return Err(Error::internal(
            "schedule replay does not land on the goal configuration".to_string(),
        ));
    }
    Ok(schedule)
}

fn absorb(total: &mut SolverStats, s: &SolverStats) {
    total.bags = s.bags;
    total.levels = s.levels;
    total.width = s.width;
    total.horizon = s.horizon;
    total.total_traces += s.total_traces;
    total.max_bag_traces = total.max_bag_traces.max(s.max_bag_traces);
    total.root_traces += s.root_traces;
    total.elapsed_ms += s.elapsed_ms;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{Alphabet, Graph};
    use crate::oracle::{
        brute_async_reach, brute_nilpotency, brute_predecessor, OracleBudget,
    };

    fn or_net(graph: Graph) -> Network {
        Network::from_closed_rule(graph, Alphabet::boolean(), |_, inputs| {
            vec![inputs.iter().copied().max().unwrap()]
        })
        .unwrap()
    }

    fn ends_at(net: &Network, t: u32, start: State, end: State) -> TraceSet {
        TraceSet::new(
            enumerate_traces(
                net.alphabet(),
                t,
                TraceBounds { start: Some(start), end: Some(end) },
                10_000,
            )
            .unwrap(),
        )
    }

    #[test]
    fn prediction_follows_the_orbit() {
        let net = or_net(Graph::path(3));
        let opts = SolveOptions::default();
        let c = vec![1, 0, 0];
        // The 1 spreads along the path and arrives at node 2 by step 2.
        let sat = solve_prediction(&net, &c, 2, ends_at(&net, 2, 0, 1), 2, &opts).unwrap();
        assert!(sat.satisfiable);
        let unsat = solve_prediction(&net, &c, 2, ends_at(&net, 2, 0, 0), 2, &opts).unwrap();
        assert!(!unsat.satisfiable);
        // Direct simulation must agree with both verdicts.
        let orbit = net.orbit(&c, 2).unwrap();
        assert_eq!(orbit.last().unwrap()[2], 1);
    }

    #[test]
    fn prediction_rejects_mismatched_starts() {
        let net = or_net(Graph::path(2));
        let spec_v = ends_at(&net, 2, 1, 1);
        let err = solve_prediction(&net, &vec![0, 0], 0, spec_v, 2, &SolveOptions::default());
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn predecessor_matches_brute_force() {
        let net = or_net(Graph::path(2));
        let opts = SolveOptions::default();
        let budget = OracleBudget::default();
        let yes = solve_predecessor(&net, &vec![1, 1], 1, &opts).unwrap();
        assert!(yes.verdict.satisfiable);
        let y = yes.predecessor.unwrap();
        assert_eq!(net.orbit(&y, 1).unwrap().last().unwrap(), &vec![1, 1]);
        assert!(brute_predecessor(&net, &vec![1, 1], 1, &budget).unwrap().is_some());

        let no = solve_predecessor(&net, &vec![1, 0], 1, &opts).unwrap();
        assert!(!no.verdict.satisfiable);
        assert!(no.predecessor.is_none());
        assert!(brute_predecessor(&net, &vec![1, 0], 1, &budget).unwrap().is_none());
    }

    #[test]
    fn nilpotency_pinned_cases() {
        let opts = SolveOptions::default();
        let budget = OracleBudget::default();
        let constant =
            Network::from_closed_rule(Graph::path(2), Alphabet::boolean(), |_, _| vec![1]).unwrap();
        assert!(solve_nilpotency(&constant, &opts).unwrap().nilpotent);
        assert!(brute_nilpotency(&constant, &budget).unwrap());

        let identity = Network::from_closed_rule(Graph::path(2), Alphabet::boolean(), |v, i| {
            vec![i[v]]
        })
        .unwrap();
        assert!(!solve_nilpotency(&identity, &opts).unwrap().nilpotent);

        assert!(!solve_nilpotency(&or_net(Graph::path(2)), &opts).unwrap().nilpotent);
        assert!(!solve_nilpotency(&or_net(Graph::cycle(3).unwrap()), &opts).unwrap().nilpotent);
    }

    #[test]
    fn async_reachability_matches_brute_force() {
        let net = or_net(Graph::path(2));
        let opts = SolveOptions::default();
        let budget = OracleBudget::default();

        let yes = solve_async_reachability(&net, &vec![1, 0], &vec![1, 1], &opts).unwrap();
        assert!(yes.reachable);
        assert!(!yes.schedule.unwrap().is_empty());
        assert!(brute_async_reach(&net, &vec![1, 0], &vec![1, 1], &budget).unwrap());

        let no = solve_async_reachability(&net, &vec![0, 0], &vec![1, 1], &opts).unwrap();
        assert!(!no.reachable);
        assert!(no.schedule.is_none());
        assert!(!brute_async_reach(&net, &vec![0, 0], &vec![1, 1], &budget).unwrap());
    }

    #[test]
    fn async_self_reachability_is_an_empty_schedule() {
        let net = or_net(Graph::path(2));
        let answer =
            solve_async_reachability(&net, &vec![1, 0], &vec![1, 0], &SolveOptions::default())
                .unwrap();
        assert!(answer.reachable);
        assert_eq!(answer.schedule.unwrap(), Schedule::new());
    }
}

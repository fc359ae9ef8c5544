//! Brute-force reference implementations.
//!
//! Everything here enumerates configuration or orbit spaces directly, with
//! no sharing of code or ideas with the decomposition solver, so the two
//! can check each other. All oracles are single threaded and deterministic:
//! given the same inputs and budget they return the same answer or the same
//! budget error. Exponential work is estimated before it starts; a search
//! that would exceed the budget refuses instead of hanging.

use std::collections::{HashSet, VecDeque};
use std::time::{Duration, Instant};

use crate::core::{Config, Graph, Network, State};
use crate::traces::{RleTrace, Specification};
use crate::{Error, Result};

/// Resource limits for brute-force searches.
///
/// `max_configs` bounds enumerated configuration spaces, `max_steps` bounds
/// total search node expansions. The optional wall-clock timeout is off by
/// default because it makes outcomes machine dependent; when set it is
/// checked coarsely during the search.
#[derive(Clone, Copy, Debug)]
pub struct OracleBudget {
    pub max_configs: u64,
    pub max_steps: u64,
    pub timeout: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_configs: 1_000_000, max_steps: 20_000_000, timeout: None }
    }
}

struct Meter {
    steps: u64,
    max_steps: u64,
    deadline: Option<Instant>,
}

impl Meter {
    fn new(budget: &OracleBudget) -> Meter {
        Meter {
            steps: 0,
            max_steps: budget.max_steps,
            deadline: budget.timeout.map(|d| Instant::now() + d),
        }
    }

    fn charge(&mut self, what: &str) -> Result<()> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(Error::Budget {
                what: format!("{what} search steps"),
                needed: self.steps,
                cap: self.max_steps,
            });
        }
        if self.steps % 4096 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() > deadline {
                    return Err(Error::Budget {
                        what: format!("{what} wall clock"),
                        needed: self.steps,
                        cap: self.max_steps,
                    });
                }
            }
        }
        Ok(())
    }
}

fn config_space(net: &Network, budget: &OracleBudget, what: &str) -> Result<u64> {
    let count = (net.alphabet().len() as u64)
        .checked_pow(net.n() as u32)
        .unwrap_or(u64::MAX);
    if count > budget.max_configs {
        return Err(Error::Budget {
            what: format!("{what} configuration space"),
            needed: count,
            cap: budget.max_configs,
        });
    }
    Ok(count)
}

fn first_config(net: &Network) -> Config {
    vec![0 as State; net.n()]
}

fn next_config(c: &mut Config, q: usize) -> bool {
    for s in c.iter_mut().rev() {
        if (*s as usize) + 1 < q {
            *s += 1;
            return true;
        }
        *s = 0;
    }
    false
}

// ---------------------------------------------------------------------------
// Orbit search against a specification
// ---------------------------------------------------------------------------

/// Per-node admissibility tracking along a growing orbit.
struct PrefixTracker<'a> {
    spec: &'a Specification,
    constrained: Vec<usize>,
    /// Run-length prefixes of constrained nodes, parallel to `constrained`.
    prefixes: Vec<Vec<(State, u32)>>,
}

impl<'a> PrefixTracker<'a> {
    fn new(spec: &'a Specification) -> PrefixTracker<'a> {
        let constrained: Vec<usize> = spec.constrained_nodes().collect();
        PrefixTracker { spec, prefixes: vec![Vec::new(); constrained.len()], constrained }
    }

    /// Appends one configuration; false when some prefix became infeasible.
    fn push(&mut self, c: &Config) -> bool {
        let mut ok = true;
        for (i, &v) in self.constrained.iter().enumerate() {
            let runs = &mut self.prefixes[i];
            match runs.last_mut() {
                Some((s, len)) if *s == c[v] => *len += 1,
                _ => runs.push((c[v], 1)),
            }
            if !self.spec.prefix_feasible(v, runs) {
                ok = false;
            }
        }
        ok
    }

    fn pop(&mut self, c: &Config) {
        for (i, &v) in self.constrained.iter().enumerate() {
            let runs = &mut self.prefixes[i];
            let last = runs.last_mut().expect("pop matches push");
            debug_assert_eq!(last.0, c[v]);
            if last.1 == 1 {
                runs.pop();
            } else {
                last.1 -= 1;
            }
        }
    }

    /// Exact membership for every constrained node of a complete orbit.
    fn accepts(&self) -> bool {
        self.constrained.iter().enumerate().all(|(i, &v)| {
            self.spec
                .admits(v, &RleTrace::from_runs_unchecked(self.prefixes[i].clone()))
        })
    }
}

/// Whether some orbit of the network satisfies the specification, by direct
/// search over initial configurations and non-deterministic step choices.
pub fn brute_check_spec(
    net: &Network,
    spec: &Specification,
    budget: &OracleBudget,
) -> Result<bool> {
    config_space(net, budget, "orbit")?;
    let t = spec.horizon();
    let q = net.alphabet().len();
    let mut meter = Meter::new(budget);
    let mut c = first_config(net);
    loop {
        let mut tracker = PrefixTracker::new(spec);
        if tracker.push(&c) && orbit_dfs(net, spec, &c, 0, t, &mut tracker, &mut meter)? {
            return Ok(true);
        }
        if !next_config(&mut c, q) {
            return Ok(false);
        }
    }
}

fn orbit_dfs(
    net: &Network,
    spec: &Specification,
    c: &Config,
    s: u32,
    t: u32,
    tracker: &mut PrefixTracker,
    meter: &mut Meter,
) -> Result<bool> {
    meter.charge("orbit")?;
    if s == t {
        return Ok(tracker.accepts());
    }
    // Per-node successor options under the freezing discipline.
    let mut options: Vec<Vec<State>> = Vec::with_capacity(net.n());
    let mut buf = Vec::new();
    for v in 0..net.n() {
        buf.clear();
        buf.extend(net.graph().closed_neighborhood(v).iter().map(|&u| c[u]));
        options.push(net.successor_states(v, &buf)?);
    }
    let mut idx = vec![0usize; net.n()];
    loop {
        let next: Config = idx
            .iter()
            .enumerate()
            .map(|(v, &i)| options[v][i])
            .collect();
        let feasible = tracker.push(&next);
        if feasible && orbit_dfs(net, spec, &next, s + 1, t, tracker, meter)? {
            return Ok(true);
        }
        tracker.pop(&next);
        let mut v = net.n();
        loop {
            if v == 0 {
                return Ok(false);
            }
            v -= 1;
            if idx[v] + 1 < options[v].len() {
                idx[v] += 1;
                for d in idx.iter_mut().skip(v + 1) {
                    *d = 0;
                }
                break;
            }
            idx[v] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Nilpotency
// ---------------------------------------------------------------------------

/// Whether every configuration of a deterministic network reaches one
/// common fixed point.
pub fn brute_nilpotency(net: &Network, budget: &OracleBudget) -> Result<bool> {
    if !net.is_deterministic() {
        return Err(Error::validation("nilpotency search needs a deterministic network"));
    }
    config_space(net, budget, "nilpotency")?;
    let q = net.alphabet().len();
    // Freezing bounds convergence by total possible state raises.
    let max_iters = net.n() as u64 * net.alphabet().max_changes() as u64 + 1;
    let mut meter = Meter::new(budget);
    let mut fixed_point: Option<Config> = None;
    let mut c = first_config(net);
    loop {
        meter.charge("nilpotency")?;
        let mut cur = c.clone();
        let mut iters = 0u64;
        loop {
            let next = net.step_deterministic(&cur)?;
            if next == cur {
                break;
            }
            cur = next;
            iters += 1;
            if iters > max_iters {
                return Err(Error::internal(
                    "orbit did not reach a fixed point within the freezing bound".to_string(),
                ));
            }
        }
        match &fixed_point {
            None => fixed_point = Some(cur),
            Some(fp) if *fp != cur => return Ok(false),
            _ => {}
        }
        if !next_config(&mut c, q) {
            return Ok(true);
        }
    }
}

// ---------------------------------------------------------------------------
// Predecessor
// ---------------------------------------------------------------------------

/// Lexicographically least configuration whose deterministic orbit ends in
/// `c` after exactly `t` steps, if any.
pub fn brute_predecessor(
    net: &Network,
    c: &Config,
    t: u32,
    budget: &OracleBudget,
) -> Result<Option<Config>> {
    if !net.is_deterministic() {
        return Err(Error::validation("predecessor search needs a deterministic network"));
    }
    config_space(net, budget, "predecessor")?;
    let q = net.alphabet().len();
    let mut meter = Meter::new(budget);
    let mut y = first_config(net);
    loop {
        meter.charge("predecessor")?;
        let mut cur = y.clone();
        let mut hit = true;
        for _ in 0..t {
            cur = net.step_deterministic(&cur)?;
        }
        if cur != *c {
            hit = false;
        }
        if hit {
            return Ok(Some(y));
        }
        if !next_config(&mut y, q) {
            return Ok(None);
        }
    }
}

// ---------------------------------------------------------------------------
// Asynchronous reachability
// ---------------------------------------------------------------------------

/// Whether `c1` is reachable from `c0` when each step may apply the rule at
/// any subset of nodes. Breadth-first search over the lifted step relation.
pub fn brute_async_reach(
    net: &Network,
    c0: &Config,
    c1: &Config,
    budget: &OracleBudget,
) -> Result<bool> {
    config_space(net, budget, "asynchronous reachability")?;
    let lifted = net.async_lift()?;
    let mut meter = Meter::new(budget);
    let mut seen: HashSet<Config> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(c0.clone());
    queue.push_back(c0.clone());
    while let Some(c) = queue.pop_front() {
        meter.charge("asynchronous reachability")?;
        if c == *c1 {
            return Ok(true);
        }
        for next in lifted.successors(&c, budget.max_configs)? {
            if seen.len() as u64 >= budget.max_configs {
                return Err(Error::Budget {
                    what: "asynchronous reachability visited set".to_string(),
                    needed: seen.len() as u64 + 1,
                    cap: budget.max_configs,
                });
            }
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// Dominating set
// ---------------------------------------------------------------------------

/// Whether `g` has a dominating set of size at most `k`: a vertex set whose
/// closed neighborhoods cover the graph.
pub fn brute_dominating_set(g: &Graph, k: usize, budget: &OracleBudget) -> Result<bool> {
    if k == 0 {
        return Ok(false);
    }
    let n = g.n();
    let m = k.min(n);
    // A dominating set of size <= k extends to one of size exactly min(k, n).
    let mut subsets: u64 = 1;
    for i in 0..m {
        subsets = subsets.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    if subsets > budget.max_configs {
        return Err(Error::Budget {
            what: "dominating set subsets".to_string(),
            needed: subsets,
            cap: budget.max_configs,
        });
    }
    let mut meter = Meter::new(budget);
    let mut pick: Vec<usize> = (0..m).collect();
    loop {
        meter.charge("dominating set")?;
        let mut covered = vec![false; n];
        for &v in &pick {
            covered[v] = true;
            for &w in g.neighbors(v) {
                covered[w] = true;
            }
        }
        if covered.iter().all(|&c| c) {
            return Ok(true);
        }
        // Next k-combination in lexicographic order.
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(false);
            }
            i -= 1;
            if pick[i] + 1 <= n - (m - i) {
                pick[i] += 1;
                for j in i + 1..m {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::Alphabet;
    use crate::traces::{enumerate_traces, TraceBounds, TraceSet};
    use std::collections::BTreeMap;

    fn or_net(graph: Graph) -> Network {
        Network::from_closed_rule(graph, Alphabet::boolean(), |_, inputs| {
            vec![inputs.iter().copied().max().unwrap()]
        })
        .unwrap()
    }

    fn spec_with(
        net: &Network,
        t: u32,
        constraints: &[(usize, TraceBounds)],
    ) -> Specification {
        let mut nodes = BTreeMap::new();
        for &(v, bounds) in constraints {
            let traces = enumerate_traces(net.alphabet(), t, bounds, 10_000).unwrap();
            nodes.insert(v, TraceSet::new(traces));
        }
        Specification::from_sets(t, nodes).unwrap()
    }

    #[test]
    fn check_spec_or_path_reaches_one() {
        let net = or_net(Graph::path(3));
        let spec = spec_with(&net, 2, &[(2, TraceBounds { start: None, end: Some(1) })]);
        assert!(brute_check_spec(&net, &spec, &OracleBudget::default()).unwrap());
        // Forcing every node to start at 0 makes it impossible.
        let spec = spec_with(
            &net,
            2,
            &[
                (0, TraceBounds { start: Some(0), end: None }),
                (1, TraceBounds { start: Some(0), end: None }),
                (2, TraceBounds { start: Some(0), end: Some(1) }),
            ],
        );
        assert!(!brute_check_spec(&net, &spec, &OracleBudget::default()).unwrap());
    }

    #[test]
    fn nilpotency_pinned_cases() {
        let budget = OracleBudget::default();
        let constant = Network::from_closed_rule(Graph::path(2), Alphabet::boolean(), |_, _| {
            vec![1]
        })
        .unwrap();
        assert!(brute_nilpotency(&constant, &budget).unwrap());
        // Strict identity keeps every configuration fixed.
        let identity = Network::from_closed_rule(Graph::path(2), Alphabet::boolean(), |v, i| {
            vec![i[v]]
        })
        .unwrap();
        assert!(!brute_nilpotency(&identity, &budget).unwrap());
        assert!(!brute_nilpotency(&or_net(Graph::path(2)), &budget).unwrap());
        assert!(!brute_nilpotency(&or_net(Graph::cycle(3).unwrap()), &budget).unwrap());
    }

    #[test]
    fn predecessor_pinned_cases() {
        let net = or_net(Graph::path(2));
        let budget = OracleBudget::default();
        assert_eq!(
            brute_predecessor(&net, &vec![1, 1], 1, &budget).unwrap(),
            Some(vec![0, 1])
        );
        assert_eq!(brute_predecessor(&net, &vec![1, 0], 1, &budget).unwrap(), None);
    }

    #[test]
    fn async_reach_pinned_cases() {
        let net = or_net(Graph::path(2));
        let budget = OracleBudget::default();
        assert!(brute_async_reach(&net, &vec![1, 0], &vec![1, 1], &budget).unwrap());
        assert!(!brute_async_reach(&net, &vec![0, 0], &vec![1, 1], &budget).unwrap());
    }

    #[test]
    fn dominating_set_pinned_cases() {
        let budget = OracleBudget::default();
        assert!(brute_dominating_set(&Graph::complete(3), 1, &budget).unwrap());
        assert!(!brute_dominating_set(&Graph::path(4), 1, &budget).unwrap());
        assert!(brute_dominating_set(&Graph::path(4), 2, &budget).unwrap());
        assert!(brute_dominating_set(&Graph::star(5), 1, &budget).unwrap());
        assert!(!brute_dominating_set(&Graph::path(2), 0, &budget).unwrap());
    }

    #[test]
    fn budget_refuses_large_spaces() {
        let net = or_net(Graph::path(8));
        let spec = Specification::unconstrained(1);
        let tiny = OracleBudget { max_configs: 100, ..OracleBudget::default() };
        assert!(matches!(
            brute_check_spec(&net, &spec, &tiny),
            Err(Error::Budget { .. })
        ));
    }
}

//! Alphabets, interaction graphs, local rules, and network simulation.
//!
//! A network couples three things: an undirected graph, a finite alphabet
//! with an explicit partial order, and one local rule per node. Rules read
//! the closed neighborhood, always presented in ascending label order, and
//! return the non-empty set of allowed next states. The freezing discipline
//! is global: along any orbit a node may only move upward in the order, so
//! simulation helpers reject any rule output below the current state.
//!
//! Three rule backends cover the range of instances handled by this crate.
//! Dense tables give exact, serializable rules for small alphabets. Set
//! rules define the next state from the current state and the set of states
//! present in the closed neighborhood, independent of position and arity.
//! Closure-backed rules support gadget constructions whose alphabets are too
//! large to tabulate.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Index into an [`Alphabet`]; states are compared only through the order.
pub type State = u16;

/// Dense assignment of one state per node, indexed by node label.
pub type Config = Vec<State>;

/// Orbit prefix: `orbit[s]` is the configuration at time `s`.
pub type Orbit = Vec<Config>;

/// Default cap on the number of configurations produced by [`Network::successors`].
pub const SUCCESSOR_CAP: u64 = 1_000_000;

/// Largest dense rule table allowed for a single node.
const TABLE_ROW_CAP: u64 = 4_000_000;

// ---------------------------------------------------------------------------
// Bit matrix
// ---------------------------------------------------------------------------

/// Square bit matrix backing the reflexive transitive closure of the order.
#[derive(Clone, Debug, PartialEq, Eq)]
struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitMatrix { n, words, bits: vec![0; n * words] }
    }

    fn set(&mut self, r: usize, c: usize) {
        self.bits[r * self.words + c / 64] |= 1u64 << (c % 64);
    }

    fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    /// dst |= src, rows may coincide.
    fn or_row(&mut self, dst: usize, src: usize) {
        if dst == src {
            return;
        }
        let tmp: Vec<u64> = self.bits[src * self.words..(src + 1) * self.words].to_vec();
        for (w, s) in self.bits[dst * self.words..(dst + 1) * self.words]
            .iter_mut()
            .zip(tmp)
        {
            *w |= s;
        }
    }

    /// Column indices of set bits in row `r`, ascending.
    fn row_ones(&self, r: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for w in 0..self.words {
            let mut word = self.bits[r * self.words + w];
            while word != 0 {
                let b = word.trailing_zeros() as usize;
                out.push(w * 64 + b);
                word &= word - 1;
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Alphabet
// ---------------------------------------------------------------------------

/// Finite state alphabet with a partial order given by explicit pairs.
///
/// The order is stored as its reflexive transitive closure, so `leq` is a
/// constant-time bit lookup. Construction rejects duplicate names and any
/// pair set whose strict part contains a cycle, which is exactly the
/// antisymmetry requirement.
#[derive(Clone)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, State>,
    pairs: Vec<(State, State)>,
    leq: BitMatrix,
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Alphabet")
            .field("names", &self.names)
            .field("pairs", &self.pairs)
            .finish()
    }
}

impl Alphabet {
    /// Builds an alphabet from state names and `(lo, hi)` order pairs.
    ///
    /// Pairs may be any relation whose reflexive transitive closure is the
    /// intended order; covering pairs are enough.
    pub fn new(names: Vec<String>, order: &[(State, State)]) -> Result<Alphabet> {
        if names.is_empty() {
            return Err(Error::validation("alphabet must not be empty"));
        }
        if names.len() > State::MAX as usize {
            return Err(Error::validation(format!(
                "alphabet has {} states, limit is {}",
                names.len(),
                State::MAX
            )));
        }
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::validation("state names must be non-empty"));
            }
            if index.insert(name.clone(), i as State).is_some() {
                return Err(Error::validation(format!("duplicate state name {name:?}")));
            }
        }
        let n = names.len();
        let mut pairs: Vec<(State, State)> = Vec::new();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(lo, hi) in order {
            if lo as usize >= n || hi as usize >= n {
                return Err(Error::validation(format!(
                    "order pair ({lo}, {hi}) out of range for {n} states"
                )));
            }
            if lo == hi {
                continue;
            }
            if succ[lo as usize].contains(&(hi as usize)) {
                continue;
            }
            succ[lo as usize].push(hi as usize);
            indeg[hi as usize] += 1;
            pairs.push((lo, hi));
        }
        // Kahn ordering; a leftover node means the strict part has a cycle.
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            topo.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        if topo.len() != n {
            let stuck: Vec<&str> = (0..n)
                .filter(|&v| indeg[v] > 0)
                .map(|v| names[v].as_str())
                .collect();
            return Err(Error::validation(format!(
                "order is not antisymmetric, cycle through {:?}",
                stuck
            )));
        }
        let mut leq = BitMatrix::new(n);
        for &v in topo.iter().rev() {
            leq.set(v, v);
            for i in 0..succ[v].len() {
                let w = succ[v][i];
                leq.or_row(v, w);
            }
        }
        Ok(Alphabet { names, index, pairs, leq })
    }

    /// Alphabet from named order pairs.
    pub fn from_named(names: Vec<String>, order: &[(String, String)]) -> Result<Alphabet> {
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            index.insert(name.clone(), i as State);
        }
        let mut pairs = Vec::with_capacity(order.len());
        for (lo, hi) in order {
            let a = *index
                .get(lo)
                .ok_or_else(|| Error::validation(format!("order names unknown state {lo:?}")))?;
            let b = *index
                .get(hi)
                .ok_or_else(|| Error::validation(format!("order names unknown state {hi:?}")))?;
            pairs.push((a, b));
        }
        Alphabet::new(names, &pairs)
    }

    /// Totally ordered alphabet, first name lowest.
    pub fn linear(names: &[&str]) -> Result<Alphabet> {
        let pairs: Vec<(State, State)> =
            (1..names.len()).map(|i| ((i - 1) as State, i as State)).collect();
        Alphabet::new(names.iter().map(|s| s.to_string()).collect(), &pairs)
    }

    /// Two-state alphabet `0 < 1`.
    pub fn boolean() -> Alphabet {
        Alphabet::linear(&["0", "1"]).expect("static alphabet")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn name(&self, s: State) -> &str {
        &self.names[s as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Declared order pairs after deduplication, in declaration order.
    pub fn order_pairs(&self) -> &[(State, State)] {
        &self.pairs
    }

    pub fn state(&self, name: &str) -> Option<State> {
        self.index.get(name).copied()
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.names.len()).map(|i| i as State)
    }

    /// True when `a` is below or equal to `b` in the order.
    pub fn leq(&self, a: State, b: State) -> bool {
        self.leq.get(a as usize, b as usize)
    }

    /// States strictly above `a`, ascending.
    pub fn strictly_above(&self, a: State) -> Vec<State> {
        self.leq
            .row_ones(a as usize)
            .into_iter()
            .map(|b| b as State)
            .filter(|&b| b != a)
            .collect()
    }

    /// Length of the longest chain minus one; bounds state changes per node.
    pub fn max_changes(&self) -> usize {
        // Longest path in the closure DAG, linear pass over states by index
        // is wrong in general, so recurse over the strict order with memo.
        fn depth(alpha: &Alphabet, s: State, memo: &mut [Option<usize>]) -> usize {
            if let Some(d) = memo[s as usize] {
                return d;
            }
            let d = alpha
                .strictly_above(s)
                .into_iter()
                .map(|t| 1 + depth(alpha, t, memo))
                .max()
                .unwrap_or(0);
            memo[s as usize] = Some(d);
            d
        }
        let mut memo = vec![None; self.len()];
        self.states().map(|s| depth(self, s, &mut memo)).max().unwrap_or(0)
    }
}

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

/// Undirected simple graph on labels `0..n`.
///
/// Edges are normalized to `u < v`, deduplicated, and sorted. Neighbor lists
/// and closed neighborhoods are sorted ascending; rules receive closed
/// neighborhood states in exactly that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    closed: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::validation("graph needs at least one vertex"));
        }
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::validation(format!("self loop at vertex {u}")));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &norm {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let closed = (0..n)
            .map(|v| {
                let mut c = adj[v].clone();
                c.push(v);
                c.sort_unstable();
                c
            })
            .collect();
        Ok(Graph { n, edges: norm, adj, closed })
    }

    /// Path `0 - 1 - ... - n-1`.
    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::new(n, &edges).expect("path construction")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::validation("cycle needs at least 3 vertices"));
        }
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((n - 1, 0));
        Graph::new(n, &edges)
    }

    /// Complete graph.
    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges).expect("complete construction")
    }

    /// Star with center `0` and `n - 1` leaves.
    pub fn star(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        Graph::new(n, &edges).expect("star construction")
    }

    /// Grid with `rows * cols` vertices labeled row major.
    pub fn grid(rows: usize, cols: usize) -> Result<Graph> {
        if rows == 0 || cols == 0 {
            return Err(Error::validation("grid needs positive dimensions"));
        }
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Graph::new(rows * cols, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Neighborhood of `v` including `v`, ascending.
    pub fn closed_neighborhood(&self, v: usize) -> &[usize] {
        &self.closed[v]
    }

    /// Sorted union of closed neighborhoods over `set`.
    pub fn closed_neighborhood_of_set(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &v in set {
            out.extend_from_slice(&self.closed[v]);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Shortest path from `from` to `to`, lexicographically least among
    /// shortest ones, restricted to `allowed` vertices. Both endpoints must
    /// be allowed.
    pub fn shortest_path_within(
        &self,
        allowed: &[usize],
        from: usize,
        to: usize,
    ) -> Option<Vec<usize>> {
        let inside = |v: usize| allowed.binary_search(&v).is_ok();
        if !inside(from) || !inside(to) {
            return None;
        }
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut queue = std::collections::VecDeque::new();
        parent.insert(from, from);
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &w in &self.adj[v] {
                if inside(w) && !parent.contains_key(&w) {
                    parent.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
        if !parent.contains_key(&to) {
            return None;
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[&cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

/// Position-aware local rule evaluated as a closure.
///
/// `inputs` holds the states of the closed neighborhood of `node` in
/// ascending label order. The returned set must be non-empty; it is sorted
/// and deduplicated by the caller. `support` may narrow the states a node
/// can ever hold, which validation and enumeration use to stay finite on
/// large alphabets; `None` means the full alphabet.
pub trait LocalRule: Send + Sync {
    fn image(&self, node: usize, inputs: &[State]) -> Vec<State>;

    fn support(&self, _node: usize) -> Option<Vec<State>> {
        None
    }
}

/// Dense rule table for one node, indexed by mixed-radix input key.
///
/// An empty row marks a missing rule entry; validation reports it and
/// evaluation fails on it.
#[derive(Clone, Debug)]
pub struct RuleTable {
    arity: usize,
    base: usize,
    rows: Vec<Vec<State>>,
}

impl RuleTable {
    pub fn new(arity: usize, base: usize) -> Result<RuleTable> {
        let count = (base as u64).checked_pow(arity as u32).unwrap_or(u64::MAX);
        if count > TABLE_ROW_CAP {
            return Err(Error::Budget {
                what: format!("dense rule table with arity {arity} over {base} states"),
                needed: count,
                cap: TABLE_ROW_CAP,
            });
        }
        Ok(RuleTable { arity, base, rows: vec![Vec::new(); count as usize] })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn key(&self, inputs: &[State]) -> Result<usize> {
        if inputs.len() != self.arity {
            return Err(Error::validation(format!(
                "rule input arity {} does not match table arity {}",
                inputs.len(),
                self.arity
            )));
        }
        let mut key = 0usize;
        let mut mult = 1usize;
        for &s in inputs {
            if s as usize >= self.base {
                return Err(Error::validation(format!(
                    "state {s} out of range for table over {} states",
                    self.base
                )));
            }
            key += s as usize * mult;
            mult *= self.base;
        }
        Ok(key)
    }

    pub fn set_row(&mut self, inputs: &[State], mut out: Vec<State>) -> Result<()> {
        let key = self.key(inputs)?;
        out.sort_unstable();
        out.dedup();
        for &s in &out {
            if s as usize >= self.base {
                return Err(Error::validation(format!(
                    "output state {s} out of range for table over {} states",
                    self.base
                )));
            }
        }
        self.rows[key] = out;
        Ok(())
    }

    pub fn row(&self, inputs: &[State]) -> Result<&[State]> {
        Ok(&self.rows[self.key(inputs)?])
    }

    /// Builds a total table from a closure producing the image of each input.
    pub fn from_fn(
        arity: usize,
        base: usize,
        mut f: impl FnMut(&[State]) -> Vec<State>,
    ) -> Result<RuleTable> {
        let mut table = RuleTable::new(arity, base)?;
        let mut inputs = vec![0 as State; arity];
        loop {
            table.set_row(&inputs, f(&inputs))?;
            if !next_mixed_radix(&mut inputs, base) {
                break;
            }
        }
        Ok(table)
    }

    /// Iterates `(inputs, image)` over present rows in key order.
    pub fn iter_rows(&self) -> impl Iterator<Item = (Vec<State>, &[State])> + '_ {
        let mut inputs = vec![0 as State; self.arity];
        let mut first = true;
        self.rows.iter().map(move |row| {
            if first {
                first = false;
            } else {
                next_mixed_radix(&mut inputs, self.base);
            }
            (inputs.clone(), row.as_slice())
        })
    }
}

/// Advances a mixed-radix counter with uniform base; false on wraparound.
pub(crate) fn next_mixed_radix(digits: &mut [State], base: usize) -> bool {
    for d in digits.iter_mut() {
        if (*d as usize) + 1 < base {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

/// Set-defined rule: next state from current state and the set of states
/// present in the closed neighborhood, including the node's own state.
///
/// Entries map `(state, sorted state set)` to a single next state, so
/// set-defined networks are deterministic by construction.
#[derive(Clone, Debug, Default)]
pub struct SetRule {
    entries: BTreeMap<(State, Vec<State>), State>,
}

impl SetRule {
    pub fn new() -> SetRule {
        SetRule::default()
    }

    pub fn insert(&mut self, state: State, set: &[State], out: State) {
        let mut key: Vec<State> = set.to_vec();
        key.sort_unstable();
        key.dedup();
        self.entries.insert((state, key), out);
    }

    pub fn lookup(&self, state: State, sorted_set: &[State]) -> Option<State> {
        self.entries.get(&(state, sorted_set.to_vec())).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (State, &[State], State)> + '_ {
        self.entries.iter().map(|((s, set), out)| (*s, set.as_slice(), *out))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Rule backend attached to a network.
#[derive(Clone)]
pub enum Rules {
    /// One dense table per node.
    Tables(Arc<Vec<RuleTable>>),
    /// One set-defined rule shared by all nodes.
    Set(Arc<SetRule>),
    /// Closure backend for constructions too large to tabulate.
    Func(Arc<dyn LocalRule>),
}

impl fmt::Debug for Rules {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rules::Tables(t) => write!(f, "Rules::Tables({} nodes)", t.len()),
            Rules::Set(s) => write!(f, "Rules::Set({} entries)", s.len()),
            Rules::Func(_) => write!(f, "Rules::Func"),
        }
    }
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

/// A freezing automata network: graph, ordered alphabet, and local rules.
#[derive(Clone, Debug)]
pub struct Network {
    graph: Graph,
    alphabet: Alphabet,
    rules: Rules,
    deterministic: bool,
    self_pos: Vec<usize>,
}

impl Network {
    /// Network with one dense rule table per node.
    pub fn new_tables(graph: Graph, alphabet: Alphabet, tables: Vec<RuleTable>) -> Result<Network> {
        if tables.len() != graph.n() {
            return Err(Error::validation(format!(
                "expected {} rule tables, got {}",
                graph.n(),
                tables.len()
            )));
        }
        for (v, t) in tables.iter().enumerate() {
            let want = graph.closed_neighborhood(v).len();
            if t.arity() != want {
                return Err(Error::validation(format!(
                    "node {v} has closed neighborhood size {want} but table arity {}",
                    t.arity()
                )));
            }
        }
        let deterministic = tables
            .iter()
            .all(|t| t.rows.iter().all(|row| row.len() <= 1));
        let self_pos = self_positions(&graph);
        Ok(Network {
            graph,
            alphabet,
            rules: Rules::Tables(Arc::new(tables)),
            deterministic,
            self_pos,
        })
    }

    /// Network whose nodes all follow one set-defined rule.
    pub fn new_set(graph: Graph, alphabet: Alphabet, rule: SetRule) -> Result<Network> {
        let self_pos = self_positions(&graph);
        Ok(Network {
            graph,
            alphabet,
            rules: Rules::Set(Arc::new(rule)),
            deterministic: true,
            self_pos,
        })
    }

    /// Network backed by a closure rule. The caller declares determinism;
    /// simulation verifies the claim on every evaluated input.
    pub fn new_func(
        graph: Graph,
        alphabet: Alphabet,
        rule: Arc<dyn LocalRule>,
        deterministic: bool,
    ) -> Network {
        let self_pos = self_positions(&graph);
        Network { graph, alphabet, rules: Rules::Func(rule), deterministic, self_pos }
    }

    /// Materializes per-node tables from a closure over closed-neighborhood
    /// states. Convenient for small test networks.
    pub fn from_closed_rule(
        graph: Graph,
        alphabet: Alphabet,
        f: impl Fn(usize, &[State]) -> Vec<State>,
    ) -> Result<Network> {
        let q = alphabet.len();
        let mut tables = Vec::with_capacity(graph.n());
        for v in 0..graph.n() {
            let arity = graph.closed_neighborhood(v).len();
            tables.push(RuleTable::from_fn(arity, q, |inputs| f(v, inputs))?);
        }
        Network::new_tables(graph, alphabet, tables)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// Index of `v` inside its own closed neighborhood list.
    pub fn self_position(&self, v: usize) -> usize {
        self.self_pos[v]
    }

    /// States node `v` can hold, when the backend narrows them.
    pub fn support(&self, v: usize) -> Option<Vec<State>> {
        match &self.rules {
            Rules::Func(f) => f.support(v),
            _ => None,
        }
    }

    /// Raw rule image for `v` given closed-neighborhood states in label
    /// order. Sorted, deduplicated, non-empty on success.
    pub fn local_image(&self, v: usize, inputs: &[State]) -> Result<Vec<State>> {
        let want = self.graph.closed_neighborhood(v).len();
        if inputs.len() != want {
            return Err(Error::validation(format!(
                "node {v} expects {want} input states, got {}",
                inputs.len()
            )));
        }
        let out = match &self.rules {
            Rules::Tables(tables) => {
                let row = tables[v].row(inputs)?;
                if row.is_empty() {
                    return Err(Error::validation(format!(
                        "missing rule entry at node {v} for input {}",
                        self.format_states(inputs)
                    )));
                }
                row.to_vec()
            }
            Rules::Set(rule) => {
                let mut set: Vec<State> = inputs.to_vec();
                set.sort_unstable();
                set.dedup();
                let own = inputs[self.self_pos[v]];
                match rule.lookup(own, &set) {
                    Some(s) => vec![s],
                    None => {
                        return Err(Error::validation(format!(
                            "set rule missing entry for state {} with neighborhood set {}",
                            self.alphabet.name(own),
                            self.format_states(&set)
                        )))
                    }
                }
            }
            Rules::Func(f) => {
                let mut out = f.image(v, inputs);
                out.sort_unstable();
                out.dedup();
                if out.is_empty() {
                    return Err(Error::validation(format!(
                        "rule returned empty image at node {v} for input {}",
                        self.format_states(inputs)
                    )));
                }
                out
            }
        };
        Ok(out)
    }

    /// Rule image with the freezing discipline enforced: every successor
    /// state must lie above the node's current state in the order.
    pub fn successor_states(&self, v: usize, inputs: &[State]) -> Result<Vec<State>> {
        let out = self.local_image(v, inputs)?;
        let own = inputs[self.self_pos[v]];
        for &s in &out {
            if !self.alphabet.leq(own, s) {
                return Err(Error::validation(format!(
                    "freezing violated at node {v}: rule maps state {} to {}",
                    self.alphabet.name(own),
                    self.alphabet.name(s)
                )));
            }
        }
        Ok(out)
    }

    fn gather_inputs(&self, c: &Config, v: usize, buf: &mut Vec<State>) {
        buf.clear();
        buf.extend(self.graph.closed_neighborhood(v).iter().map(|&u| c[u]));
    }

    fn check_config(&self, c: &Config) -> Result<()> {
        if c.len() != self.n() {
            return Err(Error::validation(format!(
                "configuration has {} entries, network has {} nodes",
                c.len(),
                self.n()
            )));
        }
        for (v, &s) in c.iter().enumerate() {
            if s as usize >= self.alphabet.len() {
                return Err(Error::validation(format!(
                    "state index {s} at node {v} out of range for {} states",
                    self.alphabet.len()
                )));
            }
        }
        Ok(())
    }

    /// Single synchronous step of a deterministic network.
    pub fn step_deterministic(&self, c: &Config) -> Result<Config> {
        if !self.deterministic {
            return Err(Error::validation(
                "step_deterministic requires a deterministic network".to_string(),
            ));
        }
        self.check_config(c)?;
        let mut next = Vec::with_capacity(self.n());
        let mut buf = Vec::new();
        for v in 0..self.n() {
            self.gather_inputs(c, v, &mut buf);
            let out = self.successor_states(v, &buf)?;
            if out.len() != 1 {
                return Err(Error::validation(format!(
                    "network is flagged deterministic but node {v} has {} successor states",
                    out.len()
                )));
            }
            next.push(out[0]);
        }
        Ok(next)
    }

    /// Every configuration reachable in one synchronous step: the product of
    /// per-node rule images. Ascending lexicographic order, no duplicates.
    /// Refuses to enumerate when the product exceeds `cap`.
    pub fn successors(&self, c: &Config, cap: u64) -> Result<Vec<Config>> {
        self.check_config(c)?;
        let mut options: Vec<Vec<State>> = Vec::with_capacity(self.n());
        let mut buf = Vec::new();
        let mut count: u64 = 1;
        for v in 0..self.n() {
            self.gather_inputs(c, v, &mut buf);
            let out = self.successor_states(v, &buf)?;
            count = count.saturating_mul(out.len() as u64);
            options.push(out);
        }
        if count > cap {
            return Err(Error::Budget {
                what: "successor enumeration".to_string(),
                needed: count,
                cap,
            });
        }
        let mut result = Vec::with_capacity(count as usize);
        let mut idx = vec![0usize; self.n()];
        loop {
            result.push(
                idx.iter()
                    .enumerate()
                    .map(|(v, &i)| options[v][i])
                    .collect::<Config>(),
            );
            let mut v = self.n();
            loop {
                if v == 0 {
                    return Ok(result);
                }
                v -= 1;
                if idx[v] + 1 < options[v].len() {
                    idx[v] += 1;
                    for d in idx.iter_mut().skip(v + 1) {
                        *d = 0;
                    }
                    break;
                }
            }
        }
    }

    /// Deterministic orbit `x, F(x), ..., F^t(x)` with `t + 1` entries.
    pub fn orbit(&self, c: &Config, t: u32) -> Result<Orbit> {
        let mut out = Vec::with_capacity(t as usize + 1);
        out.push(c.clone());
        for _ in 0..t {
            let next = self.step_deterministic(out.last().expect("non-empty orbit"))?;
            out.push(next);
        }
        Ok(out)
    }

    /// Non-deterministic closure of the rules: each node may also keep its
    /// current state. Table backends stay tables; set and closure backends
    /// are wrapped. The result is non-deterministic.
    pub fn async_lift(&self) -> Result<Network> {
        let rules = match &self.rules {
            Rules::Tables(tables) => {
                let mut lifted = Vec::with_capacity(tables.len());
                for (v, t) in tables.iter().enumerate() {
                    let pos = self.self_pos[v];
                    let mut nt = RuleTable::new(t.arity(), t.base)?;
                    let mut inputs = vec![0 as State; t.arity()];
                    loop {
                        let row = t.row(&inputs)?;
                        if !row.is_empty() {
                            let mut out = row.to_vec();
                            out.push(inputs[pos]);
                            nt.set_row(&inputs, out)?;
                        }
                        if !next_mixed_radix(&mut inputs, t.base) {
                            break;
                        }
                    }
                    lifted.push(nt);
                }
                Rules::Tables(Arc::new(lifted))
            }
            Rules::Set(_) | Rules::Func(_) => {
                let inner = InnerEval { rules: self.rules.clone(), self_pos: self.self_pos.clone() };
                Rules::Func(Arc::new(AsyncLiftRule { inner }))
            }
        };
        Ok(Network {
            graph: self.graph.clone(),
            alphabet: self.alphabet.clone(),
            rules,
            deterministic: false,
            self_pos: self.self_pos.clone(),
        })
    }

    /// Human-readable state list like `(1, 0, 1)` using alphabet names.
    pub fn format_states(&self, states: &[State]) -> String {
        let names: Vec<&str> = states.iter().map(|&s| self.alphabet.name(s)).collect();
        format!("({})", names.join(", "))
    }

    /// Parses a configuration given as state names.
    pub fn parse_config(&self, names: &[String]) -> Result<Config> {
        if names.len() != self.n() {
            return Err(Error::validation(format!(
                "configuration has {} entries, network has {} nodes",
                names.len(),
                self.n()
            )));
        }
        names
            .iter()
            .map(|name| {
                self.alphabet
                    .state(name)
                    .ok_or_else(|| Error::validation(format!("unknown state name {name:?}")))
            })
            .collect()
    }

    /// Renders a configuration as state names.
    pub fn config_names(&self, c: &Config) -> Vec<String> {
        c.iter().map(|&s| self.alphabet.name(s).to_string()).collect()
    }
}

fn self_positions(graph: &Graph) -> Vec<usize> {
    (0..graph.n())
        .map(|v| {
            graph
                .closed_neighborhood(v)
                .binary_search(&v)
                .expect("closed neighborhood contains the node")
        })
        .collect()
}

/// Evaluator shared by lifted rule wrappers.
struct InnerEval {
    rules: Rules,
    self_pos: Vec<usize>,
}

impl InnerEval {
    fn image(&self, node: usize, inputs: &[State]) -> Vec<State> {
        match &self.rules {
            Rules::Tables(tables) => tables[node]
                .row(inputs)
                .map(|r| r.to_vec())
                .unwrap_or_default(),
            Rules::Set(rule) => {
                let mut set: Vec<State> = inputs.to_vec();
                set.sort_unstable();
                set.dedup();
                rule.lookup(inputs[self.self_pos[node]], &set)
                    .map(|s| vec![s])
                    .unwrap_or_default()
            }
            Rules::Func(f) => f.image(node, inputs),
        }
    }

    fn support(&self, node: usize) -> Option<Vec<State>> {
        match &self.rules {
            Rules::Func(f) => f.support(node),
            _ => None,
        }
    }
}

/// Adds the identity option to an inner rule.
struct AsyncLiftRule {
    inner: InnerEval,
}

impl LocalRule for AsyncLiftRule {
    fn image(&self, node: usize, inputs: &[State]) -> Vec<State> {
        let mut out = self.inner.image(node, inputs);
        out.push(inputs[self.inner.self_pos[node]]);
        out
    }

    fn support(&self, node: usize) -> Option<Vec<State>> {
        self.inner.support(node)
    }
}

/// Materializes a set-defined rule into a dense table network.
///
/// Fails when an occurring `(state, set)` combination has no entry or when
/// the expansion breaks the freezing discipline, naming the offender.
pub fn expand_set_rule(rho: &SetRule, graph: &Graph, alphabet: &Alphabet) -> Result<Network> {
    let q = alphabet.len();
    let mut tables = Vec::with_capacity(graph.n());
    let mut freezing_errors: Vec<String> = Vec::new();
    for v in 0..graph.n() {
        let arity = graph.closed_neighborhood(v).len();
        let pos = graph
            .closed_neighborhood(v)
            .binary_search(&v)
            .expect("closed neighborhood contains the node");
        let mut table = RuleTable::new(arity, q)?;
        let mut inputs = vec![0 as State; arity];
        loop {
            let mut set: Vec<State> = inputs.clone();
            set.sort_unstable();
            set.dedup();
            let own = inputs[pos];
            let out = rho.lookup(own, &set).ok_or_else(|| {
                let set_names: Vec<&str> = set.iter().map(|&s| alphabet.name(s)).collect();
                Error::validation(format!(
                    "set rule has no entry for state {} with set {{{}}}",
                    alphabet.name(own),
                    set_names.join(", ")
                ))
            })?;
            if !alphabet.leq(own, out) && freezing_errors.len() < 5 {
                freezing_errors.push(format!(
                    "node {v}: state {} maps to {} which is not above it",
                    alphabet.name(own),
                    alphabet.name(out)
                ));
            }
            table.set_row(&inputs, vec![out])?;
            if !next_mixed_radix(&mut inputs, q) {
                break;
            }
        }
        tables.push(table);
    }
    if !freezing_errors.is_empty() {
        return Err(Error::validation(format!(
            "set rule expansion violates freezing: {}",
            freezing_errors.join("; ")
        )));
    }
    Network::new_tables(graph.clone(), alphabet.clone(), tables)
}

/// Upper bound on the number of distinct restricted traces of a set `U` of
/// `u` nodes over alphabet size `q` in a network with `n` nodes:
/// `u * q * (q * n + 1)`.
pub fn max_orbit_length(u: u64, q: u64, n: u64) -> u64 {
    u.saturating_mul(q)
        .saturating_mul(q.saturating_mul(n).saturating_add(1))
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// One concrete defect found by [`validate_network`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Interaction graph is not connected.
    Disconnected,
    /// A rule entry is absent for the given closed-neighborhood input.
    MissingRule { node: usize, input: Vec<State> },
    /// A rule entry exists but allows no successor state.
    EmptyImage { node: usize, input: Vec<State> },
    /// A successor state is not above the node's current state.
    NonMonotone { node: usize, input: Vec<State>, out: State },
    /// Network is flagged deterministic but an input has several successors.
    AmbiguousDeterministic { node: usize, input: Vec<State> },
}

/// How much of the rule space validation covered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationCoverage {
    /// Every reachable rule input was checked.
    Exhaustive,
    /// A deterministic sample of rule inputs was checked.
    Sampled { rows: u64 },
}

/// Outcome of structural and semantic network validation.
#[derive(Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub coverage: ValidationCoverage,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// First violations rendered with state names, for error messages.
    pub fn describe(&self, net: &Network) -> String {
        let mut parts = Vec::new();
        for v in self.violations.iter().take(5) {
            parts.push(match v {
                Violation::Disconnected => "interaction graph is disconnected".to_string(),
                Violation::MissingRule { node, input } => {
                    format!("missing rule at node {node} for input {}", net.format_states(input))
                }
                Violation::EmptyImage { node, input } => {
                    format!("empty image at node {node} for input {}", net.format_states(input))
                }
                Violation::NonMonotone { node, input, out } => format!(
                    "non-monotone rule at node {node}: input {} allows {}",
                    net.format_states(input),
                    net.alphabet().name(*out)
                ),
                Violation::AmbiguousDeterministic { node, input } => format!(
                    "deterministic flag broken at node {node} for input {}",
                    net.format_states(input)
                ),
            });
        }
        if self.violations.len() > 5 {
            parts.push(format!("and {} more", self.violations.len() - 5));
        }
        parts.join("; ")
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Checks connectivity, rule totality, image non-emptiness, the freezing
/// discipline, and the determinism flag.
///
/// Dense tables are checked exhaustively. Set and closure backends are
/// checked exhaustively when the per-node input space fits `budget_rows`,
/// otherwise on a fixed deterministic sample; the report says which.
/// Sampling never proves absence of defects, so simulation re-checks
/// freezing on every step it actually takes.
pub fn validate_network(net: &Network, budget_rows: u64) -> ValidationReport {
    let mut violations = Vec::new();
    if !net.graph().is_connected() {
        violations.push(Violation::Disconnected);
    }
    let q = net.alphabet().len();
    let mut coverage = ValidationCoverage::Exhaustive;
    let mut sampled_rows = 0u64;

    let check_input = |violations: &mut Vec<Violation>, v: usize, inputs: &[State]| {
        let own = inputs[net.self_position(v)];
        match net.local_image(v, inputs) {
            Ok(out) => {
                for &s in &out {
                    if !net.alphabet().leq(own, s) {
                        violations.push(Violation::NonMonotone {
                            node: v,
                            input: inputs.to_vec(),
                            out: s,
                        });
                    }
                }
                if net.is_deterministic() && out.len() > 1 {
                    violations.push(Violation::AmbiguousDeterministic {
                        node: v,
                        input: inputs.to_vec(),
                    });
                }
            }
            Err(_) => {
                violations.push(Violation::MissingRule { node: v, input: inputs.to_vec() });
            }
        }
    };

    for v in 0..net.n() {
        let arity = net.graph().closed_neighborhood(v).len();
        // Per-node candidate states: the declared support for closure rules,
        // the full alphabet otherwise.
        let node_states: Vec<Vec<State>> = net
            .graph()
            .closed_neighborhood(v)
            .iter()
            .map(|&u| {
                net.support(u)
                    .unwrap_or_else(|| (0..q as State).collect())
            })
            .collect();
        let rows: u64 = node_states
            .iter()
            .fold(1u64, |acc, s| acc.saturating_mul(s.len() as u64));
        if rows <= budget_rows {
            let mut idx = vec![0usize; arity];
            let mut inputs = vec![0 as State; arity];
            loop {
                for (i, &j) in idx.iter().enumerate() {
                    inputs[i] = node_states[i][j];
                }
                if let Rules::Tables(tables) = net.rules() {
                    // Distinguish a missing row from other failures.
                    if tables[v].row(&inputs).map(|r| r.is_empty()).unwrap_or(false) {
                        violations.push(Violation::MissingRule { node: v, input: inputs.clone() });
                        if !advance(&mut idx, &node_states) {
                            break;
                        }
                        continue;
                    }
                }
                check_input(&mut violations, v, &inputs);
                if !advance(&mut idx, &node_states) {
                    break;
                }
            }
        } else {
            // Deterministic sample, fixed seed per node.
            let per_node = budget_rows.clamp(1, 4096);
            let mut rng = 0x5EED_0000u64 ^ (v as u64);
            for _ in 0..per_node {
                let inputs: Vec<State> = node_states
                    .iter()
                    .map(|s| s[(splitmix64(&mut rng) % s.len() as u64) as usize])
                    .collect();
                check_input(&mut violations, v, &inputs);
            }
            sampled_rows += per_node;
            coverage = ValidationCoverage::Sampled { rows: sampled_rows };
        }
    }
    if let ValidationCoverage::Sampled { .. } = coverage {
        coverage = ValidationCoverage::Sampled { rows: sampled_rows };
    }
    ValidationReport { violations, coverage }
}

fn advance(idx: &mut [usize], options: &[Vec<State>]) -> bool {
    for (i, d) in idx.iter_mut().enumerate() {
        if *d + 1 < options[i].len() {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

// ---------------------------------------------------------------------------
// JSON formats
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RuleRowFile {
    input: BTreeMap<String, String>,
    out: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SetRuleRowFile {
    state: String,
    set: Vec<String>,
    out: String,
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    alphabet: Vec<String>,
    #[serde(default)]
    order: Vec<(String, String)>,
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rules: Option<BTreeMap<String, Vec<RuleRowFile>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    set_rule: Option<Vec<SetRuleRowFile>>,
}

/// Bare graph file `{"n": ..., "edges": [[u, v], ...]}`.
#[derive(Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn from_json(text: &str) -> Result<Graph> {
        let file: GraphFile = serde_json::from_str(text)?;
        Graph::new(file.n, &file.edges)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile { n: self.n, edges: self.edges.clone() };
        serde_json::to_string_pretty(&file).expect("graph serialization")
    }
}

impl Network {
    /// Parses the network interchange format. Exactly one of `rules` (per
    /// node tables) and `set_rule` must be present.
    pub fn from_json(text: &str) -> Result<Network> {
        let file: NetworkFile = serde_json::from_str(text)?;
        let alphabet = Alphabet::from_named(file.alphabet, &file.order)?;
        let graph = Graph::new(file.n, &file.edges)?;
        match (file.rules, file.set_rule) {
            (Some(rules), None) => {
                let q = alphabet.len();
                let mut tables = Vec::with_capacity(graph.n());
                for v in 0..graph.n() {
                    let arity = graph.closed_neighborhood(v).len();
                    tables.push(RuleTable::new(arity, q)?);
                }
                for (node_name, rows) in rules {
                    let v: usize = node_name.parse().map_err(|_| {
                        Error::validation(format!("rule key {node_name:?} is not a node label"))
                    })?;
                    if v >= graph.n() {
                        return Err(Error::validation(format!(
                            "rule key {v} out of range for {} nodes",
                            graph.n()
                        )));
                    }
                    let hood = graph.closed_neighborhood(v).to_vec();
                    for row in rows {
                        let mut inputs = vec![0 as State; hood.len()];
                        let mut seen = vec![false; hood.len()];
                        for (u_name, state_name) in &row.input {
                            let u: usize = u_name.parse().map_err(|_| {
                                Error::validation(format!(
                                    "input key {u_name:?} is not a node label"
                                ))
                            })?;
                            let pos = hood.binary_search(&u).map_err(|_| {
                                Error::validation(format!(
                                    "node {u} is not in the closed neighborhood of {v}"
                                ))
                            })?;
                            inputs[pos] = alphabet.state(state_name).ok_or_else(|| {
                                Error::validation(format!("unknown state name {state_name:?}"))
                            })?;
                            seen[pos] = true;
                        }
                        if seen.iter().any(|&s| !s) {
                            let missing: Vec<usize> = hood
                                .iter()
                                .zip(&seen)
                                .filter(|(_, &s)| !s)
                                .map(|(&u, _)| u)
                                .collect();
                            return Err(Error::validation(format!(
                                "rule row for node {v} misses inputs for nodes {missing:?}"
                            )));
                        }
                        let out: Vec<State> = row
                            .out
                            .iter()
                            .map(|name| {
                                alphabet.state(name).ok_or_else(|| {
                                    Error::validation(format!("unknown state name {name:?}"))
                                })
                            })
                            .collect::<Result<_>>()?;
                        tables[v].set_row(&inputs, out)?;
                    }
                }
                Network::new_tables(graph, alphabet, tables)
            }
            (None, Some(rows)) => {
                let mut rule = SetRule::new();
                for row in rows {
                    let state = alphabet.state(&row.state).ok_or_else(|| {
                        Error::validation(format!("unknown state name {:?}", row.state))
                    })?;
                    let set: Vec<State> = row
                        .set
                        .iter()
                        .map(|name| {
                            alphabet.state(name).ok_or_else(|| {
                                Error::validation(format!("unknown state name {name:?}"))
                            })
                        })
                        .collect::<Result<_>>()?;
                    let out = alphabet.state(&row.out).ok_or_else(|| {
                        Error::validation(format!("unknown state name {:?}", row.out))
                    })?;
                    rule.insert(state, &set, out);
                }
                Network::new_set(graph, alphabet, rule)
            }
            (Some(_), Some(_)) => Err(Error::validation(
                "network file has both rules and set_rule".to_string(),
            )),
            (None, None) => Err(Error::validation(
                "network file has neither rules nor set_rule".to_string(),
            )),
        }
    }

    /// Serializes table and set-rule networks. Closure-backed networks have
    /// no finite interchange form and are rejected.
    pub fn to_json(&self) -> Result<String> {
        let order: Vec<(String, String)> = self
            .alphabet
            .order_pairs()
            .iter()
            .map(|&(a, b)| {
                (self.alphabet.name(a).to_string(), self.alphabet.name(b).to_string())
            })
            .collect();
        let mut file = NetworkFile {
            alphabet: self.alphabet.names().to_vec(),
            order,
            n: self.n(),
            edges: self.graph.edges().to_vec(),
            rules: None,
            set_rule: None,
        };
        match &self.rules {
            Rules::Tables(tables) => {
                let mut map = BTreeMap::new();
                for (v, table) in tables.iter().enumerate() {
                    let hood = self.graph.closed_neighborhood(v);
                    let mut rows = Vec::new();
                    for (inputs, out) in table.iter_rows() {
                        if out.is_empty() {
                            continue;
                        }
                        let input: BTreeMap<String, String> = hood
                            .iter()
                            .zip(&inputs)
                            .map(|(&u, &s)| (u.to_string(), self.alphabet.name(s).to_string()))
                            .collect();
                        rows.push(RuleRowFile {
                            input,
                            out: out.iter().map(|&s| self.alphabet.name(s).to_string()).collect(),
                        });
                    }
                    map.insert(v.to_string(), rows);
                }
                file.rules = Some(map);
            }
            Rules::Set(rule) => {
                let rows: Vec<SetRuleRowFile> = rule
                    .iter()
                    .map(|(state, set, out)| SetRuleRowFile {
                        state: self.alphabet.name(state).to_string(),
                        set: set.iter().map(|&s| self.alphabet.name(s).to_string()).collect(),
                        out: self.alphabet.name(out).to_string(),
                    })
                    .collect();
                file.set_rule = Some(rows);
            }
            Rules::Func(_) => {
                return Err(Error::Unsupported(
                    "closure-backed rules have no interchange form".to_string(),
                ))
            }
        }
        Ok(serde_json::to_string_pretty(&file).expect("network serialization"))
    }
}

/// Serializes a configuration as a JSON array of state names.
pub fn config_to_json(c: &Config, alphabet: &Alphabet) -> Result<String> {
    let names: Vec<&str> = c
        .iter()
        .map(|&s| {
            if (s as usize) < alphabet.len() {
                Ok(alphabet.name(s))
            } else {
                Err(Error::validation(format!("configuration holds unknown state {s}")))
            }
        })
        .collect::<Result<_>>()?;
    Ok(serde_json::to_string(&names).expect("name list serializes"))
}

/// Parses a JSON array of state names into a configuration.
pub fn config_from_json(text: &str, alphabet: &Alphabet) -> Result<Config> {
    let names: Vec<String> = serde_json::from_str(text)?;
    names
        .iter()
        .map(|name| {
            alphabet
                .state(name)
                .ok_or_else(|| Error::validation(format!("unknown state name {name:?}")))
        })
        .collect()
}

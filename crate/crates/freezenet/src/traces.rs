//! Run-length trace encodings, change-time sequence tables, and orbit
//! specifications.
//!
//! Freezing makes every per-node state sequence non-decreasing, so a
//! sequence over `t + 1` steps compresses to at most `|Q|` runs, and a joint
//! table over a node set `U` compresses to one row per change time, at most
//! `|U| * (|Q| - 1) + 1` rows. All solver state lives in this compressed
//! form; dense sequences appear only at the edges of the API.
//!
//! Canonical keys are injective byte encodings used for deterministic
//! ordering, deduplication, and the join index of the tree decomposition
//! dynamic program.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

use crate::core::{Alphabet, State};
use crate::{Error, Result};

/// Default cap on enumerated traces per call.
pub const TRACE_ENUMERATION_CAP: u64 = 1_000_000;

// ---------------------------------------------------------------------------
// Run-length traces
// ---------------------------------------------------------------------------

/// Monotone state sequence of one node, stored as `(state, length)` runs.
///
/// Invariants: runs are non-empty with positive lengths, and consecutive run
/// states move strictly upward in the alphabet order. The total length is
/// `t + 1` for a horizon-`t` orbit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RleTrace {
    runs: Vec<(State, u32)>,
}

impl RleTrace {
    pub fn new(runs: Vec<(State, u32)>, alphabet: &Alphabet) -> Result<RleTrace> {
        if runs.is_empty() {
            return Err(Error::validation("trace must have at least one run"));
        }
        for (i, &(s, len)) in runs.iter().enumerate() {
            if len == 0 {
                return Err(Error::validation(format!("run {i} has zero length")));
            }
            if s as usize >= alphabet.len() {
                return Err(Error::validation(format!("run state {s} out of range")));
            }
            if i > 0 {
                let prev = runs[i - 1].0;
                if prev == s || !alphabet.leq(prev, s) {
                    return Err(Error::validation(format!(
                        "runs {} and {} are not strictly increasing: {} then {}",
                        i - 1,
                        i,
                        alphabet.name(prev),
                        alphabet.name(s)
                    )));
                }
            }
        }
        Ok(RleTrace { runs })
    }

    /// Builds from already-validated runs.
    pub(crate) fn from_runs_unchecked(runs: Vec<(State, u32)>) -> RleTrace {
        debug_assert!(!runs.is_empty());
        RleTrace { runs }
    }

    /// Compresses a dense monotone sequence.
    pub fn from_symbols(symbols: &[State], alphabet: &Alphabet) -> Result<RleTrace> {
        if symbols.is_empty() {
            return Err(Error::validation("trace must have at least one symbol"));
        }
        let mut runs: Vec<(State, u32)> = Vec::new();
        for &s in symbols {
            match runs.last_mut() {
                Some((last, len)) if *last == s => *len += 1,
                _ => runs.push((s, 1)),
            }
        }
        RleTrace::new(runs, alphabet)
    }

    pub fn runs(&self) -> &[(State, u32)] {
        &self.runs
    }

    /// Total number of symbols, `t + 1`.
    pub fn len(&self) -> u32 {
        self.runs.iter().map(|&(_, l)| l).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first_state(&self) -> State {
        self.runs[0].0
    }

    pub fn final_state(&self) -> State {
        self.runs[self.runs.len() - 1].0
    }

    /// Symbol at position `s`, linear in the run count.
    pub fn state_at(&self, s: u32) -> Option<State> {
        let mut acc = 0u32;
        for &(state, len) in &self.runs {
            acc += len;
            if s < acc {
                return Some(state);
            }
        }
        None
    }

    /// Times at which the state changes, ascending, excluding time `0`.
    pub fn change_times(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.runs.len() - 1);
        let mut acc = 0u32;
        for &(_, len) in &self.runs[..self.runs.len() - 1] {
            acc += len;
            out.push(acc);
        }
        out
    }

    /// Dense symbol sequence.
    pub fn symbols(&self) -> Vec<State> {
        let mut out = Vec::with_capacity(self.len() as usize);
        for &(s, len) in &self.runs {
            out.extend(std::iter::repeat(s).take(len as usize));
        }
        out
    }

    /// Injective byte encoding; equal keys exactly when traces are equal.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.runs.len() * 6);
        out.extend_from_slice(&(self.runs.len() as u32).to_be_bytes());
        for &(s, len) in &self.runs {
            out.extend_from_slice(&s.to_be_bytes());
            out.extend_from_slice(&len.to_be_bytes());
        }
        out
    }

    /// True when this trace begins with the given runs; the last prefix run
    /// may be shorter than the matching run here.
    pub fn starts_with(&self, prefix: &[(State, u32)]) -> bool {
        if prefix.is_empty() {
            return true;
        }
        let m = prefix.len();
        if m > self.runs.len() {
            return false;
        }
        for i in 0..m - 1 {
            if self.runs[i] != prefix[i] {
                return false;
            }
        }
        let (ps, pl) = prefix[m - 1];
        let (ts, tl) = self.runs[m - 1];
        ps == ts && pl <= tl
    }
}

// ---------------------------------------------------------------------------
// Sequence encodings over node sets
// ---------------------------------------------------------------------------

/// Joint state evolution of a node set, one row per change time.
///
/// `times` starts at `0` and is strictly increasing; `states[i]` holds the
/// cross section at `times[i]` with one column per node in `nodes`
/// (ascending labels). Minimality: every row after the first differs from
/// its predecessor. The horizon `t` is carried explicitly because the last
/// row may cover many trailing steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SequenceEncoding {
    nodes: Vec<usize>,
    times: Vec<u32>,
    states: Vec<Vec<State>>,
    horizon: u32,
}

impl SequenceEncoding {
    /// Encodes a dense sequence table. Every node must carry the same number
    /// of symbols `t + 1 >= 1`, and every column must be monotone.
    pub fn encode(table: &BTreeMap<usize, Vec<State>>, alphabet: &Alphabet) -> Result<SequenceEncoding> {
        if table.is_empty() {
            return Err(Error::validation("sequence table must cover at least one node"));
        }
        let len = table.values().next().expect("non-empty table").len();
        if len == 0 {
            return Err(Error::validation("sequences must have at least one symbol"));
        }
        for (&v, seq) in table {
            if seq.len() != len {
                return Err(Error::validation(format!(
                    "node {v} has {} symbols, expected {len}",
                    seq.len()
                )));
            }
            for (s, pair) in seq.windows(2).enumerate() {
                if !alphabet.leq(pair[0], pair[1]) {
                    return Err(Error::validation(format!(
                        "sequence of node {v} is not monotone at step {s}: {} then {}",
                        alphabet.name(pair[0]),
                        alphabet.name(pair[1])
                    )));
                }
            }
        }
        let nodes: Vec<usize> = table.keys().copied().collect();
        let mut times = Vec::new();
        let mut states: Vec<Vec<State>> = Vec::new();
        for s in 0..len {
            let row: Vec<State> = table.values().map(|seq| seq[s]).collect();
            if states.last().map(|last| last != &row).unwrap_or(true) {
                times.push(s as u32);
                states.push(row);
            }
        }
        Ok(SequenceEncoding { nodes, times, states, horizon: (len - 1) as u32 })
    }

    /// Joins per-node run-length traces into one encoding. All traces must
    /// share the same total length `t + 1`.
    pub fn from_traces(traces: &BTreeMap<usize, RleTrace>) -> Result<SequenceEncoding> {
        if traces.is_empty() {
            return Err(Error::validation("trace table must cover at least one node"));
        }
        let len = traces.values().next().expect("non-empty table").len();
        for (&v, tr) in traces {
            if tr.len() != len {
                return Err(Error::validation(format!(
                    "trace of node {v} has length {}, expected {len}",
                    tr.len()
                )));
            }
        }
        let nodes: Vec<usize> = traces.keys().copied().collect();
        let mut change_times: Vec<u32> = vec![0];
        for tr in traces.values() {
            change_times.extend(tr.change_times());
        }
        change_times.sort_unstable();
        change_times.dedup();
        let states: Vec<Vec<State>> = change_times
            .iter()
            .map(|&s| {
                traces
                    .values()
                    .map(|tr| tr.state_at(s).expect("time within horizon"))
                    .collect()
            })
            .collect();
        Ok(SequenceEncoding { nodes, times: change_times, states, horizon: len - 1 })
    }

    /// Builds from explicit rows, validating all invariants.
    pub fn from_rows(
        nodes: Vec<usize>,
        times: Vec<u32>,
        states: Vec<Vec<State>>,
        horizon: u32,
        alphabet: &Alphabet,
    ) -> Result<SequenceEncoding> {
        if nodes.is_empty() {
            return Err(Error::validation("encoding must cover at least one node"));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("nodes must be strictly ascending"));
        }
        if times.is_empty() || times[0] != 0 {
            return Err(Error::validation("times must start at 0"));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("times must be strictly increasing"));
        }
        if *times.last().expect("non-empty times") > horizon {
            return Err(Error::validation("last change time exceeds the horizon"));
        }
        if states.len() != times.len() {
            return Err(Error::validation("states and times must have equal length"));
        }
        for (i, row) in states.iter().enumerate() {
            if row.len() != nodes.len() {
                return Err(Error::validation(format!(
                    "row {i} has {} columns, expected {}",
                    row.len(),
                    nodes.len()
                )));
            }
        }
        for i in 1..states.len() {
            if states[i] == states[i - 1] {
                return Err(Error::validation(format!("row {i} repeats its predecessor")));
            }
            for (c, (&prev, &next)) in states[i - 1].iter().zip(&states[i]).enumerate() {
                if !alphabet.leq(prev, next) {
                    return Err(Error::validation(format!(
                        "column for node {} is not monotone at row {i}",
                        nodes[c]
                    )));
                }
            }
        }
        Ok(SequenceEncoding { nodes, times, states, horizon })
    }

    pub(crate) fn from_rows_unchecked(
        nodes: Vec<usize>,
        times: Vec<u32>,
        states: Vec<Vec<State>>,
        horizon: u32,
    ) -> SequenceEncoding {
        debug_assert!(!nodes.is_empty() && times[0] == 0 && times.len() == states.len());
        SequenceEncoding { nodes, times, states, horizon }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn times(&self) -> &[u32] {
        &self.times
    }

    pub fn rows(&self) -> &[Vec<State>] {
        &self.states
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// Cross section at an arbitrary time `s <= horizon`.
    pub fn cross_section(&self, s: u32) -> Vec<State> {
        let idx = match self.times.binary_search(&s) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        self.states[idx].clone()
    }

    /// Expands back into a dense sequence table.
    pub fn decode(&self) -> BTreeMap<usize, Vec<State>> {
        let len = self.horizon as usize + 1;
        let mut out: BTreeMap<usize, Vec<State>> = self
            .nodes
            .iter()
            .map(|&v| (v, Vec::with_capacity(len)))
            .collect();
        let mut row = 0usize;
        for s in 0..len as u32 {
            if row + 1 < self.times.len() && self.times[row + 1] == s {
                row += 1;
            }
            for (c, &v) in self.nodes.iter().enumerate() {
                out.get_mut(&v).expect("node present").push(self.states[row][c]);
            }
        }
        out
    }

    /// Projects onto a subset of nodes and re-minimizes rows. Linear in the
    /// stored rows; equivalent to decoding, projecting, and re-encoding.
    pub fn restrict(&self, subset: &[usize]) -> Result<SequenceEncoding> {
        if subset.is_empty() {
            return Err(Error::validation("restriction target must be non-empty"));
        }
        if subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("restriction target must be strictly ascending"));
        }
        let cols: Vec<usize> = subset
            .iter()
            .map(|v| {
                self.nodes
                    .binary_search(v)
                    .map_err(|_| Error::validation(format!("node {v} not covered by encoding")))
            })
            .collect::<Result<_>>()?;
        let mut times = Vec::new();
        let mut states: Vec<Vec<State>> = Vec::new();
        for (i, row) in self.states.iter().enumerate() {
            let proj: Vec<State> = cols.iter().map(|&c| row[c]).collect();
            if states.last().map(|last| last != &proj).unwrap_or(true) {
                times.push(self.times[i]);
                states.push(proj);
            }
        }
        Ok(SequenceEncoding { nodes: subset.to_vec(), times, states, horizon: self.horizon })
    }

    /// Run-length trace of a single covered node.
    pub fn column(&self, v: usize) -> Result<RleTrace> {
        let c = self
            .nodes
            .binary_search(&v)
            .map_err(|_| Error::validation(format!("node {v} not covered by encoding")))?;
        let mut runs: Vec<(State, u32)> = Vec::new();
        for (i, row) in self.states.iter().enumerate() {
            let end = if i + 1 < self.times.len() { self.times[i + 1] } else { self.horizon + 1 };
            let span = end - self.times[i];
            match runs.last_mut() {
                Some((last, len)) if *last == row[c] => *len += span,
                _ => runs.push((row[c], span)),
            }
        }
        Ok(RleTrace::from_runs_unchecked(runs))
    }

    /// Injective byte encoding over nodes, times, states, and horizon.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out =
            Vec::with_capacity(12 + self.nodes.len() * 4 + self.times.len() * (4 + self.nodes.len() * 2));
        out.extend_from_slice(&(self.nodes.len() as u32).to_be_bytes());
        for &v in &self.nodes {
            out.extend_from_slice(&(v as u32).to_be_bytes());
        }
        out.extend_from_slice(&(self.times.len() as u32).to_be_bytes());
        for &t in &self.times {
            out.extend_from_slice(&t.to_be_bytes());
        }
        for row in &self.states {
            for &s in row {
                out.extend_from_slice(&s.to_be_bytes());
            }
        }
        out.extend_from_slice(&self.horizon.to_be_bytes());
        out
    }
}

// ---------------------------------------------------------------------------
// Specifications
// ---------------------------------------------------------------------------

/// Deduplicated set of admissible traces for one node, ordered by canonical
/// key.
#[derive(Clone, Debug)]
pub struct TraceSet {
    traces: Vec<RleTrace>,
    keys: HashSet<Vec<u8>>,
}

impl TraceSet {
    pub fn new(mut traces: Vec<RleTrace>) -> TraceSet {
        traces.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
        traces.dedup();
        let keys = traces.iter().map(|t| t.canonical_key()).collect();
        TraceSet { traces, keys }
    }

    pub fn contains(&self, trace: &RleTrace) -> bool {
        self.keys.contains(&trace.canonical_key())
    }

    pub fn iter(&self) -> impl Iterator<Item = &RleTrace> {
        self.traces.iter()
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// True when some member extends the given run prefix.
    pub fn admits_prefix(&self, prefix: &[(State, u32)]) -> bool {
        self.traces.iter().any(|t| t.starts_with(prefix))
    }
}

/// Per-node admissible trace sets over a common horizon.
///
/// A node absent from the map is unconstrained: any monotone trace of the
/// right length is admitted. An orbit satisfies the specification when every
/// node's state sequence lies in its set.
#[derive(Clone, Debug)]
pub struct Specification {
    horizon: u32,
    nodes: BTreeMap<usize, TraceSet>,
}

impl Specification {
    /// Specification admitting every orbit of horizon `t`.
    pub fn unconstrained(t: u32) -> Specification {
        Specification { horizon: t, nodes: BTreeMap::new() }
    }

    /// Builds from per-node trace sets, checking lengths against `t`.
    pub fn from_sets(t: u32, nodes: BTreeMap<usize, TraceSet>) -> Result<Specification> {
        for (&v, set) in &nodes {
            for trace in set.iter() {
                if trace.len() != t + 1 {
                    return Err(Error::validation(format!(
                        "trace for node {v} has length {}, horizon needs {}",
                        trace.len(),
                        t + 1
                    )));
                }
            }
        }
        Ok(Specification { horizon: t, nodes })
    }

    /// Constrains one node, replacing any previous set.
    pub fn set_node(&mut self, v: usize, set: TraceSet) -> Result<()> {
        for trace in set.iter() {
            if trace.len() != self.horizon + 1 {
                return Err(Error::validation(format!(
                    "trace for node {v} has length {}, horizon needs {}",
                    trace.len(),
                    self.horizon + 1
                )));
            }
        }
        self.nodes.insert(v, set);
        Ok(())
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn node_set(&self, v: usize) -> Option<&TraceSet> {
        self.nodes.get(&v)
    }

    pub fn constrained_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.keys().copied()
    }

    /// Membership test; unconstrained nodes admit everything of the right
    /// length.
    pub fn admits(&self, v: usize, trace: &RleTrace) -> bool {
        if trace.len() != self.horizon + 1 {
            return false;
        }
        match self.nodes.get(&v) {
            Some(set) => set.contains(trace),
            None => true,
        }
    }

    /// True when the node can still complete the given run prefix.
    pub fn prefix_feasible(&self, v: usize, prefix: &[(State, u32)]) -> bool {
        match self.nodes.get(&v) {
            Some(set) => set.admits_prefix(prefix),
            None => true,
        }
    }
}

/// Builds a specification from dense per-node sequences.
pub fn encode_spec(
    t: u32,
    per_node: &BTreeMap<usize, Vec<Vec<State>>>,
    alphabet: &Alphabet,
) -> Result<Specification> {
    let mut nodes = BTreeMap::new();
    for (&v, sequences) in per_node {
        let mut traces = Vec::with_capacity(sequences.len());
        for seq in sequences {
            if seq.len() != t as usize + 1 {
                return Err(Error::validation(format!(
                    "sequence for node {v} has {} symbols, horizon needs {}",
                    seq.len(),
                    t + 1
                )));
            }
            traces.push(RleTrace::from_symbols(seq, alphabet)?);
        }
        nodes.insert(v, TraceSet::new(traces));
    }
    Specification::from_sets(t, nodes)
}

// ---------------------------------------------------------------------------
// Trace enumeration
// ---------------------------------------------------------------------------

/// Enumeration endpoint constraints.
#[derive(Clone, Copy, Debug, Default)]
pub struct TraceBounds {
    pub start: Option<State>,
    pub end: Option<State>,
}

/// All monotone traces of length `t + 1` matching the bounds, ordered by
/// canonical key. Refuses to emit more than `cap` traces.
pub fn enumerate_traces(
    alphabet: &Alphabet,
    t: u32,
    bounds: TraceBounds,
    cap: u64,
) -> Result<Vec<RleTrace>> {
    let mut out: Vec<RleTrace> = Vec::new();
    let starts: Vec<State> = match bounds.start {
        Some(s) => vec![s],
        None => alphabet.states().collect(),
    };
    let mut stack: Vec<(State, u32)> = Vec::new();
    for q0 in starts {
        emit_traces(alphabet, t + 1, q0, bounds.end, &mut stack, &mut out, cap)?;
        debug_assert!(stack.is_empty());
    }
    out.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
    Ok(out)
}

fn emit_traces(
    alphabet: &Alphabet,
    remaining: u32,
    state: State,
    end: Option<State>,
    stack: &mut Vec<(State, u32)>,
    out: &mut Vec<RleTrace>,
    cap: u64,
) -> Result<()> {
    // Reaching the end state must stay possible.
    if let Some(e) = end {
        if !alphabet.leq(state, e) {
            return Ok(());
        }
    }
    // Close with a single run covering the rest.
    if end.map(|e| e == state).unwrap_or(true) {
        if out.len() as u64 >= cap {
            return Err(Error::Budget {
                what: "trace enumeration".to_string(),
                needed: cap + 1,
                cap,
            });
        }
        let mut runs = stack.clone();
        runs.push((state, remaining));
        out.push(RleTrace::from_runs_unchecked(runs));
    }
    // Or split: a shorter run here, then a strictly greater state.
    for len in 1..remaining {
        stack.push((state, len));
        for next in alphabet.strictly_above(state) {
            emit_traces(alphabet, remaining - len, next, end, stack, out, cap)?;
        }
        stack.pop();
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SpecFile {
    t: u32,
    nodes: BTreeMap<String, Vec<Vec<(String, u32)>>>,
    #[serde(default = "default_policy")]
    default: String,
}

fn default_policy() -> String {
    "any".to_string()
}

impl Specification {
    /// Parses `{"t": ..., "nodes": {"v": [[[state, len], ...], ...]},
    /// "default": "any"}`. Only the `any` policy for unlisted nodes exists.
    pub fn from_json(text: &str, alphabet: &Alphabet) -> Result<Specification> {
        let file: SpecFile = serde_json::from_str(text)?;
        if file.default != "any" {
            return Err(Error::Unsupported(format!(
                "default policy {:?} is not available, only \"any\"",
                file.default
            )));
        }
        let mut nodes = BTreeMap::new();
        for (name, trace_lists) in file.nodes {
            let v: usize = name
                .parse()
                .map_err(|_| Error::validation(format!("node key {name:?} is not a label")))?;
            let mut traces = Vec::with_capacity(trace_lists.len());
            for runs in trace_lists {
                let resolved: Vec<(State, u32)> = runs
                    .iter()
                    .map(|(state_name, len)| {
                        alphabet
                            .state(state_name)
                            .map(|s| (s, *len))
                            .ok_or_else(|| {
                                Error::validation(format!("unknown state name {state_name:?}"))
                            })
                    })
                    .collect::<Result<_>>()?;
                traces.push(RleTrace::new(resolved, alphabet)?);
            }
            nodes.insert(v, TraceSet::new(traces));
        }
        Specification::from_sets(file.t, nodes)
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> String {
        let nodes: BTreeMap<String, Vec<Vec<(String, u32)>>> = self
            .nodes
            .iter()
            .map(|(&v, set)| {
                let lists: Vec<Vec<(String, u32)>> = set
                    .iter()
                    .map(|tr| {
                        tr.runs()
                            .iter()
                            .map(|&(s, len)| (alphabet.name(s).to_string(), len))
                            .collect()
                    })
                    .collect();
                (v.to_string(), lists)
            })
            .collect();
        let file = SpecFile { t: self.horizon, nodes, default: "any".to_string() };
        serde_json::to_string_pretty(&file).expect("specification serialization")
    }
}

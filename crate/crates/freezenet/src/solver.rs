//! Tree-decomposition dynamic programming for the orbit question.
//!
//! A table is computed for every bag, bottom up along the rooted binary
//! decomposition. The table for bag `X` holds the partially valid traces
//! over `X`, each spanning the closed neighborhood `N[X]`, filtered so that
//! every child bag offers at least one trace agreeing on the domain overlap.
//! The overlap discipline is sound because the bags whose domain mentions a
//! node form a connected subtree: each neighbor's occurrence subtree meets
//! the node's own, so pairwise agreement along tree edges glues to one
//! global trace per node.
//!
//! The instance is satisfiable exactly when the root table is non-empty. A
//! witness is then recovered by following recorded child pointers and is
//! replayed step by step against the rules before it is returned.
//!
//! Bags on one level never read each other, so levels are processed with a
//! dedicated thread pool. Tables, verdicts, and witnesses are byte
//! identical regardless of the thread count.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::core::{Alphabet, Config, Network, State};
use crate::traces::{RleTrace, SequenceEncoding, Specification};
use crate::treedecomp::{levels, validate_decomposition, TreeDecomposition};
use crate::validity::{enumerate_pvt, PVT_CAP};
use crate::{Error, Result};

/// Tuning knobs for [`check_spec`].
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Worker threads per call; 0 picks one per available core.
    pub jobs: usize,
    /// Trace budget per bag before the solver gives up.
    pub bag_cap: u64,
    /// Extract a witness on satisfiable instances. Decision-only callers
    /// turn this off to skip the gluing pass.
    pub want_witness: bool,
    /// Replay extracted witnesses against the rules before returning them.
    pub verify_witness: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { jobs: 1, bag_cap: PVT_CAP, want_witness: true, verify_witness: true }
    }
}

/// One surviving trace of a bag table.
///
/// `children` holds, per child bag in tree order, the least index of a
/// child entry agreeing with this one on the domain overlap.
#[derive(Clone, Debug)]
pub struct DpEntry {
    pub enc: SequenceEncoding,
    pub children: Vec<u32>,
}

/// All surviving traces of one bag, in canonical key order.
#[derive(Clone, Debug)]
pub struct DpTable {
    pub bag: usize,
    /// Closed neighborhood of the bag, ascending.
    pub domain: Vec<usize>,
    pub entries: Vec<DpEntry>,
}

/// Deterministic run measurements. Wall-clock time is carried along for
/// reporting but ignored by equality and serialization, so verdicts can be
/// compared across runs.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SolverStats {
    pub bags: usize,
    pub levels: usize,
    pub width: usize,
    pub horizon: u32,
    pub total_traces: u64,
    pub max_bag_traces: u64,
    pub root_traces: u64,
    #[serde(skip)]
    pub elapsed_ms: u64,
}

impl PartialEq for SolverStats {
    fn eq(&self, other: &Self) -> bool {
        self.bags == other.bags
            && self.levels == other.levels
            && self.width == other.width
            && self.horizon == other.horizon
            && self.total_traces == other.total_traces
            && self.max_bag_traces == other.max_bag_traces
            && self.root_traces == other.root_traces
    }
}

impl Eq for SolverStats {}

/// Outcome of a satisfiability check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub satisfiable: bool,
    /// One orbit meeting the specification, as a trace per node.
    pub witness: Option<BTreeMap<usize, RleTrace>>,
    pub stats: SolverStats,
}

impl Verdict {
    /// JSON rendering with states spelled by name. Deterministic: equal
    /// verdicts serialize to equal bytes.
    pub fn to_json(&self, alphabet: &Alphabet) -> Result<String> {
        #[derive(Serialize)]
        struct VerdictFile<'a> {
            satisfiable: bool,
            witness: Option<BTreeMap<String, Vec<(String, u32)>>>,
            stats: &'a SolverStats,
        }
        let witness = match &self.witness {
            None => None,
            Some(map) => {
                let mut out = BTreeMap::new();
                for (v, trace) in map {
                    let runs = trace
                        .runs()
                        .iter()
                        .map(|&(s, len)| (alphabet.name(s).to_string(), len))
                        .collect();
                    out.insert(v.to_string(), runs);
                }
                Some(out)
            }
        };
        let file = VerdictFile { satisfiable: self.satisfiable, witness, stats: &self.stats };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

/// Decides whether some orbit of `net` satisfies `spec`, working along the
/// given rooted binary tree decomposition.
///
/// The decomposition must be valid for the network's graph and already
/// binary; see [`crate::treedecomp::binarize_balance`] for the balancing
/// pass that produces one.
pub fn check_spec(
    net: &Network,
    spec: &Specification,
    decomp: &TreeDecomposition,
    opts: &SolveOptions,
) -> Result<Verdict> {
    let started = std::time::Instant::now();
    for v in spec.constrained_nodes() {
        if v >= net.n() {
            return Err(Error::validation(format!(
                "specification constrains node {v}, network has {} nodes",
                net.n()
            )));
        }
    }
    let width = validate_decomposition(net.graph(), decomp).map_err(|violations| {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        Error::validation(format!("invalid tree decomposition: {}", lines.join("; ")))
    })?;
    let by_level = levels(decomp)?;
    let children = decomp.children()?;
    let t = spec.horizon();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::internal(format!("thread pool: {e}")))?;

    let mut tables: Vec<Option<DpTable>> = vec![None; decomp.bags().len()];
    for level in &by_level {
        let computed: Vec<Result<DpTable>> = pool.install(|| {
            use rayon::prelude::*;
            level
                .par_iter()
                .map(|&w| compute_table(net, spec, decomp, &children[w], &tables, w, t, opts))
                .collect()
        });
        // Errors surface in bag order so runs with different thread counts
        // fail identically.
        for (pos, result) in computed.into_iter().enumerate() {
            tables[level[pos]] = Some(result?);
        }
    }

    let tables: Vec<DpTable> = tables
        .into_iter()
        .map(|t| t.expect("every bag sits on some level"))
        .collect();
    let root = &tables[decomp.root()];
    let satisfiable = !root.entries.is_empty();

    let mut stats = SolverStats {
        bags: tables.len(),
        levels: by_level.len(),
        width,
        horizon: t,
        total_traces: tables.iter().map(|t| t.entries.len() as u64).sum(),
        max_bag_traces: tables.iter().map(|t| t.entries.len() as u64).max().unwrap_or(0),
        root_traces: root.entries.len() as u64,
        elapsed_ms: 0,
    };

    let witness = if satisfiable && opts.want_witness {
        let glued = glue_witness(net, decomp, &children, &tables)?;
        if opts.verify_witness {
            verify_witness(net, spec, &glued)?;
        }
        Some(glued)
    } else {
        None
    };

    stats.elapsed_ms = started.elapsed().as_millis() as u64;
    Ok(Verdict { satisfiable, witness, stats })
}

#[allow(clippy::too_many_arguments)]
fn compute_table(
    net: &Network,
    spec: &Specification,
    decomp: &TreeDecomposition,
    child_bags: &[usize],
    tables: &[Option<DpTable>],
    w: usize,
    t: u32,
    opts: &SolveOptions,
) -> Result<DpTable> {
    let bag = &decomp.bags()[w];
    let domain = net.graph().closed_neighborhood_of_set(bag);
    let traces = enumerate_pvt(net, spec, bag, t, opts.bag_cap)?;

    // Per child, map overlap keys to the least matching entry index.
    let mut joins: Vec<(Vec<usize>, HashMap<Vec<u8>, u32>)> = Vec::with_capacity(child_bags.len());
    for &c in child_bags {
        let child = tables[c].as_ref().expect("children computed on earlier levels");
        let shared: Vec<usize> = domain
            .iter()
            .copied()
            .filter(|v| child.domain.binary_search(v).is_ok())
            .collect();
        let mut index = HashMap::new();
        if shared.is_empty() {
            // No overlap constrains nothing, but an empty child still kills
            // the bag: its subtree admits no trace at all.
            if !child.entries.is_empty() {
                index.insert(Vec::new(), 0u32);
            }
        } else {
            for (i, entry) in child.entries.iter().enumerate() {
                let key = entry.enc.restrict(&shared)?.canonical_key();
                index.entry(key).or_insert(i as u32);
            }
        }
        joins.push((shared, index));
    }

    let mut entries = Vec::new();
    'next_trace: for pt in traces {
        let enc = pt.into_encoding();
        let mut pointers = Vec::with_capacity(joins.len());
        for (shared, index) in &joins {
            let key =
                if shared.is_empty() { Vec::new() } else { enc.restrict(shared)?.canonical_key() };
            match index.get(&key) {
                Some(&i) => pointers.push(i),
                None => continue 'next_trace,
            }
        }
        entries.push(DpEntry { enc, children: pointers });
    }
    Ok(DpTable { bag: w, domain, entries })
}

/// Reassembles one global trace per node from the root's least entry,
/// following recorded child pointers.
fn glue_witness(
    net: &Network,
    decomp: &TreeDecomposition,
    children: &[Vec<usize>],
    tables: &[DpTable],
) -> Result<BTreeMap<usize, RleTrace>> {
    let mut traces: BTreeMap<usize, RleTrace> = BTreeMap::new();
    let mut stack = vec![(decomp.root(), 0u32)];
    while let Some((w, i)) = stack.pop() {
        let table = &tables[w];
        let entry = table.entries.get(i as usize).ok_or_else(|| {
            Error::internal(format!("bag {w} has no entry {i} while gluing a witness"))
        })?;
        for &v in &table.domain {
            let col = entry.enc.column(v)?;
            match traces.get(&v) {
                Some(existing) if *existing != col => {
                    return Err(Error::internal(format!(
                        "witness columns for node {v} disagree between bags"
                    )));
                }
                Some(_) => {}
                None => {
                    traces.insert(v, col);
                }
            }
        }
        for (&c, &idx) in children[w].iter().zip(entry.children.iter()) {
            stack.push((c, idx));
        }
    }
    for v in 0..net.n() {
        if !traces.contains_key(&v) {
            return Err(Error::internal(format!("witness misses node {v}")));
        }
    }
    Ok(traces)
}

/// Replays a per-node trace assignment as an orbit and checks every step
/// against the rules and every node against the specification.
pub fn verify_witness(
    net: &Network,
    spec: &Specification,
    traces: &BTreeMap<usize, RleTrace>,
) -> Result<()> {
    let n = net.n();
    let t = spec.horizon();
    if traces.len() != n || traces.keys().next_back() != Some(&(n - 1)) {
        return Err(Error::internal("witness does not cover exactly the network's nodes"));
    }
    let mut orbit: Vec<Config> = Vec::with_capacity(t as usize + 1);
    for s in 0..=t {
        let mut c = Vec::with_capacity(n);
        for v in 0..n {
            let state = traces[&v].state_at(s).ok_or_else(|| {
                Error::internal(format!("witness trace for node {v} is shorter than {t}"))
            })?;
            c.push(state);
        }
        orbit.push(c);
    }
    let mut inputs: Vec<State> = Vec::new();
    for s in 0..t as usize {
        for v in 0..n {
            inputs.clear();
            inputs.extend(net.graph().closed_neighborhood(v).iter().map(|&u| orbit[s][u]));
            let allowed = net.successor_states(v, &inputs)?;
            if !allowed.contains(&orbit[s + 1][v]) {
                return Err(Error::internal(format!(
                    "witness step {s} at node {v} is not a legal transition"
                )));
            }
        }
    }
    for v in 0..n {
        if !spec.admits(v, &traces[&v]) {
            return Err(Error::internal(format!(
                "witness trace for node {v} is outside the specification"
            )));
        }
    }
    Ok(())
}

//! Slot layout shared by the circuit gadgets.
//!
//! A routed circuit embedding assigns every gate a host vertex and every
//! wire a host path. The layout derives from that a list of slots per host
//! vertex: one slot for each gate hosted there and one for each wire path
//! position passing through. A gadget then chooses a small value chain per
//! slot; the network state of a used vertex is the tuple of its slot
//! values, tagged with the vertex id so that rules can recognize which
//! neighbor a state belongs to without relying on argument positions.
//! Unused vertices share a single designated `off` state.
//!
//! Every slot knows where its value comes from: a gate slot reads the last
//! path slot of each incoming wire (co-located on the gate's vertex), the
//! first path slot of a wire reads its source gate slot (also co-located),
//! and later path slots read their predecessor on the neighboring path
//! vertex. The inverse map, the consumers of a slot, is precomputed for
//! rules that must wait until a value has been read before advancing.

use crate::core::{Alphabet, Graph, State};
use crate::gadgets::bramble::Bramble;
use crate::gadgets::circuit::{CircuitDag, GateKind};
use crate::gadgets::route::{route, Digraph, RoutedEmbedding};
use crate::{Error, Result};
use std::collections::HashMap;

/// Most slots a single host vertex may carry.
pub(crate) const MAX_SLOTS: usize = 8;

/// Most states a gadget alphabet may reach.
pub(crate) const ALPHABET_CAP: usize = 30_000;

/// What a slot on a host vertex stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum SlotRole {
    /// The value of gate `g`, hosted on `mu(g)`.
    Gate(usize),
    /// Path position `pos` of wire `w`.
    Wire { wire: usize, pos: usize },
    /// Commit marker of input `i` (by input index), hosted next to the
    /// input's gate vertex. Only present when requested.
    PreInput(usize),
}

/// Where a slot's value comes from, relative to the slot's own vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ReadRef {
    Own(usize),
    Neighbor { vertex: usize, slot: usize },
}

pub(crate) struct Layout {
    pub host: Graph,
    pub circuit: CircuitDag,
    pub emb: RoutedEmbedding,
    /// Slots per host vertex; gate slots first, then wire slots in wire
    /// order, then commit markers.
    pub slots: Vec<Vec<SlotRole>>,
    /// Per gate: its slot as (vertex, slot index).
    pub gate_slot: Vec<(usize, usize)>,
    /// Per input index: the commit marker slot. Empty without markers.
    pub pre_slot: Vec<(usize, usize)>,
    /// Per vertex and slot: the value sources, gate arguments in incoming
    /// wire order.
    pub reads: Vec<Vec<Vec<ReadRef>>>,
    /// Per vertex and slot: the slots reading from it.
    pub consumers: Vec<Vec<Vec<ReadRef>>>,
}

impl Layout {
    pub fn new(
        host: &Graph,
        circuit: &CircuitDag,
        b: &Bramble,
        with_commit_markers: bool,
    ) -> Result<Layout> {
        let d = Digraph::from_circuit(circuit);
        let emb = route(host, b, &d)?;
        let mut slots: Vec<Vec<SlotRole>> = vec![Vec::new(); host.n()];
        let mut gate_slot = Vec::with_capacity(circuit.n());
        for g in 0..circuit.n() {
            let v = emb.mu[g];
            gate_slot.push((v, slots[v].len()));
            slots[v].push(SlotRole::Gate(g));
        }
        for (w, path) in emb.paths.iter().enumerate() {
            for (pos, &v) in path.iter().enumerate() {
                slots[v].push(SlotRole::Wire { wire: w, pos });
            }
        }
        let mut pre_slot = Vec::new();
        if with_commit_markers {
            let mu_taken: Vec<bool> = {
                let mut t = vec![false; host.n()];
                for &v in &emb.mu {
                    t[v] = true;
                }
                t
            };
            for &g in &circuit.input_gates() {
                let v = emb.mu[g];
                let h = host
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|&u| !mu_taken[u])
                    .min_by_key(|&u| (slots[u].len(), u))
                    .ok_or_else(|| {
                        Error::Unsupported(format!(
                            "input gate {g} on host vertex {v} has no free neighbor \
                             for its commit marker"
                        ))
                    })?;
                pre_slot.push((h, slots[h].len()));
                slots[h].push(SlotRole::PreInput(pre_slot.len() - 1));
            }
        }
        if let Some(v) = (0..host.n()).find(|&v| slots[v].len() > MAX_SLOTS) {
            return Err(Error::Unsupported(format!(
                "host vertex {v} carries {} slots, supported up to {MAX_SLOTS}",
                slots[v].len()
            )));
        }

        let mut reads: Vec<Vec<Vec<ReadRef>>> =
            slots.iter().map(|s| vec![Vec::new(); s.len()]).collect();
        let input_index: HashMap<usize, usize> =
            circuit.input_gates().iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let last_wire_slot = |w: usize| -> (usize, usize) {
            let path = &emb.paths[w];
            let v = *path.last().expect("paths are non-empty");
            let s = slots[v]
                .iter()
                .position(|r| *r == SlotRole::Wire { wire: w, pos: path.len() - 1 })
                .expect("wire end slot exists");
            (v, s)
        };
        for v in 0..host.n() {
            for s in 0..slots[v].len() {
                let mut sources = Vec::new();
                match slots[v][s] {
                    SlotRole::Gate(g) => {
                        if circuit.kind(g) == GateKind::Input {
                            if with_commit_markers {
                                let (hv, hs) = pre_slot[input_index[&g]];
                                sources.push(make_ref(v, hv, hs));
                            }
                        } else {
                            for &w in circuit.incoming(g) {
                                let (wv, ws) = last_wire_slot(w);
                                sources.push(make_ref(v, wv, ws));
                            }
                        }
                    }
                    SlotRole::Wire { wire, pos } => {
                        if pos == 0 {
                            let (gv, gs) = gate_slot[circuit.wire(wire).0];
                            sources.push(make_ref(v, gv, gs));
                        } else {
                            let pv = emb.paths[wire][pos - 1];
                            let ps = slots[pv]
                                .iter()
                                .position(|r| *r == SlotRole::Wire { wire, pos: pos - 1 })
                                .expect("wire predecessor slot exists");
                            sources.push(make_ref(v, pv, ps));
                        }
                    }
                    SlotRole::PreInput(_) => {}
                }
                reads[v][s] = sources;
            }
        }

        let mut consumers: Vec<Vec<Vec<ReadRef>>> =
            slots.iter().map(|s| vec![Vec::new(); s.len()]).collect();
        for v in 0..host.n() {
            for s in 0..slots[v].len() {
                for r in &reads[v][s] {
                    let (sv, ss) = match *r {
                        ReadRef::Own(slot) => (v, slot),
                        ReadRef::Neighbor { vertex, slot } => (vertex, slot),
                    };
                    consumers[sv][ss].push(make_ref(sv, v, s));
                }
            }
        }

        for (v, sources) in reads.iter().enumerate() {
            for r in sources.iter().flatten() {
                if let ReadRef::Neighbor { vertex, .. } = *r {
                    debug_assert!(host.has_edge(v, vertex), "read across a non-edge");
                }
            }
        }

        Ok(Layout {
            host: host.clone(),
            circuit: circuit.clone(),
            emb,
            slots,
            gate_slot,
            pre_slot,
            reads,
            consumers,
        })
    }

    pub fn used(&self, v: usize) -> bool {
        !self.slots[v].is_empty()
    }
}

fn make_ref(at: usize, vertex: usize, slot: usize) -> ReadRef {
    if vertex == at {
        ReadRef::Own(slot)
    } else {
        ReadRef::Neighbor { vertex, slot }
    }
}

/// The per-slot value chain of a gadget: value names (one character each,
/// used in state names) and the cover pairs of the value order.
pub(crate) struct ValueChain {
    pub names: Vec<char>,
    pub covers: Vec<(u8, u8)>,
}

/// Alphabet of a channel gadget: one `off` state plus, per used vertex, all
/// tuples of slot values. Two states are ordered exactly when they belong
/// to the same vertex and their value tuples are ordered slotwise.
pub(crate) struct ChannelAlphabet {
    pub alphabet: Alphabet,
    pub off: State,
    /// Values per slot in the chain.
    pub k: usize,
    /// Host vertex of each state; `None` for `off`.
    pub vertex_of: Vec<Option<usize>>,
    /// Slot values of each state; empty for `off`.
    pub values_of: Vec<Vec<u8>>,
    /// First state id of each used vertex's block, with its block length.
    pub block: Vec<Option<(State, usize)>>,
}

impl ChannelAlphabet {
    pub fn build(layout: &Layout, chain: &ValueChain) -> Result<ChannelAlphabet> {
        let k = chain.names.len();
        let mut total: usize = 1;
        for v in 0..layout.host.n() {
            if layout.used(v) {
                total = total.saturating_add(k.pow(layout.slots[v].len() as u32));
            }
        }
        if total > ALPHABET_CAP {
            return Err(Error::Unsupported(format!(
                "gadget needs {total} states, supported up to {ALPHABET_CAP}"
            )));
        }
        let mut names = vec!["off".to_string()];
        let mut vertex_of = vec![None];
        let mut values_of = vec![Vec::new()];
        let mut block = vec![None; layout.host.n()];
        let mut order: Vec<(State, State)> = Vec::new();
        for v in 0..layout.host.n() {
            if !layout.used(v) {
                continue;
            }
            let m = layout.slots[v].len();
            let start = names.len() as State;
            let count = k.pow(m as u32);
            block[v] = Some((start, count));
            let mut values = vec![0u8; m];
            for idx in 0..count {
                let mut rest = idx;
                for s in (0..m).rev() {
                    values[s] = (rest % k) as u8;
                    rest /= k;
                }
                let chars: String = values.iter().map(|&x| chain.names[x as usize]).collect();
                names.push(format!("v{v}:{chars}"));
                vertex_of.push(Some(v));
                values_of.push(values.clone());
            }
            // cover pairs: raise one slot along one value cover
            for idx in 0..count {
                let vals = &values_of[start as usize + idx];
                for s in 0..m {
                    for &(lo, hi) in &chain.covers {
                        if vals[s] == lo {
                            let step = (hi as usize - lo as usize) * k.pow((m - 1 - s) as u32);
                            let other = start as usize + idx + step;
                            order.push((start + idx as State, other as State));
                        }
                    }
                }
            }
        }
        let alphabet = Alphabet::new(names, &order)?;
        Ok(ChannelAlphabet { alphabet, off: 0, k, vertex_of, values_of, block })
    }

    pub fn encode(&self, v: usize, values: &[u8]) -> State {
        let (start, _) = self.block[v].expect("vertex is used");
        let mut idx = 0usize;
        for &x in values {
            idx = idx * self.k + x as usize;
        }
        start + idx as State
    }

    /// States a vertex can hold: its own block, or just `off` when unused.
    pub fn support(&self, v: usize) -> Vec<State> {
        match self.block[v] {
            None => vec![self.off],
            Some((start, count)) => (start..start + count as State).collect(),
        }
    }

    /// Resolves a value source against the closed-neighborhood states.
    /// Neighbor states are recognized by their vertex tag, never by their
    /// argument position; an absent or ambiguous tag yields `None`.
    pub fn resolve(&self, inputs: &[State], own: State, r: ReadRef) -> Option<u8> {
        match r {
            ReadRef::Own(slot) => {
                self.values_of.get(own as usize).and_then(|vals| vals.get(slot).copied())
            }
            ReadRef::Neighbor { vertex, slot } => {
                let mut found: Option<State> = None;
                for &s in inputs {
                    if self.vertex_of[s as usize] == Some(vertex) {
                        match found {
                            None => found = Some(s),
                            Some(prev) if prev == s => {}
                            Some(_) => return None,
                        }
                    }
                }
                found.and_then(|s| self.values_of[s as usize].get(slot).copied())
            }
        }
    }
}

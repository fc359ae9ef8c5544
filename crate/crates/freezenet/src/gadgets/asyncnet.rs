//! Asynchronous-reachability gadget for circuit satisfiability.
//!
//! Slots carry values from the chain `? <= 0, 1 <= ok` (bits incomparable)
//! and every used slot starts at `?` and must end at `ok`. The input bits
//! are chosen purely by update order: each input gate reads a commit
//! marker slot hosted on a neighboring vertex, and turns into `1` when it
//! updates while the marker still shows `?`, into `0` once the marker has
//! flipped. Because a vertex updates all of its slots at once, the marker
//! must live on a different vertex; otherwise the first update of the
//! input vertex would flip both together and always commit `1`.
//!
//! Values move forward as in an ordinary evaluation: a slot leaves `?`
//! once its sources carry bits, and a slot holding a bit advances to `ok`
//! only after every consumer has left `?`, so no value can disappear
//! before it was read. The output gate advances to `ok` only from `1`.
//! Hence the all-`ok` goal is reachable from the all-`?` start exactly
//! when some assignment satisfies the circuit, and the reaching schedule
//! follows the four phases of [`AsyncGadget::witness_schedule`].

use crate::core::{Config, Graph, LocalRule, Network, State};
use crate::gadgets::bramble::Bramble;
use crate::gadgets::channel::{ChannelAlphabet, Layout, ReadRef, SlotRole, ValueChain};
use crate::gadgets::circuit::{CircuitDag, GateKind};
use crate::{Error, Result};
use std::sync::Arc;

const V_Q: u8 = 0;
const V_ZERO: u8 = 1;
const V_ONE: u8 = 2;
const V_OK: u8 = 3;

fn chain() -> ValueChain {
    ValueChain {
        names: vec!['q', '0', '1', 'k'],
        covers: vec![(V_Q, V_ZERO), (V_Q, V_ONE), (V_ZERO, V_OK), (V_ONE, V_OK)],
    }
}

struct Core {
    layout: Layout,
    alpha: ChannelAlphabet,
}

impl Core {
    fn read_bit(&self, inputs: &[State], own: State, r: ReadRef) -> Option<u8> {
        match self.alpha.resolve(inputs, own, r) {
            Some(V_ZERO) => Some(0),
            Some(V_ONE) => Some(1),
            _ => None,
        }
    }

    /// True when every slot reading `(v, s)` has left `?`.
    fn consumers_done(&self, v: usize, s: usize, inputs: &[State], own: State) -> bool {
        self.layout.consumers[v][s].iter().all(|&c| {
            matches!(self.alpha.resolve(inputs, own, c), Some(x) if x != V_Q)
        })
    }

    /// Bit a `?` slot would take, when its sources are ready.
    fn incoming_bit(&self, v: usize, s: usize, inputs: &[State], own: State) -> Option<u8> {
        let reads = &self.layout.reads[v][s];
        let arg = |i: usize| self.read_bit(inputs, own, reads[i]);
        match self.layout.slots[v][s] {
            SlotRole::PreInput(_) => None,
            SlotRole::Gate(g) => match self.layout.circuit.kind(g) {
                GateKind::Input => match self.alpha.resolve(inputs, own, reads[0]) {
                    Some(V_Q) => Some(1),
                    Some(V_OK) => Some(0),
                    _ => None,
                },
                GateKind::Identity | GateKind::Output => arg(0),
                GateKind::Not => arg(0).map(|b| 1 - b),
                GateKind::And => Some(arg(0)? & arg(1)?),
                GateKind::Or => Some(arg(0)? | arg(1)?),
            },
            SlotRole::Wire { .. } => arg(0),
        }
    }
}

impl LocalRule for Core {
    fn image(&self, node: usize, inputs: &[State]) -> Vec<State> {
        let own = inputs[self_pos(&self.layout.host, node)];
        if self.alpha.vertex_of[own as usize] != Some(node) {
            return vec![own];
        }
        let vals = &self.alpha.values_of[own as usize];
        let mut next = Vec::with_capacity(vals.len());
        for (s, &x) in vals.iter().enumerate() {
            let role = self.layout.slots[node][s];
            let y = match x {
                V_OK => V_OK,
                V_Q => match role {
                    SlotRole::PreInput(_) => V_OK,
                    _ => match self.incoming_bit(node, s, inputs, own) {
                        Some(0) => V_ZERO,
                        Some(1) => V_ONE,
                        _ => V_Q,
                    },
                },
                bit => {
                    let may_leave = match role {
                        SlotRole::Gate(g)
                            if self.layout.circuit.kind(g) == GateKind::Output =>
                        {
                            bit == V_ONE
                        }
                        _ => true,
                    };
                    if may_leave && self.consumers_done(node, s, inputs, own) {
                        V_OK
                    } else {
                        bit
                    }
                }
            };
            next.push(y);
        }
        vec![self.alpha.encode(node, &next)]
    }

    fn support(&self, node: usize) -> Option<Vec<State>> {
        Some(self.alpha.support(node))
    }
}

fn self_pos(g: &Graph, v: usize) -> usize {
    g.closed_neighborhood(v).iter().position(|&u| u == v).expect("vertex in own neighborhood")
}

/// A freezing network with a start and goal configuration whose
/// asynchronous reachability encodes circuit satisfiability.
pub struct AsyncGadget {
    pub net: Network,
    pub start: Config,
    pub goal: Config,
    core: Arc<Core>,
}

/// Builds the asynchronous-reachability gadget for `circuit` routed
/// through `b` on `host`. The circuit needs exactly one output gate.
pub fn circuit_async_gadget(
    host: &Graph,
    b: &Bramble,
    circuit: &CircuitDag,
) -> Result<AsyncGadget> {
    if circuit.output_gates().len() != 1 {
        return Err(Error::validation(format!(
            "async gadget needs exactly one output gate, circuit has {}",
            circuit.output_gates().len()
        )));
    }
    let layout = Layout::new(host, circuit, b, true)?;
    let alpha = ChannelAlphabet::build(&layout, &chain())?;
    let mut start = Vec::with_capacity(host.n());
    let mut goal = Vec::with_capacity(host.n());
    for v in 0..host.n() {
        if layout.used(v) {
            let m = layout.slots[v].len();
            start.push(alpha.encode(v, &vec![V_Q; m]));
            goal.push(alpha.encode(v, &vec![V_OK; m]));
        } else {
            start.push(alpha.off);
            goal.push(alpha.off);
        }
    }
    let core = Arc::new(Core { layout, alpha });
    let net = Network::new_func(
        host.clone(),
        core.alpha.alphabet.clone(),
        core.clone() as Arc<dyn LocalRule>,
        true,
    );
    Ok(AsyncGadget { net, start, goal, core })
}

impl AsyncGadget {
    pub fn inputs(&self) -> usize {
        self.core.layout.circuit.input_gates().len()
    }

    /// Applies one asynchronous step: the vertices in `set` update
    /// together from the current configuration.
    pub fn apply(&self, config: &Config, set: &[usize]) -> Result<Config> {
        let mut next = config.clone();
        for &v in set {
            let hood = self.net.graph().closed_neighborhood(v);
            let states: Vec<State> = hood.iter().map(|&u| config[u]).collect();
            let out = self.net.successor_states(v, &states)?;
            next[v] = out[0];
        }
        Ok(next)
    }

    /// Replays a schedule from the start configuration.
    pub fn replay(&self, schedule: &[Vec<usize>]) -> Result<Config> {
        let mut config = self.start.clone();
        for set in schedule {
            config = self.apply(&config, set)?;
        }
        Ok(config)
    }

    /// A schedule reaching the goal under a satisfying `assignment`:
    /// first the vertices of the inputs set to one (their markers still
    /// show `?`), then all marker hosts, then the inputs set to zero, then
    /// single-vertex steps wherever the rule makes progress. Errors with
    /// [`Error::Internal`] when the run stalls short of the goal, which
    /// happens exactly when `assignment` does not satisfy the circuit.
    pub fn witness_schedule(&self, assignment: &[bool]) -> Result<Vec<Vec<usize>>> {
        let layout = &self.core.layout;
        let inputs = layout.circuit.input_gates();
        if assignment.len() != inputs.len() {
            return Err(Error::validation(format!(
                "assignment has {} bits, circuit has {} inputs",
                assignment.len(),
                inputs.len()
            )));
        }
        let mut schedule: Vec<Vec<usize>> = Vec::new();
        let mut config = self.start.clone();
        let ones: Vec<usize> = inputs
            .iter()
            .enumerate()
            .filter(|&(i, _)| assignment[i])
            .map(|(_, &g)| layout.emb.mu[g])
            .collect();
        let mut hosts: Vec<usize> = layout.pre_slot.iter().map(|&(h, _)| h).collect();
        hosts.sort_unstable();
        hosts.dedup();
        let zeros: Vec<usize> = inputs
            .iter()
            .enumerate()
            .filter(|&(i, _)| !assignment[i])
            .map(|(_, &g)| layout.emb.mu[g])
            .collect();
        for set in [ones, hosts, zeros] {
            if !set.is_empty() {
                config = self.apply(&config, &set)?;
                schedule.push(set);
            }
        }

        let slot_count: usize = layout.slots.iter().map(|s| s.len()).sum();
        let mut budget = 3 * slot_count + self.net.graph().n() + 8;
        'outer: while config != self.goal {
            for v in 0..self.net.graph().n() {
                let next = self.apply(&config, &[v])?;
                if next != config {
                    if budget == 0 {
                        return Err(Error::internal(
                            "async witness run exceeded its step budget".to_string(),
                        ));
                    }
                    budget -= 1;
                    config = next;
                    schedule.push(vec![v]);
                    continue 'outer;
                }
            }
            return Err(Error::internal(format!(
                "async witness run stalled; assignment {assignment:?} does not satisfy \
                 the circuit"
            )));
        }
        Ok(schedule)
    }
}

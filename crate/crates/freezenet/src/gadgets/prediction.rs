//! Output prediction gadget for monotone circuit evaluation.
//!
//! A monotone alternating circuit is routed through a bramble and its
//! slots carry values from the linear chain `wait <= 0 <= 1`. Input gate
//! slots are seeded with the queried assignment, every other used slot
//! starts at `wait` and commits once its sources determine it: an and
//! slot fires `0` on the first `0` argument and `1` once both arguments
//! hold `1`, an or slot dually, copies follow their single source. Bits
//! never change again, so the network evaluates the circuit by latching
//! values level by level along the routed wire paths.
//!
//! A gate whose longest incoming gate chain has `d` gates holds its value
//! within `(d - 1) * (longest wire path + 2)` steps, so the gadget's
//! horizon `depth * (longest + 2)` leaves a full level of slack. Reading
//! the output gate slot of the settled orbit evaluates the circuit, and
//! [`PredictionGadget::spec_for_node`] turns the same question into a
//! single-node trace specification for the model checker: the traces of
//! the output host vertex that end with the expected output bit.

use crate::core::{Config, Graph, LocalRule, Network, State};
use crate::gadgets::bramble::Bramble;
use crate::gadgets::channel::{ChannelAlphabet, Layout, ReadRef, SlotRole, ValueChain};
use crate::gadgets::circuit::{CircuitDag, GateKind};
use crate::traces::{enumerate_traces, TraceBounds, TraceSet, TRACE_ENUMERATION_CAP};
use crate::{Error, Result};
use std::sync::Arc;

const V_WAIT: u8 = 0;
const V_ZERO: u8 = 1;
const V_ONE: u8 = 2;

fn chain() -> ValueChain {
    ValueChain { names: vec!['w', '0', '1'], covers: vec![(V_WAIT, V_ZERO), (V_ZERO, V_ONE)] }
}

fn bit_value(b: bool) -> u8 {
    if b {
        V_ONE
    } else {
        V_ZERO
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

    /// Bit a waiting slot can already commit to, given its determined
    /// sources; `None` while the sources leave it open.
    fn resolved(&self, v: usize, s: usize, inputs: &[State], own: State) -> Option<u8> {
        let reads = &self.layout.reads[v][s];
        let arg = |i: usize| self.read_bit(inputs, own, reads[i]);
        match self.layout.slots[v][s] {
            SlotRole::Gate(g) => match self.layout.circuit.kind(g) {
                GateKind::Input => None,
                GateKind::Identity | GateKind::Output => arg(0),
                GateKind::Not => unreachable!("monotone circuits carry no inverters"),
                GateKind::And => match (arg(0), arg(1)) {
                    (Some(0), _) | (_, Some(0)) => Some(0),
                    (Some(1), Some(1)) => Some(1),
                    _ => None,
                },
                GateKind::Or => match (arg(0), arg(1)) {
                    (Some(1), _) | (_, Some(1)) => Some(1),
                    (Some(0), Some(0)) => Some(0),
                    _ => None,
                },
            },
            SlotRole::Wire { .. } => arg(0),
            SlotRole::PreInput(_) => unreachable!("no markers in this gadget"),
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
            let y = if x == V_WAIT {
                match self.resolved(node, s, inputs, own) {
                    Some(0) => V_ZERO,
                    Some(_) => V_ONE,
                    None => V_WAIT,
                }
            } else {
                x
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

/// A freezing network seeded with a circuit assignment, whose settled
/// output slot carries the circuit value.
pub struct PredictionGadget {
    pub net: Network,
    pub start: Config,
    /// Host vertex carrying the output gate slot.
    pub node: usize,
    pub horizon: u32,
    out_slot: usize,
    expected: bool,
    core: Arc<Core>,
}

/// Builds the prediction gadget for `circuit` routed through `b` on
/// `host`, seeded with the assignment `x`. The circuit must be monotone
/// and alternating with exactly one output gate.
pub fn routed_prediction_gadget(
    host: &Graph,
    b: &Bramble,
    circuit: &CircuitDag,
    x: &[bool],
) -> Result<PredictionGadget> {
    if circuit.output_gates().len() != 1 {
        return Err(Error::validation(format!(
            "prediction gadget needs exactly one output gate, circuit has {}",
            circuit.output_gates().len()
        )));
    }
    if !circuit.is_monotone() {
        return Err(Error::validation("prediction gadget needs a monotone circuit"));
    }
    if !circuit.is_alternating() {
        return Err(Error::validation("prediction gadget needs an alternating circuit"));
    }
    let input_gates = circuit.input_gates();
    if x.len() != input_gates.len() {
        return Err(Error::validation(format!(
            "assignment has {} bits, circuit has {} inputs",
            x.len(),
            input_gates.len()
        )));
    }
    let layout = Layout::new(host, circuit, b, false)?;
    let alpha = ChannelAlphabet::build(&layout, &chain())?;

    let mut seeded: Vec<Option<bool>> = vec![None; circuit.n()];
    for (i, &g) in input_gates.iter().enumerate() {
        seeded[g] = Some(x[i]);
    }
    let mut start = Vec::with_capacity(host.n());
    for v in 0..host.n() {
        if !layout.used(v) {
            start.push(alpha.off);
            continue;
        }
        let vals: Vec<u8> = layout.slots[v]
            .iter()
            .map(|role| match *role {
                SlotRole::Gate(g) => seeded[g].map_or(V_WAIT, bit_value),
                _ => V_WAIT,
            })
            .collect();
        start.push(alpha.encode(v, &vals));
    }

    let levels = circuit.depth() as u32;
    let longest =
        layout.emb.paths.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0) as u32;
    let horizon = levels * (longest + 2);

    let out_gate = circuit.output_gates()[0];
    let (node, out_slot) = layout.gate_slot[out_gate];
    let expected = circuit.eval(x)?[out_gate];

    let core = Arc::new(Core { layout, alpha });
    let net = Network::new_func(
        host.clone(),
        core.alpha.alphabet.clone(),
        core.clone() as Arc<dyn LocalRule>,
        true,
    );
    Ok(PredictionGadget { net, start, node, horizon, out_slot, expected, core })
}

impl PredictionGadget {
    pub fn inputs(&self) -> usize {
        self.core.layout.circuit.input_gates().len()
    }

    /// The circuit value under the seeded assignment, by direct evaluation.
    pub fn expected_output(&self) -> bool {
        self.expected
    }

    /// Output gate bit encoded in a state of the output host vertex, if
    /// the state belongs to that vertex and the slot holds a bit.
    pub fn output_bit(&self, s: State) -> Option<bool> {
        if self.core.alpha.vertex_of[s as usize] != Some(self.node) {
            return None;
        }
        match self.core.alpha.values_of[s as usize][self.out_slot] {
            V_ZERO => Some(false),
            V_ONE => Some(true),
            _ => None,
        }
    }

    /// Runs the orbit to the horizon and reads the output slot.
    pub fn simulate_output(&self) -> Result<bool> {
        let orbit = self.net.orbit(&self.start, self.horizon)?;
        let last = orbit.last().expect("orbit holds the start");
        self.output_bit(last[self.node]).ok_or_else(|| {
            Error::internal("output slot still undetermined at the firing horizon")
        })
    }

    /// Traces of the output host vertex that start at the seeded state and
    /// end with the output slot holding the circuit value.
    pub fn spec_for_node(&self) -> Result<TraceSet> {
        let traces = enumerate_traces(
            self.net.alphabet(),
            self.horizon,
            TraceBounds { start: Some(self.start[self.node]), end: None },
            TRACE_ENUMERATION_CAP,
        )?;
        let keep = traces
            .into_iter()
            .filter(|tr| self.output_bit(tr.final_state()) == Some(self.expected))
            .collect();
        Ok(TraceSet::new(keep))
    }
}

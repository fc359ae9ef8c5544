//! Predecessor-existence gadget for circuit satisfiability.
//!
//! The circuit is routed through a bramble and its slots carry values from
//! the chain `0, 1 <= ok <= off` (with `0` and `1` incomparable). The rule
//! freezes `off`, moves `ok` to `off`, and moves a bit to `ok` exactly when
//! the slot is locally consistent: a gate slot must equal its operator
//! applied to the incoming wire ends, a wire slot must equal its
//! predecessor on the path, the output gate must additionally hold `1`,
//! and input gate slots are unconstrained. The target configuration is
//! `ok` on every used slot and `off` elsewhere.
//!
//! A configuration maps onto the target exactly when every used slot holds
//! a bit and every local check passes, which forces a consistent circuit
//! evaluation with output `1`. The target therefore has a predecessor if
//! and only if the circuit is satisfiable, and any predecessor is one of
//! the assignment configurations enumerated by
//! [`PredecessorGadget::has_predecessor_by_assignments`].

use crate::core::{Config, Graph, LocalRule, Network, State};
use crate::gadgets::bramble::Bramble;
use crate::gadgets::channel::{ChannelAlphabet, Layout, ReadRef, SlotRole, ValueChain};
use crate::gadgets::circuit::{CircuitDag, GateKind};
use crate::{Error, Result};
use std::sync::Arc;

const V_ZERO: u8 = 0;
const V_ONE: u8 = 1;
const V_OK: u8 = 2;
const V_OFF: u8 = 3;

fn chain() -> ValueChain {
    ValueChain {
        names: vec!['0', '1', 'k', 'f'],
        covers: vec![(V_ZERO, V_OK), (V_ONE, V_OK), (V_OK, V_OFF)],
    }
}

struct Core {
    layout: Layout,
    alpha: ChannelAlphabet,
}

impl Core {
    /// Bit carried by a read source, when it currently holds one.
    fn read_bit(&self, inputs: &[State], own: State, r: ReadRef) -> Option<u8> {
        match self.alpha.resolve(inputs, own, r) {
            Some(V_ZERO) => Some(0),
            Some(V_ONE) => Some(1),
            _ => None,
        }
    }

    fn slot_checks_out(&self, v: usize, s: usize, bit: u8, inputs: &[State], own: State) -> bool {
        let reads = &self.layout.reads[v][s];
        let arg = |i: usize| self.read_bit(inputs, own, reads[i]);
        match self.layout.slots[v][s] {
            SlotRole::Gate(g) => match self.layout.circuit.kind(g) {
                GateKind::Input => true,
                GateKind::Identity => arg(0) == Some(bit),
                GateKind::Not => arg(0).map(|b| 1 - b) == Some(bit),
                GateKind::And => match (arg(0), arg(1)) {
                    (Some(a), Some(b)) => (a & b) == bit,
                    _ => false,
                },
                GateKind::Or => match (arg(0), arg(1)) {
                    (Some(a), Some(b)) => (a | b) == bit,
                    _ => false,
                },
                GateKind::Output => bit == 1 && arg(0) == Some(1),
            },
            SlotRole::Wire { .. } => arg(0) == Some(bit),
            SlotRole::PreInput(_) => true,
        }
    }
}

impl LocalRule for Core {
    fn image(&self, node: usize, inputs: &[State]) -> Vec<State> {
        let own = inputs[self_pos(&self.layout.host, node)];
        if self.alpha.vertex_of[own as usize] != Some(node) {
            // off, or a state tagged for another vertex: hold it
            return vec![own];
        }
        let vals = &self.alpha.values_of[own as usize];
        let mut next = Vec::with_capacity(vals.len());
        for (s, &x) in vals.iter().enumerate() {
            let y = match x {
                V_OK | V_OFF => V_OFF,
                bit => {
                    if self.slot_checks_out(node, s, bit, inputs, own) {
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

/// A freezing network together with the target configuration whose
/// predecessors are the consistent circuit evaluations.
pub struct PredecessorGadget {
    pub net: Network,
    pub target: Config,
    core: Arc<Core>,
}

/// Builds the predecessor gadget for `circuit` routed through `b` on
/// `host`. The circuit needs exactly one output gate.
pub fn circuit_predecessor_gadget(
    host: &Graph,
    b: &Bramble,
    circuit: &CircuitDag,
) -> Result<PredecessorGadget> {
    if circuit.output_gates().len() != 1 {
        return Err(Error::validation(format!(
            "predecessor gadget needs exactly one output gate, circuit has {}",
            circuit.output_gates().len()
        )));
    }
    let layout = Layout::new(host, circuit, b, false)?;
    let alpha = ChannelAlphabet::build(&layout, &chain())?;
    let mut target = Vec::with_capacity(host.n());
    for v in 0..host.n() {
        if layout.used(v) {
            let vals = vec![V_OK; layout.slots[v].len()];
            target.push(alpha.encode(v, &vals));
        } else {
            target.push(alpha.off);
        }
    }
    let core = Arc::new(Core { layout, alpha });
    let net = Network::new_func(
        host.clone(),
        core.alpha.alphabet.clone(),
        core.clone() as Arc<dyn LocalRule>,
        true,
    );
    Ok(PredecessorGadget { net, target, core })
}

impl PredecessorGadget {
    pub fn inputs(&self) -> usize {
        self.core.layout.circuit.input_gates().len()
    }

    /// The configuration carrying the circuit evaluation under
    /// `assignment`: every gate slot holds its gate value, every wire slot
    /// the value of its source gate.
    pub fn assignment_config(&self, assignment: &[bool]) -> Result<Config> {
        let layout = &self.core.layout;
        let val = layout.circuit.eval(assignment)?;
        let mut config = Vec::with_capacity(layout.host.n());
        for v in 0..layout.host.n() {
            if !layout.used(v) {
                config.push(self.core.alpha.off);
                continue;
            }
            let vals: Vec<u8> = layout.slots[v]
                .iter()
                .map(|role| {
                    let bit = match *role {
                        SlotRole::Gate(g) => val[g],
                        SlotRole::Wire { wire, .. } => val[layout.circuit.wire(wire).0],
                        SlotRole::PreInput(_) => unreachable!("no markers in this gadget"),
                    };
                    if bit {
                        V_ONE
                    } else {
                        V_ZERO
                    }
                })
                .collect();
            config.push(self.core.alpha.encode(v, &vals));
        }
        Ok(config)
    }

    /// Decides predecessor existence by running every assignment
    /// configuration one step. Exhaustive because any predecessor of the
    /// target must hold bits that pass all local checks, and those are
    /// exactly the assignment configurations.
    pub fn has_predecessor_by_assignments(&self) -> Result<bool> {
        let n = self.inputs();
        if n > 24 {
            return Err(Error::Budget {
                what: format!("assignment sweep over {n} inputs"),
                needed: 1u64 << n,
                cap: 1 << 24,
            });
        }
        let mut assignment = vec![false; n];
        for mask in 0u64..(1u64 << n) {
            for (i, slot) in assignment.iter_mut().enumerate() {
                *slot = mask >> i & 1 == 1;
            }
            let y = self.assignment_config(&assignment)?;
            if self.net.step_deterministic(&y)? == self.target {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

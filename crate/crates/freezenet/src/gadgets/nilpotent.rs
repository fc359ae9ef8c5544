//! Nilpotency gadget for circuit satisfiability.
//!
//! Every vertex holds a vector of `c` bits, where `c` is the largest slot
//! count of the layout, or the absorbing error state `bot`. The order
//! relates every vector to `bot` and nothing else, so the rule may either
//! keep a state or replace it with `bot`. A vertex falls to `bot` when it
//! sees `bot` anywhere in its closed neighborhood, when a padding bit
//! outside its own slots is set, or when one of its slots is locally
//! inconsistent: gate slots must equal their operator applied to the
//! incoming wire ends, wire slots must copy their path predecessor, and
//! the output gate slot must hold `1`. Input gate slots are free.
//!
//! The fixed points are therefore the all-`bot` configuration and the
//! consistent circuit evaluations with output `1`. On a connected host any
//! other configuration decays: some vertex turns `bot` and the error
//! spreads. The network is nilpotent, every orbit reaching one common
//! fixed point, exactly when the circuit is unsatisfiable.

use crate::core::{Alphabet, Config, Graph, LocalRule, Network, State};
use crate::gadgets::bramble::Bramble;
use crate::gadgets::channel::{Layout, ReadRef, SlotRole};
use crate::gadgets::circuit::{CircuitDag, GateKind};
use crate::{Error, Result};
use std::sync::Arc;

struct Core {
    layout: Layout,
    /// Bits per state vector; the largest slot count in the layout.
    c: usize,
    bot: State,
    /// Per vertex and slot: the value sources as (input position, slot).
    read_pos: Vec<Vec<Vec<(usize, usize)>>>,
    self_pos: Vec<usize>,
}

impl Core {
    fn bit(&self, state: State, slot: usize) -> u8 {
        ((state >> (self.c - 1 - slot)) & 1) as u8
    }

    fn checks_out(&self, v: usize, s: usize, own: State, inputs: &[State]) -> bool {
        let bit = self.bit(own, s);
        let arg = |i: usize| {
            let (pos, slot) = self.read_pos[v][s][i];
            self.bit(inputs[pos], slot)
        };
        match self.layout.slots[v][s] {
            SlotRole::Gate(g) => match self.layout.circuit.kind(g) {
                GateKind::Input => true,
                GateKind::Identity => arg(0) == bit,
                GateKind::Not => 1 - arg(0) == bit,
                GateKind::And => (arg(0) & arg(1)) == bit,
                GateKind::Or => (arg(0) | arg(1)) == bit,
                GateKind::Output => bit == 1 && arg(0) == 1,
            },
            SlotRole::Wire { .. } => arg(0) == bit,
            SlotRole::PreInput(_) => true,
        }
    }
}

impl LocalRule for Core {
    fn image(&self, node: usize, inputs: &[State]) -> Vec<State> {
        if inputs.iter().any(|&s| s == self.bot) {
            return vec![self.bot];
        }
        let own = inputs[self.self_pos[node]];
        let used = self.layout.slots[node].len();
        for s in used..self.c {
            if self.bit(own, s) != 0 {
                return vec![self.bot];
            }
        }
        for s in 0..used {
            if !self.checks_out(node, s, own, inputs) {
                return vec![self.bot];
            }
        }
        vec![own]
    }

    fn support(&self, node: usize) -> Option<Vec<State>> {
        let used = self.layout.slots[node].len();
        let mut out: Vec<State> = Vec::with_capacity((1 << used) + 1);
        for idx in 0..(1u32 << used) {
            out.push((idx << (self.c - used)) as State);
        }
        out.push(self.bot);
        out.sort_unstable();
        Some(out)
    }
}

/// A deterministic freezing network that is nilpotent exactly when its
/// circuit is unsatisfiable.
pub struct NilpotencyGadget {
    pub net: Network,
    core: Arc<Core>,
}

/// Builds the nilpotency gadget for `circuit` routed through `b` on
/// `host`. The circuit needs exactly one output gate.
pub fn sat_nilpotency_gadget(
    host: &Graph,
    b: &Bramble,
    circuit: &CircuitDag,
) -> Result<NilpotencyGadget> {
    if circuit.output_gates().len() != 1 {
        return Err(Error::validation(format!(
            "nilpotency gadget needs exactly one output gate, circuit has {}",
            circuit.output_gates().len()
        )));
    }
    let layout = Layout::new(host, circuit, b, false)?;
    let c = layout.slots.iter().map(|s| s.len()).max().unwrap_or(0).max(1);
    let mut names: Vec<String> = (0..1u32 << c)
        .map(|idx| (0..c).map(|s| if idx >> (c - 1 - s) & 1 == 1 { '1' } else { '0' }).collect())
        .collect();
    let bot = names.len() as State;
    names.push("bot".to_string());
    let order: Vec<(State, State)> = (0..bot).map(|s| (s, bot)).collect();
    let alphabet = Alphabet::new(names, &order)?;

    let self_pos: Vec<usize> = (0..host.n())
        .map(|v| {
            host.closed_neighborhood(v).iter().position(|&u| u == v).expect("self in neighborhood")
        })
        .collect();
    let read_pos: Vec<Vec<Vec<(usize, usize)>>> = (0..host.n())
        .map(|v| {
            let hood = host.closed_neighborhood(v);
            layout.reads[v]
                .iter()
                .map(|sources| {
                    sources
                        .iter()
                        .map(|r| {
                            let (sv, ss) = match *r {
                                ReadRef::Own(slot) => (v, slot),
                                ReadRef::Neighbor { vertex, slot } => (vertex, slot),
                            };
                            let pos = hood
                                .iter()
                                .position(|&u| u == sv)
                                .expect("read source inside the closed neighborhood");
                            (pos, ss)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let core = Arc::new(Core { layout, c, bot, read_pos, self_pos });
    let net = Network::new_func(host.clone(), alphabet, core.clone() as Arc<dyn LocalRule>, true);
    Ok(NilpotencyGadget { net, core })
}

impl NilpotencyGadget {
    pub fn inputs(&self) -> usize {
        self.core.layout.circuit.input_gates().len()
    }

    pub fn all_bot(&self) -> Config {
        vec![self.core.bot; self.net.graph().n()]
    }

    /// The configuration carrying the circuit evaluation under
    /// `assignment`; a fixed point exactly when the output evaluates to 1.
    pub fn consistent_config(&self, assignment: &[bool]) -> Result<Config> {
        let layout = &self.core.layout;
        let val = layout.circuit.eval(assignment)?;
        let mut config = Vec::with_capacity(layout.host.n());
        for v in 0..layout.host.n() {
            let mut state: State = 0;
            for (s, role) in layout.slots[v].iter().enumerate() {
                let bit = match *role {
                    SlotRole::Gate(g) => val[g],
                    SlotRole::Wire { wire, .. } => val[layout.circuit.wire(wire).0],
                    SlotRole::PreInput(_) => unreachable!("no markers in this gadget"),
                };
                if bit {
                    state |= 1 << (self.core.c - 1 - s);
                }
            }
            config.push(state);
        }
        Ok(config)
    }

    /// True when some assignment yields a `bot`-free fixed point, checked
    /// directly as `F(c) = c` over all assignments.
    pub fn has_satisfying_fixed_point(&self) -> Result<bool> {
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
            let c = self.consistent_config(&assignment)?;
            if self.net.step_deterministic(&c)? == c {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Iterates the network until the configuration stops changing.
    pub fn run_to_fixed(&self, start: &Config) -> Result<Config> {
        let mut current = start.clone();
        // any orbit fixes within one decay sweep plus the error spread
        let limit = self.net.graph().n() as u32 + 4;
        for _ in 0..limit {
            let next = self.net.step_deterministic(&current)?;
            if next == current {
                return Ok(current);
            }
            current = next;
        }
        Err(Error::internal("nilpotency gadget failed to settle".to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::validate_network;
    use crate::gadgets::bramble::grid_bramble;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn or2() -> CircuitDag {
        CircuitDag::new(
            vec![GateKind::Input, GateKind::Input, GateKind::Or, GateKind::Output],
            vec![(0, 2), (1, 2), (2, 3)],
        )
        .unwrap()
    }

    fn contradiction() -> CircuitDag {
        CircuitDag::new(
            vec![GateKind::Input, GateKind::Not, GateKind::And, GateKind::Output],
            vec![(0, 1), (0, 2), (1, 2), (2, 3)],
        )
        .unwrap()
    }

    fn build(c: &CircuitDag) -> NilpotencyGadget {
        let host = Graph::grid(4, 4).unwrap();
        let b = grid_bramble(4).unwrap();
        sat_nilpotency_gadget(&host, &b, c).unwrap()
    }

    fn random_config(g: &NilpotencyGadget, rng: &mut ChaCha8Rng) -> Config {
        (0..g.net.graph().n())
            .map(|v| {
                let support = g.net.support(v).expect("closure backend narrows support");
                support[rng.gen_range(0..support.len())]
            })
            .collect()
    }

    #[test]
    fn network_passes_validation() {
        let g = build(&or2());
        let report = validate_network(&g.net, 20_000);
        assert!(report.is_valid(), "{}", report.describe(&g.net));
    }

    #[test]
    fn satisfying_evaluations_are_fixed_points() {
        let g = build(&or2());
        assert!(g.has_satisfying_fixed_point().unwrap());
        let fixed = g.consistent_config(&[true, false]).unwrap();
        assert_eq!(g.net.step_deterministic(&fixed).unwrap(), fixed);
        // output 0 decays to all-bot instead
        let loose = g.consistent_config(&[false, false]).unwrap();
        assert_ne!(g.net.step_deterministic(&loose).unwrap(), loose);
        assert_eq!(g.run_to_fixed(&loose).unwrap(), g.all_bot());
    }

    #[test]
    fn unsatisfiable_circuits_always_decay() {
        let g = build(&contradiction());
        assert!(!g.has_satisfying_fixed_point().unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(0x60d);
        for _ in 0..50 {
            let start = random_config(&g, &mut rng);
            assert_eq!(g.run_to_fixed(&start).unwrap(), g.all_bot());
        }
    }

    #[test]
    fn every_random_orbit_settles_on_a_fixed_point() {
        let g = build(&or2());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let start = random_config(&g, &mut rng);
            let end = g.run_to_fixed(&start).unwrap();
            assert_eq!(g.net.step_deterministic(&end).unwrap(), end);
        }
    }
}

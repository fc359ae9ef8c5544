//! Boolean circuits as wired DAGs with bounded fan-in and fan-out.
//!
//! Gates are numbered, wires are ordered pairs of gate ids, and evaluation
//! assigns one bit per gate. Fan-in is fixed by the gate kind (two for and,
//! or; one for not, identity, output; zero for inputs) and fan-out is
//! capped at two everywhere, so a circuit drops straight into the routing
//! machinery as a degree-bounded digraph.

use serde::{Deserialize, Serialize};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Input,
    Identity,
    Not,
    And,
    Or,
    Output,
}

impl GateKind {
    pub fn fan_in(self) -> usize {
        match self {
            GateKind::Input => 0,
            GateKind::Identity | GateKind::Not | GateKind::Output => 1,
            GateKind::And | GateKind::Or => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GateKind::Input => "input",
            GateKind::Identity => "identity",
            GateKind::Not => "not",
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Output => "output",
        }
    }

    fn parse(s: &str) -> Result<GateKind> {
        match s {
            "input" => Ok(GateKind::Input),
            "identity" => Ok(GateKind::Identity),
            "not" => Ok(GateKind::Not),
            "and" => Ok(GateKind::And),
            "or" => Ok(GateKind::Or),
            "output" => Ok(GateKind::Output),
            other => Err(Error::validation(format!("unknown gate kind {other:?}"))),
        }
    }
}

/// An acyclic wired circuit. Wire order is the construction order; the
/// incoming wires of a gate keep that order, which fixes argument positions
/// for evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitDag {
    kinds: Vec<GateKind>,
    wires: Vec<(usize, usize)>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CircuitFile {
    gates: Vec<String>,
    wires: Vec<(usize, usize)>,
}

impl CircuitDag {
    pub fn new(kinds: Vec<GateKind>, wires: Vec<(usize, usize)>) -> Result<CircuitDag> {
        let n = kinds.len();
        if n == 0 {
            return Err(Error::validation("circuit needs at least one gate"));
        }
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        for (w, &(a, b)) in wires.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::validation(format!("wire {w} = ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::validation(format!("wire {w} loops on gate {a}")));
            }
            if !seen.insert((a, b)) {
                return Err(Error::validation(format!("duplicate wire ({a}, {b})")));
            }
            outgoing[a].push(w);
            incoming[b].push(w);
        }
        for (g, kind) in kinds.iter().enumerate() {
            let want = kind.fan_in();
            let got = incoming[g].len();
            if got != want {
                return Err(Error::validation(format!(
                    "{} gate {g} has fan-in {got}, needs {want}",
                    kind.label()
                )));
            }
            let out = outgoing[g].len();
            let cap = if *kind == GateKind::Output { 0 } else { 2 };
            if out > cap {
                return Err(Error::validation(format!(
                    "{} gate {g} has fan-out {out}, limit is {cap}",
                    kind.label()
                )));
            }
        }
        let topo = topo_order(n, &wires)?;
        Ok(CircuitDag { kinds, wires, incoming, outgoing, topo })
    }

    pub fn n(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self, g: usize) -> GateKind {
        self.kinds[g]
    }

    pub fn wires(&self) -> &[(usize, usize)] {
        &self.wires
    }

    pub fn wire(&self, w: usize) -> (usize, usize) {
        self.wires[w]
    }

    /// Incoming wire ids of `g`, in construction order.
    pub fn incoming(&self, g: usize) -> &[usize] {
        &self.incoming[g]
    }

    pub fn outgoing(&self, g: usize) -> &[usize] {
        &self.outgoing[g]
    }

    /// Input gate ids, ascending. Assignments are indexed in this order.
    pub fn input_gates(&self) -> Vec<usize> {
        (0..self.n()).filter(|&g| self.kinds[g] == GateKind::Input).collect()
    }

    pub fn output_gates(&self) -> Vec<usize> {
        (0..self.n()).filter(|&g| self.kinds[g] == GateKind::Output).collect()
    }

    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    /// Largest number of gates on a directed path.
    pub fn depth(&self) -> usize {
        let mut d = vec![1usize; self.n()];
        for &g in &self.topo {
            for &w in &self.incoming[g] {
                let (src, _) = self.wires[w];
                d[g] = d[g].max(d[src] + 1);
            }
        }
        d.into_iter().max().unwrap_or(1)
    }

    pub fn is_monotone(&self) -> bool {
        self.kinds.iter().all(|&k| k != GateKind::Not)
    }

    /// True when along every wire the nearest and/or gates on both sides
    /// differ in kind. Identity, not, input and output gates are
    /// transparent: they pass the kind seen at their predecessor through.
    pub fn is_alternating(&self) -> bool {
        let mut eff: Vec<Option<GateKind>> = vec![None; self.n()];
        for &g in &self.topo {
            eff[g] = match self.kinds[g] {
                GateKind::And => Some(GateKind::And),
                GateKind::Or => Some(GateKind::Or),
                GateKind::Input => None,
                _ => {
                    let w = self.incoming[g][0];
                    eff[self.wires[w].0]
                }
            };
            if matches!(self.kinds[g], GateKind::And | GateKind::Or) {
                for &w in &self.incoming[g] {
                    if eff[self.wires[w].0] == Some(self.kinds[g]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Evaluates every gate under `assignment`, one bit per input gate in
    /// ascending gate order.
    pub fn eval(&self, assignment: &[bool]) -> Result<Vec<bool>> {
        let inputs = self.input_gates();
        if assignment.len() != inputs.len() {
            return Err(Error::validation(format!(
                "assignment has {} bits, circuit has {} inputs",
                assignment.len(),
                inputs.len()
            )));
        }
        let mut which_input = vec![usize::MAX; self.n()];
        for (i, &g) in inputs.iter().enumerate() {
            which_input[g] = i;
        }
        let mut val = vec![false; self.n()];
        for &g in &self.topo {
            let arg = |w: usize| val[self.wires[w].0];
            val[g] = match self.kinds[g] {
                GateKind::Input => assignment[which_input[g]],
                GateKind::Identity | GateKind::Output => arg(self.incoming[g][0]),
                GateKind::Not => !arg(self.incoming[g][0]),
                GateKind::And => arg(self.incoming[g][0]) && arg(self.incoming[g][1]),
                GateKind::Or => arg(self.incoming[g][0]) || arg(self.incoming[g][1]),
            };
        }
        Ok(val)
    }

    pub fn to_json(&self) -> String {
        let file = CircuitFile {
            gates: self.kinds.iter().map(|k| k.label().to_string()).collect(),
            wires: self.wires.clone(),
        };
        serde_json::to_string_pretty(&file).expect("circuit serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<CircuitDag> {
        let file: CircuitFile = serde_json::from_str(text)?;
        let kinds = file
            .gates
            .iter()
            .map(|s| GateKind::parse(s))
            .collect::<Result<Vec<_>>>()?;
        CircuitDag::new(kinds, file.wires)
    }
}

fn topo_order(n: usize, wires: &[(usize, usize)]) -> Result<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in wires {
        indeg[b] += 1;
        succ[a].push(b);
    }
    let mut ready: Vec<usize> = (0..n).filter(|&g| indeg[g] == 0).collect();
    ready.sort_unstable();
    let mut order = Vec::with_capacity(n);
    let mut head = 0;
    while head < ready.len() {
        let g = ready[head];
        head += 1;
        order.push(g);
        for &b in &succ[g] {
            indeg[b] -= 1;
            if indeg[b] == 0 {
                ready.push(b);
            }
        }
    }
    if order.len() != n {
        return Err(Error::validation("circuit wiring contains a cycle"));
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_like() -> CircuitDag {
        // (x0 and not x1) or (not x0 and x1), output on top
        CircuitDag::new(
            vec![
                GateKind::Input,
                GateKind::Input,
                GateKind::Not,
                GateKind::Not,
                GateKind::And,
                GateKind::And,
                GateKind::Or,
                GateKind::Output,
            ],
            vec![(0, 2), (1, 3), (0, 4), (3, 4), (2, 5), (1, 5), (4, 6), (5, 6), (6, 7)],
        )
        .unwrap()
    }

    #[test]
    fn eval_computes_every_gate() {
        let c = xor_like();
        for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
            let val = c.eval(&[a, b]).unwrap();
            assert_eq!(val[7], a != b, "xor({a}, {b})");
        }
        assert!(!c.is_monotone());
        assert_eq!(c.depth(), 5);
    }

    #[test]
    fn arity_and_shape_are_enforced() {
        assert!(CircuitDag::new(vec![GateKind::And], vec![]).is_err());
        assert!(CircuitDag::new(
            vec![GateKind::Input, GateKind::Output, GateKind::Output],
            vec![(0, 1), (0, 2), (0, 1)],
        )
        .is_err());
        // fan-out three
        assert!(CircuitDag::new(
            vec![
                GateKind::Input,
                GateKind::Identity,
                GateKind::Identity,
                GateKind::Identity
            ],
            vec![(0, 1), (0, 2), (0, 3)],
        )
        .is_err());
        // cycle through two identities
        assert!(CircuitDag::new(
            vec![GateKind::Identity, GateKind::Identity],
            vec![(0, 1), (1, 0)],
        )
        .is_err());
    }

    #[test]
    fn alternation_sees_through_identity_gates() {
        let good = CircuitDag::new(
            vec![
                GateKind::Input,
                GateKind::Input,
                GateKind::And,
                GateKind::Identity,
                GateKind::Or,
                GateKind::Output,
            ],
            vec![(0, 2), (1, 2), (2, 3), (3, 4), (1, 4), (4, 5)],
        )
        .unwrap();
        assert!(good.is_monotone());
        assert!(good.is_alternating());

        let bad = CircuitDag::new(
            vec![
                GateKind::Input,
                GateKind::Input,
                GateKind::And,
                GateKind::Identity,
                GateKind::And,
                GateKind::Output,
            ],
            vec![(0, 2), (1, 2), (2, 3), (3, 4), (1, 4), (4, 5)],
        )
        .unwrap();
        assert!(!bad.is_alternating());
    }

    #[test]
    fn json_round_trip() {
        let c = xor_like();
        let text = c.to_json();
        let back = CircuitDag::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert!(CircuitDag::from_json("{\"gates\": [\"frob\"], \"wires\": []}").is_err());
    }
}

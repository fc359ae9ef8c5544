//! Shared fixtures and seeded generators for the integration suites.
//!
//! Everything randomized takes a caller-owned ChaCha stream, so each test
//! pins its own seed and reruns are exact.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use freezenet::core::{Alphabet, Config, Graph, Network, State};
use freezenet::gadgets::{CircuitDag, Digraph, GateKind};
use freezenet::traces::{
    enumerate_traces, RleTrace, Specification, TraceBounds, TraceSet,
};
use freezenet::treedecomp::standard_decomposition;

pub fn linear_alphabet(q: usize) -> Alphabet {
    let names: Vec<String> = (0..q).map(|s| s.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Alphabet::linear(&refs).expect("linear alphabet")
}

/// Index of each vertex inside its own sorted closed neighborhood.
pub fn self_positions(g: &Graph) -> Vec<usize> {
    (0..g.n())
        .map(|v| {
            g.closed_neighborhood(v)
                .iter()
                .position(|&u| u == v)
                .expect("closed neighborhood lists the vertex")
        })
        .collect()
}

pub fn or_net(g: Graph) -> Network {
    Network::from_closed_rule(g, Alphabet::boolean(), |_, inputs| {
        vec![inputs.iter().copied().max().unwrap()]
    })
    .expect("or rule")
}

pub fn and_net(g: Graph) -> Network {
    let pos = self_positions(&g);
    // A node rises once every other neighbor is up; joining with the own
    // state keeps the rule freezing. Isolated nodes just hold.
    Network::from_closed_rule(g, Alphabet::boolean(), move |v, inputs| {
        let own = inputs[pos[v]];
        let others = inputs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pos[v])
            .map(|(_, &s)| s)
            .min()
            .unwrap_or(own);
        vec![own.max(others)]
    })
    .expect("and rule")
}

pub fn identity_net(g: Graph) -> Network {
    let pos = self_positions(&g);
    Network::from_closed_rule(g, Alphabet::boolean(), move |v, inputs| vec![inputs[pos[v]]])
        .expect("identity rule")
}

pub fn threshold2_net(g: Graph) -> Network {
    let pos = self_positions(&g);
    Network::from_closed_rule(g, Alphabet::boolean(), move |v, inputs| {
        let own = inputs[pos[v]];
        let ones = inputs.iter().filter(|&&s| s == 1).count();
        vec![if own == 1 || ones >= 2 { 1 } else { 0 }]
    })
    .expect("threshold rule")
}

/// The four named boolean rules over one graph.
pub fn rule_nets(g: &Graph) -> Vec<(&'static str, Network)> {
    vec![
        ("or", or_net(g.clone())),
        ("and", and_net(g.clone())),
        ("identity", identity_net(g.clone())),
        ("threshold2", threshold2_net(g.clone())),
    ]
}

/// Every connected labeled graph on `n` vertices, by edge-subset sweep.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    let all_edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << all_edges.len() {
        let edges: Vec<(usize, usize)> = all_edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if let Ok(g) = Graph::new(n, &edges) {
            if is_connected(&g) {
                out.push(g);
            }
        }
    }
    out
}

fn is_connected(g: &Graph) -> bool {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &u in g.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Random connected graph grown from a spanning tree, degree-capped.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, max_deg: usize) -> Graph {
    let mut edges = Vec::new();
    let mut deg = vec![0usize; n];
    for v in 1..n {
        let open: Vec<usize> = (0..v).filter(|&u| deg[u] < max_deg).collect();
        let u = *open.choose(rng).expect("a tree always has an open vertex");
        edges.push((u, v));
        deg[u] += 1;
        deg[v] += 1;
    }
    for _ in 0..n {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v
            && deg[u] < max_deg
            && deg[v] < max_deg
            && !edges.contains(&(u.min(v), u.max(v)))
        {
            edges.push((u.min(v), u.max(v)));
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    Graph::new(n, &edges).expect("grown graph is simple")
}

/// Random connected graph built by attaching each vertex to one vertex or
/// to both ends of an existing edge, keeping treewidth at most two and
/// degrees at most three.
pub fn random_tw2_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut deg = vec![0usize; n];
    let mut size = 1;
    for v in 1..n {
        let open_edges: Vec<(usize, usize)> =
            edges.iter().copied().filter(|&(a, b)| deg[a] < 3 && deg[b] < 3).collect();
        let open_vertices: Vec<usize> = (0..size).filter(|&u| deg[u] < 3).collect();
        if !open_edges.is_empty() && rng.gen_bool(0.5) {
            let (a, b) = *open_edges.choose(rng).unwrap();
            edges.push((a, v));
            edges.push((b, v));
            deg[a] += 1;
            deg[b] += 1;
            deg[v] += 2;
        } else if let Some(&u) = open_vertices.choose(rng) {
            edges.push((u, v));
            deg[u] += 1;
            deg[v] += 1;
        } else {
            break;
        }
        size = v + 1;
    }
    Graph::new(size, &edges).expect("grown graph is simple")
}

fn mix(mut x: u64) -> u64 {
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^= x >> 33;
    x = x.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    x ^ (x >> 33)
}

/// Random freezing network over a linear `q`-state alphabet. Each local
/// table entry either keeps the state or jumps to a hashed higher one, so
/// equal seeds rebuild equal tables.
pub fn random_freezing_net(rng: &mut ChaCha8Rng, g: &Graph, q: usize) -> Network {
    let pos = self_positions(g);
    let salts: Vec<u64> = (0..g.n()).map(|_| rng.gen()).collect();
    Network::from_closed_rule(g.clone(), linear_alphabet(q), move |v, inputs| {
        let mut h = salts[v];
        for (i, &s) in inputs.iter().enumerate() {
            h = mix(h ^ ((i as u64) << 32 | s as u64));
        }
        let own = inputs[pos[v]] as usize;
        let span = q - own;
        let r = (h % (2 * span as u64)) as usize;
        vec![(own + if r >= span { 0 } else { r }) as State]
    })
    .expect("hashed rule is freezing")
}

pub fn random_config(rng: &mut ChaCha8Rng, net: &Network) -> Config {
    (0..net.n()).map(|_| rng.gen_range(0..net.alphabet().len()) as State).collect()
}

/// Random specification constraining a non-empty node subset with random
/// non-empty trace sets over horizon `t`.
pub fn random_spec(rng: &mut ChaCha8Rng, net: &Network, t: u32, max_nodes: usize) -> Specification {
    let count = rng.gen_range(1..=max_nodes.min(net.n()));
    let mut picks: Vec<usize> = (0..net.n()).collect();
    picks.shuffle(rng);
    picks.truncate(count);
    let mut nodes = BTreeMap::new();
    for v in picks {
        let all = enumerate_traces(
            net.alphabet(),
            t,
            TraceBounds { start: None, end: None },
            1_000_000,
        )
        .expect("trace enumeration fits the cap");
        let mut keep: Vec<RleTrace> =
            all.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if keep.is_empty() {
            keep.push(all.choose(rng).expect("at least one trace exists").clone());
        }
        nodes.insert(v, TraceSet::new(keep));
    }
    Specification::from_sets(t, nodes).expect("trace lengths match the horizon")
}

/// Largest closed neighborhood union over the bags; the joint trace
/// tables grow exponentially in it.
pub fn max_closure_domain(g: &Graph, d: &freezenet::treedecomp::TreeDecomposition) -> usize {
    d.bags()
        .iter()
        .map(|bag| {
            let mut dom = BTreeSet::new();
            for &v in bag {
                dom.extend(g.closed_neighborhood(v).iter().copied());
            }
            dom.len()
        })
        .max()
        .unwrap_or(0)
}

/// One random model-checking instance: treewidth-two graph on at most
/// seven nodes, two or three states, horizon at most eight, and a width-two
/// decomposition the generator retries until it gets. Three-state draws
/// with fat closure domains and long horizons are resampled, since their
/// joint tables blow any workable budget.
pub fn spec_instance(rng: &mut ChaCha8Rng) -> (Network, Specification) {
    loop {
        let n = rng.gen_range(1..=7);
        let g = random_tw2_graph(rng, n);
        let d = standard_decomposition(&g).expect("decomposable");
        if d.width() > 2 {
            continue;
        }
        let q = rng.gen_range(2..=3);
        let t = rng.gen_range(1..=8);
        let dom = max_closure_domain(&g, &d);
        if q == 3 && (dom >= 6 || (dom == 5 && t >= 6)) {
            continue;
        }
        let net = random_freezing_net(rng, &g, q);
        let spec = random_spec(rng, &net, t, g.n());
        return (net, spec);
    }
}

/// Random monotone alternating circuit with one output and at most eight
/// gates in total. Levels strictly alternate and read only the previous
/// level round-robin, so wires never join two like gates and no source
/// exceeds fan-out two.
pub fn random_alternating_circuit(rng: &mut ChaCha8Rng) -> CircuitDag {
    let inputs = rng.gen_range(1..=3);
    let mut kinds: Vec<GateKind> = vec![GateKind::Input; inputs];
    let mut wires: Vec<(usize, usize)> = Vec::new();
    let mut prev: Vec<usize> = (0..inputs).collect();
    let mut kind = if rng.gen_bool(0.5) { GateKind::And } else { GateKind::Or };
    while kinds.len() + 1 < 8 && prev.len() >= 2 && rng.gen_bool(0.7) {
        let room = 8 - kinds.len() - 1;
        let width = rng.gen_range(1..=2).min(room).min(prev.len());
        prev.shuffle(rng);
        let mut level = Vec::new();
        for i in 0..width {
            let g = kinds.len();
            kinds.push(kind);
            wires.push((prev[2 * i % prev.len()], g));
            wires.push((prev[(2 * i + 1) % prev.len()], g));
            level.push(g);
        }
        prev = level;
        kind = if kind == GateKind::And { GateKind::Or } else { GateKind::And };
    }
    let out = kinds.len();
    kinds.push(GateKind::Output);
    wires.push((*prev.choose(rng).unwrap(), out));
    let circ = CircuitDag::new(kinds, wires).expect("layered circuit is well formed");
    assert!(circ.is_monotone() && circ.is_alternating());
    circ
}

/// Random circuit over and/or/not with one output and at most four inputs.
/// Sources are drawn from gates with spare fan-out; the newest gate is
/// always unread, so the output wire never overflows its source.
pub fn random_general_circuit(rng: &mut ChaCha8Rng) -> CircuitDag {
    let inputs = rng.gen_range(1..=4);
    let extra = rng.gen_range(1..=4);
    let mut kinds: Vec<GateKind> = vec![GateKind::Input; inputs];
    let mut wires: Vec<(usize, usize)> = Vec::new();
    let mut fanout = vec![0usize; inputs];
    for _ in 0..extra {
        let g = kinds.len();
        let kind = match rng.gen_range(0..3) {
            0 => GateKind::And,
            1 => GateKind::Or,
            _ => GateKind::Not,
        };
        let mut pool: Vec<usize> = (0..g).filter(|&s| fanout[s] < 2).collect();
        if pool.len() < kind.fan_in() {
            continue;
        }
        pool.shuffle(rng);
        kinds.push(kind);
        fanout.push(0);
        for &s in pool.iter().take(kind.fan_in()) {
            wires.push((s, g));
            fanout[s] += 1;
        }
    }
    let out = kinds.len();
    kinds.push(GateKind::Output);
    wires.push((out - 1, out));
    CircuitDag::new(kinds, wires).expect("generated circuit is acyclic")
}

/// Hand-built unsatisfiable circuits, each a contradiction wired once.
pub fn unsatisfiable_circuits() -> Vec<CircuitDag> {
    let contradiction = CircuitDag::new(
        vec![GateKind::Input, GateKind::Not, GateKind::And, GateKind::Output],
        vec![(0, 1), (0, 2), (1, 2), (2, 3)],
    )
    .expect("x and not x");
    let covered = CircuitDag::new(
        vec![
            GateKind::Input,
            GateKind::Input,
            GateKind::Or,
            GateKind::Not,
            GateKind::Not,
            GateKind::And,
            GateKind::And,
            GateKind::Output,
        ],
        vec![(0, 2), (1, 2), (0, 3), (1, 4), (3, 5), (4, 5), (2, 6), (5, 6), (6, 7)],
    )
    .expect("(x or y) and not x and not y");
    vec![contradiction, covered]
}

/// Random digraph on `n` vertices with both degrees capped by `max_deg`.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, max_deg: usize) -> Digraph {
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    let mut outd = vec![0usize; n];
    let mut ind = vec![0usize; n];
    for _ in 0..3 * n {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && outd[a] < max_deg && ind[b] < max_deg && !arcs.contains(&(a, b)) {
            arcs.push((a, b));
            outd[a] += 1;
            ind[b] += 1;
        }
    }
    Digraph::new(n, arcs).expect("generated arcs are simple")
}

/// Checks that a witness replays as one orbit and meets the specification:
/// the start assembled from first symbols must reproduce every column, and
/// every constrained node's trace must lie in its set.
pub fn witness_is_sound(
    net: &Network,
    spec: &Specification,
    witness: &BTreeMap<usize, RleTrace>,
) -> bool {
    if witness.len() != net.n() {
        return false;
    }
    let start: Config = (0..net.n()).map(|v| witness[&v].first_state()).collect();
    let orbit = match net.orbit(&start, spec.horizon()) {
        Ok(orbit) => orbit,
        Err(_) => return false,
    };
    for v in 0..net.n() {
        let column: Vec<State> = orbit.iter().map(|c| c[v]).collect();
        if witness[&v].symbols() != column {
            return false;
        }
    }
    spec.constrained_nodes().all(|v| {
        spec.node_set(v).map(|set| set.contains(&witness[&v])).unwrap_or(false)
    })
}

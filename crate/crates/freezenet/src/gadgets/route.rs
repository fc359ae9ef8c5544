//! Routing a bounded-degree digraph through a perfect bramble.
//!
//! Each digraph vertex is hosted on a vertex of its own bramble element and
//! each arc becomes a host path through the two elements involved. Because
//! every host vertex lies in at most two elements and paths stay inside the
//! elements of their endpoints, the number of paths through any host vertex
//! is bounded by four times the digraph degree.

use crate::core::Graph;
use serde::{Deserialize, Serialize};
use crate::gadgets::bramble::{validate_bramble, Bramble};
use crate::{Error, Result};

/// A simple directed graph: no loops, no parallel arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(n: usize, arcs: Vec<(usize, usize)>) -> Result<Digraph> {
        let mut seen = std::collections::HashSet::new();
        for (i, &(a, b)) in arcs.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::validation(format!("arc {i} = ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::validation(format!("arc {i} loops on vertex {a}")));
            }
            if !seen.insert((a, b)) {
                return Err(Error::validation(format!("duplicate arc ({a}, {b})")));
            }
        }
        Ok(Digraph { n, arcs })
    }

    /// Digraph of a circuit: one vertex per gate, one arc per wire, wire
    /// order preserved.
    pub fn from_circuit(c: &super::circuit::CircuitDag) -> Digraph {
        Digraph { n: c.n(), arcs: c.wires().to_vec() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Largest total degree (in plus out) over the vertices.
    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n];
        for &(a, b) in &self.arcs {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let file = DigraphFile { n: self.n, arcs: self.arcs.clone() };
        serde_json::to_string_pretty(&file).expect("digraph serializes")
    }

    pub fn from_json(text: &str) -> Result<Digraph> {
        let file: DigraphFile = serde_json::from_str(text)?;
        Digraph::new(file.n, file.arcs)
    }
}

#[derive(Serialize, Deserialize)]
struct DigraphFile {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

/// A digraph embedded in a host graph: vertex placement, one simple host
/// path per arc, and the resulting per-vertex congestion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutedEmbedding {
    /// Host vertex of each digraph vertex; injective.
    pub mu: Vec<usize>,
    /// Host path of each arc, from `mu[a]` to `mu[b]`, vertices distinct.
    pub paths: Vec<Vec<usize>>,
    /// Number of paths through each host vertex.
    pub loads: Vec<usize>,
    pub host_n: usize,
}

impl RoutedEmbedding {
    pub fn max_load(&self) -> usize {
        self.loads.iter().copied().max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let file = EmbeddingFile {
            mu: self.mu.clone(),
            paths: self.paths.clone(),
            loads: self.loads.clone(),
            host_n: self.host_n,
            max_load: self.max_load(),
        };
        serde_json::to_string_pretty(&file).expect("embedding serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct EmbeddingFile {
    mu: Vec<usize>,
    paths: Vec<Vec<usize>>,
    loads: Vec<usize>,
    host_n: usize,
    max_load: usize,
}

/// Routes `d` through the bramble `b` on host `g`. Digraph vertex `i` is
/// hosted inside bramble element `i`, placed on the least-burdened vertex
/// not already taken; the path of an arc runs to the smallest vertex shared
/// by the two elements and onward, shortcut to a simple path.
pub fn route(g: &Graph, b: &Bramble, d: &Digraph) -> Result<RoutedEmbedding> {
    if let Err(violations) = validate_bramble(g, b) {
        let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::validation(format!("bramble is not perfect: {}", text.join("; "))));
    }
    if d.n() > b.len() {
        return Err(Error::validation(format!(
            "digraph has {} vertices but the bramble only {} elements",
            d.n(),
            b.len()
        )));
    }
    let mut mu = Vec::with_capacity(d.n());
    let mut taken = vec![false; g.n()];
    for i in 0..d.n() {
        let host = b
            .element(i)
            .iter()
            .copied()
            .filter(|&v| !taken[v])
            .min_by_key(|&v| (b.membership(v), v))
            .ok_or_else(|| {
                Error::validation(format!("bramble element {i} has no free vertex left"))
            })?;
        taken[host] = true;
        mu.push(host);
    }
    let mut paths = Vec::with_capacity(d.arcs().len());
    let mut loads = vec![0usize; g.n()];
    for (w, &(a, bb)) in d.arcs().iter().enumerate() {
        let shared = first_common(b.element(a), b.element(bb)).ok_or_else(|| {
            Error::internal(format!("validated elements {a} and {bb} lost their intersection"))
        })?;
        let front = g
            .shortest_path_within(b.element(a), mu[a], shared)
            .ok_or_else(|| Error::internal(format!("no path inside element {a} for arc {w}")))?;
        let back = g
            .shortest_path_within(b.element(bb), shared, mu[bb])
            .ok_or_else(|| Error::internal(format!("no path inside element {bb} for arc {w}")))?;
        let mut path = front;
        path.extend_from_slice(&back[1..]);
        simplify(&mut path);
        for &v in &path {
            loads[v] += 1;
        }
        paths.push(path);
    }
    let bound = 4 * d.max_degree();
    if let Some(v) = (0..g.n()).find(|&v| loads[v] > bound) {
        return Err(Error::internal(format!(
            "vertex {v} carries {} paths, bound is {bound}",
            loads[v]
        )));
    }
    Ok(RoutedEmbedding { mu, paths, loads, host_n: g.n() })
}

fn first_common(a: &[usize], b: &[usize]) -> Option<usize> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i]),
        }
    }
    None
}

/// Cuts every cycle out of a walk, keeping the endpoints.
fn simplify(path: &mut Vec<usize>) {
    let mut out: Vec<usize> = Vec::with_capacity(path.len());
    for &v in path.iter() {
        if let Some(pos) = out.iter().position(|&x| x == v) {
            out.truncate(pos + 1);
        } else {
            out.push(v);
        }
    }
    *path = out;
}

/// Greedy proper coloring of the square of `g`: vertices at distance one or
/// two get distinct colors. Colors are `0..k` with `k` at most the squared
/// maximum degree plus one.
pub fn square_coloring(g: &Graph) -> Vec<usize> {
    let mut colors = vec![usize::MAX; g.n()];
    for v in 0..g.n() {
        let mut banned = Vec::new();
        for &u in g.neighbors(v) {
            if colors[u] != usize::MAX {
                banned.push(colors[u]);
            }
            for &w in g.neighbors(u) {
                if w != v && colors[w] != usize::MAX {
                    banned.push(colors[w]);
                }
            }
        }
        banned.sort_unstable();
        banned.dedup();
        let mut pick = 0;
        for c in banned {
            if c == pick {
                pick += 1;
            } else if c > pick {
                break;
            }
        }
        colors[v] = pick;
    }
    colors
}

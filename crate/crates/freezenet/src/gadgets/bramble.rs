//! Brambles: families of connected, pairwise touching vertex sets.
//!
//! A perfect bramble here is a family of vertex sets in which every element
//! induces a connected subgraph, every two elements share a vertex, and no
//! vertex lies in more than two elements. Such families certify high
//! treewidth while keeping every vertex lightly loaded, which is what the
//! routing in [`super::route`] exploits.

use crate::core::Graph;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A family of vertex sets over some host graph.
///
/// Elements are stored sorted and deduplicated; validity against a concrete
/// graph is a separate check ([`validate_bramble`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bramble {
    elements: Vec<Vec<usize>>,
}

impl Bramble {
    /// Builds a bramble from raw elements. Each element is sorted and
    /// deduplicated; empty elements are rejected.
    pub fn new(elements: Vec<Vec<usize>>) -> Result<Bramble> {
        if elements.is_empty() {
            return Err(Error::validation("bramble needs at least one element"));
        }
        let mut norm = Vec::with_capacity(elements.len());
        for (i, el) in elements.into_iter().enumerate() {
            if el.is_empty() {
                return Err(Error::validation(format!("bramble element {i} is empty")));
            }
            let mut el = el;
            el.sort_unstable();
            el.dedup();
            norm.push(el);
        }
        Ok(Bramble { elements: norm })
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &[usize] {
        &self.elements[i]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Number of elements containing vertex `v`.
    pub fn membership(&self, v: usize) -> usize {
        self.elements.iter().filter(|el| el.binary_search(&v).is_ok()).count()
    }

    pub fn to_json(&self) -> String {
        let file = BrambleFile { elements: self.elements.clone() };
        serde_json::to_string_pretty(&file).expect("bramble serializes")
    }

    pub fn from_json(text: &str) -> Result<Bramble> {
        let file: BrambleFile = serde_json::from_str(text)?;
        Bramble::new(file.elements)
    }
}

#[derive(Serialize, Deserialize)]
struct BrambleFile {
    elements: Vec<Vec<usize>>,
}

/// One broken bramble axiom, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BrambleViolation {
    /// An element mentions a vertex outside the graph.
    OutOfRange { element: usize, vertex: usize },
    /// An element does not induce a connected subgraph.
    Disconnected { element: usize },
    /// Two elements share no vertex.
    Disjoint { first: usize, second: usize },
    /// A vertex lies in more than two elements.
    Overloaded { vertex: usize, count: usize },
}

impl fmt::Display for BrambleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BrambleViolation::OutOfRange { element, vertex } => {
                write!(f, "element {element} mentions vertex {vertex} outside the graph")
            }
            BrambleViolation::Disconnected { element } => {
                write!(f, "element {element} induces a disconnected subgraph")
            }
            BrambleViolation::Disjoint { first, second } => {
                write!(f, "elements {first} and {second} share no vertex")
            }
            BrambleViolation::Overloaded { vertex, count } => {
                write!(f, "vertex {vertex} lies in {count} elements, limit is 2")
            }
        }
    }
}

/// Checks the perfect-bramble axioms of `b` against `g`: connected elements,
/// pairwise intersection, and at most two memberships per vertex. Returns
/// every violation found.
pub fn validate_bramble(g: &Graph, b: &Bramble) -> std::result::Result<(), Vec<BrambleViolation>> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; g.n()];
    for (i, el) in b.elements().iter().enumerate() {
        let mut in_range = true;
        for &v in el {
            if v >= g.n() {
                out.push(BrambleViolation::OutOfRange { element: i, vertex: v });
                in_range = false;
            } else {
                counts[v] += 1;
            }
        }
        if in_range && !connected_within(g, el) {
            out.push(BrambleViolation::Disconnected { element: i });
        }
    }
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            if !intersects(b.element(i), b.element(j)) {
                out.push(BrambleViolation::Disjoint { first: i, second: j });
            }
        }
    }
    for (v, &count) in counts.iter().enumerate() {
        if count > 2 {
            out.push(BrambleViolation::Overloaded { vertex: v, count });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn connected_within(g: &Graph, el: &[usize]) -> bool {
    let mut seen = vec![false; el.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1;
    while let Some(i) = stack.pop() {
        for &w in g.neighbors(el[i]) {
            if let Ok(j) = el.binary_search(&w) {
                if !seen[j] {
                    seen[j] = true;
                    reached += 1;
                    stack.push(j);
                }
            }
        }
    }
    reached == el.len()
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// The cross bramble of the `m` by `m` grid: element `i` is row `i` union
/// column `i` (row-major vertex numbering, as produced by [`Graph::grid`]).
/// Every two crosses meet, each cross is connected through its diagonal
/// cell, and a cell `(r, c)` lies only in crosses `r` and `c`. Needs
/// `m >= 2`; the single-vertex grid admits no two-element family of this
/// shape.
pub fn grid_bramble(m: usize) -> Result<Bramble> {
    if m < 2 {
        return Err(Error::validation(format!("grid bramble needs m >= 2, got {m}")));
    }
    let mut elements = Vec::with_capacity(m);
    for i in 0..m {
        let mut el = Vec::with_capacity(2 * m - 1);
        for j in 0..m {
            el.push(i * m + j);
            el.push(j * m + i);
        }
        elements.push(el);
    }
    Bramble::new(elements)
}

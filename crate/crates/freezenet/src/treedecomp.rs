//! Tree decompositions: validation, a min-fill heuristic, and a balancing
//! binarization.
//!
//! The solver walks a rooted binary decomposition level by level, so besides
//! the usual axioms it needs bounded fan-out and logarithmic depth.
//! [`binarize_balance`] rebuilds an arbitrary decomposition into that shape.
//! Every output bag is the union of at most three input bags, which caps the
//! output width at `3k + 2` for input width `k`. The documented depth target
//! is `4 * log2(B) + 4` edges for `B` output bags.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::core::Graph;
use crate::{Error, Result};

/// Factor and offset of the documented depth bound for [`binarize_balance`]:
/// depth is at most `DEPTH_FACTOR * log2(bags) + DEPTH_OFFSET` edges.
pub const DEPTH_FACTOR: f64 = 4.0;
pub const DEPTH_OFFSET: f64 = 4.0;

/// Rooted tree of bags over graph vertices.
///
/// Bags are sorted and deduplicated; tree edges are normalized pairs of bag
/// indices. The structure does not enforce the decomposition axioms, that is
/// [`validate_decomposition`]'s job, but it does require a coherent tree
/// shape and non-empty bags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    root: usize,
}

impl TreeDecomposition {
    pub fn new(
        mut bags: Vec<Vec<usize>>,
        edges: Vec<(usize, usize)>,
        root: usize,
    ) -> Result<TreeDecomposition> {
        if bags.is_empty() {
            return Err(Error::validation("decomposition needs at least one bag"));
        }
        for (i, bag) in bags.iter_mut().enumerate() {
            bag.sort_unstable();
            bag.dedup();
            if bag.is_empty() {
                return Err(Error::validation(format!("bag {i} is empty")));
            }
        }
        let m = bags.len();
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::validation(format!(
                    "tree edge ({a}, {b}) out of range for {m} bags"
                )));
            }
            if a == b {
                return Err(Error::validation(format!("tree self loop at bag {a}")));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        norm.dedup();
        if root >= m {
            return Err(Error::validation(format!("root {root} out of range for {m} bags")));
        }
        Ok(TreeDecomposition { bags, edges: norm, root })
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag(&self, i: usize) -> &[usize] {
        &self.bags[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1) - 1
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// True when the tree edges connect all bags without a cycle.
    pub fn is_tree(&self) -> bool {
        if self.edges.len() + 1 != self.bags.len() {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.bags.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.bags.len()
    }

    /// Parent of each bag under the root, `None` for the root itself.
    /// Requires a tree shape.
    pub fn parents(&self) -> Result<Vec<Option<usize>>> {
        if !self.is_tree() {
            return Err(Error::validation("bag edges do not form a tree"));
        }
        let adj = self.adjacency();
        let mut parent = vec![None; self.bags.len()];
        let mut seen = vec![false; self.bags.len()];
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        Ok(parent)
    }

    /// Children lists under the root, each ascending.
    pub fn children(&self) -> Result<Vec<Vec<usize>>> {
        let parent = self.parents()?;
        let mut children = vec![Vec::new(); self.bags.len()];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(v);
            }
        }
        Ok(children)
    }

    /// Depth of each bag below the root, in edges.
    pub fn depths(&self) -> Result<Vec<usize>> {
        let parent = self.parents()?;
        let children = {
            let mut ch = vec![Vec::new(); self.bags.len()];
            for (v, p) in parent.iter().enumerate() {
                if let Some(p) = p {
                    ch[*p].push(v);
                }
            }
            ch
        };
        let mut depth = vec![0usize; self.bags.len()];
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            for &w in &children[v] {
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
        Ok(depth)
    }

    /// Longest root-to-leaf distance in edges.
    pub fn depth(&self) -> Result<usize> {
        Ok(self.depths()?.into_iter().max().unwrap_or(0))
    }

    /// True when no bag has more than two children under the root.
    pub fn is_binary(&self) -> Result<bool> {
        Ok(self.children()?.iter().all(|c| c.len() <= 2))
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Violated decomposition axiom with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompViolation {
    /// A bag mentions a vertex outside the graph.
    BagOutOfRange { bag: usize, vertex: usize },
    /// Bag edges do not form a tree on all bags.
    NotATree,
    /// A graph vertex appears in no bag.
    VertexNotCovered { vertex: usize },
    /// A graph edge has no bag containing both endpoints.
    EdgeNotCovered { u: usize, v: usize },
    /// The bags containing a vertex are disconnected in the tree.
    OccurrencesDisconnected { vertex: usize },
}

impl std::fmt::Display for DecompViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecompViolation::BagOutOfRange { bag, vertex } => {
                write!(f, "bag {bag} mentions vertex {vertex} outside the graph")
            }
            DecompViolation::NotATree => write!(f, "bag edges do not form a tree"),
            DecompViolation::VertexNotCovered { vertex } => {
                write!(f, "vertex {vertex} appears in no bag")
            }
            DecompViolation::EdgeNotCovered { u, v } => {
                write!(f, "edge ({u}, {v}) is covered by no bag")
            }
            DecompViolation::OccurrencesDisconnected { vertex } => {
                write!(f, "bags containing vertex {vertex} are disconnected")
            }
        }
    }
}

/// Checks the three decomposition axioms plus index sanity. Returns the
/// width on success, otherwise every violated axiom with a witness.
pub fn validate_decomposition(
    g: &Graph,
    d: &TreeDecomposition,
) -> std::result::Result<usize, Vec<DecompViolation>> {
    let mut violations = Vec::new();
    for (i, bag) in d.bags().iter().enumerate() {
        for &v in bag {
            if v >= g.n() {
                violations.push(DecompViolation::BagOutOfRange { bag: i, vertex: v });
            }
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    if !d.is_tree() {
        violations.push(DecompViolation::NotATree);
        return Err(violations);
    }
    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (i, bag) in d.bags().iter().enumerate() {
        for &v in bag {
            occurrences[v].push(i);
        }
    }
    for v in 0..g.n() {
        if occurrences[v].is_empty() {
            violations.push(DecompViolation::VertexNotCovered { vertex: v });
        }
    }
    for &(u, v) in g.edges() {
        let covered = d.bags().iter().any(|bag| {
            bag.binary_search(&u).is_ok() && bag.binary_search(&v).is_ok()
        });
        if !covered {
            violations.push(DecompViolation::EdgeNotCovered { u, v });
        }
    }
    // Occurrence connectivity: walk the tree restricted to bags holding v.
    let adj = d.adjacency();
    for v in 0..g.n() {
        let occ = &occurrences[v];
        if occ.len() <= 1 {
            continue;
        }
        let inside: BTreeSet<usize> = occ.iter().copied().collect();
        let mut seen = BTreeSet::new();
        let mut stack = vec![occ[0]];
        seen.insert(occ[0]);
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if inside.contains(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if seen.len() != occ.len() {
            violations.push(DecompViolation::OccurrencesDisconnected { vertex: v });
        }
    }
    if violations.is_empty() {
        Ok(d.width())
    } else {
        Err(violations)
    }
}

// ---------------------------------------------------------------------------
// Min-fill heuristic
// ---------------------------------------------------------------------------

/// Builds a decomposition by min-fill elimination, ties broken by smallest
/// vertex label. Exact on trees and chordal graphs, deterministic always.
pub fn heuristic_decomposition(g: &Graph) -> TreeDecomposition {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut hoods: Vec<Vec<usize>> = Vec::with_capacity(n);
    while !alive.is_empty() {
        let mut best: Option<(usize, usize)> = None;
        for &v in &alive {
            let hood: Vec<usize> = adj[v].iter().copied().collect();
            let mut fill = 0usize;
            for (i, &a) in hood.iter().enumerate() {
                for &b in &hood[i + 1..] {
                    if !adj[a].contains(&b) {
                        fill += 1;
                    }
                }
            }
            if best.map(|(f, _)| fill < f).unwrap_or(true) {
                best = Some((fill, v));
            }
        }
        let (_, v) = best.expect("alive set non-empty");
        let hood: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in hood.iter().enumerate() {
            for &b in &hood[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &u in &hood {
            adj[u].remove(&v);
        }
        adj[v].clear();
        alive.remove(&v);
        order.push(v);
        hoods.push(hood);
    }
    // Bag i covers order[i] and its neighborhood at elimination time; it
    // hangs below the bag of the member eliminated soonest afterwards.
    let position: HashMap<usize, usize> =
        order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let mut bag = hoods[i].clone();
        bag.push(v);
        bags.push(bag);
        if let Some(&j) = hoods[i].iter().map(|u| &position[u]).min() {
            edges.push((i, j));
        }
    }
    let root = n - 1;
    TreeDecomposition::new(bags, edges, root).expect("heuristic construction")
}

// ---------------------------------------------------------------------------
// Balancing binarization
// ---------------------------------------------------------------------------

/// Mutable unrooted tree of bags used during restructuring.
struct WorkTree {
    bags: Vec<Vec<usize>>,
    adj: Vec<BTreeSet<usize>>,
}

impl WorkTree {
    fn from_decomposition(d: &TreeDecomposition) -> WorkTree {
        let mut adj = vec![BTreeSet::new(); d.len()];
        for &(a, b) in d.edges() {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        WorkTree { bags: d.bags().to_vec(), adj }
    }

    /// Splits every node of degree above three into a chain of copies.
    fn reduce_degrees(&mut self) {
        let mut queue: Vec<usize> = (0..self.adj.len()).collect();
        while let Some(x) = queue.pop() {
            if self.adj[x].len() <= 3 {
                continue;
            }
            let y = self.bags.len();
            self.bags.push(self.bags[x].clone());
            self.adj.push(BTreeSet::new());
            let keep: Vec<usize> = self.adj[x].iter().copied().take(2).collect();
            let moved: Vec<usize> = self.adj[x].iter().copied().skip(2).collect();
            for &u in &moved {
                self.adj[x].remove(&u);
                self.adj[u].remove(&x);
                self.adj[u].insert(y);
                self.adj[y].insert(u);
            }
            debug_assert_eq!(self.adj[x].len(), keep.len());
            self.adj[x].insert(y);
            self.adj[y].insert(x);
            queue.push(y);
        }
    }
}

/// Output tree being assembled.
struct Assembled {
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Assembled {
    fn add(&mut self, bag: Vec<usize>, children: &[usize]) -> usize {
        let id = self.bags.len();
        let mut bag = bag;
        bag.sort_unstable();
        bag.dedup();
        self.bags.push(bag);
        for &c in children {
            self.edges.push((id, c));
        }
        id
    }
}

/// Rebuilds `d` into a rooted binary decomposition of width at most
/// `3k + 2`, targeting depth `4 * log2(B) + 4` for `B` output bags.
///
/// The recursion carries at most two anchor bags per subtree; each output
/// bag is the union of its anchors and one splitter bag. With one anchor
/// the splitter is a centroid, with two it is the best balance point on the
/// anchor path, which keeps the subtree sizes shrinking geometrically.
pub fn binarize_balance(d: &TreeDecomposition) -> Result<TreeDecomposition> {
    let mut work = WorkTree::from_decomposition(d);
    if !d.is_tree() {
        return Err(Error::validation("bag edges do not form a tree"));
    }
    work.reduce_degrees();
    let all: Vec<usize> = (0..work.bags.len()).collect();
    let mut out = Assembled { bags: Vec::new(), edges: Vec::new() };
    let root = build_subtree(&work, &all, &[], &mut out)?;
    TreeDecomposition::new(out.bags, out.edges, root)
}

/// Heuristic decomposition followed by the balancing pass: the usual way to
/// obtain a solver-ready binary decomposition for a graph.
pub fn standard_decomposition(g: &Graph) -> Result<TreeDecomposition> {
    binarize_balance(&heuristic_decomposition(g))
}

/// Subtree sizes and per-node max component size of `set` minus one node.
struct SplitInfo {
    /// For each member, the largest component left by removing it.
    worst: HashMap<usize, usize>,
}

fn split_info(work: &WorkTree, set: &[usize]) -> SplitInfo {
    let inside: BTreeSet<usize> = set.iter().copied().collect();
    let root = set[0];
    // Iterative rooted DFS for subtree sizes.
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut order = Vec::with_capacity(set.len());
    let mut stack = vec![root];
    parent.insert(root, root);
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in &work.adj[v] {
            if inside.contains(&w) && !parent.contains_key(&w) {
                parent.insert(w, v);
                stack.push(w);
            }
        }
    }
    let mut size: HashMap<usize, usize> = set.iter().map(|&v| (v, 1usize)).collect();
    for &v in order.iter().rev() {
        if v != root {
            *size.get_mut(&parent[&v]).expect("parent visited") += size[&v];
        }
    }
    let mut worst = HashMap::new();
    for &v in set {
        let mut m = set.len() - size[&v];
        for &w in &work.adj[v] {
            if inside.contains(&w) && parent.get(&w) == Some(&v) {
                m = m.max(size[&w]);
            }
        }
        worst.insert(v, m);
    }
    SplitInfo { worst }
}

fn path_between(work: &WorkTree, set: &[usize], a: usize, b: usize) -> Vec<usize> {
    let inside: BTreeSet<usize> = set.iter().copied().collect();
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([a]);
    parent.insert(a, a);
    while let Some(v) = queue.pop_front() {
        if v == b {
            break;
        }
        for &w in &work.adj[v] {
            if inside.contains(&w) && !parent.contains_key(&w) {
                parent.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![b];
    let mut cur = b;
    while cur != a {
        cur = parent[&cur];
        path.push(cur);
    }
    path.reverse();
    path
}

fn build_subtree(
    work: &WorkTree,
    set: &[usize],
    anchors: &[usize],
    out: &mut Assembled,
) -> Result<usize> {
    debug_assert!(anchors.len() <= 2);
    debug_assert!(anchors.iter().all(|a| set.contains(a)));
    if set.len() <= 3 {
        let mut bag = Vec::new();
        for &x in set {
            bag.extend_from_slice(&work.bags[x]);
        }
        return Ok(out.add(bag, &[]));
    }
    let info = split_info(work, set);
    let splitter = match anchors {
        [a, b] => {
            let path = path_between(work, set, *a, *b);
            *path
                .iter()
                .min_by_key(|&&c| (info.worst[&c], c))
                .expect("path non-empty")
        }
        _ => *set
            .iter()
            .min_by_key(|&&c| (info.worst[&c], c))
            .expect("set non-empty"),
    };
    let mut bag = work.bags[splitter].clone();
    for &a in anchors {
        bag.extend_from_slice(&work.bags[a]);
    }
    // Components of the subtree minus the splitter, in neighbor order.
    let inside: BTreeSet<usize> = set.iter().copied().collect();
    let mut assigned: BTreeSet<usize> = BTreeSet::from([splitter]);
    let mut children = Vec::new();
    for &n0 in &work.adj[splitter] {
        if !inside.contains(&n0) || assigned.contains(&n0) {
            continue;
        }
        let mut comp = vec![n0];
        let mut stack = vec![n0];
        assigned.insert(n0);
        while let Some(v) = stack.pop() {
            for &w in &work.adj[v] {
                if inside.contains(&w) && !assigned.contains(&w) {
                    assigned.insert(w);
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        let mut sub_anchors: Vec<usize> = vec![n0];
        for &a in anchors {
            if a != splitter && comp.binary_search(&a).is_ok() {
                sub_anchors.push(a);
            }
        }
        sub_anchors.sort_unstable();
        sub_anchors.dedup();
        if sub_anchors.len() > 2 {
            return Err(Error::internal(format!(
                "anchor invariant broken: {} anchors in one component",
                sub_anchors.len()
            )));
        }
        children.push(build_subtree(work, &comp, &sub_anchors, out)?);
    }
    match children.len() {
        0 | 1 | 2 => Ok(out.add(bag, &children)),
        3 => {
            let aux = out.add(bag.clone(), &children[1..]);
            Ok(out.add(bag, &[children[0], aux]))
        }
        n => Err(Error::internal(format!(
            "splitter produced {n} components after degree reduction"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Levels
// ---------------------------------------------------------------------------

/// Bottom-up processing schedule for a rooted binary decomposition.
///
/// Level `0` holds the deepest bags; the last level is the root alone. Bags
/// within a level are pairwise independent and sorted ascending. Fails on
/// non-tree or non-binary input.
pub fn levels(d: &TreeDecomposition) -> Result<Vec<Vec<usize>>> {
    if !d.is_binary()? {
        return Err(Error::validation("decomposition is not binary"));
    }
    let depths = d.depths()?;
    let max_depth = *depths.iter().max().expect("at least one bag");
    let mut levels = vec![Vec::new(); max_depth + 1];
    for (bag, &depth) in depths.iter().enumerate() {
        levels[max_depth - depth].push(bag);
    }
    for level in &mut levels {
        level.sort_unstable();
    }
    Ok(levels)
}

// ---------------------------------------------------------------------------
// JSON format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DecompFile {
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    root: usize,
}

impl TreeDecomposition {
    pub fn from_json(text: &str) -> Result<TreeDecomposition> {
        let file: DecompFile = serde_json::from_str(text)?;
        TreeDecomposition::new(file.bags, file.edges, file.root)
    }

    pub fn to_json(&self) -> String {
        let file = DecompFile {
            bags: self.bags.clone(),
            edges: self.edges.clone(),
            root: self.root,
        };
        serde_json::to_string_pretty(&file).expect("decomposition serialization")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_accepts_path_decomposition() {
        let g = Graph::path(3);
        let d = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)], 0).unwrap();
        assert_eq!(validate_decomposition(&g, &d), Ok(1));
    }

    #[test]
    fn validate_reports_violations() {
        let g = Graph::path(3);
        let d = TreeDecomposition::new(vec![vec![0, 1], vec![1]], vec![(0, 1)], 0).unwrap();
        let violations = validate_decomposition(&g, &d).unwrap_err();
        assert!(violations.contains(&DecompViolation::VertexNotCovered { vertex: 2 }));
        assert!(violations.contains(&DecompViolation::EdgeNotCovered { u: 1, v: 2 }));
    }

    #[test]
    fn validate_detects_disconnected_occurrences() {
        let g = Graph::path(3);
        let d = TreeDecomposition::new(
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            vec![(0, 1), (1, 2)],
            0,
        )
        .unwrap();
        let violations = validate_decomposition(&g, &d).unwrap_err();
        assert!(violations
            .iter()
            .any(|v| matches!(v, DecompViolation::OccurrencesDisconnected { vertex: 0 })));
    }

    #[test]
    fn heuristic_width_on_known_graphs() {
        for n in 2..7 {
            let d = heuristic_decomposition(&Graph::path(n));
            assert_eq!(validate_decomposition(&Graph::path(n), &d).unwrap(), 1);
        }
        let star = Graph::star(5);
        let d = heuristic_decomposition(&star);
        assert_eq!(validate_decomposition(&star, &d).unwrap(), 1);
        let k4 = Graph::complete(4);
        let d = heuristic_decomposition(&k4);
        assert_eq!(validate_decomposition(&k4, &d).unwrap(), 3);
        let c5 = Graph::cycle(5).unwrap();
        let d = heuristic_decomposition(&c5);
        assert_eq!(validate_decomposition(&c5, &d).unwrap(), 2);
    }

    #[test]
    fn heuristic_single_vertex() {
        let g = Graph::path(1);
        let d = heuristic_decomposition(&g);
        assert_eq!(d.len(), 1);
        assert_eq!(validate_decomposition(&g, &d).unwrap(), 0);
    }

    #[test]
    fn binarize_path_decomposition_of_p9() {
        let g = Graph::path(9);
        let bags: Vec<Vec<usize>> = (0..8).map(|i| vec![i, i + 1]).collect();
        let edges: Vec<(usize, usize)> = (0..7).map(|i| (i, i + 1)).collect();
        let d = TreeDecomposition::new(bags, edges, 0).unwrap();
        let b = binarize_balance(&d).unwrap();
        let width = validate_decomposition(&g, &b).unwrap();
        assert!(width <= 5, "width {width} exceeds 3k + 2 = 5");
        assert!(b.is_binary().unwrap());
        let bound = DEPTH_FACTOR * (b.len() as f64).log2() + DEPTH_OFFSET;
        assert!((b.depth().unwrap() as f64) <= bound);
    }

    #[test]
    fn binarize_handles_high_degree() {
        let g = Graph::star(8);
        let d = heuristic_decomposition(&g);
        let b = binarize_balance(&d).unwrap();
        assert!(validate_decomposition(&g, &b).unwrap() <= 3 * d.width() + 2);
        assert!(b.is_binary().unwrap());
    }

    #[test]
    fn levels_on_balanced_tree() {
        // Complete binary tree on 7 bags, all bags = {0} over a one-vertex
        // graph; only the schedule shape matters here.
        let bags = vec![vec![0]; 7];
        let edges = vec![(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)];
        let d = TreeDecomposition::new(bags, edges, 0).unwrap();
        let levels = levels(&d).unwrap();
        let sizes: Vec<usize> = levels.iter().map(|l| l.len()).collect();
        assert_eq!(sizes, vec![4, 2, 1]);
        assert_eq!(levels[2], vec![0]);
    }

    #[test]
    fn levels_rejects_wide_nodes() {
        let bags = vec![vec![0]; 4];
        let edges = vec![(0, 1), (0, 2), (0, 3)];
        let d = TreeDecomposition::new(bags, edges, 0).unwrap();
        assert!(levels(&d).is_err());
    }

    #[test]
    fn decomposition_json_round_trip() {
        let d = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)], 1).unwrap();
        let back = TreeDecomposition::from_json(&d.to_json()).unwrap();
        assert_eq!(d, back);
    }
}

//! Dominating set gadget on a grid network.
//!
//! For a graph on `n` vertices and a budget of `k` picks the gadget is a
//! `(k + 2) x n^2` grid of 64-state cells, each state a bundle of six
//! one-way flags. Every selection row `r < k` encodes one picked vertex
//! through its frozen mark pattern: the row splits into `n` blocks of `n`
//! cells, a valid block is marked from some head offset onwards, and the
//! head offset spells the pick, mirrored in odd blocks so that adjacent
//! blocks agree exactly when their head offsets sum to `n - 1`. Static
//! checks reject anything but a tail-marked block; two opposite waves
//! seeded at the heads race to each block border, and the border cell
//! raises the violation flag unless the wave a consistent pick sends
//! first arrives strictly first.
//!
//! The input graph enters only through the start configuration of row
//! `k`, whose marks spell the closed neighborhoods block by block (again
//! mirrored). A coverage flag springs at every head, falls down its
//! column, enters row `k` through marked cells only, and then drifts to
//! the right end of its block in the bottom row. A clock flag descending
//! from row zero starts a deadline sweep in the bottom row that reaches
//! each block end two steps after the latest legitimate coverage arrival,
//! and a block end caught without coverage raises the violation flag.
//!
//! An orbit started from a marking therefore keeps every violation flag
//! low for `n + k + 4` steps exactly when the marking picks a dominating
//! multiset, and the network depends on the graph only through its vertex
//! count.

use crate::core::{Alphabet, Config, Graph, LocalRule, Network, State};
use crate::traces::RleTrace;
use crate::{Error, Result};
use std::sync::Arc;

const M: State = 1;
const D: State = 1 << 1;
const R: State = 1 << 2;
const L: State = 1 << 3;
const P: State = 1 << 4;
const E: State = 1 << 5;

const FLAGS: [char; 6] = ['m', 'd', 'R', 'L', 'P', 'e'];

/// 64 states, one per subset of the six flags, ordered by inclusion.
fn flag_alphabet() -> Alphabet {
    let names = (0..64u16)
        .map(|s| {
            FLAGS
                .iter()
                .enumerate()
                .map(|(i, &f)| if s >> i & 1 == 1 { f } else { '-' })
                .collect()
        })
        .collect();
    let mut order = Vec::new();
    for s in 0..64u16 {
        for i in 0..6 {
            if s >> i & 1 == 0 {
                order.push((s, s | 1 << i));
            }
        }
    }
    Alphabet::new(names, &order).expect("flag subsets form a valid order")
}

const UP: usize = 0;
const LEFT: usize = 1;
const SELF: usize = 2;
const RIGHT: usize = 3;

struct Core {
    n: usize,
    k: usize,
    /// Columns per row.
    w: usize,
    /// Input positions of the up, left, own and right states per node.
    nbr: Vec<[Option<usize>; 4]>,
}

fn has(s: State, f: State) -> bool {
    s & f != 0
}

impl LocalRule for Core {
    fn image(&self, node: usize, inputs: &[State]) -> Vec<State> {
        let row = node / self.w;
        let col = node % self.w;
        let b = col / self.n;
        let c = col % self.n;
        let get = |i: usize| self.nbr[node][i].map(|p| inputs[p]);
        let cur = inputs[self.nbr[node][SELF].expect("own state is always read")];
        let up = get(UP);
        let left = get(LEFT);
        let right = get(RIGHT);
        let flag = |s: Option<State>, f: State| s.is_some_and(|s| has(s, f));

        let mut next = cur;
        if row < self.k {
            let head = has(cur, M) && (c == 0 || !has(left.expect("same block"), M));
            if head {
                next |= R | L | D;
            }
            if flag(left, R) {
                next |= R;
            }
            if flag(right, L) {
                next |= L;
            }
            if flag(up, D) {
                next |= D;
            }
            if row == 0 || flag(up, P) {
                next |= P;
            }
            // marks inside a block may only step up once, and the block
            // must end marked
            let mut bad = c + 1 < self.n && has(cur, M) && !has(right.expect("same block"), M);
            bad |= c + 1 == self.n && !has(cur, M);
            // border races: the outrun wave must find the other one
            // already settled
            if c == 0 && b > 0 {
                bad |= flag(left, R) && !has(cur, R) && !has(cur, L);
            }
            if c + 1 == self.n && b + 1 < self.n {
                bad |= flag(right, L) && !has(cur, L) && !has(cur, R);
            }
            if bad {
                next |= E;
            }
        } else if row == self.k {
            if has(cur, M) && flag(up, D) {
                next |= D;
            }
            if flag(up, P) {
                next |= P;
            }
        } else {
            if flag(up, P) {
                next |= P;
            }
            if c == 0 {
                if has(cur, P) {
                    next |= L;
                }
                if has(cur, L) {
                    next |= R;
                }
            } else if flag(left, R) {
                next |= R;
            }
            if flag(up, D) || (c > 0 && flag(left, D)) {
                next |= D;
            }
            if c + 1 == self.n {
                let deadline = if self.n == 1 {
                    has(cur, L) && !has(cur, R)
                } else {
                    flag(left, R) && !has(cur, R)
                };
                if deadline && !has(cur, D) {
                    next |= E;
                }
            }
        }
        vec![next]
    }

    fn support(&self, _node: usize) -> Option<Vec<State>> {
        None
    }
}

/// A freezing network whose clean orbits from marking configurations are
/// exactly the dominating multisets of the encoded size.
pub struct DominatingGadget {
    pub net: Network,
    pub horizon: u32,
    n: usize,
    k: usize,
    /// `dominates[u][v]`: `v` lies in the closed neighborhood of `u`.
    dominates: Vec<Vec<bool>>,
}

/// Builds the gadget deciding whether `g` has a dominating set of at most
/// `k` vertices. Needs `k >= 1`.
pub fn dominating_set_gadget(g: &Graph, k: usize) -> Result<DominatingGadget> {
    if k == 0 {
        return Err(Error::validation("dominating gadget needs at least one selection row"));
    }
    let n = g.n();
    let w = n * n;
    let cells = (k + 2) * w;
    if cells > 1 << 20 {
        return Err(Error::Budget {
            what: format!("{} by {w} gadget grid", k + 2),
            needed: cells as u64,
            cap: 1 << 20,
        });
    }
    let host = Graph::grid(k + 2, w)?;
    let mut nbr = Vec::with_capacity(host.n());
    for v in 0..host.n() {
        let row = v / w;
        let col = v % w;
        let mut slot = [None; 4];
        let mut pos = 0;
        // closed neighborhoods list ascending ids: up, left, self, right
        for (i, present) in
            [(UP, row > 0), (LEFT, col > 0), (SELF, true), (RIGHT, col + 1 < w)]
        {
            if present {
                slot[i] = Some(pos);
                pos += 1;
            }
        }
        nbr.push(slot);
    }
    let dominates = (0..n)
        .map(|u| {
            let nb = g.closed_neighborhood(u);
            (0..n).map(|v| nb.binary_search(&v).is_ok()).collect()
        })
        .collect();
    let core = Arc::new(Core { n, k, w, nbr });
    let net = Network::new_func(host, flag_alphabet(), core as Arc<dyn LocalRule>, true);
    Ok(DominatingGadget { net, horizon: (n + k + 4) as u32, n, k, dominates })
}

impl DominatingGadget {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Head offset of block `b` for pick `v`, mirrored in odd blocks. The
    /// same map decodes a graph row offset back to a vertex.
    fn mirrored(&self, b: usize, v: usize) -> usize {
        if b % 2 == 0 {
            v
        } else {
            self.n - 1 - v
        }
    }

    /// Start configuration for one pick per selection row: tail-marked
    /// selection blocks, closed neighborhoods in the graph row, a clear
    /// bottom row, and no raised flags anywhere.
    pub fn marking_config(&self, marking: &[usize]) -> Result<Config> {
        if marking.len() != self.k {
            return Err(Error::validation(format!(
                "marking has {} picks, gadget has {} selection rows",
                marking.len(),
                self.k
            )));
        }
        if let Some(&v) = marking.iter().find(|&&v| v >= self.n) {
            return Err(Error::validation(format!("pick {v} out of range")));
        }
        let w = self.n * self.n;
        let mut cfg = Vec::with_capacity((self.k + 2) * w);
        for &v in marking {
            for col in 0..w {
                let h = self.mirrored(col / self.n, v);
                cfg.push(if col % self.n >= h { M } else { 0 });
            }
        }
        for col in 0..w {
            let u = col / self.n;
            let v = self.mirrored(u, col % self.n);
            cfg.push(if self.dominates[u][v] { M } else { 0 });
        }
        cfg.resize((self.k + 2) * w, 0);
        Ok(cfg)
    }

    /// Whether the orbit of `start` keeps every violation flag low up to
    /// the horizon. The flag latches, so the settled picture tells all.
    pub fn orbit_stays_clean(&self, start: &Config) -> Result<bool> {
        let mut cfg = start.clone();
        if cfg.iter().any(|&s| has(s, E)) {
            return Ok(false);
        }
        for _ in 0..self.horizon {
            cfg = self.net.step_deterministic(&cfg)?;
        }
        Ok(!cfg.iter().any(|&s| has(s, E)))
    }

    /// First marking with a clean orbit, scanning all `n^k` pick tuples.
    pub fn satisfying_marking(&self) -> Result<Option<Vec<usize>>> {
        let total = (self.n as u64).checked_pow(self.k as u32);
        if total.is_none_or(|t| t > 1 << 20) {
            return Err(Error::Budget {
                what: format!("marking sweep over {} rows of {} picks", self.k, self.n),
                needed: total.unwrap_or(u64::MAX),
                cap: 1 << 20,
            });
        }
        let mut marking = vec![0usize; self.k];
        loop {
            if self.orbit_stays_clean(&self.marking_config(&marking)?)? {
                return Ok(Some(marking));
            }
            let mut i = self.k;
            loop {
                if i == 0 {
                    return Ok(None);
                }
                i -= 1;
                marking[i] += 1;
                if marking[i] < self.n {
                    break;
                }
                marking[i] = 0;
            }
        }
    }

    pub fn satisfiable(&self) -> Result<bool> {
        Ok(self.satisfying_marking()?.is_some())
    }

    /// Whether `trace` is admissible for `node`: right length, quiescent
    /// start apart from the mark, the mark constrained by the node's row,
    /// and the violation flag low throughout.
    pub fn admits(&self, node: usize, trace: &RleTrace) -> bool {
        if node >= self.net.n() || trace.len() != self.horizon + 1 {
            return false;
        }
        let syms = trace.symbols();
        if syms.iter().any(|&s| has(s, E)) {
            return false;
        }
        let first = syms[0];
        if first & (D | R | L | P) != 0 {
            return false;
        }
        let w = self.n * self.n;
        let row = node / w;
        let col = node % w;
        if row < self.k {
            true
        } else if row == self.k {
            let u = col / self.n;
            has(first, M) == self.dominates[u][self.mirrored(u, col % self.n)]
        } else {
            !has(first, M)
        }
    }
}

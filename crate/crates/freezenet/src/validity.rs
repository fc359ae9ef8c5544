//! Locally and partially valid traces, and their exhaustive enumeration.
//!
//! A locally valid trace at node `v` assigns a monotone state sequence to
//! every node of `N[v]` such that `v`'s sequence follows its rule against
//! the neighborhood cross sections and lies in the specification set of `v`.
//! A partially valid trace over a bag `U` does this for every center in `U`
//! at once, over the joint domain `N[U]`. Nodes of `N[U] \ U` are boundary
//! context: their sequences must only be monotone.
//!
//! [`enumerate_pvt`] is the solver's workhorse. It walks change events in
//! time order and is complete: every partially valid trace over the bag is
//! produced exactly once. Pruning happens only where provably sound, namely
//! monotonicity, rule images at the changing step, plateau stationarity, and
//! specification prefix feasibility.

use crate::core::{Network, State};
use crate::traces::{RleTrace, SequenceEncoding, Specification};
use crate::{Error, Result};

/// Default cap on partial traces enumerated per bag.
pub const PVT_CAP: u64 = 1_000_000;

/// Work steps allowed per emitted trace before the search refuses.
const WORK_PER_EMIT: u64 = 64;

/// Trace assignment over one closed neighborhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalTrace {
    center: usize,
    enc: SequenceEncoding,
}

impl LocalTrace {
    /// Wraps an encoding whose node set is exactly `N[center]`.
    pub fn new(net: &Network, center: usize, enc: SequenceEncoding) -> Result<LocalTrace> {
        if center >= net.n() {
            return Err(Error::validation(format!("center {center} out of range")));
        }
        if enc.nodes() != net.graph().closed_neighborhood(center) {
            return Err(Error::validation(format!(
                "encoding covers {:?}, expected the closed neighborhood {:?} of {center}",
                enc.nodes(),
                net.graph().closed_neighborhood(center)
            )));
        }
        Ok(LocalTrace { center, enc })
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn encoding(&self) -> &SequenceEncoding {
        &self.enc
    }
}

/// Trace assignment over the closed neighborhood of a bag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialTrace {
    centers: Vec<usize>,
    enc: SequenceEncoding,
}

impl PartialTrace {
    /// Wraps an encoding whose node set is exactly `N[centers]`.
    pub fn new(net: &Network, centers: Vec<usize>, enc: SequenceEncoding) -> Result<PartialTrace> {
        let mut sorted = centers;
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() {
            return Err(Error::validation("bag must contain at least one center"));
        }
        if sorted.last().copied().unwrap_or(0) >= net.n() {
            return Err(Error::validation("bag mentions a node out of range"));
        }
        let domain = net.graph().closed_neighborhood_of_set(&sorted);
        if enc.nodes() != domain.as_slice() {
            return Err(Error::validation(format!(
                "encoding covers {:?}, expected {:?}",
                enc.nodes(),
                domain
            )));
        }
        Ok(PartialTrace { centers: sorted, enc })
    }

    pub(crate) fn new_unchecked(centers: Vec<usize>, enc: SequenceEncoding) -> PartialTrace {
        PartialTrace { centers, enc }
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn encoding(&self) -> &SequenceEncoding {
        &self.enc
    }

    pub fn into_encoding(self) -> SequenceEncoding {
        self.enc
    }
}

/// Rule and specification conformance of one center's neighborhood trace.
///
/// Checks, per stored row: the center's next state lies in the rule image of
/// the current cross section, the center may stay put wherever its plateau
/// contains an internal step, and the full center sequence belongs to the
/// specification set.
pub fn is_locally_valid(net: &Network, spec: &Specification, lt: &LocalTrace) -> Result<bool> {
    let enc = lt.encoding();
    if enc.horizon() != spec.horizon() {
        return Err(Error::validation(format!(
            "trace horizon {} does not match specification horizon {}",
            enc.horizon(),
            spec.horizon()
        )));
    }
    let v = lt.center();
    let self_col = enc
        .nodes()
        .binary_search(&v)
        .expect("center inside encoding domain");
    let times = enc.times();
    let rows = enc.rows();
    let t = enc.horizon();
    for (i, row) in rows.iter().enumerate() {
        let img = net.local_image(v, row)?;
        let own = row[self_col];
        let plateau_has_step = if i + 1 < times.len() {
            times[i + 1] - times[i] >= 2
        } else {
            t - times[i] >= 1
        };
        if plateau_has_step && !img.contains(&own) {
            return Ok(false);
        }
        if i + 1 < rows.len() && !img.contains(&rows[i + 1][self_col]) {
            return Ok(false);
        }
    }
    Ok(spec.admits(v, &enc.column(v)?))
}

/// Conformance of every center of a bag within a joint trace.
pub fn is_partially_valid(net: &Network, spec: &Specification, pt: &PartialTrace) -> Result<bool> {
    for &v in pt.centers() {
        let restricted = pt.encoding().restrict(net.graph().closed_neighborhood(v))?;
        let lt = LocalTrace::new(net, v, restricted)?;
        if !is_locally_valid(net, spec, &lt)? {
            return Ok(false);
        }
    }
    Ok(true)
}

struct Enumerator<'a> {
    net: &'a Network,
    spec: &'a Specification,
    bag: Vec<usize>,
    domain: Vec<usize>,
    /// For each center, positions of its closed neighborhood inside `domain`.
    center_cols: Vec<Vec<usize>>,
    /// For each center, its own column inside `domain`.
    self_cols: Vec<usize>,
    /// Whether each domain column is a center, and its center index.
    center_of_col: Vec<Option<usize>>,
    t: u32,
    cap: u64,
    work_cap: u64,
    work: u64,
    /// Per domain column: allowed states (rule support or full alphabet).
    col_states: Vec<Vec<State>>,
    out: Vec<PartialTrace>,
}

impl<'a> Enumerator<'a> {
    fn charge(&mut self, units: u64) -> Result<()> {
        self.work += units;
        if self.work > self.work_cap {
            return Err(Error::Budget {
                what: format!("partial trace search at bag {:?}", self.bag),
                needed: self.work,
                cap: self.work_cap,
            });
        }
        Ok(())
    }

    /// Rule images of every center against the current cross section.
    fn center_images(&self, row: &[State]) -> Result<Vec<Vec<State>>> {
        self.bag
            .iter()
            .enumerate()
            .map(|(ci, &v)| {
                let inputs: Vec<State> =
                    self.center_cols[ci].iter().map(|&c| row[c]).collect();
                self.net.local_image(v, &inputs)
            })
            .collect()
    }

    /// Appends the closing run to each center prefix and tests membership.
    fn close_and_emit(
        &mut self,
        times: &[u32],
        rows: &[Vec<State>],
        prefixes: &[Vec<(State, u32)>],
        cur_time: u32,
    ) -> Result<()> {
        for (ci, &v) in self.bag.iter().enumerate() {
            let mut runs = prefixes[ci].clone();
            let last = runs.last_mut().expect("non-empty prefix");
            last.1 += self.t - cur_time;
            if !self
                .spec
                .admits(v, &RleTrace::from_runs_unchecked(runs))
            {
                return Ok(());
            }
        }
        if self.out.len() as u64 >= self.cap {
            return Err(Error::Budget {
                what: format!("partial traces at bag {:?}", self.bag),
                needed: self.out.len() as u64 + 1,
                cap: self.cap,
            });
        }
        let enc = SequenceEncoding::from_rows_unchecked(
            self.domain.clone(),
            times.to_vec(),
            rows.to_vec(),
            self.t,
        );
        self.out
            .push(PartialTrace::new_unchecked(self.bag.clone(), enc));
        Ok(())
    }

    fn explore(
        &mut self,
        times: &mut Vec<u32>,
        rows: &mut Vec<Vec<State>>,
        prefixes: &mut Vec<Vec<(State, u32)>>,
        cur_time: u32,
    ) -> Result<()> {
        self.charge(1)?;
        let row = rows.last().expect("at least the initial row").clone();
        let imgs = self.center_images(&row)?;
        let stationary: Vec<bool> = self
            .bag
            .iter()
            .enumerate()
            .map(|(ci, _)| imgs[ci].contains(&row[self.self_cols[ci]]))
            .collect();
        let all_stationary = stationary.iter().all(|&s| s);

        // Closing keeps the last row until the horizon; that contains an
        // internal step unless the change happened at the horizon itself.
        if cur_time == self.t || all_stationary {
            self.close_and_emit(times, rows, prefixes, cur_time)?;
        }
        if cur_time == self.t {
            return Ok(());
        }
        // A non-stationary center forces the next change immediately.
        let last_change: u32 = if all_stationary { self.t } else { cur_time + 1 };
        for next_time in cur_time + 1..=last_change {
            let gap_has_step = next_time - cur_time >= 2;
            // Per-column options: keep, or any strictly greater state that
            // the rule and the specification prefix allow.
            let mut options: Vec<Vec<Option<State>>> = Vec::with_capacity(self.domain.len());
            for (col, _) in self.domain.iter().enumerate() {
                let cur = row[col];
                let mut opts: Vec<Option<State>> = Vec::new();
                match self.center_of_col[col] {
                    Some(ci) => {
                        if stationary[ci] {
                            opts.push(None);
                        }
                        // A center changing after a gap also needs the
                        // stationary steps inside the gap.
                        if !gap_has_step || stationary[ci] {
                            for &q in &imgs[ci] {
                                if q != cur
                                    && self.net.alphabet().leq(cur, q)
                                    && self.feasible_after_change(ci, &prefixes[ci], next_time, q)
                                {
                                    opts.push(Some(q));
                                }
                            }
                        }
                    }
                    None => {
                        opts.push(None);
                        for q in self.net.alphabet().strictly_above(cur) {
                            if self.col_states[col].binary_search(&q).is_ok() {
                                opts.push(Some(q));
                            }
                        }
                    }
                }
                options.push(opts);
            }
            if options.iter().any(|o| o.is_empty()) {
                continue;
            }
            self.branch_combinations(&options, times, rows, prefixes, cur_time, next_time)?;
        }
        Ok(())
    }

    /// Whether the center's specification can extend its prefix with a run
    /// of `q` starting at `next_time`.
    fn feasible_after_change(
        &self,
        ci: usize,
        prefix: &[(State, u32)],
        next_time: u32,
        q: State,
    ) -> bool {
        let v = self.bag[ci];
        if self.spec.node_set(v).is_none() {
            return true;
        }
        let mut runs = prefix.to_vec();
        let cur_time = runs.iter().map(|&(_, l)| l).sum::<u32>() - 1;
        runs.last_mut().expect("non-empty prefix").1 += next_time - cur_time - 1;
        runs.push((q, 1));
        self.spec.prefix_feasible(v, &runs)
    }

    #[allow(clippy::too_many_arguments)]
    fn branch_combinations(
        &mut self,
        options: &[Vec<Option<State>>],
        times: &mut Vec<u32>,
        rows: &mut Vec<Vec<State>>,
        prefixes: &mut Vec<Vec<(State, u32)>>,
        cur_time: u32,
        next_time: u32,
    ) -> Result<()> {
        let cols = options.len();
        let mut idx = vec![0usize; cols];
        loop {
            self.charge(1)?;
            if idx.iter().enumerate().any(|(c, &i)| options[c][i].is_some()) {
                let row = rows.last().expect("non-empty rows");
                let mut new_row = row.clone();
                for (c, &i) in idx.iter().enumerate() {
                    if let Some(q) = options[c][i] {
                        new_row[c] = q;
                    }
                }
                // Extend center prefixes across the gap and the change.
                for (ci, &col) in self.self_cols.iter().enumerate() {
                    let runs = &mut prefixes[ci];
                    let gap = next_time - cur_time - 1;
                    runs.last_mut().expect("non-empty prefix").1 += gap;
                    let q = new_row[col];
                    if q == row[col] {
                        runs.last_mut().expect("non-empty prefix").1 += 1;
                    } else {
                        runs.push((q, 1));
                    }
                }
                times.push(next_time);
                rows.push(new_row);
                self.explore(times, rows, prefixes, next_time)?;
                times.pop();
                rows.pop();
                for (ci, &col) in self.self_cols.iter().enumerate() {
                    let runs = &mut prefixes[ci];
                    let gap = next_time - cur_time - 1;
                    let q = rows.last().expect("non-empty rows")[col];
                    let last = runs.last_mut().expect("non-empty prefix");
                    if last.0 == q {
                        last.1 -= gap + 1;
                    } else {
                        runs.pop();
                        runs.last_mut().expect("non-empty prefix").1 -= gap;
                    }
                }
            }
            // Mixed-radix advance over per-column option indices.
            let mut c = cols;
            loop {
                if c == 0 {
                    return Ok(());
                }
                c -= 1;
                if idx[c] + 1 < options[c].len() {
                    idx[c] += 1;
                    for d in idx.iter_mut().skip(c + 1) {
                        *d = 0;
                    }
                    break;
                }
            }
        }
    }
}

/// Every partially valid trace over bag `u` at horizon `t`, ordered by
/// canonical key.
///
/// The search walks change events forward in time, so its cost tracks the
/// number of valid traces rather than the dense sequence space. Exceeding
/// `cap` emitted traces, or a work allowance proportional to it, aborts with
/// a budget error naming the bag.
pub fn enumerate_pvt(
    net: &Network,
    spec: &Specification,
    u: &[usize],
    t: u32,
    cap: u64,
) -> Result<Vec<PartialTrace>> {
    if t != spec.horizon() {
        return Err(Error::validation(format!(
            "horizon {t} does not match specification horizon {}",
            spec.horizon()
        )));
    }
    let mut bag: Vec<usize> = u.to_vec();
    bag.sort_unstable();
    bag.dedup();
    if bag.is_empty() {
        return Err(Error::validation("bag must contain at least one center"));
    }
    if bag.last().copied().unwrap_or(0) >= net.n() {
        return Err(Error::validation(format!(
            "bag {bag:?} mentions a node out of range for {} nodes",
            net.n()
        )));
    }
    let domain = net.graph().closed_neighborhood_of_set(&bag);
    let center_cols: Vec<Vec<usize>> = bag
        .iter()
        .map(|&v| {
            net.graph()
                .closed_neighborhood(v)
                .iter()
                .map(|&w| domain.binary_search(&w).expect("neighborhood inside domain"))
                .collect()
        })
        .collect();
    let self_cols: Vec<usize> = bag
        .iter()
        .map(|&v| domain.binary_search(&v).expect("center inside domain"))
        .collect();
    let center_of_col: Vec<Option<usize>> = domain
        .iter()
        .map(|&w| bag.binary_search(&w).ok())
        .collect();
    let col_states: Vec<Vec<State>> = domain
        .iter()
        .map(|&w| {
            net.support(w)
                .map(|mut s| {
                    s.sort_unstable();
                    s.dedup();
                    s
                })
                .unwrap_or_else(|| net.alphabet().states().collect())
        })
        .collect();
    let mut e = Enumerator {
        net,
        spec,
        bag,
        domain,
        center_cols,
        self_cols,
        center_of_col,
        t,
        cap,
        work_cap: cap.saturating_mul(WORK_PER_EMIT).saturating_add(4096),
        work: 0,
        col_states,
        out: Vec::new(),
    };

    // Initial cross sections: any supported state per column, with center
    // columns filtered by specification prefix feasibility.
    let mut initial: Vec<Vec<State>> = Vec::with_capacity(e.domain.len());
    for (col, states) in e.col_states.iter().enumerate() {
        let opts: Vec<State> = match e.center_of_col[col] {
            Some(ci) => states
                .iter()
                .copied()
                .filter(|&q| e.spec.prefix_feasible(e.bag[ci], &[(q, 1)]))
                .collect(),
            None => states.clone(),
        };
        initial.push(opts);
    }
    if initial.iter().all(|o| !o.is_empty()) {
        let mut idx = vec![0usize; e.domain.len()];
        loop {
            e.charge(1)?;
            let row: Vec<State> = idx
                .iter()
                .enumerate()
                .map(|(c, &i)| initial[c][i])
                .collect();
            let mut prefixes: Vec<Vec<(State, u32)>> = e
                .self_cols
                .iter()
                .map(|&col| vec![(row[col], 1u32)])
                .collect();
            let mut times = vec![0u32];
            let mut rows = vec![row];
            e.explore(&mut times, &mut rows, &mut prefixes, 0)?;
            let mut c = e.domain.len();
            let mut done = true;
            while c > 0 {
                c -= 1;
                if idx[c] + 1 < initial[c].len() {
                    idx[c] += 1;
                    for d in idx.iter_mut().skip(c + 1) {
                        *d = 0;
                    }
                    done = false;
                    break;
                }
                idx[c] = 0;
            }
            if done {
                break;
            }
        }
    }
    let mut out = std::mem::take(&mut e.out);
    out.sort_by(|a, b| {
        a.encoding()
            .canonical_key()
            .cmp(&b.encoding().canonical_key())
    });
    if cfg!(debug_assertions) {
        for pt in &out {
            debug_assert!(
                is_partially_valid(net, spec, pt).unwrap_or(false),
                "enumerated trace fails validity recheck"
            );
        }
        for pair in out.windows(2) {
            debug_assert_ne!(
                pair[0].encoding().canonical_key(),
                pair[1].encoding().canonical_key(),
                "duplicate partial trace emitted"
            );
        }
    }
    Ok(out)
}

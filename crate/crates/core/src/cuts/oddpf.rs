//! Path-free inequalities on 3-sets: if no two arcs of `A'` inside a
//! vertex triple `S` chain into a path over three distinct vertices, a tour
//! uses at most one arc of `A'`.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Cut, CutFamily, EPS_CUT};
use crate::expand::{ArcIndex, TimeExpandedGraph};
use crate::lp::Sense;
use crate::master::CombinedFlow;
use crate::model::{VertexId, SOURCE};

/// Default limit on the number of support arcs handed to the exact
/// stable-set search.
pub const STABLE_SET_LIMIT: usize = 48;
const SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathFreeError {
    #[error("arc set of size {size} exceeds the exact stable-set limit {limit}")]
    SetTooLarge { size: usize, limit: usize },
}

/// `a` followed by `b` is a timed path over three distinct vertices.
pub fn chains(g: &TimeExpandedGraph, a: ArcIndex, b: ArcIndex) -> bool {
    g.head_node(a) == g.tail_node(b) && g.arc(a).tail != g.arc(b).head
}

pub fn conflict(g: &TimeExpandedGraph, a: ArcIndex, b: ArcIndex) -> bool {
    chains(g, a, b) || chains(g, b, a)
}

/// For every `v != s`, the 3-set containing `v` (and not `s`) with the most
/// combined flow on its internal arcs; lexicographically first on ties.
pub fn heaviest_triples(flow: &CombinedFlow) -> Vec<[VertexId; 3]> {
    let n = flow.n();
    let weight = |s: &[VertexId; 3]| -> f64 {
        let mut w = 0.0;
        for &a in s {
            for &b in s {
                if a != b {
                    w += flow.get(a, b);
                }
            }
        }
        w
    };
    let mut out = BTreeSet::new();
    for v in 1..n {
        let mut best: Option<([VertexId; 3], f64)> = None;
        for a in 1..n {
            for b in a + 1..n {
                if a == v || b == v {
                    continue;
                }
                let mut s = [v, a, b];
                s.sort_unstable();
                let w = weight(&s);
                if best.map_or(true, |(_, bw)| w > bw) {
                    best = Some((s, w));
                }
            }
        }
        if let Some((s, w)) = best {
            if w > 1.0 + EPS_CUT {
                out.insert(s);
            }
        }
    }
    out.into_iter().collect()
}

/// Search nodes allowed in one stable-set search.
const STABLE_SET_NODES: u64 = 200_000;

/// Maximum-weight stable set by branch and bound over bitmasks. Exact
/// unless the node budget runs out, in which case the best set found so far
/// is returned; any stable set yields a valid cut.
fn max_weight_stable_set(weights: &[f64], adj: &[u64]) -> (f64, u64) {
    struct Search<'a> {
        weights: &'a [f64],
        adj: &'a [u64],
        best: (f64, u64),
        nodes: u64,
    }
    impl Search<'_> {
        fn rec(&mut self, cand: u64, cur: f64, chosen: u64) {
            self.nodes += 1;
            if cand == 0 {
                if cur > self.best.0 {
                    self.best = (cur, chosen);
                }
                return;
            }
            if self.nodes > STABLE_SET_NODES {
                return;
            }
            let bound: f64 = (0..self.weights.len()).filter(|&i| cand >> i & 1 == 1).map(|i| self.weights[i]).sum();
            if cur + bound <= self.best.0 {
                return;
            }
            let i = cand.trailing_zeros() as usize;
            self.rec(cand & !(1 << i) & !self.adj[i], cur + self.weights[i], chosen | 1 << i);
            self.rec(cand & !(1 << i), cur, chosen);
        }
    }
    let all = if weights.len() == 64 { u64::MAX } else { (1u64 << weights.len()) - 1 };
    let mut search = Search { weights, adj, best: (0.0, 0), nodes: 0 };
    // heaviest-first greedy start
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    let mut free = all;
    for i in order {
        if free >> i & 1 == 1 {
            search.best.0 += weights[i];
            search.best.1 |= 1 << i;
            free &= !(1 << i) & !adj[i];
        }
    }
    search.rec(all, 0.0, 0);
    search.best
}

/// The most violated path-free cut on `set`, if any.
pub fn path_free_cut(
    g: &TimeExpandedGraph,
    x: &[f64],
    set: [VertexId; 3],
    limit: usize,
) -> Result<Option<Cut>, PathFreeError> {
    debug_assert!(!set.contains(&SOURCE));
    let mut inside = Vec::new();
    for &u in &set {
        for &v in &set {
            if u != v {
                inside.extend_from_slice(g.copies(u, v));
            }
        }
    }
    inside.sort_unstable();
    let support: Vec<ArcIndex> = inside.iter().copied().filter(|&a| x[a] > SUPPORT_TOL).collect();
    let limit = limit.min(64);
    if support.len() > limit {
        return Err(PathFreeError::SetTooLarge { size: support.len(), limit });
    }
    let weights: Vec<f64> = support.iter().map(|&a| x[a]).collect();
    let adj: Vec<u64> = support
        .iter()
        .map(|&a| {
            support
                .iter()
                .enumerate()
                .filter(|&(_, &b)| conflict(g, a, b))
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect();
    let (weight, chosen) = max_weight_stable_set(&weights, &adj);
    if weight <= 1.0 + EPS_CUT {
        return Ok(None);
    }
    let mut members: Vec<ArcIndex> = (0..support.len()).filter(|&i| chosen >> i & 1 == 1).map(|i| support[i]).collect();
    // zero-valued arcs that keep the set path-free strengthen the cut for free
    for &a in &inside {
        if x[a] <= SUPPORT_TOL && members.iter().all(|&b| !conflict(g, a, b)) {
            members.push(a);
        }
    }
    Ok(Some(Cut::new(
        CutFamily::OddPf,
        Sense::Le,
        1.0,
        members.into_iter().map(|a| (a, 1.0)).collect(),
    )))
}

pub fn separate_odd_path_free(g: &TimeExpandedGraph, flow: &CombinedFlow, x: &[f64], limit: usize) -> Vec<Cut> {
    let mut cuts = Vec::new();
    for set in heaviest_triples(flow) {
        match path_free_cut(g, x, set, limit) {
            Ok(Some(cut)) => cuts.push(cut),
            Ok(None) => {}
            Err(e) => log::debug!("path-free separation skips {set:?}: {e}"),
        }
    }
    cuts
}

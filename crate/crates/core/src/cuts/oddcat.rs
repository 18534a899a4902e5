//! Odd-cycle inequalities on the arc incompatibility graph: two base arcs
//! conflict if they share a tail, share a head, or are reverse to each
//! other. A tour uses a stable set, so an odd cycle `C` of pairwise
//! consecutive conflicts carries at most `(|C| - 1) / 2`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::{Cut, CutFamily, EPS_CUT};
use crate::expand::TimeExpandedGraph;
use crate::lp::Sense;
use crate::master::CombinedFlow;
use crate::model::VertexId;

const SUPPORT_TOL: f64 = 1e-9;

pub fn incompatible(a: (VertexId, VertexId), b: (VertexId, VertexId)) -> bool {
    a != b && (a.0 == b.0 || a.1 == b.1 || (a.0 == b.1 && a.1 == b.0))
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Odd cycles of support arcs whose inequality is violated.
pub fn violated_cycles(flow: &CombinedFlow) -> Vec<Vec<(VertexId, VertexId)>> {
    let n = flow.n();
    if n < 3 {
        return Vec::new();
    }
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && flow.get(u, v) > SUPPORT_TOL {
                arcs.push((u, v));
            }
        }
    }
    let m = arcs.len();
    let value: Vec<f64> = arcs.iter().map(|&(u, v)| flow.get(u, v)).collect();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in 0..m {
            if incompatible(arcs[i], arcs[j]) {
                adj[i].push((j, ((1.0 - value[i] - value[j]) / 2.0).max(0.0)));
            }
        }
    }
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for start in 0..m {
        // doubled node 2 i + parity
        let mut dist = vec![f64::INFINITY; 2 * m];
        let mut pred = vec![usize::MAX; 2 * m];
        dist[2 * start] = 0.0;
        let mut heap = BinaryHeap::from([Entry(0.0, 2 * start)]);
        let target = 2 * start + 1;
        while let Some(Entry(d, node)) = heap.pop() {
            if d > dist[node] || node == target {
                continue;
            }
            let (i, parity) = (node / 2, node % 2);
            for &(j, w) in &adj[i] {
                let next = 2 * j + (1 - parity);
                if d + w < dist[next] {
                    dist[next] = d + w;
                    pred[next] = node;
                    heap.push(Entry(d + w, next));
                }
            }
        }
        if dist[target] >= 0.5 - EPS_CUT {
            continue;
        }
        let mut walk = Vec::new();
        let mut node = target;
        while node != 2 * start {
            walk.push(node / 2);
            node = pred[node];
        }
        let cycle = odd_simple_cycle(walk);
        let lhs: f64 = cycle.iter().map(|&i| value[i]).sum();
        if lhs - (cycle.len() - 1) as f64 / 2.0 > EPS_CUT {
            let mut key = cycle.clone();
            key.sort_unstable();
            if seen.insert(key) {
                out.push(cycle.iter().map(|&i| arcs[i]).collect());
            }
        }
    }
    out
}

/// Reduces a closed walk of odd length to an odd simple cycle contained in it.
fn odd_simple_cycle(mut walk: Vec<usize>) -> Vec<usize> {
    loop {
        let mut split = None;
        'find: for p in 0..walk.len() {
            for q in p + 1..walk.len() {
                if walk[p] == walk[q] {
                    split = Some((p, q));
                    break 'find;
                }
            }
        }
        let Some((p, q)) = split else { return walk };
        let inner: Vec<usize> = walk[p..q].to_vec();
        if inner.len() % 2 == 1 {
            walk = inner;
        } else {
            walk.drain(p..q);
        }
    }
}

pub fn odd_cycle_cut(g: &TimeExpandedGraph, cycle: &[(VertexId, VertexId)]) -> Cut {
    let coefs = cycle
        .iter()
        .flat_map(|&(u, v)| g.copies(u, v).iter().map(|&a| (a, 1.0)))
        .collect();
    Cut::new(CutFamily::OddCat, Sense::Le, ((cycle.len() - 1) / 2) as f64, coefs)
}

pub fn separate_odd_cat(g: &TimeExpandedGraph, flow: &CombinedFlow) -> Vec<Cut> {
    violated_cycles(flow).iter().map(|c| odd_cycle_cut(g, c)).collect()
}

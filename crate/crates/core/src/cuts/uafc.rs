//! Unitary admissible-flow constraints. Once a tour uses `(u, v, t)` it
//! sits at `z = (v, t + c_uv(t))` and must eventually leave any set `X` of
//! timed vertices containing `z` and no copies of `u`, `s` or other copies
//! of `v`, through an arc whose head is neither `u` nor `v`.

use std::collections::HashMap;

use super::maxflow::FlowNetwork;
use super::{Cut, CutFamily, EPS_CUT};
use crate::expand::{ArcIndex, NodeIndex, TimeExpandedGraph};
use crate::lp::Sense;
use crate::model::SOURCE;

const SUPPORT_TOL: f64 = 1e-9;

/// Minimum cut for one candidate arc; returns the cut if it beats `x_a`.
pub fn uafc_for_arc(g: &TimeExpandedGraph, x: &[f64], a: ArcIndex) -> Option<Cut> {
    let arc = g.arc(a);
    let (u, v) = (arc.tail, arc.head);
    if u == SOURCE || v == SOURCE {
        return None;
    }
    let z = g.head_node(a);
    let mut local: HashMap<NodeIndex, usize> = HashMap::from([(z, 0)]);
    let mut order = vec![z];
    let mut net = FlowNetwork::new(2);
    const SINK: usize = 1;
    let mut i = 0;
    while i < order.len() {
        let node = order[i];
        let from = local[&node];
        i += 1;
        for b in g.out_arcs(node) {
            if x[b] <= SUPPORT_TOL {
                continue;
            }
            let head = g.arc(b).head;
            if head == u || head == v {
                continue;
            }
            if head == SOURCE {
                net.add_edge(from, SINK, x[b]);
                continue;
            }
            let h = g.head_node(b);
            let to = *local.entry(h).or_insert_with(|| {
                order.push(h);
                net.add_node()
            });
            net.add_edge(from, to, x[b]);
        }
    }
    let value = net.max_flow(0, SINK);
    if value >= x[a] - EPS_CUT {
        return None;
    }
    let side = net.source_side(0);
    let in_x = |k: NodeIndex| local.get(&k).is_some_and(|&l| side[l]);
    let mut coefs = vec![(a, 1.0)];
    for &node in order.iter().filter(|&&k| in_x(k)) {
        for b in g.out_arcs(node) {
            let head = g.arc(b).head;
            if head != u && head != v && !in_x(g.head_node(b)) {
                coefs.push((b, -1.0));
            }
        }
    }
    Some(Cut::new(CutFamily::Uafc, Sense::Le, 0.0, coefs))
}

/// Tries the `candidates` largest eligible arcs.
pub fn separate_uafc(g: &TimeExpandedGraph, x: &[f64], candidates: usize) -> Vec<Cut> {
    let mut eligible: Vec<ArcIndex> = (0..g.num_arcs())
        .filter(|&a| {
            let arc = g.arc(a);
            x[a] > EPS_CUT && arc.tail != SOURCE && arc.head != SOURCE
        })
        .collect();
    eligible.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    eligible.truncate(candidates);
    eligible.into_iter().filter_map(|a| uafc_for_arc(g, x, a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;

    #[test]
    fn dead_end_flow_is_cut() {
        // s -> 1 -> 2 -> 1 -> s at half, s -> 3 -> 2 -> 1 -> s at half
        let inst = Instance::from_constant(&vec![vec![1; 4]; 4], 8).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        let mut x = vec![0.0; g.num_arcs()];
        for (u, v, t) in [(0, 1, 0), (1, 2, 1), (2, 1, 2), (1, 0, 3), (0, 3, 0), (3, 2, 1)] {
            x[g.find_arc(u, v, t).unwrap()] += 0.5;
        }
        let a = g.find_arc(1, 2, 1).unwrap();
        let cut = uafc_for_arc(&g, &x, a).expect("continuation only returns to u");
        // X = {2@2}; the only flow out of X goes back to 1
        assert!((cut.violation(&x) - 0.5).abs() < 1e-12);
        assert_eq!(cut.coef(g.find_arc(2, 3, 2).unwrap()), -1.0);
        assert_eq!(cut.coef(g.find_arc(2, 1, 2).unwrap()), 0.0);
    }

    #[test]
    fn tour_arcs_are_not_cut() {
        let inst = Instance::from_constant(&vec![vec![1; 4]; 4], 8).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        let mut x = vec![0.0; g.num_arcs()];
        for (u, v, t) in [(0, 1, 0), (1, 2, 1), (2, 3, 2), (3, 0, 3)] {
            x[g.find_arc(u, v, t).unwrap()] = 1.0;
        }
        assert!(separate_uafc(&g, &x, 50).is_empty());
    }
}

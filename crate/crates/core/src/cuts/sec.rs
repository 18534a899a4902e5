//! Subtour elimination constraints and their time-lifted variant.

use super::arborescence::min_arborescence;
use super::maxflow::FlowNetwork;
use super::{Cut, CutFamily};
use crate::expand::TimeExpandedGraph;
use crate::lp::Sense;
use crate::master::CombinedFlow;
use crate::model::{TimePoint, VertexId, SOURCE};

/// Above this many outside vertices the arborescence bound is replaced by
/// the sum of cheapest incoming arcs.
pub const ARBORESCENCE_LIMIT: usize = 50;

/// For every `v != s`, the source side of a minimum `s`-`v` cut in the
/// combined flow together with its value. Duplicate sets are dropped.
pub fn min_cut_sets(flow: &CombinedFlow) -> Vec<(Vec<bool>, f64)> {
    let n = flow.n();
    let mut out: Vec<(Vec<bool>, f64)> = Vec::new();
    for v in 1..n {
        let mut net = FlowNetwork::new(n);
        for a in 0..n {
            for b in 0..n {
                let x = flow.get(a, b);
                if a != b && x > 0.0 {
                    net.add_edge(a, b, x);
                }
            }
        }
        let value = net.max_flow(SOURCE, v);
        let side = net.source_side(SOURCE);
        if !out.iter().any(|(s, _)| *s == side) {
            out.push((side, value));
        }
    }
    out
}

/// `x(delta+(S)) >= 1` over every timed arc leaving `S`.
pub fn sec_cut(g: &TimeExpandedGraph, in_set: &[bool]) -> Cut {
    lifted_cut(g, in_set, TimePoint::MAX, CutFamily::Sec)
}

/// Outgoing arcs of `S` that depart no later than `theta_hat`.
pub fn lsec_cut(g: &TimeExpandedGraph, in_set: &[bool], theta_hat: TimePoint) -> Cut {
    lifted_cut(g, in_set, theta_hat, CutFamily::Lsec)
}

fn lifted_cut(g: &TimeExpandedGraph, in_set: &[bool], theta_hat: TimePoint, family: CutFamily) -> Cut {
    let coefs = g
        .arcs()
        .iter()
        .enumerate()
        .filter(|(_, arc)| in_set[arc.tail] && !in_set[arc.head] && arc.departure <= theta_hat)
        .map(|(a, _)| (a, 1.0))
        .collect();
    Cut::new(family, Sense::Ge, 1.0, coefs)
}

pub fn separate_sec(g: &TimeExpandedGraph, flow: &CombinedFlow) -> Vec<Cut> {
    min_cut_sets(flow)
        .into_iter()
        .filter(|(_, value)| *value < 1.0 - super::EPS_CUT)
        .map(|(side, _)| sec_cut(g, &side))
        .collect()
}

/// Lower bound on the time a tour needs after first leaving `S` (which
/// contains the source): every outside vertex is entered once, the entering
/// arcs form an arborescence rooted at the contracted set, and a final arc
/// returns to the source.
pub fn remaining_time_bound(costs: &[Vec<TimePoint>], in_set: &[bool]) -> TimePoint {
    let n = costs.len();
    let outside: Vec<VertexId> = (0..n).filter(|&v| !in_set[v]).collect();
    if outside.is_empty() {
        return 0;
    }
    let back = (1..n).map(|u| costs[u][SOURCE]).min().unwrap_or(0) as i64;
    let inside: Vec<VertexId> = (0..n).filter(|&v| in_set[v]).collect();
    let entering = if outside.len() > ARBORESCENCE_LIMIT {
        outside
            .iter()
            .map(|&w| (0..n).filter(|&u| u != w).map(|u| costs[u][w] as i64).min().unwrap_or(0))
            .sum()
    } else {
        // node 0 is the contracted set, node i + 1 the i-th outside vertex
        let mut edges = Vec::new();
        for (i, &w) in outside.iter().enumerate() {
            let from_set = inside.iter().map(|&u| costs[u][w]).min().unwrap_or(0);
            edges.push((0, i + 1, from_set as i64));
            for (j, &w2) in outside.iter().enumerate() {
                if i != j {
                    edges.push((i + 1, j + 1, costs[w][w2] as i64));
                }
            }
        }
        min_arborescence(outside.len() + 1, 0, &edges).expect("complete graph has an arborescence")
    };
    (entering + back).min(TimePoint::MAX as i64) as TimePoint
}

pub fn separate_lsec(g: &TimeExpandedGraph, flow: &CombinedFlow, costs: &[Vec<TimePoint>], x: &[f64]) -> Vec<Cut> {
    min_cut_sets(flow)
        .into_iter()
        .filter_map(|(side, _)| {
            let bound = remaining_time_bound(costs, &side);
            let theta_hat = g.theta_max().saturating_sub(bound);
            if bound > g.theta_max() {
                // no tour can leave S at all: the empty left-hand side is
                // only right for infeasible instances, keep the plain SEC
                return Some(sec_cut(g, &side));
            }
            let cut = lsec_cut(g, &side, theta_hat);
            (cut.violation(x) > super::EPS_CUT).then_some(cut)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;

    fn matrix(n: usize, arcs: &[(usize, usize, f64)]) -> CombinedFlow {
        let mut x = vec![0.0; n * n];
        for &(u, v, w) in arcs {
            x[u * n + v] += w;
        }
        CombinedFlow::from_matrix(n, x)
    }

    #[test]
    fn two_subtours_give_violation_one() {
        let inst = Instance::from_constant(&vec![vec![1; 4]; 4], 4).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        let flow = matrix(4, &[(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)]);
        let cuts = separate_sec(&g, &flow);
        assert_eq!(cuts.len(), 1);
        // combined value of the cut is 0
        let mut x = vec![0.0; g.num_arcs()];
        for (a, arc) in g.arcs().iter().enumerate() {
            if (arc.tail, arc.head) == (0, 1) && arc.departure == 0 {
                x[a] = 1.0;
            }
        }
        assert_eq!(cuts[0].violation(&x), 1.0);
    }

    #[test]
    fn tour_flow_gives_nothing() {
        let inst = Instance::from_constant(&vec![vec![1; 4]; 4], 4).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        let flow = matrix(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]);
        assert!(separate_sec(&g, &flow).is_empty());
    }

    #[test]
    fn remaining_time_hand_computed() {
        // S = {0, 1}; outside {2, 3}. entering 1 -> 2 costs 2, 2 -> 3 costs 3,
        // cheapest return into 0 costs 1: bound 6
        let costs = vec![
            vec![0, 5, 7, 9],
            vec![4, 0, 2, 8],
            vec![1, 6, 0, 3],
            vec![2, 6, 4, 0],
        ];
        assert_eq!(remaining_time_bound(&costs, &[true, true, false, false]), 6);
        assert_eq!(remaining_time_bound(&costs, &[true, true, true, true]), 0);
        // cross-check: every ordering of {2, 3} entered from S and closed at 0
        let mut best = u32::MAX;
        for order in [[2usize, 3], [3, 2]] {
            for start in [0usize, 1] {
                let t = costs[start][order[0]] + costs[order[0]][order[1]] + costs[order[1]][0];
                best = best.min(t);
            }
        }
        assert!(6 <= best);
    }

    #[test]
    fn single_outside_vertex() {
        let costs = vec![vec![0, 3, 3], vec![3, 0, 2], vec![3, 2, 0]];
        // entering 2 costs 2 (from 1), cheapest return 2 -> 0 or 1 -> 0 costs 3
        assert_eq!(remaining_time_bound(&costs, &[true, true, false]), 5);
    }
}

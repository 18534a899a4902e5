//! Cycle inequalities read off a path decomposition: after using
//! `(u1, v1, t1)` with `v1 != s`, a tour has to leave `v1` towards an
//! unvisited vertex, and so on along the sequence the path actually follows.

use super::{Cut, CutFamily};
use crate::expand::{ArcIndex, TimeExpandedGraph};
use crate::lp::Sense;
use crate::master::decompose_paths;
use crate::model::{VertexId, SOURCE};

/// `x(first) <= sum_{j=1}^{k-1} sum_{v not in {u1, v1..vj}} x(v_j, v, t_{j+1})`
/// for the arc sequence `seq` of a path, `seq[0]` being the first arc.
pub fn cycle_cut(g: &TimeExpandedGraph, seq: &[ArcIndex]) -> Cut {
    let first = g.arc(seq[0]);
    let mut visited: Vec<VertexId> = vec![first.tail, first.head];
    let mut coefs = vec![(seq[0], 1.0)];
    for &a in &seq[1..] {
        let node = g.tail_node(a);
        for b in g.out_arcs(node) {
            if !visited.contains(&g.arc(b).head) {
                coefs.push((b, -1.0));
            }
        }
        visited.push(g.arc(a).head);
    }
    Cut::new(CutFamily::Cycle, Sense::Le, 0.0, coefs)
}

/// Scans every path for a vertex revisited within `rmax` arcs of an arc
/// whose head is not the source.
pub fn separate_cycle(g: &TimeExpandedGraph, x: &[f64], rmax: usize) -> Vec<Cut> {
    if g.n() < 3 {
        return Vec::new();
    }
    let Ok(paths) = decompose_paths(g, x) else { return Vec::new() };
    let mut cuts = Vec::new();
    for (path, _) in &paths {
        for i in 0..path.len() {
            let first = g.arc(path[i]);
            if first.head == SOURCE {
                continue;
            }
            let mut visited = vec![first.tail, first.head];
            for j in i + 1..path.len().min(i + rmax) {
                let head = g.arc(path[j]).head;
                if head == SOURCE {
                    break;
                }
                if visited.contains(&head) {
                    cuts.push(cycle_cut(g, &path[i..=j]));
                    break;
                }
                visited.push(head);
            }
        }
    }
    cuts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;

    #[test]
    fn two_cycle_without_escape() {
        // s -> a -> b -> a -> s and a tour, half each
        let inst = Instance::from_constant(&vec![vec![1; 4]; 4], 8).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        let bad = [
            g.find_arc(0, 1, 0).unwrap(),
            g.find_arc(1, 2, 1).unwrap(),
            g.find_arc(2, 1, 2).unwrap(),
            g.find_arc(1, 0, 3).unwrap(),
        ];
        let good = [
            g.find_arc(0, 3, 0).unwrap(),
            g.find_arc(3, 2, 1).unwrap(),
            g.find_arc(2, 1, 2).unwrap(),
            g.find_arc(1, 0, 3).unwrap(),
        ];
        let mut x = vec![0.0; g.num_arcs()];
        for &a in bad.iter().chain(&good) {
            x[a] += 0.5;
        }
        let cuts = separate_cycle(&g, &x, 4);
        let best = cuts.iter().map(|c| c.violation(&x)).fold(f64::NEG_INFINITY, f64::max);
        assert!((best - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tour_has_no_revisit() {
        let inst = Instance::from_constant(&vec![vec![1; 4]; 4], 8).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        let mut x = vec![0.0; g.num_arcs()];
        for (u, v, t) in [(0, 1, 0), (1, 2, 1), (2, 3, 2), (3, 0, 3)] {
            x[g.find_arc(u, v, t).unwrap()] = 1.0;
        }
        assert!(separate_cycle(&g, &x, 4).is_empty());
    }
}

//! The time-expanded graph: copies `v_theta` of every vertex at its
//! reachable times and timed arcs `(u, v, theta)` between them.

use std::io::Write;

use thiserror::Error;

use crate::model::{Instance, TimePoint, Tour, VertexId, SOURCE};

/// Index of a timed arc; arcs occupy the contiguous range `0..num_arcs()`.
pub type ArcIndex = usize;
/// Index of a timed vertex; the index order is a topological order.
pub type NodeIndex = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpandError {
    #[error("no vertex besides the source can be visited and left within the horizon")]
    EmptyExpansion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimedVertex {
    pub time: TimePoint,
    pub vertex: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TimedArc {
    pub tail: VertexId,
    pub head: VertexId,
    pub departure: TimePoint,
    pub arrival: TimePoint,
}

impl TimedArc {
    pub fn base(&self) -> (VertexId, VertexId) {
        (self.tail, self.head)
    }
}

const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct TimeExpandedGraph {
    n: usize,
    theta_max: TimePoint,
    nodes: Vec<TimedVertex>,
    node_index: Vec<u32>,
    arcs: Vec<TimedArc>,
    arc_tail: Vec<u32>,
    arc_head: Vec<u32>,
    out_start: Vec<u32>,
    in_start: Vec<u32>,
    in_arcs: Vec<u32>,
    base_arcs: Vec<Vec<ArcIndex>>,
}

impl TimeExpandedGraph {
    /// Expands `inst`, keeping only timed vertices that lie on some path from
    /// `s_0` back to a copy of the source.
    pub fn build(inst: &Instance) -> Result<Self, ExpandError> {
        let n = inst.n();
        let horizon = inst.theta_max() as usize + 1;
        let at = |v: VertexId, t: TimePoint| v * horizon + t as usize;
        let departs = |v: VertexId, t: TimePoint| v != SOURCE || t == 0;

        let mut forward = vec![false; n * horizon];
        forward[at(SOURCE, 0)] = true;
        for t in 0..horizon as TimePoint {
            for v in 0..n {
                if !forward[at(v, t)] || !departs(v, t) {
                    continue;
                }
                for w in (0..n).filter(|&w| w != v) {
                    if let Some(a) = inst.arrive(v, w, t) {
                        forward[at(w, a)] = true;
                    }
                }
            }
        }

        // backward[v, t]: some copy of the source is reachable from v_t
        let mut backward = vec![false; n * horizon];
        for t in (0..horizon as TimePoint).rev() {
            for v in 0..n {
                if v == SOURCE && t > 0 {
                    backward[at(v, t)] = true;
                    continue;
                }
                backward[at(v, t)] = (0..n).filter(|&w| w != v).any(|w| {
                    inst.arrive(v, w, t)
                        .is_some_and(|a| w == SOURCE || backward[at(w, a)])
                });
            }
        }

        let kept = |v: VertexId, t: TimePoint| forward[at(v, t)] && backward[at(v, t)];
        if !(1..n).any(|v| (0..horizon as TimePoint).any(|t| kept(v, t))) {
            return Err(ExpandError::EmptyExpansion);
        }

        let mut nodes = Vec::new();
        let mut node_index = vec![ABSENT; n * horizon];
        for t in 0..horizon as TimePoint {
            for v in 0..n {
                if kept(v, t) {
                    node_index[at(v, t)] = nodes.len() as u32;
                    nodes.push(TimedVertex { time: t, vertex: v });
                }
            }
        }

        let mut arcs = Vec::new();
        let mut arc_tail = Vec::new();
        let mut arc_head = Vec::new();
        let mut out_start = Vec::with_capacity(nodes.len() + 1);
        for (k, node) in nodes.iter().enumerate() {
            out_start.push(arcs.len() as u32);
            if !departs(node.vertex, node.time) {
                continue;
            }
            for w in (0..n).filter(|&w| w != node.vertex) {
                let Some(a) = inst.arrive(node.vertex, w, node.time) else {
                    continue;
                };
                let head = node_index[at(w, a)];
                if head == ABSENT {
                    continue;
                }
                arcs.push(TimedArc {
                    tail: node.vertex,
                    head: w,
                    departure: node.time,
                    arrival: a,
                });
                arc_tail.push(k as u32);
                arc_head.push(head);
            }
        }
        out_start.push(arcs.len() as u32);

        let mut in_deg = vec![0u32; nodes.len() + 1];
        for &h in &arc_head {
            in_deg[h as usize + 1] += 1;
        }
        for k in 0..nodes.len() {
            in_deg[k + 1] += in_deg[k];
        }
        let in_start = in_deg;
        let mut fill = in_start.clone();
        let mut in_arcs = vec![0u32; arcs.len()];
        for (i, &h) in arc_head.iter().enumerate() {
            in_arcs[fill[h as usize] as usize] = i as u32;
            fill[h as usize] += 1;
        }

        let mut base_arcs = vec![Vec::new(); n * n];
        for (i, a) in arcs.iter().enumerate() {
            base_arcs[a.tail * n + a.head].push(i);
        }

        Ok(Self {
            n,
            theta_max: inst.theta_max(),
            nodes,
            node_index,
            arcs,
            arc_tail,
            arc_head,
            out_start,
            in_start,
            in_arcs,
            base_arcs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta_max(&self) -> TimePoint {
        self.theta_max
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn node(&self, k: NodeIndex) -> TimedVertex {
        self.nodes[k]
    }

    pub fn nodes(&self) -> &[TimedVertex] {
        &self.nodes
    }

    pub fn node_of(&self, v: VertexId, t: TimePoint) -> Option<NodeIndex> {
        if t > self.theta_max || v >= self.n {
            return None;
        }
        let k = self.node_index[v * (self.theta_max as usize + 1) + t as usize];
        (k != ABSENT).then_some(k as NodeIndex)
    }

    pub fn source_node(&self) -> NodeIndex {
        self.node_of(SOURCE, 0).expect("source copy at time zero")
    }

    pub fn arc(&self, a: ArcIndex) -> &TimedArc {
        &self.arcs[a]
    }

    pub fn arcs(&self) -> &[TimedArc] {
        &self.arcs
    }

    pub fn tail_node(&self, a: ArcIndex) -> NodeIndex {
        self.arc_tail[a] as NodeIndex
    }

    pub fn head_node(&self, a: ArcIndex) -> NodeIndex {
        self.arc_head[a] as NodeIndex
    }

    /// Outgoing arcs of a timed vertex, ordered by head vertex.
    pub fn out_arcs(&self, k: NodeIndex) -> std::ops::Range<ArcIndex> {
        self.out_start[k] as ArcIndex..self.out_start[k + 1] as ArcIndex
    }

    pub fn in_arcs(&self, k: NodeIndex) -> impl Iterator<Item = ArcIndex> + '_ {
        self.in_arcs[self.in_start[k] as usize..self.in_start[k + 1] as usize]
            .iter()
            .map(|&a| a as ArcIndex)
    }

    /// All timed copies of the base arc `(u, v)`, by departure time.
    pub fn copies(&self, u: VertexId, v: VertexId) -> &[ArcIndex] {
        &self.base_arcs[u * self.n + v]
    }

    /// Reachable times `T(v)` in increasing order.
    pub fn reachable_times(&self, v: VertexId) -> Vec<TimePoint> {
        self.nodes
            .iter()
            .filter(|x| x.vertex == v)
            .map(|x| x.time)
            .collect()
    }

    /// Timed vertices in topological order: by time, then vertex index.
    pub fn topological_order(&self) -> impl Iterator<Item = TimedVertex> + '_ {
        self.nodes.iter().copied()
    }

    /// The timed arc leaving `u` at `t` towards `v`, if present.
    pub fn find_arc(&self, u: VertexId, v: VertexId, t: TimePoint) -> Option<ArcIndex> {
        let k = self.node_of(u, t)?;
        self.out_arcs(k).find(|&a| self.arcs[a].head == v)
    }

    /// Embeds a tour as an `(s_0, s_theta)`-path.
    pub fn embed(&self, tour: &Tour) -> Option<Vec<ArcIndex>> {
        tour.arcs()
            .zip(tour.departures())
            .map(|((u, v), t)| self.find_arc(u, v, t))
            .collect()
    }

    /// Converts an `(s_0, s_theta)`-path visiting every vertex exactly once
    /// into a tour.
    pub fn path_to_tour(&self, inst: &Instance, path: &[ArcIndex]) -> Option<Tour> {
        if path.len() != self.n {
            return None;
        }
        let first = self.arcs[*path.first()?];
        if first.tail != SOURCE || first.departure != 0 {
            return None;
        }
        let mut order = vec![SOURCE];
        for w in path.windows(2) {
            let (a, b) = (&self.arcs[w[0]], &self.arcs[w[1]]);
            if a.head != b.tail || a.arrival != b.departure {
                return None;
            }
        }
        for &a in &path[..path.len() - 1] {
            order.push(self.arcs[a].head);
        }
        if self.arcs[*path.last()?].head != SOURCE {
            return None;
        }
        Tour::evaluate(inst, order).ok().flatten()
    }

    /// Debug dump, one `u v theta theta'` line per timed arc.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for a in &self.arcs {
            writeln!(out, "{} {} {} {}", a.tail, a.head, a.departure, a.arrival)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;

    fn unit3() -> Instance {
        Instance::from_constant(&vec![vec![1; 3]; 3], 3).unwrap()
    }

    /// Every arc of every walk from `s_0` that ends in a source copy.
    fn brute_force_arcs(inst: &Instance) -> std::collections::BTreeSet<(usize, usize, u32)> {
        fn rec(
            inst: &Instance,
            walk: &mut Vec<(usize, usize, u32)>,
            v: usize,
            t: u32,
            out: &mut std::collections::BTreeSet<(usize, usize, u32)>,
        ) {
            for w in (0..inst.n()).filter(|&w| w != v) {
                let Some(a) = inst.arrive(v, w, t) else { continue };
                walk.push((v, w, t));
                if w == SOURCE {
                    out.extend(walk.iter().copied());
                } else {
                    rec(inst, walk, w, a, out);
                }
                walk.pop();
            }
        }
        let mut out = Default::default();
        rec(inst, &mut Vec::new(), SOURCE, 0, &mut out);
        out
    }

    #[test]
    fn unit_triangle_by_hand() {
        let inst = unit3();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        assert_eq!(g.reachable_times(1), vec![1, 2]);
        assert_eq!(g.reachable_times(2), vec![1, 2]);
        assert_eq!(g.reachable_times(0), vec![0, 2, 3]);
        assert_eq!(g.num_arcs(), 8);
        let brute = brute_force_arcs(&inst);
        let built: std::collections::BTreeSet<_> =
            g.arcs().iter().map(|a| (a.tail, a.head, a.departure)).collect();
        assert_eq!(built, brute);
    }

    #[test]
    fn nothing_fits() {
        let inst = Instance::from_constant(&vec![vec![2; 3]; 3], 1).unwrap();
        assert_eq!(TimeExpandedGraph::build(&inst).unwrap_err(), ExpandError::EmptyExpansion);
    }

    #[test]
    fn single_arc_graph_order() {
        let inst = Instance::from_constant(&vec![vec![1; 2]; 2], 2).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        let order: Vec<_> = g.topological_order().collect();
        assert_eq!(
            order,
            vec![
                TimedVertex { time: 0, vertex: 0 },
                TimedVertex { time: 1, vertex: 1 },
                TimedVertex { time: 2, vertex: 0 }
            ]
        );
    }

    #[test]
    fn generated_graph_is_consistent() {
        let cfg = crate::instgen::GenConfig { n: 6, theta_max: 250, breakpoints: 25, seed: 11, ..Default::default() };
        let inst = crate::instgen::generate(&cfg).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        assert_eq!(brute_force_arcs(&inst).len(), g.num_arcs());
        let mut seen = vec![0; g.num_arcs()];
        for k in 0..g.num_nodes() {
            for a in g.out_arcs(k) {
                seen[a] += 1;
                assert_eq!(g.tail_node(a), k);
            }
            for a in g.in_arcs(k) {
                assert_eq!(g.head_node(a), k);
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        for (i, a) in g.arcs().iter().enumerate() {
            assert!(g.tail_node(i) < g.head_node(i), "arc goes backwards");
            assert_eq!(inst.arrive(a.tail, a.head, a.departure), Some(a.arrival));
        }
        let total: usize = (0..6).map(|v| g.reachable_times(v).len()).sum();
        assert_eq!(total, g.num_nodes());
        for tour in crate::oracle::enumerate_tours(&inst).unwrap().iter().take(50) {
            let path = g.embed(tour).expect("tour embeds");
            assert_eq!(g.path_to_tour(&inst, &path).as_ref(), Some(tour));
        }
    }

    #[test]
    fn dump_format() {
        let g = TimeExpandedGraph::build(&unit3()).unwrap();
        let mut buf = Vec::new();
        g.dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 8);
        assert!(text.starts_with("0 1 0 1\n0 2 0 1\n"));
    }
}

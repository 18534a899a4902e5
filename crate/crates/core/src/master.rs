//! Restricted master problems over the time-expanded graph: the arc-based
//! flow formulation and the path-based set-partitioning formulation.

use std::collections::HashMap;

use thiserror::Error;

use crate::cuts::{Cut, CutFamily};
use crate::expand::{ArcIndex, NodeIndex, TimeExpandedGraph};
use crate::lp::{LpError, LpModel, LpStatus, Sense};
use crate::model::{VertexId, SOURCE};

const NONE: u32 = u32::MAX;
const FLOW_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum MasterError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("initial columns admit no feasible point")]
    InfeasibleStart,
    #[error("path decomposition failed: {0}")]
    DecompositionFailure(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Formulation {
    Arc,
    Path,
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Formulation::Arc => "arc",
            Formulation::Path => "path",
        })
    }
}

impl std::str::FromStr for Formulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "arc" => Ok(Formulation::Arc),
            "path" => Ok(Formulation::Path),
            _ => Err(format!("unknown formulation `{s}` (expected arc or path)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnKind {
    Arc(ArcIndex),
    Path(usize),
    Artificial(usize),
}

/// A cut row together with where it was found.
#[derive(Clone, Debug)]
pub struct CutRecord {
    pub cut: Cut,
    pub row: usize,
    pub node: u64,
}

/// Dual values of a solved master, laid out for pricing.
#[derive(Clone, Debug)]
pub struct DualView {
    /// Cover-row duals, per base vertex.
    pub lambda: Vec<f64>,
    /// Flow-row duals, per timed vertex (zero for source copies and rows
    /// not yet in the model).
    pub mu: Vec<f64>,
    /// `sum_k pi_k a_k` over cut rows, per timed arc.
    pub cut_adjust: Vec<f64>,
}

impl DualView {
    /// All-zero duals.
    pub fn zero(g: &TimeExpandedGraph) -> Self {
        Self {
            lambda: vec![0.0; g.n()],
            mu: vec![0.0; g.num_nodes()],
            cut_adjust: vec![0.0; g.num_arcs()],
        }
    }

    pub fn reduced_cost(&self, g: &TimeExpandedGraph, a: ArcIndex) -> f64 {
        let arc = g.arc(a);
        let cost = (arc.arrival - arc.departure) as f64;
        cost - self.lambda[arc.tail] - self.mu[g.tail_node(a)] + self.mu[g.head_node(a)]
            - self.cut_adjust[a]
    }
}

/// Combined flow `x_uv = sum_theta x_uv,theta` on the base graph.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinedFlow {
    n: usize,
    x: Vec<f64>,
}

impl CombinedFlow {
    pub fn from_arc_values(g: &TimeExpandedGraph, values: &[f64]) -> Self {
        let n = g.n();
        let mut x = vec![0.0; n * n];
        for (a, &v) in values.iter().enumerate() {
            if v != 0.0 {
                let arc = g.arc(a);
                x[arc.tail * n + arc.head] += v;
            }
        }
        Self { n, x }
    }

    /// Builds a flow directly from a dense `n x n` matrix.
    pub fn from_matrix(n: usize, x: Vec<f64>) -> Self {
        assert_eq!(x.len(), n * n);
        Self { n, x }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: VertexId, v: VertexId) -> f64 {
        self.x[u * self.n + v]
    }

    pub fn out_degree(&self, v: VertexId) -> f64 {
        (0..self.n).map(|w| self.get(v, w)).sum()
    }

    pub fn in_degree(&self, v: VertexId) -> f64 {
        (0..self.n).map(|u| self.get(u, v)).sum()
    }

    /// Base arcs with `eps < x_uv < 1 - eps`.
    pub fn fractional(&self, eps: f64) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in 0..self.n {
                let x = self.get(u, v);
                if x > eps && x < 1.0 - eps {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// A restricted master problem. Cover rows are written on departures,
/// one flow-conservation row exists per non-source timed vertex touched by
/// a column, and cut rows are kept global with an arc-indexed inverse.
#[derive(Clone, Debug)]
pub struct Master<'g> {
    g: &'g TimeExpandedGraph,
    formulation: Formulation,
    lp: LpModel,
    cover_rows: Vec<usize>,
    flow_rows: Vec<u32>,
    cuts: Vec<CutRecord>,
    arc_cuts: Vec<Vec<(u32, f64)>>,
    columns: Vec<ColumnKind>,
    arc_column: Vec<u32>,
    paths: Vec<Vec<ArcIndex>>,
    path_index: HashMap<Vec<ArcIndex>, usize>,
    arc_present: Vec<bool>,
    dead: Vec<bool>,
    big_m: f64,
    artificials: Vec<usize>,
}

impl<'g> Master<'g> {
    /// An empty master (artificial columns only).
    pub fn empty(g: &'g TimeExpandedGraph, formulation: Formulation) -> Self {
        let mut lp = LpModel::new();
        let big_m = 10.0 * (g.theta_max() as f64 + 1.0);
        let mut cover_rows = Vec::with_capacity(g.n());
        let mut columns = Vec::new();
        let mut artificials = Vec::new();
        for _ in 0..g.n() {
            let r = lp.add_row(Sense::Eq, 1.0, &[]).expect("fresh row");
            let c = lp.add_column(big_m, 0.0, f64::INFINITY, &[(r, 1.0)]).expect("fresh column");
            cover_rows.push(r);
            columns.push(ColumnKind::Artificial(r));
            artificials.push(c);
        }
        Self {
            g,
            formulation,
            lp,
            cover_rows,
            flow_rows: vec![NONE; g.num_nodes()],
            cuts: Vec::new(),
            arc_cuts: vec![Vec::new(); g.num_arcs()],
            columns,
            arc_column: vec![NONE; g.num_arcs()],
            paths: Vec::new(),
            path_index: HashMap::new(),
            arc_present: vec![false; g.num_arcs()],
            dead: vec![false; g.num_arcs()],
            big_m,
            artificials,
        }
    }

    /// Arc master over `initial` arcs; fails if they carry no feasible flow.
    pub fn build_arc_master(g: &'g TimeExpandedGraph, initial: &[ArcIndex]) -> Result<Self, MasterError> {
        let mut m = Self::empty(g, Formulation::Arc);
        for &a in initial {
            m.add_arc(a);
        }
        m.check_start()?;
        Ok(m)
    }

    /// Path master over `initial` paths; fails if they cover no vertex
    /// partition.
    pub fn build_path_master(g: &'g TimeExpandedGraph, initial: &[Vec<ArcIndex>]) -> Result<Self, MasterError> {
        let mut m = Self::empty(g, Formulation::Path);
        for p in initial {
            m.add_path(p);
        }
        m.check_start()?;
        Ok(m)
    }

    fn check_start(&mut self) -> Result<(), MasterError> {
        self.solve()?;
        if self.artificial_value() > 1e-6 {
            return Err(MasterError::InfeasibleStart);
        }
        Ok(())
    }

    pub fn graph(&self) -> &'g TimeExpandedGraph {
        self.g
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn lp(&self) -> &LpModel {
        &self.lp
    }

    pub fn num_rows(&self) -> usize {
        self.lp.num_rows()
    }

    /// Structural columns (artificials excluded).
    pub fn num_columns(&self) -> usize {
        self.lp.num_cols() - self.artificials.len()
    }

    pub fn cuts(&self) -> &[CutRecord] {
        &self.cuts
    }

    pub fn cut_count(&self, family: CutFamily) -> usize {
        self.cuts.iter().filter(|c| c.cut.family == family).count()
    }

    pub fn paths(&self) -> &[Vec<ArcIndex>] {
        &self.paths
    }

    /// Whether the timed arc is used by some column.
    pub fn has_arc(&self, a: ArcIndex) -> bool {
        self.arc_present[a]
    }

    /// Per timed arc, whether some column uses it.
    pub fn present_arcs(&self) -> &[bool] {
        &self.arc_present
    }

    /// What each LP column stands for, in column order.
    pub fn column_kinds(&self) -> &[ColumnKind] {
        &self.columns
    }

    pub fn dead(&self) -> &[bool] {
        &self.dead
    }

    pub fn is_dead(&self, a: ArcIndex) -> bool {
        self.dead[a]
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    fn flow_row(&mut self, k: NodeIndex) -> Option<usize> {
        if self.g.node(k).vertex == SOURCE {
            return None;
        }
        if self.flow_rows[k] == NONE {
            let r = self.lp.add_row(Sense::Eq, 0.0, &[]).expect("fresh row");
            self.flow_rows[k] = r as u32;
        }
        Some(self.flow_rows[k] as usize)
    }

    fn upper(dead: bool) -> f64 {
        if dead {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// Adds the timed arc as a column of the arc master; false if present.
    pub fn add_arc(&mut self, a: ArcIndex) -> bool {
        assert_eq!(self.formulation, Formulation::Arc, "arc columns need the arc master");
        if self.arc_column[a] != NONE {
            return false;
        }
        let arc = *self.g.arc(a);
        let mut coefs = vec![(self.cover_rows[arc.tail], 1.0)];
        if let Some(r) = self.flow_row(self.g.tail_node(a)) {
            coefs.push((r, 1.0));
        }
        if let Some(r) = self.flow_row(self.g.head_node(a)) {
            coefs.push((r, -1.0));
        }
        for &(k, c) in &self.arc_cuts[a] {
            coefs.push((self.cuts[k as usize].row, c));
        }
        let cost = (arc.arrival - arc.departure) as f64;
        let col = self
            .lp
            .add_column(cost, 0.0, Self::upper(self.dead[a]), &coefs)
            .expect("rows exist");
        self.arc_column[a] = col as u32;
        self.arc_present[a] = true;
        self.columns.push(ColumnKind::Arc(a));
        true
    }

    /// Adds an `(s_0, s_theta)`-path as a column of the path master; false
    /// if an identical path exists.
    pub fn add_path(&mut self, path: &[ArcIndex]) -> bool {
        assert_eq!(self.formulation, Formulation::Path, "path columns need the path master");
        if self.path_index.contains_key(path) {
            return false;
        }
        let mut acc: HashMap<usize, f64> = HashMap::new();
        for &a in path {
            *acc.entry(self.cover_rows[self.g.arc(a).tail]).or_default() += 1.0;
            for &(k, c) in &self.arc_cuts[a] {
                *acc.entry(self.cuts[k as usize].row).or_default() += c;
            }
        }
        let mut coefs: Vec<(usize, f64)> = acc.into_iter().collect();
        coefs.sort_by_key(|&(r, _)| r);
        let cost = self.g.arc(*path.last().expect("nonempty path")).arrival as f64;
        let dead = path.iter().any(|&a| self.dead[a]);
        let col = self.lp.add_column(cost, 0.0, Self::upper(dead), &coefs).expect("rows exist");
        let id = self.paths.len();
        self.paths.push(path.to_vec());
        self.path_index.insert(path.to_vec(), id);
        for &a in path {
            self.arc_present[a] = true;
        }
        debug_assert_eq!(col, self.columns.len());
        self.columns.push(ColumnKind::Path(id));
        true
    }

    /// Adds a global cut row; `>=` rows get an artificial column so the
    /// master stays feasible.
    pub fn add_cut(&mut self, cut: Cut, node: u64) -> usize {
        let k = self.cuts.len() as u32;
        let mut coefs: Vec<(usize, f64)> = Vec::new();
        match self.formulation {
            Formulation::Arc => {
                for &(a, c) in cut.coefs() {
                    if self.arc_column[a] != NONE {
                        coefs.push((self.arc_column[a] as usize, c));
                    }
                }
            }
            Formulation::Path => {
                for (col, kind) in self.columns.iter().enumerate() {
                    if let ColumnKind::Path(p) = kind {
                        let c: f64 = self.paths[*p].iter().map(|&a| cut.coef(a)).sum();
                        if c != 0.0 {
                            coefs.push((col, c));
                        }
                    }
                }
            }
        }
        let row = self.lp.add_row(cut.sense, cut.rhs, &coefs).expect("columns exist");
        if cut.sense == Sense::Ge {
            let c = self
                .lp
                .add_column(self.big_m, 0.0, f64::INFINITY, &[(row, 1.0)])
                .expect("row exists");
            self.artificials.push(c);
            self.columns.push(ColumnKind::Artificial(row));
        }
        for &(a, c) in cut.coefs() {
            self.arc_cuts[a].push((k, c));
        }
        self.cuts.push(CutRecord { cut, row, node });
        row
    }

    /// Replaces the dead-arc mask; columns using a dead arc get upper bound 0.
    pub fn set_dead(&mut self, dead: &[bool]) {
        assert_eq!(dead.len(), self.dead.len());
        let changed: Vec<ArcIndex> = (0..dead.len()).filter(|&a| dead[a] != self.dead[a]).collect();
        if changed.is_empty() {
            return;
        }
        self.dead.copy_from_slice(dead);
        match self.formulation {
            Formulation::Arc => {
                for a in changed {
                    if self.arc_column[a] != NONE {
                        self.lp
                            .set_bounds(self.arc_column[a] as usize, 0.0, Self::upper(dead[a]))
                            .expect("column exists");
                    }
                }
            }
            Formulation::Path => {
                for col in 0..self.columns.len() {
                    if let ColumnKind::Path(p) = self.columns[col] {
                        let d = self.paths[p].iter().any(|&a| dead[a]);
                        if self.lp.bounds(col).1 != Self::upper(d) {
                            self.lp.set_bounds(col, 0.0, Self::upper(d)).expect("column exists");
                        }
                    }
                }
            }
        }
    }

    pub fn solve(&mut self) -> Result<LpStatus, MasterError> {
        self.solve_limited(u64::MAX)
    }

    pub fn solve_limited(&mut self, max_iterations: u64) -> Result<LpStatus, MasterError> {
        let status = self.lp.solve_limited(max_iterations)?;
        if matches!(status, LpStatus::Infeasible | LpStatus::Unbounded) {
            return Err(LpError::NumericalFailure(format!("master reported {status:?}")).into());
        }
        Ok(status)
    }

    pub fn objective(&self) -> f64 {
        self.lp.objective()
    }

    /// Total value of artificial columns.
    pub fn artificial_value(&self) -> f64 {
        self.artificials.iter().map(|&c| self.lp.value(c)).sum()
    }

    /// Multiplies the penalty of artificial columns.
    pub fn escalate_big_m(&mut self, factor: f64) {
        self.big_m *= factor;
        for &c in &self.artificials {
            self.lp.set_cost(c, self.big_m).expect("column exists");
        }
    }

    pub fn duals(&self) -> DualView {
        let g = self.g;
        let lambda = self.cover_rows.iter().map(|&r| self.lp.dual(r)).collect();
        let mu = self
            .flow_rows
            .iter()
            .map(|&r| if r == NONE { 0.0 } else { self.lp.dual(r as usize) })
            .collect();
        let mut cut_adjust = vec![0.0; g.num_arcs()];
        for rec in &self.cuts {
            let pi = self.lp.dual(rec.row);
            if pi != 0.0 {
                for &(a, c) in rec.cut.coefs() {
                    cut_adjust[a] += pi * c;
                }
            }
        }
        DualView { lambda, mu, cut_adjust }
    }

    /// Values of all timed arcs (zero for arcs without a column).
    pub fn arc_values(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.g.num_arcs()];
        for (col, kind) in self.columns.iter().enumerate() {
            let v = self.lp.value(col);
            if v == 0.0 {
                continue;
            }
            match *kind {
                ColumnKind::Arc(a) => x[a] += v,
                ColumnKind::Path(p) => {
                    for &a in &self.paths[p] {
                        x[a] += v;
                    }
                }
                ColumnKind::Artificial(_) => {}
            }
        }
        x
    }

    pub fn combined_flow(&self) -> CombinedFlow {
        CombinedFlow::from_arc_values(self.g, &self.arc_values())
    }

    /// Weighted `(s_0, s_theta)`-paths reproducing the arc values.
    pub fn decompose_paths(&self) -> Result<Vec<(Vec<ArcIndex>, f64)>, MasterError> {
        match self.formulation {
            Formulation::Path => Ok(self
                .columns
                .iter()
                .enumerate()
                .filter_map(|(col, kind)| match kind {
                    ColumnKind::Path(p) => {
                        let v = self.lp.value(col);
                        (v > FLOW_TOL).then(|| (self.paths[*p].clone(), v))
                    }
                    _ => None,
                })
                .collect()),
            Formulation::Arc => decompose_paths(self.g, &self.arc_values()),
        }
    }
}

/// Decomposes an `s_0`-rooted flow on the acyclic graph into paths, always
/// following the out-arc with the largest residual (lowest index on ties).
pub fn decompose_paths(g: &TimeExpandedGraph, values: &[f64]) -> Result<Vec<(Vec<ArcIndex>, f64)>, MasterError> {
    let mut residual: Vec<f64> = values.iter().map(|&v| if v > FLOW_TOL { v } else { 0.0 }).collect();
    let source = g.source_node();
    let mut out = Vec::new();
    loop {
        let start = g.out_arcs(source).filter(|&a| residual[a] > FLOW_TOL).max_by(|&a, &b| {
            residual[a].total_cmp(&residual[b]).then(b.cmp(&a))
        });
        let Some(first) = start else { break };
        let mut path = vec![first];
        let mut weight = residual[first];
        let mut at = g.head_node(first);
        while g.node(at).vertex != SOURCE {
            let next = g.out_arcs(at).filter(|&a| residual[a] > FLOW_TOL).max_by(|&a, &b| {
                residual[a].total_cmp(&residual[b]).then(b.cmp(&a))
            });
            let Some(a) = next else {
                return Err(MasterError::DecompositionFailure(format!(
                    "flow stops at timed vertex {:?}",
                    g.node(at)
                )));
            };
            weight = weight.min(residual[a]);
            path.push(a);
            at = g.head_node(a);
        }
        for &a in &path {
            residual[a] -= weight;
        }
        out.push((path, weight));
        if out.len() > values.len() + 1 {
            return Err(MasterError::DecompositionFailure("too many paths".into()));
        }
    }
    if let Some(a) = residual.iter().position(|&r| r > 1e-6) {
        return Err(MasterError::DecompositionFailure(format!("residual {} on arc {a}", residual[a])));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;
    use crate::oracle;

    fn unit3() -> (Instance, TimeExpandedGraph) {
        let inst = Instance::from_constant(&vec![vec![1; 3]; 3], 3).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        (inst, g)
    }

    fn small(seed: u64, n: usize) -> (Instance, TimeExpandedGraph) {
        let cfg = crate::instgen::GenConfig {
            n,
            theta_max: 200,
            breakpoints: 20,
            coord_range: 30,
            seed,
            ..Default::default()
        };
        let inst = crate::instgen::generate(&cfg).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        (inst, g)
    }

    #[test]
    fn single_tour_forces_its_cost() {
        let (inst, g) = small(5, 5);
        let tour = oracle::solve_dp(&inst).unwrap().unwrap();
        let arcs = g.embed(&tour).unwrap();
        let mut m = Master::build_arc_master(&g, &arcs).unwrap();
        m.solve().unwrap();
        assert!((m.objective() - tour.arrival() as f64).abs() < 1e-9);
        let flow = m.combined_flow();
        let ones = (0..5).flat_map(|u| (0..5).map(move |v| (u, v))).filter(|&(u, v)| flow.get(u, v) > 0.5).count();
        assert_eq!(ones, 5);
        let paths = m.decompose_paths().unwrap();
        assert_eq!(paths, vec![(arcs.clone(), 1.0)]);

        let mut p = Master::build_path_master(&g, &[arcs.clone()]).unwrap();
        p.solve().unwrap();
        assert!((p.objective() - tour.arrival() as f64).abs() < 1e-9);
    }

    #[test]
    fn full_arc_set_on_unit_triangle() {
        let (_, g) = unit3();
        let all: Vec<_> = (0..g.num_arcs()).collect();
        let mut m = Master::build_arc_master(&g, &all).unwrap();
        m.solve().unwrap();
        assert!((m.objective() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn empty_start_is_rejected() {
        let (_, g) = unit3();
        assert_eq!(Master::build_arc_master(&g, &[]).unwrap_err(), MasterError::InfeasibleStart);
    }

    #[test]
    fn return_time_objective_is_equivalent() {
        for seed in 0..4 {
            let (_, g) = small(seed, 5);
            let all: Vec<_> = (0..g.num_arcs()).collect();
            let mut m = Master::build_arc_master(&g, &all).unwrap();
            m.solve().unwrap();

            // same rows, cost only on arcs returning to the source
            let mut lp = LpModel::new();
            let cover: Vec<_> = (0..g.n()).map(|_| lp.add_row(Sense::Eq, 1.0, &[]).unwrap()).collect();
            let flow: Vec<_> = (0..g.num_nodes()).map(|_| lp.add_row(Sense::Eq, 0.0, &[]).unwrap()).collect();
            for a in 0..g.num_arcs() {
                let arc = g.arc(a);
                let mut coefs = vec![(cover[arc.tail], 1.0)];
                if arc.tail != SOURCE {
                    coefs.push((flow[g.tail_node(a)], 1.0));
                }
                if arc.head != SOURCE {
                    coefs.push((flow[g.head_node(a)], -1.0));
                }
                let cost = if arc.head == SOURCE { arc.arrival as f64 } else { 0.0 };
                lp.add_column(cost, 0.0, f64::INFINITY, &coefs).unwrap();
            }
            assert_eq!(lp.solve().unwrap(), LpStatus::Optimal);
            assert!((lp.objective() - m.objective()).abs() < 1e-6, "seed {seed}");
        }
    }

    #[test]
    fn half_half_split_decomposes() {
        let (inst, g) = small(9, 5);
        let tours = oracle::enumerate_tours(&inst).unwrap();
        assert!(tours.len() >= 2);
        let p1 = g.embed(&tours[0]).unwrap();
        let p2 = g.embed(&tours[1]).unwrap();
        let mut x = vec![0.0; g.num_arcs()];
        for &a in p1.iter().chain(&p2) {
            x[a] += 0.5;
        }
        let flow = CombinedFlow::from_arc_values(&g, &x);
        for v in 0..5 {
            assert!((flow.out_degree(v) - 1.0).abs() < 1e-12);
            assert!((flow.in_degree(v) - 1.0).abs() < 1e-12);
            for w in 0..5 {
                let f = flow.get(v, w);
                assert!(f == 0.0 || f == 0.5 || f == 1.0);
            }
        }
        let parts = decompose_paths(&g, &x).unwrap();
        let mut back = vec![0.0; g.num_arcs()];
        for (p, w) in &parts {
            for &a in p {
                back[a] += w;
            }
        }
        for a in 0..g.num_arcs() {
            assert!((back[a] - x[a]).abs() < 1e-9);
        }
        assert!(parts.len() <= 2 * 5);
    }

    #[test]
    fn stuck_flow_is_reported() {
        let (_, g) = unit3();
        let mut x = vec![0.0; g.num_arcs()];
        x[0] = 1.0;
        assert!(matches!(decompose_paths(&g, &x), Err(MasterError::DecompositionFailure(_))));
    }

    #[test]
    fn dead_arcs_restrict_the_lp() {
        let (inst, g) = small(3, 5);
        let all: Vec<_> = (0..g.num_arcs()).collect();
        let mut m = Master::build_arc_master(&g, &all).unwrap();
        m.solve().unwrap();
        let before = m.objective();
        let x = m.arc_values();
        let mut dead = vec![false; g.num_arcs()];
        let used = (0..g.num_arcs()).find(|&a| x[a] > 1e-6).unwrap();
        dead[used] = true;
        m.set_dead(&dead);
        m.solve().unwrap();
        assert!(m.objective() >= before - 1e-9);
        assert!(m.arc_values()[used].abs() < 1e-12);
        let _ = inst;
    }

    #[test]
    fn path_master_with_subset_path() {
        let (inst, g) = small(2, 5);
        let tour = oracle::solve_dp(&inst).unwrap().unwrap();
        let p = g.embed(&tour).unwrap();
        // s -> v -> s for the first visited vertex only
        let v = tour.order()[1];
        let short = vec![p[0], g.find_arc(v, SOURCE, g.arc(p[0]).arrival).unwrap()];
        let mut m = Master::build_path_master(&g, &[p.clone(), short]).unwrap();
        m.solve().unwrap();
        assert!(m.objective() <= tour.arrival() as f64 + 1e-9);
    }
}

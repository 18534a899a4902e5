//! Column generation: shortest `(s_0, s_theta)`-paths under reduced costs,
//! with optional 2-cycle elimination, and the Lagrangean bound.

use std::collections::BTreeSet;

use crate::expand::{ArcIndex, TimeExpandedGraph};
use crate::master::{DualView, Formulation, Master, MasterError};
use crate::lp::LpStatus;
use crate::model::{Instance, Tour, SOURCE};
use crate::work::Budget;

/// Pricing loop termination threshold.
pub const EPS_PRICING: f64 = 1e-6;
const LP_CHUNK: u64 = 250;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PricingMode {
    /// Shortest paths in the time-expanded graph.
    Plain,
    /// Shortest paths without `u -> v -> u` patterns.
    TwoCycleFree,
    /// The single most negative arc per round.
    Arc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PricedPath {
    pub arcs: Vec<ArcIndex>,
    pub reduced_cost: f64,
}

#[derive(Clone, Debug)]
pub struct PricingResult {
    /// One most negative path per reachable source copy, cheapest first.
    pub paths: Vec<PricedPath>,
    /// Minimum reduced cost over the path class (`+inf` if no path exists).
    pub min_reduced_cost: f64,
    pub work: u64,
}

pub fn reduced_cost(g: &TimeExpandedGraph, a: ArcIndex, d: &DualView) -> f64 {
    d.reduced_cost(g, a)
}

/// `lp + min(min_reduced_cost, 0)`.
pub fn lagrangean_bound(lp_value: f64, min_reduced_cost: f64) -> f64 {
    lp_value + min_reduced_cost.min(0.0)
}

const NO_ARC: u32 = u32::MAX;

/// Prices `(s_0, s_theta)`-paths. Arc mode is priced like plain mode here;
/// the loop decides what to add.
pub fn price_paths(
    g: &TimeExpandedGraph,
    d: &DualView,
    mode: PricingMode,
    eps: f64,
    dead: &[bool],
) -> PricingResult {
    let rc: Vec<f64> = (0..g.num_arcs()).map(|a| d.reduced_cost(g, a)).collect();
    match mode {
        PricingMode::Plain | PricingMode::Arc => price_plain(g, &rc, eps, dead),
        PricingMode::TwoCycleFree => price_two_cycle_free(g, &rc, eps, dead),
    }
}

fn price_plain(g: &TimeExpandedGraph, rc: &[f64], eps: f64, dead: &[bool]) -> PricingResult {
    let nn = g.num_nodes();
    let mut dist = vec![f64::INFINITY; nn];
    let mut pred = vec![NO_ARC; nn];
    let source = g.source_node();
    dist[source] = 0.0;
    let mut work = 0u64;
    for k in 0..nn {
        if dist[k] == f64::INFINITY || (g.node(k).vertex == SOURCE && k != source) {
            continue;
        }
        for a in g.out_arcs(k) {
            work += 1;
            if dead[a] {
                continue;
            }
            let h = g.head_node(a);
            let c = dist[k] + rc[a];
            if c < dist[h] {
                dist[h] = c;
                pred[h] = a as u32;
            }
        }
    }
    let mut paths = Vec::new();
    let mut min_rc = f64::INFINITY;
    for k in (0..nn).filter(|&k| k != source && g.node(k).vertex == SOURCE) {
        if dist[k] == f64::INFINITY {
            continue;
        }
        min_rc = min_rc.min(dist[k]);
        if dist[k] < -eps {
            let mut arcs = Vec::new();
            let mut at = k;
            while at != source {
                let a = pred[at] as usize;
                arcs.push(a);
                at = g.tail_node(a);
            }
            arcs.reverse();
            paths.push(PricedPath { arcs, reduced_cost: dist[k] });
        }
    }
    sort_paths(&mut paths);
    PricingResult { paths, min_reduced_cost: min_rc, work }
}

#[derive(Clone, Copy, Debug)]
struct Label {
    cost: f64,
    arc: u32,
    from_slot: u8,
    pred_vertex: u32,
}

const EMPTY: Label = Label {
    cost: f64::INFINITY,
    arc: NO_ARC,
    from_slot: 0,
    pred_vertex: u32::MAX,
};

/// Keeps, per timed vertex, the cheapest label and the cheapest label whose
/// predecessor base vertex differs from the first one's.
fn price_two_cycle_free(g: &TimeExpandedGraph, rc: &[f64], eps: f64, dead: &[bool]) -> PricingResult {
    let nn = g.num_nodes();
    let mut labels = vec![[EMPTY; 2]; nn];
    let source = g.source_node();
    labels[source][0] = Label { cost: 0.0, arc: NO_ARC, from_slot: 0, pred_vertex: u32::MAX };
    let mut work = 0u64;
    for k in 0..nn {
        if labels[k][0].cost == f64::INFINITY || (g.node(k).vertex == SOURCE && k != source) {
            continue;
        }
        let v = g.node(k).vertex as u32;
        for a in g.out_arcs(k) {
            work += 2;
            if dead[a] {
                continue;
            }
            let w = g.arc(a).head as u32;
            let slot = if w == SOURCE as u32 || labels[k][0].pred_vertex != w {
                0
            } else if labels[k][1].cost < f64::INFINITY && labels[k][1].pred_vertex != w {
                1
            } else {
                continue;
            };
            let cost = labels[k][slot].cost + rc[a];
            let new = Label { cost, arc: a as u32, from_slot: slot as u8, pred_vertex: v };
            let h = g.head_node(a);
            let [best, second] = labels[h];
            if cost < best.cost {
                labels[h][0] = new;
                if best.pred_vertex != v {
                    labels[h][1] = best;
                }
            } else if best.pred_vertex != v && cost < second.cost {
                labels[h][1] = new;
            }
        }
    }
    let mut paths = Vec::new();
    let mut min_rc = f64::INFINITY;
    for k in (0..nn).filter(|&k| k != source && g.node(k).vertex == SOURCE) {
        let best = labels[k][0];
        if best.cost == f64::INFINITY {
            continue;
        }
        min_rc = min_rc.min(best.cost);
        if best.cost < -eps {
            let mut arcs = Vec::new();
            let mut at = k;
            let mut slot = 0usize;
            while at != source {
                let l = labels[at][slot];
                arcs.push(l.arc as usize);
                at = g.tail_node(l.arc as usize);
                slot = l.from_slot as usize;
            }
            arcs.reverse();
            paths.push(PricedPath { arcs, reduced_cost: best.cost });
        }
    }
    sort_paths(&mut paths);
    PricingResult { paths, min_reduced_cost: min_rc, work }
}

fn sort_paths(paths: &mut [PricedPath]) {
    paths.sort_by(|a, b| a.reduced_cost.total_cmp(&b.reduced_cost).then_with(|| a.arcs.cmp(&b.arcs)));
}

/// The most negative single arc, ties by lowest index.
pub fn most_negative_arc(g: &TimeExpandedGraph, d: &DualView, dead: &[bool]) -> Option<(ArcIndex, f64)> {
    (0..g.num_arcs())
        .filter(|&a| !dead[a])
        .map(|a| (a, d.reduced_cost(g, a)))
        .fold(None, |best: Option<(ArcIndex, f64)>, (a, c)| match best {
            Some((_, bc)) if bc <= c => best,
            _ => Some((a, c)),
        })
}

/// Per-round pricing report.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundInfo {
    pub round: usize,
    pub lp_value: f64,
    pub min_reduced_cost: f64,
    pub bound: f64,
    pub added: usize,
}

#[derive(Clone, Debug)]
pub struct LoopOutcome {
    /// No column with reduced cost below `-eps` remains.
    pub converged: bool,
    pub rounds: usize,
    pub lp_value: f64,
    /// Best Lagrangean bound seen; equals `lp_value` on convergence.
    pub bound: f64,
    /// Priced paths that happen to be tours.
    pub tours: Vec<Tour>,
}

/// Solves the master and adds priced columns until no path with reduced
/// cost below `-eps` exists or the budget runs out.
pub fn pricing_loop(
    master: &mut Master<'_>,
    inst: &Instance,
    mode: PricingMode,
    eps: f64,
    budget: &mut Budget,
    on_round: &mut dyn FnMut(&RoundInfo),
) -> Result<LoopOutcome, MasterError> {
    let g = master.graph();
    let mut outcome = LoopOutcome {
        converged: false,
        rounds: 0,
        lp_value: f64::NAN,
        bound: f64::NEG_INFINITY,
        tours: Vec::new(),
    };
    let mut seen_tours = BTreeSet::new();
    loop {
        if !solve_within(master, budget)? {
            return Ok(outcome);
        }
        let lp_value = master.objective();
        outcome.lp_value = lp_value;
        let duals = master.duals();
        let dead = master.dead().to_vec();
        let res = price_paths(g, &duals, mode, eps, &dead);
        budget.charge(res.work);
        let bound = lagrangean_bound(lp_value, res.min_reduced_cost);
        outcome.bound = outcome.bound.max(bound);
        outcome.rounds += 1;

        for p in &res.paths {
            if p.arcs.len() == g.n() {
                if let Some(t) = g.path_to_tour(inst, &p.arcs) {
                    if seen_tours.insert(t.order().to_vec()) {
                        outcome.tours.push(t);
                    }
                }
            }
        }

        let mut added = 0;
        if res.min_reduced_cost < -eps {
            match (master.formulation(), mode) {
                (Formulation::Arc, PricingMode::Arc) => {
                    budget.charge(g.num_arcs() as u64);
                    if let Some((a, c)) = most_negative_arc(g, &duals, &dead) {
                        if c < -eps && master.add_arc(a) {
                            added += 1;
                        }
                    }
                }
                (Formulation::Arc, _) => {
                    for p in &res.paths {
                        for &a in &p.arcs {
                            added += master.add_arc(a) as usize;
                        }
                    }
                }
                (Formulation::Path, _) => {
                    for p in &res.paths {
                        added += master.add_path(&p.arcs) as usize;
                    }
                }
            }
        }
        let info = RoundInfo {
            round: outcome.rounds,
            lp_value,
            min_reduced_cost: res.min_reduced_cost,
            bound,
            added,
        };
        log::debug!(
            "pricing round {} added {} min rc {:.6} bound {:.4}",
            info.round,
            info.added,
            info.min_reduced_cost,
            info.bound
        );
        on_round(&info);
        if res.min_reduced_cost >= -eps {
            outcome.converged = true;
            outcome.bound = lp_value;
            return Ok(outcome);
        }
        if added == 0 {
            // every improving column is present already: numerical stall
            log::warn!("pricing stalled with min reduced cost {}", res.min_reduced_cost);
            return Ok(outcome);
        }
        if budget.exhausted() {
            return Ok(outcome);
        }
    }
}

/// Solves the master in chunks of simplex iterations, charging the budget;
/// false if the budget ran out first.
pub fn solve_within(master: &mut Master<'_>, budget: &mut Budget) -> Result<bool, MasterError> {
    loop {
        let before = master.lp().work();
        let status = master.solve_limited(LP_CHUNK)?;
        budget.charge(master.lp().work() - before);
        match status {
            LpStatus::Optimal => return Ok(true),
            _ if budget.exhausted() => return Ok(false),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::{generate, GenConfig};

    fn inst(seed: u64, n: usize) -> Instance {
        generate(&GenConfig { n, theta_max: 200, breakpoints: 20, coord_range: 30, seed, ..Default::default() }).unwrap()
    }

    fn path_rc(g: &TimeExpandedGraph, d: &DualView, p: &[ArcIndex]) -> f64 {
        p.iter().map(|&a| d.reduced_cost(g, a)).sum()
    }

    #[test]
    fn bound_formula() {
        assert_eq!(lagrangean_bound(100.0, -3.0), 97.0);
        assert_eq!(lagrangean_bound(100.0, 2.0), 100.0);
    }

    #[test]
    fn zero_duals_give_travel_times() {
        let i = inst(1, 5);
        let g = TimeExpandedGraph::build(&i).unwrap();
        let d = DualView::zero(&g);
        for a in 0..g.num_arcs() {
            let arc = g.arc(a);
            assert_eq!(reduced_cost(&g, a, &d), (arc.arrival - arc.departure) as f64);
        }
        let dead = vec![false; g.num_arcs()];
        let r = price_paths(&g, &d, PricingMode::Plain, 1e-6, &dead);
        assert!(r.paths.is_empty());
        // shortest closed walk through one vertex
        let best = (1..5)
            .filter_map(|v| {
                let t = i.arrive(SOURCE, v, 0)?;
                i.arrive(v, SOURCE, t)
            })
            .min()
            .unwrap();
        assert_eq!(r.min_reduced_cost, best as f64);
    }

    #[test]
    fn cover_dual_cancels_cost() {
        let i = inst(2, 4);
        let g = TimeExpandedGraph::build(&i).unwrap();
        let mut d = DualView::zero(&g);
        let a = 3;
        let arc = *g.arc(a);
        d.lambda[arc.tail] = (arc.arrival - arc.departure) as f64;
        assert_eq!(reduced_cost(&g, a, &d), 0.0);
    }

    /// 4 vertices with cheap arcs a <-> b so that the only negative path
    /// under the chosen duals is s -> a -> b -> a -> s.
    #[test]
    fn two_cycle_is_excluded() {
        let big = 9;
        let mut m = vec![vec![big; 4]; 4];
        m[0][1] = 1;
        m[1][2] = 1;
        m[2][1] = 1;
        m[1][0] = 1;
        let i = Instance::from_constant(&m, 4).unwrap();
        let g = TimeExpandedGraph::build(&i).unwrap();
        let mut d = DualView::zero(&g);
        // rewards: leaving b pays 5, leaving a pays 0.5
        d.lambda[1] = 0.5;
        d.lambda[2] = 5.0;
        let dead = vec![false; g.num_arcs()];
        let plain = price_paths(&g, &d, PricingMode::Plain, 1e-9, &dead);
        let best = &plain.paths[0];
        let verts: Vec<_> = best.arcs.iter().map(|&a| g.arc(a).tail).collect();
        assert_eq!(verts, vec![0, 1, 2, 1]);
        // 1 + (1 - 0.5) + (1 - 5) + (1 - 0.5) = -2
        assert!((best.reduced_cost + 2.0).abs() < 1e-12);
        let cf = price_paths(&g, &d, PricingMode::TwoCycleFree, 1e-9, &dead);
        assert!(cf.paths.is_empty(), "{:?}", cf.paths);
        assert!(cf.min_reduced_cost >= plain.min_reduced_cost);
    }

    #[test]
    fn priced_paths_are_consistent() {
        for seed in 0..6 {
            let i = inst(seed, 6);
            let g = TimeExpandedGraph::build(&i).unwrap();
            let mut d = DualView::zero(&g);
            for v in 0..6 {
                d.lambda[v] = 15.0 + 3.0 * v as f64;
            }
            for k in 0..g.num_nodes() {
                d.mu[k] = ((k * 7919) % 13) as f64 - 6.0;
                if g.node(k).vertex == SOURCE {
                    d.mu[k] = 0.0;
                }
            }
            let dead: Vec<bool> = (0..g.num_arcs()).map(|a| a % 17 == 0).collect();
            let plain = price_paths(&g, &d, PricingMode::Plain, 1e-6, &dead);
            let cf = price_paths(&g, &d, PricingMode::TwoCycleFree, 1e-6, &dead);
            assert!(plain.min_reduced_cost <= cf.min_reduced_cost + 1e-9);
            for p in plain.paths.iter().chain(&cf.paths) {
                assert!((path_rc(&g, &d, &p.arcs) - p.reduced_cost).abs() < 1e-9);
                assert!(p.arcs.iter().all(|&a| !dead[a]));
            }
            for p in &cf.paths {
                for w in p.arcs.windows(2) {
                    let (x, y) = (g.arc(w[0]), g.arc(w[1]));
                    assert!(!(x.tail == y.head && y.head != SOURCE), "2-cycle in {:?}", p.arcs);
                }
            }
        }
    }

    #[test]
    fn loop_converges_to_full_lp() {
        for seed in 0..4 {
            let i = inst(seed, 5);
            let g = TimeExpandedGraph::build(&i).unwrap();
            let all: Vec<_> = (0..g.num_arcs()).collect();
            let mut full = Master::build_arc_master(&g, &all).unwrap();
            full.solve().unwrap();

            let tour = crate::oracle::solve_dp(&i).unwrap().unwrap();
            let mut m = Master::build_arc_master(&g, &g.embed(&tour).unwrap()).unwrap();
            let mut bounds = Vec::new();
            let out = pricing_loop(&mut m, &i, PricingMode::Plain, EPS_PRICING, &mut Budget::unlimited(), &mut |r| {
                bounds.push(r.bound)
            })
            .unwrap();
            assert!(out.converged);
            assert!((out.lp_value - full.objective()).abs() < 1e-6);
            for b in bounds {
                assert!(b <= full.objective() + 1e-6);
            }
            assert!(m.num_columns() <= g.num_arcs());
        }
    }

    #[test]
    fn unit_triangle_loop() {
        let i = Instance::from_constant(&vec![vec![1; 3]; 3], 3).unwrap();
        let g = TimeExpandedGraph::build(&i).unwrap();
        let tour = crate::oracle::solve_dp(&i).unwrap().unwrap();
        for formulation in [Formulation::Arc, Formulation::Path] {
            let path = g.embed(&tour).unwrap();
            let mut m = match formulation {
                Formulation::Arc => Master::build_arc_master(&g, &path).unwrap(),
                Formulation::Path => Master::build_path_master(&g, &[path]).unwrap(),
            };
            let out =
                pricing_loop(&mut m, &i, PricingMode::TwoCycleFree, EPS_PRICING, &mut Budget::unlimited(), &mut |_| {})
                    .unwrap();
            assert!(out.converged);
            assert!((out.lp_value - 3.0).abs() < 1e-9);
        }
    }
}

//! Primal heuristics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expand::{ArcIndex, TimeExpandedGraph};
use crate::instgen::static_lower_bounds;
use crate::master::CombinedFlow;
use crate::model::{Instance, TimePoint, Tour, VertexId, SOURCE};
use crate::oracle::{solve_static_dp, DP_MAX_VERTICES};

/// Mass added to every score before sampling.
const SCORE_SHIFT: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeurError {
    #[error("static tour arrives after the horizon {theta_max}")]
    Infeasible { theta_max: TimePoint },
}

/// How candidate arcs are scored during tour construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScoreMetric {
    /// `1 / c_uv(theta)`.
    InverseTravelTime,
    /// LP value of the timed arc.
    ArcValue,
    /// Combined LP value of the base arc.
    CombinedValue,
}

impl ScoreMetric {
    pub const ALL: [ScoreMetric; 3] = [
        ScoreMetric::InverseTravelTime,
        ScoreMetric::ArcValue,
        ScoreMetric::CombinedValue,
    ];
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionConfig {
    pub trials: usize,
    /// Always take the best-scored arc instead of sampling.
    pub greedy: bool,
    pub seed: u64,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        Self {
            trials: 32,
            greedy: false,
            seed: 0,
        }
    }
}

/// Builds tours by walking the time-expanded graph from `s_0`, always
/// moving to an unvisited vertex over an arc that is not dead. Returns the
/// distinct completed tours in trial order.
pub fn construct_tours(
    inst: &Instance,
    g: &TimeExpandedGraph,
    x: &[f64],
    dead: &[bool],
    metric: ScoreMetric,
    config: &ConstructionConfig,
) -> Vec<Tour> {
    let flow = (metric == ScoreMetric::CombinedValue).then(|| CombinedFlow::from_arc_values(g, x));
    let score = |a: ArcIndex| -> f64 {
        let arc = g.arc(a);
        match metric {
            ScoreMetric::InverseTravelTime => 1.0 / f64::from((arc.arrival - arc.departure).max(1)),
            ScoreMetric::ArcValue => x[a],
            ScoreMetric::CombinedValue => flow.as_ref().map_or(0.0, |f| f.get(arc.tail, arc.head)),
        }
    };
    let trials = if config.greedy { 1 } else { config.trials };
    let mut tours: Vec<Tour> = Vec::new();
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trial as u64);
        let Some(path) = walk(g, dead, &score, config.greedy, &mut rng) else { continue };
        if let Some(tour) = g.path_to_tour(inst, &path) {
            if !tours.contains(&tour) {
                tours.push(tour);
            }
        }
    }
    tours
}

fn walk(
    g: &TimeExpandedGraph,
    dead: &[bool],
    score: &dyn Fn(ArcIndex) -> f64,
    greedy: bool,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<ArcIndex>> {
    let n = g.n();
    let mut visited = vec![false; n];
    visited[SOURCE] = true;
    let mut at = g.source_node();
    let mut path = Vec::with_capacity(n);
    while path.len() < n {
        let closing = path.len() == n - 1;
        let candidates: Vec<ArcIndex> = g
            .out_arcs(at)
            .filter(|&a| !dead.get(a).copied().unwrap_or(false))
            .filter(|&a| {
                let head = g.arc(a).head;
                if closing {
                    head == SOURCE
                } else {
                    !visited[head]
                }
            })
            .collect();
        let chosen = if greedy {
            // best score, then shorter travel, then lower index
            candidates.iter().copied().max_by(|&a, &b| {
                let (ta, tb) = (g.arc(a).arrival, g.arc(b).arrival);
                score(a).total_cmp(&score(b)).then(tb.cmp(&ta)).then(b.cmp(&a))
            })?
        } else {
            let weights: Vec<f64> = candidates.iter().map(|&a| score(a).max(0.0) + SCORE_SHIFT).collect();
            let total: f64 = weights.iter().sum();
            if candidates.is_empty() {
                return None;
            }
            let mut pick = rng.gen::<f64>() * total;
            let mut chosen = *candidates.last().unwrap();
            for (&a, &w) in candidates.iter().zip(&weights) {
                if pick < w {
                    chosen = a;
                    break;
                }
                pick -= w;
            }
            chosen
        };
        path.push(chosen);
        visited[g.arc(chosen).head] = true;
        at = g.head_node(chosen);
    }
    Some(path)
}

/// A tour that is optimal (or heuristic) for the static lower-bound costs,
/// evaluated under the time-dependent costs.
#[derive(Clone, Debug, PartialEq)]
pub struct WarmStart {
    pub tour: Tour,
    /// `max_a max_theta c_a(theta) / min_theta c_a(theta)`.
    pub lambda_hat: f64,
    /// Whether the static tour is optimal for the static costs.
    pub exact: bool,
}

/// Largest ratio between the slowest and fastest travel time of an arc.
pub fn slowdown_factor(inst: &Instance) -> f64 {
    let mut worst = 1.0f64;
    for u in inst.vertices() {
        for v in inst.vertices() {
            if u != v {
                let f = inst.arc(u, v);
                if f.min() > 0 {
                    worst = worst.max(f64::from(f.max()) / f64::from(f.min()));
                }
            }
        }
    }
    worst
}

pub fn static_warmstart(inst: &Instance) -> Result<WarmStart, HeurError> {
    let costs = static_lower_bounds(inst);
    let exact = inst.n() <= DP_MAX_VERTICES;
    let order = if exact { solve_static_dp(&costs).0 } else { static_heuristic_tour(&costs) };
    let tour = Tour::evaluate(inst, order)
        .ok()
        .flatten()
        .ok_or(HeurError::Infeasible { theta_max: inst.theta_max() })?;
    Ok(WarmStart {
        tour,
        lambda_hat: slowdown_factor(inst),
        exact,
    })
}

fn static_length(costs: &[Vec<TimePoint>], order: &[VertexId]) -> u64 {
    order
        .iter()
        .zip(order.iter().cycle().skip(1))
        .map(|(&u, &v)| costs[u][v] as u64)
        .sum()
}

/// Nearest-neighbour tour from the source improved by 2-opt and or-opt
/// moves until no move shortens it. Works on asymmetric costs.
pub fn static_heuristic_tour(costs: &[Vec<TimePoint>]) -> Vec<VertexId> {
    let n = costs.len();
    let mut order = vec![SOURCE];
    let mut used = vec![false; n];
    used[SOURCE] = true;
    while order.len() < n {
        let last = *order.last().unwrap();
        let next = (0..n)
            .filter(|&v| !used[v])
            .min_by_key(|&v| (costs[last][v], v))
            .unwrap();
        used[next] = true;
        order.push(next);
    }
    let mut best = static_length(costs, &order);
    loop {
        let mut improved = false;
        for i in 1..n {
            for j in i + 1..n {
                let mut cand = order.clone();
                cand[i..=j].reverse();
                let len = static_length(costs, &cand);
                if len < best {
                    best = len;
                    order = cand;
                    improved = true;
                }
                for seg in 1..=3.min(n - i) {
                    if j + seg > n || (i..i + seg).contains(&j) {
                        continue;
                    }
                    let mut cand = order.clone();
                    let moved: Vec<_> = cand.drain(i..i + seg).collect();
                    let at = (j + 1 - seg).min(cand.len());
                    cand.splice(at..at, moved);
                    let len = static_length(costs, &cand);
                    if len < best {
                        best = len;
                        order = cand;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            return order;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::{generate, GenConfig};
    use crate::oracle::solve_dp;

    fn inst(seed: u64, n: usize) -> Instance {
        generate(&GenConfig { n, theta_max: 300, breakpoints: 20, coord_range: 40, seed, ..Default::default() }).unwrap()
    }

    #[test]
    fn greedy_reproduces_integral_solution() {
        let i = inst(1, 7);
        let g = TimeExpandedGraph::build(&i).unwrap();
        let tour = solve_dp(&i).unwrap().unwrap();
        let mut x = vec![0.0; g.num_arcs()];
        for a in g.embed(&tour).unwrap() {
            x[a] = 1.0;
        }
        let dead = vec![false; g.num_arcs()];
        let cfg = ConstructionConfig { greedy: true, ..Default::default() };
        for metric in [ScoreMetric::ArcValue, ScoreMetric::CombinedValue] {
            assert_eq!(construct_tours(&i, &g, &x, &dead, metric, &cfg), vec![tour.clone()]);
        }
    }

    #[test]
    fn unit_triangle_any_tour() {
        let i = Instance::from_constant(&vec![vec![1; 3]; 3], 3).unwrap();
        let g = TimeExpandedGraph::build(&i).unwrap();
        let x = vec![0.0; g.num_arcs()];
        let tours = construct_tours(&i, &g, &x, &[], ScoreMetric::InverseTravelTime, &Default::default());
        assert!(!tours.is_empty());
        assert!(tours.iter().all(|t| t.arrival() == 3));
    }

    #[test]
    fn respects_dead_arcs_and_is_deterministic() {
        let i = inst(4, 8);
        let g = TimeExpandedGraph::build(&i).unwrap();
        let x = vec![0.0; g.num_arcs()];
        let dead: Vec<bool> = g.arcs().iter().map(|a| (a.tail, a.head) == (0, 1) || (a.tail, a.head) == (3, 2)).collect();
        let cfg = ConstructionConfig { seed: 9, ..Default::default() };
        let a = construct_tours(&i, &g, &x, &dead, ScoreMetric::InverseTravelTime, &cfg);
        let b = construct_tours(&i, &g, &x, &dead, ScoreMetric::InverseTravelTime, &cfg);
        assert_eq!(a, b);
        assert!(!a.is_empty());
        for t in &a {
            assert!(t.revalidate(&i));
            for arc in g.embed(t).unwrap() {
                assert!(!dead[arc]);
            }
        }
    }

    #[test]
    fn constant_instance_factor_one() {
        let m = vec![vec![0, 3, 4, 2], vec![3, 0, 5, 6], vec![4, 5, 0, 1], vec![2, 6, 1, 0]];
        let i = Instance::from_constant(&m, 100).unwrap();
        let w = static_warmstart(&i).unwrap();
        assert_eq!(w.lambda_hat, 1.0);
        assert!(w.exact);
        assert_eq!(w.tour.arrival(), solve_dp(&i).unwrap().unwrap().arrival());
    }

    #[test]
    fn warm_start_guarantee() {
        for seed in 0..10 {
            let i = inst(seed, 7);
            let w = static_warmstart(&i).unwrap();
            let opt = solve_dp(&i).unwrap().unwrap().arrival();
            assert!(w.lambda_hat <= 4.0 + 1e-12);
            assert!(f64::from(w.tour.arrival()) <= w.lambda_hat * f64::from(opt) + 1e-9);
        }
    }

    #[test]
    fn static_heuristic_is_a_permutation() {
        let costs: Vec<Vec<TimePoint>> = (0..9).map(|u| (0..9).map(|v| ((u * 7 + v * 3) % 11) as TimePoint).collect()).collect();
        let mut order = static_heuristic_tour(&costs);
        assert_eq!(order[0], SOURCE);
        order.sort_unstable();
        assert_eq!(order, (0..9).collect::<Vec<_>>());
    }
}

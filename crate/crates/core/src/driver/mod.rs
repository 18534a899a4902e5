//! Branch-and-price-and-cut over the time-expanded graph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::branch::{
    self, apply_decision, extract_features, BranchDecision, BranchingRule, BranchingSample, Direction, NodeContext,
    Pseudocosts, StrongResult,
};
use crate::cuts::{Cut, CutFamily, SeparationConfig, Separator};
use crate::expand::{ExpandError, TimeExpandedGraph};
use crate::heur::{construct_tours, static_warmstart, ConstructionConfig, ScoreMetric};
use crate::instgen::static_lower_bounds;
use crate::master::{decompose_paths, CombinedFlow, Formulation, Master, MasterError};
use crate::model::{Instance, TimePoint, Tour, VertexId};
use crate::pricing::{pricing_loop, solve_within, PricingMode, RoundInfo, EPS_PRICING};
use crate::prop::{propagate, PropagationRule};
use crate::work::Budget;

pub mod report;

pub use report::{benchmark, write_csv, BenchmarkRow, CSV_HEADER};

/// Work units standing in for one second when a work limit is set.
pub const WORK_PER_SECOND: u64 = 600_000_000;
/// Artificial values above this count as infeasibility.
const ARTIFICIAL_TOL: f64 = 1e-6;
const BOUND_TOL: f64 = 1e-6;
const MAX_ESCALATIONS: usize = 8;

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Master(#[from] MasterError),
}

/// How new columns enter the master.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PricingStrategy {
    /// Every timed arc from the start, no pricing.
    Full,
    /// The single most negative arc per round.
    Arc,
    /// Shortest paths.
    Path,
    /// Shortest paths without 2-cycles.
    TwoCycleFree,
}

impl PricingStrategy {
    fn mode(self) -> PricingMode {
        match self {
            PricingStrategy::Full | PricingStrategy::Path => PricingMode::Plain,
            PricingStrategy::Arc => PricingMode::Arc,
            PricingStrategy::TwoCycleFree => PricingMode::TwoCycleFree,
        }
    }
}

impl fmt::Display for PricingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PricingStrategy::Full => "full",
            PricingStrategy::Arc => "arc",
            PricingStrategy::Path => "path",
            PricingStrategy::TwoCycleFree => "2cf",
        })
    }
}

impl FromStr for PricingStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(PricingStrategy::Full),
            "arc" => Ok(PricingStrategy::Arc),
            "path" => Ok(PricingStrategy::Path),
            "2cf" => Ok(PricingStrategy::TwoCycleFree),
            _ => Err(format!("unknown pricing `{s}` (expected full, arc, path or 2cf)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub formulation: Formulation,
    pub pricing: PricingStrategy,
    /// Separated families; LSEC always runs first when listed.
    pub cuts: Vec<CutFamily>,
    pub heuristics: bool,
    pub propagation: bool,
    pub propagation_rule: PropagationRule,
    pub branching: BranchingRule,
    pub time_limit: Option<Duration>,
    /// Deterministic budget; replaces the time limit when set.
    pub work_limit: Option<u64>,
    pub node_limit: Option<u64>,
    pub seed: u64,
    pub root_rounds: usize,
    pub node_rounds: usize,
    /// Candidates evaluated by strong branching, most fractional first.
    pub strong_candidates: usize,
    pub strong_iterations: u64,
    pub heuristic_trials: usize,
    /// Keep features and strong-branching scores of every branching node.
    pub record_branching: bool,
    pub separation: SeparationConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            formulation: Formulation::Arc,
            pricing: PricingStrategy::TwoCycleFree,
            cuts: vec![CutFamily::Lsec],
            heuristics: true,
            propagation: true,
            propagation_rule: PropagationRule::Strengthened,
            branching: BranchingRule::MostFractional,
            time_limit: None,
            work_limit: None,
            node_limit: None,
            seed: 0,
            root_rounds: 5,
            node_rounds: 1,
            strong_candidates: 8,
            strong_iterations: 5_000,
            heuristic_trials: 32,
            record_branching: false,
            separation: SeparationConfig::default(),
        }
    }
}

impl SolverConfig {
    /// Every cut family, heuristics and propagation.
    pub fn all_features() -> Self {
        Self {
            cuts: CutFamily::ALL.to_vec(),
            ..Self::default()
        }
    }

    /// The master and pricing variants compared against each other: full
    /// arc LP, arc pricing, path pricing, 2-cycle-free pricing, and the path
    /// master with both pricing variants. All run LSEC with heuristics and
    /// propagation.
    pub fn formulation_presets() -> Vec<Self> {
        [
            (Formulation::Arc, PricingStrategy::Full),
            (Formulation::Arc, PricingStrategy::Arc),
            (Formulation::Arc, PricingStrategy::Path),
            (Formulation::Arc, PricingStrategy::TwoCycleFree),
            (Formulation::Path, PricingStrategy::Path),
            (Formulation::Path, PricingStrategy::TwoCycleFree),
        ]
        .into_iter()
        .map(|(formulation, pricing)| Self { formulation, pricing, ..Self::default() })
        .collect()
    }

    /// Plain branch-and-price, each cut family alone, and LSEC together with
    /// heuristics and propagation.
    pub fn cut_presets() -> Vec<Self> {
        let plain = Self { cuts: Vec::new(), heuristics: false, propagation: false, ..Self::default() };
        let mut presets = vec![plain.clone()];
        presets.extend(CutFamily::ALL.into_iter().map(|f| Self { cuts: vec![f], ..plain.clone() }));
        presets.push(Self::default());
        presets
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        if self.formulation == Formulation::Path
            && matches!(self.pricing, PricingStrategy::Full | PricingStrategy::Arc)
        {
            return Err(DriverError::Config(format!(
                "the path master needs path pricing, not `{}`",
                self.pricing
            )));
        }
        if self.branching == BranchingRule::Strong && self.strong_candidates == 0 {
            return Err(DriverError::Config("strong branching needs at least one candidate".into()));
        }
        Ok(())
    }

    /// Cut families in separation order.
    pub fn separation_order(&self) -> Vec<CutFamily> {
        let mut order = Vec::new();
        if self.cuts.contains(&CutFamily::Lsec) {
            order.push(CutFamily::Lsec);
        }
        for &f in &self.cuts {
            if !order.contains(&f) {
                order.push(f);
            }
        }
        order
    }

    /// Short description such as `arc/2cf/LSEC+DK/h/p/mostfrac`.
    pub fn label(&self) -> String {
        let cuts = if self.cuts.is_empty() {
            "nocuts".to_string()
        } else {
            self.separation_order().iter().map(|f| f.name()).collect::<Vec<_>>().join("+")
        };
        format!(
            "{}/{}/{}/{}/{}/{}",
            self.formulation,
            self.pricing,
            cuts,
            if self.heuristics { "h" } else { "noh" },
            if self.propagation { "p" } else { "nop" },
            self.branching
        )
    }
}

/// Statistics of one solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    /// Optimality (or infeasibility) proven.
    pub solved: bool,
    pub primal: Option<TimePoint>,
    /// Global dual bound, rounded up to an integer where valid.
    pub dual: f64,
    pub gap: f64,
    /// Seconds; virtual seconds (`work / WORK_PER_SECOND`) under a work limit.
    pub time: f64,
    pub work: u64,
    pub nodes: u64,
    pub columns: usize,
    pub rows: usize,
    /// Cuts per family, indexed by [`CutFamily::index`].
    pub cuts: [usize; 7],
    /// The root relaxation was solved to optimality over all columns.
    pub root_lp_solved: bool,
    pub root_bound: f64,
    /// `(work, value)` at every incumbent improvement.
    pub incumbent_history: Vec<(u64, TimePoint)>,
}

impl RunStats {
    /// Statistics of a run that produced nothing.
    pub fn failed() -> Self {
        Self {
            solved: false,
            primal: None,
            dual: 0.0,
            gap: 1.0,
            time: 0.0,
            work: 0,
            nodes: 0,
            columns: 0,
            rows: 0,
            cuts: [0; 7],
            root_lp_solved: false,
            root_bound: f64::NEG_INFINITY,
            incumbent_history: Vec::new(),
        }
    }
}

/// `(primal - dual) / primal` clamped to `[0, 1]`, with `0/0 = 0` and 1
/// without a primal solution.
pub fn remaining_gap(primal: Option<f64>, dual: f64) -> f64 {
    match primal {
        None => 1.0,
        Some(p) if p <= 0.0 => 0.0,
        Some(p) => ((p - dual) / p).clamp(0.0, 1.0),
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub tour: Option<Tour>,
    pub stats: RunStats,
    pub samples: Vec<BranchingSample>,
}

/// Hooks into a running solve; every method defaults to doing nothing.
pub trait Observer {
    fn pricing_round(&mut self, _node: u64, _info: &RoundInfo) {}
    fn cuts_added(&mut self, _node: u64, _cuts: &[Cut]) {}
    fn strong_branching(
        &mut self,
        _node: u64,
        _master: &Master<'_>,
        _parent_dead: &[bool],
        _parent_bound: f64,
        _candidates: &[(VertexId, VertexId)],
        _results: &[StrongResult],
    ) {
    }
}

struct NoObserver;

impl Observer for NoObserver {}

pub fn solve(inst: &Instance, config: &SolverConfig) -> Result<SolveOutcome, DriverError> {
    solve_with(inst, config, &mut NoObserver)
}

pub fn solve_with(inst: &Instance, config: &SolverConfig, observer: &mut dyn Observer) -> Result<SolveOutcome, DriverError> {
    config.validate()?;
    let mut budget = Budget::new(config.work_limit, config.time_limit);
    let g = match TimeExpandedGraph::build(inst) {
        Ok(g) => g,
        Err(ExpandError::EmptyExpansion) => {
            log::info!("no tour fits the horizon");
            return Ok(SolveOutcome {
                tour: None,
                stats: RunStats {
                    solved: true,
                    primal: None,
                    dual: f64::INFINITY,
                    gap: 0.0,
                    time: 0.0,
                    work: 0,
                    nodes: 0,
                    columns: 0,
                    rows: 0,
                    cuts: [0; 7],
                    root_lp_solved: true,
                    root_bound: f64::INFINITY,
                    incumbent_history: Vec::new(),
                },
                samples: Vec::new(),
            });
        }
    };
    let mut run = Run::new(inst, &g, config, observer, &mut budget);
    run.execute(&mut budget)?;
    Ok(run.finish(&budget))
}

#[derive(Clone, Copy, Debug)]
struct Origin {
    decision: BranchDecision,
    parent_value: f64,
    parent_bound: f64,
}

#[derive(Clone, Debug)]
struct OpenNode {
    id: u64,
    bound: f64,
    depth: u32,
    history: Vec<BranchDecision>,
    origin: Option<Origin>,
}

impl PartialEq for OpenNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenNode {}

impl Ord for OpenNode {
    // max-heap order: lowest bound, then deepest, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of solving one node relaxation.
struct Relaxation {
    bound: f64,
    converged: bool,
}

struct Run<'a, 'g> {
    inst: &'a Instance,
    g: &'g TimeExpandedGraph,
    cfg: &'a SolverConfig,
    observer: &'a mut dyn Observer,
    master: Master<'g>,
    separator: Separator<'g>,
    costs: Vec<Vec<TimePoint>>,
    incumbent: Option<Tour>,
    history: Vec<(u64, TimePoint)>,
    open: BinaryHeap<OpenNode>,
    next_id: u64,
    nodes: u64,
    /// Lowest bound of nodes dropped without being resolved.
    lost_bound: f64,
    root_lp_solved: bool,
    root_bound: f64,
    pseudocosts: Pseudocosts,
    samples: Vec<BranchingSample>,
    work: u64,
}

impl<'a, 'g> Run<'a, 'g> {
    fn new(
        inst: &'a Instance,
        g: &'g TimeExpandedGraph,
        cfg: &'a SolverConfig,
        observer: &'a mut dyn Observer,
        budget: &mut Budget,
    ) -> Self {
        let mut master = Master::empty(g, cfg.formulation);
        if cfg.pricing == PricingStrategy::Full {
            for a in 0..g.num_arcs() {
                master.add_arc(a);
            }
        }
        let mut run = Self {
            inst,
            g,
            cfg,
            observer,
            master,
            separator: Separator::with_config(inst, g, cfg.separation.clone()),
            costs: static_lower_bounds(inst),
            incumbent: None,
            history: Vec::new(),
            open: BinaryHeap::new(),
            next_id: 1,
            nodes: 0,
            lost_bound: f64::INFINITY,
            root_lp_solved: false,
            root_bound: f64::NEG_INFINITY,
            pseudocosts: Pseudocosts::new(g.n()),
            samples: Vec::new(),
            work: 0,
        };
        match static_warmstart(inst) {
            Ok(ws) => run.offer(ws.tour, budget),
            Err(e) => log::debug!("warm start skipped: {e}"),
        }
        if cfg.heuristics {
            let zero = vec![0.0; g.num_arcs()];
            let dead = vec![false; g.num_arcs()];
            run.construct(&zero, &dead, 0, budget);
        }
        run.open.push(OpenNode { id: 0, bound: 0.0, depth: 0, history: Vec::new(), origin: None });
        run
    }

    fn upper(&self) -> Option<TimePoint> {
        self.incumbent.as_ref().map(Tour::arrival)
    }

    /// No tour better than the incumbent (or within the horizon) can have
    /// value `bound`.
    fn dominated(&self, bound: f64) -> bool {
        match self.upper() {
            Some(u) => bound > f64::from(u) - 1.0 + BOUND_TOL,
            None => bound > f64::from(self.g.theta_max()) + BOUND_TOL,
        }
    }

    fn offer(&mut self, tour: Tour, budget: &Budget) {
        if self.upper().is_some_and(|u| tour.arrival() >= u) {
            return;
        }
        let Some(path) = self.g.embed(&tour) else { return };
        log::debug!("incumbent {} after {} work", tour.arrival(), budget.work());
        self.history.push((budget.work(), tour.arrival()));
        match self.cfg.formulation {
            Formulation::Arc => {
                for &a in &path {
                    self.master.add_arc(a);
                }
            }
            Formulation::Path => {
                self.master.add_path(&path);
            }
        }
        self.incumbent = Some(tour);
    }

    fn construct(&mut self, x: &[f64], dead: &[bool], node: u64, budget: &mut Budget) {
        for (k, metric) in ScoreMetric::ALL.into_iter().enumerate() {
            let cfg = ConstructionConfig {
                trials: self.cfg.heuristic_trials,
                greedy: false,
                seed: self.cfg.seed ^ node.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ k as u64,
            };
            budget.charge((cfg.trials * self.g.n() * self.g.n()) as u64);
            for t in construct_tours(self.inst, self.g, x, dead, metric, &cfg) {
                self.offer(t, budget);
            }
        }
    }

    fn execute(&mut self, budget: &mut Budget) -> Result<(), DriverError> {
        while let Some(node) = self.open.pop() {
            if self.dominated(node.bound) {
                continue;
            }
            if budget.exhausted() || self.cfg.node_limit.is_some_and(|l| self.nodes >= l) {
                self.open.push(node);
                break;
            }
            self.nodes += 1;
            let is_root = node.id == 0;
            match self.process(node, budget) {
                Ok(()) => {}
                Err(e) if !is_root => log::warn!("node dropped: {e}"),
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    fn dead_mask(&self, node: &OpenNode) -> Vec<bool> {
        let mut dead = vec![false; self.g.num_arcs()];
        for &d in &node.history {
            apply_decision(self.g, d, &mut dead);
        }
        if self.cfg.propagation {
            let upper = self.upper().unwrap_or(self.g.theta_max() + 1);
            let lower = (node.bound - BOUND_TOL).ceil().max(0.0) as TimePoint;
            propagate(self.g, upper, lower, &mut dead, self.cfg.propagation_rule);
        }
        dead
    }

    /// Prices until convergence, raising the artificial penalty while
    /// artificials stay in the solution of a non-dominated node.
    fn relax(&mut self, node: u64, budget: &mut Budget) -> Result<Relaxation, DriverError> {
        let mut bound = f64::NEG_INFINITY;
        for _ in 0..MAX_ESCALATIONS {
            let (converged, b) = if self.cfg.pricing == PricingStrategy::Full {
                if solve_within(&mut self.master, budget)? {
                    (true, self.master.objective())
                } else {
                    (false, f64::NEG_INFINITY)
                }
            } else {
                let observer = &mut *self.observer;
                let out = pricing_loop(
                    &mut self.master,
                    self.inst,
                    self.cfg.pricing.mode(),
                    EPS_PRICING,
                    budget,
                    &mut |info| observer.pricing_round(node, info),
                )?;
                for t in out.tours {
                    self.offer(t, budget);
                }
                (out.converged, out.bound)
            };
            bound = bound.max(b);
            if !converged || self.master.artificial_value() <= ARTIFICIAL_TOL || self.dominated(bound) {
                return Ok(Relaxation { bound, converged });
            }
            self.master.escalate_big_m(10.0);
        }
        Ok(Relaxation { bound, converged: true })
    }

    fn process(&mut self, node: OpenNode, budget: &mut Budget) -> Result<(), DriverError> {
        let is_root = node.id == 0;
        let dead = self.dead_mask(&node);
        self.master.set_dead(&dead);
        let mut relax = self.relax(node.id, budget)?;
        let mut bound = node.bound.max(relax.bound);
        if is_root {
            self.root_lp_solved = relax.converged;
        }
        if let Some(o) = node.origin {
            let distance = match o.decision.direction {
                Direction::ToOne => 1.0 - o.parent_value,
                Direction::ToZero => o.parent_value,
            };
            if relax.converged && self.master.artificial_value() <= ARTIFICIAL_TOL {
                self.pseudocosts.observe(o.decision.arc, (bound - o.parent_bound).max(0.0), distance);
            }
        }

        let rounds = if is_root { self.cfg.root_rounds } else { self.cfg.node_rounds };
        let families = self.cfg.separation_order();
        for _ in 0..rounds {
            if families.is_empty()
                || !relax.converged
                || self.master.artificial_value() > ARTIFICIAL_TOL
                || self.dominated(bound)
            {
                break;
            }
            let x = self.master.arc_values();
            if branch::candidates(&CombinedFlow::from_arc_values(self.g, &x)).is_empty() {
                break;
            }
            let mut added = Vec::new();
            for &f in &families {
                budget.charge(self.g.num_arcs() as u64);
                for cut in self.separator.separate(f, &x) {
                    added.push(cut.clone());
                    self.master.add_cut(cut, node.id);
                }
            }
            if added.is_empty() {
                break;
            }
            self.observer.cuts_added(node.id, &added);
            relax = self.relax(node.id, budget)?;
            bound = bound.max(relax.bound);
        }
        if is_root {
            self.root_bound = bound;
        }

        let exhausted = !relax.converged && budget.exhausted();
        let clean = relax.converged && self.master.artificial_value() <= ARTIFICIAL_TOL;
        let x = self.master.arc_values();
        let flow = CombinedFlow::from_arc_values(self.g, &x);
        let cands = branch::candidates(&flow);
        if clean && cands.is_empty() {
            match decompose_paths(self.g, &x) {
                Ok(paths) => {
                    if let Some(t) = paths.first().and_then(|(p, _)| self.g.path_to_tour(self.inst, p)) {
                        self.offer(t, budget);
                    }
                }
                Err(e) => log::warn!("integral point without a tour: {e}"),
            }
            if relax.converged {
                return Ok(());
            }
        }
        if self.cfg.heuristics {
            self.construct(&x, &dead, node.id, budget);
        }
        if self.dominated(bound) {
            return Ok(());
        }
        if exhausted {
            self.open.push(OpenNode { bound, ..node });
            return Ok(());
        }
        if cands.is_empty() {
            log::warn!("node {} has no branching candidate (artificials {})", node.id, self.master.artificial_value());
            self.lost_bound = self.lost_bound.min(bound);
            return Ok(());
        }
        let pick = self.choose(&node, &dead, bound, &flow, &cands, budget)?;
        let arc = cands[pick];
        for direction in [Direction::ToOne, Direction::ToZero] {
            let decision = BranchDecision { arc, direction };
            let mut history = node.history.clone();
            history.push(decision);
            self.open.push(OpenNode {
                id: self.next_id,
                bound,
                depth: node.depth + 1,
                history,
                origin: Some(Origin { decision, parent_value: flow.get(arc.0, arc.1), parent_bound: bound }),
            });
            self.next_id += 1;
        }
        Ok(())
    }

    fn choose(
        &mut self,
        node: &OpenNode,
        dead: &[bool],
        bound: f64,
        flow: &CombinedFlow,
        cands: &[(VertexId, VertexId)],
        budget: &mut Budget,
    ) -> Result<usize, DriverError> {
        let features = |run: &Self, arcs: &[(VertexId, VertexId)]| -> Vec<[f64; branch::NUM_FEATURES]> {
            let ctx = NodeContext {
                g: run.g,
                flow,
                lp_value: bound,
                incumbent: run.upper().map(f64::from),
                costs: &run.costs,
                has_column: run.master.present_arcs(),
                pseudocosts: &run.pseudocosts,
                history: &node.history,
            };
            arcs.iter().map(|&a| extract_features(&ctx, a)).collect()
        };
        match &self.cfg.branching {
            BranchingRule::MostFractional => {
                branch::most_fractional(flow, cands).map_err(|e| DriverError::Config(e.to_string()))
            }
            BranchingRule::Learned(model) => {
                let scores: Vec<f64> = features(self, cands).iter().map(|f| model.score(f)).collect();
                Ok(branch::argmax(&scores).unwrap_or(0))
            }
            BranchingRule::Strong => {
                let mut order: Vec<usize> = (0..cands.len()).collect();
                order.sort_by(|&a, &b| {
                    let fa = flow.get(cands[a].0, cands[a].1);
                    let fb = flow.get(cands[b].0, cands[b].1);
                    fb.min(1.0 - fb).total_cmp(&fa.min(1.0 - fa)).then(a.cmp(&b))
                });
                order.truncate(self.cfg.strong_candidates);
                order.sort_unstable();
                let top: Vec<(VertexId, VertexId)> = order.iter().map(|&i| cands[i]).collect();
                let before = self.master.lp().work();
                let results = branch::strong_branch(&mut self.master, dead, bound, &top, self.cfg.strong_iterations);
                budget.charge(self.master.lp().work() - before);
                for (r, &arc) in results.iter().zip(&top) {
                    let x = flow.get(arc.0, arc.1);
                    self.pseudocosts.observe(arc, r.delta_one, 1.0 - x);
                    self.pseudocosts.observe(arc, r.delta_zero, x);
                }
                self.observer.strong_branching(node.id, &self.master, dead, bound, &top, &results);
                let scores: Vec<f64> = results.iter().map(StrongResult::score).collect();
                if self.cfg.record_branching {
                    let feats = features(self, &top);
                    self.samples.push(BranchingSample { node: node.id, arcs: top.clone(), features: feats, scores: scores.clone() });
                }
                Ok(order[branch::argmax(&scores).unwrap_or(0)])
            }
        }
    }

    fn finish(self, budget: &Budget) -> SolveOutcome {
        let _ = self.work;
        let open_bound = self.open.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
        let primal = self.upper();
        let solved = self.open.iter().all(|n| self.dominated(n.bound)) && self.lost_bound == f64::INFINITY;
        let mut dual = open_bound.min(self.lost_bound);
        if let Some(p) = primal {
            dual = dual.min(f64::from(p));
        }
        if dual.is_finite() {
            dual = (dual - BOUND_TOL).ceil().max(self.root_bound.min(dual));
        }
        if solved {
            dual = primal.map_or(f64::INFINITY, f64::from);
        }
        let gap = if solved { 0.0 } else { remaining_gap(primal.map(f64::from), dual) };
        let time = if budget.is_deterministic() {
            budget.work() as f64 / WORK_PER_SECOND as f64
        } else {
            budget.elapsed().as_secs_f64()
        };
        let mut cuts = [0; 7];
        for f in CutFamily::ALL {
            cuts[f.index()] = self.master.cut_count(f);
        }
        SolveOutcome {
            stats: RunStats {
                solved,
                primal,
                dual,
                gap,
                time,
                work: budget.work(),
                nodes: self.nodes,
                columns: self.master.num_columns(),
                rows: self.master.num_rows(),
                cuts,
                root_lp_solved: self.root_lp_solved,
                root_bound: self.root_bound,
                incumbent_history: self.history,
            },
            tour: self.incumbent,
            samples: self.samples,
        }
    }
}

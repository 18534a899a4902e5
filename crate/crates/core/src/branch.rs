//! Compound branching on the combined flow, candidate features, strong
//! branching scores, ranking-data export and learned scoring models.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::expand::TimeExpandedGraph;
use crate::lp::LpStatus;
use crate::master::{CombinedFlow, Master, MasterError};
use crate::model::{TimePoint, VertexId};

/// Combined flows within this distance of 0 or 1 count as integral.
pub const EPS_INTEGRAL: f64 = 1e-6;
/// Offset in the strong-branching product score.
pub const ZETA: f64 = 1e-6;
/// Value of the gap feature when no positive gap is known.
pub const GAP_SENTINEL: f64 = 1e6;
pub const NUM_FEATURES: usize = 13;

pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "cost_over_lp",
    "cost_over_incumbent",
    "cost_over_gap",
    "value",
    "one_minus_value",
    "fractionality",
    "copies_share",
    "priced_in",
    "pseudocost",
    "comp_u_one",
    "comp_u_zero",
    "comp_v_one",
    "comp_v_zero",
];

#[derive(Debug, Error)]
pub enum BranchError {
    #[error("no fractional combined arc to branch on")]
    NoFractional,
    #[error("scoring model: {0}")]
    ModelFormat(String),
    #[error("training data line {line}: {msg}")]
    DataFormat { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Master(#[from] MasterError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    ToOne,
    ToZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BranchDecision {
    pub arc: (VertexId, VertexId),
    pub direction: Direction,
}

/// Base arcs incompatible with `(u, v)`: same tail, same head, or reverse.
pub fn incompatible_arcs(n: usize, u: VertexId, v: VertexId) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::with_capacity(2 * n.saturating_sub(2) + 1);
    for w in 0..n {
        if w != u && w != v {
            out.push((u, w));
            out.push((w, v));
        }
    }
    out.push((v, u));
    out
}

/// Marks the timed arcs removed by `decision` as dead.
pub fn apply_decision(g: &TimeExpandedGraph, decision: BranchDecision, dead: &mut [bool]) {
    let (u, v) = decision.arc;
    let mut kill = |a: VertexId, b: VertexId| {
        for &t in g.copies(a, b) {
            dead[t] = true;
        }
    };
    match decision.direction {
        Direction::ToZero => kill(u, v),
        Direction::ToOne => {
            for (a, b) in incompatible_arcs(g.n(), u, v) {
                kill(a, b);
            }
        }
    }
}

/// Fractional base arcs in `(u, v)` order.
pub fn candidates(flow: &CombinedFlow) -> Vec<(VertexId, VertexId)> {
    flow.fractional(EPS_INTEGRAL)
}

/// The candidate with `x_uv` closest to 1/2, lowest index on ties.
pub fn most_fractional(flow: &CombinedFlow, cands: &[(VertexId, VertexId)]) -> Result<usize, BranchError> {
    argmax(&cands
        .iter()
        .map(|&(u, v)| {
            let x = flow.get(u, v);
            x.min(1.0 - x)
        })
        .collect::<Vec<_>>())
    .ok_or(BranchError::NoFractional)
}

/// Index of the largest score, first one on ties; `None` when empty.
pub fn argmax(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if best.map_or(true, |b| s > scores[b]) {
            best = Some(i);
        }
    }
    best
}

pub fn product_score(delta_one: f64, delta_zero: f64) -> f64 {
    if delta_one.is_nan() || delta_zero.is_nan() {
        return f64::NEG_INFINITY;
    }
    (delta_one + ZETA) * (delta_zero + ZETA)
}

/// Bound of one child LP solved over the master's current columns:
/// `Ok(None)` when the child is infeasible.
pub fn child_bound(
    master: &mut Master<'_>,
    dead: &[bool],
    max_iterations: u64,
    theta_max: TimePoint,
) -> Result<Option<f64>, MasterError> {
    master.set_dead(dead);
    let status = master.solve_limited(max_iterations)?;
    if status != LpStatus::Optimal {
        return Err(MasterError::Lp(crate::lp::LpError::NumericalFailure(format!(
            "child LP stopped with {status:?}"
        ))));
    }
    if master.artificial_value() > 1e-6 || master.objective() > f64::from(theta_max) + 1e-6 {
        return Ok(None);
    }
    Ok(Some(master.objective()))
}

/// Per-candidate improvements of both children over `parent_bound`,
/// infinite for infeasible children and NaN when the LP failed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrongResult {
    pub delta_one: f64,
    pub delta_zero: f64,
}

impl StrongResult {
    pub fn score(&self) -> f64 {
        product_score(self.delta_one, self.delta_zero)
    }
}

/// Solves both children of every candidate over the master's current
/// columns (no pricing). The master's dead mask is restored afterwards.
pub fn strong_branch(
    master: &mut Master<'_>,
    parent_dead: &[bool],
    parent_bound: f64,
    cands: &[(VertexId, VertexId)],
    max_iterations: u64,
) -> Vec<StrongResult> {
    let g = master.graph();
    let theta_max = g.theta_max();
    let mut out = Vec::with_capacity(cands.len());
    for &arc in cands {
        let mut delta = [0.0; 2];
        for (k, direction) in [Direction::ToOne, Direction::ToZero].into_iter().enumerate() {
            let mut dead = parent_dead.to_vec();
            apply_decision(g, BranchDecision { arc, direction }, &mut dead);
            delta[k] = match child_bound(master, &dead, max_iterations, theta_max) {
                Ok(Some(z)) => (z - parent_bound).max(0.0),
                Ok(None) => f64::INFINITY,
                Err(e) => {
                    log::warn!("strong branching on {arc:?} {direction:?}: {e}");
                    f64::NAN
                }
            };
        }
        out.push(StrongResult { delta_one: delta[0], delta_zero: delta[1] });
    }
    master.set_dead(parent_dead);
    out
}

/// Running averages of unit bound gains per base arc.
#[derive(Clone, Debug)]
pub struct Pseudocosts {
    n: usize,
    sum: Vec<f64>,
    count: Vec<u32>,
    total: f64,
    observations: u32,
}

impl Pseudocosts {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            sum: vec![0.0; n * n],
            count: vec![0; n * n],
            total: 0.0,
            observations: 0,
        }
    }

    /// Records the bound gain `delta` of moving `x_uv` by `distance`.
    pub fn observe(&mut self, arc: (VertexId, VertexId), delta: f64, distance: f64) {
        if !delta.is_finite() || distance <= EPS_INTEGRAL {
            return;
        }
        let gain = delta / distance;
        let k = arc.0 * self.n + arc.1;
        self.sum[k] += gain;
        self.count[k] += 1;
        self.total += gain;
        self.observations += 1;
    }

    /// Average unit gain of the arc, the global average when unseen, and 0
    /// before any observation.
    pub fn get(&self, arc: (VertexId, VertexId)) -> f64 {
        let k = arc.0 * self.n + arc.1;
        if self.count[k] > 0 {
            self.sum[k] / f64::from(self.count[k])
        } else if self.observations > 0 {
            self.total / f64::from(self.observations)
        } else {
            0.0
        }
    }
}

/// What a branching node knows when candidates are scored.
#[derive(Clone, Copy, Debug)]
pub struct NodeContext<'a> {
    pub g: &'a TimeExpandedGraph,
    pub flow: &'a CombinedFlow,
    pub lp_value: f64,
    pub incumbent: Option<f64>,
    /// Static travel-time lower bounds.
    pub costs: &'a [Vec<TimePoint>],
    /// Timed arcs currently present as master columns.
    pub has_column: &'a [bool],
    pub pseudocosts: &'a Pseudocosts,
    /// Decisions on the path from the root to this node.
    pub history: &'a [BranchDecision],
}

fn component_size(n: usize, edges: impl Iterator<Item = (VertexId, VertexId)>, v: VertexId) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let root = find(&mut parent, v);
    (0..n).filter(|&w| find(&mut parent, w) == root).count()
}

pub fn extract_features(ctx: &NodeContext<'_>, arc: (VertexId, VertexId)) -> [f64; NUM_FEATURES] {
    let (u, v) = arc;
    let n = ctx.g.n();
    let cost = f64::from(ctx.costs[u][v]);
    let x = ctx.flow.get(u, v);
    let ratio = |d: f64| if d > 0.0 { cost / d } else { GAP_SENTINEL };
    let copies = ctx.g.copies(u, v);
    let priced = if copies.is_empty() {
        0.0
    } else {
        copies.iter().filter(|&&a| ctx.has_column[a]).count() as f64 / copies.len() as f64
    };
    let decided = |dir: Direction| {
        ctx.history.iter().filter(move |d| d.direction == dir).map(|d| d.arc)
    };
    let comp = |w: VertexId, dir: Direction| component_size(n, decided(dir), w) as f64 / n as f64;
    [
        ratio(ctx.lp_value),
        ctx.incumbent.map_or(GAP_SENTINEL, ratio),
        ctx.incumbent.map_or(GAP_SENTINEL, |z| ratio(z - ctx.lp_value)),
        x,
        1.0 - x,
        x.min(1.0 - x),
        copies.len() as f64 / ctx.g.num_arcs() as f64,
        priced,
        ctx.pseudocosts.get(arc),
        comp(u, Direction::ToOne),
        comp(u, Direction::ToZero),
        comp(v, Direction::ToOne),
        comp(v, Direction::ToZero),
    ]
}

/// Candidates of one branching node with their features and strong
/// branching scores.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchingSample {
    pub node: u64,
    pub arcs: Vec<(VertexId, VertexId)>,
    pub features: Vec<[f64; NUM_FEATURES]>,
    pub scores: Vec<f64>,
}

/// Tercile labels: the best third of candidates gets 2, the worst third 0.
pub fn tercile_labels(scores: &[f64]) -> Vec<u8> {
    let c = scores.len();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut labels = vec![0u8; c];
    for (rank, &i) in order.iter().enumerate() {
        labels[i] = (2 - (3 * rank) / c) as u8;
    }
    labels
}

/// Writes `label qid:<node> 1:<f1> ... 13:<f13>` lines.
pub fn write_training_data<W: Write>(samples: &[BranchingSample], mut out: W) -> Result<(), BranchError> {
    for s in samples {
        for (label, features) in tercile_labels(&s.scores).into_iter().zip(&s.features) {
            write!(out, "{label} qid:{}", s.node)?;
            for (k, f) in features.iter().enumerate() {
                write!(out, " {}:{}", k + 1, f)?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingRow {
    pub label: u8,
    pub qid: u64,
    pub features: Vec<f64>,
}

pub fn read_training_data<R: BufRead>(input: R) -> Result<Vec<TrainingRow>, BranchError> {
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let err = |msg: &str| BranchError::DataFormat { line: i + 1, msg: msg.to_string() };
        if line.trim().is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad label"))?;
        let qid = tokens
            .next()
            .and_then(|t| t.strip_prefix("qid:"))
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err("bad qid"))?;
        let mut features = Vec::new();
        for (k, t) in tokens.enumerate() {
            let (idx, val) = t.split_once(':').ok_or_else(|| err("feature without index"))?;
            if idx.parse::<usize>().ok() != Some(k + 1) {
                return Err(err("feature indices must run 1, 2, ..."));
            }
            features.push(val.parse().map_err(|_| err("bad feature value"))?);
        }
        rows.push(TrainingRow { label, qid, features });
    }
    Ok(rows)
}

/// A regression-tree node; features are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode {
    Split { feature: usize, threshold: f64 },
    Leaf(f64),
}

/// A linear model or an additive ensemble of regression trees over the
/// 1-based candidate features.
#[derive(Clone, Debug, PartialEq)]
pub enum ScoringModel {
    Linear(Vec<f64>),
    /// Trees in preorder; a sample goes left when `feature <= threshold`.
    Trees(Vec<Vec<TreeNode>>),
}

impl ScoringModel {
    pub fn score(&self, features: &[f64]) -> f64 {
        match self {
            ScoringModel::Linear(w) => w.iter().zip(features).map(|(a, b)| a * b).sum(),
            ScoringModel::Trees(trees) => trees.iter().map(|t| eval_tree(t, 0, features).0).sum(),
        }
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, BranchError> {
        std::fs::read_to_string(path)?.parse()
    }
}

/// Value of the subtree rooted at `at` and the index just past it.
fn eval_tree(nodes: &[TreeNode], at: usize, x: &[f64]) -> (f64, usize) {
    match nodes[at] {
        TreeNode::Leaf(v) => (v, at + 1),
        TreeNode::Split { feature, threshold } => {
            let left_end = subtree_end(nodes, at + 1);
            if x.get(feature - 1).copied().unwrap_or(0.0) <= threshold {
                (eval_tree(nodes, at + 1, x).0, subtree_end(nodes, left_end))
            } else {
                (eval_tree(nodes, left_end, x).0, subtree_end(nodes, left_end))
            }
        }
    }
}

fn subtree_end(nodes: &[TreeNode], at: usize) -> usize {
    match nodes[at] {
        TreeNode::Leaf(_) => at + 1,
        TreeNode::Split { .. } => subtree_end(nodes, subtree_end(nodes, at + 1)),
    }
}

impl FromStr for ScoringModel {
    type Err = BranchError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = |m: String| BranchError::ModelFormat(m);
        let kind = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .flat_map(str::split_whitespace)
            .next()
            .ok_or_else(|| bad("empty model".into()))?
            .to_string();
        // skip the keyword
        let mut tokens = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .flat_map(str::split_whitespace)
            .skip(1)
            .peekable();
        let mut num = |what: &str| -> Result<f64, BranchError> {
            let t = tokens.next().ok_or_else(|| bad(format!("missing {what}")))?;
            t.parse::<f64>().map_err(|_| bad(format!("bad {what} `{t}`")))
        };
        let count = |v: f64, what: &str| -> Result<usize, BranchError> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(bad(format!("{what} must be a non-negative integer")))
            }
        };
        let model = match kind.as_str() {
            "linear" => {
                let k = count(num("weight count")?, "weight count")?;
                if k > NUM_FEATURES {
                    return Err(bad(format!("{k} weights for {NUM_FEATURES} features")));
                }
                let w = (0..k).map(|_| num("weight")).collect::<Result<Vec<_>, _>>()?;
                ScoringModel::Linear(w)
            }
            "trees" => {
                let t = count(num("tree count")?, "tree count")?;
                let mut trees = Vec::with_capacity(t);
                for _ in 0..t {
                    let mut nodes = Vec::new();
                    let mut open = 1usize;
                    while open > 0 {
                        let Some(word) = tokens.next() else {
                            return Err(bad("tree ends early".into()));
                        };
                        match word {
                            "leaf" => {
                                let t = tokens.next().ok_or_else(|| bad("missing leaf value".into()))?;
                                let v = t.parse().map_err(|_| bad(format!("bad leaf value `{t}`")))?;
                                nodes.push(TreeNode::Leaf(v));
                                open -= 1;
                            }
                            "node" => {
                                let f = tokens.next().ok_or_else(|| bad("missing feature".into()))?;
                                let feature: usize = f.parse().map_err(|_| bad(format!("bad feature `{f}`")))?;
                                if feature == 0 || feature > NUM_FEATURES {
                                    return Err(bad(format!("feature index {feature} out of 1..={NUM_FEATURES}")));
                                }
                                let t = tokens.next().ok_or_else(|| bad("missing threshold".into()))?;
                                let threshold = t.parse().map_err(|_| bad(format!("bad threshold `{t}`")))?;
                                nodes.push(TreeNode::Split { feature, threshold });
                                open += 1;
                            }
                            other => return Err(bad(format!("expected `node` or `leaf`, found `{other}`"))),
                        }
                    }
                    trees.push(nodes);
                }
                ScoringModel::Trees(trees)
            }
            other => return Err(bad(format!("unknown model kind `{other}`"))),
        };
        if let Some(t) = tokens.next() {
            return Err(bad(format!("trailing token `{t}`")));
        }
        Ok(model)
    }
}

/// How the branching candidate is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum BranchingRule {
    MostFractional,
    Strong,
    Learned(ScoringModel),
}

impl fmt::Display for BranchingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchingRule::MostFractional => "mostfrac",
            BranchingRule::Strong => "strong",
            BranchingRule::Learned(_) => "learned",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::{generate, GenConfig};
    use crate::model::Instance;
    use crate::oracle::enumerate_tours;

    #[test]
    fn compound_fixing_counts() {
        let inst = Instance::from_constant(&vec![vec![1; 4]; 4], 12).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        assert_eq!(incompatible_arcs(4, 1, 2).len(), 5);
        let mut dead = vec![false; g.num_arcs()];
        apply_decision(&g, BranchDecision { arc: (1, 2), direction: Direction::ToOne }, &mut dead);
        let mut killed: Vec<(usize, usize)> = g
            .arcs()
            .iter()
            .enumerate()
            .filter(|&(a, _)| dead[a])
            .map(|(_, arc)| arc.base())
            .collect();
        killed.sort_unstable();
        killed.dedup();
        assert_eq!(killed, vec![(0, 2), (1, 0), (1, 3), (2, 1), (3, 2)]);
    }

    #[test]
    fn children_partition_tours() {
        for seed in 0..5 {
            let inst = generate(&GenConfig { n: 6, theta_max: 200, breakpoints: 10, coord_range: 30, seed, ..Default::default() }).unwrap();
            let g = TimeExpandedGraph::build(&inst).unwrap();
            let tours: Vec<_> = enumerate_tours(&inst).unwrap().iter().map(|t| g.embed(t).unwrap()).collect();
            for arc in [(0, 1), (2, 3), (4, 0)] {
                let mut one = vec![false; g.num_arcs()];
                let mut zero = vec![false; g.num_arcs()];
                apply_decision(&g, BranchDecision { arc, direction: Direction::ToOne }, &mut one);
                apply_decision(&g, BranchDecision { arc, direction: Direction::ToZero }, &mut zero);
                for t in &tours {
                    let uses = t.iter().any(|&a| g.arc(a).base() == arc);
                    let alive_one = t.iter().all(|&a| !one[a]);
                    let alive_zero = t.iter().all(|&a| !zero[a]);
                    assert_eq!(alive_one, uses);
                    assert_eq!(alive_zero, !uses);
                }
            }
        }
    }

    #[test]
    fn tercile_rule() {
        assert_eq!(tercile_labels(&[3.0]), vec![2]);
        assert_eq!(tercile_labels(&[1.0, 3.0, 2.0]), vec![0, 2, 1]);
        assert_eq!(tercile_labels(&[1.0, 1.0]), vec![2, 1]);
    }

    #[test]
    fn export_round_trip() {
        let samples = vec![BranchingSample {
            node: 7,
            arcs: vec![(0, 1), (1, 2)],
            features: vec![[0.1, 1.0 / 3.0, 1e6, 0.5, 0.5, 0.5, 1e-300, 0.0, -2.5, 0.25, 0.5, 0.75, 1.0]; 2],
            scores: vec![1.0, f64::INFINITY],
        }];
        let mut buf = Vec::new();
        write_training_data(&samples, &mut buf).unwrap();
        let rows = read_training_data(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].label, 1);
        assert_eq!(rows[1].label, 2);
        for r in &rows {
            assert_eq!(r.qid, 7);
            let bits: Vec<u64> = r.features.iter().map(|f| f.to_bits()).collect();
            let want: Vec<u64> = samples[0].features[0].iter().map(|f| f.to_bits()).collect();
            assert_eq!(bits, want);
        }
    }

    #[test]
    fn linear_models() {
        let zero: ScoringModel = "linear 3 0 0 0".parse().unwrap();
        let scores: Vec<f64> = (0..4).map(|i| zero.score(&[i as f64; NUM_FEATURES])).collect();
        assert_eq!(argmax(&scores), Some(0));
        let slack: ScoringModel = "linear 6\n0 0 0 0 0 1".parse().unwrap();
        assert_eq!(slack.score(&[9.0, 9.0, 9.0, 0.3, 0.7, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 0.3);
        assert!("linear 2 1".parse::<ScoringModel>().is_err());
        assert!("linear 14 0 0 0 0 0 0 0 0 0 0 0 0 0 0".parse::<ScoringModel>().is_err());
        assert!("cubic 1".parse::<ScoringModel>().is_err());
    }

    #[test]
    fn two_tree_model_by_hand() {
        let text = "# two stumps and a deeper tree
trees 2
node 4 0.5
  leaf 1
  leaf -1
node 1 10
  node 6 0.25
    leaf 0.5
    leaf 2
  leaf 3
";
        let m: ScoringModel = text.parse().unwrap();
        let mut a = [0.0; NUM_FEATURES];
        a[3] = 0.4; // x <= 0.5 -> 1
        a[0] = 5.0; // cost <= 10, slack 0 <= 0.25 -> 0.5
        let mut b = a;
        b[3] = 0.9; // -1
        b[5] = 0.3; // slack > 0.25 -> 2
        let mut c = a;
        c[0] = 11.0; // 3
        assert_eq!(m.score(&a), 1.5);
        assert_eq!(m.score(&b), 1.0);
        assert_eq!(m.score(&c), 4.0);
        assert!("trees 1 node 1 0.5 leaf 1".parse::<ScoringModel>().is_err());
        assert!("trees 1 node 0 0.5 leaf 1 leaf 2".parse::<ScoringModel>().is_err());
    }

    #[test]
    fn root_component_ratios() {
        let inst = Instance::from_constant(&vec![vec![1; 4]; 4], 12).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        let mut x = vec![0.0; 16];
        x[1] = 0.5;
        let flow = CombinedFlow::from_matrix(4, x);
        let costs = vec![vec![1; 4]; 4];
        let pc = Pseudocosts::new(4);
        let has = vec![true; g.num_arcs()];
        let mut ctx = NodeContext {
            g: &g,
            flow: &flow,
            lp_value: 4.0,
            incumbent: None,
            costs: &costs,
            has_column: &has,
            pseudocosts: &pc,
            history: &[],
        };
        let f = extract_features(&ctx, (0, 1));
        assert_eq!(&f[9..], &[0.25; 4]);
        assert_eq!(f[3..6], [0.5, 0.5, 0.5]);
        assert_eq!(f[0], 0.25);
        assert_eq!(f[2], GAP_SENTINEL);
        assert_eq!(f[7], 1.0);
        let hist = [BranchDecision { arc: (1, 2), direction: Direction::ToOne }];
        ctx.history = &hist;
        ctx.incumbent = Some(6.0);
        let f = extract_features(&ctx, (0, 1));
        assert_eq!(f[9], 0.25);
        assert_eq!(f[10], 0.25);
        assert_eq!(f[11], 0.5);
        assert_eq!(f[2], 0.5);
    }

    #[test]
    fn pseudocost_defaults() {
        let mut p = Pseudocosts::new(3);
        assert_eq!(p.get((0, 1)), 0.0);
        p.observe((0, 1), 2.0, 0.5);
        p.observe((1, 2), 1.0, 1.0);
        assert_eq!(p.get((0, 1)), 4.0);
        assert_eq!(p.get((2, 0)), 2.5);
    }

    #[test]
    fn product_score_conventions() {
        assert_eq!(product_score(f64::INFINITY, f64::INFINITY), f64::INFINITY);
        assert_eq!(product_score(2.0, 2.0), (2.0 + ZETA) * (2.0 + ZETA));
        assert_eq!(product_score(f64::NAN, 1.0), f64::NEG_INFINITY);
    }
}

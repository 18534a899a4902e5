//! Instances, travel-time evaluation and arrival-time semantics.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use thiserror::Error;

/// Index of a vertex of the base graph. The source is always `0`.
pub type VertexId = usize;

/// A point in the discrete time horizon `0..=theta_max`.
pub type TimePoint = u32;

/// The source vertex `s`.
pub const SOURCE: VertexId = 0;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("walk is malformed at arc {index}: {reason}")]
    MalformedWalk { index: usize, reason: &'static str },
    #[error("travel time queried at {theta}, beyond horizon {theta_max}")]
    BeyondHorizon { theta: TimePoint, theta_max: TimePoint },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A travel-time function stored as a dense table over `0..=theta_max`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TravelTimeFn(Vec<TimePoint>);

impl TravelTimeFn {
    pub fn new(table: Vec<TimePoint>) -> Result<Self, ModelError> {
        if table.is_empty() {
            return Err(ModelError::Invalid("empty travel-time table".into()));
        }
        if let Some(pos) = table.iter().position(|&c| c == 0) {
            return Err(ModelError::Invalid(format!(
                "travel time must be positive, got 0 at theta = {pos}"
            )));
        }
        Ok(Self(table))
    }

    pub fn constant(value: TimePoint, theta_max: TimePoint) -> Result<Self, ModelError> {
        Self::new(vec![value; theta_max as usize + 1])
    }

    pub fn at(&self, theta: TimePoint) -> Result<TimePoint, ModelError> {
        self.get(theta).ok_or(ModelError::BeyondHorizon {
            theta,
            theta_max: self.horizon(),
        })
    }

    #[inline]
    pub fn get(&self, theta: TimePoint) -> Option<TimePoint> {
        self.0.get(theta as usize).copied()
    }

    pub fn horizon(&self) -> TimePoint {
        (self.0.len() - 1) as TimePoint
    }

    pub fn table(&self) -> &[TimePoint] {
        &self.0
    }

    pub fn min(&self) -> TimePoint {
        *self.0.iter().min().expect("non-empty table")
    }

    pub fn max(&self) -> TimePoint {
        *self.0.iter().max().expect("non-empty table")
    }

    /// Restrict the table to `0..=theta_max`.
    pub fn truncated(&self, theta_max: TimePoint) -> Self {
        Self(self.0[..=theta_max as usize].to_vec())
    }
}

/// A TDTSP instance on a complete digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    theta_max: TimePoint,
    /// Row-major `n x n`; diagonal entries are `None`.
    costs: Vec<Option<TravelTimeFn>>,
    pub name: String,
    pub seed: Option<u64>,
}

impl Instance {
    /// Builds an instance from a row-major matrix of travel-time functions.
    /// Diagonal entries must be `None`, every other entry present with a
    /// table of length `theta_max + 1`.
    pub fn new(
        n: usize,
        theta_max: TimePoint,
        costs: Vec<Option<TravelTimeFn>>,
    ) -> Result<Self, ModelError> {
        if n < 2 {
            return Err(ModelError::Invalid(format!("need at least 2 vertices, got {n}")));
        }
        if costs.len() != n * n {
            return Err(ModelError::Invalid(format!(
                "expected {} cost entries, got {}",
                n * n,
                costs.len()
            )));
        }
        for u in 0..n {
            for v in 0..n {
                match (&costs[u * n + v], u == v) {
                    (Some(_), true) => {
                        return Err(ModelError::Invalid(format!("self-loop ({u}, {u}) present")))
                    }
                    (None, false) => {
                        return Err(ModelError::Invalid(format!("missing arc ({u}, {v})")))
                    }
                    (Some(f), false) if f.horizon() != theta_max => {
                        return Err(ModelError::Invalid(format!(
                            "arc ({u}, {v}) has {} entries, expected {}",
                            f.table().len(),
                            theta_max as usize + 1
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(Self {
            n,
            theta_max,
            costs,
            name: String::new(),
            seed: None,
        })
    }

    /// Instance with time-independent travel times `matrix[u][v]`.
    pub fn from_constant(matrix: &[Vec<TimePoint>], theta_max: TimePoint) -> Result<Self, ModelError> {
        let n = matrix.len();
        let mut costs = Vec::with_capacity(n * n);
        for (u, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::Invalid("cost matrix is not square".into()));
            }
            for (v, &c) in row.iter().enumerate() {
                costs.push(if u == v {
                    None
                } else {
                    Some(TravelTimeFn::constant(c, theta_max)?)
                });
            }
        }
        Self::new(n, theta_max, costs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta_max(&self) -> TimePoint {
        self.theta_max
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n
    }

    /// The travel-time function of arc `(u, v)`.
    pub fn arc(&self, u: VertexId, v: VertexId) -> &TravelTimeFn {
        self.costs[u * self.n + v]
            .as_ref()
            .unwrap_or_else(|| panic!("no arc ({u}, {v})"))
    }

    /// `c_uv(theta)`, or `None` beyond the horizon.
    #[inline]
    pub fn travel_time(&self, u: VertexId, v: VertexId, theta: TimePoint) -> Option<TimePoint> {
        self.arc(u, v).get(theta)
    }

    /// Arrival time when departing `u` towards `v` at `theta`; `None` if the
    /// departure or the arrival lies beyond the horizon.
    #[inline]
    pub fn arrive(&self, u: VertexId, v: VertexId, theta: TimePoint) -> Option<TimePoint> {
        let t = theta + self.travel_time(u, v, theta)?;
        (t <= self.theta_max).then_some(t)
    }

    /// Static lower bound `min_theta c_uv(theta)`.
    pub fn min_travel_time(&self, u: VertexId, v: VertexId) -> TimePoint {
        self.arc(u, v).min()
    }

    /// Copy of the instance with every table cut back to `0..=theta_max`.
    pub fn with_horizon(&self, theta_max: TimePoint) -> Result<Self, ModelError> {
        if theta_max > self.theta_max {
            return Err(ModelError::Invalid(format!(
                "cannot extend horizon from {} to {theta_max}",
                self.theta_max
            )));
        }
        let costs = self
            .costs
            .iter()
            .map(|c| c.as_ref().map(|f| f.truncated(theta_max)))
            .collect();
        let mut inst = Self::new(self.n, theta_max, costs)?;
        inst.name = self.name.clone();
        inst.seed = self.seed;
        Ok(inst)
    }

    /// Writes the instance in the line-oriented text format.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<(), ModelError> {
        writeln!(out, "TDTSP {} {}", self.n, self.theta_max)?;
        let mut line = String::new();
        for u in 0..self.n {
            for v in 0..self.n {
                if u == v {
                    continue;
                }
                line.clear();
                write!(line, "{u} {v}").unwrap();
                for c in self.arc(u, v).table() {
                    write!(line, " {c}").unwrap();
                }
                writeln!(out, "{line}")?;
            }
        }
        if !self.name.is_empty() {
            writeln!(out, "# name: {}", self.name)?;
        }
        if let Some(seed) = self.seed {
            writeln!(out, "# seed: {seed}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self, ModelError> {
        let perr = |line: usize, message: String| ModelError::Parse { line, message };
        let mut lines = input.lines().enumerate();
        let (n, theta_max) = loop {
            let (no, line) = lines.next().ok_or_else(|| perr(1, "empty input".into()))?;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            if tok.next() != Some("TDTSP") {
                return Err(perr(no + 1, "expected header `TDTSP <n> <theta_max>`".into()));
            }
            let n: usize = parse_tok(tok.next(), no + 1, "n")?;
            let t: TimePoint = parse_tok(tok.next(), no + 1, "theta_max")?;
            if tok.next().is_some() {
                return Err(perr(no + 1, "trailing tokens in header".into()));
            }
            break (n, t);
        };
        if n < 2 {
            return Err(perr(1, format!("need at least 2 vertices, got {n}")));
        }
        let mut costs: Vec<Option<TravelTimeFn>> = vec![None; n * n];
        let mut name = String::new();
        let mut seed = None;
        let mut in_comments = false;
        for (no, line) in lines {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                in_comments = true;
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("name:") {
                    name = v.trim().to_string();
                } else if let Some(v) = comment.strip_prefix("seed:") {
                    seed = v.trim().parse().ok();
                }
                continue;
            }
            if in_comments {
                return Err(perr(no + 1, "arc line after trailing comments".into()));
            }
            let mut tok = trimmed.split_whitespace();
            let u: usize = parse_tok(tok.next(), no + 1, "tail")?;
            let v: usize = parse_tok(tok.next(), no + 1, "head")?;
            if u >= n || v >= n || u == v {
                return Err(perr(no + 1, format!("invalid arc ({u}, {v})")));
            }
            let table = tok
                .map(|t| t.parse::<TimePoint>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| perr(no + 1, format!("bad travel time: {e}")))?;
            if table.len() != theta_max as usize + 1 {
                return Err(perr(
                    no + 1,
                    format!(
                        "arc ({u}, {v}) has {} entries, expected {}",
                        table.len(),
                        theta_max as usize + 1
                    ),
                ));
            }
            if costs[u * n + v].is_some() {
                return Err(perr(no + 1, format!("duplicate arc ({u}, {v})")));
            }
            costs[u * n + v] =
                Some(TravelTimeFn::new(table).map_err(|e| perr(no + 1, e.to_string()))?);
        }
        let mut inst = Self::new(n, theta_max, costs)?;
        inst.name = name;
        inst.seed = seed;
        Ok(inst)
    }

    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        Self::read_from(text.as_bytes())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, ModelError> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<(), ModelError> {
        let file = std::fs::File::create(path)?;
        let mut out = std::io::BufWriter::new(file);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }
}

fn parse_tok<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, ModelError>
where
    T::Err: std::fmt::Display,
{
    let tok = tok.ok_or_else(|| ModelError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse().map_err(|e| ModelError::Parse {
        line,
        message: format!("bad {what} `{tok}`: {e}"),
    })
}

/// Arrival time of a walk starting at the source at time 0.
///
/// Returns `Ok(None)` if some arrival along the walk exceeds the horizon.
pub fn arrival_time(
    inst: &Instance,
    arcs: &[(VertexId, VertexId)],
) -> Result<Option<TimePoint>, ModelError> {
    let Some(&(first, _)) = arcs.first() else {
        return Err(ModelError::MalformedWalk {
            index: 0,
            reason: "empty walk",
        });
    };
    if first != SOURCE {
        return Err(ModelError::MalformedWalk {
            index: 0,
            reason: "walk does not start at the source",
        });
    }
    let mut at = SOURCE;
    let mut theta: TimePoint = 0;
    let mut feasible = true;
    for (index, &(u, v)) in arcs.iter().enumerate() {
        if u != at {
            return Err(ModelError::MalformedWalk {
                index,
                reason: "arc does not continue the walk",
            });
        }
        if u == v || v >= inst.n() {
            return Err(ModelError::MalformedWalk {
                index,
                reason: "not an arc of the instance",
            });
        }
        if feasible {
            match inst.arrive(u, v, theta) {
                Some(t) => theta = t,
                None => feasible = false,
            }
        }
        at = v;
    }
    Ok(feasible.then_some(theta))
}

/// A Hamiltonian tour starting and ending at the source, with its arrival
/// times at every visited vertex (the last one is the return to the source).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tour {
    order: Vec<VertexId>,
    arrivals: Vec<TimePoint>,
}

impl Tour {
    /// Evaluates the visiting order `order` (which must start at the source
    /// and be a permutation of all vertices). Returns `Ok(None)` if the tour
    /// exceeds the horizon.
    pub fn evaluate(inst: &Instance, order: Vec<VertexId>) -> Result<Option<Self>, ModelError> {
        let n = inst.n();
        if order.len() != n || order.first() != Some(&SOURCE) {
            return Err(ModelError::Invalid(format!(
                "tour order must list all {n} vertices starting at the source"
            )));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(ModelError::Invalid(format!("vertex {v} repeated or out of range")));
            }
        }
        let mut arrivals = Vec::with_capacity(n);
        let mut theta = 0;
        for i in 0..n {
            let (u, v) = (order[i], order[(i + 1) % n]);
            match inst.arrive(u, v, theta) {
                Some(t) => theta = t,
                None => return Ok(None),
            }
            arrivals.push(theta);
        }
        Ok(Some(Self { order, arrivals }))
    }

    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn arrivals(&self) -> &[TimePoint] {
        &self.arrivals
    }

    /// Arrival time back at the source.
    pub fn arrival(&self) -> TimePoint {
        *self.arrivals.last().expect("tour has at least one arc")
    }

    /// Base arcs of the tour in visiting order.
    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        let n = self.order.len();
        (0..n).map(move |i| (self.order[i], self.order[(i + 1) % n]))
    }

    /// Departure times, one per arc of [`Tour::arcs`].
    pub fn departures(&self) -> impl Iterator<Item = TimePoint> + '_ {
        std::iter::once(0).chain(self.arrivals[..self.arrivals.len() - 1].iter().copied())
    }

    /// Recomputes the arrival times against `inst`.
    pub fn revalidate(&self, inst: &Instance) -> bool {
        let arcs: Vec<_> = self.arcs().collect();
        let Ok(Some(total)) = arrival_time(inst, &arcs) else {
            return false;
        };
        matches!(Self::evaluate(inst, self.order.clone()), Ok(Some(t)) if t == *self)
            && total == self.arrival()
    }
}

/// Witness `earlier + c(earlier) > later + c(later)` for `earlier < later`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FifoViolation {
    pub tail: VertexId,
    pub head: VertexId,
    pub earlier: TimePoint,
    pub later: TimePoint,
}

/// Reports FIFO violations. `theta + c(theta)` is non-decreasing iff it is
/// non-decreasing between consecutive time points, so the witnesses are
/// consecutive pairs.
pub fn check_fifo(inst: &Instance) -> Vec<FifoViolation> {
    let mut out = Vec::new();
    for u in inst.vertices() {
        for v in inst.vertices().filter(|&v| v != u) {
            let table = inst.arc(u, v).table();
            for theta in 1..table.len() {
                let before = (theta - 1) as u64 + table[theta - 1] as u64;
                let after = theta as u64 + table[theta] as u64;
                if before > after {
                    out.push(FifoViolation {
                        tail: u,
                        head: v,
                        earlier: theta as TimePoint - 1,
                        later: theta as TimePoint,
                    });
                }
            }
        }
    }
    out
}

/// Witness that the direct arc `(u, w)` departing at `theta` is slower than
/// the detour through `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriangleViolation {
    pub u: VertexId,
    pub v: VertexId,
    pub w: VertexId,
    pub theta: TimePoint,
}

/// Exhaustive check of the time-dependent triangle inequality over all
/// distinct triples and departure times whose first leg stays in the horizon.
pub fn check_td_triangle(inst: &Instance) -> Vec<TriangleViolation> {
    let mut out = Vec::new();
    let n = inst.n();
    for u in 0..n {
        for v in (0..n).filter(|&v| v != u) {
            let uv = inst.arc(u, v).table();
            for w in (0..n).filter(|&w| w != u && w != v) {
                let uw = inst.arc(u, w).table();
                let vw = inst.arc(v, w);
                for theta in 0..=inst.theta_max() {
                    let mid = theta + uv[theta as usize];
                    let Some(second) = vw.get(mid) else {
                        continue;
                    };
                    if uw[theta as usize] > uv[theta as usize] + second {
                        out.push(TriangleViolation { u, v, w, theta });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(n: usize, c: TimePoint, theta_max: TimePoint) -> Instance {
        Instance::from_constant(&vec![vec![c; n]; n], theta_max).unwrap()
    }

    #[test]
    fn unit_costs_walk_arrives_after_three() {
        let inst = constant(3, 1, 10);
        assert_eq!(arrival_time(&inst, &[(0, 1), (1, 2), (2, 0)]).unwrap(), Some(3));
    }

    #[test]
    fn single_arc_uses_cost_at_zero() {
        let mut m = vec![vec![1; 2]; 2];
        m[0][1] = 5;
        let inst = Instance::from_constant(&m, 10).unwrap();
        assert_eq!(arrival_time(&inst, &[(0, 1)]).unwrap(), Some(5));
    }

    #[test]
    fn walk_beyond_horizon_is_infeasible() {
        let inst = constant(3, 4, 10);
        assert_eq!(arrival_time(&inst, &[(0, 1), (1, 2), (2, 0)]).unwrap(), None);
    }

    #[test]
    fn broken_walks_are_rejected() {
        let inst = constant(3, 1, 10);
        assert!(matches!(
            arrival_time(&inst, &[(0, 1), (2, 0)]),
            Err(ModelError::MalformedWalk { index: 1, .. })
        ));
        assert!(arrival_time(&inst, &[(1, 2)]).is_err());
        assert!(arrival_time(&inst, &[]).is_err());
    }

    #[test]
    fn evaluation_beyond_horizon_is_an_error() {
        let f = TravelTimeFn::new(vec![3, 3]).unwrap();
        assert!(f.at(1).is_ok());
        assert!(matches!(f.at(2), Err(ModelError::BeyondHorizon { theta: 2, theta_max: 1 })));
        assert!(TravelTimeFn::new(vec![1, 0]).is_err());
    }

    #[test]
    fn constant_costs_are_fifo() {
        assert!(check_fifo(&constant(4, 7, 30)).is_empty());
    }

    #[test]
    fn decreasing_table_violates_fifo() {
        let mut inst = constant(2, 1, 1);
        inst.costs[1] = Some(TravelTimeFn::new(vec![5, 3]).unwrap());
        assert_eq!(
            check_fifo(&inst),
            vec![FifoViolation { tail: 0, head: 1, earlier: 0, later: 1 }]
        );
    }

    #[test]
    fn long_direct_arc_violates_triangle() {
        let mut m = vec![vec![1; 3]; 3];
        m[0][2] = 3;
        let inst = Instance::from_constant(&m, 10).unwrap();
        let violations = check_td_triangle(&inst);
        assert!(violations.contains(&TriangleViolation { u: 0, v: 1, w: 2, theta: 0 }));
        assert!(check_td_triangle(&constant(4, 2, 20)).is_empty());
    }

    #[test]
    fn text_format_round_trip() {
        let mut m = vec![vec![2; 3]; 3];
        m[1][2] = 4;
        let mut inst = Instance::from_constant(&m, 3).unwrap();
        inst.name = "tiny".into();
        inst.seed = Some(9);
        let text = inst.to_text();
        assert!(text.starts_with("TDTSP 3 3\n0 1 2 2 2 2\n"));
        assert_eq!(Instance::from_text(&text).unwrap(), inst);
    }

    #[test]
    fn parser_rejects_missing_pairs_and_bad_lengths() {
        let good = "TDTSP 2 1\n0 1 1 1\n1 0 2 2\n";
        assert!(Instance::from_text(good).is_ok());
        assert!(Instance::from_text("TDTSP 2 1\n0 1 1 1\n").is_err());
        assert!(Instance::from_text("TDTSP 2 1\n0 1 1 1\n1 0 2\n").is_err());
        assert!(Instance::from_text("TDTSP 2 1\n0 1 1 1\n0 1 1 1\n1 0 2 2\n").is_err());
        assert!(Instance::from_text("TDTSP 2 1\n0 1 1 1\n# c\n1 0 2 2\n").is_err());
    }

    #[test]
    fn tour_arrivals_follow_recursion() {
        let inst = constant(4, 2, 20);
        let tour = Tour::evaluate(&inst, vec![0, 2, 1, 3]).unwrap().unwrap();
        assert_eq!(tour.arrivals(), &[2, 4, 6, 8]);
        assert_eq!(tour.departures().collect::<Vec<_>>(), vec![0, 2, 4, 6]);
        assert!(tour.revalidate(&inst));
        assert!(Tour::evaluate(&inst, vec![1, 0, 2, 3]).is_err());
        assert!(Tour::evaluate(&inst, vec![0, 1, 1, 3]).is_err());
    }
}

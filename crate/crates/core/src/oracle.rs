//! Exact solvers for small instances.

use thiserror::Error;

use crate::model::{self, Instance, TimePoint, Tour, VertexId, SOURCE};

pub const BRUTE_MAX_VERTICES: usize = 11;
pub const DP_MAX_VERTICES: usize = 22;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance with {n} vertices exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("dynamic program requires FIFO travel times")]
    NotFifo,
}

/// Enumerates visiting orders depth-first (lexicographic) and returns the
/// first optimal tour, or `None` if no tour fits in the horizon.
pub fn solve_bruteforce(inst: &Instance) -> Result<Option<Tour>, OracleError> {
    let n = inst.n();
    if n > BRUTE_MAX_VERTICES {
        return Err(OracleError::TooLarge { n, limit: BRUTE_MAX_VERTICES });
    }
    let mut best: Option<(TimePoint, Vec<VertexId>)> = None;
    for_each_tour(inst, |order, arrival| {
        if best.as_ref().map_or(true, |(b, _)| arrival < *b) {
            best = Some((arrival, order.to_vec()));
        }
    });
    Ok(best.map(|(_, order)| {
        Tour::evaluate(inst, order)
            .expect("valid permutation")
            .expect("feasible by construction")
    }))
}

/// Every tour that fits in the horizon.
pub fn enumerate_tours(inst: &Instance) -> Result<Vec<Tour>, OracleError> {
    let n = inst.n();
    if n > BRUTE_MAX_VERTICES {
        return Err(OracleError::TooLarge { n, limit: BRUTE_MAX_VERTICES });
    }
    let mut out = Vec::new();
    for_each_tour(inst, |order, _| {
        out.push(
            Tour::evaluate(inst, order.to_vec())
                .expect("valid permutation")
                .expect("feasible by construction"),
        )
    });
    Ok(out)
}

fn for_each_tour(inst: &Instance, mut visit: impl FnMut(&[VertexId], TimePoint)) {
    fn rec(
        inst: &Instance,
        order: &mut Vec<VertexId>,
        used: &mut [bool],
        theta: TimePoint,
        visit: &mut dyn FnMut(&[VertexId], TimePoint),
    ) {
        let last = *order.last().unwrap();
        if order.len() == inst.n() {
            if let Some(t) = inst.arrive(last, SOURCE, theta) {
                visit(order, t);
            }
            return;
        }
        for v in 1..inst.n() {
            if used[v] {
                continue;
            }
            // a prefix beyond the horizon cannot be completed
            let Some(t) = inst.arrive(last, v, theta) else {
                continue;
            };
            used[v] = true;
            order.push(v);
            rec(inst, order, used, t, visit);
            order.pop();
            used[v] = false;
        }
    }
    let mut used = vec![false; inst.n()];
    used[SOURCE] = true;
    rec(inst, &mut vec![SOURCE], &mut used, 0, &mut visit);
}

const UNREACHED: TimePoint = TimePoint::MAX;

/// Held-Karp table: earliest arrival at `last` after visiting exactly the
/// set `subset` (a bitmask over the non-source vertices, bit `v - 1`).
pub struct DpTable {
    n: usize,
    values: Vec<TimePoint>,
}

impl DpTable {
    fn index(&self, subset: usize, last: VertexId) -> usize {
        subset * (self.n - 1) + (last - 1)
    }

    /// `C(S, v)` for `S` given as a bitmask over non-source vertices; `None`
    /// if the state is unreachable within the horizon.
    pub fn get(&self, subset: usize, last: VertexId) -> Option<TimePoint> {
        if last == SOURCE || subset & (1 << (last - 1)) == 0 {
            return None;
        }
        let v = self.values[self.index(subset, last)];
        (v != UNREACHED).then_some(v)
    }
}

/// Time-dependent Held-Karp over an arrival function. Returns the table and
/// the optimal order (ties: smallest last vertex, then smallest predecessor).
fn held_karp<F>(n: usize, arrive: F) -> (DpTable, Option<(Vec<VertexId>, TimePoint)>)
where
    F: Fn(VertexId, VertexId, TimePoint) -> Option<TimePoint>,
{
    let m = n - 1;
    let full = (1usize << m) - 1;
    let mut table = DpTable {
        n,
        values: vec![UNREACHED; (full + 1) * m],
    };
    for v in 1..n {
        if let Some(t) = arrive(SOURCE, v, 0) {
            let idx = table.index(1 << (v - 1), v);
            table.values[idx] = t;
        }
    }
    for subset in 1..=full {
        for u in 1..n {
            if subset & (1 << (u - 1)) == 0 {
                continue;
            }
            let at = table.values[table.index(subset, u)];
            if at == UNREACHED {
                continue;
            }
            for v in 1..n {
                if subset & (1 << (v - 1)) != 0 {
                    continue;
                }
                if let Some(t) = arrive(u, v, at) {
                    let idx = table.index(subset | (1 << (v - 1)), v);
                    if t < table.values[idx] {
                        table.values[idx] = t;
                    }
                }
            }
        }
    }

    let mut best: Option<(TimePoint, VertexId)> = None;
    for v in 1..n {
        if let Some(at) = table.get(full, v) {
            if let Some(t) = arrive(v, SOURCE, at) {
                if best.map_or(true, |(b, _)| t < b) {
                    best = Some((t, v));
                }
            }
        }
    }
    let Some((value, mut last)) = best else {
        return (table, None);
    };
    let mut rev = vec![last];
    let mut subset = full;
    while subset.count_ones() > 1 {
        let target = table.get(subset, last).unwrap();
        let prev_set = subset & !(1 << (last - 1));
        let pred = (1..n)
            .find(|&u| {
                table
                    .get(prev_set, u)
                    .and_then(|at| arrive(u, last, at))
                    .is_some_and(|t| t == target)
            })
            .expect("DP state has a predecessor");
        rev.push(pred);
        subset = prev_set;
        last = pred;
    }
    rev.push(SOURCE);
    rev.reverse();
    (table, Some((rev, value)))
}

/// Time-dependent Held-Karp dynamic program for FIFO instances.
pub fn solve_dp(inst: &Instance) -> Result<Option<Tour>, OracleError> {
    Ok(solve_dp_with_table(inst)?.1)
}

pub fn solve_dp_with_table(inst: &Instance) -> Result<(DpTable, Option<Tour>), OracleError> {
    let n = inst.n();
    if n > DP_MAX_VERTICES {
        return Err(OracleError::TooLarge { n, limit: DP_MAX_VERTICES });
    }
    if !model::check_fifo(inst).is_empty() {
        return Err(OracleError::NotFifo);
    }
    let (table, best) = held_karp(n, |u, v, t| inst.arrive(u, v, t));
    let tour = best.map(|(order, value)| {
        let tour = Tour::evaluate(inst, order).expect("valid order").expect("feasible");
        debug_assert_eq!(tour.arrival(), value);
        tour
    });
    Ok((table, tour))
}

/// Optimal tour for a static cost matrix, with its length.
///
/// # Panics
/// If the matrix has more than [`DP_MAX_VERTICES`] rows.
pub fn solve_static_dp(costs: &[Vec<TimePoint>]) -> (Vec<VertexId>, u64) {
    let n = costs.len();
    assert!(n <= DP_MAX_VERTICES && n >= 2);
    let (_, best) = held_karp(n, |u, v, t| t.checked_add(costs[u][v]));
    let (order, value) = best.expect("static tours always exist");
    (order, value as u64)
}

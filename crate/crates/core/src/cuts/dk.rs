//! D_k+ inequalities over vertex sequences `(v_1, ..., v_k)`:
//!
//! `sum_{j<k} x(v_j, v_j+1) + x(v_k, v_1) + 2 sum_{j>=3} x(v_1, v_j)
//!  + sum_{j>=4} sum_{3<=i<j} x(v_j, v_i) <= k - 1`.

use super::{Cut, CutFamily, EPS_CUT};
use crate::expand::TimeExpandedGraph;
use crate::lp::Sense;
use crate::master::CombinedFlow;
use crate::model::VertexId;

/// Base-arc coefficients of the inequality for `seq`.
pub fn dk_terms(seq: &[VertexId]) -> Vec<((VertexId, VertexId), f64)> {
    let k = seq.len();
    let mut terms = Vec::new();
    for j in 0..k - 1 {
        terms.push(((seq[j], seq[j + 1]), 1.0));
    }
    terms.push(((seq[k - 1], seq[0]), 1.0));
    for j in 2..k {
        terms.push(((seq[0], seq[j]), 2.0));
    }
    for j in 3..k {
        for i in 2..j {
            terms.push(((seq[j], seq[i]), 1.0));
        }
    }
    terms
}

pub fn dk_lhs(flow: &CombinedFlow, seq: &[VertexId]) -> f64 {
    dk_terms(seq).iter().map(|&((u, v), c)| c * flow.get(u, v)).sum()
}

pub fn dk_cut(g: &TimeExpandedGraph, seq: &[VertexId]) -> Cut {
    let mut coefs = Vec::new();
    for ((u, v), c) in dk_terms(seq) {
        coefs.extend(g.copies(u, v).iter().map(|&a| (a, c)));
    }
    Cut::new(CutFamily::Dk, Sense::Le, (seq.len() - 1) as f64, coefs)
}

/// All sequences of length `2..=kmax` (and `< n`) whose inequality is
/// violated by more than [`EPS_CUT`], found by depth-first search with an
/// optimistic bound on the remaining gain.
pub fn violated_sequences(flow: &CombinedFlow, kmax: usize) -> Vec<(Vec<VertexId>, f64)> {
    let n = flow.n();
    let kmax = kmax.min(n.saturating_sub(1));
    let mut out = Vec::new();
    if kmax < 2 {
        return out;
    }
    let max_in: Vec<f64> = (0..n)
        .map(|w| (0..n).map(|u| flow.get(u, w)).fold(0.0, f64::max))
        .collect();
    let out_deg: Vec<f64> = (0..n).map(|w| flow.out_degree(w)).collect();
    let mut search = Search {
        flow,
        n,
        kmax,
        max_in,
        out_deg,
        seq: Vec::with_capacity(kmax),
        used: vec![false; n],
        out: &mut out,
    };
    for v1 in 0..n {
        search.seq.push(v1);
        search.used[v1] = true;
        search.extend(0.0);
        search.used[v1] = false;
        search.seq.pop();
    }
    out
}

struct Search<'a> {
    flow: &'a CombinedFlow,
    n: usize,
    kmax: usize,
    max_in: Vec<f64>,
    out_deg: Vec<f64>,
    seq: Vec<VertexId>,
    used: Vec<bool>,
    out: &'a mut Vec<(Vec<VertexId>, f64)>,
}

impl Search<'_> {
    /// `partial` is the left-hand side without the closing arc.
    fn extend(&mut self, partial: f64) {
        let k = self.seq.len();
        let v1 = self.seq[0];
        if k >= 2 {
            let closing = self.flow.get(self.seq[k - 1], v1);
            let violation = partial + closing - (k - 1) as f64;
            if violation > EPS_CUT {
                self.out.push((self.seq.clone(), violation));
            }
        }
        if k == self.kmax {
            return;
        }
        // each further vertex adds at most max_in + 2 x(v1, w) + out - 1
        let mut gains: Vec<f64> = (0..self.n)
            .filter(|&w| !self.used[w])
            .map(|w| self.max_in[w] + 2.0 * self.flow.get(v1, w) + self.out_deg[w] - 1.0)
            .filter(|&g| g > 0.0)
            .collect();
        gains.sort_by(|a, b| b.total_cmp(a));
        let future: f64 = gains.iter().take(self.kmax - k).sum();
        let closing_max = self.max_in[v1];
        if partial - (k as f64 - 1.0) + future + closing_max <= EPS_CUT {
            return;
        }
        let last = self.seq[k - 1];
        for w in 0..self.n {
            if self.used[w] {
                continue;
            }
            let mut inc = self.flow.get(last, w);
            if k + 1 >= 3 {
                inc += 2.0 * self.flow.get(v1, w);
            }
            if k + 1 >= 4 {
                inc += self.seq[2..].iter().map(|&vi| self.flow.get(w, vi)).sum::<f64>();
            }
            self.seq.push(w);
            self.used[w] = true;
            self.extend(partial + inc);
            self.used[w] = false;
            self.seq.pop();
        }
    }
}

pub fn separate_dk(g: &TimeExpandedGraph, flow: &CombinedFlow, kmax: usize) -> Vec<Cut> {
    violated_sequences(flow, kmax)
        .into_iter()
        .map(|(seq, _)| dk_cut(g, &seq))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn two_cycle_example() {
        let mut x = vec![0.0; 16];
        x[1 * 4 + 2] = 0.6;
        x[2 * 4 + 1] = 0.6;
        let flow = CombinedFlow::from_matrix(4, x);
        let found = violated_sequences(&flow, 2);
        assert!(!found.is_empty());
        for (seq, v) in &found {
            assert_eq!(seq.len(), 2);
            assert!((v - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn tour_is_never_cut() {
        let n = 6;
        let order = [0usize, 3, 1, 5, 2, 4];
        let mut x = vec![0.0; n * n];
        for i in 0..n {
            x[order[i] * n + order[(i + 1) % n]] = 1.0;
        }
        let flow = CombinedFlow::from_matrix(n, x);
        assert!(violated_sequences(&flow, 5).is_empty());
    }

    fn exhaustive_best(flow: &CombinedFlow, kmax: usize) -> f64 {
        let n = flow.n();
        let mut best = f64::NEG_INFINITY;
        fn rec(flow: &CombinedFlow, seq: &mut Vec<usize>, kmax: usize, best: &mut f64) {
            let n = flow.n();
            if seq.len() >= 2 {
                // independent evaluation straight from the definition
                let k = seq.len();
                let mut lhs = flow.get(seq[k - 1], seq[0]);
                for j in 0..k - 1 {
                    lhs += flow.get(seq[j], seq[j + 1]);
                }
                for j in 2..k {
                    lhs += 2.0 * flow.get(seq[0], seq[j]);
                    for i in 2..j {
                        lhs += flow.get(seq[j], seq[i]);
                    }
                }
                *best = best.max(lhs - (k - 1) as f64);
            }
            if seq.len() == kmax {
                return;
            }
            for w in 0..n {
                if !seq.contains(&w) {
                    seq.push(w);
                    rec(flow, seq, kmax, best);
                    seq.pop();
                }
            }
        }
        for v in 0..n {
            rec(flow, &mut vec![v], kmax.min(n - 1), &mut best);
        }
        best
    }

    #[test]
    fn pruned_search_matches_exhaustive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [5usize, 6] {
            for _ in 0..40 {
                // random doubly-stochastic-ish point: average of permutations
                let mut x = vec![0.0; n * n];
                let perms = rng.gen_range(1..4);
                for _ in 0..perms {
                    let mut p: Vec<usize> = (0..n).collect();
                    for i in (1..n).rev() {
                        p.swap(i, rng.gen_range(0..=i));
                    }
                    for u in 0..n {
                        if p[u] != u {
                            x[u * n + p[u]] += 1.0 / perms as f64;
                        }
                    }
                }
                let flow = CombinedFlow::from_matrix(n, x);
                let best = exhaustive_best(&flow, 5);
                let found = violated_sequences(&flow, 5);
                let pruned = found.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max);
                if best > EPS_CUT {
                    assert!((pruned - best).abs() < 1e-9, "n={n} best={best} pruned={pruned}");
                } else {
                    assert!(found.is_empty());
                }
            }
        }
    }
}

use super::factor::Workspace;
use super::{LpError, LpModel, LpStatus, Sense, State, Var};

const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const DEGENERATE_BEFORE_PERTURB: u32 = 50;
const DEGENERATE_BEFORE_BLAND: u32 = 50;
const MAX_PERTURBATIONS: u32 = 3;
const PERTURBATION: f64 = 1e-6;

/// Deterministic value in `[0, 1)`.
fn unit_hash(x: u64) -> f64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
}

struct Entering {
    var: Var,
    dir: f64,
}

enum Step {
    Flip,
    Pivot { pos: usize, to_upper: bool },
}

fn logical_candidate(i: usize, r: &super::RowData, d: f64) -> Option<Entering> {
    match (r.sense, r.state) {
        (Sense::Le, State::Lower) if d < -OPT_TOL => Some(Entering { var: Var::Row(i as u32), dir: 1.0 }),
        (Sense::Ge, State::Upper) if d > OPT_TOL => Some(Entering { var: Var::Row(i as u32), dir: -1.0 }),
        _ => None,
    }
}

impl LpModel {
    fn var_bounds(&self, v: Var) -> (f64, f64) {
        match v {
            Var::Col(j) => {
                let c = &self.cols[j as usize];
                (c.lower, c.upper)
            }
            Var::Row(i) => self.rows[i as usize].bounds(),
        }
    }

    fn var_cost(&self, v: Var) -> f64 {
        match v {
            Var::Col(j) => self.cols[j as usize].cost,
            Var::Row(_) => 0.0,
        }
    }

    fn var_order(&self, v: Var) -> usize {
        match v {
            Var::Col(j) => j as usize,
            Var::Row(i) => self.cols.len() + i as usize,
        }
    }

    fn set_state(&mut self, v: Var, s: State) {
        match v {
            Var::Col(j) => self.cols[j as usize].state = s,
            Var::Row(i) => self.rows[i as usize].state = s,
        }
    }

    fn nonbasic_state(lower: f64, upper: f64) -> State {
        if lower.is_finite() {
            State::Lower
        } else {
            debug_assert!(upper.is_finite());
            State::Upper
        }
    }

    fn load_column(&self, v: Var, w: &mut Workspace) {
        w.clear();
        match v {
            Var::Col(j) => {
                for &(i, a) in &self.cols[j as usize].coefs {
                    w.set(i as usize, a);
                }
            }
            Var::Row(i) => w.set(i as usize, 1.0),
        }
    }

    /// Rebuilds the eta file for the current set of basic variables.
    /// Triangular columns found through row singletons are pivoted first
    /// without fill; the remaining bump takes the largest available pivot.
    /// Columns that turn out dependent are made nonbasic and replaced by
    /// logicals.
    fn reinvert(&mut self) -> Result<(), LpError> {
        let m = self.rows.len();
        self.etas.clear();
        let structural: Vec<u32> = self
            .heading
            .iter()
            .filter_map(|v| match v {
                Var::Col(j) => Some(*j),
                Var::Row(_) => None,
            })
            .collect();

        let mut heading: Vec<Var> = (0..m as u32).map(Var::Row).collect();
        let mut free: Vec<bool> = vec![true; m];
        for v in &self.heading {
            if let Var::Row(i) = v {
                free[*i as usize] = false;
            }
        }

        // active row counts over the structural basis
        let mut count = vec![0u32; m];
        let mut by_row: Vec<Vec<u32>> = vec![Vec::new(); m];
        for (k, &j) in structural.iter().enumerate() {
            for &(i, _) in &self.cols[j as usize].coefs {
                if free[i as usize] {
                    count[i as usize] += 1;
                    by_row[i as usize].push(k as u32);
                }
            }
        }
        let mut placed = vec![false; structural.len()];
        let mut queue: Vec<usize> = (0..m).rev().filter(|&i| free[i] && count[i] == 1).collect();
        let mut alpha = Workspace::new(m);
        while let Some(r) = queue.pop() {
            if !free[r] || count[r] != 1 {
                continue;
            }
            let Some(&k) = by_row[r].iter().find(|&&k| !placed[k as usize]) else { continue };
            let j = structural[k as usize];
            placed[k as usize] = true;
            self.load_column(Var::Col(j), &mut alpha);
            self.work += alpha.pattern.len() as u64;
            self.etas.push_sparse(r, &alpha);
            heading[r] = Var::Col(j);
            free[r] = false;
            for &(i, _) in &self.cols[j as usize].coefs {
                let i = i as usize;
                if free[i] {
                    count[i] -= 1;
                    if count[i] == 1 {
                        queue.push(i);
                    }
                }
            }
        }

        let mut bump: Vec<u32> =
            structural.iter().zip(&placed).filter(|(_, &p)| !p).map(|(&j, _)| j).collect();
        bump.sort_by_key(|&j| (self.cols[j as usize].coefs.len(), j));
        for j in bump {
            self.load_column(Var::Col(j), &mut alpha);
            self.etas.ftran_sparse(&mut alpha);
            self.work += (self.etas.len() + alpha.pattern.len()) as u64;
            let v = &alpha.values;
            let best = alpha
                .pattern
                .iter()
                .copied()
                .filter(|&i| free[i])
                .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(b.cmp(&a)));
            match best {
                Some(r) if v[r].abs() > 1e-9 => {
                    self.etas.push_sparse(r, &alpha);
                    heading[r] = Var::Col(j);
                    free[r] = false;
                }
                _ => {
                    let c = &self.cols[j as usize];
                    log::debug!("reinversion dropped dependent column {j}");
                    let s = Self::nonbasic_state(c.lower, c.upper);
                    self.cols[j as usize].state = s;
                }
            }
        }
        let mut logical_basic = vec![false; m];
        for v in &heading {
            if let Var::Row(i) = v {
                logical_basic[*i as usize] = true;
            }
        }
        for i in 0..m {
            if !logical_basic[i] {
                let (l, u) = self.rows[i].bounds();
                self.rows[i].state = Self::nonbasic_state(l, u);
            }
        }
        for (p, &v) in heading.iter().enumerate() {
            self.set_state(v, State::Basic(p as u32));
        }
        self.heading = heading;
        self.factor_valid = true;
        Ok(())
    }

    /// `beta = B^{-1} (b - N x_N)`.
    fn compute_beta(&mut self) {
        let m = self.rows.len();
        let mut r: Vec<f64> = self.rows.iter().map(|row| row.rhs).collect();
        for (ri, s) in r.iter_mut().zip(&self.rhs_shift) {
            *ri += s;
        }
        for c in &self.cols {
            let x = match c.state {
                State::Basic(_) => continue,
                State::Lower => c.lower,
                State::Upper => c.upper,
            };
            if x != 0.0 {
                for &(i, a) in &c.coefs {
                    r[i as usize] -= a * x;
                }
            }
        }
        // nonbasic logicals always sit at zero
        self.etas.ftran(&mut r);
        self.work += (self.etas.nnz() + m) as u64;
        self.beta = r;
    }

    /// Shifts the right-hand side so that basic variables sitting on a
    /// bound move inside by a small pseudo-random amount. The basis stays
    /// feasible and ties in the ratio test mostly disappear.
    fn perturb(&mut self) {
        let mut shift = vec![0.0; self.rows.len()];
        for (p, &v) in self.heading.iter().enumerate() {
            let (l, u) = self.var_bounds(v);
            let b = self.beta[p];
            let key = (self.var_order(v) as u64) | (u64::from(self.perturbations) << 40);
            let delta = PERTURBATION * (1.0 + unit_hash(key));
            let d = if b - l < delta && u - b > 2.0 * delta {
                delta
            } else if u - b < delta && b - l > 2.0 * delta {
                -delta
            } else {
                continue;
            };
            match v {
                Var::Col(j) => {
                    for &(i, a) in &self.cols[j as usize].coefs {
                        shift[i as usize] += a * d;
                    }
                }
                Var::Row(i) => shift[i as usize] += d,
            }
        }
        self.rhs_shift = shift;
        self.perturbations += 1;
        self.compute_beta();
    }

    fn infeasibility(&self) -> f64 {
        self.heading
            .iter()
            .zip(&self.beta)
            .map(|(&v, &b)| {
                let (l, u) = self.var_bounds(v);
                (l - b).max(0.0) + (b - u).max(0.0)
            })
            .sum()
    }

    fn basic_costs(&self, phase1: bool) -> Vec<f64> {
        self.heading
            .iter()
            .zip(&self.beta)
            .map(|(&v, &b)| {
                if phase1 {
                    let (l, u) = self.var_bounds(v);
                    if b < l - FEAS_TOL {
                        -1.0
                    } else if b > u + FEAS_TOL {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    self.var_cost(v)
                }
            })
            .collect()
    }

    fn reduced(&self, j: usize, y: &[f64], phase1: bool) -> f64 {
        let c = &self.cols[j];
        let mut d = if phase1 { 0.0 } else { c.cost };
        for &(i, a) in &c.coefs {
            d -= a * y[i as usize];
        }
        d
    }

    fn candidate(&self, j: usize, d: f64) -> Option<Entering> {
        match self.cols[j].state {
            State::Lower if d < -OPT_TOL => Some(Entering { var: Var::Col(j as u32), dir: 1.0 }),
            State::Upper if d > OPT_TOL => Some(Entering { var: Var::Col(j as u32), dir: -1.0 }),
            _ => None,
        }
    }

    /// Dantzig pricing; under Bland's rule the first candidate by index.
    fn price(&mut self, y: &[f64], phase1: bool, bland: bool) -> Option<Entering> {
        let n = self.cols.len();
        let mut touched = 0usize;
        let skip = |c: &super::Column| matches!(c.state, State::Basic(_)) || c.lower == c.upper;
        if bland {
            for j in 0..n {
                if skip(&self.cols[j]) {
                    continue;
                }
                touched += self.cols[j].coefs.len() + 1;
                if let Some(e) = self.candidate(j, self.reduced(j, y, phase1)) {
                    self.work += touched as u64;
                    return Some(e);
                }
            }
            self.work += (touched + self.rows.len()) as u64;
            return self.rows.iter().enumerate().find_map(|(i, r)| logical_candidate(i, r, -y[i]));
        }

        let mut best: Option<(f64, Entering)> = None;
        for (i, r) in self.rows.iter().enumerate() {
            if let Some(e) = logical_candidate(i, r, -y[i]) {
                if best.as_ref().map_or(true, |(s, _)| y[i].abs() > *s) {
                    best = Some((y[i].abs(), e));
                }
            }
        }
        touched += self.rows.len();
        for j in 0..n {
            if skip(&self.cols[j]) {
                continue;
            }
            touched += self.cols[j].coefs.len() + 1;
            let d = self.reduced(j, y, phase1);
            if let Some(e) = self.candidate(j, d) {
                if best.as_ref().map_or(true, |(s, _)| d.abs() > *s) {
                    best = Some((d.abs(), e));
                }
            }
        }
        self.work += touched as u64;
        best.map(|(_, e)| e)
    }

    /// Limit on the step for basic position `i` moving at rate `delta`,
    /// relaxed by `tol`. The flag tells whether the variable would stop at
    /// its upper bound.
    fn limit(&self, i: usize, delta: f64, phase1: bool, tol: f64) -> Option<(f64, bool)> {
        let (l, u) = self.var_bounds(self.heading[i]);
        let b = self.beta[i];
        if phase1 && b < l - FEAS_TOL {
            return (delta > 0.0).then(|| (((l - b) + tol) / delta, false));
        }
        if phase1 && b > u + FEAS_TOL {
            return (delta < 0.0).then(|| (((b - u) + tol) / -delta, true));
        }
        if delta < 0.0 && l.is_finite() {
            Some((((b - l).max(0.0) + tol) / -delta, false))
        } else if delta > 0.0 && u.is_finite() {
            Some((((u - b).max(0.0) + tol) / delta, true))
        } else {
            None
        }
    }

    fn ratio_test(&self, e: &Entering, alpha: &[f64], phase1: bool, bland: bool) -> Option<(f64, Step)> {
        let (l, u) = self.var_bounds(e.var);
        let range = u - l;
        let rate = |i: usize| -e.dir * alpha[i];
        let candidates = (0..alpha.len()).filter(|&i| alpha[i].abs() > PIVOT_TOL);

        let mut chosen: Option<(f64, usize, bool)> = None;
        if bland {
            for i in candidates {
                if let Some((t, up)) = self.limit(i, rate(i), phase1, 0.0) {
                    let better = match chosen {
                        None => true,
                        Some((bt, bi, _)) => {
                            t < bt - 1e-12
                                || (t <= bt + 1e-12
                                    && self.var_order(self.heading[i]) < self.var_order(self.heading[bi]))
                        }
                    };
                    if better {
                        chosen = Some((t, i, up));
                    }
                }
            }
        } else {
            let relaxed = candidates
                .clone()
                .filter_map(|i| self.limit(i, rate(i), phase1, FEAS_TOL).map(|(t, _)| t))
                .fold(f64::INFINITY, f64::min);
            if relaxed.is_finite() {
                for i in candidates {
                    if let Some((t, up)) = self.limit(i, rate(i), phase1, 0.0) {
                        if t <= relaxed {
                            let better = chosen.map_or(true, |(_, bi, _)| alpha[i].abs() > alpha[bi].abs());
                            if better {
                                chosen = Some((t, i, up));
                            }
                        }
                    }
                }
            }
        }

        match chosen {
            Some((t, _, _)) if range.is_finite() && range <= t => Some((range, Step::Flip)),
            Some((t, pos, to_upper)) => Some((t.max(0.0), Step::Pivot { pos, to_upper })),
            None if range.is_finite() => Some((range, Step::Flip)),
            None => None,
        }
    }

    fn finish(&mut self, status: LpStatus) -> LpStatus {
        let mut y = self.basic_costs(false);
        self.etas.btran(&mut y);
        self.duals = y;
        self.objective = (0..self.cols.len())
            .map(|j| self.cols[j].cost * self.value(j))
            .sum();
        status
    }

    pub(super) fn run(&mut self, max_iterations: u64) -> Result<LpStatus, LpError> {
        let m = self.rows.len();
        if !self.factor_valid || self.etas.len() > REFACTOR_EVERY {
            self.reinvert()?;
        }
        self.compute_beta();
        let mut pivots_since_refactor = 0usize;
        let mut alpha = Workspace::new(m);
        let mut done = 0u64;

        loop {
            if pivots_since_refactor >= REFACTOR_EVERY {
                self.reinvert()?;
                self.compute_beta();
                pivots_since_refactor = 0;
            }
            let phase1 = self.infeasibility() > FEAS_TOL * (1 + m) as f64;
            if !phase1 && self.degenerate > DEGENERATE_BEFORE_PERTURB && self.perturbations < MAX_PERTURBATIONS {
                self.perturb();
                self.degenerate = 0;
            }
            let bland = self.degenerate > DEGENERATE_BEFORE_BLAND && self.perturbations >= MAX_PERTURBATIONS;
            let mut y = self.basic_costs(phase1);
            self.etas.btran(&mut y);
            self.work += (self.etas.nnz() + m) as u64;

            let Some(entering) = self.price(&y, phase1, bland) else {
                if pivots_since_refactor > 0 {
                    // confirm on a fresh factorisation
                    self.reinvert()?;
                    self.compute_beta();
                    pivots_since_refactor = 0;
                    continue;
                }
                if !self.rhs_shift.is_empty() {
                    // optimal for the shifted data: restore it and clean up
                    self.rhs_shift.clear();
                    self.compute_beta();
                    self.degenerate = 0;
                    continue;
                }
                self.degenerate = 0;
                self.perturbations = 0;
                return Ok(self.finish(if phase1 { LpStatus::Infeasible } else { LpStatus::Optimal }));
            };
            if done >= max_iterations {
                return Ok(self.finish(LpStatus::IterationLimit));
            }

            self.load_column(entering.var, &mut alpha);
            self.etas.ftran_sparse(&mut alpha);
            self.work += (self.etas.nnz() + 2 * m) as u64;

            let Some((theta, step)) = self.ratio_test(&entering, &alpha.values, phase1, bland) else {
                if phase1 {
                    return Err(LpError::NumericalFailure("unbounded phase-one direction".into()));
                }
                return Ok(self.finish(LpStatus::Unbounded));
            };

            for &i in &alpha.pattern {
                self.beta[i] -= entering.dir * alpha.values[i] * theta;
            }
            let (l, u) = self.var_bounds(entering.var);
            let start = if entering.dir > 0.0 { l } else { u };
            match step {
                Step::Flip => {
                    let s = if entering.dir > 0.0 { State::Upper } else { State::Lower };
                    self.set_state(entering.var, s);
                }
                Step::Pivot { pos, to_upper } => {
                    if alpha.values[pos].abs() < PIVOT_TOL {
                        return Err(LpError::NumericalFailure("vanishing pivot".into()));
                    }
                    let leaving = self.heading[pos];
                    let (ll, lu) = self.var_bounds(leaving);
                    let s = if to_upper && lu.is_finite() {
                        State::Upper
                    } else if ll.is_finite() {
                        State::Lower
                    } else {
                        State::Upper
                    };
                    self.set_state(leaving, s);
                    self.heading[pos] = entering.var;
                    self.set_state(entering.var, State::Basic(pos as u32));
                    self.beta[pos] = start + entering.dir * theta;
                    self.etas.push_sparse(pos, &alpha);
                    pivots_since_refactor += 1;
                }
            }
            if theta < 1e-12 {
                self.degenerate = self.degenerate.saturating_add(1);
            } else {
                self.degenerate = 0;
            }
            done += 1;
            self.iterations += 1;
        }
    }
}

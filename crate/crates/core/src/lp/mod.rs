//! Linear programs with incremental rows and columns, solved by a
//! bounded-variable revised primal simplex with warm starts.

mod factor;
mod simplex;

use std::io::Write;

use thiserror::Error;

use factor::EtaFile;

/// Absolute tolerance on constraint violation and reduced costs.
pub const EPS_LP: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("{kind} index {index} out of range ({len})")]
    IndexOutOfRange { kind: &'static str, index: usize, len: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Var {
    Col(u32),
    Row(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic(u32),
    Lower,
    Upper,
}

#[derive(Clone, Debug)]
struct Column {
    cost: f64,
    lower: f64,
    upper: f64,
    coefs: Vec<(u32, f64)>,
    state: State,
}

#[derive(Clone, Debug)]
struct RowData {
    sense: Sense,
    rhs: f64,
    state: State,
}

impl RowData {
    /// Bounds of the logical `s = rhs - a x`.
    fn bounds(&self) -> (f64, f64) {
        match self.sense {
            Sense::Le => (0.0, f64::INFINITY),
            Sense::Eq => (0.0, 0.0),
            Sense::Ge => (f64::NEG_INFINITY, 0.0),
        }
    }
}

/// Snapshot of a solved model's values.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
}

/// A minimisation LP `min c x` subject to `a_i x (<=|=|>=) b_i` and
/// `l <= x <= u`. Row and column indices are assigned contiguously.
#[derive(Clone, Debug, Default)]
pub struct LpModel {
    cols: Vec<Column>,
    rows: Vec<RowData>,
    heading: Vec<Var>,
    beta: Vec<f64>,
    duals: Vec<f64>,
    etas: EtaFile,
    factor_valid: bool,
    status: Option<LpStatus>,
    objective: f64,
    iterations: u64,
    /// Consecutive degenerate pivots, kept across iteration-limited calls.
    degenerate: u32,
    /// Right-hand side shift active while escaping a degenerate stall.
    rhs_shift: Vec<f64>,
    /// Perturbations applied during the current solve.
    perturbations: u32,
    work: u64,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    /// Adds a row over existing columns; its logical variable enters the
    /// basis so the current basis stays valid for a warm start.
    pub fn add_row(&mut self, sense: Sense, rhs: f64, coefs: &[(usize, f64)]) -> Result<usize, LpError> {
        let r = self.rows.len();
        for &(j, _) in coefs {
            self.check_col(j)?;
        }
        for &(j, a) in coefs {
            if a != 0.0 {
                self.cols[j].coefs.push((r as u32, a));
            }
        }
        let pos = self.heading.len();
        self.heading.push(Var::Row(r as u32));
        self.rows.push(RowData { sense, rhs, state: State::Basic(pos as u32) });
        self.beta.push(0.0);
        self.invalidate();
        Ok(r)
    }

    /// Adds a column, nonbasic at its lower bound (or upper, if the lower
    /// bound is infinite).
    pub fn add_column(
        &mut self,
        cost: f64,
        lower: f64,
        upper: f64,
        coefs: &[(usize, f64)],
    ) -> Result<usize, LpError> {
        for &(i, _) in coefs {
            self.check_row(i)?;
        }
        if lower > upper || (lower.is_infinite() && upper.is_infinite()) {
            return Err(LpError::NumericalFailure(format!(
                "column bounds [{lower}, {upper}] unsupported"
            )));
        }
        let mut c: Vec<(u32, f64)> = coefs
            .iter()
            .filter(|&&(_, a)| a != 0.0)
            .map(|&(i, a)| (i as u32, a))
            .collect();
        c.sort_by_key(|&(i, _)| i);
        let state = if lower.is_finite() { State::Lower } else { State::Upper };
        self.cols.push(Column { cost, lower, upper, coefs: c, state });
        self.invalidate_values();
        Ok(self.cols.len() - 1)
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        self.check_col(j)?;
        let col = &mut self.cols[j];
        col.lower = lower;
        col.upper = upper;
        match col.state {
            State::Lower if lower.is_infinite() => col.state = State::Upper,
            State::Upper if upper.is_infinite() => col.state = State::Lower,
            _ => {}
        }
        self.invalidate_values();
        Ok(())
    }

    pub fn set_cost(&mut self, j: usize, cost: f64) -> Result<(), LpError> {
        self.check_col(j)?;
        self.cols[j].cost = cost;
        self.status = None;
        Ok(())
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.cols[j].lower, self.cols[j].upper)
    }

    pub fn cost(&self, j: usize) -> f64 {
        self.cols[j].cost
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.cols[j].coefs.iter().map(|&(i, a)| (i as usize, a))
    }

    pub fn row_sense(&self, i: usize) -> Sense {
        self.rows[i].sense
    }

    pub fn rhs(&self, i: usize) -> f64 {
        self.rows[i].rhs
    }

    fn check_col(&self, j: usize) -> Result<(), LpError> {
        if j >= self.cols.len() {
            return Err(LpError::IndexOutOfRange { kind: "column", index: j, len: self.cols.len() });
        }
        Ok(())
    }

    fn check_row(&self, i: usize) -> Result<(), LpError> {
        if i >= self.rows.len() {
            return Err(LpError::IndexOutOfRange { kind: "row", index: i, len: self.rows.len() });
        }
        Ok(())
    }

    fn invalidate(&mut self) {
        self.factor_valid = false;
        self.status = None;
    }

    fn invalidate_values(&mut self) {
        self.status = None;
    }

    /// Solves from the current basis.
    pub fn solve(&mut self) -> Result<LpStatus, LpError> {
        self.solve_limited(u64::MAX)
    }

    /// Solves with a cap on simplex iterations for this call.
    pub fn solve_limited(&mut self, max_iterations: u64) -> Result<LpStatus, LpError> {
        let status = self.run(max_iterations)?;
        self.status = Some(status);
        Ok(status)
    }

    pub fn status(&self) -> Option<LpStatus> {
        self.status
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// Value of column `j` in the last basic solution.
    pub fn value(&self, j: usize) -> f64 {
        let col = &self.cols[j];
        match col.state {
            State::Basic(p) => self.beta[p as usize],
            State::Lower => col.lower,
            State::Upper => col.upper,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.cols.len()).map(|j| self.value(j)).collect()
    }

    /// Dual value of row `i`: nonnegative on `>=` rows and nonpositive on
    /// `<=` rows at an optimum.
    pub fn dual(&self, i: usize) -> f64 {
        self.duals.get(i).copied().unwrap_or(0.0)
    }

    pub fn duals(&self) -> &[f64] {
        &self.duals
    }

    pub fn reduced_cost(&self, j: usize) -> f64 {
        let col = &self.cols[j];
        col.cost - col.coefs.iter().map(|&(i, a)| a * self.dual(i as usize)).sum::<f64>()
    }

    /// `a_i x` at the current solution.
    pub fn row_activity(&self, i: usize) -> f64 {
        match self.rows[i].state {
            State::Basic(p) => self.rows[i].rhs - self.beta[p as usize],
            _ => self.rows[i].rhs,
        }
    }

    pub fn solution(&self) -> LpSolution {
        LpSolution {
            status: self.status.unwrap_or(LpStatus::IterationLimit),
            objective: self.objective,
            primal: self.values(),
            dual: self.duals.clone(),
        }
    }

    /// Total simplex iterations over the model's lifetime.
    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    /// Deterministic effort counter (entries touched by pricing, ratio
    /// tests and basis updates).
    pub fn work(&self) -> u64 {
        self.work
    }

    /// Writes the model in a readable LP-like text form.
    pub fn write_lp<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.rows.len()];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, a) in &c.coefs {
                rows[i as usize].push((j, a));
            }
        }
        writeln!(out, "Minimize")?;
        write!(out, " obj:")?;
        for (j, c) in self.cols.iter().enumerate() {
            if c.cost != 0.0 {
                write!(out, " {:+} x{j}", c.cost)?;
            }
        }
        writeln!(out, "\nSubject To")?;
        for (i, r) in self.rows.iter().enumerate() {
            write!(out, " r{i}:")?;
            for &(j, a) in &rows[i] {
                write!(out, " {a:+} x{j}")?;
            }
            let op = match r.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
                Sense::Ge => ">=",
            };
            writeln!(out, " {op} {}", r.rhs)?;
        }
        writeln!(out, "Bounds")?;
        for (j, c) in self.cols.iter().enumerate() {
            writeln!(out, " {} <= x{j} <= {}", c.lower, c.upper)?;
        }
        writeln!(out, "End")
    }
}

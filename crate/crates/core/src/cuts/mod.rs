//! Valid inequalities over timed-arc variables and their separators.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::expand::{ArcIndex, TimeExpandedGraph};
use crate::instgen::static_lower_bounds;
use crate::lp::Sense;
use crate::master::CombinedFlow;
use crate::model::{Instance, TimePoint};

pub mod arborescence;
pub mod cycle;
pub mod dk;
pub mod maxflow;
pub mod oddcat;
pub mod oddpf;
pub mod sec;
pub mod uafc;

pub use oddpf::PathFreeError;

/// Minimum violation for a cut to be reported.
pub const EPS_CUT: f64 = 1e-4;
/// Cuts kept per family and separation round, most violated first.
pub const MAX_CUTS_PER_ROUND: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutFamily {
    Sec,
    Lsec,
    Dk,
    OddCat,
    OddPf,
    Cycle,
    Uafc,
}

impl CutFamily {
    pub const ALL: [CutFamily; 7] = [
        CutFamily::Sec,
        CutFamily::Lsec,
        CutFamily::Dk,
        CutFamily::OddCat,
        CutFamily::OddPf,
        CutFamily::Cycle,
        CutFamily::Uafc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CutFamily::Sec => "SEC",
            CutFamily::Lsec => "LSEC",
            CutFamily::Dk => "DK",
            CutFamily::OddCat => "ODDCAT",
            CutFamily::OddPf => "ODDPF",
            CutFamily::Cycle => "CYCLE",
            CutFamily::Uafc => "UAFC",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CutFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CutFamily::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown cut family `{s}`"))
    }
}

/// A linear inequality over timed arcs, with coefficients sorted by arc.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub family: CutFamily,
    pub sense: Sense,
    pub rhs: f64,
    coefs: Vec<(ArcIndex, f64)>,
}

impl Cut {
    /// Builds a cut, merging repeated arcs and dropping zero coefficients.
    pub fn new(family: CutFamily, sense: Sense, rhs: f64, mut coefs: Vec<(ArcIndex, f64)>) -> Self {
        coefs.sort_by_key(|&(a, _)| a);
        let mut merged: Vec<(ArcIndex, f64)> = Vec::with_capacity(coefs.len());
        for (a, c) in coefs {
            match merged.last_mut() {
                Some((b, d)) if *b == a => *d += c,
                _ => merged.push((a, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        Self { family, sense, rhs, coefs: merged }
    }

    pub fn coefs(&self) -> &[(ArcIndex, f64)] {
        &self.coefs
    }

    pub fn coef(&self, a: ArcIndex) -> f64 {
        self.coefs
            .binary_search_by_key(&a, |&(b, _)| b)
            .map_or(0.0, |i| self.coefs[i].1)
    }

    /// Left-hand side for dense arc values.
    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coefs.iter().map(|&(a, c)| c * x[a]).sum()
    }

    /// Amount by which `lhs` violates the inequality (negative if slack).
    pub fn violation_at(&self, lhs: f64) -> f64 {
        match self.sense {
            Sense::Le => lhs - self.rhs,
            Sense::Ge => self.rhs - lhs,
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        self.violation_at(self.lhs(x))
    }

    /// Violation by the incidence vector of a path given as arc indices.
    pub fn path_violation(&self, path: &[ArcIndex]) -> f64 {
        self.violation_at(path.iter().map(|&a| self.coef(a)).sum())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationConfig {
    /// Longest vertex sequence tried for D_k+ inequalities.
    pub dk_kmax: usize,
    /// Longest arc sequence scanned for cycle inequalities.
    pub cycle_rmax: usize,
    /// Arcs tried per round for admissible-flow cuts.
    pub uafc_candidates: usize,
    /// Largest support handed to the exact path-free stable-set search.
    pub path_free_limit: usize,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        Self {
            dk_kmax: 5,
            cycle_rmax: 4,
            uafc_candidates: 50,
            path_free_limit: oddpf::STABLE_SET_LIMIT,
        }
    }
}

/// Runs the separation routines against timed-arc solution values.
#[derive(Clone, Debug)]
pub struct Separator<'g> {
    g: &'g TimeExpandedGraph,
    static_costs: Vec<Vec<TimePoint>>,
    config: SeparationConfig,
}

impl<'g> Separator<'g> {
    pub fn new(inst: &Instance, g: &'g TimeExpandedGraph) -> Self {
        Self::with_config(inst, g, SeparationConfig::default())
    }

    pub fn with_config(inst: &Instance, g: &'g TimeExpandedGraph, config: SeparationConfig) -> Self {
        Self {
            g,
            static_costs: static_lower_bounds(inst),
            config,
        }
    }

    pub fn config(&self) -> &SeparationConfig {
        &self.config
    }

    /// All violated cuts found by one family, unfiltered.
    pub fn candidates(&self, family: CutFamily, x: &[f64]) -> Vec<Cut> {
        let g = self.g;
        let flow = || CombinedFlow::from_arc_values(g, x);
        match family {
            CutFamily::Sec => sec::separate_sec(g, &flow()),
            CutFamily::Lsec => sec::separate_lsec(g, &flow(), &self.static_costs, x),
            CutFamily::Dk => dk::separate_dk(g, &flow(), self.config.dk_kmax),
            CutFamily::OddCat => oddcat::separate_odd_cat(g, &flow()),
            CutFamily::OddPf => oddpf::separate_odd_path_free(g, &flow(), x, self.config.path_free_limit),
            CutFamily::Cycle => cycle::separate_cycle(g, x, self.config.cycle_rmax),
            CutFamily::Uafc => uafc::separate_uafc(g, x, self.config.uafc_candidates),
        }
    }

    /// At most [`MAX_CUTS_PER_ROUND`] distinct cuts violated by more than
    /// [`EPS_CUT`], most violated first.
    pub fn separate(&self, family: CutFamily, x: &[f64]) -> Vec<Cut> {
        select(self.candidates(family, x), x)
    }
}

/// Filters, deduplicates and ranks cuts by violation (stable on ties).
pub fn select(cuts: Vec<Cut>, x: &[f64]) -> Vec<Cut> {
    let mut seen = HashSet::new();
    let mut ranked: Vec<(f64, Cut)> = cuts
        .into_iter()
        .map(|c| (c.violation(x), c))
        .filter(|(v, _)| *v > EPS_CUT)
        .filter(|(_, c)| seen.insert(cut_key(c)))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    ranked.truncate(MAX_CUTS_PER_ROUND);
    ranked.into_iter().map(|(_, c)| c).collect()
}

fn cut_key(c: &Cut) -> (u8, u64, Vec<(ArcIndex, u64)>) {
    let sense = match c.sense {
        Sense::Le => 0,
        Sense::Eq => 1,
        Sense::Ge => 2,
    };
    (sense, c.rhs.to_bits(), c.coefs.iter().map(|&(a, v)| (a, v.to_bits())).collect())
}

#[cfg(test)]
mod validity;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_evaluates() {
        let cut = Cut::new(CutFamily::Dk, Sense::Le, 1.0, vec![(4, 1.0), (2, 1.0), (4, 1.0), (7, 0.0)]);
        assert_eq!(cut.coefs(), &[(2, 1.0), (4, 2.0)]);
        assert_eq!(cut.coef(4), 2.0);
        assert_eq!(cut.coef(7), 0.0);
        let x = vec![0.0, 0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0];
        assert!((cut.violation(&x) - 0.5).abs() < 1e-12);
        assert_eq!(cut.path_violation(&[2, 5]), 0.0);
        assert_eq!(cut.path_violation(&[4]), 1.0);
    }

    #[test]
    fn family_names_round_trip() {
        for f in CutFamily::ALL {
            assert_eq!(f.name().parse::<CutFamily>().unwrap(), f);
        }
        assert!("nope".parse::<CutFamily>().is_err());
    }
}

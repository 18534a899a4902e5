//! Fixing timed arcs to zero from a primal bound `upper` (incumbent value)
//! and a dual bound `lower`.

use crate::expand::TimeExpandedGraph;
use crate::model::{TimePoint, SOURCE};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PropagationRule {
    /// Arcs arriving at or after `upper` cannot be part of an improving tour.
    #[default]
    Strengthened,
    /// Only arcs departing strictly after `upper` are fixed.
    Literal,
}

/// Marks dead every arc that cannot be used by a tour arriving in
/// `lower..upper` (strengthened) or `lower..=upper` (literal); returns the
/// number of newly fixed arcs. Never clears a mark.
pub fn propagate(
    g: &TimeExpandedGraph,
    upper: TimePoint,
    lower: TimePoint,
    dead: &mut [bool],
    rule: PropagationRule,
) -> usize {
    let mut fixed = 0;
    for (a, arc) in g.arcs().iter().enumerate() {
        if dead[a] {
            continue;
        }
        let late = match rule {
            PropagationRule::Strengthened => arc.arrival >= upper,
            PropagationRule::Literal => arc.departure > upper,
        };
        let early_return = arc.head == SOURCE && arc.arrival < lower;
        if late || early_return {
            dead[a] = true;
            fixed += 1;
        }
    }
    fixed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::{generate, GenConfig};
    use crate::master::Master;
    use crate::model::Instance;
    use crate::oracle::solve_dp;

    #[test]
    fn vacuous_bounds_fix_nothing() {
        let inst = generate(&GenConfig { n: 6, theta_max: 200, breakpoints: 10, coord_range: 30, seed: 2, ..Default::default() }).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        for rule in [PropagationRule::Literal, PropagationRule::Strengthened] {
            let mut dead = vec![false; g.num_arcs()];
            assert_eq!(propagate(&g, g.theta_max() + 1, 0, &mut dead, rule), 0);
        }
    }

    #[test]
    fn literal_rule_on_departures() {
        let inst = Instance::from_constant(&vec![vec![1; 4]; 4], 20).unwrap();
        let g = TimeExpandedGraph::build(&inst).unwrap();
        let mut dead = vec![false; g.num_arcs()];
        propagate(&g, 10, 0, &mut dead, PropagationRule::Literal);
        for (a, arc) in g.arcs().iter().enumerate() {
            assert_eq!(dead[a], arc.departure > 10);
        }
        // monotone: a vacuous call keeps everything
        let before = dead.clone();
        propagate(&g, 1000, 0, &mut dead, PropagationRule::Literal);
        assert_eq!(before, dead);
    }

    #[test]
    fn optimal_tour_survives() {
        for seed in 0..10 {
            let inst = generate(&GenConfig { n: 6, theta_max: 200, breakpoints: 10, coord_range: 30, seed, ..Default::default() }).unwrap();
            let g = TimeExpandedGraph::build(&inst).unwrap();
            let opt = solve_dp(&inst).unwrap().unwrap();
            let all: Vec<_> = (0..g.num_arcs()).collect();
            let mut m = Master::build_arc_master(&g, &all).unwrap();
            m.solve().unwrap();
            let lower = (m.objective() - 1e-6).ceil() as TimePoint;
            let path = g.embed(&opt).unwrap();
            for rule in [PropagationRule::Literal, PropagationRule::Strengthened] {
                let mut dead = vec![false; g.num_arcs()];
                let fixed = propagate(&g, opt.arrival() + 1, lower, &mut dead, rule);
                assert!(path.iter().all(|&a| !dead[a]));
                if rule == PropagationRule::Strengthened {
                    assert!(fixed > 0);
                }
                // the restricted LP cannot get better
                m.set_dead(&dead);
                m.solve().unwrap();
                assert!(m.objective() >= lower as f64 - 1e-6);
                m.set_dead(&vec![false; g.num_arcs()]);
            }
        }
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::instgen::{generate, GenConfig};
use crate::master::Master;
use crate::oracle::enumerate_tours;
use crate::pricing::{pricing_loop, PricingMode, EPS_PRICING};
use crate::work::Budget;

fn instance(seed: u64, n: usize) -> Instance {
    generate(&GenConfig { n, theta_max: 150, breakpoints: 15, coord_range: 30, seed, ..Default::default() }).unwrap()
}

/// Convex combination of random walks from `s_0` to a source copy.
fn random_point(g: &TimeExpandedGraph, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = vec![0.0; g.num_arcs()];
    let walks = rng.gen_range(1..5);
    for _ in 0..walks {
        let mut at = g.source_node();
        loop {
            let out = g.out_arcs(at);
            if out.is_empty() {
                break;
            }
            let a = rng.gen_range(out);
            x[a] += 1.0 / walks as f64;
            at = g.head_node(a);
            if g.node(at).vertex == crate::model::SOURCE {
                break;
            }
        }
    }
    x
}

fn check(family: CutFamily, cuts: &[Cut], x: &[f64], tours: &[Vec<ArcIndex>]) {
    for cut in cuts {
        assert_eq!(cut.family, family);
        assert!(cut.violation(x) > EPS_CUT);
        for t in tours {
            assert!(cut.path_violation(t) <= 1e-9, "{family} cut {cut:?} violated by tour {t:?}");
        }
    }
}

#[test]
fn all_separators_are_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut emitted = [0usize; 7];
    for seed in 0..6 {
        let n = 5 + (seed as usize % 3);
        let inst = instance(seed, n);
        let g = TimeExpandedGraph::build(&inst).unwrap();
        let tours: Vec<Vec<ArcIndex>> = enumerate_tours(&inst)
            .unwrap()
            .iter()
            .map(|t| g.embed(t).unwrap())
            .collect();
        assert!(!tours.is_empty());
        let sep = Separator::new(&inst, &g);

        let mut points: Vec<Vec<f64>> = (0..15).map(|_| random_point(&g, &mut rng)).collect();

        // fractional points met while cutting a converged arc master
        let mut m = Master::build_arc_master(&g, &tours[0]).unwrap();
        for round in 0..4 {
            pricing_loop(&mut m, &inst, PricingMode::Plain, EPS_PRICING, &mut Budget::unlimited(), &mut |_| {})
                .unwrap();
            let x = m.arc_values();
            points.push(x.clone());
            let family = CutFamily::ALL[round % 7];
            for cut in sep.separate(family, &x) {
                m.add_cut(cut, 0);
            }
            for cut in sep.separate(CutFamily::Lsec, &x) {
                m.add_cut(cut, 0);
            }
        }

        for x in &points {
            for family in CutFamily::ALL {
                let cuts = sep.separate(family, x);
                emitted[family.index()] += cuts.len();
                check(family, &cuts, x, &tours);
            }
        }
    }
    for family in CutFamily::ALL {
        assert!(emitted[family.index()] > 0, "{family} never produced a cut");
    }
}

#[test]
fn cuts_never_lower_the_lp() {
    for seed in 10..14 {
        let inst = instance(seed, 6);
        let g = TimeExpandedGraph::build(&inst).unwrap();
        let all: Vec<ArcIndex> = (0..g.num_arcs()).collect();
        let mut m = Master::build_arc_master(&g, &all).unwrap();
        m.solve().unwrap();
        let sep = Separator::new(&inst, &g);
        let mut last = m.objective();
        for _ in 0..3 {
            let x = m.arc_values();
            for family in CutFamily::ALL {
                for cut in sep.separate(family, &x) {
                    m.add_cut(cut, 0);
                }
            }
            m.solve().unwrap();
            assert!(m.objective() >= last - 1e-6);
            last = m.objective();
        }
        let opt = crate::oracle::solve_dp(&inst).unwrap().unwrap().arrival() as f64;
        assert!(last <= opt + 1e-6);
    }
}

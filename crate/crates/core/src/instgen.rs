//! Random instance generation: Euclidean base costs perturbed by a sawtooth
//! capped at `lambda * c_a`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{self, Instance, ModelError, TimePoint, TravelTimeFn, VertexId};
use crate::oracle;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error("could not place {0} distinct points after 100 retries")]
    DegenerateInstance(usize),
    #[error("generated instance failed validation: {0}")]
    Validation(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    pub theta_max: TimePoint,
    /// Number of slope breakpoints per arc.
    pub breakpoints: usize,
    /// Cap factor: the perturbation never exceeds `lambda * c_a`.
    pub lambda: f64,
    pub coord_range: u32,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n: 20,
            theta_max: 1000,
            breakpoints: 100,
            lambda: 3.0,
            coord_range: 100,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.n < 2 {
            return Err(GenError::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.breakpoints < 1 {
            return Err(GenError::Config("need at least one breakpoint".into()));
        }
        if (self.theta_max as usize) < self.breakpoints + 1 {
            return Err(GenError::Config(format!(
                "{} breakpoints do not fit strictly inside (0, {})",
                self.breakpoints, self.theta_max
            )));
        }
        if !(self.lambda > 1.0) || !self.lambda.is_finite() {
            return Err(GenError::Config(format!("lambda must exceed 1, got {}", self.lambda)));
        }
        if self.coord_range < 1 {
            return Err(GenError::Config("coordinate range must be positive".into()));
        }
        Ok(())
    }
}

/// The raw sawtooth `f` over `0..=theta_max`: `f(0) = 0`, slope `+1` up to
/// the first breakpoint, flipping sign at every breakpoint.
pub fn sawtooth(breakpoints: &[TimePoint], theta_max: TimePoint) -> Vec<i64> {
    let mut f = Vec::with_capacity(theta_max as usize + 1);
    f.push(0i64);
    let mut slope = 1i64;
    let mut next = 0;
    for theta in 1..=theta_max {
        while next < breakpoints.len() && breakpoints[next] <= theta - 1 {
            if breakpoints[next] == theta - 1 {
                slope = -slope;
            }
            next += 1;
        }
        f.push(f[theta as usize - 1] + slope);
    }
    f
}

/// `c + max(min(f(theta), cap), 0)` with `cap = floor(lambda * c)`.
pub fn perturbed_table(base: TimePoint, raw: &[i64], lambda: f64) -> Vec<TimePoint> {
    let cap = (lambda * base as f64).floor() as i64;
    raw.iter()
        .map(|&f| base + f.min(cap).max(0) as TimePoint)
        .collect()
}

fn euclidean_floor(a: (i64, i64), b: (i64, i64)) -> TimePoint {
    let d2 = (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2);
    // exact integer square root
    let mut r = (d2 as f64).sqrt() as i64;
    while r * r > d2 {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= d2 {
        r += 1;
    }
    r as TimePoint
}

fn sample_points(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Result<Vec<(i64, i64)>, GenError> {
    let range = cfg.coord_range as i64;
    let mut points: Vec<(i64, i64)> = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let mut placed = false;
        for _ in 0..=100 {
            let p = (rng.gen_range(0..=range), rng.gen_range(0..=range));
            if points.iter().all(|&q| q != p) {
                points.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(GenError::DegenerateInstance(cfg.n));
        }
    }
    Ok(points)
}

/// Floyd-Warshall closure of a static cost matrix.
pub fn metric_closure(costs: &mut [Vec<TimePoint>]) {
    let n = costs.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if i != j && i != k && j != k {
                    let via = costs[i][k] + costs[k][j];
                    if via < costs[i][j] {
                        costs[i][j] = via;
                    }
                }
            }
        }
    }
}

/// Replaces every travel-time function by the earliest-arrival travel time
/// over all walks whose departures stay within the horizon. The result
/// satisfies the time-dependent triangle inequality, and stays FIFO when
/// the input is FIFO.
pub fn time_dependent_closure(inst: &Instance) -> Result<Instance, ModelError> {
    let n = inst.n();
    let theta_max = inst.theta_max();
    let mut tables: Vec<Vec<TimePoint>> = vec![Vec::with_capacity(theta_max as usize + 1); n * n];
    let mut earliest = vec![u64::MAX; n];
    let mut done = vec![false; n];
    for u in 0..n {
        for theta in 0..=theta_max {
            earliest.fill(u64::MAX);
            done.fill(false);
            earliest[u] = theta as u64;
            loop {
                let Some(v) = (0..n)
                    .filter(|&v| !done[v] && earliest[v] != u64::MAX)
                    .min_by_key(|&v| (earliest[v], v))
                else {
                    break;
                };
                done[v] = true;
                let t = earliest[v];
                if t > theta_max as u64 {
                    continue;
                }
                for w in (0..n).filter(|&w| w != v && !done[w]) {
                    let arr = t + inst.travel_time(v, w, t as TimePoint).unwrap() as u64;
                    if arr < earliest[w] {
                        earliest[w] = arr;
                    }
                }
            }
            for w in (0..n).filter(|&w| w != u) {
                tables[u * n + w].push((earliest[w] - theta as u64) as TimePoint);
            }
        }
    }
    let costs = tables
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            if i / n == i % n {
                Ok(None)
            } else {
                TravelTimeFn::new(t).map(Some)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Instance::new(n, theta_max, costs)?;
    out.name = inst.name.clone();
    out.seed = inst.seed;
    Ok(out)
}

/// Metric closure of the rounded-down Euclidean distances.
fn static_costs(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<TimePoint>>, GenError> {
    let points = sample_points(cfg, rng)?;
    let n = cfg.n;
    let mut base = vec![vec![0; n]; n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                base[u][v] = euclidean_floor(points[u], points[v]);
                if base[u][v] == 0 {
                    return Err(GenError::DegenerateInstance(n));
                }
            }
        }
    }
    metric_closure(&mut base);
    Ok(base)
}

/// The static costs `c_a` that [`generate`] perturbs for this configuration.
pub fn base_costs(cfg: &GenConfig) -> Result<Vec<Vec<TimePoint>>, GenError> {
    cfg.validate()?;
    static_costs(cfg, &mut ChaCha8Rng::seed_from_u64(cfg.seed))
}

/// Generates an instance; identical configurations give identical output.
pub fn generate(cfg: &GenConfig) -> Result<Instance, GenError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let base = static_costs(cfg, &mut rng)?;
    let n = cfg.n;

    let mut costs = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            if u == v {
                costs.push(None);
                continue;
            }
            let mut bps: Vec<TimePoint> = sample(&mut rng, cfg.theta_max as usize - 1, cfg.breakpoints)
                .into_iter()
                .map(|i| i as TimePoint + 1)
                .collect();
            bps.sort_unstable();
            let raw = sawtooth(&bps, cfg.theta_max);
            costs.push(Some(TravelTimeFn::new(perturbed_table(base[u][v], &raw, cfg.lambda))?));
        }
    }
    let raw = Instance::new(n, cfg.theta_max, costs)?;
    let mut inst = time_dependent_closure(&raw)?;
    inst.name = format!("gen-n{}-t{}-m{}-s{}", cfg.n, cfg.theta_max, cfg.breakpoints, cfg.seed);
    inst.seed = Some(cfg.seed);

    if let Some(v) = model::check_fifo(&inst).first() {
        return Err(GenError::Validation(format!("FIFO violated: {v:?}")));
    }
    if let Some(v) = model::check_td_triangle(&inst).first() {
        return Err(GenError::Validation(format!("triangle inequality violated: {v:?}")));
    }
    Ok(inst)
}

/// Static costs `min_theta c_uv(theta)`.
pub fn static_lower_bounds(inst: &Instance) -> Vec<Vec<TimePoint>> {
    let n = inst.n();
    (0..n)
        .map(|u| {
            (0..n)
                .map(|v| if u == v { 0 } else { inst.min_travel_time(u, v) })
                .collect()
        })
        .collect()
}

/// Shrinks the horizon to the time-dependent arrival of a good static tour.
///
/// The static tour is optimal for the lower-bound costs when the instance
/// fits the dynamic program, otherwise it comes from the static heuristic.
pub fn tighten_horizon(inst: &Instance) -> Instance {
    let costs = static_lower_bounds(inst);
    let order: Vec<VertexId> = if inst.n() <= oracle::DP_MAX_VERTICES {
        oracle::solve_static_dp(&costs).0
    } else {
        crate::heur::static_heuristic_tour(&costs)
    };
    match model::Tour::evaluate(inst, order) {
        Ok(Some(tour)) if tour.arrival() <= inst.theta_max() => inst
            .with_horizon(tour.arrival())
            .expect("arrival lies within the horizon"),
        _ => inst.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_fifo, check_td_triangle};

    #[test]
    fn sawtooth_starts_rising_and_alternates() {
        let f = sawtooth(&[3, 5], 8);
        assert_eq!(f, vec![0, 1, 2, 3, 2, 1, 2, 3, 4]);
        for w in f.windows(2) {
            assert_eq!((w[1] - w[0]).abs(), 1);
        }
    }

    #[test]
    fn cap_example_ten_lambda_three() {
        // one breakpoint far out: the ramp saturates at 3 * 10
        let raw = sawtooth(&[90], 100);
        let table = perturbed_table(10, &raw, 3.0);
        assert_eq!(*table.iter().min().unwrap(), 10);
        assert_eq!(*table.iter().max().unwrap(), 40);
        assert_eq!(table[0], 10);
    }

    #[test]
    fn small_instances_validate() {
        for seed in 0..5 {
            let cfg = GenConfig { n: 6, theta_max: 200, breakpoints: 20, seed, ..Default::default() };
            let inst = generate(&cfg).unwrap();
            assert!(check_fifo(&inst).is_empty());
            assert!(check_td_triangle(&inst).is_empty());
            for u in 0..6 {
                for v in (0..6).filter(|&v| v != u) {
                    let f = inst.arc(u, v);
                    let base = f.get(0).unwrap();
                    assert!(f.min() >= base);
                    assert!(f.max() <= 4 * base);
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GenConfig { n: 5, theta_max: 150, breakpoints: 10, seed: 7, ..Default::default() };
        assert_eq!(generate(&cfg).unwrap().to_text(), generate(&cfg).unwrap().to_text());
        let other = GenConfig { seed: 8, ..cfg.clone() };
        assert_ne!(generate(&cfg).unwrap().to_text(), generate(&other).unwrap().to_text());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let ok = GenConfig { n: 4, theta_max: 50, breakpoints: 5, ..Default::default() };
        assert!(ok.validate().is_ok());
        assert!(GenConfig { lambda: 1.0, ..ok.clone() }.validate().is_err());
        assert!(GenConfig { breakpoints: 0, ..ok.clone() }.validate().is_err());
        assert!(GenConfig { breakpoints: 50, ..ok.clone() }.validate().is_err());
        assert!(GenConfig { n: 1, ..ok }.validate().is_err());
    }

    #[test]
    fn crowded_grid_is_degenerate() {
        let cfg = GenConfig { n: 5, theta_max: 50, breakpoints: 5, coord_range: 1, ..Default::default() };
        assert!(matches!(generate(&cfg), Err(GenError::DegenerateInstance(5))));
    }

    #[test]
    fn tightening_constant_instance_gives_static_optimum() {
        let m = vec![
            vec![0, 2, 9, 4],
            vec![2, 0, 3, 9],
            vec![9, 3, 0, 2],
            vec![4, 9, 2, 0],
        ];
        let inst = Instance::from_constant(&m, 100).unwrap();
        let tight = tighten_horizon(&inst);
        assert_eq!(tight.theta_max(), 11);
        assert_eq!(tighten_horizon(&tight), tight);
    }
}

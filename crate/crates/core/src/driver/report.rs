//! Benchmark runs and their CSV report.

use std::io::Write;

use super::{solve, DriverError, RunStats, SolverConfig};
use crate::cuts::CutFamily;
use crate::model::Instance;

pub const CSV_HEADER: [&str; 17] = [
    "instance",
    "config",
    "solved",
    "gap",
    "time",
    "nodes",
    "cols",
    "rows",
    "cuts_SEC",
    "cuts_LSEC",
    "cuts_DK",
    "cuts_ODDCAT",
    "cuts_ODDPF",
    "cuts_CYCLE",
    "cuts_UAFC",
    "root_lp_solved",
    "work",
];

#[derive(Clone, Debug)]
pub struct BenchmarkRow {
    pub instance: String,
    pub config: String,
    pub stats: RunStats,
}

/// Solves every instance under every configuration, configurations outermost.
/// A failing solve is logged and recorded as unsolved with gap 1.
pub fn benchmark(instances: &[(String, Instance)], configs: &[SolverConfig]) -> Result<Vec<BenchmarkRow>, DriverError> {
    for config in configs {
        config.validate()?;
    }
    let mut rows = Vec::with_capacity(instances.len() * configs.len());
    for config in configs {
        let label = config.label();
        for (name, inst) in instances {
            let out = match solve(inst, config) {
                Ok(out) => out,
                Err(e) => {
                    log::warn!("{name} {label}: {e}");
                    rows.push(BenchmarkRow { instance: name.clone(), config: label.clone(), stats: RunStats::failed() });
                    continue;
                }
            };
            log::info!(
                "{name} {label}: solved={} gap={:.4} nodes={}",
                out.stats.solved,
                out.stats.gap,
                out.stats.nodes
            );
            rows.push(BenchmarkRow { instance: name.clone(), config: label.clone(), stats: out.stats });
        }
    }
    Ok(rows)
}

fn record(instance: &str, config: &str, solved: String, s: &Aggregate) -> Vec<String> {
    let mut r = vec![
        instance.to_string(),
        config.to_string(),
        solved,
        format!("{:.6}", s.gap),
        format!("{:.3}", s.time),
        format!("{:.1}", s.nodes),
        format!("{:.1}", s.cols),
        format!("{:.1}", s.rows),
    ];
    r.extend(s.cuts.iter().map(|c| format!("{c:.1}")));
    r.push(format!("{:.3}", s.root_lp_solved));
    r.push(format!("{:.0}", s.work));
    r
}

#[derive(Default)]
struct Aggregate {
    gap: f64,
    time: f64,
    nodes: f64,
    cols: f64,
    rows: f64,
    cuts: [f64; 7],
    root_lp_solved: f64,
    work: f64,
}

impl Aggregate {
    fn of(s: &RunStats) -> Self {
        let mut cuts = [0.0; 7];
        for f in CutFamily::ALL {
            cuts[f.index()] = s.cuts[f.index()] as f64;
        }
        Self {
            gap: s.gap,
            time: s.time,
            nodes: s.nodes as f64,
            cols: s.columns as f64,
            rows: s.rows as f64,
            cuts,
            root_lp_solved: f64::from(u8::from(s.root_lp_solved)),
            work: s.work as f64,
        }
    }

    fn mean<'a>(stats: impl Iterator<Item = &'a RunStats>) -> (Self, usize, usize) {
        let mut m = Self::default();
        let (mut count, mut solved) = (0, 0);
        for s in stats {
            let a = Self::of(s);
            m.gap += a.gap;
            m.time += a.time;
            m.nodes += a.nodes;
            m.cols += a.cols;
            m.rows += a.rows;
            for k in 0..7 {
                m.cuts[k] += a.cuts[k];
            }
            m.root_lp_solved += a.root_lp_solved;
            m.work += a.work;
            count += 1;
            solved += usize::from(s.solved);
        }
        if count > 0 {
            let c = count as f64;
            m.gap /= c;
            m.time /= c;
            m.nodes /= c;
            m.cols /= c;
            m.rows /= c;
            for v in &mut m.cuts {
                *v /= c;
            }
            m.root_lp_solved /= c;
            m.work /= c;
        }
        (m, count, solved)
    }
}

/// One line per run, then one `mean` line per configuration whose `solved`
/// field reads `solved/total`.
pub fn write_csv<W: Write>(out: W, rows: &[BenchmarkRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let mut configs: Vec<&str> = Vec::new();
    for r in rows {
        if !configs.contains(&r.config.as_str()) {
            configs.push(&r.config);
        }
        let solved = if r.stats.solved { "1" } else { "0" };
        w.write_record(record(&r.instance, &r.config, solved.to_string(), &Aggregate::of(&r.stats)))?;
    }
    for c in configs {
        let (m, count, solved) = Aggregate::mean(rows.iter().filter(|r| r.config == c).map(|r| &r.stats));
        w.write_record(record("mean", c, format!("{solved}/{count}"), &m))?;
    }
    w.flush()?;
    Ok(())
}

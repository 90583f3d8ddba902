//! Batch comparison of the pipeline against the exact optimum.

use std::fmt::Write;
use std::path::Path;
use std::time::Instant;

use geoknap::exact::{optimal_pack, ExactConfig};
use geoknap::Item;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::instance::{parse_instance, Instance, ParseError};
use crate::pipeline::{run_pipeline, Branch, PipelineConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub id: String,
    pub seed: u64,
    pub optimum: u64,
    /// Profit of the branch chosen automatically.
    pub profit: u64,
    pub branch: Branch,
    /// Profit with the small branch forced, and with the large one.
    pub small_profit: Option<u64>,
    pub large_profit: Option<u64>,
    /// `optimum / max(profit, 1)`.
    pub ratio: f64,
    pub millis: u128,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    fn ok_rows(&self) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(|r| r.failure.is_none())
    }

    pub fn max_ratio(&self) -> Option<f64> {
        self.ok_rows().map(|r| r.ratio).reduce(f64::max)
    }

    pub fn mean_ratio(&self) -> Option<f64> {
        let n = self.ok_rows().count();
        (n > 0).then(|| self.ok_rows().map(|r| r.ratio).sum::<f64>() / n as f64)
    }

    pub fn failures(&self) -> usize {
        self.rows.len() - self.ok_rows().count()
    }

    /// A fixed-width table. Wall times are left out unless asked for, so the
    /// default output depends only on the instances and seeds.
    pub fn render(&self, times: bool) -> String {
        let mut s = String::new();
        write!(
            s,
            "{:<16} {:>6} {:>8} {:>8} {:>7} {:>6} {:>8} {:>8}",
            "instance", "seed", "optimum", "profit", "ratio", "branch", "small", "large"
        )
        .unwrap();
        if times {
            s.push_str("  time_ms");
        }
        s.push('\n');
        let opt = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        for r in &self.rows {
            if let Some(f) = &r.failure {
                writeln!(s, "{:<16} {:>6} FAILED {f}", r.id, r.seed).unwrap();
                continue;
            }
            write!(
                s,
                "{:<16} {:>6} {:>8} {:>8} {:>7.3} {:>6} {:>8} {:>8}",
                r.id,
                r.seed,
                r.optimum,
                r.profit,
                r.ratio,
                r.branch.name(),
                opt(r.small_profit),
                opt(r.large_profit)
            )
            .unwrap();
            if times {
                write!(s, "  {:>7}", r.millis).unwrap();
            }
            s.push('\n');
        }
        let f = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
        writeln!(
            s,
            "rows {}  failures {}  max ratio {}  mean ratio {}",
            self.rows.len(),
            self.failures(),
            f(self.max_ratio()),
            f(self.mean_ratio())
        )
        .unwrap();
        s
    }
}

fn run_one(id: &str, inst: &Instance, cfg: &PipelineConfig, seed: u64) -> BenchRow {
    let started = Instant::now();
    let mut row = BenchRow {
        id: id.to_string(),
        seed,
        optimum: 0,
        profit: 0,
        branch: Branch::Auto,
        small_profit: None,
        large_profit: None,
        ratio: 0.0,
        millis: 0,
        failure: None,
    };
    let exact = ExactConfig {
        allow_rotation: inst.rotate,
        ..cfg.exact
    };
    match optimal_pack(&inst.items, inst.side, &exact) {
        Ok(sol) => row.optimum = sol.profit,
        Err(e) => {
            row.failure = Some(format!("exact: {e}"));
            return row;
        }
    }
    let with = |branch| PipelineConfig {
        seed,
        branch,
        ..cfg.clone()
    };
    match run_pipeline(inst, &with(Branch::Auto)) {
        Ok(run) => {
            row.profit = run.profit;
            row.branch = run.branch;
            row.ratio = row.optimum as f64 / run.profit.max(1) as f64;
        }
        Err(e) => {
            row.failure = Some(e.to_string());
            return row;
        }
    }
    row.small_profit = run_pipeline(inst, &with(Branch::Small))
        .ok()
        .map(|r| r.profit);
    row.large_profit = run_pipeline(inst, &with(Branch::Large))
        .ok()
        .map(|r| r.profit);
    row.millis = started.elapsed().as_millis();
    row
}

/// Runs every instance under every seed in parallel; rows come back sorted
/// by instance id, then seed.
pub fn bench(instances: &[(String, Instance)], cfg: &PipelineConfig, seeds: &[u64]) -> BenchReport {
    let jobs: Vec<(&String, &Instance, u64)> = instances
        .iter()
        .flat_map(|(id, inst)| seeds.iter().map(move |&s| (id, inst, s)))
        .collect();
    let mut rows: Vec<BenchRow> = jobs
        .par_iter()
        .map(|(id, inst, s)| run_one(id, inst, cfg, *s))
        .collect();
    rows.sort_by(|a, b| a.id.cmp(&b.id).then(a.seed.cmp(&b.seed)));
    BenchReport { rows }
}

/// Reads every `*.txt` file of a directory as an instance named after the
/// file stem, in name order.
pub fn load_dir(dir: &Path) -> Result<Vec<(String, Instance)>, LoadError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| LoadError::Io(dir.display().to_string(), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| LoadError::Io(p.display().to_string(), e))?;
            let inst =
                parse_instance(&text).map_err(|e| LoadError::Parse(p.display().to_string(), e))?;
            let id = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((id, inst))
        })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}: {1}")]
    Parse(String, ParseError),
}

/// A random instance of at most `max_items` unit-profit items, each one unit
/// thick and longer than half the knapsack side, lying either way.
pub fn skewed_instance(seed: u64, side: i64, max_items: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_items.max(1));
    let items = (0..n)
        .map(|i| {
            let long = rng.gen_range(side / 2 + 1..=side);
            if rng.gen_bool(0.5) {
                Item::new(i as u32 + 1, long, 1, 1)
            } else {
                Item::new(i as u32 + 1, 1, long, 1)
            }
        })
        .collect();
    Instance::new(side, items)
}

/// `count` seeded skewed instances named `skewed-<seed>`.
pub fn skewed_batch(
    first_seed: u64,
    count: usize,
    side: i64,
    max_items: usize,
) -> Vec<(String, Instance)> {
    (0..count as u64)
        .map(|k| {
            (
                format!("skewed-{:03}", first_seed + k),
                skewed_instance(first_seed + k, side, max_items),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_batch() {
        let r = bench(&[], &PipelineConfig::default(), &[0]);
        assert!(r.rows.is_empty());
        assert_eq!(r.max_ratio(), None);
    }

    #[test]
    fn one_item_instances_have_ratio_one() {
        let batch: Vec<(String, Instance)> = (1..=4)
            .map(|k| {
                (
                    format!("one-{k}"),
                    Instance::new(8, vec![Item::new(1, k, k, 3)]),
                )
            })
            .collect();
        let r = bench(&batch, &PipelineConfig::default(), &[0, 1]);
        assert_eq!(r.rows.len(), 8);
        assert!(r
            .rows
            .iter()
            .all(|row| row.failure.is_none() && row.ratio == 1.0));
    }

    #[test]
    fn report_is_reproducible() {
        let batch = skewed_batch(0, 6, 16, 6);
        let a = bench(&batch, &PipelineConfig::default(), &[0, 1]).render(false);
        let b = bench(&batch, &PipelineConfig::default(), &[0, 1]).render(false);
        assert_eq!(a, b);
    }
}

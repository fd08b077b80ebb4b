//! Configuration, the Monte Carlo harness, statistics and persistence.

mod config;
mod records;

use std::path::Path;

use rayon::prelude::*;

pub use config::{ConfigFile, ExperimentConfig, ExperimentMode, DEFAULT_BLOCKS};
pub use records::{
    parse_ccdf, parse_region, parse_trials, read_text, render_ccdf, render_region, render_trials,
    write_text, CcdfRow, RegionRow, TrialRecord, CCDF_HEADER, REGION_HEADER, TRIAL_HEADER,
};

use crate::pipeline::{run_block, BlockResult, DsCodingConfig};
use crate::region::{bt_boundary, GaussianSourcePair};
use crate::{Error, Result};

/// Means of the per-block distortions with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub blocks: usize,
    pub mean1: f64,
    pub mean2: f64,
    pub se1: f64,
    pub se2: f64,
}

impl Summary {
    pub fn total(&self) -> f64 {
        self.mean1 + self.mean2
    }
}

fn mean_se(v: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = v.clone().count() as f64;
    let m = v.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (m, 0.0);
    }
    let var = v.map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

pub fn summarize(records: &[TrialRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::domain("no records to summarize"));
    }
    let (mean1, se1) = mean_se(records.iter().map(|r| r.delta1));
    let (mean2, se2) = mean_se(records.iter().map(|r| r.delta2));
    Ok(Summary {
        blocks: records.len(),
        mean1,
        mean2,
        se1,
        se2,
    })
}

fn delta(r: &TrialRecord, which: usize) -> f64 {
    if which == 1 {
        r.delta1
    } else {
        r.delta2
    }
}

/// Empirical `Pr(delta_which > d)` at every grid value.
pub fn ccdf(records: &[TrialRecord], which: usize, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() {
        return Err(Error::domain("empty ccdf grid"));
    }
    if records.is_empty() {
        return Err(Error::domain("no records"));
    }
    if which != 1 && which != 2 {
        return Err(Error::domain(format!("source index must be 1 or 2, got {which}")));
    }
    let mut v: Vec<f64> = records.iter().map(|r| delta(r, which)).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    Ok(grid
        .iter()
        .map(|&d| {
            let le = v.partition_point(|&x| x <= d);
            (d, (v.len() - le) as f64 / n)
        })
        .collect())
}

/// `points` equally spaced values from 0 to the largest observed distortion.
pub fn ccdf_grid(records: &[TrialRecord], points: usize) -> Vec<f64> {
    let hi = records
        .iter()
        .flat_map(|r| [r.delta1, r.delta2])
        .fold(0.0, f64::max);
    let k = points.max(2) - 1;
    (0..=k).map(|i| hi * i as f64 / k as f64).collect()
}

/// CCDF rows of both sources over the same grid.
pub fn ccdf_rows(records: &[TrialRecord], grid: &[f64]) -> Result<Vec<CcdfRow>> {
    let mut rows = Vec::with_capacity(2 * grid.len());
    for source in 1..=2u8 {
        for (d, prob) in ccdf(records, source as usize, grid)? {
            rows.push(CcdfRow { source, d, prob });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

impl From<BlockResult> for TrialRecord {
    fn from(b: BlockResult) -> Self {
        Self {
            block: b.block,
            delta1: b.delta1,
            delta2: b.delta2,
            bits1: b.bits1,
            bits2: b.bits2,
            wraps1: b.wraps1,
            wraps2: b.wraps2,
        }
    }
}

/// Runs the configured pipeline over `cfg.blocks` blocks on `cfg.workers`
/// threads. Records come back sorted by block index.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    if cfg.mode == ExperimentMode::Region {
        return Err(Error::config("region mode does not simulate; use the region command"));
    }
    run_blocks(&build_coding(cfg)?, cfg.blocks, cfg.workers)
}

/// Builds the coding system of `cfg`; parameter combinations the
/// pipeline rejects are reported as configuration errors.
pub fn build_coding(cfg: &ExperimentConfig) -> Result<DsCodingConfig> {
    DsCodingConfig::build(&cfg.params).map_err(|e| match e {
        Error::Domain(m) => Error::config(m),
        Error::NotPowerOfTwo(n) => Error::config(format!("{n} is not a power of two")),
        other => other,
    })
}

/// [`run_experiment`] for an already built system.
pub fn run_blocks(coding: &DsCodingConfig, blocks: u64, workers: usize) -> Result<ExperimentOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
    let results: Vec<BlockResult> = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| run_block(coding, b))
            .collect::<Result<_>>()
    })?;
    let mut records: Vec<TrialRecord> = results.into_iter().map(TrialRecord::from).collect();
    records.sort_by_key(|r| r.block);
    let summary = summarize(&records)?;
    Ok(ExperimentOutput { records, summary })
}

/// Frontier rows of the distortion region followed by the `markers`.
pub fn region_rows(
    src: &GaussianSourcePair,
    r1: f64,
    r2: f64,
    grid_size: usize,
    markers: &[RegionRow],
) -> Result<Vec<RegionRow>> {
    let mut rows: Vec<RegionRow> = bt_boundary(src, r1, r2, grid_size)?
        .into_iter()
        .map(|(d1, d2)| RegionRow {
            mode: "frontier".into(),
            d1,
            d2,
        })
        .collect();
    rows.extend_from_slice(markers);
    Ok(rows)
}

pub fn emit_region_csv(
    src: &GaussianSourcePair,
    r1: f64,
    r2: f64,
    grid_size: usize,
    markers: &[RegionRow],
    path: &Path,
) -> Result<()> {
    write_text(path, &render_region(&region_rows(src, r1, r2, grid_size, markers)?))
}

//! Instance files, the end-to-end pipeline, benchmarking and rendering for
//! the `geoknap` command.

pub mod bench;
pub mod instance;
pub mod pipeline;
pub mod render;

pub use bench::{bench, load_dir, skewed_batch, skewed_instance, BenchReport, BenchRow};
pub use instance::{
    parse_corridors, parse_instance, parse_packing, write_packing, Instance, ParseError,
};
pub use pipeline::{run_pipeline, Branch, PipelineConfig, PipelineError, PipelineRun, StageEntry};
pub use render::{render_corridors, render_packing};

use geoknap::dp::DpCaps;

/// Reads `key=value` pairs separated by commas into DP caps. Keys are
/// `chords`, `boundary`, `cells` and `base`; missing keys keep defaults.
pub fn parse_caps(text: &str) -> Result<DpCaps, String> {
    let mut caps = DpCaps::default();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
        let v: u64 = v
            .trim()
            .parse()
            .map_err(|_| format!("bad number in `{part}`"))?;
        match k.trim() {
            "chords" => caps.chord_cap = v as usize,
            "boundary" => caps.boundary_cap = v as usize,
            "cells" => caps.cell_budget = v,
            "base" => caps.base_budget = v,
            other => return Err(format!("unknown cap `{other}`")),
        }
    }
    Ok(caps)
}

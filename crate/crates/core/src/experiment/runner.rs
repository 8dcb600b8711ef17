use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::heatmap::{render_heatmap, ColorScale};
use super::io::{write_surface_files, SurfaceMetadata};
use crate::error::io_error;
use crate::otoc::{build_surface_with, Execution, SpreadSurface};
use crate::Result;

/// Environment variable naming the default output root.
pub const OUTPUT_DIR_ENV: &str = "OPSPREAD_OUTPUT_DIR";

/// Base name of the CSV/JSON pair written by [`run`].
pub const SURFACE_STEM: &str = "surface";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides both the config and the environment.
    pub output_dir: Option<PathBuf>,
    pub execution: Execution,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub surface: SpreadSurface,
    pub metadata: SurfaceMetadata,
    pub output_dir: PathBuf,
    pub csv: PathBuf,
    pub json: PathBuf,
    pub heatmaps: Vec<PathBuf>,
}

/// Output directory: explicit option, then the config, then `$OPSPREAD_OUTPUT_DIR/<name>`,
/// then `out/<name>`.
pub fn resolve_output_dir(config: &ExperimentConfig, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = &config.output_dir {
        return p.clone();
    }
    let root = std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"));
    root.join(&config.name)
}

/// Computes the surface and writes `surface.csv`, `surface.json` and one
/// `heatmap_<column>.svg` per populated column.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutput> {
    let surface = build_surface_with(config, opts.execution)?;
    let metadata = SurfaceMetadata::for_run(&surface, config);
    let dir = resolve_output_dir(config, opts.output_dir.as_deref());
    let (csv, json) = write_surface_files(&dir, SURFACE_STEM, &surface, &metadata)?;
    let mut heatmaps = Vec::new();
    for v in surface.present_variants() {
        let path = dir.join(format!("heatmap_{}.svg", v.column()));
        std::fs::write(&path, render_heatmap(&surface, v, ColorScale::Sequential))
            .map_err(io_error(&path))?;
        heatmaps.push(path);
    }
    Ok(RunOutput {
        surface,
        metadata,
        output_dir: dir,
        csv,
        json,
        heatmaps,
    })
}

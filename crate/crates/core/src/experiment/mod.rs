//! Config-driven experiments: presets, surface files and heatmaps.

mod config;
pub mod heatmap;
pub mod io;
pub mod presets;
mod runner;

pub use config::{
    validate_config, Calibration, ExperimentConfig, MitigationConfig, Pipeline, RegimeSpec,
    DEFAULT_ELL_MAX, DEFAULT_N, DEFAULT_SHOTS, DEFAULT_TAU,
};
pub use heatmap::{render_heatmap, ColorScale};
pub use io::{diff_surfaces, load_metadata, load_surface, SurfaceMetadata};
pub use presets::{preset, preset_names};
pub use runner::{resolve_output_dir, run, RunOptions, RunOutput, OUTPUT_DIR_ENV, SURFACE_STEM};

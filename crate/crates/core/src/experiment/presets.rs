//! Figure presets shipped with the crate as TOML files.

use super::config::ExperimentConfig;
use crate::{Error, Result};

/// `(name, TOML source)` for every bundled preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig1a", include_str!("../../presets/fig1a.toml")),
    ("fig1b", include_str!("../../presets/fig1b.toml")),
    ("fig2", include_str!("../../presets/fig2.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig5", include_str!("../../presets/fig5.toml")),
    ("fig5b", include_str!("../../presets/fig5b.toml")),
    ("fig6a", include_str!("../../presets/fig6a.toml")),
    ("fig6b", include_str!("../../presets/fig6b.toml")),
    ("s7", include_str!("../../presets/s7.toml")),
    ("s8", include_str!("../../presets/s8.toml")),
    ("s9", include_str!("../../presets/s9.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

pub fn preset_source(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| *src)
        .ok_or_else(|| {
            let known: Vec<_> = preset_names().collect();
            Error::Config(format!(
                "unknown preset `{name}` (known: {})",
                known.join(", ")
            ))
        })
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::from_toml_str(preset_source(name)?, name)
}

/// First comment line of the preset file.
pub fn preset_summary(name: &str) -> Result<&'static str> {
    Ok(preset_source(name)?
        .lines()
        .find_map(|l| l.strip_prefix('#'))
        .map(str::trim)
        .unwrap_or(""))
}

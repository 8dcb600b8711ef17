use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use opspread_core::experiment::io::{write_surface_files, DifferenceSource};
use opspread_core::experiment::presets::{preset_source, preset_summary};
use opspread_core::experiment::{
    diff_surfaces, load_metadata, load_surface, preset, preset_names, render_heatmap, run,
    validate_config, ColorScale, ExperimentConfig, RunOptions, SurfaceMetadata,
};
use opspread_core::otoc::{Execution, Variant};

#[derive(Debug, Parser)]
#[command(
    name = "opspread",
    version,
    about = "Operator-spreading surfaces for the Ising chain"
)]
struct Cli {
    /// Override the config seed.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    seed: Option<u64>,

    /// Output directory; defaults to the config's, then $OPSPREAD_OUTPUT_DIR/<name>, then
    /// out/<name>.
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,

    /// Worker threads for grid evaluation; 1 runs sequentially.
    #[arg(long, short = 'j', global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a surface from a config file and write CSV, JSON and heatmaps.
    Run {
        /// Config file, or the name of a bundled preset.
        config: String,
    },
    /// Parse a config, apply defaults and print the resolved config.
    Validate { config: String },
    /// Render one column of a surface CSV as an SVG heatmap.
    Render {
        surface: PathBuf,
        #[arg(long)]
        variant: Variant,
        /// Defaults to heatmap_<variant>.svg next to the CSV.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Pointwise difference `a[column] − b[against]`, written as a new surface.
    Diff {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        column: Variant,
        /// Column of `b` to subtract; defaults to `--column`.
        #[arg(long)]
        against: Option<Variant>,
        /// Output stem; writes <stem>.csv and <stem>.json.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Bundled figure presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Debug, Subcommand)]
enum PresetAction {
    /// List preset names with a one-line summary.
    List,
    /// Print a preset's config file.
    Show { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let execution = execution(cli.jobs)?;
    match cli.command {
        Command::Run { config } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let opts = RunOptions {
                output_dir: cli.output_dir,
                execution,
            };
            let out = run(&cfg, &opts)?;
            println!("{}", out.csv.display());
            println!("{}", out.json.display());
            for h in &out.heatmaps {
                println!("{}", h.display());
            }
        }
        Command::Validate { config } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            print!("{}", cfg.to_toml_string());
        }
        Command::Render {
            surface,
            variant,
            out,
        } => {
            let s = load_surface(&surface)?;
            if !s.present_variants().contains(&variant) {
                bail!("column {variant} is empty in {}", surface.display());
            }
            let scale = match load_metadata(&surface)? {
                Some(m) if m.difference => ColorScale::Diverging,
                _ => ColorScale::Sequential,
            };
            let path = out
                .unwrap_or_else(|| sibling(&surface, &format!("heatmap_{}.svg", variant.column())));
            std::fs::write(&path, render_heatmap(&s, variant, scale))
                .with_context(|| format!("writing {}", path.display()))?;
            println!("{}", path.display());
        }
        Command::Diff {
            a,
            b,
            column,
            against,
            out,
        } => {
            let against = against.unwrap_or(column);
            let sa = load_surface(&a)?;
            let sb = load_surface(&b)?;
            let d = diff_surfaces(&sa, &sb, column, against)?;
            let mut meta = SurfaceMetadata::for_surface(&d);
            meta.difference = true;
            meta.difference_of = Some(DifferenceSource {
                minuend: a.display().to_string(),
                minuend_column: column,
                subtrahend: b.display().to_string(),
                subtrahend_column: against,
            });
            let stem_path = match (out, cli.output_dir) {
                (Some(o), _) => o,
                (None, Some(dir)) => dir.join(default_diff_stem(column, against)),
                (None, None) => sibling(&a, &default_diff_stem(column, against)),
            };
            let dir = match stem_path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let stem = stem_path
                .file_stem()
                .and_then(|s| s.to_str())
                .context("diff output needs a file name")?;
            let (csv, json) = write_surface_files(&dir, stem, &d, &meta)?;
            println!("{}", csv.display());
            println!("{}", json.display());
        }
        Command::Presets { action } => match action {
            PresetAction::List => {
                for name in preset_names() {
                    println!("{name:<6} {}", preset_summary(name)?);
                }
            }
            PresetAction::Show { name } => print!("{}", preset_source(&name)?),
        },
    }
    Ok(())
}

fn execution(jobs: Option<usize>) -> Result<Execution> {
    match jobs {
        Some(0) => bail!("--jobs must be at least 1"),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => Ok(Execution::Parallel { threads: Some(n) }),
        #[cfg(not(feature = "parallel"))]
        Some(_) => {
            eprintln!("warning: built without the `parallel` feature; running sequentially");
            Ok(Execution::Sequential)
        }
        None => Ok(Execution::default()),
    }
}

/// A path on disk wins; otherwise a bundled preset of that name.
fn load_config(arg: &str) -> Result<ExperimentConfig> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(validate_config(path)?);
    }
    if preset_names().any(|n| n == arg) {
        return Ok(preset(arg)?);
    }
    bail!("no config file or preset named `{arg}` (see `opspread presets list`)")
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.join(name),
        _ => PathBuf::from(name),
    }
}

fn default_diff_stem(column: Variant, against: Variant) -> String {
    format!("diff_{}_{}", column.column(), against.column())
}

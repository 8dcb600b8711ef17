//! TOML experiment configuration.
//!
//! A minimal file only needs `regime`; everything else has a default. Every violated
//! invariant is reported with its field name (and line, when the key appears literally).
//!
//! ```toml
//! name = "fig4"
//! regime = "integrable"        # or: regime = { j = -1.0, b_x = 0.7, b_z = 1.5 }
//! n = 4
//! tau = 0.06
//! k = 6
//! ell_max = 24
//! pipeline = "mitigated"       # exact | trotter_exact | sampled | noisy | mitigated
//!
//! [noise]
//! base = "calibrated"          # or "ideal"
//! spam = [0.043, 0.015, 0.017, 0.017]
//!
//! [mitigation]
//! order = "tmem_then_zne"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::io_error;
use crate::ising::{IsingParams, Regime};
use crate::mitigation::MitigationOrder;
use crate::noise::{NoiseModel, ReadoutError};
use crate::otoc::{InitialState, Probe};
use crate::weave::{ShiftPlacement, WeaveSchedule};
use crate::{Error, FieldError, Result};

pub const DEFAULT_SHOTS: u64 = 8192;
pub const DEFAULT_N: usize = 4;
pub const DEFAULT_TAU: f64 = 0.06;
pub const DEFAULT_ELL_MAX: usize = 24;

/// How the surface is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// Exact propagator, fixed-node commutator from the exact `|F|`.
    #[default]
    Exact,
    /// Dense unitary of the weave circuit, no sampling.
    TrotterExact,
    /// Noiseless weave circuits, finite shots.
    Sampled,
    /// Calibrated CNOT and readout noise, finite shots.
    Noisy,
    /// As `Noisy`, with readout mitigation and zero-noise extrapolation enabled.
    Mitigated,
}

impl Pipeline {
    pub fn is_unitary(self) -> bool {
        matches!(self, Pipeline::Exact | Pipeline::TrotterExact)
    }

    pub fn is_noisy(self) -> bool {
        matches!(self, Pipeline::Noisy | Pipeline::Mitigated)
    }
}

/// Source of the TMEM transition matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Calibration {
    /// Tensor product of the per-qubit readout matrices.
    #[default]
    Analytic,
    /// Estimated from sampled basis-state preparations.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegimeSpec {
    Preset(Regime),
    Explicit { j: f64, b_x: f64, b_z: f64 },
}

impl RegimeSpec {
    pub fn params(&self, n: usize) -> Result<IsingParams> {
        match *self {
            RegimeSpec::Preset(r) => r.params(n),
            RegimeSpec::Explicit { j, b_x, b_z } => IsingParams::new(n, j, b_x, b_z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MitigationConfig {
    pub tmem: bool,
    pub zne: bool,
    pub order: MitigationOrder,
    pub calibration: Calibration,
    pub calibration_shots: u64,
}

/// A fully resolved, validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub regime: RegimeSpec,
    pub n: usize,
    pub tau: f64,
    pub k: usize,
    pub ell_max: usize,
    pub magic: bool,
    pub magic_override: bool,
    pub shift: ShiftPlacement,
    pub pipeline: Pipeline,
    pub shots: u64,
    pub seed: u64,
    pub state: InitialState,
    pub probe: Probe,
    pub noise: NoiseModel,
    pub mitigation: MitigationConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn params(&self) -> Result<IsingParams> {
        self.regime.params(self.n)
    }

    pub fn schedule(&self) -> WeaveSchedule {
        WeaveSchedule {
            tau: self.tau,
            k: self.k,
            ell_max: self.ell_max,
            magic: self.magic,
            relax_magic_constraint: self.magic_override,
            shift_placement: self.shift,
        }
    }

    pub fn grid_points(&self) -> usize {
        self.n * (self.ell_max + 1)
    }

    /// Parses and validates TOML text. `default_name` is used when the file has no `name`.
    pub fn from_toml_str(src: &str, default_name: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(src).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        raw.resolve(src, default_name)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("resolved configs serialize")
    }
}

/// Reads, parses and validates a config file.
pub fn validate_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(io_error(path))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("experiment");
    ExperimentConfig::from_toml_str(&src, stem).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    regime: RawRegime,
    n: Option<i64>,
    tau: Option<f64>,
    k: Option<i64>,
    ell_max: Option<i64>,
    magic: Option<bool>,
    magic_override: Option<bool>,
    shift: Option<ShiftPlacement>,
    pipeline: Option<Pipeline>,
    shots: Option<i64>,
    seed: Option<i64>,
    state: Option<InitialState>,
    probe: Option<Probe>,
    output_dir: Option<PathBuf>,
    #[serde(default)]
    noise: RawNoise,
    #[serde(default)]
    mitigation: RawMitigation,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawRegime {
    Name(String),
    Explicit { j: f64, b_x: f64, b_z: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum NoiseBase {
    Ideal,
    Calibrated,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    base: Option<NoiseBase>,
    cnot_error: Option<f64>,
    edge_cnot_errors: Option<Vec<f64>>,
    spam: Option<Vec<f64>>,
    readout_p1_given0: Option<Vec<f64>>,
    readout_p0_given1: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMitigation {
    tmem: Option<bool>,
    zne: Option<bool>,
    order: Option<MitigationOrder>,
    calibration: Option<Calibration>,
    calibration_shots: Option<i64>,
}

/// Collects field errors, tagging each with the line of its key when found.
struct Diagnostics<'a> {
    src: &'a str,
    errors: Vec<FieldError>,
}

impl Diagnostics<'_> {
    fn push(&mut self, field: &str, message: impl Into<String>) {
        let message = message.into();
        let key = field.rsplit('.').next().unwrap_or(field);
        let line = self.src.lines().position(|l| {
            l.trim_start()
                .strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        });
        let message = match line {
            Some(i) => format!("{message} (line {})", i + 1),
            None => message,
        };
        self.errors.push(FieldError::new(field, message));
    }

    fn count(&mut self, field: &str, v: Option<i64>, default: usize, min: i64) -> usize {
        match v {
            None => default,
            Some(x) if x < min => {
                self.push(field, format!("must be >= {min}, got {x}"));
                default
            }
            Some(x) => x as usize,
        }
    }
}

impl RawConfig {
    fn resolve(self, src: &str, default_name: &str) -> Result<ExperimentConfig> {
        let mut d = Diagnostics {
            src,
            errors: Vec::new(),
        };

        let regime = match self.regime {
            RawRegime::Name(s) => match s.as_str() {
                "integrable" => RegimeSpec::Preset(Regime::Integrable),
                "chaotic" => RegimeSpec::Preset(Regime::Chaotic),
                other => {
                    d.push(
                        "regime",
                        format!("unknown regime `{other}` (expected integrable, chaotic or a table {{ j, b_x, b_z }})"),
                    );
                    RegimeSpec::Preset(Regime::Integrable)
                }
            },
            RawRegime::Explicit { j, b_x, b_z } => {
                if ![j, b_x, b_z].iter().all(|x| x.is_finite()) {
                    d.push("regime", "couplings must be finite");
                }
                RegimeSpec::Explicit { j, b_x, b_z }
            }
        };

        let n = d.count("n", self.n, DEFAULT_N, 3);
        let tau = self.tau.unwrap_or(DEFAULT_TAU);
        if !(tau.is_finite() && tau > 0.0) {
            d.push("tau", format!("must be > 0, got {tau}"));
        }
        let k = d.count("k", self.k, 1, 1);
        let ell_max = d.count("ell_max", self.ell_max, DEFAULT_ELL_MAX, 0);
        let shots = d.count("shots", self.shots, DEFAULT_SHOTS as usize, 1) as u64;
        let seed = d.count("seed", self.seed, 0, 0) as u64;
        let pipeline = self.pipeline.unwrap_or_default();
        let magic = self.magic.unwrap_or(false);
        let magic_override = self.magic_override.unwrap_or(false);
        let state = self.state.unwrap_or_default();
        let probe = self.probe.unwrap_or_default();

        if !pipeline.is_unitary() {
            if state != InitialState::Zeros {
                d.push(
                    "state",
                    "alternative initial states need the exact or trotter_exact pipeline",
                );
            }
            if probe != Probe::X {
                d.push(
                    "probe",
                    "the Y probe needs the exact or trotter_exact pipeline",
                );
            }
        }

        let noise = self.noise.resolve(&mut d, n, pipeline, seed);
        let mitigation = self.mitigation.resolve(&mut d, pipeline);

        if d.errors.is_empty() {
            let schedule = WeaveSchedule {
                tau,
                k,
                ell_max,
                magic,
                relax_magic_constraint: magic_override,
                shift_placement: self.shift.unwrap_or_default(),
            };
            match regime.params(n) {
                Err(e) => d.push("regime", e.to_string()),
                Ok(p) => {
                    if let Err(e) = schedule.validate(&p) {
                        d.push(
                            "magic",
                            e.to_string()
                                .trim_start_matches("configuration error: ")
                                .to_string(),
                        );
                    }
                }
            }
        }

        if !d.errors.is_empty() {
            return Err(Error::InvalidConfig(d.errors));
        }
        Ok(ExperimentConfig {
            name: self.name.unwrap_or_else(|| default_name.to_string()),
            regime,
            n,
            tau,
            k,
            ell_max,
            magic,
            magic_override,
            shift: self.shift.unwrap_or_default(),
            pipeline,
            shots,
            seed,
            state,
            probe,
            noise,
            mitigation,
            output_dir: self.output_dir,
        })
    }
}

impl RawNoise {
    fn resolve(
        self,
        d: &mut Diagnostics<'_>,
        n: usize,
        pipeline: Pipeline,
        seed: u64,
    ) -> NoiseModel {
        let default_base = if pipeline.is_noisy() {
            NoiseBase::Calibrated
        } else {
            NoiseBase::Ideal
        };
        let mut model = match self.base.unwrap_or(default_base) {
            NoiseBase::Ideal => NoiseModel::ideal(n),
            NoiseBase::Calibrated => NoiseModel::calibrated(n),
        };
        model.seed = seed;
        let probability = |d: &mut Diagnostics<'_>, field: &str, x: f64| {
            if !(0.0..=1.0).contains(&x) {
                d.push(field, format!("must lie in [0, 1], got {x}"));
            }
        };
        if let Some(p) = self.cnot_error {
            probability(d, "noise.cnot_error", p);
            model.cnot_error = p;
            if self.edge_cnot_errors.is_none() {
                model.edge_cnot_errors.clear();
            }
        }
        if let Some(edges) = self.edge_cnot_errors {
            if edges.len() != n.saturating_sub(1) {
                d.push(
                    "noise.edge_cnot_errors",
                    format!(
                        "expected {} entries (one per bond), got {}",
                        n - 1,
                        edges.len()
                    ),
                );
            }
            for &e in &edges {
                probability(d, "noise.edge_cnot_errors", e);
            }
            model.edge_cnot_errors = edges;
        }
        let per_qubit =
            |d: &mut Diagnostics<'_>, field: &str, v: Option<Vec<f64>>| -> Option<Vec<f64>> {
                let v = v?;
                if v.len() != n {
                    d.push(
                        field,
                        format!("expected {n} entries (one per qubit), got {}", v.len()),
                    );
                    return None;
                }
                for &x in &v {
                    probability(d, field, x);
                }
                Some(v)
            };
        if let Some(spam) = per_qubit(d, "noise.spam", self.spam) {
            model.readout = spam.into_iter().map(ReadoutError::symmetric).collect();
        }
        if let Some(v) = per_qubit(d, "noise.readout_p1_given0", self.readout_p1_given0) {
            for (r, x) in model.readout.iter_mut().zip(v) {
                r.p1_given0 = x;
            }
        }
        if let Some(v) = per_qubit(d, "noise.readout_p0_given1", self.readout_p0_given1) {
            for (r, x) in model.readout.iter_mut().zip(v) {
                r.p0_given1 = x;
            }
        }
        model
    }
}

impl RawMitigation {
    fn resolve(self, d: &mut Diagnostics<'_>, pipeline: Pipeline) -> MitigationConfig {
        let on = pipeline == Pipeline::Mitigated;
        let tmem = self.tmem.unwrap_or(on);
        let zne = self.zne.unwrap_or(on);
        if pipeline.is_unitary() {
            if tmem {
                d.push(
                    "mitigation.tmem",
                    "mitigation needs a sampled, noisy or mitigated pipeline",
                );
            }
            if zne {
                d.push(
                    "mitigation.zne",
                    "mitigation needs a sampled, noisy or mitigated pipeline",
                );
            }
        }
        let calibration_shots = d.count(
            "mitigation.calibration_shots",
            self.calibration_shots,
            DEFAULT_SHOTS as usize,
            1,
        ) as u64;
        MitigationConfig {
            tmem,
            zne,
            order: self.order.unwrap_or_default(),
            calibration: self.calibration.unwrap_or_default(),
            calibration_shots,
        }
    }
}

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    commutator_from_otoc, fabs_from_return_probability, fabs_measurement_circuit,
    otoc_from_unitary, ExactOtoc, InitialState, OtocPoint, Probe,
};
use crate::experiment::{Calibration, ExperimentConfig, Pipeline};
use crate::ising::IsingParams;
use crate::mitigation::{
    correct_fully, tmem_correct, zne_correct, MitigationOrder, TmemProblem, ZnePair,
};
use crate::noise::{
    build_confusion_matrix, estimate_confusion_matrix, fold_cnots, rng_from_seed,
    sample_counts_with, simulate_noisy, NoiseModel,
};
use crate::qsim::{BitstringDistribution, Circuit, StateVector};
use crate::weave::{Weave, WeaveSchedule};
use crate::{Error, RMatrix, Result};

/// The commutator columns a surface can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "C_raw")]
    Raw,
    #[serde(rename = "C_tmem")]
    Tmem,
    #[serde(rename = "C_zne")]
    Zne,
    #[serde(rename = "C_corr")]
    Corr,
    #[serde(rename = "C_exact")]
    Exact,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Raw,
        Variant::Tmem,
        Variant::Zne,
        Variant::Corr,
        Variant::Exact,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Variant::Raw => "C_raw",
            Variant::Tmem => "C_tmem",
            Variant::Zne => "C_zne",
            Variant::Corr => "C_corr",
            Variant::Exact => "C_exact",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.column() == s)
            .ok_or_else(|| Error::UnknownColumn(s.to_string()))
    }
}

/// One `(j, ℓ)` grid point with every variant the pipeline produced.
///
/// `f_abs`/`f_phase` describe the raw estimate: for the standard commutator the phase is
/// the fixed-node phase `arg F⁰`; for alternative states and probes it is `arg F`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub j: usize,
    pub ell: usize,
    pub t: f64,
    pub c_raw: Option<f64>,
    pub c_tmem: Option<f64>,
    pub c_zne: Option<f64>,
    pub c_corr: Option<f64>,
    pub c_exact: Option<f64>,
    pub f_abs: Option<f64>,
    pub f_phase: Option<f64>,
}

impl SurfacePoint {
    pub fn get(&self, v: Variant) -> Option<f64> {
        match v {
            Variant::Raw => self.c_raw,
            Variant::Tmem => self.c_tmem,
            Variant::Zne => self.c_zne,
            Variant::Corr => self.c_corr,
            Variant::Exact => self.c_exact,
        }
    }

    pub fn set(&mut self, v: Variant, value: Option<f64>) {
        let slot = match v {
            Variant::Raw => &mut self.c_raw,
            Variant::Tmem => &mut self.c_tmem,
            Variant::Zne => &mut self.c_zne,
            Variant::Corr => &mut self.c_corr,
            Variant::Exact => &mut self.c_exact,
        };
        *slot = value;
    }
}

/// Run-level numbers worth keeping next to the surface.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDiagnostics {
    /// Condition number of the transition matrix used by TMEM.
    pub tmem_condition_number: Option<f64>,
    pub tmem_max_iterations: Option<usize>,
    /// Largest `|C_corr(TMEM→ZNE) − C_corr(ZNE→TMEM)|` over the grid.
    pub max_order_difference: Option<f64>,
}

/// Commutator surface over probe site `j = 1..=n` and time index `ℓ = 0..=ell_max`.
/// Points are stored `j`-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadSurface {
    pub n: usize,
    pub ell_max: usize,
    pub tau: f64,
    pub points: Vec<SurfacePoint>,
    pub diagnostics: SurfaceDiagnostics,
}

impl SpreadSurface {
    pub fn index(&self, j: usize, ell: usize) -> usize {
        (j - 1) * (self.ell_max + 1) + ell
    }

    pub fn point(&self, j: usize, ell: usize) -> &SurfacePoint {
        &self.points[self.index(j, ell)]
    }

    pub fn value(&self, v: Variant, j: usize, ell: usize) -> Option<f64> {
        self.point(j, ell).get(v)
    }

    /// Variants with a value at every point.
    pub fn present_variants(&self) -> Vec<Variant> {
        Variant::ALL
            .into_iter()
            .filter(|&v| self.points.iter().all(|p| p.get(v).is_some()))
            .collect()
    }
}

/// How grid points are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon work-stealing over grid points; `threads: None` uses the global pool.
    #[cfg(feature = "parallel")]
    Parallel {
        threads: Option<usize>,
    },
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel { threads: None }
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

/// Builds the surface for `config` with the default execution strategy.
pub fn build_surface(config: &ExperimentConfig) -> Result<SpreadSurface> {
    build_surface_with(config, Execution::default())
}

pub fn build_surface_with(config: &ExperimentConfig, exec: Execution) -> Result<SpreadSurface> {
    let eval = PointEvaluator::new(config)?;
    let n = config.n;
    let rows = config.ell_max + 1;
    let grid: Vec<(usize, usize)> = (1..=n)
        .flat_map(|j| (0..rows).map(move |ell| (j, ell)))
        .collect();

    let results: Vec<Result<Evaluated>> = match exec {
        Execution::Sequential => grid.iter().map(|&(j, ell)| eval.evaluate(j, ell)).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel { threads } => {
            use rayon::prelude::*;
            let run = || {
                grid.par_iter()
                    .map(|&(j, ell)| eval.evaluate(j, ell))
                    .collect::<Vec<_>>()
            };
            match threads {
                None => run(),
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?
                    .install(run),
            }
        }
    };

    let mut points = Vec::with_capacity(grid.len());
    let mut diagnostics = SurfaceDiagnostics {
        tmem_condition_number: eval.condition_number,
        ..Default::default()
    };
    for r in results {
        let e = r?;
        points.push(e.point);
        if let Some(it) = e.tmem_iterations {
            let m = diagnostics.tmem_max_iterations.get_or_insert(0);
            *m = (*m).max(it);
        }
        if let Some(d) = e.order_difference {
            let m = diagnostics.max_order_difference.get_or_insert(0.0);
            *m = m.max(d);
        }
    }
    Ok(SpreadSurface {
        n,
        ell_max: config.ell_max,
        tau: config.tau,
        points,
        diagnostics,
    })
}

struct Evaluated {
    point: SurfacePoint,
    tmem_iterations: Option<usize>,
    order_difference: Option<f64>,
}

/// Everything shared by the grid points; immutable once built.
struct PointEvaluator {
    params: IsingParams,
    pipeline: Pipeline,
    state: InitialState,
    probe: Probe,
    rows: usize,
    tau: f64,
    shots: u64,
    seed: u64,
    exact: ExactOtoc,
    weave: Option<Weave>,
    noise: NoiseModel,
    transition: Option<RMatrix>,
    condition_number: Option<f64>,
    zne: bool,
    order: MitigationOrder,
}

impl PointEvaluator {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        let params = config.params()?;
        let schedule: WeaveSchedule = config.schedule();
        let exact = ExactOtoc::new(&params)?;
        let weave = match config.pipeline {
            Pipeline::Exact => None,
            _ => Some(Weave::new(&params, schedule)?),
        };
        let noise = match config.pipeline {
            Pipeline::Noisy | Pipeline::Mitigated => config.noise.clone(),
            _ => NoiseModel::ideal(config.n),
        };
        let mit = &config.mitigation;
        let transition = if mit.tmem {
            Some(match mit.calibration {
                Calibration::Analytic => build_confusion_matrix(&noise),
                Calibration::Sampled => estimate_confusion_matrix(
                    &noise,
                    mit.calibration_shots,
                    &mut rng_from_seed(config.seed),
                )?,
            })
        } else {
            None
        };
        let condition_number = transition.as_ref().map(|t| {
            let s = t.clone().svd(false, false).singular_values;
            if s.min() > 0.0 {
                s.max() / s.min()
            } else {
                f64::INFINITY
            }
        });
        Ok(Self {
            params,
            pipeline: config.pipeline,
            state: config.state,
            probe: config.probe,
            rows: config.ell_max + 1,
            tau: config.tau,
            shots: config.shots,
            seed: config.seed,
            exact,
            weave,
            noise,
            transition,
            condition_number,
            zne: mit.zne,
            order: mit.order,
        })
    }

    fn standard_commutator(&self) -> bool {
        self.state == InitialState::Zeros && self.probe == Probe::X
    }

    fn fixed_node(&self, j: usize, ell: usize, t: f64, f_abs: f64) -> Result<OtocPoint> {
        OtocPoint::fixed_node(&self.params, j, ell, t, f_abs.min(1.0))
    }

    fn evaluate(&self, j: usize, ell: usize) -> Result<Evaluated> {
        let n = self.params.n;
        let t = ell as f64 * self.tau;
        let exact_f = self.exact.otoc(1, j, t, self.probe, self.state)?;
        let mut point = SurfacePoint {
            j,
            ell,
            t,
            c_exact: Some(commutator_from_otoc(exact_f)),
            ..Default::default()
        };
        let mut out = Evaluated {
            point,
            tmem_iterations: None,
            order_difference: None,
        };

        // Unitary pipelines: the raw value comes straight from F.
        let unitary_f = match self.pipeline {
            Pipeline::Exact => Some(exact_f),
            Pipeline::TrotterExact => {
                let u = self.weave_circuit(ell)?.unitary()?;
                Some(otoc_from_unitary(&u, n, 1, j, self.probe, self.state)?)
            }
            _ => None,
        };
        if let Some(f) = unitary_f {
            if self.standard_commutator() {
                let fp = self.fixed_node(j, ell, t, f.norm())?;
                point.c_raw = Some(fp.c);
                point.f_abs = Some(fp.f_abs);
                point.f_phase = Some(fp.f_phase);
            } else {
                point.c_raw = Some(commutator_from_otoc(f));
                point.f_abs = Some(f.norm());
                point.f_phase = Some(f.arg());
            }
            out.point = point;
            return Ok(out);
        }

        // Measured pipelines: sample the return probability of the |F| circuit.
        let fabs_circuit = fabs_measurement_circuit(&self.weave_circuit(ell)?, 1, j)?;
        let index = (j - 1) * self.rows + ell;
        let mut rng = rng_from_seed(self.seed ^ index as u64);
        let p1 = self.sampled_distribution(&fabs_circuit, &mut rng)?;
        let p3 = if self.zne {
            Some(self.sampled_distribution(&fold_cnots(&fabs_circuit, 3)?, &mut rng)?)
        } else {
            None
        };

        let commutator = |d: &BitstringDistribution| -> Result<OtocPoint> {
            self.fixed_node(
                j,
                ell,
                t,
                fabs_from_return_probability(d.zeros_probability()),
            )
        };
        let raw = commutator(&p1)?;
        point.c_raw = Some(raw.c);
        point.f_abs = Some(raw.f_abs);
        point.f_phase = Some(raw.f_phase);

        if let Some(tm) = &self.transition {
            let sol = tmem_correct(&TmemProblem::new(tm.clone(), p1.clone())?)?;
            out.tmem_iterations = Some(sol.iterations);
            point.c_tmem = Some(commutator(&sol.distribution)?.c);
        }
        if let Some(p3) = &p3 {
            let pair = ZnePair::new(p1.clone(), p3.clone())?;
            point.c_zne = Some(commutator(&zne_correct(&pair))?.c);
            if let Some(tm) = &self.transition {
                let primary = correct_fully(tm, &pair, self.order)?;
                let other_order = match self.order {
                    MitigationOrder::TmemThenZne => MitigationOrder::ZneThenTmem,
                    MitigationOrder::ZneThenTmem => MitigationOrder::TmemThenZne,
                };
                let other = correct_fully(tm, &pair, other_order)?;
                let c_primary = commutator(&primary)?.c;
                point.c_corr = Some(c_primary);
                out.order_difference = Some((c_primary - commutator(&other)?.c).abs());
            } else {
                point.c_corr = point.c_zne;
            }
        } else if self.transition.is_some() {
            point.c_corr = point.c_tmem;
        }
        out.point = point;
        Ok(out)
    }

    fn weave_circuit(&self, ell: usize) -> Result<Circuit> {
        self.weave
            .as_ref()
            .expect("weave is built for every non-exact pipeline")
            .circuit(ell)
    }

    fn sampled_distribution<R: Rng>(
        &self,
        c: &Circuit,
        rng: &mut R,
    ) -> Result<BitstringDistribution> {
        let ideal = match self.pipeline {
            Pipeline::Sampled => {
                let mut s = StateVector::zeros(c.n_qubits())?;
                s.apply_circuit(c)?;
                s.measurement_distribution()
            }
            _ => simulate_noisy(c, &self.noise)?,
        };
        Ok(sample_counts_with(&ideal, self.shots, rng)?.to_distribution())
    }
}

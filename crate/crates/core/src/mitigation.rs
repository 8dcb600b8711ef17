//! Readout and CNOT error mitigation.
//!
//! * TMEM: minimise `‖T p − p_noisy‖₂²` over the probability simplex, where `T` is the
//!   readout transition matrix. Solved by projected gradient descent.
//! * ZNE: with `Pr(x|m)` measured after replacing every CNOT by `m` copies, extrapolate
//!   `Pr(x|0) = (3 Pr(x|1) − Pr(x|3)) / 2` and fall back to the nearest distribution
//!   when the line leaves `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::qsim::BitstringDistribution;
use crate::{Error, RMatrix, Result};

/// Projected-gradient stopping rule: max-abs change of the iterate.
pub const TMEM_TOL: f64 = 1e-10;
pub const TMEM_MAX_ITERATIONS: usize = 100_000;

/// Euclidean projection onto `{p : p ≥ 0, Σp = 1}` by sort-and-threshold.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumulative += uk;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if uk - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Readout-mitigation problem: transition matrix and the noisy distribution.
#[derive(Debug, Clone)]
pub struct TmemProblem {
    t: RMatrix,
    p_noisy: BitstringDistribution,
}

impl TmemProblem {
    pub fn new(t: RMatrix, p_noisy: BitstringDistribution) -> Result<Self> {
        let dim = p_noisy.probabilities().len();
        if t.nrows() != dim || t.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} transition matrix for {dim} outcomes",
                t.nrows(),
                t.ncols()
            )));
        }
        for (c, col) in t.column_iter().enumerate() {
            if (col.sum() - 1.0).abs() > 1e-9 || col.iter().any(|&x| x < -1e-12) {
                return Err(Error::InvalidDistribution(format!(
                    "column {c} of the transition matrix is not stochastic"
                )));
            }
        }
        Ok(Self { t, p_noisy })
    }

    pub fn transition(&self) -> &RMatrix {
        &self.t
    }

    pub fn noisy(&self) -> &BitstringDistribution {
        &self.p_noisy
    }

    /// `‖T p − p_noisy‖₂²`.
    pub fn objective(&self, p: &[f64]) -> f64 {
        let x = nalgebra::DVector::from_column_slice(p);
        let b = nalgebra::DVector::from_column_slice(self.p_noisy.probabilities());
        (&self.t * x - b).norm_squared()
    }
}

#[derive(Debug, Clone)]
pub struct TmemSolution {
    pub distribution: BitstringDistribution,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// 2-norm condition number of `T` (infinite when singular).
    pub condition_number: f64,
}

/// Solves a TMEM problem with projected gradient, step `1/‖TᵀT‖₂`, starting from the
/// noisy distribution. Singular `T` is fine: the simplex keeps the problem bounded.
pub fn tmem_correct(prob: &TmemProblem) -> Result<TmemSolution> {
    let t = &prob.t;
    let svd = t.clone().svd(false, false);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition_number = if s_min > 0.0 {
        s_max / s_min
    } else {
        f64::INFINITY
    };
    let lipschitz = s_max * s_max;

    let n = prob.p_noisy.n_qubits();
    let b = nalgebra::DVector::from_column_slice(prob.p_noisy.probabilities());
    let gram = t.transpose() * t;
    let rhs = t.transpose() * &b;
    let mut x = b.clone();
    let mut iterations = 0;
    let mut converged = lipschitz == 0.0;
    while !converged && iterations < TMEM_MAX_ITERATIONS {
        let grad = &gram * &x - &rhs;
        let step: Vec<f64> = x
            .iter()
            .zip(grad.iter())
            .map(|(xi, gi)| xi - gi / lipschitz)
            .collect();
        let next = nalgebra::DVector::from_vec(project_simplex(&step));
        let change = (&next - &x).amax();
        x = next;
        iterations += 1;
        converged = change < TMEM_TOL;
    }
    let p: Vec<f64> = x.iter().copied().collect();
    let objective = prob.objective(&p);
    Ok(TmemSolution {
        distribution: BitstringDistribution::new(n, p)?,
        objective,
        iterations,
        converged,
        condition_number,
    })
}

/// Distributions for the original (`m = 1`) and triple-CNOT (`m = 3`) circuits.
#[derive(Debug, Clone)]
pub struct ZnePair {
    p1: BitstringDistribution,
    p3: BitstringDistribution,
}

impl ZnePair {
    pub fn new(p1: BitstringDistribution, p3: BitstringDistribution) -> Result<Self> {
        if p1.n_qubits() != p3.n_qubits() {
            return Err(Error::DimensionMismatch(format!(
                "ZNE pair over {} and {} qubits",
                p1.n_qubits(),
                p3.n_qubits()
            )));
        }
        Ok(Self { p1, p3 })
    }

    /// The raw zero-noise intercept `(3 p1 − p3) / 2`, possibly outside `[0, 1]`.
    pub fn intercept(&self) -> Vec<f64> {
        self.p1
            .probabilities()
            .iter()
            .zip(self.p3.probabilities())
            .map(|(a, b)| (3.0 * a - b) / 2.0)
            .collect()
    }
}

/// Zero-noise extrapolation: accept the intercept when every entry lies in `[0, 1]`,
/// otherwise return its Euclidean projection onto the simplex.
pub fn zne_correct(pair: &ZnePair) -> BitstringDistribution {
    let raw = pair.intercept();
    let n = pair.p1.n_qubits();
    let p = if raw.iter().all(|x| (0.0..=1.0).contains(x)) {
        raw
    } else {
        project_simplex(&raw)
    };
    BitstringDistribution::new(n, p).expect("intercept of two distributions sums to one")
}

/// Composition order for applying both mitigations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MitigationOrder {
    /// Readout-correct both folded distributions, then extrapolate.
    #[default]
    TmemThenZne,
    /// Extrapolate the raw distributions, then readout-correct.
    ZneThenTmem,
}

/// Applies both mitigations to a `(m = 1, m = 3)` pair in the given order.
pub fn correct_fully(
    t: &RMatrix,
    pair: &ZnePair,
    order: MitigationOrder,
) -> Result<BitstringDistribution> {
    let tmem = |p: BitstringDistribution| -> Result<BitstringDistribution> {
        Ok(tmem_correct(&TmemProblem::new(t.clone(), p)?)?.distribution)
    };
    match order {
        MitigationOrder::TmemThenZne => {
            let p1 = tmem(pair.p1.clone())?;
            let p3 = tmem(pair.p3.clone())?;
            Ok(zne_correct(&ZnePair::new(p1, p3)?))
        }
        MitigationOrder::ZneThenTmem => tmem(zne_correct(pair)),
    }
}

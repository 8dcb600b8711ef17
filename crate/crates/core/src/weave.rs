//! Trotter steps and k-weave scheduling.
//!
//! A k-weave is the set `{U(τ), U(2τ), …, U(kτ)}` of Trotterized propagators. The last
//! one is the *cell*; the others are *shifts*. Evolution to `t = ℓτ` applies one shift of
//! `(ℓ mod k)·τ` and `⌊ℓ/k⌋` cells, so circuit depth grows with `ℓ/k` rather than `ℓ`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::ising::IsingParams;
use crate::qsim::{Circuit, Gate};
use crate::{Error, Result};

/// Tolerance on `|2Jkτ| = π/2` for a magic cell.
pub const MAGIC_TOL: f64 = 1e-9;

/// Where the shift operator sits relative to the cell applications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftPlacement {
    /// Shift first, then the cells.
    #[default]
    Before,
    /// Cells first, then the shift.
    After,
}

/// Sign of a quarter-turn `R_zz(±π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeaveSchedule {
    pub tau: f64,
    pub k: usize,
    pub ell_max: usize,
    /// Build the cell with the single-CNOT `R_zz(±π/2)` decomposition.
    pub magic: bool,
    /// Accept a magic cell even when `|2Jkτ| ≠ π/2`.
    pub relax_magic_constraint: bool,
    pub shift_placement: ShiftPlacement,
}

impl WeaveSchedule {
    pub fn new(tau: f64, k: usize, ell_max: usize) -> Self {
        Self {
            tau,
            k,
            ell_max,
            magic: false,
            relax_magic_constraint: false,
            shift_placement: ShiftPlacement::Before,
        }
    }

    /// Plain Trotterization: a 1-weave.
    pub fn standard(tau: f64, ell_max: usize) -> Self {
        Self::new(tau, 1, ell_max)
    }

    pub fn with_magic(mut self, relax_constraint: bool) -> Self {
        self.magic = true;
        self.relax_magic_constraint = relax_constraint;
        self
    }

    pub fn cell_time(&self) -> f64 {
        self.k as f64 * self.tau
    }

    /// Cell `R_zz` angle `2Jkτ`.
    pub fn cell_rzz_angle(&self, p: &IsingParams) -> f64 {
        2.0 * p.j * self.cell_time()
    }

    pub fn validate(&self, p: &IsingParams) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Config(format!("tau must be > 0, got {}", self.tau)));
        }
        if self.k == 0 {
            return Err(Error::Config("weave modulus k must be >= 1".into()));
        }
        if self.magic && !self.relax_magic_constraint {
            let angle = self.cell_rzz_angle(p);
            if (angle.abs() - FRAC_PI_2).abs() > MAGIC_TOL {
                return Err(Error::Config(format!(
                    "magic cell requires |2*J*k*tau| = pi/2, got |2*{}*{}*{}| = {:.12} \
                     (set relax_magic_constraint to override)",
                    p.j,
                    self.k,
                    self.tau,
                    angle.abs()
                )));
            }
        }
        Ok(())
    }

    pub fn decompose(&self, ell: usize) -> WeaveDecomposition {
        WeaveDecomposition {
            cell_applications: (ell - ell % self.k) / self.k,
            shift_duration_steps: ell % self.k,
        }
    }
}

/// How a time index `ℓ` splits into cell applications and one shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeaveDecomposition {
    pub cell_applications: usize,
    pub shift_duration_steps: usize,
}

/// `R_zz(θ)` on `(i, j)` as `CNOT_ij · P_z(θ)_j · CNOT_ij`.
///
/// The phase gate sits on the target: on the control it would commute through both
/// CNOTs and cancel the entangling action. Equals `e^{iθ/2} R_zz(θ)`.
pub fn rzz_decomposition(theta: f64, i: usize, j: usize) -> Result<Circuit> {
    if i == j {
        return Err(Error::MalformedGate(format!("R_zz on repeated site {i}")));
    }
    Circuit::from_gates(
        i.max(j) + 1,
        vec![Gate::cnot(i, j), Gate::pz(j, theta), Gate::cnot(i, j)],
    )
}

/// `R_zz(±π/2)` on `(i, j)` as `S_i S_j CZ_ij` (or its inverse), with
/// `CZ_ij = H_j CNOT_ij H_j`. One CNOT; equals `e^{±iπ/4} R_zz(±π/2)`.
pub fn magic_rzz(i: usize, j: usize, sign: Sign) -> Result<Circuit> {
    if i == j {
        return Err(Error::MalformedGate(format!("R_zz on repeated site {i}")));
    }
    let plus = Circuit::from_gates(
        i.max(j) + 1,
        vec![
            Gate::s(i),
            Gate::s(j),
            Gate::h(j),
            Gate::cnot(i, j),
            Gate::h(j),
        ],
    )?;
    Ok(match sign {
        Sign::Plus => plus,
        Sign::Minus => plus.dagger(),
    })
}

fn step_circuit(p: &IsingParams, dt: f64, magic: bool) -> Result<Circuit> {
    let n = p.n;
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(Gate::rx(q, p.b_x * dt))?;
    }
    for q in 0..n {
        c.push(Gate::pz(q, 2.0 * p.b_z * dt))?;
    }
    let theta = 2.0 * p.j * dt;
    for q in 0..n - 1 {
        let zz = if magic {
            magic_rzz(q, q + 1, Sign::of(theta))?
        } else {
            rzz_decomposition(theta, q, q + 1)?
        };
        c.append(&zz)?;
    }
    for q in 0..n {
        c.push(Gate::rx(q, p.b_x * dt))?;
    }
    Ok(c)
}

/// One symmetric Trotter step `U(dt)`: half transverse-field rotation, the classical
/// Ising evolution (phase layer and `R_zz` on every bond), then the other half rotation.
/// Uses `2(n−1)` CNOTs.
pub fn trotter_step(p: &IsingParams, dt: f64) -> Result<Circuit> {
    step_circuit(p, dt, false)
}

/// A built weave: the `k` operators for one parameter set and schedule.
#[derive(Debug, Clone)]
pub struct Weave {
    schedule: WeaveSchedule,
    operators: Vec<Circuit>,
}

impl Weave {
    pub fn new(p: &IsingParams, schedule: WeaveSchedule) -> Result<Self> {
        p.validate()?;
        schedule.validate(p)?;
        let k = schedule.k;
        let operators = (1..=k)
            .map(|m| step_circuit(p, m as f64 * schedule.tau, schedule.magic && m == k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schedule,
            operators,
        })
    }

    pub fn schedule(&self) -> &WeaveSchedule {
        &self.schedule
    }

    /// `[U(τ), …, U(kτ)]`.
    pub fn operators(&self) -> &[Circuit] {
        &self.operators
    }

    pub fn cell(&self) -> &Circuit {
        &self.operators[self.schedule.k - 1]
    }

    /// Circuit approximating `e^{−iHℓτ}`; `ℓ = 0` gives the empty circuit.
    pub fn circuit(&self, ell: usize) -> Result<Circuit> {
        if ell > self.schedule.ell_max {
            return Err(Error::Config(format!(
                "time index {ell} exceeds ell_max {}",
                self.schedule.ell_max
            )));
        }
        let d = self.schedule.decompose(ell);
        let mut c = Circuit::new(self.cell().n_qubits());
        let shift =
            (d.shift_duration_steps > 0).then(|| &self.operators[d.shift_duration_steps - 1]);
        if self.schedule.shift_placement == ShiftPlacement::Before {
            if let Some(s) = shift {
                c.append(s)?;
            }
        }
        for _ in 0..d.cell_applications {
            c.append(self.cell())?;
        }
        if self.schedule.shift_placement == ShiftPlacement::After {
            if let Some(s) = shift {
                c.append(s)?;
            }
        }
        Ok(c)
    }
}

/// The `k` weave operators; element `m` (1-based) is `U(mτ)`.
pub fn weave_operators(p: &IsingParams, s: &WeaveSchedule) -> Result<Vec<Circuit>> {
    Ok(Weave::new(p, *s)?.operators)
}

pub fn weave_circuit(p: &IsingParams, s: &WeaveSchedule, ell: usize) -> Result<Circuit> {
    Weave::new(p, *s)?.circuit(ell)
}

//! Out-of-time-ordered correlators on the Ising chain.
//!
//! `F_ij(t) = tr[ρ X_i(t) V_j X_i(t) V_j]` with `X_i(t) = U† X_i U` and `U ≈ e^{−iHt}`.
//! For Pauli operators the squared commutator reduces to `C_ij = 2 − 2 Re F_ij`.
//!
//! The fixed-node variant keeps only the modulus `|F|`, which is a return probability
//! and needs no ancilla, and borrows the phase from the classical chain:
//! `C = 2 − 2|F| cos(arg F⁰)`.

mod surface;

pub use surface::{
    build_surface, build_surface_with, Execution, SpreadSurface, SurfaceDiagnostics, SurfacePoint,
    Variant,
};

use serde::{Deserialize, Serialize};

use crate::ising::{classical_otoc, IsingParams, Spectrum};
use crate::qsim::{Circuit, Gate, StateVector};
use crate::{CMatrix, Error, Result, C64};

/// Largest chain evaluated by the dense OTOC routines.
pub const MAX_OTOC_SITES: usize = 10;

/// Tolerance above one accepted for a measured `|F|`.
pub const F_ABS_TOL: f64 = 1e-9;

/// The state `ρ` the correlator is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|0…0⟩⟨0…0|`
    #[default]
    Zeros,
    /// `|+⟩⟨+|^⊗n`, i.e. the all-ones matrix over `d`.
    Plus,
    /// `I/d`
    MaximallyMixed,
}

/// The probe operator `V_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    #[default]
    X,
    Y,
}

impl Probe {
    fn gate(self, q: usize) -> Gate {
        match self {
            Probe::X => Gate::x(q),
            Probe::Y => Gate::y(q),
        }
    }
}

fn check_sites(n: usize, sites: &[usize]) -> Result<()> {
    for &s in sites {
        if s == 0 || s > n {
            return Err(Error::SiteOutOfRange { site: s, n });
        }
    }
    Ok(())
}

fn check_otoc_capacity(n: usize) -> Result<()> {
    if n > MAX_OTOC_SITES {
        return Err(Error::Capacity {
            parameter: "n",
            value: n,
            limit: MAX_OTOC_SITES,
        });
    }
    Ok(())
}

/// `tr[ρ W(t) V W(t) V]` with `W = X_i`, `V` the probe on site `j`, for an arbitrary
/// dense propagator `u` on `n` sites. Sites are 1-based.
pub fn otoc_from_unitary(
    u: &CMatrix,
    n: usize,
    i: usize,
    j: usize,
    probe: Probe,
    state: InitialState,
) -> Result<C64> {
    check_otoc_capacity(n)?;
    check_sites(n, &[i, j])?;
    let dim = 1usize << n;
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} propagator for {n} sites",
            u.nrows(),
            u.ncols()
        )));
    }
    let w = Gate::x(i - 1);
    let v = probe.gate(j - 1);
    match state {
        InitialState::Zeros | InitialState::Plus => {
            let psi = match state {
                InitialState::Zeros => StateVector::zeros(n)?,
                _ => StateVector::plus(n)?,
            };
            let u_dag = u.adjoint();
            let mut phi = psi.clone();
            for _ in 0..2 {
                phi.apply_gate(&v)?;
                phi.apply_matrix(u)?;
                phi.apply_gate(&w)?;
                phi.apply_matrix(&u_dag)?;
            }
            Ok(psi.inner(&phi))
        }
        InitialState::MaximallyMixed => {
            // W(t) = U† X_i U column by column, then M = W(t) V and F = tr(M M) / d.
            let mut xu = u.clone();
            for mut col in xu.column_iter_mut() {
                let mut s = StateVector::from_amplitudes(n, col.as_slice().to_vec())?;
                s.apply_gate(&w)?;
                col.copy_from_slice(s.amplitudes());
            }
            let w_t = u.adjoint() * xu;
            // right-multiplying by V: V† = V acts on the rows of (W V)† = V W†
            let mut m_adj = w_t.adjoint();
            for mut col in m_adj.column_iter_mut() {
                let mut s = StateVector::from_amplitudes(n, col.as_slice().to_vec())?;
                s.apply_gate(&v)?;
                col.copy_from_slice(s.amplitudes());
            }
            let m = m_adj.adjoint();
            let mut tr = C64::new(0.0, 0.0);
            for a in 0..dim {
                for b in 0..dim {
                    tr += m[(a, b)] * m[(b, a)];
                }
            }
            Ok(tr / dim as f64)
        }
    }
}

/// Exact-evolution OTOCs for one parameter set, sharing a single eigendecomposition.
#[derive(Debug, Clone)]
pub struct ExactOtoc {
    params: IsingParams,
    spectrum: Spectrum,
}

impl ExactOtoc {
    pub fn new(params: &IsingParams) -> Result<Self> {
        params.validate()?;
        check_otoc_capacity(params.n)?;
        Ok(Self {
            params: *params,
            spectrum: Spectrum::of(params)?,
        })
    }

    pub fn params(&self) -> &IsingParams {
        &self.params
    }

    pub fn propagator(&self, t: f64) -> CMatrix {
        self.spectrum.propagator(t)
    }

    pub fn otoc(
        &self,
        i: usize,
        j: usize,
        t: f64,
        probe: Probe,
        state: InitialState,
    ) -> Result<C64> {
        otoc_from_unitary(&self.propagator(t), self.params.n, i, j, probe, state)
    }

    pub fn commutator(
        &self,
        i: usize,
        j: usize,
        t: f64,
        probe: Probe,
        state: InitialState,
    ) -> Result<f64> {
        Ok(commutator_from_otoc(self.otoc(i, j, t, probe, state)?))
    }
}

/// `C = 2 − 2 Re F`.
pub fn commutator_from_otoc(f: C64) -> f64 {
    2.0 - 2.0 * f.re
}

/// `F_ij(t)` under exact evolution `e^{−iHt}` with `V = X_j`.
pub fn otoc_exact(p: &IsingParams, i: usize, j: usize, t: f64, state: InitialState) -> Result<C64> {
    ExactOtoc::new(p)?.otoc(i, j, t, Probe::X, state)
}

/// `tr(ρ |[X_i(t), X_j]|²)` under exact evolution.
pub fn commutator_exact(
    p: &IsingParams,
    i: usize,
    j: usize,
    t: f64,
    state: InitialState,
) -> Result<f64> {
    Ok(commutator_from_otoc(otoc_exact(p, i, j, t, state)?))
}

/// `tr(ρ |[X_i(t), Y_j]|²)` in `|0…0⟩` under exact evolution.
pub fn commutator_xy_exact(p: &IsingParams, i: usize, j: usize, t: f64) -> Result<f64> {
    ExactOtoc::new(p)?.commutator(i, j, t, Probe::Y, InitialState::Zeros)
}

/// Ancilla-free `|F_ij|` circuit: `X_j, U, X_i, U†, X_j, U, X_i, U†` in application
/// order on `|0…0⟩`. The all-zeros return probability of the output is `|F_ij|²`.
pub fn fabs_measurement_circuit(u: &Circuit, i: usize, j: usize) -> Result<Circuit> {
    let n = u.n_qubits();
    check_sites(n, &[i, j])?;
    let u_dag = u.dagger();
    let mut c = Circuit::new(n);
    for _ in 0..2 {
        c.push(Gate::x(j - 1))?;
        c.append(u)?;
        c.push(Gate::x(i - 1))?;
        c.append(&u_dag)?;
    }
    Ok(c)
}

/// All-zeros probability of a noiseless run of `c` from `|0…0⟩`.
pub fn return_probability(c: &Circuit) -> Result<f64> {
    let mut s = StateVector::zeros(c.n_qubits())?;
    s.apply_circuit(c)?;
    Ok(s.amplitude(0).norm_sqr())
}

/// `|F| = √P(0…0)`, clamped into `[0, 1]`.
pub fn fabs_from_return_probability(p0: f64) -> f64 {
    p0.clamp(0.0, 1.0).sqrt()
}

/// Fixed-node OTOC `|F| e^{i arg F⁰_{1j}(t)}`.
pub fn fixed_node_otoc(f_abs: f64, p: &IsingParams, j: usize, t: f64) -> Result<C64> {
    if !(f_abs.is_finite() && (0.0..=1.0 + F_ABS_TOL).contains(&f_abs)) {
        return Err(Error::InvalidDistribution(format!(
            "OTOC modulus {f_abs} outside [0, 1]"
        )));
    }
    let phase = classical_otoc(p, j, t)?.arg();
    Ok(C64::from_polar(f_abs, phase))
}

/// Fixed-node commutator `2 − 2|F| cos(arg F⁰_{1j}(t))`.
pub fn fixed_node_commutator(f_abs: f64, p: &IsingParams, j: usize, t: f64) -> Result<f64> {
    Ok(OtocPoint::fixed_node(p, j, 0, t, f_abs)?.c)
}

/// One fixed-node point on a spreading surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OtocPoint {
    pub j: usize,
    pub ell: usize,
    pub t: f64,
    pub f_abs: f64,
    pub f_phase: f64,
    pub c: f64,
}

impl OtocPoint {
    pub fn fixed_node(p: &IsingParams, j: usize, ell: usize, t: f64, f_abs: f64) -> Result<Self> {
        fixed_node_otoc(f_abs, p, j, t)?;
        let f_phase = classical_otoc(p, j, t)?.arg();
        Ok(Self {
            j,
            ell,
            t,
            f_abs,
            f_phase,
            c: 2.0 - 2.0 * f_abs * f_phase.cos(),
        })
    }
}

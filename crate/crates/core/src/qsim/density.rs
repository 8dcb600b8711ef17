use super::state::{apply_local, check_capacity};
use super::{BitstringDistribution, Gate, StateVector};
use crate::{CMatrix, Error, Result, C64};

/// Tolerance on `Σ K†K = I` accepted by [`DensityMatrix::apply_channel`].
pub const KRAUS_COMPLETENESS_TOL: f64 = 1e-10;

/// Mixed state of an `n`-qubit register, stored as a dense `2^n × 2^n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn zeros(n_qubits: usize) -> Result<Self> {
        Self::from_pure(&StateVector::zeros(n_qubits)?)
    }

    pub fn from_pure(state: &StateVector) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Ok(Self {
            n_qubits: state.n_qubits(),
            rho: &v * v.adjoint(),
        })
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let dim = 1usize << n_qubits;
        Ok(Self {
            n_qubits,
            rho: CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0),
        })
    }

    pub fn from_matrix(n_qubits: usize, rho: CMatrix) -> Result<Self> {
        check_capacity(n_qubits)?;
        let dim = 1usize << n_qubits;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} density matrix for {n_qubits} qubits",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(Self { n_qubits, rho })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.rho - self.rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.rho + self.rho.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().min()
    }

    /// Reduced state on `keep` (in the listed order), tracing out every other qubit.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        for &q in keep {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        let n = self.n_qubits;
        let k = keep.len();
        let local = |x: usize| -> usize {
            keep.iter().fold(0, |acc, &q| {
                (acc << 1) | usize::from(x & super::state::qubit_mask(n, q) != 0)
            })
        };
        let keep_mask: usize = keep.iter().map(|&q| super::state::qubit_mask(n, q)).sum();
        let dim = 1usize << n;
        let mut out = CMatrix::zeros(1 << k, 1 << k);
        for r in 0..dim {
            for c in 0..dim {
                if r & !keep_mask == c & !keep_mask {
                    out[(local(r), local(c))] += self.rho[(r, c)];
                }
            }
        }
        DensityMatrix::from_matrix(k, out)
    }

    /// `ρ → U ρ U†` for a gate, without forming the embedded operator.
    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        g.check(self.n_qubits)?;
        let op = g.matrix()?;
        self.rho = conjugate_local(&self.rho, self.n_qubits, &g.qubits, &op);
        Ok(())
    }

    /// `ρ → Σ K ρ K†` with each Kraus operator acting on `qubits`.
    pub fn apply_channel(&mut self, kraus: &[CMatrix], qubits: &[usize]) -> Result<()> {
        if qubits.is_empty() || qubits.len() > 2 {
            return Err(Error::InvalidChannel(format!(
                "channels act on one or two qubits, got {}",
                qubits.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidChannel("repeated qubit".into()));
        }
        for &q in qubits {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        check_kraus(kraus, 1 << qubits.len())?;
        let dim = self.rho.nrows();
        let mut out = CMatrix::zeros(dim, dim);
        for k in kraus {
            out += conjugate_local(&self.rho, self.n_qubits, qubits, k);
        }
        self.rho = (&out + out.adjoint()) * C64::new(0.5, 0.0);
        Ok(())
    }

    /// Diagonal as a measurement distribution. Round-off negatives are clamped to zero.
    pub fn measurement_distribution(&self) -> Result<BitstringDistribution> {
        let mut p: Vec<f64> = self.rho.diagonal().iter().map(|z| z.re.max(0.0)).collect();
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
        BitstringDistribution::new(self.n_qubits, p)
    }
}

/// Free-function form of [`DensityMatrix::apply_channel`].
pub fn apply_channel(
    mut dm: DensityMatrix,
    kraus: &[CMatrix],
    qubits: &[usize],
) -> Result<DensityMatrix> {
    dm.apply_channel(kraus, qubits)?;
    Ok(dm)
}

fn check_kraus(kraus: &[CMatrix], dim: usize) -> Result<()> {
    if kraus.is_empty() {
        return Err(Error::InvalidChannel("empty Kraus set".into()));
    }
    let mut sum = CMatrix::zeros(dim, dim);
    for k in kraus {
        if k.nrows() != dim || k.ncols() != dim {
            return Err(Error::InvalidChannel(format!(
                "Kraus operator is {}x{}, expected {dim}x{dim}",
                k.nrows(),
                k.ncols()
            )));
        }
        sum += k.adjoint() * k;
    }
    let err = (sum - CMatrix::identity(dim, dim))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if err > KRAUS_COMPLETENESS_TOL {
        return Err(Error::InvalidChannel(format!(
            "completeness violated by {err:.3e}"
        )));
    }
    Ok(())
}

/// `K ρ K†` with `K` local to `qubits`. Row action first, then the column action via
/// `(K (Kρ)†)†`.
fn conjugate_local(rho: &CMatrix, n: usize, qubits: &[usize], k: &CMatrix) -> CMatrix {
    let mut a = rho.clone();
    apply_to_columns(&mut a, n, qubits, k);
    let mut b = a.adjoint();
    apply_to_columns(&mut b, n, qubits, k);
    b.adjoint()
}

fn apply_to_columns(m: &mut CMatrix, n: usize, qubits: &[usize], op: &CMatrix) {
    for mut col in m.column_iter_mut() {
        apply_local(col.as_mut_slice(), n, qubits, op);
    }
}

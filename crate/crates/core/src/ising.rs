//! Ising chain Hamiltonians, exact propagators and the classical OTOC.
//!
//! `H = J Σ_{i<n} Z_i Z_{i+1} + B_z Σ Z_i + B_x Σ X_i` on an open chain, with
//! `Z|0⟩ = +|0⟩`. The classical part `H⁰` drops the transverse field.

use std::fmt;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::qsim::MAX_QUBITS;
use crate::{CMatrix, Error, RMatrix, Result, C64};

/// Largest chain handled by the dense brute-force classical OTOC.
pub const MAX_BRUTEFORCE_SITES: usize = 10;

/// Couplings of the Ising chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingParams {
    pub n: usize,
    pub j: f64,
    pub b_x: f64,
    pub b_z: f64,
}

impl IsingParams {
    pub fn new(n: usize, j: f64, b_x: f64, b_z: f64) -> Result<Self> {
        let p = Self { n, j, b_x, b_z };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::Config(format!(
                "Ising chain needs n >= 3 sites, got {}",
                self.n
            )));
        }
        if ![self.j, self.b_x, self.b_z].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("Ising couplings must be finite".into()));
        }
        Ok(())
    }

    pub fn with_sites(self, n: usize) -> Self {
        Self { n, ..self }
    }

    /// Energy of `|0…0⟩` under `H⁰`: `(n−1)J + nB_z`.
    pub fn ground_energy(&self) -> f64 {
        (self.n as f64 - 1.0) * self.j + self.n as f64 * self.b_z
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n {
            return Err(Error::SiteOutOfRange { site, n: self.n });
        }
        Ok(())
    }
}

/// The two parameter sets used throughout: a classical (integrable) chain and a
/// chaotic one with both fields switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Integrable,
    Chaotic,
}

impl Regime {
    /// `(J, B_x, B_z)`.
    pub fn couplings(self) -> (f64, f64, f64) {
        match self {
            Regime::Integrable => (-1.0, 0.0, 1.0),
            Regime::Chaotic => (-1.0, 0.7, 1.5),
        }
    }

    pub fn params(self, n: usize) -> Result<IsingParams> {
        let (j, b_x, b_z) = self.couplings();
        IsingParams::new(n, j, b_x, b_z)
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Integrable => "integrable",
            Regime::Chaotic => "chaotic",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_dense_capacity(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::Capacity {
            parameter: "n",
            value: n,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

/// `Z` eigenvalue (±1) of `site` (0-based) in basis state `x`.
fn z_value(n: usize, site: usize, x: usize) -> f64 {
    if x & (1 << (n - 1 - site)) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Diagonal of `H⁰` in the computational basis.
pub fn classical_energies(p: &IsingParams) -> Result<Vec<f64>> {
    p.validate()?;
    check_dense_capacity(p.n)?;
    let n = p.n;
    Ok((0..1usize << n)
        .map(|x| {
            let coupling: f64 = (0..n - 1)
                .map(|i| z_value(n, i, x) * z_value(n, i + 1, x))
                .sum();
            let field: f64 = (0..n).map(|i| z_value(n, i, x)).sum();
            p.j * coupling + p.b_z * field
        })
        .collect())
}

/// `H⁰ = J Σ Z_i Z_{i+1} + B_z Σ Z_i` as a dense diagonal matrix.
pub fn build_classical_hamiltonian(p: &IsingParams) -> Result<RMatrix> {
    let e = classical_energies(p)?;
    Ok(RMatrix::from_diagonal(&nalgebra::DVector::from_vec(e)))
}

/// Full transverse-field Hamiltonian as a dense real symmetric matrix.
pub fn build_hamiltonian(p: &IsingParams) -> Result<RMatrix> {
    let mut h = build_classical_hamiltonian(p)?;
    if p.b_x != 0.0 {
        let n = p.n;
        for x in 0..1usize << n {
            for site in 0..n {
                h[(x ^ (1 << (n - 1 - site)), x)] += p.b_x;
            }
        }
    }
    Ok(h)
}

/// Eigendecomposition of a real symmetric Hamiltonian, reused for many evolution times.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: RMatrix,
}

/// Accepted asymmetry of a Hamiltonian handed to [`Spectrum::new`].
pub const HERMITICITY_TOL: f64 = 1e-10;

impl Spectrum {
    pub fn new(h: &RMatrix) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} Hamiltonian",
                h.nrows(),
                h.ncols()
            )));
        }
        let asym = (h - h.transpose()).amax();
        if asym > HERMITICITY_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let sym = (h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        Ok(Self {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn of(p: &IsingParams) -> Result<Self> {
        Self::new(&build_hamiltonian(p)?)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `e^{−iHt} = V e^{−iΛt} Vᵀ`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let v = &self.eigenvectors;
        let dim = v.nrows();
        let phases: Vec<C64> = self.eigenvalues.iter().map(|&e| C64::cis(-e * t)).collect();
        let vc = v.map(|x| C64::new(x, 0.0));
        let mut scaled = vc.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[k];
        }
        let out = scaled * vc.transpose();
        debug_assert_eq!(out.nrows(), dim);
        out
    }
}

/// `e^{−iHt}` for a real symmetric `H`.
pub fn exact_unitary(h: &RMatrix, t: f64) -> Result<CMatrix> {
    Ok(Spectrum::new(h)?.propagator(t))
}

/// Analytic `F⁰_{1j}(t)` for the classical chain, with `j` a 1-based site.
///
/// Built from the energies of `|0…0⟩` and the single and double excitations created by
/// `X_1` and `X_j`; all three cases have unit modulus.
pub fn classical_otoc(p: &IsingParams, j: usize, t: f64) -> Result<C64> {
    p.validate()?;
    p.check_site(j)?;
    let phase = match j {
        1 => 4.0 * (p.j + p.b_z) * t,
        2 => 4.0 * p.j * t,
        _ => 0.0,
    };
    Ok(C64::from_polar(1.0, phase))
}

/// Dense evaluation of `⟨0…0| X_i(t) X_j X_i(t) X_j |0…0⟩` under `H⁰`, with
/// `X_i(t) = e^{iH⁰t} X_i e^{−iH⁰t}`. Sites are 1-based.
pub fn classical_otoc_bruteforce(p: &IsingParams, i: usize, j: usize, t: f64) -> Result<C64> {
    p.validate()?;
    p.check_site(i)?;
    p.check_site(j)?;
    if p.n > MAX_BRUTEFORCE_SITES {
        return Err(Error::Capacity {
            parameter: "n",
            value: p.n,
            limit: MAX_BRUTEFORCE_SITES,
        });
    }
    let n = p.n;
    let dim = 1usize << n;
    let energies = classical_energies(p)?;
    let forward = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        energies.iter().map(|&e| C64::cis(-e * t)),
    ));
    let pauli_x = |site: usize| {
        let mask = 1usize << (n - 1 - (site - 1));
        let mut m = CMatrix::zeros(dim, dim);
        for x in 0..dim {
            m[(x ^ mask, x)] = C64::new(1.0, 0.0);
        }
        m
    };
    let xi = pauli_x(i);
    let xj = pauli_x(j);
    let xi_t = forward.adjoint() * xi * &forward;
    let product = &xi_t * &xj * &xi_t * &xj;
    Ok(product[(0, 0)])
}

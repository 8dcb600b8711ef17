//! Dense reference implementations used as test oracles.
//!
//! Everything here is built from 2×2 matrices, index arithmetic and a Taylor-series
//! matrix exponential, so it shares no code path with the library's state-vector
//! kernels or its eigendecomposition-based propagator.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use opspread_core::ising::IsingParams;
use opspread_core::qsim::{Circuit, Gate};

pub type M = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> M {
    M::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> M {
    M::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> M {
    M::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// `op` on qubit `q` (0-based, qubit 0 most significant) of an `n`-qubit register.
pub fn embed1(n: usize, q: usize, op: &M) -> M {
    let mut out = M::identity(1, 1);
    for k in 0..n {
        let f = if k == q {
            op.clone()
        } else {
            M::identity(2, 2)
        };
        out = out.kronecker(&f);
    }
    out
}

/// A 4×4 operator on qubits `(a, b)`, with `a` the more significant of its two indices.
pub fn embed2(n: usize, a: usize, b: usize, op: &M) -> M {
    let dim = 1usize << n;
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let mask = (1usize << (n - 1 - a)) | (1usize << (n - 1 - b));
    let mut out = M::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            if row & !mask == col & !mask {
                let r = 2 * bit(row, a) + bit(row, b);
                let s = 2 * bit(col, a) + bit(col, b);
                out[(row, col)] = op[(r, s)];
            }
        }
    }
    out
}

pub fn rzz(theta: f64) -> M {
    let a = C64::cis(-theta / 2.0);
    let b = C64::cis(theta / 2.0);
    M::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b, b, a]))
}

fn gate_oracle(g: &Gate) -> M {
    use opspread_core::qsim::GateKind::*;
    let th = g.angle.unwrap_or(0.0);
    let one = c(1., 0.);
    let zero = c(0., 0.);
    let i = c(0., 1.);
    match g.kind {
        Rx => {
            // e^{-iθX/2} from its defining series: cos(θ/2) I − i sin(θ/2) X
            M::identity(2, 2) * c((th / 2.0).cos(), 0.) - pauli_x() * c(0., (th / 2.0).sin())
        }
        Pz => M::from_row_slice(2, 2, &[one, zero, zero, C64::cis(th)]),
        Rzz => rzz(th),
        Cnot => M::from_row_slice(
            4,
            4,
            &[
                one, zero, zero, zero, zero, one, zero, zero, zero, zero, zero, one, zero, zero,
                one, zero,
            ],
        ),
        Cz => M::from_diagonal(&nalgebra::DVector::from_vec(vec![one, one, one, -one])),
        S => M::from_row_slice(2, 2, &[one, zero, zero, i]),
        Sdg => M::from_row_slice(2, 2, &[one, zero, zero, -i]),
        H => {
            let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.);
            M::from_row_slice(2, 2, &[h, h, h, -h])
        }
        X => pauli_x(),
        Y => pauli_y(),
        Z => pauli_z(),
    }
}

/// Full-register unitary of a circuit as a product of embedded gate matrices.
pub fn circuit_unitary(circ: &Circuit) -> M {
    let n = circ.n_qubits();
    let mut u = M::identity(1 << n, 1 << n);
    for g in circ.gates() {
        let m = gate_oracle(g);
        let full = match g.qubits.as_slice() {
            [q] => embed1(n, *q, &m),
            [a, b] => embed2(n, *a, *b, &m),
            _ => unreachable!(),
        };
        u = full * u;
    }
    u
}

/// `H = J Σ Z_i Z_{i+1} + B_z Σ Z_i + B_x Σ X_i` assembled from Kronecker products.
pub fn hamiltonian(p: &IsingParams) -> M {
    let n = p.n;
    let dim = 1 << n;
    let mut h = M::zeros(dim, dim);
    for q in 0..n {
        h += embed1(n, q, &pauli_z()) * c(p.b_z, 0.);
        h += embed1(n, q, &pauli_x()) * c(p.b_x, 0.);
    }
    for q in 0..n - 1 {
        h += embed1(n, q, &pauli_z()) * embed1(n, q + 1, &pauli_z()) * c(p.j, 0.);
    }
    h
}

/// `e^{A}` by scaling and squaring a Taylor series.
pub fn expm(a: &M) -> M {
    let norm = a.iter().map(|x| x.norm()).sum::<f64>().max(1e-300);
    let squarings = (norm.log2().ceil() as i32 + 4).max(0) as u32;
    let scaled = a / c(2f64.powi(squarings as i32), 0.);
    let dim = a.nrows();
    let mut term = M::identity(dim, dim);
    let mut sum = M::identity(dim, dim);
    for k in 1..40 {
        term = &term * &scaled / c(k as f64, 0.);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `e^{−iHt}`.
pub fn propagator(p: &IsingParams, t: f64) -> M {
    expm(&(hamiltonian(p) * c(0., -t)))
}

pub fn rho_zeros(n: usize) -> M {
    let dim = 1 << n;
    let mut r = M::zeros(dim, dim);
    r[(0, 0)] = c(1., 0.);
    r
}

/// `|+…+⟩⟨+…+|`: every entry `1/d`.
pub fn rho_plus(n: usize) -> M {
    let dim = 1 << n;
    M::from_element(dim, dim, c(1.0 / dim as f64, 0.))
}

pub fn rho_mixed(n: usize) -> M {
    let dim = 1 << n;
    M::identity(dim, dim) / c(dim as f64, 0.)
}

/// `tr[ρ W(t) V W(t) V]` with `W(t) = U† W U`, all dense.
pub fn otoc(u: &M, rho: &M, w: &M, v: &M) -> C64 {
    let wt = u.adjoint() * w * u;
    (rho * &wt * v * &wt * v).trace()
}

/// Max-abs distance after removing the global phase that best aligns `b` with `a`.
pub fn phase_distance(a: &M, b: &M) -> f64 {
    let overlap = (b.adjoint() * a).trace();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        c(1., 0.)
    };
    (a - b * phase).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

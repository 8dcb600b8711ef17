//! Dense pure-state and density-matrix simulation.
//!
//! Basis index convention: for an `n`-qubit register, qubit 0 is the most significant
//! bit, so the bitstring `q0 q1 … q(n-1)` read left to right is the binary index.

mod circuit;
mod density;
mod gate;
mod state;

pub use circuit::{dagger, Circuit};
pub use density::{apply_channel, DensityMatrix, KRAUS_COMPLETENESS_TOL};
pub use gate::{gate_matrix, Gate, GateKind};
pub use state::{
    apply_circuit, apply_gate, bitstring, measurement_distribution, BitstringDistribution,
    StateVector, MAX_QUBITS,
};

use crate::{CMatrix, C64};

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Rescales `m` by the unit phase that makes its largest-magnitude entry real and positive.
///
/// Two matrices equal up to a global phase become entrywise equal after this, as long as
/// the largest entry is unambiguous.
pub fn fix_global_phase(m: &CMatrix) -> CMatrix {
    let pivot = m.iter().copied().fold(C64::new(0.0, 0.0), |best, z| {
        if z.norm() > best.norm() + 1e-12 {
            z
        } else {
            best
        }
    });
    if pivot.norm() == 0.0 {
        return m.clone();
    }
    let phase = pivot.conj() / pivot.norm();
    m * phase
}

/// Max-abs distance between `a` and `b` after removing the global phase that best aligns
/// `b` to `a` (the phase of `tr(b† a)`).
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: C64 = b.iter().zip(a.iter()).map(|(y, x)| y.conj() * x).sum();
    if overlap.norm() == 0.0 {
        return max_abs_diff(a, b);
    }
    let phase = overlap / overlap.norm();
    max_abs_diff(a, &(b * phase))
}

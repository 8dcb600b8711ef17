use serde::{Deserialize, Serialize};

use super::{Circuit, Gate};
use crate::{CMatrix, Error, Result, C64};

/// Largest register the dense simulators accept.
pub const MAX_QUBITS: usize = 14;

/// Bit mask of `qubit` inside a basis index of an `n`-qubit register (qubit 0 is the MSB).
#[inline]
pub(crate) fn qubit_mask(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Applies a local 2×2 or 4×4 operator in place to a length-`2^n` amplitude slice.
///
/// Runs in `O(2^n)` without forming the embedded operator. For two-qubit operators the
/// first entry of `qubits` is the most significant bit of the local index.
pub(crate) fn apply_local(amps: &mut [C64], n: usize, qubits: &[usize], op: &CMatrix) {
    match qubits {
        [q] => {
            let m = qubit_mask(n, *q);
            let (a, b, c, d) = (op[(0, 0)], op[(0, 1)], op[(1, 0)], op[(1, 1)]);
            for i in 0..amps.len() {
                if i & m != 0 {
                    continue;
                }
                let x0 = amps[i];
                let x1 = amps[i | m];
                amps[i] = a * x0 + b * x1;
                amps[i | m] = c * x0 + d * x1;
            }
        }
        [q0, q1] => {
            let m0 = qubit_mask(n, *q0);
            let m1 = qubit_mask(n, *q1);
            let mut local = [[C64::new(0.0, 0.0); 4]; 4];
            for (r, row) in local.iter_mut().enumerate() {
                for (c, v) in row.iter_mut().enumerate() {
                    *v = op[(r, c)];
                }
            }
            for i in 0..amps.len() {
                if i & (m0 | m1) != 0 {
                    continue;
                }
                let idx = [i, i | m1, i | m0, i | m0 | m1];
                let x = idx.map(|k| amps[k]);
                for (r, &k) in idx.iter().enumerate() {
                    amps[k] = local[r][0] * x[0]
                        + local[r][1] * x[1]
                        + local[r][2] * x[2]
                        + local[r][3] * x[3];
                }
            }
        }
        _ => unreachable!("local operators act on one or two qubits"),
    }
}

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zeros(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state `|x⟩`.
    pub fn basis(n_qubits: usize, x: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let dim = 1usize << n_qubits;
        if x >= dim {
            return Err(Error::DimensionMismatch(format!(
                "basis index {x} for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[x] = C64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// `|+⟩^⊗n`.
    pub fn plus(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            n_qubits,
            amplitudes: vec![a; dim],
        })
    }

    /// Wraps raw amplitudes. The length must be `2^n_qubits`; the norm is not adjusted.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_capacity(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, x: usize) -> C64 {
        self.amplitudes[x]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        g.check(self.n_qubits)?;
        let op = g.matrix()?;
        apply_local(&mut self.amplitudes, self.n_qubits, &g.qubits, &op);
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        if c.n_qubits() > self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit circuit on {}-qubit state",
                c.n_qubits(),
                self.n_qubits
            )));
        }
        for g in c.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Multiplies by a dense `2^n × 2^n` matrix.
    pub fn apply_matrix(&mut self, u: &CMatrix) -> Result<()> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on dimension {}",
                u.nrows(),
                u.ncols(),
                self.dim()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        self.amplitudes = (u * v).as_slice().to_vec();
        Ok(())
    }

    pub fn measurement_distribution(&self) -> BitstringDistribution {
        BitstringDistribution {
            n_qubits: self.n_qubits,
            probabilities: self.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        }
    }
}

/// Free-function form of [`StateVector::apply_gate`].
pub fn apply_gate(mut state: StateVector, g: &Gate) -> Result<StateVector> {
    state.apply_gate(g)?;
    Ok(state)
}

/// Free-function form of [`StateVector::apply_circuit`].
pub fn apply_circuit(mut state: StateVector, c: &Circuit) -> Result<StateVector> {
    state.apply_circuit(c)?;
    Ok(state)
}

pub fn measurement_distribution(state: &StateVector) -> BitstringDistribution {
    state.measurement_distribution()
}

pub(crate) fn check_capacity(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Capacity {
            parameter: "n_qubits",
            value: n_qubits,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Probability of each classical outcome `x`, indexed with qubit 0 as the MSB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BitstringDistribution {
    n_qubits: usize,
    probabilities: Vec<f64>,
}

impl BitstringDistribution {
    /// Entry tolerance below zero or above one that is clamped rather than rejected.
    pub const ENTRY_TOL: f64 = 1e-12;
    pub const SUM_TOL: f64 = 1e-9;

    /// Validates and clamps round-off: entries must lie in `[0, 1]` up to
    /// [`Self::ENTRY_TOL`] and sum to one within [`Self::SUM_TOL`].
    pub fn new(n_qubits: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {n_qubits} qubits",
                probabilities.len()
            )));
        }
        let mut probabilities = probabilities;
        for (x, p) in probabilities.iter_mut().enumerate() {
            if !p.is_finite() || *p < -Self::ENTRY_TOL || *p > 1.0 + Self::ENTRY_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "entry {x} = {p} outside [0, 1]"
                )));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self {
            n_qubits,
            probabilities,
        })
    }

    pub fn point_mass(n_qubits: usize, x: usize) -> Result<Self> {
        let mut p = vec![0.0; 1 << n_qubits];
        if x >= p.len() {
            return Err(Error::DimensionMismatch(format!(
                "outcome {x} for {n_qubits} qubits"
            )));
        }
        p[x] = 1.0;
        Ok(Self {
            n_qubits,
            probabilities: p,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, x: usize) -> f64 {
        self.probabilities[x]
    }

    /// Probability of the all-zeros outcome.
    pub fn zeros_probability(&self) -> f64 {
        self.probabilities[0]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probabilities
    }
}

/// Formats `x` as an `n`-character bitstring, qubit 0 first.
pub fn bitstring(n_qubits: usize, x: usize) -> String {
    (0..n_qubits)
        .map(|q| {
            if x & qubit_mask(n_qubits, q) != 0 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::Gate;

    #[test]
    fn cnot_on_basis_states() {
        // |00⟩ stays, |10⟩ -> |11⟩ with qubit 0 the control.
        let s = apply_gate(StateVector::zeros(2).unwrap(), &Gate::cnot(0, 1)).unwrap();
        assert_eq!(s.amplitude(0), C64::new(1.0, 0.0));
        let s = apply_gate(StateVector::basis(2, 0b10).unwrap(), &Gate::cnot(0, 1)).unwrap();
        assert_eq!(s.amplitude(0b11), C64::new(1.0, 0.0));
        assert_eq!(s.norm(), 1.0);
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let s = apply_gate(StateVector::zeros(3).unwrap(), &Gate::x(0)).unwrap();
        assert_eq!(s.amplitude(0b100), C64::new(1.0, 0.0));
        assert_eq!(bitstring(3, 0b100), "100");
    }

    #[test]
    fn plus_state_distribution() {
        let s = apply_gate(StateVector::zeros(1).unwrap(), &Gate::h(0)).unwrap();
        let d = s.measurement_distribution();
        assert!((d.probability(0) - 0.5).abs() < 1e-15);
        assert!((d.probability(1) - 0.5).abs() < 1e-15);
        let d = StateVector::zeros(4).unwrap().measurement_distribution();
        assert_eq!(d.zeros_probability(), 1.0);
    }

    #[test]
    fn distribution_validation() {
        assert!(BitstringDistribution::new(1, vec![0.5, 0.5]).is_ok());
        assert!(BitstringDistribution::new(1, vec![1.1, -0.1]).is_err());
        assert!(BitstringDistribution::new(1, vec![0.5, 0.4]).is_err());
        assert!(BitstringDistribution::new(2, vec![0.5, 0.5]).is_err());
        let d = BitstringDistribution::new(1, vec![1.0 + 1e-14, -1e-14]).unwrap();
        assert_eq!(d.probabilities(), &[1.0, 0.0]);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            StateVector::zeros(MAX_QUBITS + 1),
            Err(Error::Capacity { .. })
        ));
        assert!(StateVector::zeros(0).is_err());
    }

    #[test]
    fn gate_index_out_of_range() {
        let mut s = StateVector::zeros(2).unwrap();
        assert!(matches!(
            s.apply_gate(&Gate::h(2)),
            Err(Error::QubitOutOfRange { .. })
        ));
    }
}

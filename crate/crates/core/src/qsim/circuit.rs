use serde::{Deserialize, Serialize};

use super::state::check_capacity;
use super::{Gate, StateVector};
use crate::{CMatrix, Error, Result};

/// An ordered gate list on a fixed-width register. Gates are applied first to last.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    /// Builds a circuit from a gate list, validating every gate against `n_qubits`.
    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.check(n_qubits)?;
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.check(self.n_qubits)?;
        self.gates.push(g);
        Ok(())
    }

    /// Appends `other`, which may be narrower than `self`.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits > self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "cannot append {}-qubit circuit to {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// The inverse circuit: reversed order, each gate inverted.
    pub fn dagger(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cnot()).count()
    }

    /// Dense `2^n × 2^n` unitary, built column by column from basis states.
    pub fn unitary(&self) -> Result<CMatrix> {
        check_capacity(self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut u = CMatrix::zeros(dim, dim);
        for x in 0..dim {
            let mut s = StateVector::basis(self.n_qubits, x)?;
            s.apply_circuit(self)?;
            u.column_mut(x).copy_from_slice(s.amplitudes());
        }
        Ok(u)
    }
}

/// Free-function form of [`Circuit::dagger`].
pub fn dagger(c: &Circuit) -> Circuit {
    c.dagger()
}

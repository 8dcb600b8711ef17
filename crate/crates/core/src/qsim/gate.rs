use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{CMatrix, Error, Result, C64};

/// The gate alphabet used by the Trotter and measurement circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    /// `exp(-i θ X / 2)`
    Rx,
    /// `diag(1, e^{iφ})`
    Pz,
    /// `exp(-i (θ/2) Z⊗Z)`
    Rzz,
    /// Controlled-X; the first listed qubit is the control.
    Cnot,
    Cz,
    S,
    Sdg,
    H,
    X,
    Y,
    Z,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rzz | GateKind::Cnot | GateKind::Cz => 2,
            _ => 1,
        }
    }

    pub fn takes_angle(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Pz | GateKind::Rzz)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Pz => "PZ",
            GateKind::Rzz => "RZZ",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
        }
    }
}

/// A named gate acting on one or two qubits, with an angle for the rotation kinds.
///
/// Construct through the helpers ([`Gate::rx`], [`Gate::cnot`], ...) to get a well-formed
/// gate; [`Gate::new`] accepts arbitrary fields and validation happens on use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub angle: Option<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, angle: Option<f64>) -> Self {
        Self {
            kind,
            qubits,
            angle,
        }
    }

    pub fn rx(q: usize, theta: f64) -> Self {
        Self::new(GateKind::Rx, vec![q], Some(theta))
    }

    pub fn pz(q: usize, phi: f64) -> Self {
        Self::new(GateKind::Pz, vec![q], Some(phi))
    }

    pub fn rzz(a: usize, b: usize, theta: f64) -> Self {
        Self::new(GateKind::Rzz, vec![a, b], Some(theta))
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cnot, vec![control, target], None)
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::Cz, vec![a, b], None)
    }

    pub fn s(q: usize) -> Self {
        Self::new(GateKind::S, vec![q], None)
    }

    pub fn sdg(q: usize) -> Self {
        Self::new(GateKind::Sdg, vec![q], None)
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q], None)
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q], None)
    }

    pub fn y(q: usize) -> Self {
        Self::new(GateKind::Y, vec![q], None)
    }

    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, vec![q], None)
    }

    /// Checks arity, angle presence and distinctness of the qubit indices.
    pub fn check_form(&self) -> Result<()> {
        let arity = self.kind.arity();
        if self.qubits.len() != arity {
            return Err(Error::MalformedGate(format!(
                "{} expects {arity} qubit(s), got {}",
                self.kind.name(),
                self.qubits.len()
            )));
        }
        if arity == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::MalformedGate(format!(
                "{} on repeated qubit {}",
                self.kind.name(),
                self.qubits[0]
            )));
        }
        match (self.kind.takes_angle(), self.angle) {
            (true, None) => Err(Error::MalformedGate(format!(
                "{} requires an angle",
                self.kind.name()
            ))),
            (true, Some(a)) if !a.is_finite() => Err(Error::MalformedGate(format!(
                "{} angle is not finite",
                self.kind.name()
            ))),
            (false, Some(_)) => Err(Error::MalformedGate(format!(
                "{} takes no angle",
                self.kind.name()
            ))),
            _ => Ok(()),
        }
    }

    /// Well-formedness plus index bounds for an `n_qubits` register.
    pub fn check(&self, n_qubits: usize) -> Result<()> {
        self.check_form()?;
        match self.qubits.iter().find(|&&q| q >= n_qubits) {
            Some(&index) => Err(Error::QubitOutOfRange { index, n_qubits }),
            None => Ok(()),
        }
    }

    /// The inverse gate. Rotations negate their angle; S and SDG swap; the rest are
    /// self-inverse.
    pub fn inverse(&self) -> Self {
        let kind = match self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            k => k,
        };
        Self {
            kind,
            qubits: self.qubits.clone(),
            angle: self.angle.map(|a| -a),
        }
    }

    pub fn is_cnot(&self) -> bool {
        self.kind == GateKind::Cnot
    }

    /// The gate's unitary as a 2×2 or 4×4 matrix. For two-qubit gates the first listed
    /// qubit is the most significant bit of the local index.
    pub fn matrix(&self) -> Result<CMatrix> {
        self.check_form()?;
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let angle = self.angle.unwrap_or(0.0);
        let m = match self.kind {
            GateKind::Rx => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                let c = C64::new(c, 0.0);
                let mis = C64::new(0.0, -s);
                CMatrix::from_row_slice(2, 2, &[c, mis, mis, c])
            }
            GateKind::Pz => CMatrix::from_row_slice(2, 2, &[one, zero, zero, C64::cis(angle)]),
            GateKind::Rzz => {
                let a = C64::cis(-angle / 2.0);
                let b = C64::cis(angle / 2.0);
                CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b, b, a]))
            }
            GateKind::Cnot => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = one;
                m[(1, 1)] = one;
                m[(2, 3)] = one;
                m[(3, 2)] = one;
                m
            }
            GateKind::Cz => {
                CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![one, one, one, -one]))
            }
            GateKind::S => CMatrix::from_row_slice(2, 2, &[one, zero, zero, i]),
            GateKind::Sdg => CMatrix::from_row_slice(2, 2, &[one, zero, zero, -i]),
            GateKind::H => {
                let h = C64::new(FRAC_1_SQRT_2, 0.0);
                CMatrix::from_row_slice(2, 2, &[h, h, h, -h])
            }
            GateKind::X => CMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
            GateKind::Y => CMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]),
            GateKind::Z => CMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
        };
        Ok(m)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        if let Some(a) = self.angle {
            write!(f, "({a})")?;
        }
        let qs: Vec<String> = self.qubits.iter().map(|q| q.to_string()).collect();
        write!(f, " q[{}]", qs.join(","))
    }
}

/// Free-function form of [`Gate::matrix`].
pub fn gate_matrix(g: &Gate) -> Result<CMatrix> {
    g.matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    // exp(-iθX/2) summed as a power series; independent of the closed form.
    fn rx_series(theta: f64) -> CMatrix {
        let x = Gate::x(0).matrix().unwrap();
        let a = x * C64::new(0.0, -theta / 2.0);
        let mut term = CMatrix::identity(2, 2);
        let mut sum = term.clone();
        for k in 1..40 {
            term = &term * &a / C64::new(k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    #[test]
    fn pz_zero_is_identity() {
        let m = Gate::pz(0, 0.0).matrix().unwrap();
        assert!(max_abs_diff(&m, &CMatrix::identity(2, 2)) < 1e-15);
    }

    #[test]
    fn rzz_quarter_turn() {
        let m = Gate::rzz(0, 1, PI / 2.0).matrix().unwrap();
        let a = C64::cis(-PI / 4.0);
        let b = C64::cis(PI / 4.0);
        let expected = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b, b, a]));
        assert!(max_abs_diff(&m, &expected) < 1e-15);
    }

    #[test]
    fn rx_pi_matches_series() {
        let m = Gate::rx(0, PI).matrix().unwrap();
        let x = Gate::x(0).matrix().unwrap();
        let minus_i_x = x * C64::new(0.0, -1.0);
        assert!(max_abs_diff(&m, &minus_i_x) < 1e-15);
        for theta in [PI, 0.3, -1.7, 2.9] {
            let m = Gate::rx(0, theta).matrix().unwrap();
            assert!(max_abs_diff(&m, &rx_series(theta)) < 1e-13);
        }
    }

    #[test]
    fn s_is_quarter_phase() {
        let s = Gate::s(0).matrix().unwrap();
        assert!((s[(1, 1)] - C64::cis(PI / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn missing_angle_is_malformed() {
        let g = Gate::new(GateKind::Rx, vec![0], None);
        assert!(matches!(g.matrix(), Err(Error::MalformedGate(_))));
        let g = Gate::new(GateKind::Cnot, vec![0], None);
        assert!(matches!(g.check(2), Err(Error::MalformedGate(_))));
        let g = Gate::new(GateKind::Cnot, vec![1, 1], None);
        assert!(matches!(g.check(2), Err(Error::MalformedGate(_))));
        let g = Gate::new(GateKind::H, vec![0], Some(1.0));
        assert!(matches!(g.check(2), Err(Error::MalformedGate(_))));
    }

    #[test]
    fn out_of_range_index() {
        let g = Gate::cnot(0, 3);
        assert!(matches!(
            g.check(3),
            Err(Error::QubitOutOfRange {
                index: 3,
                n_qubits: 3
            })
        ));
    }

    #[test]
    fn every_kind_is_unitary_and_inverse_matches_adjoint() {
        let gates = [
            Gate::rx(0, 0.71),
            Gate::pz(0, -1.3),
            Gate::rzz(0, 1, 2.2),
            Gate::cnot(0, 1),
            Gate::cz(0, 1),
            Gate::s(0),
            Gate::sdg(0),
            Gate::h(0),
            Gate::x(0),
            Gate::y(0),
            Gate::z(0),
        ];
        for g in &gates {
            let m = g.matrix().unwrap();
            let d = m.nrows();
            let prod = m.adjoint() * &m;
            assert!(max_abs_diff(&prod, &CMatrix::identity(d, d)) < 1e-12, "{g}");
            let inv = g.inverse().matrix().unwrap();
            assert!(max_abs_diff(&inv, &m.adjoint()) < 1e-15, "{g}");
        }
    }
}

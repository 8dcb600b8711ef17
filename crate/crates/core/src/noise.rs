//! Hardware-style noise: two-qubit depolarizing after every CNOT, classical readout
//! confusion, and finite-shot sampling.
//!
//! Default strengths come from the calibration of the four-qubit chain the experiment
//! ran on. Only the averaged SPAM error `ε = (T(0|1) + T(1|0))/2` is known per qubit, so
//! the default readout model splits it symmetrically.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::qsim::{bitstring, BitstringDistribution, Circuit, DensityMatrix, Gate, GateKind};
use crate::{CMatrix, Error, RMatrix, Result, C64};

/// Largest register accepted by the density-matrix simulator.
pub const MAX_NOISY_QUBITS: usize = 8;

/// Per-CNOT error on the chain bonds (1,2), (2,3), (3,4).
pub const CALIBRATED_CNOT_ERRORS: [f64; 3] = [7.67e-3, 7.00e-3, 7.68e-3];

/// Averaged SPAM error per qubit of the chain.
pub const CALIBRATED_SPAM_ERRORS: [f64; 4] = [0.043, 0.015, 0.017, 0.017];

/// Default per-CNOT error where no bond-specific value applies.
pub const DEFAULT_CNOT_ERROR: f64 = CALIBRATED_CNOT_ERRORS[0];

/// Readout flip probabilities of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutError {
    /// `T(1|0)`: read 1 after preparing 0.
    pub p1_given0: f64,
    /// `T(0|1)`: read 0 after preparing 1.
    pub p0_given1: f64,
}

impl ReadoutError {
    pub const NONE: ReadoutError = ReadoutError {
        p1_given0: 0.0,
        p0_given1: 0.0,
    };

    /// Both flip probabilities equal to `eps`.
    pub fn symmetric(eps: f64) -> Self {
        Self {
            p1_given0: eps,
            p0_given1: eps,
        }
    }

    /// Column-stochastic 2×2 matrix, columns indexed by the prepared state.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [
            [1.0 - self.p1_given0, self.p0_given1],
            [self.p1_given0, 1.0 - self.p0_given1],
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing strength for a CNOT on a pair without a bond-specific value.
    pub cnot_error: f64,
    /// Bond-specific strengths; entry `b` covers CNOTs between qubits `b` and `b + 1`.
    pub edge_cnot_errors: Vec<f64>,
    /// One entry per qubit.
    pub readout: Vec<ReadoutError>,
    pub seed: u64,
}

impl NoiseModel {
    /// No gate or readout noise.
    pub fn ideal(n: usize) -> Self {
        Self {
            cnot_error: 0.0,
            edge_cnot_errors: Vec::new(),
            readout: vec![ReadoutError::NONE; n],
            seed: 0,
        }
    }

    /// The calibrated four-qubit chain, padded with the last bond/qubit value beyond it.
    pub fn calibrated(n: usize) -> Self {
        let edge = |b: usize| CALIBRATED_CNOT_ERRORS[b.min(CALIBRATED_CNOT_ERRORS.len() - 1)];
        let spam = |q: usize| CALIBRATED_SPAM_ERRORS[q.min(CALIBRATED_SPAM_ERRORS.len() - 1)];
        Self {
            cnot_error: DEFAULT_CNOT_ERROR,
            edge_cnot_errors: (0..n.saturating_sub(1)).map(edge).collect(),
            readout: (0..n).map(|q| ReadoutError::symmetric(spam(q))).collect(),
            seed: 0,
        }
    }

    /// Same CNOT error on every pair, no readout noise.
    pub fn uniform_cnot(n: usize, cnot_error: f64) -> Self {
        Self {
            cnot_error,
            ..Self::ideal(n)
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.readout.len()
    }

    pub fn cnot_error_between(&self, a: usize, b: usize) -> f64 {
        let lo = a.min(b);
        if a.abs_diff(b) == 1 && lo < self.edge_cnot_errors.len() {
            self.edge_cnot_errors[lo]
        } else {
            self.cnot_error
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        if !in_unit(self.cnot_error) || !self.edge_cnot_errors.iter().all(|&e| in_unit(e)) {
            return Err(Error::Config("CNOT error rates must lie in [0, 1]".into()));
        }
        if !self
            .readout
            .iter()
            .all(|r| in_unit(r.p1_given0) && in_unit(r.p0_given1))
        {
            return Err(Error::Config(
                "readout error rates must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// The same model without any CNOT noise.
    pub fn readout_only(&self) -> Self {
        Self {
            cnot_error: 0.0,
            edge_cnot_errors: Vec::new(),
            ..self.clone()
        }
    }
}

fn pauli(k: usize) -> CMatrix {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match k {
        0 => CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        1 => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        2 => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        _ => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

/// Kraus operators of `ρ → (1−p)ρ + p·(I/4 ⊗ tr_pair ρ)` on a qubit pair: weight
/// `1 − 15p/16` on the identity and `p/16` on each of the 15 non-identity Paulis.
pub fn depolarizing_kraus(p: f64) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(16);
    for a in 0..4 {
        for b in 0..4 {
            let weight = if a == 0 && b == 0 {
                1.0 - 15.0 * p / 16.0
            } else {
                p / 16.0
            };
            out.push(pauli(a).kronecker(&pauli(b)) * C64::new(weight.max(0.0).sqrt(), 0.0));
        }
    }
    out
}

/// Replaces every CNOT by `m` consecutive copies. `m` must be odd so the logical
/// circuit is unchanged.
pub fn fold_cnots(c: &Circuit, m: usize) -> Result<Circuit> {
    if m.is_multiple_of(2) {
        return Err(Error::Config(format!("fold factor must be odd, got {m}")));
    }
    let mut gates = Vec::with_capacity(c.len() + (m - 1) * c.cnot_count());
    for g in c.gates() {
        let copies = if g.is_cnot() { m } else { 1 };
        gates.extend(std::iter::repeat_n(g.clone(), copies));
    }
    Circuit::from_gates(c.n_qubits(), gates)
}

fn check_noisy_capacity(n: usize) -> Result<()> {
    if n > MAX_NOISY_QUBITS {
        return Err(Error::Capacity {
            parameter: "n_qubits",
            value: n,
            limit: MAX_NOISY_QUBITS,
        });
    }
    Ok(())
}

/// Density-matrix run of `c` from `|0…0⟩`: each CNOT is followed by a depolarizing
/// channel on its pair, single-qubit gates are noiseless, and the final readout
/// distribution passes through the per-qubit confusion matrices.
pub fn simulate_noisy(c: &Circuit, nm: &NoiseModel) -> Result<BitstringDistribution> {
    let n = c.n_qubits();
    check_noisy_capacity(n)?;
    nm.validate()?;
    if nm.n_qubits() != n {
        return Err(Error::DimensionMismatch(format!(
            "noise model covers {} qubits, circuit has {n}",
            nm.n_qubits()
        )));
    }
    let mut rho = DensityMatrix::zeros(n)?;
    let mut kraus_cache: Vec<(f64, Vec<CMatrix>)> = Vec::new();
    for g in c.gates() {
        rho.apply_gate(g)?;
        if g.kind != GateKind::Cnot {
            continue;
        }
        let p = nm.cnot_error_between(g.qubits[0], g.qubits[1]);
        if p == 0.0 {
            continue;
        }
        let idx = match kraus_cache.iter().position(|(q, _)| *q == p) {
            Some(i) => i,
            None => {
                kraus_cache.push((p, depolarizing_kraus(p)));
                kraus_cache.len() - 1
            }
        };
        rho.apply_channel(&kraus_cache[idx].1, &g.qubits)?;
    }
    let ideal = rho.measurement_distribution()?;
    apply_readout(&ideal, &nm.readout)
}

/// Pushes a distribution through independent per-qubit readout confusion.
pub fn apply_readout(
    d: &BitstringDistribution,
    readout: &[ReadoutError],
) -> Result<BitstringDistribution> {
    let n = d.n_qubits();
    if readout.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} readout entries for {n} qubits",
            readout.len()
        )));
    }
    let mut p = d.probabilities().to_vec();
    for (q, r) in readout.iter().enumerate() {
        let m = r.matrix();
        let mask = 1usize << (n - 1 - q);
        for x in 0..p.len() {
            if x & mask != 0 {
                continue;
            }
            let (p0, p1) = (p[x], p[x | mask]);
            p[x] = m[0][0] * p0 + m[0][1] * p1;
            p[x | mask] = m[1][0] * p0 + m[1][1] * p1;
        }
    }
    BitstringDistribution::new(n, p)
}

/// Dense `2^n × 2^n` transition matrix `T[observed, prepared]`, the tensor product of
/// the per-qubit confusion matrices (qubit 0 as the leftmost factor).
pub fn build_confusion_matrix(nm: &NoiseModel) -> RMatrix {
    nm.readout.iter().fold(RMatrix::identity(1, 1), |acc, r| {
        let m = r.matrix();
        let local = RMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
        acc.kronecker(&local)
    })
}

/// Measurement counts from a finite number of shots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotResult {
    n_qubits: usize,
    shots: u64,
    counts: Vec<u64>,
}

impl ShotResult {
    pub fn from_counts(n_qubits: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} counts for {n_qubits} qubits",
                counts.len()
            )));
        }
        let shots = counts.iter().sum();
        if shots == 0 {
            return Err(Error::InvalidDistribution("no shots".into()));
        }
        Ok(Self {
            n_qubits,
            shots,
            counts,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// Counts indexed by outcome.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Non-zero counts keyed by bitstring.
    pub fn counts_by_bitstring(&self) -> std::collections::BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(x, &c)| (bitstring(self.n_qubits, x), c))
            .collect()
    }

    pub fn to_distribution(&self) -> BitstringDistribution {
        let total = self.shots as f64;
        let p = self.counts.iter().map(|&c| c as f64 / total).collect();
        BitstringDistribution::new(self.n_qubits, p).expect("normalised counts form a distribution")
    }
}

/// Multinomial sample of `shots` outcomes drawn from `d` with `rng`.
pub fn sample_counts_with<R: Rng + ?Sized>(
    d: &BitstringDistribution,
    shots: u64,
    rng: &mut R,
) -> Result<ShotResult> {
    if shots == 0 {
        return Err(Error::Config("shots must be >= 1".into()));
    }
    let weights = WeightedIndex::new(d.probabilities())
        .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let mut counts = vec![0u64; d.probabilities().len()];
    for _ in 0..shots {
        counts[weights.sample(rng)] += 1;
    }
    ShotResult::from_counts(d.n_qubits(), counts)
}

/// Seeded multinomial sample; identical seeds give identical counts.
pub fn sample_counts(d: &BitstringDistribution, shots: u64, seed: u64) -> Result<ShotResult> {
    sample_counts_with(d, shots, &mut rng_from_seed(seed))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Estimates `T` column by column: each of the `2^n` basis states is prepared with X
/// gates, read out through the model, and sampled `shots` times.
pub fn estimate_confusion_matrix<R: Rng + ?Sized>(
    nm: &NoiseModel,
    shots: u64,
    rng: &mut R,
) -> Result<RMatrix> {
    let n = nm.n_qubits();
    let dim = 1usize << n;
    let mut t = RMatrix::zeros(dim, dim);
    for x in 0..dim {
        let prep = Circuit::from_gates(
            n,
            (0..n)
                .filter(|&q| x & (1 << (n - 1 - q)) != 0)
                .map(Gate::x)
                .collect(),
        )?;
        let d = simulate_noisy(&prep, nm)?;
        let counts = sample_counts_with(&d, shots, rng)?;
        for (obs, &c) in counts.counts().iter().enumerate() {
            t[(obs, x)] = c as f64 / shots as f64;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{max_abs_diff, StateVector};

    #[test]
    fn kraus_completeness() {
        for p in [0.0, 7.67e-3, 0.3, 1.0] {
            let sum = depolarizing_kraus(p)
                .iter()
                .fold(CMatrix::zeros(4, 4), |acc, k| acc + k.adjoint() * k);
            assert!(max_abs_diff(&sum, &CMatrix::identity(4, 4)) < 1e-12);
        }
    }

    #[test]
    fn zero_noise_matches_pure_state() {
        let c = Circuit::from_gates(
            3,
            vec![
                Gate::h(0),
                Gate::cnot(0, 1),
                Gate::rx(2, 0.4),
                Gate::cnot(1, 2),
            ],
        )
        .unwrap();
        let noisy = simulate_noisy(&c, &NoiseModel::ideal(3)).unwrap();
        let mut s = StateVector::zeros(3).unwrap();
        s.apply_circuit(&c).unwrap();
        let pure = s.measurement_distribution();
        for (a, b) in noisy.probabilities().iter().zip(pure.probabilities()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn single_cnot_return_probability() {
        // depolarizing replaces the pair state by I/4 with probability p
        let p = 0.05;
        let c = Circuit::from_gates(2, vec![Gate::cnot(0, 1)]).unwrap();
        let d = simulate_noisy(&c, &NoiseModel::uniform_cnot(2, p)).unwrap();
        assert!((d.zeros_probability() - (1.0 - p + p / 4.0)).abs() < 1e-14);
        assert!((d.probability(0b11) - p / 4.0).abs() < 1e-14);
    }

    #[test]
    fn calibrated_defaults() {
        let nm = NoiseModel::calibrated(4);
        assert_eq!(nm.cnot_error_between(0, 1), 7.67e-3);
        assert_eq!(nm.cnot_error_between(2, 1), 7.00e-3);
        assert_eq!(nm.cnot_error_between(3, 2), 7.68e-3);
        assert_eq!(nm.cnot_error_between(0, 3), DEFAULT_CNOT_ERROR);
        assert_eq!(nm.readout[0], ReadoutError::symmetric(0.043));
        let t = build_confusion_matrix(&nm);
        let expected: f64 = CALIBRATED_SPAM_ERRORS.iter().map(|e| 1.0 - e).product();
        assert!((t[(0, 0)] - expected).abs() < 1e-15);
    }

    #[test]
    fn confusion_single_qubit() {
        let nm = NoiseModel {
            readout: vec![ReadoutError {
                p1_given0: 0.01,
                p0_given1: 0.02,
            }],
            ..NoiseModel::ideal(1)
        };
        let t = build_confusion_matrix(&nm);
        let expected = RMatrix::from_row_slice(2, 2, &[0.99, 0.02, 0.01, 0.98]);
        assert!((t - expected).amax() < 1e-15);
        assert_eq!(
            build_confusion_matrix(&NoiseModel::ideal(3)),
            RMatrix::identity(8, 8)
        );
    }

    #[test]
    fn confusion_columns_stochastic() {
        let t = build_confusion_matrix(&NoiseModel::calibrated(4));
        for c in t.column_iter() {
            assert!((c.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn readout_kernel_matches_dense_matrix() {
        let nm = NoiseModel::calibrated(3);
        let mut s = StateVector::zeros(3).unwrap();
        for g in [Gate::h(0), Gate::rx(1, 1.1), Gate::cnot(0, 2)] {
            s.apply_gate(&g).unwrap();
        }
        let d = s.measurement_distribution();
        let fast = apply_readout(&d, &nm.readout).unwrap();
        let dense =
            build_confusion_matrix(&nm) * nalgebra::DVector::from_column_slice(d.probabilities());
        for (a, b) in fast.probabilities().iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn folding() {
        let c =
            Circuit::from_gates(2, vec![Gate::cnot(0, 1), Gate::h(0), Gate::cnot(1, 0)]).unwrap();
        assert_eq!(fold_cnots(&c, 1).unwrap(), c);
        let f = fold_cnots(&c, 3).unwrap();
        assert_eq!(f.cnot_count(), 6);
        assert_eq!(f.len(), 7);
        assert!(max_abs_diff(&f.unitary().unwrap(), &c.unitary().unwrap()) < 1e-12);
        assert!(fold_cnots(&c, 2).is_err());
    }

    #[test]
    fn sampling() {
        let point = BitstringDistribution::point_mass(2, 0b10).unwrap();
        let r = sample_counts(&point, 100, 7).unwrap();
        assert_eq!(r.counts(), &[0, 0, 100, 0]);
        assert_eq!(r.counts_by_bitstring().get("10"), Some(&100));

        let half = BitstringDistribution::new(1, vec![0.5, 0.5]).unwrap();
        let r = sample_counts(&half, 8192, 11).unwrap();
        let sigma = (8192.0f64 * 0.25).sqrt();
        assert!((r.counts()[0] as f64 - 4096.0).abs() < 5.0 * sigma);
        assert_eq!(r, sample_counts(&half, 8192, 11).unwrap());
        assert_eq!(r.shots(), 8192);
        assert!(sample_counts(&half, 0, 1).is_err());
    }

    #[test]
    fn capacity() {
        let c = Circuit::new(9);
        assert!(matches!(
            simulate_noisy(&c, &NoiseModel::ideal(9)),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn empirical_confusion_converges() {
        let nm = NoiseModel::calibrated(2);
        let t = estimate_confusion_matrix(&nm, 200_000, &mut rng_from_seed(3)).unwrap();
        assert!((t - build_confusion_matrix(&nm)).amax() < 5e-3);
    }
}

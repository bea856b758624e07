use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::rng::RngStream;

pub const DEFAULT_DENSE_LIMIT: usize = 14;

const UNITARY_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A one- or two-qubit unitary, row-major.
///
/// Two-qubit gates use the basis `|ab⟩` where `a` is the first target.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    arity: usize,
    matrix: Vec<Complex64>,
}

impl Gate {
    pub fn from_matrix(arity: usize, matrix: Vec<Complex64>) -> Result<Self> {
        ensure!(arity == 1 || arity == 2, "only 1- and 2-qubit gates are supported");
        let dim = 1 << arity;
        ensure!(
            matrix.len() == dim * dim,
            "a {arity}-qubit gate needs {} entries, got {}",
            dim * dim,
            matrix.len()
        );
        // U†U = I
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = c(0.0, 0.0);
                for k in 0..dim {
                    acc += matrix[k * dim + i].conj() * matrix[k * dim + j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                ensure!(
                    (acc - c(want, 0.0)).norm() <= UNITARY_TOL,
                    "gate is not unitary (entry ({i},{j}) of U†U is {acc})"
                );
            }
        }
        Ok(Self { arity, matrix })
    }

    fn fixed(arity: usize, matrix: Vec<Complex64>) -> Self {
        Self { arity, matrix }
    }

    pub fn identity() -> Self {
        Self::fixed(1, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
    }

    pub fn hadamard() -> Self {
        let h = FRAC_1_SQRT_2;
        Self::fixed(1, vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
    }

    pub fn pauli_x() -> Self {
        Self::fixed(1, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn pauli_z() -> Self {
        Self::fixed(1, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    /// `diag(1, e^{iθ})`, i.e. `R_z(θ)` with its global phase dropped.
    pub fn rz(theta: f64) -> Self {
        Self::fixed(
            1,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, theta)],
        )
    }

    /// Controlled-NOT, control = first target.
    pub fn cnot() -> Self {
        let mut m = vec![c(0.0, 0.0); 16];
        m[0] = c(1.0, 0.0);
        m[5] = c(1.0, 0.0);
        m[11] = c(1.0, 0.0);
        m[14] = c(1.0, 0.0);
        Self::fixed(2, m)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

/// Complex amplitude vector over `num_qubits` qubits.
///
/// Qubit `q` is bit `num_qubits − 1 − q` of the basis index, so qubit 0 is the
/// leftmost character of a ket label.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl DenseState {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::with_limit(num_qubits, DEFAULT_DENSE_LIMIT)
    }

    pub fn with_limit(num_qubits: usize, limit: usize) -> Result<Self> {
        ensure!(num_qubits >= 1, "dense state needs at least one qubit");
        ensure!(
            num_qubits <= limit,
            "{num_qubits} qubits exceed the dense limit of {limit}"
        );
        let mut amplitudes = vec![c(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = c(1.0, 0.0);
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::from_amplitudes_with_limit(amplitudes, DEFAULT_DENSE_LIMIT)
    }

    /// Wraps an amplitude vector whose norm is 1 within `1e-10`; the vector is
    /// renormalized exactly.
    pub fn from_amplitudes_with_limit(mut amplitudes: Vec<Complex64>, limit: usize) -> Result<Self> {
        let len = amplitudes.len();
        ensure!(
            len >= 2 && len.is_power_of_two(),
            "amplitude count {len} is not a power of two ≥ 2"
        );
        let num_qubits = len.trailing_zeros() as usize;
        ensure!(
            num_qubits <= limit,
            "{num_qubits} qubits exceed the dense limit of {limit}"
        );
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        ensure!(
            (norm - 1.0).abs() <= 1e-10,
            "amplitudes are not normalized (Σ|a|² = {norm})"
        );
        let scale = norm.sqrt().recip();
        amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok(Self { num_qubits, amplitudes })
    }

    /// Product state of single-qubit states `(α, β)`, qubit 0 first.
    pub fn product(qubits: &[(Complex64, Complex64)]) -> Result<Self> {
        ensure!(!qubits.is_empty(), "product state needs at least one qubit");
        let mut amplitudes = vec![c(1.0, 0.0)];
        for (alpha, beta) in qubits {
            amplitudes = amplitudes.iter().flat_map(|a| [a * alpha, a * beta]).collect();
        }
        Self::from_amplitudes(amplitudes)
    }

    /// `self ⊗ other`, with `self`'s qubits first.
    pub fn tensor(&self, other: &DenseState) -> Result<Self> {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self::from_amplitudes(amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    /// Apply `gate` to `targets` in place.
    pub fn apply(&mut self, gate: &Gate, targets: &[usize]) -> Result<()> {
        ensure!(
            targets.len() == gate.arity,
            "gate arity {} does not match {} targets",
            gate.arity,
            targets.len()
        );
        for (i, &t) in targets.iter().enumerate() {
            ensure!(
                t < self.num_qubits,
                "target {t} out of range for {} qubits",
                self.num_qubits
            );
            ensure!(!targets[..i].contains(&t), "targets must be distinct");
        }
        let masks: Vec<usize> = targets.iter().map(|&t| self.mask(t)).collect();
        let all: usize = masks.iter().sum();
        let dim = 1 << gate.arity;
        let mut local = vec![c(0.0, 0.0); dim];
        for base in 0..self.amplitudes.len() {
            if base & all != 0 {
                continue;
            }
            // index of local basis state `sub` within the full vector
            let index = |sub: usize| {
                masks.iter().enumerate().fold(base, |acc, (pos, m)| {
                    if sub & (1 << (gate.arity - 1 - pos)) != 0 {
                        acc | m
                    } else {
                        acc
                    }
                })
            };
            for (sub, slot) in local.iter_mut().enumerate() {
                *slot = self.amplitudes[index(sub)];
            }
            for row in 0..dim {
                let v = (0..dim).map(|col| gate.matrix[row * dim + col] * local[col]).sum();
                self.amplitudes[index(row)] = v;
            }
        }
        Ok(())
    }

    /// Like [`Self::apply`] but returns a new state.
    pub fn applied(&self, gate: &Gate, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply(gate, targets)?;
        Ok(out)
    }

    /// Probability that `qubit` reads 1 in the computational basis.
    pub fn prob_one(&self, qubit: usize) -> Result<f64> {
        ensure!(qubit < self.num_qubits, "qubit {qubit} out of range");
        let m = self.mask(qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective computational-basis measurement of one qubit; collapses and
    /// renormalizes the state.
    pub fn measure(&mut self, qubit: usize, rng: &mut RngStream) -> Result<u8> {
        let p1 = self.prob_one(qubit)?;
        let outcome = rng.bernoulli(p1) as u8;
        self.project(qubit, outcome)?;
        Ok(outcome)
    }

    /// Collapse `qubit` onto `|outcome⟩`. Fails when that branch has zero weight.
    pub fn project(&mut self, qubit: usize, outcome: u8) -> Result<()> {
        ensure!(qubit < self.num_qubits, "qubit {qubit} out of range");
        let m = self.mask(qubit);
        let keep = |i: usize| ((i & m != 0) as u8) == outcome;
        let weight: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, a)| a.norm_sqr())
            .sum();
        ensure!(
            weight > 1e-300,
            "outcome {outcome} on qubit {qubit} has zero probability"
        );
        let scale = weight.sqrt().recip();
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if keep(i) {
                *a *= scale;
            } else {
                *a = c(0.0, 0.0);
            }
        }
        Ok(())
    }

    /// Bell-basis measurement of `(qubit_a, qubit_b)`.
    ///
    /// Implemented as CNOT(a→b), H(a), then measuring `a` (giving `m0`, the
    /// phase bit) and `b` (giving `m1`, the bit-flip bit). In teleportation the
    /// third qubit is left in `X^{m1} Z^{m0}|φ⟩`, so the receiver undoes it by
    /// applying `X^{m1}` followed by `Z^{m0}`.
    pub fn bell_measure(&mut self, qubit_a: usize, qubit_b: usize, rng: &mut RngStream) -> Result<(u8, u8)> {
        ensure!(qubit_a != qubit_b, "Bell measurement needs two distinct qubits");
        self.apply(&Gate::cnot(), &[qubit_a, qubit_b])?;
        self.apply(&Gate::hadamard(), &[qubit_a])?;
        let m0 = self.measure(qubit_a, rng)?;
        let m1 = self.measure(qubit_b, rng)?;
        Ok((m0, m1))
    }

    /// The state of `qubit` when the register factorizes as `|rest⟩ ⊗ |ψ⟩_qubit`
    /// (e.g. after every other qubit has been measured).
    pub fn qubit_state(&self, qubit: usize) -> Result<(Complex64, Complex64)> {
        ensure!(qubit < self.num_qubits, "qubit {qubit} out of range");
        let m = self.mask(qubit);
        let (zero, _) = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m == 0)
            .map(|(i, a)| (i, a.norm_sqr() + self.amplitudes[i | m].norm_sqr()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let alpha = self.amplitudes[zero];
        let beta = self.amplitudes[zero | m];
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        Ok((alpha / norm, beta / norm))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &DenseState) -> Result<f64> {
        ensure!(
            self.num_qubits == other.num_qubits,
            "fidelity between {} and {} qubit states",
            self.num_qubits,
            other.num_qubits
        );
        let overlap: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(overlap.norm_sqr())
    }
}

/// `|⟨a|b⟩|²` for single-qubit states.
pub fn qubit_fidelity(a: (Complex64, Complex64), b: (Complex64, Complex64)) -> f64 {
    (a.0.conj() * b.0 + a.1.conj() * b.1).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::GhzPhaseState;

    fn assert_close(a: &DenseState, b: &DenseState) {
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn hadamard_on_zero() {
        let s = DenseState::new(1).unwrap().applied(&Gate::hadamard(), &[0]).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn identity_leaves_state() {
        let g = GhzPhaseState::new(3).unwrap().to_dense().unwrap();
        assert_eq!(g.applied(&Gate::identity(), &[1]).unwrap(), g);
    }

    #[test]
    fn sigma_z_matches_phase_backend() {
        let ghz = GhzPhaseState::new(3).unwrap();
        let via_dense = ghz.to_dense().unwrap().applied(&Gate::pauli_z(), &[2]).unwrap();
        let via_phase = ghz.apply_phase_flip(2).unwrap().to_dense().unwrap();
        assert_close(&via_dense, &via_phase);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(Gate::from_matrix(1, m).is_err());
        let h = Gate::hadamard();
        assert!(Gate::from_matrix(1, h.matrix.clone()).is_ok());
    }

    #[test]
    fn rejects_bad_targets() {
        let mut s = DenseState::new(2).unwrap();
        assert!(s.apply(&Gate::cnot(), &[0, 0]).is_err());
        assert!(s.apply(&Gate::hadamard(), &[2]).is_err());
        assert!(s.apply(&Gate::hadamard(), &[0, 1]).is_err());
    }

    #[test]
    fn limit_enforced() {
        assert!(DenseState::new(15).is_err());
        assert!(DenseState::with_limit(15, 16).is_ok());
    }

    #[test]
    fn cnot_makes_bell_pair() {
        let mut s = DenseState::new(2).unwrap();
        s.apply(&Gate::hadamard(), &[0]).unwrap();
        s.apply(&Gate::cnot(), &[0, 1]).unwrap();
        let bell = GhzPhaseState::new(2).unwrap().to_dense().unwrap();
        assert!((s.fidelity(&bell).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_measure_rejects_same_qubit() {
        let mut s = DenseState::new(3).unwrap();
        let mut rng = RngStream::new(0, 0);
        assert!(s.bell_measure(1, 1, &mut rng).is_err());
    }

    #[test]
    fn teleport_zero_identity_branch() {
        let bell = GhzPhaseState::new(2).unwrap().to_dense().unwrap();
        let input = DenseState::new(1).unwrap();
        let mut rng = RngStream::new(1, 0);
        for _ in 0..64 {
            let mut s = input.tensor(&bell).unwrap();
            let (m0, m1) = s.bell_measure(0, 1, &mut rng).unwrap();
            if (m0, m1) == (0, 0) {
                let (a, b) = s.qubit_state(2).unwrap();
                assert!((a.norm() - 1.0).abs() < 1e-12 && b.norm() < 1e-12);
                return;
            }
        }
        panic!("never observed outcome (0,0)");
    }

    #[test]
    fn measurement_keeps_norm() {
        let mut s = GhzPhaseState::new(4).unwrap().to_dense().unwrap();
        for q in 0..4 {
            s.apply(&Gate::hadamard(), &[q]).unwrap();
        }
        let mut rng = RngStream::new(9, 9);
        s.measure(2, &mut rng).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

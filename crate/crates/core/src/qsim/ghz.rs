use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DenseState, MeasurementRecord, DEFAULT_DENSE_LIMIT};
use crate::error::{ensure, Error, Result};
use crate::rng::RngStream;

/// Largest supported phase denominator exponent. Keeps `2^(J+1)` inside `u64`.
pub const MAX_DENOM_EXP: u32 = 60;

/// The state `(|0ⁿ⟩ + e^{iπk/2^J}|1ⁿ⟩)/√2`, up to global phase.
///
/// `k` is held modulo `2^(J+1)` so all phase arithmetic is exact. Local phase
/// operations act on this state identically whichever qubit they touch, which
/// is why the operations below take a player index only for range checking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GhzPhaseState {
    num_qubits: usize,
    phase_numerator: u64,
    phase_denom_exp: u32,
}

impl GhzPhaseState {
    /// `(|0ⁿ⟩ + |1ⁿ⟩)/√2` with `J = 0`.
    pub fn new(num_qubits: usize) -> Result<Self> {
        ensure!(num_qubits >= 2, "GHZ state needs at least 2 qubits, got {num_qubits}");
        Ok(Self {
            num_qubits,
            phase_numerator: 0,
            phase_denom_exp: 0,
        })
    }

    /// State with relative phase `π·numerator/2^denom_exp`.
    ///
    /// Two-qubit instances are Bell states; [`Self::new`] enforces `n ≥ 2` as well.
    pub fn with_phase(num_qubits: usize, numerator: u64, denom_exp: u32) -> Result<Self> {
        ensure!(num_qubits >= 2, "GHZ state needs at least 2 qubits, got {num_qubits}");
        ensure!(
            denom_exp <= MAX_DENOM_EXP,
            "phase denominator exponent {denom_exp} exceeds {MAX_DENOM_EXP}"
        );
        let modulus = 1u64 << (denom_exp + 1);
        Ok(Self {
            num_qubits,
            phase_numerator: numerator % modulus,
            phase_denom_exp: denom_exp,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn phase_numerator(&self) -> u64 {
        self.phase_numerator
    }

    pub fn phase_denom_exp(&self) -> u32 {
        self.phase_denom_exp
    }

    fn modulus(&self) -> u64 {
        1u64 << (self.phase_denom_exp + 1)
    }

    /// Same state expressed over the finer denominator `2^denom_exp`.
    pub fn rescaled(&self, denom_exp: u32) -> Result<Self> {
        ensure!(
            denom_exp >= self.phase_denom_exp,
            "cannot rescale phase denominator down from {} to {denom_exp}",
            self.phase_denom_exp
        );
        ensure!(
            denom_exp <= MAX_DENOM_EXP,
            "phase denominator exponent {denom_exp} exceeds {MAX_DENOM_EXP}"
        );
        Ok(Self {
            num_qubits: self.num_qubits,
            phase_numerator: self.phase_numerator << (denom_exp - self.phase_denom_exp),
            phase_denom_exp: denom_exp,
        })
    }

    fn check_player(&self, player: usize) -> Result<()> {
        ensure!(
            player < self.num_qubits,
            "player {player} out of range for {} qubits",
            self.num_qubits
        );
        Ok(())
    }

    /// `σ_z` on one qubit: adds `π` to the relative phase.
    pub fn apply_phase_flip(&self, player: usize) -> Result<Self> {
        self.check_player(player)?;
        let mut out = *self;
        out.phase_numerator = (self.phase_numerator + (1u64 << self.phase_denom_exp)) % self.modulus();
        Ok(out)
    }

    /// `R_z(π·numerator/2^denom_exp) ≅ diag(1, e^{iθ})` on one qubit.
    ///
    /// The denominator is rescaled upward when `denom_exp > J`.
    pub fn apply_rz(&self, player: usize, numerator: i64, denom_exp: u32) -> Result<Self> {
        self.check_player(player)?;
        let base = if denom_exp > self.phase_denom_exp {
            self.rescaled(denom_exp)?
        } else {
            *self
        };
        let shift = base.phase_denom_exp - denom_exp;
        let modulus = base.modulus() as i128;
        let delta = ((numerator as i128) << shift).rem_euclid(modulus);
        let mut out = base;
        out.phase_numerator = ((base.phase_numerator as i128 + delta) % modulus) as u64;
        Ok(out)
    }

    pub fn phase_radians(&self) -> f64 {
        PI * self.phase_numerator as f64 / (1u64 << self.phase_denom_exp) as f64
    }

    /// `cos φ`, exact at multiples of `π/2`.
    pub fn cos_phase(&self) -> f64 {
        let k = self.phase_numerator;
        let m = self.modulus();
        if k == 0 {
            1.0
        } else if 2 * k == m {
            -1.0
        } else if 4 * k == m || 4 * k == 3 * m {
            0.0
        } else {
            self.phase_radians().cos()
        }
    }

    /// Whether the relative phase is exactly zero.
    pub fn is_phase_zero(&self) -> bool {
        self.phase_numerator == 0
    }

    /// Whether both states describe the same physical state, irrespective of `J`.
    pub fn same_state(&self, other: &Self) -> bool {
        if self.num_qubits != other.num_qubits {
            return false;
        }
        let j = self.phase_denom_exp.max(other.phase_denom_exp);
        let a = self.phase_numerator << (j - self.phase_denom_exp);
        let b = other.phase_numerator << (j - other.phase_denom_exp);
        a == b
    }

    /// Probability that the Hadamard-basis outcome has odd weight: `(1 − cos φ)/2`.
    pub fn prob_odd_parity(&self) -> f64 {
        (1.0 - self.cos_phase()) / 2.0
    }

    /// Exact probability of observing `outcome` after `H^⊗n`:
    /// `(1 + (−1)^{|x|} cos φ) / 2ⁿ`.
    pub fn outcome_probability(&self, outcome: &[u8]) -> Result<f64> {
        ensure!(
            outcome.len() == self.num_qubits,
            "outcome has {} bits, state has {} qubits",
            outcome.len(),
            self.num_qubits
        );
        let sign = if super::parity(outcome) == 0 { 1.0 } else { -1.0 };
        Ok((1.0 + sign * self.cos_phase()) / 2f64.powi(self.num_qubits as i32))
    }

    /// Hadamard on every qubit followed by a computational-basis measurement.
    ///
    /// Sampled in two stages: the parity from its Bernoulli law, then a
    /// uniform string of that parity.
    pub fn hadamard_measure_all(&self, rng: &mut RngStream) -> MeasurementRecord {
        let odd = rng.bernoulli(self.prob_odd_parity()) as u8;
        let n = self.num_qubits;
        let mut bits: Vec<u8> = (0..n - 1).map(|_| rng.bit()).collect();
        let partial = super::parity(&bits);
        bits.push(partial ^ odd);
        MeasurementRecord::new(bits)
    }

    /// Hadamard-measure all qubits except two.
    ///
    /// Outcomes are uniform over `{0,1}^(n−2)`; the two unmeasured qubits
    /// (in ascending index order) are left in
    /// `(|00⟩ + e^{iφ}(−1)^{|x|}|11⟩)/√2`.
    pub fn hadamard_measure_subset(
        &self,
        measured: &[usize],
        rng: &mut RngStream,
    ) -> Result<(MeasurementRecord, GhzPhaseState)> {
        let n = self.num_qubits;
        ensure!(
            measured.len() + 2 == n,
            "subset measurement must leave exactly 2 qubits unmeasured (n = {n}, measured {})",
            measured.len()
        );
        let mut seen = vec![false; n];
        for &q in measured {
            self.check_player(q)?;
            ensure!(!seen[q], "qubit {q} listed twice");
            seen[q] = true;
        }
        let record = MeasurementRecord::new(measured.iter().map(|_| rng.bit()).collect());
        let mut residual = GhzPhaseState {
            num_qubits: 2,
            phase_numerator: self.phase_numerator,
            phase_denom_exp: self.phase_denom_exp,
        };
        if record.parity() == 1 {
            residual = residual.apply_phase_flip(0)?;
        }
        Ok((record, residual))
    }

    pub fn to_dense(&self) -> Result<DenseState> {
        self.to_dense_with_limit(DEFAULT_DENSE_LIMIT)
    }

    pub fn to_dense_with_limit(&self, limit: usize) -> Result<DenseState> {
        let n = self.num_qubits;
        ensure!(n <= limit, "{n} qubits exceed the dense limit of {limit}");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        let phi = self.phase_radians();
        amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[(1 << n) - 1] = Complex64::from_polar(FRAC_1_SQRT_2, phi);
        DenseState::from_amplitudes_with_limit(amps, limit)
    }

    /// Recover the phase representation of a dense GHZ-manifold state,
    /// expressed over denominator `2^denom_exp`.
    pub fn from_dense(state: &DenseState, denom_exp: u32) -> Result<Self> {
        const TOL: f64 = 1e-9;
        let n = state.num_qubits();
        ensure!(n >= 2, "GHZ state needs at least 2 qubits, got {n}");
        ensure!(denom_exp <= MAX_DENOM_EXP, "phase denominator exponent too large");
        let amps = state.amplitudes();
        let last = amps.len() - 1;
        let off_manifold = amps[1..last].iter().any(|a| a.norm() > TOL);
        let a0 = amps[0];
        let a1 = amps[last];
        if off_manifold || (a0.norm() - FRAC_1_SQRT_2).abs() > TOL || (a1.norm() - FRAC_1_SQRT_2).abs() > TOL {
            return Err(Error::invalid("state is not on the GHZ phase manifold"));
        }
        let phi = (a1 / a0).arg().rem_euclid(2.0 * PI);
        let scale = (1u64 << denom_exp) as f64;
        let k_float = phi * scale / PI;
        let k = k_float.round();
        ensure!(
            (k_float - k).abs() * PI / scale < TOL,
            "relative phase {phi} is not a multiple of π/2^{denom_exp}"
        );
        Self::with_phase(n, k as u64, denom_exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_ghz_defaults() {
        let s = GhzPhaseState::new(3).unwrap();
        assert_eq!(s.num_qubits(), 3);
        assert_eq!(s.phase_numerator(), 0);
        assert_eq!(s.phase_denom_exp(), 0);
        assert!(GhzPhaseState::new(1).is_err());
    }

    #[test]
    fn ghz3_dense_amplitudes() {
        let d = GhzPhaseState::new(3).unwrap().to_dense().unwrap();
        for (i, a) in d.amplitudes().iter().enumerate() {
            let want = if i == 0 || i == 7 { FRAC_1_SQRT_2 } else { 0.0 };
            assert!((a.re - want).abs() < 1e-15 && a.im.abs() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn phase_flip_is_location_invariant() {
        let s = GhzPhaseState::new(4).unwrap();
        let a = s.apply_phase_flip(0).unwrap();
        let b = s.apply_phase_flip(2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.phase_numerator(), 1);
        assert_eq!(a.cos_phase(), -1.0);
        assert!(a.apply_phase_flip(3).unwrap().is_phase_zero());
        assert!(s.apply_phase_flip(4).is_err());
    }

    #[test]
    fn rz_arithmetic() {
        // -π/2 then three R_z(π/2) lands on π.
        let s = GhzPhaseState::new(3).unwrap().apply_rz(0, -1, 1).unwrap();
        assert_eq!(s.phase_numerator(), 3);
        let mut t = s;
        for p in 0..3 {
            t = t.apply_rz(p, 1, 1).unwrap();
        }
        assert_eq!((t.phase_numerator(), t.phase_denom_exp()), (2, 1));
        assert_eq!(t.cos_phase(), -1.0);

        // R_z(-π/2^j) undone by R_z(π/2^j).
        for j in 0..6 {
            let prepared = GhzPhaseState::new(5).unwrap().apply_rz(1, -1, j).unwrap();
            assert!(prepared.apply_rz(3, 1, j).unwrap().is_phase_zero());
        }

        // R_z(mπ), m odd, acts as a phase flip.
        for m in [1i64, 3, -5, 7] {
            let s = GhzPhaseState::new(3).unwrap().apply_rz(0, m, 0).unwrap();
            assert_eq!(s.cos_phase(), -1.0, "m = {m}");
        }
    }

    #[test]
    fn rescale_preserves_state() {
        let s = GhzPhaseState::with_phase(3, 3, 1).unwrap();
        let r = s.rescaled(4).unwrap();
        assert_eq!(r.phase_numerator(), 24);
        assert!(s.same_state(&r));
        assert!(r.rescaled(2).is_err());
    }

    #[test]
    fn parity_is_deterministic_at_zero_and_pi() {
        let mut rng = RngStream::new(11, 0);
        let zero = GhzPhaseState::new(4).unwrap();
        let pi = zero.apply_phase_flip(1).unwrap();
        for _ in 0..500 {
            assert_eq!(zero.hadamard_measure_all(&mut rng).parity(), 0);
            assert_eq!(pi.hadamard_measure_all(&mut rng).parity(), 1);
        }
    }

    #[test]
    fn quarter_phase_parity_frequency() {
        let mut rng = RngStream::new(5, 1);
        let s = GhzPhaseState::new(4).unwrap().apply_rz(0, 1, 1).unwrap();
        let odd: usize = (0..10_000)
            .map(|_| s.hadamard_measure_all(&mut rng).parity() as usize)
            .sum();
        let f = odd as f64 / 10_000.0;
        assert!((f - 0.5).abs() < 0.02, "frequency {f}");
    }

    #[test]
    fn subset_measurement_residual() {
        let s = GhzPhaseState::new(4).unwrap();
        let mut rng = RngStream::new(3, 0);
        for _ in 0..200 {
            let (rec, residual) = s.hadamard_measure_subset(&[1, 3], &mut rng).unwrap();
            assert_eq!(residual.num_qubits(), 2);
            let want = if rec.parity() == 0 { 0 } else { 1 };
            assert_eq!(residual.phase_numerator(), want);
        }
        assert!(s.hadamard_measure_subset(&[1], &mut rng).is_err());
        assert!(s.hadamard_measure_subset(&[1, 1], &mut rng).is_err());
    }

    #[test]
    fn outcome_probability_matches_formula() {
        let s = GhzPhaseState::new(3).unwrap();
        assert_eq!(s.outcome_probability(&[0, 1, 1]).unwrap(), 0.25);
        assert_eq!(s.outcome_probability(&[1, 1, 1]).unwrap(), 0.0);
        assert!(s.outcome_probability(&[0, 1]).is_err());
    }

    #[test]
    fn from_dense_rejects_off_manifold() {
        let d = DenseState::new(3).unwrap();
        assert!(GhzPhaseState::from_dense(&d, 2).is_err());
    }
}

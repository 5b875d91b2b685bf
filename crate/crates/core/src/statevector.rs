//! Dense statevector emulation.
//!
//! Basis index bit `k` is the occupation of qubit `k + 1`, so the leftmost
//! symbol of a Pauli string acts on the least significant bit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Norm drift tolerated after operations that are unitary by contract.
pub const NORM_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct QubitState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QubitState {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Wraps raw amplitudes without normalizing them.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::InvalidModel(format!(
                "{} amplitudes for {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps and rescales to unit norm.
    pub fn normalized(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::from_amplitudes(n_qubits, amplitudes)?;
        let norm = s.norm();
        if norm == 0.0 {
            return Err(Error::NonFinite("zero vector cannot be normalized"));
        }
        s.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.n_qubits != n {
            return Err(Error::LengthMismatch { left: n, right: self.n_qubits });
        }
        Ok(())
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &QubitState) -> Result<Complex64> {
        self.check(other.n_qubits)?;
        Ok(inner_unchecked(&self.amplitudes, &other.amplitudes))
    }

    pub fn scaled(&self, factor: Complex64) -> QubitState {
        QubitState {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// Multiplies by `e^{i phi}`.
    pub fn with_phase(&self, phi: f64) -> QubitState {
        self.scaled(Complex64::from_polar(1.0, phi))
    }

    /// `self - other` as a raw vector norm, for distance checks.
    pub fn distance(&self, other: &QubitState) -> Result<f64> {
        self.check(other.n_qubits)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<QubitState> {
        self.check(p.len())?;
        let op = MaskedPauli::new(p);
        let mut out = vec![ZERO; self.dim()];
        op.apply_into(&self.amplitudes, &mut out);
        Ok(QubitState { n_qubits: self.n_qubits, amplitudes: out })
    }

    /// `e^{i theta P}|self⟩ = cos(theta)|self⟩ + i sin(theta) P|self⟩`.
    pub fn apply_pauli_exponential(&self, theta: f64, p: &PauliString) -> Result<QubitState> {
        self.check(p.len())?;
        if !theta.is_finite() {
            return Err(Error::NonFinite("rotation angle"));
        }
        let mut out = self.clone();
        MaskedPauli::new(p).rotate_in_place(theta, &mut out.amplitudes);
        Ok(out)
    }

    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        let hs = apply_sum(h, self)?;
        let value = self.inner(&hs)?;
        debug_assert!(value.im.abs() <= 1e-10, "expectation of a Hermitian sum has imaginary part {}", value.im);
        Ok(value.re)
    }

    /// Tensor with `extra` ancilla qubits placed after the register; the
    /// ancilla block is given as its own amplitudes.
    pub fn with_ancilla(&self, ancilla: &QubitState) -> QubitState {
        let mut amplitudes = Vec::with_capacity(self.dim() * ancilla.dim());
        for a in &ancilla.amplitudes {
            amplitudes.extend(self.amplitudes.iter().map(|s| s * a));
        }
        QubitState { n_qubits: self.n_qubits + ancilla.n_qubits, amplitudes }
    }

    /// Stacks `branches` as the components of a single trailing ancilla
    /// register: the result is `Σ_k |k⟩_anc ⊗ |branch_k⟩`, unnormalized.
    pub fn stack_branches(branches: &[QubitState]) -> Result<QubitState> {
        let first = branches.first().ok_or(Error::InvalidModel("no branches".into()))?;
        if !branches.len().is_power_of_two() {
            return Err(Error::InvalidModel("branch count must be a power of two".into()));
        }
        let extra = branches.len().trailing_zeros() as usize;
        let mut amplitudes = Vec::with_capacity(first.dim() * branches.len());
        for b in branches {
            b.check(first.n_qubits)?;
            amplitudes.extend_from_slice(&b.amplitudes);
        }
        Ok(QubitState { n_qubits: first.n_qubits + extra, amplitudes })
    }

    /// Splits off the trailing `extra` qubits, returning the system-register
    /// branches conditioned on each ancilla basis state (unnormalized).
    pub fn branches(&self, extra: usize) -> Vec<QubitState> {
        let n = self.n_qubits - extra;
        self.amplitudes
            .chunks(1 << n)
            .map(|c| QubitState { n_qubits: n, amplitudes: c.to_vec() })
            .collect()
    }
}

pub(crate) fn inner_unchecked(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

/// `H|s⟩` for a Pauli sum.
pub fn apply_sum(h: &PauliSum, s: &QubitState) -> Result<QubitState> {
    s.check(h.n_qubits())?;
    let mut out = vec![ZERO; s.dim()];
    for term in h.terms() {
        MaskedPauli::new(&term.string).accumulate(term.coefficient, &s.amplitudes, &mut out);
    }
    Ok(QubitState { n_qubits: s.n_qubits, amplitudes: out })
}

pub fn apply_pauli(p: &PauliString, s: &QubitState) -> Result<QubitState> {
    s.apply_pauli(p)
}

pub fn apply_pauli_exponential(theta: f64, p: &PauliString, s: &QubitState) -> Result<QubitState> {
    s.apply_pauli_exponential(theta, p)
}

pub fn inner(a: &QubitState, b: &QubitState) -> Result<Complex64> {
    a.inner(b)
}

pub fn expectation(h: &PauliSum, s: &QubitState) -> Result<f64> {
    s.expectation(h)
}

/// Bit-mask form of a Pauli string: `P|b⟩ = i^{n_Y} (-1)^{|b & z|} |b ^ x⟩`.
#[derive(Copy, Clone, Debug)]
pub(crate) struct MaskedPauli {
    x: usize,
    z: usize,
    y_phase: Complex64,
}

impl MaskedPauli {
    pub(crate) fn new(p: &PauliString) -> Self {
        Self { x: p.x_mask(), z: p.z_mask(), y_phase: crate::pauli::Phase::from_exponent(p.y_count() as u32).to_complex() }
    }

    #[inline]
    fn factor(&self, b: usize) -> Complex64 {
        if (b & self.z).count_ones().is_multiple_of(2) {
            self.y_phase
        } else {
            -self.y_phase
        }
    }

    pub(crate) fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        for (b, a) in input.iter().enumerate() {
            out[b ^ self.x] = self.factor(b) * a;
        }
    }

    fn accumulate(&self, c: f64, input: &[Complex64], out: &mut [Complex64]) {
        for (b, a) in input.iter().enumerate() {
            out[b ^ self.x] += self.factor(b) * a * c;
        }
    }

    /// In-place `e^{i theta P}`.
    pub(crate) fn rotate_in_place(&self, theta: f64, amps: &mut [Complex64]) {
        let (s, c) = theta.sin_cos();
        let is = Complex64::new(0.0, s);
        if self.x == 0 {
            // Diagonal: each amplitude picks up e^{i theta f(b)} with f(b) = ±y_phase.
            for (b, a) in amps.iter_mut().enumerate() {
                *a *= c + is * self.factor(b);
            }
            return;
        }
        // Visit each pair once: members differ in the lowest set bit of x.
        let pivot = self.x & self.x.wrapping_neg();
        let flip = if (self.x & self.z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        for block in (0..amps.len()).step_by(2 * pivot) {
            for b in block..block + pivot {
                let partner = b ^ self.x;
                let (lo, hi) = (amps[b], amps[partner]);
                // (P s)[b] = factor(partner) s[partner], factor(b) = ±factor(partner)
                let f = self.factor(partner);
                amps[b] = c * lo + is * f * hi;
                amps[partner] = c * hi + is * f * flip * lo;
            }
        }
    }
}

/// `e^{iθP}` on a fixed register size with the pair phases tabulated.
///
/// Every phase `i·factor(b)` is `±1` or `±i` times one fixed unit, so only
/// the real sign is stored.
#[derive(Clone, Debug)]
pub(crate) struct PauliRotation {
    pauli: MaskedPauli,
    pivot: usize,
    flip: f64,
    imaginary: bool,
    signs: Vec<f64>,
}

impl PauliRotation {
    pub(crate) fn new(p: &PauliString) -> Self {
        let pauli = MaskedPauli::new(p);
        let dim = 1usize << p.len();
        let unit = Complex64::new(0.0, 1.0) * pauli.y_phase;
        let imaginary = unit.re == 0.0;
        let sign = |b: usize| {
            let f = Complex64::new(0.0, 1.0) * pauli.factor(b);
            if imaginary { f.im } else { f.re }
        };
        if pauli.x == 0 {
            return Self { pauli, pivot: 0, flip: 1.0, imaginary, signs: (0..dim).map(sign).collect() };
        }
        let pivot = pauli.x & pauli.x.wrapping_neg();
        let flip = if (pauli.x & pauli.z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut signs = Vec::with_capacity(dim / 2);
        for block in (0..dim).step_by(2 * pivot) {
            for b in block..block + pivot {
                signs.push(sign(b ^ pauli.x));
            }
        }
        Self { pauli, pivot, flip, imaginary, signs }
    }

    pub(crate) fn pauli(&self) -> &MaskedPauli {
        &self.pauli
    }

    #[inline(always)]
    fn times_unit(&self, v: Complex64) -> Complex64 {
        if self.imaginary {
            Complex64::new(-v.im, v.re)
        } else {
            v
        }
    }

    pub(crate) fn rotate(&self, theta: f64, amps: &mut [Complex64]) {
        let (s, c) = theta.sin_cos();
        if self.pivot == 0 {
            for (a, &sign) in amps.iter_mut().zip(&self.signs) {
                *a = c * *a + self.times_unit(*a) * (s * sign);
            }
            return;
        }
        let x = self.pauli.x;
        let sf = s * self.flip;
        let mut k = 0;
        for block in (0..amps.len()).step_by(2 * self.pivot) {
            for b in block..block + self.pivot {
                let partner = b ^ x;
                let (lo, hi) = (amps[b], amps[partner]);
                let sign = self.signs[k];
                amps[b] = c * lo + self.times_unit(hi) * (s * sign);
                amps[partner] = c * hi + self.times_unit(lo) * (sf * sign);
                k += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn close(a: &QubitState, b: &QubitState, tol: f64) -> bool {
        a.distance(b).unwrap() <= tol
    }

    #[test]
    fn bit_flip_and_phase() {
        let one = QubitState::basis(1, 1);
        assert_eq!(QubitState::zero(1).apply_pauli(&ps("X")).unwrap(), one);
        assert_eq!(one.apply_pauli(&ps("Z")).unwrap(), one.scaled(Complex64::new(-1.0, 0.0)));
        assert_eq!(QubitState::zero(1).apply_pauli(&ps("Y")).unwrap(), one.scaled(Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn leftmost_symbol_acts_on_lowest_bit() {
        let s = QubitState::zero(3).apply_pauli(&ps("XII")).unwrap();
        assert_eq!(s, QubitState::basis(3, 1));
    }

    #[test]
    fn exponential_special_angles() {
        let s = QubitState::normalized(2, vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.7, 0.0),
            Complex64::new(0.1, -0.4),
        ])
        .unwrap();
        for p in ["XY", "ZZ", "IZ", "YI"] {
            let p = ps(p);
            assert!(close(&s.apply_pauli_exponential(0.0, &p).unwrap(), &s, 1e-15));
            let quarter = s.apply_pauli_exponential(std::f64::consts::FRAC_PI_2, &p).unwrap();
            let ip = s.apply_pauli(&p).unwrap().scaled(Complex64::new(0.0, 1.0));
            assert!(close(&quarter, &ip, 1e-15));
        }
    }

    #[test]
    fn exponential_rejects_bad_input() {
        let s = QubitState::zero(2);
        assert!(matches!(s.apply_pauli_exponential(f64::NAN, &ps("XX")), Err(Error::NonFinite(_))));
        assert!(matches!(s.apply_pauli_exponential(0.1, &ps("XXX")), Err(Error::LengthMismatch { .. })));
        assert!(s.apply_pauli(&ps("X")).is_err());
    }

    #[test]
    fn expectation_of_identity_is_coefficient() {
        let h = PauliSum::from_terms(2, [crate::pauli::PauliTerm::new(-1.25, ps("II"))]).unwrap();
        let s = QubitState::normalized(2, vec![Complex64::new(1.0, 1.0); 4]).unwrap();
        assert!((s.expectation(&h).unwrap() + 1.25).abs() < 1e-15);
        assert!((s.inner(&s).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn branches_round_trip() {
        let a = QubitState::basis(2, 1);
        let b = QubitState::basis(2, 2);
        let stacked = QubitState::stack_branches(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(stacked.n_qubits(), 3);
        assert_eq!(stacked.branches(1), vec![a.clone(), b]);
        // Ancilla as qubit 3: XII... acting on system leaves branches aligned.
        let flipped = stacked.apply_pauli(&ps("XII")).unwrap();
        assert_eq!(flipped.branches(1)[0], a.apply_pauli(&ps("XI")).unwrap());
    }

    #[test]
    fn tabulated_rotation_matches_definition() {
        let s = QubitState::normalized(3, (0..8).map(|k| Complex64::new((k as f64).sin(), 0.3 * k as f64 - 1.0)).collect())
            .unwrap();
        for p in ["XYZ", "ZZI", "IYI", "YYY", "ZIZ", "XIX", "IIY"] {
            let p = ps(p);
            let theta: f64 = 0.37;
            let expected: Vec<Complex64> = s
                .amplitudes()
                .iter()
                .zip(s.apply_pauli(&p).unwrap().amplitudes())
                .map(|(a, b)| a * theta.cos() + Complex64::new(0.0, theta.sin()) * b)
                .collect();
            let mut amps = s.amplitudes().to_vec();
            PauliRotation::new(&p).rotate(theta, &mut amps);
            let err = amps.iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-15, "{p}: {err}");
            assert!(close(&s.apply_pauli_exponential(theta, &p).unwrap(), &QubitState::from_amplitudes(3, expected).unwrap(), 1e-15));
        }
    }
}

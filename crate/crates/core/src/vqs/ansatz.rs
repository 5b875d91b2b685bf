use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};
use crate::statevector::{PauliRotation, QubitState};

use num_complex::Complex64;

/// Sign of the generator in each layer factor.
///
/// `MinusI` applies `e^{−iθP}`, so `θ_m = c_m t / n_d` reproduces the
/// product-formula propagator and short-time parameters grow as `+c_m t`.
/// `PlusI` applies `e^{+iθP}`; the same dynamics then drive `θ_m ≈ −c_m t`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentConvention {
    #[default]
    MinusI,
    PlusI,
}

impl ExponentConvention {
    pub fn sign(self) -> f64 {
        match self {
            ExponentConvention::MinusI => -1.0,
            ExponentConvention::PlusI => 1.0,
        }
    }
}

/// Layered product of single-Pauli exponentials: layers `d = 1…n_d`, each
/// applying every generator in declared order with its own angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VhaAnsatz {
    generators: Vec<PauliTerm>,
    depth: usize,
    n_qubits: usize,
    convention: ExponentConvention,
}

impl VhaAnsatz {
    pub fn new(generators: Vec<PauliTerm>, depth: usize, n_qubits: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidModel("ansatz depth must be positive".into()));
        }
        if generators.is_empty() {
            return Err(Error::InvalidModel("ansatz needs at least one generator".into()));
        }
        for g in &generators {
            if g.string.len() != n_qubits {
                return Err(Error::LengthMismatch { left: n_qubits, right: g.string.len() });
            }
            if g.string.is_identity() {
                return Err(Error::InvalidModel("identity cannot be an ansatz generator".into()));
            }
        }
        Ok(Self { generators, depth, n_qubits, convention: ExponentConvention::default() })
    }

    /// Generators are the non-identity terms of `h`, in order.
    pub fn from_hamiltonian(h: &PauliSum, depth: usize) -> Result<Self> {
        Self::new(h.non_identity_terms().cloned().collect(), depth, h.n_qubits())
    }

    pub fn with_convention(mut self, convention: ExponentConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Same ansatz acting on the first qubits of a register enlarged by
    /// `extra` untouched qubits.
    pub fn extended(&self, extra: usize) -> Self {
        Self {
            generators: self
                .generators
                .iter()
                .map(|g| PauliTerm::new(g.coefficient, g.string.extended(extra)))
                .collect(),
            depth: self.depth,
            n_qubits: self.n_qubits + extra,
            convention: self.convention,
        }
    }

    pub fn generators(&self) -> &[PauliTerm] {
        &self.generators
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn convention(&self) -> ExponentConvention {
        self.convention
    }

    pub fn n_parameters(&self) -> usize {
        self.depth * self.generators.len()
    }

    /// Flat parameter index of generator `m` in layer `d` (both 0-based).
    pub fn index(&self, d: usize, m: usize) -> Result<usize> {
        if d >= self.depth || m >= self.generators.len() {
            return Err(Error::IndexOutOfRange(format!(
                "(layer {d}, generator {m}) outside {}x{}",
                self.depth,
                self.generators.len()
            )));
        }
        Ok(d * self.generators.len() + m)
    }

    /// Angles that turn the ansatz into the first-order product formula for
    /// `e^{−iHt}` (under the `MinusI` convention).
    pub fn product_formula_parameters(&self, t: f64) -> Vec<f64> {
        let layer: Vec<f64> = self.generators.iter().map(|g| g.coefficient * t / self.depth as f64).collect();
        layer.repeat(self.depth)
    }

    pub(crate) fn check_parameters(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_parameters() {
            return Err(Error::ParameterCount { expected: self.n_parameters(), got: theta.len() });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("ansatz parameters"));
        }
        Ok(())
    }

    fn check_state(&self, s: &QubitState) -> Result<()> {
        if s.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch { left: self.n_qubits, right: s.n_qubits() });
        }
        Ok(())
    }

    pub(crate) fn compiled(&self) -> Compiled {
        Compiled {
            gates: self.generators.iter().map(|g| PauliRotation::new(&g.string)).collect(),
            sign: self.convention.sign(),
        }
    }

    pub fn apply(&self, theta: &[f64], s: &QubitState) -> Result<QubitState> {
        self.check_parameters(theta)?;
        self.check_state(s)?;
        let c = self.compiled();
        let mut amps = s.amplitudes().to_vec();
        for (k, &angle) in theta.iter().enumerate() {
            c.rotate(k, angle, &mut amps);
        }
        QubitState::from_amplitudes(self.n_qubits, amps)
    }

    /// Exact derivative `∂φ/∂θ_{d,m}` of `U(θ)|s0⟩` (not normalized).
    pub fn tangent_state(&self, theta: &[f64], d: usize, m: usize, s0: &QubitState) -> Result<QubitState> {
        self.check_parameters(theta)?;
        self.check_state(s0)?;
        let target = self.index(d, m)?;
        let c = self.compiled();
        let mut amps = s0.amplitudes().to_vec();
        for (k, &angle) in theta.iter().enumerate().take(target + 1) {
            c.rotate(k, angle, &mut amps);
        }
        let mut amps = c.derivative_factor(target, &amps);
        for (k, &angle) in theta.iter().enumerate().skip(target + 1) {
            c.rotate(k, angle, &mut amps);
        }
        QubitState::from_amplitudes(self.n_qubits, amps)
    }

    /// `U(θ)|s0⟩` together with every tangent vector, in flat parameter order.
    pub fn state_and_tangents(&self, theta: &[f64], s0: &QubitState) -> Result<(QubitState, Vec<QubitState>)> {
        self.check_parameters(theta)?;
        self.check_state(s0)?;
        let c = self.compiled();
        let p = theta.len();
        let mut prefixes = Vec::with_capacity(p);
        let mut amps = s0.amplitudes().to_vec();
        for (k, &angle) in theta.iter().enumerate() {
            c.rotate(k, angle, &mut amps);
            prefixes.push(amps.clone());
        }
        let phi = QubitState::from_amplitudes(self.n_qubits, amps)?;
        let mut tangents = Vec::with_capacity(p);
        for (k, prefix) in prefixes.iter().enumerate() {
            let mut v = c.derivative_factor(k, prefix);
            for (j, &angle) in theta.iter().enumerate().skip(k + 1) {
                c.rotate(j, angle, &mut v);
            }
            tangents.push(QubitState::from_amplitudes(self.n_qubits, v)?);
        }
        Ok((phi, tangents))
    }
}

pub(crate) struct Compiled {
    gates: Vec<PauliRotation>,
    sign: f64,
}

impl Compiled {
    fn gate(&self, k: usize) -> &PauliRotation {
        &self.gates[k % self.gates.len()]
    }

    fn rotate(&self, k: usize, angle: f64, amps: &mut [Complex64]) {
        self.gate(k).rotate(self.sign * angle, amps);
    }

    /// `±i P_k |v⟩`; the generator commutes with its own exponential so the
    /// factor can sit on either side of the gate.
    fn derivative_factor(&self, k: usize, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        self.gate(k).pauli().apply_into(v, &mut out);
        let f = Complex64::new(0.0, self.sign);
        out.iter_mut().for_each(|a| *a *= f);
        out
    }
}

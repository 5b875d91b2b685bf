use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ansatz::VhaAnsatz;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::statevector::{apply_sum, inner_unchecked, QubitState};

pub const DEFAULT_REGULARIZATION: f64 = 1e-8;

/// Eigenvalues below `rcond·σ_max` of the regularized matrix are dropped.
pub const DEFAULT_RCOND: f64 = 1e-8;

/// McLachlan equations `Σ_j M_ij θ̇_j = V_i` at one point of parameter space.
#[derive(Clone, Debug, PartialEq)]
pub struct VqsLinearSystem {
    pub m: DMatrix<f64>,
    pub v: DVector<f64>,
    pub regularization: f64,
    /// `Im⟨∂_iφ|φ⟩`; the overlaps themselves are purely imaginary.
    pub overlaps: Vec<f64>,
    /// `⟨φ|H|φ⟩`.
    pub energy: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub regularization: f64,
    pub rcond: f64,
    /// Abort when `‖Mθ̇ − V‖` exceeds this.
    pub residual_abort: Option<f64>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { regularization: DEFAULT_REGULARIZATION, rcond: DEFAULT_RCOND, residual_abort: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Velocities {
    pub theta_dot: Vec<f64>,
    pub residual: f64,
}

fn check_h(ansatz: &VhaAnsatz, s0: &QubitState, h: &PauliSum) -> Result<()> {
    if h.n_qubits() != ansatz.n_qubits() {
        return Err(Error::LengthMismatch { left: ansatz.n_qubits(), right: h.n_qubits() });
    }
    if s0.n_qubits() != ansatz.n_qubits() {
        return Err(Error::LengthMismatch { left: ansatz.n_qubits(), right: s0.n_qubits() });
    }
    Ok(())
}

/// Builds `M_ij = Re⟨∂_iφ|∂_jφ⟩ + ⟨∂_iφ|φ⟩⟨∂_jφ|φ⟩` and
/// `V_i = Im⟨∂_iφ|H|φ⟩ + i⟨∂_iφ|φ⟩⟨H⟩` from the raw tangent vectors.
pub fn assemble_system(ansatz: &VhaAnsatz, theta: &[f64], s0: &QubitState, h: &PauliSum) -> Result<VqsLinearSystem> {
    check_h(ansatz, s0, h)?;
    let (phi, tangents) = ansatz.state_and_tangents(theta, s0)?;
    let h_phi = apply_sum(h, &phi)?;
    let energy = inner_unchecked(phi.amplitudes(), h_phi.amplitudes()).re;
    let p = tangents.len();
    let overlaps: Vec<Complex64> = tangents.iter().map(|t| inner_unchecked(t.amplitudes(), phi.amplitudes())).collect();
    let mut m = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let raw = inner_unchecked(tangents[i].amplitudes(), tangents[j].amplitudes());
            let value = raw.re + (overlaps[i] * overlaps[j]).re;
            m[(i, j)] = value;
            m[(j, i)] = value;
        }
    }
    let v = DVector::from_iterator(
        p,
        tangents.iter().zip(&overlaps).map(|(t, &o)| {
            let raw = inner_unchecked(t.amplitudes(), h_phi.amplitudes()).im;
            raw + (Complex64::i() * o * energy).re
        }),
    );
    let system = VqsLinearSystem {
        m,
        v,
        regularization: DEFAULT_REGULARIZATION,
        overlaps: overlaps.iter().map(|o| o.im).collect(),
        energy,
    };
    if system.m.iter().chain(system.v.iter()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("McLachlan system"));
    }
    Ok(system)
}

/// Same system via the projected tangents `T_i = ∂_iφ − ⟨φ|∂_iφ⟩φ`:
/// `M_ij = Re⟨T_i|T_j⟩`, `V_i = Im⟨T_i|H|φ⟩`.
pub fn assemble_geometric(ansatz: &VhaAnsatz, theta: &[f64], s0: &QubitState, h: &PauliSum) -> Result<VqsLinearSystem> {
    check_h(ansatz, s0, h)?;
    let (phi, tangents) = ansatz.state_and_tangents(theta, s0)?;
    let h_phi = apply_sum(h, &phi)?;
    let energy = inner_unchecked(phi.amplitudes(), h_phi.amplitudes()).re;
    let projected = projected_tangents(&phi, &tangents);
    let p = projected.len();
    let m = DMatrix::from_fn(p, p, |i, j| inner_unchecked(projected[i].amplitudes(), projected[j].amplitudes()).re);
    let v = DVector::from_iterator(p, projected.iter().map(|t| inner_unchecked(t.amplitudes(), h_phi.amplitudes()).im));
    let overlaps = tangents.iter().map(|t| inner_unchecked(t.amplitudes(), phi.amplitudes()).im).collect();
    Ok(VqsLinearSystem { m, v, regularization: DEFAULT_REGULARIZATION, overlaps, energy })
}

/// `T_i = ∂_iφ − ⟨φ|∂_iφ⟩φ`, orthogonal to `φ`.
pub fn projected_tangents(phi: &QubitState, tangents: &[QubitState]) -> Vec<QubitState> {
    tangents
        .iter()
        .map(|t| {
            let o = inner_unchecked(phi.amplitudes(), t.amplitudes());
            let amps = t.amplitudes().iter().zip(phi.amplitudes()).map(|(&a, &b)| a - o * b).collect();
            QubitState::from_amplitudes(phi.n_qubits(), amps).expect("same register")
        })
        .collect()
}

impl VqsLinearSystem {
    pub fn with_regularization(mut self, lambda: f64) -> Self {
        self.regularization = lambda;
        self
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Largest asymmetry `|M_ij − M_ji|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.m - self.m.transpose()).amax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.m.clone().symmetric_eigen().eigenvalues.min()
    }

    /// `θ̇0 = Σ_i Im⟨∂_iφ|φ⟩ θ̇_i − ⟨H⟩`.
    pub fn phase_rate(&self, theta_dot: &[f64]) -> f64 {
        self.overlaps.iter().zip(theta_dot).map(|(a, b)| a * b).sum::<f64>() - self.energy
    }
}

/// Least-squares solution of `(M + λI)θ̇ = V` with a truncated pseudo-inverse.
pub fn solve_velocities(sys: &VqsLinearSystem) -> Result<Velocities> {
    solve_with(sys, sys.regularization, DEFAULT_RCOND)
}

pub fn solve_with(sys: &VqsLinearSystem, regularization: f64, rcond: f64) -> Result<Velocities> {
    if sys.m.iter().chain(sys.v.iter()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("McLachlan system"));
    }
    let p = sys.len();
    if p == 0 {
        return Ok(Velocities { theta_dot: vec![], residual: 0.0 });
    }
    // M is symmetric, so its eigenbasis gives the pseudo-inverse directly.
    let eig = sys.m.clone().symmetric_eigen();
    let shifted: Vec<f64> = eig.eigenvalues.iter().map(|e| e + regularization).collect();
    let cutoff = rcond * shifted.iter().copied().fold(0.0, f64::max);
    let projections = eig.eigenvectors.transpose() * &sys.v;
    let mut x = DVector::zeros(p);
    for (k, &sigma) in shifted.iter().enumerate() {
        if sigma > cutoff && sigma > 0.0 {
            x += eig.eigenvectors.column(k) * (projections[k] / sigma);
        }
    }
    if x.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("parameter velocities"));
    }
    let residual = (&sys.m * &x - &sys.v).norm();
    Ok(Velocities { theta_dot: x.iter().copied().collect(), residual })
}

/// `θ̇0` evaluated from freshly computed tangents.
pub fn global_phase_rate(
    ansatz: &VhaAnsatz,
    theta: &[f64],
    theta_dot: &[f64],
    s0: &QubitState,
    h: &PauliSum,
) -> Result<f64> {
    check_h(ansatz, s0, h)?;
    if theta_dot.len() != ansatz.n_parameters() {
        return Err(Error::ParameterCount { expected: ansatz.n_parameters(), got: theta_dot.len() });
    }
    let (phi, tangents) = ansatz.state_and_tangents(theta, s0)?;
    let energy = phi.expectation(h)?;
    let drift: f64 = tangents
        .iter()
        .zip(theta_dot)
        .map(|(t, &rate)| inner_unchecked(t.amplitudes(), phi.amplitudes()).im * rate)
        .sum();
    Ok(drift - energy)
}

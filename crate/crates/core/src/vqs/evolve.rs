use serde::{Deserialize, Serialize};

use super::ansatz::VhaAnsatz;
use super::system::{assemble_system, solve_with, SolverSettings};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::pauli::PauliSum;
use crate::statevector::{MaskedPauli, QubitState};

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    #[default]
    Rk4,
    Euler,
}

impl std::str::FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rk4" => Ok(Integrator::Rk4),
            "euler" => Ok(Integrator::Euler),
            other => Err(Error::InvalidModel(format!("unknown integrator '{other}'"))),
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub integrator: Integrator,
    pub solver: SolverSettings,
}

/// Parameters and global phase on a uniform grid; the state at sample `k` is
/// `e^{iθ0_k} U(θ_k)|s0⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct VqsTrajectory {
    pub ansatz: VhaAnsatz,
    pub initial_state: QubitState,
    pub grid: TimeGrid,
    pub theta: Vec<Vec<f64>>,
    pub theta0: Vec<f64>,
    /// Largest linear-solve residual met during integration.
    pub max_residual: f64,
}

impl VqsTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// `U(θ_k)|s0⟩` without the global phase.
    pub fn variational_state(&self, k: usize) -> Result<QubitState> {
        let theta = self
            .theta
            .get(k)
            .ok_or_else(|| Error::IndexOutOfRange(format!("sample {k} of {}", self.theta.len())))?;
        self.ansatz.apply(theta, &self.initial_state)
    }

    pub fn state(&self, k: usize) -> Result<QubitState> {
        Ok(self.variational_state(k)?.with_phase(self.theta0[k]))
    }
}

struct Rates {
    theta_dot: Vec<f64>,
    phase_dot: f64,
    residual: f64,
}

fn rates(ansatz: &VhaAnsatz, theta: &[f64], s0: &QubitState, h: &PauliSum, solver: &SolverSettings) -> Result<Rates> {
    let sys = assemble_system(ansatz, theta, s0, h)?;
    let v = solve_with(&sys, solver.regularization, solver.rcond)?;
    if let Some(threshold) = solver.residual_abort {
        if v.residual > threshold {
            return Err(Error::ResidualTooLarge { residual: v.residual, threshold });
        }
    }
    let phase_dot = sys.phase_rate(&v.theta_dot);
    Ok(Rates { theta_dot: v.theta_dot, phase_dot, residual: v.residual })
}

fn shifted(theta: &[f64], rate: &[f64], h: f64) -> Vec<f64> {
    theta.iter().zip(rate).map(|(t, r)| t + h * r).collect()
}

pub fn evolve(
    ansatz: &VhaAnsatz,
    s0: &QubitState,
    h: &PauliSum,
    t_max: f64,
    dt: f64,
    integrator: Integrator,
) -> Result<VqsTrajectory> {
    let grid = TimeGrid::new(t_max, dt)?;
    evolve_with(ansatz, s0, h, grid, &EvolveOptions { integrator, ..Default::default() })
}

/// Integrates the McLachlan flow from `θ = 0`, `θ0 = 0`.
pub fn evolve_with(
    ansatz: &VhaAnsatz,
    s0: &QubitState,
    h: &PauliSum,
    grid: TimeGrid,
    options: &EvolveOptions,
) -> Result<VqsTrajectory> {
    if h.n_qubits() != ansatz.n_qubits() || s0.n_qubits() != ansatz.n_qubits() {
        return Err(Error::LengthMismatch { left: ansatz.n_qubits(), right: s0.n_qubits().max(h.n_qubits()) });
    }
    let dt = grid.dt();
    let mut theta = vec![0.0; ansatz.n_parameters()];
    let mut phase = 0.0;
    let mut thetas = Vec::with_capacity(grid.len());
    let mut phases = Vec::with_capacity(grid.len());
    let mut max_residual: f64 = 0.0;
    thetas.push(theta.clone());
    phases.push(phase);
    let solver = &options.solver;
    for _ in 0..grid.steps() {
        let k1 = rates(ansatz, &theta, s0, h, solver)?;
        max_residual = max_residual.max(k1.residual);
        match options.integrator {
            Integrator::Euler => {
                theta = shifted(&theta, &k1.theta_dot, dt);
                phase += dt * k1.phase_dot;
            }
            Integrator::Rk4 => {
                let k2 = rates(ansatz, &shifted(&theta, &k1.theta_dot, dt / 2.0), s0, h, solver)?;
                let k3 = rates(ansatz, &shifted(&theta, &k2.theta_dot, dt / 2.0), s0, h, solver)?;
                let k4 = rates(ansatz, &shifted(&theta, &k3.theta_dot, dt), s0, h, solver)?;
                for k in [&k2, &k3, &k4] {
                    max_residual = max_residual.max(k.residual);
                }
                for (i, t) in theta.iter_mut().enumerate() {
                    *t += dt / 6.0
                        * (k1.theta_dot[i] + 2.0 * k2.theta_dot[i] + 2.0 * k3.theta_dot[i] + k4.theta_dot[i]);
                }
                phase += dt / 6.0 * (k1.phase_dot + 2.0 * k2.phase_dot + 2.0 * k3.phase_dot + k4.phase_dot);
            }
        }
        if theta.iter().any(|t| !t.is_finite()) || !phase.is_finite() {
            return Err(Error::NonFinite("trajectory"));
        }
        thetas.push(theta.clone());
        phases.push(phase);
    }
    Ok(VqsTrajectory {
        ansatz: ansatz.clone(),
        initial_state: s0.clone(),
        grid,
        theta: thetas,
        theta0: phases,
        max_residual,
    })
}

/// `(Π_m e^{−i c_m P_m t/n})^n |s⟩` in declared term order; the identity
/// term contributes its global phase.
pub fn trotter_propagate(h: &PauliSum, t: f64, n_steps: usize, s: &QubitState) -> Result<QubitState> {
    if n_steps == 0 {
        return Err(Error::InvalidGrid("product formula needs at least one step".into()));
    }
    if h.n_qubits() != s.n_qubits() {
        return Err(Error::LengthMismatch { left: h.n_qubits(), right: s.n_qubits() });
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let gates: Vec<(f64, MaskedPauli)> =
        h.non_identity_terms().map(|term| (term.coefficient, MaskedPauli::new(&term.string))).collect();
    let step = t / n_steps as f64;
    let mut amps = s.amplitudes().to_vec();
    for _ in 0..n_steps {
        for (c, gate) in &gates {
            gate.rotate_in_place(-c * step, &mut amps);
        }
    }
    Ok(QubitState::from_amplitudes(s.n_qubits(), amps)?.with_phase(-h.identity_coefficient() * t))
}

//! Lesser, greater and retarded Green's functions from evolved states.
//!
//! With `c_l = Σ_i λ_i P_i` and `c_m† = Σ_j μ_j P_j`, every component is a
//! combination of brakets `B_ij(t) = ⟨ψ|P_i e^{−iHt} P_j|ψ⟩`:
//!
//! * `G^<(t) = −i e^{iE0 t} Σ λ_i μ_j B_ij(t)`
//! * `G^>(t) = +i e^{−iE0 t} Σ λ_i μ_j conj(B_ij(t))`
//! * `G^R(t) = (G^< − G^>) θ(t)`

use std::fmt;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ComplexMatrix, SpectralDecomposition};
use crate::grid::TimeGrid;
use crate::hubbard::{LadderKind, LadderOperatorExpansion};
use crate::pauli::{PauliString, PauliSum};
use crate::statevector::{inner_unchecked, QubitState};
use crate::vqs::{evolve_with, EvolveOptions, VhaAnsatz, VqsTrajectory};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreensKind {
    Lesser,
    Greater,
    Retarded,
}

impl GreensKind {
    pub fn name(self) -> &'static str {
        match self {
            GreensKind::Lesser => "lesser",
            GreensKind::Greater => "greater",
            GreensKind::Retarded => "retarded",
        }
    }
}

impl fmt::Display for GreensKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Exact,
    Os,
    Cf,
    Trotter,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::Os => "os",
            Algorithm::Cf => "cf",
            Algorithm::Trotter => "trotter",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Algorithm::Exact),
            "os" => Ok(Algorithm::Os),
            "cf" => Ok(Algorithm::Cf),
            "trotter" => Ok(Algorithm::Trotter),
            other => Err(Error::InvalidModel(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// One Green's-function component sampled on a uniform grid `t ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreensSeries {
    pub label: String,
    pub kind: GreensKind,
    pub algorithm: Algorithm,
    pub shots: Option<u64>,
    grid: TimeGrid,
    values: Vec<Complex64>,
}

impl GreensSeries {
    pub fn new(
        label: impl Into<String>,
        kind: GreensKind,
        algorithm: Algorithm,
        grid: &TimeGrid,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} values for {} grid points", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("Green's function values"));
        }
        Ok(Self { label: label.into(), kind, algorithm, shots: None, grid: *grid, values })
    }

    pub fn with_shots(mut self, shots: Option<u64>) -> Self {
        self.shots = shots;
        self
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_compatible(&self, other: &GreensSeries) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::SeriesMismatch(format!(
                "grids differ: dt {} x {} vs dt {} x {}",
                self.grid.dt(),
                self.grid.steps(),
                other.grid.dt(),
                other.grid.steps()
            )));
        }
        Ok(())
    }
}

/// `G^R(t) = [G^<(t) − G^>(t)]θ(t)` with `θ(0) = 1`.
pub fn retarded(lesser: &GreensSeries, greater: &GreensSeries) -> Result<GreensSeries> {
    lesser.check_compatible(greater)?;
    if lesser.label != greater.label {
        return Err(Error::SeriesMismatch(format!("labels '{}' and '{}'", lesser.label, greater.label)));
    }
    if lesser.kind != GreensKind::Lesser || greater.kind != GreensKind::Greater {
        return Err(Error::SeriesMismatch(format!("expected lesser and greater, got {} and {}", lesser.kind, greater.kind)));
    }
    // Every grid point has t ≥ 0, so the step function is 1 throughout.
    let values = lesser.values.iter().zip(&greater.values).map(|(l, g)| l - g).collect();
    let shots = lesser.shots.or(greater.shots);
    Ok(GreensSeries::new(lesser.label.clone(), GreensKind::Retarded, lesser.algorithm, &lesser.grid, values)?
        .with_shots(shots))
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesComparison {
    pub max_abs: f64,
    pub rms: f64,
}

/// Pointwise difference between two series on the same grid.
pub fn compare_series(a: &GreensSeries, b: &GreensSeries) -> Result<SeriesComparison> {
    a.check_compatible(b)?;
    let diffs: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).collect();
    let max_abs = diffs.iter().copied().fold(0.0, f64::max);
    let rms = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
    Ok(SeriesComparison { max_abs, rms })
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BraketMode {
    #[default]
    Exact,
    /// Shots per quadrature.
    Shots(u64),
}

impl BraketMode {
    pub fn shots(self) -> Option<u64> {
        match self {
            BraketMode::Exact => None,
            BraketMode::Shots(n) => Some(n),
        }
    }
}

/// A factor of an operator chain, listed in the order it acts on the ket.
#[derive(Clone, Debug)]
pub enum ChainOp {
    Pauli(PauliString),
    Ansatz { ansatz: VhaAnsatz, theta: Vec<f64> },
    Dense(ComplexMatrix),
}

#[derive(Clone, Debug, Default)]
pub struct OperatorChain {
    ops: Vec<ChainOp>,
}

/// Deviation from unitarity tolerated for dense chain factors.
const UNITARITY_TOLERANCE: f64 = 1e-9;

impl OperatorChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn then(mut self, op: ChainOp) -> Self {
        self.ops.push(op);
        self
    }

    pub fn then_pauli(self, p: PauliString) -> Self {
        self.then(ChainOp::Pauli(p))
    }

    pub fn apply(&self, s: &QubitState) -> Result<QubitState> {
        let mut out = s.clone();
        for op in &self.ops {
            out = match op {
                ChainOp::Pauli(p) => out.apply_pauli(p)?,
                ChainOp::Ansatz { ansatz, theta } => ansatz.apply(theta, &out)?,
                ChainOp::Dense(m) => {
                    let defect = (m.adjoint() * m - ComplexMatrix::identity(m.nrows(), m.ncols())).camax();
                    if defect > UNITARITY_TOLERANCE {
                        return Err(Error::NonUnitary(defect));
                    }
                    crate::exact::apply_dense(m, &out)?
                }
            };
        }
        Ok(out)
    }
}

/// `⟨a|chain|a⟩`, either directly or as the estimate from a Hadamard test
/// with `N` shots on each quadrature.
pub fn hadamard_braket<R: Rng + ?Sized>(
    a: &QubitState,
    chain: &OperatorChain,
    mode: BraketMode,
    rng: &mut R,
) -> Result<Complex64> {
    let value = a.inner(&chain.apply(a)?)?;
    sample_braket(value, mode, rng)
}

/// Draws the ancilla statistics of a Hadamard test whose exact braket is
/// `value`: `P(0) = (1 + Re)/2` for the real part and `(1 + Im)/2` for the
/// imaginary one. Returns `2k/N − 1` per quadrature.
pub fn sample_braket<R: Rng + ?Sized>(value: Complex64, mode: BraketMode, rng: &mut R) -> Result<Complex64> {
    match mode {
        BraketMode::Exact => Ok(value),
        BraketMode::Shots(0) => Err(Error::ZeroShots),
        BraketMode::Shots(n) => Ok(Complex64::new(sample_quadrature(value.re, n, rng)?, sample_quadrature(value.im, n, rng)?)),
    }
}

fn sample_quadrature<R: Rng + ?Sized>(x: f64, n: u64, rng: &mut R) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("braket"));
    }
    let p = ((1.0 + x) / 2.0).clamp(0.0, 1.0);
    let k = Binomial::new(n, p).map_err(|_| Error::NonFinite("shot probability"))?.sample(rng);
    Ok(2.0 * k as f64 / n as f64 - 1.0)
}

/// `e^{iφ}|state⟩`, one sample of an evolved ket.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolvedState {
    pub phase: f64,
    pub state: QubitState,
}

impl EvolvedState {
    pub fn full(&self) -> QubitState {
        self.state.with_phase(self.phase)
    }
}

/// Approximates `e^{−iHt_k} right|s0⟩` on every grid point.
pub trait Propagator {
    fn algorithm(&self) -> Algorithm;

    fn propagate(&self, right: &PauliString, s0: &QubitState, grid: &TimeGrid) -> Result<Vec<EvolvedState>>;
}

pub struct ExactPropagator<'a> {
    pub decomposition: &'a SpectralDecomposition,
}

impl Propagator for ExactPropagator<'_> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Exact
    }

    fn propagate(&self, right: &PauliString, s0: &QubitState, grid: &TimeGrid) -> Result<Vec<EvolvedState>> {
        let start = s0.apply_pauli(right)?;
        grid.times()
            .into_iter()
            .map(|t| Ok(EvolvedState { phase: 0.0, state: self.decomposition.propagate(t, &start)? }))
            .collect()
    }
}

/// One McLachlan trajectory per right-hand string; each carries its own
/// global phase.
pub struct VqsPropagator<'a> {
    pub hamiltonian: &'a PauliSum,
    pub ansatz: &'a VhaAnsatz,
    pub options: EvolveOptions,
}

impl VqsPropagator<'_> {
    pub fn trajectory(&self, right: &PauliString, s0: &QubitState, grid: &TimeGrid) -> Result<VqsTrajectory> {
        evolve_with(self.ansatz, &s0.apply_pauli(right)?, self.hamiltonian, *grid, &self.options)
    }
}

impl Propagator for VqsPropagator<'_> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Os
    }

    fn propagate(&self, right: &PauliString, s0: &QubitState, grid: &TimeGrid) -> Result<Vec<EvolvedState>> {
        let traj = self.trajectory(right, s0, grid)?;
        (0..traj.len())
            .map(|k| Ok(EvolvedState { phase: traj.theta0[k], state: traj.variational_state(k)? }))
            .collect()
    }
}

/// First-order product formula with `substeps` slices per grid step.
pub struct TrotterPropagator<'a> {
    pub hamiltonian: &'a PauliSum,
    pub substeps: usize,
}

impl Propagator for TrotterPropagator<'_> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Trotter
    }

    fn propagate(&self, right: &PauliString, s0: &QubitState, grid: &TimeGrid) -> Result<Vec<EvolvedState>> {
        let mut state = s0.apply_pauli(right)?;
        let mut out = Vec::with_capacity(grid.len());
        out.push(EvolvedState { phase: 0.0, state: state.clone() });
        for _ in 0..grid.steps() {
            state = crate::vqs::trotter_propagate(self.hamiltonian, grid.dt(), self.substeps, &state)?;
            out.push(EvolvedState { phase: 0.0, state: state.clone() });
        }
        Ok(out)
    }
}

/// Everything the braket sums need besides the evolved states.
#[derive(Clone, Debug)]
pub struct GreensProblem<'a> {
    pub ground: &'a QubitState,
    /// `c_l`.
    pub annihilation: &'a LadderOperatorExpansion,
    /// `c_m†`.
    pub creation: &'a LadderOperatorExpansion,
    pub e0: f64,
    pub grid: TimeGrid,
    pub mode: BraketMode,
    pub seed: u64,
}

impl GreensProblem<'_> {
    fn validate(&self) -> Result<()> {
        if self.annihilation.kind != LadderKind::Annihilation || self.creation.kind != LadderKind::Creation {
            return Err(Error::InvalidModel("expected an annihilator on the left and a creator on the right".into()));
        }
        let n = self.ground.n_qubits();
        for len in [self.annihilation.n_qubits(), self.creation.n_qubits()] {
            if len != n {
                return Err(Error::LengthMismatch { left: n, right: len });
            }
        }
        if !self.e0.is_finite() {
            return Err(Error::NonFinite("reference energy"));
        }
        if self.mode == BraketMode::Shots(0) {
            return Err(Error::ZeroShots);
        }
        Ok(())
    }

    fn label(&self) -> String {
        format!("{}|{}", self.annihilation.label, self.creation.label)
    }

    fn rng(&self) -> StdRng {
        StdRng::seed_from_u64(self.seed)
    }
}

#[derive(Clone, Debug)]
pub struct GreensResult {
    pub lesser: GreensSeries,
    pub greater: GreensSeries,
    pub retarded: GreensSeries,
}

impl GreensResult {
    fn build(
        problem: &GreensProblem<'_>,
        algorithm: Algorithm,
        lesser: Vec<Complex64>,
        greater: Vec<Complex64>,
    ) -> Result<Self> {
        let label = problem.label();
        let shots = problem.mode.shots();
        let lesser =
            GreensSeries::new(label.clone(), GreensKind::Lesser, algorithm, &problem.grid, lesser)?.with_shots(shots);
        let greater = GreensSeries::new(label, GreensKind::Greater, algorithm, &problem.grid, greater)?.with_shots(shots);
        let retarded = retarded(&lesser, &greater)?;
        Ok(Self { lesser, greater, retarded })
    }

    pub fn get(&self, kind: GreensKind) -> &GreensSeries {
        match kind {
            GreensKind::Lesser => &self.lesser,
            GreensKind::Greater => &self.greater,
            GreensKind::Retarded => &self.retarded,
        }
    }
}

/// Propagates `P_j|ψ⟩` for every string of the creator, then sums
/// `λ_i μ_j e^{iθ0_j}⟨ψ|P_i U_j P_j|ψ⟩`.
pub fn os_greens(propagator: &dyn Propagator, problem: &GreensProblem<'_>) -> Result<GreensResult> {
    problem.validate()?;
    let grid = problem.grid;
    let left: Vec<QubitState> =
        problem.annihilation.strings().map(|p| problem.ground.apply_pauli(p)).collect::<Result<_>>()?;
    let mut lesser = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut greater = lesser.clone();
    let mut rng = problem.rng();
    for (mu, pj) in problem.creation.terms() {
        let evolved = propagator.propagate(pj, problem.ground, &grid)?;
        if evolved.len() != grid.len() {
            return Err(Error::MissingTrajectory(format!("{} samples for {pj}, grid has {}", evolved.len(), grid.len())));
        }
        for (k, sample) in evolved.iter().enumerate() {
            let t = grid.time(k);
            let phase = Complex64::from_polar(1.0, sample.phase);
            for ((lambda, _), bra) in problem.annihilation.terms().iter().zip(&left) {
                let raw = inner_unchecked(bra.amplitudes(), sample.state.amplitudes());
                let b = phase * sample_braket(raw, problem.mode, &mut rng)?;
                let w = lambda * mu;
                lesser[k] += Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, problem.e0 * t) * w * b;
                greater[k] += Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, -problem.e0 * t) * w * b.conj();
            }
        }
    }
    GreensResult::build(problem, propagator.algorithm(), lesser, greater)
}

pub fn os_lesser(propagator: &dyn Propagator, problem: &GreensProblem<'_>) -> Result<GreensSeries> {
    Ok(os_greens(propagator, problem)?.lesser)
}

/// `(|0⟩|ψ⟩ + |1⟩P_j|ψ⟩)/√2` with the ancilla as trailing qubit.
pub fn cf_training_state(ground: &QubitState, pj: &PauliString) -> Result<QubitState> {
    let stacked = QubitState::stack_branches(&[ground.clone(), ground.apply_pauli(pj)?])?;
    Ok(stacked.scaled(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
}

/// Evolved ancilla-extended states `U(θ_k)(|0⟩|ψ⟩ + |1⟩P_j|ψ⟩)/√2`, one
/// vector per grid point; the global phase is irrelevant here.
pub trait ExtendedPropagator {
    fn propagate_extended(&self, start: &QubitState, grid: &TimeGrid) -> Result<Vec<QubitState>>;
}

/// McLachlan on the extended register with `H` acting on system qubits.
pub struct CfVqs<'a> {
    pub hamiltonian: &'a PauliSum,
    pub ansatz: &'a VhaAnsatz,
    pub options: EvolveOptions,
}

impl CfVqs<'_> {
    pub fn trajectory(&self, start: &QubitState, grid: &TimeGrid) -> Result<VqsTrajectory> {
        let h = self.hamiltonian.extended(1);
        let ansatz = self.ansatz.extended(1);
        evolve_with(&ansatz, start, &h, *grid, &self.options)
    }
}

impl ExtendedPropagator for CfVqs<'_> {
    fn propagate_extended(&self, start: &QubitState, grid: &TimeGrid) -> Result<Vec<QubitState>> {
        let traj = self.trajectory(start, grid)?;
        (0..traj.len()).map(|k| traj.variational_state(k)).collect()
    }
}

/// Exact propagation of both branches, for checking the CF bookkeeping.
pub struct CfExact<'a> {
    pub decomposition: &'a SpectralDecomposition,
}

impl ExtendedPropagator for CfExact<'_> {
    fn propagate_extended(&self, start: &QubitState, grid: &TimeGrid) -> Result<Vec<QubitState>> {
        let branches = start.branches(1);
        grid.times()
            .into_iter()
            .map(|t| {
                let evolved: Vec<QubitState> =
                    branches.iter().map(|b| self.decomposition.propagate(t, b)).collect::<Result<_>>()?;
                QubitState::stack_branches(&evolved)
            })
            .collect()
    }
}

/// CF estimate: `C_ij = ⟨ψ|U_j† P_i U_j P_j|ψ⟩ = 2⟨a|P_i|b⟩` from the two
/// branches `a`, `b` of the evolved extended state, then
/// `G^< = −i Σ λ_i μ_j C_ij`, `G^> = +i Σ λ_i μ_j conj(C_ij)`.
pub fn cf_greens(propagator: &dyn ExtendedPropagator, problem: &GreensProblem<'_>) -> Result<GreensResult> {
    problem.validate()?;
    let grid = problem.grid;
    let mut lesser = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut greater = lesser.clone();
    let mut rng = problem.rng();
    for (mu, pj) in problem.creation.terms() {
        let start = cf_training_state(problem.ground, pj)?;
        let evolved = propagator.propagate_extended(&start, &grid)?;
        if evolved.len() != grid.len() {
            return Err(Error::MissingTrajectory(format!("{} samples for {pj}, grid has {}", evolved.len(), grid.len())));
        }
        for (k, state) in evolved.iter().enumerate() {
            let branches = state.branches(1);
            let (a, b) = (&branches[0], &branches[1]);
            for (lambda, pi) in problem.annihilation.terms() {
                let raw = 2.0 * a.inner(&b.apply_pauli(pi)?)?;
                let c = sample_braket(raw, problem.mode, &mut rng)?;
                let w = lambda * mu;
                lesser[k] += Complex64::new(0.0, -1.0) * w * c;
                greater[k] += Complex64::new(0.0, 1.0) * w * c.conj();
            }
        }
    }
    GreensResult::build(problem, Algorithm::Cf, lesser, greater)
}

//! Brute-force reference: dense matrices, full diagonalization, exact
//! propagation and Green's functions evaluated straight from their
//! definitions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::{Algorithm, GreensKind, GreensSeries};
use crate::grid::TimeGrid;
use crate::hubbard::LadderOperatorExpansion;
use crate::pauli::{PauliString, PauliSum};
use crate::statevector::{MaskedPauli, QubitState};

/// Largest register the dense oracle will build.
pub const MAX_DENSE_QUBITS: usize = 8;

/// Eigenvalues closer than this to the lowest one count as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

pub type ComplexMatrix = DMatrix<Complex64>;

fn check_cap(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits { n, cap: MAX_DENSE_QUBITS });
    }
    Ok(())
}

fn accumulate_string(m: &mut ComplexMatrix, c: Complex64, p: &PauliString) {
    let masked = MaskedPauli::new(p);
    let dim = m.nrows();
    let mut column = vec![Complex64::new(0.0, 0.0); dim];
    let mut basis = vec![Complex64::new(0.0, 0.0); dim];
    for b in 0..dim {
        basis[b] = Complex64::new(1.0, 0.0);
        masked.apply_into(&basis, &mut column);
        for (r, v) in column.iter().enumerate() {
            if *v != Complex64::new(0.0, 0.0) {
                m[(r, b)] += c * v;
            }
        }
        column.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        basis[b] = Complex64::new(0.0, 0.0);
    }
}

pub fn dense_matrix(h: &PauliSum) -> Result<ComplexMatrix> {
    check_cap(h.n_qubits())?;
    let dim = 1 << h.n_qubits();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for t in h.terms() {
        accumulate_string(&mut m, Complex64::new(t.coefficient, 0.0), &t.string);
    }
    Ok(m)
}

/// Dense matrix of a complex-weighted expansion such as a ladder operator.
pub fn dense_operator(op: &LadderOperatorExpansion) -> Result<ComplexMatrix> {
    let n = op.n_qubits();
    check_cap(n)?;
    let dim = 1 << n;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (c, p) in op.terms() {
        accumulate_string(&mut m, *c, p);
    }
    Ok(m)
}

fn to_vector(s: &QubitState) -> DVector<Complex64> {
    DVector::from_column_slice(s.amplitudes())
}

fn from_vector(n_qubits: usize, v: DVector<Complex64>) -> QubitState {
    QubitState::from_amplitudes(n_qubits, v.as_slice().to_vec()).expect("dimension preserved")
}

/// Applies a dense matrix to a state.
pub fn apply_dense(m: &ComplexMatrix, s: &QubitState) -> Result<QubitState> {
    if m.ncols() != s.dim() {
        return Err(Error::LengthMismatch { left: m.ncols().trailing_zeros() as usize, right: s.n_qubits() });
    }
    Ok(from_vector(s.n_qubits(), m * to_vector(s)))
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum GroundStateSelector {
    /// Projection of the computational basis state with the largest weight
    /// in the ground eigenspace (lowest index on ties), phase-fixed so its
    /// first largest-magnitude amplitude is real and positive.
    #[default]
    Canonical,
    /// The `k`-th eigenvector of the ground multiplet as returned by the
    /// solver, phase-fixed as above.
    Eigenvector(usize),
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    n_qubits: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    pub degeneracy_tolerance: f64,
}

impl SpectralDecomposition {
    pub fn new(h: &PauliSum) -> Result<Self> {
        let m = dense_matrix(h)?;
        Self::from_matrix(h.n_qubits(), m)
    }

    pub fn from_matrix(n_qubits: usize, m: ComplexMatrix) -> Result<Self> {
        let hermiticity = (&m - m.adjoint()).norm();
        assert!(hermiticity <= 1e-12 * m.norm().max(1.0), "Hamiltonian is not Hermitian: {hermiticity}");
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let columns: Vec<_> = order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
        let eigenvectors = ComplexMatrix::from_columns(&columns);
        Ok(Self { n_qubits, eigenvalues, eigenvectors, degeneracy_tolerance: DEGENERACY_TOLERANCE })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Size of the lowest eigenvalue multiplet.
    pub fn ground_degeneracy(&self) -> usize {
        let e0 = self.eigenvalues[0];
        self.eigenvalues.iter().take_while(|&&e| e - e0 < self.degeneracy_tolerance).count()
    }

    /// `‖H − V Λ V†‖` in Frobenius norm.
    pub fn reconstruction_error(&self, h: &ComplexMatrix) -> f64 {
        let lambda = ComplexMatrix::from_diagonal(&DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&e| Complex64::new(e, 0.0)),
        ));
        (h - &self.eigenvectors * lambda * self.eigenvectors.adjoint()).norm()
    }

    pub fn ground_state(&self, selector: GroundStateSelector) -> Result<(f64, QubitState)> {
        let k = self.ground_degeneracy();
        let raw: Vec<Complex64> = match selector {
            GroundStateSelector::Eigenvector(j) => {
                if j >= k {
                    return Err(Error::IndexOutOfRange(format!("ground multiplet has {k} states, asked for {j}")));
                }
                self.eigenvectors.column(j).iter().copied().collect()
            }
            GroundStateSelector::Canonical if k == 1 => self.eigenvectors.column(0).iter().copied().collect(),
            GroundStateSelector::Canonical => {
                let sub = self.eigenvectors.columns(0, k);
                let weights: Vec<f64> = sub.row_iter().map(|r| r.iter().map(|a| a.norm_sqr()).sum()).collect();
                let best = weights.iter().cloned().fold(0.0, f64::max);
                let b = weights.iter().position(|&w| w >= best - 1e-12).expect("non-empty");
                let overlaps: Vec<Complex64> = (0..k).map(|j| sub[(b, j)].conj()).collect();
                (0..sub.nrows())
                    .map(|r| (0..k).map(|j| sub[(r, j)] * overlaps[j]).sum())
                    .collect()
            }
        };
        let state = QubitState::normalized(self.n_qubits, fix_phase(raw))?;
        Ok((self.eigenvalues[0], state))
    }

    /// `V e^{−iΛt} V† |s⟩`.
    pub fn propagate(&self, t: f64, s: &QubitState) -> Result<QubitState> {
        if s.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch { left: self.n_qubits, right: s.n_qubits() });
        }
        let mut coeffs = self.eigenvectors.adjoint() * to_vector(s);
        for (c, e) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        Ok(from_vector(self.n_qubits, &self.eigenvectors * coeffs))
    }
}

fn fix_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let max = v.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().find(|a| a.norm() >= max * (1.0 - 1e-9)).copied() {
        let rot = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|a| *a *= rot);
    }
    v
}

pub fn ground_state(h: &PauliSum, selector: GroundStateSelector) -> Result<(f64, QubitState)> {
    SpectralDecomposition::new(h)?.ground_state(selector)
}

pub fn exact_propagate(decomposition: &SpectralDecomposition, t: f64, s: &QubitState) -> Result<QubitState> {
    decomposition.propagate(t, s)
}

/// Lesser, greater and retarded components of the exact Green's function
/// in `ground`, for annihilator `c_l` and creator `c_m†`.
#[derive(Clone, Debug)]
pub struct ExactGreens {
    pub lesser: GreensSeries,
    pub greater: GreensSeries,
    pub retarded: GreensSeries,
}

impl ExactGreens {
    pub fn get(&self, kind: GreensKind) -> &GreensSeries {
        match kind {
            GreensKind::Lesser => &self.lesser,
            GreensKind::Greater => &self.greater,
            GreensKind::Retarded => &self.retarded,
        }
    }
}

/// Evaluates `G^<(t) = −i⟨ψ|e^{iHt} c_l e^{−iHt} c_m†|ψ⟩` and
/// `G^>(t) = +i⟨ψ|c_m† e^{iHt} c_l e^{−iHt}|ψ⟩` by propagating both
/// sides of each bracket; no use is made of `ψ` being an eigenstate.
pub fn exact_greens(
    decomposition: &SpectralDecomposition,
    ground: &QubitState,
    annihilation: &LadderOperatorExpansion,
    creation: &LadderOperatorExpansion,
    grid: &TimeGrid,
) -> Result<ExactGreens> {
    let c_l = dense_operator(annihilation)?;
    let c_m_dag = dense_operator(creation)?;
    let c_m = c_m_dag.adjoint();
    let added = apply_dense(&c_m_dag, ground)?;
    let removed = apply_dense(&c_m, ground)?;
    let minus_i = Complex64::new(0.0, -1.0);
    let mut lesser = Vec::with_capacity(grid.len());
    let mut greater = Vec::with_capacity(grid.len());
    for t in grid.times() {
        let psi_t = decomposition.propagate(t, ground)?;
        let lhs = apply_dense(&c_l, &psi_t)?;
        let added_t = decomposition.propagate(t, &added)?;
        lesser.push(minus_i * psi_t.inner(&apply_dense(&c_l, &added_t)?)?);
        let removed_t = decomposition.propagate(t, &removed)?;
        greater.push(-minus_i * removed_t.inner(&lhs)?);
    }
    let label = format!("{}|{}", annihilation.label, creation.label);
    let lesser = GreensSeries::new(label.clone(), GreensKind::Lesser, Algorithm::Exact, grid, lesser)?;
    let greater = GreensSeries::new(label, GreensKind::Greater, Algorithm::Exact, grid, greater)?;
    let retarded = crate::greens::retarded(&lesser, &greater)?;
    Ok(ExactGreens { lesser, greater, retarded })
}

//! Symmetry structure of the two-site model and the exact single-Pauli
//! propagator it yields for states `P̃|ψ⟩`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::dense_matrix;
use crate::grid::TimeGrid;
use crate::greens::{Algorithm, EvolvedState, Propagator};
use crate::pauli::{Commutation, PauliString, PauliSum, PauliTerm};
use crate::statevector::QubitState;

/// Tolerance for the proposition checks and dense commutators.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

pub const S1: [&str; 4] = ["XZXI", "YZYI", "IXZX", "IYZY"];
pub const S2: [&str; 2] = ["ZZII", "IIZZ"];

/// X-type Jordan-Wigner strings of the four modes, in mode order.
pub const LADDER_X: [&str; 4] = ["XIII", "ZXII", "ZZXI", "ZZZX"];
/// Y-type partners, needed for the full ladder-operator expansion.
pub const LADDER_Y: [&str; 4] = ["YIII", "ZYII", "ZZYI", "ZZZY"];

/// Published signs for the X-type columns, rows in `S1` then `S2` order.
pub const PUBLISHED_SIGNS: [[i8; 4]; 6] = [
    [1, 1, -1, 1],
    [-1, 1, 1, 1],
    [1, 1, 1, -1],
    [1, -1, 1, 1],
    [-1, -1, 1, 1],
    [1, 1, -1, -1],
];

fn parse_all(strings: &[&str]) -> Vec<PauliString> {
    strings.iter().map(|s| s.parse().expect("static Pauli string")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetrySets {
    pub s1: Vec<PauliString>,
    pub s2: Vec<PauliString>,
}

impl Default for SymmetrySets {
    fn default() -> Self {
        Self { s1: parse_all(&S1), s2: parse_all(&S2) }
    }
}

impl SymmetrySets {
    pub fn sets(&self) -> [(&'static str, &[PauliString]); 2] {
        [("S1", &self.s1), ("S2", &self.s2)]
    }
}

/// Checks that within each set the strings commute pairwise, square to the
/// identity, and that every pairwise product commutes with `h`.
pub fn verify_symmetry_sets(h: &PauliSum) -> Result<SymmetrySets> {
    if h.n_qubits() != 4 {
        return Err(Error::LengthMismatch { left: 4, right: h.n_qubits() });
    }
    let sets = SymmetrySets::default();
    let hm = dense_matrix(h)?;
    for (name, set) in sets.sets() {
        for p in set {
            let (phase, square) = p.multiply(p)?;
            if !square.is_identity() || phase.exponent() != 0 {
                return Err(Error::SymmetryViolated(format!("{name}: {p} does not square to the identity")));
            }
        }
        for (a, p) in set.iter().enumerate() {
            for q in &set[a + 1..] {
                if !p.commutes_with(q)? {
                    return Err(Error::SymmetryViolated(format!("{name}: {p} and {q} anticommute")));
                }
                let (_, product) = p.multiply(q)?;
                if let Some(term) = h.terms().iter().find(|t| !t.string.commutes_with(&product).unwrap_or(false)) {
                    return Err(Error::SymmetryViolated(format!(
                        "{name}: {p}·{q} anticommutes with Hamiltonian term {}",
                        term.string
                    )));
                }
                let pm = dense_matrix(&PauliSum::from_terms(4, [PauliTerm::new(1.0, product.clone())])?)?;
                let commutator = (&hm * &pm - &pm * &hm).norm();
                if commutator > SYMMETRY_TOLERANCE {
                    return Err(Error::SymmetryViolated(format!("{name}: ‖[H, {product}]‖ = {commutator:e}")));
                }
            }
        }
    }
    Ok(sets)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub set: String,
    pub left: PauliString,
    pub right: PauliString,
    /// `⟨ψ|P_l P_m|ψ⟩`, real for these commuting strings.
    pub alpha: f64,
    /// `‖P_l P_m|ψ⟩ − |ψ⟩‖`.
    pub product_residual: f64,
    /// `‖P_l|ψ⟩ − P_m|ψ⟩‖`.
    pub equality_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub pairs: Vec<PairCheck>,
    pub max_residual: f64,
}

impl PropositionReport {
    pub fn holds(&self) -> bool {
        self.max_residual <= SYMMETRY_TOLERANCE
    }
}

/// Evaluates `P_l P_m|ψ⟩ = |ψ⟩` and `P_l|ψ⟩ = P_m|ψ⟩` for every pair within
/// each set and fails when either is off by more than the tolerance.
pub fn check_propositions(ground: &QubitState, sets: &SymmetrySets) -> Result<PropositionReport> {
    let report = proposition_residuals(ground, sets)?;
    if !report.holds() {
        return Err(Error::PropositionFailed(format!("largest residual {:e}", report.max_residual)));
    }
    Ok(report)
}

/// Same measurements without the pass/fail decision.
pub fn proposition_residuals(ground: &QubitState, sets: &SymmetrySets) -> Result<PropositionReport> {
    let mut pairs = Vec::new();
    for (name, set) in sets.sets() {
        for (a, p) in set.iter().enumerate() {
            for q in &set[a + 1..] {
                let pq = ground.apply_pauli(q)?.apply_pauli(p)?;
                pairs.push(PairCheck {
                    set: name.to_string(),
                    left: p.clone(),
                    right: q.clone(),
                    alpha: ground.inner(&pq)?.re,
                    product_residual: pq.distance(ground)?,
                    equality_residual: ground.apply_pauli(p)?.distance(&ground.apply_pauli(q)?)?,
                });
            }
        }
    }
    let max_residual =
        pairs.iter().map(|c| c.product_residual.max(c.equality_residual)).fold(0.0, f64::max);
    Ok(PropositionReport { pairs, max_residual })
}

/// `σ(P_l, P̃)`: +1 when the strings commute, −1 otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignTable {
    pub rows: Vec<PauliString>,
    pub columns: Vec<PauliString>,
    pub signs: Vec<Vec<i8>>,
}

impl SignTable {
    pub fn sign(&self, row: &PauliString, column: &PauliString) -> Result<i8> {
        let r = self.rows.iter().position(|p| p == row);
        let c = self.columns.iter().position(|p| p == column);
        match (r, c) {
            (Some(r), Some(c)) => Ok(self.signs[r][c]),
            _ => Err(Error::NotInTable(format!("({row}, {column})"))),
        }
    }

    /// `Σ_{l∈S1} σ` per column.
    pub fn s1_sums(&self, sets: &SymmetrySets) -> Result<Vec<i32>> {
        self.column_sums(&sets.s1, |_| 1.0).map(|v| v.into_iter().map(|x| x as i32).collect())
    }

    /// `Σ_{l∈S2} c_l σ` per column, with coefficients from `h`.
    pub fn s2_weighted_sums(&self, sets: &SymmetrySets, h: &PauliSum) -> Result<Vec<f64>> {
        self.column_sums(&sets.s2, |p| h.coefficient_of(p).unwrap_or(0.0))
    }

    fn column_sums(&self, rows: &[PauliString], weight: impl Fn(&PauliString) -> f64) -> Result<Vec<f64>> {
        self.columns
            .iter()
            .map(|c| rows.iter().map(|r| Ok(weight(r) * self.sign(r, c)? as f64)).sum())
            .collect()
    }

    /// Keyed form for reports: `row -> column -> sign`.
    pub fn to_map(&self) -> BTreeMap<String, BTreeMap<String, i8>> {
        self.rows
            .iter()
            .zip(&self.signs)
            .map(|(r, signs)| {
                (r.to_string(), self.columns.iter().zip(signs).map(|(c, &s)| (c.to_string(), s)).collect())
            })
            .collect()
    }
}

fn build_table(columns: Vec<PauliString>) -> SignTable {
    let sets = SymmetrySets::default();
    let rows: Vec<PauliString> = sets.s1.iter().chain(&sets.s2).cloned().collect();
    let signs = rows
        .iter()
        .map(|r| {
            columns
                .iter()
                .map(|c| match r.commutator_class(c).expect("equal lengths") {
                    Commutation::Commuting => 1,
                    Commutation::Anticommuting => -1,
                })
                .collect()
        })
        .collect();
    SignTable { rows, columns, signs }
}

/// Signs generated by the commutator rule for the X-type ladder strings.
pub fn sign_table() -> SignTable {
    build_table(parse_all(&LADDER_X))
}

/// As `sign_table`, with the Y-type ladder strings appended as columns.
pub fn extended_sign_table() -> SignTable {
    build_table(parse_all(&LADDER_X).into_iter().chain(parse_all(&LADDER_Y)).collect())
}

/// The hard-coded published table, kept as a regression fixture.
pub fn published_sign_table() -> SignTable {
    let sets = SymmetrySets::default();
    SignTable {
        rows: sets.s1.iter().chain(&sets.s2).cloned().collect(),
        columns: parse_all(&LADDER_X),
        signs: PUBLISHED_SIGNS.iter().map(|r| r.to_vec()).collect(),
    }
}

/// `e^{−iHt}P̃|ψ⟩ = e^{iφ} e^{iθ P_l} P̃|ψ⟩` with `θ = στt` and
/// `φ = −c_I t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinglePauliEvolution {
    pub generator: PauliString,
    pub sigma: i8,
    /// Angle of `e^{iθP_l}`.
    pub angle: f64,
    /// Identity-term phase.
    pub phase: f64,
}

impl SinglePauliEvolution {
    pub fn apply(&self, s: &QubitState) -> Result<QubitState> {
        Ok(s.apply_pauli_exponential(self.angle, &self.generator)?.with_phase(self.phase))
    }
}

/// Evolution rule for `P̃|ψ⟩` under the dimer Hamiltonian `h` using
/// generator `p_l ∈ S1`. The hopping amplitude is read off `h` as
/// `τ = −2c_l`.
pub fn single_pauli_propagator(
    p_tilde: &PauliString,
    p_l: &PauliString,
    t: f64,
    h: &PauliSum,
) -> Result<SinglePauliEvolution> {
    let sets = SymmetrySets::default();
    if !sets.s1.contains(p_l) {
        return Err(Error::NotInTable(format!("{p_l} is not in S1")));
    }
    let sigma = extended_sign_table().sign(p_l, p_tilde)?;
    let c_l = h
        .coefficient_of(p_l)
        .ok_or_else(|| Error::InvalidModel(format!("Hamiltonian has no {p_l} term")))?;
    let tau = -2.0 * c_l;
    Ok(SinglePauliEvolution {
        generator: p_l.clone(),
        sigma,
        angle: sigma as f64 * tau * t,
        phase: -h.identity_coefficient() * t,
    })
}

/// OS propagator for the dimer built on `single_pauli_propagator`.
pub struct SymmetryPropagator<'a> {
    pub hamiltonian: &'a PauliSum,
    pub generator: PauliString,
}

impl Propagator for SymmetryPropagator<'_> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Os
    }

    fn propagate(&self, right: &PauliString, s0: &QubitState, grid: &TimeGrid) -> Result<Vec<EvolvedState>> {
        let start = s0.apply_pauli(right)?;
        grid.times()
            .into_iter()
            .map(|t| {
                let rule = single_pauli_propagator(right, &self.generator, t, self.hamiltonian)?;
                Ok(EvolvedState {
                    phase: rule.phase,
                    state: start.apply_pauli_exponential(rule.angle, &rule.generator)?,
                })
            })
            .collect()
    }
}

/// JSON-ready summary of the dimer symmetry analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub sets: SymmetrySets,
    pub table: BTreeMap<String, BTreeMap<String, i8>>,
    pub matches_published: bool,
    pub s1_column_sums: Vec<i32>,
    pub s2_weighted_sums: Vec<f64>,
    pub propositions: PropositionReport,
}

pub fn symmetry_report(h: &PauliSum, ground: &QubitState) -> Result<SymmetryReport> {
    let sets = verify_symmetry_sets(h)?;
    let table = extended_sign_table();
    let generated = sign_table();
    Ok(SymmetryReport {
        table: table.to_map(),
        matches_published: generated == published_sign_table(),
        s1_column_sums: table.s1_sums(&sets)?,
        s2_weighted_sums: table.s2_weighted_sums(&sets, h)?,
        propositions: check_propositions(ground, &sets)?,
        sets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{ground_state, GroundStateSelector, SpectralDecomposition};
    use crate::hubbard::{qubit_hamiltonian, HubbardModel};
    use num_complex::Complex64;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn dimer() -> PauliSum {
        qubit_hamiltonian(&HubbardModel::dimer(1.0, 3.0)).unwrap()
    }

    #[test]
    fn generated_table_matches_published() {
        assert_eq!(sign_table(), published_sign_table());
        let t = sign_table();
        assert_eq!(t.sign(&ps("XZXI"), &ps("XIII")).unwrap(), 1);
        assert_eq!(t.sign(&ps("YZYI"), &ps("XIII")).unwrap(), -1);
        assert_eq!(t.sign(&ps("ZZII"), &ps("ZZXI")).unwrap(), 1);
        assert!(t.sign(&ps("XXXX"), &ps("XIII")).is_err());
    }

    #[test]
    fn column_sums() {
        let h = dimer();
        let sets = SymmetrySets::default();
        let t = extended_sign_table();
        assert_eq!(t.s1_sums(&sets).unwrap(), vec![2; 8]);
        assert!(t.s2_weighted_sums(&sets, &h).unwrap().iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn sets_verify_and_wrong_term_is_caught() {
        let h = dimer();
        verify_symmetry_sets(&h).unwrap();
        let broken = h.with_term(PauliTerm::new(0.3, ps("XIII"))).unwrap();
        assert!(matches!(verify_symmetry_sets(&broken), Err(Error::SymmetryViolated(_))));
    }

    #[test]
    fn propositions_hold_on_ground_state_only() {
        let h = dimer();
        let (_, g) = ground_state(&h, GroundStateSelector::Canonical).unwrap();
        let report = check_propositions(&g, &SymmetrySets::default()).unwrap();
        assert!(report.pairs.iter().all(|p| (p.alpha - 1.0).abs() < 1e-10));
        let other = QubitState::normalized(4, (0..16).map(|k| Complex64::new(1.0 + k as f64, 0.5)).collect()).unwrap();
        assert!(matches!(check_propositions(&other, &SymmetrySets::default()), Err(Error::PropositionFailed(_))));
    }

    #[test]
    fn propagator_is_exact_for_every_choice() {
        let h = dimer();
        let d = SpectralDecomposition::new(&h).unwrap();
        let (_, g) = d.ground_state(GroundStateSelector::Canonical).unwrap();
        let rule = single_pauli_propagator(&ps("XIII"), &ps("YZYI"), 1.0, &h).unwrap();
        assert_eq!(rule.sigma, -1);
        assert!((rule.angle + 1.0).abs() < 1e-15);
        assert!((rule.phase - 1.5).abs() < 1e-15);
        for p_tilde in LADDER_X.iter().chain(&LADDER_Y).map(|s| ps(s)) {
            let start = g.apply_pauli(&p_tilde).unwrap();
            for t in [0.0, 0.7, 2.0, 4.0 * std::f64::consts::PI] {
                let exact = d.propagate(t, &start).unwrap();
                for p_l in S1.iter().map(|s| ps(s)) {
                    let approx = single_pauli_propagator(&p_tilde, &p_l, t, &h).unwrap().apply(&start).unwrap();
                    assert!(approx.distance(&exact).unwrap() <= 1e-10, "{p_tilde} {p_l} t={t}");
                }
            }
        }
        assert!(single_pauli_propagator(&ps("XXII"), &ps("XZXI"), 1.0, &h).is_err());
        assert!(single_pauli_propagator(&ps("XIII"), &ps("ZZII"), 1.0, &h).is_err());
    }
}

//! Hubbard chains and their Jordan-Wigner images.
//!
//! Spin orbitals are interleaved: `(1↑, 1↓, 2↑, 2↓, …)` map onto qubits
//! `(1, 2, 3, 4, …)`. A qubit in `|1⟩` is an occupied orbital, so
//! `c = Z…Z (X + iY)/2` and `c† = Z…Z (X − iY)/2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum, PauliTerm, ZERO_COEFFICIENT};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::InvalidModel(format!("unknown boundary {other:?}"))),
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Spin::Up => "up",
            Spin::Down => "dn",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LadderKind {
    Creation,
    Annihilation,
}

/// Hubbard chain with hopping `tau`, on-site repulsion `u` and the
/// half-filling chemical potential `-u/2` on every orbital.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HubbardModel {
    n_sites: usize,
    tau: f64,
    u: f64,
    boundary: Boundary,
}

impl HubbardModel {
    pub fn new(n_sites: usize, tau: f64, u: f64, boundary: Boundary) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidModel(format!("need at least 2 sites, got {n_sites}")));
        }
        if boundary == Boundary::Periodic && n_sites == 2 {
            return Err(Error::InvalidModel("periodic boundary on 2 sites double-counts the bond".into()));
        }
        if !tau.is_finite() || !u.is_finite() {
            return Err(Error::NonFinite("Hubbard parameters"));
        }
        Ok(Self { n_sites, tau, u, boundary })
    }

    /// The two-site model used throughout the dimer analysis.
    pub fn dimer(tau: f64, u: f64) -> Self {
        Self { n_sites: 2, tau, u, boundary: Boundary::Open }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// 0-based qubit index of orbital `(site, spin)`, `site` 1-based.
    pub fn mode(&self, site: usize, spin: Spin) -> Result<usize> {
        if site == 0 || site > self.n_sites {
            return Err(Error::IndexOutOfRange(format!("site {site} not in 1..={}", self.n_sites)));
        }
        Ok(2 * (site - 1) + spin.offset())
    }

    fn bonds(&self) -> Vec<(usize, usize)> {
        let mut bonds: Vec<_> = (1..self.n_sites).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic {
            bonds.push((self.n_sites, 1));
        }
        bonds
    }
}

/// `Σ λ_i P_i` expansion of a fermionic ladder operator (or a linear
/// combination of them).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderOperatorExpansion {
    pub label: String,
    pub kind: LadderKind,
    terms: Vec<(Complex64, PauliString)>,
}

impl LadderOperatorExpansion {
    fn from_raw(label: String, kind: LadderKind, raw: Vec<(Complex64, PauliString)>) -> Result<Self> {
        let terms = ComplexSum::from_terms(raw).into_terms();
        if terms.is_empty() {
            return Err(Error::EmptyCombination);
        }
        Ok(Self { label, kind, terms })
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn strings(&self) -> impl Iterator<Item = &PauliString> {
        self.terms.iter().map(|(_, s)| s)
    }

    pub fn n_qubits(&self) -> usize {
        self.terms[0].1.len()
    }

    /// Hermitian adjoint: conjugated coefficients, flipped kind.
    pub fn adjoint(&self) -> Self {
        Self {
            label: self.label.clone(),
            kind: match self.kind {
                LadderKind::Creation => LadderKind::Annihilation,
                LadderKind::Annihilation => LadderKind::Creation,
            },
            terms: self.terms.iter().map(|(c, s)| (c.conj(), s.clone())).collect(),
        }
    }
}

/// Jordan-Wigner expansion of `c_{site,spin}` or `c†_{site,spin}`.
pub fn ladder_operator(m: &HubbardModel, site: usize, spin: Spin, kind: LadderKind) -> Result<LadderOperatorExpansion> {
    let q = m.mode(site, spin)?;
    let label = format!("{site}{}", spin.label());
    LadderOperatorExpansion::from_raw(label, kind, jw_mode(m.n_qubits(), q, kind))
}

/// Linear combination `Σ a_k c_{site_k, spin_k}` (or its creation partner,
/// where coefficients are conjugated). With `normalize`, coefficients are
/// divided by their Euclidean norm.
pub fn momentum_operator(
    m: &HubbardModel,
    combo: &[(Complex64, usize, Spin)],
    kind: LadderKind,
    normalize: bool,
) -> Result<LadderOperatorExpansion> {
    if combo.is_empty() {
        return Err(Error::EmptyCombination);
    }
    let scale = if normalize {
        let norm = combo.iter().map(|(a, _, _)| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::EmptyCombination);
        }
        1.0 / norm
    } else {
        1.0
    };
    let mut raw = Vec::new();
    let mut label = String::new();
    for (a, site, spin) in combo {
        let q = m.mode(*site, *spin)?;
        let weight = match kind {
            LadderKind::Annihilation => *a,
            LadderKind::Creation => a.conj(),
        } * scale;
        raw.extend(jw_mode(m.n_qubits(), q, kind).into_iter().map(|(c, s)| (c * weight, s)));
        label.push_str(&format_combo_term(*a, *site, *spin, label.is_empty()));
    }
    LadderOperatorExpansion::from_raw(label, kind, raw)
}

fn format_combo_term(a: Complex64, site: usize, spin: Spin, first: bool) -> String {
    let mode = format!("{site}{}", spin.label());
    if a.im == 0.0 && a.re.abs() == 1.0 {
        match (a.re > 0.0, first) {
            (true, true) => mode,
            (true, false) => format!("+{mode}"),
            (false, _) => format!("-{mode}"),
        }
    } else {
        format!("{}({a})*{mode}", if first { "" } else { "+" })
    }
}

fn jw_mode(n_qubits: usize, q: usize, kind: LadderKind) -> Vec<(Complex64, PauliString)> {
    let mut x = PauliString::identity(n_qubits).symbols().to_vec();
    x[..q].fill(Pauli::Z);
    let mut y = x.clone();
    x[q] = Pauli::X;
    y[q] = Pauli::Y;
    let y_coef = match kind {
        LadderKind::Annihilation => Complex64::new(0.0, 0.5),
        LadderKind::Creation => Complex64::new(0.0, -0.5),
    };
    vec![(Complex64::new(0.5, 0.0), PauliString::new(x)), (y_coef, PauliString::new(y))]
}

/// Jordan-Wigner image of the model Hamiltonian.
///
/// Terms come out identity first, then hopping strings bond by bond (spin
/// up before down, X-type before Y-type), then the on-site `ZZ` terms.
pub fn qubit_hamiltonian(m: &HubbardModel) -> Result<PauliSum> {
    let n = m.n_qubits();
    let mut acc = ComplexSum::default();
    for (i, j) in m.bonds() {
        for spin in [Spin::Up, Spin::Down] {
            let (qi, qj) = (m.mode(i, spin)?, m.mode(j, spin)?);
            let mut piece = ComplexSum::default();
            let hop = |a, b| -> ComplexSum {
                let cd = ComplexSum::from_terms(jw_mode(n, a, LadderKind::Creation));
                let c = ComplexSum::from_terms(jw_mode(n, b, LadderKind::Annihilation));
                cd.product(&c)
            };
            piece.extend(hop(qi, qj).scaled(-m.tau));
            piece.extend(hop(qj, qi).scaled(-m.tau));
            acc.extend(piece.sorted());
        }
    }
    let number = |q: usize| ComplexSum::from_terms(
        jw_mode(n, q, LadderKind::Creation),
    )
    .product(&ComplexSum::from_terms(jw_mode(n, q, LadderKind::Annihilation)));
    for site in 1..=m.n_sites {
        let up = number(m.mode(site, Spin::Up)?);
        let dn = number(m.mode(site, Spin::Down)?);
        let mut piece = up.product(&dn).scaled(m.u);
        piece.extend(up.scaled(-m.u / 2.0));
        piece.extend(dn.scaled(-m.u / 2.0));
        acc.extend(piece.sorted());
    }
    let mut terms = Vec::new();
    for (c, s) in acc.into_terms() {
        if c.im.abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("non-Hermitian coefficient {c} on {s}")));
        }
        terms.push(PauliTerm::new(c.re, s));
    }
    terms.sort_by_key(|t| !t.string.is_identity());
    PauliSum::from_terms(n, terms)
}

/// Complex-weighted Pauli sum used while expanding fermionic products.
#[derive(Clone, Debug, Default)]
struct ComplexSum {
    terms: Vec<(Complex64, PauliString)>,
}

impl ComplexSum {
    fn from_terms(raw: Vec<(Complex64, PauliString)>) -> Self {
        let mut s = Self::default();
        s.extend(Self { terms: raw });
        s
    }

    fn extend(&mut self, other: ComplexSum) {
        for (c, p) in other.terms {
            match self.terms.iter_mut().find(|(_, q)| *q == p) {
                Some((existing, _)) => *existing += c,
                None => self.terms.push((c, p)),
            }
        }
    }

    fn scaled(mut self, a: f64) -> Self {
        self.terms.iter_mut().for_each(|(c, _)| *c *= a);
        self
    }

    fn sorted(mut self) -> Self {
        self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        self
    }

    fn product(&self, rhs: &ComplexSum) -> ComplexSum {
        let mut out = ComplexSum::default();
        for (a, p) in &self.terms {
            for (b, q) in &rhs.terms {
                let (phase, r) = p.multiply(q).expect("ladder strings share the register");
                out.extend(ComplexSum { terms: vec![(a * b * phase.to_complex(), r)] });
            }
        }
        out
    }

    fn into_terms(self) -> Vec<(Complex64, PauliString)> {
        self.terms.into_iter().filter(|(c, _)| c.norm() > ZERO_COEFFICIENT).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn model_validation() {
        assert!(HubbardModel::new(1, 1.0, 3.0, Boundary::Open).is_err());
        assert!(HubbardModel::new(2, 1.0, 3.0, Boundary::Periodic).is_err());
        assert!(HubbardModel::new(3, 1.0, 3.0, Boundary::Periodic).is_ok());
        assert!(HubbardModel::new(3, f64::NAN, 3.0, Boundary::Open).is_err());
    }

    #[test]
    fn dimer_hamiltonian_matches_closed_form() {
        let (tau, u) = (1.0, 3.0);
        let h = qubit_hamiltonian(&HubbardModel::dimer(tau, u)).unwrap();
        let expected = [
            ("IIII", -u / 2.0),
            ("XZXI", -tau / 2.0),
            ("YZYI", -tau / 2.0),
            ("IXZX", -tau / 2.0),
            ("IYZY", -tau / 2.0),
            ("ZZII", u / 4.0),
            ("IIZZ", u / 4.0),
        ];
        assert_eq!(h.len(), expected.len());
        for ((s, c), term) in expected.iter().zip(h.terms()) {
            assert_eq!(term.string, ps(s));
            assert!((term.coefficient - c).abs() < 1e-15, "{s}: {}", term.coefficient);
        }
    }

    #[test]
    fn three_site_open_term_census() {
        let h = qubit_hamiltonian(&HubbardModel::new(3, 1.0, 3.0, Boundary::Open).unwrap()).unwrap();
        let weights: Vec<usize> = h.non_identity_terms().map(|t| t.string.weight()).collect();
        assert_eq!(weights.len(), 11);
        assert_eq!(weights.iter().filter(|&&w| w == 3).count(), 8);
        assert_eq!(weights.iter().filter(|&&w| w == 2).count(), 3);
    }

    #[test]
    fn four_site_periodic_term_census() {
        let h = qubit_hamiltonian(&HubbardModel::new(4, 1.0, 3.0, Boundary::Periodic).unwrap()).unwrap();
        let weights: Vec<usize> = h.non_identity_terms().map(|t| t.string.weight()).collect();
        assert_eq!(weights.len(), 20);
        assert_eq!(weights.iter().filter(|&&w| w == 3).count(), 12);
        assert_eq!(weights.iter().filter(|&&w| w == 7).count(), 4);
        assert_eq!(weights.iter().filter(|&&w| w == 2).count(), 4);
        assert!(h.coefficient_of(&ps("XZZZZZXI")).is_some());
    }

    #[test]
    fn ladder_strings() {
        let m = HubbardModel::dimer(1.0, 3.0);
        let c1 = ladder_operator(&m, 1, Spin::Up, LadderKind::Creation).unwrap();
        assert_eq!(c1.terms(), &[(Complex64::new(0.5, 0.0), ps("XIII")), (Complex64::new(0.0, -0.5), ps("YIII"))]);
        let c2 = ladder_operator(&m, 2, Spin::Up, LadderKind::Creation).unwrap();
        assert_eq!(c2.strings().cloned().collect::<Vec<_>>(), vec![ps("ZZXI"), ps("ZZYI")]);
        let a2 = ladder_operator(&m, 2, Spin::Up, LadderKind::Annihilation).unwrap();
        assert_eq!(a2.terms()[1].0, Complex64::new(0.0, 0.5));
        assert_eq!(c2.adjoint(), a2);
        assert!(ladder_operator(&m, 3, Spin::Up, LadderKind::Creation).is_err());
        assert!(ladder_operator(&m, 0, Spin::Up, LadderKind::Creation).is_err());
    }

    #[test]
    fn momentum_combinations() {
        let m = HubbardModel::dimer(1.0, 3.0);
        let one = Complex64::new(1.0, 0.0);
        let combo = [(one, 1, Spin::Up), (-one, 2, Spin::Up)];
        let ck = momentum_operator(&m, &combo, LadderKind::Annihilation, true).unwrap();
        assert_eq!(ck.terms().len(), 4);
        for (c, _) in ck.terms() {
            assert!((c.norm() - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        }
        assert_eq!(ck.label, "1up-2up");

        let single = momentum_operator(&m, &[(one, 2, Spin::Down)], LadderKind::Creation, true).unwrap();
        let direct = ladder_operator(&m, 2, Spin::Down, LadderKind::Creation).unwrap();
        assert_eq!(single.terms(), direct.terms());

        let m3 = HubbardModel::new(3, 1.0, 3.0, Boundary::Open).unwrap();
        let raw = momentum_operator(&m3, &combo, LadderKind::Annihilation, false).unwrap();
        assert_eq!(raw.terms().len(), 4);
        assert!(raw.terms().iter().all(|(c, _)| (c.norm() - 0.5).abs() < 1e-15));

        assert_eq!(momentum_operator(&m, &[], LadderKind::Creation, true), Err(Error::EmptyCombination));
    }
}

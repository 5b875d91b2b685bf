//! Symbolic algebra on n-qubit Pauli strings.
//!
//! Strings are written with qubit 1 leftmost, so `"XZXI"` acts with X on
//! qubit 1, Z on qubit 2, X on qubit 3 and identity on qubit 4. Products
//! carry their phase separately as a power of `i`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients at or below this magnitude are dropped from a [`PauliSum`].
pub const ZERO_COEFFICIENT: f64 = 1e-12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidSymbol(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Single-qubit product `self * rhs = phase * result`.
    pub fn product(self, rhs: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (Phase::ONE, p),
            (a, b) if a == b => (Phase::ONE, I),
            (X, Y) => (Phase::I, Z),
            (Y, Z) => (Phase::I, X),
            (Z, X) => (Phase::I, Y),
            (Y, X) => (Phase::MINUS_I, Z),
            (Z, Y) => (Phase::MINUS_I, X),
            (X, Z) => (Phase::MINUS_I, Y),
            _ => unreachable!(),
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn signs(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }
}

/// A unit phase `i^k`, `k` in `0..4`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Commutation {
    Commuting,
    Anticommuting,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    symbols: Vec<Pauli>,
}

impl PauliString {
    pub fn new(symbols: Vec<Pauli>) -> Self {
        Self { symbols }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { symbols: vec![Pauli::I; n_qubits] }
    }

    /// `p` on the 0-based `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n_qubits);
        s.symbols[qubit] = p;
        s
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Pauli] {
        &self.symbols
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        self.symbols[qubit]
    }

    pub fn weight(&self) -> usize {
        self.symbols.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.symbols.iter().all(|&p| p == Pauli::I)
    }

    /// Number of X or Y symbols (each needs a basis change in a circuit).
    pub fn xy_count(&self) -> usize {
        self.symbols.iter().filter(|p| p.flips()).count()
    }

    pub fn y_count(&self) -> usize {
        self.symbols.iter().filter(|&&p| p == Pauli::Y).count()
    }

    /// Bit `k` set when qubit `k + 1` carries X or Y.
    pub fn x_mask(&self) -> usize {
        self.mask(Pauli::flips)
    }

    /// Bit `k` set when qubit `k + 1` carries Z or Y.
    pub fn z_mask(&self) -> usize {
        self.mask(Pauli::signs)
    }

    fn mask(&self, pred: fn(Pauli) -> bool) -> usize {
        assert!(self.len() <= usize::BITS as usize, "bit masks limited to {} qubits", usize::BITS);
        self.symbols
            .iter()
            .enumerate()
            .filter(|(_, &p)| pred(p))
            .fold(0, |m, (k, _)| m | (1 << k))
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(())
    }

    /// Returns `(phase, product)` with `phase * product == self * other`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        self.check_len(other)?;
        let mut phase = Phase::ONE;
        let symbols = self
            .symbols
            .iter()
            .zip(&other.symbols)
            .map(|(&a, &b)| {
                let (ph, p) = a.product(b);
                phase = phase * ph;
                p
            })
            .collect();
        Ok((phase, PauliString { symbols }))
    }

    /// Two strings commute iff the number of positions where both are
    /// non-identity and differ is even.
    pub fn commutator_class(&self, other: &PauliString) -> Result<Commutation> {
        self.check_len(other)?;
        let clashes = self
            .symbols
            .iter()
            .zip(&other.symbols)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        Ok(if clashes % 2 == 0 { Commutation::Commuting } else { Commutation::Anticommuting })
    }

    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        Ok(self.commutator_class(other)? == Commutation::Commuting)
    }

    /// Appends identity on `extra` trailing qubits.
    pub fn extended(&self, extra: usize) -> PauliString {
        let mut symbols = self.symbols.clone();
        symbols.extend(std::iter::repeat_n(Pauli::I, extra));
        PauliString { symbols }
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>().map(PauliString::new)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.symbols {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, string: PauliString) -> Self {
        Self { coefficient, string }
    }
}

/// A real-weighted sum of distinct Pauli strings on a fixed register.
///
/// Term order is insertion order; it is significant for product-formula
/// circuits built from the sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    /// Builds a sum, merging repeated strings into their first occurrence and
    /// dropping terms whose merged coefficient vanishes.
    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut merged: Vec<PauliTerm> = Vec::new();
        for term in terms {
            if term.string.len() != n_qubits {
                return Err(Error::LengthMismatch { left: n_qubits, right: term.string.len() });
            }
            if !term.coefficient.is_finite() {
                return Err(Error::NonFinite("Pauli coefficient"));
            }
            match merged.iter_mut().find(|t| t.string == term.string) {
                Some(existing) => existing.coefficient += term.coefficient,
                None => merged.push(term),
            }
        }
        merged.retain(|t| t.coefficient.abs() > ZERO_COEFFICIENT);
        Ok(Self { n_qubits, terms: merged })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity string, zero when absent.
    pub fn identity_coefficient(&self) -> f64 {
        self.terms.iter().find(|t| t.string.is_identity()).map_or(0.0, |t| t.coefficient)
    }

    pub fn non_identity_terms(&self) -> impl Iterator<Item = &PauliTerm> {
        self.terms.iter().filter(|t| !t.string.is_identity())
    }

    pub fn coefficient_of(&self, string: &PauliString) -> Option<f64> {
        self.terms.iter().find(|t| &t.string == string).map(|t| t.coefficient)
    }

    /// Returns `self + alpha * I`.
    pub fn shifted(&self, alpha: f64) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.push(PauliTerm::new(alpha, PauliString::identity(self.n_qubits)));
        Self::from_terms(self.n_qubits, terms)
    }

    /// Same operator on a register with `extra` idle trailing qubits.
    pub fn extended(&self, extra: usize) -> Self {
        Self {
            n_qubits: self.n_qubits + extra,
            terms: self.terms.iter().map(|t| PauliTerm::new(t.coefficient, t.string.extended(extra))).collect(),
        }
    }

    pub fn with_term(&self, term: PauliTerm) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.push(term);
        Self::from_terms(self.n_qubits, terms)
    }

    pub fn average_weight(&self, include_identity: bool) -> Result<f64> {
        let weights: Vec<usize> = self
            .terms
            .iter()
            .filter(|t| include_identity || !t.string.is_identity())
            .map(|t| t.string.weight())
            .collect();
        if weights.is_empty() {
            return Err(Error::EmptySum);
        }
        Ok(weights.iter().sum::<usize>() as f64 / weights.len() as f64)
    }

    /// Text form: one `coefficient<TAB>string` line per term.
    pub fn to_text(&self) -> String {
        self.terms.iter().map(|t| format!("{}\t{}\n", t.coefficient, t.string)).collect()
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n_qubits = None;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (coef, string) = line
                .split_once('\t')
                .ok_or_else(|| Error::Parse { line: line_no, msg: "expected coefficient<TAB>string".into() })?;
            let coefficient: f64 = coef
                .parse()
                .map_err(|e| Error::Parse { line: line_no, msg: format!("bad coefficient {coef:?}: {e}") })?;
            let string: PauliString = string
                .parse()
                .map_err(|e: Error| Error::Parse { line: line_no, msg: e.to_string() })?;
            match n_qubits {
                None => n_qubits = Some(string.len()),
                Some(n) if n != string.len() => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("string {string} has {} qubits, expected {n}", string.len()),
                    })
                }
                _ => {}
            }
            terms.push(PauliTerm::new(coefficient, string));
        }
        let n = n_qubits.ok_or(Error::Parse { line: 0, msg: "no terms".into() })?;
        Self::from_terms(n, terms)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

//! Gate counts for the product-of-exponentials circuits used by the OS
//! (controlled) and CF (uncontrolled) algorithms.
//!
//! A Pauli exponential of weight `w` costs `2(w−1)` entangling gates, two
//! basis changes per X or Y symbol and one central rotation. Controlling it
//! turns the rotation into a single two-qubit gate.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hubbard::{qubit_hamiltonian, Boundary, HubbardModel};
use crate::pauli::{PauliString, PauliSum, PauliTerm};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitKind {
    Os,
    Cf,
}

impl CircuitKind {
    pub fn controlled(self) -> bool {
        matches!(self, CircuitKind::Os)
    }

    pub fn name(self) -> &'static str {
        match self {
            CircuitKind::Os => "OS",
            CircuitKind::Cf => "CF",
        }
    }
}

/// `(one_qubit, two_qubit)` for `e^{iθP}`, optionally controlled by an ancilla.
pub fn exp_gate_cost(p: &PauliString, controlled: bool) -> Result<(u64, u64)> {
    let w = p.weight() as u64;
    if w == 0 {
        return Err(Error::ZeroWeight);
    }
    let basis = 2 * p.xy_count() as u64;
    let entanglers = 2 * (w - 1);
    Ok(if controlled { (basis, entanglers + 1) } else { (basis + 1, entanglers) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCost {
    pub string: PauliString,
    pub one_qubit: u64,
    pub two_qubit: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCountReport {
    pub algorithm: CircuitKind,
    pub depth: u64,
    pub one_qubit: u64,
    pub two_qubit: u64,
    /// `one_qubit + two_qubit`.
    pub total_depth: u64,
    /// Cost of a single layer, term by term.
    pub per_term: Vec<TermCost>,
}

pub fn count(h: &PauliSum, algorithm: CircuitKind, depth: u64) -> Result<GateCountReport> {
    let per_term = h
        .non_identity_terms()
        .map(|t| {
            let (one_qubit, two_qubit) = exp_gate_cost(&t.string, algorithm.controlled())?;
            Ok(TermCost { string: t.string.clone(), one_qubit, two_qubit })
        })
        .collect::<Result<Vec<_>>>()?;
    if per_term.is_empty() {
        return Err(Error::EmptySum);
    }
    let one_qubit = depth * per_term.iter().map(|c| c.one_qubit).sum::<u64>();
    let two_qubit = depth * per_term.iter().map(|c| c.two_qubit).sum::<u64>();
    Ok(GateCountReport { algorithm, depth, one_qubit, two_qubit, total_depth: one_qubit + two_qubit, per_term })
}

pub fn os_count(h: &PauliSum, d1: u64) -> Result<GateCountReport> {
    count(h, CircuitKind::Os, d1)
}

pub fn cf_count(h: &PauliSum, d2: u64) -> Result<GateCountReport> {
    count(h, CircuitKind::Cf, d2)
}

fn weight_sum(h: &PauliSum) -> Result<(i64, i64)> {
    let weights: Vec<i64> = h.non_identity_terms().map(|t| t.string.weight() as i64).collect();
    if weights.is_empty() {
        return Err(Error::EmptySum);
    }
    Ok((weights.iter().sum(), weights.len() as i64))
}

/// Average weight of the non-identity terms, as an exact fraction.
pub fn average_weight(h: &PauliSum) -> Result<Ratio<i64>> {
    let (sum, n) = weight_sum(h)?;
    Ok(Ratio::new(sum, n))
}

/// Controlled-circuit entangler count `d1·n_p·(2(w̄−1)+1)`.
pub fn os_two_qubit_closed_form(h: &PauliSum, d1: u64) -> Result<Ratio<i64>> {
    let (_, n_p) = weight_sum(h)?;
    let w = average_weight(h)?;
    Ok(Ratio::from_integer(d1 as i64 * n_p) * ((w - 1) * 2 + 1))
}

/// Uncontrolled-circuit entangler count `d2·n_p·2(w̄−1)`.
pub fn cf_two_qubit_closed_form(h: &PauliSum, d2: u64) -> Result<Ratio<i64>> {
    let (_, n_p) = weight_sum(h)?;
    let w = average_weight(h)?;
    Ok(Ratio::from_integer(d2 as i64 * n_p) * ((w - 1) * 2))
}

/// Depth ratio `d2/d1` above which the controlled circuits use fewer
/// entanglers: `1 + 1/(2(w̄−1))`.
pub fn advantage_threshold_for(w_bar: f64) -> Result<f64> {
    if !w_bar.is_finite() || w_bar <= 1.0 {
        return Err(Error::WeightTooSmall(w_bar));
    }
    Ok(1.0 + 1.0 / (2.0 * (w_bar - 1.0)))
}

pub fn advantage_threshold(h: &PauliSum) -> Result<f64> {
    let w = average_weight(h)?;
    advantage_threshold_for(*w.numer() as f64 / *w.denom() as f64)
}

/// Average non-identity weight of the open `n`-site chain,
/// `(14n − 12)/(5n − 4)`.
pub fn chain_weight_formula(n: usize) -> Result<Ratio<i64>> {
    if n < 2 {
        return Err(Error::InvalidModel(format!("chain needs at least 2 sites, got {n}")));
    }
    let n = n as i64;
    Ok(Ratio::new(14 * n - 12, 5 * n - 4))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub model: String,
    pub algorithm: CircuitKind,
    pub depth: u64,
    pub one_qubit: u64,
    pub two_qubit: u64,
    pub total_depth: u64,
}

/// Published gate-count table: (model, algorithm, depth, 1q, 2q, depth).
pub const PUBLISHED_TABLE: [(&str, CircuitKind, u64, u64, u64, u64); 9] = [
    ("2-site", CircuitKind::Os, 1, 4, 5, 9),
    ("2-site", CircuitKind::Cf, 1, 22, 20, 42),
    ("2-site", CircuitKind::Cf, 2, 44, 40, 84),
    ("3-site", CircuitKind::Os, 3, 96, 147, 243),
    ("3-site", CircuitKind::Cf, 3, 129, 114, 243),
    ("3-site", CircuitKind::Cf, 5, 160, 190, 350),
    ("4-site", CircuitKind::Os, 3, 192, 372, 564),
    ("4-site", CircuitKind::Cf, 4, 336, 416, 752),
    ("4-site", CircuitKind::Cf, 5, 420, 520, 940),
];

pub fn published_table() -> Vec<TableRow> {
    PUBLISHED_TABLE
        .iter()
        .map(|&(model, algorithm, depth, one_qubit, two_qubit, total_depth)| TableRow {
            model: model.to_string(),
            algorithm,
            depth,
            one_qubit,
            two_qubit,
            total_depth,
        })
        .collect()
}

/// Hamiltonians behind the table: open dimer, open 3-site chain and
/// periodic 4-site ring, all at `τ = 1`, `U = 3`.
pub fn table_models() -> Result<Vec<(String, PauliSum)>> {
    let models = [
        ("2-site", HubbardModel::dimer(1.0, 3.0)),
        ("3-site", HubbardModel::new(3, 1.0, 3.0, Boundary::Open)?),
        ("4-site", HubbardModel::new(4, 1.0, 3.0, Boundary::Periodic)?),
    ];
    models.into_iter().map(|(name, m)| Ok((name.to_string(), qubit_hamiltonian(&m)?))).collect()
}

/// Recomputes every row of the published table. The dimer OS circuit is the
/// single-exponential symmetry propagator, so it is counted on the lone
/// `XZXI` term.
pub fn benchmark_table() -> Result<Vec<TableRow>> {
    let models = table_models()?;
    let dimer_os = PauliSum::from_terms(4, [PauliTerm::new(1.0, "XZXI".parse()?)])?;
    PUBLISHED_TABLE
        .iter()
        .map(|&(model, algorithm, depth, ..)| {
            let h = if model == "2-site" && algorithm == CircuitKind::Os {
                &dimer_os
            } else {
                &models.iter().find(|(name, _)| name == model).expect("known model").1
            };
            let r = count(h, algorithm, depth)?;
            Ok(TableRow {
                model: model.to_string(),
                algorithm,
                depth,
                one_qubit: r.one_qubit,
                two_qubit: r.two_qubit,
                total_depth: r.total_depth,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_exponential_costs() {
        assert_eq!(exp_gate_cost(&ps("XZXI"), true).unwrap(), (4, 5));
        assert_eq!(exp_gate_cost(&ps("XZXI"), false).unwrap(), (5, 4));
        assert_eq!(exp_gate_cost(&ps("ZZ"), false).unwrap(), (1, 2));
        assert_eq!(exp_gate_cost(&ps("IIII"), false), Err(Error::ZeroWeight));
    }

    #[test]
    fn dimer_rows() {
        let models = table_models().unwrap();
        let h = &models[0].1;
        let r = cf_count(h, 1).unwrap();
        assert_eq!((r.one_qubit, r.two_qubit, r.total_depth), (22, 20, 42));
        let r = cf_count(h, 2).unwrap();
        assert_eq!((r.one_qubit, r.two_qubit, r.total_depth), (44, 40, 84));
        assert_eq!(r.per_term.len(), 6);
    }

    #[test]
    fn closed_forms_match_enumeration() {
        for (_, h) in table_models().unwrap() {
            for d in 1..=5 {
                assert_eq!(os_two_qubit_closed_form(&h, d).unwrap(), Ratio::from_integer(os_count(&h, d).unwrap().two_qubit as i64));
                assert_eq!(cf_two_qubit_closed_form(&h, d).unwrap(), Ratio::from_integer(cf_count(&h, d).unwrap().two_qubit as i64));
            }
        }
    }

    #[test]
    fn thresholds_and_weights() {
        assert!((advantage_threshold_for(2.8).unwrap() - 1.2778).abs() < 1e-4);
        assert!((advantage_threshold_for(1e12).unwrap() - 1.0).abs() < 1e-9);
        assert!(advantage_threshold_for(1.0).is_err());
        let h = &table_models().unwrap()[0].1;
        assert!((advantage_threshold(h).unwrap() - 1.3).abs() < 1e-12);
        assert_eq!(chain_weight_formula(2).unwrap(), Ratio::new(8, 3));
        assert_eq!(chain_weight_formula(3).unwrap(), Ratio::new(30, 11));
        assert!((*chain_weight_formula(100_000).unwrap().numer() as f64 / *chain_weight_formula(100_000).unwrap().denom() as f64 - 2.8).abs() < 1e-4);
        assert!(chain_weight_formula(1).is_err());
    }

    #[test]
    fn chain_formula_matches_constructed_hamiltonians() {
        for n in 2..=4 {
            let h = qubit_hamiltonian(&HubbardModel::new(n, 1.0, 3.0, Boundary::Open).unwrap()).unwrap();
            assert_eq!(average_weight(&h).unwrap(), chain_weight_formula(n).unwrap(), "n = {n}");
        }
    }
}

//! Property tests against independent dense and Fock-space oracles.

use greenvqs::exact::{dense_matrix, dense_operator, ComplexMatrix};
use greenvqs::spectral::{energy_shift, find_poles, parseval_residual, transform};
use greenvqs::vqs::{assemble_geometric, assemble_system, ExponentConvention};
use greenvqs::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn single(p: Pauli) -> ComplexMatrix {
    let entries = match p {
        Pauli::I => [ONE, ZERO, ZERO, ONE],
        Pauli::X => [ZERO, ONE, ONE, ZERO],
        Pauli::Y => [ZERO, -I, I, ZERO],
        Pauli::Z => [ONE, ZERO, ZERO, -ONE],
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// Kronecker product with qubit 1 as the least significant index bit.
fn kron_oracle(p: &PauliString) -> ComplexMatrix {
    p.symbols().iter().fold(DMatrix::from_element(1, 1, ONE), |acc, &s| single(s).kronecker(&acc))
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn pauli() -> impl Strategy<Value = Pauli> {
    prop::sample::select(Pauli::ALL.to_vec())
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(pauli(), n).prop_map(PauliString::new)
}

fn string_pair() -> impl Strategy<Value = (PauliString, PauliString)> {
    (1usize..=4).prop_flat_map(|n| (pauli_string(n), pauli_string(n)))
}

fn state(n: usize) -> impl Strategy<Value = QubitState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(move |v| QubitState::normalized(n, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

/// `c_j` on the Fock space, with the sign counting occupied orbitals before `j`.
fn fock_annihilator(n_modes: usize, j: usize) -> ComplexMatrix {
    let dim = 1 << n_modes;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for b in 0..dim {
        if b >> j & 1 == 1 {
            let parity = (b & ((1 << j) - 1)).count_ones();
            m[(b ^ (1 << j), b)] = if parity.is_multiple_of(2) { ONE } else { -ONE };
        }
    }
    m
}

fn fock_hamiltonian(model: &HubbardModel) -> ComplexMatrix {
    let n = model.n_qubits();
    let c: Vec<ComplexMatrix> = (0..n).map(|j| fock_annihilator(n, j)).collect();
    let number = |j: usize| c[j].adjoint() * &c[j];
    let mut h = ComplexMatrix::zeros(1 << n, 1 << n);
    let sites = model.n_sites();
    let mut bonds: Vec<(usize, usize)> = (1..sites).map(|s| (s, s + 1)).collect();
    if model.boundary() == Boundary::Periodic {
        bonds.push((sites, 1));
    }
    for (a, b) in bonds {
        for spin in [Spin::Up, Spin::Down] {
            let (i, j) = (model.mode(a, spin).unwrap(), model.mode(b, spin).unwrap());
            let hop = c[i].adjoint() * &c[j];
            h -= (&hop + hop.adjoint()) * Complex64::new(model.tau(), 0.0);
        }
    }
    for s in 1..=sites {
        let (up, dn) = (number(model.mode(s, Spin::Up).unwrap()), number(model.mode(s, Spin::Down).unwrap()));
        h += (&up * &dn - (&up + &dn) * Complex64::new(0.5, 0.0)) * Complex64::new(model.u(), 0.0);
    }
    h
}

fn model() -> impl Strategy<Value = HubbardModel> {
    (2usize..=3, -2.0f64..2.0, -4.0f64..4.0, any::<bool>()).prop_map(|(n, tau, u, periodic)| {
        let boundary = if periodic && n > 2 { Boundary::Periodic } else { Boundary::Open };
        HubbardModel::new(n, tau, u, boundary).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_matches_kronecker((a, b) in string_pair()) {
        let (phase, c) = a.multiply(&b).unwrap();
        let lhs = kron_oracle(&a) * kron_oracle(&b);
        let rhs = kron_oracle(&c) * phase.to_complex();
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-14);
    }

    #[test]
    fn commutation_matches_dense((a, b) in string_pair()) {
        let (ma, mb) = (kron_oracle(&a), kron_oracle(&b));
        let commutator = max_abs(&(&ma * &mb - &mb * &ma));
        prop_assert_eq!(a.commutes_with(&b).unwrap(), commutator < 1e-14);
    }

    #[test]
    fn multiplication_associates(
        (a, b, c) in (1usize..=4).prop_flat_map(|n| (pauli_string(n), pauli_string(n), pauli_string(n)))
    ) {
        let (p1, ab) = a.multiply(&b).unwrap();
        let (p2, left) = ab.multiply(&c).unwrap();
        let (q1, bc) = b.multiply(&c).unwrap();
        let (q2, right) = a.multiply(&bc).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!((p1.to_complex() * p2.to_complex() - q1.to_complex() * q2.to_complex()).norm() < 1e-15);
    }

    #[test]
    fn pauli_action_matches_dense((p, s) in (1usize..=4).prop_flat_map(|n| (pauli_string(n), state(n)))) {
        let dense = kron_oracle(&p) * nalgebra::DVector::from_column_slice(s.amplitudes());
        let applied = s.apply_pauli(&p).unwrap();
        let gap = applied.amplitudes().iter().zip(dense.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(gap < 1e-14);
        let sum = PauliSum::from_terms(p.len(), [PauliTerm::new(1.0, p.clone())]).unwrap();
        prop_assert!(max_abs(&(dense_matrix(&sum).unwrap() - kron_oracle(&p))) < 1e-15);
    }

    #[test]
    fn exponentials_preserve_norm((p, s, theta) in (1usize..=5).prop_flat_map(|n| (pauli_string(n), state(n), -10.0f64..10.0))) {
        let rotated = s.apply_pauli_exponential(theta, &p).unwrap();
        prop_assert!((rotated.norm() - 1.0).abs() < 1e-12);
        let expected = s.scaled(Complex64::new(theta.cos(), 0.0)).amplitudes().iter()
            .zip(s.apply_pauli(&p).unwrap().amplitudes())
            .map(|(a, b)| a + Complex64::new(0.0, theta.sin()) * b)
            .collect::<Vec<_>>();
        let gap = rotated.amplitudes().iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(gap < 1e-12);
    }

    #[test]
    fn ladder_operators_match_fock_space(m in model()) {
        let n = m.n_qubits();
        for site in 1..=m.n_sites() {
            for spin in [Spin::Up, Spin::Down] {
                let mode = m.mode(site, spin).unwrap();
                let c = dense_operator(&ladder_operator(&m, site, spin, LadderKind::Annihilation).unwrap()).unwrap();
                prop_assert!(max_abs(&(&c - fock_annihilator(n, mode))) < 1e-14);
                let cd = dense_operator(&ladder_operator(&m, site, spin, LadderKind::Creation).unwrap()).unwrap();
                prop_assert!(max_abs(&(&cd - c.adjoint())) < 1e-14);
            }
        }
    }

    #[test]
    fn canonical_anticommutation(m in model()) {
        let n = m.n_qubits();
        let ops: Vec<ComplexMatrix> = (1..=m.n_sites())
            .flat_map(|s| [Spin::Up, Spin::Down].map(|spin| (s, spin)))
            .map(|(s, spin)| dense_operator(&ladder_operator(&m, s, spin, LadderKind::Annihilation).unwrap()).unwrap())
            .collect();
        let identity = ComplexMatrix::identity(1 << n, 1 << n);
        for (a, ca) in ops.iter().enumerate() {
            for (b, cb) in ops.iter().enumerate() {
                let mixed = ca * cb.adjoint() + cb.adjoint() * ca;
                let expected = if a == b { identity.clone() } else { ComplexMatrix::zeros(1 << n, 1 << n) };
                prop_assert!(max_abs(&(mixed - expected)) < 1e-14);
                prop_assert!(max_abs(&(ca * cb + cb * ca)) < 1e-14);
            }
        }
    }

    #[test]
    fn hamiltonian_matches_fermionic_oracle(m in model()) {
        let h = qubit_hamiltonian(&m).unwrap();
        prop_assert!(max_abs(&(dense_matrix(&h).unwrap() - fock_hamiltonian(&m))) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tangents_match_finite_differences(
        depth in 1usize..=2,
        plus_i in any::<bool>(),
        theta_seed in prop::collection::vec(-3.0f64..3.0, 12),
        s0 in state(4),
        k in 0usize..12,
    ) {
        let h = qubit_hamiltonian(&HubbardModel::dimer(1.0, 3.0)).unwrap();
        let convention = if plus_i { ExponentConvention::PlusI } else { ExponentConvention::MinusI };
        let a = VhaAnsatz::from_hamiltonian(&h, depth).unwrap().with_convention(convention);
        let theta = theta_seed[..a.n_parameters()].to_vec();
        let k = k % a.n_parameters();
        let eps = 1e-6;
        let shifted = |d: f64| {
            let mut t = theta.clone();
            t[k] += d;
            a.apply(&t, &s0).unwrap()
        };
        let (plus, minus) = (shifted(eps), shifted(-eps));
        let (_, tangents) = a.state_and_tangents(&theta, &s0).unwrap();
        let gap = tangents[k].amplitudes().iter()
            .zip(plus.amplitudes().iter().zip(minus.amplitudes()))
            .map(|(t, (p, q))| (t - (p - q) / (2.0 * eps)).norm())
            .fold(0.0, f64::max);
        prop_assert!(gap < 1e-8, "{}", gap);
        let phi = a.apply(&theta, &s0).unwrap();
        prop_assert!((phi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mclachlan_forms_agree(
        theta_seed in prop::collection::vec(-3.0f64..3.0, 12),
        s0 in state(4),
    ) {
        let h = qubit_hamiltonian(&HubbardModel::dimer(1.0, 3.0)).unwrap();
        let a = VhaAnsatz::from_hamiltonian(&h, 2).unwrap();
        let raw = assemble_system(&a, &theta_seed, &s0, &h).unwrap();
        let geo = assemble_geometric(&a, &theta_seed, &s0, &h).unwrap();
        prop_assert!((&raw.m - &geo.m).amax() < 1e-10);
        prop_assert!((&raw.v - &geo.v).amax() < 1e-10);
        prop_assert!(raw.asymmetry() < 1e-12);
        prop_assert!(raw.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn spectra_keep_parseval_and_shift_round_trip(
        amps in prop::collection::vec((-1.0f64..1.0, 0.5f64..4.0), 1..4),
        delta in -0.5f64..0.5,
    ) {
        let grid = TimeGrid::with_steps(0.05, 400).unwrap();
        let values = grid.times().into_iter().map(|t| {
            amps.iter().map(|&(w, e)| Complex64::new(0.0, -w) * Complex64::from_polar(1.0, -e * t)).sum()
        }).collect();
        let g = GreensSeries::new("synthetic", GreensKind::Retarded, Algorithm::Exact, &grid, values).unwrap();
        let s = transform(&g, 20.0, 0.0).unwrap();
        prop_assert!(parseval_residual(&s, &g) < 1e-8);
        let back = energy_shift(&energy_shift(&s, 0.0, delta).unwrap(), delta, 0.0).unwrap();
        let (before, after) = (find_poles(&s, 1.0), find_poles(&back, 1.0));
        prop_assert_eq!(before.len(), after.len());
        for (p, q) in before.iter().zip(&after) {
            prop_assert!((p.omega - q.omega).abs() < 1e-9);
        }
    }
}

//! McLachlan variational simulation over the Hamiltonian variational ansatz.

mod ansatz;
mod evolve;
mod system;

pub use ansatz::{ExponentConvention, VhaAnsatz};
pub use evolve::{evolve, evolve_with, trotter_propagate, EvolveOptions, Integrator, VqsTrajectory};
pub use system::{
    assemble_geometric, assemble_system, global_phase_rate, projected_tangents, solve_velocities, solve_with,
    SolverSettings, Velocities, VqsLinearSystem, DEFAULT_RCOND, DEFAULT_REGULARIZATION,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{ground_state, GroundStateSelector, SpectralDecomposition};
    use crate::hubbard::{qubit_hamiltonian, HubbardModel};
    use crate::pauli::{PauliString, PauliSum};
    use crate::statevector::QubitState;
    use nalgebra::{DMatrix, DVector};
    use num_complex::Complex64;

    fn dimer() -> PauliSum {
        qubit_hamiltonian(&HubbardModel::dimer(1.0, 3.0)).unwrap()
    }

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn excited_start(h: &PauliSum) -> QubitState {
        let (_, g) = ground_state(h, GroundStateSelector::Canonical).unwrap();
        g.apply_pauli(&ps("XZXI")).unwrap()
    }

    #[test]
    fn tangent_matches_finite_difference() {
        let h = dimer();
        let a = VhaAnsatz::from_hamiltonian(&h, 2).unwrap();
        let s0 = excited_start(&h);
        let theta: Vec<f64> = (0..a.n_parameters()).map(|k| 0.1 * k as f64 - 0.25).collect();
        let eps = 1e-6;
        for (d, m) in [(0, 0), (0, 3), (1, 5)] {
            let k = a.index(d, m).unwrap();
            let mut plus = theta.clone();
            plus[k] += eps;
            let mut minus = theta.clone();
            minus[k] -= eps;
            let fd: Vec<Complex64> = a
                .apply(&plus, &s0)
                .unwrap()
                .amplitudes()
                .iter()
                .zip(a.apply(&minus, &s0).unwrap().amplitudes())
                .map(|(p, q)| (p - q) / (2.0 * eps))
                .collect();
            let t = a.tangent_state(&theta, d, m, &s0).unwrap();
            let err = t.amplitudes().iter().zip(&fd).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-8, "({d},{m}) {err}");
        }
    }

    #[test]
    fn batch_tangents_agree_with_single() {
        let h = dimer();
        let a = VhaAnsatz::from_hamiltonian(&h, 2).unwrap().with_convention(ExponentConvention::PlusI);
        let s0 = excited_start(&h);
        let theta: Vec<f64> = (0..a.n_parameters()).map(|k| (k as f64).sin()).collect();
        let (_, all) = a.state_and_tangents(&theta, &s0).unwrap();
        for d in 0..2 {
            for m in 0..6 {
                let single = a.tangent_state(&theta, d, m, &s0).unwrap();
                assert!(single.distance(&all[a.index(d, m).unwrap()]).unwrap() < 1e-13);
            }
        }
    }

    #[test]
    fn overlaps_purely_imaginary_and_forms_agree() {
        let h = dimer();
        let a = VhaAnsatz::from_hamiltonian(&h, 2).unwrap();
        let s0 = excited_start(&h);
        let theta: Vec<f64> = (0..a.n_parameters()).map(|k| 0.3 * (k as f64).cos()).collect();
        let (phi, tangents) = a.state_and_tangents(&theta, &s0).unwrap();
        for t in &tangents {
            assert!(t.inner(&phi).unwrap().re.abs() < 1e-13);
        }
        for t in projected_tangents(&phi, &tangents) {
            assert!(t.inner(&phi).unwrap().norm() < 1e-13);
        }
        let raw = assemble_system(&a, &theta, &s0, &h).unwrap();
        let geo = assemble_geometric(&a, &theta, &s0, &h).unwrap();
        assert!((&raw.m - &geo.m).amax() < 1e-10);
        assert!((&raw.v - &geo.v).amax() < 1e-10);
        assert!(raw.asymmetry() < 1e-10);
        assert!(raw.min_eigenvalue() > -1e-9);
    }

    #[test]
    fn identity_system_and_eigenstate() {
        let sys = VqsLinearSystem {
            m: DMatrix::identity(3, 3),
            v: DVector::from_vec(vec![1.0, -2.0, 0.5]),
            regularization: 0.0,
            overlaps: vec![0.0; 3],
            energy: 0.0,
        };
        let v = solve_velocities(&sys).unwrap();
        assert_eq!(v.theta_dot, vec![1.0, -2.0, 0.5]);

        let h = dimer();
        let (e0, g) = ground_state(&h, GroundStateSelector::Canonical).unwrap();
        let a = VhaAnsatz::from_hamiltonian(&h, 1).unwrap();
        let theta = vec![0.0; a.n_parameters()];
        let sys = assemble_system(&a, &theta, &g, &h).unwrap();
        let v = solve_velocities(&sys).unwrap();
        assert!(v.theta_dot.iter().all(|x| x.abs() < 1e-8), "{v:?} {sys:?}");
        let rate = global_phase_rate(&a, &theta, &v.theta_dot, &g, &h).unwrap();
        assert!((rate + e0).abs() < 1e-8);
    }

    #[test]
    fn rank_deficient_minimum_norm() {
        // M = [[1,1],[1,1]], V = [1,1]: minimum-norm solution (1/2,1/2).
        let sys = VqsLinearSystem {
            m: DMatrix::from_element(2, 2, 1.0),
            v: DVector::from_vec(vec![1.0, 1.0]),
            regularization: DEFAULT_REGULARIZATION,
            overlaps: vec![0.0; 2],
            energy: 0.0,
        };
        let v = solve_velocities(&sys).unwrap();
        assert!((v.theta_dot[0] - 0.5).abs() < 1e-7 && (v.theta_dot[1] - 0.5).abs() < 1e-7, "{v:?}");
        assert!(v.residual <= 1e-8);
    }

    #[test]
    fn shift_changes_phase_rate_only() {
        let h = dimer();
        let a = VhaAnsatz::from_hamiltonian(&h, 1).unwrap();
        let s0 = excited_start(&h);
        let theta = vec![0.1; a.n_parameters()];
        let td = vec![0.2; a.n_parameters()];
        let r1 = global_phase_rate(&a, &theta, &td, &s0, &h).unwrap();
        let r2 = global_phase_rate(&a, &theta, &td, &s0, &h.shifted(0.7).unwrap()).unwrap();
        assert!((r1 - r2 - 0.7).abs() < 1e-12);
    }

    fn generic_state(n: usize) -> QubitState {
        let amps = (0..1usize << n).map(|k| Complex64::new((1.3 * k as f64 + 0.2).sin(), (0.7 * k as f64).cos())).collect();
        QubitState::normalized(n, amps).unwrap()
    }

    #[test]
    fn small_time_slope_follows_coefficients() {
        // A generic state keeps M nonsingular, so θ̇(0) = c is the unique solution
        // and θ(dt)/dt − c shrinks linearly with dt.
        let h = dimer();
        let s0 = generic_state(4);
        for (convention, sign) in [(ExponentConvention::MinusI, 1.0), (ExponentConvention::PlusI, -1.0)] {
            let a = VhaAnsatz::from_hamiltonian(&h, 1).unwrap().with_convention(convention);
            let slope_error = |dt: f64| {
                let traj = evolve(&a, &s0, &h, dt, dt, Integrator::Rk4).unwrap();
                a.generators()
                    .iter()
                    .enumerate()
                    .map(|(m, g)| (traj.theta[1][m] / dt - sign * g.coefficient).abs())
                    .fold(0.0, f64::max)
            };
            let (coarse, fine) = (slope_error(1e-3), slope_error(1e-4));
            assert!(coarse < 1e-3, "{convention:?}: {coarse}");
            assert!(fine < coarse / 5.0, "{convention:?}: {fine} vs {coarse}");
        }
    }

    #[test]
    fn ground_state_stays_put() {
        let h = dimer();
        let (e0, g) = ground_state(&h, GroundStateSelector::Canonical).unwrap();
        let a = VhaAnsatz::from_hamiltonian(&h, 2).unwrap();
        let traj = evolve(&a, &g, &h, 1.0, 0.05, Integrator::Rk4).unwrap();
        for k in 0..traj.len() {
            assert!(traj.variational_state(k).unwrap().distance(&g).unwrap() < 1e-8);
        }
        assert!((traj.theta0[traj.len() - 1] + e0).abs() < 1e-8);
    }

    #[test]
    fn dimer_depth_two_tracks_exact() {
        let h = dimer();
        let s0 = excited_start(&h);
        let spec = SpectralDecomposition::new(&h).unwrap();
        let a = VhaAnsatz::from_hamiltonian(&h, 2).unwrap();
        let traj = evolve(&a, &s0, &h, 4.0 * std::f64::consts::PI, 4.0 * std::f64::consts::PI / 200.0, Integrator::Rk4)
            .unwrap();
        for (k, t) in traj.times().into_iter().enumerate() {
            let exact = spec.propagate(t, &s0).unwrap();
            let f = exact.inner(&traj.state(k).unwrap()).unwrap().norm();
            assert!(f >= 0.999, "t={t} fidelity {f}");
        }
    }

    #[test]
    fn trotter_error_halves() {
        let h = dimer();
        let s0 = excited_start(&h);
        let spec = SpectralDecomposition::new(&h).unwrap();
        let exact = spec.propagate(1.0, &s0).unwrap();
        let err = |n| trotter_propagate(&h, 1.0, n, &s0).unwrap().distance(&exact).unwrap();
        let ratio = err(64) / err(128);
        assert!((ratio - 2.0).abs() < 0.1, "{ratio}");
        let commuting = PauliSum::parse_text("0.5\tZZII\n-0.3\tIIZZ\n1.0\tIIII\n").unwrap();
        let direct = spec_of(&commuting).propagate(0.7, &s0).unwrap();
        assert!(trotter_propagate(&commuting, 0.7, 1, &s0).unwrap().distance(&direct).unwrap() < 1e-12);
    }

    fn spec_of(h: &PauliSum) -> SpectralDecomposition {
        SpectralDecomposition::new(h).unwrap()
    }

    #[test]
    fn product_formula_parameters_reproduce_trotter() {
        let h = dimer();
        let s0 = excited_start(&h);
        let a = VhaAnsatz::from_hamiltonian(&h, 3).unwrap();
        let via_ansatz = a.apply(&a.product_formula_parameters(0.8), &s0).unwrap();
        let via_trotter = trotter_propagate(&h, 0.8, 3, &s0).unwrap().with_phase(h.identity_coefficient() * 0.8);
        assert!(via_ansatz.distance(&via_trotter).unwrap() < 1e-12);
    }
}

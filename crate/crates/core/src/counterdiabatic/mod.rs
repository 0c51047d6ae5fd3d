//! Counter-diabatic driving: variational and exact adiabatic gauge potentials,
//! the assisted Hamiltonian `H + dlambda/dt A`, and its high-frequency
//! replacement built only from `H` and `dH/dlambda`.

mod drive;
mod expansion;
mod gauge;
mod protocols;

pub use drive::{
    beta_coefficients, h_cd_generator, h_floquet_generator, CdGenerator, CdMode, FloquetConfig, FloquetGenerator,
    MIN_FLOQUET_RATIO,
};
pub use expansion::{GaugeExpansion, UniformCubic, GAUGE_GRID_POINTS};
pub use gauge::{
    action, gauge_exact, gauge_variational, nested_commutator_basis, solve_alphas, AlphaSolution,
    GAUGE_DEGENERACY_TOL, MAX_ORDER, MAX_TERMS,
};
pub use protocols::{
    compare_protocols, fidelity_comparison, run_protocol, FidelityComparison, Protocol, ProtocolConfig, ProtocolRun,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Generator;
    use crate::models::{Family, ModelSpec, Schedule};
    use crate::operator::{DenseOperator, LinearOperator, OperatorSum, PauliTerm};
    use crate::C64;

    fn sum(sites: usize, terms: &[(f64, &str)]) -> OperatorSum {
        OperatorSum::from_terms(sites, terms.iter().map(|(c, s)| PauliTerm::parse(*c, s).unwrap())).unwrap()
    }

    fn ising(n: usize) -> ModelSpec {
        ModelSpec::new(Family::Ising, n, Schedule::Oscillating)
    }

    fn dense_diff(a: &DenseOperator, b: &DenseOperator) -> f64 {
        a.combine(1.0, b, -1.0).unwrap().max_abs()
    }

    #[test]
    fn first_commutator_of_z_and_x() {
        let basis = nested_commutator_basis(&sum(1, &[(1.0, "Z")]), &sum(1, &[(1.0, "X")]), 1).unwrap();
        let y = basis[0].coefficient(&"Y".parse().unwrap());
        assert!((y - C64::new(0.0, 2.0)).norm() < 1e-15);
        assert_eq!(basis[0].len(), 1);
    }

    #[test]
    fn commuting_inputs_give_empty_basis() {
        let h = sum(2, &[(1.0, "ZI"), (0.5, "IZ")]);
        let dh = sum(2, &[(2.0, "ZZ")]);
        let basis = nested_commutator_basis(&h, &dh, 2).unwrap();
        assert!(basis.iter().all(|o| o.is_empty()));
        let sol = solve_alphas(&h.scale(0.3), &h, 1).unwrap();
        assert!(sol.commuting);
        assert_eq!(sol.alphas, vec![0.0]);
        assert!(nested_commutator_basis(&h, &dh, 3).is_err());
    }

    #[test]
    fn second_order_term_matches_dense_nesting() {
        let model = ising(3);
        let expansion = GaugeExpansion::build_with_points(&model, 2, 5).unwrap();
        let (h, dh) = expansion.hamiltonian(0.3).unwrap();
        let basis = nested_commutator_basis(&h, &dh, 2).unwrap();
        let (hd, dhd) = (h.to_dense().unwrap(), dh.to_dense().unwrap());
        let mut nested = hd.commutator(&dhd).unwrap();
        assert!(dense_diff(&basis[0].to_dense().unwrap(), &nested) < 1e-10);
        for _ in 0..2 {
            nested = hd.commutator(&nested).unwrap();
        }
        assert!(dense_diff(&basis[1].to_dense().unwrap(), &nested) < 1e-10);
        for o in &basis {
            assert!(o.anti_hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn two_level_first_order_is_exact() {
        for i in 1..=9 {
            let l = i as f64 / 10.0;
            let h = sum(1, &[(1.0 - l, "Z"), (l, "X")]);
            let dh = sum(1, &[(-1.0, "Z"), (1.0, "X")]);
            let sol = solve_alphas(&h, &dh, 1).unwrap();
            assert!(sol.residual < 1e-10);
            let var = gauge_variational(&h, &dh, &sol.alphas).unwrap().to_dense().unwrap();
            let exact = gauge_exact(&h.to_dense().unwrap(), &dh.to_dense().unwrap()).unwrap();
            assert!(dense_diff(&var, &exact) < 1e-10, "lambda={l}");
        }
    }

    #[test]
    fn two_level_gauge_closed_form() {
        // tan theta = l / (1 - l), A = (1/2) dtheta/dl sigma_y
        let l: f64 = 0.5;
        let h = sum(1, &[(1.0 - l, "Z"), (l, "X")]).to_dense().unwrap();
        let dh = sum(1, &[(-1.0, "Z"), (1.0, "X")]).to_dense().unwrap();
        let dtheta = 1.0 / ((1.0 - l).powi(2) + l * l);
        let expected = sum(1, &[(0.5 * dtheta, "Y")]).to_dense().unwrap();
        let a = gauge_exact(&h, &dh).unwrap();
        assert!(dense_diff(&a, &expected) < 1e-10 || dense_diff(&a, &expected.scale(-1.0)) < 1e-10);
        assert!(a.hermiticity_defect() < 1e-14);
        for i in 0..2 {
            assert!(a.get(i, i).norm() < 1e-14);
        }
    }

    #[test]
    fn gauge_of_h_itself_vanishes() {
        let h = ising(3).dense_hamiltonian(0.4).unwrap();
        assert!(gauge_exact(&h.scale(1.0), &h).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn second_order_action_is_lower() {
        let expansion1 = GaugeExpansion::build_with_points(&ising(4), 1, 5).unwrap();
        for i in 0..=10 {
            let l = i as f64 / 10.0;
            let (h, dh) = expansion1.hamiltonian(l).unwrap();
            let s1 = solve_alphas(&h, &dh, 1).unwrap();
            let s2 = solve_alphas(&h, &dh, 2).unwrap();
            assert!(s2.action <= s1.action * (1.0 + 1e-12), "lambda={l}");
            assert!((action(&h, &dh, &s2.alphas).unwrap() - s2.action).abs() <= 1e-9 * s2.action.abs().max(1.0));
        }
    }

    #[test]
    fn coefficients_are_a_local_minimum() {
        let expansion = GaugeExpansion::build_with_points(&ising(4), 2, 5).unwrap();
        for i in 0..=10 {
            let (h, dh) = expansion.hamiltonian(i as f64 / 10.0).unwrap();
            let sol = solve_alphas(&h, &dh, 2).unwrap();
            for k in 0..2 {
                for factor in [0.99, 1.01] {
                    let mut a = sol.alphas.clone();
                    a[k] *= factor;
                    assert!(action(&h, &dh, &a).unwrap() > sol.action);
                }
            }
        }
    }

    #[test]
    fn interpolation_matches_direct_solves() {
        for order in [1, 2] {
            let expansion = GaugeExpansion::build(&ising(4), order).unwrap();
            for probe in [0.0137, 0.2513, 0.5021, 0.7777, 0.9968] {
                let direct = expansion.direct(probe).unwrap();
                let interp = expansion.alphas_at(probe);
                for (d, i) in direct.iter().zip(&interp) {
                    assert!((d - i).abs() <= 1e-6 * d.abs(), "order {order} at {probe}: {d} vs {i}");
                }
            }
            let csv = expansion.to_csv().render();
            let header = csv.lines().next().unwrap();
            assert_eq!(header, if order == 1 { "lambda,alpha1" } else { "lambda,alpha1,alpha2" });
            assert_eq!(csv.lines().count(), GAUGE_GRID_POINTS + 1);
        }
    }

    #[test]
    fn cubic_table_reproduces_cubics() {
        let h = 0.1;
        let f = |x: f64| vec![1.0 - 2.0 * x + 0.5 * x * x * x, x * x];
        let table = UniformCubic::new((0..11).map(|i| f(i as f64 * h)).collect(), h).unwrap();
        for x in [0.0, 0.03, 0.47, 0.999, 1.0] {
            for (a, b) in table.eval(x).iter().zip(f(x)) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_coefficients(&[0.0, 0.0], 3.0, 2).unwrap(), vec![0.0, 0.0]);
        assert_eq!(beta_coefficients(&[1.0], 1.0, 1).unwrap(), vec![2.0]);
        assert_eq!(beta_coefficients(&[1.0, 1.0], 1.0, 2).unwrap(), vec![2.0, 54.0]);
        assert!(beta_coefficients(&[1.0], 1.0, 3).is_err());
    }

    #[test]
    fn generators_are_hermitian_and_bare_at_endpoints() {
        let model = ising(4);
        let tau = 0.25;
        let ua = model.dense_hamiltonian(0.0).unwrap();
        let ub = model.dense_hamiltonian(1.0).unwrap();
        for mode in [CdMode::Variational(1), CdMode::Variational(2), CdMode::Exact] {
            let g = CdGenerator::new(&model, tau, mode).unwrap();
            assert!(dense_diff(&g.at(0.0).unwrap(), &ua) < 1e-14, "{mode:?}");
            assert!(dense_diff(&g.at(tau).unwrap(), &ub) < 1e-14, "{mode:?}");
            for j in 0..25 {
                let h = g.at(tau * j as f64 / 24.0).unwrap();
                assert!(h.hermiticity_defect() < 1e-12, "{mode:?}");
            }
        }
        let expansion = GaugeExpansion::build(&model, 2).unwrap();
        let fc = FloquetConfig::new(1.0, 1e3, &expansion).unwrap();
        let fe = FloquetGenerator::new(&model, tau, &fc).unwrap();
        for j in 0..25 {
            assert!(fe.at(tau * j as f64 / 24.0).unwrap().hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn matrix_free_apply_matches_dense() {
        let model = ising(3);
        let x: Vec<C64> = (0..8).map(|i| C64::new(0.1 * i as f64, 1.0 - 0.2 * i as f64)).collect();
        let check = |g: &dyn Generator, t: f64| {
            let (mut a, mut b) = (vec![C64::new(0.0, 0.0); 8], vec![C64::new(0.0, 0.0); 8]);
            g.apply(t, &x, &mut a).unwrap();
            g.at(t).unwrap().matvec(&x, &mut b);
            assert!(a.iter().zip(&b).all(|(p, q)| (p - q).norm() < 1e-10));
        };
        for order in [1, 2] {
            check(&CdGenerator::new(&model, 0.3, CdMode::Variational(order)).unwrap(), 0.11);
            let fc = FloquetConfig::new(1.0, 500.0, &GaugeExpansion::build(&model, order).unwrap()).unwrap();
            check(&FloquetGenerator::new(&model, 0.3, &fc).unwrap(), 0.0123);
        }
    }

    #[test]
    fn floquet_generator_direct_evaluation() {
        let model = ising(3);
        let tau = 0.5;
        let expansion = GaugeExpansion::build(&model, 1).unwrap();
        let fc = FloquetConfig::new(1.0, 200.0, &expansion).unwrap();
        let g = FloquetGenerator::new(&model, tau, &fc).unwrap();
        // cos(omega t) = 0 and sin(omega t) = 1
        let t = (std::f64::consts::FRAC_PI_2 + 60.0 * std::f64::consts::PI) / fc.omega;
        let c = model.schedule.eval(t / tau).unwrap();
        let beta = beta_coefficients(&expansion.alphas_at(c.f), fc.omega0, 1).unwrap()[0];
        let (h, dh) = expansion.hamiltonian(c.f).unwrap();
        let expected = h.combine(1.0, &dh, beta * c.df / tau).unwrap().to_dense().unwrap();
        assert!(dense_diff(&g.at(t).unwrap(), &expected) < 1e-9 * expected.max_abs());
    }

    #[test]
    fn floquet_support_stays_in_the_original_family() {
        let model = ising(4);
        let tau = 0.25;
        let expansion = GaugeExpansion::build(&model, 2).unwrap();
        let fc = FloquetConfig::new(1.0, 1e4, &expansion).unwrap();
        let g = FloquetGenerator::new(&model, tau, &fc).unwrap();
        let (h, dh) = g.symbolic_pair(0.5).unwrap();
        let allowed: std::collections::BTreeSet<_> = h.strings().chain(dh.strings()).cloned().collect();
        for j in 0..50 {
            let op = g.symbolic_at(tau * j as f64 / 49.0).unwrap();
            assert!(op.strings().all(|s| allowed.contains(s)));
        }
        assert_eq!(allowed.len(), 2 * model.n);
    }

    #[test]
    fn rejects_invalid_drives() {
        let grover = ModelSpec::new(Family::Grover, 3, Schedule::Linear);
        assert!(CdGenerator::new(&grover, 1.0, CdMode::Exact).is_err());
        let expansion = GaugeExpansion::build(&ising(3), 1).unwrap();
        assert!(FloquetConfig::new(1.0, 50.0, &expansion).is_err());
        assert!(CdGenerator::new(&ising(3), 0.0, CdMode::Variational(1)).is_err());
        assert!(CdGenerator::new(&ising(3), 1.0, CdMode::Variational(3)).is_err());
        // odd n: R couples the degenerate ground manifold of V
        assert!(matches!(CdGenerator::new(&ising(3), 1.0, CdMode::Exact), Err(crate::Error::Degenerate { .. })));
    }
}

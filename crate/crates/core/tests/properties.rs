//! Randomized invariants across linalg, analysis, design and sim.

mod common;

use common::{Gen, MAX_PLANT_MAGNITUDE};
use num_complex::Complex64;
use piobs::analysis::{
    classify_eigenvalues, is_detectable, is_observable, is_schur_stable, kalman_decompose, pbh_rank_at,
};
use piobs::design::{build_x, AugmentedMatrix};
use piobs::io::{to_json, DesignReport};
use piobs::linalg::{
    char_poly, complete_row_basis, eigenvalues, numerical_rank, pairing_distance, poly_from_roots, solve,
    spectral_radius,
};
use piobs::sim::fitted_decay_rate;
use piobs::{
    design_pi_observer, run_simulation, verify_design, DesignConfig, Error, InputSignal, RealMatrix,
    SimulationConfig, SystemRealization, Tolerances,
};
use proptest::prelude::*;

fn matrix(max_n: usize, lo: f64, hi: f64) -> impl Strategy<Value = RealMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(lo..hi, n * n).prop_map(move |d| RealMatrix::from_row_slice(n, n, &d).unwrap())
    })
}

/// `det(M)` by cofactor expansion along the first row.
fn laplace_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * laplace_det(&minor)
        })
        .sum()
}

/// Rank of an integer matrix by fraction-free elimination.
fn exact_rank(mut m: Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev = 1i128;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                m[r][c] = (m[rank][col] * m[r][c] - m[r][col] * m[rank][c]) / prev;
            }
            m[r][col] = 0;
        }
        prev = m[rank][col];
        rank += 1;
    }
    rank
}

fn int_matmul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    a.iter()
        .map(|row| (0..b[0].len()).map(|j| row.iter().zip(b).map(|(x, br)| x * br[j]).sum()).collect())
        .collect()
}

fn to_real(m: &[Vec<i128>]) -> RealMatrix {
    let rows: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    RealMatrix::from_rows(&rows).unwrap()
}

/// Random detectable system; a quarter carry a stable unobservable block.
fn detectable_system(g: &mut Gen) -> SystemRealization {
    let n = g.size(1, 6);
    let p = g.size(1, n.min(3));
    let m = g.size(1, 2);
    let (a, c) = if n > p && g.coin(0.25) {
        let k = g.unobservable_detectable(n, p);
        (k.a, k.c)
    } else {
        let plant = g.observable_plant(n, m, p);
        (plant.a, plant.c)
    };
    SystemRealization::new(a, g.gaussian(n, m), c, Tolerances::default().rank).unwrap()
}

// 48 cases unless PROPTEST_CASES asks for more.
fn small_config() -> ProptestConfig {
    let config = ProptestConfig::default();
    if std::env::var_os("PROPTEST_CASES").is_some() {
        config
    } else {
        ProptestConfig { cases: 48, ..config }
    }
}

proptest! {
    #![proptest_config(small_config())]

    #[test]
    fn char_poly_matches_cofactor_determinant(m in matrix(6, -2.0, 2.0), z in -2.0f64..2.0) {
        let n = m.rows();
        let coeffs = char_poly(&m).unwrap();
        prop_assert_eq!(coeffs.len(), n + 1);
        let shifted: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { z - m[(i, j)] } else { -m[(i, j)] }).collect())
            .collect();
        let want = laplace_det(&shifted);
        let got = coeffs.iter().fold(0.0, |acc, c| acc * z + c);
        let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| c.abs() * z.abs().powi((n - k) as i32)).sum();
        prop_assert!((got - want).abs() <= 1e-10 * scale.max(1.0), "{} vs {}", got, want);
    }

    #[test]
    fn eigenvalues_agree_with_char_poly(m in matrix(8, -2.0, 2.0)) {
        let coeffs = char_poly(&m).unwrap();
        let from_roots = poly_from_roots(eigenvalues(&m).unwrap().values());
        let scale = coeffs.iter().fold(1.0f64, |a, c| a.max(c.abs()));
        for (a, b) in coeffs.iter().zip(&from_roots) {
            prop_assert!((a - b).abs() <= 1e-8 * scale, "{:?} vs {:?}", coeffs, from_roots);
        }
    }

    #[test]
    fn spectra_are_conjugate_closed(m in matrix(8, -3.0, 3.0)) {
        let spec = eigenvalues(&m).unwrap();
        let conj: Vec<Complex64> = spec.values().iter().map(|z| z.conj()).collect();
        prop_assert!(pairing_distance(spec.values(), &conj).unwrap() <= 1e-9);
    }

    #[test]
    fn completed_basis_extends_c(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let n = g.size(1, 8);
        let p = g.size(1, n);
        let c = g.gaussian(p, n);
        let t = complete_row_basis(&c, 1e-9).unwrap();
        prop_assert_eq!(t.block(0, 0, p, n), c);
        prop_assert_eq!(numerical_rank(&t, 1e-9), n);
    }

    #[test]
    fn solve_residual_is_small(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let n = g.size(1, 8);
        let (m, _) = g.conditioned_pair(n);
        let k = g.size(1, 3);
        let r = g.gaussian(n, k);
        let x = solve(&m, &r).unwrap();
        let resid = (&(&m * &x) - &r).max_abs();
        prop_assert!(resid <= 1e-10 * r.max_abs().max(1.0), "{}", resid);
    }

    #[test]
    fn observable_stack_rank_matches_exact(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let n = g.size(1, 4);
        let p = g.size(1, 2);
        let a = g.int_matrix(n, n, -2, 2);
        let mut c = g.int_matrix(p, n, -2, 2);
        if c.iter().flatten().all(|&x| x == 0) {
            c[0][0] = 1;
        }
        let mut stack = c.clone();
        let mut block = c.clone();
        for _ in 1..n {
            block = int_matmul(&block, &a);
            stack.extend(block.iter().cloned());
        }
        let exact = exact_rank(stack) == n;
        let tol = Tolerances::default();
        let verdict = is_observable(&to_real(&a), &to_real(&c), &tol).unwrap();
        prop_assert_eq!(verdict.observable, exact);
    }

    #[test]
    fn observability_implies_detectability(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let n = g.size(1, 6);
        let p = g.size(1, n);
        // Integer entries make exact unobservable modes common.
        let a = to_real(&g.int_matrix(n, n, -2, 2));
        let mut ci = g.int_matrix(p, n, -1, 1);
        ci[0][g.size(0, n - 1)] = 1;
        let c = to_real(&ci);
        let tol = Tolerances::default();
        let det = is_detectable(&a, &c, &tol).unwrap();
        let obs = is_observable(&a, &c, &tol).unwrap();
        if obs.observable {
            prop_assert!(det.detectable);
        }
        if !det.detectable {
            let classes = classify_eigenvalues(&a, &c, &tol).unwrap();
            prop_assert!(classes.iter().any(|e| !e.stable && !e.observable));
            for w in &det.witness {
                prop_assert!(w.norm() >= 1.0 - 1e-9);
                prop_assert!(pbh_rank_at(&a, &c, *w, tol.rank).unwrap() < n);
            }
        }
    }

    #[test]
    fn detectable_pairs_have_full_pbh_rank_outside_unit_disc(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let sys = detectable_system(&mut g);
        let (a, c) = (sys.a(), sys.c());
        let tol = Tolerances::default();
        prop_assert!(is_detectable(a, c, &tol).unwrap().detectable);
        for r in [1.0, 1.25, 2.0, 4.0] {
            for k in 0..16 {
                let z = Complex64::from_polar(r, k as f64 * std::f64::consts::PI / 8.0);
                prop_assert_eq!(pbh_rank_at(a, c, z, tol.rank).unwrap(), sys.n());
            }
        }
    }

    #[test]
    fn kalman_decomposition_of_detectable_pair(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let n = g.size(2, 7);
        let p = g.size(1, (n - 1).min(3));
        let form = g.unobservable_detectable(n, p);
        let tol = Tolerances::default();
        let k = kalman_decompose(&form.a, &form.c, &tol).unwrap();
        prop_assert_eq!(k.q, form.q);
        let resid = (&k.reconstruct() - &form.a).max_abs() / form.a.max_abs().max(1.0);
        prop_assert!(resid <= 1e-8, "{}", resid);
        prop_assert!(is_schur_stable(&k.a22, 0.0).unwrap().stable);
        prop_assert!(is_observable(&k.a11, &k.c1, &tol).unwrap().observable);
    }

    #[test]
    fn designs_split_spectrum_and_satisfy_integral_identity(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let sys = detectable_system(&mut g);
        let cfg = DesignConfig::default();
        let obs = design_pi_observer(&sys, &cfg).unwrap();
        let p = sys.p();
        let aug = obs.augmented().unwrap();
        let radius = spectral_radius(aug.matrix()).unwrap();
        prop_assert!(radius < 1.0 - cfg.margin / 2.0);

        let cx = sys.c() * &obs.x;
        let ident = (&(&RealMatrix::identity(p) - &cx) - &obs.phi).max_abs();
        prop_assert!(ident <= 1e-10, "{}", ident);

        let mut expect = eigenvalues(&obs.closed_loop()).unwrap().into_values();
        expect.extend(eigenvalues(&obs.phi).unwrap().into_values());
        let got = eigenvalues(aug.matrix()).unwrap();
        prop_assert!(pairing_distance(got.values(), &expect).unwrap() <= 1e-6);
    }

    #[test]
    fn lambda_does_not_move_the_spectrum(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let sys = detectable_system(&mut g);
        let (n, p) = (sys.n(), sys.p());
        let spectrum_with = |lambda: RealMatrix| {
            let cfg = DesignConfig::default().with_lambda(lambda);
            let obs = design_pi_observer(&sys, &cfg).unwrap();
            eigenvalues(obs.augmented().unwrap().matrix()).unwrap().into_values()
        };
        let s1 = spectrum_with(g.gaussian(n - p, p));
        let s2 = spectrum_with(g.gaussian(n - p, p));
        prop_assert!(pairing_distance(&s1, &s2).unwrap() <= 1e-6);
    }

    #[test]
    fn auxiliary_matrix_solves_its_defining_system(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let n = g.size(1, 7);
        let p = g.size(1, n.min(3));
        let c = g.gaussian(p, n);
        let t = complete_row_basis(&c, 1e-9).unwrap();
        let phi = g.stable_matrix(p, 0.8);
        let lambda = g.gaussian(n - p, p);
        let x = build_x(&t, &phi, &lambda, 1e-13).unwrap();
        let top = &RealMatrix::identity(p) - &phi;
        let want = RealMatrix::vstack(&top, &lambda).unwrap();
        let resid = (&(&t * &x) - &want).max_abs();
        prop_assert!(resid <= 1e-9 * t.max_abs().max(1.0) * x.max_abs().max(1.0), "{}", resid);
    }

    #[test]
    fn undetectable_pairs_are_infeasible_and_never_stabilized(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let n = g.size(2, 6);
        let p = g.size(1, (n - 1).min(2));
        let q = g.size(p, n - 1);
        let obs = g.spectrum(q, 0.0, MAX_PLANT_MAGNITUDE);
        let mut unobs = g.spectrum(n - q - 1, 0.0, 0.9);
        let bad = if g.coin(0.5) { 1.0 } else { -1.0 } * g.uniform(1.0, 1.5);
        unobs.push(Complex64::new(bad, 0.0));
        let form = g.kalman_form(obs, unobs, p);
        let sys = SystemRealization::new(form.a.clone(), g.gaussian(n, 1), form.c.clone(), 1e-9).unwrap();
        match design_pi_observer(&sys, &DesignConfig::default()) {
            Err(Error::Infeasible { witness }) => {
                prop_assert!(witness.iter().any(|w| (w - Complex64::new(bad, 0.0)).norm() <= 1e-7), "{:?}", witness);
            }
            other => prop_assert!(false, "expected infeasible, got {:?}", other.map(|_| ())),
        }
        for _ in 0..20 {
            let l = g.gaussian(n, p).scaled(g.uniform(0.1, 3.0));
            let f = g.gaussian(n, p).scaled(g.uniform(0.1, 3.0));
            let aug = AugmentedMatrix::assemble(&form.a, &form.c, &l, &f).unwrap();
            prop_assert!(spectral_radius(aug.matrix()).unwrap() >= 1.0 - 1e-7);
        }
    }

    #[test]
    fn matching_initial_state_stays_exactly_zero(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let sys = detectable_system(&mut g);
        let obs = design_pi_observer(&sys, &DesignConfig::default()).unwrap();
        let x0 = g.vector(sys.n());
        let mut cfg = SimulationConfig::from_initial_state(x0.clone(), sys.p(), 100);
        cfg.xhat0 = x0;
        cfg.input = InputSignal::Random { amplitude: 1.0, seed: g.seed() };
        let trace = run_simulation(&obs, &cfg).unwrap();
        prop_assert!(trace.steps.iter().all(|s| s.e.iter().chain(&s.v).all(|&x| x == 0.0)));
    }

    #[test]
    fn error_sequence_ignores_the_input(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let sys = detectable_system(&mut g);
        let obs = design_pi_observer(&sys, &DesignConfig::default()).unwrap();
        let mut cfg = SimulationConfig::from_initial_state(g.vector(sys.n()), sys.p(), 200);
        cfg.input = InputSignal::Random { amplitude: 1.0, seed: g.seed() };
        let a = run_simulation(&obs, &cfg).unwrap();
        cfg.input = InputSignal::Step { value: g.vector(sys.m()), onset: 3 };
        let b = run_simulation(&obs, &cfg).unwrap();
        for (sa, sb) in a.steps.iter().zip(&b.steps) {
            for (x, y) in sa.e.iter().chain(&sa.v).zip(sb.e.iter().chain(&sb.v)) {
                prop_assert!((x - y).abs() <= 5e-9, "step {}: {} vs {}", sa.k, x, y);
            }
        }
    }

    #[test]
    fn joint_error_decays_at_the_augmented_rate(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let sys = detectable_system(&mut g);
        let obs = design_pi_observer(&sys, &DesignConfig::default()).unwrap();
        let radius = spectral_radius(obs.augmented().unwrap().matrix()).unwrap();
        let cfg = SimulationConfig::from_initial_state(g.vector(sys.n()), sys.p(), 200);
        let trace = run_simulation(&obs, &cfg).unwrap();
        // Below this the error is rounding noise from the plant state.
        let state = trace.steps.iter().flat_map(|s| s.x.iter()).fold(1.0f64, |a, x| a.max(x.abs()));
        if let Some(rate) = fitted_decay_rate(&trace, 1e-12 * state) {
            prop_assert!(rate <= radius + 0.05, "fitted {} vs radius {}", rate, radius);
        }
    }

    #[test]
    fn saved_reports_verify_after_round_trip(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let sys = detectable_system(&mut g);
        let cfg = DesignConfig::default();
        let obs = design_pi_observer(&sys, &cfg).unwrap();
        let ver = verify_design(&obs, cfg.margin).unwrap();
        prop_assert!(ver.passed());
        let text = to_json(&DesignReport::feasible(&obs, &cfg, &ver).unwrap()).unwrap();
        let back = DesignReport::parse(&text, "report").unwrap();
        prop_assert_eq!(to_json(&back).unwrap(), text);
        let rebuilt = back.observer(&sys).unwrap();
        prop_assert_eq!(&rebuilt.l, &obs.l);
        prop_assert_eq!(&rebuilt.f, &obs.f);
        prop_assert!(verify_design(&rebuilt, back.config.margin).unwrap().passed());
    }
}

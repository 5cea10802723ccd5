use invariant_curvature::families::{s3_action_phi, s3_action_psi, torus_psi, S3ActionParams};
use invariant_curvature::lie::{so3, so4, Subalgebra};
use invariant_curvature::verify::*;
use invariant_curvature::{CurvatureError, LeftInvariantMetric, SelfAdjointMap};
use nalgebra::DMatrix;

fn budget() -> Budget {
    Budget::default()
}

fn berger(r: f64) -> LeftInvariantMetric {
    LeftInvariantMetric::new(so4(), SelfAdjointMap::diagonal(&[r, 1.0, 1.0, 1.0, 1.0, 1.0])).unwrap()
}

fn proj(h: &Subalgebra, sign: f64) -> SelfAdjointMap {
    SelfAdjointMap::new(h.projector(6) * sign).unwrap()
}

#[test]
fn bi_invariant_minimum_is_zero_on_a_commuting_plane() {
    let g = so4();
    let report = min_curvature(&LeftInvariantMetric::bi_invariant(g.clone()), &budget(), DEFAULT_TOL, 7);
    assert_eq!(report.verdict, Verdict::NonnegativeWithinBudget);
    assert!(report.min_value.abs() <= 1e-12);
    let [u, v] = report.witness.unwrap();
    let bracket = g.bracket(&u.into(), &v.into()).unwrap();
    assert!(bracket.norm() < 1e-5, "{}", bracket.norm());
}

#[test]
fn berger_past_four_thirds_has_a_reproducible_witness() {
    let m = berger(1.4);
    let report = min_curvature(&m, &budget(), DEFAULT_TOL, 7);
    assert!(report.is_negative());
    let again = witness_value(&m, report.witness.as_ref().unwrap()).unwrap();
    assert_eq!(again, report.min_value);
    assert!(again < -DEFAULT_TOL);
}

#[test]
fn known_s3_action_metric_is_nonnegative() {
    let phi = s3_action_phi(&S3ActionParams {
        a: 1.0,
        b: 1.0,
        lambda: [1.0; 3],
    })
    .unwrap();
    let report = min_curvature(
        &LeftInvariantMetric::new(so4(), phi).unwrap(),
        &budget(),
        DEFAULT_TOL,
        7,
    );
    assert_eq!(report.verdict, Verdict::NonnegativeWithinBudget);
}

#[test]
fn so3_minimisation_works_without_commuting_pairs() {
    let m = LeftInvariantMetric::new(so3(), SelfAdjointMap::diagonal(&[1.0, 2.0, 3.0])).unwrap();
    let report = min_curvature(&m, &budget(), DEFAULT_TOL, 1);
    assert!((report.min_value + 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn reports_are_deterministic() {
    let m = berger(1.2);
    assert_eq!(
        min_curvature(&m, &budget(), DEFAULT_TOL, 3),
        min_curvature(&m, &budget(), DEFAULT_TOL, 3)
    );
    let psi = torus_psi(0.3, -0.5, 0.7, 0.2, 0.4);
    let a = infinitesimal_check(&so4(), &psi, &budget(), DEFAULT_TOL, 3).unwrap();
    assert_eq!(a, infinitesimal_check(&so4(), &psi, &budget(), DEFAULT_TOL, 3).unwrap());
}

#[test]
fn torus_variation_is_flat_to_third_order() {
    for (c, d, a1, a2, a3) in [(0.3, -0.5, 0.7, 0.2, 0.4), (-1.0, 0.2, 0.5, -0.3, -0.6)] {
        let r = infinitesimal_check(&so4(), &torus_psi(c, d, a1, a2, a3), &budget(), DEFAULT_TOL, 5).unwrap();
        assert!(r.min_value.abs() < 1e-9, "{}", r.min_value);
        assert_eq!(r.verdict, Verdict::NonnegativeWithinBudget);
    }
}

#[test]
fn enlarging_the_diagonal_is_infinitesimally_negative() {
    let g = so4();
    let r = infinitesimal_check(
        &g,
        &proj(&Subalgebra::diagonal(&g).unwrap(), 1.0),
        &budget(),
        DEFAULT_TOL,
        7,
    )
    .unwrap();
    assert!(r.is_negative());
    // orthonormal (A,0), (0,B): [X^h, Y^h] = (A×B, A×B)/4 has squared norm |A×B|²/8 ≤ 1/8
    assert!((r.min_value + 0.75).abs() < 1e-6, "{}", r.min_value);
    let (t, kappa) = r.probe.unwrap();
    assert!(t > 0.0 && kappa < 0.0);
}

#[test]
fn enlarging_a_factor_is_flat() {
    let g = so4();
    let r = infinitesimal_check(
        &g,
        &proj(&Subalgebra::factor(&g, 0).unwrap(), 1.0),
        &budget(),
        DEFAULT_TOL,
        7,
    )
    .unwrap();
    assert_eq!(r.verdict, Verdict::NonnegativeWithinBudget);
    assert!(r.min_value.abs() < 1e-12);
}

#[test]
fn s3_action_variation_with_nonnegative_g_r() {
    let psi = s3_action_psi(0.0, 0.0, [2.0, 1.5, 1.5]).unwrap();
    let r = infinitesimal_check(&so4(), &psi, &budget(), DEFAULT_TOL, 7).unwrap();
    assert_eq!(r.verdict, Verdict::NonnegativeWithinBudget);
    // eigenvalues (1,2,3) do not give a nonnegatively curved right-invariant factor
    let bad = s3_action_psi(0.0, 0.0, [1.0, 2.0, 3.0]).unwrap();
    assert!(infinitesimal_check(&so4(), &bad, &budget(), DEFAULT_TOL, 7)
        .unwrap()
        .is_negative());
}

#[test]
fn so3_has_no_infinitesimal_test() {
    let r = infinitesimal_check(
        &so3(),
        &SelfAdjointMap::diagonal(&[1.0, -1.0, 0.0]),
        &budget(),
        DEFAULT_TOL,
        1,
    )
    .unwrap();
    assert_eq!(r.verdict, Verdict::NonnegativeWithinBudget);
    assert!(r.witness.is_none());
}

#[test]
fn eigenstructure_examples() {
    let s = eigenstructure(&SelfAdjointMap::identity(6), DEFAULT_CLUSTER_TOL);
    assert_eq!(s.eigenvalues, vec![1.0]);
    assert_eq!(s.multiplicities(), vec![6]);

    let s = eigenstructure(&torus_psi(-0.5, 0.9, 0.1, 0.3, 0.0), DEFAULT_CLUSTER_TOL);
    assert_eq!(s.multiplicities()[0], 2);
    assert!((s.eigenvalues[0] + 0.5).abs() < 1e-15);

    let s = eigenstructure(&SelfAdjointMap::diagonal(&[1.0, 1.0 + 1e-12]), DEFAULT_CLUSTER_TOL);
    assert_eq!(s.eigenvalues.len(), 1);
}

#[test]
fn lemma_k_examples() {
    let g = so4();
    let torus = lemma_k_check(&g, &torus_psi(-0.5, 0.9, 0.1, 0.3, 0.2), 200, 3).unwrap();
    assert!(torus.pass, "{}", torus.max_residual);

    let scalar = lemma_k_check(&g, &SelfAdjointMap::scalar(6, 0.7), 50, 3).unwrap();
    assert!(scalar.pass);
    assert_eq!(scalar.max_residual, 0.0);

    let mut m = DMatrix::zeros(6, 6);
    m[(0, 0)] = -1.0;
    m[(3, 1)] = 0.5;
    m[(1, 3)] = 0.5;
    let coupled = lemma_k_check(&g, &SelfAdjointMap::new(m).unwrap(), 100, 3).unwrap();
    assert!(!coupled.pass);
    assert!(coupled.max_residual > 1e-3);
}

#[test]
fn normal_form_of_known_families() {
    for psi in [
        s3_action_psi(0.3, -0.2, [0.5, 2.0, 3.0]).unwrap(),
        s3_action_psi(0.0, 0.0, [2.0, 1.5, 1.5]).unwrap(),
        torus_psi(0.3, -0.5, 0.7, 0.2, 0.4),
    ] {
        let nf = th2_normal_form(&psi).unwrap();
        assert!(nf.off_pattern_residual < 1e-8);
        assert!(nf.lambda_coupling.abs() < 1e-10 && nf.mu_coupling.abs() < 1e-10);
        assert!(nf.f_residual < 1e-12);
    }
}

#[test]
fn normal_form_rejects_generic_maps() {
    let m = DMatrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0 + (i + j) as f64 * 0.1);
    let psi = SelfAdjointMap::new(&m + m.transpose()).unwrap();
    assert!(matches!(
        th2_normal_form(&psi),
        Err(CurvatureError::NormalFormUnavailable(_))
    ));
}

#[test]
fn th1_bracket_examples() {
    let scalar = Th2Params {
        a1: 2.0,
        a2: 2.0,
        b1: 2.0,
        b2: 2.0,
        c1: 2.0,
        c2: 2.0,
        ..Default::default()
    };
    for (alpha, beta) in [([0.0, 1.0, 1.0], [1.0, 0.0, 0.0]), ([1.0, -2.0, 0.5], [0.3, 0.3, 1.0])] {
        assert_eq!(th1_bracket(&scalar, alpha, beta), 0.0);
    }
    let suite = th1_identity_suite(100, 7);
    assert!(suite.constant > 0.0);
    assert!(suite.max_residual() < 1e-10);
}

#[test]
fn path_scan_examples() {
    let g = so4();
    let grid: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let small = Budget {
        samples: 1024,
        restarts: 16,
        iters: 100,
    };
    for psi in [
        s3_action_psi(0.0, 0.0, [2.0, 1.5, 1.5]).unwrap(),
        torus_psi(0.3, 0.2, 0.1, -0.2, 0.1),
    ] {
        let reports = path_scan(&g, &psi, &grid, &small, DEFAULT_TOL, 7).unwrap();
        assert!(reports.iter().all(|r| r.verdict == Verdict::NonnegativeWithinBudget));
        assert_eq!(reports[3].t, Some(0.4));
    }
    // τ grows much faster than the Berger factors: the 4/3 bound breaks before t = 0.9
    let steep = torus_psi(0.3, -0.5, 0.7, 0.2, 0.4);
    assert!(path_scan(&g, &steep, &[0.9], &small, DEFAULT_TOL, 7).unwrap()[0].is_negative());
    let enlarge = proj(&Subalgebra::diagonal(&g).unwrap(), 1.0);
    let reports = path_scan(&g, &enlarge, &[0.05], &budget(), DEFAULT_TOL, 7).unwrap();
    assert!(reports[0].is_negative());
    assert!(matches!(
        path_scan(&g, &enlarge, &[0.5, 1.0], &small, DEFAULT_TOL, 7),
        Err(CurvatureError::HorizonExceeded { .. })
    ));
}

#[test]
fn commuting_pairs_lie_in_split_planes() {
    let g = so4();
    let pairs = commuting_pairs_by_nullspace(&g, 10_000, 11);
    assert!(pairs.len() > 9_900);
    for p in &pairs {
        assert!(is_split_plane(&g, &p.x, &p.y, 1e-8).unwrap());
    }
    assert!(sample_commuting_pairs(&so3(), 5, 1).is_empty());
}

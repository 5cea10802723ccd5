use invariant_curvature_web::ops::*;

#[test]
fn berger_sweep_crosses_zero_past_four_thirds() {
    let out = berger_sweep(1.0, 1.5, 6, 1024, 3).unwrap();
    assert_eq!(out.len(), 12);
    for pair in out.chunks(2) {
        let (r, min) = (pair[0], pair[1]);
        if r <= 4.0 / 3.0 {
            assert!(min > -1e-9, "r = {r}: {min}");
        } else {
            assert!(min < -1e-6, "r = {r}: {min}");
        }
    }
    assert!(berger_sweep(0.0, 1.0, 4, 64, 0).is_err());
}

#[test]
fn heatmap_of_enlarged_diagonal_reaches_minus_three_quarters() {
    let psi = projection_psi("diagonal", 1.0).unwrap();
    let map = kappa3_heatmap(&psi, 16).unwrap();
    assert_eq!(map.len(), 256);
    let min = map.iter().copied().fold(f64::INFINITY, f64::min);
    // a(θ) ⊥ b(φ) at θ = π/2, φ = 0
    assert!((min + 0.75).abs() < 1e-12, "{min}");
    assert!(map.iter().all(|v| *v <= 1e-15));
    let shrink = projection_psi("diagonal", -1.0).unwrap();
    assert!(kappa3_heatmap(&shrink, 8).unwrap().iter().all(|v| *v >= -1e-15));
    assert!(projection_psi("third", 1.0).is_err());
}

#[test]
fn s3_action_path_is_nonnegative() {
    let psi = s3_action_psi_matrix(0.3, -0.5, 2.0, 1.5, 1.5).unwrap();
    let curve = path_curve(&psi, 3, 512, 1).unwrap();
    assert_eq!(curve.len(), 6);
    assert!(curve.chunks(2).all(|p| p[1] > -1e-9));
    assert!(path_curve(&psi[..35], 3, 64, 1).is_err());
}

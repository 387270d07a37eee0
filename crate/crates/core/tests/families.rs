use twistor::canonical::*;
use twistor::curve::{is_horizontal, is_linearly_full, CurveCP3, FULL_TOL, HORIZONTAL_TOL};
use twistor::invariance::invariance_check;

/// Norm of column `j` relative to the largest coefficient.
fn column(c: &CurveCP3, j: usize) -> f64 {
    let m = c.coefficient_matrix();
    (0..4).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt() / c.max_abs()
}

#[test]
fn gamma_path_degenerates_to_the_cubic() {
    let ts = [0.9, 0.99, 0.999, 0.9999];
    for j in [0, 5] {
        let norms: Vec<f64> = ts.iter().map(|&t| column(&gamma_path(t).unwrap(), j)).collect();
        for w in norms.windows(2) {
            assert!(w[1] < w[0], "column {j}: {norms:?}");
        }
        assert!(norms[3] < 1e-3, "column {j}: {norms:?}");
    }
    // the normalized quintic tends to z times the cubic
    let g = gamma_path(0.9999).unwrap();
    let m = g.coefficient_matrix() / g.coefficient_matrix()[(3, 3)];
    let c = psi3().coefficient_matrix() / psi3().coefficient_matrix()[(3, 2)];
    for i in 0..4 {
        for j in 0..4 {
            assert!((m[(i, j + 1)] - c[(i, j)]).norm() < 1e-3, "({i}, {j})");
        }
    }
    let a = gamma_path(0.3).unwrap().coefficient_matrix();
    let b = gamma_path(0.3 + 1e-7).unwrap().coefficient_matrix();
    assert!((a - b).norm() < 1e-5);
    assert_eq!(gamma_path(1.0).unwrap().degree(), 3);
}

#[test]
fn quintic_constraints_hold_along_paths() {
    for case in Lemma711Case::ALL {
        let start = case.sample_params();
        for k in 0..=40 {
            let t = k as f64 / 40.0;
            let p = lemma711_params(case, t, start.as_ref()).unwrap();
            let worst = p.constraint_residuals().iter().map(|r| r.norm()).fold(0.0, f64::max);
            assert!(worst < 1e-12, "{case} at t = {t}: {worst:e}");
        }
    }
}

#[test]
fn constructors_have_their_stated_invariance() {
    let invariant = [
        psi3(),
        psi5_eta(-2.0).unwrap(),
        psi5_eta(0.0).unwrap(),
        psi5_eta(3.0).unwrap(),
        psi5_m(3.0).unwrap(),
        gamma_path(0.7).unwrap(),
    ];
    let not_invariant = [
        psi4_a(0.0).unwrap(),
        psi4_a(1.0).unwrap(),
        psi5_1(),
        psi5_2(),
        bryant_canonical(1, 1).unwrap(),
        bryant_canonical(1, 3).unwrap(),
        psi5_general(&Psi5GeneralParams::psi5_tilde_0()).unwrap(),
    ];
    for c in invariant.iter().chain(&not_invariant) {
        assert!(is_horizontal(c, HORIZONTAL_TOL));
        assert!(is_linearly_full(c, FULL_TOL));
    }
    assert!(invariant.iter().all(|c| invariance_check(c).invariant));
    assert!(not_invariant.iter().all(|c| !invariance_check(c).invariant));
}

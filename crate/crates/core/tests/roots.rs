use patchkit::spectral::*;
use std::f64::consts::PI;

#[test]
fn factor_roots_vanish() {
    let h = 3.5;
    assert!(symmetric_char_residual(PI / h, h, 0.5, 30.0).abs() < 1e-15);
    assert!(symmetric_char_residual(4.0 * PI / h, h, 0.5, 30.0).abs() < 1e-14);
    assert!(antisymmetric_char_residual(2.0 * PI / h, h, 30.0).abs() < 1e-14);
    assert!(antisymmetric_char_residual(1e-9, h, 30.0).abs() < 1e-12);
}

#[test]
fn symmetric_roots_include_factor_roots() {
    let h = 3.5;
    let roots = find_mode_roots(Symmetry::Symmetric, h, 0.64, 34.67, 0.5, 6).unwrap();
    assert!(roots.iter().any(|m| m.kh == PI && m.branch == ModeBranch::CosHalf));
    assert!(roots.iter().any(|m| m.kh == 4.0 * PI && m.branch == ModeBranch::SinQuarter));
    for m in &roots {
        assert!(symmetric_char_residual(m.k, h, 0.64, 34.67).abs() <= 1e-10, "{m:?}");
        assert!(m.lambda <= 0.0);
    }
    assert!(roots.windows(2).all(|w| w[0].k < w[1].k));
    assert_eq!(roots[0].branch, ModeBranch::Bracket);
}

#[test]
fn leading_antisymmetric_root_lies_between_pi_and_two_pi() {
    let roots = find_mode_roots(Symmetry::Antisymmetric, 3.5, 0.5, 34.67, 0.5, 1).unwrap();
    assert!(roots[0].kh > PI && roots[0].kh < 2.0 * PI);
    let mu3 = find_mode_roots(Symmetry::Antisymmetric, 3.5, 0.5, 3.0, 0.5, 1).unwrap();
    let rate = -mu3[0].lambda;
    assert!(rate > 0.5 && rate < 2.0, "{rate}");
}

#[test]
fn small_ratio_macroscale_root() {
    let r = 0.1;
    let roots = find_mode_roots(Symmetry::Symmetric, 1.0, r, 33.53, 1.0, 1).unwrap();
    let k_big_h = roots[0].kh / r;
    assert!((k_big_h / (PI / 2.0) - 1.0).abs() < 0.02, "{k_big_h}");
}

#[test]
fn zero_count_is_rejected() {
    assert!(find_mode_roots(Symmetry::Symmetric, 1.0, 0.5, 30.0, 1.0, 0).is_err());
}

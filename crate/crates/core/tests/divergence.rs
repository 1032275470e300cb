use dsgs::solvers::divergence::{
    example1_min_coordinate, example2_random_growth, example2_spectral_radii, Example2Matrices,
};
use dsgs::solvers::SorVariant;

#[test]
fn sor_variants_never_lower_the_minimum_coordinate() {
    for alpha in [0.1, 0.5, 0.9, 1.0] {
        for variant in SorVariant::all(2) {
            let report = example1_min_coordinate(2.0, alpha, &variant, 10_000, 1).unwrap();
            assert!(report.never_below_initial, "{} at alpha {alpha}", report.variant);
            assert_eq!(report.log_min.len(), 10_001);
        }
    }
}

#[test]
fn random_unlocked_updates_grow() {
    let report = example2_random_growth(2.0, 0.5, 100_000, 3, 1000).unwrap();
    assert!(report.slope > 0.0, "slope {}", report.slope);
    assert_eq!(report.log_norms.len(), 101);
}

#[test]
fn reverse_order_product_exceeds_one() {
    // ordering (0, 1, 2, 3) applies B₁ first, i.e. the product B₄B₃B₂B₁
    for which in [Example2Matrices::Published, Example2Matrices::CaseUpdates] {
        let radii = example2_spectral_radii(2.0, 0.5, which).unwrap();
        assert_eq!(radii.len(), 24);
        let (p, rho) = radii[0];
        assert_eq!(p, [0, 1, 2, 3]);
        assert!(rho > 1.0, "{which:?}: {rho}");
    }
}

#[test]
fn tau_must_exceed_one() {
    assert!(example1_min_coordinate(1.0, 0.5, &SorVariant::Cyclic, 10, 0).is_err());
    assert!(example2_random_growth(0.5, 0.5, 10, 0, 1).is_err());
}

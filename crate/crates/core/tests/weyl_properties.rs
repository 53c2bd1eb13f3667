use ccr_core::fock::BasisConvention;
use ccr_core::weyl::{boost, default_guard, group_law_residual, translation, unitarity_defect, weyl_residual};
use ccr_core::FockState;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exponentials_are_unitary(t in -2.0..2.0f64, s in -2.0..2.0f64) {
        prop_assert!(unitarity_defect(&translation(t, 32).unwrap()) < 1e-11);
        prop_assert!(unitarity_defect(&boost(s, 32).unwrap()) < 1e-11);
    }

    #[test]
    fn translations_compose(t1 in -1.0..1.0f64, t2 in -1.0..1.0f64) {
        let xi = FockState::basis(1, 64, BasisConvention::Normalized).unwrap();
        prop_assert!(group_law_residual(t1, t2, 64, &xi).unwrap() < 1e-10);
    }

    #[test]
    fn residual_shrinks_from_dim_to_four_dim(t in -1.0..1.0f64, s in -1.0..1.0f64) {
        let xi = FockState::basis(0, 16, BasisConvention::Normalized).unwrap();
        let r = |dim| weyl_residual(t, s, dim, default_guard(dim), &xi).unwrap().residual;
        let (small, large) = (r(16), r(64));
        prop_assert!(large < 1e-10 || large <= 0.5 * small, "{small:e} -> {large:e}");
    }
}

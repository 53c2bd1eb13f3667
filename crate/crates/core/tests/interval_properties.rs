use ccr_core::grid::GridFunction;
use ccr_core::interval::{interval_weyl_residual_for, IntervalRepSpec};
use num_complex::Complex64;
use proptest::prelude::*;

/// `|e^{-is(b-a)} - 1| sqrt(int_a^{a+t} |psi|^2) / ||psi||` from the samples
/// that wrap around.
fn wrap_formula(spec: &IntervalRepSpec, steps: usize, s: f64, psi: &GridFunction) -> f64 {
    let h = spec.length() / spec.m as f64;
    let wrapped: f64 = psi.values[..steps].iter().map(|z| z.norm_sqr()).sum::<f64>() * h;
    let total: f64 = psi.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * h;
    (Complex64::new(0.0, -s * spec.length()).exp() - 1.0).norm() * (wrapped / total).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_is_the_wrapped_phase_jump(
        a in -3.0..3.0f64,
        len in 0.5..6.0f64,
        steps in 1usize..63,
        s in -4.0..4.0f64,
        k in 1.0..3.0f64,
    ) {
        let spec = IntervalRepSpec::new(a, a + len, 64).unwrap();
        let t = steps as f64 * len / 64.0;
        let psi = GridFunction::from_fn(spec.grid().unwrap(), |x| Complex64::new(1.5 + (k * x).sin(), 0.2 * x)).unwrap();
        let got = interval_weyl_residual_for(&spec, t, s, &psi).unwrap();
        prop_assert!((got - wrap_formula(&spec, steps, s, &psi)).abs() < 1e-9);
    }
}

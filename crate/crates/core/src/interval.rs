//! The multiplication and derivative operators on a finite interval `(a, b)`
//! with periodic boundary conditions.
//!
//! Both `U_t` (cyclic translation) and `V_s` (multiplication by `e^{isx}`)
//! are unitary here, yet the Weyl relation fails: translating past `b` wraps
//! to `a`, where `e^{isx}` has jumped by `e^{-is(b-a)}`. Unless `s(b-a)` is a
//! multiple of `2 pi`, the wrapped part of the vector picks up the wrong
//! phase. The number operator `(q^2 + p^2 - 1)/2` likewise has no spectrum on
//! the naturals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CcrError, Result};
use crate::grid::{
    build_grid_momentum, discrete_norm, lowest_eigenvalues, second_derivative_matrix, GridFunction, GridSpec,
    Scheme,
};
use crate::matrix::I;
use crate::weyl::expm_action;

pub const MIN_INTERVAL_SAMPLES: usize = 16;
/// Number of low eigenvalues used for the distance from the naturals.
pub const CONTRAST_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalRepSpec {
    pub a: f64,
    pub b: f64,
    pub m: usize,
    /// Only periodic boundary conditions are implemented.
    pub periodic: bool,
}

impl IntervalRepSpec {
    pub fn new(a: f64, b: f64, m: usize) -> Result<Self> {
        let spec = Self {
            a,
            b,
            m,
            periodic: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.b > self.a) {
            return Err(CcrError::InvalidGrid(format!("need b > a, got ({}, {})", self.a, self.b)));
        }
        if self.m < MIN_INTERVAL_SAMPLES {
            return Err(CcrError::InvalidGrid(format!(
                "need at least {MIN_INTERVAL_SAMPLES} samples, got {}",
                self.m
            )));
        }
        if !self.periodic {
            return Err(CcrError::InvalidGrid("only periodic boundary conditions are supported".into()));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn grid(&self) -> Result<GridSpec> {
        self.validate()?;
        GridSpec::new(self.a, self.b, self.m, true)
    }

    /// Normalized constant function.
    pub fn constant_state(&self) -> Result<GridFunction> {
        let c = 1.0 / self.length().sqrt();
        GridFunction::from_fn(self.grid()?, |_| Complex64::new(c, 0.0))
    }

    /// `exp(-(x - c)^2 / 2)` centred on the interval.
    pub fn gaussian_state(&self) -> Result<GridFunction> {
        let c = 0.5 * (self.a + self.b);
        GridFunction::from_fn(self.grid()?, |x| Complex64::new((-0.5 * (x - c).powi(2)).exp(), 0.0))
    }

    /// Number of grid steps in a translation by `t`; `t` must be a multiple
    /// of the step and lie strictly inside `(0, b - a)`.
    pub fn shift_steps(&self, t: f64) -> Result<usize> {
        self.validate()?;
        if !(t > 0.0 && t < self.length()) {
            return Err(CcrError::InvalidInput(format!(
                "translation {t} must lie in (0, {})",
                self.length()
            )));
        }
        let h = self.length() / self.m as f64;
        let steps = t / h;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-9 * rounded.max(1.0) {
            return Err(CcrError::InvalidInput(format!(
                "translation {t} is not a multiple of the grid step {h}"
            )));
        }
        Ok(rounded as usize)
    }
}

/// `(U_t f)(x) = f(x + t)` with wrap-around, `t = steps * h`.
pub fn cyclic_translation(values: &[Complex64], steps: usize) -> Vec<Complex64> {
    let m = values.len();
    (0..m).map(|j| values[(j + steps) % m]).collect()
}

fn multiply_phase(grid: &GridSpec, values: &[Complex64], s: f64) -> Vec<Complex64> {
    grid.positions()
        .iter()
        .zip(values)
        .map(|(x, v)| (I * (s * x)).exp() * v)
        .collect()
}

/// `||(U_t V_s - e^{ist} V_s U_t) psi|| / ||psi||` for a given state.
pub fn interval_weyl_residual_for(spec: &IntervalRepSpec, t: f64, s: f64, psi: &GridFunction) -> Result<f64> {
    let steps = spec.shift_steps(t)?;
    let grid = spec.grid()?;
    if psi.grid != grid {
        return Err(CcrError::InvalidInput("state lives on a different grid".into()));
    }
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(CcrError::InvalidInput("zero state".into()));
    }
    let uv = cyclic_translation(&multiply_phase(&grid, &psi.values, s), steps);
    let vu = multiply_phase(&grid, &cyclic_translation(&psi.values, steps), s);
    let phase = (I * (s * t)).exp();
    let diff: Vec<Complex64> = uv.iter().zip(&vu).map(|(a, b)| a - phase * b).collect();
    Ok(discrete_norm(&diff, grid.step()) / norm)
}

/// Weyl residual on the normalized constant function.
pub fn interval_weyl_residual(spec: &IntervalRepSpec, t: f64, s: f64) -> Result<f64> {
    interval_weyl_residual_for(spec, t, s, &spec.constant_state()?)
}

/// `||exp(i t p) psi - U_t psi|| / ||psi||` with the spectral `p`: the
/// exponential route to the same translation.
pub fn interval_shift_crosscheck(spec: &IntervalRepSpec, t: f64, psi: &GridFunction) -> Result<f64> {
    let steps = spec.shift_steps(t)?;
    let grid = spec.grid()?;
    let p = build_grid_momentum(&grid, Scheme::Spectral)?;
    let via_exp = expm_action(&p.scale(I * t), &psi.values)?;
    let shifted = cyclic_translation(&psi.values, steps);
    let diff: Vec<Complex64> = via_exp.iter().zip(&shifted).map(|(a, b)| a - b).collect();
    Ok(discrete_norm(&diff, grid.step()) / psi.norm())
}

/// Lowest `count` eigenvalues of `(q^2 + p^2 - 1) / 2` with spectral `p`.
pub fn interval_number_spectrum(spec: &IntervalRepSpec, count: usize) -> Result<Vec<f64>> {
    let grid = spec.grid()?;
    if count > spec.m / 4 {
        return Err(CcrError::InvalidInput(format!(
            "count {count} too large for {} samples (limit m/4)",
            spec.m
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut h = -second_derivative_matrix(&grid, Scheme::Spectral)?;
    for (j, x) in grid.positions().into_iter().enumerate() {
        h[(j, j)] += x * x - 1.0;
    }
    lowest_eigenvalues(h * 0.5, count)
}

/// Distance of each value from the nearest nonnegative integer.
pub fn distance_from_naturals(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|&v| if v < 0.0 { -v } else { (v - v.round()).abs() })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastRow {
    pub length: f64,
    pub weyl_residual: f64,
    pub spectral_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastTable {
    /// Sorted by interval length.
    pub rows: Vec<ContrastRow>,
    pub residual_decreasing: bool,
    pub distance_decreasing: bool,
}

impl ContrastTable {
    pub const CSV_HEADER: &'static str = "length,residual,spectral_distance";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            out.push_str(&format!("{},{:e},{:e}\n", r.length, r.weyl_residual, r.spectral_distance));
        }
        out
    }
}

/// Weyl residual on a centred Gaussian and the largest distance of the
/// lowest [`CONTRAST_LEVELS`] number eigenvalues from the naturals, per
/// interval.
pub fn interval_vs_line_report(specs: &[IntervalRepSpec], t: f64, s: f64) -> Result<ContrastTable> {
    let mut rows = specs
        .iter()
        .map(|spec| {
            let weyl_residual = interval_weyl_residual_for(spec, t, s, &spec.gaussian_state()?)?;
            let levels = interval_number_spectrum(spec, CONTRAST_LEVELS)?;
            let spectral_distance = distance_from_naturals(&levels).into_iter().fold(0.0, f64::max);
            Ok(ContrastRow {
                length: spec.length(),
                weyl_residual,
                spectral_distance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.length.total_cmp(&b.length));
    let residual_decreasing = rows.windows(2).all(|w| w[1].weyl_residual < w[0].weyl_residual);
    let distance_decreasing = rows.windows(2).all(|w| w[1].spectral_distance < w[0].spectral_distance);
    Ok(ContrastTable {
        rows,
        residual_decreasing,
        distance_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `|e^{-is(b-a)} - 1| sqrt(int_a^{a+t} |psi|^2) / ||psi||`, evaluated
    /// directly on the wrapped samples.
    fn wrap_formula(spec: &IntervalRepSpec, t: f64, s: f64, psi: &GridFunction) -> f64 {
        let h = spec.length() / spec.m as f64;
        let steps = (t / h).round() as usize;
        let wrapped: f64 = psi.values[..steps].iter().map(|z| z.norm_sqr()).sum::<f64>() * h;
        ((-I * (s * spec.length())).exp() - 1.0).norm() * wrapped.sqrt() / psi.norm()
    }

    #[test]
    fn spec_validation() {
        assert!(IntervalRepSpec::new(1.0, 0.0, 64).is_err());
        assert!(IntervalRepSpec::new(0.0, 1.0, 8).is_err());
        let spec = IntervalRepSpec::new(0.0, 1.0, 64).unwrap();
        assert_eq!(spec.shift_steps(0.5).unwrap(), 32);
        assert!(spec.shift_steps(0.51).is_err());
        assert!(spec.shift_steps(0.0).is_err());
        assert!(spec.shift_steps(1.0).is_err());
    }

    #[test]
    fn zero_boost_commutes() {
        let spec = IntervalRepSpec::new(0.0, 1.0, 64).unwrap();
        assert!(interval_weyl_residual(&spec, 0.5, 0.0).unwrap() < 1e-12);
    }

    #[test]
    fn half_wrap_gives_sqrt_two() {
        for m in [64, 256, 512] {
            let spec = IntervalRepSpec::new(0.0, 1.0, m).unwrap();
            let r = interval_weyl_residual(&spec, 0.5, PI).unwrap();
            assert!((r - 2f64.sqrt()).abs() < 1e-8, "m={m}: {r}");
        }
    }

    #[test]
    fn commensurate_boost_has_no_wrap_defect() {
        let spec = IntervalRepSpec::new(0.0, 1.0, 128).unwrap();
        for t in [0.125, 0.5, 0.875] {
            assert!(interval_weyl_residual(&spec, t, 2.0 * PI).unwrap() < 1e-10);
        }
    }

    #[test]
    fn residual_matches_wrap_formula() {
        let spec = IntervalRepSpec::new(-1.0, 2.0, 96).unwrap();
        let smooth = GridFunction::from_fn(spec.grid().unwrap(), |x| {
            Complex64::new((2.0 * PI * x / 3.0).cos() + 1.5, 0.3 * x)
        })
        .unwrap();
        for (t, s) in [(0.5, 1.0), (1.25, 2.7), (2.0, -0.4)] {
            let got = interval_weyl_residual_for(&spec, t, s, &smooth).unwrap();
            assert!((got - wrap_formula(&spec, t, s, &smooth)).abs() < 1e-8);
            let c = spec.constant_state().unwrap();
            let got = interval_weyl_residual_for(&spec, t, s, &c).unwrap();
            assert!((got - wrap_formula(&spec, t, s, &c)).abs() < 1e-8);
        }
    }

    #[test]
    fn residual_periodic_in_boost() {
        let spec = IntervalRepSpec::new(0.0, 2.0, 64).unwrap();
        let period = 2.0 * PI / spec.length();
        let psi = spec.gaussian_state().unwrap();
        let r0 = interval_weyl_residual_for(&spec, 0.5, 0.7, &psi).unwrap();
        let r1 = interval_weyl_residual_for(&spec, 0.5, 0.7 + period, &psi).unwrap();
        assert!((r0 - r1).abs() < 1e-12);
    }

    #[test]
    fn translation_and_boost_are_unitary() {
        let spec = IntervalRepSpec::new(0.0, 1.0, 64).unwrap();
        let psi = spec.gaussian_state().unwrap();
        let g = spec.grid().unwrap();
        let shifted = cyclic_translation(&psi.values, 17);
        let boosted = multiply_phase(&g, &psi.values, 3.3);
        let n = psi.norm();
        assert!((discrete_norm(&shifted, g.step()) - n).abs() < 1e-12);
        assert!((discrete_norm(&boosted, g.step()) - n).abs() < 1e-12);
    }

    #[test]
    fn exponential_route_translates_smooth_periodic_states() {
        let spec = IntervalRepSpec::new(0.0, 1.0, 64).unwrap();
        let psi = GridFunction::from_fn(spec.grid().unwrap(), |x| {
            Complex64::new((2.0 * PI * x).sin(), (4.0 * PI * x).cos())
        })
        .unwrap();
        assert!(interval_shift_crosscheck(&spec, 0.25, &psi).unwrap() < 1e-10);
    }

    #[test]
    fn interval_spectrum_misses_naturals() {
        let spec = IntervalRepSpec::new(0.0, 1.0, 256).unwrap();
        let vals = interval_number_spectrum(&spec, 3).unwrap();
        assert!((vals[0] + 1.0 / 3.0).abs() < 0.01, "{vals:?}");
        assert!(distance_from_naturals(&vals).iter().all(|&d| d > 0.05));
        assert!(interval_number_spectrum(&spec, 0).unwrap().is_empty());
    }

    #[test]
    fn long_interval_recovers_naturals() {
        let spec = IntervalRepSpec::new(-20.0, 20.0, 1024).unwrap();
        let vals = interval_number_spectrum(&spec, 3).unwrap();
        for (n, v) in vals.iter().enumerate() {
            assert!((v - n as f64).abs() < 1e-2, "{vals:?}");
        }
    }

    #[test]
    fn naturals_distance() {
        assert_eq!(distance_from_naturals(&[-0.25, 2.1, 2.9]), vec![0.25, 2.1 - 2.0, 3.0 - 2.9]);
    }

    #[test]
    fn contrast_single_and_sweep() {
        let one = [IntervalRepSpec::new(0.0, 1.0, 256).unwrap()];
        assert_eq!(interval_vs_line_report(&one, 0.5, 1.0).unwrap().rows.len(), 1);
        let specs = [
            IntervalRepSpec::new(-10.0, 10.0, 640).unwrap(),
            IntervalRepSpec::new(0.0, 1.0, 256).unwrap(),
            IntervalRepSpec::new(-2.5, 2.5, 320).unwrap(),
        ];
        let table = interval_vs_line_report(&specs, 0.5, 1.0).unwrap();
        let lengths: Vec<f64> = table.rows.iter().map(|r| r.length).collect();
        assert_eq!(lengths, vec![1.0, 5.0, 20.0]);
        assert!(table.residual_decreasing, "{table:?}");
        assert!(table.distance_decreasing, "{table:?}");
        assert_eq!(table.to_csv().lines().count(), 4);
    }
}

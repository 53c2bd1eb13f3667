//! Position-space realization on a uniform grid.
//!
//! `q` acts by multiplication with the sample position and `p = -i d/dx`.
//! Differentiation is either the trigonometric (Fourier) matrix on a periodic
//! grid or a second-order central stencil. `p^2` is discretized directly as
//! `-d^2/dx^2`: on an even grid the product `p p` would put the alternating
//! (Nyquist or checkerboard) mode in the kernel and produce a spurious
//! low eigenvalue.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CcrError, Result};
use crate::fock::{build_momentum, build_position};
use crate::matrix::{ComplexMatrix, I};

pub const MIN_SAMPLES: usize = 8;
/// Target residual for the Gaussian vacuum.
pub const VACUUM_TOL: f64 = 1e-6;
/// Largest tolerated norm drift in the Hermite recurrence.
pub const HERMITE_DRIFT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub m: usize,
    pub periodic: bool,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, m: usize, periodic: bool) -> Result<Self> {
        let spec = Self {
            x_min,
            x_max,
            m,
            periodic,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Periodic grid on `[-L, L)`.
    pub fn symmetric(half_width: f64, m: usize) -> Result<Self> {
        Self::new(-half_width, half_width, m, true)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_max > self.x_min) {
            return Err(CcrError::InvalidGrid(format!(
                "need finite x_max > x_min, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.m < MIN_SAMPLES {
            return Err(CcrError::InvalidGrid(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                self.m
            )));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn step(&self) -> f64 {
        if self.periodic {
            self.length() / self.m as f64
        } else {
            self.length() / (self.m - 1) as f64
        }
    }

    pub fn positions(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.m).map(|j| self.x_min + j as f64 * h).collect()
    }

    pub fn refined(&self) -> Self {
        let m = if self.periodic { 2 * self.m } else { 2 * self.m - 1 };
        Self { m, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Spectral,
    CentralDifference,
}

impl std::str::FromStr for Scheme {
    type Err = CcrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Scheme::Spectral),
            "central" | "central_difference" => Ok(Scheme::CentralDifference),
            other => Err(CcrError::InvalidInput(format!("unknown scheme `{other}`"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Spectral => "spectral",
            Scheme::CentralDifference => "central_difference",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.m {
            return Err(CcrError::DimensionMismatch {
                left: values.len(),
                right: grid.m,
            });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CcrError::InvalidInput("non-finite sample".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.positions().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    /// Discrete L2 norm `sqrt(h sum |f_j|^2)`.
    pub fn norm(&self) -> f64 {
        discrete_norm(&self.values, self.grid.step())
    }

    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        let h = self.grid.step();
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * h
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re,im\n");
        for (x, v) in self.grid.positions().iter().zip(&self.values) {
            out.push_str(&format!("{x},{},{}\n", v.re, v.im));
        }
        out
    }
}

pub(crate) fn discrete_norm(values: &[Complex64], h: f64) -> f64 {
    (h * values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

/// Real first-derivative matrix.
pub fn derivative_matrix(grid: &GridSpec, scheme: Scheme) -> Result<DMatrix<f64>> {
    grid.validate()?;
    let m = grid.m;
    match scheme {
        Scheme::Spectral => {
            if !grid.periodic {
                return Err(CcrError::InvalidGrid("spectral differentiation needs a periodic grid".into()));
            }
            let h = 2.0 * PI / m as f64;
            let scale = 2.0 * PI / grid.length();
            Ok(DMatrix::from_fn(m, m, |j, l| {
                if j == l {
                    return 0.0;
                }
                let k = j as i64 - l as i64;
                let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let half = k as f64 * h / 2.0;
                let kernel = if m.is_multiple_of(2) { 1.0 / half.tan() } else { 1.0 / half.sin() };
                0.5 * sign * kernel * scale
            }))
        }
        Scheme::CentralDifference => {
            let h = grid.step();
            let mut d = DMatrix::zeros(m, m);
            for j in 0..m {
                if j + 1 < m {
                    d[(j, j + 1)] = 0.5 / h;
                } else if grid.periodic {
                    d[(j, 0)] = 0.5 / h;
                }
                if j > 0 {
                    d[(j, j - 1)] = -0.5 / h;
                } else if grid.periodic {
                    d[(j, m - 1)] = -0.5 / h;
                }
            }
            Ok(d)
        }
    }
}

/// Real second-derivative matrix.
pub fn second_derivative_matrix(grid: &GridSpec, scheme: Scheme) -> Result<DMatrix<f64>> {
    grid.validate()?;
    let m = grid.m;
    match scheme {
        Scheme::Spectral => {
            if !grid.periodic {
                return Err(CcrError::InvalidGrid("spectral differentiation needs a periodic grid".into()));
            }
            if m % 2 == 1 {
                // no Nyquist mode on odd grids, so the square is exact
                let d = derivative_matrix(grid, scheme)?;
                return Ok(&d * &d);
            }
            let h = 2.0 * PI / m as f64;
            let scale = (2.0 * PI / grid.length()).powi(2);
            Ok(DMatrix::from_fn(m, m, |j, l| {
                if j == l {
                    return (-PI * PI / (3.0 * h * h) - 1.0 / 6.0) * scale;
                }
                let k = j as i64 - l as i64;
                let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                -0.5 * sign / (k as f64 * h / 2.0).sin().powi(2) * scale
            }))
        }
        Scheme::CentralDifference => {
            let h2 = grid.step().powi(2);
            let mut d = DMatrix::zeros(m, m);
            for j in 0..m {
                d[(j, j)] = -2.0 / h2;
                if j + 1 < m {
                    d[(j, j + 1)] = 1.0 / h2;
                } else if grid.periodic {
                    d[(j, 0)] = 1.0 / h2;
                }
                if j > 0 {
                    d[(j, j - 1)] = 1.0 / h2;
                } else if grid.periodic {
                    d[(j, m - 1)] = 1.0 / h2;
                }
            }
            Ok(d)
        }
    }
}

fn complexify(m: &DMatrix<f64>, c: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_dmatrix_unchecked(m.map(|x| c * x))
}

pub fn build_grid_position(grid: &GridSpec) -> Result<ComplexMatrix> {
    grid.validate()?;
    let diag: Vec<Complex64> = grid.positions().into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// `p = -i D`.
pub fn build_grid_momentum(grid: &GridSpec, scheme: Scheme) -> Result<ComplexMatrix> {
    Ok(complexify(&derivative_matrix(grid, scheme)?, -I))
}

/// `p^2 = -D2`.
pub fn build_grid_momentum_squared(grid: &GridSpec, scheme: Scheme) -> Result<ComplexMatrix> {
    Ok(complexify(&second_derivative_matrix(grid, scheme)?, Complex64::new(-1.0, 0.0)))
}

fn oscillator_real(grid: &GridSpec, scheme: Scheme) -> Result<DMatrix<f64>> {
    let mut h = -second_derivative_matrix(grid, scheme)?;
    for (j, x) in grid.positions().into_iter().enumerate() {
        h[(j, j)] += x * x;
    }
    Ok(h)
}

/// `q^2 + p^2`.
pub fn build_grid_oscillator(grid: &GridSpec, scheme: Scheme) -> Result<ComplexMatrix> {
    Ok(complexify(&oscillator_real(grid, scheme)?, Complex64::new(1.0, 0.0)))
}

/// `N = (q^2 + p^2 - 1) / 2`.
pub fn build_grid_number(grid: &GridSpec, scheme: Scheme) -> Result<ComplexMatrix> {
    let mut h = oscillator_real(grid, scheme)?;
    for j in 0..grid.m {
        h[(j, j)] -= 1.0;
    }
    Ok(complexify(&(h * 0.5), Complex64::new(1.0, 0.0)))
}

/// Lowest `count` eigenvalues of a real symmetric matrix.
pub(crate) fn lowest_eigenvalues(h: DMatrix<f64>, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 0)
        .ok_or_else(|| CcrError::Eigensolver("symmetric QR did not converge".into()))?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(CcrError::Eigensolver("non-finite eigenvalue".into()));
    }
    vals.sort_by(f64::total_cmp);
    vals.truncate(count);
    Ok(vals)
}

/// Lowest `count` eigenvalues of `q^2 + p^2` on the periodic grid `[-L, L)`.
pub fn grid_oscillator_spectrum(half_width: f64, m: usize, scheme: Scheme, count: usize) -> Result<Vec<f64>> {
    let grid = GridSpec::symmetric(half_width, m)?;
    if count > m / 4 {
        return Err(CcrError::InvalidInput(format!(
            "count {count} too large for {m} samples (limit m/4)"
        )));
    }
    lowest_eigenvalues(oscillator_real(&grid, scheme)?, count)
}

/// Sign choice in `(q +- i p) / sqrt(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderSign {
    /// `(q + i p) / sqrt(2) = (x + d/dx) / sqrt(2)`.
    Plus,
    /// `(q - i p) / sqrt(2) = (x - d/dx) / sqrt(2)`.
    Minus,
}

impl std::fmt::Display for LadderSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LadderSign::Plus => "(q + i p)/sqrt2",
            LadderSign::Minus => "(q - i p)/sqrt2",
        })
    }
}

/// `||(q +- i p) f / sqrt(2)|| / ||f||`.
pub fn annihilation_residual(f: &GridFunction, sign: LadderSign, scheme: Scheme) -> Result<f64> {
    let norm = f.norm();
    if norm == 0.0 {
        return Err(CcrError::InvalidInput("zero grid function".into()));
    }
    let d = derivative_matrix(&f.grid, scheme)?;
    let s = match sign {
        LadderSign::Plus => 1.0,
        LadderSign::Minus => -1.0,
    };
    let x = f.grid.positions();
    let out: Vec<Complex64> = (0..f.grid.m)
        .map(|j| {
            let deriv: Complex64 = (0..f.grid.m).map(|l| f.values[l] * d[(j, l)]).sum();
            (f.values[j] * x[j] + deriv * s) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    Ok(discrete_norm(&out, f.grid.step()) / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VacuumReport {
    pub plus: f64,
    pub minus: f64,
    /// `Plus` residual on the refined grid (`2m` samples).
    pub plus_refined: f64,
    /// The sign whose residual is below [`VACUUM_TOL`], if any.
    pub annihilating: Option<LadderSign>,
}

fn gaussian(grid: GridSpec) -> Result<GridFunction> {
    GridFunction::from_fn(grid, |x| Complex64::new((-0.5 * x * x).exp(), 0.0))
}

/// Applies both sign conventions to the sampled `exp(-x^2/2)` on `[-L, L)`
/// and reports which one annihilates it.
pub fn vacuum_annihilation_residual(half_width: f64, m: usize, scheme: Scheme) -> Result<VacuumReport> {
    let grid = GridSpec::symmetric(half_width, m)?;
    let g = gaussian(grid)?;
    let plus = annihilation_residual(&g, LadderSign::Plus, scheme)?;
    let minus = annihilation_residual(&g, LadderSign::Minus, scheme)?;
    let plus_refined = annihilation_residual(&gaussian(grid.refined())?, LadderSign::Plus, scheme)?;
    if plus > VACUUM_TOL && plus_refined < 0.5 * plus {
        return Err(CcrError::GridTooCoarse {
            coarse: plus,
            fine: plus_refined,
        });
    }
    let annihilating = if plus < VACUUM_TOL {
        Some(LadderSign::Plus)
    } else if minus < VACUUM_TOL {
        Some(LadderSign::Minus)
    } else {
        None
    };
    Ok(VacuumReport {
        plus,
        minus,
        plus_refined,
        annihilating,
    })
}

/// Hermite functions `psi_0..=psi_{n_max}` by the three-term recurrence
/// `psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}`, each
/// normalized in the discrete norm.
pub fn hermite_basis(half_width: f64, m: usize, n_max: usize) -> Result<Vec<GridFunction>> {
    let grid = GridSpec::symmetric(half_width, m)?;
    let x = grid.positions();
    let h = grid.step();
    let mut prev = vec![0.0; m];
    let mut cur: Vec<f64> = x.iter().map(|&x| PI.powf(-0.25) * (-0.5 * x * x).exp()).collect();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let norm = (h * cur.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let drift = (norm - 1.0).abs();
        if drift > HERMITE_DRIFT_TOL || !norm.is_finite() {
            return Err(CcrError::RecurrenceUnstable { n, drift });
        }
        out.push(GridFunction::new(
            grid,
            cur.iter().map(|&v| Complex64::new(v / norm, 0.0)).collect(),
        )?);
        let a = (2.0 / (n + 1) as f64).sqrt();
        let b = (n as f64 / (n + 1) as f64).sqrt();
        let next: Vec<f64> = (0..m).map(|j| a * x[j] * cur[j] - b * prev[j]).collect();
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntertwinerReport {
    /// Frobenius norm of `T q_grid T^dagger - q_fock` on the leading block.
    pub position_mismatch: f64,
    pub momentum_mismatch: f64,
    /// Largest entry of `|T T^dagger - I|`.
    pub gram_defect: f64,
}

/// `T[n, j] = sqrt(h) psi_n(x_j)` maps grid samples to Hermite coefficients;
/// if the grid and Fock realizations are unitarily equivalent, conjugating
/// the grid operators by `T` reproduces the Fock matrices on modes
/// `0..=n_max`.
pub fn intertwiner_check(half_width: f64, m: usize, n_max: usize) -> Result<IntertwinerReport> {
    let basis = hermite_basis(half_width, m, n_max)?;
    let grid = basis[0].grid;
    let sh = grid.step().sqrt();
    let rows = n_max + 1;
    let t = DMatrix::from_fn(rows, m, |n, j| sh * basis[n].values[j].re);
    let x = grid.positions();
    let tq = DMatrix::from_fn(rows, m, |n, j| t[(n, j)] * x[j]);
    let q_rep = &tq * t.transpose();
    let d = derivative_matrix(&grid, Scheme::Spectral)?;
    let d_rep = &t * &d * t.transpose();
    let gram = &t * t.transpose();

    let q_fock = build_position(rows + 1)?;
    let p_fock = build_momentum(rows + 1)?;
    let mut q_err = 0.0;
    let mut p_err = 0.0;
    let mut gram_defect = 0.0_f64;
    for i in 0..rows {
        for j in 0..rows {
            q_err += (Complex64::new(q_rep[(i, j)], 0.0) - q_fock.get(i, j)).norm_sqr();
            p_err += (-I * d_rep[(i, j)] - p_fock.get(i, j)).norm_sqr();
            let id = if i == j { 1.0 } else { 0.0 };
            gram_defect = gram_defect.max((gram[(i, j)] - id).abs());
        }
    }
    Ok(IntertwinerReport {
        position_mismatch: q_err.sqrt(),
        momentum_mismatch: p_err.sqrt(),
        gram_defect,
    })
}

/// `||([p, q] + i) f|| / ||f||` on the grid.
pub fn grid_ccr_residual(f: &GridFunction, scheme: Scheme) -> Result<f64> {
    let norm = f.norm();
    if norm == 0.0 {
        return Err(CcrError::InvalidInput("zero grid function".into()));
    }
    let q = build_grid_position(&f.grid)?;
    let p = build_grid_momentum(&f.grid, scheme)?;
    let pq = p.apply(&q.apply(&f.values));
    let qp = q.apply(&p.apply(&f.values));
    let r: Vec<Complex64> = (0..f.grid.m).map(|j| pq[j] - qp[j] + I * f.values[j]).collect();
    Ok(discrete_norm(&r, f.grid.step()) / norm)
}

/// `||A f - lambda f|| / ||f||`.
pub fn grid_eigen_residual(op: &ComplexMatrix, f: &GridFunction, lambda: f64) -> f64 {
    let af = op.apply(&f.values);
    let r: Vec<Complex64> = af.iter().zip(&f.values).map(|(a, v)| a - v * lambda).collect();
    discrete_norm(&r, f.grid.step()) / f.norm()
}

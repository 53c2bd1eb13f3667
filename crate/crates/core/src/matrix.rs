//! Dense complex square matrices.
//!
//! Storage is an `nalgebra` matrix of `Complex64`. Products are split into
//! real and imaginary parts so that the real `gemm` kernel does the work;
//! the generic complex product in `nalgebra` is a naive triple loop.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{CcrError, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            data: DMatrix::zeros(dim, dim),
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            data: DMatrix::identity(dim, dim),
        })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        check_dim(dim)?;
        Self::from_dmatrix(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// Rejects non-square, empty, or non-finite input.
    pub fn from_dmatrix(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(CcrError::DimensionMismatch {
                left: data.nrows(),
                right: data.ncols(),
            });
        }
        check_dim(data.nrows())?;
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CcrError::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { data })
    }

    pub(crate) fn from_dmatrix_unchecked(data: DMatrix<Complex64>) -> Self {
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            data: self.data.map(|z| z * c),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.data.diagonal().iter().copied().collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        self.data
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of |M - M^dagger|.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest |i - j| over nonzero entries; zero for diagonal matrices.
    pub fn bandwidth(&self) -> usize {
        let n = self.dim();
        let mut bw = 0;
        for j in 0..n {
            for i in 0..n {
                if self.data[(i, j)] != ZERO {
                    bw = bw.max(i.abs_diff(j));
                }
            }
        }
        bw
    }

    pub fn leading_block(&self, size: usize) -> Result<Self> {
        if size == 0 || size > self.dim() {
            return Err(CcrError::InvalidDimension {
                dim: size,
                reason: "block size must lie in 1..=dim",
            });
        }
        Ok(Self {
            data: self.data.view((0, 0), (size, size)).into_owned(),
        })
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim(), "vector length must equal matrix dimension");
        let n = self.dim();
        let mut out = vec![ZERO; n];
        for (j, &vj) in v.iter().enumerate() {
            if vj == ZERO {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.data[(i, j)] * vj;
            }
        }
        out
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::from_dmatrix_unchecked(DMatrix::identity(self.dim(), self.dim()));
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Sorted eigenvalues and orthonormal eigenvectors (columns) of a
    /// Hermitian matrix. Only the lower triangle is read.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
        let n = self.dim();
        let real = self.data.iter().all(|z| z.im == 0.0);
        let (values, vectors): (Vec<f64>, Vec<Vec<Complex64>>) = if real {
            let m = self.data.map(|z| z.re);
            let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0)
                .ok_or_else(|| CcrError::Eigensolver("real symmetric QR did not converge".into()))?;
            let vecs = (0..n)
                .map(|c| eig.eigenvectors.column(c).iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect();
            (eig.eigenvalues.iter().copied().collect(), vecs)
        } else {
            let eig = SymmetricEigen::try_new(self.data.clone(), f64::EPSILON, 0)
                .ok_or_else(|| CcrError::Eigensolver("hermitian QR did not converge".into()))?;
            let vecs = (0..n)
                .map(|c| eig.eigenvectors.column(c).iter().copied().collect())
                .collect();
            (eig.eigenvalues.iter().copied().collect(), vecs)
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CcrError::Eigensolver("non-finite eigenvalue".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        Ok((
            order.iter().map(|&i| values[i]).collect(),
            order.iter().map(|&i| vectors[i].clone()).collect(),
        ))
    }

    pub fn eigvalsh(&self) -> Result<Vec<f64>> {
        Ok(self.hermitian_eigen()?.0)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(CcrError::InvalidDimension {
            dim,
            reason: "dimension must be at least 1",
        });
    }
    Ok(())
}

fn split(m: &DMatrix<Complex64>) -> (DMatrix<f64>, DMatrix<f64>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix product dimension mismatch");
        let (ar, ai) = split(&self.data);
        let (br, bi) = split(&rhs.data);
        let re = &ar * &br - &ai * &bi;
        let im = &ar * &bi + &ai * &br;
        ComplexMatrix {
            data: DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
                Complex64::new(re[(i, j)], im[(i, j)])
            }),
        }
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix sum dimension mismatch");
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix difference dimension mismatch");
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { data: -&self.data }
    }
}

/// Euclidean norm, scaled by the largest modulus so that entries near the
/// top of the float range do not overflow.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * v.iter().map(|z| (z / scale).norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_sub(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn vec_scale(v: &[Complex64], c: Complex64) -> Vec<Complex64> {
    v.iter().map(|z| z * c).collect()
}

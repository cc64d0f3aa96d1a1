//! Dense complex square matrices used for Hamiltonians, unitaries, states and
//! evolved observables.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::{Error, Result, C64};

/// A `dim x dim` complex matrix. Only squareness is enforced; Hermiticity and
/// normalization are checked by the consumers that need them.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    m: DMatrix<C64>,
}

impl DenseOperator {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(Self { m })
    }

    /// Builds from row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        Ok(Self {
            m: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            m: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |r, c| if r == c { diag[r] } else { C64::zero() })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.m[(row, col)] = value;
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { m: &self.m * s }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        Ok(Self {
            m: &self.m * &rhs.m,
        })
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        Self {
            m: self.m.kronecker(&rhs.m),
        }
    }

    /// Kronecker product of a sequence of factors, left factor most significant.
    pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a DenseOperator>) -> Self {
        let mut acc = Self::identity(1);
        for f in factors {
            acc = acc.kron(f);
        }
        acc
    }

    /// `A^dagger B U`-style sandwich: returns `left * self * right`.
    pub fn sandwich(&self, left: &Self, right: &Self) -> Result<Self> {
        left.try_mul(self)?.try_mul(right)
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            self.dim(),
            other.dim(),
            "max_abs_diff on mismatched dimensions"
        );
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute entry of `self - self^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.m[(r, c)] - self.m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.adjoint().m * &self.m;
        let id = DMatrix::<C64>::identity(self.dim(), self.dim());
        prod.iter()
            .zip(id.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Hilbert-Schmidt norm squared, `Tr[A^dagger A]`.
    pub fn hs_norm_sqr(&self) -> f64 {
        self.m.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let defect = self.hermiticity_defect();
        if defect > 1e-10 * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation: defect });
        }
        let eig = nalgebra::SymmetricEigen::new(self.m.clone());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    fn check_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rhs.dim(),
            });
        }
        Ok(())
    }
}

/// `Tr[A^dagger B]`.
pub fn hs_inner(a: &DenseOperator, b: &DenseOperator) -> Result<C64> {
    a.check_dim(b)?;
    Ok(a.m
        .iter()
        .zip(b.m.iter())
        .fold(C64::zero(), |acc, (x, y)| acc + x.conj() * y))
}

/// `Tr[A B]` without forming the product.
pub fn trace_product(a: &DenseOperator, b: &DenseOperator) -> Result<C64> {
    a.check_dim(b)?;
    let n = a.dim();
    let mut acc = C64::zero();
    for r in 0..n {
        for c in 0..n {
            acc += a.m[(r, c)] * b.m[(c, r)];
        }
    }
    Ok(acc)
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;

    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        self.try_mul(rhs).expect("operator dimensions must agree")
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;

    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions must agree");
        DenseOperator {
            m: &self.m + &rhs.m,
        }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;

    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions must agree");
        DenseOperator {
            m: &self.m - &rhs.m,
        }
    }
}

/// Single-qubit Pauli matrices, unnormalized.
pub mod paulis {
    use super::*;

    pub fn identity() -> DenseOperator {
        DenseOperator::identity(2)
    }

    pub fn x() -> DenseOperator {
        DenseOperator::from_fn(2, |r, c| if r != c { C64::one() } else { C64::zero() })
    }

    pub fn y() -> DenseOperator {
        DenseOperator::from_fn(2, |r, c| match (r, c) {
            (0, 1) => C64::new(0.0, -1.0),
            (1, 0) => C64::new(0.0, 1.0),
            _ => C64::zero(),
        })
    }

    pub fn z() -> DenseOperator {
        DenseOperator::diagonal(&[C64::one(), -C64::one()])
    }
}

#[cfg(test)]
mod tests {
    use super::paulis::*;
    use super::*;

    #[test]
    fn hs_inner_examples() {
        assert_eq!(
            hs_inner(&identity(), &identity()).unwrap(),
            C64::new(2.0, 0.0)
        );
        assert_eq!(hs_inner(&x(), &y()).unwrap(), C64::zero());
        assert_eq!(hs_inner(&z(), &z()).unwrap(), C64::new(2.0, 0.0));
    }

    #[test]
    fn hs_inner_rejects_mismatched_dims() {
        let err = hs_inner(&identity(), &DenseOperator::identity(4)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 2, right: 4 });
    }

    #[test]
    fn non_square_is_rejected() {
        let m = DMatrix::<C64>::zeros(2, 3);
        assert!(matches!(
            DenseOperator::from_matrix(m),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn pauli_algebra() {
        let iy = y().scale(C64::new(0.0, 1.0));
        // X Z = -i Y
        assert!((&x() * &z()).max_abs_diff(&iy.scale_real(-1.0)) < 1e-15);
        assert!(y().is_hermitian(0.0));
        assert!(y().unitarity_defect() < 1e-15);
    }

    #[test]
    fn trace_product_matches_product_trace() {
        let a = DenseOperator::from_fn(3, |r, c| C64::new(r as f64 + 0.5, c as f64 - 1.0));
        let b = DenseOperator::from_fn(3, |r, c| C64::new((r * c) as f64, 1.0 + r as f64));
        let direct = (&a * &b).trace();
        assert!((trace_product(&a, &b).unwrap() - direct).norm() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_pauli_z() {
        assert_eq!(z().hermitian_eigenvalues().unwrap(), alloc::vec![-1.0, 1.0]);
        let non_herm = DenseOperator::from_fn(2, |r, _| C64::new(r as f64, 0.0));
        assert!(matches!(
            non_herm.hermitian_eigenvalues(),
            Err(Error::NotHermitian { .. })
        ));
    }
}

//! Dense complex matrices acting on `C^n`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Range, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use nalgebra::Complex;

/// Complex double-precision scalar.
pub type C64 = Complex<f64>;

/// Complex column vector.
pub type Vector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// An element of `B(C^n)`, stored as a dense square matrix.
#[derive(Clone, PartialEq)]
pub struct Operator(DMatrix<C64>);

impl Operator {
    /// Wraps a square matrix, rejecting non-finite entries.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        for j in 0..matrix.ncols() {
            for i in 0..matrix.nrows() {
                let z = matrix[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(matrix))
    }

    /// Builds from row-major rows of entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self(matrix)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// The matrix unit `E_{ij}` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = ONE;
        Self(m)
    }

    /// Diagonal matrix with the given real entries.
    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(entries[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// Side length `n`.
    pub fn side(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.side() == 0 {
            return 0.0;
        }
        let n = self.side();
        faer::Mat::<C64>::from_fn(n, n, |i, j| self.0[(i, j)])
            .singular_values()
            .expect("SVD of a finite matrix converges")
            .into_iter()
            .fold(0.0_f64, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Keeps the entries in `rows × cols` and zeroes the rest. For coordinate
    /// projections `P`, `Q` this is exactly `P·self·Q`.
    pub fn restrict(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let n = self.side();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if rows.contains(&i) && cols.contains(&j) {
                self.0[(i, j)]
            } else {
                ZERO
            }
        }))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.0 * v
    }

    /// Column-major vectorization.
    pub fn vectorize(&self) -> Vector {
        DVector::from_column_slice(self.0.as_slice())
    }

    /// Inverse of [`Operator::vectorize`].
    pub(crate) fn from_column_major(n: usize, data: &[C64]) -> Self {
        Self(DMatrix::from_column_slice(n, n, data))
    }

    pub(crate) fn check_side(&self, n: usize) -> Result<()> {
        if self.side() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                found: self.side(),
            })
        }
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator{}", self.0)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                Operator(&self.0 $op &rhs.0)
            }
        }
        impl $trait<Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: Operator) -> Operator {
                Operator(self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator(-&self.0)
    }
}

/// Frobenius inner product `tr(b* a)`.
pub fn trace_inner(a: &Operator, b: &Operator) -> C64 {
    a.0.iter().zip(b.0.iter()).map(|(x, y)| y.conj() * x).sum()
}

/// Standard basis vector `e_i` of `C^n` (zero-based).
pub fn basis_vector(n: usize, i: usize) -> Vector {
    let mut v = DVector::zeros(n);
    v[i] = ONE;
    v
}

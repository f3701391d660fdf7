//! Subspaces of `B(C^n) ≅ C^{n²}` held as orthonormal bases of
//! column-major vectorized matrices.
//!
//! Rank decisions go through a single primitive, [`orthonormal_columns`],
//! which keeps singular directions with `σ > max(tol, 1e−9·max(1, σ_max))`.
//! Membership uses the matching residual test
//! `‖T − proj(T)‖_F ≤ max(tol, 1e−9)·max(1, ‖T‖_F)`.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operator::{Operator, Vector, C64, ZERO};

/// Relative (and small-scale absolute) rank threshold.
pub const RANK_EPS: f64 = 1e-9;

/// Directions this far below the running `σ_max` are dropped while
/// accumulating generators; the final threshold is applied afterwards.
const COMPRESS_EPS: f64 = 1e-14;

/// A linear transformation of `B(H)`, used by [`OperatorSubspace::close_under`].
pub type LinearMap<'a> = Box<dyn Fn(&Operator) -> Operator + Send + Sync + 'a>;

/// Incremental range finder. The left singular data of `[U·Σ | C]` equal
/// those of the full generator matrix, so generators can be folded in chunk
/// by chunk without ever forming the whole matrix.
struct RangeFinder {
    dim: usize,
    chunk: usize,
    u: DMatrix<C64>,
    sigma: Vec<f64>,
    pending: Vec<Vector>,
}

impl RangeFinder {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            chunk: dim.max(16),
            u: DMatrix::zeros(dim, 0),
            sigma: Vec::new(),
            pending: Vec::new(),
        }
    }

    fn push(&mut self, v: Vector) {
        debug_assert_eq!(v.len(), self.dim);
        if v.iter().all(|z| *z == ZERO) {
            return;
        }
        self.pending.push(v);
        if self.pending.len() >= self.chunk {
            self.compress();
        }
    }

    fn compress(&mut self) {
        if self.pending.is_empty() {
            return;
        }
        let r = self.sigma.len();
        let cols = r + self.pending.len();
        let mut m = DMatrix::zeros(self.dim, cols);
        for (c, s) in self.sigma.iter().enumerate() {
            m.set_column(c, &(self.u.column(c) * C64::new(*s, 0.0)));
        }
        for (c, v) in self.pending.drain(..).enumerate() {
            m.set_column(r + c, &v);
        }
        // nalgebra's SVD can return a wrong U for rank-deficient input, so the
        // decomposition goes through faer.
        let a = faer::Mat::<C64>::from_fn(self.dim, cols, |i, j| m[(i, j)]);
        let svd = a.thin_svd().expect("SVD of a finite matrix converges");
        let u = svd.U();
        let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
        // faer sorts singular values in nonincreasing order
        let smax = s.first().copied().unwrap_or(0.0);
        let keep: Vec<usize> = (0..s.len())
            .filter(|&i| s[i] > COMPRESS_EPS * smax && s[i] > 0.0)
            .collect();
        self.u = DMatrix::from_fn(self.dim, keep.len(), |row, c| u[(row, keep[c])]);
        self.sigma = keep.iter().map(|&i| s[i]).collect();
    }

    fn finish(mut self, tol: f64) -> DMatrix<C64> {
        self.compress();
        let smax = self.sigma.first().copied().unwrap_or(0.0);
        let threshold = tol.max(RANK_EPS * smax.max(1.0));
        let rank = self.sigma.iter().take_while(|&&s| s > threshold).count();
        self.u.columns(0, rank).into_owned()
    }
}

/// Orthonormal basis (as columns) of the span of `columns` in `C^dim`.
pub fn orthonormal_columns<I>(dim: usize, columns: I, tol: f64) -> DMatrix<C64>
where
    I: IntoIterator<Item = Vector>,
{
    let mut finder = RangeFinder::new(dim);
    for c in columns {
        finder.push(c);
    }
    finder.finish(tol)
}

/// Orthonormal basis of the orthogonal complement of the column span of an
/// orthonormal `basis`.
pub fn complement_columns(basis: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    let dim = basis.nrows();
    let projector = DMatrix::<C64>::identity(dim, dim) - basis * basis.adjoint();
    orthonormal_columns(dim, projector.column_iter().map(|c| c.into_owned()), tol)
}

#[derive(Clone)]
pub struct OperatorSubspace {
    side: usize,
    basis: DMatrix<C64>,
    tol: f64,
}

impl fmt::Debug for OperatorSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorSubspace")
            .field("side", &self.side)
            .field("dim", &self.dim())
            .field("tol", &self.tol)
            .finish()
    }
}

impl OperatorSubspace {
    pub fn zero(side: usize, tol: f64) -> Self {
        Self {
            side,
            basis: DMatrix::zeros(side * side, 0),
            tol,
        }
    }

    /// All of `B(C^n)`.
    pub fn full(side: usize, tol: f64) -> Self {
        let d = side * side;
        Self {
            side,
            basis: DMatrix::identity(d, d),
            tol,
        }
    }

    /// Orthonormal basis of the span of `matrices`. `tol = 0` means the
    /// default relative policy only.
    pub fn span<'a, I>(side: usize, matrices: I, tol: f64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Operator>,
    {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "tolerance must be finite and nonnegative, got {tol}"
            )));
        }
        let mut finder = RangeFinder::new(side * side);
        for m in matrices {
            m.check_side(side)?;
            let v = m.vectorize();
            if let Some(pos) = v.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NonFinite {
                    row: pos % side,
                    col: pos / side,
                });
            }
            finder.push(v);
        }
        Ok(Self {
            side,
            basis: finder.finish(tol),
            tol,
        })
    }

    pub(crate) fn from_columns(side: usize, basis: DMatrix<C64>, tol: f64) -> Self {
        debug_assert_eq!(basis.nrows(), side * side);
        Self { side, basis, tol }
    }

    /// Side length `n` of member matrices.
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Same subspace with a different tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// The basis as column-major vectors, one per column.
    pub fn basis_matrix(&self) -> &DMatrix<C64> {
        &self.basis
    }

    pub fn basis(&self) -> Vec<Operator> {
        self.basis
            .column_iter()
            .map(|c| Operator::from_column_major(self.side, c.as_slice()))
            .collect()
    }

    /// Gram matrix of the stored basis under the trace inner product.
    pub fn gram(&self) -> DMatrix<C64> {
        self.basis.adjoint() * &self.basis
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.side == other.side {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.side,
                found: other.side,
            })
        }
    }

    fn joint_tol(&self, other: &Self) -> f64 {
        self.tol.max(other.tol)
    }

    /// Orthogonal projection of `t` onto the subspace.
    pub fn project(&self, t: &Operator) -> Result<Operator> {
        t.check_side(self.side)?;
        let v = t.vectorize();
        let coeffs = self.basis.adjoint() * &v;
        let p: DVector<C64> = &self.basis * coeffs;
        Ok(Operator::from_column_major(self.side, p.as_slice()))
    }

    /// Frobenius norm of `t − proj(t)`.
    pub fn residual(&self, t: &Operator) -> Result<f64> {
        let p = self.project(t)?;
        Ok((t - &p).frobenius_norm())
    }

    fn accepts(&self, t: &Operator, residual: f64) -> bool {
        residual <= self.tol.max(RANK_EPS) * t.frobenius_norm().max(1.0)
    }

    pub fn contains(&self, t: &Operator) -> Result<bool> {
        let r = self.residual(t)?;
        Ok(self.accepts(t, r))
    }

    /// First basis element of `other` that is not in `self`, with its
    /// residual.
    pub fn first_missing(&self, other: &Self) -> Result<Option<(Operator, f64)>> {
        self.check_same(other)?;
        for b in other.basis() {
            let r = self.residual(&b)?;
            if !self.accepts(&b, r) {
                return Ok(Some((b, r)));
            }
        }
        Ok(None)
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &Self) -> Result<bool> {
        Ok(self.first_missing(other)?.is_none())
    }

    pub fn equals(&self, other: &Self) -> Result<bool> {
        Ok(self.includes(other)? && other.includes(self)?)
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let tol = self.joint_tol(other);
        let cols = self
            .basis
            .column_iter()
            .chain(other.basis.column_iter())
            .map(|c| c.into_owned());
        Ok(Self::from_columns(
            self.side,
            orthonormal_columns(self.side * self.side, cols, tol),
            tol,
        ))
    }

    /// Orthogonal complement in `B(C^n)` under the trace inner product.
    pub fn complement(&self) -> Self {
        Self::from_columns(self.side, complement_columns(&self.basis, self.tol), self.tol)
    }

    /// `a ∩ b = (a^⊥ + b^⊥)^⊥`.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let tol = self.joint_tol(other);
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.side, tol));
        }
        let a = self.clone().with_tol(tol).complement();
        let b = other.clone().with_tol(tol).complement();
        Ok(a.sum(&b)?.complement())
    }

    /// Least subspace containing `self` and invariant under every map, by
    /// fixpoint iteration with re-orthonormalization each round.
    pub fn close_under(&self, maps: &[LinearMap<'_>]) -> Self {
        let full = self.side * self.side;
        let mut current = self.clone();
        for _ in 0..=full {
            if current.dim() == 0 || current.dim() == full {
                return current;
            }
            let basis = current.basis();
            let images = basis
                .iter()
                .flat_map(|b| maps.iter().map(move |f| f(b)))
                .collect::<Vec<_>>();
            let cols = current
                .basis
                .column_iter()
                .map(|c| c.into_owned())
                .chain(images.iter().map(|m| m.vectorize()));
            let next = Self::from_columns(
                self.side,
                orthonormal_columns(full, cols, current.tol),
                current.tol,
            );
            if next.dim() == current.dim() {
                return current;
            }
            current = next;
        }
        current
    }
}

//! Finite nests of coordinate projections, the nest algebra `T(N)` and its
//! diagonal `D(N)`.
//!
//! A nest on `C^n` is stored as its block boundaries `0 = b_0 < … < b_m = n`.
//! Nest index `k` denotes the projection `P_k` onto the first `b_k`
//! coordinates, so `P_0 = 0` and `P_m = I`. Atom `k` (for `1 ≤ k ≤ m`) is the
//! coordinate range `b_{k−1}..b_k`.

use std::ops::Range;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::{Operator, Vector, ONE, ZERO};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Nest {
    boundaries: Vec<usize>,
}

/// Nest data attached to a rank-one operator `x ⊗ y`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneProfile {
    pub x: Vector,
    pub y: Vector,
    /// Least nest index `k` with `P_k y = y`.
    pub p_y: usize,
    /// Greatest nest index `k` with `P_k x = 0`.
    pub phat_x: usize,
}

impl Nest {
    pub fn new(boundaries: Vec<usize>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(Error::InvalidNest(
                "need at least the boundaries 0 and n".into(),
            ));
        }
        if boundaries[0] != 0 {
            return Err(Error::InvalidNest("first boundary must be 0".into()));
        }
        if let Some(w) = boundaries.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidNest(format!(
                "boundaries must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self { boundaries })
    }

    /// The trivial nest `{0, I}` on `C^n`.
    pub fn trivial(n: usize) -> Result<Self> {
        Self::new(vec![0, n])
    }

    /// The maximal nest `{0, P_1, …, P_{n−1}, I}` whose algebra is the upper
    /// triangular matrices.
    pub fn maximal(n: usize) -> Result<Self> {
        Self::new((0..=n).collect())
    }

    pub fn dimension(&self) -> usize {
        *self.boundaries.last().unwrap()
    }

    /// Number of atoms `m`; nest indices run over `0..=m`.
    pub fn len(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// `b_k`, the rank of `P_k`.
    pub fn boundary(&self, k: usize) -> Result<usize> {
        self.check_index(k)?;
        Ok(self.boundaries[k])
    }

    pub fn check_index(&self, k: usize) -> Result<()> {
        if k <= self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: k,
                max: self.len(),
            })
        }
    }

    /// Coordinate range of atom `k`, `1 ≤ k ≤ m`.
    pub fn atom(&self, k: usize) -> Range<usize> {
        self.boundaries[k - 1]..self.boundaries[k]
    }

    pub fn atom_sizes(&self) -> Vec<usize> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Atom containing coordinate `i`.
    pub fn atom_of(&self, i: usize) -> usize {
        debug_assert!(i < self.dimension());
        self.boundaries.partition_point(|&b| b <= i)
    }

    /// `P_k` as a diagonal 0/1 matrix.
    pub fn projection(&self, k: usize) -> Result<Operator> {
        let b = self.boundary(k)?;
        let n = self.dimension();
        Ok(Operator::from_matrix_unchecked(DMatrix::from_fn(n, n, |i, j| {
            if i == j && i < b {
                ONE
            } else {
                ZERO
            }
        })))
    }

    /// `P_-`: on a finite chain the join of the strictly smaller projections is
    /// the immediate predecessor.
    pub fn predecessor(&self, k: usize) -> Result<usize> {
        self.check_index(k)?;
        if k == 0 {
            return Err(Error::NoPredecessor);
        }
        Ok(k - 1)
    }

    /// Matrix units spanning `T(N)`: `E_{ij}` with `atom(i) ≤ atom(j)`, in
    /// row-major order.
    pub fn algebra_basis(&self) -> Vec<Operator> {
        let n = self.dimension();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.atom_of(i) <= self.atom_of(j) {
                    out.push(Operator::unit(n, i, j));
                }
            }
        }
        out
    }

    /// Matrix units spanning `D(N)`: `E_{ij}` with `atom(i) = atom(j)`.
    pub fn diagonal_basis(&self) -> Vec<Operator> {
        let n = self.dimension();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.atom_of(i) == self.atom_of(j) {
                    out.push(Operator::unit(n, i, j));
                }
            }
        }
        out
    }

    /// True iff `P^⊥ T P = 0` for every nest projection, checked entrywise
    /// with the given absolute tolerance.
    pub fn in_algebra(&self, t: &Operator, tol: f64) -> Result<bool> {
        t.check_side(self.dimension())?;
        let n = self.dimension();
        for i in 0..n {
            for j in 0..n {
                if self.atom_of(i) > self.atom_of(j) && t.get(i, j).norm() > tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The diagonal expectation `π(T) = Σ_k A_k T A_k` over the atoms.
    pub fn expectation(&self, t: &Operator) -> Result<Operator> {
        t.check_side(self.dimension())?;
        let n = self.dimension();
        Ok(Operator::from_matrix_unchecked(DMatrix::from_fn(n, n, |i, j| {
            if self.atom_of(i) == self.atom_of(j) {
                t.get(i, j)
            } else {
                ZERO
            }
        })))
    }

    /// `(P_z, P̂_z)`: the least nest index fixing `z` and the greatest nest
    /// index annihilating it. Support is decided by exact nonzeroness.
    pub fn vector_projections(&self, z: &Vector) -> Result<(usize, usize)> {
        let n = self.dimension();
        if z.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: z.len(),
            });
        }
        let first = z.iter().position(|c| *c != ZERO);
        let last = z.iter().rposition(|c| *c != ZERO);
        match (first, last) {
            (Some(first), Some(last)) => {
                let p_z = self.boundaries.partition_point(|&b| b < last + 1);
                let phat_z = self.boundaries.partition_point(|&b| b <= first) - 1;
                Ok((p_z, phat_z))
            }
            _ => Ok((0, self.len())),
        }
    }

    pub fn rank_one_profile(&self, x: &Vector, y: &Vector) -> Result<RankOneProfile> {
        let (p_y, _) = self.vector_projections(y)?;
        let (_, phat_x) = self.vector_projections(x)?;
        Ok(RankOneProfile {
            x: x.clone(),
            y: y.clone(),
            p_y,
            phat_x,
        })
    }

    /// Whether `x ⊗ y` lies in `T(N)`: with `P = P_y`, test `P_- x = 0`.
    pub fn rank_one_in_algebra(&self, x: &Vector, y: &Vector) -> Result<bool> {
        let (p_y, _) = self.vector_projections(y)?;
        let (_, phat_x) = self.vector_projections(x)?;
        let x_zero = x.iter().all(|c| *c == ZERO);
        if x_zero || p_y == 0 {
            return Ok(true);
        }
        let pred = self.predecessor(p_y)?;
        // P_- x = 0 iff x vanishes on the first b_{pred} coordinates.
        Ok(phat_x >= pred)
    }
}

/// The rank-one operator `x ⊗ y : z ↦ ⟨z, x⟩ y`, whose matrix is `y·x*`.
pub fn rank_one(x: &Vector, y: &Vector) -> Result<Operator> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            found: x.len(),
        });
    }
    Ok(Operator::from_matrix_unchecked(y * x.adjoint()))
}

//! Corner blocks `Q·B(H)·P^⊥`, the largest bimodule `J(M)` contained in a
//! subspace, and the nest homomorphism `φ` of a subspace.

use crate::error::{Error, Result};
use crate::nest::{rank_one, Nest};
use crate::operator::{Operator, Vector};
use crate::subspace::{LinearMap, OperatorSubspace};

/// A monotone self-map of the nest indices `0..=m` with `φ(0) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NestMap {
    table: Vec<usize>,
}

impl NestMap {
    pub fn new(nest: &Nest, table: Vec<usize>) -> Result<Self> {
        check_table(nest, &table)?;
        if table[0] != 0 {
            return Err(Error::InvalidTable(format!(
                "φ(0) must be 0, got {}",
                table[0]
            )));
        }
        if let Some(k) = (1..table.len()).find(|&k| table[k - 1] > table[k]) {
            return Err(Error::NotMonotone { index: k });
        }
        Ok(Self { table })
    }

    pub fn identity(nest: &Nest) -> Self {
        Self {
            table: (0..=nest.len()).collect(),
        }
    }

    /// `φ(0) = 0` and `φ(k) = I` otherwise.
    pub fn top(nest: &Nest) -> Self {
        let m = nest.len();
        Self {
            table: (0..=m).map(|k| if k == 0 { 0 } else { m }).collect(),
        }
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, k: usize) -> usize {
        self.table[k]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

fn check_table(nest: &Nest, table: &[usize]) -> Result<()> {
    let m = nest.len();
    if table.len() != m + 1 {
        return Err(Error::InvalidTable(format!(
            "expected {} entries, got {}",
            m + 1,
            table.len()
        )));
    }
    if let Some(&v) = table.iter().find(|&&v| v > m) {
        return Err(Error::IndexOutOfRange { index: v, max: m });
    }
    Ok(())
}

/// The corner `Q·B(H)·P^⊥` with `Q = P_q` and `P = P_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CornerBlock {
    pub q: usize,
    pub p: usize,
}

impl CornerBlock {
    pub fn new(q: usize, p: usize) -> Self {
        Self { q, p }
    }

    /// Matrix units `(i, j)` (zero-based) spanning the corner.
    pub fn units(&self, nest: &Nest) -> Result<Vec<(usize, usize)>> {
        let rows = nest.boundary(self.q)?;
        let first_col = nest.boundary(self.p)?;
        let n = nest.dimension();
        Ok((0..rows)
            .flat_map(|i| (first_col..n).map(move |j| (i, j)))
            .collect())
    }

    /// `b_q · (n − b_p)`.
    pub fn dim(&self, nest: &Nest) -> Result<usize> {
        Ok(nest.boundary(self.q)? * (nest.dimension() - nest.boundary(self.p)?))
    }
}

fn units_to_operators(n: usize, units: &[(usize, usize)]) -> Vec<Operator> {
    units.iter().map(|&(i, j)| Operator::unit(n, i, j)).collect()
}

fn check_side(space: &OperatorSubspace, nest: &Nest) -> Result<()> {
    if space.side() == nest.dimension() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: nest.dimension(),
            found: space.side(),
        })
    }
}

pub fn corner_subspace(nest: &Nest, block: CornerBlock, tol: f64) -> Result<OperatorSubspace> {
    let n = nest.dimension();
    let ops = units_to_operators(n, &block.units(nest)?);
    OperatorSubspace::span(n, ops.iter(), tol)
}

/// `unit_membership(M)[i][j]` records whether `E_{ij} ∈ M`.
fn unit_membership(m: &OperatorSubspace) -> Result<Vec<Vec<bool>>> {
    let n = m.side();
    (0..n)
        .map(|i| (0..n).map(|j| m.contains(&Operator::unit(n, i, j))).collect())
        .collect()
}

/// Corners are spanned by matrix units, so `Q·B(H)·P^⊥ ⊆ M` iff each of
/// its units is in `M`. Indexed `[q][p]`.
fn corner_table(m: &OperatorSubspace, nest: &Nest) -> Result<Vec<Vec<bool>>> {
    check_side(m, nest)?;
    let units = unit_membership(m)?;
    let len = nest.len();
    let mut out = vec![vec![false; len + 1]; len + 1];
    for (q, row) in out.iter_mut().enumerate() {
        for (p, cell) in row.iter_mut().enumerate() {
            *cell = CornerBlock::new(q, p)
                .units(nest)?
                .iter()
                .all(|&(i, j)| units[i][j]);
        }
    }
    Ok(out)
}

pub fn corner_contained(m: &OperatorSubspace, nest: &Nest, block: CornerBlock) -> Result<bool> {
    check_side(m, nest)?;
    let n = nest.dimension();
    for (i, j) in block.units(nest)? {
        if !m.contains(&Operator::unit(n, i, j))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `x ⊗ y` belongs to `C(M)`, i.e. `P_y·B(H)·P̂_x^⊥ ⊆ M`.
pub fn in_corner_set(m: &OperatorSubspace, nest: &Nest, x: &Vector, y: &Vector) -> Result<bool> {
    let (p_y, _) = nest.vector_projections(y)?;
    let (_, phat_x) = nest.vector_projections(x)?;
    corner_contained(m, nest, CornerBlock::new(p_y, phat_x))
}

/// `J(M)`: the span of every corner `Q·B(H)·P^⊥` contained in `M`.
pub fn largest_bimodule(m: &OperatorSubspace, nest: &Nest) -> Result<OperatorSubspace> {
    let table = corner_table(m, nest)?;
    let n = nest.dimension();
    let len = nest.len();
    let mut included = vec![vec![false; n]; n];
    for (q, row) in table.iter().enumerate().skip(1) {
        // p = m gives the zero corner
        for (p, &inside) in row.iter().enumerate().take(len) {
            if inside {
                for (i, j) in CornerBlock::new(q, p).units(nest)? {
                    included[i][j] = true;
                }
            }
        }
    }
    let ops: Vec<Operator> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| included[i][j])
        .map(|(i, j)| Operator::unit(n, i, j))
        .collect();
    OperatorSubspace::span(n, ops.iter(), m.tol())
}

/// `φ(k) = ∨{q : P_q·B(H)·P_r^⊥ ⊆ M for some r < k}`, with `φ(0) = 0`.
pub fn phi_of(m: &OperatorSubspace, nest: &Nest) -> Result<NestMap> {
    let table = corner_table(m, nest)?;
    let len = nest.len();
    let mut phi = vec![0; len + 1];
    for (k, slot) in phi.iter_mut().enumerate().skip(1) {
        *slot = (0..=len)
            .filter(|&q| (0..k).any(|r| table[q][r]))
            .max()
            .unwrap_or(0);
    }
    NestMap::new(nest, phi)
}

/// `{T : φ(P_k)^⊥ T P_k = 0 for all k}` for an arbitrary table of length
/// `m + 1`; monotonicity is not required.
pub fn bimodule_from_table(nest: &Nest, table: &[usize], tol: f64) -> Result<OperatorSubspace> {
    check_table(nest, table)?;
    let n = nest.dimension();
    let b = nest.boundaries();
    let allowed = |i: usize, j: usize| {
        table
            .iter()
            .enumerate()
            .all(|(k, &phik)| j >= b[k] || i < b[phik])
    };
    let ops: Vec<Operator> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| allowed(i, j))
        .map(|(i, j)| Operator::unit(n, i, j))
        .collect();
    OperatorSubspace::span(n, ops.iter(), tol)
}

/// The bimodule `{T : φ(P)^⊥ T P = 0 for all P ∈ N}`.
pub fn bimodule_from_map(nest: &Nest, phi: &NestMap, tol: f64) -> Result<OperatorSubspace> {
    bimodule_from_table(nest, phi.table(), tol)
}

fn multiplication_maps(nest: &Nest) -> Vec<LinearMap<'static>> {
    let mut maps: Vec<LinearMap<'static>> = Vec::new();
    for g in nest.algebra_basis() {
        let h = g.clone();
        maps.push(Box::new(move |t: &Operator| &g * t));
        maps.push(Box::new(move |t: &Operator| t * &h));
    }
    maps
}

/// Smallest bimodule containing `M`.
pub fn bimodule_closure(m: &OperatorSubspace, nest: &Nest) -> Result<OperatorSubspace> {
    check_side(m, nest)?;
    Ok(m.close_under(&multiplication_maps(nest)))
}

/// A product `G·B` or `B·G` (`G` a unit of `T(N)`, `B` a basis element of
/// `M`) that falls outside `M`, with its residual.
pub fn bimodule_violation(m: &OperatorSubspace, nest: &Nest) -> Result<Option<(Operator, f64)>> {
    check_side(m, nest)?;
    let units = nest.algebra_basis();
    for b in m.basis() {
        for g in &units {
            for prod in [g * &b, &b * g] {
                let r = m.residual(&prod)?;
                if r > m.tol().max(crate::subspace::RANK_EPS) * prod.frobenius_norm().max(1.0) {
                    return Ok(Some((prod, r)));
                }
            }
        }
    }
    Ok(None)
}

pub fn is_bimodule(m: &OperatorSubspace, nest: &Nest) -> Result<bool> {
    Ok(bimodule_violation(m, nest)?.is_none())
}

/// `(x ⊗ y ∈ V, P_y·B(H)·P̂_x^⊥ ⊆ V)` for a bimodule `V`; the two must agree.
pub fn rank_one_membership_check(
    v: &OperatorSubspace,
    nest: &Nest,
    x: &Vector,
    y: &Vector,
) -> Result<(bool, bool)> {
    if !is_bimodule(v, nest)? {
        return Err(Error::NotBimodule);
    }
    let direct = v.contains(&rank_one(x, y)?)?;
    let corner = in_corner_set(v, nest, x, y)?;
    Ok((direct, corner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::basis_vector;

    fn nest(b: &[usize]) -> Nest {
        Nest::new(b.to_vec()).unwrap()
    }

    fn e(n: usize, i: usize, j: usize) -> Operator {
        Operator::unit(n, i - 1, j - 1)
    }

    fn span(n: usize, ms: &[Operator]) -> OperatorSubspace {
        OperatorSubspace::span(n, ms.iter(), 0.0).unwrap()
    }

    /// Columns 1..2 forbidden except `a_12`, `a_22`; the 17-dimensional
    /// bimodule from the 5×5 example.
    fn column_pattern() -> OperatorSubspace {
        let ops: Vec<Operator> = (1..=5)
            .flat_map(|i| (1..=5).map(move |j| (i, j)))
            .filter(|&(i, j)| j >= 3 || (j == 2 && i <= 2))
            .map(|(i, j)| e(5, i, j))
            .collect();
        span(5, &ops)
    }

    #[test]
    fn corner_examples() {
        let n2 = nest(&[0, 1, 2]);
        let c = corner_subspace(&n2, CornerBlock::new(1, 1), 0.0).unwrap();
        assert!(c.equals(&span(2, &[e(2, 1, 2)])).unwrap());
        assert_eq!(corner_subspace(&n2, CornerBlock::new(2, 0), 0.0).unwrap().dim(), 4);
        assert_eq!(corner_subspace(&n2, CornerBlock::new(0, 1), 0.0).unwrap().dim(), 0);
        assert_eq!(corner_subspace(&n2, CornerBlock::new(2, 2), 0.0).unwrap().dim(), 0);

        let n5 = nest(&[0, 1, 2, 3, 4, 5]);
        let block = CornerBlock::new(2, 2);
        let c = corner_subspace(&n5, block, 0.0).unwrap();
        assert_eq!(c.dim(), 6);
        assert_eq!(block.dim(&n5).unwrap(), 2 * 3);
        assert!(corner_subspace(&n5, CornerBlock::new(6, 0), 0.0).is_err());
    }

    #[test]
    fn corner_containment_examples() {
        let n2 = nest(&[0, 1, 2]);
        let m = span(2, &[e(2, 1, 2)]);
        assert!(corner_contained(&m, &n2, CornerBlock::new(1, 1)).unwrap());
        assert!(!corner_contained(&m, &n2, CornerBlock::new(2, 1)).unwrap());

        let n5 = nest(&[0, 1, 2, 3, 4, 5]);
        assert!(corner_contained(&column_pattern(), &n5, CornerBlock::new(5, 2)).unwrap());
        assert!(!corner_contained(&column_pattern(), &n5, CornerBlock::new(5, 1)).unwrap());
    }

    #[test]
    fn corner_set_examples() {
        let n2 = nest(&[0, 1, 2]);
        let m = span(2, &[e(2, 1, 2)]);
        let e1 = basis_vector(2, 0);
        let e2 = basis_vector(2, 1);
        assert!(in_corner_set(&m, &n2, &e2, &e1).unwrap());
        assert!(!in_corner_set(&m, &n2, &e1, &e2).unwrap());
        let full = OperatorSubspace::full(2, 0.0);
        let x = Vector::from_vec(vec![crate::C64::new(0.3, 1.0), crate::C64::new(-2.0, 0.0)]);
        assert!(in_corner_set(&full, &n2, &x, &e2).unwrap());
    }

    #[test]
    fn largest_bimodule_of_sl2() {
        let n2 = nest(&[0, 1, 2]);
        let sl2 = span(2, &[e(2, 1, 2), e(2, 2, 1), e(2, 1, 1) - e(2, 2, 2)]);
        // oracle: enumerate all 9 (q, p) corners and keep those inside sl2
        let mut gens = Vec::new();
        for q in 0..=2 {
            for p in 0..=2 {
                let c = corner_subspace(&n2, CornerBlock::new(q, p), 0.0).unwrap();
                if sl2.includes(&c).unwrap() {
                    gens.extend(c.basis());
                }
            }
        }
        let oracle = span(2, &gens);
        let j = largest_bimodule(&sl2, &n2).unwrap();
        assert!(j.equals(&oracle).unwrap());
        assert!(j.equals(&span(2, &[e(2, 1, 2)])).unwrap());
    }

    #[test]
    fn largest_bimodule_fixes_bimodules() {
        let n2 = nest(&[0, 1, 2]);
        let m = span(2, &[e(2, 1, 2), e(2, 2, 2)]);
        assert!(is_bimodule(&m, &n2).unwrap());
        assert!(largest_bimodule(&m, &n2).unwrap().equals(&m).unwrap());
    }

    #[test]
    fn largest_bimodule_of_example_module() {
        let n5 = nest(&[0, 1, 2, 3, 4, 5]);
        let mut gens = column_pattern().basis();
        gens.push(Operator::identity(5));
        let l = span(5, &gens);
        assert_eq!(l.dim(), 18);
        // E11 = I − (E22 + … + E55) lies in L, so L is itself a bimodule and
        // J(L) = L rather than the 17-dimensional column pattern.
        assert!(l.contains(&e(5, 1, 1)).unwrap());
        assert!(is_bimodule(&l, &n5).unwrap());
        let j = largest_bimodule(&l, &n5).unwrap();
        assert_eq!(j.dim(), 18);
        assert!(j.equals(&l).unwrap());
        assert!(j.includes(&column_pattern()).unwrap());
    }

    #[test]
    fn phi_examples() {
        let n2 = nest(&[0, 1, 2]);
        let m = span(2, &[e(2, 1, 2)]);
        assert_eq!(phi_of(&m, &n2).unwrap().table(), &[0, 0, 1]);
        assert_eq!(
            phi_of(&OperatorSubspace::full(2, 0.0), &n2).unwrap().table(),
            &[0, 2, 2]
        );
        assert_eq!(
            phi_of(&OperatorSubspace::zero(2, 0.0), &n2).unwrap().table(),
            &[0, 0, 0]
        );

        // K(L) of the 5×5 example: the column pattern with a_22 = 0
        let n5 = nest(&[0, 1, 2, 3, 4, 5]);
        let k: Vec<Operator> = column_pattern()
            .basis()
            .into_iter()
            .map(|b| &b - &b.restrict(1..2, 1..2))
            .collect();
        let k = span(5, &k);
        assert_eq!(k.dim(), 16);
        assert_eq!(phi_of(&k, &n5).unwrap().table(), &[0, 0, 1, 5, 5, 5]);
    }

    #[test]
    fn bimodule_from_map_examples() {
        let n2 = nest(&[0, 1, 2]);
        let phi = NestMap::new(&n2, vec![0, 0, 1]).unwrap();
        let m = bimodule_from_map(&n2, &phi, 0.0).unwrap();
        assert!(m.equals(&span(2, &[e(2, 1, 2)])).unwrap());

        let n = nest(&[0, 2, 3, 6]);
        let t = bimodule_from_map(&n, &NestMap::identity(&n), 0.0).unwrap();
        assert!(t.equals(&span(6, &n.algebra_basis())).unwrap());
        let b = bimodule_from_map(&n, &NestMap::top(&n), 0.0).unwrap();
        assert_eq!(b.dim(), 36);

        assert_eq!(
            NestMap::new(&n2, vec![0, 2, 1]),
            Err(Error::NotMonotone { index: 2 })
        );
        assert!(NestMap::new(&n2, vec![1, 1, 1]).is_err());
        assert!(NestMap::new(&n2, vec![0, 1]).is_err());
        assert!(NestMap::new(&n2, vec![0, 1, 3]).is_err());
    }

    #[test]
    fn bimodule_from_map_matches_defining_relation() {
        // unit-by-unit test of φ(P)^⊥ E P = 0 against the table rule
        let n = nest(&[0, 1, 3, 4]);
        let phi = NestMap::new(&n, vec![0, 1, 1, 3]).unwrap();
        let m = bimodule_from_map(&n, &phi, 0.0).unwrap();
        let dim = n.dimension();
        let mut expected = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let u = Operator::unit(dim, i, j);
                let ok = (0..=n.len()).all(|k| {
                    let q_perp = &Operator::identity(dim) - &n.projection(phi.apply(k)).unwrap();
                    (&(&q_perp * &u) * &n.projection(k).unwrap()).is_zero()
                });
                if ok {
                    expected.push(u);
                }
            }
        }
        assert!(m.equals(&span(dim, &expected)).unwrap());
    }

    #[test]
    fn bimodule_closure_examples() {
        let n2 = nest(&[0, 1, 2]);
        let m = span(2, &[e(2, 1, 2)]);
        assert!(bimodule_closure(&m, &n2).unwrap().equals(&m).unwrap());
        assert_eq!(bimodule_closure(&span(2, &[e(2, 2, 1)]), &n2).unwrap().dim(), 4);
        assert_eq!(
            bimodule_closure(&OperatorSubspace::zero(2, 0.0), &n2).unwrap().dim(),
            0
        );
    }

    #[test]
    fn rank_one_membership_examples() {
        let n2 = nest(&[0, 1, 2]);
        let v = span(2, &[e(2, 1, 2)]);
        let e1 = basis_vector(2, 0);
        let e2 = basis_vector(2, 1);
        assert_eq!(rank_one_membership_check(&v, &n2, &e2, &e1), Ok((true, true)));
        assert_eq!(rank_one_membership_check(&v, &n2, &e1, &e1), Ok((false, false)));
        let full = OperatorSubspace::full(2, 0.0);
        assert_eq!(rank_one_membership_check(&full, &n2, &e1, &e2), Ok((true, true)));
        let sl2 = span(2, &[e(2, 1, 2), e(2, 2, 1), e(2, 1, 1) - e(2, 2, 2)]);
        assert_eq!(
            rank_one_membership_check(&sl2, &n2, &e1, &e2),
            Err(Error::NotBimodule)
        );
    }

    #[test]
    fn raw_tables_define_bimodules() {
        let n = nest(&[0, 1, 2, 3]);
        let m = bimodule_from_table(&n, &[2, 3, 0, 1], 0.0).unwrap();
        assert!(is_bimodule(&m, &n).unwrap());
    }
}

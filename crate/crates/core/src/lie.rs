//! Lie `T(N)`-modules: closure, the bimodule `K(L)` assembled from corner
//! compressions of a Lie module, the diagonal algebra `D_K`, and the
//! structure check `J(L) ⊆ L ⊆ K(L) + D_K`.

use std::ops::Range;

use crate::bimodule::{bimodule_violation, corner_subspace, largest_bimodule, phi_of, CornerBlock, NestMap};
use crate::error::{Error, Result};
use crate::nest::{rank_one, Nest};
use crate::operator::{Operator, Vector, C64, ONE, ZERO};
use crate::subspace::{complement_columns, orthonormal_columns, LinearMap, OperatorSubspace, RANK_EPS};

/// An operator that breaks an expected inclusion, with its distance to the
/// target subspace.
#[derive(Debug, Clone)]
pub struct Witness {
    pub matrix: Operator,
    pub residual: f64,
    pub note: String,
}

/// Outcome of a named check; failed checks carry a witness.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Check {
    fn pass(name: &'static str) -> Self {
        Self {
            name,
            holds: true,
            witness: None,
        }
    }

    fn fail(name: &'static str, witness: Witness) -> Self {
        Self {
            name,
            holds: false,
            witness: Some(witness),
        }
    }

    /// Checks `inner ⊆ outer`.
    fn inclusion(name: &'static str, outer: &OperatorSubspace, inner: &OperatorSubspace) -> Result<Self> {
        Ok(match outer.first_missing(inner)? {
            None => Self::pass(name),
            Some((matrix, residual)) => Self::fail(
                name,
                Witness {
                    matrix,
                    residual,
                    note: "basis element outside the target subspace".into(),
                },
            ),
        })
    }
}

fn accepts(space: &OperatorSubspace, t: &Operator, residual: f64) -> bool {
    residual <= space.tol().max(RANK_EPS) * t.frobenius_norm().max(1.0)
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

/// `T ↦ [T, G]` for each matrix unit `G` of `T(N)`.
pub fn bracket_maps(nest: &Nest) -> Vec<LinearMap<'static>> {
    nest.algebra_basis()
        .into_iter()
        .map(|g| Box::new(move |t: &Operator| t.commutator(&g)) as LinearMap)
        .collect()
}

/// Smallest Lie `T(N)`-module containing `seed`.
pub fn lie_closure(seed: &OperatorSubspace, nest: &Nest) -> Result<OperatorSubspace> {
    check_side(seed, nest)?;
    Ok(seed.close_under(&bracket_maps(nest)))
}

/// A bracket `[B, G]` leaving `L`, if any.
pub fn lie_violation(l: &OperatorSubspace, nest: &Nest) -> Result<Option<Witness>> {
    check_side(l, nest)?;
    let units = nest.algebra_basis();
    for (bi, b) in l.basis().iter().enumerate() {
        for g in &units {
            let c = b.commutator(g);
            let r = l.residual(&c)?;
            if !accepts(l, &c, r) {
                return Ok(Some(Witness {
                    matrix: c,
                    residual: r,
                    note: format!("bracket of basis element {bi} with a unit of T(N)"),
                }));
            }
        }
    }
    Ok(None)
}

pub fn is_lie_module(l: &OperatorSubspace, nest: &Nest) -> Result<bool> {
    Ok(lie_violation(l, nest)?.is_none())
}

fn require_lie(l: &OperatorSubspace, nest: &Nest) -> Result<()> {
    if is_lie_module(l, nest)? {
        Ok(())
    } else {
        Err(Error::NotLieModule)
    }
}

/// Coordinate ranges of `P_k` and `P_k^⊥`.
fn halves(nest: &Nest, k: usize) -> (Range<usize>, Range<usize>) {
    let b = nest.boundaries()[k];
    (0..b, b..nest.dimension())
}

/// For every basis `T` of `L` and every pair of orthogonal nonzero
/// projections `A, B` from `{P_k, P_k^⊥}`, checks `A T B ∈ L`.
pub fn corner_compress_check(l: &OperatorSubspace, nest: &Nest) -> Result<bool> {
    require_lie(l, nest)?;
    let n = nest.dimension();
    let mut family: Vec<Range<usize>> = Vec::new();
    for k in 0..=nest.len() {
        let (p, p_perp) = halves(nest, k);
        family.push(p);
        family.push(p_perp);
    }
    family.retain(|r| !r.is_empty());
    family.dedup();
    let disjoint = |a: &Range<usize>, b: &Range<usize>| a.end <= b.start || b.end <= a.start;
    for t in l.basis() {
        for a in &family {
            for b in &family {
                if !disjoint(a, b) {
                    continue;
                }
                let c = t.restrict(a.clone(), b.clone());
                if !l.contains(&c)? {
                    return Ok(false);
                }
            }
        }
    }
    debug_assert!(family.iter().all(|r| r.end <= n));
    Ok(true)
}

/// `‖QTP − ½([[[T,P],Q],Q] − [[T,P],Q])‖_F` for mutually orthogonal
/// projections `P`, `Q`.
pub fn compression_identity_error(t: &Operator, p: &Operator, q: &Operator) -> f64 {
    let tp = t.commutator(p);
    let tpq = tp.commutator(q);
    let tpqq = tpq.commutator(q);
    let rhs = (&tpqq - &tpq).scale(C64::new(0.5, 0.0));
    let lhs = &(q * t) * p;
    (&lhs - &rhs).frobenius_norm()
}

/// For `A = P X P^⊥`, `B = P^⊥ T P`: returns `(‖[[A,B],A] − 2ABA‖_F, ‖A‖²‖B‖)`.
pub fn double_bracket_error(x: &Operator, t: &Operator, nest: &Nest, k: usize) -> (f64, f64) {
    let (p, p_perp) = halves(nest, k);
    let a = x.restrict(p.clone(), p_perp.clone());
    let b = t.restrict(p_perp, p);
    let lhs = a.commutator(&b).commutator(&a);
    let rhs = (&(&a * &b) * &a).scale(C64::new(2.0, 0.0));
    let scale = a.frobenius_norm().powi(2) * b.frobenius_norm();
    ((&lhs - &rhs).frobenius_norm(), scale)
}

/// For `A = P(x⊗y)P^⊥`: returns `(‖[[A, P^⊥TP], A] − 2⟨P^⊥TPy, x⟩A‖_F, ‖A‖²‖P^⊥TP‖)`.
pub fn rank_one_bracket_error(x: &Vector, y: &Vector, t: &Operator, nest: &Nest, k: usize) -> Result<(f64, f64)> {
    let (p, p_perp) = halves(nest, k);
    let a = rank_one(x, y)?.restrict(p.clone(), p_perp.clone());
    let b = t.restrict(p_perp, p);
    let lhs = a.commutator(&b).commutator(&a);
    let by = b.apply(y);
    // ⟨u, x⟩ = x* u
    let inner: C64 = x.iter().zip(by.iter()).map(|(xi, ui)| xi.conj() * ui).sum();
    let rhs = a.scale(inner * C64::new(2.0, 0.0));
    let scale = a.frobenius_norm().powi(2) * b.frobenius_norm();
    Ok(((&lhs - &rhs).frobenius_norm(), scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dichotomy {
    /// `P^⊥ L P = {0}`.
    LowerZero,
    /// `P L P^⊥ = P B(H) P^⊥`.
    UpperFull,
    /// Neither; impossible for an exact Lie module.
    Violation,
}

fn compressed_span(l: &OperatorSubspace, rows: Range<usize>, cols: Range<usize>) -> Result<OperatorSubspace> {
    let parts: Vec<Operator> = l
        .basis()
        .iter()
        .map(|t| t.restrict(rows.clone(), cols.clone()))
        .collect();
    OperatorSubspace::span(l.side(), parts.iter(), l.tol())
}

/// Either `P^⊥ L P = {0}` or `P L P^⊥` is the full corner, for `P = P_k`.
pub fn dichotomy_check(l: &OperatorSubspace, nest: &Nest, k: usize) -> Result<Dichotomy> {
    nest.check_index(k)?;
    require_lie(l, nest)?;
    if k == 0 || k == nest.len() {
        return Ok(Dichotomy::LowerZero);
    }
    let (p, p_perp) = halves(nest, k);
    if compressed_span(l, p_perp.clone(), p.clone())?.is_zero() {
        return Ok(Dichotomy::LowerZero);
    }
    let upper = compressed_span(l, p, p_perp)?;
    let corner = corner_subspace(nest, CornerBlock::new(k, k), l.tol())?;
    if upper.equals(&corner)? {
        Ok(Dichotomy::UpperFull)
    } else {
        Ok(Dichotomy::Violation)
    }
}

/// The four parts of `K(L)` and their sum.
#[derive(Debug, Clone)]
pub struct KDecomposition {
    /// span `P T P^⊥`
    pub k_v: OperatorSubspace,
    /// span `P^⊥ T P`
    pub k_l: OperatorSubspace,
    /// span `P S P^⊥ T P`
    pub k_d: OperatorSubspace,
    /// span `P^⊥ T P S P^⊥`
    pub k_delta: OperatorSubspace,
    pub k_total: OperatorSubspace,
}

/// Builds `K(L)` without checking that `L` is a Lie module.
pub fn k_parts(l: &OperatorSubspace, nest: &Nest) -> Result<KDecomposition> {
    check_side(l, nest)?;
    let n = nest.dimension();
    let tol = l.tol();
    let basis = l.basis();
    let units = nest.algebra_basis();
    let (mut v, mut lo, mut d, mut delta) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for k in 0..=nest.len() {
        let (p, p_perp) = halves(nest, k);
        // P S P^⊥ for S a unit of T(N) is either the unit or zero
        let corner_units: Vec<Operator> = units
            .iter()
            .map(|s| s.restrict(p.clone(), p_perp.clone()))
            .filter(|s| !s.is_zero())
            .collect();
        for t in &basis {
            v.push(t.restrict(p.clone(), p_perp.clone()));
            let lower = t.restrict(p_perp.clone(), p.clone());
            if !lower.is_zero() {
                for s in &corner_units {
                    d.push(s * &lower);
                    delta.push(&lower * s);
                }
            }
            lo.push(lower);
        }
    }
    let k_v = OperatorSubspace::span(n, v.iter(), tol)?;
    let k_l = OperatorSubspace::span(n, lo.iter(), tol)?;
    let k_d = OperatorSubspace::span(n, d.iter(), tol)?;
    let k_delta = OperatorSubspace::span(n, delta.iter(), tol)?;
    let k_total = k_v.sum(&k_l)?.sum(&k_d)?.sum(&k_delta)?;
    Ok(KDecomposition {
        k_v,
        k_l,
        k_d,
        k_delta,
        k_total,
    })
}

/// `K(L) = K_V + K_L + K_D + K_Δ` for a Lie module `L`.
pub fn k_decompose(l: &OperatorSubspace, nest: &Nest) -> Result<KDecomposition> {
    require_lie(l, nest)?;
    k_parts(l, nest)
}

/// A band `P_k − P_{φ(k)}` on which members of `D_K` act as a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Band {
    pub index: usize,
    pub lower: usize,
}

impl Band {
    /// Coordinate range of `P_k − P_{φ(k)}`.
    pub fn range(&self, nest: &Nest) -> Range<usize> {
        let b = nest.boundaries();
        b[self.lower]..b[self.index]
    }
}

/// Block-diagonal operators that are scalar on every band `P − φ(P)` with
/// `φ(P) < P_-`.
#[derive(Debug, Clone)]
pub struct DiagonalConstraintAlgebra {
    pub space: OperatorSubspace,
    pub phi: NestMap,
    pub bands: Vec<Band>,
}

/// `D_K` without checking that `K` is a bimodule.
pub fn diagonal_algebra_unchecked(k: &OperatorSubspace, nest: &Nest) -> Result<DiagonalConstraintAlgebra> {
    check_side(k, nest)?;
    let phi = phi_of(k, nest)?;
    let bands: Vec<Band> = (1..=nest.len())
        .filter(|&i| phi.apply(i) + 1 < i)
        .map(|i| Band {
            index: i,
            lower: phi.apply(i),
        })
        .collect();

    let n = nest.dimension();
    let coords: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| nest.atom_of(i) == nest.atom_of(j))
        .collect();
    let unknowns = coords.len() + bands.len();

    // One row per equation T_ij − λ_band·δ_ij = 0, j in the band and i in
    // the atom of j.
    let mut rows: Vec<Vector> = Vec::new();
    for (bi, band) in bands.iter().enumerate() {
        for (c, &(i, j)) in coords.iter().enumerate() {
            if band.range(nest).contains(&j) {
                let mut row = Vector::zeros(unknowns);
                row[c] = ONE;
                if i == j {
                    row[coords.len() + bi] = -ONE;
                }
                rows.push(row);
            }
        }
    }
    let row_space = orthonormal_columns(unknowns, rows, k.tol());
    let null_space = complement_columns(&row_space, k.tol());

    let members: Vec<Operator> = null_space
        .column_iter()
        .map(|col| {
            let mut m = nalgebra::DMatrix::from_element(n, n, ZERO);
            for (c, &(i, j)) in coords.iter().enumerate() {
                m[(i, j)] = col[c];
            }
            Operator::from_matrix_unchecked(m)
        })
        .collect();
    let space = OperatorSubspace::span(n, members.iter(), k.tol())?;
    Ok(DiagonalConstraintAlgebra { space, phi, bands })
}

/// `D_K` for a bimodule `K`, with `φ = phi_of(K)`.
pub fn diagonal_algebra(k: &OperatorSubspace, nest: &Nest) -> Result<DiagonalConstraintAlgebra> {
    if bimodule_violation(k, nest)?.is_some() {
        return Err(Error::NotBimodule);
    }
    diagonal_algebra_unchecked(k, nest)
}

/// Products and adjoints of basis elements stay in the space, and the space
/// sits inside `D(N)`.
pub fn star_algebra_check(space: &OperatorSubspace, nest: &Nest) -> Result<Check> {
    const NAME: &str = "dk_is_star_algebra";
    let basis = space.basis();
    let diag = OperatorSubspace::span(nest.dimension(), nest.diagonal_basis().iter(), space.tol())?;
    let mut candidates: Vec<(Operator, String)> = Vec::new();
    for (i, a) in basis.iter().enumerate() {
        candidates.push((a.clone(), format!("basis element {i} outside D(N)")));
    }
    for (i, a) in basis.iter().enumerate() {
        candidates.push((a.adjoint(), format!("adjoint of basis element {i}")));
        for (j, b) in basis.iter().enumerate() {
            candidates.push((a * b, format!("product of basis elements {i} and {j}")));
        }
    }
    for (idx, (m, note)) in candidates.into_iter().enumerate() {
        let target = if idx < basis.len() { &diag } else { space };
        let r = target.residual(&m)?;
        if !accepts(target, &m, r) {
            return Ok(Check::fail(
                NAME,
                Witness {
                    matrix: m,
                    residual: r,
                    note,
                },
            ));
        }
    }
    Ok(Check::pass(NAME))
}

/// `[B_K, G] ∈ L` for every basis `B_K` of `K` and unit `G` of `T(N)`.
pub fn commutator_into(k: &OperatorSubspace, nest: &Nest, l: &OperatorSubspace) -> Result<Check> {
    const NAME: &str = "k_commutator_in_l";
    check_side(k, nest)?;
    check_side(l, nest)?;
    let units = nest.algebra_basis();
    for (bi, b) in k.basis().iter().enumerate() {
        for (gi, g) in units.iter().enumerate() {
            let c = b.commutator(g);
            let r = l.residual(&c)?;
            if !accepts(l, &c, r) {
                return Ok(Check::fail(
                    NAME,
                    Witness {
                        matrix: c,
                        residual: r,
                        note: format!("[K basis {bi}, T(N) unit {gi}]"),
                    },
                ));
            }
        }
    }
    Ok(Check::pass(NAME))
}

/// `(P_q − P_{φ(k)}) T (P_k − P_q) = 0` for all `T ∈ L` whenever
/// `φ(k) < q < k`, with `φ` taken from `K(L)`.
pub fn band_annihilation_check(l: &OperatorSubspace, nest: &Nest) -> Result<Check> {
    const NAME: &str = "band_annihilation";
    let kd = k_parts(l, nest)?;
    let phi = phi_of(&kd.k_total, nest)?;
    let b = nest.boundaries();
    let basis = l.basis();
    for k in 1..=nest.len() {
        let low = phi.apply(k);
        for q in (low + 1)..k {
            for (ti, t) in basis.iter().enumerate() {
                let block = t.restrict(b[low]..b[q], b[q]..b[k]);
                let norm = block.frobenius_norm();
                if norm > RANK_EPS * t.frobenius_norm().max(1.0) {
                    return Ok(Check::fail(
                        NAME,
                        Witness {
                            matrix: block,
                            residual: norm,
                            note: format!("basis element {ti}, k = {k}, q = {q}"),
                        },
                    ));
                }
            }
        }
    }
    Ok(Check::pass(NAME))
}

/// For every basis `T` of `L`: `T − π(T) ∈ K` and `π(T) ∈ D_K`.
pub fn expectation_split_check(
    l: &OperatorSubspace,
    k: &OperatorSubspace,
    d_k: &OperatorSubspace,
    nest: &Nest,
) -> Result<Check> {
    const NAME: &str = "expectation_split";
    for (ti, t) in l.basis().iter().enumerate() {
        let diag = nest.expectation(t)?;
        let off = t - &diag;
        for (space, m, what) in [(k, off, "T − π(T) outside K"), (d_k, diag, "π(T) outside D_K")] {
            let r = space.residual(&m)?;
            if !accepts(space, &m, r) {
                return Ok(Check::fail(
                    NAME,
                    Witness {
                        matrix: m,
                        residual: r,
                        note: format!("basis element {ti}: {what}"),
                    },
                ));
            }
        }
    }
    Ok(Check::pass(NAME))
}

/// For a Lie ideal `L ⊆ T(N)`: `K_L = K_D = K_Δ = {0}` and `K ⊆ J ⊆ L`.
pub fn lie_ideal_refinement_check(l: &OperatorSubspace, nest: &Nest) -> Result<bool> {
    check_side(l, nest)?;
    let algebra = OperatorSubspace::span(nest.dimension(), nest.algebra_basis().iter(), l.tol())?;
    if !algebra.includes(l)? {
        return Err(Error::NotInAlgebra);
    }
    let kd = k_decompose(l, nest)?;
    let j = largest_bimodule(l, nest)?;
    Ok(kd.k_l.is_zero()
        && kd.k_d.is_zero()
        && kd.k_delta.is_zero()
        && j.includes(&kd.k_total)?
        && l.includes(&j)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Dimensions {
    pub seed: usize,
    pub l: usize,
    pub j: usize,
    pub k_v: usize,
    pub k_l: usize,
    pub k_d: usize,
    pub k_delta: usize,
    pub k: usize,
    pub d_k: usize,
}

/// Every subspace built while checking `J(L) ⊆ L ⊆ K(L) + D_K`.
#[derive(Debug, Clone)]
pub struct Constructions {
    pub l: OperatorSubspace,
    pub j: OperatorSubspace,
    pub k: KDecomposition,
    pub d_k: DiagonalConstraintAlgebra,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub dims: Dimensions,
    /// Clauses (a)–(f), in order.
    pub clauses: Vec<Check>,
    /// `J(L) ⊆ K(L)`; informational, may fail for genuine Lie modules.
    pub j_in_k: bool,
    /// `L ⊆ K(L)`; informational.
    pub l_in_k: bool,
    pub spaces: Constructions,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.holds)
    }

    pub fn phi_k(&self) -> &NestMap {
        &self.spaces.d_k.phi
    }
}

/// Closes `seed` to a Lie module `L` and checks:
/// (a) `J(L) ⊆ L`, (b) `L ⊆ K(L) + D_K`, (c) `[K(L), T(N)] ⊆ L`,
/// (d) `K_V ⊆ J(L)`, (e) `K(L)` is a bimodule, (f) `D_K` is a
/// `*`-subalgebra of `D(N)`. Failures are reported, not raised.
pub fn verify_structure_theorem(seed: &[Operator], nest: &Nest, tol: f64) -> Result<VerificationReport> {
    let n = nest.dimension();
    let seed_space = OperatorSubspace::span(n, seed.iter(), tol)?;
    let l = lie_closure(&seed_space, nest)?;
    let j = largest_bimodule(&l, nest)?;
    let k = k_parts(&l, nest)?;
    let d_k = diagonal_algebra_unchecked(&k.k_total, nest)?;
    let k_plus_d = k.k_total.sum(&d_k.space)?;

    let bimodule_clause = match bimodule_violation(&k.k_total, nest)? {
        None => Check::pass("k_is_bimodule"),
        Some((matrix, residual)) => Check::fail(
            "k_is_bimodule",
            Witness {
                matrix,
                residual,
                note: "product with a unit of T(N) outside K".into(),
            },
        ),
    };
    let clauses = vec![
        Check::inclusion("j_in_l", &l, &j)?,
        Check::inclusion("l_in_k_plus_dk", &k_plus_d, &l)?,
        commutator_into(&k.k_total, nest, &l)?,
        Check::inclusion("kv_in_j", &j, &k.k_v)?,
        bimodule_clause,
        star_algebra_check(&d_k.space, nest)?,
    ];
    let dims = Dimensions {
        seed: seed_space.dim(),
        l: l.dim(),
        j: j.dim(),
        k_v: k.k_v.dim(),
        k_l: k.k_l.dim(),
        k_d: k.k_d.dim(),
        k_delta: k.k_delta.dim(),
        k: k.k_total.dim(),
        d_k: d_k.space.dim(),
    };
    let j_in_k = k.k_total.includes(&j)?;
    let l_in_k = k.k_total.includes(&l)?;
    Ok(VerificationReport {
        dims,
        clauses,
        j_in_k,
        l_in_k,
        spaces: Constructions { l, j, k, d_k },
    })
}

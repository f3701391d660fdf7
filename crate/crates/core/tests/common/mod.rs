#![allow(dead_code)]

use nestmod::{Nest, Operator, OperatorSubspace, Vector, C64};
use proptest::prelude::*;

pub const TOL: f64 = 1e-9;

/// Nests on `C^n`, `1 ≤ n ≤ max_n`, with any set of interior boundaries.
pub fn nest(max_n: usize) -> impl Strategy<Value = Nest> {
    (1..=max_n).prop_flat_map(|n| {
        let interior: Vec<usize> = (1..n).collect();
        let len = interior.len();
        proptest::sample::subsequence(interior, 0..=len).prop_map(move |mut cut| {
            cut.insert(0, 0);
            cut.push(n);
            Nest::new(cut).unwrap()
        })
    })
}

pub fn scalar() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

/// Entries are exactly zero with probability `1 − density`.
pub fn sparse_entries(len: usize, density: f64) -> BoxedStrategy<Vec<C64>> {
    let entry = if density >= 1.0 {
        scalar().boxed()
    } else if density <= 0.0 {
        Just(C64::new(0.0, 0.0)).boxed()
    } else {
        proptest::option::weighted(density, scalar())
            .prop_map(|z| z.unwrap_or(C64::new(0.0, 0.0)))
            .boxed()
    };
    proptest::collection::vec(entry, len).boxed()
}

pub fn sparse_vector(n: usize, density: f64) -> impl Strategy<Value = Vector> {
    sparse_entries(n, density).prop_map(Vector::from_vec)
}

pub fn sparse_operator(n: usize, density: f64) -> impl Strategy<Value = Operator> {
    sparse_entries(n * n, density).prop_map(move |v| {
        let rows: Vec<Vec<C64>> = v.chunks(n).map(|r| r.to_vec()).collect();
        Operator::from_rows(&rows).unwrap()
    })
}

pub fn sparse_operators(n: usize, count: std::ops::RangeInclusive<usize>, density: f64) -> impl Strategy<Value = Vec<Operator>> {
    proptest::collection::vec(sparse_operator(n, density), count)
}

/// A sparse operator with support inside `T(N)`.
pub fn algebra_element(nest: &Nest, density: f64) -> impl Strategy<Value = Operator> {
    let units = nest.algebra_basis();
    let n = nest.dimension();
    sparse_entries(units.len(), density).prop_map(move |cs| {
        units
            .iter()
            .zip(cs)
            .fold(Operator::zeros(n), |acc, (u, c)| &acc + &u.scale(c))
    })
}

/// A nest with up to `max_n` points and sparse seed matrices on it.
pub fn seeded_nest(max_n: usize, seeds: std::ops::RangeInclusive<usize>, density: f64) -> impl Strategy<Value = (Nest, Vec<Operator>)> {
    nest(max_n).prop_flat_map(move |nest| {
        let n = nest.dimension();
        (Just(nest), sparse_operators(n, seeds.clone(), density))
    })
}

pub fn span(n: usize, ms: &[Operator]) -> OperatorSubspace {
    OperatorSubspace::span(n, ms.iter(), TOL).unwrap()
}

//! Fixed and seeded instances, plus exhaustive enumeration of nest maps.
//!
//! Random instances use `ChaCha8Rng::seed_from_u64`, a counter-based stream
//! with platform-independent output. Entries are standard normal.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bimodule::NestMap;
use crate::error::{Error, Result};
use crate::nest::Nest;
use crate::operator::{Operator, C64, ZERO};

/// A nest together with seed matrices for a Lie module.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub nest: Nest,
    pub seed_matrices: Vec<Operator>,
    pub label: String,
    pub rng_seed: Option<u64>,
}

impl InstanceSpec {
    pub fn new(nest: Nest, seed_matrices: Vec<Operator>, label: impl Into<String>) -> Result<Self> {
        let n = nest.dimension();
        for m in &seed_matrices {
            m.check_side(n)?;
        }
        Ok(Self {
            nest,
            seed_matrices,
            label: label.into(),
            rng_seed: None,
        })
    }
}

/// Zero-based positions of the units in the 5×5 example: column 3 onward,
/// plus rows 1–2 of column 2 (one-based).
pub fn example_5x5_units() -> Vec<(usize, usize)> {
    (0..5)
        .flat_map(|i| (0..5).map(move |j| (i, j)))
        .filter(|&(i, j)| j >= 2 || (j == 1 && i <= 1))
        .collect()
}

/// Maximal nest on `C^5`; seeds are `I` and the 17 units with
/// `a_{i1} = 0` for all `i` and `a_{i2} = 0` for `i ≥ 3`.
pub fn example_5x5() -> InstanceSpec {
    let nest = Nest::maximal(5).expect("maximal nest on C^5");
    let mut seeds = vec![Operator::identity(5)];
    seeds.extend(example_5x5_units().into_iter().map(|(i, j)| Operator::unit(5, i, j)));
    InstanceSpec {
        nest,
        seed_matrices: seeds,
        label: "example-5x5".into(),
        rng_seed: None,
    }
}

fn check_bounds(n: usize, m: usize, g: usize) -> Result<()> {
    if !(1 <= m && m <= n && n <= 16) {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= m <= n <= 16, got n = {n}, m = {m}"
        )));
    }
    if !(1..=6).contains(&g) {
        return Err(Error::InvalidParameters(format!("need 1 <= g <= 6, got g = {g}")));
    }
    Ok(())
}

fn random_nest(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Nest {
    let mut interior: Vec<usize> = sample(rng, n - 1, m - 1).into_iter().map(|b| b + 1).collect();
    interior.sort_unstable();
    let mut boundaries = Vec::with_capacity(m + 1);
    boundaries.push(0);
    boundaries.extend(interior);
    boundaries.push(n);
    Nest::new(boundaries).expect("strictly increasing boundaries")
}

fn normal(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `n×n` nest of `m` atoms with uniformly chosen boundaries and `g` dense
/// complex Gaussian seeds. The draw order is boundaries, then entries in
/// column-major order for each seed.
pub fn random_instance(n: usize, m: usize, g: usize, rng_seed: u64) -> Result<InstanceSpec> {
    check_bounds(n, m, g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let nest = random_nest(&mut rng, n, m);
    let seeds = (0..g)
        .map(|_| Operator::from_matrix_unchecked(DMatrix::from_fn(n, n, |_, _| normal(&mut rng))))
        .collect();
    Ok(InstanceSpec {
        nest,
        seed_matrices: seeds,
        label: format!("random-n{n}-m{m}-g{g}-s{rng_seed}"),
        rng_seed: Some(rng_seed),
    })
}

/// Like [`random_instance`], but each entry is nonzero with probability
/// `density`. Sparse seeds give Lie modules well below `B(H)`.
pub fn sparse_instance(n: usize, m: usize, g: usize, density: f64, rng_seed: u64) -> Result<InstanceSpec> {
    check_bounds(n, m, g)?;
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameters(format!("density {density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let nest = random_nest(&mut rng, n, m);
    let seeds = (0..g)
        .map(|_| {
            Operator::from_matrix_unchecked(DMatrix::from_fn(n, n, |_, _| {
                if rng.random_bool(density) {
                    normal(&mut rng)
                } else {
                    ZERO
                }
            }))
        })
        .collect();
    Ok(InstanceSpec {
        nest,
        seed_matrices: seeds,
        label: format!("sparse-n{n}-m{m}-g{g}-s{rng_seed}"),
        rng_seed: Some(rng_seed),
    })
}

/// Largest `m` accepted by [`monotone_map_enumerator`].
pub const MAX_ENUMERATED_ATOMS: usize = 6;

/// Every monotone table with `φ(0) = 0` and values in `0..=m`, in
/// lexicographic order.
pub fn monotone_map_enumerator(nest: &Nest) -> Result<Vec<NestMap>> {
    let m = nest.len();
    if m > MAX_ENUMERATED_ATOMS {
        return Err(Error::InvalidParameters(format!(
            "enumeration needs m <= {MAX_ENUMERATED_ATOMS}, got {m}"
        )));
    }
    let mut out = Vec::new();
    let mut table = vec![0; m + 1];
    fill(nest, &mut table, 1, &mut out);
    Ok(out)
}

fn fill(nest: &Nest, table: &mut Vec<usize>, k: usize, out: &mut Vec<NestMap>) {
    let m = table.len() - 1;
    if k > m {
        out.push(NestMap::new(nest, table.clone()).expect("monotone by construction"));
        return;
    }
    for v in table[k - 1]..=m {
        table[k] = v;
        fill(nest, table, k + 1, out);
    }
}

//! Seeded tree generators.

use rand::distr::{Distribution, Open01};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::{Edge, PhyloTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightModel {
    /// All edges have length 1.
    Unit,
    /// Independent lengths drawn uniformly from the open interval (0, 1).
    Uniform01,
}

impl std::str::FromStr for WeightModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "unit" => Ok(WeightModel::Unit),
            "uniform01" => Ok(WeightModel::Uniform01),
            _ => Err(format!(
                "unknown weight model `{s}` (expected unit or uniform01)"
            )),
        }
    }
}

fn draw_weight<T: Scalar>(model: WeightModel, rng: &mut impl Rng) -> T {
    match model {
        WeightModel::Unit => T::one(),
        WeightModel::Uniform01 => {
            let x: f64 = Open01.sample(rng);
            T::from_f64(x).expect("finite")
        }
    }
}

fn taxon_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("t{i}")).collect()
}

/// Random binary tree on taxa `t1..tn` by sequential leaf attachment: each
/// new leaf subdivides an edge chosen uniformly at random, which yields the
/// uniform distribution on labeled unrooted binary topologies.
pub fn random_binary_tree<T: Scalar>(
    n: usize,
    seed: u64,
    model: WeightModel,
) -> Result<PhyloTree<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "random tree needs n >= 2, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // leaves take ids 0..n, internal vertices n..2n-2
    let mut edges: Vec<(usize, usize)> = vec![(0, 1)];
    let mut next_internal = n;
    for leaf in 2..n {
        let k = rng.random_range(0..edges.len());
        let (a, b) = edges[k];
        let x = next_internal;
        next_internal += 1;
        edges[k] = (a, x);
        edges.push((x, b));
        edges.push((x, leaf));
    }
    let edges = edges
        .into_iter()
        .map(|(a, b)| Edge {
            a,
            b,
            weight: draw_weight(model, &mut rng),
        })
        .collect();
    let labels = taxon_labels(n).into_iter().zip(0..n).collect();
    PhyloTree::new(next_internal, edges, labels)
}

/// Caterpillar with unit weights whose leaves appear along the spine in the
/// given order; the first two and last two labels form the cherries.
pub fn caterpillar<T: Scalar>(order: &[String]) -> Result<PhyloTree<T>> {
    let n = order.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "caterpillar needs n >= 4, got {n}"
        )));
    }
    // leaves 0..n, spine n..2n-2
    let spine = |k: usize| n + k;
    let s = n - 2;
    let mut edges = Vec::with_capacity(2 * n - 3);
    for k in 0..s - 1 {
        edges.push(Edge {
            a: spine(k),
            b: spine(k + 1),
            weight: T::one(),
        });
    }
    for (p, _) in order.iter().enumerate() {
        let k = match p {
            0 | 1 => 0,
            p if p >= n - 2 => s - 1,
            p => p - 1,
        };
        edges.push(Edge {
            a: p,
            b: spine(k),
            weight: T::one(),
        });
    }
    let labels = order.iter().cloned().zip(0..n).collect();
    PhyloTree::new(n + s, edges, labels)
}

/// Caterpillar on `t1..tn` with a seeded random spine order.
pub fn random_caterpillar<T: Scalar>(n: usize, seed: u64) -> Result<PhyloTree<T>> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "caterpillar needs n >= 4, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = taxon_labels(n);
    order.shuffle(&mut rng);
    caterpillar(&order)
}

/// The extremal caterpillar pair on taxa `1..4m+1`: `τ` lists the labels in
/// order along the spine (cherries `{1,2}` and `{4m,4m+1}`), `τ'` reverses
/// the even labels, exchanging `2i` with `2(2m+1-i)`.
pub fn lemma_caterpillar_pair<T: Scalar>(m: usize) -> Result<(PhyloTree<T>, PhyloTree<T>)> {
    if m < 1 {
        return Err(Error::InvalidArgument(
            "caterpillar pair needs m >= 1".into(),
        ));
    }
    let n = 4 * m + 1;
    let order: Vec<String> = (1..=n).map(|p| p.to_string()).collect();
    let swapped: Vec<String> = (1..=n)
        .map(|p| {
            if p % 2 == 0 {
                (4 * m + 2 - p).to_string()
            } else {
                p.to_string()
            }
        })
        .collect();
    Ok((caterpillar(&order)?, caterpillar(&swapped)?))
}

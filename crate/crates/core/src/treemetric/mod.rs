//! Tree-induced semimetrics and classical tree comparison baselines.

mod generate;
mod nni;
mod splits;

pub use generate::{lemma_caterpillar_pair, random_binary_tree, random_caterpillar, WeightModel};
pub use nni::{apply_nni, nni_moves, NniChoice, NniMove};
pub use splits::{robinson_foulds, splits_of, Split};

use crate::error::Result;
use crate::norm::{Norm, NormValue};
use crate::scalar::Scalar;
use crate::semimetric::Semimetric;
use crate::tree::PhyloTree;

/// Path-length semimetric of a tree on its taxa.
pub fn tree_to_semimetric<T: Scalar>(tree: &PhyloTree<T>) -> Semimetric<T> {
    let taxa = tree.taxa().clone();
    let n = taxa.len();
    let mut d = vec![T::zero(); n * n];
    for i in 0..n {
        let dist = tree.distances_from(tree.vertex_of(i));
        for j in 0..n {
            d[i * n + j] = dist[tree.vertex_of(j)].clone();
        }
    }
    Semimetric::from_raw(taxa, d)
}

/// Returns a quadruple `(x, y, z, w)` with
/// `ρ(x,y) + ρ(z,w) > max(ρ(x,z) + ρ(y,w), ρ(x,w) + ρ(y,z))`, if one exists.
pub fn four_point_violation<T: Scalar>(rho: &Semimetric<T>) -> Option<[usize; 4]> {
    let n = rho.len();
    let d = |i: usize, j: usize| rho.get(i, j);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for e in c + 1..n {
                    let pairings = [
                        ([a, b, c, e], d(a, b).clone() + d(c, e)),
                        ([a, c, b, e], d(a, c).clone() + d(b, e)),
                        ([a, e, b, c], d(a, e).clone() + d(b, c)),
                    ];
                    for k in 0..3 {
                        let other = T::max_of(
                            pairings[(k + 1) % 3].1.clone(),
                            pairings[(k + 2) % 3].1.clone(),
                        );
                        if !T::approx_le(&pairings[k].1, &other) {
                            return Some(pairings[k].0);
                        }
                    }
                }
            }
        }
    }
    None
}

/// True iff `rho` satisfies the four-point condition.
pub fn four_point_check<T: Scalar>(rho: &Semimetric<T>) -> bool {
    four_point_violation(rho).is_none()
}

/// Path-difference distance: a norm of `|ρ(x,y) - ρ'(x,y)|` over unordered pairs.
pub fn pd_distance<T: Scalar>(
    rho: &Semimetric<T>,
    rho_prime: &Semimetric<T>,
    norm: Norm,
) -> Result<NormValue<T>> {
    rho.check_same_taxa(rho_prime)?;
    let diffs: Vec<T> = rho
        .pairs()
        .map(|(i, j)| (rho.get(i, j).clone() - rho_prime.get(i, j)).abs_val())
        .collect();
    Ok(NormValue::of(norm, &diffs, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;
    use crate::scalar::Rational;
    use crate::taxa::TaxonSet;

    fn tree(s: &str) -> PhyloTree<f64> {
        parse_newick(s, &1.0).unwrap()
    }

    #[test]
    fn quartet_path_lengths() {
        let rho = tree_to_semimetric(&tree("((A,B),(C,D));"));
        let g = |x, y| *rho.get_by_label(x, y).unwrap();
        assert_eq!((g("A", "B"), g("C", "D")), (2.0, 2.0));
        for (x, y) in [("A", "C"), ("A", "D"), ("B", "C"), ("B", "D")] {
            assert_eq!(g(x, y), 3.0);
        }
        let rho2 = tree_to_semimetric(&tree("((A,C),(B,D));"));
        assert_eq!(*rho2.get_by_label("A", "C").unwrap(), 2.0);
        assert_eq!(*rho2.get_by_label("A", "B").unwrap(), 3.0);
    }

    #[test]
    fn weighted_path_sum() {
        let rho = tree_to_semimetric(&tree("((A:0.5,B:0.5):0.25,C:1,D:2);"));
        assert_eq!(*rho.get_by_label("A", "D").unwrap(), 2.75);
        let two = tree_to_semimetric(&tree("(A:1.5,B:2);"));
        assert_eq!(*two.get_by_label("A", "B").unwrap(), 3.5);
    }

    #[test]
    fn four_point_detects_non_tree_metric() {
        // d(x,y) = d(z,w) = 2, all other pairs 1
        let taxa = TaxonSet::new(["w", "x", "y", "z"]).unwrap();
        let rho = Semimetric::from_fn(taxa.clone(), |i, j| {
            let (a, b) = (taxa.label(i), taxa.label(j));
            let pair = |p: &str, q: &str| (a == p && b == q) || (a == q && b == p);
            if pair("x", "y") || pair("z", "w") {
                2.0
            } else {
                1.0
            }
        })
        .unwrap();
        let [a, b, c, d] = four_point_violation(&rho).unwrap();
        let lhs = rho.get(a, b) + rho.get(c, d);
        assert_eq!(lhs, 4.0);
        let names: Vec<&str> = [a, b].iter().map(|&i| taxa.label(i)).collect();
        assert!(names == ["x", "y"] || names == ["w", "z"]);
    }

    #[test]
    fn three_points_always_pass() {
        let taxa = TaxonSet::new(["a", "b", "c"]).unwrap();
        let rho = Semimetric::from_fn(taxa, |i, j| (i + j) as f64).unwrap();
        assert!(four_point_check(&rho));
    }

    #[test]
    fn path_difference_on_the_quartets() {
        let r1 = tree_to_semimetric(&tree("((A,B),(C,D));"));
        let r2 = tree_to_semimetric(&tree("((A,C),(B,D));"));
        assert_eq!(pd_distance(&r1, &r2, Norm::L1).unwrap().value(), 4.0);
        assert_eq!(pd_distance(&r1, &r2, Norm::Sup).unwrap().value(), 1.0);
        assert_eq!(pd_distance(&r1, &r2, Norm::L2).unwrap().value(), 2.0);
        assert_eq!(pd_distance(&r1, &r1, Norm::L1).unwrap().value(), 0.0);
        let r3 = tree_to_semimetric(&tree("((A,B),(C,E));"));
        assert!(pd_distance(&r1, &r3, Norm::L1).is_err());
    }

    #[test]
    fn rational_tree_metric_is_exact() {
        let t =
            parse_newick::<Rational>("((A:0.1,B:0.2):0.3,C:0.4,D:0.5);", &Rational::from_int(1))
                .unwrap();
        let rho = tree_to_semimetric(&t);
        assert_eq!(rho.get_by_label("A", "D").unwrap().format(), "0.9");
    }
}

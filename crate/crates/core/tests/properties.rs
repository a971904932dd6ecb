mod common;

use common::{rational_tree, rng, taxa, tree_pair};
use proptest::prelude::*;
use rand::Rng;
use treegromov::extension::{
    amalgamate, check_extendable, check_extendable_minimal_cycles, graph_metric, WeightedGraph,
};
use treegromov::gromov::quadrangle_violations;
use treegromov::{
    apply_nni, dinf_closed_form, four_point_check, gromov_distance, nni_moves, pairwise_matrix,
    parse_newick, pd_distance, random_binary_tree, realize_extension, robinson_foulds,
    tree_to_semimetric, write_newick, DeltaVector, GromovSpec, Norm, Rational, Scalar, Semimetric,
    TaxonSet, Variant, WeightModel,
};

const TOL: f64 = 1e-8;

fn specs<T: Scalar>() -> Vec<GromovSpec<T>> {
    let mut out = Vec::new();
    for norm in Norm::ALL {
        for variant in [Variant::Full, Variant::Lower] {
            out.push(GromovSpec::new(norm).variant(variant));
        }
    }
    out
}

fn d<T: Scalar>(a: &Semimetric<T>, b: &Semimetric<T>, spec: &GromovSpec<T>) -> f64 {
    gromov_distance(a, b, spec).unwrap().value()
}

fn r(v: i64) -> Rational {
    Rational::from_int(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn semimetric_csv_round_trip(seed in any::<u64>(), n in 2usize..8) {
        let m: Semimetric<f64> = common::random_float_metric(&mut rng(seed), n, 5.0);
        prop_assert!(m.is_metric());
        prop_assert_eq!(Semimetric::<f64>::from_csv(&m.to_csv()).unwrap(), m);
    }

    #[test]
    fn newick_round_trip_preserves_path_lengths(seed in any::<u64>(), n in 2usize..14) {
        let t = rational_tree(n, seed, WeightModel::Uniform01);
        let back = parse_newick::<Rational>(&write_newick(&t), &r(1)).unwrap();
        prop_assert_eq!(tree_to_semimetric(&back), tree_to_semimetric(&t));
        prop_assert_eq!(robinson_foulds(&back, &t).unwrap(), 0);
    }

    #[test]
    fn tree_metrics_satisfy_four_points(seed in any::<u64>(), n in 4usize..12) {
        let t = rational_tree(n, seed, WeightModel::Uniform01);
        prop_assert!(four_point_check(&tree_to_semimetric(&t)));
    }

    #[test]
    fn robinson_foulds_is_a_pseudometric(seed in any::<u64>(), n in 4usize..12) {
        let ts: Vec<_> = (0..3).map(|k| random_binary_tree::<f64>(n, seed.wrapping_add(k), WeightModel::Unit).unwrap()).collect();
        let rf = |a: usize, b: usize| robinson_foulds(&ts[a], &ts[b]).unwrap();
        prop_assert_eq!(rf(0, 0), 0);
        prop_assert_eq!(rf(0, 1), rf(1, 0));
        prop_assert!(rf(0, 2) <= rf(0, 1) + rf(1, 2));
        prop_assert!(rf(0, 1) <= 2 * (n - 3));
    }

    #[test]
    fn gromov_distances_are_metrics(seed in any::<u64>(), n in 3usize..7) {
        let mut g = rng(seed);
        let ms: Vec<Semimetric<f64>> = (0..3).map(|_| common::random_float_metric(&mut g, n, 4.0)).collect();
        for spec in specs::<f64>() {
            let (ab, ba) = (d(&ms[0], &ms[1], &spec), d(&ms[1], &ms[0], &spec));
            prop_assert!((ab - ba).abs() <= TOL);
            prop_assert_eq!(d(&ms[0], &ms[0], &spec), 0.0);
            let (bc, ac) = (d(&ms[1], &ms[2], &spec), d(&ms[0], &ms[2], &spec));
            prop_assert!(ac <= ab + bc + TOL, "{:?}: {} > {} + {}", spec.norm, ac, ab, bc);
        }
    }

    #[test]
    fn identity_of_indiscernibles_is_exact(seed in any::<u64>(), n in 3usize..6) {
        let mut g = rng(seed);
        let a: Semimetric<Rational> = common::random_int_metric(&mut g, n, 0, 5);
        let b: Semimetric<Rational> = common::random_int_metric(&mut g, n, 0, 5);
        for spec in specs::<Rational>() {
            let v = gromov_distance(&a, &b, &spec).unwrap();
            prop_assert_eq!(v.raw().is_zero_value(), a == b);
            prop_assert!(gromov_distance(&a, &a, &spec).unwrap().delta.values().iter().all(|x| *x == r(0)));
        }
    }

    #[test]
    fn homogeneous_of_degree_one(seed in any::<u64>(), n in 3usize..6) {
        let mut g = rng(seed);
        let a: Semimetric<Rational> = common::random_int_metric(&mut g, n, 1, 6);
        let b: Semimetric<Rational> = common::random_int_metric(&mut g, n, 1, 6);
        let half = Rational::new(1.into(), 2.into());
        for lambda in [r(0), half, r(2), r(10)] {
            for spec in specs::<Rational>() {
                let base = gromov_distance(&a, &b, &spec).unwrap().raw().clone();
                let scaled = gromov_distance(&a.scale(&lambda).unwrap(), &b.scale(&lambda).unwrap(), &spec).unwrap();
                let factor = if spec.norm == Norm::L2 { lambda.clone() * &lambda } else { lambda.clone() };
                prop_assert_eq!(scaled.raw().clone(), base * factor);
            }
        }
    }

    #[test]
    fn subadditive_under_sums(seed in any::<u64>(), n in 3usize..7) {
        let mut g = rng(seed);
        let m: Vec<Semimetric<f64>> = (0..4).map(|_| common::random_float_metric(&mut g, n, 3.0)).collect();
        let (s13, s24) = (m[0].sum(&m[2]).unwrap(), m[1].sum(&m[3]).unwrap());
        for spec in specs::<f64>() {
            let lhs = d(&s13, &s24, &spec);
            prop_assert!(lhs <= d(&m[0], &m[1], &spec) + d(&m[2], &m[3], &spec) + TOL);
        }
    }

    #[test]
    fn bounded_program_has_the_same_optimum(seed in any::<u64>(), n in 4usize..10) {
        let (a, b) = tree_pair::<f64>(n, seed, WeightModel::Uniform01);
        for spec in specs::<f64>() {
            let free = gromov_distance(&a, &b, &spec).unwrap();
            let bounded = gromov_distance(&a, &b, &spec.clone().bounded(true)).unwrap();
            prop_assert!((free.value() - bounded.value()).abs() <= 1e-9);
        }
    }

    #[test]
    fn restriction_never_increases_distance(seed in any::<u64>(), n in 5usize..10) {
        let (a, b) = tree_pair::<f64>(n, seed, WeightModel::Uniform01);
        let mut g = rng(seed);
        let keep: Vec<String> = a.taxa().labels().iter().filter(|_| g.random_bool(0.6)).cloned().collect();
        prop_assume!(keep.len() >= 2);
        let sub = TaxonSet::new(keep).unwrap();
        let (ra, rb) = (a.restrict(&sub).unwrap(), b.restrict(&sub).unwrap());
        for spec in specs::<f64>() {
            prop_assert!(d(&ra, &rb, &spec) <= d(&a, &b, &spec) + TOL);
        }
    }

    #[test]
    fn lower_variant_is_a_lower_bound(seed in any::<u64>(), n in 4usize..10) {
        let (a, b) = tree_pair::<f64>(n, seed, WeightModel::Uniform01);
        for norm in Norm::ALL {
            let full = d(&a, &b, &GromovSpec::new(norm));
            let lower = d(&a, &b, &GromovSpec::new(norm).lower());
            prop_assert!(lower <= full + TOL);
        }
    }

    #[test]
    fn unweighted_diameter_bounds(seed in any::<u64>(), n in 4usize..12) {
        let (a, b) = tree_pair::<f64>(n, seed, WeightModel::Unit);
        let nf = n as f64;
        prop_assert!(d(&a, &b, &GromovSpec::new(Norm::Sup)) <= (nf - 2.0) / 2.0 + TOL);
        prop_assert!(d(&a, &b, &GromovSpec::new(Norm::L2)) <= nf.sqrt() * (nf - 2.0) / 2.0 + TOL);
        prop_assert!(d(&a, &b, &GromovSpec::new(Norm::L1)) <= nf * (nf - 2.0) / 2.0 + TOL);
    }

    #[test]
    fn optimal_matchings_realize_extensions(seed in any::<u64>(), n in 3usize..9) {
        let ta = rational_tree(n, seed, WeightModel::Uniform01);
        let tb = rational_tree(n, seed ^ 0xabcdef, WeightModel::Uniform01);
        let (a, b) = (tree_to_semimetric(&ta), tree_to_semimetric(&tb));
        for norm in [Norm::L1, Norm::L2] {
            let res = gromov_distance(&a, &b, &GromovSpec::new(norm)).unwrap();
            prop_assert!(quadrangle_violations(&a, &b, &res.delta).unwrap().is_empty());
            prop_assert_eq!(res.solution.as_ref().unwrap().kkt_residual(), r(0));
            let ext = realize_extension(&a, &b, &res.delta).unwrap();
            prop_assert_eq!(ext.restrict_left(), a.clone());
            prop_assert_eq!(ext.restrict_right(), b.clone());
            for i in 0..n {
                prop_assert_eq!(ext.matched(i), &res.delta.values()[i]);
            }
            let m = ext.metric();
            prop_assert!(Semimetric::from_fn(m.taxa().clone(), |i, j| m.get(i, j).clone()).is_ok());
        }
    }

    #[test]
    fn local_property(seed in any::<u64>(), n in 3usize..7) {
        let mut g = rng(seed);
        let base = common::random_float_metric(&mut g, n, 10.0);
        let eps = base.min_off_diagonal().unwrap() / 2.0;
        let p1 = common::random_float_metric(&mut g, n, 1.0);
        let p2 = common::random_float_metric(&mut g, n, 1.0);
        // scale so D∞(0, p) = max p / 2 stays below eps
        let s1 = 0.99 * 2.0 * eps / p1.max_entry();
        let s2 = 0.99 * 2.0 * eps / p2.max_entry();
        let (p1, p2) = (p1.scale(&s1).unwrap(), p2.scale(&s2).unwrap());
        let (x, y) = (base.sum(&p1).unwrap(), base.sum(&p2).unwrap());
        for norm in Norm::ALL {
            let full = d(&x, &y, &GromovSpec::new(norm));
            let lower = d(&p1, &p2, &GromovSpec::new(norm).lower());
            prop_assert!((full - lower).abs() <= TOL * (1.0 + full));
        }
    }

    #[test]
    fn two_edge_tree_against_zero(
        a in 1usize..4, b in 1usize..4, c in 1usize..4, l in 1i64..20, lp in 1i64..20
    ) {
        let (rho, zero) = two_edge(a, b, c, r(l), r(lp));
        let got = gromov_distance(&zero, &rho, &GromovSpec::new(Norm::L1).lower()).unwrap();
        let (a, b, c) = (a as i64, b as i64, c as i64);
        let want = [a * l + c * lp, (b + c) * l + c * lp, a * l + (a + b) * lp].into_iter().min().unwrap();
        prop_assert_eq!(got.raw().clone(), r(want));
    }

    #[test]
    fn nni_changes_paths_by_the_pivot_length(seed in any::<u64>(), n in 5usize..12) {
        let t = random_binary_tree::<Rational>(n, seed, WeightModel::Unit).unwrap();
        let moves = nni_moves(&t);
        let mv = moves[(seed % moves.len() as u64) as usize];
        let u = apply_nni(&t, mv).unwrap();
        let (a, b) = (tree_to_semimetric(&t), tree_to_semimetric(&u));
        for (i, j) in a.pairs() {
            let gap = (a.get(i, j).clone() - b.get(i, j)).abs_val();
            prop_assert!(gap == r(0) || gap == r(1));
        }
        prop_assert_eq!(pd_distance(&a, &b, Norm::Sup).unwrap().raw, r(1));
        prop_assert_eq!(robinson_foulds(&t, &u).unwrap(), 2);
        let nf = n as f64;
        prop_assert!(d(&a, &b, &GromovSpec::new(Norm::L1)) <= nf + TOL);
        prop_assert!(d(&a, &b, &GromovSpec::new(Norm::L2)) <= nf.sqrt() + TOL);
    }

    #[test]
    fn extension_criteria_agree(seed in any::<u64>(), n in 3usize..10) {
        let g = random_graph(seed, n);
        prop_assert_eq!(check_extendable(&g).unwrap(), check_extendable_minimal_cycles(&g).unwrap());
    }

    #[test]
    fn amalgamation_restricts_to_its_parts(seed in any::<u64>(), n in 4usize..9) {
        let mut g = rng(seed);
        let full: Semimetric<Rational> = common::random_int_metric(&mut g, n, 1, 9);
        let cut = g.random_range(1..n - 1);
        let overlap = g.random_range(1..=cut.min(n - cut));
        let left = TaxonSet::new(full.taxa().labels()[..cut + overlap].to_vec()).unwrap();
        let right = TaxonSet::new(full.taxa().labels()[cut..].to_vec()).unwrap();
        let (d1, d2) = (full.restrict(&left).unwrap(), full.restrict(&right).unwrap());
        let glued = amalgamate(&d1, &d2).unwrap();
        prop_assert_eq!(glued.restrict(&left).unwrap(), d1);
        prop_assert_eq!(glued.restrict(&right).unwrap(), d2);
    }
}

/// The semimetric of a path `A —l— B —l'— C` of blocks: zero inside a
/// block. Returned with the zero semimetric on the same taxa.
fn two_edge(
    a: usize,
    b: usize,
    c: usize,
    l: Rational,
    lp: Rational,
) -> (Semimetric<Rational>, Semimetric<Rational>) {
    let n = a + b + c;
    let block = |i: usize| {
        if i < a {
            0
        } else if i < a + b {
            1
        } else {
            2
        }
    };
    let taxa = taxa(n);
    let rho = Semimetric::from_fn(taxa.clone(), |i, j| {
        match (block(i).min(block(j)), block(i).max(block(j))) {
            (0, 1) => l.clone(),
            (1, 2) => lp.clone(),
            (0, 2) => l.clone() + &lp,
            _ => Rational::from_int(0),
        }
    })
    .unwrap();
    (rho, Semimetric::zero(taxa))
}

/// Connected graph: a random spanning tree plus extra edges, integer weights.
fn random_graph(seed: u64, n: usize) -> WeightedGraph<Rational> {
    let mut g = rng(seed);
    let mut out = WeightedGraph::new(common::labels(n)).unwrap();
    for v in 1..n {
        let u = g.random_range(0..v);
        out.add_edge(u, v, r(g.random_range(1..=10))).unwrap();
    }
    for _ in 0..g.random_range(0..=2 * n) {
        let (u, v) = (g.random_range(0..n), g.random_range(0..n));
        if u != v && out.weight(u, v).is_none() {
            out.add_edge(u, v, r(g.random_range(1..=10))).unwrap();
        }
    }
    out
}

#[test]
fn pairwise_matrix_satisfies_the_triangle_inequality() {
    let trees: Vec<_> = (0..12)
        .map(|s| random_binary_tree::<f64>(8, s, WeightModel::Uniform01).unwrap())
        .collect();
    let m = pairwise_matrix(&trees, &GromovSpec::new(Norm::L1)).unwrap();
    let v = |i: usize, j: usize| m[i][j].value();
    for i in 0..trees.len() {
        assert_eq!(v(i, i), 0.0);
        for j in 0..trees.len() {
            assert_eq!(m[i][j], m[j][i]);
            for k in 0..trees.len() {
                assert!(v(i, k) <= v(i, j) + v(j, k) + TOL);
            }
        }
    }
}

#[test]
fn sup_norm_routes_agree() {
    for seed in 0..100 {
        let (a, b) = tree_pair::<f64>(10, seed, WeightModel::Uniform01);
        let closed = dinf_closed_form(&a, &b).unwrap();
        for variant in [Variant::Full, Variant::Lower] {
            let spec = GromovSpec::new(Norm::Sup)
                .variant(variant)
                .sup_route(treegromov::SupRoute::Lp);
            assert!((d(&a, &b, &spec) - closed).abs() <= 1e-9, "seed {seed}");
        }
    }
}

#[test]
fn graph_metric_of_an_extendable_graph_keeps_edge_weights() {
    for seed in 0..50 {
        let g = random_graph(seed, 8);
        let m = graph_metric(&g).unwrap();
        let ok = g
            .edges()
            .all(|(u, v, w)| m.get_by_label(&g.labels()[u], &g.labels()[v]).unwrap() == w);
        assert_eq!(ok, check_extendable(&g).unwrap(), "seed {seed}");
    }
}

#[test]
fn delta_vector_rejects_bad_input() {
    let t = taxa(3);
    assert!(DeltaVector::new(t.clone(), vec![0.0, 1.0]).is_err());
    assert!(DeltaVector::new(t, vec![0.0, -1.0, 0.0]).is_err());
}

trait ZeroValue {
    fn is_zero_value(&self) -> bool;
}

impl ZeroValue for Rational {
    fn is_zero_value(&self) -> bool {
        *self == Rational::from_int(0)
    }
}

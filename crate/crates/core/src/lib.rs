//! Gromov-type distances between finite semimetric spaces and between
//! weighted unrooted phylogenetic trees.
//!
//! Two semimetrics `ρ, ρ'` on a taxon set `X` are compared through all
//! semimetrics on the disjoint union `X ∪ X'` that restrict to them; the
//! distance is the smallest norm of the matched distances `d(x, x')`.
//! [`gromov_distance`] reduces this to a linear or quadratic program in
//! `|X|` variables, solved by the in-crate [`solver`]s in floating point or
//! exact rational arithmetic.
//!
//! ```
//! use treegromov::{parse_newick, tree_distance, GromovSpec, Norm};
//!
//! let t1 = parse_newick::<f64>("((A,B),(C,D));", &1.0).unwrap();
//! let t2 = parse_newick::<f64>("((A,C),(B,D));", &1.0).unwrap();
//! let d1 = tree_distance(&t1, &t2, &GromovSpec::new(Norm::L1)).unwrap();
//! assert_eq!(d1.value(), 2.0);
//! ```

pub mod error;
pub mod extension;
pub mod gromov;
pub mod newick;
pub mod norm;
pub mod scalar;
pub mod semimetric;
pub mod solver;
pub mod taxa;
pub mod tree;
pub mod treemetric;

pub use error::{Error, Result};
pub use gromov::{
    dinf_closed_form, gromov_distance, pairwise_matrix, quadrangle_feasible, realize_extension,
    tree_distance, DeltaVector, ExtensionMetric, GromovResult, GromovSpec, SupRoute, Variant,
};
pub use newick::{parse_newick, parse_newick_lines, write_newick};
pub use norm::{Norm, NormValue};
pub use scalar::{Mode, Rational, Scalar};
pub use semimetric::Semimetric;
pub use solver::{
    solve_lp, solve_qp, LinearProgram, LpMethod, OptResult, QuadraticProgram, Status,
};
pub use taxa::TaxonSet;
pub use tree::{Edge, PhyloTree};
pub use treemetric::{
    apply_nni, four_point_check, four_point_violation, lemma_caterpillar_pair, nni_moves,
    pd_distance, random_binary_tree, random_caterpillar, robinson_foulds, splits_of,
    tree_to_semimetric, NniChoice, NniMove, Split, WeightModel,
};

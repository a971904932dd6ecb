//! The distances `D₁, D₂, D∞` and their lower variants `D̃₁, D̃₂, D̃∞`.
//!
//! For semimetrics `ρ, ρ'` on the same taxa, `Dᵢ(ρ,ρ')` is the least
//! `ℓⁱ` norm of the matched distances `δx = d(x,x')` over all semimetrics
//! `d` on `X ∪ X'` that restrict to `ρ` and `ρ'`. Such a `d` exists iff for
//! every pair `x ≠ y`
//!
//! ```text
//! δx + δy   ≥ |ρ(x,y) − ρ'(x,y)|
//! |δx − δy| ≤  ρ(x,y) + ρ'(x,y)
//! ```
//!
//! so each distance is a program in `n` variables. The lower variant keeps
//! only the first family.

mod quadrangle;

pub use quadrangle::{
    quadrangle_feasible, quadrangle_violations, realize_extension, ExtensionMetric, QuadrangleKind,
    QuadrangleViolation,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::norm::{Norm, NormValue};
use crate::scalar::Scalar;
use crate::semimetric::Semimetric;
use crate::solver::{
    solve_lp, solve_qp, Constraint, LinearProgram, LpMethod, OptResult, QuadraticProgram, Relation,
};
use crate::taxa::TaxonSet;
use crate::tree::PhyloTree;
use crate::treemetric::tree_to_semimetric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Both inequality families: `Dᵢ`.
    #[default]
    Full,
    /// Sum constraints only: `D̃ᵢ`.
    Lower,
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "full" => Ok(Variant::Full),
            "lower" => Ok(Variant::Lower),
            _ => Err(format!("unknown variant `{s}` (expected full or lower)")),
        }
    }
}

/// How the `ℓ^∞` distance is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SupRoute {
    /// `½ · max |ρ − ρ'|`, attained by the constant vector.
    #[default]
    ClosedForm,
    /// Linear program with an auxiliary bound `t ≥ δx`.
    Lp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GromovSpec<T> {
    pub norm: Norm,
    pub variant: Variant,
    /// Adds `δx ≤ 2·D∞(ρ,ρ')`, which leaves the optimum unchanged.
    pub bounded: bool,
    /// Per-taxon weights of the `ℓ¹`/`ℓ²` norm, in canonical taxon order.
    pub taxon_weights: Option<Vec<T>>,
    pub method: LpMethod,
    pub sup_route: SupRoute,
}

impl<T: Scalar> GromovSpec<T> {
    pub fn new(norm: Norm) -> Self {
        GromovSpec {
            norm,
            variant: Variant::Full,
            bounded: false,
            taxon_weights: None,
            method: LpMethod::Dual,
            sup_route: SupRoute::ClosedForm,
        }
    }

    pub fn variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn lower(self) -> Self {
        self.variant(Variant::Lower)
    }

    pub fn bounded(mut self, bounded: bool) -> Self {
        self.bounded = bounded;
        self
    }

    pub fn weights(mut self, w: Vec<T>) -> Self {
        self.taxon_weights = Some(w);
        self
    }

    pub fn method(mut self, method: LpMethod) -> Self {
        self.method = method;
        self
    }

    pub fn sup_route(mut self, route: SupRoute) -> Self {
        self.sup_route = route;
        self
    }
}

/// Nonnegative matched distances `δx`, one per taxon.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaVector<T> {
    taxa: TaxonSet,
    values: Vec<T>,
}

impl<T: Scalar> DeltaVector<T> {
    pub fn new(taxa: TaxonSet, values: Vec<T>) -> Result<Self> {
        if values.len() != taxa.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} taxa",
                values.len(),
                taxa.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| *v < T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "negative matched distance for `{}`",
                taxa.label(i)
            )));
        }
        Ok(DeltaVector { taxa, values })
    }

    pub fn taxa(&self) -> &TaxonSet {
        &self.taxa
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, label: &str) -> Option<&T> {
        self.taxa.index_of(label).map(|i| &self.values[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GromovResult<T> {
    pub value: NormValue<T>,
    pub delta: DeltaVector<T>,
    /// Solver output; absent when the closed form was used.
    pub solution: Option<OptResult<T>>,
}

impl<T: Scalar> GromovResult<T> {
    /// The distance as a float (`ℓ²` takes the square root here).
    pub fn value(&self) -> f64 {
        self.value.value()
    }

    /// The optimum before any square root: `Σ wδ`, `Σ wδ²` or `max δ`.
    pub fn raw(&self) -> &T {
        &self.value.raw
    }
}

/// `½ · max |ρ(x,y) − ρ'(x,y)|`, the common value of `D∞` and `D̃∞`.
pub fn dinf_closed_form<T: Scalar>(rho: &Semimetric<T>, rho_prime: &Semimetric<T>) -> Result<T> {
    rho.check_same_taxa(rho_prime)?;
    let m = rho
        .pairs()
        .map(|(i, j)| (rho.get(i, j).clone() - rho_prime.get(i, j)).abs_val())
        .fold(T::zero(), T::max_of);
    Ok(m.half())
}

/// The rows of the program in variables `δ_0..δ_{n-1}`.
fn quadrangle_rows<T: Scalar>(
    rho: &Semimetric<T>,
    rho_prime: &Semimetric<T>,
    variant: Variant,
) -> Vec<Constraint<T>> {
    let one = T::one();
    let mut rows = Vec::new();
    for (x, y) in rho.pairs() {
        let (a, b) = (rho.get(x, y), rho_prime.get(x, y));
        let gap = (a.clone() - b).abs_val();
        if !gap.is_zero() {
            rows.push(Constraint {
                terms: vec![(x, one.clone()), (y, one.clone())],
                relation: Relation::Ge,
                rhs: gap,
            });
        }
        if variant == Variant::Full {
            let total = a.clone() + b;
            rows.push(Constraint {
                terms: vec![(x, one.clone()), (y, -one.clone())],
                relation: Relation::Le,
                rhs: total.clone(),
            });
            rows.push(Constraint {
                terms: vec![(x, -one.clone()), (y, one.clone())],
                relation: Relation::Le,
                rhs: total,
            });
        }
    }
    rows
}

fn internal<T: Scalar>(what: &str, program: String, result: &OptResult<T>) -> Error {
    Error::Internal {
        msg: format!("{what} returned {}", result.status),
        dump: format!("{program}{}", result.dump()),
    }
}

/// Computes the distance selected by `spec`.
///
/// `ℓ¹` is a linear program, `ℓ²` a quadratic program whose optimum is the
/// squared distance, and `ℓ^∞` uses the closed form unless the LP route is
/// requested. Infeasibility cannot occur for valid semimetrics and is
/// reported as [`Error::Internal`] with the program attached.
pub fn gromov_distance<T: Scalar>(
    rho: &Semimetric<T>,
    rho_prime: &Semimetric<T>,
    spec: &GromovSpec<T>,
) -> Result<GromovResult<T>> {
    rho.check_same_taxa(rho_prime)?;
    let taxa = rho.taxa().clone();
    let n = taxa.len();
    if let Some(w) = &spec.taxon_weights {
        if spec.norm == Norm::Sup {
            return Err(Error::InvalidArgument(
                "taxon weights apply to the 1 and 2 norms only".into(),
            ));
        }
        if w.len() != n || w.iter().any(|w| *w <= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "need {n} positive taxon weights"
            )));
        }
    }
    let dinf = dinf_closed_form(rho, rho_prime)?;
    let upper = if spec.bounded {
        vec![Some(dinf.clone() + &dinf); n]
    } else {
        vec![None; n]
    };
    let rows = quadrangle_rows(rho, rho_prime, spec.variant);
    let weights = spec
        .taxon_weights
        .clone()
        .unwrap_or_else(|| vec![T::one(); n]);

    let (raw, delta, solution) = match (spec.norm, spec.sup_route) {
        (Norm::Sup, SupRoute::ClosedForm) => (dinf.clone(), vec![dinf; n], None),
        (Norm::Sup, SupRoute::Lp) => {
            let mut objective = vec![T::zero(); n + 1];
            objective[n] = T::one();
            let mut lp = LinearProgram::new(objective);
            lp.constraints = rows;
            for x in 0..n {
                lp.ge(&[(n, 1), (x, -1)], T::zero());
            }
            lp.upper[..n].clone_from_slice(&upper);
            let r = solve_lp(&lp, spec.method)?;
            if !r.is_optimal() {
                return Err(internal("sup-norm LP", lp.dump(), &r));
            }
            (r.value.clone(), r.argmin[..n].to_vec(), Some(r))
        }
        (Norm::L1, _) => {
            let mut lp = LinearProgram::new(weights);
            lp.constraints = rows;
            lp.upper = upper;
            let r = solve_lp(&lp, spec.method)?;
            if !r.is_optimal() {
                return Err(internal("LP", lp.dump(), &r));
            }
            (r.value.clone(), r.argmin.clone(), Some(r))
        }
        (Norm::L2, _) => {
            let mut qp = QuadraticProgram::new(weights);
            qp.constraints = rows;
            qp.upper = upper;
            let r = solve_qp(&qp)?;
            if !r.is_optimal() {
                return Err(internal("QP", qp.dump(), &r));
            }
            (r.value.clone(), r.argmin.clone(), Some(r))
        }
    };
    Ok(GromovResult {
        value: NormValue {
            norm: spec.norm,
            raw,
        },
        delta: DeltaVector::new(taxa, delta)?,
        solution,
    })
}

/// Distance between the path-length semimetrics of two trees.
pub fn tree_distance<T: Scalar>(
    t1: &PhyloTree<T>,
    t2: &PhyloTree<T>,
    spec: &GromovSpec<T>,
) -> Result<GromovResult<T>> {
    if t1.taxa() != t2.taxa() {
        return Err(Error::TaxonMismatch);
    }
    gromov_distance(&tree_to_semimetric(t1), &tree_to_semimetric(t2), spec)
}

/// Symmetric matrix of pairwise tree distances with a zero diagonal. Cells
/// are computed in parallel; each cell is a deterministic single-threaded
/// solve, so the result does not depend on scheduling.
pub fn pairwise_matrix<T: Scalar>(
    trees: &[PhyloTree<T>],
    spec: &GromovSpec<T>,
) -> Result<Vec<Vec<NormValue<T>>>> {
    if let Some(first) = trees.first() {
        if trees.iter().any(|t| t.taxa() != first.taxa()) {
            return Err(Error::TaxonMismatch);
        }
    }
    let metrics: Vec<Semimetric<T>> = trees.iter().map(tree_to_semimetric).collect();
    let k = trees.len();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let cells: Vec<NormValue<T>> = pairs
        .par_iter()
        .map(|&(i, j)| gromov_distance(&metrics[i], &metrics[j], spec).map(|r| r.value))
        .collect::<Result<_>>()?;
    let zero = NormValue {
        norm: spec.norm,
        raw: T::zero(),
    };
    let mut out = vec![vec![zero; k]; k];
    for ((i, j), v) in pairs.into_iter().zip(cells) {
        out[j][i] = v.clone();
        out[i][j] = v;
    }
    Ok(out)
}

use crate::error::{Error, Result};
use crate::extension::{graph_metric, WeightedGraph};
use crate::scalar::Scalar;
use crate::semimetric::Semimetric;
use crate::taxa::TaxonSet;

use super::DeltaVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadrangleKind {
    /// `δx + δy ≥ |ρ(x,y) − ρ'(x,y)|`
    Sum,
    /// `|δx − δy| ≤ ρ(x,y) + ρ'(x,y)`
    Difference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadrangleViolation<T> {
    pub x: usize,
    pub y: usize,
    pub kind: QuadrangleKind,
    /// Left-hand side of the violated inequality.
    pub lhs: T,
    pub bound: T,
}

/// Every pair `x < y` at which `delta` breaks one of the two inequality
/// families, sums before differences.
pub fn quadrangle_violations<T: Scalar>(
    rho: &Semimetric<T>,
    rho_prime: &Semimetric<T>,
    delta: &DeltaVector<T>,
) -> Result<Vec<QuadrangleViolation<T>>> {
    rho.check_same_taxa(rho_prime)?;
    if delta.taxa() != rho.taxa() {
        return Err(Error::TaxonMismatch);
    }
    let d = delta.values();
    let mut out = Vec::new();
    for (x, y) in rho.pairs() {
        let (a, b) = (rho.get(x, y), rho_prime.get(x, y));
        let sum = d[x].clone() + &d[y];
        let gap = (a.clone() - b).abs_val();
        if !T::approx_le(&gap, &sum) {
            out.push(QuadrangleViolation {
                x,
                y,
                kind: QuadrangleKind::Sum,
                lhs: sum,
                bound: gap,
            });
        }
        let diff = (d[x].clone() - &d[y]).abs_val();
        let total = a.clone() + b;
        if !T::approx_le(&diff, &total) {
            out.push(QuadrangleViolation {
                x,
                y,
                kind: QuadrangleKind::Difference,
                lhs: diff,
                bound: total,
            });
        }
    }
    Ok(out)
}

/// Whether `delta` is a feasible vector of matched distances, i.e. whether
/// some extension of `rho` and `rho_prime` realizes it.
pub fn quadrangle_feasible<T: Scalar>(
    rho: &Semimetric<T>,
    rho_prime: &Semimetric<T>,
    delta: &DeltaVector<T>,
) -> Result<bool> {
    Ok(quadrangle_violations(rho, rho_prime, delta)?.is_empty())
}

/// A semimetric on `X ∪ X'` restricting to `ρ` on `X`, to `ρ'` on the
/// primed copy `X'` and with `d(x, x') = δx`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionMetric<T> {
    metric: Semimetric<T>,
    left: Vec<usize>,
    right: Vec<usize>,
    taxa: TaxonSet,
}

impl<T: Scalar> ExtensionMetric<T> {
    /// The full table on `2n` points; primed labels carry a `'` suffix
    /// (repeated if needed to avoid clashing with an existing label).
    pub fn metric(&self) -> &Semimetric<T> {
        &self.metric
    }

    /// Index in [`Self::metric`] of taxon `i` and of its copy `i'`.
    pub fn indices(&self, i: usize) -> (usize, usize) {
        (self.left[i], self.right[i])
    }

    pub fn matched(&self, i: usize) -> &T {
        self.metric.get(self.left[i], self.right[i])
    }

    fn side(&self, idx: &[usize]) -> Semimetric<T> {
        let n = idx.len();
        let mut d = Vec::with_capacity(n * n);
        for &i in idx {
            for &j in idx {
                d.push(self.metric.get(i, j).clone());
            }
        }
        Semimetric::from_raw(self.taxa.clone(), d)
    }

    /// Restriction to `X`, labeled like the original taxa.
    pub fn restrict_left(&self) -> Semimetric<T> {
        self.side(&self.left)
    }

    /// Restriction to `X'`, relabeled with the original (unprimed) taxa.
    pub fn restrict_right(&self) -> Semimetric<T> {
        self.side(&self.right)
    }
}

fn primed_suffix(taxa: &TaxonSet) -> String {
    let mut suffix = String::from("'");
    while taxa
        .labels()
        .iter()
        .any(|l| taxa.contains(&format!("{l}{suffix}")))
    {
        suffix.push('\'');
    }
    suffix
}

/// Builds the extension as the shortest-path metric of the graph with
/// cliques `ρ` on `X`, `ρ'` on `X'` and matching edges `x—x'` of weight `δx`.
pub fn realize_extension<T: Scalar>(
    rho: &Semimetric<T>,
    rho_prime: &Semimetric<T>,
    delta: &DeltaVector<T>,
) -> Result<ExtensionMetric<T>> {
    if let Some(v) = quadrangle_violations(rho, rho_prime, delta)?.first() {
        let name = |i: usize| rho.taxa().label(i).to_string();
        return Err(Error::NotExtendable(name(v.x), name(v.y)));
    }
    let taxa = rho.taxa();
    let n = taxa.len();
    let suffix = primed_suffix(taxa);
    let labels = taxa
        .labels()
        .iter()
        .cloned()
        .chain(taxa.labels().iter().map(|l| format!("{l}{suffix}")));
    let mut g = WeightedGraph::new(labels)?;
    for (i, j) in rho.pairs() {
        g.add_edge(i, j, rho.get(i, j).clone())?;
        g.add_edge(n + i, n + j, rho_prime.get(i, j).clone())?;
    }
    for (i, d) in delta.values().iter().enumerate() {
        g.add_edge(i, n + i, d.clone())?;
    }
    let metric = graph_metric(&g)?;
    let pos = |v: usize| {
        metric
            .taxa()
            .index_of(&g.labels()[v])
            .expect("graph labels are taxa")
    };
    let left = (0..n).map(pos).collect();
    let right = (0..n).map(|i| pos(n + i)).collect();
    Ok(ExtensionMetric {
        metric,
        left,
        right,
        taxa: taxa.clone(),
    })
}

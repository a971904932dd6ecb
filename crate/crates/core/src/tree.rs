//! Weighted unrooted phylogenetic X-trees.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::taxa::TaxonSet;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<T> {
    pub a: usize,
    pub b: usize,
    pub weight: T,
}

impl<T> Edge<T> {
    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    pub fn touches(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }
}

/// A tree with positive edge weights whose labeled vertices carry the taxa.
///
/// Invariants: connected with `|E| = |V| - 1`, every degree-1 vertex is
/// labeled, every unlabeled vertex has degree at least 3, the labeling is
/// injective, and there are at least two taxa.
#[derive(Clone, Debug, PartialEq)]
pub struct PhyloTree<T> {
    taxa: TaxonSet,
    vertex_count: usize,
    edges: Vec<Edge<T>>,
    /// taxon index -> vertex
    leaf_map: Vec<usize>,
    /// vertex -> taxon index
    vertex_taxon: Vec<Option<usize>>,
    /// vertex -> incident edge ids, in edge-list order
    incidence: Vec<Vec<usize>>,
}

impl<T: Scalar> PhyloTree<T> {
    /// Assembles and validates a tree from `vertex_count` vertices, an edge
    /// list, and `(label, vertex)` assignments.
    pub fn new(
        vertex_count: usize,
        edges: Vec<Edge<T>>,
        labels: Vec<(String, usize)>,
    ) -> Result<Self> {
        let taxa = TaxonSet::new(labels.iter().map(|(l, _)| l.clone()))?;
        if taxa.len() < 2 {
            return Err(Error::TooFewTaxa(taxa.len()));
        }
        let mut leaf_map = vec![usize::MAX; taxa.len()];
        let mut vertex_taxon = vec![None; vertex_count];
        for (label, v) in &labels {
            if *v >= vertex_count {
                return Err(Error::InvalidTree(format!(
                    "label `{label}` on missing vertex {v}"
                )));
            }
            if vertex_taxon[*v].is_some() {
                return Err(Error::InvalidTree(format!("vertex {v} carries two labels")));
            }
            let t = taxa.index_of(label).unwrap();
            leaf_map[t] = *v;
            vertex_taxon[*v] = Some(t);
        }
        let tree = Self::assemble(taxa, vertex_count, edges, leaf_map, vertex_taxon);
        tree.validate()?;
        Ok(tree)
    }

    fn assemble(
        taxa: TaxonSet,
        vertex_count: usize,
        edges: Vec<Edge<T>>,
        leaf_map: Vec<usize>,
        vertex_taxon: Vec<Option<usize>>,
    ) -> Self {
        let mut incidence = vec![Vec::new(); vertex_count];
        for (id, e) in edges.iter().enumerate() {
            if e.a < vertex_count && e.b < vertex_count {
                incidence[e.a].push(id);
                incidence[e.b].push(id);
            }
        }
        PhyloTree {
            taxa,
            vertex_count,
            edges,
            leaf_map,
            vertex_taxon,
            incidence,
        }
    }

    fn validate(&self) -> Result<()> {
        let v = self.vertex_count;
        if self.edges.len() + 1 != v {
            return Err(Error::InvalidTree(format!(
                "{} edges on {} vertices",
                self.edges.len(),
                v
            )));
        }
        for (id, e) in self.edges.iter().enumerate() {
            if e.a >= v || e.b >= v || e.a == e.b {
                return Err(Error::InvalidTree(format!(
                    "edge {id} has invalid endpoints"
                )));
            }
            if e.weight <= T::zero() {
                return Err(Error::InvalidTree(format!(
                    "edge {id} has nonpositive weight {}",
                    e.weight.format()
                )));
            }
        }
        // connectivity
        let mut seen = vec![false; v];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(w, _) in &self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != v {
            return Err(Error::InvalidTree("graph is not connected".into()));
        }
        for u in 0..v {
            let deg = self.degree(u);
            if self.vertex_taxon[u].is_none() && deg < 3 {
                return Err(Error::InvalidTree(format!(
                    "unlabeled vertex {u} has degree {deg}"
                )));
            }
        }
        Ok(())
    }

    pub fn taxa(&self) -> &TaxonSet {
        &self.taxa
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    /// `(neighbor, edge id)` pairs in edge-list order.
    pub fn neighbors(&self, v: usize) -> Vec<(usize, usize)> {
        self.incidence[v]
            .iter()
            .map(|&e| (self.edges[e].other(v), e))
            .collect()
    }

    pub fn vertex_of(&self, taxon: usize) -> usize {
        self.leaf_map[taxon]
    }

    pub fn taxon_at(&self, vertex: usize) -> Option<usize> {
        self.vertex_taxon[vertex]
    }

    pub fn label_at(&self, vertex: usize) -> Option<&str> {
        self.vertex_taxon[vertex].map(|t| self.taxa.label(t))
    }

    /// All vertices have degree 1 or 3 and only leaves are labeled.
    pub fn is_binary(&self) -> bool {
        (0..self.vertex_count).all(|v| match self.degree(v) {
            1 => true,
            3 => self.vertex_taxon[v].is_none(),
            _ => false,
        }) && self.taxa.len() >= 3
            || self.taxa.len() == 2 && self.vertex_count == 2
    }

    /// Edges whose endpoints are both unlabeled.
    pub fn internal_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| self.vertex_taxon[e.a].is_none() && self.vertex_taxon[e.b].is_none())
            .map(|(i, _)| i)
    }

    /// Replaces edge entries wholesale; used by tree rearrangements that keep
    /// the vertex set and labeling.
    pub(crate) fn with_edges(&self, edges: Vec<Edge<T>>) -> Result<Self> {
        let t = Self::assemble(
            self.taxa.clone(),
            self.vertex_count,
            edges,
            self.leaf_map.clone(),
            self.vertex_taxon.clone(),
        );
        t.validate()?;
        Ok(t)
    }

    /// Maps edge weights into another scalar type.
    pub fn map_weights<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PhyloTree<U> {
        PhyloTree {
            taxa: self.taxa.clone(),
            vertex_count: self.vertex_count,
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    a: e.a,
                    b: e.b,
                    weight: f(&e.weight),
                })
                .collect(),
            leaf_map: self.leaf_map.clone(),
            vertex_taxon: self.vertex_taxon.clone(),
            incidence: self.incidence.clone(),
        }
    }

    /// Distance from `source` to every vertex along the unique paths.
    pub fn distances_from(&self, source: usize) -> Vec<T> {
        let mut dist = vec![T::zero(); self.vertex_count];
        let mut parent = vec![usize::MAX; self.vertex_count];
        let mut stack = vec![source];
        parent[source] = source;
        while let Some(u) = stack.pop() {
            for &e in &self.incidence[u] {
                let w = self.edges[e].other(u);
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    dist[w] = dist[u].clone() + &self.edges[e].weight;
                    stack.push(w);
                }
            }
        }
        dist
    }
}

//! Graph metrics, the two extension criteria for edge-weighted graphs, and
//! amalgamation of semimetrics along a shared block.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::semimetric::Semimetric;
use crate::taxa::TaxonSet;

/// Default vertex limit for chordless-cycle enumeration.
pub const DEFAULT_CYCLE_CAP: usize = 16;

/// Simple undirected graph with nonnegative edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<T> {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> WeightedGraph<T> {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut g = WeightedGraph {
            labels: Vec::new(),
            index: HashMap::new(),
            edges: BTreeMap::new(),
        };
        for l in labels {
            g.add_vertex(l.into())?;
        }
        Ok(g)
    }

    fn add_vertex(&mut self, label: String) -> Result<usize> {
        if label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        if self.index.contains_key(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        self.index.insert(label.clone(), self.labels.len());
        self.labels.push(label);
        Ok(self.labels.len() - 1)
    }

    /// Complete graph whose edge weights are the entries of `rho`.
    pub fn complete(rho: &Semimetric<T>) -> Self {
        let mut g = WeightedGraph::new(rho.taxa().labels().iter().cloned())
            .expect("taxon labels are distinct");
        for (i, j) in rho.pairs() {
            g.edges.insert((i, j), rho.get(i, j).clone());
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: T) -> Result<()> {
        let n = self.labels.len();
        if u >= n || v >= n {
            return Err(Error::InvalidArgument(format!(
                "edge ({u}, {v}) has an endpoint outside 0..{n}"
            )));
        }
        if u == v {
            return Err(Error::InvalidArgument(format!(
                "loop at `{}`",
                self.labels[u]
            )));
        }
        if weight < T::zero() {
            return Err(Error::InvalidArgument(format!(
                "negative weight {} on ({u}, {v})",
                weight.format()
            )));
        }
        let key = (u.min(v), u.max(v));
        if self.edges.contains_key(&key) {
            return Err(Error::InvalidArgument(format!(
                "parallel edge between `{}` and `{}`",
                self.labels[key.0], self.labels[key.1]
            )));
        }
        self.edges.insert(key, weight);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Edges as `(u, v, weight)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.edges.iter().map(|(&(u, v), w)| (u, v, w))
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<&T> {
        self.edges.get(&(u.min(v), u.max(v)))
    }

    fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.vertex_count();
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in self.edges.keys() {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if adj[u][v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Parses lines `u v w`; vertices are created in order of appearance.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut g = WeightedGraph::new(Vec::<String>::new())?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [u, v, w] = fields[..] else {
                return Err(Error::Input(format!(
                    "line {}: expected `u v w`",
                    lineno + 1
                )));
            };
            let weight = T::parse_literal(w)
                .ok_or_else(|| Error::Input(format!("line {}: bad weight `{w}`", lineno + 1)))?;
            let mut id = |label: &str| match g.index_of(label) {
                Some(i) => Ok(i),
                None => g.add_vertex(label.to_string()),
            };
            let (a, b) = (id(u)?, id(v)?);
            g.add_edge(a, b, weight)
                .map_err(|e| Error::Input(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(g)
    }
}

/// All-pairs shortest path lengths by Floyd-Warshall, indexed like the
/// graph's vertices.
pub fn shortest_paths<T: Scalar>(g: &WeightedGraph<T>) -> Result<Vec<Vec<T>>> {
    let n = g.vertex_count();
    let mut d: Vec<Vec<Option<T>>> = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(T::zero());
    }
    for (u, v, w) in g.edges() {
        d[u][v] = Some(w.clone());
        d[v][u] = Some(w.clone());
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = d[i][k].clone() else { continue };
            for j in 0..n {
                if let Some(dkj) = &d[k][j] {
                    let via = dik.clone() + dkj;
                    if d[i][j].as_ref().is_none_or(|cur| via < *cur) {
                        d[i][j] = Some(via);
                    }
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().collect::<Option<Vec<T>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::Disconnected)
}

/// Shortest-path semimetric on the vertices. Zero weights are allowed.
pub fn graph_metric<T: Scalar>(g: &WeightedGraph<T>) -> Result<Semimetric<T>> {
    let d = shortest_paths(g)?;
    let taxa = TaxonSet::new(g.labels().iter().cloned())?;
    let order: Vec<usize> = taxa
        .labels()
        .iter()
        .map(|l| g.index_of(l).expect("same labels"))
        .collect();
    let n = order.len();
    let mut flat = Vec::with_capacity(n * n);
    for &i in &order {
        for &j in &order {
            flat.push(d[i][j].clone());
        }
    }
    Ok(Semimetric::from_raw(taxa, flat))
}

/// An edge whose weight exceeds the distance between its endpoints, if any.
/// The edge weights extend to a semimetric on the vertices exactly when
/// there is none.
pub fn extension_witness<T: Scalar>(g: &WeightedGraph<T>) -> Result<Option<(usize, usize)>> {
    let d = shortest_paths(g)?;
    Ok(g.edges()
        .find(|&(u, v, w)| !T::approx_le(w, &d[u][v]))
        .map(|(u, v, _)| (u, v)))
}

pub fn check_extendable<T: Scalar>(g: &WeightedGraph<T>) -> Result<bool> {
    Ok(extension_witness(g)?.is_none())
}

/// Every chordless cycle of length at least 3, as a vertex sequence that
/// starts at its smallest vertex. Fails above `cap` vertices.
pub fn chordless_cycles<T: Scalar>(g: &WeightedGraph<T>, cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::CycleCapExceeded { cap, vertices: n });
    }
    let adj = g.adjacency();
    let mut out = Vec::new();
    for s in 0..n {
        for v1 in (s + 1..n).filter(|&v| adj[s][v]) {
            let mut path = vec![s, v1];
            extend_path(&adj, &mut path, &mut out);
        }
    }
    Ok(out)
}

/// Grows an induced path `s, v1, ..., vk` (all vertices above `s`) and
/// records every chordless cycle closing back at `s`. Each cycle is found
/// once, in the direction where `v1` is smaller than the closing vertex.
fn extend_path(adj: &[Vec<bool>], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let s = path[0];
    let last = *path.last().expect("path starts with two vertices");
    for w in s + 1..adj.len() {
        if !adj[last][w] || path.contains(&w) {
            continue;
        }
        // a chord to an interior vertex rules w out
        if path[1..path.len() - 1].iter().any(|&p| adj[p][w]) {
            continue;
        }
        if adj[s][w] {
            if path[1] < w {
                let mut cycle = path.clone();
                cycle.push(w);
                out.push(cycle);
            }
            continue;
        }
        path.push(w);
        extend_path(adj, path, out);
        path.pop();
    }
}

/// A chordless cycle and one of its edges with `2·q(e) > len(cycle)`, if any.
pub fn minimal_cycle_witness<T: Scalar>(
    g: &WeightedGraph<T>,
    cap: usize,
) -> Result<Option<(Vec<usize>, (usize, usize))>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let two = T::from_int(2);
    for cycle in chordless_cycles(g, cap)? {
        let k = cycle.len();
        let edge = |i: usize| (cycle[i], cycle[(i + 1) % k]);
        let weight = |i: usize| {
            g.weight(edge(i).0, edge(i).1)
                .expect("cycle edges exist")
                .clone()
        };
        let len = (0..k).fold(T::zero(), |acc, i| acc + weight(i));
        if let Some(i) = (0..k).find(|&i| !T::approx_le(&(two.clone() * weight(i)), &len)) {
            let e = edge(i);
            return Ok(Some((cycle, (e.0.min(e.1), e.0.max(e.1)))));
        }
    }
    Ok(None)
}

/// The criterion over minimal (chordless) cycles: every edge on such a
/// cycle weighs at most half the cycle's length.
pub fn check_extendable_minimal_cycles<T: Scalar>(g: &WeightedGraph<T>) -> Result<bool> {
    Ok(minimal_cycle_witness(g, DEFAULT_CYCLE_CAP)?.is_none())
}

/// Glues `d1` on `X∪Y` and `d2` on `Y∪Z` along the shared taxa `Y` and
/// returns the shortest-path semimetric of the union of the two cliques.
pub fn amalgamate<T: Scalar>(d1: &Semimetric<T>, d2: &Semimetric<T>) -> Result<Semimetric<T>> {
    let shared: Vec<&String> = d1
        .taxa()
        .labels()
        .iter()
        .filter(|l| d2.taxa().contains(l))
        .collect();
    for (a, x) in shared.iter().enumerate() {
        for y in &shared[a + 1..] {
            let (p, q) = (d1.get_by_label(x, y)?, d2.get_by_label(x, y)?);
            if !T::approx_eq(p, q) {
                return Err(Error::AmalgamationMismatch(x.to_string(), y.to_string()));
            }
        }
    }
    let mut labels: Vec<String> = d1.taxa().labels().to_vec();
    labels.extend(
        d2.taxa()
            .labels()
            .iter()
            .filter(|l| !d1.taxa().contains(l))
            .cloned(),
    );
    let mut g = WeightedGraph::new(labels)?;
    for (i, j) in d1.pairs() {
        let (u, v) = (
            g.index_of(d1.taxa().label(i)).unwrap(),
            g.index_of(d1.taxa().label(j)).unwrap(),
        );
        g.add_edge(u, v, d1.get(i, j).clone())?;
    }
    for (i, j) in d2.pairs() {
        let (u, v) = (
            g.index_of(d2.taxa().label(i)).unwrap(),
            g.index_of(d2.taxa().label(j)).unwrap(),
        );
        if g.weight(u, v).is_none() {
            g.add_edge(u, v, d2.get(i, j).clone())?;
        }
    }
    graph_metric(&g)
}

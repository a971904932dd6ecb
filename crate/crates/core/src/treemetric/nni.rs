use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::{Edge, PhyloTree};

/// Which of the two non-trivial exchanges across an internal edge `u—v`.
///
/// With `u`'s other neighbors `a, b` and `v`'s other neighbors `c, d`, both
/// listed in edge-list order, `First` swaps `b` with `c` and `Second` swaps
/// `b` with `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NniChoice {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NniMove {
    pub edge: usize,
    pub choice: NniChoice,
}

/// All NNI moves: internal edges in ascending id, both choices each.
pub fn nni_moves<T: Scalar>(tree: &PhyloTree<T>) -> Vec<NniMove> {
    tree.internal_edges()
        .filter(|&e| pivot_ok(tree, e))
        .flat_map(|edge| {
            [NniChoice::First, NniChoice::Second].map(|choice| NniMove { edge, choice })
        })
        .collect()
}

fn pivot_ok<T: Scalar>(tree: &PhyloTree<T>, edge: usize) -> bool {
    let Some(e) = tree.edges().get(edge) else {
        return false;
    };
    [e.a, e.b]
        .iter()
        .all(|&x| tree.taxon_at(x).is_none() && tree.degree(x) == 3)
}

/// Exchanges two subtrees across `mv.edge`. Each pendant subtree keeps the
/// weight of the edge that attaches it, and applying the same move twice
/// restores the original tree.
pub fn apply_nni<T: Scalar>(tree: &PhyloTree<T>, mv: NniMove) -> Result<PhyloTree<T>> {
    if !pivot_ok(tree, mv.edge) {
        return Err(Error::NotInternalEdge(mv.edge));
    }
    let pivot = &tree.edges()[mv.edge];
    let (u, v) = (pivot.a, pivot.b);
    let others = |x: usize| -> Vec<usize> {
        tree.neighbors(x)
            .into_iter()
            .filter(|&(_, e)| e != mv.edge)
            .map(|(_, e)| e)
            .collect()
    };
    let (eu, ev) = (others(u), others(v));
    let from_u = eu[1];
    let from_v = match mv.choice {
        NniChoice::First => ev[0],
        NniChoice::Second => ev[1],
    };
    let mut edges: Vec<Edge<T>> = tree.edges().to_vec();
    let sub_u = edges[from_u].other(u);
    let sub_v = edges[from_v].other(v);
    let (w_u, w_v) = (edges[from_u].weight.clone(), edges[from_v].weight.clone());
    // the slots swap subtrees, so edge-list order around u and v is stable
    edges[from_u] = Edge {
        a: u,
        b: sub_v,
        weight: w_v,
    };
    edges[from_v] = Edge {
        a: v,
        b: sub_u,
        weight: w_u,
    };
    tree.with_edges(edges)
}

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::taxa::TaxonSet;
use crate::tree::PhyloTree;

/// A bipartition `A|B` of the taxon set, stored as the bitmask of the block
/// containing taxon 0 (the lexicographically least label).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Split {
    n: usize,
    bits: Vec<u64>,
}

impl Split {
    /// Canonicalizes the bipartition given by the members of one block.
    pub fn from_block(n: usize, block: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = vec![0u64; n.div_ceil(64)];
        for i in block {
            bits[i / 64] |= 1 << (i % 64);
        }
        let mut s = Split { n, bits };
        if !s.contains(0) {
            s.complement_in_place();
        }
        s
    }

    fn complement_in_place(&mut self) {
        for w in &mut self.bits {
            *w = !*w;
        }
        let extra = self.bits.len() * 64 - self.n;
        if extra > 0 {
            let last = self.bits.len() - 1;
            self.bits[last] &= u64::MAX >> extra;
        }
    }

    pub fn contains(&self, taxon: usize) -> bool {
        self.bits[taxon / 64] >> (taxon % 64) & 1 == 1
    }

    /// Block containing taxon 0.
    pub fn block_a(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.contains(i)).collect()
    }

    pub fn block_b(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| !self.contains(i)).collect()
    }

    pub fn sizes(&self) -> (usize, usize) {
        let a: usize = self.bits.iter().map(|w| w.count_ones() as usize).sum();
        (a, self.n - a)
    }

    /// A split is trivial when one block is a single taxon.
    pub fn is_trivial(&self) -> bool {
        let (a, b) = self.sizes();
        a <= 1 || b <= 1
    }

    /// Hex bitmask of block A, most significant word first.
    pub fn to_hex(&self) -> String {
        let mut s = String::new();
        for (k, w) in self.bits.iter().rev().enumerate() {
            if k == 0 {
                s.push_str(&format!("{w:x}"));
            } else {
                s.push_str(&format!("{w:016x}"));
            }
        }
        s
    }

    pub fn display(&self, taxa: &TaxonSet) -> String {
        let names = |v: Vec<usize>| {
            v.into_iter()
                .map(|i| taxa.label(i).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "{{{}}}|{{{}}}",
            names(self.block_a()),
            names(self.block_b())
        )
    }
}

impl fmt::Debug for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Split({:?}|{:?})", self.block_a(), self.block_b())
    }
}

/// One split per edge, taken from the two components left after deleting it.
pub fn splits_of<T: Scalar>(tree: &PhyloTree<T>) -> BTreeSet<Split> {
    let n = tree.taxa().len();
    let v = tree.vertex_count();
    // root at vertex 0; `below[u]` collects taxa in the subtree of u
    let mut parent_edge = vec![usize::MAX; v];
    let mut order = Vec::with_capacity(v);
    let mut seen = vec![false; v];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        order.push(u);
        for (w, e) in tree.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = e;
                stack.push(w);
            }
        }
    }
    let mut below: Vec<Vec<usize>> = vec![Vec::new(); v];
    let mut out = BTreeSet::new();
    for &u in order.iter().rev() {
        if let Some(t) = tree.taxon_at(u) {
            below[u].push(t);
        }
        if parent_edge[u] != usize::MAX {
            out.insert(Split::from_block(n, below[u].iter().copied()));
            let p = tree.edges()[parent_edge[u]].other(u);
            let moved = std::mem::take(&mut below[u]);
            below[p].extend(moved);
        }
    }
    out
}

/// Size of the symmetric difference of the non-trivial split sets.
pub fn robinson_foulds<T: Scalar>(t1: &PhyloTree<T>, t2: &PhyloTree<T>) -> Result<usize> {
    if t1.taxa() != t2.taxa() {
        return Err(Error::TaxonMismatch);
    }
    let nontrivial = |t: &PhyloTree<T>| {
        splits_of(t)
            .into_iter()
            .filter(|s| !s.is_trivial())
            .collect::<BTreeSet<_>>()
    };
    let (a, b) = (nontrivial(t1), nontrivial(t2));
    Ok(a.symmetric_difference(&b).count())
}

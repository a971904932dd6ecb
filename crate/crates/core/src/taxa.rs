use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite, canonically ordered set of taxon labels.
///
/// Labels are sorted on construction, so two sets built from permutations of
/// the same labels are equal and index their matrices identically. Cloning
/// is cheap; the label storage is shared.
#[derive(Clone)]
pub struct TaxonSet {
    inner: Arc<Inner>,
}

struct Inner {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl TaxonSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.iter().any(String::is_empty) {
            return Err(Error::EmptyLabel);
        }
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLabel(w[0].clone()));
        }
        let index = labels
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, l)| (l, i))
            .collect();
        Ok(TaxonSet {
            inner: Arc::new(Inner { labels, index }),
        })
    }

    pub fn len(&self) -> usize {
        self.inner.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.inner.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.inner.index.get(label).copied()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.inner.index.contains_key(label)
    }

    pub fn is_subset_of(&self, other: &TaxonSet) -> bool {
        self.labels().iter().all(|l| other.contains(l))
    }
}

impl PartialEq for TaxonSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.labels == other.inner.labels
    }
}

impl Eq for TaxonSet {}

impl std::fmt::Debug for TaxonSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.labels()).finish()
    }
}

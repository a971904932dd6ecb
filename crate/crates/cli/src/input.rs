//! Reading trees and distance tables from files or inline arguments.

use std::path::Path;

use anyhow::{Context, Result};
use treegromov::{
    parse_newick, parse_newick_lines, tree_to_semimetric, PhyloTree, Scalar, Semimetric,
};

/// An input argument resolved to its text and a name for messages.
pub struct Source {
    pub name: String,
    pub text: String,
}

impl Source {
    /// A path that exists is read; anything else is taken as inline text.
    pub fn resolve(arg: &str) -> Result<Source> {
        if Path::new(arg).is_file() {
            let text = std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
            Ok(Source {
                name: arg.to_string(),
                text,
            })
        } else {
            Ok(Source {
                name: "<inline>".into(),
                text: arg.to_string(),
            })
        }
    }

    /// Newick if the first meaningful character opens a subtree.
    pub fn is_newick(&self) -> bool {
        self.text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .is_some_and(|l| l.starts_with('('))
    }

    /// `name:line:col` for a byte offset into the text.
    fn locate(&self, pos: usize) -> String {
        let head = &self.text[..pos.min(self.text.len())];
        let line = head.matches('\n').count() + 1;
        let col = head.len() - head.rfind('\n').map_or(0, |i| i + 1) + 1;
        format!("{}:{line}:{col}", self.name)
    }
}

pub enum Input<T> {
    Tree(PhyloTree<T>),
    Metric(Semimetric<T>),
}

impl<T: Scalar> Input<T> {
    pub fn metric(&self) -> Semimetric<T> {
        match self {
            Input::Tree(t) => tree_to_semimetric(t),
            Input::Metric(m) => m.clone(),
        }
    }

    pub fn tree(&self) -> Option<&PhyloTree<T>> {
        match self {
            Input::Tree(t) => Some(t),
            Input::Metric(_) => None,
        }
    }
}

/// Edges without a length get length 1.
pub fn load<T: Scalar>(arg: &str) -> Result<Input<T>> {
    let src = Source::resolve(arg)?;
    if src.is_newick() {
        let start = src.text.find('(').unwrap_or(0);
        let tree = parse_newick(&src.text[start..], &T::one()).map_err(|e| {
            let at = match &e {
                treegromov::Error::Newick { pos, .. }
                | treegromov::Error::NonPositiveLength { pos, .. } => src.locate(start + pos),
                _ => src.name.clone(),
            };
            anyhow::Error::new(e).context(format!("parsing {at}"))
        })?;
        Ok(Input::Tree(tree))
    } else {
        let m = Semimetric::from_csv(&src.text)
            .with_context(|| format!("reading table {}", src.name))?;
        Ok(Input::Metric(m))
    }
}

/// One Newick tree per line.
pub fn load_trees<T: Scalar>(arg: &str) -> Result<Vec<PhyloTree<T>>> {
    let src = Source::resolve(arg)?;
    parse_newick_lines(&src.text, &T::one())
        .map_err(|(line, e)| anyhow::Error::new(e).context(format!("parsing {}:{line}", src.name)))
}

/// Values of an `--extra-column NAME=PATH` file, one per non-comment line.
pub fn extra_column(spec: &str) -> Result<(String, Vec<String>)> {
    let (name, path) = spec
        .split_once('=')
        .ok_or_else(|| crate::Usage(format!("--extra-column expects NAME=PATH, got `{spec}`")))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let values = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    Ok((name.to_string(), values))
}

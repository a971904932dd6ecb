//! Newick reading and writing.
//!
//! A Newick statement describes a rooted tree. Reading unroots it: pendant
//! unlabeled vertices are pruned and unlabeled vertices of degree two
//! (the synthetic root included) are suppressed by merging their two edges.
//! Names on internal nodes are taxa, so generalised X-trees with labeled
//! interior vertices round-trip.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::{Edge, PhyloTree};

struct Node<T> {
    label: Option<String>,
    length: Option<T>,
    parent: Option<usize>,
}

struct Parser<'a, T> {
    text: &'a [u8],
    pos: usize,
    nodes: Vec<Node<T>>,
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Newick {
        pos,
        msg: msg.into(),
    }
}

const DELIMS: &[u8] = b"()[]':;,";

impl<'a, T: Scalar> Parser<'a, T> {
    fn skip_ws(&mut self) -> Result<()> {
        loop {
            match self.text.get(self.pos) {
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                Some(b'[') => {
                    let start = self.pos;
                    while self.text.get(self.pos).is_some_and(|&c| c != b']') {
                        self.pos += 1;
                    }
                    if self.pos >= self.text.len() {
                        return Err(err(start, "unterminated comment"));
                    }
                    self.pos += 1;
                }
                _ => return Ok(()),
            }
        }
    }

    fn peek(&mut self) -> Result<Option<u8>> {
        self.skip_ws()?;
        Ok(self.text.get(self.pos).copied())
    }

    fn subtree(&mut self, parent: Option<usize>) -> Result<usize> {
        let id = self.nodes.len();
        self.nodes.push(Node {
            label: None,
            length: None,
            parent,
        });
        if self.peek()? == Some(b'(') {
            self.pos += 1;
            loop {
                self.subtree(Some(id))?;
                match self.peek()? {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => {
                        return Err(err(
                            self.pos,
                            format!("expected `,` or `)`, found `{}`", c as char),
                        ))
                    }
                    None => return Err(err(self.pos, "unexpected end of input inside `(`")),
                }
            }
        }
        let label_pos = self.pos;
        self.nodes[id].label = self.label()?;
        let is_leaf = !self.nodes.iter().skip(id + 1).any(|n| n.parent == Some(id));
        if is_leaf && self.nodes[id].label.is_none() {
            return Err(err(label_pos, "leaf without a label"));
        }
        if self.peek()? == Some(b':') {
            self.pos += 1;
            self.skip_ws()?;
            let start = self.pos;
            while self
                .text
                .get(self.pos)
                .is_some_and(|c| !DELIMS.contains(c) && !c.is_ascii_whitespace())
            {
                self.pos += 1;
            }
            let raw = std::str::from_utf8(&self.text[start..self.pos]).unwrap_or("");
            let len = T::parse_literal(raw)
                .ok_or_else(|| err(start, format!("bad branch length `{raw}`")))?;
            if len <= T::zero() && parent.is_some() {
                return Err(Error::NonPositiveLength {
                    pos: start,
                    value: raw.to_string(),
                });
            }
            self.nodes[id].length = Some(len);
        }
        Ok(id)
    }

    fn label(&mut self) -> Result<Option<String>> {
        match self.peek()? {
            Some(b'\'') => {
                let start = self.pos;
                self.pos += 1;
                let mut out = Vec::new();
                loop {
                    match self.text.get(self.pos) {
                        None => return Err(err(start, "unterminated quoted label")),
                        Some(b'\'') if self.text.get(self.pos + 1) == Some(&b'\'') => {
                            out.push(b'\'');
                            self.pos += 2;
                        }
                        Some(b'\'') => {
                            self.pos += 1;
                            break;
                        }
                        Some(&c) => {
                            out.push(c);
                            self.pos += 1;
                        }
                    }
                }
                let s = String::from_utf8(out).map_err(|_| err(start, "label is not UTF-8"))?;
                if s.is_empty() {
                    return Err(err(start, "empty quoted label"));
                }
                Ok(Some(s))
            }
            _ => {
                let start = self.pos;
                while self
                    .text
                    .get(self.pos)
                    .is_some_and(|c| !DELIMS.contains(c) && !c.is_ascii_whitespace())
                {
                    self.pos += 1;
                }
                if self.pos == start {
                    return Ok(None);
                }
                let s = std::str::from_utf8(&self.text[start..self.pos])
                    .map_err(|_| err(start, "label is not UTF-8"))?;
                Ok(Some(s.to_string()))
            }
        }
    }
}

/// Parses one Newick statement terminated by `;`. Missing branch lengths
/// default to `default_weight`.
pub fn parse_newick<T: Scalar>(text: &str, default_weight: &T) -> Result<PhyloTree<T>> {
    if *default_weight <= T::zero() {
        return Err(Error::InvalidArgument(
            "default branch length must be positive".into(),
        ));
    }
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        nodes: Vec::new(),
    };
    if p.peek()?.is_none() {
        return Err(err(0, "empty input"));
    }
    p.subtree(None)?;
    match p.peek()? {
        Some(b';') => p.pos += 1,
        Some(c) => return Err(err(p.pos, format!("expected `;`, found `{}`", c as char))),
        None => return Err(err(p.pos, "missing terminating `;`")),
    }
    if let Some(c) = p.peek()? {
        return Err(err(
            p.pos,
            format!("trailing input after `;`: `{}`", c as char),
        ));
    }
    unroot(p.nodes, default_weight)
}

fn unroot<T: Scalar>(nodes: Vec<Node<T>>, default_weight: &T) -> Result<PhyloTree<T>> {
    let n = nodes.len();
    let labels: Vec<Option<String>> = nodes.iter().map(|n| n.label.clone()).collect();
    {
        let mut seen = std::collections::HashSet::new();
        for l in labels.iter().flatten() {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        if seen.len() < 2 {
            return Err(Error::TooFewTaxa(seen.len()));
        }
    }
    // adjacency as (neighbor, weight) lists; `None` marks deleted vertices
    // a missing length stays `None` until the end, so that two unweighted
    // edges merged at a suppressed vertex become one edge of default weight
    let mut adj: Vec<Option<Vec<(usize, Option<T>)>>> = vec![Some(Vec::new()); n];
    for (id, node) in nodes.iter().enumerate() {
        if let Some(p) = node.parent {
            adj[p].as_mut().unwrap().push((id, node.length.clone()));
            adj[id].as_mut().unwrap().push((p, node.length.clone()));
        }
    }
    let remove_edge = |adj: &mut Vec<Option<Vec<(usize, Option<T>)>>>, u: usize, v: usize| {
        if let Some(l) = adj[u].as_mut() {
            l.retain(|(x, _)| *x != v);
        }
    };
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if labels[v].is_some() {
                continue;
            }
            let Some(list) = adj[v].clone() else { continue };
            match list.len() {
                0 => {
                    adj[v] = None;
                    changed = true;
                }
                1 => {
                    // pendant unlabeled vertex, e.g. a root above a single child
                    let (u, _) = list[0];
                    remove_edge(&mut adj, u, v);
                    adj[v] = None;
                    changed = true;
                }
                2 => {
                    let (a, wa) = list[0].clone();
                    let (b, wb) = list[1].clone();
                    let w = match (wa, wb) {
                        (None, None) => None,
                        (wa, wb) => Some(
                            wa.unwrap_or_else(|| default_weight.clone())
                                + &wb.unwrap_or_else(|| default_weight.clone()),
                        ),
                    };
                    remove_edge(&mut adj, a, v);
                    remove_edge(&mut adj, b, v);
                    adj[a].as_mut().unwrap().push((b, w.clone()));
                    adj[b].as_mut().unwrap().push((a, w));
                    adj[v] = None;
                    changed = true;
                }
                _ => {}
            }
        }
    }
    let mut new_id = vec![usize::MAX; n];
    let mut count = 0;
    for v in 0..n {
        if adj[v].is_some() {
            new_id[v] = count;
            count += 1;
        }
    }
    let mut edges = Vec::new();
    for v in 0..n {
        if let Some(list) = &adj[v] {
            for (u, w) in list {
                if v < *u {
                    let w = w.clone().unwrap_or_else(|| default_weight.clone());
                    edges.push((new_id[v].min(new_id[*u]), new_id[v].max(new_id[*u]), w));
                }
            }
        }
    }
    edges.sort_by_key(|e| (e.0, e.1));
    let edges = edges
        .into_iter()
        .map(|(a, b, weight)| Edge { a, b, weight })
        .collect();
    let assignments = (0..n)
        .filter_map(|v| labels[v].clone().map(|l| (l, new_id[v])))
        .collect();
    PhyloTree::new(count, edges, assignments)
}

/// Parses one tree per non-empty line.
pub fn parse_newick_lines<T: Scalar>(
    text: &str,
    default_weight: &T,
) -> Result<Vec<PhyloTree<T>>, (usize, Error)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_newick(l, default_weight).map_err(|e| (i + 1, e)))
        .collect()
}

fn quote_label(label: &str) -> String {
    if label
        .bytes()
        .any(|c| DELIMS.contains(&c) || c.is_ascii_whitespace())
    {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

/// Writes a rooted Newick statement. The root is the lowest-numbered vertex
/// of degree at least two; a single-edge tree is rooted at its midpoint.
pub fn write_newick<T: Scalar>(tree: &PhyloTree<T>) -> String {
    let root = (0..tree.vertex_count()).find(|&v| tree.degree(v) >= 2);
    let Some(root) = root else {
        let e = &tree.edges()[0];
        let half = e.weight.half().format();
        return format!(
            "({}:{half},{}:{half});",
            quote_label(tree.label_at(e.a).unwrap()),
            quote_label(tree.label_at(e.b).unwrap())
        );
    };
    let mut out = String::new();
    emit(tree, root, usize::MAX, &mut out);
    out.push(';');
    out
}

fn emit<T: Scalar>(tree: &PhyloTree<T>, v: usize, parent: usize, out: &mut String) {
    let mut children: Vec<(usize, usize)> = tree
        .neighbors(v)
        .into_iter()
        .filter(|&(u, _)| u != parent)
        .collect();
    children.sort_by_key(|&(u, _)| u);
    if !children.is_empty() {
        out.push('(');
        for (k, (u, e)) in children.into_iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            emit(tree, u, v, out);
            out.push(':');
            out.push_str(&tree.edges()[e].weight.format());
        }
        out.push(')');
    }
    if let Some(l) = tree.label_at(v) {
        out.push_str(&quote_label(l));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn p(s: &str) -> PhyloTree<f64> {
        parse_newick(s, &1.0).unwrap()
    }

    #[test]
    fn quartet_shape() {
        let t = p("((A,B),(C,D));");
        assert_eq!(t.vertex_count(), 6);
        assert_eq!(t.edges().len(), 5);
        assert!(t.edges().iter().all(|e| e.weight == 1.0));
        assert_eq!(t.internal_edges().count(), 1);
        // two unweighted root edges merge into one unit edge
        let ie = t.internal_edges().next().unwrap();
        assert_eq!(t.edges()[ie].weight, 1.0);
        let t = p("((A,B):1,(C,D));");
        let ie = t.internal_edges().next().unwrap();
        assert_eq!(t.edges()[ie].weight, 2.0);
    }

    #[test]
    fn two_leaves_collapse_to_one_edge() {
        let t = p("(A:1,B:1);");
        assert_eq!(t.vertex_count(), 2);
        assert_eq!(t.edges()[0].weight, 2.0);
    }

    #[test]
    fn syntax_errors_report_position() {
        let e = parse_newick::<f64>("((A,B),(C,D)", &1.0).unwrap_err();
        assert!(matches!(e, Error::Newick { .. }));
        let e = parse_newick::<f64>("(A,B,);", &1.0).unwrap_err();
        assert_eq!(
            e,
            Error::Newick {
                pos: 5,
                msg: "leaf without a label".into()
            }
        );
        let e = parse_newick::<f64>("(A,B);x", &1.0).unwrap_err();
        assert!(matches!(e, Error::Newick { pos: 6, .. }));
        assert!(matches!(
            parse_newick::<f64>("(A:x,B);", &1.0),
            Err(Error::Newick { pos: 3, .. })
        ));
    }

    #[test]
    fn semantic_errors() {
        assert_eq!(
            parse_newick::<f64>("(A,A);", &1.0).unwrap_err(),
            Error::DuplicateLabel("A".into())
        );
        assert!(matches!(
            parse_newick::<f64>("(A:0,B);", &1.0),
            Err(Error::NonPositiveLength { .. })
        ));
        assert!(matches!(
            parse_newick::<f64>("(A:-1,B);", &1.0),
            Err(Error::NonPositiveLength { .. })
        ));
        assert_eq!(
            parse_newick::<f64>("(A);", &1.0).unwrap_err(),
            Error::TooFewTaxa(1)
        );
    }

    #[test]
    fn quoting_comments_and_whitespace() {
        let t = p(" ( 'x y':1 [comment], 'it''s' : 2 ,z) ; ");
        assert_eq!(t.taxa().labels(), ["it's", "x y", "z"]);
        let back = p(&write_newick(&t));
        assert_eq!(back.taxa(), t.taxa());
    }

    #[test]
    fn single_child_root_is_pruned() {
        let t = p("((A,B,C));");
        assert_eq!(t.vertex_count(), 4);
        assert_eq!(t.edges().len(), 3);
    }

    #[test]
    fn rational_lengths_are_exact() {
        let t = parse_newick::<Rational>("((A:0.5,B:0.5):0.25,C:1,D:2);", &Rational::from_int(1))
            .unwrap();
        let w: Vec<String> = t.edges().iter().map(|e| e.weight.format()).collect();
        assert!(w.contains(&"0.25".to_string()));
        let out = write_newick(&t);
        assert_eq!(
            parse_newick::<Rational>(&out, &Rational::from_int(1))
                .unwrap()
                .edges()
                .len(),
            5
        );
    }

    #[test]
    fn write_single_edge() {
        let t = p("(A:1,B:1);");
        assert_eq!(write_newick(&t), "(A:1,B:1);");
    }

    #[test]
    fn multi_line_reports_line_numbers() {
        let err = parse_newick_lines::<f64>("(A,B);\n\n(C,;\n", &1.0).unwrap_err();
        assert_eq!(err.0, 3);
        assert_eq!(
            parse_newick_lines::<f64>("(A,B);\n(A,B);\n", &1.0)
                .unwrap()
                .len(),
            2
        );
    }
}

//! Axiom and four-point report for a distance table or tree.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use treegromov::semimetric::parse_csv_table;
use treegromov::{four_point_violation, tree_to_semimetric, Scalar, Semimetric};

use crate::input::{load, Input, Source};

/// Witnesses listed per failing check before the remainder is counted.
const SHOWN: usize = 10;

pub struct Report {
    pub text: String,
    /// False when a semimetric axiom fails.
    pub axioms_ok: bool,
}

fn section(out: &mut String, name: &str, witnesses: &[String]) -> bool {
    if witnesses.is_empty() {
        let _ = writeln!(out, "{name}: PASS");
        return true;
    }
    let _ = writeln!(out, "{name}: FAIL ({} violations)", witnesses.len());
    for w in witnesses.iter().take(SHOWN) {
        let _ = writeln!(out, "  {w}");
    }
    if witnesses.len() > SHOWN {
        let _ = writeln!(out, "  ... {} more", witnesses.len() - SHOWN);
    }
    false
}

pub fn run<T: Scalar>(arg: &str) -> Result<Report> {
    let src = Source::resolve(arg)?;
    let mut out = String::new();
    let rho: Semimetric<T> = if src.is_newick() {
        let Input::Tree(t) = load::<T>(arg)? else {
            unreachable!()
        };
        let _ = writeln!(out, "input: tree on {} taxa", t.taxa().len());
        tree_to_semimetric(&t)
    } else {
        let (labels, d) = parse_csv_table::<T>(&src.text)
            .with_context(|| format!("reading table {}", src.name))?;
        let _ = writeln!(out, "input: table on {} taxa", labels.len());
        let n = labels.len();
        let mut ok = true;

        let diag: Vec<String> = (0..n)
            .filter(|&i| !d[i][i].is_zero())
            .map(|i| format!("d({0},{0}) = {1}", labels[i], d[i][i].format()))
            .collect();
        ok &= section(&mut out, "zero diagonal", &diag);

        let neg: Vec<String> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| d[i][j] < T::zero())
            .map(|(i, j)| format!("d({},{}) = {}", labels[i], labels[j], d[i][j].format()))
            .collect();
        ok &= section(&mut out, "nonnegative", &neg);

        let asym: Vec<String> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !T::approx_eq(&d[i][j], &d[j][i]))
            .map(|(i, j)| {
                format!(
                    "d({x},{y}) = {} but d({y},{x}) = {}",
                    d[i][j].format(),
                    d[j][i].format(),
                    x = labels[i],
                    y = labels[j]
                )
            })
            .collect();
        ok &= section(&mut out, "symmetric", &asym);

        let mut tri = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                for z in (0..n).filter(|&z| z != x && z != y) {
                    let detour = d[x][z].clone() + &d[z][y];
                    if !T::approx_le(&d[x][y], &detour) {
                        tri.push(format!(
                            "d({x},{y}) = {} > d({x},{z}) + d({z},{y}) = {}",
                            d[x][y].format(),
                            detour.format(),
                            x = labels[x],
                            y = labels[y],
                            z = labels[z],
                        ));
                    }
                }
            }
        }
        ok &= section(&mut out, "triangle", &tri);

        if !ok {
            let _ = writeln!(out, "semimetric: FAIL");
            let _ = writeln!(out, "four-point: SKIPPED");
            return Ok(Report {
                text: out,
                axioms_ok: false,
            });
        }
        Semimetric::from_table(&labels, &d)?
    };
    let _ = writeln!(out, "semimetric: PASS");
    match four_point_violation(&rho) {
        None => {
            let _ = writeln!(out, "four-point: PASS");
        }
        Some(q) => {
            let l = |i: usize| rho.taxa().label(q[i]);
            let s = |a: usize, b: usize, c: usize, e: usize| {
                (rho.get(q[a], q[b]).clone() + rho.get(q[c], q[e])).format()
            };
            let _ = writeln!(
                out,
                "four-point: FAIL ({}, {}, {}, {})",
                l(0),
                l(1),
                l(2),
                l(3)
            );
            let _ = writeln!(
                out,
                "  d({},{}) + d({},{}) = {} exceeds d({0},{2}) + d({1},{3}) = {} and d({0},{3}) + d({1},{2}) = {}",
                l(0),
                l(1),
                l(2),
                l(3),
                s(0, 1, 2, 3),
                s(0, 2, 1, 3),
                s(0, 3, 1, 2)
            );
        }
    }
    Ok(Report {
        text: out,
        axioms_ok: true,
    })
}

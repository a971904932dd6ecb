//! Dense LP and convex diagonal QP solvers for the matched-distance programs.
//!
//! Both solvers work on inequality form: every constraint, including the
//! variable bounds, becomes a row `g·x ≥ h`. A vertex is described by a
//! working set of `n` linearly independent active rows together with the
//! inverse of their `n × n` matrix, which is updated by rank-one row
//! replacement after each pivot.

mod linalg;
mod lp;
mod qp;

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

pub use lp::solve_lp;
pub use qp::solve_qp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Le,
}

/// `Σ coef·x[var]  (≥|≤)  rhs` with one or two `±1` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub terms: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

/// `minimize c·x` subject to the constraints, `x ≥ 0` and optional upper bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
    pub upper: Vec<Option<T>>,
}

/// `minimize Σ w_j x_j²` under the same constraint structure as [`LinearProgram`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProgram<T> {
    pub weights: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
    pub upper: Vec<Option<T>>,
}

fn push_row<T: Scalar>(
    rows: &mut Vec<Constraint<T>>,
    terms: &[(usize, i8)],
    relation: Relation,
    rhs: T,
) {
    let terms = terms
        .iter()
        .map(|&(j, s)| (j, T::from_int(s.into())))
        .collect();
    rows.push(Constraint {
        terms,
        relation,
        rhs,
    });
}

fn validate_rows<T: Scalar>(n: usize, rows: &[Constraint<T>], upper: &[Option<T>]) -> Result<()> {
    if upper.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} upper bounds for {n} variables",
            upper.len()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        let ok_len = matches!(row.terms.len(), 1 | 2);
        let ok_coef = row
            .terms
            .iter()
            .all(|(j, c)| *j < n && c.abs_val().is_one());
        let distinct = row.terms.len() < 2 || row.terms[0].0 != row.terms[1].0;
        if !(ok_len && ok_coef && distinct) {
            return Err(Error::InvalidArgument(format!(
                "constraint {i} must have one or two distinct ±1 terms"
            )));
        }
    }
    Ok(())
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(objective: Vec<T>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds `Σ sign·x[var] ≥ rhs`.
    pub fn ge(&mut self, terms: &[(usize, i8)], rhs: T) -> &mut Self {
        push_row(&mut self.constraints, terms, Relation::Ge, rhs);
        self
    }

    /// Adds `Σ sign·x[var] ≤ rhs`.
    pub fn le(&mut self, terms: &[(usize, i8)], rhs: T) -> &mut Self {
        push_row(&mut self.constraints, terms, Relation::Le, rhs);
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_rows(self.num_vars(), &self.constraints, &self.upper)
    }

    pub fn objective_at(&self, x: &[T]) -> T {
        self.objective
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (c, v)| acc + c.clone() * v)
    }

    /// Plain-text listing of the program, for diagnostics.
    pub fn dump(&self) -> String {
        let mut s = String::from("minimize ");
        s.push_str(&linear_form(
            self.objective
                .iter()
                .enumerate()
                .map(|(j, c)| (j, c.clone())),
        ));
        s.push('\n');
        dump_rows(&mut s, &self.constraints, &self.upper);
        s
    }
}

impl<T: Scalar> QuadraticProgram<T> {
    pub fn new(weights: Vec<T>) -> Self {
        let n = weights.len();
        QuadraticProgram {
            weights,
            constraints: Vec::new(),
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn ge(&mut self, terms: &[(usize, i8)], rhs: T) -> &mut Self {
        push_row(&mut self.constraints, terms, Relation::Ge, rhs);
        self
    }

    pub fn le(&mut self, terms: &[(usize, i8)], rhs: T) -> &mut Self {
        push_row(&mut self.constraints, terms, Relation::Le, rhs);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(j) = self.weights.iter().position(|w| *w <= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "quadratic weight {j} must be positive"
            )));
        }
        validate_rows(self.num_vars(), &self.constraints, &self.upper)
    }

    pub fn objective_at(&self, x: &[T]) -> T {
        self.weights
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (w, v)| acc + w.clone() * v * v)
    }

    pub fn dump(&self) -> String {
        let mut s = String::from("minimize ");
        let terms: Vec<String> = self
            .weights
            .iter()
            .enumerate()
            .map(|(j, w)| format!("{}*x{j}^2", w.format()))
            .collect();
        s.push_str(&terms.join(" + "));
        s.push('\n');
        dump_rows(&mut s, &self.constraints, &self.upper);
        s
    }
}

fn linear_form<T: Scalar>(terms: impl Iterator<Item = (usize, T)>) -> String {
    let mut s = String::new();
    for (j, c) in terms {
        if c.is_zero() {
            continue;
        }
        let neg = c < T::zero();
        let mag = c.abs_val();
        let sign = match (s.is_empty(), neg) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        let coef = if mag.is_one() {
            String::new()
        } else {
            format!("{}*", mag.format())
        };
        let _ = write!(s, "{sign}{coef}x{j}");
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn dump_rows<T: Scalar>(s: &mut String, rows: &[Constraint<T>], upper: &[Option<T>]) {
    for (i, r) in rows.iter().enumerate() {
        let rel = match r.relation {
            Relation::Ge => ">=",
            Relation::Le => "<=",
        };
        let _ = writeln!(
            s,
            "  c{i}: {} {rel} {}",
            linear_form(r.terms.iter().cloned()),
            r.rhs.format()
        );
    }
    for (j, u) in upper.iter().enumerate() {
        if let Some(u) = u {
            let _ = writeln!(s, "  x{j} <= {}", u.format());
        }
    }
}

/// Simplex variant for [`solve_lp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LpMethod {
    /// Dual simplex from the all-zero working set; needs `c ≥ 0` and falls
    /// back to the primal method otherwise.
    #[default]
    Dual,
    /// Two-phase primal simplex.
    Primal,
}

impl std::str::FromStr for LpMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "dual" => Ok(LpMethod::Dual),
            "primal" => Ok(LpMethod::Primal),
            _ => Err(format!("unknown LP method `{s}` (expected dual or primal)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
        })
    }
}

/// A row of the inequality form, as seen from the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowRef {
    /// `x[j] ≥ 0`
    Lower(usize),
    /// The caller's constraint `i`, oriented as `≥`.
    Constraint(usize),
    /// `x[j] ≤ u[j]`
    Upper(usize),
}

/// Residuals of the Karush-Kuhn-Tucker conditions at a QP solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Kkt<T> {
    pub stationarity: T,
    pub primal: T,
    pub dual: T,
    pub complementarity: T,
}

impl<T: Scalar> Kkt<T> {
    pub fn max(&self) -> T {
        [&self.primal, &self.dual, &self.complementarity]
            .into_iter()
            .fold(self.stationarity.clone(), |m, v| T::max_of(m, v.clone()))
    }
}

/// Outcome of [`solve_lp`] or [`solve_qp`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult<T> {
    pub status: Status,
    /// Objective at `argmin`; for a QP this is `Σ w x²` without a square root.
    pub value: T,
    pub argmin: Vec<T>,
    pub iterations: usize,
    pub mode: Mode,
    /// Nonnegative multipliers of the rows active at the optimum. For an
    /// infeasible problem they form a Farkas certificate instead: they
    /// combine the listed rows into `0 ≥ positive`. Their support is an
    /// unsatisfiable subset.
    pub multipliers: Vec<(RowRef, T)>,
    /// LP only: `Σ multiplier·rhs`, which equals `value` at an optimum.
    pub dual_value: Option<T>,
    /// QP only.
    pub kkt: Option<Kkt<T>>,
}

impl<T: Scalar> OptResult<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Largest KKT residual; zero for LP results.
    pub fn kkt_residual(&self) -> T {
        self.kkt.as_ref().map_or_else(T::zero, Kkt::max)
    }

    /// Rows with a nonzero multiplier.
    pub fn support(&self) -> Vec<RowRef> {
        self.multipliers
            .iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(r, _)| *r)
            .collect()
    }

    /// Text block with status, argmin, active rows and objective.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "status: {} ({} mode, {} iterations)",
            self.status, self.mode, self.iterations
        );
        let _ = writeln!(s, "objective: {}", self.value.format());
        let xs: Vec<String> = self.argmin.iter().map(Scalar::format).collect();
        let _ = writeln!(s, "argmin: [{}]", xs.join(", "));
        for (r, m) in &self.multipliers {
            let _ = writeln!(s, "  {r:?}: {}", m.format());
        }
        if let Some(k) = &self.kkt {
            let _ = writeln!(
                s,
                "kkt: stationarity {} primal {} dual {} complementarity {}",
                k.stationarity.format(),
                k.primal.format(),
                k.dual.format(),
                k.complementarity.format()
            );
        }
        s
    }
}

/// A `≥` row of the inequality form.
#[derive(Debug, Clone)]
pub(crate) struct Ineq<T> {
    pub terms: Vec<(usize, T)>,
    pub rhs: T,
    pub origin: RowRef,
}

impl<T: Scalar> Ineq<T> {
    pub fn eval(&self, x: &[T]) -> T {
        let mut terms = self.terms.iter().map(|(j, c)| c.mul_coef(&x[*j]));
        let first = terms.next().unwrap_or_else(T::zero);
        terms.fold(first, |acc, t| acc + t)
    }
}

/// Lowers constraints and bounds to `≥` rows: the `n` nonnegativity rows
/// first, then the caller's constraints, then the upper bounds.
pub(crate) fn inequality_form<T: Scalar>(
    n: usize,
    rows: &[Constraint<T>],
    upper: &[Option<T>],
) -> Vec<Ineq<T>> {
    let mut out = Vec::with_capacity(n + rows.len());
    for j in 0..n {
        out.push(Ineq {
            terms: vec![(j, T::one())],
            rhs: T::zero(),
            origin: RowRef::Lower(j),
        });
    }
    for (i, r) in rows.iter().enumerate() {
        let (terms, rhs) = match r.relation {
            Relation::Ge => (r.terms.clone(), r.rhs.clone()),
            Relation::Le => (
                r.terms.iter().map(|(j, c)| (*j, -c.clone())).collect(),
                -r.rhs.clone(),
            ),
        };
        out.push(Ineq {
            terms,
            rhs,
            origin: RowRef::Constraint(i),
        });
    }
    for (j, u) in upper.iter().enumerate() {
        if let Some(u) = u {
            out.push(Ineq {
                terms: vec![(j, -T::one())],
                rhs: -u.clone(),
                origin: RowRef::Upper(j),
            });
        }
    }
    out
}

/// Slack allowed before a row counts as violated: a hundredth of the
/// validation slack, so that optimal points satisfy every row to well
/// within `1e-9`.
pub(crate) fn feasibility_slack<T: Scalar>(scale: &T) -> T {
    T::slack(scale) / T::from_int(100)
}

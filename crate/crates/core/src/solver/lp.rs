use super::linalg;
use super::{
    feasibility_slack, inequality_form, Ineq, LinearProgram, LpMethod, OptResult, RowRef, Status,
};
use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

const REFACTOR_EVERY: usize = 64;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 30;

/// A vertex given by `n` active rows and the inverse of their matrix.
struct Vertex<'a, T> {
    rows: &'a [Ineq<T>],
    c: &'a [T],
    n: usize,
    work: Vec<usize>,
    slot_of: Vec<Option<usize>>,
    /// `inv[i*n + k]`; column `k` moves `x` off row `work[k]` at unit rate.
    inv: Vec<T>,
    x: Vec<T>,
    /// `g·x` for every row
    vals: Vec<T>,
    /// rows mentioning each variable
    touch: Vec<Vec<usize>>,
    pivots: usize,
    since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
}

enum Outcome<T> {
    Optimal,
    Infeasible(Vec<(usize, T)>),
    Unbounded,
    Stalled,
}

impl<'a, T: Scalar> Vertex<'a, T> {
    fn new(rows: &'a [Ineq<T>], c: &'a [T], work: Vec<usize>) -> Option<Self> {
        let n = c.len();
        debug_assert_eq!(work.len(), n);
        let mut slot_of = vec![None; rows.len()];
        for (k, &r) in work.iter().enumerate() {
            slot_of[r] = Some(k);
        }
        let mut touch = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            for (j, _) in &row.terms {
                touch[*j].push(i);
            }
        }
        let mut v = Vertex {
            rows,
            c,
            n,
            work,
            slot_of,
            inv: Vec::new(),
            x: vec![T::zero(); n],
            vals: vec![T::zero(); rows.len()],
            touch,
            pivots: 0,
            since_refactor: 0,
            degenerate_run: 0,
            bland: false,
        };
        v.refactor().then_some(v)
    }

    fn refactor(&mut self) -> bool {
        let n = self.n;
        let mut a = vec![T::zero(); n * n];
        for (k, &r) in self.work.iter().enumerate() {
            for (j, coef) in &self.rows[r].terms {
                a[k * n + j] = coef.clone();
            }
        }
        match linalg::invert(&a, n) {
            Some(inv) => {
                self.inv = inv;
                self.since_refactor = 0;
                self.recompute_x();
                true
            }
            None => false,
        }
    }

    fn recompute_x(&mut self) {
        let n = self.n;
        for i in 0..n {
            let mut s = T::zero();
            for k in 0..n {
                let h = &self.rows[self.work[k]].rhs;
                if !h.is_zero() {
                    s += &(self.inv[i * n + k].clone() * h);
                }
            }
            self.x[i] = s;
        }
        self.vals = self.rows.iter().map(|r| r.eval(&self.x)).collect();
    }

    /// Multipliers expressing `c` in the active rows.
    fn lambdas(&self) -> Vec<T> {
        let n = self.n;
        let mut lam = vec![T::zero(); n];
        for (i, ci) in self.c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (k, l) in lam.iter_mut().enumerate() {
                *l += &(ci.clone() * &self.inv[i * n + k]);
            }
        }
        lam
    }

    /// Coordinates of row `r` in the basis of active rows.
    fn alpha(&self, r: usize) -> Vec<T> {
        let n = self.n;
        let mut a = vec![T::zero(); n];
        for (j, coef) in &self.rows[r].terms {
            for (k, ak) in a.iter_mut().enumerate() {
                *ak += &coef.mul_coef(&self.inv[j * n + k]);
            }
        }
        a
    }

    fn column(&self, k: usize) -> Vec<T> {
        (0..self.n)
            .map(|i| self.inv[i * self.n + k].clone())
            .collect()
    }

    fn note_step(&mut self, degenerate: bool) {
        if degenerate {
            self.degenerate_run += 1;
            if self.degenerate_run > DEGENERATE_LIMIT {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
        }
    }

    /// Puts row `r` into slot `k`, given `alpha = self.alpha(r)`.
    fn replace(&mut self, k: usize, r: usize, alpha: &[T]) {
        let n = self.n;
        let ak = alpha[k].clone();
        let shortfall = self.rows[r].rhs.clone() - &self.vals[r];
        for i in 0..n {
            let piv = self.inv[i * n + k].clone() / &ak;
            if !piv.is_zero() {
                for (j, aj) in alpha.iter().enumerate() {
                    if j != k && !aj.is_zero() {
                        let t = aj.clone() * &piv;
                        self.inv[i * n + j] -= t;
                    }
                }
            }
            self.inv[i * n + k] = piv;
        }
        self.slot_of[self.work[k]] = None;
        self.slot_of[r] = Some(k);
        self.work[k] = r;
        self.pivots += 1;
        self.since_refactor += 1;
        if T::MODE == Mode::Rational {
            // the new column k moves x onto row r and keeps the other rows tight
            if !shortfall.is_zero() {
                let mut dirty = vec![false; self.rows.len()];
                for i in 0..n {
                    if !self.inv[i * n + k].is_zero() {
                        let step = self.inv[i * n + k].clone() * &shortfall;
                        self.x[i] += step;
                        for &row in &self.touch[i] {
                            dirty[row] = true;
                        }
                    }
                }
                for (i, d) in dirty.into_iter().enumerate() {
                    if d {
                        self.vals[i] = self.rows[i].eval(&self.x);
                    }
                }
            }
            return;
        }
        if self.since_refactor >= REFACTOR_EVERY && self.refactor() {
            return;
        }
        self.recompute_x();
    }

    /// In float mode an optimum is confirmed on a fresh factorization.
    fn needs_confirmation(&mut self) -> bool {
        T::MODE == Mode::Float && self.since_refactor > 0 && self.refactor()
    }
}

fn violation<T: Scalar>(row: &Ineq<T>, gx: &T) -> Option<T> {
    if T::MODE == Mode::Rational {
        return (*gx < row.rhs).then(|| row.rhs.clone() - gx);
    }
    let scale = T::max_of(gx.abs_val(), row.rhs.abs_val());
    let v = row.rhs.clone() - gx;
    (v > feasibility_slack(&scale)).then_some(v)
}

/// Dual simplex from a dual feasible vertex (all multipliers nonnegative).
fn dual_simplex<T: Scalar>(v: &mut Vertex<'_, T>, cap: usize) -> Outcome<T> {
    let tol = T::pivot_tolerance();
    loop {
        if v.pivots >= cap {
            return Outcome::Stalled;
        }
        let mut enter: Option<(usize, T)> = None;
        for (i, row) in v.rows.iter().enumerate() {
            if v.slot_of[i].is_some() {
                continue;
            }
            if let Some(viol) = violation(row, &v.vals[i]) {
                if v.bland {
                    enter = Some((i, viol));
                    break;
                }
                if enter.as_ref().is_none_or(|(_, b)| viol > *b) {
                    enter = Some((i, viol));
                }
            }
        }
        let Some((r, _)) = enter else {
            if v.needs_confirmation() {
                continue;
            }
            return Outcome::Optimal;
        };
        let lambda = v.lambdas();
        let alpha = v.alpha(r);
        let mut leave: Option<(usize, T)> = None;
        for k in 0..v.n {
            if alpha[k] > tol {
                let ratio = T::max_of(lambda[k].clone(), T::zero()) / &alpha[k];
                let better = match &leave {
                    None => true,
                    Some((kk, best)) => {
                        ratio < *best || (ratio == *best && v.work[k] < v.work[*kk])
                    }
                };
                if better {
                    leave = Some((k, ratio));
                }
            }
        }
        let Some((k, theta)) = leave else {
            // row r is a nonpositive combination of the active rows, yet violated
            let mut cert = vec![(r, T::one())];
            for (k, a) in alpha.iter().enumerate() {
                if *a < T::zero() {
                    cert.push((v.work[k], -a.clone()));
                }
            }
            return Outcome::Infeasible(cert);
        };
        v.note_step(theta.is_zero());
        v.replace(k, r, &alpha);
    }
}

/// Primal simplex from a primal feasible vertex.
fn primal_simplex<T: Scalar>(v: &mut Vertex<'_, T>, cap: usize) -> Outcome<T> {
    let tol = T::pivot_tolerance();
    let cscale = v.c.iter().fold(T::zero(), |m, c| T::max_of(m, c.abs_val()));
    let dual_slack = feasibility_slack(&cscale);
    loop {
        if v.pivots >= cap {
            return Outcome::Stalled;
        }
        let lambda = v.lambdas();
        let mut pick: Option<usize> = None;
        for k in 0..v.n {
            if lambda[k] >= -dual_slack.clone() {
                continue;
            }
            let better = match pick {
                None => true,
                Some(kk) if v.bland => v.work[k] < v.work[kk],
                Some(kk) => {
                    lambda[k] < lambda[kk] || (lambda[k] == lambda[kk] && v.work[k] < v.work[kk])
                }
            };
            if better {
                pick = Some(k);
            }
        }
        let Some(k) = pick else {
            if v.needs_confirmation() {
                continue;
            }
            return Outcome::Optimal;
        };
        let p = v.column(k);
        let mut leave: Option<(usize, T)> = None;
        for (i, row) in v.rows.iter().enumerate() {
            if v.slot_of[i].is_some() {
                continue;
            }
            let gp = row.eval(&p);
            if gp < -tol.clone() {
                let gap = T::max_of(v.vals[i].clone() - &row.rhs, T::zero());
                let step = gap / &(-gp);
                if leave.as_ref().is_none_or(|(_, best)| step < *best) {
                    leave = Some((i, step));
                }
            }
        }
        let Some((r, step)) = leave else {
            return Outcome::Unbounded;
        };
        let alpha = v.alpha(r);
        v.note_step(step.is_zero());
        v.replace(k, r, &alpha);
    }
}

fn iteration_cap(n: usize, m: usize) -> usize {
    1000 + 50 * (n + m)
}

fn stalled<T: Scalar>(lp: &LinearProgram<T>, phase: &str) -> Error {
    Error::Internal {
        msg: format!("simplex {phase} exceeded its iteration limit"),
        dump: lp.dump(),
    }
}

fn certificate<T: Scalar>(rows: &[Ineq<T>], pairs: Vec<(usize, T)>) -> Vec<(RowRef, T)> {
    let mut out: Vec<(RowRef, T)> = pairs
        .into_iter()
        .map(|(r, m)| (rows[r].origin, m))
        .collect();
    out.sort_by_key(|(r, _)| *r);
    out
}

fn finish<T: Scalar>(lp: &LinearProgram<T>, v: &Vertex<'_, T>, pivots: usize) -> OptResult<T> {
    let lambda = v.lambdas();
    let mut argmin = v.x.clone();
    if T::MODE == Mode::Float {
        for x in &mut argmin {
            if *x < T::zero() {
                *x = T::zero();
            }
        }
    }
    let mut dual_value = T::zero();
    let mut pairs = Vec::with_capacity(v.n);
    for (k, lam) in lambda.into_iter().enumerate() {
        let lam = T::max_of(lam, T::zero());
        dual_value += &(lam.clone() * &v.rows[v.work[k]].rhs);
        pairs.push((v.work[k], lam));
    }
    OptResult {
        status: Status::Optimal,
        value: lp.objective_at(&argmin),
        argmin,
        iterations: pivots,
        mode: T::MODE,
        multipliers: certificate(v.rows, pairs),
        dual_value: Some(dual_value),
        kkt: None,
    }
}

fn infeasible<T: Scalar>(
    x: Vec<T>,
    pivots: usize,
    multipliers: Vec<(RowRef, T)>,
    lp: &LinearProgram<T>,
) -> OptResult<T> {
    OptResult {
        status: Status::Infeasible,
        value: lp.objective_at(&x),
        argmin: x,
        iterations: pivots,
        mode: T::MODE,
        multipliers,
        dual_value: None,
        kkt: None,
    }
}

/// Minimizes `lp` with the chosen simplex variant. The arithmetic is that of
/// `T`: exact for [`crate::Rational`], floating point for `f64`.
///
/// Pivots follow Dantzig's rule with ties broken by the lowest row index,
/// switching to Bland's rule after a run of degenerate pivots.
pub fn solve_lp<T: Scalar>(lp: &LinearProgram<T>, method: LpMethod) -> Result<OptResult<T>> {
    lp.validate()?;
    let n = lp.num_vars();
    let rows = inequality_form(n, &lp.constraints, &lp.upper);
    let cap = iteration_cap(n, rows.len());
    let dual_ok = lp.objective.iter().all(|c| *c >= T::zero());
    if method == LpMethod::Dual && dual_ok {
        let mut v =
            Vertex::new(&rows, &lp.objective, (0..n).collect()).expect("identity working set");
        return match dual_simplex(&mut v, cap) {
            Outcome::Optimal => Ok(finish(lp, &v, v.pivots)),
            Outcome::Infeasible(cert) => Ok(infeasible(
                v.x.clone(),
                v.pivots,
                certificate(&rows, cert),
                lp,
            )),
            Outcome::Unbounded | Outcome::Stalled => Err(stalled(lp, "dual phase")),
        };
    }
    solve_primal(lp, &rows, cap)
}

fn solve_primal<T: Scalar>(
    lp: &LinearProgram<T>,
    rows: &[Ineq<T>],
    cap: usize,
) -> Result<OptResult<T>> {
    let n = lp.num_vars();
    let m = rows.len();
    let zero = vec![T::zero(); n];
    let worst = (n..m)
        .filter_map(|i| violation(&rows[i], &rows[i].eval(&zero)).map(|v| (i, v)))
        .fold(None, |best: Option<(usize, T)>, (i, v)| match best {
            Some((_, ref b)) if *b >= v => best,
            _ => Some((i, v)),
        });
    let mut phase1_pivots = 0;
    let work = match worst {
        None => (0..n).collect(),
        Some((start, _)) => {
            // one artificial variable `s` relaxes every general row; the start
            // vertex sets x = 0 and s to the largest violation
            let s = n;
            let mut p1: Vec<Ineq<T>> = rows.to_vec();
            for r in &mut p1[n..] {
                r.terms.push((s, T::one()));
            }
            p1.push(Ineq {
                terms: vec![(s, T::one())],
                rhs: T::zero(),
                origin: RowRef::Lower(s),
            });
            let mut c1 = vec![T::zero(); n + 1];
            c1[s] = T::one();
            let work: Vec<usize> = (0..n).chain([start]).collect();
            let mut v = Vertex::new(&p1, &c1, work).expect("phase one start is nonsingular");
            match primal_simplex(&mut v, cap) {
                Outcome::Optimal => {}
                _ => return Err(stalled(lp, "phase one")),
            }
            phase1_pivots = v.pivots;
            let scale = rows
                .iter()
                .fold(T::zero(), |a, r| T::max_of(a, r.rhs.abs_val()));
            if v.x[s] > feasibility_slack(&scale) {
                let lambda = v.lambdas();
                let pairs = (0..=n)
                    .filter(|&k| v.work[k] < m && lambda[k] > T::zero())
                    .map(|k| (v.work[k], lambda[k].clone()))
                    .collect();
                let x = v.x[..n].to_vec();
                return Ok(infeasible(x, v.pivots, certificate(rows, pairs), lp));
            }
            if v.slot_of[m].is_none() {
                let alpha = v.alpha(m);
                let k = (0..=n)
                    .max_by(|&a, &b| {
                        alpha[a]
                            .abs_val()
                            .partial_cmp(&alpha[b].abs_val())
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
                    .expect("nonempty working set");
                v.replace(k, m, &alpha);
            }
            v.work.into_iter().filter(|&r| r != m).collect()
        }
    };
    let Some(mut v) = Vertex::new(rows, &lp.objective, work) else {
        return Err(Error::Internal {
            msg: "singular working set after phase one".into(),
            dump: lp.dump(),
        });
    };
    match primal_simplex(&mut v, cap) {
        Outcome::Optimal => Ok(finish(lp, &v, phase1_pivots + v.pivots)),
        Outcome::Unbounded => Ok(OptResult {
            status: Status::Unbounded,
            value: lp.objective_at(&v.x),
            argmin: v.x.clone(),
            iterations: phase1_pivots + v.pivots,
            mode: T::MODE,
            multipliers: Vec::new(),
            dual_value: None,
            kkt: None,
        }),
        _ => Err(stalled(lp, "phase two")),
    }
}

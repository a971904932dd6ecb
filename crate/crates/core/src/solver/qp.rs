//! Goldfarb-Idnani dual active-set method for `min Σ w x²` under `≥` rows.
//!
//! The unconstrained minimizer `x = 0` is the starting point. Each major
//! step picks the most violated row and moves along the direction that
//! keeps the active rows satisfied, dropping active rows whose multiplier
//! would turn negative, until the new row becomes active.

use super::linalg;
use super::{
    feasibility_slack, inequality_form, Ineq, Kkt, OptResult, QuadraticProgram, RowRef, Status,
};
use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

fn dot_rows<T: Scalar>(a: &Ineq<T>, b: &Ineq<T>, d: &[T]) -> T {
    let mut s = T::zero();
    for (j, ca) in &a.terms {
        for (k, cb) in &b.terms {
            if j == k {
                s += &(ca.clone() * cb * &d[*j]);
            }
        }
    }
    s
}

fn most_violated<T: Scalar>(rows: &[Ineq<T>], active: &[usize], x: &[T]) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, row) in rows.iter().enumerate() {
        if active.contains(&i) {
            continue;
        }
        let gx = row.eval(x);
        let scale = T::max_of(gx.abs_val(), row.rhs.abs_val());
        let v = row.rhs.clone() - gx;
        if v > feasibility_slack(&scale) && best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Minimizes `Σ w_j x_j²` subject to the program's rows, `x ≥ 0` and the
/// upper bounds. `value` is the optimal objective without a square root.
pub fn solve_qp<T: Scalar>(qp: &QuadraticProgram<T>) -> Result<OptResult<T>> {
    qp.validate()?;
    let n = qp.num_vars();
    let rows = inequality_form(n, &qp.constraints, &qp.upper);
    let two = T::from_int(2);
    let d: Vec<T> = qp
        .weights
        .iter()
        .map(|w| T::one() / &(two.clone() * w))
        .collect();
    let cap = 1000 + 50 * (n + rows.len());
    let internal = |msg: &str| Error::Internal {
        msg: msg.into(),
        dump: qp.dump(),
    };

    let mut x = vec![T::zero(); n];
    let mut active: Vec<usize> = Vec::new();
    let mut u: Vec<T> = Vec::new();
    let mut iterations = 0;

    while let Some(p) = most_violated(&rows, &active, &x) {
        let np = &rows[p];
        let mut u_p = T::zero();
        loop {
            iterations += 1;
            if iterations > cap {
                return Err(internal("active-set iteration limit exceeded"));
            }
            let q = active.len();
            let mut m = vec![T::zero(); q * q];
            for a in 0..q {
                for b in a..q {
                    let v = dot_rows(&rows[active[a]], &rows[active[b]], &d);
                    m[a * q + b] = v.clone();
                    m[b * q + a] = v;
                }
            }
            let rhs: Vec<T> = active.iter().map(|&i| dot_rows(&rows[i], np, &d)).collect();
            let r =
                linalg::solve(&m, &rhs).ok_or_else(|| internal("active rows became dependent"))?;
            // z = D n_p - D N r
            let mut z = vec![T::zero(); n];
            for (j, c) in &np.terms {
                z[*j] += &c.mul_coef(&d[*j]);
            }
            for (a, &i) in active.iter().enumerate() {
                for (j, c) in &rows[i].terms {
                    z[*j] -= r[a].clone() * c * &d[*j];
                }
            }
            let zn = np.eval(&z);
            let zscale = np
                .terms
                .iter()
                .fold(T::zero(), |s, (j, _)| T::max_of(s, d[*j].clone()));
            let z_zero = zn <= T::pivot_tolerance() * &zscale;

            let mut partial: Option<(usize, T)> = None;
            for a in 0..q {
                if r[a] > T::pivot_tolerance() {
                    let t = T::max_of(u[a].clone(), T::zero()) / &r[a];
                    let better = match &partial {
                        None => true,
                        Some((aa, best)) => t < *best || (t == *best && active[a] < active[*aa]),
                    };
                    if better {
                        partial = Some((a, t));
                    }
                }
            }
            let full = (!z_zero).then(|| T::max_of(np.rhs.clone() - np.eval(&x), T::zero()) / &zn);

            match (full, partial) {
                (None, None) => {
                    let mut multipliers = vec![(np.origin, T::one())];
                    for (a, &i) in active.iter().enumerate() {
                        if r[a] < T::zero() {
                            multipliers.push((rows[i].origin, -r[a].clone()));
                        }
                    }
                    multipliers.sort_by_key(|(o, _)| *o);
                    return Ok(OptResult {
                        status: Status::Infeasible,
                        value: qp.objective_at(&x),
                        argmin: x,
                        iterations,
                        mode: T::MODE,
                        multipliers,
                        dual_value: None,
                        kkt: None,
                    });
                }
                (Some(t), partial) if partial.as_ref().is_none_or(|(_, t1)| t <= *t1) => {
                    for (xj, zj) in x.iter_mut().zip(&z) {
                        *xj += &(t.clone() * zj);
                    }
                    for (ua, ra) in u.iter_mut().zip(&r) {
                        *ua -= t.clone() * ra;
                    }
                    u_p += &t;
                    active.push(p);
                    u.push(u_p);
                    break;
                }
                (full, Some((l, t))) => {
                    if full.is_some() {
                        for (xj, zj) in x.iter_mut().zip(&z) {
                            *xj += &(t.clone() * zj);
                        }
                    }
                    for (ua, ra) in u.iter_mut().zip(&r) {
                        *ua -= t.clone() * ra;
                    }
                    u_p += &t;
                    active.remove(l);
                    u.remove(l);
                }
                (Some(_), None) => unreachable!("guard covers a full step without a partial one"),
            }
        }
    }

    if T::MODE == Mode::Float {
        for xj in &mut x {
            if *xj < T::zero() {
                *xj = T::zero();
            }
        }
    }
    let kkt = kkt_residuals(&rows, &qp.weights, &x, &active, &u);
    let mut multipliers: Vec<(RowRef, T)> = active
        .iter()
        .zip(&u)
        .map(|(&i, ui)| (rows[i].origin, T::max_of(ui.clone(), T::zero())))
        .collect();
    multipliers.sort_by_key(|(o, _)| *o);
    Ok(OptResult {
        status: Status::Optimal,
        value: qp.objective_at(&x),
        argmin: x,
        iterations,
        mode: T::MODE,
        multipliers,
        dual_value: None,
        kkt: Some(kkt),
    })
}

fn kkt_residuals<T: Scalar>(
    rows: &[Ineq<T>],
    w: &[T],
    x: &[T],
    active: &[usize],
    u: &[T],
) -> Kkt<T> {
    let two = T::from_int(2);
    let mut grad: Vec<T> = w.iter().zip(x).map(|(w, x)| two.clone() * w * x).collect();
    for (&i, ui) in active.iter().zip(u) {
        for (j, c) in &rows[i].terms {
            grad[*j] -= ui.clone() * c;
        }
    }
    let stationarity = grad
        .iter()
        .fold(T::zero(), |m, g| T::max_of(m, g.abs_val()));
    let primal = rows
        .iter()
        .fold(T::zero(), |m, r| T::max_of(m, r.rhs.clone() - r.eval(x)));
    let dual = u.iter().fold(T::zero(), |m, ui| T::max_of(m, -ui.clone()));
    let complementarity = active.iter().zip(u).fold(T::zero(), |m, (&i, ui)| {
        T::max_of(
            m,
            (ui.clone() * &(rows[i].eval(x) - &rows[i].rhs)).abs_val(),
        )
    });
    Kkt {
        stationarity,
        primal,
        dual,
        complementarity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn projection_onto_a_halfplane() {
        let mut qp = QuadraticProgram::new(vec![1.0, 1.0]);
        qp.ge(&[(0, 1), (1, 1)], 1.0);
        let r = solve_qp(&qp).unwrap();
        assert_eq!(r.argmin, vec![0.5, 0.5]);
        assert_eq!(r.value, 0.5);
        assert!(r.kkt_residual() < 1e-12);
    }

    #[test]
    fn quartet_program_is_exact() {
        let q = |v: i64| Rational::from_int(v);
        let mut qp = QuadraticProgram::new(vec![q(1); 4]);
        for (a, b) in [(0, 1), (2, 3), (0, 2), (1, 3)] {
            qp.ge(&[(a, 1), (b, 1)], q(1));
            qp.le(&[(a, 1), (b, -1)], q(5)).le(&[(a, -1), (b, 1)], q(5));
        }
        let r = solve_qp(&qp).unwrap();
        // the optimum spreads the matched distance evenly
        assert_eq!(r.argmin, vec![q(1) / q(2); 4]);
        assert_eq!(r.value, q(1));
        assert_eq!(r.kkt_residual(), q(0));
    }

    #[test]
    fn multipliers_drop_when_needed() {
        // the second row makes the first one's multiplier vanish
        let mut qp = QuadraticProgram::new(vec![1.0, 1.0, 1.0]);
        qp.ge(&[(0, 1), (1, 1)], 1.0)
            .ge(&[(0, 1)], 2.0)
            .ge(&[(1, 1), (2, 1)], 1.0);
        let r = solve_qp(&qp).unwrap();
        assert!((r.argmin[0] - 2.0).abs() < 1e-12);
        assert!((r.argmin[1] - 0.5).abs() < 1e-12);
        assert!((r.value - 4.5).abs() < 1e-12);
        assert!(r.kkt_residual() < 1e-12);
    }

    #[test]
    fn weights_and_upper_bounds() {
        let mut qp = QuadraticProgram::new(vec![1.0, 3.0]);
        qp.ge(&[(0, 1), (1, 1)], 4.0);
        let r = solve_qp(&qp).unwrap();
        assert!((r.argmin[0] - 3.0).abs() < 1e-12 && (r.argmin[1] - 1.0).abs() < 1e-12);
        qp.upper[0] = Some(2.0);
        let r = solve_qp(&qp).unwrap();
        assert!((r.argmin[0] - 2.0).abs() < 1e-12 && (r.argmin[1] - 2.0).abs() < 1e-12);
        assert!(r.kkt_residual() < 1e-12);
    }

    #[test]
    fn infeasibility_is_certified() {
        let mut qp = QuadraticProgram::new(vec![1.0, 1.0]);
        qp.ge(&[(0, 1), (1, 1)], 3.0)
            .le(&[(0, 1)], 1.0)
            .le(&[(1, 1)], 1.0);
        let r = solve_qp(&qp).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        assert_eq!(r.support().len(), 3);
    }
}

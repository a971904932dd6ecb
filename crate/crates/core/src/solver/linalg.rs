//! Small dense linear algebra over [`Scalar`], row-major storage.

use crate::scalar::Scalar;

/// Picks the pivot row for column `col` among rows `col..n`: the largest
/// magnitude in float mode, the first nonzero entry in exact mode.
fn pivot_row<T: Scalar>(a: &[T], n: usize, cols: usize, col: usize) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for r in col..n {
        let v = a[r * cols + col].abs_val();
        if v.is_zero() {
            continue;
        }
        match T::MODE {
            crate::scalar::Mode::Rational => return Some(r),
            crate::scalar::Mode::Float => {
                if best.as_ref().is_none_or(|(_, b)| v > *b) {
                    best = Some((r, v));
                }
            }
        }
    }
    best.and_then(|(r, v)| (v > T::pivot_tolerance()).then_some(r))
}

/// Gauss-Jordan elimination on an `n × cols` augmented matrix whose first
/// `n` columns form the square system. Returns `false` when singular.
fn eliminate<T: Scalar>(a: &mut [T], n: usize, cols: usize) -> bool {
    for col in 0..n {
        let Some(p) = pivot_row(a, n, cols, col) else {
            return false;
        };
        if p != col {
            for c in 0..cols {
                a.swap(p * cols + c, col * cols + c);
            }
        }
        let inv = T::one() / &a[col * cols + col];
        for c in 0..cols {
            a[col * cols + c] = a[col * cols + c].clone() * &inv;
        }
        for r in 0..n {
            if r == col || a[r * cols + col].is_zero() {
                continue;
            }
            let f = a[r * cols + col].clone();
            for c in 0..cols {
                if !a[col * cols + c].is_zero() {
                    let t = f.clone() * &a[col * cols + c];
                    a[r * cols + c] -= t;
                }
            }
        }
    }
    true
}

/// Inverse of the `n × n` matrix `a`, or `None` if it is singular.
pub fn invert<T: Scalar>(a: &[T], n: usize) -> Option<Vec<T>> {
    let cols = 2 * n;
    let mut aug = vec![T::zero(); n * cols];
    for r in 0..n {
        for c in 0..n {
            aug[r * cols + c] = a[r * n + c].clone();
        }
        aug[r * cols + n + r] = T::one();
    }
    if !eliminate(&mut aug, n, cols) {
        return None;
    }
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        out.extend_from_slice(&aug[r * cols + n..(r + 1) * cols]);
    }
    Some(out)
}

/// Solves `a x = b` for square `a`.
pub fn solve<T: Scalar>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    let cols = n + 1;
    let mut aug = vec![T::zero(); n * cols];
    for r in 0..n {
        for c in 0..n {
            aug[r * cols + c] = a[r * n + c].clone();
        }
        aug[r * cols + n] = b[r].clone();
    }
    if !eliminate(&mut aug, n, cols) {
        return None;
    }
    Some((0..n).map(|r| aug[r * cols + n].clone()).collect())
}

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treegromov::extension::{shortest_paths, WeightedGraph};
use treegromov::{
    random_binary_tree, tree_to_semimetric, PhyloTree, Rational, Scalar, Semimetric, TaxonSet,
    WeightModel,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Zero-padded labels, so canonical order equals creation order.
pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i:03}")).collect()
}

pub fn taxa(n: usize) -> TaxonSet {
    TaxonSet::new(labels(n)).unwrap()
}

/// Shortest-path closure of a complete graph with random integer weights in
/// `lo..=hi`. With `lo = 0` distinct points may coincide.
pub fn random_int_metric<T: Scalar>(
    rng: &mut ChaCha8Rng,
    n: usize,
    lo: i64,
    hi: i64,
) -> Semimetric<T> {
    let mut g = WeightedGraph::<T>::new(labels(n)).unwrap();
    for i in 0..n {
        for j in i + 1..n {
            g.add_edge(i, j, T::from_int(rng.random_range(lo..=hi)))
                .unwrap();
        }
    }
    let sp = shortest_paths(&g).unwrap();
    Semimetric::from_fn(taxa(n), |i, j| sp[i][j].clone()).unwrap()
}

/// Random metric with float weights in `(0, scale]`.
pub fn random_float_metric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Semimetric<f64> {
    let mut g = WeightedGraph::<f64>::new(labels(n)).unwrap();
    for i in 0..n {
        for j in i + 1..n {
            g.add_edge(i, j, scale * (1.0 - rng.random::<f64>()))
                .unwrap();
        }
    }
    let sp = shortest_paths(&g).unwrap();
    Semimetric::from_fn(taxa(n), |i, j| sp[i][j]).unwrap()
}

/// Rounds a float weight to a multiple of `1/1000`, bounded away from 0.
pub fn grid(w: &f64) -> Rational {
    let k = ((w * 1000.0).round() as i64).max(1);
    Rational::new(BigInt::from(k), BigInt::from(1000))
}

pub fn rational_tree(n: usize, seed: u64, model: WeightModel) -> PhyloTree<Rational> {
    random_binary_tree::<f64>(n, seed, model)
        .unwrap()
        .map_weights(grid)
}

pub fn tree_pair<T: Scalar>(
    n: usize,
    seed: u64,
    model: WeightModel,
) -> (Semimetric<T>, Semimetric<T>) {
    let a = random_binary_tree::<T>(n, seed, model).unwrap();
    let b = random_binary_tree::<T>(n, seed ^ 0x9e37_79b9_7f4a_7c15, model).unwrap();
    (tree_to_semimetric(&a), tree_to_semimetric(&b))
}

pub fn to_rational(x: &Ratio<i128>) -> Rational {
    Rational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

pub fn rat_of_int_metric(m: &Semimetric<Rational>) -> Vec<Vec<i64>> {
    let n = m.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = m.get(i, j);
                    assert!(v.is_integer());
                    v.to_integer().try_into().unwrap()
                })
                .collect()
        })
        .collect()
}

/// A row `g·x ≥ h` with small integer data.
#[derive(Debug, Clone)]
pub struct Row {
    pub g: Vec<i64>,
    pub h: i64,
}

/// Rows of the distance program in inequality form, nonnegativity included.
pub fn program_rows(
    rho: &[Vec<i64>],
    rho_prime: &[Vec<i64>],
    full: bool,
    upper: Option<i64>,
) -> Vec<Row> {
    let n = rho.len();
    let unit = |pairs: &[(usize, i64)]| {
        let mut g = vec![0; n];
        for &(k, v) in pairs {
            g[k] = v;
        }
        g
    };
    let mut rows: Vec<Row> = (0..n)
        .map(|j| Row {
            g: unit(&[(j, 1)]),
            h: 0,
        })
        .collect();
    for x in 0..n {
        for y in x + 1..n {
            let gap = (rho[x][y] - rho_prime[x][y]).abs();
            // a zero gap only restates nonnegativity
            if gap > 0 {
                rows.push(Row {
                    g: unit(&[(x, 1), (y, 1)]),
                    h: gap,
                });
            }
            if full {
                let total = rho[x][y] + rho_prime[x][y];
                rows.push(Row {
                    g: unit(&[(x, -1), (y, 1)]),
                    h: -total,
                });
                rows.push(Row {
                    g: unit(&[(x, 1), (y, -1)]),
                    h: -total,
                });
            }
        }
    }
    if let Some(u) = upper {
        for j in 0..n {
            rows.push(Row {
                g: unit(&[(j, -1)]),
                h: -u,
            });
        }
    }
    rows
}

/// Solves `a·x = b` by fraction-free elimination. Returns `(d, num)` with
/// `x = num / d` and `d = ±det a`; `None` when singular.
pub fn bareiss_solve(a: &[Vec<i128>], b: &[i128]) -> Option<(i128, Vec<i128>)> {
    let k = a.len();
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| r.iter().copied().chain([bi]).collect())
        .collect();
    let mut prev = 1i128;
    for p in 0..k {
        if m[p][p] == 0 {
            let swap = (p + 1..k).find(|&r| m[r][p] != 0)?;
            m.swap(p, swap);
        }
        for r in p + 1..k {
            for c in p + 1..=k {
                m[r][c] = (m[r][c] * m[p][p] - m[r][p] * m[p][c]) / prev;
            }
            m[r][p] = 0;
        }
        prev = m[p][p];
    }
    let det = m[k - 1][k - 1];
    // back substitution scaled by det keeps everything integral
    let mut num = vec![0i128; k];
    for r in (0..k).rev() {
        let mut acc = m[r][k] * det;
        for c in r + 1..k {
            acc -= m[r][c] * num[c];
        }
        debug_assert_eq!(acc % m[r][r], 0);
        num[r] = acc / m[r][r];
    }
    Some((det, num))
}

fn combinations(m: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > m {
        return;
    }
    loop {
        visit(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn feasible(rows: &[Row], num: &[i128], det: i128) -> bool {
    // g·(num/det) ≥ h  ⇔  sign(det)·(g·num − h·det) ≥ 0
    rows.iter().all(|r| {
        let lhs: i128 = r.g.iter().zip(num).map(|(&g, &x)| g as i128 * x).sum();
        (lhs - r.h as i128 * det) * det.signum() >= 0
    })
}

/// Minimum of `c·x` over `{x : rows}` by enumerating every basis of `n`
/// rows. The feasible set must be pointed (it is, nonnegativity is present)
/// and the minimum finite.
pub fn lp_vertex_oracle(
    n: usize,
    c: &[i64],
    rows: &[Row],
) -> Option<(Ratio<i128>, Vec<Ratio<i128>>)> {
    let mut best: Option<(Ratio<i128>, Vec<Ratio<i128>>)> = None;
    combinations(rows.len(), n, |basis| {
        let a: Vec<Vec<i128>> = basis
            .iter()
            .map(|&r| rows[r].g.iter().map(|&v| v as i128).collect())
            .collect();
        let b: Vec<i128> = basis.iter().map(|&r| rows[r].h as i128).collect();
        let Some((det, num)) = bareiss_solve(&a, &b) else {
            return;
        };
        if det == 0 || !feasible(rows, &num, det) {
            return;
        }
        let val: i128 = c.iter().zip(&num).map(|(&c, &x)| c as i128 * x).sum();
        let val = Ratio::new(val, det);
        if best.as_ref().is_none_or(|(v, _)| val < *v) {
            best = Some((val, num.iter().map(|&x| Ratio::new(x, det)).collect()));
        }
    });
    best
}

/// Minimum of `Σ w_j x_j²` over `{x : rows}` by enumerating candidate active
/// sets. For each set `S` the equality-constrained minimizer is
/// `x = D G_Sᵀ μ` with `G_S D G_Sᵀ μ = h_S`, `D = diag(1/w)` (scaled to be
/// integral); it is the optimum iff `μ ≥ 0` and `x` is feasible.
pub fn qp_face_oracle(n: usize, w: &[i64], rows: &[Row]) -> (Ratio<i128>, Vec<Ratio<i128>>) {
    let l: i64 = w.iter().fold(1, |acc, &x| lcm(acc, x));
    let dscale: Vec<i128> = w.iter().map(|&x| (l / x) as i128).collect();
    let value = |x: &[Ratio<i128>]| -> Ratio<i128> {
        x.iter().zip(w).map(|(x, &w)| x * x * w as i128).sum()
    };
    // empty active set: x = 0
    let zero = vec![0i128; n];
    if feasible(rows, &zero, 1) {
        return (Ratio::from_integer(0), vec![Ratio::from_integer(0); n]);
    }
    for k in 1..=n {
        let mut found = None;
        combinations(rows.len(), k, |s| {
            if found.is_some() {
                return;
            }
            let m: Vec<Vec<i128>> = s
                .iter()
                .map(|&p| {
                    s.iter()
                        .map(|&q| {
                            (0..n)
                                .map(|j| rows[p].g[j] as i128 * dscale[j] * rows[q].g[j] as i128)
                                .sum()
                        })
                        .collect()
                })
                .collect();
            let h: Vec<i128> = s.iter().map(|&p| rows[p].h as i128).collect();
            let Some((det, mu)) = bareiss_solve(&m, &h) else {
                return;
            };
            if det == 0 || mu.iter().any(|&v| v * det.signum() < 0) {
                return;
            }
            let x: Vec<i128> = (0..n)
                .map(|j| {
                    dscale[j]
                        * s.iter()
                            .zip(&mu)
                            .map(|(&p, &m)| rows[p].g[j] as i128 * m)
                            .sum::<i128>()
                })
                .collect();
            if feasible(rows, &x, det) {
                found = Some(x.iter().map(|&v| Ratio::new(v, det)).collect::<Vec<_>>());
            }
        });
        if let Some(x) = found {
            return (value(&x), x);
        }
    }
    panic!("no KKT point among active sets of size <= {n}");
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())),
        "{what}: {a} vs {b}"
    );
}

//! Seeded experiments over random trees, emitted as CSV tables.

use std::time::Instant;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use treegromov::{
    gromov_distance, lemma_caterpillar_pair, pd_distance, random_binary_tree, random_caterpillar,
    robinson_foulds, tree_to_semimetric, GromovSpec, Norm, PhyloTree, Scalar, Semimetric, TaxonSet,
    Variant, WeightModel,
};

use crate::report::{Selection, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Compare,
    Caterpillar,
    Parallelogram,
    Timing,
    Equality,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub kind: Kind,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub weights: WeightModel,
    pub select: Selection,
    pub blocks: [usize; 3],
    pub reps: usize,
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(crate::Usage("--trials must be at least 1".into()).into());
        }
        if self.n < 4 {
            return Err(crate::Usage(format!("--n must be at least 4, got {}", self.n)).into());
        }
        if self.blocks.contains(&0) {
            return Err(crate::Usage("--blocks sizes must be positive".into()).into());
        }
        Ok(())
    }
}

/// Tree seeds of trial `t`: two independent streams per trial.
fn trial_seeds(seed: u64, t: usize) -> (u64, u64) {
    let base = seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(2 * t as u64);
    (base, base.wrapping_add(1))
}

fn tree_pair<T: Scalar>(cfg: &Config, t: usize) -> Result<(PhyloTree<T>, PhyloTree<T>)> {
    let (s1, s2) = trial_seeds(cfg.seed, t);
    Ok((
        random_binary_tree(cfg.n, s1, cfg.weights)?,
        random_binary_tree(cfg.n, s2, cfg.weights)?,
    ))
}

/// Runs `f` for every trial in parallel; rows come back in trial order.
fn per_trial<F>(trials: usize, f: F) -> Result<Vec<Vec<String>>>
where
    F: Fn(usize) -> Result<Vec<String>> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

pub fn run<T: Scalar>(cfg: &Config) -> Result<Table> {
    cfg.validate()?;
    match cfg.kind {
        Kind::Compare => compare::<T>(cfg),
        Kind::Caterpillar => caterpillar::<T>(cfg),
        Kind::Parallelogram => parallelogram::<T>(cfg),
        Kind::Timing => timing::<T>(cfg),
        Kind::Equality => equality::<T>(cfg),
    }
}

fn compare<T: Scalar>(cfg: &Config) -> Result<Table> {
    let mut table = Table::new(["trial"]);
    table.header.extend(cfg.select.header(true));
    table.rows = per_trial(cfg.trials, |t| {
        let (a, b) = tree_pair::<T>(cfg, t)?;
        let mut row = vec![t.to_string()];
        row.extend(cfg.select.row(
            &tree_to_semimetric(&a),
            &tree_to_semimetric(&b),
            Some((&a, &b)),
        )?);
        Ok(row)
    })?;
    Ok(table)
}

/// Row 0 is the extremal pair with `m = max(1, ⌊(n-1)/4⌋)`; later rows are
/// random unit-length caterpillars on `n` taxa.
fn caterpillar<T: Scalar>(cfg: &Config) -> Result<Table> {
    let m = ((cfg.n - 1) / 4).max(1);
    let mf = m as f64;
    let bound1 = (4 * m * m - 4 * m + 2).to_string();
    let bound2 = (16.0 * mf.powi(3) / 3.0 - 8.0 * mf * mf + 32.0 * mf / 3.0 - 6.0)
        .sqrt()
        .to_string();
    let mut table = Table::new(["trial", "pair", "n"]);
    table.header.extend(cfg.select.header(true));
    table
        .header
        .extend(["Dt1_bound".to_string(), "Dt2_bound".to_string()]);
    table.rows = per_trial(cfg.trials, |t| {
        let (kind, (a, b)) = if t == 0 {
            ("lemma", lemma_caterpillar_pair::<T>(m)?)
        } else {
            let (s1, s2) = trial_seeds(cfg.seed, t);
            (
                "random",
                (
                    random_caterpillar(cfg.n, s1)?,
                    random_caterpillar(cfg.n, s2)?,
                ),
            )
        };
        let mut row = vec![t.to_string(), kind.to_string(), a.taxa().len().to_string()];
        row.extend(cfg.select.row(
            &tree_to_semimetric(&a),
            &tree_to_semimetric(&b),
            Some((&a, &b)),
        )?);
        row.extend([bound1.clone(), bound2.clone()]);
        Ok(row)
    })?;
    Ok(table)
}

/// Path metric of the tree with blocks `A | B | C` joined by two interior
/// edges of lengths `l` (between A and B) and `l'` (between B and C);
/// pendant edges have length zero.
fn block_metric<T: Scalar>(
    taxa: &TaxonSet,
    blocks: [usize; 3],
    l: &T,
    lp: &T,
) -> Result<Semimetric<T>> {
    let block = |i: usize| {
        if i < blocks[0] {
            0
        } else if i < blocks[0] + blocks[1] {
            1
        } else {
            2
        }
    };
    Ok(Semimetric::from_fn(taxa.clone(), |i, j| {
        match (block(i).min(block(j)), block(i).max(block(j))) {
            (0, 1) => l.clone(),
            (1, 2) => lp.clone(),
            (0, 2) => l.clone() + lp,
            _ => T::zero(),
        }
    })?)
}

/// Squared `D̃₂` values around the zero-length tree `0`:
/// `lhs = 2(f(u) + f(v))` and `rhs = f(u+v) + f(u-v)` with
/// `f(w) = D̃₂(0, τ^w)²`. The `u-v` term is `D̃₂(τ^v, τ^u)²`, which sees the
/// same differences. The two agree when the local geometry is Euclidean.
fn parallelogram<T: Scalar>(cfg: &Config) -> Result<Table> {
    let total: usize = cfg.blocks.iter().sum();
    let taxa = TaxonSet::new((0..total).map(|i| format!("x{}", i + 1)))?;
    let zero = Semimetric::zero(taxa.clone());
    let spec = GromovSpec::new(Norm::L2).lower();
    let sq = |a: &Semimetric<T>, b: &Semimetric<T>| {
        gromov_distance(a, b, &spec).map(|r| r.raw().clone())
    };
    let mut table = Table::new(["trial", "l1", "l1p", "l2", "l2p", "lhs", "rhs"]);
    table.rows = per_trial(cfg.trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seeds(cfg.seed, t).0);
        // lengths on a grid of 1/1000 in (0, 10], exact in both modes
        let mut draw = || T::from_int(rng.random_range(1..=10_000)) / T::from_int(1000);
        let (l1, l1p, l2, l2p) = (draw(), draw(), draw(), draw());
        let u = block_metric(&taxa, cfg.blocks, &l1, &l1p)?;
        let v = block_metric(&taxa, cfg.blocks, &l2, &l2p)?;
        let sum = block_metric(
            &taxa,
            cfg.blocks,
            &(l1.clone() + &l2),
            &(l1p.clone() + &l2p),
        )?;
        let half = sq(&zero, &u)? + sq(&zero, &v)?;
        let lhs = half.clone() + &half;
        let rhs = sq(&zero, &sum)? + sq(&v, &u)?;
        Ok(vec![
            t.to_string(),
            l1.format(),
            l1p.format(),
            l2.format(),
            l2p.format(),
            lhs.format(),
            rhs.format(),
        ])
    })?;
    Ok(table)
}

fn median_secs(reps: usize, mut f: impl FnMut() -> Result<()>) -> Result<f64> {
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        f()?;
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    Ok(times[reps / 2])
}

/// Wall-clock medians per metric. Trials run one after another so the
/// timings do not compete for cores.
fn timing<T: Scalar>(cfg: &Config) -> Result<Table> {
    let mut header = vec!["trial".to_string(), "n".to_string()];
    for v in &cfg.select.variants {
        header.extend(
            cfg.select
                .norms
                .iter()
                .map(|n| format!("{}_s", crate::report::column(*n, *v))),
        );
    }
    header.extend(["PD_s".to_string(), "RF_s".to_string()]);
    let mut table = Table::new(header);
    for t in 0..cfg.trials {
        let (a, b) = tree_pair::<T>(cfg, t)?;
        let (ra, rb) = (tree_to_semimetric(&a), tree_to_semimetric(&b));
        let mut row = vec![t.to_string(), cfg.n.to_string()];
        for v in &cfg.select.variants {
            for n in &cfg.select.norms {
                let spec = GromovSpec::new(*n).variant(*v).bounded(cfg.select.bounded);
                let s = median_secs(cfg.reps, || {
                    gromov_distance(&ra, &rb, &spec)
                        .map(drop)
                        .map_err(Into::into)
                })?;
                row.push(format!("{s:.6e}"));
            }
        }
        let pd = median_secs(cfg.reps, || {
            for n in Norm::ALL {
                pd_distance(&ra, &rb, n)?;
            }
            Ok(())
        })?;
        let rf = median_secs(cfg.reps, || {
            robinson_foulds(&a, &b).map(drop).map_err(Into::into)
        })?;
        row.extend([format!("{pd:.6e}"), format!("{rf:.6e}")]);
        table.rows.push(row);
    }
    Ok(table)
}

/// `Dᵢ - D̃ᵢ` per trial with running maxima of the absolute differences;
/// the last row holds the maxima over the whole sample.
fn equality<T: Scalar>(cfg: &Config) -> Result<Table> {
    let diffs: Vec<(T, f64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let (a, b) = tree_pair::<T>(cfg, t)?;
            let (ra, rb) = (tree_to_semimetric(&a), tree_to_semimetric(&b));
            let d = |norm: Norm, v: Variant| {
                gromov_distance(&ra, &rb, &GromovSpec::new(norm).variant(v))
            };
            let d1 = d(Norm::L1, Variant::Full)?.raw().clone() - d(Norm::L1, Variant::Lower)?.raw();
            let d2 = d(Norm::L2, Variant::Full)?.value() - d(Norm::L2, Variant::Lower)?.value();
            Ok((d1, d2))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new([
        "trial",
        "D1_minus_Dt1",
        "D2_minus_Dt2",
        "max_abs_1",
        "max_abs_2",
    ]);
    let (mut m1, mut m2) = (T::zero(), 0.0f64);
    for (t, (d1, d2)) in diffs.into_iter().enumerate() {
        m1 = T::max_of(m1, d1.abs_val());
        m2 = m2.max(d2.abs());
        table.rows.push(vec![
            t.to_string(),
            d1.format(),
            d2.to_string(),
            m1.format(),
            m2.to_string(),
        ]);
    }
    Ok(table)
}

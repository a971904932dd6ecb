//! `treegromov`: distances between trees and semimetrics, pairwise matrices,
//! validation reports and the seeded experiments.
//!
//! Exit codes: 0 success, 2 unreadable input or bad arguments, 3 input that
//! parses but is invalid (axioms, taxon mismatch), 4 internal failure.

mod experiment;
mod input;
mod report;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use treegromov::{pairwise_matrix, GromovSpec, Norm, Rational, Scalar, Variant, WeightModel};

use report::{Selection, Table};

/// Bad arguments or unreadable input; exit code 2.
#[derive(Debug)]
pub struct Usage(pub String);

/// Input that parses but fails a check; exit code 3.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}
impl std::error::Error for Invalid {}

#[derive(Parser)]
#[command(
    name = "treegromov",
    version,
    about = "Gromov-type distances between phylogenetic trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distances between two trees (Newick) or two distance tables (CSV).
    Dist {
        /// File path or inline text.
        a: String,
        b: String,
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Appends `NAME=PATH`, a file holding one value, with `--csv`.
        #[arg(long = "extra-column", value_name = "NAME=PATH")]
        extra: Vec<String>,
    },
    /// Pairwise distance matrix of the trees in a file, one Newick per line.
    Matrix {
        trees: String,
        #[arg(long, value_enum, default_value = "1")]
        norm: NormArg,
        #[arg(long, value_enum, default_value = "full")]
        variant: VariantArg,
        #[arg(long)]
        bounded: bool,
        #[arg(long, value_enum, default_value = "float")]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded experiment over random trees, as CSV.
    Experiment {
        #[arg(value_enum)]
        kind: experiment::Kind,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "uniform01")]
        weights: WeightsArg,
        /// Block sizes `|A|,|B|,|C|` of the parallelogram tree.
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3])]
        blocks: Vec<usize>,
        /// Repetitions per timing median.
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u16).range(5..))]
        reps: u16,
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Appends `NAME=PATH`, a file with one value per trial.
        #[arg(long = "extra-column", value_name = "NAME=PATH")]
        extra: Vec<String>,
    },
    /// Checks the semimetric axioms and the four-point condition.
    Validate {
        input: String,
        #[arg(long, value_enum, default_value = "float")]
        mode: ModeArg,
    },
}

#[derive(Args, Clone)]
struct SpecArgs {
    #[arg(long, value_enum, default_value = "all")]
    norm: NormArg,
    #[arg(long, value_enum, default_value = "both")]
    variant: VariantArg,
    /// Adds the upper bounds `δx ≤ 2·D∞`; the optimum is unchanged.
    #[arg(long)]
    bounded: bool,
    #[arg(long, value_enum, default_value = "float")]
    mode: ModeArg,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// CSV instead of `key=value` text (experiments always write CSV).
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Inf,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Full,
    Lower,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Float,
    Rational,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Unit,
    Uniform01,
}

impl SpecArgs {
    fn selection(&self) -> Selection {
        let norms = match self.norm {
            NormArg::One => vec![Norm::L1],
            NormArg::Two => vec![Norm::L2],
            NormArg::Inf => vec![Norm::Sup],
            NormArg::All => Norm::ALL.to_vec(),
        };
        let variants = match self.variant {
            VariantArg::Full => vec![Variant::Full],
            VariantArg::Lower => vec![Variant::Lower],
            VariantArg::Both => vec![Variant::Full, Variant::Lower],
        };
        Selection {
            norms,
            variants,
            bounded: self.bounded,
        }
    }
}

fn dist<T: Scalar>(
    a: &str,
    b: &str,
    select: &Selection,
    out: &OutArgs,
    extra: &[String],
) -> Result<()> {
    let (ia, ib) = (input::load::<T>(a)?, input::load::<T>(b)?);
    let (ma, mb) = (ia.metric(), ib.metric());
    if ma.taxa() != mb.taxa() {
        return Err(treegromov::Error::TaxonMismatch.into());
    }
    let trees = ia.tree().zip(ib.tree());
    let mut table = Table::new(select.header(trees.is_some()));
    table.rows.push(select.row(&ma, &mb, trees)?);
    for spec in extra {
        let (name, values) = input::extra_column(spec)?;
        table.push_column(name, values)?;
    }
    let text = if out.csv {
        table.to_csv()
    } else {
        let pairs: Vec<String> = table
            .header
            .iter()
            .zip(&table.rows[0])
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("{}\n", pairs.join(" "))
    };
    report::emit(&text, &out.out)
}

fn matrix<T: Scalar>(path: &str, select: &Selection, out: &Option<PathBuf>) -> Result<()> {
    let ([norm], [variant]) = (select.norms.as_slice(), select.variants.as_slice()) else {
        return Err(Usage("matrix needs a single --norm and --variant".into()).into());
    };
    let trees = input::load_trees::<T>(path)?;
    if trees.is_empty() {
        return Err(Usage(format!("no trees in {path}")).into());
    }
    let spec = GromovSpec::new(*norm)
        .variant(*variant)
        .bounded(select.bounded);
    let m = pairwise_matrix(&trees, &spec)?;
    let mut table = Table::new(
        ["tree".to_string()]
            .into_iter()
            .chain((0..trees.len()).map(|i| i.to_string())),
    );
    for (i, row) in m.iter().enumerate() {
        table.rows.push(
            [i.to_string()]
                .into_iter()
                .chain(row.iter().map(|v| v.format()))
                .collect(),
        );
    }
    report::emit(&table.to_csv(), out)
}

fn run<T: Scalar>(command: Command) -> Result<ExitCode> {
    match command {
        Command::Dist {
            a,
            b,
            spec,
            out,
            extra,
        } => dist::<T>(&a, &b, &spec.selection(), &out, &extra)?,
        Command::Matrix {
            trees,
            norm,
            variant,
            bounded,
            out,
            ..
        } => {
            let spec = SpecArgs {
                norm,
                variant,
                bounded,
                mode: ModeArg::Float,
            };
            matrix::<T>(&trees, &spec.selection(), &out)?
        }
        Command::Experiment {
            kind,
            n,
            trials,
            seed,
            weights,
            blocks,
            reps,
            spec,
            out,
            extra,
        } => {
            let cfg = experiment::Config {
                kind,
                n,
                trials,
                seed,
                weights: match weights {
                    WeightsArg::Unit => WeightModel::Unit,
                    WeightsArg::Uniform01 => WeightModel::Uniform01,
                },
                select: spec.selection(),
                blocks: blocks.try_into().map_err(|b: Vec<usize>| {
                    Usage(format!("--blocks takes 3 sizes, got {}", b.len()))
                })?,
                reps: reps as usize,
            };
            let mut table = experiment::run::<T>(&cfg)?;
            for spec in &extra {
                let (name, values) = input::extra_column(spec)?;
                table.push_column(name, values)?;
            }
            report::emit(&table.to_csv(), &out.out)?;
        }
        Command::Validate { input, .. } => {
            let r = validate::run::<T>(&input)?;
            report::emit(&r.text, &None)?;
            if !r.axioms_ok {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use treegromov::Error as E;
    for cause in e.chain() {
        if cause.is::<Usage>() || cause.is::<std::io::Error>() {
            return 2;
        }
        if cause.is::<Invalid>() {
            return 3;
        }
        if let Some(err) = cause.downcast_ref::<E>() {
            return match err {
                E::Newick { .. }
                | E::EmptyLabel
                | E::DuplicateLabel(_)
                | E::NonPositiveLength { .. }
                | E::Shape { .. }
                | E::Input(_) => 2,
                E::Internal { .. } => 4,
                _ => 3,
            };
        }
    }
    4
}

/// Caps the global rayon pool at `TREEGROMOV_THREADS` when set.
fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("TREEGROMOV_THREADS") else {
        return Ok(());
    };
    let k: usize = v.trim().parse().ok().filter(|&k| k > 0).ok_or_else(|| {
        Usage(format!(
            "TREEGROMOV_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = match &cli.command {
        Command::Dist { spec, .. } | Command::Experiment { spec, .. } => spec.mode,
        Command::Matrix { mode, .. } | Command::Validate { mode, .. } => *mode,
    };
    let result = configure_threads().and_then(|()| match mode {
        ModeArg::Float => run::<f64>(cli.command),
        ModeArg::Rational => run::<Rational>(cli.command),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

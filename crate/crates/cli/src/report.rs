//! CSV tables and the distance columns shared by `dist` and the experiments.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use treegromov::{
    gromov_distance, pd_distance, robinson_foulds, GromovSpec, Norm, PhyloTree, Scalar, Semimetric,
    Variant,
};

pub const SCHEMA: &str = "#schema=1";

#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a column; `values` must have one entry per row.
    pub fn push_column(&mut self, name: String, values: Vec<String>) -> Result<()> {
        if values.len() != self.rows.len() {
            return Err(crate::Invalid(format!(
                "extra column `{name}` has {} values for {} rows",
                values.len(),
                self.rows.len()
            ))
            .into());
        }
        self.header.push(name);
        for (row, v) in self.rows.iter_mut().zip(values) {
            row.push(v);
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf8");
        format!("{SCHEMA}\n{body}")
    }
}

/// Writes to `out`, or stdout when absent.
pub fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Which distances to report.
#[derive(Debug, Clone)]
pub struct Selection {
    pub norms: Vec<Norm>,
    pub variants: Vec<Variant>,
    pub bounded: bool,
}

pub fn column(norm: Norm, variant: Variant) -> String {
    match variant {
        Variant::Full => format!("D{norm}"),
        Variant::Lower => format!("Dt{norm}"),
    }
}

impl Selection {
    /// Column names in the order `D*`, `Dt*`, `PD*`, then `RF` for trees.
    pub fn header(&self, trees: bool) -> Vec<String> {
        let mut h: Vec<String> = Vec::new();
        for v in &self.variants {
            h.extend(self.norms.iter().map(|n| column(*n, *v)));
        }
        h.extend(self.norms.iter().map(|n| format!("PD{n}")));
        if trees {
            h.push("RF".into());
        }
        h
    }

    /// Values matching [`Selection::header`].
    pub fn row<T: Scalar>(
        &self,
        a: &Semimetric<T>,
        b: &Semimetric<T>,
        trees: Option<(&PhyloTree<T>, &PhyloTree<T>)>,
    ) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for v in &self.variants {
            for n in &self.norms {
                let spec = GromovSpec::new(*n).variant(*v).bounded(self.bounded);
                out.push(gromov_distance(a, b, &spec)?.value.format());
            }
        }
        for n in &self.norms {
            out.push(pd_distance(a, b, *n)?.format());
        }
        if let Some((s, t)) = trees {
            out.push(robinson_foulds(s, t)?.to_string());
        }
        Ok(out)
    }
}

//! Validated finite semimetrics.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::taxa::TaxonSet;

/// A symmetric, nonnegative distance table with zero diagonal that obeys the
/// triangle inequality. Distances between distinct taxa may be zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Semimetric<T> {
    taxa: TaxonSet,
    d: Vec<T>,
}

impl<T: Scalar> Semimetric<T> {
    /// Validates `table` (rows and columns in the order of `labels`) and
    /// stores it in canonical taxon order.
    ///
    /// Float tables are checked with a relative tolerance of `1e-9`;
    /// rational tables exactly.
    pub fn from_table<S: AsRef<str>>(labels: &[S], table: &[Vec<T>]) -> Result<Self> {
        let n = labels.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::Shape {
                rows: table.len(),
                cols: table.iter().map(Vec::len).max().unwrap_or(0),
                labels: n,
            });
        }
        let taxa = TaxonSet::new(labels.iter().map(|l| l.as_ref().to_string()))?;
        // position in `labels` of each canonical index
        let src: Vec<usize> = taxa
            .labels()
            .iter()
            .map(|l| labels.iter().position(|x| x.as_ref() == l).unwrap())
            .collect();
        let mut d = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                d.push(table[src[i]][src[j]].clone());
            }
        }
        let mut m = Semimetric { taxa, d };
        m.validate()?;
        Ok(m)
    }

    /// Builds a semimetric from a canonical-order table without validation.
    pub(crate) fn from_raw(taxa: TaxonSet, d: Vec<T>) -> Self {
        debug_assert_eq!(d.len(), taxa.len() * taxa.len());
        Semimetric { taxa, d }
    }

    /// Builds from a distance function over canonical indices, validating.
    pub fn from_fn(taxa: TaxonSet, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let n = taxa.len();
        let mut d = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                d.push(if i == j { T::zero() } else { f(i, j) });
            }
        }
        let mut m = Semimetric { taxa, d };
        m.validate()?;
        Ok(m)
    }

    pub fn zero(taxa: TaxonSet) -> Self {
        let n = taxa.len();
        Semimetric {
            taxa,
            d: vec![T::zero(); n * n],
        }
    }

    fn validate(&mut self) -> Result<()> {
        let n = self.len();
        let name = |i: usize| self.taxa.label(i).to_string();
        for i in 0..n {
            if !self.d[i * n + i].is_zero() {
                return Err(Error::NonzeroDiagonal {
                    x: name(i),
                    value: self.d[i * n + i].format(),
                });
            }
            for j in 0..n {
                if self.d[i * n + j] < T::zero() {
                    return Err(Error::Negative {
                        x: name(i),
                        y: name(j),
                        value: self.d[i * n + j].format(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&self.d[i * n + j], &self.d[j * n + i]);
                if a != b {
                    if !T::approx_eq(a, b) {
                        return Err(Error::Asymmetric {
                            x: name(i),
                            y: name(j),
                            xy: a.format(),
                            yx: b.format(),
                        });
                    }
                    self.d[j * n + i] = a.clone();
                }
            }
        }
        if let Some((x, z, y)) = self.worst_triangle() {
            let direct = self.get(x, y).clone();
            let detour = self.get(x, z).clone() + self.get(z, y);
            return Err(Error::Triangle {
                x: name(x),
                z: name(z),
                y: name(y),
                direct: direct.format(),
                detour: detour.format(),
            });
        }
        Ok(())
    }

    /// The triple `(x, z, y)` maximizing `d(x,y) - d(x,z) - d(z,y)` among
    /// triples that violate the triangle inequality beyond tolerance.
    fn worst_triangle(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        let mut worst: Option<((usize, usize, usize), T)> = None;
        for x in 0..n {
            for y in x + 1..n {
                let direct = self.get(x, y);
                for z in 0..n {
                    if z == x || z == y {
                        continue;
                    }
                    let detour = self.get(x, z).clone() + self.get(z, y);
                    if !T::approx_le(direct, &detour) {
                        let excess = direct.clone() - detour;
                        if worst.as_ref().is_none_or(|(_, e)| excess > *e) {
                            worst = Some(((x, z, y), excess));
                        }
                    }
                }
            }
        }
        worst.map(|(t, _)| t)
    }

    pub fn taxa(&self) -> &TaxonSet {
        &self.taxa
    }

    pub fn len(&self) -> usize {
        self.taxa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taxa.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.d[i * self.taxa.len() + j]
    }

    pub fn get_by_label(&self, x: &str, y: &str) -> Result<&T> {
        let i = self
            .taxa
            .index_of(x)
            .ok_or_else(|| Error::UnknownTaxon(x.into()))?;
        let j = self
            .taxa
            .index_of(y)
            .ok_or_else(|| Error::UnknownTaxon(y.into()))?;
        Ok(self.get(i, j))
    }

    /// Row-major canonical table.
    pub fn as_slice(&self) -> &[T] {
        &self.d
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.d
            .chunks(self.len().max(1))
            .map(<[T]>::to_vec)
            .collect()
    }

    /// All unordered pairs `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    /// True when every off-diagonal entry is strictly positive.
    pub fn is_metric(&self) -> bool {
        self.pairs().all(|(i, j)| *self.get(i, j) > T::zero())
    }

    pub fn min_off_diagonal(&self) -> Option<T> {
        self.pairs()
            .map(|(i, j)| self.get(i, j).clone())
            .reduce(T::min_of)
    }

    pub fn max_entry(&self) -> T {
        self.d.iter().cloned().fold(T::zero(), T::max_of)
    }

    /// Entrywise sum; the result is again a semimetric.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_same_taxa(other)?;
        let d = self
            .d
            .iter()
            .zip(&other.d)
            .map(|(a, b)| a.clone() + b)
            .collect();
        Ok(Semimetric {
            taxa: self.taxa.clone(),
            d,
        })
    }

    /// Multiplies every distance by `lambda >= 0`.
    pub fn scale(&self, lambda: &T) -> Result<Self> {
        if *lambda < T::zero() {
            return Err(Error::InvalidArgument(
                "scale factor must be nonnegative".into(),
            ));
        }
        let d = self.d.iter().map(|a| a.clone() * lambda).collect();
        Ok(Semimetric {
            taxa: self.taxa.clone(),
            d,
        })
    }

    /// Sub-table on `subset`, which must only name known taxa.
    pub fn restrict(&self, subset: &TaxonSet) -> Result<Self> {
        let idx = subset
            .labels()
            .iter()
            .map(|l| {
                self.taxa
                    .index_of(l)
                    .ok_or_else(|| Error::UnknownTaxon(l.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut d = Vec::with_capacity(idx.len() * idx.len());
        for &i in &idx {
            for &j in &idx {
                d.push(self.get(i, j).clone());
            }
        }
        Ok(Semimetric {
            taxa: subset.clone(),
            d,
        })
    }

    /// Converts entries into another scalar type without revalidation.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Semimetric<U> {
        Semimetric {
            taxa: self.taxa.clone(),
            d: self.d.iter().map(f).collect(),
        }
    }

    pub(crate) fn check_same_taxa(&self, other: &Self) -> Result<()> {
        if self.taxa == other.taxa {
            Ok(())
        } else {
            Err(Error::TaxonMismatch)
        }
    }

    /// CSV with a header row of labels followed by `n` rows of `n` numbers.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(self.taxa.labels()).expect("in-memory write");
        for row in self.d.chunks(self.len().max(1)) {
            w.write_record(row.iter().map(T::format))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf8")
    }

    /// Parses the CSV layout written by [`Semimetric::to_csv`]. Lines starting
    /// with `#` are ignored. Malformed text yields [`Error::Input`]; a
    /// well-formed table that is not a semimetric yields the axiom error.
    pub fn from_csv(text: &str) -> Result<Self> {
        let (labels, table) = parse_csv_table::<T>(text)?;
        Self::from_table(&labels, &table)
    }

    /// Human-readable table, one row per line.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        let width = self
            .taxa
            .labels()
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(1);
        for i in 0..self.len() {
            let _ = write!(s, "{:>width$}", self.taxa.label(i));
            for j in 0..self.len() {
                let _ = write!(s, " {}", self.get(i, j).format());
            }
            s.push('\n');
        }
        s
    }
}

/// Reads a labeled square table from CSV without checking semimetric axioms.
pub fn parse_csv_table<T: Scalar>(text: &str) -> Result<(Vec<String>, Vec<Vec<T>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| Error::input("empty CSV"))?
        .map_err(|e| Error::input(e.to_string()))?;
    let labels: Vec<String> = header.iter().map(str::to_string).collect();
    let mut table = Vec::new();
    for (line, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::input(e.to_string()))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != labels.len() {
            return Err(Error::input(format!(
                "row {} has {} fields, expected {}",
                line + 1,
                rec.len(),
                labels.len()
            )));
        }
        let row = rec
            .iter()
            .map(|f| {
                T::parse_literal(f)
                    .ok_or_else(|| Error::input(format!("row {}: bad number `{f}`", line + 1)))
            })
            .collect::<Result<Vec<T>>>()?;
        table.push(row);
    }
    if table.len() != labels.len() {
        return Err(Error::input(format!(
            "{} data rows for {} labels",
            table.len(),
            labels.len()
        )));
    }
    Ok((labels, table))
}

use std::fmt;
use std::str::FromStr;

use crate::scalar::Scalar;

/// The `ℓ¹`, `ℓ²` and `ℓ^∞` norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Norm {
    L1,
    L2,
    Sup,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L1, Norm::L2, Norm::Sup];

    pub fn suffix(self) -> &'static str {
        match self {
            Norm::L1 => "1",
            Norm::L2 => "2",
            Norm::Sup => "inf",
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.suffix())
    }
}

impl FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "l1" => Ok(Norm::L1),
            "2" | "l2" => Ok(Norm::L2),
            "inf" | "sup" | "linf" => Ok(Norm::Sup),
            _ => Err(format!("unknown norm `{s}` (expected 1, 2 or inf)")),
        }
    }
}

/// A norm evaluated exactly up to its last step.
///
/// `raw` is the sum for `ℓ¹`, the sum of squares for `ℓ²` and the maximum
/// for `ℓ^∞`; only the `ℓ²` value needs a square root, which is taken in
/// floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct NormValue<T> {
    pub norm: Norm,
    pub raw: T,
}

impl<T: Scalar> NormValue<T> {
    /// Accumulates the norm of `values` (assumed nonnegative), weighting
    /// each entry by `weights[i]` for the `ℓ¹` and `ℓ²` norms.
    pub fn of<'a, I>(norm: Norm, values: I, weights: Option<&[T]>) -> Self
    where
        I: IntoIterator<Item = &'a T>,
    {
        let mut raw = T::zero();
        for (i, v) in values.into_iter().enumerate() {
            let w = weights.map(|w| &w[i]);
            match norm {
                Norm::L1 => raw += &mul_opt(v.clone(), w),
                Norm::L2 => raw += &mul_opt(v.clone() * v, w),
                Norm::Sup => raw = T::max_of(raw, v.clone()),
            }
        }
        NormValue { norm, raw }
    }

    /// The norm as a float.
    pub fn value(&self) -> f64 {
        match self.norm {
            Norm::L2 => self.raw.to_f64().sqrt(),
            _ => self.raw.to_f64(),
        }
    }

    /// The exact norm, when it is representable in `T` (every norm but `ℓ²`,
    /// and `ℓ²` when the sum of squares is a perfect square of a small
    /// integer).
    pub fn exact(&self) -> Option<T> {
        match self.norm {
            Norm::L2 => {
                let v = self.value();
                let r = v.round();
                (r * r == self.raw.to_f64()
                    && T::from_int(r as i64) * T::from_int(r as i64) == self.raw)
                    .then(|| T::from_int(r as i64))
            }
            _ => Some(self.raw.clone()),
        }
    }

    /// Text form: exact where possible, otherwise the float value.
    pub fn format(&self) -> String {
        match self.exact() {
            Some(v) => v.format(),
            None => format!("{}", self.value()),
        }
    }
}

fn mul_opt<T: Scalar>(v: T, w: Option<&T>) -> T {
    match w {
        Some(w) => v * w,
        None => v,
    }
}

//! Growth series, their validation, and the coset growth of subgroups of
//! free groups computed from core automata.

mod coset;
mod faithful;
mod measure;

pub use coset::{
    classify, growth_series, growth_series_explicit, growth_series_explicit_with, leading_term,
    orbit_length, GrowthVerdict, LazyCosetGraph, LeadingTerm, Node,
};
pub use faithful::{faithfulness_scan, FaithfulnessReport};
pub use measure::{boundary_measure_bounds, MeasureBounds};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Whether balls are counted in a free monoid (sphere ratio `r`) or a
/// free group (sphere ratio `2r-1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Monoid,
    Group,
}

/// Ball sizes `g(0..=N)` of some action, with the rank of the acting
/// free object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthSeries {
    pub kind: SeriesKind,
    pub rank: u32,
    pub g: Vec<BigUint>,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    base: u64,
    #[serde(default = "monoid")]
    kind: SeriesKind,
    g: Vec<String>,
}

fn monoid() -> SeriesKind {
    SeriesKind::Monoid
}

impl GrowthSeries {
    pub fn new(kind: SeriesKind, rank: u32, g: Vec<BigUint>) -> GrowthSeries {
        GrowthSeries { kind, rank, g }
    }

    pub fn from_u64(kind: SeriesKind, rank: u32, g: &[u64]) -> GrowthSeries {
        GrowthSeries::new(kind, rank, g.iter().map(|&x| BigUint::from(x)).collect())
    }

    /// `r` for monoids, `2r-1` for groups.
    pub fn base(&self) -> u64 {
        match self.kind {
            SeriesKind::Monoid => self.rank as u64,
            SeriesKind::Group => 2 * self.rank as u64 - 1,
        }
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// Sphere sizes `d(n) = g(n) - g(n-1)`, with `g(-1) = 0`.
    pub fn spheres(&self) -> Vec<BigInt> {
        let mut prev = BigInt::zero();
        self.g
            .iter()
            .map(|x| {
                let x = BigInt::from(x.clone());
                let d = &x - &prev;
                prev = x;
                d
            })
            .collect()
    }

    /// `g(n) / base^n`.
    pub fn alpha(&self, n: usize) -> Rational {
        rational::from_uint(&self.g[n]) / rational::pow(&rational::int(self.base() as i64), n as i64)
    }

    pub fn to_json(&self) -> String {
        let j = SeriesJson {
            base: self.base(),
            kind: self.kind,
            g: self.g.iter().map(|x| x.to_string()).collect(),
        };
        serde_json::to_string(&j).expect("series serializes")
    }

    pub fn from_json(s: &str) -> Result<GrowthSeries> {
        let j: SeriesJson = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        let rank = match j.kind {
            SeriesKind::Monoid => j.base,
            SeriesKind::Group if j.base % 2 == 1 => (j.base + 1) / 2,
            SeriesKind::Group => return Err(Error::Input("group series needs an odd base".into())),
        };
        let g = j
            .g
            .iter()
            .map(|s| s.parse::<BigUint>().map_err(|_| Error::Input(format!("bad count {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(GrowthSeries::new(j.kind, rank as u32, g))
    }

    /// `n,g,d,alpha_num,alpha_den` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,g,d,alpha_num,alpha_den\n");
        for (n, d) in self.spheres().iter().enumerate() {
            let a = self.alpha(n);
            out.push_str(&format!("{},{},{},{},{}\n", n, self.g[n], d, a.numer(), a.denom()));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub n: usize,
    pub rule: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violation: Option<Violation>,
}

/// Checks the sphere inequalities every ball-count series of a free
/// monoid or free group action obeys, and for groups the backward
/// propagation `g(m) (2r-1)^(n-m+1) >= (2r-2) g(n)` for `0 < m < n`.
pub fn validate_series(s: &GrowthSeries) -> ValidationReport {
    match find_violation(s) {
        None => ValidationReport { ok: true, violation: None },
        Some(v) => ValidationReport { ok: false, violation: Some(v) },
    }
}

fn find_violation(s: &GrowthSeries) -> Option<Violation> {
    let viol = |n: usize, rule: &str, detail: String| Some(Violation { n, rule: rule.into(), detail });
    if s.g.is_empty() {
        return viol(0, "nonempty", "empty series".into());
    }
    if s.g[0].is_zero() {
        return viol(0, "generators", "g(0) = 0".into());
    }
    let d = s.spheres();
    let r = BigInt::from(s.rank);
    for n in 1..d.len() {
        if d[n] < BigInt::zero() {
            return viol(n, "monotone", format!("g({n}) < g({})", n - 1));
        }
        let factor = match s.kind {
            SeriesKind::Monoid => r.clone(),
            SeriesKind::Group if n == 1 => BigInt::from(2u32) * &r,
            SeriesKind::Group => BigInt::from(2u32) * &r - BigInt::one(),
        };
        if d[n] > &factor * &d[n - 1] {
            return viol(
                n,
                "sphere",
                format!("d({n}) = {} > {} * d({}) = {}", d[n], factor, n - 1, &factor * &d[n - 1]),
            );
        }
    }
    if s.kind == SeriesKind::Group && s.rank >= 2 {
        let q = BigUint::from(2 * s.rank as u64 - 1);
        let q1 = BigUint::from(2 * s.rank as u64 - 2);
        for n in 2..s.g.len() {
            for m in 1..n {
                if &s.g[m] * num_traits::pow(q.clone(), n - m + 1) < &q1 * &s.g[n] {
                    return viol(n, "propagation", format!("g({m}) too small for g({n})"));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_series_is_caught() {
        let s = GrowthSeries::from_u64(SeriesKind::Group, 2, &[1, 5, 100]);
        let v = validate_series(&s).violation.unwrap();
        assert_eq!((v.n, v.rule.as_str()), (2, "sphere"));
        let s = GrowthSeries::from_u64(SeriesKind::Group, 2, &[1, 5, 17, 53]);
        assert!(validate_series(&s).ok);
        let s = GrowthSeries::from_u64(SeriesKind::Monoid, 2, &[1, 3, 7, 16]);
        assert_eq!(validate_series(&s).violation.unwrap().n, 3);
    }

    #[test]
    fn json_and_csv() {
        let s = GrowthSeries::from_u64(SeriesKind::Group, 2, &[1, 4, 10]);
        assert_eq!(s.to_json(), r#"{"base":3,"kind":"group","g":["1","4","10"]}"#);
        assert_eq!(GrowthSeries::from_json(&s.to_json()).unwrap(), s);
        assert_eq!(s.to_csv(), "n,g,d,alpha_num,alpha_den\n0,1,1,1,1\n1,4,3,4,3\n2,10,6,10,9\n");
        let m = GrowthSeries::from_json(r#"{"base":2,"g":["1","3"]}"#).unwrap();
        assert_eq!(m.kind, SeriesKind::Monoid);
    }
}

//! Noncommutative polynomials in `x_1..x_r`, stored on the monomial basis.

use std::collections::BTreeMap;

use num_traits::One;

use super::SparseVec;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::words::{Alphabet, MonoidWord};

pub type Poly = SparseVec<MonoidWord>;

pub fn mono_mul(a: &MonoidWord, b: &MonoidWord) -> MonoidWord {
    a.concat(b)
}

pub fn poly_times_word(p: &Poly, w: &MonoidWord) -> Poly {
    SparseVec::from_terms(p.iter().map(|(v, c)| (v.concat(w), c.clone())))
}

pub fn word_times_poly(w: &MonoidWord, p: &Poly) -> Poly {
    SparseVec::from_terms(p.iter().map(|(v, c)| (w.concat(v), c.clone())))
}

pub fn poly_mul(p: &Poly, q: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (a, x) in p.iter() {
        for (b, y) in q.iter() {
            out.add_term(a.concat(b), x * y);
        }
    }
    out
}

/// Degree of the leading monomial; `None` for zero.
pub fn degree(p: &Poly) -> Option<usize> {
    p.leading().map(|(w, _)| w.len())
}

pub fn is_homogeneous(p: &Poly) -> bool {
    let mut ks = p.keys().map(|w| w.len());
    match ks.next() {
        None => true,
        Some(d) => ks.all(|e| e == d),
    }
}

/// The multinomial components of `(s_1 v_1 + ... + s_k v_k)^q`: for every
/// exponent vector `m` with `|m| = q`, the sum of the products
/// `v_{i_1}...v_{i_q}` over the sequences with letter counts `m`.
pub fn power_components(vs: &[Poly], q: usize) -> BTreeMap<Vec<usize>, Poly> {
    let k = vs.len();
    let mut layer: BTreeMap<Vec<usize>, Poly> = BTreeMap::new();
    layer.insert(vec![0; k], Poly::unit(MonoidWord::empty()));
    for _ in 0..q {
        let mut next: BTreeMap<Vec<usize>, Poly> = BTreeMap::new();
        for (m, p) in &layer {
            for (i, v) in vs.iter().enumerate() {
                let mut m2 = m.clone();
                m2[i] += 1;
                let e = next.entry(m2).or_insert_with(Poly::zero);
                e.add_scaled(&poly_mul(p, v), &Rational::one());
            }
        }
        layer = next;
    }
    layer.retain(|_, p| !p.is_zero());
    layer
}

/// Parses `[["coef", "word"], ...]`, coefficients as `p/q` strings and
/// words in any accepted letter syntax (positive letters only).
pub fn poly_from_json(v: &serde_json::Value, r: u32) -> Result<Poly> {
    let arr = v.as_array().ok_or_else(|| Error::Input("polynomial must be an array of [coef, word] pairs".into()))?;
    let alphabet = Alphabet::new(r)?;
    let mut p = Poly::zero();
    for t in arr {
        let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::Input("term must be [coef, word]".into()))?;
        let c = match &pair[0] {
            serde_json::Value::String(s) => rational::parse(s)?,
            serde_json::Value::Number(n) => rational::parse(&n.to_string())?,
            _ => return Err(Error::Input("coefficient must be a string or integer".into())),
        };
        let w = pair[1].as_str().ok_or_else(|| Error::Input("word must be a string".into()))?;
        p.add_term(MonoidWord::parse(w, alphabet)?, c);
    }
    Ok(p)
}

pub fn poly_to_json(p: &Poly) -> serde_json::Value {
    serde_json::Value::Array(
        p.iter().map(|(w, c)| serde_json::json!([rational::format(c), w.to_string()])).collect(),
    )
}

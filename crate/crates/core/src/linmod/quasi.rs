//! Quasi-monomials `e_v = (x_{j_1} - α_{j_1,1})...(x_{j_d} - α_{j_d,d})`,
//! conversion to and from the monomial basis, and the residually finite
//! module `R/I` of maximal growth with `I` spanned by the `e_w` whose `w`
//! has a prefix `v_i x_1^{d_i - |v_i|}`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::poly::poly_mul;
use super::{Echelon, Poly, RuleModule, SparseVec};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::words::{sample_rng, Letter, MonoidWord};

/// The scalars `α_{j,i}`, `1 <= j <= r`, `i >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum Alpha {
    /// `α_{j,i} = scale · i + shift_j`; injective in `i` when `scale != 0`.
    Affine { scale: Rational, shift: Vec<Rational> },
    /// Explicit finite rows; lookups beyond them fail.
    Table(Vec<Vec<Rational>>),
}

impl Alpha {
    /// `α_{j,i} = i` for every row.
    pub fn index(r: u32) -> Alpha {
        Alpha::Affine { scale: Rational::one(), shift: vec![Rational::zero(); r as usize] }
    }

    pub fn validate(&self, r: u32) -> Result<()> {
        match self {
            Alpha::Affine { scale, shift } => {
                if scale.is_zero() {
                    return Err(Error::Precondition("alpha rows repeat a value infinitely often (scale 0)".into()));
                }
                if shift.len() != r as usize {
                    return Err(Error::Input(format!("alpha needs {r} shifts, got {}", shift.len())));
                }
            }
            Alpha::Table(rows) => {
                if rows.len() != r as usize {
                    return Err(Error::Input(format!("alpha needs {r} rows, got {}", rows.len())));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, j: u32, i: usize) -> Result<Rational> {
        match self {
            Alpha::Affine { scale, shift } => Ok(scale * Rational::from_integer(i.into()) + &shift[j as usize - 1]),
            Alpha::Table(rows) => rows[j as usize - 1]
                .get(i - 1)
                .cloned()
                .ok_or_else(|| Error::Budget(format!("alpha_{{{j},{i}}} is beyond the table"))),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Alpha::Affine { scale, shift } => json!({
                "affine": { "scale": rational::format(scale), "shift": shift.iter().map(rational::format).collect::<Vec<_>>() }
            }),
            Alpha::Table(rows) => json!({
                "table": rows.iter().map(|row| row.iter().map(rational::format).collect::<Vec<_>>()).collect::<Vec<_>>()
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Alpha> {
        let strs = |v: &Value| -> Result<Vec<Rational>> {
            v.as_array()
                .ok_or_else(|| Error::Input("expected an array of rationals".into()))?
                .iter()
                .map(|x| match x {
                    Value::String(s) => rational::parse(s),
                    Value::Number(n) => rational::parse(&n.to_string()),
                    _ => Err(Error::Input("rational must be a string or integer".into())),
                })
                .collect()
        };
        if let Some(a) = v.get("affine") {
            let scale = match a.get("scale") {
                Some(Value::String(s)) => rational::parse(s)?,
                Some(Value::Number(n)) => rational::parse(&n.to_string())?,
                _ => return Err(Error::Input("affine alpha needs a scale".into())),
            };
            let shift = strs(a.get("shift").ok_or_else(|| Error::Input("affine alpha needs shifts".into()))?)?;
            return Ok(Alpha::Affine { scale, shift });
        }
        if let Some(t) = v.get("table") {
            let rows = t.as_array().ok_or_else(|| Error::Input("table must be an array".into()))?;
            return Ok(Alpha::Table(rows.iter().map(strs).collect::<Result<_>>()?));
        }
        Err(Error::Input("alpha must have an \"affine\" or \"table\" key".into()))
    }
}

/// The degrees `d_i` attached to the `i`-th monomial in ShortLex order
/// (the empty word is `i = 1`).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DRule {
    /// `d_i = i + shift`.
    Shift(usize),
    List(Vec<usize>),
}

impl DRule {
    pub fn get(&self, i: u128) -> Result<usize> {
        match self {
            DRule::Shift(s) => usize::try_from(i).map(|i| i + s).map_err(|_| Error::Budget("index overflow".into())),
            DRule::List(d) => usize::try_from(i)
                .ok()
                .and_then(|i| d.get(i - 1).copied())
                .ok_or_else(|| Error::Budget(format!("d_{i} is beyond the given list"))),
        }
    }

    fn validate(&self, r: u32) -> Result<()> {
        match self {
            DRule::Shift(s) if *s >= 1 => Ok(()),
            DRule::Shift(_) => Err(Error::Precondition("need 1 < d_1, so the shift must be at least 1".into())),
            DRule::List(d) => {
                if d.is_empty() || d[0] <= 1 || d.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Precondition("need 1 < d_1 < d_2 < ...".into()));
                }
                for (i, &di) in d.iter().enumerate() {
                    if shortlex_degree(r, i as u128 + 1) > di {
                        return Err(Error::Precondition(format!("deg u_{} exceeds d_{} = {di}", i + 1, i + 1)));
                    }
                }
                Ok(())
            }
        }
    }
}

/// 1-based position of `v` among all monomials in ShortLex order.
pub fn shortlex_index(r: u32, v: &MonoidWord) -> u128 {
    let r = r as u128;
    let mut before = 0u128;
    let mut p = 1u128;
    for _ in 0..v.len() {
        before += p;
        p = p.saturating_mul(r);
    }
    let lex = v.gens().fold(0u128, |acc, g| acc.saturating_mul(r).saturating_add(g as u128 - 1));
    before.saturating_add(lex).saturating_add(1)
}

/// Degree of the `i`-th monomial in ShortLex order.
fn shortlex_degree(r: u32, i: u128) -> usize {
    let (mut d, mut first, mut p) = (0usize, 1u128, 1u128);
    while i >= first + p {
        first += p;
        p *= r as u128;
        d += 1;
    }
    d
}

/// `e_v` expanded on the monomial basis.
pub fn quasi_expand(v: &MonoidWord, alpha: &Alpha) -> Result<Poly> {
    let mut p = Poly::unit(MonoidWord::empty());
    for (t, j) in v.gens().enumerate() {
        let factor = Poly::from_terms([(MonoidWord::from_gens(&[j]), Rational::one()), (MonoidWord::empty(), -alpha.get(j, t + 1)?)]);
        p = poly_mul(&p, &factor);
    }
    Ok(p)
}

/// Coordinates of `p` in the basis `{e_v}`: peel off leading monomials,
/// using that the leading term of `e_v` is `v`.
pub fn quasi_convert(p: &Poly, alpha: &Alpha) -> Result<SparseVec<MonoidWord>> {
    let mut rest = p.clone();
    let mut out = SparseVec::zero();
    while let Some((v, c)) = rest.leading() {
        let (v, c) = (v.clone(), c.clone());
        rest.add_scaled(&quasi_expand(&v, alpha)?, &-c.clone());
        out.add_term(v, c);
    }
    Ok(out)
}

pub fn from_quasi(e: &SparseVec<MonoidWord>, alpha: &Alpha) -> Result<Poly> {
    e.map_linear(|v| quasi_expand(v, alpha))
}

/// `R` on the basis `{e_v}`, or `R/I` on the surviving `e_v` when a degree
/// rule is given.
#[derive(Clone, Debug)]
pub struct QuasiModule {
    pub r: u32,
    pub alpha: Alpha,
    pub d: Option<DRule>,
}

impl QuasiModule {
    pub fn new(r: u32, alpha: Alpha, d: Option<DRule>) -> Result<QuasiModule> {
        if r < 2 {
            return Err(Error::Rank { rank: r, min: 2 });
        }
        alpha.validate(r)?;
        if let Some(d) = &d {
            d.validate(r)?;
        }
        Ok(QuasiModule { r, alpha, d })
    }

    /// The leading monomial `m_i = v_i x_1^{d_i - |v_i|}` of `w_i`.
    pub fn leading_monomial(&self, v: &MonoidWord) -> Result<Option<MonoidWord>> {
        let Some(d) = &self.d else { return Ok(None) };
        let di = d.get(shortlex_index(self.r, v))?;
        let mut m = v.clone();
        while m.len() < di {
            m.push(1);
        }
        Ok(Some(m))
    }

    /// Whether `w` itself is some `m_i`: strip trailing `x_1`s and compare
    /// degrees.
    pub fn is_leading_monomial(&self, w: &MonoidWord) -> Result<bool> {
        let Some(d) = &self.d else { return Ok(false) };
        let gens: Vec<u32> = w.gens().collect();
        let mut k = 0;
        loop {
            let v = MonoidWord::from_gens(&gens[..gens.len() - k]);
            if d.get(shortlex_index(self.r, &v))? == gens.len() {
                return Ok(true);
            }
            if k == gens.len() || gens[gens.len() - k - 1] != 1 {
                return Ok(false);
            }
            k += 1;
        }
    }

    /// Whether some prefix of `w` is a leading monomial, i.e. `e_w ∈ I`.
    pub fn killed(&self, w: &MonoidWord) -> Result<bool> {
        for len in 0..=w.len() {
            if self.is_leading_monomial(&w.prefix(len))? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn generator(&self) -> SparseVec<MonoidWord> {
        SparseVec::unit(MonoidWord::empty())
    }

    /// Minimal leading monomials of degree at most `n`.
    pub fn forbidden(&self, n: usize) -> Result<Vec<MonoidWord>> {
        let mut out = Vec::new();
        for v in MonoidWord::ball(self.r, n) {
            if let Some(m) = self.leading_monomial(&v)? {
                if m.len() <= n {
                    out.push(m);
                }
            }
        }
        let all: BTreeSet<MonoidWord> = out.into_iter().collect();
        Ok(all.iter().filter(|m| !all.iter().any(|p| p != *m && m.starts_with(p))).cloned().collect())
    }

    /// `m_i` with `d_i <= n`, not minimized.
    fn all_leading(&self, n: usize) -> Result<Vec<MonoidWord>> {
        let mut out = Vec::new();
        for v in MonoidWord::ball(self.r, n) {
            if let Some(m) = self.leading_monomial(&v)? {
                if m.len() <= n {
                    out.push(m);
                }
            }
        }
        Ok(out)
    }
}

impl RuleModule for QuasiModule {
    type Tag = MonoidWord;

    fn rank(&self) -> u32 {
        self.r
    }

    /// `e_v x_j = e_{v x_j} + α_{j,|v|+1} e_v`, dropping `e_{v x_j}` when it
    /// lies in `I`. `v` is assumed to survive, so only the whole word
    /// `v x_j` can be a new leading monomial.
    fn act(&self, v: &MonoidWord, x: Letter) -> Result<SparseVec<MonoidWord>> {
        let j = x.generator();
        if !x.is_positive() || j == 0 || j > self.r {
            return Err(Error::LetterOutOfRange { letter: x.value() as i64, rank: self.r });
        }
        let mut out = SparseVec::term(v.clone(), self.alpha.get(j, v.len() + 1)?);
        let w = v.pushed(j);
        if !self.is_leading_monomial(&w)? {
            out.add_term(w, Rational::one());
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub element: String,
    /// The element lies in `M_i = M Δ_1 ... Δ_i`.
    pub i: usize,
    pub s: usize,
    pub t: usize,
    /// `w (x_1 - α_{1,s}) ... (x_1 - α_{1,t}) = 0`.
    pub killed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct T991Report {
    pub r: u32,
    pub alpha: Value,
    pub d: DRule,
    pub forbidden: Vec<String>,
    /// Ball dimensions from counting surviving quasi-monomials.
    pub g: Vec<String>,
    /// The same by rank of `span{e_{m_i} u}` on monomials, for `n <= oracle_max`.
    pub g_rank: Vec<String>,
    pub oracle_agrees: bool,
    /// `g(n) > r^n` for `1 <= n <= n_max`.
    pub exceeds_free: bool,
    /// `g(n) > 1 + ... + r^n - 2 Σ_{d_j <= n} r^{n - d_j}` whenever the sum
    /// is nonempty, equality otherwise.
    pub count_bound_ok: bool,
    pub witnesses: Vec<Witness>,
    /// `dim M / M Δ_1 ... Δ_i` for `i = 1..=4`.
    pub delta_quotients: Vec<String>,
    pub delta_ok: bool,
    /// `e_v x_j` only involves `e_w` with `w >= v` in ShortLex.
    pub triangular: bool,
    /// No nonzero element of degree at most 3 annihilates `M`.
    pub faithful_degree3: bool,
}

impl T991Report {
    pub fn ok(&self) -> bool {
        self.oracle_agrees
            && self.exceeds_free
            && self.count_bound_ok
            && self.witnesses.iter().all(|w| w.killed && w.s > w.i)
            && self.delta_ok
            && self.triangular
            && self.faithful_degree3
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn pow_u(r: u32, n: usize) -> BigUint {
    rational::upow(r as u64, n)
}

/// Builds `M = R/I` and checks growth, annihilation, the `Δ`-quotients,
/// triangularity and faithfulness up to degree `n_max`.
pub fn build_t991(
    r: u32,
    alpha: Alpha,
    d: DRule,
    n_max: usize,
    oracle_max: usize,
    samples: usize,
    seed: u64,
) -> Result<(QuasiModule, T991Report)> {
    let m = QuasiModule::new(r, alpha, Some(d.clone()))?;
    let forbidden = m.forbidden(n_max.max(4))?;

    // surviving words of each length: r^k minus the cones over forbidden prefixes
    let sphere = |k: usize| -> BigUint {
        let hit: BigUint = forbidden.iter().filter(|f| f.len() <= k).map(|f| pow_u(r, k - f.len())).sum();
        pow_u(r, k) - hit
    };
    let mut g = Vec::new();
    let mut acc = BigUint::zero();
    for k in 0..=n_max.max(4) {
        acc += sphere(k);
        g.push(acc.clone());
    }

    let g_rank = rank_oracle(&m, oracle_max.min(n_max))?;
    let oracle_agrees = g_rank.iter().enumerate().all(|(n, x)| *x == g[n]);

    // g(0) = 1 = r^0, so the strict comparison starts at n = 1
    let exceeds_free = (1..=n_max).all(|n| g[n] > pow_u(r, n));
    let leading = m.all_leading(n_max)?;
    let count_bound_ok = (0..=n_max).all(|n| {
        let total: BigUint = (0..=n).map(|k| pow_u(r, k)).sum();
        let cut: BigUint = leading.iter().filter(|l| l.len() <= n).map(|l| 2u32 * pow_u(r, n - l.len())).sum();
        // strict only once some d_j <= n; with an empty sum I(n) = 0 and g(n) is the total
        if cut.is_zero() {
            g[n] == total
        } else {
            &g[n] + cut > total
        }
    });

    let witnesses = sample_witnesses(&m, n_max, samples, seed)?;

    let delta: Vec<BigUint> = (1..=4).map(|i| g[i - 1].clone()).collect();
    let delta_ok = delta.iter().enumerate().all(|(k, x)| {
        let i = k + 1;
        let monomials: BigUint = (0..i).map(|e| pow_u(r, e)).sum();
        *x <= monomials
    });

    let normal: Vec<MonoidWord> =
        MonoidWord::ball(r, n_max.saturating_sub(1)).into_iter().filter(|v| !m.killed(v).unwrap_or(true)).collect();
    let mut triangular = true;
    for v in &normal {
        for j in 1..=r {
            if m.act(v, Letter::pos(j))?.keys().any(|w| w < v) {
                triangular = false;
            }
        }
    }

    let faithful_degree3 = faithful_to(&m, 3)?;

    let report = T991Report {
        r,
        alpha: m.alpha.to_json(),
        d,
        forbidden: forbidden.iter().map(|f| f.to_string()).collect(),
        g: g[..=n_max].iter().map(|x| x.to_string()).collect(),
        g_rank: g_rank.iter().map(|x| x.to_string()).collect(),
        oracle_agrees,
        exceeds_free,
        count_bound_ok,
        witnesses,
        delta_quotients: delta.iter().map(|x| x.to_string()).collect(),
        delta_ok,
        triangular,
        faithful_degree3,
    };
    Ok((m, report))
}

/// `dim R(n) - dim (I ∩ R(n))` with `I ∩ R(n)` spanned by `e_{m_i} u`,
/// `|m_i u| <= n`, all expanded on monomials.
fn rank_oracle(m: &QuasiModule, n_max: usize) -> Result<Vec<BigUint>> {
    let r = m.r;
    let leads = m.all_leading(n_max)?;
    let expanded: Vec<(usize, Poly)> =
        leads.iter().map(|l| Ok((l.len(), quasi_expand(l, &m.alpha)?))).collect::<Result<_>>()?;
    let mut ech = Echelon::new();
    for (len, p) in &expanded {
        for u in MonoidWord::ball(r, n_max - len) {
            ech.insert(super::poly_times_word(p, &u));
        }
    }
    let mut out = Vec::new();
    let mut total = BigUint::zero();
    for n in 0..=n_max {
        total += pow_u(r, n);
        out.push(&total - BigUint::from(ech.count_pivots(|w: &MonoidWord| w.len() <= n)));
    }
    Ok(out)
}

fn sample_witnesses(m: &QuasiModule, n_max: usize, samples: usize, seed: u64) -> Result<Vec<Witness>> {
    let d = m.d.as_ref().expect("t991 has a degree rule");
    let mut out = Vec::new();
    for sample in 0..samples {
        let mut rng = sample_rng(seed, sample as u64);
        let i = rng.gen_range(0..=3usize);
        let pool: Vec<MonoidWord> = MonoidWord::ball(m.r, (i + 2).min(n_max))
            .into_iter()
            .filter(|v| v.len() >= i && !m.killed(v).unwrap_or(true))
            .collect();
        if pool.is_empty() {
            continue;
        }
        let mut w = SparseVec::zero();
        for _ in 0..rng.gen_range(1..=3) {
            let v = pool[rng.gen_range(0..pool.len())].clone();
            let c = Rational::new(rng.gen_range(1i64..=9).into(), rng.gen_range(1i64..=4).into());
            w.add_term(v, c);
        }
        if w.is_zero() {
            continue;
        }
        let s = w.keys().map(|v| v.len() + 1).min().expect("nonzero");
        let t = w.keys().map(|v| d.get(shortlex_index(m.r, v))).collect::<Result<Vec<_>>>()?.into_iter().max().expect("nonzero");
        let mut cur = w.clone();
        for k in s..=t {
            let mut next = m.act_vec(&cur, Letter::pos(1))?;
            next.add_scaled(&cur, &-m.alpha.get(1, k)?);
            cur = next;
        }
        let element = w.iter().map(|(v, c)| format!("{}·e[{}]", rational::format(c), v)).collect::<Vec<_>>().join(" + ");
        out.push(Witness { element, i, s, t, killed: cur.is_zero() });
    }
    Ok(out)
}

/// Whether `a ↦ (e_v a)_v`, over surviving `e_v` with `|v| <= k`, is
/// injective on polynomials of degree at most `k`.
fn faithful_to(m: &QuasiModule, k: usize) -> Result<bool> {
    let states: Vec<MonoidWord> =
        MonoidWord::ball(m.r, k).into_iter().filter(|v| !m.killed(v).unwrap_or(true)).collect();
    let monomials = MonoidWord::ball(m.r, k);
    let mut ech: Echelon<(usize, MonoidWord)> = Echelon::new();
    for a in &monomials {
        let mut v = SparseVec::zero();
        for (s_idx, s) in states.iter().enumerate() {
            let img = m.apply(&SparseVec::unit(s.clone()), a)?;
            for (w, c) in img.iter() {
                v.add_term((s_idx, w.clone()), c.clone());
            }
        }
        ech.insert(v);
    }
    Ok(ech.rank() == monomials.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn w(g: &[u32]) -> MonoidWord {
        MonoidWord::from_gens(g)
    }

    #[test]
    fn shortlex_positions() {
        assert_eq!(shortlex_index(2, &MonoidWord::empty()), 1);
        assert_eq!(shortlex_index(2, &w(&[1])), 2);
        assert_eq!(shortlex_index(2, &w(&[2])), 3);
        assert_eq!(shortlex_index(2, &w(&[1, 1])), 4);
        assert_eq!(shortlex_index(2, &w(&[2, 2])), 7);
        assert_eq!(shortlex_index(3, &w(&[1, 1])), 5);
        for (i, v) in MonoidWord::ball(3, 3).iter().enumerate() {
            assert_eq!(shortlex_index(3, v), i as u128 + 1);
            assert_eq!(shortlex_degree(3, i as u128 + 1), v.len());
        }
    }

    #[test]
    fn expansion_of_a_single_factor() {
        let a = Alpha::index(2);
        let e = quasi_expand(&w(&[1]), &a).unwrap();
        assert_eq!(e, Poly::from_terms([(w(&[1]), int(1)), (MonoidWord::empty(), int(-1))]));
        // e_{x1} x1 = e_{x1 x1} + α_{1,2} e_{x1}
        let m = QuasiModule::new(2, a.clone(), None).unwrap();
        let img = m.act(&w(&[1]), Letter::pos(1)).unwrap();
        assert_eq!(img, SparseVec::from_terms([(w(&[1, 1]), int(1)), (w(&[1]), int(2))]));
        let lhs = super::super::poly_times_word(&e, &w(&[1]));
        assert_eq!(from_quasi(&img, &a).unwrap(), lhs);
    }

    #[test]
    fn conversion_round_trip() {
        let a = Alpha::Affine { scale: rat(1, 2), shift: vec![int(3), rat(-1, 5)] };
        let p = Poly::from_terms([(w(&[2, 1, 2]), int(4)), (w(&[1]), rat(2, 3)), (MonoidWord::empty(), int(-1))]);
        let e = quasi_convert(&p, &a).unwrap();
        assert_eq!(e.leading().unwrap().0, &w(&[2, 1, 2]));
        assert_eq!(from_quasi(&e, &a).unwrap(), p);
    }

    #[test]
    fn killed_words() {
        let m = QuasiModule::new(2, Alpha::index(2), Some(DRule::Shift(1))).unwrap();
        // m_1 = x1 x1, m_3 = x2 x1 x1 x1
        assert!(m.killed(&w(&[1, 1])).unwrap());
        assert!(m.killed(&w(&[1, 1, 2])).unwrap());
        assert!(!m.killed(&w(&[1, 2])).unwrap());
        assert!(!m.killed(&w(&[2, 1, 1])).unwrap());
        assert!(m.killed(&w(&[2, 1, 1, 1])).unwrap());
        assert_eq!(m.forbidden(5).unwrap(), vec![w(&[1, 1]), w(&[2, 1, 1, 1])]);
    }

    #[test]
    fn t991_instance() {
        let (_, rep) = build_t991(2, Alpha::index(2), DRule::Shift(1), 8, 6, 10, 3).unwrap();
        assert!(rep.ok(), "{}", rep.to_json());
        assert_eq!(rep.witnesses.len(), 10);
    }

    #[test]
    fn invalid_alpha_and_degrees() {
        let zero = Alpha::Affine { scale: int(0), shift: vec![int(0), int(0)] };
        assert!(QuasiModule::new(2, zero, None).is_err());
        assert!(QuasiModule::new(2, Alpha::index(2), Some(DRule::List(vec![1, 3]))).is_err());
        assert!(QuasiModule::new(2, Alpha::index(2), Some(DRule::Shift(0))).is_err());
        let a = Alpha::index(3);
        assert_eq!(Alpha::from_json(&a.to_json()).unwrap(), a);
    }
}

//! Graded right ideals of the free algebra: the Golod-type dimension bound
//! and one step of the nil quotient construction.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use super::poly::{is_homogeneous, poly_mul, power_components, word_times_poly};
use super::{Echelon, Poly};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::words::{sample_rng, MonoidWord};

/// Dimensions of the homogeneous components `I_0..I_{n_max}` of the right
/// ideal generated by homogeneous `gens`, with the echelon forms.
fn graded_ideal(gens: &[&Poly], r: u32, n_max: usize) -> Vec<Echelon<MonoidWord>> {
    let mut out: Vec<Echelon<MonoidWord>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut e = Echelon::new();
        if n > 0 {
            let prev: Vec<Poly> = out[n - 1].rows().cloned().collect();
            for row in &prev {
                for k in 1..=r {
                    e.insert(super::poly_times_word(row, &MonoidWord::from_gens(&[k])));
                }
            }
        }
        for g in gens.iter().filter(|g| g.leading().map(|(w, _)| w.len()) == Some(n)) {
            e.insert((*g).clone());
        }
        out.push(e);
    }
    out
}

fn check_graded(gens: &[Poly]) -> Result<()> {
    match gens.iter().position(|g| !is_homogeneous(g)) {
        Some(i) => Err(Error::Precondition(format!("non-graded input: element {i} is not homogeneous"))),
        None => Ok(()),
    }
}

fn big_pow(r: u32, n: usize) -> BigUint {
    rational::upow(r as u64, n)
}

#[derive(Clone, Debug, Serialize)]
pub struct GolodReport {
    /// `dim P_i`, the rank of the generators of degree `i`.
    pub d: Vec<usize>,
    /// `dim L_n`.
    pub dims: Vec<usize>,
    /// `Σ_{i <= n} d_i r^{n-i}`.
    pub bound: Vec<String>,
    pub ok: bool,
}

/// Compares `dim L_n` for `L = Σ P_i R` with `Σ_{i <= n} d_i r^{n-i}`.
pub fn golod_bound_check(p: &[Poly], r: u32, n_max: usize) -> Result<GolodReport> {
    check_graded(p)?;
    let nonzero: Vec<&Poly> = p.iter().filter(|g| !g.is_zero()).collect();
    let mut d = vec![0usize; n_max + 1];
    for (i, di) in d.iter_mut().enumerate() {
        let mut e = Echelon::new();
        for g in nonzero.iter().filter(|g| g.leading().map(|(w, _)| w.len()) == Some(i)) {
            e.insert((*g).clone());
        }
        *di = e.rank();
    }
    let dims: Vec<usize> = graded_ideal(&nonzero, r, n_max).iter().map(|e| e.rank()).collect();
    let bound: Vec<BigUint> =
        (0..=n_max).map(|n| (0..=n).map(|i| BigUint::from(d[i]) * big_pow(r, n - i)).sum()).collect();
    let ok = dims.iter().zip(&bound).all(|(&x, b)| &BigUint::from(x) <= b);
    Ok(GolodReport { d, dims, bound: bound.iter().map(|b| b.to_string()).collect(), ok })
}

/// Smallest `q >= 1` with `2 q^k <= gap · r^q`.
pub fn nil_q(gap: &Rational, r: u32, k: usize) -> Result<usize> {
    if *gap <= Rational::zero() {
        return Err(Error::Precondition("need c < C".into()));
    }
    const LIMIT: usize = 1 << 12;
    for q in 1..=LIMIT {
        let lhs = Rational::from_integer((BigUint::from(2u32) * num_traits::pow(BigUint::from(q), k)).into());
        let rhs = gap * Rational::from_integer(big_pow(r, q).into());
        if lhs <= rhs {
            return Ok(q);
        }
    }
    Err(Error::Budget(format!("no q <= {LIMIT} satisfies 2 q^{k} <= (C - c) r^q")))
}

#[derive(Clone, Debug, Serialize)]
pub struct NilStepReport {
    pub q: usize,
    /// Number of multinomial components, at most `q^k`.
    pub components: usize,
    pub component_degrees: Vec<usize>,
    /// Ball dimensions of `M = R/J`.
    pub g_m: Vec<String>,
    /// Ball dimensions of `M/L`.
    pub g_quotient: Vec<String>,
    /// `g_M(n) >= C r^n` at every computed `n`.
    pub certificate_ok: bool,
    /// `g_{M/L}(n) >= c r^n` at every computed `n`.
    pub quotient_ok: bool,
    /// `b (Σ s_i v_i)^q ∈ L` for each sampled scalar tuple.
    pub spot_checks: Vec<bool>,
}

impl NilStepReport {
    pub fn ok(&self) -> bool {
        self.certificate_ok && self.quotient_ok && self.spot_checks.iter().all(|&b| b)
    }
}

pub struct NilStepInput<'a> {
    pub r: u32,
    /// Homogeneous relations `J` with `M = R/J` generated by `a = 1 + J`.
    pub relations: &'a [Poly],
    pub big_c: Rational,
    pub c: Rational,
    /// `b = a·u`.
    pub u: MonoidWord,
    pub vs: &'a [Poly],
    pub n_max: usize,
    pub seed: u64,
    pub samples: usize,
}

/// Chooses `q`, forms `L` generated by the homogeneous components
/// `b·w_m` of `b (s_1 v_1 + ... + s_k v_k)^q`, and measures `M/L`.
pub fn nil_step(inp: &NilStepInput) -> Result<NilStepReport> {
    let r = inp.r;
    if !(Rational::zero() < inp.c && inp.c < inp.big_c) {
        return Err(Error::Precondition("need 0 < c < C".into()));
    }
    if inp.vs.is_empty() {
        return Err(Error::Precondition("v_list must be nonempty".into()));
    }
    check_graded(inp.relations)?;
    check_graded(inp.vs)?;
    if inp.vs.iter().any(|v| v.is_zero() || v.keys().any(|w| w.is_empty())) {
        return Err(Error::Precondition("each v_i must be nonzero of degree >= 1".into()));
    }
    let k = inp.vs.len();
    let q = nil_q(&(&inp.big_c - &inp.c), r, k)?;
    let comps = power_components(inp.vs, q);
    let l_gens: Vec<Poly> = comps.values().map(|w| word_times_poly(&inp.u, w)).collect();
    let component_degrees = l_gens.iter().map(|g| g.leading().map_or(0, |(w, _)| w.len())).collect();

    let mut rng = sample_rng(inp.seed, 0);
    let samples: Vec<Poly> = (0..inp.samples)
        .map(|_| {
            let mut sum = Poly::zero();
            for v in inp.vs {
                let s = Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into());
                sum.add_scaled(v, &s);
            }
            let mut pw = Poly::unit(MonoidWord::empty());
            for _ in 0..q {
                pw = poly_mul(&pw, &sum);
            }
            word_times_poly(&inp.u, &pw)
        })
        .collect();
    let top = samples.iter().filter_map(|p| p.leading().map(|(w, _)| w.len())).max().unwrap_or(0).max(inp.n_max);

    let j_refs: Vec<&Poly> = inp.relations.iter().filter(|g| !g.is_zero()).collect();
    let mut jl_refs = j_refs.clone();
    jl_refs.extend(l_gens.iter());
    let j = graded_ideal(&j_refs, r, inp.n_max);
    let jl = graded_ideal(&jl_refs, r, inp.n_max);
    let l_only = graded_ideal(&l_gens.iter().collect::<Vec<_>>(), r, top);

    let spot_checks = samples
        .iter()
        .map(|p| {
            (0..=top).all(|n| {
                let part = p.filtered(|w| w.len() == n);
                l_only[n].contains(&part)
            })
        })
        .collect();

    let mut g_m = Vec::new();
    let mut g_q = Vec::new();
    let (mut am, mut aq) = (BigUint::zero(), BigUint::zero());
    for n in 0..=inp.n_max {
        am += big_pow(r, n) - BigUint::from(j[n].rank());
        aq += big_pow(r, n) - BigUint::from(jl[n].rank());
        g_m.push(am.clone());
        g_q.push(aq.clone());
    }
    let scaled = |x: &Rational, n: usize| x * Rational::from_integer(big_pow(r, n).into());
    let certificate_ok = (0..=inp.n_max).all(|n| Rational::from_integer(g_m[n].clone().into()) >= scaled(&inp.big_c, n));
    let quotient_ok = (0..=inp.n_max).all(|n| Rational::from_integer(g_q[n].clone().into()) >= scaled(&inp.c, n));
    if !certificate_ok {
        return Err(Error::Precondition(format!("g_M(n) >= {} r^n fails", rational::format(&inp.big_c))));
    }
    Ok(NilStepReport {
        q,
        components: comps.len(),
        component_degrees,
        g_m: g_m.iter().map(|x| x.to_string()).collect(),
        g_quotient: g_q.iter().map(|x| x.to_string()).collect(),
        certificate_ok,
        quotient_ok,
        spot_checks,
    })
}

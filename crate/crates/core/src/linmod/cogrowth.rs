//! Co-growth of submodules of free modules, by normal forms and by rank.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{module_growth, FreeModule, FreeTag, RuleModule, SparseVec};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::rational::{self, Rational};
use crate::words::{Letter, MonoidWord};

type Vector = SparseVec<FreeTag>;

fn lead(v: &Vector) -> &FreeTag {
    v.leading().expect("nonzero").0
}

fn monic(v: Vector) -> Vector {
    let c = v.leading().expect("nonzero").1.recip();
    v.scaled(&c)
}

fn times_word(v: &Vector, w: &MonoidWord) -> Vector {
    SparseVec::from_terms(v.iter().map(|(t, c)| (FreeTag::new(t.gen, t.word.concat(w)), c.clone())))
}

/// Monic elements with prefix-free leading tags, indexed by leading tag.
struct PrefixIndex {
    elems: Vec<Vector>,
    by_lead: HashMap<FreeTag, usize>,
}

impl PrefixIndex {
    fn new(elems: Vec<Vector>) -> PrefixIndex {
        let by_lead = elems.iter().enumerate().map(|(i, v)| (lead(v).clone(), i)).collect();
        PrefixIndex { elems, by_lead }
    }

    /// The element whose leading tag is a prefix of `t`, and the suffix.
    fn divisor(&self, t: &FreeTag) -> Option<(&Vector, MonoidWord)> {
        (0..=t.word.len()).find_map(|k| {
            let key = FreeTag::new(t.gen, t.word.prefix(k));
            self.by_lead.get(&key).map(|&i| (&self.elems[i], t.word.suffix(k)))
        })
    }

    /// Reduces every term, so the result is a combination of normal tags.
    fn normal_form(&self, mut v: Vector) -> Vector {
        let mut out = Vector::zero();
        while let Some((t, c)) = v.leading() {
            let (t, c) = (t.clone(), c.clone());
            match self.divisor(&t) {
                Some((g, suffix)) => v.add_scaled(&times_word(g, &suffix), &-c),
                None => {
                    v.add_term(t.clone(), -c.clone());
                    out.add_term(t, c);
                }
            }
        }
        out
    }
}

/// A basis of the submodule generated by `gens` whose leading tags are
/// pairwise prefix-incomparable; the submodule is then the direct sum of
/// the cyclic free modules `g·R`. `guard` bounds the number of steps.
pub fn prefix_basis(gens: &[Vector], guard: usize) -> Result<Vec<Vector>> {
    Ok(prefix_basis_with_heights(gens, guard)?.into_iter().map(|(b, _)| b).collect())
}

/// As [`prefix_basis`], with each element's height: a bound on the degrees
/// of the products `g·u` of generators it is a combination of.
fn prefix_basis_with_heights(gens: &[Vector], guard: usize) -> Result<Vec<(Vector, usize)>> {
    let mut basis: Vec<(Vector, usize)> = Vec::new();
    let mut queue: Vec<(Vector, usize)> =
        gens.iter().filter(|g| !g.is_zero()).map(|g| (g.clone(), lead(g).word.len())).collect();
    let mut steps = 0;
    while let Some((mut p, mut h)) = queue.pop() {
        steps += 1;
        if steps > guard {
            return Err(Error::Budget(format!("prefix basis not reached in {guard} steps")));
        }
        loop {
            let Some((t, c)) = p.leading() else { break };
            let (t, c) = (t.clone(), c.clone());
            let hit = basis.iter().find_map(|(g, hg)| {
                let l = lead(g);
                (l.gen == t.gen && t.word.starts_with(&l.word)).then(|| (g, *hg, t.word.suffix(l.word.len())))
            });
            match hit {
                Some((g, hg, suffix)) => {
                    h = h.max(hg + suffix.len());
                    let m = times_word(g, &suffix);
                    p.add_scaled(&m, &-c);
                }
                None => break,
            }
        }
        if p.is_zero() {
            continue;
        }
        let l = lead(&p).clone();
        let (keep, moved): (Vec<_>, Vec<_>) =
            basis.into_iter().partition(|(g, _)| !(lead(g).gen == l.gen && lead(g).word.starts_with(&l.word)));
        basis = keep;
        queue.extend(moved);
        basis.push((monic(p), h));
    }
    basis.sort_by(|a, b| lead(&a.0).cmp(lead(&b.0)));
    Ok(basis)
}

/// The quotient `L/N` of a free module by a submodule with a prefix basis,
/// acting on normal tags.
pub struct NormalFormModule {
    free: FreeModule,
    index: PrefixIndex,
}

impl NormalFormModule {
    pub fn new(free: FreeModule, basis: Vec<Vector>) -> NormalFormModule {
        NormalFormModule { free, index: PrefixIndex::new(basis) }
    }

    pub fn normal_form(&self, v: Vector) -> Vector {
        self.index.normal_form(v)
    }
}

impl RuleModule for NormalFormModule {
    type Tag = FreeTag;

    fn rank(&self) -> u32 {
        self.free.rank
    }

    fn act(&self, tag: &FreeTag, x: Letter) -> Result<Vector> {
        Ok(self.normal_form(self.free.act(tag, x)?))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CogrowthReport {
    pub rank: u32,
    pub s: usize,
    /// Ball dimensions of the free module.
    #[serde(serialize_with = "ser_big")]
    pub g_l: Vec<BigUint>,
    /// Ball dimensions of the quotient, from normal forms.
    #[serde(serialize_with = "ser_big")]
    pub g_m: Vec<BigUint>,
    /// `dim(N ∩ B(n))` by rank of the span of the products `p·u` up to a
    /// degree cutoff.
    #[serde(serialize_with = "ser_big")]
    pub c: Vec<BigUint>,
    /// The same from the prefix basis: `Σ_g Σ_{k <= n - deg g} r^k`.
    #[serde(serialize_with = "ser_big")]
    pub c_from_basis: Vec<BigUint>,
    pub identity_ok: bool,
    pub routes_agree: bool,
    #[serde(serialize_with = "ser_rat")]
    pub ratios: Vec<Rational>,
    pub leading_tags: Vec<String>,
}

fn ser_big<S: serde::Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn ser_rat<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format))
}

impl CogrowthReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Largest ratio `c(n)/g_L(n)`.
    pub fn max_ratio(&self) -> Rational {
        self.ratios.iter().cloned().fold(Rational::zero(), |a, b| if b > a { b } else { a })
    }
}

/// Co-growth of the submodule `N` generated by `sub_gens` inside the free
/// module of rank `s` over `r` letters, for `n <= n_max`.
pub fn cogrowth(sub_gens: &[Vector], r: u32, s: usize, n_max: usize, exec: Exec) -> Result<CogrowthReport> {
    if r < 1 || s < 1 {
        return Err(Error::Precondition("cogrowth needs r >= 1 and s >= 1".into()));
    }
    for g in sub_gens {
        if let Some(t) = g.keys().find(|t| t.gen >= s || t.word.gens().any(|k| k > r)) {
            return Err(Error::Precondition(format!("tag ({}, {}) is outside the free module", t.gen, t.word)));
        }
    }
    let free = FreeModule { rank: r, s };
    let gens: Vec<Vector> = sub_gens.iter().filter(|g| !g.is_zero()).cloned().collect();

    let mut pow = vec![BigUint::one()];
    for _ in 0..n_max {
        let last = pow.last().unwrap().clone();
        pow.push(last * r);
    }
    let mut g_l = Vec::new();
    let mut acc = BigUint::zero();
    for p in &pow {
        acc += p * s;
        g_l.push(acc.clone());
    }

    let with_heights = prefix_basis_with_heights(&gens, 1 << 20)?;
    // an element of N ∩ B(n) is a sum of b·v with deg(b·v) <= n, hence a
    // combination of products g·u of degree at most n + slack
    let slack = with_heights.iter().map(|(b, h)| h - lead(b).word.len()).max().unwrap_or(0);
    let c = rank_route(&gens, r, n_max, n_max + slack);
    let basis: Vec<Vector> = with_heights.into_iter().map(|(b, _)| b).collect();
    let mut c_from_basis = vec![BigUint::zero(); n_max + 1];
    for b in &basis {
        let d = lead(b).word.len();
        let mut run = BigUint::zero();
        for n in d..=n_max {
            run += &pow[n - d];
            c_from_basis[n] += &run;
        }
    }
    let leading_tags = basis.iter().map(|b| format!("e{}·{}", lead(b).gen + 1, lead(b).word)).collect();

    let quotient = NormalFormModule::new(free, basis);
    let images: Vec<Vector> = free.generators().into_iter().map(|g| quotient.normal_form(g)).collect();
    let g_m: Vec<BigUint> = if images.iter().all(|v| v.is_zero()) {
        vec![BigUint::zero(); n_max + 1]
    } else {
        module_growth(&quotient, &images, n_max, usize::MAX, exec)?.g
    };

    let identity_ok = (0..=n_max).all(|n| g_l[n] == &g_m[n] + &c[n]);
    let routes_agree = c == c_from_basis;
    let ratios = (0..=n_max)
        .map(|n| Rational::new(c[n].clone().into(), g_l[n].clone().into()))
        .collect();
    Ok(CogrowthReport { rank: r, s, g_l, g_m, c, c_from_basis, identity_ok, routes_agree, ratios, leading_tags })
}

/// `dim(N ∩ B(n))` for `n <= n_max` from the echelon form of
/// `span{p·u : deg(p·u) <= top}`, whose rows with leading degree `<= n`
/// span `N ∩ B(n)` once `top` is large enough. Built degree by degree,
/// acting only on new rows.
fn rank_route(gens: &[Vector], r: u32, n_max: usize, top: usize) -> Vec<BigUint> {
    let mut ech = super::Echelon::new();
    let mut frontier: Vec<Vector> = Vec::new();
    for e in 0..=top {
        let mut next = Vec::new();
        for v in &frontier {
            for k in 1..=r {
                let img = times_word(v, &MonoidWord::from_gens(&[k]));
                if ech.insert(img.clone()) {
                    next.push(img);
                }
            }
        }
        for g in gens.iter().filter(|g| lead(g).word.len() == e) {
            if ech.insert(g.clone()) {
                next.push(g.clone());
            }
        }
        frontier = next;
    }
    (0..=n_max).map(|n| BigUint::from(ech.count_pivots(|t: &FreeTag| t.word.len() <= n))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmod::Poly;
    use crate::rational::int;

    fn w(g: &[u32]) -> MonoidWord {
        MonoidWord::from_gens(g)
    }

    fn u64s(v: &[BigUint]) -> Vec<u64> {
        v.iter().map(|x| x.try_into().unwrap()).collect()
    }

    #[test]
    fn principal_monomial_ideal() {
        let f = FreeModule { rank: 2, s: 1 };
        let rep = cogrowth(&[f.embed(0, &Poly::unit(w(&[1])))], 2, 1, 6, Exec::auto()).unwrap();
        assert!(rep.identity_ok && rep.routes_agree);
        for n in 1..=6 {
            assert_eq!(u64s(&rep.c)[n], (1 << n) - 1);
            assert_eq!(u64s(&rep.g_m)[n], 1 << n);
        }
    }

    #[test]
    fn zero_submodule() {
        let rep = cogrowth(&[], 2, 1, 5, Exec::auto()).unwrap();
        assert!(rep.identity_ok && rep.routes_agree);
        assert!(rep.c.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn cancelling_leading_terms_are_found() {
        // x1 x2 - x2 and x1 x2 - x1 give x2 - x1 with a lower leading term
        let f = FreeModule { rank: 2, s: 1 };
        let a = Poly::from_terms([(w(&[1, 2]), int(1)), (w(&[2]), int(-1))]);
        let b = Poly::from_terms([(w(&[1, 2]), int(1)), (w(&[1]), int(-1))]);
        let rep = cogrowth(&[f.embed(0, &a), f.embed(0, &b)], 2, 1, 6, Exec::auto()).unwrap();
        assert!(rep.identity_ok && rep.routes_agree, "{rep:?}");
        assert_eq!(u64s(&rep.c)[1], 1);
    }

    #[test]
    fn unit_reached_above_the_generator_degree() {
        // 1 = (1 + x1^2) - (x1 + x1^2) + x1, and x1 needs (1 + x1^2)·x1
        let f = FreeModule { rank: 2, s: 1 };
        let a = Poly::from_terms([(w(&[1]), int(-1)), (w(&[1, 1]), int(-1))]);
        let b = Poly::from_terms([(w(&[]), int(-1)), (w(&[1, 1]), int(-1))]);
        let rep = cogrowth(&[f.embed(0, &a), f.embed(0, &b)], 2, 1, 6, Exec::auto()).unwrap();
        assert!(rep.identity_ok && rep.routes_agree, "{rep:?}");
        assert!(rep.g_m.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn whole_module_and_rank_two() {
        let f = FreeModule { rank: 2, s: 2 };
        let one = f.embed(1, &Poly::unit(MonoidWord::empty()));
        let mixed = f.embed(0, &Poly::unit(w(&[2, 2]))).sum(&f.embed(1, &Poly::unit(w(&[1]))));
        let rep = cogrowth(&[one, mixed], 2, 2, 5, Exec::auto()).unwrap();
        assert!(rep.identity_ok && rep.routes_agree, "{rep:?}");
        assert_eq!(u64s(&rep.g_m), vec![1, 3, 6, 12, 24, 48]);
    }
}

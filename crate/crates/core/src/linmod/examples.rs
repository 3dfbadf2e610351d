//! Two cyclic modules given by rule tables. In the first, `M = ε_1 R` has
//! a cyclic submodule `N = η_1 R` with `N` and `M/N` of linear growth while
//! `M` grows faster than `α(n) r^n`. In the second, `M` grows faster than
//! `α(n) r^n` but one relation `ε_1 x_1^m = 0` makes it finite-dimensional.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use super::{generates_support, module_ball, RuleModule, SparseVec, TagQuotient};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::rational::{self, Rational};
use crate::words::{Letter, MonoidWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleKind {
    /// Linear submodule and quotient, fast-growing module.
    Extension,
    /// No infinite-dimensional nil quotients.
    NoNil,
}

impl std::str::FromStr for ExampleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<ExampleKind> {
        match s {
            "extension" => Ok(ExampleKind::Extension),
            "no-nil" | "nonil" => Ok(ExampleKind::NoNil),
            _ => Err(Error::Input(format!("unknown example kind {s:?} (extension | no-nil)"))),
        }
    }
}

/// Basis tags. `Eta { i, offset }` is `η_{φ(i) + offset}` with
/// `φ(i) + offset < φ(i + 1)`, so the astronomically large `φ(i)` never
/// has to be materialized as an index.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum ExtTag {
    Eps(u64),
    Eta { i: usize, offset: u64 },
    Zeta(usize, MonoidWord),
    Xi(usize, MonoidWord),
}

#[derive(Clone, Debug)]
pub struct ExtensionModule {
    pub kind: ExampleKind,
    pub r: u32,
    /// `d_1 < d_2 < ...`, 1-based in the rules.
    pub d: Vec<usize>,
    /// `φ(i + 1) - φ(i)` for consecutive known indices.
    gaps: Vec<BigUint>,
}

pub fn build_extension_example(kind: ExampleKind, r: u32, d: &[usize]) -> Result<ExtensionModule> {
    if r < 2 {
        return Err(Error::Rank { rank: r, min: 2 });
    }
    if d.is_empty() || d[0] == 0 || d.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("d must be a nonempty strictly increasing sequence of positive integers".into()));
    }
    let mut m = ExtensionModule { kind, r, d: d.to_vec(), gaps: Vec::new() };
    m.gaps = (1..d.len()).map(|i| m.phi(i + 1) - m.phi(i)).collect();
    Ok(m)
}

impl ExtensionModule {
    /// `φ(1) = 1`, `φ(i) = 4 r^{d_i}`.
    pub fn phi(&self, i: usize) -> BigUint {
        if i == 1 {
            BigUint::one()
        } else {
            BigUint::from(4u32) * rational::upow(self.r as u64, self.d[i - 1])
        }
    }

    fn d_of(&self, i: usize) -> Result<usize> {
        self.d.get(i - 1).copied().ok_or_else(|| {
            Error::Budget(format!("index {i} needs d_{i} but only {} terms were given", self.d.len()))
        })
    }

    pub fn generator(&self) -> SparseVec<ExtTag> {
        SparseVec::unit(ExtTag::Eps(1))
    }

    /// `η_1`, generating the linear submodule of the extension example.
    pub fn eta_one(&self) -> SparseVec<ExtTag> {
        SparseVec::unit(ExtTag::Eta { i: 1, offset: 0 })
    }

    fn eta_next(&self, i: usize, offset: u64) -> Result<ExtTag> {
        let next = BigUint::from(offset + 1);
        match self.gaps.get(i - 1) {
            Some(gap) if &next == gap => Ok(ExtTag::Eta { i: i + 1, offset: 0 }),
            Some(_) => Ok(ExtTag::Eta { i, offset: offset + 1 }),
            None => {
                // φ(i + 1) >= 4 r^{d_i + 1}, so offsets below that gap are safe
                let min_gap = BigUint::from(4u32) * rational::upow(self.r as u64, self.d[i - 1] + 1) - self.phi(i);
                if next < min_gap {
                    Ok(ExtTag::Eta { i, offset: offset + 1 })
                } else {
                    Err(Error::Budget(format!("η index past φ({i}) + {offset} needs more terms of d")))
                }
            }
        }
    }

    /// The step function `α` the module is built for: `r^{-(j+2)}` for the
    /// extension example and `r^{-(j+1)}` for the other, where `j` counts
    /// the `d_i <= n`.
    pub fn alpha(&self, n: usize) -> Rational {
        let j = self.d.iter().filter(|&&di| di <= n).count() as i64;
        let shift = match self.kind {
            ExampleKind::Extension => 2,
            ExampleKind::NoNil => 1,
        };
        rational::pow(&Rational::from_integer(self.r.into()), -(j + shift))
    }

    /// `M/N` with `N = η_1 R` spanned by all `η` and `ζ` tags.
    pub fn quotient_by_eta(&self) -> TagQuotient<'_, Self> {
        TagQuotient::new(self, |t: &ExtTag| matches!(t, ExtTag::Eta { .. } | ExtTag::Zeta(..)))
    }

    /// `M / ε_1 x_1^m R`; that submodule is spanned by `ε_i`, `ξ_{i,u}`
    /// with `i > m`.
    pub fn nil_quotient(&self, m: u64) -> TagQuotient<'_, Self> {
        TagQuotient::new(self, move |t: &ExtTag| match t {
            ExtTag::Eps(i) => *i > m,
            ExtTag::Xi(i, _) => *i as u64 > m,
            _ => false,
        })
    }
}

impl RuleModule for ExtensionModule {
    type Tag = ExtTag;

    fn rank(&self) -> u32 {
        self.r
    }

    fn act(&self, tag: &ExtTag, x: Letter) -> Result<SparseVec<ExtTag>> {
        let k = x.generator();
        if !x.is_positive() || k == 0 || k > self.r {
            return Err(Error::LetterOutOfRange { letter: x.value() as i64, rank: self.r });
        }
        let unit = SparseVec::unit;
        Ok(match (self.kind, tag) {
            (_, ExtTag::Eps(i)) if k == 1 => unit(ExtTag::Eps(i + 1)),
            (ExampleKind::Extension, ExtTag::Eps(i)) if k == 2 => {
                self.d_of(*i as usize)?;
                let mut v = unit(ExtTag::Eps(*i));
                v.add_term(ExtTag::Eta { i: *i as usize, offset: 0 }, Rational::one());
                v
            }
            (ExampleKind::NoNil, ExtTag::Eps(i)) if k == 2 => {
                self.d_of(*i as usize)?;
                unit(ExtTag::Xi(*i as usize, MonoidWord::empty()))
            }
            (_, ExtTag::Eps(_)) => SparseVec::zero(),
            (_, ExtTag::Eta { i, offset }) => match k {
                1 => unit(self.eta_next(*i, *offset)?),
                2 if *offset == 0 => unit(ExtTag::Zeta(*i, MonoidWord::empty())),
                _ => SparseVec::zero(),
            },
            (_, ExtTag::Zeta(i, u)) => {
                if u.len() < self.d_of(*i)? {
                    unit(ExtTag::Zeta(*i, u.pushed(k)))
                } else {
                    SparseVec::zero()
                }
            }
            (_, ExtTag::Xi(i, u)) => {
                if u.len() < self.d_of(*i)? {
                    unit(ExtTag::Xi(*i, u.pushed(k)))
                } else {
                    SparseVec::zero()
                }
            }
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionReport {
    pub kind: ExampleKind,
    pub r: u32,
    pub d: Vec<usize>,
    /// Ball dimensions of `M = ε_1 R`.
    pub g_m: Vec<usize>,
    /// `α(n)` as `"p/q"`.
    pub alpha: Vec<String>,
    /// `g_M(n) > α(n) r^n` at every `n >= d_1` (extension) or every `n`.
    pub alpha_bound_ok: bool,
    /// The ball generates every tag it touches.
    pub cyclic: bool,
    /// Ball dimensions of `M/N` (extension) or `M / ε_1 x_1^m R`.
    pub g_quotient: Vec<usize>,
    /// Ball dimensions of `N = η_1 R` (extension only).
    pub g_sub: Vec<usize>,
    /// `g_N(n) < 2n + 1` wherever `n >= 4 r^{d_2}` was reached.
    pub sub_linear_ok: Option<bool>,
    /// First radius from which the nil quotient's dimensions are constant.
    pub stable_from: Option<usize>,
}

impl ExtensionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl ExtensionModule {
    /// Computes the balls of `M`, of the quotient, and of `N`, to radii
    /// `n`, `n` and `n_sub`. `m` is the nil relation exponent.
    pub fn report(&self, n: usize, n_sub: usize, m: u64, budget: usize, exec: Exec) -> Result<ExtensionReport> {
        let ball = module_ball(self, &[self.generator()], n, budget, exec)?;
        let g_m = ball.dims.clone();
        let rpow = |k: usize| Rational::from_integer(rational::upow(self.r as u64, k).into());
        let start = match self.kind {
            ExampleKind::Extension => self.d[0],
            ExampleKind::NoNil => 0,
        };
        let alpha_bound_ok =
            (start..=n).all(|k| Rational::from_integer(g_m[k].into()) > self.alpha(k) * rpow(k));
        let alpha = (0..=n).map(|k| rational::format(&self.alpha(k))).collect();
        let cyclic = generates_support(&ball);
        let (g_quotient, g_sub, sub_linear_ok, stable_from) = match self.kind {
            ExampleKind::Extension => {
                let q = self.quotient_by_eta();
                let gq = module_ball(&q, &[self.generator()], n, budget, exec)?.dims;
                let gs = module_ball(self, &[self.eta_one()], n_sub, budget, exec)?.dims;
                let from = self.phi(2.min(self.d.len()));
                let checked: Vec<bool> = gs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| BigUint::from(*k) >= from)
                    .map(|(k, &g)| g < 2 * k + 1)
                    .collect();
                let ok = (!checked.is_empty() && self.d.len() >= 2).then(|| checked.iter().all(|&b| b));
                (gq, gs, ok, None)
            }
            ExampleKind::NoNil => {
                let q = self.nil_quotient(m);
                let gq = module_ball(&q, &[self.generator()], n, budget, exec)?.dims;
                let last = *gq.last().expect("nonempty");
                let stable = gq.iter().position(|&g| g == last).filter(|&p| p < n);
                (gq, Vec::new(), None, stable)
            }
        };
        Ok(ExtensionReport {
            kind: self.kind,
            r: self.r,
            d: self.d.clone(),
            g_m,
            alpha,
            alpha_bound_ok,
            cyclic,
            g_quotient,
            g_sub,
            sub_linear_ok,
            stable_from,
        })
    }
}

/// Lower bound `r^{n-i-1}` on the extension module's ball, `d_{i-1} < n <= d_i`.
pub fn extension_lower_bound(m: &ExtensionModule, n: usize) -> Option<Rational> {
    let i = m.d.iter().position(|&di| n <= di)? + 1;
    if i < 2 {
        return None;
    }
    Some(rational::pow(&Rational::from_integer(m.r.into()), n as i64 - i as i64 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_is_a_line_and_bound_holds() {
        let m = build_extension_example(ExampleKind::Extension, 2, &(1..=13).map(|i| 2 * i).collect::<Vec<_>>()).unwrap();
        let rep = m.report(12, 80, 0, 1 << 20, Exec::auto()).unwrap();
        assert_eq!(rep.g_quotient, (1..=13).collect::<Vec<_>>());
        assert!(rep.alpha_bound_ok, "{:?}", rep.g_m);
        assert!(rep.cyclic);
        assert_eq!(rep.sub_linear_ok, Some(true), "{:?}", rep.g_sub);
        for n in 3..=12 {
            let lb = extension_lower_bound(&m, n).unwrap();
            assert!(Rational::from_integer(rep.g_m[n].into()) >= lb);
        }
    }

    #[test]
    fn eta_offsets_roll_over_at_phi() {
        let m = build_extension_example(ExampleKind::Extension, 2, &[1, 2]).unwrap();
        // φ(2) = 16
        let mut t = ExtTag::Eta { i: 1, offset: 0 };
        for _ in 0..15 {
            t = m.act(&t, Letter::pos(1)).unwrap().leading().unwrap().0.clone();
        }
        assert_eq!(t, ExtTag::Eta { i: 2, offset: 0 });
        let z = m.act(&t, Letter::pos(2)).unwrap();
        assert_eq!(z, SparseVec::unit(ExtTag::Zeta(2, MonoidWord::empty())));
        assert!(m.act(&ExtTag::Eta { i: 1, offset: 3 }, Letter::pos(2)).unwrap().is_zero());
    }

    #[test]
    fn one_nil_relation_makes_it_finite() {
        let m = build_extension_example(ExampleKind::NoNil, 2, &[2, 3, 4, 5, 6, 7, 8, 9, 10, 11]).unwrap();
        let rep = m.report(10, 0, 2, 1 << 20, Exec::auto()).unwrap();
        assert!(rep.alpha_bound_ok, "{:?}", rep.g_m);
        // ε_1, ε_2, ξ_{1,u} (|u| <= 2), ξ_{2,u} (|u| <= 3)
        assert_eq!(*rep.g_quotient.last().unwrap(), 2 + 7 + 15);
        assert!(rep.stable_from.is_some());
        let q = m.nil_quotient(2);
        let rel = m.apply(&m.generator(), &MonoidWord::from_gens(&[1, 1])).unwrap();
        assert!(q.project(&rel).is_zero());
        let ball = module_ball(&m, &[m.generator()], 6, 1 << 20, Exec::auto()).unwrap();
        let tags: Vec<ExtTag> = ball.basis.iter().flat_map(|v| v.keys().cloned().collect::<Vec<_>>()).collect();
        assert!(q.closed_on(&tags).unwrap());
    }

    #[test]
    fn invalid_sequences() {
        assert!(build_extension_example(ExampleKind::Extension, 2, &[3, 3]).is_err());
        assert!(build_extension_example(ExampleKind::NoNil, 1, &[1]).is_err());
        let m = build_extension_example(ExampleKind::NoNil, 2, &[1, 2]).unwrap();
        assert!(matches!(m.report(5, 0, 9, 1 << 20, Exec::auto()), Err(Error::Budget(_))));
    }
}

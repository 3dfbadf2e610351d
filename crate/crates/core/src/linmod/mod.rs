//! Right modules over the free associative algebra (and, through signed
//! letters, over the free group algebra) with exact ball dimensions:
//! growth, co-growth, the extension examples, the Golod bound and the nil
//! quotient step, and the quasi-monomial module.

mod cogrowth;
mod examples;
mod golod;
mod poly;
mod quasi;
mod sparse;
mod table;

pub use cogrowth::{cogrowth, prefix_basis, CogrowthReport, NormalFormModule};
pub use examples::{
    build_extension_example, extension_lower_bound, ExampleKind, ExtTag, ExtensionModule, ExtensionReport,
};
pub use golod::{golod_bound_check, nil_q, nil_step, GolodReport, NilStepInput, NilStepReport};
pub use poly::{
    degree, is_homogeneous, mono_mul, poly_from_json, poly_mul, poly_times_word, poly_to_json, power_components,
    word_times_poly, Poly,
};
pub use quasi::{
    build_t991, from_quasi, quasi_convert, quasi_expand, shortlex_index, Alpha, DRule, QuasiModule, T991Report,
    Witness,
};
pub use sparse::{Echelon, SparseVec};
pub use table::{vec_of, TableModule};

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::growth::{validate_series, GrowthSeries, SeriesKind};
use crate::growth::LazyCosetGraph;
use crate::par::{self, Exec};
use crate::stallings::CoreAutomaton;
use crate::words::{Letter, MonoidWord};

/// A module with a countable basis of tags and the action of each letter
/// on each tag given by a rule.
pub trait RuleModule: Sync {
    type Tag: Ord + Clone + Hash + Debug + Send + Sync;

    fn rank(&self) -> u32;

    /// Monoid modules are acted on by `x_1..x_r`; group modules by the
    /// `2r` signed letters.
    fn kind(&self) -> SeriesKind {
        SeriesKind::Monoid
    }

    fn act(&self, tag: &Self::Tag, x: Letter) -> Result<SparseVec<Self::Tag>>;

    fn letters(&self) -> Vec<Letter> {
        let r = self.rank() as i32;
        match self.kind() {
            SeriesKind::Monoid => (1..=r).map(|k| Letter::pos(k as u32)).collect(),
            SeriesKind::Group => (1..=r).flat_map(|k| [Letter::pos(k as u32), Letter::pos(k as u32).inverse()]).collect(),
        }
    }

    fn act_vec(&self, v: &SparseVec<Self::Tag>, x: Letter) -> Result<SparseVec<Self::Tag>> {
        v.map_linear(|t| self.act(t, x))
    }

    fn apply(&self, v: &SparseVec<Self::Tag>, w: &MonoidWord) -> Result<SparseVec<Self::Tag>> {
        w.letters().iter().try_fold(v.clone(), |v, &x| self.act_vec(&v, x))
    }
}

/// The ball `span{a·u : a in gens, |u| <= n}` built radius by radius.
pub struct Ball<K: Ord> {
    pub echelon: Echelon<K>,
    pub dims: Vec<usize>,
    /// The vectors that were independent when inserted, in order.
    pub basis: Vec<SparseVec<K>>,
}

/// Grows the ball one radius at a time. Only the vectors that enlarged the
/// previous ball need to be acted on: `B(n)X ⊆ B(n) + (B(n) \ B(n-1))X`.
pub fn module_ball<M: RuleModule>(
    m: &M,
    gens: &[SparseVec<M::Tag>],
    n_max: usize,
    budget: usize,
    exec: Exec,
) -> Result<Ball<M::Tag>> {
    let letters = m.letters();
    let mut echelon = Echelon::new();
    let mut basis = Vec::new();
    let mut frontier = Vec::new();
    for g in gens {
        if echelon.insert(g.clone()) {
            frontier.push(g.clone());
        }
    }
    if echelon.rank() == 0 {
        return Err(Error::Precondition("generators span the zero module".into()));
    }
    basis.extend(frontier.iter().cloned());
    let mut dims = vec![echelon.rank()];
    for _ in 1..=n_max {
        let images: Vec<Result<SparseVec<M::Tag>>> =
            par::flat_map(exec, &frontier, |v| letters.iter().map(|&x| m.act_vec(v, x)).collect());
        let mut next = Vec::new();
        for img in images {
            let img = img?;
            if echelon.insert(img.clone()) {
                next.push(img);
            }
        }
        if echelon.rank() > budget {
            return Err(Error::Budget(format!("ball dimension {} exceeds {budget}", echelon.rank())));
        }
        basis.extend(next.iter().cloned());
        dims.push(echelon.rank());
        frontier = next;
    }
    Ok(Ball { echelon, dims, basis })
}

/// Ball dimensions `g(0..=n_max)` of the submodule generated by `gens`,
/// checked against the sphere inequalities.
pub fn module_growth<M: RuleModule>(
    m: &M,
    gens: &[SparseVec<M::Tag>],
    n_max: usize,
    budget: usize,
    exec: Exec,
) -> Result<GrowthSeries> {
    let ball = module_ball(m, gens, n_max, budget, exec)?;
    dims_to_series(m.kind(), m.rank(), &ball.dims)
}

pub(crate) fn dims_to_series(kind: SeriesKind, rank: u32, dims: &[usize]) -> Result<GrowthSeries> {
    let s = GrowthSeries::new(kind, rank, dims.iter().map(|&d| BigUint::from(d)).collect());
    let rep = validate_series(&s);
    match rep.violation {
        None => Ok(s),
        Some(v) => Err(Error::Postcondition(format!("dimension series fails {} at n = {}: {}", v.rule, v.n, v.detail))),
    }
}

/// Whether every basis tag occurring in the ball's vectors lies in the
/// ball, so the generators span the region they touch.
pub fn generates_support<K: Ord + Clone>(ball: &Ball<K>) -> bool {
    ball.basis.iter().all(|v| v.keys().all(|k| ball.echelon.contains(&SparseVec::unit(k.clone()))))
}

/// A basis element `(gen, word)` of the free module of rank `s`, ordered by
/// word (ShortLex) first so that leading terms have the highest degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FreeTag {
    pub word: MonoidWord,
    pub gen: usize,
}

impl FreeTag {
    pub fn new(gen: usize, word: MonoidWord) -> FreeTag {
        FreeTag { word, gen }
    }
}

/// The free right module `⊕_{i<s} e_i R` over `R = k<x_1..x_r>`.
#[derive(Clone, Copy, Debug)]
pub struct FreeModule {
    pub rank: u32,
    pub s: usize,
}

impl FreeModule {
    pub fn generators(&self) -> Vec<SparseVec<FreeTag>> {
        (0..self.s).map(|i| SparseVec::unit(FreeTag::new(i, MonoidWord::empty()))).collect()
    }

    /// Embeds a polynomial of `R` as `e_gen · p`.
    pub fn embed(&self, gen: usize, p: &Poly) -> SparseVec<FreeTag> {
        SparseVec::from_terms(p.iter().map(|(w, c)| (FreeTag::new(gen, w.clone()), c.clone())))
    }
}

impl RuleModule for FreeModule {
    type Tag = FreeTag;

    fn rank(&self) -> u32 {
        self.rank
    }

    fn act(&self, tag: &FreeTag, x: Letter) -> Result<SparseVec<FreeTag>> {
        if !x.is_positive() || x.generator() > self.rank {
            return Err(Error::LetterOutOfRange { letter: x.value() as i64, rank: self.rank });
        }
        Ok(SparseVec::unit(FreeTag::new(tag.gen, tag.word.pushed(x.generator()))))
    }
}

/// `M/K` where `K` is spanned by the tags with `kill(tag)`; correct only
/// when those tags span a submodule, which [`TagQuotient::closed_on`]
/// checks on a sample.
pub struct TagQuotient<'a, M: RuleModule> {
    pub inner: &'a M,
    pub kill: Box<dyn Fn(&M::Tag) -> bool + Sync + 'a>,
}

impl<'a, M: RuleModule> TagQuotient<'a, M> {
    pub fn new(inner: &'a M, kill: impl Fn(&M::Tag) -> bool + Sync + 'a) -> Self {
        TagQuotient { inner, kill: Box::new(kill) }
    }

    /// Every killed tag in `tags` is sent into the killed span.
    pub fn closed_on(&self, tags: &[M::Tag]) -> Result<bool> {
        for t in tags.iter().filter(|t| (self.kill)(t)) {
            for x in self.inner.letters() {
                if self.inner.act(t, x)?.keys().any(|k| !(self.kill)(k)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn project(&self, v: &SparseVec<M::Tag>) -> SparseVec<M::Tag> {
        v.filtered(|k| !(self.kill)(k))
    }
}

impl<'a, M: RuleModule> RuleModule for TagQuotient<'a, M> {
    type Tag = M::Tag;

    fn rank(&self) -> u32 {
        self.inner.rank()
    }

    fn kind(&self) -> SeriesKind {
        self.inner.kind()
    }

    fn act(&self, tag: &M::Tag, x: Letter) -> Result<SparseVec<M::Tag>> {
        Ok(self.project(&self.inner.act(tag, x)?))
    }
}

/// The permutation module of the free group on the cosets of a subgroup:
/// the basis is the vertex set of the coset graph.
pub struct PermutationModule<'a> {
    graph: LazyCosetGraph<'a>,
}

impl<'a> PermutationModule<'a> {
    pub fn new(core: &'a CoreAutomaton) -> Self {
        PermutationModule { graph: LazyCosetGraph::new(core) }
    }

    pub fn base(&self) -> SparseVec<crate::growth::Node> {
        SparseVec::unit(self.graph.base())
    }
}

impl<'a> RuleModule for PermutationModule<'a> {
    type Tag = crate::growth::Node;

    fn rank(&self) -> u32 {
        self.graph.core.rank()
    }

    fn kind(&self) -> SeriesKind {
        SeriesKind::Group
    }

    fn act(&self, tag: &Self::Tag, x: Letter) -> Result<SparseVec<Self::Tag>> {
        Ok(SparseVec::unit(self.graph.step(tag, x)))
    }
}

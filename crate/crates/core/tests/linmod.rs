use maxgrowth::growth::{validate_series, SeriesKind};
use maxgrowth::linmod::{
    build_extension_example, build_t991, cogrowth, from_quasi, golod_bound_check, module_ball, module_growth,
    quasi_convert, Alpha, DRule, ExampleKind, FreeModule, Poly, QuasiModule, RuleModule, SparseVec,
};
use maxgrowth::par::Exec;
use maxgrowth::rational::{int, rat, Rational};
use maxgrowth::words::MonoidWord;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn poly_strategy(max_deg: usize, homogeneous: Option<usize>) -> impl Strategy<Value = Poly> {
    let word = match homogeneous {
        Some(d) => prop::collection::vec(1u32..=2, d..=d).boxed(),
        None => prop::collection::vec(1u32..=2, 0..=max_deg).boxed(),
    };
    prop::collection::vec((word, -4i64..=4, 1i64..=3), 1..=3).prop_map(|terms| {
        Poly::from_terms(terms.into_iter().map(|(w, p, q)| (MonoidWord::from_gens(&w), rat(p, q))))
    })
}

fn u64s(v: &[num_bigint::BigUint]) -> Vec<u64> {
    v.iter().map(|x| x.to_u64().unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn cogrowth_routes_agree(gens in prop::collection::vec(poly_strategy(3, None), 0..=3)) {
        let f = FreeModule { rank: 2, s: 1 };
        let sub: Vec<_> = gens.iter().map(|p| f.embed(0, p)).collect();
        let rep = cogrowth(&sub, 2, 1, 6, Exec::auto()).unwrap();
        prop_assert!(rep.identity_ok);
        prop_assert!(rep.routes_agree);
        let gm = maxgrowth::growth::GrowthSeries::new(SeriesKind::Monoid, 2, rep.g_m.clone());
        if !rep.g_m[0].is_zero() {
            prop_assert!(validate_series(&gm).ok);
        }
    }

    #[test]
    fn quasi_round_trip(p in poly_strategy(5, None), shift in -3i64..=3) {
        let a = Alpha::Affine { scale: int(1), shift: vec![int(shift), rat(1, 2)] };
        let e = quasi_convert(&p, &a).unwrap();
        prop_assert_eq!(from_quasi(&e, &a).unwrap(), p.clone());
        prop_assert_eq!(e.leading().map(|(v, _)| v.clone()), p.leading().map(|(v, _)| v.clone()));
    }

    #[test]
    fn golod_bound_holds(ps in prop::collection::vec((1usize..=4).prop_flat_map(|d| poly_strategy(d, Some(d))), 0..=4)) {
        let rep = golod_bound_check(&ps, 2, 8).unwrap();
        prop_assert!(rep.ok);
    }
}

#[test]
fn cogrowth_of_the_quasi_monomial_ideal_has_bounded_ratio() {
    let m = QuasiModule::new(2, Alpha::index(2), Some(DRule::Shift(1))).unwrap();
    let f = FreeModule { rank: 2, s: 1 };
    let gens: Vec<_> = m
        .forbidden(7)
        .unwrap()
        .iter()
        .map(|l| f.embed(0, &maxgrowth::linmod::quasi_expand(l, &m.alpha).unwrap()))
        .collect();
    let rep = cogrowth(&gens, 2, 1, 7, Exec::auto()).unwrap();
    assert!(rep.identity_ok && rep.routes_agree);
    assert!(rep.max_ratio() < rat(1, 2), "{}", rep.to_json());
    let (_, t) = build_t991(2, Alpha::index(2), DRule::Shift(1), 7, 7, 0, 0).unwrap();
    assert_eq!(rep.g_m.iter().map(|x| x.to_string()).collect::<Vec<_>>(), t.g);
}

#[test]
fn codimension_one_submodule_keeps_the_growth() {
    // N = M Δ_1 is spanned by the surviving e_v with |v| >= 1, codimension 1
    let m = QuasiModule::new(2, Alpha::index(2), Some(DRule::Shift(1))).unwrap();
    let gm = module_ball(&m, &[m.generator()], 8, 1 << 20, Exec::auto()).unwrap().dims;
    let n_gens: Vec<_> = [1u32, 2]
        .iter()
        .map(|&j| MonoidWord::from_gens(&[j]))
        .filter(|v| !m.killed(v).unwrap())
        .map(SparseVec::unit)
        .collect();
    let gn = module_ball(&m, &n_gens, 8, 1 << 20, Exec::auto()).unwrap().dims;
    for n in 0..=8 {
        assert!(gn[n] + 1 >= gm[n], "n = {n}: {} vs {}", gn[n], gm[n]);
    }
    // M/N is one-dimensional, so N must carry the maximal growth
    assert!(gn[8] as u64 > 1 << 8);
}

#[test]
fn linear_pieces_do_not_make_the_extension_maximal() {
    let d: Vec<usize> = (1..=16).map(|i| 2 * i).collect();
    let m = build_extension_example(ExampleKind::Extension, 2, &d).unwrap();
    let rep = m.report(14, 70, 0, 1 << 22, Exec::auto()).unwrap();
    assert!(rep.alpha_bound_ok && rep.cyclic);
    assert_eq!(rep.sub_linear_ok, Some(true));
    // g_M(n) / 2^n decreases along the sampled radii
    let ratio = |n: usize| Rational::new((rep.g_m[n] as i64).into(), (1i64 << n).into());
    assert!(ratio(14) < ratio(10) && ratio(10) < ratio(6));
}

#[test]
fn every_module_series_obeys_the_sphere_bound() {
    let q = QuasiModule::new(3, Alpha::index(3), Some(DRule::Shift(2))).unwrap();
    let s = module_growth(&q, &[q.generator()], 6, 1 << 20, Exec::auto()).unwrap();
    assert!(validate_series(&s).ok);
    let x = build_extension_example(ExampleKind::NoNil, 3, &[1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
    let s = module_growth(&x, &[x.generator()], 7, 1 << 20, Exec::auto()).unwrap();
    assert!(validate_series(&s).ok);
    assert_eq!(u64s(&s.g)[..2], [1, 3]);
    assert_eq!(q.rank(), 3);
}

#[test]
fn sequential_and_parallel_balls_agree() {
    let m = QuasiModule::new(2, Alpha::index(2), Some(DRule::Shift(1))).unwrap();
    let a = module_growth(&m, &[m.generator()], 9, 1 << 20, Exec::Sequential).unwrap();
    let b = module_growth(&m, &[m.generator()], 9, 1 << 20, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}

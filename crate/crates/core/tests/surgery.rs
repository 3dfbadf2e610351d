use maxgrowth::growth::orbit_length;
use maxgrowth::rational::{rat, Rational};
use maxgrowth::stallings::CoreAutomaton;
use maxgrowth::surgery::{
    adjoin_power, attach_elementary, link_tuples, power_orbit, tower, ElementaryKind, ElementarySpec, PowerOrbit,
    TowerRequest,
};
use maxgrowth::words::{sample_reduced, sample_rng, Alphabet, GroupWord};
use num_traits::Zero;
use proptest::prelude::*;

fn w(t: &str) -> GroupWord {
    GroupWord::parse(t, Alphabet::new(2).unwrap()).unwrap()
}

fn core_of(text: &[&str]) -> CoreAutomaton {
    CoreAutomaton::build(&text.iter().map(|t| w(t)).collect::<Vec<_>>(), 2).unwrap()
}

fn with_generator(core: &CoreAutomaton, g: &GroupWord) -> CoreAutomaton {
    let mut basis = core.schreier_basis();
    basis.push(g.clone());
    CoreAutomaton::build(&basis, core.rank()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn adjoined_power_is_the_subgroup_join(seed in 0u64..10_000, len in 1usize..5) {
        let h = core_of(&["a b A"]);
        let g = sample_reduced(len, 2, &mut sample_rng(seed, 0));
        prop_assume!(power_orbit(&h, &g).unwrap() == PowerOrbit::Free);
        let eps = rat(1, 8);
        let p = adjoin_power(&h, &g, &eps).unwrap();
        let gn = g.pow(p.n as i64);
        prop_assert!(p.core.membership(&gn));
        prop_assert!(h.embed_check(&p.core).is_ok());
        prop_assert_eq!(p.core.subgroup_rank(), h.subgroup_rank() + 1);
        prop_assert!(p.delta >= Rational::zero() && p.delta <= eps);
        prop_assert_eq!(&h.deficit() - &p.core.deficit(), p.delta.clone());
        prop_assert_eq!(p.core.clone(), with_generator(&h, &gn));
        prop_assert!(p.core.index().is_none());
    }

    #[test]
    fn linked_cosets_coincide(seed in 0u64..10_000) {
        let h = core_of(&["a b A"]);
        let mut rng = sample_rng(seed, 1);
        let from: Vec<GroupWord> = (0..2).map(|_| sample_reduced(3, 2, &mut rng)).collect();
        let to: Vec<GroupWord> = (0..2).map(|_| sample_reduced(3, 2, &mut rng)).collect();
        let distinct = |xs: &[GroupWord]| !h.membership(&xs[0].mul(&xs[1].inverse()));
        prop_assume!(distinct(&from) && distinct(&to));
        let k = link_tuples(&h, &from, &to, &rat(1, 8), seed).unwrap();
        for (g, g2) in from.iter().zip(&to) {
            prop_assert!(k.core.membership(&g.mul(&k.b).mul(&g2.inverse())));
        }
        prop_assert!(h.embed_check(&k.core).is_ok());
        prop_assert!(k.delta >= Rational::zero() && k.delta <= rat(1, 8));
    }
}

#[test]
fn attached_cycle_adds_its_label() {
    let h = core_of(&["a b A"]);
    let spec = ElementarySpec { kind: ElementaryKind::Cycle, at: 0, label: w("b b") };
    let a = attach_elementary(&h, &spec).unwrap();
    assert_eq!(a.core, with_generator(&h, &w("b b")));
    assert_eq!(a.delta, h.deficit() - a.core.deficit());
    let leg = ElementarySpec { kind: ElementaryKind::CycleWithLeg { leg: w("B") }, at: 0, label: w("a a a") };
    let a = attach_elementary(&h, &leg).unwrap();
    assert_eq!(a.generator, w("B a a a b"));
    assert_eq!(a.core, with_generator(&h, &a.generator));
    let arc = ElementarySpec { kind: ElementaryKind::Arc { to: 1 }, at: 0, label: w("b b A") };
    let a = attach_elementary(&h, &arc).unwrap();
    assert!(a.core.membership(&a.generator));
    assert_eq!(a.core.subgroup_rank(), 2);
    // the first letter is already used at the base
    assert!(attach_elementary(&h, &ElementarySpec { kind: ElementaryKind::Cycle, at: 0, label: w("a b") }).is_err());
}

#[test]
fn epsilon_and_orbit_preconditions() {
    let h = core_of(&["a b A"]);
    assert!(adjoin_power(&h, &w("a"), &rat(0, 1)).is_err());
    assert!(adjoin_power(&h, &w("a"), &rat(4, 1)).is_err());
    // a b A already lies in H
    assert!(adjoin_power(&h, &w("a b A"), &rat(1, 8)).is_err());
    assert_eq!(power_orbit(&core_of(&["a a a"]), &w("a")).unwrap(), PowerOrbit::Periodic(3));
    assert!(adjoin_power(&core_of(&["a", "b"]), &w("a"), &rat(1, 8)).is_err());
}

#[test]
fn five_stage_tower_keeps_half_the_deficit() {
    let base = core_of(&["a b A"]);
    let plan = vec![
        TowerRequest::Power(w("a")),
        TowerRequest::Power(w("a b")),
        TowerRequest::Link { from: vec![w("a"), w("b")], to: vec![w("b"), w("a")] },
        TowerRequest::Power(w("a B")),
        TowerRequest::Power(w("b b a")),
    ];
    let t = tower(&base, &plan, 11).unwrap();
    let half = base.deficit() / rat(2, 1);
    assert_eq!(t.steps.len(), 5);
    for c in &t.cores {
        assert!(c.deficit() > half);
    }
    let last = t.final_core();
    for g in ["a", "a b", "a B", "b b a"] {
        assert!(orbit_length(last, &GroupWord::empty(), &w(g), 1 << 20).is_some(), "{g}");
    }
    let link = &t.steps[2];
    let b = GroupWord::parse(&link.n_or_b, Alphabet::new(2).unwrap()).unwrap();
    assert!(last.membership(&w("a").mul(&b).mul(&w("B"))));
    assert!(last.membership(&w("b").mul(&b).mul(&w("A"))));
    for pair in t.cores.windows(2) {
        assert!(pair[0].embed_check(&pair[1]).is_ok());
    }
}

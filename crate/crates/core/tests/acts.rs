use maxgrowth::acts::{act_growth, build_k_transitive, build_prescribed, Act, TableAct};
use maxgrowth::growth::validate_series;
use maxgrowth::par::Exec;
use maxgrowth::words::MonoidWord;
use num_bigint::BigUint;
use proptest::prelude::*;

/// `d_0 >= 1` and `d_{n+1} <= r d_n`, capped to keep tables small.
fn admissible(r: u32, len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0.0f64..=1.0, len).prop_map(move |fracs| {
        let mut d = vec![1 + (fracs[0] * 2.0) as u64];
        for f in &fracs[1..] {
            let top = (r as u64 * d.last().unwrap()).min(200);
            d.push((f * top as f64).round() as u64);
        }
        d
    })
}

fn word(gens: &[u32]) -> MonoidWord {
    MonoidWord::from_gens(gens)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn prescribed_balls_are_the_partial_sums((r, d) in (2u32..=3).prop_flat_map(|r| (Just(r), admissible(r, 12)))) {
        let act = build_prescribed(&d, r).unwrap();
        let s = act_growth(&act, d.len() - 1, 1 << 20, Exec::auto()).unwrap();
        let mut sum = 0u64;
        for (n, x) in d.iter().enumerate() {
            sum += x;
            prop_assert_eq!(&s.g[n], &BigUint::from(sum));
        }
        prop_assert!(validate_series(&s).ok);
        prop_assert_eq!(TableAct::from_json(&act.to_json()).unwrap(), act);
    }

    #[test]
    fn k_transitive_action_law(
        s in prop::collection::vec(1u32..=2, 0..7),
        u in prop::collection::vec(1u32..=2, 0..6),
        v in prop::collection::vec(1u32..=2, 0..6),
    ) {
        let act = build_k_transitive(2, 4000).unwrap();
        let (s, u, v) = (word(&s), word(&u), word(&v));
        let whole = act.apply(&s, &u.concat(&v)).unwrap();
        let stepwise = act.apply(&act.apply(&s, &u).unwrap(), &v).unwrap();
        prop_assert_eq!(&whole, &stepwise);
        let letterwise = u.concat(&v).gens().try_fold(s.clone(), |t, g| act.act(&t, g)).unwrap();
        prop_assert_eq!(whole, letterwise);
    }
}

#[test]
fn inadmissible_sequences_are_rejected() {
    assert!(build_prescribed(&[1, 3], 2).is_err());
    assert!(build_prescribed(&[0, 0], 2).is_err());
    assert!(build_prescribed(&[], 2).is_err());
    assert!(build_prescribed(&[2, 4, 9], 2).is_err());
}

#[test]
fn k_transitive_growth_and_witnesses() {
    let act = build_k_transitive(2, 50_000).unwrap();
    let s = act_growth(&act, 12, usize::MAX, Exec::auto()).unwrap();
    for (n, g) in s.g.iter().enumerate() {
        assert!(*g >= BigUint::from(1u64 << n), "n = {n}");
    }
    let checked = act.verify_witnesses(|t| t.k() <= 2 && t.max_len() <= 1, Exec::auto()).unwrap();
    assert!(checked > 0);
}

#[test]
fn witnesses_agree_with_direct_application() {
    let act = build_k_transitive(3, 3000).unwrap();
    for i in 0..40 {
        let (w, ok) = act.transitivity_witness(i).unwrap();
        let t = &act.tuples()[i];
        if !t.active {
            continue;
        }
        assert!(ok, "tuple {i}");
        for (src, dst) in t.sources.iter().zip(&t.targets) {
            let s = word(&src.iter().map(|&g| g as u32).collect::<Vec<_>>());
            let d = word(&dst.iter().map(|&g| g as u32).collect::<Vec<_>>());
            assert_eq!(act.apply(&s, &w).unwrap(), d);
        }
    }
}

#[test]
fn table_loader_rejects_partial_maps() {
    assert!(TableAct::from_json(r#"{"r": 2, "generators": [0], "table": [[0]]}"#).is_err());
    assert!(TableAct::from_json(r#"{"r": 2, "generators": [1], "table": [[0, 0]]}"#).is_err());
    assert!(TableAct::from_json(r#"{"r": 2, "generators": [0], "table": [[0, 2]]}"#).is_err());
}

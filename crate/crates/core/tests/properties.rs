use castor::deciders::backward_reasoning;
use castor::machine::MAX_SYMBOLS;
use castor::{
    decide, simulate, DeciderLimits, Decision, Dir, StateId, Symbol, Transition, TransitionTable,
};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

/// A random table with `n` states and `m` symbols; `holes` allows undefined
/// entries.
fn table(n: usize, m: usize, holes: bool) -> impl Strategy<Value = TransitionTable> {
    let entry =
        (0..m as u8, any::<bool>(), 0..=n as u8, 0..8u8).prop_map(move |(w, right, next, hole)| {
            if holes && hole == 0 {
                return None;
            }
            let dir = if right { Dir::Right } else { Dir::Left };
            let next = if next as usize == n {
                StateId::HALT
            } else {
                StateId(next)
            };
            Some(Transition::new(w, dir, next))
        });
    proptest::collection::vec(entry, n * m).prop_map(move |entries| {
        let mut t = TransitionTable::new(n, m);
        for (i, e) in entries.into_iter().enumerate() {
            t.set(StateId((i / m) as u8), Symbol((i % m) as u8), e);
        }
        t
    })
}

fn any_table() -> impl Strategy<Value = TransitionTable> {
    (1usize..=4, 2usize..=3, any::<bool>()).prop_flat_map(|(n, m, holes)| table(n, m, holes))
}

/// A permutation of `0..n` that keeps 0 in place.
fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|rest| std::iter::once(0).chain(rest).collect())
}

fn limits() -> DeciderLimits {
    DeciderLimits::default().with_max_steps(2000)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mirror_invariance(t in any_table()) {
        let a = simulate(&t, 2000);
        let b = simulate(&t.mirror(), 2000);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!((a.kind, a.steps), (b.kind, b.steps));
                prop_assert_eq!(a.head, -b.head);
            }
            (a, b) => prop_assert_eq!(a, b),
        }
        prop_assert_eq!(decide(&t, &limits()), decide(&t.mirror(), &limits()));
        prop_assert_eq!(t.mirror().mirror(), t);
    }

    #[test]
    fn permutation_invariance((t, p) in any_table().prop_flat_map(|t| {
        let n = t.n_states();
        (Just(t), perm(n))
    })) {
        let u = t.permute_states(&p).unwrap();
        let a = simulate(&t, 2000);
        let b = simulate(&u, 2000);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(castor::SimError::UndefinedTransition { state: s1, symbol: y1, step: k1 }),
             Err(castor::SimError::UndefinedTransition { state: s2, symbol: y2, step: k2 })) => {
                prop_assert_eq!(p[s1.index()], s2.index());
                prop_assert_eq!((y1, k1), (y2, k2));
            }
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
        prop_assert_eq!(decide(&t, &limits()), decide(&u, &limits()));
    }

    #[test]
    fn raising_the_cap_keeps_conclusive_verdicts(t in any_table()) {
        let low = decide(&t, &DeciderLimits::default().with_max_steps(100));
        let high = decide(&t, &DeciderLimits::default().with_max_steps(20_000));
        if low.is_conclusive() {
            prop_assert_eq!(low, high);
        }
    }

    #[test]
    fn backward_proofs_replay(t in (1usize..=4, 2usize..=3).prop_flat_map(|(n, m)| table(n, m, false))) {
        if let Some(proof) = backward_reasoning(&t, 16) {
            prop_assert!(proof.replay(&t));
            prop_assert!(!proof.leaves().is_empty());
            let r = simulate(&t, 100_000);
            prop_assert!(!matches!(r, Ok(r) if r.kind == castor::RunKind::HaltedBlank));
        }
    }

    #[test]
    fn format_parse_round_trip(t in (1usize..=5, 2usize..=MAX_SYMBOLS).prop_flat_map(|(n, m)| table(n, m, true))) {
        let s = t.to_string();
        prop_assert_eq!(castor::parse_machine(&s).unwrap(), t);
    }
}

#[test]
fn halting_verdicts_match_simulation() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..2000 {
        let t = any_table().new_tree(&mut runner).unwrap().current();
        match decide(&t, &limits()) {
            Decision::HaltsBlank(s) | Decision::HaltsDirty(s) => {
                let r = simulate(&t, 2000).unwrap();
                assert_eq!(r.steps, s, "{t}");
            }
            _ => {}
        }
    }
}

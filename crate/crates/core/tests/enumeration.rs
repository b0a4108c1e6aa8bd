use std::collections::{BTreeMap, BTreeSet, HashSet};

use castor::enumerate::{enumerate, Mode};
use castor::{
    parse_machine, simulate, DeciderLimits, Decision, Dir, Reason, RunKind, SimError, StateId,
    Symbol, Transition, TransitionTable,
};
use rand::{Rng, SeedableRng};

fn strict() -> DeciderLimits {
    DeciderLimits::default().with_max_steps(10_000).strict()
}

fn leaves(n: usize, m: usize, mode: Mode, limits: &DeciderLimits) -> Vec<(String, Decision)> {
    let mut out = Vec::new();
    enumerate(n, m, mode, limits, |t, d| out.push((t.to_string(), d)));
    out
}

/// Transition number `code` out of `2m(n+1)` choices.
fn nth_transition(code: usize, n: usize, m: usize) -> Transition {
    let targets = n + 1;
    let next = code % targets;
    let dir = if (code / targets) % 2 == 0 {
        Dir::Right
    } else {
        Dir::Left
    };
    let write = (code / targets / 2) % m;
    let next = if next == n {
        StateId::HALT
    } else {
        StateId(next as u8)
    };
    Transition::new(write as u8, dir, next)
}

fn raw_table(n: usize, m: usize, codes: &[usize]) -> TransitionTable {
    let mut t = TransitionTable::new(n, m);
    for (i, &c) in codes.iter().enumerate() {
        t.set(
            StateId((i / m) as u8),
            Symbol((i % m) as u8),
            Some(nth_transition(c, n, m)),
        );
    }
    t
}

/// Step counts of blank and dirty halts (2 steps or more) reached by raw machines.
fn raw_halt_steps(
    tables: impl Iterator<Item = TransitionTable>,
    cap: u64,
) -> BTreeSet<(RunKind, u64)> {
    let mut out = BTreeSet::new();
    for t in tables {
        if let Ok(r) = simulate(&t, cap) {
            if r.kind != RunKind::Cutoff && r.steps >= 2 {
                out.insert((r.kind, r.steps));
            }
        }
    }
    out
}

fn enumerated_halt_steps(leaves: &[(String, Decision)]) -> BTreeSet<(RunKind, u64)> {
    leaves
        .iter()
        .filter_map(|(_, d)| match *d {
            Decision::HaltsBlank(s) if s >= 2 => Some((RunKind::HaltedBlank, s)),
            Decision::HaltsDirty(s) if s >= 2 => Some((RunKind::HaltedDirty, s)),
            _ => None,
        })
        .collect()
}

#[test]
fn two_state_pruning_loses_nothing() {
    // every raw 2-state machine halts within 6 steps if at all
    let per: usize = 2 * 2 * 3;
    let all = (0..per.pow(4)).map(|mut k| {
        let mut codes = [0; 4];
        for c in codes.iter_mut() {
            *c = k % per;
            k /= per;
        }
        raw_table(2, 2, &codes)
    });
    let raw = raw_halt_steps(all, 100);
    let tree = leaves(2, 2, Mode::Default, &strict());
    assert_eq!(enumerated_halt_steps(&tree), raw);
    let best_raw = raw
        .iter()
        .filter(|(k, _)| *k == RunKind::HaltedBlank)
        .map(|&(_, s)| s)
        .max();
    assert_eq!(best_raw, Some(4));
}

#[test]
fn three_state_sample_stays_within_the_tree() {
    let tree = leaves(3, 2, Mode::Default, &strict());
    let steps = enumerated_halt_steps(&tree);
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let per = 2 * 2 * 4;
    let sample = (0..100_000).map(|_| {
        let codes: Vec<usize> = (0..6).map(|_| rng.gen_range(0..per)).collect();
        raw_table(3, 2, &codes)
    });
    let raw = raw_halt_steps(sample, 100);
    assert!(
        raw.is_subset(&steps),
        "{:?}",
        raw.difference(&steps).collect::<Vec<_>>()
    );
    assert!(raw
        .iter()
        .filter(|(k, _)| *k == RunKind::HaltedBlank)
        .all(|&(_, s)| s <= 12));
}

/// Canonical representative under state renamings that keep A first.
fn canonical(t: &TransitionTable) -> String {
    let n = t.n_states();
    let mut best: Option<String> = None;
    let mut rest: Vec<usize> = (1..n).collect();
    permutations(&mut rest, 0, &mut |p| {
        let perm: Vec<usize> = std::iter::once(0).chain(p.iter().copied()).collect();
        let s = t.permute_states(&perm).unwrap().to_string();
        if best.as_ref().map_or(true, |b| s < *b) {
            best = Some(s);
        }
    });
    best.unwrap()
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

#[test]
fn emitted_machines_are_pairwise_non_isomorphic() {
    for (n, m) in [(3, 2), (2, 3)] {
        let tree = leaves(n, m, Mode::Default, &strict());
        let mut seen = HashSet::new();
        for (s, _) in &tree {
            let t = parse_machine(s).unwrap();
            assert!(
                seen.insert(canonical(&t)),
                "({n},{m}) duplicate class of {s}"
            );
        }
    }
}

/// Replays `t` from the blank tape: every defined entry is used, and states
/// and symbols are introduced in first-use order.
fn check_tnf_shape(t: &TransitionTable, cap: u64) {
    assert_eq!(
        t.get(StateId::START, Symbol::BLANK).unwrap().dir,
        Dir::Right,
        "{t}"
    );
    let mut used = BTreeSet::new();
    let mut next_state = 1;
    let mut next_symbol = 1;
    let mut c = castor::Configuration::start();
    while c.steps < cap {
        let key = (c.state, c.read());
        let Some(tr) = t.get(key.0, key.1) else { break };
        used.insert(key);
        if tr.write.index() == next_symbol {
            next_symbol += 1;
        }
        assert!(tr.write.index() < next_symbol, "{t}");
        if !tr.next.is_halt() {
            if tr.next.index() == next_state {
                next_state += 1;
            }
            assert!(tr.next.index() < next_state, "{t}");
        }
        if c.step(t) != castor::sim::Step::Continue {
            break;
        }
    }
    let defined: BTreeSet<_> = t.defined().map(|(st, sy, _)| (st, sy)).collect();
    assert!(defined.is_subset(&used), "{t}");
}

#[test]
fn tnf_shape_of_emitted_machines() {
    let cap = 300;
    let limits = DeciderLimits::default().with_max_steps(cap);
    for (n, m) in [(3, 2), (2, 3), (4, 2)] {
        let mut count = 0u64;
        enumerate(n, m, Mode::Default, &limits, |t, _| {
            count += 1;
            if n < 4 || count % 97 == 0 {
                check_tnf_shape(t, cap);
            }
        });
        assert!(count > 0);
    }
}

#[test]
fn write_one_mode_keeps_only_the_one_first_subtree() {
    let limits = strict();
    let default: BTreeMap<String, Decision> =
        leaves(3, 2, Mode::Default, &limits).into_iter().collect();
    let write_one = leaves(3, 2, Mode::WriteOne, &limits);
    assert!(!write_one.is_empty());
    for (s, d) in &write_one {
        assert_eq!(default.get(s), Some(d), "{s}");
        assert!(s.starts_with("1RB"));
    }
    let expected = default.keys().filter(|s| s.starts_with("1RB")).count();
    assert_eq!(write_one.len(), expected);
}

/// Re-simulates a reservoir sample of machines flagged by an exact decider
/// during a search. Escape verdicts are left out of the sample.
fn soundness_sample(n: usize, m: usize, limits: &DeciderLimits, seed: u64) -> usize {
    const SAMPLE: usize = 10_000;
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut flagged: Vec<(TransitionTable, Decision)> = Vec::new();
    let mut seen = 0usize;
    enumerate(n, m, Mode::Default, limits, |t, d| {
        match d {
            Decision::NonHalting(Reason::EscapeHeuristic) => return,
            Decision::NonHalting(_) | Decision::NoBlankHalt(_) => {}
            _ => return,
        }
        seen += 1;
        if flagged.len() < SAMPLE {
            flagged.push((t.clone(), d));
        } else {
            let j = rng.gen_range(0..seen);
            if j < SAMPLE {
                flagged[j] = (t.clone(), d);
            }
        }
    });
    assert!(flagged.len() >= SAMPLE.min(seen));
    for (t, d) in &flagged {
        match simulate(t, 100_000) {
            Ok(r) => {
                assert_ne!(r.kind, RunKind::HaltedBlank, "{t} flagged {d} halts blank");
                if let Decision::NonHalting(_) = d {
                    assert_eq!(r.kind, RunKind::Cutoff, "{t} flagged {d} halts");
                }
            }
            Err(SimError::UndefinedTransition { .. }) => {
                panic!("{t} flagged {d} reaches an undefined entry")
            }
        }
    }
    flagged.len()
}

#[test]
fn flagged_machines_never_halt_blank() {
    assert!(soundness_sample(4, 2, &strict(), 1) >= 10_000);
    assert!(soundness_sample(2, 3, &strict(), 2) >= 2_000);
    let heuristic = DeciderLimits::default().with_max_steps(10_000);
    assert!(soundness_sample(4, 2, &heuristic, 3) >= 10_000);
}

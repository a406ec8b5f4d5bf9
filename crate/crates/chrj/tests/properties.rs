//! Property tests over randomized instances: store well-formedness, kill
//! hygiene, determinism, round-trips and strip idempotence.

use proptest::prelude::*;

use chrj::engine::{Engine, StepLimit};
use chrj::oracle::{store_to_goal, strip, InstanceGen};
use chrj::parser::parse_program;
use chrj::printer::format_program;
use chrj::retraction::kill;
use chrj::transformer::{annotate_query, translate_program};
use chrj::types::{JustId, Store};

/// Runs a generated instance to its final store, optionally killing one
/// query justification along the way.
fn run_instance(seed: u64, kill_nth: Option<usize>) -> (Store, Option<JustId>) {
    let mut gen = InstanceGen::new(seed);
    let (prog, query) = gen.instance();
    let jp = translate_program(&prog).unwrap();
    let mut store = Store::new();
    let mapping = annotate_query(&query, &mut store);
    let result = Engine::new(&jp).run(store, StepLimit::default()).unwrap();
    match kill_nth {
        None => (result.store, None),
        Some(n) => {
            let f = mapping[n % mapping.len()].1;
            let killed = kill(f, result.store, &jp, StepLimit::default()).unwrap();
            (killed.store, Some(f))
        }
    }
}

fn well_formed(store: &Store) {
    store.check_invariants().unwrap();
    for entry in &store.remembered {
        assert!(
            entry.inner.just.is_subset(&entry.outer),
            "rem entry inner justifications must be contained in the outer set"
        );
    }
}

proptest! {
    /// Final stores are well-formed: sorted duplicate-free justification
    /// sets, rem inner ⊆ outer, consistent counters.
    #[test]
    fn final_stores_are_well_formed(seed in any::<u64>()) {
        let (store, _) = run_instance(seed, None);
        well_formed(&store);
    }

    /// After kill(f) settles, f is gone from every live constraint and
    /// every rem outer set.
    #[test]
    fn post_kill_hygiene(seed in any::<u64>(), n in 0usize..6) {
        let (store, f) = run_instance(seed, Some(n));
        let f = f.unwrap();
        well_formed(&store);
        for jc in &store.live {
            prop_assert!(!jc.just.contains(f));
        }
        for entry in &store.remembered {
            prop_assert!(!entry.outer.contains(f));
        }
    }

    /// The engine is a function: replaying the same program, query and kill
    /// reproduces the final store exactly, store ids included.
    #[test]
    fn runs_are_deterministic(seed in any::<u64>(), n in 0usize..6) {
        let first = run_instance(seed, Some(n));
        let second = run_instance(seed, Some(n));
        prop_assert_eq!(first.0, second.0);
    }

    /// Generated programs survive a print/parse round-trip.
    #[test]
    fn programs_round_trip_through_the_printer(seed in any::<u64>()) {
        let mut gen = InstanceGen::new(seed);
        let prog = gen.program();
        let printed = format_program(&prog);
        let reparsed = parse_program(&printed).unwrap();
        prop_assert_eq!(format_program(&reparsed), printed);
    }

    /// Translation gives each rule one justification variable per head
    /// position, and bodies carry exactly the head union.
    #[test]
    fn translation_matches_head_positions(seed in any::<u64>()) {
        let mut gen = InstanceGen::new(seed);
        let prog = gen.program();
        let jp = translate_program(&prog).unwrap();
        for (rule, jrule) in prog.rules.iter().zip(&jp.rules) {
            prop_assert_eq!(
                jrule.head_just_vars.len(),
                rule.kept.len() + rule.removed.len()
            );
        }
    }

    /// strip(f, strip(f, S)) = strip(f, S) on reachable stores.
    #[test]
    fn strip_is_idempotent_on_reachable_stores(seed in any::<u64>(), raw in 0u64..8) {
        let (store, _) = run_instance(seed, None);
        let goal = store_to_goal(&store);
        let f = JustId(raw);
        let once = strip(f, &goal);
        prop_assert_eq!(strip(f, &once), once);
    }
}

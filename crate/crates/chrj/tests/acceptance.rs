//! End-to-end acceptance suite.
//!
//! Each test covers one acceptance criterion, prints a single PASS line when
//! it succeeds, and enforces its wall-clock budget.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use chrj::engine::{Engine, RunResult, StepLimit};
use chrj::oracle::{
    check_lemma1, check_theorem2_all_prefixes, check_theorem3, store_equiv, InstanceGen, Verdict,
};
use chrj::parser::{parse_annotated_store, parse_constraint, parse_program, parse_query, AnnotatedItem};
use chrj::retraction::{kill, killc};
use chrj::transformer::{annotate_query, translate_program};
use chrj::types::{Constraint, JProgram, JustId, JustSet, JustifiedConstraint, Store, StoreId};

const MIN: &str = include_str!("../../../programs/min.chr");
const PATH: &str = include_str!("../../../programs/path.chr");

fn load(src: &str) -> JProgram {
    translate_program(&parse_program(src).unwrap()).unwrap()
}

/// Runs a query to its final store, keeping the query-justification mapping.
fn run(prog: &JProgram, query: &str) -> (RunResult, Vec<(Constraint, JustId)>) {
    let goal = parse_query(query).unwrap();
    let mut store = Store::new();
    let mapping = annotate_query(&goal, &mut store);
    let result = Engine::new(prog).run(store, StepLimit::default()).unwrap();
    (result, mapping)
}

/// Builds a store from annotated listing syntax, mapping each symbolic
/// justification name to a distinct id. Comparison is up to renaming, so the
/// concrete ids do not matter.
fn expected_store(listing: &str) -> Store {
    let mut store = Store::new();
    let mut names: HashMap<String, JustId> = HashMap::new();
    let mut id = 0u64;
    let mut resolve = move |names: &mut HashMap<String, JustId>, symb: &[String]| -> JustSet {
        JustSet::from_elems(
            symb.iter()
                .map(|n| {
                    *names.entry(n.clone()).or_insert_with(|| {
                        id += 1;
                        JustId(id)
                    })
                })
                .collect(),
        )
    };
    for (k, item) in parse_annotated_store(listing).unwrap().into_iter().enumerate() {
        match item {
            AnnotatedItem::Live(c, justs) => {
                let just = resolve(&mut names, &justs);
                store.add_live(c, just);
            }
            AnnotatedItem::Rem(c, inner, outer) => {
                let inner_just = resolve(&mut names, &inner);
                let outer = resolve(&mut names, &outer);
                store.add_remembered(
                    JustifiedConstraint {
                        constraint: c,
                        just: inner_just,
                        store_id: StoreId(10_000 + k as u64),
                    },
                    outer,
                );
            }
        }
    }
    store
}

fn assert_store(actual: &Store, listing: &str, what: &str) {
    let report = store_equiv(actual, &expected_store(listing));
    assert!(
        report.verdict,
        "{what}: store mismatch\n{}",
        report.witness.unwrap_or_default()
    );
}

fn assert_budget(started: Instant, budget: Duration, what: &str) {
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "{what}: took {elapsed:?}, budget {budget:?}"
    );
}

/// Criterion 1: the minimum query reaches the golden store.
#[test]
fn criterion_1_min_golden() {
    let started = Instant::now();
    let prog = load(MIN);
    let (result, _) = run(&prog, "min(1), min(0), min(2)");
    assert_store(
        &result.store,
        "min(0)##[B], rem(min(1)##[A])##[A,B], rem(min(2)##[C])##[B,C].",
        "min run",
    );
    assert_budget(started, Duration::from_secs(1), "criterion 1");
    println!("criterion 1 (min golden store): PASS");
}

/// Criterion 2: retracting the remembered loser min(1) drops it entirely.
#[test]
fn criterion_2_killc_of_loser() {
    let started = Instant::now();
    let prog = load(MIN);
    let (result, _) = run(&prog, "min(1), min(0), min(2)");
    let mut alts = killc(
        &parse_constraint("min(1)").unwrap(),
        &result.store,
        &prog,
        StepLimit::default(),
    );
    let first = alts.next().expect("killc(min(1)) has an answer").unwrap();
    assert_eq!(alts.remaining(), 0, "exactly one alternative expected");
    assert_store(
        &first.store,
        "min(0)##[B], rem(min(2)##[C])##[B,C].",
        "killc(min(1))",
    );
    assert_budget(started, Duration::from_secs(1), "criterion 2");
    println!("criterion 2 (killc of a remembered loser): PASS");
}

/// Criterion 3: retracting the minimum promotes the runner-up.
#[test]
fn criterion_3_killc_of_minimum() {
    let started = Instant::now();
    let prog = load(MIN);
    let (result, _) = run(&prog, "min(1), min(0), min(2)");
    let mut alts = killc(
        &parse_constraint("min(0)").unwrap(),
        &result.store,
        &prog,
        StepLimit::default(),
    );
    let first = alts.next().expect("killc(min(0)) has an answer").unwrap();
    assert_eq!(alts.remaining(), 0, "exactly one alternative expected");
    assert_store(
        &first.store,
        "min(1)##[A], rem(min(2)##[C])##[A,C].",
        "killc(min(0))",
    );
    assert_budget(started, Duration::from_secs(1), "criterion 3");
    println!("criterion 3 (killc of the current minimum): PASS");
}

/// Criterion 4a: the 3-edge shortest-path query reaches the golden store.
#[test]
fn criterion_4a_path_golden() {
    let started = Instant::now();
    let prog = load(PATH);
    let (result, _) = run(&prog, "e(a,b), e(b,c), e(a,c)");
    assert_store(
        &result.store,
        "e(a,b)##[A], e(b,c)##[B], e(a,c)##[C], \
         p(a,b,1)##[A], p(b,c,1)##[B], p(a,c,1)##[C], \
         rem(p(a,c,2)##[A,B])##[A,B,C].",
        "path run",
    );
    assert_budget(started, Duration::from_secs(1), "criterion 4a");
    println!("criterion 4a (path golden store): PASS");
}

/// Criterion 4b: killing the direct edge restores the two-step path.
#[test]
fn criterion_4b_kill_direct_edge() {
    let started = Instant::now();
    let prog = load(PATH);
    let (result, mapping) = run(&prog, "e(a,b), e(b,c), e(a,c)");
    let f = mapping
        .iter()
        .find(|(c, _)| *c == parse_constraint("e(a,c)").unwrap())
        .unwrap()
        .1;
    let killed = kill(f, result.store, &prog, StepLimit::default()).unwrap();
    assert_store(
        &killed.store,
        "e(a,b)##[A], e(b,c)##[B], p(a,b,1)##[A], p(b,c,1)##[B], p(a,c,2)##[A,B].",
        "kill(e(a,c))",
    );
    assert_budget(started, Duration::from_secs(1), "criterion 4b");
    println!("criterion 4b (kill of the direct edge): PASS");
}

/// Criterion 4c: killc(p(a,c,2)) enumerates exactly the two producer kills.
#[test]
fn criterion_4c_killc_of_derived_path() {
    let started = Instant::now();
    let prog = load(PATH);
    let (result, _) = run(&prog, "e(a,b), e(b,c), e(a,c)");
    let alts: Vec<RunResult> = killc(
        &parse_constraint("p(a,c,2)").unwrap(),
        &result.store,
        &prog,
        StepLimit::default(),
    )
    .map(|r| r.unwrap())
    .collect();
    assert_eq!(alts.len(), 2, "two producer alternatives expected");
    let without_ab = "e(b,c)##[B], e(a,c)##[C], p(b,c,1)##[B], p(a,c,1)##[C].";
    let without_bc = "e(a,b)##[A], e(a,c)##[C], p(a,b,1)##[A], p(a,c,1)##[C].";
    assert_store(&alts[0].store, without_ab, "killc(p(a,c,2)) first answer");
    assert_store(&alts[1].store, without_bc, "killc(p(a,c,2)) second answer");
    assert_budget(started, Duration::from_secs(1), "criterion 4c");
    println!("criterion 4c (killc of a derived path): PASS");
}

/// Criterion 5: translated runs are conservative (annotations erase away).
#[test]
fn criterion_5_lemma1_conservativity() {
    let started = Instant::now();
    let limit = StepLimit::default();
    for (src, query) in [(MIN, "min(1), min(0), min(2)"), (PATH, "e(a,b), e(b,c), e(a,c)")] {
        let prog = parse_program(src).unwrap();
        let goal = parse_query(query).unwrap();
        match check_lemma1(&prog, &goal, limit) {
            Verdict::Pass => {}
            other => panic!("lemma 1 on bundled program failed: {other:?}"),
        }
    }
    let mut gen = InstanceGen::new(0xC0FFEE);
    for i in 0..500 {
        let (prog, query) = gen.instance();
        match check_lemma1(&prog, &query, limit) {
            Verdict::Pass => {}
            other => panic!("lemma 1 failed on random instance {i}: {other:?}"),
        }
    }
    assert_budget(started, Duration::from_secs(60), "criterion 5");
    println!("criterion 5 (lemma 1 conservativity, bundled + 500 random): PASS");
}

/// Criterion 6: retraction is correct — kill(G) reaches the store of the run
/// where G was never introduced.
#[test]
fn criterion_6_theorem3_correctness() {
    let started = Instant::now();
    let limit = StepLimit::default();
    for (src, query) in [(MIN, "min(1), min(0), min(2)"), (PATH, "e(a,b), e(b,c), e(a,c)")] {
        let prog = load(src);
        let goal = parse_query(query).unwrap();
        for g in 0..goal.len() {
            let mut rest = goal.clone();
            let target = rest.remove(g);
            match check_theorem3(&prog, &rest, &target, limit) {
                Verdict::Pass => {}
                other => panic!("theorem 3 on bundled program, G = index {g}: {other:?}"),
            }
        }
    }
    let mut gen = InstanceGen::new(0xBEEF);
    for i in 0..500 {
        let (prog, query) = gen.instance();
        let prog = translate_program(&prog).unwrap();
        if query.is_empty() {
            continue;
        }
        let mut rest = query.clone();
        let target = rest.remove(i % query.len());
        match check_theorem3(&prog, &rest, &target, limit) {
            Verdict::Pass => {}
            other => panic!("theorem 3 failed on random instance {i}: {other:?}"),
        }
    }
    assert_budget(started, Duration::from_secs(120), "criterion 6");
    println!("criterion 6 (theorem 3 correctness, bundled + 500 random): PASS");
}

/// Criterion 7: kill commutes with rule application — killing before the run
/// and after any trace prefix reach equivalent stores.
#[test]
fn criterion_7_theorem2_commutation() {
    let started = Instant::now();
    let limit = StepLimit::default();
    for (src, query) in [(MIN, "min(1), min(0), min(2)"), (PATH, "e(a,b), e(b,c), e(a,c)")] {
        let prog = load(src);
        let goal = parse_query(query).unwrap();
        match check_theorem2_all_prefixes(&prog, &goal, limit) {
            Verdict::Pass => {}
            other => panic!("theorem 2 on bundled program failed: {other:?}"),
        }
    }
    let mut gen = InstanceGen::new(0xDEAD);
    for i in 0..200 {
        let (prog, query) = gen.instance();
        let prog = translate_program(&prog).unwrap();
        match check_theorem2_all_prefixes(&prog, &query, limit) {
            Verdict::Pass => {}
            other => panic!("theorem 2 failed on random instance {i}: {other:?}"),
        }
    }
    assert_budget(started, Duration::from_secs(120), "criterion 7");
    println!("criterion 7 (theorem 2 commutation, bundled + 200 random): PASS");
}

/// Criterion 8: dynamic minimum at scale — 1000 candidates, kill the current
/// minimum ten times, end with the 11th-smallest candidate live, checked
/// against a sort-based oracle.
#[test]
fn criterion_8_dynamic_minimum_at_scale() {
    let prog = load(MIN);
    // 613 is coprime to 1000, so this walks a permutation of 0..999.
    let values: Vec<i64> = (0..1000).map(|i| (i * 613) % 1000).collect();
    let query = values
        .iter()
        .map(|v| format!("min({v})"))
        .collect::<Vec<_>>()
        .join(", ");
    let (mut result, _) = run(&prog, &query);

    let mut sorted = values.clone();
    sorted.sort_unstable();
    #[allow(clippy::needless_range_loop)] // round is a round counter, not an index
    for round in 0..10 {
        let live: Vec<&JustifiedConstraint> = result
            .store
            .live
            .iter()
            .filter(|jc| jc.constraint.symbol == "min")
            .collect();
        assert_eq!(live.len(), 1, "round {round}: one live minimum expected");
        assert_eq!(
            live[0].constraint,
            parse_constraint(&format!("min({})", sorted[round])).unwrap(),
            "round {round}: live minimum disagrees with the sort oracle"
        );
        let mut alts = killc(
            &live[0].constraint.clone(),
            &result.store,
            &prog,
            StepLimit::default(),
        );
        result = alts.next().expect("current minimum can be retracted").unwrap();
    }
    let live: Vec<&JustifiedConstraint> = result.store.live.iter().collect();
    assert_eq!(live.len(), 1);
    assert_eq!(
        live[0].constraint,
        parse_constraint(&format!("min({})", sorted[10])).unwrap(),
        "after ten kills the 11th-smallest candidate should be live"
    );
    println!("criterion 8 (dynamic minimum with 1000 candidates): PASS");
}

//! Independent checkers for the conservativity, commutation and
//! correctness properties of the justification machinery, plus a seeded
//! generator of random (program, query) instances for the property suites.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Engine, EngineError, StepLimit};
use crate::printer::{format_constraint, format_store};
use crate::retraction::kill;
use crate::transformer::{annotate_query, translate_program};
use crate::types::{
    Constraint, JProgram, JustId, JustSet, Program, Rule, Store, Term, VarId,
};

/// Outcome of one oracle check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Mismatch, with a witness describing the two stores compared.
    Fail(String),
    /// A run hit the step limit; nothing can be concluded.
    Inconclusive(String),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivReport {
    pub verdict: bool,
    pub witness: Option<String>,
}

/// One conjunct of a justified goal, the domain of the `strip` mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoalItem {
    Live { constraint: Constraint, just: JustSet },
    Rem {
        inner: Constraint,
        inner_just: JustSet,
        outer: JustSet,
    },
}

pub fn store_to_goal(store: &Store) -> Vec<GoalItem> {
    let mut items: Vec<GoalItem> = store
        .live
        .iter()
        .map(|jc| GoalItem::Live {
            constraint: jc.constraint.clone(),
            just: jc.just.clone(),
        })
        .collect();
    items.extend(store.remembered.iter().map(|e| GoalItem::Rem {
        inner: e.inner.constraint.clone(),
        inner_just: e.inner.just.clone(),
        outer: e.outer.clone(),
    }));
    items
}

/// Erases all traces of justification `f` from a goal: conjunctions map
/// pointwise, a rem entry whose outer set mentions `f` collapses to the
/// strip of its inner constraint, a non-rem constraint mentioning `f`
/// vanishes, everything else is unchanged.
pub fn strip(f: JustId, goal: &[GoalItem]) -> Vec<GoalItem> {
    let mut out = Vec::with_capacity(goal.len());
    for item in goal {
        match item {
            GoalItem::Rem {
                inner,
                inner_just,
                outer,
            } => {
                if outer.contains(f) {
                    // collapses to strip(f, inner^inner_just)
                    if !inner_just.contains(f) {
                        out.push(GoalItem::Live {
                            constraint: inner.clone(),
                            just: inner_just.clone(),
                        });
                    }
                } else {
                    out.push(item.clone());
                }
            }
            GoalItem::Live { just, .. } => {
                if !just.contains(f) {
                    out.push(item.clone());
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// store equivalence up to bijective renaming of justifications and variables

#[derive(Debug, Clone, Default)]
struct Bijection {
    j: HashMap<JustId, JustId>,
    j_rev: HashMap<JustId, JustId>,
    v: HashMap<VarId, VarId>,
    v_rev: HashMap<VarId, VarId>,
}

impl Bijection {
    fn map_just(&mut self, a: JustId, b: JustId) -> bool {
        match (self.j.get(&a), self.j_rev.get(&b)) {
            (Some(&x), _) if x != b => false,
            (_, Some(&y)) if y != a => false,
            _ => {
                self.j.insert(a, b);
                self.j_rev.insert(b, a);
                true
            }
        }
    }

    fn map_var(&mut self, a: VarId, b: VarId) -> bool {
        match (self.v.get(&a), self.v_rev.get(&b)) {
            (Some(&x), _) if x != b => false,
            (_, Some(&y)) if y != a => false,
            _ => {
                self.v.insert(a, b);
                self.v_rev.insert(b, a);
                true
            }
        }
    }
}

fn match_terms(a: &Term, b: &Term, bij: &mut Bijection) -> bool {
    match (a, b) {
        (Term::Var { id: ia, .. }, Term::Var { id: ib, .. }) => bij.map_var(*ia, *ib),
        (Term::Atom(x), Term::Atom(y)) => x == y,
        (Term::Int(x), Term::Int(y)) => x == y,
        (
            Term::Compound { functor: fa, args: aa },
            Term::Compound { functor: fb, args: ab },
        ) => fa == fb && aa.len() == ab.len() && aa.iter().zip(ab).all(|(x, y)| match_terms(x, y, bij)),
        _ => false,
    }
}

fn match_constraints(a: &Constraint, b: &Constraint, bij: &mut Bijection) -> bool {
    a.symbol == b.symbol
        && a.args.len() == b.args.len()
        && a.args.iter().zip(&b.args).all(|(x, y)| match_terms(x, y, bij))
}

/// Tries every bijective pairing of the two (equal-sized) justification
/// sets; calls `k` with each consistent extension until one succeeds.
fn match_justsets(
    a: &[JustId],
    b: &[JustId],
    bij: &Bijection,
    k: &mut dyn FnMut(Bijection) -> bool,
) -> bool {
    if a.is_empty() {
        return k(bij.clone());
    }
    let x = a[0];
    for (i, &y) in b.iter().enumerate() {
        let mut bij2 = bij.clone();
        if bij2.map_just(x, y) {
            let mut rest = b.to_vec();
            rest.remove(i);
            if match_justsets(&a[1..], &rest, &bij2, k) {
                return true;
            }
        }
    }
    false
}

fn match_items(a: &GoalItem, b: &GoalItem, bij: &Bijection, k: &mut dyn FnMut(Bijection) -> bool) -> bool {
    match (a, b) {
        (
            GoalItem::Live { constraint: ca, just: ja },
            GoalItem::Live { constraint: cb, just: jb },
        ) => {
            if ja.len() != jb.len() {
                return false;
            }
            let mut bij2 = bij.clone();
            if !match_constraints(ca, cb, &mut bij2) {
                return false;
            }
            let av: Vec<JustId> = ja.iter().collect();
            let bv: Vec<JustId> = jb.iter().collect();
            match_justsets(&av, &bv, &bij2, k)
        }
        (
            GoalItem::Rem { inner: ia, inner_just: ija, outer: oa },
            GoalItem::Rem { inner: ib, inner_just: ijb, outer: ob },
        ) => {
            if ija.len() != ijb.len() || oa.len() != ob.len() {
                return false;
            }
            let mut bij2 = bij.clone();
            if !match_constraints(ia, ib, &mut bij2) {
                return false;
            }
            let iav: Vec<JustId> = ija.iter().collect();
            let ibv: Vec<JustId> = ijb.iter().collect();
            let oav: Vec<JustId> = oa.iter().collect();
            let obv: Vec<JustId> = ob.iter().collect();
            match_justsets(&iav, &ibv, &bij2, &mut |bij3| {
                match_justsets(&oav, &obv, &bij3, k)
            })
        }
        _ => false,
    }
}

/// Multiset matching of goal items under a shared bijection.
fn match_multisets(a: &[GoalItem], used: &mut Vec<bool>, b: &[GoalItem], bij: &Bijection) -> bool {
    if a.is_empty() {
        return true;
    }
    let item = &a[0];
    for i in 0..b.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let rest = &a[1..];
        let found = match_items(item, &b[i], bij, &mut |bij2| {
            match_multisets(rest, used, b, &bij2)
        });
        if found {
            return true;
        }
        used[i] = false;
    }
    false
}

/// True iff some bijective renaming of justifications and variables makes
/// the two goals equal as multisets (live and remembered separately; store
/// ids are ignored).
pub fn goal_equiv(a: &[GoalItem], b: &[GoalItem]) -> bool {
    let (la, ra): (Vec<_>, Vec<_>) = a.iter().cloned().partition(|i| matches!(i, GoalItem::Live { .. }));
    let (lb, rb): (Vec<_>, Vec<_>) = b.iter().cloned().partition(|i| matches!(i, GoalItem::Live { .. }));
    if la.len() != lb.len() || ra.len() != rb.len() {
        return false;
    }
    let mut items_a = la;
    items_a.extend(ra);
    let mut items_b = lb;
    items_b.extend(rb);
    let mut used = vec![false; items_b.len()];
    match_multisets(&items_a, &mut used, &items_b, &Bijection::default())
}

pub fn store_equiv(s1: &Store, s2: &Store) -> EquivReport {
    let a = store_to_goal(s1);
    let b = store_to_goal(s2);
    if goal_equiv(&a, &b) {
        EquivReport {
            verdict: true,
            witness: None,
        }
    } else {
        EquivReport {
            verdict: false,
            witness: Some(format!(
                "no justification/variable renaming joins the stores\n--- left ---\n{}\n--- right ---\n{}",
                format_store(s1),
                format_store(s2)
            )),
        }
    }
}

/// Drops annotations and rem entries, leaving the plain constraint multiset.
pub fn erase(store: &Store) -> Vec<Constraint> {
    store.live.iter().map(|jc| jc.constraint.clone()).collect()
}

/// Multiset equality of plain constraints up to variable renaming.
pub fn constraints_equiv(a: &[Constraint], b: &[Constraint]) -> bool {
    let ga: Vec<GoalItem> = a
        .iter()
        .map(|c| GoalItem::Live {
            constraint: c.clone(),
            just: JustSet::empty(),
        })
        .collect();
    let gb: Vec<GoalItem> = b
        .iter()
        .map(|c| GoalItem::Live {
            constraint: c.clone(),
            just: JustSet::empty(),
        })
        .collect();
    goal_equiv(&ga, &gb)
}

// ---------------------------------------------------------------------------
// theorem checkers

fn limit_verdict(err: EngineError, what: &str) -> Verdict {
    Verdict::Inconclusive(format!("{what}: {err}"))
}

/// Conservativity: running the translated program and erasing annotations
/// and rem entries gives the final store of the untranslated program under
/// the same strategy.
pub fn check_lemma1(prog: &Program, query: &[Constraint], limit: StepLimit) -> Verdict {
    let jprog = match translate_program(prog) {
        Ok(p) => p,
        Err(e) => return Verdict::Inconclusive(format!("translation failed: {e}")),
    };

    let mut store_j = Store::new();
    annotate_query(query, &mut store_j);
    let justified = match Engine::new(&jprog).run(store_j, limit) {
        Ok(r) => r,
        Err(e) => return limit_verdict(e, "justified run"),
    };

    let mut store_p = Store::new();
    for c in query {
        store_p.add_live(c.clone(), JustSet::empty());
    }
    let plain = match Engine::plain(&jprog).run(store_p, limit) {
        Ok(r) => r,
        Err(e) => return limit_verdict(e, "plain run"),
    };

    if constraints_equiv(&erase(&justified.store), &erase(&plain.store)) {
        Verdict::Pass
    } else {
        Verdict::Fail(format!(
            "erased justified store differs from plain store\n--- justified (erased) ---\n{}\n--- plain ---\n{}",
            erase(&justified.store)
                .iter()
                .map(format_constraint)
                .collect::<Vec<_>>()
                .join(", "),
            erase(&plain.store)
                .iter()
                .map(format_constraint)
                .collect::<Vec<_>>()
                .join(", ")
        ))
    }
}

/// Commutation: killing a query justification after `k` steps of the run
/// reaches a store equivalent to killing it before any step.
pub fn check_theorem2(
    jprog: &JProgram,
    query: &[Constraint],
    f_index: usize,
    k: usize,
    limit: StepLimit,
) -> Verdict {
    let engine = Engine::new(jprog);

    // kill at step 0
    let mut store0 = Store::new();
    let mapping = annotate_query(query, &mut store0);
    let f = mapping[f_index].1;
    let early = match kill(f, store0, jprog, limit) {
        Ok(r) => r,
        Err(e) => return limit_verdict(e, "kill-at-0 run"),
    };

    // kill after k steps
    let mut store_k = Store::new();
    annotate_query(query, &mut store_k);
    let mut trace = Vec::new();
    let mut diags = Vec::new();
    engine.run_steps(&mut store_k, k, &mut trace, &mut diags);
    let late = match kill(f, store_k, jprog, limit) {
        Ok(r) => r,
        Err(e) => return limit_verdict(e, "kill-after-k run"),
    };

    let report = store_equiv(&early.store, &late.store);
    if report.verdict {
        Verdict::Pass
    } else {
        Verdict::Fail(format!(
            "kill-at-0 vs kill-after-{k} differ for justification {f}\n{}",
            report.witness.unwrap_or_default()
        ))
    }
}

/// Correctness: running with an extra constraint `g` and then retracting it
/// reaches a store equivalent to the run where `g` was never introduced.
pub fn check_theorem3(
    jprog: &JProgram,
    query: &[Constraint],
    g: &Constraint,
    limit: StepLimit,
) -> Verdict {
    let engine = Engine::new(jprog);

    // left: annotate(Q ∧ G), run, kill(f_G)
    let mut store_l = Store::new();
    let mut goal = query.to_vec();
    goal.push(g.clone());
    let mapping = annotate_query(&goal, &mut store_l);
    let f = mapping.last().unwrap().1;
    let run_l = match engine.run(store_l, limit) {
        Ok(r) => r,
        Err(e) => return limit_verdict(e, "left run"),
    };
    let killed = match kill(f, run_l.store, jprog, limit) {
        Ok(r) => r,
        Err(e) => return limit_verdict(e, "left kill run"),
    };
    // the retraction leaves no trace of f; strip is the oracle-side
    // normalization guaranteeing exactly that shape
    let left = strip(f, &store_to_goal(&killed.store));

    // right: annotate(Q), run, with G never introduced
    let mut store_r = Store::new();
    annotate_query(query, &mut store_r);
    let run_r = match engine.run(store_r, limit) {
        Ok(r) => r,
        Err(e) => return limit_verdict(e, "right run"),
    };
    let right = store_to_goal(&run_r.store);

    if goal_equiv(&left, &right) {
        Verdict::Pass
    } else {
        Verdict::Fail(format!(
            "retract-after-run differs from never-introduced run for {}\n--- left (stripped) ---\n{}\n--- right ---\n{}",
            format_constraint(g),
            format_store(&killed.store),
            format_store(&run_r.store)
        ))
    }
}

/// Prefix-insensitivity of retraction over a whole trace: checks
/// `check_theorem2` for every query justification and every prefix length.
pub fn check_theorem2_all_prefixes(
    jprog: &JProgram,
    query: &[Constraint],
    limit: StepLimit,
) -> Verdict {
    let mut store = Store::new();
    annotate_query(query, &mut store);
    let full = match Engine::new(jprog).run(store, limit) {
        Ok(r) => r,
        Err(e) => return limit_verdict(e, "full run"),
    };
    let trace_len = full.trace.len();
    for f_index in 0..query.len() {
        for k in 0..=trace_len {
            match check_theorem2(jprog, query, f_index, k, limit) {
                Verdict::Pass => {}
                other => return other,
            }
        }
    }
    Verdict::Pass
}

// ---------------------------------------------------------------------------
// randomized instance generator

/// A seeded generator of small random programs and ground queries over the
/// vocabulary a/1, b/1, c/2.
///
/// The generator draws from template families modelled on the minimum and
/// shortest-path programs: tournaments (keep the smaller of two), threshold
/// simplifications, and propagations whose head symbols are never removed
/// by any rule in the same program. Three invariants hold by construction:
///
/// * termination — only a/1 and b/1 produce constraints, only into c/2, and
///   propagation history bounds each production to once per source tuple;
/// * distinctness — queries are duplicate-free and every production is
///   injective in its source arguments, so no reachable store holds two
///   copies of the same plain constraint;
/// * bounded races — a tournament symbol sees at most 3 instances, and a
///   c/2 first argument (the race key) at most 2: at most one producing
///   rule writes into the query key range, extra producers use disjoint
///   key ranges, and query c/2 keys are pairwise distinct.
///
/// The bounds are what make the deterministic strategy commute with `kill`.
/// With 4 racing instances (or 3 per c-key), a retraction can reorder
/// arrivals so that a loser is recorded against a different winner, giving
/// final stores that differ in their justification wiring even though the
/// live constraints agree.
pub struct InstanceGen {
    rng: ChaCha8Rng,
}

/// What the generator lets a query-level symbol (a/1 or b/1) do.
#[derive(Clone, Copy, PartialEq)]
enum Role {
    /// `s(X) \ s(Y) <=> X =< Y | true.` — instances race, one survives.
    Tournament,
    /// `s(X) ==> c(X, tag).` — never removed, feeds the c level.
    Source,
    /// `s(X) <=> X >= k | ...` — dropped past a threshold.
    Simp,
    /// No rule mentions the symbol.
    Inert,
}

fn gen_var(name: &str, id: u64) -> Term {
    Term::Var {
        name: name.to_string(),
        id: VarId(id),
    }
}

impl InstanceGen {
    pub fn new(seed: u64) -> InstanceGen {
        InstanceGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn role(&mut self) -> Role {
        match self.rng.gen_range(0..4) {
            0 => Role::Tournament,
            1 => Role::Source,
            2 => Role::Simp,
            _ => Role::Inert,
        }
    }

    /// `s(X) \ s(Y) <=> X =< Y | true.` (direction random)
    fn tournament(&mut self, sym: &str) -> Rule {
        let (x, y) = (gen_var("X", 0), gen_var("Y", 1));
        let op = if self.rng.gen_bool(0.5) { "=<" } else { ">=" };
        Rule {
            name: None,
            kept: vec![Constraint::user(sym, vec![x.clone()])],
            removed: vec![Constraint::user(sym, vec![y.clone()])],
            guard: vec![Constraint::builtin(op, vec![x, y])],
            body: vec![],
        }
    }

    /// `c(U,V) \ c(U,W) <=> V =< W | true.` — races c's keyed on the first arg.
    fn c_tournament(&mut self) -> Rule {
        let (u, v, w) = (gen_var("U", 0), gen_var("V", 1), gen_var("W", 2));
        let op = if self.rng.gen_bool(0.5) { "=<" } else { ">=" };
        Rule {
            name: None,
            kept: vec![Constraint::user("c", vec![u.clone(), v.clone()])],
            removed: vec![Constraint::user("c", vec![u, w.clone()])],
            guard: vec![Constraint::builtin(op, vec![v, w])],
            body: vec![],
        }
    }

    /// `s(X) ==> c(X, tag).` — tag is private to the rule, so distinct
    /// sources yield distinct products.
    fn propagation(&mut self, sym: &str, tag: i64) -> Rule {
        let x = gen_var("X", 0);
        Rule {
            name: None,
            kept: vec![Constraint::user(sym, vec![x.clone()])],
            removed: vec![],
            guard: vec![],
            body: vec![Constraint::user("c", vec![x, Term::Int(tag)])],
        }
    }

    /// `a(X), b(Y) ==> Z =:= X*10+Y+200 | c(Z, Y).` — two kept heads with an
    /// evaluating guard; the produced key Z is injective in (X, Y) and lies
    /// outside the query key range, so pair products never race.
    fn pair_propagation(&mut self) -> Rule {
        let (x, y, z) = (gen_var("X", 0), gen_var("Y", 1), gen_var("Z", 2));
        let key = Term::compound(
            "+",
            vec![
                Term::compound(
                    "+",
                    vec![Term::compound("*", vec![x, Term::Int(10)]), y.clone()],
                ),
                Term::Int(200),
            ],
        );
        Rule {
            name: None,
            kept: vec![
                Constraint::user("a", vec![gen_var("X", 0)]),
                Constraint::user("b", vec![y.clone()]),
            ],
            removed: vec![],
            guard: vec![Constraint::builtin("=:=", vec![z.clone(), key])],
            body: vec![Constraint::user("c", vec![z, y])],
        }
    }

    /// `s(X) <=> X >= k | true.` or with a tagged c/2 product.
    fn simplification(&mut self, sym: &str, tag: i64, with_body: bool) -> Rule {
        let x = gen_var("X", 0);
        let op = if self.rng.gen_bool(0.5) { ">=" } else { "=<" };
        let k = self.rng.gen_range(0..10);
        let body = if with_body {
            vec![Constraint::user("c", vec![x.clone(), Term::Int(tag)])]
        } else {
            vec![]
        };
        Rule {
            name: None,
            kept: vec![],
            removed: vec![Constraint::user(sym, vec![x.clone()])],
            guard: vec![Constraint::builtin(op, vec![x, Term::Int(k)])],
            body,
        }
    }

    pub fn program(&mut self) -> Program {
        loop {
            let role_a = self.role();
            let role_b = self.role();
            let mut rules = Vec::new();
            // only one rule may produce c/2 constraints keyed by a source
            // argument; a second producer could put three c's on one key
            let mut producer_used = false;
            for (sym, role) in [("a", role_a), ("b", role_b)] {
                let tag = 100 + rules.len() as i64;
                match role {
                    Role::Tournament => rules.push(self.tournament(sym)),
                    Role::Source => {
                        if !producer_used && self.rng.gen_bool(0.8) {
                            rules.push(self.propagation(sym, tag));
                            producer_used = true;
                        }
                    }
                    Role::Simp => {
                        let with_body = !producer_used && self.rng.gen_bool(0.5);
                        producer_used |= with_body;
                        rules.push(self.simplification(sym, tag, with_body));
                    }
                    Role::Inert => {}
                }
            }
            // the pair rule needs both symbols kept-only; its products use a
            // private key range, so it may coexist with one other producer
            let kept_only = |r: Role| matches!(r, Role::Source | Role::Inert);
            if kept_only(role_a) && kept_only(role_b) && self.rng.gen_bool(0.5) {
                rules.push(self.pair_propagation());
            }
            if rules.len() < 3 && self.rng.gen_bool(0.6) {
                rules.push(self.c_tournament());
            }
            rules.truncate(3);
            if !rules.is_empty() {
                return Program { rules };
            }
        }
    }

    /// 1..=6 pairwise-distinct ground constraints. At most 3 of each of a/1
    /// and b/1, and pairwise-distinct c/2 first arguments, keeping every
    /// potential race small enough for deterministic kill-commutation.
    pub fn query(&mut self) -> Vec<Constraint> {
        let n = self.rng.gen_range(1..=6);
        let mut out: Vec<Constraint> = Vec::new();
        let mut counts = [0usize; 2];
        let mut c_keys: Vec<i64> = Vec::new();
        let mut stalled = 0;
        while out.len() < n && stalled < 100 {
            stalled += 1;
            let c = match self.rng.gen_range(0..3) {
                i @ (0 | 1) => {
                    if counts[i] >= 3 {
                        continue;
                    }
                    counts[i] += 1;
                    let sym = if i == 0 { "a" } else { "b" };
                    Constraint::user(sym, vec![Term::Int(self.rng.gen_range(0..10))])
                }
                _ => {
                    let key = self.rng.gen_range(0..5);
                    if c_keys.contains(&key) {
                        continue;
                    }
                    c_keys.push(key);
                    Constraint::user(
                        "c",
                        vec![Term::Int(key), Term::Int(self.rng.gen_range(0..5))],
                    )
                }
            };
            if !out.contains(&c) {
                out.push(c);
            } else {
                // undo the bookkeeping for the duplicate draw
                match c.symbol.as_str() {
                    "a" => counts[0] -= 1,
                    "b" => counts[1] -= 1,
                    _ => {
                        c_keys.pop();
                    }
                }
            }
        }
        out
    }

    pub fn instance(&mut self) -> (Program, Vec<Constraint>) {
        (self.program(), self.query())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, parse_query};

    const MIN: &str = "min(N) \\ min(M) <=> N=<M | true.";
    const PATH: &str = "pp @ p(X,Y,L1) \\ p(X,Y,L2) <=> L1=<L2 | true.\n\
                        e @ e(X,Y) ==> p(X,Y,1).\n\
                        ep @ e(X,Y), p(Y,Z,L) ==> L1=:=L+1 | p(X,Z,L1).";

    fn js(ids: &[u64]) -> JustSet {
        JustSet::from_elems(ids.iter().map(|&i| JustId(i)).collect())
    }

    fn live(sym: &str, n: i64, just: &[u64]) -> GoalItem {
        GoalItem::Live {
            constraint: Constraint::user(sym, vec![Term::Int(n)]),
            just: js(just),
        }
    }

    #[test]
    fn strip_follows_the_four_equations() {
        let f = JustId(9);
        // rem(g^{a})^{a,f} -> g^{a}
        let goal = vec![GoalItem::Rem {
            inner: Constraint::user("g", vec![Term::Int(1)]),
            inner_just: js(&[1]),
            outer: js(&[1, 9]),
        }];
        assert_eq!(strip(f, &goal), vec![live("g", 1, &[1])]);
        // g^{f,b} -> true (vanishes)
        assert_eq!(strip(f, &[live("g", 1, &[9, 2])]), vec![]);
        // g^{a} unchanged
        assert_eq!(strip(f, &[live("g", 1, &[1])]), vec![live("g", 1, &[1])]);
    }

    #[test]
    fn strip_is_idempotent() {
        let f = JustId(0);
        let goal = vec![
            live("g", 1, &[0, 1]),
            live("h", 2, &[2]),
            GoalItem::Rem {
                inner: Constraint::user("g", vec![Term::Int(3)]),
                inner_just: js(&[1]),
                outer: js(&[0, 1]),
            },
            GoalItem::Rem {
                inner: Constraint::user("g", vec![Term::Int(4)]),
                inner_just: js(&[0]),
                outer: js(&[0, 2]),
            },
        ];
        let once = strip(f, &goal);
        let twice = strip(f, &once);
        assert_eq!(once, twice);
    }

    #[test]
    fn store_equiv_renames_justifications() {
        let mut s1 = Store::new();
        for _ in 0..2 {
            s1.fresh_justification();
        }
        s1.add_live(Constraint::user("min", vec![Term::Int(0)]), js(&[1]));
        let mut s2 = Store::new();
        for _ in 0..8 {
            s2.fresh_justification();
        }
        s2.add_live(Constraint::user("min", vec![Term::Int(0)]), js(&[7]));
        assert!(store_equiv(&s1, &s2).verdict);
    }

    #[test]
    fn store_equiv_is_multiset_sensitive() {
        let mut s1 = Store::new();
        s1.add_live(Constraint::user("c", vec![]), JustSet::empty());
        s1.add_live(Constraint::user("c", vec![]), JustSet::empty());
        let mut s2 = Store::new();
        s2.add_live(Constraint::user("c", vec![]), JustSet::empty());
        let report = store_equiv(&s1, &s2);
        assert!(!report.verdict);
        assert!(report.witness.is_some());

        assert!(store_equiv(&Store::new(), &Store::new()).verdict);
    }

    #[test]
    fn lemma1_on_bundled_programs() {
        let min = parse_program(MIN).unwrap();
        let q = parse_query("min(1), min(0), min(2)").unwrap();
        assert_eq!(check_lemma1(&min, &q, StepLimit::default()), Verdict::Pass);

        let path = parse_program(PATH).unwrap();
        let q = parse_query("e(a,b), e(b,c), e(a,c)").unwrap();
        assert_eq!(check_lemma1(&path, &q, StepLimit::default()), Verdict::Pass);

        // empty program: both sides keep the query as-is
        let empty = Program::default();
        let q = parse_query("a(1), b(2)").unwrap();
        assert_eq!(check_lemma1(&empty, &q, StepLimit::default()), Verdict::Pass);
    }

    #[test]
    fn theorem2_on_min_prefixes() {
        let prog = parse_program(MIN).unwrap();
        let jprog = translate_program(&prog).unwrap();
        let q = parse_query("min(1), min(0), min(2)").unwrap();
        for k in 0..=2 {
            assert_eq!(
                check_theorem2(&jprog, &q, 1, k, StepLimit::default()),
                Verdict::Pass,
                "failed at k={k}"
            );
        }
    }

    #[test]
    fn theorem2_all_prefixes_on_path() {
        let prog = parse_program(PATH).unwrap();
        let jprog = translate_program(&prog).unwrap();
        let q = parse_query("e(a,b), e(b,c), e(a,c)").unwrap();
        assert_eq!(
            check_theorem2_all_prefixes(&jprog, &q, StepLimit::default()),
            Verdict::Pass
        );
    }

    #[test]
    fn theorem3_on_bundled_programs() {
        let prog = parse_program(MIN).unwrap();
        let jprog = translate_program(&prog).unwrap();
        let q = parse_query("min(1), min(2)").unwrap();
        let g = crate::parser::parse_constraint("min(0)").unwrap();
        assert_eq!(
            check_theorem3(&jprog, &q, &g, StepLimit::default()),
            Verdict::Pass
        );

        let prog = parse_program(PATH).unwrap();
        let jprog = translate_program(&prog).unwrap();
        let q = parse_query("e(a,b), e(b,c)").unwrap();
        let g = crate::parser::parse_constraint("e(a,c)").unwrap();
        assert_eq!(
            check_theorem3(&jprog, &q, &g, StepLimit::default()),
            Verdict::Pass
        );

        // constraint no rule mentions
        let jprog = translate_program(&Program::default()).unwrap();
        let g = crate::parser::parse_constraint("c(9,9)").unwrap();
        assert_eq!(
            check_theorem3(&jprog, &[], &g, StepLimit::default()),
            Verdict::Pass
        );
    }

    #[test]
    fn generator_is_deterministic_per_seed() {
        let (p1, q1) = InstanceGen::new(42).instance();
        let (p2, q2) = InstanceGen::new(42).instance();
        assert_eq!(crate::printer::format_program(&p1), crate::printer::format_program(&p2));
        assert_eq!(q1, q2);
    }

    #[test]
    fn generated_programs_terminate() {
        let mut gen = InstanceGen::new(7);
        for _ in 0..100 {
            let (prog, query) = gen.instance();
            let jprog = translate_program(&prog).unwrap();
            let mut store = Store::new();
            annotate_query(&query, &mut store);
            let run = Engine::new(&jprog).run(store, StepLimit::default());
            assert!(run.is_ok(), "nonterminating instance: {}", crate::printer::format_program(&prog));
        }
    }
}

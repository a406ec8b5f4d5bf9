//! Execution of the operational semantics over a store, as a deterministic
//! refinement: rules are tried in textual order, matches in ascending
//! store-id lexicographic order.

use std::fmt;

use crate::builtins::{eval_builtin, resolve, Binding, GuardOutcome};
use crate::types::{
    Constraint, JProgram, JustSet, Store, StoreId, Term, union_just,
};

/// Maximum number of transitions before a run is cut off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepLimit(pub usize);

impl Default for StepLimit {
    fn default() -> StepLimit {
        StepLimit(100_000)
    }
}

/// One computation step, as recorded in the trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Fire {
        rule_index: usize,
        rule_name: Option<String>,
        matched: Vec<StoreId>,
        removed: Vec<StoreId>,
        added: Vec<StoreId>,
        just: JustSet,
    },
    /// A rule with body `false` fired; the run halts.
    Failure {
        rule_index: usize,
        rule_name: Option<String>,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Fire {
                rule_index,
                rule_name,
                matched,
                removed,
                added,
                just,
            } => {
                let name = rule_name.as_deref().unwrap_or("_");
                let fmt_ids = |ids: &[StoreId]| {
                    ids.iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                let justs = just
                    .iter()
                    .map(|j| j.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                write!(
                    f,
                    "fire rule={rule_index}:{name} matched=[{}] removed=[{}] added=[{}] just=[{justs}]",
                    fmt_ids(matched),
                    fmt_ids(removed),
                    fmt_ids(added)
                )
            }
            TraceEvent::Failure {
                rule_index,
                rule_name,
            } => {
                let name = rule_name.as_deref().unwrap_or("_");
                write!(f, "fail rule={rule_index}:{name}")
            }
        }
    }
}

pub type Trace = Vec<TraceEvent>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// No rule is applicable.
    Final,
    /// A rule body `false` fired.
    Failed,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub store: Store,
    pub trace: Trace,
    pub status: RunStatus,
    /// Guards skipped as undecidable (unbound variables etc).
    pub diagnostics: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("step limit of {limit} transitions exceeded")]
    StepLimit {
        limit: usize,
        partial: Box<RunResult>,
    },
}

/// One-way matching: head variables bind, store terms never bind.
fn match_term(pattern: &Term, value: &Term, b: &mut Binding) -> bool {
    match pattern {
        Term::Var { id, .. } => match b.get(id) {
            Some(bound) => bound.clone() == *value,
            None => {
                b.insert(*id, value.clone());
                true
            }
        },
        Term::Atom(a) => matches!(value, Term::Atom(v) if v == a),
        Term::Int(n) => matches!(value, Term::Int(v) if v == n),
        Term::Compound { functor, args } => match value {
            Term::Compound {
                functor: vf,
                args: vargs,
            } => functor == vf && args.len() == vargs.len() && {
                args.iter().zip(vargs).all(|(p, v)| match_term(p, v, b))
            },
            _ => false,
        },
    }
}

fn match_constraint(pattern: &Constraint, value: &Constraint, b: &mut Binding) -> bool {
    pattern.symbol == value.symbol
        && pattern.args.len() == value.args.len()
        && pattern
            .args
            .iter()
            .zip(&value.args)
            .all(|(p, v)| match_term(p, v, b))
}

/// Enumerates injective assignments of distinct live store constraints to
/// the head positions, in ascending store-id lexicographic order. Calls
/// `visit` for each complete match; stops early when `visit` returns `Some`.
fn for_each_match<R>(
    head: &[&Constraint],
    store: &Store,
    visit: &mut dyn FnMut(&Binding, &[usize]) -> Option<R>,
) -> Option<R> {
    fn go<R>(
        head: &[&Constraint],
        store: &Store,
        pos: usize,
        chosen: &mut Vec<usize>,
        b: &Binding,
        visit: &mut dyn FnMut(&Binding, &[usize]) -> Option<R>,
    ) -> Option<R> {
        if pos == head.len() {
            return visit(b, chosen);
        }
        for (idx, jc) in store.live.iter().enumerate() {
            if chosen.contains(&idx) {
                continue;
            }
            let mut b2 = b.clone();
            if match_constraint(head[pos], &jc.constraint, &mut b2) {
                chosen.push(idx);
                if let Some(r) = go(head, store, pos + 1, chosen, &b2, visit) {
                    return Some(r);
                }
                chosen.pop();
            }
        }
        None
    }
    let mut chosen = Vec::with_capacity(head.len());
    go(head, store, 0, &mut chosen, &Binding::new(), visit)
}

/// Enumerates all head matches against the store. Mainly for inspection and
/// tests; `step` searches lazily.
pub fn match_head(head: &[Constraint], store: &Store) -> Vec<(Binding, Vec<StoreId>)> {
    let refs: Vec<&Constraint> = head.iter().collect();
    let mut out = Vec::new();
    for_each_match::<()>(&refs, store, &mut |b, chosen| {
        out.push((
            b.clone(),
            chosen.iter().map(|&i| store.live[i].store_id).collect(),
        ));
        None
    });
    out
}

/// Checks a guard conjunction, threading binding extensions.
pub fn check_guard(guard: &[Constraint], b: &Binding) -> GuardOutcome {
    let mut b = b.clone();
    for g in guard {
        match eval_builtin(g, &b) {
            GuardOutcome::Success(b2) => b = b2,
            GuardOutcome::Failure => return GuardOutcome::Failure,
            GuardOutcome::Inapplicable(reason) => return GuardOutcome::Inapplicable(reason),
        }
    }
    GuardOutcome::Success(b)
}

/// Execution over a translated program. With `justified` off, the same
/// strategy runs the untranslated semantics: no justification bookkeeping
/// and no `rem` entries. That mode backs the conservativity oracle.
pub struct Engine<'p> {
    pub prog: &'p JProgram,
    pub justified: bool,
}

impl<'p> Engine<'p> {
    pub fn new(prog: &'p JProgram) -> Engine<'p> {
        Engine {
            prog,
            justified: true,
        }
    }

    pub fn plain(prog: &'p JProgram) -> Engine<'p> {
        Engine {
            prog,
            justified: false,
        }
    }

    /// Attempts one transition. Returns `None` when the store is final.
    pub fn step(&self, store: &mut Store, diags: &mut Vec<String>) -> Option<TraceEvent> {
        debug_assert!(store.is_settled(), "step on an unsettled store");
        for (rule_index, jrule) in self.prog.rules.iter().enumerate() {
            let rule = &jrule.rule;
            // candidates are ordered by the removed positions first: the
            // constraint about to be deleted is the oldest one deletable,
            // which is what reproduces the reference transcripts
            let head: Vec<&Constraint> = rule.removed.iter().chain(rule.kept.iter()).collect();
            let n_removed = rule.removed.len();
            let fired = for_each_match(&head, store, &mut |b, chosen| {
                let binding = match check_guard(&rule.guard, b) {
                    GuardOutcome::Success(b2) => b2,
                    GuardOutcome::Failure => return None,
                    GuardOutcome::Inapplicable(reason) => {
                        diags.push(format!(
                            "rule {} inapplicable: {reason}",
                            rule.name.as_deref().unwrap_or("_")
                        ));
                        return None;
                    }
                };
                // report matched ids in rule head order: kept, then removed
                let ids: Vec<StoreId> = chosen[n_removed..]
                    .iter()
                    .chain(chosen[..n_removed].iter())
                    .map(|&i| store.live[i].store_id)
                    .collect();
                if rule.is_propagation() && store.history.contains(&(rule_index, ids.clone())) {
                    return None;
                }
                Some((binding, chosen.to_vec(), ids))
            });
            let Some((binding, chosen, ids)) = fired else {
                continue;
            };

            if rule.body_fails() {
                return Some(TraceEvent::Failure {
                    rule_index,
                    rule_name: rule.name.clone(),
                });
            }

            // union of the justification sets of all matched head constraints
            let just = if self.justified {
                union_just(chosen.iter().map(|&i| &store.live[i].just))
            } else {
                JustSet::empty()
            };

            if rule.is_propagation() {
                store.history.insert((rule_index, ids.clone()));
            }

            // remove the matched removed-head constraints, remembering them
            let removed_idx = &chosen[..n_removed];
            let mut removed_sorted: Vec<usize> = removed_idx.to_vec();
            removed_sorted.sort_unstable();
            let mut removed_ids = Vec::with_capacity(removed_sorted.len());
            for &i in removed_sorted.iter().rev() {
                let jc = store.live.remove(i);
                removed_ids.push(jc.store_id);
                if self.justified {
                    store.add_remembered(jc, just.clone());
                }
            }
            removed_ids.reverse();

            let mut added = Vec::with_capacity(rule.body.len());
            for bc in &rule.body {
                let args = bc.args.iter().map(|a| resolve(a, &binding)).collect();
                let c = Constraint {
                    symbol: bc.symbol.clone(),
                    args,
                    kind: bc.kind,
                };
                added.push(store.add_live(c, just.clone()));
            }

            return Some(TraceEvent::Fire {
                rule_index,
                rule_name: rule.name.clone(),
                matched: ids,
                removed: removed_ids,
                added,
                just,
            });
        }
        None
    }

    /// Iterates `step` to a fixpoint or the limit.
    pub fn run(&self, mut store: Store, limit: StepLimit) -> Result<RunResult, EngineError> {
        let mut trace = Trace::new();
        let mut diagnostics = Vec::new();
        loop {
            if trace.len() >= limit.0 {
                return Err(EngineError::StepLimit {
                    limit: limit.0,
                    partial: Box::new(RunResult {
                        store,
                        trace,
                        status: RunStatus::Final,
                        diagnostics,
                    }),
                });
            }
            match self.step(&mut store, &mut diagnostics) {
                Some(ev @ TraceEvent::Failure { .. }) => {
                    trace.push(ev);
                    return Ok(RunResult {
                        store,
                        trace,
                        status: RunStatus::Failed,
                        diagnostics,
                    });
                }
                Some(ev) => trace.push(ev),
                None => {
                    return Ok(RunResult {
                        store,
                        trace,
                        status: RunStatus::Final,
                        diagnostics,
                    })
                }
            }
        }
    }

    /// Runs at most `k` steps; used by the commutation oracle.
    pub fn run_steps(
        &self,
        store: &mut Store,
        k: usize,
        trace: &mut Trace,
        diagnostics: &mut Vec<String>,
    ) -> RunStatus {
        for _ in 0..k {
            match self.step(store, diagnostics) {
                Some(ev @ TraceEvent::Failure { .. }) => {
                    trace.push(ev);
                    return RunStatus::Failed;
                }
                Some(ev) => trace.push(ev),
                None => break,
            }
        }
        RunStatus::Final
    }
}

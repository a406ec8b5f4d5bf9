//! Logical retraction: the kill/revive scheme over the tombstone
//! realization, and `killc` retraction of (possibly derived) constraints
//! with producer-choice enumeration.

use crate::engine::{Engine, EngineError, RunResult, StepLimit};
use crate::types::{Constraint, JProgram, JustId, Store};

/// Exhaustively applies the kill and revive rules for the current tombstone
/// set: live constraints mentioning a killed justification are deleted;
/// remembered entries whose outer set mentions one are dropped and their
/// inner constraint re-enters live with a fresh store id (unless its own
/// set is also killed). Returns the number of removed/revived constraints.
pub fn settle(store: &mut Store) -> (usize, usize) {
    let mut removed = 0;
    let mut revived = 0;
    loop {
        let before = (removed, revived);

        let killed = store.killed.clone();
        let live = std::mem::take(&mut store.live);
        for jc in live {
            if jc.just.intersects(&killed) {
                removed += 1;
            } else {
                store.live.push(jc);
            }
        }

        // revive in ascending original store_id order; the remembered list
        // is already in that order
        let remembered = std::mem::take(&mut store.remembered);
        let mut to_revive = Vec::new();
        for entry in remembered {
            if entry.outer.intersects(&killed) {
                to_revive.push(entry.inner);
            } else {
                store.remembered.push(entry);
            }
        }
        for inner in to_revive {
            if inner.just.intersects(&killed) {
                // revived and immediately killed
                removed += 1;
            } else {
                store.add_live(inner.constraint, inner.just);
                revived += 1;
            }
        }

        if (removed, revived) == before {
            return (removed, revived);
        }
    }
}

/// Retracts the justification `f`: tombstones it, settles the store, then
/// resumes the program to a fixpoint. An unknown `f` is a no-op.
pub fn kill(
    f: JustId,
    store: Store,
    prog: &JProgram,
    limit: StepLimit,
) -> Result<RunResult, EngineError> {
    let mut store = store;
    if !store.knows_justification(f) {
        let mut result = Engine::new(prog).run(store, limit)?;
        result
            .diagnostics
            .push(format!("kill: unknown justification {f}, ignored"));
        return Ok(result);
    }
    store.killed.insert(f);
    settle(&mut store);
    Engine::new(prog).run(store, limit)
}

/// The producer choices of a `killc`, yielding one settled final store per
/// justification that can be killed to retract the target.
pub struct AlternativeStream<'p> {
    base: Store,
    prog: &'p JProgram,
    limit: StepLimit,
    choices: Vec<JustId>,
    next: usize,
    /// Set when no live or remembered constraint matched the pattern.
    pub diagnostic: Option<String>,
}

impl<'p> AlternativeStream<'p> {
    pub fn remaining(&self) -> usize {
        self.choices.len() - self.next
    }

    pub fn choices(&self) -> &[JustId] {
        &self.choices
    }
}

impl<'p> Iterator for AlternativeStream<'p> {
    type Item = Result<RunResult, EngineError>;

    fn next(&mut self) -> Option<Self::Item> {
        let f = *self.choices.get(self.next)?;
        self.next += 1;
        Some(kill(f, self.base.clone(), self.prog, self.limit))
    }
}

/// Logically retracts the first constraint matching the ground `pattern`.
///
/// A live match (lowest store id) enumerates kills over its whole
/// justification set; a remembered match enumerates over the inner set
/// only, since that holds the justifications of the producers.
pub fn killc<'p>(
    pattern: &Constraint,
    store: &Store,
    prog: &'p JProgram,
    limit: StepLimit,
) -> AlternativeStream<'p> {
    let live_match = store
        .live
        .iter()
        .find(|jc| jc.constraint == *pattern);
    let choices: Vec<JustId> = if let Some(jc) = live_match {
        jc.just.iter().collect()
    } else if let Some(entry) = store
        .remembered
        .iter()
        .find(|e| e.inner.constraint == *pattern)
    {
        entry.inner.just.iter().collect()
    } else {
        return AlternativeStream {
            base: store.clone(),
            prog,
            limit,
            choices: Vec::new(),
            next: 0,
            diagnostic: Some(format!(
                "killc: no live or remembered constraint matches {}",
                crate::printer::format_constraint(pattern)
            )),
        };
    };
    AlternativeStream {
        base: store.clone(),
        prog,
        limit,
        choices,
        next: 0,
        diagnostic: None,
    }
}

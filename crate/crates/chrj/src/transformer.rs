//! Source-to-source translation to rules with justifications, plus query
//! annotation.
//!
//! Every head constraint of a translated rule carries a justification
//! variable; every body user constraint is annotated with the union of all
//! of them, and each removed head constraint is remembered through a `rem`
//! emission. The kill/revive behavior is provided generically by the
//! retraction module instead of emitting one rule pair per constraint
//! symbol.

use std::collections::HashSet;

use crate::types::{
    Constraint, JProgram, JRule, JustId, JustSet, Program, Rule, Store,
};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("duplicate rule name `{0}`")]
    DuplicateRuleName(String),
    #[error("reserved constraint symbol `{0}` in rule")]
    ReservedSymbol(String),
}

/// Translates one rule, assigning a justification variable per head position.
pub fn translate_rule(rule: &Rule) -> JRule {
    let head_just_vars = (0..rule.head_len())
        .map(|i| format!("F{}", i + 1))
        .collect();
    JRule {
        rule: rule.clone(),
        head_just_vars,
    }
}

/// Translates a whole program, rule by rule, in source order.
pub fn translate_program(prog: &Program) -> Result<JProgram, TransformError> {
    let mut names = HashSet::new();
    for rule in &prog.rules {
        if let Some(name) = &rule.name {
            if !names.insert(name.clone()) {
                return Err(TransformError::DuplicateRuleName(name.clone()));
            }
        }
        for c in rule
            .kept
            .iter()
            .chain(rule.removed.iter())
            .chain(rule.body.iter())
        {
            if c.is_reserved() {
                return Err(TransformError::ReservedSymbol(c.symbol.clone()));
            }
        }
    }
    Ok(JProgram {
        rules: prog.rules.iter().map(translate_rule).collect(),
    })
}

/// Enters the goal constraints into the store, each with a fresh singleton
/// justification set, and returns the constraint-to-justification mapping
/// for later kill-by-name.
pub fn annotate_query(goal: &[Constraint], store: &mut Store) -> Vec<(Constraint, JustId)> {
    let mut mapping = Vec::with_capacity(goal.len());
    for c in goal {
        let f = store.fresh_justification();
        store.add_live(c.clone(), JustSet::singleton(f));
        mapping.push((c.clone(), f));
    }
    mapping
}

//! Evaluation of the whitelisted built-in guard constraints.

use std::collections::HashMap;

use crate::types::{Constraint, Term, VarId};

/// The closed set of built-in symbols accepted in guards.
pub const BUILTIN_WHITELIST: &[&str] = &[
    "=<", "<", ">=", ">", "=:=", "=\\=", "is", "=", "true", "false",
];

/// Substitution from variable ids to terms, built up during matching.
pub type Binding = HashMap<VarId, Term>;

/// Result of evaluating a single guard constraint under a binding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuardOutcome {
    /// Guard holds; binding possibly extended by an evaluating guard.
    Success(Binding),
    /// Guard is false under the binding.
    Failure,
    /// Guard cannot be decided (unbound variable, non-integer operand).
    Inapplicable(String),
}

/// Resolves a term under a binding, substituting bound variables.
pub fn resolve(t: &Term, b: &Binding) -> Term {
    match t {
        Term::Var { id, .. } => match b.get(id) {
            Some(bound) => resolve(bound, b),
            None => t.clone(),
        },
        Term::Atom(_) | Term::Int(_) => t.clone(),
        Term::Compound { functor, args } => Term::Compound {
            functor: functor.clone(),
            args: args.iter().map(|a| resolve(a, b)).collect(),
        },
    }
}

/// Evaluates an arithmetic term built from integers, bound variables and
/// the operators `+`, `-`, `*`.
pub fn eval_arith(t: &Term, b: &Binding) -> Option<i64> {
    match t {
        Term::Int(n) => Some(*n),
        Term::Var { id, .. } => b.get(id).and_then(|bound| eval_arith(bound, b)),
        Term::Atom(_) => None,
        Term::Compound { functor, args } => {
            if args.len() != 2 {
                return None;
            }
            let x = eval_arith(&args[0], b)?;
            let y = eval_arith(&args[1], b)?;
            match functor.as_str() {
                "+" => x.checked_add(y),
                "-" => x.checked_sub(y),
                "*" => x.checked_mul(y),
                _ => None,
            }
        }
    }
}

fn as_unbound_var(t: &Term, b: &Binding) -> Option<VarId> {
    match t {
        Term::Var { id, .. } if !b.contains_key(id) => Some(*id),
        _ => None,
    }
}

fn compare(op: &str, x: i64, y: i64) -> bool {
    match op {
        "=<" => x <= y,
        "<" => x < y,
        ">=" => x >= y,
        ">" => x > y,
        "=:=" => x == y,
        "=\\=" => x != y,
        _ => unreachable!("not a comparison: {op}"),
    }
}

/// Evaluates one built-in constraint under a binding.
///
/// Comparisons need both sides to evaluate to integers. `is` binds its
/// left-hand variable to the evaluated right-hand side; `=:=` with exactly
/// one unbound variable on either side acts the same way, so both guard
/// styles `G is E+1` and `L1 =:= L+1` run.
pub fn eval_builtin(c: &Constraint, b: &Binding) -> GuardOutcome {
    match c.symbol.as_str() {
        "true" => GuardOutcome::Success(b.clone()),
        "false" => GuardOutcome::Failure,
        "is" => {
            let (lhs, rhs) = (&c.args[0], &c.args[1]);
            match eval_arith(rhs, b) {
                Some(v) => bind_or_test(lhs, v, b),
                None => GuardOutcome::Inapplicable(format!(
                    "right-hand side of `is` does not evaluate: {rhs:?}"
                )),
            }
        }
        "=" => {
            // syntactic match: binds a single unbound variable on either side
            let (lhs, rhs) = (&c.args[0], &c.args[1]);
            if let Some(id) = as_unbound_var(lhs, b) {
                let mut b2 = b.clone();
                b2.insert(id, resolve(rhs, b));
                return GuardOutcome::Success(b2);
            }
            if let Some(id) = as_unbound_var(rhs, b) {
                let mut b2 = b.clone();
                b2.insert(id, resolve(lhs, b));
                return GuardOutcome::Success(b2);
            }
            let (l, r) = (resolve(lhs, b), resolve(rhs, b));
            if !l.is_ground() || !r.is_ground() {
                return GuardOutcome::Inapplicable("`=` on non-ground terms".into());
            }
            if l == r {
                GuardOutcome::Success(b.clone())
            } else {
                GuardOutcome::Failure
            }
        }
        "=:=" => {
            let (lhs, rhs) = (&c.args[0], &c.args[1]);
            match (eval_arith(lhs, b), eval_arith(rhs, b)) {
                (Some(x), Some(y)) => {
                    if x == y {
                        GuardOutcome::Success(b.clone())
                    } else {
                        GuardOutcome::Failure
                    }
                }
                (None, Some(y)) if as_unbound_var(lhs, b).is_some() => {
                    bind_or_test(lhs, y, b)
                }
                (Some(x), None) if as_unbound_var(rhs, b).is_some() => {
                    bind_or_test(rhs, x, b)
                }
                _ => GuardOutcome::Inapplicable(format!(
                    "`=:=` operands do not evaluate: {lhs:?}, {rhs:?}"
                )),
            }
        }
        op @ ("=<" | "<" | ">=" | ">" | "=\\=") => {
            match (eval_arith(&c.args[0], b), eval_arith(&c.args[1], b)) {
                (Some(x), Some(y)) => {
                    if compare(op, x, y) {
                        GuardOutcome::Success(b.clone())
                    } else {
                        GuardOutcome::Failure
                    }
                }
                _ => GuardOutcome::Inapplicable(format!(
                    "comparison `{op}` on non-integer operands"
                )),
            }
        }
        other => GuardOutcome::Inapplicable(format!("unknown built-in `{other}`")),
    }
}

fn bind_or_test(lhs: &Term, value: i64, b: &Binding) -> GuardOutcome {
    match lhs {
        Term::Var { id, .. } => match b.get(id) {
            None => {
                let mut b2 = b.clone();
                b2.insert(*id, Term::Int(value));
                GuardOutcome::Success(b2)
            }
            Some(bound) => match eval_arith(bound, b) {
                Some(x) if x == value => GuardOutcome::Success(b.clone()),
                Some(_) => GuardOutcome::Failure,
                None => GuardOutcome::Inapplicable("bound to non-integer".into()),
            },
        },
        other => match eval_arith(other, b) {
            Some(x) if x == value => GuardOutcome::Success(b.clone()),
            Some(_) => GuardOutcome::Failure,
            None => GuardOutcome::Inapplicable("left-hand side does not evaluate".into()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Constraint;

    fn var(name: &str, id: u64) -> Term {
        Term::Var {
            name: name.into(),
            id: VarId(id),
        }
    }

    #[test]
    fn comparison_succeeds_and_fails() {
        let b = Binding::new();
        let c = Constraint::builtin("=<", vec![Term::Int(0), Term::Int(2)]);
        assert!(matches!(eval_builtin(&c, &b), GuardOutcome::Success(_)));
        let c = Constraint::builtin("=<", vec![Term::Int(2), Term::Int(0)]);
        assert_eq!(eval_builtin(&c, &b), GuardOutcome::Failure);
        let c = Constraint::builtin("<", vec![var("X", 0), var("X", 0)]);
        let mut b = Binding::new();
        b.insert(VarId(0), Term::Int(3));
        assert_eq!(eval_builtin(&c, &b), GuardOutcome::Failure);
    }

    #[test]
    fn eq_colon_eq_binds_one_fresh_variable() {
        // L1 =:= L+1 with L = 1 binds L1 = 2
        let mut b = Binding::new();
        b.insert(VarId(1), Term::Int(1));
        let c = Constraint::builtin(
            "=:=",
            vec![var("L1", 0), Term::compound("+", vec![var("L", 1), Term::Int(1)])],
        );
        match eval_builtin(&c, &b) {
            GuardOutcome::Success(b2) => assert_eq!(b2.get(&VarId(0)), Some(&Term::Int(2))),
            other => panic!("expected success, got {other:?}"),
        }
    }

    #[test]
    fn arith_evaluation() {
        let b = Binding::new();
        assert_eq!(
            eval_arith(&Term::compound("+", vec![Term::Int(1), Term::Int(1)]), &b),
            Some(2)
        );
        let mut b = Binding::new();
        b.insert(VarId(0), Term::Int(7));
        assert_eq!(eval_arith(&var("X", 0), &b), Some(7));
        assert_eq!(eval_arith(&var("Y", 9), &b), None);
    }

    #[test]
    fn unbound_comparison_is_inapplicable() {
        let b = Binding::new();
        let c = Constraint::builtin("<", vec![var("X", 0), Term::Int(1)]);
        assert!(matches!(
            eval_builtin(&c, &b),
            GuardOutcome::Inapplicable(_)
        ));
    }

    #[test]
    fn trichotomy_for_bound_integers() {
        let b = Binding::new();
        for (x, y) in [(1, 2), (2, 2), (3, 2)] {
            let results: Vec<bool> = ["<", "=:=", ">"]
                .iter()
                .map(|op| {
                    matches!(
                        eval_builtin(
                            &Constraint::builtin(*op, vec![Term::Int(x), Term::Int(y)]),
                            &b
                        ),
                        GuardOutcome::Success(_)
                    )
                })
                .collect();
            assert_eq!(results.iter().filter(|&&r| r).count(), 1);
        }
    }
}

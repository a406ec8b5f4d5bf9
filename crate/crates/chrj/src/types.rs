//! Core data types: terms, constraints, justifications, stores, rules.

use std::collections::BTreeSet;
use std::fmt;

/// Identifier of a logic variable, unique within one parsed clause or query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u64);

/// A justification: a unique identifier allocated from a monotone counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JustId(pub u64);

/// Identity of a constraint occurrence in a store (multiset identity).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StoreId(pub u64);

impl fmt::Display for JustId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for StoreId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// First-order term: the value language of constraint arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var { name: String, id: VarId },
    Atom(String),
    Int(i64),
    Compound { functor: String, args: Vec<Term> },
}

impl Term {
    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Term {
        debug_assert!(!args.is_empty(), "compound arity must be >= 1");
        Term::Compound {
            functor: functor.into(),
            args,
        }
    }

    pub fn atom(name: impl Into<String>) -> Term {
        Term::Atom(name.into())
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var { .. } => false,
            Term::Atom(_) | Term::Int(_) => true,
            Term::Compound { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    /// Collects the variable ids occurring in the term.
    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Term::Var { id, .. } => {
                out.insert(*id);
            }
            Term::Atom(_) | Term::Int(_) => {}
            Term::Compound { args, .. } => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }
}

/// An ordered duplicate-free set of justifications.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct JustSet {
    elems: Vec<JustId>,
}

impl JustSet {
    pub fn empty() -> JustSet {
        JustSet { elems: Vec::new() }
    }

    pub fn singleton(f: JustId) -> JustSet {
        JustSet { elems: vec![f] }
    }

    /// Builds a set from arbitrary elements, sorting and deduplicating.
    pub fn from_elems(mut elems: Vec<JustId>) -> JustSet {
        elems.sort();
        elems.dedup();
        JustSet { elems }
    }

    pub fn contains(&self, f: JustId) -> bool {
        self.elems.binary_search(&f).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = JustId> + '_ {
        self.elems.iter().copied()
    }

    pub fn is_subset(&self, other: &JustSet) -> bool {
        self.elems.iter().all(|f| other.contains(*f))
    }

    pub fn intersects(&self, other: &BTreeSet<JustId>) -> bool {
        self.elems.iter().any(|f| other.contains(f))
    }

    /// Checks the representation invariant: strictly ascending, no duplicates.
    pub fn is_well_formed(&self) -> bool {
        self.elems.windows(2).all(|w| w[0] < w[1])
    }
}

/// Ordered duplicate-free union of justification sets.
pub fn union_just<'a>(sets: impl IntoIterator<Item = &'a JustSet>) -> JustSet {
    let mut elems: Vec<JustId> = Vec::new();
    for s in sets {
        elems.extend(s.iter());
    }
    JustSet::from_elems(elems)
}

/// User-defined vs built-in constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    User,
    Builtin,
}

/// A predicate symbol applied to terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub symbol: String,
    pub args: Vec<Term>,
    pub kind: ConstraintKind,
}

/// Symbols reserved for the justification machinery; rejected in user programs.
pub const RESERVED_SYMBOLS: &[&str] = &["rem", "kill", "killc"];

impl Constraint {
    pub fn user(symbol: impl Into<String>, args: Vec<Term>) -> Constraint {
        Constraint {
            symbol: symbol.into(),
            args,
            kind: ConstraintKind::User,
        }
    }

    pub fn builtin(symbol: impl Into<String>, args: Vec<Term>) -> Constraint {
        Constraint {
            symbol: symbol.into(),
            args,
            kind: ConstraintKind::Builtin,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_true(&self) -> bool {
        self.kind == ConstraintKind::Builtin && self.symbol == "true" && self.args.is_empty()
    }

    pub fn is_false(&self) -> bool {
        self.kind == ConstraintKind::Builtin && self.symbol == "false" && self.args.is_empty()
    }

    pub fn is_reserved(&self) -> bool {
        RESERVED_SYMBOLS.contains(&self.symbol.as_str())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }
}

/// A live store constraint: a user constraint with its justification set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JustifiedConstraint {
    pub constraint: Constraint,
    pub just: JustSet,
    pub store_id: StoreId,
}

/// A remembered removed constraint: `rem(inner)^outer`.
///
/// `inner` carries the removed constraint's own justifications; `outer` is
/// the union over all head constraints of the removing rule instance, so
/// `inner.just` is always a subset of `outer`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemEntry {
    pub inner: JustifiedConstraint,
    pub outer: JustSet,
    pub store_id: StoreId,
}

/// Key preventing a propagation rule from firing twice on one constraint tuple.
pub type PropagationRecord = (usize, Vec<StoreId>);

/// The constraint store: live constraints, remembered removals, tombstones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Store {
    pub live: Vec<JustifiedConstraint>,
    pub remembered: Vec<RemEntry>,
    pub killed: BTreeSet<JustId>,
    next_store_id: u64,
    next_just_id: u64,
    pub(crate) history: BTreeSet<PropagationRecord>,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn fresh_store_id(&mut self) -> StoreId {
        let id = StoreId(self.next_store_id);
        self.next_store_id += 1;
        id
    }

    pub fn fresh_justification(&mut self) -> JustId {
        let id = JustId(self.next_just_id);
        self.next_just_id += 1;
        id
    }

    /// True when the given justification was allocated by this store.
    pub fn knows_justification(&self, f: JustId) -> bool {
        f.0 < self.next_just_id
    }

    pub fn add_live(&mut self, constraint: Constraint, just: JustSet) -> StoreId {
        debug_assert_eq!(constraint.kind, ConstraintKind::User);
        let store_id = self.fresh_store_id();
        self.live.push(JustifiedConstraint {
            constraint,
            just,
            store_id,
        });
        store_id
    }

    pub fn add_remembered(&mut self, inner: JustifiedConstraint, outer: JustSet) -> StoreId {
        debug_assert!(inner.just.is_subset(&outer));
        let store_id = self.fresh_store_id();
        self.remembered.push(RemEntry {
            inner,
            outer,
            store_id,
        });
        store_id
    }

    /// No live justification set and no rem outer set intersects the tombstones.
    pub fn is_settled(&self) -> bool {
        self.live.iter().all(|c| !c.just.intersects(&self.killed))
            && self
                .remembered
                .iter()
                .all(|r| !r.outer.intersects(&self.killed))
    }

    /// Checks the structural invariants of every justification set in the store.
    pub fn check_invariants(&self) -> Result<(), String> {
        for c in &self.live {
            if !c.just.is_well_formed() {
                return Err(format!("malformed justification set on {:?}", c));
            }
        }
        for r in &self.remembered {
            if !r.inner.just.is_well_formed() || !r.outer.is_well_formed() {
                return Err(format!("malformed justification set on {:?}", r));
            }
            if !r.inner.just.is_subset(&r.outer) {
                return Err(format!("rem inner set not a subset of outer: {:?}", r));
            }
        }
        Ok(())
    }
}

/// A parsed CHR rule: `name @ kept \ removed <=> guard | body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: Option<String>,
    pub kept: Vec<Constraint>,
    pub removed: Vec<Constraint>,
    pub guard: Vec<Constraint>,
    pub body: Vec<Constraint>,
}

impl Rule {
    pub fn head_len(&self) -> usize {
        self.kept.len() + self.removed.len()
    }

    pub fn is_propagation(&self) -> bool {
        self.removed.is_empty()
    }

    /// Body is the single literal `false`.
    pub fn body_fails(&self) -> bool {
        self.body.iter().any(Constraint::is_false)
    }
}

/// A justification-annotated rule produced by the source transformation.
///
/// Head position `i` (kept first, then removed) carries the symbolic
/// justification variable `F_i`; every body user constraint is annotated
/// with the union of all of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JRule {
    pub rule: Rule,
    /// One justification variable name per head position, kept then removed.
    pub head_just_vars: Vec<String>,
}

impl JRule {
    pub fn kept_just_vars(&self) -> &[String] {
        &self.head_just_vars[..self.rule.kept.len()]
    }

    pub fn removed_just_vars(&self) -> &[String] {
        &self.head_just_vars[self.rule.kept.len()..]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JProgram {
    pub rules: Vec<JRule>,
}

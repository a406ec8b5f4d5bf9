//! Pretty-printing of terms, rules, translated rules and stores.
//!
//! Store listings use the `##` surface syntax with justification ids
//! renamed to letters A, B, C, ... by first appearance, matching the
//! toplevel output of the reference implementation.

use std::collections::HashMap;

use crate::types::{
    Constraint, JProgram, JRule, JustId, JustSet, Program, Rule, Store, Term,
};

pub fn format_term(t: &Term) -> String {
    match t {
        Term::Var { name, .. } => name.clone(),
        Term::Atom(a) => a.clone(),
        Term::Int(n) => n.to_string(),
        Term::Compound { functor, args } => {
            if matches!(functor.as_str(), "+" | "-" | "*") && args.len() == 2 {
                format!("{}{}{}", format_term(&args[0]), functor, format_term(&args[1]))
            } else {
                let args: Vec<String> = args.iter().map(format_term).collect();
                format!("{}({})", functor, args.join(","))
            }
        }
    }
}

pub fn format_constraint(c: &Constraint) -> String {
    if c.args.is_empty() {
        return c.symbol.clone();
    }
    // infix built-ins print infix
    if c.args.len() == 2
        && matches!(
            c.symbol.as_str(),
            "=<" | "<" | ">=" | ">" | "=:=" | "=\\=" | "=" | "is"
        )
    {
        let sep = if c.symbol == "is" { " is " } else { c.symbol.as_str() };
        return format!(
            "{}{}{}",
            format_term(&c.args[0]),
            sep,
            format_term(&c.args[1])
        );
    }
    let args: Vec<String> = c.args.iter().map(format_term).collect();
    format!("{}({})", c.symbol, args.join(","))
}

fn format_conj(cs: &[Constraint]) -> String {
    cs.iter()
        .map(format_constraint)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Prints a rule back in the source syntax; `parse_program` round-trips it.
pub fn format_rule(r: &Rule) -> String {
    let mut out = String::new();
    if let Some(name) = &r.name {
        out.push_str(name);
        out.push_str(" @ ");
    }
    let body = if r.body.is_empty() {
        "true".to_string()
    } else {
        format_conj(&r.body)
    };
    let guard = if r.guard.is_empty() {
        String::new()
    } else {
        format!("{} | ", format_conj(&r.guard))
    };
    if r.removed.is_empty() {
        out.push_str(&format!("{} ==> {}{}.", format_conj(&r.kept), guard, body));
    } else if r.kept.is_empty() {
        out.push_str(&format!("{} <=> {}{}.", format_conj(&r.removed), guard, body));
    } else {
        out.push_str(&format!(
            "{} \\ {} <=> {}{}.",
            format_conj(&r.kept),
            format_conj(&r.removed),
            guard,
            body
        ));
    }
    out
}

pub fn format_program(p: &Program) -> String {
    p.rules
        .iter()
        .map(format_rule)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Prints a translated rule in the `##`/`union` surface syntax, e.g.
///
/// ```text
/// pp @ p(X,Y,L1)##F1 \ p(X,Y,L2)##F2 <=> L1=<L2 |
///      union([F1,F2],Fs), rem(p(X,Y,L2)##F2)##Fs, ...
/// ```
pub fn format_jrule(jr: &JRule) -> String {
    let r = &jr.rule;
    let kept_vars = jr.kept_just_vars();
    let removed_vars = jr.removed_just_vars();
    let annot = |c: &Constraint, v: &String| format!("{}##{}", format_constraint(c), v);

    let kept: Vec<String> = r.kept.iter().zip(kept_vars).map(|(c, v)| annot(c, v)).collect();
    let removed: Vec<String> = r
        .removed
        .iter()
        .zip(removed_vars)
        .map(|(c, v)| annot(c, v))
        .collect();

    let mut out = String::new();
    if let Some(name) = &r.name {
        out.push_str(name);
        out.push_str(" @ ");
    }
    if removed.is_empty() {
        out.push_str(&format!("{} ==> ", kept.join(", ")));
    } else if kept.is_empty() {
        out.push_str(&format!("{} <=> ", removed.join(", ")));
    } else {
        out.push_str(&format!("{} \\ {} <=> ", kept.join(", "), removed.join(", ")));
    }

    let guard = if r.guard.is_empty() {
        "true".to_string()
    } else {
        format_conj(&r.guard)
    };
    out.push_str(&guard);
    out.push_str(" | ");

    let union_var = "Fs";
    let mut body_parts = vec![format!(
        "union([{}],{})",
        jr.head_just_vars.join(","),
        union_var
    )];
    for (c, v) in r.removed.iter().zip(removed_vars) {
        body_parts.push(format!("rem({})##{}", annot(c, v), union_var));
    }
    for c in &r.body {
        if c.is_false() {
            body_parts.push("false".to_string());
        } else {
            body_parts.push(format!("{}##{}", format_constraint(c), union_var));
        }
    }
    out.push_str(&body_parts.join(", "));
    out.push('.');
    out
}

pub fn format_jprogram(p: &JProgram) -> String {
    p.rules
        .iter()
        .map(format_jrule)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Excel-style letter names: A..Z, AA, AB, ...
fn letter_name(mut n: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (n % 26) as u8);
        n /= 26;
        if n == 0 {
            break;
        }
        n -= 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

/// Assigns letters to justification ids by first appearance.
#[derive(Default)]
pub struct JustNames {
    names: HashMap<JustId, String>,
}

impl JustNames {
    pub fn new() -> JustNames {
        JustNames::default()
    }

    pub fn name(&mut self, f: JustId) -> String {
        let next = self.names.len();
        self.names
            .entry(f)
            .or_insert_with(|| letter_name(next))
            .clone()
    }

    fn set(&mut self, s: &JustSet) -> String {
        let names: Vec<String> = s.iter().map(|f| self.name(f)).collect();
        format!("[{}]", names.join(","))
    }
}

/// Formats the store: live constraints first, then remembered entries,
/// each sorted by store id. Re-parses under `parse_annotated_store`.
pub fn format_store(store: &Store) -> String {
    let mut names = JustNames::new();
    format_store_with(store, &mut names)
}

pub fn format_store_with(store: &Store, names: &mut JustNames) -> String {
    let mut lines = Vec::new();
    for jc in &store.live {
        lines.push(format!(
            "{} ## {}",
            format_constraint(&jc.constraint),
            names.set(&jc.just)
        ));
    }
    for entry in &store.remembered {
        lines.push(format!(
            "rem({} ## {}) ## {}",
            format_constraint(&entry.inner.constraint),
            names.set(&entry.inner.just),
            names.set(&entry.outer)
        ));
    }
    if lines.is_empty() {
        "<empty store>".to_string()
    } else {
        format!("{}.", lines.join(",\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_annotated_store, parse_program, AnnotatedItem};

    #[test]
    fn rule_printing_round_trips() {
        let texts = [
            "min(N) \\ min(M) <=> N=<M | true.",
            "e @ e(X,Y) ==> p(X,Y,1).",
            "ep @ e(X,Y), p(Y,Z,L) ==> L1=:=L+1 | p(X,Z,L1).",
            "c(X) <=> false.",
        ];
        for text in texts {
            let p1 = parse_program(text).unwrap();
            let printed = format_program(&p1);
            let p2 = parse_program(&printed).unwrap();
            assert_eq!(format_program(&p2), printed, "failed on {text}");
        }
    }

    #[test]
    fn translated_min_rule_prints_annotated_surface_syntax() {
        let p = parse_program("min(N) \\ min(M) <=> N=<M | true.").unwrap();
        let jr = crate::transformer::translate_rule(&p.rules[0]);
        assert_eq!(
            format_jrule(&jr),
            "min(N)##F1 \\ min(M)##F2 <=> N=<M | union([F1,F2],Fs), rem(min(M)##F2)##Fs."
        );
    }

    #[test]
    fn letter_names_extend_past_z() {
        assert_eq!(letter_name(0), "A");
        assert_eq!(letter_name(25), "Z");
        assert_eq!(letter_name(26), "AA");
        assert_eq!(letter_name(27), "AB");
    }

    #[test]
    fn store_listing_reparses() {
        use crate::engine::{Engine, StepLimit};
        use crate::transformer::{annotate_query, translate_program};
        use crate::types::Store;

        let p = parse_program("min(N) \\ min(M) <=> N=<M | true.").unwrap();
        let jp = translate_program(&p).unwrap();
        let goal = crate::parser::parse_query("min(1), min(0), min(2)").unwrap();
        let mut store = Store::new();
        annotate_query(&goal, &mut store);
        let result = Engine::new(&jp).run(store, StepLimit::default()).unwrap();
        let listing = format_store(&result.store);
        let items = parse_annotated_store(&listing).unwrap();
        assert_eq!(items.len(), 3);
        assert!(matches!(items[0], AnnotatedItem::Live(..)));
        assert!(matches!(items[1], AnnotatedItem::Rem(..)));
    }
}

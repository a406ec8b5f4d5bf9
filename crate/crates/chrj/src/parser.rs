//! Parser for the CHR dialect: programs, queries and annotated stores.
//!
//! Prolog-style lexical conventions: lowercase identifiers are atoms and
//! functors, uppercase (or `_`) identifiers are variables, `%` starts a
//! comment that runs to end of line. Clauses end with `.`.

use std::collections::HashMap;

use crate::builtins::BUILTIN_WHITELIST;
use crate::types::{Constraint, ConstraintKind, Program, Rule, Term, VarId};

/// Position of a token in the source text, for error reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("{message} at line {}, column {}", span.line, span.column)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Var(String),
    Int(i64),
    At,
    Backslash,
    Simp,  // <=>
    Prop,  // ==>
    Bar,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Dot,
    Plus,
    Minus,
    Star,
    Annot, // ##
    Op(String), // relational operators: =< < >= > =:= =\= =
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    macro_rules! span {
        () => {
            SourceSpan {
                line,
                column: col,
                offset: i,
            }
        };
    }
    while i < bytes.len() {
        let c = bytes[i] as char;
        let sp = span!();
        match c {
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            '%' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            '@' => {
                toks.push(Token { tok: Tok::At, span: sp });
                i += 1;
                col += 1;
            }
            '\\' => {
                toks.push(Token {
                    tok: Tok::Backslash,
                    span: sp,
                });
                i += 1;
                col += 1;
            }
            ',' => {
                toks.push(Token {
                    tok: Tok::Comma,
                    span: sp,
                });
                i += 1;
                col += 1;
            }
            '(' => {
                toks.push(Token {
                    tok: Tok::LParen,
                    span: sp,
                });
                i += 1;
                col += 1;
            }
            ')' => {
                toks.push(Token {
                    tok: Tok::RParen,
                    span: sp,
                });
                i += 1;
                col += 1;
            }
            '[' => {
                toks.push(Token {
                    tok: Tok::LBracket,
                    span: sp,
                });
                i += 1;
                col += 1;
            }
            ']' => {
                toks.push(Token {
                    tok: Tok::RBracket,
                    span: sp,
                });
                i += 1;
                col += 1;
            }
            '.' => {
                toks.push(Token {
                    tok: Tok::Dot,
                    span: sp,
                });
                i += 1;
                col += 1;
            }
            '+' => {
                toks.push(Token {
                    tok: Tok::Plus,
                    span: sp,
                });
                i += 1;
                col += 1;
            }
            '*' => {
                toks.push(Token {
                    tok: Tok::Star,
                    span: sp,
                });
                i += 1;
                col += 1;
            }
            '-' => {
                toks.push(Token {
                    tok: Tok::Minus,
                    span: sp,
                });
                i += 1;
                col += 1;
            }
            '|' => {
                toks.push(Token {
                    tok: Tok::Bar,
                    span: sp,
                });
                i += 1;
                col += 1;
            }
            '#' => {
                if text[i..].starts_with("##") {
                    toks.push(Token {
                        tok: Tok::Annot,
                        span: sp,
                    });
                    i += 2;
                    col += 2;
                } else {
                    return Err(ParseError {
                        message: "unexpected character `#`".into(),
                        span: sp,
                    });
                }
            }
            '<' => {
                if text[i..].starts_with("<=>") {
                    toks.push(Token {
                        tok: Tok::Simp,
                        span: sp,
                    });
                    i += 3;
                    col += 3;
                } else {
                    toks.push(Token {
                        tok: Tok::Op("<".into()),
                        span: sp,
                    });
                    i += 1;
                    col += 1;
                }
            }
            '>' => {
                if text[i..].starts_with(">=") {
                    toks.push(Token {
                        tok: Tok::Op(">=".into()),
                        span: sp,
                    });
                    i += 2;
                    col += 2;
                } else {
                    toks.push(Token {
                        tok: Tok::Op(">".into()),
                        span: sp,
                    });
                    i += 1;
                    col += 1;
                }
            }
            '=' => {
                for (pat, tok) in [
                    ("==>", Tok::Prop),
                    ("=<", Tok::Op("=<".into())),
                    ("=:=", Tok::Op("=:=".into())),
                    ("=\\=", Tok::Op("=\\=".into())),
                    ("=", Tok::Op("=".into())),
                ] {
                    if text[i..].starts_with(pat) {
                        toks.push(Token {
                            tok,
                            span: sp,
                        });
                        i += pat.len();
                        col += pat.len();
                        break;
                    }
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                let n: i64 = text[start..i].parse().map_err(|_| ParseError {
                    message: "integer literal out of range".into(),
                    span: sp,
                })?;
                toks.push(Token {
                    tok: Tok::Int(n),
                    span: sp,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                    col += 1;
                }
                let word = &text[start..i];
                let tok = if c.is_ascii_uppercase() || c == '_' {
                    Tok::Var(word.to_string())
                } else {
                    Tok::Name(word.to_string())
                };
                toks.push(Token { tok, span: sp });
            }
            other => {
                return Err(ParseError {
                    message: format!("unexpected character `{other}`"),
                    span: sp,
                });
            }
        }
    }
    Ok(toks)
}

/// Allocates clause-local variable ids from a shared counter, so that two
/// clauses mentioning the same variable name get distinct ids.
struct VarScope<'a> {
    next: &'a mut u64,
    names: HashMap<String, VarId>,
}

impl<'a> VarScope<'a> {
    fn new(next: &'a mut u64) -> VarScope<'a> {
        VarScope {
            next,
            names: HashMap::new(),
        }
    }

    fn get(&mut self, name: &str) -> Term {
        // every `_` occurrence is a fresh anonymous variable
        let id = if name == "_" {
            let id = VarId(*self.next);
            *self.next += 1;
            id
        } else {
            *self.names.entry(name.to_string()).or_insert_with(|| {
                let id = VarId(*self.next);
                *self.next += 1;
                id
            })
        };
        Term::Var {
            name: name.to_string(),
            id,
        }
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    next_var: u64,
    _text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Parser<'a>, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            next_var: 0,
            _text: text,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> SourceSpan {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map(|t| t.span)
            .unwrap_or(SourceSpan {
                line: 1,
                column: 1,
                offset: 0,
            })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn err(&self, message: String) -> ParseError {
        ParseError {
            message,
            span: self.span(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    // expr := mul (('+'|'-') mul)*
    fn parse_expr(&mut self, scope: &mut VarScope) -> Result<Term, ParseError> {
        let mut lhs = self.parse_mul(scope)?;
        loop {
            let functor = match self.peek() {
                Some(Tok::Plus) => "+",
                Some(Tok::Minus) => "-",
                _ => break,
            };
            self.pos += 1;
            let rhs = self.parse_mul(scope)?;
            lhs = Term::compound(functor, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn parse_mul(&mut self, scope: &mut VarScope) -> Result<Term, ParseError> {
        let mut lhs = self.parse_primary(scope)?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.parse_primary(scope)?;
            lhs = Term::compound("*", vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn parse_primary(&mut self, scope: &mut VarScope) -> Result<Term, ParseError> {
        match self.bump() {
            Some(Tok::Int(n)) => Ok(Term::Int(n)),
            Some(Tok::Minus) => match self.bump() {
                Some(Tok::Int(n)) => Ok(Term::Int(-n)),
                _ => Err(self.err("expected integer after unary `-`".into())),
            },
            Some(Tok::Var(name)) => Ok(scope.get(&name)),
            Some(Tok::Name(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let mut args = vec![self.parse_expr(scope)?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        args.push(self.parse_expr(scope)?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Term::compound(name, args))
                } else {
                    Ok(Term::Atom(name))
                }
            }
            Some(Tok::LParen) => {
                let t = self.parse_expr(scope)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.err("expected a term".into())),
        }
    }

    /// One conjunct: either `expr relop expr` (built-in), an `is` call, or a
    /// user constraint / `true` / `false`.
    fn parse_goal_atom(&mut self, scope: &mut VarScope) -> Result<Constraint, ParseError> {
        let span = self.span();
        let lhs = self.parse_expr(scope)?;
        // infix built-ins
        let op = match self.peek() {
            Some(Tok::Op(op)) => Some(op.clone()),
            Some(Tok::Name(n)) if n == "is" => Some("is".to_string()),
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let rhs = self.parse_expr(scope)?;
            return Ok(Constraint::builtin(op, vec![lhs, rhs]));
        }
        match lhs {
            Term::Atom(name) if name == "true" || name == "false" => {
                Ok(Constraint::builtin(name, vec![]))
            }
            Term::Atom(name) => Ok(Constraint::user(name, vec![])),
            Term::Compound { functor, args } => {
                if matches!(functor.as_str(), "+" | "-" | "*") {
                    return Err(ParseError {
                        message: "arithmetic expression is not a constraint".into(),
                        span,
                    });
                }
                Ok(Constraint::user(functor, args))
            }
            _ => Err(ParseError {
                message: "expected a constraint".into(),
                span,
            }),
        }
    }

    fn parse_conj(&mut self, scope: &mut VarScope) -> Result<Vec<Constraint>, ParseError> {
        let mut out = vec![self.parse_goal_atom(scope)?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            out.push(self.parse_goal_atom(scope)?);
        }
        Ok(out)
    }

    fn parse_rule(&mut self) -> Result<Rule, ParseError> {
        let mut next_var = std::mem::take(&mut self.next_var);
        let mut scope = VarScope::new(&mut next_var);

        // optional `name @` prefix
        let name = if let (Some(Tok::Name(n)), Some(Tok::At)) =
            (self.peek(), self.toks.get(self.pos + 1).map(|t| &t.tok))
        {
            let n = n.clone();
            self.pos += 2;
            Some(n)
        } else {
            None
        };

        let rule_span = self.span();
        let first = self.parse_conj(&mut scope)?;
        let (kept, removed, is_prop) = match self.bump() {
            Some(Tok::Backslash) => {
                let removed = self.parse_conj(&mut scope)?;
                self.expect(Tok::Simp, "`<=>`")?;
                (first, removed, false)
            }
            Some(Tok::Simp) => (Vec::new(), first, false),
            Some(Tok::Prop) => (first, Vec::new(), true),
            _ => return Err(self.err("expected `\\`, `<=>` or `==>`".into())),
        };
        let _ = is_prop;

        // `guard | body` or bare body
        let mut first_conj = self.parse_conj(&mut scope)?;
        let (guard, body) = if self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            let body = self.parse_conj(&mut scope)?;
            (first_conj, body)
        } else {
            (Vec::new(), std::mem::take(&mut first_conj))
        };
        self.expect(Tok::Dot, "`.` at end of rule")?;
        self.next_var = next_var;

        for c in kept.iter().chain(removed.iter()) {
            if c.kind != ConstraintKind::User {
                return Err(ParseError {
                    message: format!("built-in `{}` not allowed in a rule head", c.symbol),
                    span: rule_span,
                });
            }
        }
        for c in &guard {
            if c.kind != ConstraintKind::Builtin {
                return Err(ParseError {
                    message: format!("`{}` is not a built-in guard constraint", c.symbol),
                    span: rule_span,
                });
            }
            if !BUILTIN_WHITELIST.contains(&c.symbol.as_str()) {
                return Err(ParseError {
                    message: format!("unknown built-in `{}` in guard", c.symbol),
                    span: rule_span,
                });
            }
        }
        // `true` in the guard is vacuous
        let guard: Vec<Constraint> = guard.into_iter().filter(|c| !c.is_true()).collect();

        let mut out_body = Vec::new();
        for c in body {
            if c.is_true() {
                continue;
            }
            if c.is_false() {
                out_body.push(c);
                continue;
            }
            if c.kind != ConstraintKind::User {
                return Err(ParseError {
                    message: format!(
                        "built-in `{}` not allowed in a rule body (only true/false)",
                        c.symbol
                    ),
                    span: rule_span,
                });
            }
            out_body.push(c);
        }

        for c in kept
            .iter()
            .chain(removed.iter())
            .chain(out_body.iter())
        {
            if c.is_reserved() {
                return Err(ParseError {
                    message: format!("`{}` is a reserved constraint symbol", c.symbol),
                    span: rule_span,
                });
            }
        }
        if kept.is_empty() && removed.is_empty() {
            return Err(ParseError {
                message: "rule head must be non-empty".into(),
                span: rule_span,
            });
        }

        Ok(Rule {
            name,
            kept,
            removed,
            guard,
            body: out_body,
        })
    }
}

/// Parses a `.chr` program: a sequence of `.`-terminated rules.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(text)?;
    let mut rules = Vec::new();
    while !p.at_end() {
        rules.push(p.parse_rule()?);
    }
    Ok(Program { rules })
}

/// Parses a query: a comma-separated conjunction of user constraints.
pub fn parse_query(text: &str) -> Result<Vec<Constraint>, ParseError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut p = Parser::new(text)?;
    let mut next_var = 0u64;
    let mut scope = VarScope::new(&mut next_var);
    let goal = p.parse_conj(&mut scope)?;
    if p.peek() == Some(&Tok::Dot) {
        p.pos += 1;
    }
    if !p.at_end() {
        return Err(p.err("trailing input after query".into()));
    }
    for c in &goal {
        if c.kind != ConstraintKind::User {
            return Err(ParseError {
                message: format!("built-in `{}` not allowed in a query", c.symbol),
                span: SourceSpan {
                    line: 1,
                    column: 1,
                    offset: 0,
                },
            });
        }
        if c.is_reserved() {
            return Err(ParseError {
                message: format!("`{}` is a reserved constraint symbol", c.symbol),
                span: SourceSpan {
                    line: 1,
                    column: 1,
                    offset: 0,
                },
            });
        }
    }
    Ok(goal)
}

/// Parses a single ground constraint, e.g. a `killc` target.
pub fn parse_constraint(text: &str) -> Result<Constraint, ParseError> {
    let goal = parse_query(text)?;
    match goal.len() {
        1 => Ok(goal.into_iter().next().unwrap()),
        _ => Err(ParseError {
            message: "expected exactly one constraint".into(),
            span: SourceSpan {
                line: 1,
                column: 1,
                offset: 0,
            },
        }),
    }
}

/// One item of an annotated store listing, as printed by `show`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnnotatedItem {
    /// `c(...) ## [J,...]`
    Live(Constraint, Vec<String>),
    /// `rem(c(...) ## [J,...]) ## [J,...]`
    Rem(Constraint, Vec<String>, Vec<String>),
}

/// Parses the `##`-annotated store syntax emitted by the pretty-printer,
/// used to round-trip `show` output. Justifications are symbolic names.
pub fn parse_annotated_store(text: &str) -> Result<Vec<AnnotatedItem>, ParseError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut p = Parser::new(text)?;
    let mut next_var = 0u64;
    let mut items = Vec::new();
    loop {
        let mut scope = VarScope::new(&mut next_var);
        let item = if let (Some(Tok::Name(n)), Some(Tok::LParen)) =
            (p.peek(), p.toks.get(p.pos + 1).map(|t| &t.tok))
        {
            if n == "rem" {
                // rem(c(...) ## [J,...]) ## [J,...]
                p.pos += 2;
                let inner = p.parse_goal_atom(&mut scope)?;
                p.expect(Tok::Annot, "`##`")?;
                let inner_justs = p.parse_just_list()?;
                p.expect(Tok::RParen, "`)`")?;
                p.expect(Tok::Annot, "`##`")?;
                let outer_justs = p.parse_just_list()?;
                AnnotatedItem::Rem(inner, inner_justs, outer_justs)
            } else {
                let c = p.parse_goal_atom(&mut scope)?;
                p.expect(Tok::Annot, "`##`")?;
                let justs = p.parse_just_list()?;
                AnnotatedItem::Live(c, justs)
            }
        } else {
            let c = p.parse_goal_atom(&mut scope)?;
            p.expect(Tok::Annot, "`##`")?;
            let justs = p.parse_just_list()?;
            AnnotatedItem::Live(c, justs)
        };
        items.push(item);
        match p.peek() {
            Some(Tok::Comma) => {
                p.pos += 1;
            }
            Some(Tok::Dot) => {
                p.pos += 1;
                break;
            }
            None => break,
            _ => return Err(p.err("expected `,` or end of store listing".into())),
        }
    }
    Ok(items)
}

impl Parser<'_> {
    fn parse_just_list(&mut self) -> Result<Vec<String>, ParseError> {
        self.expect(Tok::LBracket, "`[`")?;
        let mut out = Vec::new();
        if self.peek() != Some(&Tok::RBracket) {
            loop {
                match self.bump() {
                    Some(Tok::Var(v)) => out.push(v),
                    Some(Tok::Name(n)) => out.push(n),
                    Some(Tok::Int(n)) => out.push(n.to_string()),
                    _ => return Err(self.err("expected justification identifier".into())),
                }
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket, "`]`")?;
        Ok(out)
    }
}

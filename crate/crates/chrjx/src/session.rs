//! Interactive session state shared by the REPL and the one-shot runner.

use std::collections::VecDeque;

use chrj::engine::{Engine, EngineError, RunResult, StepLimit, TraceEvent};
use chrj::parser::{parse_program, parse_query, ParseError};
use chrj::printer::{format_constraint, format_store};
use chrj::retraction::{kill, killc};
use chrj::transformer::{annotate_query, translate_program, TransformError};
use chrj::types::{Constraint, JProgram, JustId, Store};

const TRACE_CAPACITY: usize = 4096;

#[derive(Debug)]
pub enum SessionError {
    Parse(ParseError),
    Transform(TransformError),
    StepLimit,
    NoProgram,
    Msg(String),
}

impl std::error::Error for SessionError {}

impl std::fmt::Display for SessionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SessionError::Parse(e) => write!(f, "{e}"),
            SessionError::Transform(e) => write!(f, "{e}"),
            SessionError::StepLimit => write!(f, "step limit exceeded (nontermination?)"),
            SessionError::NoProgram => write!(f, "no program loaded"),
            SessionError::Msg(m) => write!(f, "{m}"),
        }
    }
}

impl From<ParseError> for SessionError {
    fn from(e: ParseError) -> Self {
        SessionError::Parse(e)
    }
}

impl From<TransformError> for SessionError {
    fn from(e: TransformError) -> Self {
        SessionError::Transform(e)
    }
}

pub struct Session {
    pub program: Option<JProgram>,
    pub store: Store,
    /// query constraint -> justification, for kill-by-name and `why`
    pub mapping: Vec<(Constraint, JustId)>,
    pub trace: VecDeque<TraceEvent>,
    pub limit: StepLimit,
    /// remaining killc alternatives: base store plus untried producer kills
    pending: Option<(Store, Vec<JustId>)>,
}

impl Session {
    pub fn new() -> Session {
        Session {
            program: None,
            store: Store::new(),
            mapping: Vec::new(),
            trace: VecDeque::new(),
            limit: StepLimit::default(),
            pending: None,
        }
    }

    pub fn load(&mut self, text: &str) -> Result<(), SessionError> {
        let prog = parse_program(text)?;
        self.program = Some(translate_program(&prog)?);
        self.reset_store();
        Ok(())
    }

    pub fn reset_store(&mut self) {
        self.store = Store::new();
        self.mapping.clear();
        self.trace.clear();
        self.pending = None;
    }

    fn absorb(&mut self, result: RunResult) {
        self.store = result.store;
        for ev in result.trace {
            if self.trace.len() == TRACE_CAPACITY {
                self.trace.pop_front();
            }
            self.trace.push_back(ev);
        }
    }

    fn run_result(
        &mut self,
        result: Result<RunResult, EngineError>,
    ) -> Result<(), SessionError> {
        match result {
            Ok(r) => {
                self.absorb(r);
                Ok(())
            }
            Err(EngineError::StepLimit { partial, .. }) => {
                self.absorb(*partial);
                Err(SessionError::StepLimit)
            }
        }
    }

    fn jprog(&self) -> Result<&JProgram, SessionError> {
        self.program.as_ref().ok_or(SessionError::NoProgram)
    }

    /// Parses and runs a query goal against the current store (cumulative:
    /// `add` and `query` are the same operation on a live session).
    pub fn query(&mut self, text: &str) -> Result<(), SessionError> {
        let goal = parse_query(text)?;
        let jprog = self.jprog()?.clone();
        let mut store = std::mem::take(&mut self.store);
        self.mapping.extend(annotate_query(&goal, &mut store));
        self.pending = None;
        self.run_result(Engine::new(&jprog).run(store, self.limit))
    }

    pub fn kill(&mut self, f: JustId) -> Result<(), SessionError> {
        let jprog = self.jprog()?.clone();
        let store = std::mem::take(&mut self.store);
        self.pending = None;
        self.run_result(kill(f, store, &jprog, self.limit))
    }

    /// Resolves `target` as a justification id or a query-constraint text.
    pub fn kill_target(&mut self, target: &str) -> Result<(), SessionError> {
        if let Ok(id) = target.parse::<u64>() {
            return self.kill(JustId(id));
        }
        let c = chrj::parser::parse_constraint(target)?;
        let f = self
            .mapping
            .iter()
            .find(|(qc, _)| *qc == c)
            .map(|(_, f)| *f)
            .ok_or_else(|| {
                SessionError::Msg(format!(
                    "no query constraint {} on record",
                    format_constraint(&c)
                ))
            })?;
        self.kill(f)
    }

    /// Applies the first killc alternative; stash the rest for `next`.
    pub fn killc(&mut self, pattern: &Constraint) -> Result<usize, SessionError> {
        let jprog = self.jprog()?.clone();
        let mut alts = killc(pattern, &self.store, &jprog, self.limit);
        if let Some(diag) = alts.diagnostic.take() {
            return Err(SessionError::Msg(diag));
        }
        let base = std::mem::take(&mut self.store);
        let choices: Vec<JustId> = alts.choices().to_vec();
        let first = choices[0];
        let remaining = choices[1..].to_vec();
        let n_rest = remaining.len();
        self.pending = if remaining.is_empty() {
            None
        } else {
            Some((base.clone(), remaining))
        };
        self.run_result(kill(first, base, &jprog, self.limit))?;
        Ok(n_rest)
    }

    /// Switches to the next killc alternative, if any.
    pub fn next_alternative(&mut self) -> Result<usize, SessionError> {
        let jprog = self.jprog()?.clone();
        let (base, mut remaining) = self
            .pending
            .take()
            .ok_or_else(|| SessionError::Msg("no pending alternatives".into()))?;
        let f = remaining.remove(0);
        let n_rest = remaining.len();
        if !remaining.is_empty() {
            self.pending = Some((base.clone(), remaining));
        }
        self.run_result(kill(f, base, &jprog, self.limit))?;
        Ok(n_rest)
    }

    /// All killc alternatives as settled stores, without touching the session.
    pub fn killc_all(&mut self, pattern: &Constraint) -> Result<Vec<Store>, SessionError> {
        let jprog = self.jprog()?.clone();
        let alts = killc(pattern, &self.store, &jprog, self.limit);
        if alts.diagnostic.is_some() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for result in alts {
            match result {
                Ok(r) => out.push(r.store),
                Err(EngineError::StepLimit { .. }) => return Err(SessionError::StepLimit),
            }
        }
        Ok(out)
    }

    /// Justification set of the first matching live constraint, mapped back
    /// to the query constraints those justifications annotate.
    pub fn why(&self, pattern: &Constraint) -> Option<(chrj::types::JustSet, Vec<String>)> {
        let jc = self.store.live.iter().find(|jc| jc.constraint == *pattern)?;
        let origins = jc
            .just
            .iter()
            .map(|f| {
                self.mapping
                    .iter()
                    .find(|(_, g)| *g == f)
                    .map(|(c, _)| format_constraint(c))
                    .unwrap_or_else(|| format!("<justification {f}>"))
            })
            .collect();
        Some((jc.just.clone(), origins))
    }

    pub fn show(&self) -> String {
        format_store(&self.store)
    }

    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for ev in &self.trace {
            out.push_str(&ev.to_string());
            out.push('\n');
        }
        out
    }
}

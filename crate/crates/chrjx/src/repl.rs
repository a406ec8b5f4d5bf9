//! Interactive loop: load programs, run queries, retract constraints live.

use std::io::{BufRead, Write};

use chrj::parser::parse_constraint;
use chrj::printer::format_constraint;

use crate::session::{Session, SessionError};

const HELP: &str = "\
commands:
  load <file>         load a .chr program (resets the store)
  query <goal>        run a comma-separated constraint goal
  add <goal>          add more constraints to the running store
  kill <justid|name>  retract a justification or a query constraint
  killc <constraint>  logically retract a (possibly derived) constraint
  next                switch to the next killc alternative
  why <constraint>    show the justifications of a live constraint
  show                print the store
  trace               print the recent rule-firing trace
  reset               clear the store, keep the program
  help                this text
  quit";

pub fn run_repl() {
    let stdin = std::io::stdin();
    let mut session = Session::new();
    println!("chrjx repl; `help` lists commands");
    loop {
        print!("chrjx> ");
        std::io::stdout().flush().ok();
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) | Err(_) => break,
            Ok(_) => {}
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "quit" || line == "exit" {
            break;
        }
        match repl_command(line, &mut session) {
            Ok(output) => {
                if !output.is_empty() {
                    println!("{output}");
                }
            }
            Err(e) => println!("error: {e}"),
        }
    }
}

/// Executes one REPL line against the session; errors leave it unchanged
/// apart from the store of a run that hit the step limit.
pub fn repl_command(line: &str, session: &mut Session) -> Result<String, SessionError> {
    let (cmd, rest) = match line.split_once(char::is_whitespace) {
        Some((c, r)) => (c, r.trim()),
        None => (line, ""),
    };
    match cmd {
        "help" => Ok(HELP.to_string()),
        "load" => {
            let text = std::fs::read_to_string(rest)
                .map_err(|e| SessionError::Msg(format!("cannot read {rest}: {e}")))?;
            session.load(&text)?;
            Ok(format!("loaded {rest}"))
        }
        "query" | "add" => {
            session.query(rest)?;
            Ok(session.show())
        }
        "kill" => {
            session.kill_target(rest)?;
            Ok(session.show())
        }
        "killc" => {
            let pattern = parse_constraint(rest)?;
            let remaining = session.killc(&pattern)?;
            let mut out = session.show();
            if remaining > 0 {
                out.push_str(&format!(
                    "\n% {remaining} more alternative(s); `next` to see them"
                ));
            }
            Ok(out)
        }
        "next" => {
            let remaining = session.next_alternative()?;
            let mut out = session.show();
            if remaining > 0 {
                out.push_str(&format!("\n% {remaining} more alternative(s)"));
            }
            Ok(out)
        }
        "why" => {
            let pattern = parse_constraint(rest)?;
            match session.why(&pattern) {
                Some((justs, origins)) => {
                    let ids: Vec<String> = justs.iter().map(|f| f.to_string()).collect();
                    Ok(format!(
                        "{} ## [{}] from {}",
                        format_constraint(&pattern),
                        ids.join(","),
                        origins.join(", ")
                    ))
                }
                None => Ok(format!(
                    "no live constraint matches {}",
                    format_constraint(&pattern)
                )),
            }
        }
        "show" => Ok(session.show()),
        "trace" => Ok(session.trace_text()),
        "reset" => {
            session.reset_store();
            Ok("store cleared".to_string())
        }
        other => Err(SessionError::Msg(format!(
            "unknown command `{other}`; try `help`"
        ))),
    }
}

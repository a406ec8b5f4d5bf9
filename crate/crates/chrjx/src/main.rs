mod repl;
mod session;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use chrj::engine::StepLimit;
use chrj::oracle::{
    check_lemma1, check_theorem2_all_prefixes, check_theorem3, InstanceGen, Verdict,
};
use chrj::parser::{parse_constraint, parse_program, parse_query};
use chrj::printer::{format_constraint, format_jprogram};
use chrj::transformer::translate_program;

use session::Session;

#[derive(Parser)]
#[command(name = "chrjx", about = "CHR engine with justifications and logical retraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a program, run a query, optionally retract, print the store
    Run {
        /// Path to the .chr program
        file: PathBuf,
        /// Query: comma-separated constraints
        #[arg(short, long, default_value = "")]
        query: String,
        /// Retract by justification id or by query constraint text; repeatable
        #[arg(long = "kill")]
        kills: Vec<String>,
        /// Logically retract a (possibly derived) constraint
        #[arg(long)]
        killc: Option<String>,
        /// Print every killc alternative instead of the first
        #[arg(long)]
        all: bool,
        /// Step limit
        #[arg(long, default_value_t = 100_000)]
        limit: usize,
        /// Write the event trace to this file
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print the justification-annotated translation of a program
    Translate { file: PathBuf },
    /// Check a theorem on a program/query, optionally plus random instances
    Check {
        #[arg(long)]
        theorem: TheoremId,
        #[arg(long)]
        file: PathBuf,
        #[arg(short, long)]
        query: String,
        /// Seed for an additional randomized corpus
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random instances when --seed is given
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 100_000)]
        limit: usize,
    },
    /// Interactive session
    Repl,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremId {
    /// Conservativity of the translation
    #[value(name = "1")]
    Conservativity,
    /// Commutation of kill with program rules
    #[value(name = "2")]
    Commutation,
    /// Correctness of logical retraction
    #[value(name = "3")]
    Correctness,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Run {
            file,
            query,
            kills,
            killc,
            all,
            limit,
            trace,
        } => run_command(file, &query, &kills, killc.as_deref(), all, limit, trace),
        Command::Translate { file } => {
            let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
            let prog = parse_program(&text).map_err(|e| e.to_string())?;
            let jprog = translate_program(&prog).map_err(|e| e.to_string())?;
            println!("{}", format_jprogram(&jprog));
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            theorem,
            file,
            query,
            seed,
            count,
            limit,
        } => check_command(theorem, file, &query, seed, count, StepLimit(limit)),
        Command::Repl => {
            repl::run_repl();
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_command(
    file: PathBuf,
    query: &str,
    kills: &[String],
    killc: Option<&str>,
    all: bool,
    limit: usize,
    trace_path: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
    let mut session = Session::new();
    session.load(&text).map_err(|e| e.to_string())?;
    session.limit = StepLimit(limit);

    match session.query(query) {
        Ok(_) => {}
        Err(session::SessionError::StepLimit) => {
            println!("{}", session.show());
            return Ok(ExitCode::from(2));
        }
        Err(e) => return Err(e.to_string()),
    }

    for target in kills {
        match session.kill_target(target) {
            Ok(_) => {}
            Err(session::SessionError::StepLimit) => return Ok(ExitCode::from(2)),
            Err(e) => return Err(e.to_string()),
        }
    }

    if let Some(pattern_text) = killc {
        let pattern = parse_constraint(pattern_text).map_err(|e| e.to_string())?;
        let stores = session.killc_all(&pattern).map_err(|e| e.to_string())?;
        if stores.is_empty() {
            println!("no constraint matches {}", format_constraint(&pattern));
            return Ok(ExitCode::from(1));
        }
        let shown = if all { stores.len() } else { 1 };
        for (i, store) in stores.iter().take(shown).enumerate() {
            if i > 0 {
                println!(";");
            }
            println!("{}", chrj::printer::format_store(store));
        }
        if !all && stores.len() > 1 {
            println!("% {} more alternative(s); use --all", stores.len() - 1);
        }
    } else {
        println!("{}", session.show());
    }

    if let Some(path) = trace_path {
        std::fs::write(&path, session.trace_text()).map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn check_command(
    theorem: TheoremId,
    file: PathBuf,
    query: &str,
    seed: Option<u64>,
    count: usize,
    limit: StepLimit,
) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
    let prog = parse_program(&text).map_err(|e| e.to_string())?;
    let goal = parse_query(query).map_err(|e| e.to_string())?;

    let mut failures = 0usize;
    let mut report = |label: &str, verdict: Verdict| {
        match verdict {
            Verdict::Pass => println!("PASS {label}"),
            Verdict::Fail(w) => {
                println!("FAIL {label}\n{w}");
                failures += 1;
            }
            Verdict::Inconclusive(w) => println!("INCONCLUSIVE {label}: {w}"),
        };
    };

    let jprog = translate_program(&prog).map_err(|e| e.to_string())?;
    match theorem {
        TheoremId::Conservativity => {
            report("lemma1 conservativity", check_lemma1(&prog, &goal, limit));
            if let Some(seed) = seed {
                let mut gen = InstanceGen::new(seed);
                for i in 0..count {
                    let (p, q) = gen.instance();
                    report(&format!("lemma1 random #{i}"), check_lemma1(&p, &q, limit));
                }
            }
        }
        TheoremId::Commutation => {
            report(
                "theorem2 commutation (all prefixes, all query justifications)",
                check_theorem2_all_prefixes(&jprog, &goal, limit),
            );
            if let Some(seed) = seed {
                let mut gen = InstanceGen::new(seed);
                for i in 0..count {
                    let (p, q) = gen.instance();
                    let jp = translate_program(&p).map_err(|e| e.to_string())?;
                    report(
                        &format!("theorem2 random #{i}"),
                        check_theorem2_all_prefixes(&jp, &q, limit),
                    );
                }
            }
        }
        TheoremId::Correctness => {
            for (i, g) in goal.iter().enumerate() {
                let rest: Vec<_> = goal
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, c)| c.clone())
                    .collect();
                report(
                    &format!("theorem3 retracting {}", format_constraint(g)),
                    check_theorem3(&jprog, &rest, g, limit),
                );
            }
            if let Some(seed) = seed {
                let mut gen = InstanceGen::new(seed);
                for i in 0..count {
                    let (p, q) = gen.instance();
                    let jp = translate_program(&p).map_err(|e| e.to_string())?;
                    if q.is_empty() {
                        continue;
                    }
                    let g = q[0].clone();
                    report(
                        &format!("theorem3 random #{i}"),
                        check_theorem3(&jp, &q[1..], &g, limit),
                    );
                }
            }
        }
    }

    if failures == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

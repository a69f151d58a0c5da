//! Command-line front end.
//!
//! Exit codes: 0 success, 1 rejected program or inapplicable action,
//! 2 usage error (bad arguments, missing file, unknown hole), 4 solver failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::report::{hole_json, report, Report};
use crate::session::{Analysis, Config, OpError, Outcome, Session};
use crate::smt::SolverConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lqh", version, about = "Refinement-type checker with typed holes")]
pub struct Cli {
    /// Emit `lqh/1` JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// SMT solver executable (default: $LQH_SOLVER, then `z3`).
    #[arg(long, global = true, value_name = "PATH")]
    pub solver: Option<PathBuf>,
    /// Unfolding budget for reflected functions.
    #[arg(long, global = true, value_name = "N")]
    pub fuel: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub smt_timeout_ms: Option<u64>,
    /// Do not probe whether `()` completes proof holes.
    #[arg(long, global = true)]
    pub no_auto_unit: bool,
    /// Write every SMT query to DIR.
    #[arg(long, global = true, value_name = "DIR")]
    pub dump_smt: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a file; holes count as errors.
    Check { file: PathBuf },
    /// List holes with their simplified goals.
    Holes { file: PathBuf },
    /// Full report for one hole.
    Hole { file: PathBuf, id: String },
    /// Case split the clause whose body is hole ID on VAR.
    Split {
        file: PathBuf,
        id: String,
        var: String,
        #[arg(long)]
        write: bool,
        /// Fill branches with `()` where that provably closes them.
        #[arg(long)]
        auto_unit: bool,
    },
    /// Replace hole ID by EXPR.
    Fill {
        file: PathBuf,
        id: String,
        expr: String,
        #[arg(long)]
        write: bool,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8645)]
        port: u16,
    },
}

impl Cli {
    pub fn config(&self) -> Config {
        let d = Config::default();
        Config {
            solver: SolverConfig {
                path: self.solver.clone(),
                dump_dir: self.dump_smt.clone(),
                timeout_ms: self.smt_timeout_ms.unwrap_or(d.solver.timeout_ms),
                ..d.solver
            },
            fuel: self.fuel.unwrap_or(d.fuel),
            probe_unit: !self.no_auto_unit,
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { out, err };
    match execute(&cli, &mut io) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(io.err, "lqh: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

impl From<OpError> for Failure {
    fn from(e: OpError) -> Self {
        let code = match &e {
            OpError::Parse(_) | OpError::NotApplicable(_) => EXIT_REJECTED,
            OpError::UnknownHole(_) | OpError::BadExpr(_) => EXIT_USAGE,
            OpError::Solver(_) => EXIT_SOLVER,
        };
        let msg = match &e {
            OpError::Parse(ds) => ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"),
            other => other.to_string(),
        };
        Failure(code, msg)
    }
}

fn read(file: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(file).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", file.display())))
}

fn session(cli: &Cli) -> Result<Session, Failure> {
    Session::new(cli.config()).map_err(|e| Failure(EXIT_SOLVER, e.to_string()))
}

fn json(io: &mut Io<'_>, r: &impl serde::Serialize) {
    let _ = serde_json::to_writer_pretty(&mut *io.out, r);
    let _ = writeln!(io.out);
}

fn name(file: &std::path::Path) -> String {
    file.display().to_string()
}

fn print_diagnostics(io: &mut Io<'_>, file: &str, a: &Analysis, with_holes: bool) {
    for d in a.diagnostics(with_holes) {
        let _ = writeln!(io.out, "{}", d.locate(file, &a.source));
    }
}

fn solver_ok(a: &Analysis) -> Result<(), Failure> {
    match a.solver_failure() {
        Some(f) => Err(Failure(EXIT_SOLVER, format!("solver failure: {f}"))),
        None => Ok(()),
    }
}

fn execute(cli: &Cli, io: &mut Io<'_>) -> Result<i32, Failure> {
    match &cli.command {
        Command::Check { file } => {
            let src = read(file)?;
            let a = session(cli)?.analyze(&src);
            solver_ok(&a)?;
            if cli.json {
                json(io, &report(&name(file), &a, true));
            } else {
                print_diagnostics(io, &name(file), &a, true);
            }
            Ok(if a.accepted() { EXIT_OK } else { EXIT_REJECTED })
        }
        Command::Holes { file } => {
            let src = read(file)?;
            let a = session(cli)?.analyze(&src);
            solver_ok(&a)?;
            if cli.json {
                json(io, &report(&name(file), &a, false));
            } else {
                print_diagnostics(io, &name(file), &a, false);
                for h in &a.holes {
                    let (line, col) = crate::diagnostic::line_col(&src, h.site.span.start);
                    let _ = writeln!(
                        io.out,
                        "{}:{line}:{col}: {} : {}",
                        name(file),
                        h.site.name,
                        h.goal.simplified
                    );
                }
            }
            Ok(if a.parse_errors.is_empty() {
                EXIT_OK
            } else {
                EXIT_REJECTED
            })
        }
        Command::Hole { file, id } => {
            let src = read(file)?;
            let a = session(cli)?.analyze(&src);
            solver_ok(&a)?;
            if !a.parse_errors.is_empty() {
                return Err(OpError::Parse(a.parse_errors).into());
            }
            let Some(h) = a.hole(id) else {
                return Err(OpError::UnknownHole(id.clone()).into());
            };
            if cli.json {
                json(io, &hole_json(&name(file), &src, h));
            } else {
                let _ = writeln!(io.out, "{}", h.message);
                let _ = writeln!(io.out, "\nEnvironment:");
                for (n, t) in &h.goal.env {
                    let _ = writeln!(io.out, "  {n} : {t}");
                }
                if !h.goal.facts.is_empty() {
                    let _ = writeln!(io.out, "Facts:");
                    for f in &h.goal.facts {
                        let _ = writeln!(io.out, "  {f}");
                    }
                }
                let _ = writeln!(io.out, "Raw goal:        {}", h.goal.raw);
                let _ = writeln!(io.out, "Simplified goal: {}", h.goal.simplified);
                let _ = writeln!(io.out, "Actions:");
                if h.actions.is_empty() {
                    let _ = writeln!(io.out, "  (none)");
                }
                for r in &h.actions {
                    let first = r.action.message.lines().next().unwrap_or_default();
                    let _ = writeln!(io.out, "  {:<12} {first}", r.action.kind.tag());
                }
            }
            Ok(EXIT_OK)
        }
        Command::Split {
            file,
            id,
            var,
            write,
            auto_unit,
        } => {
            let src = read(file)?;
            let o = session(cli)?.split(&src, id, Some(var), *auto_unit)?;
            emit(cli, io, file, o, *write)
        }
        Command::Fill { file, id, expr, write } => {
            let src = read(file)?;
            let o = session(cli)?.fill(&src, id, expr)?;
            emit(cli, io, file, o, *write)
        }
        Command::Serve { port } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure(EXIT_SOLVER, e.to_string()))?;
            let cfg = cli.config();
            let _ = writeln!(io.err, "lqh: listening on http://127.0.0.1:{port}");
            rt.block_on(crate::service::serve(cfg, *port))
                .map_err(|e| Failure(EXIT_USAGE, format!("cannot serve on port {port}: {e}")))?;
            Ok(EXIT_OK)
        }
    }
}

/// Prints or writes the edited source; diagnostics of the result go to stderr.
fn emit(cli: &Cli, io: &mut Io<'_>, file: &std::path::Path, o: Outcome, write: bool) -> Result<i32, Failure> {
    if write {
        std::fs::write(file, &o.source).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", file.display())))?;
    }
    if cli.json {
        let mut r: Report = report(&name(file), &o.analysis, true);
        r.new_source = Some(o.source.clone());
        json(io, &r);
    } else {
        if !write {
            let _ = io.out.write_all(o.source.as_bytes());
        }
        for d in o.analysis.diagnostics(false) {
            let _ = writeln!(io.err, "{}", d.locate(&name(file), &o.source));
        }
    }
    Ok(EXIT_OK)
}

pub fn main() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run(std::env::args_os(), &mut out, &mut err)
}

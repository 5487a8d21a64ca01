//! The `attrcat` command line.
//!
//! Exit codes: 0 success (proved, valid), 1 refuted or invalid, 2 unknown
//! within budget, 3 usage or parse error. Diagnostics go to standard error,
//! artifacts to `--out` or standard output.

mod render;

pub use render::render_dot;

use attrcat::boolean::UpdateRule;
use attrcat::geom::{check_morphism, evaluate_plan, parse_binding, GeomError};
use attrcat::pddl::{emit_domain, emit_problem, parse_plan, parse_problem, plan_to_diagram, validate_plan_with, PddlError, Plan, Problem};
use attrcat::rewrite::{prove_equal, prove_leq, Budget, Outcome, RewriteError};
use attrcat::signature::parse_terms_into;
use attrcat::term::parse_term;
use attrcat::{build_diagram, parse_signature, validate_signature, Diagram, Signature};
use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "attrcat", version, about = "String diagrams with attributes: proofs, PDDL and geometric replay")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a signature file; with --bind, also check the geometric models.
    Check {
        sig: PathBuf,
        #[arg(long)]
        bind: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
    },
    /// Emit the PDDL domain of a signature.
    EmitPddl {
        sig: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a PDDL problem.
    EmitProblem {
        sig: PathBuf,
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a plan in the Boolean semantics and print its trace.
    ValidatePlan {
        sig: PathBuf,
        problem: PathBuf,
        plan: PathBuf,
        /// Only switch off atoms that contradict the post-condition.
        #[arg(long)]
        compat_literal_flip: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a proof of lhs = rhs (or lhs <= rhs with --leq).
    Prove {
        sig: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
        #[arg(long)]
        leq: bool,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// Extra `term <name> = <term>` declarations for @name references.
        #[arg(long)]
        terms: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a plan in the geometric semantics and write the trace as CSV.
    Simulate {
        sig: PathBuf,
        problem: PathBuf,
        plan: PathBuf,
        bind: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a term, or the diagram of a plan.
    Render {
        sig: PathBuf,
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["problem", "plan"])]
        term: Option<String>,
        #[arg(long, requires = "plan")]
        problem: Option<PathBuf>,
        #[arg(long, requires = "problem")]
        plan: Option<PathBuf>,
        #[arg(long)]
        terms: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
}

/// A failed command and the exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Unknown(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Unknown(_) => 2,
            CliError::Usage(_) => 3,
        }
    }
}

impl From<PddlError> for CliError {
    fn from(e: PddlError) -> Self {
        match e {
            PddlError::InvalidStep { .. } | PddlError::InvalidSignature(_) | PddlError::Wiring { .. } => CliError::Invalid(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::GuardFailed { .. } | GeomError::Undefined { .. } | GeomError::Collision { .. } => CliError::Invalid(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<RewriteError> for CliError {
    fn from(e: RewriteError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e)))
}

fn load_sig(path: &Path, terms: Option<&PathBuf>) -> Result<Signature, CliError> {
    let mut sig = parse_signature(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e)))?;
    if let Some(t) = terms {
        parse_terms_into(&mut sig, &read(t)?).map_err(|e| CliError::Usage(format!("{}: {}", t.display(), e)))?;
    }
    Ok(sig)
}

fn load_plan(sig: &Signature, problem: &Path, plan: &Path) -> Result<(Problem, Plan), CliError> {
    let pr = parse_problem(&read(problem)?, sig)?;
    let pl = parse_plan(&read(plan)?, sig, &pr)?;
    Ok((pr, pl))
}

fn term_diagram(sig: &Signature, text: &str) -> Result<Diagram, CliError> {
    let t = parse_term(text).map_err(|e| CliError::Usage(format!("term '{}': {}", text, e)))?;
    build_diagram(&t, sig).map_err(|e| CliError::Usage(format!("term '{}': {}", text, e)))
}

fn emit(out: Option<&PathBuf>, text: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {}", p.display(), e))),
        None => stdout.write_all(text).map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn exec(cmd: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Check { sig, bind, samples, seed, dt } => {
            let s = load_sig(sig, None)?;
            let findings = validate_signature(&s);
            if !findings.is_empty() {
                let text: Vec<String> = findings.iter().map(|f| f.to_string()).collect();
                return Err(CliError::Invalid(text.join("\n")));
            }
            let _ = writeln!(stdout, "signature OK");
            if let Some(b) = bind {
                let binding = parse_binding(&read(b)?)?;
                binding.check(&s)?;
                let mut bad = Vec::new();
                for g in &s.generators {
                    let f = binding.morphism(&g.name, &s)?;
                    bad.extend(check_morphism(&f, &f.dom, &f.cod, *samples, *dt, *seed).into_iter().map(|x| format!("{}: {}", g.name, x)));
                }
                if !bad.is_empty() {
                    return Err(CliError::Invalid(bad.join("\n")));
                }
                let _ = writeln!(stdout, "binding OK ({} generators, {} samples each)", s.generators.len(), samples);
            }
            Ok(())
        }
        Command::EmitPddl { sig, out } => {
            let s = load_sig(sig, None)?;
            emit(out.as_ref(), emit_domain(&s)?.as_bytes(), stdout)
        }
        Command::EmitProblem { sig, problem, out } => {
            let s = load_sig(sig, None)?;
            let p = parse_problem(&read(problem)?, &s)?;
            emit(out.as_ref(), emit_problem(&p, &s)?.as_bytes(), stdout)
        }
        Command::ValidatePlan { sig, problem, plan, compat_literal_flip, out } => {
            let s = load_sig(sig, None)?;
            let (pr, pl) = load_plan(&s, problem, plan)?;
            let rule = if *compat_literal_flip { UpdateRule::LiteralFlip } else { UpdateRule::Symmetric };
            let t = validate_plan_with(&pl, &pr, &s, rule)?;
            let mut text = format!("state 0: {}\n", t.states[0]);
            for (k, (c, st)) in t.checks.iter().zip(&t.states[1..]).enumerate() {
                text += &format!("step {}: ({} {})\nstate {}: {}\n", k + 1, c.action, c.args.join(" "), k + 1, st);
            }
            for w in &t.warnings {
                let _ = writeln!(stderr, "warning: {}", w);
            }
            text += if t.goal_reached { "goal reached\n" } else { "goal not reached\n" };
            emit(out.as_ref(), text.as_bytes(), stdout)?;
            if t.goal_reached {
                Ok(())
            } else {
                Err(CliError::Invalid("final state does not satisfy the goal".into()))
            }
        }
        Command::Prove { sig, lhs, rhs, leq, budget, terms, out } => {
            let s = load_sig(sig, terms.as_ref())?;
            let (l, r) = (term_diagram(&s, lhs)?, term_diagram(&s, rhs)?);
            let b = Budget::states(*budget);
            let res = if *leq { prove_leq(&l, &r, &b, &s)? } else { prove_equal(&l, &r, &b, &s)? };
            match res {
                Outcome::Proved(p) => {
                    let _ = writeln!(stderr, "proved in {} steps", p.steps.len());
                    emit(out.as_ref(), p.to_text().as_bytes(), stdout)
                }
                Outcome::Unknown { states } => Err(CliError::Unknown(format!("unknown: no proof within {} states", states))),
            }
        }
        Command::Simulate { sig, problem, plan, bind, dt, out } => {
            let s = load_sig(sig, None)?;
            let (pr, pl) = load_plan(&s, problem, plan)?;
            let binding = parse_binding(&read(bind)?)?;
            let d = plan_to_diagram(&pl, &pr, &s)?;
            let t = evaluate_plan(&d, &s, &binding, &binding.inputs_for(&d)?, *dt)?;
            let mut buf = Vec::new();
            t.write_csv(&mut buf).map_err(|e| CliError::Usage(e.to_string()))?;
            emit(out.as_ref(), &buf, stdout)?;
            for (name, p) in t.final_state() {
                let v: Vec<String> = p.iter().map(|x| format!("{}", x)).collect();
                let _ = writeln!(stderr, "{} = ({})", name, v.join(", "));
            }
            match t.collisions.first() {
                Some((time, a, b)) => Err(GeomError::Collision { a: a.clone(), b: b.clone(), t: *time }.into()),
                None => Ok(()),
            }
        }
        Command::Render { sig, term, problem, plan, terms, format: Format::Dot, out } => {
            let s = load_sig(sig, terms.as_ref())?;
            let d = match (term, problem, plan) {
                (Some(t), _, _) => term_diagram(&s, t)?,
                (None, Some(pr), Some(pl)) => {
                    let (pr, pl) = load_plan(&s, pr, pl)?;
                    plan_to_diagram(&pl, &pr, &s)?
                }
                _ => return Err(CliError::Usage("render needs --term or --problem with --plan".into())),
            };
            emit(out.as_ref(), render_dot(&d, &s).as_bytes(), stdout)
        }
    }
}

/// Run with explicit arguments (including the program name); returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    match exec(&cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e);
            e.code()
        }
    }
}

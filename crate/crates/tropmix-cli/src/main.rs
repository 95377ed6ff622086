use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tropmix::fm::{eliminate_many, hull_union};
use tropmix::mpg::{implies, is_empty_finite_certified, is_empty_traced, restrict_rows};
use tropmix::reduce::ReduceMode;
use tropmix::system::{parse_inequality, parse_system};
use tropmix::timed::{forward_reach, ReachOptions, TimedAutomaton, Verdict};
use tropmix::zones::{mixed_to_zones, ZoneError};
use tropmix::MixedSystem;

const FORMATS: &str = "\
System files start with `dim N` and hold one inequality per line, for example
`x1 <= 2~*x2 + 1` or `0 <= +oo*x1 + -oo`. Variables are x1..xN, `~` marks a
strict coefficient, `-oo` and `+oo` are the infinities and `#` starts a comment.

Automaton files are line based:
  clocks x1 x2
  location <name> [invariant <atoms>]
  initial <name>
  final <name>
  edge <src> -> <dst> [when <atoms>] [reset x1:=0, x2:=3]
Atoms are comma separated: `x1 <= 1`, `x2 > 1`, `x1 < 3 + x2`, `x1 = 2`.

Verdicts are printed alone on the first line; systems follow after a blank line.
Exit status: 0 after a completed analysis, 2 on input errors, 3 when a cap is hit.";

#[derive(Parser)]
#[command(name = "tropmix", version, about = "Tropical polyhedra with strict and non-strict constraints", after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reduce {
    None,
    Weak,
    Exact,
}

impl From<Reduce> for ReduceMode {
    fn from(r: Reduce) -> Self {
        match r {
            Reduce::None => ReduceMode::None,
            Reduce::Weak => ReduceMode::Weak,
            Reduce::Exact => ReduceMode::Exact,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Eliminate variables and print the projected system.
    Project {
        file: PathBuf,
        /// Variables to eliminate, e.g. `x3,x5`.
        #[arg(long, value_delimiter = ',', required = true)]
        eliminate: Vec<String>,
        #[arg(long, value_enum, default_value = "none")]
        reduce: Reduce,
    },
    /// Print EMPTY or NONEMPTY.
    Empty {
        file: PathBuf,
        /// Also print the winning strategies.
        #[arg(long)]
        certificate: bool,
    },
    /// Print IMPLIED or NOT-IMPLIED for one goal inequality.
    Implies {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        goal: String,
    },
    /// Print the tropical convex hull of two systems.
    Hull {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value = "none")]
        reduce: Reduce,
    },
    /// Print the system as a union of zones, one per line.
    Zones {
        file: PathBuf,
        #[arg(long, default_value_t = 4096)]
        max_zones: usize,
    },
    /// Decide whether the final location is reachable.
    Reach {
        file: PathBuf,
        /// Print every visited location with its region.
        #[arg(long)]
        trace: bool,
        /// Merge states at the same location by convex hull.
        #[arg(long)]
        approx_union: bool,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long, value_enum, default_value = "weak")]
        reduce: Reduce,
    },
}

enum Failure {
    Input(String),
    Cap(String),
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<MixedSystem, Failure> {
    parse_system(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn variable_index(name: &str, dim: usize) -> Result<usize, Failure> {
    let bad = || Failure::Input(format!("`{name}` is not a variable of a {dim}-dimensional system"));
    let k: usize = name.trim().strip_prefix('x').and_then(|d| d.parse().ok()).ok_or_else(bad)?;
    if k == 0 || k > dim {
        return Err(bad());
    }
    Ok(k - 1)
}

fn run(command: Command) -> Result<String, Failure> {
    let mut out = String::new();
    match command {
        Command::Project { file, eliminate, reduce } => {
            let sys = load_system(&file)?;
            let vars = eliminate.iter().map(|v| variable_index(v, sys.dim())).collect::<Result<Vec<_>, _>>()?;
            let projected = eliminate_many(&sys, &vars, reduce.into()).map_err(|e| Failure::Input(e.to_string()))?;
            write!(out, "{projected}").unwrap();
        }
        Command::Empty { file, certificate } => {
            let sys = load_system(&file)?;
            let trace = is_empty_traced(&sys);
            writeln!(out, "{}", if trace.empty { "EMPTY" } else { "NONEMPTY" }).unwrap();
            if certificate {
                out.push('\n');
                if sys.has_pos_inf() {
                    for (k, step) in trace.steps.iter().enumerate() {
                        let rows: Vec<String> = step.rows.iter().map(|i| (i + 1).to_string()).collect();
                        write!(out, "iteration {}: rows {}", k + 1, rows.join(" ")).unwrap();
                        match &step.support {
                            Some(s) => {
                                let vars: Vec<String> = s.iter().map(|j| format!("x{}", j + 1)).collect();
                                writeln!(out, "; support {}", vars.join(" ")).unwrap();
                            }
                            None => writeln!(out, "; empty").unwrap(),
                        }
                    }
                }
                let last = trace.steps.last().map(|s| restrict_rows(&sys, &s.rows));
                let part = last.unwrap_or_else(|| MixedSystem::new(sys.dim()));
                let verdict = is_empty_finite_certified(&part).expect("+oo terms removed");
                for c in &verdict.certificates {
                    writeln!(out, "{c}").unwrap();
                }
            }
        }
        Command::Implies { file, goal } => {
            let sys = load_system(&file)?;
            let target = parse_inequality(&goal, sys.dim()).map_err(|e| Failure::Input(format!("goal: {e}")))?;
            let holds = implies(&sys, &target).map_err(|e| Failure::Input(e.to_string()))?;
            writeln!(out, "{}", if holds { "IMPLIED" } else { "NOT-IMPLIED" }).unwrap();
        }
        Command::Hull { left, right, reduce } => {
            let (l, r) = (load_system(&left)?, load_system(&right)?);
            let hull = hull_union(&l, &r, reduce.into()).map_err(|e| Failure::Input(e.to_string()))?;
            write!(out, "{hull}").unwrap();
        }
        Command::Zones { file, max_zones } => {
            let sys = load_system(&file)?;
            let zones = mixed_to_zones(&sys, max_zones).map_err(|e| match e {
                ZoneError::TooManyZones { .. } => Failure::Cap(e.to_string()),
            })?;
            if zones.is_empty() {
                writeln!(out, "false").unwrap();
            }
            for z in zones {
                writeln!(out, "{z}").unwrap();
            }
        }
        Command::Reach { file, trace, approx_union, max_steps, reduce } => {
            let ta = TimedAutomaton::parse(&read(&file)?).map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
            let opts = ReachOptions { approx_union, max_steps, reduce: reduce.into() };
            let outcome = forward_reach(&ta, &opts);
            writeln!(out, "{}", outcome.verdict).unwrap();
            if trace {
                for state in &outcome.visited {
                    write!(out, "\nlocation {}\n{}", ta.locations[state.location].name, state.region).unwrap();
                }
            }
            if outcome.verdict == Verdict::Inconclusive {
                print!("{out}");
                return Err(Failure::Cap(format!("step bound {} reached", max_steps.unwrap_or_default())));
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

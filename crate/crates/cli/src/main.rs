use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tfnp_core::dsr::{self_oracle, solve_dsr, Inflating, Mode, Monitored, DEFAULT_BLOWUP_EXPONENT};
use tfnp_core::dsr2pls::iter_program::IterProgram;
use tfnp_core::dsr2pls::{compile, DsrProgram};
use tfnp_core::fixtures::RecursiveCombine;
use tfnp_core::instance_file::{emit_instance, parse_instance};
use tfnp_core::numbertheory::{
    all_factors, all_factors_via_factor, factor, factor_via_all_factors, OracleTrace,
};
use tfnp_core::problems::ProblemInstance;
use tfnp_core::reductions::{add_source, drop_source, iter_to_sod, sod_to_iter, ReductionResult};
use tfnp_core::solvers::{solve_exhaustive, solve_path};
use tfnp_core::svl::{check_promise, compile_svl};
use tfnp_core::synth::random_instance;
use tfnp_core::{BitString, Error, ProblemKind};

const FIXTURE: &str = "fixture:recursive-combine";

#[derive(Parser)]
#[command(
    name = "tfnp",
    version,
    about = "Downward self-reductions for total search problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a random well-formed instance file.
    Gen {
        #[arg(long)]
        kind: ProblemKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Valuation bits for Sink-of-DAG kinds.
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    /// Check a candidate solution; prints true or false.
    Verify {
        file: PathBuf,
        #[arg(long)]
        candidate: BitString,
    },
    /// Print a solution.
    Solve {
        file: PathBuf,
        /// Scan every candidate instead of following the path.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Emit the reduced instance followed by a pullback transcript.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        to: ProblemKind,
    },
    /// Run the downward self-reduction with the self-oracle under a size monitor.
    DsrRun {
        file: PathBuf,
        #[arg(long, default_value = "poly-blowup")]
        mode: Mode,
        /// Print one line per oracle query.
        #[arg(long)]
        trace: bool,
        /// Exponent of the polynomial blowup bound.
        #[arg(long, default_value_t = DEFAULT_BLOWUP_EXPONENT)]
        c: u32,
        /// Record violations instead of stopping at the first.
        #[arg(long)]
        lenient: bool,
        /// Pad top-level queries to the caller's size (negative control).
        #[arg(long)]
        inflate: bool,
    },
    /// Compile a program into its state graph and report its dimensions.
    CompilePls(ProgramArgs),
    /// Walk the state graph, one line per state.
    Walk {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, default_value_t = 1 << 24)]
        max_steps: u64,
    },
    /// Check the sink-of-verifiable-line promise along the path.
    SvlCheck {
        #[command(flatten)]
        program: ProgramArgs,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        /// Off-path states tested per index.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Factor an integer.
    Factor {
        n: u64,
        /// List every nontrivial divisor.
        #[arg(long)]
        all: bool,
        /// Answer through the reduction to the other problem on smaller inputs.
        #[arg(long)]
        via_oracle: bool,
    },
}

#[derive(Args)]
struct ProgramArgs {
    /// An ITER-with-source instance file.
    #[arg(conflicts_with = "problem", required_unless_present = "problem")]
    file: Option<PathBuf>,
    /// A built-in program, `fixture:recursive-combine`.
    #[arg(long, requires = "x")]
    problem: Option<String>,
    /// Top instance for `--problem`.
    #[arg(long)]
    x: Option<BitString>,
}

/// Command failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 3,
        message: message.into(),
    }
}

type Outcome = Result<(String, u8), Failure>;

fn read_instance(path: &PathBuf) -> Result<ProblemInstance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_instance(&text)?)
}

fn reduce_to(inst: &ProblemInstance, to: ProblemKind) -> Result<ReductionResult, Failure> {
    use ProblemKind::*;
    Ok(match (inst, to) {
        (ProblemInstance::Iter(i), Sod) => iter_to_sod(i)?,
        (ProblemInstance::Sod(i), IterWithSource) => sod_to_iter(i)?,
        (ProblemInstance::Iter(_), IterWithSource) | (ProblemInstance::Sod(_), SodWithSource) => {
            add_source(inst)?
        }
        (ProblemInstance::IterWithSource(_), Iter) | (ProblemInstance::SodWithSource(_), Sod) => {
            drop_source(inst)?
        }
        (i, to) => return Err(usage(format!("no reduction from {} to {to}", i.kind()))),
    })
}

fn cmd_reduce(file: &PathBuf, to: ProblemKind) -> Outcome {
    let inst = read_instance(file)?;
    let red = reduce_to(&inst, to)?;
    let mut out = emit_instance(&red.target);
    let w = solve_exhaustive(&red.target)?;
    let v = red.pull_back(&w)?;
    writeln!(out, "# reduction {} -> {}", inst.kind(), red.target.kind()).unwrap();
    writeln!(out, "# pullback {:?}", red.pullback).unwrap();
    writeln!(out, "# target solution {w}").unwrap();
    writeln!(out, "# source solution {v}").unwrap();
    writeln!(out, "# verified {}", inst.verify_solution(&v)?).unwrap();
    Ok((out, 0))
}

fn cmd_dsr_run(
    file: &PathBuf,
    mode: Mode,
    trace: bool,
    c: u32,
    lenient: bool,
    inflate: bool,
) -> Outcome {
    let inst = read_instance(file)?;
    let mut mon = Monitored::new(self_oracle(), mode).with_exponent(c);
    if lenient {
        mon = mon.lenient();
    }
    let result = if inflate {
        solve_dsr(&inst, &mut Inflating { inner: &mut mon })
    } else {
        mon.run(&inst)
    };
    let mut out = String::new();
    if trace {
        for r in mon.trace() {
            writeln!(out, "{r}").unwrap();
        }
    }
    let y = match result {
        Ok(y) => y,
        Err(e) => {
            print!("{out}");
            return Err(e.into());
        }
    };
    writeln!(out, "solution {y}").unwrap();
    writeln!(
        out,
        "mode={mode} queries={} max_depth={} violations={}",
        mon.trace().len(),
        mon.max_depth(),
        mon.violations()
    )
    .unwrap();
    let code = if mon.violations() > 0 { 2 } else { 0 };
    Ok((out, code))
}

enum Program {
    Fixture(RecursiveCombine, BitString),
    Iter(IterProgram, BitString),
}

fn load_program(args: &ProgramArgs) -> Result<Program, Failure> {
    match (&args.problem, &args.file) {
        (Some(p), _) if p == FIXTURE => {
            let x = args.x.clone().ok_or_else(|| usage("--problem needs --x"))?;
            RecursiveCombine.rank_of(&x)?;
            Ok(Program::Fixture(RecursiveCombine, x))
        }
        (Some(p), _) => Err(usage(format!("unknown program `{p}`; known: {FIXTURE}"))),
        (None, Some(f)) => match read_instance(f)? {
            ProblemInstance::IterWithSource(i) => {
                let (p, x) = IterProgram::for_instance(&i)?;
                Ok(Program::Iter(p, x))
            }
            other => Err(usage(format!(
                "state graphs are built from iter-with-source files, got {}",
                other.kind()
            ))),
        },
        (None, None) => Err(usage("give an instance file or --problem")),
    }
}

fn compile_report<P: DsrProgram>(prog: P, x: BitString) -> Outcome {
    let name = prog.name();
    let c = compile(prog, x)?;
    let mut out = String::new();
    writeln!(out, "program {name}").unwrap();
    writeln!(out, "rank {}", c.rank()).unwrap();
    writeln!(out, "state_bits {}", c.state_bits()).unwrap();
    match c.state_bound() {
        Some(b) => writeln!(out, "state_bound {b}").unwrap(),
        None => writeln!(out, "state_bound none").unwrap(),
    }
    writeln!(out, "path_length {}", c.big_pi()).unwrap();
    Ok((out, 0))
}

fn walk_report<P: DsrProgram>(prog: P, x: BitString, max_steps: u64) -> Outcome {
    let c = compile(prog, x)?;
    let walk = c.walk(max_steps)?;
    let mut out = String::new();
    for step in &walk {
        writeln!(out, "{step}").unwrap();
    }
    let sink = c.run_to_sink(max_steps)?;
    let (x, y) = c.extract(&sink).ok_or_else(|| Failure {
        code: 2,
        message: "sink holds no solution".into(),
    })?;
    let ok = c.program().verify(c.rank(), &x, &y)?;
    writeln!(
        out,
        "sink steps={} x={x} y={y} verified={ok}",
        walk.len() - 1
    )
    .unwrap();
    Ok((out, if ok { 0 } else { 1 }))
}

fn svl_report<P: DsrProgram + 'static>(
    prog: P,
    x: BitString,
    budget: u64,
    samples: usize,
    seed: u64,
) -> Outcome {
    let inst = compile_svl(prog, x)?;
    let report = check_promise(&inst, budget, samples, seed)?;
    let out = format!("{report}\n");
    if let Some((i, d)) = report.violations.first() {
        print!("{out}");
        return Err(Error::PromiseViolation {
            index: i.to_string(),
            detail: d.clone(),
        }
        .into());
    }
    Ok((out, if report.complete { 0 } else { 1 }))
}

fn cmd_factor(n: u64, all: bool, via_oracle: bool) -> Outcome {
    let mut trace = OracleTrace::default();
    let answer = match (all, via_oracle) {
        (false, false) => factor(n)?,
        (true, false) => all_factors(n)?,
        (true, true) => all_factors_via_factor(n, &mut |m| factor(m), &mut trace)?,
        (false, true) => factor_via_all_factors(n, &mut |m| all_factors(m), &mut trace)?,
    };
    let mut out = format!("{answer}\n");
    if via_oracle {
        let qs: Vec<String> = trace.queries.iter().map(u64::to_string).collect();
        let qs = if qs.is_empty() {
            "none".to_string()
        } else {
            qs.join(" ")
        };
        writeln!(out, "# oracle queries: {qs}").unwrap();
    }
    Ok((out, 0))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Gen { kind, n, seed, m } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_instance(&mut rng, kind, n, m)?;
            Ok((emit_instance(&inst), 0))
        }
        Command::Verify { file, candidate } => {
            let ok = read_instance(&file)?.verify_solution(&candidate)?;
            Ok((format!("{ok}\n"), if ok { 0 } else { 1 }))
        }
        Command::Solve { file, exhaustive } => {
            let inst = read_instance(&file)?;
            let y = if exhaustive {
                solve_exhaustive(&inst)?
            } else {
                solve_path(&inst)?
            };
            Ok((format!("{y}\n"), 0))
        }
        Command::Reduce { file, to } => cmd_reduce(&file, to),
        Command::DsrRun {
            file,
            mode,
            trace,
            c,
            lenient,
            inflate,
        } => cmd_dsr_run(&file, mode, trace, c, lenient, inflate),
        Command::CompilePls(args) => match load_program(&args)? {
            Program::Fixture(p, x) => compile_report(p, x),
            Program::Iter(p, x) => compile_report(p, x),
        },
        Command::Walk { program, max_steps } => match load_program(&program)? {
            Program::Fixture(p, x) => walk_report(p, x, max_steps),
            Program::Iter(p, x) => walk_report(p, x, max_steps),
        },
        Command::SvlCheck {
            program,
            budget,
            samples,
            seed,
        } => match load_program(&program)? {
            Program::Fixture(p, x) => svl_report(p, x, budget, samples, seed),
            Program::Iter(p, x) => svl_report(p, x, budget, samples, seed),
        },
        Command::Factor { n, all, via_oracle } => cmd_factor(n, all, via_oracle),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

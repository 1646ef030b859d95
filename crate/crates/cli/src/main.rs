//! `stacksort`: trace, check, count and compare sorting with stacks in series.
//!
//! Exit codes: 0 true/sorted, 1 false/failed, 2 usage, 3 resource limit.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stacks_core::constructions::{
    insert_max, left_fail_family, lower_bound, lower_bound_family, right_fail_family,
    superpattern_family,
};
use stacks_core::enumerate::{
    count_sortable, diff_sets, render_csv, render_json, Decider, DeciderKind, EnumError, Workers,
};
use stacks_core::greedy::{run_greedy, west_t_stack_sortable, Priority};
use stacks_core::machine::MachineState;
use stacks_core::oracle::{sortable, OracleError, Pruning};
use stacks_core::perm::{contains_pattern, parse_permutation, Permutation};
use stacks_core::verify;

#[derive(Parser)]
#[command(
    name = "stacksort",
    version,
    about = "Sorting permutations with stacks in series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a greedy algorithm and print every move as a JSON line.
    Trace(TraceArgs),
    /// Decide sortability of one permutation.
    Check(CheckArgs),
    /// Count sortable permutations of one length.
    Count(ScanArgs),
    /// Compare the sortable sets of two deciders.
    Compare(ScanArgs),
    /// Print a constructed permutation or family.
    #[command(subcommand)]
    Generate(Generate),
    /// Exit 0 iff TEXT contains PATTERN.
    Contains { text: String, pattern: String },
    /// Run every bundled claim and print PASS/FAIL lines.
    VerifyPaper {
        #[arg(long, env = "STACKSORT_WORKERS", default_value_t = 0)]
        workers: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GreedyAlgo {
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckAlgo {
    Left,
    Right,
    West,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    stacks: u16,
    #[arg(long, value_enum)]
    algo: GreedyAlgo,
    /// Draw the machine after each move instead of JSON lines.
    #[arg(long)]
    pretty: bool,
    perm: String,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    stacks: u16,
    #[arg(long, value_enum)]
    algo: CheckAlgo,
    /// Oracle only: skip input pushes while an empty stack lies left of a full one.
    #[arg(long)]
    prune: bool,
    /// Oracle only: print the sorting move sequence as JSON.
    #[arg(long)]
    witness: bool,
    perm: String,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    stacks: u16,
    #[arg(long)]
    len: usize,
    /// Comma-separated deciders: left, right, west, oracle, oracle-pruned.
    #[arg(long, value_delimiter = ',', required = true)]
    algo: Vec<String>,
    #[arg(long, env = "STACKSORT_WORKERS", default_value_t = 0)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Generate {
    /// (t+1) t ... 2 (t+2) 1
    RightFail {
        #[arg(long)]
        stacks: usize,
    },
    /// 2 5 4 1 6 7 ... (t+4) 3
    LeftFail {
        #[arg(long)]
        stacks: usize,
    },
    /// 2 6 3 5 1 7 8 ... (t+5) 4
    Superpattern {
        #[arg(long)]
        stacks: usize,
    },
    /// Every member of the lower-bound family, one per line.
    LowerBoundFamily {
        #[arg(long)]
        stacks: usize,
        #[arg(long)]
        len: usize,
    },
    /// The value t! (t+1)^(n-t).
    LowerBound {
        #[arg(long)]
        stacks: usize,
        #[arg(long)]
        len: usize,
    },
    /// Insert the new maximum at a 1-based slot.
    InsertMax {
        #[arg(long)]
        slot: usize,
        perm: String,
    },
}

enum Failure {
    Usage(String),
    Resource(String),
}

impl From<EnumError> for Failure {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::Infeasible { .. } | EnumError::Oracle(_) | EnumError::Overflow => {
                Failure::Resource(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn parse(text: &str) -> Result<Permutation, Failure> {
    parse_permutation(text).map_err(usage)
}

fn verdict(yes: bool) -> ExitCode {
    if yes {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn json_line(out: &mut impl Write, value: &impl serde::Serialize) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")
}

fn trace(args: TraceArgs, out: &mut impl Write) -> Result<ExitCode, Failure> {
    let p = parse(&args.perm)?;
    let t = args.stacks as usize;
    let priority = match args.algo {
        GreedyAlgo::Left => Priority::Left,
        GreedyAlgo::Right => Priority::Right,
    };
    let outcome = run_greedy(&p, t, priority).map_err(usage)?;
    let mut state = MachineState::initial(&p, t).map_err(usage)?;
    if args.pretty {
        writeln!(out, "start              {}", state.diagram()).map_err(usage)?;
    }
    for (i, &mv) in outcome.moves.iter().enumerate() {
        let value = state.apply_in_place(mv).map_err(usage)?;
        if args.pretty {
            let label = format!("{mv} {value}");
            writeln!(out, "{:>4} {label:<13} {}", i + 1, state.diagram()).map_err(usage)?;
        } else {
            json_line(out, &state.trace_event(i + 1, mv, value)).map_err(usage)?;
        }
    }
    let record = outcome.record();
    if args.pretty {
        match (record.sorted, record.blocked, record.gamma) {
            (true, _, _) => writeln!(out, "sorted"),
            (false, Some(b), Some(g)) => writeln!(out, "failed: {b} cannot enter past {g}"),
            (false, b, _) => writeln!(out, "failed: blocked {b:?}"),
        }
        .map_err(usage)?;
    } else {
        json_line(out, &record).map_err(usage)?;
    }
    Ok(verdict(outcome.sorted))
}

fn check(args: CheckArgs, out: &mut impl Write) -> Result<ExitCode, Failure> {
    let p = parse(&args.perm)?;
    let t = args.stacks as usize;
    let yes = match args.algo {
        CheckAlgo::Left => run_greedy(&p, t, Priority::Left).map_err(usage)?.sorted,
        CheckAlgo::Right => run_greedy(&p, t, Priority::Right).map_err(usage)?.sorted,
        CheckAlgo::West => west_t_stack_sortable(&p, t),
        CheckAlgo::Oracle => {
            let pruning = if args.prune {
                Pruning::NoEmptyGap
            } else {
                Pruning::None
            };
            let found = sortable(&p, t, pruning).map_err(|e| match e {
                OracleError::NoStacks(_) => usage(e),
                _ => Failure::Resource(e.to_string()),
            })?;
            if args.witness {
                if let Some(w) = &found {
                    writeln!(out, "{}", w.to_json(&p, t).map_err(usage)?).map_err(usage)?;
                }
            }
            found.is_some()
        }
    };
    writeln!(out, "{}", if yes { "sortable" } else { "not sortable" }).map_err(usage)?;
    Ok(verdict(yes))
}

fn deciders(args: &ScanArgs) -> Result<Vec<Decider>, Failure> {
    args.algo
        .iter()
        .map(|a| {
            a.trim()
                .parse::<DeciderKind>()
                .map(|k| Decider::new(k, args.stacks as usize))
                .map_err(usage)
        })
        .collect()
}

fn count(args: ScanArgs, out: &mut impl Write) -> Result<ExitCode, Failure> {
    let workers = Workers(args.workers);
    let rows = deciders(&args)?
        .into_iter()
        .map(|d| count_sortable(args.len, d, workers))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match args.format {
        Format::Csv => render_csv(&rows),
        Format::Json => render_json(&rows),
    };
    out.write_all(text.as_bytes()).map_err(usage)?;
    Ok(ExitCode::SUCCESS)
}

fn compare(args: ScanArgs, out: &mut impl Write) -> Result<ExitCode, Failure> {
    let ds = deciders(&args)?;
    let [a, b] = ds[..] else {
        return Err(Failure::Usage("compare needs exactly two deciders".into()));
    };
    let diff = diff_sets(args.len, a, b, Workers(args.workers))?;
    let render = |v: &[Permutation]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    let text = match args.format {
        Format::Json => {
            let value = serde_json::json!({
                "n": args.len,
                "t": args.stacks,
                "a": a.kind.name(),
                "b": b.kind.name(),
                "only_a": render(&diff.only_a),
                "only_b": render(&diff.only_b),
                "both": diff.both,
            });
            format!("{value}\n")
        }
        Format::Csv => {
            let mut s = String::from("set,permutation\n");
            for p in &diff.only_a {
                s.push_str(&format!("only-{},{p}\n", a.kind.name()));
            }
            for p in &diff.only_b {
                s.push_str(&format!("only-{},{p}\n", b.kind.name()));
            }
            s.push_str(&format!("both,{}\n", diff.both));
            s
        }
    };
    out.write_all(text.as_bytes()).map_err(usage)?;
    Ok(ExitCode::SUCCESS)
}

fn generate(cmd: Generate, out: &mut impl Write) -> Result<ExitCode, Failure> {
    let one = match cmd {
        Generate::RightFail { stacks } => right_fail_family(stacks).map_err(usage)?,
        Generate::LeftFail { stacks } => left_fail_family(stacks).map_err(usage)?,
        Generate::Superpattern { stacks } => superpattern_family(stacks).map_err(usage)?,
        Generate::InsertMax { slot, perm } => insert_max(&parse(&perm)?, slot).map_err(usage)?,
        Generate::LowerBound { stacks, len } => {
            writeln!(out, "{}", lower_bound(len, stacks).map_err(usage)?).map_err(usage)?;
            return Ok(ExitCode::SUCCESS);
        }
        Generate::LowerBoundFamily { stacks, len } => {
            for p in lower_bound_family(len, stacks).map_err(usage)? {
                writeln!(out, "{p}").map_err(usage)?;
            }
            return Ok(ExitCode::SUCCESS);
        }
    };
    writeln!(out, "{one}").map_err(usage)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match cli.command {
        Command::Trace(args) => trace(args, &mut out)?,
        Command::Check(args) => check(args, &mut out)?,
        Command::Count(args) => count(args, &mut out)?,
        Command::Compare(args) => compare(args, &mut out)?,
        Command::Generate(cmd) => generate(cmd, &mut out)?,
        Command::Contains { text, pattern } => {
            let yes = contains_pattern(&parse(&text)?, &parse(&pattern)?);
            writeln!(out, "{}", if yes { "contains" } else { "avoids" }).map_err(usage)?;
            verdict(yes)
        }
        Command::VerifyPaper { workers } => {
            let ok = verify::run_all(Workers(workers), &mut out).map_err(usage)?;
            writeln!(
                out,
                "{}",
                if ok {
                    "all claims PASS"
                } else {
                    "some claims FAIL"
                }
            )
            .map_err(usage)?;
            verdict(ok)
        }
    };
    out.flush().map_err(usage)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

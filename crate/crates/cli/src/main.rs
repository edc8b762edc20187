//! `symvass`: reachability queries, run surgery and reductions for VASS with
//! symmetric transition sets.
//!
//! The first line on stdout is the verdict. Stats go to stderr as `key=value`
//! lines. Exit codes: 0 answered, 2 parse or usage error, 3 resource limit,
//! 4 internal assertion.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use symvass::datavass::{
    certify_unreachable, counting_bound, data_oracle, parse_data_instance, print_data_run, reduce_counting,
    DataAnswer, DataInstance, Symmetry,
};
use symvass::explore::{bfs_oracle, escalating_oracle, OracleAnswer};
use symvass::fairness::{find_backward_pump, find_forward_pump, lift_zrun, FairnessPolicy, PumpPair};
use symvass::reductions::{
    balance_run, reduce_bounded_1vass, reduce_sd_wr_tn, reduce_to_cyclic, reduce_to_tn_wr_g, ReductionOutput,
};
use symvass::solver::{solve, Answer};
use symvass::text::{parse_instance, parse_run, print_instance, print_run};
use symvass::vass::orbit_of_transition;
use symvass::zreach::{zreachable, ZLimits, ZReach};
use symvass::{Config, Error, Group, Instance, Limits, Run, Vass};

#[derive(Debug, Parser)]
#[command(name = "symvass", version, about = "Reachability for VASS with symmetric transition sets")]
struct Cli {
    /// Overrides such as `max-configs=N,max-orbit=N,wall-ms=N`.
    #[arg(long, global = true, value_name = "LIST")]
    limits: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide reachability of the target from the source.
    Solve {
        instance: PathBuf,
        /// Also write the witness run here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide integer reachability and print a Parikh image.
    Zreach { instance: PathBuf },
    /// Breadth-first search, bounded by `--bound` or escalating.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Search for a forward pump at the source (or backward at the target).
    Pump {
        instance: PathBuf,
        #[arg(long, default_value_t = 16)]
        max_len: usize,
        #[arg(long)]
        backward: bool,
    },
    /// Lift an integer run from source to target to a run.
    Lift {
        instance: PathBuf,
        zrun: PathBuf,
        /// Longest pump searched for at either end.
        #[arg(long, default_value_t = 16)]
        max_len: usize,
    },
    /// Make every counter at the end of a run exceed `r + S`.
    Repair {
        instance: PathBuf,
        run: PathBuf,
        #[arg(long, default_value_t = 0)]
        r: i64,
    },
    /// Rewrite a run of a `wreath(symmetric(d),H)` instance to keep blocks balanced.
    Balance { instance: PathBuf, run: PathBuf },
    /// Translate an instance and write it with a `.map` sidecar.
    Reduce {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        out: PathBuf,
        /// Counter bound for `bounded1`; balance bound for `sd-wr-tn` and `counting`.
        #[arg(long)]
        bound: Option<i64>,
        /// Output group for `bounded1` and `tn-wr-g`.
        #[arg(long)]
        group: Option<Group>,
        /// Block size `n` for `tn-wr-g`.
        #[arg(long)]
        block: Option<usize>,
    },
    /// Print every representative with its orbit.
    Orbits { instance: PathBuf },
    /// Validate a run against the expanded transition set.
    CheckRun { instance: PathBuf, run: PathBuf },
    /// Decide reachability in a data VASS.
    DataSolve {
        instance: PathBuf,
        /// Entry bound of the data search; defaults to four times the instance norm.
        #[arg(long)]
        bound: Option<i64>,
        /// Data beyond the source and target support; defaults to twice the widest template.
        #[arg(long)]
        fresh: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    #[value(name = "bounded1")]
    Bounded1,
    #[value(name = "tn-wr-g")]
    TnWrG,
    #[value(name = "sd-wr-tn")]
    SdWrTn,
    #[value(name = "cyclic")]
    Cyclic,
    #[value(name = "counting")]
    Counting,
}

/// Stdout text plus stderr stats.
#[derive(Debug, Default)]
struct Report {
    out: String,
    stats: Vec<(&'static str, String)>,
}

impl Report {
    fn new(verdict: &str) -> Self {
        Report { out: format!("{verdict}\n"), stats: Vec::new() }
    }

    fn line(mut self, s: impl AsRef<str>) -> Self {
        self.out.push_str(s.as_ref());
        if !s.as_ref().ends_with('\n') {
            self.out.push('\n');
        }
        self
    }

    fn stat(mut self, key: &'static str, value: impl ToString) -> Self {
        self.stats.push((key, value.to_string()));
        self
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Instance, Error> {
    parse_instance(&read(path)?)
}

fn load_run(path: &Path, vass: &Vass) -> Result<Run, Error> {
    parse_run(&read(path)?, vass)
}

fn show(vass: &Vass, c: &Config) -> String {
    let mut s = vass.state_name(c.state).to_string();
    for x in &c.vec {
        let _ = write!(s, " {x}");
    }
    s
}

fn usage(msg: &str) -> Error {
    Error::Input(msg.to_string())
}

fn run(cli: Cli) -> Result<Report, Error> {
    let limits = match &cli.limits {
        Some(list) => Limits::default().parse_overrides(list)?,
        None => Limits::default(),
    };
    match cli.command {
        Command::Solve { instance, out } => {
            let inst = load(&instance)?;
            let v = solve(&inst, &limits)?;
            let report = match v.answer {
                Answer::Reachable(r) => {
                    let text = print_run(&r, &inst.vass);
                    if let Some(path) = &out {
                        write(path, &text)?;
                    }
                    Report::new("REACHABLE").line(text).stat("length", r.len())
                }
                Answer::Unreachable => Report::new("UNREACHABLE"),
                Answer::ResourceLimit(why) => return Err(Error::ResourceLimit(why)),
            };
            Ok(report
                .stat("method", v.method)
                .stat("explored", v.stats.explored)
                .stat("decompositions", v.stats.decompositions)
                .stat("zreach_calls", v.stats.zreach_calls))
        }
        Command::Zreach { instance } => {
            let inst = load(&instance)?;
            let ts = inst.vass.expand(limits.max_orbit)?;
            let zl = ZLimits { node_limit: limits.ilp_nodes, ..ZLimits::default() };
            match zreachable(&inst, &ts, zl)? {
                ZReach::Yes(image) => {
                    let mut report = Report::new("REACHABLE").stat("steps", image.total());
                    for (t, count) in &image.counts {
                        let effect: Vec<String> = t.effect.iter().map(i64::to_string).collect();
                        report = report.line(format!(
                            "{count} × ({} {} : {})",
                            inst.vass.state_name(t.src),
                            inst.vass.state_name(t.dst),
                            effect.join(" ")
                        ));
                    }
                    Ok(report)
                }
                ZReach::No => Ok(Report::new("UNREACHABLE")),
            }
        }
        Command::Oracle { instance, bound } => {
            let inst = load(&instance)?;
            let ts = inst.vass.expand(limits.max_orbit)?;
            let budget = limits.budget();
            match bound {
                Some(m) => {
                    let (answer, explored) = bfs_oracle(&inst, &ts, m, &budget)?;
                    let report = match answer {
                        OracleAnswer::Reachable(r) => Report::new("REACHABLE").line(print_run(&r, &inst.vass)),
                        OracleAnswer::UnreachableWithin(_) => Report::new("UNREACHABLE"),
                        OracleAnswer::Exceeds { config, .. } => Report::new("UNKNOWN")
                            .stat("reason", "bound-exceeded")
                            .stat("exceeding", show(&inst.vass, &config)),
                    };
                    Ok(report.stat("bound", m).stat("explored", explored))
                }
                None => {
                    let o = escalating_oracle(&inst, &ts, &budget)?;
                    let report = match o.witness {
                        Some(r) => Report::new("REACHABLE").line(print_run(&r, &inst.vass)),
                        None => Report::new("UNREACHABLE"),
                    };
                    Ok(report.stat("bound", o.bound).stat("explored", o.explored))
                }
            }
        }
        Command::Pump { instance, max_len, backward } => {
            let inst = load(&instance)?;
            let ts = inst.vass.expand(limits.max_orbit)?;
            let budget = limits.budget();
            let found = if backward {
                find_backward_pump(&inst.target, &ts, max_len, &budget)?
            } else {
                find_forward_pump(&inst.source, &ts, max_len, &budget)?
            };
            Ok(match found {
                Some(r) => Report::new("OK").line(print_run(&r, &inst.vass)).stat("length", r.len()),
                None => Report::new("UNKNOWN").stat("reason", "no-pump-within-length").stat("max_len", max_len),
            })
        }
        Command::Lift { instance, zrun, max_len } => {
            let inst = load(&instance)?;
            let gamma = load_run(&zrun, &inst.vass)?;
            let ts = inst.vass.expand(limits.max_orbit)?;
            let budget = limits.budget();
            let forward = find_forward_pump(&inst.source, &ts, max_len, &budget)?;
            let backward = find_backward_pump(&inst.target, &ts, max_len, &budget)?;
            let (Some(forward), Some(backward)) = (forward, backward) else {
                return Ok(Report::new("UNKNOWN").stat("reason", "no-pump-within-length").stat("max_len", max_len));
            };
            let lifted = lift_zrun(&inst, &ts, &PumpPair { forward, backward }, &gamma, &budget)?;
            Ok(Report::new("OK").line(print_run(&lifted, &inst.vass)).stat("length", lifted.len()))
        }
        Command::Repair { instance, run, r } => {
            let inst = load(&instance)?;
            let pi = load_run(&run, &inst.vass)?;
            let group = inst.vass.group();
            let policy = FairnessPolicy::for_group(group)
                .ok_or_else(|| Error::UnsupportedGroup(format!("no repair for group {group}")))?;
            let ts = inst.vass.expand(limits.max_orbit)?;
            let repaired = policy.repair(&inst.vass, &ts, &pi, r)?;
            Ok(Report::new("OK").line(print_run(&repaired, &inst.vass)).stat("length", repaired.len()))
        }
        Command::Balance { instance, run } => {
            let inst = load(&instance)?;
            let pi = load_run(&run, &inst.vass)?;
            let ts = inst.vass.expand(limits.max_orbit)?;
            let b = balance_run(&inst, &ts, &pi)?;
            Ok(Report::new("OK")
                .line(print_run(&b.run, &inst.vass))
                .stat("microstages", b.ranks.len() - 1)
                .stat("rank_first", b.ranks[0])
                .stat("rank_last", b.ranks[b.ranks.len() - 1]))
        }
        Command::Reduce { input, kind, out, bound, group, block } => {
            let (text, mapping) = match kind {
                Kind::Counting => {
                    let data = parse_data_instance(&read(&input)?)?;
                    let c = reduce_counting(&data, bound, &limits)?;
                    let mapping = format!(
                        "reduction counting\n\
                         embedding coordinate (i-1)*B+b-1 counts the data holding b in dimension i\n\
                         bound {}\n",
                        c.bound
                    );
                    (print_instance(&c.instance), mapping)
                }
                _ => {
                    let inst = load(&input)?;
                    let need_group = || group.clone().ok_or_else(|| usage("--group is required for this kind"));
                    let r: ReductionOutput = match kind {
                        Kind::Bounded1 => {
                            let m = bound.ok_or_else(|| usage("--bound is required for bounded1"))?;
                            reduce_bounded_1vass(&inst, m, &need_group()?, &limits)?
                        }
                        Kind::TnWrG => {
                            let n = block.ok_or_else(|| usage("--block is required for tn-wr-g"))?;
                            reduce_to_tn_wr_g(&inst, n, &need_group()?, &limits)?
                        }
                        Kind::SdWrTn => reduce_sd_wr_tn(&inst, bound, &limits)?,
                        Kind::Cyclic => reduce_to_cyclic(&inst, &limits)?,
                        Kind::Counting => unreachable!("handled above"),
                    };
                    (print_instance(&r.instance), r.mapping_text())
                }
            };
            let mut sidecar = out.clone().into_os_string();
            sidecar.push(".map");
            write(&out, &text)?;
            write(Path::new(&sidecar), &mapping)?;
            Ok(Report::new(&format!("WROTE {}", out.display())).stat("mapping", Path::new(&sidecar).display()))
        }
        Command::Orbits { instance } => {
            let inst = load(&instance)?;
            let mut report = Report::new("OK").stat("group", inst.vass.group());
            let mut total = 0;
            for (k, t) in inst.vass.reps().iter().enumerate() {
                let orbit = orbit_of_transition(inst.vass.group(), t, limits.max_orbit)?;
                total += orbit.len();
                report = report.line(format!("orbit {} size {}", k + 1, orbit.len()));
                for u in &orbit {
                    let effect: Vec<String> = u.effect.iter().map(i64::to_string).collect();
                    report = report.line(format!(
                        "trans {} {} : {}",
                        inst.vass.state_name(u.src),
                        inst.vass.state_name(u.dst),
                        effect.join(" ")
                    ));
                }
            }
            Ok(report.stat("transitions", total))
        }
        Command::CheckRun { instance, run } => {
            let inst = load(&instance)?;
            let r = load_run(&run, &inst.vass)?;
            let ts = inst.vass.expand(limits.max_orbit)?;
            match ts.validate(&r) {
                Ok(end) => Ok(Report::new("OK")
                    .line(format!("end {}", show(&inst.vass, &end)))
                    .line(format!("from-source {}", r.start == inst.source))
                    .line(format!("at-target {}", end == inst.target))),
                Err(Error::Violation(v)) => Ok(Report::new(&format!("VIOLATION {v}"))),
                Err(e) => Err(e),
            }
        }
        Command::DataSolve { instance, bound, fresh } => {
            let inst = parse_data_instance(&read(&instance)?)?;
            data_solve(&inst, bound, fresh, &limits)
        }
    }
}

/// Invariant certificate, then bounded data search, then, for per-dimension
/// instances with zero endpoints, the counting VASS.
fn data_solve(inst: &DataInstance, bound: Option<i64>, fresh: Option<usize>, limits: &Limits) -> Result<Report, Error> {
    if let Some(inv) = certify_unreachable(inst) {
        let mut report = Report::new("UNREACHABLE").stat("method", "sum-invariant");
        report = report.line(format!("invariant dimension {}", inv.dim + 1));
        for (q, v) in inv.value.iter().enumerate() {
            if let Some(v) = v {
                report = report.line(format!("sum {} {v}", inst.states[q]));
            }
        }
        return Ok(report);
    }
    let bound = bound.unwrap_or(4 * inst.norm().max(1));
    let fresh = fresh.unwrap_or(2 * inst.templates.iter().map(|t| t.vars).max().unwrap_or(0));
    if let DataAnswer::Reachable(r) = data_oracle(inst, bound, fresh, limits)? {
        return Ok(Report::new("REACHABLE")
            .line(print_data_run(inst, &r))
            .stat("method", "data-search")
            .stat("length", r.steps.len()));
    }
    let counting = inst.symmetry == Symmetry::PerDimension && inst.source.vec.is_zero() && inst.target.vec.is_zero();
    if counting {
        let c = reduce_counting(inst, Some(counting_bound(inst)?), limits)?;
        let v = solve(&c.instance, limits)?;
        let report = match v.answer {
            Answer::Reachable(r) => {
                let data = c.back_translate(&r)?;
                Report::new("REACHABLE").line(print_data_run(inst, &data)).stat("length", data.steps.len())
            }
            Answer::Unreachable => Report::new("UNREACHABLE"),
            Answer::ResourceLimit(why) => return Err(Error::ResourceLimit(why)),
        };
        return Ok(report.stat("method", "counting").stat("counting_bound", c.bound));
    }
    Ok(Report::new("UNKNOWN")
        .stat("method", "data-search")
        .stat("reason", "no-run-within-bound")
        .stat("bound", bound)
        .stat("fresh", fresh))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            print!("{}", report.out);
            for (k, v) in &report.stats {
                eprintln!("{k}={v}");
            }
            ExitCode::SUCCESS
        }
        Err(Error::ResourceLimit(why)) => {
            println!("UNKNOWN");
            eprintln!("reason=resource-limit");
            eprintln!("detail={why}");
            ExitCode::from(3)
        }
        Err(e @ Error::Internal(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

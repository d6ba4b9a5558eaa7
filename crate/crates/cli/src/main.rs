//! `pqp`: solve problem files, run benchmark suites and summarize results.
//!
//! Exit codes: 0 when a solve ends `solved` or with an infeasibility
//! certificate (and for successful `bench`/`stats`/`generate` runs), 1 on
//! invalid input (command line, files, problem data), 2 when the solver
//! stops without a conclusive answer.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};
use pqp::bench::{self, BenchRecord, DEFAULT_SHIFT};
use pqp::io::{load_problem, read_warm_start, result_json, save_problem, write_warm_start, WarmStart};
use pqp::solver::SETTING_KEYS;
use pqp::{Settings, Solver};

/// Environment variable supplying the default time limit (seconds).
const TIME_LIMIT_ENV: &str = "PQP_TIME_LIMIT";

/// The CLI-facing error: its exit code and message.
struct Failure {
    code: u8,
    msg: String,
}

fn input_error(msg: impl ToString) -> Failure {
    Failure { code: 1, msg: msg.to_string() }
}

impl From<pqp::Error> for Failure {
    fn from(e: pqp::Error) -> Self {
        input_error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        input_error(e)
    }
}

type CliResult<T> = Result<T, Failure>;

/// Command-line name of a settings field.  Two fields have names fixed by
/// convention: `--scaling` and `--max-iter`.  `--warm-start` names the
/// warm-start file, so the on/off switch is `--warm-start-enabled`.
fn flag_name(key: &str) -> String {
    match key {
        "scaling_iters" => "scaling".into(),
        "max_outer_iter" => "max-iter".into(),
        "warm_start" => "warm-start-enabled".into(),
        k => k.replace('_', "-"),
    }
}

/// One argument per settings field, with the default shown in the help.
fn settings_args() -> Vec<Arg> {
    let defaults = serde_json::to_value(Settings::default()).expect("settings serialize");
    SETTING_KEYS
        .iter()
        .map(|key| {
            let default = &defaults[*key];
            let shown = match default {
                serde_json::Value::Null => "inf".to_string(),
                serde_json::Value::String(s) => s.clone(),
                v => v.to_string(),
            };
            let mut arg = Arg::new(*key)
                .long(flag_name(key))
                .help(format!("settings field `{key}` [default: {shown}]"))
                .help_heading("Solver settings");
            if default.is_boolean() {
                arg = arg.value_name("BOOL").num_args(0..=1).default_missing_value("true");
            } else {
                arg = arg.value_name("VALUE").num_args(1);
            }
            if *key == "time_limit" {
                arg = arg.env(TIME_LIMIT_ENV);
            }
            arg
        })
        .collect()
}

fn settings_from(m: &ArgMatches) -> CliResult<Settings> {
    let mut s = Settings::default();
    for key in SETTING_KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            s.set(key, v)?;
        }
    }
    s.validate()?;
    Ok(s)
}

fn output_arg() -> Arg {
    Arg::new("output").short('o').long("output").value_name("FILE").help("write to FILE instead of stdout")
}

fn seed_arg() -> Arg {
    Arg::new("seed").long("seed").value_name("N").default_value("0").help("random seed")
}

fn cli() -> Command {
    let bench_common = |c: Command| {
        c.arg(seed_arg())
            .arg(Arg::new("solver-id").long("solver-id").value_name("NAME").default_value("pqp").help("solver column of the records"))
            .arg(output_arg())
            .args(settings_args())
    };
    Command::new("pqp")
        .about("Sparse proximal augmented Lagrangian solver for convex and nonconvex quadratic programs")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .subcommand(
            Command::new("solve")
                .about("Solve a problem file and print a JSON result document")
                .arg(Arg::new("file").required(true).value_name("FILE"))
                .arg(Arg::new("warm-start").long("warm-start").value_name("FILE").help("warm-start file (overrides one in the problem file)"))
                .arg(Arg::new("save-warm-start").long("save-warm-start").value_name("FILE").help("write the returned (x, y) as a warm-start file"))
                .arg(output_arg())
                .args(settings_args()),
        )
        .subcommand(
            Command::new("bench")
                .about("Run a benchmark suite and write CSV records")
                .subcommand_required(true)
                .subcommand(bench_common(
                    Command::new("portfolio")
                        .about("Portfolio optimization problems")
                        .arg(Arg::new("n").long("n").value_name("RANGE").default_value("100..500").help("asset counts: `a..b` (with --step), or a comma list"))
                        .arg(Arg::new("step").long("step").value_name("N").default_value("100"))
                        .arg(Arg::new("beta").long("beta").value_name("LIST").help("risk aversions, comma separated [default: 0.01,0.1,1,10,100]")),
                ))
                .subcommand(bench_common(
                    Command::new("mpc")
                        .about("Optimal control problems")
                        .arg(Arg::new("horizon").long("horizon").value_name("RANGE").default_value("5..30").help("horizons: `a..b` (with --step), or a comma list"))
                        .arg(Arg::new("step").long("step").value_name("N").default_value("5"))
                        .arg(Arg::new("nx").long("nx").value_name("N").default_value("10"))
                        .arg(Arg::new("nu").long("nu").value_name("N").default_value("5")),
                ))
                .subcommand(bench_common(
                    Command::new("random")
                        .about("Random sparse QPs")
                        .arg(Arg::new("count").long("count").value_name("N").default_value("10"))
                        .arg(Arg::new("n").long("n").value_name("N").default_value("50"))
                        .arg(Arg::new("m").long("m").value_name("N").default_value("30"))
                        .arg(Arg::new("density").long("density").value_name("X").default_value("0.1"))
                        .arg(Arg::new("indefinite").long("indefinite").action(ArgAction::SetTrue).help("generate nonconvex problems")),
                )),
        )
        .subcommand(
            Command::new("stats")
                .about("Summarize benchmark records")
                .subcommand_required(true)
                .subcommand(
                    Command::new("sgm")
                        .about("Shifted geometric mean runtime per solver (CSV `solver,sgm`)")
                        .arg(Arg::new("records").required(true).value_name("CSV"))
                        .arg(Arg::new("shift").long("shift").value_name("SECONDS").default_value(DEFAULT_SHIFT.to_string()))
                        .arg(
                            Arg::new("time-limit")
                                .long("time-limit")
                                .value_name("SECONDS")
                                .env(TIME_LIMIT_ENV)
                                .help("runtime charged to failed runs (required when there are failures)"),
                        )
                        .arg(output_arg()),
                )
                .subcommand(
                    Command::new("profile")
                        .about("Performance profile breakpoints (CSV `solver,f,q`)")
                        .arg(Arg::new("records").required(true).value_name("CSV"))
                        .arg(output_arg()),
                ),
        )
        .subcommand(
            Command::new("generate")
                .about("Write a benchmark problem as a problem file")
                .subcommand_required(true)
                .subcommand(
                    Command::new("portfolio")
                        .arg(Arg::new("n").long("n").value_name("N").default_value("100"))
                        .arg(Arg::new("beta").long("beta").value_name("X").default_value("1"))
                        .arg(seed_arg())
                        .arg(output_arg().required(true)),
                )
                .subcommand(
                    Command::new("mpc")
                        .arg(Arg::new("horizon").long("horizon").value_name("N").default_value("10"))
                        .arg(Arg::new("nx").long("nx").value_name("N").default_value("10"))
                        .arg(Arg::new("nu").long("nu").value_name("N").default_value("5"))
                        .arg(seed_arg())
                        .arg(output_arg().required(true)),
                )
                .subcommand(
                    Command::new("random")
                        .arg(Arg::new("n").long("n").value_name("N").default_value("50"))
                        .arg(Arg::new("m").long("m").value_name("N").default_value("30"))
                        .arg(Arg::new("density").long("density").value_name("X").default_value("0.1"))
                        .arg(Arg::new("indefinite").long("indefinite").action(ArgAction::SetTrue))
                        .arg(seed_arg())
                        .arg(output_arg().required(true)),
                ),
        )
}

fn value<T: std::str::FromStr>(m: &ArgMatches, id: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    let raw = m.get_one::<String>(id).ok_or_else(|| input_error(format!("missing --{id}")))?;
    raw.parse().map_err(|e| input_error(format!("--{id}: `{raw}`: {e}")))
}

/// Parses `a..b` (inclusive, stepping by `step`) or a comma list.
fn parse_range(raw: &str, step: usize) -> CliResult<Vec<usize>> {
    let num = |s: &str| s.trim().parse::<usize>().map_err(|e| input_error(format!("`{raw}`: {e}")));
    let out: Vec<usize> = if let Some((a, b)) = raw.split_once("..") {
        if step == 0 {
            return Err(input_error("--step must be positive"));
        }
        (num(a)?..=num(b)?).step_by(step).collect()
    } else {
        raw.split(',').map(num).collect::<CliResult<_>>()?
    };
    if out.is_empty() {
        return Err(input_error(format!("`{raw}` is empty")));
    }
    Ok(out)
}

fn parse_list(raw: &str) -> CliResult<Vec<f64>> {
    raw.split(',').map(|s| s.trim().parse().map_err(|e| input_error(format!("`{raw}`: {e}")))).collect()
}

fn sink(m: &ArgMatches) -> CliResult<Box<dyn Write>> {
    Ok(match m.get_one::<String>("output") {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| input_error(format!("{p}: {e}")))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn open(path: &str) -> CliResult<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| input_error(format!("{path}: {e}")))?))
}

fn cmd_solve(m: &ArgMatches) -> CliResult<()> {
    let file: &String = m.get_one("file").expect("required");
    let settings = settings_from(m)?;
    let pf = load_problem(file)?;
    let warm = match m.get_one::<String>("warm-start") {
        Some(p) => Some(read_warm_start(open(p)?)?),
        None => pf.warm.clone(),
    };
    let solver = Solver::new(pf.problem, settings)?;
    let result = solver.solve(warm.as_ref().map(|w| (w.x.as_slice(), w.y.as_slice())))?;
    let mut out = sink(m)?;
    writeln!(out, "{}", result_json(&result)?)?;
    out.flush()?;
    if let Some(p) = m.get_one::<String>("save-warm-start") {
        let w = WarmStart { x: result.x.clone(), y: result.y.clone() };
        write_warm_start(BufWriter::new(File::create(p)?), &w)?;
    }
    if result.status.is_conclusive() {
        Ok(())
    } else {
        Err(Failure { code: 2, msg: format!("solver stopped with status {}", result.status) })
    }
}

fn cmd_bench(m: &ArgMatches) -> CliResult<()> {
    let (kind, sm) = m.subcommand().expect("subcommand required");
    let settings = settings_from(sm)?;
    let seed: u64 = value(sm, "seed")?;
    let id: &String = sm.get_one("solver-id").expect("has default");
    let records: Vec<BenchRecord> = match kind {
        "portfolio" => {
            let ns = parse_range(sm.get_one::<String>("n").expect("default"), value(sm, "step")?)?;
            let betas = match sm.get_one::<String>("beta") {
                Some(b) => parse_list(b)?,
                None => bench::PORTFOLIO_BETAS.to_vec(),
            };
            bench::portfolio_suite(&ns, &betas, &settings, id, seed)?
        }
        "mpc" => {
            let hs = parse_range(sm.get_one::<String>("horizon").expect("default"), value(sm, "step")?)?;
            bench::mpc_suite(&hs, value(sm, "nx")?, value(sm, "nu")?, &settings, id, seed)?
        }
        "random" => bench::random_suite(
            value(sm, "count")?,
            value(sm, "n")?,
            value(sm, "m")?,
            value(sm, "density")?,
            !sm.get_flag("indefinite"),
            &settings,
            id,
            seed,
        )?,
        _ => unreachable!("clap restricts subcommands"),
    };
    bench::write_records(sink(sm)?, &records)?;
    Ok(())
}

fn cmd_stats(m: &ArgMatches) -> CliResult<()> {
    let (kind, sm) = m.subcommand().expect("subcommand required");
    let records = bench::read_records(open(sm.get_one::<String>("records").expect("required"))?)?;
    match kind {
        "sgm" => {
            let shift: f64 = value(sm, "shift")?;
            let limit = match sm.get_one::<String>("time-limit") {
                Some(_) => value::<f64>(sm, "time-limit")?,
                None if records.iter().all(BenchRecord::succeeded) => f64::INFINITY,
                None => return Err(input_error(format!("records contain failed runs: pass --time-limit or set {TIME_LIMIT_ENV}"))),
            };
            let by = bench::sgm_by_solver(&records, shift, limit)?;
            let mut wr = csv::Writer::from_writer(sink(sm)?);
            wr.write_record(["solver", "sgm"]).map_err(input_error)?;
            for (s, v) in by {
                wr.write_record([s, format!("{v:?}")]).map_err(input_error)?;
            }
            wr.flush()?;
        }
        "profile" => {
            let profile = bench::performance_profile(&records)?;
            for p in &profile.excluded {
                eprintln!("warning: no solver solved {p}; excluded from the profile");
            }
            bench::write_profile(sink(sm)?, &profile)?;
        }
        _ => unreachable!("clap restricts subcommands"),
    }
    Ok(())
}

fn cmd_generate(m: &ArgMatches) -> CliResult<()> {
    let (kind, sm) = m.subcommand().expect("subcommand required");
    let seed: u64 = value(sm, "seed")?;
    let problem = match kind {
        "portfolio" => bench::gen_portfolio(value(sm, "n")?, value(sm, "beta")?, seed)?,
        "mpc" => bench::gen_mpc(value(sm, "nx")?, value(sm, "nu")?, value(sm, "horizon")?, seed)?.problem,
        "random" => bench::gen_random_qp(value(sm, "n")?, value(sm, "m")?, value(sm, "density")?, !sm.get_flag("indefinite"), seed)?,
        _ => unreachable!("clap restricts subcommands"),
    };
    let out: &String = sm.get_one("output").expect("required");
    save_problem(PathBuf::from(out), &problem, None)?;
    Ok(())
}

fn run(m: &ArgMatches) -> CliResult<()> {
    match m.subcommand() {
        Some(("solve", sm)) => cmd_solve(sm),
        Some(("bench", sm)) => cmd_bench(sm),
        Some(("stats", sm)) => cmd_stats(sm),
        Some(("generate", sm)) => cmd_generate(sm),
        _ => unreachable!("clap requires a subcommand"),
    }
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pqp: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

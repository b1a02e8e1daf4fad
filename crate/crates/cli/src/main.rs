mod experiments;
mod output;
mod params;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tempus_core::suite::{self, DEFAULT_SEED, GROUPS};
use tempus_core::{par, TempusError};

use experiments::{Experiment, Output, CATALOG, PRESETS};
use params::{parse_flags, parse_preset, parse_sweep, resolve, UsageError};

#[derive(Parser)]
#[command(name = "tempus", version, about = "Time-energy uncertainty numerics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Cmd {
    /// List experiments, their parameters and presets.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Run one experiment.
    ///
    /// Options: --preset NAME, --config FILE (`key = value` lines),
    /// --sweep `key=a..b[:lin|:log][:n]` or `key=v1,v2,...`, --out DIR,
    /// --format csv|jsonl, --seed N. Every other `--name value` sets an
    /// experiment parameter (see `tempus list`). Without --out only the
    /// reports are printed. `tempus run NAME --help` lists its parameters.
    #[command(disable_help_flag = true)]
    Run {
        experiment: String,
        #[arg(
            trailing_var_arg = true,
            allow_hyphen_values = true,
            value_name = "OPTIONS"
        )]
        args: Vec<String>,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, conflicts_with = "group")]
        all: bool,
        #[arg(long)]
        group: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Core(TempusError),
    Io(std::io::Error),
    /// Reports failed; the output was still written.
    Checks(usize),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<TempusError> for Failure {
    fn from(e: TempusError) -> Self {
        match e {
            TempusError::Parameter(m) => Failure::Usage(m),
            e => Failure::Core(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("TEMPUS_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
    {
        par::init_threads(n);
    }
    let res = match cli.cmd {
        Cmd::List { json } => list(json),
        Cmd::Run { experiment, args } => run(&experiment, &args),
        Cmd::Verify {
            all,
            group,
            seed,
            format,
            out,
        } => verify(all, group, seed, format, out),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: io: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Checks(n)) => {
            eprintln!("{n} asserted check(s) failed");
            ExitCode::from(3)
        }
    }
}

fn list(json: bool) -> Result<(), Failure> {
    let mut s = String::new();
    if json {
        for e in CATALOG {
            let params: Vec<_> = e
                .params
                .iter()
                .map(|p| serde_json::json!({"name": p.name, "default": p.default, "integer": p.kind == params::Kind::Count, "help": p.help}))
                .collect();
            let presets: Vec<_> = PRESETS
                .iter()
                .filter(|p| p.1 == e.name)
                .map(|p| p.0)
                .collect();
            let v = serde_json::json!({
                "name": e.name, "about": e.about, "anchors": e.anchors, "params": params, "presets": presets,
            });
            s.push_str(&v.to_string());
            s.push('\n');
        }
    } else {
        for e in CATALOG {
            s.push_str(&describe(e));
        }
        s.push_str("\nsuite groups:\n");
        for (id, title) in GROUPS {
            s.push_str(&format!("  {id:<17} {title}\n"));
        }
    }
    std::io::stdout().write_all(s.as_bytes())?;
    Ok(())
}

fn describe(e: &Experiment) -> String {
    let mut s = format!("{:<11} {}\n", e.name, e.about);
    s.push_str(&format!("            relations: {}\n", e.anchors.join(" ")));
    for p in e.params {
        s.push_str(&format!(
            "            --{:<12} {:<8} {}\n",
            p.name, p.default, p.help
        ));
    }
    for p in PRESETS.iter().filter(|p| p.1 == e.name) {
        s.push_str(&format!("            preset: {}\n", p.0));
    }
    s
}

const RUN_OPTIONS: &str = "\
run options:
  --preset NAME    built-in parameter preset
  --config FILE    `key = value` lines, applied after the preset
  --sweep SPEC     key=a..b[:lin|:log][:n] or key=v1,v2,...
  --out DIR        write tables, summary, reports and gnuplot scripts
  --format FMT     csv (default) or jsonl
  --seed N         random seed
";

/// Options of `run` that are not experiment parameters.
struct RunOptions {
    preset: Option<String>,
    config: Option<PathBuf>,
    sweep: Option<String>,
    out: Option<PathBuf>,
    format: Format,
    seed: u64,
    params: Vec<(String, String)>,
}

fn split_run_options(args: &[String]) -> Result<RunOptions, Failure> {
    let mut o = RunOptions {
        preset: None,
        config: None,
        sweep: None,
        out: None,
        format: Format::Csv,
        seed: DEFAULT_SEED,
        params: Vec::new(),
    };
    for (k, v) in parse_flags(args)? {
        match k.as_str() {
            "preset" => o.preset = Some(v),
            "config" => o.config = Some(v.into()),
            "sweep" => o.sweep = Some(v),
            "out" => o.out = Some(v.into()),
            "format" => {
                o.format = Format::from_str(&v, false).map_err(|_| {
                    Failure::Usage(format!("--format: expected csv or jsonl, got {v:?}"))
                })?
            }
            "seed" => {
                o.seed = v
                    .parse()
                    .map_err(|_| Failure::Usage(format!("--seed: not an integer: {v:?}")))?
            }
            _ => o.params.push((k, v)),
        }
    }
    Ok(o)
}

fn run(name: &str, args: &[String]) -> Result<(), Failure> {
    let exp: &Experiment = experiments::find(name).ok_or_else(|| {
        let names: Vec<_> = CATALOG.iter().map(|e| e.name).collect();
        Failure::Usage(format!(
            "unknown experiment {name:?} (one of {})",
            names.join(", ")
        ))
    })?;
    if args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{}\n{RUN_OPTIONS}", describe(exp));
        return Ok(());
    }
    let RunOptions {
        preset,
        config,
        sweep,
        out,
        format,
        seed,
        params,
    } = split_run_options(args)?;
    let mut layers = Vec::new();
    if let Some(p) = preset {
        let (_, _, text) = PRESETS
            .iter()
            .find(|q| q.0 == p && q.1 == exp.name)
            .ok_or_else(|| Failure::Usage(format!("no preset {p:?} for {}", exp.name)))?;
        layers.push(parse_preset(text)?);
    }
    if let Some(path) = config {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        layers.push(parse_preset(&text)?);
    }
    layers.push(params);
    let base = resolve(exp.params, &layers, seed)?;

    let mut failed = 0;
    let mut sink = output::Sink::new(out, format, exp.name)?;
    match sweep {
        None => {
            let o = (exp.run)(&base)?;
            failed += count_failed(&o);
            sink.single(&base, &o)?;
        }
        Some(spec) => {
            let sw = parse_sweep(&spec)?;
            let mut runs = Vec::new();
            for v in &sw.values {
                let mut l = layers.clone();
                l.push(vec![(sw.key.clone(), v.to_string())]);
                let p = resolve(exp.params, &l, seed)?;
                let o = (exp.run)(&p)?;
                failed += count_failed(&o);
                runs.push((p, o));
            }
            sink.sweep(&sw.key, &runs)?;
        }
    }
    if failed > 0 {
        return Err(Failure::Checks(failed));
    }
    Ok(())
}

fn count_failed(o: &Output) -> usize {
    o.reports.iter().filter(|r| r.asserted && !r.pass).count()
}

fn verify(
    all: bool,
    groups: Vec<String>,
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let ids: Vec<String> = if all || groups.is_empty() {
        GROUPS.iter().map(|g| g.0.to_string()).collect()
    } else {
        groups
    };
    let mut results = Vec::new();
    for id in &ids {
        results.push(suite::run_group(id, seed)?);
    }
    let missing = if ids.len() == GROUPS.len() {
        suite::missing_tags(&results)
    } else {
        Vec::new()
    };
    let text = output::verify_text(&results, &missing, format);
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    for g in &results {
        let status = if g.pass() { "ok" } else { "FAILED" };
        eprintln!("{:<17} {:>3} reports  {status}", g.id, g.reports.len());
    }
    if !missing.is_empty() {
        eprintln!("relations without an asserted check: {}", missing.join(" "));
    }
    let failed: usize = results.iter().map(|g| g.failures().len()).sum::<usize>() + missing.len();
    if failed > 0 {
        return Err(Failure::Checks(failed));
    }
    Ok(())
}

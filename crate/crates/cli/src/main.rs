//! `maxrep`: command-line runner for the maximal representation lab.
//!
//! Exit codes: 0 success, 1 failed checks or numerical errors (outputs are
//! still written), 2 usage, configuration or unsupported-input errors.

mod commands;
mod config;
mod error;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use chrono::{SecondsFormat, Utc};
use clap::{Parser, Subcommand};

use commands::{load_rep, Context, Outcome, RepSpec};
use config::Config;
use error::CliError;
use record::{create_run_dir, run_id, versions, write_new, RunRecord, Settings, Status};

#[derive(Debug, Parser)]
#[command(name = "maxrep", version, about = "Numerical experiments on maximal representations of surface groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config with [tolerances], [sampling], [curves], [twists].
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed; overrides the config.
    #[arg(long, global = true, env = "MAXREP_SEED")]
    seed: Option<u64>,

    /// Genus of the surface (default 2).
    #[arg(long, global = true)]
    genus: Option<u32>,

    /// Half the dimension of the symplectic space (default 2).
    #[arg(long, global = true)]
    n: Option<usize>,

    /// diagonal, irreducible or file:PATH.
    #[arg(long, global = true, default_value = "diagonal")]
    rep: RepSpec,

    /// Twist label for `orbit`; overrides [twists].label.
    #[arg(long, global = true)]
    twist: Option<String>,

    /// Largest twist power for `orbit`; overrides [twists].kmax.
    #[arg(long, global = true)]
    kmax: Option<u32>,

    /// Parent of the run directories.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads (0: one per core). Outputs do not depend on it.
    #[arg(long, global = true, env = "MAXREP_WORKERS", default_value_t = 0)]
    workers: usize,

    /// Report errors as JSON on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Run the full lemma suite and write lemma_suite.json.
    Verify,
    /// Toledo invariant and Milnor-Wood bound.
    Toledo,
    /// Translation lengths of sampled words.
    Trlen,
    /// Quasi-isometry fit of tr_rho against tr_h, with the scatter.
    Qi,
    /// Curve-length sums along a twist orbit.
    Orbit,
    /// Length bound for random causal curves.
    Causal,
    /// Print the resolved settings; writes nothing.
    Info,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Toledo => "toledo",
            Command::Trlen => "trlen",
            Command::Qi => "qi",
            Command::Orbit => "orbit",
            Command::Causal => "causal",
            Command::Info => "info",
        }
    }

    fn needs_rep(self) -> bool {
        self != Command::Causal
    }
}

fn report(err: &CliError, json_errors: bool) -> ExitCode {
    if json_errors {
        eprintln!("{}", err.to_json());
    } else {
        eprintln!("maxrep: {err}");
    }
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let json_errors = std::env::args().any(|a| a == "--json-errors");
            if json_errors {
                return report(&CliError::Usage(e.kind().to_string() + ": " + &e.to_string()), true);
            }
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => report(&e, cli.json_errors),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let seed = cli.seed.unwrap_or(cfg.sampling.seed);
    let settings = Settings {
        genus: cli.genus.unwrap_or(2),
        n: cli.n.unwrap_or(2),
        rep: cli.rep.to_string(),
        twist: cli.twist.clone().unwrap_or_else(|| cfg.twists.label.clone()),
        kmax: cli.kmax.unwrap_or(cfg.twists.kmax),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", cli.workers)))?;

    if cli.command == Command::Info {
        return info(cli, &cfg, seed, &settings, pool.current_num_threads());
    }

    let loaded = if cli.command.needs_rep() {
        Some(load_rep(&cli.rep, cli.genus, cli.n, &cfg.tolerances)?)
    } else {
        None
    };
    let ctx = Context {
        cfg,
        settings,
        seed,
        loaded,
    };
    let start = Instant::now();
    let result = pool.install(|| match cli.command {
        Command::Verify => commands::verify(&ctx),
        Command::Toledo => commands::toledo_cmd(&ctx),
        Command::Trlen => commands::trlen(&ctx),
        Command::Qi => commands::qi(&ctx),
        Command::Orbit => commands::orbit(&ctx),
        Command::Causal => commands::causal(&ctx),
        Command::Info => unreachable!(),
    });
    // input problems found while running leave no run directory behind
    let (outcome, error) = match result {
        Ok(o) => (o, None),
        Err(e) if e.exit_code() == 2 => return Err(e),
        Err(e) => (Outcome::default(), Some(e)),
    };

    let created = Utc::now();
    let id = run_id(&created, cli.command.name(), ctx.seed, &ctx.settings, &ctx.cfg);
    let (dir, id) = create_run_dir(&cli.out, &id)?;
    let mut outputs = Vec::new();
    for (name, bytes) in &outcome.files {
        outputs.push(write_new(&dir, name, bytes)?);
    }
    let status = if error.is_some() { Status::Error } else { outcome.status() };
    let record = RunRecord {
        run_id: id,
        command: cli.command.name().into(),
        created: created.to_rfc3339_opts(SecondsFormat::Secs, true),
        seed: ctx.seed,
        workers: pool.current_num_threads(),
        settings: ctx.settings.clone(),
        config: ctx.cfg.clone(),
        representation: ctx.loaded.as_ref().map(|l| l.info.clone()),
        versions: versions(),
        outputs,
        status,
        error: error.as_ref().map(|e| e.to_string()),
        warnings: outcome.warnings.clone(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        toledo: outcome.toledo.clone(),
    };
    let mut bytes = serde_json::to_vec_pretty(&record).expect("run record serializes");
    bytes.push(b'\n');
    write_new(&dir, "run.json", &bytes)?;

    for line in &outcome.lines {
        println!("{line}");
    }
    for w in &outcome.warnings {
        eprintln!("maxrep: warning: {w}");
    }
    println!("run directory: {}", dir.display());
    if let Some(e) = error {
        return Ok(report(&e, cli.json_errors));
    }
    Ok(match status {
        Status::Ok => ExitCode::SUCCESS,
        Status::ChecksFailed | Status::Error => ExitCode::from(1),
    })
}

fn info(cli: &Cli, cfg: &Config, seed: u64, settings: &Settings, workers: usize) -> Result<ExitCode, CliError> {
    for (name, v) in versions() {
        println!("{name} {v}");
    }
    println!("seed: {seed}");
    println!("workers: {workers}");
    println!(
        "genus: {}  n: {}  rep: {}  twist: {}  kmax: {}",
        settings.genus, settings.n, settings.rep, settings.twist, settings.kmax
    );
    match load_rep(&cli.rep, cli.genus, cli.n, &cfg.tolerances) {
        Ok(l) => println!(
            "representation: {} ({}), genus {}, Sp({}, R), relator residual {:e}, Milnor-Wood bound {}",
            l.info.source,
            l.info.construction,
            l.info.genus,
            2 * l.info.n,
            l.info.relator_residual,
            l.info.milnor_wood_bound
        ),
        Err(e) => println!("representation: unavailable ({e})"),
    }
    println!("\n# effective configuration");
    print!("{}", cfg.to_toml());
    Ok(ExitCode::SUCCESS)
}

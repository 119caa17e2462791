use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{info, warn};

use tradeclock::analyze::{analyze_days, load_instrument};
use tradeclock::config::RunConfig;
use tradeclock::report::write_bundle;
use tradeclock::simulate::{simulate, write_dataset};
use tradeclock::verify::{run_verify, Status, VerifyOptions, DEFAULT_SEED, SYMBOL};
use tradeclock::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "tradeclock", version, about = "Duration-conditioned microstructure statistics and order-flow simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every statistic for one instrument's day files.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        symbol: String,
    },
    /// Write the configured scenario as day files into the data directory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// File-name prefix; defaults to the first configured instrument.
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Run the end-to-end checks on simulated data.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Skip the regression, seasonality and performance checks.
        #[arg(long)]
        quick: bool,
        /// Overrides the scenario seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidScenario(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn analyze(config: &Path, symbol: &str) -> Result<(), Error> {
    let cfg = RunConfig::load(config)?;
    let inst = cfg.instrument(symbol)?;
    let ingested = load_instrument(&cfg.data_dir, inst)?;
    let f = &ingested.filter;
    info!(
        "{symbol}: {} input days, {} kept, {} thin, {} out-of-session orders removed",
        f.input_days,
        f.kept_days,
        f.thin_days.len(),
        f.out_of_session_orders
    );
    let a = analyze_days(symbol, &ingested.days, &cfg.estimators)?;
    let command = vec![
        "tradeclock".into(),
        "analyze".into(),
        "--config".into(),
        config.display().to_string(),
        "--symbol".into(),
        symbol.into(),
    ];
    let files = write_bundle(&cfg.output_dir, &a, Some(&ingested), command)?;
    for p in &files.csv {
        println!("{}", p.display());
    }
    println!("null_consistent={}", a.null_check.null_consistent);
    Ok(())
}

fn simulate_cmd(config: &Path, symbol: Option<String>) -> Result<(), Error> {
    let cfg = RunConfig::load(config)?;
    let scenario = cfg.scenario.clone().ok_or_else(|| Error::Config("no [scenario] section".into()))?;
    let symbol = symbol.or_else(|| cfg.instruments.first().map(|i| i.symbol.clone())).unwrap_or_else(|| SYMBOL.into());
    if let Ok(inst) = cfg.instrument(&symbol) {
        if inst.tick_value != scenario.tick_value {
            return Err(Error::Config(format!(
                "scenario tick_value {} differs from {symbol} tick_value {}",
                scenario.tick_value, inst.tick_value
            )));
        }
        let s = inst.session()?;
        if scenario.session_open_ms < s.open_ms || scenario.session_open_ms + scenario.session_ms > s.close_ms {
            warn!("simulated session extends past the {symbol} session; analyze will trim it");
        }
    }
    let days = simulate(&scenario)?;
    write_dataset(&scenario, &days, &cfg.data_dir, &symbol)?;
    for d in &days {
        if d.orders.is_empty() {
            warn!("{}: no arrivals", d.date);
        }
        println!("{} {} trades", d.date, d.orders.len());
    }
    Ok(())
}

fn verify(config: &Path, quick: bool, seed: Option<u64>) -> Result<bool, Error> {
    let cfg = RunConfig::load(config)?;
    let seed = seed.or(cfg.scenario.as_ref().map(|s| s.seed)).unwrap_or(DEFAULT_SEED);
    let opts = VerifyOptions { seed, quick, params: cfg.estimators.clone() };
    let out = cfg.output_dir.join("verify");
    let verdict = run_verify(&opts, &out)?;
    for c in &verdict.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
            Status::Error => "ERROR",
        };
        println!("[{tag}] {:>2} {}: {} ({:.2} s)", c.id, c.name, c.detail, c.elapsed_s);
    }
    println!("verdict written to {}", out.join(tradeclock::verify::VERDICT_FILE).display());
    Ok(verdict.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Analyze { config, symbol } => analyze(&config, &symbol).map(|_| true),
        Command::Simulate { config, symbol } => simulate_cmd(&config, symbol).map(|_| true),
        Command::Verify { config, quick, seed } => verify(&config, quick, seed),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

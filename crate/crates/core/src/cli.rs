//! Command-line front end.
//!
//! Datasets go to `--output`, else to `$UPLINK_SECRECY_OUT/<default name>`,
//! else stdout. Summaries and warnings always go to stderr.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analytic::{essr_random_high_corollaries, Regime};
use crate::channel::{db_to_linear, SystemConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{
    run_experiment, run_figure, run_table1, trial_channels, write_table1_csv, write_table1_json,
    Dataset, EssrEstimate, ExperimentSpec, FigureOptions, OutputFormat, RunOptions, Sweep, Unit,
    DEFAULT_SEED, DEFAULT_TRIALS, FIGURE_IDS, TABLE1_ANTENNAS, TABLE1_USERS,
};
use crate::selection::Strategy;
use crate::validation::{run_criterion, ValidationOptions, CRITERIA};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "UPLINK_SECRECY_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "uplink-secrecy",
    version,
    about = "Secrecy sum-rate simulator for multiuser uplink with an eavesdropper"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo ESSR at one configuration, paired with its closed form.
    Essr(EssrArgs),
    /// ESSR along one axis (k, K, N or snr_db).
    Sweep(SweepArgs),
    /// Reproduce one of the figure datasets (1 to 9).
    Figure(FigureArgs),
    /// Strongest-user channel gain table.
    Table1(Table1Args),
    /// Run the acceptance checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Output file; defaults to the directory in $UPLINK_SECRECY_OUT, else stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// csv or json; inferred from the output extension when omitted.
    #[arg(long)]
    pub format: Option<OutputFormat>,
    /// Worker-thread cap; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ScenarioArgs {
    /// JSON file with scenario keys; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "M")]
    pub bs_antennas: Option<usize>,
    #[arg(long = "N")]
    pub eve_antennas: Option<usize>,
    #[arg(long = "K")]
    pub users: Option<usize>,
    #[arg(long = "k")]
    pub served: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// high-snr, low-snr or large-scale; inferred from the SNR when omitted.
    #[arg(long)]
    pub regime: Option<Regime>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// nats or bits; conversion happens only on output.
    #[arg(long)]
    pub unit: Option<Unit>,
}

#[derive(Debug, Args)]
pub struct EssrArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Write trial 0's main and wiretap matrices to DIR as little-endian dumps.
    #[arg(long, value_name = "DIR")]
    pub dump_channels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub axis: Option<String>,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Figure number.
    pub id: u8,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "nats")]
    pub unit: Unit,
    /// `N - M` offsets for figure 6.
    #[arg(long, value_delimiter = ',')]
    pub eve_offsets: Option<Vec<usize>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long = "K", default_value_t = TABLE1_USERS)]
    pub users: usize,
    /// Comma-separated antenna counts.
    #[arg(long = "M", value_delimiter = ',')]
    pub antennas: Option<Vec<usize>>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Fewer trials and looser tolerances.
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Run only these criteria (comma-separated ids).
    #[arg(long, value_delimiter = ',')]
    pub criterion: Option<Vec<u8>>,
}

/// Scenario file contents. Every key is optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(rename = "M")]
    pub bs_antennas: Option<usize>,
    #[serde(rename = "N")]
    pub eve_antennas: Option<usize>,
    #[serde(rename = "K")]
    pub users: Option<usize>,
    #[serde(rename = "k")]
    pub served: Option<usize>,
    pub snr_db: Option<f64>,
    pub rho: Option<f64>,
    pub xi: Option<f64>,
    pub strategy: Option<Strategy>,
    pub regime: Option<Regime>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub unit: Option<Unit>,
    pub axis: Option<String>,
    pub values: Option<Vec<f64>>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))
    }
}

struct Resolved {
    spec: ExperimentSpec,
    unit: Unit,
}

fn require<T>(v: Option<T>, field: &'static str) -> Result<T> {
    v.ok_or_else(|| Error::config(field, format!("missing `{field}` (flag or config key)")))
}

fn infer_regime(strategy: Strategy, rho: f64) -> Regime {
    match strategy {
        Strategy::NormBased | Strategy::NormDiff => Regime::LargeScale,
        _ if rho >= 1.0 => Regime::HighSnr,
        _ => Regime::LowSnr,
    }
}

fn resolve(
    args: &ScenarioArgs,
    sweep: Option<(Option<String>, Option<Vec<f64>>)>,
) -> Result<Resolved> {
    let file = match &args.config {
        Some(p) => ScenarioFile::load(p)?,
        None => ScenarioFile::default(),
    };
    let rho = match (args.snr_db, file.snr_db, file.rho) {
        (Some(db), _, _) => db_to_linear(db),
        (None, Some(_), Some(_)) => {
            return Err(Error::config(
                "rho",
                "give either `snr_db` or `rho`, not both",
            ))
        }
        (None, Some(db), None) => db_to_linear(db),
        (None, None, Some(rho)) => rho,
        (None, None, None) => {
            return Err(Error::config(
                "snr_db",
                "missing `snr_db` (flag or config key)",
            ))
        }
    };
    let config = SystemConfig {
        bs_antennas: require(args.bs_antennas.or(file.bs_antennas), "M")?,
        eve_antennas: require(args.eve_antennas.or(file.eve_antennas), "N")?,
        users: require(args.users.or(file.users), "K")?,
        served: require(args.served.or(file.served), "k")?,
        rho,
        xi: args.xi.or(file.xi).unwrap_or(0.0),
    };
    let strategy = args.strategy.or(file.strategy).unwrap_or(Strategy::Random);
    let regime = args
        .regime
        .or(file.regime)
        .unwrap_or_else(|| infer_regime(strategy, rho));
    let sweep = match sweep {
        None => Sweep::Served(vec![config.served]),
        Some((axis, values)) => {
            let axis = require(axis.or(file.axis), "axis")?;
            let values = require(values.or(file.values), "values")?;
            Sweep::from_axis(&axis, &values)?
        }
    };
    let spec = ExperimentSpec {
        config,
        sweep,
        strategy,
        regime,
        trials: args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
        master_seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
    };
    spec.point_configs()?;
    Ok(Resolved {
        spec,
        unit: args.unit.or(file.unit).unwrap_or(Unit::Nats),
    })
}

fn regime_warning(spec: &ExperimentSpec) -> Option<String> {
    let rho = spec.config.rho;
    match spec.regime {
        Regime::HighSnr if rho < 10.0 => Some(format!(
            "high-SNR formula evaluated at rho = {rho:.3e} (< 10 dB)"
        )),
        Regime::LowSnr if rho > 0.1 => Some(format!(
            "low-SNR formula evaluated at rho = {rho:.3e} (> -10 dB)"
        )),
        _ => None,
    }
}

fn warn_all(spec: &ExperimentSpec) -> Result<()> {
    for cfg in spec.point_configs()?.iter().take(1) {
        for w in cfg.warnings() {
            eprintln!("warning: {w}");
        }
    }
    if let Some(w) = regime_warning(spec) {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn summary(axis: &str, e: &EssrEstimate, unit: Unit) -> String {
    let f = unit.factor();
    let name = match unit {
        Unit::Nats => "nats",
        Unit::Bits => "bits",
    };
    let mut line = format!(
        "{axis}={}: mc {:.6} ± {:.6} {name}",
        e.point,
        e.mc_mean * f,
        e.mc_stderr * f
    );
    match e.analytic {
        Some(a) if a != 0.0 => {
            line += &format!(
                " vs analytic {:.6} (gap {:+.2}%)",
                a * f,
                100.0 * (e.mc_mean - a) / a
            )
        }
        Some(a) => line += &format!(" vs analytic {:.6}", a * f),
        None => line += " (no closed form)",
    }
    line
}

fn peak_reference(cfg: &SystemConfig, spec: &ExperimentSpec) -> Option<f64> {
    let (m, n, k) = (cfg.bs_antennas, cfg.eve_antennas, cfg.served);
    if spec.strategy != Strategy::Random
        || spec.regime != Regime::HighSnr
        || m != n
        || k != m
        || cfg.xi != 0.0
    {
        return None;
    }
    essr_random_high_corollaries(m, n, k, cfg.rho)
        .ok()?
        .equal_antenna_peak
}

fn pick_format(out: &OutputArgs, path: Option<&Path>) -> OutputFormat {
    out.format.unwrap_or_else(
        || match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        },
    )
}

fn destination(out: &OutputArgs, default_stem: &str) -> Option<PathBuf> {
    if let Some(p) = &out.output {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUTPUT_DIR_ENV)?;
    let ext = match out.format {
        Some(OutputFormat::Json) => "json",
        _ => "csv",
    };
    Some(Path::new(&dir).join(format!("{default_stem}.{ext}")))
}

fn with_sink(
    out: &OutputArgs,
    default_stem: &str,
    write: impl FnOnce(&mut dyn Write, OutputFormat) -> Result<()>,
) -> Result<()> {
    let path = destination(out, default_stem);
    let format = pick_format(out, path.as_deref());
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let mut w = BufWriter::new(File::create(&p)?);
            write(&mut w, format)?;
            w.flush()?;
            eprintln!("wrote {}", p.display());
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w, format)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run_options(threads: Option<usize>) -> RunOptions {
    RunOptions {
        threads,
        ..RunOptions::default()
    }
}

fn dump_channels(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let (h, g) = trial_channels(&spec.config, spec.master_seed, 0)?;
    h.write_le(BufWriter::new(File::create(dir.join("main.bin"))?))?;
    g.write_le(BufWriter::new(File::create(dir.join("wiretap.bin"))?))?;
    eprintln!(
        "wrote {} and {}",
        dir.join("main.bin").display(),
        dir.join("wiretap.bin").display()
    );
    Ok(())
}

fn run_series(resolved: Resolved, out: &OutputArgs, stem: &str) -> Result<()> {
    let Resolved { spec, unit } = resolved;
    warn_all(&spec)?;
    let est = run_experiment(&spec, &run_options(out.threads))?;
    let cfgs = spec.point_configs()?;
    for (cfg, e) in cfgs.iter().zip(&est) {
        let mut line = summary(spec.sweep.axis_name(), e, unit);
        if let Some(peak) = peak_reference(cfg, &spec) {
            line += &format!(", peak closed form {:.6}", peak * unit.factor());
        }
        eprintln!("{line}");
    }
    let mut data = Dataset::new(stem);
    data.push_series(&spec.strategy.to_string(), spec, &est);
    let data = data.in_unit(unit);
    with_sink(out, stem, |w, f| data.write(w, f))
}

pub fn cmd_essr(args: &EssrArgs) -> Result<()> {
    let resolved = resolve(&args.scenario, None)?;
    if let Some(dir) = &args.dump_channels {
        dump_channels(&resolved.spec, dir)?;
    }
    run_series(resolved, &args.output, "essr")
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let resolved = resolve(
        &args.scenario,
        Some((args.axis.clone(), args.values.clone())),
    )?;
    run_series(resolved, &args.output, "sweep")
}

pub fn cmd_figure(args: &FigureArgs) -> Result<()> {
    if !FIGURE_IDS.contains(&args.id) {
        return Err(Error::config(
            "figure",
            format!("unknown figure {}; expected 1 to 9", args.id),
        ));
    }
    let mut opts = FigureOptions {
        trials: args.trials,
        master_seed: args.seed,
        ..FigureOptions::default()
    };
    if let Some(offsets) = &args.eve_offsets {
        opts.eve_offsets = offsets.clone();
    }
    let data = run_figure(args.id, &opts, &run_options(args.output.threads))?.in_unit(args.unit);
    eprintln!(
        "figure {}: {} series, {} rows",
        args.id,
        data.spec.series.len(),
        data.rows.len()
    );
    with_sink(&args.output, &format!("fig{}", args.id), |w, f| {
        data.write(w, f)
    })
}

pub fn cmd_table1(args: &Table1Args) -> Result<()> {
    let antennas = args
        .antennas
        .clone()
        .unwrap_or_else(|| TABLE1_ANTENNAS.to_vec());
    let rows = run_table1(
        args.users,
        &antennas,
        args.trials,
        args.seed,
        &run_options(args.output.threads),
    )?;
    for r in &rows {
        eprintln!(
            "M={}: numerical {:.4} ± {:.4}, gaussian {:.4}",
            r.antennas, r.numerical, r.numerical_stderr, r.gaussian
        );
    }
    with_sink(&args.output, "table1", |w, f| match f {
        OutputFormat::Csv => write_table1_csv(&rows, args.users, args.trials, args.seed, w),
        OutputFormat::Json => write_table1_json(&rows, args.users, args.trials, args.seed, w),
    })
}

/// Runs the selected checks; returns whether all passed.
pub fn cmd_validate(args: &ValidateArgs) -> Result<bool> {
    let opts = ValidationOptions {
        quick: args.quick,
        master_seed: args.seed,
        run: run_options(args.threads),
    };
    let ids: Vec<u8> = match &args.criterion {
        Some(ids) => ids.clone(),
        None => CRITERIA.iter().map(|c| c.0).collect(),
    };
    let mut all = true;
    for id in ids {
        let report = run_criterion(id, &opts)?;
        print!("{report}");
        all &= report.passed;
    }
    println!(
        "{}",
        if all {
            "all criteria passed"
        } else {
            "some criteria failed"
        }
    );
    Ok(all)
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Essr(a) => cmd_essr(a).map(|()| true),
        Command::Sweep(a) => cmd_sweep(a).map(|()| true),
        Command::Figure(a) => cmd_figure(a).map(|()| true),
        Command::Table1(a) => cmd_table1(a).map(|()| true),
        Command::Validate(a) => cmd_validate(a),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! Seeded Monte Carlo estimation of the ergodic secrecy sum-rate.
//!
//! Every trial draws its channels from [`TrialStreams`] keyed by
//! `(master_seed, trial)`. Trials are grouped into fixed-size chunks, chunks
//! run in parallel, and chunk statistics are merged in chunk order, so the
//! result does not depend on the number of threads.
//!
//! ```
//! use uplink_secrecy::analytic::Regime;
//! use uplink_secrecy::channel::{db_to_linear, SystemConfig};
//! use uplink_secrecy::montecarlo::{run_point, RunOptions};
//! use uplink_secrecy::selection::Strategy;
//!
//! let cfg = SystemConfig::new(4, 4, 20, 2, db_to_linear(30.0)).unwrap();
//! let est = run_point(&cfg, Strategy::GreedyMain, Regime::HighSnr, 200, 7, &RunOptions::default()).unwrap();
//! assert!(est.mc_mean > 0.0 && est.mc_stderr > 0.0);
//! assert_eq!(est.trials, 200);
//! ```

mod figures;
mod output;
mod table1;

pub use figures::{figure_series, run_figure, FigureOptions, FIGURE_IDS};
pub use output::{
    write_table1_csv, write_table1_json, Dataset, DatasetRow, OutputFormat, SeriesSpec, Unit,
};
pub use table1::{run_table1, Table1Row, TABLE1_ANTENNAS, TABLE1_USERS};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    essr_error_greedy_low, essr_error_random_low, essr_greedy_high, essr_greedy_large,
    essr_greedy_low, essr_random_high, essr_random_large, essr_random_low, Csi, Regime,
};
use crate::channel::{
    db_to_linear, snr_loss_factor, ComplexMatrix, StreamRole, SystemConfig, TrialStreams,
};
use crate::error::{Error, Result};
use crate::rates::prefix_sum_rates;
use crate::selection::{
    select_exhaustive, select_greedy_full, select_greedy_main, select_norm_based, select_norm_diff,
    ExhaustiveObjective, Strategy, DEFAULT_EXHAUSTIVE_BUDGET,
};

pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 1;

/// Trials per reduction chunk. Fixed so the summation order never depends on
/// the thread count.
const CHUNK: u64 = 64;

/// The single swept parameter of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values")]
pub enum Sweep {
    #[serde(rename = "k")]
    Served(Vec<usize>),
    #[serde(rename = "K")]
    Users(Vec<usize>),
    #[serde(rename = "N")]
    EveAntennas(Vec<usize>),
    #[serde(rename = "snr_db")]
    SnrDb(Vec<f64>),
}

impl Sweep {
    pub fn len(&self) -> usize {
        match self {
            Sweep::Served(v) | Sweep::Users(v) | Sweep::EveAntennas(v) => v.len(),
            Sweep::SnrDb(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis_name(&self) -> &'static str {
        match self {
            Sweep::Served(_) => "k",
            Sweep::Users(_) => "K",
            Sweep::EveAntennas(_) => "N",
            Sweep::SnrDb(_) => "snr_db",
        }
    }

    /// Sweep-axis values as reals, for output.
    pub fn points(&self) -> Vec<f64> {
        match self {
            Sweep::Served(v) | Sweep::Users(v) | Sweep::EveAntennas(v) => {
                v.iter().map(|&x| x as f64).collect()
            }
            Sweep::SnrDb(v) => v.clone(),
        }
    }

    /// Builds a sweep from an axis name (`k`, `K`, `N`, `snr_db`) and values.
    pub fn from_axis(axis: &str, values: &[f64]) -> Result<Self> {
        let ints = || -> Result<Vec<usize>> {
            values
                .iter()
                .map(|&v| {
                    if v >= 0.0 && v.fract() == 0.0 {
                        Ok(v as usize)
                    } else {
                        Err(Error::config(
                            axis,
                            format!("sweep value {v} is not a non-negative integer"),
                        ))
                    }
                })
                .collect()
        };
        Ok(match axis {
            "k" => Sweep::Served(ints()?),
            "K" => Sweep::Users(ints()?),
            "N" => Sweep::EveAntennas(ints()?),
            "snr_db" => Sweep::SnrDb(values.to_vec()),
            other => {
                return Err(Error::config(
                    "axis",
                    format!("unknown sweep axis `{other}`; use k, K, N or snr_db"),
                ))
            }
        })
    }
}

/// A complete, self-describing experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Base scenario; the swept field is overridden per point.
    pub config: SystemConfig,
    pub sweep: Sweep,
    pub strategy: Strategy,
    /// Analytic approximation paired with each point.
    pub regime: Regime,
    pub trials: u64,
    pub master_seed: u64,
}

impl ExperimentSpec {
    /// A one-point experiment at `config`.
    pub fn point(config: SystemConfig, strategy: Strategy, regime: Regime) -> Self {
        Self {
            sweep: Sweep::Served(vec![config.served]),
            config,
            strategy,
            regime,
            trials: DEFAULT_TRIALS,
            master_seed: DEFAULT_SEED,
        }
    }

    /// The scenario at every sweep point, validated.
    pub fn point_configs(&self) -> Result<Vec<SystemConfig>> {
        if self.trials == 0 {
            return Err(Error::config("trials", "need at least one trial"));
        }
        if self.sweep.is_empty() {
            return Err(Error::config("sweep", "sweep has no values"));
        }
        let base = self.config;
        let cfgs: Vec<SystemConfig> = match &self.sweep {
            Sweep::Served(v) => v
                .iter()
                .map(|&k| SystemConfig { served: k, ..base })
                .collect(),
            Sweep::Users(v) => v
                .iter()
                .map(|&users| SystemConfig { users, ..base })
                .collect(),
            Sweep::EveAntennas(v) => v
                .iter()
                .map(|&n| SystemConfig {
                    eve_antennas: n,
                    ..base
                })
                .collect(),
            Sweep::SnrDb(v) => v
                .iter()
                .map(|&db| SystemConfig {
                    rho: db_to_linear(db),
                    ..base
                })
                .collect(),
        };
        for cfg in &cfgs {
            cfg.validate()?;
            check_strategy_dims(cfg, self.strategy)?;
        }
        Ok(cfgs)
    }
}

fn check_strategy_dims(cfg: &SystemConfig, strategy: Strategy) -> Result<()> {
    let (k, m, n) = (cfg.served, cfg.bs_antennas, cfg.eve_antennas);
    if matches!(strategy, Strategy::GreedyMain | Strategy::GreedyFull) && k > m {
        return Err(Error::config(
            "k",
            format!("k exceeds M (k = {k}, M = {m}) for {strategy} selection"),
        ));
    }
    if strategy == Strategy::GreedyFull && k > n {
        return Err(Error::config(
            "k",
            format!("k exceeds N (k = {k}, N = {n}) for {strategy} selection"),
        ));
    }
    Ok(())
}

/// Execution settings that do not change results.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker-thread cap; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Testing hook: the eavesdropper sees exactly the main channel (needs `M = N`).
    pub wiretap_equals_main: bool,
}

impl RunOptions {
    pub fn with_threads(threads: usize) -> Self {
        Self {
            threads: Some(threads),
            ..Self::default()
        }
    }

    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(0) => Err(Error::config("threads", "need at least one thread")),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::config("threads", e.to_string()))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Monte Carlo estimate at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssrEstimate {
    /// Sweep-axis value.
    pub point: f64,
    /// Mean of the per-trial rectified secrecy rate, nats.
    pub mc_mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub mc_stderr: f64,
    /// Paired analytic value, when the formula applies.
    pub analytic: Option<f64>,
    pub trials: u64,
    /// Average-then-rectify diagnostic `{E[C_b] - E[C_e]}^+`.
    pub jensen: f64,
}

/// Running mean and centered second moment, merged with Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub(crate) fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub(crate) fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64 * o.n as f64 / n as f64);
        self.n = n;
    }

    pub(crate) fn mean(&self) -> f64 {
        self.mean
    }

    pub(crate) fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct PointStats {
    secrecy: Moments,
    bs: Moments,
    eve: Moments,
}

impl PointStats {
    fn merge(&mut self, o: &PointStats) {
        self.secrecy.merge(&o.secrecy);
        self.bs.merge(&o.bs);
        self.eve.merge(&o.eve);
    }
}

/// Runs `per_trial` for every trial and reduces `width` moment slots per
/// trial in a schedule-independent order.
pub(crate) fn reduce_trials<F>(
    trials: u64,
    width: usize,
    opts: &RunOptions,
    per_trial: F,
) -> Result<Vec<Moments>>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    let stats = reduce_trials_with(trials, width, opts, |t| {
        per_trial(t).map(|v| v.into_iter().map(|x| (x, 0.0, 0.0)).collect())
    })?;
    Ok(stats.into_iter().map(|s| s.secrecy).collect())
}

fn reduce_trials_with<F>(
    trials: u64,
    width: usize,
    opts: &RunOptions,
    per_trial: F,
) -> Result<Vec<PointStats>>
where
    F: Fn(u64) -> Result<Vec<(f64, f64, f64)>> + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    let partials: Vec<Vec<PointStats>> = opts.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = vec![PointStats::default(); width];
                for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    let values = per_trial(t)?;
                    debug_assert_eq!(values.len(), width);
                    for (slot, (s, b, e)) in acc.iter_mut().zip(values) {
                        slot.secrecy.push(s);
                        slot.bs.push(b);
                        slot.eve.push(e);
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut total = vec![PointStats::default(); width];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(total)
}

/// Analytic counterpart of a Monte Carlo point, if one is defined.
pub fn analytic_prediction(cfg: &SystemConfig, strategy: Strategy, regime: Regime) -> Option<f64> {
    let (m, n, users, k, rho, xi) = (
        cfg.bs_antennas,
        cfg.eve_antennas,
        cfg.users,
        cfg.served,
        cfg.rho,
        cfg.xi,
    );
    let csi = match strategy {
        Strategy::Random => None,
        Strategy::GreedyMain | Strategy::NormBased => Some(Csi::Main),
        Strategy::GreedyFull | Strategy::NormDiff => Some(Csi::Full),
        Strategy::ExhaustiveMain | Strategy::ExhaustiveFull => return None,
    };
    let p = match (csi, regime) {
        (None, Regime::HighSnr) if xi == 0.0 => essr_random_high(m, n, k, rho),
        (None, Regime::LowSnr) if xi == 0.0 => essr_random_low(m, n, k, rho),
        (None, Regime::LowSnr) => essr_error_random_low(m as f64, n as f64, k, rho, xi),
        (None, Regime::LargeScale) if xi == 0.0 => essr_random_large(m, n, k, rho),
        (Some(c), Regime::HighSnr) if xi == 0.0 => essr_greedy_high(m, n, k, users, c),
        (Some(c), Regime::LowSnr) if xi == 0.0 => essr_greedy_low(m, n, k, users, rho, c),
        (Some(Csi::Main), Regime::LowSnr) => essr_error_greedy_low(m, n, k, users, rho, xi),
        (Some(c), Regime::LargeScale) if xi == 0.0 => essr_greedy_large(m, n, k, users, rho, c),
        _ => return None,
    };
    p.ok().map(|p| p.value)
}

// Selection order for `served` users. Prefix-consistent strategies return the
// order for the largest `served`, so smaller counts are prefixes.
fn selection_order(
    cfg: &SystemConfig,
    strategy: Strategy,
    served: usize,
    streams: &TrialStreams,
    channels: &mut LazyChannels,
) -> Result<Vec<usize>> {
    Ok(match strategy {
        Strategy::Random => streams.shuffled_prefix(cfg.users, served),
        Strategy::GreedyMain => select_greedy_main(channels.main_full(streams), served)?.indices,
        Strategy::NormBased => select_norm_based(channels.main_full(streams), served)?.indices,
        Strategy::GreedyFull => {
            let (h, g) = channels.both_full(streams);
            select_greedy_full(h, g, served)?.indices
        }
        Strategy::NormDiff => {
            let (h, g) = channels.both_full(streams);
            select_norm_diff(h, g, served)?.indices
        }
        Strategy::ExhaustiveMain | Strategy::ExhaustiveFull => {
            let objective = if strategy == Strategy::ExhaustiveMain {
                ExhaustiveObjective::MainRate
            } else {
                ExhaustiveObjective::FullSecrecy
            };
            let (h, g) = channels.both_full(streams);
            select_exhaustive(h, g, served, objective, cfg.rho, DEFAULT_EXHAUSTIVE_BUDGET)?.indices
        }
    })
}

// Samples full channel matrices only when a strategy needs them.
struct LazyChannels {
    m: usize,
    n: usize,
    users: usize,
    wiretap_equals_main: bool,
    main: Option<ComplexMatrix>,
    wiretap: Option<ComplexMatrix>,
}

impl LazyChannels {
    fn new(cfg: &SystemConfig, opts: &RunOptions) -> Self {
        Self {
            m: cfg.bs_antennas,
            n: cfg.eve_antennas,
            users: cfg.users,
            wiretap_equals_main: opts.wiretap_equals_main,
            main: None,
            wiretap: None,
        }
    }

    fn wiretap_role(&self) -> StreamRole {
        if self.wiretap_equals_main {
            StreamRole::Main
        } else {
            StreamRole::Wiretap
        }
    }

    fn main_full(&mut self, s: &TrialStreams) -> &ComplexMatrix {
        let (m, users) = (self.m, self.users);
        self.main
            .get_or_insert_with(|| s.matrix(StreamRole::Main, m, users))
    }

    fn both_full(&mut self, s: &TrialStreams) -> (&ComplexMatrix, &ComplexMatrix) {
        let (m, n, users, role) = (self.m, self.n, self.users, self.wiretap_role());
        let h = self
            .main
            .get_or_insert_with(|| s.matrix(StreamRole::Main, m, users));
        let g = self.wiretap.get_or_insert_with(|| s.matrix(role, n, users));
        (h, g)
    }

    fn main_columns(&self, s: &TrialStreams, idx: &[usize]) -> ComplexMatrix {
        match &self.main {
            Some(h) => h.select_columns(idx),
            None => s.columns(StreamRole::Main, self.m, idx),
        }
    }

    fn wiretap_columns(&self, s: &TrialStreams, idx: &[usize]) -> ComplexMatrix {
        match &self.wiretap {
            Some(g) => g.select_columns(idx),
            None => s.columns(self.wiretap_role(), self.n, idx),
        }
    }
}

fn prefix_consistent(strategy: Strategy) -> bool {
    !matches!(
        strategy,
        Strategy::ExhaustiveMain | Strategy::ExhaustiveFull
    )
}

// (C_s, C_b, C_e) of one trial for each served count in `ks`, all other
// parameters taken from `cfg`.
fn trial_rates(
    cfg: &SystemConfig,
    strategy: Strategy,
    ks: &[usize],
    trial: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<(f64, f64, f64)>> {
    let streams = TrialStreams::new(seed, trial);
    let mut channels = LazyChannels::new(cfg, opts);
    let rho_b = snr_loss_factor(cfg.rho, cfg.xi) * cfg.rho;
    let rates = |order: &[usize], channels: &LazyChannels| -> Result<(Vec<f64>, Vec<f64>)> {
        let cb = prefix_sum_rates(&channels.main_columns(&streams, order), rho_b)?;
        let ce = prefix_sum_rates(&channels.wiretap_columns(&streams, order), cfg.rho)?;
        Ok((cb, ce))
    };
    let pack = |cb: f64, ce: f64| ((cb - ce).max(0.0), cb, ce);
    if prefix_consistent(strategy) {
        let k_max = ks.iter().copied().max().unwrap_or(0);
        let order = selection_order(cfg, strategy, k_max, &streams, &mut channels)?;
        let (cb, ce) = rates(&order, &channels)?;
        Ok(ks.iter().map(|&k| pack(cb[k - 1], ce[k - 1])).collect())
    } else {
        ks.iter()
            .map(|&k| {
                let order = selection_order(cfg, strategy, k, &streams, &mut channels)?;
                let (cb, ce) = rates(&order, &channels)?;
                Ok(pack(cb[k - 1], ce[k - 1]))
            })
            .collect()
    }
}

fn estimates(
    stats: &[PointStats],
    points: &[f64],
    analytic: &[Option<f64>],
    trials: u64,
) -> Vec<EssrEstimate> {
    stats
        .iter()
        .zip(points)
        .zip(analytic)
        .map(|((s, &point), &analytic)| EssrEstimate {
            point,
            mc_mean: s.secrecy.mean(),
            mc_stderr: s.secrecy.stderr(),
            analytic,
            trials,
            jensen: (s.bs.mean() - s.eve.mean()).max(0.0),
        })
        .collect()
}

/// Runs every point of the sweep. A `k` sweep shares one selection per trial
/// across all points.
pub fn run_experiment(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Vec<EssrEstimate>> {
    let cfgs = spec.point_configs()?;
    if opts.wiretap_equals_main && cfgs.iter().any(|c| c.bs_antennas != c.eve_antennas) {
        return Err(Error::config("N", "the equal-channel hook needs M = N"));
    }
    let points = spec.sweep.points();
    let analytic: Vec<Option<f64>> = cfgs
        .iter()
        .map(|c| analytic_prediction(c, spec.strategy, spec.regime))
        .collect();
    let stats = if let Sweep::Served(ks) = &spec.sweep {
        let cfg = SystemConfig {
            served: ks.iter().copied().max().unwrap_or(1),
            ..spec.config
        };
        reduce_trials_with(spec.trials, ks.len(), opts, |t| {
            trial_rates(&cfg, spec.strategy, ks, t, spec.master_seed, opts)
        })?
    } else {
        let mut all = Vec::with_capacity(cfgs.len());
        for cfg in &cfgs {
            let ks = [cfg.served];
            all.extend(reduce_trials_with(spec.trials, 1, opts, |t| {
                trial_rates(cfg, spec.strategy, &ks, t, spec.master_seed, opts)
            })?);
        }
        all
    };
    Ok(estimates(&stats, &points, &analytic, spec.trials))
}

/// Single-point convenience wrapper around [`run_experiment`].
pub fn run_point(
    cfg: &SystemConfig,
    strategy: Strategy,
    regime: Regime,
    trials: u64,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<EssrEstimate> {
    let spec = ExperimentSpec {
        trials,
        master_seed,
        ..ExperimentSpec::point(*cfg, strategy, regime)
    };
    Ok(run_experiment(&spec, opts)?[0])
}

/// Main and wiretap channels of one trial, as drawn by the harness.
pub fn trial_channels(
    cfg: &SystemConfig,
    master_seed: u64,
    trial: u64,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let pair = crate::channel::sample_channel_pair(cfg, &TrialStreams::new(master_seed, trial))?;
    Ok((pair.main, pair.wiretap))
}

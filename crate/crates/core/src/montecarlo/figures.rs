//! Parameter sets of the reference figures.

use serde::{Deserialize, Serialize};

use super::{
    run_experiment, Dataset, ExperimentSpec, RunOptions, SeriesSpec, Sweep, DEFAULT_SEED,
    DEFAULT_TRIALS,
};
use crate::analytic::Regime;
use crate::channel::{db_to_linear, SystemConfig};
use crate::error::{Error, Result};
use crate::selection::Strategy;

pub const FIGURE_IDS: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    pub trials: u64,
    pub master_seed: u64,
    /// `N - M` values of figure 6.
    pub eve_offsets: Vec<usize>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            master_seed: DEFAULT_SEED,
            eve_offsets: vec![0, 2, 5],
        }
    }
}

fn range(lo: usize, hi: usize) -> Vec<usize> {
    (lo..=hi).collect()
}

struct Builder<'a> {
    opts: &'a FigureOptions,
    out: Vec<SeriesSpec>,
}

impl Builder<'_> {
    #[allow(clippy::too_many_arguments)]
    fn add(
        &mut self,
        name: String,
        m: usize,
        n: usize,
        users: usize,
        snr_db: f64,
        xi: f64,
        sweep: Sweep,
        strategy: Strategy,
        regime: Regime,
    ) -> Result<()> {
        let served = match &sweep {
            Sweep::Served(v) => v[0],
            _ => 1,
        };
        let config = SystemConfig {
            bs_antennas: m,
            eve_antennas: n,
            users,
            served,
            rho: db_to_linear(snr_db),
            xi,
        };
        self.out.push(SeriesSpec {
            name,
            spec: ExperimentSpec {
                config,
                sweep,
                strategy,
                regime,
                trials: self.opts.trials,
                master_seed: self.opts.master_seed,
            },
        });
        Ok(())
    }
}

/// The experiments behind figure `id`, without running them.
pub fn figure_series(id: u8, opts: &FigureOptions) -> Result<Vec<SeriesSpec>> {
    let mut b = Builder {
        opts,
        out: Vec::new(),
    };
    use Regime::*;
    use Strategy::*;
    match id {
        1 => {
            for m in [21, 20, 19] {
                b.add(
                    format!("random M={m} N=20"),
                    m,
                    20,
                    40,
                    30.0,
                    0.0,
                    Sweep::Served(range(1, 30)),
                    Random,
                    HighSnr,
                )?;
            }
        }
        2 => {
            for (m, n, db) in [(10, 10, -30.0), (10, 10, -33.0), (15, 10, -30.0)] {
                b.add(
                    format!("random M={m} N={n} snr={db}dB"),
                    m,
                    n,
                    10,
                    db,
                    0.0,
                    Sweep::Served(range(1, 10)),
                    Random,
                    LowSnr,
                )?;
            }
        }
        3 => {
            for n in [20, 25] {
                for s in [GreedyMain, GreedyFull] {
                    b.add(
                        format!("{s} M=20 N={n}"),
                        20,
                        n,
                        400,
                        30.0,
                        0.0,
                        Sweep::Served(range(1, 10)),
                        s,
                        HighSnr,
                    )?;
                }
            }
        }
        4 => {
            for n in [10, 15] {
                for s in [GreedyMain, GreedyFull] {
                    b.add(
                        format!("{s} M=10 N={n}"),
                        10,
                        n,
                        400,
                        -30.0,
                        0.0,
                        Sweep::Served(range(1, 10)),
                        s,
                        LowSnr,
                    )?;
                }
            }
        }
        5 => {
            for s in [GreedyMain, GreedyFull, NormBased, NormDiff] {
                b.add(
                    format!("{s} M=100 N=100"),
                    100,
                    100,
                    400,
                    10.0,
                    0.0,
                    Sweep::Served(range(1, 8)),
                    s,
                    LargeScale,
                )?;
            }
        }
        6 => {
            for &off in &opts.eve_offsets {
                let n = 10 + off;
                for s in [Random, GreedyMain, GreedyFull] {
                    b.add(
                        format!("{s} M=10 N={n}"),
                        10,
                        n,
                        400,
                        30.0,
                        0.0,
                        Sweep::Served(range(1, 10)),
                        s,
                        HighSnr,
                    )?;
                }
            }
        }
        7 => {
            for (s, xi) in [
                (Random, 0.0),
                (Random, 0.1),
                (GreedyMain, 0.0),
                (GreedyMain, 0.1),
                (GreedyFull, 0.0),
            ] {
                b.add(
                    format!("{s} xi={xi}"),
                    10,
                    15,
                    400,
                    -30.0,
                    xi,
                    Sweep::Served(range(1, 8)),
                    s,
                    LowSnr,
                )?;
            }
        }
        8 => {
            for (m, k) in [(10, 1), (10, 10), (40, 10)] {
                for s in [GreedyMain, GreedyFull] {
                    let sweep = Sweep::Users(vec![50, 100, 200, 300, 400]);
                    b.add(
                        format!("{s} M=N={m} k={k}"),
                        m,
                        m,
                        50,
                        30.0,
                        0.0,
                        sweep,
                        s,
                        HighSnr,
                    )?;
                    if let Some(last) = b.out.last_mut() {
                        last.spec.config.served = k;
                    }
                }
            }
        }
        9 => {
            for k in [1, 20] {
                for s in [Random, GreedyMain, GreedyFull] {
                    b.add(
                        format!("{s} k={k}"),
                        20,
                        20,
                        400,
                        30.0,
                        0.0,
                        Sweep::EveAntennas(range(20, 30)),
                        s,
                        HighSnr,
                    )?;
                    if let Some(last) = b.out.last_mut() {
                        last.spec.config.served = k;
                    }
                }
            }
        }
        other => {
            return Err(Error::config(
                "figure",
                format!("unknown figure {other}; expected 1 to 9"),
            ))
        }
    }
    Ok(b.out)
}

/// Runs every series of figure `id`.
pub fn run_figure(id: u8, opts: &FigureOptions, run: &RunOptions) -> Result<Dataset> {
    let mut data = Dataset::new(format!("figure {id}"));
    for s in figure_series(id, opts)? {
        let estimates = run_experiment(&s.spec, run)?;
        data.push_series(&s.name, s.spec, &estimates);
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_has_valid_series() {
        for id in FIGURE_IDS {
            let series = figure_series(id, &FigureOptions::default()).unwrap();
            assert!(!series.is_empty());
            for s in &series {
                s.spec.point_configs().unwrap();
            }
        }
        assert!(figure_series(10, &FigureOptions::default()).is_err());
    }

    #[test]
    fn figure_one_has_three_series() {
        assert_eq!(
            figure_series(1, &FigureOptions::default()).unwrap().len(),
            3
        );
    }

    #[test]
    fn figure_five_has_norm_and_rate_series() {
        let names: Vec<String> = figure_series(5, &FigureOptions::default())
            .unwrap()
            .into_iter()
            .map(|s| s.name)
            .collect();
        assert!(names.iter().any(|n| n.starts_with("norm-based")));
        assert!(names.iter().any(|n| n.starts_with("greedy-full")));
    }

    #[test]
    fn figure_six_offsets_are_configurable() {
        let opts = FigureOptions {
            eve_offsets: vec![3],
            ..FigureOptions::default()
        };
        let s = figure_series(6, &opts).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|x| x.spec.config.eve_antennas == 13));
    }
}

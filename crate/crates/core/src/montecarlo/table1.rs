use serde::{Deserialize, Serialize};

use super::{reduce_trials, RunOptions};
use crate::analytic::{
    chi_square_max_gaussian, chi_square_max_gumbel_location,
    chi_square_max_gumbel_location_without_gamma,
};
use crate::channel::{StreamRole, TrialStreams};
use crate::error::{Error, Result};

pub const TABLE1_USERS: usize = 100;
pub const TABLE1_ANTENNAS: [usize; 5] = [10, 20, 30, 40, 50];

/// Expected strongest channel gain `E[max_j |h_j|^2]` among `K` users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    #[serde(rename = "M")]
    pub antennas: usize,
    /// Monte Carlo mean.
    pub numerical: f64,
    pub numerical_stderr: f64,
    /// Gumbel limit of the Gaussian `N(M, M)` approximation.
    pub gaussian: f64,
    /// `log K + (M - 1) log log K`, the chi-square Gumbel location as usually quoted.
    pub chi_square_reference: f64,
    /// `log K + (M - 1) log log K - log Gamma(M)`, the full chi-square Gumbel location.
    pub chi_square_location: f64,
}

/// One pass over `trials` channel draws serves every `M`: a channel with
/// fewer antennas is a row prefix of a taller one.
pub fn run_table1(
    users: usize,
    antennas: &[usize],
    trials: u64,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<Vec<Table1Row>> {
    if users < 2 {
        return Err(Error::config("K", "need at least two users"));
    }
    if trials == 0 {
        return Err(Error::config("trials", "need at least one trial"));
    }
    if antennas.is_empty() || antennas.contains(&0) {
        return Err(Error::config(
            "M",
            "antenna list must be non-empty and positive",
        ));
    }
    let m_max = antennas.iter().copied().max().unwrap_or(1);
    let moments = reduce_trials(trials, antennas.len(), opts, |t| {
        let streams = TrialStreams::new(master_seed, t);
        let mut best = vec![0.0f64; antennas.len()];
        let mut col = Vec::with_capacity(m_max);
        let mut prefix = vec![0.0; m_max + 1];
        for j in 0..users {
            streams.fill_column(StreamRole::Main, j, m_max, &mut col);
            for (i, z) in col.iter().enumerate() {
                prefix[i + 1] = prefix[i] + z.norm_sqr();
            }
            for (b, &m) in best.iter_mut().zip(antennas) {
                *b = b.max(prefix[m]);
            }
        }
        Ok(best)
    })?;
    antennas
        .iter()
        .zip(moments)
        .map(|(&m, mo)| {
            Ok(Table1Row {
                antennas: m,
                numerical: mo.mean(),
                numerical_stderr: mo.stderr(),
                gaussian: chi_square_max_gaussian(users, m)?,
                chi_square_reference: chi_square_max_gumbel_location_without_gamma(users, m)?,
                chi_square_location: chi_square_max_gumbel_location(users, m)?,
            })
        })
        .collect()
}

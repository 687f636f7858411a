//! Rayleigh-fading channel sampling and the MMSE estimation-error model.
//!
//! Entries are i.i.d. circularly-symmetric complex Gaussian with unit
//! variance. Noise is never sampled: equal noise powers at the base station
//! and the eavesdropper are folded into the linear SNR `rho`.

mod matrix;
mod stream;

pub(crate) use matrix::dot;
pub use matrix::ComplexMatrix;
pub use stream::{StreamRole, TrialStreams, MAX_ROWS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Converts an SNR in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Below this antenna count the Gaussian capacity approximation is loose.
pub const GAUSSIAN_APPROX_MIN_ANTENNAS: usize = 10;

/// Scenario parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Base-station antennas `M`.
    #[serde(rename = "M")]
    pub bs_antennas: usize,
    /// Eavesdropper antennas `N`.
    #[serde(rename = "N")]
    pub eve_antennas: usize,
    /// Total single-antenna users `K`.
    #[serde(rename = "K")]
    pub users: usize,
    /// Users served per slot `k`.
    #[serde(rename = "k")]
    pub served: usize,
    /// Linear SNR `rho = P / delta^2`, common to every user.
    pub rho: f64,
    /// Channel-estimation error variance `xi` in `[0, 1)`.
    #[serde(default)]
    pub xi: f64,
}

impl SystemConfig {
    /// Validated configuration with perfect CSI.
    pub fn new(
        bs_antennas: usize,
        eve_antennas: usize,
        users: usize,
        served: usize,
        rho: f64,
    ) -> Result<Self> {
        let cfg = Self {
            bs_antennas,
            eve_antennas,
            users,
            served,
            rho,
            xi: 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_xi(mut self, xi: f64) -> Result<Self> {
        self.xi = xi;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bs_antennas == 0 {
            return Err(Error::config("M", "need at least one base-station antenna"));
        }
        if self.eve_antennas == 0 {
            return Err(Error::config("N", "need at least one eavesdropper antenna"));
        }
        if self.bs_antennas > MAX_ROWS || self.eve_antennas > MAX_ROWS {
            return Err(Error::config(
                "M",
                format!("antenna counts are limited to {MAX_ROWS}"),
            ));
        }
        if self.users == 0 {
            return Err(Error::config("K", "need at least one user"));
        }
        if self.served == 0 {
            return Err(Error::config("k", "need at least one served user"));
        }
        if self.served > self.users {
            return Err(Error::config(
                "k",
                format!(
                    "k = {} exceeds the number of users K = {}",
                    self.served, self.users
                ),
            ));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::config(
                "rho",
                format!("SNR must be positive and finite, got {}", self.rho),
            ));
        }
        if !(0.0..1.0).contains(&self.xi) {
            return Err(Error::config(
                "xi",
                format!("error variance must lie in [0, 1), got {}", self.xi),
            ));
        }
        Ok(())
    }

    /// Non-fatal caveats about the analytic approximations for this scenario.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let smallest = self.bs_antennas.min(self.eve_antennas);
        if smallest < GAUSSIAN_APPROX_MIN_ANTENNAS {
            out.push(format!(
                "min(M, N) = {smallest} < {GAUSSIAN_APPROX_MIN_ANTENNAS}: Gaussian capacity approximation may be loose"
            ));
        }
        out
    }
}

/// Main channel `H` (M x K) and wiretap channel `G` (N x K) over all users.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPair {
    pub main: ComplexMatrix,
    pub wiretap: ComplexMatrix,
}

/// Samples both channels for one trial.
pub fn sample_channel_pair(cfg: &SystemConfig, streams: &TrialStreams) -> Result<ChannelPair> {
    cfg.validate()?;
    Ok(ChannelPair {
        main: streams.matrix(StreamRole::Main, cfg.bs_antennas, cfg.users),
        wiretap: streams.matrix(StreamRole::Wiretap, cfg.eve_antennas, cfg.users),
    })
}

/// Channel estimate with the true channel it was drawn against.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedChannel {
    pub estimate: ComplexMatrix,
    pub truth: ComplexMatrix,
    pub xi: f64,
}

/// True channel `sqrt(1 - xi) H_hat + sqrt(xi) H_tilde` with a fresh,
/// independent `H_tilde` from the trial's estimation-error stream.
pub fn corrupt_estimate(
    estimate: &ComplexMatrix,
    xi: f64,
    streams: &TrialStreams,
) -> Result<EstimatedChannel> {
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::domain(format!(
            "error variance xi must lie in [0, 1), got {xi}"
        )));
    }
    let truth = if xi == 0.0 {
        estimate.clone()
    } else {
        let noise = streams.matrix(
            StreamRole::EstimationError,
            estimate.rows(),
            estimate.cols(),
        );
        let a = (1.0 - xi).sqrt();
        let b = xi.sqrt();
        ComplexMatrix::from_fn(estimate.rows(), estimate.cols(), |i, j| {
            estimate.get(i, j) * a + noise.get(i, j) * b
        })
    };
    Ok(EstimatedChannel {
        estimate: estimate.clone(),
        truth,
        xi,
    })
}

/// SNR loss factor `eta = (1 - xi) / (1 + xi rho)` caused by estimation error.
pub fn snr_loss_factor(rho: f64, xi: f64) -> f64 {
    (1.0 - xi) / (1.0 + xi * rho)
}

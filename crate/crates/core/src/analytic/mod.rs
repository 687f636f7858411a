//! Closed-form ESSR approximations.
//!
//! Every function returns nats. Regime labels are metadata: nothing stops a
//! high-SNR formula from being evaluated at low SNR, which is occasionally
//! useful when plotting where an approximation breaks down.
//!
//! ```
//! use uplink_secrecy::analytic::{essr_random_high, essr_random_low};
//!
//! // Equal antenna counts: the random-selection ESSR is sigma_k / sqrt(2 pi).
//! let high = essr_random_high(10, 10, 10, 1000.0).unwrap();
//! assert!((high.value - 1.103_992_051_2).abs() < 1e-9);
//!
//! // At low SNR it is linear in rho.
//! let a = essr_random_low(10, 15, 1, 1e-3).unwrap().value;
//! let b = essr_random_low(10, 15, 1, 2e-3).unwrap().value;
//! assert!((b / a - 2.0).abs() < 1e-12);
//! ```

mod estimation;
mod greedy;
mod random;

pub use estimation::{essr_error_greedy_low, essr_error_random_low, essr_error_tdma};
pub use greedy::{
    essr_greedy_high, essr_greedy_large, essr_greedy_low, essr_tdma_high, essr_tdma_low,
    greedy_high_terms, greedy_low_bs_rate, greedy_low_bs_rate_from_order_statistics,
    per_user_secrecy_rate, GreedyHighTerm, PerUserRegime,
};
pub use random::{
    essr_random_high, essr_random_high_corollaries, essr_random_large, essr_random_low,
    essr_random_low_equal, RandomHighCorollaries,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_math::{digamma, max_order_mean};

/// Gaussian approximation `N(mean, variance)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianApprox {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianApprox {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    HighSnr,
    LowSnr,
    LargeScale,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::HighSnr, Regime::LowSnr, Regime::LargeScale];

    pub fn name(self) -> &'static str {
        match self {
            Regime::HighSnr => "high-snr",
            Regime::LowSnr => "low-snr",
            Regime::LargeScale => "large-scale",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown regime `{s}`")))
    }
}

/// Which CSI the base station uses for selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Csi {
    /// Main channel only.
    Main,
    /// Main and wiretap channels.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictionStrategy {
    Random,
    GreedyMain,
    GreedyFull,
    /// Single best user (`k = 1`), main CSI.
    Tdma1Main,
    /// Single best user (`k = 1`), full CSI.
    Tdma1Full,
}

impl PredictionStrategy {
    fn greedy(csi: Csi) -> Self {
        match csi {
            Csi::Main => PredictionStrategy::GreedyMain,
            Csi::Full => PredictionStrategy::GreedyFull,
        }
    }

    fn tdma(csi: Csi) -> Self {
        match csi {
            Csi::Main => PredictionStrategy::Tdma1Main,
            Csi::Full => PredictionStrategy::Tdma1Full,
        }
    }
}

/// One analytic ESSR value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssrPrediction {
    /// ESSR in nats, never negative.
    pub value: f64,
    pub regime: Regime,
    pub strategy: PredictionStrategy,
    /// Multiuser secrecy gain over random selection; zero for random selection.
    pub gain: f64,
}

pub(crate) fn check_positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::domain(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "SNR must be positive and finite, got {rho}"
        )))
    }
}

/// Gaussian approximation of `log|I + rho H^H H|` for an `m x k` channel at
/// high SNR. For `k > m` the roles of `m` and `k` are swapped.
pub fn capacity_gaussian(m: usize, k: usize, rho: f64) -> Result<GaussianApprox> {
    check_positive("M", m)?;
    check_positive("k", k)?;
    check_rho(rho)?;
    let (big, small) = if k <= m { (m, k) } else { (k, m) };
    let mut mean = small as f64 * rho.ln();
    for i in 1..=small {
        mean += digamma(big - i + 1)?;
    }
    let mut variance = small as f64 / big as f64;
    for i in 1..small {
        let d = (big - small + i) as f64;
        variance += i as f64 / (d * d);
    }
    Ok(GaussianApprox { mean, variance })
}

/// Expected maximum of `K` i.i.d. `chi^2_{2M}/2` variables via the Gaussian
/// `N(M, M)` approximation.
pub fn chi_square_max_gaussian(users: usize, m: usize) -> Result<f64> {
    check_positive("M", m)?;
    max_order_mean(users as f64, m as f64, (m as f64).sqrt())
}

/// Classical Gumbel location `d_K = log K + (M - 1) log log K - log Gamma(M)`
/// for the maximum of `K` unit-scale Gamma(M) variables.
pub fn chi_square_max_gumbel_location(users: usize, m: usize) -> Result<f64> {
    Ok(chi_square_max_gumbel_location_without_gamma(users, m)?
        - crate::special_math::ln_gamma_int(m)?)
}

/// `log K + (M - 1) log log K`, the Gumbel location with the `log Gamma(M)`
/// term dropped, which is how the chi-square reference values are commonly
/// quoted.
pub fn chi_square_max_gumbel_location_without_gamma(users: usize, m: usize) -> Result<f64> {
    check_positive("M", m)?;
    if users < 2 {
        return Err(Error::domain("need at least two users"));
    }
    let log_k = (users as f64).ln();
    Ok(log_k + (m as f64 - 1.0) * log_k.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_math::harmonic;
    use approx::assert_abs_diff_eq;

    #[test]
    fn capacity_single_user() {
        let c = capacity_gaussian(10, 1, 1000.0).unwrap();
        assert_abs_diff_eq!(c.mean, 9.159_507_868_05, epsilon = 1e-9);
        assert_abs_diff_eq!(c.variance, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn capacity_square_variance_is_harmonic() {
        for m in 1..30 {
            let c = capacity_gaussian(m, m, 10.0).unwrap();
            assert_abs_diff_eq!(c.variance, harmonic(m - 1) + 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn capacity_is_symmetric() {
        let a = capacity_gaussian(7, 12, 100.0).unwrap();
        let b = capacity_gaussian(12, 7, 100.0).unwrap();
        assert_eq!(a, b);
        assert!(capacity_gaussian(0, 1, 1.0).is_err());
        assert!(capacity_gaussian(1, 1, 0.0).is_err());
    }

    #[test]
    fn table_reference_columns() {
        assert_abs_diff_eq!(
            chi_square_max_gaussian(100, 10).unwrap(),
            18.0842,
            epsilon = 5e-4
        );
        assert_abs_diff_eq!(
            chi_square_max_gaussian(100, 20).unwrap(),
            31.4328,
            epsilon = 5e-4
        );
        assert_abs_diff_eq!(
            chi_square_max_gaussian(100, 50).unwrap(),
            68.0768,
            epsilon = 5e-4
        );
        assert_abs_diff_eq!(
            chi_square_max_gumbel_location_without_gamma(100, 20).unwrap(),
            33.6216,
            epsilon = 5e-4
        );
        let full = chi_square_max_gumbel_location(100, 20).unwrap();
        assert_abs_diff_eq!(full, 33.6216 - 39.339_884_187_2, epsilon = 1e-3);
    }

    #[test]
    fn enum_names_round_trip() {
        for r in Regime::ALL {
            assert_eq!(r.name().parse::<Regime>().unwrap(), r);
        }
        assert_eq!(
            serde_json::to_string(&PredictionStrategy::Tdma1Full).unwrap(),
            "\"tdma1-full\""
        );
    }
}

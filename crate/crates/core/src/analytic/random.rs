use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{
    capacity_gaussian, check_positive, check_rho, EssrPrediction, PredictionStrategy, Regime,
};
use crate::error::Result;
use crate::special_math::{digamma, normal_pdf, rectified_gaussian_mean, EULER_GAMMA};

fn random(value: f64, regime: Regime) -> EssrPrediction {
    EssrPrediction {
        value,
        regime,
        strategy: PredictionStrategy::Random,
        gain: 0.0,
    }
}

// (mu_k, sigma_k) of C_b - C_e at high SNR.
fn secrecy_gaussian(m: usize, n: usize, k: usize, rho: f64) -> Result<(f64, f64)> {
    let b = capacity_gaussian(m, k, rho)?;
    let e = capacity_gaussian(n, k, rho)?;
    Ok((b.mean - e.mean, (b.variance + e.variance).sqrt()))
}

/// Random `k`-user selection at high SNR: `E{Z}^+` for
/// `Z ~ N(mu_{M,k} - mu_{N,k}, sigma_{M,k}^2 + sigma_{N,k}^2)`.
pub fn essr_random_high(m: usize, n: usize, k: usize, rho: f64) -> Result<EssrPrediction> {
    check_positive("N", n)?;
    let (mu, sigma) = secrecy_gaussian(m, n, k, rho)?;
    Ok(random(rectified_gaussian_mean(mu, sigma), Regime::HighSnr))
}

/// Simplified high-SNR forms that apply to particular antenna orderings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomHighCorollaries {
    /// `mu_k` by the three-way case split on `k`; for `M > N` only.
    /// For `k > N` it approximates the ESSR, for `k <= N` it does not depend on `rho`.
    pub mean_case_split: Option<f64>,
    /// Peak ESSR `sqrt((log(M - 1) + gamma + 1) / pi)`, reached at `k = M`; for `M = N >= 2`.
    pub equal_antenna_peak: Option<f64>,
    /// Upper bound `sigma_k / sqrt(2 pi) exp(-mu_k^2 / 2 sigma_k^2)`; for `M < N`.
    pub stronger_eavesdropper_bound: Option<f64>,
}

pub fn essr_random_high_corollaries(
    m: usize,
    n: usize,
    k: usize,
    rho: f64,
) -> Result<RandomHighCorollaries> {
    check_positive("N", n)?;
    let (mu, sigma) = secrecy_gaussian(m, n, k, rho)?;
    let psi_sum = |top: usize, from: usize, to: usize| -> Result<f64> {
        (from..=to).map(|i| digamma(top - i + 1)).sum()
    };
    let mean_case_split = if m > n {
        let log_rho = rho.ln();
        Some(if k <= n {
            (1..=k)
                .map(|i| Ok(digamma(m - i + 1)? - digamma(n - i + 1)?))
                .sum::<Result<f64>>()?
        } else if k <= m {
            psi_sum(m, 1, k)? - psi_sum(k, 1, n)? + (k - n) as f64 * log_rho
        } else {
            psi_sum(k, n + 1, m)? + (m - n) as f64 * log_rho
        })
    } else {
        None
    };
    let equal_antenna_peak = (m == n && m >= 2)
        .then(|| (((m - 1) as f64).ln() + EULER_GAMMA + 1.0) / PI)
        .map(f64::sqrt);
    let stronger_eavesdropper_bound = (m < n).then(|| sigma * normal_pdf(mu / sigma));
    Ok(RandomHighCorollaries {
        mean_case_split,
        equal_antenna_peak,
        stronger_eavesdropper_bound,
    })
}

/// Random selection at low SNR: `rho E{X - Y}^+` with `X - Y ~ N(k(M - N), k(M + N))`.
pub fn essr_random_low(m: usize, n: usize, k: usize, rho: f64) -> Result<EssrPrediction> {
    check_positive("M", m)?;
    check_positive("N", n)?;
    check_positive("k", k)?;
    check_rho(rho)?;
    let alpha = k as f64 * (m as f64 - n as f64);
    let beta = (k as f64 * (m + n) as f64).sqrt();
    Ok(random(
        rho * rectified_gaussian_mean(alpha, beta),
        Regime::LowSnr,
    ))
}

/// Low-SNR closed form `rho sqrt(k M / pi)` for `M = N`.
pub fn essr_random_low_equal(m: usize, k: usize, rho: f64) -> Result<EssrPrediction> {
    check_positive("M", m)?;
    check_positive("k", k)?;
    check_rho(rho)?;
    Ok(random(
        rho * (k as f64 * m as f64 / PI).sqrt(),
        Regime::LowSnr,
    ))
}

/// Large-array random selection: `{k log((1 + M rho) / (1 + N rho))}^+`.
pub fn essr_random_large(m: usize, n: usize, k: usize, rho: f64) -> Result<EssrPrediction> {
    check_positive("M", m)?;
    check_positive("N", n)?;
    check_positive("k", k)?;
    check_rho(rho)?;
    let v = k as f64 * ((1.0 + m as f64 * rho) / (1.0 + n as f64 * rho)).ln();
    Ok(random(v.max(0.0), Regime::LargeScale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_math::harmonic;
    use approx::assert_abs_diff_eq;

    #[test]
    fn equal_antennas_high_snr() {
        let v = essr_random_high(10, 10, 10, 1000.0).unwrap().value;
        let sigma = (2.0 * (harmonic(9) + 1.0)).sqrt();
        assert_abs_diff_eq!(v, sigma / (2.0 * PI).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 1.103_992_051_20, epsilon = 1e-10);
        for k in 1..15 {
            let p = essr_random_high(12, 12, k, 50.0).unwrap();
            let (_, s) = secrecy_gaussian(12, 12, k, 50.0).unwrap();
            assert_abs_diff_eq!(p.value, s / (2.0 * PI).sqrt(), epsilon = 1e-14);
            assert_eq!(p.gain, 0.0);
        }
    }

    #[test]
    fn large_mean_approaches_mu() {
        let v = essr_random_high(11, 10, 11, 1000.0).unwrap().value;
        let mu = essr_random_high_corollaries(11, 10, 11, 1000.0)
            .unwrap()
            .mean_case_split
            .unwrap();
        assert!((v - mu).abs() / mu < 0.01);
    }

    #[test]
    fn case_split_matches_capacity_means() {
        for k in 1..20 {
            let (mu, _) = secrecy_gaussian(12, 7, k, 300.0).unwrap();
            let c = essr_random_high_corollaries(12, 7, k, 300.0).unwrap();
            assert_abs_diff_eq!(c.mean_case_split.unwrap(), mu, epsilon = 1e-10);
        }
    }

    #[test]
    fn closed_form_guards() {
        let c = essr_random_high_corollaries(20, 20, 20, 1000.0).unwrap();
        assert_abs_diff_eq!(
            c.equal_antenna_peak.unwrap(),
            1.199_703_036_22,
            epsilon = 1e-10
        );
        assert!(c.mean_case_split.is_none() && c.stronger_eavesdropper_bound.is_none());
        let c = essr_random_high_corollaries(10, 15, 12, 1000.0).unwrap();
        assert!(
            c.stronger_eavesdropper_bound.unwrap()
                >= essr_random_high(10, 15, 12, 1000.0).unwrap().value
        );
        assert!(c.equal_antenna_peak.is_none());
    }

    #[test]
    fn weak_eavesdropper_is_rho_free_for_small_k() {
        for k in 1..=10 {
            let a = essr_random_high(15, 10, k, 1e3).unwrap().value;
            let b = essr_random_high(15, 10, k, 1e6).unwrap().value;
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn low_snr_values() {
        let v = essr_random_low(10, 15, 1, 1e-3).unwrap().value;
        assert_abs_diff_eq!(v, 4.165_773_529_38e-4, epsilon = 1e-12);
        let eq = essr_random_low_equal(10, 4, 1e-3).unwrap().value;
        assert_abs_diff_eq!(eq, 1e-3 * (40.0 / PI).sqrt(), epsilon = 1e-15);
        for (m, k) in [(10, 4), (3, 1), (50, 7)] {
            let general = essr_random_low(m, m, k, 1e-3).unwrap().value;
            let closed = essr_random_low_equal(m, k, 1e-3).unwrap().value;
            assert!((general - closed).abs() <= 1e-12 * closed);
        }
    }

    #[test]
    fn large_array_values() {
        assert_abs_diff_eq!(
            essr_random_large(100, 50, 4, 10.0).unwrap().value,
            2.768_594_712_92,
            epsilon = 1e-10
        );
        assert_eq!(essr_random_large(50, 50, 4, 10.0).unwrap().value, 0.0);
        assert_eq!(essr_random_large(50, 100, 4, 10.0).unwrap().value, 0.0);
    }
}

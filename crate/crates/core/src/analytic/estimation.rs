use std::f64::consts::PI;

use super::{check_positive, check_rho, EssrPrediction, PredictionStrategy, Regime};
use crate::error::{Error, Result};
use crate::special_math::{digamma, rectified_gaussian_mean};

fn check_xi(xi: f64) -> Result<()> {
    if (0.0..1.0).contains(&xi) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "error variance xi must lie in [0, 1), got {xi}"
        )))
    }
}

/// Random selection at low SNR with estimation-error variance `xi`:
/// `rho E{Z}^+` with `Z ~ N(k((1 - xi) M - N), k((1 - xi)^2 M + N))`.
///
/// Antenna counts are real so that the balanced point `M = N / (1 - xi)` can
/// be evaluated exactly.
pub fn essr_error_random_low(
    m: f64,
    n: f64,
    k: usize,
    rho: f64,
    xi: f64,
) -> Result<EssrPrediction> {
    check_xi(xi)?;
    check_rho(rho)?;
    check_positive("k", k)?;
    if !(m > 0.0 && n > 0.0) {
        return Err(Error::domain("antenna counts must be positive"));
    }
    let kf = k as f64;
    let a = 1.0 - xi;
    let alpha = kf * (a * m - n);
    let beta = (kf * (a * a * m + n)).sqrt();
    Ok(EssrPrediction {
        value: rho * rectified_gaussian_mean(alpha, beta),
        regime: Regime::LowSnr,
        strategy: PredictionStrategy::Random,
        gain: 0.0,
    })
}

/// Single best user at low SNR under estimation error (main CSI):
/// `rho {(1 - xi) M - N + (1 - xi) sqrt(2 M log K)}^+`.
pub fn essr_error_tdma(
    m: usize,
    n: usize,
    users: usize,
    rho: f64,
    xi: f64,
) -> Result<EssrPrediction> {
    check_xi(xi)?;
    check_rho(rho)?;
    check_positive("M", m)?;
    check_positive("N", n)?;
    if users < 2 {
        return Err(Error::domain(format!(
            "single-user selection needs K >= 2, got {users}"
        )));
    }
    let a = 1.0 - xi;
    let gain = rho * a * (2.0 * m as f64 * (users as f64).ln()).sqrt();
    Ok(EssrPrediction {
        value: (rho * (a * m as f64 - n as f64) + gain).max(0.0),
        regime: Regime::LowSnr,
        strategy: PredictionStrategy::Tdma1Main,
        gain,
    })
}

/// Greedy `k`-user selection at low SNR under estimation error (main CSI):
/// `{k rho ((1 - xi)(sqrt(2 M log K) - log(4 pi log K) / (2 sqrt(2 log K / M)) + M) - N)
///   - rho (1 - xi) sqrt(M / (2 log K)) sum_r psi(r)}^+`.
pub fn essr_error_greedy_low(
    m: usize,
    n: usize,
    k: usize,
    users: usize,
    rho: f64,
    xi: f64,
) -> Result<EssrPrediction> {
    check_xi(xi)?;
    check_rho(rho)?;
    check_positive("M", m)?;
    check_positive("N", n)?;
    check_positive("k", k)?;
    if users < 2 || users <= k {
        return Err(Error::domain(format!(
            "need K > k and K >= 2, got K = {users}, k = {k}"
        )));
    }
    let (mf, kf) = (m as f64, k as f64);
    let a = 1.0 - xi;
    let log_k = (users as f64).ln();
    let psi_sum: f64 = (1..=k).map(digamma).sum::<Result<f64>>()?;
    let lead =
        (2.0 * mf * log_k).sqrt() - (4.0 * PI * log_k).ln() / (2.0 * (2.0 * log_k / mf).sqrt());
    let tail = rho * a * (mf / (2.0 * log_k)).sqrt() * psi_sum;
    let value = kf * rho * (a * (lead + mf) - n as f64) - tail;
    Ok(EssrPrediction {
        value: value.max(0.0),
        regime: Regime::LowSnr,
        strategy: PredictionStrategy::GreedyMain,
        gain: kf * rho * a * lead - tail,
    })
}

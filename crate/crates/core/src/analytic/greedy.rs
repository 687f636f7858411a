use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{check_positive, check_rho, Csi, EssrPrediction, PredictionStrategy, Regime};
use crate::error::{Error, Result};
use crate::special_math::{digamma, inverse_square_tail, rth_order_mean};

/// Per-step quantities of the high-SNR greedy analysis. Step `l` draws from
/// `M_l = M - l + 1` and `N_l = N - l + 1` dimensions and `K_l = K - l + 1`
/// remaining users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyHighTerm {
    pub step: usize,
    /// `psi(M_l) - psi(N_l)`.
    pub psi_gap: f64,
    /// `sum_{i >= M_l} 1/i^2`, the variance of `log` of a `chi^2_{2 M_l}/2` variable.
    pub sigma_main_sq: f64,
    pub sigma_eve_sq: f64,
    /// `G_K^l`.
    pub order_factor: f64,
}

// sqrt(2 log K) - log(4 pi log K) / (2 sqrt(2 log K)) - psi(r) / sqrt(2 log K)
fn order_factor(population: usize, r: usize) -> Result<f64> {
    if population < 2 {
        return Err(Error::domain(format!(
            "order-statistic factor needs K >= 2, got {population}"
        )));
    }
    let log_k = (population as f64).ln();
    let root = (2.0 * log_k).sqrt();
    Ok(root - (4.0 * PI * log_k).ln() / (2.0 * root) - digamma(r)? / root)
}

fn check_greedy_dims(m: usize, n: usize, k: usize, users: usize) -> Result<()> {
    check_positive("M", m)?;
    check_positive("N", n)?;
    check_positive("k", k)?;
    if k > m {
        return Err(Error::domain(format!("k exceeds M (k = {k}, M = {m})")));
    }
    if k > n {
        return Err(Error::domain(format!("k exceeds N (k = {k}, N = {n})")));
    }
    if users <= k {
        return Err(Error::domain(format!(
            "need K > k, got K = {users}, k = {k}"
        )));
    }
    Ok(())
}

pub fn greedy_high_terms(
    m: usize,
    n: usize,
    k: usize,
    users: usize,
) -> Result<Vec<GreedyHighTerm>> {
    check_greedy_dims(m, n, k, users)?;
    (1..=k)
        .map(|l| {
            let (ml, nl) = (m - l + 1, n - l + 1);
            Ok(GreedyHighTerm {
                step: l,
                psi_gap: digamma(ml)? - digamma(nl)?,
                sigma_main_sq: inverse_square_tail(ml)?,
                sigma_eve_sq: inverse_square_tail(nl)?,
                order_factor: order_factor(users - l + 1, l)?,
            })
        })
        .collect()
}

/// Greedy selection of `k` users at high SNR. The gain is
/// `sum_l sigma_l G_K^l` with `sigma_l = sigma_{M_l}` (main CSI) or
/// `sqrt(sigma_{M_l}^2 + sigma_{N_l}^2)` (full CSI).
pub fn essr_greedy_high(
    m: usize,
    n: usize,
    k: usize,
    users: usize,
    csi: Csi,
) -> Result<EssrPrediction> {
    let terms = greedy_high_terms(m, n, k, users)?;
    let mut base = 0.0;
    let mut gain = 0.0;
    for t in &terms {
        let sd = match csi {
            Csi::Main => t.sigma_main_sq.sqrt(),
            Csi::Full => (t.sigma_main_sq + t.sigma_eve_sq).sqrt(),
        };
        base += t.psi_gap;
        gain += sd * t.order_factor;
    }
    Ok(EssrPrediction {
        value: (base + gain).max(0.0),
        regime: Regime::HighSnr,
        strategy: PredictionStrategy::greedy(csi),
        gain,
    })
}

/// Single best user at high SNR: `{psi(M) - psi(N) + sqrt(2 log K / M)}^+`
/// (main CSI) or with `1/M + 1/N` under the root (full CSI).
pub fn essr_tdma_high(m: usize, n: usize, users: usize, csi: Csi) -> Result<EssrPrediction> {
    check_positive("M", m)?;
    check_positive("N", n)?;
    if users < 2 {
        return Err(Error::domain(format!(
            "single-user selection needs K >= 2, got {users}"
        )));
    }
    let inv = match csi {
        Csi::Main => 1.0 / m as f64,
        Csi::Full => 1.0 / m as f64 + 1.0 / n as f64,
    };
    let gain = (2.0 * (users as f64).ln() * inv).sqrt();
    Ok(EssrPrediction {
        value: (digamma(m)? - digamma(n)? + gain).max(0.0),
        regime: Regime::HighSnr,
        strategy: PredictionStrategy::tdma(csi),
        gain,
    })
}

fn low_snr_sigma(m: usize, n: usize, csi: Csi) -> f64 {
    match csi {
        Csi::Main => (m as f64).sqrt(),
        Csi::Full => ((m + n) as f64).sqrt(),
    }
}

fn check_low_dims(m: usize, n: usize, k: usize, users: usize) -> Result<()> {
    check_positive("M", m)?;
    check_positive("N", n)?;
    check_positive("k", k)?;
    if users < 2 || users <= k {
        return Err(Error::domain(format!(
            "need K > k and K >= 2, got K = {users}, k = {k}"
        )));
    }
    Ok(())
}

/// Mean channel strength `R_b` of the `k` strongest users at low SNR, closed form:
/// `M + sigma_x (sqrt(2 log K) - log(4 pi log K) / (2 sqrt(2 log K)) - (psi(k + 1) - 1) / sqrt(2 log K))`.
pub fn greedy_low_bs_rate(m: usize, n: usize, k: usize, users: usize, csi: Csi) -> Result<f64> {
    check_low_dims(m, n, k, users)?;
    let log_k = (users as f64).ln();
    let root = (2.0 * log_k).sqrt();
    let sx = low_snr_sigma(m, n, csi);
    let avg_psi = digamma(k + 1)? - 1.0;
    Ok(m as f64 + sx * (root - (4.0 * PI * log_k).ln() / (2.0 * root) - avg_psi / root))
}

/// [`greedy_low_bs_rate`] as the average of the `k` largest order-statistic means.
pub fn greedy_low_bs_rate_from_order_statistics(
    m: usize,
    n: usize,
    k: usize,
    users: usize,
    csi: Csi,
) -> Result<f64> {
    check_low_dims(m, n, k, users)?;
    let sx = low_snr_sigma(m, n, csi);
    let sum = (1..=k)
        .map(|r| rth_order_mean(users as f64, r, m as f64, sx))
        .sum::<Result<f64>>()?;
    Ok(sum / k as f64)
}

/// Greedy selection of `k` users at low SNR: `k rho {R_b - N}^+`.
pub fn essr_greedy_low(
    m: usize,
    n: usize,
    k: usize,
    users: usize,
    rho: f64,
    csi: Csi,
) -> Result<EssrPrediction> {
    check_rho(rho)?;
    let rb = greedy_low_bs_rate(m, n, k, users, csi)?;
    let scale = k as f64 * rho;
    Ok(EssrPrediction {
        value: scale * (rb - n as f64).max(0.0),
        regime: Regime::LowSnr,
        strategy: PredictionStrategy::greedy(csi),
        gain: scale * (rb - m as f64),
    })
}

/// Single best user at low SNR: `rho {M - N + sqrt(2 sigma_x^2 log K)}^+`.
pub fn essr_tdma_low(
    m: usize,
    n: usize,
    users: usize,
    rho: f64,
    csi: Csi,
) -> Result<EssrPrediction> {
    check_positive("M", m)?;
    check_positive("N", n)?;
    check_rho(rho)?;
    if users < 2 {
        return Err(Error::domain(format!(
            "single-user selection needs K >= 2, got {users}"
        )));
    }
    let sx = low_snr_sigma(m, n, csi);
    let gain = rho * (2.0 * sx * sx * (users as f64).ln()).sqrt();
    Ok(EssrPrediction {
        value: (rho * (m as f64 - n as f64) + gain).max(0.0),
        regime: Regime::LowSnr,
        strategy: PredictionStrategy::tdma(csi),
        gain,
    })
}

/// Greedy selection with large arrays:
/// `{k log((1 + rho M) / (1 + rho N)) + sum_r sigma' (sqrt(2 log K) - (log(4 pi log K) + 2 psi(r)) / (2 sqrt(2 log K)))}^+`
/// with `sigma' = sqrt(1/M)` (main CSI) or `sqrt(1/M + 1/N)` (full CSI).
pub fn essr_greedy_large(
    m: usize,
    n: usize,
    k: usize,
    users: usize,
    rho: f64,
    csi: Csi,
) -> Result<EssrPrediction> {
    check_low_dims(m, n, k, users)?;
    check_rho(rho)?;
    let sp = match csi {
        Csi::Main => (1.0 / m as f64).sqrt(),
        Csi::Full => (1.0 / m as f64 + 1.0 / n as f64).sqrt(),
    };
    let log_k = (users as f64).ln();
    let root = (2.0 * log_k).sqrt();
    let mut gain = 0.0;
    for r in 1..=k {
        gain += sp * (root - ((4.0 * PI * log_k).ln() + 2.0 * digamma(r)?) / (2.0 * root));
    }
    let base = k as f64 * ((1.0 + rho * m as f64) / (1.0 + rho * n as f64)).ln();
    Ok(EssrPrediction {
        value: (base + gain).max(0.0),
        regime: Regime::LargeScale,
        strategy: PredictionStrategy::greedy(csi),
        gain,
    })
}

/// Regime for [`per_user_secrecy_rate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerUserRegime {
    HighSnr,
    /// Low SNR with `served` users scheduled in total.
    LowSnr {
        rho: f64,
        served: usize,
    },
}

/// Ergodic secrecy rate of the `l`-th greedily selected user (main CSI).
/// High SNR gives the lower bound `{psi(M_l) + sigma_{M_l} G_K^l - psi(N)}^+`;
/// low SNR gives `rho {R_b - N}^+`.
pub fn per_user_secrecy_rate(
    m: usize,
    n: usize,
    l: usize,
    users: usize,
    regime: PerUserRegime,
) -> Result<f64> {
    check_positive("M", m)?;
    check_positive("N", n)?;
    check_positive("l", l)?;
    if l > m {
        return Err(Error::domain(format!("step l = {l} exceeds M = {m}")));
    }
    match regime {
        PerUserRegime::HighSnr => {
            if users < l + 1 {
                return Err(Error::domain(format!(
                    "need K > l, got K = {users}, l = {l}"
                )));
            }
            let ml = m - l + 1;
            let v = digamma(ml)?
                + inverse_square_tail(ml)?.sqrt() * order_factor(users - l + 1, l)?
                - digamma(n)?;
            Ok(v.max(0.0))
        }
        PerUserRegime::LowSnr { rho, served } => {
            check_rho(rho)?;
            if l > served {
                return Err(Error::domain(format!("step l = {l} exceeds k = {served}")));
            }
            let rb = greedy_low_bs_rate(m, n, served, users, Csi::Main)?;
            Ok(rho * (rb - n as f64).max(0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_math::max_order_mean;
    use approx::assert_abs_diff_eq;

    #[test]
    fn equal_antennas_full_gain_is_root_two() {
        for k in 1..=6 {
            let main = essr_greedy_high(20, 20, k, 400, Csi::Main).unwrap();
            let full = essr_greedy_high(20, 20, k, 400, Csi::Full).unwrap();
            assert_abs_diff_eq!(full.gain, 2f64.sqrt() * main.gain, epsilon = 1e-12);
            assert_abs_diff_eq!(main.value, main.gain, epsilon = 1e-12);
        }
    }

    #[test]
    fn step_variances_are_bracketed() {
        for t in greedy_high_terms(20, 25, 3, 400).unwrap() {
            let ml = (20 - t.step + 1) as f64;
            assert!(t.sigma_main_sq > 1.0 / ml && t.sigma_main_sq < 1.0 / (ml - 1.0));
        }
    }

    #[test]
    fn greedy_high_guards() {
        let msg = essr_greedy_high(20, 25, 21, 400, Csi::Main)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("k exceeds M"), "{msg}");
        assert!(essr_greedy_high(20, 25, 5, 5, Csi::Main).is_err());
    }

    #[test]
    fn single_user_high_snr() {
        let main = essr_tdma_high(20, 25, 400, Csi::Main).unwrap();
        assert_abs_diff_eq!(main.value, 0.545_827_0, epsilon = 1e-6);
        assert_abs_diff_eq!(
            main.gain,
            (2.0 * 400f64.ln() / 20.0).sqrt(),
            epsilon = 1e-15
        );
        let eq = essr_tdma_high(20, 20, 400, Csi::Main).unwrap();
        assert_abs_diff_eq!(eq.value, (2.0 * 400f64.ln() / 20.0).sqrt(), epsilon = 1e-15);
        let full = essr_tdma_high(20, 25, 400, Csi::Full).unwrap();
        assert!(full.value > main.value);
        assert!(essr_tdma_high(20, 25, 1, Csi::Main).is_err());
    }

    #[test]
    fn low_snr_dual_routes_agree() {
        for csi in [Csi::Main, Csi::Full] {
            for (m, n, k, users) in [
                (10, 15, 1, 400),
                (10, 15, 7, 400),
                (20, 20, 10, 50),
                (3, 8, 2, 3),
            ] {
                let a = greedy_low_bs_rate(m, n, k, users, csi).unwrap();
                let b = greedy_low_bs_rate_from_order_statistics(m, n, k, users, csi).unwrap();
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn low_snr_single_user_is_max_order_mean() {
        let rb = greedy_low_bs_rate(10, 15, 1, 400, Csi::Main).unwrap();
        assert_abs_diff_eq!(
            rb,
            max_order_mean(400.0, 10.0, 10f64.sqrt()).unwrap(),
            epsilon = 1e-12
        );
        let lead = essr_tdma_low(10, 15, 400, 1e-3, Csi::Main).unwrap().value;
        assert_abs_diff_eq!(
            lead,
            1e-3 * (-5.0 + (20.0 * 400f64.ln()).sqrt()),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(lead, 5.947_5e-3, epsilon = 1e-6);
    }

    #[test]
    fn low_snr_grows_with_users() {
        let mut last = 0.0;
        for users in [20, 50, 100, 200, 400, 1000] {
            let v = essr_greedy_low(10, 12, 4, users, 1e-3, Csi::Main)
                .unwrap()
                .value;
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn large_array_gain() {
        let p = essr_greedy_large(100, 100, 1, 400, 10.0, Csi::Main).unwrap();
        assert_abs_diff_eq!(
            p.gain,
            max_order_mean(400.0, 0.0, 0.1).unwrap(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(p.gain, 0.300_420_4, epsilon = 1e-7);
        assert_abs_diff_eq!(p.value, p.gain, epsilon = 1e-15);
        let f = essr_greedy_large(100, 60, 3, 400, 10.0, Csi::Full).unwrap();
        let m = essr_greedy_large(100, 60, 3, 400, 10.0, Csi::Main).unwrap();
        assert_abs_diff_eq!(
            f.gain / m.gain,
            (1.0 + 100.0 / 60.0f64).sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn per_user_rates() {
        let first = per_user_secrecy_rate(20, 20, 1, 400, PerUserRegime::HighSnr).unwrap();
        assert!(first > 0.0);
        let seq: Vec<f64> = (1..=5)
            .map(|l| per_user_secrecy_rate(20, 25, l, 400, PerUserRegime::HighSnr).unwrap())
            .collect();
        assert!(seq.windows(2).all(|w| w[1] <= w[0]), "{seq:?}");
        let low = per_user_secrecy_rate(
            10,
            15,
            1,
            400,
            PerUserRegime::LowSnr {
                rho: 1e-3,
                served: 1,
            },
        )
        .unwrap();
        let total = essr_greedy_low(10, 15, 1, 400, 1e-3, Csi::Main)
            .unwrap()
            .value;
        assert_abs_diff_eq!(low, total, epsilon = 1e-18);
    }
}

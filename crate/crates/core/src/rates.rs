//! Instantaneous sum-rates, secrecy rates and the projector (MMSE-SIC) chain.
//!
//! All rates are natural-log (nats). Determinants are taken on the `k x k`
//! Gram side through a Hermitian Cholesky factorization.

use num_complex::Complex64;

use crate::channel::{dot, snr_loss_factor, ComplexMatrix};
use crate::error::{Error, Result};

/// Relative pivot threshold: a Cholesky pivot below
/// `PIVOT_TOLERANCE * max_diagonal` is reported as rank deficiency.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Rates for one channel realization and one user subset.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBreakdown {
    /// Base-station sum-rate `log|I + rho H^H H|`.
    pub c_b: f64,
    /// Eavesdropper sum-rate `log|I + rho G^H G|`.
    pub c_e: f64,
    /// `max(c_b - c_e, 0)`.
    pub c_s: f64,
    /// Per-user increments; see [`RateMode`].
    pub per_step: Vec<f64>,
}

/// How [`RateBreakdown::per_step`] is decomposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateMode {
    /// MMSE-SIC increments `log(1 + rho h_l^H (I + rho H_{l-1} H_{l-1}^H)^{-1} h_l)`;
    /// they sum to `c_b`.
    #[default]
    Exact,
    /// High-SNR chain `log(h_l^H A_{l-1} h_l)`; they sum to `c_b - k log rho`
    /// up to `O(1/rho)`.
    HighSnr,
}

/// Lower Cholesky factor of a Hermitian positive-definite matrix.
fn cholesky(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    debug_assert_eq!(n, a.cols());
    let max_diag = (0..n).map(|i| a.get(i, i).re).fold(0.0, f64::max);
    let threshold = PIVOT_TOLERANCE * max_diag;
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for p in 0..j {
            d -= l.get(j, p).norm_sqr();
        }
        if !(d > threshold) {
            return Err(Error::Singular {
                step: j,
                pivot: d,
                threshold,
            });
        }
        let ljj = d.sqrt();
        l.set(j, j, Complex64::new(ljj, 0.0));
        for i in j + 1..n {
            let mut v = a.get(i, j);
            for p in 0..j {
                v -= l.get(i, p) * l.get(j, p).conj();
            }
            l.set(i, j, v / ljj);
        }
    }
    Ok(l)
}

fn check_finite(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!(
            "{what} has NaN or infinite entries"
        )))
    }
}

fn check_snr(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "SNR must be positive and finite, got {rho}"
        )))
    }
}

// Cholesky of I + rho H^H H; its diagonal carries the MMSE-SIC increments.
fn regularized_gram_factor(hs: &ComplexMatrix, rho: f64) -> Result<ComplexMatrix> {
    check_snr(rho)?;
    check_finite(hs, "channel")?;
    let mut a = hs.gram().scale(rho);
    for i in 0..a.rows() {
        a.set(i, i, a.get(i, i) + 1.0);
    }
    cholesky(&a)
}

/// `log|I_k + rho H^H H|` in nats.
pub fn sum_rate(hs: &ComplexMatrix, rho: f64) -> Result<f64> {
    let l = regularized_gram_factor(hs, rho)?;
    Ok((0..l.rows()).map(|i| 2.0 * l.get(i, i).re.ln()).sum())
}

/// `log|I + rho H_l^H H_l|` for every leading block `H_l` of the first `l`
/// columns, from a single factorization. Entry `l - 1` equals
/// `sum_rate` of the first `l` columns bit for bit.
pub fn prefix_sum_rates(hs: &ComplexMatrix, rho: f64) -> Result<Vec<f64>> {
    let l = regularized_gram_factor(hs, rho)?;
    let mut acc = 0.0;
    Ok((0..l.rows())
        .map(|i| {
            acc += 2.0 * l.get(i, i).re.ln();
            acc
        })
        .collect())
}

/// `log|H^H H|`, the high-SNR part of the sum-rate without the `k log rho` term.
pub fn log_det_gram(hs: &ComplexMatrix) -> Result<f64> {
    check_finite(hs, "channel")?;
    let l = cholesky(&hs.gram())?;
    Ok((0..l.rows()).map(|i| 2.0 * l.get(i, i).re.ln()).sum())
}

/// Secrecy sum-rate `{C_b - C_e}^+` of a selected user subset.
pub fn secrecy_sum_rate(hs: &ComplexMatrix, gs: &ComplexMatrix, rho: f64) -> Result<RateBreakdown> {
    secrecy_sum_rate_mode(hs, gs, rho, RateMode::Exact)
}

/// [`secrecy_sum_rate`] with a choice of per-step decomposition.
pub fn secrecy_sum_rate_mode(
    hs: &ComplexMatrix,
    gs: &ComplexMatrix,
    rho: f64,
    mode: RateMode,
) -> Result<RateBreakdown> {
    if hs.cols() != gs.cols() {
        return Err(Error::domain(format!(
            "main channel has {} columns but wiretap channel has {}",
            hs.cols(),
            gs.cols()
        )));
    }
    let l = regularized_gram_factor(hs, rho)?;
    let exact_steps: Vec<f64> = (0..l.rows()).map(|i| 2.0 * l.get(i, i).re.ln()).collect();
    let c_b = exact_steps.iter().sum();
    let c_e = sum_rate(gs, rho)?;
    let per_step = match mode {
        RateMode::Exact => exact_steps,
        RateMode::HighSnr => sic_chain_logdet(hs, &(0..hs.cols()).collect::<Vec<_>>())?,
    };
    Ok(RateBreakdown {
        c_b,
        c_e,
        c_s: (c_b - c_e).max(0.0),
        per_step,
    })
}

/// Lower bound on the base-station sum-rate under estimation error:
/// `log|I + eta rho H_hat^H H_hat|` with `eta = (1 - xi) / (1 + xi rho)`.
pub fn lower_bound_sum_rate(h_hat: &ComplexMatrix, rho: f64, xi: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::domain(format!(
            "error variance xi must lie in [0, 1), got {xi}"
        )));
    }
    check_snr(rho)?;
    sum_rate(h_hat, snr_loss_factor(rho, xi) * rho)
}

/// Secrecy lower bound with an estimated main channel and a perfectly known
/// wiretap channel (worst case for the legitimate side).
pub fn secrecy_sum_rate_estimated(
    h_hat: &ComplexMatrix,
    gs: &ComplexMatrix,
    rho: f64,
    xi: f64,
) -> Result<RateBreakdown> {
    if h_hat.cols() != gs.cols() {
        return Err(Error::domain("main and wiretap column counts differ"));
    }
    let c_b = lower_bound_sum_rate(h_hat, rho, xi)?;
    let c_e = sum_rate(gs, rho)?;
    let l = regularized_gram_factor(h_hat, snr_loss_factor(rho, xi) * rho)?;
    Ok(RateBreakdown {
        c_b,
        c_e,
        c_s: (c_b - c_e).max(0.0),
        per_step: (0..l.rows()).map(|i| 2.0 * l.get(i, i).re.ln()).collect(),
    })
}

/// Orthogonal-complement projector `I - P (P^H P)^{-1} P^H` onto the
/// complement of the prefix columns. An empty prefix gives `I`.
#[allow(clippy::needless_range_loop)]
pub fn projection_complement(prefix: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_finite(prefix, "prefix")?;
    let m = prefix.rows();
    let l = prefix.cols();
    let mut out = ComplexMatrix::identity(m);
    if l == 0 {
        return Ok(out);
    }
    let chol = cholesky(&prefix.gram())?;
    // Rows of W^H = L^{-1} P^H by forward substitution; P (P^H P)^{-1} P^H = W W^H.
    let mut w_h = vec![vec![Complex64::new(0.0, 0.0); m]; l];
    for i in 0..l {
        for c in 0..m {
            let mut v = prefix.get(c, i).conj();
            for p in 0..i {
                v -= chol.get(i, p) * w_h[p][c];
            }
            w_h[i][c] = v / chol.get(i, i).re;
        }
    }
    for r in 0..m {
        for c in 0..m {
            let mut v = Complex64::new(0.0, 0.0);
            for row in &w_h {
                v += row[r].conj() * row[c];
            }
            out.set(r, c, out.get(r, c) - v);
        }
    }
    Ok(out)
}

/// Real quadratic form `x^H A x` for Hermitian `A`.
pub fn quadratic_form(x: &[Complex64], a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut ax = vec![Complex64::new(0.0, 0.0); n];
    for (j, xj) in x.iter().enumerate() {
        for (i, slot) in ax.iter_mut().enumerate() {
            *slot += a.get(i, j) * xj;
        }
    }
    dot(x, &ax).re
}

/// Per-step chain `log(h_{s_l}^H A_{l-1} h_{s_l})` for the given ordering,
/// with each projector rebuilt from scratch. The values sum to
/// `log|H^H H|` for every ordering.
pub fn sic_chain_logdet(hs: &ComplexMatrix, ordering: &[usize]) -> Result<Vec<f64>> {
    check_finite(hs, "channel")?;
    let k = hs.cols();
    let mut seen = vec![false; k];
    if ordering.len() != k
        || ordering
            .iter()
            .any(|&j| j >= k || std::mem::replace(&mut seen[j], true))
    {
        return Err(Error::domain(
            "ordering must be a permutation of the columns",
        ));
    }
    let max_norm = (0..k).map(|j| hs.column_norm_sqr(j)).fold(0.0, f64::max);
    let threshold = PIVOT_TOLERANCE * max_norm;
    let mut out = Vec::with_capacity(k);
    for (l, &col) in ordering.iter().enumerate() {
        let proj = projection_complement(&hs.select_columns(&ordering[..l]))?;
        let q = quadratic_form(hs.column(col), &proj);
        if !(q > threshold) {
            return Err(Error::Singular {
                step: l,
                pivot: q,
                threshold,
            });
        }
        out.push(q.ln());
    }
    Ok(out)
}

/// Low-SNR sum-rate `rho tr(H^H H)`.
pub fn low_snr_rate(hs: &ComplexMatrix, rho: f64) -> f64 {
    rho * hs.frobenius_norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{StreamRole, TrialStreams};
    use approx::assert_abs_diff_eq;

    fn random(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        TrialStreams::new(seed, 0).matrix(StreamRole::Main, rows, cols)
    }

    #[test]
    fn single_column_rate() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0], &[1.0]]).unwrap();
        assert_abs_diff_eq!(sum_rate(&h, 1.0).unwrap(), 3f64.ln(), epsilon = 1e-15);
        assert_eq!(sum_rate(&ComplexMatrix::zeros(5, 3), 10.0).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_and_bad_snr_are_rejected() {
        let mut h = ComplexMatrix::zeros(2, 2);
        h.set(0, 1, Complex64::new(f64::NAN, 0.0));
        assert!(matches!(sum_rate(&h, 1.0), Err(Error::NonFinite(_))));
        assert!(sum_rate(&ComplexMatrix::zeros(2, 2), 0.0).is_err());
    }

    #[test]
    fn secrecy_rate_edge_cases() {
        let h = random(6, 3, 1);
        let same = secrecy_sum_rate(&h, &h, 100.0).unwrap();
        assert_eq!(same.c_s, 0.0);
        let silent = secrecy_sum_rate(&h, &ComplexMatrix::zeros(8, 3), 100.0).unwrap();
        assert_eq!(silent.c_s, silent.c_b);
        assert!(secrecy_sum_rate(&h, &ComplexMatrix::zeros(8, 2), 1.0).is_err());
    }

    #[test]
    fn exact_steps_sum_to_rate() {
        let h = random(10, 4, 2);
        let g = random(12, 4, 3);
        let r = secrecy_sum_rate(&h, &g, 50.0).unwrap();
        assert_abs_diff_eq!(r.per_step.iter().sum::<f64>(), r.c_b, epsilon = 1e-12);
        let hi = secrecy_sum_rate_mode(&h, &g, 1e6, RateMode::HighSnr).unwrap();
        let offset = 4.0 * 1e6f64.ln();
        assert_abs_diff_eq!(
            hi.per_step.iter().sum::<f64>() + offset,
            hi.c_b,
            epsilon = 1e-4
        );
    }

    #[test]
    fn lower_bound_special_cases() {
        let h = random(10, 2, 4);
        assert_eq!(
            lower_bound_sum_rate(&h, 7.0, 0.0).unwrap(),
            sum_rate(&h, 7.0).unwrap()
        );
        assert!(lower_bound_sum_rate(&h, 7.0, 0.999_999_9).unwrap() < 1e-5);
        let rho = 1e-3;
        let eta = snr_loss_factor(rho, 0.1);
        assert_abs_diff_eq!(eta * rho, 9e-4, epsilon = 9e-4 * 1e-4);
        assert_eq!(
            lower_bound_sum_rate(&h, rho, 0.1).unwrap(),
            sum_rate(&h, eta * rho).unwrap()
        );
        assert!(lower_bound_sum_rate(&h, rho, 1.0).is_err());
    }

    #[test]
    fn projector_of_axis() {
        assert_eq!(
            projection_complement(&ComplexMatrix::zeros(5, 0)).unwrap(),
            ComplexMatrix::identity(5)
        );
        let e1 = ComplexMatrix::from_real_rows(&[&[1.0], &[0.0], &[0.0]]).unwrap();
        let a = projection_complement(&e1).unwrap();
        let expected =
            ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]])
                .unwrap();
        assert!(a.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn projector_algebra() {
        let p = random(10, 3, 5);
        let a = projection_complement(&p).unwrap();
        assert!(a.matmul(&a).unwrap().max_abs_diff(&a) < 1e-10);
        assert!(a.max_abs_diff(&a.conj_transpose()) < 1e-12);
        assert!(
            a.matmul(&p)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::zeros(10, 3))
                < 1e-10
        );
        let trace: f64 = (0..10).map(|i| a.get(i, i).re).sum();
        assert_abs_diff_eq!(trace, 7.0, epsilon = 1e-10);
    }

    #[test]
    fn rank_deficient_prefix_is_singular() {
        let p = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[1.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            projection_complement(&p),
            Err(Error::Singular { .. })
        ));
        assert!(matches!(
            sic_chain_logdet(&p, &[0, 1]),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn chain_examples() {
        let h = ComplexMatrix::from_real_rows(&[&[3.0], &[4.0]]).unwrap();
        assert_abs_diff_eq!(
            sic_chain_logdet(&h, &[0]).unwrap()[0],
            25f64.ln(),
            epsilon = 1e-14
        );
        let q = ComplexMatrix::identity(4).select_columns(&[2, 0, 3]);
        for v in sic_chain_logdet(&q, &[1, 2, 0]).unwrap() {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        }
        assert!(sic_chain_logdet(&q, &[0, 0, 1]).is_err());
        assert!(sic_chain_logdet(&q, &[0, 1]).is_err());
    }

    #[test]
    fn chain_sum_is_order_free() {
        let h = random(10, 4, 6);
        let a: f64 = sic_chain_logdet(&h, &[0, 1, 2, 3]).unwrap().iter().sum();
        let b: f64 = sic_chain_logdet(&h, &[3, 1, 0, 2]).unwrap().iter().sum();
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        assert_abs_diff_eq!(a, log_det_gram(&h).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn prefix_rates_match_truncations() {
        let h = random(6, 9, 8);
        let prefix = prefix_sum_rates(&h, 1000.0).unwrap();
        for l in 1..=9 {
            let cols: Vec<usize> = (0..l).collect();
            assert_eq!(
                prefix[l - 1],
                sum_rate(&h.select_columns(&cols), 1000.0).unwrap()
            );
        }
    }

    #[test]
    fn low_snr_rate_examples() {
        let e = ComplexMatrix::identity(3).select_columns(&[1]);
        assert_abs_diff_eq!(low_snr_rate(&e, 1e-3), 1e-3, epsilon = 1e-18);
        assert_eq!(low_snr_rate(&ComplexMatrix::zeros(4, 2), 1e-3), 0.0);
        let h = random(10, 2, 7);
        let exact = sum_rate(&h, 1e-5).unwrap();
        assert!((low_snr_rate(&h, 1e-5) - exact).abs() / exact < 1e-3);
    }
}

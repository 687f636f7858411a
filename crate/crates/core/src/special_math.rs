//! Scalar special functions and extreme-value constants.
//!
//! Everything here is a pure function of its arguments. Logarithms are
//! natural, so every rate built on top of these is in nats.
//!
//! The Gumbel helpers model the largest (or `r`-th largest) of `K` i.i.d.
//! draws from `N(mu, sigma^2)`:
//!
//! ```
//! use uplink_secrecy::special_math::{gumbel_constants, max_order_mean};
//!
//! let c = gumbel_constants(100.0, 0.0, 1.0).unwrap();
//! assert!((c.scale - 0.3295).abs() < 1e-3);
//! assert!((c.location - 2.3663).abs() < 1e-3);
//!
//! // Mean of the largest of 100 draws of N(10, 10).
//! let m = max_order_mean(100.0, 10.0, 10f64.sqrt()).unwrap();
//! assert!((m - 18.0842).abs() < 5e-4);
//! ```

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

// Crossover between the power series for erf and the continued fraction for erfc.
const ERF_SERIES_LIMIT: f64 = 2.5;
const ERFC_FRACTION_LIMIT: f64 = 1.0;

/// Harmonic number `H_n = 1 + 1/2 + ... + 1/n`; `H_0 = 0`.
pub fn harmonic(n: usize) -> f64 {
    // smallest terms first
    (1..=n).rev().map(|j| 1.0 / j as f64).sum()
}

/// Digamma at a positive integer: `psi(r) = H_{r-1} - gamma`.
pub fn digamma(r: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::domain("digamma is defined here for r >= 1 only"));
    }
    Ok(harmonic(r - 1) - EULER_GAMMA)
}

/// `sum_{i >= n} 1/i^2`, i.e. `pi^2/6 - sum_{i=1}^{n-1} 1/i^2` (trigamma at `n`).
///
/// Summed directly from the tail with an Euler–Maclaurin remainder, which
/// avoids the cancellation of the subtraction form for large `n`.
pub fn inverse_square_tail(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("inverse-square tail needs n >= 1"));
    }
    const TERMS: usize = 64;
    let m = (n + TERMS) as f64;
    let remainder = 1.0 / m + 0.5 / (m * m) + 1.0 / (6.0 * m.powi(3)) - 1.0 / (30.0 * m.powi(5))
        + 1.0 / (42.0 * m.powi(7));
    let head: f64 = (n..n + TERMS)
        .rev()
        .map(|i| 1.0 / (i as f64 * i as f64))
        .sum();
    Ok(head + remainder)
}

/// `log Gamma(n) = log((n-1)!)` for a positive integer.
pub fn ln_gamma_int(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("log-gamma at a non-positive integer"));
    }
    Ok((2..n).map(|i| (i as f64).ln()).sum())
}

/// Error function, absolute error below 1e-15 over the real line.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let a = x.abs();
    let v = if a <= ERF_SERIES_LIMIT {
        erf_series(a)
    } else {
        1.0 - erfc_continued_fraction(a)
    };
    v.copysign(x)
}

/// Complementary error function `1 - erf(x)`, accurate in relative terms in
/// the upper tail.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x <= ERFC_FRACTION_LIMIT {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

// erf(x) = 2/sqrt(pi) * x * exp(-x^2) * sum_n (2x^2)^n / (1*3*...*(2n+1)).
// Every term is positive, so there is no cancellation for x >= 0.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    while term > sum * 1e-17 {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
    }
    2.0 * FRAC_1_SQRT_PI * x * (-x2).exp() * sum
}

// Laplace continued fraction for erfc, evaluated with modified Lentz.
// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    if x > 27.5 {
        return 0.0;
    }
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..1000 {
        let a = k as f64 * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI * (-x * x).exp() / f
}

/// Gaussian tail probability `Q(x) = P(Z > x)` for standard normal `Z`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Mills ratio `Q(x) / phi(x)` for `x >= 0`.
pub fn mills_ratio(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 4.0 {
        return q_function(x) / normal_pdf(x);
    }
    // R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...))))
    let mut tail = x;
    for k in (1..=80).rev() {
        tail = x + k as f64 / tail;
    }
    1.0 / tail
}

/// `E[max(Z, 0)]` for `Z ~ N(mean, std^2)`.
///
/// Equal to `std/sqrt(2 pi) exp(-mean^2 / 2 std^2) + mean/2 (1 + erf(mean / (sqrt 2 std)))`.
/// The lower tail is evaluated through the Mills ratio, so the result stays
/// strictly positive until the density itself underflows.
pub fn rectified_gaussian_mean(mean: f64, std: f64) -> f64 {
    if std <= 0.0 {
        return mean.max(0.0);
    }
    let t = mean / std;
    let v = if t >= -3.0 {
        std * normal_pdf(t) + mean * q_function(-t)
    } else {
        let s = -t;
        std * normal_pdf(s) * (1.0 - s * mills_ratio(s))
    };
    v.max(0.0)
}

/// Gumbel normalizing constants for the maximum of `K` i.i.d. `N(mu, sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GumbelConstants {
    /// `a_K = sigma / sqrt(2 log K)`.
    pub scale: f64,
    /// `b_K = sigma sqrt(2 log K) - sigma log(4 pi log K) / (2 sqrt(2 log K)) + mu`.
    pub location: f64,
    pub population: f64,
    pub mu: f64,
    pub sigma: f64,
}

/// Normalizing constants `(a_K, b_K)`. `population` may be any real `K >= 2`.
pub fn gumbel_constants(population: f64, mu: f64, sigma: f64) -> Result<GumbelConstants> {
    if !(population >= 2.0) || !population.is_finite() {
        return Err(Error::domain(format!(
            "Gumbel constants need a population K >= 2, got {population}"
        )));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let log_k = population.ln();
    let root = (2.0 * log_k).sqrt();
    Ok(GumbelConstants {
        scale: sigma / root,
        location: sigma * root - sigma * (4.0 * PI * log_k).ln() / (2.0 * root) + mu,
        population,
        mu,
        sigma,
    })
}

/// Asymptotic mean of the largest of `K` i.i.d. `N(mu, sigma^2)`: `b_K + gamma a_K`.
pub fn max_order_mean(population: f64, mu: f64, sigma: f64) -> Result<f64> {
    let c = gumbel_constants(population, mu, sigma)?;
    Ok(c.location + EULER_GAMMA * c.scale)
}

/// Asymptotic mean of the `r`-th largest of `K` i.i.d. `N(mu, sigma^2)`:
/// `b_K - psi(r) a_K`.
pub fn rth_order_mean(population: f64, r: usize, mu: f64, sigma: f64) -> Result<f64> {
    if r as f64 > population {
        return Err(Error::domain(format!(
            "order statistic r = {r} exceeds population K = {population}"
        )));
    }
    let c = gumbel_constants(population, mu, sigma)?;
    Ok(c.location - digamma(r)? * c.scale)
}

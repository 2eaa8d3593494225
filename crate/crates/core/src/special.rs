//! Special functions: log-gamma and its Stirling remainder, the standard
//! normal tail in log space, and the regularized incomplete gamma function.

use std::f64::consts::{LN_2, PI, SQRT_2};

use crate::error::{ensure, Result};

/// `log(sqrt(2π))`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const INC_GAMMA_TOL: f64 = 1e-14;
const INC_GAMMA_MAX_ITER: usize = 100_000;

/// Natural log of `Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Stirling remainder `ln Γ(x) − [(x − ½) ln x − x + ln √(2π)]` for `x > 0`.
///
/// Uses the asymptotic Bernoulli series once `x ≥ 10` and the upward
/// recurrence `R(x) = R(x + 1) + (x + ½) ln(1 + 1/x) − 1` below that, so it
/// stays accurate to near machine precision at every scale.
pub fn ln_gamma_remainder(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut shift = 0.0;
    let mut y = x;
    while y < 10.0 {
        shift += (y + 0.5) * (1.0 / y).ln_1p() - 1.0;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    // Coefficients B_{2k} / (2k (2k - 1)).
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let mut series = 0.0;
    for c in C.iter().rev() {
        series = series * inv2 + c;
    }
    shift + series * inv
}

/// Upper tail of the standard normal, `P(Z > x)`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// `P(Z <= x)` for a standard normal.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// `log P(Z > x)`, accurate far into the tail.
///
/// Below `x = 8` the complementary error function is used directly; above
/// it the Mills ratio `P(Z > x) / φ(x)` is evaluated by its continued
/// fraction `1 / (x + 1 / (x + 2 / (x + 3 / ...)))`.
pub fn log_normal_sf(x: f64) -> f64 {
    if x < 8.0 {
        return normal_sf(x).ln();
    }
    let mut tail = x;
    for k in (1..=200).rev() {
        tail = x + k as f64 / tail;
    }
    -0.5 * x * x - LN_SQRT_2PI - tail.ln()
}

/// Leading-order tail approximation `−x²/2 − ln x − ln √(2π)`.
pub fn log_normal_sf_asymptotic(x: f64) -> f64 {
    -0.5 * x * x - x.ln() - LN_SQRT_2PI
}

/// Regularized lower incomplete gamma `P(a, x)`.
///
/// Series expansion for `x < a + 1`, Lentz continued fraction for the upper
/// function otherwise.
pub fn reg_lower_gamma(a: f64, x: f64) -> Result<f64> {
    ensure!(a > 0.0 && a.is_finite(), Domain, "incomplete gamma needs a > 0, got {a}");
    ensure!(x >= 0.0, Domain, "incomplete gamma needs x >= 0, got {x}");
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let log_prefix = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..INC_GAMMA_MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * INC_GAMMA_TOL {
                break;
            }
        }
        Ok((sum.ln() + log_prefix).exp().min(1.0))
    } else {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..INC_GAMMA_MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < INC_GAMMA_TOL {
                break;
            }
        }
        let upper = (h.ln() + log_prefix).exp();
        Ok((1.0 - upper).max(0.0))
    }
}

/// `P(χ²_n <= x)`.
pub fn chi2_cdf(n: f64, x: f64) -> Result<f64> {
    ensure!(n > 0.0, Domain, "degrees of freedom must be positive");
    if x <= 0.0 {
        return Ok(0.0);
    }
    reg_lower_gamma(n / 2.0, x / 2.0)
}

/// `log` of the `χ²_n` density at `x > 0`.
pub fn chi2_log_pdf(n: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    (n / 2.0 - 1.0) * x.ln() - x / 2.0 - (n / 2.0) * LN_2 - ln_gamma(n / 2.0)
}

/// `log` of the `N(0, var)` density.
pub fn normal_log_pdf(x: f64, var: f64) -> f64 {
    -0.5 * x * x / var - 0.5 * (2.0 * PI * var).ln()
}

/// `log(exp(a) + exp(b))` without overflow; `-inf` operands are absorbed.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let hi = a.max(b);
    hi + (-(a - b).abs()).exp().ln_1p()
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn remainder_matches_high_precision() {
        // reference values from 40-digit arithmetic
        let cases = [
            (2.5, 0.033_162_873_519_936_287_485),
            (9.99, 0.008_338_896_797_734_330_091),
            (10.0, 0.008_330_563_433_362_871_256_5),
            (33.3, 0.002_502_427_296_421_091_744_8),
            (1000.0, 0.000_083_333_330_555_556_349_206),
        ];
        for (x, expect) in cases {
            let r = ln_gamma_remainder(x);
            assert!((r - expect).abs() < 1e-15, "x={x}: {r} vs {expect}");
        }
        // 1/(12x) leading term
        let x = 1e6;
        assert!((ln_gamma_remainder(x) - 1.0 / (12.0 * x)).abs() < 1e-20);
    }

    #[test]
    fn log_normal_tail_values() {
        assert!((log_normal_sf(0.0) - 0.5f64.ln()).abs() < 1e-15);
        let cases = [
            (-2.0, -0.023_012_909_328_963_488_465),
            (0.5, -1.175_911_761_593_618_608_88),
            (1.96, -3.688_963_651_729_638_701_638),
            (3.0, -6.607_726_221_510_349_543_276),
            (8.0, -35.013_437_159_914_549_895_5),
            (10.0, -53.231_285_150_512_470_578_35),
        ];
        for (x, expect) in cases {
            let got = log_normal_sf(x);
            assert!((got - expect).abs() <= 1e-12 * expect.abs(), "x={x}: {got} vs {expect}");
        }
        assert!((log_normal_sf_asymptotic(10.0) + 53.221_523_626_198_72).abs() < 1e-12);
        // continuity across the branch switch
        let below = normal_sf(8.0 - 1e-9).ln();
        let above = log_normal_sf(8.0);
        assert!((below - above).abs() < 1e-8);
    }

    #[test]
    fn incomplete_gamma_against_closed_forms() {
        for &x in &[0.01, 0.5, 1.0, 3.0, 10.0, 40.0] {
            let p = reg_lower_gamma(1.0, x).unwrap();
            assert!((p - (1.0 - (-x).exp())).abs() < 1e-13, "x={x}");
        }
        let x = 2.0 * 2f64.ln();
        assert!((chi2_cdf(2.0, x).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(reg_lower_gamma(3.0, 0.0).unwrap(), 0.0);
        assert!(reg_lower_gamma(0.0, 1.0).is_err());
    }

    #[test]
    fn incomplete_gamma_against_statrs() {
        for &a in &[0.5, 1.5, 5.0, 10.0, 50.0] {
            for &x in &[0.1, 1.0, 4.0, 9.0, 30.0, 80.0] {
                let ours = reg_lower_gamma(a, x).unwrap();
                let theirs = statrs::function::gamma::gamma_lr(a, x);
                assert!((ours - theirs).abs() < 1e-12, "a={a} x={x}: {ours} vs {theirs}");
            }
        }
    }

    #[test]
    fn log_add_exp_cases() {
        assert!((log_add_exp(0.0, 0.0) - LN_2).abs() < 1e-15);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, -3.0), -3.0);
        assert!((log_add_exp(-1000.0, -1001.0) - (-1000.0 + (-1f64).exp().ln_1p())).abs() < 1e-12);
    }
}

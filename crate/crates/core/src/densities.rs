//! Log densities of eigenvalue laws and matrix laws for Wishart and Wigner
//! blocks, with the normalizing constants in log space.
//!
//! Constants that differ by huge cancelling terms at large `n` are related
//! through [`log_constant_gap`], which is computed from Stirling remainders
//! rather than by subtracting log-gamma values.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::linalg::SymMatrix;
use crate::special::{chi2_log_pdf, ln_gamma, ln_gamma_remainder, normal_log_pdf};

/// `ln Γ_m(a) = m(m − 1)/4 · ln π + Σ_{j=1}^{m} ln Γ(a − (j − 1)/2)`.
pub fn log_multivariate_gamma(m: usize, a: f64) -> Result<f64> {
    ensure!(m >= 1, Input, "m must be at least 1");
    let floor = (m as f64 - 1.0) / 2.0;
    ensure!(a > floor, Domain, "multivariate gamma needs a > (m - 1)/2 = {floor}, got {a}");
    let mf = m as f64;
    let sum: f64 = (1..=m).map(|j| ln_gamma(a - (j as f64 - 1.0) / 2.0)).sum();
    Ok(mf * (mf - 1.0) / 4.0 * PI.ln() + sum)
}

/// Normalizers of the eigenvalue and matrix densities, all natural logs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaConstants {
    /// Ordered Wishart eigenvalue density normalizer `c_{m,n}`.
    pub log_wishart_eig: f64,
    /// Normalizer of the centered-and-scaled Wishart eigenvalue density.
    pub log_shifted_wishart_eig: f64,
    /// Ordered Wigner eigenvalue density normalizer `c_m`.
    pub log_wigner_eig: f64,
    /// Normalizer of the centered-and-scaled Wishart matrix density.
    pub log_shifted_wishart_matrix: f64,
    /// GOE matrix density normalizer `(2π)^{−m(m+1)/4} 2^{−m/2}`.
    pub log_goe_matrix: f64,
}

fn sum_log_gamma_half_ratio(m: usize) -> f64 {
    let lg15 = ln_gamma(1.5);
    (1..=m).map(|j| lg15 - ln_gamma(1.0 + j as f64 / 2.0)).sum()
}

fn ln_factorial(m: usize) -> f64 {
    ln_gamma(m as f64 + 1.0)
}

/// `ln c_{m,n}` for the ordered eigenvalues of an `m×m` Wishart block with
/// `n` degrees of freedom.
pub fn log_wishart_eig_constant(m: usize, n: usize) -> Result<f64> {
    ensure!(m >= 1 && n >= m, Input, "need 1 <= m <= n (got m={m}, n={n})");
    let (mf, nf) = (m as f64, n as f64);
    let gammas: f64 = (1..=m).map(|j| ln_gamma((nf - mf + j as f64) / 2.0)).sum();
    Ok(ln_factorial(m) - nf * mf / 2.0 * LN_2 + sum_log_gamma_half_ratio(m) - gammas)
}

/// `ln c_m` for the ordered eigenvalues of an `m×m` Wigner block.
pub fn log_wigner_eig_constant(m: usize) -> Result<f64> {
    ensure!(m >= 1, Input, "m must be at least 1");
    let mf = m as f64;
    Ok(ln_factorial(m) - mf * LN_2 - mf * (mf - 1.0) / 4.0 * LN_2 - mf / 2.0 * PI.ln()
        + sum_log_gamma_half_ratio(m))
}

/// `ln[(2π)^{−m(m+1)/4} 2^{−m/2}]`.
pub fn log_goe_matrix_constant(m: usize) -> Result<f64> {
    ensure!(m >= 1, Input, "m must be at least 1");
    let mf = m as f64;
    Ok(-mf * (mf + 1.0) / 4.0 * (2.0 * PI).ln() - mf / 2.0 * LN_2)
}

/// The common gap between the shifted-Wishart normalizers and their
/// Gaussian limits:
/// `Σ_{j<m} [−j/2 − (n − j − 1)/2 · ln(1 − j/n) − R((n − j)/2)]`, where `R`
/// is the Stirling remainder of `ln Γ`.
pub fn log_constant_gap(m: usize, n: usize) -> Result<f64> {
    ensure!(m >= 1 && m < n, Input, "need 1 <= m < n (got m={m}, n={n})");
    let nf = n as f64;
    Ok((0..m)
        .map(|j| {
            let jf = j as f64;
            -jf / 2.0 - (nf - jf - 1.0) / 2.0 * (-jf / nf).ln_1p() - ln_gamma_remainder((nf - jf) / 2.0)
        })
        .sum())
}

pub fn gamma_constants(m: usize, n: usize) -> Result<GammaConstants> {
    ensure!(m >= 1 && m < n, Input, "need 1 <= m < n (got m={m}, n={n})");
    let gap = log_constant_gap(m, n)?;
    let log_wigner_eig = log_wigner_eig_constant(m)?;
    let log_goe_matrix = log_goe_matrix_constant(m)?;
    Ok(GammaConstants {
        log_wishart_eig: log_wishart_eig_constant(m, n)?,
        log_shifted_wishart_eig: log_wigner_eig + gap,
        log_wigner_eig,
        log_shifted_wishart_matrix: log_goe_matrix + gap,
        log_goe_matrix,
    })
}

enum Order {
    Strict,
    Tied,
}

fn check_descending(v: &[f64]) -> Result<Order> {
    ensure!(!v.is_empty(), Input, "eigenvalue vector is empty");
    ensure!(v.iter().all(|x| x.is_finite()), Input, "eigenvalue vector has non-finite entries");
    let mut tied = false;
    for w in v.windows(2) {
        ensure!(w[0] >= w[1], Domain, "eigenvalues must be in descending order");
        tied |= w[0] == w[1];
    }
    Ok(if tied { Order::Tied } else { Order::Strict })
}

fn log_vandermonde(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in 0..i {
            s += (v[j] - v[i]).ln();
        }
    }
    s
}

/// Joint density of the ordered eigenvalues of an `m×m` Wigner block
/// (off-diagonal variance 1, diagonal variance 2):
/// `c_m exp(−Σλ²/4) Π_{j<i}(λ_j − λ_i)`.
///
/// Ties give `−∞`; an increasing pair is a domain error.
pub fn log_wigner_eig_density(lambda: &[f64]) -> Result<f64> {
    if let Order::Tied = check_descending(lambda)? {
        return Ok(f64::NEG_INFINITY);
    }
    let c = log_wigner_eig_constant(lambda.len())?;
    let sq: f64 = lambda.iter().map(|x| x * x).sum();
    Ok(c - sq / 4.0 + log_vandermonde(lambda))
}

/// Joint density of the ordered eigenvalues of an `m×m` Wishart block with
/// `n` degrees of freedom. Points outside `μ_1 > … > μ_m > 0` give `−∞`.
pub fn log_wishart_eig_density(mu: &[f64], n: usize) -> Result<f64> {
    let m = mu.len();
    ensure!(m >= 1, Input, "eigenvalue vector is empty");
    let c = log_wishart_eig_constant(m, n)?;
    ensure!(mu.iter().all(|x| x.is_finite()), Input, "eigenvalue vector has non-finite entries");
    if mu.windows(2).any(|w| w[0] <= w[1]) || mu[m - 1] <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let power = (n as f64 - m as f64 + 1.0) / 2.0 - 1.0;
    let (sum, sum_log) = mu.iter().fold((0.0, 0.0), |(s, l), &x| (s + x, l + x.ln()));
    Ok(c - sum / 2.0 + power * sum_log + log_vandermonde(mu))
}

/// `ln(1 + x) − x + x²/2`, accurate for small `x`.
fn log1p_minus_quadratic(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let mut term = x * x * x;
        let mut sum = 0.0;
        for k in 3..40 {
            let t = term / k as f64;
            sum += t;
            if t.abs() < 1e-18 * sum.abs() {
                break;
            }
            term *= -x;
        }
        sum
    } else {
        x.ln_1p() - x + 0.5 * x * x
    }
}

/// `ln g − ln f̃` for a valid, strictly descending `v` with `v_m > −√n`.
fn shifted_log_ratio(v: &[f64], n: usize) -> Result<f64> {
    let m = v.len();
    let nf = n as f64;
    let sqrt_n = nf.sqrt();
    let gap = log_constant_gap(m, n)?;
    let body: f64 = v
        .iter()
        .map(|&vi| {
            let x = vi / sqrt_n;
            nf / 2.0 * log1p_minus_quadratic(x) - (m as f64 + 1.0) / 2.0 * x.ln_1p()
        })
        .sum();
    Ok(gap + body)
}

/// Density of `(μ − n)/√n` where `μ` are the ordered Wishart eigenvalues:
/// `g(v) = n^{m/2} f(n + √n v)`.
///
/// Ties and `v_m <= −√n` give `−∞`; an increasing pair is a domain error.
pub fn log_shifted_wishart_eig_density(v: &[f64], n: usize) -> Result<f64> {
    let m = v.len();
    ensure!(m >= 1 && m < n, Input, "need 1 <= m < n (got m={m}, n={n})");
    if let Order::Tied = check_descending(v)? {
        return Ok(f64::NEG_INFINITY);
    }
    if v[m - 1] <= -(n as f64).sqrt() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(log_wigner_eig_density(v)? + shifted_log_ratio(v, n)?)
}

/// `ln g(v) − ln f̃(v)` on `‖v‖_∞ <= (2/3)√n`, `v` strictly descending.
pub fn log_eig_density_ratio(v: &[f64], n: usize) -> Result<f64> {
    let m = v.len();
    ensure!(m >= 1 && m < n, Input, "need 1 <= m < n (got m={m}, n={n})");
    if let Order::Tied = check_descending(v)? {
        return Err(Error::Domain("eigenvalues must be strictly descending".into()));
    }
    let radius = 2.0 / 3.0 * (n as f64).sqrt();
    let sup = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    ensure!(sup <= radius, Domain, "need max |v_i| <= (2/3) sqrt(n) = {radius}, got {sup}");
    shifted_log_ratio(v, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixDensities {
    pub wishart_shifted: f64,
    pub goe: f64,
    pub ratio: f64,
}

/// Log densities at a symmetric `w` of `(W − nI)/√n` for an `m×m` Wishart
/// block and of an `m×m` GOE block with `N(0, 2)` diagonal and `N(0, 1)`
/// off-diagonal entries. Outside `√n w + nI ≻ 0` the Wishart value is `−∞`.
pub fn log_matrix_densities(w: &SymMatrix, n: usize) -> Result<MatrixDensities> {
    let m = w.dim();
    ensure!(w.is_finite(), Input, "matrix has non-finite entries");
    let gap = log_constant_gap(m, n)?;
    let log_b = log_goe_matrix_constant(m)?;
    let nf = n as f64;
    let sqrt_n = nf.sqrt();
    let fro = w.frobenius_norm();
    let goe = log_b - fro * fro / 4.0;
    let scaled = SymMatrix::from_fn(m, |i, j| if i == j { 1.0 } else { 0.0 } + w.get(i, j) / sqrt_n)?;
    let wishart_shifted = match scaled.log_det_psd() {
        Ok(logdet) => log_b + gap + (nf - m as f64 - 1.0) / 2.0 * logdet - sqrt_n / 2.0 * w.trace(),
        Err(Error::Domain(_)) => f64::NEG_INFINITY,
        Err(e) => return Err(e),
    };
    Ok(MatrixDensities {
        wishart_shifted,
        goe,
        ratio: wishart_shifted - goe,
    })
}

/// One row of the density oracle table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestRow {
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SelftestRow {
    fn new(check: &str, residual: f64, tolerance: f64) -> Self {
        SelftestRow {
            check: check.to_string(),
            residual,
            tolerance,
            pass: residual.abs() < tolerance,
        }
    }
}

/// Composite Simpson weights on `k` intervals (`k` even).
fn simpson_weights(k: usize, h: f64) -> Vec<f64> {
    (0..=k)
        .map(|i| {
            let w = if i == 0 || i == k {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// Integrates a two-eigenvalue density over `λ_1 > λ_2` in rotated
/// coordinates `s = (λ_1 + λ_2)/√2`, `d = (λ_1 − λ_2)/√2 >= 0`.
pub fn integrate_pair_density(
    log_density: impl Fn(&[f64]) -> Result<f64>,
    s_range: (f64, f64),
    d_max: f64,
    steps: usize,
) -> Result<f64> {
    let steps = steps + steps % 2;
    let hs = (s_range.1 - s_range.0) / steps as f64;
    let hd = d_max / steps as f64;
    let ws = simpson_weights(steps, hs);
    let wd = simpson_weights(steps, hd);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut total = 0.0;
    for (i, wsi) in ws.iter().enumerate() {
        let s = s_range.0 + i as f64 * hs;
        let mut inner = 0.0;
        for (j, wdj) in wd.iter().enumerate() {
            let d = j as f64 * hd;
            let pair = [(s + d) * r, (s - d) * r];
            let lp = log_density(&pair)?;
            if lp > f64::NEG_INFINITY {
                inner += wdj * lp.exp();
            }
        }
        total += wsi * inner;
    }
    Ok(total)
}

/// Residuals of the density oracles: one-dimensional reductions,
/// normalization integrals, the Jacobian identity and the constant gaps.
pub fn density_selftest() -> Result<Vec<SelftestRow>> {
    let mut rows = Vec::new();

    let mut worst: f64 = 0.0;
    for &n in &[1usize, 2, 5, 30, 200] {
        for &x in &[0.3, 1.0, 2.0, 7.5, 40.0] {
            let r = log_wishart_eig_density(&[x], n)? - chi2_log_pdf(n as f64, x);
            worst = worst.max(r.abs());
        }
    }
    rows.push(SelftestRow::new("wishart_eig_m1_vs_chi2", worst, 1e-10));

    let mut worst: f64 = 0.0;
    for i in -20..=20 {
        let x = 0.3 * i as f64;
        worst = worst.max((log_wigner_eig_density(&[x])? - normal_log_pdf(x, 2.0)).abs());
    }
    rows.push(SelftestRow::new("wigner_eig_m1_vs_normal_var2", worst, 1e-10));

    let mut worst: f64 = 0.0;
    for i in -20..=20 {
        let x = 0.3 * i as f64;
        let w = SymMatrix::from_rows(&[[x]])?;
        worst = worst.max((log_matrix_densities(&w, 10)?.goe - normal_log_pdf(x, 2.0)).abs());
    }
    rows.push(SelftestRow::new("goe_m1_vs_normal_var2", worst, 1e-10));

    let mass = integrate_pair_density(log_wigner_eig_density, (-14.0, 14.0), 14.0, 400)?;
    rows.push(SelftestRow::new("wigner_eig_m2_mass", mass - 1.0, 1e-3));

    let mass = integrate_pair_density(|mu| log_wishart_eig_density(mu, 50), (0.0, 300.0), 300.0, 600)?;
    rows.push(SelftestRow::new("wishart_eig_m2_n50_mass", mass - 1.0, 5e-3));

    let mut worst: f64 = 0.0;
    for &(n, ref v) in &[
        (10usize, vec![1.3, -0.4]),
        (20, vec![2.0, 0.5, -1.5]),
        (50, vec![0.9, 0.1, -0.2, -2.2]),
        (50, vec![3.0]),
    ] {
        let sqrt_n = (n as f64).sqrt();
        let mu: Vec<f64> = v.iter().map(|x| n as f64 + sqrt_n * x).collect();
        let direct = v.len() as f64 / 2.0 * (n as f64).ln() + log_wishart_eig_density(&mu, n)?;
        worst = worst.max((log_shifted_wishart_eig_density(v, n)? - direct).abs());
    }
    rows.push(SelftestRow::new("shifted_wishart_jacobian", worst, 1e-12));

    let c1 = log_wigner_eig_constant(1)?;
    rows.push(SelftestRow::new("wigner_constant_m1", c1 - normal_log_pdf(0.0, 2.0), 1e-12));
    rows.push(SelftestRow::new(
        "goe_constant_m1",
        log_goe_matrix_constant(1)? - normal_log_pdf(0.0, 2.0),
        1e-12,
    ));

    for m in 1..=3 {
        let gaps: Vec<f64> = [100usize, 1000, 10_000, 100_000, 1_000_000]
            .iter()
            .map(|&n| log_constant_gap(m, n).map(f64::abs))
            .collect::<Result<_>>()?;
        let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
        let row = SelftestRow {
            check: format!("constant_gap_decreasing_m{m}"),
            residual: gaps[gaps.len() - 1],
            tolerance: 1e-3,
            pass: decreasing && gaps[gaps.len() - 1] < 1e-3,
        };
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn multivariate_gamma_values() {
        assert!(close(log_multivariate_gamma(1, 0.5).unwrap(), 0.572_365, 1e-6));
        assert!(close(log_multivariate_gamma(2, 1.5).unwrap(), 0.451_583, 1e-6));
        for &a in &[0.1, 1.0, 3.7, 50.0] {
            assert_eq!(log_multivariate_gamma(1, a).unwrap(), ln_gamma(a));
        }
        assert!(matches!(log_multivariate_gamma(3, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn constants_at_m1() {
        let g = gamma_constants(1, 10).unwrap();
        assert!(close(g.log_wigner_eig, -1.265_512, 1e-6));
        assert!(close(g.log_goe_matrix, -1.265_512, 1e-6));
        assert!(close(g.log_wigner_eig, -(2.0 * PI.sqrt()).ln(), 1e-14));
        assert!(close(g.log_wishart_eig, -5.0 * LN_2 - ln_gamma(5.0), 1e-13));
        assert!(gamma_constants(3, 3).is_err());
    }

    #[test]
    fn goe_constant_m2_matches_entrywise_product() {
        // w11, w22 ~ N(0, 2), w12 ~ N(0, 1)
        let direct = 2.0 * normal_log_pdf(0.0, 2.0) + normal_log_pdf(0.0, 1.0);
        assert!(close(log_goe_matrix_constant(2).unwrap(), direct, 1e-14));
    }

    fn direct_shifted_eig_constant(m: usize, n: usize) -> f64 {
        let (mf, nf) = (m as f64, n as f64);
        let e = mf / 2.0 + mf * (nf - mf + 1.0) / 2.0 - mf + mf * (mf - 1.0) / 4.0;
        e * nf.ln() - nf * mf / 2.0 + log_wishart_eig_constant(m, n).unwrap()
    }

    fn direct_shifted_matrix_constant(m: usize, n: usize) -> f64 {
        let (mf, nf) = (m as f64, n as f64);
        (mf * (mf + 1.0) / 4.0 + mf * (nf - mf - 1.0) / 2.0) * nf.ln()
            - nf * mf / 2.0
            - nf * mf / 2.0 * LN_2
            - log_multivariate_gamma(m, nf / 2.0).unwrap()
    }

    #[test]
    fn stable_gap_matches_direct_constants() {
        for m in 1..=4 {
            for &n in &[5usize, 12, 40, 150, 1000] {
                if m >= n {
                    continue;
                }
                let g = gamma_constants(m, n).unwrap();
                let scale = 1e-12 * (n as f64) * (n as f64).ln().max(1.0);
                let c = direct_shifted_eig_constant(m, n);
                assert!(close(g.log_shifted_wishart_eig, c, scale), "m={m} n={n}");
                let a = direct_shifted_matrix_constant(m, n);
                assert!(close(g.log_shifted_wishart_matrix, a, scale), "m={m} n={n}");
            }
        }
    }

    #[test]
    fn constant_gap_trend() {
        for m in 1..=3 {
            let gaps: Vec<f64> = [100usize, 1000, 10_000, 100_000, 1_000_000]
                .iter()
                .map(|&n| log_constant_gap(m, n).unwrap().abs())
                .collect();
            assert!(gaps.windows(2).all(|w| w[1] < w[0]), "m={m}: {gaps:?}");
        }
        assert!(log_constant_gap(2, 1_000_000).unwrap().abs() < 0.005);
    }

    #[test]
    fn eigen_densities_m1() {
        assert!(close(log_wigner_eig_density(&[0.0]).unwrap(), -1.265_512, 1e-6));
        assert!(close(log_wigner_eig_density(&[2.0]).unwrap(), -2.265_512, 1e-6));
        assert!(close(log_wishart_eig_density(&[2.0], 2).unwrap(), -1.693_147, 1e-6));
        for &n in &[1usize, 3, 10, 77] {
            for &x in &[0.1, 1.0, 9.0, 100.0] {
                let r = log_wishart_eig_density(&[x], n).unwrap() - chi2_log_pdf(n as f64, x);
                assert!(r.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn support_and_order() {
        assert_eq!(log_wishart_eig_density(&[2.0, 2.0], 5).unwrap(), f64::NEG_INFINITY);
        assert_eq!(log_wishart_eig_density(&[2.0, -1.0], 5).unwrap(), f64::NEG_INFINITY);
        assert_eq!(log_wigner_eig_density(&[1.0, 1.0]).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(log_wigner_eig_density(&[0.0, 1.0]), Err(Error::Domain(_))));
        assert_eq!(log_shifted_wishart_eig_density(&[1.0, -10.0], 100).unwrap(), f64::NEG_INFINITY);
        assert!(log_eig_density_ratio(&[-1.0, 1.0], 100).is_err());
        assert!(log_eig_density_ratio(&[7.0, 1.0], 100).is_err());
    }

    #[test]
    fn jacobian_identity() {
        for &(n, ref v) in &[(8usize, vec![0.7]), (30, vec![1.0, -1.0]), (45, vec![2.1, 0.3, -0.8])] {
            let sqrt_n = (n as f64).sqrt();
            let mu: Vec<f64> = v.iter().map(|x| n as f64 + sqrt_n * x).collect();
            let direct = v.len() as f64 / 2.0 * (n as f64).ln() + log_wishart_eig_density(&mu, n).unwrap();
            let shifted = log_shifted_wishart_eig_density(v, n).unwrap();
            assert!((shifted - direct).abs() < 1e-12, "{}", shifted - direct);
        }
    }

    #[test]
    fn shifted_density_limits() {
        let g = log_shifted_wishart_eig_density(&[0.0], 10_000).unwrap();
        assert!((g - log_wigner_eig_density(&[0.0]).unwrap()).abs() < 0.01);
        let r = log_eig_density_ratio(&[1.0, -1.0], 10_000).unwrap();
        assert!(r.abs() < 0.05);
        let ratios: Vec<f64> = [100usize, 10_000, 1_000_000]
            .iter()
            .map(|&n| log_eig_density_ratio(&[0.0], n).unwrap().abs())
            .collect();
        assert!(ratios[1] < ratios[0] && ratios[2] < ratios[1]);
        let a = log_eig_density_ratio(&[1.0, -1.0], 100).unwrap().abs();
        let b = log_eig_density_ratio(&[1.0, -1.0], 1_000_000).unwrap().abs();
        assert!(b < a);
    }

    #[test]
    fn matrix_densities() {
        let zero1 = SymMatrix::from_rows(&[[0.0]]).unwrap();
        let d = log_matrix_densities(&zero1, 1_000_000).unwrap();
        assert!((d.wishart_shifted - (-1.265_512)).abs() < 0.01);
        let zero2 = SymMatrix::from_rows(&[[0.0, 0.0], [0.0, 0.0]]).unwrap();
        let d = log_matrix_densities(&zero2, 100).unwrap();
        assert_eq!(d.goe, log_goe_matrix_constant(2).unwrap());
        let bad = SymMatrix::from_rows(&[[-20.0]]).unwrap();
        assert_eq!(log_matrix_densities(&bad, 100).unwrap().wishart_shifted, f64::NEG_INFINITY);
        // m = 1 shifted Wishart matrix density is the standardized chi-square density.
        for &x in &[-2.0, 0.0, 1.5] {
            let n = 40usize;
            let w = SymMatrix::from_rows(&[[x]]).unwrap();
            let sqrt_n = (n as f64).sqrt();
            let expect = 0.5 * (n as f64).ln() + chi2_log_pdf(n as f64, n as f64 + sqrt_n * x);
            assert!(close(log_matrix_densities(&w, n).unwrap().wishart_shifted, expect, 1e-11));
        }
    }

    #[test]
    fn selftest_passes() {
        for row in density_selftest().unwrap() {
            assert!(row.pass, "{row:?}");
        }
    }
}

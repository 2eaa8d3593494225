//! Restricted isometry constants of Gaussian sensing matrices, computed
//! exactly from extreme eigenvalues of principal minors of `XᵀX` and
//! predicted from the asymptotic scaling.

use serde::{Deserialize, Serialize};

use crate::asymptotics::b_star;
use crate::ensembles::sample_gaussian_matrix;
use crate::error::{ensure, Error, Result};
use crate::linalg::Matrix;
use crate::minors::{max_minor_lambda1, min_minor_lambdam, Strategy};
use crate::rng::RngStream;

/// `n×p` matrix with i.i.d. `N(0, 1/n)` entries.
pub fn sample_sensing_matrix(n: usize, p: usize, rng: &mut RngStream) -> Result<Matrix> {
    let sqrt_n = (n as f64).sqrt();
    Ok(sample_gaussian_matrix(n, p, rng)?.map(|x| x / sqrt_n))
}

/// Sparsity level `t·k`, which must be a positive integer.
pub fn sparsity_level(k: usize, t: f64) -> Result<usize> {
    ensure!(k >= 1, Input, "k must be at least 1");
    ensure!(t > 0.0 && t.is_finite(), Input, "t must be positive, got {t}");
    let tk = t * k as f64;
    let m = tk.round();
    ensure!(
        (tk - m).abs() <= 1e-9 * tk.max(1.0) && m >= 1.0,
        Input,
        "t*k = {tk} is not a positive integer"
    );
    Ok(m as usize)
}

/// Predicted deviation `2√(m ln p / n)` of both extreme eigenvalues from 1.
pub fn predicted_delta(n: f64, p: f64, m: usize) -> Result<f64> {
    ensure!(n >= 2.0 && p >= 2.0, Input, "need n >= 2 and p >= 2");
    ensure!(m >= 1 && m as f64 <= p, Input, "need 1 <= m <= p");
    Ok(2.0 * (m as f64 * p.ln() / n).sqrt())
}

/// `δ < b*(t)`, the sufficient condition for exact sparse recovery.
pub fn check_recovery_condition(delta: f64, t: f64) -> Result<bool> {
    ensure!(delta >= 0.0, Input, "delta must be nonnegative, got {delta}");
    Ok(delta < b_star(t)?)
}

/// Smallest `n` whose predicted deviation is at most `(1 − margin) b*(t)`:
/// `⌈4 t k ln p / ((1 − margin)² b*(t)²)⌉`.
pub fn design_min_n(p: f64, k: usize, t: f64, margin: f64) -> Result<u64> {
    ensure!(p >= 2.0, Input, "need p >= 2");
    ensure!((0.0..1.0).contains(&margin), Input, "margin must lie in [0, 1), got {margin}");
    let m = sparsity_level(k, t)?;
    let b = b_star(t)?;
    let target = (1.0 - margin) * b;
    let raw = 4.0 * m as f64 * p.ln() / (target * target);
    // absorb rounding in the quotient so exact integers are not pushed up
    Ok((raw * (1.0 - 1e-12)).ceil().max(1.0) as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipReport {
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub t: f64,
    pub m: usize,
    pub delta_exact: Option<f64>,
    pub lambda_max_k: f64,
    pub lambda_min_k: f64,
    pub delta_predicted: f64,
    pub b_star_t: f64,
    pub recovery_pass: bool,
}

/// Exact `δ_{tk}` of `X`: the extreme eigenvalues of size-`tk` principal
/// minors of `XᵀX`, searched with an exact strategy.
pub fn exact_rip_constant(x: &Matrix, k: usize, t: f64, strategy: Strategy) -> Result<RipReport> {
    ensure!(strategy != Strategy::Greedy, Input, "exact RIP needs enumerate or branch_and_bound");
    let (n, p) = (x.rows(), x.cols());
    let m = sparsity_level(k, t)?;
    ensure!(m <= p, Input, "t*k = {m} exceeds p = {p}");
    let w = x.gram();
    let search = |f: fn(&crate::SymMatrix, usize, Strategy) -> Result<crate::SubsetExtremeResult>| {
        f(&w, m, strategy).map_err(|e| match e {
            Error::Capacity(msg) => Error::Capacity(format!(
                "{msg}; use sampled_rip_lower_bound for a lower bound on delta"
            )),
            other => other,
        })
    };
    let hi = search(max_minor_lambda1)?.value;
    let lo = search(min_minor_lambdam)?.value;
    let delta = (hi - 1.0).max(1.0 - lo);
    let b = b_star(t)?;
    Ok(RipReport {
        n,
        p,
        k,
        t,
        m,
        delta_exact: Some(delta),
        lambda_max_k: hi,
        lambda_min_k: lo,
        delta_predicted: predicted_delta(n as f64, p as f64, m).unwrap_or(f64::NAN),
        b_star_t: b,
        recovery_pass: delta < b,
    })
}

/// Lower bound on `δ_{tk}` from greedy searches, for sizes beyond exact
/// capacity. `delta_exact` is absent and the verdict uses the prediction.
pub fn sampled_rip_lower_bound(x: &Matrix, k: usize, t: f64) -> Result<(RipReport, f64)> {
    let (n, p) = (x.rows(), x.cols());
    let m = sparsity_level(k, t)?;
    ensure!(m <= p, Input, "t*k = {m} exceeds p = {p}");
    let w = x.gram();
    let hi = max_minor_lambda1(&w, m, Strategy::Greedy)?.value;
    let lo = min_minor_lambdam(&w, m, Strategy::Greedy)?.value;
    let lower = (hi - 1.0).max(1.0 - lo);
    let b = b_star(t)?;
    let predicted = predicted_delta(n as f64, p as f64, m)?;
    let report = RipReport {
        n,
        p,
        k,
        t,
        m,
        delta_exact: None,
        lambda_max_k: hi,
        lambda_min_k: lo,
        delta_predicted: predicted,
        b_star_t: b,
        recovery_pass: predicted < b,
    };
    Ok((report, lower))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isometry_has_zero_delta() {
        let x = Matrix::from_row_major(3, 3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        for k in 1..=3 {
            let r = exact_rip_constant(&x, k, 1.0, Strategy::Enumerate).unwrap();
            assert_eq!(r.delta_exact, Some(0.0));
        }
    }

    #[test]
    fn two_by_two_delta() {
        // columns with unit norm and inner product 0.5
        let c = (0.75f64).sqrt();
        let x = Matrix::from_row_major(2, 2, vec![1.0, 0.5, 0.0, c]).unwrap();
        let r = exact_rip_constant(&x, 2, 1.0, Strategy::BranchAndBound).unwrap();
        assert!((r.delta_exact.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.lambda_max_k - 1.5).abs() < 1e-12);
        assert!((r.lambda_min_k - 0.5).abs() < 1e-12);
    }

    #[test]
    fn predicted_values() {
        assert!((predicted_delta(400.0, 100.0, 8).unwrap() - 0.606_98).abs() < 1e-5);
        assert!((predicted_delta(60.0, 20.0, 4).unwrap() - 0.893_79).abs() < 1e-5);
        let p = std::f64::consts::E;
        assert!((predicted_delta(16.0, p, 2).unwrap() - 1.0f64 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(predicted_delta(4.0, 2f64.exp(), 2).unwrap(), 2.0);
        assert!(predicted_delta(1.0, 10.0, 1).is_err());
    }

    #[test]
    fn recovery_condition() {
        assert!(check_recovery_condition(0.5, 2.0).unwrap());
        assert!(!check_recovery_condition(0.71, 2.0).unwrap());
        assert!(check_recovery_condition(0.0, 0.3).unwrap());
        assert!(!check_recovery_condition(1.0 / 3.0, 1.0).unwrap());
    }

    #[test]
    fn design_values() {
        assert_eq!(design_min_n(1000.0, 5, 2.0, 0.0).unwrap(), 553);
        assert_eq!(design_min_n(std::f64::consts::E, 1, 1.0, 0.0).unwrap(), 36);
        let a = design_min_n(1000.0, 5, 2.0, 0.0).unwrap() as f64;
        let b = design_min_n(1000.0, 5, 2.0, 0.5).unwrap() as f64;
        assert!((b / a - 4.0).abs() < 0.01);
        assert!(design_min_n(1000.0, 2, 1.5, 0.0).is_ok());
        assert!(design_min_n(1000.0, 3, 1.3, 0.0).is_err());
    }

    #[test]
    fn sensing_matrix_scaling() {
        let mut a = RngStream::from_seed(5);
        let mut b = RngStream::from_seed(5);
        let x = sample_sensing_matrix(7, 3, &mut a).unwrap();
        let g = sample_gaussian_matrix(7, 3, &mut b).unwrap();
        let s = 7f64.sqrt();
        for (u, v) in x.as_slice().iter().zip(g.as_slice()) {
            assert_eq!(*u, v / s);
        }
        let mut a = RngStream::from_seed(9);
        let mut b = RngStream::from_seed(9);
        let one = sample_sensing_matrix(1, 1, &mut a).unwrap();
        assert_eq!(one.get(0, 0), b.next_normal());
    }

    #[test]
    fn non_integer_sparsity_rejected() {
        let x = Matrix::from_row_major(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(exact_rip_constant(&x, 1, 1.5, Strategy::Enumerate), Err(Error::Input(_))));
    }
}

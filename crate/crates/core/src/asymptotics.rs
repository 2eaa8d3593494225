//! Closed-form centerings, rate functions, tail bounds and the counting
//! inequalities behind the extreme-eigenvalue limits.
//!
//! Bounds are evaluated in log space. Unspecified absolute constants
//! (`kappa`) are explicit parameters defaulting to [`DEFAULT_KAPPA`].

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::minors::Mode;
use crate::special::{log_add_exp, log_normal_sf, log_normal_sf_asymptotic, ln_gamma};

pub const DEFAULT_KAPPA: f64 = 3.0;

/// Free constants of the tail bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundParams {
    pub kappa: f64,
    pub r: f64,
    pub d_or_delta: f64,
}

impl Default for TailBoundParams {
    fn default() -> Self {
        TailBoundParams {
            kappa: DEFAULT_KAPPA,
            r: 1.0,
            d_or_delta: 0.25,
        }
    }
}

/// Cramér rate of the mean of `χ²₁` variables: `(s − 1 − ln s) / 2`,
/// `+∞` for `s <= 0`.
pub fn rate_i(s: f64) -> f64 {
    if s <= 0.0 {
        f64::INFINITY
    } else {
        0.5 * (s - 1.0 - s.ln())
    }
}

/// Sharp restricted-isometry threshold.
pub fn b_star(t: f64) -> Result<f64> {
    ensure!(t > 0.0 && t.is_finite(), Input, "b_star needs t > 0, got {t}");
    Ok(if t < 4.0 / 3.0 {
        t / (4.0 - t)
    } else {
        ((t - 1.0) / t).sqrt()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "ensemble", rename_all = "lowercase")]
pub enum PredictSpec {
    Wishart { n: usize, m: usize, p: usize, side: Mode },
    Wigner { m: usize, p: usize, eta: f64, side: Mode },
}

/// First-order location of the max (or min) extreme eigenvalue over
/// size-`m` principal minors.
///
/// Wishart: `n ± 2√(n m ln p)`. Wigner: `±√((4(m − 1) + 2η) ln p)`.
pub fn predict_extreme(spec: PredictSpec) -> Result<f64> {
    match spec {
        PredictSpec::Wishart { n, m, p, side } => {
            ensure!(p >= 2 && m >= 1 && n >= 1, Input, "need p >= 2, m >= 1, n >= 1");
            let shift = 2.0 * (n as f64 * m as f64 * (p as f64).ln()).sqrt();
            Ok(match side {
                Mode::Max => n as f64 + shift,
                Mode::Min => n as f64 - shift,
            })
        }
        PredictSpec::Wigner { m, p, eta, side } => {
            ensure!(p >= 2 && m >= 1, Input, "need p >= 2 and m >= 1");
            ensure!((0.0..=2.0).contains(&eta), Input, "eta must lie in [0, 2], got {eta}");
            let level = ((4.0 * (m as f64 - 1.0) + 2.0 * eta) * (p as f64).ln()).sqrt();
            Ok(match side {
                Mode::Max => level,
                Mode::Min => -level,
            })
        }
    }
}

/// `ε = t / √(4 m ln p)` and `τ = (1 − ε) √(4 ln p / m)`.
pub fn epsilon_tau(m: usize, p: f64, t: f64) -> Result<(f64, f64)> {
    ensure!(m >= 1, Input, "m must be at least 1");
    ensure!(p >= 3.0, Input, "p must be at least 3, got {p}");
    ensure!(t >= 0.0, Input, "t must be nonnegative, got {t}");
    let lp = p.ln();
    let eps = t / (4.0 * m as f64 * lp).sqrt();
    let tau = (1.0 - eps) * (4.0 * lp / m as f64).sqrt();
    Ok((eps, tau))
}

/// Log of the Wigner minor tail bound
/// `P(λ₁ >= x or λ_m <= −x) <= exp(−x²/4 + κ m ln x)`, valid for
/// `x > 4√m`, `m >= 2`.
pub fn wigner_lambda1_tail_bound(x: f64, m: usize, kappa: f64) -> Result<f64> {
    ensure!(m >= 2, Domain, "the Wigner tail bound needs m >= 2");
    ensure!(kappa > 0.0, Domain, "kappa must be positive");
    let floor = 4.0 * (m as f64).sqrt();
    ensure!(x > floor, Domain, "the Wigner tail bound needs x > 4*sqrt(m) = {floor}, got {x}");
    Ok(-x * x / 4.0 + kappa * m as f64 * x.ln())
}

/// Union bound over all `p^m` minors for the event
/// `T̃ >= 2√(m ln p) + t`, in log space (not clamped).
pub fn wigner_union_log_bound(t: f64, m: usize, p: usize, kappa: f64) -> Result<f64> {
    ensure!(p >= 2, Domain, "p must be at least 2");
    let lp = (p as f64).ln();
    let x = 2.0 * (m as f64 * lp).sqrt() + t;
    Ok(m as f64 * lp + wigner_lambda1_tail_bound(x, m, kappa)?)
}

/// Moderate-deviation bound for `λ₁` of an `m×m` generalized Wigner block:
/// `(m^1.5 ln m / δ^m) exp(−(x − 2rδ)² / (2(η − 2)/m + 4)) + 2 exp(−r²/8)`.
pub fn mdp_eta_tail_bound(x: f64, m: usize, eta: f64, r: f64, delta: f64) -> Result<f64> {
    ensure!(m >= 2, Domain, "the bound needs m >= 2");
    ensure!((0.0..=2.0).contains(&eta), Domain, "eta must lie in [0, 2]");
    ensure!(r >= 4.0 * m as f64, Domain, "the bound needs r >= 4m");
    ensure!(delta > 0.0 && delta < 1.0, Domain, "delta must lie in (0, 1)");
    ensure!(x > 2.0 * r * delta + 1.0, Domain, "the bound needs x > 2 r delta + 1");
    let mf = m as f64;
    let log_prefactor = 1.5 * mf.ln() + mf.ln().ln() - mf * delta.ln();
    let denom = 2.0 * (eta - 2.0) / mf + 4.0;
    let main = log_prefactor - (x - 2.0 * r * delta).powi(2) / denom;
    let tail = 2f64.ln() - r * r / 8.0;
    Ok(log_add_exp(main, tail).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdpOptimum {
    pub r: f64,
    pub delta: f64,
    pub value: f64,
}

/// Minimizes [`mdp_eta_tail_bound`] over `r = 4m·2^j` (`j = 0..=10`) and
/// `δ = 2^{-k}` (`k = 1..=20`), skipping pairs outside the valid domain.
pub fn mdp_optimize(x: f64, m: usize, eta: f64) -> Result<MdpOptimum> {
    let mut best: Option<MdpOptimum> = None;
    for j in 0..=10 {
        let r = 4.0 * m as f64 * 2f64.powi(j);
        for k in 1..=20 {
            let delta = 2f64.powi(-k);
            if let Ok(value) = mdp_eta_tail_bound(x, m, eta, r, delta) {
                if best.is_none_or(|b| value < b.value) {
                    best = Some(MdpOptimum { r, delta, value });
                }
            }
        }
    }
    best.ok_or_else(|| {
        crate::error::Error::Domain(format!("no (r, delta) on the grid is valid for x = {x}, m = {m}"))
    })
}

/// Log of the moderate-deviation bound for the top (or bottom) eigenvalue
/// of an `m×m` Wishart block scaled by `n`:
/// `log[2 exp(−n I(1 ± (y − 2dmr)) + κ m ln(1/d)) + 2 exp(−m n I(r))]`.
pub fn wishart_moderate_bound(
    y: f64,
    n: usize,
    m: usize,
    r: f64,
    d: f64,
    kappa: f64,
    side: Mode,
) -> Result<f64> {
    ensure!(r >= 1.0, Domain, "the bound needs r >= 1");
    ensure!(d > 0.0 && d < 0.5, Domain, "the bound needs 0 < d < 1/2");
    ensure!(kappa > 0.0, Domain, "kappa must be positive");
    let (nf, mf) = (n as f64, m as f64);
    let slack = 2.0 * d * mf * r;
    ensure!(y > slack, Domain, "the bound needs y > 2dmr = {slack}");
    let s = match side {
        Mode::Max => 1.0 + y - slack,
        Mode::Min => 1.0 - y + slack,
    };
    let ln2 = 2f64.ln();
    let rate = rate_i(s);
    let first = if rate.is_infinite() {
        f64::NEG_INFINITY
    } else {
        ln2 - nf * rate + kappa * mf * (1.0 / d).ln()
    };
    let second = ln2 - mf * nf * rate_i(r);
    Ok(log_add_exp(first, second))
}

/// Union bound (log space, unclamped) for `Z_n >= t` (max side) or
/// `Z'_n <= −t` (min side) over all `p^m` Wishart minors, minimizing the
/// moderate bound over a grid of `(r, d)`.
pub fn wishart_union_log_bound(t: f64, n: usize, m: usize, p: usize, kappa: f64, side: Mode) -> Result<f64> {
    ensure!(p >= 2 && n >= 1 && m >= 1, Domain, "need p >= 2, n >= 1, m >= 1");
    let lp = (p as f64).ln();
    let y = (2.0 * (m as f64 * lp).sqrt() + t) / (n as f64).sqrt();
    let mut best = f64::INFINITY;
    for &r in &[1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0] {
        for k in 1..=40 {
            let d = 2f64.powi(-k);
            if let Ok(v) = wishart_moderate_bound(y, n, m, r, d, kappa, side) {
                best = best.min(v);
            }
        }
    }
    ensure!(best.is_finite() || best == f64::NEG_INFINITY, Domain, "no valid (r, d) for y = {y}");
    Ok(m as f64 * lp + best)
}

/// `(exact, asymptotic)` values of `log P(Z > x)`.
pub fn log_phi_bar(x: f64) -> (f64, f64) {
    (log_normal_sf(x), log_normal_sf_asymptotic(x))
}

/// Laurent–Massart lower-tail bound `P(χ²_n − n <= −2√(n x)) <= e^{−x}`.
pub fn chi2_lower_tail_bound(x: f64) -> Result<f64> {
    ensure!(x > 0.0, Domain, "x must be positive, got {x}");
    Ok((-x).exp())
}

/// `ln C(p, m)` with the bracket `m ln p − m ln m <= ln C(p, m) <= m ln p + m − m ln m`.
pub fn log_binomial_with_bounds(p: usize, m: usize) -> Result<(f64, f64, f64)> {
    ensure!(m >= 1 && m <= p, Input, "need 1 <= m <= p (got p={p}, m={m})");
    let (pf, mf) = (p as f64, m as f64);
    let lower = mf * pf.ln() - mf * mf.ln();
    let upper = lower + mf;
    Ok((log_binomial(p, m), lower, upper))
}

/// `ln C(p, m)`: a product of ratios for small `min(m, p − m)`, log-gamma
/// otherwise.
pub fn log_binomial(p: usize, m: usize) -> f64 {
    let k = m.min(p - m);
    if k <= 64 {
        (1..=k).map(|i| ((p - k + i) as f64).ln() - (i as f64).ln()).sum()
    } else {
        ln_gamma(p as f64 + 1.0) - ln_gamma(m as f64 + 1.0) - ln_gamma((p - m) as f64 + 1.0)
    }
}

/// `ln[(p − m)!² / (p! (p − 2m)!)] = Σ_{i<m} ln(1 − m/(p − i))`, always
/// negative when `2m < p`.
pub fn overlap_ratio_log(p: usize, m: usize) -> Result<f64> {
    ensure!(m >= 1 && 2 * m < p, Domain, "need 1 <= m and 2m < p (got p={p}, m={m})");
    Ok((0..m).map(|i| (-(m as f64) / (p - i) as f64).ln_1p()).sum())
}

/// The quantity maximized over the overlap size `l` in the second-moment
/// computation: `(2m − l) − (2m² − l²)(1 − ε)² / m`.
pub fn max_l_objective(m: usize, l: usize, epsilon: f64) -> f64 {
    let (mf, lf) = (m as f64, l as f64);
    (2.0 * mf - lf) - (2.0 * mf * mf - lf * lf) / mf * (1.0 - epsilon).powi(2)
}

/// Maximizer `l* = 1` and value `(2m − 1) − (2m − 1/m)(1 − ε)²`.
pub fn max_l_value(m: usize, epsilon: f64) -> Result<(usize, f64)> {
    ensure!(m >= 2, Input, "need m >= 2");
    ensure!(epsilon > 0.0 && epsilon < 1.0, Input, "need 0 < epsilon < 1");
    let mf = m as f64;
    Ok((1, (2.0 * mf - 1.0) - (2.0 * mf - 1.0 / mf) * (1.0 - epsilon).powi(2)))
}

/// Ratios describing how deep `(n, p, m)` sits in the asymptotic regime.
/// They are diagnostics only; there is no finite-sample cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionDiagnostics {
    /// `m ln ln p / (ln p)^{1/3}`
    pub rho1: f64,
    /// `m (ln n)^{3/2} (ln p)^{1/2} / n^{1/4}`
    pub rho2: f64,
    /// `ln ln ln p`
    pub xi_p: f64,
    /// `(m / ln p)^{1/2} ξ_p ln n`
    pub omega_n: f64,
}

pub fn assumption_diagnostics(n: f64, p: f64, m: usize) -> Result<AssumptionDiagnostics> {
    ensure!(n >= 3.0, Domain, "need n >= 3");
    ensure!(m >= 1, Domain, "need m >= 1");
    ensure!(p > 1.0, Domain, "need p > 1");
    let lp = p.ln();
    let llp = lp.ln();
    ensure!(llp >= 1.0 - 1e-12, Domain, "xi_p needs p >= e^e, got p = {p}");
    let xi_p = llp.ln();
    let mf = m as f64;
    let ln_n = n.ln();
    Ok(AssumptionDiagnostics {
        rho1: mf * llp / lp.cbrt(),
        rho2: mf * ln_n.powf(1.5) * lp.sqrt() / n.powf(0.25),
        xi_p,
        omega_n: (mf / lp).sqrt() * xi_p * ln_n,
    })
}

//! Replication harness for the centered extreme-minor statistics.
//!
//! Every replication draws from its own stream derived as
//! `seed → cell → rep`, and all aggregation runs over samples held in
//! replication order, so reports do not depend on the number of workers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{predict_extreme, wigner_union_log_bound, wishart_union_log_bound, PredictSpec, DEFAULT_KAPPA};
use crate::ensembles::EnsembleSpec;
use crate::error::{ensure, Error, Result};
use crate::minors::{extreme_minor, Mode, Strategy};
use crate::rng::{RngStream, GENERATOR_NAME};
use crate::special::{chi2_cdf, normal_cdf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnsembleKind {
    Wishart,
    Wigner { eta: f64 },
}

impl EnsembleKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleKind::Wishart => "wishart",
            EnsembleKind::Wigner { .. } => "wigner",
        }
    }
}

/// One `(n, p)` grid point; `n` is absent for Wigner cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub p: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleKind,
    pub m: usize,
    pub grid: Vec<Cell>,
    pub reps: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub alpha_list: Vec<f64>,
    pub delta_list: Vec<f64>,
    pub t_list: Vec<f64>,
    pub sides: Vec<Mode>,
    pub kappa: f64,
}

impl ExperimentConfig {
    pub fn new(ensemble: EnsembleKind, m: usize, grid: Vec<Cell>, reps: usize, seed: u64) -> Self {
        ExperimentConfig {
            ensemble,
            m,
            grid,
            reps,
            seed,
            strategy: Strategy::BranchAndBound,
            alpha_list: vec![0.5, 1.0],
            delta_list: vec![1.0, 3.0],
            t_list: vec![1.0, 2.0, 3.0],
            sides: vec![Mode::Max],
            kappa: DEFAULT_KAPPA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.reps >= 1, Input, "reps must be at least 1");
        ensure!(self.m >= 1, Input, "m must be at least 1");
        ensure!(!self.grid.is_empty(), Input, "grid is empty");
        ensure!(!self.sides.is_empty(), Input, "sides is empty");
        ensure!(self.kappa > 0.0, Input, "kappa must be positive");
        for &a in &self.alpha_list {
            ensure!(a > 0.0 && a.is_finite(), Input, "alpha values must be positive, got {a}");
        }
        for &d in &self.delta_list {
            ensure!(d > 0.0 && d.is_finite(), Input, "delta values must be positive, got {d}");
        }
        for &t in &self.t_list {
            ensure!(t.is_finite(), Input, "t values must be finite");
        }
        for cell in &self.grid {
            self.cell_spec(cell)?;
            ensure!(self.m <= cell.p, Input, "cell {}: m = {} exceeds p", describe(cell), self.m);
        }
        Ok(())
    }

    fn cell_spec(&self, cell: &Cell) -> Result<EnsembleSpec> {
        match self.ensemble {
            EnsembleKind::Wishart => {
                let n = cell
                    .n
                    .ok_or_else(|| Error::Input(format!("wishart cell p={} has no n", cell.p)))?;
                EnsembleSpec::wishart(n, cell.p)
            }
            EnsembleKind::Wigner { eta } => EnsembleSpec::wigner(cell.p, eta),
        }
    }

    /// Parses flat `key = value` text. Lists are comma separated; Wishart
    /// cells are written `NxP`, Wigner cells as `P`. Blank lines and `#`
    /// comments are ignored; unknown keys are rejected.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let key = k.trim().to_string();
            ensure!(
                map.insert(key.clone(), v.trim().to_string()).is_none(),
                Parse,
                "line {}: duplicate key {key:?}",
                lineno + 1
            );
        }
        let take = |map: &mut BTreeMap<String, String>, key: &str| map.remove(key);
        let ensemble_name = take(&mut map, "ensemble").ok_or_else(|| Error::Parse("missing key ensemble".into()))?;
        let eta = take(&mut map, "eta").map(|s| parse_num::<f64>("eta", &s)).transpose()?;
        let ensemble = match ensemble_name.as_str() {
            "wishart" => {
                ensure!(eta.is_none(), Parse, "eta only applies to wigner");
                EnsembleKind::Wishart
            }
            "wigner" => EnsembleKind::Wigner { eta: eta.unwrap_or(2.0) },
            other => return Err(Error::Parse(format!("unknown ensemble {other:?}"))),
        };
        let m = parse_num("m", &take(&mut map, "m").ok_or_else(|| Error::Parse("missing key m".into()))?)?;
        let cells_text = take(&mut map, "cells").ok_or_else(|| Error::Parse("missing key cells".into()))?;
        let grid = split_list(&cells_text)
            .map(|item| parse_cell(item, ensemble))
            .collect::<Result<Vec<_>>>()?;
        let reps = parse_num("reps", &take(&mut map, "reps").ok_or_else(|| Error::Parse("missing key reps".into()))?)?;
        let seed = take(&mut map, "seed").map(|s| parse_num("seed", &s)).transpose()?.unwrap_or(0);
        let mut cfg = ExperimentConfig::new(ensemble, m, grid, reps, seed);
        if let Some(s) = take(&mut map, "strategy") {
            cfg.strategy = s.parse().map_err(|e: Error| Error::Parse(e.to_string()))?;
        }
        if let Some(s) = take(&mut map, "alpha") {
            cfg.alpha_list = parse_list("alpha", &s)?;
        }
        if let Some(s) = take(&mut map, "delta") {
            cfg.delta_list = parse_list("delta", &s)?;
        }
        if let Some(s) = take(&mut map, "t") {
            cfg.t_list = parse_list("t", &s)?;
        }
        if let Some(s) = take(&mut map, "sides") {
            cfg.sides = split_list(&s)
                .map(|x| x.parse().map_err(|e: Error| Error::Parse(e.to_string())))
                .collect::<Result<_>>()?;
        }
        if let Some(s) = take(&mut map, "kappa") {
            cfg.kappa = parse_num("kappa", &s)?;
        }
        if let Some(key) = map.keys().next() {
            return Err(Error::Parse(format!("unknown key {key:?}")));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn describe(cell: &Cell) -> String {
    match cell.n {
        Some(n) => format!("n={n} p={}", cell.p),
        None => format!("p={}", cell.p),
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_num<T: std::str::FromStr>(key: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{key}: cannot parse {s:?}")))
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>> {
    split_list(s).map(|x| parse_num(key, x)).collect()
}

fn parse_cell(item: &str, ensemble: EnsembleKind) -> Result<Cell> {
    match (ensemble, item.split_once('x')) {
        (EnsembleKind::Wishart, Some((n, p))) => Ok(Cell {
            n: Some(parse_num("cells", n)?),
            p: parse_num("cells", p)?,
        }),
        (EnsembleKind::Wishart, None) => Err(Error::Parse(format!("wishart cell {item:?} must look like NxP"))),
        (EnsembleKind::Wigner { .. }, None) => Ok(Cell {
            n: None,
            p: parse_num("cells", item)?,
        }),
        (EnsembleKind::Wigner { .. }, Some(_)) => Err(Error::Parse(format!("wigner cell {item:?} must be a plain p"))),
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 16 {
        return x.iter().sum();
    }
    let mid = x.len() / 2;
    pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
}

fn mean_of(x: &[f64]) -> f64 {
    pairwise_sum(x) / x.len() as f64
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    /// Unbiased sample variance; zero for a single sample.
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    /// Median absolute deviation from the median.
    pub mad: f64,
}

impl Summary {
    pub fn of(x: &[f64]) -> Result<Summary> {
        ensure!(!x.is_empty(), Input, "cannot summarize an empty sample");
        let mean = mean_of(x);
        let dev: Vec<f64> = x.iter().map(|v| (v - mean) * (v - mean)).collect();
        let variance = if x.len() > 1 {
            pairwise_sum(&dev) / (x.len() - 1) as f64
        } else {
            0.0
        };
        let mut sorted = x.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = median_sorted(&sorted);
        let mut abs_dev: Vec<f64> = sorted.iter().map(|v| (v - median).abs()).collect();
        abs_dev.sort_by(f64::total_cmp);
        Ok(Summary {
            count: x.len(),
            mean,
            median,
            variance,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            mad: median_sorted(&abs_dev),
        })
    }
}

/// `(1/N) Σ e^{α|z|} 1{|z| >= δ}`.
pub fn truncated_exp_moment(samples: &[f64], alpha: f64, delta: f64) -> Result<f64> {
    ensure!(!samples.is_empty(), Input, "empty sample");
    ensure!(alpha > 0.0 && delta > 0.0, Input, "alpha and delta must be positive");
    let terms: Vec<f64> = samples
        .iter()
        .map(|z| if z.abs() >= delta { (alpha * z.abs()).exp() } else { 0.0 })
        .collect();
    Ok(mean_of(&terms))
}

/// `(1/N) Σ e^{α|z|}`.
pub fn exp_moment(samples: &[f64], alpha: f64) -> Result<f64> {
    ensure!(!samples.is_empty(), Input, "empty sample");
    let terms: Vec<f64> = samples.iter().map(|z| (alpha * z.abs()).exp()).collect();
    Ok(mean_of(&terms))
}

/// `(1/N) Σ |z|^α`.
pub fn power_moment(samples: &[f64], alpha: f64) -> Result<f64> {
    ensure!(!samples.is_empty(), Input, "empty sample");
    let terms: Vec<f64> = samples.iter().map(|z| z.abs().powf(alpha)).collect();
    Ok(mean_of(&terms))
}

/// Both sides of
/// `E[e^{αZ} 1{Z >= δ}] = e^{αδ} P(Z >= δ) + α ∫_δ^∞ e^{αt} P(Z > t) dt`
/// on the empirical law of `samples`, the integral taken exactly over the
/// pieces between consecutive order statistics. Returns `|lhs − rhs|`.
pub fn integral_identity_check(samples: &[f64], alpha: f64, delta: f64) -> Result<f64> {
    ensure!(!samples.is_empty(), Input, "empty sample");
    ensure!(alpha > 0.0 && delta > 0.0, Input, "alpha and delta must be positive");
    ensure!(samples.iter().all(|&z| z >= 0.0), Input, "samples must be nonnegative");
    let n = samples.len() as f64;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);

    let lhs_terms: Vec<f64> = sorted
        .iter()
        .map(|&z| if z >= delta { (alpha * z).exp() } else { 0.0 })
        .collect();
    let lhs = pairwise_sum(&lhs_terms) / n;

    let first = sorted.partition_point(|&z| z < delta);
    let at_or_above = (sorted.len() - first) as f64;
    let mut pieces = Vec::new();
    let mut left = delta;
    let mut idx = sorted.partition_point(|&z| z <= delta);
    while idx < sorted.len() {
        let right = sorted[idx];
        let survivors = (sorted.len() - idx) as f64;
        // ∫_left^right e^{αt} dt scaled by α
        pieces.push(survivors / n * ((alpha * right).exp() - (alpha * left).exp()));
        left = right;
        while idx < sorted.len() && sorted[idx] == right {
            idx += 1;
        }
    }
    let rhs = (alpha * delta).exp() * at_or_above / n + pairwise_sum(&pieces);
    Ok((lhs - rhs).abs())
}

/// Exact CDF of the `m = 1` statistic, the maximum of the `p` diagonal
/// entries: `Φ(x/√η)^p` for Wigner and `P(χ²_n <= x)^p` for Wishart.
pub fn closed_form_cdf_m1(ensemble: &EnsembleSpec, x: f64) -> Result<f64> {
    ensemble.validate()?;
    let (p, single) = match *ensemble {
        EnsembleSpec::Wigner { p, eta } => {
            let c = if eta == 0.0 {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                normal_cdf(x / eta.sqrt())
            };
            (p, c)
        }
        EnsembleSpec::Wishart { n, p } => (p, chi2_cdf(n as f64, x)?),
    };
    if single <= 0.0 {
        return Ok(0.0);
    }
    Ok((p as f64 * single.ln()).exp())
}

/// Kolmogorov–Smirnov distance `sup_x |F_N(x) − F(x)|` for a continuous `F`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    ensure!(!samples.is_empty(), Input, "empty sample");
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x)?;
        worst = worst.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub alpha: f64,
    pub exp_moment: f64,
    pub power_moment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedRow {
    pub alpha: f64,
    pub delta: f64,
    pub truncated_exp_moment: f64,
    pub integral_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsTailRow {
    pub delta: f64,
    pub frequency: f64,
}

/// Frequency of `Z >= t` (max side) or `Z <= −t` (min side) against the
/// union bound at the configured `kappa`, when the bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub t: f64,
    pub exceed_count: usize,
    pub frequency: f64,
    pub log_bound: Option<f64>,
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideReport {
    pub side: Mode,
    pub prediction: f64,
    pub statistic: Summary,
    pub z: Summary,
    pub ratio: Summary,
    pub moments: Vec<MomentRow>,
    pub truncated: Vec<TruncatedRow>,
    pub abs_tail: Vec<AbsTailRow>,
    pub tail: Vec<TailRow>,
    pub mean_nodes_explored: f64,
    #[serde(skip)]
    pub statistic_samples: Vec<f64>,
    #[serde(skip)]
    pub z_samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub ensemble: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub p: usize,
    pub m: usize,
    pub sides: Vec<SideReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub generator: String,
    pub cells: Vec<CellReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

struct RepOutcome {
    values: Vec<f64>,
    nodes: Vec<u64>,
}

fn centering(config: &ExperimentConfig, cell: &Cell, side: Mode) -> Result<(f64, f64)> {
    let m = config.m;
    let p = cell.p;
    match config.ensemble {
        EnsembleKind::Wishart => {
            let n = cell.n.unwrap_or(0);
            let level = predict_extreme(PredictSpec::Wishart { n, m, p, side })?;
            Ok((level, (level - n as f64) / (n as f64).sqrt()))
        }
        EnsembleKind::Wigner { eta } => {
            let level = predict_extreme(PredictSpec::Wigner { m, p, eta, side })?;
            Ok((level, level))
        }
    }
}

/// `(z, ratio)` for a raw extreme value.
fn standardize(config: &ExperimentConfig, cell: &Cell, value: f64, shift: f64) -> (f64, f64) {
    match config.ensemble {
        EnsembleKind::Wishart => {
            let n = cell.n.unwrap_or(1) as f64;
            let scaled = (value - n) / n.sqrt();
            (scaled - shift, scaled / shift)
        }
        EnsembleKind::Wigner { .. } => (value - shift, value / shift),
    }
}

fn tail_log_bound(config: &ExperimentConfig, cell: &Cell, t: f64, side: Mode) -> Option<f64> {
    match config.ensemble {
        EnsembleKind::Wigner { eta: 2.0 } => {
            wigner_union_log_bound(t, config.m, cell.p, config.kappa).ok()
        }
        EnsembleKind::Wigner { .. } => None,
        EnsembleKind::Wishart => {
            wishart_union_log_bound(t, cell.n.unwrap_or(1), config.m, cell.p, config.kappa, side).ok()
        }
    }
}

fn run_cell(config: &ExperimentConfig, cell_index: usize, cell: &Cell) -> Result<CellReport> {
    let spec = config.cell_spec(cell)?;
    let cell_stream = RngStream::from_seed(config.seed).derive(cell_index as u64);
    let outcomes: Vec<RepOutcome> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = cell_stream.derive(rep as u64);
            let a = spec.sample(&mut rng)?;
            let mut values = Vec::with_capacity(config.sides.len());
            let mut nodes = Vec::with_capacity(config.sides.len());
            for &side in &config.sides {
                let r = extreme_minor(&a, config.m, side, config.strategy)?;
                values.push(r.value);
                nodes.push(r.nodes_explored);
            }
            Ok(RepOutcome { values, nodes })
        })
        .collect::<Result<_>>()
        .map_err(|e| match e {
            Error::Capacity(msg) => Error::Capacity(format!("cell {}: {msg}", describe(cell))),
            other => other,
        })?;

    let mut sides = Vec::with_capacity(config.sides.len());
    for (k, &side) in config.sides.iter().enumerate() {
        let statistic_samples: Vec<f64> = outcomes.iter().map(|o| o.values[k]).collect();
        let node_counts: Vec<f64> = outcomes.iter().map(|o| o.nodes[k] as f64).collect();
        let (prediction, shift) = centering(config, cell, side)?;
        let (z_samples, ratio_samples): (Vec<f64>, Vec<f64>) = statistic_samples
            .iter()
            .map(|&v| standardize(config, cell, v, shift))
            .unzip();
        let abs_z: Vec<f64> = z_samples.iter().map(|z| z.abs()).collect();

        let moments = config
            .alpha_list
            .iter()
            .map(|&alpha| {
                Ok(MomentRow {
                    alpha,
                    exp_moment: exp_moment(&z_samples, alpha)?,
                    power_moment: power_moment(&z_samples, alpha)?,
                })
            })
            .collect::<Result<_>>()?;
        let mut truncated = Vec::new();
        for &alpha in &config.alpha_list {
            for &delta in &config.delta_list {
                truncated.push(TruncatedRow {
                    alpha,
                    delta,
                    truncated_exp_moment: truncated_exp_moment(&z_samples, alpha, delta)?,
                    integral_residual: integral_identity_check(&abs_z, alpha, delta)?,
                });
            }
        }
        let reps = config.reps as f64;
        let abs_tail = config
            .delta_list
            .iter()
            .map(|&delta| AbsTailRow {
                delta,
                frequency: abs_z.iter().filter(|&&z| z >= delta).count() as f64 / reps,
            })
            .collect();
        let tail = config
            .t_list
            .iter()
            .map(|&t| {
                let exceed_count = z_samples
                    .iter()
                    .filter(|&&z| match side {
                        Mode::Max => z >= t,
                        Mode::Min => z <= -t,
                    })
                    .count();
                let log_bound = tail_log_bound(config, cell, t, side);
                TailRow {
                    t,
                    exceed_count,
                    frequency: exceed_count as f64 / reps,
                    log_bound,
                    bound: log_bound.map(|l| l.exp().min(1.0)),
                }
            })
            .collect();
        sides.push(SideReport {
            side,
            prediction,
            statistic: Summary::of(&statistic_samples)?,
            z: Summary::of(&z_samples)?,
            ratio: Summary::of(&ratio_samples)?,
            moments,
            truncated,
            abs_tail,
            tail,
            mean_nodes_explored: mean_of(&node_counts),
            statistic_samples,
            z_samples,
        });
    }
    Ok(CellReport {
        ensemble: config.ensemble.name().to_string(),
        n: cell.n,
        p: cell.p,
        m: config.m,
        sides,
    })
}

/// Runs every cell of the grid on the current rayon pool.
pub fn run_extreme_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let cells = config
        .grid
        .iter()
        .enumerate()
        .map(|(i, cell)| run_cell(config, i, cell))
        .collect::<Result<_>>()?;
    Ok(ExperimentReport {
        config: config.clone(),
        generator: GENERATOR_NAME.to_string(),
        cells,
        wall_time_s: None,
    })
}

/// Runs the experiment on a dedicated pool of `workers` threads, optionally
/// recording wall time.
pub fn run_with_workers(config: &ExperimentConfig, workers: usize, timing: bool) -> Result<ExperimentReport> {
    ensure!(workers >= 1, Input, "workers must be at least 1");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Capacity(format!("cannot start worker pool: {e}")))?;
    let start = Instant::now();
    let mut report = pool.install(|| run_extreme_experiment(config))?;
    if timing {
        report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(format!("cannot serialize report: {e}")))
    }

    /// Long format: one row per cell, side and metric.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ensemble,n,p,m,side,metric,alpha,delta,t,value\n");
        for cell in &self.cells {
            let n = cell.n.map(|n| n.to_string()).unwrap_or_default();
            for side in &cell.sides {
                let side_name = match side.side {
                    Mode::Max => "max",
                    Mode::Min => "min",
                };
                let mut row = |metric: &str, alpha: Option<f64>, delta: Option<f64>, t: Option<f64>, value: f64| {
                    let opt = |x: Option<f64>| x.map(csv_num).unwrap_or_default();
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{}",
                        cell.ensemble,
                        n,
                        cell.p,
                        cell.m,
                        side_name,
                        metric,
                        opt(alpha),
                        opt(delta),
                        opt(t),
                        csv_num(value)
                    );
                };
                row("prediction", None, None, None, side.prediction);
                for (name, s) in [("statistic", &side.statistic), ("z", &side.z), ("ratio", &side.ratio)] {
                    row(&format!("{name}_mean"), None, None, None, s.mean);
                    row(&format!("{name}_median"), None, None, None, s.median);
                    row(&format!("{name}_variance"), None, None, None, s.variance);
                    row(&format!("{name}_min"), None, None, None, s.min);
                    row(&format!("{name}_max"), None, None, None, s.max);
                    row(&format!("{name}_mad"), None, None, None, s.mad);
                }
                for mrow in &side.moments {
                    row("exp_moment", Some(mrow.alpha), None, None, mrow.exp_moment);
                    row("power_moment", Some(mrow.alpha), None, None, mrow.power_moment);
                }
                for trow in &side.truncated {
                    row("truncated_exp_moment", Some(trow.alpha), Some(trow.delta), None, trow.truncated_exp_moment);
                    row("integral_residual", Some(trow.alpha), Some(trow.delta), None, trow.integral_residual);
                }
                for arow in &side.abs_tail {
                    row("abs_tail_frequency", None, Some(arow.delta), None, arow.frequency);
                }
                for trow in &side.tail {
                    row("tail_frequency", None, None, Some(trow.t), trow.frequency);
                    if let Some(b) = trow.bound {
                        row("tail_bound", None, None, Some(trow.t), b);
                    }
                }
                row("mean_nodes_explored", None, None, None, side.mean_nodes_explored);
            }
        }
        out
    }
}

/// Shortest round-trip decimal form; non-finite values spelled out.
pub fn csv_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        serde_json::to_string(&x).unwrap_or_default()
    }
}

/// One grid point of a convergence study: centered samples at a given `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendInput {
    pub ensemble: String,
    pub n: Option<usize>,
    pub m: usize,
    pub p: usize,
    pub z: Vec<f64>,
}

impl TrendInput {
    pub fn from_report(report: &ExperimentReport, side: Mode) -> Vec<TrendInput> {
        report
            .cells
            .iter()
            .filter_map(|c| {
                c.sides.iter().find(|s| s.side == side).map(|s| TrendInput {
                    ensemble: c.ensemble.clone(),
                    n: c.n,
                    m: c.m,
                    p: c.p,
                    z: s.z_samples.clone(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub p: usize,
    pub median_abs_z: f64,
    pub exp_moment: f64,
    pub power_moment: f64,
    pub variance: f64,
    pub abs_tail: f64,
}

/// Whether each functional moves monotonically toward its limit
/// (`E e^{α|Z|} → 1`, `E|Z|^α → 0`, `Var Z → 0`, `P(|Z| >= δ) → 0`) as `p`
/// grows. Finite samples need not be monotone; the flags are advisory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendTable {
    pub alpha: f64,
    pub delta: f64,
    pub rows: Vec<TrendRow>,
    pub exp_moment_decreasing: bool,
    pub power_moment_decreasing: bool,
    pub variance_decreasing: bool,
    pub abs_tail_decreasing: bool,
    pub median_abs_z_decreasing: bool,
}

pub fn convergence_diagnostics(cells: &[TrendInput], alpha: f64, delta: f64) -> Result<TrendTable> {
    ensure!(cells.len() >= 2, Input, "convergence diagnostics need at least two cells");
    ensure!(alpha > 0.0 && delta > 0.0, Input, "alpha and delta must be positive");
    let first = &cells[0];
    for c in cells {
        ensure!(
            c.ensemble == first.ensemble && c.m == first.m && c.n == first.n,
            Input,
            "cells differ in ensemble, m or n"
        );
    }
    let mut ordered: Vec<&TrendInput> = cells.iter().collect();
    ordered.sort_by_key(|c| c.p);
    let rows = ordered
        .iter()
        .map(|c| {
            let s = Summary::of(&c.z)?;
            let abs: Vec<f64> = c.z.iter().map(|z| z.abs()).collect();
            let abs_summary = Summary::of(&abs)?;
            Ok(TrendRow {
                p: c.p,
                median_abs_z: abs_summary.median,
                exp_moment: exp_moment(&c.z, alpha)?,
                power_moment: power_moment(&c.z, alpha)?,
                variance: s.variance,
                abs_tail: abs.iter().filter(|&&z| z >= delta).count() as f64 / abs.len() as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let decreasing = |f: &dyn Fn(&TrendRow) -> f64| rows.windows(2).all(|w| f(&w[1]) <= f(&w[0]));
    Ok(TrendTable {
        alpha,
        delta,
        exp_moment_decreasing: decreasing(&|r| (r.exp_moment - 1.0).abs()),
        power_moment_decreasing: decreasing(&|r| r.power_moment),
        variance_decreasing: decreasing(&|r| r.variance),
        abs_tail_decreasing: decreasing(&|r| r.abs_tail),
        median_abs_z_decreasing: decreasing(&|r| r.median_abs_z),
        rows,
    })
}

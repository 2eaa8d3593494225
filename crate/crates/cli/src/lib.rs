//! Command-line front end: argument parsing, dispatch and output.
//!
//! Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 usage or input error, 2 domain or capacity error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use pminor::asymptotics::{self, PredictSpec, DEFAULT_KAPPA};
use pminor::csmatrix::{self, design_min_n, exact_rip_constant, predicted_delta, sample_sensing_matrix};
use pminor::densities::{density_selftest, gamma_constants};
use pminor::minors::extreme_minor;
use pminor::montecarlo::{closed_form_cdf_m1, run_with_workers, ExperimentConfig};
use pminor::{EnsembleSpec, Error, Mode, RngStream, Strategy};

#[derive(Parser, Debug)]
#[command(name = "pminor", version, about = "Extreme eigenvalues of principal minors of random matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw one matrix and print it in the matrix text format.
    Sample(EnsembleArgs),
    /// Largest (or smallest) extreme eigenvalue over size-m principal minors.
    Extreme(ExtremeArgs),
    /// Run a Monte Carlo experiment from a key=value config file.
    Mc(McArgs),
    /// Evaluate a predictor, bound or lemma quantity by name.
    Tails(TailsArgs),
    /// Residual table of the density oracles.
    DensitySelftest,
    /// Restricted isometry constant of a Gaussian sensing matrix.
    Rip(RipArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum EnsembleName {
    Wishart,
    Wigner,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Max,
    Min,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Max => Mode::Max,
            ModeArg::Min => Mode::Min,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Enumerate,
    BranchAndBound,
    Greedy,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Enumerate => Strategy::Enumerate,
            StrategyArg::BranchAndBound => Strategy::BranchAndBound,
            StrategyArg::Greedy => Strategy::Greedy,
        }
    }
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    #[arg(long, value_enum)]
    ensemble: EnsembleName,
    /// Sample size (Wishart only).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: usize,
    /// Diagonal variance (Wigner only).
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl EnsembleArgs {
    fn spec(&self) -> pminor::Result<EnsembleSpec> {
        match self.ensemble {
            EnsembleName::Wishart => {
                if self.eta.is_some() {
                    return Err(Error::Input("--eta only applies to wigner".into()));
                }
                let n = self.n.ok_or_else(|| Error::Input("wishart needs --n".into()))?;
                EnsembleSpec::wishart(n, self.p)
            }
            EnsembleName::Wigner => {
                if self.n.is_some() {
                    return Err(Error::Input("--n only applies to wishart".into()));
                }
                EnsembleSpec::wigner(self.p, self.eta.unwrap_or(2.0))
            }
        }
    }
}

#[derive(Args, Debug)]
struct ExtremeArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value = "max")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "branch-and-bound")]
    strategy: StrategyArg,
}

#[derive(Args, Debug)]
struct McArgs {
    /// Experiment description in key=value form.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Also write the long-format CSV report.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Record wall time in the report (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct TailsArgs {
    /// Quantity to evaluate; `--fn list` prints the available names.
    #[arg(long = "fn")]
    name: String,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long, value_enum)]
    side: Option<ModeArg>,
    #[arg(long, value_enum)]
    ensemble: Option<EnsembleName>,
}

#[derive(Args, Debug)]
struct RipArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 0.0)]
    margin: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "branch-and-bound")]
    strategy: StrategyArg,
    /// Greedy lower bound instead of the exact search.
    #[arg(long)]
    sampled: bool,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
                _ => {
                    let first = e.render().to_string();
                    let line = first.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
                    let _ = writeln!(err, "error: usage: {line}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: usage: {msg}");
            1
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: io: {msg}");
            1
        }
        Err(Failure::Lib(e)) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error: {msg}");
            match e {
                Error::Input(_) | Error::Parse(_) => 1,
                Error::Domain(_) | Error::Capacity(_) => 2,
            }
        }
    }
}

fn emit(out: &mut dyn Write, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Sample(args) => {
            let spec = args.spec()?;
            let mut rng = RngStream::from_seed(args.seed);
            let a = spec.sample(&mut rng)?;
            write!(out, "{}", a.to_text())?;
            Ok(())
        }
        Command::Extreme(args) => {
            let spec = args.ensemble.spec()?;
            let mut rng = RngStream::from_seed(args.ensemble.seed);
            let a = spec.sample(&mut rng)?;
            let mode: Mode = args.mode.into();
            let strategy: Strategy = args.strategy.into();
            let r = extreme_minor(&a, args.m, mode, strategy)?;
            let value = json!({
                "config": {
                    "ensemble": to_value(&spec),
                    "m": args.m,
                    "mode": to_value(&mode),
                    "strategy": to_value(&strategy),
                    "seed": args.ensemble.seed,
                },
                "value": r.value,
                "subset": r.subset,
                "nodes_explored": r.nodes_explored,
            });
            emit(out, &value)
        }
        Command::Mc(args) => {
            let text = std::fs::read_to_string(&args.config)
                .map_err(|e| Failure::Io(format!("{}: {e}", args.config.display())))?;
            let config = ExperimentConfig::from_key_values(&text)?;
            let _ = writeln!(
                err,
                "running {} cell(s) x {} rep(s) on {} worker(s)",
                config.grid.len(),
                config.reps,
                args.workers
            );
            let report = run_with_workers(&config, args.workers, args.timing)?;
            let json = report.to_json()?;
            match &args.out_json {
                Some(path) => std::fs::write(path, format!("{json}\n"))?,
                None => writeln!(out, "{json}")?,
            }
            if let Some(path) = &args.out_csv {
                std::fs::write(path, report.to_csv())?;
            }
            Ok(())
        }
        Command::Tails(args) => {
            let value = tails(&args)?;
            emit(out, &value)
        }
        Command::DensitySelftest => {
            let rows = density_selftest()?;
            let all_pass = rows.iter().all(|r| r.pass);
            emit(out, &json!({ "rows": to_value(&rows), "all_pass": all_pass }))?;
            if all_pass {
                Ok(())
            } else {
                Err(Failure::Lib(Error::Domain("density self-test failed".into())))
            }
        }
        Command::Rip(args) => {
            let mut rng = RngStream::from_seed(args.seed);
            let x = sample_sensing_matrix(args.n, args.p, &mut rng)?;
            let min_n = design_min_n(args.p as f64, args.k, args.t, args.margin)?;
            let mut value = json!({
                "config": {
                    "n": args.n, "p": args.p, "k": args.k, "t": args.t,
                    "margin": args.margin, "seed": args.seed,
                    "strategy": to_value(&Strategy::from(args.strategy)),
                    "sampled": args.sampled,
                },
                "design_min_n": min_n,
            });
            if args.sampled {
                let (report, lower) = csmatrix::sampled_rip_lower_bound(&x, args.k, args.t)?;
                value["report"] = to_value(&report);
                value["delta_lower_bound"] = json!(lower);
            } else {
                let report = exact_rip_constant(&x, args.k, args.t, args.strategy.into())?;
                value["report"] = to_value(&report);
            }
            emit(out, &value)
        }
    }
}

const TAIL_FUNCTIONS: &[(&str, &[&str])] = &[
    ("rate_i", &["s"]),
    ("b_star", &["t"]),
    ("predict_extreme", &["ensemble", "n", "m", "p", "eta", "side"]),
    ("epsilon_tau", &["m", "p", "t"]),
    ("wigner_tail", &["x", "m", "kappa"]),
    ("wigner_union", &["t", "m", "p", "kappa"]),
    ("mdp_tail", &["x", "m", "eta", "r", "delta"]),
    ("mdp_optimize", &["x", "m", "eta"]),
    ("wishart_moderate", &["y", "n", "m", "r", "d", "kappa", "side"]),
    ("wishart_union", &["t", "n", "m", "p", "kappa", "side"]),
    ("log_phi_bar", &["x"]),
    ("chi2_lower_tail", &["x"]),
    ("log_binomial", &["p", "m"]),
    ("overlap_ratio", &["p", "m"]),
    ("max_l", &["m", "epsilon"]),
    ("diagnostics", &["n", "p", "m"]),
    ("predicted_delta", &["n", "p", "m"]),
    ("design_min_n", &["p", "k", "t", "margin"]),
    ("recovery", &["delta", "t"]),
    ("gamma_constants", &["m", "n"]),
    ("closed_form_cdf_m1", &["ensemble", "n", "p", "eta", "x"]),
];

impl TailsArgs {
    fn given(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("s", self.s.map(|v| json!(v)));
        put("t", self.t.map(|v| json!(v)));
        put("x", self.x.map(|v| json!(v)));
        put("y", self.y.map(|v| json!(v)));
        put("n", self.n.map(|v| json!(v)));
        put("m", self.m.map(|v| json!(v)));
        put("p", self.p.map(|v| json!(v)));
        put("k", self.k.map(|v| json!(v)));
        put("eta", self.eta.map(|v| json!(v)));
        put("r", self.r.map(|v| json!(v)));
        put("d", self.d.map(|v| json!(v)));
        put("delta", self.delta.map(|v| json!(v)));
        put("kappa", self.kappa.map(|v| json!(v)));
        put("epsilon", self.epsilon.map(|v| json!(v)));
        put("margin", self.margin.map(|v| json!(v)));
        put("side", self.side.map(|v| to_value(&Mode::from(v))));
        put(
            "ensemble",
            self.ensemble.map(|e| {
                json!(match e {
                    EnsembleName::Wishart => "wishart",
                    EnsembleName::Wigner => "wigner",
                })
            }),
        );
        m
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{flag}")))
}

fn whole_p(p: f64) -> Result<usize, Failure> {
    if p >= 1.0 && p.fract() == 0.0 && p <= usize::MAX as f64 {
        Ok(p as usize)
    } else {
        Err(Failure::Usage(format!("--p must be a positive integer here, got {p}")))
    }
}

fn tails(a: &TailsArgs) -> Result<Value, Failure> {
    if a.name == "list" {
        let names: Vec<Value> = TAIL_FUNCTIONS
            .iter()
            .map(|(n, flags)| json!({ "fn": n, "flags": flags }))
            .collect();
        return Ok(json!({ "functions": names }));
    }
    let (_, allowed) = TAIL_FUNCTIONS
        .iter()
        .find(|(n, _)| *n == a.name)
        .ok_or_else(|| Failure::Usage(format!("unknown --fn {:?} (try --fn list)", a.name)))?;
    let mut args = a.given();
    if let Some(extra) = args.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Failure::Usage(format!("--{extra} is not used by {}", a.name)));
    }
    let kappa = a.kappa.unwrap_or(DEFAULT_KAPPA);
    if allowed.contains(&"kappa") {
        args.insert("kappa".into(), json!(kappa));
    }
    let side = a.side.map(Mode::from).unwrap_or(Mode::Max);
    if allowed.contains(&"side") {
        args.insert("side".into(), to_value(&side));
    }
    let value: Value = match a.name.as_str() {
        "rate_i" => json!(asymptotics::rate_i(need(a.s, "s")?)),
        "b_star" => json!(asymptotics::b_star(need(a.t, "t")?)?),
        "predict_extreme" => {
            let m = need(a.m, "m")?;
            let p = whole_p(need(a.p, "p")?)?;
            let spec = match need(a.ensemble, "ensemble")? {
                EnsembleName::Wishart => PredictSpec::Wishart { n: need(a.n, "n")?, m, p, side },
                EnsembleName::Wigner => {
                    let eta = a.eta.unwrap_or(2.0);
                    args.insert("eta".into(), json!(eta));
                    PredictSpec::Wigner { m, p, eta, side }
                }
            };
            json!(asymptotics::predict_extreme(spec)?)
        }
        "epsilon_tau" => {
            let (e, t) = asymptotics::epsilon_tau(need(a.m, "m")?, need(a.p, "p")?, need(a.t, "t")?)?;
            json!({ "epsilon": e, "tau": t })
        }
        "wigner_tail" => json!(asymptotics::wigner_lambda1_tail_bound(need(a.x, "x")?, need(a.m, "m")?, kappa)?),
        "wigner_union" => json!(asymptotics::wigner_union_log_bound(
            need(a.t, "t")?,
            need(a.m, "m")?,
            whole_p(need(a.p, "p")?)?,
            kappa
        )?),
        "mdp_tail" => json!(asymptotics::mdp_eta_tail_bound(
            need(a.x, "x")?,
            need(a.m, "m")?,
            need(a.eta, "eta")?,
            need(a.r, "r")?,
            need(a.delta, "delta")?
        )?),
        "mdp_optimize" => to_value(&asymptotics::mdp_optimize(need(a.x, "x")?, need(a.m, "m")?, need(a.eta, "eta")?)?),
        "wishart_moderate" => json!(asymptotics::wishart_moderate_bound(
            need(a.y, "y")?,
            need(a.n, "n")?,
            need(a.m, "m")?,
            need(a.r, "r")?,
            need(a.d, "d")?,
            kappa,
            side
        )?),
        "wishart_union" => json!(asymptotics::wishart_union_log_bound(
            need(a.t, "t")?,
            need(a.n, "n")?,
            need(a.m, "m")?,
            whole_p(need(a.p, "p")?)?,
            kappa,
            side
        )?),
        "log_phi_bar" => {
            let (exact, asymptotic) = asymptotics::log_phi_bar(need(a.x, "x")?);
            json!({ "exact": exact, "asymptotic": asymptotic })
        }
        "chi2_lower_tail" => json!(asymptotics::chi2_lower_tail_bound(need(a.x, "x")?)?),
        "log_binomial" => {
            let (exact, lower, upper) =
                asymptotics::log_binomial_with_bounds(whole_p(need(a.p, "p")?)?, need(a.m, "m")?)?;
            json!({ "exact": exact, "lower": lower, "upper": upper })
        }
        "overlap_ratio" => json!(asymptotics::overlap_ratio_log(whole_p(need(a.p, "p")?)?, need(a.m, "m")?)?),
        "max_l" => {
            let (l, v) = asymptotics::max_l_value(need(a.m, "m")?, need(a.epsilon, "epsilon")?)?;
            json!({ "argmax_l": l, "value": v })
        }
        "diagnostics" => to_value(&asymptotics::assumption_diagnostics(
            need(a.n, "n")? as f64,
            need(a.p, "p")?,
            need(a.m, "m")?,
        )?),
        "predicted_delta" => json!(predicted_delta(need(a.n, "n")? as f64, need(a.p, "p")?, need(a.m, "m")?)?),
        "design_min_n" => {
            let margin = a.margin.unwrap_or(0.0);
            args.insert("margin".into(), json!(margin));
            json!(design_min_n(need(a.p, "p")?, need(a.k, "k")?, need(a.t, "t")?, margin)?)
        }
        "recovery" => json!(csmatrix::check_recovery_condition(need(a.delta, "delta")?, need(a.t, "t")?)?),
        "gamma_constants" => to_value(&gamma_constants(need(a.m, "m")?, need(a.n, "n")?)?),
        "closed_form_cdf_m1" => {
            let p = whole_p(need(a.p, "p")?)?;
            let spec = match need(a.ensemble, "ensemble")? {
                EnsembleName::Wishart => EnsembleSpec::wishart(need(a.n, "n")?, p)?,
                EnsembleName::Wigner => {
                    let eta = a.eta.unwrap_or(2.0);
                    args.insert("eta".into(), json!(eta));
                    EnsembleSpec::wigner(p, eta)?
                }
            };
            json!(closed_form_cdf_m1(&spec, need(a.x, "x")?)?)
        }
        other => return Err(Failure::Usage(format!("unknown --fn {other:?}"))),
    };
    Ok(json!({ "fn": a.name, "args": Value::Object(args), "value": value }))
}

//! The `circle-rds` command line: reads a JSON run configuration, runs one
//! experiment or estimator, and writes CSV/JSON results plus a manifest.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use circle_rds::estimators::{
    contraction_in_mean, holder_exponent, ks_threshold_95, lyapunov_exponent, moment_integral, repulsor_decay,
    stationarity_residual, stationary_measure_birkhoff, stationary_measure_push, EstimatorRow,
};
use circle_rds::experiments::{
    inclusion_rate_experiment, independence_gap_experiment, lifted_repelling_set_test, self_distance_experiment,
    theorem_a_experiment, theorem_b_density, ExperimentConfig, ExperimentError, RateReport, RateResult,
    TrialOutcome,
};
use circle_rds::pingpong::{check_certificate, relator_search, CertificateRecord};
use circle_rds::{CircleMap, CirclePoint, DecayFit, EmpiricalMeasure, EstimatorError, Real, StepMeasure};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{Built, RunConfig};
use output::{real, unix_now, OutDir, RunManifest};

pub const OUT_ENV: &str = "CIRCLE_RDS_OUT";

macro_rules! say {
    ($run:expr, $($arg:tt)*) => {
        if !$run.quiet {
            println!($($arg)*);
        }
    };
}

#[derive(Debug, Parser)]
#[command(name = "circle-rds", version, about = "Random walks of circle maps: experiments and estimators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the rayon default.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output root; falls back to $CIRCLE_RDS_OUT, then `output.dir`, then `out`.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Drop the `n` values above this.
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub eps: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Print nothing on success.
    #[arg(short, long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArg {
    #[arg(value_name = "CONFIG", required_unless_present = "config")]
    pub path: Option<PathBuf>,
    #[arg(long, conflicts_with = "path")]
    pub config: Option<PathBuf>,
}

impl ConfigArg {
    fn path(&self) -> &Path {
        self.config.as_deref().or(self.path.as_deref()).expect("clap requires one")
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Ping-pong success rate of two independent walks against n.
    TheoremA(ConfigArg),
    /// Fraction of times up to the horizon with a certified pair.
    Density(ConfigArg),
    /// Rate of f^n(S^1 - B(σ̂, ε^n)) ⊆ B(f^n(y0), ε^n).
    Inclusion(ConfigArg),
    /// Rate of d(f^n(x0), σ̂) <= t^n.
    SelfDistance(ConfigArg),
    /// Decay of the gap between a walk and an independent copy.
    Independence(ConfigArg),
    /// Repelling sets of degree-d lifts against the lifted base repulsor.
    LiftTest {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Sample the stationary measure of measure_1.
    Stationary(ConfigArg),
    /// Hölder exponent of the stationary measure.
    Holder(ConfigArg),
    /// Lyapunov exponent along one realization.
    Lyapunov(ConfigArg),
    /// Σ w · max(Lip g, Lip g^-1)^δ over measure_1.
    Moment(ConfigArg),
    /// Contraction in mean of pairs of points under the walk.
    Contraction(ConfigArg),
    /// Distance of horizon-n repulsor estimates to the horizon-2n estimate.
    Repulsor(ConfigArg),
    /// Check explicit arcs for `experiment.pair`, or certify walk pairs at the largest n.
    PingpongCheck(ConfigArg),
    /// Shortest relator between two maps, up to `experiment.relator.max_len`.
    Relator(ConfigArg),
    /// Print the diagnostics of a configuration.
    Validate(ConfigArg),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::TheoremA(_) => "theorem-a",
            Command::Density(_) => "density",
            Command::Inclusion(_) => "inclusion",
            Command::SelfDistance(_) => "self-distance",
            Command::Independence(_) => "independence",
            Command::LiftTest { .. } => "lift-test",
            Command::Stationary(_) => "stationary",
            Command::Holder(_) => "holder",
            Command::Lyapunov(_) => "lyapunov",
            Command::Moment(_) => "moment",
            Command::Contraction(_) => "contraction",
            Command::Repulsor(_) => "repulsor",
            Command::PingpongCheck(_) => "pingpong-check",
            Command::Relator(_) => "relator",
            Command::Validate(_) => "validate",
        }
    }

    fn config(&self) -> &ConfigArg {
        match self {
            Command::LiftTest { config, .. } => config,
            Command::TheoremA(c)
            | Command::Density(c)
            | Command::Inclusion(c)
            | Command::SelfDistance(c)
            | Command::Independence(c)
            | Command::Stationary(c)
            | Command::Holder(c)
            | Command::Lyapunov(c)
            | Command::Moment(c)
            | Command::Contraction(c)
            | Command::Repulsor(c)
            | Command::PingpongCheck(c)
            | Command::Relator(c)
            | Command::Validate(c) => c,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments; one line per diagnostic.
    Config(Vec<String>),
    /// A summary value came out NaN or infinite.
    Numeric(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(d) => write!(f, "{}", d.join("\n")),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        CliError::Config(vec![e.to_string()])
    }
}

impl From<EstimatorError> for CliError {
    fn from(e: EstimatorError) -> Self {
        CliError::Config(vec![e.to_string()])
    }
}

/// Parse `args` (program name first), run, and return the exit code. A
/// leading `run` before the subcommand is accepted and ignored.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if args.get(1).is_some_and(|a| a == "run") {
        args.remove(1);
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let o = &cli.overrides;
    let mut cfg = config::load(cli.command.config().path()).map_err(|d| CliError::Config(vec![d]))?;
    apply_overrides(&mut cfg, o);
    if let Command::LiftTest { degree: Some(d), .. } = &cli.command {
        cfg.experiment.degree = *d;
    }
    let built = config::validate(&cfg).map_err(CliError::Config)?;
    if let Command::Validate(_) = cli.command {
        if !o.quiet {
            println!("valid {}", cfg.sha256());
        }
        return Ok(());
    }
    match o.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Config(vec![format!("--workers: {e}")]))?
            .install(|| execute_built(cli, &cfg, &built)),
        None => execute_built(cli, &cfg, &built),
    }
}

fn apply_overrides(cfg: &mut RunConfig, o: &Overrides) {
    let e = &mut cfg.experiment;
    if let Some(s) = o.seed {
        e.seed = s;
    }
    if let Some(t) = o.trials {
        e.trials = t;
    }
    if let Some(eps) = &o.eps {
        e.eps = eps.iter().copied().map(Real).collect();
    }
    if let Some(d) = o.delta {
        e.delta = Real(d);
    }
    if let Some(t) = o.t {
        e.t = Real(t);
    }
    if let Some(n) = o.n_max {
        cfg.limit_n(n);
    }
}

/// `--out-dir`, then the environment, then the config, then `out`; the
/// subcommand gets its own directory below that.
pub fn out_root(flag: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn execute_built(cli: &Cli, cfg: &RunConfig, built: &Built) -> Result<(), CliError> {
    let started = unix_now();
    let name = cli.command.name();
    let dir = out_root(cli.overrides.out_dir.as_deref(), cfg).join(name);
    let mut out = OutDir::create(&dir)?;
    out.json("config.json", cfg)?;
    let mut run = Run {
        cfg,
        exp: &built.experiment,
        out: &mut out,
        name,
        quiet: cli.overrides.quiet,
        checked: Vec::new(),
    };
    match &cli.command {
        Command::TheoremA(_) => run.theorem_a()?,
        Command::Density(_) => run.density()?,
        Command::Inclusion(_) => {
            let r = inclusion_rate_experiment(run.exp)?;
            run.rates("inclusion", &r)?
        }
        Command::SelfDistance(_) => {
            let r = self_distance_experiment(run.exp, cfg.experiment.t.get())?;
            run.rates("self_distance", &r)?
        }
        Command::Independence(_) => run.independence()?,
        Command::LiftTest { .. } => run.lift()?,
        Command::Stationary(_) => run.stationary()?,
        Command::Holder(_) => run.holder()?,
        Command::Lyapunov(_) => run.lyapunov()?,
        Command::Moment(_) => run.moment()?,
        Command::Contraction(_) => run.contraction()?,
        Command::Repulsor(_) => run.repulsor()?,
        Command::PingpongCheck(_) => run.pingpong(built)?,
        Command::Relator(_) => run.relator(built)?,
        Command::Validate(_) => unreachable!("handled before the run"),
    }
    let bad = run.checked.iter().find(|(_, v)| !v.is_finite()).cloned();
    out.manifest(&RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand: name.to_string(),
        config_sha256: cfg.sha256(),
        seed: cfg.experiment.seed,
        workers: cli.overrides.workers,
        started_unix: started,
        finished_unix: unix_now(),
        files: out.files().to_vec(),
    })?;
    if let Some((what, v)) = bad {
        return Err(CliError::Numeric(format!("{what} = {v}")));
    }
    if !cli.overrides.quiet {
        eprintln!("wrote {}", dir.display());
    }
    Ok(())
}

/// Per-trial CSV columns.
const TRIAL_HEADER: [&str; 4] = ["n", "trial", "success", "value"];
/// Rate CSV columns.
const RATE_HEADER: [&str; 6] = ["n", "trials", "successes", "rate", "wilson_lo", "wilson_hi"];
/// Estimator CSV columns.
const ESTIMATOR_HEADER: [&str; 6] = ["estimator", "n", "value", "stderr", "trials", "seed"];

#[derive(Serialize)]
struct CertifiedRecord {
    n: usize,
    trial: usize,
    #[serde(flatten)]
    certificate: CertificateRecord,
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    subcommand: &'a str,
    seed: u64,
    #[serde(flatten)]
    body: T,
}

struct Run<'a> {
    cfg: &'a RunConfig,
    exp: &'a ExperimentConfig,
    out: &'a mut OutDir,
    name: &'static str,
    quiet: bool,
    /// Summary values that must be finite.
    checked: Vec<(String, f64)>,
}

fn rate_rows(report: &RateReport) -> Vec<Vec<String>> {
    report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.trials.to_string(),
                r.successes.to_string(),
                real(r.rate),
                real(r.wilson_lo),
                real(r.wilson_hi),
            ]
        })
        .collect()
}

fn trial_rows(outcomes: &[TrialOutcome]) -> Vec<Vec<String>> {
    outcomes
        .iter()
        .map(|o| vec![o.n.to_string(), o.trial.to_string(), u8::from(o.success).to_string(), real(o.value)])
        .collect()
}

fn estimator_rows(rows: &[EstimatorRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.estimator.clone(),
                r.n.to_string(),
                real(r.value),
                real(r.stderr),
                r.trials.to_string(),
                r.seed.to_string(),
            ]
        })
        .collect()
}

fn eps_suffix(eps: &[f64], e: f64) -> String {
    if eps.len() > 1 {
        format!("_eps{e}")
    } else {
        String::new()
    }
}

impl Run<'_> {
    fn seed(&self) -> u64 {
        self.cfg.experiment.seed
    }

    fn check(&mut self, what: impl Into<String>, v: f64) {
        self.checked.push((what.into(), v));
    }

    fn check_fit(&mut self, what: &str, fit: Option<&DecayFit>) {
        if let Some(f) = fit {
            self.check(format!("{what}.slope"), f.slope);
            self.check(format!("{what}.intercept"), f.intercept);
        }
    }

    fn summary<T: Serialize>(&mut self, body: T) -> io::Result<()> {
        let s = Summary {
            subcommand: self.name,
            seed: self.seed(),
            body,
        };
        self.out.json("summary.json", &s)
    }

    /// `n, value, slope, intercept` for the fitted decay curve.
    fn decay_csv(&mut self, name: &str, report: &RateReport) -> io::Result<()> {
        let Some(fit) = &report.fit else { return Ok(()) };
        let rows: Vec<Vec<String>> = fit
            .n_values
            .iter()
            .zip(&fit.y_values)
            .map(|(n, y)| vec![n.to_string(), real(*y), real(fit.slope), real(fit.intercept)])
            .collect();
        self.out.csv(name, &["n", "value", "slope", "intercept"], &rows)
    }

    fn print_rates(&self, report: &RateReport) {
        if let Some(e) = report.eps {
            say!(self, "eps = {e}");
        }
        for r in &report.rows {
            say!(self, 
                "n = {:>4}  rate = {:.4}  [{:.4}, {:.4}]",
                r.n, r.rate, r.wilson_lo, r.wilson_hi
            );
        }
        if let Some(f) = &report.fit {
            say!(self, "fit: slope = {:.6}  r^2 = {:.4}", f.slope, f.r_squared);
        }
    }

    fn theorem_a(&mut self) -> Result<(), CliError> {
        let mut reports = Vec::new();
        for &e in &self.exp.eps {
            let mut exp = self.exp.clone();
            exp.eps = vec![e];
            let result = theorem_a_experiment(&exp)?;
            let sfx = eps_suffix(&self.exp.eps, e);
            self.out.csv(&format!("theorem_a{sfx}.csv"), &RATE_HEADER, &rate_rows(&result.report))?;
            self.out
                .csv(&format!("theorem_a_trials{sfx}.csv"), &TRIAL_HEADER, &trial_rows(&result.outcomes))?;
            self.decay_csv(&format!("theorem_a_decay{sfx}.csv"), &result.report)?;
            let certs: Vec<CertifiedRecord> = result
                .certificates
                .iter()
                .map(|c| CertifiedRecord {
                    n: c.n,
                    trial: c.trial,
                    certificate: c.certificate.record(),
                })
                .collect();
            self.out.json(&format!("certificates{sfx}.json"), &certs)?;
            self.check_fit("fit", result.report.fit.as_ref());
            self.print_rates(&result.report);
            reports.push(result.report);
        }
        self.summary(serde_json::json!({ "reports": reports }))?;
        Ok(())
    }

    fn rates(&mut self, name: &str, r: &RateResult) -> Result<(), CliError> {
        self.out.csv(&format!("{name}.csv"), &RATE_HEADER, &rate_rows(&r.report))?;
        self.out.csv(&format!("{name}_trials.csv"), &TRIAL_HEADER, &trial_rows(&r.outcomes))?;
        self.decay_csv(&format!("{name}_decay.csv"), &r.report)?;
        self.check_fit("fit", r.report.fit.as_ref());
        self.print_rates(&r.report);
        self.summary(serde_json::json!({ "report": r.report }))?;
        Ok(())
    }

    fn density(&mut self) -> Result<(), CliError> {
        let d = theorem_b_density(self.exp)?;
        let mut hits = 0usize;
        let rows: Vec<Vec<String>> = d
            .hits
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                hits += usize::from(h);
                vec![(i + 1).to_string(), u8::from(h).to_string(), real(hits as f64 / (i + 1) as f64)]
            })
            .collect();
        self.out.csv("density.csv", &["n", "hit", "running_density"], &rows)?;
        self.check("density", d.density);
        say!(self, "density = {:.6}  ({} of {})", d.density, d.successes, d.horizon);
        self.summary(serde_json::json!({
            "horizon": d.horizon, "radius": d.radius, "successes": d.successes, "density": d.density,
        }))?;
        Ok(())
    }

    fn independence(&mut self) -> Result<(), CliError> {
        let bandwidth = self.cfg.experiment.bandwidth.get();
        let g = independence_gap_experiment(self.exp, bandwidth)?;
        let rows: Vec<EstimatorRow> = g
            .n_values
            .iter()
            .zip(g.gaps.iter().zip(&g.stderr))
            .map(|(&n, (&value, &stderr))| EstimatorRow {
                estimator: "independence_gap".into(),
                n,
                value,
                stderr,
                trials: self.exp.trials,
                seed: self.seed(),
            })
            .collect();
        self.out.csv("independence.csv", &ESTIMATOR_HEADER, &estimator_rows(&rows))?;
        for r in &rows {
            say!(self, "n = {:>4}  gap = {:.6}  ± {:.6}", r.n, r.value, r.stderr);
            self.check(format!("gap[{}]", r.n), r.value);
        }
        self.check_fit("fit", g.fit.as_ref());
        self.summary(serde_json::json!({ "bandwidth": bandwidth, "result": g }))?;
        Ok(())
    }

    fn lift(&mut self) -> Result<(), CliError> {
        let degree = self.cfg.experiment.degree;
        let r = lifted_repelling_set_test(self.exp, degree)?;
        let rows: Vec<Vec<String>> = r
            .hausdorff
            .iter()
            .enumerate()
            .map(|(t, &h)| vec![degree.to_string(), r.n.to_string(), t.to_string(), real(h)])
            .collect();
        self.out.csv("lift.csv", &["degree", "n", "trial", "hausdorff"], &rows)?;
        self.check("pass_rate", r.pass_rate);
        say!(self, 
            "degree {degree}: {} of {} trials within tolerance, pass rate {:.4}, {}",
            r.close,
            r.trials,
            r.pass_rate,
            if r.passed { "passed" } else { "failed" }
        );
        self.summary(&r)?;
        Ok(())
    }

    /// The configured stationary sample of `measure_1`.
    fn stationary_sample(&self) -> Result<EmpiricalMeasure, CliError> {
        let e = &self.cfg.experiment;
        let mu = &self.exp.measure_1;
        let x0 = CirclePoint::new(e.x0.get());
        Ok(match e.estimator.as_str() {
            "birkhoff" => stationary_measure_birkhoff(mu, x0, e.samples, e.seed)?,
            _ => stationary_measure_push(mu, x0, e.push_n, e.samples, e.seed)?,
        })
    }

    fn stationary(&mut self) -> Result<(), CliError> {
        let nu = self.stationary_sample()?;
        let rows: Vec<Vec<String>> = nu.samples().iter().map(|&x| vec![real(x)]).collect();
        self.out.csv("stationary_samples.csv", &["x"], &rows)?;
        let residual = stationarity_residual(&self.exp.measure_1, &nu, self.seed().wrapping_add(1));
        let threshold = ks_threshold_95(nu.len(), nu.len());
        let ks_uniform = nu.ks_uniform();
        self.check("residual", residual);
        say!(self, "samples = {}  residual = {residual:.6}  ks threshold = {threshold:.6}", nu.len());
        self.summary(serde_json::json!({
            "estimator": self.cfg.experiment.estimator, "samples": nu.len(),
            "residual": residual, "ks_threshold_95": threshold, "ks_uniform": ks_uniform,
        }))?;
        Ok(())
    }

    fn holder(&mut self) -> Result<(), CliError> {
        let nu = self.stationary_sample()?;
        let radii: Vec<f64> = self.cfg.experiment.radii.iter().map(|r| r.get()).collect();
        let h = holder_exponent(&nu, &radii)?;
        let rows: Vec<Vec<String>> = h
            .radii
            .iter()
            .zip(&h.masses)
            .map(|(r, m)| vec![real(*r), real(*m), real(h.alpha), real(h.c)])
            .collect();
        self.out.csv("holder.csv", &["radius", "mass", "alpha", "c"], &rows)?;
        self.check("alpha", h.alpha);
        self.check("c", h.c);
        say!(self, "alpha = {:.6}  c = {:.6}  r^2 = {:.4}", h.alpha, h.c, h.r_squared);
        self.summary(&h)?;
        Ok(())
    }

    fn lyapunov(&mut self) -> Result<(), CliError> {
        let e = &self.cfg.experiment;
        let est = lyapunov_exponent(&self.exp.measure_1, CirclePoint::new(e.x0.get()), e.samples, e.seed)?;
        let row = EstimatorRow {
            estimator: "lyapunov".into(),
            n: e.samples,
            value: est.value,
            stderr: est.stderr,
            trials: est.trials,
            seed: e.seed,
        };
        self.out.csv("estimators.csv", &ESTIMATOR_HEADER, &estimator_rows(&[row]))?;
        self.check("lyapunov", est.value);
        self.check("stderr", est.stderr);
        say!(self, "lyapunov = {:.6} ± {:.6}", est.value, est.stderr);
        self.summary(est)?;
        Ok(())
    }

    fn moment(&mut self) -> Result<(), CliError> {
        let delta = self.cfg.experiment.delta.get();
        let m = moment_integral(&self.exp.measure_1, delta)?;
        let row = EstimatorRow {
            estimator: "moment".into(),
            n: 0,
            value: m,
            stderr: 0.0,
            trials: 0,
            seed: self.seed(),
        };
        self.out.csv("estimators.csv", &ESTIMATOR_HEADER, &estimator_rows(&[row]))?;
        self.check("moment", m);
        say!(self, "{m:?}");
        self.summary(serde_json::json!({ "delta": delta, "moment": m }))?;
        Ok(())
    }

    fn fit_rows(&self, name: &str, fit: &DecayFit) -> Vec<EstimatorRow> {
        fit.n_values
            .iter()
            .zip(fit.y_values.iter().zip(&fit.y_stderr))
            .map(|(&n, (&value, &stderr))| EstimatorRow {
                estimator: name.into(),
                n,
                value,
                stderr,
                trials: self.exp.trials,
                seed: self.seed(),
            })
            .collect()
    }

    fn decay(&mut self, name: &str, fit: DecayFit) -> Result<(), CliError> {
        let rows = self.fit_rows(name, &fit);
        self.out.csv(&format!("{name}.csv"), &ESTIMATOR_HEADER, &estimator_rows(&rows))?;
        for r in &rows {
            say!(self, "n = {:>4}  {name} = {:.6e} ± {:.2e}", r.n, r.value, r.stderr);
        }
        say!(self, "fit: slope = {:.6}  r^2 = {:.4}", fit.slope, fit.r_squared);
        self.check_fit("fit", Some(&fit));
        self.summary(serde_json::json!({ "fit": fit }))?;
        Ok(())
    }

    fn contraction(&mut self) -> Result<(), CliError> {
        let e = &self.cfg.experiment;
        let fit = contraction_in_mean(
            &self.exp.measure_1,
            &e.contraction_n,
            self.exp.trials,
            e.pair_grid,
            e.s.get(),
            e.seed,
        )?;
        self.decay("contraction", fit)
    }

    fn repulsor(&mut self) -> Result<(), CliError> {
        let e = &self.cfg.experiment;
        let fit = repulsor_decay(&self.exp.measure_1, &e.decay_n, self.exp.trials, self.exp.x0, e.seed)?;
        self.decay("repulsor", fit)
    }

    fn pingpong(&mut self, built: &Built) -> Result<(), CliError> {
        if let Some((f, g, Some(a))) = &built.pair {
            let c = check_certificate(f, g, a[0], a[1], a[2], a[3]);
            self.out.json("certificate.json", &c.record())?;
            say!(self, "verified = {}  min margin = {:.6e}", c.verified, c.margins.min());
            self.summary(serde_json::json!({ "verified": c.verified, "margins": c.margins }))?;
            return Ok(());
        }
        let mut exp = self.exp.clone();
        exp.n_values = vec![self.exp.n_max()];
        exp.eps.truncate(1);
        let result = theorem_a_experiment(&exp)?;
        let certs: Vec<CertifiedRecord> = result
            .certificates
            .iter()
            .map(|c| CertifiedRecord {
                n: c.n,
                trial: c.trial,
                certificate: c.certificate.record(),
            })
            .collect();
        self.out.json("certificates.json", &certs)?;
        self.print_rates(&result.report);
        self.summary(serde_json::json!({ "report": result.report, "certified": certs.len() }))?;
        Ok(())
    }

    fn relator(&mut self, built: &Built) -> Result<(), CliError> {
        let first = |mu: &StepMeasure| -> CircleMap { mu.atom(0).clone() };
        let (f, g) = match &built.pair {
            Some((f, g, _)) => (f.clone(), g.clone()),
            None => (first(&self.exp.measure_1), first(&self.exp.measure_2)),
        };
        let r = &self.cfg.experiment.relator;
        let result = relator_search(&f, &g, r.max_len, r.probes, r.tol.get());
        self.out.json("relator.json", &result)?;
        match &result.spelled {
            Some(w) => say!(self, "{w}"),
            None => say!(self, "no relator up to length {}", r.max_len),
        }
        self.summary(&result)?;
        Ok(())
    }
}

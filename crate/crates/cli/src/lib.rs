//! Command-line verification reports for radial waves on the Heisenberg group.
//!
//! Every command prints one JSON envelope with the echoed configuration, the results, the
//! tolerance and verdict of every check, and the wall time. The exit code is 0 when all checks
//! pass, 1 when a check fails or a computation errors, 2 on a usage error and 3 when a solver
//! does not converge.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hw_core::bergman::DEFAULT_CUBATURE_ORDER;
use hw_core::linearized::{
    assemble_coercivity, fd_compare, kernel_residuals, margin_report, rayleigh_sample, sphere_eigencheck,
    symmetry_gram, symmetry_jacobian, SphereMode, MARGIN_STABILITY,
};
use hw_core::spectral::{
    l4_norm_grid, synthesize, GridField, ProfileFile, SigmaGrid, UhpCubature, DEFAULT_NR, DEFAULT_NSIGMA,
    DEFAULT_SIGMA_MAX, DEFAULT_SIGMA_MIN,
};
use hw_core::variational::{estimate_i0, solve_qbeta, solve_qbeta_path, solve_qplus, QBetaConfig, QPlusConfig, I_PLUS};
use hw_core::HwError;
use serde::Serialize;
use serde_json::{json, Value};

/// Version of the report layout.
pub const SCHEMA: u32 = 1;

/// Exit code of a run whose checks all pass.
pub const EXIT_PASS: i32 = 0;
/// Exit code of a failed check or a computation error.
pub const EXIT_FAIL: i32 = 1;
/// Exit code of a usage error.
pub const EXIT_USAGE: i32 = 2;
/// Exit code of a solver that did not converge.
pub const EXIT_NO_CONVERGENCE: i32 = 3;

/// Verification reports for the Heisenberg-group wave numerics.
#[derive(Debug, Parser)]
#[command(name = "hw", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by all commands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<String>,
    /// Replace the tolerance of every check.
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
    /// Largest σ node of the profile grid.
    #[arg(long = "sigma-max", global = true, default_value_t = DEFAULT_SIGMA_MAX)]
    pub sigma_max: f64,
    /// Number of σ nodes of the profile grid.
    #[arg(long, global = true, default_value_t = DEFAULT_NSIGMA)]
    pub nsigma: usize,
    /// Number of bands per sign in the traveling-wave basis.
    #[arg(long, global = true, default_value_t = 8)]
    pub bands: usize,
    /// Real-space synthesis grid as N_s,L_s.
    #[arg(long, global = true, value_name = "NS,LS", value_parser = parse_grid)]
    pub grid: Option<(usize, f64)>,
    /// Seed of the random samples.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
}

/// The commands.
#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Coercivity constant, gap and Bergman-space inner products.
    Constants,
    /// The limiting ground state Q₊.
    Qplus {
        /// Also write the canonical profile to this file.
        #[arg(long, value_name = "FILE")]
        profile: Option<String>,
    },
    /// The traveling wave Q_β.
    Qbeta {
        #[arg(long)]
        beta: f64,
    },
    /// Seeded Rayleigh quotients of the linearized operator.
    Coercivity {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// The family Q_β as β → 1.
    Convergence {
        /// Comma-separated speeds in increasing order.
        #[arg(long, value_delimiter = ',', default_value = "0.9,0.99,0.999")]
        betas: Vec<f64>,
    },
    /// The derivative Q̇_β against a central difference.
    Qdot {
        #[arg(long, default_value_t = 0.95)]
        beta: f64,
        #[arg(long, default_value_t = 1e-3)]
        dbeta: f64,
    },
    /// Rayleigh quotients of the sphere pullbacks.
    Spectrum,
}

fn parse_grid(s: &str) -> Result<(usize, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected NS,LS, got {s:?}"))?;
    let ns = a.trim().parse::<usize>().map_err(|e| format!("N_s: {e}"))?;
    let ls = b.trim().parse::<f64>().map_err(|e| format!("L_s: {e}"))?;
    Ok((ns, ls))
}

/// How a check compares its value with the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// |value − target| ≤ tolerance.
    Absolute,
    /// |value − target| ≤ tolerance·|target|.
    Relative,
    /// value ≤ target + tolerance.
    AtMost,
    /// value ≥ target − tolerance.
    AtLeast,
}

/// One verified number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub value: f64,
    pub target: f64,
    pub kind: CheckKind,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(value: f64, target: f64, kind: CheckKind, tolerance: f64) -> Self {
        let pass = match kind {
            CheckKind::Absolute => (value - target).abs() <= tolerance,
            CheckKind::Relative => (value - target).abs() <= tolerance * target.abs(),
            CheckKind::AtMost => value <= target + tolerance,
            CheckKind::AtLeast => value >= target - tolerance,
        };
        Self {
            value,
            target,
            kind,
            tolerance,
            pass,
        }
    }
}

/// The report printed by every command.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub schema: u32,
    pub command: String,
    pub config_echo: Value,
    pub results: Value,
    pub tolerances: BTreeMap<String, f64>,
    pub pass_fail: BTreeMap<String, bool>,
    pub wall_time_ms: u64,
}

impl ReportEnvelope {
    /// True when every check passes.
    pub fn all_pass(&self) -> bool {
        self.pass_fail.values().all(|p| *p)
    }
}

/// Checks of one command, with the tolerance override applied.
struct Checks {
    tol: Option<f64>,
    items: BTreeMap<String, Check>,
}

impl Checks {
    fn new(tol: Option<f64>) -> Self {
        Self {
            tol,
            items: BTreeMap::new(),
        }
    }

    fn add(&mut self, name: impl Into<String>, value: f64, target: f64, kind: CheckKind, tolerance: f64) {
        let t = self.tol.unwrap_or(tolerance);
        self.items.insert(name.into(), Check::new(value, target, kind, t));
    }

    /// A yes/no property, recorded as value 1 against target 1.
    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        let v = if ok { 1.0 } else { 0.0 };
        self.items
            .insert(name.into(), Check::new(v, 1.0, CheckKind::Absolute, 0.0));
    }
}

/// Outcome of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub code: i32,
    /// The JSON report, or the usage or error message.
    pub text: String,
    pub envelope: Option<ReportEnvelope>,
    /// Destination given by `--out`.
    pub out: Option<String>,
}

fn exit_for(e: &HwError) -> i32 {
    match e {
        HwError::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_FAIL,
    }
}

/// Parses `argv` (program name first), runs the command and renders the report.
pub fn run<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
            return RunOutput {
                code,
                text: e.to_string(),
                envelope: None,
                out: None,
            };
        }
    };
    match execute(&cli) {
        Ok(env) => {
            let code = if env.all_pass() { EXIT_PASS } else { EXIT_FAIL };
            let text = serde_json::to_string_pretty(&env).expect("reports serialize") + "\n";
            RunOutput {
                code,
                text,
                envelope: Some(env),
                out: cli.global.out.clone(),
            }
        }
        Err(e) => RunOutput {
            code: exit_for(&e),
            text: format!("error: {e}\n"),
            envelope: None,
            out: None,
        },
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Constants => "constants",
        Command::Qplus { .. } => "qplus",
        Command::Qbeta { .. } => "qbeta",
        Command::Coercivity { .. } => "coercivity",
        Command::Convergence { .. } => "convergence",
        Command::Qdot { .. } => "qdot",
        Command::Spectrum => "spectrum",
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> hw_core::Result<ReportEnvelope> {
    let start = Instant::now();
    let g = &cli.global;
    let mut checks = Checks::new(g.tol);
    let results = match &cli.command {
        Command::Constants => constants(g, &mut checks)?,
        Command::Qplus { profile } => qplus(g, profile.as_deref(), &mut checks)?,
        Command::Qbeta { beta } => qbeta(g, *beta, &mut checks)?,
        Command::Coercivity { samples } => coercivity(g, *samples, &mut checks)?,
        Command::Convergence { betas } => convergence(g, betas, &mut checks)?,
        Command::Qdot { beta, dbeta } => qdot(g, *beta, *dbeta, &mut checks)?,
        Command::Spectrum => spectrum(&mut checks)?,
    };
    let mut results = results;
    results["checks"] = serde_json::to_value(&checks.items).expect("checks serialize");
    let config_echo = json!({
        "command": &cli.command,
        "global": g,
        "threads": rayon::current_num_threads(),
    });
    Ok(ReportEnvelope {
        schema: SCHEMA,
        command: command_name(&cli.command).to_string(),
        config_echo,
        results,
        tolerances: checks.items.iter().map(|(k, c)| (k.clone(), c.tolerance)).collect(),
        pass_fail: checks.items.iter().map(|(k, c)| (k.clone(), c.pass)).collect(),
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

fn qbeta_config(g: &GlobalArgs) -> QBetaConfig {
    QBetaConfig {
        nk: g.bands,
        ..QBetaConfig::default()
    }
}

fn constants(g: &GlobalArgs, checks: &mut Checks) -> hw_core::Result<Value> {
    let r = assemble_coercivity(DEFAULT_CUBATURE_ORDER, 200, g.seed)?;
    let s2 = 2f64.sqrt();
    let p0 = [(2.0, 1e-7), (10.0 / 9.0, 1e-7), (0.1303955989, 1e-6)];
    for (j, (want, tol)) in p0.iter().enumerate() {
        checks.add(
            format!("p0_inner_{}", j + 1),
            r.p0_inners[j],
            *want,
            CheckKind::Absolute,
            *tol,
        );
    }
    let norms = [PI / 4.0, PI / 8.0, PI / 8.0];
    let fqp = [-2.0 * s2 / 3.0, -2.0 * s2 / 9.0, 2.0 * s2 / 15.0];
    let ftl = [-2.0 * s2 / 15.0, 14.0 * s2 / 45.0, 2.0 * s2 / 35.0];
    for j in 0..3 {
        let t = &r.table_inners;
        checks.add(
            format!("norm_sq_{}", j + 1),
            t.norm_sq[j],
            norms[j],
            CheckKind::Absolute,
            1e-8,
        );
        checks.add(
            format!("with_fq_prime_{}", j + 1),
            t.with_fq_prime[j],
            fqp[j],
            CheckKind::Absolute,
            1e-8,
        );
        checks.add(
            format!("with_f_tilde_{}", j + 1),
            t.with_f_tilde[j],
            ftl[j],
            CheckKind::Absolute,
            1e-8,
        );
    }
    checks.add("C", r.c, 0.2046049976, CheckKind::Absolute, 1e-6);
    checks.add("delta", r.delta, 0.25, CheckKind::AtLeast, 0.0);
    for (name, v) in ["translation", "phase", "dilation"].iter().zip(r.kernel_residuals) {
        checks.add(format!("kernel_{name}"), v, 0.0, CheckKind::AtMost, 1e-6);
    }
    checks.add("rayleigh_min", r.rayleigh_min, r.delta, CheckKind::AtLeast, 1e-3);
    let grid = Arc::new(SigmaGrid::default_grid());
    let h = PI * PI / 2.0;
    let reference = [[h, h, 0.0], [0.0, h, 0.0], [0.0, 0.0, 2.0 * h]];
    let jacobian = symmetry_jacobian(grid.clone())?;
    let gram = symmetry_gram(grid)?;
    let mismatch: Vec<[usize; 2]> = (0..3)
        .flat_map(|a| (0..3).map(move |b| [a, b]))
        .filter(|&[a, b]| (gram[a][b] - reference[a][b]).abs() > 1e-6)
        .collect();
    Ok(json!({
        "report": r,
        "symmetry_jacobian": {
            "finite_difference": jacobian,
            "gram": gram,
            "reference": reference,
            "gram_vs_reference_mismatch": mismatch,
        },
    }))
}

fn qplus(g: &GlobalArgs, profile_out: Option<&str>, checks: &mut Checks) -> hw_core::Result<Value> {
    let config = QPlusConfig {
        sigma_min: DEFAULT_SIGMA_MIN,
        sigma_max: g.sigma_max,
        n_sigma: g.nsigma,
        ..QPlusConfig::default()
    };
    let sol = solve_qplus(&config)?;
    let deviation = sol
        .profile
        .grid()
        .nodes()
        .iter()
        .zip(sol.profile.values())
        .map(|(s, v)| (v - 2.0 * PI * (-s).exp()).norm())
        .fold(0.0, f64::max);
    checks.add(
        "functional_value",
        sol.result.functional_value,
        I_PLUS,
        CheckKind::Relative,
        1e-4,
    );
    checks.add(
        "exp_fit_residual",
        sol.fit.relative_residual,
        0.0,
        CheckKind::AtMost,
        1e-3,
    );
    checks.add("pointwise_deviation", deviation, 0.0, CheckKind::AtMost, 1e-3);
    let mut grid_report = Value::Null;
    if let Some((ns, ls)) = g.grid {
        let template = GridField::template(DEFAULT_NR, 1.0, ns, ls)?;
        match synthesize(&sol.result.field, &template).and_then(|u| l4_norm_grid(&u)) {
            Ok(l4) => {
                checks.add("l4_fourth_grid", l4.powi(4), I_PLUS, CheckKind::Relative, 1e-3);
                grid_report = json!({ "n_s": ns, "l_s": ls, "l4_fourth": l4.powi(4) });
            }
            Err(e @ HwError::TruncationWarning(_)) => {
                checks.add("l4_fourth_grid", f64::NAN, I_PLUS, CheckKind::Relative, 1e-3);
                grid_report = json!({ "n_s": ns, "l_s": ls, "error": e.to_string() });
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(path) = profile_out {
        std::fs::write(path, ProfileFile::from_profile(&sol.profile).to_json())
            .map_err(|e| HwError::InvalidInput(format!("cannot write {path}: {e}")))?;
    }
    Ok(json!({
        "result": sol.result,
        "fit": sol.fit,
        "canonicalization": sol.canonicalization,
        "pointwise_deviation": deviation,
        "grid_check": grid_report,
        "iterations": sol.history.len() - 1,
    }))
}

fn qbeta_summary(s: &hw_core::variational::QBetaSolution) -> Value {
    json!({
        "beta": s.result.beta,
        "functional_value": s.result.functional_value,
        "normalized_value": s.normalized_value,
        "quad_form": s.result.quad_form,
        "l4_fourth": s.result.l4_fourth,
        "residual": s.result.residual,
        "iterations": s.result.iterations,
        "h1_sq": s.h1_sq,
        "r_beta_h1": s.r_beta_h1,
        "delta": s.delta,
        "tail": s.tail,
    })
}

fn qbeta(g: &GlobalArgs, beta: f64, checks: &mut Checks) -> hw_core::Result<Value> {
    let config = qbeta_config(g);
    let s = solve_qbeta(beta, &config)?;
    checks.add(
        "normalized_value",
        s.normalized_value,
        I_PLUS,
        CheckKind::AtMost,
        1e-3 * I_PLUS,
    );
    checks.add("residual", s.result.residual, 0.0, CheckKind::AtMost, 1e-3);
    checks.add("tail", s.tail, 0.0, CheckKind::AtMost, 1e-2);
    Ok(json!({ "config": config, "solution": qbeta_summary(&s) }))
}

fn coercivity(g: &GlobalArgs, samples: usize, checks: &mut Checks) -> hw_core::Result<Value> {
    let r = assemble_coercivity(DEFAULT_CUBATURE_ORDER, 1, g.seed)?;
    let s = rayleigh_sample(samples, g.seed)?;
    checks.add("rayleigh_min", s.min, r.delta, CheckKind::AtLeast, 1e-3);
    Ok(json!({
        "samples": samples,
        "seed": g.seed,
        "accepted": s.quotients.len(),
        "excluded": s.excluded,
        "min": s.min,
        "max": s.quotients.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        "delta": r.delta,
    }))
}

/// Least-squares slope of log y against log x.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = x.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn convergence(g: &GlobalArgs, betas: &[f64], checks: &mut Checks) -> hw_core::Result<Value> {
    if betas.len() < 2 || betas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HwError::InvalidInput(
            "--betas needs at least two increasing speeds".into(),
        ));
    }
    let config = qbeta_config(g);
    let sols = solve_qbeta_path(betas, &config)?;
    let gaps: Vec<f64> = betas.iter().map(|b| 1.0 - b).collect();
    let deltas: Vec<f64> = sols.iter().map(|s| s.delta).collect();
    let values: Vec<f64> = sols.iter().map(|s| s.normalized_value).collect();
    let ratios: Vec<f64> = sols.iter().zip(&gaps).map(|(s, e)| s.r_beta_h1 / e.sqrt()).collect();
    let rmax = ratios.iter().cloned().fold(0.0, f64::max);
    let rmin = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.flag("normalized_value_increasing", values.windows(2).all(|w| w[1] > w[0]));
    let vmax = values.iter().cloned().fold(0.0, f64::max);
    checks.add("normalized_value_max", vmax, I_PLUS, CheckKind::AtMost, 1e-3 * I_PLUS);
    checks.flag("delta_decreasing", deltas.windows(2).all(|w| w[1] < w[0]));
    checks.add("r_beta_ratio_spread", rmax / rmin, 3.0, CheckKind::AtMost, 0.0);
    let i0_config = QBetaConfig {
        nj: 16,
        nk: config.nk.min(6),
        order: 61,
        ..config
    };
    let i0 = estimate_i0(&i0_config)?;
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.add(
        "normalized_value_above_i0",
        vmin,
        i0.result.functional_value,
        CheckKind::AtLeast,
        0.0,
    );
    let table: Vec<Value> = sols.iter().map(qbeta_summary).collect();
    Ok(json!({
        "config": config,
        "table": table,
        "one_minus_beta": gaps,
        "r_beta_over_sqrt_gap": ratios,
        "delta_slope": log_slope(&gaps, &deltas),
        "r_beta_slope": log_slope(&gaps, &sols.iter().map(|s| s.r_beta_h1).collect::<Vec<_>>()),
        "i0_estimate": { "config": i0_config, "value": i0.result.functional_value, "residual": i0.result.residual },
    }))
}

fn qdot(g: &GlobalArgs, beta: f64, dbeta: f64, checks: &mut Checks) -> hw_core::Result<Value> {
    let config = qbeta_config(g);
    let s = solve_qbeta(beta, &config)?;
    let cmp = fd_compare(&s, dbeta, &config)?;
    let margin = margin_report(&s, config.nj, &config)?;
    let kernel = kernel_residuals(&s)?;
    checks.add("fd_relative_error", cmp.relative_error, 0.0, CheckKind::AtMost, 1e-2);
    checks.add("system_residual", cmp.residual, 0.0, CheckKind::AtMost, 1e-8);
    checks.add("margin", margin.margin, 0.0, CheckKind::AtLeast, 0.0);
    checks.add(
        "margin_refinement_change",
        margin.relative_change,
        0.0,
        CheckKind::AtMost,
        MARGIN_STABILITY,
    );
    checks.add("kernel_translation", kernel.translation, 0.0, CheckKind::AtMost, 1e-4);
    checks.add("kernel_phase", kernel.phase, 0.0, CheckKind::AtMost, 1e-4);
    Ok(json!({
        "config": config,
        "solution": qbeta_summary(&s),
        "comparison": cmp,
        "margin": margin,
        "kernel_residuals": kernel,
    }))
}

fn spectrum(checks: &mut Checks) -> hw_core::Result<Value> {
    let rule = UhpCubature::new(DEFAULT_CUBATURE_ORDER, DEFAULT_CUBATURE_ORDER);
    let mut table = Vec::new();
    for mode in SphereMode::ALL {
        let r = sphere_eigencheck(mode, &rule);
        let name = format!("{mode:?}");
        checks.add(
            format!("rayleigh_{name}"),
            r,
            mode.expected(),
            CheckKind::Absolute,
            1e-3,
        );
        table.push(json!({ "mode": name, "quotient": r, "expected": mode.expected() }));
    }
    Ok(json!({ "table": table }))
}

/// Caps the global thread pool at `HW_THREADS` when the variable holds a positive integer.
pub fn configure_threads() -> Result<(), String> {
    match std::env::var("HW_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| format!("HW_THREADS must be a positive integer, got {v:?}"))?;
            if n == 0 {
                return Err("HW_THREADS must be positive".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
        Err(_) => Ok(()),
    }
}

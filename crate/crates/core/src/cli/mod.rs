//! Run configuration, report envelopes and the subcommands behind the `vlab` binary.
//!
//! Every run writes its data artifact to `--out` (or stdout) and exactly one
//! [`ReportEnvelope`] as JSON to stderr (and to `--report` when given). Exit codes: 0 all
//! checks pass, 1 a check failed, 2 resource or budget exhausted, 3 configuration error.

mod commands;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::operators::Method;
use crate::weights::{BranchId, BranchParams, Sign};
use crate::{c, Error, Result, C64, I};

pub use commands::{
    cmd_bethe_dispersion, cmd_bethe_solve, cmd_bethe_thermo, cmd_census, cmd_relations, cmd_spectrum, cmd_verify,
    root_csv, sample_points, CensusModel, HamiltonianSource, Outcome, Scope,
};

/// Output encoding of data artifacts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a run depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub branch: BranchId,
    pub epsilon1: Sign,
    pub epsilon2: Sign,
    pub d_sign: Sign,
    /// `[re, im]` of γ.
    pub gamma: [f64; 2],
    /// `[re, im]` of the Hamiltonian prefactor; defaults to `−i` for 2B and `1` otherwise.
    pub j0: Option<[f64; 2]>,
    /// Seed of the SplitMix64 spectral-point sampler.
    pub seed: u64,
    pub samples: usize,
    /// Overrides every check tolerance.
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(rename = "L")]
    pub chain_length: Option<usize>,
    pub sector: Option<i32>,
    pub workers: Option<usize>,
    /// Added to γ in one of the compared objects to break integrability on purpose.
    pub gamma_perturb: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            branch: BranchId::B2B,
            epsilon1: Sign::Plus,
            epsilon2: Sign::Plus,
            d_sign: Sign::Plus,
            gamma: [0.9, 0.0],
            j0: None,
            seed: 20,
            samples: 20,
            tol: None,
            out: None,
            format: None,
            chain_length: None,
            sector: None,
            workers: None,
            gamma_perturb: 0.0,
        }
    }
}

impl RunConfig {
    /// Parse a JSON config; unknown keys are rejected.
    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&src)
    }

    pub fn params(&self) -> BranchParams {
        BranchParams::new(c(self.gamma[0], self.gamma[1]))
            .with_signs(self.epsilon1, self.epsilon2, self.d_sign)
            .with_j0(self.j0_value())
    }

    /// Parameters with `gamma_perturb` added to γ.
    pub fn perturbed_params(&self) -> BranchParams {
        let mut p = self.params();
        p.gamma += self.gamma_perturb;
        p
    }

    pub fn j0_value(&self) -> C64 {
        match (self.j0, self.branch) {
            (Some([re, im]), _) => c(re, im),
            (None, BranchId::B2B) => -I,
            (None, _) => c(1.0, 0.0),
        }
    }

    pub fn tolerance(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn chain_length_or(&self, default: usize) -> usize {
        self.chain_length.unwrap_or(default)
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1)
    }
}

/// Result of one named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes iff `residual <= tolerance`.
    pub fn bound(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), passed: residual <= tolerance, residual, tolerance, detail: None }
    }

    /// Passes iff `ok`; the residual records the mismatch count or size.
    pub fn exact(name: impl Into<String>, ok: bool, residual: f64, detail: String) -> Self {
        Check { name: name.into(), passed: ok, residual, tolerance: 0.0, detail: Some(detail) }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// The single report of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub sampler: String,
    pub wall_time_s: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportEnvelope {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        ReportEnvelope {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
            sampler: format!("splitmix64(seed={})", config.seed),
            wall_time_s: 0.0,
            checks: vec![],
            passed: true,
            exit_code: 0,
            error: None,
        }
    }

    fn finish(&mut self, checks: Vec<Check>, error: Option<&Error>, started: Instant) {
        self.wall_time_s = started.elapsed().as_secs_f64();
        self.checks = checks;
        self.error = error.map(|e| e.to_string());
        self.exit_code = match error {
            Some(e) => exit_code(e),
            None if self.checks.iter().all(|c| c.passed) => 0,
            None => 1,
        };
        self.passed = self.exit_code == 0;
    }
}

/// Exit code of an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } | Error::Io(_) => 2,
        Error::Config(_) | Error::Json(_) | Error::Seed(_) => 3,
        Error::Pole { .. } | Error::DegenerateWeight(_) | Error::NoConvergence { .. } | Error::ComplexEnergy { .. } => 1,
    }
}

/// Parse `RE[,IM]`.
pub fn parse_gamma(s: &str) -> std::result::Result<[f64; 2], String> {
    let mut it = s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{s}': {e}")));
    let re = it.next().ok_or("empty gamma")??;
    let im = it.next().transpose()?.unwrap_or(0.0);
    if it.next().is_some() {
        return Err(format!("'{s}': expected RE[,IM]"));
    }
    Ok([re, im])
}

fn parse_sign(s: &str) -> std::result::Result<Sign, String> {
    s.parse::<Sign>().map_err(|e| e.to_string())
}

fn parse_branch(s: &str) -> std::result::Result<BranchId, String> {
    s.parse::<BranchId>().map_err(|e| e.to_string())
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Clone, Debug, Default, Args)]
pub struct ConfigArgs {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// 1A, 1B, 2A, 2B, 1S or 2S.
    #[arg(long, global = true, value_parser = parse_branch)]
    pub branch: Option<BranchId>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_sign)]
    pub eps1: Option<Sign>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_sign)]
    pub eps2: Option<Sign>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_sign)]
    pub dsign: Option<Sign>,
    /// γ as RE[,IM].
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_gamma)]
    pub gamma: Option<[f64; 2]>,
    /// Chain length.
    #[arg(long = "L", global = true)]
    pub chain_length: Option<usize>,
    /// Total Sz sector.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sector: Option<i32>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides every check tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Data artifact destination; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Also write the envelope here.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

impl ConfigArgs {
    /// Flags over config file over defaults.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        macro_rules! over {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$field = v.into(); })*
            };
        }
        over!(branch => branch, eps1 => epsilon1, eps2 => epsilon2, dsign => d_sign, gamma => gamma, seed => seed);
        over!(chain_length => chain_length, sector => sector, tol => tol, out => out, format => format, workers => workers);
        Ok(cfg)
    }
}

#[derive(Debug, Parser)]
#[command(name = "vlab", version, about = "Nineteen-vertex model verification and data export")]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sampled verification of integrability properties.
    Verify {
        /// Checks to run; all when omitted.
        #[arg(long, value_enum)]
        scope: Vec<Scope>,
        /// Shift γ of one compared object by this amount.
        #[arg(long, allow_hyphen_values = true)]
        gamma_perturb: Option<f64>,
        /// Number of sampled spectral points.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Symbolic census of the Yang-Baxter components.
    Census {
        #[arg(long, value_enum, default_value = "pt")]
        model: CensusModel,
        /// Write the distinct census equations as JSON.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Hamiltonian eigenvalues per charge sector.
    Spectrum {
        /// Eigenvalues per sector; all (dense) or 6 (iterative) when omitted.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "dense")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "log-derivative")]
        hamiltonian: HamiltonianSource,
    },
    /// Branch-2B Bethe ansatz.
    Bethe {
        #[command(subcommand)]
        action: BetheAction,
    },
    /// The functional-relation catalog.
    Relations {
        /// Write the catalog as JSON.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Dense,
    Iterative,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Dense => Method::Dense,
            MethodArg::Iterative => Method::Iterative,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum BetheAction {
    /// Ground-state roots as CSV (or JSON).
    Solve,
    /// Energy per site in the thermodynamic limit.
    Thermo,
    /// Hole dispersion relation.
    Dispersion {
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

fn write_artifact(out: Option<&Path>, data: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, data)?,
        None => print!("{data}"),
    }
    Ok(())
}

fn dispatch(command: &Command, cfg: &mut RunConfig) -> Result<Outcome> {
    match command {
        Command::Verify { scope, gamma_perturb, samples } => {
            if let Some(g) = gamma_perturb {
                cfg.gamma_perturb = *g;
            }
            if let Some(n) = samples {
                cfg.samples = *n;
            }
            cmd_verify(cfg, scope)
        }
        Command::Census { model, dump } => cmd_census(cfg, *model, dump.as_deref()),
        Command::Spectrum { k, method, hamiltonian } => cmd_spectrum(cfg, cfg.sector, *k, (*method).into(), *hamiltonian),
        Command::Bethe { action } => match action {
            BetheAction::Solve => cmd_bethe_solve(cfg),
            BetheAction::Thermo => cmd_bethe_thermo(cfg),
            BetheAction::Dispersion { samples } => cmd_bethe_dispersion(cfg, *samples),
        },
        Command::Relations { dump } => cmd_relations(cfg, dump.as_deref()),
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Verify { .. } => "verify".into(),
        Command::Census { .. } => "census".into(),
        Command::Spectrum { .. } => "spectrum".into(),
        Command::Bethe { action } => format!(
            "bethe {}",
            match action {
                BetheAction::Solve => "solve",
                BetheAction::Thermo => "thermo",
                BetheAction::Dispersion { .. } => "dispersion",
            }
        ),
        Command::Relations { .. } => "relations".into(),
    }
}

/// Run a parsed command; returns the envelope after writing the artifact.
pub fn execute(cli: &Cli) -> ReportEnvelope {
    let started = Instant::now();
    let name = command_name(&cli.command);
    let mut cfg = match cli.config.resolve() {
        Ok(cfg) => cfg,
        Err(e) => {
            let mut env = ReportEnvelope::new(&name, &RunConfig::default());
            env.finish(vec![], Some(&e), started);
            return env;
        }
    };
    let run = |cfg: &mut RunConfig| dispatch(&cli.command, cfg);
    let result = match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers()).build() {
        Ok(pool) => pool.install(|| run(&mut cfg)),
        Err(_) => run(&mut cfg),
    };
    let result = result.and_then(|o| {
        if let Some(data) = &o.data {
            write_artifact(cfg.out.as_deref(), data)?;
        }
        Ok(o.checks)
    });
    let mut env = ReportEnvelope::new(&name, &cfg);
    match result {
        Ok(checks) => env.finish(checks, None, started),
        Err(e) => env.finish(vec![], Some(&e), started),
    }
    env
}

/// Human-readable check lines.
pub fn summary(env: &ReportEnvelope) -> String {
    let mut s = String::new();
    for c in &env.checks {
        let _ = writeln!(
            s,
            "{} {} residual={:e} tol={:e}{}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.residual,
            c.tolerance,
            c.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
        );
    }
    if let Some(e) = &env.error {
        let _ = writeln!(s, "ERROR {e}");
    }
    s
}

/// Entry point of the binary: parse, run, report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let env = execute(&cli);
    let json = serde_json::to_string_pretty(&env).expect("envelope serializes");
    eprint!("{}", summary(&env));
    eprintln!("{json}");
    if let Some(p) = &cli.config.report {
        if let Err(e) = std::fs::write(p, &json) {
            eprintln!("cannot write report {}: {e}", p.display());
            return 2;
        }
    }
    env.exit_code
}

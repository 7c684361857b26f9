//! Experiment configuration: an optional JSON document overridden by flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::error::{Classify, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    F1,
    F2,
}

impl Form {
    pub fn label(self) -> &'static str {
        match self {
            Form::F1 => "f1",
            Form::F2 => "f2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Qn,
    Simplex,
}

/// How a penalty coefficient is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "NumberOrText")]
pub enum MuPolicy {
    Value(f64),
    AutoExact,
    AutoSimple,
    AutoRough,
    /// `gap / C_min²` from user-supplied estimates `(E_t, E_0)`.
    AutoCe(f64, f64),
}

impl FromStr for MuPolicy {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let s = s.trim();
        match s {
            "auto-exact" => return Ok(MuPolicy::AutoExact),
            "auto-simple" => return Ok(MuPolicy::AutoSimple),
            "auto-rough" => return Ok(MuPolicy::AutoRough),
            _ => {}
        }
        if let Some(args) = s.strip_prefix("auto-ce(").and_then(|r| r.strip_suffix(')')) {
            let (et, e0) = args
                .split_once(',')
                .ok_or_else(|| anyhow!("auto-ce expects two estimates, `auto-ce(E_t,E_0)`"))?;
            return Ok(MuPolicy::AutoCe(parse_f64(et)?, parse_f64(e0)?));
        }
        parse_f64(s).map(MuPolicy::Value).map_err(|_| {
            anyhow!("unknown mu policy `{s}` (auto-exact, auto-simple, auto-rough, auto-ce(E_t,E_0) or a number)")
        })
    }
}

/// Deflation weight policy for VQD.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "BetaField")]
pub enum BetaPolicy {
    AutoCe,
    AutoRough,
    /// One value per level; the last one repeats.
    Values(Vec<f64>),
}

impl FromStr for BetaPolicy {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s.trim() {
            "auto-ce" => Ok(BetaPolicy::AutoCe),
            "auto-rough" => Ok(BetaPolicy::AutoRough),
            list => Ok(BetaPolicy::Values(parse_list(list)?)),
        }
    }
}

/// `<observable>=<c>[:mu=<policy>]`, or the equivalent JSON object.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "ConstraintField")]
pub struct ConstraintSpec {
    pub observable: String,
    pub target: f64,
    pub mu: Option<MuPolicy>,
}

impl FromStr for ConstraintSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let (observable, rest) = s
            .split_once('=')
            .ok_or_else(|| anyhow!("constraint `{s}` is not of the form <observable>=<c>[:mu=<policy>]"))?;
        let (target, mu) = match rest.split_once(':') {
            Some((t, opt)) => {
                let policy = opt
                    .strip_prefix("mu=")
                    .ok_or_else(|| anyhow!("unknown constraint option `{opt}`"))?;
                (t, Some(policy.parse()?))
            }
            None => (rest, None),
        };
        if observable.is_empty() {
            bail!("constraint `{s}` names no observable");
        }
        Ok(ConstraintSpec {
            observable: observable.to_string(),
            target: parse_f64(target)?,
            mu,
        })
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberOrText {
    Number(f64),
    Text(String),
}

impl TryFrom<NumberOrText> for MuPolicy {
    type Error = anyhow::Error;

    fn try_from(v: NumberOrText) -> anyhow::Result<Self> {
        match v {
            NumberOrText::Number(x) => Ok(MuPolicy::Value(x)),
            NumberOrText::Text(s) => s.parse(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BetaField {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl TryFrom<BetaField> for BetaPolicy {
    type Error = anyhow::Error;

    fn try_from(v: BetaField) -> anyhow::Result<Self> {
        match v {
            BetaField::Number(x) => Ok(BetaPolicy::Values(vec![x])),
            BetaField::List(xs) => Ok(BetaPolicy::Values(xs)),
            BetaField::Text(s) => s.parse(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConstraintField {
    Text(String),
    Object {
        observable: String,
        target: f64,
        #[serde(default)]
        mu: Option<MuPolicy>,
    },
}

impl TryFrom<ConstraintField> for ConstraintSpec {
    type Error = anyhow::Error;

    fn try_from(v: ConstraintField) -> anyhow::Result<Self> {
        match v {
            ConstraintField::Text(s) => s.parse(),
            ConstraintField::Object { observable, target, mu } => Ok(ConstraintSpec { observable, target, mu }),
        }
    }
}

fn parse_f64(s: &str) -> anyhow::Result<f64> {
    let x: f64 = s.trim().parse().with_context(|| format!("`{s}` is not a number"))?;
    if !x.is_finite() {
        bail!("`{s}` is not finite");
    }
    Ok(x)
}

fn parse_list(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

/// The JSON config file. Every field is optional; flags override it.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub hamiltonian: Option<String>,
    #[serde(default)]
    pub constraints: Vec<ConstraintSpec>,
    pub form: Option<Form>,
    pub depth: Option<usize>,
    pub optimizer: Option<OptimizerKind>,
    pub seeds: Option<usize>,
    pub master_seed: Option<u64>,
    pub noise_p: Option<f64>,
    pub level: Option<usize>,
    pub beta: Option<BetaPolicy>,
    pub mu_values: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .config()?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))
            .config()
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Pauli-sum file or `builtin:<name>:<n>[:key=value...]`.
    #[arg(long)]
    pub hamiltonian: Option<String>,
    /// `<observable>=<c>[:mu=<policy>]`; repeatable.
    #[arg(long = "constraint")]
    pub constraints: Vec<ConstraintSpec>,
    #[arg(long, value_enum)]
    pub form: Option<Form>,
    /// Number of entangling blocks in the ansatz.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, value_enum)]
    pub optimizer: Option<OptimizerKind>,
    /// Random starts per optimization.
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub master_seed: Option<u64>,
    /// Global depolarizing probability.
    #[arg(long)]
    pub noise_p: Option<f64>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Flags that only some subcommands take.
#[derive(Debug, Clone, Default)]
pub struct ExtraArgs {
    pub level: Option<usize>,
    pub beta: Option<BetaPolicy>,
    pub mu_values: Option<Vec<f64>>,
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub hamiltonian: String,
    pub constraints: Vec<ConstraintSpec>,
    pub form: Form,
    pub depth: usize,
    pub optimizer: OptimizerKind,
    pub seeds: usize,
    pub master_seed: u64,
    pub noise_p: Option<f64>,
    pub level: Option<usize>,
    pub beta: Option<BetaPolicy>,
    pub mu_values: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_DEPTH: usize = 2;
pub const DEFAULT_SEEDS: usize = 10;

impl Settings {
    pub fn resolve(args: CommonArgs, extra: ExtraArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let hamiltonian = args
            .hamiltonian
            .or(file.hamiltonian)
            .ok_or_else(|| anyhow!("no Hamiltonian given (--hamiltonian or `hamiltonian` in the config)"))
            .config()?;
        let constraints = if args.constraints.is_empty() {
            file.constraints
        } else {
            args.constraints
        };
        let settings = Settings {
            hamiltonian,
            constraints,
            form: args.form.or(file.form).unwrap_or(Form::F1),
            depth: args.depth.or(file.depth).unwrap_or(DEFAULT_DEPTH),
            optimizer: args.optimizer.or(file.optimizer).unwrap_or(OptimizerKind::Qn),
            seeds: args.seeds.or(file.seeds).unwrap_or(DEFAULT_SEEDS),
            master_seed: args.master_seed.or(file.master_seed).unwrap_or(0),
            noise_p: args.noise_p.or(file.noise_p),
            level: extra.level.or(file.level),
            beta: extra.beta.or(file.beta),
            mu_values: extra.mu_values.or(file.mu_values),
            out: args.out.or(file.out),
        };
        settings.validate()?;
        Ok(settings)
    }

    fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return Err(anyhow!("--seeds must be at least 1")).config();
        }
        if let Some(p) = self.noise_p {
            if !(0.0..1.0).contains(&p) {
                return Err(anyhow!("--noise-p must lie in [0, 1), got {p}")).config();
            }
        }
        Ok(())
    }
}

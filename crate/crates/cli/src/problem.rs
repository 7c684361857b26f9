//! Loading operators, running the oracle and assembling cost functions.

use std::path::Path;

use anyhow::{anyhow, Context};
use penaltyvqe::cost::{CostSpec, PenaltyForm};
use penaltyvqe::model_io::{
    build_heisenberg_chain, build_number_operator, build_s_squared, build_spin_orbital_s_squared,
    build_spin_orbital_sz, build_total_sz, build_transverse_ising, build_z_parity, parse_pauli_sum_bytes,
};
use penaltyvqe::optimizer::{Method, OptimizerConfig};
use penaltyvqe::pauli::PauliSum;
use penaltyvqe::penalty::{mu_exact_multi, mu_rough, mu_simple, universal_c_min, PenaltyConstraint, MATCH_TOL};
use penaltyvqe::spectrum::{
    min_distinct_gap, sector_ground_multi, sector_levels, simultaneous_spectrum_multi, SectorTarget, SpectrumPoint,
    CLUSTER_TOL, DEFAULT_ORACLE_LIMIT,
};
use penaltyvqe::statevector::{AnsatzConfig, NoiseModel};

use crate::config::{ConstraintSpec, Form, MuPolicy, OptimizerKind, Settings};
use crate::error::{Classify, Result};

/// Coefficient used when an automatic policy gives zero: nothing lies
/// strictly below the target, so any positive value works.
pub const FALLBACK_MU: f64 = 1.0;

/// `builtin:<name>:<n>[:key=value...]` or a path to a Pauli-sum file.
pub fn load_hamiltonian(source: &str) -> Result<PauliSum> {
    let Some(rest) = source.strip_prefix("builtin:") else {
        return load_file(Path::new(source));
    };
    let mut parts = rest.split(':');
    let name = parts.next().unwrap_or_default();
    let n: usize = parts
        .next()
        .ok_or_else(|| anyhow!("builtin `{source}` needs a qubit count, e.g. builtin:heisenberg:4"))
        .and_then(|s| s.parse().with_context(|| format!("bad qubit count `{s}`")))
        .config()?;
    let mut coupling = 1.0;
    let mut field = 1.0;
    let mut periodic = false;
    for kv in parts {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got `{kv}`"))
            .config()?;
        match k {
            "j" => coupling = v.parse().with_context(|| format!("bad value `{v}` for j")).config()?,
            "h" => field = v.parse().with_context(|| format!("bad value `{v}` for h")).config()?,
            "periodic" => {
                periodic = v
                    .parse()
                    .with_context(|| format!("bad value `{v}` for periodic"))
                    .config()?
            }
            _ => return Err(anyhow!("unknown builtin parameter `{k}`")).config(),
        }
    }
    match name {
        "heisenberg" => build_heisenberg_chain(n, coupling, periodic).config(),
        "tfim" => build_transverse_ising(n, coupling, field, periodic).config(),
        _ => Err(anyhow!("unknown builtin model `{name}` (heisenberg, tfim)")).config(),
    }
}

fn load_file(path: &Path) -> Result<PauliSum> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .config()?;
    parse_pauli_sum_bytes(&bytes)
        .with_context(|| format!("parsing {}", path.display()))
        .config()
}

/// A named observable with the `C_min` used for the simple and rough
/// coefficient formulas.
#[derive(Debug, Clone)]
pub struct Observable {
    pub label: String,
    pub operator: PauliSum,
    pub c_min: f64,
}

/// Builtin names map to operators on the Hamiltonian's register; anything
/// else is read as a Pauli-sum file, and its `C_min` comes from the oracle.
pub fn load_observable(name: &str, n: usize) -> Result<Observable> {
    let spin_orbitals = || {
        if n.is_multiple_of(2) {
            Ok(n / 2)
        } else {
            Err(anyhow!("`{name}` needs an even qubit count, got {n}"))
        }
    };
    let builtin = match name {
        "sz" => Some((build_total_sz(n).config()?, universal_c_min::S_Z)),
        "s2" => Some((build_s_squared(n).config()?, universal_c_min::S_SQUARED)),
        "number" => Some((build_number_operator(n).config()?, universal_c_min::NUMBER)),
        "parity" => Some((build_z_parity(n).config()?, universal_c_min::Z_PARITY)),
        "so-sz" => Some((
            build_spin_orbital_sz(spin_orbitals().config()?).config()?,
            universal_c_min::S_Z,
        )),
        "so-s2" => Some((
            build_spin_orbital_s_squared(spin_orbitals().config()?).config()?,
            universal_c_min::S_SQUARED,
        )),
        _ => None,
    };
    if let Some((operator, c_min)) = builtin {
        return Ok(Observable {
            label: name.to_string(),
            operator,
            c_min,
        });
    }
    let path = Path::new(name);
    let operator = load_file(path)?;
    if operator.qubit_count() != n {
        return Err(anyhow!(
            "observable {} acts on {} qubits, the Hamiltonian on {n}",
            path.display(),
            operator.qubit_count()
        ))
        .config();
    }
    let c_min = min_distinct_gap(&operator)
        .with_context(|| format!("C_min of {}", path.display()))
        .precondition()?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name.to_string());
    Ok(Observable { label, operator, c_min })
}

/// Dense-oracle view of the problem.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub points: Vec<SpectrumPoint>,
    pub target: SectorTarget,
    /// Global indices of the target sector, ascending in energy.
    pub levels: Vec<usize>,
}

impl Oracle {
    pub fn ground_energy(&self) -> f64 {
        self.points[0].energy
    }

    /// Energy of the `k`-th state of the target sector.
    pub fn level_energy(&self, k: usize) -> Option<f64> {
        self.levels.get(k).map(|&i| self.points[i].energy)
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub hamiltonian: PauliSum,
    pub observables: Vec<Observable>,
    pub specs: Vec<ConstraintSpec>,
    pub oracle: Option<Oracle>,
}

impl Problem {
    /// Loads operators and, when the register fits, runs the dense oracle.
    /// `require_oracle` turns a register that is too large into an error.
    pub fn load(settings: &Settings, require_oracle: bool) -> Result<Self> {
        let hamiltonian = load_hamiltonian(&settings.hamiltonian)?;
        let n = hamiltonian.qubit_count();
        let observables = settings
            .constraints
            .iter()
            .map(|c| load_observable(&c.observable, n))
            .collect::<Result<Vec<_>>>()?;
        let needs_oracle = require_oracle
            || settings
                .constraints
                .iter()
                .any(|c| matches!(c.mu, None | Some(MuPolicy::AutoExact) | Some(MuPolicy::AutoSimple)));
        let oracle = if n <= DEFAULT_ORACLE_LIMIT || needs_oracle {
            Some(run_oracle(&hamiltonian, &observables, &settings.constraints)?)
        } else {
            None
        };
        Ok(Problem {
            hamiltonian,
            observables,
            specs: settings.constraints.clone(),
            oracle,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.hamiltonian.qubit_count()
    }

    fn oracle(&self) -> Result<&Oracle> {
        self.oracle
            .as_ref()
            .ok_or_else(|| anyhow!("this step needs the dense oracle"))
            .precondition()
    }

    /// Coefficients per constraint under their policies, aimed at the
    /// sector ground. A missing policy means `auto-simple`.
    pub fn resolve_mus(&self) -> Result<Vec<f64>> {
        self.resolve_mus_at(0)
    }

    /// Coefficients aimed at the `level`-th state of the sector. States of
    /// the sector below it are left out of the exact threshold; deflation
    /// handles them.
    pub fn resolve_mus_at(&self, level: usize) -> Result<Vec<f64>> {
        let needs = |p: MuPolicy| self.specs.iter().any(|c| c.mu.unwrap_or(MuPolicy::AutoSimple) == p);
        let target_energy = match needs(MuPolicy::AutoExact) || needs(MuPolicy::AutoSimple) {
            true => Some(self.level_energy(level)?),
            false => None,
        };
        let exact = match needs(MuPolicy::AutoExact) {
            true => Some(self.exact_threshold(level)?),
            false => None,
        };
        self.specs
            .iter()
            .zip(&self.observables)
            .enumerate()
            .map(|(l, (spec, obs))| {
                let policy = spec.mu.unwrap_or(MuPolicy::AutoSimple);
                let mu = match policy {
                    MuPolicy::Value(v) => return Ok(v),
                    MuPolicy::AutoExact => exact.as_ref().expect("computed above")[l],
                    MuPolicy::AutoSimple => {
                        let ground = self.oracle()?.ground_energy();
                        mu_simple(target_energy.expect("computed above"), ground, obs.c_min).precondition()?
                    }
                    MuPolicy::AutoRough => mu_rough(&self.hamiltonian, obs.c_min),
                    MuPolicy::AutoCe(et, e0) => mu_simple(et, e0, obs.c_min).precondition()?,
                };
                // A gap within the oracle's clustering tolerance means no state
                // lies strictly below the target in energy.
                let gap = mu * obs.c_min * obs.c_min;
                Ok(if gap <= CLUSTER_TOL * self.hamiltonian.coefficient_norm().max(1.0) {
                    FALLBACK_MU
                } else {
                    mu
                })
            })
            .collect()
    }

    fn level_energy(&self, level: usize) -> Result<f64> {
        let oracle = self.oracle()?;
        oracle
            .level_energy(level)
            .ok_or_else(|| anyhow!("sector has {} states, level {level} requested", oracle.levels.len()))
            .precondition()
    }

    fn exact_threshold(&self, level: usize) -> Result<Vec<f64>> {
        let oracle = self.oracle()?;
        let target_index = oracle.levels[level];
        let below = &oracle.levels[..level];
        let kept: Vec<usize> = (0..oracle.points.len()).filter(|i| !below.contains(i)).collect();
        let points: Vec<SpectrumPoint> = kept.iter().map(|&i| oracle.points[i].clone()).collect();
        let target = SectorTarget {
            targets: oracle.target.targets.clone(),
            index: kept.iter().position(|&i| i == target_index).expect("target is kept"),
            energy: oracle.points[target_index].energy,
        };
        mu_exact_multi(&points, &target).precondition()
    }

    /// Constraints with the given coefficients, in input order.
    pub fn constraints(&self, mus: &[f64]) -> Result<Vec<PenaltyConstraint>> {
        self.specs
            .iter()
            .zip(&self.observables)
            .zip(mus)
            .map(|((spec, obs), &mu)| {
                PenaltyConstraint::new(obs.operator.clone(), spec.target, mu, obs.c_min)
                    .with_context(|| format!("constraint {}", obs.label))
                    .config()
            })
            .collect()
    }

    pub fn cost_spec(&self, form: Form, mus: &[f64], noise_p: Option<f64>) -> Result<CostSpec> {
        let noise = noise_p.map(NoiseModel::new).transpose().config()?;
        CostSpec::new(self.hamiltonian.clone(), penalty_form(form))
            .with_constraints(self.constraints(mus)?)
            .precondition()
            .map(|s| s.with_noise(noise))
    }
}

fn run_oracle(h: &PauliSum, observables: &[Observable], specs: &[ConstraintSpec]) -> Result<Oracle> {
    let ops: Vec<&PauliSum> = observables.iter().map(|o| &o.operator).collect();
    let points = simultaneous_spectrum_multi(h, &ops, CLUSTER_TOL, DEFAULT_ORACLE_LIMIT).precondition()?;
    let targets: Vec<f64> = specs.iter().map(|c| c.target).collect();
    let target = sector_ground_multi(&points, &targets, MATCH_TOL).precondition()?;
    let levels = sector_levels(&points, &targets, MATCH_TOL);
    Ok(Oracle { points, target, levels })
}

pub fn penalty_form(form: Form) -> PenaltyForm {
    match form {
        Form::F1 => PenaltyForm::SquaredOperator,
        Form::F2 => PenaltyForm::SquaredExpectation,
    }
}

pub fn ansatz(settings: &Settings, n: usize) -> AnsatzConfig {
    AnsatzConfig::hardware_efficient(n, settings.depth)
}

pub fn optimizer(settings: &Settings) -> OptimizerConfig {
    let method = match settings.optimizer {
        OptimizerKind::Qn => Method::QuasiNewton,
        OptimizerKind::Simplex => Method::SimplexSearch,
    };
    OptimizerConfig::default()
        .with_method(method)
        .with_seed(settings.master_seed)
}

pub fn require_constraint(problem: &Problem, what: &str) -> Result<()> {
    if problem.specs.is_empty() {
        return Err(anyhow!("{what} needs at least one --constraint")).config();
    }
    Ok(())
}

pub fn check_positive(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(anyhow!("{what} is empty")).config();
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(anyhow!("{what} must be positive, got {v}")).config();
    }
    Ok(())
}

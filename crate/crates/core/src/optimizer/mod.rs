//! Ansatz-parameter optimization against a [`CostSpec`].
//!
//! Every scalar cost evaluation is counted, including the ones made while
//! estimating gradients, so `n_meas = nfev × pauli_ops_per_eval` is the
//! number of Pauli-operator measurements a device run would need.

mod bfgs;
mod gradient;
mod simplex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::cost::{constraint_residuals, pauli_ops_per_eval, CostBreakdown, CostError, CostSpec};
use crate::statevector::{prepare, AnsatzConfig, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// BFGS with backtracking Armijo line search.
    QuasiNewton,
    /// Nelder–Mead.
    SimplexSearch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientMethod {
    ParameterShift,
    CentralDifference(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub method: Method,
    pub gradient: GradientMethod,
    pub grad_tol: f64,
    pub max_iterations: usize,
    /// Master seed for initial parameters in [`run_trials`].
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: Method::QuasiNewton,
            gradient: GradientMethod::ParameterShift,
            grad_tol: 1e-8,
            max_iterations: 10_000,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<(), OptimizeError> {
        let step_ok = match self.gradient {
            GradientMethod::CentralDifference(h) => h.is_finite() && h > 0.0,
            GradientMethod::ParameterShift => true,
        };
        if !(self.grad_tol.is_finite() && self.grad_tol > 0.0) || self.max_iterations == 0 || !step_ok {
            return Err(OptimizeError::InvalidConfig);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationRecord {
    pub best_params: Vec<f64>,
    pub best_cost: f64,
    /// Every cost evaluation, gradient-internal ones included.
    pub nfev: usize,
    pub n_grad_evals: usize,
    pub n_meas: usize,
    /// Cost after each iteration, starting with the initial point.
    pub cost_trace: Vec<f64>,
    /// Sum over constraints of the noiseless `⟨(Ĉ−c)²⟩` at `best_params`.
    pub constraint_residual: f64,
    pub constraint_residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("expected {expected} parameters, got {got}")]
    ParamCountMismatch { expected: usize, got: usize },
    #[error("cost evaluated to {0}")]
    NonFiniteCost(f64),
    #[error("tolerances, step and iteration limit must be positive")]
    InvalidConfig,
    #[error("at least one seed is required")]
    NoSeeds,
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Counting wrapper around a spec and an ansatz.
pub(crate) struct Objective<'a> {
    spec: &'a CostSpec,
    ansatz: &'a AnsatzConfig,
    nfev: usize,
    best: Option<(Vec<f64>, f64)>,
    last: Option<(Vec<f64>, CostBreakdown)>,
    observer: Option<&'a mut dyn FnMut(&[f64], f64)>,
}

impl<'a> Objective<'a> {
    fn new(spec: &'a CostSpec, ansatz: &'a AnsatzConfig) -> Self {
        Objective {
            spec,
            ansatz,
            nfev: 0,
            best: None,
            last: None,
            observer: None,
        }
    }

    fn check_len(&self, params: &[f64]) -> Result<(), OptimizeError> {
        let expected = self.ansatz.parameter_count();
        if params.len() != expected {
            return Err(OptimizeError::ParamCountMismatch {
                expected,
                got: params.len(),
            });
        }
        Ok(())
    }

    /// Full breakdown; reuses the previous evaluation when the parameters
    /// are identical.
    fn breakdown(&mut self, params: &[f64]) -> Result<CostBreakdown, OptimizeError> {
        if let Some((p, b)) = &self.last {
            if p.as_slice() == params {
                return Ok(b.clone());
            }
        }
        self.check_len(params)?;
        let state = prepare(self.ansatz, params)?;
        let b = self.spec.evaluate(&state)?;
        self.nfev += 1;
        if !b.total.is_finite() {
            return Err(OptimizeError::NonFiniteCost(b.total));
        }
        if let Some(obs) = self.observer.as_mut() {
            obs(params, b.total);
        }
        if self.best.as_ref().is_none_or(|(_, f)| b.total < *f) {
            self.best = Some((params.to_vec(), b.total));
        }
        self.last = Some((params.to_vec(), b.clone()));
        Ok(b)
    }

    fn value(&mut self, params: &[f64]) -> Result<f64, OptimizeError> {
        Ok(self.breakdown(params)?.total)
    }
}

/// Gradient of the spec's cost at `params`.
pub fn gradient(
    spec: &CostSpec,
    ansatz: &AnsatzConfig,
    params: &[f64],
    method: GradientMethod,
) -> Result<Vec<f64>, OptimizeError> {
    let mut obj = Objective::new(spec, ansatz);
    gradient::evaluate(&mut obj, params, method)
}

pub(crate) struct Outcome {
    pub cost_trace: Vec<f64>,
    pub n_grad_evals: usize,
}

pub fn minimize(
    spec: &CostSpec,
    ansatz: &AnsatzConfig,
    config: &OptimizerConfig,
    initial_params: &[f64],
) -> Result<OptimizationRecord, OptimizeError> {
    run(Objective::new(spec, ansatz), config, initial_params)
}

/// [`minimize`] that also reports each counted cost evaluation to `observer`.
pub fn minimize_observed(
    spec: &CostSpec,
    ansatz: &AnsatzConfig,
    config: &OptimizerConfig,
    initial_params: &[f64],
    observer: &mut dyn FnMut(&[f64], f64),
) -> Result<OptimizationRecord, OptimizeError> {
    let mut obj = Objective::new(spec, ansatz);
    obj.observer = Some(observer);
    run(obj, config, initial_params)
}

fn run(
    mut obj: Objective<'_>,
    config: &OptimizerConfig,
    initial_params: &[f64],
) -> Result<OptimizationRecord, OptimizeError> {
    config.validate()?;
    obj.check_len(initial_params)?;
    let outcome = match config.method {
        Method::QuasiNewton => bfgs::run(&mut obj, config, initial_params)?,
        Method::SimplexSearch => simplex::run(&mut obj, config, initial_params)?,
    };
    let (best_params, best_cost) = obj.best.clone().expect("at least one evaluation");
    let residuals = constraint_residuals(obj.spec, &prepare(obj.ansatz, &best_params)?)?;
    Ok(OptimizationRecord {
        best_cost,
        nfev: obj.nfev,
        n_grad_evals: outcome.n_grad_evals,
        n_meas: obj.nfev * pauli_ops_per_eval(obj.spec),
        cost_trace: outcome.cost_trace,
        constraint_residual: residuals.iter().sum(),
        constraint_residuals: residuals,
        best_params,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub mean_nfev: f64,
    pub mean_n_meas: f64,
    pub mean_residual: f64,
    pub mean_best_cost: f64,
    /// Index of the record with the lowest cost.
    pub best_trial: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSet {
    pub records: Vec<OptimizationRecord>,
    pub initial_params: Vec<Vec<f64>>,
    pub summary: TrialSummary,
}

impl TrialSet {
    pub fn best(&self) -> &OptimizationRecord {
        &self.records[self.summary.best_trial]
    }
}

/// Uniform `[0, 2π)` parameters for trial `trial` of `master_seed`.
pub fn initial_parameters(master_seed: u64, trial: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    (0..count)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect()
}

pub fn summarize(records: &[OptimizationRecord]) -> TrialSummary {
    let n = records.len() as f64;
    let mean = |f: &dyn Fn(&OptimizationRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
    let best_trial = records
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.best_cost.total_cmp(&b.1.best_cost))
        .map(|(i, _)| i)
        .unwrap_or(0);
    TrialSummary {
        mean_nfev: mean(&|r| r.nfev as f64),
        mean_n_meas: mean(&|r| r.n_meas as f64),
        mean_residual: mean(&|r| r.constraint_residual),
        mean_best_cost: mean(&|r| r.best_cost),
        best_trial,
    }
}

/// `n_seeds` independent runs from random starts, in parallel. Records come
/// back in trial order and depend only on `config.seed`.
pub fn run_trials(
    spec: &CostSpec,
    ansatz: &AnsatzConfig,
    config: &OptimizerConfig,
    n_seeds: usize,
) -> Result<TrialSet, OptimizeError> {
    if n_seeds == 0 {
        return Err(OptimizeError::NoSeeds);
    }
    let starts: Vec<Vec<f64>> = (0..n_seeds as u64)
        .map(|i| initial_parameters(config.seed, i, ansatz.parameter_count()))
        .collect();
    let records = starts
        .par_iter()
        .map(|x0| minimize(spec, ansatz, config, x0))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(&records);
    Ok(TrialSet {
        records,
        initial_params: starts,
        summary,
    })
}

//! Constrained cost functions.
//!
//! `F¹ = ⟨Ĥ⟩ + Σ μ⟨(Ĉ−c)²⟩ + Σ β|⟨ψᵢ|ψ⟩|²` and
//! `F² = ⟨Ĥ⟩ + Σ μ(⟨Ĉ⟩−c)² + Σ β|⟨ψᵢ|ψ⟩|²`, optionally under global
//! depolarizing noise. Overlap terms always use the pure state.

use thiserror::Error;

use crate::pauli::{PauliError, PauliSum};
use crate::penalty::PenaltyConstraint;
use crate::statevector::{expectation, noisy_expectation, overlap_sq, NoiseModel, SimError, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyForm {
    /// `F¹`: expectation of the squared shifted operator.
    SquaredOperator,
    /// `F²`: squared deviation of the expectation.
    SquaredExpectation,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("cost spec uses {actual:?}, evaluator expects {expected:?}")]
    WrongForm { expected: PenaltyForm, actual: PenaltyForm },
    #[error("operator on {got} qubits, cost spec has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("deflation weight must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Everything needed to score a state. Immutable once built.
#[derive(Debug, Clone)]
pub struct CostSpec {
    hamiltonian: PauliSum,
    constraints: Vec<PenaltyConstraint>,
    form: PenaltyForm,
    deflation: Vec<(StateVector, f64)>,
    noise: Option<NoiseModel>,
    // (Ĉ−c)² per constraint
    shifted_squares: Vec<PauliSum>,
}

/// One evaluation split into its parts.
#[derive(Debug, Clone, PartialEq)]
pub struct CostBreakdown {
    pub total: f64,
    pub energy_part: f64,
    /// `μ_l · penalty_l` per constraint.
    pub penalty_parts: Vec<f64>,
    pub deflation_part: f64,
    pub pauli_ops_per_eval: usize,
    /// `⟨Ĉ⁽ˡ⁾⟩` per constraint (noise-dressed when noise is set). Only
    /// filled for `F²`, where the gradient needs it.
    pub charge_expectations: Vec<f64>,
}

impl CostSpec {
    pub fn new(hamiltonian: PauliSum, form: PenaltyForm) -> Self {
        CostSpec {
            hamiltonian,
            constraints: Vec::new(),
            form,
            deflation: Vec::new(),
            noise: None,
            shifted_squares: Vec::new(),
        }
    }

    pub fn with_constraint(mut self, constraint: PenaltyConstraint) -> Result<Self, CostError> {
        self.check(constraint.observable.qubit_count())?;
        self.shifted_squares
            .push(constraint.observable.square_shifted(constraint.target)?);
        self.constraints.push(constraint);
        Ok(self)
    }

    pub fn with_constraints(self, constraints: impl IntoIterator<Item = PenaltyConstraint>) -> Result<Self, CostError> {
        constraints.into_iter().try_fold(self, |s, c| s.with_constraint(c))
    }

    pub fn with_deflation(mut self, state: StateVector, beta: f64) -> Result<Self, CostError> {
        self.check(state.qubit_count())?;
        if !(beta.is_finite() && beta > 0.0) {
            return Err(CostError::InvalidBeta(beta));
        }
        self.deflation.push((state, beta));
        Ok(self)
    }

    pub fn with_noise(mut self, noise: Option<NoiseModel>) -> Self {
        self.noise = noise;
        self
    }

    /// Same spec with a different penalty form.
    pub fn with_form(mut self, form: PenaltyForm) -> Self {
        self.form = form;
        self
    }

    fn check(&self, got: usize) -> Result<(), CostError> {
        let expected = self.hamiltonian.qubit_count();
        if got != expected {
            Err(CostError::DimensionMismatch { expected, got })
        } else {
            Ok(())
        }
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.hamiltonian
    }

    pub fn constraints(&self) -> &[PenaltyConstraint] {
        &self.constraints
    }

    pub fn form(&self) -> PenaltyForm {
        self.form
    }

    pub fn deflation(&self) -> &[(StateVector, f64)] {
        &self.deflation
    }

    pub fn noise(&self) -> Option<NoiseModel> {
        self.noise
    }

    pub fn qubit_count(&self) -> usize {
        self.hamiltonian.qubit_count()
    }

    pub fn shifted_squares(&self) -> &[PauliSum] {
        &self.shifted_squares
    }

    fn expect(&self, op: &PauliSum, state: &StateVector) -> Result<f64, SimError> {
        match self.noise {
            Some(noise) => noisy_expectation(op, state, noise),
            None => expectation(op, state),
        }
    }

    fn deflation_part(&self, state: &StateVector) -> Result<f64, CostError> {
        let mut acc = 0.0;
        for (s, beta) in &self.deflation {
            acc += beta * overlap_sq(s, state)?;
        }
        Ok(acc)
    }

    /// Dispatches on the spec's form.
    pub fn evaluate(&self, state: &StateVector) -> Result<CostBreakdown, CostError> {
        match self.form {
            PenaltyForm::SquaredOperator => eval_f1(self, state),
            PenaltyForm::SquaredExpectation => eval_f2(self, state),
        }
    }

    pub fn cost(&self, state: &StateVector) -> Result<f64, CostError> {
        Ok(self.evaluate(state)?.total)
    }
}

fn require_form(spec: &CostSpec, expected: PenaltyForm) -> Result<(), CostError> {
    if spec.form != expected {
        Err(CostError::WrongForm {
            expected,
            actual: spec.form,
        })
    } else {
        Ok(())
    }
}

pub fn eval_f1(spec: &CostSpec, state: &StateVector) -> Result<CostBreakdown, CostError> {
    require_form(spec, PenaltyForm::SquaredOperator)?;
    spec.check(state.qubit_count())?;
    let energy_part = spec.expect(&spec.hamiltonian, state)?;
    let penalty_parts = spec
        .constraints
        .iter()
        .zip(&spec.shifted_squares)
        .map(|(c, sq)| Ok(c.mu * spec.expect(sq, state)?))
        .collect::<Result<Vec<_>, SimError>>()?;
    let deflation_part = spec.deflation_part(state)?;
    Ok(CostBreakdown {
        total: energy_part + penalty_parts.iter().sum::<f64>() + deflation_part,
        energy_part,
        penalty_parts,
        deflation_part,
        pauli_ops_per_eval: pauli_ops_per_eval(spec),
        charge_expectations: Vec::new(),
    })
}

pub fn eval_f2(spec: &CostSpec, state: &StateVector) -> Result<CostBreakdown, CostError> {
    require_form(spec, PenaltyForm::SquaredExpectation)?;
    spec.check(state.qubit_count())?;
    let energy_part = spec.expect(&spec.hamiltonian, state)?;
    let charge_expectations = spec
        .constraints
        .iter()
        .map(|c| spec.expect(&c.observable, state))
        .collect::<Result<Vec<_>, _>>()?;
    let penalty_parts: Vec<f64> = spec
        .constraints
        .iter()
        .zip(&charge_expectations)
        .map(|(c, &v)| c.mu * (v - c.target).powi(2))
        .collect();
    let deflation_part = spec.deflation_part(state)?;
    Ok(CostBreakdown {
        total: energy_part + penalty_parts.iter().sum::<f64>() + deflation_part,
        energy_part,
        penalty_parts,
        deflation_part,
        pauli_ops_per_eval: pauli_ops_per_eval(spec),
        charge_expectations,
    })
}

/// Pauli operators measured per cost evaluation. Identity terms are free;
/// each deflation overlap counts once.
pub fn pauli_ops_per_eval(spec: &CostSpec) -> usize {
    let penalty: usize = match spec.form {
        PenaltyForm::SquaredOperator => spec.shifted_squares.iter().map(PauliSum::non_identity_count).sum(),
        PenaltyForm::SquaredExpectation => spec.constraints.iter().map(|c| c.observable.non_identity_count()).sum(),
    };
    spec.hamiltonian.non_identity_count() + penalty + spec.deflation.len()
}

/// Noiseless `⟨(Ĉ⁽ˡ⁾−c⁽ˡ⁾)²⟩` per constraint.
pub fn constraint_residuals(spec: &CostSpec, state: &StateVector) -> Result<Vec<f64>, CostError> {
    spec.check(state.qubit_count())?;
    Ok(spec
        .shifted_squares
        .iter()
        .map(|sq| expectation(sq, state))
        .collect::<Result<Vec<_>, _>>()?)
}

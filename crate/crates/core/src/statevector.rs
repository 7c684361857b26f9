//! Dense statevector simulation.
//!
//! Basis indexing is little-endian: bit `k` of an amplitude index is the
//! state of qubit `k`. Rotations follow `R_Y(θ) = e^{iθY/2}` and
//! `R_Z(θ) = e^{iθZ/2}`.

use num_complex::Complex64;
use thiserror::Error;

use crate::pauli::{PauliString, PauliSum};

/// Guard for dense simulation; `2^30` amplitudes is 16 GiB already.
pub const MAX_SIM_QUBITS: usize = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected {expected} parameters, got {got}")]
    ParamCountMismatch { expected: usize, got: usize },
    #[error("depolarizing probability must satisfy 0 <= p < 1, got {0}")]
    InvalidProbability(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    qubit_count: usize,
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(qubit_count: usize, index: usize) -> Result<Self, SimError> {
        if qubit_count == 0 || qubit_count > MAX_SIM_QUBITS {
            return Err(SimError::InvalidState(format!("unsupported qubit count {qubit_count}")));
        }
        let dim = 1usize << qubit_count;
        if index >= dim {
            return Err(SimError::InvalidState(format!(
                "basis index {index} out of range for {qubit_count} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            amplitudes,
            qubit_count,
        })
    }

    /// Normalizes the given amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(SimError::InvalidState(format!(
                "length {dim} is not a power of two >= 2"
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(SimError::InvalidState("zero or non-finite norm".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(StateVector {
            amplitudes,
            qubit_count: dim.trailing_zeros() as usize,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probabilities `|a_k|²` in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies a 2×2 matrix `[[m00, m01], [m10, m11]]` to `qubit`.
    pub fn apply_single(&mut self, qubit: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << qubit;
        for base in 0..self.amplitudes.len() {
            if base & bit != 0 {
                continue;
            }
            let a0 = self.amplitudes[base];
            let a1 = self.amplitudes[base | bit];
            self.amplitudes[base] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[base | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// `e^{iθY/2} = [[cos θ/2, sin θ/2], [−sin θ/2, cos θ/2]]`.
    pub fn apply_ry(&mut self, qubit: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let bit = 1usize << qubit;
        for base in 0..self.amplitudes.len() {
            if base & bit != 0 {
                continue;
            }
            let a0 = self.amplitudes[base];
            let a1 = self.amplitudes[base | bit];
            self.amplitudes[base] = a0 * c + a1 * s;
            self.amplitudes[base | bit] = a1 * c - a0 * s;
        }
    }

    /// `e^{iθZ/2} = diag(e^{iθ/2}, e^{−iθ/2})`.
    pub fn apply_rz(&mut self, qubit: usize, theta: f64) {
        let up = Complex64::from_polar(1.0, theta / 2.0);
        let down = up.conj();
        let bit = 1usize << qubit;
        for (k, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= if k & bit == 0 { up } else { down };
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (k, amp) in self.amplitudes.iter_mut().enumerate() {
            if k & mask == mask {
                *amp = -*amp;
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, SimError> {
        check_dims(self.qubit_count, other.qubit_count)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

fn check_dims(left: usize, right: usize) -> Result<(), SimError> {
    if left != right {
        Err(SimError::DimensionMismatch { left, right })
    } else {
        Ok(())
    }
}

/// `⟨ψ|P|ψ⟩` for one Pauli string (real for any Hermitian string).
fn string_expectation(string: &PauliString, amps: &[Complex64]) -> f64 {
    let (x, z) = string.masks();
    let (x, z) = (x as usize, z as usize);
    if x == 0 {
        return amps
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if (k & z).count_ones() % 2 == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum();
    }
    // P|k⟩ = i^{#Y} (−1)^{|k∧z|} |k ⊕ x⟩
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, a) in amps.iter().enumerate() {
        let term = amps[k ^ x].conj() * a;
        if (k & z).count_ones() % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    match string.y_count() % 4 {
        0 => acc.re,
        1 => -acc.im,
        2 => -acc.re,
        _ => acc.im,
    }
}

/// `⟨ψ|O|ψ⟩`.
pub fn expectation(op: &PauliSum, state: &StateVector) -> Result<f64, SimError> {
    check_dims(op.qubit_count(), state.qubit_count())?;
    Ok(op
        .terms()
        .iter()
        .map(|t| {
            if t.is_identity() {
                t.coefficient * state.norm_sqr()
            } else {
                t.coefficient * string_expectation(&t.string, &state.amplitudes)
            }
        })
        .sum())
}

/// `|⟨a|b⟩|²`.
pub fn overlap_sq(a: &StateVector, b: &StateVector) -> Result<f64, SimError> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Global depolarizing channel `ρ ↦ (1−p)ρ + p I/2ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    p: f64,
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self, SimError> {
        if (0.0..1.0).contains(&p) {
            Ok(NoiseModel { p })
        } else {
            Err(SimError::InvalidProbability(p))
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Maps a pure-state expectation to the depolarized one, given `Tr(O)/2ⁿ`.
    pub fn dress(&self, pure: f64, normalized_trace: f64) -> f64 {
        (1.0 - self.p) * pure + self.p * normalized_trace
    }
}

/// `Tr(O ρ_p) = (1−p)⟨ψ|O|ψ⟩ + p·Tr(O)/2ⁿ`.
pub fn noisy_expectation(op: &PauliSum, state: &StateVector, noise: NoiseModel) -> Result<f64, SimError> {
    Ok(noise.dress(expectation(op, state)?, op.normalized_trace()))
}

/// Hardware-efficient ansatz: a column of `R_Y` then `R_Z` on every qubit,
/// followed by `depth` blocks of [linear-chain CZ, rotation column].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzConfig {
    pub qubit_count: usize,
    pub depth: usize,
    /// Basis index of the reference state `|ψ₀⟩`.
    pub reference_state: usize,
}

impl AnsatzConfig {
    pub fn hardware_efficient(qubit_count: usize, depth: usize) -> Self {
        AnsatzConfig {
            qubit_count,
            depth,
            reference_state: 0,
        }
    }

    pub fn with_reference(mut self, reference_state: usize) -> Self {
        self.reference_state = reference_state;
        self
    }

    pub fn parameter_count(&self) -> usize {
        2 * self.qubit_count * (self.depth + 1)
    }
}

fn rotation_column(state: &mut StateVector, params: &[f64]) {
    for (q, pair) in params.chunks_exact(2).enumerate() {
        state.apply_ry(q, pair[0]);
        state.apply_rz(q, pair[1]);
    }
}

/// `|ψ(θ)⟩ = V(θ)|ψ₀⟩`. Parameters are laid out column by column, and
/// within a column as `(θ_RY, θ_RZ)` per qubit in ascending order.
pub fn prepare(ansatz: &AnsatzConfig, params: &[f64]) -> Result<StateVector, SimError> {
    let expected = ansatz.parameter_count();
    if params.len() != expected {
        return Err(SimError::ParamCountMismatch {
            expected,
            got: params.len(),
        });
    }
    let n = ansatz.qubit_count;
    let mut state = StateVector::basis(n, ansatz.reference_state)?;
    let mut columns = params.chunks_exact(2 * n);
    rotation_column(&mut state, columns.next().expect("depth >= 0 gives one column"));
    for column in columns {
        for q in 0..n.saturating_sub(1) {
            state.apply_cz(q, q + 1);
        }
        rotation_column(&mut state, column);
    }
    Ok(state)
}

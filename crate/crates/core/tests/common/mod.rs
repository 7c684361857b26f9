//! Shared helpers: an independent Kronecker-product dense oracle and random
//! operator generators.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use penaltyvqe::pauli::{Axis, PauliString, PauliSum, PauliTerm};
use penaltyvqe::statevector::StateVector;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli_2x2(axis: Option<Axis>) -> DMatrix<Complex64> {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match axis {
        None => DMatrix::from_row_slice(2, 2, &[one, o, o, one]),
        Some(Axis::X) => DMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        Some(Axis::Y) => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        Some(Axis::Z) => DMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
    }
}

/// Dense matrix built as `P_{n−1} ⊗ … ⊗ P_0` (qubit 0 least significant).
pub fn kron_dense(op: &PauliSum) -> DMatrix<Complex64> {
    let n = op.qubit_count();
    let dim = 1 << n;
    let mut total = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for t in op.terms() {
        let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
        for q in (0..n).rev() {
            let axis = t.string.ops().iter().find(|(k, _)| *k == q).map(|&(_, a)| a);
            m = m.kronecker(&pauli_2x2(axis));
        }
        total += m * c(t.coefficient, 0.0);
    }
    total
}

pub fn dense_expectation(m: &DMatrix<Complex64>, s: &StateVector) -> f64 {
    let v = DMatrix::from_column_slice(s.dim(), 1, s.amplitudes());
    (v.adjoint() * m * v)[(0, 0)].re
}

pub fn random_sum(rng: &mut impl Rng, n: usize, terms: usize) -> PauliSum {
    let axes = [None, Some(Axis::X), Some(Axis::Y), Some(Axis::Z)];
    let ts = (0..terms).map(|_| {
        let ops: Vec<_> = (0..n)
            .filter_map(|q| axes[rng.random_range(0..4)].map(|a| (q, a)))
            .collect();
        PauliTerm::new(rng.random_range(-1.0..1.0), PauliString::new(ops).unwrap())
    });
    PauliSum::from_terms(n, ts).unwrap()
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> StateVector {
    let amps = (0..1 << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::from_amplitudes(amps).unwrap()
}

pub fn random_params(rng: &mut impl Rng, count: usize) -> Vec<f64> {
    (0..count)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect()
}

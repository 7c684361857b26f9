//! Exact dense diagonalization: simultaneous `(Ĉ, Ĥ)` eigenbases, sector
//! ground states and eigenvalue gaps. This is the correctness oracle for
//! everything variational, so it stays dense and simple.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::pauli::{PauliError, PauliSum};
use crate::statevector::StateVector;

pub const DEFAULT_ORACLE_LIMIT: usize = 12;

/// Relative tolerance for merging (near-)degenerate eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("observables do not commute with the Hamiltonian")]
    NotCommuting,
    #[error("{qubit_count} qubits exceeds the dense oracle limit of {limit}")]
    OracleTooLarge { qubit_count: usize, limit: usize },
    #[error("no eigenstate matches the requested sector {0:?}")]
    EmptySector(Vec<f64>),
    #[error("operator has a single distinct eigenvalue; gap undefined")]
    SingleEigenvalue,
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// One simultaneous eigenpair: `Ĥv = Ev` and `Ĉ⁽ˡ⁾v = C⁽ˡ⁾v`.
#[derive(Debug, Clone)]
pub struct SpectrumPoint {
    pub energy: f64,
    /// One eigenvalue per observable, in the order they were supplied.
    pub charges: Vec<f64>,
    pub eigenvector: StateVector,
}

impl SpectrumPoint {
    /// Eigenvalue of the first observable.
    pub fn charge(&self) -> f64 {
        self.charges[0]
    }
}

/// Ground state of a symmetry sector, located in the global ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorTarget {
    pub targets: Vec<f64>,
    /// `i₀`: rank of the target in ascending-energy order.
    pub index: usize,
    pub energy: f64,
}

impl SectorTarget {
    pub fn c(&self) -> f64 {
        self.targets[0]
    }
}

/// Dense `2ⁿ × 2ⁿ` matrix of a Pauli sum (little-endian basis).
pub fn dense_matrix(op: &PauliSum) -> DMatrix<Complex64> {
    let dim = 1usize << op.qubit_count();
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for t in op.terms() {
        let (x, z) = t.string.masks();
        let (x, z) = (x as usize, z as usize);
        let phase = crate::pauli::Phase::from_exponent(t.string.y_count()).to_complex() * t.coefficient;
        for k in 0..dim {
            let sign = if (k & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(k ^ x, k)] += phase * sign;
        }
    }
    m
}

fn check_size(n: usize, limit: usize) -> Result<(), OracleError> {
    if n > limit {
        Err(OracleError::OracleTooLarge { qubit_count: n, limit })
    } else {
        Ok(())
    }
}

/// Eigen-decomposition sorted by ascending eigenvalue.
fn sorted_eigh(m: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Splits sorted values into runs whose consecutive gaps are `<= tol`.
fn cluster_ranges(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            ranges.push(start..i);
            start = i;
        }
    }
    ranges
}

fn rayleigh(m: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> f64 {
    (v.adjoint() * m * v)[(0, 0)].re
}

/// Full simultaneous eigenbasis of `h` and one conserved `c`.
pub fn simultaneous_spectrum(h: &PauliSum, c: &PauliSum, match_tol: f64) -> Result<Vec<SpectrumPoint>, OracleError> {
    simultaneous_spectrum_multi(h, &[c], match_tol, DEFAULT_ORACLE_LIMIT)
}

/// Simultaneous eigenbasis of `h` and several mutually commuting observables.
///
/// Degenerate `Ĥ` eigenspaces are resolved by diagonalizing each observable
/// in turn inside the current degenerate block. Points are ordered by energy
/// cluster, then by charges, then by basis order.
pub fn simultaneous_spectrum_multi(
    h: &PauliSum,
    observables: &[&PauliSum],
    match_tol: f64,
    limit: usize,
) -> Result<Vec<SpectrumPoint>, OracleError> {
    let n = h.qubit_count();
    check_size(n, limit)?;
    for c in observables {
        if !h.commutes(c, 1e-10)? {
            return Err(OracleError::NotCommuting);
        }
    }
    for (i, a) in observables.iter().enumerate() {
        for b in &observables[i + 1..] {
            if !a.commutes(b, 1e-10)? {
                return Err(OracleError::NotCommuting);
            }
        }
    }

    let h_dense = dense_matrix(h);
    let tol_for = |op: &PauliSum| match_tol * op.coefficient_norm().max(1.0);
    let (energies, vectors) = sorted_eigh(h_dense.clone());

    // Each block: (energy cluster id, basis columns spanning a joint eigenspace).
    let mut blocks: Vec<(usize, DMatrix<Complex64>)> = cluster_ranges(&energies, tol_for(h))
        .into_iter()
        .enumerate()
        .map(|(id, r)| (id, vectors.columns(r.start, r.len()).into_owned()))
        .collect();

    let dense_obs: Vec<_> = observables.iter().map(|c| dense_matrix(c)).collect();
    for (c_dense, c) in dense_obs.iter().zip(observables) {
        let tol = tol_for(c);
        let mut refined = Vec::with_capacity(blocks.len());
        for (id, v) in blocks {
            if v.ncols() == 1 {
                refined.push((id, v));
                continue;
            }
            let restricted = v.adjoint() * c_dense * &v;
            let (vals, w) = sorted_eigh(restricted);
            let rotated = &v * w;
            for r in cluster_ranges(&vals, tol) {
                refined.push((id, rotated.columns(r.start, r.len()).into_owned()));
            }
        }
        blocks = refined;
    }

    let mut points: Vec<(usize, usize, SpectrumPoint)> = Vec::with_capacity(1 << n);
    for (id, v) in blocks {
        for col in 0..v.ncols() {
            let vec = v.column(col).into_owned();
            let vm = DMatrix::from_column_slice(vec.len(), 1, vec.as_slice());
            let energy = rayleigh(&h_dense, &vm);
            let charges = dense_obs.iter().map(|c| rayleigh(c, &vm)).collect();
            let eigenvector =
                StateVector::from_amplitudes(vec.as_slice().to_vec()).expect("eigenvectors are normalized");
            let order = points.len();
            points.push((
                id,
                order,
                SpectrumPoint {
                    energy,
                    charges,
                    eigenvector,
                },
            ));
        }
    }
    let key = |c: f64| (c / match_tol.max(f64::EPSILON)).round() as i64;
    points.sort_by(|(ia, oa, a), (ib, ob, b)| {
        ia.cmp(ib)
            .then_with(|| a.charges.iter().map(|&c| key(c)).cmp(b.charges.iter().map(|&c| key(c))))
            .then(oa.cmp(ob))
    });
    Ok(points.into_iter().map(|(_, _, p)| p).collect())
}

/// Lowest-energy point with charge `c`.
pub fn sector_ground(points: &[SpectrumPoint], c: f64, match_tol: f64) -> Result<SectorTarget, OracleError> {
    sector_ground_multi(points, &[c], match_tol)
}

/// Lowest-energy point whose charges all match `targets`.
pub fn sector_ground_multi(
    points: &[SpectrumPoint],
    targets: &[f64],
    match_tol: f64,
) -> Result<SectorTarget, OracleError> {
    sector_levels(points, targets, match_tol)
        .first()
        .map(|&index| SectorTarget {
            targets: targets.to_vec(),
            index,
            energy: points[index].energy,
        })
        .ok_or_else(|| OracleError::EmptySector(targets.to_vec()))
}

/// Global indices of all points in a sector, ascending in energy.
pub fn sector_levels(points: &[SpectrumPoint], targets: &[f64], match_tol: f64) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            p.charges.len() >= targets.len() && p.charges.iter().zip(targets).all(|(a, b)| (a - b).abs() <= match_tol)
        })
        .map(|(i, _)| i)
        .collect()
}

/// Sorted eigenvalues of a Hermitian Pauli sum.
pub fn eigenvalues(op: &PauliSum, limit: usize) -> Result<Vec<f64>, OracleError> {
    check_size(op.qubit_count(), limit)?;
    let mut vals: Vec<f64> = SymmetricEigen::new(dense_matrix(op))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// `C_min`: the smallest gap between distinct eigenvalues.
pub fn min_distinct_gap(c: &PauliSum) -> Result<f64, OracleError> {
    let vals = eigenvalues(c, DEFAULT_ORACLE_LIMIT)?;
    let tol = CLUSTER_TOL * c.coefficient_norm().max(1.0);
    let reps: Vec<f64> = cluster_ranges(&vals, tol)
        .into_iter()
        .map(|r| vals[r.clone()].iter().sum::<f64>() / r.len() as f64)
        .collect();
    if reps.len() < 2 {
        return Err(OracleError::SingleEigenvalue);
    }
    Ok(reps.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min))
}

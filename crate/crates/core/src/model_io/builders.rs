//! Built-in spin models and conserved-quantity observables.
//!
//! Spin-½ convention throughout: `S⃗ᵢ = σ⃗ᵢ / 2`.

use crate::pauli::{Axis, PauliError, PauliString, PauliSum, PauliTerm};

fn single(c: f64, q: usize, a: Axis) -> PauliTerm {
    PauliTerm::new(c, PauliString::single(q, a))
}

fn pair(c: f64, i: usize, j: usize, a: Axis) -> PauliTerm {
    PauliTerm::new(c, PauliString::new([(i, a), (j, a)]).expect("distinct qubits"))
}

/// `S_z = Σᵢ Zᵢ / 2`, eigenvalues `−n/2, …, n/2` in unit steps.
pub fn build_total_sz(n: usize) -> Result<PauliSum, PauliError> {
    PauliSum::from_terms(n, (0..n).map(|q| single(0.5, q, Axis::Z)))
}

/// Total spin component `Σᵢ σᵢ^a / 2`.
fn total_spin(n: usize, axis: Axis) -> Result<PauliSum, PauliError> {
    PauliSum::from_terms(n, (0..n).map(|q| single(0.5, q, axis)))
}

/// `S² = S_x² + S_y² + S_z²`, eigenvalues `S(S+1)`.
pub fn build_s_squared(n: usize) -> Result<PauliSum, PauliError> {
    let mut acc = PauliSum::zero(n)?;
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        let s = total_spin(n, axis)?;
        acc = acc.add(&s.multiply(&s)?)?;
    }
    Ok(acc)
}

/// Jordan–Wigner particle number `Σᵢ (I − Zᵢ)/2`: eigenvalues `0..=n`.
pub fn build_number_operator(n: usize) -> Result<PauliSum, PauliError> {
    PauliSum::from_terms(
        n,
        (0..n).flat_map(|q| [PauliTerm::identity(0.5), single(-0.5, q, Axis::Z)]),
    )
}

/// Global Z parity `Πᵢ Zᵢ`, eigenvalues ±1.
pub fn build_z_parity(n: usize) -> Result<PauliSum, PauliError> {
    PauliSum::from_terms(
        n,
        [PauliTerm::new(1.0, PauliString::new((0..n).map(|q| (q, Axis::Z)))?)],
    )
}

/// Spin-orbital layout used by the two functions below: spatial orbital `i`
/// occupies qubits `2i` (spin up) and `2i + 1` (spin down), Jordan–Wigner
/// occupation `n_p = (I − Z_p)/2`.
fn check_orbitals(n_spatial: usize) -> Result<usize, PauliError> {
    if n_spatial == 0 {
        return Err(PauliError::InvalidQubitCount(0));
    }
    Ok(2 * n_spatial)
}

/// Electronic `S_z = Σᵢ (n_{i↑} − n_{i↓})/2 = Σᵢ (Z_{2i+1} − Z_{2i})/4` on
/// `2·n_spatial` qubits. Particle number varies across the register, so the
/// eigenvalues step by 1/2.
pub fn build_spin_orbital_sz(n_spatial: usize) -> Result<PauliSum, PauliError> {
    let n = check_orbitals(n_spatial)?;
    PauliSum::from_terms(
        n,
        (0..n_spatial).flat_map(|i| [single(-0.25, 2 * i, Axis::Z), single(0.25, 2 * i + 1, Axis::Z)]),
    )
}

/// Electronic `S²` on `2·n_spatial` qubits. Each orbital's spin operators act
/// on its own qubit pair (the Jordan–Wigner strings cancel inside
/// `a†_{i↑}a_{i↓}`):
/// `S^x_i = (XX + YY)/4`, `S^y_i = (XY − YX)/4`, `S^z_i = (Z_↓ − Z_↑)/4`.
/// Eigenvalues `S(S+1)` for integer and half-integer `S` alike.
pub fn build_spin_orbital_s_squared(n_spatial: usize) -> Result<PauliSum, PauliError> {
    let n = check_orbitals(n_spatial)?;
    let two = |c: f64, a: Axis, b: Axis, i: usize| {
        PauliTerm::new(
            c,
            PauliString::new([(2 * i, a), (2 * i + 1, b)]).expect("distinct qubits"),
        )
    };
    let sx = PauliSum::from_terms(
        n,
        (0..n_spatial).flat_map(|i| [two(0.25, Axis::X, Axis::X, i), two(0.25, Axis::Y, Axis::Y, i)]),
    )?;
    let sy = PauliSum::from_terms(
        n,
        (0..n_spatial).flat_map(|i| [two(0.25, Axis::X, Axis::Y, i), two(-0.25, Axis::Y, Axis::X, i)]),
    )?;
    let sz = build_spin_orbital_sz(n_spatial)?;
    sx.multiply(&sx)?.add(&sy.multiply(&sy)?)?.add(&sz.multiply(&sz)?)
}

fn bonds(n: usize, periodic: bool) -> Vec<(usize, usize)> {
    let mut b: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    // n = 2 with wrap-around would double the single bond.
    if periodic && n > 2 {
        b.push((n - 1, 0));
    }
    b
}

/// `H = J Σ_⟨i,j⟩ (XᵢXⱼ + YᵢYⱼ + ZᵢZⱼ)/4` on an open or periodic chain.
/// Conserves `S_z` and `S²`.
pub fn build_heisenberg_chain(n: usize, coupling: f64, periodic: bool) -> Result<PauliSum, PauliError> {
    if n < 2 {
        return Err(PauliError::InvalidQubitCount(n));
    }
    PauliSum::from_terms(
        n,
        bonds(n, periodic)
            .into_iter()
            .flat_map(|(i, j)| [Axis::X, Axis::Y, Axis::Z].map(|a| pair(coupling / 4.0, i, j, a))),
    )
}

/// Transverse-field Ising chain `H = −J Σ XᵢXⱼ − h Σ Zᵢ`, written with the
/// field along Z so that it conserves [`build_z_parity`].
pub fn build_transverse_ising(n: usize, coupling: f64, field: f64, periodic: bool) -> Result<PauliSum, PauliError> {
    if n < 2 {
        return Err(PauliError::InvalidQubitCount(n));
    }
    let couplings = bonds(n, periodic)
        .into_iter()
        .map(|(i, j)| pair(-coupling, i, j, Axis::X));
    let fields = (0..n).map(|q| single(-field, q, Axis::Z));
    PauliSum::from_terms(n, couplings.chain(fields))
}

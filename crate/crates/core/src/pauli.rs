//! Weighted Pauli-string algebra.
//!
//! Operators are stored as canonical sums of real-weighted Pauli strings:
//! qubits ascending inside a string, strings sorted lexicographically, like
//! terms merged and near-zero coefficients dropped. Products are computed
//! exactly with an `i^k` phase per string; only Hermitian results leave this
//! module as [`PauliSum`].

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Coefficients with magnitude at or below this value are removed.
pub const DEFAULT_DROP_TOL: f64 = 1e-12;

/// Largest register a [`PauliSum`] may act on (strings are packed in `u64` masks).
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PauliError {
    #[error("qubit {0} appears twice in one Pauli string")]
    DuplicateQubit(usize),
    #[error("qubit {qubit} out of range for a {qubit_count}-qubit operator")]
    QubitOutOfRange { qubit: usize, qubit_count: usize },
    #[error("qubit count must be in 1..={MAX_QUBITS}, got {0}")]
    InvalidQubitCount(usize),
    #[error("non-finite coefficient {0}")]
    NonFiniteCoefficient(f64),
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("result is not Hermitian: residual imaginary coefficient {residual:e}")]
    NotHermitian { residual: f64 },
}

/// Single-qubit Pauli axis. The identity is represented by absence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    /// Product of two single-qubit Paulis: `(phase exponent k of i^k, result)`.
    fn mul(self, rhs: Axis) -> (u8, Option<Axis>) {
        use Axis::*;
        match (self, rhs) {
            (a, b) if a == b => (0, None),
            (X, Y) => (1, Some(Z)),
            (Y, X) => (3, Some(Z)),
            (Y, Z) => (1, Some(X)),
            (Z, Y) => (3, Some(X)),
            (Z, X) => (1, Some(Y)),
            (X, Z) => (3, Some(Y)),
            _ => unreachable!(),
        }
    }
}

/// Power of the imaginary unit, `i^k` with `k` taken mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Phase {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Tensor product of non-identity single-qubit Paulis, sorted by qubit index.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<(usize, Axis)>);

impl PauliString {
    pub fn identity() -> Self {
        PauliString(Vec::new())
    }

    pub fn single(qubit: usize, axis: Axis) -> Self {
        PauliString(vec![(qubit, axis)])
    }

    /// Builds a string from `(qubit, axis)` pairs in any order.
    pub fn new(ops: impl IntoIterator<Item = (usize, Axis)>) -> Result<Self, PauliError> {
        let mut ops: Vec<_> = ops.into_iter().collect();
        ops.sort_unstable();
        for w in ops.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(PauliError::DuplicateQubit(w[0].0));
            }
        }
        Ok(PauliString(ops))
    }

    pub fn ops(&self) -> &[(usize, Axis)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.0.last().map(|&(q, _)| q)
    }

    /// Bit masks `(x, z)`: bit `q` of `x` is set for X or Y on qubit `q`,
    /// bit `q` of `z` for Z or Y.
    pub fn masks(&self) -> (u64, u64) {
        let mut x = 0u64;
        let mut z = 0u64;
        for &(q, a) in &self.0 {
            let bit = 1u64 << q;
            match a {
                Axis::X => x |= bit,
                Axis::Y => {
                    x |= bit;
                    z |= bit
                }
                Axis::Z => z |= bit,
            }
        }
        (x, z)
    }

    pub fn y_count(&self) -> u32 {
        self.0.iter().filter(|(_, a)| *a == Axis::Y).count() as u32
    }

    /// Exact product `self · rhs = phase · string`.
    pub fn multiply(&self, rhs: &PauliString) -> (Phase, PauliString) {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut k = 0u32;
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (qa, xa) = a[i];
            let (qb, xb) = b[j];
            if qa < qb {
                out.push((qa, xa));
                i += 1;
            } else if qb < qa {
                out.push((qb, xb));
                j += 1;
            } else {
                let (dk, axis) = xa.mul(xb);
                k += dk as u32;
                if let Some(axis) = axis {
                    out.push((qa, axis));
                }
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        (Phase::from_exponent(k), PauliString(out))
    }

    /// Two Pauli strings commute iff they anticommute on an even number of qubits.
    pub fn commutes_with(&self, rhs: &PauliString) -> bool {
        let (x1, z1) = self.masks();
        let (x2, z2) = rhs.masks();
        ((x1 & z2).count_ones() + (z1 & x2).count_ones()) % 2 == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        for (n, (q, a)) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", a.as_char(), q)?;
        }
        Ok(())
    }
}

/// A real coefficient times a Pauli string.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, string: PauliString) -> Self {
        PauliTerm { coefficient, string }
    }

    pub fn identity(coefficient: f64) -> Self {
        PauliTerm::new(coefficient, PauliString::identity())
    }

    pub fn is_identity(&self) -> bool {
        self.string.is_identity()
    }
}

/// Product of two terms before the Hermiticity check: a complex coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasedTerm {
    pub coefficient: Complex64,
    pub string: PauliString,
}

pub fn multiply_terms(a: &PauliTerm, b: &PauliTerm) -> PhasedTerm {
    let (phase, string) = a.string.multiply(&b.string);
    PhasedTerm {
        coefficient: phase.to_complex() * (a.coefficient * b.coefficient),
        string,
    }
}

/// Canonical real-weighted sum of Pauli strings on `qubit_count` qubits.
#[derive(Debug, Clone)]
pub struct PauliSum {
    qubit_count: usize,
    terms: Vec<PauliTerm>,
    drop_tol: f64,
}

impl PartialEq for PauliSum {
    fn eq(&self, other: &Self) -> bool {
        self.qubit_count == other.qubit_count && self.terms == other.terms
    }
}

fn check_qubit_count(n: usize) -> Result<(), PauliError> {
    if n == 0 || n > MAX_QUBITS {
        Err(PauliError::InvalidQubitCount(n))
    } else {
        Ok(())
    }
}

impl PauliSum {
    pub fn zero(qubit_count: usize) -> Result<Self, PauliError> {
        check_qubit_count(qubit_count)?;
        Ok(PauliSum {
            qubit_count,
            terms: Vec::new(),
            drop_tol: DEFAULT_DROP_TOL,
        })
    }

    pub fn identity(qubit_count: usize, coefficient: f64) -> Result<Self, PauliError> {
        Self::from_terms(qubit_count, [PauliTerm::identity(coefficient)])
    }

    pub fn from_terms(qubit_count: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self, PauliError> {
        Self::from_terms_with_tol(qubit_count, terms, DEFAULT_DROP_TOL)
    }

    /// Merges like terms and drops coefficients with `|c| <= drop_tol`.
    pub fn from_terms_with_tol(
        qubit_count: usize,
        terms: impl IntoIterator<Item = PauliTerm>,
        drop_tol: f64,
    ) -> Result<Self, PauliError> {
        check_qubit_count(qubit_count)?;
        let mut acc: BTreeMap<PauliString, f64> = BTreeMap::new();
        for t in terms {
            if !t.coefficient.is_finite() {
                return Err(PauliError::NonFiniteCoefficient(t.coefficient));
            }
            if let Some(q) = t.string.max_qubit() {
                if q >= qubit_count {
                    return Err(PauliError::QubitOutOfRange { qubit: q, qubit_count });
                }
            }
            *acc.entry(t.string).or_insert(0.0) += t.coefficient;
        }
        Ok(Self::from_map(qubit_count, acc, drop_tol))
    }

    fn from_map(qubit_count: usize, acc: BTreeMap<PauliString, f64>, drop_tol: f64) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.abs() > drop_tol)
            .map(|(string, coefficient)| PauliTerm { coefficient, string })
            .collect();
        PauliSum {
            qubit_count,
            terms,
            drop_tol,
        }
    }

    /// Folds a complex accumulation back to a Hermitian sum, asserting that
    /// every imaginary part cancelled.
    fn from_complex(
        qubit_count: usize,
        acc: BTreeMap<PauliString, Complex64>,
        drop_tol: f64,
    ) -> Result<Self, PauliError> {
        let residual = acc.values().map(|c| c.im.abs()).fold(0.0, f64::max);
        if residual > drop_tol {
            return Err(PauliError::NotHermitian { residual });
        }
        let real = acc.into_iter().map(|(s, c)| (s, c.re)).collect();
        Ok(Self::from_map(qubit_count, real, drop_tol))
    }

    /// Re-runs canonicalization; a no-op on any value this type hands out.
    pub fn canonicalize(&self) -> Self {
        Self::from_terms_with_tol(self.qubit_count, self.terms.iter().cloned(), self.drop_tol)
            .expect("a canonical sum re-canonicalizes")
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn drop_tol(&self) -> f64 {
        self.drop_tol
    }

    pub fn with_drop_tol(mut self, drop_tol: f64) -> Self {
        self.drop_tol = drop_tol;
        self.canonicalize()
    }

    pub fn identity_coefficient(&self) -> f64 {
        match self.terms.first() {
            Some(t) if t.is_identity() => t.coefficient,
            _ => 0.0,
        }
    }

    /// Number of terms that need a measurement (everything but the identity).
    pub fn non_identity_count(&self) -> usize {
        self.terms.iter().filter(|t| !t.is_identity()).count()
    }

    /// `Σ_j |c_j|`, identity included. Upper-bounds the spectral norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// `Tr(H) = 2^n · c_I`.
    pub fn trace(&self) -> f64 {
        self.identity_coefficient() * 2f64.powi(self.qubit_count as i32)
    }

    /// `Tr(H) / 2^n`, the expectation in the maximally mixed state.
    pub fn normalized_trace(&self) -> f64 {
        self.identity_coefficient()
    }

    fn check_dims(&self, other: &PauliSum) -> Result<(), PauliError> {
        if self.qubit_count != other.qubit_count {
            Err(PauliError::DimensionMismatch {
                left: self.qubit_count,
                right: other.qubit_count,
            })
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum, PauliError> {
        self.check_dims(other)?;
        Self::from_terms_with_tol(
            self.qubit_count,
            self.terms.iter().chain(other.terms.iter()).cloned(),
            self.drop_tol,
        )
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        Self::from_terms_with_tol(
            self.qubit_count,
            self.terms
                .iter()
                .map(|t| PauliTerm::new(t.coefficient * factor, t.string.clone())),
            self.drop_tol,
        )
        .expect("scaling keeps the sum well-formed")
    }

    /// `self − c·I`.
    pub fn shifted(&self, c: f64) -> PauliSum {
        Self::from_terms_with_tol(
            self.qubit_count,
            self.terms
                .iter()
                .cloned()
                .chain(std::iter::once(PauliTerm::identity(-c))),
            self.drop_tol,
        )
        .expect("shifting keeps the sum well-formed")
    }

    fn product_map(&self, other: &PauliSum) -> BTreeMap<PauliString, Complex64> {
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let p = multiply_terms(a, b);
                *acc.entry(p.string).or_insert(Complex64::new(0.0, 0.0)) += p.coefficient;
            }
        }
        acc
    }

    /// Operator product. Fails unless the product is Hermitian, which holds
    /// whenever the two factors commute.
    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum, PauliError> {
        self.check_dims(other)?;
        Self::from_complex(self.qubit_count, self.product_map(other), self.drop_tol)
    }

    /// `(self − c·I)²`.
    pub fn square_shifted(&self, c: f64) -> Result<PauliSum, PauliError> {
        let shifted = self.shifted(c);
        shifted.multiply(&shifted)
    }

    /// True iff every coefficient of `AB − BA` has magnitude `<= tol`.
    pub fn commutes(&self, other: &PauliSum, tol: f64) -> Result<bool, PauliError> {
        self.check_dims(other)?;
        // Commuting string pairs cancel in AB − BA; anticommuting ones double.
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                if !a.string.commutes_with(&b.string) {
                    let p = multiply_terms(a, b);
                    *acc.entry(p.string).or_insert(Complex64::new(0.0, 0.0)) += p.coefficient * 2.0;
                }
            }
        }
        Ok(acc.values().all(|c| c.norm() <= tol))
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, t) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}·{}", t.coefficient, t.string)?;
        }
        Ok(())
    }
}

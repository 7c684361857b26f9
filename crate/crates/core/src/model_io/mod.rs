//! Operator ingestion: the Pauli-sum text format and built-in models.

mod builders;
mod parse;

pub use builders::{
    build_heisenberg_chain, build_number_operator, build_s_squared, build_spin_orbital_s_squared,
    build_spin_orbital_sz, build_total_sz, build_transverse_ising, build_z_parity,
};
pub use parse::{parse_pauli_sum, parse_pauli_sum_bytes, serialize_pauli_sum, ParseError, ParseErrorKind};

//! Constrained VQE/VQD with symmetry penalty terms.
//!
//! Pauli-sum algebra, a statevector simulator for the hardware-efficient
//! ansatz, an exact dense oracle, penalty-coefficient formulas, the two
//! penalty cost functions, convex-envelope analysis in the `(C, E)` plane
//! and gradient-based / derivative-free optimizers.

pub mod cost;
pub mod envelope;
pub mod model_io;
pub mod optimizer;
pub mod pauli;
pub mod penalty;
pub mod spectrum;
pub mod statevector;

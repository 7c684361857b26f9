//! Penalty-coefficient formulas for the squared-operator cost `F¹` and
//! overlap weights for deflation.
//!
//! The chain `mu_exact ≤ mu_simple ≤ mu_rough` holds for any commuting
//! `(Ĥ, Ĉ)`: the exact threshold uses the full spectrum, the simple formula
//! only the target/ground gap and `C_min`, the rough bound only the Pauli
//! coefficients of `Ĥ`.

use thiserror::Error;

use crate::pauli::PauliSum;
use crate::spectrum::{min_distinct_gap, OracleError, SectorTarget, SpectrumPoint};

/// Default charge-matching tolerance.
pub const MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PenaltyError {
    #[error("target energy {target} lies below ground estimate {ground}")]
    InvalidEstimate { target: f64, ground: f64 },
    #[error("C_min must be positive, got {0}")]
    InvalidCMin(f64),
    #[error("state {index} below the target already has the target charge")]
    InconsistentTarget { index: usize },
    #[error("penalty coefficient must be finite and non-negative, got {0}")]
    InvalidMu(f64),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A conserved observable with its target eigenvalue and penalty weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyConstraint {
    pub observable: PauliSum,
    pub target: f64,
    pub mu: f64,
    pub c_min: f64,
}

impl PenaltyConstraint {
    /// `mu = 0` is accepted: it switches the penalty off.
    pub fn new(observable: PauliSum, target: f64, mu: f64, c_min: f64) -> Result<Self, PenaltyError> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(PenaltyError::InvalidMu(mu));
        }
        if !(c_min.is_finite() && c_min > 0.0) {
            return Err(PenaltyError::InvalidCMin(c_min));
        }
        Ok(PenaltyConstraint {
            observable,
            target,
            mu,
            c_min,
        })
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self, PenaltyError> {
        Self::new(self.observable.clone(), self.target, mu, self.c_min)
    }

    /// Sector-miss monitor: a residual `⟨(Ĉ−c)²⟩` above `0.1·C_min²` means
    /// the optimizer did not land in the target sector.
    pub fn is_sector_miss(&self, residual: f64) -> bool {
        residual > SECTOR_MISS_FRACTION * self.c_min * self.c_min
    }
}

pub const SECTOR_MISS_FRACTION: f64 = 0.1;

/// Known `C_min` values for the standard conserved quantities.
pub mod universal_c_min {
    pub const NUMBER: f64 = 1.0;
    pub const S_SQUARED: f64 = 0.75;
    pub const S_Z: f64 = 0.5;
    pub const Z_PARITY: f64 = 2.0;
}

fn check_estimates(target: f64, ground: f64) -> Result<(), PenaltyError> {
    if target < ground || !target.is_finite() || !ground.is_finite() {
        Err(PenaltyError::InvalidEstimate { target, ground })
    } else {
        Ok(())
    }
}

fn check_c_min(c_min: f64) -> Result<(), PenaltyError> {
    if c_min.is_finite() && c_min > 0.0 {
        Ok(())
    } else {
        Err(PenaltyError::InvalidCMin(c_min))
    }
}

/// Tight threshold `max_{i<i₀} (E_{i₀} − Eᵢ)/(Cᵢ − c)²` on the first charge.
///
/// Returns 0 when `i₀ = 0`: the maximum is over an empty set and every
/// positive coefficient works.
pub fn mu_exact(points: &[SpectrumPoint], target: &SectorTarget) -> Result<f64, PenaltyError> {
    let mus = mu_exact_multi(points, target)?;
    Ok(mus[0])
}

/// Per-constraint thresholds for a joint sector.
///
/// Every state below `i₀` violates at least one constraint. Constraint `l`
/// takes the maximum of `(E_{i₀} − Eᵢ)/(Cᵢ⁽ˡ⁾ − c⁽ˡ⁾)²` over the lower
/// states that violate it, so each lower state's total penalty covers its
/// energy deficit. With one constraint this is the single-observable threshold.
pub fn mu_exact_multi(points: &[SpectrumPoint], target: &SectorTarget) -> Result<Vec<f64>, PenaltyError> {
    let k = target.targets.len();
    let mut mus = vec![0.0f64; k];
    for (i, p) in points.iter().enumerate().take(target.index) {
        let mut violated = false;
        for l in 0..k {
            let dc = p.charges[l] - target.targets[l];
            if dc.abs() > MATCH_TOL {
                violated = true;
                let ratio = (target.energy - p.energy).max(0.0) / (dc * dc);
                mus[l] = mus[l].max(ratio);
            }
        }
        if !violated {
            return Err(PenaltyError::InconsistentTarget { index: i });
        }
    }
    Ok(mus)
}

/// `(E_{i₀} − E₀) / C_min²`. The same formula with classically estimated
/// energies gives the `ce` variant.
pub fn mu_simple(e_target: f64, e_ground: f64, c_min: f64) -> Result<f64, PenaltyError> {
    check_estimates(e_target, e_ground)?;
    check_c_min(c_min)?;
    Ok((e_target - e_ground) / (c_min * c_min))
}

/// `2 Σⱼ|cⱼ| / C_min²`, valid for any system.
pub fn mu_rough(h: &PauliSum, c_min: f64) -> f64 {
    assert!(c_min > 0.0, "C_min must be positive");
    2.0 * h.coefficient_norm() / (c_min * c_min)
}

/// One [`PenaltyConstraint`] per observable with `mu = gap / (C⁽ˡ⁾_min)²`,
/// where `C⁽ˡ⁾_min` comes from the dense oracle.
pub fn mu_multi(
    constraints: &[(PauliSum, f64)],
    e_target: f64,
    e_ground: f64,
) -> Result<Vec<PenaltyConstraint>, PenaltyError> {
    constraints
        .iter()
        .map(|(obs, c)| {
            let c_min = min_distinct_gap(obs)?;
            let mu = mu_simple(e_target, e_ground, c_min)?;
            PenaltyConstraint::new(obs.clone(), *c, mu, c_min)
        })
        .collect()
}

/// Deflation weights `(β₀^(ce), β₀^(rough)) = (2(E_t − E₀), 4Σ|cᵢ|)`.
pub fn beta0_estimates(h: &PauliSum, e_target_est: f64, e_ground_est: f64) -> Result<(f64, f64), PenaltyError> {
    check_estimates(e_target_est, e_ground_est)?;
    Ok((2.0 * (e_target_est - e_ground_est), 4.0 * h.coefficient_norm()))
}

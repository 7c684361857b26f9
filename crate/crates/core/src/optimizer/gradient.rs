use std::f64::consts::FRAC_PI_2;

use super::{GradientMethod, Objective, OptimizeError};
use crate::cost::PenaltyForm;

/// Gradient at `params`. `F¹` and every linear part of `F²` are expectation
/// values of Hermitian operators, so the ±π/2 shift rule is exact for each
/// `R_Y`/`R_Z` angle. The squared expectations of `F²` go through the chain
/// rule with their inner expectations shifted.
pub(crate) fn evaluate(
    obj: &mut Objective<'_>,
    params: &[f64],
    method: GradientMethod,
) -> Result<Vec<f64>, OptimizeError> {
    obj.check_len(params)?;
    match method {
        GradientMethod::CentralDifference(h) => {
            let mut x = params.to_vec();
            let mut g = Vec::with_capacity(params.len());
            for k in 0..params.len() {
                x[k] = params[k] + h;
                let plus = obj.value(&x)?;
                x[k] = params[k] - h;
                let minus = obj.value(&x)?;
                x[k] = params[k];
                g.push((plus - minus) / (2.0 * h));
            }
            Ok(g)
        }
        GradientMethod::ParameterShift => match obj.spec.form() {
            PenaltyForm::SquaredOperator => {
                let mut x = params.to_vec();
                let mut g = Vec::with_capacity(params.len());
                for k in 0..params.len() {
                    x[k] = params[k] + FRAC_PI_2;
                    let plus = obj.value(&x)?;
                    x[k] = params[k] - FRAC_PI_2;
                    let minus = obj.value(&x)?;
                    x[k] = params[k];
                    g.push(0.5 * (plus - minus));
                }
                Ok(g)
            }
            PenaltyForm::SquaredExpectation => {
                let center = obj.breakdown(params)?;
                let constraints = obj.spec.constraints().to_vec();
                let weights: Vec<f64> = constraints
                    .iter()
                    .zip(&center.charge_expectations)
                    .map(|(c, &m)| 2.0 * c.mu * (m - c.target))
                    .collect();
                let mut x = params.to_vec();
                let mut g = Vec::with_capacity(params.len());
                for k in 0..params.len() {
                    x[k] = params[k] + FRAC_PI_2;
                    let plus = obj.breakdown(&x)?;
                    x[k] = params[k] - FRAC_PI_2;
                    let minus = obj.breakdown(&x)?;
                    x[k] = params[k];
                    let linear = |b: &crate::cost::CostBreakdown| b.energy_part + b.deflation_part;
                    let mut d = 0.5 * (linear(&plus) - linear(&minus));
                    for (l, w) in weights.iter().enumerate() {
                        d += w * 0.5 * (plus.charge_expectations[l] - minus.charge_expectations[l]);
                    }
                    g.push(d);
                }
                Ok(g)
            }
        },
    }
}

use super::{gradient, Objective, OptimizeError, OptimizerConfig, Outcome};

const ARMIJO_C1: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Dense inverse-Hessian BFGS.
pub(crate) fn run(obj: &mut Objective<'_>, config: &OptimizerConfig, x0: &[f64]) -> Result<Outcome, OptimizeError> {
    let n = x0.len();
    let identity = |n: usize| {
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = 1.0;
        }
        h
    };
    let mut x = x0.to_vec();
    let mut f = obj.value(&x)?;
    let mut g = gradient::evaluate(obj, &x, config.gradient)?;
    let mut n_grad = 1;
    let mut h = identity(n);
    let mut fresh = true;
    let mut trace = vec![f];

    for _ in 0..config.max_iterations {
        if inf_norm(&g) < config.grad_tol {
            break;
        }
        let mut d: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            h = identity(n);
            fresh = true;
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }

        let mut t = 1.0;
        let mut x_new = vec![0.0; n];
        let accepted = loop {
            for i in 0..n {
                x_new[i] = x[i] + t * d[i];
            }
            let f_new = obj.value(&x_new)?;
            if f_new <= f + ARMIJO_C1 * t * slope {
                break Some(f_new);
            }
            t *= 0.5;
            if t < MIN_STEP {
                break None;
            }
        };
        let Some(f_new) = accepted else {
            if fresh {
                break;
            }
            h = identity(n);
            fresh = true;
            continue;
        };

        let g_new = gradient::evaluate(obj, &x_new, config.gradient)?;
        n_grad += 1;
        let s: Vec<f64> = (0..n).map(|i| x_new[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| g_new[i] - g[i]).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if fresh {
                // Rescale the first step's identity to the observed curvature.
                let scale = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
            }
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            // H ← H − ρ(s·yᵀH + Hy·sᵀ) + (ρ²·yᵀHy + ρ)·s·sᵀ
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            fresh = false;
        }
        let stalled = (f - f_new).abs() <= f64::EPSILON * f.abs().max(1.0) && inf_norm(&s) <= f64::EPSILON;
        x = x_new;
        f = f_new;
        g = g_new;
        trace.push(f);
        if stalled {
            break;
        }
    }
    Ok(Outcome {
        cost_trace: trace,
        n_grad_evals: n_grad,
    })
}

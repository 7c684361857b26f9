use super::{Objective, OptimizeError, OptimizerConfig, Outcome};

const INITIAL_STEP: f64 = 0.5;

/// Nelder–Mead with dimension-adaptive coefficients. Stops once the spread
/// of vertex costs falls below `grad_tol` and the simplex is small.
pub(crate) fn run(obj: &mut Objective<'_>, config: &OptimizerConfig, x0: &[f64]) -> Result<Outcome, OptimizeError> {
    let n = x0.len();
    let nf = n.max(1) as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);
    let x_tol = config.grad_tol.sqrt();

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), obj.value(x0)?));
    for k in 0..n {
        let mut v = x0.to_vec();
        v[k] += INITIAL_STEP;
        let f = obj.value(&v)?;
        simplex.push((v, f));
    }
    let mut trace = vec![simplex[0].1];

    let affine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };

    for _ in 0..config.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        trace.push(simplex[0].1);
        let f_spread = simplex[n].1 - simplex[0].1;
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= config.grad_tol && x_spread <= x_tol {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }
        let worst = simplex[n].clone();
        let xr = affine(&centroid, &worst.0, -alpha);
        let fr = obj.value(&xr)?;
        if fr < simplex[0].1 {
            let xe = affine(&centroid, &worst.0, -alpha * gamma);
            let fe = obj.value(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = affine(&centroid, &xr, rho);
            let fc = obj.value(&xc)?;
            (xc, fc)
        } else {
            let xc = affine(&centroid, &worst.0, rho);
            let fc = obj.value(&xc)?;
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let v = affine(&best, &entry.0, sigma);
            let f = obj.value(&v)?;
            *entry = (v, f);
        }
    }
    Ok(Outcome {
        cost_trace: trace,
        n_grad_evals: 0,
    })
}

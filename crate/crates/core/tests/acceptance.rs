//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails.

// `ensure!` negates its condition so that a NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use penaltyvqe::cost::{eval_f1, pauli_ops_per_eval, CostSpec, PenaltyForm};
use penaltyvqe::envelope::{
    classify_target, hull_clearance, minimize_f1_relaxation, minimize_f2_relaxation, minimize_noisy_f2_relaxation,
    noisy_tangent_first_order, points_from_spectrum, tangent_closed_form, EnvelopePoint, TangentCase, TargetClass,
};
use penaltyvqe::model_io::{
    build_heisenberg_chain, build_s_squared, build_total_sz, parse_pauli_sum_bytes, serialize_pauli_sum,
};
use penaltyvqe::optimizer::{gradient, minimize_observed, run_trials, GradientMethod, OptimizerConfig};
use penaltyvqe::pauli::{Axis, PauliString, PauliSum, PauliTerm};
use penaltyvqe::penalty::{
    beta0_estimates, mu_exact, mu_rough, mu_simple, universal_c_min, PenaltyConstraint, MATCH_TOL,
};
use penaltyvqe::spectrum::{min_distinct_gap, sector_ground, simultaneous_spectrum, SpectrumPoint, CLUSTER_TOL};
use penaltyvqe::statevector::{expectation, prepare, AnsatzConfig, NoiseModel};

use common::{dense_expectation, kron_dense, random_params, random_state, random_sum};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn sig4(x: f64) -> String {
    format!("{:.3e}", x)
}

fn criterion_1() -> Outcome {
    let gap = 0.6048;
    let norm = 3.968;
    let h = PauliSum::identity(1, norm / 2.0).unwrap();
    let got = [
        mu_simple(gap, 0.0, universal_c_min::NUMBER).unwrap(),
        mu_simple(gap, 0.0, universal_c_min::S_SQUARED).unwrap(),
        mu_simple(gap, 0.0, universal_c_min::S_Z).unwrap(),
        mu_rough(&h, universal_c_min::NUMBER),
        mu_rough(&h, universal_c_min::S_SQUARED),
        mu_rough(&h, universal_c_min::S_Z),
    ];
    let want = [0.6048, 1.075, 2.419, 3.968, 7.054, 15.87];
    for (g, w) in got.iter().zip(&want) {
        ensure!(sig4(*g) == sig4(*w), "{g} does not round to {w}");
    }
    Ok(format!("six entries reproduced: {:?}", got.map(sig4)))
}

fn sz_squared(n: usize) -> PauliSum {
    let sz = build_total_sz(n).unwrap();
    sz.multiply(&sz).unwrap()
}

/// Random bonds on a chain plus next-nearest neighbours, with `h·S_z + D·S_z²`.
fn random_commuting_instance(rng: &mut ChaCha8Rng, n: usize) -> PauliSum {
    let mut h = PauliSum::zero(n).unwrap();
    for (i, j) in (0..n - 1)
        .map(|i| (i, i + 1))
        .chain((0..n.saturating_sub(2)).map(|i| (i, i + 2)))
    {
        let jij = rng.random_range(-1.5..1.5);
        let bond = PauliSum::from_terms(
            n,
            [Axis::X, Axis::Y, Axis::Z].map(|a| PauliTerm::new(jij / 4.0, PauliString::new([(i, a), (j, a)]).unwrap())),
        )
        .unwrap();
        h = h.add(&bond).unwrap();
    }
    let field = rng.random_range(-1.0..1.0);
    let aniso = rng.random_range(-1.0..1.0);
    h.add(&build_total_sz(n).unwrap().scaled(field))
        .unwrap()
        .add(&sz_squared(n).scaled(aniso))
        .unwrap()
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut instances = 0;
    let mut attempts = 0;
    while instances < 24 {
        attempts += 1;
        ensure!(attempts < 500, "could not build enough instances");
        let n = 3 + attempts % 3;
        let h = random_commuting_instance(&mut rng, n);
        let sz = build_total_sz(n).unwrap();
        let pts = simultaneous_spectrum(&h, &sz, CLUSTER_TOL).map_err(|e| e.to_string())?;
        let cloud = points_from_spectrum(&pts);
        let c_min = min_distinct_gap(&sz).unwrap();
        let mut charges: Vec<f64> = cloud.iter().map(|p| p.c).collect();
        charges.sort_by(f64::total_cmp);
        charges.dedup();
        let Some((c, target)) = charges.iter().find_map(|&c| {
            let t = sector_ground(&pts, c, MATCH_TOL).ok()?;
            let boundary = classify_target(&cloud, c, t.energy, 1e-9).ok()? == TargetClass::Boundary;
            (t.index > 0 && boundary).then_some((c, t))
        }) else {
            continue;
        };
        let exact = mu_exact(&pts, &target).map_err(|e| e.to_string())?;
        let simple = mu_simple(target.energy, pts[0].energy, c_min).unwrap();
        let rough = mu_rough(&h, c_min);
        ensure!(
            exact <= simple + 1e-12 && simple <= rough + 1e-12,
            "ordering broken: {exact} {simple} {rough}"
        );
        let m = minimize_f1_relaxation(&cloud, c, exact * (1.0 + 1e-6)).unwrap();
        ensure!(
            (m.f_min - target.energy).abs() <= 1e-9,
            "n={n} c={c}: F1 minimum {} vs E_i0 {}",
            m.f_min,
            target.energy
        );
        ensure!(
            (m.c_at - c).abs() <= 1e-9,
            "n={n}: minimiser has charge {} not {c}",
            m.c_at
        );
        instances += 1;
    }
    Ok(format!("{instances} instances (n=3..5) from {attempts} draws"))
}

fn log_slope(mus: &[f64], devs: &[f64]) -> f64 {
    let xs: Vec<f64> = mus.iter().map(|m| m.ln()).collect();
    let ys: Vec<f64> = devs.iter().map(|d| d.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn deviation_law(cloud: &[EnvelopePoint], c: f64, e: f64) -> Result<f64, String> {
    let mus = [1.0, 10.0, 100.0, 1000.0];
    let mut devs = Vec::new();
    for &mu in &mus {
        let t = tangent_closed_form(cloud, c, e, mu, 1e-9).map_err(|x| x.to_string())?;
        ensure!(t.case == TangentCase::BoundaryTangent, "c={c} mu={mu}: {:?}", t.case);
        let m = minimize_f2_relaxation(cloud, c, mu).unwrap();
        let dev = e - m.f_min;
        let law = t.alpha * t.alpha / (4.0 * mu);
        ensure!((dev - law).abs() <= 1e-9, "c={c} mu={mu}: deviation {dev} vs {law}");
        ensure!(
            (t.f_min - m.f_min).abs() <= 1e-12,
            "c={c} mu={mu}: closed form {} vs {}",
            t.f_min,
            m.f_min
        );
        devs.push(dev);
    }
    let slope = log_slope(&mus, &devs);
    ensure!((slope + 1.0).abs() <= 0.01, "c={c}: log-log slope {slope}");
    Ok(slope)
}

fn criterion_3() -> Outcome {
    let toy = [EnvelopePoint::new(0.0, -2.0), EnvelopePoint::new(1.0, -1.0)];
    let mut slopes = vec![deviation_law(&toy, 1.0, -1.0)?];

    let h = build_heisenberg_chain(4, 1.0, false).unwrap();
    let sz = build_total_sz(4).unwrap();
    let pts = simultaneous_spectrum(&h, &sz, CLUSTER_TOL).unwrap();
    let cloud = points_from_spectrum(&pts);
    for c in [-2.0, -1.0, 1.0, 2.0] {
        let t = sector_ground(&pts, c, MATCH_TOL).unwrap();
        ensure!(
            classify_target(&cloud, c, t.energy, 1e-9).unwrap() == TargetClass::Boundary,
            "c={c} not boundary"
        );
        slopes.push(deviation_law(&cloud, c, t.energy)?);
    }
    Ok(format!(
        "toy + Heisenberg n=4 S_z∈{{±1,±2}}; slopes {:?}",
        slopes.iter().map(|s| format!("{s:.6}")).collect::<Vec<_>>()
    ))
}

fn criterion_4() -> Outcome {
    // Heisenberg pair with easy-axis anisotropy; the singlet is deflated.
    let h = build_heisenberg_chain(2, 1.0, false)
        .unwrap()
        .add(&sz_squared(2).scaled(-0.5))
        .unwrap();
    let sz = build_total_sz(2).unwrap();
    let beta = 3.0;
    let pts = simultaneous_spectrum(&h, &sz, CLUSTER_TOL).unwrap();
    let singlet = pts[0].eigenvector.clone();
    let shifted: Vec<SpectrumPoint> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| SpectrumPoint {
            energy: p.energy + if i == 0 { beta } else { 0.0 },
            ..p.clone()
        })
        .collect();
    let cloud = points_from_spectrum(&shifted);
    let c = 0.0;
    let target = cloud
        .iter()
        .filter(|p| p.c == c)
        .map(|p| p.e)
        .fold(f64::INFINITY, f64::min);
    ensure!(
        classify_target(&cloud, c, target, 1e-9).unwrap() == TargetClass::Interior,
        "target not interior"
    );
    let clearance = hull_clearance(&cloud, c, target).unwrap();
    ensure!(clearance > 0.0, "clearance {clearance}");

    let gaps: Vec<f64> = (0..=6)
        .map(|k| target - minimize_f2_relaxation(&cloud, c, 10f64.powi(k)).unwrap().f_min)
        .collect();
    let worst = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure!(
        worst >= clearance - 1e-9,
        "sup f_min comes within {worst} of target (clearance {clearance})"
    );
    ensure!(
        (gaps[5] - gaps[6]).abs() <= 1e-9,
        "gap not stable: {} vs {}",
        gaps[5],
        gaps[6]
    );

    let e_ground = pts[0].energy;
    let mu = mu_simple(target, e_ground, universal_c_min::S_Z).unwrap();
    let spec = CostSpec::new(h, PenaltyForm::SquaredOperator)
        .with_deflation(singlet, beta)
        .unwrap()
        .with_constraint(PenaltyConstraint::new(sz, c, mu, universal_c_min::S_Z).unwrap())
        .unwrap();
    let ansatz = AnsatzConfig::hardware_efficient(2, 2);
    let trials = run_trials(&spec, &ansatz, &OptimizerConfig::default().with_seed(4), 10).map_err(|e| e.to_string())?;
    let best = trials.best().best_cost;
    ensure!((best - target).abs() <= 1e-6, "F1 best {best} vs target {target}");
    Ok(format!(
        "clearance {clearance:.12}, min gap over mu {worst:.12}; F1 (mu={mu:.4}) best {best:.10} vs {target:.10}"
    ))
}

fn criterion_5() -> Outcome {
    // Pointwise affine identity.
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let n = 3;
    let number = PauliSum::from_terms(
        n,
        (0..n).flat_map(|q| {
            [
                PauliTerm::identity(0.5),
                PauliTerm::new(-0.5, PauliString::single(q, Axis::Z)),
            ]
        }),
    )
    .unwrap();
    let h = build_heisenberg_chain(n, 1.0, true)
        .unwrap()
        .add(&number.scaled(0.7))
        .unwrap()
        .add(&PauliSum::identity(n, -0.4).unwrap())
        .unwrap();
    let mu = 1.7;
    let con = PenaltyConstraint::new(number, 2.0, mu, 1.0).unwrap();
    let defl = random_state(&mut rng, n);
    let clean = CostSpec::new(h.clone(), PenaltyForm::SquaredOperator)
        .with_constraint(con.clone())
        .unwrap()
        .with_deflation(defl, 0.9)
        .unwrap();
    let p = 0.3;
    let noisy = clean.clone().with_noise(Some(NoiseModel::new(p).unwrap()));
    let k = (h.trace() + mu * clean.shifted_squares()[0].trace()) / (1u64 << n) as f64;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = random_state(&mut rng, n);
        let a = eval_f1(&clean, &s).unwrap();
        let b = eval_f1(&noisy, &s).unwrap();
        let predicted = (1.0 - p) * (a.total - a.deflation_part) + p * k + a.deflation_part;
        worst = worst.max((b.total - predicted).abs());
    }
    ensure!(worst <= 1e-12, "affine identity off by {worst}");

    // Argmin invariance end to end.
    let h4 = build_heisenberg_chain(4, 1.0, false).unwrap();
    let sz = build_total_sz(4).unwrap();
    let pts = simultaneous_spectrum(&h4, &sz, CLUSTER_TOL).unwrap();
    let t = sector_ground(&pts, 1.0, MATCH_TOL).unwrap();
    let mu4 = mu_simple(t.energy, pts[0].energy, universal_c_min::S_Z).unwrap();
    let spec = CostSpec::new(h4, PenaltyForm::SquaredOperator)
        .with_constraint(PenaltyConstraint::new(sz, 1.0, mu4, universal_c_min::S_Z).unwrap())
        .unwrap();
    let spec_noisy = spec.clone().with_noise(Some(NoiseModel::new(p).unwrap()));
    let ansatz = AnsatzConfig::hardware_efficient(4, 3);
    let config = OptimizerConfig::default().with_seed(5);
    let clean_best = run_trials(&spec, &ansatz, &config, 5).unwrap().best().best_cost;
    let noisy_run = run_trials(&spec_noisy, &ansatz, &config, 5).unwrap();
    let noisy_best = spec
        .cost(&prepare(&ansatz, &noisy_run.best().best_params).unwrap())
        .unwrap();
    ensure!(
        (noisy_best - clean_best).abs() <= 1e-6,
        "noisy argmin gives {noisy_best}, clean {clean_best}"
    );

    // First-order noisy tangent shifts against the exact noisy minimiser.
    let toy = [EnvelopePoint::new(0.0, -2.0), EnvelopePoint::new(1.0, -1.0)];
    let toy_k = noisy_fit(&toy, 1.0, -1.0, 1.0, -1.5, 0.5)?;
    let heis = points_from_spectrum(&pts);
    let heis_k = noisy_fit(&heis, 1.0, t.energy, 1.0, 0.0, 0.0)?;
    Ok(format!(
        "affine max err {worst:.1e}; argmin |Δ| {:.1e}; first-order K: toy {toy_k:.3e}, Heisenberg {heis_k:.3e}",
        (noisy_best - clean_best).abs()
    ))
}

/// Fits `K = max err/p²` over three noise levels and checks the error is
/// quadratic (or at round-off).
fn noisy_fit(cloud: &[EnvelopePoint], c: f64, e: f64, mu: f64, t_h: f64, t_c: f64) -> Result<f64, String> {
    let base = tangent_closed_form(cloud, c, e, mu, 1e-9).map_err(|x| x.to_string())?;
    let ps = [1e-3, 2e-3, 4e-3];
    let mut errs = Vec::new();
    for &p in &ps {
        let exact = minimize_noisy_f2_relaxation(cloud, c, mu, p, t_h, t_c).unwrap();
        let shift = noisy_tangent_first_order(&base, p, t_h, t_c, c, e, mu).unwrap();
        let err = [
            (base.c_t + shift.c_t - exact.c_at).abs(),
            (base.e_t + shift.e_t - exact.e_at).abs(),
            (base.f_min + shift.f_min - exact.f_min).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        errs.push(err);
    }
    let k = errs.iter().zip(&ps).map(|(e, p)| e / (p * p)).fold(0.0, f64::max);
    for (err, p) in errs.iter().zip(&ps) {
        let ratio = err / (p * p);
        ensure!(
            *err <= 1e-12 || (ratio - k).abs() <= 0.05 * k,
            "error {err} at p={p} is not O(p²) (ratio {ratio}, K {k})"
        );
        ensure!(*err <= k * p * p + 1e-15, "error {err} exceeds K p²");
    }
    Ok(k)
}

fn criterion_6() -> Outcome {
    let n = 4;
    let h = build_heisenberg_chain(n, 1.0, false).unwrap();
    let sz = build_total_sz(n).unwrap();
    let pts = simultaneous_spectrum(&h, &sz, CLUSTER_TOL).unwrap();
    let e0 = pts[0].energy;
    let e1 = pts.iter().map(|p| p.energy).find(|e| *e > e0 + 1e-6).unwrap();
    let ansatz = AnsatzConfig::hardware_efficient(n, 3);
    let config = OptimizerConfig::default().with_seed(6);

    let vqe = run_trials(
        &CostSpec::new(h.clone(), PenaltyForm::SquaredOperator),
        &ansatz,
        &config,
        10,
    )
    .unwrap();
    let ground = vqe.best();
    ensure!(
        (ground.best_cost - e0).abs() <= 1e-6,
        "ground {} vs {e0}",
        ground.best_cost
    );

    let (_, beta) = beta0_estimates(&h, e1, e0).unwrap();
    let found = prepare(&ansatz, &ground.best_params).unwrap();
    let vqd = CostSpec::new(h.clone(), PenaltyForm::SquaredOperator)
        .with_deflation(found, beta)
        .unwrap();
    let level1 = run_trials(&vqd, &ansatz, &config, 10).unwrap();
    let excited = expectation(&h, &prepare(&ansatz, &level1.best().best_params).unwrap()).unwrap();
    ensure!((excited - e1).abs() <= 1e-6, "first excited {excited} vs {e1}");

    let t = sector_ground(&pts, 1.0, MATCH_TOL).unwrap();
    let mu = mu_simple(t.energy, e0, universal_c_min::S_Z).unwrap();
    let sector = CostSpec::new(h, PenaltyForm::SquaredOperator)
        .with_constraint(PenaltyConstraint::new(sz, 1.0, mu, universal_c_min::S_Z).unwrap())
        .unwrap();
    let constrained = run_trials(&sector, &ansatz, &config, 10).unwrap();
    let best = constrained.best();
    ensure!(
        (best.best_cost - t.energy).abs() <= 1e-6,
        "sector {} vs {}",
        best.best_cost,
        t.energy
    );
    ensure!(
        best.constraint_residual <= 1e-8,
        "sector residual {}",
        best.constraint_residual
    );
    Ok(format!(
        "ground err {:.1e}, VQD (beta={beta}) err {:.1e}, S_z=1 err {:.1e} residual {:.1e}",
        (ground.best_cost - e0).abs(),
        (excited - e1).abs(),
        (best.best_cost - t.energy).abs(),
        best.constraint_residual
    ))
}

fn criterion_7() -> Outcome {
    let n = 4;
    let h = build_heisenberg_chain(n, 1.0, false).unwrap();
    let s2 = build_s_squared(n).unwrap();
    let f1 = CostSpec::new(h, PenaltyForm::SquaredOperator)
        .with_constraint(PenaltyConstraint::new(s2, 2.0, 2.0, universal_c_min::S_SQUARED).unwrap())
        .unwrap();
    let f2 = f1.clone().with_form(PenaltyForm::SquaredExpectation);
    let ansatz = AnsatzConfig::hardware_efficient(n, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in [&f1, &f2] {
        let x0 = random_params(&mut rng, ansatz.parameter_count());
        let mut calls = 0usize;
        let config = OptimizerConfig {
            max_iterations: 40,
            ..OptimizerConfig::default()
        };
        let rec = minimize_observed(spec, &ansatz, &config, &x0, &mut |_, _| calls += 1).map_err(|e| e.to_string())?;
        ensure!(rec.nfev == calls, "nfev {} vs instrumented {calls}", rec.nfev);
        ensure!(
            rec.n_meas == calls * pauli_ops_per_eval(spec),
            "n_meas {} vs {calls} evaluations",
            rec.n_meas
        );
    }
    let (a, b) = (pauli_ops_per_eval(&f1), pauli_ops_per_eval(&f2));
    ensure!(b < a, "F2 count {b} not below F1 count {a}");
    Ok(format!(
        "n_meas identity exact; Pauli ops per evaluation F1={a}, F2={b}"
    ))
}

fn criterion_8() -> Outcome {
    let n = 4;
    let h = build_heisenberg_chain(n, 1.0, false).unwrap();
    let sz = build_total_sz(n).unwrap();
    let pts = simultaneous_spectrum(&h, &sz, CLUSTER_TOL).unwrap();
    let t = sector_ground(&pts, 1.0, MATCH_TOL).unwrap();
    let ansatz = AnsatzConfig::hardware_efficient(n, 3);
    let exact = mu_exact(&pts, &t).unwrap();
    let rough = mu_rough(&h, universal_c_min::S_Z);
    let mean_nfev = |mu: f64, master_seed: u64| {
        let spec = CostSpec::new(h.clone(), PenaltyForm::SquaredOperator)
            .with_constraint(PenaltyConstraint::new(sz.clone(), 1.0, mu, universal_c_min::S_Z).unwrap())
            .unwrap();
        let config = OptimizerConfig::default().with_seed(master_seed);
        run_trials(&spec, &ansatz, &config, 10).unwrap().summary.mean_nfev
    };
    // The check itself: default master seed, ten trials.
    let (a, b) = (mean_nfev(exact, 0), mean_nfev(rough, 0));
    // Context only: a single ten-trial mean is noisy, so report how often the
    // ordering holds across further master seeds and the pooled means.
    let extra: Vec<(f64, f64)> = (1..5).map(|s| (mean_nfev(exact, s), mean_nfev(rough, s))).collect();
    let held = extra.iter().filter(|(x, y)| x <= y).count() + usize::from(a <= b);
    let pooled_a = (a + extra.iter().map(|e| e.0).sum::<f64>()) / 5.0;
    let pooled_b = (b + extra.iter().map(|e| e.1).sum::<f64>()) / 5.0;
    ensure!(a <= b, "mean nfev {a} (mu_exact={exact}) > {b} (mu_rough={rough})");
    Ok(format!(
        "mean nfev {a:.1} at mu_exact={exact:.4} vs {b:.1} at mu_rough={rough}; \
         ordering held for {held}/5 master seeds, pooled {pooled_a:.0} vs {pooled_b:.0}"
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);

    let mut grad_err = 0.0f64;
    for draw in 0..100 {
        let n = 1 + draw % 3;
        let h = random_sum(&mut rng, n, 1 + draw % 6);
        let c = random_sum(&mut rng, n, 1 + draw % 3);
        let form = if draw % 2 == 0 {
            PenaltyForm::SquaredOperator
        } else {
            PenaltyForm::SquaredExpectation
        };
        let mut spec = CostSpec::new(h, form)
            .with_constraint(
                PenaltyConstraint::new(c, rng.random_range(-1.0..1.0), rng.random_range(0.1..5.0), 1.0).unwrap(),
            )
            .unwrap();
        if draw % 3 == 0 {
            spec = spec.with_deflation(random_state(&mut rng, n), 1.5).unwrap();
        }
        if draw % 4 == 1 {
            spec = spec.with_noise(Some(NoiseModel::new(0.2).unwrap()));
        }
        let ansatz = AnsatzConfig::hardware_efficient(n, draw % 3);
        let x = random_params(&mut rng, ansatz.parameter_count());
        let ps = gradient(&spec, &ansatz, &x, GradientMethod::ParameterShift).unwrap();
        let cd = gradient(&spec, &ansatz, &x, GradientMethod::CentralDifference(1e-6)).unwrap();
        for (a, b) in ps.iter().zip(&cd) {
            grad_err = grad_err.max((a - b).abs());
        }
    }
    ensure!(grad_err <= 1e-5, "gradient mismatch {grad_err}");

    let mut norm_err = 0.0f64;
    for n in 1..=6 {
        let ansatz = AnsatzConfig::hardware_efficient(n, 3);
        let s = prepare(&ansatz, &random_params(&mut rng, ansatz.parameter_count())).unwrap();
        norm_err = norm_err.max((s.norm_sqr() - 1.0).abs());
    }
    ensure!(norm_err <= 1e-10, "norm drift {norm_err}");

    let mut dense_err = 0.0f64;
    for n in 1..=5 {
        for _ in 0..4 {
            let op = random_sum(&mut rng, n, 6);
            let shift = rng.random_range(-1.0..1.0);
            let m = kron_dense(&op);
            let dim = 1 << n;
            let eye = nalgebra::DMatrix::<num_complex::Complex64>::identity(dim, dim);
            let shifted = &m - &eye * num_complex::Complex64::new(shift, 0.0);
            let want_sq = &shifted * &shifted;
            let got_sq = kron_dense(&op.square_shifted(shift).unwrap());
            dense_err = dense_err.max((want_sq - got_sq).iter().map(|z| z.norm()).fold(0.0, f64::max));
            dense_err = dense_err.max((m.trace().re - op.trace()).abs());
            let s = random_state(&mut rng, n);
            dense_err = dense_err.max((dense_expectation(&m, &s) - expectation(&op, &s).unwrap()).abs());
        }
    }
    ensure!(dense_err <= 1e-10, "dense oracle mismatch {dense_err}");

    let seed_doc = serialize_pauli_sum(&random_sum(&mut rng, 3, 4)).into_bytes();
    let mut errors = 0;
    let mut parsed = 0;
    for i in 0..10_000 {
        let bytes: Vec<u8> = if i % 2 == 0 {
            let len = rng.random_range(0..64);
            (0..len).map(|_| rng.random::<u8>()).collect()
        } else {
            let mut doc = seed_doc.clone();
            for _ in 0..rng.random_range(1..4) {
                let at = rng.random_range(0..doc.len());
                match rng.random_range(0..3) {
                    0 => doc[at] = rng.random(),
                    1 => doc.insert(at, rng.random()),
                    _ => {
                        doc.remove(at);
                    }
                }
            }
            doc
        };
        match catch_unwind(|| parse_pauli_sum_bytes(&bytes)) {
            Ok(Ok(_)) => parsed += 1,
            Ok(Err(_)) => errors += 1,
            Err(_) => return Err(format!("parser panicked on {bytes:?}")),
        }
    }
    Ok(format!(
        "grad err {grad_err:.1e}; norm err {norm_err:.1e}; dense err {dense_err:.1e}; fuzz {errors} errors / {parsed} parses, no panics"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("penalty coefficients reproduce the six reference values", criterion_1),
        (
            "F1 threshold reaches the target sector on random instances",
            criterion_2,
        ),
        ("F2 deviation follows alpha^2/(4 mu)", criterion_3),
        ("interior target unreachable by F2, reached by F1", criterion_4),
        ("noise: F1 affine invariance and F2 first-order shifts", criterion_5),
        ("VQE / VQD / sector ground against the oracle", criterion_6),
        ("measurement accounting", criterion_7),
        ("nfev ordering mu_exact vs mu_rough", criterion_8),
        ("numerical hygiene", criterion_9),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    let _ = std::panic::take_hook();
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

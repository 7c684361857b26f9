//! The five subcommands. Each returns its CSV table; nothing is written
//! until a command has fully succeeded.

use anyhow::anyhow;
use penaltyvqe::cost::{pauli_ops_per_eval, CostSpec};
use penaltyvqe::envelope::{
    classify_target, lower_hull, minimize_f1_relaxation, minimize_f2_relaxation, minimize_noisy_f2_relaxation,
    points_from_spectrum, tangent_closed_form, EnvelopePoint, TangentCase, TargetClass,
};
use penaltyvqe::optimizer::{run_trials, OptimizationRecord, TrialSet};
use penaltyvqe::penalty::{beta0_estimates, MATCH_TOL};
use penaltyvqe::statevector::{expectation, overlap_sq, prepare, AnsatzConfig, StateVector};

use crate::config::{BetaPolicy, Form, Settings};
use crate::error::{Classify, Result};
use crate::problem::{ansatz, check_positive, optimizer, require_constraint, Problem};
use crate::table::{flag, float, int, opt_float, Table};

/// μ grid of the envelope table when none is given.
pub const DEFAULT_ENVELOPE_MUS: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

pub fn spectrum(settings: &Settings) -> Result<Table> {
    let problem = Problem::load(settings, true)?;
    let oracle = problem.oracle.as_ref().expect("oracle requested");
    let mut header = vec!["kind".to_string(), "index".into(), "energy".into()];
    header.extend(problem.observables.iter().map(|o| format!("c_{}", o.label)));
    header.extend(["in_sector".into(), "sector_ground".into()]);
    let mut table = Table::new(header);

    for (i, p) in oracle.points.iter().enumerate() {
        let mut row = vec!["point".into(), int(i), float(p.energy)];
        row.extend(p.charges.iter().map(|&c| float(c)));
        row.push(flag(oracle.levels.contains(&i)));
        row.push(flag(i == oracle.target.index));
        table.push(row);
    }
    // Summary: i₀, E_{i₀}, the target charges and the size of the sector.
    let mut row = vec!["summary".into(), int(oracle.target.index), float(oracle.target.energy)];
    row.extend(oracle.target.targets.iter().map(|&c| float(c)));
    row.push(int(oracle.levels.len()));
    row.push(flag(true));
    table.push(row);
    Ok(table)
}

/// Noiseless energy and state of a record's best parameters.
fn final_state(problem: &Problem, ansatz: &AnsatzConfig, record: &OptimizationRecord) -> Result<(f64, StateVector)> {
    let state = prepare(ansatz, &record.best_params).precondition()?;
    let energy = expectation(&problem.hamiltonian, &state).precondition()?;
    Ok((energy, state))
}

fn trials(spec: &CostSpec, ansatz: &AnsatzConfig, settings: &Settings) -> Result<TrialSet> {
    run_trials(spec, ansatz, &optimizer(settings), settings.seeds).precondition()
}

fn sector_miss(spec: &CostSpec, record: &OptimizationRecord) -> bool {
    spec.constraints()
        .iter()
        .zip(&record.constraint_residuals)
        .any(|(c, &r)| c.is_sector_miss(r))
}

pub fn vqe(settings: &Settings) -> Result<Table> {
    let problem = Problem::load(settings, false)?;
    let mus = problem.resolve_mus()?;
    let spec = problem.cost_spec(settings.form, &mus, settings.noise_p)?;
    let ansatz = ansatz(settings, problem.qubit_count());
    let set = trials(&spec, &ansatz, settings)?;
    let e_ref = problem.oracle.as_ref().map(|o| o.target.energy);

    let mut header: Vec<String> = [
        "kind",
        "seed",
        "nfev",
        "n_meas",
        "n_grad_evals",
        "best_cost",
        "energy",
        "energy_residual",
        "constraint_residual",
    ]
    .map(String::from)
    .into();
    header.extend(problem.observables.iter().map(|o| format!("residual_{}", o.label)));
    header.extend(problem.observables.iter().map(|o| format!("mu_{}", o.label)));
    header.push("sector_miss".into());
    let mut table = Table::new(header);

    // Numeric columns per seed; the summary row is their column means.
    let mut columns: Vec<Vec<Option<f64>>> = Vec::new();
    for (seed, r) in set.records.iter().enumerate() {
        let (energy, _) = final_state(&problem, &ansatz, r)?;
        let miss = sector_miss(&spec, r);
        let residual = e_ref.map(|e| energy - e);
        let mut row = vec![
            "seed".into(),
            int(seed),
            int(r.nfev),
            int(r.n_meas),
            int(r.n_grad_evals),
            float(r.best_cost),
            float(energy),
            opt_float(residual),
            float(r.constraint_residual),
        ];
        row.extend(r.constraint_residuals.iter().map(|&x| float(x)));
        row.extend(mus.iter().map(|&m| float(m)));
        row.push(flag(miss));
        table.push(row);

        let mut values = vec![
            Some(r.nfev as f64),
            Some(r.n_meas as f64),
            Some(r.n_grad_evals as f64),
            Some(r.best_cost),
            Some(energy),
            residual,
            Some(r.constraint_residual),
        ];
        values.extend(r.constraint_residuals.iter().map(|&x| Some(x)));
        values.extend(mus.iter().map(|&m| Some(m)));
        values.push(Some(if miss { 1.0 } else { 0.0 }));
        columns.push(values);
    }
    let n = columns.len() as f64;
    let mut row = vec!["summary".into(), String::new()];
    for j in 0..columns[0].len() {
        let sum: Option<f64> = columns.iter().map(|c| c[j]).sum();
        row.push(opt_float(sum.map(|s| s / n)));
    }
    table.push(row);
    Ok(table)
}

pub fn scan_mu(settings: &Settings) -> Result<Table> {
    let problem = Problem::load(settings, false)?;
    require_constraint(&problem, "scan-mu")?;
    let mu_values = settings
        .mu_values
        .clone()
        .ok_or_else(|| anyhow!("scan-mu needs --mu-values"))
        .config()?;
    check_positive(&mu_values, "--mu-values")?;
    let ansatz = ansatz(settings, problem.qubit_count());
    let e_ref = problem.oracle.as_ref().map(|o| o.target.energy);

    let mut table = Table::new([
        "mu",
        "form",
        "pauli_ops_per_eval",
        "mean_nfev",
        "mean_n_meas",
        "mean_constraint_residual",
        "mean_abs_energy_residual",
        "best_cost",
        "best_abs_energy_residual",
        "best_constraint_residual",
        "sector_miss_fraction",
    ]);
    for &mu in &mu_values {
        for form in [Form::F1, Form::F2] {
            let spec = problem.cost_spec(form, &vec![mu; problem.specs.len()], settings.noise_p)?;
            let set = trials(&spec, &ansatz, settings)?;
            let n = set.records.len() as f64;
            let mut abs_res = Vec::with_capacity(set.records.len());
            for r in &set.records {
                let (energy, _) = final_state(&problem, &ansatz, r)?;
                abs_res.push(e_ref.map(|e| (energy - e).abs()));
            }
            let misses = set.records.iter().filter(|r| sector_miss(&spec, r)).count();
            let best = set.summary.best_trial;
            let mean_abs = abs_res.iter().copied().sum::<Option<f64>>().map(|s| s / n);
            table.push(vec![
                float(mu),
                form.label().into(),
                int(pauli_ops_per_eval(&spec)),
                float(set.summary.mean_nfev),
                float(set.summary.mean_n_meas),
                float(set.summary.mean_residual),
                opt_float(mean_abs),
                float(set.records[best].best_cost),
                opt_float(abs_res[best]),
                float(set.records[best].constraint_residual),
                float(misses as f64 / n),
            ]);
        }
    }
    Ok(table)
}

pub fn envelope(settings: &Settings) -> Result<Table> {
    if settings.constraints.len() != 1 {
        return Err(anyhow!(
            "envelope needs exactly one --constraint for the C axis, got {}",
            settings.constraints.len()
        ))
        .config();
    }
    let problem = Problem::load(settings, true)?;
    let oracle = problem.oracle.as_ref().expect("oracle requested");
    let mus = settings
        .mu_values
        .clone()
        .unwrap_or_else(|| DEFAULT_ENVELOPE_MUS.to_vec());
    check_positive(&mus, "--mu-values")?;
    let level = settings.level.unwrap_or(0);
    let c = problem.specs[0].target;
    let e_target = oracle
        .level_energy(level)
        .ok_or_else(|| anyhow!("sector has {} states, level {level} requested", oracle.levels.len()))
        .precondition()?;

    let points = points_from_spectrum(&oracle.points);
    let hull = lower_hull(&points);
    let class = classify_target(&points, c, e_target, MATCH_TOL).precondition()?;
    let clearance = penaltyvqe::envelope::hull_clearance(&points, c, e_target).precondition()?;

    let mut table = Table::new(["section", "index", "mu", "c", "e", "value", "alpha", "label"]);
    let push = |table: &mut Table,
                section: &str,
                index: Option<usize>,
                mu: Option<f64>,
                p: EnvelopePoint,
                value: Option<f64>,
                alpha: Option<f64>,
                label: &str| {
        table.push(vec![
            section.into(),
            index.map(int).unwrap_or_default(),
            opt_float(mu),
            float(p.c),
            float(p.e),
            opt_float(value),
            opt_float(alpha),
            label.into(),
        ]);
    };
    for (i, &p) in points.iter().enumerate() {
        push(&mut table, "point", Some(i), None, p, None, None, "");
    }
    for (i, &p) in hull.iter().enumerate() {
        push(&mut table, "hull", Some(i), None, p, None, None, "");
    }
    let class_label = match class {
        TargetClass::Boundary => "boundary",
        TargetClass::Interior => "interior",
    };
    let target = EnvelopePoint::new(c, e_target);
    push(
        &mut table,
        "target",
        Some(level),
        None,
        target,
        Some(clearance),
        None,
        class_label,
    );

    let mut sup_f2 = f64::NEG_INFINITY;
    for &mu in &mus {
        let f1 = minimize_f1_relaxation(&points, c, mu).precondition()?;
        push(
            &mut table,
            "fmin",
            None,
            Some(mu),
            EnvelopePoint::new(f1.c_at, f1.e_at),
            Some(f1.f_min),
            None,
            "f1",
        );
        let f2 = minimize_f2_relaxation(&points, c, mu).precondition()?;
        sup_f2 = sup_f2.max(f2.f_min);
        push(
            &mut table,
            "fmin",
            None,
            Some(mu),
            EnvelopePoint::new(f2.c_at, f2.e_at),
            Some(f2.f_min),
            None,
            "f2",
        );
        if let Some(p) = settings.noise_p.filter(|&p| p > 0.0) {
            let t_h = problem.hamiltonian.normalized_trace();
            let t_c = problem.observables[0].operator.normalized_trace();
            let noisy = minimize_noisy_f2_relaxation(&points, c, mu, p, t_h, t_c).precondition()?;
            push(
                &mut table,
                "fmin",
                None,
                Some(mu),
                EnvelopePoint::new(noisy.c_at, noisy.e_at),
                Some(noisy.f_min),
                None,
                "f2-noisy",
            );
        }
        if class == TargetClass::Boundary {
            let t = tangent_closed_form(&points, c, e_target, mu, MATCH_TOL).precondition()?;
            let label = match t.case {
                TangentCase::BoundaryTangent => "boundary-tangent",
                TangentCase::BoundaryVertex => "boundary-vertex",
                TangentCase::Interior => "interior",
            };
            push(
                &mut table,
                "tangent",
                None,
                Some(mu),
                EnvelopePoint::new(t.c_t, t.e_t),
                Some(t.f_min),
                Some(t.alpha),
                label,
            );
        }
    }
    // Largest F² relaxation minimum over the μ grid, against the target energy.
    push(
        &mut table,
        "summary",
        Some(level),
        None,
        target,
        Some(sup_f2),
        None,
        class_label,
    );
    Ok(table)
}

pub fn vqd(settings: &Settings) -> Result<Table> {
    let k = settings.level.unwrap_or(1);
    if k == 0 {
        return Err(anyhow!("vqd needs --level of at least 1")).config();
    }
    let policy = settings.beta.clone().unwrap_or(BetaPolicy::AutoRough);
    if let BetaPolicy::Values(v) = &policy {
        check_positive(v, "--beta")?;
    }
    let problem = Problem::load(settings, matches!(policy, BetaPolicy::AutoCe))?;
    let ansatz = ansatz(settings, problem.qubit_count());

    let mut header: Vec<String> = [
        "level",
        "beta",
        "mean_nfev",
        "mean_n_meas",
        "best_cost",
        "energy",
        "oracle_energy",
        "energy_residual",
        "constraint_residual",
        "max_overlap",
        "sector_miss",
    ]
    .map(String::from)
    .into();
    header.extend(problem.observables.iter().map(|o| format!("mu_{}", o.label)));
    let mut table = Table::new(header);
    let mut found: Vec<StateVector> = Vec::new();
    for level in 0..=k {
        let beta = match level {
            0 => None,
            _ => Some(level_beta(&problem, &policy, level)?),
        };
        let mus = problem.resolve_mus_at(level)?;
        let mut spec = problem.cost_spec(settings.form, &mus, settings.noise_p)?;
        for state in &found {
            spec = spec
                .with_deflation(state.clone(), beta.expect("deflation only above level 0"))
                .precondition()?;
        }
        let set = trials(&spec, &ansatz, settings)?;
        let best = set.best();
        let (energy, state) = final_state(&problem, &ansatz, best)?;
        let oracle_energy = problem.oracle.as_ref().and_then(|o| o.level_energy(level));
        let max_overlap = found
            .iter()
            .map(|s| overlap_sq(s, &state))
            .collect::<std::result::Result<Vec<_>, _>>()
            .precondition()?
            .into_iter()
            .fold(0.0, f64::max);
        let mut row = vec![
            int(level),
            opt_float(beta),
            float(set.summary.mean_nfev),
            float(set.summary.mean_n_meas),
            float(best.best_cost),
            float(energy),
            opt_float(oracle_energy),
            opt_float(oracle_energy.map(|e| energy - e)),
            float(best.constraint_residual),
            float(max_overlap),
            flag(sector_miss(&spec, best)),
        ];
        row.extend(mus.iter().map(|&m| float(m)));
        table.push(row);
        found.push(state);
    }
    Ok(table)
}

/// Deflation weight for `level`. `auto-ce` uses `2(E_level − E_0)` within the
/// target sector and falls back to the rough bound when that gap is zero.
fn level_beta(problem: &Problem, policy: &BetaPolicy, level: usize) -> Result<f64> {
    let rough = 4.0 * problem.hamiltonian.coefficient_norm();
    match policy {
        BetaPolicy::AutoRough => Ok(rough),
        BetaPolicy::Values(v) => Ok(v[(level - 1).min(v.len() - 1)]),
        BetaPolicy::AutoCe => {
            let oracle = problem.oracle.as_ref().expect("oracle requested");
            let e_level = oracle
                .level_energy(level)
                .ok_or_else(|| anyhow!("sector has {} states, level {level} requested", oracle.levels.len()))
                .precondition()?;
            let e0 = oracle.level_energy(0).expect("sector is non-empty");
            let (ce, _) = beta0_estimates(&problem.hamiltonian, e_level, e0).precondition()?;
            Ok(if ce > 0.0 { ce } else { rough })
        }
    }
}

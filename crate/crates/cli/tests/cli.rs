use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

use penaltyvqe::model_io::{build_heisenberg_chain, serialize_pauli_sum};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_penaltyvqe"))
        .args(args)
        .output()
        .unwrap();
    Output {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.code, 0, "{args:?} failed: {}", out.stderr);
    out.stdout
}

type Row = HashMap<String, String>;

fn rows(csv_text: &str) -> Vec<Row> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records()
        .map(|rec| {
            header
                .iter()
                .cloned()
                .zip(rec.unwrap().iter().map(String::from))
                .collect()
        })
        .collect()
}

fn num(row: &Row, key: &str) -> f64 {
    row[key]
        .parse()
        .unwrap_or_else(|_| panic!("column {key} = `{}`", row[key]))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const TOY: &str = "qubits 1\n-1.5 I\n-0.5 Z0\n";

#[test]
fn spectrum_flags_sector_ground() {
    let text = ok(&[
        "spectrum",
        "--hamiltonian",
        "builtin:heisenberg:2",
        "--constraint",
        "sz=1",
    ]);
    assert!(text.starts_with("kind,index,energy,c_sz,in_sector,sector_ground\r\n"));
    let all = rows(&text);
    let points: Vec<_> = all.iter().filter(|r| r["kind"] == "point").collect();
    assert_eq!(points.len(), 4);
    let flagged: Vec<_> = points.iter().filter(|r| r["sector_ground"] == "1").collect();
    assert_eq!(flagged.len(), 1);
    assert_eq!(num(flagged[0], "c_sz"), 1.0);
    assert!((num(flagged[0], "energy") - 0.25).abs() < 1e-12);
    let summary = all.iter().find(|r| r["kind"] == "summary").unwrap();
    assert_eq!(summary["index"], flagged[0]["index"]);
}

#[test]
fn non_commuting_observable_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let x0 = write(dir.path(), "x0.txt", "qubits 2\n1 X0\n");
    let out = run(&[
        "spectrum",
        "--hamiltonian",
        "builtin:heisenberg:2",
        "--constraint",
        &format!("{x0}=1"),
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("do not commute"), "{}", out.stderr);
}

#[test]
fn file_hamiltonian_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let h = serialize_pauli_sum(&build_heisenberg_chain(3, 1.0, false).unwrap());
    let path = write(dir.path(), "h.txt", &h);
    let a = ok(&[
        "spectrum",
        "--hamiltonian",
        "builtin:heisenberg:3",
        "--constraint",
        "sz=0.5",
    ]);
    let b = ok(&["spectrum", "--hamiltonian", &path, "--constraint", "sz=0.5"]);
    assert_eq!(a, b);
}

#[test]
fn config_and_io_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["vqe", "--config", missing.to_str().unwrap()]).code, 1);
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"hamiltonian": "builtin:heisenberg:2", "colour": 1}"#,
    );
    assert_eq!(run(&["vqe", "--config", &bad]).code, 1);
    assert_eq!(run(&["vqe"]).code, 1);
    assert_eq!(
        run(&["vqe", "--hamiltonian", "builtin:heisenberg:2", "--constraint", "sz"]).code,
        1
    );
    assert_eq!(
        run(&["vqe", "--hamiltonian", "builtin:heisenberg:2", "--noise-p", "1.5"]).code,
        1
    );
    let three = write(dir.path(), "z.txt", "qubits 3\n1 Z0\n");
    let out = run(&[
        "vqe",
        "--hamiltonian",
        "builtin:heisenberg:2",
        "--constraint",
        &format!("{three}=1"),
    ]);
    assert_eq!(out.code, 1, "{}", out.stderr);
    assert_eq!(run(&["vqe", "--unknown-flag"]).code, 1);
}

#[test]
fn empty_sector_exits_2() {
    let out = run(&["vqe", "--hamiltonian", "builtin:heisenberg:2", "--constraint", "sz=3"]);
    assert_eq!(out.code, 2, "{}", out.stderr);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("run.csv");
    let config = write(
        dir.path(),
        "exp.json",
        &format!(
            r#"{{"hamiltonian": "builtin:heisenberg:2",
                "constraints": [{{"observable": "sz", "target": 1, "mu": "auto-simple"}}],
                "form": "f2", "depth": 1, "seeds": 7, "master_seed": 3,
                "out": {:?}}}"#,
            out_path.to_str().unwrap()
        ),
    );
    assert_eq!(ok(&["vqe", "--config", &config, "--seeds", "2"]), "");
    let all = rows(&std::fs::read_to_string(&out_path).unwrap());
    assert_eq!(all.len(), 3, "two seeds and a summary");
    // auto-simple with the universal S_z C_min: (0.25 + 0.75) / 0.5² = 4.
    assert!((num(&all[0], "mu_sz") - 4.0).abs() < 1e-12);
}

#[test]
fn vqe_is_deterministic_and_summary_is_the_mean() {
    let args = [
        "vqe",
        "--hamiltonian",
        "builtin:heisenberg:3",
        "--constraint",
        "sz=0.5:mu=2",
        "--depth",
        "1",
        "--seeds",
        "10",
        "--master-seed",
        "11",
    ];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let all = rows(&a);
    let (seeds, summary) = all.split_at(10);
    assert!(seeds.iter().all(|r| r["kind"] == "seed"));
    for key in [
        "nfev",
        "n_meas",
        "best_cost",
        "energy",
        "energy_residual",
        "constraint_residual",
        "residual_sz",
        "sector_miss",
    ] {
        let mean = seeds.iter().map(|r| num(r, key)).sum::<f64>() / 10.0;
        assert!(
            (mean - num(&summary[0], key)).abs() <= 1e-12 * mean.abs().max(1.0),
            "{key}"
        );
    }
}

#[test]
fn vqe_triplet_sector_with_two_constraints() {
    let text = ok(&[
        "vqe",
        "--hamiltonian",
        "builtin:heisenberg:4",
        "--constraint",
        "s2=2",
        "--constraint",
        "sz=-1",
        "--depth",
        "3",
        "--seeds",
        "4",
    ]);
    let all = rows(&text);
    let summary = all.last().unwrap();
    assert_eq!(summary["kind"], "summary");
    assert!(num(summary, "energy_residual").is_finite());
    let best = all[..4]
        .iter()
        .min_by(|a, b| num(a, "best_cost").total_cmp(&num(b, "best_cost")))
        .unwrap();
    assert!(num(best, "energy_residual").abs() < 1e-6, "{best:?}");
    assert!(num(best, "constraint_residual") < 1e-6);
    assert_eq!(best["sector_miss"], "0");
}

#[test]
fn exact_mu_needs_fewer_evaluations_than_rough() {
    let nfev = |policy: &str| {
        let text = ok(&[
            "vqe",
            "--hamiltonian",
            "builtin:heisenberg:4",
            "--constraint",
            &format!("sz=1:mu={policy}"),
            "--depth",
            "3",
            "--seeds",
            "10",
        ]);
        num(rows(&text).last().unwrap(), "nfev")
    };
    let (exact, rough) = (nfev("auto-exact"), nfev("auto-rough"));
    assert!(exact <= rough, "{exact} vs {rough}");
}

#[test]
fn noisy_vqe_runs() {
    let text = ok(&[
        "vqe",
        "--hamiltonian",
        "builtin:heisenberg:2",
        "--constraint",
        "sz=0",
        "--noise-p",
        "0.1",
        "--seeds",
        "2",
    ]);
    assert_eq!(rows(&text).len(), 3);
}

#[test]
fn scan_mu_reproduces_the_envelope_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let toy = write(dir.path(), "toy.txt", TOY);
    let text = ok(&[
        "scan-mu",
        "--hamiltonian",
        &toy,
        "--constraint",
        "number=1",
        "--mu-values",
        "2,10,100",
        "--depth",
        "1",
        "--seeds",
        "4",
    ]);
    let all = rows(&text);
    assert_eq!(all.len(), 6);
    let f1: Vec<_> = all.iter().filter(|r| r["form"] == "f1").collect();
    let f2: Vec<_> = all.iter().filter(|r| r["form"] == "f2").collect();
    // The threshold here is 1, so every coefficient in the sweep exceeds it.
    for r in &f1 {
        assert!(num(r, "best_abs_energy_residual") <= 1e-6, "{r:?}");
    }
    let (x0, y0) = (num(f2[0], "mu").ln(), num(f2[0], "best_abs_energy_residual").ln());
    let (x1, y1) = (num(f2[2], "mu").ln(), num(f2[2], "best_abs_energy_residual").ln());
    let slope = (y1 - y0) / (x1 - x0);
    assert!((slope + 1.0).abs() <= 0.05, "slope {slope}");
}

#[test]
fn scan_mu_f2_uses_fewer_operators_on_s_squared() {
    let text = ok(&[
        "scan-mu",
        "--hamiltonian",
        "builtin:heisenberg:4",
        "--constraint",
        "s2=2",
        "--mu-values",
        "1",
        "--depth",
        "1",
        "--seeds",
        "1",
    ]);
    let all = rows(&text);
    assert!(num(&all[1], "pauli_ops_per_eval") < num(&all[0], "pauli_ops_per_eval"));
}

#[test]
fn scan_mu_needs_values_and_a_constraint() {
    assert_eq!(
        run(&[
            "scan-mu",
            "--hamiltonian",
            "builtin:heisenberg:2",
            "--constraint",
            "sz=0"
        ])
        .code,
        1
    );
    assert_eq!(
        run(&["scan-mu", "--hamiltonian", "builtin:heisenberg:2", "--mu-values", "1"]).code,
        1
    );
    let neg = [
        "scan-mu",
        "--hamiltonian",
        "builtin:heisenberg:2",
        "--constraint",
        "sz=0",
        "--mu-values",
        "1,-2",
    ];
    assert_eq!(run(&neg).code, 1);
}

#[test]
fn envelope_interior_target() {
    let text = ok(&[
        "envelope",
        "--hamiltonian",
        "builtin:heisenberg:4",
        "--constraint",
        "sz=1",
        "--level",
        "1",
    ]);
    let all = rows(&text);
    let target = all.iter().find(|r| r["section"] == "target").unwrap();
    assert_eq!(target["label"], "interior");
    assert!(num(target, "value") > 0.0);
    assert!(!all.iter().any(|r| r["section"] == "tangent"));
    let summary = all.iter().find(|r| r["section"] == "summary").unwrap();
    assert!(num(summary, "value") < num(summary, "e"));
}

#[test]
fn envelope_tangent_rows_match_closed_form() {
    let text = ok(&[
        "envelope",
        "--hamiltonian",
        "builtin:heisenberg:4",
        "--constraint",
        "sz=1",
        "--mu-values",
        "1,10,100",
        "--noise-p",
        "0.05",
    ]);
    let all = rows(&text);
    let target = all.iter().find(|r| r["section"] == "target").unwrap();
    assert_eq!(target["label"], "boundary");
    let (c, e) = (num(target, "c"), num(target, "e"));
    let tangents: Vec<_> = all.iter().filter(|r| r["section"] == "tangent").collect();
    assert_eq!(tangents.len(), 3);
    for t in tangents.iter().filter(|t| t["label"] == "boundary-tangent") {
        let (mu, alpha) = (num(t, "mu"), num(t, "alpha"));
        assert!((num(t, "c") - (c - alpha / (2.0 * mu))).abs() < 1e-12);
        assert!((num(t, "e") - (e - alpha * alpha / (2.0 * mu))).abs() < 1e-12);
        assert!((num(t, "value") - (e - alpha * alpha / (4.0 * mu))).abs() < 1e-12);
        let f2 = all
            .iter()
            .find(|r| r["section"] == "fmin" && r["label"] == "f2" && r["mu"] == t["mu"])
            .unwrap();
        assert!((num(f2, "value") - num(t, "value")).abs() < 1e-12);
    }
    assert_eq!(all.iter().filter(|r| r["label"] == "f2-noisy").count(), 3);
}

#[test]
fn envelope_without_constraint_exits_1() {
    assert_eq!(run(&["envelope", "--hamiltonian", "builtin:heisenberg:2"]).code, 1);
}

#[test]
fn vqd_first_excited_state() {
    let text = ok(&[
        "vqd",
        "--hamiltonian",
        "builtin:heisenberg:2",
        "--level",
        "1",
        "--beta",
        "auto-rough",
    ]);
    let all = rows(&text);
    assert_eq!(all.len(), 2);
    assert!((num(&all[0], "energy") + 0.75).abs() < 1e-6);
    assert!((num(&all[1], "energy") - 0.25).abs() < 1e-6, "{:?}", all[1]);
    assert_eq!(num(&all[1], "beta"), 3.0);
    assert!(num(&all[1], "max_overlap") <= 1e-4);
}

#[test]
fn vqd_ladder_deflates_every_previous_state() {
    let text = ok(&[
        "vqd",
        "--hamiltonian",
        "builtin:heisenberg:3",
        "--constraint",
        "sz=0.5",
        "--level",
        "2",
        "--beta",
        "auto-ce",
        "--depth",
        "2",
        "--seeds",
        "4",
    ]);
    let all = rows(&text);
    assert_eq!(all.len(), 3);
    for r in &all {
        assert!(num(r, "energy_residual").abs() < 1e-6, "{r:?}");
        assert!(num(r, "max_overlap") <= 1e-4, "{r:?}");
        assert_eq!(r["sector_miss"], "0", "{r:?}");
    }
    // The sector ground is degenerate with a state of the other sector, so
    // the automatic coefficient falls back to 1.
    assert_eq!(num(&all[0], "mu_sz"), 1.0);
    assert_eq!(
        run(&["vqd", "--hamiltonian", "builtin:heisenberg:2", "--level", "0"]).code,
        1
    );
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_eigencond"));
    c.env_remove("EIGENCOND_THREADS");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let head = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (head, rows)
}

fn column(head: &[String], name: &str) -> usize {
    head.iter().position(|h| h == name).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn missing_family_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[model]\nV = 8\n");
    let o = run(&["sample"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("family"), "{}", stderr(&o));
}

#[test]
fn unknown_key_is_a_config_error_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[model]\nfamily = \"paramagnet\"\nV = 4\nparams = { h = 1.0 }\n\n[sampler]\nn_lives = 3\n",
    );
    let o = run(&["sample"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("n_lives") && e.contains("line 7"), "{e}");
}

#[test]
fn invalid_model_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[model]\nfamily = \"tfim2d\"\nV = 7\nparams = { h_x = 1.0 }\n");
    let o = run(&["critical"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn paramagnet_sample_reaches_the_condensed_phase() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["sample"], &configs().join("sample-paramagnet.toml"), &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = json(&out.join("summary.json"));
    let eps_c = summary["eps_c_minus"].as_f64().unwrap();
    let (head, rows) = read_csv(&out.join("bins.csv"));
    let eps = column(&head, "eps");
    let below = rows
        .iter()
        .filter(|r| r[eps].parse::<f64>().unwrap() + 0.005 < eps_c)
        .count();
    assert!(below >= 1, "no bin below ε_c = {eps_c}");
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["status"], "complete");
    let files: Vec<&str> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["file"].as_str().unwrap())
        .collect();
    assert!(files.contains(&"records.ndjson") && files.contains(&"bins.csv"));
    let v = bin().arg("verify").arg("--out").arg(&out).output().unwrap();
    assert!(v.status.success(), "{}", stderr(&v));

    let first = std::fs::read_to_string(out.join("records.ndjson")).unwrap();
    let line: serde_json::Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
    for key in ["chain", "tail", "i", "e_star", "log_measure", "p_gs", "p_anti_gs", "accepts", "rejects"] {
        assert!(line.get(key).is_some(), "record lacks {key}");
    }
}

#[test]
fn same_seed_gives_identical_record_streams() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[model]\nfamily = \"tfim1d\"\nV = 5\nparams = { h_x = 1.0 }\n\n[sampler]\nns_moves = 2\npath_length = 4.0\nmax_iterations = 40\nchains = 2\n",
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = run(&["sample", "--seed", "11", "--threads", "2"], &cfg, out);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let ra = std::fs::read(a.join("records.ndjson")).unwrap();
    let rb = std::fs::read(b.join("records.ndjson")).unwrap();
    assert!(!ra.is_empty());
    assert_eq!(ra, rb);
    let c = dir.path().join("c");
    assert!(run(&["sample", "--seed", "12"], &cfg, &c).status.success());
    assert_ne!(ra, std::fs::read(c.join("records.ndjson")).unwrap());
}

#[test]
fn large_chain_dispatches_to_free_fermions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[model]\nfamily = \"tfim1d\"\nV = 40\nparams = { h_x = 5.0 }\n");
    let out = dir.path().join("out");
    let o = run(&["critical"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&out.join("critical-V40.json"));
    assert_eq!(r["method"], "free-fermion");
    assert_eq!(r["V"], 40);
    for key in ["model", "eps_c_minus", "eps_c_plus", "stderr", "m", "solver_tol", "seed"] {
        assert!(r.get(key).is_some(), "report lacks {key}");
    }
}

#[test]
fn forced_stochastic_method_agrees_with_free_fermions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[model]\nfamily = \"tfim1d\"\nV = 8\nparams = { h_x = 5.0 }\n\n[critical]\nprobes = 256\nseed = 4\n",
    );
    let out = dir.path().join("out");
    let o = run(&["critical", "--method", "stochastic-trace"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let (head, rows) = read_csv(&out.join("critical.csv"));
    let r = &rows[0];
    assert_eq!(r[column(&head, "method")], "stochastic-trace");
    assert_eq!(r[column(&head, "reference_method")], "free-fermion");
    let f = |name: &str| r[column(&head, name)].parse::<f64>().unwrap();
    assert!((f("eps_c_minus") - f("reference_eps_c_minus")).abs() <= 3.0 * f("stderr"));
    assert!((f("eps_c_plus") - f("reference_eps_c_plus")).abs() <= 3.0 * f("stderr_plus"));
}

#[test]
fn goe_seeds_produce_a_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let seeds: Vec<String> = (0..200).map(|s| s.to_string()).collect();
    let cfg = write_config(
        dir.path(),
        &format!("[model]\nfamily = \"goe\"\nV = 10\n\n[critical]\nseeds = [{}]\n", seeds.join(", ")),
    );
    let out = dir.path().join("out");
    let o = run(&["critical"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let (head, rows) = read_csv(&out.join("critical-distribution.csv"));
    assert_eq!(rows.len(), 200);
    let ec = column(&head, "eps_c_minus");
    let mean = rows.iter().map(|r| r[ec].parse::<f64>().unwrap()).sum::<f64>() / 200.0;
    assert!((mean - 0.5).abs() < 0.05, "mean ε_c = {mean}");
}

#[test]
fn paramagnetic_sweep_emits_collapse_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["ensemble"], &configs().join("ensemble-collapse.toml"), &out);
    assert!(o.status.success(), "{}", stderr(&o));
    for v in [10, 20, 40, 80] {
        let (head, rows) = read_csv(&out.join(format!("scaling-V{v}.csv")));
        assert_eq!(head, ["eta", "p_rescaled", "f_eta"]);
        assert!(rows.len() > 100);
        let (head, _) = read_csv(&out.join(format!("ensemble-V{v}.csv")));
        assert_eq!(head, ["beta", "Z", "ZE", "E_av", "p_gs"]);
    }
}

#[test]
fn ferromagnetic_chain_emits_doublet_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["ensemble"], &configs().join("ensemble-ferro.toml"), &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let (head, rows) = read_csv(&out.join("near-degeneracy-V11.csv"));
    assert_eq!(head, ["beta", "Z", "E_av", "p_gs", "p_anti_gs", "p_1"]);
    assert_eq!(rows.len(), 2000);
    let summary = json(&out.join("summary.json"));
    let nd = &summary[0]["near_degeneracy"];
    assert!((nd["eps_c1"].as_f64().unwrap() - 0.84).abs() < 0.02);
    assert!((nd["eps_c0"].as_f64().unwrap() - 0.12).abs() < 0.02);
}

#[test]
fn non_monotone_beta_grid_aborts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[model]\nfamily = \"paramagnet\"\nV = 4\nparams = { h = 1.0 }\n\n[ensemble]\nbetas = [0.1, 1.0, 0.5]\n",
    );
    let out = dir.path().join("out");
    let o = run(&["ensemble"], &cfg, &out);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("not increasing"), "{}", stderr(&o));
    assert_eq!(json(&out.join("manifest.json"))["status"], "failed");
}

#[test]
fn catalog_and_selftest() {
    let o = bin().args(["models", "list"]).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["tfim1d", "tfim2d", "mfim1d", "heisenberg1d", "goe", "gue", "paramagnet"] {
        assert!(text.contains(name), "catalog lacks {name}");
    }
    let o = bin().arg("selftest").output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(!String::from_utf8(o.stdout).unwrap().contains("FAIL"));
}

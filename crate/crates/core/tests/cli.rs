use std::path::Path;
use std::process::Command;

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-walls")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn asymptotics_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[profile]\nkind = \"tanh\"\nkappa_inf = 1.0\nn = 2\ndeltas = [2.0]\n");
    let out = dir.path().join("out");
    let o = cli(&["asymptotics", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("asymptotics.json")).unwrap()).unwrap();
    let e = v[0]["eigenvalues"][1].as_f64().unwrap();
    assert!((e - 0.5 / 2f64.cosh().powi(2)).abs() < 1e-10);
    // the effective config is saved next to the results and reloads
    let saved = std::fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(dirac_walls::experiments::ExperimentConfig::from_toml(&saved).is_ok());
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "window = 1.5\n");
    let o = cli(&["spectrum", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = cli(&["spectrum", "--config", "/nonexistent/c.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cli(&["spectrum", "--jobs", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = cli(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // a box that cuts off the bound states
    let cfg = write(
        dir.path(),
        "c.toml",
        "[profile]\nkind = \"mollifier\"\nkappa_inf = 1.0\nn = 2\ndeltas = [3.0]\n[grid]\nspacing = 0.02\nmargin = 2.0\n",
    );
    let o = cli(&["spectrum", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn empty_sweep_and_seeded_energy_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[profile]\nkind = \"mollifier\"\nkappa_inf = 1.0\nn = 2\ndeltas = []\n[energy]\ndelta = 6.0\nwindow = 0.5\ntrials = 5\n",
    );
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = cli(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "18446744073709551615"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
        assert!(csv.starts_with("# dirac-walls sweep v1\n"));
        assert_eq!(csv.lines().count(), 2);
        outputs.push(std::fs::read(out.join("energy.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let v: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(v["seed"].as_u64(), Some(u64::MAX));
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            dirac_walls::experiments::ExperimentConfig::load(&p).unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 3);
}

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn rdae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdae")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.toml");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn hashes(dir: &Path) -> BTreeMap<String, String> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            let bytes = std::fs::read(e.path()).unwrap();
            (e.file_name().into_string().unwrap(), hex::encode(Sha256::digest(bytes)))
        })
        .collect()
}

#[test]
fn generate_is_deterministic_and_records_provenance() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), common::SMALL);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for out in [&a, &b] {
        let o = rdae(&["generate", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "7"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ha = hashes(&a.join("data"));
    // 3 SNR × 2 seeds, each a manifest plus two stacks
    assert_eq!(ha.len(), 18);
    assert_eq!(ha, hashes(&b.join("data")));

    // --seed overrides the master seed, and the hash reflects that
    let mut expected = common::small();
    expected.experiment.master_seed = 7;
    let hash = expected.hash();
    let manifest = ha.keys().find(|k| k.ends_with(".manifest")).unwrap();
    let text = std::fs::read_to_string(a.join("data").join(manifest)).unwrap();
    assert!(text.contains(&format!("config_hash = {hash}")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("seeds = ")), "{text}");

    let c = tmp.path().join("c");
    rdae(&["generate", "--config", &cfg, "--out", c.to_str().unwrap(), "--seed", "8"]);
    assert_ne!(ha, hashes(&c.join("data")));
}

#[test]
fn sweep_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), common::SMALL);
    let out = tmp.path().join("run");
    let o = rdae(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 13);
    let hash = std::fs::read_to_string(out.join("sweep.sha256")).unwrap();
    assert_eq!(hash.trim().len(), 64);

    let o = rdae(&["report", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("DAE") && stdout.contains("SVD"), "{stdout}");
    let summary = std::fs::read_to_string(out.join("report").join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn train_writes_weights_and_traces() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &common::SMALL.replace("seeds = [0, 1]", "seeds = [0]"));
    let out = tmp.path().join("run");
    let o = rdae(&["train", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // only DAE is learned: one model and one trace per SNR point
    assert_eq!(std::fs::read_dir(out.join("models")).unwrap().count(), 3);
    let traces: Vec<_> = std::fs::read_dir(out.join("traces")).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(traces.len(), 3);
    let text = std::fs::read_to_string(&traces[0]).unwrap();
    assert!(text.starts_with("iteration,objective,seconds\n"), "{text}");
}

#[test]
fn config_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");
    let out = out.to_str().unwrap();
    for text in [
        "[dataset]\nsnr = [0.0]\n",
        "[training]\nhidden = 0\n",
        "[experiment]\nsplit = 1.5\n",
        "not toml at all [",
    ] {
        let cfg = write_config(tmp.path(), text);
        let o = rdae(&["generate", "--config", &cfg, "--out", out]);
        assert_eq!(o.status.code(), Some(2), "{text}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let cfg = write_config(tmp.path(), common::SMALL);
    let o = rdae(&["sweep", "--config", &cfg, "--out", out, "--jobs", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_input_is_an_io_error_naming_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.csv");
    let o = rdae(&["report", "--out", tmp.path().to_str().unwrap(), missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.csv"));
    let o = rdae(&["generate", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn acceptance_failures_map_to_exit_3() {
    assert_eq!(rdae_bench::BenchError::Acceptance(1).exit_code(), 3);
    let o = rdae(&["accept", "--only", "8"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS [8]"));
}

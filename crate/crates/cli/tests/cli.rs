//! Binary smoke tests over the bundled sample corpus.

use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stcorpus"))
}

fn fixture_config() -> &'static str {
    concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/fixtures/pipeline.toml"
    )
}

#[test]
fn run_writes_artifacts_and_prints_the_manifest() {
    let out = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["run", "--config", fixture_config(), "--seed", "7"])
        .arg("--out-dir")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );

    // One stdout line per artifact: name, tab, SHA-256 hex digest.
    let stdout = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 7, "{stdout}");
    for line in &lines {
        let (name, digest) = line.split_once('\t').unwrap();
        assert_eq!(digest.len(), 64, "{name}: digest {digest}");
        assert!(digest.bytes().all(|b| b.is_ascii_hexdigit()), "{digest}");
        assert!(out.path().join(name).is_file(), "{name} missing");
    }
    let manifest = fs::read_to_string(out.path().join("manifest.txt")).unwrap();
    assert!(manifest.lines().next().unwrap().ends_with("seed=7"));
}

#[test]
fn synth_writes_the_corpus_and_reports_the_planted_split() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    let codebook = dir.path().join("codebook.tsv");
    let output = bin()
        .args(["synth", "--records", "500", "--seed", "3", "--out"])
        .arg(&corpus)
        .arg("--codebook")
        .arg(&codebook)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert_eq!(fs::read_to_string(&corpus).unwrap().lines().count(), 500);
    assert!(codebook.is_file());
    // 36% of 500 land in the North bucket.
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("North\t180"), "{stdout}");
}

#[test]
fn missing_config_fails_and_names_the_path() {
    let output = bin()
        .args(["run", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("run.toml"), "{stderr}");
}

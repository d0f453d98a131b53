use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use condent::cli::{RunManifest, MANIFEST_FILE, OUTPUT_DIR_ENV};
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_condent"));
    cmd.env_remove(OUTPUT_DIR_ENV);
    cmd
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> PathBuf {
    configs_dir().join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn run_into(cfg: &Path, dir: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("run")
        .arg(cfg)
        .arg("--output-dir")
        .arg(dir)
        .args(extra)
        .output()
        .unwrap()
}

fn manifest(dir: &Path) -> RunManifest {
    toml::from_str(&std::fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap()).unwrap()
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn shipped_configs_validate() {
    let mut count = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|x| x == "toml") {
            let out = bin().arg("validate").arg(&path).output().unwrap();
            assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), stdout(&out));
            assert_eq!(stdout(&out).trim(), "ok");
            count += 1;
        }
    }
    assert!(count >= 8);
}

#[test]
fn every_experiment_is_byte_stable() {
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|x| x != "toml") {
            continue;
        }
        let a = TempDir::new().unwrap();
        let b = TempDir::new().unwrap();
        assert_eq!(run_into(&path, a.path(), &[]).status.code(), Some(0), "{}", path.display());
        assert_eq!(run_into(&path, b.path(), &[]).status.code(), Some(0), "{}", path.display());
        let (fa, fb) = (csv_files(a.path()), csv_files(b.path()));
        assert!(!fa.is_empty());
        assert_eq!(fa, fb, "{}", path.display());
        for bytes in fa.values() {
            let text = std::str::from_utf8(bytes).unwrap();
            assert!(!text.contains('\r'));
            assert!(text.ends_with('\n'));
        }
        let (ma, mb) = (manifest(a.path()), manifest(b.path()));
        assert_eq!(ma.outputs, mb.outputs, "{}", path.display());
        assert_eq!(std::fs::read(a.path().join("summary.txt")).unwrap(), std::fs::read(b.path().join("summary.txt")).unwrap());
    }
}

#[test]
fn manifest_checksums_match_files() {
    let dir = TempDir::new().unwrap();
    assert!(run_into(&config("entropy_table.toml"), dir.path(), &[]).status.success());
    let m = manifest(dir.path());
    assert_eq!(m.experiment, "entropy_table");
    assert!(m.config.contains("entropy_table"));
    for entry in &m.outputs {
        let bytes = std::fs::read(dir.path().join(&entry.file)).unwrap();
        assert_eq!(entry.sha256, condent::cli::output::sha256_hex(&bytes));
    }
    assert!(m.outputs.iter().any(|e| e.file == "summary.txt"));
}

#[test]
fn seed_override_changes_stochastic_output() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let cfg = config("uniform_convergence.toml");
    assert!(run_into(&cfg, a.path(), &[]).status.success());
    assert!(run_into(&cfg, b.path(), &["--seed", "5"]).status.success());
    assert_eq!(manifest(a.path()).seed, 20240601);
    assert_eq!(manifest(b.path()).seed, 5);
    assert_ne!(csv_files(a.path()), csv_files(b.path()));
}

#[test]
fn bits_flag_relabels_entropy() {
    let dir = TempDir::new().unwrap();
    assert!(run_into(&config("limit_geometric.toml"), dir.path(), &["--bits"]).status.success());
    let text = std::fs::read_to_string(dir.path().join("limit_diagnostic.csv")).unwrap();
    assert!(text.starts_with("depth,entropy_bits,increment,verdict\n"), "{text}");
    let last = text.lines().last().unwrap();
    let value: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 2.0).abs() < 1e-9, "{last}");
}

#[test]
fn zero_replicates_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(config("wald_bernoulli.toml"))
        .unwrap()
        .replace("replicates = 100", "replicates = 0");
    let cfg = write(dir.path(), "bad.toml", &text);
    let out = bin().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("replicates ≥ 1"), "{}", stdout(&out));
    let out = run_into(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn missing_space_file_is_named() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "missing.toml",
        "experiment = \"entropy_table\"\n[space]\nfile = \"nowhere.txt\"\n[entropy_table]\nxi = \"points\"\neta = \"trivial\"\n",
    );
    let out = bin().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("nowhere.txt"), "{}", stdout(&out));
}

#[test]
fn malformed_and_absent_configs_exit_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "garbled.toml", "experiment = [\n");
    assert_eq!(bin().arg("validate").arg(&cfg).output().unwrap().status.code(), Some(2));
    let cfg = write(dir.path(), "unknown.toml", "experiment = \"dirac_demo\"\ncolour = 3\n");
    assert_eq!(bin().arg("validate").arg(&cfg).output().unwrap().status.code(), Some(2));
    let out = bin().arg("run").arg(dir.path().join("absent.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(2));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = TempDir::new().unwrap();
    let blocker = write(dir.path(), "file", "not a directory");
    let out = run_into(&config("dirac_demo.toml"), &blocker.join("sub"), &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn relative_paths_resolve_against_the_config() {
    let dir = TempDir::new().unwrap();
    std::fs::create_dir(dir.path().join("data")).unwrap();
    write(&dir.path().join("data"), "space.txt", "# weights\n0.5\n0.25\n0.25\n");
    let cfg = write(
        dir.path(),
        "rel.toml",
        "experiment = \"entropy_table\"\noutput_dir = \"results\"\n[space]\nfile = \"data/space.txt\"\n[entropy_table]\nxi = \"points\"\neta = \"trivial\"\n",
    );
    let elsewhere = TempDir::new().unwrap();
    let out = bin().current_dir(elsewhere.path()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("results/entropy_table.csv")).unwrap();
    assert!(table.contains("1.03972077084"), "{table}");
}

#[test]
fn environment_sets_the_default_output_dir() {
    let out_dir = TempDir::new().unwrap();
    let target = out_dir.path().join("from-env");
    let out = bin()
        .env(OUTPUT_DIR_ENV, &target)
        .arg("run")
        .arg(config("dirac_demo.toml"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(target.join("dirac_table.csv").exists());
    assert!(target.join(MANIFEST_FILE).exists());

    // The flag wins over the environment.
    let flag = out_dir.path().join("from-flag");
    let out = bin()
        .env(OUTPUT_DIR_ENV, out_dir.path().join("ignored"))
        .arg("run")
        .arg(config("dirac_demo.toml"))
        .arg("--output-dir")
        .arg(&flag)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(flag.join("dirac_table.csv").exists());
    assert!(!out_dir.path().join("ignored").exists());
}

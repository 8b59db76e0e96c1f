use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ebicsel::io::write_dataset;
use ebicsel_core::simgen::{design_for, generate_replicate_stream, Setting};

fn ebicsel(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ebicsel"));
    cmd.current_dir(dir)
        .args(args)
        .env_remove("EBICSEL_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn sample_csv(dir: &Path) {
    let design = design_for(Setting::S1, 100, 0.0).unwrap();
    let rep = generate_replicate_stream(&design, 5, 0).unwrap();
    write_dataset(&dir.join("data.csv"), &rep.dataset).unwrap();
}

#[test]
fn bad_response_is_a_data_error_naming_the_row() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.csv"), "y,a,b\n0,1,2\n2,0.5,1\n1,0,0\n").unwrap();
    let o = ebicsel(
        dir.path(),
        &["fit", "--input", "bad.csv", "--features", "1"],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 2"), "{}", stderr(&o));
}

#[test]
fn missing_cell_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("na.csv"), "y,a\n0,1\n1,NA\n").unwrap();
    let o = ebicsel(dir.path(), &["fit", "--input", "na.csv"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 2, column `a`"));
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        ebicsel(dir.path(), &["fit", "--bogus"], &[]).status.code(),
        Some(1)
    );
    sample_csv(dir.path());
    let o = ebicsel(
        dir.path(),
        &["fit", "--input", "data.csv", "--link", "log"],
        &[],
    );
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let o = ebicsel(
        dir.path(),
        &["fit", "--input", "data.csv", "--link", "nolink"],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ebicsel(dir.path(), &["fit", "--input", "absent.csv"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.csv"));
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    sample_csv(dir.path());
    fs::write(
        dir.path().join("c.json"),
        r#"{"features": [10, 20], "link": "probit"}"#,
    )
    .unwrap();
    let o = ebicsel(
        dir.path(),
        &[
            "--config",
            "c.json",
            "-o",
            "out",
            "fit",
            "--input",
            "data.csv",
            "--features",
            "3",
        ],
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let coef = fs::read_to_string(dir.path().join("out/coefficients.tsv")).unwrap();
    assert_eq!(coef.lines().count(), 4, "{coef}");
    let manifest = fs::read_to_string(dir.path().join("out/manifest.json")).unwrap();
    assert!(manifest.contains("probit"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    sample_csv(dir.path());
    fs::write(dir.path().join("c.json"), r#"{"bogusKey": 1}"#).unwrap();
    let o = ebicsel(
        dir.path(),
        &["--config", "c.json", "fit", "--input", "data.csv"],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bogusKey"));
}

#[test]
fn thread_flag_wins_over_environment() {
    let dir = tempfile::tempdir().unwrap();
    sample_csv(dir.path());
    let args = [
        "-o",
        "out",
        "fit",
        "--input",
        "data.csv",
        "--features",
        "10",
    ];
    let o = ebicsel(dir.path(), &args, &[("EBICSEL_THREADS", "lots")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("EBICSEL_THREADS"));
    let mut with_flag = vec!["--threads", "2"];
    with_flag.extend(args);
    let o = ebicsel(dir.path(), &with_flag, &[("EBICSEL_THREADS", "lots")]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = ebicsel(dir.path(), &args, &[("EBICSEL_THREADS", "3")]);
    assert!(o.status.success());
}

#[test]
fn leave_one_out_folds() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("y,a,b\n");
    for i in 0..24 {
        let a = (i as f64 - 11.5) / 6.0;
        let y = u8::from((i * 7) % 24 < 12 + i / 3);
        text.push_str(&format!("{y},{a},{}\n", ((i * 5) % 11) as f64 / 11.0));
    }
    fs::write(dir.path().join("d.csv"), text).unwrap();
    let o = ebicsel(
        dir.path(),
        &[
            "-o",
            "out",
            "cv-links",
            "--input",
            "d.csv",
            "--folds",
            "24",
            "--path-length",
            "1",
            "--links",
            "logit,probit",
        ],
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let folds = fs::read_to_string(dir.path().join("out/folds.tsv")).unwrap();
    let mut ids: Vec<&str> = folds
        .lines()
        .skip(1)
        .map(|l| l.rsplit('\t').next().unwrap())
        .collect();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(ids.len(), 24);
    let o = ebicsel(
        dir.path(),
        &["cv-links", "--input", "d.csv", "--folds", "25"],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
}

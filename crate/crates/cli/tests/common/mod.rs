//! Golden-case loading shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use submeasures_cli::{run, Output};

pub struct Case {
    pub name: String,
    pub code: i32,
    pub args: Vec<String>,
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn inputs_dir() -> PathBuf {
    golden_dir().join("inputs")
}

pub fn input(name: &str) -> String {
    inputs_dir().join(name).to_string_lossy().into_owned()
}

/// Reads `cases.txt`: `name | exit code | arguments`.
pub fn cases() -> Vec<Case> {
    let text = std::fs::read_to_string(golden_dir().join("cases.txt")).unwrap();
    let inputs = inputs_dir().to_string_lossy().into_owned();
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut parts = l.splitn(3, '|').map(str::trim);
            let name = parts.next().unwrap().to_string();
            let code = parts.next().unwrap().parse().unwrap();
            let args = parts.next().unwrap().split_whitespace().map(|a| a.replace("{inputs}", &inputs)).collect();
            Case { name, code, args }
        })
        .collect()
}

/// Runs the CLI in-process with optional extra global flags.
pub fn invoke(args: &[String], extra: &[&str]) -> Output {
    let argv = std::iter::once("submeasures".to_string())
        .chain(extra.iter().map(|s| s.to_string()))
        .chain(args.iter().cloned());
    run(argv)
}

pub fn cli(args: &[&str]) -> Output {
    let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    invoke(&args, &[])
}

pub fn expected_path(case: &Case) -> PathBuf {
    golden_dir().join(format!("{}.json", case.name))
}

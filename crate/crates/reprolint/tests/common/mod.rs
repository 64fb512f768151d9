#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn core_fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

pub fn app_path() -> PathBuf {
    core_fixtures().join("expensedroid.app.json")
}

pub fn report_path(name: &str) -> PathBuf {
    core_fixtures().join("reports").join(format!("{name}.txt"))
}

pub fn report_text(name: &str) -> String {
    std::fs::read_to_string(report_path(name)).unwrap()
}

pub fn golden(name: &str) -> String {
    std::fs::read_to_string(core_fixtures().join("golden").join(format!("{name}.json"))).unwrap()
}

pub fn reprolint<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reprolint"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn files_in(dir: &Path) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    out.sort();
    out
}

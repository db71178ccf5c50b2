#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn lexicon_path() -> PathBuf {
    fixtures().join("lexicon.tsv")
}

/// Runs the `comptext` binary.
pub fn comptext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_comptext"))
        .args(args)
        .env_remove("COMPTEXT_WORKSPACE")
        .output()
        .expect("failed to launch comptext")
}

pub fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            fs::copy(entry.path(), target).unwrap();
        }
    }
}

/// Writes a one-document corpus directory.
pub fn write_corpus(root: &Path, id: &str, order_key: i64, text: &str) {
    let dir = root.join(id);
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("text.txt"), text).unwrap();
    fs::write(
        dir.join("corpus.json"),
        format!(
            r#"{{"id":"{id}","label":"{id}","order_key":{order_key},"documents":[{{"id":"d","file":"text.txt"}}]}}"#
        ),
    )
    .unwrap();
}

use std::fs;
use std::path::Path;

use hypermatch::hypercore::Hypergraph;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::record::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("malformed {}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write(path, &to_json(value))
}

fn is_text(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "txt")
}

/// JSON, or the compact text form for `.txt` paths.
pub fn read_graph(path: &Path) -> Result<Hypergraph, CliError> {
    if is_text(path) {
        Ok(Hypergraph::from_text(&read(path)?)?)
    } else {
        read_json(path)
    }
}

pub fn write_graph(path: &Path, h: &Hypergraph) -> Result<(), CliError> {
    if is_text(path) {
        write(path, &h.to_text())
    } else {
        write_json(path, h)
    }
}

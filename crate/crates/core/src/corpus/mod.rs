//! Graph ingestion, serialization and synthetic corpora.

mod format;
mod generate;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::GraphError;

pub use format::{read_graph, write_graph, GraphDocument, NodeDoc};
pub use generate::{generate, GenKind, GenSpec, MAX_RANDOM_IN_DEGREE};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid generator spec: {0}")]
    Spec(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Reads and validates a graph file.
pub fn read_graph_file(path: &Path) -> Result<crate::graph::DepGraph, CorpusError> {
    let bytes = std::fs::read(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
    read_graph(&bytes)
}

/// `*.json` files directly inside `dir`, sorted by file name.
pub fn list_graph_files(dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let io = |source| CorpusError::Io { path: dir.to_path_buf(), source };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

use std::io;
use std::path::PathBuf;

use rankwalk::communities::CommunityError;
use rankwalk::evaluation::EvalError;
use rankwalk::generate::GenerateError;
use rankwalk::io::FormatError;
use rankwalk::keywords::KeywordError;
use rankwalk::oracle::ConsistencyError;
use rankwalk::pagerank::PageRankError;
use rankwalk::reference::ReferenceError;
use rankwalk::sampler::SamplerError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error("refusing to overwrite input {}", .0.display())]
    OverwritesInput(PathBuf),
    #[error("{}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Consistency(#[from] ConsistencyError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Reference(#[from] ReferenceError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    PageRank(#[from] PageRankError),
    #[error(transparent)]
    Community(#[from] CommunityError),
    #[error(transparent)]
    Keyword(#[from] KeywordError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl CliError {
    pub fn input(path: impl Into<PathBuf>, source: impl std::error::Error + Send + Sync + 'static) -> Self {
        CliError::Input { path: path.into(), source: Box::new(source) }
    }
}

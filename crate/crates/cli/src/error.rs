use std::path::PathBuf;

use nlheat::ErrorClass;
use thiserror::Error;

use crate::config::ConfigIssue;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config:\n{}", format_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("{0}")]
    Usage(String),

    #[error("task {task}: {source}")]
    Task {
        task: &'static str,
        #[source]
        source: nlheat::Error,
    },

    #[error("task {task}: {message}")]
    Numerical { task: &'static str, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CliError {
    /// 0 success, 1 usage or config, 2 regime or precondition, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Task { source, .. } => match source.class() {
                ErrorClass::Usage => 1,
                ErrorClass::Precondition => 2,
                ErrorClass::Numerical => 3,
            },
            CliError::Numerical { .. } => 3,
            CliError::Config(_) | CliError::Usage(_) | CliError::Io { .. } | CliError::Csv { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Csv { path, source }
    }
}

impl From<Vec<ConfigIssue>> for CliError {
    fn from(issues: Vec<ConfigIssue>) -> Self {
        CliError::Config(issues)
    }
}

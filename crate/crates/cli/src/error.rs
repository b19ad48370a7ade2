use std::fmt;

use thiserror::Error;

/// A 1-based position in an input file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl Location {
    /// Line and column of a byte offset into `text`.
    pub fn of_offset(text: &str, offset: usize) -> Location {
        let before = &text[..offset.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        Location { line, column: before[line_start..].chars().count() + 1 }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{location}: parse error: {message}")]
    Parse { path: String, location: Location, message: String },
    #[error("{path}:{location}: invalid input, {invariant}: {message}")]
    Validation { path: String, location: Location, invariant: &'static str, message: String },
    #[error("invalid argument {argument}: {message}")]
    Argument { argument: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("stage {stage} failed: {source}")]
    Pipeline { stage: &'static str, source: lrs_core::Error },
}

impl CliError {
    /// 1 for input problems, 2 for failures inside a pipeline.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Pipeline { .. } => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Tags a core error with the pipeline stage that produced it.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> CliResult<T>;
}

impl<T> StageExt<T> for lrs_core::Result<T> {
    fn stage(self, stage: &'static str) -> CliResult<T> {
        self.map_err(|source| CliError::Pipeline { stage, source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_to_positions() {
        let text = "{\n  \"kind\": 3\n}";
        assert_eq!(Location::of_offset(text, 0), Location { line: 1, column: 1 });
        assert_eq!(Location::of_offset(text, 4), Location { line: 2, column: 3 });
        assert_eq!(Location::of_offset(text, text.len()), Location { line: 3, column: 2 });
    }
}

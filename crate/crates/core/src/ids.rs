//! Identifier newtypes for UMLS concepts and semantic types.

use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

/// Error raised when an identifier does not match its expected pattern.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdError {
    #[error("invalid CUI `{0}`: expected `C` followed by 7 digits")]
    Cui(String),
    #[error("invalid TUI `{0}`: expected `T` followed by 3 digits")]
    Tui(String),
}

/// Concept Unique Identifier, pattern `C\d{7}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cui(String);

impl Cui {
    pub fn new(s: &str) -> Result<Self, IdError> {
        if s.len() == 8
            && s.starts_with('C')
            && s.bytes().skip(1).all(|b| b.is_ascii_digit())
        {
            Ok(Cui(s.to_string()))
        } else {
            Err(IdError::Cui(s.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for Cui {
    type Err = IdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Cui::new(s)
    }
}

impl fmt::Display for Cui {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Semantic-type identifier, pattern `T\d{3}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tui(String);

impl Tui {
    pub fn new(s: &str) -> Result<Self, IdError> {
        if s.len() == 4
            && s.starts_with('T')
            && s.bytes().skip(1).all(|b| b.is_ascii_digit())
        {
            Ok(Tui(s.to_string()))
        } else {
            Err(IdError::Tui(s.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for Tui {
    type Err = IdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tui::new(s)
    }
}

impl fmt::Display for Tui {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

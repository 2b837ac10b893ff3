//! Typed rows produced by the RRF parsers.
//!
//! Parsing itself (file I/O, reject logs) lives in the CLI crate; these types
//! are shared so the graph builder can consume parsed rows directly.

use alloc::string::String;

use crate::ids::{Cui, Tui};

/// One retained MRCONSO row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptRow {
    pub cui: Cui,
    pub language: String,
    pub term_status: String,
    pub is_pref: String,
    pub source_vocab: String,
    pub term_type: String,
    pub surface: String,
    pub suppress: String,
}

/// One (CUI, TUI) semantic-type assignment from MRSTY.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TypeAssignment {
    pub cui: Cui,
    pub tui: Tui,
    pub sty_name: String,
}

/// One retained MRREL row.
///
/// Per the RRF contract, the row asserts the relationship that the *second*
/// concept has to the first: `cui2 rela cui1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRelRow {
    pub cui1: Cui,
    pub rel: String,
    pub rela: Option<String>,
    pub cui2: Cui,
    pub source_vocab: String,
}

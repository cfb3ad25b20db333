//! STL ingestion: binary and ASCII parsing, vertex welding, binary export.
//!
//! Format detection follows the length rule: a file is binary exactly when
//! its length equals `84 + 50·n`, with `n` the little-endian facet count at
//! offset 80. Headers that start with `solid` do not matter; plenty of
//! binary exporters write them.

mod ascii;
mod binary;
mod weld;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::Vec3;
use crate::scalar::Real;

pub use binary::{write_stl, write_stl_with_header, BINARY_HEADER_LEN, FACET_RECORD_LEN};
pub use weld::{weld_vertices, WeldMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SourceFormat {
    Binary,
    Ascii,
}

/// One facet as stored in the file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Facet<T> {
    /// Stored normal; may be the zero vector when the exporter omitted it.
    pub normal: Vec3<T>,
    pub vertices: [Vec3<T>; 3],
}

/// Unwelded facets exactly as read from an STL file.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleSoup<T> {
    pub facets: Vec<Facet<T>>,
    pub name: String,
    pub source_format: SourceFormat,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StlError {
    #[error("binary STL declares {declared} facets but only {available} fit in the file")]
    TruncatedFile { declared: u64, available: u64 },
    #[error("syntax error on line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("non-finite coordinate in facet {facet}")]
    NonFiniteCoordinate { facet: usize },
    #[error("model contains no facets")]
    EmptyModel,
    #[error("{count} facets exceed the 32-bit facet count of binary STL")]
    TooManyFacets { count: usize },
}

/// Parses binary or ASCII STL bytes, detecting the encoding from the file length.
pub fn parse_stl<T: Real>(bytes: &[u8]) -> Result<TriangleSoup<T>, StlError> {
    if bytes.is_empty() {
        return Err(StlError::EmptyModel);
    }
    let declared = binary::declared_count(bytes);
    if let Some(n) = declared {
        if binary::expected_len(n) == bytes.len() as u64 {
            return binary::parse(bytes, n as usize);
        }
    }
    let truncated_binary = declared.filter(|&n| binary::expected_len(n) > bytes.len() as u64);
    if let Some(n) = truncated_binary {
        if !ascii::looks_like_text(bytes) {
            return Err(StlError::TruncatedFile {
                declared: u64::from(n),
                available: (bytes.len() as u64 - BINARY_HEADER_LEN as u64 - 4) / FACET_RECORD_LEN as u64,
            });
        }
    }
    ascii::parse(bytes)
}

fn check_finite<T: Real>(facets: &[Facet<T>]) -> Result<(), StlError> {
    match facets.iter().position(|f| !f.vertices.iter().all(|v| v.is_finite())) {
        Some(facet) => Err(StlError::NonFiniteCoordinate { facet }),
        None => Ok(()),
    }
}

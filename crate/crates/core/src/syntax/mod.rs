//! Solidity front-end: a span-preserving parser for the subset of the
//! language the mutation operators need, including the 0.4.x-era forms
//! (`throw`, `.call.value(x)(...)`, function-named constructors, `var`).
//!
//! Every node carries a byte-accurate [`Span`]; rewriting never goes back to
//! text scanning once a tree exists.

mod lexer;
mod parser;
mod scope;
mod tree;

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

pub use lexer::{tokenize, Token, TokenKind};
pub use scope::{contract_identifiers, referenced_identifiers, scope_identifiers};
pub use tree::{find_nodes, Attrs, Node, NodeId, NodeKind, SyntaxTree};

/// Half-open byte interval `[start, end)` into a source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        debug_assert!(start <= end, "inverted span {start}..{end}");
        Span { start, end }
    }

    /// Zero-width span at `offset`, used for insertions.
    pub fn empty(offset: usize) -> Span {
        Span { start: offset, end: offset }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn contains_offset(&self, offset: usize) -> bool {
        self.start <= offset && offset < self.end
    }

    /// True when the two spans share at least one byte.
    pub fn overlaps(&self, other: Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn to(&self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// A Solidity source file held in memory together with its line index.
#[derive(Clone, Debug)]
pub struct SourceFile {
    path: PathBuf,
    text: String,
    line_starts: Vec<usize>,
}

impl SourceFile {
    pub fn new(path: impl Into<PathBuf>, text: impl Into<String>) -> SourceFile {
        let text = text.into();
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        SourceFile { path: path.into(), text, line_starts }
    }

    pub fn read(path: impl AsRef<Path>) -> std::io::Result<SourceFile> {
        let path = path.as_ref();
        let bytes = std::fs::read(path)?;
        let text = String::from_utf8(bytes).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        Ok(SourceFile::new(path, text))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    /// Byte offsets of every line start; the first entry is always 0.
    pub fn line_index(&self) -> &[usize] {
        &self.line_starts
    }

    pub fn slice(&self, span: Span) -> &str {
        &self.text[span.range()]
    }

    /// 1-based line containing `offset`. Total for `0..=len`.
    pub fn line_of(&self, offset: usize) -> usize {
        assert!(offset <= self.text.len(), "offset {offset} past end of file");
        match self.line_starts.binary_search(&offset) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }

    /// Byte offset where 1-based `line` starts, if the line exists.
    pub fn line_start(&self, line: usize) -> Option<usize> {
        line.checked_sub(1).and_then(|i| self.line_starts.get(i).copied())
    }

    /// Leading whitespace of the line that contains `offset`.
    pub fn indent_at(&self, offset: usize) -> &str {
        line_indent(&self.text, offset)
    }
}

/// Leading whitespace of the line of `text` containing `offset`.
pub fn line_indent(text: &str, offset: usize) -> &str {
    let start = text[..offset].rfind('\n').map_or(0, |i| i + 1);
    let rest = &text[start..];
    let n = rest.len() - rest.trim_start_matches([' ', '\t']).len();
    &rest[..n]
}

/// True when only spaces or tabs precede `offset` on its line.
pub fn starts_line(text: &str, offset: usize) -> bool {
    let start = text[..offset].rfind('\n').map_or(0, |i| i + 1);
    text[start..offset].chars().all(|c| c == ' ' || c == '\t')
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseStatus {
    Parsed,
    Invalid,
}

/// Result of parsing one file. `tree` is present iff the status is `Parsed`;
/// an `Invalid` outcome always carries at least one diagnostic.
#[derive(Clone, Debug)]
pub struct ParseOutcome {
    pub tree: Option<SyntaxTree>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutcome {
    pub fn status(&self) -> ParseStatus {
        if self.tree.is_some() {
            ParseStatus::Parsed
        } else {
            ParseStatus::Invalid
        }
    }

    pub fn is_parsed(&self) -> bool {
        self.tree.is_some()
    }

    pub fn into_tree(self) -> Option<SyntaxTree> {
        self.tree
    }
}

/// Parse a file. Non-Solidity content yields an `Invalid` outcome rather
/// than an error so corpus drivers can skip and count it.
pub fn parse(file: &SourceFile) -> ParseOutcome {
    parse_str(file.text())
}

pub fn parse_str(text: &str) -> ParseOutcome {
    let tokens = match tokenize(text) {
        Ok(tokens) => tokens,
        Err(diag) => return ParseOutcome { tree: None, diagnostics: vec![diag] },
    };
    match parser::Parser::new(text, &tokens).parse_source_unit() {
        Ok(tree) => ParseOutcome { tree: Some(tree), diagnostics: Vec::new() },
        Err(diag) => ParseOutcome { tree: None, diagnostics: vec![diag] },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_index_is_monotone_and_total() {
        let f = SourceFile::new("a.sol", "ab\ncd\n\nx");
        assert_eq!(f.line_index(), &[0, 3, 6, 7]);
        assert_eq!(f.line_of(0), 1);
        assert_eq!(f.line_of(2), 1);
        assert_eq!(f.line_of(3), 2);
        assert_eq!(f.line_of(6), 3);
        assert_eq!(f.line_of(7), 4);
        assert_eq!(f.line_of(8), 4);
        assert_eq!(f.line_start(2), Some(3));
        assert_eq!(f.line_start(9), None);
    }

    #[test]
    fn empty_file_has_one_line() {
        let f = SourceFile::new("e.sol", "");
        assert_eq!(f.line_index(), &[0]);
        assert_eq!(f.line_of(0), 1);
    }

    #[test]
    fn indentation_helpers() {
        let text = "a\n    b = 1;\n\tc";
        assert_eq!(line_indent(text, 6), "    ");
        assert!(starts_line(text, 6));
        assert!(!starts_line(text, 8));
        assert_eq!(line_indent(text, text.len() - 1), "\t");
    }
}

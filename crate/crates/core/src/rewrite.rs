//! Span-based rewriting. Mutations are expressed as sets of non-overlapping
//! span replacements taken from syntax nodes, so the text between and
//! around them is never re-scanned.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edit {
    pub span: Span,
    pub replacement: String,
}

impl Edit {
    pub fn replace(span: Span, replacement: impl Into<String>) -> Edit {
        Edit { span, replacement: replacement.into() }
    }

    /// Zero-width insertion before byte `offset`.
    pub fn insert(offset: usize, text: impl Into<String>) -> Edit {
        Edit { span: Span::empty(offset), replacement: text.into() }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RewriteError {
    #[error("edits {first} and {second} overlap")]
    Overlap { first: Span, second: Span },
    #[error("edit {span} lies outside a {len}-byte file")]
    OutOfBounds { span: Span, len: usize },
    #[error("edit {span} splits a UTF-8 character")]
    NotCharBoundary { span: Span },
}

/// The edits realising one mutation, sorted by start offset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EditSet {
    edits: Vec<Edit>,
    pub site_id: String,
}

impl EditSet {
    /// Sorts `edits` and rejects overlapping pairs. Two insertions at the
    /// same offset keep their given order.
    pub fn new(site_id: impl Into<String>, mut edits: Vec<Edit>) -> Result<EditSet, RewriteError> {
        edits.sort_by_key(|e| (e.span.start, e.span.end));
        for pair in edits.windows(2) {
            let (a, b) = (pair[0].span, pair[1].span);
            if a.end > b.start || (a.start == b.start && !a.is_empty() && !b.is_empty()) {
                return Err(RewriteError::Overlap { first: a, second: b });
            }
        }
        Ok(EditSet { edits, site_id: site_id.into() })
    }

    pub fn edits(&self) -> &[Edit] {
        &self.edits
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    /// Where `offset` in the original text lands after applying the set.
    /// Offsets inside a replaced span map to the start of its replacement;
    /// an insertion at `offset` pushes it right.
    pub fn map_offset(&self, offset: usize) -> usize {
        let mut shift: isize = 0;
        for e in &self.edits {
            if e.span.end <= offset {
                shift += e.replacement.len() as isize - e.span.len() as isize;
            } else if e.span.start < offset {
                return (e.span.start as isize + shift) as usize;
            } else {
                break;
            }
        }
        (offset as isize + shift) as usize
    }
}

/// Apply `set` to `text`. Bytes outside every edit span are copied as-is.
pub fn apply(text: &str, set: &EditSet) -> Result<String, RewriteError> {
    let mut out = String::with_capacity(text.len() + 64);
    let mut cursor = 0;
    for e in set.edits() {
        if e.span.end > text.len() {
            return Err(RewriteError::OutOfBounds { span: e.span, len: text.len() });
        }
        if !text.is_char_boundary(e.span.start) || !text.is_char_boundary(e.span.end) {
            return Err(RewriteError::NotCharBoundary { span: e.span });
        }
        if e.span.start < cursor {
            return Err(RewriteError::Overlap { first: Span::new(cursor, cursor), second: e.span });
        }
        out.push_str(&text[cursor..e.span.start]);
        out.push_str(&e.replacement);
        cursor = e.span.end;
    }
    out.push_str(&text[cursor..]);
    Ok(out)
}

/// `base` if unused, otherwise `base` followed by the smallest positive
/// integer that makes it unused.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    fresh_name_where(base, |candidate| !taken.contains(candidate))
}

/// Like [`fresh_name`] with an arbitrary availability test, for callers
/// that derive several names from one stem.
pub fn fresh_name_where(base: &str, available: impl Fn(&str) -> bool) -> String {
    if available(base) {
        return base.to_string();
    }
    (1u64..).map(|n| format!("{base}{n}")).find(|candidate| available(candidate)).expect("unbounded suffix search")
}

/// Re-indent every line after the first by `extra`.
pub fn indent_continuation(text: &str, extra: &str) -> String {
    let mut lines = text.split('\n');
    let mut out = lines.next().unwrap_or_default().to_string();
    for line in lines {
        out.push('\n');
        if !line.trim().is_empty() {
            out.push_str(extra);
        }
        out.push_str(line);
    }
    out
}

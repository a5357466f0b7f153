//! The six vulnerability-injection operators.
//!
//! Each operator is a shape predicate over syntax nodes plus a transformer
//! that turns one matched node into an [`EditSet`]. Every site yields exactly
//! one first-order mutant.

mod calls_loop;
mod delegatecall;
mod tx_origin;
mod unchecked;
mod unused_return;

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rewrite::{apply, Edit, EditSet, RewriteError};
use crate::syntax::{line_indent, Node, NodeId, NodeKind, SourceFile, Span, SyntaxTree};

pub use calls_loop::loop_variable;
pub use delegatecall::delegate_names;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OperatorId {
    /// Unchecked low-level call return value.
    UC,
    /// Unchecked send.
    US,
    /// Authorization through `tx.origin`.
    TX,
    /// Unused return value.
    UR,
    /// Calls inside a loop.
    CL,
    /// Delegatecall to an untrusted, settable callee.
    DTU,
}

impl OperatorId {
    pub const ALL: [OperatorId; 6] =
        [OperatorId::UC, OperatorId::US, OperatorId::TX, OperatorId::UR, OperatorId::CL, OperatorId::DTU];

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorId::UC => "UC",
            OperatorId::US => "US",
            OperatorId::TX => "TX",
            OperatorId::UR => "UR",
            OperatorId::CL => "CL",
            OperatorId::DTU => "DTU",
        }
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown operator `{0}` (expected one of UC, US, TX, UR, CL, DTU)")]
pub struct UnknownOperator(pub String);

impl FromStr for OperatorId {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OperatorId::ALL
            .into_iter()
            .find(|op| op.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownOperator(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorConfig {
    pub cl_loop_bound: u64,
    pub cl_skip_inside_loop: bool,
    pub enabled: BTreeSet<OperatorId>,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        OperatorConfig {
            cl_loop_bound: 1000,
            cl_skip_inside_loop: false,
            enabled: OperatorId::ALL.into_iter().collect(),
        }
    }
}

impl OperatorConfig {
    pub fn with_loop_bound(mut self, bound: u64) -> Self {
        self.cl_loop_bound = bound;
        self
    }

    pub fn only(mut self, ops: impl IntoIterator<Item = OperatorId>) -> Self {
        self.enabled = ops.into_iter().collect();
        self
    }

    pub fn validate(&self) -> Result<(), OperatorError> {
        if self.cl_loop_bound == 0 {
            return Err(OperatorError::Config("cl_loop_bound must be at least 1".into()));
        }
        if self.enabled.is_empty() {
            return Err(OperatorError::Config("no operator enabled".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("{operator} does not apply to the node at {span}")]
    NotASite { operator: OperatorId, span: Span },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("invalid operator configuration: {0}")]
    Config(String),
}

/// One place where an operator can inject its vulnerability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationSite {
    pub operator: OperatorId,
    pub file: PathBuf,
    pub anchor: NodeId,
    pub anchor_span: Span,
    /// 1-based line of the anchor's first byte in the original file.
    pub line: usize,
    pub original_snippet: String,
    /// Index among this operator's sites in the file, in source order.
    pub ordinal: usize,
}

/// Mutated text for one site, plus where the anchor ended up.
#[derive(Clone, Debug)]
pub struct MutatedSource {
    pub text: String,
    pub edits: EditSet,
    /// The anchor region as it reads in the mutated text.
    pub mutated_snippet: String,
    pub mutated_span: Span,
}

/// Does `node` have the shape `op` mutates?
pub fn is_site(op: OperatorId, node: Node<'_>, cfg: &OperatorConfig) -> bool {
    match op {
        OperatorId::UC => unchecked::checked_call(node, unchecked::Target::LowLevelCall).is_some(),
        OperatorId::US => unchecked::checked_call(node, unchecked::Target::Send).is_some(),
        OperatorId::TX => tx_origin::is_site(node),
        OperatorId::UR => unused_return::is_site(node),
        OperatorId::CL => calls_loop::is_site(node, cfg),
        OperatorId::DTU => delegatecall::is_site(node),
    }
}

/// All sites of `op` in `tree`, in source order.
pub fn match_sites(op: OperatorId, file: &SourceFile, tree: &SyntaxTree, cfg: &OperatorConfig) -> Vec<MutationSite> {
    tree.preorder()
        .into_iter()
        .filter(|n| is_site(op, *n, cfg))
        .enumerate()
        .map(|(ordinal, n)| MutationSite {
            operator: op,
            file: file.path().to_path_buf(),
            anchor: n.id(),
            anchor_span: n.span(),
            line: file.line_of(n.span().start),
            original_snippet: file.slice(n.span()).to_string(),
            ordinal,
        })
        .collect()
}

pub fn match_uc(file: &SourceFile, tree: &SyntaxTree) -> Vec<MutationSite> {
    match_sites(OperatorId::UC, file, tree, &OperatorConfig::default())
}

pub fn match_us(file: &SourceFile, tree: &SyntaxTree) -> Vec<MutationSite> {
    match_sites(OperatorId::US, file, tree, &OperatorConfig::default())
}

pub fn match_tx(file: &SourceFile, tree: &SyntaxTree) -> Vec<MutationSite> {
    match_sites(OperatorId::TX, file, tree, &OperatorConfig::default())
}

pub fn match_ur(file: &SourceFile, tree: &SyntaxTree) -> Vec<MutationSite> {
    match_sites(OperatorId::UR, file, tree, &OperatorConfig::default())
}

pub fn match_cl(file: &SourceFile, tree: &SyntaxTree, cfg: &OperatorConfig) -> Vec<MutationSite> {
    match_sites(OperatorId::CL, file, tree, cfg)
}

pub fn match_dtu(file: &SourceFile, tree: &SyntaxTree) -> Vec<MutationSite> {
    match_sites(OperatorId::DTU, file, tree, &OperatorConfig::default())
}

/// Build the edit set for `site`.
pub fn transform(
    site: &MutationSite,
    file: &SourceFile,
    tree: &SyntaxTree,
    cfg: &OperatorConfig,
) -> Result<EditSet, OperatorError> {
    let node = tree.node(site.anchor);
    if node.span() != site.anchor_span || !is_site(site.operator, node, cfg) {
        return Err(OperatorError::NotASite { operator: site.operator, span: site.anchor_span });
    }
    let src = file.text();
    let edits = match site.operator {
        OperatorId::UC => unchecked::edits(node, src, unchecked::Target::LowLevelCall),
        OperatorId::US => unchecked::edits(node, src, unchecked::Target::Send),
        OperatorId::TX => tx_origin::edits(node),
        OperatorId::UR => unused_return::edits(node, src),
        OperatorId::CL => calls_loop::edits(node, src, cfg),
        OperatorId::DTU => delegatecall::edits(node, src),
    };
    let edits = edits.ok_or(OperatorError::NotASite { operator: site.operator, span: site.anchor_span })?;
    let id = format!("{}#{}", site.operator, site.ordinal);
    Ok(EditSet::new(id, edits)?)
}

/// Transform and apply in one step.
pub fn mutate(
    site: &MutationSite,
    file: &SourceFile,
    tree: &SyntaxTree,
    cfg: &OperatorConfig,
) -> Result<MutatedSource, OperatorError> {
    let edits = transform(site, file, tree, cfg)?;
    let text = apply(file.text(), &edits)?;
    let mutated_span = Span::new(edits.map_offset(site.anchor_span.start), edits.map_offset(site.anchor_span.end));
    let mutated_snippet = text[mutated_span.range()].to_string();
    Ok(MutatedSource { text, edits, mutated_snippet, mutated_span })
}

// ---- helpers shared by several operators --------------------------------

/// The member a call ultimately invokes, looking through call options and
/// the legacy `.value(...)` / `.gas(...)` modifiers:
/// `a.call.gas(g).value(v)(data)` and `a.call{value: v}(data)` both
/// resolve to the `a.call` member access.
pub(crate) fn invoked_member(call: Node<'_>) -> Option<Node<'_>> {
    if call.kind() != NodeKind::FunctionCall {
        return None;
    }
    let mut callee = call.child(0)?;
    loop {
        match callee.kind() {
            NodeKind::CallOptions => callee = callee.child(0)?,
            NodeKind::FunctionCall => {
                let inner = callee.child(0)?;
                if inner.is(NodeKind::MemberAccess) && matches!(inner.name(), Some("value" | "gas")) {
                    callee = inner.child(0)?;
                } else {
                    return None;
                }
            }
            NodeKind::MemberAccess => return Some(callee),
            _ => return None,
        }
    }
}

pub(crate) fn invokes(call: Node<'_>, members: &[&str]) -> bool {
    invoked_member(call).and_then(|m| m.name()).is_some_and(|name| members.contains(&name))
}

/// Indentation step used inside the block that holds `stmt`.
pub(crate) fn indent_unit(stmt: Node<'_>, src: &str) -> String {
    let own = line_indent(src, stmt.span().start);
    let outer = stmt
        .ancestors()
        .find(|a| matches!(a.kind(), NodeKind::Block | NodeKind::ContractDef) || a.kind().is_callable())
        .map(|a| line_indent(src, a.span().start))
        .unwrap_or("");
    match own.strip_prefix(outer) {
        Some(step) if !step.is_empty() => step.to_string(),
        _ if own.contains('\t') => "\t".to_string(),
        _ => "    ".to_string(),
    }
}

pub(crate) fn replace(node: Node<'_>, text: impl Into<String>) -> Edit {
    Edit::replace(node.span(), text)
}

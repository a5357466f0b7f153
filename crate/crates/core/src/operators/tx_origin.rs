//! TX: authorise with `tx.origin` instead of `msg.sender`.

use crate::rewrite::Edit;
use crate::syntax::{Node, NodeKind};

use super::replace;

pub(crate) fn is_msg_sender(node: Node<'_>) -> bool {
    node.is(NodeKind::MemberAccess)
        && node.name() == Some("sender")
        && node.child(0).is_some_and(|obj| obj.is(NodeKind::Identifier) && obj.name() == Some("msg"))
}

/// `msg.sender` used directly (possibly parenthesised) as an operand of
/// `==` or `!=`.
pub(crate) fn is_site(node: Node<'_>) -> bool {
    if !is_msg_sender(node) {
        return false;
    }
    let mut parent = node.parent();
    while let Some(p) = parent.filter(|p| p.is(NodeKind::TupleExpr) && p.operator().is_none()) {
        parent = p.parent();
    }
    parent.is_some_and(|p| p.is(NodeKind::BinaryOp) && matches!(p.operator(), Some("==" | "!=")))
}

pub(crate) fn edits(node: Node<'_>) -> Option<Vec<Edit>> {
    is_site(node).then(|| vec![replace(node, "tx.origin")])
}

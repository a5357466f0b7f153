//! UC and US: strip the check around a low-level `call` or a `send`,
//! leaving the bare call as an expression statement.

use crate::rewrite::Edit;
use crate::syntax::{Node, NodeKind};

use super::{invokes, replace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Target {
    LowLevelCall,
    Send,
}

impl Target {
    fn member(self) -> &'static str {
        match self {
            Target::LowLevelCall => "call",
            Target::Send => "send",
        }
    }

    fn matches(self, expr: Node<'_>) -> bool {
        invokes(expr, &[self.member()])
    }
}

/// For a statement of one of the checked shapes
/// `require(E[, msg]);`, `assert(E);`, `if (E) abort` or `if (!E) abort`,
/// returns the call `E`.
pub(crate) fn checked_call(stmt: Node<'_>, target: Target) -> Option<Node<'_>> {
    match stmt.kind() {
        NodeKind::ExpressionStmt => {
            let check = stmt.child(0)?;
            if !matches!(check.kind(), NodeKind::RequireCall | NodeKind::AssertCall) {
                return None;
            }
            let arity = check.children().len() - 1;
            let allowed = if check.is(NodeKind::RequireCall) { 1..=2 } else { 1..=1 };
            if !allowed.contains(&arity) {
                return None;
            }
            let call = check.child(1)?.strip_parens();
            target.matches(call).then_some(call)
        }
        NodeKind::IfStmt => {
            if stmt.children().len() != 2 {
                return None;
            }
            let mut cond = stmt.child(0)?.strip_parens();
            if cond.is(NodeKind::UnaryOp) && cond.operator() == Some("!") {
                cond = cond.child(0)?.strip_parens();
            }
            (target.matches(cond) && aborts_only(stmt.child(1)?)).then_some(cond)
        }
        _ => None,
    }
}

fn aborts_only(body: Node<'_>) -> bool {
    if body.is(NodeKind::Block) {
        body.children().len() > 0 && body.children().all(is_abort)
    } else {
        is_abort(body)
    }
}

/// `throw;`, `revert(...);`, `revert Err(...);` or `return false;`
fn is_abort(stmt: Node<'_>) -> bool {
    match stmt.kind() {
        NodeKind::ThrowStmt | NodeKind::RevertStmt => true,
        NodeKind::ExpressionStmt => stmt.child(0).is_some_and(|call| {
            call.is(NodeKind::FunctionCall)
                && call.child(0).is_some_and(|c| c.is(NodeKind::Identifier) && c.name() == Some("revert"))
        }),
        NodeKind::ReturnStmt => {
            stmt.children().len() == 1
                && stmt.child(0).is_some_and(|v| {
                    let v = v.strip_parens();
                    v.is(NodeKind::Literal) && v.name() == Some("false")
                })
        }
        _ => false,
    }
}

pub(crate) fn edits(stmt: Node<'_>, src: &str, target: Target) -> Option<Vec<Edit>> {
    let call = checked_call(stmt, target)?;
    Some(vec![replace(stmt, format!("{};", call.text(src)))])
}

//! UR: drop the receiver of a call's return value.
//!
//! `x = f(a);` becomes `f(a);` and `T x = f(a);` is split into `T x;`
//! followed by `f(a);`.

use crate::rewrite::Edit;
use crate::syntax::{line_indent, starts_line, Node, NodeKind};

use super::replace;

/// Is `name` a contract, interface, library, struct or enum declared in the
/// same file? Calling such a name is a conversion or a struct literal.
fn names_declared_type(node: Node<'_>, name: &str) -> bool {
    let root = node.ancestors().last().unwrap_or(node);
    root.descendants().into_iter().any(|n| {
        matches!(n.kind(), NodeKind::ContractDef | NodeKind::StructDef | NodeKind::EnumDef) && n.name() == Some(name)
    })
}

/// A call whose result can be discarded as a statement: not a type
/// conversion (`address(x)`, `IERC20(x)` for a type declared in the file),
/// not a struct literal, not a contract creation, not a builtin check.
fn is_value_call(expr: Node<'_>) -> bool {
    if !expr.is(NodeKind::FunctionCall) {
        return false;
    }
    let Some(callee) = expr.child(0) else { return false };
    match callee.kind() {
        NodeKind::TypeName | NodeKind::NewExpr => false,
        NodeKind::Identifier => match callee.name() {
            Some("revert" | "require" | "assert") | None => false,
            Some(name) => !names_declared_type(callee, name),
        },
        _ => true,
    }
}

fn in_for_header(stmt: Node<'_>) -> bool {
    stmt.parent().is_some_and(|p| p.is(NodeKind::ForStmt) && p.children().last().map(|b| b.id()) != Some(stmt.id()))
}

/// The discarded call for a matching statement.
fn dropped_call(stmt: Node<'_>) -> Option<Node<'_>> {
    if in_for_header(stmt) {
        return None;
    }
    match stmt.kind() {
        NodeKind::ExpressionStmt => {
            let assign = stmt.child(0)?;
            if !assign.is(NodeKind::Assignment) || assign.operator() != Some("=") {
                return None;
            }
            let lhs = assign.child(0)?.strip_parens();
            if lhs.is(NodeKind::TupleExpr) {
                return None;
            }
            let rhs = assign.child(1)?;
            is_value_call(rhs).then_some(rhs)
        }
        NodeKind::VariableDeclarationStmt => {
            let parent_is_block = stmt.parent().is_some_and(|p| p.is(NodeKind::Block));
            let attrs = stmt.attrs();
            let single = stmt.children().len() == 2
                && stmt.child(0).is_some_and(|d| d.is(NodeKind::VariableDecl))
                && attrs.name.is_some();
            let typed = attrs.type_text.as_deref().is_some_and(|t| t != "var");
            let tuple = attrs.decl_span.is_some_and(|s| s.start != stmt.child(0).map_or(s.start, |d| d.span().start));
            if !(parent_is_block && single && typed) || tuple {
                return None;
            }
            let init = stmt.child(1)?;
            is_value_call(init).then_some(init)
        }
        _ => None,
    }
}

pub(crate) fn is_site(stmt: Node<'_>) -> bool {
    dropped_call(stmt).is_some()
}

pub(crate) fn edits(stmt: Node<'_>, src: &str) -> Option<Vec<Edit>> {
    let call = dropped_call(stmt)?;
    let call_text = call.text(src);
    let text = if stmt.is(NodeKind::ExpressionStmt) {
        format!("{call_text};")
    } else {
        let decl = stmt.child(0)?.text(src);
        let start = stmt.span().start;
        let sep = if starts_line(src, start) { format!("\n{}", line_indent(src, start)) } else { " ".to_string() };
        format!("{decl};{sep}{call_text};")
    };
    Some(vec![replace(stmt, text)])
}

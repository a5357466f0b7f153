//! CL: wrap a statement that performs `call`, `send` or `transfer` in a
//! bounded `for` loop whose counter cannot clash with any visible name.

use std::collections::BTreeSet;

use crate::rewrite::{fresh_name, indent_continuation, Edit};
use crate::syntax::{line_indent, referenced_identifiers, scope_identifiers, starts_line, Node, NodeKind};

use super::{indent_unit, invokes, replace, OperatorConfig};

const TARGETS: &[&str] = &["call", "send", "transfer"];

fn is_for_header(stmt: Node<'_>) -> bool {
    stmt.parent().is_some_and(|p| p.is(NodeKind::ForStmt) && p.children().last().map(|b| b.id()) != Some(stmt.id()))
}

/// The statement a call belongs to. A call in a `for` header belongs to the
/// loop statement itself.
fn owning_statement(call: Node<'_>) -> Option<Node<'_>> {
    let stmt = call.enclosing(NodeKind::is_statement)?;
    if is_for_header(stmt) {
        stmt.parent()
    } else {
        Some(stmt)
    }
}

fn inside_loop(stmt: Node<'_>) -> bool {
    stmt.ancestors()
        .take_while(|a| !a.kind().is_callable())
        .any(|a| matches!(a.kind(), NodeKind::ForStmt | NodeKind::WhileStmt | NodeKind::DoWhileStmt))
}

pub(crate) fn is_site(stmt: Node<'_>, cfg: &OperatorConfig) -> bool {
    if !stmt.kind().is_statement()
        || matches!(stmt.kind(), NodeKind::Block | NodeKind::TryStmt | NodeKind::AssemblyBlock)
        || is_for_header(stmt)
        || stmt.enclosing(NodeKind::is_callable).is_none()
    {
        return false;
    }
    if cfg.cl_skip_inside_loop && inside_loop(stmt) {
        return false;
    }
    stmt.descendants()
        .into_iter()
        .filter(|n| n.is(NodeKind::FunctionCall) && invokes(*n, TARGETS))
        .any(|call| owning_statement(call).map(|s| s.id()) == Some(stmt.id()))
}

/// The loop counter name CL would use at `stmt`: `i`, or `i` plus the
/// smallest numeric suffix free in the enclosing function.
pub fn loop_variable(stmt: Node<'_>) -> String {
    let mut taken: BTreeSet<String> = scope_identifiers(stmt);
    let region = stmt.enclosing(NodeKind::is_callable).unwrap_or(stmt);
    taken.extend(referenced_identifiers(region));
    fresh_name("i", &taken)
}

/// `T a = E;` / `(T a, , U b) = E;` split into bare declarations and an
/// assignment, so the declared names stay visible after the loop.
fn split_declaration(stmt: Node<'_>, src: &str) -> Option<(Vec<String>, String)> {
    if !stmt.is(NodeKind::VariableDeclarationStmt) || !stmt.parent().is_some_and(|p| p.is(NodeKind::Block)) {
        return None;
    }
    let decls: Vec<Node<'_>> = stmt.children().filter(|c| c.is(NodeKind::VariableDecl)).collect();
    let init = stmt.children().last().filter(|c| !c.is(NodeKind::VariableDecl))?;
    if decls.iter().any(|d| d.name().is_none() || d.attrs().type_text.as_deref() == Some("var")) {
        return None;
    }
    let decl_span = stmt.attrs().decl_span?;
    let lhs = if decls.len() == 1 && decl_span == decls[0].span() {
        decls[0].name()?.to_string()
    } else {
        let mut lhs = String::new();
        let mut cursor = decl_span.start;
        for d in &decls {
            lhs.push_str(&src[cursor..d.span().start]);
            lhs.push_str(d.name()?);
            cursor = d.span().end;
        }
        lhs.push_str(&src[cursor..decl_span.end]);
        lhs
    };
    let declarations = decls.iter().map(|d| format!("{};", d.text(src))).collect();
    Some((declarations, format!("{lhs} = {};", init.text(src))))
}

pub(crate) fn edits(stmt: Node<'_>, src: &str, cfg: &OperatorConfig) -> Option<Vec<Edit>> {
    if !is_site(stmt, cfg) {
        return None;
    }
    let i = loop_variable(stmt);
    let header = format!("for (uint256 {i} = 1; {i} <= {}; {i}++) {{", cfg.cl_loop_bound);
    let start = stmt.span().start;
    let (declarations, body) = match split_declaration(stmt, src) {
        Some((decls, assign)) => (decls, assign),
        None => (Vec::new(), stmt.text(src).to_string()),
    };

    let text = if starts_line(src, start) {
        let indent = line_indent(src, start);
        let unit = indent_unit(stmt, src);
        let mut out = String::new();
        for d in &declarations {
            out.push_str(d);
            out.push('\n');
            out.push_str(indent);
        }
        out.push_str(&format!("{header}\n{indent}{unit}{}\n{indent}}}", indent_continuation(&body, &unit)));
        out
    } else {
        let mut out = String::new();
        for d in &declarations {
            out.push_str(d);
            out.push(' ');
        }
        out.push_str(&format!("{header} {body} }}"));
        out
    };
    Some(vec![replace(stmt, text)])
}

//! DTU: route a `delegatecall` through a new public address variable that
//! anyone can overwrite via an injected setter.

use std::collections::BTreeSet;

use crate::rewrite::{fresh_name_where, Edit};
use crate::syntax::{
    contract_identifiers, line_indent, referenced_identifiers, starts_line, tokenize, Node, NodeKind, TokenKind,
};

use super::{invoked_member, replace};

fn receiver(call: Node<'_>) -> Option<Node<'_>> {
    let member = invoked_member(call)?;
    (member.name() == Some("delegatecall")).then(|| member.child(0)).flatten()
}

pub(crate) fn is_site(call: Node<'_>) -> bool {
    if receiver(call).is_none() {
        return false;
    }
    let Some(callable) = call.enclosing(NodeKind::is_callable) else { return false };
    if callable.is(NodeKind::ConstructorDef) {
        return false;
    }
    call.enclosing(|k| k == NodeKind::ContractDef)
        .is_some_and(|c| c.attrs().contract_kind.as_deref() == Some("contract"))
}

fn capitalize(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Names of the injected state variable and setter for `contract`:
/// `delegate`/`setDelegate`, or a numbered variant when any of the variable,
/// the setter or its `_`-prefixed parameter is already taken.
pub fn delegate_names(contract: Node<'_>) -> (String, String) {
    let mut taken: BTreeSet<String> = contract_identifiers(contract);
    taken.extend(referenced_identifiers(contract));
    let var = fresh_name_where("delegate", |c| {
        !taken.contains(c) && !taken.contains(&format!("set{}", capitalize(c))) && !taken.contains(&format!("_{c}"))
    });
    let setter = format!("set{}", capitalize(&var));
    (var, setter)
}

/// Byte offset just past the `{` that opens the contract body.
fn body_open(contract: Node<'_>, src: &str) -> Option<usize> {
    let span = contract.span();
    let toks = tokenize(&src[span.range()]).ok()?;
    toks.iter().find(|t| t.kind == TokenKind::Punct && t.text == "{").map(|t| span.start + t.span.end)
}

pub(crate) fn edits(call: Node<'_>, src: &str) -> Option<Vec<Edit>> {
    if !is_site(call) {
        return None;
    }
    let target = receiver(call)?;
    let contract = call.enclosing(|k| k == NodeKind::ContractDef)?;
    let (var, setter) = delegate_names(contract);
    let open = body_open(contract, src)?;

    let outer = line_indent(src, contract.span().start);
    let member_indent = contract
        .children()
        .find(|c| !c.is(NodeKind::InheritanceSpecifier))
        .filter(|m| starts_line(src, m.span().start))
        .map(|m| line_indent(src, m.span().start).to_string())
        .unwrap_or_else(|| format!("{outer}    "));
    let unit = member_indent.strip_prefix(outer).filter(|u| !u.is_empty()).unwrap_or("    ");
    let injected = format!(
        "\n{mi}address public {var};\n{mi}function {setter}(address _{var}) public {{\n{mi}{unit}{var} = _{var};\n{mi}}}",
        mi = member_indent,
    );
    Some(vec![Edit::insert(open, injected), replace(target, var)])
}

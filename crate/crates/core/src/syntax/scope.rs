//! Name-visibility queries used to pick collision-free identifiers.
//!
//! The answers over-approximate Solidity's scoping on purpose: every name
//! declared anywhere in the enclosing callable counts as visible, which
//! covers both the 0.4.x function-wide scoping and the later block scoping.

use std::collections::BTreeSet;

use super::tree::{Node, NodeKind};

/// Names visible at `node`: locals and parameters of the enclosing
/// function or modifier, declarations of the enclosing contract and of its
/// bases defined in the same file, and every top-level definition name.
pub fn scope_identifiers(node: Node<'_>) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    let scope_root = if node.kind().is_callable() { Some(node) } else { node.enclosing(NodeKind::is_callable) };
    if let Some(callable) = scope_root {
        declared_in(callable, &mut names);
    }
    let contract =
        if node.is(NodeKind::ContractDef) { Some(node) } else { node.enclosing(|k| k == NodeKind::ContractDef) };
    if let Some(contract) = contract {
        contract_members(contract, &mut names, &mut Vec::new());
    }
    top_level_names(node, &mut names);
    names
}

/// Every name declared anywhere inside `contract` (members, parameters and
/// locals of all its functions) plus the names reachable through
/// [`scope_identifiers`] at contract level.
pub fn contract_identifiers(contract: Node<'_>) -> BTreeSet<String> {
    let mut names = scope_identifiers(contract);
    declared_in(contract, &mut names);
    names
}

/// Names of all identifiers referenced (not declared) under `node`.
pub fn referenced_identifiers(node: Node<'_>) -> BTreeSet<String> {
    node.descendants()
        .into_iter()
        .filter(|n| n.is(NodeKind::Identifier))
        .filter_map(|n| n.name().map(str::to_string))
        .collect()
}

fn declared_in(root: Node<'_>, names: &mut BTreeSet<String>) {
    for n in root.descendants() {
        if n.is(NodeKind::VariableDecl) || n.is(NodeKind::StateVariableDecl) {
            if let Some(name) = n.name() {
                names.insert(name.to_string());
            }
        }
        if n != root && is_named_definition(n.kind()) {
            if let Some(name) = n.name() {
                names.insert(name.to_string());
            }
        }
    }
}

fn is_named_definition(kind: NodeKind) -> bool {
    use NodeKind::*;
    matches!(kind, FunctionDef | ModifierDef | EventDef | ErrorDef | StructDef | EnumDef | StateVariableDecl)
}

fn contract_members<'t>(contract: Node<'t>, names: &mut BTreeSet<String>, seen: &mut Vec<String>) {
    let Some(cname) = contract.name() else { return };
    if seen.iter().any(|s| s == cname) {
        return;
    }
    seen.push(cname.to_string());
    names.insert(cname.to_string());
    for member in contract.children() {
        if is_named_definition(member.kind()) {
            if let Some(name) = member.name() {
                names.insert(name.to_string());
            }
        }
    }
    let root = contract.ancestors().last().unwrap_or(contract);
    for base in &contract.attrs().bases {
        let base_name = base.rsplit('.').next().unwrap_or(base);
        names.insert(base_name.to_string());
        let found = root.children().find(|c| c.is(NodeKind::ContractDef) && c.name() == Some(base_name));
        if let Some(base_contract) = found {
            contract_members(base_contract, names, seen);
        }
    }
}

fn top_level_names(node: Node<'_>, names: &mut BTreeSet<String>) {
    let root = node.ancestors().last().unwrap_or(node);
    for item in root.children() {
        if item.is(NodeKind::ContractDef) || is_named_definition(item.kind()) {
            if let Some(name) = item.name() {
                names.insert(name.to_string());
            }
        }
    }
}

use std::fmt;

use super::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    SourceUnit,
    ContractDef,
    InheritanceSpecifier,
    FunctionDef,
    ModifierDef,
    /// `constructor(...)` or a legacy function named after its contract.
    ConstructorDef,
    ModifierInvocation,
    ParameterList,
    /// One declared variable: parameter, return value or local.
    VariableDecl,
    StateVariableDecl,
    EventDef,
    ErrorDef,
    StructDef,
    EnumDef,
    TypeName,
    Block,
    VariableDeclarationStmt,
    ExpressionStmt,
    IfStmt,
    ForStmt,
    WhileStmt,
    DoWhileStmt,
    ReturnStmt,
    EmitStmt,
    /// `revert CustomError(...)`; plain `revert(...)` is a call.
    RevertStmt,
    ThrowStmt,
    PlaceholderStmt,
    BreakStmt,
    ContinueStmt,
    TryStmt,
    CatchClause,
    /// Inline assembly; opaque, never has children.
    AssemblyBlock,
    RequireCall,
    AssertCall,
    FunctionCall,
    /// `expr{value: v, gas: g}`
    CallOptions,
    MemberAccess,
    IndexAccess,
    BinaryOp,
    UnaryOp,
    Assignment,
    Conditional,
    Identifier,
    Literal,
    /// Parenthesised expression or tuple.
    TupleExpr,
    NewExpr,
    /// Pragmas, imports, `using ... for`, user-defined value types.
    Other,
}

impl NodeKind {
    pub fn is_statement(self) -> bool {
        use NodeKind::*;
        matches!(
            self,
            Block
                | VariableDeclarationStmt
                | ExpressionStmt
                | IfStmt
                | ForStmt
                | WhileStmt
                | DoWhileStmt
                | ReturnStmt
                | EmitStmt
                | RevertStmt
                | ThrowStmt
                | PlaceholderStmt
                | BreakStmt
                | ContinueStmt
                | TryStmt
                | AssemblyBlock
        )
    }

    pub fn is_callable(self) -> bool {
        matches!(self, NodeKind::FunctionDef | NodeKind::ModifierDef | NodeKind::ConstructorDef)
    }

    /// Calls of any flavour: plain, `require(...)` and `assert(...)`.
    pub fn is_call(self) -> bool {
        matches!(self, NodeKind::FunctionCall | NodeKind::RequireCall | NodeKind::AssertCall)
    }
}

/// Kind-specific payload. Only the fields meaningful for a node's kind are set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Attrs {
    /// Identifier name, member name, declared name, definition name, or
    /// `true`/`false` on boolean literals.
    pub name: Option<String>,
    /// Operator symbol of `BinaryOp`, `UnaryOp` and `Assignment`.
    pub operator: Option<String>,
    /// Declared type as written (`uint256`, `address payable`, `var`).
    pub type_text: Option<String>,
    pub visibility: Option<String>,
    /// Modifier invocations on a function, by name.
    pub modifiers: Vec<String>,
    /// `contract`, `library` or `interface` for a `ContractDef`.
    pub contract_kind: Option<String>,
    /// Base contract names of a `ContractDef`.
    pub bases: Vec<String>,
    /// The declaration part (left of `=`) of a `VariableDeclarationStmt`.
    pub decl_span: Option<Span>,
    /// `UnaryOp` written after its operand (`i++`).
    pub postfix: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub(crate) struct NodeData {
    pub kind: NodeKind,
    pub span: Span,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    pub attrs: Attrs,
}

/// Arena-backed syntax tree. Nodes are addressed by [`NodeId`] and visited
/// through the borrowed [`Node`] handle.
#[derive(Clone, Debug)]
pub struct SyntaxTree {
    nodes: Vec<NodeData>,
    root: NodeId,
}

impl SyntaxTree {
    pub(crate) fn from_parts(nodes: Vec<NodeData>, root: NodeId) -> SyntaxTree {
        SyntaxTree { nodes, root }
    }

    pub fn root(&self) -> Node<'_> {
        self.node(self.root)
    }

    pub fn node(&self, id: NodeId) -> Node<'_> {
        assert!(id.index() < self.nodes.len(), "node id out of range");
        Node { tree: self, id }
    }

    /// All nodes reachable from the root, depth-first in source order.
    pub fn preorder(&self) -> Vec<Node<'_>> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            out.push(self.node(id));
            stack.extend(self.nodes[id.index()].children.iter().rev());
        }
        out
    }

    /// Structural equality ignoring node ids.
    pub fn same_shape(&self, other: &SyntaxTree) -> bool {
        fn eq(a: Node<'_>, b: Node<'_>) -> bool {
            a.kind() == b.kind()
                && a.span() == b.span()
                && a.attrs() == b.attrs()
                && a.children().len() == b.children().len()
                && a.children().zip(b.children()).all(|(x, y)| eq(x, y))
        }
        eq(self.root(), other.root())
    }
}

/// Borrowed view of one node.
#[derive(Clone, Copy)]
pub struct Node<'t> {
    tree: &'t SyntaxTree,
    id: NodeId,
}

impl<'t> Node<'t> {
    fn data(&self) -> &'t NodeData {
        &self.tree.nodes[self.id.index()]
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn tree(&self) -> &'t SyntaxTree {
        self.tree
    }

    pub fn kind(&self) -> NodeKind {
        self.data().kind
    }

    pub fn span(&self) -> Span {
        self.data().span
    }

    pub fn attrs(&self) -> &'t Attrs {
        &self.data().attrs
    }

    pub fn name(&self) -> Option<&'t str> {
        self.data().attrs.name.as_deref()
    }

    pub fn operator(&self) -> Option<&'t str> {
        self.data().attrs.operator.as_deref()
    }

    pub fn is(&self, kind: NodeKind) -> bool {
        self.kind() == kind
    }

    pub fn children(&self) -> impl ExactSizeIterator<Item = Node<'t>> + 't {
        let tree = self.tree;
        self.data().children.iter().map(move |&id| tree.node(id))
    }

    pub fn child(&self, i: usize) -> Option<Node<'t>> {
        self.data().children.get(i).map(|&id| self.tree.node(id))
    }

    pub fn parent(&self) -> Option<Node<'t>> {
        self.data().parent.map(|id| self.tree.node(id))
    }

    pub fn ancestors(&self) -> impl Iterator<Item = Node<'t>> + 't {
        std::iter::successors(self.parent(), |n| n.parent())
    }

    /// Nearest ancestor of the given kind.
    pub fn enclosing(&self, pred: impl Fn(NodeKind) -> bool) -> Option<Node<'t>> {
        self.ancestors().find(|n| pred(n.kind()))
    }

    /// Enclosing `Block`, callable and `ContractDef` ids, innermost first.
    pub fn scope_chain(&self) -> Vec<NodeId> {
        self.ancestors()
            .filter(|n| matches!(n.kind(), NodeKind::Block | NodeKind::ContractDef) || n.kind().is_callable())
            .map(|n| n.id())
            .collect()
    }

    /// This node and its descendants, depth-first in source order.
    pub fn descendants(&self) -> Vec<Node<'t>> {
        let mut out = Vec::new();
        let mut stack = vec![*self];
        while let Some(n) = stack.pop() {
            out.push(n);
            let kids: Vec<_> = n.children().collect();
            stack.extend(kids.into_iter().rev());
        }
        out
    }

    pub fn text<'s>(&self, source: &'s str) -> &'s str {
        &source[self.span().range()]
    }

    /// For `TupleExpr` wrapping a single expression, the wrapped expression
    /// (recursively); otherwise the node itself.
    pub fn strip_parens(self) -> Node<'t> {
        let mut n = self;
        while n.is(NodeKind::TupleExpr) && n.children().len() == 1 && n.operator().is_none() {
            n = n.child(0).expect("one child");
        }
        n
    }
}

impl PartialEq for Node<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.tree, other.tree) && self.id == other.id
    }
}

impl fmt::Debug for Node<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{}", self.kind(), self.span())?;
        if let Some(name) = self.name() {
            write!(f, "({name})")?;
        }
        Ok(())
    }
}

/// Every node under `root` (inclusive) satisfying `pred`, depth-first in
/// source order.
pub fn find_nodes<'t>(root: Node<'t>, pred: impl Fn(&Node<'t>) -> bool) -> Vec<Node<'t>> {
    root.descendants().into_iter().filter(|n| pred(n)).collect()
}

use super::lexer::{Token, TokenKind};
use super::tree::{Attrs, NodeData, NodeId, NodeKind, SyntaxTree};
use super::{Diagnostic, Span};

type PResult<T> = Result<T, Diagnostic>;

const MAX_DEPTH: usize = 400;

const VISIBILITY: &[&str] = &["public", "private", "internal", "external"];
const MUTABILITY: &[&str] = &["pure", "view", "payable", "constant", "nonpayable"];
const LOCATIONS: &[&str] = &["memory", "storage", "calldata"];
const UNITS: &[&str] =
    &["wei", "gwei", "ether", "szabo", "finney", "seconds", "minutes", "hours", "days", "weeks", "years"];
const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>=", ">>>="];

// Words that never start an identifier expression or a type.
const RESERVED: &[&str] = &[
    "if",
    "else",
    "for",
    "while",
    "do",
    "return",
    "returns",
    "emit",
    "throw",
    "break",
    "continue",
    "try",
    "catch",
    "assembly",
    "function",
    "modifier",
    "event",
    "struct",
    "enum",
    "contract",
    "library",
    "interface",
    "constructor",
    "is",
    "pragma",
    "import",
    "using",
    "memory",
    "storage",
    "calldata",
    "public",
    "private",
    "internal",
    "external",
    "indexed",
    "anonymous",
    "delete",
    "new",
    "var",
    "pure",
    "view",
    "constant",
    "immutable",
    "virtual",
    "override",
];

fn binary_precedence(op: &str) -> Option<u8> {
    Some(match op {
        "||" => 1,
        "&&" => 2,
        "==" | "!=" => 3,
        "<" | ">" | "<=" | ">=" => 4,
        "|" => 5,
        "^" => 6,
        "&" => 7,
        "<<" | ">>" | ">>>" => 8,
        "+" | "-" => 9,
        "*" | "/" | "%" => 10,
        "**" => 11,
        _ => return None,
    })
}

fn is_elementary_type(word: &str) -> bool {
    fn sized(word: &str, prefix: &str) -> bool {
        word.strip_prefix(prefix)
            .is_some_and(|rest| rest.is_empty() || rest.bytes().all(|b| b.is_ascii_digit() || b == b'x'))
    }
    matches!(word, "address" | "bool" | "string" | "byte" | "payable")
        || sized(word, "bytes")
        || sized(word, "uint")
        || sized(word, "int")
        || sized(word, "ufixed")
        || sized(word, "fixed")
}

pub(crate) struct Parser<'s> {
    src: &'s str,
    toks: &'s [Token<'s>],
    pos: usize,
    nodes: Vec<NodeData>,
    contract_name: Option<String>,
    depth: usize,
}

impl<'s> Parser<'s> {
    pub(crate) fn new(src: &'s str, toks: &'s [Token<'s>]) -> Parser<'s> {
        Parser { src, toks, pos: 0, nodes: Vec::new(), contract_name: None, depth: 0 }
    }

    // ---- token plumbing -------------------------------------------------

    fn peek_at(&self, n: usize) -> Option<&'s Token<'s>> {
        self.toks.get(self.pos + n)
    }

    fn text_at(&self, n: usize) -> &'s str {
        self.peek_at(n).map_or("", |t| t.text)
    }

    fn at(&self, text: &str) -> bool {
        self.peek_at(0).is_some_and(|t| t.text == text && t.kind != TokenKind::Str)
    }

    fn at_kind(&self, kind: TokenKind) -> bool {
        self.peek_at(0).is_some_and(|t| t.kind == kind)
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn bump(&mut self) -> &'s Token<'s> {
        let t = &self.toks[self.pos];
        self.pos += 1;
        t
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn cur_start(&self) -> usize {
        self.peek_at(0).map_or(self.src.len(), |t| t.span.start)
    }

    fn prev_end(&self) -> usize {
        self.pos.checked_sub(1).map_or(0, |i| self.toks[i].span.end)
    }

    fn error(&self, message: impl Into<String>) -> Diagnostic {
        let span = self.peek_at(0).map_or(Span::empty(self.src.len()), |t| t.span);
        Diagnostic { span, message: message.into() }
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        match self.peek_at(0) {
            Some(t) => self.error(format!("expected {expected}, found `{}`", t.text)),
            None => self.error(format!("expected {expected}, found end of file")),
        }
    }

    fn expect(&mut self, text: &str) -> PResult<Span> {
        if self.at(text) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{text}`")))
        }
    }

    fn is_ident_token(&self, n: usize) -> bool {
        self.peek_at(n).is_some_and(|t| t.kind == TokenKind::Ident && !RESERVED.contains(&t.text))
    }

    fn expect_ident(&mut self) -> PResult<&'s str> {
        if self.is_ident_token(0) {
            Ok(self.bump().text)
        } else {
            Err(self.unexpected("identifier"))
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("nesting too deep"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ---- node construction ----------------------------------------------

    fn span_of(&self, id: NodeId) -> Span {
        self.nodes[id.index()].span
    }

    fn mk(&mut self, kind: NodeKind, span: Span, children: Vec<NodeId>, attrs: Attrs) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        for c in &children {
            self.nodes[c.index()].parent = Some(id);
        }
        self.nodes.push(NodeData { kind, span, children, parent: None, attrs });
        id
    }

    fn leaf(&mut self, kind: NodeKind, span: Span) -> NodeId {
        self.mk(kind, span, Vec::new(), Attrs::default())
    }

    fn named(name: &str) -> Attrs {
        Attrs { name: Some(name.to_string()), ..Attrs::default() }
    }

    /// Skip through the next `;` (inclusive).
    fn skip_past_semicolon(&mut self) -> PResult<()> {
        while !self.at_eof() {
            if self.bump().text == ";" {
                return Ok(());
            }
        }
        Err(self.unexpected("`;`"))
    }

    /// Skip a balanced `open ... close` group starting at the current token.
    fn skip_balanced(&mut self, open: &str, close: &str) -> PResult<()> {
        self.expect(open)?;
        let mut depth = 1;
        while depth > 0 {
            if self.at_eof() {
                return Err(self.unexpected(&format!("`{close}`")));
            }
            let t = self.bump();
            if t.kind == TokenKind::Punct {
                if t.text == open {
                    depth += 1;
                } else if t.text == close {
                    depth -= 1;
                }
            }
        }
        Ok(())
    }

    // ---- source unit ----------------------------------------------------

    pub(crate) fn parse_source_unit(mut self) -> PResult<SyntaxTree> {
        let mut items = Vec::new();
        while !self.at_eof() {
            items.push(self.parse_source_item()?);
        }
        let root = self.mk(NodeKind::SourceUnit, Span::new(0, self.src.len()), items, Attrs::default());
        Ok(SyntaxTree::from_parts(self.nodes, root))
    }

    fn parse_source_item(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        match self.text_at(0) {
            "pragma" | "import" => {
                let word = self.bump().text;
                self.skip_past_semicolon()?;
                Ok(self.mk(NodeKind::Other, Span::new(start, self.prev_end()), vec![], Self::named(word)))
            }
            "abstract" | "contract" | "library" | "interface" => self.parse_contract(),
            "function" => self.parse_function(),
            "struct" => self.parse_struct(),
            "enum" => self.parse_enum(),
            "event" => self.parse_event(),
            "error" if self.is_ident_token(1) && self.text_at(2) == "(" => self.parse_error_def(),
            "using" => self.parse_other_to_semicolon(),
            "type" if self.is_ident_token(1) && self.text_at(2) == "is" => self.parse_other_to_semicolon(),
            _ if self.skip_type(self.pos).is_some() => self.parse_state_variable(),
            _ => Err(self.unexpected("pragma, import, contract or other source-level definition")),
        }
    }

    fn parse_other_to_semicolon(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        let word = self.bump().text;
        self.skip_past_semicolon()?;
        Ok(self.mk(NodeKind::Other, Span::new(start, self.prev_end()), vec![], Self::named(word)))
    }

    fn parse_contract(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        self.eat("abstract");
        let kind = match self.text_at(0) {
            k @ ("contract" | "library" | "interface") => {
                self.bump();
                k
            }
            _ => return Err(self.unexpected("`contract`, `library` or `interface`")),
        };
        let name = self.expect_ident()?;
        let mut children = Vec::new();
        let mut bases = Vec::new();
        if self.eat("is") {
            loop {
                let spec = self.parse_inheritance_specifier()?;
                bases.push(self.nodes[spec.index()].attrs.name.clone().unwrap_or_default());
                children.push(spec);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect("{")?;
        let outer = self.contract_name.replace(name.to_string());
        while !self.at("}") {
            if self.at_eof() {
                return Err(self.unexpected("`}`"));
            }
            children.push(self.parse_contract_member()?);
        }
        self.contract_name = outer;
        self.expect("}")?;
        let attrs =
            Attrs { name: Some(name.to_string()), contract_kind: Some(kind.to_string()), bases, ..Attrs::default() };
        Ok(self.mk(NodeKind::ContractDef, Span::new(start, self.prev_end()), children, attrs))
    }

    fn parse_path(&mut self) -> PResult<String> {
        let mut path = self.expect_ident()?.to_string();
        while self.at(".") && self.is_ident_token(1) {
            self.bump();
            path.push('.');
            path.push_str(self.bump().text);
        }
        Ok(path)
    }

    fn parse_inheritance_specifier(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        let name = self.parse_path()?;
        let args = if self.at("(") { self.parse_call_arguments()? } else { Vec::new() };
        Ok(self.mk(NodeKind::InheritanceSpecifier, Span::new(start, self.prev_end()), args, Self::named(&name)))
    }

    fn parse_contract_member(&mut self) -> PResult<NodeId> {
        match self.text_at(0) {
            "function" => self.parse_function(),
            "constructor" | "fallback" | "receive" if self.text_at(1) == "(" => self.parse_function(),
            "modifier" => self.parse_modifier(),
            "event" => self.parse_event(),
            "error" if self.is_ident_token(1) && self.text_at(2) == "(" => self.parse_error_def(),
            "struct" => self.parse_struct(),
            "enum" => self.parse_enum(),
            "using" => self.parse_other_to_semicolon(),
            "type" if self.is_ident_token(1) && self.text_at(2) == "is" => self.parse_other_to_semicolon(),
            _ => self.parse_state_variable(),
        }
    }

    fn parse_function(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        let mut kind = NodeKind::FunctionDef;
        let name = match self.bump().text {
            "function" => {
                if self.is_ident_token(0) || self.at("fallback") || self.at("receive") {
                    Some(self.bump().text.to_string())
                } else {
                    None
                }
            }
            "constructor" => {
                kind = NodeKind::ConstructorDef;
                Some("constructor".to_string())
            }
            other => Some(other.to_string()),
        };
        if name.is_some() && name == self.contract_name {
            kind = NodeKind::ConstructorDef;
        }
        let mut children = vec![self.parse_parameter_list()?];
        let mut attrs = Attrs { name, ..Attrs::default() };
        loop {
            let word = self.text_at(0);
            if VISIBILITY.contains(&word) {
                attrs.visibility = Some(word.to_string());
                self.bump();
            } else if MUTABILITY.contains(&word) || word == "virtual" {
                self.bump();
            } else if word == "override" {
                self.bump();
                if self.at("(") {
                    self.skip_balanced("(", ")")?;
                }
            } else if word == "returns" {
                self.bump();
                children.push(self.parse_parameter_list()?);
            } else if self.is_ident_token(0) {
                let inv = self.parse_modifier_invocation()?;
                attrs.modifiers.push(self.nodes[inv.index()].attrs.name.clone().unwrap_or_default());
                children.push(inv);
            } else {
                break;
            }
        }
        if !self.eat(";") {
            if !self.at("{") {
                return Err(self.unexpected("function body or `;`"));
            }
            children.push(self.parse_block()?);
        }
        Ok(self.mk(kind, Span::new(start, self.prev_end()), children, attrs))
    }

    fn parse_modifier_invocation(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        let name = self.parse_path()?;
        let args = if self.at("(") { self.parse_call_arguments()? } else { Vec::new() };
        Ok(self.mk(NodeKind::ModifierInvocation, Span::new(start, self.prev_end()), args, Self::named(&name)))
    }

    fn parse_modifier(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        self.expect("modifier")?;
        let name = self.expect_ident()?;
        let mut children = Vec::new();
        if self.at("(") {
            children.push(self.parse_parameter_list()?);
        }
        loop {
            if self.eat("virtual") {
                continue;
            }
            if self.eat("override") {
                if self.at("(") {
                    self.skip_balanced("(", ")")?;
                }
                continue;
            }
            break;
        }
        if !self.eat(";") {
            children.push(self.parse_block()?);
        }
        Ok(self.mk(NodeKind::ModifierDef, Span::new(start, self.prev_end()), children, Self::named(name)))
    }

    fn parse_event(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        self.expect("event")?;
        let name = self.expect_ident()?;
        let params = self.parse_parameter_list()?;
        self.eat("anonymous");
        self.expect(";")?;
        Ok(self.mk(NodeKind::EventDef, Span::new(start, self.prev_end()), vec![params], Self::named(name)))
    }

    fn parse_error_def(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        self.bump();
        let name = self.expect_ident()?;
        let params = self.parse_parameter_list()?;
        self.expect(";")?;
        Ok(self.mk(NodeKind::ErrorDef, Span::new(start, self.prev_end()), vec![params], Self::named(name)))
    }

    fn parse_struct(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        self.expect("struct")?;
        let name = self.expect_ident()?;
        self.expect("{")?;
        let mut fields = Vec::new();
        while !self.eat("}") {
            fields.push(self.parse_variable_decl()?);
            self.expect(";")?;
        }
        Ok(self.mk(NodeKind::StructDef, Span::new(start, self.prev_end()), fields, Self::named(name)))
    }

    fn parse_enum(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        self.expect("enum")?;
        let name = self.expect_ident()?;
        self.expect("{")?;
        while !self.eat("}") {
            self.expect_ident()?;
            if !self.eat(",") {
                self.expect("}")?;
                break;
            }
        }
        Ok(self.mk(NodeKind::EnumDef, Span::new(start, self.prev_end()), vec![], Self::named(name)))
    }

    fn parse_state_variable(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        let ty = self.parse_type_name()?;
        let type_text = self.span_of(ty);
        let mut attrs = Attrs { type_text: Some(self.src[type_text.range()].to_string()), ..Attrs::default() };
        loop {
            let word = self.text_at(0);
            if VISIBILITY.contains(&word) {
                attrs.visibility = Some(word.to_string());
                self.bump();
            } else if matches!(word, "constant" | "immutable" | "transient") {
                self.bump();
            } else if word == "override" {
                self.bump();
                if self.at("(") {
                    self.skip_balanced("(", ")")?;
                }
            } else {
                break;
            }
        }
        attrs.name = Some(self.expect_ident()?.to_string());
        let mut children = vec![ty];
        if self.eat("=") {
            children.push(self.parse_expr()?);
        }
        self.expect(";")?;
        Ok(self.mk(NodeKind::StateVariableDecl, Span::new(start, self.prev_end()), children, attrs))
    }

    fn parse_parameter_list(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.eat(")") {
            loop {
                params.push(self.parse_variable_decl()?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(self.mk(NodeKind::ParameterList, Span::new(start, self.prev_end()), params, Attrs::default()))
    }

    /// `Type [location|indexed] [name]`
    fn parse_variable_decl(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        let ty = self.parse_type_name()?;
        while LOCATIONS.contains(&self.text_at(0)) || self.at("indexed") || self.at("payable") {
            self.bump();
        }
        let name = if self.is_ident_token(0) { Some(self.bump().text.to_string()) } else { None };
        let attrs = Attrs { name, type_text: Some(self.src[self.span_of(ty).range()].to_string()), ..Attrs::default() };
        Ok(self.mk(NodeKind::VariableDecl, Span::new(start, self.prev_end()), vec![ty], attrs))
    }

    // ---- types ----------------------------------------------------------

    /// Pure lookahead: position just past a type name starting at `p`.
    fn skip_type(&self, mut p: usize) -> Option<usize> {
        let tok = |i: usize| self.toks.get(i);
        let text = |i: usize| tok(i).map_or("", |t| t.text);
        let t = tok(p)?;
        if t.kind != TokenKind::Ident {
            return None;
        }
        match t.text {
            "mapping" => {
                if text(p + 1) != "(" {
                    return None;
                }
                p = self.skip_type(p + 2)?;
                if tok(p)?.kind == TokenKind::Ident && text(p) != "=>" {
                    p += 1;
                }
                if text(p) != "=>" {
                    return None;
                }
                p = self.skip_type(p + 1)?;
                if tok(p)?.kind == TokenKind::Ident {
                    p += 1;
                }
                if text(p) != ")" {
                    return None;
                }
                p += 1;
            }
            "function" => {
                if text(p + 1) != "(" {
                    return None;
                }
                p = self.skip_balanced_at(p + 1)?;
                while matches!(text(p), "internal" | "external" | "pure" | "view" | "payable" | "constant") {
                    p += 1;
                }
                if text(p) == "returns" {
                    p = self.skip_balanced_at(p + 1)?;
                }
            }
            "address" => {
                p += 1;
                if text(p) == "payable" {
                    p += 1;
                }
            }
            w if RESERVED.contains(&w) || matches!(w, "true" | "false") => return None,
            _ => {
                p += 1;
                while text(p) == "." && tok(p + 1).is_some_and(|t| t.kind == TokenKind::Ident) {
                    p += 2;
                }
            }
        }
        while text(p) == "[" {
            p = self.skip_bracket_at(p)?;
        }
        Some(p)
    }

    fn skip_balanced_at(&self, p: usize) -> Option<usize> {
        if self.toks.get(p)?.text != "(" {
            return None;
        }
        self.skip_group(p, "(", ")")
    }

    fn skip_bracket_at(&self, p: usize) -> Option<usize> {
        self.skip_group(p, "[", "]")
    }

    fn skip_group(&self, mut p: usize, open: &str, close: &str) -> Option<usize> {
        let mut depth = 0usize;
        loop {
            let t = self.toks.get(p)?;
            if t.kind == TokenKind::Punct {
                if t.text == open {
                    depth += 1;
                } else if t.text == close {
                    depth -= 1;
                    if depth == 0 {
                        return Some(p + 1);
                    }
                }
            }
            p += 1;
        }
    }

    fn parse_type_name(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        let end = self.skip_type(self.pos).ok_or_else(|| self.unexpected("type name"))?;
        self.pos = end;
        let span = Span::new(start, self.prev_end());
        let attrs = Attrs { type_text: Some(self.src[span.range()].to_string()), ..Attrs::default() };
        Ok(self.mk(NodeKind::TypeName, span, vec![], attrs))
    }

    // ---- statements -----------------------------------------------------

    fn parse_block(&mut self) -> PResult<NodeId> {
        self.enter()?;
        let start = self.cur_start();
        let mut attrs = Attrs::default();
        if self.eat("unchecked") {
            attrs.name = Some("unchecked".to_string());
        }
        self.expect("{")?;
        let mut stmts = Vec::new();
        while !self.at("}") {
            if self.at_eof() {
                return Err(self.unexpected("`}`"));
            }
            stmts.push(self.parse_statement()?);
        }
        self.bump();
        self.leave();
        Ok(self.mk(NodeKind::Block, Span::new(start, self.prev_end()), stmts, attrs))
    }

    fn parse_statement(&mut self) -> PResult<NodeId> {
        self.enter()?;
        let start = self.cur_start();
        let id = match self.text_at(0) {
            "{" => self.parse_block()?,
            "unchecked" if self.text_at(1) == "{" => self.parse_block()?,
            "if" => {
                self.bump();
                self.expect("(")?;
                let mut children = vec![self.parse_expr()?];
                self.expect(")")?;
                children.push(self.parse_statement()?);
                if self.eat("else") {
                    children.push(self.parse_statement()?);
                }
                self.mk(NodeKind::IfStmt, Span::new(start, self.prev_end()), children, Attrs::default())
            }
            "for" => {
                self.bump();
                self.expect("(")?;
                let mut children = Vec::new();
                if !self.eat(";") {
                    children.push(self.parse_simple_statement()?);
                }
                if !self.at(";") {
                    children.push(self.parse_expr()?);
                }
                self.expect(";")?;
                if !self.at(")") {
                    children.push(self.parse_expr()?);
                }
                self.expect(")")?;
                children.push(self.parse_statement()?);
                self.mk(NodeKind::ForStmt, Span::new(start, self.prev_end()), children, Attrs::default())
            }
            "while" => {
                self.bump();
                self.expect("(")?;
                let cond = self.parse_expr()?;
                self.expect(")")?;
                let body = self.parse_statement()?;
                self.mk(NodeKind::WhileStmt, Span::new(start, self.prev_end()), vec![cond, body], Attrs::default())
            }
            "do" => {
                self.bump();
                let body = self.parse_statement()?;
                self.expect("while")?;
                self.expect("(")?;
                let cond = self.parse_expr()?;
                self.expect(")")?;
                self.expect(";")?;
                self.mk(NodeKind::DoWhileStmt, Span::new(start, self.prev_end()), vec![body, cond], Attrs::default())
            }
            "return" => {
                self.bump();
                let children = if self.at(";") { vec![] } else { vec![self.parse_expr()?] };
                self.expect(";")?;
                self.mk(NodeKind::ReturnStmt, Span::new(start, self.prev_end()), children, Attrs::default())
            }
            "emit" => {
                self.bump();
                let call = self.parse_expr()?;
                self.expect(";")?;
                self.mk(NodeKind::EmitStmt, Span::new(start, self.prev_end()), vec![call], Attrs::default())
            }
            "throw" => {
                self.bump();
                self.expect(";")?;
                self.leaf(NodeKind::ThrowStmt, Span::new(start, self.prev_end()))
            }
            "break" | "continue" => {
                let kind = if self.bump().text == "break" { NodeKind::BreakStmt } else { NodeKind::ContinueStmt };
                self.expect(";")?;
                self.leaf(kind, Span::new(start, self.prev_end()))
            }
            "revert" if self.is_ident_token(1) => {
                self.bump();
                let call = self.parse_expr()?;
                self.expect(";")?;
                self.mk(NodeKind::RevertStmt, Span::new(start, self.prev_end()), vec![call], Attrs::default())
            }
            "_" if self.text_at(1) == ";" => {
                self.pos += 2;
                self.leaf(NodeKind::PlaceholderStmt, Span::new(start, self.prev_end()))
            }
            "assembly" => {
                self.bump();
                if self.at_kind(TokenKind::Str) {
                    self.bump();
                }
                if self.at("(") {
                    self.skip_balanced("(", ")")?;
                }
                self.skip_balanced("{", "}")?;
                self.leaf(NodeKind::AssemblyBlock, Span::new(start, self.prev_end()))
            }
            "try" => self.parse_try()?,
            _ => self.parse_simple_statement()?,
        };
        self.leave();
        Ok(id)
    }

    fn parse_try(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        self.expect("try")?;
        let mut children = vec![self.parse_expr()?];
        if self.eat("returns") {
            children.push(self.parse_parameter_list()?);
        }
        children.push(self.parse_block()?);
        if !self.at("catch") {
            return Err(self.unexpected("`catch`"));
        }
        while self.at("catch") {
            let cstart = self.cur_start();
            self.bump();
            let mut kids = Vec::new();
            let mut attrs = Attrs::default();
            if self.is_ident_token(0) {
                attrs.name = Some(self.bump().text.to_string());
            }
            if self.at("(") {
                kids.push(self.parse_parameter_list()?);
            }
            kids.push(self.parse_block()?);
            children.push(self.mk(NodeKind::CatchClause, Span::new(cstart, self.prev_end()), kids, attrs));
        }
        Ok(self.mk(NodeKind::TryStmt, Span::new(start, self.prev_end()), children, Attrs::default()))
    }

    /// Variable declaration or expression statement, including the `;`.
    fn parse_simple_statement(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        if self.looks_like_declaration() {
            return self.parse_declaration_statement();
        }
        let expr = self.parse_expr()?;
        self.expect(";")?;
        Ok(self.mk(NodeKind::ExpressionStmt, Span::new(start, self.prev_end()), vec![expr], Attrs::default()))
    }

    fn looks_like_declaration(&self) -> bool {
        let text = |i: usize| self.toks.get(i).map_or("", |t| t.text);
        let is_name =
            |i: usize| self.toks.get(i).is_some_and(|t| t.kind == TokenKind::Ident && !RESERVED.contains(&t.text));
        let p = self.pos;
        if text(p) == "var" {
            return true;
        }
        if text(p) == "(" {
            // `(T a, , T b) = ...`
            let mut q = p + 1;
            let mut typed = false;
            loop {
                match text(q) {
                    "," => q += 1,
                    ")" => return typed && text(q + 1) == "=",
                    _ => {
                        let Some(mut r) = self.skip_type(q) else { return false };
                        while LOCATIONS.contains(&text(r)) {
                            r += 1;
                        }
                        if !is_name(r) {
                            return false;
                        }
                        typed = true;
                        q = r + 1;
                        if text(q) == "," {
                            q += 1;
                        } else if text(q) != ")" {
                            return false;
                        }
                    }
                }
            }
        }
        let Some(mut r) = self.skip_type(p) else { return false };
        while LOCATIONS.contains(&text(r)) {
            r += 1;
        }
        is_name(r) && matches!(text(r + 1), "=" | ";")
    }

    fn parse_declaration_statement(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        let mut decls = Vec::new();
        let mut attrs = Attrs::default();
        if self.eat("var") {
            let mut names = Vec::new();
            if self.eat("(") {
                while !self.eat(")") {
                    if self.eat(",") {
                        continue;
                    }
                    let nstart = self.cur_start();
                    let name = self.expect_ident()?;
                    names.push((name, Span::new(nstart, self.prev_end())));
                }
            } else {
                let nstart = self.cur_start();
                let name = self.expect_ident()?;
                names.push((name, Span::new(nstart, self.prev_end())));
            }
            for (name, span) in names {
                let a = Attrs { name: Some(name.to_string()), type_text: Some("var".into()), ..Attrs::default() };
                decls.push(self.mk(NodeKind::VariableDecl, span, vec![], a));
            }
        } else if self.eat("(") {
            while !self.eat(")") {
                if self.eat(",") {
                    continue;
                }
                decls.push(self.parse_variable_decl()?);
            }
        } else {
            decls.push(self.parse_variable_decl()?);
        }
        attrs.decl_span = Some(Span::new(start, self.prev_end()));
        if let [single] = decls[..] {
            let d = &self.nodes[single.index()].attrs;
            attrs.name = d.name.clone();
            attrs.type_text = d.type_text.clone();
        }
        let mut children = decls;
        if self.eat("=") {
            children.push(self.parse_expr()?);
        }
        self.expect(";")?;
        Ok(self.mk(NodeKind::VariableDeclarationStmt, Span::new(start, self.prev_end()), children, attrs))
    }

    // ---- expressions ----------------------------------------------------

    pub(crate) fn parse_expr(&mut self) -> PResult<NodeId> {
        self.enter()?;
        let lhs = self.parse_conditional()?;
        let out = match self.peek_at(0) {
            Some(t) if t.kind == TokenKind::Punct && ASSIGN_OPS.contains(&t.text) => {
                let op = self.bump().text;
                let rhs = self.parse_expr()?;
                let span = self.span_of(lhs).to(self.span_of(rhs));
                let attrs = Attrs { operator: Some(op.to_string()), ..Attrs::default() };
                self.mk(NodeKind::Assignment, span, vec![lhs, rhs], attrs)
            }
            _ => lhs,
        };
        self.leave();
        Ok(out)
    }

    fn parse_conditional(&mut self) -> PResult<NodeId> {
        let cond = self.parse_binary(1)?;
        if !self.eat("?") {
            return Ok(cond);
        }
        let a = self.parse_expr()?;
        self.expect(":")?;
        let b = self.parse_expr()?;
        let span = self.span_of(cond).to(self.span_of(b));
        Ok(self.mk(NodeKind::Conditional, span, vec![cond, a, b], Attrs::default()))
    }

    fn parse_binary(&mut self, min_prec: u8) -> PResult<NodeId> {
        let mut left = self.parse_unary()?;
        while let Some(prec) =
            self.peek_at(0).filter(|t| t.kind == TokenKind::Punct).and_then(|t| binary_precedence(t.text))
        {
            if prec < min_prec {
                break;
            }
            let op = self.bump().text;
            self.enter()?;
            let right = if op == "**" { self.parse_binary(prec)? } else { self.parse_binary(prec + 1)? };
            self.leave();
            let span = self.span_of(left).to(self.span_of(right));
            let attrs = Attrs { operator: Some(op.to_string()), ..Attrs::default() };
            left = self.mk(NodeKind::BinaryOp, span, vec![left, right], attrs);
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> PResult<NodeId> {
        let start = self.cur_start();
        let op = self.text_at(0);
        let prefix = matches!(op, "!" | "~" | "-" | "+" | "++" | "--") && self.at_kind(TokenKind::Punct)
            || op == "delete" && self.at_kind(TokenKind::Ident);
        if prefix {
            self.bump();
            self.enter()?;
            let operand = self.parse_unary()?;
            self.leave();
            let span = Span::new(start, self.span_of(operand).end);
            let attrs = Attrs { operator: Some(op.to_string()), ..Attrs::default() };
            return Ok(self.mk(NodeKind::UnaryOp, span, vec![operand], attrs));
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> PResult<NodeId> {
        let mut expr = self.parse_primary()?;
        loop {
            let start = self.span_of(expr).start;
            if self.at(".") {
                self.bump();
                let member = match self.peek_at(0) {
                    Some(t) if t.kind == TokenKind::Ident => self.bump().text,
                    _ => return Err(self.unexpected("member name")),
                };
                expr =
                    self.mk(NodeKind::MemberAccess, Span::new(start, self.prev_end()), vec![expr], Self::named(member));
            } else if self.at("[") {
                self.bump();
                let mut children = vec![expr];
                if !self.at("]") && !self.at(":") {
                    children.push(self.parse_expr()?);
                }
                if self.eat(":") && !self.at("]") {
                    children.push(self.parse_expr()?);
                }
                self.expect("]")?;
                expr = self.mk(NodeKind::IndexAccess, Span::new(start, self.prev_end()), children, Attrs::default());
            } else if self.at("(") {
                let mut children = vec![expr];
                children.extend(self.parse_call_arguments()?);
                let kind = match self.nodes[expr.index()].attrs.name.as_deref() {
                    Some("require") if self.nodes[expr.index()].kind == NodeKind::Identifier => NodeKind::RequireCall,
                    Some("assert") if self.nodes[expr.index()].kind == NodeKind::Identifier => NodeKind::AssertCall,
                    _ => NodeKind::FunctionCall,
                };
                expr = self.mk(kind, Span::new(start, self.prev_end()), children, Attrs::default());
            } else if self.at("{") && self.is_ident_token(1) && self.text_at(2) == ":" {
                let mut children = vec![expr];
                children.extend(self.parse_named_arguments()?);
                expr = self.mk(NodeKind::CallOptions, Span::new(start, self.prev_end()), children, Attrs::default());
            } else if (self.at("++") || self.at("--")) && self.at_kind(TokenKind::Punct) {
                let op = self.bump().text;
                let attrs = Attrs { operator: Some(op.to_string()), postfix: true, ..Attrs::default() };
                expr = self.mk(NodeKind::UnaryOp, Span::new(start, self.prev_end()), vec![expr], attrs);
            } else {
                break;
            }
        }
        Ok(expr)
    }

    /// `(a, b)` or `({x: a, y: b})`; returns the argument expressions.
    fn parse_call_arguments(&mut self) -> PResult<Vec<NodeId>> {
        self.expect("(")?;
        if self.at("{") {
            let args = self.parse_named_arguments()?;
            self.expect(")")?;
            return Ok(args);
        }
        let mut args = Vec::new();
        if self.eat(")") {
            return Ok(args);
        }
        loop {
            args.push(self.parse_expr()?);
            if self.eat(")") {
                return Ok(args);
            }
            self.expect(",")?;
        }
    }

    fn parse_named_arguments(&mut self) -> PResult<Vec<NodeId>> {
        self.expect("{")?;
        let mut args = Vec::new();
        while !self.eat("}") {
            self.expect_ident()?;
            self.expect(":")?;
            args.push(self.parse_expr()?);
            if !self.eat(",") {
                self.expect("}")?;
                break;
            }
        }
        Ok(args)
    }

    fn parse_primary(&mut self) -> PResult<NodeId> {
        let Some(tok) = self.peek_at(0) else {
            return Err(self.unexpected("expression"));
        };
        let start = tok.span.start;
        match tok.kind {
            TokenKind::Number => {
                self.bump();
                if UNITS.contains(&self.text_at(0)) && self.at_kind(TokenKind::Ident) {
                    self.bump();
                }
                Ok(self.leaf(NodeKind::Literal, Span::new(start, self.prev_end())))
            }
            TokenKind::Str => {
                while self.at_kind(TokenKind::Str) {
                    self.bump();
                }
                Ok(self.leaf(NodeKind::Literal, Span::new(start, self.prev_end())))
            }
            TokenKind::Punct if tok.text == "(" || tok.text == "[" => {
                let (open, close) = if tok.text == "(" { ("(", ")") } else { ("[", "]") };
                self.bump();
                let mut children = Vec::new();
                let mut commas = false;
                loop {
                    if self.eat(close) {
                        break;
                    }
                    if self.eat(",") {
                        commas = true;
                        continue;
                    }
                    children.push(self.parse_expr()?);
                    if !self.at(close) {
                        self.expect(",")?;
                        commas = true;
                    }
                }
                let attrs =
                    Attrs { operator: (commas || open == "[").then(|| format!("{open}{close}")), ..Attrs::default() };
                Ok(self.mk(NodeKind::TupleExpr, Span::new(start, self.prev_end()), children, attrs))
            }
            TokenKind::Ident => match tok.text {
                "true" | "false" => {
                    self.bump();
                    Ok(self.mk(NodeKind::Literal, tok.span, vec![], Self::named(tok.text)))
                }
                "new" => {
                    self.bump();
                    let ty = self.parse_type_name()?;
                    Ok(self.mk(NodeKind::NewExpr, Span::new(start, self.prev_end()), vec![ty], Attrs::default()))
                }
                w if is_elementary_type(w) || w == "mapping" => self.parse_type_name(),
                w if RESERVED.contains(&w) => Err(self.unexpected("expression")),
                w => {
                    self.bump();
                    Ok(self.mk(NodeKind::Identifier, tok.span, vec![], Self::named(w)))
                }
            },
            _ => Err(self.unexpected("expression")),
        }
    }
}

use super::{Diagnostic, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenKind {
    /// Identifiers and keywords alike; the parser tells them apart.
    Ident,
    Number,
    /// String literal, including `hex"..."` and `unicode"..."` forms.
    Str,
    Punct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    pub span: Span,
}

// Longest first.
const PUNCTS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "**", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=",
    "|=", "&=", "^=", "<<", ">>", "=>", "->", ":=", "(", ")", "{", "}", "[", "]", ";", ",", ".", "?", ":", "=", "+",
    "-", "*", "/", "%", "!", "~", "&", "|", "^", "<", ">", "@",
];

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_' || c == b'$'
}

fn is_ident_continue(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'$'
}

/// Split `text` into tokens, dropping whitespace and comments.
pub fn tokenize(text: &str) -> Result<Vec<Token<'_>>, Diagnostic> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let err = |start: usize, end: usize, message: &str| Diagnostic {
        span: Span::new(start, end),
        message: message.to_string(),
    };

    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            let Some(close) = text[i + 2..].find("*/") else {
                return Err(err(i, bytes.len(), "unterminated block comment"));
            };
            i += 2 + close + 2;
            continue;
        }

        let start = i;
        let kind = if is_ident_start(c) {
            while i < bytes.len() && is_ident_continue(bytes[i]) {
                i += 1;
            }
            let word = &text[start..i];
            if matches!(word, "hex" | "unicode") && matches!(bytes.get(i), Some(b'"' | b'\'')) {
                i = scan_string(bytes, i).ok_or_else(|| err(start, bytes.len(), "unterminated string literal"))?;
                TokenKind::Str
            } else {
                TokenKind::Ident
            }
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            i = scan_number(bytes, i);
            TokenKind::Number
        } else if c == b'"' || c == b'\'' {
            i = scan_string(bytes, i).ok_or_else(|| err(start, bytes.len(), "unterminated string literal"))?;
            TokenKind::Str
        } else if let Some(p) = PUNCTS.iter().find(|p| text[i..].starts_with(**p)) {
            i += p.len();
            TokenKind::Punct
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(err(i, i + ch.len_utf8(), &format!("unexpected character {ch:?}")));
        };
        tokens.push(Token { kind, text: &text[start..i], span: Span::new(start, i) });
    }
    Ok(tokens)
}

fn scan_string(bytes: &[u8], open: usize) -> Option<usize> {
    let quote = bytes[open];
    let mut i = open + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'\n' => return None,
            b if b == quote => return Some(i + 1),
            _ => i += 1,
        }
    }
    None
}

fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    if bytes[i] == b'0' && matches!(bytes.get(i + 1), Some(b'x' | b'X')) {
        i += 2;
        while i < bytes.len() && (bytes[i].is_ascii_hexdigit() || bytes[i] == b'_') {
            i += 1;
        }
        return i;
    }
    let digits = |i: &mut usize| {
        while *i < bytes.len() && (bytes[*i].is_ascii_digit() || bytes[*i] == b'_') {
            *i += 1;
        }
    };
    digits(&mut i);
    if bytes.get(i) == Some(&b'.') && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
        i += 1;
        digits(&mut i);
    }
    if matches!(bytes.get(i), Some(b'e' | b'E')) {
        let mut j = i + 1;
        if matches!(bytes.get(j), Some(b'-' | b'+')) {
            j += 1;
        }
        if bytes.get(j).is_some_and(u8::is_ascii_digit) {
            i = j;
            digits(&mut i);
        }
    }
    i
}

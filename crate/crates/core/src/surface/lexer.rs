use crate::source::{FileId, Location};

use super::SyntaxError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Capitalized name: `Left`, `Right`, or a module prefix.
    Upper(String),
    TyVar(String),
    Int(i64),
    Float(String),
    Str(String),
    Op(String),
    /// `#k/n`: projection of component k out of an n-tuple.
    Proj(u8, u8),
    Let,
    Rec,
    In,
    Fun,
    If,
    Then,
    Else,
    Match,
    With,
    Val,
    True,
    False,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    SemiSemi,
    Bar,
    Arrow,
    Colon,
    Eq,
    Underscore,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Upper(s) | Tok::Op(s) => format!("`{s}`"),
            Tok::TyVar(s) => format!("`'{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Float(s) => format!("`{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Proj(k, n) => format!("`#{k}/{n}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", keyword_text(other)),
        }
    }
}

fn keyword_text(t: &Tok) -> &'static str {
    match t {
        Tok::Let => "let",
        Tok::Rec => "rec",
        Tok::In => "in",
        Tok::Fun => "fun",
        Tok::If => "if",
        Tok::Then => "then",
        Tok::Else => "else",
        Tok::Match => "match",
        Tok::With => "with",
        Tok::Val => "val",
        Tok::True => "true",
        Tok::False => "false",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::Comma => ",",
        Tok::Semi => ";",
        Tok::SemiSemi => ";;",
        Tok::Bar => "|",
        Tok::Arrow => "->",
        Tok::Colon => ":",
        Tok::Eq => "=",
        Tok::Underscore => "_",
        _ => "?",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub loc: Location,
}

const OP_CHARS: &str = "+-*/<>=@^:&|!.~%";

/// Split `src` into tokens. Whitespace and `(* ... *)` comments (nested) are
/// skipped; every token's location spans exactly its lexeme.
pub fn tokenize(src: &str, file: FileId) -> Result<Vec<Token>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let loc = |a: usize, b: usize| Location::new(file, a, b);
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("(*") {
            let start = i;
            let mut depth = 0;
            while i < bytes.len() {
                if src[i..].starts_with("(*") {
                    depth += 1;
                    i += 2;
                } else if src[i..].starts_with("*)") {
                    depth -= 1;
                    i += 2;
                    if depth == 0 {
                        break;
                    }
                } else {
                    i += src[i..].chars().next().map_or(1, char::len_utf8);
                }
            }
            if depth != 0 {
                return Err(SyntaxError::new(loc(start, src.len()), "unterminated comment"));
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < bytes.len() + 1 && i < bytes.len() && bytes[i] == b'.' && !src[i..].starts_with("..") {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                Tok::Float(src[start..i].to_string())
            } else {
                let n = src[start..i]
                    .parse()
                    .map_err(|_| SyntaxError::new(loc(start, i), "integer literal out of range"))?;
                Tok::Int(n)
            }
        } else if c == b'"' {
            i += 1;
            let mut s = String::new();
            loop {
                let Some(ch) = src[i..].chars().next() else {
                    return Err(SyntaxError::new(loc(start, src.len()), "unterminated string literal"));
                };
                i += ch.len_utf8();
                match ch {
                    '"' => break,
                    '\\' => {
                        let Some(e) = src[i..].chars().next() else {
                            return Err(SyntaxError::new(loc(start, src.len()), "unterminated string literal"));
                        };
                        i += e.len_utf8();
                        s.push(match e {
                            'n' => '\n',
                            't' => '\t',
                            other => other,
                        });
                    }
                    other => s.push(other),
                }
            }
            Tok::Str(s)
        } else if c == b'\'' {
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            if i == start + 1 {
                return Err(SyntaxError::new(loc(start, i), "illegal character `'`"));
            }
            Tok::TyVar(src[start + 1..i].to_string())
        } else if c == b'#' {
            i += 1;
            if src[i..].starts_with('+') {
                i += 1;
                Tok::Op("#+".into())
            } else {
                let num = |i: &mut usize| {
                    let s = *i;
                    while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                        *i += 1;
                    }
                    src[s..*i].parse::<u8>().ok()
                };
                let k = num(&mut i);
                let slash = i < bytes.len() && bytes[i] == b'/';
                if slash {
                    i += 1;
                }
                match (k, slash, num(&mut i)) {
                    (Some(k), true, Some(n)) if k >= 1 && k <= n && n >= 2 => Tok::Proj(k, n),
                    _ => return Err(SyntaxError::new(loc(start, i), "malformed projection")),
                }
            }
        } else if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            let word = &src[start..i];
            if c.is_ascii_uppercase() {
                // `List.map` is a single qualified identifier.
                if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_lowercase() {
                    i += 1;
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                        i += 1;
                    }
                    Tok::Ident(src[start..i].to_string())
                } else {
                    Tok::Upper(word.to_string())
                }
            } else {
                match word {
                    "let" => Tok::Let,
                    "rec" => Tok::Rec,
                    "in" => Tok::In,
                    "fun" => Tok::Fun,
                    "if" => Tok::If,
                    "then" => Tok::Then,
                    "else" => Tok::Else,
                    "match" => Tok::Match,
                    "with" => Tok::With,
                    "val" => Tok::Val,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "mod" => Tok::Op("mod".into()),
                    "_" => Tok::Underscore,
                    w => Tok::Ident(w.to_string()),
                }
            }
        } else {
            match c {
                b'(' => {
                    i += 1;
                    Tok::LParen
                }
                b')' => {
                    i += 1;
                    Tok::RParen
                }
                b'[' => {
                    i += 1;
                    Tok::LBracket
                }
                b']' => {
                    i += 1;
                    Tok::RBracket
                }
                b',' => {
                    i += 1;
                    Tok::Comma
                }
                b';' => {
                    if src[i..].starts_with(";;") {
                        i += 2;
                        Tok::SemiSemi
                    } else {
                        i += 1;
                        Tok::Semi
                    }
                }
                _ if OP_CHARS.as_bytes().contains(&c) => {
                    while i < bytes.len() && OP_CHARS.as_bytes().contains(&bytes[i]) {
                        i += 1;
                    }
                    match &src[start..i] {
                        "->" => Tok::Arrow,
                        ":" => Tok::Colon,
                        "=" => Tok::Eq,
                        "|" => Tok::Bar,
                        op => Tok::Op(op.to_string()),
                    }
                }
                _ => {
                    let ch = src[i..].chars().next().unwrap();
                    return Err(SyntaxError::new(loc(i, i + ch.len_utf8()), format!("illegal character `{ch}`")));
                }
            }
        };
        out.push(Token { tok, loc: loc(start, i) });
    }
    Ok(out)
}

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ast::Pos;
use super::{ErrorKind, FrontendError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Kw(Kw),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Typedef,
    Struct,
    Union,
    If,
    Else,
    While,
    Return,
    Use,
    Other,
    Sizeof,
    Null,
    Int,
    Char,
    Void,
    Long,
    Short,
    Unsigned,
    Signed,
    Float,
    Double,
}

const KEYWORDS: &[(&str, Kw)] = &[
    ("typedef", Kw::Typedef),
    ("struct", Kw::Struct),
    ("union", Kw::Union),
    ("if", Kw::If),
    ("else", Kw::Else),
    ("while", Kw::While),
    ("return", Kw::Return),
    ("use", Kw::Use),
    ("other", Kw::Other),
    ("sizeof", Kw::Sizeof),
    ("NULL", Kw::Null),
    ("int", Kw::Int),
    ("char", Kw::Char),
    ("void", Kw::Void),
    ("long", Kw::Long),
    ("short", Kw::Short),
    ("unsigned", Kw::Unsigned),
    ("signed", Kw::Signed),
    ("float", Kw::Float),
    ("double", Kw::Double),
];

impl Kw {
    pub fn as_str(self) -> &'static str {
        KEYWORDS.iter().find(|(_, k)| *k == self).map(|(s, _)| *s).unwrap_or("?")
    }

    pub fn is_scalar_type(self) -> bool {
        matches!(
            self,
            Kw::Int
                | Kw::Char
                | Kw::Void
                | Kw::Long
                | Kw::Short
                | Kw::Unsigned
                | Kw::Signed
                | Kw::Float
                | Kw::Double
        )
    }
}

// Longest first so that `->` wins over `-`.
const PUNCT: &[&str] = &[
    "->", "==", "!=", "<=", ">=", "&&", "||", "(", ")", "{", "}", "[", "]", ";", ",", ".", "*",
    "&", "+", "-", "=", "<", ">", "!",
];

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(k) => write!(f, "integer `{k}`"),
            Tok::Kw(k) => write!(f, "`{}`", k.as_str()),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, FrontendError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut line = 1u32;
    let mut line_start = 0usize;
    let pos_at = |i: usize, line: u32, line_start: usize| Pos {
        line,
        col: (src[line_start..i].chars().count() + 1) as u32,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let start = pos_at(i, line, line_start);
            i += 2;
            loop {
                if i >= bytes.len() {
                    return Err(FrontendError::at(start, ErrorKind::UnterminatedComment));
                }
                if src[i..].starts_with("*/") {
                    i += 2;
                    break;
                }
                if bytes[i] == b'\n' {
                    line += 1;
                    line_start = i + 1;
                }
                i += 1;
            }
            continue;
        }
        let pos = pos_at(i, line, line_start);
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            let tok = match KEYWORDS.iter().find(|(s, _)| *s == word) {
                Some((_, k)) => Tok::Kw(*k),
                None => Tok::Ident(word.into()),
            };
            out.push((tok, pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let k = src[start..i]
                .parse::<i64>()
                .map_err(|_| FrontendError::at(pos, ErrorKind::IntegerOverflow))?;
            out.push((Tok::Int(k), pos));
            continue;
        }
        match PUNCT.iter().find(|p| src[i..].starts_with(**p)) {
            Some(p) => {
                i += p.len();
                out.push((Tok::Punct(p), pos));
            }
            None => {
                let ch = src[i..].chars().next().unwrap_or('\0');
                return Err(FrontendError::at(pos, ErrorKind::UnexpectedChar(ch)));
            }
        }
    }
    let eof = pos_at(bytes.len(), line, line_start);
    out.push((Tok::Eof, eof));
    Ok(out)
}

//! Tokens with byte spans. Unicode operator spellings are folded into their
//! ASCII forms here, so the parser only sees one spelling.

use std::fmt;

use super::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Bare word; keywords are bare words compared by text.
    Word(String),
    /// Backquoted name, never a keyword.
    Quoted(String),
    Int(i64),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn is_word(&self, w: &str) -> bool {
        matches!(self, Tok::Word(s) if s == w)
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self, Tok::Sym(x) if *x == s)
    }
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Quoted(w) => write!(f, "`{w}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const SYMBOLS: &[&str] = &[
    "-->", "--", "->", "//", "..", "<=", ">=", "!=", "||", "(", ")", "[", "]", "{", "}", "<", ">", "=", "+", "-",
    "*", ";", ",", ":", ".", "'", "^",
];

fn unicode_alias(c: char) -> Option<Tok> {
    Some(match c {
        '⟨' => Tok::Sym("<"),
        '⟩' => Tok::Sym(">"),
        '↓' => Tok::Word("down".into()),
        '@' => Tok::Word("at".into()),
        '¬' => Tok::Word("not".into()),
        '∧' => Tok::Word("and".into()),
        '∨' => Tok::Word("or".into()),
        '→' => Tok::Sym("->"),
        '⫽' => Tok::Sym("//"),
        '≤' => Tok::Sym("<="),
        '≥' => Tok::Sym(">="),
        '≠' => Tok::Sym("!="),
        '′' => Tok::Sym("'"),
        '∥' => Tok::Sym("||"),
        _ => return None,
    })
}

/// Split `text` into tokens. Comments run from `#` to the end of the line.
/// Lexing continues after an error so that later errors are reported too.
pub fn lex(file: usize, text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let span = |a: usize, b: usize| Span::new(file, a, b);
    'outer: while i < text.len() {
        let c = text[i..].chars().next().expect("in bounds");
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c == '#' {
            while i < text.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < text.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Word(text[start..i].to_string()),
                span: span(start, i),
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < text.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            match text[start..i].parse::<i64>() {
                Ok(n) => out.push(Token {
                    tok: Tok::Int(n),
                    span: span(start, i),
                }),
                Err(_) => diags.push(Diagnostic::error(span(start, i), "integer literal out of range")),
            }
            continue;
        }
        if c == '`' || c == '"' {
            let start = i;
            i += 1;
            let body = i;
            while i < text.len() && bytes[i] != c as u8 && bytes[i] != b'\n' {
                i += 1;
            }
            if i >= text.len() || bytes[i] != c as u8 {
                diags.push(Diagnostic::error(span(start, i), "unterminated quotation"));
                continue;
            }
            let s = text[body..i].to_string();
            i += 1;
            if c == '`' && s.is_empty() {
                diags.push(Diagnostic::error(span(start, i), "empty quoted name"));
                continue;
            }
            out.push(Token {
                tok: if c == '`' { Tok::Quoted(s) } else { Tok::Str(s) },
                span: span(start, i),
            });
            continue;
        }
        if let Some(tok) = unicode_alias(c) {
            out.push(Token {
                tok,
                span: span(i, i + c.len_utf8()),
            });
            i += c.len_utf8();
            continue;
        }
        for s in SYMBOLS {
            if text[i..].starts_with(s) {
                out.push(Token {
                    tok: Tok::Sym(s),
                    span: span(i, i + s.len()),
                });
                i += s.len();
                continue 'outer;
            }
        }
        diags.push(Diagnostic::error(span(i, i + c.len_utf8()), format!("unexpected character `{c}`")));
        i += c.len_utf8();
    }
    out.push(Token {
        tok: Tok::Eof,
        span: span(text.len(), text.len()),
    });
    (out, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(0, s).0.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_aliases() {
        assert_eq!(
            toks("A --(e)--> B"),
            vec![
                Tok::Word("A".into()),
                Tok::Sym("--"),
                Tok::Sym("("),
                Tok::Word("e".into()),
                Tok::Sym(")"),
                Tok::Sym("-->"),
                Tok::Word("B".into()),
                Tok::Eof
            ]
        );
        assert_eq!(toks("⟨e ⫽ a′ ≥ 1⟩"), toks("<e // a' >= 1>"));
        assert_eq!(toks("`Card,Idle` # comment"), vec![Tok::Quoted("Card,Idle".into()), Tok::Eof]);
    }

    #[test]
    fn bad_characters_are_reported() {
        let (_, d) = lex(0, "a $ b");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].span.start, 2);
    }
}

use std::fmt;

use crate::diagnostic::{Code, Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Hole(String),
    Underscore,
    // keywords
    Type,
    If,
    Then,
    Else,
    Mod,
    Not,
    True,
    False,
    // punctuation
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    DColon,
    Arrow,
    FatArrow,
    Equals,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    AndAnd,
    OrOr,
    Bar,
    Question,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) | Tok::Hole(x) => return write!(f, "`{x}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::Underscore => "_",
            Tok::Type => "type",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::Mod => "mod",
            Tok::Not => "not",
            Tok::True => "True",
            Tok::False => "False",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::DColon => "::",
            Tok::Arrow => "->",
            Tok::FatArrow => "=>",
            Tok::Equals => "=",
            Tok::EqEq => "==",
            Tok::NotEq => "/=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bar => "|",
            Tok::Question => "?",
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// First token on its line and at column 1.
    pub line_start: bool,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "type" => Tok::Type,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "mod" => Tok::Mod,
        "not" => Tok::Not,
        "True" | "true" => Tok::True,
        "False" | "false" => Tok::False,
        _ => return None,
    })
}

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let mut col0 = true;
    let end_of = |j: usize| chars.get(j).map(|c| c.0).unwrap_or(src.len());
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c == '\n' {
            col0 = true;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col0 = false;
            i += 1;
            continue;
        }
        let at_col1 = col0;
        col0 = false;
        if c == '-' && chars.get(i + 1).map(|c| c.1) == Some('-') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let text = &src[pos..end_of(i)];
            let n = text.parse::<i64>().map_err(|_| {
                Diagnostic::error(
                    Code::Lex,
                    Span::new(pos, end_of(i)),
                    format!("integer literal `{text}` is too large"),
                )
            })?;
            Tok::Int(n)
        } else if c == '_' {
            i += 1;
            while i < chars.len() && is_ident_char(chars[i].1) {
                i += 1;
            }
            if i == start + 1 {
                Tok::Underscore
            } else {
                Tok::Hole(src[pos..end_of(i)].to_string())
            }
        } else if c.is_alphabetic() {
            while i < chars.len() && is_ident_char(chars[i].1) {
                i += 1;
            }
            let text = &src[pos..end_of(i)];
            keyword(text).unwrap_or_else(|| Tok::Ident(text.to_string()))
        } else {
            let next = chars.get(i + 1).map(|c| c.1);
            let (tok, width) = match (c, next) {
                (':', Some(':')) => (Tok::DColon, 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('=', Some('>')) => (Tok::FatArrow, 2),
                ('=', Some('=')) => (Tok::EqEq, 2),
                ('/', Some('=')) | ('!', Some('=')) => (Tok::NotEq, 2),
                ('<', Some('=')) => (Tok::Le, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('&', Some('&')) => (Tok::AndAnd, 2),
                ('|', Some('|')) => (Tok::OrOr, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                (':', _) => (Tok::Colon, 1),
                ('=', _) => (Tok::Equals, 1),
                ('<', _) => (Tok::Lt, 1),
                ('>', _) => (Tok::Gt, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                ('|', _) => (Tok::Bar, 1),
                ('?', _) => (Tok::Question, 1),
                _ => {
                    return Err(Diagnostic::error(
                        Code::Lex,
                        Span::new(pos, pos + c.len_utf8()),
                        format!("unexpected character `{c}`"),
                    ))
                }
            };
            i += width;
            tok
        };
        out.push(Token {
            tok,
            span: Span::new(pos, end_of(i)),
            line_start: at_col1,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn holes_and_wildcards() {
        assert_eq!(
            toks("f _ _0 _goal"),
            vec![
                Tok::Ident("f".into()),
                Tok::Underscore,
                Tok::Hole("_0".into()),
                Tok::Hole("_goal".into())
            ]
        );
    }

    #[test]
    fn operators_and_comments() {
        assert_eq!(
            toks("x :: a -> b -- trailing\n/= != <= =>"),
            vec![
                Tok::Ident("x".into()),
                Tok::DColon,
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::NotEq,
                Tok::NotEq,
                Tok::Le,
                Tok::FatArrow
            ]
        );
    }

    #[test]
    fn column_one_marks() {
        let t = lex("f x = 1\n  + 2\ng = 3").unwrap();
        let starts: Vec<bool> = t.iter().map(|t| t.line_start).collect();
        assert_eq!(
            starts,
            vec![true, false, false, false, false, false, true, false, false]
        );
    }

    #[test]
    fn rejects_stray_characters() {
        let e = lex("f = 1 $ 2").unwrap_err();
        assert_eq!(e.code, Code::Lex);
        assert_eq!(e.span, Some(Span::new(6, 7)));
    }
}

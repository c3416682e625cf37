use super::ast::Span;
use super::error::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
    Arrow,
    /// Statement separator: `;` or a newline outside brackets.
    Sep,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Sep => "end of statement".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut depth: usize = 0;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |tok| Token {
            tok,
            span: Span::new(start, start + 1),
        };
        match c {
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'\n' => {
                if depth == 0 {
                    out.push(single(Tok::Sep));
                }
                i += 1;
            }
            b' ' | b'\t' | b'\r' => i += 1,
            b';' => {
                out.push(single(Tok::Sep));
                i += 1;
            }
            b'+' => {
                out.push(single(Tok::Plus));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push(Token {
                        tok: Tok::Arrow,
                        span: Span::new(i, i + 2),
                    });
                    i += 2;
                } else {
                    out.push(single(Tok::Minus));
                    i += 1;
                }
            }
            b'*' => {
                out.push(single(Tok::Star));
                i += 1;
            }
            b'/' => {
                out.push(single(Tok::Slash));
                i += 1;
            }
            b'^' => {
                out.push(single(Tok::Caret));
                i += 1;
            }
            b'(' | b'[' => {
                depth += 1;
                out.push(single(if c == b'(' { Tok::LParen } else { Tok::LBracket }));
                i += 1;
            }
            b')' | b']' => {
                depth = depth.saturating_sub(1);
                out.push(single(if c == b')' { Tok::RParen } else { Tok::RBracket }));
                i += 1;
            }
            b',' => {
                out.push(single(Tok::Comma));
                i += 1;
            }
            b'=' => {
                out.push(single(Tok::Equals));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i);
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| {
                    ParseError::new(
                        ParseErrorKind::Lexical,
                        format!("malformed number `{text}`"),
                        Span::new(start, i),
                        src,
                    )
                })?;
                out.push(Token {
                    tok: Tok::Num(v),
                    span: Span::new(start, i),
                });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    span: Span::new(start, i),
                });
            }
            _ => {
                let ch = src[start..].chars().next().unwrap();
                return Err(ParseError::new(
                    ParseErrorKind::Lexical,
                    format!("unexpected character `{ch}`"),
                    Span::new(start, start + ch.len_utf8()),
                    src,
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(src.len(), src.len()),
    });
    Ok(out)
}

fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrow_and_minus() {
        assert_eq!(
            toks("dim 1 -> 3"),
            vec![
                Tok::Ident("dim".into()),
                Tok::Num(1.0),
                Tok::Arrow,
                Tok::Num(3.0),
                Tok::Eof
            ]
        );
        assert_eq!(toks("a - -b")[1], Tok::Minus);
    }

    #[test]
    fn newlines_inside_brackets_are_not_separators() {
        let t = toks("x = [a,\n b]\ns in [0, 1] # c\n");
        let seps = t.iter().filter(|t| **t == Tok::Sep).count();
        assert_eq!(seps, 2);
    }

    #[test]
    fn exponent_numbers() {
        assert_eq!(toks("1.5e-3")[0], Tok::Num(1.5e-3));
        // `2e` is the number 2 followed by the identifier e
        assert_eq!(toks("2e")[1], Tok::Ident("e".into()));
    }

    #[test]
    fn bad_character_has_span() {
        let err = tokenize("x = [s $ 2]").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Lexical);
        assert_eq!(err.span, Span::new(7, 8));
        assert_eq!((err.line, err.column), (1, 8));
    }
}

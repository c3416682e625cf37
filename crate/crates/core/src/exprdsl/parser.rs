//! Recursive-descent parser for `.imm` immersion files.
//!
//! ```text
//! file      := (stmt? SEP)* stmt?
//! stmt      := 'dim' NUM '->' NUM
//!            | 'vars' IDENT (',' IDENT)*
//!            | 'const' IDENT '=' expr
//!            | 'x' '=' '[' expr (',' expr)* ']'
//!            | IDENT 'in' '[' expr ',' expr ']'
//! expr      := term (('+' | '-') term)*
//! term      := unary (('*' | '/') unary)*
//! unary     := '-' unary | power
//! power     := atom ('^' exponent)?
//! exponent  := '-' exponent | NUM ('^' exponent)?
//! atom      := NUM | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `SEP` is `;` or a newline outside brackets; `#` starts a comment.

use super::ast::{BinOp, Expr, ExprKind, Func, Span};
use super::error::{ParseError, ParseErrorKind};
use super::lexer::{tokenize, Tok, Token};
use super::spec::{ImmersionSpec, RawStatement};
use crate::chart::Interval;

pub(crate) const RESERVED: [&str; 5] = ["dim", "vars", "const", "x", "in"];

pub fn parse_immersion(src: &str) -> Result<ImmersionSpec, ParseError> {
    let statements = Parser::new(src)?.statements()?;
    ImmersionSpec::from_statements(src, statements)
}

/// Parses a single expression (no statements around it).
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    match p.peek() {
        Tok::Eof => Ok(e),
        other => Err(p.error(
            ParseErrorKind::Syntax,
            format!("unexpected {} after expression", other.describe()),
        )),
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        Ok(Parser {
            src,
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind, msg: impl Into<String>) -> ParseError {
        ParseError::new(kind, msg, self.span(), self.src)
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error(
                ParseErrorKind::Syntax,
                format!("expected {}, found {}", tok.describe(), self.peek().describe()),
            ))
        }
    }

    /// Expects `close`; at end of statement or input, blames the opener.
    fn expect_closing(&mut self, close: Tok, open_span: Span) -> Result<Token, ParseError> {
        if *self.peek() == close {
            return Ok(self.bump());
        }
        let open = if close == Tok::RParen { "(" } else { "[" };
        if matches!(self.peek(), Tok::Eof | Tok::Sep) {
            Err(ParseError::new(
                ParseErrorKind::Syntax,
                format!("unclosed `{open}`"),
                open_span,
                self.src,
            ))
        } else {
            Err(self.error(
                ParseErrorKind::Syntax,
                format!("expected `,` or {}, found {}", close.describe(), self.peek().describe()),
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let sp = self.bump().span;
                Ok((name, sp))
            }
            other => Err(self.error(
                ParseErrorKind::Syntax,
                format!("expected identifier, found {}", other.describe()),
            )),
        }
    }

    fn integer(&mut self) -> Result<(usize, Span), ParseError> {
        match *self.peek() {
            Tok::Num(v) if v.fract() == 0.0 && (1.0..1e6).contains(&v) => {
                let sp = self.bump().span;
                Ok((v as usize, sp))
            }
            ref other => Err(self.error(
                ParseErrorKind::Syntax,
                format!("expected a positive integer, found {}", other.describe()),
            )),
        }
    }

    fn statements(&mut self) -> Result<Vec<(RawStatement, Span)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while *self.peek() == Tok::Sep {
                self.bump();
            }
            if *self.peek() == Tok::Eof {
                return Ok(out);
            }
            let start = self.span().start;
            let stmt = self.statement()?;
            let span = Span::new(start, self.prev_end());
            match self.peek() {
                Tok::Sep | Tok::Eof => {}
                other => {
                    return Err(self.error(
                        ParseErrorKind::Syntax,
                        format!("expected end of statement, found {}", other.describe()),
                    ))
                }
            }
            out.push((stmt, span));
        }
    }

    fn statement(&mut self) -> Result<RawStatement, ParseError> {
        let (head, head_span) = self.ident()?;
        match head.as_str() {
            "dim" => {
                let (n, n_span) = self.integer()?;
                self.expect(Tok::Arrow)?;
                let (m, m_span) = self.integer()?;
                Ok(RawStatement::Dim { n, m, n_span, m_span })
            }
            "vars" => {
                let mut names = vec![self.ident()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    names.push(self.ident()?);
                }
                Ok(RawStatement::Vars(names))
            }
            "const" => {
                let name = self.ident()?;
                self.expect(Tok::Equals)?;
                let value = self.expr()?;
                Ok(RawStatement::Const { name, value })
            }
            "x" => {
                self.expect(Tok::Equals)?;
                let open = self.expect(Tok::LBracket)?.span;
                let mut comps = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    comps.push(self.expr()?);
                }
                self.expect_closing(Tok::RBracket, open)?;
                Ok(RawStatement::Components(comps))
            }
            _ => {
                if *self.peek() != Tok::Ident("in".into()) {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax,
                        format!(
                            "unknown statement `{head}` (expected dim, vars, const, x, or `<var> in [a, b]`)"
                        ),
                        head_span,
                        self.src,
                    ));
                }
                self.bump();
                let open = self.expect(Tok::LBracket)?.span;
                let lo = self.expr()?;
                self.expect(Tok::Comma)?;
                let hi = self.expr()?;
                self.expect_closing(Tok::RBracket, open)?;
                Ok(RawStatement::Domain {
                    var: (head, head_span),
                    lo,
                    hi,
                })
            }
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            let start = self.bump().span.start;
            let inner = self.unary()?;
            let span = Span::new(start, inner.span.end);
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                span,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exponent = self.exponent()?;
        let span = base.span.join(exponent.span);
        Ok(Expr {
            kind: ExprKind::Pow(Box::new(base), Box::new(exponent)),
            span,
        })
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        match *self.peek() {
            Tok::Minus => {
                let start = self.bump().span.start;
                let inner = self.exponent()?;
                let span = Span::new(start, inner.span.end);
                Ok(Expr {
                    kind: ExprKind::Neg(Box::new(inner)),
                    span,
                })
            }
            Tok::Num(v) => {
                let sp = self.bump().span;
                let lit = Expr {
                    kind: ExprKind::Num(v),
                    span: sp,
                };
                if *self.peek() == Tok::Caret {
                    self.bump();
                    let rest = self.exponent()?;
                    let span = sp.join(rest.span);
                    Ok(Expr {
                        kind: ExprKind::Pow(Box::new(lit), Box::new(rest)),
                        span,
                    })
                } else {
                    Ok(lit)
                }
            }
            ref other => Err(self.error(
                ParseErrorKind::Syntax,
                format!(
                    "exponent must be a numeric literal, found {}",
                    other.describe()
                ),
            )),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                let span = self.bump().span;
                Ok(Expr {
                    kind: ExprKind::Num(v),
                    span,
                })
            }
            Tok::Ident(name) => {
                let span = self.bump().span;
                if *self.peek() == Tok::LParen {
                    return self.call(name, span);
                }
                if RESERVED.contains(&name.as_str()) || Func::from_name(&name).is_some() {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax,
                        format!("`{name}` cannot be used as a value"),
                        span,
                        self.src,
                    ));
                }
                Ok(Expr {
                    kind: ExprKind::Ident(name),
                    span,
                })
            }
            Tok::LParen => {
                let open = self.bump().span;
                let mut inner = self.expr()?;
                let close = self.expect_closing(Tok::RParen, open)?.span;
                inner.span = open.join(close);
                Ok(inner)
            }
            other => Err(self.error(
                ParseErrorKind::Syntax,
                format!("expected an expression, found {}", other.describe()),
            )),
        }
    }

    fn call(&mut self, name: String, name_span: Span) -> Result<Expr, ParseError> {
        let Some(func) = Func::from_name(&name) else {
            return Err(ParseError::new(
                ParseErrorKind::UnknownIdentifier,
                format!("unknown function `{name}`"),
                name_span,
                self.src,
            ));
        };
        let open = self.expect(Tok::LParen)?.span;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            args.push(self.expr()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                if func == Func::Pow && args.len() == 1 {
                    args.push(self.exponent()?);
                } else {
                    args.push(self.expr()?);
                }
            }
        }
        let close = self.expect_closing(Tok::RParen, open)?.span;
        let span = name_span.join(close);
        if args.len() != func.arity() {
            return Err(ParseError::new(
                ParseErrorKind::Arity,
                format!(
                    "`{name}` takes {} argument{}, got {}",
                    func.arity(),
                    if func.arity() == 1 { "" } else { "s" },
                    args.len()
                ),
                span,
                self.src,
            ));
        }
        Ok(Expr {
            kind: ExprKind::Call(func, args),
            span,
        })
    }
}

fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
    let span = l.span.join(r.span);
    Expr {
        kind: ExprKind::Binary(op, Box::new(l), Box::new(r)),
        span,
    }
}

/// Evaluates a constant expression (literals, `pi`, earlier constants).
pub(crate) fn eval_constant(
    e: &Expr,
    lookup: &dyn Fn(&str) -> Option<f64>,
    src: &str,
) -> Result<f64, ParseError> {
    let rec = |x: &Expr| eval_constant(x, lookup, src);
    let v = match &e.kind {
        ExprKind::Num(v) => *v,
        ExprKind::Ident(name) => lookup(name).ok_or_else(|| {
            ParseError::new(
                ParseErrorKind::UnknownIdentifier,
                format!("`{name}` is not a constant"),
                e.span,
                src,
            )
        })?,
        ExprKind::Neg(x) => -rec(x)?,
        ExprKind::Binary(op, l, r) => {
            let (a, b) = (rec(l)?, rec(r)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
            }
        }
        ExprKind::Pow(b, x) => rec(b)?.powf(rec(x)?),
        ExprKind::Call(f, args) => {
            let a = rec(&args[0])?;
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan(),
                Func::Atan => a.atan(),
                Func::Sqrt => a.sqrt(),
                Func::Exp => a.exp(),
                Func::Log => a.ln(),
                Func::Pow => a.powf(rec(&args[1])?),
            }
        }
    };
    if !v.is_finite() {
        return Err(ParseError::new(
            ParseErrorKind::Semantic,
            "constant expression is not a finite number",
            e.span,
            src,
        ));
    }
    Ok(v)
}

pub(crate) fn interval(
    lo: f64,
    hi: f64,
    span: Span,
    src: &str,
) -> Result<Interval, ParseError> {
    Interval::new(lo, hi).map_err(|e| ParseError::new(ParseErrorKind::Semantic, e, span, src))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1 - 2 - 3").unwrap();
        assert_eq!(e.to_string(), "1 - 2 - 3");
        let ExprKind::Binary(BinOp::Sub, l, _) = &e.kind else {
            panic!()
        };
        assert!(matches!(l.kind, ExprKind::Binary(BinOp::Sub, ..)));

        // ^ binds tighter than unary minus
        let e = parse_expr("-s^2").unwrap();
        assert!(matches!(&e.kind, ExprKind::Neg(inner) if matches!(inner.kind, ExprKind::Pow(..))));

        // right-associative literal exponents
        let e = parse_expr("s^2^3").unwrap();
        let ExprKind::Pow(_, ex) = &e.kind else { panic!() };
        assert_eq!(ex.literal_value(), Some(8.0));
    }

    #[test]
    fn exponent_must_be_literal() {
        let err = parse_expr("s^u2").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!(err.span, Span::new(2, 4));
        assert!(parse_expr("s^(2)").is_err());
        assert!(parse_expr("pow(s, u2)").is_err());
        assert!(parse_expr("pow(s, -1.5)").is_ok());
    }

    #[test]
    fn arity_and_unknown_function() {
        let err = parse_expr("sin(s, u2)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Arity);
        assert_eq!(err.span, Span::new(0, 10));
        let err = parse_expr("sinh(s)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier);
        assert_eq!(err.span, Span::new(0, 4));
        let err = parse_expr("pow(s)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Arity);
    }

    #[test]
    fn unclosed_paren_points_at_opener() {
        let err = parse_expr("2 * (s + 1").unwrap_err();
        assert_eq!(err.span, Span::new(4, 5));
        assert_eq!(err.message, "unclosed `(`");
    }
}

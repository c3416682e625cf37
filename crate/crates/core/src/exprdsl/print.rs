//! Canonical pretty-printer. Emits the fewest parentheses that re-parse to
//! the same tree.

use super::ast::{Expr, ExprKind};

const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, 0, &mut out);
    out
}

pub(crate) fn format_number(v: f64) -> String {
    // Display is the shortest representation that round-trips exactly.
    format!("{v}")
}

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Num(_) | ExprKind::Ident(_) | ExprKind::Call(..) => PREC_ATOM,
        ExprKind::Neg(_) => PREC_NEG,
        ExprKind::Pow(..) => PREC_POW,
        ExprKind::Binary(op, ..) => op.precedence(),
    }
}

fn write_expr(e: &Expr, min_prec: u8, out: &mut String) {
    let wrap = precedence(e) < min_prec;
    if wrap {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Num(v) => out.push_str(&format_number(*v)),
        ExprKind::Ident(name) => out.push_str(name),
        ExprKind::Neg(inner) => {
            out.push('-');
            write_expr(inner, PREC_NEG, out);
        }
        ExprKind::Binary(op, l, r) => {
            let p = op.precedence();
            write_expr(l, p, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(r, p + 1, out);
        }
        ExprKind::Pow(base, exponent) => {
            write_expr(base, PREC_ATOM, out);
            out.push('^');
            write_exponent(exponent, out);
        }
        ExprKind::Call(f, args) => {
            out.push_str(f.name());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                if i == 1 && *f == super::ast::Func::Pow {
                    write_exponent(a, out);
                } else {
                    write_expr(a, 0, out);
                }
            }
            out.push(')');
        }
    }
    if wrap {
        out.push(')');
    }
}

fn write_exponent(e: &Expr, out: &mut String) {
    match &e.kind {
        ExprKind::Num(v) => out.push_str(&format_number(*v)),
        ExprKind::Neg(inner) => {
            out.push('-');
            write_exponent(inner, out);
        }
        ExprKind::Pow(base, exponent) => {
            write_exponent(base, out);
            out.push('^');
            write_exponent(exponent, out);
        }
        // not a literal exponent; print something that fails loudly on re-parse
        _ => {
            out.push('(');
            write_expr(e, 0, out);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprdsl::ast::{BinOp, Func};

    #[test]
    fn minimal_parentheses() {
        let a = Expr::ident("a");
        let b = Expr::ident("b");
        let c = Expr::ident("c");
        let e = Expr::binary(
            BinOp::Sub,
            a.clone(),
            Expr::binary(BinOp::Sub, b.clone(), c.clone()),
        );
        assert_eq!(print_expr(&e), "a - (b - c)");
        let e = Expr::neg(Expr::binary(BinOp::Mul, a.clone(), b.clone()));
        assert_eq!(print_expr(&e), "-(a * b)");
        let e = Expr::binary(BinOp::Mul, Expr::neg(a.clone()), b.clone());
        assert_eq!(print_expr(&e), "-a * b");
        let e = Expr::pow(Expr::neg(a.clone()), -2.0);
        assert_eq!(print_expr(&e), "(-a)^-2");
    }

    #[test]
    fn sqrt_of_shifted_square() {
        let s = Expr::ident("s");
        let e = Expr::call(
            Func::Sqrt,
            vec![Expr::binary(BinOp::Add, Expr::pow(s, 2.0), Expr::num(1.0))],
        );
        assert_eq!(print_expr(&e), "sqrt(s^2 + 1)");
    }
}

use std::fmt;

/// Byte range `[start, end)` into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// The functions the evaluator can push jets through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Sqrt,
    Exp,
    Log,
    Pow,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Atan,
        Func::Sqrt,
        Func::Exp,
        Func::Log,
        Func::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Pow => "pow",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    /// Non-negative numeric literal; negation is always an explicit `Neg`.
    Num(f64),
    /// Chart variable or named constant, resolved after parsing.
    Ident(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// `base ^ exponent`; the exponent is a literal exponent expression
    /// (see [`Expr::is_literal_exponent`]).
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Expression node with its source span. Equality ignores spans, so a
/// re-parsed pretty-print compares equal to the original tree.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Num(a), Num(b)) => a.to_bits() == b.to_bits(),
            (Ident(a), Ident(b)) => a == b,
            (Neg(a), Neg(b)) => a == b,
            (Binary(o1, l1, r1), Binary(o2, l2, r2)) => o1 == o2 && l1 == l2 && r1 == r2,
            (Pow(b1, e1), Pow(b2, e2)) => b1 == b2 && e1 == e2,
            (Call(f1, a1), Call(f2, a2)) => f1 == f2 && a1 == a2,
            _ => false,
        }
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Expr {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    /// Literal for any finite real; negatives become `Neg(Num)`.
    pub fn num(v: f64) -> Expr {
        if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
            Expr::new(ExprKind::Neg(Box::new(Expr::new(ExprKind::Num(-v)))))
        } else {
            Expr::new(ExprKind::Num(v))
        }
    }

    pub fn ident(name: &str) -> Expr {
        Expr::new(ExprKind::Ident(name.to_string()))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::new(ExprKind::Neg(Box::new(e)))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::new(ExprKind::Binary(op, Box::new(l), Box::new(r)))
    }

    pub fn pow(base: Expr, exponent: f64) -> Expr {
        Expr::new(ExprKind::Pow(Box::new(base), Box::new(Expr::num(exponent))))
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Expr {
        Expr::new(ExprKind::Call(f, args))
    }

    /// Exponents are literals: `N`, `-E`, or `N ^ E` with `E` again literal.
    pub fn is_literal_exponent(&self) -> bool {
        match &self.kind {
            ExprKind::Num(_) => true,
            ExprKind::Neg(e) => e.is_literal_exponent(),
            ExprKind::Pow(b, e) => matches!(b.kind, ExprKind::Num(_)) && e.is_literal_exponent(),
            _ => false,
        }
    }

    /// Value of a literal exponent expression.
    pub fn literal_value(&self) -> Option<f64> {
        match &self.kind {
            ExprKind::Num(v) => Some(*v),
            ExprKind::Neg(e) => e.literal_value().map(|v| -v),
            ExprKind::Pow(b, e) => Some(b.literal_value()?.powf(e.literal_value()?)),
            _ => None,
        }
    }

    pub fn visit_idents<'a>(&'a self, f: &mut impl FnMut(&'a str, Span)) {
        match &self.kind {
            ExprKind::Num(_) => {}
            ExprKind::Ident(name) => f(name, self.span),
            ExprKind::Neg(e) => e.visit_idents(f),
            ExprKind::Binary(_, l, r) | ExprKind::Pow(l, r) => {
                l.visit_idents(f);
                r.visit_idents(f);
            }
            ExprKind::Call(_, args) => args.iter().for_each(|a| a.visit_idents(f)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::print_expr(self))
    }
}

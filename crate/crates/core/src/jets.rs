//! Truncated multivariate Taylor arithmetic ("jets") up to order 3.
//!
//! A [`Jet`] stores the Taylor coefficients of a smooth function of
//! `num_vars` variables around a point, truncated at total degree `order`.
//! Coefficients are kept in the divided-by-factorial convention, so the
//! coefficient of `x^α` is `∂^α f / α!`. Storage is dense and graded
//! lexicographic: degree ascending, and within one degree the exponent
//! tuples in descending lexicographic order. For two variables at order 2
//! the layout is `1, x0, x1, x0², x0·x1, x1²`.
//!
//! Elementary functions are composed through their univariate Taylor
//! expansion around the value part: `f(a) = Σ f⁽ᵏ⁾(a₀)/k! · (a − a₀)ᵏ`,
//! which terminates because `(a − a₀)` is nilpotent in the truncated ring.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use thiserror::Error;

/// Highest supported truncation order.
pub const MAX_ORDER: u8 = 3;

/// Highest supported number of independent variables.
pub const MAX_VARS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("invalid jet order {0} (supported: 0..=3)")]
    InvalidOrder(u8),
    #[error("invalid number of variables {0} (supported: 1..={MAX_VARS})")]
    InvalidVariableCount(usize),
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("jet shape mismatch: ({0} vars, order {1}) vs ({2} vars, order {3})")]
    Mismatch(usize, u8, usize, u8),
    #[error("division by a jet with zero value part")]
    DivisionByZero,
    #[error("domain violation: {function} is undefined at {value}")]
    Domain { function: &'static str, value: f64 },
    #[error("requested derivative of order {requested} from a jet of order {order}")]
    OrderExceeded { requested: usize, order: u8 },
    #[error("non-finite coefficient produced by {0}")]
    NonFinite(&'static str),
}

/// Exponent tuple of a monomial, one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn new(exponents: Vec<u8>) -> Self {
        MultiIndex(exponents)
    }

    /// Multi-index of the mixed partial `∂_{i₁}∂_{i₂}…` given as a list of
    /// variable indices (order irrelevant).
    pub fn from_partials(num_vars: usize, vars: &[usize]) -> Self {
        let mut e = vec![0u8; num_vars];
        for &v in vars {
            e[v] += 1;
        }
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// `α! = Π αᵢ!`
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&e| factorial(e as usize)).product()
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Precomputed index tables for one `(num_vars, order)` pair.
#[derive(Debug)]
struct Layout {
    num_vars: usize,
    order: u8,
    indices: Vec<MultiIndex>,
    /// `(i, j, k)`: coefficient `i` times coefficient `j` lands in `k`.
    products: Vec<(u16, u16, u16)>,
    positions: HashMap<MultiIndex, usize>,
}

impl Layout {
    fn build(num_vars: usize, order: u8) -> Layout {
        let mut indices = Vec::new();
        for d in 0..=order {
            let mut current = vec![0u8; num_vars];
            compositions(d, 0, &mut current, &mut indices);
        }
        let degree: Vec<u8> = indices.iter().map(|a| a.degree() as u8).collect();
        let positions: HashMap<MultiIndex, usize> = indices
            .iter()
            .enumerate()
            .map(|(k, a)| (a.clone(), k))
            .collect();
        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if degree[i] + degree[j] > order {
                    continue;
                }
                let sum = MultiIndex(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect());
                products.push((i as u16, j as u16, positions[&sum] as u16));
            }
        }
        Layout {
            num_vars,
            order,
            indices,
            products,
            positions,
        }
    }

    fn len(&self) -> usize {
        self.indices.len()
    }
}

// Exponent tuples of total degree `remaining` over variables `var..`, in
// descending lexicographic order.
fn compositions(remaining: u8, var: usize, current: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if var == n - 1 {
        current[var] = remaining;
        out.push(MultiIndex(current.clone()));
        current[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e;
        compositions(remaining - e, var + 1, current, out);
    }
    current[var] = 0;
}

fn layout(num_vars: usize, order: u8) -> Result<&'static Layout, JetError> {
    static LAYOUTS: [[OnceLock<Layout>; 4]; MAX_VARS + 1] =
        [const { [const { OnceLock::new() }; 4] }; MAX_VARS + 1];
    if order > MAX_ORDER {
        return Err(JetError::InvalidOrder(order));
    }
    if num_vars == 0 || num_vars > MAX_VARS {
        return Err(JetError::InvalidVariableCount(num_vars));
    }
    Ok(LAYOUTS[num_vars][order as usize].get_or_init(|| Layout::build(num_vars, order)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Univariate functions that can be composed with a jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Sin,
    Cos,
    Tan,
    Atan,
    Sqrt,
    Exp,
    Log,
    /// `a^p` for a real constant `p`.
    PowConst(f64),
    Recip,
}

impl Elementary {
    pub fn name(&self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Tan => "tan",
            Elementary::Atan => "atan",
            Elementary::Sqrt => "sqrt",
            Elementary::Exp => "exp",
            Elementary::Log => "log",
            Elementary::PowConst(_) => "pow",
            Elementary::Recip => "recip",
        }
    }

    /// Taylor coefficients `f⁽ᵏ⁾(a)/k!` for `k = 0..=3`.
    fn taylor(&self, a: f64) -> Result<[f64; 4], JetError> {
        let domain = |function| Err(JetError::Domain { function, value: a });
        let d = match *self {
            Elementary::Sin => {
                let (s, c) = a.sin_cos();
                [s, c, -s, -c]
            }
            Elementary::Cos => {
                let (s, c) = a.sin_cos();
                [c, -s, -c, s]
            }
            Elementary::Tan => {
                if a.cos().abs() < 1e-12 {
                    return domain("tan");
                }
                let t = a.tan();
                let sec2 = 1.0 + t * t;
                [t, sec2, 2.0 * t * sec2, sec2 * (2.0 + 6.0 * t * t)]
            }
            Elementary::Atan => {
                let q = 1.0 + a * a;
                [
                    a.atan(),
                    1.0 / q,
                    -2.0 * a / (q * q),
                    (6.0 * a * a - 2.0) / (q * q * q),
                ]
            }
            Elementary::Sqrt => {
                if !(a > 0.0) {
                    return domain("sqrt");
                }
                let r = a.sqrt();
                [r, 0.5 / r, -0.25 / (a * r), 0.375 / (a * a * r)]
            }
            Elementary::Exp => {
                let e = a.exp();
                [e, e, e, e]
            }
            Elementary::Log => {
                if !(a > 0.0) {
                    return domain("log");
                }
                [a.ln(), 1.0 / a, -1.0 / (a * a), 2.0 / (a * a * a)]
            }
            Elementary::Recip => {
                if a == 0.0 {
                    return Err(JetError::DivisionByZero);
                }
                let r = 1.0 / a;
                [r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]
            }
            Elementary::PowConst(p) => pow_derivatives(a, p)?,
        };
        Ok([d[0], d[1], d[2] / 2.0, d[3] / 6.0])
    }
}

fn pow_derivatives(a: f64, p: f64) -> Result<[f64; 4], JetError> {
    let is_int = p.fract() == 0.0 && p.abs() < 1e15;
    if !is_int && !(a > 0.0) {
        return Err(JetError::Domain { function: "pow", value: a });
    }
    if is_int && p < 0.0 && a == 0.0 {
        return Err(JetError::Domain { function: "pow", value: a });
    }
    let mut out = [0.0; 4];
    let mut falling = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        if falling == 0.0 {
            break;
        }
        *slot = falling * pow_value(a, p - k as f64, is_int);
        falling *= p - k as f64;
    }
    Ok(out)
}

fn pow_value(a: f64, p: f64, is_int: bool) -> f64 {
    if is_int && p.abs() <= i32::MAX as f64 {
        a.powi(p as i32)
    } else {
        a.powf(p)
    }
}

/// Truncated multivariate Taylor expansion.
#[derive(Clone)]
pub struct Jet {
    layout: &'static Layout,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("num_vars", &self.layout.num_vars)
            .field("order", &self.layout.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.layout, other.layout) && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn constant(value: f64, num_vars: usize, order: u8) -> Result<Jet, JetError> {
        let layout = layout(num_vars, order)?;
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = value;
        Ok(Jet { layout, coeffs })
    }

    /// The coordinate function `x_index` expanded around `value`.
    pub fn variable(index: usize, value: f64, num_vars: usize, order: u8) -> Result<Jet, JetError> {
        if index >= num_vars {
            return Err(JetError::IndexOutOfRange { index, num_vars });
        }
        let mut jet = Jet::constant(value, num_vars, order)?;
        if order >= 1 {
            // degree-1 entries are stored in variable order
            jet.coeffs[1 + index] = 1.0;
        }
        Ok(jet)
    }

    /// One jet per coordinate, seeded at `point`.
    pub fn seed(point: &[f64], order: u8) -> Result<Vec<Jet>, JetError> {
        let n = point.len();
        (0..n).map(|i| Jet::variable(i, point[i], n, order)).collect()
    }

    /// A constant with the same shape as `self`.
    pub fn constant_like(&self, value: f64) -> Jet {
        let mut coeffs = vec![0.0; self.layout.len()];
        coeffs[0] = value;
        Jet {
            layout: self.layout,
            coeffs,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.layout.num_vars
    }

    pub fn order(&self) -> u8 {
        self.layout.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Raw Taylor coefficients in graded lexicographic order.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Taylor coefficient of the monomial `x^α`, or 0 above the order.
    pub fn coefficient(&self, alpha: &MultiIndex) -> f64 {
        self.layout
            .positions
            .get(alpha)
            .map(|&k| self.coeffs[k])
            .unwrap_or(0.0)
    }

    /// Partial derivative `∂_{v₁}∂_{v₂}… f` at the expansion point.
    pub fn partial(&self, vars: &[usize]) -> Result<f64, JetError> {
        if vars.len() > self.order() as usize {
            return Err(JetError::OrderExceeded {
                requested: vars.len(),
                order: self.order(),
            });
        }
        if let Some(&bad) = vars.iter().find(|&&v| v >= self.num_vars()) {
            return Err(JetError::IndexOutOfRange {
                index: bad,
                num_vars: self.num_vars(),
            });
        }
        let alpha = MultiIndex::from_partials(self.num_vars(), vars);
        Ok(alpha.factorial() * self.coefficient(&alpha))
    }

    /// First partials at the expansion point.
    pub fn gradient(&self) -> Vec<f64> {
        if self.order() == 0 {
            return vec![0.0; self.num_vars()];
        }
        self.coeffs[1..=self.num_vars()].to_vec()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// `∂f/∂x_var` as a jet of one lower order.
    pub fn derivative(&self, var: usize) -> Result<Jet, JetError> {
        let n = self.num_vars();
        if var >= n {
            return Err(JetError::IndexOutOfRange { index: var, num_vars: n });
        }
        if self.order() == 0 {
            return Err(JetError::OrderExceeded { requested: 1, order: 0 });
        }
        let target = layout(n, self.order() - 1)?;
        let coeffs = target
            .indices
            .iter()
            .map(|alpha| {
                let mut raised = alpha.clone();
                raised.0[var] += 1;
                (raised.0[var] as f64) * self.coefficient(&raised)
            })
            .collect();
        Ok(Jet {
            layout: target,
            coeffs,
        })
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: u8) -> Result<Jet, JetError> {
        if order > self.order() {
            return Err(JetError::OrderExceeded {
                requested: order as usize,
                order: self.order(),
            });
        }
        let target = layout(self.num_vars(), order)?;
        Ok(Jet {
            layout: target,
            coeffs: self.coeffs[..target.len()].to_vec(),
        })
    }

    /// Re-expresses this jet in `num_vars` variables, sending variable `i`
    /// to variable `map[i]`. Variables not in the image are absent.
    pub fn lift(&self, num_vars: usize, map: &[usize]) -> Result<Jet, JetError> {
        assert_eq!(map.len(), self.num_vars(), "lift map length");
        if let Some(&bad) = map.iter().find(|&&v| v >= num_vars) {
            return Err(JetError::IndexOutOfRange { index: bad, num_vars });
        }
        let target = layout(num_vars, self.order())?;
        let mut coeffs = vec![0.0; target.len()];
        for (alpha, &c) in self.layout.indices.iter().zip(&self.coeffs) {
            let mut e = vec![0u8; num_vars];
            for (i, &k) in alpha.0.iter().enumerate() {
                e[map[i]] += k;
            }
            coeffs[target.positions[&MultiIndex(e)]] = c;
        }
        Ok(Jet {
            layout: target,
            coeffs,
        })
    }

    /// Chain rule: treats `self` (a jet in one variable, expanded at
    /// `inner.value()`) as a function and composes it with `inner`.
    pub fn compose(&self, inner: &Jet) -> Result<Jet, JetError> {
        if self.num_vars() != 1 {
            return Err(JetError::Mismatch(self.num_vars(), self.order(), 1, self.order()));
        }
        if self.order() < inner.order() {
            return Err(JetError::OrderExceeded {
                requested: inner.order() as usize,
                order: self.order(),
            });
        }
        let mut delta = inner.clone();
        delta.coeffs[0] = 0.0;
        let mut out = inner.constant_like(self.coeffs[0]);
        let mut power = inner.constant_like(1.0);
        for k in 1..=inner.order() as usize {
            power = power.product(&delta);
            for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                *o += self.coeffs[k] * p;
            }
        }
        Ok(out)
    }

    fn check_shape(&self, other: &Jet) -> Result<(), JetError> {
        if std::ptr::eq(self.layout, other.layout) {
            Ok(())
        } else {
            Err(JetError::Mismatch(
                self.num_vars(),
                self.order(),
                other.num_vars(),
                other.order(),
            ))
        }
    }

    pub fn arith(&self, other: &Jet, op: ArithOp) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        Ok(match op {
            ArithOp::Add => self.zip(other, |a, b| a + b),
            ArithOp::Sub => self.zip(other, |a, b| a - b),
            ArithOp::Mul => self.product(other),
            ArithOp::Div => return self.div(other),
        })
    }

    pub fn div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        if other.value() == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        Ok(self.product(&other.apply(Elementary::Recip)?))
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        Jet {
            layout: self.layout,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        let mut coeffs = vec![0.0; self.layout.len()];
        for &(i, j, k) in &self.layout.products {
            coeffs[k as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        Jet {
            layout: self.layout,
            coeffs,
        }
    }

    pub fn scale(&self, factor: f64) -> Jet {
        Jet {
            layout: self.layout,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Composes `f` with this jet.
    pub fn apply(&self, f: Elementary) -> Result<Jet, JetError> {
        let t = f.taylor(self.value())?;
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut out = self.constant_like(t[0]);
        let mut power = self.constant_like(1.0);
        for &tk in t.iter().take(self.order() as usize + 1).skip(1) {
            power = power.product(&delta);
            for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                *o += tk * p;
            }
        }
        if !out.is_finite() {
            return Err(JetError::NonFinite(f.name()));
        }
        Ok(out)
    }

    pub fn sin(&self) -> Jet {
        self.apply(Elementary::Sin).expect("sin is total")
    }

    pub fn cos(&self) -> Jet {
        self.apply(Elementary::Cos).expect("cos is total")
    }

    pub fn atan(&self) -> Jet {
        self.apply(Elementary::Atan).expect("atan is total")
    }

    pub fn exp(&self) -> Result<Jet, JetError> {
        self.apply(Elementary::Exp)
    }

    pub fn tan(&self) -> Result<Jet, JetError> {
        self.apply(Elementary::Tan)
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        self.apply(Elementary::Sqrt)
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        self.apply(Elementary::Log)
    }

    pub fn powf(&self, p: f64) -> Result<Jet, JetError> {
        self.apply(Elementary::PowConst(p))
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        self.apply(Elementary::Recip)
    }

    /// All partial derivatives up to order 3, with `α!` multiplied back.
    pub fn extract(&self) -> Derivatives {
        let n = self.num_vars();
        let order = self.order() as usize;
        let get = |vars: &[usize]| {
            if vars.len() > order {
                None
            } else {
                Some(self.partial(vars).expect("indices checked"))
            }
        };
        let gradient = (order >= 1).then(|| (0..n).map(|i| get(&[i]).unwrap()).collect());
        let hessian = (order >= 2).then(|| {
            (0..n)
                .map(|i| (0..n).map(|j| get(&[i, j]).unwrap()).collect())
                .collect()
        });
        let third = (order >= 3).then(|| {
            let mut t = vec![0.0; n * n * n];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        t[(i * n + j) * n + k] = get(&[i, j, k]).unwrap();
                    }
                }
            }
            t
        });
        Derivatives {
            num_vars: n,
            value: self.value(),
            gradient,
            hessian,
            third,
        }
    }
}

/// Partial derivatives recovered from a jet. Entries above the jet order are
/// `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub num_vars: usize,
    pub value: f64,
    pub gradient: Option<Vec<f64>>,
    pub hessian: Option<Vec<Vec<f64>>>,
    /// Row-major `n × n × n`.
    pub third: Option<Vec<f64>>,
}

impl Derivatives {
    pub fn third(&self, i: usize, j: usize, k: usize) -> Option<f64> {
        let n = self.num_vars;
        self.third.as_ref().map(|t| t[(i * n + j) * n + k])
    }
}

// Operator impls panic on shape mismatch; use `Jet::arith` for a checked
// variant.

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.arith(rhs, ArithOp::Add).expect("jet shape mismatch")
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.arith(rhs, ArithOp::Sub).expect("jet shape mismatch")
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.arith(rhs, ArithOp::Mul).expect("jet shape mismatch")
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// `Σ aᵢ bᵢ` over two equally long slices of jets.
pub fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    assert_eq!(a.len(), b.len(), "dot of unequal lengths");
    let mut acc = a[0].constant_like(0.0);
    for (x, y) in a.iter().zip(b) {
        acc = &acc + &(x * y);
    }
    acc
}

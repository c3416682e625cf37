//! Construction of proper rectifying submanifolds.
//!
//! Given `c > 0` and an isometric immersion `Z` of an (n−1)-manifold into
//! the unit sphere of `E^{m−1}`, the map
//!
//! ```text
//! x(s, u) = √(s² + c²) · Y(arctan(s/c), u),   Y(t, u) = cos t · e₀ + sin t · Z(u)
//! ```
//!
//! is a proper rectifying submanifold of `Eᵐ` with induced metric
//! `ds² + s² g_Z`. The spherical factor `Y` has metric `dt² + sin²t g_Z`,
//! i.e. `c²/(s²+c²)² ds² + s²/(s²+c²) g_Z` in the chart `(s, u)`.
//! For curves (n = 1) the factor is a unit-speed spherical curve `y(t)`
//! and `x(s) = √(s² + c²) · y(arctan(s/c))`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::{unit_norm_defect, Immersion, ImmersionError};
use crate::chart::{Grid, Interval};
use crate::exprdsl::{default_var_names, BinOp, Expr, Func, ImmersionSpec};
use crate::jets::{Jet, JetError};

/// Default `t = arctan(s/c)` range of constructed examples.
pub const DEFAULT_T_RANGE: (f64, f64) = (0.2, 1.2);

/// Tolerance on `⟨Z, Z⟩ = 1` for spherical factors.
pub const UNIT_NORM_TOL: f64 = 1e-10;

/// Tolerance on unit speed and unit norm of a spherical curve handed to
/// [`construct_rectifying_curve`].
pub const CURVE_TOL: f64 = 1e-8;

fn invalid(msg: impl Into<String>) -> ImmersionError {
    ImmersionError::InvalidParameter(msg.into())
}

/// Closed-form spherical bases with a matching `.imm` rendering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseFamily {
    /// `(cos u, sin u)` on S¹ ⊂ E².
    GreatCircle,
    /// `(sin θ cos u, sin θ sin u, cos θ)`, the circle of polar angle θ.
    SmallCircle { polar: f64 },
    /// The same circle traversed at unit speed.
    UnitSpeedSmallCircle { polar: f64 },
    /// `(a cos u, b sin u, d)` normalized onto S².
    Ellipse { a: f64, b: f64, d: f64 },
    /// `(a cos u, b sin u, d cos 2u, e)` normalized onto S³.
    TwistedEllipse { a: f64, b: f64, d: f64, e: f64 },
    /// Round S² in polar coordinates `(t, u)`.
    Sphere,
}

impl BaseFamily {
    pub fn validate(&self) -> Result<(), ImmersionError> {
        let ok = match *self {
            BaseFamily::GreatCircle | BaseFamily::Sphere => true,
            BaseFamily::SmallCircle { polar } | BaseFamily::UnitSpeedSmallCircle { polar } => {
                polar > 0.0 && polar < PI
            }
            BaseFamily::Ellipse { a, b, d } => a > 0.0 && b > 0.0 && d.is_finite(),
            BaseFamily::TwistedEllipse { a, b, d, e } => {
                a > 0.0 && b > 0.0 && d.is_finite() && e.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("invalid base parameters {self:?}")))
        }
    }

    pub fn chart_dim(&self) -> usize {
        match self {
            BaseFamily::Sphere => 2,
            _ => 1,
        }
    }

    /// Smallest Euclidean space containing the base.
    pub fn embedding_dim(&self) -> usize {
        match self {
            BaseFamily::GreatCircle => 2,
            BaseFamily::TwistedEllipse { .. } => 4,
            _ => 3,
        }
    }

    pub fn domain(&self) -> Vec<Interval> {
        let iv = |a, b| Interval::new(a, b).expect("base interval");
        match *self {
            BaseFamily::UnitSpeedSmallCircle { polar } => vec![iv(0.0, TAU * polar.sin())],
            BaseFamily::Sphere => vec![iv(0.1, PI - 0.1), iv(0.0, TAU)],
            _ => vec![iv(0.0, TAU)],
        }
    }

    pub fn label(&self) -> String {
        match *self {
            BaseFamily::GreatCircle => "circle".into(),
            BaseFamily::SmallCircle { polar } => format!("small_circle(polar={polar})"),
            BaseFamily::UnitSpeedSmallCircle { polar } => {
                format!("unit_speed_small_circle(polar={polar})")
            }
            BaseFamily::Ellipse { a, b, d } => format!("ellipse(a={a}, b={b}, d={d})"),
            BaseFamily::TwistedEllipse { a, b, d, e } => {
                format!("twisted_ellipse(a={a}, b={b}, d={d}, e={e})")
            }
            BaseFamily::Sphere => "sphere".into(),
        }
    }

    /// Components evaluated in jet arithmetic.
    pub fn jets(&self, v: &[Jet]) -> Result<Vec<Jet>, JetError> {
        let u = &v[0];
        Ok(match *self {
            BaseFamily::GreatCircle => vec![u.cos(), u.sin()],
            BaseFamily::SmallCircle { polar } => {
                let (k, z) = polar.sin_cos();
                vec![u.cos().scale(k), u.sin().scale(k), u.constant_like(z)]
            }
            BaseFamily::UnitSpeedSmallCircle { polar } => {
                let (k, z) = polar.sin_cos();
                let a = u.scale(1.0 / k);
                vec![a.cos().scale(k), a.sin().scale(k), u.constant_like(z)]
            }
            BaseFamily::Ellipse { a, b, d } => {
                let (cu, su) = (u.cos(), u.sin());
                let q = (&(&(&cu * &cu).scale(a * a) + &(&su * &su).scale(b * b)) + d * d).sqrt()?;
                vec![
                    cu.scale(a).div(&q)?,
                    su.scale(b).div(&q)?,
                    q.constant_like(d).div(&q)?,
                ]
            }
            BaseFamily::TwistedEllipse { a, b, d, e } => {
                let (cu, su) = (u.cos(), u.sin());
                let c2 = u.scale(2.0).cos();
                let q2 = &(&(&cu * &cu).scale(a * a) + &(&su * &su).scale(b * b))
                    + &(&c2 * &c2).scale(d * d);
                let q = (&q2 + e * e).sqrt()?;
                vec![
                    cu.scale(a).div(&q)?,
                    su.scale(b).div(&q)?,
                    c2.scale(d).div(&q)?,
                    q.constant_like(e).div(&q)?,
                ]
            }
            BaseFamily::Sphere => {
                let (t, w) = (&v[0], &v[1]);
                let st = t.sin();
                vec![&st * &w.cos(), &st * &w.sin(), t.cos()]
            }
        })
    }

    /// Components as expression trees over the given argument expressions.
    pub fn expressions(&self, v: &[Expr]) -> Vec<Expr> {
        use BinOp::{Add, Div, Mul};
        let num = Expr::num;
        let call = |f, e: Expr| Expr::call(f, vec![e]);
        let mul = |a, b| Expr::binary(Mul, a, b);
        let div = |a, b| Expr::binary(Div, a, b);
        let add = |a, b| Expr::binary(Add, a, b);
        let u = v[0].clone();
        match *self {
            BaseFamily::GreatCircle => vec![call(Func::Cos, u.clone()), call(Func::Sin, u)],
            BaseFamily::SmallCircle { polar } => {
                let (k, z) = polar.sin_cos();
                vec![
                    mul(num(k), call(Func::Cos, u.clone())),
                    mul(num(k), call(Func::Sin, u)),
                    num(z),
                ]
            }
            BaseFamily::UnitSpeedSmallCircle { polar } => {
                let (k, z) = polar.sin_cos();
                let a = div(u, num(k));
                vec![
                    mul(num(k), call(Func::Cos, a.clone())),
                    mul(num(k), call(Func::Sin, a)),
                    num(z),
                ]
            }
            BaseFamily::Ellipse { a, b, d } => {
                let cu = call(Func::Cos, u.clone());
                let su = call(Func::Sin, u);
                let q = call(
                    Func::Sqrt,
                    add(
                        add(mul(num(a * a), Expr::pow(cu.clone(), 2.0)), mul(num(b * b), Expr::pow(su.clone(), 2.0))),
                        num(d * d),
                    ),
                );
                vec![
                    div(mul(num(a), cu), q.clone()),
                    div(mul(num(b), su), q.clone()),
                    div(num(d), q),
                ]
            }
            BaseFamily::TwistedEllipse { a, b, d, e } => {
                let cu = call(Func::Cos, u.clone());
                let su = call(Func::Sin, u.clone());
                let c2 = call(Func::Cos, mul(num(2.0), u));
                let q = call(
                    Func::Sqrt,
                    add(
                        add(
                            add(mul(num(a * a), Expr::pow(cu.clone(), 2.0)), mul(num(b * b), Expr::pow(su.clone(), 2.0))),
                            mul(num(d * d), Expr::pow(c2.clone(), 2.0)),
                        ),
                        num(e * e),
                    ),
                );
                vec![
                    div(mul(num(a), cu), q.clone()),
                    div(mul(num(b), su), q.clone()),
                    div(mul(num(d), c2), q.clone()),
                    div(num(e), q),
                ]
            }
            BaseFamily::Sphere => {
                let (t, w) = (v[0].clone(), v[1].clone());
                vec![
                    mul(call(Func::Sin, t.clone()), call(Func::Cos, w.clone())),
                    mul(call(Func::Sin, t.clone()), call(Func::Sin, w)),
                    call(Func::Cos, t),
                ]
            }
        }
    }

    /// The base as an immersion into `E^ambient`, zero-padded.
    pub fn immersion(&self, ambient: usize) -> Result<Immersion, ImmersionError> {
        self.validate()?;
        if ambient < self.embedding_dim() {
            return Err(invalid(format!(
                "base {} needs ambient dimension >= {}, got {ambient}",
                self.label(),
                self.embedding_dim()
            )));
        }
        let family = *self;
        Immersion::from_jet_fn(self.label(), ambient, self.domain(), move |v| {
            let mut z = family.jets(v)?;
            while z.len() < ambient {
                z.push(v[0].constant_like(0.0));
            }
            Ok(z)
        })
    }

    pub fn factor(&self, ambient: usize) -> Result<BaseMetricFactor, ImmersionError> {
        let mut f = BaseMetricFactor::new(self.immersion(ambient)?)?;
        f.family = Some(*self);
        Ok(f)
    }
}

/// An immersion `Y` with `⟨Y, Y⟩ = 1`.
#[derive(Debug, Clone)]
pub struct SphericalFactor {
    imm: Immersion,
}

impl SphericalFactor {
    /// Checks `|⟨Y,Y⟩ − 1| < 1e-10` on the default grid.
    pub fn new(imm: Immersion) -> Result<SphericalFactor, ImmersionError> {
        let defect = unit_norm_defect(&imm, &imm.default_grid())?;
        if defect >= UNIT_NORM_TOL {
            return Err(invalid(format!(
                "{} is not spherical: max |<Y,Y> - 1| = {defect:.3e}",
                imm.label()
            )));
        }
        Ok(SphericalFactor { imm })
    }

    pub fn immersion(&self) -> &Immersion {
        &self.imm
    }
}

/// A regular immersion `Z` of an (n−1)-manifold into the unit sphere of
/// `E^{m−1}`; its induced metric is the `g_F` of the warped product.
#[derive(Debug, Clone)]
pub struct BaseMetricFactor {
    imm: Immersion,
    family: Option<BaseFamily>,
}

impl BaseMetricFactor {
    /// Checks `⟨Z,Z⟩ = 1` and regularity on the default grid.
    pub fn new(imm: Immersion) -> Result<BaseMetricFactor, ImmersionError> {
        let grid = imm.default_grid();
        let defect = unit_norm_defect(&imm, &grid)?;
        if defect >= UNIT_NORM_TOL {
            return Err(invalid(format!(
                "base {} does not lie on the unit sphere: max |<Z,Z> - 1| = {defect:.3e}",
                imm.label()
            )));
        }
        for p in grid.points() {
            imm.check_regularity(&p)?;
        }
        Ok(BaseMetricFactor { imm, family: None })
    }

    pub fn immersion(&self) -> &Immersion {
        &self.imm
    }

    pub fn family(&self) -> Option<BaseFamily> {
        self.family
    }
}

fn check_c_and_range(c: f64, t_range: (f64, f64)) -> Result<(), ImmersionError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid(format!("c must be positive, got {c}")));
    }
    let (t0, t1) = t_range;
    if !(t0 > 0.0 && t1 < FRAC_PI_2 && t0 < t1) {
        return Err(invalid(format!(
            "t range [{t0}, {t1}] must lie strictly inside (0, pi/2)"
        )));
    }
    Ok(())
}

fn s_interval(c: f64, t_range: (f64, f64)) -> Interval {
    Interval::new(c * t_range.0.tan(), c * t_range.1.tan()).expect("tan is increasing")
}

fn warped(
    c: f64,
    base: &BaseMetricFactor,
    t_range: (f64, f64),
    with_radius: bool,
) -> Result<Immersion, ImmersionError> {
    check_c_and_range(c, t_range)?;
    let z = base.immersion().clone();
    let n = z.chart_dim() + 1;
    let m = z.ambient_dim() + 1;
    let mut domain = vec![s_interval(c, t_range)];
    domain.extend_from_slice(z.domain());
    let map: Vec<usize> = (1..n).collect();
    let label = if with_radius {
        format!("rectifying(c={c}, base={}, m={m})", z.label())
    } else {
        format!("spherical_factor(c={c}, base={}, m={m})", z.label())
    };
    Immersion::new(label, m, domain, move |p, order| {
        let s = Jet::variable(0, p[0], n, order)?;
        let t = s.scale(1.0 / c).atan();
        let (cos_t, sin_t) = (t.cos(), t.sin());
        let (first, along) = if with_radius {
            let r = (&(&s * &s) + c * c).sqrt()?;
            (&r * &cos_t, &r * &sin_t)
        } else {
            (cos_t, sin_t)
        };
        let mut x = Vec::with_capacity(m);
        x.push(first);
        for zc in z.evaluate(&p[1..], order)? {
            x.push(&along * &zc.lift(n, &map)?);
        }
        Ok(x)
    })
}

/// `x(s, u) = √(s²+c²) · (cos t · e₀ + sin t · Z(u))`, `t = arctan(s/c)`,
/// over `s ∈ [c tan t₀, c tan t₁]`.
pub fn construct_rectifying(
    c: f64,
    base: &BaseMetricFactor,
    t_range: (f64, f64),
) -> Result<Immersion, ImmersionError> {
    warped(c, base, t_range, true)
}

/// The spherical factor `Y(s, u)` of [`construct_rectifying`] in the same
/// chart.
pub fn spherical_factor(
    c: f64,
    base: &BaseMetricFactor,
    t_range: (f64, f64),
) -> Result<SphericalFactor, ImmersionError> {
    Ok(SphericalFactor {
        imm: warped(c, base, t_range, false)?,
    })
}

/// `x(s) = √(s²+c²) · y(arctan(s/c))` for a unit-speed curve `y` on S².
pub fn construct_rectifying_curve(
    c: f64,
    spherical_curve: &Immersion,
    t_range: (f64, f64),
) -> Result<Immersion, ImmersionError> {
    check_c_and_range(c, t_range)?;
    let y = spherical_curve.clone();
    if y.chart_dim() != 1 || y.ambient_dim() != 3 {
        return Err(invalid("spherical curve must map an interval into E^3"));
    }
    let dom = y.domain()[0];
    if !(dom.contains(t_range.0) && dom.contains(t_range.1)) {
        return Err(invalid(format!(
            "t range [{}, {}] exceeds the curve domain [{}, {}]",
            t_range.0, t_range.1, dom.lo, dom.hi
        )));
    }
    let check = Grid::new(&[Interval::new(t_range.0, t_range.1).unwrap()], &[33], 0.0)
        .expect("valid grid");
    for p in check.points() {
        let jets = y.evaluate(&p, 1)?;
        let norm2: f64 = jets.iter().map(|j| j.value() * j.value()).sum();
        let speed2: f64 = jets.iter().map(|j| j.gradient()[0].powi(2)).sum();
        if (norm2 - 1.0).abs() > CURVE_TOL {
            return Err(invalid(format!(
                "curve is not spherical at t = {}: |y|^2 = {norm2}",
                p[0]
            )));
        }
        if (speed2.sqrt() - 1.0).abs() > CURVE_TOL {
            return Err(invalid(format!(
                "curve is not unit-speed at t = {}: |y'| = {}",
                p[0],
                speed2.sqrt()
            )));
        }
    }
    let label = format!("rectifying_curve(c={c}, y={})", y.label());
    Immersion::new(label, 3, vec![s_interval(c, t_range)], move |p, order| {
        let s = Jet::variable(0, p[0], 1, order)?;
        let t = s.scale(1.0 / c).atan();
        let r = (&(&s * &s) + c * c).sqrt()?;
        y.evaluate(&[t.value()], order)?
            .iter()
            .map(|yc| Ok(&r * &yc.compose(&t)?))
            .collect::<Result<Vec<_>, JetError>>()
            .map_err(Into::into)
    })
}

fn radius_and_angle(c: f64) -> (Expr, Expr) {
    let s = Expr::ident("s");
    let r = Expr::call(
        Func::Sqrt,
        vec![Expr::binary(BinOp::Add, Expr::pow(s.clone(), 2.0), Expr::num(c * c))],
    );
    let t = Expr::call(Func::Atan, vec![Expr::binary(BinOp::Div, s, Expr::num(c))]);
    (r, t)
}

/// `.imm` rendering of [`construct_rectifying`] over a closed-form base
/// padded into `E^{m−1}`.
pub fn rectifying_spec(
    c: f64,
    family: BaseFamily,
    m: usize,
    t_range: (f64, f64),
) -> Result<ImmersionSpec, ImmersionError> {
    check_c_and_range(c, t_range)?;
    family.validate()?;
    if m < family.embedding_dim() + 1 {
        return Err(invalid(format!(
            "base {} needs m >= {}, got {m}",
            family.label(),
            family.embedding_dim() + 1
        )));
    }
    let n = family.chart_dim() + 1;
    let names = default_var_names(n);
    let (r, t) = radius_and_angle(c);
    let mul = |a, b| Expr::binary(BinOp::Mul, a, b);
    let along = mul(r.clone(), Expr::call(Func::Sin, vec![t.clone()]));
    let args: Vec<Expr> = names[1..].iter().map(|v| Expr::ident(v)).collect();
    let mut comps = vec![mul(r, Expr::call(Func::Cos, vec![t]))];
    for z in family.expressions(&args) {
        comps.push(mul(along.clone(), z));
    }
    while comps.len() < m {
        comps.push(Expr::num(0.0));
    }
    let mut domain = vec![s_interval(c, t_range)];
    domain.extend(family.domain());
    ImmersionSpec::new(names, m, vec![], comps, domain).map_err(invalid)
}

/// `.imm` rendering of [`construct_rectifying_curve`] for a closed-form
/// unit-speed spherical curve.
pub fn rectifying_curve_spec(
    c: f64,
    family: BaseFamily,
    t_range: (f64, f64),
) -> Result<ImmersionSpec, ImmersionError> {
    check_c_and_range(c, t_range)?;
    family.validate()?;
    if !matches!(
        family,
        BaseFamily::GreatCircle | BaseFamily::UnitSpeedSmallCircle { .. }
    ) {
        return Err(invalid(format!(
            "{} is not a unit-speed curve on S^2",
            family.label()
        )));
    }
    let (r, t) = radius_and_angle(c);
    let mut comps: Vec<Expr> = family
        .expressions(&[t])
        .into_iter()
        .map(|y| Expr::binary(BinOp::Mul, r.clone(), y))
        .collect();
    while comps.len() < 3 {
        comps.push(Expr::num(0.0));
    }
    ImmersionSpec::new(
        default_var_names(1),
        3,
        vec![],
        comps,
        vec![s_interval(c, t_range)],
    )
    .map_err(invalid)
}

//! Closed-form reference immersions.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use super::construct::{
    construct_rectifying, construct_rectifying_curve, BaseFamily, BaseMetricFactor,
    DEFAULT_T_RANGE,
};
use super::{Immersion, ImmersionError};
use crate::chart::Interval;
use crate::jets::{Jet, JetError};

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).expect("builtin interval")
}

fn invalid(msg: impl Into<String>) -> ImmersionError {
    ImmersionError::InvalidParameter(msg.into())
}

/// `(a cos s, a sin s, b s)`, `s ∈ [0, 2π]`.
pub fn helix(a: f64, b: f64) -> Result<Immersion, ImmersionError> {
    if !(a > 0.0) || !b.is_finite() {
        return Err(invalid(format!("helix needs a > 0 and finite b, got a = {a}, b = {b}")));
    }
    Immersion::from_jet_fn(format!("helix(a={a}, b={b})"), 3, vec![iv(0.0, TAU)], move |v| {
        let s = &v[0];
        Ok(vec![s.cos().scale(a), s.sin().scale(a), s.scale(b)])
    })
}

/// Circle of radius `r` centered at the origin of the plane `z = 0` in E³.
pub fn circle(r: f64) -> Result<Immersion, ImmersionError> {
    if !(r > 0.0) {
        return Err(invalid(format!("circle radius must be positive, got {r}")));
    }
    Immersion::from_jet_fn(format!("circle(r={r})"), 3, vec![iv(0.0, TAU)], move |v| {
        let s = &v[0];
        Ok(vec![s.cos().scale(r), s.sin().scale(r), s.constant_like(0.0)])
    })
}

/// The straight line `(1 + s, 2s, 3 − s)`.
pub fn line() -> Result<Immersion, ImmersionError> {
    Immersion::from_jet_fn("line", 3, vec![iv(0.0, 1.0)], |v| {
        let s = &v[0];
        Ok(vec![s + 1.0, s.scale(2.0), &s.scale(-1.0) + 3.0])
    })
}

/// Round unit n-sphere in hyperspherical coordinates, padded into Eᵐ.
///
/// For n = 2: `(sin t cos u, sin t sin u, cos t)`. In general
/// `Sⁿ(t, rest) = (sin t · Sⁿ⁻¹(rest), cos t)` with `S¹(u) = (cos u, sin u)`.
/// Polar angles range over `[0.1, π − 0.1]`, the last angle over `[0, 2π]`.
pub fn unit_sphere(n: usize, m: usize) -> Result<Immersion, ImmersionError> {
    if n == 0 || m < n + 1 {
        return Err(invalid(format!("unit_sphere needs 1 <= n < m, got n = {n}, m = {m}")));
    }
    let mut domain = vec![iv(0.1, PI - 0.1); n - 1];
    domain.push(iv(0.0, TAU));
    let imm = Immersion::from_jet_fn(format!("unit_sphere(n={n}, m={m})"), m, domain, move |v| {
        let mut x = sphere_coords(v);
        while x.len() < m {
            x.push(v[0].constant_like(0.0));
        }
        Ok(x)
    })?;
    let names = if n == 2 {
        vec!["t".to_string(), "u".to_string()]
    } else {
        (1..=n).map(|i| format!("t{i}")).collect()
    };
    Ok(imm.with_var_names(names))
}

fn sphere_coords(v: &[Jet]) -> Vec<Jet> {
    if v.len() == 1 {
        return vec![v[0].cos(), v[0].sin()];
    }
    let sin_t = v[0].sin();
    let mut out: Vec<Jet> = sphere_coords(&v[1..]).iter().map(|c| &sin_t * c).collect();
    out.push(v[0].cos());
    out
}

/// The cone `s · Z(u)` over a spherical base, `s ∈ [0.5, 2]`.
pub fn cone_over(base: &BaseMetricFactor) -> Result<Immersion, ImmersionError> {
    let z = base.immersion().clone();
    let k = z.chart_dim();
    let n = k + 1;
    let mut domain = vec![iv(0.5, 2.0)];
    domain.extend_from_slice(z.domain());
    let label = format!("cone_over({})", z.label());
    let zz = z.clone();
    let map: Vec<usize> = (1..n).collect();
    Immersion::new(label, z.ambient_dim(), domain, move |p, order| {
        let s = Jet::variable(0, p[0], n, order)?;
        let zj = zz.evaluate(&p[1..], order)?;
        zj.iter()
            .map(|c| Ok(&s * &c.lift(n, &map)?))
            .collect::<Result<Vec<_>, JetError>>()
            .map_err(Into::into)
    })
}

/// The plane `(s, u2, 0)` through the origin.
pub fn plane() -> Result<Immersion, ImmersionError> {
    Immersion::from_jet_fn("plane", 3, vec![iv(-1.0, 1.0), iv(-1.0, 1.0)], |v| {
        Ok(vec![v[0].clone(), v[1].clone(), v[0].constant_like(0.0)])
    })
}

/// Circular cylinder `(r cos s, r sin s, u2)`.
pub fn cylinder(r: f64) -> Result<Immersion, ImmersionError> {
    if !(r > 0.0) {
        return Err(invalid(format!("cylinder radius must be positive, got {r}")));
    }
    Immersion::from_jet_fn(
        format!("cylinder(r={r})"),
        3,
        vec![iv(0.0, TAU), iv(-1.0, 1.0)],
        move |v| Ok(vec![v[0].cos().scale(r), v[0].sin().scale(r), v[1].clone()]),
    )
}

/// Torus of revolution `((R + r cos v) cos u, (R + r cos v) sin u, r sin v)`.
pub fn torus(major: f64, minor: f64) -> Result<Immersion, ImmersionError> {
    if !(minor > 0.0 && major > minor) {
        return Err(invalid(format!(
            "torus needs R > r > 0, got R = {major}, r = {minor}"
        )));
    }
    Immersion::from_jet_fn(
        format!("torus(R={major}, r={minor})"),
        3,
        vec![iv(0.0, TAU), iv(0.0, TAU)],
        move |v| {
            let ring = &v[1].cos().scale(minor) + major;
            Ok(vec![&ring * &v[0].cos(), &ring * &v[0].sin(), v[1].sin().scale(minor)])
        },
    )
}

/// Flat torus `(cos s, sin s, cos u, sin u)/√2` in E⁴.
pub fn clifford_torus() -> Result<Immersion, ImmersionError> {
    let k = std::f64::consts::FRAC_1_SQRT_2;
    Immersion::from_jet_fn(
        "clifford_torus",
        4,
        vec![iv(0.0, TAU), iv(0.0, TAU)],
        move |v| {
            Ok(vec![
                v[0].cos().scale(k),
                v[0].sin().scale(k),
                v[1].cos().scale(k),
                v[1].sin().scale(k),
            ])
        },
    )
}

/// Graph `(s, u2, f(s, u2))` of a function written in jet arithmetic.
pub fn graph(
    label: impl Into<String>,
    domain: [Interval; 2],
    f: impl Fn(&Jet, &Jet) -> Result<Jet, JetError> + Send + Sync + 'static,
) -> Result<Immersion, ImmersionError> {
    let f = Arc::new(f);
    Immersion::from_jet_fn(label, 3, domain.to_vec(), move |v| {
        Ok(vec![v[0].clone(), v[1].clone(), f(&v[0], &v[1])?])
    })
}

/// Saddle `z = s² − u²` over `[0.5, 1.5] × [−0.4, 0.4]`. The patch is kept
/// off the diagonals `|s| = |u|`, where its position happens to be tangent.
pub fn saddle() -> Result<Immersion, ImmersionError> {
    graph(
        "graph(z = s^2 - u^2)",
        [iv(0.5, 1.5), iv(-0.4, 0.4)],
        |s, u| Ok(&(s * s) - &(u * u)),
    )
}

fn parse_params(spec: &str) -> Result<(String, BTreeMap<String, String>), ImmersionError> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim(), r),
        None => (spec.trim(), ""),
    };
    let mut params = BTreeMap::new();
    for kv in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| invalid(format!("expected key=value, got `{kv}`")))?;
        if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(invalid(format!("duplicate parameter `{}`", k.trim())));
        }
    }
    Ok((name.to_string(), params))
}

struct Params {
    name: String,
    map: BTreeMap<String, String>,
}

impl Params {
    fn num(&mut self, key: &str, default: f64) -> Result<f64, ImmersionError> {
        match self.map.remove(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| invalid(format!("{}: `{key}` must be a number, got `{v}`", self.name))),
        }
    }

    fn int(&mut self, key: &str, default: usize) -> Result<usize, ImmersionError> {
        match self.map.remove(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| invalid(format!("{}: `{key}` must be an integer, got `{v}`", self.name))),
        }
    }

    fn text(&mut self, key: &str, default: &str) -> String {
        self.map.remove(key).unwrap_or_else(|| default.to_string())
    }

    fn finish(self) -> Result<(), ImmersionError> {
        match self.map.keys().next() {
            None => Ok(()),
            Some(k) => Err(invalid(format!("{}: unknown parameter `{k}`", self.name))),
        }
    }

    fn base(&mut self, default: &str) -> Result<BaseFamily, ImmersionError> {
        let kind = self.text("base", default);
        let family = match kind.as_str() {
            "circle" | "great_circle" => BaseFamily::GreatCircle,
            "small_circle" => BaseFamily::SmallCircle {
                polar: self.num("polar", std::f64::consts::FRAC_PI_4)?,
            },
            "ellipse" => BaseFamily::Ellipse {
                a: self.num("a", 1.0)?,
                b: self.num("b", 0.6)?,
                d: self.num("d", 0.8)?,
            },
            "twisted_ellipse" => BaseFamily::TwistedEllipse {
                a: self.num("a", 1.0)?,
                b: self.num("b", 0.7)?,
                d: self.num("d", 0.4)?,
                e: self.num("e", 0.9)?,
            },
            "sphere" => BaseFamily::Sphere,
            other => return Err(invalid(format!("unknown base `{other}`"))),
        };
        family.validate()?;
        Ok(family)
    }
}

/// Parses a base family `KIND[:k=v,…]`, e.g. `ellipse:a=1,b=0.5,d=0.8`.
pub fn base_family_by_name(spec: &str) -> Result<BaseFamily, ImmersionError> {
    let (kind, mut map) = parse_params(spec)?;
    if map.contains_key("base") {
        return Err(invalid("base family spec must not contain `base=`"));
    }
    map.insert("base".into(), kind.clone());
    let mut p = Params { name: kind, map };
    let family = p.base("circle")?;
    p.finish()?;
    Ok(family)
}

/// Parses `NAME[:k=v,…]` into a catalog immersion.
///
/// Names: `helix` (a, b), `circle` (r), `line`, `sphere` / `unit_sphere`
/// (n, m), `plane`, `cylinder` (r), `torus` (R, r), `clifford_torus`,
/// `saddle` / `graph`, `cone` (base family keys), `rectifying` (c, base,
/// m, t0, t1 and base keys) and `rectifying_curve` (c, base, polar, t0,
/// t1). Base families: `circle`, `small_circle` (polar), `ellipse`
/// (a, b, d), `twisted_ellipse` (a, b, d, e), `sphere`.
pub fn builtin_by_name(spec: &str) -> Result<Immersion, ImmersionError> {
    let (name, map) = parse_params(spec)?;
    let mut p = Params {
        name: name.clone(),
        map,
    };
    let imm = match name.as_str() {
        "helix" => helix(p.num("a", 3.0)?, p.num("b", 4.0)?)?,
        "circle" => circle(p.num("r", 2.0)?)?,
        "line" => line()?,
        "sphere" | "unit_sphere" => unit_sphere(p.int("n", 2)?, p.int("m", 3)?)?,
        "plane" => plane()?,
        "cylinder" => cylinder(p.num("r", 2.0)?)?,
        "torus" => torus(p.num("R", 2.0)?, p.num("r", 1.0)?)?,
        "clifford_torus" => clifford_torus()?,
        "saddle" | "graph" => saddle()?,
        "cone" => {
            let family = p.base("small_circle")?;
            let m = p.int("m", family.embedding_dim())?;
            cone_over(&family.factor(m)?)?
        }
        "rectifying" => {
            let c = p.num("c", 1.0)?;
            let family = p.base("circle")?;
            let m = p.int("m", family.embedding_dim() + 1)?;
            let t0 = p.num("t0", DEFAULT_T_RANGE.0)?;
            let t1 = p.num("t1", DEFAULT_T_RANGE.1)?;
            let base = family.factor(m.saturating_sub(1))?;
            construct_rectifying(c, &base, (t0, t1))?
        }
        "rectifying_curve" => {
            let c = p.num("c", 1.0)?;
            let kind = p.text("base", "small_circle");
            let family = match kind.as_str() {
                "circle" | "great_circle" => BaseFamily::GreatCircle,
                "small_circle" => BaseFamily::UnitSpeedSmallCircle {
                    polar: p.num("polar", std::f64::consts::FRAC_PI_4)?,
                },
                other => return Err(invalid(format!("unknown spherical curve `{other}`"))),
            };
            let t0 = p.num("t0", DEFAULT_T_RANGE.0)?;
            let t1 = p.num("t1", DEFAULT_T_RANGE.1)?;
            let y = family.factor(3)?;
            construct_rectifying_curve(c, y.immersion(), (t0, t1))?
        }
        other => return Err(invalid(format!("unknown builtin `{other}`"))),
    };
    p.finish()?;
    Ok(imm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn sphere_equator_point() {
        let s = unit_sphere(2, 3).unwrap();
        let x = s.position(&[FRAC_PI_2, 0.0]).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn higher_spheres_have_unit_norm() {
        let s = unit_sphere(3, 5).unwrap();
        let x = s.position(&[0.4, 1.1, 2.5]).unwrap();
        let n2: f64 = x.iter().map(|v| v * v).sum();
        assert_abs_diff_eq!(n2, 1.0, epsilon = 1e-15);
        assert_eq!(x[4], 0.0);
    }

    #[test]
    fn helix_speed_is_five() {
        let h = helix(3.0, 4.0).unwrap();
        for s in [0.0, 0.7, 2.0, 5.5] {
            let j = h.jacobian(&[s]).unwrap();
            assert_abs_diff_eq!(j.norm(), 5.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn cone_over_small_circle() {
        let cone = builtin_by_name("cone").unwrap();
        let (s, u) = (1.3, 0.4);
        let x = cone.position(&[s, u]).unwrap();
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let want = [s * k * u.cos(), s * k * u.sin(), s * k];
        for i in 0..3 {
            assert_abs_diff_eq!(x[i], want[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(helix(-1.0, 1.0).is_err());
        assert!(unit_sphere(2, 2).is_err());
        assert!(torus(1.0, 2.0).is_err());
        assert!(builtin_by_name("helix:a=x").is_err());
        assert!(builtin_by_name("helix:q=1").is_err());
        assert!(builtin_by_name("nope").is_err());
        assert!(builtin_by_name("rectifying:c=-1").is_err());
        assert!(base_family_by_name("ellipse:q=2").is_err());
        assert!(base_family_by_name("blob").is_err());
    }

    #[test]
    fn base_family_specs() {
        assert_eq!(base_family_by_name("circle").unwrap(), BaseFamily::GreatCircle);
        assert_eq!(
            base_family_by_name("ellipse:a=2").unwrap(),
            BaseFamily::Ellipse { a: 2.0, b: 0.6, d: 0.8 }
        );
    }
}

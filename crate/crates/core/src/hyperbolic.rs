//! Exact primitives of the Poincaré ball model.
//!
//! Points live in the open Euclidean unit ball. The hyperbolic metric is
//!
//! ```text
//! d(u, v) = arcosh(1 + 2|u - v|^2 / ((1 - |u|^2)(1 - |v|^2)))
//!         = 2 log((|u - v| + sqrt(|u|^2 |v|^2 - 2 u.v + 1)) / sqrt((1 - |u|^2)(1 - |v|^2)))
//! ```
//!
//! and the log form is the one used everywhere; the arcosh form is kept for
//! cross-checking. Every quantity of the form `1 - |x|^2` is evaluated as
//! `(1 - |x|)(1 + |x|)` from the cached norm, so that distances computed
//! through different formulas see the same rounding of the boundary defect.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Largest admissible Euclidean norm of a [`BallPoint`].
///
/// Corresponds to a hyperbolic distance from the origin of about 28.3.
pub const MAX_NORM: f64 = 1.0 - 1e-12;

/// `log 3`, the hyperbolicity constant of the ball model.
pub const LOG3: f64 = 1.098_612_288_668_109_8;

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `1 - r^2` computed as `(1 - r)(1 + r)`.
#[inline]
pub(crate) fn defect(r: f64) -> f64 {
    (1.0 - r) * (1.0 + r)
}

/// A point of the open unit ball.
#[derive(Clone, PartialEq)]
pub struct BallPoint {
    coords: Box<[f64]>,
    norm: f64,
}

impl BallPoint {
    /// Builds a point, rejecting non-finite coordinates and norms above
    /// [`MAX_NORM`].
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("zero-dimensional point".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate in {coords:?}")));
        }
        let n = norm(&coords);
        if n > MAX_NORM {
            return Err(Error::Domain(format!("norm {n} exceeds the boundary guard {MAX_NORM}")));
        }
        Ok(BallPoint {
            coords: coords.into_boxed_slice(),
            norm: n,
        })
    }

    pub fn origin(dim: usize) -> Self {
        assert!(dim > 0, "zero-dimensional origin");
        BallPoint {
            coords: vec![0.0; dim].into_boxed_slice(),
            norm: 0.0,
        }
    }

    /// The point at hyperbolic distance `radius` from the origin in the
    /// direction of `direction` (normalized here).
    pub fn from_polar(direction: &[f64], radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::Range {
                what: "radius",
                value: radius,
                range: "[0, inf)".into(),
            });
        }
        let len = norm(direction);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::Domain("zero direction".into()));
        }
        let r = euclidean_radius_of(radius);
        BallPoint::new(direction.iter().map(|x| x / len * r).collect())
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Euclidean norm.
    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm
    }

    #[inline]
    pub fn is_origin(&self) -> bool {
        self.norm == 0.0
    }

    /// The point with every coordinate negated.
    pub fn negated(&self) -> BallPoint {
        BallPoint {
            coords: self.coords.iter().map(|c| -c).collect(),
            norm: self.norm,
        }
    }

    #[inline]
    pub(crate) fn defect(&self) -> f64 {
        defect(self.norm)
    }
}

impl fmt::Debug for BallPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BallPoint{:?}", self.coords)
    }
}

/// Hyperbolic distance, log form.
///
/// Panics if the dimensions differ.
pub fn dist_h(u: &BallPoint, v: &BallPoint) -> f64 {
    assert_eq!(u.dim(), v.dim(), "dimension mismatch");
    let a2 = dist_sq(&u.coords, &v.coords);
    if a2 == 0.0 {
        return 0.0;
    }
    log_form(a2.sqrt(), (u.defect() * v.defect()).sqrt())
}

/// `2 log((a + sqrt(a^2 + den^2)) / den)`, evaluated through `ln_1p`.
///
/// `a^2 + den^2` equals `|u|^2 |v|^2 - 2 u.v + 1`.
#[inline]
fn log_form(a: f64, den: f64) -> f64 {
    let s = (a * a + den * den).sqrt();
    let x = (a + a * a / (s + den)) / den;
    2.0 * x.ln_1p()
}

/// Hyperbolic distance, arcosh form. Used as an independent cross-check.
pub fn dist_h_arcosh(u: &BallPoint, v: &BallPoint) -> f64 {
    assert_eq!(u.dim(), v.dim(), "dimension mismatch");
    let a2 = dist_sq(&u.coords, &v.coords);
    let t = 2.0 * a2 / (u.defect() * v.defect());
    // arcosh(1 + t) without forming 1 + t
    (t + (t * (t + 2.0)).sqrt()).ln_1p()
}

/// Hyperbolic distance from the origin, `log((1 + r)/(1 - r))`.
pub fn dist_origin(v: &BallPoint) -> f64 {
    let r = v.norm;
    (2.0 * r / (1.0 - r)).ln_1p()
}

/// Euclidean norm of a point at hyperbolic distance `hyperbolic_radius`
/// from the origin.
pub fn euclidean_radius_of(hyperbolic_radius: f64) -> f64 {
    (hyperbolic_radius / 2.0).tanh()
}

/// Which way a [`Translation`] maps points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// The translation sending the origin to `h`.
    Forward,
    /// Its inverse, sending `h` to the origin.
    Inverse,
}

/// Hyperbolic translation along the geodesic through the origin and `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    h: BallPoint,
    direction: Direction,
}

impl Translation {
    /// The translation sending the origin to `h`.
    pub fn forward(h: BallPoint) -> Self {
        Translation {
            h,
            direction: Direction::Forward,
        }
    }

    /// The translation sending `h` to the origin, realized as the forward
    /// translation by `-h`. The defining property is checked on construction.
    pub fn inverse(h: BallPoint) -> Result<Self> {
        let t = Translation {
            h,
            direction: Direction::Inverse,
        };
        let image = t.apply_raw(t.h.coords());
        let n = norm(&image);
        if !(n <= 1e-9) {
            return Err(Error::Numeric(format!(
                "inverse translation does not send h to the origin (|image| = {n})"
            )));
        }
        Ok(t)
    }

    pub fn identity(dim: usize) -> Self {
        Translation::forward(BallPoint::origin(dim))
    }

    pub fn parameter(&self) -> &BallPoint {
        &self.h
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn is_identity(&self) -> bool {
        self.h.is_origin()
    }

    /// The translation undoing this one.
    pub fn reversed(&self) -> Translation {
        Translation {
            h: self.h.clone(),
            direction: match self.direction {
                Direction::Forward => Direction::Inverse,
                Direction::Inverse => Direction::Forward,
            },
        }
    }

    pub fn apply(&self, u: &BallPoint) -> Result<BallPoint> {
        assert_eq!(u.dim(), self.h.dim(), "dimension mismatch");
        BallPoint::new(self.apply_raw(u.coords()))
    }

    /// Unchecked image of a coordinate vector. The result may round onto or
    /// past the unit sphere when the image is farther than the guard allows.
    pub(crate) fn apply_raw(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        let sign = match self.direction {
            Direction::Forward => 1.0,
            Direction::Inverse => -1.0,
        };
        translate_into(self.h.coords(), sign, self.h.defect(), u, &mut out);
        out
    }
}

/// Writes `tau_{sign * h}(u)` into `out`.
///
/// Uses `|u|^2 + 2<u,h> + 1 = |u + h|^2 + (1 - |h|^2)` and
/// `|h|^2 |u|^2 + 2<u,h> + 1 = |u + h|^2 + (1 - |u|^2)(1 - |h|^2)`, which
/// stay accurate when `u` is close to `-h`.
#[inline]
pub(crate) fn translate_into(h: &[f64], sign: f64, h_defect: f64, u: &[f64], out: &mut [f64]) {
    let sum_sq: f64 = u.iter().zip(h).map(|(x, y)| (x + sign * y).powi(2)).sum();
    let u_defect = defect(norm(u));
    let coef = sum_sq + h_defect;
    let den = sum_sq + u_defect * h_defect;
    for ((o, x), y) in out.iter_mut().zip(u).zip(h) {
        *o = (h_defect * x + coef * sign * y) / den;
    }
}

/// Unit vector at the origin pointing to the image of `target` once `base`
/// has been translated to the origin. Only the numerator of the translation
/// is needed, so this stays accurate for arbitrarily distant targets.
pub(crate) fn direction_from(base: &BallPoint, target: &BallPoint) -> Vec<f64> {
    direction_between(base.coords(), base.defect(), target.coords())
}

pub(crate) fn direction_between(base: &[f64], base_defect: f64, target: &[f64]) -> Vec<f64> {
    let coef = dist_sq(target, base) + base_defect;
    let mut v: Vec<f64> = target
        .iter()
        .zip(base)
        .map(|(t, b)| base_defect * t - coef * b)
        .collect();
    let len = norm(&v);
    for x in &mut v {
        *x /= len;
    }
    v
}

/// Moves from `base` toward `target` by hyperbolic arc length `s`.
fn walk(base: &BallPoint, target: &BallPoint, s: f64) -> Result<BallPoint> {
    let dir = direction_from(base, target);
    let r = euclidean_radius_of(s);
    let local: Vec<f64> = dir.iter().map(|x| x * r).collect();
    let mut out = vec![0.0; local.len()];
    translate_into(base.coords(), 1.0, base.defect(), &local, &mut out);
    BallPoint::new(out)
}

/// The point of the geodesic `[a, b]` at hyperbolic distance `s` from `a`.
///
/// `a` is translated to the origin, where the geodesic is a Euclidean
/// segment, and the walked point is translated back.
pub fn geodesic_point(a: &BallPoint, b: &BallPoint, s: f64) -> Result<BallPoint> {
    let d = dist_h(a, b);
    geodesic_point_with_length(a, b, d, s)
}

fn geodesic_point_with_length(a: &BallPoint, b: &BallPoint, d: f64, s: f64) -> Result<BallPoint> {
    let slack = 1e-12 * d.max(1.0);
    if !(s >= -slack && s <= d + slack) {
        return Err(Error::Range {
            what: "arc length",
            value: s,
            range: format!("[0, {d}]"),
        });
    }
    let s = s.clamp(0.0, d);
    if s == 0.0 {
        return Ok(a.clone());
    }
    if s == d {
        return Ok(b.clone());
    }
    // walk from the nearer endpoint
    if s <= d / 2.0 {
        walk(a, b, s)
    } else {
        walk(b, a, d - s)
    }
}

/// Midpoint of the geodesic `[a, b]`.
pub fn midpoint(a: &BallPoint, b: &BallPoint) -> Result<BallPoint> {
    let d = dist_h(a, b);
    geodesic_point_with_length(a, b, d, d / 2.0)
}

/// A geodesic segment with its precomputed hyperbolic length.
#[derive(Debug, Clone)]
pub struct GeodesicParam {
    a: BallPoint,
    b: BallPoint,
    length: f64,
}

impl GeodesicParam {
    pub fn new(a: BallPoint, b: BallPoint) -> Self {
        let length = dist_h(&a, &b);
        GeodesicParam { a, b, length }
    }

    pub fn start(&self) -> &BallPoint {
        &self.a
    }

    pub fn end(&self) -> &BallPoint {
        &self.b
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn point_at(&self, s: f64) -> Result<BallPoint> {
        geodesic_point_with_length(&self.a, &self.b, self.length, s)
    }

    pub fn midpoint(&self) -> Result<BallPoint> {
        self.point_at(self.length / 2.0)
    }

    /// Hyperbolic distance from the origin to the segment.
    ///
    /// The distance to a point is convex along a geodesic, so a
    /// golden-section search on the arc length converges to the minimum.
    pub fn distance_to_origin(&self) -> f64 {
        let f = |s: f64| self.point_at(s).map(|p| dist_origin(&p)).unwrap_or(f64::INFINITY);
        let ends = dist_origin(&self.a).min(dist_origin(&self.b));
        if self.length == 0.0 {
            return ends;
        }
        let (_, best) = golden_section_min(f, 0.0, self.length, 1e-10);
        best.min(ends)
    }
}

/// Golden-section search for the minimum of a unimodal function on `[lo, hi]`.
/// Returns the minimizing argument and the minimum value.
pub(crate) fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let scale = tol * (hi - lo).abs().max(1.0);
    for _ in 0..200 {
        if (b - a).abs() <= scale {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Hyperbolic distance from the origin to the geodesic segment `[a, b]`.
pub fn geodesic_distance_to_origin(a: &BallPoint, b: &BallPoint) -> f64 {
    GeodesicParam::new(a.clone(), b.clone()).distance_to_origin()
}

/// The Euclidean angle at the origin between `u` and `v`, in `[0, pi]`.
pub fn angle_at_origin(u: &BallPoint, v: &BallPoint) -> Result<f64> {
    if u.is_origin() || v.is_origin() {
        return Err(Error::Domain("angle at the origin is undefined for the origin".into()));
    }
    Ok(unit_angle(u.coords(), u.norm(), v.coords(), v.norm()))
}

/// `2 atan2(|a - b|, |a + b|)` on normalized vectors; accurate near 0 and pi.
pub(crate) fn unit_angle(u: &[f64], nu: f64, v: &[f64], nv: f64) -> f64 {
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (x, y) in u.iter().zip(v) {
        let (a, b) = (x / nu, y / nv);
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    let angle = 2.0 * diff.sqrt().atan2(sum.sqrt());
    angle.clamp(0.0, PI)
}

/// Gromov product `(u | v)_t`.
pub fn gromov_product(u: &BallPoint, v: &BallPoint, t: &BallPoint) -> f64 {
    0.5 * (dist_h(u, t) + dist_h(v, t) - dist_h(u, v))
}

//! Exact geometry of the Poincaré half-plane model of the hyperbolic plane.
//!
//! Points live in the open upper half-plane `y > 0`. Complete geodesics are
//! either vertical rays `x = x0` or semicircles centred on the boundary axis.
//! Every geodesic carries a unit-speed ruler:
//!
//! * `Vertical { x0 }`: `s ↦ (x0, eˢ)`
//! * `Arc { center, radius }`: `s ↦ (center + radius·tanh s, radius / cosh s)`
//!
//! so that `dist_h2(g.point_at(s), g.point_at(t)) = |s - t|` holds exactly in
//! real arithmetic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used to decide whether a candidate point lies on a segment.
pub const SEGMENT_TOL: f64 = 1e-9;

/// A point of the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::OutsideHalfPlane { x, y });
        }
        Ok(Self { x, y })
    }

    /// Builds a point without validation. The caller guarantees `y > 0`.
    pub const fn new_unchecked(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn validate(&self) -> Result<()> {
        if !(self.y > 0.0) || !self.x.is_finite() || !self.y.is_finite() {
            return Err(Error::OutsideHalfPlane { x: self.x, y: self.y });
        }
        Ok(())
    }
}

/// A complete hyperbolic line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Geodesic {
    Vertical { x0: f64 },
    Arc { center: f64, radius: f64 },
}

impl Geodesic {
    /// Evaluates the unit-speed ruler at `s`.
    pub fn point_at(&self, s: f64) -> HPoint {
        match *self {
            Geodesic::Vertical { x0 } => HPoint::new_unchecked(x0, s.exp()),
            Geodesic::Arc { center, radius } => {
                HPoint::new_unchecked(center + radius * s.tanh(), radius / s.cosh())
            }
        }
    }

    /// Ruler coordinate of the point of this geodesic nearest to `p`.
    ///
    /// For points on the geodesic this is the exact ruler coordinate.
    pub fn foot_parameter(&self, p: &HPoint) -> f64 {
        match *self {
            Geodesic::Vertical { x0 } => (p.x - x0).hypot(p.y).ln(),
            Geodesic::Arc { center, radius } => {
                let u = p.x - center;
                let excess = u * u + p.y * p.y - radius * radius;
                (2.0 * u * radius / excess.hypot(2.0 * radius * p.y)).asinh()
            }
        }
    }

    /// Closed-form hyperbolic distance from `p` to this geodesic.
    pub fn distance_to(&self, p: &HPoint) -> f64 {
        match *self {
            Geodesic::Vertical { x0 } => ((p.x - x0).abs() / p.y).asinh(),
            Geodesic::Arc { center, radius } => {
                let u = p.x - center;
                let excess = u * u + p.y * p.y - radius * radius;
                (excess.abs() / (2.0 * radius * p.y)).asinh()
            }
        }
    }

    /// True when `p` satisfies the Euclidean equation of the geodesic within `tol`.
    pub fn contains(&self, p: &HPoint, tol: f64) -> bool {
        match *self {
            Geodesic::Vertical { x0 } => (p.x - x0).abs() <= tol,
            Geodesic::Arc { center, radius } => {
                ((p.x - center).powi(2) + p.y * p.y - radius * radius).abs() <= tol
            }
        }
    }

    /// Compares two geodesics: same kind and parameters equal within `tol`
    /// relative to `max(1, |value|)`.
    pub fn approx_eq(&self, other: &Geodesic, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs());
        match (*self, *other) {
            (Geodesic::Vertical { x0: a }, Geodesic::Vertical { x0: b }) => close(a, b),
            (
                Geodesic::Arc { center: c1, radius: r1 },
                Geodesic::Arc { center: c2, radius: r2 },
            ) => close(c1, c2) && close(r1, r2),
            _ => false,
        }
    }
}

/// Hyperbolic distance in the half-plane model.
///
/// Evaluated as `2·asinh(|a - b| / (2·sqrt(a.y·b.y)))`, which is algebraically
/// identical to `2·ln((|a - b| + |a - b̄|) / (2·sqrt(a.y·b.y)))` but does not
/// lose precision for nearby points.
pub fn dist_h2(a: &HPoint, b: &HPoint) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    Ok(dist_unchecked(a, b))
}

#[inline]
pub(crate) fn dist_unchecked(a: &HPoint, b: &HPoint) -> f64 {
    let chord = (a.x - b.x).hypot(a.y - b.y);
    2.0 * (chord / (2.0 * (a.y * b.y).sqrt())).asinh()
}

fn same_vertical(a: &HPoint, b: &HPoint) -> bool {
    (a.x - b.x).abs() <= 1e-12 * 1f64.max(a.x.abs()).max(b.x.abs())
}

/// The unique geodesic through two distinct points.
pub fn geodesic_through(a: &HPoint, b: &HPoint) -> Result<Geodesic> {
    a.validate()?;
    b.validate()?;
    if a == b {
        return Err(Error::CoincidentPoints);
    }
    if same_vertical(a, b) {
        if a.y == b.y {
            return Err(Error::CoincidentPoints);
        }
        return Ok(Geodesic::Vertical { x0: 0.5 * (a.x + b.x) });
    }
    // Centre equidistant from a and b on the boundary axis.
    let center = 0.5 * (a.x + b.x) + (b.y - a.y) * (b.y + a.y) / (2.0 * (b.x - a.x));
    let radius = (a.x - center).hypot(a.y);
    Ok(Geodesic::Arc { center, radius })
}

/// Standard parametrization of the segment `[a, b]` with its ruler coordinates.
#[derive(Debug, Clone, Copy)]
pub struct H2Segment {
    pub a: HPoint,
    pub b: HPoint,
    pub line: Geodesic,
    pub s_a: f64,
    pub s_b: f64,
}

impl H2Segment {
    pub fn new(a: &HPoint, b: &HPoint) -> Result<Self> {
        let line = geodesic_through(a, b)?;
        Ok(Self {
            a: *a,
            b: *b,
            line,
            s_a: ruler_coordinate(&line, a),
            s_b: ruler_coordinate(&line, b),
        })
    }

    /// Point at standard parameter `t`; `t` outside `[0, 1]` runs along the full line.
    pub fn at(&self, t: f64) -> HPoint {
        if t == 0.0 {
            self.a
        } else if t == 1.0 {
            self.b
        } else {
            self.line.point_at((1.0 - t) * self.s_a + t * self.s_b)
        }
    }

    pub fn length(&self) -> f64 {
        (self.s_b - self.s_a).abs()
    }
}

/// Ruler coordinate of a point known to lie on `line`.
pub(crate) fn ruler_coordinate(line: &Geodesic, p: &HPoint) -> f64 {
    match *line {
        Geodesic::Vertical { .. } => p.y.ln(),
        Geodesic::Arc { center, .. } => ((p.x - center) / p.y).asinh(),
    }
}

/// Point of the segment `[a, b]` at standard parameter `t`.
pub fn geod_h2(a: &HPoint, b: &HPoint, t: f64) -> Result<HPoint> {
    Ok(H2Segment::new(a, b)?.at(t))
}

/// Strict betweenness `(a p b)`: pairwise distinct, collinear, and
/// `d(a,b) = d(a,p) + d(p,b)`, each test within `tol`.
pub fn is_between(a: &HPoint, p: &HPoint, b: &HPoint, tol: f64) -> bool {
    if a.validate().is_err() || p.validate().is_err() || b.validate().is_err() {
        return false;
    }
    let (dap, dpb, dab) = (dist_unchecked(a, p), dist_unchecked(p, b), dist_unchecked(a, b));
    if dap <= tol || dpb <= tol || dab <= tol {
        return false;
    }
    let Ok(line) = geodesic_through(a, b) else {
        return false;
    };
    line.distance_to(p) <= tol && (dab - dap - dpb).abs() <= tol
}

/// Membership in the closed segment `[a, b]`.
pub fn on_segment(a: &HPoint, p: &HPoint, b: &HPoint, tol: f64) -> bool {
    dist_unchecked(a, p) <= tol || dist_unchecked(p, b) <= tol || is_between(a, p, b, tol)
}

/// Outcome of intersecting two hyperbolic segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentIntersection {
    Point(HPoint),
    Disjoint,
    /// The segments share a sub-segment of positive length.
    Overlap,
}

impl SegmentIntersection {
    pub fn point(&self) -> Option<HPoint> {
        match self {
            SegmentIntersection::Point(p) => Some(*p),
            _ => None,
        }
    }
}

/// Common point of the segments `[a, b]` and `[c, d]`.
pub fn segment_intersection(
    a: &HPoint,
    b: &HPoint,
    c: &HPoint,
    d: &HPoint,
) -> Result<SegmentIntersection> {
    let first = geodesic_through(a, b)?;
    let second = geodesic_through(c, d)?;

    if first.approx_eq(&second, 1e-12) {
        return Ok(collinear_overlap(&first, a, b, c, d));
    }

    let candidate = match (first, second) {
        (Geodesic::Vertical { .. }, Geodesic::Vertical { .. }) => None,
        (Geodesic::Vertical { x0 }, Geodesic::Arc { center, radius })
        | (Geodesic::Arc { center, radius }, Geodesic::Vertical { x0 }) => {
            let y2 = radius * radius - (x0 - center).powi(2);
            (y2 > 0.0).then(|| HPoint::new_unchecked(x0, y2.sqrt()))
        }
        (
            Geodesic::Arc { center: m1, radius: r1 },
            Geodesic::Arc { center: m2, radius: r2 },
        ) => {
            if (m1 - m2).abs() <= 1e-12 * 1f64.max(m1.abs()) {
                // Concentric circles with different radii never meet.
                None
            } else {
                // Radical line of the two circles. Boundary-centred circles can
                // only be tangent on the boundary axis, which is not in H².
                let x = 0.5 * (m1 + m2) + (r1 * r1 - r2 * r2) / (2.0 * (m2 - m1));
                let y2 = r1 * r1 - (x - m1).powi(2);
                (y2 > 0.0).then(|| HPoint::new_unchecked(x, y2.sqrt()))
            }
        }
    };

    Ok(match candidate {
        Some(p) if on_segment(a, &p, b, SEGMENT_TOL) && on_segment(c, &p, d, SEGMENT_TOL) => {
            SegmentIntersection::Point(p)
        }
        _ => SegmentIntersection::Disjoint,
    })
}

fn collinear_overlap(
    line: &Geodesic,
    a: &HPoint,
    b: &HPoint,
    c: &HPoint,
    d: &HPoint,
) -> SegmentIntersection {
    let coord = |p: &HPoint| ruler_coordinate(line, p);
    let (sa, sb, sc, sd) = (coord(a), coord(b), coord(c), coord(d));
    let lo = sa.min(sb).max(sc.min(sd));
    let hi = sa.max(sb).min(sc.max(sd));
    if hi - lo > SEGMENT_TOL {
        SegmentIntersection::Overlap
    } else if (hi - lo).abs() <= SEGMENT_TOL {
        // Touching at a shared endpoint.
        let touch = [a, b]
            .into_iter()
            .find(|p| (coord(p) - lo).abs() <= SEGMENT_TOL)
            .copied()
            .unwrap_or_else(|| line.point_at(lo));
        SegmentIntersection::Point(touch)
    } else {
        SegmentIntersection::Disjoint
    }
}

/// Infimum of `dist_h2(p, g(s))` over the geodesic, in closed form.
pub fn point_to_geodesic_distance(p: &HPoint, g: &Geodesic) -> f64 {
    g.distance_to(p)
}

/// Numeric reference for [`point_to_geodesic_distance`]: ternary search on
/// the ruler coordinate, relying on unimodality of the distance along a
/// geodesic.
pub fn point_to_geodesic_distance_numeric(p: &HPoint, g: &Geodesic) -> f64 {
    let f = |s: f64| dist_unchecked(p, &g.point_at(s));
    // Bracket the minimum around a coarse scan.
    let mut best = 0.0;
    let mut best_val = f(0.0);
    let mut s = -40.0;
    while s <= 40.0 {
        let v = f(s);
        if v < best_val {
            best_val = v;
            best = s;
        }
        s += 0.25;
    }
    let (mut lo, mut hi) = (best - 0.25, best + 0.25);
    while hi - lo > 1e-10 * 1f64.max(best.abs()) {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    f(0.5 * (lo + hi))
}

/// A point of the Beltrami–Klein disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KleinPoint {
    pub u: f64,
    pub v: f64,
}

impl KleinPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(u * u + v * v < 1.0) {
            return Err(Error::OutsideDisk { u, v });
        }
        Ok(Self { u, v })
    }
}

/// Half-plane → Klein disk: Cayley map `w = (z - i)/(z + i)` followed by
/// `k = 2w / (1 + |w|²)`, written out in closed form.
pub fn to_klein(p: &HPoint) -> Result<KleinPoint> {
    p.validate()?;
    let r2 = p.x * p.x + p.y * p.y;
    let denom = r2 + 1.0;
    // Closed form never yields -0.0 noise for the centre.
    let v = -2.0 * p.x / denom;
    Ok(KleinPoint { u: (r2 - 1.0) / denom, v: if v == 0.0 { 0.0 } else { v } })
}

/// Inverse of [`to_klein`].
pub fn from_klein(k: &KleinPoint) -> Result<HPoint> {
    let norm2 = k.u * k.u + k.v * k.v;
    if !(norm2 < 1.0) {
        return Err(Error::OutsideDisk { u: k.u, v: k.v });
    }
    let w = Complex64::new(k.u, k.v) / (1.0 + (1.0 - norm2).sqrt());
    let z = Complex64::i() * (1.0 + w) / (1.0 - w);
    HPoint::new(z.re, z.im)
}

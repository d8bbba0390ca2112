//! Geodesic spaces: a metric, lines carrying unit-speed rulers, and the
//! standard parametrization of segments.
//!
//! [`GeodesicSpace`] is the interface every algorithm in the crate is written
//! against. The hyperbolic plane, Euclidean spaces of small dimension and
//! vertical extensions of any of these implement it.

use std::fmt::Debug;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geom_h2::{self, Geodesic, H2Segment, HPoint};

/// Largest chart dimension a space may report.
pub const MAX_CHART_DIM: usize = 4;

/// Chart coordinates. Entries past [`GeodesicSpace::chart_dim`] are zero.
pub type Chart = [f64; MAX_CHART_DIM];

/// Standard parametrization of a segment `[a, b]`: `at(0) = a`, `at(1) = b`.
pub trait Segment<P> {
    fn at(&self, t: f64) -> P;
}

pub trait GeodesicSpace: Sync {
    type Point: Copy + PartialEq + Debug + Send + Sync;
    type Line: Clone + Debug + Send + Sync;
    type Segment: Segment<Self::Point> + Send + Sync;

    /// Short identifier, e.g. `h2`, `e2`, `h2xr`.
    fn id(&self) -> String;

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// Standard parametrization of `[a, b]`. Fails for coincident points.
    fn segment(&self, a: &Self::Point, b: &Self::Point) -> Result<Self::Segment>;

    fn geod(&self, a: &Self::Point, b: &Self::Point, t: f64) -> Result<Self::Point> {
        Ok(self.segment(a, b)?.at(t))
    }

    fn line_through(&self, _a: &Self::Point, _b: &Self::Point) -> Result<Self::Line> {
        Err(Error::UnsupportedSpace(self.id()))
    }

    /// Point of `line` at ruler coordinate `s`.
    fn line_point(&self, line: &Self::Line, s: f64) -> Self::Point;

    /// Ruler coordinate of a point of `line` near `p`; exact when `p` lies on the line.
    fn line_coordinate(&self, line: &Self::Line, p: &Self::Point) -> f64;

    fn lines_equal(&self, a: &Self::Line, b: &Self::Line, tol: f64) -> bool;

    fn chart_dim(&self) -> usize;

    fn chart(&self, p: &Self::Point) -> Chart;

    /// Chart-coordinate box containing the closed metric ball of radius `r` around `p`.
    fn chart_ball_bounds(&self, p: &Self::Point, r: f64) -> (Chart, Chart);

    /// Draws a point from the space's test region.
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;

    /// Distance below which two points count as equal.
    fn equality_tolerance(&self) -> f64 {
        1e-12
    }

    /// Distance from `p` to the point of `line` at `line_coordinate(line, p)`.
    /// Zero iff `p` is on the line; never less than the true distance to the line.
    fn distance_to_line(&self, line: &Self::Line, p: &Self::Point) -> f64 {
        let s = self.line_coordinate(line, p);
        self.dist(p, &self.line_point(line, s))
    }

    /// Strict betweenness `(a p b)` within `tol`.
    fn is_between(&self, a: &Self::Point, p: &Self::Point, b: &Self::Point, tol: f64) -> bool {
        let (dap, dpb, dab) = (self.dist(a, p), self.dist(p, b), self.dist(a, b));
        if dap <= tol || dpb <= tol || dab <= tol {
            return false;
        }
        let Ok(line) = self.line_through(a, b) else {
            return false;
        };
        self.distance_to_line(&line, p) <= tol && (dab - dap - dpb).abs() <= tol
    }

    /// Membership in the closed segment `[a, b]` within `tol`.
    fn on_segment(&self, a: &Self::Point, p: &Self::Point, b: &Self::Point, tol: f64) -> bool {
        self.dist(a, p) <= tol || self.dist(p, b) <= tol || self.is_between(a, p, b, tol)
    }
}

/// The Poincaré half-plane.
#[derive(Debug, Clone, Copy, Default)]
pub struct HyperbolicPlane;

impl GeodesicSpace for HyperbolicPlane {
    type Point = HPoint;
    type Line = Geodesic;
    type Segment = H2Segment;

    fn id(&self) -> String {
        "h2".into()
    }

    fn dist(&self, a: &HPoint, b: &HPoint) -> f64 {
        geom_h2::dist_unchecked(a, b)
    }

    fn segment(&self, a: &HPoint, b: &HPoint) -> Result<H2Segment> {
        H2Segment::new(a, b)
    }

    fn line_through(&self, a: &HPoint, b: &HPoint) -> Result<Geodesic> {
        geom_h2::geodesic_through(a, b)
    }

    fn line_point(&self, line: &Geodesic, s: f64) -> HPoint {
        line.point_at(s)
    }

    fn line_coordinate(&self, line: &Geodesic, p: &HPoint) -> f64 {
        line.foot_parameter(p)
    }

    fn lines_equal(&self, a: &Geodesic, b: &Geodesic, tol: f64) -> bool {
        a.approx_eq(b, tol)
    }

    fn distance_to_line(&self, line: &Geodesic, p: &HPoint) -> f64 {
        line.distance_to(p)
    }

    fn chart_dim(&self) -> usize {
        2
    }

    fn chart(&self, p: &HPoint) -> Chart {
        [p.x, p.y.ln(), 0.0, 0.0]
    }

    fn chart_ball_bounds(&self, p: &HPoint, r: f64) -> (Chart, Chart) {
        // The hyperbolic ball is the Euclidean disk centred at (x, y·cosh r)
        // with radius y·sinh r; its height range is exactly [y·e⁻ʳ, y·eʳ].
        let half_width = p.y * r.sinh();
        let ly = p.y.ln();
        ([p.x - half_width, ly - r, 0.0, 0.0], [p.x + half_width, ly + r, 0.0, 0.0])
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> HPoint {
        HPoint::new_unchecked(rng.gen_range(-10.0..10.0), rng.gen_range(0.1..10.0))
    }
}

impl Segment<HPoint> for H2Segment {
    fn at(&self, t: f64) -> HPoint {
        H2Segment::at(self, t)
    }
}

/// Euclidean space of dimension `N` (at most [`MAX_CHART_DIM`]).
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean<const N: usize>;

/// A Euclidean line: the foot of the perpendicular from the origin and a
/// unit direction whose largest-magnitude component is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanLine<const N: usize> {
    pub origin: [f64; N],
    pub direction: [f64; N],
}

#[derive(Debug, Clone, Copy)]
pub struct EuclideanSegment<const N: usize> {
    a: [f64; N],
    b: [f64; N],
}

impl<const N: usize> Segment<[f64; N]> for EuclideanSegment<N> {
    fn at(&self, t: f64) -> [f64; N] {
        if t == 0.0 {
            return self.a;
        }
        if t == 1.0 {
            return self.b;
        }
        std::array::from_fn(|i| self.a[i] + t * (self.b[i] - self.a[i]))
    }
}

pub(crate) fn euclid_dist<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<const N: usize> GeodesicSpace for Euclidean<N> {
    type Point = [f64; N];
    type Line = EuclideanLine<N>;
    type Segment = EuclideanSegment<N>;

    fn id(&self) -> String {
        format!("e{N}")
    }

    fn dist(&self, a: &[f64; N], b: &[f64; N]) -> f64 {
        euclid_dist(a, b)
    }

    fn segment(&self, a: &[f64; N], b: &[f64; N]) -> Result<EuclideanSegment<N>> {
        if a == b {
            return Err(Error::CoincidentPoints);
        }
        Ok(EuclideanSegment { a: *a, b: *b })
    }

    fn line_through(&self, a: &[f64; N], b: &[f64; N]) -> Result<EuclideanLine<N>> {
        let len = euclid_dist(a, b);
        if len == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        let mut direction: [f64; N] = std::array::from_fn(|i| (b[i] - a[i]) / len);
        let lead = direction
            .iter()
            .copied()
            .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if lead < 0.0 {
            direction.iter_mut().for_each(|v| *v = -*v);
        }
        let along = dot(a, &direction);
        let origin = std::array::from_fn(|i| a[i] - along * direction[i]);
        Ok(EuclideanLine { origin, direction })
    }

    fn line_point(&self, line: &EuclideanLine<N>, s: f64) -> [f64; N] {
        std::array::from_fn(|i| line.origin[i] + s * line.direction[i])
    }

    fn line_coordinate(&self, line: &EuclideanLine<N>, p: &[f64; N]) -> f64 {
        let rel: [f64; N] = std::array::from_fn(|i| p[i] - line.origin[i]);
        dot(&rel, &line.direction)
    }

    fn lines_equal(&self, a: &EuclideanLine<N>, b: &EuclideanLine<N>, tol: f64) -> bool {
        let scale = 1f64.max(a.origin.iter().chain(&b.origin).fold(0.0, |m, v| m.max(v.abs())));
        euclid_dist(&a.origin, &b.origin) <= tol * scale
            && euclid_dist(&a.direction, &b.direction) <= tol
    }

    fn chart_dim(&self) -> usize {
        N
    }

    fn chart(&self, p: &[f64; N]) -> Chart {
        assert!(N <= MAX_CHART_DIM, "Euclidean dimension {N} exceeds chart limit");
        let mut c = [0.0; MAX_CHART_DIM];
        c[..N].copy_from_slice(p);
        c
    }

    fn chart_ball_bounds(&self, p: &[f64; N], r: f64) -> (Chart, Chart) {
        let mut lo = self.chart(p);
        let mut hi = lo;
        for i in 0..N {
            lo[i] -= r;
            hi[i] += r;
        }
        (lo, hi)
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; N] {
        std::array::from_fn(|_| rng.gen_range(-10.0..10.0))
    }
}

pub mod checks;

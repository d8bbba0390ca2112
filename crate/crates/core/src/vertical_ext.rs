//! Vertical extension `X × ℝ` of a geodesic space `X`.
//!
//! The metric is `d*((x₀,y₀),(x₁,y₁)) = sqrt(d(x₀,x₁)² + (y₀ - y₁)²)`. Segments
//! project to base segments and carry an affine height; when the two bases
//! coincide the base stays fixed and only the height moves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{Chart, GeodesicSpace, Segment, MAX_CHART_DIM};

/// Base distance at or below which two bases are treated as the same point.
pub const EQUAL_BASE_TOL: f64 = 1e-12;

/// A point of the vertical extension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EPoint<P> {
    pub base: P,
    pub height: f64,
}

impl<P> EPoint<P> {
    pub const fn new(base: P, height: f64) -> Self {
        Self { base, height }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerticalExtension<B> {
    pub base: B,
}

impl<B: GeodesicSpace> VerticalExtension<B> {
    pub fn new(base: B) -> Self {
        assert!(base.chart_dim() < MAX_CHART_DIM, "base chart too large for a vertical extension");
        Self { base }
    }

    /// Extended metric.
    pub fn dist_ext(&self, p: &EPoint<B::Point>, q: &EPoint<B::Point>) -> f64 {
        self.base.dist(&p.base, &q.base).hypot(p.height - q.height)
    }

    fn same_base(&self, p: &EPoint<B::Point>, q: &EPoint<B::Point>) -> bool {
        self.base.dist(&p.base, &q.base) <= EQUAL_BASE_TOL
    }

    /// Point of the segment `[P, Q]` at standard parameter `t`: base geodesic
    /// point and affine height `(1-t)·y₀ + t·y₁`.
    pub fn geod_ext(&self, p: &EPoint<B::Point>, q: &EPoint<B::Point>, t: f64) -> Result<EPoint<B::Point>> {
        Ok(self.segment(p, q)?.at(t))
    }

    /// Unit-speed ruler through `P` and `Q` with `c*(0) = P`.
    pub fn ruler_ext(&self, p: &EPoint<B::Point>, q: &EPoint<B::Point>) -> Result<ExtRuler<B>> {
        if p == q {
            return Err(Error::CoincidentPoints);
        }
        if self.same_base(p, q) {
            if p.height == q.height {
                return Err(Error::CoincidentPoints);
            }
            return Ok(ExtRuler {
                base_line: None,
                anchor: p.base,
                s0: 0.0,
                s1: 0.0,
                y0: p.height,
                y1: q.height,
                scale: 1.0 / (q.height - p.height).abs(),
            });
        }
        let line = self.base.line_through(&p.base, &q.base)?;
        let s0 = self.base.line_coordinate(&line, &p.base);
        let s1 = self.base.line_coordinate(&line, &q.base);
        Ok(ExtRuler {
            base_line: Some(line),
            anchor: p.base,
            s0,
            s1,
            y0: p.height,
            y1: q.height,
            scale: 1.0 / (s0 - s1).hypot(p.height - q.height),
        })
    }

    /// Height of the point over `x` on the segment from `(x0, y0)` to `(x1, y1)`.
    pub fn reconstruct_height(
        &self,
        x0: &B::Point,
        x1: &B::Point,
        y0: f64,
        y1: f64,
        x: &B::Point,
    ) -> Result<f64> {
        reconstruct_height(&self.base, x0, x1, y0, y1, x)
    }
}

/// `y = y0 + d(x0,x)/d(x0,x1)·(y1 - y0)` for `x` on the base segment `[x0, x1]`.
pub fn reconstruct_height<B: GeodesicSpace>(
    base: &B,
    x0: &B::Point,
    x1: &B::Point,
    y0: f64,
    y1: f64,
    x: &B::Point,
) -> Result<f64> {
    let span = base.dist(x0, x1);
    if span <= EQUAL_BASE_TOL {
        return Err(Error::CoincidentPoints);
    }
    if !base.on_segment(x0, x, x1, 1e-9) {
        return Err(Error::Precondition("point is not on the base segment".into()));
    }
    Ok(y0 + base.dist(x0, x) / span * (y1 - y0))
}

/// Ruler `c*(t) = (c(a·t·(s₁-s₀) + s₀), a·t·(y₁-y₀) + y₀)` with
/// `a = 1/sqrt((s₀-s₁)² + (y₀-y₁)²)`.
#[derive(Debug, Clone)]
pub struct ExtRuler<B: GeodesicSpace> {
    base_line: Option<B::Line>,
    anchor: B::Point,
    s0: f64,
    s1: f64,
    y0: f64,
    y1: f64,
    scale: f64,
}

impl<B: GeodesicSpace> ExtRuler<B> {
    pub fn at(&self, space: &VerticalExtension<B>, t: f64) -> EPoint<B::Point> {
        let height = self.scale * t * (self.y1 - self.y0) + self.y0;
        let base = match &self.base_line {
            None => self.anchor,
            Some(_) if t == 0.0 => self.anchor,
            Some(line) => space
                .base
                .line_point(line, self.scale * t * (self.s1 - self.s0) + self.s0),
        };
        EPoint::new(base, height)
    }
}

/// A line of the vertical extension.
#[derive(Debug, Clone)]
pub enum ExtLine<L, P> {
    /// Constant base, height is the ruler coordinate.
    Vertical { base: P },
    /// Base follows `base_line`; `(ds, dh)` is the unit direction in
    /// (base ruler coordinate, height) with `ds > 0`.
    Sloped { base_line: L, s0: f64, h0: f64, ds: f64, dh: f64 },
}

#[derive(Debug, Clone)]
pub struct ExtSegment<S, P> {
    start: EPoint<P>,
    end: EPoint<P>,
    base: Option<S>,
}

impl<S: Segment<P>, P: Copy> Segment<EPoint<P>> for ExtSegment<S, P> {
    fn at(&self, t: f64) -> EPoint<P> {
        let height = (1.0 - t) * self.start.height + t * self.end.height;
        let base = match &self.base {
            Some(seg) => seg.at(t),
            None => self.start.base,
        };
        EPoint::new(base, height)
    }
}

impl<B: GeodesicSpace> GeodesicSpace for VerticalExtension<B> {
    type Point = EPoint<B::Point>;
    type Line = ExtLine<B::Line, B::Point>;
    type Segment = ExtSegment<B::Segment, B::Point>;

    fn id(&self) -> String {
        format!("{}xr", self.base.id())
    }

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64 {
        self.dist_ext(a, b)
    }

    fn segment(&self, a: &Self::Point, b: &Self::Point) -> Result<Self::Segment> {
        if a == b {
            return Err(Error::CoincidentPoints);
        }
        let base = if self.same_base(a, b) {
            if a.height == b.height {
                return Err(Error::CoincidentPoints);
            }
            None
        } else {
            Some(self.base.segment(&a.base, &b.base)?)
        };
        Ok(ExtSegment { start: *a, end: *b, base })
    }

    fn line_through(&self, a: &Self::Point, b: &Self::Point) -> Result<Self::Line> {
        if self.same_base(a, b) {
            if a.height == b.height {
                return Err(Error::CoincidentPoints);
            }
            return Ok(ExtLine::Vertical { base: a.base });
        }
        let base_line = self.base.line_through(&a.base, &b.base)?;
        let sa = self.base.line_coordinate(&base_line, &a.base);
        let sb = self.base.line_coordinate(&base_line, &b.base);
        let norm = (sb - sa).hypot(b.height - a.height);
        let (mut ds, mut dh) = ((sb - sa) / norm, (b.height - a.height) / norm);
        if ds < 0.0 {
            ds = -ds;
            dh = -dh;
        }
        Ok(ExtLine::Sloped { base_line, s0: sa, h0: a.height, ds, dh })
    }

    fn line_point(&self, line: &Self::Line, s: f64) -> Self::Point {
        match line {
            ExtLine::Vertical { base } => EPoint::new(*base, s),
            ExtLine::Sloped { base_line, s0, h0, ds, dh } => {
                EPoint::new(self.base.line_point(base_line, s0 + s * ds), h0 + s * dh)
            }
        }
    }

    fn line_coordinate(&self, line: &Self::Line, p: &Self::Point) -> f64 {
        match line {
            ExtLine::Vertical { .. } => p.height,
            ExtLine::Sloped { base_line, s0, h0, ds, dh } => {
                let s = self.base.line_coordinate(base_line, &p.base);
                (s - s0) * ds + (p.height - h0) * dh
            }
        }
    }

    fn lines_equal(&self, a: &Self::Line, b: &Self::Line, tol: f64) -> bool {
        match (a, b) {
            (ExtLine::Vertical { base: p }, ExtLine::Vertical { base: q }) => {
                self.base.dist(p, q) <= tol
            }
            (
                ExtLine::Sloped { base_line: l1, s0: s1, h0: h1, ds: ds1, dh: dh1 },
                ExtLine::Sloped { base_line: l2, s0: s2, h0: h2, ds: ds2, dh: dh2 },
            ) => {
                let scale = 1f64.max(s1.abs()).max(s2.abs()).max(h1.abs()).max(h2.abs());
                self.base.lines_equal(l1, l2, tol)
                    && (ds1 * dh2 - dh1 * ds2).abs() <= tol
                    && ((s2 - s1) * dh1 - (h2 - h1) * ds1).abs() <= tol * scale
            }
            _ => false,
        }
    }

    fn chart_dim(&self) -> usize {
        self.base.chart_dim() + 1
    }

    fn chart(&self, p: &Self::Point) -> Chart {
        let mut c = self.base.chart(&p.base);
        c[self.base.chart_dim()] = p.height;
        c
    }

    fn chart_ball_bounds(&self, p: &Self::Point, r: f64) -> (Chart, Chart) {
        let (mut lo, mut hi) = self.base.chart_ball_bounds(&p.base, r);
        let k = self.base.chart_dim();
        lo[k] = p.height - r;
        hi[k] = p.height + r;
        (lo, hi)
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point {
        let base = self.base.sample_point(rng);
        EPoint::new(base, rng.gen_range(-10.0..10.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom_h2::{self, HPoint};
    use crate::spaces::{Euclidean, HyperbolicPlane};
    use proptest::prelude::*;

    type H2xR = VerticalExtension<HyperbolicPlane>;

    fn ep(x: f64, y: f64, h: f64) -> EPoint<HPoint> {
        EPoint::new(HPoint::new_unchecked(x, y), h)
    }

    #[test]
    fn dist_ext_examples() {
        let s = H2xR::default();
        assert_eq!(s.dist_ext(&ep(0.0, 3.0, 0.0), &ep(0.0, 3.0, 5.0)), 5.0);
        let expected = ((41f64.sqrt().ln() - 3f64.ln()).powi(2) + 1.0).sqrt();
        let d = s.dist_ext(&ep(0.0, 3.0, 0.0), &ep(0.0, 41f64.sqrt(), 1.0));
        assert!((d - expected).abs() < 1e-12);
        assert!((expected - 1.2549).abs() < 1e-4);
        let p = ep(1.5, 2.5, -3.0);
        assert_eq!(s.dist_ext(&p, &p), 0.0);
    }

    #[test]
    fn geod_ext_examples() {
        let s = H2xR::default();
        let v = s.geod_ext(&ep(0.0, 3.0, 0.0), &ep(0.0, 3.0, 4.0), 0.25).unwrap();
        assert_eq!(v, ep(0.0, 3.0, 1.0));

        let (a, b) = (ep(0.0, 3.0, 0.0), ep(4.0, 5.0, 1.0));
        let t = (3f64.ln() - 2f64.ln()) / 3f64.ln();
        let p = s.geod_ext(&a, &b, t).unwrap();
        assert!((p.base.x - 1.0).abs() < 1e-12 && (p.base.y - 4.0).abs() < 1e-12);
        assert!((p.height - (1.0 - 2f64.ln() / 3f64.ln())).abs() < 1e-12);

        assert!(s.geod_ext(&a, &a, 0.5).is_err());
        assert_eq!(s.geod_ext(&a, &b, 0.0).unwrap(), a);
        assert_eq!(s.geod_ext(&a, &b, 1.0).unwrap(), b);
    }

    #[test]
    fn ruler_ext_examples() {
        let s = H2xR::default();
        let p = ep(0.0, 1.0, 0.0);
        let q = ep(0.0, std::f64::consts::E, 0.0);
        let c = s.ruler_ext(&p, &q).unwrap();
        assert_eq!(c.at(&s, 0.0), p);
        for &t in &[-2.0, -0.5, 0.7, 3.0] {
            let pt = c.at(&s, t);
            assert!(pt.base.x.abs() < 1e-15);
            assert!((pt.base.y - f64::exp(t)).abs() < 1e-12 * f64::exp(t));
            assert!(pt.height.abs() < 1e-15);
        }
        assert!(s.ruler_ext(&p, &p).is_err());
        let vertical = s.ruler_ext(&p, &ep(0.0, 1.0, -2.0)).unwrap();
        assert_eq!(vertical.at(&s, 1.5), ep(0.0, 1.0, -1.5));
    }

    #[test]
    fn reconstruct_height_examples() {
        let h2 = HyperbolicPlane;
        let a = HPoint::new_unchecked(0.0, 3.0);
        let r = HPoint::new_unchecked(0.0, 41f64.sqrt());
        let x = HPoint::new_unchecked(0.0, 17f64.sqrt());
        let eps2 = reconstruct_height(&h2, &a, &r, 0.0, 1.0, &x).unwrap();
        let closed = (17f64.ln() - 2.0 * 3f64.ln()) / (41f64.ln() - 2.0 * 3f64.ln());
        assert!((eps2 - closed).abs() < 1e-12);
        assert!((closed - 0.41942).abs() < 1e-5);
        assert_eq!(reconstruct_height(&h2, &a, &r, 0.2, 0.7, &a).unwrap(), 0.2);
        assert!((reconstruct_height(&h2, &a, &r, 0.2, 0.7, &r).unwrap() - 0.7).abs() < 1e-15);
        assert!(matches!(
            reconstruct_height(&h2, &a, &r, 0.0, 1.0, &HPoint::new_unchecked(1.0, 4.0)),
            Err(Error::Precondition(_))
        ));
        assert_eq!(reconstruct_height(&h2, &a, &a, 0.0, 1.0, &a), Err(Error::CoincidentPoints));
    }

    #[test]
    fn extension_over_euclidean() {
        let s = VerticalExtension::new(Euclidean::<2>);
        assert_eq!(s.id(), "e2xr");
        let p = EPoint::new([0.0, 0.0], 0.0);
        let q = EPoint::new([3.0, 4.0], 12.0);
        assert!((s.dist(&p, &q) - 13.0).abs() < 1e-12);
        let m = s.geod(&p, &q, 0.5).unwrap();
        assert_eq!(m, EPoint::new([1.5, 2.0], 6.0));
    }

    fn arb_ep() -> impl Strategy<Value = EPoint<HPoint>> {
        (-10.0..10.0f64, 0.1..10.0f64, -10.0..10.0f64).prop_map(|(x, y, h)| ep(x, y, h))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn metric_axioms(p in arb_ep(), q in arb_ep(), r in arb_ep()) {
            let s = H2xR::default();
            let pq = s.dist(&p, &q);
            prop_assert!((pq - s.dist(&q, &p)).abs() <= 1e-12);
            prop_assert!(pq <= s.dist(&p, &r) + s.dist(&r, &q) + 1e-10);
        }

        #[test]
        fn affine_height_and_projection(p in arb_ep(), q in arb_ep(), t in -1.0..2.0f64) {
            let s = H2xR::default();
            prop_assume!(p != q);
            let g = s.geod_ext(&p, &q, t).unwrap();
            prop_assert_eq!(g.height, (1.0 - t) * p.height + t * q.height);
            if p.base != q.base {
                let base = geom_h2::geod_h2(&p.base, &q.base, t).unwrap();
                prop_assert_eq!(g.base, base);
            }
        }

        #[test]
        fn ruler_unit_speed(p in arb_ep(), q in arb_ep(), t in -10.0..10.0f64, u in -10.0..10.0f64) {
            let s = H2xR::default();
            prop_assume!(s.dist(&p, &q) > 1e-3);
            let c = s.ruler_ext(&p, &q).unwrap();
            let d = s.dist(&c.at(&s, t), &c.at(&s, u));
            prop_assert!((d - (t - u).abs()).abs() <= 1e-9, "{} vs {}", d, (t - u).abs());
        }

        #[test]
        fn standard_parametrization(p in arb_ep(), q in arb_ep(), t in 0.0..1.0f64) {
            let s = H2xR::default();
            prop_assume!(s.dist(&p, &q) > 1e-6);
            let g = s.geod_ext(&p, &q, t).unwrap();
            let d = s.dist(&p, &q);
            prop_assert!((s.dist(&p, &g) - t * d).abs() <= 1e-9 * 1f64.max(d));
        }
    }
}

//! The configuration showing that `H² × ℝ` is not drop complete.
//!
//! The hull of `A = (a, 0)`, `B = (b, 1)`, `C = (c, 1)` contains
//! `X₁ = (x, ε₁)` on `[P, Q]`, while the only drop segment from `A` over the
//! base point `x` is `[A, R]`, which passes `x` at height `ε₂ > ε₁`.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::geom_h2::{dist_h2, geodesic_through, is_between, segment_intersection, Geodesic, HPoint, SegmentIntersection};
use crate::hull::{drop_set, kantorovich_hull, CloudIndex, HullParams, DEFAULT_MAX_POINTS};
use crate::spaces::{GeodesicSpace, HyperbolicPlane, Segment};
use crate::vertical_ext::{reconstruct_height, EPoint, VerticalExtension};

pub type ExtPoint = EPoint<HPoint>;

/// Base-distance window around `x` used by the drop-gap test.
pub const DEFAULT_WINDOW: f64 = 0.01;
/// Required excess of the minimal drop height near `x` over `ε₁`.
pub const DEFAULT_MARGIN: f64 = 0.02;

/// All named points of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExoticConfiguration {
    pub a: HPoint,
    pub b: HPoint,
    pub c: HPoint,
    pub p: HPoint,
    pub q: HPoint,
    pub r: HPoint,
    pub x: HPoint,
    pub lift_a: ExtPoint,
    pub lift_b: ExtPoint,
    pub lift_c: ExtPoint,
    pub lift_p: ExtPoint,
    pub lift_q: ExtPoint,
    pub lift_r: ExtPoint,
    pub x1: ExtPoint,
    pub x2: ExtPoint,
    pub eps1: f64,
    pub eps2: f64,
}

/// `ε₁ = 1 − ln 2 / ln 3`.
pub fn eps1_closed_form() -> f64 {
    1.0 - 2f64.ln() / 3f64.ln()
}

/// `ε₂ = (ln 17 − 2 ln 3) / (ln 41 − 2 ln 3)`.
pub fn eps2_closed_form() -> f64 {
    (17f64.ln() - 2.0 * 3f64.ln()) / (41f64.ln() - 2.0 * 3f64.ln())
}

impl Default for ExoticConfiguration {
    fn default() -> Self {
        Self::new()
    }
}

impl ExoticConfiguration {
    pub fn new() -> Self {
        let a = HPoint::new_unchecked(0.0, 3.0);
        let b = HPoint::new_unchecked(4.0, 5.0);
        let c = HPoint::new_unchecked(-4.0, 5.0);
        let p = HPoint::new_unchecked(1.0, 4.0);
        let q = HPoint::new_unchecked(-1.0, 4.0);
        let r = HPoint::new_unchecked(0.0, 41f64.sqrt());
        let x = HPoint::new_unchecked(0.0, 17f64.sqrt());
        let (eps1, eps2) = (eps1_closed_form(), eps2_closed_form());
        Self {
            a,
            b,
            c,
            p,
            q,
            r,
            x,
            lift_a: EPoint::new(a, 0.0),
            lift_b: EPoint::new(b, 1.0),
            lift_c: EPoint::new(c, 1.0),
            lift_p: EPoint::new(p, eps1),
            lift_q: EPoint::new(q, eps1),
            lift_r: EPoint::new(r, 1.0),
            x1: EPoint::new(x, eps1),
            x2: EPoint::new(x, eps2),
            eps1,
            eps2,
        }
    }

    pub fn seeds(&self) -> [ExtPoint; 3] {
        [self.lift_a, self.lift_b, self.lift_c]
    }
}

fn space() -> VerticalExtension<HyperbolicPlane> {
    VerticalExtension::new(HyperbolicPlane)
}

/// One named check with its measured value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }
}

fn write_checks(f: &mut fmt::Formatter<'_>, checks: &[Check]) -> fmt::Result {
    for c in checks {
        writeln!(f, "  [{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncidenceReport {
    pub tolerance: f64,
    pub checks: Vec<Check>,
    /// `[p, q] ∩ [b, c]`, the pair named in the source text; it is empty.
    pub stated_pair_intersects: bool,
}

impl IncidenceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for IncidenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "incidences (tol {}):", self.tolerance)?;
        write_checks(f, &self.checks)?;
        writeln!(
            f,
            "  note: [p,q] and [b,c] lie on concentric circles and {}; x is [p,q] ∩ [a,r]",
            if self.stated_pair_intersects { "unexpectedly meet" } else { "do not meet" }
        )
    }
}

/// Checks `p ∈ [a,b]`, `q ∈ [a,c]`, `r ∈ [b,c]`, `[p,q] ∩ [a,r] = {x}`, and
/// that `r` is the only point of `[b,c]` with first coordinate 0.
pub fn verify_incidences(tol: f64) -> Result<IncidenceReport> {
    let cfg = ExoticConfiguration::new();
    let mut checks = Vec::new();
    for (name, a, p, b) in [
        ("p in [a,b]", cfg.a, cfg.p, cfg.b),
        ("q in [a,c]", cfg.a, cfg.q, cfg.c),
        ("r in [b,c]", cfg.b, cfg.r, cfg.c),
    ] {
        let excess = dist_h2(&a, &p)? + dist_h2(&p, &b)? - dist_h2(&a, &b)?;
        checks.push(Check::new(name, is_between(&a, &p, &b, tol), format!("triangle excess {excess:.3e}")));
    }

    let meet = segment_intersection(&cfg.p, &cfg.q, &cfg.a, &cfg.r)?;
    let (ok, detail) = match meet {
        SegmentIntersection::Point(m) => {
            let d = dist_h2(&m, &cfg.x)?;
            (d <= tol, format!("({}, {}), distance to x {d:.3e}", m.x, m.y))
        }
        other => (false, format!("{other:?}")),
    };
    checks.push(Check::new("[p,q] meets [a,r] at x", ok, detail));

    // The geodesic of [b,c] is x² + y² = R²; at first coordinate 0 it has the
    // single point (0, R).
    let bc = geodesic_through(&cfg.b, &cfg.c)?;
    let (ok, detail) = match bc {
        Geodesic::Arc { center, radius } => {
            let y0 = (radius * radius - center * center).sqrt();
            let crossing = HPoint::new_unchecked(0.0, y0);
            let d = dist_h2(&crossing, &cfg.r)?;
            (
                d <= tol && is_between(&cfg.b, &crossing, &cfg.c, tol),
                format!("arc centre {center}, radius {radius}; crossing at y = {y0}, distance to r {d:.3e}"),
            )
        }
        Geodesic::Vertical { x0 } => (false, format!("unexpected vertical geodesic x = {x0}")),
    };
    checks.push(Check::new("r is the unique point of [b,c] over x = 0", ok, detail));

    let stated = segment_intersection(&cfg.p, &cfg.q, &cfg.b, &cfg.c)?;
    Ok(IncidenceReport { tolerance: tol, checks, stated_pair_intersects: stated != SegmentIntersection::Disjoint })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonReport {
    pub eps1: f64,
    pub eps2: f64,
    pub eps1_reconstructed: f64,
    pub eps2_reconstructed: f64,
    /// `d(a, b)` and the printed expression `2 ln((√20 + √80) / (2√15))`.
    pub d_ab: f64,
    pub d_ab_printed: f64,
    /// `d(a, p)`, which the printed expression `2 ln((√2 + √50) / (2√12))` evaluates.
    pub d_ap: f64,
    pub d_ap_printed: f64,
    /// `d(a, x)`, the quantity the printed label names.
    pub d_ax: f64,
    /// Distance from `X₁` to the point of `[P, Q]` over `x`.
    pub x1_on_pq_deviation: f64,
    pub dist_x1_x2: f64,
    pub checks: Vec<Check>,
}

impl EpsilonReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for EpsilonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "epsilons:")?;
        writeln!(f, "  eps1 = 1 - ln2/ln3 = {}", self.eps1)?;
        writeln!(f, "  eps2 = (ln17 - 2ln3)/(ln41 - 2ln3) = {}", self.eps2)?;
        writeln!(f, "  d(a,b) = {} (printed expression {})", self.d_ab, self.d_ab_printed)?;
        writeln!(
            f,
            "  printed value labelled d(a,x) = {} equals d(a,p) = {}; d(a,x) itself = {}",
            self.d_ap_printed, self.d_ap, self.d_ax
        )?;
        writeln!(f, "  d*(X1, X2) = {}", self.dist_x1_x2)?;
        write_checks(f, &self.checks)
    }
}

/// Closed-form `ε₁`, `ε₂`, cross-checked against height reconstruction.
pub fn compute_epsilons() -> Result<EpsilonReport> {
    let cfg = ExoticConfiguration::new();
    let h2 = HyperbolicPlane;
    let ext = space();
    let (eps1, eps2) = (cfg.eps1, cfg.eps2);
    let eps1_reconstructed = reconstruct_height(&h2, &cfg.a, &cfg.b, 0.0, 1.0, &cfg.p)?;
    let eps1_via_q = reconstruct_height(&h2, &cfg.a, &cfg.c, 0.0, 1.0, &cfg.q)?;
    let eps2_reconstructed = reconstruct_height(&h2, &cfg.a, &cfg.r, 0.0, 1.0, &cfg.x)?;

    let d_ab = dist_h2(&cfg.a, &cfg.b)?;
    let d_ap = dist_h2(&cfg.a, &cfg.p)?;
    let d_ax = dist_h2(&cfg.a, &cfg.x)?;
    let d_ab_printed = 2.0 * ((20f64.sqrt() + 80f64.sqrt()) / (2.0 * 15f64.sqrt())).ln();
    let d_ap_printed = 2.0 * ((2f64.sqrt() + 50f64.sqrt()) / (2.0 * 12f64.sqrt())).ln();

    // x is the midpoint of [p, q] by symmetry; recover t from distances anyway.
    let t = dist_h2(&cfg.p, &cfg.x)? / dist_h2(&cfg.p, &cfg.q)?;
    let p_lift = EPoint::new(cfg.p, eps1_reconstructed);
    let q_lift = EPoint::new(cfg.q, eps1_via_q);
    let on_pq = ext.segment(&p_lift, &q_lift)?.at(t);
    let x1_on_pq_deviation = ext.dist_ext(&on_pq, &cfg.x1);

    let ln3 = 3f64.ln();
    let ln2 = 2f64.ln();
    let checks = vec![
        Check::new(
            "eps1 matches reconstruct_height(a,b,0,1,p)",
            (eps1 - eps1_reconstructed).abs() <= 1e-12,
            format!("difference {:.3e}", eps1 - eps1_reconstructed),
        ),
        Check::new(
            "eps1 matches reconstruct_height(a,c,0,1,q)",
            (eps1 - eps1_via_q).abs() <= 1e-12,
            format!("difference {:.3e}", eps1 - eps1_via_q),
        ),
        Check::new(
            "eps2 matches reconstruct_height(a,r,0,1,x)",
            (eps2 - eps2_reconstructed).abs() <= 1e-12,
            format!("difference {:.3e}", eps2 - eps2_reconstructed),
        ),
        Check::new("d(a,b) = ln 3", (d_ab - ln3).abs() <= 1e-12, format!("difference {:.3e}", d_ab - ln3)),
        Check::new(
            "d(a,p) = ln 3 - ln 2",
            (d_ap - (ln3 - ln2)).abs() <= 1e-12,
            format!("difference {:.3e}", d_ap - (ln3 - ln2)),
        ),
        Check::new("eps1 < 2/5", eps1 < 0.4, format!("{eps1}")),
        Check::new("eps2 > 2/5", eps2 > 0.4, format!("{eps2}")),
        Check::new(
            "X1 lies on [P,Q]",
            x1_on_pq_deviation <= 1e-9,
            format!("t = {t}, deviation {x1_on_pq_deviation:.3e}"),
        ),
    ];
    Ok(EpsilonReport {
        eps1,
        eps2,
        eps1_reconstructed,
        eps2_reconstructed,
        d_ab,
        d_ab_printed,
        d_ap,
        d_ap_printed,
        d_ax,
        x1_on_pq_deviation,
        dist_x1_x2: ext.dist_ext(&cfg.x1, &cfg.x2),
        checks,
    })
}

/// Parameters of [`verify_drop_gap`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DropGapParams {
    pub iterations: usize,
    pub res: f64,
    pub delta: f64,
    pub dedup_tol: f64,
    pub window: f64,
    pub margin: f64,
    pub max_points: usize,
}

impl DropGapParams {
    pub fn new(iterations: usize, res: f64, delta: f64) -> Self {
        Self {
            iterations,
            res,
            delta,
            dedup_tol: res / 2.0,
            window: DEFAULT_WINDOW,
            margin: DEFAULT_MARGIN,
            max_points: DEFAULT_MAX_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DropGapReport {
    pub params: DropGapParams,
    pub hull_points: usize,
    pub hull_pass_sizes: Vec<usize>,
    pub drop_points: usize,
    /// Distance from `X₁` to the nearest hull point.
    pub x1_hull_distance: f64,
    /// Distance from `X₂` to the nearest drop point.
    pub x2_drop_distance: f64,
    /// Distance from `X₁` to the nearest drop point.
    pub x1_drop_distance: f64,
    pub drop_points_near_x: usize,
    /// Minimal height among drop points whose base is within `window` of `x`.
    pub min_height_near_x: Option<f64>,
    pub max_height_near_x: Option<f64>,
    /// `min_height_near_x − ε₁`.
    pub gap_margin: Option<f64>,
    pub checks: Vec<Check>,
}

impl DropGapReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for DropGapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(
            f,
            "drop gap (iterations {}, res {}, delta {}, dedup {}, window {}, margin {}):",
            p.iterations, p.res, p.delta, p.dedup_tol, p.window, p.margin
        )?;
        writeln!(f, "  hull points {} (per pass {:?}), drop points {}", self.hull_points, self.hull_pass_sizes, self.drop_points)?;
        writeln!(f, "  drop points over the window: {}", self.drop_points_near_x)?;
        if let (Some(lo), Some(hi)) = (self.min_height_near_x, self.max_height_near_x) {
            writeln!(f, "  their heights: [{lo}, {hi}]")?;
        }
        write_checks(f, &self.checks)
    }
}

/// Samples `[B, C]` at spacing `res`, including both end points.
pub fn sampled_bc(res: f64) -> Result<Vec<ExtPoint>> {
    let cfg = ExoticConfiguration::new();
    let ext = space();
    let seg = ext.segment(&cfg.lift_b, &cfg.lift_c)?;
    let d = ext.dist_ext(&cfg.lift_b, &cfg.lift_c);
    let mut out = vec![cfg.lift_b];
    let mut k = 1usize;
    while (k as f64) * res < d {
        out.push(seg.at(k as f64 * res / d));
        k += 1;
    }
    out.push(cfg.lift_c);
    Ok(out)
}

/// Certifies the gap: `X₁` is near the hull, `X₂` is near the drop set, and
/// every drop point over a base window around `x` sits above `ε₁ + margin`
/// and above `(ε₁ + ε₂)/2`.
pub fn verify_drop_gap(params: &DropGapParams) -> Result<DropGapReport> {
    let cfg = ExoticConfiguration::new();
    let ext = space();
    if !(params.delta > params.res) {
        return Err(crate::Error::InvalidParameter(format!(
            "delta ({}) must exceed res ({})",
            params.delta, params.res
        )));
    }

    let hull_params = HullParams::new(params.iterations, params.res)
        .with_dedup_tol(params.dedup_tol)
        .with_max_points(params.max_points);
    let hull = kantorovich_hull(&ext, &cfg.seeds(), &hull_params)?;
    let hull_index = CloudIndex::new(&ext, hull.points());
    let x1_hull_distance = hull_index.nearest(&cfg.x1).map_or(f64::INFINITY, |(_, d)| d);

    let base = sampled_bc(params.res)?;
    let drop = drop_set(&ext, &cfg.lift_a, &base, params.res, params.dedup_tol, params.max_points)?;
    let drop_index = CloudIndex::new(&ext, drop.points());
    let x2_drop_distance = drop_index.nearest(&cfg.x2).map_or(f64::INFINITY, |(_, d)| d);
    let x1_drop_distance = drop_index.nearest(&cfg.x1).map_or(f64::INFINITY, |(_, d)| d);

    let heights: Vec<f64> = drop
        .points()
        .iter()
        .filter(|p| HyperbolicPlane.dist(&p.base, &cfg.x) <= params.window)
        .map(|p| p.height)
        .collect();
    let min_height_near_x = heights.iter().copied().reduce(f64::min);
    let max_height_near_x = heights.iter().copied().reduce(f64::max);
    let gap_margin = min_height_near_x.map(|h| h - cfg.eps1);
    let midpoint = 0.5 * (cfg.eps1 + cfg.eps2);

    let gap_check = match min_height_near_x {
        None => Check::new(
            "drop heights over x stay above eps1 + margin",
            false,
            "inconclusive: no drop point over the window".to_string(),
        ),
        Some(h) => Check::new(
            "drop heights over x stay above eps1 + margin",
            h > cfg.eps1 + params.margin && h > midpoint,
            format!(
                "min height {h} vs eps1 + margin = {}, (eps1+eps2)/2 = {midpoint}, margin {}",
                cfg.eps1 + params.margin,
                h - cfg.eps1
            ),
        ),
    };
    let checks = vec![
        Check::new(
            "X1 covered by the hull",
            x1_hull_distance <= params.delta,
            format!("nearest hull point at {x1_hull_distance}"),
        ),
        Check::new(
            "X2 covered by the drop set",
            x2_drop_distance <= params.delta,
            format!("nearest drop point at {x2_drop_distance}"),
        ),
        gap_check,
    ];

    Ok(DropGapReport {
        params: *params,
        hull_points: hull.len(),
        hull_pass_sizes: hull.pass_sizes().to_vec(),
        drop_points: drop.len(),
        x1_hull_distance,
        x2_drop_distance,
        x1_drop_distance,
        drop_points_near_x: heights.len(),
        min_height_near_x,
        max_height_near_x,
        gap_margin,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let cfg = ExoticConfiguration::new();
        assert_eq!((cfg.r.x, cfg.r.y), (0.0, 41f64.sqrt()));
        assert_eq!(cfg.x.y, 17f64.sqrt());
        assert_eq!(cfg.seeds().map(|s| s.height), [0.0, 1.0, 1.0]);
    }

    #[test]
    fn epsilon_values() {
        let cfg = ExoticConfiguration::new();
        assert!((cfg.eps1 - 0.3690702).abs() < 1e-7);
        assert!((cfg.eps2 - 0.41942).abs() < 1e-5);
        let report = compute_epsilons().unwrap();
        assert!(report.passed(), "{report}");
        assert!((report.dist_x1_x2 - 0.0504).abs() < 1e-3);
        // The printed d(a,x) expression is d(a,p), not d(a,x).
        assert!((report.d_ap_printed - report.d_ap).abs() < 1e-12);
        assert!((report.d_ax - (0.5 * 17f64.ln() - 3f64.ln())).abs() < 1e-12);
        assert!((report.d_ab_printed - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn incidences_hold() {
        let report = verify_incidences(1e-9).unwrap();
        assert!(report.passed(), "{report}");
        assert!(!report.stated_pair_intersects);
    }

    #[test]
    fn perturbed_point_is_off_segment() {
        let cfg = ExoticConfiguration::new();
        let moved = HPoint::new_unchecked(1.1, 4.0);
        // Off the circle (x - 4)² + y² = 25 carrying [a, b].
        assert!(((moved.x - 4.0f64).powi(2) + moved.y * moved.y - 25.0).abs() > 1e-3);
        assert!(!is_between(&cfg.a, &moved, &cfg.b, 1e-9));
    }

    #[test]
    fn coarse_gap_runs() {
        let report = verify_drop_gap(&DropGapParams::new(1, 0.05, 0.2)).unwrap();
        assert_eq!(report.hull_pass_sizes.len(), 2);
        assert!(report.drop_points > 1);
    }

    #[test]
    fn no_iterations_leaves_x1_uncovered() {
        let report = verify_drop_gap(&DropGapParams::new(0, 0.05, 0.1)).unwrap();
        assert!(!report.passed());
        assert!(!report.checks[0].passed);
    }

    #[test]
    fn delta_must_exceed_res() {
        assert!(verify_drop_gap(&DropGapParams::new(1, 0.05, 0.05)).is_err());
    }
}

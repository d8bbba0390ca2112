//! Sampled checks of the separation inequalities and the convex separator
//! `φ(x) = inf { y : (x, y) ∈ conv(graph g) }`.
//!
//! Functions live on finite domains; off-grid arguments are evaluated at the
//! nearest domain sample ("snapping"), and every report carries the largest
//! snapping radius it used so tolerances can be read against it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridIndex;
use crate::hull::{kantorovich_hull_with, CloudIndex, HullParams, PointCloud};
use crate::spaces::{Euclidean, GeodesicSpace, Segment};
use crate::vertical_ext::{reconstruct_height, EPoint, VerticalExtension};

/// Pairwise separation required between domain samples.
pub const DOMAIN_TOL: f64 = 1e-9;

/// A real function on a finite domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<P> {
    domain: Vec<P>,
    values: Vec<f64>,
}

impl<P: Copy> SampledFunction<P> {
    pub fn new<S: GeodesicSpace<Point = P>>(space: &S, domain: Vec<P>, values: Vec<f64>) -> Result<Self> {
        if domain.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "domain has {} points but there are {} values",
                domain.len(),
                values.len()
            )));
        }
        if domain.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value {v}")));
        }
        let index = CloudIndex::new(space, &domain);
        for (i, p) in domain.iter().enumerate() {
            if let Some(&j) = index.within(p, DOMAIN_TOL).iter().find(|&&j| j != i) {
                return Err(Error::InvalidParameter(format!("domain points {} and {} coincide", i.min(j), i.max(j))));
            }
        }
        Ok(Self { domain, values })
    }

    /// Samples `f` at every domain point.
    pub fn from_fn<S: GeodesicSpace<Point = P>>(space: &S, domain: Vec<P>, f: impl Fn(&P) -> f64) -> Result<Self> {
        let values = domain.iter().map(f).collect();
        Self::new(space, domain, values)
    }

    pub fn domain(&self) -> &[P] {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    fn same_domain(&self, other: &Self) -> bool
    where
        P: PartialEq,
    {
        self.domain == other.domain
    }
}

/// Uniform grid `lo, lo + step, …` up to `hi` (inclusive within half a step).
pub fn grid_1d(lo: f64, hi: f64, step: f64) -> Vec<[f64; 1]> {
    let n = ((hi - lo) / step + 0.5).floor() as usize;
    (0..=n).map(|k| [lo + k as f64 * step]).collect()
}

/// Nearest-sample evaluation with a running maximum of the snapping radius.
struct Snapper<'a, S: GeodesicSpace> {
    index: CloudIndex<'a, S>,
    bound: f64,
}

impl<'a, S: GeodesicSpace> Snapper<'a, S> {
    fn new(space: &'a S, domain: &'a [S::Point], bound: f64) -> Self {
        Self { index: CloudIndex::new(space, domain), bound }
    }

    fn snap(&self, p: &S::Point, radius: &mut f64) -> Result<usize> {
        let (i, d) = self.index.nearest(p).ok_or(Error::EmptyCloud)?;
        if d > self.bound {
            return Err(Error::DomainTooSparse { radius: d, bound: self.bound });
        }
        *radius = radius.max(d);
        Ok(i)
    }
}

fn point_on<S: GeodesicSpace>(space: &S, a: &S::Point, b: &S::Point, t: f64) -> S::Point {
    if t == 0.0 || a == b {
        return *a;
    }
    space.segment(a, b).map_or(*a, |s| s.at(t))
}

fn t_grid(steps: usize) -> impl Iterator<Item = f64> {
    (0..steps).map(move |k| k as f64 / (steps - 1) as f64)
}

/// A failed instance of a separation inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SepViolation {
    /// Index of the random tuple (or pair) that produced it.
    pub tuple: usize,
    pub t: f64,
    /// Domain index where the left-hand side was evaluated.
    pub point: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl SepViolation {
    pub fn excess(&self) -> f64 {
        self.lhs - self.rhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sep2Params {
    pub tuple_budget: usize,
    pub t_steps: usize,
    pub seed: u64,
    pub tol: f64,
    /// Largest tuple length `n` (points `x₁ … xₙ` besides `x₀`).
    pub max_tuple: usize,
    /// Snapping radius above which the domain counts as too sparse.
    pub max_snap: f64,
}

impl Sep2Params {
    pub fn new(tuple_budget: usize, t_steps: usize, seed: u64, tol: f64) -> Self {
        Self { tuple_budget, t_steps, seed, tol, max_tuple: 4, max_snap: f64::INFINITY }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SepReport {
    /// Sampled checks can refute an inequality, never confirm it.
    pub header: String,
    pub tuples: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_snap_radius: f64,
    pub violations: Vec<SepViolation>,
}

impl SepReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_pair_sizes<P: Copy + PartialEq>(f: &SampledFunction<P>, g: &SampledFunction<P>) -> Result<()> {
    if !f.same_domain(g) {
        return Err(Error::Precondition("f and g must share the domain".into()));
    }
    Ok(())
}

/// Falsifier for `f(c(t)) ≤ (1−t)·g(x₀) + t·f(x)` with `c = geod(x₀, x, ·)`
/// and `x` drawn from the hull of a random tuple `x₁ … xₙ`.
pub fn check_sep2<S: GeodesicSpace>(
    space: &S,
    f: &SampledFunction<S::Point>,
    g: &SampledFunction<S::Point>,
    params: &Sep2Params,
) -> Result<SepReport> {
    check_pair_sizes(f, g)?;
    if params.t_steps < 2 {
        return Err(Error::InvalidParameter("t_steps must be at least 2".into()));
    }
    if params.max_tuple == 0 {
        return Err(Error::InvalidParameter("max_tuple must be at least 1".into()));
    }
    let n = f.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    // (x₀, tuple, interpolation weights)
    let tuples: Vec<(usize, Vec<usize>, Vec<f64>)> = (0..params.tuple_budget)
        .map(|_| {
            let x0 = rng.gen_range(0..n);
            let len = rng.gen_range(1..=params.max_tuple);
            let members = (0..len).map(|_| rng.gen_range(0..n)).collect();
            let weights = (1..len).map(|_| rng.gen::<f64>()).collect();
            (x0, members, weights)
        })
        .collect();

    let snapper = Snapper::new(space, f.domain(), params.max_snap);
    let dom = f.domain();
    let outcomes: Vec<Result<(f64, Vec<SepViolation>)>> = tuples
        .par_iter()
        .enumerate()
        .map(|(tuple, (x0, members, weights))| {
            let mut radius = 0.0f64;
            // Iterated geodesic combination: a point of the Kantorovich hull of the tuple.
            let mut x = dom[members[0]];
            for (&m, &w) in members[1..].iter().zip(weights) {
                x = point_on(space, &x, &dom[m], w);
            }
            let xs = snapper.snap(&x, &mut radius)?;
            let mut found = Vec::new();
            for t in t_grid(params.t_steps) {
                let c = point_on(space, &dom[*x0], &dom[xs], t);
                let ci = snapper.snap(&c, &mut radius)?;
                let lhs = f.values[ci];
                let rhs = (1.0 - t) * g.values[*x0] + t * f.values[xs];
                if lhs - rhs > params.tol {
                    found.push(SepViolation { tuple, t, point: ci, lhs, rhs });
                }
            }
            Ok((radius, found))
        })
        .collect();

    let mut max_snap_radius = 0.0f64;
    let mut violations = Vec::new();
    for outcome in outcomes {
        let (radius, found) = outcome?;
        max_snap_radius = max_snap_radius.max(radius);
        violations.extend(found);
    }
    Ok(SepReport {
        header: "sampled falsifier: violations refute (sep2); an empty list confirms nothing".into(),
        tuples: params.tuple_budget,
        seed: params.seed,
        tol: params.tol,
        max_snap_radius,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sep1Params {
    /// Combinations use at most `max_len + 1` points.
    pub max_len: usize,
    pub budget: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_snap: f64,
}

impl Sep1Params {
    pub fn new(max_len: usize, budget: usize, seed: u64, tol: f64) -> Self {
        Self { max_len, budget, seed, tol, max_snap: f64::INFINITY }
    }
}

/// Checks `f(Σ tₖ xₖ) ≤ Σ tₖ g(xₖ)` on random convex combinations in `ℝᴺ`.
/// Violations carry `t = t₀`, the weight of the first point.
pub fn check_sep1_euclidean<const N: usize>(
    f: &SampledFunction<[f64; N]>,
    g: &SampledFunction<[f64; N]>,
    params: &Sep1Params,
) -> Result<SepReport> {
    check_pair_sizes(f, g)?;
    if params.max_len == 0 {
        return Err(Error::InvalidParameter("max_len must be at least 1".into()));
    }
    let n = f.len();
    let space = Euclidean::<N>;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let combos: Vec<Vec<(usize, f64)>> = (0..params.budget)
        .map(|_| {
            let len = rng.gen_range(2..=params.max_len + 1);
            // Normalized exponentials give uniform weights on the simplex.
            let raw: Vec<(usize, f64)> =
                (0..len).map(|_| (rng.gen_range(0..n), -(1.0 - rng.gen::<f64>()).ln())).collect();
            let total: f64 = raw.iter().map(|(_, w)| w).sum();
            raw.into_iter().map(|(i, w)| (i, w / total)).collect()
        })
        .collect();

    let snapper = Snapper::new(&space, f.domain(), params.max_snap);
    let dom = f.domain();
    let outcomes: Vec<Result<(f64, Option<SepViolation>)>> = combos
        .par_iter()
        .enumerate()
        .map(|(tuple, combo)| {
            let mut radius = 0.0f64;
            let mut point = [0.0; N];
            let mut rhs = 0.0;
            for &(i, w) in combo {
                for (c, x) in point.iter_mut().zip(&dom[i]) {
                    *c += w * x;
                }
                rhs += w * g.values[i];
            }
            let at = snapper.snap(&point, &mut radius)?;
            let lhs = f.values[at];
            let v = (lhs - rhs > params.tol).then_some(SepViolation { tuple, t: combo[0].1, point: at, lhs, rhs });
            Ok((radius, v))
        })
        .collect();

    let mut max_snap_radius = 0.0f64;
    let mut violations = Vec::new();
    for outcome in outcomes {
        let (radius, v) = outcome?;
        max_snap_radius = max_snap_radius.max(radius);
        violations.extend(v);
    }
    Ok(SepReport {
        header: "sampled falsifier: violations refute (sep1); an empty list confirms nothing".into(),
        tuples: params.budget,
        seed: params.seed,
        tol: params.tol,
        max_snap_radius,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparatorParams {
    pub iterations: usize,
    pub res: f64,
    pub snap_radius: f64,
    pub dedup_tol: f64,
    pub max_points: usize,
}

impl SeparatorParams {
    pub fn new(iterations: usize, res: f64, snap_radius: f64) -> Self {
        let hull = HullParams::new(iterations, res);
        Self { iterations, res, snap_radius, dedup_tol: hull.dedup_tol, max_points: hull.max_points }
    }
}

#[derive(Debug, Clone)]
pub struct SeparatorResult<P> {
    pub phi: SampledFunction<P>,
    pub hull_cloud: PointCloud<EPoint<P>>,
    /// Domain points where `φ > g` (empty unless something is broken).
    pub violations: Vec<usize>,
    /// Domain points whose value came from the nearest-height fallback.
    pub fallback: Vec<usize>,
    /// Domain points clamped to the lowest cloud height.
    pub clamped: Vec<usize>,
}

/// Lifts the graph of `g` into `S × ℝ`, approximates its hull and reads off
/// the lower envelope `φ`.
///
/// Passes after the first pair only the lowest point of each base cell (of
/// width `res`) with the seeds; higher points cannot lower the envelope by
/// more than the cell width allows and would make later passes quadratic in
/// the cloud size.
///
/// `φ(x)` is the lowest height, over pairs of cloud points within
/// `snap_radius` of `x` whose base segment passes through `x`, of the point
/// of their segment over `x`. A cloud point sitting exactly over `x` counts
/// as a pair with itself. Without such pairs the lowest height within
/// `snap_radius` is used.
pub fn build_separator<S: GeodesicSpace + Clone>(
    space: &S,
    g: &SampledFunction<S::Point>,
    params: &SeparatorParams,
) -> Result<SeparatorResult<S::Point>> {
    if !(params.snap_radius > 0.0) {
        return Err(Error::InvalidParameter("snap_radius must be positive".into()));
    }
    let ext = VerticalExtension::new(space.clone());
    let seeds: Vec<EPoint<S::Point>> =
        g.domain.iter().zip(&g.values).map(|(x, &v)| EPoint::new(*x, v)).collect();
    let hull_params = HullParams::new(params.iterations, params.res)
        .with_dedup_tol(params.dedup_tol)
        .with_max_points(params.max_points);
    let cell = params.res;
    let filter = move |cloud: &PointCloud<EPoint<S::Point>>, active: &mut [bool]| {
        lowest_per_cell(space, cloud, cell, active)
    };
    let cloud = kantorovich_hull_with(&ext, &seeds, &hull_params, Some(&filter))?;

    let bases: Vec<S::Point> = cloud.points().iter().map(|p| p.base).collect();
    let base_index = CloudIndex::new(space, &bases);
    let lowest = cloud.points().iter().map(|p| p.height).fold(f64::INFINITY, f64::min);

    let evaluated: Vec<Result<(f64, bool)>> = g
        .domain
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let near = base_index.within(x, params.snap_radius);
            if near.is_empty() {
                return Err(Error::SnapRadiusTooSmall { index: i, radius: params.snap_radius });
            }
            let pts = cloud.points();
            let mut best = f64::INFINITY;
            for (k, &u) in near.iter().enumerate() {
                let pu = &pts[u];
                if space.dist(&pu.base, x) <= DOMAIN_TOL {
                    best = best.min(pu.height);
                    continue;
                }
                for &v in &near[k + 1..] {
                    let pv = &pts[v];
                    if let Ok(h) = reconstruct_height(space, &pu.base, &pv.base, pu.height, pv.height, x) {
                        best = best.min(h);
                    }
                }
            }
            if best.is_finite() {
                Ok((best, false))
            } else {
                Ok((near.iter().map(|&u| pts[u].height).fold(f64::INFINITY, f64::min), true))
            }
        })
        .collect();

    let mut values = Vec::with_capacity(g.len());
    let mut fallback = Vec::new();
    let mut clamped = Vec::new();
    let mut violations = Vec::new();
    for (i, e) in evaluated.into_iter().enumerate() {
        let (mut v, fell_back) = e?;
        if fell_back {
            fallback.push(i);
        }
        if v < lowest {
            v = lowest;
            clamped.push(i);
        }
        if v > g.values[i] {
            violations.push(i);
        }
        values.push(v);
    }
    Ok(SeparatorResult {
        phi: SampledFunction { domain: g.domain.clone(), values },
        hull_cloud: cloud,
        violations,
        fallback,
        clamped,
    })
}

/// Keeps seeds and the lowest non-seed point of each base chart cell active.
fn lowest_per_cell<S: GeodesicSpace>(space: &S, cloud: &PointCloud<EPoint<S::Point>>, cell: f64, active: &mut [bool]) {
    let mut grid = GridIndex::new(cell, space.chart_dim());
    let seeds = cloud.seed_count();
    for (i, p) in cloud.points().iter().enumerate().skip(seeds) {
        grid.insert(&space.chart(&p.base), i as u32);
    }
    for a in active.iter_mut().skip(seeds) {
        *a = false;
    }
    let pts = cloud.points();
    for (_, bucket) in grid.cells() {
        let lowest = bucket
            .iter()
            .copied()
            .min_by(|&a, &b| pts[a as usize].height.total_cmp(&pts[b as usize].height).then(a.cmp(&b)));
        if let Some(i) = lowest {
            active[i as usize] = true;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyParams {
    pub pairs: usize,
    pub t_steps: usize,
    pub seed: u64,
    pub tol: f64,
}

impl VerifyParams {
    pub fn new(t_steps: usize, tol: f64) -> Self {
        Self { pairs: 1000, t_steps, seed: 0, tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatorReport {
    pub tol: f64,
    pub seed: u64,
    /// Domain points with `f > φ + tol`.
    pub below_f: Vec<usize>,
    /// Domain points with `φ > g + tol`.
    pub above_g: Vec<usize>,
    pub convexity: Vec<SepViolation>,
    pub max_snap_radius: f64,
    pub max_convexity_excess: f64,
}

impl SeparatorReport {
    pub fn passed(&self) -> bool {
        self.below_f.is_empty() && self.above_g.is_empty() && self.convexity.is_empty()
    }
}

/// Checks `f ≤ φ ≤ g` pointwise and sampled geodesic convexity of `φ`.
pub fn verify_separator<S: GeodesicSpace>(
    space: &S,
    f: &SampledFunction<S::Point>,
    g: &SampledFunction<S::Point>,
    result: &SeparatorResult<S::Point>,
    params: &VerifyParams,
) -> Result<SeparatorReport> {
    check_pair_sizes(f, g)?;
    let phi = &result.phi;
    check_pair_sizes(f, phi)?;
    if params.t_steps < 2 {
        return Err(Error::InvalidParameter("t_steps must be at least 2".into()));
    }
    let tol = params.tol;
    let below_f = (0..f.len()).filter(|&i| f.values[i] > phi.values[i] + tol).collect();
    let above_g = (0..f.len()).filter(|&i| phi.values[i] > g.values[i] + tol).collect();

    let n = phi.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let pairs: Vec<(usize, usize)> = (0..params.pairs).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    let snapper = Snapper::new(space, phi.domain(), f64::INFINITY);
    let dom = phi.domain();
    let outcomes: Vec<(f64, f64, Vec<SepViolation>)> = pairs
        .par_iter()
        .enumerate()
        .map(|(tuple, &(a, b))| {
            let mut radius = 0.0f64;
            let mut worst = f64::NEG_INFINITY;
            let mut found = Vec::new();
            for t in t_grid(params.t_steps) {
                let c = point_on(space, &dom[a], &dom[b], t);
                let Ok(ci) = snapper.snap(&c, &mut radius) else { continue };
                let lhs = phi.values[ci];
                let rhs = (1.0 - t) * phi.values[a] + t * phi.values[b];
                worst = worst.max(lhs - rhs);
                if lhs - rhs > tol {
                    found.push(SepViolation { tuple, t, point: ci, lhs, rhs });
                }
            }
            (radius, worst, found)
        })
        .collect();
    let mut max_snap_radius = 0.0f64;
    let mut max_convexity_excess = f64::NEG_INFINITY;
    let mut convexity = Vec::new();
    for (radius, worst, found) in outcomes {
        max_snap_radius = max_snap_radius.max(radius);
        max_convexity_excess = max_convexity_excess.max(worst);
        convexity.extend(found);
    }
    Ok(SeparatorReport {
        tol,
        seed: params.seed,
        below_f,
        above_g,
        convexity,
        max_snap_radius,
        max_convexity_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::HyperbolicPlane;
    use crate::HPoint;

    const E1: Euclidean<1> = Euclidean::<1>;

    fn sampled(f: impl Fn(f64) -> f64, step: f64) -> SampledFunction<[f64; 1]> {
        SampledFunction::from_fn(&E1, grid_1d(-1.0, 1.0, step), |x| f(x[0])).unwrap()
    }

    /// Lower convex hull of a 1-D graph (monotone chain), evaluated by
    /// linear interpolation.
    fn lower_envelope(xs: &[f64], ys: &[f64], at: f64) -> f64 {
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for (&x, &y) in xs.iter().zip(ys) {
            while hull.len() >= 2 {
                let (x1, y1) = hull[hull.len() - 2];
                let (x2, y2) = hull[hull.len() - 1];
                if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push((x, y));
        }
        for w in hull.windows(2) {
            let ((x1, y1), (x2, y2)) = (w[0], w[1]);
            if at >= x1 && at <= x2 {
                return y1 + (at - x1) / (x2 - x1) * (y2 - y1);
            }
        }
        hull[0].1
    }

    #[test]
    fn envelope_oracle_sanity() {
        let xs = [-1.0, 0.0, 1.0];
        assert_eq!(lower_envelope(&xs, &[0.0, 1.0, 0.0], 0.0), 0.0);
        assert_eq!(lower_envelope(&xs, &[1.0, 0.0, 1.0], 0.5), 0.5);
    }

    #[test]
    fn sampled_function_validation() {
        assert!(SampledFunction::new(&E1, vec![[0.0]], vec![1.0, 2.0]).is_err());
        assert!(SampledFunction::new(&E1, vec![[0.0], [1e-12]], vec![1.0, 2.0]).is_err());
        assert!(SampledFunction::new(&E1, vec![], vec![]).is_err());
        assert_eq!(grid_1d(-1.0, 1.0, 0.05).len(), 41);
    }

    #[test]
    fn sep2_examples() {
        let zero = sampled(|_| 0.0, 0.05);
        assert!(check_sep2(&E1, &zero, &zero, &Sep2Params::new(300, 11, 1, 0.0)).unwrap().passed());

        let sq = sampled(|x| x * x, 0.05);
        let report = check_sep2(&E1, &sq, &sq, &Sep2Params::new(300, 11, 2, 0.06)).unwrap();
        assert!(report.passed(), "{:?}", report.violations.first());
        assert!(report.max_snap_radius <= 0.025 + 1e-12);

        let one = sampled(|_| 1.0, 0.05);
        let report = check_sep2(&E1, &one, &zero, &Sep2Params::new(50, 5, 3, 1e-9)).unwrap();
        assert!(report.violations.iter().any(|v| v.t == 0.0));

        let mut sparse = Sep2Params::new(50, 5, 3, 1e-9);
        sparse.max_snap = 1e-6;
        assert!(matches!(check_sep2(&E1, &sq, &sq, &sparse), Err(Error::DomainTooSparse { .. })));
        assert!(check_sep2(&E1, &sq, &sq, &Sep2Params::new(1, 1, 0, 0.0)).is_err());
    }

    #[test]
    fn sep2_is_deterministic_and_sorted() {
        let f = sampled(|x| x.abs() + 0.1, 0.05);
        let g = sampled(f64::abs, 0.05);
        let a = check_sep2(&E1, &f, &g, &Sep2Params::new(200, 7, 9, 0.0)).unwrap();
        let b = check_sep2(&E1, &f, &g, &Sep2Params::new(200, 7, 9, 0.0)).unwrap();
        assert_eq!(a, b);
        assert!(a.violations.windows(2).all(|w| (w[0].tuple, w[0].t) <= (w[1].tuple, w[1].t)));
    }

    #[test]
    fn sep2_on_hyperbolic_domain() {
        let h2 = HyperbolicPlane;
        let mut domain = Vec::new();
        for i in -5..=5 {
            for j in 0..=10 {
                domain.push(HPoint::new_unchecked(i as f64 * 0.2, (j as f64 * 0.1).exp()));
            }
        }
        let zero = SampledFunction::from_fn(&h2, domain, |_| 0.0).unwrap();
        assert!(check_sep2(&h2, &zero, &zero, &Sep2Params::new(100, 5, 4, 0.0)).unwrap().passed());
    }

    #[test]
    fn sep1_examples() {
        let lin = sampled(|x| 2.0 * x + 1.0, 0.05);
        assert!(check_sep1_euclidean(&lin, &lin, &Sep1Params::new(1, 500, 1, 0.051)).unwrap().passed());
        let sq = sampled(|x| x * x, 0.05);
        assert!(check_sep1_euclidean(&sq, &sq, &Sep1Params::new(1, 500, 1, 0.051)).unwrap().passed());
        let f = sampled(|x| x.abs() + 0.5, 0.05);
        let g = sampled(f64::abs, 0.05);
        assert!(!check_sep1_euclidean(&f, &g, &Sep1Params::new(1, 500, 1, 0.051)).unwrap().passed());
    }

    #[test]
    fn sep2_clean_implies_sep1_clean() {
        let gallery: Vec<(SampledFunction<[f64; 1]>, SampledFunction<[f64; 1]>)> = vec![
            (sampled(|x| x * x, 0.05), sampled(|x| x * x, 0.05)),
            (sampled(|x| x * x - 1.0, 0.05), sampled(|x| x * x, 0.05)),
            (sampled(|x| 0.5 * x, 0.05), sampled(|x| 0.5 * x + 0.2, 0.05)),
            (sampled(|x| x.abs() + 0.5, 0.05), sampled(f64::abs, 0.05)),
            (sampled(|x| x.abs(), 0.05), sampled(|x| 1.0 - x * x, 0.05)),
        ];
        for (k, (f, g)) in gallery.iter().enumerate() {
            let sep2 = check_sep2(&E1, f, g, &Sep2Params::new(400, 11, k as u64, 0.06)).unwrap();
            let sep1 = check_sep1_euclidean(f, g, &Sep1Params::new(1, 400, k as u64, 0.12)).unwrap();
            if sep2.passed() {
                assert!(sep1.passed(), "instance {k}");
            }
        }
    }

    #[test]
    fn single_sample_separator_is_exact() {
        let g = SampledFunction::new(&E1, vec![[0.3]], vec![1.7]).unwrap();
        let result = build_separator(&E1, &g, &SeparatorParams::new(2, 0.01, 0.02)).unwrap();
        assert_eq!(result.phi.values(), &[1.7]);
    }

    #[test]
    fn convex_graph_is_reproduced() {
        let g = sampled(|x| x * x, 0.05);
        let result = build_separator(&E1, &g, &SeparatorParams::new(2, 0.01, 0.02)).unwrap();
        assert!(result.violations.is_empty() && result.clamped.is_empty());
        for (x, (phi, gv)) in g.domain().iter().zip(result.phi.values().iter().zip(g.values())) {
            assert!(phi <= gv, "phi above g at {}", x[0]);
            assert!(gv - phi <= 0.02, "at {}: {phi} vs {gv}", x[0]);
        }
        let report = verify_separator(&E1, &g, &g, &result, &VerifyParams::new(11, 0.05)).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn hat_envelope_matches_oracle() {
        let g = sampled(|x| (1.0 - x.abs()).max(0.0), 0.05);
        let result = build_separator(&E1, &g, &SeparatorParams::new(2, 0.01, 0.02)).unwrap();
        let xs: Vec<f64> = g.domain().iter().map(|x| x[0]).collect();
        for (i, &x) in xs.iter().enumerate() {
            let exact = lower_envelope(&xs, g.values(), x);
            assert!((result.phi.values()[i] - exact).abs() <= 0.05, "at {x}");
        }
    }

    #[test]
    fn sandwich_examples() {
        let g = sampled(|x| x * x, 0.05);
        let result = build_separator(&E1, &g, &SeparatorParams::new(2, 0.01, 0.02)).unwrap();
        let lower = sampled(|x| x * x - 1.0, 0.05);
        assert!(verify_separator(&E1, &lower, &g, &result, &VerifyParams::new(11, 0.05)).unwrap().passed());
        let upper = sampled(|x| x * x + 1.0, 0.05);
        let report = verify_separator(&E1, &upper, &g, &result, &VerifyParams::new(11, 0.05)).unwrap();
        assert_eq!(report.below_f.len(), g.len());
    }

    #[test]
    fn more_data_never_raises_phi() {
        let coarse = sampled(|x| (3.0 * x).sin(), 0.1);
        let mut domain = coarse.domain().to_vec();
        let mut values = coarse.values().to_vec();
        for k in 0..20 {
            let x = -0.95 + 0.1 * k as f64;
            domain.push([x]);
            values.push((3.0 * x).sin() + 0.5);
        }
        let fine = SampledFunction::new(&E1, domain, values).unwrap();
        let params = SeparatorParams::new(1, 0.01, 0.02);
        let a = build_separator(&E1, &coarse, &params).unwrap();
        let b = build_separator(&E1, &fine, &params).unwrap();
        for i in 0..coarse.len() {
            assert!(b.phi.values()[i] <= a.phi.values()[i] + 0.02 + 0.01, "at {i}");
        }
    }
}

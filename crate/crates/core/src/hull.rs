//! Convex-hull approximation by the Kantorovich iteration.
//!
//! Starting from the seed list, every pass joins pairs of points already in
//! the cloud by geodesic segments and appends points spaced `res` apart along
//! each segment (the segment end point itself is not appended, it is already
//! in the cloud). Pass `n` visits the pairs `(i, j)` with `i < j`,
//! `j ≥ previous size`, `j < size`, so pairs handled in earlier passes are not
//! revisited. Output order is ascending `(pass, i, j, k)`.
//!
//! Candidates are generated in parallel and merged in order, so the result
//! does not depend on the number of worker threads. With `dedup_tol > 0` a
//! candidate within `dedup_tol` of an already accepted point is dropped.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom_h2::{Geodesic, HPoint};
use crate::grid::GridIndex;
use crate::spaces::{Chart, GeodesicSpace, Segment};
use crate::vertical_ext::EPoint;

pub const DEFAULT_MAX_POINTS: usize = 10_000_000;

/// Candidate budget for one parallel batch.
const BATCH_SAMPLES: usize = 1 << 20;
const BATCH_PAIRS: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullParams {
    pub iterations: usize,
    pub res: f64,
    pub dedup_tol: f64,
    pub max_points: usize,
    pub track_witnesses: bool,
}

impl HullParams {
    /// Defaults: `dedup_tol = res / 2`, 10⁷ point guard, no witnesses.
    pub fn new(iterations: usize, res: f64) -> Self {
        Self {
            iterations,
            res,
            dedup_tol: res / 2.0,
            max_points: DEFAULT_MAX_POINTS,
            track_witnesses: false,
        }
    }

    pub fn with_dedup_tol(mut self, dedup_tol: f64) -> Self {
        self.dedup_tol = dedup_tol;
        self
    }

    pub fn with_max_points(mut self, max_points: usize) -> Self {
        self.max_points = max_points;
        self
    }

    pub fn with_witnesses(mut self, track: bool) -> Self {
        self.track_witnesses = track;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.res > 0.0) || !self.res.is_finite() {
            return Err(Error::InvalidParameter(format!("res must be positive, got {}", self.res)));
        }
        if !(self.dedup_tol >= 0.0) || !self.dedup_tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dedup_tol must be non-negative, got {}",
                self.dedup_tol
            )));
        }
        Ok(())
    }
}

/// Provenance of a cloud point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PointMeta {
    /// 1 for seeds, `n + 1` for points added by pass `n`.
    pub generation: u32,
    /// End points of the segment the point was sampled from.
    pub parents: Option<(u32, u32)>,
}

/// A finite hull approximation with per-point provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<P> {
    points: Vec<P>,
    meta: Vec<PointMeta>,
    witnesses: Option<Vec<Vec<u32>>>,
    seed_count: usize,
    pass_sizes: Vec<usize>,
}

impl<P: Copy> PointCloud<P> {
    pub fn from_seeds(seeds: &[P], track_witnesses: bool) -> Self {
        Self {
            points: seeds.to_vec(),
            meta: vec![PointMeta { generation: 1, parents: None }; seeds.len()],
            witnesses: track_witnesses.then(|| (0..seeds.len() as u32).map(|i| vec![i]).collect()),
            seed_count: seeds.len(),
            pass_sizes: vec![seeds.len()],
        }
    }

    /// Rebuilds a cloud from stored points and provenance (e.g. read from CSV).
    pub fn from_parts(points: Vec<P>, meta: Vec<PointMeta>) -> Result<Self> {
        if points.len() != meta.len() {
            return Err(Error::InvalidParameter("points and metadata differ in length".into()));
        }
        for (i, m) in meta.iter().enumerate() {
            if let Some((a, b)) = m.parents {
                if a as usize >= i || b as usize >= i {
                    return Err(Error::InvalidParameter(format!("point {i} has a parent that does not precede it")));
                }
            }
        }
        let seed_count = meta.iter().take_while(|m| m.parents.is_none()).count();
        let mut pass_sizes = vec![seed_count];
        let mut last_gen = 1;
        for (i, m) in meta.iter().enumerate().skip(seed_count) {
            if m.generation != last_gen {
                if last_gen > 1 {
                    pass_sizes.push(i);
                }
                last_gen = m.generation;
            }
        }
        if meta.len() > seed_count {
            pass_sizes.push(meta.len());
        }
        Ok(Self { points, meta, witnesses: None, seed_count, pass_sizes })
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn meta(&self) -> &[PointMeta] {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed_count(&self) -> usize {
        self.seed_count
    }

    /// Cloud size after the seeds and after each completed pass.
    pub fn pass_sizes(&self) -> &[usize] {
        &self.pass_sizes
    }

    pub fn tracks_witnesses(&self) -> bool {
        self.witnesses.is_some()
    }

    /// Seed indices whose hull provably contains point `index`.
    pub fn witness(&self, index: usize) -> Result<&[u32]> {
        if index >= self.len() {
            return Err(Error::Index { index, len: self.len() });
        }
        let witnesses = self.witnesses.as_ref().ok_or(Error::WitnessesNotTracked)?;
        Ok(&witnesses[index])
    }

    /// Number of points per witness size.
    pub fn witness_histogram(&self) -> Result<BTreeMap<usize, usize>> {
        let witnesses = self.witnesses.as_ref().ok_or(Error::WitnessesNotTracked)?;
        let mut hist = BTreeMap::new();
        for w in witnesses {
            *hist.entry(w.len()).or_insert(0) += 1;
        }
        Ok(hist)
    }

    fn push(&mut self, point: P, meta: PointMeta) {
        if let Some(witnesses) = &mut self.witnesses {
            let w = match meta.parents {
                Some((a, b)) => merge_sorted(&witnesses[a as usize], &witnesses[b as usize]),
                None => Vec::new(),
            };
            witnesses.push(w);
        }
        self.points.push(point);
        self.meta.push(meta);
    }
}

/// Seed indices whose hull provably contains point `index` of `cloud`.
pub fn generator_witness<P: Copy>(cloud: &PointCloud<P>, index: usize) -> Result<&[u32]> {
    cloud.witness(index)
}

fn merge_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Hook run before every pass to restrict which existing points take part in
/// new pairs. Points marked inactive stay in the cloud.
pub type ActiveFilter<'a, P> = &'a (dyn Fn(&PointCloud<P>, &mut [bool]) + Sync);

pub fn kantorovich_hull<S: GeodesicSpace>(
    space: &S,
    seeds: &[S::Point],
    params: &HullParams,
) -> Result<PointCloud<S::Point>> {
    kantorovich_hull_with(space, seeds, params, None)
}

/// [`kantorovich_hull`] with an optional [`ActiveFilter`].
pub fn kantorovich_hull_with<S: GeodesicSpace>(
    space: &S,
    seeds: &[S::Point],
    params: &HullParams,
    filter: Option<ActiveFilter<'_, S::Point>>,
) -> Result<PointCloud<S::Point>> {
    params.validate()?;
    if seeds.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let mut cloud = PointCloud::from_seeds(seeds, params.track_witnesses);
    if cloud.len() > params.max_points {
        return Err(Error::ResourceLimit { limit: params.max_points });
    }
    let mut sampler = Sampler::new(space, seeds, params.res, params.dedup_tol, params.max_points);
    sampler.index_existing(&cloud, 0);

    let mut active = vec![true; cloud.len()];
    let mut previous = 0usize;
    for pass in 0..params.iterations {
        let size = cloud.len();
        active.resize(size, true);
        if let Some(f) = filter {
            f(&cloud, &mut active);
        }
        let participants: Vec<u32> = (0..size as u32).filter(|&i| active[i as usize]).collect();
        let generation = pass as u32 + 2;

        let mut pairs = PairBatch::default();
        for &i in &participants {
            let first_j = previous.max(i as usize + 1);
            let start = participants.partition_point(|&j| (j as usize) < first_j);
            for &j in &participants[start..] {
                let d = space.dist(&cloud.points[i as usize], &cloud.points[j as usize]);
                pairs.push(i, j, d, params.res);
                if pairs.full() {
                    sampler.run_batch(&mut cloud, &pairs.items, generation)?;
                    pairs.clear();
                }
            }
        }
        sampler.run_batch(&mut cloud, &pairs.items, generation)?;
        sampler.finish_pass(&cloud, size);
        cloud.pass_sizes.push(cloud.len());
        previous = size;
    }
    Ok(cloud)
}

/// Drop representation `⋃ { [apex, x] : x ∈ base }` sampled with the same
/// stepping rule as the hull iteration. Order: apex, the base points, then
/// the samples of each `[apex, x]` in base order.
pub fn drop_set<S: GeodesicSpace>(
    space: &S,
    apex: &S::Point,
    base: &[S::Point],
    res: f64,
    dedup_tol: f64,
    max_points: usize,
) -> Result<PointCloud<S::Point>> {
    HullParams { iterations: 0, res, dedup_tol, max_points, track_witnesses: false }.validate()?;
    let mut seeds = Vec::with_capacity(base.len() + 1);
    seeds.push(*apex);
    seeds.extend_from_slice(base);
    let mut cloud = PointCloud::from_seeds(&seeds, false);
    if cloud.len() > max_points {
        return Err(Error::ResourceLimit { limit: max_points });
    }
    let mut sampler = Sampler::new(space, &seeds, res, dedup_tol, max_points);
    sampler.index_existing(&cloud, 0);
    let mut pairs = PairBatch::default();
    for j in 1..cloud.len() as u32 {
        let d = space.dist(apex, &cloud.points[j as usize]);
        pairs.push(0, j, d, res);
        if pairs.full() {
            sampler.run_batch(&mut cloud, &pairs.items, 2)?;
            pairs.clear();
        }
    }
    sampler.run_batch(&mut cloud, &pairs.items, 2)?;
    cloud.pass_sizes.push(cloud.len());
    Ok(cloud)
}

#[derive(Default)]
struct PairBatch {
    items: Vec<(u32, u32, f64)>,
    samples: usize,
}

impl PairBatch {
    fn push(&mut self, i: u32, j: u32, d: f64, res: f64) {
        if res < d {
            self.samples += (d / res).ceil().min(1e12) as usize;
            self.items.push((i, j, d));
        }
    }

    fn full(&self) -> bool {
        self.samples >= BATCH_SAMPLES || self.items.len() >= BATCH_PAIRS
    }

    fn clear(&mut self) {
        self.items.clear();
        self.samples = 0;
    }
}

/// Segment sampling with grid deduplication. `settled` indexes every point
/// present before the current pass and is read-only during the parallel
/// stage; `fresh` indexes points accepted in the current pass.
struct Sampler<'s, S: GeodesicSpace> {
    space: &'s S,
    res: f64,
    dedup_tol: f64,
    max_points: usize,
    cell: Chart,
    settled: Option<GridIndex>,
    fresh: Option<GridIndex>,
}

impl<'s, S: GeodesicSpace> Sampler<'s, S> {
    fn new(space: &'s S, seeds: &[S::Point], res: f64, dedup_tol: f64, max_points: usize) -> Self {
        let cell = dedup_cells(space, seeds, dedup_tol);
        let grid = || (dedup_tol > 0.0).then(|| GridIndex::with_cell_sizes(cell, space.chart_dim()));
        Self { space, res, dedup_tol, max_points, cell, settled: grid(), fresh: grid() }
    }

    fn index_existing(&mut self, cloud: &PointCloud<S::Point>, from: usize) {
        if let Some(grid) = &mut self.settled {
            for (i, p) in cloud.points.iter().enumerate().skip(from) {
                grid.insert(&self.space.chart(p), i as u32);
            }
        }
    }

    fn finish_pass(&mut self, cloud: &PointCloud<S::Point>, pass_start: usize) {
        self.index_existing(cloud, pass_start);
        if let Some(fresh) = &mut self.fresh {
            *fresh = GridIndex::with_cell_sizes(self.cell, self.space.chart_dim());
        }
    }

    fn run_batch(
        &mut self,
        cloud: &mut PointCloud<S::Point>,
        pairs: &[(u32, u32, f64)],
        generation: u32,
    ) -> Result<()> {
        if pairs.is_empty() {
            return Ok(());
        }
        let space = self.space;
        let (res, tol) = (self.res, self.dedup_tol);
        let points = &cloud.points;
        let settled = self.settled.as_ref();
        let candidates: Vec<Vec<S::Point>> = pairs
            .par_iter()
            .map(|&(i, j, d)| {
                let (a, b) = (&points[i as usize], &points[j as usize]);
                let Ok(segment) = space.segment(a, b) else {
                    return Vec::new();
                };
                let mut out = Vec::new();
                let mut k = 1usize;
                while (k as f64) * res < d {
                    let p = segment.at(k as f64 * res / d);
                    if !settled.is_some_and(|g| near(space, g, points, &p, tol)) {
                        out.push(p);
                    }
                    k += 1;
                }
                out
            })
            .collect();

        for (&(i, j, _), batch) in pairs.iter().zip(candidates) {
            for p in batch {
                if let Some(fresh) = &self.fresh {
                    if near(space, fresh, &cloud.points, &p, tol) {
                        continue;
                    }
                }
                if cloud.len() >= self.max_points {
                    return Err(Error::ResourceLimit { limit: self.max_points });
                }
                let index = cloud.len() as u32;
                if let Some(fresh) = &mut self.fresh {
                    fresh.insert(&space.chart(&p), index);
                }
                cloud.push(p, PointMeta { generation, parents: Some((i, j)) });
            }
        }
        Ok(())
    }
}

/// Per-dimension cell widths: the widest chart half-extent of a `tol`-ball
/// centred at a seed, so a query box spans about three cells per dimension.
fn dedup_cells<S: GeodesicSpace>(space: &S, seeds: &[S::Point], tol: f64) -> Chart {
    let mut cell = [tol.max(f64::MIN_POSITIVE); crate::spaces::MAX_CHART_DIM];
    if tol <= 0.0 {
        return cell;
    }
    for p in seeds {
        let (lo, hi) = space.chart_ball_bounds(p, tol);
        for d in 0..space.chart_dim() {
            let half = 0.5 * (hi[d] - lo[d]);
            if half.is_finite() && half > cell[d] {
                cell[d] = half;
            }
        }
    }
    cell
}

#[inline]
fn near<S: GeodesicSpace>(space: &S, grid: &GridIndex, points: &[S::Point], p: &S::Point, tol: f64) -> bool {
    let center = space.chart(p);
    let (lo, hi) = space.chart_ball_bounds(p, tol);
    grid.any_near(&center, &lo, &hi, |idx| space.dist(&points[idx as usize], p) <= tol)
}

/// True iff some cloud point lies within `delta` of `p` (linear scan).
pub fn covers<S: GeodesicSpace>(space: &S, cloud: &[S::Point], p: &S::Point, delta: f64) -> bool {
    cloud.iter().any(|q| space.dist(q, p) <= delta)
}

/// Grid-accelerated proximity queries over a fixed set of points.
pub struct CloudIndex<'a, S: GeodesicSpace> {
    space: &'a S,
    points: &'a [S::Point],
    grid: GridIndex,
    lo: Chart,
    hi: Chart,
}

impl<'a, S: GeodesicSpace> CloudIndex<'a, S> {
    /// Builds an index with the given chart cell size.
    pub fn with_cell_size(space: &'a S, points: &'a [S::Point], cell_size: f64) -> Self {
        let dim = space.chart_dim();
        let mut grid = GridIndex::new(cell_size, dim);
        let mut lo = [f64::INFINITY; crate::spaces::MAX_CHART_DIM];
        let mut hi = [f64::NEG_INFINITY; crate::spaces::MAX_CHART_DIM];
        for (i, p) in points.iter().enumerate() {
            let c = space.chart(p);
            for d in 0..dim {
                lo[d] = lo[d].min(c[d]);
                hi[d] = hi[d].max(c[d]);
            }
            grid.insert(&c, i as u32);
        }
        Self { space, points, grid, lo, hi }
    }

    /// Picks a cell size from the chart extent so that cells hold O(1) points.
    pub fn new(space: &'a S, points: &'a [S::Point]) -> Self {
        let dim = space.chart_dim();
        let mut extent = 0.0f64;
        for d in 0..dim {
            let (lo, hi) = points.iter().map(|p| space.chart(p)[d]).fold(
                (f64::INFINITY, f64::NEG_INFINITY),
                |(lo, hi), v| (lo.min(v), hi.max(v)),
            );
            if hi > lo {
                extent = extent.max(hi - lo);
            }
        }
        let n = points.len().max(1) as f64;
        let cell = if extent > 0.0 { extent / n.powf(1.0 / dim.max(1) as f64) } else { 1.0 };
        Self::with_cell_size(space, points, cell.max(1e-9))
    }

    pub fn points(&self) -> &'a [S::Point] {
        self.points
    }

    /// Same answer as [`covers`], using the grid.
    pub fn covers(&self, p: &S::Point, delta: f64) -> bool {
        let center = self.space.chart(p);
        let (lo, hi) = self.space.chart_ball_bounds(p, delta);
        self.grid.any_near(&center, &lo, &hi, |i| self.space.dist(&self.points[i as usize], p) <= delta)
    }

    /// Indices of all points within `radius` of `p`, ascending.
    pub fn within(&self, p: &S::Point, radius: f64) -> Vec<usize> {
        let (lo, hi) = self.space.chart_ball_bounds(p, radius);
        let mut out = Vec::new();
        self.grid.for_each_in_box(&lo, &hi, |i| {
            if self.space.dist(&self.points[i as usize], p) <= radius {
                out.push(i as usize);
            }
        });
        out.sort_unstable();
        out
    }

    /// Nearest point to `p` and its distance; ties go to the lower index.
    pub fn nearest(&self, p: &S::Point) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let dim = self.space.chart_dim();
        let mut radius = self.grid.cell_size();
        loop {
            let (lo, hi) = self.space.chart_ball_bounds(p, radius);
            let mut best: Option<(usize, f64)> = None;
            self.grid.for_each_in_box(&lo, &hi, |i| {
                let d = self.space.dist(&self.points[i as usize], p);
                let better = match best {
                    None => true,
                    Some((bi, bd)) => d < bd || (d == bd && (i as usize) < bi),
                };
                if better {
                    best = Some((i as usize, d));
                }
            });
            let covers_all = (0..dim).all(|d| lo[d] <= self.lo[d] && hi[d] >= self.hi[d]);
            match best {
                Some((_, d)) if d <= radius => return best,
                Some(_) if covers_all => return best,
                _ => radius *= 2.0,
            }
            if !radius.is_finite() {
                return best;
            }
        }
    }
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff<S: GeodesicSpace>(space: &S, a: &[S::Point], b: &[S::Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    Ok(directed_hausdorff(space, a, b).max(directed_hausdorff(space, b, a)))
}

fn directed_hausdorff<S: GeodesicSpace>(space: &S, from: &[S::Point], to: &[S::Point]) -> f64 {
    let index = CloudIndex::new(space, to);
    from.par_iter()
        .map(|p| index.nearest(p).map_or(f64::INFINITY, |(_, d)| d))
        .reduce(|| 0.0, f64::max)
}

/// A slicing plane `γ × ℝ` over a half-plane geodesic, with signed ruler
/// coordinates measured from `origin` towards `toward`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePlane {
    pub geodesic: Geodesic,
    origin: f64,
    orientation: f64,
}

impl SlicePlane {
    pub fn through(origin: &HPoint, toward: &HPoint) -> Result<Self> {
        let geodesic = crate::geom_h2::geodesic_through(origin, toward)?;
        let s0 = geodesic.foot_parameter(origin);
        let s1 = geodesic.foot_parameter(toward);
        Ok(Self { geodesic, origin: s0, orientation: if s1 >= s0 { 1.0 } else { -1.0 } })
    }

    /// Signed coordinate of the foot of `p` on the plane's geodesic.
    pub fn coordinate(&self, p: &HPoint) -> f64 {
        self.orientation * (self.geodesic.foot_parameter(p) - self.origin)
    }
}

/// `(s, h)` pairs of the cloud points whose base lies within `plane_tol` of
/// the plane's geodesic, in cloud order.
pub fn slice(cloud: &[EPoint<HPoint>], plane: &SlicePlane, plane_tol: f64) -> Vec<(f64, f64)> {
    cloud
        .iter()
        .filter(|p| plane.geodesic.distance_to(&p.base) <= plane_tol)
        .map(|p| (plane.coordinate(&p.base), p.height))
        .collect()
}

//! Uniform hash grid over chart coordinates.

use rustc_hash::FxHashMap;

use crate::spaces::{Chart, MAX_CHART_DIM};

pub type CellKey = [i64; MAX_CHART_DIM];

/// Point indices bucketed by the chart cell they fall in.
#[derive(Debug, Clone)]
pub struct GridIndex {
    cell: [f64; MAX_CHART_DIM],
    dim: usize,
    cells: FxHashMap<CellKey, Vec<u32>>,
    len: usize,
}

impl GridIndex {
    pub fn new(cell_size: f64, dim: usize) -> Self {
        Self::with_cell_sizes([cell_size; MAX_CHART_DIM], dim)
    }

    /// Grid with a separate cell width per chart dimension.
    pub fn with_cell_sizes(cell: [f64; MAX_CHART_DIM], dim: usize) -> Self {
        assert!(dim <= MAX_CHART_DIM);
        assert!(cell[..dim].iter().all(|c| *c > 0.0 && c.is_finite()), "cell size must be positive");
        Self { cell, dim, cells: FxHashMap::default(), len: 0 }
    }

    /// Smallest cell width.
    pub fn cell_size(&self) -> f64 {
        self.cell[..self.dim].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn cell_of(&self, chart: &Chart) -> CellKey {
        let mut key = [0i64; MAX_CHART_DIM];
        for d in 0..self.dim {
            key[d] = (chart[d] / self.cell[d]).floor() as i64;
        }
        key
    }

    pub fn insert(&mut self, chart: &Chart, index: u32) {
        let key = self.cell_of(chart);
        self.cells.entry(key).or_default().push(index);
        self.len += 1;
    }

    pub fn cells(&self) -> impl Iterator<Item = (&CellKey, &[u32])> {
        self.cells.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Calls `hit` on every index stored in a cell overlapping the box
    /// `[lo, hi]`, starting with the cell containing `center`, until `hit`
    /// returns true. Returns whether it did.
    pub fn any_near(&self, center: &Chart, lo: &Chart, hi: &Chart, mut hit: impl FnMut(u32) -> bool) -> bool {
        if self.cells.is_empty() {
            return false;
        }
        let home = self.cell_of(center);
        if let Some(bucket) = self.cells.get(&home) {
            if bucket.iter().any(|&i| hit(i)) {
                return true;
            }
        }
        let lo = self.cell_of(lo);
        let hi = self.cell_of(hi);
        let mut count = 1f64;
        for d in 0..self.dim {
            count *= (hi[d] as f64 - lo[d] as f64) + 1.0;
        }
        if count > self.cells.len() as f64 {
            let inside = |k: &CellKey| (0..self.dim).all(|d| k[d] >= lo[d] && k[d] <= hi[d]);
            return self
                .cells
                .iter()
                .filter(|(k, _)| **k != home && inside(k))
                .any(|(_, bucket)| bucket.iter().any(|&i| hit(i)));
        }
        let mut key = lo;
        loop {
            if key != home {
                if let Some(bucket) = self.cells.get(&key) {
                    if bucket.iter().any(|&i| hit(i)) {
                        return true;
                    }
                }
            }
            // Odometer increment over the box.
            let mut d = 0;
            loop {
                if d == self.dim {
                    return false;
                }
                if key[d] < hi[d] {
                    key[d] += 1;
                    break;
                }
                key[d] = lo[d];
                d += 1;
            }
        }
    }

    /// Visits every index in cells overlapping `[lo, hi]`.
    pub fn for_each_in_box(&self, lo: &Chart, hi: &Chart, mut visit: impl FnMut(u32)) {
        let center = *lo;
        self.any_near(&center, lo, hi, |i| {
            visit(i);
            false
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexed_points_lie_in_their_cells() {
        let mut g = GridIndex::new(0.25, 2);
        let pts = [[0.1, -0.3, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [-0.26, 0.74, 0.0, 0.0]];
        for (i, p) in pts.iter().enumerate() {
            g.insert(p, i as u32);
        }
        for (key, bucket) in g.cells() {
            for &i in bucket {
                let p = pts[i as usize];
                for d in 0..2 {
                    let lo = key[d] as f64 * 0.25;
                    assert!(p[d] >= lo && p[d] < lo + 0.25);
                }
            }
        }
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn anisotropic_cells() {
        let mut g = GridIndex::with_cell_sizes([1.0, 0.1, 0.0, 0.0], 2);
        g.insert(&[2.5, 0.25, 0.0, 0.0], 0);
        assert_eq!(g.cell_of(&[2.5, 0.25, 0.0, 0.0])[..2], [2, 2]);
        assert_eq!(g.cell_size(), 0.1);
        assert!(g.any_near(&[2.0, 0.2, 0.0, 0.0], &[1.9, 0.15, 0.0, 0.0], &[2.1, 0.25, 0.0, 0.0], |_| true));
    }

    #[test]
    fn box_query_matches_scan() {
        let mut g = GridIndex::new(0.1, 3);
        let mut pts = Vec::new();
        for i in 0..500 {
            let f = i as f64;
            let p = [(f * 0.37).sin(), (f * 0.11).cos(), (f * 0.05).sin() * 2.0, 0.0];
            g.insert(&p, i);
            pts.push(p);
        }
        let lo = [-0.3, -0.2, -0.5, 0.0];
        let hi = [0.4, 0.5, 0.1, 0.0];
        let mut found = Vec::new();
        g.for_each_in_box(&lo, &hi, |i| found.push(i));
        // Cells overlap the box, so the visit set is a superset of the box contents.
        for (i, p) in pts.iter().enumerate() {
            if (0..3).all(|d| p[d] >= lo[d] && p[d] <= hi[d]) {
                assert!(found.contains(&(i as u32)));
            }
        }
        found.sort_unstable();
        found.dedup();
        let mut huge = Vec::new();
        g.for_each_in_box(&[-1e9; 4], &[1e9; 4], |i| huge.push(i));
        assert_eq!(huge.len(), 500);
    }
}

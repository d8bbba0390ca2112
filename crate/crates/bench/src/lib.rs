//! Shared fixtures for the benchmarks.

use hypconv::counterexample::ExoticConfiguration;
use hypconv::{EPoint, HPoint};

/// `n` half-plane points spread over `[-5, 5] × [0.2, 5.2]` in a fixed pattern.
pub fn h2_points(n: usize) -> Vec<HPoint> {
    (0..n)
        .map(|i| {
            let s = i as f64 * 0.618_033_988_749_895;
            HPoint::new_unchecked(10.0 * s.fract() - 5.0, 0.2 + 5.0 * (s * std::f64::consts::SQRT_2).fract())
        })
        .collect()
}

/// Lifted seeds `A`, `B`, `C` of the exotic configuration.
pub fn exotic_seeds() -> [EPoint<HPoint>; 3] {
    ExoticConfiguration::new().seeds()
}

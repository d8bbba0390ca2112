//! Sampled verification of the ruler, betweenness and incidence axioms.
//!
//! Samples are drawn sequentially from a seeded ChaCha stream and then
//! evaluated in parallel; violations are reported in sample order, so a
//! report depends only on the space, the parameters and the seed.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::GeodesicSpace;
use crate::error::{Error, Result};
use crate::fmt::fmt_num;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub sample: usize,
    pub what: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub check: String,
    pub space: String,
    pub seed: Option<u64>,
    pub samples: usize,
    pub skipped: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn collect(
        check: &str,
        space: String,
        samples: usize,
        tolerance: f64,
        outcomes: Vec<Outcome>,
    ) -> Self {
        let mut report = AxiomReport {
            check: check.to_string(),
            space,
            seed: None,
            samples,
            skipped: 0,
            tolerance,
            max_deviation: 0.0,
            violations: Vec::new(),
        };
        for (index, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Outcome::Skipped => report.skipped += 1,
                Outcome::Checked { deviation, failures } => {
                    report.max_deviation = report.max_deviation.max(deviation);
                    report.violations.extend(failures.into_iter().map(|what| Violation {
                        sample: index,
                        what,
                        deviation,
                    }));
                }
            }
        }
        report
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} on {}: {} samples, {} skipped, {} violations, max deviation {} (tol {})",
            self.check,
            self.space,
            self.samples,
            self.skipped,
            self.violations.len(),
            fmt_num(self.max_deviation),
            fmt_num(self.tolerance),
        )?;
        if let Some(seed) = self.seed {
            write!(f, ", seed {seed}")?;
        }
        for v in self.violations.iter().take(10) {
            write!(f, "\n  sample {}: {} (deviation {})", v.sample, v.what, fmt_num(v.deviation))?;
        }
        Ok(())
    }
}

enum Outcome {
    Skipped,
    Checked { deviation: f64, failures: Vec<String> },
}

/// Checks `d(c(τ), c(σ)) = |τ - σ|` for the arc-length reparametrization
/// `c(τ) = geod(a, b, τ / d(a, b))`, with τ, σ drawn from `[-10, 10]`.
pub fn check_ruler<S: GeodesicSpace>(
    space: &S,
    a: &S::Point,
    b: &S::Point,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(f64, f64)> = (0..samples)
        .map(|_| (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)))
        .collect();
    Ok(check_ruler_on(space, a, b, &pairs, tol)?.seeded(seed))
}

pub fn check_ruler_on<S: GeodesicSpace>(
    space: &S,
    a: &S::Point,
    b: &S::Point,
    pairs: &[(f64, f64)],
    tol: f64,
) -> Result<AxiomReport> {
    let len = space.dist(a, b);
    if len <= space.equality_tolerance() {
        return Err(Error::CoincidentPoints);
    }
    let segment = space.segment(a, b)?;
    let outcomes = pairs
        .par_iter()
        .map(|&(tau, sigma)| {
            use super::Segment;
            let p = segment.at(tau / len);
            let q = segment.at(sigma / len);
            let deviation = (space.dist(&p, &q) - (tau - sigma).abs()).abs();
            let failures = if deviation > tol {
                vec![format!("ruler distance at ({}, {})", fmt_num(tau), fmt_num(sigma))]
            } else {
                Vec::new()
            };
            Outcome::Checked { deviation, failures }
        })
        .collect();
    Ok(AxiomReport::collect("ruler", space.id(), pairs.len(), tol, outcomes))
}

/// Random `(a, b, t)` triples with `p = geod(a, b, t)`, `t ∈ (0.001, 0.999)`.
pub fn check_betweenness_axioms<S: GeodesicSpace>(
    space: &S,
    triples: usize,
    seed: u64,
    tol: f64,
) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<_> = (0..triples)
        .map(|_| {
            let a = space.sample_point(&mut rng);
            let b = space.sample_point(&mut rng);
            (a, b, rng.gen_range(0.001..0.999))
        })
        .collect();
    check_betweenness_on(space, &samples, tol).seeded(seed)
}

/// Betweenness axioms on explicit samples. Samples with `a = b` are skipped.
pub fn check_betweenness_on<S: GeodesicSpace>(
    space: &S,
    samples: &[(S::Point, S::Point, f64)],
    tol: f64,
) -> AxiomReport {
    let outcomes = samples
        .par_iter()
        .map(|(a, b, t)| {
            if space.dist(a, b) <= space.equality_tolerance() {
                return Outcome::Skipped;
            }
            let (Ok(p), Ok(c)) = (space.geod(a, b, *t), space.geod(a, b, 2.0)) else {
                return Outcome::Checked { deviation: f64::INFINITY, failures: vec!["geod failed".into()] };
            };
            let mut failures = Vec::new();
            if !space.is_between(a, &p, b, tol) {
                failures.push("(a p b) does not hold".to_string());
            }
            if !space.is_between(b, &p, a, tol) {
                failures.push("(b p a) does not hold".to_string());
            }
            if !space.is_between(a, b, &c, tol) {
                failures.push("no extension point beyond b".to_string());
            }
            if space.is_between(a, b, &p, tol) || space.is_between(&p, a, b, tol) {
                failures.push("exclusivity violated".to_string());
            }
            let excess = (space.dist(a, b) - space.dist(a, &p) - space.dist(&p, b)).abs();
            let off_line = space
                .line_through(a, b)
                .map(|line| space.distance_to_line(&line, &p))
                .unwrap_or(f64::INFINITY);
            Outcome::Checked { deviation: excess.max(off_line), failures }
        })
        .collect();
    AxiomReport::collect("betweenness", space.id(), samples.len(), tol, outcomes)
}

/// Random pairs `a ≠ b` with interior points `p = geod(a,b,t₁)`,
/// `q = geod(a,b,t₂)`, `t₁ ∈ [0.05, 0.45]`, `t₂ ∈ [0.55, 0.95]`.
pub fn check_incidence<S: GeodesicSpace>(
    space: &S,
    pairs: usize,
    seed: u64,
    tol: f64,
) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<_> = (0..pairs)
        .map(|_| {
            let a = space.sample_point(&mut rng);
            let b = space.sample_point(&mut rng);
            (a, b)
        })
        .collect();
    Ok(check_incidence_on(space, &samples, seed, tol)?.seeded(seed))
}

/// Incidence check on explicit point pairs; interior parameters are drawn from `seed`.
pub fn check_incidence_on<S: GeodesicSpace>(
    space: &S,
    pairs: &[(S::Point, S::Point)],
    seed: u64,
    tol: f64,
) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let params: Vec<(f64, f64)> = pairs
        .iter()
        .map(|_| (rng.gen_range(0.05..0.45), rng.gen_range(0.55..0.95)))
        .collect();
    if let Some((a, b)) = pairs.first() {
        // Surface unsupported spaces as an error rather than as violations.
        if let Err(Error::UnsupportedSpace(id)) = space.line_through(a, b) {
            return Err(Error::UnsupportedSpace(id));
        }
    }
    let outcomes = pairs
        .par_iter()
        .zip(params.par_iter())
        .map(|((a, b), &(t1, t2))| {
            if space.dist(a, b) <= space.equality_tolerance() {
                return Outcome::Skipped;
            }
            let result = (|| -> Result<(bool, f64)> {
                let p = space.geod(a, b, t1)?;
                let q = space.geod(a, b, t2)?;
                let ab = space.line_through(a, b)?;
                let pq = space.line_through(&p, &q)?;
                let deviation = space
                    .distance_to_line(&ab, &p)
                    .max(space.distance_to_line(&ab, &q))
                    .max(space.distance_to_line(&pq, a))
                    .max(space.distance_to_line(&pq, b));
                // Two points determine a line, so `a, b ∈ pq` means `pq = ab`. This
                // stays well conditioned where line parameters are not (arcs
                // with huge radii).
                Ok((space.lines_equal(&ab, &pq, tol) || deviation <= tol, deviation))
            })();
            match result {
                Ok((true, deviation)) => Outcome::Checked { deviation, failures: Vec::new() },
                Ok((false, deviation)) => Outcome::Checked {
                    deviation,
                    failures: vec![format!("line through interior points differs (t = {}, {})", fmt_num(t1), fmt_num(t2))],
                },
                Err(e) => Outcome::Checked { deviation: f64::INFINITY, failures: vec![e.to_string()] },
            }
        })
        .collect();
    Ok(AxiomReport::collect("incidence", space.id(), pairs.len(), tol, outcomes))
}

/// Ruler, betweenness and incidence checks with `samples` samples each. The
/// ruler check runs on the first pair of distinct points drawn from `seed`.
pub fn run_suite<S: GeodesicSpace>(space: &S, samples: usize, seed: u64, tol: f64) -> Result<Vec<AxiomReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = space.sample_point(&mut rng);
    let mut b = space.sample_point(&mut rng);
    while space.dist(&a, &b) <= space.equality_tolerance() {
        b = space.sample_point(&mut rng);
    }
    Ok(vec![
        check_ruler(space, &a, &b, samples, seed, tol)?,
        check_betweenness_axioms(space, samples, seed, tol),
        check_incidence(space, samples, seed, tol)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom_h2::HPoint;
    use crate::spaces::{Chart, Euclidean, HyperbolicPlane, Segment};
    use crate::vertical_ext::{EPoint, VerticalExtension};

    #[test]
    fn euclidean_ruler_is_exact() {
        let r = check_ruler(&Euclidean::<2>, &[0.0, 0.0], &[3.0, 4.0], 1000, 7, 1e-12).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.max_deviation <= 1e-12);
    }

    #[test]
    fn hyperbolic_ruler() {
        let a = HPoint::new_unchecked(0.0, 3.0);
        let b = HPoint::new_unchecked(4.0, 5.0);
        let r = check_ruler(&HyperbolicPlane, &a, &b, 1000, 7, 1e-9).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn extension_ruler() {
        let s = VerticalExtension::new(HyperbolicPlane);
        let a = EPoint::new(HPoint::new_unchecked(0.0, 3.0), 0.0);
        let b = EPoint::new(HPoint::new_unchecked(4.0, 5.0), 1.0);
        let r = check_ruler(&s, &a, &b, 1000, 7, 1e-9).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn betweenness_suites() {
        let r = check_betweenness_axioms(&Euclidean::<3>, 1000, 1, 1e-9);
        assert!(r.passed(), "{r}");
        let r = check_betweenness_axioms(&HyperbolicPlane, 1000, 1, 1e-9);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn degenerate_triples_are_skipped() {
        let a = [1.0, 2.0];
        let r = check_betweenness_on(&Euclidean::<2>, &[(a, a, 0.5), (a, [2.0, 2.0], 0.5)], 1e-9);
        assert_eq!(r.skipped, 1);
        assert!(r.passed());
    }

    #[test]
    fn incidence_suites() {
        assert!(check_incidence(&HyperbolicPlane, 1000, 3, 1e-9).unwrap().passed());
        assert!(check_incidence(&Euclidean::<2>, 1000, 3, 1e-9).unwrap().passed());
        let s = VerticalExtension::new(HyperbolicPlane);
        let pairs: Vec<_> = (0..200)
            .map(|i| {
                let base = HPoint::new_unchecked(i as f64 * 0.05 - 5.0, 1.0 + i as f64 * 0.01);
                (EPoint::new(base, -1.0), EPoint::new(base, 2.0 + i as f64))
            })
            .collect();
        let r = check_incidence_on(&s, &pairs, 3, 1e-9).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn seeded_reports_are_reproducible() {
        let a = check_betweenness_axioms(&HyperbolicPlane, 200, 42, 1e-9);
        let b = check_betweenness_axioms(&HyperbolicPlane, 200, 42, 1e-9);
        assert_eq!(a, b);
        assert_eq!(a.seed, Some(42));
    }

    /// A space with a metric but no lines.
    struct Lineless;
    struct Step([f64; 1], [f64; 1]);
    impl Segment<[f64; 1]> for Step {
        fn at(&self, t: f64) -> [f64; 1] {
            [self.0[0] + t * (self.1[0] - self.0[0])]
        }
    }
    impl GeodesicSpace for Lineless {
        type Point = [f64; 1];
        type Line = ();
        type Segment = Step;
        fn id(&self) -> String {
            "lineless".into()
        }
        fn dist(&self, a: &[f64; 1], b: &[f64; 1]) -> f64 {
            (a[0] - b[0]).abs()
        }
        fn segment(&self, a: &[f64; 1], b: &[f64; 1]) -> Result<Step> {
            Ok(Step(*a, *b))
        }
        fn line_point(&self, _: &(), _: f64) -> [f64; 1] {
            [0.0]
        }
        fn line_coordinate(&self, _: &(), _: &[f64; 1]) -> f64 {
            0.0
        }
        fn lines_equal(&self, _: &(), _: &(), _: f64) -> bool {
            false
        }
        fn chart_dim(&self) -> usize {
            1
        }
        fn chart(&self, p: &[f64; 1]) -> Chart {
            [p[0], 0.0, 0.0, 0.0]
        }
        fn chart_ball_bounds(&self, p: &[f64; 1], r: f64) -> (Chart, Chart) {
            ([p[0] - r, 0.0, 0.0, 0.0], [p[0] + r, 0.0, 0.0, 0.0])
        }
        fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 1] {
            [rng.gen_range(-1.0..1.0)]
        }
    }

    #[test]
    fn suites_pass_for_every_space() {
        fn all_pass<S: GeodesicSpace>(space: &S) {
            for r in run_suite(space, 1000, 42, 1e-9).unwrap() {
                assert!(r.passed(), "{r}");
                assert_eq!(r.samples, 1000);
            }
        }
        all_pass(&Euclidean::<1>);
        all_pass(&Euclidean::<2>);
        all_pass(&Euclidean::<3>);
        all_pass(&HyperbolicPlane);
        all_pass(&VerticalExtension::new(HyperbolicPlane));
        all_pass(&VerticalExtension::new(Euclidean::<2>));
    }

    #[test]
    fn incidence_needs_lines() {
        assert_eq!(
            check_incidence(&Lineless, 10, 0, 1e-9),
            Err(Error::UnsupportedSpace("lineless".into()))
        );
    }
}

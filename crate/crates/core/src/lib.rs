//! Geodesic convexity in the hyperbolic half-plane, Euclidean spaces and
//! their vertical extensions.
//!
//! The crate approximates convex hulls by the Kantorovich iteration
//! ([`hull`]), certifies that `H² × ℝ` is not drop complete
//! ([`counterexample`]) and builds sampled convex separators
//! ([`separator`]). Geometry lives in [`geom_h2`], [`spaces`] and
//! [`vertical_ext`].

pub mod counterexample;
pub mod error;
pub mod fmt;
pub mod geom_h2;
pub mod grid;
pub mod hull;
pub mod io;
pub mod separator;
pub mod spaces;
pub mod vertical_ext;

pub use error::{Error, Result};
pub use geom_h2::{
    dist_h2, from_klein, geod_h2, geodesic_through, is_between, on_segment, point_to_geodesic_distance,
    segment_intersection, to_klein, Geodesic, H2Segment, HPoint, KleinPoint, SegmentIntersection,
};
pub use hull::{
    covers, drop_set, generator_witness, hausdorff, kantorovich_hull, kantorovich_hull_with, slice, CloudIndex,
    HullParams, PointCloud, PointMeta, SlicePlane,
};
pub use separator::{SampledFunction, SeparatorResult};
pub use spaces::checks::AxiomReport;
pub use spaces::{Euclidean, GeodesicSpace, HyperbolicPlane, Segment};
pub use vertical_ext::{reconstruct_height, EPoint, VerticalExtension};

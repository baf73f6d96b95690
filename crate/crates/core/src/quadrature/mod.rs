//! Angular quadrature on the unit circle and spatial rules on polygons and segments.

mod angular;
mod spatial;

pub use angular::AngularQuadrature;
pub use spatial::{
    gauss_legendre, polygon_rule, segment_rule, triangle_rule, PolygonRule, SegmentRule,
};

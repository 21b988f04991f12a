//! The nodal set `{u = 0}` of discrete fields and the quantities measured on it.

mod contour;
mod measures;

pub use contour::{zero_contour, ContourVertex, FreeBoundary, Polyline, RadialCrossing};
pub use measures::{
    contour_measures, euler_lagrange_residual, free_boundary, region_areas, EulerLagrangeResidual,
    RegionAreas,
};

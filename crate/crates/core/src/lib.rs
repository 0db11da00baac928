//! Tangent analysis of sampled sets in Euclidean space: weak-tangent distances,
//! pointed Gromov-Hausdorff estimates, Hausdorff and packing contents, and
//! generators for the classical counterexample families.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod content;
pub mod demos;
pub mod generators;
pub mod error;
pub mod gh;
pub mod kdtree;
pub mod metric;
pub mod pointset;
pub mod report;
pub mod tangent;
pub mod thresholds;

pub use error::{GeoError, Result};
pub use pointset::{intersect_ball, Ball, EuclideanPointSet, PointedSet};
pub use metric::{excess, gromov_pointed_distance, relative_ww_distance};
pub use gh::{
    correspondence_distortion, dgh_window, epsilon_isometry_defect, glue, pgh_oracle, pgha_defect, xi_estimate,
    Correspondence, FiniteMetricSpace, GhEstimate, GluedSpace, SearchMode,
};
pub use content::{
    hausdorff_content_upper, lower_regularity_scan, packing_content_lower, packing_premeasure_estimate, ContentEstimate,
    Direction, RegularityScan, SampleSpace, WitnessBall,
};
pub use tangent::{
    analyze, approx_tangent_trim, aw_cauchy_scan, blow_up, expansivity_probe, gh_tangent_scan, norm_fit, plane_fit_distance,
    BlowUp, NormProfile, TangentReport, Verdict,
};
pub use thresholds::Thresholds;

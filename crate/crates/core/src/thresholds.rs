//! Pinned numeric thresholds for verdicts and demo claims.
//!
//! Bump [`THRESHOLDS_VERSION`] whenever a value changes; every report echoes the table.

use serde::{Deserialize, Serialize};

pub const THRESHOLDS_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub version: String,
    /// Final-scale plane-fit score at or below which a point reads as flat.
    pub flat_score: f64,
    /// Largest pairwise Attouch-Wets entry over the last scales for a Cauchy verdict.
    pub cauchy_tail: f64,
    /// Number of finest scales forming the Cauchy tail.
    pub tail_scales: usize,
    /// Plane-fit score at or above which (at every scale) a point reads as non-flat.
    pub nonflat_score: f64,
    /// Largest pairwise GH value for a unique-GH-tangent verdict.
    pub gh_unique: f64,
    /// Largest pairwise GH value compatible with a rotating verdict.
    pub gh_rotating: f64,
    /// Smallest pairwise AW value that counts as rotation when GH values are small.
    pub aw_rotating: f64,
    /// Spiral rotation identity: allowed multiple of h/r.
    pub rotation_slack_factor: f64,
    /// Approximate tangents: trimmed-mass ratio ceiling.
    pub trimmed_mass_ratio: f64,
    /// Approx-vs-true: ceiling on the distance to the full-space ball.
    pub full_space_distance: f64,
    /// Poke graph: relative slack on the cumulative energy bound π²/6.
    pub energy_slack: f64,
    /// Packing divergence: fraction of the plane mass each level must reach.
    pub level_sum_fraction: f64,
    /// Smooth-graph flatness: allowed factor between score and scale.
    pub decay_factor: f64,
    /// Norm fit: relative error against the reference unit ball.
    pub norm_fit_relative: f64,
    /// Half-angle in degrees of the direction cones used by the norm fit.
    pub norm_cone_degrees: f64,
    /// Plane-fit score above which the norm fit refuses a window.
    pub norm_fit_max_score: f64,
    /// Relative slack for the randomized inequality suite.
    pub inequality_slack: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            version: THRESHOLDS_VERSION.to_string(),
            flat_score: 0.05,
            cauchy_tail: 0.05,
            tail_scales: 3,
            nonflat_score: 0.1,
            gh_unique: 0.08,
            gh_rotating: 0.05,
            aw_rotating: 0.1,
            rotation_slack_factor: 3.0,
            trimmed_mass_ratio: 0.02,
            full_space_distance: 0.2,
            energy_slack: 0.05,
            level_sum_fraction: 0.5,
            decay_factor: 2.0,
            norm_fit_relative: 0.1,
            norm_cone_degrees: 10.0,
            norm_fit_max_score: 0.1,
            inequality_slack: 1e-9,
        }
    }
}

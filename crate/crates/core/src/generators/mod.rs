//! Deterministic constructors for the example sets, and the expansive ball tree.

mod ball_tree;
mod cantor_cone;
mod comb;
mod fixtures;
mod poke;
mod spiked_cube;
mod spiral;
mod whitney;

pub use ball_tree::{build_ball_tree, BallTree, BallTreeOptions, TreeBall};
pub use cantor_cone::{gen_cantor_cone_graph, CantorConeGraph, Tent};
pub use comb::{dyadic_comb_heights, gen_comb};
pub use fixtures::{cone_patch, paraboloid_patch, plane_patch, taxicab_grid};
pub use poke::{gen_poke_graph, PokeBall, PokeGraph, PokeOptions};
pub use spiked_cube::{gen_spiked_cube, spike_level_count};
pub use spiral::{gen_spiral, spiral_point};
pub use whitney::{gen_whitney_disks, WhitneyCube, WhitneyDisks};

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::pointset::EuclideanPointSet;

/// Refinement of a planar sampling grid around a focus point.
///
/// Level `j` (1-based) adds a grid of spacing `h / 2^j` over the box of
/// half-width `pad + width · 2^{-j}` around `center`. Refined samples carry no mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refine {
    pub center: Vec<f64>,
    pub levels: usize,
    pub pad: f64,
    pub width: f64,
}

/// A generator and its parameters, as accepted on the command line or as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Spiral {
        t_min: f64,
        t_max: f64,
        h: f64,
    },
    SpikedCube {
        n: usize,
        k_max: usize,
        h: f64,
        spike_step: Option<f64>,
    },
    WhitneyDisks {
        n: usize,
        d: usize,
        depth: usize,
        h: f64,
        /// Radii rule `r(Q) = ℓ(Q)^p`.
        p: f64,
    },
    CantorConeGraph {
        n: usize,
        depth: usize,
        h: f64,
    },
    PokeGraph {
        n: usize,
        depth: usize,
        h: f64,
        alpha_margin: f64,
        lambda: Option<Vec<f64>>,
        #[serde(default)]
        refine: Vec<Refine>,
    },
    Comb {
        teeth: usize,
        h: f64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<EuclideanPointSet> {
        match self {
            GeneratorSpec::Spiral { t_min, t_max, h } => gen_spiral(*t_min, *t_max, *h),
            GeneratorSpec::SpikedCube { n, k_max, h, spike_step } => {
                gen_spiked_cube(*n, *k_max, *h, spike_step.unwrap_or(h / 4.0))
            }
            GeneratorSpec::WhitneyDisks { n, d, depth, h, p } => Ok(gen_whitney_disks(*n, *d, *depth, *h, *p)?.set),
            GeneratorSpec::CantorConeGraph { n, depth, h } => Ok(gen_cantor_cone_graph(*n, *depth, *h)?.set),
            GeneratorSpec::PokeGraph { n, depth, h, alpha_margin, lambda, refine } => {
                let opts = PokeOptions {
                    alpha_margin: *alpha_margin,
                    lambda: lambda.clone(),
                    refine: refine.clone(),
                    ..PokeOptions::default()
                };
                Ok(gen_poke_graph(*n, *depth, *h, &opts)?.set)
            }
            GeneratorSpec::Comb { teeth, h } => {
                let base = unit_interval(*h)?;
                gen_comb(&base, *teeth, dyadic_comb_heights)
            }
        }
    }
}

pub(crate) fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(GeoError::InvalidParameter(format!("resolution h must be positive, got {h}")));
    }
    Ok(())
}

/// Number of intervals per axis so that the spacing `1/m` is at most `h`.
pub(crate) fn intervals_for(h: f64) -> usize {
    (1.0 / h - 1e-9).ceil().max(1.0) as usize
}

/// Lattice `{0, 1/m, ..., 1}^n` in lexicographic order, with product trapezoid weights summing to 1.
pub(crate) fn unit_grid(n: usize, m: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let per_axis = m + 1;
    let total = per_axis.pow(n as u32);
    let mut pts = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let w1 = |i: usize| if i == 0 || i == m { 0.5 / m as f64 } else { 1.0 / m as f64 };
    for code in 0..total {
        let mut c = code;
        let mut p = vec![0.0; n];
        let mut w = 1.0;
        for k in (0..n).rev() {
            let i = c % per_axis;
            c /= per_axis;
            p[k] = i as f64 / m as f64;
            w *= w1(i);
        }
        pts.push(p);
        weights.push(w);
    }
    (pts, weights)
}

/// Extra samples of `[0,1]^n` from a [`Refine`] schedule; spacing starts at `h/2`.
pub(crate) fn refined_points(n: usize, h: f64, refine: &Refine) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for j in 1..=refine.levels {
        let step = h / 2f64.powi(j as i32);
        let half = refine.pad + refine.width * 2f64.powi(-(j as i32));
        let lo: Vec<i64> = (0..n).map(|k| ((refine.center[k] - half).max(0.0) / step).ceil() as i64).collect();
        let hi: Vec<i64> = (0..n).map(|k| ((refine.center[k] + half).min(1.0) / step).floor() as i64).collect();
        let mut idx = lo.clone();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            continue;
        }
        loop {
            out.push(idx.iter().map(|&i| i as f64 * step).collect());
            let mut k = 0;
            loop {
                if k == n {
                    break;
                }
                idx[k] += 1;
                if idx[k] <= hi[k] {
                    break;
                }
                idx[k] = lo[k];
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }
    out
}

/// `[0,1]` sampled at spacing at most `h`, with trapezoid weights.
pub fn unit_interval(h: f64) -> Result<EuclideanPointSet> {
    check_h(h)?;
    let m = intervals_for(h);
    let (pts, w) = unit_grid(1, m);
    EuclideanPointSet::from_points(&pts, 1.0 / m as f64, "unit interval")?.with_weights(w)
}

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::generators::{check_h, intervals_for, unit_grid};
use crate::pointset::EuclideanPointSet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhitneyCube {
    pub corner: Vec<f64>,
    /// Dyadic level: side is `2^{-level}`.
    pub level: usize,
    pub radius: f64,
}

impl WhitneyCube {
    pub fn side(&self) -> f64 {
        2f64.powi(-(self.level as i32))
    }

    pub fn center(&self) -> Vec<f64> {
        self.corner.iter().map(|c| c + self.side() / 2.0).collect()
    }
}

#[derive(Debug, Clone)]
pub struct WhitneyDisks {
    pub set: EuclideanPointSet,
    pub cubes: Vec<WhitneyCube>,
    /// `Σ r^n` over cubes of each dyadic level, indexed by level.
    pub level_sums: Vec<f64>,
}

fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

/// Dyadic Whitney cubes of `[0,1]^d` relative to `D = [0,1]^n × {0}`, down to side `2^{-depth}`.
///
/// A cube is kept once `diam(Q) ≤ dist(Q, D)`, which gives `diam ≤ dist < 4 diam`.
pub fn whitney_cubes(n: usize, d: usize, depth: usize) -> Vec<WhitneyCube> {
    let mut out = Vec::new();
    let mut stack = vec![(vec![0u64; d], 0usize)];
    while let Some((idx, level)) = stack.pop() {
        let side = 2f64.powi(-(level as i32));
        let corner: Vec<f64> = idx.iter().map(|&i| i as f64 * side).collect();
        let dist = corner[n..].iter().map(|c| c * c).sum::<f64>().sqrt();
        let diam = side * (d as f64).sqrt();
        if diam <= dist {
            out.push(WhitneyCube { corner, level, radius: 0.0 });
            continue;
        }
        if level == depth {
            continue;
        }
        for code in (0..1u64 << d).rev() {
            let child = idx.iter().enumerate().map(|(k, &i)| 2 * i + ((code >> k) & 1)).collect();
            stack.push((child, level + 1));
        }
    }
    out
}

/// `D` together with the `n`-disks `B^n(x_Q, ℓ(Q)^p)` parallel to `D` at Whitney centres.
///
/// Disks with radius below `h` are a single sample. Weights are trapezoid
/// weights on `D` and `volume / count` on each disk; marker `D` flags the base.
pub fn gen_whitney_disks(n: usize, d: usize, depth: usize, h: f64, p: f64) -> Result<WhitneyDisks> {
    if n == 0 || n >= d {
        return Err(GeoError::InvalidParameter(format!("need 1 <= n < d, got n={n}, d={d}")));
    }
    if depth == 0 || !(p > 0.0) {
        return Err(GeoError::InvalidParameter("depth must be >= 1 and p > 0".into()));
    }
    check_h(h)?;
    let mut cubes = whitney_cubes(n, d, depth);
    let mut level_sums = vec![0.0; depth + 1];
    for q in &mut cubes {
        q.radius = q.side().powf(p);
        level_sums[q.level] += q.radius.powi(n as i32);
    }
    let filled: Vec<f64> = level_sums.iter().copied().filter(|s| *s > 0.0).collect();
    if filled.len() >= 3 {
        let t = filled.len();
        let worst = (filled[t - 1] / filled[t - 2]).max(filled[t - 2] / filled[t - 3]);
        if worst > RATIO_LIMIT {
            return Err(GeoError::DivergentRadiiRule(worst));
        }
    }

    let m = intervals_for(h);
    let (grid, grid_w) = unit_grid(n, m);
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut base = Vec::new();
    for (g, w) in grid.iter().zip(&grid_w) {
        coords.extend_from_slice(g);
        coords.extend(std::iter::repeat_n(0.0, d - n));
        weights.push(*w);
        base.push(true);
    }
    let step = 1.0 / m as f64;
    let vol = unit_ball_volume(n);
    for q in &cubes {
        let c = q.center();
        let r = q.radius;
        let mut disk: Vec<Vec<f64>> = Vec::new();
        let span = (r / step).floor() as i64;
        let mut off = vec![-span; n];
        loop {
            let v: Vec<f64> = off.iter().map(|&o| o as f64 * step).collect();
            if v.iter().map(|x| x * x).sum::<f64>() <= r * r {
                let mut pt = c.clone();
                for k in 0..n {
                    pt[k] += v[k];
                }
                disk.push(pt);
            }
            let mut k = 0;
            while k < n {
                off[k] += 1;
                if off[k] <= span {
                    break;
                }
                off[k] = -span;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        let w = vol * r.powi(n as i32) / disk.len() as f64;
        for pt in disk {
            coords.extend_from_slice(&pt);
            weights.push(w);
            base.push(false);
        }
    }
    let mut set = EuclideanPointSet::new(d, coords, step, format!("whitney disks n={n} d={d} depth={depth}"))?.with_weights(weights)?;
    set.set_marker("D", base)?;
    Ok(WhitneyDisks { set, cubes, level_sums })
}

/// Largest admissible ratio between consecutive level sums of `Σ r^n`.
pub const RATIO_LIMIT: f64 = 0.95;

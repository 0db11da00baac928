use std::collections::VecDeque;

use crate::error::{GeoError, Result};
use crate::generators::check_h;
use crate::gh::FiniteMetricSpace;
use crate::pointset::EuclideanPointSet;

fn square_grid(half: f64, step: f64) -> Vec<[f64; 2]> {
    let k = (half / step + 1e-9).floor() as i64;
    let mut out = Vec::with_capacity(((2 * k + 1) * (2 * k + 1)) as usize);
    for i in -k..=k {
        for j in -k..=k {
            out.push([i as f64 * step, j as f64 * step]);
        }
    }
    out
}

fn graph_set(pts: Vec<[f64; 2]>, f: impl Fn(f64, f64) -> f64, h: f64, label: &str) -> Result<EuclideanPointSet> {
    let mut coords = Vec::with_capacity(pts.len() * 3);
    for [x, y] in pts {
        coords.extend_from_slice(&[x, y, f(x, y)]);
    }
    EuclideanPointSet::new(3, coords, h, label)
}

/// The plane `z = 0` over `[-half, half]^2`, grid step `h`; the origin is a sample.
pub fn plane_patch(half: f64, h: f64) -> Result<EuclideanPointSet> {
    check_h(h)?;
    graph_set(square_grid(half, h), |_, _| 0.0, h, "plane")
}

/// The cone `z = |(x, y)|` over `[-half, half]^2`.
pub fn cone_patch(half: f64, h: f64) -> Result<EuclideanPointSet> {
    check_h(h)?;
    graph_set(square_grid(half, h), |x, y| x.hypot(y), h * 2f64.sqrt(), "cone")
}

/// Graph of `x² + y²` near the origin: for each scale `r`, a grid of step `rel · r²`
/// over `[-2r, 2r]^2`, so the rescaled sampling step at scale `r` is `rel · r`.
pub fn paraboloid_patch(scales: &[f64], rel: f64) -> Result<EuclideanPointSet> {
    if scales.is_empty() {
        return Err(GeoError::EmptyInput);
    }
    let mut pts = Vec::new();
    let mut finest = f64::INFINITY;
    for &r in scales {
        if !(r > 0.0) {
            return Err(GeoError::NonpositiveRadius(r));
        }
        let step = rel * r * r;
        check_h(step)?;
        finest = finest.min(step);
        pts.extend(square_grid(2.0 * r, step));
    }
    graph_set(pts, |x, y| x * x + y * y, finest * 2f64.sqrt(), "paraboloid")
}

/// The grid graph on `{-m..m}^2` with path metric scaled by `1/m`, based at the centre,
/// together with its planar chart. The path metric is the ℓ¹ distance.
pub fn taxicab_grid(m: usize) -> Result<(FiniteMetricSpace, Vec<[f64; 2]>)> {
    if m == 0 {
        return Err(GeoError::InvalidParameter("m must be at least 1".into()));
    }
    let side = 2 * m + 1;
    let n = side * side;
    let chart: Vec<[f64; 2]> = (0..n)
        .map(|v| [(v / side) as f64 / m as f64 - 1.0, (v % side) as f64 / m as f64 - 1.0])
        .collect();
    let mut dist = vec![0.0; n * n];
    let mut hops = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        hops.fill(usize::MAX);
        hops[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            let (a, b) = (v / side, v % side);
            let mut visit = |w: usize| {
                if hops[w] == usize::MAX {
                    hops[w] = hops[v] + 1;
                    queue.push_back(w);
                }
            };
            if a > 0 {
                visit(v - side);
            }
            if a + 1 < side {
                visit(v + side);
            }
            if b > 0 {
                visit(v - 1);
            }
            if b + 1 < side {
                visit(v + 1);
            }
        }
        for t in 0..n {
            dist[s * n + t] = hops[t] as f64 / m as f64;
        }
    }
    let space = FiniteMetricSpace::new_unchecked(n, dist, Some(n / 2))?;
    Ok((space, chart))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taxicab_metric_is_l1() {
        let (space, chart) = taxicab_grid(3).unwrap();
        assert_eq!(chart[space.base().unwrap()], [0.0, 0.0]);
        for i in 0..space.len() {
            for j in 0..space.len() {
                let l1 = (chart[i][0] - chart[j][0]).abs() + (chart[i][1] - chart[j][1]).abs();
                assert!((space.d(i, j) - l1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn patches_contain_origin() {
        for s in [plane_patch(1.0, 0.1).unwrap(), cone_patch(1.0, 0.1).unwrap(), paraboloid_patch(&[0.25, 0.125], 1.0).unwrap()] {
            assert_eq!(s.nearest(&[0.0, 0.0, 0.0]).unwrap().1, 0.0);
        }
    }
}

use crate::error::{GeoError, Result};
use crate::generators::{check_h, intervals_for, unit_grid};
use crate::pointset::EuclideanPointSet;

/// `|V_k|`: new dyadic points at level `k` (all of `Ṽ_1` at `k = 1`).
pub fn spike_level_count(n: usize, k: usize) -> usize {
    let full = |k: usize| (2usize.pow(k as u32 - 1) + 1).pow(n as u32);
    if k == 1 {
        full(1)
    } else {
        full(k) - full(k - 1)
    }
}

/// The cube `[0,1]^n × {0}` with spikes `{x} × [-1/k, 1/k]` over `x ∈ V_k`, `k ≤ k_max`.
///
/// Plane samples sit on a grid of spacing at most `h` with trapezoid weights
/// summing to 1; spike samples (spacing `spike_step`) weigh nothing, spikes
/// being `H^n`-null for `n ≥ 2`. The marker `plane` flags the cube part.
pub fn gen_spiked_cube(n: usize, k_max: usize, h: f64, spike_step: f64) -> Result<EuclideanPointSet> {
    if n == 0 || k_max == 0 {
        return Err(GeoError::InvalidParameter("n and k_max must be at least 1".into()));
    }
    check_h(h)?;
    check_h(spike_step)?;
    let m = intervals_for(h);
    let (grid, grid_w) = unit_grid(n, m);
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut plane = Vec::new();
    for (p, w) in grid.iter().zip(&grid_w) {
        coords.extend_from_slice(p);
        coords.push(0.0);
        weights.push(*w);
        plane.push(true);
    }
    for k in 1..=k_max {
        let side = 2usize.pow(k as u32 - 1);
        let height = 1.0 / k as f64;
        let mut heights: Vec<f64> = (1..).map(|j| j as f64 * spike_step).take_while(|z| *z < height).collect();
        heights.push(height);
        let on_grid = m.is_multiple_of(side);
        let per_axis = side + 1;
        for code in 0..per_axis.pow(n as u32) {
            let mut c = code;
            let mut idx = vec![0usize; n];
            for slot in idx.iter_mut().rev() {
                *slot = c % per_axis;
                c /= per_axis;
            }
            // new at level k: some coordinate odd (level 1 keeps all corners)
            if k > 1 && idx.iter().all(|i| i % 2 == 0) {
                continue;
            }
            let base: Vec<f64> = idx.iter().map(|&i| i as f64 / side as f64).collect();
            let mut push = |z: f64| {
                coords.extend_from_slice(&base);
                coords.push(z);
                weights.push(0.0);
                plane.push(false);
            };
            if !on_grid {
                push(0.0);
            }
            for &z in &heights {
                push(z);
                push(-z);
            }
        }
    }
    let mut set = EuclideanPointSet::new(n + 1, coords, (1.0 / m as f64).max(spike_step), format!("spiked cube n={n} k_max={k_max}"))?
        .with_weights(weights)?;
    set.set_marker("plane", plane)?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spike_counts_and_mass() {
        let e = gen_spiked_cube(2, 4, 1.0 / 16.0, 1.0 / 16.0).unwrap();
        let plane = e.marker_indices("plane");
        let mass: f64 = plane.iter().map(|&i| e.mass(i)).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        // spike bases, grouped by the top of each spike
        let mut tops = std::collections::BTreeMap::new();
        for i in 0..e.len() {
            let p = e.point(i);
            if p[2] != 0.0 {
                let key = ((p[0] * 1024.0) as i64, (p[1] * 1024.0) as i64);
                let t = tops.entry(key).or_insert(0.0f64);
                *t = t.max(p[2]);
            }
        }
        for k in 1..=4 {
            let count = tops.values().filter(|t| **t == 1.0 / k as f64).count();
            assert_eq!(count, spike_level_count(2, k));
        }
        assert_eq!(spike_level_count(2, 3), 25 - 9);
        for i in 0..e.len() {
            let p = e.point(i);
            assert!(p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0);
        }
    }
}

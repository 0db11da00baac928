//! Set-distance kernels on finite point sets.

use rayon::prelude::*;

use crate::error::{GeoError, Result};
use crate::kdtree::{brute_nearest, sq_dist};
use crate::pointset::{EuclideanPointSet, PointedSet, BALL_TOL};

/// Below this many query points the nearest-neighbour loop stays sequential.
const PAR_THRESHOLD: usize = 4096;

fn check_dims(a: &EuclideanPointSet, b: &EuclideanPointSet) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(GeoError::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(())
}

/// Largest nearest-neighbour distance from the listed samples of `a` to `b`.
fn excess_of_indices(a: &EuclideanPointSet, idx: &[usize], b: &EuclideanPointSet) -> f64 {
    let tree = b.index();
    let nn = |&i: &usize| tree.nearest(a.point(i)).map_or(f64::INFINITY, |(_, d)| d);
    if idx.len() >= PAR_THRESHOLD {
        idx.par_iter().map(nn).reduce(|| 0.0, f64::max)
    } else {
        idx.iter().map(nn).fold(0.0, f64::max)
    }
}

/// `ex(A, B) = sup_{a in A} dist(a, B)`, with `ex(∅, B) = 0`.
pub fn excess(a: &EuclideanPointSet, b: &EuclideanPointSet) -> Result<f64> {
    check_dims(a, b)?;
    if b.is_empty() {
        return Err(GeoError::EmptySecondArgument);
    }
    let idx: Vec<usize> = (0..a.len()).collect();
    Ok(excess_of_indices(a, &idx, b))
}

/// Quadratic reference implementation of [`excess`].
pub fn excess_brute(a: &EuclideanPointSet, b: &EuclideanPointSet) -> Result<f64> {
    check_dims(a, b)?;
    if b.is_empty() {
        return Err(GeoError::EmptySecondArgument);
    }
    Ok(a.points()
        .map(|p| brute_nearest(b.coords(), b.dim(), p).map_or(f64::INFINITY, |(_, d)| d))
        .fold(0.0, f64::max))
}

fn window_indices_brute(a: &EuclideanPointSet, x: &[f64], r: f64) -> Vec<usize> {
    (0..a.len())
        .filter(|&i| sq_dist(a.point(i), x).sqrt() <= r + BALL_TOL)
        .collect()
}

fn check_ww(a: &EuclideanPointSet, b: &EuclideanPointSet, x: &[f64], r: f64) -> Result<()> {
    check_dims(a, b)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(GeoError::NonpositiveRadius(r));
    }
    if a.is_empty() {
        return Err(GeoError::EmptySet("first argument".into()));
    }
    if b.is_empty() {
        return Err(GeoError::EmptySet("second argument".into()));
    }
    if x.len() != a.dim() {
        return Err(GeoError::DimensionMismatch { expected: a.dim(), got: x.len() });
    }
    Ok(())
}

/// Relative Walkup-Wets distance
/// `D^{x,r}[A,B] = r^{-1} max(ex(A ∩ B(x,r), B), ex(B ∩ B(x,r), A))`.
pub fn relative_ww_distance(a: &EuclideanPointSet, b: &EuclideanPointSet, x: &[f64], r: f64) -> Result<f64> {
    check_ww(a, b, x, r)?;
    let ea = excess_of_indices(a, &a.within(x, r), b);
    let eb = excess_of_indices(b, &b.within(x, r), a);
    Ok(ea.max(eb) / r)
}

/// Quadratic reference implementation of [`relative_ww_distance`].
pub fn relative_ww_distance_brute(a: &EuclideanPointSet, b: &EuclideanPointSet, x: &[f64], r: f64) -> Result<f64> {
    check_ww(a, b, x, r)?;
    let one_side = |p: &EuclideanPointSet, q: &EuclideanPointSet| {
        window_indices_brute(p, x, r)
            .into_iter()
            .map(|i| brute_nearest(q.coords(), q.dim(), p.point(i)).map_or(f64::INFINITY, |(_, d)| d))
            .fold(0.0, f64::max)
    };
    Ok(one_side(a, b).max(one_side(b, a)) / r)
}

/// The grid `{step, 2 step, ..., 1}`; the final value is exactly 1.
pub fn epsilon_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < 1.0) {
        return Err(GeoError::InvalidGridStep(step));
    }
    let ratio = 1.0 / step;
    let mut m = ratio.round();
    if (ratio - m).abs() > 1e-9 * ratio {
        m = ratio.floor();
    }
    let m = m as usize;
    let mut grid: Vec<f64> = (1..=m).map(|j| j as f64 * step).filter(|e| *e < 1.0 - 1e-12).collect();
    grid.push(1.0);
    Ok(grid)
}

/// Gromov's pointed distance `H^x[A,B]` on an ε-grid.
///
/// Returns the smallest grid ε with `D^{x,1/ε}[A,B] ≤ ε²`, or 1 when no grid
/// value qualifies. Admissible values form an up-set, so a bisection suffices.
pub fn gromov_pointed_distance(a: &PointedSet, b: &EuclideanPointSet, grid_step: f64) -> Result<f64> {
    let grid = epsilon_grid(grid_step)?;
    let x = a.base_point().to_vec();
    let admissible = |eps: f64| -> Result<bool> { Ok(relative_ww_distance(&a.set, b, &x, 1.0 / eps)? <= eps * eps) };
    let last = grid.len() - 1;
    if !admissible(grid[last])? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0usize, last);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if admissible(grid[mid])? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(grid[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[f64]]) -> EuclideanPointSet {
        EuclideanPointSet::from_points(&v.iter().map(|p| p.to_vec()).collect::<Vec<_>>(), 0.0, "t").unwrap()
    }

    #[test]
    fn excess_examples() {
        let a = pts(&[&[0.0, 0.0], &[3.0, 4.0]]);
        let b = pts(&[&[0.0, 0.0]]);
        assert_eq!(excess(&a, &b).unwrap(), 5.0);
        assert_eq!(excess(&EuclideanPointSet::empty(2), &b).unwrap(), 0.0);
        let c = pts(&[&[3.0, 4.0], &[0.0, 1.0]]);
        assert_eq!(excess(&b, &c).unwrap(), 1.0);
        assert!(matches!(excess(&b, &EuclideanPointSet::empty(2)), Err(GeoError::EmptySecondArgument)));
    }

    #[test]
    fn ww_examples() {
        let a = pts(&[&[0.0]]);
        let b = pts(&[&[0.0], &[0.5]]);
        assert_eq!(relative_ww_distance(&a, &b, &[0.0], 1.0).unwrap(), 0.5);
        assert_eq!(relative_ww_distance(&a, &b, &[0.0], 2.0).unwrap(), 0.25);
        assert_eq!(relative_ww_distance(&b, &b, &[0.3], 0.7).unwrap(), 0.0);
        assert!(relative_ww_distance(&a, &b, &[0.0], 0.0).is_err());
    }

    #[test]
    fn gromov_examples() {
        let a = pts(&[&[0.0], &[0.25]]);
        let pa = PointedSet::new(a.clone(), 0).unwrap();
        assert_eq!(gromov_pointed_distance(&pa, &a, 1e-3).unwrap(), 1e-3);
        let single = PointedSet::new(pts(&[&[0.0]]), 0).unwrap();
        assert_eq!(gromov_pointed_distance(&single, &pts(&[&[1.0]]), 1e-3).unwrap(), 1.0);
        assert!(gromov_pointed_distance(&single, &a, 1.0).is_err());
    }

    #[test]
    fn grid_ends_at_one() {
        let g = epsilon_grid(0.3).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(epsilon_grid(1e-3).unwrap().len(), 1000);
    }
}

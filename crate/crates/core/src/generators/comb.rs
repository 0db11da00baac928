use crate::error::{GeoError, Result};
use crate::kdtree::sq_dist;
use crate::pointset::EuclideanPointSet;
use crate::tangent::farthest_point_subsample;

/// `y_n = 1 / log(n + 2)`, indexed from `n = 1`.
pub fn dyadic_comb_heights(n: usize) -> f64 {
    1.0 / ((n + 2) as f64).ln()
}

/// `X × {0}` plus teeth `(x_n, y_n)`, where `x_1, x_2, ...` enumerates base samples
/// in farthest-point order from the first sample (for `[0,1]`: 0, 1, 1/2, 1/4, 3/4, ...).
///
/// Base samples keep their weights; teeth weigh nothing. Marker `F` flags `X × {0}`.
pub fn gen_comb(base: &EuclideanPointSet, teeth: usize, y: impl Fn(usize) -> f64) -> Result<EuclideanPointSet> {
    if base.is_empty() {
        return Err(GeoError::EmptyInput);
    }
    let d = base.dim();
    let order = farthest_point_subsample(base.len(), 0, teeth, |i, j| sq_dist(base.point(i), base.point(j)).sqrt());
    let mut coords = Vec::with_capacity((base.len() + order.len()) * (d + 1));
    let mut weights = Vec::new();
    let mut flags = Vec::new();
    for i in 0..base.len() {
        coords.extend_from_slice(base.point(i));
        coords.push(0.0);
        weights.push(base.mass(i) * f64::from(u8::from(base.weights().is_some())));
        flags.push(true);
    }
    for (k, &i) in order.iter().enumerate() {
        let h = y(k + 1);
        if !(h > 0.0) || !h.is_finite() {
            return Err(GeoError::InvalidParameter(format!("tooth height {h} at n={}", k + 1)));
        }
        coords.extend_from_slice(base.point(i));
        coords.push(h);
        weights.push(0.0);
        flags.push(false);
    }
    let mut set = EuclideanPointSet::new(d + 1, coords, base.resolution(), format!("comb over {}", base.label()))?;
    if base.weights().is_some() {
        set = set.with_weights(weights)?;
    }
    set.set_marker("F", flags)?;
    Ok(set)
}

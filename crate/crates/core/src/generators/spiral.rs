use std::f64::consts::SQRT_2;

use crate::error::{GeoError, Result};
use crate::generators::check_h;
use crate::pointset::EuclideanPointSet;

/// The point `t e^{i log t}` of the logarithmic spiral.
pub fn spiral_point(t: f64) -> [f64; 2] {
    let a = t.ln();
    [t * a.cos(), t * a.sin()]
}

/// Origin plus the spiral over `[t_min, t_max]`, uniform in `t` with arc spacing at most `h`.
///
/// The curve has speed √2 in `t`, so the parameter step is `h/√2`.
pub fn gen_spiral(t_min: f64, t_max: f64, h: f64) -> Result<EuclideanPointSet> {
    if !(t_min > 0.0 && t_min < t_max && t_max.is_finite()) {
        return Err(GeoError::BadRange(format!("need 0 < t_min < t_max, got [{t_min}, {t_max}]")));
    }
    check_h(h)?;
    let dt = h / SQRT_2;
    let steps = ((t_max - t_min) / dt).ceil() as usize;
    let mut coords = Vec::with_capacity(2 * (steps + 2));
    coords.extend_from_slice(&[0.0, 0.0]);
    for k in 0..=steps {
        let t = (t_min + k as f64 * dt).min(t_max);
        coords.extend_from_slice(&spiral_point(t));
    }
    EuclideanPointSet::new(2, coords, h, format!("spiral t=[{t_min},{t_max}]"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spiral_basics() {
        let s = gen_spiral(1e-3, 1.0, 1e-3).unwrap();
        assert_eq!(s.point(0), &[0.0, 0.0]);
        let last = s.point(s.len() - 1);
        assert_eq!(last, &[1.0, 0.0]);
        for i in 1..s.len() {
            let p = s.point(i);
            let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((1e-3 - 1e-15..=1.0 + 1e-15).contains(&rho));
        }
        for i in 2..s.len() {
            let (a, b) = (s.point(i - 1), s.point(i));
            assert!(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt() <= 1e-3 + 1e-12);
        }
        assert!(gen_spiral(0.0, 1.0, 1e-3).is_err());
        assert!(gen_spiral(1.0, 0.5, 1e-3).is_err());
    }
}

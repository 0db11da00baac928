use geotan_core::generators::{cone_patch, gen_spiral};
use geotan_core::tangent::{aw_cauchy_scan, blow_up, blowup_distance, gh_tangent_scan};
use geotan_core::{pgh_oracle, EuclideanPointSet, FiniteMetricSpace, SearchMode};
use proptest::prelude::*;

fn rotate(e: &EuclideanPointSet, theta: f64) -> EuclideanPointSet {
    let (s, c) = theta.sin_cos();
    e.map_points(|p, q| {
        q[0] = c * p[0] - s * p[1];
        q[1] = s * p[0] + c * p[1];
        q[2..].copy_from_slice(&p[2..]);
    })
}

fn close(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn aw_scan_is_rotation_invariant(theta in 0.0f64..std::f64::consts::TAU) {
        let e = gen_spiral(1e-3, 1.0, 2e-3).unwrap();
        let scales = [0.25, 0.125, 0.0625];
        let a = aw_cauchy_scan(&e, &[0.0, 0.0], &scales, 1.0).unwrap();
        let b = aw_cauchy_scan(&rotate(&e, theta), &[0.0, 0.0], &scales, 1.0).unwrap();
        prop_assert!(close(&a, &b, 1e-9), "{a:?} vs {b:?}");
    }

    #[test]
    fn gh_scan_is_isometry_invariant(theta in 0.0f64..std::f64::consts::TAU, shift in -1.0f64..1.0) {
        let e = gen_spiral(1e-3, 1.0, 4e-3).unwrap();
        let moved = rotate(&e, theta).map_points(|p, q| {
            q[0] = p[0] + shift;
            q[1] = p[1] - shift;
        });
        let scales = [0.5, 0.25];
        let a = gh_tangent_scan(&e, &[0.0, 0.0], &scales, 1.0, 6, SearchMode::Exhaustive).unwrap();
        let b = gh_tangent_scan(&moved, &[shift, -shift], &scales, 1.0, 6, SearchMode::Exhaustive).unwrap();
        prop_assert!(close(&a, &b, 1e-9), "{a:?} vs {b:?}");
    }

    #[test]
    fn window_radius_is_quasi_monotone(r in 0.05f64..0.5, k in 1.5f64..4.0, big in 0.3f64..1.0, grow in 1.0f64..2.0) {
        let e = gen_spiral(1e-3, 1.0, 2e-3).unwrap();
        let reach = big * grow;
        let a = blow_up(&e, &[0.0, 0.0], r, reach).unwrap();
        let b = blow_up(&e, &[0.0, 0.0], r / k, reach).unwrap();
        let small = blowup_distance(&a, &b, big).unwrap();
        let large = blowup_distance(&a, &b, reach).unwrap();
        prop_assert!(small <= grow * large * (1.0 + 1e-9) + 1e-12, "{small} > {grow} * {large}");
    }
}

#[test]
fn cone_is_its_own_blow_up() {
    let h = 1.0 / 64.0;
    let e = cone_patch(1.0, h).unwrap();
    let x = [0.0, 0.0, 0.0];
    let scales = [0.5, 0.25];
    let scan = aw_cauchy_scan(&e, &x, &scales, 1.0).unwrap();
    // both windows sample the same cone; only the lattice spacing h/r differs
    let spacing = h / scales[1];
    assert!(scan[0][1] <= 2.0 * spacing, "{}", scan[0][1]);
    assert_eq!(scan[0][0], 0.0);
    assert_eq!(scan[0][1], scan[1][0]);
}

#[test]
fn rotated_window_has_zero_pointed_distance() {
    let e = gen_spiral(1e-3, 1.0, 4e-3).unwrap();
    let t = blow_up(&e, &[0.0, 0.0], 0.5, 1.0).unwrap();
    let idx: Vec<usize> = (0..t.window.len()).step_by((t.window.len() / 7).max(1)).take(7).collect();
    let mut pick = vec![t.origin_index];
    pick.extend(idx.into_iter().filter(|&i| i != t.origin_index).take(6));
    let sub = t.window.subset(&pick);
    let x = FiniteMetricSpace::from_point_set(&sub, Some(0)).unwrap();
    let y = FiniteMetricSpace::from_point_set(&rotate(&sub, 1.0), Some(0)).unwrap();
    let g = pgh_oracle(&x, &y, SearchMode::Exhaustive).unwrap();
    assert!(g.value <= 1e-12, "{}", g.value);
}

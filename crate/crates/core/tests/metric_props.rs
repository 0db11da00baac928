use geotan_core::metric::{epsilon_grid, excess_brute, relative_ww_distance_brute};
use geotan_core::{excess, gromov_pointed_distance, relative_ww_distance, EuclideanPointSet, PointedSet};
use proptest::prelude::*;

fn set_from(flat: Vec<f64>, dim: usize) -> EuclideanPointSet {
    EuclideanPointSet::new(dim, flat, 0.0, "prop").unwrap()
}

fn cloud(dim: usize, max: usize) -> impl Strategy<Value = EuclideanPointSet> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, dim), 1..max)
        .prop_map(move |pts| set_from(pts.concat(), dim))
}

// smallest grid value from which every larger grid value is admissible, by full sweep
fn sweep_oracle(a: &PointedSet, b: &EuclideanPointSet, step: f64) -> f64 {
    let grid = epsilon_grid(step).unwrap();
    let x = a.base_point().to_vec();
    let mut answer = 1.0;
    let mut all_ok = true;
    for &eps in grid.iter().rev() {
        let d = relative_ww_distance_brute(&a.set, b, &x, 1.0 / eps).unwrap();
        all_ok &= d <= eps * eps;
        if all_ok {
            answer = eps;
        }
    }
    answer
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn excess_matches_brute(a in cloud(2, 40), b in cloud(2, 40)) {
        prop_assert_eq!(excess(&a, &b).unwrap(), excess_brute(&a, &b).unwrap());
    }

    #[test]
    fn ww_matches_brute(a in cloud(3, 30), b in cloud(3, 30), x in prop::collection::vec(-2.0f64..2.0, 3), r in 0.1f64..4.0) {
        prop_assert_eq!(
            relative_ww_distance(&a, &b, &x, r).unwrap(),
            relative_ww_distance_brute(&a, &b, &x, r).unwrap()
        );
    }

    #[test]
    fn quasi_monotone(
        a in cloud(2, 30), b in cloud(2, 30),
        y in prop::collection::vec(-2.0f64..2.0, 2),
        s in 0.2f64..4.0, frac in 0.05f64..1.0, theta in 0.0f64..std::f64::consts::TAU, shift in 0.0f64..1.0,
    ) {
        let r = frac * s;
        let off = shift * (s - r);
        let x = vec![y[0] + off * theta.cos(), y[1] + off * theta.sin()];
        let small = relative_ww_distance(&a, &b, &x, r).unwrap();
        let large = relative_ww_distance(&a, &b, &y, s).unwrap();
        prop_assert!(small <= (s / r) * large * (1.0 + 1e-9) + 1e-12, "{small} vs {}", (s / r) * large);
    }

    #[test]
    fn weak_quasitriangle(a in cloud(2, 25), bb in cloud(2, 25), c in cloud(2, 25), pick in any::<prop::sample::Index>(), r in 0.05f64..3.0) {
        let x = bb.point(pick.index(bb.len())).to_vec();
        let lhs = relative_ww_distance(&a, &c, &x, r).unwrap();
        let rhs = 2.0 * relative_ww_distance(&a, &bb, &x, 2.0 * r).unwrap()
            + 2.0 * relative_ww_distance(&bb, &c, &x, 2.0 * r).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12, "{lhs} > {rhs}");
    }

    #[test]
    fn subset_has_zero_excess_and_ww_is_symmetric(b in cloud(2, 30), keep in prop::collection::vec(any::<bool>(), 30), r in 0.1f64..3.0) {
        let idx: Vec<usize> = (0..b.len()).filter(|&i| keep[i]).collect();
        let a = b.subset(&idx);
        prop_assert_eq!(excess(&a, &b).unwrap(), 0.0);
        if !a.is_empty() {
            let x = b.point(0).to_vec();
            prop_assert_eq!(relative_ww_distance(&a, &b, &x, r).unwrap(), relative_ww_distance(&b, &a, &x, r).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn grid_infimum_matches_full_sweep(a in cloud(1, 12), b in cloud(1, 12), step in prop::sample::select(vec![0.01, 0.02, 0.05, 0.1])) {
        let pa = PointedSet::new(a, 0).unwrap();
        prop_assert_eq!(gromov_pointed_distance(&pa, &b, step).unwrap(), sweep_oracle(&pa, &b, step));
    }
}

#[test]
fn segment_against_longer_segment() {
    let seg = |len: f64, n: usize| {
        set_from((0..=n).map(|i| len * i as f64 / n as f64).collect(), 1)
    };
    let a = PointedSet::new(seg(1.0, 1000), 0).unwrap();
    let b = seg(2.0, 2000);
    let fast = gromov_pointed_distance(&a, &b, 1e-3).unwrap();
    let swept = sweep_oracle(&a, &b, 1e-3);
    assert_eq!(fast, swept);
    // inside B(0, 1/ε) with 1/ε > 1 the second segment sticks out by 1/ε - 1, so
    // D = ε(1/ε - 1) = 1 - ε, admissible iff 1 - ε ≤ ε², i.e. ε ≥ (√5 - 1)/2
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    assert!(fast >= golden - 1e-3 && fast <= golden + 2e-3, "{fast}");
}

use geotan_core::{
    hausdorff_content_upper, lower_regularity_scan, packing_content_lower, packing_premeasure_estimate,
    EuclideanPointSet, FiniteMetricSpace,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cloud(max: usize) -> impl Strategy<Value = EuclideanPointSet> {
    (prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 2..max), 0.0f64..0.05)
        .prop_map(|(p, h)| EuclideanPointSet::from_points(&p, h, "cloud").unwrap())
}

// Σ diam(X ∩ B)^s over a witness, with diameters by explicit double loop
fn brute_cover_sum(x: &EuclideanPointSet, centers: &[(usize, f64)], s: f64) -> f64 {
    centers
        .iter()
        .map(|&(c, r)| {
            let inside: Vec<&[f64]> = x
                .points()
                .filter(|p| dist(p, x.point(c)) <= r + 1e-12)
                .collect();
            let mut d = 0.0f64;
            for a in &inside {
                for b in &inside {
                    d = d.max(dist(a, b));
                }
            }
            d.powf(s)
        })
        .sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn witnesses_revalidate_and_chain_holds(x in cloud(60), s in 0.5f64..2.5, radii in prop::collection::vec(0.01f64..0.3, 1..12)) {
        prop_assume!(radii.iter().all(|r| *r <= x.diameter()));
        let cover = hausdorff_content_upper(&x, s, 0.2).unwrap();
        cover.revalidate(&x).unwrap();
        let pack = packing_content_lower(&x, s, &radii).unwrap();
        pack.revalidate(&x).unwrap();
        let balls: Vec<(usize, f64)> = pack.witness.iter().map(|w| (w.sample, w.radius)).collect();
        let cover_sum = brute_cover_sum(&x, &balls, s);
        prop_assert!((pack.witness_cover_sum(&x) - cover_sum).abs() <= 1e-12 * cover_sum.max(1.0));
        prop_assert!(pack.value >= cover_sum);
    }

    #[test]
    fn extending_schedule_never_lowers_value(x in cloud(60), radii in prop::collection::vec(0.02f64..0.2, 1..8), extra in prop::collection::vec(0.001f64..1.0, 1..8)) {
        prop_assume!(radii.iter().all(|r| *r <= x.diameter()));
        let base = packing_content_lower(&x, 1.0, &radii).unwrap();
        let smallest = radii.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut longer = radii.clone();
        longer.extend(extra.iter().map(|f| f * smallest));
        let ext = packing_content_lower(&x, 1.0, &longer).unwrap();
        prop_assert!(ext.value >= base.value);
    }

    #[test]
    fn premeasure_monotone_under_halving(x in cloud(80), s in 0.5f64..2.0, frac in 0.05f64..1.0) {
        let diam = x.diameter();
        prop_assume!(diam > 0.0 && x.resolution() > 0.0);
        let delta = frac * diam;
        let big = packing_premeasure_estimate(&x, s, delta).unwrap();
        let small = packing_premeasure_estimate(&x, s, delta / 2.0).unwrap();
        big.revalidate(&x).unwrap();
        prop_assert!(small.value <= big.value);
    }
}

#[test]
fn uniform_square_is_lower_regular() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 20_000;
    let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let x = EuclideanPointSet::from_points(&pts, 0.0, "square").unwrap();
    let w = vec![1.0 / n as f64; n];
    let scan = lower_regularity_scan(&x, &w, 2.0, &[0.1, 0.2]).unwrap();
    // a corner sees a quarter disc, π/4 ≈ 0.785
    assert!(scan.min_ratio >= 0.7 && scan.min_ratio <= std::f64::consts::FRAC_PI_4 * 1.05, "{}", scan.min_ratio);
}

#[test]
fn metric_space_inputs() {
    let n = 101;
    let dist: Vec<f64> = (0..n * n).map(|k| ((k / n) as f64 - (k % n) as f64).abs() / 100.0).collect();
    let m = FiniteMetricSpace::new(n, dist, None).unwrap();
    let pack = packing_content_lower(&m, 1.0, &[0.125; 4]).unwrap();
    pack.revalidate(&m).unwrap();
    assert_eq!(pack.value, 1.0);
    let cover = hausdorff_content_upper(&m, 1.0, 0.1).unwrap();
    assert_eq!(cover.value, 0.0);
}

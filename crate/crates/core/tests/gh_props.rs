use geotan_core::gh::{read_metric_csv, Part};
use geotan_core::{
    correspondence_distortion, dgh_window, epsilon_isometry_defect, glue, pgh_oracle, pgha_defect, xi_estimate,
    Correspondence, FiniteMetricSpace, SearchMode,
};
use proptest::prelude::*;

fn euclid(points: &[Vec<f64>], base: usize) -> FiniteMetricSpace {
    let n = points.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        }
    }
    FiniteMetricSpace::new(n, dist, Some(base)).unwrap()
}

fn line(xs: &[f64], base: usize) -> FiniteMetricSpace {
    euclid(&xs.iter().map(|x| vec![*x]).collect::<Vec<_>>(), base)
}

// every relation containing the base pair, by subset enumeration
fn brute_min_distortion(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let all: Vec<(usize, usize)> = (0..x.len()).flat_map(|i| (0..y.len()).map(move |j| (i, j))).collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << all.len()) {
        let pairs: Vec<(usize, usize)> = (0..all.len()).filter(|k| mask >> k & 1 == 1).map(|k| all[k]).collect();
        let c = Correspondence::new(pairs);
        if let Ok(d) = correspondence_distortion(x, y, &c) {
            best = best.min(d);
        }
    }
    best
}

fn small_space(max: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 1..=max).prop_map(|p| euclid(&p, 0))
}

#[test]
fn three_point_example_matches_subset_enumeration() {
    let x = FiniteMetricSpace::new(3, vec![0., 1., 1., 1., 0., 1., 1., 1., 0.], Some(0)).unwrap();
    let y = FiniteMetricSpace::new(3, vec![0., 1., 1., 1., 0., 2., 1., 2., 0.], Some(0)).unwrap();
    assert_eq!(brute_min_distortion(&x, &y), 1.0);
    assert_eq!(pgh_oracle(&x, &y, SearchMode::Exhaustive).unwrap().value, 0.5);
}

#[test]
fn four_cycle_heuristic_bounds_exhaustive() {
    let cycle = |e: f64| {
        // vertices 0..4, edges 01, 12, 23 of length 1 and 30 of length e; shortest-path metric
        let w = [1.0, 1.0, 1.0, e];
        let mut d = vec![f64::INFINITY; 16];
        for i in 0..4 {
            d[i * 4 + i] = 0.0;
            let j = (i + 1) % 4;
            d[i * 4 + j] = w[i];
            d[j * 4 + i] = w[i];
        }
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    d[i * 4 + j] = d[i * 4 + j].min(d[i * 4 + k] + d[k * 4 + j]);
                }
            }
        }
        FiniteMetricSpace::new(4, d, Some(0)).unwrap()
    };
    let (x, y) = (cycle(1.0), cycle(1.2));
    let exact = pgh_oracle(&x, &y, SearchMode::Exhaustive).unwrap();
    assert_eq!(exact.value, brute_min_distortion(&x, &y) / 2.0);
    let heur = pgh_oracle(&x, &y, SearchMode::Heuristic { budget: 1000 }).unwrap();
    assert!(!heur.exact);
    assert!(heur.value >= exact.value);
}

#[test]
fn pgha_coarse_to_fine_samples() {
    let a: Vec<f64> = (0..5).map(|i| i as f64 / 4.0).collect();
    let b: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
    let phi: Vec<usize> = a.iter().map(|v| (v * 49.0).round() as usize).collect();
    let d = pgha_defect(&phi, &line(&a, 0), &line(&b, 0)).unwrap();
    assert!(d <= 0.13, "{d}");
}

#[test]
fn xi_identity_and_segment() {
    let x = line(&(0..=20).map(|i| i as f64 / 20.0).collect::<Vec<_>>(), 0);
    assert_eq!(xi_estimate(&x, &x, 1.0, 10_000).unwrap(), 0.0);
    let y = line(&(0..=20).rev().map(|i| i as f64 / 20.0).collect::<Vec<_>>(), 20);
    assert!(xi_estimate(&x, &y, 0.5, 10_000).unwrap() <= 1e-12);
}

#[test]
fn xi_upper_bounds_exhaustive_maps_on_spiral_subsample() {
    // six points of a logarithmic spiral near its pole, against a line through 0
    let spiral: Vec<Vec<f64>> = std::iter::once(vec![0.0, 0.0])
        .chain((0..5).map(|k| {
            let t = 1.0 + 0.45 * k as f64;
            let rho = 0.1 * (-t).exp() * 2.5;
            vec![rho * t.cos() * 2.0, rho * t.sin() * 2.0]
        }))
        .collect();
    let x = euclid(&spiral, 0);
    let y = line(&[0.0, -0.08, -0.04, 0.04, 0.08, 0.02], 0);
    let r = 0.1;
    let est = xi_estimate(&x, &y, r, 10_000).unwrap();
    let xb = x.ball(0, r);
    let yb = y.ball(0, r);
    let (xs, ys) = (x.subspace(&xb), y.subspace(&yb));
    let mut best = f64::INFINITY;
    let m = ys.len();
    let mut phi = vec![0usize; xs.len()];
    let free = xs.len() - 1;
    for code in 0..m.pow(free as u32) {
        let mut c = code;
        for slot in phi.iter_mut().skip(1) {
            *slot = c % m;
            c /= m;
        }
        best = best.min(pgha_defect(&phi, &xs, &ys).unwrap());
    }
    assert!(est >= best / r - 1e-12, "{est} < {}", best / r);
}

#[test]
fn glue_random_six_points() {
    let pts: Vec<Vec<f64>> = (0..6).map(|k| vec![(k as f64 * 1.7).sin() * 2.0, (k as f64 * 0.9).cos()]).collect();
    let x = euclid(&pts, 0);
    let sub = [1usize, 3, 4];
    let z_pts: Vec<Vec<f64>> = sub.iter().map(|&i| vec![-pts[i][1], pts[i][0], 0.5]).collect();
    let z = euclid(&z_pts, 0);
    let g = glue(&x, &sub, &z, &[0, 1, 2]).unwrap();
    let n = g.space.len();
    for a in 0..n {
        for b in 0..n {
            match (g.parts[a], g.parts[b]) {
                (Part::Z(p), Part::Z(q)) => assert_eq!(g.space.d(a, b), z.d(p, q)),
                (Part::X(u), Part::X(v)) => assert_eq!(g.space.d(a, b), x.d(u, v)),
                _ => {}
            }
            for c in 0..n {
                assert!(g.space.d(a, b) <= g.space.d(a, c) + g.space.d(c, b) + 1e-9);
            }
        }
    }
    let whole = glue(&x, &[0, 1, 2, 3, 4, 5], &x, &[0, 1, 2, 3, 4, 5]).unwrap();
    assert_eq!(whole.space, x);
}

#[test]
fn cone_transfer_on_bent_segment() {
    // X a gently bent line, Y a sampled line (a metric cone); r = 1
    let ts: Vec<f64> = (-44..=44).map(|k| k as f64 * 0.25).collect();
    let x = euclid(&ts.iter().map(|t| vec![*t, 0.02 * t.sin()]).collect::<Vec<_>>(), 44);
    let y = line(&ts, 44);
    for eps in [0.2, 0.1] {
        let d = dgh_window(&x, &y, 1.0 / eps, SearchMode::Heuristic { budget: 20_000 }).unwrap().value;
        assert!(d < eps * eps, "premise fails at {eps}: {d}");
        let xi = xi_estimate(&x, &y, 1.0 / eps, 20_000).unwrap();
        assert!(xi < 3.0 * eps * eps + 0.25 * eps, "{xi} at {eps}");
    }
}

#[test]
fn lower_triangular_csv() {
    let m = read_metric_csv("# base=0\n0\n2,0\n".as_bytes()).unwrap();
    assert_eq!(m, line(&[0.0, 2.0], 0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn exhaustive_matches_subset_enumeration(x in small_space(3), y in small_space(3)) {
        let exact = pgh_oracle(&x, &y, SearchMode::Exhaustive).unwrap().value;
        prop_assert!((exact - brute_min_distortion(&x, &y) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_symmetric_and_heuristic_above(x in small_space(6), y in small_space(6)) {
        let xy = pgh_oracle(&x, &y, SearchMode::Exhaustive).unwrap().value;
        let yx = pgh_oracle(&y, &x, SearchMode::Exhaustive).unwrap().value;
        prop_assert!((xy - yx).abs() < 1e-12);
        prop_assert!(xy >= 0.0);
        prop_assert_eq!(pgh_oracle(&x, &x, SearchMode::Exhaustive).unwrap().value, 0.0);
        let h = pgh_oracle(&x, &y, SearchMode::Heuristic { budget: 2000 }).unwrap().value;
        prop_assert!(h >= xy - 1e-12);
    }

    #[test]
    fn window_scaling(x in small_space(5), y in small_space(5), r in 0.2f64..2.0, k in 1.0f64..3.0) {
        let s = r * k;
        let dr = dgh_window(&x, &y, r, SearchMode::Exhaustive).unwrap().value;
        let ds = dgh_window(&x, &y, s, SearchMode::Exhaustive).unwrap().value;
        prop_assert!(dr <= (s / r) * ds * (1.0 + 1e-12) + 1e-12, "{dr} vs {}", (s / r) * ds);
    }

    #[test]
    fn isometry_pass_bounds_oracle(
        pts in prop::collection::vec(prop::collection::vec(-0.5f64..0.5, 2), 2..6),
        noise in prop::collection::vec(prop::collection::vec(-0.05f64..0.05, 2), 6),
        eps in 0.05f64..0.4,
    ) {
        let x = euclid(&pts, 0);
        let moved: Vec<Vec<f64>> = pts.iter().zip(&noise).map(|(p, e)| vec![p[0] + e[0], p[1] + e[1]]).collect();
        let y = euclid(&moved, 0);
        let f: Vec<usize> = (0..pts.len()).collect();
        let check = epsilon_isometry_defect(&f, &x, &y, eps).unwrap();
        // diameters are below 1/eps - eps, so the balls hold every point
        if check.pass {
            let v = pgh_oracle(&x, &y, SearchMode::Exhaustive).unwrap().value;
            prop_assert!(v <= 2.0 * eps + 1e-12);
        }
    }
}

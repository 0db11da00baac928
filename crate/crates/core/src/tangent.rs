//! Multi-scale blow-up diagnostics: Attouch-Wets scans, plane and norm fits,
//! approximate-tangent trimming, GH scans and expansivity probes.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::gh::{pgh_oracle, FiniteMetricSpace, SearchMode};
use crate::kdtree::sq_dist;
use crate::metric::relative_ww_distance;
use crate::pointset::{EuclideanPointSet, BALL_TOL};
use crate::thresholds::Thresholds;

/// A rescaled, recentred window `r^{-1}(E - c) ∩ B(0, R)`.
///
/// `support` is the same blow-up cut at `2R`. Every point of the window is
/// within `R` of the origin, which belongs to both sets, so nearest neighbours
/// of window points always lie in the support; distances computed against it
/// equal those against the uncut blow-up.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowUp {
    pub window: EuclideanPointSet,
    pub support: EuclideanPointSet,
    pub origin_index: usize,
    pub scale: f64,
    pub window_radius: f64,
    /// The sample of E used as centre.
    pub center: Vec<f64>,
    pub source: String,
}

/// Mass of sample `i` for exponent `s`: its weight, or `h^s` on unweighted sets.
pub fn sample_mass(set: &EuclideanPointSet, i: usize, s: f64) -> f64 {
    match set.weights() {
        Some(w) => w[i],
        None => set.resolution().powf(s),
    }
}

fn check_scale(r: f64, big_r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(GeoError::NonpositiveRadius(r));
    }
    if !(big_r > 0.0) || !big_r.is_finite() {
        return Err(GeoError::NonpositiveRadius(big_r));
    }
    Ok(())
}

fn rescale(e: &EuclideanPointSet, idx: &[usize], c: &[f64], r: f64) -> EuclideanPointSet {
    let mut out = e.subset(idx).map_points(|p, q| {
        for k in 0..p.len() {
            q[k] = (p[k] - c[k]) / r;
        }
    });
    out.set_resolution(e.resolution() / r);
    out
}

/// Blows `E` up at the sample nearest to `x`, which must lie within the resolution.
pub fn blow_up(e: &EuclideanPointSet, x: &[f64], r: f64, big_r: f64) -> Result<BlowUp> {
    check_scale(r, big_r)?;
    if x.len() != e.dim() {
        return Err(GeoError::DimensionMismatch { expected: e.dim(), got: x.len() });
    }
    let (ci, d) = e.nearest(x).ok_or(GeoError::EmptyInput)?;
    if d > e.resolution() + BALL_TOL {
        return Err(GeoError::PointNotInSet { distance: d, resolution: e.resolution() });
    }
    let c = e.point(ci).to_vec();
    let support_idx = e.within(&c, 2.0 * big_r * r);
    let support = rescale(e, &support_idx, &c, r);
    let window_local = support.within(&vec![0.0; e.dim()], big_r);
    let window = support.subset(&window_local);
    let origin_index = window
        .nearest(&vec![0.0; e.dim()])
        .map(|(i, _)| i)
        .expect("the centre sample is in its own window");
    let mut window = window;
    window.set_label(format!("{} blown up at {:?}, r={r}", e.label(), c));
    Ok(BlowUp {
        window,
        support,
        origin_index,
        scale: r,
        window_radius: big_r,
        center: c,
        source: e.label().to_string(),
    })
}

/// `D^{0,R}` between two blow-ups, computed on their supports.
pub fn blowup_distance(a: &BlowUp, b: &BlowUp, big_r: f64) -> Result<f64> {
    let origin = vec![0.0; a.support.dim()];
    relative_ww_distance(&a.support, &b.support, &origin, big_r)
}

/// Pairwise `D^{0,R}[blow_up(r_i), blow_up(r_j)]` over the scales.
pub fn aw_cauchy_scan(e: &EuclideanPointSet, x: &[f64], scales: &[f64], big_r: f64) -> Result<Vec<Vec<f64>>> {
    if scales.len() < 2 {
        return Err(GeoError::InvalidParameter("need at least two scales".into()));
    }
    let blowups = scales.iter().map(|&r| blow_up(e, x, r, big_r)).collect::<Result<Vec<_>>>()?;
    pairwise(&blowups, |a, b| blowup_distance(a, b, big_r))
}

fn pairwise<T: Sync>(items: &[T], f: impl Fn(&T, &T) -> Result<f64> + Sync) -> Result<Vec<Vec<f64>>> {
    let k = items.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let values = pairs.par_iter().map(|&(i, j)| f(&items[i], &items[j])).collect::<Result<Vec<_>>>()?;
    let mut m = vec![vec![0.0; k]; k];
    for (&(i, j), v) in pairs.iter().zip(values) {
        m[i][j] = v;
        m[j][i] = v;
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneFit {
    /// Orthonormal basis of the fitted n-plane through 0.
    pub basis: Vec<Vec<f64>>,
    /// `D^{0,R}[T, plane]`: the larger of the two sides below.
    pub score: f64,
    /// Largest window-point distance to the plane over R (exact).
    pub window_side: f64,
    /// Largest distance from a dense plane-disc sample to T over R.
    pub plane_side: f64,
}

fn dist_to_plane(p: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut res = p.to_vec();
    for b in basis {
        let c: f64 = p.iter().zip(b).map(|(u, v)| u * v).sum();
        for (x, y) in res.iter_mut().zip(b) {
            *x -= c * y;
        }
    }
    res.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Uncentred weighted principal subspace of the window (uniform when no weight is positive).
fn principal_plane(window: &EuclideanPointSet, n: usize) -> Result<Vec<Vec<f64>>> {
    let d = window.dim();
    if n == 0 || n >= d {
        return Err(GeoError::InvalidParameter(format!("plane dimension {n} in R^{d}")));
    }
    if window.len() < n + 1 {
        return Err(GeoError::DegenerateWindow { needed: n + 1 });
    }
    let moments = |weighted: bool| {
        let mut m = DMatrix::<f64>::zeros(d, d);
        for (i, p) in window.points().enumerate() {
            let w = if weighted { window.weights().unwrap()[i] } else { 1.0 };
            if w == 0.0 {
                continue;
            }
            for a in 0..d {
                for b in a..d {
                    m[(a, b)] += w * p[a] * p[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                m[(a, b)] = m[(b, a)];
            }
        }
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
        let top = eig.eigenvalues[order[0]];
        let ok = top > 0.0 && eig.eigenvalues[order[n - 1]] > 1e-12 * top;
        (eig, order, top, ok)
    };
    // weightless samples only count when the weighted ones do not span n dimensions
    let weighted = window.weights().is_some_and(|w| w.iter().any(|v| *v > 0.0));
    let (mut eig, mut order, mut top, mut ok) = moments(weighted);
    if !ok && weighted {
        (eig, order, top, ok) = moments(false);
    }
    if !ok {
        return Err(GeoError::DegenerateWindow { needed: n + 1 });
    }
    let vec_of = |k: usize| -> Vec<f64> { eig.eigenvectors.column(order[k]).iter().cloned().collect() };
    let mut basis: Vec<Vec<f64>> = (0..n).map(vec_of).collect();
    // a tie across the cut leaves the plane undetermined; resolve it inside the tied pair
    let lam_n = eig.eigenvalues[order[n - 1]];
    let lam_next = eig.eigenvalues[order[n]];
    if (lam_n - lam_next).abs() <= 1e-9 * top {
        let u = vec_of(n - 1);
        let v = vec_of(n);
        let mut best = (f64::INFINITY, u.clone());
        for k in 0..180 {
            let t = (k as f64).to_radians();
            let cand: Vec<f64> = u.iter().zip(&v).map(|(a, b)| t.cos() * a + t.sin() * b).collect();
            basis[n - 1] = cand.clone();
            let side = window.points().map(|p| dist_to_plane(p, &basis)).fold(0.0, f64::max);
            if side < best.0 {
                best = (side, cand);
            }
        }
        basis[n - 1] = best.1;
    }
    Ok(basis)
}

/// Samples of the disc `plane ∩ B(0, R)` on a grid of spacing `R/128` (`R/16` above two dimensions).
fn plane_disc(basis: &[Vec<f64>], big_r: f64) -> Vec<f64> {
    let n = basis.len();
    let d = basis[0].len();
    let m: i64 = if n <= 2 { 128 } else { 16 };
    let step = big_r / m as f64;
    let mut out = Vec::new();
    let mut idx = vec![-m; n];
    loop {
        let coords: Vec<f64> = idx.iter().map(|&i| i as f64 * step).collect();
        if coords.iter().map(|c| c * c).sum::<f64>().sqrt() <= big_r {
            for a in 0..d {
                out.push((0..n).map(|k| coords[k] * basis[k][a]).sum());
            }
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            idx[k] += 1;
            if idx[k] <= m {
                break;
            }
            idx[k] = -m;
            k += 1;
        }
    }
}

/// Plane-fit score of `(window, support)` against a fixed plane.
fn plane_score(window: &EuclideanPointSet, support: &EuclideanPointSet, basis: &[Vec<f64>], big_r: f64) -> (f64, f64) {
    let window_side = window.points().map(|p| dist_to_plane(p, basis)).fold(0.0, f64::max);
    let disc = plane_disc(basis, big_r);
    let d = support.dim();
    let tree = support.index();
    let plane_side = disc
        .par_chunks(d)
        .map(|q| tree.nearest(q).map_or(f64::INFINITY, |(_, dd)| dd))
        .reduce(|| 0.0, f64::max);
    (window_side, plane_side)
}

/// Fits an n-plane through 0 by weighted principal components and scores
/// `D^{0,R}[T, plane]`.
pub fn plane_fit_distance(t: &BlowUp, n: usize) -> Result<PlaneFit> {
    let basis = principal_plane(&t.window, n)?;
    let (w, p) = plane_score(&t.window, &t.support, &basis, t.window_radius);
    let big_r = t.window_radius;
    Ok(PlaneFit { basis, score: w.max(p) / big_r, window_side: w / big_r, plane_side: p / big_r })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimScale {
    pub scale: f64,
    pub untrimmed: PlaneFit,
    pub trimmed_score: f64,
    pub discarded: usize,
    pub discarded_mass: f64,
    /// Discarded mass over `(2Rr)^s`.
    pub density_ratio: f64,
}

/// Approximate-tangent surrogate: per scale, fit a plane, drop samples farther
/// than `slab_fraction · R` from it, and report the dropped mass ratio and the
/// trimmed plane distance.
pub fn approx_tangent_trim(
    e: &EuclideanPointSet,
    x: &[f64],
    n: usize,
    s: f64,
    scales: &[f64],
    big_r: f64,
    slab_fraction: f64,
) -> Result<Vec<TrimScale>> {
    if !(slab_fraction > 0.0 && slab_fraction < 1.0) {
        return Err(GeoError::InvalidParameter(format!("slab fraction {slab_fraction}")));
    }
    scales
        .iter()
        .map(|&r| {
            let t = blow_up(e, x, r, big_r)?;
            let untrimmed = plane_fit_distance(&t, n)?;
            let slab = slab_fraction * big_r;
            let keep = |set: &EuclideanPointSet| -> (Vec<usize>, Vec<usize>) {
                (0..set.len()).partition(|&i| dist_to_plane(set.point(i), &untrimmed.basis) <= slab)
            };
            let (kept_w, dropped_w) = keep(&t.window);
            let (kept_s, _) = keep(&t.support);
            let window = t.window.subset(&kept_w);
            let support = t.support.subset(&kept_s);
            let trimmed_score = if window.is_empty() {
                f64::INFINITY
            } else {
                let (w, p) = plane_score(&window, &support, &untrimmed.basis, big_r);
                w.max(p) / big_r
            };
            let discarded_mass: f64 = dropped_w.iter().map(|&i| sample_mass(&t.window, i, s)).sum();
            Ok(TrimScale {
                scale: r,
                untrimmed,
                trimmed_score,
                discarded: dropped_w.len(),
                discarded_mass,
                density_ratio: discarded_mass / (2.0 * big_r * r).powf(s),
            })
        })
        .collect()
}

/// Farthest-point subsample of `k` indices seeded at `seed`; ties go to the lower index.
pub fn farthest_point_subsample(count: usize, seed: usize, k: usize, dist: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut chosen = vec![seed];
    let mut gap: Vec<f64> = (0..count).map(|i| dist(seed, i)).collect();
    while chosen.len() < k.min(count) {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for (i, &g) in gap.iter().enumerate() {
            if g > best.0 {
                best = (g, i);
            }
        }
        if best.0 <= 0.0 {
            break;
        }
        chosen.push(best.1);
        for (i, g) in gap.iter_mut().enumerate() {
            *g = g.min(dist(best.1, i));
        }
    }
    chosen
}

fn subsample_space(t: &BlowUp, k: usize) -> FiniteMetricSpace {
    let w = &t.window;
    let idx = farthest_point_subsample(w.len(), t.origin_index, k, |i, j| sq_dist(w.point(i), w.point(j)).sqrt());
    FiniteMetricSpace::from_point_set(&w.subset(&idx), Some(0)).expect("euclidean distances form a metric")
}

/// Pairwise pointed GH values between farthest-point subsamples of the blow-up windows.
pub fn gh_tangent_scan(
    e: &EuclideanPointSet,
    x: &[f64],
    scales: &[f64],
    big_r: f64,
    subsample: usize,
    mode: SearchMode,
) -> Result<Vec<Vec<f64>>> {
    let spaces = scales
        .iter()
        .map(|&r| blow_up(e, x, r, big_r).map(|t| subsample_space(&t, subsample)))
        .collect::<Result<Vec<_>>>()?;
    pairwise(&spaces, |a, b| pgh_oracle(a, b, mode).map(|g| g.value))
}

/// [`gh_tangent_scan`] for an abstract based space: windows are `B(base, rR)` rescaled by `1/r`.
pub fn gh_tangent_scan_metric(
    space: &FiniteMetricSpace,
    scales: &[f64],
    big_r: f64,
    subsample: usize,
    mode: SearchMode,
) -> Result<Vec<Vec<f64>>> {
    let base = space.base().ok_or(GeoError::MissingBase)?;
    let mut spaces = Vec::new();
    for &r in scales {
        check_scale(r, big_r)?;
        let ball = space.ball(base, r * big_r);
        let local = space.subspace(&ball).scaled(1.0 / r);
        let origin = local.base().expect("base is in its ball");
        let idx = farthest_point_subsample(local.len(), origin, subsample, |i, j| local.d(i, j));
        spaces.push(local.subspace(&idx));
    }
    pairwise(&spaces, |a, b| pgh_oracle(a, b, mode).map(|g| g.value))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormProfile {
    /// Unit directions in chart coordinates.
    pub directions: Vec<Vec<f64>>,
    /// Radius of the fitted unit ball along each direction.
    pub radii: Vec<f64>,
}

/// Fits a planar unit ball from chart coordinates and metric distances to the origin.
///
/// For each direction the points of the window whose chart angle is within
/// `cone_degrees` of it are collected; their Euclidean-chart radius over metric
/// distance estimates the unit-ball radius. The estimate is the median over
/// the angularly closest tenth of the cone (at least five points). Antipodal
/// estimates are averaged.
pub fn norm_fit_chart(chart: &[[f64; 2]], metric: &[f64], directions: usize, cone_degrees: f64) -> Result<NormProfile> {
    if directions < 2 || !directions.is_multiple_of(2) {
        return Err(GeoError::InvalidParameter("direction count must be even and at least 2".into()));
    }
    if chart.len() != metric.len() {
        return Err(GeoError::DimensionMismatch { expected: chart.len(), got: metric.len() });
    }
    let half = cone_degrees.to_radians();
    let mut raw = Vec::with_capacity(directions);
    let mut dirs = Vec::with_capacity(directions);
    for k in 0..directions {
        let theta = std::f64::consts::TAU * k as f64 / directions as f64;
        dirs.push(vec![theta.cos(), theta.sin()]);
        let mut cone: Vec<(f64, f64)> = chart
            .iter()
            .zip(metric)
            .filter(|(_, &m)| m > 0.0 && m <= 1.0 + BALL_TOL)
            .filter_map(|(c, &m)| {
                let rho = (c[0] * c[0] + c[1] * c[1]).sqrt();
                let phi = c[1].atan2(c[0]);
                let off = (phi - theta + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
                (off.abs() <= half).then_some((off.abs(), rho / m))
            })
            .collect();
        if cone.is_empty() {
            return Err(GeoError::DegenerateWindow { needed: 1 });
        }
        cone.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let keep = (cone.len() / 10).max(5).min(cone.len());
        let mut ratios: Vec<f64> = cone[..keep].iter().map(|c| c.1).collect();
        ratios.sort_by(f64::total_cmp);
        let med = if keep % 2 == 1 { ratios[keep / 2] } else { 0.5 * (ratios[keep / 2 - 1] + ratios[keep / 2]) };
        raw.push(med);
    }
    let radii = (0..directions).map(|k| 0.5 * (raw[k] + raw[(k + directions / 2) % directions])).collect();
    Ok(NormProfile { directions: dirs, radii })
}

/// Norm fit of a Euclidean blow-up: chart coordinates come from the fitted plane
/// (which must be flat enough), metric distances are Euclidean.
pub fn norm_fit(t: &BlowUp, n: usize, directions: usize, thresholds: &Thresholds) -> Result<NormProfile> {
    if n != 2 {
        return Err(GeoError::InvalidParameter("norm fitting is planar (n = 2)".into()));
    }
    let fit = plane_fit_distance(t, n)?;
    if fit.score > thresholds.norm_fit_max_score {
        return Err(GeoError::NotFlatEnough { score: fit.score, limit: thresholds.norm_fit_max_score });
    }
    let scale = t.window_radius;
    let chart: Vec<[f64; 2]> = t
        .window
        .points()
        .map(|p| {
            let a: f64 = p.iter().zip(&fit.basis[0]).map(|(u, v)| u * v).sum();
            let b: f64 = p.iter().zip(&fit.basis[1]).map(|(u, v)| u * v).sum();
            [a / scale, b / scale]
        })
        .collect();
    let metric: Vec<f64> = t.window.points().map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt() / scale).collect();
    norm_fit_chart(&chart, &metric, directions, thresholds.norm_cone_degrees)
}

/// Norm fit of an abstract based space with a planar chart, read inside `B(base, r)` rescaled by `1/r`.
pub fn norm_fit_metric(
    space: &FiniteMetricSpace,
    chart: &[[f64; 2]],
    r: f64,
    directions: usize,
    thresholds: &Thresholds,
) -> Result<NormProfile> {
    let base = space.base().ok_or(GeoError::MissingBase)?;
    if chart.len() != space.len() {
        return Err(GeoError::DimensionMismatch { expected: space.len(), got: chart.len() });
    }
    let o = chart[base];
    let ball = space.ball(base, r);
    let local: Vec<[f64; 2]> = ball.iter().map(|&i| [(chart[i][0] - o[0]) / r, (chart[i][1] - o[1]) / r]).collect();
    let metric: Vec<f64> = ball.iter().map(|&i| space.d(base, i) / r).collect();
    norm_fit_chart(&local, &metric, directions, thresholds.norm_cone_degrees)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub probe: usize,
    pub scale: f64,
    /// Mass of `E ∩ B(x,r)` outside `F` over `(2r)^s`.
    pub mass_ratio: f64,
    /// `ex(B(x, αr) ∩ E, F ∩ B(x,r)) / r`.
    pub excess_ratio: f64,
}

/// Expansivity signature at the listed samples of `F` (indices into `E`).
pub fn expansivity_probe(
    e: &EuclideanPointSet,
    f_indices: &[usize],
    s: f64,
    scales: &[f64],
    alpha: f64,
    probes: &[usize],
) -> Result<Vec<ProbeRow>> {
    if f_indices.is_empty() {
        return Err(GeoError::EmptySubset);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(GeoError::InvalidParameter(format!("alpha {alpha}")));
    }
    let mut in_f = vec![false; e.len()];
    for &i in f_indices {
        if i >= e.len() {
            return Err(GeoError::IndexOutOfRange { index: i, len: e.len() });
        }
        in_f[i] = true;
    }
    for &p in probes {
        if p >= e.len() || !in_f[p] {
            return Err(GeoError::InvalidParameter(format!("probe {p} is not in F")));
        }
    }
    let work: Vec<(usize, f64)> = probes.iter().flat_map(|&p| scales.iter().map(move |&r| (p, r))).collect();
    work.par_iter()
        .map(|&(p, r)| {
            if !(r > 0.0) {
                return Err(GeoError::NonpositiveRadius(r));
            }
            let x = e.point(p);
            let ball = e.within(x, r);
            let (f_part, rest): (Vec<usize>, Vec<usize>) = ball.iter().partition(|&&i| in_f[i]);
            let mass: f64 = rest.iter().map(|&i| sample_mass(e, i, s)).sum();
            let target = e.subset(&f_part);
            let inner = e.within(x, alpha * r);
            let ex = inner
                .iter()
                .map(|&i| target.nearest(e.point(i)).map_or(f64::INFINITY, |(_, d)| d))
                .fold(0.0, f64::max);
            Ok(ProbeRow { probe: p, scale: r, mass_ratio: mass / (2.0 * r).powf(s), excess_ratio: ex / r })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Flat,
    Nonflat,
    Rotating,
    GhUnique,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisMode {
    Aw,
    Gh,
    Approx,
    Expansive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentReport {
    pub point: Vec<f64>,
    pub mode: AnalysisMode,
    pub scales: Vec<f64>,
    pub window_radius: f64,
    pub pairwise_ww: Vec<Vec<f64>>,
    pub gh_pairwise: Option<Vec<Vec<f64>>>,
    pub flatness: Vec<f64>,
    pub trimmed_flatness: Option<Vec<f64>>,
    pub density_ratios: Vec<f64>,
    pub expansivity: Option<Vec<ProbeRow>>,
    pub verdict: Verdict,
    pub norm_fit: Option<NormProfile>,
    pub thresholds: Thresholds,
}

fn max_entry(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().cloned().fold(0.0, f64::max)
}

fn tail_max(m: &[Vec<f64>], floors: &[f64], tail: usize) -> f64 {
    let k = m.len();
    let start = k.saturating_sub(tail);
    let mut best = 0.0f64;
    for i in start..k {
        for j in start..k {
            best = best.max(m[i][j] - floors[i] - floors[j]);
        }
    }
    best
}

/// Verdict from the scans, in priority order flat, rotating, GH-unique, non-flat.
///
/// `floors[k]` is the sampling floor `resolution / (r_k R)` at scale `k`: a
/// perfect sample of a plane can score this much, so the flat test allows it
/// and the non-flat and rotating tests demand it on top of their thresholds.
pub fn decide(
    flatness: &[f64],
    floors: &[f64],
    aw: &[Vec<f64>],
    gh: Option<&[Vec<f64>]>,
    mode: AnalysisMode,
    th: &Thresholds,
) -> Verdict {
    let last = flatness.last().cloned().unwrap_or(f64::INFINITY) - floors.last().cloned().unwrap_or(0.0);
    if mode != AnalysisMode::Gh && last <= th.flat_score && tail_max(aw, floors, th.tail_scales) <= th.cauchy_tail {
        return Verdict::Flat;
    }
    if let Some(g) = gh {
        let g_max = max_entry(g);
        let floor_max = floors.iter().cloned().fold(0.0, f64::max);
        if mode == AnalysisMode::Aw && g_max <= th.gh_rotating && max_entry(aw) >= th.aw_rotating + 2.0 * floor_max {
            return Verdict::Rotating;
        }
        if mode == AnalysisMode::Gh && g_max <= th.gh_unique {
            return Verdict::GhUnique;
        }
    }
    if !flatness.is_empty() && flatness.iter().zip(floors).all(|(&f, &fl)| f >= th.nonflat_score + fl) {
        return Verdict::Nonflat;
    }
    Verdict::Inconclusive
}

/// Options for [`analyze`].
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub n: usize,
    pub s: f64,
    pub window_radius: f64,
    pub subsample: usize,
    pub slab_fraction: f64,
    pub alpha: f64,
    pub norm_directions: Option<usize>,
    pub thresholds: Thresholds,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            n: 1,
            s: 1.0,
            window_radius: 1.0,
            subsample: 8,
            slab_fraction: 0.1,
            alpha: 0.5,
            norm_directions: None,
            thresholds: Thresholds::default(),
        }
    }
}

/// Full multi-scale report at `x`.
pub fn analyze(
    e: &EuclideanPointSet,
    x: &[f64],
    scales: &[f64],
    mode: AnalysisMode,
    opts: &AnalyzeOptions,
) -> Result<TangentReport> {
    let big_r = opts.window_radius;
    let aw = aw_cauchy_scan(e, x, scales, big_r)?;
    let trims = approx_tangent_trim(e, x, opts.n, opts.s, scales, big_r, opts.slab_fraction)?;
    let flatness: Vec<f64> = trims.iter().map(|t| t.untrimmed.score).collect();
    let density_ratios: Vec<f64> = trims.iter().map(|t| t.density_ratio).collect();
    let floors: Vec<f64> = scales.iter().map(|&r| e.resolution() / (r * big_r)).collect();
    let gh = match mode {
        AnalysisMode::Aw | AnalysisMode::Gh => {
            Some(gh_tangent_scan(e, x, scales, big_r, opts.subsample, SearchMode::Auto)?)
        }
        _ => None,
    };
    let trimmed_flatness = (mode == AnalysisMode::Approx).then(|| trims.iter().map(|t| t.trimmed_score).collect());
    let expansivity = if mode == AnalysisMode::Expansive {
        let (ci, _) = e.nearest(x).ok_or(GeoError::EmptyInput)?;
        let f: Vec<usize> = match e.markers().keys().next() {
            Some(name) => e.marker_indices(name),
            None => (0..e.len()).collect(),
        };
        if !f.contains(&ci) {
            return Err(GeoError::InvalidParameter("probe point is not in the marked subset".into()));
        }
        Some(expansivity_probe(e, &f, opts.s, scales, opts.alpha, &[ci])?)
    } else {
        None
    };
    let verdict = match mode {
        AnalysisMode::Approx => {
            let tf: &Vec<f64> = trimmed_flatness.as_ref().unwrap();
            if tf.last().is_some_and(|&v| v <= opts.thresholds.flat_score + floors[floors.len() - 1])
                && density_ratios.last().is_some_and(|&v| v <= opts.thresholds.trimmed_mass_ratio)
            {
                Verdict::Flat
            } else {
                decide(&flatness, &floors, &aw, None, mode, &opts.thresholds)
            }
        }
        _ => decide(&flatness, &floors, &aw, gh.as_deref(), mode, &opts.thresholds),
    };
    let norm_fit = match opts.norm_directions {
        Some(k) => {
            let t = blow_up(e, x, *scales.last().unwrap(), big_r)?;
            Some(norm_fit(&t, opts.n, k, &opts.thresholds)?)
        }
        None => None,
    };
    Ok(TangentReport {
        point: x.to_vec(),
        mode,
        scales: scales.to_vec(),
        window_radius: big_r,
        pairwise_ww: aw,
        gh_pairwise: gh,
        flatness,
        trimmed_flatness,
        density_ratios,
        expansivity,
        verdict,
        norm_fit,
        thresholds: opts.thresholds.clone(),
    })
}

/// The dyadic ladder `2^{-k}` for `k` in `from..=to`.
pub fn dyadic_scales(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(-k)).collect()
}

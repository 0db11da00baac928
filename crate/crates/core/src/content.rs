//! Hausdorff-content upper bounds, packing-content lower bounds and lower-regularity scans.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::gh::FiniteMetricSpace;
use crate::kdtree::sq_dist;
use crate::pointset::{diameter_of, EuclideanPointSet, BALL_TOL};

const DISJOINT_TOL: f64 = 1e-12;

/// Index-addressed sample spaces the content estimators run on.
pub trait SampleSpace: Sync {
    fn count(&self) -> usize;
    fn distance(&self, i: usize, j: usize) -> f64;
    /// Indices within closed distance `r` of sample `i`, sorted.
    fn ball_indices(&self, i: usize, r: f64) -> Vec<usize>;
    /// Coordinates reported for a witness centred at sample `i` (empty for abstract spaces).
    fn center_coords(&self, i: usize) -> Vec<f64>;
    /// Sampling resolution; 0 means the samples are the object.
    fn resolution(&self) -> f64;
    fn subset_diameter(&self, idx: &[usize]) -> f64;
    fn full_diameter(&self) -> f64;
}

impl SampleSpace for EuclideanPointSet {
    fn count(&self) -> usize {
        self.len()
    }
    fn distance(&self, i: usize, j: usize) -> f64 {
        sq_dist(self.point(i), self.point(j)).sqrt()
    }
    fn ball_indices(&self, i: usize, r: f64) -> Vec<usize> {
        self.index().within(self.point(i), r)
    }
    fn center_coords(&self, i: usize) -> Vec<f64> {
        self.point(i).to_vec()
    }
    fn resolution(&self) -> f64 {
        EuclideanPointSet::resolution(self)
    }
    fn subset_diameter(&self, idx: &[usize]) -> f64 {
        let mut flat = Vec::with_capacity(idx.len() * self.dim());
        for &i in idx {
            flat.extend_from_slice(self.point(i));
        }
        diameter_of(self.dim(), &flat)
    }
    fn full_diameter(&self) -> f64 {
        self.diameter()
    }
}

impl SampleSpace for FiniteMetricSpace {
    fn count(&self) -> usize {
        self.len()
    }
    fn distance(&self, i: usize, j: usize) -> f64 {
        self.d(i, j)
    }
    fn ball_indices(&self, i: usize, r: f64) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.d(i, j) <= r).collect()
    }
    fn center_coords(&self, _i: usize) -> Vec<f64> {
        Vec::new()
    }
    fn resolution(&self) -> f64 {
        0.0
    }
    fn subset_diameter(&self, idx: &[usize]) -> f64 {
        let mut best = 0.0f64;
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                best = best.max(self.d(i, j));
            }
        }
        best
    }
    fn full_diameter(&self) -> f64 {
        self.diameter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

/// A ball centred at a sample. Radius 0 marks a singleton cover element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub sample: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentEstimate {
    pub value: f64,
    pub s: f64,
    pub direction: Direction,
    /// Largest admissible radius (packings) or twice the cover radius (covers).
    pub delta: f64,
    pub witness: Vec<WitnessBall>,
    /// Thickening added to every cover-element diameter.
    pub diameter_floor: f64,
}

impl ContentEstimate {
    /// Re-derives the value from the witness and checks the witness is a valid cover or packing.
    pub fn revalidate<S: SampleSpace + ?Sized>(&self, x: &S) -> Result<()> {
        let recomputed = match self.direction {
            Direction::Upper => {
                let mut covered = vec![false; x.count()];
                let mut total = 0.0;
                for w in &self.witness {
                    let idx = x.ball_indices(w.sample, w.radius + BALL_TOL);
                    for &i in &idx {
                        covered[i] = true;
                    }
                    total += (x.subset_diameter(&idx) + self.diameter_floor).powf(self.s);
                }
                if let Some(i) = covered.iter().position(|c| !c) {
                    return Err(GeoError::InvalidParameter(format!("sample {i} not covered")));
                }
                total
            }
            Direction::Lower => {
                let diam = x.full_diameter();
                for (a, w) in self.witness.iter().enumerate() {
                    if w.radius > diam {
                        return Err(GeoError::RadiusExceedsDiameter { radius: w.radius, diameter: diam });
                    }
                    for v in &self.witness[a + 1..] {
                        if x.distance(w.sample, v.sample) <= w.radius + v.radius - DISJOINT_TOL {
                            return Err(GeoError::InvalidParameter(format!(
                                "balls at samples {} and {} overlap",
                                w.sample, v.sample
                            )));
                        }
                    }
                }
                packing_sum(&self.witness, self.s)
            }
        };
        for w in &self.witness {
            if w.sample >= x.count() || w.center != x.center_coords(w.sample) {
                return Err(GeoError::InvalidParameter(format!("witness not centred at sample {}", w.sample)));
            }
        }
        if (recomputed - self.value).abs() > 1e-9 * self.value.abs().max(1.0) {
            return Err(GeoError::InvalidParameter(format!(
                "stored value {} but witness gives {recomputed}",
                self.value
            )));
        }
        Ok(())
    }

    /// `Σ diam(X ∩ B_i)^s` over the witness balls.
    pub fn witness_cover_sum<S: SampleSpace + ?Sized>(&self, x: &S) -> f64 {
        self.witness
            .iter()
            .map(|w| x.subset_diameter(&x.ball_indices(w.sample, w.radius + BALL_TOL)).powf(self.s))
            .sum()
    }
}

fn packing_sum(witness: &[WitnessBall], s: f64) -> f64 {
    witness.iter().map(|w| (2.0 * w.radius).powf(s)).sum()
}

#[derive(PartialEq)]
struct Ranked {
    ratio: f64,
    cand: usize,
}

impl Eq for Ranked {}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ratio.total_cmp(&other.ratio).then(other.cand.cmp(&self.cand))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy cover upper bound on the Hausdorff content.
///
/// Candidates are the sets `X ∩ B(x, δ/2)` and the singletons `{x}`. Each costs
/// `(diam + h)^s` with `h` the resolution, so a cover of the samples pays for
/// the gaps it bridges; with `h = 0` singletons are free and the value is 0.
/// At every step the candidate covering the most new samples per unit cost wins,
/// ties going to the lower candidate index.
pub fn hausdorff_content_upper<S: SampleSpace + ?Sized>(x: &S, s: f64, delta: f64) -> Result<ContentEstimate> {
    let n = x.count();
    if n == 0 {
        return Err(GeoError::EmptyInput);
    }
    check_positive("s", s)?;
    check_positive("delta", delta)?;
    let h = x.resolution();
    let radius = delta / 2.0;
    let members: Vec<Vec<usize>> = (0..n).into_par_iter().map(|i| x.ball_indices(i, radius + BALL_TOL)).collect();
    let costs: Vec<f64> = members.par_iter().map(|m| (x.subset_diameter(m) + h).powf(s)).collect();
    let single_cost = h.powf(s);
    // candidate c < n is a ball, c >= n the singleton of sample c - n
    let ratio = |gain: usize, cost: f64| if cost > 0.0 { gain as f64 / cost } else { f64::INFINITY };
    let mut heap: BinaryHeap<Ranked> = (0..2 * n)
        .map(|c| {
            let (gain, cost) = if c < n { (members[c].len(), costs[c]) } else { (1, single_cost) };
            Ranked { ratio: ratio(gain, cost), cand: c }
        })
        .collect();
    let mut covered = vec![false; n];
    let mut left = n;
    let mut witness = Vec::new();
    let mut value = 0.0;
    while left > 0 {
        let top = heap.pop().expect("singletons keep the heap nonempty");
        let (gain, cost) = if top.cand < n {
            (members[top.cand].iter().filter(|&&i| !covered[i]).count(), costs[top.cand])
        } else {
            (usize::from(!covered[top.cand - n]), single_cost)
        };
        if gain == 0 {
            continue;
        }
        let fresh = Ranked { ratio: ratio(gain, cost), cand: top.cand };
        if heap.peek().is_some_and(|next| *next > fresh) {
            heap.push(fresh);
            continue;
        }
        let (sample, r, idx) = if top.cand < n {
            (top.cand, radius, members[top.cand].clone())
        } else {
            (top.cand - n, 0.0, vec![top.cand - n])
        };
        for i in idx {
            if !covered[i] {
                covered[i] = true;
                left -= 1;
            }
        }
        value += cost;
        witness.push(WitnessBall { center: x.center_coords(sample), radius: r, sample });
    }
    Ok(ContentEstimate { value, s, direction: Direction::Upper, delta, witness, diameter_floor: h })
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(GeoError::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// First-fit packing over levels `(radius, max_count)`, processed in the given order.
///
/// Balls go at the lowest-index sample not blocked by an earlier ball.
fn greedy_pack<S: SampleSpace + ?Sized>(x: &S, levels: &[(f64, usize)]) -> Vec<WitnessBall> {
    let n = x.count();
    let mut placed: Vec<WitnessBall> = Vec::new();
    for &(r, max_count) in levels {
        if max_count == 0 {
            continue;
        }
        let mut blocked = vec![false; n];
        for b in &placed {
            for i in x.ball_indices(b.sample, r + b.radius - DISJOINT_TOL) {
                blocked[i] = true;
            }
        }
        let mut count = 0;
        for i in 0..n {
            if count == max_count {
                break;
            }
            if blocked[i] {
                continue;
            }
            for j in x.ball_indices(i, 2.0 * r - DISJOINT_TOL) {
                blocked[j] = true;
            }
            placed.push(WitnessBall { center: x.center_coords(i), radius: r, sample: i });
            count += 1;
        }
    }
    placed
}

fn check_packable<S: SampleSpace + ?Sized>(x: &S, s: f64, radii: &[f64]) -> Result<f64> {
    check_positive("s", s)?;
    if x.count() < 2 {
        return Err(GeoError::InvalidParameter("packing needs at least two samples".into()));
    }
    let diam = x.full_diameter();
    for &r in radii {
        check_positive("radius", r)?;
        if r > diam {
            return Err(GeoError::RadiusExceedsDiameter { radius: r, diameter: diam });
        }
    }
    Ok(diam)
}

/// Greedy disjoint packing following `radius_schedule`, largest radii first.
pub fn packing_content_lower<S: SampleSpace + ?Sized>(
    x: &S,
    s: f64,
    radius_schedule: &[f64],
) -> Result<ContentEstimate> {
    check_packable(x, s, radius_schedule)?;
    let mut sorted = radius_schedule.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut levels: Vec<(f64, usize)> = Vec::new();
    for r in sorted {
        match levels.last_mut() {
            Some(last) if last.0 == r => last.1 += 1,
            _ => levels.push((r, 1)),
        }
    }
    let witness = greedy_pack(x, &levels);
    let delta = levels.first().map_or(0.0, |l| l.0);
    Ok(ContentEstimate {
        value: packing_sum(&witness, s),
        s,
        direction: Direction::Lower,
        delta,
        witness,
        diameter_floor: 0.0,
    })
}

/// Smallest radius used by the premeasure ladder.
fn ladder_floor<S: SampleSpace + ?Sized>(x: &S, diam: f64) -> f64 {
    let h = x.resolution();
    if h > 0.0 {
        h
    } else {
        diam * 2f64.powi(-12)
    }
}

/// Lower bound on `P^s_δ` using the dyadic radii `δ, δ/2, δ/4, ...` down to the
/// resolution floor.
///
/// Every suffix of the ladder is packed greedily (largest radius first, then
/// filling gaps with smaller balls) and the best run is kept. The ladder for
/// `δ/2` is a suffix of the ladder for `δ`, so the estimate is monotone along
/// halvings of `δ`.
pub fn packing_premeasure_estimate<S: SampleSpace + ?Sized>(x: &S, s: f64, delta: f64) -> Result<ContentEstimate> {
    check_positive("s", s)?;
    check_positive("delta", delta)?;
    if x.count() < 2 {
        return Ok(ContentEstimate {
            value: 0.0,
            s,
            direction: Direction::Lower,
            delta,
            witness: Vec::new(),
            diameter_floor: 0.0,
        });
    }
    let diam = check_packable(x, s, &[delta])?;
    let floor = ladder_floor(x, diam);
    let mut ladder = vec![(delta, usize::MAX)];
    while ladder.last().unwrap().0 / 2.0 >= floor {
        let r = ladder.last().unwrap().0 / 2.0;
        ladder.push((r, usize::MAX));
    }
    let runs: Vec<Vec<WitnessBall>> = (0..ladder.len()).into_par_iter().map(|k| greedy_pack(x, &ladder[k..])).collect();
    let mut best = Vec::new();
    let mut best_value = -1.0;
    for run in runs {
        let v = packing_sum(&run, s);
        if v > best_value {
            best_value = v;
            best = run;
        }
    }
    Ok(ContentEstimate { value: best_value, s, direction: Direction::Lower, delta, witness: best, diameter_floor: 0.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityScan {
    /// `min μ(B(x,r)) / r^s` over samples and radii.
    pub min_ratio: f64,
    pub sample: usize,
    pub radius: f64,
}

/// Scans `μ(B(x, r)) / r^s` over every sample and radius, `μ` being the weighted count.
pub fn lower_regularity_scan(x: &EuclideanPointSet, weights: &[f64], s: f64, radii: &[f64]) -> Result<RegularityScan> {
    if x.is_empty() {
        return Err(GeoError::EmptyInput);
    }
    if weights.len() != x.len() {
        return Err(GeoError::DimensionMismatch { expected: x.len(), got: weights.len() });
    }
    check_positive("s", s)?;
    for &r in radii {
        check_positive("radius", r)?;
    }
    if radii.is_empty() {
        return Err(GeoError::InvalidParameter("no radii".into()));
    }
    let best = (0..x.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            radii.iter().map(move |&r| {
                let mass: f64 = x.within(x.point(i), r).iter().map(|&j| weights[j]).sum();
                (mass / r.powf(s), i, r)
            })
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, 0.0),
            |a, b| match a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) {
                Ordering::Greater => b,
                _ => a,
            },
        );
    Ok(RegularityScan { min_ratio: best.0, sample: best.1, radius: best.2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n: usize, h: f64) -> EuclideanPointSet {
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / (n - 1) as f64]).collect();
        EuclideanPointSet::from_points(&pts, h, "segment").unwrap()
    }

    #[test]
    fn unit_interval_cover() {
        let x = grid1(1000, 1.0 / 999.0);
        let est = hausdorff_content_upper(&x, 1.0, 0.01).unwrap();
        assert!(est.value >= 1.0 && est.value <= 1.1, "{}", est.value);
        est.revalidate(&x).unwrap();
    }

    #[test]
    fn degenerate_covers_are_free() {
        let one = grid1(2, 0.0).subset(&[0]);
        assert_eq!(hausdorff_content_upper(&one, 1.5, 0.1).unwrap().value, 0.0);
        let two = grid1(2, 0.0);
        let est = hausdorff_content_upper(&two, 1.0, 0.1).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.witness.len(), 2);
        assert!(hausdorff_content_upper(&EuclideanPointSet::empty(1), 1.0, 0.1).is_err());
    }

    #[test]
    fn packing_examples() {
        let x = grid1(1000, 1.0 / 999.0);
        let est = packing_content_lower(&x, 1.0, &[1.0 / 64.0; 32]).unwrap();
        assert!(est.value > 0.9 && est.value <= 1.0, "{}", est.value);
        est.revalidate(&x).unwrap();
        let two = grid1(2, 0.0);
        let est = packing_content_lower(&two, 1.0, &[1.0]).unwrap();
        assert_eq!(est.value, 2.0);
        assert_eq!(est.witness.len(), 1);
        assert!(matches!(packing_content_lower(&two, 1.0, &[1.5]), Err(GeoError::RadiusExceedsDiameter { .. })));
    }

    #[test]
    fn premeasure_examples() {
        let x = grid1(1000, 1.0 / 999.0);
        let est = packing_premeasure_estimate(&x, 1.0, 0.5).unwrap();
        assert!(est.value >= 1.0, "{}", est.value);
        est.revalidate(&x).unwrap();
        let one = grid1(2, 0.0).subset(&[0]);
        assert_eq!(packing_premeasure_estimate(&one, 1.0, 0.5).unwrap().value, 0.0);
    }

    #[test]
    fn regularity_examples() {
        let one = grid1(2, 0.0).subset(&[0]);
        let scan = lower_regularity_scan(&one, &[1.0], 2.0, &[0.5]).unwrap();
        assert_eq!(scan.min_ratio, 4.0);
        let pts = vec![vec![0.0], vec![0.01], vec![10.0], vec![10.01]];
        let x = EuclideanPointSet::from_points(&pts, 0.0, "clusters").unwrap();
        let scan = lower_regularity_scan(&x, &[0.5, 0.5, 0.0, 0.0], 1.0, &[0.1]).unwrap();
        assert_eq!(scan.min_ratio, 0.0);
        assert_eq!(scan.sample, 2);
    }

    #[test]
    fn json_shape() {
        let x = grid1(3, 0.0);
        let est = packing_content_lower(&x, 1.0, &[0.25]).unwrap();
        let v: serde_json::Value = serde_json::to_value(&est).unwrap();
        assert_eq!(v["direction"], "lower");
        assert!(v["witness"][0]["center"].is_array());
    }
}

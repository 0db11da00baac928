use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::kdtree::{sq_dist, KdTree};
use crate::pointset::EuclideanPointSet;

#[derive(Debug, Clone)]
pub struct BallTreeOptions {
    pub s: f64,
    pub levels: usize,
    /// Punched balls are `T_B = B(y_B, ε r(B))`.
    pub epsilon: f64,
    /// Children have radius at most `child_ratio · r(parent)`.
    pub child_ratio: f64,
    pub top_radius: f64,
    /// Smallest admissible radius; defaults to `4h`.
    pub min_radius: Option<f64>,
    /// Siblings satisfy `|c - c'| ≥ (1 + min_gap)(r + r')`.
    pub min_gap: f64,
    /// Candidate centres are thinned to one per cell of side `r(parent) / candidate_density`.
    pub candidate_density: f64,
}

impl Default for BallTreeOptions {
    fn default() -> Self {
        BallTreeOptions {
            s: 2.0,
            levels: 4,
            epsilon: 0.1,
            child_ratio: 0.7,
            top_radius: 0.25,
            min_radius: None,
            min_gap: 0.01,
            candidate_density: 48.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub parent: Option<usize>,
    /// Centre of the punched ball `T_B`.
    pub far_point: Vec<f64>,
    pub punch_radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BallTree {
    pub levels: Vec<Vec<TreeBall>>,
    /// `Σ (2r)^s` per level.
    pub level_sums: Vec<f64>,
    /// `Σ (2 r(T_B))^s` per level.
    pub punched_sums: Vec<f64>,
    /// Separation constants: siblings are `(1 + 10η_k)`-separated.
    pub eta: Vec<f64>,
    /// Sample mass of `F`, the surrogate for `H^s(F)`.
    pub f_mass: f64,
}

impl BallTree {
    pub fn cumulative_punched(&self) -> Vec<f64> {
        self.punched_sums
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc)
            })
            .collect()
    }

    /// Smallest `|y - y'| - (ρ + ρ')` over all pairs of punched balls.
    pub fn punched_gap(&self) -> f64 {
        let all: Vec<&TreeBall> = self.levels.iter().flatten().collect();
        (0..all.len())
            .into_par_iter()
            .map(|i| {
                let a = all[i];
                all[..i]
                    .iter()
                    .map(|b| sq_dist(&a.far_point, &b.far_point).sqrt() - a.punch_radius - b.punch_radius)
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min)
    }

    /// Checks containment in parents, exclusion of the parent's punched ball and sibling separation.
    pub fn check_structure(&self) -> std::result::Result<(), String> {
        for (k, level) in self.levels.iter().enumerate() {
            let pad = 1.0 + 10.0 * self.eta[k];
            for (i, b) in level.iter().enumerate() {
                if let Some(p) = b.parent {
                    let parent = &self.levels[k - 1][p];
                    if sq_dist(&b.center, &parent.center).sqrt() + b.radius > parent.radius {
                        return Err(format!("level {k} ball {i} leaves its parent"));
                    }
                    if sq_dist(&b.center, &parent.far_point).sqrt() < b.radius + parent.punch_radius {
                        return Err(format!("level {k} ball {i} meets the parent's punched ball"));
                    }
                }
                if sq_dist(&b.far_point, &b.center).sqrt() + b.punch_radius > b.radius {
                    return Err(format!("level {k} ball {i} does not contain its punched ball"));
                }
                for (j, c) in level[..i].iter().enumerate() {
                    if c.parent == b.parent && sq_dist(&b.center, &c.center).sqrt() < pad * (b.radius + c.radius) {
                        return Err(format!("level {k} balls {j} and {i} are not separated"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(PartialEq)]
struct Cand {
    radius: f64,
    id: usize,
}

impl Eq for Cand {}

impl PartialOrd for Cand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cand {
    fn cmp(&self, other: &Self) -> Ordering {
        self.radius.total_cmp(&other.radius).then(other.id.cmp(&self.id))
    }
}

struct Far<'a> {
    tree: KdTree,
    coords: Vec<f64>,
    clearance: Vec<f64>,
    dim: usize,
    _e: &'a EuclideanPointSet,
}

impl Far<'_> {
    /// Far sample maximizing clearance from `F` with `B(y, εr) ⊂ B(c, r)` and clearance `> εr`.
    fn pick(&self, c: &[f64], r: f64, eps: f64) -> Option<Vec<f64>> {
        let reach = (1.0 - eps) * r;
        let mut best: Option<(f64, usize)> = None;
        for i in self.tree.within(c, reach) {
            let cl = self.clearance[i];
            if cl > eps * r && best.is_none_or(|(b, _)| cl > b) {
                best = Some((cl, i));
            }
        }
        best.map(|(_, i)| self.coords[i * self.dim..(i + 1) * self.dim].to_vec())
    }
}

struct Parent<'a> {
    center: Option<&'a [f64]>,
    radius: f64,
    far: Option<(&'a [f64], f64)>,
    cap: f64,
}

/// Greedy realization of nested disjoint ball families centred on `F` whose
/// punched balls `T_B` around far samples are pairwise disjoint.
///
/// Within each parent, balls are placed largest-admissible-first among thinned
/// `F` samples; a ball is kept only when it contains a far sample with
/// clearance `> ε r`. All measure conditions use sample masses.
pub fn build_ball_tree(e: &EuclideanPointSet, f_indices: &[usize], opts: &BallTreeOptions) -> Result<BallTree> {
    if opts.levels == 0 {
        return Err(GeoError::InvalidParameter("levels must be at least 1".into()));
    }
    if f_indices.is_empty() {
        return Err(GeoError::EmptySubset);
    }
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) || !(opts.child_ratio > 0.0 && opts.child_ratio < 1.0) {
        return Err(GeoError::InvalidParameter("epsilon and child_ratio must lie in (0,1)".into()));
    }
    let dim = e.dim();
    for &i in f_indices {
        if i >= e.len() {
            return Err(GeoError::IndexOutOfRange { index: i, len: e.len() });
        }
    }
    let in_f: HashSet<usize> = f_indices.iter().copied().collect();
    let f_set = e.subset(f_indices);
    let f_mass = f_set.total_mass();
    let others: Vec<usize> = (0..e.len()).filter(|i| !in_f.contains(i)).collect();
    let mut far_coords = Vec::with_capacity(others.len() * dim);
    for &i in &others {
        far_coords.extend_from_slice(e.point(i));
    }
    let clearance: Vec<f64> = others
        .par_iter()
        .map(|&i| f_set.nearest(e.point(i)).map_or(0.0, |(_, d)| d))
        .collect();
    let far = Far { tree: KdTree::build(&far_coords, dim), coords: far_coords, clearance, dim, _e: e };
    let min_radius = opts.min_radius.unwrap_or(4.0 * e.resolution());

    let mut levels: Vec<Vec<TreeBall>> = Vec::new();
    for k in 0..opts.levels {
        let parents: Vec<Parent> = if k == 0 {
            vec![Parent { center: None, radius: f64::INFINITY, far: None, cap: opts.top_radius }]
        } else {
            levels[k - 1]
                .iter()
                .map(|b| Parent {
                    center: Some(&b.center),
                    radius: b.radius,
                    far: Some((&b.far_point, b.punch_radius)),
                    cap: opts.child_ratio * b.radius,
                })
                .collect()
        };
        let mut level = Vec::new();
        for (pi, parent) in parents.iter().enumerate() {
            if parent.cap < min_radius {
                continue;
            }
            let cell = parent.cap * 2.0 / opts.candidate_density;
            let pool = match parent.center {
                Some(c) => f_set.within(c, parent.radius - min_radius),
                None => (0..f_set.len()).collect(),
            };
            let mut seen = HashSet::new();
            let cands: Vec<usize> = pool
                .into_iter()
                .filter(|&i| seen.insert(f_set.point(i).iter().map(|v| (v / cell).floor() as i64).collect::<Vec<_>>()))
                .collect();
            let mut placed: Vec<TreeBall> = Vec::new();
            let admissible = |c: &[f64], placed: &[TreeBall]| -> f64 {
                let mut r = parent.cap;
                if let Some(pc) = parent.center {
                    r = r.min((parent.radius - sq_dist(c, pc).sqrt()) * (1.0 - 1e-9));
                }
                if let Some((y, rho)) = parent.far {
                    r = r.min((sq_dist(c, y).sqrt() - rho) / (1.0 + opts.min_gap));
                }
                for b in placed {
                    r = r.min(sq_dist(c, &b.center).sqrt() / (1.0 + opts.min_gap) - b.radius);
                }
                r
            };
            let mut heap: BinaryHeap<Cand> = cands
                .iter()
                .enumerate()
                .map(|(id, &i)| Cand { radius: admissible(f_set.point(i), &[]), id })
                .filter(|c| c.radius >= min_radius)
                .collect();
            while let Some(top) = heap.pop() {
                let c = f_set.point(cands[top.id]);
                let r = admissible(c, &placed);
                if r < min_radius {
                    continue;
                }
                if r < top.radius {
                    heap.push(Cand { radius: r, id: top.id });
                    continue;
                }
                if let Some(y) = far.pick(c, r, opts.epsilon) {
                    placed.push(TreeBall {
                        center: c.to_vec(),
                        radius: r,
                        parent: parent.center.map(|_| pi),
                        far_point: y,
                        punch_radius: opts.epsilon * r,
                    });
                }
            }
            level.extend(placed);
        }
        if level.is_empty() {
            return Err(if k == 0 { GeoError::ExpansivitySignatureAbsent } else { GeoError::ResolutionExhausted(k) });
        }
        levels.push(level);
    }

    let mut eta = Vec::new();
    for level in &levels {
        let mut achieved = f64::INFINITY;
        for (i, b) in level.iter().enumerate() {
            for c in &level[..i] {
                if c.parent == b.parent {
                    achieved = achieved.min(sq_dist(&b.center, &c.center).sqrt() / (b.radius + c.radius) - 1.0);
                }
            }
        }
        eta.push(if achieved.is_finite() { achieved / 20.0 } else { opts.min_gap / 20.0 });
    }
    let sum = |level: &Vec<TreeBall>, scale: f64| level.iter().map(|b| (2.0 * scale * b.radius).powf(opts.s)).sum::<f64>();
    Ok(BallTree {
        level_sums: levels.iter().map(|l| sum(l, 1.0)).collect(),
        punched_sums: levels.iter().map(|l| sum(l, opts.epsilon)).collect(),
        levels,
        eta,
        f_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_spiked_cube;

    #[test]
    fn tree_on_small_spiked_cube() {
        let e = gen_spiked_cube(2, 5, 1.0 / 64.0, 1.0 / 32.0).unwrap();
        let f = e.marker_indices("plane");
        let opts = BallTreeOptions { levels: 2, top_radius: 0.25, candidate_density: 16.0, ..BallTreeOptions::default() };
        let t = build_ball_tree(&e, &f, &opts).unwrap();
        t.check_structure().unwrap();
        assert!(t.punched_gap() > 0.0);
        assert_eq!(t.level_sums.len(), 2);
        let cum = t.cumulative_punched();
        assert!(cum[1] > cum[0]);
    }

    #[test]
    fn flat_set_has_no_far_points() {
        let e = gen_spiked_cube(2, 1, 1.0 / 16.0, 1.0).unwrap();
        let f: Vec<usize> = e.marker_indices("plane");
        let plane = e.subset(&f);
        let all: Vec<usize> = (0..plane.len()).collect();
        let r = build_ball_tree(&plane, &all, &BallTreeOptions::default());
        assert!(matches!(r, Err(GeoError::ExpansivitySignatureAbsent)));
    }
}

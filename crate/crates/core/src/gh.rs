//! Pointed Gromov-Hausdorff machinery on finite metric spaces.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::kdtree::sq_dist;
use crate::pointset::{EuclideanPointSet, BALL_TOL};

/// Exhaustive correspondence search refuses spaces larger than this.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// Default number of candidate moves for the local searches.
pub const DEFAULT_BUDGET: usize = 10_000;

const TRIANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<f64>,
    base: Option<usize>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal and the triangle inequality (relative slack 1e-9).
    pub fn new(n: usize, dist: Vec<f64>, base: Option<usize>) -> Result<Self> {
        let space = Self::new_unchecked(n, dist, base)?;
        space.check_triangle()?;
        Ok(space)
    }

    /// Like [`FiniteMetricSpace::new`] but skips the cubic triangle scan.
    pub fn new_unchecked(n: usize, dist: Vec<f64>, base: Option<usize>) -> Result<Self> {
        if dist.len() != n * n {
            return Err(GeoError::DimensionMismatch { expected: n * n, got: dist.len() });
        }
        if let Some(b) = base {
            if b >= n {
                return Err(GeoError::IndexOutOfRange { index: b, len: n });
            }
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(GeoError::InvalidMetric(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let d = dist[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(GeoError::InvalidMetric(format!("bad entry ({i},{j}) = {d}")));
                }
                if d != dist[j * n + i] {
                    return Err(GeoError::InvalidMetric(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(FiniteMetricSpace { n, dist, base })
    }

    pub fn check_triangle(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let dij = self.d(i, j);
                for k in 0..n {
                    let via = self.d(i, k) + self.d(k, j);
                    if dij > via + TRIANGLE_SLACK * via.max(1.0) {
                        return Err(GeoError::InvalidMetric(format!("triangle fails at ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Euclidean distances between the samples of `set`.
    pub fn from_point_set(set: &EuclideanPointSet, base: Option<usize>) -> Result<Self> {
        let n = set.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = sq_dist(set.point(i), set.point(j)).sqrt();
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Self::new_unchecked(n, dist, base)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn base(&self) -> Option<usize> {
        self.base
    }

    pub fn with_base(mut self, base: usize) -> Result<Self> {
        if base >= self.n {
            return Err(GeoError::IndexOutOfRange { index: base, len: self.n });
        }
        self.base = Some(base);
        Ok(self)
    }

    fn require_base(&self) -> Result<usize> {
        self.base.ok_or(GeoError::MissingBase)
    }

    /// Indices in the closed ball `B(center, r)`.
    pub fn ball(&self, center: usize, r: f64) -> Vec<usize> {
        (0..self.n).filter(|&j| self.d(center, j) <= r + BALL_TOL).collect()
    }

    /// Induced metric on `indices`; the base survives if it is among them.
    pub fn subspace(&self, indices: &[usize]) -> Self {
        let m = indices.len();
        let mut dist = vec![0.0; m * m];
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                dist[a * m + b] = self.d(i, j);
            }
        }
        let base = self.base.and_then(|b| indices.iter().position(|&i| i == b));
        FiniteMetricSpace { n: m, dist, base }
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }

    /// The same space with every distance multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        FiniteMetricSpace { n: self.n, dist: self.dist.iter().map(|d| d * factor).collect(), base: self.base }
    }
}

/// Reads a distance matrix, dense or lower-triangular with diagonal, with an optional `# base=<i>` line.
pub fn read_metric_csv<R: BufRead>(reader: R) -> Result<FiniteMetricSpace> {
    let mut base = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(h) = t.strip_prefix('#') {
            for tok in h.split_whitespace() {
                if let Some(v) = tok.strip_prefix("base=") {
                    base = Some(v.parse().map_err(|_| GeoError::Parse(format!("base `{v}`")))?);
                }
            }
            continue;
        }
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(t.as_bytes());
        let rec = rdr
            .records()
            .next()
            .ok_or_else(|| GeoError::Parse("empty row".into()))?
            .map_err(|e| GeoError::Parse(e.to_string()))?;
        let row = rec
            .iter()
            .map(|v| v.parse::<f64>().map_err(|_| GeoError::Parse(format!("`{v}`"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    let lower = rows.iter().enumerate().all(|(i, r)| r.len() == i + 1);
    let dense = rows.iter().all(|r| r.len() == n);
    let mut dist = vec![0.0; n * n];
    if dense && !(lower && n == 1) {
        for (i, r) in rows.iter().enumerate() {
            dist[i * n..(i + 1) * n].copy_from_slice(r);
        }
    } else if lower {
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                dist[i * n + j] = *v;
                dist[j * n + i] = *v;
            }
        }
    } else {
        return Err(GeoError::Parse("matrix is neither square nor lower-triangular".into()));
    }
    FiniteMetricSpace::new(n, dist, base)
}

pub fn write_metric_csv<W: Write>(space: &FiniteMetricSpace, mut w: W) -> Result<()> {
    if let Some(b) = space.base {
        writeln!(w, "# base={b}")?;
    }
    for i in 0..space.n {
        let row: Vec<String> = (0..space.n).map(|j| crate::pointset::fmt_f64(space.d(i, j))).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// A relation between two index sets, stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        Correspondence { pairs }
    }

    pub fn identity(n: usize) -> Self {
        Correspondence { pairs: (0..n).map(|i| (i, i)).collect() }
    }

    /// Checks range, that both sides are covered and that based spaces keep the base pair.
    pub fn validate(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<()> {
        let mut cx = vec![false; x.len()];
        let mut cy = vec![false; y.len()];
        for &(i, j) in &self.pairs {
            if i >= x.len() || j >= y.len() {
                return Err(GeoError::InvalidCorrespondence(format!("pair ({i},{j}) out of range")));
            }
            cx[i] = true;
            cy[j] = true;
        }
        if let Some(i) = cx.iter().position(|c| !c) {
            return Err(GeoError::InvalidCorrespondence(format!("X index {i} uncovered")));
        }
        if let Some(j) = cy.iter().position(|c| !c) {
            return Err(GeoError::InvalidCorrespondence(format!("Y index {j} uncovered")));
        }
        if let (Some(bx), Some(by)) = (x.base, y.base) {
            if !self.pairs.contains(&(bx, by)) {
                return Err(GeoError::InvalidCorrespondence("base pair missing".into()));
            }
        }
        Ok(())
    }
}

fn raw_distortion(x: &FiniteMetricSpace, y: &FiniteMetricSpace, pairs: &[(usize, usize)]) -> f64 {
    let mut worst = 0.0f64;
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[a + 1..] {
            worst = worst.max((x.d(i, k) - y.d(j, l)).abs());
        }
    }
    worst
}

/// `sup |d_X(i,i') - d_Y(j,j')|` over pairs of the correspondence.
pub fn correspondence_distortion(x: &FiniteMetricSpace, y: &FiniteMetricSpace, c: &Correspondence) -> Result<f64> {
    c.validate(x, y)?;
    Ok(raw_distortion(x, y, &c.pairs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    /// Exact branch-and-bound; refuses spaces above [`EXHAUSTIVE_LIMIT`].
    Exhaustive,
    /// Greedy seed plus local moves, an upper bound.
    Heuristic { budget: usize },
    /// Exhaustive when both sides fit the guard, heuristic otherwise.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhEstimate {
    pub value: f64,
    /// False when the value is only an upper bound.
    pub exact: bool,
    pub correspondence: Correspondence,
}

/// What a correspondence search must cover, and which pair it must contain.
struct CoverProblem<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    need_x: Vec<bool>,
    need_y: Vec<bool>,
    anchor: Option<(usize, usize)>,
}

impl CoverProblem<'_> {
    fn compatible(&self, p: (usize, usize), q: (usize, usize), t: f64) -> bool {
        (self.x.d(p.0, q.0) - self.y.d(p.1, q.1)).abs() <= t
    }

    /// Depth-first search for a pairwise-compatible set of pairs covering every
    /// required index, branching on the uncovered index with fewest options.
    fn feasible(&self, t: f64) -> Option<Vec<(usize, usize)>> {
        let all: Vec<(usize, usize)> = (0..self.x.len())
            .flat_map(|i| (0..self.y.len()).map(move |j| (i, j)))
            .collect();
        let mut chosen = Vec::new();
        let mut cand = all;
        if let Some(a) = self.anchor {
            chosen.push(a);
            cand.retain(|&q| self.compatible(a, q, t));
        }
        if self.search(t, &mut chosen, &cand) {
            Some(chosen)
        } else {
            None
        }
    }

    fn search(&self, t: f64, chosen: &mut Vec<(usize, usize)>, cand: &[(usize, usize)]) -> bool {
        let mut cov_x = vec![false; self.x.len()];
        let mut cov_y = vec![false; self.y.len()];
        for &(i, j) in chosen.iter() {
            cov_x[i] = true;
            cov_y[j] = true;
        }
        let mut best: Option<(usize, bool, usize)> = None;
        for (side, need, cov) in [(false, &self.need_x, &cov_x), (true, &self.need_y, &cov_y)] {
            for e in 0..need.len() {
                if !need[e] || cov[e] {
                    continue;
                }
                let count = cand.iter().filter(|q| if side { q.1 == e } else { q.0 == e }).count();
                if count == 0 {
                    return false;
                }
                if best.is_none_or(|b| count < b.2) {
                    best = Some((e, side, count));
                }
            }
        }
        let Some((e, side, _)) = best else { return true };
        let options: Vec<(usize, usize)> =
            cand.iter().copied().filter(|q| if side { q.1 == e } else { q.0 == e }).collect();
        for p in options {
            let next: Vec<(usize, usize)> = cand.iter().copied().filter(|&q| q != p && self.compatible(p, q, t)).collect();
            chosen.push(p);
            if self.search(t, chosen, &next) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    /// Exact minimum distortion by bisection over the finite set of candidate thresholds.
    fn exact(&self) -> (f64, Vec<(usize, usize)>) {
        let mut th = vec![0.0];
        for i in 0..self.x.len() {
            for k in i..self.x.len() {
                for j in 0..self.y.len() {
                    for l in j..self.y.len() {
                        th.push((self.x.d(i, k) - self.y.d(j, l)).abs());
                        th.push((self.x.d(i, k) - self.y.d(l, j)).abs());
                    }
                }
            }
        }
        th.sort_by(|a, b| a.partial_cmp(b).unwrap());
        th.dedup();
        let (mut lo, mut hi) = (0usize, th.len() - 1);
        let mut witness = self.feasible(th[hi]).expect("largest threshold is always feasible");
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.feasible(th[mid]) {
                Some(w) => {
                    hi = mid;
                    witness = w;
                }
                None => lo = mid + 1,
            }
        }
        let value = raw_distortion(self.x, self.y, &witness);
        (value, witness)
    }

    fn covered(&self, f: &[Option<usize>], g: &[Option<usize>]) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self.anchor.into_iter().collect();
        pairs.extend(f.iter().enumerate().filter_map(|(i, j)| j.map(|j| (i, j))));
        pairs.extend(g.iter().enumerate().filter_map(|(j, i)| i.map(|i| (i, j))));
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    /// Objective for local search: (max distortion, sum of per-pair worst distortions).
    fn score(&self, pairs: &[(usize, usize)]) -> (f64, f64) {
        let mut worst = 0.0f64;
        let mut total = 0.0;
        for &p in pairs {
            let mut row = 0.0f64;
            for &q in pairs {
                row = row.max((self.x.d(p.0, q.0) - self.y.d(p.1, q.1)).abs());
            }
            worst = worst.max(row);
            total += row;
        }
        (worst, total)
    }

    /// Greedy assignment of every required index followed by single-reassignment descent.
    fn heuristic(&self, budget: usize) -> (f64, Vec<(usize, usize)>) {
        let (nx, ny) = (self.x.len(), self.y.len());
        let mut f: Vec<Option<usize>> = vec![None; nx];
        let mut g: Vec<Option<usize>> = vec![None; ny];
        let mut order: Vec<(bool, usize)> = (0..nx)
            .filter(|&i| self.need_x[i])
            .map(|i| (false, i))
            .chain((0..ny).filter(|&j| self.need_y[j]).map(|j| (true, j)))
            .collect();
        if let Some((bx, by)) = self.anchor {
            let key = |&(side, e): &(bool, usize)| if side { self.y.d(by, e) } else { self.x.d(bx, e) };
            order.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap().then(a.cmp(b)));
        }
        for &(side, e) in &order {
            let current = self.covered(&f, &g);
            let range = if side { nx } else { ny };
            let mut best = (f64::INFINITY, usize::MAX);
            for o in 0..range {
                let p = if side { (o, e) } else { (e, o) };
                let cost = current.iter().map(|&q| (self.x.d(p.0, q.0) - self.y.d(p.1, q.1)).abs()).fold(0.0, f64::max);
                if cost < best.0 {
                    best = (cost, o);
                }
            }
            if side {
                g[e] = Some(best.1);
            } else {
                f[e] = Some(best.1);
            }
        }
        let mut score = self.score(&self.covered(&f, &g));
        let mut spent = 0usize;
        'outer: loop {
            let mut improved = false;
            for &(side, e) in &order {
                let range = if side { nx } else { ny };
                for o in 0..range {
                    if spent >= budget {
                        break 'outer;
                    }
                    let old = if side { g[e] } else { f[e] };
                    if old == Some(o) {
                        continue;
                    }
                    spent += 1;
                    if side {
                        g[e] = Some(o);
                    } else {
                        f[e] = Some(o);
                    }
                    let s = self.score(&self.covered(&f, &g));
                    if s.0 < score.0 || (s.0 == score.0 && s.1 < score.1) {
                        score = s;
                        improved = true;
                    } else if side {
                        g[e] = old;
                    } else {
                        f[e] = old;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        let pairs = self.covered(&f, &g);
        (raw_distortion(self.x, self.y, &pairs), pairs)
    }

    fn solve(&self, mode: SearchMode) -> Result<(f64, bool, Vec<(usize, usize)>)> {
        let small = self.x.len() <= EXHAUSTIVE_LIMIT && self.y.len() <= EXHAUSTIVE_LIMIT;
        match mode {
            SearchMode::Exhaustive if !small => Err(GeoError::TooLargeForExhaustive {
                limit: EXHAUSTIVE_LIMIT,
                got: self.x.len().max(self.y.len()),
            }),
            SearchMode::Exhaustive => {
                let (v, w) = self.exact();
                Ok((v, true, w))
            }
            SearchMode::Auto if small => {
                let (v, w) = self.exact();
                Ok((v, true, w))
            }
            SearchMode::Auto => {
                let (v, w) = self.heuristic(DEFAULT_BUDGET);
                Ok((v, false, w))
            }
            SearchMode::Heuristic { budget } => {
                let (v, w) = self.heuristic(budget);
                Ok((v, false, w))
            }
        }
    }
}

/// Half the minimal distortion over base-preserving correspondences.
pub fn pgh_oracle(x: &FiniteMetricSpace, y: &FiniteMetricSpace, mode: SearchMode) -> Result<GhEstimate> {
    let bx = x.require_base()?;
    let by = y.require_base()?;
    let problem = CoverProblem {
        x,
        y,
        need_x: vec![true; x.len()],
        need_y: vec![true; y.len()],
        anchor: Some((bx, by)),
    };
    let (dis, exact, pairs) = problem.solve(mode)?;
    Ok(GhEstimate { value: dis / 2.0, exact, correspondence: Correspondence::new(pairs) })
}

/// Windowed distance `D_GH^r`, correspondence surrogate.
///
/// The correspondence must contain the base pair and cover every point of
/// `B_X(x, r)` and `B_Y(y, r)`; partners may lie outside the windows. The value
/// is the least distortion of such a correspondence divided by `r`. Enlarging
/// `r` only adds covering requirements, so `r D^r` is nondecreasing in `r`.
pub fn dgh_window(x: &FiniteMetricSpace, y: &FiniteMetricSpace, r: f64, mode: SearchMode) -> Result<GhEstimate> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(GeoError::NonpositiveRadius(r));
    }
    let bx = x.require_base()?;
    let by = y.require_base()?;
    let problem = CoverProblem {
        x,
        y,
        need_x: (0..x.len()).map(|i| x.d(bx, i) <= r + BALL_TOL).collect(),
        need_y: (0..y.len()).map(|j| y.d(by, j) <= r + BALL_TOL).collect(),
        anchor: Some((bx, by)),
    };
    let (dis, exact, pairs) = problem.solve(mode)?;
    Ok(GhEstimate { value: dis / r, exact, correspondence: Correspondence::new(pairs) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryCheck {
    pub pass: bool,
    pub distortion: f64,
    pub covering_gap: f64,
    /// Pair of X indices realising the distortion.
    pub worst_pair: Option<(usize, usize)>,
    /// Y index farthest from the image.
    pub worst_uncovered: Option<usize>,
}

/// Checks whether `f` is an ε-isometry between the based spaces.
pub fn epsilon_isometry_defect(
    f: &[usize],
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    eps: f64,
) -> Result<IsometryCheck> {
    if !(eps > 0.0) {
        return Err(GeoError::InvalidParameter(format!("eps {eps}")));
    }
    let bx = x.require_base()?;
    let by = y.require_base()?;
    if f.len() != x.len() {
        return Err(GeoError::DimensionMismatch { expected: x.len(), got: f.len() });
    }
    if let Some(&j) = f.iter().find(|&&j| j >= y.len()) {
        return Err(GeoError::IndexOutOfRange { index: j, len: y.len() });
    }
    if f[bx] != by {
        return Err(GeoError::BaseNotPreserved);
    }
    let ball = x.ball(bx, 1.0 / eps);
    let mut distortion = 0.0f64;
    let mut worst_pair = None;
    for (a, &i) in ball.iter().enumerate() {
        for &k in &ball[a + 1..] {
            let d = (x.d(i, k) - y.d(f[i], f[k])).abs();
            if d > distortion {
                distortion = d;
                worst_pair = Some((i, k));
            }
        }
    }
    let image: Vec<usize> = ball.iter().map(|&i| f[i]).collect();
    let mut covering_gap = 0.0f64;
    let mut worst_uncovered = None;
    let target = 1.0 / eps - eps;
    if target >= 0.0 {
        for j in y.ball(by, target) {
            let gap = image.iter().map(|&m| y.d(j, m)).fold(f64::INFINITY, f64::min);
            if gap > covering_gap {
                covering_gap = gap;
                worst_uncovered = Some(j);
            }
        }
    }
    Ok(IsometryCheck {
        pass: distortion <= eps + BALL_TOL && covering_gap <= eps + BALL_TOL,
        distortion,
        covering_gap,
        worst_pair,
        worst_uncovered,
    })
}

/// Least ε for which `phi` is an ε-approximation: max of distortion and covering gap.
pub fn pgha_defect(phi: &[usize], a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Result<f64> {
    if phi.len() != a.len() {
        return Err(GeoError::DimensionMismatch { expected: a.len(), got: phi.len() });
    }
    if let Some(&j) = phi.iter().find(|&&j| j >= b.len()) {
        return Err(GeoError::IndexOutOfRange { index: j, len: b.len() });
    }
    Ok(defect_unchecked(phi, a, b))
}

fn defect_unchecked(phi: &[usize], a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.len() {
        for k in i + 1..a.len() {
            worst = worst.max((a.d(i, k) - b.d(phi[i], phi[k])).abs());
        }
    }
    let mut hit = vec![false; b.len()];
    for &j in phi {
        hit[j] = true;
    }
    let image: Vec<usize> = (0..b.len()).filter(|&j| hit[j]).collect();
    for j in 0..b.len() {
        let gap = image.iter().map(|&m| b.d(j, m)).fold(f64::INFINITY, f64::min);
        worst = worst.max(gap);
    }
    worst
}

/// Defect of `phi` together with a tie-breaking total (per-point worst distortions plus covering gaps).
fn defect_score(phi: &[usize], a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> (f64, f64) {
    let mut worst = 0.0f64;
    let mut total = 0.0;
    for i in 0..a.len() {
        let mut row = 0.0f64;
        for k in 0..a.len() {
            row = row.max((a.d(i, k) - b.d(phi[i], phi[k])).abs());
        }
        worst = worst.max(row);
        total += row;
    }
    let mut hit = vec![false; b.len()];
    for &j in phi {
        hit[j] = true;
    }
    let image: Vec<usize> = (0..b.len()).filter(|&j| hit[j]).collect();
    for j in 0..b.len() {
        let gap = image.iter().map(|&m| b.d(j, m)).fold(f64::INFINITY, f64::min);
        worst = worst.max(gap);
        total += gap;
    }
    (worst, total)
}

/// Upper estimate of ξ: the best pointed-approximation defect found between
/// `B_X(x, r)` and `B_Y(y, r)`, divided by `r`.
///
/// Points are seeded in order of distance from the base, each at the partner
/// that least distorts the points already placed. Single reassignments then
/// run until no move helps or `budget` candidate moves have been evaluated.
pub fn xi_estimate(x: &FiniteMetricSpace, y: &FiniteMetricSpace, r: f64, budget: usize) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(GeoError::NonpositiveRadius(r));
    }
    let bx = x.require_base()?;
    let by = y.require_base()?;
    let a = x.subspace(&x.ball(bx, r));
    let b = y.subspace(&y.ball(by, r));
    let (ba, bb) = (a.base.expect("base lies in its ball"), b.base.expect("base lies in its ball"));
    let mut order: Vec<usize> = (0..a.len()).filter(|&i| i != ba).collect();
    order.sort_by(|&i, &k| a.d(ba, i).partial_cmp(&a.d(ba, k)).unwrap().then(i.cmp(&k)));
    let mut phi = vec![bb; a.len()];
    let mut placed = vec![ba];
    for &i in &order {
        let mut best = (f64::INFINITY, 0usize);
        for j in 0..b.len() {
            let cost = placed.iter().map(|&k| (a.d(i, k) - b.d(j, phi[k])).abs()).fold(0.0, f64::max);
            if cost < best.0 {
                best = (cost, j);
            }
        }
        phi[i] = best.1;
        placed.push(i);
    }
    let mut current = defect_score(&phi, &a, &b);
    let mut spent = 0usize;
    'outer: loop {
        let mut improved = false;
        for &i in &order {
            for j in 0..b.len() {
                if spent >= budget {
                    break 'outer;
                }
                if phi[i] == j {
                    continue;
                }
                spent += 1;
                let old = phi[i];
                phi[i] = j;
                let s = defect_score(&phi, &a, &b);
                if s.0 < current.0 || (s.0 == current.0 && s.1 < current.1) {
                    current = s;
                    improved = true;
                } else {
                    phi[i] = old;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok(current.0 / r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    Z(usize),
    /// A point of X outside the glued subset, by its X index.
    X(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluedSpace {
    pub space: FiniteMetricSpace,
    /// Origin of each point: Z points come first, then the rest of X.
    pub parts: Vec<Part>,
}

/// Glues X onto Z along an isometric embedding of `xsub`.
///
/// Cross distances are `inf_{x̃ ∈ xsub} d_X(u, x̃) + d_Z(embed(x̃), v)`.
pub fn glue(x: &FiniteMetricSpace, xsub: &[usize], z: &FiniteMetricSpace, embed: &[usize]) -> Result<GluedSpace> {
    if xsub.is_empty() {
        return Err(GeoError::EmptySubset);
    }
    if embed.len() != xsub.len() {
        return Err(GeoError::DimensionMismatch { expected: xsub.len(), got: embed.len() });
    }
    for &i in xsub {
        if i >= x.len() {
            return Err(GeoError::IndexOutOfRange { index: i, len: x.len() });
        }
    }
    for &j in embed {
        if j >= z.len() {
            return Err(GeoError::IndexOutOfRange { index: j, len: z.len() });
        }
    }
    for a in 0..xsub.len() {
        for b in a + 1..xsub.len() {
            let gap = (x.d(xsub[a], xsub[b]) - z.d(embed[a], embed[b])).abs();
            if gap > 1e-9 * x.d(xsub[a], xsub[b]).max(1.0) {
                return Err(GeoError::NotIsometricEmbedding(xsub[a], xsub[b], gap));
            }
        }
    }
    let mut parts: Vec<Part> = (0..z.len()).map(Part::Z).collect();
    let mut in_sub = vec![false; x.len()];
    for &i in xsub {
        in_sub[i] = true;
    }
    parts.extend((0..x.len()).filter(|&i| !in_sub[i]).map(Part::X));
    let m = parts.len();
    let mut dist = vec![0.0; m * m];
    for a in 0..m {
        for b in a + 1..m {
            let d = match (parts[a], parts[b]) {
                (Part::Z(p), Part::Z(q)) => z.d(p, q),
                (Part::X(u), Part::X(v)) => x.d(u, v),
                (Part::X(u), Part::Z(v)) | (Part::Z(v), Part::X(u)) => xsub
                    .iter()
                    .zip(embed)
                    .map(|(&s, &e)| x.d(u, s) + z.d(e, v))
                    .fold(f64::INFINITY, f64::min),
            };
            dist[a * m + b] = d;
            dist[b * m + a] = d;
        }
    }
    let space = FiniteMetricSpace::new(m, dist, z.base)?;
    Ok(GluedSpace { space, parts })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn line(xs: &[f64], base: usize) -> FiniteMetricSpace {
        let n = xs.len();
        let dist = (0..n * n).map(|k| (xs[k / n] - xs[k % n]).abs()).collect();
        FiniteMetricSpace::new(n, dist, Some(base)).unwrap()
    }

    #[test]
    fn distortion_examples() {
        let x = line(&[0.0, 1.0], 0);
        assert_eq!(correspondence_distortion(&x, &x, &Correspondence::identity(2)).unwrap(), 0.0);
        let y = line(&[0.0, 2.0], 0);
        assert_eq!(correspondence_distortion(&x, &y, &Correspondence::identity(2)).unwrap(), 1.0);
        let bad = Correspondence::new(vec![(0, 0)]);
        assert!(correspondence_distortion(&x, &y, &bad).is_err());
    }

    #[test]
    fn oracle_examples() {
        let x = line(&[0.0, 1.0], 0);
        let y = line(&[0.0, 2.0], 0);
        assert_eq!(pgh_oracle(&x, &x, SearchMode::Exhaustive).unwrap().value, 0.0);
        let e = pgh_oracle(&x, &y, SearchMode::Exhaustive).unwrap();
        assert_eq!(e.value, 0.5);
        assert!(e.exact);
        let big = line(&(0..9).map(|i| i as f64).collect::<Vec<_>>(), 0);
        assert!(matches!(pgh_oracle(&big, &big, SearchMode::Exhaustive), Err(GeoError::TooLargeForExhaustive { .. })));
        let h = pgh_oracle(&big, &big, SearchMode::Auto).unwrap();
        assert!(!h.exact);
        assert_eq!(h.value, 0.0);
    }

    #[test]
    fn window_example() {
        let x = line(&[0.0, 1.0], 0);
        let y = line(&[0.0], 0);
        assert_eq!(dgh_window(&x, &y, 2.0, SearchMode::Exhaustive).unwrap().value, 0.5);
        assert_eq!(dgh_window(&x, &x, 2.0, SearchMode::Exhaustive).unwrap().value, 0.0);
    }

    #[test]
    fn isometry_examples() {
        let x = line(&[0.0, 1.0], 0);
        let y = line(&[0.0, 1.5], 0);
        let c = epsilon_isometry_defect(&[0, 1], &x, &y, 0.4).unwrap();
        assert!(!c.pass);
        assert!((c.distortion - 0.5).abs() < 1e-15);
        let c = epsilon_isometry_defect(&[0, 1], &x, &y, 0.6).unwrap();
        // B_Y(0, 1/0.6 - 0.6) holds only the base, so the covering gap is 0
        assert_eq!(c.covering_gap, 0.0);
        assert!(c.pass);
        assert!(matches!(epsilon_isometry_defect(&[1, 0], &x, &y, 0.6), Err(GeoError::BaseNotPreserved)));
        let id = epsilon_isometry_defect(&[0, 1], &x, &x, 0.3).unwrap();
        assert!(id.pass && id.distortion == 0.0 && id.covering_gap == 0.0);
    }

    #[test]
    fn pgha_examples() {
        let a = line(&[0.0, 1.0], 0);
        let b = line(&[0.0, 1.0, 2.0], 0);
        assert_eq!(pgha_defect(&[0, 1], &a, &b).unwrap(), 1.0);
        assert_eq!(pgha_defect(&[0, 1], &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn glue_example() {
        let x = line(&[0.0, 1.0, 2.0], 0);
        let z = line(&[0.0, 1.0], 0);
        let g = glue(&x, &[0, 1], &z, &[0, 1]).unwrap();
        assert_eq!(g.parts, vec![Part::Z(0), Part::Z(1), Part::X(2)]);
        assert_eq!(g.space.d(2, 1), 1.0);
        assert_eq!(g.space.d(2, 0), 2.0);
        let bad = line(&[0.0, 3.0], 0);
        assert!(matches!(glue(&x, &[0, 1], &bad, &[0, 1]), Err(GeoError::NotIsometricEmbedding(..))));
        assert!(matches!(glue(&x, &[], &z, &[]), Err(GeoError::EmptySubset)));
    }

    #[test]
    fn metric_csv_round_trip_and_lower_triangle() {
        let x = line(&[0.0, 1.0, 3.0], 2);
        let mut buf = Vec::new();
        write_metric_csv(&x, &mut buf).unwrap();
        assert_eq!(read_metric_csv(buf.as_slice()).unwrap(), x);
        let lower = "# base=2\n0\n1,0\n3,2,0\n";
        assert_eq!(read_metric_csv(lower.as_bytes()).unwrap(), x);
        assert!(read_metric_csv("0,1\n1,0,2\n".as_bytes()).is_err());
        assert!(read_metric_csv("0,1,5\n1,0,1\n5,1,0\n".as_bytes()).is_err());
    }
}

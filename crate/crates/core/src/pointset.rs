//! Sampled subsets of R^d, pointed sets and balls, plus the CSV point-set format.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::kdtree::{sq_dist, KdTree};

/// Slack added to every closed-ball membership test.
pub const BALL_TOL: f64 = 1e-12;

/// A finite sample of a closed subset of R^d.
///
/// `resolution` is the sampling guarantee: every point of the intended continuum
/// set lies within `resolution` of a sample. A resolution of zero means the
/// finite set is the object itself. Optional per-sample `weights` carry a
/// measure surrogate, and `markers` flag named subsets.
#[derive(Debug, Clone)]
pub struct EuclideanPointSet {
    dim: usize,
    coords: Vec<f64>,
    resolution: f64,
    label: String,
    weights: Option<Vec<f64>>,
    markers: BTreeMap<String, Vec<bool>>,
    index: OnceLock<KdTree>,
}

impl PartialEq for EuclideanPointSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.coords == other.coords
            && self.resolution == other.resolution
            && self.label == other.label
            && self.weights == other.weights
            && self.markers == other.markers
    }
}

impl EuclideanPointSet {
    /// Builds a set from a flat coordinate buffer (`len = n * dim`).
    pub fn new(dim: usize, coords: Vec<f64>, resolution: f64, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(GeoError::InvalidParameter("dimension must be positive".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(GeoError::DimensionMismatch { expected: dim, got: coords.len() % dim });
        }
        if !(resolution >= 0.0) || !resolution.is_finite() {
            return Err(GeoError::InvalidParameter(format!("resolution {resolution}")));
        }
        if let Some(i) = coords.iter().position(|v| !v.is_finite()) {
            return Err(GeoError::NonFinite(i / dim));
        }
        Ok(EuclideanPointSet {
            dim,
            coords,
            resolution,
            label: label.into(),
            weights: None,
            markers: BTreeMap::new(),
            index: OnceLock::new(),
        })
    }

    pub fn from_points(points: &[Vec<f64>], resolution: f64, label: impl Into<String>) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).unwrap_or(1);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(GeoError::DimensionMismatch { expected: dim, got: p.len() });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords, resolution, label)
    }

    pub fn empty(dim: usize) -> Self {
        Self::new(dim, Vec::new(), 0.0, "empty").expect("valid empty set")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn set_resolution(&mut self, h: f64) {
        self.resolution = h;
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(GeoError::DimensionMismatch { expected: self.len(), got: weights.len() });
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(GeoError::InvalidParameter("weights must be finite and nonnegative".into()));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    /// Mass of sample `i`: its weight, or 1 when the set is unweighted.
    pub fn mass(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    pub fn total_mass(&self) -> f64 {
        (0..self.len()).map(|i| self.mass(i)).sum()
    }

    pub fn markers(&self) -> &BTreeMap<String, Vec<bool>> {
        &self.markers
    }

    pub fn set_marker(&mut self, name: impl Into<String>, flags: Vec<bool>) -> Result<()> {
        if flags.len() != self.len() {
            return Err(GeoError::DimensionMismatch { expected: self.len(), got: flags.len() });
        }
        self.markers.insert(name.into(), flags);
        Ok(())
    }

    pub fn marker(&self, name: &str) -> Option<&[bool]> {
        self.markers.get(name).map(|v| v.as_slice())
    }

    pub fn marker_indices(&self, name: &str) -> Vec<usize> {
        self.marker(name)
            .map(|f| f.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect())
            .unwrap_or_default()
    }

    /// Spatial index, built on first use.
    pub fn index(&self) -> &KdTree {
        self.index.get_or_init(|| KdTree::build(&self.coords, self.dim))
    }

    /// Nearest sample to `q` and its distance.
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        self.index().nearest(q)
    }

    /// Indices of samples in the closed ball `B(q, r)` (with [`BALL_TOL`]).
    pub fn within(&self, q: &[f64], r: f64) -> Vec<usize> {
        self.index().within(q, r + BALL_TOL)
    }

    /// Subset by indices, keeping resolution, weights and markers.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        let weights = self.weights.as_ref().map(|w| indices.iter().map(|&i| w[i]).collect());
        let markers = self
            .markers
            .iter()
            .map(|(k, v)| (k.clone(), indices.iter().map(|&i| v[i]).collect()))
            .collect();
        EuclideanPointSet {
            dim: self.dim,
            coords,
            resolution: self.resolution,
            label: self.label.clone(),
            weights,
            markers,
            index: OnceLock::new(),
        }
    }

    /// Applies `f` to every point; resolution is left to the caller.
    pub fn map_points(&self, mut f: impl FnMut(&[f64], &mut [f64])) -> Self {
        let mut coords = vec![0.0; self.coords.len()];
        for (src, dst) in self.coords.chunks_exact(self.dim).zip(coords.chunks_exact_mut(self.dim)) {
            f(src, dst);
        }
        EuclideanPointSet {
            dim: self.dim,
            coords,
            resolution: self.resolution,
            label: self.label.clone(),
            weights: self.weights.clone(),
            markers: self.markers.clone(),
            index: OnceLock::new(),
        }
    }

    /// Concatenates two sets of equal dimension; markers missing on one side read as false.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(GeoError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        let weights = match (&self.weights, &other.weights) {
            (None, None) => None,
            _ => Some((0..self.len()).map(|i| self.mass(i)).chain((0..other.len()).map(|i| other.mass(i))).collect()),
        };
        let mut markers = BTreeMap::new();
        for name in self.markers.keys().chain(other.markers.keys()) {
            let a = self.marker(name).map(|v| v.to_vec()).unwrap_or_else(|| vec![false; self.len()]);
            let b = other.marker(name).map(|v| v.to_vec()).unwrap_or_else(|| vec![false; other.len()]);
            markers.insert(name.clone(), a.into_iter().chain(b).collect());
        }
        Ok(EuclideanPointSet {
            dim: self.dim,
            coords,
            resolution: self.resolution.max(other.resolution),
            label: self.label.clone(),
            weights,
            markers,
            index: OnceLock::new(),
        })
    }

    /// Exact diameter of the sample set.
    pub fn diameter(&self) -> f64 {
        diameter_of(self.dim, &self.coords)
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.points().map(|p| p.to_vec()).collect()
    }
}

/// Exact diameter of a flat coordinate buffer.
///
/// A double sweep gives a lower bound `L`; only points whose centroid distances
/// can add up to more than `L` are compared pairwise.
pub fn diameter_of(dim: usize, coords: &[f64]) -> f64 {
    let n = coords.len() / dim;
    if n < 2 {
        return 0.0;
    }
    let pt = |i: usize| &coords[i * dim..(i + 1) * dim];
    if n <= 2048 {
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(sq_dist(pt(i), pt(j)));
            }
        }
        return best.sqrt();
    }
    let farthest = |from: usize| -> (usize, f64) {
        (0..n)
            .into_par_iter()
            .map(|j| (j, sq_dist(pt(from), pt(j))))
            .reduce(|| (0, -1.0), |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
    };
    let (a, _) = farthest(0);
    let (b, dab) = farthest(a);
    let (_, dba) = farthest(b);
    let mut lower = dab.max(dba).sqrt();
    let mut centroid = vec![0.0; dim];
    for p in coords.chunks_exact(dim) {
        for (c, v) in centroid.iter_mut().zip(p) {
            *c += v / n as f64;
        }
    }
    let mut radial: Vec<(f64, usize)> = (0..n).map(|i| (sq_dist(pt(i), &centroid).sqrt(), i)).collect();
    radial.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let top = radial[0].0;
    let cutoff = radial.iter().position(|(d, _)| d + top <= lower).unwrap_or(n);
    let candidates = &radial[..cutoff];
    let found = candidates
        .par_iter()
        .enumerate()
        .map(|(k, &(di, i))| {
            let mut best = 0.0f64;
            for &(dj, j) in &candidates[k + 1..] {
                if di + dj <= lower {
                    break;
                }
                best = best.max(sq_dist(pt(i), pt(j)));
            }
            best.sqrt()
        })
        .reduce(|| 0.0, f64::max);
    lower = lower.max(found);
    lower
}

/// A set with a distinguished sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PointedSet {
    pub set: EuclideanPointSet,
    pub base: usize,
}

impl PointedSet {
    pub fn new(set: EuclideanPointSet, base: usize) -> Result<Self> {
        if base >= set.len() {
            return Err(GeoError::IndexOutOfRange { index: base, len: set.len() });
        }
        Ok(PointedSet { set, base })
    }

    pub fn base_point(&self) -> &[f64] {
        self.set.point(self.base)
    }
}

/// Closed Euclidean ball. Witness balls of degenerate covers may have radius zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeoError::NonpositiveRadius(radius));
        }
        Ok(Ball { center, radius })
    }

    /// A zero-radius ball, used for singleton cover elements.
    pub fn point(center: Vec<f64>) -> Self {
        Ball { center, radius: 0.0 }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        sq_dist(&self.center, p).sqrt() <= self.radius + BALL_TOL
    }
}

/// Samples of `a` inside the closed ball `b`; resolution, weights and markers carry over.
pub fn intersect_ball(a: &EuclideanPointSet, b: &Ball) -> Result<EuclideanPointSet> {
    if b.center.len() != a.dim() {
        return Err(GeoError::DimensionMismatch { expected: a.dim(), got: b.center.len() });
    }
    if a.is_empty() {
        return Ok(a.clone());
    }
    Ok(a.subset(&a.within(&b.center, b.radius)))
}

// ---------------------------------------------------------------------------
// CSV point-set format
// ---------------------------------------------------------------------------

#[derive(Debug, Default)]
struct Header {
    dim: Option<usize>,
    resolution: f64,
    label: String,
    weighted: bool,
    markers: Vec<String>,
}

fn parse_header(line: &str) -> Result<Header> {
    let body = line.trim_start_matches('#').trim();
    let mut h = Header::default();
    let mut rest = body;
    while !rest.is_empty() {
        let (token, tail) = match rest.find(char::is_whitespace) {
            Some(k) => (&rest[..k], rest[k..].trim_start()),
            None => (rest, ""),
        };
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| GeoError::Parse(format!("bad header token `{token}`")))?;
        match key {
            "dim" => h.dim = Some(value.parse().map_err(|_| GeoError::Parse(format!("dim `{value}`")))?),
            "resolution" => {
                h.resolution = value.parse().map_err(|_| GeoError::Parse(format!("resolution `{value}`")))?
            }
            "weights" => h.weighted = value == "1" || value == "true",
            "markers" => h.markers = value.split(',').filter(|s| !s.is_empty()).map(String::from).collect(),
            "label" => {
                // label swallows the remainder of the line
                h.label = if tail.is_empty() { value.to_string() } else { format!("{value} {tail}") };
                break;
            }
            other => return Err(GeoError::Parse(format!("unknown header key `{other}`"))),
        }
        rest = tail;
    }
    Ok(h)
}

/// Reads the CSV point-set format: one point per row, optionally preceded by
/// `# dim=<d> resolution=<h> [weights=1] [markers=a,b] label=<s>`. With
/// `weights=1` a weight column follows the coordinates; each marker adds a 0/1 column.
pub fn read_point_csv<R: BufRead>(mut reader: R) -> Result<EuclideanPointSet> {
    let mut first = String::new();
    let mut header = Header::default();
    let mut pending = None;
    loop {
        first.clear();
        if reader.read_line(&mut first)? == 0 {
            break;
        }
        let t = first.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            header = parse_header(t)?;
        } else {
            pending = Some(t.to_string());
        }
        break;
    }
    let mut text = pending.map(|l| l + "\n").unwrap_or_default();
    reader.read_to_string(&mut text)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let extra = usize::from(header.weighted) + header.markers.len();
    let mut dim = header.dim;
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut flags: Vec<Vec<bool>> = vec![Vec::new(); header.markers.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| GeoError::Parse(e.to_string()))?;
        let d = *dim.get_or_insert(rec.len().saturating_sub(extra));
        if rec.len() != d + extra || d == 0 {
            return Err(GeoError::Parse(format!("row {row}: expected {} columns, got {}", d + extra, rec.len())));
        }
        let num = |k: usize| -> Result<f64> {
            rec[k].parse::<f64>().map_err(|_| GeoError::Parse(format!("row {row}: `{}`", &rec[k])))
        };
        for k in 0..d {
            coords.push(num(k)?);
        }
        let mut k = d;
        if header.weighted {
            weights.push(num(k)?);
            k += 1;
        }
        for f in flags.iter_mut() {
            f.push(match &rec[k] {
                "1" => true,
                "0" => false,
                other => return Err(GeoError::Parse(format!("row {row}: marker `{other}`"))),
            });
            k += 1;
        }
    }
    let mut set = EuclideanPointSet::new(dim.unwrap_or(1), coords, header.resolution, header.label)?;
    if header.weighted {
        set = set.with_weights(weights)?;
    }
    for (name, f) in header.markers.into_iter().zip(flags) {
        set.set_marker(name, f)?;
    }
    Ok(set)
}

pub fn write_point_csv<W: Write>(set: &EuclideanPointSet, mut w: W) -> Result<()> {
    let names: Vec<&String> = set.markers.keys().collect();
    write!(w, "# dim={} resolution={}", set.dim, fmt_f64(set.resolution))?;
    if set.weights.is_some() {
        write!(w, " weights=1")?;
    }
    if !names.is_empty() {
        write!(w, " markers={}", names.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(","))?;
    }
    writeln!(w, " label={}", set.label)?;
    let mut line = String::new();
    for i in 0..set.len() {
        line.clear();
        for (k, v) in set.point(i).iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            line.push_str(&fmt_f64(*v));
        }
        if let Some(ws) = &set.weights {
            line.push(',');
            line.push_str(&fmt_f64(ws[i]));
        }
        for name in &names {
            line.push_str(if set.markers[*name][i] { ",1" } else { ",0" });
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// 17 significant digits, the round-trip precision of an f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(xs: &[f64]) -> EuclideanPointSet {
        EuclideanPointSet::from_points(&xs.iter().map(|x| vec![*x]).collect::<Vec<_>>(), 0.0, "t").unwrap()
    }

    #[test]
    fn intersect_ball_examples() {
        let a = line(&[0.0, 1.0, 2.0]);
        let got = intersect_ball(&a, &Ball::new(vec![0.0], 1.0).unwrap()).unwrap();
        assert_eq!(got.to_vecs(), vec![vec![0.0], vec![1.0]]);
        let b = line(&[5.0]);
        assert!(intersect_ball(&b, &Ball::new(vec![0.0], 1.0).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn intersect_ball_area_fraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..20000).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let a = EuclideanPointSet::from_points(&pts, 0.0, "unif").unwrap();
        let ball = Ball::new(vec![0.5, 0.5], 0.25).unwrap();
        let sub = intersect_ball(&a, &ball).unwrap();
        let frac = sub.len() as f64 / 20000.0;
        let area = std::f64::consts::PI * 0.0625;
        assert!((frac - area).abs() / area < 0.05, "fraction {frac} vs {area}");
        // idempotent
        assert_eq!(intersect_ball(&sub, &ball).unwrap(), sub);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(EuclideanPointSet::new(2, vec![0.0, f64::NAN], 0.0, "x").is_err());
        assert!(EuclideanPointSet::new(2, vec![0.0, 1.0, 2.0], 0.0, "x").is_err());
        assert!(Ball::new(vec![0.0], 0.0).is_err());
        assert!(PointedSet::new(line(&[0.0]), 1).is_err());
    }

    #[test]
    fn csv_round_trip_with_extras() {
        let mut a = line(&[0.0, 0.5, 1.0]).with_weights(vec![0.25, 0.5, 0.25]).unwrap();
        a.set_resolution(0.5);
        a.set_label("unit segment");
        a.set_marker("ends", vec![true, false, true]).unwrap();
        let mut buf = Vec::new();
        write_point_csv(&a, &mut buf).unwrap();
        let b = read_point_csv(buf.as_slice()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_without_header_infers_dimension() {
        let b = read_point_csv("1.0,2.0\n3.0,4.0\n".as_bytes()).unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.len(), 2);
        assert!(read_point_csv("1.0,2.0\n3.0\n".as_bytes()).is_err());
    }

    #[test]
    fn diameter_large_matches_brute() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let coords: Vec<f64> = (0..3 * 3000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let fast = diameter_of(3, &coords);
        let mut best = 0.0f64;
        for i in 0..3000 {
            for j in i + 1..3000 {
                best = best.max(sq_dist(&coords[i * 3..i * 3 + 3], &coords[j * 3..j * 3 + 3]));
            }
        }
        assert_eq!(fast, best.sqrt());
    }
}

//! Static k-d tree over a flat coordinate buffer.

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Nearest-neighbour and range index over `n` points of dimension `dim`.
///
/// The tree stores a permutation of point indices; coordinates are copied into
/// tree order so leaf scans are contiguous.
#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    order: Vec<usize>,
    coords: Vec<f64>,
    nodes: Vec<Node>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl KdTree {
    pub fn build(coords: &[f64], dim: usize) -> Self {
        assert!(dim > 0);
        let n = coords.len() / dim;
        let mut order: Vec<usize> = (0..n).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 1);
        if n > 0 {
            Self::build_rec(coords, dim, &mut order, 0, n, &mut nodes);
        }
        let mut sorted = Vec::with_capacity(coords.len());
        for &i in &order {
            sorted.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
        }
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in coords.chunks(dim) {
            for a in 0..dim {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        KdTree { dim, order, coords: sorted, nodes, lo, hi }
    }

    fn build_rec(
        coords: &[f64],
        dim: usize,
        order: &mut [usize],
        start: usize,
        end: usize,
        nodes: &mut Vec<Node>,
    ) -> usize {
        let id = nodes.len();
        if end - start <= LEAF_SIZE {
            nodes.push(Node::Leaf { start, end });
            return id;
        }
        // split on the axis of largest spread
        let slice = &order[start..end];
        let mut best_axis = 0;
        let mut best_spread = -1.0;
        for axis in 0..dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in slice {
                let v = coords[i * dim + axis];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi - lo > best_spread {
                best_spread = hi - lo;
                best_axis = axis;
            }
        }
        if best_spread <= 0.0 {
            nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mid = (end - start) / 2;
        let sub = &mut order[start..end];
        sub.select_nth_unstable_by(mid, |&a, &b| {
            coords[a * dim + best_axis]
                .partial_cmp(&coords[b * dim + best_axis])
                .unwrap()
                .then(a.cmp(&b))
        });
        let value = coords[sub[mid] * dim + best_axis];
        nodes.push(Node::Split { axis: best_axis, value, left: 0, right: 0 });
        let left = Self::build_rec(coords, dim, order, start, start + mid, nodes);
        let right = Self::build_rec(coords, dim, order, start + mid, end, nodes);
        nodes[id] = Node::Split { axis: best_axis, value, left, right };
        id
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Index and Euclidean distance of the nearest point; ties go to the lower index.
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        if self.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        // per-axis offsets from q to the current cell, starting from the bounding box
        let mut off: Vec<f64> = (0..self.dim).map(|a| (self.lo[a] - q[a]).max(q[a] - self.hi[a]).max(0.0)).collect();
        let rd = off.iter().map(|o| o * o).sum();
        self.nearest_rec(0, q, &mut best, rd, &mut off);
        Some((best.0, best.1.sqrt()))
    }

    fn nearest_rec(&self, node: usize, q: &[f64], best: &mut (usize, f64), rd: f64, off: &mut [f64]) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for slot in start..end {
                    let p = &self.coords[slot * self.dim..(slot + 1) * self.dim];
                    let d = sq_dist(p, q);
                    let idx = self.order[slot];
                    if d < best.1 || (d == best.1 && idx < best.0) {
                        *best = (idx, d);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.nearest_rec(near, q, best, rd, off);
                let old = off[axis];
                let far_rd = rd - old * old + diff * diff;
                if far_rd <= best.1 {
                    off[axis] = diff;
                    self.nearest_rec(far, q, best, far_rd, off);
                    off[axis] = old;
                }
            }
        }
    }

    /// Indices of all points with `|p - q| <= radius`, sorted ascending.
    pub fn within(&self, q: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if !self.is_empty() && radius >= 0.0 {
            let mut off: Vec<f64> = (0..self.dim).map(|a| (self.lo[a] - q[a]).max(q[a] - self.hi[a]).max(0.0)).collect();
            let rd = off.iter().map(|o| o * o).sum();
            self.within_rec(0, q, radius * radius, rd, &mut off, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn within_rec(&self, node: usize, q: &[f64], r2: f64, rd: f64, off: &mut [f64], out: &mut Vec<usize>) {
        if rd > r2 {
            return;
        }
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for slot in start..end {
                    let p = &self.coords[slot * self.dim..(slot + 1) * self.dim];
                    if sq_dist(p, q) <= r2 {
                        out.push(self.order[slot]);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.within_rec(near, q, r2, rd, off, out);
                let old = off[axis];
                off[axis] = diff;
                self.within_rec(far, q, r2, rd - old * old + diff * diff, off, out);
                off[axis] = old;
            }
        }
    }
}

/// Brute-force nearest neighbour, kept as an oracle for the tree.
pub fn brute_nearest(coords: &[f64], dim: usize, q: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in coords.chunks_exact(dim).enumerate() {
        let d = sq_dist(p, q);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((i, d));
        }
    }
    best.map(|(i, d)| (i, d.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nearest_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in 1..=4 {
            let coords: Vec<f64> = (0..500 * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let tree = KdTree::build(&coords, dim);
            for _ in 0..200 {
                let q: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let (i, d) = tree.nearest(&q).unwrap();
                let (j, e) = brute_nearest(&coords, dim, &q).unwrap();
                assert_eq!(d, e);
                assert_eq!(i, j);
            }
        }
    }

    #[test]
    fn within_matches_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let coords: Vec<f64> = (0..3000).map(|_| rng.gen_range(0.0..1.0)).collect();
        let tree = KdTree::build(&coords, 3);
        let q = [0.5, 0.4, 0.6];
        let got = tree.within(&q, 0.2);
        let want: Vec<usize> = coords
            .chunks_exact(3)
            .enumerate()
            .filter(|(_, p)| sq_dist(p, &q) <= 0.04)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn duplicate_points_do_not_loop() {
        let coords = vec![0.25; 200];
        let tree = KdTree::build(&coords, 2);
        assert_eq!(tree.within(&[0.25, 0.25], 0.0).len(), 100);
        assert_eq!(tree.nearest(&[0.0, 0.0]).unwrap().0, 0);
    }
}

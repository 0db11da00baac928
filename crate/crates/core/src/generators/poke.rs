use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::generators::{check_h, intervals_for, refined_points, unit_grid, Refine};
use crate::pointset::EuclideanPointSet;

#[derive(Debug, Clone)]
pub struct PokeOptions {
    /// Factor `≥ 1` applied to the lower bound on `|log α_Q|`.
    pub alpha_margin: f64,
    /// `λ_0, λ_1, ...`; defaults to `λ_i = 4^{-i-1}`.
    pub lambda: Option<Vec<f64>>,
    pub refine: Vec<Refine>,
    /// Upper clamp on `α_Q` (the bound alone may exceed 1/2 at coarse generations).
    pub alpha_cap: f64,
    /// Height levels sampled on each bump.
    pub ring_levels: usize,
    /// Radial nodes of the energy quadrature.
    pub energy_nodes: usize,
}

impl Default for PokeOptions {
    fn default() -> Self {
        PokeOptions { alpha_margin: 1.0, lambda: None, refine: Vec::new(), alpha_cap: 0.25, ring_levels: 16, energy_nodes: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PokeBall {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Side of the cube `Q` (and height of the bump).
    pub ell: f64,
    pub alpha: f64,
    pub generation: usize,
    /// `∫|∇f|^n` over the annulus, divided by the area of the unit sphere.
    pub energy: f64,
}

impl PokeBall {
    pub fn profile(&self, rho: f64) -> f64 {
        if rho <= self.alpha * self.radius {
            self.ell
        } else if rho <= self.radius {
            self.ell * (rho / self.radius).ln() / self.alpha.ln()
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct PokeGraph {
    pub set: EuclideanPointSet,
    pub balls: Vec<PokeBall>,
    /// Energy summed per generation `k = 1..=depth` (index `k - 1`).
    pub level_energy: Vec<f64>,
    /// Lebesgue measure of `K_depth`.
    pub k_measure: f64,
}

struct Node {
    corner: Vec<f64>,
    side: f64,
    ball: Option<usize>,
    children: Vec<usize>,
}

fn corner_children(corner: &[f64], side: f64, child: f64) -> Vec<Vec<f64>> {
    let n = corner.len();
    (0..1usize << n)
        .map(|code| (0..n).map(|a| corner[a] + if code >> a & 1 == 1 { side - child } else { 0.0 }).collect())
        .collect()
}

fn norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn radial_energy(ball: &PokeBall, n: usize, nodes: usize) -> f64 {
    let inner = ball.alpha * ball.radius;
    let q = (ball.radius / inner).powf(1.0 / nodes as f64);
    let mut total = 0.0;
    let mut rho = inner;
    for _ in 0..nodes {
        let next = rho * q;
        let g = (ball.profile(rho) - ball.profile(next)).abs() / (next - rho);
        total += g.powi(n as i32) * (0.5 * (rho + next)).powi(n as i32 - 1) * (next - rho);
        rho = next;
    }
    total
}

/// Graph of the bump function over the corner-cube Cantor set `K` of `[0,1]^n`.
///
/// Cubes of `K_0, ..., K_depth` are built; every `Q ∈ K_j` with `j < depth`
/// (generation `j + 1`) carries a bump on `B_Q = B(x_Q, λ_{j+1}ℓ(Q)/2)`.
/// Samples: the `h` grid (trapezoid weights), optional refinement, rings
/// on each bump at `ring_levels` heights, and the inner corners of the
/// children of the deepest bumped cubes. Markers: `K` (points of `K_depth`)
/// and `K_corner` (those inner corners).
pub fn gen_poke_graph(n: usize, depth: usize, h: f64, opts: &PokeOptions) -> Result<PokeGraph> {
    if n < 2 || depth == 0 {
        return Err(GeoError::InvalidParameter("poke graph needs n >= 2 and depth >= 1".into()));
    }
    check_h(h)?;
    if !(opts.alpha_margin >= 1.0) {
        return Err(GeoError::InvalidParameter(format!("alpha_margin must be >= 1, got {}", opts.alpha_margin)));
    }
    let lambda: Vec<f64> = match &opts.lambda {
        Some(l) => l.clone(),
        None => (0..=depth).map(|i| 4f64.powi(-(i as i32) - 1)).collect(),
    };
    if lambda.len() <= depth || lambda.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
        return Err(GeoError::InvalidParameter(format!("need {} values of lambda in (0,1)", depth + 1)));
    }

    let root_child = (1.0 - lambda[0]) / 2.0;
    let mut nodes: Vec<Node> = corner_children(&vec![0.0; n], 1.0, root_child)
        .into_iter()
        .map(|corner| Node { corner, side: root_child, ball: None, children: vec![] })
        .collect();
    let roots: Vec<usize> = (0..nodes.len()).collect();
    let mut balls = Vec::new();
    let mut level_energy = vec![0.0; depth];
    let mut frontier = roots.clone();
    for j in 0..depth {
        let k = j + 1;
        let mut next = Vec::new();
        for &id in &frontier {
            let (corner, side) = (nodes[id].corner.clone(), nodes[id].side);
            let center: Vec<f64> = corner.iter().map(|c| c + side / 2.0).collect();
            let bound = (2f64.powi((n * k) as i32) * (k * k) as f64 * side.powi(n as i32)).powf(1.0 / (n as f64 - 1.0));
            let alpha = (-opts.alpha_margin * bound).exp().min(opts.alpha_cap);
            let mut ball = PokeBall { center, radius: lambda[j + 1] * side / 2.0, ell: side, alpha, generation: k, energy: 0.0 };
            ball.energy = radial_energy(&ball, n, opts.energy_nodes);
            level_energy[j] += ball.energy;
            nodes[id].ball = Some(balls.len());
            balls.push(ball);
            let child = (1.0 - lambda[j + 1]) / 2.0 * side;
            for c in corner_children(&corner, side, child) {
                let cid = nodes.len();
                nodes.push(Node { corner: c, side: child, ball: None, children: vec![] });
                nodes[id].children.push(cid);
                next.push(cid);
            }
        }
        frontier = next;
    }
    let k_measure = frontier.iter().map(|&i| nodes[i].side.powi(n as i32)).sum();

    let inside = |node: &Node, x: &[f64]| x.iter().zip(&node.corner).all(|(v, c)| *v >= *c && *v <= *c + node.side);
    // (f(x), x ∈ K_depth)
    let eval = |x: &[f64]| -> (f64, bool) {
        let mut level: &[usize] = &roots;
        loop {
            let Some(&id) = level.iter().find(|&&c| inside(&nodes[c], x)) else {
                return (0.0, false);
            };
            let node = &nodes[id];
            if let Some(b) = node.ball {
                let ball = &balls[b];
                let rho = norm(x, &ball.center);
                if rho <= ball.radius {
                    return (ball.profile(rho), false);
                }
            }
            if node.children.is_empty() {
                return (0.0, true);
            }
            level = &node.children;
        }
    };

    let m = intervals_for(h);
    let (grid, grid_w) = unit_grid(n, m);
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut in_k = Vec::new();
    let mut corner_flag = Vec::new();
    let mut push = |x: &[f64], f: f64, w: f64, k: bool, c: bool| {
        coords.extend_from_slice(x);
        coords.push(f);
        weights.push(w);
        in_k.push(k);
        corner_flag.push(c);
    };
    for (g, w) in grid.iter().zip(&grid_w) {
        let (f, k) = eval(g);
        push(g, f, *w, k, false);
    }
    for r in &opts.refine {
        if r.center.len() != n {
            return Err(GeoError::DimensionMismatch { expected: n, got: r.center.len() });
        }
        for g in refined_points(n, 1.0 / m as f64, r) {
            let (f, k) = eval(&g);
            push(&g, f, 0.0, k, false);
        }
    }
    for ball in &balls {
        for i in 0..=opts.ring_levels {
            let z = ball.ell * i as f64 / opts.ring_levels as f64;
            let rho = ball.radius * ball.alpha.powf(i as f64 / opts.ring_levels as f64);
            let dirs: Vec<Vec<f64>> = if n == 2 {
                let count = ((2.0 * PI * rho / h).ceil() as usize).max(8);
                (0..count)
                    .map(|t| {
                        let a = 2.0 * PI * t as f64 / count as f64;
                        vec![a.cos(), a.sin()]
                    })
                    .collect()
            } else {
                (0..2 * n).map(|t| (0..n).map(|a| if a == t / 2 { 1.0 - 2.0 * (t % 2) as f64 } else { 0.0 }).collect()).collect()
            };
            for d in dirs {
                let x: Vec<f64> = ball.center.iter().zip(&d).map(|(c, u)| c + rho * u).collect();
                push(&x, z, 0.0, false, false);
            }
        }
        push(&ball.center, ball.ell, 0.0, false, false);
    }
    for node in &nodes {
        if node.ball.is_none() || !nodes[node.children[0]].children.is_empty() {
            continue;
        }
        let center: Vec<f64> = node.corner.iter().map(|c| c + node.side / 2.0).collect();
        for &c in &node.children {
            let child = &nodes[c];
            let x: Vec<f64> = child
                .corner
                .iter()
                .zip(&center)
                .map(|(lo, mid)| if *lo < *mid { lo + child.side } else { *lo })
                .collect();
            push(&x, 0.0, 0.0, true, true);
        }
    }
    let mut set = EuclideanPointSet::new(n + 1, coords, 1.0 / m as f64, format!("poke graph n={n} depth={depth}"))?
        .with_weights(weights)?;
    set.set_marker("K", in_k)?;
    set.set_marker("K_corner", corner_flag)?;
    Ok(PokeGraph { set, balls, level_energy, k_measure })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_is_continuous_and_energy_is_bounded() {
        let g = gen_poke_graph(2, 3, 1.0 / 64.0, &PokeOptions { alpha_margin: 1.05, ..PokeOptions::default() }).unwrap();
        assert_eq!(g.balls.len(), 4 + 16 + 64);
        for b in &g.balls {
            assert!(b.alpha > 0.0 && b.alpha < 0.5);
            assert!((b.profile(b.radius) - 0.0).abs() < 1e-12);
            assert!((b.profile(b.alpha * b.radius * (1.0 + 1e-12)) - b.ell).abs() < 1e-9 * b.ell);
            assert_eq!(b.profile(b.radius * 1.0001), 0.0);
            // closed form ℓ^n / |log α|^{n-1}
            let exact = b.ell * b.ell / b.alpha.ln().abs();
            assert!((b.energy - exact).abs() <= 1e-3 * exact, "{} vs {exact}", b.energy);
        }
        for (j, e) in g.level_energy.iter().enumerate() {
            let k = (j + 1) as f64;
            assert!(*e <= 1.0 / (k * k), "level {k}: {e}");
        }
        let k = g.set.marker_indices("K");
        let mass: f64 = k.iter().map(|&i| g.set.mass(i)).sum();
        assert!(mass > 0.0 && g.k_measure > 0.4);
        assert!(k.iter().all(|&i| g.set.point(i)[2] == 0.0));
        assert_eq!(g.set.marker_indices("K_corner").len(), 64 * 4);
    }

    #[test]
    fn balls_are_disjoint_and_off_the_next_generation() {
        let g = gen_poke_graph(2, 3, 1.0 / 32.0, &PokeOptions::default()).unwrap();
        for (i, a) in g.balls.iter().enumerate() {
            for b in &g.balls[..i] {
                assert!(norm(&a.center, &b.center) > a.radius + b.radius);
            }
        }
    }
}

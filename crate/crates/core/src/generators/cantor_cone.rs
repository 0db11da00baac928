use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::generators::{check_h, intervals_for, unit_grid};
use crate::pointset::EuclideanPointSet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tent {
    pub apex: Vec<f64>,
    pub radius: f64,
    pub generation: usize,
}

#[derive(Debug, Clone)]
pub struct CantorConeGraph {
    pub set: EuclideanPointSet,
    pub tents: Vec<Tent>,
    /// Lebesgue measure of the deepest cube generation.
    pub cantor_measure: f64,
}

#[derive(Debug, Clone)]
struct Cube {
    corner: Vec<f64>,
    side: f64,
}

impl Cube {
    fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.corner).all(|(v, c)| *v >= *c && *v <= *c + self.side)
    }

    /// The `2^n` children of generation `k`: inset by `4^{-k}ℓ/4`, separated by `4^{-k}ℓ/2`.
    fn children(&self, k: usize) -> Vec<Cube> {
        let n = self.corner.len();
        let q = 4f64.powi(-(k as i32)) * self.side;
        let side = self.side * (1.0 - 4f64.powi(-(k as i32))) / 2.0;
        let (margin, gap) = (q / 4.0, q / 2.0);
        (0..1usize << n)
            .map(|code| Cube {
                corner: (0..n)
                    .map(|a| self.corner[a] + margin + if code >> a & 1 == 1 { side + gap } else { 0.0 })
                    .collect(),
                side,
            })
            .collect()
    }
}

struct Node {
    cube: Cube,
    tent: Option<usize>,
    children: Vec<usize>,
}

fn tent_height(t: &Tent, x: &[f64]) -> f64 {
    let d = x.iter().zip(&t.apex).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    (t.radius - d).max(0.0)
}

/// Graph of `f = Σ_w max(0, r_w - |x - p_w|)` over nested cubes `C_w` of generations `1..=depth`.
///
/// `p_w` is the centre of `C_w` and `r_w` a quarter of the gap between its
/// children, so `B(p_w, 2r_w)` avoids them. Samples: a grid of spacing `≤ h`
/// (trapezoid weights) plus a weightless local grid of spacing `r_w/8` over
/// each tent. Markers: `E` (grid samples in generation `depth + 1`) and `spike`
/// (the apexes `(p_w, r_w)`).
pub fn gen_cantor_cone_graph(n: usize, depth: usize, h: f64) -> Result<CantorConeGraph> {
    if n == 0 || depth == 0 {
        return Err(GeoError::InvalidParameter("n and depth must be at least 1".into()));
    }
    check_h(h)?;
    let mut nodes = vec![Node { cube: Cube { corner: vec![0.0; n], side: 1.0 }, tent: None, children: vec![] }];
    let mut tents = Vec::new();
    let mut frontier = vec![0usize];
    for k in 1..=depth + 1 {
        let mut next = Vec::new();
        for &p in &frontier {
            for c in nodes[p].cube.children(k) {
                let id = nodes.len();
                nodes.push(Node { cube: c, tent: None, children: vec![] });
                nodes[p].children.push(id);
                next.push(id);
            }
        }
        if k <= depth {
            for &id in &next {
                let cube = &nodes[id].cube;
                let gap = 4f64.powi(-(k as i32 + 1)) * cube.side / 2.0;
                let apex = cube.corner.iter().map(|c| c + cube.side / 2.0).collect();
                nodes[id].tent = Some(tents.len());
                tents.push(Tent { apex, radius: gap / 4.0, generation: k });
            }
        }
        frontier = next;
    }
    let cantor_measure = frontier.iter().map(|&i| nodes[i].cube.side.powi(n as i32)).sum();

    // f and E-membership by descending the cube tree
    let locate = |x: &[f64]| -> (f64, bool) {
        let mut cur = 0usize;
        let mut f = 0.0;
        loop {
            if let Some(t) = nodes[cur].tent {
                f += tent_height(&tents[t], x);
            }
            match nodes[cur].children.iter().find(|&&c| nodes[c].cube.contains(x)) {
                Some(&c) => cur = c,
                None => return (f, nodes[cur].children.is_empty()),
            }
        }
    };

    let m = intervals_for(h);
    let (grid, grid_w) = unit_grid(n, m);
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut in_e = Vec::new();
    let mut spike = Vec::new();
    let mut push = |x: &[f64], w: f64, e: bool, s: bool, coords: &mut Vec<f64>| {
        let (f, _) = locate(x);
        coords.extend_from_slice(x);
        coords.push(f);
        weights.push(w);
        in_e.push(e);
        spike.push(s);
    };
    for (g, w) in grid.iter().zip(&grid_w) {
        let e = locate(g).1;
        push(g, *w, e, false, &mut coords);
    }
    for t in &tents {
        let step = t.radius / 8.0;
        let per = 17usize;
        for code in 0..per.pow(n as u32) {
            let mut c = code;
            let x: Vec<f64> = (0..n)
                .map(|a| {
                    let i = c % per;
                    c /= per;
                    t.apex[a] + (i as f64 - 8.0) * step
                })
                .collect();
            push(&x, 0.0, false, false, &mut coords);
        }
        push(&t.apex, 0.0, false, true, &mut coords);
    }
    let mut set = EuclideanPointSet::new(n + 1, coords, 1.0 / m as f64, format!("cantor cone graph n={n} depth={depth}"))?
        .with_weights(weights)?;
    set.set_marker("E", in_e)?;
    set.set_marker("spike", spike)?;
    Ok(CantorConeGraph { set, tents, cantor_measure })
}

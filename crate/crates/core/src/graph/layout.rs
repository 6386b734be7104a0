//! Kamada-Kawai stress layout.
//!
//! Minimizes `Σ_{i<j} (‖p_i − p_j‖ − d_ij)² / d_ij²` where `d_ij` is the
//! unweighted hop distance. Each sweep visits every node once and moves it
//! by a safeguarded Newton step on its own energy terms, so the total stress
//! never increases.

use std::collections::VecDeque;
use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ActantGraph;
use crate::error::{Error, Result};

pub type Point = (f64, f64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutParams {
    /// Sweep cap; `None` means `100 · |V|`.
    pub max_sweeps: Option<usize>,
    /// Stop once the largest per-node gradient norm drops below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            max_sweeps: None,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutTrace {
    pub sweeps: usize,
    /// Stress of the initial placement followed by the stress after each sweep.
    pub stress_history: Vec<f64>,
    pub converged: bool,
    pub max_gradient: f64,
}

/// All-pairs hop distances by BFS; `u32::MAX` marks unreachable pairs.
pub fn hop_distances(g: &ActantGraph) -> Vec<Vec<u32>> {
    let adj = g.adjacency();
    let n = g.node_count();
    let mut out = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for s in 0..n {
        let mut dist = vec![u32::MAX; n];
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        out.push(dist);
    }
    out
}

/// Kamada-Kawai stress of a placement. Unreachable pairs are ignored.
pub fn stress(dist: &[Vec<u32>], coords: &[Point]) -> f64 {
    let mut s = 0.0;
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            let d = dist[i][j];
            if d == 0 || d == u32::MAX {
                continue;
            }
            let d = d as f64;
            let r = (coords[i].0 - coords[j].0).hypot(coords[i].1 - coords[j].1);
            s += (r - d).powi(2) / (d * d);
        }
    }
    s
}

struct Solver<'a> {
    dist: &'a [Vec<u32>],
    pos: Vec<Point>,
}

impl Solver<'_> {
    /// Energy terms involving node `m` placed at `p`.
    fn local_energy(&self, m: usize, p: Point) -> f64 {
        let mut e = 0.0;
        for (i, q) in self.pos.iter().enumerate() {
            if i == m {
                continue;
            }
            let d = self.dist[m][i] as f64;
            let r = (p.0 - q.0).hypot(p.1 - q.1);
            e += (r - d).powi(2) / (d * d);
        }
        e
    }

    /// Gradient and Hessian of the local energy of node `m`.
    fn derivatives(&self, m: usize) -> ([f64; 2], [f64; 3]) {
        let p = self.pos[m];
        let mut g = [0.0; 2];
        let mut h = [0.0; 3];
        for (i, q) in self.pos.iter().enumerate() {
            if i == m {
                continue;
            }
            let d = self.dist[m][i] as f64;
            let k = 2.0 / (d * d);
            let (dx, dy) = (p.0 - q.0, p.1 - q.1);
            let r = dx.hypot(dy).max(1e-12);
            g[0] += k * (dx - d * dx / r);
            g[1] += k * (dy - d * dy / r);
            let r3 = r * r * r;
            h[0] += k * (1.0 - d * dy * dy / r3);
            h[1] += k * (d * dx * dy / r3);
            h[2] += k * (1.0 - d * dx * dx / r3);
        }
        (g, h)
    }

    fn max_gradient(&self) -> f64 {
        (0..self.pos.len())
            .map(|m| {
                let (g, _) = self.derivatives(m);
                g[0].hypot(g[1])
            })
            .fold(0.0, f64::max)
    }

    /// One Newton step on node `m`, falling back to steepest descent when the
    /// Hessian is not positive definite, with backtracking until the local
    /// energy decreases. The node stays put if no decrease is found.
    fn relax(&mut self, m: usize) {
        let (g, h) = self.derivatives(m);
        if g[0] == 0.0 && g[1] == 0.0 {
            return;
        }
        let det = h[0] * h[2] - h[1] * h[1];
        let mut dir = if h[0] > 0.0 && det > 0.0 {
            [-(h[2] * g[0] - h[1] * g[1]) / det, -(h[0] * g[1] - h[1] * g[0]) / det]
        } else {
            [-g[0], -g[1]]
        };
        if dir[0] * g[0] + dir[1] * g[1] >= 0.0 {
            dir = [-g[0], -g[1]];
        }
        let p = self.pos[m];
        let e0 = self.local_energy(m, p);
        let mut t = 1.0;
        while t > 1e-12 {
            let cand = (p.0 + t * dir[0], p.1 + t * dir[1]);
            if self.local_energy(m, cand) < e0 {
                self.pos[m] = cand;
                return;
            }
            t *= 0.5;
        }
    }
}

/// Deterministic circular start: nodes in a seeded order on a circle whose
/// diameter is the graph diameter, rotated by a seeded angle.
fn initial_placement(n: usize, diameter: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let offset = rng.gen::<f64>() * TAU;
    let radius = (diameter / 2.0).max(0.5);
    let mut pos = vec![(0.0, 0.0); n];
    for (slot, &node) in order.iter().enumerate() {
        let a = offset + TAU * slot as f64 / n as f64;
        pos[node] = (radius * a.cos(), radius * a.sin());
    }
    pos
}

pub fn layout_with_trace(g: &ActantGraph, params: &LayoutParams) -> Result<(Vec<Point>, LayoutTrace)> {
    let n = g.node_count();
    if n == 0 {
        return Ok((Vec::new(), LayoutTrace { sweeps: 0, stress_history: vec![0.0], converged: true, max_gradient: 0.0 }));
    }
    if !g.is_connected() {
        return Err(Error::domain("layout needs a connected graph; lay out each component separately"));
    }
    if n == 1 {
        return Ok((vec![(0.0, 0.0)], LayoutTrace { sweeps: 0, stress_history: vec![0.0], converged: true, max_gradient: 0.0 }));
    }
    let dist = hop_distances(g);
    let diameter = dist.iter().flatten().copied().max().unwrap_or(0) as f64;
    let mut solver = Solver {
        dist: &dist,
        pos: initial_placement(n, diameter, params.seed),
    };
    let cap = params.max_sweeps.unwrap_or(100 * n);
    let mut history = vec![stress(&dist, &solver.pos)];
    let mut grad = solver.max_gradient();
    let mut sweeps = 0;
    while grad >= params.tolerance && sweeps < cap {
        for m in 0..n {
            solver.relax(m);
        }
        sweeps += 1;
        history.push(stress(&dist, &solver.pos));
        grad = solver.max_gradient();
    }
    let trace = LayoutTrace {
        sweeps,
        stress_history: history,
        converged: grad < params.tolerance,
        max_gradient: grad,
    };
    Ok((solver.pos, trace))
}

/// Lays out a connected graph.
pub fn layout(g: &ActantGraph, params: &LayoutParams) -> Result<Vec<Point>> {
    layout_with_trace(g, params).map(|(p, _)| p)
}

/// Lays out every component on its own and tiles them left to right in
/// component order (largest first), separated by the component's diameter.
pub fn layout_components(g: &ActantGraph, params: &LayoutParams) -> Vec<Point> {
    let mut out = vec![(0.0, 0.0); g.node_count()];
    let mut cursor = 0.0;
    for comp in g.components() {
        let sub = g.induced(&comp);
        let pos = layout(&sub, params).expect("components are connected");
        let diameter = hop_distances(&sub).iter().flatten().copied().max().unwrap_or(0) as f64;
        let min_x = pos.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let max_x = pos.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let min_y = pos.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let max_y = pos.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let mid_y = (min_y + max_y) / 2.0;
        for (&node, p) in comp.iter().zip(&pos) {
            out[node] = (p.0 - min_x + cursor, p.1 - mid_y);
        }
        cursor += (max_x - min_x) + diameter.max(1.0);
    }
    out
}

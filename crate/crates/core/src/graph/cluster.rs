//! Louvain-style weighted modularity optimization.
//!
//! Modularity at resolution `γ` is
//! `Q = Σ_c [ L_c / m − γ (K_c / 2m)² ]`
//! with `L_c` the edge weight inside cluster `c`, `K_c` the summed weighted
//! degree of its members and `m` the total edge weight.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ActantGraph;

const MIN_GAIN: f64 = 1e-12;

/// Working graph of one Louvain level.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    /// Internal weight collapsed into each node, counted once.
    loops: Vec<f64>,
    degree: Vec<f64>,
    two_m: f64,
}

impl Level {
    fn from_graph(g: &ActantGraph) -> Level {
        let adj: Vec<Vec<(usize, f64)>> = g
            .adjacency()
            .into_iter()
            .map(|l| l.into_iter().map(|(j, w)| (j, w as f64)).collect())
            .collect();
        let loops = vec![0.0; adj.len()];
        Level::with(adj, loops)
    }

    fn with(adj: Vec<Vec<(usize, f64)>>, loops: Vec<f64>) -> Level {
        let degree: Vec<f64> = adj
            .iter()
            .zip(&loops)
            .map(|(l, &s)| l.iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * s)
            .collect();
        let two_m = degree.iter().sum();
        Level {
            adj,
            loops,
            degree,
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Local moving phase. Returns the community of each node and whether
    /// anything moved.
    fn local_moves(&self, resolution: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &i in &order {
                let own = comm[i];
                let k = self.degree[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[own] -= k;
                let scale = resolution * k / self.two_m;
                let mut best = own;
                let mut best_gain = link[own] - tot[own] * scale;
                touched.sort_unstable();
                for &c in &touched {
                    let gain = link[c] - tot[c] * scale;
                    if gain > best_gain + MIN_GAIN {
                        best = c;
                        best_gain = gain;
                    }
                }
                tot[best] += k;
                comm[i] = best;
                if best != own {
                    moved = true;
                    moved_any = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                link[own] = 0.0;
                touched.clear();
            }
            if !moved {
                break;
            }
        }
        (comm, moved_any)
    }

    /// Collapses communities into nodes. `comm` must be renumbered 0..k.
    fn aggregate(&self, comm: &[usize], k: usize) -> Level {
        let mut loops = vec![0.0; k];
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for i in 0..self.len() {
            let ci = comm[i];
            loops[ci] += self.loops[i];
            for &(j, w) in &self.adj[i] {
                let cj = comm[j];
                if ci == cj {
                    // each internal edge is seen from both ends
                    if i < j {
                        loops[ci] += w;
                    }
                } else {
                    *weights[ci].entry(cj).or_default() += w;
                }
            }
        }
        let adj = weights.into_iter().map(|m| m.into_iter().collect()).collect();
        Level::with(adj, loops)
    }
}

fn renumber(comm: &mut [usize]) -> usize {
    let mut map = vec![usize::MAX; comm.len()];
    let mut next = 0;
    for c in comm.iter_mut() {
        if map[*c] == usize::MAX {
            map[*c] = next;
            next += 1;
        }
        *c = map[*c];
    }
    next
}

/// Modularity of a partition (any labels; equal labels share a cluster).
pub fn modularity(g: &ActantGraph, partition: &[u32], resolution: f64) -> f64 {
    let m: f64 = g.edges().iter().map(|e| e.weight as f64).sum();
    if m == 0.0 {
        return 0.0;
    }
    let mut internal = std::collections::BTreeMap::<u32, f64>::new();
    let mut degree = std::collections::BTreeMap::<u32, f64>::new();
    for e in g.edges() {
        let w = e.weight as f64;
        *degree.entry(partition[e.a]).or_default() += w;
        *degree.entry(partition[e.b]).or_default() += w;
        if partition[e.a] == partition[e.b] {
            *internal.entry(partition[e.a]).or_default() += w;
        }
    }
    degree
        .iter()
        .map(|(c, &k)| internal.get(c).copied().unwrap_or(0.0) / m - resolution * (k / (2.0 * m)).powi(2))
        .sum()
}

/// Clusters the graph; returns 1-based ids, numbered by descending cluster
/// size and then by smallest member key. Deterministic for a fixed seed.
pub fn cluster(g: &ActantGraph, resolution: f64, seed: u64) -> Vec<u32> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let mut level = Level::from_graph(g);
    let mut membership: Vec<usize> = (0..n).collect();
    if level.two_m > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let (mut comm, moved) = level.local_moves(resolution, &mut rng);
            if !moved {
                break;
            }
            let k = renumber(&mut comm);
            for m in membership.iter_mut() {
                *m = comm[*m];
            }
            level = level.aggregate(&comm, k);
        }
    }

    let mut labels: Vec<u32> = membership.iter().map(|&c| c as u32).collect();
    // never return worse than the single-cluster starting point
    let single = vec![0u32; n];
    if g.edge_count() > 0 && modularity(g, &single, resolution) > modularity(g, &labels, resolution) + MIN_GAIN {
        labels = single;
    }
    canonical_ids(g, &labels)
}

fn canonical_ids(g: &ActantGraph, labels: &[u32]) -> Vec<u32> {
    let mut groups: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
    let min_key = |m: &Vec<usize>| m.iter().map(|&i| g.nodes()[i].key.clone()).min();
    groups.sort_by_cached_key(|m| (std::cmp::Reverse(m.len()), min_key(m)));
    let mut out = vec![0; labels.len()];
    for (id, members) in groups.iter().enumerate() {
        for &i in members {
            out[i] = id as u32 + 1;
        }
    }
    out
}

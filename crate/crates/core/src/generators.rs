//! Small graph families used by the examples, the CLI and the test ensembles.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::graph::Graph;

/// `K_N` with boundary `{0, …, ℓ-1}`.
pub fn complete(n: usize, boundary_count: usize) -> Result<Graph> {
    let mut edges = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    let boundary: Vec<_> = (0..boundary_count).collect();
    Graph::new(n, &edges, &boundary)
}

/// Path `0 - 1 - … - (n-1)`.
pub fn path(n: usize, boundary: &[usize]) -> Result<Graph> {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::new(n, &edges, boundary)
}

/// Cycle on `n ≥ 3` vertices.
pub fn cycle(n: usize, boundary: &[usize]) -> Result<Graph> {
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph::new(n, &edges, boundary)
}

/// Random connected simple graph: a uniformly shuffled spanning tree plus
/// each remaining pair with probability `extra_edge_prob`. The boundary is a
/// random subset of size `boundary_count`, in random order.
pub fn random_connected<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    extra_edge_prob: f64,
    boundary_count: usize,
) -> Result<Graph> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for k in 1..n {
        let u = order[k];
        let v = order[rng.gen_range(0..k)];
        present[u][v] = true;
        present[v][u] = true;
        edges.push((u.min(v), u.max(v)));
    }
    for (u, v) in (0..n).tuple_combinations() {
        if !present[u][v] && rng.gen_bool(extra_edge_prob) {
            edges.push((u, v));
        }
    }
    edges.sort_unstable();
    let mut boundary: Vec<usize> = (0..n).collect();
    boundary.shuffle(rng);
    boundary.truncate(boundary_count.clamp(1, n));
    Graph::new(n, &edges, &boundary)
}

/// Random graph ensemble with `3 ≤ N ≤ max_n` and a random boundary size.
pub fn random_ensemble<R: Rng + ?Sized>(rng: &mut R, count: usize, max_n: usize) -> Vec<Graph> {
    (0..count)
        .map(|_| {
            let n = rng.gen_range(3..=max_n);
            let p = rng.gen_range(0.15..0.7);
            let r = rng.gen_range(1..=n);
            random_connected(rng, n, p, r).expect("generator produces valid graphs")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn families_have_expected_sizes() {
        assert_eq!(complete(5, 3).unwrap().edge_count(), 10);
        assert_eq!(path(4, &[0, 3]).unwrap().edge_count(), 3);
        assert_eq!(cycle(6, &[0]).unwrap().edge_count(), 6);
    }

    #[test]
    fn random_graphs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in random_ensemble(&mut rng, 50, 9) {
            assert!(g.vertex_count() >= 3 && g.vertex_count() <= 9);
            assert!(g.boundary_count() >= 1);
        }
    }
}

//! Internal graph `G₀` with its boundary set and derived vertex matrices.
//!
//! Arcs are stored in pairs: edge `k = (u, v)` from the input list becomes arc
//! `2k = u→v` and arc `2k+1 = v→u`, so the inverse of arc `a` is `a ^ 1`.
//! Tails are never materialized; a boundary vertex simply has tailed degree
//! `d(u) + 1`.

use std::collections::{HashSet, VecDeque};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{CVector, Complex64};

/// On-disk description of a graph: `{"vertices": N, "edges": [[u,v],...], "boundary": [u,...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub boundary: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub origin: usize,
    pub terminus: usize,
}

/// A connected simple symmetric digraph with an ordered boundary.
#[derive(Debug, Clone)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    arcs: Vec<Arc>,
    boundary: Vec<usize>,
    boundary_index: Vec<Option<usize>>,
    degree: Vec<usize>,
    // arcs with t(a) = u, per vertex
    incoming: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: &[(usize, usize)], boundary: &[usize]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::NoVertices);
        }
        let check = |v: usize| {
            if v >= vertex_count {
                Err(Error::VertexOutOfRange {
                    vertex: v,
                    count: vertex_count,
                })
            } else {
                Ok(())
            }
        };

        let mut seen = HashSet::new();
        let mut arcs = Vec::with_capacity(2 * edges.len());
        let mut degree = vec![0; vertex_count];
        let mut incoming = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            check(u)?;
            check(v)?;
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge(u, v));
            }
            incoming[v].push(arcs.len());
            arcs.push(Arc { origin: u, terminus: v });
            incoming[u].push(arcs.len());
            arcs.push(Arc { origin: v, terminus: u });
            degree[u] += 1;
            degree[v] += 1;
        }

        if boundary.is_empty() {
            return Err(Error::EmptyBoundary);
        }
        let mut boundary_index = vec![None; vertex_count];
        for (k, &u) in boundary.iter().enumerate() {
            check(u)?;
            if boundary_index[u].is_some() {
                return Err(Error::RepeatedBoundary(u));
            }
            boundary_index[u] = Some(k);
        }

        let graph = Self {
            vertex_count,
            edges: edges.to_vec(),
            arcs,
            boundary: boundary.to_vec(),
            boundary_index,
            degree,
            incoming,
        };
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    pub fn from_spec(spec: &GraphSpec) -> Result<Self> {
        let edges: Vec<_> = spec.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(spec.vertices, &edges, &spec.boundary)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertex_count,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            boundary: self.boundary.clone(),
        }
    }

    fn is_connected(&self) -> bool {
        let mut visited = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0]);
        visited[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &a in &self.incoming[u] {
                let w = self.arcs[a].origin;
                if !visited[w] {
                    visited[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.vertex_count
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: usize) -> Arc {
        self.arcs[a]
    }

    #[inline]
    pub fn inverse(&self, a: usize) -> usize {
        a ^ 1
    }

    /// Arcs whose terminus is `u`.
    pub fn incoming(&self, u: usize) -> &[usize] {
        &self.incoming[u]
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }

    /// Position of `u` in the boundary list, if it is a boundary vertex.
    pub fn boundary_index(&self, u: usize) -> Option<usize> {
        self.boundary_index[u]
    }

    pub fn is_boundary(&self, u: usize) -> bool {
        self.boundary_index[u].is_some()
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.vertex_count).filter(|&u| !self.is_boundary(u)).collect()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.degree[u]
    }

    /// Degree in the tailed graph: one extra arc for each boundary vertex.
    pub fn tailed_degree(&self, u: usize) -> usize {
        self.degree[u] + usize::from(self.is_boundary(u))
    }

    pub fn has_boundary_leaf(&self) -> bool {
        self.boundary.iter().any(|&u| self.degree[u] == 1)
    }

    pub fn matrices(&self) -> VertexMatrices {
        VertexMatrices::new(self)
    }

    /// Two-colouring by breadth-first search; `None` when an odd cycle exists.
    pub fn bipartition(&self) -> Option<Bipartition> {
        let mut colour: Vec<Option<bool>> = vec![None; self.vertex_count];
        colour[0] = Some(true);
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            let cu = colour[u].unwrap();
            for &a in &self.incoming[u] {
                let w = self.arcs[a].origin;
                match colour[w] {
                    None => {
                        colour[w] = Some(!cu);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cu => return None,
                    Some(_) => {}
                }
            }
        }
        Some(Bipartition {
            in_x: colour.into_iter().map(Option::unwrap).collect(),
        })
    }

    /// Lift a boundary vector to a vertex vector (zero off the boundary).
    pub fn embed_boundary(&self, values: &[Complex64]) -> CVector {
        let mut out = CVector::zeros(self.vertex_count);
        for (k, &u) in self.boundary.iter().enumerate() {
            out[u] = values[k];
        }
        out
    }

    /// Restrict a vertex vector to the boundary, in boundary order.
    pub fn restrict_boundary(&self, values: &CVector) -> CVector {
        CVector::from_iterator(self.boundary.len(), self.boundary.iter().map(|&u| values[u]))
    }
}

/// `M₀`, `D₀`, `Π_δV₀`, `P₀ = D₀⁻¹M₀` and `D̃ = D₀ + Π_δV₀` as dense real matrices.
#[derive(Debug, Clone)]
pub struct VertexMatrices {
    pub adjacency: DMatrix<f64>,
    pub degree: DMatrix<f64>,
    pub boundary_projection: DMatrix<f64>,
    pub transition: DMatrix<f64>,
    pub tailed_degree: DMatrix<f64>,
}

impl VertexMatrices {
    fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut adjacency = DMatrix::zeros(n, n);
        for &(u, v) in g.edges() {
            adjacency[(u, v)] = 1.0;
            adjacency[(v, u)] = 1.0;
        }
        let degree = DMatrix::from_diagonal(&DVector::from_fn(n, |u, _| g.degree(u) as f64));
        let boundary_projection =
            DMatrix::from_diagonal(&DVector::from_fn(n, |u, _| if g.is_boundary(u) { 1.0 } else { 0.0 }));
        let mut transition = adjacency.clone();
        for u in 0..n {
            let d = g.degree(u) as f64;
            transition.row_mut(u).iter_mut().for_each(|x| *x /= d);
        }
        let tailed_degree = &degree + &boundary_projection;
        Self {
            adjacency,
            degree,
            boundary_projection,
            transition,
            tailed_degree,
        }
    }
}

/// Partite sets `X ⊔ Y` of a bipartite graph. The flat operator flips the sign
/// of vertex values on `Y`, and of arc values whose terminus is in `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    in_x: Vec<bool>,
}

impl Bipartition {
    pub fn sign(&self, u: usize) -> f64 {
        if self.in_x[u] {
            1.0
        } else {
            -1.0
        }
    }

    pub fn in_x(&self, u: usize) -> bool {
        self.in_x[u]
    }

    /// `(|X|, |Y|)`.
    pub fn sizes(&self) -> (usize, usize) {
        let x = self.in_x.iter().filter(|&&b| b).count();
        (x, self.in_x.len() - x)
    }

    pub fn flat_vertex(&self, f: &CVector) -> CVector {
        CVector::from_fn(f.len(), |u, _| f[u] * self.sign(u))
    }

    pub fn flat_arc(&self, g: &Graph, psi: &CVector) -> CVector {
        CVector::from_fn(psi.len(), |a, _| psi[a] * self.sign(g.arc(a).terminus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn complete_four_two_boundaries() {
        let g = generators::complete(4, 2).unwrap();
        assert_eq!(g.arc_count(), 12);
        assert!((0..4).all(|u| g.degree(u) == 3));
        let tailed: Vec<_> = (0..4).map(|u| g.tailed_degree(u)).collect();
        assert_eq!(tailed, vec![4, 4, 3, 3]);
    }

    #[test]
    fn single_edge_arcs_are_mutual_inverses() {
        let g = Graph::new(2, &[(0, 1)], &[0, 1]).unwrap();
        assert_eq!(g.arc_count(), 2);
        assert_eq!(g.inverse(0), 1);
        assert_eq!(g.inverse(1), 0);
        assert_eq!(g.arc(0).origin, g.arc(1).terminus);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            Graph::new(3, &[(0, 1), (0, 1), (1, 2)], &[0]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::new(3, &[(0, 1), (1, 0), (1, 2)], &[0]),
            Err(Error::DuplicateEdge(1, 0))
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 0), (0, 1)], &[0]),
            Err(Error::SelfLoop(0))
        ));
        assert!(matches!(
            Graph::new(4, &[(0, 1), (2, 3)], &[0]),
            Err(Error::Disconnected)
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 1)], &[2]),
            Err(Error::VertexOutOfRange { vertex: 2, .. })
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 1)], &[1, 1]),
            Err(Error::RepeatedBoundary(1))
        ));
        assert!(matches!(Graph::new(2, &[(0, 1)], &[]), Err(Error::EmptyBoundary)));
    }

    #[test]
    fn boundary_order_is_preserved() {
        let g = Graph::new(3, &[(0, 1), (1, 2)], &[2, 0]).unwrap();
        assert_eq!(g.boundary(), &[2, 0]);
        assert_eq!(g.boundary_index(2), Some(0));
        assert_eq!(g.boundary_index(1), None);
    }

    #[test]
    fn complete_graph_matrices() {
        let g = generators::complete(4, 2).unwrap();
        let m = g.matrices();
        let j = DMatrix::from_element(4, 4, 1.0);
        assert_eq!(m.adjacency, &j - DMatrix::identity(4, 4));
        assert_eq!(m.degree, DMatrix::identity(4, 4) * 3.0);
        assert_eq!(&m.tailed_degree - &m.degree, m.boundary_projection);
    }

    #[test]
    fn complete_graph_transition_spectrum() {
        for n in 3..8 {
            let g = generators::complete(n, 1).unwrap();
            let eig = g.matrices().transition.symmetric_eigen();
            let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let low = -1.0 / (n as f64 - 1.0);
            assert!(values[..n - 1].iter().all(|&v| (v - low).abs() < 1e-12));
            assert!((values[n - 1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_edge_tailed_degree() {
        let g = Graph::new(2, &[(0, 1)], &[0, 1]).unwrap();
        assert_eq!(g.matrices().tailed_degree, DMatrix::identity(2, 2) * 2.0);
    }

    #[test]
    fn bipartition_of_cycle_and_complete() {
        let c4 = generators::cycle(4, &[0]).unwrap();
        assert_eq!(c4.bipartition().unwrap().sizes(), (2, 2));
        assert!(generators::complete(4, 2).unwrap().bipartition().is_none());
    }

    #[test]
    fn flat_is_an_involution_and_commutes_with_incoming_sums() {
        let g = generators::cycle(4, &[0, 2]).unwrap();
        let part = g.bipartition().unwrap();
        let psi = CVector::from_fn(g.arc_count(), |a, _| Complex64::new(a as f64 + 0.5, 1.0 - a as f64));
        let flat = part.flat_arc(&g, &psi);
        assert_eq!(part.flat_arc(&g, &flat), psi);

        let sums = |s: &CVector| CVector::from_fn(4, |u, _| g.incoming(u).iter().map(|&a| s[a]).sum());
        assert_eq!(part.flat_vertex(&sums(&psi)), sums(&flat));
    }

    #[test]
    fn json_round_trip() {
        let g = Graph::from_json(r#"{"vertices": 3, "edges": [[0,1],[1,2]], "boundary": [0, 2]}"#).unwrap();
        assert_eq!(g.arc_count(), 4);
        let again = Graph::from_spec(&g.to_spec()).unwrap();
        assert_eq!(again.to_spec(), g.to_spec());
    }
}

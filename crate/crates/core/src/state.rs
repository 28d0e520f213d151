//! Value types shared by the solvers: inflow amplitudes, arc states and
//! vertex potentials.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::{CVector, Complex64};

/// Inflow amplitudes `α_δ`, one per boundary vertex in boundary order.
#[derive(Debug, Clone, PartialEq)]
pub struct Inflow {
    amplitudes: Vec<Complex64>,
}

impl Inflow {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// Unit inflow on the `k`-th boundary vertex.
    pub fn basis(boundary_count: usize, k: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); boundary_count];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn check(&self, g: &Graph) -> Result<()> {
        if self.amplitudes.len() != g.boundary_count() {
            return Err(Error::InflowLength {
                expected: g.boundary_count(),
                got: self.amplitudes.len(),
            });
        }
        Ok(())
    }

    /// `α_in ∈ ℂ^{V₀}`: amplitudes placed on their boundary vertices.
    pub fn on_vertices(&self, g: &Graph) -> CVector {
        g.embed_boundary(&self.amplitudes)
    }

    pub fn average(&self) -> Complex64 {
        self.amplitudes.iter().sum::<Complex64>() / self.amplitudes.len() as f64
    }

    pub fn boundary_vector(&self) -> CVector {
        CVector::from_column_slice(&self.amplitudes)
    }
}

/// A function on the internal arcs, in the graph's arc order.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcState {
    pub values: CVector,
    pub z: Complex64,
}

impl ArcState {
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `½ Σ_a |φ(a)|²`.
    pub fn comfortability(&self) -> f64 {
        0.5 * self.norm_sq()
    }

    pub fn max_abs_diff(&self, other: &ArcState) -> f64 {
        max_abs_diff(&self.values, &other.values)
    }

    /// Potential recovered from the state: the average of `φ̃` over all arcs
    /// into `u` in the tailed graph, including the tail arc on the boundary.
    pub fn incoming_average(&self, g: &Graph, inflow: &Inflow) -> CVector {
        CVector::from_fn(g.vertex_count(), |u, _| {
            let mut s: Complex64 = g.incoming(u).iter().map(|&a| self.values[a]).sum();
            if let Some(k) = g.boundary_index(u) {
                s += inflow.amplitudes()[k];
            }
            s / g.tailed_degree(u) as f64
        })
    }
}

/// A function on the vertices, in vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexPotential {
    pub values: CVector,
    pub z: Complex64,
}

impl VertexPotential {
    /// `⟨μ, ν⟩_π = Σ_u conj(μ(u)) ν(u) d(u)`.
    pub fn degree_pairing(&self, g: &Graph, mu: &CVector) -> Complex64 {
        degree_pairing(g, mu, &self.values)
    }
}

pub fn degree_pairing(g: &Graph, f: &CVector, h: &CVector) -> Complex64 {
    (0..g.vertex_count())
        .map(|u| f[u].conj() * h[u] * g.degree(u) as f64)
        .sum()
}

/// Twisted coboundary `(∂_z^* f)(a) = z f(t(a)) - f(o(a))`.
pub fn twisted_gradient(g: &Graph, z: Complex64, f: &CVector) -> CVector {
    CVector::from_iterator(
        g.arc_count(),
        g.arcs().iter().map(|arc| z * f[arc.terminus] - f[arc.origin]),
    )
}

pub fn max_abs_diff(a: &CVector, b: &CVector) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CVector) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

//! The generalized Laplacian `L_z = M₀ − j₊(z) D₀ + j₋(z) Π_δV₀` and the set
//! of unit-circle frequencies where the stationary problem is singular.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::walk;
use crate::{unit, CMatrix, CVector, Complex64};

/// Relative threshold on the smallest singular value below which `L_z` is
/// treated as singular.
pub const SINGULAR_RTOL: f64 = 1e-9;
/// Distance `|z − z*|` within which `z` is identified with a singular frequency.
pub const DISPATCH_RADIUS: f64 = 1e-8;

pub fn j_plus(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroFrequency);
    }
    Ok((z + z.inv()) / 2.0)
}

pub fn j_minus(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroFrequency);
    }
    Ok((z - z.inv()) / 2.0)
}

#[derive(Debug, Clone)]
pub struct GeneralizedLaplacian {
    pub z: Complex64,
    pub j_plus: Complex64,
    pub j_minus: Complex64,
    pub matrix: CMatrix,
}

impl GeneralizedLaplacian {
    pub fn new(g: &Graph, z: Complex64) -> Result<Self> {
        let jp = j_plus(z)?;
        let jm = j_minus(z)?;
        let n = g.vertex_count();
        let mut matrix = CMatrix::zeros(n, n);
        for &(u, v) in g.edges() {
            matrix[(u, v)] = Complex64::new(1.0, 0.0);
            matrix[(v, u)] = Complex64::new(1.0, 0.0);
        }
        for u in 0..n {
            matrix[(u, u)] -= jp * g.degree(u) as f64;
            if g.is_boundary(u) {
                matrix[(u, u)] += jm;
            }
        }
        Ok(Self {
            z,
            j_plus: jp,
            j_minus: jm,
            matrix,
        })
    }

    /// Ratio of smallest to largest singular value.
    pub fn conditioning(&self) -> f64 {
        let sv = self.matrix.clone().singular_values();
        let (lo, hi) = sv
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    pub fn is_singular(&self) -> bool {
        self.conditioning() < SINGULAR_RTOL
    }

    pub fn solve(&self, rhs: &CVector) -> Result<CVector> {
        if self.is_singular() {
            return Err(Error::Singular("generalized Laplacian"));
        }
        self.matrix
            .clone()
            .lu()
            .solve(rhs)
            .ok_or(Error::Singular("generalized Laplacian"))
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        if self.is_singular() {
            return Err(Error::Singular("generalized Laplacian"));
        }
        self.matrix
            .clone()
            .try_inverse()
            .ok_or(Error::Singular("generalized Laplacian"))
    }
}

/// One unit-circle member of the singular set.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularFrequency {
    /// Angle in `(−π, π]`.
    pub theta: f64,
    /// Dimension of the internally supported kernel; zero for `z = ±1`.
    pub kernel_dim: usize,
}

impl SingularFrequency {
    pub fn z(&self) -> Complex64 {
        unit(self.theta)
    }
}

/// Unit-circle singular frequencies, sorted by angle. Always contains `θ = 0`
/// and `θ = π`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSet {
    pub members: Vec<SingularFrequency>,
}

impl SingularSet {
    pub fn thetas(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.theta).collect()
    }

    /// Nearest member to `z` if it lies within `radius`.
    pub fn nearest(&self, z: Complex64, radius: f64) -> Option<&SingularFrequency> {
        self.members
            .iter()
            .map(|m| ((m.z() - z).norm(), m))
            .filter(|(d, _)| *d < radius)
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .map(|(_, m)| m)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.nearest(z, DISPATCH_RADIUS).is_some()
    }

    /// Smallest singular angle in `(0, π)`, if any.
    pub fn first_nontrivial(&self) -> Option<f64> {
        self.members
            .iter()
            .map(|m| m.theta)
            .filter(|&t| t > 1e-12 && t < PI - 1e-12)
            .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))))
    }
}

fn internal_columns(g: &Graph, lambda: f64) -> DMatrix<f64> {
    let interior = g.interior();
    let n = g.vertex_count();
    let mut m = DMatrix::zeros(n, interior.len());
    for (col, &v) in interior.iter().enumerate() {
        m[(v, col)] = lambda * g.degree(v) as f64;
    }
    for &(u, v) in g.edges() {
        if let Some(col) = interior.iter().position(|&w| w == v) {
            m[(u, col)] -= 1.0;
        }
        if let Some(col) = interior.iter().position(|&w| w == u) {
            m[(v, col)] -= 1.0;
        }
    }
    m
}

/// Null space of `(λD₀ − M₀)` restricted to columns outside the boundary,
/// embedded back into `ℝ^{V₀}`. Orthonormal in the standard inner product.
fn internal_kernel(g: &Graph, lambda: f64, rtol: f64) -> Vec<CVector> {
    let interior = g.interior();
    if interior.is_empty() {
        return Vec::new();
    }
    // N × |interior| with N ≥ |interior|, so the thin SVD gives a full right basis
    let svd = internal_columns(g, lambda).svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let scale = svd.singular_values.iter().fold(1.0f64, |a, &s| a.max(s));
    let basis: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < rtol * scale)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    basis
        .into_iter()
        .map(|v| {
            let mut full = CVector::zeros(g.vertex_count());
            for (col, &u) in interior.iter().enumerate() {
                full[u] = Complex64::new(v[col], 0.0);
            }
            full
        })
        .collect()
}

/// Orthonormal basis of `𝒦_z = {f ∈ ker(j₊(z) − P₀) : supp f ⊆ V₀ ∖ δV₀}`.
pub fn kernel_basis(g: &Graph, z: Complex64) -> Result<Vec<CVector>> {
    let jp = j_plus(z)?;
    let basis = internal_kernel(g, jp.re, SINGULAR_RTOL);
    if basis.is_empty() {
        return Err(Error::EmptyKernel);
    }
    Ok(basis)
}

/// Eigenvalues of `P₀`, computed from the symmetric `D₀^{-1/2} M₀ D₀^{-1/2}`
/// and grouped into clusters closer than `tol`.
pub fn transition_eigenvalues(g: &Graph, tol: f64) -> Vec<(f64, usize)> {
    let m = g.matrices();
    let n = g.vertex_count();
    let scale = DMatrix::from_fn(n, n, |i, j| {
        m.adjacency[(i, j)] / ((g.degree(i) * g.degree(j)) as f64).sqrt()
    });
    let mut values: Vec<f64> = scale.symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for v in values {
        match clusters.last_mut() {
            Some((c, k)) if (v - *c / *k as f64).abs() < tol => {
                *c += v;
                *k += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }
    clusters.into_iter().map(|(s, k)| (s / k as f64, k)).collect()
}

/// `σ_per`: eigenvalues of `P₀` whose eigenspace contains a vector vanishing on
/// the boundary, with the dimension of that intersection.
pub fn permanent_spectrum(g: &Graph) -> Vec<(f64, usize)> {
    transition_eigenvalues(g, 1e-9)
        .into_iter()
        .filter(|(l, _)| l.abs() < 1.0 - 1e-9)
        .filter_map(|(l, _)| {
            let dim = internal_kernel(g, l, SINGULAR_RTOL).len();
            (dim > 0).then_some((l, dim))
        })
        .collect()
}

/// Maps an angle into `(−π, π]`.
pub fn wrap(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Unit-circle singular frequencies, computed from the permanent spectrum of
/// `P₀` (via `θ = ±arccos λ`) and cross-checked against the unit-modulus
/// eigenvalues of the truncated walk operator.
pub fn singular_set(g: &Graph, tol: f64) -> Result<SingularSet> {
    let mut members = vec![
        SingularFrequency {
            theta: 0.0,
            kernel_dim: 0,
        },
        SingularFrequency {
            theta: PI,
            kernel_dim: 0,
        },
    ];
    for (lambda, dim) in permanent_spectrum(g) {
        let t = lambda.clamp(-1.0, 1.0).acos();
        members.push(SingularFrequency {
            theta: t,
            kernel_dim: dim,
        });
        members.push(SingularFrequency {
            theta: -t,
            kernel_dim: dim,
        });
    }
    members.sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap());

    let walk_side: Vec<Complex64> = walk::spectrum(g)?
        .into_iter()
        .filter(|l| (l.norm() - 1.0).abs() < tol)
        .map(|l| l.inv())
        .filter(|z| (z - 1.0).norm() > tol && (z + 1.0).norm() > tol)
        .collect();
    let near = |z: Complex64, set: &[Complex64]| set.iter().any(|w| (w - z).norm() < tol.max(1e-8));
    let laplacian_side: Vec<Complex64> = members.iter().filter(|m| m.kernel_dim > 0).map(|m| m.z()).collect();
    for z in &walk_side {
        if !near(*z, &laplacian_side) {
            return Err(Error::SingularSetMismatch(format!(
                "walk eigenvalue at θ = {:.12} has no permanent-spectrum partner",
                wrap(z.arg())
            )));
        }
    }
    for z in &laplacian_side {
        if !near(*z, &walk_side) {
            return Err(Error::SingularSetMismatch(format!(
                "permanent spectrum at θ = {:.12} has no walk eigenvalue",
                wrap(z.arg())
            )));
        }
    }
    for m in &mut members {
        m.theta = wrap(m.theta);
    }
    members.sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap());
    Ok(SingularSet { members })
}

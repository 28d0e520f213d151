//! Brute-force reference for the stationary state.
//!
//! Restricted to the internal arcs, the tailed Grover walk obeys
//! `ψ_{n+1} = E ψ_n + z^{-n} ρ` with `ψ_0 = 0`, where `E` is the principal
//! submatrix of the walk operator on `A₀` and `ρ` is the first injection from
//! the tails. Rescaling `φ_n = zⁿ ψ_n` removes the oscillation; `φ_n`
//! converges to the stationary state for every `|z| = 1`.
//!
//! Nothing here touches the generalized Laplacian.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::state::{max_abs_diff, ArcState, Inflow};
use crate::{CMatrix, CVector, Complex64};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// `E = χ U χ^*` on the internal arcs, together with the injection `ρ`.
#[derive(Debug, Clone)]
pub struct TruncatedEvolution {
    pub matrix: DMatrix<f64>,
    pub injection: CVector,
}

/// Builds `E` entry-wise from
/// `(Eψ)(a) = 2/d̃(o(a)) Σ_{t(b)=o(a)} ψ(b) − ψ(ā)` and
/// `ρ(a) = 2 α(o(a)) / d̃(o(a))` for arcs leaving a boundary vertex.
pub fn build_internal_evolution(g: &Graph, inflow: &Inflow) -> Result<TruncatedEvolution> {
    inflow.check(g)?;
    let m = g.arc_count();
    let mut matrix = DMatrix::zeros(m, m);
    for (a, arc) in g.arcs().iter().enumerate() {
        let w = 2.0 / g.tailed_degree(arc.origin) as f64;
        for &b in g.incoming(arc.origin) {
            matrix[(a, b)] += w;
        }
        matrix[(a, g.inverse(a))] -= 1.0;
    }
    Ok(TruncatedEvolution {
        matrix,
        injection: injection(g, inflow),
    })
}

pub fn injection(g: &Graph, inflow: &Inflow) -> CVector {
    CVector::from_iterator(
        g.arc_count(),
        g.arcs().iter().map(|arc| match g.boundary_index(arc.origin) {
            Some(k) => inflow.amplitudes()[k] * (2.0 / g.tailed_degree(arc.origin) as f64),
            None => Complex64::new(0.0, 0.0),
        }),
    )
}

/// `E ψ` without forming the matrix.
pub fn apply_internal(g: &Graph, psi: &CVector) -> CVector {
    let sums: Vec<Complex64> = (0..g.vertex_count())
        .map(|u| g.incoming(u).iter().map(|&b| psi[b]).sum())
        .collect();
    CVector::from_iterator(
        g.arc_count(),
        g.arcs()
            .iter()
            .enumerate()
            .map(|(a, arc)| sums[arc.origin] * (2.0 / g.tailed_degree(arc.origin) as f64) - psi[g.inverse(a)]),
    )
}

#[derive(Debug, Clone, Copy)]
pub struct IterationOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Iterated {
    pub state: ArcState,
    pub iterations: usize,
    pub last_delta: f64,
}

fn check_unit(z: Complex64) -> Result<()> {
    if (z.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnitModulus(z));
    }
    Ok(())
}

/// Runs `φ_{n+1} = z (E φ_n + ρ)` until successive iterates differ by less
/// than `tol` in sup-norm.
pub fn iterate_to_stationary(g: &Graph, inflow: &Inflow, z: Complex64, opts: IterationOptions) -> Result<Iterated> {
    inflow.check(g)?;
    check_unit(z)?;
    let rho = injection(g, inflow);
    let mut phi = CVector::zeros(g.arc_count());
    let mut last_delta = f64::INFINITY;
    for n in 1..=opts.max_iter {
        let next = (apply_internal(g, &phi) + &rho) * z;
        last_delta = max_abs_diff(&next, &phi);
        phi = next;
        if last_delta < opts.tol {
            return Ok(Iterated {
                state: ArcState { values: phi, z },
                iterations: n,
                last_delta,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        last_delta,
    })
}

/// Closed sum of the Neumann series, `φ = z (I − zE)⁻¹ ρ`.
pub fn neumann_stationary(g: &Graph, inflow: &Inflow, z: Complex64) -> Result<ArcState> {
    let evo = build_internal_evolution(g, inflow)?;
    let m = g.arc_count();
    let system: CMatrix = CMatrix::identity(m, m) - evo.matrix.map(|x| Complex64::new(x, 0.0)) * z;
    let sv = system.clone().singular_values();
    let (smin, smax) = sv
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if smin < 1e-9 * smax.max(1.0) {
        return Err(Error::Singular("I - zE"));
    }
    let values = system
        .lu()
        .solve(&(evo.injection * z))
        .ok_or(Error::Singular("I - zE"))?;
    Ok(ArcState { values, z })
}

/// Sup-norm residual of `U φ̃ = z⁻¹ φ̃` on the internal arcs, where `φ̃`
/// extends `φ` by the inflow on the incoming tail arcs.
pub fn eigen_equation_residual(g: &Graph, inflow: &Inflow, state: &ArcState) -> f64 {
    let phi = &state.values;
    let mut worst = 0.0f64;
    for (a, arc) in g.arcs().iter().enumerate() {
        let u = arc.origin;
        let mut s: Complex64 = g.incoming(u).iter().map(|&b| phi[b]).sum();
        if let Some(k) = g.boundary_index(u) {
            s += inflow.amplitudes()[k];
        }
        let lhs = s * (2.0 / g.tailed_degree(u) as f64) - phi[g.inverse(a)];
        worst = worst.max((lhs - phi[a] / state.z).norm());
    }
    worst
}

/// Eigenvalues of `E`.
pub fn spectrum(g: &Graph) -> Result<Vec<Complex64>> {
    let inflow = Inflow::new(vec![Complex64::new(0.0, 0.0); g.boundary_count()]);
    let evo = build_internal_evolution(g, &inflow).expect("inflow sized to boundary");
    eigenvalues(&evo.matrix)
}

/// Eigenvalues of a general real matrix. `E` is typically defective (nilpotent
/// blocks at boundary leaves) and close to a permutation matrix, which needs a
/// QR iteration with balancing and exceptional shifts.
fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let mat = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let values = mat.eigenvalues().map_err(|_| Error::EigenFailure)?;
    Ok(values.into_iter().map(|l| Complex64::new(l.re, l.im)).collect())
}

/// `|λ₁|`: the largest modulus among eigenvalues of `E` off the unit circle.
/// The stationary state extends analytically to `|z| < 1/|λ₁|`.
pub fn largest_interior_modulus(g: &Graph) -> Result<f64> {
    Ok(spectrum(g)?
        .iter()
        .map(|l| l.norm())
        .filter(|&r| r < 1.0 - 1e-9)
        .fold(0.0, f64::max))
}

/// Smallest singular value of `E`; zero exactly when `0 ∈ spec(E)`. Used
/// instead of eigenvalues because `E` need not be diagonalizable.
pub fn smallest_singular_value(g: &Graph) -> f64 {
    let inflow = Inflow::new(vec![Complex64::new(0.0, 0.0); g.boundary_count()]);
    let evo = build_internal_evolution(g, &inflow).expect("inflow sized to boundary");
    evo.matrix.singular_values().min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::unit;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_edge_evolution_vanishes() {
        let g = generators::path(2, &[0, 1]).unwrap();
        let evo = build_internal_evolution(&g, &Inflow::from_real(&[1.0, 0.0])).unwrap();
        assert!(evo.matrix.iter().all(|&x| x == 0.0));
        assert_eq!(evo.injection[0], c(1.0, 0.0));
        assert_eq!(evo.injection[1], c(0.0, 0.0));
    }

    #[test]
    fn grover_row_structure_at_interior_vertices() {
        let g = generators::complete(5, 2).unwrap();
        let evo = build_internal_evolution(&g, &Inflow::from_real(&[1.0, 0.0])).unwrap();
        for (a, arc) in g.arcs().iter().enumerate() {
            if g.is_boundary(arc.origin) {
                continue;
            }
            let d = g.degree(arc.origin) as f64;
            let row = evo.matrix.row(a);
            let nonzero: Vec<f64> = row.iter().copied().filter(|&x| x != 0.0).collect();
            assert_eq!(nonzero.len(), g.degree(arc.origin));
            let backtrack = nonzero.iter().filter(|&&x| (x - (2.0 / d - 1.0)).abs() < 1e-15).count();
            let forward = nonzero.iter().filter(|&&x| (x - 2.0 / d).abs() < 1e-15).count();
            assert_eq!((backtrack, forward), (1, g.degree(arc.origin) - 1));
        }
    }

    #[test]
    fn structured_apply_matches_matrix() {
        let g = generators::complete(4, 2).unwrap();
        let evo = build_internal_evolution(&g, &Inflow::from_real(&[1.0, 0.0])).unwrap();
        let psi = CVector::from_fn(12, |a, _| c(a as f64 * 0.3 - 1.0, (a * a) as f64 * 0.01));
        let dense = evo.matrix.map(|x| c(x, 0.0)) * &psi;
        assert!(max_abs_diff(&dense, &apply_internal(&g, &psi)) < 1e-14);
    }

    #[test]
    fn single_edge_iteration() {
        let g = generators::path(2, &[0, 1]).unwrap();
        let inflow = Inflow::from_real(&[1.0, 0.0]);
        let it = iterate_to_stationary(&g, &inflow, c(0.0, 1.0), IterationOptions::default()).unwrap();
        assert!((it.state.values[0] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(it.state.values[1].norm() < 1e-15);
        let ns = neumann_stationary(&g, &inflow, c(0.0, 1.0)).unwrap();
        assert!(ns.max_abs_diff(&it.state) < 1e-15);
    }

    #[test]
    fn complete_four_two_special_comfortabilities() {
        let g = generators::complete(4, 2).unwrap();
        let inflow = Inflow::from_real(&[1.0, 0.0]);
        let opts = IterationOptions::default();
        let at_one = iterate_to_stationary(&g, &inflow, c(1.0, 0.0), opts).unwrap();
        assert!((at_one.state.comfortability() - 13.0 / 8.0).abs() < 1e-8);
        let at_minus = iterate_to_stationary(&g, &inflow, c(-1.0, 0.0), opts).unwrap();
        assert!((at_minus.state.comfortability() - 5.0 / 12.0).abs() < 1e-8);
    }

    #[test]
    fn neumann_matches_iteration_off_the_singular_set() {
        let g = generators::complete(4, 2).unwrap();
        let inflow = Inflow::from_real(&[1.0, 0.0]);
        let z = unit(0.7);
        let it = iterate_to_stationary(&g, &inflow, z, IterationOptions::default()).unwrap();
        let ns = neumann_stationary(&g, &inflow, z).unwrap();
        assert!(ns.max_abs_diff(&it.state) < 1e-8);
    }

    #[test]
    fn neumann_is_singular_at_theta_star() {
        let g = generators::complete(4, 2).unwrap();
        let inflow = Inflow::from_real(&[1.0, 0.0]);
        let theta_star = (-1.0f64 / 3.0).acos();
        assert!(matches!(
            neumann_stationary(&g, &inflow, unit(theta_star)),
            Err(Error::Singular(_))
        ));
        // the iteration still converges there
        let it = iterate_to_stationary(&g, &inflow, unit(theta_star), IterationOptions::default()).unwrap();
        assert!((it.state.comfortability() - 4.5).abs() < 1e-8);
    }

    #[test]
    fn spectral_radius_is_at_most_one() {
        let g = generators::complete(4, 2).unwrap();
        assert!(spectrum(&g).unwrap().iter().all(|l| l.norm() <= 1.0 + 1e-12));
        let lambda1 = largest_interior_modulus(&g).unwrap();
        assert!(lambda1 > 0.0 && lambda1 < 1.0);
    }

    #[test]
    fn non_unit_frequency_is_rejected() {
        let g = generators::path(2, &[0, 1]).unwrap();
        let r = iterate_to_stationary(
            &g,
            &Inflow::from_real(&[1.0, 0.0]),
            c(0.5, 0.0),
            IterationOptions::default(),
        );
        assert!(matches!(r, Err(Error::NotUnitModulus(_))));
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = generators::complete(6, 1).unwrap();
        let opts = IterationOptions {
            tol: 1e-14,
            max_iter: 3,
        };
        let r = iterate_to_stationary(&g, &Inflow::from_real(&[1.0]), unit(0.4), opts);
        assert!(matches!(r, Err(Error::NonConvergence { iterations: 3, .. })));
    }
}

//! Stationary states from the circuit equation.
//!
//! The stationary state is the twisted gradient of a vertex potential,
//! `j₋(z) φ(a) = z ν(t(a)) − ν(o(a))`, and the potential solves
//! `L_z ν = j₋(z) α_in`. Three regimes are handled separately:
//!
//! * regular `z`: `φ = ∂_z^* L_z⁻¹ α_in` by a dense LU solve;
//! * `z` in the singular set but `z ≠ ±1`: the Poisson equation is
//!   augmented with degree-weighted orthogonality to the internally supported
//!   kernel `𝒦_z`, which makes the solution unique;
//! * `z = ±1`: the state is an electric current on the unit-resistance
//!   network plus a constant, so no `0/0` limit is evaluated numerically.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{Bipartition, Graph};
use crate::laplacian::{self, GeneralizedLaplacian, SingularSet, DISPATCH_RADIUS};
use crate::state::{max_abs, twisted_gradient, ArcState, Inflow, VertexPotential};
use crate::{unit, CMatrix, CVector, Complex64};

const RESIDUAL_RTOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_unit(z: Complex64) -> Result<()> {
    if (z.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnitModulus(z));
    }
    Ok(())
}

/// `ν = L_z⁻¹ j₋(z) α_in` for `z` outside the singular set.
pub fn solve_potential(g: &Graph, z: Complex64, inflow: &Inflow) -> Result<VertexPotential> {
    inflow.check(g)?;
    let lap = GeneralizedLaplacian::new(g, z)?;
    let rhs = inflow.on_vertices(g) * lap.j_minus;
    let values = lap.solve(&rhs)?;
    verify_residual(&lap.matrix, &values, &rhs, "Poisson equation")?;
    Ok(VertexPotential { values, z })
}

fn verify_residual(a: &CMatrix, x: &CVector, b: &CVector, what: &'static str) -> Result<()> {
    let r = max_abs(&(a * x - b));
    let scale = max_abs(b)
        .max(a.iter().map(|v| v.norm()).fold(0.0, f64::max) * max_abs(x))
        .max(1.0);
    if r > RESIDUAL_RTOL * scale {
        return Err(Error::Residual { what, residual: r });
    }
    Ok(())
}

/// Potential at a singular `z ≠ ±1`: the unique solution of `L_z ν = j₋(z) α_in`
/// with `⟨μ_k, ν⟩_π = 0` for a basis `μ_k` of `𝒦_z`.
pub fn solve_potential_singular(g: &Graph, z: Complex64, inflow: &Inflow) -> Result<VertexPotential> {
    inflow.check(g)?;
    check_unit(z)?;
    if (z - 1.0).norm() < DISPATCH_RADIUS || (z + 1.0).norm() < DISPATCH_RADIUS {
        return Err(Error::Singular("constrained solve is undefined at z = ±1"));
    }
    let lap = GeneralizedLaplacian::new(g, z)?;
    let kernel = laplacian::kernel_basis(g, z)?;
    let n = g.vertex_count();
    let rows = n + kernel.len();
    let mut stacked = CMatrix::zeros(rows, n);
    stacked.view_mut((0, 0), (n, n)).copy_from(&lap.matrix);
    for (k, mu) in kernel.iter().enumerate() {
        for u in 0..n {
            stacked[(n + k, u)] = mu[u].conj() * g.degree(u) as f64;
        }
    }
    let mut rhs = CVector::zeros(rows);
    rhs.rows_mut(0, n).copy_from(&(inflow.on_vertices(g) * lap.j_minus));

    let svd = stacked.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin < laplacian::SINGULAR_RTOL * smax {
        return Err(Error::Singular("augmented Poisson system"));
    }
    let values = svd
        .solve(&rhs, 0.0)
        .map_err(|_| Error::Singular("augmented Poisson system"))?;
    verify_residual(&stacked, &values, &rhs, "augmented Poisson system")?;
    Ok(VertexPotential { values, z })
}

/// Electric flow on the unit-resistance network `G₀`.
#[derive(Debug, Clone)]
pub struct ElectricSolution {
    /// Current along each arc, `p(o(a)) − p(t(a))`; antisymmetric.
    pub current: CVector,
    /// Node potential, gauge-fixed by `Σ_u p(u) d(u) = 0`.
    pub potential: CVector,
    /// Sup-norm Kirchhoff current-law residual.
    pub kcl_residual: f64,
}

/// Solves `(D₀ − M₀) p = injection` with the given net inflow at each
/// boundary vertex. The injections must sum to zero.
pub fn electric_current(g: &Graph, injections: &[Complex64]) -> Result<ElectricSolution> {
    if injections.len() != g.boundary_count() {
        return Err(Error::InflowLength {
            expected: g.boundary_count(),
            got: injections.len(),
        });
    }
    let total: Complex64 = injections.iter().sum();
    let magnitude: f64 = injections.iter().map(|x| x.norm()).sum();
    if total.norm() > 1e-12 * magnitude.max(1.0) {
        return Err(Error::NonzeroInjectionSum(total.norm()));
    }
    let n = g.vertex_count();
    let m = g.matrices();
    // bordered system [[D − M, d], [dᵀ, 0]]
    let mut bordered = DMatrix::<f64>::zeros(n + 1, n + 1);
    bordered.view_mut((0, 0), (n, n)).copy_from(&(&m.degree - &m.adjacency));
    for u in 0..n {
        bordered[(u, n)] = g.degree(u) as f64;
        bordered[(n, u)] = g.degree(u) as f64;
    }
    let bordered = bordered.map(c);
    let source = g.embed_boundary(injections);
    let mut rhs = CVector::zeros(n + 1);
    rhs.rows_mut(0, n).copy_from(&source);
    let sol = bordered.lu().solve(&rhs).ok_or(Error::Singular("electric network"))?;
    let potential = sol.rows(0, n).into_owned();
    let current = CVector::from_iterator(
        g.arc_count(),
        g.arcs()
            .iter()
            .map(|arc| potential[arc.origin] - potential[arc.terminus]),
    );
    let kcl_residual = (0..n)
        .map(|u| {
            // arcs leaving u are the inverses of arcs entering u
            let out: Complex64 = g.incoming(u).iter().map(|&a| current[g.inverse(a)]).sum();
            (out - source[u]).norm()
        })
        .fold(0.0, f64::max);
    if kcl_residual > RESIDUAL_RTOL * magnitude.max(1.0) {
        return Err(Error::Residual {
            what: "Kirchhoff current law",
            residual: kcl_residual,
        });
    }
    Ok(ElectricSolution {
        current,
        potential,
        kcl_residual,
    })
}

/// Stationary state at `z = +1` (`sign > 0`) or `z = −1` (`sign < 0`).
///
/// At `z = 1` the state is `j(a) + ave(α)` where `j` is the current driven by
/// injections `α(u_k) − ave(α)`. At `z = −1` on a bipartite graph the same
/// holds for the flat-transformed state and inflow. At `z = −1` on a
/// non-bipartite graph the signless Laplacian is invertible and
/// `φ = ∂_{−1}^* (M₀ + D₀)⁻¹ α_in`.
pub fn stationary_at_pm1(g: &Graph, inflow: &Inflow, sign: i8) -> Result<ArcState> {
    inflow.check(g)?;
    if sign >= 0 {
        let values = current_plus_average(g, inflow.amplitudes())?;
        return Ok(ArcState { values, z: c(1.0) });
    }
    let z = c(-1.0);
    match g.bipartition() {
        Some(part) => {
            let flat_inflow: Vec<Complex64> = g
                .boundary()
                .iter()
                .zip(inflow.amplitudes())
                .map(|(&u, &a)| a * part.sign(u))
                .collect();
            let flat_state = current_plus_average(g, &flat_inflow)?;
            Ok(ArcState {
                values: part.flat_arc(g, &flat_state),
                z,
            })
        }
        None => {
            let lap = GeneralizedLaplacian::new(g, z)?;
            let w = lap.solve(&inflow.on_vertices(g))?;
            Ok(ArcState {
                values: twisted_gradient(g, z, &w),
                z,
            })
        }
    }
}

fn current_plus_average(g: &Graph, amplitudes: &[Complex64]) -> Result<CVector> {
    let ave = amplitudes.iter().sum::<Complex64>() / amplitudes.len() as f64;
    let injections: Vec<Complex64> = amplitudes.iter().map(|&a| a - ave).collect();
    let sol = electric_current(g, &injections)?;
    Ok(sol.current.map(|j| j + ave))
}

/// Which regime a frequency falls into.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    Regular,
    /// Within the dispatch radius of a singular `z* ≠ ±1`; carries `θ*`.
    Singular(f64),
    PlusOne,
    MinusOne,
}

/// Stationary-state solver for one graph. Computes the singular set once so
/// that sweeps over many frequencies dispatch cheaply.
#[derive(Debug, Clone)]
pub struct StationarySolver<'g> {
    graph: &'g Graph,
    singular: SingularSet,
    bipartition: Option<Bipartition>,
}

impl<'g> StationarySolver<'g> {
    pub fn new(graph: &'g Graph) -> Result<Self> {
        Ok(Self {
            graph,
            singular: laplacian::singular_set(graph, 1e-9)?,
            bipartition: graph.bipartition(),
        })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn singular_set(&self) -> &SingularSet {
        &self.singular
    }

    pub fn bipartition(&self) -> Option<&Bipartition> {
        self.bipartition.as_ref()
    }

    pub fn regime(&self, z: Complex64) -> Regime {
        if (z - 1.0).norm() < DISPATCH_RADIUS {
            Regime::PlusOne
        } else if (z + 1.0).norm() < DISPATCH_RADIUS {
            Regime::MinusOne
        } else if let Some(m) = self.singular.nearest(z, DISPATCH_RADIUS) {
            Regime::Singular(m.theta)
        } else {
            Regime::Regular
        }
    }

    pub fn is_singular(&self, z: Complex64) -> bool {
        self.regime(z) != Regime::Regular
    }

    pub fn state(&self, z: Complex64, inflow: &Inflow) -> Result<ArcState> {
        check_unit(z)?;
        inflow.check(self.graph)?;
        let g = self.graph;
        match self.regime(z) {
            Regime::PlusOne => stationary_at_pm1(g, inflow, 1),
            Regime::MinusOne => stationary_at_pm1(g, inflow, -1),
            Regime::Singular(theta) => {
                let zs = unit(theta);
                let nu = solve_potential_singular(g, zs, inflow)?;
                let jm = laplacian::j_minus(zs)?;
                Ok(ArcState {
                    values: twisted_gradient(g, zs, &nu.values) / jm,
                    z: zs,
                })
            }
            Regime::Regular => {
                let lap = GeneralizedLaplacian::new(g, z)?;
                let w = lap.solve(&inflow.on_vertices(g))?;
                Ok(ArcState {
                    values: twisted_gradient(g, z, &w),
                    z,
                })
            }
        }
    }

    /// Potential `ν_z` in every regime. At `z = ±1` it is recovered from the
    /// state as the incoming average over the tailed graph.
    pub fn potential(&self, z: Complex64, inflow: &Inflow) -> Result<VertexPotential> {
        check_unit(z)?;
        let g = self.graph;
        match self.regime(z) {
            Regime::Regular => solve_potential(g, z, inflow),
            Regime::Singular(theta) => solve_potential_singular(g, unit(theta), inflow),
            Regime::PlusOne | Regime::MinusOne => {
                let state = self.state(z, inflow)?;
                Ok(VertexPotential {
                    values: state.incoming_average(g, inflow),
                    z: state.z,
                })
            }
        }
    }
}

/// `φ_z` for any unit-modulus `z`; see [`StationarySolver::state`].
pub fn stationary_state(g: &Graph, z: Complex64, inflow: &Inflow) -> Result<ArcState> {
    StationarySolver::new(g)?.state(z, inflow)
}

/// Where to differentiate the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pole {
    Zero,
    Pi,
}

#[derive(Debug, Clone)]
pub struct DerivativeReport {
    pub h: f64,
    /// Central difference `(ν(θ₀+h) − ν(θ₀−h)) / 2h`.
    pub derivative: CVector,
    /// `ν(θ₀)`.
    pub potential: CVector,
    /// `D₀⁻¹(α_in − Π_δV₀ ν(θ₀))`.
    pub source: CVector,
    /// Sup-norm residual of `(P₀ − I)(−i ν′) = q₀` (flat-transformed at `π`).
    pub residual: f64,
}

/// Checks that the derivative of the potential at `θ₀ ∈ {0, π}` solves the
/// electric Poisson equation, using a central difference of step `h`.
pub fn potential_derivative_check(g: &Graph, inflow: &Inflow, pole: Pole, h: f64) -> Result<DerivativeReport> {
    inflow.check(g)?;
    let solver = StationarySolver::new(g)?;
    let (theta0, flat) = match pole {
        Pole::Zero => (0.0, None),
        Pole::Pi => (std::f64::consts::PI, Some(g.bipartition().ok_or(Error::NotBipartite)?)),
    };
    let plus = solver.potential(unit(theta0 + h), inflow)?.values;
    let minus = solver.potential(unit(theta0 - h), inflow)?.values;
    let derivative = (plus - minus) / c(2.0 * h);
    let potential = solver.potential(unit(theta0), inflow)?.values;

    let n = g.vertex_count();
    let alpha = inflow.on_vertices(g);
    let source = CVector::from_fn(n, |u, _| {
        let boundary_part = if g.is_boundary(u) { potential[u] } else { c(0.0) };
        (alpha[u] - boundary_part) / g.degree(u) as f64
    });
    let m = g.matrices();
    let p_minus_i = (&m.transition - DMatrix::identity(n, n)).map(c);
    let scaled = &derivative * Complex64::new(0.0, -1.0);
    let residual = match &flat {
        None => max_abs(&(&p_minus_i * &scaled - &source)),
        Some(part) => max_abs(&(&p_minus_i * part.flat_vertex(&scaled) - part.flat_vertex(&source))),
    };
    Ok(DerivativeReport {
        h,
        derivative,
        potential,
        source,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::walk::{iterate_to_stationary, IterationOptions};

    fn ci(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_edge_potential() {
        let g = generators::path(2, &[0, 1]).unwrap();
        let nu = solve_potential(&g, ci(0.0, 1.0), &Inflow::from_real(&[1.0, 0.0])).unwrap();
        assert!((nu.values[0] - ci(0.5, 0.0)).norm() < 1e-15);
        assert!((nu.values[1] - ci(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn zero_inflow_gives_zero_potential() {
        let g = generators::complete(5, 3).unwrap();
        let nu = solve_potential(&g, unit(1.3), &Inflow::from_real(&[0.0, 0.0, 0.0])).unwrap();
        assert!(max_abs(&nu.values) == 0.0);
    }

    #[test]
    fn regular_solve_refuses_singular_frequency() {
        let g = generators::complete(4, 2).unwrap();
        let theta_star = (-1.0f64 / 3.0).acos();
        let r = solve_potential(&g, unit(theta_star), &Inflow::from_real(&[1.0, 0.0]));
        assert!(matches!(r, Err(Error::Singular(_))));
    }

    #[test]
    fn constrained_potential_at_theta_star() {
        let g = generators::complete(4, 2).unwrap();
        let theta_star = (-1.0f64 / 3.0).acos();
        let z = unit(theta_star);
        let inflow = Inflow::from_real(&[1.0, 0.0]);
        let nu = solve_potential_singular(&g, z, &inflow).unwrap();
        let mu = CVector::from_vec(vec![c(0.0), c(0.0), c(1.0), c(-1.0)]);
        assert!(nu.degree_pairing(&g, &mu).norm() < 1e-12);

        let phi = twisted_gradient(&g, z, &nu.values) / laplacian::j_minus(z).unwrap();
        assert!((0.5 * phi.iter().map(|x| x.norm_sqr()).sum::<f64>() - 4.5).abs() < 1e-10);

        for &eps in &[1e-6, -1e-6] {
            let near = solve_potential(&g, unit(theta_star + eps), &inflow).unwrap();
            assert!(crate::state::max_abs_diff(&near.values, &nu.values) < 1e-4);
        }
    }

    #[test]
    fn twisted_gradient_identity() {
        let g = generators::cycle(5, &[0, 2]).unwrap();
        let inflow = Inflow::new(vec![ci(1.0, 0.5), ci(-0.3, 0.2)]);
        let z = unit(0.77);
        let solver = StationarySolver::new(&g).unwrap();
        let phi = solver.state(z, &inflow).unwrap();
        let nu = solver.potential(z, &inflow).unwrap();
        let jm = laplacian::j_minus(z).unwrap();
        let lhs = &phi.values * jm;
        let rhs = twisted_gradient(&g, z, &nu.values);
        assert!(crate::state::max_abs_diff(&lhs, &rhs) < 1e-12);
        // ν is also the incoming average of the state
        assert!(crate::state::max_abs_diff(&phi.incoming_average(&g, &inflow), &nu.values) < 1e-12);
    }

    #[test]
    fn single_edge_at_plus_one() {
        let g = generators::path(2, &[0, 1]).unwrap();
        let phi = stationary_at_pm1(&g, &Inflow::from_real(&[1.0, 0.0]), 1).unwrap();
        assert!((phi.values[0] - c(1.0)).norm() < 1e-15);
        assert!(phi.values[1].norm() < 1e-15);
    }

    #[test]
    fn constant_inflow_at_plus_one() {
        let g = generators::complete(5, 3).unwrap();
        let a = ci(0.4, -0.7);
        let phi = stationary_at_pm1(&g, &Inflow::new(vec![a; 3]), 1).unwrap();
        assert!(phi.values.iter().all(|x| (x - a).norm() < 1e-14));
    }

    #[test]
    fn complete_four_two_at_minus_one() {
        let g = generators::complete(4, 2).unwrap();
        let phi = stationary_at_pm1(&g, &Inflow::from_real(&[1.0, 0.0]), -1).unwrap();
        assert!((phi.comfortability() - 5.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn pm1_paths_match_iteration() {
        let graphs = [
            generators::complete(4, 2).unwrap(),
            generators::cycle(4, &[0, 1]).unwrap(),
            generators::cycle(6, &[0, 3, 4]).unwrap(),
            generators::path(4, &[1, 3]).unwrap(),
        ];
        let inflow_for = |r: usize| Inflow::new((0..r).map(|k| ci(1.0 + k as f64, 0.5 - k as f64)).collect());
        for g in &graphs {
            let inflow = inflow_for(g.boundary_count());
            for sign in [1i8, -1] {
                let z = c(sign as f64);
                let fast = stationary_at_pm1(g, &inflow, sign).unwrap();
                let slow = iterate_to_stationary(g, &inflow, z, IterationOptions::default()).unwrap();
                assert!(fast.max_abs_diff(&slow.state) < 1e-7, "sign {sign}");
            }
        }
    }

    #[test]
    fn electric_examples() {
        let g = generators::path(2, &[0, 1]).unwrap();
        let sol = electric_current(&g, &[c(0.5), c(-0.5)]).unwrap();
        assert!((sol.current[0] - c(0.5)).norm() < 1e-15);
        assert!((sol.current[1] + c(0.5)).norm() < 1e-15);

        let zero = electric_current(&g, &[c(0.0), c(0.0)]).unwrap();
        assert!(max_abs(&zero.current) < 1e-15);

        let k4 = generators::complete(4, 4).unwrap();
        let sol = electric_current(&k4, &[c(0.75), c(-0.25), c(-0.25), c(-0.25)]).unwrap();
        for (a, arc) in k4.arcs().iter().enumerate() {
            if arc.origin == 0 {
                assert!((sol.current[a] - c(0.25)).norm() < 1e-14);
            }
            assert!((sol.current[a] + sol.current[k4.inverse(a)]).norm() < 1e-14);
        }

        assert!(matches!(
            electric_current(&g, &[c(1.0), c(0.0)]),
            Err(Error::NonzeroInjectionSum(_))
        ));
    }

    #[test]
    fn derivative_check_single_edge_is_second_order() {
        let g = generators::path(2, &[0, 1]).unwrap();
        let inflow = Inflow::from_real(&[1.0, 0.0]);
        let coarse = potential_derivative_check(&g, &inflow, Pole::Zero, 1e-3).unwrap();
        let fine = potential_derivative_check(&g, &inflow, Pole::Zero, 1e-4).unwrap();
        let ratio = coarse.residual / fine.residual;
        assert!(ratio > 80.0 && ratio < 120.0, "ratio {ratio}");
        assert!(fine.residual < 1e-6);
    }

    #[test]
    fn derivative_check_requires_bipartite_at_pi() {
        let g = generators::complete(4, 2).unwrap();
        let r = potential_derivative_check(&g, &Inflow::from_real(&[1.0, 0.0]), Pole::Pi, 1e-4);
        assert!(matches!(r, Err(Error::NotBipartite)));
    }

    #[test]
    fn constant_inflow_source_is_balanced() {
        let g = generators::complete(5, 2).unwrap();
        let inflow = Inflow::from_real(&[1.0, 1.0]);
        let rep = potential_derivative_check(&g, &inflow, Pole::Zero, 1e-4).unwrap();
        let ones = CVector::from_element(5, c(1.0));
        assert!(crate::state::degree_pairing(&g, &ones, &rep.source).norm() < 1e-12);
    }
}

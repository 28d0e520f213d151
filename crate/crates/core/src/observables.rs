//! Boundary observables: scattering matrix, outflow, transmitting rate and
//! comfortability.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::laplacian::GeneralizedLaplacian;
use crate::state::{ArcState, Inflow};
use crate::stationary::{Regime, StationarySolver};
use crate::{CMatrix, CVector, Complex64};

/// Unitarity defect above which a scattering matrix is rejected.
pub const UNITARITY_LIMIT: f64 = 1e-6;
/// Relative disagreement above which the two comfortability paths are rejected.
pub const PATH_LIMIT: f64 = 1e-6;

/// `S_z` on `ℂ^{δV₀}`, rows and columns in boundary order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    pub matrix: CMatrix,
    pub z: Complex64,
}

impl ScatteringMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `‖S S† − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let r = self.dim();
        let prod = &self.matrix * self.matrix.adjoint();
        (prod - CMatrix::identity(r, r))
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    /// `|S_{ij}|²`: probability that a walker entering at tail `j` leaves by tail `i`.
    pub fn transmitting_rate(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)].norm_sqr()
    }

    /// Largest off-diagonal modulus; zero exactly for perfect reflection.
    pub fn off_diagonal_max(&self) -> f64 {
        let r = self.dim();
        (0..r)
            .flat_map(|i| (0..r).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.matrix[(i, j)].norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, alpha: &[Complex64]) -> CVector {
        &self.matrix * CVector::from_column_slice(alpha)
    }
}

/// `|S_{ij}|²`.
pub fn transmitting_rate(s: &ScatteringMatrix, i: usize, j: usize) -> f64 {
    s.transmitting_rate(i, j)
}

/// Grover matrix `(2/r) J − I`.
pub fn grover_matrix(r: usize) -> CMatrix {
    CMatrix::from_fn(r, r, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        Complex64::new(2.0 / r as f64 - d, 0.0)
    })
}

/// Scattering matrix at any unit-modulus `z`.
///
/// Regular frequencies use `S_z = z χ (2 j₋(z) L_z⁻¹ − I) χ*`. At singular
/// frequencies, including `±1`, column `v` is read off the stationary state for
/// unit inflow at `v` as `β(u) = 2z ν(u) − z α(u)`.
pub fn scattering_matrix(g: &Graph, z: Complex64) -> Result<ScatteringMatrix> {
    scattering_with(&StationarySolver::new(g)?, z)
}

/// [`scattering_matrix`] reusing a solver's cached singular set.
pub fn scattering_with(solver: &StationarySolver<'_>, z: Complex64) -> Result<ScatteringMatrix> {
    let g = solver.graph();
    let s = match solver.regime(z) {
        Regime::Regular => closed_scattering(g, z)?,
        _ => column_scattering(solver, z)?,
    };
    let defect = s.unitarity_defect();
    if defect > UNITARITY_LIMIT {
        return Err(Error::UnitarityViolation(defect));
    }
    Ok(s)
}

fn closed_scattering(g: &Graph, z: Complex64) -> Result<ScatteringMatrix> {
    let lap = GeneralizedLaplacian::new(g, z)?;
    let inv = lap.inverse()?;
    let b = g.boundary();
    let r = b.len();
    let matrix = CMatrix::from_fn(r, r, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        z * (2.0 * lap.j_minus * inv[(b[i], b[j])] - d)
    });
    Ok(ScatteringMatrix { matrix, z })
}

fn column_scattering(solver: &StationarySolver<'_>, z: Complex64) -> Result<ScatteringMatrix> {
    let g = solver.graph();
    let r = g.boundary_count();
    let mut matrix = CMatrix::zeros(r, r);
    let mut at = z;
    for v in 0..r {
        let inflow = Inflow::basis(r, v);
        let state = solver.state(z, &inflow)?;
        at = state.z;
        matrix.set_column(v, &outflow_from_state(g, &inflow, &state));
    }
    Ok(ScatteringMatrix { matrix, z: at })
}

/// `β(u_j) = 2z ν(u_j) − z α(u_j)`, with `ν` the incoming average.
fn outflow_from_state(g: &Graph, inflow: &Inflow, state: &ArcState) -> CVector {
    let nu = state.incoming_average(g, inflow);
    let z = state.z;
    CVector::from_iterator(
        g.boundary_count(),
        g.boundary()
            .iter()
            .zip(inflow.amplitudes())
            .map(|(&u, &a)| 2.0 * z * nu[u] - z * a),
    )
}

/// Outflow amplitudes `β_δ = S_z α_δ`, computed from the stationary state.
pub fn outflow(g: &Graph, z: Complex64, inflow: &Inflow) -> Result<CVector> {
    let solver = StationarySolver::new(g)?;
    let state = solver.state(z, inflow)?;
    Ok(outflow_from_state(g, inflow, &state))
}

/// Comfortability with both evaluation paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComfortabilityResult {
    /// `½ ‖φ_z‖²`.
    pub value: f64,
    #[serde(skip)]
    pub z: Complex64,
    pub theta: f64,
    /// Same as `value`; kept separately for reporting.
    pub state_norm: f64,
    /// `⟨w, (D₀ − cos θ M₀) w⟩` with `w = L_z⁻¹ α_in`; absent where `L_z` is singular.
    pub quadratic_form: Option<f64>,
    pub discrepancy: Option<f64>,
}

/// Comfortability `E_z = ½ Σ_a |φ_z(a)|²`.
pub fn comfortability(g: &Graph, z: Complex64, inflow: &Inflow) -> Result<ComfortabilityResult> {
    comfortability_with(&StationarySolver::new(g)?, z, inflow)
}

/// [`comfortability`] reusing a solver's cached singular set.
pub fn comfortability_with(
    solver: &StationarySolver<'_>,
    z: Complex64,
    inflow: &Inflow,
) -> Result<ComfortabilityResult> {
    let g = solver.graph();
    let state = solver.state(z, inflow)?;
    let value = state.comfortability();
    let quadratic_form = match solver.regime(z) {
        Regime::Regular => Some(quadratic_form(g, z, inflow)?),
        _ => None,
    };
    let discrepancy = quadratic_form.map(|q| (q - value).abs());
    if let Some(d) = discrepancy {
        if d > PATH_LIMIT * value.max(1.0) {
            return Err(Error::PathDisagreement(d));
        }
    }
    Ok(ComfortabilityResult {
        value,
        z: state.z,
        theta: state.z.arg(),
        state_norm: value,
        quadratic_form,
        discrepancy,
    })
}

/// `⟨L_z⁻¹ α_in, (D₀ − cos θ M₀) L_z⁻¹ α_in⟩` for regular `z`.
pub fn quadratic_form(g: &Graph, z: Complex64, inflow: &Inflow) -> Result<f64> {
    inflow.check(g)?;
    let lap = GeneralizedLaplacian::new(g, z)?;
    let w = lap.solve(&inflow.on_vertices(g))?;
    let m = g.matrices();
    let form = (&m.degree - &m.adjacency * z.re).map(|x| Complex64::new(x, 0.0));
    Ok(w.dotc(&(form * &w)).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::unit;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn plus_one_is_grover() {
        for g in [
            generators::complete(5, 3).unwrap(),
            generators::cycle(6, &[0, 2, 3, 5]).unwrap(),
            generators::path(3, &[0, 2]).unwrap(),
        ] {
            let s = scattering_matrix(&g, c(1.0)).unwrap();
            let expected = grover_matrix(g.boundary_count());
            assert!((s.matrix - expected).iter().all(|x| x.norm() < 1e-12));
        }
    }

    #[test]
    fn single_edge_swaps() {
        let g = generators::path(2, &[0, 1]).unwrap();
        for &theta in &[0.3, 1.1, PI / 2.0, -2.0, 0.0, PI] {
            let z = unit(theta);
            let s = scattering_matrix(&g, z).unwrap();
            let z2 = z * z;
            assert!(s.matrix[(0, 0)].norm() < 1e-12);
            assert!((s.matrix[(0, 1)] - z2).norm() < 1e-12);
            assert!((s.matrix[(1, 0)] - z2).norm() < 1e-12);
            assert!((s.transmitting_rate(1, 0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_four_two_transmission() {
        let g = generators::complete(4, 2).unwrap();
        let theta_star = (-1.0f64 / 3.0).acos();
        let t = |theta: f64| transmitting_rate(&scattering_matrix(&g, unit(theta)).unwrap(), 1, 0);
        assert!((t(0.0) - 1.0).abs() < 1e-12);
        assert!(t(PI) < 1e-12);
        assert!(t(theta_star) < 1e-12);
        assert!(t(-theta_star) < 1e-12);
        let s = scattering_matrix(&g, unit(theta_star)).unwrap();
        assert!((s.matrix[(0, 0)] - unit(theta_star)).norm() < 1e-10);
    }

    #[test]
    fn singular_matches_limit() {
        let g = generators::complete(5, 2).unwrap();
        let theta_star = (-0.25f64).acos();
        let exact = scattering_matrix(&g, unit(theta_star)).unwrap();
        let near = scattering_matrix(&g, unit(theta_star + 1e-6)).unwrap();
        assert!((exact.matrix - near.matrix).iter().all(|x| x.norm() < 1e-4));
    }

    #[test]
    fn minus_one_dichotomy() {
        let k4 = generators::complete(4, 3).unwrap();
        let s = scattering_matrix(&k4, c(-1.0)).unwrap();
        assert!((s.matrix - CMatrix::identity(3, 3)).iter().all(|x| x.norm() < 1e-12));

        let c6 = generators::cycle(6, &[0, 1, 3]).unwrap();
        let part = c6.bipartition().unwrap();
        let s = scattering_matrix(&c6, c(-1.0)).unwrap();
        let signs: Vec<f64> = c6.boundary().iter().map(|&u| part.sign(u)).collect();
        let gr = grover_matrix(3);
        for i in 0..3 {
            for j in 0..3 {
                let want = -gr[(i, j)] * signs[i] * signs[j];
                assert!((s.matrix[(i, j)] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn outflow_examples() {
        let g = generators::complete(4, 2).unwrap();
        let beta = outflow(&g, c(1.0), &Inflow::from_real(&[1.0, 0.0])).unwrap();
        assert!(beta[0].norm() < 1e-12 && (beta[1] - c(1.0)).norm() < 1e-12);

        let zero = outflow(&g, unit(0.4), &Inflow::from_real(&[0.0, 0.0])).unwrap();
        assert!(zero.iter().all(|x| x.norm() == 0.0));

        let inflow = Inflow::new(vec![Complex64::new(0.3, -1.2), c(0.8)]);
        let z = unit(2.2);
        let beta = outflow(&g, z, &inflow).unwrap();
        let via_s = scattering_matrix(&g, z).unwrap().apply(inflow.amplitudes());
        assert!(crate::state::max_abs_diff(&beta, &via_s) < 1e-12);
        assert!((beta.norm() - inflow.boundary_vector().norm()).abs() < 1e-12);
    }

    #[test]
    fn comfortability_examples() {
        let g = generators::complete(4, 2).unwrap();
        let e1 = Inflow::from_real(&[1.0, 0.0]);
        let at0 = comfortability(&g, c(1.0), &e1).unwrap();
        assert!((at0.value - 13.0 / 8.0).abs() < 1e-12);
        assert!(at0.quadratic_form.is_none());
        let at_pi = comfortability(&g, c(-1.0), &e1).unwrap();
        assert!((at_pi.value - 5.0 / 12.0).abs() < 1e-12);

        let regular = comfortability(&g, unit(1.0), &e1).unwrap();
        assert!(regular.discrepancy.unwrap() < 1e-12);

        let p2 = generators::path(2, &[0, 1]).unwrap();
        let e = comfortability(&p2, unit(PI / 2.0), &Inflow::from_real(&[1.0, 0.0])).unwrap();
        assert!((e.value - 0.5).abs() < 1e-14);
        assert!((e.quadratic_form.unwrap() - 0.5).abs() < 1e-14);
    }
}

//! Self-check suites behind `gw verify`. Each suite returns a list of named
//! pass/fail checks with a short human-readable detail.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complete::{self, CompleteGraphParams};
use crate::error::{Error, Result};
use crate::generators;
use crate::graph::Graph;
use crate::observables::{self, grover_matrix};
use crate::state::Inflow;
use crate::stationary::StationarySolver;
use crate::walk::{self, IterationOptions};
use crate::{unit, CMatrix, Complex64};

pub const SUITES: &[&str] = &["oracle", "unitarity", "pm1", "singular", "complete", "all"];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }

    fn from_result(name: impl Into<String>, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((pass, detail)) => Self::new(name, pass, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub graphs: usize,
    pub max_n: usize,
    pub thetas: usize,
    /// Complete-graph sizes for the `complete` suite.
    pub complete_sizes: Vec<usize>,
    pub iteration: IterationOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 2024,
            graphs: 12,
            max_n: 8,
            thetas: 36,
            complete_sizes: (4..=6).collect(),
            iteration: IterationOptions::default(),
        }
    }
}

/// Runs a named suite (see [`SUITES`]).
pub fn run(suite: &str, opts: &VerifyOptions) -> Result<Report> {
    let checks = match suite {
        "oracle" => oracle_suite(opts),
        "unitarity" => unitarity_suite(opts),
        "pm1" => pm1_suite(opts),
        "singular" => singular_suite(opts),
        "complete" => complete_suite(opts),
        "all" => {
            let mut all = oracle_suite(opts);
            all.extend(unitarity_suite(opts));
            all.extend(pm1_suite(opts));
            all.extend(singular_suite(opts));
            all.extend(complete_suite(opts));
            all
        }
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(Report {
        suite: suite.to_string(),
        checks,
    })
}

fn ensemble(opts: &VerifyOptions) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    generators::random_ensemble(&mut rng, opts.graphs, opts.max_n)
}

/// Grid on `(−π, π]` with the graph's singular frequencies added.
fn frequencies(solver: &StationarySolver<'_>, count: usize) -> Vec<f64> {
    let mut t: Vec<f64> = complete::theta_grid(count)
        .into_iter()
        .map(crate::laplacian::wrap)
        .collect();
    t.extend(solver.singular_set().thetas());
    t
}

fn oracle_suite(opts: &VerifyOptions) -> Vec<Check> {
    ensemble(opts)
        .iter()
        .enumerate()
        .map(|(i, g)| {
            Check::from_result(
                format!("oracle/graph{i}"),
                (|| {
                    let solver = StationarySolver::new(g)?;
                    let inflow = Inflow::basis(g.boundary_count(), 0);
                    let mut worst = 0.0f64;
                    for theta in frequencies(&solver, opts.thetas) {
                        let z = unit(theta);
                        let direct = solver.state(z, &inflow)?;
                        let iterated = walk::iterate_to_stationary(g, &inflow, direct.z, opts.iteration)?;
                        worst = worst.max(direct.max_abs_diff(&iterated.state));
                    }
                    Ok((
                        worst < 1e-6,
                        format!("N={} r={} max |Δφ| = {worst:.2e}", g.vertex_count(), g.boundary_count()),
                    ))
                })(),
            )
        })
        .collect()
}

fn unitarity_suite(opts: &VerifyOptions) -> Vec<Check> {
    ensemble(opts)
        .iter()
        .enumerate()
        .map(|(i, g)| {
            Check::from_result(
                format!("unitarity/graph{i}"),
                (|| {
                    let solver = StationarySolver::new(g)?;
                    let mut worst = 0.0f64;
                    for theta in frequencies(&solver, opts.thetas) {
                        let s = observables::scattering_with(&solver, unit(theta))?;
                        worst = worst.max(s.unitarity_defect());
                    }
                    Ok((worst < 1e-9, format!("max ‖SS†−I‖ = {worst:.2e}")))
                })(),
            )
        })
        .collect()
}

fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `S₋₁` predicted from the bipartition: `−Σ Gr Σ` with `Σ = diag(±1)` the
/// side signs of the boundary vertices, or the identity if not bipartite.
pub fn expected_s_minus_one(g: &Graph) -> CMatrix {
    let r = g.boundary_count();
    match g.bipartition() {
        Some(part) => {
            let signs: Vec<f64> = g.boundary().iter().map(|&u| part.sign(u)).collect();
            let gr = grover_matrix(r);
            CMatrix::from_fn(r, r, |i, j| -gr[(i, j)] * signs[i] * signs[j])
        }
        None => CMatrix::identity(r, r),
    }
}

fn pm1_suite(opts: &VerifyOptions) -> Vec<Check> {
    ensemble(opts)
        .iter()
        .enumerate()
        .map(|(i, g)| {
            Check::from_result(
                format!("pm1/graph{i}"),
                (|| {
                    let s1 = observables::scattering_matrix(g, Complex64::new(1.0, 0.0))?;
                    let sm1 = observables::scattering_matrix(g, Complex64::new(-1.0, 0.0))?;
                    let d1 = max_entry_diff(&s1.matrix, &grover_matrix(g.boundary_count()));
                    let dm1 = max_entry_diff(&sm1.matrix, &expected_s_minus_one(g));
                    let kind = if g.bipartition().is_some() {
                        "bipartite"
                    } else {
                        "non-bipartite"
                    };
                    Ok((
                        d1 < 1e-8 && dm1 < 1e-8,
                        format!("{kind}: |S₁−Gr| = {d1:.2e}, |S₋₁−expected| = {dm1:.2e}"),
                    ))
                })(),
            )
        })
        .collect()
}

fn singular_suite(opts: &VerifyOptions) -> Vec<Check> {
    let mut checks: Vec<Check> = ensemble(opts)
        .iter()
        .enumerate()
        .map(|(i, g)| {
            Check::from_result(
                format!("singular/graph{i}"),
                (|| {
                    let set = crate::laplacian::singular_set(g, 1e-8)?;
                    let smin = walk::smallest_singular_value(g);
                    let zero_in_spec = smin < 1e-9;
                    let leaf = g.has_boundary_leaf();
                    Ok((
                        zero_in_spec == leaf,
                        format!(
                            "|𝔹*∩∂𝔻| = {}, boundary leaf = {leaf}, σ_min(E) = {smin:.2e}",
                            set.members.len()
                        ),
                    ))
                })(),
            )
        })
        .collect();
    checks.push(Check::from_result(
        "singular/k4_l2_members",
        (|| {
            let g = generators::complete(4, 2)?;
            let t = crate::laplacian::singular_set(&g, 1e-8)?.thetas();
            let ts = complete::theta_star(4);
            let want = [-ts, 0.0, ts, std::f64::consts::PI];
            let ok = t.len() == 4 && t.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-8);
            Ok((ok, format!("{t:?}")))
        })(),
    ));
    checks
}

fn complete_suite(opts: &VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(Check::from_result(
        "complete/k4_l2_values",
        (|| {
            let g = generators::complete(4, 2)?;
            let inflow = Inflow::basis(2, 0);
            let e0 = observables::comfortability(&g, Complex64::new(1.0, 0.0), &inflow)?.value;
            let epi = observables::comfortability(&g, Complex64::new(-1.0, 0.0), &inflow)?.value;
            let ok = (e0 - 13.0 / 8.0).abs() < 1e-8 && (epi - 5.0 / 12.0).abs() < 1e-8;
            Ok((ok, format!("E(0) = {e0}, E(π) = {epi}")))
        })(),
    ));
    for &n in &opts.complete_sizes {
        checks.push(Check::from_result(
            format!("complete/N{n}/forests"),
            (|| {
                if n > 7 {
                    let ok = complete::binomial_forest_sum(n as u64) == 2 * (n as u128).pow(n as u32 - 3);
                    return Ok((ok, "binomial identity only".to_string()));
                }
                let f = complete::spanning_forest_check(n)?;
                let ok = f.cayley_ok && f.chi2_ok && f.binomial_ok && f.energy_residual < 1e-10;
                Ok((
                    ok,
                    format!(
                        "χ₁ = {}, χ₂ = {} ({}), energy residual {:.1e}",
                        f.chi1, f.chi2, f.method, f.energy_residual
                    ),
                ))
            })(),
        ));
        checks.push(Check::from_result(
            format!("complete/N{n}/closed_vs_generic"),
            (|| {
                let mut worst = 0.0f64;
                for l in 1..=n {
                    let g = generators::complete(n, l)?;
                    let solver = StationarySolver::new(&g)?;
                    let inflow = Inflow::basis(l, 0);
                    for theta in frequencies(&solver, 24) {
                        let p = CompleteGraphParams::new(n, l, theta)?;
                        let s = observables::scattering_with(&solver, p.z())?;
                        let e = observables::comfortability_with(&solver, p.z(), &inflow)?.value;
                        worst = worst
                            .max(max_entry_diff(&s.matrix, &complete::closed_scattering(&p).matrix))
                            .max((e - complete::closed_comfortability(&p)).abs());
                    }
                }
                Ok((worst < 1e-8, format!("max deviation {worst:.2e}")))
            })(),
        ));
        checks.push(Check::from_result(
            format!("complete/N{n}/perfect_reflection"),
            (|| {
                let ts = complete::theta_star(n);
                let mut ok = true;
                let mut detail = String::new();
                for l in 1..=n.saturating_sub(2) {
                    let g = generators::complete(n, l)?;
                    let solver = StationarySolver::new(&g)?;
                    for t in [std::f64::consts::PI, ts, -ts] {
                        let off = observables::scattering_with(&solver, unit(t))?.off_diagonal_max();
                        if off >= 1e-8 {
                            ok = false;
                            detail.push_str(&format!("ℓ={l} θ={t:.4}: {off:.1e}; "));
                        }
                    }
                }
                if detail.is_empty() {
                    detail = "off-diagonal below 1e-8 at π and ±θ*".into();
                }
                Ok((ok, detail))
            })(),
        ));
        checks.push(Check::from_result(
            format!("complete/N{n}/monotonicity"),
            (|| {
                let rep = complete::monotonicity_and_extremes(n, 720)?;
                Ok((
                    rep.passed(),
                    format!(
                        "{} bottom-curve violations, argmin at π: {}, θ* chain ordered: {}",
                        rep.bottom_curve_violations.len(),
                        rep.argmin_at_pi,
                        rep.theta_star_chain_ok
                    ),
                ))
            })(),
        ));
    }
    checks
}

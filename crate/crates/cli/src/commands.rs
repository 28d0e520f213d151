//! Subcommand implementations and output formatting.

use std::fmt::Write as _;
use std::path::Path;

use gwalk_core::observables::{self, ComfortabilityResult};
use gwalk_core::verify::{self, VerifyOptions};
use gwalk_core::walk::{self, IterationOptions};
use gwalk_core::{unit, Complex64, Graph, Inflow, StationarySolver};
use rayon::prelude::*;
use serde::Serialize;

use crate::input::{self, ThetaToken};
use crate::{CliError, Common, Format, Single};

/// Fixed 17-significant-digit formatting for byte-stable CSV.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn graph_of(common: &Common) -> Result<Graph, CliError> {
    let source = common
        .graph
        .as_deref()
        .ok_or_else(|| CliError::Input("--graph is required".into()))?;
    input::load_graph(source)
}

/// Loads the graph, builds the solver and resolves inflow and θ.
fn setup(single: &Single) -> Result<(Graph, Inflow, ThetaToken), CliError> {
    let g = graph_of(&single.common)?;
    let inflow = input::parse_inflow(&single.common.inflow, &g)?;
    let token = ThetaToken::parse(&single.theta)?;
    Ok((g, inflow, token))
}

#[derive(Serialize)]
struct ArcRow {
    arc_id: usize,
    origin: usize,
    terminus: usize,
    re: f64,
    im: f64,
    abs2: f64,
}

#[derive(Serialize)]
struct StationaryReport {
    theta: f64,
    singular: bool,
    iterations: Option<usize>,
    comfortability: f64,
    arcs: Vec<ArcRow>,
}

pub fn stationary(single: &Single, iterate: bool) -> Result<u8, CliError> {
    let (g, inflow, token) = setup(single)?;
    let solver = StationarySolver::new(&g)?;
    let theta = token.resolve(solver.singular_set())?;
    let z = unit(theta);
    let (state, iterations) = if iterate {
        let opts = IterationOptions {
            tol: single.common.tol,
            max_iter: single.common.max_iter,
        };
        let it = walk::iterate_to_stationary(&g, &inflow, z, opts)?;
        eprintln!(
            "converged after {} iterations (last step {:.3e})",
            it.iterations, it.last_delta
        );
        (it.state, Some(it.iterations))
    } else {
        (solver.state(z, &inflow)?, None)
    };
    let rows: Vec<ArcRow> = g
        .arcs()
        .iter()
        .enumerate()
        .map(|(a, arc)| {
            let v = state.values[a];
            ArcRow {
                arc_id: a,
                origin: arc.origin,
                terminus: arc.terminus,
                re: v.re,
                im: v.im,
                abs2: v.norm_sqr(),
            }
        })
        .collect();
    let text = match single.common.format {
        Format::Csv => {
            let mut s = String::from("arc_id,origin,terminus,re,im,abs2\n");
            for r in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.arc_id,
                    r.origin,
                    r.terminus,
                    num(r.re),
                    num(r.im),
                    num(r.abs2)
                )
                .unwrap();
            }
            s
        }
        Format::Json => to_json(&StationaryReport {
            theta,
            singular: solver.is_singular(z),
            iterations,
            comfortability: state.comfortability(),
            arcs: rows,
        }),
    };
    emit(single.common.out.as_deref(), &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct ScatterReport {
    theta: f64,
    singular: bool,
    unitarity_defect: f64,
    /// Entries as `[re, im]`, row-major.
    matrix: Vec<Vec<[f64; 2]>>,
}

pub fn scatter(single: &Single) -> Result<u8, CliError> {
    let (g, _, token) = setup(single)?;
    let solver = StationarySolver::new(&g)?;
    let theta = token.resolve(solver.singular_set())?;
    let z = unit(theta);
    let s = observables::scattering_with(&solver, z)?;
    let r = s.dim();
    let text = match single.common.format {
        Format::Csv => {
            let mut out = String::from("row,col,re,im,abs2\n");
            for i in 0..r {
                for j in 0..r {
                    let v: Complex64 = s.matrix[(i, j)];
                    writeln!(out, "{i},{j},{},{},{}", num(v.re), num(v.im), num(v.norm_sqr())).unwrap();
                }
            }
            out
        }
        Format::Json => to_json(&ScatterReport {
            theta,
            singular: solver.is_singular(z),
            unitarity_defect: s.unitarity_defect(),
            matrix: (0..r)
                .map(|i| (0..r).map(|j| [s.matrix[(i, j)].re, s.matrix[(i, j)].im]).collect())
                .collect(),
        }),
    };
    emit(single.common.out.as_deref(), &text)?;
    Ok(0)
}

fn optional(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn comfort(single: &Single) -> Result<u8, CliError> {
    let (g, inflow, token) = setup(single)?;
    let solver = StationarySolver::new(&g)?;
    let theta = token.resolve(solver.singular_set())?;
    let e: ComfortabilityResult = observables::comfortability_with(&solver, unit(theta), &inflow)?;
    let text = match single.common.format {
        Format::Csv => format!(
            "theta,comfortability,quadratic_form,discrepancy\n{},{},{},{}\n",
            num(e.theta),
            num(e.value),
            optional(e.quadratic_form),
            optional(e.discrepancy)
        ),
        Format::Json => to_json(&e),
    };
    emit(single.common.out.as_deref(), &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct SweepRow {
    theta: f64,
    comfortability: f64,
    /// `|S_ij|²`; the diagonal holds the reflection probabilities.
    rates: Vec<Vec<f64>>,
    is_singular: bool,
}

fn sweep_header(r: usize) -> String {
    let mut cols = vec!["theta".to_string(), "comfortability".to_string()];
    for i in 0..r {
        for j in (0..r).filter(|&j| j != i) {
            cols.push(format!("transmit_rate_{i}_{j}"));
        }
    }
    cols.extend((0..r).map(|j| format!("reflect_abs2_{j}_{j}")));
    cols.push("is_singular".into());
    cols.join(",")
}

pub fn sweep(common: &Common, thetas: &str) -> Result<u8, CliError> {
    let g = graph_of(common)?;
    let inflow = input::parse_inflow(&common.inflow, &g)?;
    let tokens = input::parse_thetas(thetas)?;
    if tokens.len() < 2 {
        return Err(CliError::Input("sweep needs at least two θ values".into()));
    }
    let solver = StationarySolver::new(&g)?;
    let mut grid = tokens
        .into_iter()
        .map(|t| t.resolve(solver.singular_set()))
        .collect::<Result<Vec<f64>, _>>()?;
    grid.sort_by(f64::total_cmp);

    let r = g.boundary_count();
    let rows = grid
        .par_iter()
        .map(|&theta| -> Result<SweepRow, CliError> {
            let z = unit(theta);
            let e = observables::comfortability_with(&solver, z, &inflow)?;
            let s = observables::scattering_with(&solver, z)?;
            Ok(SweepRow {
                theta,
                comfortability: e.value,
                rates: (0..r)
                    .map(|i| (0..r).map(|j| s.transmitting_rate(i, j)).collect())
                    .collect(),
                is_singular: solver.is_singular(z),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let text = match common.format {
        Format::Csv => {
            let mut s = sweep_header(r);
            s.push('\n');
            for row in &rows {
                let mut fields = vec![num(row.theta), num(row.comfortability)];
                for i in 0..r {
                    fields.extend((0..r).filter(|&j| j != i).map(|j| num(row.rates[i][j])));
                }
                fields.extend((0..r).map(|j| num(row.rates[j][j])));
                fields.push(row.is_singular.to_string());
                s.push_str(&fields.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => to_json(&rows),
    };
    emit(common.out.as_deref(), &text)?;
    Ok(0)
}

/// Parses `a..b`, `a..=b` (both inclusive) or a single size.
fn parse_sizes(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Input(format!("bad size range `{spec}`"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let sizes: Vec<usize> = match spec.split_once("..") {
        Some((a, b)) => (parse(a)?..=parse(b.trim_start_matches('='))?).collect(),
        None => vec![parse(spec)?],
    };
    if sizes.is_empty() || sizes.iter().any(|&n| !(3..=7).contains(&n)) {
        return Err(CliError::Input(format!(
            "complete-graph sizes must lie in 3..=7, got `{spec}`"
        )));
    }
    Ok(sizes)
}

pub fn verify(
    common: &Common,
    suite: &str,
    sizes: Option<&str>,
    seed: Option<u64>,
    graphs: Option<usize>,
) -> Result<u8, CliError> {
    if !verify::SUITES.contains(&suite) {
        return Err(CliError::Input(format!(
            "unknown suite `{suite}`; expected one of {}",
            verify::SUITES.join(", ")
        )));
    }
    let mut opts = VerifyOptions {
        iteration: IterationOptions {
            tol: common.tol,
            max_iter: common.max_iter,
        },
        ..VerifyOptions::default()
    };
    if let Some(spec) = sizes {
        opts.complete_sizes = parse_sizes(spec)?;
    }
    if let Some(seed) = seed {
        opts.seed = seed;
    }
    if let Some(graphs) = graphs {
        opts.graphs = graphs;
    }
    let report = verify::run(suite, &opts)?;
    for c in &report.checks {
        eprintln!("{}  {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    eprintln!(
        "{} of {} checks passed",
        report.checks.len() - failed,
        report.checks.len()
    );
    emit(common.out.as_deref(), &to_json(&report))?;
    Ok(if report.passed() { 0 } else { 1 })
}

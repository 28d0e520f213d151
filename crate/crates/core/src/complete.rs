//! Closed forms for the complete graph `K_N` with boundary `{0, …, ℓ-1}` and
//! inflow entering at vertex `0`.
//!
//! With `α = −1 − (N−1) cos θ` and `β = α + i sin θ` the generalized Laplacian
//! is `J + diag(β, …, β, α, …, α)`: the all-ones matrix plus `ℓ` diagonal
//! entries `β` on the boundary and `m = N − ℓ` entries `α` inside.
//! Everything here follows from that rank-one-plus-diagonal structure.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laplacian::wrap;
use crate::observables::ScatteringMatrix;
use crate::{unit, CMatrix, Complex64};

/// Distance in `θ` within which the explicit limit values are used.
pub const SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompleteGraphParams {
    pub n: usize,
    pub l: usize,
    pub theta: f64,
}

impl CompleteGraphParams {
    pub fn new(n: usize, l: usize, theta: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::CompleteParams(format!("need N ≥ 3, got {n}")));
        }
        if l == 0 || l > n {
            return Err(Error::CompleteParams(format!("need 1 ≤ ℓ ≤ N, got ℓ = {l}, N = {n}")));
        }
        if !theta.is_finite() {
            return Err(Error::CompleteParams("θ must be finite".into()));
        }
        Ok(Self {
            n,
            l,
            theta: wrap(theta),
        })
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self {
            theta: wrap(theta),
            ..self
        }
    }

    pub fn m(&self) -> usize {
        self.n - self.l
    }

    pub fn z(&self) -> Complex64 {
        unit(self.theta)
    }

    pub fn alpha(&self) -> f64 {
        -1.0 - (self.n as f64 - 1.0) * self.theta.cos()
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::new(self.alpha(), self.theta.sin())
    }

    /// `θ* = arccos(−1/(N−1))`.
    pub fn theta_star(&self) -> f64 {
        theta_star(self.n)
    }

    /// `αβ + ℓα + mβ`.
    fn cubic_factor(&self) -> Complex64 {
        let a = self.alpha();
        let b = self.beta();
        a * b + self.l as f64 * a + self.m() as f64 * b
    }

    /// `x = −(α/β) / (αβ + αℓ + βm)`.
    pub fn x(&self) -> Complex64 {
        -(self.alpha() / self.beta()) / self.cubic_factor()
    }

    /// `y = 1/β`.
    pub fn y(&self) -> Complex64 {
        1.0 / self.beta()
    }

    fn near(&self, target: f64) -> bool {
        wrap(self.theta - target).abs() < SNAP
    }
}

pub fn theta_star(n: usize) -> f64 {
    (-1.0 / (n as f64 - 1.0)).acos()
}

/// `det L(θ) = β^ℓ α^m + ℓ β^{ℓ−1} α^m + m β^ℓ α^{m−1}`.
pub fn closed_determinant(p: &CompleteGraphParams) -> Complex64 {
    let a = Complex64::new(p.alpha(), 0.0);
    let b = p.beta();
    let (l, m) = (p.l as i32, p.m() as i32);
    let mut det = b.powi(l) * a.powi(m) + p.l as f64 * b.powi(l - 1) * a.powi(m);
    if m > 0 {
        det += p.m() as f64 * b.powi(l) * a.powi(m - 1);
    }
    det
}

/// Entry-wise closed inverse of `L(θ)`; fails where `βα(βα + ℓα + mβ) = 0`.
pub fn closed_inverse(p: &CompleteGraphParams) -> Result<CMatrix> {
    let a = Complex64::new(p.alpha(), 0.0);
    let b = p.beta();
    let (l, m) = (p.l as f64, p.m() as f64);
    let denom = b * a * p.cubic_factor();
    if denom.norm() < 1e-12 {
        return Err(Error::Singular("complete-graph Laplacian"));
    }
    let n = p.n;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let (bi, bj) = (i < p.l, j < p.l);
        let num = match (bi, bj, i == j) {
            (true, true, true) => b * a * a + (l - 1.0) * a * a + m * b * a,
            (true, true, false) => -a * a,
            (false, false, true) => a * b * b + (m - 1.0) * b * b + l * b * a,
            (false, false, false) => -b * b,
            _ => -b * a,
        };
        num / denom
    }))
}

/// Closed scattering matrix; exact limit values at `θ ∈ {0, π, ±θ*}`.
pub fn closed_scattering(p: &CompleteGraphParams) -> ScatteringMatrix {
    let l = p.l;
    let z = p.z();
    let ident = CMatrix::identity(l, l);
    let ones = CMatrix::from_element(l, l, Complex64::new(1.0, 0.0));
    let ts = p.theta_star();
    let matrix = if p.near(0.0) {
        ones * Complex64::new(2.0 / l as f64, 0.0) - ident
    } else if p.near(std::f64::consts::PI) {
        ident
    } else if p.near(ts) || p.near(-ts) {
        let t = if p.near(ts) { ts } else { -ts };
        let zs = unit(t);
        if p.m() >= 1 {
            ident * zs
        } else {
            let c = -2.0 / Complex64::new(p.n as f64, t.sin());
            (ones * c + ident) * zs
        }
    } else {
        let s = p.theta.sin();
        let i2s = Complex64::new(0.0, 2.0 * s);
        (ones * (i2s * p.x()) + ident * (i2s * p.y() - 1.0)) * z
    };
    let z = if p.near(std::f64::consts::PI) {
        Complex64::new(-1.0, 0.0)
    } else {
        z
    };
    ScatteringMatrix { matrix, z }
}

/// `e^{iθ̃}` for a single tail (`ℓ = 1`), where `S_θ = e^{i(θ + θ̃)}`.
pub fn single_tail_phase(n: usize, theta: f64) -> Complex64 {
    let nf = n as f64;
    let a = -1.0 - (nf - 1.0) * theta.cos();
    let u = (a + nf - 1.0).powi(2) * (nf - 2.0 - a);
    let v = a * a * (a + nf) * (nf - 1.0).powi(2);
    let den = u + v;
    let cos = (u - v) / den;
    let sin = 2.0 * a * (a + nf - 1.0) * (nf - 1.0).powi(2) * theta.sin() / den;
    Complex64::new(cos, sin)
}

/// `L(θ)⁻¹ e₁ = [p, q, …, q, r, …, r]` for regular `θ`.
pub fn pqr(p: &CompleteGraphParams) -> Result<(Complex64, Complex64, Complex64)> {
    let a = Complex64::new(p.alpha(), 0.0);
    let b = p.beta();
    let (l, m) = (p.l as f64, p.m() as f64);
    let denom = a * b * p.cubic_factor();
    if denom.norm() < 1e-12 {
        return Err(Error::Singular("complete-graph Laplacian"));
    }
    Ok((
        (b * a * a + (l - 1.0) * a * a + m * b * a) / denom,
        -a * a / denom,
        -a * b / denom,
    ))
}

/// `(N−1+cos θ)(|p|² + (ℓ−1)|q|² + m|r|²) − cos θ |p + (ℓ−1)q + mr|²`.
pub fn comfortability_pqr(p: &CompleteGraphParams) -> Result<f64> {
    let (pp, q, r) = pqr(p)?;
    let (l, m) = (p.l as f64, p.m() as f64);
    let c = p.theta.cos();
    let sq = pp.norm_sqr() + (l - 1.0) * q.norm_sqr() + m * r.norm_sqr();
    let sum = pp + (l - 1.0) * q + m * r;
    Ok((p.n as f64 - 1.0 + c) * sq - c * sum.norm_sqr())
}

fn f1(a: f64, n: f64) -> f64 {
    (n - 1.0).powi(2) * (a * (n * n - 4.0 * n + 2.0) + (n - 2.0) * (n * n - n + 1.0))
}

fn f2(a: f64, n: f64) -> f64 {
    (a - n + 2.0) * (a - n * n + 2.0 * n)
}

fn f3(a: f64, n: f64) -> f64 {
    n * (n - 2.0) * a + n.powi(3) - 2.0 * n * n + 2.0 * n - 2.0
}

/// Comfortability as a rational function of `α`; finite on all of `[−N, N−2]`,
/// so it needs no special cases at the singular frequencies. For `ℓ = N` the
/// common factor `α²` is cancelled first.
pub fn closed_comfortability(p: &CompleteGraphParams) -> f64 {
    comfortability_at_alpha(p.n, p.m(), p.alpha())
}

/// [`closed_comfortability`] evaluated directly at a given `α`.
pub fn comfortability_at_alpha(n: usize, m: usize, a: f64) -> f64 {
    let nf = n as f64;
    if m == 0 {
        // the α² factor cancels; evaluating the general form would give 0/0 at α = 0
        let d1 = nf * (nf - 2.0) * (a * a + 1.0) - 2.0 * a;
        return (nf - 1.0) * f1(a, nf) / (d1 * f3(a, nf));
    }
    let mf = m as f64;
    let num = (nf - 1.0) * (a * a * f1(a, nf) + mf * (2.0 * a + mf + 1.0) * f2(a, nf));
    let d1 = nf * (nf - 2.0) * (a * a + 1.0) - 2.0 * a;
    let d2 = a * a * f3(a, nf) - mf * (a - nf + 2.0) * (2.0 * a + mf);
    num / (d1 * d2)
}

/// `E(0) = N(N−1)/(2ℓ²) + (ℓ−1)/(ℓN)`.
pub fn comfortability_at_zero(n: usize, l: usize) -> f64 {
    let (nf, lf) = (n as f64, l as f64);
    nf * (nf - 1.0) / (2.0 * lf * lf) + (lf - 1.0) / (lf * nf)
}

/// `E(±π/2)`.
pub fn comfortability_at_half_pi(n: usize, l: usize) -> f64 {
    let (nf, mf) = (n as f64, (n - l) as f64);
    (nf - 1.0) * (nf * nf - 3.0 * nf + 4.0 + mf * (mf - 1.0)) / (2.0 * ((nf - 1.0).powi(2) + (mf - 1.0).powi(2)))
}

/// `E(±θ*)`.
pub fn comfortability_at_theta_star(n: usize, l: usize) -> f64 {
    let nf = n as f64;
    let m = n - l;
    if m != 0 {
        (m as f64 + 1.0) / m as f64 * (nf - 1.0)
    } else {
        (nf - 1.0).powi(3) * (nf * nf - nf + 1.0) / (nf * (nf.powi(3) - 2.0 * nf * nf + 2.0 * nf - 2.0))
    }
}

/// `E(π) = (2N−3)/(2(N−1)(N−2))`, independent of `ℓ`.
pub fn comfortability_at_pi(n: usize) -> f64 {
    let nf = n as f64;
    (2.0 * nf - 3.0) / (2.0 * (nf - 1.0) * (nf - 2.0))
}

// ---------------------------------------------------------------------------
// Spanning forests

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let next = self.0[x];
            self.0[x] = r;
            x = next;
        }
        r
    }

    /// Returns false if `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

fn complete_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).tuple_combinations().collect()
}

/// `(χ₁, χ₂)` for `K_N` by exhaustive enumeration of edge subsets: spanning
/// trees, and two-tree spanning forests separating vertex `0` from `N−1`.
pub fn enumerate_forests(n: usize) -> (u64, u64) {
    let edges = complete_edges(n);
    let acyclic = |subset: &[&(usize, usize)]| -> Option<UnionFind> {
        let mut uf = UnionFind::new(n);
        subset.iter().all(|&&(a, b)| uf.union(a, b)).then_some(uf)
    };
    let trees = edges
        .iter()
        .combinations(n - 1)
        .filter(|s| acyclic(s).is_some())
        .count() as u64;
    let forests = edges
        .iter()
        .combinations(n - 2)
        .filter(|s| match acyclic(s) {
            Some(mut uf) => uf.find(0) != uf.find(n - 1),
            None => false,
        })
        .count() as u64;
    (trees, forests)
}

/// Exact integer determinant by fraction-free Gaussian elimination.
pub fn bareiss_determinant(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// `(χ₁, χ₂)` by the all-minors matrix-tree theorem: `χ₁` is any principal
/// cofactor of the Laplacian, `χ₂` the minor with rows and columns `0` and
/// `N−1` removed.
pub fn matrix_tree_forests(n: usize) -> (u64, u64) {
    let lap = |keep: &dyn Fn(usize) -> bool| -> Vec<Vec<i128>> {
        let idx: Vec<usize> = (0..n).filter(|&i| keep(i)).collect();
        idx.iter()
            .map(|&i| idx.iter().map(|&j| if i == j { n as i128 - 1 } else { -1 }).collect())
            .collect()
    };
    let chi1 = bareiss_determinant(lap(&|i| i != 0));
    let chi2 = bareiss_determinant(lap(&|i| i != 0 && i != n - 1));
    (chi1 as u64, chi2 as u64)
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `x^{x−2}` for `x ≥ 1`, with `1^{−1} = 1`.
fn tree_power(x: u64) -> u128 {
    if x <= 1 {
        1
    } else {
        (x as u128).pow((x - 2) as u32)
    }
}

/// `Σ_{k=1}^{N−1} C(N−2, k−1) k^{k−2} (N−k)^{N−k−2}`.
pub fn binomial_forest_sum(n: u64) -> u128 {
    (1..n)
        .map(|k| binomial(n - 2, k - 1) * tree_power(k) * tree_power(n - k))
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct ForestCheck {
    pub n: usize,
    pub chi1: u64,
    pub chi2: u64,
    pub method: &'static str,
    pub cayley_ok: bool,
    pub chi2_ok: bool,
    pub binomial_ok: bool,
    /// `|E(0)|_{ℓ=2} − ¼(χ₂/χ₁ + |E|)|`.
    pub energy_residual: f64,
}

/// Counts forests (enumeration for `N ≤ 5`, matrix-tree for larger `N`) and
/// checks them against `N^{N−2}`, `2N^{N−3}` and the `θ = 0` comfortability.
pub fn spanning_forest_check(n: usize) -> Result<ForestCheck> {
    if !(3..=7).contains(&n) {
        return Err(Error::CompleteParams(format!(
            "forest check supports 3 ≤ N ≤ 7, got {n}"
        )));
    }
    let (method, (chi1, chi2)) = if n <= 5 {
        ("enumeration", enumerate_forests(n))
    } else {
        ("matrix-tree", matrix_tree_forests(n))
    };
    let nn = n as u64;
    let edges = (n * (n - 1) / 2) as f64;
    let energy = closed_comfortability(&CompleteGraphParams::new(n, 2, 0.0)?);
    Ok(ForestCheck {
        n,
        chi1,
        chi2,
        method,
        cayley_ok: chi1 == nn.pow(n as u32 - 2),
        chi2_ok: chi2 == 2 * nn.pow(n as u32 - 3),
        binomial_ok: binomial_forest_sum(nn) == 2 * (nn as u128).pow(n as u32 - 3),
        energy_residual: (energy - 0.25 * (chi2 as f64 / chi1 as f64 + edges)).abs(),
    })
}

// ---------------------------------------------------------------------------
// Ordering and extremes over a frequency grid

/// `count` equally spaced angles on `[−π, π)`.
pub fn theta_grid(count: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    (0..count).map(|k| -PI + 2.0 * PI * k as f64 / count as f64).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub n: usize,
    pub l: usize,
    pub theta: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub n: usize,
    pub grid: usize,
    /// Points where `E(θ, ℓ=N) > E(θ, ℓ=s)` for some `s < N`.
    pub bottom_curve_violations: Vec<Violation>,
    /// Grid minimizer of `E(·, ℓ)` for each `ℓ = 1..=N`.
    pub argmin: Vec<(usize, f64, f64)>,
    /// Whether every minimizer is within one grid step of `±π`; only asserted for `N ≥ 4`.
    pub argmin_at_pi: bool,
    /// `E(θ*)` for `m = 1, …, N−1, 0`, which should be strictly decreasing.
    pub theta_star_chain: Vec<(usize, f64)>,
    pub theta_star_chain_ok: bool,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.bottom_curve_violations.is_empty() && (self.n < 4 || self.argmin_at_pi) && self.theta_star_chain_ok
    }
}

/// Checks on a `grid`-point frequency grid that `ℓ = N` is the bottom curve,
/// that `θ = π` minimizes the comfortability, and the ordering at `θ*`.
pub fn monotonicity_and_extremes(n: usize, grid: usize) -> Result<MonotonicityReport> {
    CompleteGraphParams::new(n, n, 0.0)?;
    let thetas = theta_grid(grid);
    let step = 2.0 * std::f64::consts::PI / grid as f64;
    let curves: Vec<Vec<f64>> = (1..=n)
        .map(|l| {
            thetas
                .iter()
                .map(|&t| comfortability_at_alpha(n, n - l, -1.0 - (n as f64 - 1.0) * t.cos()))
                .collect()
        })
        .collect();

    let bottom = &curves[n - 1];
    let mut bottom_curve_violations = Vec::new();
    for (k, &t) in thetas.iter().enumerate() {
        for s in 1..n {
            let other = curves[s - 1][k];
            if bottom[k] > other + 1e-12 * other.abs().max(1.0) {
                bottom_curve_violations.push(Violation {
                    n,
                    l: s,
                    theta: t,
                    detail: format!("E(ℓ=N) = {} > E(ℓ={s}) = {other}", bottom[k]),
                });
            }
        }
    }

    let argmin: Vec<(usize, f64, f64)> = curves
        .iter()
        .enumerate()
        .map(|(i, curve)| {
            let (k, &v) = curve
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("non-empty grid");
            (i + 1, thetas[k], v)
        })
        .collect();
    let argmin_at_pi = argmin
        .iter()
        .all(|&(_, t, _)| (std::f64::consts::PI - t.abs()) <= step + 1e-12);

    let mut theta_star_chain: Vec<(usize, f64)> = (1..n).map(|m| (m, comfortability_at_alpha(n, m, 0.0))).collect();
    theta_star_chain.push((0, comfortability_at_alpha(n, 0, 0.0)));
    let theta_star_chain_ok = theta_star_chain.windows(2).all(|w| w[0].1 > w[1].1);

    Ok(MonotonicityReport {
        n,
        grid,
        bottom_curve_violations,
        argmin,
        argmin_at_pi,
        theta_star_chain,
        theta_star_chain_ok,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticSample {
    pub n: usize,
    pub l: usize,
    pub theta: f64,
    pub label: &'static str,
    pub value: f64,
    pub reference: f64,
    /// `value / reference`.
    pub ratio: f64,
}

/// Samples the large-`N` behaviour: `E(0) ≈ N²/(2ℓ²)`, `E(π/2) ≈ N/2` and
/// `E(θ) ≈ 1/(N cos²θ)` at the given off-spike angles.
pub fn asymptotic_samples(n: usize, l: usize, off_spike: &[f64]) -> Result<Vec<AsymptoticSample>> {
    let base = CompleteGraphParams::new(n, l, 0.0)?;
    let nf = n as f64;
    let sample = |theta: f64, label, reference: f64| {
        let value = closed_comfortability(&base.with_theta(theta));
        AsymptoticSample {
            n,
            l,
            theta,
            label,
            value,
            reference,
            ratio: value / reference,
        }
    };
    let mut out = vec![
        sample(0.0, "zero", nf * nf / (2.0 * (l * l) as f64)),
        sample(std::f64::consts::FRAC_PI_2, "half_pi", nf / 2.0),
    ];
    for &t in off_spike {
        out.push(sample(t, "off_spike", 1.0 / (nf * t.cos().powi(2))));
    }
    Ok(out)
}

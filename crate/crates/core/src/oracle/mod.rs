//! Numerical ground truth: relative entropy, a projected-gradient minimizer
//! of `S(ρ‖σ′)` over the PPT set, product-state maximization of linear
//! functionals, and the matrix concavity property suite.
//!
//! Nothing here uses the closed-form family construction, so agreement
//! between the two is meaningful.

mod appendix;
mod product;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, trace_inner, trace_product, CMatrix, DensityMatrix, HermitianMatrix,
    Spectrum, RANK_TOL,
};
use crate::lsigma::DividedDifferenceKernel;
use crate::random::{random_hermitian, random_product_vector, seeded};

pub use appendix::{appendix_suite, AppendixReport, Counterexample, PropertyTally};
pub use product::product_state_max;

/// Weight of ρ on ker σ above which `S(ρ‖σ)` is reported as infinite.
pub const SUPPORT_LEAK_TOL: f64 = 1e-10;

/// `S(ρ‖σ) = Tr ρ log ρ − Tr ρ log σ` in nats, `+∞` when the support of ρ
/// is not contained in that of σ.
pub fn rel_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.ensure_same_order(sigma)?;
    let sr = eigh(rho)?;
    let ss = eigh(sigma)?;
    let cut = RANK_TOL * ss.max().max(1.0);
    let w = ss.to_eigenbasis(rho.matrix());
    let mut cross = 0.0;
    let mut leak = 0.0;
    for (i, &l) in ss.eigenvalues.iter().enumerate() {
        let wi = w[(i, i)].re;
        if l > cut {
            cross += wi * l.ln();
        } else {
            leak += wi;
        }
    }
    if leak > SUPPORT_LEAK_TOL {
        return Ok(f64::INFINITY);
    }
    let ent: f64 = sr
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.ln())
        .sum();
    Ok((ent - cross).max(0.0))
}

/// `Tr ρ log ρ` in nats.
fn neg_entropy(rho: &HermitianMatrix) -> Result<f64> {
    Ok(eigh(rho)?
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.ln())
        .sum())
}

/// Settings for [`css_numeric`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub max_iters: usize,
    pub step_init: f64,
    pub armijo_beta: f64,
    pub tol_step: f64,
    pub dykstra_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_iters: 20_000,
            step_init: 1.0,
            armijo_beta: 0.5,
            tol_step: 1e-12,
            dykstra_iters: 500,
            restarts: 4,
            seed: 0,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iters > 0
            && self.step_init > 0.0
            && self.armijo_beta > 0.0
            && self.armijo_beta < 1.0
            && self.tol_step >= 1e-12
            && self.dykstra_iters > 0
            && self.restarts > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("invalid oracle configuration {self:?}")))
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub minimizer: DensityMatrix,
    /// `S(ρ‖σ*)` in nats.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `‖P(σ* − ∇f) − σ*‖_F`, zero exactly at a stationary point.
    pub grad_residual: f64,
    /// Final objective of every restart, in seed order.
    pub restart_objectives: Vec<f64>,
    /// Objective after each accepted iteration of the returned run.
    pub history: Vec<f64>,
}

const ARMIJO_C: f64 = 1e-4;
/// Eigenvalues of iterates below this are treated as exact zeros.
const KERNEL_TOL: f64 = 1e-14;
const STEP_MIN: f64 = 1e-12;
const STEP_MAX: f64 = 1e12;

/// `−Tr ρ log σ′` from the spectrum of σ′; infinite when ρ has weight on
/// the kernel of σ′.
fn cross_term(rho: &CMatrix, spec: &Spectrum) -> f64 {
    let w = spec.to_eigenbasis(rho);
    let mut total = 0.0;
    for (i, &l) in spec.eigenvalues.iter().enumerate() {
        let wi = w[(i, i)].re;
        if l > 0.0 {
            total -= wi * l.ln();
        } else if wi > 1e-15 {
            return f64::INFINITY;
        }
    }
    total
}

/// `∇_σ (−Tr ρ log σ) = −L_σ(ρ)`.
pub fn gradient(rho: &HermitianMatrix, sigma: &HermitianMatrix) -> Result<HermitianMatrix> {
    let k = DividedDifferenceKernel::new(sigma, KERNEL_TOL)?;
    Ok(-&k.apply(rho)?)
}

/// Largest relative discrepancy between `Tr(∇f · X)` and a central
/// difference of `f(σ) = −Tr ρ log σ` along random hermitian directions X.
pub fn gradient_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    directions: usize,
    seed: u64,
) -> Result<f64> {
    let g = gradient(rho, sigma)?;
    let lmin = eigh(sigma)?.min();
    if lmin <= 0.0 {
        return Err(Error::Precondition("gradient check needs σ ≻ 0".into()));
    }
    let mut rng = seeded(seed);
    let f = |s: &HermitianMatrix| -> Result<f64> { Ok(cross_term(rho.matrix(), &eigh(s)?)) };
    let mut worst = 0.0f64;
    for _ in 0..directions {
        let x = random_hermitian(sigma.dims().to_vec(), &mut rng);
        let x = x.scale(1.0 / x.frobenius_norm());
        let h = 1e-4 * lmin;
        let fd = (f(&(sigma.as_hermitian() + &x.scale(h)))?
            - f(&(sigma.as_hermitian() - &x.scale(h)))?)
            / (2.0 * h);
        let an = trace_inner(&g, &x)?;
        worst = worst.max((fd - an).abs() / an.abs().max(1e-300));
    }
    Ok(worst)
}

/// Euclidean projection of a real vector onto the probability simplex.
fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Nearest unit-trace PSD matrix.
fn project_states(m: &CMatrix, dims: &[usize]) -> Result<CMatrix> {
    let spec = eigh(&HermitianMatrix::from_parts_unchecked(dims.to_vec(), m.clone()))?;
    let p = simplex_projection(&spec.eigenvalues);
    let mut u = spec.eigenvectors.clone();
    for (j, &w) in p.iter().enumerate() {
        u.column_mut(j).scale_mut(w.sqrt());
    }
    Ok(&u * u.adjoint())
}

fn min_eig(m: &CMatrix, dims: &[usize]) -> Result<f64> {
    Ok(eigh(&HermitianMatrix::from_parts_unchecked(dims.to_vec(), m.clone()))?.min())
}

/// Dykstra's alternating projections onto `{X ⪰ 0, Tr X = 1}` and
/// `{X^Γ ⪰ 0, Tr X = 1}`.
///
/// A residual PSD violation below 1e-8 is removed by mixing with `I/n`,
/// which lies in both sets; larger violations after `iters` rounds are
/// reported as errors.
pub fn dykstra_project(
    m: &HermitianMatrix,
    parties: &[usize],
    iters: usize,
) -> Result<DensityMatrix> {
    let dims = m.dims().to_vec();
    for &p in parties {
        if p >= dims.len() {
            return Err(Error::PartyOutOfRange {
                index: p,
                parties: dims.len(),
            });
        }
    }
    let pt = |x: &CMatrix| crate::linalg::partial_transpose_raw(x, &dims, parties);
    let n = m.order();
    let tol = 1e-14 * (1.0 + m.frobenius_norm());
    let mut x = m.matrix().clone();
    let mut p = CMatrix::zeros(n, n);
    let mut q = CMatrix::zeros(n, n);
    let mut y_prev: Option<CMatrix> = None;
    for _ in 0..iters {
        let y = project_states(&(&x + &p), &dims)?;
        p = &x + &p - &y;
        let x_new = pt(&project_states(&pt(&(&y + &q)), &dims)?);
        q = &y + &q - &x_new;
        let dx = crate::linalg::fro(&(&x_new - &x));
        let dy = y_prev
            .as_ref()
            .map(|yp| crate::linalg::fro(&(&y - yp)))
            .unwrap_or(f64::INFINITY);
        x = x_new;
        let gap = crate::linalg::fro(&(&x - &y));
        y_prev = Some(y);
        if (dx <= tol && dy <= tol) || gap <= tol {
            break;
        }
    }
    let tr: f64 = (0..n).map(|i| x[(i, i)].re).sum();
    let violation = (-min_eig(&x, &dims)?).max((tr - 1.0).abs());
    if violation.is_nan() || violation > 1e-8 {
        return Err(Error::ProjectionInfeasible { violation });
    }
    x.unscale_mut(tr);
    let lmin = min_eig(&x, &dims)?;
    if lmin < 0.0 {
        let mix = -lmin / (-lmin + 1.0 / n as f64);
        x = x.scale(1.0 - mix);
        for i in 0..n {
            x[(i, i)].re += mix / n as f64;
        }
    }
    Ok(DensityMatrix::new_unchecked(HermitianMatrix::from_parts_unchecked(
        dims, x,
    )))
}

struct Iterate {
    x: HermitianMatrix,
    f: f64,
    g: HermitianMatrix,
}

fn evaluate(rho: &DensityMatrix, x: HermitianMatrix) -> Result<Option<Iterate>> {
    let spec = eigh(&x)?;
    let f = cross_term(rho.matrix(), &spec);
    if !f.is_finite() {
        return Ok(None);
    }
    let k = DividedDifferenceKernel::from_spectrum(spec, KERNEL_TOL)?;
    let g = -&k.apply(rho)?;
    Ok(Some(Iterate { x, f, g }))
}

/// Random full-rank separable starting point: identity mixed with a few
/// pure product states.
fn starting_point(dims: &[usize], seed: u64) -> HermitianMatrix {
    let mut rng = seeded(seed);
    let n: usize = dims.iter().product();
    let w: f64 = rng.random_range(0.2..0.8);
    let terms = 1 + n / 2;
    let mut acc = HermitianMatrix::identity(dims.to_vec()).scale((1.0 - w) / n as f64);
    for _ in 0..terms {
        let v = random_product_vector(dims, &mut rng);
        let proj = HermitianMatrix::outer(dims.to_vec(), &v).expect("dims match");
        acc = &acc + &proj.scale(w / terms as f64);
    }
    acc
}

struct RunOutcome {
    x: HermitianMatrix,
    f: f64,
    history: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Spectral projected gradient with monotone Armijo backtracking along the
/// projected direction.
fn descend(
    rho: &DensityMatrix,
    parties: &[usize],
    cfg: &OracleConfig,
    start: HermitianMatrix,
) -> Result<RunOutcome> {
    let mut cur = evaluate(rho, start)?.ok_or_else(|| {
        Error::Precondition("starting point has infinite objective".into())
    })?;
    let mut step = cfg.step_init;
    let mut history = vec![cur.f];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        let target = &cur.x - &cur.g.scale(step);
        let proj = match dykstra_project(&target, parties, cfg.dykstra_iters) {
            Ok(p) => p,
            Err(Error::ProjectionInfeasible { .. }) if step > STEP_MIN => {
                step = (step * 0.1).max(STEP_MIN);
                continue;
            }
            Err(e) => return Err(e),
        };
        let d = proj.as_hermitian() - &cur.x;
        let dnorm = d.frobenius_norm();
        if dnorm < cfg.tol_step {
            converged = true;
            break;
        }
        let slope = trace_product(cur.g.matrix(), d.matrix());
        if slope >= 0.0 {
            // inexact projection; shrink the trial step
            step = (step * 0.1).max(STEP_MIN);
            if step <= STEP_MIN {
                break;
            }
            continue;
        }
        let mut lambda = 1.0;
        let next = loop {
            let trial = &cur.x + &d.scale(lambda);
            if let Some(it) = evaluate(rho, trial)? {
                if it.f <= cur.f + ARMIJO_C * lambda * slope {
                    break Some(it);
                }
            }
            lambda *= cfg.armijo_beta;
            if lambda * dnorm < 1e-3 * cfg.tol_step {
                break None;
            }
        };
        let Some(next) = next else {
            converged = dnorm < 1e3 * cfg.tol_step.max(1e-10);
            break;
        };
        let s = &next.x - &cur.x;
        let y = &next.g - &cur.g;
        let sy = trace_inner(&s, &y)?;
        let ss = trace_inner(&s, &s)?;
        step = if sy > 0.0 { (ss / sy).clamp(STEP_MIN, STEP_MAX) } else { STEP_MAX.min(step * 10.0) };
        let moved = s.frobenius_norm();
        cur = next;
        history.push(cur.f);
        if moved < cfg.tol_step {
            converged = true;
            break;
        }
    }
    Ok(RunOutcome {
        x: cur.x,
        f: cur.f,
        history,
        iterations,
        converged,
    })
}

/// Minimizes `S(ρ‖σ′)` over PPT states σ′ (with respect to `parties`) from
/// `cfg.restarts` random separable starts and returns the best run.
///
/// Iterates with infinite objective (σ′ singular on the support of ρ) are
/// rejected by the line search, which keeps every accepted iterate
/// support-compatible when ρ is singular.
pub fn css_numeric(
    rho: &DensityMatrix,
    parties: &[usize],
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    cfg.validate()?;
    let dims = rho.dims().to_vec();
    let seeds: Vec<u64> = (0..cfg.restarts)
        .map(|i| cfg.seed.wrapping_mul(0x2545_F491_4F6C_DD1D).wrapping_add(i as u64))
        .collect();
    let runs: Vec<Result<RunOutcome>> = seeds
        .par_iter()
        .map(|&s| descend(rho, parties, cfg, starting_point(&dims, s)))
        .collect();
    let runs: Vec<RunOutcome> = runs.into_iter().collect::<Result<_>>()?;
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.f.total_cmp(&b.1.f).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let ent = neg_entropy(rho)?;
    let restart_objectives = runs.iter().map(|r| (ent + r.f).max(0.0)).collect();
    let run = &runs[best];
    let minimizer = DensityMatrix::new(run.x.clone())?;
    let g = gradient(rho, &minimizer)?;
    let grad_residual = match dykstra_project(
        &(minimizer.as_hermitian() - &g),
        parties,
        10 * cfg.dykstra_iters,
    ) {
        Ok(res) => res.distance(&minimizer),
        Err(Error::ProjectionInfeasible { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(OracleResult {
        objective: (ent + run.f).max(0.0),
        minimizer,
        iterations: run.iterations,
        converged: run.converged,
        grad_residual,
        restart_objectives,
        history: run.history.iter().map(|f| ent + f).collect(),
    })
}

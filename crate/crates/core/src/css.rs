//! Closest-separable-state families: the states ρ(x, σ) whose CSS is a
//! given boundary state σ, their maximal parameter x_max, the closed-form
//! relative entropy of entanglement, and the optimality condition check.

use crate::boundary::{Hyperplane, PsiWitness};
use crate::error::{Error, Result};
use crate::linalg::{
    eigh, fro, log_on_support, trace_inner, CMatrix, DensityMatrix, HermitianMatrix, RANK_TOL,
};
use crate::lsigma::DividedDifferenceKernel;
use crate::oracle::product_state_max;

/// Relative slack accepted on the upper end of parameter ranges.
const RANGE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum Witness {
    Hyperplane(Hyperplane),
    Psi(PsiWitness),
}

impl Witness {
    fn sigma_ref(&self) -> &DensityMatrix {
        match self {
            Witness::Hyperplane(h) => &h.sigma_ref,
            Witness::Psi(w) => &w.sigma_ref,
        }
    }
}

/// The segment `ρ(x) = σ − xΔ`, `0 ≤ x ≤ x_max`, of states with CSS σ.
#[derive(Clone, Debug)]
pub struct CssFamily {
    pub sigma: DensityMatrix,
    pub witness: Witness,
    pub delta: HermitianMatrix,
    pub x_max: f64,
}

/// Largest `x ≥ 0` with `base − x·dir ⪰ 0`, where `base ⪰ 0` and `dir`
/// vanishes outside the support of `base`. Returns `+∞` when no positive
/// eigenvalue limits the step.
pub fn psd_step_limit(base: &HermitianMatrix, dir: &HermitianMatrix) -> Result<f64> {
    base.ensure_same_order(dir)?;
    let k = DividedDifferenceKernel::new(base, RANK_TOL)?;
    let r = k.support_rank();
    let spec = k.basis();
    let d = spec.to_eigenbasis(dir.matrix());
    let n = base.order();
    let mut leak = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i >= r || j >= r {
                leak = leak.max(d[(i, j)].norm());
            }
        }
    }
    if leak > 1e-9 * (1.0 + dir.frobenius_norm()) {
        return Err(Error::SupportViolation(format!(
            "direction leaves the support of the base state ({leak:e})"
        )));
    }
    let inv_sqrt: Vec<f64> = spec.eigenvalues[..r].iter().map(|l| 1.0 / l.sqrt()).collect();
    let block = CMatrix::from_fn(r, r, |i, j| d[(i, j)] * inv_sqrt[i] * inv_sqrt[j]);
    let block = HermitianMatrix::from_parts_unchecked(vec![r], block);
    let top = eigh(&block)?.max();
    if top <= 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(1.0 / top)
    }
}

/// Builds the family of states whose CSS is the witness's reference state.
///
/// A [`Hyperplane`] requires σ ≻ 0 and gives `Δ = L_σ^{-1}(φ)`. A
/// [`PsiWitness`] works for any σ and gives `Δ = σ − L_σ^‡(ψ)`, with `x_max`
/// capped at one.
pub fn build_family(witness: Witness) -> Result<CssFamily> {
    let sigma = witness.sigma_ref().clone();
    let kernel = DividedDifferenceKernel::new(&sigma, RANK_TOL)?;
    let (delta, cap) = match &witness {
        Witness::Hyperplane(h) => {
            h.phi.ensure_same_order(&sigma)?;
            if !kernel.is_full_rank() {
                return Err(Error::Precondition(
                    "hyperplane families need a full-rank σ; use a ψ-witness".into(),
                ));
            }
            let offset = h.offset();
            if offset.abs() > 1e-9 {
                return Err(Error::WitnessMismatch(format!("Tr φσ = {offset:e}")));
            }
            let delta = kernel.apply_pinv(&h.phi)?;
            let tr = delta.trace();
            if tr.abs() > 1e-9 {
                return Err(Error::WitnessMismatch(format!("Tr L_σ^{{-1}}(φ) = {tr:e}")));
            }
            (delta, f64::INFINITY)
        }
        Witness::Psi(w) => {
            w.psi.ensure_same_order(&sigma)?;
            let level = w.level();
            if (level - 1.0).abs() > 1e-9 {
                return Err(Error::WitnessMismatch(format!("Tr ψσ = {level}")));
            }
            let leak = kernel.off_support_norm(&w.psi)?;
            if leak > 1e-9 {
                return Err(Error::WitnessMismatch(format!(
                    "ψ does not vanish outside supp σ ({leak:e})"
                )));
            }
            let p = kernel.support_projector();
            if w.psi.distance(&p) <= 1e-9 * (1.0 + p.frobenius_norm()) {
                return Err(Error::DegenerateWitness);
            }
            let target = kernel.apply_pinv(&w.psi)?;
            let tr = target.trace();
            if (tr - 1.0).abs() > 1e-9 {
                return Err(Error::WitnessMismatch(format!("Tr L_σ^‡(ψ) = {tr}")));
            }
            (sigma.as_hermitian() - &target, 1.0)
        }
    };
    let limit = psd_step_limit(&sigma, &delta)?;
    let x_max = limit.min(cap);
    if !x_max.is_finite() || x_max <= 0.0 {
        return Err(Error::WitnessMismatch(format!("family has x_max = {x_max}")));
    }
    Ok(CssFamily {
        sigma,
        witness,
        delta,
        x_max,
    })
}

impl CssFamily {
    pub fn is_singular(&self) -> bool {
        matches!(self.witness, Witness::Psi(_))
            && !DividedDifferenceKernel::new(&self.sigma, RANK_TOL)
                .map(|k| k.is_full_rank())
                .unwrap_or(true)
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !(x >= 0.0 && x <= self.x_max * (1.0 + RANGE_SLACK)) {
            return Err(Error::OutOfRange(format!(
                "x = {x} outside [0, x_max = {}]",
                self.x_max
            )));
        }
        Ok(())
    }

    /// `Tr L_σ^{-1}(φ)` or `1 − Tr L_σ^‡(ψ)`; zero up to rounding.
    pub fn delta_trace(&self) -> f64 {
        self.delta.trace()
    }

    /// `t_max = x_max / x`, the largest weight keeping `tρ(x) + (1−t)σ` a state.
    pub fn t_max(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        if x == 0.0 {
            return Err(Error::OutOfRange("t_max is undefined at x = 0".into()));
        }
        Ok(self.x_max / x)
    }
}

/// `ρ(x, σ) = σ − xΔ`.
pub fn family_state(f: &CssFamily, x: f64) -> Result<DensityMatrix> {
    f.check_x(x)?;
    if x == 0.0 {
        return Ok(f.sigma.clone());
    }
    let rho = f.sigma.as_hermitian() - &f.delta.scale(x);
    let tr = rho.trace();
    DensityMatrix::new(rho.scale(1.0 / tr))
}

/// `Tr ρ log ρ − Tr σ log σ + x Tr(Δ log σ)`, the relative entropy of
/// entanglement of `ρ(x, σ)` in nats.
///
/// Returns zero at `x = 0`, where ρ = σ is separable.
pub fn ree_closed(f: &CssFamily, x: f64) -> Result<f64> {
    f.check_x(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let rho = family_state(f, x)?;
    let s_rho = eigh(&rho)?;
    let s_sigma = eigh(&f.sigma)?;
    let xlogx = |spec: &crate::linalg::Spectrum| -> f64 {
        spec.eigenvalues
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| l * l.ln())
            .sum()
    };
    let log_sigma = log_on_support(&s_sigma, RANK_TOL)?;
    Ok(xlogx(&s_rho) - xlogx(&s_sigma) + x * trace_inner(&f.delta, &log_sigma)?)
}

/// Optimality-condition quantities for a candidate pair.
#[derive(Clone, Debug)]
pub struct CssCondition {
    /// Best found `max_{σ′} Tr σ′ L_σ(ρ)` over product states.
    pub value: f64,
    /// `Tr σ L_σ(ρ)`.
    pub at_sigma: f64,
    pub maximizer: DensityMatrix,
}

impl CssCondition {
    pub fn holds(&self, tol: f64) -> bool {
        self.value <= 1.0 + tol && (self.at_sigma - 1.0).abs() <= 1e-9
    }
}

/// Evaluates `max_{σ′ ∈ D} Tr σ′ L_σ(ρ)` by product-state maximization.
pub fn css_condition_value(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    restarts: usize,
    seed: u64,
) -> Result<CssCondition> {
    rho.ensure_same_order(sigma)?;
    let kernel = DividedDifferenceKernel::new(sigma, RANK_TOL)?;
    if !kernel.is_full_rank() {
        let k = kernel.kernel_basis();
        let leak = fro(&(rho.matrix() * &k));
        if leak > 1e-9 {
            return Err(Error::SupportViolation(format!(
                "ρ does not vanish on ker σ (‖ρK‖ = {leak:e})"
            )));
        }
    }
    let w = kernel.apply(rho)?;
    let at_sigma = trace_inner(&w, sigma)?;
    let (value, maximizer) = product_state_max(&w, restarts, seed)?;
    Ok(CssCondition {
        value,
        at_sigma,
        maximizer,
    })
}

/// Largest t with `tρ + (1−t)σ ⪰ 0`.
pub fn segment_t_max(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    psd_step_limit(sigma, &(sigma.as_hermitian() - rho.as_hermitian()))
}

/// `tρ + (1−t)σ` for `0 ≤ t ≤ t_max`.
pub fn segment_family(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    rho.ensure_same_order(sigma)?;
    let t_max = segment_t_max(rho, sigma)?;
    if !(t >= 0.0 && t <= t_max * (1.0 + RANGE_SLACK)) {
        return Err(Error::OutOfRange(format!("t = {t} outside [0, t_max = {t_max}]")));
    }
    let mixed = &rho.scale(t) + &sigma.scale(1.0 - t);
    let tr = mixed.trace();
    DensityMatrix::new(mixed.scale(1.0 / tr))
}

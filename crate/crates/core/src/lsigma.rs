//! Divided-difference operators for the derivative of the matrix logarithm.
//!
//! For σ ⪰ 0 with eigenvalues `a_1 ≥ … ≥ a_r > 0 = a_{r+1} = …`, the kernel
//! holds two real symmetric matrices in σ's eigenbasis:
//!
//! - `tmat[k][l] = (log a_k − log a_l)/(a_k − a_l)`, with `1/a` on ties,
//! - `smat[k][l] = (a_k − a_l)/(log a_k − log a_l)`, with `a` on ties,
//!
//! both zero outside the leading `r × r` support block. `L_σ(β)` is the
//! entrywise product of `β` (rotated into the eigenbasis) with `tmat`, and
//! `L_σ^‡(β)` the entrywise product with `smat`. On full-rank σ the second is
//! the inverse of the first; otherwise it is the Moore–Penrose inverse and the
//! compositions reduce to compression onto the support.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, log_on_support, trace_product, CMatrix, HermitianMatrix, Spectrum};

/// Relative gap below which two eigenvalues are treated as tied.
pub const TIE_GAP: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct DividedDifferenceKernel {
    basis: Spectrum,
    tmat: DMatrix<f64>,
    smat: DMatrix<f64>,
    support_rank: usize,
}

fn log_quotient(a: f64, b: f64) -> f64 {
    if (a - b).abs() <= TIE_GAP * (a + b) {
        2.0 / (a + b)
    } else {
        // ln(a/b) via ln_1p keeps full relative accuracy for moderate gaps.
        (((a - b) / b).ln_1p()) / (a - b)
    }
}

fn mean_quotient(a: f64, b: f64) -> f64 {
    if (a - b).abs() <= TIE_GAP * (a + b) {
        0.5 * (a + b)
    } else {
        (a - b) / ((a - b) / b).ln_1p()
    }
}

impl DividedDifferenceKernel {
    /// Builds the kernel of a PSD matrix.
    ///
    /// The support consists of eigenvalues above `tol · max(1, λ_max)`.
    pub fn new(sigma: &HermitianMatrix, tol: f64) -> Result<Self> {
        let basis = eigh(sigma)?;
        Self::from_spectrum(basis, tol)
    }

    pub fn from_spectrum(basis: Spectrum, tol: f64) -> Result<Self> {
        let scale = basis.max().max(1.0);
        if basis.min() < -tol * scale {
            return Err(Error::NotPsd(basis.min()));
        }
        let r = basis.rank(tol);
        if r == 0 {
            return Err(Error::Precondition("σ must be nonzero".into()));
        }
        let n = basis.order();
        let a = &basis.eigenvalues;
        let mut tmat = DMatrix::zeros(n, n);
        let mut smat = DMatrix::zeros(n, n);
        for k in 0..r {
            for l in k..r {
                let t = log_quotient(a[k], a[l]);
                let s = mean_quotient(a[k], a[l]);
                tmat[(k, l)] = t;
                tmat[(l, k)] = t;
                smat[(k, l)] = s;
                smat[(l, k)] = s;
            }
        }
        Ok(Self {
            basis,
            tmat,
            smat,
            support_rank: r,
        })
    }

    pub fn basis(&self) -> &Spectrum {
        &self.basis
    }

    pub fn tmat(&self) -> &DMatrix<f64> {
        &self.tmat
    }

    pub fn smat(&self) -> &DMatrix<f64> {
        &self.smat
    }

    pub fn support_rank(&self) -> usize {
        self.support_rank
    }

    pub fn order(&self) -> usize {
        self.basis.order()
    }

    pub fn is_full_rank(&self) -> bool {
        self.support_rank == self.order()
    }

    fn check(&self, beta: &HermitianMatrix) -> Result<()> {
        if beta.order() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                found: beta.order(),
            });
        }
        Ok(())
    }

    fn hadamard(&self, beta: &HermitianMatrix, weights: &DMatrix<f64>) -> HermitianMatrix {
        let mut b = self.basis.to_eigenbasis(beta.matrix());
        b.zip_apply(weights, |z, w| *z *= w);
        HermitianMatrix::from_parts_unchecked(beta.dims().to_vec(), self.basis.from_eigenbasis(&b))
    }

    /// `L_σ(β)`.
    pub fn apply(&self, beta: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.check(beta)?;
        Ok(self.hadamard(beta, &self.tmat))
    }

    /// `L_σ^‡(β)`; the inverse of `L_σ` when σ has full rank.
    pub fn apply_pinv(&self, beta: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.check(beta)?;
        Ok(self.hadamard(beta, &self.smat))
    }

    /// Orthogonal projector onto the support of σ.
    pub fn support_projector(&self) -> HermitianMatrix {
        let r = self.support_rank;
        let u = self.basis.eigenvectors.columns(0, r);
        HermitianMatrix::from_parts_unchecked(self.basis.dims.clone(), u * u.adjoint())
    }

    /// Basis of the kernel of σ (eigenvectors beyond the support), as columns.
    pub fn kernel_basis(&self) -> CMatrix {
        let r = self.support_rank;
        self.basis
            .eigenvectors
            .columns(r, self.order() - r)
            .into_owned()
    }

    /// `P β P` for the support projector `P`.
    pub fn compress(&self, beta: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.check(beta)?;
        let n = self.order();
        let r = self.support_rank;
        let mut b = self.basis.to_eigenbasis(beta.matrix());
        for i in 0..n {
            for j in 0..n {
                if i >= r || j >= r {
                    b[(i, j)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(HermitianMatrix::from_parts_unchecked(
            beta.dims().to_vec(),
            self.basis.from_eigenbasis(&b),
        ))
    }

    /// Frobenius norm of the part of β outside the `supp × supp` block.
    pub fn off_support_norm(&self, beta: &HermitianMatrix) -> Result<f64> {
        Ok(beta.distance(&self.compress(beta)?))
    }
}

/// Builds the divided-difference kernel of σ.
pub fn build_kernel(sigma: &HermitianMatrix, tol: f64) -> Result<DividedDifferenceKernel> {
    DividedDifferenceKernel::new(sigma, tol)
}

pub fn apply_l(kernel: &DividedDifferenceKernel, beta: &HermitianMatrix) -> Result<HermitianMatrix> {
    kernel.apply(beta)
}

pub fn apply_l_pinv(
    kernel: &DividedDifferenceKernel,
    beta: &HermitianMatrix,
) -> Result<HermitianMatrix> {
    kernel.apply_pinv(beta)
}

pub fn support_projector(kernel: &DividedDifferenceKernel) -> HermitianMatrix {
    kernel.support_projector()
}

/// First-order remainder of `t ↦ Tr(ρ log(σ + tξ))` at `t = 0`:
/// `|Tr(ρ log(σ+tξ)) − Tr(ρ log σ) − t·Tr(ρ L_σ(ξ))|`.
///
/// Full-rank σ gives `O(t²)`. For singular σ, ξ must be positive definite on
/// `ker σ` and ρ must vanish there; the remainder is then `O(t² |log t|)`.
pub fn expansion_residual(
    sigma: &HermitianMatrix,
    xi: &HermitianMatrix,
    rho: &HermitianMatrix,
    t: f64,
    tol: f64,
) -> Result<f64> {
    sigma.ensure_same_order(xi)?;
    sigma.ensure_same_order(rho)?;
    if t <= 0.0 {
        return Err(Error::OutOfRange(format!("t = {t} must be positive")));
    }
    let kernel = DividedDifferenceKernel::new(sigma, tol)?;
    if !kernel.is_full_rank() {
        let k = kernel.kernel_basis();
        let xi_ker = HermitianMatrix::from_parts_unchecked(
            vec![k.ncols()],
            k.adjoint() * xi.matrix() * &k,
        );
        let lmin = eigh(&xi_ker)?.min();
        if lmin <= 0.0 {
            return Err(Error::Precondition(format!(
                "ξ must be positive on ker σ (min eigenvalue there {lmin:e})"
            )));
        }
        let leak = crate::linalg::fro(&(rho.matrix() * &k));
        if leak > 1e-9 * (1.0 + rho.frobenius_norm()) {
            return Err(Error::SupportViolation(format!(
                "ρ does not vanish on ker σ (‖ρK‖ = {leak:e})"
            )));
        }
    }
    let shifted = sigma + &xi.scale(t);
    let spec = eigh(&shifted)?;
    if spec.min() <= 0.0 {
        return Err(Error::Precondition(format!(
            "σ + tξ is not positive definite at t = {t}"
        )));
    }
    let log_shifted = spec.map(f64::ln);
    let log_sigma = log_on_support(kernel.basis(), tol)?;
    let lxi = kernel.apply(xi)?;
    let value = trace_product(rho.matrix(), log_shifted.matrix())
        - trace_product(rho.matrix(), log_sigma.matrix())
        - t * trace_product(rho.matrix(), lxi.matrix());
    Ok(value.abs())
}

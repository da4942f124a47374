//! Dense hermitian linear algebra on tensor-factored spaces.
//!
//! Every matrix carries its tensor factorization `dims = (n₁, …, n_s)` with
//! row-major factor ordering: the first factor is the slowest-varying index.
//! Factor indices used by [`partial_transpose`] are zero-based.

use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative eigenvalue threshold used for every rank and kernel decision.
pub const RANK_TOL: f64 = 1e-10;

/// Absolute asymmetry accepted (and symmetrized away) at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

const EIGEN_MAX_ITER: usize = 10_000;

/// Dense hermitian matrix with a declared tensor factorization.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    dims: Vec<usize>,
    data: CMatrix,
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianMatrix")
            .field("dims", &self.dims)
            .field("data", &self.data)
            .finish()
    }
}

fn check_dims(dims: &[usize], order: usize) -> Result<()> {
    let product: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || product != order {
        return Err(Error::BadFactorization {
            dims: dims.to_vec(),
            product,
            order,
        });
    }
    Ok(())
}

fn max_asymmetry(data: &CMatrix) -> f64 {
    let n = data.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((data[(i, j)] - data[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part(data: &CMatrix) -> CMatrix {
    (data + data.adjoint()).scale(0.5)
}

impl HermitianMatrix {
    /// Validates the factorization and hermiticity (within [`HERMITIAN_TOL`]),
    /// then symmetrizes.
    pub fn new(dims: Vec<usize>, data: CMatrix) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                found: data.ncols(),
            });
        }
        check_dims(&dims, data.nrows())?;
        let asym = max_asymmetry(&data);
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self {
            dims,
            data: hermitian_part(&data),
        })
    }

    /// Takes the hermitian part `(m + m†)/2` without checking asymmetry.
    ///
    /// Used for results of computations that are hermitian in exact arithmetic.
    pub fn from_hermitian_part(dims: Vec<usize>, data: &CMatrix) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                found: data.ncols(),
            });
        }
        check_dims(&dims, data.nrows())?;
        Ok(Self {
            dims,
            data: hermitian_part(data),
        })
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, data: CMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), data.nrows());
        Self {
            dims,
            data: hermitian_part(&data),
        }
    }

    pub fn from_real(dims: Vec<usize>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let data = CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(rows[i].get(j).copied().unwrap_or(f64::NAN), 0.0)
        });
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Format("matrix rows must all have the order's length".into()));
        }
        Self::new(dims, data)
    }

    pub fn from_diagonal(dims: Vec<usize>, diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let data = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(dims, data)
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            dims,
            data: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            dims,
            data: CMatrix::zeros(n, n),
        }
    }

    /// Rank-one projector `|v⟩⟨v|` (no normalization applied).
    pub fn outer(dims: Vec<usize>, v: &CVector) -> Result<Self> {
        if v.len() != dims.iter().product::<usize>() {
            return Err(Error::DimensionMismatch {
                expected: dims.iter().product(),
                found: v.len(),
            });
        }
        Ok(Self::from_parts_unchecked(dims, v * v.adjoint()))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.order())?;
        Ok(Self {
            dims,
            data: self.data.clone(),
        })
    }

    pub fn trace(&self) -> f64 {
        self.data.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            data: self.data.map(|z| z * s),
        }
    }

    /// `x · self · x†`, hermitian for any square `x` of matching order.
    pub fn congruence(&self, x: &CMatrix) -> Self {
        Self::from_parts_unchecked(self.dims.clone(), x * &self.data * x.adjoint())
    }

    /// Kronecker product; the factorization is the concatenation of both.
    pub fn kron(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_parts_unchecked(dims, self.data.kronecker(&other.data))
    }

    pub fn ensure_same_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                found: other.order(),
            });
        }
        Ok(())
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.data - &other.data)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨v|self|v⟩`, real for hermitian `self`.
    pub fn expectation(&self, v: &CVector) -> f64 {
        (v.adjoint() * &self.data * v)[(0, 0)].re
    }

    pub fn max_asymmetry(&self) -> f64 {
        max_asymmetry(&self.data)
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.order(), rhs.order(), "order mismatch in addition");
        HermitianMatrix {
            dims: self.dims.clone(),
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.order(), rhs.order(), "order mismatch in subtraction");
        HermitianMatrix {
            dims: self.dims.clone(),
            data: &self.data - &rhs.data,
        }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

/// Unit-trace positive semidefinite hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

/// Minimum eigenvalue accepted for a density matrix.
pub const DENSITY_PSD_TOL: f64 = 1e-10;
/// Trace deviation accepted for a density matrix.
pub const DENSITY_TRACE_TOL: f64 = 1e-10;

impl DensityMatrix {
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        let tr = m.trace();
        if (tr - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::NotDensity(format!("trace {tr} differs from 1")));
        }
        let lmin = eigh(&m)?.min();
        if lmin < -DENSITY_PSD_TOL {
            return Err(Error::NotDensity(format!(
                "minimum eigenvalue {lmin:e} is negative"
            )));
        }
        Ok(Self(m))
    }

    /// Divides by the trace before validating.
    pub fn normalized(m: HermitianMatrix) -> Result<Self> {
        let tr = m.trace();
        if tr <= 0.0 {
            return Err(Error::NotDensity(format!("trace {tr} is not positive")));
        }
        Self::new(m.scale(1.0 / tr))
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self(HermitianMatrix::identity(dims).scale(1.0 / n as f64))
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn pure(dims: Vec<usize>, v: &CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::NotDensity("zero state vector".into()));
        }
        Ok(Self(HermitianMatrix::outer(dims, &v.unscale(norm))?))
    }

    pub(crate) fn new_unchecked(m: HermitianMatrix) -> Self {
        Self(m)
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }
}

impl Deref for DensityMatrix {
    type Target = HermitianMatrix;
    fn deref(&self) -> &HermitianMatrix {
        &self.0
    }
}

impl AsRef<HermitianMatrix> for DensityMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.0
    }
}

/// Eigenvalues (descending) and matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
    pub dims: Vec<usize>,
}

impl Spectrum {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// `U diag(f(λ)) U†`.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> HermitianMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let v = f(lam);
            scaled.column_mut(j).scale_mut(v);
        }
        HermitianMatrix::from_parts_unchecked(self.dims.clone(), scaled * u.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|x| x)
    }

    /// `U† x U`, i.e. `x` expressed in this eigenbasis.
    pub fn to_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * x * &self.eigenvectors
    }

    /// `U y U†`.
    pub fn from_eigenbasis(&self, y: &CMatrix) -> CMatrix {
        &self.eigenvectors * y * self.eigenvectors.adjoint()
    }

    /// Count of eigenvalues above `tol · max(1, λ_max)`.
    pub fn rank(&self, tol: f64) -> usize {
        let cut = tol * self.max().max(1.0);
        self.eigenvalues.iter().filter(|&&l| l > cut).count()
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
pub fn eigh(m: &HermitianMatrix) -> Result<Spectrum> {
    let n = m.order();
    let eig = SymmetricEigen::try_new(m.data.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::EigenNoConvergence {
            iterations: EIGEN_MAX_ITER,
        })?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        dims: m.dims.clone(),
    })
}

/// Eigenvalues only, descending.
pub fn eigvalsh(m: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(eigh(m)?.eigenvalues)
}

/// Matrix logarithm restricted to the support.
///
/// Eigenvalues at or below `tol · λ_max` map to zero; on full-rank input this
/// is the principal logarithm.
pub fn mat_log_support(m: &HermitianMatrix, tol: f64) -> Result<HermitianMatrix> {
    let spec = eigh(m)?;
    log_on_support(&spec, tol)
}

pub(crate) fn log_on_support(spec: &Spectrum, tol: f64) -> Result<HermitianMatrix> {
    let lmax = spec.max();
    if lmax <= 0.0 {
        return Err(Error::ZeroLogarithm);
    }
    let lmin = spec.min();
    if lmin < -tol * lmax.max(1.0) {
        return Err(Error::NotPsd(lmin));
    }
    let cut = tol * lmax;
    Ok(spec.map(|l| if l > cut { l.ln() } else { 0.0 }))
}

/// Positive square root after clipping negative eigenvalues to zero.
pub fn sqrt_psd(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(eigh(m)?.map(|l| l.max(0.0).sqrt()))
}

/// `m^p` on the PSD part (negative eigenvalues clipped).
pub fn pow_psd(m: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    Ok(eigh(m)?.map(|l| if l > 0.0 { l.powf(p) } else { 0.0 }))
}

fn multi_index(mut k: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = k % d;
        k /= d;
    }
}

fn flat_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// Transposes the listed (zero-based) tensor factors.
pub fn partial_transpose(m: &HermitianMatrix, parties: &[usize]) -> Result<HermitianMatrix> {
    let s = m.dims.len();
    for &p in parties {
        if p >= s {
            return Err(Error::PartyOutOfRange {
                index: p,
                parties: s,
            });
        }
    }
    Ok(HermitianMatrix::from_parts_unchecked(
        m.dims.clone(),
        partial_transpose_raw(&m.data, &m.dims, parties),
    ))
}

pub(crate) fn partial_transpose_raw(data: &CMatrix, dims: &[usize], parties: &[usize]) -> CMatrix {
    let n = data.nrows();
    let s = dims.len();
    let mut flip = vec![false; s];
    for &p in parties {
        flip[p] = true;
    }
    let mut rd = vec![0usize; s];
    let mut cd = vec![0usize; s];
    let mut r2 = vec![0usize; s];
    let mut c2 = vec![0usize; s];
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        multi_index(r, dims, &mut rd);
        for c in 0..n {
            multi_index(c, dims, &mut cd);
            r2.copy_from_slice(&rd);
            c2.copy_from_slice(&cd);
            for f in 0..s {
                if flip[f] {
                    r2[f] = cd[f];
                    c2[f] = rd[f];
                }
            }
            out[(flat_index(&r2, dims), flat_index(&c2, dims))] = data[(r, c)];
        }
    }
    out
}

/// `Tr(ab)` for hermitian `a`, `b`.
pub fn trace_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    a.ensure_same_order(b)?;
    Ok(trace_product(&a.data, &b.data))
}

pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.transpose().iter())
        .map(|(x, y)| (x * y).re)
        .sum()
}

/// PSD test and numerical rank under the shared relative tolerance convention.
///
/// `is_psd ⇔ λ_min ≥ −tol·max(1, λ_max)`; rank counts eigenvalues with
/// `|λ| > tol·max(1, max|λ|)`, which on PSD input is the count above
/// `tol·max(1, λ_max)`.
pub fn psd_rank(m: &HermitianMatrix, tol: f64) -> Result<(bool, usize)> {
    let spec = eigh(m)?;
    let is_psd = spec.min() >= -tol * spec.max().max(1.0);
    let scale = spec.max().abs().max(spec.min().abs()).max(1.0);
    let rank = spec
        .eigenvalues
        .iter()
        .filter(|l| l.abs() > tol * scale)
        .count();
    Ok((is_psd, rank))
}

/// Frobenius norm of a general complex matrix.
pub fn fro(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, seeded};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell_singlet() -> HermitianMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_vec(vec![c(0.0), c(s), c(-s), c(0.0)]);
        HermitianMatrix::outer(vec![2, 2], &v).unwrap()
    }

    #[test]
    fn eigh_identity_and_diagonal() {
        let id = HermitianMatrix::identity(vec![2]);
        let s = eigh(&id).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);

        let d = HermitianMatrix::from_diagonal(vec![2], &[1.0, 3.0]).unwrap();
        let s = eigh(&d).unwrap();
        assert!((s.eigenvalues[0] - 3.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-15);
        assert!((s.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = seeded(11);
        for _ in 0..20 {
            let h = random_hermitian(vec![4], &mut rng);
            let s = eigh(&h).unwrap();
            let u = &s.eigenvectors;
            let gram = u.adjoint() * u - CMatrix::identity(4, 4);
            assert!(fro(&gram) <= 1e-10);
            let err = s.reconstruct().distance(&h);
            assert!(err <= 1e-9 * (1.0 + h.frobenius_norm()), "err {err}");
            assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn log_support_cases() {
        let id = HermitianMatrix::identity(vec![3]);
        assert!(mat_log_support(&id, RANK_TOL).unwrap().frobenius_norm() < 1e-15);

        let e = std::f64::consts::E;
        let d = HermitianMatrix::from_diagonal(vec![2], &[e, 1.0]).unwrap();
        let l = mat_log_support(&d, RANK_TOL).unwrap();
        assert!((l.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(l.matrix()[(1, 1)].norm() < 1e-14);

        let d = HermitianMatrix::from_diagonal(vec![2], &[e, 0.0]).unwrap();
        let l = mat_log_support(&d, RANK_TOL).unwrap();
        assert!((l.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(l.matrix()[(1, 1)].norm() < 1e-14);

        let z = HermitianMatrix::zeros(vec![2]);
        assert!(matches!(mat_log_support(&z, RANK_TOL), Err(Error::ZeroLogarithm)));
    }

    #[test]
    fn log_commutes_with_argument() {
        let mut rng = seeded(3);
        for rank in [2, 4] {
            let rho = crate::random::random_density(vec![2, 2], rank, &mut rng);
            let l = mat_log_support(&rho, RANK_TOL).unwrap();
            let comm = l.matrix() * rho.matrix() - rho.matrix() * l.matrix();
            assert!(fro(&comm) <= 1e-9);
        }
    }

    #[test]
    fn partial_transpose_block_form() {
        // [[A,B],[B†,C]] -> [[A,B†],[B,C]] when transposing the qubit factor.
        let mut rng = seeded(5);
        let h = random_hermitian(vec![2, 3], &mut rng);
        let g = partial_transpose(&h, &[0]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.matrix()[(i, j)], h.matrix()[(i, j)]);
                assert_eq!(g.matrix()[(3 + i, 3 + j)], h.matrix()[(3 + i, 3 + j)]);
                // upper-right block of σ^Γ is B†
                assert_eq!(g.matrix()[(i, 3 + j)], h.matrix()[(j, 3 + i)].conj());
            }
        }
        let back = partial_transpose(&g, &[0]).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn partial_transpose_real_product_unchanged() {
        let a = HermitianMatrix::from_real(vec![2], &[vec![0.7, 0.2], vec![0.2, 0.3]]).unwrap();
        let b = HermitianMatrix::from_real(vec![2], &[vec![0.4, -0.1], vec![-0.1, 0.6]]).unwrap();
        let p = a.kron(&b);
        for parties in [vec![0], vec![1], vec![0, 1]] {
            let t = partial_transpose(&p, &parties).unwrap();
            assert!(t.distance(&p) < 1e-15);
        }
    }

    #[test]
    fn singlet_partial_transpose_has_negative_half() {
        let g = partial_transpose(&bell_singlet(), &[0]).unwrap();
        let s = eigh(&g).unwrap();
        assert!((s.min() + 0.5).abs() < 1e-12);
        assert!((s.max() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn party_out_of_range() {
        let h = HermitianMatrix::identity(vec![2, 2]);
        assert!(matches!(
            partial_transpose(&h, &[2]),
            Err(Error::PartyOutOfRange { index: 2, parties: 2 })
        ));
    }

    #[test]
    fn trace_inner_cases() {
        let id = HermitianMatrix::identity(vec![2]);
        assert_eq!(trace_inner(&id, &id).unwrap(), 2.0);
        let z = HermitianMatrix::from_diagonal(vec![2], &[1.0, -1.0]).unwrap();
        let x = HermitianMatrix::from_real(vec![2], &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(trace_inner(&z, &x).unwrap(), 0.0);

        let mut rng = seeded(9);
        let a = random_hermitian(vec![4], &mut rng);
        let b = random_hermitian(vec![4], &mut rng);
        let entrywise: f64 = a
            .matrix()
            .iter()
            .zip(b.matrix().iter())
            .map(|(x, y)| (x * y.conj()).re)
            .sum();
        assert!((trace_inner(&a, &b).unwrap() - entrywise).abs() < 1e-12);
        assert!(trace_inner(&a, &HermitianMatrix::identity(vec![3])).is_err());
    }

    #[test]
    fn psd_rank_cases() {
        let d = HermitianMatrix::from_diagonal(vec![2], &[1.0, 0.0]).unwrap();
        assert_eq!(psd_rank(&d, RANK_TOL).unwrap(), (true, 1));
        let d = HermitianMatrix::from_diagonal(vec![2], &[1.0, -1.0]).unwrap();
        assert_eq!(psd_rank(&d, RANK_TOL).unwrap(), (false, 2));
    }

    #[test]
    fn construction_rejects_asymmetry() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = c(1e-6);
        assert!(matches!(
            HermitianMatrix::new(vec![2], m.clone()),
            Err(Error::NotHermitian(_))
        ));
        m[(0, 1)] = c(1e-13);
        let h = HermitianMatrix::new(vec![2], m).unwrap();
        assert_eq!(h.max_asymmetry(), 0.0);
        assert!(HermitianMatrix::new(vec![3], CMatrix::identity(2, 2)).is_err());
    }
}

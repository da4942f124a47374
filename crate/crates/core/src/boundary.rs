//! Geometry of the PPT set: boundary membership, supporting hyperplanes from
//! the kernel of the partial transpose, ψ-witnesses for singular boundary
//! states, tensor-product hyperplanes, and a generator of full-rank boundary
//! states with prescribed partial-transpose rank on `C² ⊗ C^m`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, partial_transpose, trace_inner, CMatrix, CVector, DensityMatrix, HermitianMatrix,
    RANK_TOL,
};
use crate::lsigma::DividedDifferenceKernel;
use crate::random::{ginibre, haar_unitary, seeded};

/// Location of a state relative to the PPT set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

/// Classifies σ: outside if σ^Γ has an eigenvalue below `−tol`, interior if
/// both σ and σ^Γ have minimum eigenvalue above `tol`, boundary otherwise.
pub fn boundary_membership(
    sigma: &DensityMatrix,
    parties: &[usize],
    tol: f64,
) -> Result<Membership> {
    let pt_min = eigh(&partial_transpose(sigma, parties)?)?.min();
    if pt_min < -tol {
        return Ok(Membership::Outside);
    }
    let min = eigh(sigma)?.min();
    if min > tol && pt_min > tol {
        Ok(Membership::Interior)
    } else {
        Ok(Membership::Boundary)
    }
}

/// Orthonormal basis of the numerical kernel of σ^Γ (eigenvalues at or below
/// `tol · λ_max`).
pub fn pt_kernel(sigma: &DensityMatrix, parties: &[usize], tol: f64) -> Result<Vec<CVector>> {
    let spec = eigh(&partial_transpose(sigma, parties)?)?;
    let lmax = spec.max();
    if spec.min() < -tol * lmax.max(1.0) {
        return Err(Error::Precondition(format!(
            "partial transpose is not PSD (min eigenvalue {:e})",
            spec.min()
        )));
    }
    let cut = tol * lmax;
    let kernel: Vec<CVector> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= cut)
        .map(|(i, _)| spec.vector(i))
        .collect();
    if kernel.is_empty() {
        return Err(Error::EmptyKernel);
    }
    Ok(kernel)
}

/// Normalized supporting hyperplane φ of the PPT set at `sigma_ref`.
#[derive(Clone, Debug)]
pub struct Hyperplane {
    pub phi: HermitianMatrix,
    pub sigma_ref: DensityMatrix,
    /// Coefficients over the kernel basis of σ^Γ, when PT-derived.
    pub kernel_coeffs: Option<Vec<Complex64>>,
    pub parties: Vec<usize>,
}

impl Hyperplane {
    /// `Tr φ²`.
    pub fn norm_sq(&self) -> f64 {
        trace_inner(&self.phi, &self.phi).expect("same order")
    }

    /// `Tr φσ` for the reference state.
    pub fn offset(&self) -> f64 {
        trace_inner(&self.phi, &self.sigma_ref).expect("same order")
    }

    /// Checks `Tr φ² = 1` (1e-10) and `Tr φσ = 0` (1e-9).
    pub fn validate(&self) -> Result<()> {
        let n = self.norm_sq();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::WitnessMismatch(format!("Tr φ² = {n}, expected 1")));
        }
        let o = self.offset();
        if o.abs() > 1e-9 {
            return Err(Error::WitnessMismatch(format!("Tr φσ = {o:e}, expected 0")));
        }
        Ok(())
    }
}

/// Forms `φ = (|v⟩⟨v|)^Γ` with `|v⟩` the normalized combination of the σ^Γ
/// kernel basis with the given coefficients.
pub fn hyperplane_from_kernel(
    sigma: &DensityMatrix,
    coeffs: &[Complex64],
    parties: &[usize],
) -> Result<Hyperplane> {
    let kernel = pt_kernel(sigma, parties, RANK_TOL)?;
    if coeffs.len() != kernel.len() {
        return Err(Error::BadCoefficients(format!(
            "{} coefficients given for a kernel of dimension {}",
            coeffs.len(),
            kernel.len()
        )));
    }
    let mut v = CVector::zeros(sigma.order());
    for (c, k) in coeffs.iter().zip(&kernel) {
        v += k * *c;
    }
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::BadCoefficients("zero coefficient vector".into()));
    }
    v.unscale_mut(norm);
    let proj = HermitianMatrix::outer(sigma.dims().to_vec(), &v)?;
    let phi = partial_transpose(&proj, parties)?;
    Ok(Hyperplane {
        phi,
        sigma_ref: sigma.clone(),
        kernel_coeffs: Some(coeffs.to_vec()),
        parties: parties.to_vec(),
    })
}

/// Hyperplane from the first kernel vector.
pub fn default_hyperplane(sigma: &DensityMatrix, parties: &[usize]) -> Result<Hyperplane> {
    let dim = pt_kernel(sigma, parties, RANK_TOL)?.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
    coeffs[0] = Complex64::new(1.0, 0.0);
    hyperplane_from_kernel(sigma, &coeffs, parties)
}

/// Supporting functional in the form `Tr ψσ′ ≤ Tr ψσ = 1`, with ψ vanishing
/// outside the support of σ.
#[derive(Clone, Debug)]
pub struct PsiWitness {
    pub psi: HermitianMatrix,
    pub sigma_ref: DensityMatrix,
}

impl PsiWitness {
    /// `xψ + (1−x)P_σ`, which supports the same state for every `x ∈ [0, 1]`.
    pub fn blend(&self, x: f64) -> Result<PsiWitness> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange(format!("blend weight {x} outside [0, 1]")));
        }
        let p = DividedDifferenceKernel::new(&self.sigma_ref, RANK_TOL)?.support_projector();
        Ok(PsiWitness {
            psi: &self.psi.scale(x) + &p.scale(1.0 - x),
            sigma_ref: self.sigma_ref.clone(),
        })
    }

    /// `Tr ψσ`.
    pub fn level(&self) -> f64 {
        trace_inner(&self.psi, &self.sigma_ref).expect("same order")
    }

    /// `‖(I − P_σ)ψ‖_F`.
    pub fn leakage(&self) -> Result<f64> {
        let k = DividedDifferenceKernel::new(&self.sigma_ref, RANK_TOL)?;
        let p = k.support_projector();
        let outside = self.psi.matrix() - p.matrix() * self.psi.matrix();
        Ok(crate::linalg::fro(&outside))
    }
}

/// `ψ = P_σ(I − φ)P_σ`, rescaled so that `Tr ψσ = 1`.
///
/// For singular σ, φ must not couple the support and the kernel of σ
/// (`P φ (I−P) = 0`); its kernel block then has eigenvalues at most one, which
/// keeps `Tr ψσ′ ≤ 1` on the PPT set.
pub fn psi_from_phi(h: &Hyperplane) -> Result<PsiWitness> {
    let sigma = &h.sigma_ref;
    let kernel = DividedDifferenceKernel::new(sigma, RANK_TOL)?;
    let p = kernel.support_projector();
    if !kernel.is_full_rank() {
        let q = CMatrix::identity(sigma.order(), sigma.order()) - p.matrix();
        let coupling = crate::linalg::fro(&(p.matrix() * h.phi.matrix() * &q));
        if coupling > 1e-9 {
            return Err(Error::Precondition(format!(
                "φ couples supp σ and ker σ (‖Pφ(I−P)‖ = {coupling:e})"
            )));
        }
    }
    let id = HermitianMatrix::identity(sigma.dims().to_vec());
    let psi = kernel.compress(&(&id - &h.phi))?;
    let level = trace_inner(&psi, sigma)?;
    if level <= 0.0 {
        return Err(Error::WitnessMismatch(format!("Tr ψσ = {level} is not positive")));
    }
    let psi = psi.scale(1.0 / level);
    if psi.distance(&p) <= 1e-9 * (1.0 + p.frobenius_norm()) {
        return Err(Error::DegenerateWitness);
    }
    Ok(PsiWitness {
        psi,
        sigma_ref: sigma.clone(),
    })
}

/// `φ_a ⊗ φ_b` supporting `σ_a ⊗ σ_b` for a normalized witness `φ_b` that is
/// nonnegative on Bob's PPT set.
pub fn tensor_hyperplane(
    phi_a: &Hyperplane,
    phi_b: &HermitianMatrix,
    sigma_b: &DensityMatrix,
) -> Result<Hyperplane> {
    let na = phi_a.norm_sq();
    let nb = trace_inner(phi_b, phi_b)?;
    if (na - 1.0).abs() > 1e-10 || (nb - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!(
            "hyperplanes must have unit norm (Tr φ_a² = {na}, Tr φ_b² = {nb})"
        )));
    }
    phi_b.ensure_same_order(sigma_b)?;
    let sigma = DensityMatrix::new(phi_a.sigma_ref.kron(sigma_b))?;
    Ok(Hyperplane {
        phi: phi_a.phi.kron(phi_b),
        sigma_ref: sigma,
        kernel_coeffs: None,
        parties: phi_a.parties.clone(),
    })
}

/// The 6×6 state on `C² ⊗ C³` whose partial transpose has a two-dimensional
/// kernel.
pub fn example_sigma() -> DensityMatrix {
    const ROWS: [[f64; 6]; 6] = [
        [1.0, 0.0, 0.0, 0.0, 6.0, 8.0],
        [0.0, 1.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 100.0, 0.0, 0.0],
        [6.0, 0.0, 0.0, 0.0, 46.0, 60.0],
        [8.0, 0.0, 0.0, 0.0, 60.0, 80.0],
    ];
    let data = CMatrix::from_fn(6, 6, |i, j| Complex64::new(ROWS[i][j] / 229.0, 0.0));
    DensityMatrix::new_unchecked(HermitianMatrix::from_parts_unchecked(vec![2, 3], data))
}

/// Integer numerators of [`example_sigma`] over the common denominator 229.
pub fn example_numerators() -> [[i64; 6]; 6] {
    [
        [1, 0, 0, 0, 6, 8],
        [0, 1, 0, 1, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 1, 0, 100, 0, 0],
        [6, 0, 0, 0, 46, 60],
        [8, 0, 0, 0, 60, 80],
    ]
}

/// Real symmetric matrix with zero diagonal and the given eigenvalues
/// (which must sum to zero), built from `Q diag(λ) Qᵀ` by Givens rotations
/// that pin one diagonal entry to zero per step.
pub fn zero_diagonal_with_spectrum<R: Rng + ?Sized>(
    eigenvalues: &[f64],
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let m = eigenvalues.len();
    let total: f64 = eigenvalues.iter().sum();
    let scale = eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs())).max(1.0);
    if total.abs() > 1e-12 * scale * m as f64 {
        return Err(Error::Precondition(format!(
            "eigenvalues sum to {total}, zero diagonal needs a zero trace"
        )));
    }
    let g = DMatrix::<f64>::from_fn(m, m, |_, _| rng.sample(rand_distr::StandardNormal));
    let q = g.qr().q();
    let mut h = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(eigenvalues)) * q.transpose();
    for _ in 0..m {
        let diag: Vec<f64> = (0..m).map(|i| h[(i, i)]).collect();
        let (i, dmax) = diag
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (k, &d)| if d > acc.1 { (k, d) } else { acc });
        let (j, dmin) = diag
            .iter()
            .enumerate()
            .fold((0, f64::MAX), |acc, (k, &d)| if d < acc.1 { (k, d) } else { acc });
        if dmax.abs().max(dmin.abs()) <= 1e-14 * scale {
            break;
        }
        // rotate in the (i, j) plane so that the new (i, i) entry vanishes:
        // c·t² + 2b·t + a = 0 with a = h_ii > 0 > c = h_jj
        let (a, b, c) = (h[(i, i)], h[(i, j)], h[(j, j)]);
        let disc = (b * b - a * c).max(0.0);
        let t = (-b + disc.sqrt()) / c;
        let cs = 1.0 / (1.0 + t * t).sqrt();
        let sn = t * cs;
        let mut rot = DMatrix::<f64>::identity(m, m);
        rot[(i, i)] = cs;
        rot[(i, j)] = sn;
        rot[(j, i)] = -sn;
        rot[(j, j)] = cs;
        h = &rot * h * rot.transpose();
        h[(i, i)] = 0.0;
    }
    let h = (&h + h.transpose()) * 0.5;
    Ok(h)
}

const GEN_ATTEMPTS: usize = 32;

/// Full-rank state on `C² ⊗ C^m` with σ^Γ ⪰ 0 and `rank σ^Γ = 2m − k`.
///
/// Assembly: `A = I`, `B = UΛ^{1/2}` from the spectral decomposition of
/// `F = t₀D + H` (H zero-diagonal with m−1 positive eigenvalues, D diagonal
/// with distinct decreasing entries), `C = F + E` where `E = E₀ + E₁` has rank
/// `m − k` and `E₀ = −2λ_min(G)|u⟩⟨u|` flips the single negative eigenvalue of
/// `G = F − Λ`. t₀ starts at 1 and doubles until F ≻ 0 and G has inertia
/// (m−1, 1). The result is then balanced by the local congruence
/// `diag(α, 1) ⊗ I` and rotated by a random local unitary; neither changes
/// positivity or the rank of the partial transpose.
pub fn gen_boundary_state(m: usize, k: usize, seed: u64) -> Result<DensityMatrix> {
    if m < 2 || k >= m {
        return Err(Error::OutOfRange(format!(
            "need m ≥ 2 and 0 ≤ k ≤ m−1 (got m = {m}, k = {k})"
        )));
    }
    let mut last = String::new();
    for attempt in 0..GEN_ATTEMPTS {
        let sub_seed = seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(attempt as u64);
        match try_generate(m, k, sub_seed) {
            Ok(s) => return Ok(s),
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::GenerationFailed {
        attempts: GEN_ATTEMPTS,
        reason: last,
    })
}

fn try_generate(m: usize, k: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = seeded(seed);
    let mut lam: Vec<f64> = (0..m - 1).map(|_| rng.random_range(0.5..1.5)).collect();
    lam.push(-lam.iter().sum::<f64>());
    let h = zero_diagonal_with_spectrum(&lam, &mut rng)?;
    let mut d: Vec<f64> = (0..m).map(|_| rng.random_range(1.0..2.0)).collect();
    d.sort_by(|a, b| b.total_cmp(a));
    if d.windows(2).any(|w| w[0] - w[1] < 1e-3) {
        return Err(Error::Precondition("diagonal D needs distinct entries".into()));
    }

    let cplx = |x: &DMatrix<f64>| x.map(|v| Complex64::new(v, 0.0));
    let mut t0 = 1.0;
    let (u, lambda, g) = loop {
        if t0 > 1e8 {
            return Err(Error::Precondition("no t₀ gives G the required inertia".into()));
        }
        let f = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d)) * t0 + &h;
        let fh = HermitianMatrix::from_parts_unchecked(vec![m], cplx(&f));
        let spec = eigh(&fh)?;
        if spec.min() > 0.0 {
            let lambda = spec.eigenvalues.clone();
            let g = &fh
                - &HermitianMatrix::from_diagonal(vec![m], &lambda)
                    .expect("diagonal is hermitian");
            let gs = eigh(&g)?;
            let gscale = gs.max().abs().max(gs.min().abs());
            let pos = gs.eigenvalues.iter().filter(|&&x| x > 1e-9 * gscale).count();
            let neg = gs.eigenvalues.iter().filter(|&&x| x < -1e-9 * gscale).count();
            if pos == m - 1 && neg == 1 {
                break (spec.eigenvectors.clone(), lambda, gs);
            }
        }
        t0 *= 2.0;
    };

    let lm = g.min();
    let uvec = g.vector(m - 1);
    let mut e = (&uvec * uvec.adjoint()).scale(-2.0 * lm);
    if m - k > 1 {
        let w = ginibre(m, m - k - 1, &mut rng);
        e += &w * w.adjoint();
    }
    let sqrt_l = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        m,
        lambda.iter().map(|l| Complex64::new(l.sqrt(), 0.0)),
    ));
    let b = &u * sqrt_l;
    let f = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        m,
        lambda.iter().map(|&l| Complex64::new(l, 0.0)),
    )) * u.adjoint();
    let c = f + e;
    let n = 2 * m;
    let mut raw = CMatrix::zeros(n, n);
    raw.view_mut((0, 0), (m, m)).copy_from(&CMatrix::identity(m, m));
    raw.view_mut((0, m), (m, m)).copy_from(&b);
    raw.view_mut((m, 0), (m, m)).copy_from(&b.adjoint());
    raw.view_mut((m, m), (m, m)).copy_from(&c);
    let sigma = HermitianMatrix::from_parts_unchecked(vec![2, m], raw);

    let alpha = balance_factor(&sigma)?;
    let mut x = CMatrix::identity(n, n);
    for i in 0..m {
        x[(i, i)] = Complex64::new(alpha, 0.0);
    }
    let local = haar_unitary(2, &mut rng).kronecker(&haar_unitary(m, &mut rng));
    let sigma = sigma.congruence(&(local * x));
    let sigma = sigma.scale(1.0 / sigma.trace());

    verify_generated(&sigma, m, k)?;
    DensityMatrix::new(sigma)
}

fn condition(sigma: &HermitianMatrix, alpha: f64) -> Result<f64> {
    let n = sigma.order();
    let m = n / 2;
    let mut x = CMatrix::identity(n, n);
    for i in 0..m {
        x[(i, i)] = Complex64::new(alpha, 0.0);
    }
    let s = eigh(&sigma.congruence(&x))?;
    if s.min() <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(s.max() / s.min())
}

/// Golden-section search over `log α` for the congruence `diag(α,1)⊗I`
/// minimizing the condition number.
fn balance_factor(sigma: &HermitianMatrix) -> Result<f64> {
    let (mut lo, mut hi) = (-8.0f64, 8.0f64);
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - gr * (hi - lo);
    let mut d = lo + gr * (hi - lo);
    let mut fc = condition(sigma, c.exp())?;
    let mut fd = condition(sigma, d.exp())?;
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = condition(sigma, c.exp())?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = condition(sigma, d.exp())?;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

fn verify_generated(sigma: &HermitianMatrix, m: usize, k: usize) -> Result<()> {
    let s = eigh(sigma)?;
    if s.min() <= RANK_TOL * s.max() {
        return Err(Error::Precondition(format!("σ not positive definite ({:e})", s.min())));
    }
    let p = eigh(&partial_transpose(sigma, &[0])?)?;
    if p.min() < -RANK_TOL * p.max() {
        return Err(Error::Precondition(format!("σ^Γ not PSD ({:e})", p.min())));
    }
    let rank = p.eigenvalues.iter().filter(|&&l| l > RANK_TOL * p.max()).count();
    if rank != 2 * m - k {
        return Err(Error::Precondition(format!(
            "rank σ^Γ = {rank}, expected {}",
            2 * m - k
        )));
    }
    // a clear spectral gap keeps the kernel unambiguous
    if k > 0 && p.eigenvalues[2 * m - k - 1] < 1e-6 * p.max() {
        return Err(Error::Precondition("partial transpose spectrum has no clear gap".into()));
    }
    Ok(())
}

/// Singular boundary state on `C² ⊗ C^m` (m ≥ 2) together with a hyperplane
/// that does not couple its support and kernel, so that [`psi_from_phi`]
/// applies.
///
/// For m = 2 the state is classically correlated,
/// `p|a b⟩⟨a b| + (1−p)|a⊥ b⊥⟩⟨a⊥ b⊥|`, rotated so that its PT-kernel contains
/// a maximally entangled vector. For m ≥ 3 a full-rank two-qubit boundary
/// state is embedded in `C² ⊗ span{b₀, b₁}` and mixed with product states
/// `|a⊥ b_j⟩`, j ≥ 2, leaving `ker σ = |a⟩ ⊗ span{b_j : j ≥ 2}`.
pub fn gen_singular_boundary_state(m: usize, seed: u64) -> Result<(DensityMatrix, Hyperplane)> {
    if m < 2 {
        return Err(Error::OutOfRange(format!("need m ≥ 2 (got {m})")));
    }
    let mut rng = seeded(seed ^ 0x5151_5151);
    let n = 2 * m;
    let u_a = haar_unitary(2, &mut rng);
    let u_b = haar_unitary(m, &mut rng);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (core, v) = if m == 2 {
        let p = rng.random_range(0.3..0.7);
        let s = HermitianMatrix::from_diagonal(vec![2, 2], &[0.0, p, 1.0 - p, 0.0])?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_vec(vec![one * h, zero, zero, one * h]);
        (s, v)
    } else {
        let inner = gen_boundary_state(2, 1, seed)?;
        let v1 = pt_kernel(&inner, &[0], RANK_TOL)?.remove(0);
        // embed C² ⊗ C² into C² ⊗ C^m via b_j = e_j
        let mut iso = CMatrix::zeros(n, 4);
        for a in 0..2 {
            for b in 0..2 {
                iso[(a * m + b, a * 2 + b)] = one;
            }
        }
        let p = rng.random_range(0.6..0.9);
        let mut s = (&iso * inner.matrix() * iso.adjoint()).scale(p);
        let w = (1.0 - p) / (m - 2) as f64;
        for j in 2..m {
            s[(m + j, m + j)] += Complex64::new(w, 0.0);
        }
        (HermitianMatrix::from_parts_unchecked(vec![2, m], s), &iso * v1)
    };
    let sigma = core.congruence(&u_a.kronecker(&u_b));
    let sigma = DensityMatrix::new(sigma.scale(1.0 / sigma.trace()))?;
    // (U_A ⊗ U_B) σ (U_A ⊗ U_B)† has partial transpose conjugated by Ū_A ⊗ U_B
    let v_rot = u_a.map(|z| z.conj()).kronecker(&u_b) * v;
    let kernel = pt_kernel(&sigma, &[0], RANK_TOL)?;
    let coeffs: Vec<Complex64> = kernel.iter().map(|k| k.dotc(&v_rot)).collect();
    let h = hyperplane_from_kernel(&sigma, &coeffs, &[0])?;
    Ok((sigma, h))
}

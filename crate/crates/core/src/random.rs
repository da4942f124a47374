//! Seeded random matrices: Gaussian ensembles, Haar unitaries via QR, and
//! random states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, CVector, DensityMatrix, HermitianMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal absorbed into Q.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random hermitian matrix `(G + G†)/2` with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> HermitianMatrix {
    let n = dims.iter().product();
    HermitianMatrix::from_parts_unchecked(dims, ginibre(n, n, rng))
}

/// Random density matrix of the given rank, `W W† / Tr(W W†)` with Gaussian `W`.
pub fn random_density<R: Rng + ?Sized>(
    dims: Vec<usize>,
    rank: usize,
    rng: &mut R,
) -> DensityMatrix {
    let n: usize = dims.iter().product();
    let w = ginibre(n, rank.clamp(1, n), rng);
    let m = HermitianMatrix::from_parts_unchecked(dims, &w * w.adjoint());
    let tr = m.trace();
    DensityMatrix::new_unchecked(m.scale(1.0 / tr))
}

/// Random full-rank state mixed with the identity so that every eigenvalue
/// is at least `floor / n`.
pub fn random_full_rank_density<R: Rng + ?Sized>(
    dims: Vec<usize>,
    floor: f64,
    rng: &mut R,
) -> DensityMatrix {
    let n: usize = dims.iter().product();
    let base = random_density(dims.clone(), n, rng);
    let mixed = &base.scale(1.0 - floor) + &HermitianMatrix::identity(dims).scale(floor / n as f64);
    DensityMatrix::new_unchecked(mixed)
}

pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let v = gaussian_vector(n, rng);
    let norm = v.norm();
    v.unscale(norm)
}

/// Tensor product of independent random unit vectors, one per factor.
pub fn random_product_vector<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> CVector {
    let mut v = CVector::from_element(1, Complex64::new(1.0, 0.0));
    for &d in dims {
        v = v.kronecker(&random_unit_vector(d, rng));
    }
    v
}

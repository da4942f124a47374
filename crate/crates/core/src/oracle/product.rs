use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::{eigh, CMatrix, CVector, DensityMatrix, HermitianMatrix};
use crate::random::{random_unit_vector, seeded};

const SWEEP_LIMIT: usize = 1000;
const FIXED_POINT_GAIN: f64 = 1e-12;

fn kron_all(vs: &[CVector]) -> CVector {
    let mut out = CVector::from_element(1, Complex64::new(1.0, 0.0));
    for v in vs {
        out = out.kronecker(v);
    }
    out
}

/// Columns `a_1 ⊗ … ⊗ e_p ⊗ … ⊗ a_s`, p running over party `i`'s basis.
fn embedding(factors: &[CVector], i: usize) -> CMatrix {
    let left = kron_all(&factors[..i]);
    let right = kron_all(&factors[i + 1..]);
    let d = factors[i].len();
    let id = CMatrix::identity(d, d);
    left.kronecker(&id).kronecker(&right)
}

fn climb(x: &HermitianMatrix, seed: u64) -> Result<(f64, CVector)> {
    let mut rng = seeded(seed);
    let dims = x.dims();
    let mut factors: Vec<CVector> = dims.iter().map(|&d| random_unit_vector(d, &mut rng)).collect();
    let mut value = x.expectation(&kron_all(&factors));
    for _ in 0..SWEEP_LIMIT {
        let before = value;
        for i in 0..dims.len() {
            let v = embedding(&factors, i);
            let local = HermitianMatrix::from_parts_unchecked(
                vec![dims[i]],
                v.adjoint() * x.matrix() * &v,
            );
            let spec = eigh(&local)?;
            factors[i] = spec.vector(0);
            value = spec.max();
        }
        if value - before < FIXED_POINT_GAIN {
            break;
        }
    }
    Ok((value, kron_all(&factors)))
}

/// Maximizes `⟨a_1 ⊗ … ⊗ a_s| x |a_1 ⊗ … ⊗ a_s⟩` over unit vectors by
/// alternating largest-eigenvector updates, one factor at a time, from
/// `restarts` random starts. Returns the best value and its product state.
///
/// The search is a local method, so the value is a lower bound on the
/// maximum of `Tr(xσ′)` over separable σ′.
pub fn product_state_max(
    x: &HermitianMatrix,
    restarts: usize,
    seed: u64,
) -> Result<(f64, DensityMatrix)> {
    let runs: Vec<Result<(f64, CVector)>> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| climb(x, seed.wrapping_mul(0x9E37_79B9).wrapping_add(r)))
        .collect();
    let mut best: Option<(f64, CVector)> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.0 > b.0) {
            best = Some(run);
        }
    }
    let (value, v) = best.expect("at least one restart");
    Ok((value, DensityMatrix::pure(x.dims().to_vec(), &v)?))
}

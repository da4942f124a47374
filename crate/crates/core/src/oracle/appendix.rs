use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::MatrixFile;
use crate::linalg::{eigh, mat_log_support, pow_psd, sqrt_psd, trace_inner, HermitianMatrix, RANK_TOL};
use crate::random::{ginibre, haar_unitary, random_density, seeded};

const PSD_TOL: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-10;
const ZERO_TOL: f64 = 1e-9;
const FLAT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct PropertyTally {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    /// Worst observed value of the checked quantity (minimum eigenvalue,
    /// residual norm or margin, depending on the property).
    pub worst: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub property: String,
    pub s: f64,
    pub value: f64,
    pub matrices: Vec<MatrixFile>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AppendixReport {
    pub samples: usize,
    pub n: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub properties: Vec<PropertyTally>,
    pub min_concavity_margin: f64,
    pub counterexamples: Vec<Counterexample>,
    pub passed: bool,
}

struct Tally {
    name: &'static str,
    checked: usize,
    violations: usize,
    worst: f64,
    lower_is_worse: bool,
}

impl Tally {
    fn new(name: &'static str, lower_is_worse: bool) -> Self {
        Tally {
            name,
            checked: 0,
            violations: 0,
            worst: if lower_is_worse { f64::INFINITY } else { 0.0 },
            lower_is_worse,
        }
    }

    fn record(&mut self, value: f64, ok: bool) -> bool {
        self.checked += 1;
        self.worst = if self.lower_is_worse {
            self.worst.min(value)
        } else {
            self.worst.max(value)
        };
        if !ok {
            self.violations += 1;
        }
        ok
    }

    fn finish(self) -> PropertyTally {
        PropertyTally {
            name: self.name.to_string(),
            checked: self.checked,
            violations: self.violations,
            worst: self.worst,
        }
    }
}

/// `R(A,B) = A + B − (A^{1/2}B^{1/2} + B^{1/2}A^{1/2})`.
pub fn remainder(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let ra = sqrt_psd(a)?;
    let rb = sqrt_psd(b)?;
    let cross = ra.matrix() * rb.matrix();
    let sym = &cross + cross.adjoint();
    let sym = HermitianMatrix::from_hermitian_part(a.dims().to_vec(), &sym)?;
    Ok(&(a + b) - &sym)
}

fn min_eig(m: &HermitianMatrix) -> Result<f64> {
    Ok(eigh(m)?.min())
}

fn random_pd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    let g = ginibre(n, n, rng);
    let w = HermitianMatrix::from_parts_unchecked(vec![n], &g * g.adjoint()).scale(1.0 / n as f64);
    &w + &HermitianMatrix::identity(vec![n]).scale(1e-2)
}

/// Checks the matrix square-root remainder and the strong concavity
/// statements for powers and the logarithm on `samples` random pairs of
/// `n × n` positive definite matrices.
pub fn appendix_suite(samples: usize, n: usize, seed: u64) -> Result<AppendixReport> {
    if !(2..=16).contains(&n) {
        return Err(Error::OutOfRange(format!("n = {n} must lie in [2, 16]")));
    }
    let mut rng = seeded(seed);
    let mut psd = Tally::new("remainder_psd", true);
    let mut ident = Tally::new("square_identity", false);
    let mut zero = Tally::new("remainder_zero_iff_equal", false);
    let mut half = Tally::new("power_concavity_t_1_2", true);
    let mut quarter = Tally::new("power_concavity_t_1_4", true);
    let mut logc = Tally::new("log_concavity", true);
    let mut strict = Tally::new("trace_log_strict_concavity", true);
    let mut flat = Tally::new("singular_block_flatness", false);
    let mut examples = Vec::new();
    let dims = vec![n];

    for _ in 0..samples {
        let a = random_pd(n, &mut rng);
        let b = random_pd(n, &mut rng);
        let s: f64 = rng.random_range(0.01..0.99);
        let mut fail = |prop: &str, value: f64, ms: &[&HermitianMatrix]| {
            examples.push(Counterexample {
                property: prop.to_string(),
                s,
                value,
                matrices: ms.iter().map(|m| MatrixFile::from(*m)).collect(),
            })
        };

        let r = remainder(&a, &b)?;
        let lr = min_eig(&r)?;
        if !psd.record(lr, lr >= -PSD_TOL) {
            fail(psd.name, lr, &[&a, &b]);
        }

        let ra = sqrt_psd(&a)?;
        let rb = sqrt_psd(&b)?;
        let x = &ra.scale(1.0 - s) + &rb.scale(s);
        let lhs = HermitianMatrix::from_hermitian_part(dims.clone(), &(x.matrix() * x.matrix()))?;
        let mix = &a.scale(1.0 - s) + &b.scale(s);
        let inner = &mix - &r.scale((1.0 - s) * s);
        let res = lhs.distance(&inner);
        if !ident.record(res, res <= IDENTITY_TOL) {
            fail(ident.name, res, &[&a, &b]);
        }

        let self_r = remainder(&a, &a)?.frobenius_norm();
        let other_r = r.frobenius_norm();
        let separated = a.distance(&b) > ZERO_TOL;
        let ok = self_r <= ZERO_TOL && (!separated || other_r > ZERO_TOL);
        if !zero.record(self_r, ok) {
            fail(zero.name, self_r, &[&a, &b]);
        }

        for (tally, t) in [(&mut half, 0.5), (&mut quarter, 0.25)] {
            let left = &pow_psd(&a, t)?.scale(1.0 - s) + &pow_psd(&b, t)?.scale(s);
            let middle = pow_psd(&inner, t)?;
            let right = pow_psd(&mix, t)?;
            let gap = min_eig(&(&middle - &left))?.min(min_eig(&(&right - &middle))?);
            if !tally.record(gap, gap >= -PSD_TOL) {
                fail(tally.name, gap, &[&a, &b]);
            }
        }

        let left = &mat_log_support(&a, RANK_TOL)?.scale(1.0 - s)
            + &mat_log_support(&b, RANK_TOL)?.scale(s);
        let middle = mat_log_support(&inner, RANK_TOL)?;
        let right = mat_log_support(&mix, RANK_TOL)?;
        let gap = min_eig(&(&middle - &left))?.min(min_eig(&(&right - &middle))?);
        if !logc.record(gap, gap >= -PSD_TOL) {
            fail(logc.name, gap, &[&a, &b]);
        }

        let rho = random_density(dims.clone(), n, &mut rng);
        let sig = a.scale(1.0 / a.trace());
        let eta = b.scale(1.0 / b.trace());
        let avg = &sig.scale(0.5) + &eta.scale(0.5);
        let margin = trace_inner(&rho, &mat_log_support(&avg, RANK_TOL)?)?
            - 0.5
                * (trace_inner(&rho, &mat_log_support(&sig, RANK_TOL)?)?
                    + trace_inner(&rho, &mat_log_support(&eta, RANK_TOL)?)?);
        if !strict.record(margin, margin > 0.0) {
            fail(strict.name, margin, &[&rho, &sig, &eta]);
        }

        let dev = block_flatness(n, &mut rng)?;
        if !flat.record(dev, dev <= FLAT_TOL) {
            fail(flat.name, dev, &[]);
        }
    }

    let min_margin = strict.worst;
    let properties: Vec<PropertyTally> = [psd, ident, zero, half, quarter, logc, strict, flat]
        .into_iter()
        .map(Tally::finish)
        .collect();
    let passed = properties.iter().all(|p| p.violations == 0);
    let tolerances = BTreeMap::from([
        ("psd_order".to_string(), PSD_TOL),
        ("square_identity".to_string(), IDENTITY_TOL),
        ("remainder_zero".to_string(), ZERO_TOL),
        ("block_flatness".to_string(), FLAT_TOL),
    ]);
    Ok(AppendixReport {
        samples,
        n,
        seed,
        tolerances,
        properties,
        min_concavity_margin: min_margin,
        counterexamples: examples,
        passed,
    })
}

/// For singular `ρ = U diag(ρ₁₁, 0) U†` and `ξ = U diag(β, ξ₂) U†`,
/// `η = U diag(β, η₂) U†`, returns the largest deviation of
/// `Tr ρ log(tξ + (1−t)η)` from `Tr ρ₁₁ log β` over a grid of t.
fn block_flatness<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<f64> {
    let r = n / 2;
    let rho11 = random_density(vec![r], r, rng);
    let beta = random_pd(r, rng);
    let xi2 = random_pd(n - r, rng);
    let eta2 = random_pd(n - r, rng);
    let u = haar_unitary(n, rng);
    let embed = |top: &HermitianMatrix, bottom: Option<&HermitianMatrix>| {
        let mut m = crate::linalg::CMatrix::zeros(n, n);
        m.view_mut((0, 0), (r, r)).copy_from(top.matrix());
        if let Some(b) = bottom {
            m.view_mut((r, r), (n - r, n - r)).copy_from(b.matrix());
        }
        HermitianMatrix::from_hermitian_part(vec![n], &(&u * m * u.adjoint()))
    };
    let rho = embed(&rho11, None)?;
    let xi = embed(&beta, Some(&xi2))?;
    let eta = embed(&beta, Some(&eta2))?;
    let target = trace_inner(&rho11, &mat_log_support(&beta, RANK_TOL)?)?;
    let mut worst = 0.0f64;
    for i in 0..=8 {
        let t = i as f64 / 8.0;
        let mid = &xi.scale(t) + &eta.scale(1.0 - t);
        let val = trace_inner(&rho, &mat_log_support(&mid, RANK_TOL)?)?;
        worst = worst.max((val - target).abs());
    }
    Ok(worst)
}

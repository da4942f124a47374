//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line with
//! the worst observed quantities; the process fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use ree_css::boundary::{
    default_hyperplane, gen_boundary_state, gen_singular_boundary_state, hyperplane_from_kernel,
    example_numerators, example_sigma, psi_from_phi, pt_kernel,
};
use ree_css::css::{
    build_family, css_condition_value, family_state, ree_closed, segment_family, CssFamily,
    Witness,
};
use ree_css::linalg::{eigh, fro, partial_transpose, CVector, RANK_TOL};
use ree_css::lsigma::{expansion_residual, DividedDifferenceKernel};
use ree_css::oracle::{
    appendix_suite, css_numeric, gradient_check, product_state_max, rel_entropy, OracleConfig,
};
use ree_css::random::{random_full_rank_density, seeded};
use ree_css::DensityMatrix;

type Outcome = Result<String, String>;
type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn full_rank_family(m: usize, k: usize, seed: u64) -> CssFamily {
    let s = gen_boundary_state(m, k, seed).expect("generator");
    build_family(Witness::Hyperplane(default_hyperplane(&s, &[0]).expect("hyperplane")))
        .expect("family")
}

struct Instance {
    family: CssFamily,
    x: f64,
    rho: DensityMatrix,
    seed: u64,
}

fn criterion_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    let draws = (0..50u64)
        .map(|s| (2usize, 1usize, s))
        .chain((0..20u64).map(|s| (3usize, 1 + (s % 2) as usize, 100 + s)));
    for (m, k, seed) in draws {
        let family = full_rank_family(m, k, seed);
        for frac in [0.25, 0.5, 1.0] {
            let x = frac * family.x_max;
            let rho = family_state(&family, x).expect("family state");
            out.push(Instance {
                family: family.clone(),
                x,
                rho,
                seed,
            });
        }
    }
    out
}

fn criterion_1(instances: &[Instance]) -> Outcome {
    let (mut worst_d, mut worst_o, mut worst_t) = (0.0f64, 0.0f64, 0.0f64);
    for inst in instances {
        let cfg = OracleConfig {
            seed: inst.seed,
            ..OracleConfig::default()
        };
        let start = Instant::now();
        let res = css_numeric(&inst.rho, &[0], &cfg).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed().as_secs_f64();
        let d = res.minimizer.distance(&inst.family.sigma);
        let o = (res.objective - ree_closed(&inst.family, inst.x).unwrap()).abs();
        worst_d = worst_d.max(d);
        worst_o = worst_o.max(o);
        worst_t = worst_t.max(elapsed);
        ensure(d <= 1e-4 && o <= 1e-6 && elapsed <= 2.0, || {
            format!("seed {} x {:.4}: ‖σ*−σ‖={d:.2e} |Δobj|={o:.2e} time={elapsed:.2}s", inst.seed, inst.x)
        })?;
    }
    Ok(format!(
        "{} instances, max ‖σ*−σ‖_F={worst_d:.2e}, max |obj−ree|={worst_o:.2e}, max time={worst_t:.3}s",
        instances.len()
    ))
}

fn criterion_2(instances: &[Instance]) -> Outcome {
    let (mut worst_v, mut worst_a) = (f64::MIN, 0.0f64);
    for inst in instances {
        let c = css_condition_value(&inst.rho, &inst.family.sigma, 200, inst.seed)
            .map_err(|e| e.to_string())?;
        worst_v = worst_v.max(c.value);
        worst_a = worst_a.max((c.at_sigma - 1.0).abs());
        ensure(c.value <= 1.0 + 1e-7 && (c.at_sigma - 1.0).abs() <= 1e-9, || {
            format!("seed {}: max={} Tr σL(ρ)={}", inst.seed, c.value, c.at_sigma)
        })?;
    }
    Ok(format!(
        "max_σ′ Tr σ′L_σ(ρ) ≤ {worst_v:.12}, max |Tr σL_σ(ρ)−1|={worst_a:.1e}"
    ))
}

fn criterion_3() -> Outcome {
    let s = example_sigma();
    let num = example_numerators();
    let diag: i64 = (0..6).map(|i| num[i][i]).sum();
    ensure(diag == 229, || format!("diagonal numerators sum to {diag}"))?;
    ensure((s.trace() - 1.0).abs() <= 1e-12, || format!("trace {}", s.trace()))?;
    let lmin = eigh(&s).unwrap().min();
    ensure(lmin > 0.0, || format!("λ_min(σ) = {lmin}"))?;
    let pt = eigh(&partial_transpose(&s, &[0]).unwrap()).unwrap();
    let small = pt.eigenvalues.iter().filter(|&&l| l < RANK_TOL * pt.max()).count();
    ensure(pt.min() >= -RANK_TOL * pt.max(), || format!("σ^Γ min {}", pt.min()))?;
    ensure(small == 2, || format!("{small} small eigenvalues of σ^Γ"))?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut worst_off = 0.0f64;
    let mut worst_min = f64::MAX;
    for c in [[one, zero], [zero, one]] {
        let h = hyperplane_from_kernel(&s, &c, &[0]).map_err(|e| e.to_string())?;
        worst_off = worst_off.max(h.offset().abs());
        let (neg_max, _) = product_state_max(&(-&h.phi), 200, 3).unwrap();
        worst_min = worst_min.min(-neg_max);
    }
    ensure(worst_off <= 1e-10, || format!("|Tr φσ| = {worst_off:e}"))?;
    ensure(worst_min >= -1e-7, || format!("product minimum {worst_min:e}"))?;
    Ok(format!(
        "λ_min(σ)={lmin:.3e}, 2 kernel eigenvalues of σ^Γ, max |Tr φσ|={worst_off:.1e}, min product value={worst_min:.2e}"
    ))
}

fn criterion_4() -> Outcome {
    let mut min_lambda = f64::MAX;
    for i in 0..200u64 {
        let m = 2 + (i % 3) as usize;
        let k = ((i / 3) % m as u64) as usize;
        let s = gen_boundary_state(m, k, 5000 + i).map_err(|e| e.to_string())?;
        let l = eigh(&s).unwrap().min();
        let pt = eigh(&partial_transpose(&s, &[0]).unwrap()).unwrap();
        let rank = pt.eigenvalues.iter().filter(|&&v| v > RANK_TOL * pt.max()).count();
        min_lambda = min_lambda.min(l);
        ensure(l > 0.0 && rank == 2 * m - k && rank > m, || {
            format!("draw {i} (m={m}, k={k}): λ_min={l:e}, rank σ^Γ={rank}")
        })?;
    }
    Ok(format!("200 draws, rank σ^Γ = 2m−k ≥ m+1 throughout, min λ_min(σ)={min_lambda:.2e}"))
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let s = gen_boundary_state(2, 1, 7000 + i).map_err(|e| e.to_string())?;
        let dim = pt_kernel(&s, &[0], RANK_TOL).map_err(|e| e.to_string())?.len();
        ensure(dim == 1, || format!("state {i}: kernel dimension {dim}"))?;
        let f = build_family(Witness::Hyperplane(default_hyperplane(&s, &[0]).unwrap())).unwrap();
        let rho = family_state(&f, 0.5 * f.x_max).unwrap();
        let run = |seed| {
            css_numeric(
                &rho,
                &[0],
                &OracleConfig {
                    restarts: 1,
                    seed,
                    ..OracleConfig::default()
                },
            )
        };
        let a = run(2 * i + 1).map_err(|e| e.to_string())?;
        let b = run(2 * i + 2).map_err(|e| e.to_string())?;
        let d = a.minimizer.distance(&b.minimizer);
        worst = worst.max(d);
        ensure(d <= 1e-5, || format!("state {i}: starts disagree by {d:e}"))?;
    }
    Ok(format!("50 states with one-dimensional ker σ^Γ, max start disagreement {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    let mut min_t_max = f64::MAX;
    for i in 0..20u64 {
        let (m, k) = if i < 10 { (2, 1) } else { (3, 1 + (i % 2) as usize) };
        let f = full_rank_family(m, k, 300 + i);
        let x = 0.5 * f.x_max;
        let rho = family_state(&f, x).unwrap();
        let t_max = f.t_max(x).unwrap();
        min_t_max = min_t_max.min(t_max);
        ensure(t_max > 1.0, || format!("family {i}: t_max = {t_max}"))?;
        for t in [0.5, 1.0, t_max] {
            let rt = segment_family(&rho, &f.sigma, t).map_err(|e| e.to_string())?;
            let res = css_numeric(
                &rt,
                &[0],
                &OracleConfig {
                    seed: i,
                    ..OracleConfig::default()
                },
            )
            .map_err(|e| e.to_string())?;
            let d = res.minimizer.distance(&f.sigma);
            worst = worst.max(d);
            ensure(d <= 1e-4, || format!("family {i}, t = {t}: ‖σ*−σ‖={d:e}"))?;
        }
    }
    Ok(format!("20 families, min t_max={min_t_max:.3}, max ‖σ*−σ‖_F={worst:.2e}"))
}

fn criterion_7() -> Outcome {
    let mut worst_leak = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut worst_obj = 0.0f64;
    let mut count = 0;
    for m in [2usize, 3] {
        for seed in 0..3u64 {
            let (s, h) = gen_singular_boundary_state(m, seed).map_err(|e| e.to_string())?;
            let k = DividedDifferenceKernel::new(&s, RANK_TOL).unwrap();
            ensure(!k.is_full_rank(), || format!("m={m} seed={seed}: σ has full rank"))?;
            let w = psi_from_phi(&h).map_err(|e| e.to_string())?;
            ensure(w.leakage().unwrap() <= 1e-9 && (w.level() - 1.0).abs() <= 1e-9, || {
                "invalid ψ".to_string()
            })?;
            let f = build_family(Witness::Psi(w)).map_err(|e| e.to_string())?;
            let mut rng = seeded(seed + 17);
            let xi = random_full_rank_density(s.dims().to_vec(), 0.2, &mut rng);
            for frac in [0.5, 1.0] {
                let x = frac * f.x_max;
                let rho = family_state(&f, x).unwrap();
                let leak = fro(&(rho.matrix() * k.kernel_basis()));
                worst_leak = worst_leak.max(leak);
                ensure(leak <= 1e-10, || format!("ρ leaks onto ker σ by {leak:e}"))?;
                let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4]
                    .iter()
                    .map(|&t: &f64| {
                        expansion_residual(&s, &xi, &rho, t, RANK_TOL).unwrap()
                            / (t * t * t.ln().abs())
                    })
                    .collect();
                let r = ratios.iter().cloned().fold(0.0, f64::max);
                worst_ratio = worst_ratio.max(r);
                ensure(r <= 1e2 && ratios[2] <= 2.0 * ratios[0] + 1.0, || {
                    format!("expansion ratios {ratios:?}")
                })?;
                let res = css_numeric(
                    &rho,
                    &[0],
                    &OracleConfig {
                        seed,
                        ..OracleConfig::default()
                    },
                )
                .map_err(|e| e.to_string())?;
                let direct = rel_entropy(&rho, &s).unwrap();
                let diff = (res.objective - direct).abs();
                worst_obj = worst_obj.max(diff);
                ensure(diff <= 1e-5, || {
                    format!("m={m} seed={seed} x={x:.3}: oracle {} vs S(ρ‖σ) {direct}", res.objective)
                })?;
                count += 1;
            }
        }
    }
    Ok(format!(
        "{count} singular family states, max ‖ρK‖={worst_leak:.1e}, max residual/(t²|log t|)={worst_ratio:.3}, max |obj−S(ρ‖σ)|={worst_obj:.2e}"
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let rep = appendix_suite(1000, 6, 7).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let violations: usize = rep.properties.iter().map(|p| p.violations).sum();
    ensure(rep.passed && violations == 0 && elapsed <= 60.0, || {
        format!("{violations} violations, {elapsed:.1}s")
    })?;
    Ok(format!(
        "1000 pairs at n=6, {} checks, 0 violations, min concavity margin {:.2e}, {elapsed:.2}s",
        rep.properties.len(),
        rep.min_concavity_margin
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = seeded(99);
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let dims = if i % 2 == 0 { vec![2, 2] } else { vec![2, 3] };
        let rho = random_full_rank_density(dims.clone(), 0.05, &mut rng);
        let sigma = random_full_rank_density(dims, 0.2, &mut rng);
        let e = gradient_check(&rho, &sigma, 20, i).map_err(|e| e.to_string())?;
        worst = worst.max(e);
    }
    ensure(worst <= 1e-5, || format!("max relative error {worst:e}"))?;
    Ok(format!("400 directional derivatives, max relative error {worst:.2e}"))
}

fn criterion_10() -> Outcome {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let v = CVector::from_vec(vec![z, Complex64::new(h, 0.0), Complex64::new(-h, 0.0), z]);
    let rho = DensityMatrix::pure(vec![2, 2], &v).unwrap();
    let res = css_numeric(&rho, &[0], &OracleConfig::default()).map_err(|e| e.to_string())?;
    let bits = res.objective / std::f64::consts::LN_2;
    ensure((bits - 1.0).abs() <= 1e-4, || format!("E_R = {bits} bits"))?;
    let c = css_condition_value(&rho, &res.minimizer, 200, 1).map_err(|e| e.to_string())?;
    ensure(c.value <= 1.0 + 1e-4, || format!("condition value at minimizer {}", c.value))?;
    Ok(format!(
        "E_R={bits:.8} bits, condition value at minimizer {:.8}",
        c.value
    ))
}

fn main() {
    let start = Instant::now();
    let instances = criterion_instances();
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("inverse formula against the numerical oracle", Box::new(|| criterion_1(&instances))),
        ("optimality condition on family states", Box::new(|| criterion_2(&instances))),
        ("6×6 example boundary state", Box::new(criterion_3)),
        ("generated boundary state ranks", Box::new(criterion_4)),
        ("two-qubit kernel and minimizer uniqueness", Box::new(criterion_5)),
        ("segment extension up to t_max", Box::new(criterion_6)),
        ("singular branch", Box::new(criterion_7)),
        ("matrix concavity suite", Box::new(criterion_8)),
        ("gradient against finite differences", Box::new(criterion_9)),
        ("singlet relative entropy of entanglement", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS ({name}; {secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL ({name}; {secs:.1}s): {detail}", i + 1)
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed, {:.1}s total",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

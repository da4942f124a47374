//! Command-line surface. Matrices travel as JSON files (see [`crate::io`]);
//! every command prints a JSON report on stdout that records the tolerances
//! it used.
//!
//! Exit codes: 0 success, 1 domain or input error, 2 failed verification.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::boundary::{
    boundary_membership, gen_boundary_state, hyperplane_from_kernel, example_sigma,
    psi_from_phi, pt_kernel, Hyperplane,
};
use crate::css::{build_family, css_condition_value, family_state, ree_closed, Witness};
use crate::error::{Error, Result};
use crate::io::{read_density, read_matrix, write_json, write_matrix};
use crate::linalg::{eigh, partial_transpose, DensityMatrix, RANK_TOL};
use crate::lsigma::DividedDifferenceKernel;
use crate::oracle::{appendix_suite, css_numeric, rel_entropy, OracleConfig};

const CONDITION_TOL: f64 = 1e-7;
const PPT_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "ree-css", version, about = "Closest PPT states and relative entropy of entanglement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Cut {
    /// Parties to transpose, one-based and comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    parties: Vec<usize>,
}

impl Cut {
    fn zero_based(&self) -> Result<Vec<usize>> {
        self.parties
            .iter()
            .map(|&p| {
                p.checked_sub(1)
                    .ok_or_else(|| Error::OutOfRange("party indices are one-based".into()))
            })
            .collect()
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a full-rank 2⊗m boundary state with rank σ^Γ = 2m − k.
    GenBoundary {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract a supporting hyperplane from the kernel of σ^Γ.
    Hyperplane {
        #[arg(long)]
        sigma: PathBuf,
        #[command(flatten)]
        cut: Cut,
        /// JSON `{"re": [...], "im": [...]}` over the kernel basis.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build ρ(x, σ) from a boundary state and a hyperplane.
    InverseCss {
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        /// Family parameter.
        #[arg(long, conflicts_with = "x_frac")]
        x: Option<f64>,
        /// Family parameter as a fraction of x_max.
        #[arg(long)]
        x_frac: Option<f64>,
        /// Accept x = 0, which returns σ itself.
        #[arg(long)]
        allow_endpoint: bool,
        #[command(flatten)]
        cut: Cut,
        #[arg(long)]
        out: PathBuf,
    },
    /// Relative entropy S(ρ‖σ).
    Ree {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        /// Report in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Check the optimality condition for σ as closest PPT state of ρ.
    VerifyCss {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = CONDITION_TOL)]
        tol: f64,
        #[command(flatten)]
        cut: Cut,
    },
    /// Minimize S(ρ‖σ′) numerically over PPT states.
    OracleCss {
        #[arg(long)]
        rho: PathBuf,
        #[command(flatten)]
        cut: Cut,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        tol_step: Option<f64>,
        #[arg(long)]
        bits: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Matrix concavity property suite.
    AppendixSuite {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write the 6×6 example boundary state on C²⊗C³.
    ExampleSigma {
        #[arg(long)]
        out: PathBuf,
    },
}

enum Outcome {
    Ok(Value),
    Failed(Value),
}

#[derive(Deserialize)]
struct CoeffFile {
    re: Vec<f64>,
    #[serde(default)]
    im: Vec<f64>,
}

fn read_coeffs(path: &PathBuf) -> Result<Vec<Complex64>> {
    let c: CoeffFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if !c.im.is_empty() && c.im.len() != c.re.len() {
        return Err(Error::Format("coefficient re and im lengths differ".into()));
    }
    Ok(c.re
        .iter()
        .enumerate()
        .map(|(i, &r)| Complex64::new(r, c.im.get(i).copied().unwrap_or(0.0)))
        .collect())
}

fn membership_name(sigma: &DensityMatrix, parties: &[usize]) -> Result<Value> {
    Ok(serde_json::to_value(boundary_membership(sigma, parties, RANK_TOL)?)?)
}

fn nats_and_bits(v: f64) -> Value {
    json!({ "nats": v, "bits": v / std::f64::consts::LN_2 })
}

fn execute(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::GenBoundary { m, k, seed, out } => {
            let s = gen_boundary_state(m, k, seed)?;
            write_matrix(&out, &s)?;
            let pt = eigh(&partial_transpose(&s, &[0])?)?;
            let rank = pt.eigenvalues.iter().filter(|&&l| l > RANK_TOL * pt.max()).count();
            Ok(Outcome::Ok(json!({
                "command": "gen-boundary",
                "m": m, "k": k, "seed": seed,
                "min_eigenvalue": eigh(&s)?.min(),
                "pt_rank": rank,
                "membership": membership_name(&s, &[0])?,
                "tolerances": { "rank": RANK_TOL },
                "out": out,
            })))
        }
        Command::Hyperplane {
            sigma,
            cut,
            coeffs,
            out,
        } => {
            let parties = cut.zero_based()?;
            let s = read_density(&sigma)?;
            let kernel = pt_kernel(&s, &parties, RANK_TOL)?;
            let coeffs = match coeffs {
                Some(p) => read_coeffs(&p)?,
                None => {
                    let mut c = vec![Complex64::new(0.0, 0.0); kernel.len()];
                    c[0] = Complex64::new(1.0, 0.0);
                    c
                }
            };
            let h = hyperplane_from_kernel(&s, &coeffs, &parties)?;
            h.validate()?;
            if let Some(out) = &out {
                write_matrix(out, &h.phi)?;
            }
            Ok(Outcome::Ok(json!({
                "command": "hyperplane",
                "kernel_dimension": kernel.len(),
                "norm_sq": h.norm_sq(),
                "offset": h.offset(),
                "tolerances": { "rank": RANK_TOL, "norm": 1e-10, "offset": 1e-9 },
                "out": out,
            })))
        }
        Command::InverseCss {
            sigma,
            phi,
            x,
            x_frac,
            allow_endpoint,
            cut,
            out,
        } => {
            let parties = cut.zero_based()?;
            let s = read_density(&sigma)?;
            let phi = read_matrix(&phi)?;
            let h = Hyperplane {
                phi,
                sigma_ref: s.clone(),
                kernel_coeffs: None,
                parties: parties.clone(),
            };
            let full_rank = DividedDifferenceKernel::new(&s, RANK_TOL)?.is_full_rank();
            let witness = if full_rank {
                Witness::Hyperplane(h)
            } else {
                Witness::Psi(psi_from_phi(&h)?)
            };
            let f = build_family(witness)?;
            let x = match (x, x_frac) {
                (Some(x), None) => x,
                (None, Some(frac)) => frac * f.x_max,
                _ => return Err(Error::OutOfRange("give exactly one of --x, --x-frac".into())),
            };
            if x == 0.0 && !allow_endpoint {
                return Err(Error::OutOfRange(
                    "x must exceed 0 for an entangled output (use --allow-endpoint)".into(),
                ));
            }
            let rho = family_state(&f, x)?;
            write_matrix(&out, &rho)?;
            let ree = ree_closed(&f, x)?;
            let pt_min = eigh(&partial_transpose(&rho, &parties)?)?.min();
            let mut report = json!({
                "command": "inverse-css",
                "branch": if full_rank { "full_rank" } else { "singular" },
                "x": x,
                "x_max": f.x_max,
                "t_max": if x > 0.0 { json!(f.x_max / x) } else { Value::Null },
                "ree": nats_and_bits(ree),
                "pt_min_eigenvalue": pt_min,
                "tolerances": { "rank": RANK_TOL, "witness": 1e-9 },
                "out": out,
            });
            if x == 0.0 {
                report["warning"] = json!("x = 0 returns σ, which is separable");
            }
            Ok(Outcome::Ok(report))
        }
        Command::Ree { rho, sigma, bits } => {
            let r = read_density(&rho)?;
            let s = read_density(&sigma)?;
            let v = rel_entropy(&r, &s)?;
            let (value, unit) = if bits {
                (v / std::f64::consts::LN_2, "bits")
            } else {
                (v, "nats")
            };
            Ok(Outcome::Ok(json!({
                "command": "ree",
                "value": if value.is_finite() { json!(value) } else { json!("inf") },
                "unit": unit,
                "tolerances": { "support": crate::oracle::SUPPORT_LEAK_TOL, "rank": RANK_TOL },
            })))
        }
        Command::VerifyCss {
            rho,
            sigma,
            restarts,
            seed,
            tol,
            cut,
        } => {
            let r = read_density(&rho)?;
            let s = read_density(&sigma)?;
            let pt_min = eigh(&partial_transpose(&s, &cut.zero_based()?)?)?.min();
            let ppt = pt_min >= -PPT_TOL;
            let c = css_condition_value(&r, &s, restarts, seed)?;
            let holds = ppt && c.holds(tol);
            let report = json!({
                "command": "verify-css",
                "max_value": c.value,
                "at_sigma": c.at_sigma,
                "sigma_pt_min_eigenvalue": pt_min,
                "sigma_is_ppt": ppt,
                "holds": holds,
                "restarts": restarts,
                "tolerances": { "max_value": tol, "at_sigma": 1e-9, "ppt": PPT_TOL },
            });
            Ok(if holds {
                Outcome::Ok(report)
            } else {
                Outcome::Failed(report)
            })
        }
        Command::OracleCss {
            rho,
            cut,
            restarts,
            seed,
            max_iters,
            tol_step,
            bits,
            out,
            report,
        } => {
            let parties = cut.zero_based()?;
            let r = read_density(&rho)?;
            let defaults = OracleConfig::default();
            let cfg = OracleConfig {
                restarts,
                seed,
                max_iters: max_iters.unwrap_or(defaults.max_iters),
                tol_step: tol_step.unwrap_or(defaults.tol_step),
                ..defaults
            };
            let res = css_numeric(&r, &parties, &cfg)?;
            if let Some(out) = &out {
                write_matrix(out, &res.minimizer)?;
            }
            let scale = if bits { std::f64::consts::LN_2 } else { 1.0 };
            let body = json!({
                "command": "oracle-css",
                "objective": res.objective / scale,
                "unit": if bits { "bits" } else { "nats" },
                "iterations": res.iterations,
                "converged": res.converged,
                "grad_residual": res.grad_residual,
                "restart_objectives": res.restart_objectives.iter().map(|v| v / scale).collect::<Vec<_>>(),
                "minimizer_membership": membership_name(&res.minimizer, &parties)?,
                "config": cfg,
                "out": out,
            });
            if let Some(p) = &report {
                write_json(p, &body)?;
            }
            Ok(if res.converged {
                Outcome::Ok(body)
            } else {
                Outcome::Failed(body)
            })
        }
        Command::AppendixSuite {
            samples,
            n,
            seed,
            report,
        } => {
            let rep = appendix_suite(samples, n, seed)?;
            if let Some(p) = &report {
                write_json(p, &rep)?;
            }
            let mut body = serde_json::to_value(&rep)?;
            body["command"] = json!("appendix-suite");
            Ok(if rep.passed {
                Outcome::Ok(body)
            } else {
                Outcome::Failed(body)
            })
        }
        Command::ExampleSigma { out } => {
            let s = example_sigma();
            write_matrix(&out, &s)?;
            Ok(Outcome::Ok(json!({
                "command": "example-sigma",
                "dims": s.dims(),
                "denominator": 229,
                "out": out,
            })))
        }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out`, diagnostics to `err`. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match execute(cli.command) {
        Ok(Outcome::Ok(v)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            0
        }
        Ok(Outcome::Failed(v)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            let _ = writeln!(err, "error: verification failed");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn run() -> i32 {
    run_with(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

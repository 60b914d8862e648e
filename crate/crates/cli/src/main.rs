//! Command-line front end: build and persist Gibbs models, run computations
//! and verification suites, and sweep truncation dimensions.
//!
//! Reports are JSON, sweeps are CSV; identical (command, seed) pairs produce
//! identical numeric output.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use orlicz_qig::bkm::{bkm_inner, entropy_sum_identity_gap, relative_entropy, von_neumann_entropy};
use orlicz_qig::duality::{conjugate_phi, dual_luxemburg_norm, ConjugateOptions, CotangentVector};
use orlicz_qig::linalg::{operator_norm, random_hermitian, ComplexMatrix};
use orlicz_qig::model::Family;
use orlicz_qig::verify::{run_suite, Check, Suite, VerifyConfig};
use orlicz_qig::young::{luxemburg_norm, phi};
use orlicz_qig::{GibbsModel, HermitianMatrix};

#[derive(Parser)]
#[command(
    name = "orlicz-qig",
    version,
    about = "Quantum Orlicz geometry toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a Gibbs model and write it to a JSON file
    Model(ModelArgs),
    /// Run a single computation against a stored model
    Compute(ComputeArgs),
    /// Run seeded property suites; exit nonzero iff any check fails
    Verify(VerifyArgs),
    /// Evaluate one quantity across truncation dimensions, as CSV
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// oscillator | random
    #[arg(long)]
    family: String,
    /// Oscillator level count
    #[arg(long, default_value_t = 8)]
    levels: usize,
    /// Oscillator frequency
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Random-family dimension
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random-family entry scale
    #[arg(long, default_value_t = 0.5)]
    scale: f64,
    /// Output path for the model JSON
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ComputeArgs {
    /// Path to a model JSON file
    #[arg(long)]
    model: String,
    /// phi | norm | dualnorm | bkm | entropy | conjugate
    #[arg(long)]
    task: String,
    /// Perturbation recipe: zero | identity | diag | h0 | pauli-x | pauli-y |
    /// pauli-z | random | file:<path>
    #[arg(long, default_value = "zero")]
    x: String,
    /// Second direction for the bkm task
    #[arg(long)]
    y: Option<String>,
    /// Scale applied to the generated perturbation
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Seed for the random recipe
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Luxemburg threshold
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// BKM prefactor
    #[arg(long, default_value_t = 0.5)]
    prefactor: f64,
    /// Write the report JSON here as well as to stdout
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Comma-separated dimensions
    #[arg(long, default_value = "2,4,8,16")]
    dims: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the report JSON here
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// oscillator | random
    #[arg(long, default_value = "oscillator")]
    family: String,
    /// Comma-separated dimensions
    #[arg(long, default_value = "4,8,12,16,20,24,28,32")]
    dims: String,
    /// bkm | norm | phi | beta-profile | kato-profile
    #[arg(long)]
    quantity: String,
    /// Perturbation recipe, rebuilt at every dimension (file recipes are
    /// rejected because they cannot extend across dimensions)
    #[arg(long, default_value = "identity")]
    x: String,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Schatten exponent for beta-profile
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Resolvent offset for kato-profile
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Write the CSV here as well as to stdout
    #[arg(long)]
    out: Option<String>,
}

/// Check as serialized into reports: infinite margins are flagged rather
/// than dropped by JSON.
#[derive(Serialize, Deserialize)]
struct ReportCheck {
    name: String,
    margin: f64,
    infinite: bool,
    pass: bool,
}

impl From<&Check> for ReportCheck {
    fn from(c: &Check) -> Self {
        Self {
            name: c.name.clone(),
            margin: if c.margin.is_finite() { c.margin } else { 0.0 },
            infinite: !c.margin.is_finite(),
            pass: c.pass,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RunReport {
    command: String,
    inputs: BTreeMap<String, String>,
    results: BTreeMap<String, f64>,
    checks: Vec<ReportCheck>,
    timing_ms: f64,
    version: String,
}

impl RunReport {
    fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            inputs: BTreeMap::new(),
            results: BTreeMap::new(),
            checks: Vec::new(),
            timing_ms: 0.0,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    fn emit(&self, out: &Option<String>) -> Result<(), String> {
        let json = serde_json::to_string_pretty(self).map_err(|e| e.to_string())?;
        println!("{json}");
        if let Some(path) = out {
            std::fs::write(path, &json).map_err(|e| format!("cannot write {path}: {e}"))?;
        }
        Ok(())
    }
}

fn embed_pauli(dim: usize, p: HermitianMatrix) -> Result<HermitianMatrix, String> {
    if dim < 2 {
        return Err("pauli recipes need dimension >= 2".into());
    }
    let mut entries = vec![num_complex::Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..2 {
        for j in 0..2 {
            entries[i * dim + j] = p.entry(i, j);
        }
    }
    HermitianMatrix::from_entries(dim, entries).map_err(|e| e.to_string())
}

/// Builds the perturbation named by `spec` at the model's dimension.
fn build_x(spec: &str, m: &GibbsModel, seed: u64, scale: f64) -> Result<HermitianMatrix, String> {
    let dim = m.dim();
    let base = match spec {
        "zero" => HermitianMatrix::zeros(dim),
        "identity" => HermitianMatrix::identity(dim),
        "diag" => {
            let d: Vec<f64> = (0..dim)
                .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
                .collect();
            HermitianMatrix::from_diag(&d)
        }
        "h0" => m.h0().clone(),
        "pauli-x" => embed_pauli(dim, HermitianMatrix::pauli_x())?,
        "pauli-y" => embed_pauli(dim, HermitianMatrix::pauli_y())?,
        "pauli-z" => embed_pauli(dim, HermitianMatrix::pauli_z())?,
        "random" => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            random_hermitian(dim, &mut rng, 1.0)
        }
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {path}: {e}"))?;
                let pairs: Vec<[f64; 2]> =
                    serde_json::from_str(&text).map_err(|e| format!("bad matrix file: {e}"))?;
                let n = (pairs.len() as f64).sqrt().round() as usize;
                if n * n != pairs.len() || n != dim {
                    return Err(format!(
                        "matrix file holds {} entries, expected {}x{} for this model",
                        pairs.len(),
                        dim,
                        dim
                    ));
                }
                let entries = pairs
                    .iter()
                    .map(|&[re, im]| num_complex::Complex64::new(re, im))
                    .collect();
                HermitianMatrix::from_entries(dim, entries).map_err(|e| e.to_string())?
            } else {
                return Err(format!("unknown perturbation recipe '{other}'"));
            }
        }
    };
    Ok(base.scale(scale))
}

fn cmd_model(args: &ModelArgs) -> Result<ExitCode, String> {
    let family: Family = args
        .family
        .parse()
        .map_err(|e: orlicz_qig::Error| e.to_string())?;
    let m = match family {
        Family::Oscillator => GibbsModel::make_oscillator(args.levels, args.omega),
        Family::Random => GibbsModel::make_random_model(args.dim, args.seed, args.scale),
        Family::Custom => return Err("custom models are loaded from files, not generated".into()),
    }
    .map_err(|e| e.to_string())?;
    println!(
        "family: {}  dim: {}  shift: {:.12}",
        m.family(),
        m.dim(),
        m.shift()
    );
    println!("beta    Tr rho^beta");
    for &(b, v) in m.beta_profile() {
        println!("{b:.2}    {v:.12}");
    }
    if let Some(path) = &args.out {
        std::fs::write(path, m.to_json()).map_err(|e| format!("cannot write {path}: {e}"))?;
        println!("wrote {path}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_compute(args: &ComputeArgs) -> Result<ExitCode, String> {
    let start = Instant::now();
    let text = std::fs::read_to_string(&args.model)
        .map_err(|e| format!("cannot read {}: {e}", args.model))?;
    let m = GibbsModel::from_json(&text).map_err(|e| e.to_string())?;
    let x = build_x(&args.x, &m, args.seed, args.scale)?;

    let mut report = RunReport::new("compute");
    for (k, v) in [
        ("model", args.model.clone()),
        ("task", args.task.clone()),
        ("x", args.x.clone()),
        ("y", args.y.clone().unwrap_or_default()),
        ("scale", args.scale.to_string()),
        ("seed", args.seed.to_string()),
        ("a", args.a.to_string()),
        ("prefactor", args.prefactor.to_string()),
    ] {
        report.inputs.insert(k.into(), v);
    }

    let err = |e: orlicz_qig::Error| e.to_string();
    match args.task.as_str() {
        "phi" => {
            let p = phi(&m, &x).map_err(err)?;
            report
                .results
                .insert("phi".into(), if p.saturated { f64::MAX } else { p.value });
            report
                .results
                .insert("saturated".into(), if p.saturated { 1.0 } else { 0.0 });
        }
        "norm" => {
            let n = luxemburg_norm(&m, &x, args.a).map_err(err)?;
            report.results.insert("norm".into(), n);
        }
        "dualnorm" => {
            let v = CotangentVector::new(x.clone());
            let n = dual_luxemburg_norm(&m, &v, args.a).map_err(err)?;
            report.results.insert("dualnorm".into(), n);
        }
        "bkm" => {
            let yspec = args.y.as_deref().unwrap_or("pauli-x");
            let y = build_x(yspec, &m, args.seed + 1, args.scale)?;
            let v = bkm_inner(m.rho0(), &x, &y, args.prefactor).map_err(err)?;
            report.results.insert("bkm".into(), v);
        }
        "entropy" => {
            let s = m.perturb(&x).map_err(err)?;
            report.results.insert(
                "von-neumann".into(),
                von_neumann_entropy(m.rho0()).map_err(err)?,
            );
            report.results.insert(
                "relative-entropy".into(),
                relative_entropy(&s.rho_x, m.rho0()).map_err(err)?,
            );
            report.results.insert(
                "entropy-sum-gap".into(),
                entropy_sum_identity_gap(&m, &s).map_err(err)?,
            );
        }
        "conjugate" => {
            let v = CotangentVector::new(x.clone());
            let c = conjugate_phi(&m, &v, ConjugateOptions::default()).map_err(err)?;
            report.results.insert(
                "conjugate".into(),
                if c.value.is_finite() {
                    c.value
                } else {
                    f64::MAX
                },
            );
            report
                .results
                .insert("iterations".into(), c.iterations as f64);
            report
                .results
                .insert("converged".into(), if c.converged { 1.0 } else { 0.0 });
        }
        other => return Err(format!("unknown task '{other}'")),
    }
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    report.emit(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    let dims: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    let dims = dims.map_err(|e| format!("bad dims '{s}': {e}"))?;
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err("dims must be a nonempty list of integers >= 2".into());
    }
    Ok(dims)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, String> {
    let start = Instant::now();
    let suite: Suite = args
        .suite
        .parse()
        .map_err(|e: orlicz_qig::Error| e.to_string())?;
    let cfg = VerifyConfig {
        trials: args.trials,
        dims: parse_dims(&args.dims)?,
        seed: args.seed,
    };
    let checks = run_suite(suite, &cfg).map_err(|e| e.to_string())?;

    let mut report = RunReport::new("verify");
    for (k, v) in [
        ("suite", args.suite.clone()),
        ("trials", args.trials.to_string()),
        ("dims", args.dims.clone()),
        ("seed", args.seed.to_string()),
    ] {
        report.inputs.insert(k.into(), v);
    }
    let mut all_pass = true;
    for c in &checks {
        all_pass &= c.pass;
        println!(
            "{} {}  margin={:+.3e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.margin
        );
        report.checks.push(ReportCheck::from(c));
    }
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        std::fs::write(path, json).map_err(|e| format!("cannot write {path}: {e}"))?;
    }
    println!(
        "{}: {}/{} checks passed",
        if all_pass { "OK" } else { "FAILED" },
        checks.iter().filter(|c| c.pass).count(),
        checks.len()
    );
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode, String> {
    if args.x.starts_with("file:") {
        return Err(
            "file perturbations cannot extend across dimensions; use a named recipe".into(),
        );
    }
    let dims = parse_dims(&args.dims)?;
    let family: Family = args
        .family
        .parse()
        .map_err(|e: orlicz_qig::Error| e.to_string())?;
    let err = |e: orlicz_qig::Error| e.to_string();

    let mut rows = String::from("dim,value,drift\n");
    let mut prev: Option<f64> = None;
    for &dim in &dims {
        let m = match family {
            Family::Oscillator => GibbsModel::make_oscillator(dim, args.omega),
            Family::Random => GibbsModel::make_random_model(dim, args.seed, 0.5),
            Family::Custom => return Err("sweeps need a generative family".into()),
        }
        .map_err(err)?;
        let x = build_x(&args.x, &m, args.seed, args.scale)?;
        let value = match args.quantity.as_str() {
            "bkm" => bkm_inner(m.rho0(), &x, &x, 0.5).map_err(err)?,
            "norm" => luxemburg_norm(&m, &x, 1.0).map_err(err)?,
            "phi" => phi(&m, &x).map_err(err)?.value,
            "beta-profile" => {
                let lam = m.h0_eigs().eigenvalues.clone();
                lam.iter().map(|&l| (-args.beta * l).exp()).sum()
            }
            "kato-profile" => {
                let shifted = m.h0().add_scaled_identity(args.b);
                let d = orlicz_qig::linalg::eigh(&shifted).map_err(err)?;
                let half = d.apply(|l| l.powf(-0.5)).map_err(err)?;
                ComplexMatrix::from(&half)
                    .mul(&ComplexMatrix::from(&x))
                    .mul(&ComplexMatrix::from(&half))
                    .into_hermitian()
                    .and_then(|h| operator_norm(&h))
                    .map_err(err)?
            }
            other => return Err(format!("unknown quantity '{other}'")),
        };
        let drift = prev
            .map(|p| format!("{:.12e}", (value - p).abs()))
            .unwrap_or_default();
        rows.push_str(&format!("{dim},{value:.15e},{drift}\n"));
        prev = Some(value);
    }
    print!("{rows}");
    if let Some(path) = &args.out {
        std::fs::write(path, &rows).map_err(|e| format!("cannot write {path}: {e}"))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Model(a) => cmd_model(a),
        Command::Compute(a) => cmd_compute(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

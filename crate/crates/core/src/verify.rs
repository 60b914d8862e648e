//! Seeded property suites behind the `verify` command.
//!
//! Every check reports a slack: the signed distance to its failure boundary,
//! already folded with the check's tolerance, so `margin >= 0` means pass.
//! Trials are independent; trial `i` derives its sub-seed as `seed + i` and
//! results are aggregated by a worst-case minimum, which is order-independent,
//! so parallel execution cannot change the report.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bkm::{
    alpha_entropy, bkm_inner, bkm_quadrature_oracle, entropy_sum_identity_gap, generalized_mean,
    generalized_mean_quadrature, relative_entropy,
};
use crate::classical::{
    builtin, equivalent, is_delta2, legendre_dual_1d, luxemburg_norm_discrete, BracketParams,
    Builtin, DiscreteMeasureSpace, Equivalence,
};
use crate::duality::{
    bogoliubov_peierls_margin, conjugate_diag_oracle, conjugate_phi, double_conjugate_gap,
    golden_thompson_margin, holder_orlicz_margin, youngs_inequality_margin, ConjugateOptions,
    CotangentVector,
};
use crate::error::{Error, Result};
use crate::linalg::{eigh, operator_norm, random_hermitian, ComplexMatrix, HermitianMatrix};
use crate::model::GibbsModel;
use crate::young::{luxemburg_norm, phi, phi_gradient};

/// One verification check: `margin` is slack (tolerance already applied),
/// nonnegative iff the check passes.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Check {
    pub name: String,
    pub margin: f64,
    pub pass: bool,
}

impl Check {
    fn slack(name: impl Into<String>, margin: f64) -> Self {
        Self {
            name: name.into(),
            margin,
            pass: margin >= 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub trials: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            dims: vec![2, 4, 8, 16],
            seed: 42,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    YoungAxioms,
    NormAxioms,
    Equivalence,
    Duality,
    Inequalities,
    Classical,
    Geometry,
    Structure,
    Sweeps,
    All,
}

impl Suite {
    pub const NAMES: &'static [&'static str] = &[
        "young-axioms",
        "norm-axioms",
        "equivalence",
        "duality",
        "inequalities",
        "classical",
        "geometry",
        "structure",
        "sweeps",
        "all",
    ];

    fn basic() -> &'static [Suite] {
        &[
            Suite::YoungAxioms,
            Suite::NormAxioms,
            Suite::Equivalence,
            Suite::Duality,
            Suite::Inequalities,
            Suite::Classical,
            Suite::Geometry,
            Suite::Structure,
            Suite::Sweeps,
        ]
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Suite::YoungAxioms => "young-axioms",
            Suite::NormAxioms => "norm-axioms",
            Suite::Equivalence => "equivalence",
            Suite::Duality => "duality",
            Suite::Inequalities => "inequalities",
            Suite::Classical => "classical",
            Suite::Geometry => "geometry",
            Suite::Structure => "structure",
            Suite::Sweeps => "sweeps",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "young-axioms" => Ok(Suite::YoungAxioms),
            "norm-axioms" => Ok(Suite::NormAxioms),
            "equivalence" => Ok(Suite::Equivalence),
            "duality" => Ok(Suite::Duality),
            "inequalities" => Ok(Suite::Inequalities),
            "classical" => Ok(Suite::Classical),
            "geometry" => Ok(Suite::Geometry),
            "structure" => Ok(Suite::Structure),
            "sweeps" => Ok(Suite::Sweeps),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidArgument(format!("unknown suite '{other}'"))),
        }
    }
}

fn thread_count(n: usize) -> usize {
    let avail = std::thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1);
    let cap = std::env::var("ORLICZ_QIG_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(avail);
    avail.min(cap).min(n).max(1)
}

/// Worst-case slack over `trials` independent sub-seeded trials, optionally
/// fanned out over worker threads. `f` must be pure in its sub-seed.
fn par_min<F>(trials: usize, seed: u64, f: F) -> Result<f64>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    let trials = trials.max(1);
    let nt = thread_count(trials);
    if nt <= 1 {
        let mut m = f64::INFINITY;
        for i in 0..trials {
            m = m.min(f(seed + i as u64)?);
        }
        return Ok(m);
    }
    let results: Vec<Result<f64>> = std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = (0..nt)
            .map(|w| {
                s.spawn(move || {
                    let mut m = f64::INFINITY;
                    let mut i = w;
                    while i < trials {
                        m = m.min(f(seed + i as u64)?);
                        i += nt;
                    }
                    Ok(m)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut m = f64::INFINITY;
    for r in results {
        m = m.min(r?);
    }
    Ok(m)
}

fn model_for(dim: usize, sub: u64) -> Result<GibbsModel> {
    GibbsModel::make_random_model(dim, sub, 0.5)
}

fn rng_for(sub: u64) -> ChaCha8Rng {
    // decorrelate from the model seed stream
    ChaCha8Rng::seed_from_u64(sub.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    match suite {
        Suite::YoungAxioms => suite_young_axioms(cfg),
        Suite::NormAxioms => suite_norm_axioms(cfg),
        Suite::Equivalence => suite_equivalence(cfg),
        Suite::Duality => suite_duality(cfg),
        Suite::Inequalities => suite_inequalities(cfg),
        Suite::Classical => suite_classical(cfg),
        Suite::Geometry => suite_geometry(cfg),
        Suite::Structure => suite_structure(cfg),
        Suite::Sweeps => suite_sweeps(),
        Suite::All => {
            let mut out = Vec::new();
            for &s in Suite::basic() {
                out.extend(run_suite(s, cfg)?);
            }
            Ok(out)
        }
    }
}

fn suite_young_axioms(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &dim in &cfg.dims {
        let zero = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let p = phi(&m, &HermitianMatrix::zeros(dim))?;
            Ok(1e-12 - p.value.abs())
        })?;
        checks.push(Check::slack(
            format!("young-axioms/phi-at-zero/dim{dim}"),
            zero,
        ));

        let even = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let x = random_hermitian(dim, &mut rng, 0.7);
            let a = phi(&m, &x)?.value;
            let b = phi(&m, &x.scale(-1.0))?.value;
            Ok(1e-12 * (1.0 + a.abs()) - (a - b).abs())
        })?;
        checks.push(Check::slack(
            format!("young-axioms/evenness/dim{dim}"),
            even,
        ));

        let convex = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let x = random_hermitian(dim, &mut rng, 0.7);
            let y = random_hermitian(dim, &mut rng, 0.7);
            let t: f64 = rng.gen_range(0.0..1.0);
            let mix = &x.scale(t) + &y.scale(1.0 - t);
            let lhs = t * phi(&m, &x)?.value + (1.0 - t) * phi(&m, &y)?.value;
            Ok(lhs - phi(&m, &mix)?.value + 1e-9)
        })?;
        checks.push(Check::slack(
            format!("young-axioms/convexity/dim{dim}"),
            convex,
        ));
    }
    Ok(checks)
}

fn suite_norm_axioms(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &dim in &cfg.dims {
        let homo = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let x = random_hermitian(dim, &mut rng, 0.6);
            let lam: f64 = rng.gen_range(0.2..2.5);
            let n = luxemburg_norm(&m, &x, 1.0)?;
            let nl = luxemburg_norm(&m, &x.scale(lam), 1.0)?;
            Ok(1e-9 * (1.0 + lam * n) - (nl - lam * n).abs())
        })?;
        checks.push(Check::slack(
            format!("norm-axioms/homogeneity/dim{dim}"),
            homo,
        ));

        let tri = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let x = random_hermitian(dim, &mut rng, 0.6);
            let y = random_hermitian(dim, &mut rng, 0.6);
            let nx = luxemburg_norm(&m, &x, 1.0)?;
            let ny = luxemburg_norm(&m, &y, 1.0)?;
            let ns = luxemburg_norm(&m, &(&x + &y), 1.0)?;
            Ok(nx + ny + 1e-9 - ns)
        })?;
        checks.push(Check::slack(format!("norm-axioms/triangle/dim{dim}"), tri));

        let def = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let x = random_hermitian(dim, &mut rng, 0.6);
            let n = luxemburg_norm(&m, &x, 1.0)?;
            if n <= 0.0 {
                return Ok(1.0);
            }
            // push the norm below 1e-8 and confirm the operator norm follows
            let tiny = x.scale(1e-9 / n);
            let n_tiny = luxemburg_norm(&m, &tiny, 1.0)?;
            if n_tiny > 1e-8 {
                return Ok(1e-8 - n_tiny);
            }
            Ok(1e-6 - operator_norm(&tiny)?)
        })?;
        checks.push(Check::slack(
            format!("norm-axioms/definiteness/dim{dim}"),
            def,
        ));
    }
    Ok(checks)
}

fn suite_equivalence(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &dim in &cfg.dims {
        for (a, b) in [(1.0, 0.5), (1.0, 0.3)] {
            let slack = par_min(cfg.trials, cfg.seed, |sub| {
                let m = model_for(dim, sub)?;
                let mut rng = rng_for(sub);
                let x = random_hermitian(dim, &mut rng, 0.6);
                let na = luxemburg_norm(&m, &x, a)?;
                let nb = luxemburg_norm(&m, &x, b)?;
                let upper = (a / b) * na + 1e-9 - nb;
                let order = nb + 1e-9 - na;
                Ok(upper.min(order))
            })?;
            checks.push(Check::slack(
                format!("equivalence/bounds-a{a}-b{b}/dim{dim}"),
                slack,
            ));
        }
    }
    // the identity norm has a model-independent closed form
    let m = model_for(2, cfg.seed)?;
    let id = HermitianMatrix::identity(2);
    let n1 = luxemburg_norm(&m, &id, 1.0)?;
    checks.push(Check::slack(
        "equivalence/identity-norm-a1",
        1e-8 - (n1 - 1.0 / 2.0f64.acosh()).abs(),
    ));
    let n05 = luxemburg_norm(&m, &id, 0.5)?;
    checks.push(Check::slack(
        "equivalence/identity-norm-a0.5",
        1e-8 - (n05 - 1.0 / 1.5f64.acosh()).abs(),
    ));
    Ok(checks)
}

fn suite_duality(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let dims = &cfg.dims;

    // optimizer against the commuting arcsinh oracle
    let oracle = par_min(cfg.trials.min(50), cfg.seed, |sub| {
        let dim = dims[(sub - cfg.seed) as usize % dims.len()];
        let mut rng = rng_for(sub);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1..1.0)).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect()
        };
        let rho = draw(&mut rng);
        let sig = draw(&mut rng);
        let m = GibbsModel::make_custom(HermitianMatrix::from_diag(
            &rho.iter().map(|&r| -r.ln()).collect::<Vec<_>>(),
        ))?;
        let v = CotangentVector::from_sigma(&m, &HermitianMatrix::from_diag(&sig))?;
        let got = conjugate_phi(&m, &v, ConjugateOptions::default())?;
        let want = conjugate_diag_oracle(&rho, &sig)?;
        Ok(1e-6 - (got.value - want).abs())
    })?;
    checks.push(Check::slack("duality/conjugate-vs-diag-oracle", oracle));

    let m = GibbsModel::make_custom(HermitianMatrix::zeros(2))?;
    let v = CotangentVector::from_sigma(&m, &HermitianMatrix::from_diag(&[0.75, 0.25]))?;
    let spot = conjugate_phi(&m, &v, ConjugateOptions::default())?;
    checks.push(Check::slack(
        "duality/conjugate-spot",
        1e-6 - (spot.value - 0.12257192377990683).abs(),
    ));

    for &dim in dims {
        let grad = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let x = random_hermitian(dim, &mut rng, 0.6);
            let b = random_hermitian(dim, &mut rng, 1.0);
            let g = phi_gradient(&m, &x)?;
            let dd = crate::linalg::trace_pair(&g, &b)?;
            let h = 1e-5;
            let fp = phi(&m, &(&x + &b.scale(h)))?.value;
            let fm = phi(&m, &(&x + &b.scale(-h)))?.value;
            let fd = (fp - fm) / (2.0 * h);
            Ok(1e-6 - (dd - fd).abs() / (1.0 + dd.abs()))
        })?;
        checks.push(Check::slack(
            format!("duality/gradient-check/dim{dim}"),
            grad,
        ));
    }
    Ok(checks)
}

fn suite_inequalities(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let dims = cfg.dims.clone();
    let pick = |sub: u64| dims[(sub - cfg.seed) as usize % dims.len()];

    let young = par_min(cfg.trials, cfg.seed, |sub| {
        let dim = pick(sub);
        let m = model_for(dim, sub)?;
        let mut rng = rng_for(sub);
        let x = random_hermitian(dim, &mut rng, 0.7);
        let v = CotangentVector::new(random_hermitian(dim, &mut rng, 0.3));
        Ok(youngs_inequality_margin(&m, &x, &v)? + 1e-7)
    })?;
    checks.push(Check::slack("inequalities/young", young));

    let holder = par_min(cfg.trials, cfg.seed, |sub| {
        let dim = pick(sub);
        let m = model_for(dim, sub)?;
        let mut rng = rng_for(sub);
        let x = random_hermitian(dim, &mut rng, 0.6);
        let v = CotangentVector::new(random_hermitian(dim, &mut rng, 0.2));
        Ok(holder_orlicz_margin(&m, &x, &v)? + 1e-6)
    })?;
    checks.push(Check::slack("inequalities/hoelder-orlicz", holder));

    let bp = par_min(cfg.trials, cfg.seed, |sub| {
        let dim = pick(sub);
        let m = model_for(dim, sub)?;
        let mut rng = rng_for(sub);
        let x = random_hermitian(dim, &mut rng, 0.8);
        Ok(bogoliubov_peierls_margin(&m, &x)? + 1e-10)
    })?;
    checks.push(Check::slack("inequalities/bogoliubov-peierls", bp));

    let gt = par_min(cfg.trials, cfg.seed, |sub| {
        let dim = pick(sub);
        let mut rng = rng_for(sub);
        let a = random_hermitian(dim, &mut rng, 0.8);
        let b = random_hermitian(dim, &mut rng, 0.8);
        Ok(golden_thompson_margin(&a, &b)? + 1e-10)
    })?;
    checks.push(Check::slack("inequalities/golden-thompson", gt));

    let gt_spot = golden_thompson_margin(&HermitianMatrix::pauli_z(), &HermitianMatrix::pauli_x())?;
    checks.push(Check::slack(
        "inequalities/golden-thompson-spot",
        1e-6 - (gt_spot - 0.4058285778664894).abs(),
    ));

    let bidual = par_min(cfg.trials, cfg.seed, |sub| {
        let dim = pick(sub);
        let m = model_for(dim, sub)?;
        let mut rng = rng_for(sub);
        let x = random_hermitian(dim, &mut rng, 0.6);
        let matched = CotangentVector::new(phi_gradient(&m, &x)?);
        let gap = double_conjugate_gap(&m, &x, &[matched])?;
        // the matched probe must close the gap without overshooting Phi
        Ok((1e-5 - gap).min(gap + 1e-7))
    })?;
    checks.push(Check::slack("inequalities/double-conjugate", bidual));

    Ok(checks)
}

fn suite_classical(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let phi2 = builtin(Builtin::Phi2)?;
    let phi3 = builtin(Builtin::Phi3)?;

    let mut worst = f64::INFINITY;
    for k in 1..=16 {
        let y = 0.25 * k as f64;
        let dual = legendre_dual_1d(&phi3, y, &BracketParams::default());
        worst = worst.min(1e-6 - (dual - phi2.eval(y)).abs());
    }
    checks.push(Check::slack("classical/phi3-dual-is-phi2", worst));

    let grid = log_grid(1.0, 80.0, 48);
    let verdicts = [
        (Builtin::Power(2.0), true),
        (Builtin::Phi3, true),
        (Builtin::Phi1, false),
        (Builtin::Phi2, false),
    ];
    let mut ok = true;
    for (b, want) in verdicts {
        let (got, _) = is_delta2(&builtin(b)?, 1.0, &grid)?;
        ok &= got == want;
    }
    checks.push(Check::slack(
        "classical/delta2-verdicts",
        if ok { 1.0 } else { -1.0 },
    ));

    let egrid = log_grid(1.0, 40.0, 32);
    let phi1 = builtin(Builtin::Phi1)?;
    let eq = match equivalent(&phi1, &phi2, 1.0, &egrid)? {
        Equivalence::Equivalent { c, big_c } => {
            let mut witness_ok = true;
            for &x in &egrid {
                witness_ok &= phi1.eval(c * x) <= phi2.eval(x) + 1e-9;
                witness_ok &= phi2.eval(x) <= phi1.eval(big_c * x) + 1e-9;
            }
            witness_ok
        }
        Equivalence::NotEquivalent { .. } => false,
    };
    checks.push(Check::slack(
        "classical/phi1-phi2-equivalent",
        if eq { 1.0 } else { -1.0 },
    ));

    let discrete = par_min(cfg.trials, cfg.seed, |sub| {
        let mut rng = rng_for(sub);
        let n = rng.gen_range(2..8);
        let mu = DiscreteMeasureSpace::new((0..n).map(|_| rng.gen_range(0.1..1.0)).collect())?;
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let phi1 = builtin(Builtin::Phi1)?;
        let nu = luxemburg_norm_discrete(&u, &mu, &phi1, 1.0)?;
        let nv = luxemburg_norm_discrete(&v, &mu, &phi1, 1.0)?;
        let lam: f64 = rng.gen_range(0.2..2.5);
        let ul: Vec<f64> = u.iter().map(|&x| lam * x).collect();
        let nl = luxemburg_norm_discrete(&ul, &mu, &phi1, 1.0)?;
        let homo = 1e-9 * (1.0 + lam * nu) - (nl - lam * nu).abs();
        let sum: Vec<f64> = u.iter().zip(&v).map(|(&a, &b)| a + b).collect();
        let ns = luxemburg_norm_discrete(&sum, &mu, &phi1, 1.0)?;
        let tri = nu + nv + 1e-9 - ns;
        let zero = luxemburg_norm_discrete(&vec![0.0; n], &mu, &phi1, 1.0)?;
        Ok(homo.min(tri).min(1e-12 - zero.abs()))
    })?;
    checks.push(Check::slack(
        "classical/discrete-luxemburg-axioms",
        discrete,
    ));

    Ok(checks)
}

fn suite_geometry(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let half = HermitianMatrix::identity(2).scale(0.5);
    let sx = HermitianMatrix::pauli_x();
    let spot = bkm_inner(&half, &sx, &sx, 0.5)?;
    checks.push(Check::slack(
        "geometry/bkm-spot",
        1e-12 - (spot - 0.5).abs(),
    ));

    for &dim in &cfg.dims {
        let agree = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let x = random_hermitian(dim, &mut rng, 0.6);
            let y = random_hermitian(dim, &mut rng, 0.6);
            let closed = bkm_inner(m.rho0(), &x, &y, 0.5)?;
            let quad = bkm_quadrature_oracle(m.rho0(), &x, &y, 64, 0.5)?;
            Ok(1e-10 - (closed - quad).abs() / (1.0 + closed.abs()))
        })?;
        checks.push(Check::slack(
            format!("geometry/bkm-closed-vs-quadrature/dim{dim}"),
            agree,
        ));

        let mean = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let x = random_hermitian(dim, &mut rng, 0.6);
            let cyc = generalized_mean(m.rho0(), &x)?;
            let quad = generalized_mean_quadrature(m.rho0(), &x, 32)?;
            Ok(1e-10 - (cyc - quad).abs() / (1.0 + cyc.abs()))
        })?;
        checks.push(Check::slack(
            format!("geometry/generalized-mean-identity/dim{dim}"),
            mean,
        ));

        let identity = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let x = random_hermitian(dim, &mut rng, 0.4);
            let s = m.perturb(&x)?;
            Ok(1e-9 - entropy_sum_identity_gap(&m, &s)?)
        })?;
        checks.push(Check::slack(
            format!("geometry/entropy-sum-identity/dim{dim}"),
            identity,
        ));

        let rate = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let x = random_hermitian(dim, &mut rng, 0.3);
            let sigma = m.perturb(&x)?.rho_x;
            let rho = m.rho0();
            let s = relative_entropy(&sigma, rho)?;
            let e1 = (alpha_entropy(&sigma, rho, 0.99)? - s).abs();
            let e2 = (alpha_entropy(&sigma, rho, 0.999)? - s).abs();
            if e2 < 1e-13 {
                // states coincide to rounding; the rate is unobservable
                return Ok(1.0);
            }
            let ratio = e1 / e2;
            Ok((ratio - 8.0).min(12.0 - ratio))
        })?;
        checks.push(Check::slack(
            format!("geometry/alpha-entropy-rate/dim{dim}"),
            rate,
        ));
    }
    Ok(checks)
}

/// Largest singular value of `(h0 + c)^{-1/2-eps} x (h0 + c)^{-1/2+eps}`,
/// the linear map whose sublevel set at `c` is the bounded-form set.
fn sandwich_value(m: &GibbsModel, x: &HermitianMatrix, eps: f64, c: f64) -> Result<f64> {
    let shifted = m.h0().add_scaled_identity(c);
    let d = eigh(&shifted)?;
    let left = d.apply(|l| l.powf(-0.5 - eps))?;
    let right = d.apply(|l| l.powf(-0.5 + eps))?;
    ComplexMatrix::from(&left)
        .mul(&ComplexMatrix::from(x))
        .mul(&ComplexMatrix::from(&right))
        .largest_singular_value()
}

fn min_eig(a: &HermitianMatrix) -> Result<f64> {
    Ok(eigh(a)?.eigenvalues[0])
}

fn suite_structure(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &dim in &cfg.dims {
        // the bounded-form set is convex in the potential (the sandwich map
        // is linear in x, so sublevel sets are convex)
        let eps_convex = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let (eps, c) = (0.25, 2.0);
            let member = |rng: &mut ChaCha8Rng| -> Result<HermitianMatrix> {
                let x = random_hermitian(dim, rng, 1.0);
                let v = sandwich_value(&m, &x, eps, c)?;
                Ok(x.scale(0.9 * c / v.max(1e-12)))
            };
            let x1 = member(&mut rng)?;
            let x2 = member(&mut rng)?;
            debug_assert!(m.epsilon_bounded(&x1, eps, c)?);
            let t: f64 = rng.gen_range(0.0..1.0);
            let mix = &x1.scale(t) + &x2.scale(1.0 - t);
            Ok(c - sandwich_value(&m, &mix, eps, c)?)
        })?;
        checks.push(Check::slack(
            format!("structure/bounded-form-convexity/dim{dim}"),
            eps_convex,
        ));

        // mixtures of squeezed states stay squeezed (operator bounds are
        // linear in the state)
        let mix_convex = par_min(cfg.trials, cfg.seed, |sub| {
            let m = model_for(dim, sub)?;
            let mut rng = rng_for(sub);
            let (p, c) = (0.5, 6.0);
            let lower = m.rho0_power(1.0 + p)?.scale(1.0 / c);
            let upper = m.rho0_power(1.0 - p)?.scale(c);
            let nearby = |rng: &mut ChaCha8Rng| -> Result<HermitianMatrix> {
                let mut u = 0.1;
                loop {
                    let g = random_hermitian(dim, rng, 0.5);
                    let e = eigh(&g)?.apply(f64::exp)?;
                    let d = e.scale(1.0 / e.trace());
                    let sigma = &m.rho0().scale(1.0 - u) + &d.scale(u);
                    if min_eig(&(&sigma - &lower))? >= 0.0 && min_eig(&(&upper - &sigma))? >= 0.0 {
                        return Ok(sigma);
                    }
                    u *= 0.5;
                    if u < 1e-6 {
                        return Ok(m.rho0().clone());
                    }
                }
            };
            let s1 = nearby(&mut rng)?;
            let s2 = nearby(&mut rng)?;
            debug_assert!(m.p_nearby(&s1, p, c)?);
            let t: f64 = rng.gen_range(0.0..1.0);
            let mix = &s1.scale(t) + &s2.scale(1.0 - t);
            let slack_lo = min_eig(&(&mix - &lower))?;
            let slack_hi = min_eig(&(&upper - &mix))?;
            Ok(slack_lo.min(slack_hi) + 1e-12)
        })?;
        checks.push(Check::slack(
            format!("structure/nearby-mixture-convexity/dim{dim}"),
            mix_convex,
        ));
    }
    Ok(checks)
}

fn suite_sweeps() -> Result<Vec<Check>> {
    let dims: Vec<usize> = (4..=32).step_by(2).collect();
    let mut profiles: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut id_norms: Vec<f64> = Vec::new();
    for &d in &dims {
        let m = GibbsModel::make_oscillator(d, 1.0)?;
        profiles.push(m.beta_profile().to_vec());
        id_norms.push(luxemburg_norm(&m, &HermitianMatrix::identity(d), 1.0)?);
    }
    let last = &profiles[profiles.len() - 1];
    let prev = &profiles[profiles.len() - 2];
    let mut worst = f64::INFINITY;
    for (k, &(beta, v)) in last.iter().enumerate() {
        if beta >= 0.5 {
            worst = worst.min(1e-6 - (v - prev[k].1).abs());
        }
    }
    let mut checks = vec![Check::slack("sweeps/oscillator-schatten-converges", worst)];

    let spread = id_norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - id_norms.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.push(Check::slack("sweeps/identity-norm-constant", 1e-8 - spread));
    Ok(checks)
}

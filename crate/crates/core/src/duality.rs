//! Legendre-Fenchel conjugation of the quantum Young function, the dual
//! Luxemburg norm, and the trace-inequality battery (Young, Hoelder-Orlicz,
//! Bogoliubov-Peierls, Golden-Thompson).
//!
//! The pairing in the conjugate is the plain trace form `Tr[X v]` with
//! `v = sigma - rho0`; the kernel-weighted inner product from `bkm` is not
//! used here.

use crate::bkm::generalized_mean;
use crate::error::{Error, Result};
use crate::linalg::{eigh, trace_pair, ComplexMatrix, HermitianMatrix};
use crate::model::GibbsModel;
use crate::young::{luxemburg_norm, phi, phi_gradient};

/// Objective value beyond which a conjugate solve is declared divergent and
/// the conjugate reported as infinite.
const DIVERGENCE_CAP: f64 = 1e12;

/// Cotangent direction `v = sigma - rho0`. When built from a density the
/// trace of `v` must vanish (difference of unit-trace states).
#[derive(Clone, Debug)]
pub struct CotangentVector {
    pub v: HermitianMatrix,
    pub source_sigma: Option<HermitianMatrix>,
}

impl CotangentVector {
    pub fn new(v: HermitianMatrix) -> Self {
        Self {
            v,
            source_sigma: None,
        }
    }

    /// `v = sigma - rho0(m)`; rejects a `sigma` whose trace strays from 1.
    pub fn from_sigma(m: &GibbsModel, sigma: &HermitianMatrix) -> Result<Self> {
        if sigma.dim() != m.dim() {
            return Err(Error::DimMismatch {
                left: m.dim(),
                right: sigma.dim(),
            });
        }
        let v = sigma - m.rho0();
        if v.trace().abs() > 1e-8 {
            return Err(Error::NotNormalized {
                trace: sigma.trace(),
            });
        }
        Ok(Self {
            v,
            source_sigma: Some(sigma.clone()),
        })
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConjugateOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub step: f64,
}

impl Default for ConjugateOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-8,
            step: 1.0,
        }
    }
}

/// Outcome of a conjugate solve. `value` is `+inf` when the objective
/// diverged (the conjugate is infinite in that direction); `converged`
/// reports whether the gradient-norm tolerance was met.
#[derive(Clone, Debug)]
pub struct ConjugateResult {
    pub value: f64,
    pub argmax_x: HermitianMatrix,
    pub iterations: usize,
    pub converged: bool,
}

fn objective(m: &GibbsModel, v: &HermitianMatrix, x: &HermitianMatrix) -> Result<f64> {
    let p = phi(m, x)?;
    if p.saturated {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(trace_pair(x, v)? - p.value)
}

/// Real inner product `Tr(AB)` on Hermitian matrices, entrywise.
fn dot(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x * y.conj()).re)
        .sum()
}

/// Frechet derivative of `exp` at a Hermitian point, as the divided-difference
/// kernel in the eigenbasis: `L[B] = U (Psi o (U^dag B U)) U^dag` with
/// `Psi_ij = (e^li - e^lj)/(li - lj)`, `Psi_ii = e^li`.
struct ExpDerivative {
    u: ComplexMatrix,
    kernel: Vec<f64>,
}

impl ExpDerivative {
    fn at(a: &HermitianMatrix) -> Result<Option<Self>> {
        let d = eigh(a)?;
        if d.eigenvalues.last().copied().unwrap() > crate::model::EXP_OVERFLOW {
            return Ok(None);
        }
        let n = a.dim();
        let l = &d.eigenvalues;
        let mut kernel = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let delta = l[i] - l[j];
                kernel[i * n + j] = if delta.abs() < 1e-8 {
                    // sinh(d/2)/(d/2) expansion around the degenerate point
                    (0.5 * (l[i] + l[j])).exp() * (1.0 + delta * delta / 24.0)
                } else {
                    (l[i].exp() - l[j].exp()) / delta
                };
            }
        }
        Ok(Some(Self {
            u: d.eigenvectors,
            kernel,
        }))
    }

    fn apply(&self, b: &HermitianMatrix) -> Result<HermitianMatrix> {
        let n = b.dim();
        let mut bt = self.u.adjoint().mul(&ComplexMatrix::from(b)).mul(&self.u);
        bt.scale_entries(|i, j, z| z * self.kernel[i * n + j]);
        self.u.mul(&bt).mul(&self.u.adjoint()).into_hermitian()
    }
}

/// Newton direction for the concave objective: solves
/// `HessPhi[s] = grad` by conjugate gradients, where
/// `HessPhi[B] = (L_plus[B] + L_minus[B])/2` with the two exponential
/// derivatives at `-h0+x` and `-h0-x`. Returns `None` on saturation.
fn newton_direction(
    m: &GibbsModel,
    x: &HermitianMatrix,
    grad: &HermitianMatrix,
) -> Result<Option<HermitianMatrix>> {
    let minus = -&(m.h0() + x);
    let plus = &minus + &x.scale(2.0);
    let lp = match ExpDerivative::at(&plus)? {
        Some(l) => l,
        None => return Ok(None),
    };
    let lm = match ExpDerivative::at(&minus)? {
        Some(l) => l,
        None => return Ok(None),
    };
    let hess = |b: &HermitianMatrix| -> Result<HermitianMatrix> {
        Ok((&lp.apply(b)? + &lm.apply(b)?).scale(0.5))
    };
    // CG with an inexact-Newton forcing term
    let gnorm = grad.frobenius_norm();
    let eta = 0.5f64.min(gnorm.sqrt()).max(1e-10);
    let mut s = HermitianMatrix::zeros(x.dim());
    let mut r = grad.clone();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for _ in 0..(4 * x.dim() * x.dim()).max(20) {
        if rr.sqrt() <= eta * gnorm {
            break;
        }
        let hp = hess(&p)?;
        let php = dot(&p, &hp);
        if php <= 0.0 {
            break; // numerical loss of positivity; fall back to what we have
        }
        let alpha = rr / php;
        s = &s + &p.scale(alpha);
        r = &r - &hp.scale(alpha);
        let rr_new = dot(&r, &r);
        p = &r + &p.scale(rr_new / rr);
        rr = rr_new;
    }
    if dot(&s, grad) <= 0.0 {
        return Ok(Some(grad.clone())); // safeguard: ascent direction only
    }
    Ok(Some(s))
}

/// `Phi*(v) = sup_X { Tr[X v] - Phi(X) }` by gradient ascent with Armijo
/// backtracking from `X = 0`. Concavity of the objective makes the unique
/// stationary point the supremum.
pub fn conjugate_phi(
    m: &GibbsModel,
    v: &CotangentVector,
    opts: ConjugateOptions,
) -> Result<ConjugateResult> {
    conjugate_phi_from(m, v, opts, None)
}

/// Same solve with an optional warm-start iterate; used by the dual-norm
/// bisection so that neighbouring radii share their argmax.
pub fn conjugate_phi_from(
    m: &GibbsModel,
    v: &CotangentVector,
    opts: ConjugateOptions,
    start: Option<&HermitianMatrix>,
) -> Result<ConjugateResult> {
    if v.dim() != m.dim() {
        return Err(Error::DimMismatch {
            left: m.dim(),
            right: v.dim(),
        });
    }
    let vm = &v.v;
    let mut x = match start {
        Some(x0) if objective(m, vm, x0)?.is_finite() => x0.clone(),
        _ => HermitianMatrix::zeros(m.dim()),
    };
    let mut f = objective(m, vm, &x)?;
    let armijo = 1e-4;
    for iter in 0..opts.max_iter {
        let grad = vm - &phi_gradient(m, &x)?;
        let gnorm = grad.frobenius_norm();
        if gnorm <= opts.tol {
            return Ok(ConjugateResult {
                value: f.max(0.0),
                argmax_x: x,
                iterations: iter,
                converged: true,
            });
        }
        if f > DIVERGENCE_CAP {
            return Ok(ConjugateResult {
                value: f64::INFINITY,
                argmax_x: x,
                iterations: iter,
                converged: true,
            });
        }
        let dir = match newton_direction(m, &x, &grad)? {
            Some(d) => d,
            None => grad.clone(), // saturated curvature data; plain ascent
        };
        let slope = dot(&grad, &dir);
        let mut step = opts.step;
        let mut advanced = false;
        for _ in 0..80 {
            let cand = &x + &dir.scale(step);
            let fc = objective(m, vm, &cand)?;
            if fc >= f + armijo * step * slope {
                x = cand;
                f = fc;
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if !advanced {
            // line search stalled at floating-point resolution
            return Ok(ConjugateResult {
                value: f.max(0.0),
                argmax_x: x,
                iterations: iter,
                converged: gnorm <= 1e-6,
            });
        }
    }
    let grad = vm - &phi_gradient(m, &x)?;
    Ok(ConjugateResult {
        value: f.max(0.0),
        argmax_x: x,
        iterations: opts.max_iter,
        converged: grad.frobenius_norm() <= opts.tol,
    })
}

/// Exact conjugate in the commuting case: with `delta = sigma - rho` the
/// stationarity `delta_i = rho_i sinh(x_i)` gives
/// `sum_i [delta_i asinh(delta_i/rho_i) - rho_i (cosh(asinh(delta_i/rho_i)) - 1)]`.
pub fn conjugate_diag_oracle(rho_diag: &[f64], sigma_diag: &[f64]) -> Result<f64> {
    if rho_diag.len() != sigma_diag.len() {
        return Err(Error::DimMismatch {
            left: rho_diag.len(),
            right: sigma_diag.len(),
        });
    }
    for &r in rho_diag {
        if r <= 0.0 {
            return Err(Error::NotFaithful { min_eigenvalue: r });
        }
    }
    for (label, d) in [("rho", rho_diag), ("sigma", sigma_diag)] {
        let s: f64 = d.iter().sum();
        if (s - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "{label} diagonal sums to {s}, expected 1"
            )));
        }
    }
    let mut total = 0.0;
    for (&r, &s) in rho_diag.iter().zip(sigma_diag) {
        let delta = s - r;
        let t = (delta / r).asinh();
        total += delta * t - r * (t.cosh() - 1.0);
    }
    Ok(total)
}

/// Dual Luxemburg norm `inf { r > 0 : Phi*(v/r) < a }` by bisection, with
/// conjugate solves warm-started from the previous radius.
pub fn dual_luxemburg_norm(m: &GibbsModel, v: &CotangentVector, a: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::InvalidArgument("threshold a must be > 0".into()));
    }
    if v.v.is_zero(0.0) {
        return Ok(0.0);
    }
    let opts = ConjugateOptions::default();
    let mut warm: Option<HermitianMatrix> = None;
    let conj_at = |r: f64, warm: &mut Option<HermitianMatrix>| -> Result<f64> {
        let scaled = CotangentVector::new(v.v.scale(1.0 / r));
        let res = conjugate_phi_from(m, &scaled, opts, warm.as_ref())?;
        *warm = Some(res.argmax_x.clone());
        Ok(res.value)
    };
    let mut hi = v.v.frobenius_norm().max(1e-300);
    let mut guard = 0;
    while conj_at(hi, &mut warm)? >= a {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::NotConverged {
                iterations: guard,
                grad_norm: f64::NAN,
            });
        }
    }
    let mut lo = hi;
    guard = 0;
    loop {
        let next = 0.5 * lo;
        if conj_at(next, &mut warm)? >= a {
            lo = next;
            break;
        }
        lo = next;
        guard += 1;
        if guard > 2000 {
            return Ok(0.0);
        }
    }
    while (hi - lo) > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if conj_at(mid, &mut warm)? < a {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `Phi(X) + Phi*(v) - Tr[X v]`; nonnegative up to solver tolerance.
pub fn youngs_inequality_margin(
    m: &GibbsModel,
    x: &HermitianMatrix,
    v: &CotangentVector,
) -> Result<f64> {
    let p = phi(m, x)?;
    if p.saturated {
        return Ok(f64::INFINITY);
    }
    let c = conjugate_phi(m, v, ConjugateOptions::default())?;
    Ok(p.value + c.value - trace_pair(x, &v.v)?)
}

/// `Phi(X) - sup_probes { Tr[X v] - Phi*(v) }`; the sup of affine minorants
/// never exceeds `Phi`, and with the gradient-matched probe the gap closes.
pub fn double_conjugate_gap(
    m: &GibbsModel,
    x: &HermitianMatrix,
    probe_vs: &[CotangentVector],
) -> Result<f64> {
    let p = phi(m, x)?;
    if p.saturated {
        return Ok(f64::INFINITY);
    }
    let mut best = f64::NEG_INFINITY;
    for v in probe_vs {
        let c = conjugate_phi(m, v, ConjugateOptions::default())?;
        if !c.value.is_finite() {
            continue;
        }
        best = best.max(trace_pair(x, &v.v)? - c.value);
    }
    if best == f64::NEG_INFINITY {
        best = 0.0; // empty probe set: the zero minorant
    }
    Ok(p.value - best)
}

/// `2 ||X||_{L,1} ||v||_{L*,1} - Tr[X v]`; nonnegative up to tolerance.
pub fn holder_orlicz_margin(
    m: &GibbsModel,
    x: &HermitianMatrix,
    v: &CotangentVector,
) -> Result<f64> {
    let nx = luxemburg_norm(m, x, 1.0)?;
    let nv = dual_luxemburg_norm(m, v, 1.0)?;
    Ok(2.0 * nx * nv - trace_pair(x, &v.v)?)
}

/// `log Tr e^{-h0+x} - rho0 . x` (the `Z0 = 1` gauge kills the constant
/// term); nonnegative by convexity of the log-partition function.
pub fn bogoliubov_peierls_margin(m: &GibbsModel, x: &HermitianMatrix) -> Result<f64> {
    let s = m.perturb(&x.scale(-1.0))?; // psi of e^{-h0+x}
    Ok(s.psi_x - generalized_mean(m.rho0(), x)?)
}

/// `Tr(e^a e^b) - Tr e^{a+b}`; nonnegative for Hermitian `a`, `b`.
pub fn golden_thompson_margin(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let ea = eigh(a)?.apply(f64::exp)?;
    let eb = eigh(b)?.apply(f64::exp)?;
    let prod = ComplexMatrix::from(&ea).mul(&ComplexMatrix::from(&eb));
    let joint = eigh(&(a + b))?;
    let tr_joint: f64 = joint.eigenvalues.iter().map(|&l| l.exp()).sum();
    Ok(prod.trace().re - tr_joint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_hermitian;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn flat_model(dim: usize) -> GibbsModel {
        GibbsModel::make_custom(HermitianMatrix::zeros(dim)).unwrap()
    }

    fn random_diag_density(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
        let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1..1.0)).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    }

    #[test]
    fn conjugate_of_zero_vanishes() {
        let m = flat_model(3);
        let v = CotangentVector::new(HermitianMatrix::zeros(3));
        let r = conjugate_phi(&m, &v, ConjugateOptions::default()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);
        assert!(r.argmax_x.frobenius_norm() <= 1e-8);
    }

    #[test]
    fn diag_oracle_spot_values() {
        assert_abs_diff_eq!(
            conjugate_diag_oracle(&[0.5, 0.5], &[0.5, 0.5]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let v = conjugate_diag_oracle(&[0.5, 0.5], &[0.75, 0.25]).unwrap();
        assert_abs_diff_eq!(v, 0.12257192377990683, epsilon = 1e-12);
        let hand = 2.0 * (0.25 * 0.5f64.asinh() - 0.5 * (1.25f64.sqrt() - 1.0));
        assert_abs_diff_eq!(v, hand, epsilon = 1e-15);
        assert!(conjugate_diag_oracle(&[0.6, 0.6], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn optimizer_matches_diag_oracle_spot() {
        let m = flat_model(2);
        let sigma = HermitianMatrix::from_diag(&[0.75, 0.25]);
        let v = CotangentVector::from_sigma(&m, &sigma).unwrap();
        let r = conjugate_phi(&m, &v, ConjugateOptions::default()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, 0.12257192377990683, epsilon = 1e-8);
    }

    #[test]
    fn optimizer_matches_diag_oracle_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let dim = [2usize, 3, 4][rng.gen_range(0..3)];
            let rho = random_diag_density(dim, &mut rng);
            let sig = random_diag_density(dim, &mut rng);
            let h0_raw =
                HermitianMatrix::from_diag(&rho.iter().map(|&r| -r.ln()).collect::<Vec<_>>());
            let m = GibbsModel::make_custom(h0_raw).unwrap();
            let v = CotangentVector::from_sigma(&m, &HermitianMatrix::from_diag(&sig)).unwrap();
            let got = conjugate_phi(&m, &v, ConjugateOptions::default()).unwrap();
            let want = conjugate_diag_oracle(&rho, &sig).unwrap();
            assert!(
                (got.value - want).abs() <= 1e-6,
                "dim {dim}: {} vs {want}",
                got.value
            );
        }
    }

    #[test]
    fn sup_dominates_probe() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let m = GibbsModel::make_random_model(3, rng.gen(), 0.5).unwrap();
            let v = CotangentVector::new(random_hermitian(3, &mut rng, 0.3));
            let r = conjugate_phi(&m, &v, ConjugateOptions::default()).unwrap();
            let probe = objective(&m, &v.v, &v.v).unwrap();
            assert!(r.value >= probe - 1e-9);
        }
    }

    #[test]
    fn conjugate_is_even_convex_and_vanishes_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let m = GibbsModel::make_random_model(3, 7, 0.5).unwrap();
        let opts = ConjugateOptions::default();
        let star = |v: &HermitianMatrix| {
            conjugate_phi(&m, &CotangentVector::new(v.clone()), opts)
                .unwrap()
                .value
        };
        for _ in 0..10 {
            let v = random_hermitian(3, &mut rng, 0.3);
            let w = random_hermitian(3, &mut rng, 0.3);
            assert_abs_diff_eq!(star(&v), star(&v.scale(-1.0)), epsilon = 1e-7);
            let mid = (&v + &w).scale(0.5);
            assert!(star(&mid) <= 0.5 * (star(&v) + star(&w)) + 1e-7);
        }
        assert_abs_diff_eq!(star(&HermitianMatrix::zeros(3)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn dual_norm_examples() {
        let m = flat_model(2);
        let zero = CotangentVector::new(HermitianMatrix::zeros(2));
        assert_abs_diff_eq!(
            dual_luxemburg_norm(&m, &zero, 1.0).unwrap(),
            0.0,
            epsilon = 1e-15
        );

        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let v = CotangentVector::new(HermitianMatrix::pauli_z().scale(0.2));
        let n = dual_luxemburg_norm(&m, &v, 1.0).unwrap();
        for _ in 0..3 {
            let lam: f64 = rng.gen_range(0.3..3.0);
            let nl = dual_luxemburg_norm(&m, &CotangentVector::new(v.v.scale(lam)), 1.0).unwrap();
            assert!(
                (nl - lam * n).abs() <= 1e-7 * (1.0 + lam * n),
                "{nl} vs {}",
                lam * n
            );
        }
    }

    #[test]
    fn dual_norm_diagonal_bisection_matches_oracle_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..5 {
            let rho = random_diag_density(3, &mut rng);
            let sig = random_diag_density(3, &mut rng);
            let m = GibbsModel::make_custom(HermitianMatrix::from_diag(
                &rho.iter().map(|&r| -r.ln()).collect::<Vec<_>>(),
            ))
            .unwrap();
            let v = CotangentVector::from_sigma(&m, &HermitianMatrix::from_diag(&sig)).unwrap();
            let optimizer_norm = dual_luxemburg_norm(&m, &v, 1.0).unwrap();

            // oracle route: bisect the scalar conjugate of the scaled diagonal
            let delta: Vec<f64> = sig.iter().zip(&rho).map(|(&s, &r)| s - r).collect();
            let conj = |r: f64| -> f64 {
                delta
                    .iter()
                    .zip(&rho)
                    .map(|(&d, &p)| {
                        let t = (d / r / p).asinh();
                        (d / r) * t - p * (t.cosh() - 1.0)
                    })
                    .sum()
            };
            let (mut lo, mut hi) = (1e-6, 1e6);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if conj(mid) < 1.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let oracle_norm = 0.5 * (lo + hi);
            assert!(
                (optimizer_norm - oracle_norm).abs() <= 1e-6 * (1.0 + oracle_norm),
                "{optimizer_norm} vs {oracle_norm}"
            );
        }
    }

    #[test]
    fn youngs_margin_examples() {
        let m = flat_model(2);
        let zero_v = CotangentVector::new(HermitianMatrix::zeros(2));
        assert_abs_diff_eq!(
            youngs_inequality_margin(&m, &HermitianMatrix::zeros(2), &zero_v).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..30 {
            let m = GibbsModel::make_random_model(3, rng.gen(), 0.5).unwrap();
            let x = random_hermitian(3, &mut rng, 0.7);
            let v = CotangentVector::new(random_hermitian(3, &mut rng, 0.3));
            assert!(youngs_inequality_margin(&m, &x, &v).unwrap() >= -1e-7);
        }
    }

    #[test]
    fn youngs_equality_at_touch_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..10 {
            let m = GibbsModel::make_random_model(3, rng.gen(), 0.5).unwrap();
            let x = random_hermitian(3, &mut rng, 0.5);
            // v in the range of the gradient makes x the argmax
            let v = CotangentVector::new(phi_gradient(&m, &x).unwrap());
            let margin = youngs_inequality_margin(&m, &x, &v).unwrap();
            assert!(margin.abs() <= 1e-6, "margin {margin}");
        }
    }

    #[test]
    fn double_conjugate_examples() {
        let m = flat_model(3);
        let gap = double_conjugate_gap(&m, &HermitianMatrix::zeros(3), &[]).unwrap();
        assert_abs_diff_eq!(gap, 0.0, epsilon = 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(48);
        for _ in 0..10 {
            let rho = random_diag_density(3, &mut rng);
            let m = GibbsModel::make_custom(HermitianMatrix::from_diag(
                &rho.iter().map(|&r| -r.ln()).collect::<Vec<_>>(),
            ))
            .unwrap();
            let x = HermitianMatrix::from_diag(&[
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
            ]);
            let matched = CotangentVector::new(phi_gradient(&m, &x).unwrap());
            let gap = double_conjugate_gap(&m, &x, &[matched]).unwrap();
            assert!(gap.abs() <= 1e-6, "gap {gap}");
            // arbitrary probes give affine minorants, never exceeding Phi
            let probes: Vec<CotangentVector> = (0..5)
                .map(|_| CotangentVector::new(random_hermitian(3, &mut rng, 0.3)))
                .collect();
            assert!(double_conjugate_gap(&m, &x, &probes).unwrap() >= -1e-7);
        }
    }

    #[test]
    fn holder_margin_examples() {
        let m = flat_model(2);
        let v = CotangentVector::new(HermitianMatrix::pauli_z().scale(0.1));
        assert_abs_diff_eq!(
            holder_orlicz_margin(&m, &HermitianMatrix::zeros(2), &v).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        // traceless v pairs to zero with the identity
        let id_margin = holder_orlicz_margin(&m, &HermitianMatrix::identity(2), &v).unwrap();
        assert!(id_margin >= 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        for _ in 0..10 {
            let m = GibbsModel::make_random_model(3, rng.gen(), 0.5).unwrap();
            let x = random_hermitian(3, &mut rng, 0.6);
            let v = CotangentVector::new(random_hermitian(3, &mut rng, 0.2));
            assert!(holder_orlicz_margin(&m, &x, &v).unwrap() >= -1e-6);
        }
    }

    #[test]
    fn bogoliubov_peierls_examples() {
        let m = flat_model(3);
        assert_abs_diff_eq!(
            bogoliubov_peierls_margin(&m, &HermitianMatrix::zeros(3)).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let c = HermitianMatrix::identity(3).scale(0.7);
        assert_abs_diff_eq!(
            bogoliubov_peierls_margin(&m, &c).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for _ in 0..100 {
            let m = GibbsModel::make_random_model(4, rng.gen(), 0.5).unwrap();
            let x = random_hermitian(4, &mut rng, 1.0);
            assert!(bogoliubov_peierls_margin(&m, &x).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn golden_thompson_examples() {
        let a = HermitianMatrix::from_diag(&[1.0, -0.5]);
        let b = HermitianMatrix::from_diag(&[0.3, 0.9]);
        assert_abs_diff_eq!(
            golden_thompson_margin(&a, &b).unwrap(),
            0.0,
            epsilon = 1e-12
        );

        let spot = golden_thompson_margin(&HermitianMatrix::pauli_z(), &HermitianMatrix::pauli_x())
            .unwrap();
        let want = 2.0 * 1.0f64.cosh().powi(2) - 2.0 * 2.0f64.sqrt().cosh();
        assert_abs_diff_eq!(spot, want, epsilon = 1e-12);
        assert_abs_diff_eq!(spot, 0.4058285778664894, epsilon = 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..100 {
            let a = random_hermitian(3, &mut rng, 0.8);
            let b = random_hermitian(3, &mut rng, 0.8);
            assert!(golden_thompson_margin(&a, &b).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn affine_minorant_property() {
        // Phi*(v) >= Tr[x v] - Phi(x) for every sampled x (sup of affine maps)
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let m = GibbsModel::make_random_model(3, 11, 0.5).unwrap();
        let v = CotangentVector::new(random_hermitian(3, &mut rng, 0.3));
        let star = conjugate_phi(&m, &v, ConjugateOptions::default())
            .unwrap()
            .value;
        for _ in 0..1000 {
            let x = random_hermitian(3, &mut rng, 1.0);
            let minorant = objective(&m, &v.v, &x).unwrap();
            assert!(star >= minorant - 1e-8);
        }
    }

    #[test]
    fn cotangent_source_invariant() {
        let m = flat_model(2);
        let bad = HermitianMatrix::from_diag(&[0.8, 0.8]);
        assert!(CotangentVector::from_sigma(&m, &bad).is_err());
        let ok = CotangentVector::from_sigma(&m, &HermitianMatrix::from_diag(&[0.9, 0.1])).unwrap();
        assert!(ok.v.trace().abs() <= 1e-12);
    }
}

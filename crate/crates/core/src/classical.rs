//! Scalar Young-function algebra and discrete classical Orlicz/Cramer
//! machinery: the commutative reference implementation and the oracle for
//! quantum commuting cases.

use std::sync::Arc;

use crate::error::{Error, Result};

/// A scalar Young function with its finiteness domain. `finite_radius` is
/// the sup of `x` with finite value (infinity for every builtin).
#[derive(Clone)]
pub struct YoungFunction1D {
    name: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    finite_radius: f64,
}

impl std::fmt::Debug for YoungFunction1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("YoungFunction1D")
            .field("name", &self.name)
            .field("finite_radius", &self.finite_radius)
            .finish()
    }
}

impl YoungFunction1D {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        finite_radius: f64,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            finite_radius,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x.abs() >= self.finite_radius && self.finite_radius.is_finite() {
            return f64::INFINITY;
        }
        (self.eval)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn finite_radius(&self) -> f64 {
        self.finite_radius
    }

    /// Grid check of the Young-function axioms: vanishing at 0, evenness,
    /// midpoint convexity, growth to infinity.
    pub fn validate_on_grid(&self, xs: &[f64]) -> bool {
        if self.eval(0.0).abs() > 1e-12 {
            return false;
        }
        for &x in xs {
            let a = self.eval(x);
            let b = self.eval(-x);
            if a.is_finite() != b.is_finite() {
                return false;
            }
            if a.is_finite() && (a - b).abs() > 1e-10 * (1.0 + a.abs()) {
                return false;
            }
            if a.is_finite() && a < -1e-12 {
                return false;
            }
        }
        // midpoint convexity on consecutive grid points
        let mut sorted: Vec<f64> = xs.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in sorted.windows(2) {
            let (x, y) = (w[0], w[1]);
            let mid = 0.5 * (x + y);
            let lhs = self.eval(mid);
            let rhs = 0.5 * (self.eval(x) + self.eval(y));
            if lhs.is_finite() && rhs.is_finite() && lhs > rhs + 1e-9 * (1.0 + rhs.abs()) {
                return false;
            }
        }
        // divergence: the largest finite grid value must dominate the smallest
        let hi = sorted.last().copied().unwrap_or(0.0);
        self.eval(hi) > self.eval(sorted[sorted.len() / 2]) || self.eval(hi).is_infinite()
    }
}

/// Builtin Young functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Builtin {
    /// cosh x - 1
    Phi1,
    /// e^|x| - |x| - 1
    Phi2,
    /// (1+|x|) log(1+|x|) - |x|
    Phi3,
    /// |x|^p, p >= 1
    Power(f64),
}

pub fn builtin(b: Builtin) -> Result<YoungFunction1D> {
    match b {
        Builtin::Phi1 => Ok(YoungFunction1D::new(
            "phi1",
            |x| x.cosh() - 1.0,
            f64::INFINITY,
        )),
        Builtin::Phi2 => Ok(YoungFunction1D::new(
            "phi2",
            |x| x.abs().exp() - x.abs() - 1.0,
            f64::INFINITY,
        )),
        Builtin::Phi3 => Ok(YoungFunction1D::new(
            "phi3",
            |x| (1.0 + x.abs()) * (1.0 + x.abs()).ln() - x.abs(),
            f64::INFINITY,
        )),
        Builtin::Power(p) => {
            if p < 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "power exponent must be >= 1, got {p}"
                )));
            }
            Ok(YoungFunction1D::new(
                format!("power({p})"),
                move |x| x.abs().powf(p),
                f64::INFINITY,
            ))
        }
    }
}

/// Bracket/search parameters for the scalar conjugate.
#[derive(Clone, Copy, Debug)]
pub struct BracketParams {
    /// Expansion cap; an objective still rising here is declared unbounded.
    pub x_cap: f64,
    /// Relative width at which golden-section stops.
    pub tol: f64,
}

impl Default for BracketParams {
    fn default() -> Self {
        Self {
            x_cap: 1e9,
            tol: 1e-12,
        }
    }
}

/// Legendre-Fenchel conjugate `Phi*(y) = sup_x { x y - Phi(x) }`, evaluated
/// by golden-section on the concave objective over `x >= 0` (evenness of
/// `Phi` reduces to `|y|`). Returns infinity when the objective is unbounded.
pub fn legendre_dual_1d(phi: &YoungFunction1D, y: f64, search: &BracketParams) -> f64 {
    let y = y.abs();
    if y == 0.0 {
        return 0.0;
    }
    let g = |x: f64| {
        let p = phi.eval(x);
        if p.is_infinite() {
            f64::NEG_INFINITY
        } else {
            x * y - p
        }
    };
    // expand the bracket until the objective turns over
    let mut hi = 1.0f64;
    loop {
        if hi >= search.x_cap {
            return f64::INFINITY;
        }
        let next = 2.0 * hi;
        if g(next) <= g(hi) {
            hi = next;
            break;
        }
        hi = next;
    }
    let mut a = 0.0f64;
    let mut b = hi;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    while (b - a) > search.tol * (1.0 + b) {
        if g1 < g2 {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + inv_phi * (b - a);
            g2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - inv_phi * (b - a);
            g1 = g(x1);
        }
    }
    g(0.5 * (a + b)).max(0.0)
}

/// A numerically conjugated Young function, for use wherever a dual pair is
/// needed and no closed form is wanted.
pub fn numeric_dual(phi: &YoungFunction1D) -> YoungFunction1D {
    let inner = phi.clone();
    YoungFunction1D::new(
        format!("{}*", phi.name()),
        move |y| legendre_dual_1d(&inner, y, &BracketParams::default()),
        f64::INFINITY,
    )
}

/// Delta-2 verdict: is `Phi(2x)/Phi(x)` bounded on the grid? The verdict is
/// grid-limited: the trend test looks at the slope of `log r` against
/// `log x` over the last decade of the grid.
pub fn is_delta2(phi: &YoungFunction1D, x0: f64, grid: &[f64]) -> Result<(bool, f64)> {
    let mut pts = Vec::new();
    for &x in grid {
        if x < x0 {
            continue;
        }
        let p = phi.eval(x);
        if p == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "Phi vanishes at grid point {x}"
            )));
        }
        let r = phi.eval(2.0 * x) / p;
        if !r.is_finite() {
            return Ok((false, f64::INFINITY));
        }
        pts.push((x.ln(), r.ln(), r));
    }
    if pts.len() < 4 {
        return Err(Error::InvalidArgument("grid too small".into()));
    }
    let max_lx = pts.last().unwrap().0;
    let decade: Vec<&(f64, f64, f64)> = pts
        .iter()
        .filter(|(lx, _, _)| *lx >= max_lx - std::f64::consts::LN_10)
        .collect();
    // least-squares slope of log r vs log x
    let n = decade.len() as f64;
    let sx: f64 = decade.iter().map(|p| p.0).sum();
    let sy: f64 = decade.iter().map(|p| p.1).sum();
    let sxx: f64 = decade.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = decade.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let kappa = pts.iter().fold(0.0f64, |m, p| m.max(p.2));
    Ok((slope < 0.1, kappa))
}

/// Verdict of the grid-limited equivalence probe.
#[derive(Clone, Debug)]
pub enum Equivalence {
    /// Witness constants: `Phi(c x) <= Psi(x) <= Phi(C x)` on the grid.
    Equivalent {
        c: f64,
        big_c: f64,
    },
    NotEquivalent {
        reason: String,
    },
}

/// Searches for witness scalars `0 < c <= C` with
/// `Phi(cx) <= Psi(x) <= Phi(Cx)` for grid points beyond `x0`. Grid-limited
/// probe, not a proof.
pub fn equivalent(
    phi: &YoungFunction1D,
    psi: &YoungFunction1D,
    x0: f64,
    grid: &[f64],
) -> Result<Equivalence> {
    // invert Phi at Psi(x) by bisection on the increasing branch
    let invert = |target: f64| -> Option<f64> {
        if target <= 0.0 {
            return Some(0.0);
        }
        let mut hi = 1.0f64;
        let mut guard = 0;
        while phi.eval(hi) < target {
            hi *= 2.0;
            guard += 1;
            if guard > 60 {
                return None; // search range exhausted
            }
        }
        let mut lo = 0.0f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi.eval(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) <= 1e-13 * (1.0 + hi) {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    };

    let mut tmin = f64::INFINITY;
    let mut tmax = 0.0f64;
    let mut used = 0;
    for &x in grid {
        if x < x0 || x == 0.0 {
            continue;
        }
        let target = psi.eval(x);
        if !target.is_finite() {
            return Ok(Equivalence::NotEquivalent {
                reason: format!("Psi infinite at grid point {x}"),
            });
        }
        let s = match invert(target) {
            Some(s) => s,
            None => {
                return Ok(Equivalence::NotEquivalent {
                    reason: format!("search range exhausted inverting Phi at x = {x}"),
                })
            }
        };
        let t = s / x;
        tmin = tmin.min(t);
        tmax = tmax.max(t);
        used += 1;
    }
    if used < 4 {
        return Err(Error::InvalidArgument("grid too small".into()));
    }
    if tmin <= 0.0 || tmax / tmin > 1e3 {
        return Ok(Equivalence::NotEquivalent {
            reason: format!("witness ratio diverges on grid (C/c = {:.3e})", tmax / tmin),
        });
    }
    // shrink/grow slightly so the inequalities hold strictly on the grid
    Ok(Equivalence::Equivalent {
        c: tmin * (1.0 - 1e-9),
        big_c: tmax * (1.0 + 1e-9),
    })
}

/// Finite discrete measure space with strictly positive weights.
#[derive(Clone, Debug)]
pub struct DiscreteMeasureSpace {
    weights: Vec<f64>,
}

impl DiscreteMeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
            return Err(Error::InvalidArgument(
                "all measure weights must be > 0".into(),
            ));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }
}

/// Discrete Luxemburg (gauge) norm
/// `inf { r > 0 : sum_i mu_i Phi(u_i / r) < a }`, by bisection on the
/// monotone modular.
pub fn luxemburg_norm_discrete(
    u: &[f64],
    mu: &DiscreteMeasureSpace,
    phi: &YoungFunction1D,
    a: f64,
) -> Result<f64> {
    if u.len() != mu.size() {
        return Err(Error::DimMismatch {
            left: u.len(),
            right: mu.size(),
        });
    }
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::InvalidArgument("threshold a must be > 0".into()));
    }
    let umax = u.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if umax == 0.0 {
        return Ok(0.0);
    }
    let modular = |r: f64| -> f64 {
        u.iter()
            .zip(mu.weights())
            .map(|(&ui, &wi)| wi * phi.eval(ui / r))
            .sum()
    };
    let mut hi = umax.max(1e-300);
    let mut guard = 0;
    while modular(hi) >= a {
        hi *= 2.0;
        guard += 1;
        if guard > 600 {
            return Err(Error::NotConverged {
                iterations: guard,
                grad_norm: f64::NAN,
            });
        }
    }
    let mut lo = hi;
    guard = 0;
    loop {
        let next = lo * 0.5;
        if modular(next) >= a {
            lo = next;
            break;
        }
        lo = next;
        guard += 1;
        if guard > 2000 {
            return Ok(0.0); // modular stays below a for all r
        }
    }
    while (hi - lo) > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if modular(mid) < a {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Hoelder-Orlicz margin `2 ||u||_L ||v||_L* - sum mu_i |u_i v_i|`; expected
/// nonnegative for the dual pair `(Phi, Phi*)`.
pub fn orlicz_holder_check(
    u: &[f64],
    v: &[f64],
    mu: &DiscreteMeasureSpace,
    phi: &YoungFunction1D,
) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let dual = numeric_dual(phi);
    let nu = luxemburg_norm_discrete(u, mu, phi, 1.0)?;
    let nv = luxemburg_norm_discrete(v, mu, &dual, 1.0)?;
    let pairing: f64 = u
        .iter()
        .zip(v)
        .zip(mu.weights())
        .map(|((&ui, &vi), &wi)| wi * (ui * vi).abs())
        .sum();
    Ok(2.0 * nu * nv - pairing)
}

/// Cramer free energy `psi(lambda u) = log sum_i f0_i e^{-lambda u_i}`,
/// evaluated stably by max-shift.
pub fn cramer_psi(f0: &[f64], u: &[f64], lam: f64) -> Result<f64> {
    if f0.len() != u.len() {
        return Err(Error::DimMismatch {
            left: f0.len(),
            right: u.len(),
        });
    }
    let total: f64 = f0.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { trace: total });
    }
    let logs: Vec<f64> = f0
        .iter()
        .zip(u)
        .map(|(&f, &ui)| f.ln() - lam * ui)
        .collect();
    let m = logs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    Ok(m + logs.iter().map(|&l| (l - m).exp()).sum::<f64>().ln())
}

/// Exponential-family density `f_i = f0_i e^{-lambda u_i - psi(lambda u)}`.
pub fn exp_family(f0: &[f64], u: &[f64], lam: f64) -> Result<Vec<f64>> {
    let psi = cramer_psi(f0, u, lam)?;
    Ok(f0
        .iter()
        .zip(u)
        .map(|(&f, &ui)| (f.ln() - lam * ui - psi).exp())
        .collect())
}

//! The quantum Young function
//! `Phi(X) = (Tr e^{-H0-X} + Tr e^{-H0+X})/2 - 1`, its gradient, and
//! Luxemburg norms on perturbations.

use crate::error::{Error, Result};
use crate::linalg::{eigh, operator_norm, HermitianMatrix};
use crate::model::{GibbsModel, EXP_OVERFLOW};

/// Value of the quantum Young function. `saturated` marks an overflowed
/// exponential, the finite-dimensional stand-in for "not of trace class";
/// saturated values carry `value = inf`.
#[derive(Clone, Copy, Debug)]
pub struct PhiValue {
    pub value: f64,
    pub saturated: bool,
}

impl PhiValue {
    fn finite(v: f64) -> Self {
        Self {
            value: v,
            saturated: false,
        }
    }

    fn saturated() -> Self {
        Self {
            value: f64::INFINITY,
            saturated: true,
        }
    }

    pub fn is_finite(&self) -> bool {
        !self.saturated
    }
}

fn trace_exp(a: &HermitianMatrix) -> Result<Option<f64>> {
    let d = eigh(a)?;
    let max = d.eigenvalues.last().copied().unwrap();
    if max > EXP_OVERFLOW {
        return Ok(None);
    }
    Ok(Some(d.eigenvalues.iter().map(|&l| l.exp()).sum()))
}

/// `Phi(X) = (Tr e^{-h0-x} + Tr e^{-h0+x})/2 - 1` (with the `Z0 = 1` gauge,
/// so `psi_0 = 0`). Saturation is a value, not an error.
pub fn phi(m: &GibbsModel, x: &HermitianMatrix) -> Result<PhiValue> {
    if x.dim() != m.dim() {
        return Err(Error::DimMismatch {
            left: m.dim(),
            right: x.dim(),
        });
    }
    let minus = -&(m.h0() + x); // -h0 - x
    let plus = &minus + &x.scale(2.0); // -h0 + x
    let t1 = match trace_exp(&minus)? {
        Some(v) => v,
        None => return Ok(PhiValue::saturated()),
    };
    let t2 = match trace_exp(&plus)? {
        Some(v) => v,
        None => return Ok(PhiValue::saturated()),
    };
    Ok(PhiValue::finite(0.5 * (t1 + t2) - 1.0))
}

/// Gradient of `Phi` at `x`: `G = (e^{-h0+x} - e^{-h0-x})/2`, so the
/// directional derivative in direction `B` is `Tr(G B)`.
pub fn phi_gradient(m: &GibbsModel, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    if x.dim() != m.dim() {
        return Err(Error::DimMismatch {
            left: m.dim(),
            right: x.dim(),
        });
    }
    let minus = -&(m.h0() + x);
    let plus = &minus + &x.scale(2.0);
    let dm = eigh(&minus)?;
    let dp = eigh(&plus)?;
    if dm.eigenvalues.last().copied().unwrap() > EXP_OVERFLOW
        || dp.eigenvalues.last().copied().unwrap() > EXP_OVERFLOW
    {
        return Err(Error::Saturated);
    }
    let em = dm.apply(f64::exp)?;
    let ep = dp.apply(f64::exp)?;
    Ok((&ep - &em).scale(0.5))
}

/// Luxemburg norm `||X||_{L,a} = inf { r > 0 : Phi(X/r) < a }` by bisection
/// on the monotone map `r -> Phi(X/r)`.
pub fn luxemburg_norm(m: &GibbsModel, x: &HermitianMatrix, a: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::InvalidArgument("threshold a must be > 0".into()));
    }
    let op = operator_norm(x)?;
    if op <= 0.0 {
        return Ok(0.0);
    }
    let modular = |r: f64| -> Result<f64> { Ok(phi(m, &x.scale(1.0 / r))?.value) };
    let mut hi = op;
    let mut guard = 0;
    while modular(hi)? >= a {
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
        if modular(next)? >= a {
            lo = next;
            break;
        }
        lo = next;
        guard += 1;
        if guard > 2000 {
            return Ok(0.0);
        }
    }
    while (hi - lo) > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if modular(mid)? < a {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Norms at two thresholds `a > b` plus the equivalence bound
/// `||X||_{L,b} <= (a/b) ||X||_{L,a}` and the ordering `||X||_{L,a} <= ||X||_{L,b}`.
#[derive(Clone, Copy, Debug)]
pub struct NormEquivalence {
    pub norm_a: f64,
    pub norm_b: f64,
    pub bound_ok: bool,
}

pub fn norm_equivalence_report(
    m: &GibbsModel,
    x: &HermitianMatrix,
    a: f64,
    b: f64,
) -> Result<NormEquivalence> {
    if !(a > b && b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need a > b > 0, got a = {a}, b = {b}"
        )));
    }
    let norm_a = luxemburg_norm(m, x, a)?;
    let norm_b = luxemburg_norm(m, x, b)?;
    let bound_ok = norm_b <= (a / b) * norm_a + 1e-9 && norm_a <= norm_b + 1e-9;
    Ok(NormEquivalence {
        norm_a,
        norm_b,
        bound_ok,
    })
}

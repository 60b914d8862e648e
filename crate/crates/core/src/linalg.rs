//! Dense Hermitian linear algebra: eigendecomposition, matrix functions,
//! traces, norms, and the positive-semidefinite partial order.
//!
//! Everything goes through the spectral route; dimensions are small (<= 64)
//! so a cyclic Jacobi eigensolver is accurate and dependency-free.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hermiticity tolerance enforced at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Default tolerance for the PSD partial order.
pub const PSD_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-14;

/// A self-adjoint operator on the truncated Hilbert space, stored dense
/// row-major. Construction symmetrizes, so the invariant
/// `entries[i][j] == conj(entries[j][i])` holds exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Build from arbitrary complex entries; the anti-Hermitian part is
    /// projected out by (A + A^dag)/2.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dim must be >= 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        let mut m = Self { dim, entries };
        m.symmetrize();
        Ok(m)
    }

    fn symmetrize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            self.entries[i * n + i] = Complex64::new(self.entries[i * n + i].re, 0.0);
            for j in (i + 1)..n {
                let a = self.entries[i * n + j];
                let b = self.entries[j * n + i];
                let avg = 0.5 * (a + b.conj());
                self.entries[i * n + j] = avg;
                self.entries[j * n + i] = avg.conj();
            }
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * dim + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Build from real entries (symmetrized).
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        let cplx = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_entries(dim, cplx)
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self::from_entries(
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.entries[i * self.dim + i].re)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// `self + c*I`.
    pub fn add_scaled_identity(&self, c: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.entries[i * self.dim + i] += c;
        }
        m
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.entries.iter().all(|z| z.norm() <= tol)
    }

    fn assert_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

impl std::ops::Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in +");
        HermitianMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in -");
        HermitianMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

/// General complex square matrix; workhorse for products of matrix functions
/// and for singular values of non-Hermitian sandwiches.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in mul");
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        ComplexMatrix { dim: n, data: out }
    }

    /// Rewrites every entry through `f(i, j, z)`; used for Hadamard products
    /// with spectral kernels.
    pub fn scale_entries<F: Fn(usize, usize, Complex64) -> Complex64>(&mut self, f: F) {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                self.data[i * n + j] = f(i, j, self.data[i * n + j]);
            }
        }
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.data[i * n + j].conj();
            }
        }
        ComplexMatrix { dim: n, data: out }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Hermitize and return as a `HermitianMatrix`; the caller asserts the
    /// product is Hermitian up to roundoff.
    pub fn into_hermitian(self) -> Result<HermitianMatrix> {
        HermitianMatrix::from_entries(self.dim, self.data)
    }

    /// Largest singular value, via the top eigenvalue of `A^dag A`.
    pub fn largest_singular_value(&self) -> Result<f64> {
        let gram = self.adjoint().mul(self).into_hermitian()?;
        let d = eigh(&gram)?;
        let max = d.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
        Ok(max.sqrt())
    }
}

impl From<&HermitianMatrix> for ComplexMatrix {
    fn from(h: &HermitianMatrix) -> Self {
        ComplexMatrix {
            dim: h.dim,
            data: h.entries.clone(),
        }
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns of a
/// unitary), the backbone of all matrix functions.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Unitary with eigenvectors as columns.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(lambda)) U^dag`. Errors if `f` is not finite at some
    /// eigenvalue.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<HermitianMatrix> {
        matrix_fn(self, f)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi with complex
/// rotations. Deterministic; converges quadratically at these dimensions.
pub fn eigh(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = h.dim;
    let mut a = h.entries.clone();
    let mut u = ComplexMatrix::identity(n);
    let norm = h.frobenius_norm();
    let threshold = JACOBI_OFF_TOL * norm.max(f64::MIN_POSITIVE);

    if n > 1 {
        let mut converged = false;
        for _sweep in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            s += a[i * n + j].norm_sqr();
                        }
                    }
                }
                s.sqrt()
            };
            if off <= threshold {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    let r = apq.norm();
                    if r <= threshold / (n as f64) {
                        continue;
                    }
                    let phase = apq / r; // e^{i phi}
                    let app = a[p * n + p].re;
                    let aqq = a[q * n + q].re;
                    let tau = (aqq - app) / (2.0 * r);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    // Combined unitary on the (p,q) plane:
                    //   J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                    // chosen so that (J^dag A J)[p][q] = 0.
                    let jpp = Complex64::new(c, 0.0);
                    let jpq = Complex64::new(s, 0.0);
                    let jqp = -s * phase.conj();
                    let jqq = c * phase.conj();

                    // A <- A J (columns p, q)
                    for i in 0..n {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        a[i * n + p] = aip * jpp + aiq * jqp;
                        a[i * n + q] = aip * jpq + aiq * jqq;
                    }
                    // A <- J^dag A (rows p, q)
                    for j in 0..n {
                        let apj = a[p * n + j];
                        let aqj = a[q * n + j];
                        a[p * n + j] = jpp.conj() * apj + jqp.conj() * aqj;
                        a[q * n + j] = jpq.conj() * apj + jqq.conj() * aqj;
                    }
                    // U <- U J
                    for i in 0..n {
                        let uip = u.data[i * n + p];
                        let uiq = u.data[i * n + q];
                        u.data[i * n + p] = uip * jpp + uiq * jqp;
                        u.data[i * n + q] = uip * jpq + uiq * jqq;
                    }
                }
            }
        }
        if !converged {
            // one final check after the last sweep
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j)
                .map(|(i, j)| a[i * n + j].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off > threshold {
                return Err(Error::EighNoConvergence {
                    dim: n,
                    norm,
                    sweeps: JACOBI_MAX_SWEEPS,
                });
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[i * n + i].re, i)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

    let eigenvalues: Vec<f64> = pairs.iter().map(|&(v, _)| v).collect();
    let mut vecs = vec![Complex64::new(0.0, 0.0); n * n];
    for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
        for i in 0..n {
            vecs[i * n + new_col] = u.data[i * n + old_col];
        }
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix { dim: n, data: vecs },
    })
}

/// `U diag(f(lambda)) U^dag` for a scalar function `f`.
pub fn matrix_fn<F: Fn(f64) -> f64>(d: &SpectralDecomposition, f: F) -> Result<HermitianMatrix> {
    let n = d.dim();
    let mut fvals = Vec::with_capacity(n);
    for &lam in &d.eigenvalues {
        let v = f(lam);
        if !v.is_finite() {
            return Err(Error::FnDomain { eigenvalue: lam });
        }
        fvals.push(v);
    }
    let u = &d.eigenvectors;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (k, &fv) in fvals.iter().enumerate() {
                s += u.data[i * n + k] * fv * u.data[j * n + k].conj();
            }
            out[i * n + j] = s;
            out[j * n + i] = s.conj();
        }
    }
    HermitianMatrix::from_entries(n, out)
}

/// `Tr(AB)`, real for Hermitian inputs. Errors on dimension mismatch or when
/// the imaginary residue indicates numeric degradation.
pub fn trace_pair(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    a.assert_same_dim(b)?;
    let n = a.dim;
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            t += a.entries[i * n + k] * b.entries[k * n + i];
        }
    }
    if t.im.abs() > 1e-9 {
        return Err(Error::NumericDegradation { imag: t.im });
    }
    Ok(t.re)
}

/// True iff `A <= B` in the PSD order, i.e. min eigenvalue of `B - A` is
/// `>= -tol`.
pub fn psd_order(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<bool> {
    a.assert_same_dim(b)?;
    let diff = b - a;
    let d = eigh(&diff)?;
    Ok(d.eigenvalues[0] >= -tol)
}

/// Schatten quasi-norm `(Tr rho^beta)^{1/beta}` for PSD `rho`, beta in (0,1].
pub fn schatten_quasi_norm(rho: &HermitianMatrix, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "beta must lie in (0,1], got {beta}"
        )));
    }
    let d = eigh(rho)?;
    let min = d.eigenvalues[0];
    if min < -1e-10 {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let sum: f64 = d.eigenvalues.iter().map(|&l| l.max(0.0).powf(beta)).sum();
    Ok(sum.powf(1.0 / beta))
}

/// Operator norm: max |eigenvalue|.
pub fn operator_norm(a: &HermitianMatrix) -> Result<f64> {
    let d = eigh(a)?;
    Ok(d.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs())))
}

/// Random Hermitian matrix with standard-normal real and imaginary parts,
/// symmetrized and scaled. Used by generators and the verification suites.
pub fn random_hermitian<R: rand::Rng>(dim: usize, rng: &mut R, scale: f64) -> HermitianMatrix {
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|_| {
            Complex64::new(
                rng.sample::<f64, _>(rand_distr::StandardNormal),
                rng.sample::<f64, _>(rand_distr::StandardNormal),
            )
        })
        .collect();
    HermitianMatrix::from_entries(dim, entries)
        .unwrap()
        .scale(scale)
}

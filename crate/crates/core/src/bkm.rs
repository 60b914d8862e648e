//! Bogoliubov-Kubo-Mori inner product, generalized means and scores,
//! entropies, alpha-entropies, and Amari embeddings.
//!
//! The closed-form logarithmic-mean kernel is the engine; Gauss-Legendre
//! quadrature of the integral form is kept as the independent oracle for the
//! test suites.

use crate::error::{Error, Result};
use crate::linalg::{eigh, trace_pair, ComplexMatrix, HermitianMatrix};
use crate::model::GibbsModel;

/// Eigenvalues below this fail the faithfulness check.
pub const FAITHFUL_TOL: f64 = 1e-14;

/// Logarithmic-mean kernel in the eigenbasis of a faithful state:
/// `K_ij = (l_i - l_j)/(log l_i - log l_j)`, `K_ii = l_i`.
#[derive(Clone, Debug)]
pub struct BkmKernel {
    eigenvalues: Vec<f64>,
    kernel: Vec<f64>,
    pub prefactor: f64,
}

impl BkmKernel {
    pub fn new(eigenvalues: &[f64], prefactor: f64) -> Result<Self> {
        let n = eigenvalues.len();
        if let Some(&bad) = eigenvalues.iter().find(|&&l| l <= FAITHFUL_TOL) {
            return Err(Error::NotFaithful {
                min_eigenvalue: bad,
            });
        }
        let mut kernel = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                kernel[i * n + j] = log_mean(eigenvalues[i], eigenvalues[j]);
            }
        }
        Ok(Self {
            eigenvalues: eigenvalues.to_vec(),
            kernel,
            prefactor,
        })
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.eigenvalues.len() + j]
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Logarithmic mean with a series switch near degeneracy: for
/// `|log a - log b| < 1e-8` the quotient is 0/0, so use
/// `sqrt(ab) (1 + d^2/24)` with `d = log a - log b`.
fn log_mean(a: f64, b: f64) -> f64 {
    let d = a.ln() - b.ln();
    if d.abs() < 1e-8 {
        let m = (a * b).sqrt();
        m * (1.0 + d * d / 24.0)
    } else {
        (a - b) / d
    }
}

fn faithful_eigs(rho: &HermitianMatrix) -> Result<crate::linalg::SpectralDecomposition> {
    let d = eigh(rho)?;
    if d.eigenvalues[0] <= FAITHFUL_TOL {
        return Err(Error::NotFaithful {
            min_eigenvalue: d.eigenvalues[0],
        });
    }
    Ok(d)
}

/// BKM inner product via the closed-form kernel:
/// `prefactor * sum_ij K_ij Xt_ij conj(Yt_ij)` with `Xt = U^dag X U` in the
/// eigenbasis of `rho`.
pub fn bkm_inner(
    rho: &HermitianMatrix,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    prefactor: f64,
) -> Result<f64> {
    if x.dim() != rho.dim() || y.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: x.dim().max(y.dim()),
        });
    }
    let d = faithful_eigs(rho)?;
    let kernel = BkmKernel::new(&d.eigenvalues, prefactor)?;
    let u = &d.eigenvectors;
    let xt = u.adjoint().mul(&ComplexMatrix::from(x)).mul(u);
    let yt = u.adjoint().mul(&ComplexMatrix::from(y)).mul(u);
    let n = rho.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += kernel.value(i, j) * (xt.entry(i, j) * yt.entry(i, j).conj()).re;
        }
    }
    Ok(prefactor * s)
}

/// Gauss-Legendre nodes and weights on [0, 1], by Golub-Welsch on the Jacobi
/// matrix (eigensolver reused from `linalg`).
pub fn gauss_legendre_unit(n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one node".into()));
    }
    let mut j = HermitianMatrix::zeros(n);
    let mut entries: Vec<num_complex::Complex64> = j.entries().to_vec();
    for k in 1..n {
        let b = k as f64 / ((4.0 * (k * k) as f64 - 1.0).sqrt());
        entries[(k - 1) * n + k] = num_complex::Complex64::new(b, 0.0);
        entries[k * n + (k - 1)] = num_complex::Complex64::new(b, 0.0);
    }
    j = HermitianMatrix::from_entries(n, entries)?;
    let d = eigh(&j)?;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let node = 0.5 * (d.eigenvalues[k] + 1.0);
        let first = d.eigenvectors.entry(0, k).norm_sqr();
        out.push((node, first)); // weight 2*first on [-1,1], halved for [0,1]
    }
    Ok(out)
}

/// Quadrature oracle for the BKM integral
/// `prefactor * int_0^1 Tr(rho^a x rho^{1-a} y) da`, computed through plain
/// matrix products so it is independent of the kernel route. Test-only by
/// intent, exported for the verification suites.
pub fn bkm_quadrature_oracle(
    rho: &HermitianMatrix,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    nodes: usize,
    prefactor: f64,
) -> Result<f64> {
    let d = faithful_eigs(rho)?;
    let xm = ComplexMatrix::from(x);
    let ym = ComplexMatrix::from(y);
    let mut total = 0.0;
    for (alpha, w) in gauss_legendre_unit(nodes)? {
        let ra = d.apply(|l| l.powf(alpha))?;
        let rb = d.apply(|l| l.powf(1.0 - alpha))?;
        let prod = ComplexMatrix::from(&ra)
            .mul(&xm)
            .mul(&ComplexMatrix::from(&rb))
            .mul(&ym);
        total += w * prod.trace().re;
    }
    Ok(prefactor * total)
}

/// Generalized mean `rho . x = Tr int_0^1 rho^t x rho^{1-t} dt`; cyclicity
/// collapses the integral to `Tr(rho x)`.
pub fn generalized_mean(rho: &HermitianMatrix, x: &HermitianMatrix) -> Result<f64> {
    let d = eigh(rho)?;
    if d.eigenvalues[0] <= FAITHFUL_TOL {
        return Err(Error::NotFaithful {
            min_eigenvalue: d.eigenvalues[0],
        });
    }
    trace_pair(rho, x)
}

/// Quadrature variant of the generalized mean, kept for the test suite as
/// the independent route around the cyclicity identity.
pub fn generalized_mean_quadrature(
    rho: &HermitianMatrix,
    x: &HermitianMatrix,
    nodes: usize,
) -> Result<f64> {
    let d = faithful_eigs(rho)?;
    let xm = ComplexMatrix::from(x);
    let mut total = 0.0;
    for (t, w) in gauss_legendre_unit(nodes)? {
        let ra = d.apply(|l| l.powf(t))?;
        let rb = d.apply(|l| l.powf(1.0 - t))?;
        let prod = ComplexMatrix::from(&ra)
            .mul(&xm)
            .mul(&ComplexMatrix::from(&rb));
        total += w * prod.trace().re;
    }
    Ok(total)
}

/// Umegaki relative entropy in the argument order
/// `S(sigma|rho) = Tr rho (log rho - log sigma)`. Note the reversed
/// convention relative to most texts; all internal call sites use this order.
pub fn relative_entropy(sigma: &HermitianMatrix, rho: &HermitianMatrix) -> Result<f64> {
    let ds = faithful_eigs(sigma)?;
    let dr = faithful_eigs(rho)?;
    let log_s = ds.apply(f64::ln)?;
    let log_r = dr.apply(f64::ln)?;
    trace_pair(rho, &(&log_r - &log_s))
}

/// Von Neumann entropy `-Tr rho log rho` (the sign convention that makes the
/// value land in `[0, log dim]`), with `0 log 0 := 0`.
pub fn von_neumann_entropy(rho: &HermitianMatrix) -> Result<f64> {
    let d = eigh(rho)?;
    if d.eigenvalues[0] < -1e-10 {
        return Err(Error::NotPsd {
            min_eigenvalue: d.eigenvalues[0],
        });
    }
    Ok(d.eigenvalues
        .iter()
        .map(|&l| {
            let l = l.max(0.0);
            if l == 0.0 {
                0.0
            } else {
                -l * l.ln()
            }
        })
        .sum())
}

/// Hasegawa-Petz alpha-entropy, quantum transcription
/// `(1-alpha)^{-1} Tr(rho - rho^alpha sigma^{1-alpha})`; recovers
/// `relative_entropy(sigma, rho)` as `alpha -> 1`.
pub fn alpha_entropy(sigma: &HermitianMatrix, rho: &HermitianMatrix, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    let ds = faithful_eigs(sigma)?;
    let dr = faithful_eigs(rho)?;
    let ra = dr.apply(|l| l.powf(alpha))?;
    let sb = ds.apply(|l| l.powf(1.0 - alpha))?;
    let cross = trace_pair(&ra, &sb)?;
    Ok((rho.trace() - cross) / (1.0 - alpha))
}

/// Amari embedding `rho^{(1-alpha)/2}` for `alpha` in `(-1, 1)`.
pub fn amari_embedding(rho: &HermitianMatrix, alpha: f64) -> Result<HermitianMatrix> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (-1,1), got {alpha}"
        )));
    }
    let d = eigh(rho)?;
    if d.eigenvalues[0] < -1e-10 {
        return Err(Error::NotPsd {
            min_eigenvalue: d.eigenvalues[0],
        });
    }
    d.apply(|l| l.max(0.0).powf((1.0 - alpha) / 2.0))
}

/// Alternative exponent convention `rho^{2/(1-alpha)}`, exposed alongside
/// the default; the two conventions coincide only at `alpha = -1`.
pub fn amari_embedding_alt(rho: &HermitianMatrix, alpha: f64) -> Result<HermitianMatrix> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (-1,1), got {alpha}"
        )));
    }
    let d = eigh(rho)?;
    if d.eigenvalues[0] < -1e-10 {
        return Err(Error::NotPsd {
            min_eigenvalue: d.eigenvalues[0],
        });
    }
    d.apply(|l| l.max(0.0).powf(2.0 / (1.0 - alpha)))
}

/// Limit embedding `l_+(rho) = log rho` (faithful input required).
pub fn amari_embedding_log(rho: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = faithful_eigs(rho)?;
    d.apply(f64::ln)
}

/// Limit embedding `l_-(rho) = rho`.
pub fn amari_embedding_state(rho: &HermitianMatrix) -> HermitianMatrix {
    rho.clone()
}

/// `|S(rho0|rhoX) + S(rhoX|rho0) - Tr[(log rhoX - log rho0)(rhoX - rho0)]|`;
/// the identity makes this vanish, so the gap measures numeric degradation.
pub fn entropy_sum_identity_gap(m: &GibbsModel, s: &crate::model::PerturbedState) -> Result<f64> {
    let rho0 = m.rho0();
    let rho_x = &s.rho_x;
    let lhs = relative_entropy(rho0, rho_x)? + relative_entropy(rho_x, rho0)?;
    let log0 = faithful_eigs(rho0)?.apply(f64::ln)?;
    let logx = faithful_eigs(rho_x)?.apply(f64::ln)?;
    let rhs = trace_pair(&(&logx - &log0), &(rho_x - rho0))?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_hermitian;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_density(dim: usize, rng: &mut impl Rng, scale: f64) -> HermitianMatrix {
        let g = random_hermitian(dim, rng, scale);
        let e = eigh(&g).unwrap().apply(f64::exp).unwrap();
        e.scale(1.0 / e.trace())
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for &n in &[4usize, 8, 16] {
            let nodes = gauss_legendre_unit(n).unwrap();
            let wsum: f64 = nodes.iter().map(|&(_, w)| w).sum();
            assert_abs_diff_eq!(wsum, 1.0, epsilon = 1e-12);
            // exact for x^k up to degree 2n-1
            for k in 0..(2 * n).min(12) {
                let quad: f64 = nodes.iter().map(|&(t, w)| w * t.powi(k as i32)).sum();
                assert_abs_diff_eq!(quad, 1.0 / (k as f64 + 1.0), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bkm_spot_values() {
        let half = HermitianMatrix::from_diag(&[0.5, 0.5]);
        let sx = HermitianMatrix::pauli_x();
        let v = bkm_inner(&half, &sx, &sx, 0.5).unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-12);

        let rho = HermitianMatrix::from_diag(&[0.75, 0.25]);
        let v = bkm_inner(&rho, &sx, &sx, 0.5).unwrap();
        let k12 = 0.5 / 3.0f64.ln();
        assert_abs_diff_eq!(v, k12, epsilon = 1e-12);

        let z = HermitianMatrix::zeros(2);
        assert_abs_diff_eq!(bkm_inner(&half, &z, &z, 0.5).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn kernel_bounds_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let eigs: Vec<f64> = (0..5).map(|_| rng.gen_range(0.01..1.0)).collect();
            let k = BkmKernel::new(&eigs, 0.5).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    let lo = eigs[i].min(eigs[j]);
                    let hi = eigs[i].max(eigs[j]);
                    assert!(k.value(i, j) >= lo - 1e-12 && k.value(i, j) <= hi + 1e-12);
                    assert_abs_diff_eq!(k.value(i, j), k.value(j, i), epsilon = 1e-14);
                    assert!(k.value(i, j) > 0.0);
                }
            }
        }
    }

    #[test]
    fn kernel_near_degenerate_series() {
        // the direct quotient cancels catastrophically here; the log-mean
        // agrees with the arithmetic mean to O(d^2) ~ 1e-18
        let a: f64 = 0.5;
        let b: f64 = 0.5 * (1.0 + 3e-9);
        assert_abs_diff_eq!(super::log_mean(a, b), 0.5 * (a + b), epsilon = 1e-12);
        // continuity across the series switch, where both routes are accurate
        let c: f64 = 0.5 * (1.0 + 2e-8);
        let direct = (a - c) / (a.ln() - c.ln());
        assert_abs_diff_eq!(super::log_mean(a, c), direct, epsilon = 1e-10);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for &dim in &[2usize, 4, 6] {
            for _ in 0..10 {
                let rho = random_density(dim, &mut rng, 0.7);
                let x = random_hermitian(dim, &mut rng, 1.0);
                let closed = bkm_inner(&rho, &x, &x, 0.5).unwrap();
                let quad = bkm_quadrature_oracle(&rho, &x, &x, 64, 0.5).unwrap();
                assert!(
                    (closed - quad).abs() <= 1e-10 * closed.abs().max(1.0),
                    "{closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn commuting_case_collapses() {
        let rho = HermitianMatrix::from_diag(&[0.6, 0.3, 0.1]);
        let x = HermitianMatrix::from_diag(&[1.0, -0.5, 0.2]);
        let y = HermitianMatrix::from_diag(&[0.4, 0.9, -1.0]);
        let quad = bkm_quadrature_oracle(&rho, &x, &y, 32, 1.0).unwrap();
        let direct: f64 = (0..3)
            .map(|i| rho.entry(i, i).re * x.entry(i, i).re * y.entry(i, i).re)
            .sum();
        assert_abs_diff_eq!(quad, direct, epsilon = 1e-12);
    }

    #[test]
    fn bkm_is_positive_definite_bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..10 {
            let rho = random_density(4, &mut rng, 0.6);
            let x = random_hermitian(4, &mut rng, 0.8);
            let y = random_hermitian(4, &mut rng, 0.8);
            assert!(bkm_inner(&rho, &x, &x, 0.5).unwrap() > 0.0);
            assert_abs_diff_eq!(
                bkm_inner(&rho, &x, &y, 0.5).unwrap(),
                bkm_inner(&rho, &y, &x, 0.5).unwrap(),
                epsilon = 1e-10
            );
            let a: f64 = rng.gen_range(-2.0..2.0);
            let lin = bkm_inner(&rho, &x.scale(a), &y, 0.5).unwrap();
            assert_abs_diff_eq!(
                lin,
                a * bkm_inner(&rho, &x, &y, 0.5).unwrap(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn generalized_mean_examples() {
        let rho = HermitianMatrix::from_diag(&[0.75, 0.25]);
        assert_abs_diff_eq!(
            generalized_mean(&rho, &HermitianMatrix::identity(2)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            generalized_mean(&rho, &HermitianMatrix::pauli_z()).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..20 {
            let rho = random_density(4, &mut rng, 0.6);
            let x = random_hermitian(4, &mut rng, 0.8);
            let quad = generalized_mean_quadrature(&rho, &x, 32).unwrap();
            assert_abs_diff_eq!(quad, generalized_mean(&rho, &x).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = HermitianMatrix::from_diag(&[0.5, 0.5]);
        assert_abs_diff_eq!(relative_entropy(&rho, &rho).unwrap(), 0.0, epsilon = 1e-12);
        let sigma = HermitianMatrix::from_diag(&[0.75, 0.25]);
        // S(sigma|rho) = Tr rho (log rho - log sigma)
        let v = relative_entropy(&sigma, &rho).unwrap();
        assert_abs_diff_eq!(v, 0.14384103622589045, epsilon = 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..20 {
            let r = random_density(3, &mut rng, 0.5);
            let s = random_density(3, &mut rng, 0.5);
            let v = relative_entropy(&s, &r).unwrap();
            assert!(v >= -1e-10);
            if v <= 1e-12 {
                assert!((&r - &s).frobenius_norm() <= 1e-5);
            }
        }
    }

    #[test]
    fn commuting_relative_entropy_is_classical_kl() {
        let f = [0.5, 0.3, 0.2];
        let g = [0.25, 0.25, 0.5];
        let rho = HermitianMatrix::from_diag(&f);
        let sigma = HermitianMatrix::from_diag(&g);
        let kl: f64 = f.iter().zip(&g).map(|(&fi, &gi)| fi * (fi / gi).ln()).sum();
        assert_abs_diff_eq!(relative_entropy(&sigma, &rho).unwrap(), kl, epsilon = 1e-12);
    }

    #[test]
    fn von_neumann_examples() {
        let pure = HermitianMatrix::from_diag(&[1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(von_neumann_entropy(&pure).unwrap(), 0.0, epsilon = 1e-12);
        let mixed = HermitianMatrix::identity(4).scale(0.25);
        assert_abs_diff_eq!(
            von_neumann_entropy(&mixed).unwrap(),
            4.0f64.ln(),
            epsilon = 1e-12
        );
        let rho = HermitianMatrix::from_diag(&[0.75, 0.25]);
        assert_abs_diff_eq!(
            von_neumann_entropy(&rho).unwrap(),
            0.5623351446188083,
            epsilon = 1e-10
        );
    }

    #[test]
    fn alpha_entropy_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let rho = random_density(3, &mut rng, 0.5);
        let sigma = random_density(3, &mut rng, 0.5);
        assert_abs_diff_eq!(
            alpha_entropy(&rho, &rho, 0.5).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let s = relative_entropy(&sigma, &rho).unwrap();
        let s999 = alpha_entropy(&sigma, &rho, 0.999).unwrap();
        assert!((s999 - s).abs() <= 1e-2 * (1.0 + s.abs()));
        assert!(alpha_entropy(&sigma, &rho, 1.5).is_err());
    }

    #[test]
    fn amari_embedding_examples() {
        let rho = HermitianMatrix::from_diag(&[0.25, 0.75]);
        let e = amari_embedding(&rho, 0.0).unwrap();
        assert_abs_diff_eq!(e.entry(0, 0).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(e.entry(1, 1).re, 0.8660254037844386, epsilon = 1e-10);
        let near_minus1 = amari_embedding(&rho, -0.9999999).unwrap();
        assert!((&near_minus1 - &rho).frobenius_norm() <= 1e-6);
        let l = amari_embedding_log(&rho).unwrap();
        assert_abs_diff_eq!(l.entry(0, 0).re, 0.25f64.ln(), epsilon = 1e-12);
        assert!(amari_embedding_log(&HermitianMatrix::from_diag(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn entropy_sum_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let m = GibbsModel::make_custom(HermitianMatrix::from_diag(&[
            (4.0f64 / 3.0).ln(),
            4.0f64.ln(),
        ]))
        .unwrap();
        let s = m.perturb(&HermitianMatrix::pauli_z().scale(0.3)).unwrap();
        assert!(entropy_sum_identity_gap(&m, &s).unwrap() <= 1e-10);
        for _ in 0..20 {
            let m = GibbsModel::make_random_model(4, rng.gen(), 0.5).unwrap();
            let x = random_hermitian(4, &mut rng, 0.4);
            let s = m.perturb(&x).unwrap();
            assert!(entropy_sum_identity_gap(&m, &s).unwrap() <= 1e-9);
        }
    }
}

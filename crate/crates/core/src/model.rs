//! Base points `rho_0 = e^{-H0}` with `Tr e^{-H0} = 1`, perturbed states
//! `rho_X = e^{-H0-X-psi_X}`, scores, and the boundedness / nearness
//! predicates that carve out the tangent and cotangent sets.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, operator_norm, psd_order, ComplexMatrix, HermitianMatrix, SpectralDecomposition, PSD_TOL,
};

/// Eigenvalue exponents above this saturate `exp` in f64.
pub const EXP_OVERFLOW: f64 = 700.0;

/// Beta grid on which `Tr rho_0^beta` is tabulated at construction.
pub const BETA_GRID: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Oscillator,
    Random,
    Custom,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Oscillator => write!(f, "oscillator"),
            Family::Random => write!(f, "random"),
            Family::Custom => write!(f, "custom"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oscillator" => Ok(Family::Oscillator),
            "random" => Ok(Family::Random),
            "custom" => Ok(Family::Custom),
            other => Err(Error::InvalidArgument(format!("unknown family '{other}'"))),
        }
    }
}

/// A normalized Gibbs base point. `h0` is stored post-shift, so
/// `Tr e^{-h0} = 1` holds by construction and round-trips through the file
/// format.
#[derive(Clone, Debug)]
pub struct GibbsModel {
    h0: HermitianMatrix,
    family: Family,
    family_params: BTreeMap<String, f64>,
    beta_profile: Vec<(f64, f64)>,
    shift: f64,
    h0_eigs: SpectralDecomposition,
    rho0: HermitianMatrix,
}

/// A perturbation `X` with its free energy `psi_X = log Tr e^{-H0-X}` and
/// density `rho_X = e^{-H0-X-psi_X}`.
#[derive(Clone, Debug)]
pub struct PerturbedState {
    pub x: HermitianMatrix,
    pub psi_x: f64,
    pub rho_x: HermitianMatrix,
}

fn log_sum_exp(vals: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = vals.clone().fold(f64::NEG_INFINITY, f64::max);
    m + vals.map(|v| (v - m).exp()).sum::<f64>().ln()
}

impl GibbsModel {
    /// Normalize a raw Hamiltonian: shift `h0` by `log Tr e^{-h0_raw}` so
    /// that `Z0 = 1`, then tabulate the beta profile.
    pub fn from_raw_h0(
        h0_raw: HermitianMatrix,
        family: Family,
        family_params: BTreeMap<String, f64>,
    ) -> Result<Self> {
        let raw_eigs = eigh(&h0_raw)?;
        let max_exp = raw_eigs
            .eigenvalues
            .iter()
            .fold(f64::NEG_INFINITY, |m, &l| m.max(-l));
        if max_exp > EXP_OVERFLOW {
            return Err(Error::Overflow {
                max_exponent: max_exp,
            });
        }
        let shift = log_sum_exp(raw_eigs.eigenvalues.iter().map(|&l| -l));
        let h0 = h0_raw.add_scaled_identity(shift);
        let h0_eigs = eigh(&h0)?;
        let rho0 = h0_eigs.apply(|l| (-l).exp())?;
        let beta_profile = BETA_GRID
            .iter()
            .map(|&b| {
                let tr: f64 = h0_eigs.eigenvalues.iter().map(|&l| (-b * l).exp()).sum();
                (b, tr)
            })
            .collect();
        let m = Self {
            h0,
            family,
            family_params,
            beta_profile,
            shift,
            h0_eigs,
            rho0,
        };
        debug_assert!((m.rho0.trace() - 1.0).abs() <= 1e-10);
        Ok(m)
    }

    /// Truncated harmonic oscillator with raw energies `omega*(n + 1/2)`.
    pub fn make_oscillator(n_levels: usize, omega: f64) -> Result<Self> {
        if n_levels < 2 {
            return Err(Error::InvalidArgument("n_levels must be >= 2".into()));
        }
        if omega <= 0.0 {
            return Err(Error::InvalidArgument("omega must be > 0".into()));
        }
        let energies: Vec<f64> = (0..n_levels).map(|n| omega * (n as f64 + 0.5)).collect();
        let mut params = BTreeMap::new();
        params.insert("omega".into(), omega);
        params.insert("levels".into(), n_levels as f64);
        Self::from_raw_h0(
            HermitianMatrix::from_diag(&energies),
            Family::Oscillator,
            params,
        )
    }

    /// Seeded random model: `h0_raw = scale * (G + G^T)/2` with standard
    /// normal `G`. Deterministic in `seed`.
    pub fn make_random_model(dim: usize, seed: u64, scale: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument("dim must be >= 2".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<f64> = (0..dim * dim)
            .map(|_| rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal))
            .collect();
        let h0_raw = HermitianMatrix::from_real(dim, &entries)?.scale(scale);
        let mut params = BTreeMap::new();
        params.insert("seed".into(), seed as f64);
        params.insert("scale".into(), scale);
        Self::from_raw_h0(h0_raw, Family::Random, params)
    }

    /// Custom model from explicit raw energies or Hamiltonian.
    pub fn make_custom(h0_raw: HermitianMatrix) -> Result<Self> {
        Self::from_raw_h0(h0_raw, Family::Custom, BTreeMap::new())
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn h0(&self) -> &HermitianMatrix {
        &self.h0
    }

    pub fn h0_eigs(&self) -> &SpectralDecomposition {
        &self.h0_eigs
    }

    pub fn rho0(&self) -> &HermitianMatrix {
        &self.rho0
    }

    /// `rho_0^t` via the cached spectral decomposition.
    pub fn rho0_power(&self, t: f64) -> Result<HermitianMatrix> {
        self.h0_eigs.apply(|l| (-t * l).exp())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn family_params(&self) -> &BTreeMap<String, f64> {
        &self.family_params
    }

    /// Normalization shift applied to the raw Hamiltonian (`log Z0_raw`).
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `(beta, Tr rho_0^beta)` pairs on the fixed beta grid.
    pub fn beta_profile(&self) -> &[(f64, f64)] {
        &self.beta_profile
    }

    fn check_dim(&self, x: &HermitianMatrix) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: x.dim(),
            });
        }
        Ok(())
    }

    /// `rho_X := e^{-H0-X-psi_X}` with `psi_X = log Tr e^{-H0-X}`.
    pub fn perturb(&self, x: &HermitianMatrix) -> Result<PerturbedState> {
        self.check_dim(x)?;
        let a = -&(&self.h0 + x);
        let d = eigh(&a)?;
        let max_exp = d.eigenvalues.last().copied().unwrap();
        if max_exp > EXP_OVERFLOW {
            return Err(Error::Overflow {
                max_exponent: max_exp,
            });
        }
        let psi_x = log_sum_exp(d.eigenvalues.iter().copied());
        let rho_x = d.apply(|l| (l - psi_x).exp())?;
        Ok(PerturbedState {
            x: x.clone(),
            psi_x,
            rho_x,
        })
    }

    /// Shift `x` by a multiple of the identity so that its generalized mean
    /// in `rho_0` vanishes. Returns `(x - c*I, c)` with `c = Tr(rho_0 x)`.
    pub fn center_score(&self, x: &HermitianMatrix) -> Result<(HermitianMatrix, f64)> {
        self.check_dim(x)?;
        let c = crate::linalg::trace_pair(&self.rho0, x)?;
        Ok((x.add_scaled_identity(-c), c))
    }

    /// Relative-bound profile `a(b) = ||(h0+b)^{-1/2} x (h0+b)^{-1/2}||` over
    /// a grid of positive `b`. The finite-dimensional Kato bound estimate is
    /// the infimum over the grid.
    pub fn kato_profile(&self, x: &HermitianMatrix, b_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
        self.check_dim(x)?;
        let mut out = Vec::with_capacity(b_grid.len());
        for &b in b_grid {
            let w = self.h0_eigs.apply(|l| (l + b).powf(-0.5))?;
            let wm = ComplexMatrix::from(&w);
            let s = wm.mul(&ComplexMatrix::from(x)).mul(&wm).into_hermitian()?;
            out.push((b, operator_norm(&s)?));
        }
        Ok(out)
    }

    /// Epsilon-boundedness: the largest singular value of the sandwich
    /// `(h0+c)^{-1/2-eps} x (h0+c)^{-1/2+eps}` is at most `c`.
    pub fn epsilon_bounded(&self, x: &HermitianMatrix, epsilon: f64, c: f64) -> Result<bool> {
        self.check_dim(x)?;
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, 1/2], got {epsilon}"
            )));
        }
        if c <= 0.0 {
            return Err(Error::InvalidArgument("c must be > 0".into()));
        }
        let left = self.h0_eigs.apply(|l| (l + c).powf(-0.5 - epsilon))?;
        let right = self.h0_eigs.apply(|l| (l + c).powf(-0.5 + epsilon))?;
        let s = ComplexMatrix::from(&left)
            .mul(&ComplexMatrix::from(x))
            .mul(&ComplexMatrix::from(&right));
        Ok(s.largest_singular_value()? <= c)
    }

    /// p-nearby with the default exponents `(1+p, 1-p)`:
    /// `c^{-1} rho_0^{1+p} <= sigma <= c rho_0^{1-p}`.
    pub fn p_nearby(&self, sigma: &HermitianMatrix, p: f64, c: f64) -> Result<bool> {
        self.p_nearby_with_exponents(sigma, p, c, 1.0 + p, 1.0 - p)
    }

    /// p-nearby with caller-chosen exponents:
    /// `c^{-1} rho_0^{lower_exp} <= sigma <= c rho_0^{upper_exp}`.
    pub fn p_nearby_with_exponents(
        &self,
        sigma: &HermitianMatrix,
        p: f64,
        c: f64,
        lower_exp: f64,
        upper_exp: f64,
    ) -> Result<bool> {
        self.check_dim(sigma)?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "p must lie in (0,1), got {p}"
            )));
        }
        if c <= 1.0 {
            return Err(Error::InvalidArgument("c must be > 1".into()));
        }
        let tr = sigma.trace();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized { trace: tr });
        }
        let sd = eigh(sigma)?;
        if sd.eigenvalues[0] < -1e-10 {
            return Err(Error::NotPsd {
                min_eigenvalue: sd.eigenvalues[0],
            });
        }
        let lower = self.rho0_power(lower_exp)?.scale(1.0 / c);
        let upper = self.rho0_power(upper_exp)?.scale(c);
        Ok(psd_order(&lower, sigma, PSD_TOL)? && psd_order(sigma, &upper, PSD_TOL)?)
    }
}

// --- file format -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ModelFile {
    dim: usize,
    family: Family,
    family_params: BTreeMap<String, f64>,
    /// Row-major `[re, im]` pairs; stored post-shift.
    h0: Vec<[f64; 2]>,
    beta_profile: Vec<[f64; 2]>,
}

impl GibbsModel {
    pub fn to_json(&self) -> String {
        let file = ModelFile {
            dim: self.dim(),
            family: self.family,
            family_params: self.family_params.clone(),
            h0: self.h0.entries().iter().map(|z| [z.re, z.im]).collect(),
            beta_profile: self.beta_profile.iter().map(|&(b, v)| [b, v]).collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(s)
            .map_err(|e| Error::InvalidArgument(format!("bad model file: {e}")))?;
        let entries: Vec<Complex64> = file
            .h0
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let h0 = HermitianMatrix::from_entries(file.dim, entries)?;
        let h0_eigs = eigh(&h0)?;
        let z: f64 = h0_eigs.eigenvalues.iter().map(|&l| (-l).exp()).sum();
        if (z - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { trace: z });
        }
        let rho0 = h0_eigs.apply(|l| (-l).exp())?;
        let beta_profile = BETA_GRID
            .iter()
            .map(|&b| {
                let tr: f64 = h0_eigs.eigenvalues.iter().map(|&l| (-b * l).exp()).sum();
                (b, tr)
            })
            .collect();
        Ok(Self {
            h0,
            family: file.family,
            family_params: file.family_params,
            beta_profile,
            shift: 0.0, // already applied before saving
            h0_eigs,
            rho0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn oscillator_two_levels() {
        let m = GibbsModel::make_oscillator(2, 1.0).unwrap();
        let expected_shift = (f64::exp(-0.5) + f64::exp(-1.5)).ln();
        assert_abs_diff_eq!(m.shift(), expected_shift, epsilon = 1e-12);
        assert_abs_diff_eq!(expected_shift, -0.18673831248177722, epsilon = 1e-10);
        assert_abs_diff_eq!(m.rho0().trace(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn equal_energies_give_maximally_mixed() {
        let m = GibbsModel::make_custom(HermitianMatrix::from_diag(&[2.0f64.ln(), 2.0f64.ln()]))
            .unwrap();
        assert_abs_diff_eq!(m.rho0().entry(0, 0).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m.rho0().entry(1, 1).re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn random_model_deterministic_and_normalized() {
        let a = GibbsModel::make_random_model(4, 7, 1.0).unwrap();
        let b = GibbsModel::make_random_model(4, 7, 1.0).unwrap();
        assert_eq!(a.h0().entries(), b.h0().entries());
        assert_abs_diff_eq!(a.rho0().trace(), 1.0, epsilon = 1e-10);
        let d = eigh(a.rho0()).unwrap();
        assert!(d.eigenvalues[0] > 0.0);
    }

    #[test]
    fn perturb_zero_and_identity_shift() {
        let m = GibbsModel::make_random_model(3, 11, 0.8).unwrap();
        let s = m.perturb(&HermitianMatrix::zeros(3)).unwrap();
        assert_abs_diff_eq!(s.psi_x, 0.0, epsilon = 1e-12);
        assert!((&s.rho_x - m.rho0()).frobenius_norm() <= 1e-10);

        let c = 1.7;
        let s = m.perturb(&HermitianMatrix::identity(3).scale(c)).unwrap();
        assert_abs_diff_eq!(s.psi_x, -c, epsilon = 1e-10);
        assert!((&s.rho_x - m.rho0()).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn perturb_diagonal_hand_case() {
        let m = GibbsModel::make_custom(HermitianMatrix::from_diag(&[2.0f64.ln(), 2.0f64.ln()]))
            .unwrap();
        let s = m.perturb(&HermitianMatrix::pauli_z()).unwrap();
        let denom = f64::exp(-1.0) + f64::exp(1.0);
        assert_abs_diff_eq!(
            s.rho_x.entry(0, 0).re,
            f64::exp(-1.0) / denom,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            s.rho_x.entry(1, 1).re,
            f64::exp(1.0) / denom,
            epsilon = 1e-12
        );
    }

    #[test]
    fn perturb_reconstruction_and_gauge_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let m = GibbsModel::make_random_model(4, rng.gen(), 0.7).unwrap();
            let x = crate::linalg::random_hermitian(4, &mut rng, 0.5);
            let s = m.perturb(&x).unwrap();
            // reconstruction
            let shifted = (m.h0() + &x).add_scaled_identity(s.psi_x);
            let direct = eigh(&-&shifted).unwrap().apply(f64::exp).unwrap();
            assert!((&direct - &s.rho_x).frobenius_norm() <= 1e-10);
            assert_abs_diff_eq!(s.rho_x.trace(), 1.0, epsilon = 1e-10);
            // gauge invariance
            let c = rng.gen_range(-3.0..3.0);
            let s2 = m.perturb(&x.add_scaled_identity(c)).unwrap();
            assert!((&s2.rho_x - &s.rho_x).frobenius_norm() <= 1e-10);
            assert_abs_diff_eq!(s2.psi_x, s.psi_x - c, epsilon = 1e-9);
        }
    }

    #[test]
    fn center_score_examples() {
        let m = GibbsModel::make_custom(HermitianMatrix::from_diag(&[
            (4.0f64 / 3.0).ln(),
            4.0f64.ln(),
        ]))
        .unwrap();
        // rho0 = diag(0.75, 0.25)
        assert_abs_diff_eq!(m.rho0().entry(0, 0).re, 0.75, epsilon = 1e-12);
        let (xc, c) = m.center_score(&HermitianMatrix::pauli_z()).unwrap();
        assert_abs_diff_eq!(c, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(xc.entry(0, 0).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(xc.entry(1, 1).re, -1.5, epsilon = 1e-12);
        let (_, c0) = m.center_score(&xc).unwrap();
        assert_abs_diff_eq!(c0, 0.0, epsilon = 1e-10);

        let (zero, one) = m.center_score(&HermitianMatrix::identity(2)).unwrap();
        assert_abs_diff_eq!(one, 1.0, epsilon = 1e-12);
        assert!(zero.frobenius_norm() <= 1e-12);
    }

    #[test]
    fn kato_profile_examples() {
        let m = GibbsModel::make_oscillator(4, 1.0).unwrap();
        let grid = [0.5, 1.0, 2.0, 4.0];

        let prof = m.kato_profile(&HermitianMatrix::zeros(4), &grid).unwrap();
        for &(_, a) in &prof {
            assert_abs_diff_eq!(a, 0.0, epsilon = 1e-12);
        }

        let prof = m.kato_profile(m.h0(), &grid).unwrap();
        let energies: Vec<f64> = m.h0_eigs().eigenvalues.clone();
        for (k, &(b, a)) in prof.iter().enumerate() {
            let expect = energies
                .iter()
                .fold(0.0f64, |mx, &e| mx.max((e / (e + b)).abs()));
            assert_abs_diff_eq!(a, expect, epsilon = 1e-10);
            if k > 0 {
                assert!(a <= prof[k - 1].1 + 1e-12, "profile must be nonincreasing");
            }
        }

        let prof = m
            .kato_profile(&HermitianMatrix::identity(4), &grid)
            .unwrap();
        let e_min = energies[0];
        for &(b, a) in &prof {
            assert_abs_diff_eq!(a, 1.0 / (e_min + b), epsilon = 1e-10);
        }
    }

    #[test]
    fn epsilon_bounded_examples() {
        let m = GibbsModel::make_oscillator(4, 1.0).unwrap();
        assert!(m
            .epsilon_bounded(&HermitianMatrix::zeros(4), 0.25, 1.0)
            .unwrap());
        assert!(m.epsilon_bounded(m.h0(), 0.5, 1.0).unwrap());
        let huge = {
            let mut x = HermitianMatrix::zeros(4);
            x = &x + &HermitianMatrix::from_diag(&[0.0, 1e6, 0.0, 0.0]);
            x
        };
        assert!(!m.epsilon_bounded(&huge, 0.25, 1.0).unwrap());
    }

    #[test]
    fn p_nearby_examples() {
        let m = GibbsModel::make_random_model(3, 5, 0.6).unwrap();
        assert!(m.p_nearby(m.rho0(), 0.3, 1.5).unwrap());

        // pure state fails the faithful lower bound
        let mut pure = HermitianMatrix::zeros(3);
        pure = &pure + &HermitianMatrix::from_diag(&[1.0, 0.0, 0.0]);
        assert!(!m.p_nearby(&pure, 0.3, 1.5).unwrap());

        // diagonal hand case
        let m = GibbsModel::make_custom(HermitianMatrix::from_diag(&[
            (4.0f64 / 3.0).ln(),
            4.0f64.ln(),
        ]))
        .unwrap();
        let sigma = HermitianMatrix::from_diag(&[0.5, 0.5]);
        let p = 0.5;
        let c = 2.0;
        let expect = [0.75f64, 0.25]
            .iter()
            .zip([0.5f64, 0.5])
            .all(|(&r, s)| r.powf(1.0 + p) / c <= s + 1e-12 && s <= c * r.powf(1.0 - p) + 1e-12);
        assert_eq!(m.p_nearby(&sigma, p, c).unwrap(), expect);
    }

    #[test]
    fn golden_thompson_trace_chain() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let m = GibbsModel::make_random_model(4, rng.gen(), 0.5).unwrap();
            let x = crate::linalg::random_hermitian(4, &mut rng, 0.3);
            let tr_unnorm: f64 = eigh(&-&(m.h0() + &x))
                .unwrap()
                .eigenvalues
                .iter()
                .map(|&l| l.exp())
                .sum();
            for &beta in &[0.5, 0.9] {
                let tr_beta: f64 = m
                    .h0_eigs()
                    .eigenvalues
                    .iter()
                    .map(|&l| (-beta * l).exp())
                    .sum();
                let tail = &m.h0().scale(1.0 - beta) + &x;
                let op: f64 = eigh(&-&tail)
                    .unwrap()
                    .eigenvalues
                    .iter()
                    .fold(f64::NEG_INFINITY, |mx, &l| mx.max(l))
                    .exp();
                assert!(tr_unnorm <= tr_beta * op + 1e-10);
            }
        }
    }

    #[test]
    fn model_file_round_trip() {
        let m = GibbsModel::make_random_model(4, 9, 0.8).unwrap();
        let json = m.to_json();
        let back = GibbsModel::from_json(&json).unwrap();
        assert_eq!(m.h0().entries(), back.h0().entries());
        assert_eq!(m.family(), back.family());
        assert_eq!(m.beta_profile(), back.beta_profile());
        assert_eq!(json, back.to_json());
    }
}

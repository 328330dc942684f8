//! Dressed one-excitation spectrum.
//!
//! In the (beta_1, beta_2, atom) basis the one-excitation matrix is the
//! arrowhead `[[e1, 0, G1], [0, e2, G2], [G1*, G2*, w_a]]`. Its eigenvalues
//! are the zeros of
//!
//! ```text
//! D1(x)  = x - w_a - sum_j |G_j|^2 / (x - e_j)
//! Phi(x) = (x - e1)(x - e2) D1(x)
//!        = (x - e1)(x - e2)(x - w_a) - |G1|^2 (x - e2) - |G2|^2 (x - e1)
//! ```
//!
//! and column j of the unitary `V` is `N_j (G1/(E_j - e1), G2/(E_j - e2), 1)`
//! with `N_j = D1'(E_j)^(-1/2)`.
//!
//! Eigenvalues are taken from the Hermitian eigensolver; `Phi` only validates
//! them.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::bogoliubov2::{two_mode_spectrum, TwoModeSpectrum};
use crate::model::{gamma_zero_threshold, one_excitation_matrix, ModelParams};
use crate::oracle::dense_hermitian_eig;
use crate::{Error, Result, C64};

/// `D1`, `Phi` and their derivatives for one parameter set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralFunctions {
    pub omega_a: f64,
    /// Pole positions.
    pub eps: [f64; 2],
    /// `|Gamma_j|^2`.
    pub gamma_sq: [f64; 2],
}

impl SpectralFunctions {
    /// With `kappa = 0` the bare photon and phonon take the place of the
    /// quasi-bosons: `e = (w_b, w_c)`, `Gamma = (lambda, xi)`.
    pub fn new(params: &ModelParams) -> Result<Self> {
        if params.kappa.norm_sqr() == 0.0 {
            return Ok(Self {
                omega_a: params.omega_a,
                eps: [params.omega_b, params.omega_c],
                gamma_sq: [params.lambda.norm_sqr(), params.xi.norm_sqr()],
            });
        }
        Ok(Self::from_two_mode(params.omega_a, &two_mode_spectrum(params)?))
    }

    pub fn from_two_mode(omega_a: f64, two: &TwoModeSpectrum) -> Self {
        Self { omega_a, eps: two.eps, gamma_sq: [two.gamma[0].norm_sqr(), two.gamma[1].norm_sqr()] }
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        let guard = 1e-12 * x.abs().max(1.0);
        let mut acc = x - self.omega_a;
        for j in 0..2 {
            let dx = x - self.eps[j];
            if dx.abs() <= guard {
                return Err(Error::PoleHit { x, pole: self.eps[j] });
            }
            acc -= self.gamma_sq[j] / dx;
        }
        Ok(acc)
    }

    /// `1 + sum_j |G_j|^2/(x - e_j)^2`; no pole guard.
    pub fn d1_prime(&self, x: f64) -> f64 {
        1.0 + (0..2).map(|j| self.gamma_sq[j] / (x - self.eps[j]).powi(2)).sum::<f64>()
    }

    pub fn phi(&self, x: f64) -> f64 {
        let [e1, e2] = self.eps;
        let [g1, g2] = self.gamma_sq;
        (x - e1) * (x - e2) * (x - self.omega_a) - g1 * (x - e2) - g2 * (x - e1)
    }

    pub fn phi_prime(&self, x: f64) -> f64 {
        let [e1, e2] = self.eps;
        let [g1, g2] = self.gamma_sq;
        let wa = self.omega_a;
        (x - e2) * (x - wa) + (x - e1) * (x - wa) + (x - e1) * (x - e2) - g1 - g2
    }

    /// `|Phi(x)| / max(1, |x|^3)`.
    pub fn scaled_phi_residual(&self, x: f64) -> f64 {
        self.phi(x).abs() / x.abs().powi(3).max(1.0)
    }
}

/// `D1(x)` for `params`.
pub fn d1(params: &ModelParams, x: f64) -> Result<f64> {
    SpectralFunctions::new(params)?.d1(x)
}

/// `Phi(x)` for `params`, polynomial form.
pub fn phi(params: &ModelParams, x: f64) -> Result<f64> {
    Ok(SpectralFunctions::new(params)?.phi(x))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeModeSpectrum {
    /// `E_1 < E_2 < E_3`.
    pub e: [f64; 3],
    /// `N_j = D1'(E_j)^(-1/2)`.
    pub n_norm: [f64; 3],
    /// Rows (beta_1, beta_2, atom); column j is the dressed mode `A_j`.
    pub v: Matrix3<C64>,
    pub two: TwoModeSpectrum,
}

impl ThreeModeSpectrum {
    /// `E_1 < e_1 < E_2 < e_2 < E_3`.
    pub fn interlaced(&self) -> bool {
        let [e1, e2] = self.two.eps;
        let [a, b, c] = self.e;
        a < e1 && e1 < b && b < e2 && e2 < c
    }
}

/// Arrowhead form of the one-excitation matrix in the (beta_1, beta_2, atom) basis.
pub fn beta_basis_matrix(two: &TwoModeSpectrum, omega_a: f64) -> Matrix3<C64> {
    let z = C64::new(0.0, 0.0);
    let [g1, g2] = two.gamma;
    Matrix3::new(
        C64::new(two.eps[0], 0.0), z, g1,
        z, C64::new(two.eps[1], 0.0), g2,
        g1.conj(), g2.conj(), C64::new(omega_a, 0.0),
    )
}

/// Maps (beta_1, beta_2, atom) amplitudes to (atom, photon, phonon) amplitudes.
pub fn beta_to_bare(two: &TwoModeSpectrum) -> Matrix3<C64> {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let u = &two.u;
    Matrix3::new(
        z, z, one,
        u[(0, 0)], u[(0, 1)], z,
        u[(1, 0)], u[(1, 1)], z,
    )
}

/// Degeneracy threshold relative to `||H||`.
const DEGENERACY_TOL: f64 = 1e-10;
/// Root residual threshold on `|Phi(E)| / max(1, |E|^3)`.
pub const ROOT_TOL: f64 = 1e-10;
/// Max deviation between closed-form and solver eigenvectors after phase matching.
const VECTOR_MATCH_TOL: f64 = 1e-8;

pub fn three_mode_spectrum(params: &ModelParams) -> Result<ThreeModeSpectrum> {
    params.check()?;
    let two = two_mode_spectrum(params)?;
    let threshold = gamma_zero_threshold(params);
    if two.gamma.iter().any(|g| g.norm() <= threshold) {
        return Err(Error::GammaZero);
    }

    let h = one_excitation_matrix(params);
    let eig = dense_hermitian_eig(&h.entries)?;
    let e = [eig.values[0], eig.values[1], eig.values[2]];

    let h_norm = h.norm();
    let gap = (e[1] - e[0]).min(e[2] - e[1]);
    if gap < DEGENERACY_TOL * h_norm {
        return Err(Error::DegenerateSpectrum { gap });
    }

    let funcs = SpectralFunctions::from_two_mode(params.omega_a, &two);
    for &ej in &e {
        let r = funcs.scaled_phi_residual(ej);
        if !(r < ROOT_TOL) {
            return Err(Error::Numerical(format!("E = {ej} is not a root of Phi (residual {r:e})")));
        }
    }

    let n_norm = e.map(|ej| funcs.d1_prime(ej).powf(-0.5));
    let v = Matrix3::from_fn(|row, j| match row {
        2 => C64::new(n_norm[j], 0.0),
        nu => two.gamma[nu] * (n_norm[j] / (e[j] - two.eps[nu])),
    });

    // solver eigenvectors, moved into the beta basis, must match V column by column
    let to_beta = beta_to_bare(&two).adjoint();
    for j in 0..3 {
        let bare = nalgebra::Vector3::from_fn(|i, _| eig.vectors[(i, j)]);
        let w = to_beta * bare;
        let col = v.column(j);
        let overlap: C64 = w.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
        let phase = overlap / overlap.norm();
        let dev = w.iter().zip(col.iter()).map(|(a, b)| (a * phase - b).norm()).fold(0.0, f64::max);
        if !(dev < VECTOR_MATCH_TOL) {
            return Err(Error::Numerical(format!(
                "closed-form eigenvector {j} deviates from the solver by {dev:e}"
            )));
        }
    }

    Ok(ThreeModeSpectrum { e, n_norm, v, two })
}

/// Stationary points `F_-` and `F_+` of `Phi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicShape {
    pub f_minus: f64,
    pub f_plus: f64,
    pub w: f64,
}

pub fn cubic_stationary(params: &ModelParams) -> CubicShape {
    let (wa, wb, wc) = (params.omega_a, params.omega_b, params.omega_c);
    // U is unitary, so |G1|^2 + |G2|^2 = |lambda|^2 + |xi|^2 even where U is undefined
    let gamma_sq = match SpectralFunctions::new(params) {
        Ok(f) => f.gamma_sq[0] + f.gamma_sq[1],
        Err(_) => params.lambda.norm_sqr() + params.xi.norm_sqr(),
    };
    let w = 0.5 * ((wa - wb).powi(2) + (wb - wc).powi(2) + (wc - wa).powi(2))
        + 3.0 * (params.kappa.norm_sqr() + gamma_sq);
    let sum = wa + wb + wc;
    CubicShape { f_minus: (sum - w.sqrt()) / 3.0, f_plus: (sum + w.sqrt()) / 3.0, w }
}

#[cfg(test)]
mod tests {
    use super::*;

    // dense 3x3 eigensolve of [[1,.2,.05],[.2,1,.1],[.05,.1,1]] (LAPACK zheevd)
    const FIXTURE_E: [f64; 3] = [0.7930295020247187, 0.960753298374269, 1.2462171996010125];

    fn fixture() -> ModelParams {
        ModelParams::real(1.0, 1.0, 1.0, 0.2, 0.05, 0.1).unwrap()
    }

    fn dark_fixture() -> ModelParams {
        ModelParams::real(1.0, 1.0, 1.0, 0.2, 0.05, 0.2).unwrap()
    }

    #[test]
    fn d1_resonant_without_xi() {
        let (d, wa) = (1.0, 1.3);
        let p = ModelParams::real(wa, d, d, 0.2, 0.0, 0.15).unwrap();
        assert!((d1(&p, d).unwrap() - (d - wa)).abs() < 1e-14);
    }

    #[test]
    fn d1_decoupled() {
        let p = ModelParams::real(1.2, 1.0, 1.5, 0.0, 0.0, 0.3).unwrap();
        for x in [-1.0, 0.3, 2.0, 7.5] {
            assert!((d1(&p, x).unwrap() - (x - 1.2)).abs() < 1e-15);
        }
    }

    #[test]
    fn d1_near_zero_at_top_eigenvalue() {
        assert!(d1(&fixture(), 1.2462).unwrap().abs() < 1e-3);
        assert!(d1(&fixture(), FIXTURE_E[2]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn d1_pole_hit() {
        let err = d1(&fixture(), 0.9).unwrap_err();
        assert!(matches!(err, Error::PoleHit { .. }));
    }

    #[test]
    fn phi_values() {
        let (w, wa, k) = (1.0, 1.4, 0.3);
        let p = ModelParams::real(wa, w, w, 0.0, 0.2, k).unwrap();
        assert!((phi(&p, w).unwrap() + k * k * (w - wa)).abs() < 1e-15);

        let f = SpectralFunctions::new(&fixture()).unwrap();
        let [e1, e2] = f.eps;
        assert!((f.phi(e1) - f.gamma_sq[0] * (e2 - e1)).abs() < 1e-15);
        assert!((f.phi(e2) + f.gamma_sq[1] * (e2 - e1)).abs() < 1e-15);
        assert!(f.phi(e1) > 0.0 && f.phi(e2) < 0.0);
        for x in [0.3, 0.95, 1.05, 1.7] {
            let cleared = (x - e1) * (x - e2) * f.d1(x).unwrap();
            assert!((f.phi(x) - cleared).abs() < 1e-12 * f.phi(x).abs().max(1e-300) + 1e-16);
        }
    }

    #[test]
    fn fixture_spectrum_interlaces() {
        let s = three_mode_spectrum(&fixture()).unwrap();
        for (j, (e, want)) in s.e.iter().zip(FIXTURE_E).enumerate() {
            assert!((e - want).abs() < 1e-13, "E_{j}");
        }
        assert!(s.interlaced());
        assert!(s.e[0] > 0.0);
    }

    #[test]
    fn dark_fixture_has_exact_eigenvalue() {
        let s = three_mode_spectrum(&dark_fixture()).unwrap();
        assert!(s.e.iter().any(|e| (e - 0.95).abs() < 1e-12));
    }

    #[test]
    fn decoupled_atom_is_gamma_zero() {
        let p = ModelParams::real(1.0, 1.0, 1.0, 0.0, 0.0, 0.1).unwrap();
        assert_eq!(three_mode_spectrum(&p), Err(Error::GammaZero));
    }

    #[test]
    fn unitary_and_diagonalizing() {
        let p = ModelParams::new(0.9, 1.1, 1.35, C64::new(0.12, -0.07), C64::new(0.05, 0.2), C64::new(-0.1, 0.15)).unwrap();
        let s = three_mode_spectrum(&p).unwrap();
        let vv = s.v.adjoint() * s.v - Matrix3::identity();
        assert!(vv.iter().all(|z| z.norm() < 1e-12));
        let hb = beta_basis_matrix(&s.two, p.omega_a);
        let d = s.v.adjoint() * hb * s.v;
        let scale = p.one_excitation_norm();
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { s.e[i] } else { 0.0 };
                assert!((d[(i, j)] - target).norm() < 1e-11 * scale);
            }
        }
        // arrowhead form is the bare matrix in the beta basis
        let w = beta_to_bare(&s.two);
        let rotated = w.adjoint() * crate::model::one_excitation_matrix3(&p) * w;
        assert!((rotated - hb).iter().all(|z| z.norm() < 1e-14));
        let trace: f64 = s.e.iter().sum();
        assert!((trace - (p.omega_a + p.omega_b + p.omega_c)).abs() < 1e-12 * trace);
    }

    #[test]
    fn cubic_shape_examples() {
        let p = ModelParams::real(1.0, 1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let c = cubic_stationary(&p);
        assert_eq!(c.w, 0.0);
        assert!((c.f_minus - 1.0).abs() < 1e-15 && (c.f_plus - 1.0).abs() < 1e-15);

        let c = cubic_stationary(&fixture());
        assert!((c.w - 0.1575).abs() < 1e-15);
        let half_width = 0.1575f64.sqrt() / 3.0;
        assert!((c.f_minus - (1.0 - half_width)).abs() < 1e-15);
        assert!((c.f_plus - (1.0 + half_width)).abs() < 1e-15);
        assert!((half_width - 0.13229).abs() < 1e-5);
        let f = SpectralFunctions::new(&fixture()).unwrap();
        assert!(f.phi_prime(c.f_minus).abs() < 1e-14);
        assert!(f.phi_prime(c.f_plus).abs() < 1e-14);
    }
}

//! Photon/phonon normal modes.
//!
//! The photon-phonon part `w_b b'b + w_c c'c + (k* b'c + k c'b)` has the
//! single-particle matrix `[[w_b, k*], [k, w_c]]` in the (b, c) basis. Its
//! eigenvalues are the quasi-boson energies `eps_j`, its eigenvectors are the
//! columns of `U`, with `u_1j = M_j` and `u_2j = M_j (eps_j - w_b) / k*`.
//! Writing the atom couplings through the quasi-bosons gives the effective
//! couplings `Gamma_j = M_j (lambda + xi (eps_j - w_b) / kappa)`.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeSpectrum {
    /// Quasi-boson energies, ascending.
    pub eps: [f64; 2],
    /// `eps_j - omega_b`, evaluated without cancellation.
    pub shift_b: [f64; 2],
    /// `eps_j - omega_c`, evaluated without cancellation.
    pub shift_c: [f64; 2],
    /// Photon weights `M_j = u_1j`.
    pub m: [f64; 2],
    /// Effective atom couplings to each quasi-boson.
    pub gamma: [C64; 2],
    /// Column j holds quasi-boson j in the (b, c) basis.
    pub u: Matrix2<C64>,
}

/// `[[w_b, k*], [k, w_c]]`.
pub fn h_rwa_matrix(params: &ModelParams) -> Matrix2<C64> {
    Matrix2::new(
        C64::new(params.omega_b, 0.0),
        params.kappa.conj(),
        params.kappa,
        C64::new(params.omega_c, 0.0),
    )
}

pub fn two_mode_spectrum(params: &ModelParams) -> Result<TwoModeSpectrum> {
    let (wb, wc) = (params.omega_b, params.omega_c);
    let k = params.kappa;
    let k2 = k.norm_sqr();
    let delta = wb - wc;
    let root = (delta * delta + 4.0 * k2).sqrt();

    if root < 1e-12 * (wb + wc) {
        return Err(Error::DegenerateTwoMode);
    }

    let eps = [0.5 * (wb + wc - root), 0.5 * (wb + wc + root)];

    if k2 == 0.0 {
        return Ok(uncoupled(params, eps));
    }

    // eps_1 - w_b = -(delta + root)/2 and eps_2 - w_c = (delta + root)/2 cancel
    // when delta < 0; their partners then come from (eps_1 - w)(eps_2 - w) = -|k|^2.
    let (shift_b, shift_c) = if delta >= 0.0 {
        let s = 0.5 * (delta + root);
        ([-s, k2 / s], [-k2 / s, s])
    } else {
        let s = 0.5 * (root - delta);
        ([-k2 / s, s], [-s, k2 / s])
    };

    let m = [0, 1].map(|j| (1.0 + shift_b[j] / shift_c[j]).powf(-0.5));
    let gamma = [0, 1].map(|j| m[j] * (params.lambda + params.xi * shift_b[j] / k));
    let u = Matrix2::new(
        C64::new(m[0], 0.0),
        C64::new(m[1], 0.0),
        m[0] * shift_b[0] / k.conj(),
        m[1] * shift_b[1] / k.conj(),
    );
    Ok(TwoModeSpectrum { eps, shift_b, shift_c, m, gamma, u })
}

/// `kappa = 0`, `omega_b != omega_c`: the quasi-bosons are the bare modes.
fn uncoupled(params: &ModelParams, eps: [f64; 2]) -> TwoModeSpectrum {
    let (wb, wc) = (params.omega_b, params.omega_c);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let u = if wb < wc {
        Matrix2::new(one, zero, zero, one)
    } else {
        Matrix2::new(zero, one, one, zero)
    };
    let gamma = [0, 1].map(|j| u[(0, j)].conj() * params.lambda + u[(1, j)].conj() * params.xi);
    TwoModeSpectrum {
        eps,
        shift_b: eps.map(|e| e - wb),
        shift_c: eps.map(|e| e - wc),
        m: [u[(0, 0)].re, u[(0, 1)].re],
        gamma,
        u,
    }
}

/// How the bare photon/phonon operators and the quasi-bosons expand in each
/// other: `(b, c)^T = forward (beta_1, beta_2)^T` and
/// `(beta_1, beta_2)^T = inverse (b, c)^T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeMixing {
    #[serde(with = "mat2_serde")]
    pub forward: Matrix2<C64>,
    #[serde(with = "mat2_serde")]
    pub inverse: Matrix2<C64>,
}

impl ModeMixing {
    /// `max |forward * inverse - I|`.
    pub fn roundtrip_error(&self) -> f64 {
        (self.forward * self.inverse - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn mode_mixing(spec: &TwoModeSpectrum) -> ModeMixing {
    ModeMixing { forward: spec.u, inverse: spec.u.adjoint() }
}

/// `|(eps_j - w_b)/k* - k/(eps_j - w_c)|` per mode.
pub fn ratio_identity_residuals(params: &ModelParams, spec: &TwoModeSpectrum) -> [f64; 2] {
    let k = params.kappa;
    [0, 1].map(|j| (spec.shift_b[j] / k.conj() - k / spec.shift_c[j]).norm())
}

/// Relative residuals of `(eps_1 - w)(eps_2 - w) = -|k|^2` for `w = w_b, w_c`.
pub fn product_identity_residuals(params: &ModelParams, spec: &TwoModeSpectrum) -> [f64; 2] {
    let k2 = params.kappa.norm_sqr();
    [spec.shift_b, spec.shift_c].map(|s| (s[0] * s[1] + k2).abs() / k2)
}

mod mat2_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix2<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: [[[f64; 2]; 2]; 2] =
            [0, 1].map(|i| [0, 1].map(|j| [m[(i, j)].re, m[(i, j)].im]));
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Matrix2<C64>, D::Error> {
        let rows = <[[[f64; 2]; 2]; 2]>::deserialize(d)?;
        Ok(Matrix2::from_fn(|i, j| C64::new(rows[i][j][0], rows[i][j][1])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn real(wb: f64, wc: f64, lambda: f64, xi: f64, kappa: f64) -> ModelParams {
        ModelParams::real(1.0, wb, wc, lambda, xi, kappa).unwrap()
    }

    fn max_abs<I: IntoIterator<Item = C64>>(it: I) -> f64 {
        it.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn resonant_mixing() {
        let s = two_mode_spectrum(&real(1.0, 1.0, 0.0, 0.0, 0.1)).unwrap();
        assert!((s.eps[0] - 0.9).abs() < 1e-15 && (s.eps[1] - 1.1).abs() < 1e-15);
        assert!((s.m[0] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.m[1] - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn detuned_mixing() {
        // 2x2 eigensolve oracle: eps = (3 -+ sqrt 2)/2
        let s = two_mode_spectrum(&real(1.0, 2.0, 0.0, 0.0, 0.5)).unwrap();
        assert!((s.eps[0] - 0.7928932188134524).abs() < 1e-15);
        assert!((s.eps[1] - 2.2071067811865475).abs() < 1e-15);
        assert!((s.m[0] - 0.9238795325112867).abs() < 1e-15);
        assert!((s.m[1] - 0.3826834323650897).abs() < 1e-15);
        assert!((s.m[0].powi(2) + s.m[1].powi(2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn resonant_gamma_matches_closed_form() {
        let (l, x) = (0.2, 0.05);
        let s = two_mode_spectrum(&real(1.0, 1.0, l, x, 0.1)).unwrap();
        assert!((s.gamma[0].re - (l - x) * FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.gamma[1].re - (l + x) * FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.gamma[0].re - 0.10606601717798213).abs() < 1e-15);
        assert!((s.gamma[1].re - 0.17677669529663687).abs() < 1e-15);
    }

    #[test]
    fn degenerate_is_rejected() {
        assert_eq!(two_mode_spectrum(&real(1.0, 1.0, 0.1, 0.1, 0.0)), Err(Error::DegenerateTwoMode));
    }

    #[test]
    fn uncoupled_modes_are_bare() {
        let s = two_mode_spectrum(&real(2.0, 1.0, 0.3, 0.1, 0.0)).unwrap();
        assert_eq!(s.eps, [1.0, 2.0]);
        // lowest quasi-boson is the phonon
        assert_eq!(s.gamma, [C64::new(0.1, 0.0), C64::new(0.3, 0.0)]);
        assert!(max_abs((s.u.adjoint() * s.u - Matrix2::identity()).iter().copied()) == 0.0);
    }

    #[test]
    fn resonant_photon_is_even_superposition() {
        let s = two_mode_spectrum(&real(1.0, 1.0, 0.0, 0.0, 0.3)).unwrap();
        let mix = mode_mixing(&s);
        assert!((mix.forward[(0, 0)].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((mix.forward[(0, 1)].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(mix.roundtrip_error() < 1e-14);
    }

    #[test]
    fn complex_kappa_identities() {
        let p = ModelParams::new(1.0, 0.7, 1.4, C64::new(0.1, 0.2), C64::new(0.3, -0.1), C64::new(0.2, -0.35)).unwrap();
        let s = two_mode_spectrum(&p).unwrap();
        assert!(ratio_identity_residuals(&p, &s).iter().all(|r| *r < 1e-13));
        assert!(product_identity_residuals(&p, &s).iter().all(|r| *r < 1e-12));
        let h = h_rwa_matrix(&p);
        let d = s.u.adjoint() * h * s.u;
        let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!((d[(0, 0)].re - s.eps[0]).abs() < 1e-12 * scale);
        assert!((d[(1, 1)].re - s.eps[1]).abs() < 1e-12 * scale);
        assert!(d[(0, 1)].norm() < 1e-12 * scale);
        assert!(mode_mixing(&s).roundtrip_error() < 1e-14);
    }

    #[test]
    fn mixing_serializes_as_pairs() {
        let s = two_mode_spectrum(&real(1.0, 2.0, 0.0, 0.0, 0.5)).unwrap();
        let mix = mode_mixing(&s);
        let json = serde_json::to_string(&mix).unwrap();
        let back: ModeMixing = serde_json::from_str(&json).unwrap();
        assert_eq!(back, mix);
    }
}

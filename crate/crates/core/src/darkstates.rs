//! Dark (no photon) and quasi-dark (no phonon) eigenstates.
//!
//! In the resonant regime `w_b = w_c = w`, `kappa > 0`, real `lambda`, `xi`,
//! the helper functions
//!
//! ```text
//! E(x, y) = w - kappa y / x
//! f(x, y) = (kappa / x - x / kappa) y
//! ```
//!
//! locate them: `f(lambda, xi) = w - w_a` makes `E(lambda, xi)` an eigenvalue
//! with eigenstate `(kappa, 0, -lambda)` (dark), and `f(xi, lambda) = w - w_a`
//! makes `E(xi, lambda)` an eigenvalue with eigenstate `(kappa, -xi, 0)`
//! (quasi-dark). Swapping `lambda` and `xi` exchanges the two.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bogoliubov2::two_mode_spectrum;
use crate::bogoliubov3::SpectralFunctions;
use crate::model::{
    gamma_zero_threshold, one_excitation_matrix, sector_basis, AtomKind, ModelParams, Occupation,
    SectorMatrix,
};
use crate::oracle::{dense_hermitian_eig, fix_phase};
use crate::{Error, Result, C64};

/// Classification threshold relative to the state norm.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;
/// Tuning-condition threshold, scaled by `max(1, |w - w_a|)`.
pub const DEFAULT_TUNING_TOL: f64 = 1e-9;
/// Resonance threshold on `|w_b - w_c| / max(w_b, w_c)`.
pub const RESONANCE_TOL: f64 = 1e-12;

/// Amplitudes over the basis of one excitation sector. For `ell = 1` the
/// order is (atom, photon, phonon); otherwise it follows
/// [`sector_basis`](crate::model::sector_basis).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorVector {
    pub ell: usize,
    pub amps: Vec<C64>,
}

impl SectorVector {
    pub fn new(ell: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.iter().all(|z| z.norm_sqr() == 0.0) {
            return Err(Error::InvalidParams("state vector is identically zero".into()));
        }
        Ok(Self { ell, amps })
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { ell: self.ell, amps: self.amps.iter().map(|z| z / n).collect() }
    }

    /// `||(H - E) psi|| / ||psi||`.
    pub fn residual(&self, matrix: &DMatrix<C64>, energy: f64) -> f64 {
        let psi = nalgebra::DVector::from_column_slice(&self.amps);
        (matrix * &psi - &psi * C64::new(energy, 0.0)).norm() / psi.norm()
    }

    /// [`residual`](Self::residual) against a sector matrix.
    pub fn sector_residual(&self, sector: &SectorMatrix, energy: f64) -> f64 {
        self.residual(&sector.entries, energy)
    }
}

/// `||(H - E) psi|| / ||psi||` in the one-excitation sector.
pub fn one_excitation_residual(params: &ModelParams, state: &SectorVector, energy: f64) -> f64 {
    state.residual(&one_excitation_matrix(params).entries, energy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassVariant {
    /// No photon component.
    Dark,
    /// No phonon component.
    QuasiDark,
    /// Both components present.
    Bright,
    /// Neither component present.
    Degenerate,
}

impl ClassVariant {
    /// Dark, quasi-dark, or both.
    pub fn is_dark_like(self) -> bool {
        !matches!(self, ClassVariant::Bright)
    }
}

impl std::fmt::Display for ClassVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClassVariant::Dark => "dark",
            ClassVariant::QuasiDark => "quasi-dark",
            ClassVariant::Bright => "bright",
            ClassVariant::Degenerate => "degenerate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub variant: ClassVariant,
    /// Norm of the photon-occupied part of the state.
    pub photon_amp: f64,
    /// Norm of the phonon-occupied part of the state.
    pub phonon_amp: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenstateRecord {
    pub energy: f64,
    pub state: SectorVector,
    pub class: Classification,
}

impl EigenstateRecord {
    pub fn residual(&self, params: &ModelParams) -> f64 {
        one_excitation_residual(params, &self.state, self.energy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TuningKind {
    Dark,
    QuasiDark,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub kind: TuningKind,
    /// `E(lambda, xi)` (dark branch) or `E(xi, lambda)` (quasi-dark branch);
    /// `None` when the branch's coupling is zero.
    pub energy: Option<f64>,
    /// `|f(.,.) - (w - w_a)|`.
    pub residual: Option<f64>,
}

pub fn e_of(x: f64, y: f64, omega: f64, kappa: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::DivideByZero);
    }
    Ok(omega - kappa * y / x)
}

pub fn f_of(x: f64, y: f64, kappa: f64) -> Result<f64> {
    if x == 0.0 || kappa == 0.0 {
        return Err(Error::DivideByZero);
    }
    Ok((kappa / x - x / kappa) * y)
}

/// Real parameters of the resonant regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonantReal {
    pub omega_a: f64,
    pub omega: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub xi: f64,
}

/// Checks `w_b = w_c`, real couplings and `kappa > 0`.
pub fn resonant_real(params: &ModelParams) -> Result<ResonantReal> {
    resonant_real_with(params, RESONANCE_TOL)
}

pub fn resonant_real_with(params: &ModelParams, tol: f64) -> Result<ResonantReal> {
    let (wb, wc) = (params.omega_b, params.omega_c);
    if (wb - wc).abs() > tol * wb.max(wc) {
        return Err(Error::NotResonant);
    }
    if params.lambda.im != 0.0 || params.xi.im != 0.0 || params.kappa.im != 0.0 {
        return Err(Error::ComplexCouplings);
    }
    if !(params.kappa.re > 0.0) {
        return Err(Error::AssumptionViolation("kappa must be positive".into()));
    }
    Ok(ResonantReal {
        omega_a: params.omega_a,
        omega: wb,
        kappa: params.kappa.re,
        lambda: params.lambda.re,
        xi: params.xi.re,
    })
}

/// Evaluates both tuning conditions. Returns (dark branch, quasi-dark branch).
pub fn dark_tuning(params: &ModelParams, tol: f64) -> Result<(TuningResult, TuningResult)> {
    let r = resonant_real_with(params, tol.max(RESONANCE_TOL))?;
    if r.lambda == r.xi || r.lambda == -r.xi {
        return Err(Error::AssumptionViolation(
            "lambda = +-xi makes an effective coupling vanish".into(),
        ));
    }
    let target = r.omega - r.omega_a;
    let threshold = tol * target.abs().max(1.0);

    let branch = |x: f64, y: f64, kind: TuningKind| -> TuningResult {
        if x == 0.0 {
            return TuningResult { kind: TuningKind::None, energy: None, residual: None };
        }
        let f = (r.kappa / x - x / r.kappa) * y;
        let residual = (f - target).abs();
        let energy = r.omega - r.kappa * y / x;
        TuningResult {
            kind: if residual < threshold { kind } else { TuningKind::None },
            energy: Some(energy),
            residual: Some(residual),
        }
    };
    Ok((
        branch(r.lambda, r.xi, TuningKind::Dark),
        branch(r.xi, r.lambda, TuningKind::QuasiDark),
    ))
}

/// Pole guard used by [`assemble_eigenstate`].
const POLE_GUARD: f64 = 1e-10;
/// Eigen-residual threshold relative to `||H||`.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;

/// Unnormalized one-excitation eigenstate with atom amplitude 1:
/// `(1, sum_nu u_1nu G_nu/(E - e_nu), sum_nu u_2nu G_nu/(E - e_nu))`.
/// With `kappa = 0` this is `(1, lambda/(E - w_b), xi/(E - w_c))`.
pub fn assemble_eigenstate(params: &ModelParams, energy: f64) -> Result<SectorVector> {
    let one = C64::new(1.0, 0.0);
    let amps = if params.kappa.norm_sqr() == 0.0 {
        for pole in [params.omega_b, params.omega_c] {
            if (energy - pole).abs() <= POLE_GUARD {
                return Err(Error::PoleHit { x: energy, pole });
            }
        }
        vec![one, params.lambda / (energy - params.omega_b), params.xi / (energy - params.omega_c)]
    } else {
        let two = two_mode_spectrum(params)?;
        for pole in two.eps {
            if (energy - pole).abs() <= POLE_GUARD {
                return Err(Error::PoleHit { x: energy, pole });
            }
        }
        let w = [0, 1].map(|nu| two.gamma[nu] / (energy - two.eps[nu]));
        vec![
            one,
            two.u[(0, 0)] * w[0] + two.u[(0, 1)] * w[1],
            two.u[(1, 0)] * w[0] + two.u[(1, 1)] * w[1],
        ]
    };
    let state = SectorVector { ell: 1, amps };
    let residual = one_excitation_residual(params, &state, energy);
    if !(residual < EIGEN_RESIDUAL_TOL * params.one_excitation_norm()) {
        return Err(Error::NotAnEigenvalue { energy, residual });
    }
    Ok(state)
}

/// Dark / quasi-dark classification of a one-excitation state.
pub fn classify(state: &SectorVector, tol: f64) -> Result<Classification> {
    if state.ell != 1 || state.amps.len() != 3 {
        return Err(Error::WrongSector { ell: state.ell });
    }
    Ok(classify_weights(state.amps[1].norm(), state.amps[2].norm(), state.norm(), tol))
}

/// Classification of a state in any sector by its photon-occupied and
/// phonon-occupied weight.
pub fn classify_in_sector(state: &SectorVector, basis: &[Occupation], tol: f64) -> Result<Classification> {
    if basis.len() != state.amps.len() {
        return Err(Error::WrongSector { ell: state.ell });
    }
    let weight = |pick: fn(&Occupation) -> bool| {
        basis.iter().zip(&state.amps).filter(|(o, _)| pick(o)).map(|(_, z)| z.norm_sqr()).sum::<f64>().sqrt()
    };
    Ok(classify_weights(weight(|o| o.photon > 0), weight(|o| o.phonon > 0), state.norm(), tol))
}

fn classify_weights(photon_amp: f64, phonon_amp: f64, norm: f64, tol: f64) -> Classification {
    let no_photon = photon_amp < tol * norm;
    let no_phonon = phonon_amp < tol * norm;
    let variant = match (no_photon, no_phonon) {
        (true, true) => ClassVariant::Degenerate,
        (true, false) => ClassVariant::Dark,
        (false, true) => ClassVariant::QuasiDark,
        (false, false) => ClassVariant::Bright,
    };
    Classification { variant, photon_amp, phonon_amp }
}

/// Exchanges `lambda` and `xi`.
pub fn duality_swap(params: &ModelParams) -> ModelParams {
    ModelParams { lambda: params.xi, xi: params.lambda, ..*params }
}

/// Normalizes and fixes the phase so the atom amplitude is real positive, or,
/// with no atom component, the largest amplitude.
fn phase_fixed(mut amps: Vec<C64>) -> Vec<C64> {
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in amps.iter_mut() {
        *z /= norm;
    }
    let atom = amps[0];
    if atom.norm() > 1e-12 {
        let phase = atom.conj() / atom.norm();
        for z in amps.iter_mut() {
            *z *= phase;
        }
        amps[0] = C64::new(amps[0].norm(), 0.0);
    } else {
        fix_phase(&mut amps);
    }
    amps
}

/// One-excitation eigenstates from the dense eigensolver, normalized,
/// phase-fixed and classified. Ascending in energy.
pub fn eigenstates(params: &ModelParams, tol: f64) -> Result<Vec<EigenstateRecord>> {
    let h = one_excitation_matrix(params);
    let eig = dense_hermitian_eig(&h.entries)?;
    (0..3)
        .map(|j| {
            let amps = phase_fixed(eig.vectors.column(j).iter().copied().collect());
            let state = SectorVector { ell: 1, amps };
            let class = classify(&state, tol)?;
            Ok(EigenstateRecord { energy: eig.values[j], state, class })
        })
        .collect()
}

/// Eigenstates of one excitation sector, classified by photon/phonon weight.
pub fn sector_eigenstates(
    params: &ModelParams,
    kind: AtomKind,
    ell: usize,
    tol: f64,
) -> Result<Vec<(f64, SectorVector, Classification)>> {
    let sm = crate::model::sector_matrix(params, kind, ell)?;
    let eig = dense_hermitian_eig(&sm.entries)?;
    (0..sm.dim())
        .map(|j| {
            let mut amps: Vec<C64> = eig.vectors.column(j).iter().copied().collect();
            fix_phase(&mut amps);
            let state = SectorVector { ell, amps };
            let class = classify_in_sector(&state, &sm.basis, tol)?;
            Ok((eig.values[j], state, class))
        })
        .collect()
}

/// Which tuned state to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Dark,
    QuasiDark,
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(kappa a' - lambda c')^n |0,0,0> / sqrt(n! (kappa^2 + lambda^2)^n)` (dark)
/// or the same with `xi b'` (quasi-dark), over the oscillator `n`-excitation
/// sector.
pub fn multiquantum_state(params: &ModelParams, kind: AtomKind, branch: Branch, n: usize) -> Result<SectorVector> {
    if kind != AtomKind::Oscillator {
        return Err(Error::WrongAtomKind);
    }
    let (dark, quasi) = dark_tuning(params, DEFAULT_TUNING_TOL)?;
    let tuning = match branch {
        Branch::Dark => dark,
        Branch::QuasiDark => quasi,
    };
    let wanted = match branch {
        Branch::Dark => TuningKind::Dark,
        Branch::QuasiDark => TuningKind::QuasiDark,
    };
    if tuning.kind != wanted {
        return Err(Error::TuningNotSatisfied { residual: tuning.residual.unwrap_or(f64::INFINITY) });
    }

    let kappa = params.kappa.re;
    let partner = match branch {
        Branch::Dark => params.lambda.re,
        Branch::QuasiDark => params.xi.re,
    };
    let r = kappa.hypot(partner);
    let (ca, cp) = (kappa / r, -partner / r);

    let basis = sector_basis(AtomKind::Oscillator, n);
    let mut amps = vec![C64::new(0.0, 0.0); basis.len()];
    for k in 0..=n {
        let occ = match branch {
            Branch::Dark => Occupation::new((n - k) as u32, 0, k as u32),
            Branch::QuasiDark => Occupation::new((n - k) as u32, k as u32, 0),
        };
        let idx = basis.binary_search_by(|probe| occ.cmp(probe)).expect("state in sector");
        amps[idx] = C64::new(binomial(n, k).sqrt() * ca.powi((n - k) as i32) * cp.powi(k as i32), 0.0);
    }
    Ok(SectorVector { ell: n, amps })
}

/// Mode exchanges that leave the oscillator Hamiltonian's form invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relabel {
    AtomPhoton,
    AtomPhonon,
}

impl Relabel {
    /// Basis permutation: new index i takes old index `perm[i]`.
    pub fn permutation(self) -> [usize; 3] {
        match self {
            Relabel::AtomPhoton => [1, 0, 2],
            Relabel::AtomPhonon => [2, 1, 0],
        }
    }

    pub fn apply(self, occ: Occupation) -> Occupation {
        match self {
            Relabel::AtomPhoton => Occupation::new(occ.photon, occ.atom, occ.phonon),
            Relabel::AtomPhonon => Occupation::new(occ.phonon, occ.photon, occ.atom),
        }
    }
}

/// Parameters after exchanging the atom with the photon or with the phonon:
/// atom-photon sends `(w_a, w_b, lambda, xi, kappa)` to
/// `(w_b, w_a, lambda*, kappa, xi)`; atom-phonon sends
/// `(w_a, w_c, lambda, xi, kappa)` to `(w_c, w_a, kappa*, xi*, lambda*)`.
pub fn relabel_params(params: &ModelParams, kind: AtomKind, role: Relabel) -> Result<ModelParams> {
    if kind != AtomKind::Oscillator {
        return Err(Error::WrongAtomKind);
    }
    let p = *params;
    Ok(match role {
        Relabel::AtomPhoton => ModelParams {
            omega_a: p.omega_b,
            omega_b: p.omega_a,
            omega_c: p.omega_c,
            lambda: p.lambda.conj(),
            xi: p.kappa,
            kappa: p.xi,
        },
        Relabel::AtomPhonon => ModelParams {
            omega_a: p.omega_c,
            omega_b: p.omega_b,
            omega_c: p.omega_a,
            lambda: p.kappa.conj(),
            xi: p.xi.conj(),
            kappa: p.lambda.conj(),
        },
    })
}

/// Dark state of the atom-photon relabeled model, expressed in the original
/// modes: `(xi b' - lambda c')^n |0,0,0>` normalized, with its energy
/// `n (W - xi kappa / lambda)` where `W = w_a = w_c`. Requires real `lambda`,
/// `kappa`, `xi > 0` and `f(lambda, kappa) = W - w_b` with `xi` in the role of
/// the photon-phonon coupling.
pub fn relabeled_dark_state(params: &ModelParams, kind: AtomKind, n: usize) -> Result<(SectorVector, f64)> {
    let q = relabel_params(params, kind, Relabel::AtomPhoton)?;
    let relabeled = multiquantum_state(&q, kind, Branch::Dark, n)?;
    let (dark, _) = dark_tuning(&q, DEFAULT_TUNING_TOL)?;
    let energy = n as f64 * dark.energy.expect("dark branch satisfied");

    let basis = sector_basis(AtomKind::Oscillator, n);
    let mut amps = vec![C64::new(0.0, 0.0); basis.len()];
    for (occ, amp) in basis.iter().zip(&relabeled.amps) {
        let target = Relabel::AtomPhoton.apply(*occ);
        let idx = basis.binary_search_by(|probe| target.cmp(probe)).expect("state in sector");
        amps[idx] = *amp;
    }
    Ok((SectorVector { ell: n, amps }, energy))
}

/// Eigenstates with no photon-phonon coupling. The closed form
/// `(1, lambda/(E - w_b), xi/(E - w_c))` is used away from the poles, the
/// eigensolver vector otherwise.
pub fn kappa_zero_analysis(params: &ModelParams) -> Result<Vec<EigenstateRecord>> {
    if params.kappa.norm_sqr() != 0.0 {
        return Err(Error::KappaNonzero);
    }
    let h = one_excitation_matrix(params);
    let h_norm = h.norm();
    let eig = dense_hermitian_eig(&h.entries)?;
    let funcs = SpectralFunctions::new(params)?;
    let _ = gamma_zero_threshold(params);
    (0..3)
        .map(|j| {
            let energy = eig.values[j];
            let closed = (funcs.d1(energy).is_ok())
                .then(|| assemble_eigenstate(params, energy).ok())
                .flatten()
                .filter(|s| one_excitation_residual(params, s, energy) < EIGEN_RESIDUAL_TOL * h_norm);
            let amps = match closed {
                Some(s) => s.amps,
                None => eig.vectors.column(j).iter().copied().collect(),
            };
            let state = SectorVector { ell: 1, amps: phase_fixed(amps) };
            let class = classify(&state, DEFAULT_CLASSIFY_TOL)?;
            Ok(EigenstateRecord { energy, state, class })
        })
        .collect()
}

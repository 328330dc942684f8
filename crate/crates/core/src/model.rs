//! Model parameters, the standing assumptions on them, and exact matrices of
//! the Hamiltonian restricted to fixed total excitation number.
//!
//! Bare basis order is (atom, photon, phonon) everywhere. A one-excitation
//! state is written as amplitudes on |e,0,0>, |g,1,0>, |g,0,1> (or |1,0,0>,
//! |0,1,0>, |0,0,1> for the oscillator atom).

use std::fmt;

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use crate::bogoliubov2::two_mode_spectrum;
use crate::{Error, Result, C64};

/// Default cap on the number of rows of a sector matrix.
pub const DEFAULT_MAX_SECTOR_DIM: usize = 10_000;

/// Frequencies and couplings of
/// `H = w_a a'a + w_b b'b + w_c c'c + (l* a'b + l b'a) + (x* a'c + x c'a) + (k* b'c + k c'b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub omega_c: f64,
    #[serde(with = "crate::serde_complex")]
    pub lambda: C64,
    #[serde(with = "crate::serde_complex")]
    pub xi: C64,
    #[serde(with = "crate::serde_complex")]
    pub kappa: C64,
}

impl ModelParams {
    pub fn new(
        omega_a: f64,
        omega_b: f64,
        omega_c: f64,
        lambda: C64,
        xi: C64,
        kappa: C64,
    ) -> Result<Self> {
        let p = Self { omega_a, omega_b, omega_c, lambda, xi, kappa };
        p.check()?;
        Ok(p)
    }

    /// Real couplings.
    pub fn real(omega_a: f64, omega_b: f64, omega_c: f64, lambda: f64, xi: f64, kappa: f64) -> Result<Self> {
        Self::new(omega_a, omega_b, omega_c, lambda.into(), xi.into(), kappa.into())
    }

    /// Positive finite frequencies, finite couplings.
    pub fn check(&self) -> Result<()> {
        for (name, w) in [("omega_a", self.omega_a), ("omega_b", self.omega_b), ("omega_c", self.omega_c)] {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be finite and positive, got {w}")));
            }
        }
        for (name, z) in [("lambda", self.lambda), ("xi", self.xi), ("kappa", self.kappa)] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// Largest coupling modulus, floored at one. Scale for the Ass 2 test.
    pub(crate) fn coupling_scale(&self) -> f64 {
        self.lambda.norm().max(self.xi.norm()).max(self.kappa.norm()).max(1.0)
    }

    /// Max-abs-row-sum bound on the one-excitation matrix, used as `||H||`.
    pub fn one_excitation_norm(&self) -> f64 {
        let m = one_excitation_matrix(self).entries;
        (0..m.nrows())
            .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Two-level (spin) atom or harmonic-oscillator atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomKind {
    TwoLevel,
    Oscillator,
}

impl fmt::Display for AtomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AtomKind::TwoLevel => "two-level",
            AtomKind::Oscillator => "oscillator",
        })
    }
}

impl std::str::FromStr for AtomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-level" => Ok(AtomKind::TwoLevel),
            "oscillator" => Ok(AtomKind::Oscillator),
            other => Err(Error::InvalidParams(format!("unknown atom kind {other:?}"))),
        }
    }
}

/// One strict inequality and how far inside (positive) or outside it is.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assumption {
    pub holds: bool,
    pub margin: f64,
}

impl Assumption {
    fn from_margin(margin: f64) -> Self {
        Self { holds: margin > 0.0, margin }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub kind: AtomKind,
    /// `|kappa| < sqrt(w_b w_c)`: both photon/phonon normal-mode energies positive.
    pub ass1: Assumption,
    /// `Gamma_1 Gamma_2 != 0`. Margin is `min |Gamma_j|` minus the zero threshold.
    pub ass2: Assumption,
    /// `|k|^2 + |G1|^2 + |G2|^2 < w_a w_b + w_b w_c + w_c w_a`.
    pub ass3: Assumption,
    /// `w_a |k|^2 + e1 |G2|^2 + e2 |G1|^2 < w_a w_b w_c`.
    pub ass4: Assumption,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.ass1.holds && self.ass2.holds && self.ass3.holds && self.ass4.holds
    }
}

/// Threshold below which an effective coupling counts as zero.
pub fn gamma_zero_threshold(params: &ModelParams) -> f64 {
    1e-12 * params.coupling_scale()
}

/// Ass 1 alone; defined even when the photon/phonon modes are degenerate.
pub fn ass1(params: &ModelParams) -> Assumption {
    Assumption::from_margin((params.omega_b * params.omega_c).sqrt() - params.kappa.norm())
}

/// Evaluates Ass 1-4. Ass 2-4 need the photon/phonon normal modes, so this
/// fails with [`Error::DegenerateTwoMode`] when `kappa = 0` and
/// `omega_b = omega_c`; [`ass1`] is still available in that case.
pub fn validate(params: &ModelParams, kind: AtomKind) -> Result<AssumptionReport> {
    params.check()?;
    let two = two_mode_spectrum(params)?;
    let [e1, e2] = two.eps;
    let [g1, g2] = [two.gamma[0].norm_sqr(), two.gamma[1].norm_sqr()];
    let k2 = params.kappa.norm_sqr();
    let (wa, wb, wc) = (params.omega_a, params.omega_b, params.omega_c);

    let min_gamma = two.gamma[0].norm().min(two.gamma[1].norm());
    Ok(AssumptionReport {
        kind,
        ass1: ass1(params),
        ass2: Assumption::from_margin(min_gamma - gamma_zero_threshold(params)),
        ass3: Assumption::from_margin(wa * wb + wb * wc + wc * wa - (k2 + g1 + g2)),
        ass4: Assumption::from_margin(wa * wb * wc - (wa * k2 + e1 * g2 + e2 * g1)),
    })
}

/// Bare-mode occupation numbers. For the two-level atom `atom` is 0 (g) or 1 (e).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occupation {
    pub atom: u32,
    pub photon: u32,
    pub phonon: u32,
}

impl Occupation {
    pub const fn new(atom: u32, photon: u32, phonon: u32) -> Self {
        Self { atom, photon, phonon }
    }

    pub fn total(&self) -> u32 {
        self.atom + self.photon + self.phonon
    }

    fn get(&self, mode: Mode) -> u32 {
        match mode {
            Mode::Atom => self.atom,
            Mode::Photon => self.photon,
            Mode::Phonon => self.phonon,
        }
    }

    fn get_mut(&mut self, mode: Mode) -> &mut u32 {
        match mode {
            Mode::Atom => &mut self.atom,
            Mode::Photon => &mut self.photon,
            Mode::Phonon => &mut self.phonon,
        }
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{},{}>", self.atom, self.photon, self.phonon)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Atom,
    Photon,
    Phonon,
}

/// Number of basis states with total excitation `ell`.
pub fn sector_dimension(kind: AtomKind, ell: usize) -> usize {
    match kind {
        AtomKind::TwoLevel if ell == 0 => 1,
        AtomKind::TwoLevel => 2 * ell + 1,
        AtomKind::Oscillator => (ell + 1) * (ell + 2) / 2,
    }
}

/// Basis of the `ell`-excitation sector in descending lexicographic order of
/// (atom, photon, phonon). For `ell = 1` this is (atom, photon, phonon).
pub fn sector_basis(kind: AtomKind, ell: usize) -> Vec<Occupation> {
    let ell = ell as u32;
    let max_atom = match kind {
        AtomKind::TwoLevel => ell.min(1),
        AtomKind::Oscillator => ell,
    };
    let mut basis = Vec::with_capacity(sector_dimension(kind, ell as usize));
    for atom in (0..=max_atom).rev() {
        let rest = ell - atom;
        for photon in (0..=rest).rev() {
            basis.push(Occupation::new(atom, photon, rest - photon));
        }
    }
    basis
}

/// Dense Hermitian matrix of `H` on one excitation sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorMatrix {
    pub ell: usize,
    pub kind: AtomKind,
    pub basis: Vec<Occupation>,
    pub entries: DMatrix<C64>,
}

impl SectorMatrix {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        // basis is sorted descending
        self.basis.binary_search_by(|probe| occ.cmp(probe)).ok()
    }

    /// Max-abs-row-sum norm.
    pub fn norm(&self) -> f64 {
        (0..self.entries.nrows())
            .map(|i| self.entries.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// The 3x3 one-excitation matrix in the (atom, photon, phonon) basis.
pub fn one_excitation_matrix(params: &ModelParams) -> SectorMatrix {
    let m = one_excitation_matrix3(params);
    SectorMatrix {
        ell: 1,
        kind: AtomKind::Oscillator,
        basis: sector_basis(AtomKind::Oscillator, 1),
        entries: DMatrix::from_iterator(3, 3, m.iter().copied()),
    }
}

/// Fixed-size form of [`one_excitation_matrix`].
pub fn one_excitation_matrix3(p: &ModelParams) -> Matrix3<C64> {
    let w = |x: f64| C64::new(x, 0.0);
    Matrix3::new(
        w(p.omega_a), p.lambda.conj(), p.xi.conj(),
        p.lambda, w(p.omega_b), p.kappa.conj(),
        p.xi, p.kappa, w(p.omega_c),
    )
}

/// [`sector_matrix_with_cap`] with the default cap.
pub fn sector_matrix(params: &ModelParams, kind: AtomKind, ell: usize) -> Result<SectorMatrix> {
    sector_matrix_with_cap(params, kind, ell, DEFAULT_MAX_SECTOR_DIM)
}

/// Exact matrix of `H` restricted to total excitation number `ell`.
pub fn sector_matrix_with_cap(
    params: &ModelParams,
    kind: AtomKind,
    ell: usize,
    max_dim: usize,
) -> Result<SectorMatrix> {
    let dim = sector_dimension(kind, ell);
    if dim > max_dim {
        return Err(Error::SizeLimit { dim, cap: max_dim });
    }
    let basis = sector_basis(kind, ell);
    debug_assert_eq!(basis.len(), dim);

    // (created mode, annihilated mode, coefficient)
    let hops = [
        (Mode::Atom, Mode::Photon, params.lambda.conj()),
        (Mode::Photon, Mode::Atom, params.lambda),
        (Mode::Atom, Mode::Phonon, params.xi.conj()),
        (Mode::Phonon, Mode::Atom, params.xi),
        (Mode::Photon, Mode::Phonon, params.kappa.conj()),
        (Mode::Phonon, Mode::Photon, params.kappa),
    ];

    let mut sm = SectorMatrix { ell, kind, basis, entries: DMatrix::zeros(dim, dim) };
    for col in 0..dim {
        let occ = sm.basis[col];
        let diag = params.omega_a * occ.atom as f64
            + params.omega_b * occ.photon as f64
            + params.omega_c * occ.phonon as f64;
        sm.entries[(col, col)] = C64::new(diag, 0.0);

        for &(create, annihilate, coeff) in &hops {
            let Some((target, amp)) = hop(kind, occ, create, annihilate) else {
                continue;
            };
            let row = sm.index_of(&target).expect("hop stays inside the sector");
            sm.entries[(row, col)] += coeff * amp;
        }
    }
    Ok(sm)
}

/// Applies `create' annihilate` to a basis state. Returns the target state and
/// the ladder amplitude, or `None` if the result vanishes.
fn hop(kind: AtomKind, occ: Occupation, create: Mode, annihilate: Mode) -> Option<(Occupation, f64)> {
    let n_out = occ.get(annihilate);
    if n_out == 0 {
        return None;
    }
    let mut target = occ;
    *target.get_mut(annihilate) -= 1;
    let n_in = target.get(create);
    if kind == AtomKind::TwoLevel && create == Mode::Atom && n_in >= 1 {
        return None;
    }
    *target.get_mut(create) += 1;
    let ladder = |mode: Mode, n: u32| {
        if kind == AtomKind::TwoLevel && mode == Mode::Atom {
            1.0
        } else {
            (n as f64).sqrt()
        }
    };
    Some((target, ladder(annihilate, n_out) * ladder(create, n_in + 1)))
}

//! C ABI over the `optodark` library.
//!
//! Every entry point returns an [`OdStatus`]. On failure a human-readable
//! message is stored per thread and can be read with [`od_last_error`].
//! Models are opaque: create them with [`od_model_new`] and release them with
//! [`od_model_free`]. Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use optodark::darkstates::{eigenstates, ClassVariant};
use optodark::model::{sector_dimension, sector_matrix, validate, Assumption};
use optodark::observables::duality_report;
use optodark::oracle::{crosscheck, dense_hermitian_eig};
use optodark::{bogoliubov2, bogoliubov3, AtomKind, Error, ModelParams, C64};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Assumption = 3,
    Numerical = 4,
    SizeLimit = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OdAtomKind {
    Oscillator = 0,
    TwoLevel = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OdClass {
    Dark = 0,
    QuasiDark = 1,
    Bright = 2,
    Degenerate = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub omega_c: f64,
    pub lambda: OdComplex,
    pub xi: OdComplex,
    pub kappa: OdComplex,
}

/// Standing assumptions 1 to 4; `margins[i] > 0` exactly when `holds[i]`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdAssumptions {
    pub holds: [bool; 4],
    pub margins: [f64; 4],
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdTwoMode {
    pub eps: [f64; 2],
    pub m: [f64; 2],
    pub gamma: [OdComplex; 2],
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdThreeMode {
    pub energies: [f64; 3],
    pub norms: [f64; 3],
    pub interlaced: bool,
}

/// One-excitation eigenstate, amplitudes ordered (atom, photon, phonon).
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdEigenstate {
    pub energy: f64,
    pub amplitudes: [OdComplex; 3],
    pub class_: OdClass,
    pub photon_amp: f64,
    pub phonon_amp: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdDuality {
    pub energies: [f64; 3],
    pub b_occ: [f64; 3],
    pub c_occ_swapped: [f64; 3],
    pub max_mismatch: f64,
    pub passed: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdVerify {
    pub checks: usize,
    pub failed: usize,
    pub passed: bool,
}

/// Opaque model handle.
pub struct OdModel {
    params: ModelParams,
    kind: AtomKind,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(err: &Error) -> OdStatus {
    match err {
        Error::InvalidParams(_) | Error::WrongSector { .. } | Error::WrongAtomKind => OdStatus::InvalidArgument,
        Error::AssumptionViolation(_)
        | Error::NotResonant
        | Error::ComplexCouplings
        | Error::GammaZero
        | Error::DegenerateTwoMode
        | Error::KappaNonzero
        | Error::TuningNotSatisfied { .. } => OdStatus::Assumption,
        Error::SizeLimit { .. } => OdStatus::SizeLimit,
        _ => OdStatus::Numerical,
    }
}

struct Failure(OdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(OdStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OdStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            OdStatus::Panic
        }
    }
}

unsafe fn handle<'a>(m: *const OdModel) -> Result<&'a OdModel, Failure> {
    m.as_ref().ok_or_else(|| null("model"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn c(z: OdComplex) -> C64 {
    C64::new(z.re, z.im)
}

fn od(z: C64) -> OdComplex {
    OdComplex { re: z.re, im: z.im }
}

impl From<OdAtomKind> for AtomKind {
    fn from(k: OdAtomKind) -> Self {
        match k {
            OdAtomKind::Oscillator => AtomKind::Oscillator,
            OdAtomKind::TwoLevel => AtomKind::TwoLevel,
        }
    }
}

impl From<ClassVariant> for OdClass {
    fn from(v: ClassVariant) -> Self {
        match v {
            ClassVariant::Dark => OdClass::Dark,
            ClassVariant::QuasiDark => OdClass::QuasiDark,
            ClassVariant::Bright => OdClass::Bright,
            ClassVariant::Degenerate => OdClass::Degenerate,
        }
    }
}

/// Creates a model. Frequencies must be finite and positive, couplings finite.
///
/// # Safety
/// `params` must point to a valid `OdParams`; `out_model` must be writable.
#[no_mangle]
pub unsafe extern "C" fn od_model_new(
    params: *const OdParams,
    kind: OdAtomKind,
    out_model: *mut *mut OdModel,
) -> OdStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let slot = out(out_model, "out_model")?;
        let params = ModelParams::new(p.omega_a, p.omega_b, p.omega_c, c(p.lambda), c(p.xi), c(p.kappa))?;
        *slot = Box::into_raw(Box::new(OdModel { params, kind: kind.into() }));
        Ok(())
    })
}

/// Releases a model. Null is accepted and ignored.
///
/// # Safety
/// `model` must come from [`od_model_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn od_model_free(model: *mut OdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Copies the model parameters.
///
/// # Safety
/// `model` must be a live handle; `out_params` must be writable.
#[no_mangle]
pub unsafe extern "C" fn od_model_params(model: *const OdModel, out_params: *mut OdParams) -> OdStatus {
    guard(|| {
        let p = handle(model)?.params;
        *out(out_params, "out_params")? = OdParams {
            omega_a: p.omega_a,
            omega_b: p.omega_b,
            omega_c: p.omega_c,
            lambda: od(p.lambda),
            xi: od(p.xi),
            kappa: od(p.kappa),
        };
        Ok(())
    })
}

/// Evaluates the four standing assumptions.
///
/// # Safety
/// `model` must be a live handle; `out_report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn od_validate(model: *const OdModel, out_report: *mut OdAssumptions) -> OdStatus {
    guard(|| {
        let m = handle(model)?;
        let slot = out(out_report, "out_report")?;
        let r = validate(&m.params, m.kind)?;
        let all: [Assumption; 4] = [r.ass1, r.ass2, r.ass3, r.ass4];
        *slot = OdAssumptions { holds: all.map(|a| a.holds), margins: all.map(|a| a.margin) };
        Ok(())
    })
}

/// Photon/phonon normal modes and their couplings to the atom.
///
/// # Safety
/// `model` must be a live handle; `out_spectrum` must be writable.
#[no_mangle]
pub unsafe extern "C" fn od_two_mode_spectrum(model: *const OdModel, out_spectrum: *mut OdTwoMode) -> OdStatus {
    guard(|| {
        let m = handle(model)?;
        let slot = out(out_spectrum, "out_spectrum")?;
        let s = bogoliubov2::two_mode_spectrum(&m.params)?;
        *slot = OdTwoMode { eps: s.eps, m: s.m, gamma: s.gamma.map(od) };
        Ok(())
    })
}

/// Dressed one-excitation energies `E_1 < E_2 < E_3`.
///
/// # Safety
/// `model` must be a live handle; `out_spectrum` must be writable.
#[no_mangle]
pub unsafe extern "C" fn od_three_mode_spectrum(model: *const OdModel, out_spectrum: *mut OdThreeMode) -> OdStatus {
    guard(|| {
        let m = handle(model)?;
        let slot = out(out_spectrum, "out_spectrum")?;
        let s = bogoliubov3::three_mode_spectrum(&m.params)?;
        *slot = OdThreeMode { energies: s.e, norms: s.n_norm, interlaced: s.interlaced() };
        Ok(())
    })
}

/// The three one-excitation eigenstates, ascending, classified with `tol`.
///
/// # Safety
/// `model` must be a live handle; `out_states` must point to 3 writable entries.
#[no_mangle]
pub unsafe extern "C" fn od_one_excitation_eigenstates(
    model: *const OdModel,
    tol: f64,
    out_states: *mut OdEigenstate,
) -> OdStatus {
    guard(|| {
        let m = handle(model)?;
        if out_states.is_null() {
            return Err(null("out_states"));
        }
        if !tol.is_finite() || tol < 0.0 {
            return Err(Failure(OdStatus::InvalidArgument, format!("tolerance must be finite and >= 0, got {tol}")));
        }
        let records = eigenstates(&m.params, tol)?;
        let states: Vec<OdEigenstate> = records
            .iter()
            .map(|r| OdEigenstate {
                energy: r.energy,
                amplitudes: [od(r.state.amps[0]), od(r.state.amps[1]), od(r.state.amps[2])],
                class_: r.class.variant.into(),
                photon_amp: r.class.photon_amp,
                phonon_amp: r.class.phonon_amp,
            })
            .collect();
        ptr::copy_nonoverlapping(states.as_ptr(), out_states, states.len());
        Ok(())
    })
}

/// Compares `<b'b>` at `(lambda, xi)` with `<c'c>` at `(xi, lambda)`.
/// Requires `omega_b = omega_c`, real couplings and `kappa > 0`.
///
/// # Safety
/// `model` must be a live handle; `out_report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn od_duality_report(model: *const OdModel, tol: f64, out_report: *mut OdDuality) -> OdStatus {
    guard(|| {
        let m = handle(model)?;
        let slot = out(out_report, "out_report")?;
        let r = duality_report(&m.params, tol)?;
        let three = |v: &[f64]| [v[0], v[1], v[2]];
        *slot = OdDuality {
            energies: [r.energies[0][0], r.energies[1][0], r.energies[2][0]],
            b_occ: three(&r.b_occ),
            c_occ_swapped: three(&r.c_occ_swapped),
            max_mismatch: r.max_mismatch,
            passed: r.passed,
        };
        Ok(())
    })
}

/// Number of basis states with `ell` total excitations.
#[no_mangle]
pub extern "C" fn od_sector_dimension(kind: OdAtomKind, ell: usize) -> usize {
    sector_dimension(kind.into(), ell)
}

/// Ascending eigenvalues of the `ell`-excitation sector.
///
/// `out_len` always receives the sector dimension. When `capacity` is smaller
/// nothing is written to `out_values` and `BufferTooSmall` is returned.
///
/// # Safety
/// `model` must be a live handle; `out_values` must have `capacity` writable
/// entries; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn od_sector_eigenvalues(
    model: *const OdModel,
    ell: usize,
    out_values: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> OdStatus {
    guard(|| {
        let m = handle(model)?;
        let len = out(out_len, "out_len")?;
        let dim = sector_dimension(m.kind, ell);
        *len = dim;
        if capacity < dim {
            return Err(Failure(OdStatus::BufferTooSmall, format!("need {dim} entries, got {capacity}")));
        }
        if out_values.is_null() {
            return Err(null("out_values"));
        }
        let sm = sector_matrix(&m.params, m.kind, ell)?;
        let values = dense_hermitian_eig(&sm.entries)?.values;
        ptr::copy_nonoverlapping(values.as_ptr(), out_values, values.len());
        Ok(())
    })
}

/// Runs every closed-form versus brute-force cross-check.
///
/// # Safety
/// `model` must be a live handle; `out_result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn od_verify(model: *const OdModel, out_result: *mut OdVerify) -> OdStatus {
    guard(|| {
        let m = handle(model)?;
        let slot = out(out_result, "out_result")?;
        let r = crosscheck(&m.params, m.kind);
        *slot = OdVerify { checks: r.checks.len(), failed: r.failures().count(), passed: r.passed() };
        Ok(())
    })
}

/// Message from the last failing call on this thread; empty if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn od_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn od_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    fn message() -> String {
        unsafe { CStr::from_ptr(od_last_error()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn panics_become_a_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, OdStatus::Panic);
        assert_eq!(message(), "panic: boom");
    }

    #[test]
    fn error_mapping() {
        assert_eq!(status_of(&Error::GammaZero), OdStatus::Assumption);
        assert_eq!(status_of(&Error::NotResonant), OdStatus::Assumption);
        assert_eq!(status_of(&Error::WrongSector { ell: 2 }), OdStatus::InvalidArgument);
        assert_eq!(status_of(&Error::SizeLimit { dim: 10, cap: 5 }), OdStatus::SizeLimit);
        assert_eq!(status_of(&Error::ConvergenceFailure), OdStatus::Numerical);
    }

    #[test]
    fn interior_nul_is_replaced() {
        set_error("a\0b");
        assert_eq!(message(), "a b");
    }
}

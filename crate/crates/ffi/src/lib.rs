//! C interface to `gravimech`.
//!
//! Every fallible function returns a [`GmStatus`]. On failure the message is
//! kept per thread and can be copied out with [`gm_last_error_message`].
//! Experiments are opaque handles created by `gm_experiment_*` constructors
//! and released with [`gm_experiment_free`]. Panics never cross the boundary;
//! they surface as `GM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::CStr;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use libc::{c_char, c_int, size_t};

use gravimech::cwl::{cwl_probabilities, CwlParams};
use gravimech::harness::{run_comparison, ConfigOverrides, ExperimentConfig};
use gravimech::physcore::{xi0, MaterialSpec};
use gravimech::pulse::PulseProtocol;
use gravimech::sn::{sn_pulse_p0, thermal_p0, SnParams};
use gravimech::{Error, Theory};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

impl From<&Error> for GmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Config { .. } => GmStatus::Config,
            Error::InvalidParameter { .. } | Error::InvalidMaterial(_) | Error::InvalidGeometry(_) => GmStatus::InvalidArgument,
            Error::Integration { .. } | Error::Unstable { .. } => GmStatus::Numerical,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => GmStatus::Io,
        }
    }
}

/// Settable experiment parameters, matching the command-line overrides.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GmParam {
    OmegaM = 0,
    OmegaSn = 1,
    PulseN = 2,
    PulseTp = 3,
    PulseTwait = 4,
    TemperatureK = 5,
    QFactor = 6,
}

/// Opaque experiment handle.
pub struct GmExperiment {
    config: ExperimentConfig,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GmPrediction {
    pub p0: f64,
    pub p1: f64,
    pub eps2: f64,
    pub regime_ok: c_int,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GmComparison {
    pub omega_sn: f64,
    pub eps2: f64,
    pub p0_qm: f64,
    pub p0_sn: f64,
    pub p0_cwl: f64,
    pub p0_sn_exact: f64,
    pub p0_thermal: f64,
    pub sn_regime_ok: c_int,
    pub cwl_regime_ok: c_int,
    pub thermal_regime_ok: c_int,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), (GmStatus, String)>) -> GmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            GmStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GmStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (GmStatus, String) {
    (GmStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (GmStatus, String) {
    (GmStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GmStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (GmStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), (GmStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes, excluding
/// the terminator; pass a null `buf` to query it.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gm_last_error_message(buf: *mut c_char, len: size_t) -> size_t {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse a TOML configuration with all four sections.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_experiment_from_toml(toml: *const c_char, out: *mut *mut GmExperiment) -> GmStatus {
    guard(|| {
        let text = read_str(toml, "toml")?;
        let config = ExperimentConfig::parse(text).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(GmExperiment { config })), "out")
    })
}

/// Load a TOML or JSON configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_experiment_load(path: *const c_char, out: *mut *mut GmExperiment) -> GmStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        let config = ExperimentConfig::load(Path::new(path)).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(GmExperiment { config })), "out")
    })
}

/// # Safety
/// `handle` must be null or come from a `gm_experiment_*` constructor and not
/// have been freed.
#[no_mangle]
pub unsafe extern "C" fn gm_experiment_free(handle: *mut GmExperiment) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Override one parameter. The handle is left unchanged on error.
///
/// # Safety
/// `handle` must be a live experiment handle.
#[no_mangle]
pub unsafe extern "C" fn gm_experiment_set(handle: *mut GmExperiment, param: GmParam, value: f64) -> GmStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        let mut o = ConfigOverrides::default();
        match param {
            GmParam::OmegaM => o.omega_m = Some(value),
            GmParam::OmegaSn => o.omega_sn = Some(value),
            GmParam::PulseN => {
                if !(value >= 0.0 && value.fract() == 0.0 && value <= f64::from(u32::MAX)) {
                    return Err((GmStatus::InvalidArgument, format!("pulse n must be a non-negative integer, got {value}")));
                }
                o.n = Some(value as u32);
            }
            GmParam::PulseTp => o.t_p = Some(value),
            GmParam::PulseTwait => o.t_wait = Some(value),
            GmParam::TemperatureK => o.temperature = Some(value),
            GmParam::QFactor => o.q_factor = Some(value),
        }
        h.config = h.config.clone().with_overrides(&o).map_err(lib_err)?;
        Ok(())
    })
}

/// Run the three-theory comparison.
///
/// # Safety
/// `handle` must be a live experiment handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_experiment_compare(handle: *const GmExperiment, out: *mut GmComparison) -> GmStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let c = run_comparison(&h.config).map_err(lib_err)?;
        let sn = c.prediction(Theory::Sn);
        let cwl = c.prediction(Theory::Cwl);
        let value = GmComparison {
            omega_sn: c.params.omega_sn,
            eps2: c.params.eps2,
            p0_qm: c.prediction(Theory::Qm).p0,
            p0_sn: sn.p0,
            p0_cwl: cwl.p0,
            p0_sn_exact: c.sn_p0_exact,
            p0_thermal: c.thermal.p0_th,
            sn_regime_ok: sn.diagnostics.regime_ok.into(),
            cwl_regime_ok: cwl.diagnostics.regime_ok.into(),
            thermal_regime_ok: c.thermal.regime_ok.into(),
        };
        write_out(out, value, "out")
    })
}

/// CWL photon-return probabilities for one pulse protocol (rad/s, s).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_cwl_probabilities(
    omega_m: f64,
    omega_sn: f64,
    n: u32,
    t_p: f64,
    t_wait: f64,
    out: *mut GmPrediction,
) -> GmStatus {
    guard(|| {
        let protocol = PulseProtocol::new(n, t_p, t_wait).map_err(lib_err)?;
        let params = CwlParams::new(omega_m, omega_sn).map_err(lib_err)?;
        let p = cwl_probabilities(&params, &protocol, false).map_err(lib_err)?;
        write_out(out, GmPrediction { p0: p.p0, p1: p.p1, eps2: p.diagnostics.eps2, regime_ok: p.diagnostics.regime_ok.into() }, "out")
    })
}

/// SN photon-return probabilities; `p0_exact` receives the exact two-pulse
/// composition and may be null.
///
/// # Safety
/// `out` must be writable; `p0_exact` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn gm_sn_probabilities(
    omega_m: f64,
    omega_sn: f64,
    n: u32,
    t_wait: f64,
    out: *mut GmPrediction,
    p0_exact: *mut f64,
) -> GmStatus {
    guard(|| {
        let params = SnParams::new(omega_m, omega_sn).map_err(lib_err)?;
        let r = sn_pulse_p0(&params, n, t_wait).map_err(lib_err)?;
        let eps2 = params.eps2();
        write_out(out, GmPrediction { p0: r.p0, p1: r.p1, eps2, regime_ok: (eps2 < 0.25).into() }, "out")?;
        if !p0_exact.is_null() {
            p0_exact.write(r.p0_exact);
        }
        Ok(())
    })
}

/// Thermal zero-photon probability (SI units). `regime_ok` may be null.
///
/// # Safety
/// `p0_th` must be writable; `regime_ok` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn gm_thermal_p0(
    omega_m: f64,
    q_factor: f64,
    temperature_k: f64,
    t_p: f64,
    p0_th: *mut f64,
    regime_ok: *mut c_int,
) -> GmStatus {
    guard(|| {
        let e = thermal_p0(omega_m, q_factor, temperature_k, t_p).map_err(lib_err)?;
        write_out(p0_th, e.p0_th, "p0_th")?;
        if !regime_ok.is_null() {
            regime_ok.write(e.regime_ok.into());
        }
        Ok(())
    })
}

/// Zero-point plus thermal ionic spread ξ₀ in metres, from lab units
/// (kg/m³, amu, kelvin, metres).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_xi0(
    density: f64,
    ionic_mass_amu: f64,
    debye_temp_k: f64,
    lattice_spacing: f64,
    temperature_k: f64,
    out: *mut f64,
) -> GmStatus {
    guard(|| {
        let m = MaterialSpec::from_lab_units("ffi", density, ionic_mass_amu, debye_temp_k, lattice_spacing).map_err(lib_err)?;
        write_out(out, xi0(&m, temperature_k).map_err(lib_err)?, "out")
    })
}

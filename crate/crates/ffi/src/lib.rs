//! C ABI for `quantrate`.
//!
//! Every fallible function returns a [`QrStatus`] and writes its result
//! through an out-pointer. On failure, [`qr_last_error_message`] describes
//! the error for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use quantrate::gmi;
use quantrate::highres;
use quantrate::montecarlo::{estimate_moments, ChannelParams};
use quantrate::numerics::{self, Tolerance};
use quantrate::{Error, SymmetricQuantizer};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Bracket = 3,
    Convergence = 4,
    Quantizer = 5,
    Parameter = 6,
    Panic = 7,
}

/// Opaque symmetric quantizer handle.
pub struct QrQuantizer(SymmetricQuantizer);

/// Loading-factor analysis for one K; rates in nats at `reference_snr`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QrLoadingAnalysis {
    pub levels: usize,
    pub l_star: f64,
    pub step_star: f64,
    pub l_hat: f64,
    pub scaling_law: f64,
    pub gamma_at_star: f64,
    pub l_mse: f64,
    pub reference_snr: f64,
    pub gmi_at_star: f64,
    pub gmi_at_hat: f64,
}

/// Monte Carlo moment estimate; rates in nats.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QrMomentEstimate {
    pub exy_conj_re: f64,
    pub exy_conj_im: f64,
    pub ey2: f64,
    pub delta_hat: f64,
    pub gmi_hat: f64,
    pub std_err_gmi: f64,
    pub alpha_hat_re: f64,
    pub alpha_hat_im: f64,
    pub n_samples: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QrStatus {
    match e {
        Error::Domain(_) => QrStatus::Domain,
        Error::Bracket { .. } => QrStatus::Bracket,
        Error::Convergence { .. } => QrStatus::Convergence,
        Error::Quantizer(_) => QrStatus::Quantizer,
        Error::Parameter(_) => QrStatus::Parameter,
    }
}

fn guard<F>(f: F) -> QrStatus
where
    F: FnOnce() -> Result<(), QrStatus>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QrStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            QrStatus::Panic
        }
    }
}

fn lib<T>(r: quantrate::Result<T>) -> Result<T, QrStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn null(what: &str) -> QrStatus {
    set_error(&format!("{what} is null"));
    QrStatus::NullPointer
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), QrStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a>(q: *const QrQuantizer) -> Result<&'a SymmetricQuantizer, QrStatus> {
    q.as_ref().map(|h| &h.0).ok_or_else(|| null("quantizer handle"))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], QrStatus> {
    if n == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, n))
    }
}

/// Message for the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next `qr_*` call on the same thread.
#[no_mangle]
pub extern "C" fn qr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Uniform mid-rise quantizer with `2 * levels` outputs and the given step.
///
/// # Safety
/// `out` must be valid for writes. Release the handle with [`qr_quantizer_free`].
#[no_mangle]
pub unsafe extern "C" fn qr_quantizer_new_uniform(
    levels: usize,
    step: f64,
    out: *mut *mut QrQuantizer,
) -> QrStatus {
    guard(|| {
        let q = lib(SymmetricQuantizer::uniform(levels, step))?;
        write(out, Box::into_raw(Box::new(QrQuantizer(q))))
    })
}

/// Quantizer from `levels - 1` positive thresholds and `levels` positive points.
///
/// # Safety
/// `thresholds` and `points` must point to `n_thresholds` and `n_points` doubles;
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_quantizer_new(
    thresholds: *const f64,
    n_thresholds: usize,
    points: *const f64,
    n_points: usize,
    out: *mut *mut QrQuantizer,
) -> QrStatus {
    guard(|| {
        let t = slice(thresholds, n_thresholds, "thresholds")?;
        let p = slice(points, n_points, "points")?;
        let q = lib(SymmetricQuantizer::new(t.to_vec(), p.to_vec()))?;
        write(out, Box::into_raw(Box::new(QrQuantizer(q))))
    })
}

/// Releases a handle; NULL is ignored.
///
/// # Safety
/// `q` must come from a `qr_quantizer_new*` call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qr_quantizer_free(q: *mut QrQuantizer) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Number of positive output levels K, or 0 for NULL.
///
/// # Safety
/// `q` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qr_quantizer_levels(q: *const QrQuantizer) -> usize {
    q.as_ref().map_or(0, |h| h.0.levels())
}

/// # Safety
/// `q` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_quantizer_quantize(
    q: *const QrQuantizer,
    v: f64,
    out: *mut f64,
) -> QrStatus {
    guard(|| {
        let q = handle(q)?;
        write(out, lib(q.quantize(v))?)
    })
}

/// Coefficients `A`, `B` and `gamma = 1 - A^2/B` of a quantizer.
///
/// # Safety
/// `q` must be a live handle; each out-pointer must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_quantizer_gamma(
    q: *const QrQuantizer,
    out_a: *mut f64,
    out_b: *mut f64,
    out_gamma: *mut f64,
) -> QrStatus {
    guard(|| {
        let q = handle(q)?;
        let (a, b) = (gmi::coeff_a(q), gmi::coeff_b(q));
        write(out_a, a)?;
        write(out_b, b)?;
        write(out_gamma, gmi::gamma_from_coeffs(a, b))
    })
}

/// GMI in nats for a given `gamma` and linear SNR.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_gmi_rate(gamma: f64, snr: f64, out: *mut f64) -> QrStatus {
    guard(|| write(out, lib(gmi::gmi_rate(gamma, snr))?))
}

/// Gaussian tail probability Q(t).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_q_function(t: f64, out: *mut f64) -> QrStatus {
    guard(|| write(out, lib(numerics::q_function(t))?))
}

/// Large-K limit of gamma at loading factor `loading`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_gamma_bar(loading: f64, out: *mut f64) -> QrStatus {
    guard(|| write(out, lib(highres::gamma_bar(loading))?))
}

/// Closed-form loading-factor estimate for K >= 2.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_loading_estimate(levels: usize, out: *mut f64) -> QrStatus {
    guard(|| write(out, lib(highres::loading_estimate(levels))?))
}

/// Optimal loading factor and related quantities for K >= 2, at 10 dB.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_optimal_loading(
    levels: usize,
    out: *mut QrLoadingAnalysis,
) -> QrStatus {
    guard(|| {
        let a = lib(highres::optimal_loading(levels, &Tolerance::default()))?;
        write(
            out,
            QrLoadingAnalysis {
                levels: a.levels,
                l_star: a.l_star,
                step_star: a.step_star,
                l_hat: a.l_hat,
                scaling_law: a.scaling_law,
                gamma_at_star: a.gamma_at_star,
                l_mse: a.l_mse,
                reference_snr: a.reference_snr,
                gmi_at_star: a.gmi_at_star,
                gmi_at_hat: a.gmi_at_hat,
            },
        )
    })
}

/// Simulates `n_samples` channel uses of `Y = q(g V_R/sigma_v) + j q(g V_I/sigma_v)`.
///
/// # Safety
/// `q` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qr_estimate_moments(
    q: *const QrQuantizer,
    h_re: f64,
    h_im: f64,
    sigma_x2: f64,
    sigma2: f64,
    gain: f64,
    n_samples: usize,
    seed: u64,
    out: *mut QrMomentEstimate,
) -> QrStatus {
    guard(|| {
        let q = handle(q)?;
        let params = lib(ChannelParams::new(Complex64::new(h_re, h_im), sigma_x2, sigma2, gain))?;
        let e = lib(estimate_moments(&params, q, n_samples, seed))?;
        write(
            out,
            QrMomentEstimate {
                exy_conj_re: e.exy_conj.re,
                exy_conj_im: e.exy_conj.im,
                ey2: e.ey2,
                delta_hat: e.delta_hat,
                gmi_hat: e.gmi_hat_nats,
                std_err_gmi: e.std_err_gmi,
                alpha_hat_re: e.alpha_hat.re,
                alpha_hat_im: e.alpha_hat.im,
                n_samples: e.n_samples,
            },
        )
    })
}

//! C ABI for the two-mode ensemble toolkit.
//!
//! Handles are opaque; every fallible call returns a `BectStatus` and
//! writes results through out-pointers. A thread-local message string
//! describes the most recent error. Momenta are passed as three doubles:
//! lattice kernels require integer-valued components, the Gaussian kernel
//! reads only the first component.
//!
//! The matching header lives at `include/bect.h`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};

use bect_core::analytics;
use bect_core::fock::{EnsembleSampler, SubspaceSpec};
use bect_core::models::{GaussianModel, Mode, ModeKernel, Momentum, PlaneWaveModel};
use bect_core::wick;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BectStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    MomentumKind = 3,
    BufferTooSmall = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn fail(status: BectStatus, message: &str) -> BectStatus {
    set_error(message);
    status
}

fn fail_core(err: bect_core::Error) -> BectStatus {
    let status = match err {
        bect_core::Error::MomentumKind => BectStatus::MomentumKind,
        _ => BectStatus::InvalidArgument,
    };
    set_error(&err.to_string());
    status
}

/// Message describing the most recent error on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bect_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bect_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Opaque kernel handle.
pub struct BectKernel {
    inner: ModeKernel,
}

/// Opaque sampler handle.
pub struct BectSampler {
    inner: EnsembleSampler,
}

unsafe fn write_out<T>(out: *mut T, value: T) -> BectStatus {
    if out.is_null() {
        return fail(BectStatus::NullPointer, "null out pointer");
    }
    unsafe { out.write(value) };
    BectStatus::Ok
}

/// Create a counterpropagating plane-wave kernel with lattice wavevector
/// (kx, ky, kz) != 0. On success writes a handle the caller must release
/// with `bect_kernel_free`.
#[no_mangle]
pub extern "C" fn bect_kernel_plane_wave_new(
    kx: i64,
    ky: i64,
    kz: i64,
    out: *mut *mut BectKernel,
) -> BectStatus {
    match PlaneWaveModel::new([kx, ky, kz]) {
        Ok(model) => {
            let handle = Box::into_raw(Box::new(BectKernel {
                inner: ModeKernel::plane_wave(model),
            }));
            unsafe { write_out(out, handle) }
        }
        Err(e) => fail_core(e),
    }
}

/// Create an expanding-Gaussian kernel with half separation `alpha` (in
/// widths) at time `t` (in m sigma^2/hbar).
#[no_mangle]
pub extern "C" fn bect_kernel_gaussian_new(
    alpha: f64,
    t: f64,
    out: *mut *mut BectKernel,
) -> BectStatus {
    match GaussianModel::new(alpha, t) {
        Ok(model) => {
            let handle = Box::into_raw(Box::new(BectKernel {
                inner: ModeKernel::gaussian(model),
            }));
            unsafe { write_out(out, handle) }
        }
        Err(e) => fail_core(e),
    }
}

/// Release a kernel handle. Null is ignored.
#[no_mangle]
pub extern "C" fn bect_kernel_free(kernel: *mut BectKernel) {
    if !kernel.is_null() {
        drop(unsafe { Box::from_raw(kernel) });
    }
}

unsafe fn kernel_ref<'a>(kernel: *const BectKernel) -> Option<&'a ModeKernel> {
    unsafe { kernel.as_ref() }.map(|k| &k.inner)
}

unsafe fn momentum_from(kernel: &ModeKernel, q: *const f64) -> Result<Momentum, BectStatus> {
    if q.is_null() {
        set_error("null momentum pointer");
        return Err(BectStatus::NullPointer);
    }
    let v = unsafe { std::slice::from_raw_parts(q, 3) };
    if kernel.is_lattice() {
        if v.iter().any(|x| x.fract() != 0.0 || x.abs() > 1e15) {
            set_error("lattice kernels take integer momentum components");
            return Err(BectStatus::MomentumKind);
        }
        Ok(Momentum::Lattice([v[0] as i64, v[1] as i64, v[2] as i64]))
    } else {
        Ok(Momentum::Real(v[0]))
    }
}

fn mode_from(code: c_int) -> Result<Mode, BectStatus> {
    match code {
        0 => Ok(Mode::A),
        1 => Ok(Mode::B),
        _ => {
            set_error("mode must be 0 (a) or 1 (b)");
            Err(BectStatus::InvalidArgument)
        }
    }
}

/// Evaluate the kernel `F_xy(q)`; writes real and imaginary parts.
///
/// # Safety
/// `kernel` must be a live handle; `q` must point to three doubles;
/// `out_re`/`out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bect_kernel_eval(
    kernel: *const BectKernel,
    x: c_int,
    y: c_int,
    q: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BectStatus {
    let Some(k) = (unsafe { kernel_ref(kernel) }) else {
        return fail(BectStatus::NullPointer, "null kernel handle");
    };
    let (x, y) = match (mode_from(x), mode_from(y)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let q = match unsafe { momentum_from(k, q) } {
        Ok(q) => q,
        Err(s) => return s,
    };
    let v = k.eval(x, y, &q);
    let s = unsafe { write_out(out_re, v.re) };
    if s != BectStatus::Ok {
        return s;
    }
    unsafe { write_out(out_im, v.im) }
}

/// Fringe-peak momentum of the kernel (2 k0 or 2 k0(t)) as three doubles.
///
/// # Safety
/// `kernel` must be a live handle; `out` must point to three doubles.
#[no_mangle]
pub unsafe extern "C" fn bect_kernel_fringe_momentum(
    kernel: *const BectKernel,
    out: *mut f64,
) -> BectStatus {
    let Some(k) = (unsafe { kernel_ref(kernel) }) else {
        return fail(BectStatus::NullPointer, "null kernel handle");
    };
    if out.is_null() {
        return fail(BectStatus::NullPointer, "null out pointer");
    }
    let c = k.fringe_momentum().as_components();
    unsafe { std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&c) };
    BectStatus::Ok
}

/// Mode overlap of the kernel (exp(-alpha^2) for Gaussians, 0 for plane
/// waves).
///
/// # Safety
/// `kernel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bect_kernel_overlap(
    kernel: *const BectKernel,
    out: *mut f64,
) -> BectStatus {
    let Some(k) = (unsafe { kernel_ref(kernel) }) else {
        return fail(BectStatus::NullPointer, "null kernel handle");
    };
    let v = match k {
        ModeKernel::PlaneWave(_) => 0.0,
        ModeKernel::Gaussian(m) => m.orthogonality_report(),
    };
    unsafe { write_out(out, v) }
}

fn spec_from(particles: u64, dim: u64) -> Result<SubspaceSpec, BectStatus> {
    SubspaceSpec::new(particles, dim).map_err(|e| {
        set_error(&e.to_string());
        BectStatus::InvalidArgument
    })
}

type OneMomentumFn = fn(&SubspaceSpec, &ModeKernel, &Momentum) -> bect_core::Result<f64>;
type TwoMomentaFn = fn(&SubspaceSpec, &ModeKernel, &Momentum, &Momentum) -> bect_core::Result<f64>;

unsafe fn call_one(
    kernel: *const BectKernel,
    particles: u64,
    dim: u64,
    q: *const f64,
    out: *mut f64,
    f: OneMomentumFn,
) -> BectStatus {
    let Some(k) = (unsafe { kernel_ref(kernel) }) else {
        return fail(BectStatus::NullPointer, "null kernel handle");
    };
    let spec = match spec_from(particles, dim) {
        Ok(s) => s,
        Err(s) => return s,
    };
    let q = match unsafe { momentum_from(k, q) } {
        Ok(q) => q,
        Err(s) => return s,
    };
    match f(&spec, k, &q) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => fail_core(e),
    }
}

unsafe fn call_two(
    kernel: *const BectKernel,
    particles: u64,
    dim: u64,
    q: *const f64,
    q2: *const f64,
    out: *mut f64,
    f: TwoMomentaFn,
) -> BectStatus {
    let Some(k) = (unsafe { kernel_ref(kernel) }) else {
        return fail(BectStatus::NullPointer, "null kernel handle");
    };
    let spec = match spec_from(particles, dim) {
        Ok(s) => s,
        Err(s) => return s,
    };
    let q = match unsafe { momentum_from(k, q) } {
        Ok(q) => q,
        Err(s) => return s,
    };
    let q2 = match unsafe { momentum_from(k, q2) } {
        Ok(q) => q,
        Err(s) => return s,
    };
    match f(&spec, k, &q, &q2) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => fail_core(e),
    }
}

/// Exact ensemble mean of R(q) over the uniform window ensemble.
///
/// # Safety
/// `kernel` must be a live handle; `q` must point to three doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn bect_exact_mean_r(
    kernel: *const BectKernel,
    particles: u64,
    dim: u64,
    q: *const f64,
    out: *mut f64,
) -> BectStatus {
    unsafe { call_one(kernel, particles, dim, q, out, wick::exact_mean_big_r) }
}

/// Exact run-to-run covariance of the expectation value of R.
///
/// # Safety
/// `kernel` must be a live handle; `q`/`q2` must point to three doubles
/// each; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bect_exact_ensemble_cov(
    kernel: *const BectKernel,
    particles: u64,
    dim: u64,
    q: *const f64,
    q2: *const f64,
    out: *mut f64,
) -> BectStatus {
    unsafe { call_two(kernel, particles, dim, q, q2, out, wick::exact_ensemble_cov) }
}

/// Exact window average of the within-state quantum covariance of R.
///
/// # Safety
/// `kernel` must be a live handle; `q`/`q2` must point to three doubles
/// each; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bect_exact_quantum_cov_avg(
    kernel: *const BectKernel,
    particles: u64,
    dim: u64,
    q: *const f64,
    q2: *const f64,
    out: *mut f64,
) -> BectStatus {
    unsafe { call_two(kernel, particles, dim, q, q2, out, wick::exact_quantum_cov_avg) }
}

fn closed_mean(spec: &SubspaceSpec, k: &ModeKernel, q: &Momentum) -> bect_core::Result<f64> {
    k.check_momentum(q)?;
    Ok(analytics::mean_big_r_closed(spec, k, q))
}

fn closed_ens(
    spec: &SubspaceSpec,
    k: &ModeKernel,
    q: &Momentum,
    q2: &Momentum,
) -> bect_core::Result<f64> {
    k.check_momentum(q)?;
    k.check_momentum(q2)?;
    Ok(analytics::ensemble_cov_closed(spec, k, q, q2).total())
}

fn closed_qvar(
    spec: &SubspaceSpec,
    k: &ModeKernel,
    q: &Momentum,
    q2: &Momentum,
) -> bect_core::Result<f64> {
    k.check_momentum(q)?;
    k.check_momentum(q2)?;
    Ok(analytics::quantum_cov_closed(spec, k, q, q2))
}

/// Closed-form ensemble mean of R(q).
///
/// # Safety
/// `kernel` must be a live handle; `q` must point to three doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn bect_closed_mean_r(
    kernel: *const BectKernel,
    particles: u64,
    dim: u64,
    q: *const f64,
    out: *mut f64,
) -> BectStatus {
    unsafe { call_one(kernel, particles, dim, q, out, closed_mean) }
}

/// Closed-form ensemble covariance (order-N^2 truncation).
///
/// # Safety
/// `kernel` must be a live handle; `q`/`q2` must point to three doubles
/// each; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bect_closed_ensemble_cov(
    kernel: *const BectKernel,
    particles: u64,
    dim: u64,
    q: *const f64,
    q2: *const f64,
    out: *mut f64,
) -> BectStatus {
    unsafe { call_two(kernel, particles, dim, q, q2, out, closed_ens) }
}

/// Closed-form averaged quantum covariance (order-N^2 truncation).
///
/// # Safety
/// `kernel` must be a live handle; `q`/`q2` must point to three doubles
/// each; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bect_closed_quantum_cov_avg(
    kernel: *const BectKernel,
    particles: u64,
    dim: u64,
    q: *const f64,
    q2: *const f64,
    out: *mut f64,
) -> BectStatus {
    unsafe { call_two(kernel, particles, dim, q, q2, out, closed_qvar) }
}

/// The seven window moment sums S20, S11, S40, S31, S22, S30, S21 into a
/// caller buffer of length >= 7. `closed` selects the closed forms,
/// otherwise direct summation.
///
/// # Safety
/// `out` must point to at least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bect_sums(
    particles: u64,
    dim: u64,
    closed: c_int,
    out: *mut f64,
    len: usize,
) -> BectStatus {
    if out.is_null() {
        return fail(BectStatus::NullPointer, "null out pointer");
    }
    if len < 7 {
        return fail(BectStatus::BufferTooSmall, "sums buffer needs 7 slots");
    }
    let spec = match spec_from(particles, dim) {
        Ok(s) => s,
        Err(s) => return s,
    };
    let record = if closed != 0 {
        analytics::s_sums_closed(&spec)
    } else {
        analytics::s_sums_exact(&spec)
    };
    let values = record.values_f64();
    unsafe { std::slice::from_raw_parts_mut(out, 7).copy_from_slice(&values) };
    BectStatus::Ok
}

/// Create a deterministic uniform sampler over the window sphere.
#[no_mangle]
pub extern "C" fn bect_sampler_new(
    particles: u64,
    dim: u64,
    seed: u64,
    out: *mut *mut BectSampler,
) -> BectStatus {
    match spec_from(particles, dim) {
        Ok(spec) => {
            let handle = Box::into_raw(Box::new(BectSampler {
                inner: EnsembleSampler::new(spec, seed),
            }));
            unsafe { write_out(out, handle) }
        }
        Err(s) => s,
    }
}

/// Release a sampler handle. Null is ignored.
#[no_mangle]
pub extern "C" fn bect_sampler_free(sampler: *mut BectSampler) {
    if !sampler.is_null() {
        drop(unsafe { Box::from_raw(sampler) });
    }
}

/// Draw sample `index` into a buffer of interleaved (re, im) pairs; the
/// buffer needs `2 n` doubles. Identical (seed, index) pairs produce
/// identical coefficients.
///
/// # Safety
/// `sampler` must be a live handle; `out` must point to at least `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bect_sampler_state(
    sampler: *const BectSampler,
    index: u64,
    out: *mut f64,
    len: usize,
) -> BectStatus {
    let Some(s) = (unsafe { sampler.as_ref() }) else {
        return fail(BectStatus::NullPointer, "null sampler handle");
    };
    if out.is_null() {
        return fail(BectStatus::NullPointer, "null out pointer");
    }
    let n = s.inner.spec().dim() as usize;
    if len < 2 * n {
        return fail(
            BectStatus::BufferTooSmall,
            "state buffer needs 2 n doubles",
        );
    }
    let state = s.inner.state(index);
    let buf = unsafe { std::slice::from_raw_parts_mut(out, 2 * n) };
    for (i, z) in state.coeffs().iter().enumerate() {
        buf[2 * i] = z.re;
        buf[2 * i + 1] = z.im;
    }
    BectStatus::Ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;
    use std::ptr;

    fn pw_kernel() -> *mut BectKernel {
        let mut k = ptr::null_mut();
        assert_eq!(bect_kernel_plane_wave_new(1, 0, 0, &mut k), BectStatus::Ok);
        k
    }

    #[test]
    fn version_is_a_c_string() {
        let v = unsafe { CStr::from_ptr(bect_version()) };
        assert!(!v.to_str().unwrap().is_empty());
    }

    #[test]
    fn exact_mean_through_the_abi() {
        let k = pw_kernel();
        let mut out = 0.0;
        let q = [2.0, 0.0, 0.0];
        let s = unsafe { bect_exact_mean_r(k, 4, 3, q.as_ptr(), &mut out) };
        assert_eq!(s, BectStatus::Ok);
        assert!((out - 22.0 / 3.0).abs() < 1e-12);
        bect_kernel_free(k);
    }

    #[test]
    fn contraction_anchor_through_the_abi() {
        let k = pw_kernel();
        let mut out = 0.0;
        let q = [2.0, 0.0, 0.0];
        let s = unsafe { bect_exact_quantum_cov_avg(k, 2, 1, q.as_ptr(), q.as_ptr(), &mut out) };
        assert_eq!(s, BectStatus::Ok);
        assert_eq!(out, 1.0);
        bect_kernel_free(k);
    }

    #[test]
    fn invalid_spec_reports_a_message() {
        let k = pw_kernel();
        let mut out = 0.0;
        let q = [0.0; 3];
        let s = unsafe { bect_exact_mean_r(k, 5, 3, q.as_ptr(), &mut out) };
        assert_eq!(s, BectStatus::InvalidArgument);
        let msg = unsafe { CStr::from_ptr(bect_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("N must be even"));
        bect_kernel_free(k);
    }

    #[test]
    fn lattice_kernels_reject_fractional_momenta() {
        let k = pw_kernel();
        let mut out = 0.0;
        let q = [0.5, 0.0, 0.0];
        let s = unsafe { bect_exact_mean_r(k, 4, 3, q.as_ptr(), &mut out) };
        assert_eq!(s, BectStatus::MomentumKind);
        bect_kernel_free(k);
    }

    #[test]
    fn kernel_eval_matches_the_library() {
        let mut k = ptr::null_mut();
        assert_eq!(
            bect_kernel_gaussian_new(5.0, 50.0, &mut k),
            BectStatus::Ok
        );
        let q = [0.1999200319872051, 0.0, 0.0];
        let (mut re, mut im) = (0.0, 0.0);
        let s = unsafe { bect_kernel_eval(k, 1, 0, q.as_ptr(), &mut re, &mut im) };
        assert_eq!(s, BectStatus::Ok);
        let model = GaussianModel::new(5.0, 50.0).unwrap();
        let want = ModeKernel::gaussian(model).eval(Mode::B, Mode::A, &Momentum::Real(q[0]));
        assert_eq!(re, want.re);
        assert_eq!(im, want.im);
        let mut fringe = [0.0; 3];
        assert_eq!(
            unsafe { bect_kernel_fringe_momentum(k, fringe.as_mut_ptr()) },
            BectStatus::Ok
        );
        assert!((fringe[0] - 2.0 * model.k0_of_t()).abs() < 1e-15);
        bect_kernel_free(k);
    }

    #[test]
    fn sampler_round_trip_is_deterministic() {
        let mut s = ptr::null_mut();
        assert_eq!(bect_sampler_new(100, 11, 42, &mut s), BectStatus::Ok);
        let mut a = vec![0.0; 22];
        let mut b = vec![0.0; 22];
        assert_eq!(
            unsafe { bect_sampler_state(s, 7, a.as_mut_ptr(), a.len()) },
            BectStatus::Ok
        );
        assert_eq!(
            unsafe { bect_sampler_state(s, 7, b.as_mut_ptr(), b.len()) },
            BectStatus::Ok
        );
        assert_eq!(a, b);
        let norm2: f64 = a.chunks(2).map(|z| z[0] * z[0] + z[1] * z[1]).sum();
        assert!((norm2 - 1.0).abs() < 1e-12);
        let mut short = vec![0.0; 3];
        assert_eq!(
            unsafe { bect_sampler_state(s, 0, short.as_mut_ptr(), short.len()) },
            BectStatus::BufferTooSmall
        );
        bect_sampler_free(s);
    }

    #[test]
    fn sums_through_the_abi() {
        let mut out = [0.0; 7];
        assert_eq!(
            unsafe { bect_sums(4, 3, 0, out.as_mut_ptr(), out.len()) },
            BectStatus::Ok
        );
        assert!((out[0] - 8.0 / 3.0).abs() < 1e-15);
        assert!((out[1] - 10.0 / 3.0).abs() < 1e-15);
    }
}

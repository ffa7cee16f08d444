//! C ABI for the cogrelay decision pipeline.
//!
//! Every function returns a [`CrStatus`]; results come back through out
//! pointers. On failure, [`cr_last_error`] returns a message for the calling
//! thread. Handles (`CrSampleSet`, `CrDecisionMatrix`, `CrCampaign`) are
//! opaque, created by a `*_new`/`*_build`/`*_from_*` function and released
//! with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cogrelay::channel_models::{
    itu_r_pl, log_distance_pl, mean_snr_from_budget, winner2_pl, ItuRParams, LogDistanceParams, WinnerParams,
};
use cogrelay::constraints::{
    build_decision_matrix, capacity_cdf, check_cc, check_ic, interference_cdf, ConstraintConfig, DecisionMatrix,
};
use cogrelay::estimation::{fit_fading, SnrSampleSet};
use cogrelay::fading::{snr_cdf, FadingKind, SnrDist};
use cogrelay::io::{write_campaign, FileConfig};
use cogrelay::scenario::{run_campaign, run_campaign_with_threads, CampaignConfig, CampaignResult};
use cogrelay::Error;

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Degenerate = 3,
    NonConvergence = 4,
    Io = 5,
    Config = 6,
    MissingConfig = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrFadingKind {
    Rayleigh = 0,
    Nakagami = 1,
}

/// SNR law of one link. `kind` holds a `CrFadingKind` value; `m` is ignored
/// for Rayleigh.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrSnrDist {
    pub kind: u32,
    pub gamma_bar: f64,
    pub m: f64,
}

/// Constraint thresholds. Powers in dBm, capacity in bits/s/Hz.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrConstraintConfig {
    pub i_th_dbm: f64,
    pub eps_i_out: f64,
    pub c_th: f64,
    pub eps_c_out: f64,
    pub noise_power_dbm: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrFadingFit {
    pub dist: CrSnrDist,
    pub mse: f64,
    /// True when the shape estimate was raised to its minimum.
    pub clamped: bool,
}

pub struct CrSampleSet {
    inner: SnrSampleSet,
}

pub struct CrDecisionMatrix {
    inner: DecisionMatrix,
}

pub struct CrCampaign {
    config: CampaignConfig,
    result: Option<CampaignResult>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: CrStatus,
    message: String,
}

impl Failure {
    fn new(status: CrStatus, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) | Error::Parse { .. } => CrStatus::InvalidArgument,
            Error::Degenerate(_) => CrStatus::Degenerate,
            Error::NonConvergence { .. } => CrStatus::NonConvergence,
            Error::Io { .. } => CrStatus::Io,
            Error::Config(_) => CrStatus::Config,
            Error::MissingConfig(_) => CrStatus::MissingConfig,
        };
        Failure::new(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> CrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CrStatus::Ok,
        Ok(Err(failure)) => {
            set_last_error(failure.message);
            failure.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            CrStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::new(CrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(CrStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn to_kind(raw: u32) -> FfiResult<FadingKind> {
    match raw {
        0 => Ok(FadingKind::Rayleigh),
        1 => Ok(FadingKind::Nakagami),
        other => Err(Failure::new(CrStatus::InvalidArgument, format!("unknown fading kind {other}"))),
    }
}

fn to_dist(d: &CrSnrDist) -> FfiResult<SnrDist> {
    Ok(match to_kind(d.kind)? {
        FadingKind::Rayleigh => SnrDist::rayleigh(d.gamma_bar)?,
        FadingKind::Nakagami => SnrDist::nakagami(d.m, d.gamma_bar)?,
    })
}

fn from_dist(d: &SnrDist) -> CrSnrDist {
    CrSnrDist { kind: CrFadingKind::from(d.kind) as u32, gamma_bar: d.gamma_bar, m: d.m }
}

impl From<FadingKind> for CrFadingKind {
    fn from(k: FadingKind) -> Self {
        match k {
            FadingKind::Rayleigh => CrFadingKind::Rayleigh,
            FadingKind::Nakagami => CrFadingKind::Nakagami,
        }
    }
}

fn to_config(c: &CrConstraintConfig) -> FfiResult<ConstraintConfig> {
    Ok(ConstraintConfig::new(c.i_th_dbm, c.eps_i_out, c.c_th, c.eps_c_out, c.noise_power_dbm)?)
}

fn from_config(c: &ConstraintConfig) -> CrConstraintConfig {
    CrConstraintConfig {
        i_th_dbm: c.i_th,
        eps_i_out: c.eps_i_out,
        c_th: c.c_th,
        eps_c_out: c.eps_c_out,
        noise_power_dbm: c.noise_power,
    }
}

fn into_handle<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn free_handle<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message describing the last failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cr_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default thresholds: −90 dBm, 0.1, 7.5 bits/s/Hz, 0.1, −119.5 dBm.
#[no_mangle]
pub extern "C" fn cr_constraint_config_default() -> CrConstraintConfig {
    from_config(&ConstraintConfig::default())
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_log_distance_pl(pl_d0: f64, d0: f64, n: f64, d: f64, out: *mut f64) -> CrStatus {
    guard(|| put(out, log_distance_pl(&LogDistanceParams::new(pl_d0, d0, n)?, d)?))
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_itu_r_pl(f_mhz: f64, n: f64, l_floors: f64, d: f64, out: *mut f64) -> CrStatus {
    guard(|| put(out, itu_r_pl(&ItuRParams::new(f_mhz, n, l_floors)?, d)?))
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_winner2_pl(f_ghz: f64, l_w: f64, n_w: f64, d: f64, out: *mut f64) -> CrStatus {
    guard(|| put(out, winner2_pl(&WinnerParams::new(f_ghz, l_w, n_w)?, d)?))
}

/// Linear mean SNR from transmit power, path loss and noise power.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_mean_snr_from_budget(p_tx_dbm: f64, pl_db: f64, noise_dbm: f64, out: *mut f64) -> CrStatus {
    guard(|| put(out, mean_snr_from_budget(p_tx_dbm, pl_db, noise_dbm)?))
}

/// # Safety
/// `dist` must be null or point to a valid `CrSnrDist`; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_snr_cdf(dist: *const CrSnrDist, gamma: f64, out: *mut f64) -> CrStatus {
    guard(|| put(out, snr_cdf(gamma, &to_dist(deref(dist, "dist")?)?)?))
}

/// # Safety
/// As for [`cr_snr_cdf`].
#[no_mangle]
pub unsafe extern "C" fn cr_interference_cdf(
    i_th_dbm: f64,
    noise_power_dbm: f64,
    dist: *const CrSnrDist,
    out: *mut f64,
) -> CrStatus {
    guard(|| put(out, interference_cdf(i_th_dbm, noise_power_dbm, &to_dist(deref(dist, "dist")?)?)?))
}

/// # Safety
/// As for [`cr_snr_cdf`].
#[no_mangle]
pub unsafe extern "C" fn cr_capacity_cdf(c_th: f64, dist: *const CrSnrDist, out: *mut f64) -> CrStatus {
    guard(|| put(out, capacity_cdf(c_th, &to_dist(deref(dist, "dist")?)?)?))
}

/// # Safety
/// `dist` and `cfg` must be null or valid; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_check_ic(
    dist: *const CrSnrDist,
    cfg: *const CrConstraintConfig,
    out: *mut bool,
) -> CrStatus {
    guard(|| {
        let cfg = to_config(deref(cfg, "cfg")?)?;
        put(out, check_ic(&to_dist(deref(dist, "dist")?)?, &cfg)?)
    })
}

/// # Safety
/// As for [`cr_check_ic`].
#[no_mangle]
pub unsafe extern "C" fn cr_check_cc(
    dist: *const CrSnrDist,
    cfg: *const CrConstraintConfig,
    out: *mut bool,
) -> CrStatus {
    guard(|| {
        let cfg = to_config(deref(cfg, "cfg")?)?;
        put(out, check_cc(&to_dist(deref(dist, "dist")?)?, &cfg)?)
    })
}

/// Copies `len` linear SNR samples into a new sample set.
///
/// # Safety
/// `node_id` must be a NUL-terminated string, `samples` valid for `len`
/// reads, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_sample_set_new(
    node_id: *const c_char,
    samples: *const f64,
    len: usize,
    out: *mut *mut CrSampleSet,
) -> CrStatus {
    guard(|| {
        let id = string(node_id, "node_id")?;
        let xs = slice(samples, len, "samples")?.to_vec();
        let set = SnrSampleSet::new(id, xs)?;
        put(out, into_handle(CrSampleSet { inner: set }))
    })
}

/// Maximum-likelihood fit of `kind` (a `CrFadingKind` value) to the sample set.
///
/// # Safety
/// `set` must come from [`cr_sample_set_new`]; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_sample_set_fit(set: *const CrSampleSet, kind: u32, out: *mut CrFadingFit) -> CrStatus {
    guard(|| {
        let fit = fit_fading(to_kind(kind)?, &deref(set, "set")?.inner)?;
        put(out, CrFadingFit { dist: from_dist(&fit.dist), mse: fit.mse, clamped: fit.clamped })
    })
}

/// # Safety
/// `set` must be null or come from [`cr_sample_set_new`], and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cr_sample_set_free(set: *mut CrSampleSet) {
    free_handle(set)
}

/// Decision matrix of `num_pr` PR laws against `num_id` ID laws.
///
/// # Safety
/// The arrays must be valid for their lengths; `cfg` valid; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_decision_matrix_build(
    pr_dists: *const CrSnrDist,
    num_pr: usize,
    id_dists: *const CrSnrDist,
    num_id: usize,
    cfg: *const CrConstraintConfig,
    out: *mut *mut CrDecisionMatrix,
) -> CrStatus {
    guard(|| {
        let prs = slice(pr_dists, num_pr, "pr_dists")?.iter().map(to_dist).collect::<FfiResult<Vec<_>>>()?;
        let ids = slice(id_dists, num_id, "id_dists")?.iter().map(to_dist).collect::<FfiResult<Vec<_>>>()?;
        let cfg = to_config(deref(cfg, "cfg")?)?;
        let m = build_decision_matrix(&prs, &ids, &cfg)?;
        put(out, into_handle(CrDecisionMatrix { inner: m }))
    })
}

/// # Safety
/// `m` must be a live matrix handle; the out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_decision_matrix_dims(
    m: *const CrDecisionMatrix,
    num_pr: *mut usize,
    num_id: *mut usize,
) -> CrStatus {
    guard(|| {
        let m = &deref(m, "matrix")?.inner;
        put(num_pr, m.num_pr())?;
        put(num_id, m.num_id())
    })
}

/// Whether snapshot (`pr`, `id`) is enabled, both zero-based.
///
/// # Safety
/// `m` must be a live matrix handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_decision_matrix_cell(
    m: *const CrDecisionMatrix,
    pr: usize,
    id: usize,
    out: *mut bool,
) -> CrStatus {
    guard(|| {
        let m = &deref(m, "matrix")?.inner;
        if pr >= m.num_pr() || id >= m.num_id() {
            return Err(Failure::new(
                CrStatus::InvalidArgument,
                format!("cell ({pr}, {id}) outside {}x{} matrix", m.num_pr(), m.num_id()),
            ));
        }
        put(out, m.cell(pr, id))
    })
}

/// # Safety
/// `m` must be a live matrix handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_decision_matrix_enabled_count(m: *const CrDecisionMatrix, out: *mut usize) -> CrStatus {
    guard(|| put(out, deref(m, "matrix")?.inner.enabled_count()))
}

/// # Safety
/// `m` must be null or a matrix handle, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cr_decision_matrix_free(m: *mut CrDecisionMatrix) {
    free_handle(m)
}

/// Campaign on the built-in 4 PR × 5 ID layout with the given seed.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_campaign_from_preset(seed: u64, out: *mut *mut CrCampaign) -> CrStatus {
    guard(|| {
        let config = CampaignConfig { seed, ..CampaignConfig::paper_shape() };
        put(out, into_handle(CrCampaign { config, result: None }))
    })
}

/// Campaign described by a config file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_campaign_from_config(path: *const c_char, out: *mut *mut CrCampaign) -> CrStatus {
    guard(|| {
        let config = FileConfig::load(Path::new(string(path, "path")?))?.campaign_config()?;
        config.validate()?;
        put(out, into_handle(CrCampaign { config, result: None }))
    })
}

/// Runs the campaign. `threads` = 0 uses the default pool. Results do not
/// depend on the thread count.
///
/// # Safety
/// `c` must be a live campaign handle.
#[no_mangle]
pub unsafe extern "C" fn cr_campaign_run(c: *mut CrCampaign, threads: usize) -> CrStatus {
    guard(|| {
        let c = deref_mut(c, "campaign")?;
        let result =
            if threads == 0 { run_campaign(&c.config)? } else { run_campaign_with_threads(&c.config, threads)? };
        c.result = Some(result);
        Ok(())
    })
}

fn ran(c: &CrCampaign) -> FfiResult<&CampaignResult> {
    c.result.as_ref().ok_or_else(|| Failure::new(CrStatus::InvalidArgument, "campaign has not been run"))
}

/// Copy of the decision matrix of a finished run; free it separately.
///
/// # Safety
/// `c` must be a live campaign handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cr_campaign_matrix(c: *const CrCampaign, out: *mut *mut CrDecisionMatrix) -> CrStatus {
    guard(|| {
        let m = ran(deref(c, "campaign")?)?.matrix.clone();
        put(out, into_handle(CrDecisionMatrix { inner: m }))
    })
}

/// Writes the run's CSV files into `dir`, plus samples.csv when `with_samples`.
///
/// # Safety
/// `c` must be a live campaign handle; `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cr_campaign_write(c: *const CrCampaign, dir: *const c_char, with_samples: bool) -> CrStatus {
    guard(|| {
        let c = deref(c, "campaign")?;
        let dir = string(dir, "dir")?;
        Ok(write_campaign(Path::new(dir), &c.config, ran(c)?, with_samples)?)
    })
}

/// # Safety
/// `c` must be null or a campaign handle, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cr_campaign_free(c: *mut CrCampaign) {
    free_handle(c)
}

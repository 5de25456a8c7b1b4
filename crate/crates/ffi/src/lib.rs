// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! C ABI over `pwfriend`.
//!
//! Every fallible function returns a [`PwfStatus`]. On failure the message is
//! kept per thread and can be fetched with [`pwf_last_error`]. Histories are
//! opaque handles created by [`pwf_history_new`] and released with
//! [`pwf_history_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pwfriend::conditions::{def2a_residuals, def2a_solve_ratios, nondisturbance_check, Branch, WignerFriendParams};
use pwfriend::histories::{decoherence_functional, HistoryFamily};
use pwfriend::history::{HistoryState, PointerExtension};
use pwfriend::rules::{evaluate, Rule};
use pwfriend::scenarios::{regress, WignerFriendOptions, WignerFriendSetup};
use pwfriend::tables::{eval_table, TableId};
use pwfriend::Error;

/// Status codes. `PWF_STATUS_OK` is zero; the rest mirror the library's error kinds.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PwfStatus {
    Ok = 0,
    NullPointer = 1,
    /// An enum value or index passed in is out of range.
    InvalidArgument = 2,
    /// A Rust panic was caught at the boundary.
    Panic = 3,
    DimensionMismatch = 10,
    FactorMismatch = 11,
    NonFinite = 12,
    NotProjector = 13,
    NotUnitary = 14,
    NotHermitian = 15,
    NotNormalized = 16,
    UnorderedSchedule = 17,
    AtEventTime = 18,
    TimeOrder = 19,
    NullCondition = 20,
    Unsupported = 21,
    Degenerate = 22,
    InvalidParams = 23,
    OutOfFamily = 24,
}

impl From<&Error> for PwfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch(_) => PwfStatus::DimensionMismatch,
            Error::FactorMismatch(_) => PwfStatus::FactorMismatch,
            Error::NonFinite => PwfStatus::NonFinite,
            Error::NotProjector(_) => PwfStatus::NotProjector,
            Error::NotUnitary(_) => PwfStatus::NotUnitary,
            Error::NotHermitian(_) => PwfStatus::NotHermitian,
            Error::NotNormalized(_) => PwfStatus::NotNormalized,
            Error::UnorderedSchedule => PwfStatus::UnorderedSchedule,
            Error::AtEventTime(_) => PwfStatus::AtEventTime,
            Error::TimeOrder(_) => PwfStatus::TimeOrder,
            Error::NullCondition(_) => PwfStatus::NullCondition,
            Error::Unsupported(_) => PwfStatus::Unsupported,
            Error::Degenerate(_) => PwfStatus::Degenerate,
            Error::InvalidParams(_) => PwfStatus::InvalidParams,
            Error::OutOfFamily(_) => PwfStatus::OutOfFamily,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PwfRule {
    Collapse = 0,
    UnitaryNormalized = 1,
    OneTimeUnitary = 2,
    UnitaryConsistent = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PwfExtension {
    CyclicShift = 0,
    Transposition = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PwfBranch {
    None = 0,
    Plus = 1,
    Minus = 2,
    Nd1 = 3,
    Nd2 = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PwfTableId {
    Collapse = 0,
    Normalized = 1,
    OneTime = 2,
    NonDisturbing = 3,
    NormalizedRatio = 4,
    Candidates = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PwfComplex {
    pub re: f64,
    pub im: f64,
}

/// Scenario parameters. Phases in radians, times on the clock.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PwfParams {
    pub a: f64,
    pub b: f64,
    pub phi_s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub phi_sf: f64,
    pub t_f: f64,
    pub t_1: f64,
    pub t_w: f64,
    pub t_2: f64,
}

/// Rule value with its diagnostics. Diagnostics a rule does not produce are NaN.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PwfRuleResult {
    pub value: PwfComplex,
    pub raw: PwfComplex,
    pub valid: bool,
    pub imag: f64,
    pub negativity: f64,
    pub excess: f64,
    pub commutator: f64,
    pub norm_cond: f64,
    pub norm_complement: f64,
}

/// Closed-form table, entries `[f * 2 + w]`. `*_defined[k]` is false where the
/// entry conditions on a null event or the table has no reversed block.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PwfTable {
    pub forward: [PwfComplex; 4],
    pub forward_defined: [bool; 4],
    pub reversed: [PwfComplex; 4],
    pub reversed_defined: [bool; 4],
    pub has_reversed: bool,
    pub branch: PwfBranch,
}

/// Decoherence functional of the four two-time histories, row-major over
/// outcomes `(f, w)` in the order (up, yes), (up, no), (down, yes), (down, no).
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PwfDecoherence {
    pub matrix: [PwfComplex; 16],
    pub consistent: bool,
    pub weakly_consistent: bool,
    pub max_off_diagonal: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PwfRatioRoots {
    pub b_over_a_plus: f64,
    pub b_over_a_minus: f64,
    pub a_over_b_plus: f64,
    pub a_over_b_minus: f64,
}

/// Opaque history handle.
pub struct PwfHistory {
    setup: WignerFriendSetup,
    history: HistoryState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PwfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(PwfStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PwfStatus::NullPointer, format!("{what} is null"))
}

fn bad(msg: impl Into<String>) -> Failure {
    Failure(PwfStatus::InvalidArgument, msg.into())
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PwfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PwfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside pwfriend".into());
            PwfStatus::Panic
        }
    }
}

fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller promises `p` is null or valid for reads.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the caller's contract, valid for writes.
    unsafe { p.write(v) };
    Ok(())
}

fn to_params(p: &PwfParams) -> Result<WignerFriendParams, Failure> {
    Ok(WignerFriendParams::new(p.a, p.b, p.phi_s, p.alpha, p.beta, p.phi_sf)?.with_times(p.t_f, p.t_1, p.t_w, p.t_2)?)
}

fn from_params(p: &WignerFriendParams) -> PwfParams {
    PwfParams {
        a: p.a,
        b: p.b,
        phi_s: p.phi_s,
        alpha: p.alpha,
        beta: p.beta,
        phi_sf: p.phi_sf,
        t_f: p.t_f.value(),
        t_1: p.t_1.value(),
        t_w: p.t_w.value(),
        t_2: p.t_2.value(),
    }
}

fn cplx(z: num_complex::Complex64) -> PwfComplex {
    PwfComplex { re: z.re, im: z.im }
}

fn branch_out(b: Option<Branch>) -> PwfBranch {
    match b {
        None => PwfBranch::None,
        Some(Branch::Plus) => PwfBranch::Plus,
        Some(Branch::Minus) => PwfBranch::Minus,
        Some(Branch::Nd1) => PwfBranch::Nd1,
        Some(Branch::Nd2) => PwfBranch::Nd2,
    }
}

// Enum arguments arrive as plain integers: an out-of-range value from C must
// be rejected, not transmuted.
fn rule_in(v: u32) -> Result<Rule, Failure> {
    Ok(match v {
        x if x == PwfRule::Collapse as u32 => Rule::Collapse,
        x if x == PwfRule::UnitaryNormalized as u32 => Rule::UnitaryNormalized,
        x if x == PwfRule::OneTimeUnitary as u32 => Rule::OneTimeUnitary,
        x if x == PwfRule::UnitaryConsistent as u32 => Rule::UnitaryConsistent,
        _ => return Err(bad(format!("unknown rule {v}"))),
    })
}

fn extension_in(v: u32) -> Result<PointerExtension, Failure> {
    Ok(match v {
        x if x == PwfExtension::CyclicShift as u32 => PointerExtension::CyclicShift,
        x if x == PwfExtension::Transposition as u32 => PointerExtension::Transposition,
        _ => return Err(bad(format!("unknown pointer extension {v}"))),
    })
}

fn branch_in(v: u32) -> Result<Option<Branch>, Failure> {
    Ok(match v {
        x if x == PwfBranch::None as u32 => None,
        x if x == PwfBranch::Plus as u32 => Some(Branch::Plus),
        x if x == PwfBranch::Minus as u32 => Some(Branch::Minus),
        x if x == PwfBranch::Nd1 as u32 => Some(Branch::Nd1),
        x if x == PwfBranch::Nd2 as u32 => Some(Branch::Nd2),
        _ => return Err(bad(format!("unknown branch {v}"))),
    })
}

fn table_in(v: u32) -> Result<TableId, Failure> {
    const IDS: [(PwfTableId, TableId); 6] = [
        (PwfTableId::Collapse, TableId::Collapse),
        (PwfTableId::Normalized, TableId::Normalized),
        (PwfTableId::OneTime, TableId::OneTime),
        (PwfTableId::NonDisturbing, TableId::NonDisturbing),
        (PwfTableId::NormalizedRatio, TableId::NormalizedRatio),
        (PwfTableId::Candidates, TableId::Candidates),
    ];
    IDS.iter().find(|(c, _)| *c as u32 == v).map(|(_, t)| *t).ok_or_else(|| bad(format!("unknown table {v}")))
}

fn outcome(k: u32, what: &str) -> Result<usize, Failure> {
    if k < 2 {
        Ok(k as usize)
    } else {
        Err(bad(format!("{what} must be 0 or 1, got {k}")))
    }
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length plus one, or 0 if no
/// error has been recorded. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn pwf_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap);
            // SAFETY: `buf` is valid for `cap >= n` bytes.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n - 1) = 0;
            }
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pwf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Generic reference point: a = 0.9, α = β = 1/√2, zero phases, times 0, 1, 2, 3.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pwf_params_generic(out: *mut PwfParams) -> PwfStatus {
    guard(|| write(out, from_params(&WignerFriendParams::canonical_generic()), "out"))
}

/// Non-disturbing point for `branch` (a `PwfBranch`, ND1 or ND2).
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pwf_params_non_disturbing(alpha: f64, beta: f64, branch: u32, out: *mut PwfParams) -> PwfStatus {
    guard(|| {
        let b = match branch_in(branch)? {
            Some(b @ (Branch::Nd1 | Branch::Nd2)) => b,
            _ => return Err(bad(format!("branch {branch} is not a non-disturbing branch"))),
        };
        write(out, from_params(&WignerFriendParams::non_disturbing(alpha, beta, b)?), "out")
    })
}

/// Builds the history state of the Wigner's-friend setup. `extension` is a
/// `PwfExtension`.
///
/// # Safety
/// `params` must be null or point to a valid `PwfParams`; `out` must be null or
/// valid for writes. The handle written to `*out` is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn pwf_history_new(params: *const PwfParams, extension: u32, out: *mut *mut PwfHistory) -> PwfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = to_params(deref(params, "params")?)?;
        let extension = extension_in(extension)?;
        let setup = WignerFriendSetup::with_options(&p, WignerFriendOptions { extension, yes_projector: None })?;
        let history = setup.history()?;
        write(out, Box::into_raw(Box::new(PwfHistory { setup, history })), "out")
    })
}

/// Releases a handle from [`pwf_history_new`]. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pwf_history_free(h: *mut PwfHistory) {
    if !h.is_null() {
        // SAFETY: created by `Box::into_raw` in `pwf_history_new`.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Evaluates `rule` (a `PwfRule`) for Friend outcome `f` at `t_1` and Wigner outcome `w` at
/// `t_2`. Forward is `P(w | f)`; `reversed` gives `P(f | w)`.
/// Conditioning on a null event returns `PWF_STATUS_NULL_CONDITION`.
///
/// # Safety
/// `h` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pwf_history_eval(
    h: *const PwfHistory,
    rule: u32,
    f: u32,
    w: u32,
    reversed: bool,
    tol: f64,
    out: *mut PwfRuleResult,
) -> PwfStatus {
    guard(|| {
        let h = deref(h, "history")?;
        if tol.is_nan() || tol <= 0.0 {
            return Err(bad("tol must be positive"));
        }
        let rule = rule_in(rule)?;
        let p = h.setup.params();
        let fe = h.setup.friend_event(outcome(f, "f")?, p.t_1);
        let we = h.setup.wigner_event(outcome(w, "w")?, p.t_2);
        let r = if reversed { evaluate(rule, &h.history, &we, &fe, tol)? } else { evaluate(rule, &h.history, &fe, &we, tol)? };
        let d = |name: &str| r.diagnostic(name).unwrap_or(f64::NAN);
        write(
            out,
            PwfRuleResult {
                value: cplx(r.value),
                raw: cplx(r.raw),
                valid: r.valid,
                imag: d("imag"),
                negativity: d("negativity"),
                excess: d("excess"),
                commutator: d("commutator"),
                norm_cond: d("norm_cond"),
                norm_complement: d("norm_complement"),
            },
            "out",
        )
    })
}

/// Decoherence functional of the two-time family, starting one unit before `t_F`.
///
/// # Safety
/// `h` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pwf_history_decoherence(h: *const PwfHistory, tol: f64, out: *mut PwfDecoherence) -> PwfStatus {
    guard(|| {
        let h = deref(h, "history")?;
        let family = HistoryFamily::wigner_friend(&h.setup, &h.history)?;
        let d = decoherence_functional(&family, &h.history, tol)?;
        let mut matrix = [PwfComplex::default(); 16];
        for (i, row) in d.matrix.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                matrix[i * 4 + j] = cplx(*z);
            }
        }
        write(
            out,
            PwfDecoherence {
                matrix,
                consistent: d.consistent,
                weakly_consistent: d.weakly_consistent,
                max_off_diagonal: d.max_off_diagonal(),
            },
            "out",
        )
    })
}

/// Normalization residuals `r1`, `r2` of the two-time unitary rule and whether
/// both vanish within `tol`.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn pwf_def2a_residuals(params: *const PwfParams, tol: f64, r1: *mut f64, r2: *mut f64, satisfied: *mut bool) -> PwfStatus {
    guard(|| {
        let rep = def2a_residuals(&to_params(deref(params, "params")?)?, tol)?;
        write(r1, rep.residual("r1").unwrap_or(f64::NAN), "r1")?;
        write(r2, rep.residual("r2").unwrap_or(f64::NAN), "r2")?;
        write(satisfied, rep.satisfied, "satisfied")
    })
}

/// Roots of the normalization conditions for `b/a` and `a/b`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pwf_solve_ratios(alpha: f64, beta: f64, phi: f64, out: *mut PwfRatioRoots) -> PwfStatus {
    guard(|| {
        let r = def2a_solve_ratios(alpha, beta, phi)?;
        write(
            out,
            PwfRatioRoots {
                b_over_a_plus: r.b_over_a.0,
                b_over_a_minus: r.b_over_a.1,
                a_over_b_plus: r.a_over_b.0,
                a_over_b_minus: r.a_over_b.1,
            },
            "out",
        )
    })
}

/// Distance to the nearest non-disturbing point and the matching branch
/// (`PWF_BRANCH_NONE` when farther than `tol`).
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn pwf_nondisturbance(params: *const PwfParams, tol: f64, distance: *mut f64, branch: *mut PwfBranch) -> PwfStatus {
    guard(|| {
        let rep = nondisturbance_check(&to_params(deref(params, "params")?)?, tol);
        write(distance, rep.max_residual(), "distance")?;
        write(branch, branch_out(rep.branch), "branch")
    })
}

/// Closed-form table `id` (a `PwfTableId`) at `params`. `branch` (a
/// `PwfBranch`) selects the normalized
/// table's root (`PWF_BRANCH_NONE` picks the one matching the parameters).
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn pwf_eval_table(id: u32, params: *const PwfParams, branch: u32, out: *mut PwfTable) -> PwfStatus {
    guard(|| {
        let t = eval_table(table_in(id)?, &to_params(deref(params, "params")?)?, branch_in(branch)?)?;
        let mut table = PwfTable {
            forward: [PwfComplex::default(); 4],
            forward_defined: [false; 4],
            reversed: [PwfComplex::default(); 4],
            reversed_defined: [false; 4],
            has_reversed: t.reversed.is_some(),
            branch: branch_out(t.branch),
        };
        for f in 0..2 {
            for w in 0..2 {
                if let Some(z) = t.forward[f][w] {
                    table.forward[f * 2 + w] = cplx(z);
                    table.forward_defined[f * 2 + w] = true;
                }
                if let Some(z) = t.reversed.and_then(|r| r[f][w]) {
                    table.reversed[f * 2 + w] = cplx(z);
                    table.reversed_defined[f * 2 + w] = true;
                }
            }
        }
        write(out, table, "out")
    })
}

/// Largest deviation of any rule from the textbook two-time probability over
/// `trials` random experiments without friends.
///
/// # Safety
/// `worst` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pwf_regress(seed: u64, trials: usize, worst: *mut f64) -> PwfStatus {
    guard(|| write(worst, regress(seed, trials)?.worst(), "worst"))
}

// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

use std::ffi::CStr;
use std::ptr;

use pwfriend_ffi::*;

fn last_error() -> String {
    let n = unsafe { pwf_last_error(ptr::null_mut(), 0) };
    let mut buf = vec![0 as std::ffi::c_char; n];
    unsafe { pwf_last_error(buf.as_mut_ptr(), n) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn generic() -> PwfParams {
    let mut p = std::mem::MaybeUninit::<PwfParams>::uninit();
    assert_eq!(unsafe { pwf_params_generic(p.as_mut_ptr()) }, PwfStatus::Ok);
    unsafe { p.assume_init() }
}

fn history(p: &PwfParams, ext: PwfExtension) -> *mut PwfHistory {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pwf_history_new(p, ext as u32, &mut h) }, PwfStatus::Ok, "{}", last_error());
    assert!(!h.is_null());
    h
}

fn eval(h: *const PwfHistory, rule: PwfRule, f: u32, w: u32, reversed: bool) -> (PwfStatus, PwfRuleResult) {
    let mut r = PwfRuleResult {
        value: PwfComplex::default(),
        raw: PwfComplex::default(),
        valid: false,
        imag: 0.0,
        negativity: 0.0,
        excess: 0.0,
        commutator: 0.0,
        norm_cond: 0.0,
        norm_complement: 0.0,
    };
    let s = unsafe { pwf_history_eval(h, rule as u32, f, w, reversed, 1e-9, &mut r) };
    (s, r)
}

#[test]
fn rule_values_through_the_abi() {
    let p = generic();
    assert!((p.a - 0.9).abs() < 1e-15);
    let h = history(&p, PwfExtension::CyclicShift);
    let (s, r) = eval(h, PwfRule::OneTimeUnitary, 0, 0, false);
    assert_eq!(s, PwfStatus::Ok);
    assert!((r.raw.re - (p.a + p.b).powi(2) / 2.0).abs() < 1e-12);
    assert!(r.commutator.is_nan());

    let (s, r) = eval(h, PwfRule::UnitaryConsistent, 1, 1, false);
    assert_eq!(s, PwfStatus::Ok);
    assert!(!r.valid && r.negativity > 0.0 && r.commutator.is_finite());

    let (s, _) = eval(h, PwfRule::UnitaryNormalized, 0, 0, true);
    assert_eq!(s, PwfStatus::Unsupported);
    assert!(last_error().contains("normalized"));
    unsafe { pwf_history_free(h) };
}

#[test]
fn null_conditions_and_bad_arguments() {
    let mut p = std::mem::MaybeUninit::<PwfParams>::uninit();
    assert_eq!(unsafe { pwf_params_non_disturbing(0.6, 0.8, PwfBranch::Nd1 as u32, p.as_mut_ptr()) }, PwfStatus::Ok);
    let p = unsafe { p.assume_init() };
    let h = history(&p, PwfExtension::Transposition);
    let (s, _) = eval(h, PwfRule::Collapse, 0, 1, true);
    assert_eq!(s, PwfStatus::NullCondition);
    let (s, r) = eval(h, PwfRule::UnitaryConsistent, 1, 0, false);
    assert_eq!(s, PwfStatus::Ok);
    assert!(r.valid && (r.value.re - 1.0).abs() < 1e-10);

    assert_eq!(eval(h, PwfRule::Collapse, 2, 0, false).0, PwfStatus::InvalidArgument);
    let mut r = std::mem::MaybeUninit::<PwfRuleResult>::uninit();
    assert_eq!(unsafe { pwf_history_eval(h, 99, 0, 0, false, 1e-9, r.as_mut_ptr()) }, PwfStatus::InvalidArgument);
    assert!(last_error().contains("unknown rule"));
    assert_eq!(unsafe { pwf_history_eval(h, 0, 0, 0, false, 1e-9, ptr::null_mut()) }, PwfStatus::NullPointer);
    assert_eq!(unsafe { pwf_history_eval(ptr::null(), 0, 0, 0, false, 1e-9, r.as_mut_ptr()) }, PwfStatus::NullPointer);
    unsafe { pwf_history_free(h) };
    unsafe { pwf_history_free(ptr::null_mut()) };

    let mut out = ptr::null_mut();
    let bad = PwfParams { a: 0.6, b: 0.6, ..generic() };
    assert_eq!(unsafe { pwf_history_new(&bad, 0, &mut out) }, PwfStatus::InvalidParams, "{}", last_error());
    assert!(out.is_null());
    assert_eq!(unsafe { pwf_history_new(&generic(), 7, &mut out) }, PwfStatus::InvalidArgument);
}

#[test]
fn decoherence_functional_of_counterexample() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let p = PwfParams { a: s, b: s, phi_s: std::f64::consts::FRAC_PI_2, alpha: 0.6, beta: 0.8, phi_sf: 0.0, ..generic() };
    let h = history(&p, PwfExtension::CyclicShift);
    let mut d = std::mem::MaybeUninit::<PwfDecoherence>::uninit();
    assert_eq!(unsafe { pwf_history_decoherence(h, 1e-10, d.as_mut_ptr()) }, PwfStatus::Ok, "{}", last_error());
    let d = unsafe { d.assume_init() };
    assert!(d.weakly_consistent && !d.consistent);
    assert!((d.max_off_diagonal - 0.24).abs() < 1e-10);
    let z = d.matrix[1];
    assert!(z.re.abs() < 1e-10 && (z.im.abs() - 0.24).abs() < 1e-10);
    unsafe { pwf_history_free(h) };
}

#[test]
fn conditions_roots_tables_and_regression() {
    let mut roots = std::mem::MaybeUninit::<PwfRatioRoots>::uninit();
    assert_eq!(unsafe { pwf_solve_ratios(0.6, 0.8, 0.0, roots.as_mut_ptr()) }, PwfStatus::Ok);
    let roots = unsafe { roots.assume_init() };
    assert!((roots.b_over_a_plus - 4.0 / 3.0).abs() < 1e-12 && (roots.b_over_a_minus + 0.75).abs() < 1e-12);
    let mut spare = roots;
    assert_eq!(unsafe { pwf_solve_ratios(1.0, 0.0, 0.0, &mut spare) }, PwfStatus::Degenerate);

    let p = generic();
    let (mut r1, mut r2, mut ok) = (0.0, 0.0, true);
    assert_eq!(unsafe { pwf_def2a_residuals(&p, 1e-9, &mut r1, &mut r2, &mut ok) }, PwfStatus::Ok);
    assert!(!ok && (r1 + 0.382_716_049_382_715_75).abs() < 1e-12);

    let (mut dist, mut branch) = (0.0, PwfBranch::Plus);
    let nd = PwfParams { a: 0.8, b: 0.6, alpha: 0.6, beta: 0.8, phi_s: std::f64::consts::PI, phi_sf: 0.0, ..p };
    assert_eq!(unsafe { pwf_nondisturbance(&nd, 1e-9, &mut dist, &mut branch) }, PwfStatus::Ok);
    assert_eq!(branch, PwfBranch::Nd2);
    assert_eq!(unsafe { pwf_nondisturbance(&p, 1e-9, &mut dist, &mut branch) }, PwfStatus::Ok);
    assert_eq!(branch, PwfBranch::None);
    assert!(dist > 0.1);

    let mut t = std::mem::MaybeUninit::<PwfTable>::uninit();
    assert_eq!(unsafe { pwf_eval_table(PwfTableId::Candidates as u32, &p, 0, t.as_mut_ptr()) }, PwfStatus::Ok);
    let t = unsafe { t.assume_init() };
    assert!(t.has_reversed && t.forward_defined.iter().all(|&d| d));
    for f in 0..2 {
        let sum = t.forward[2 * f].re + t.forward[2 * f + 1].re;
        assert!((sum - 1.0).abs() < 1e-12);
    }
    let mut t = std::mem::MaybeUninit::<PwfTable>::uninit();
    assert_eq!(unsafe { pwf_eval_table(PwfTableId::NonDisturbing as u32, &nd, 0, t.as_mut_ptr()) }, PwfStatus::Ok);
    let t = unsafe { t.assume_init() };
    assert_eq!(t.branch, PwfBranch::Nd2);
    assert!(!t.reversed_defined[0] && t.reversed_defined[1]);
    assert_eq!(unsafe { pwf_eval_table(6, &p, 0, ptr::null_mut()) }, PwfStatus::InvalidArgument);

    let mut worst = f64::NAN;
    assert_eq!(unsafe { pwf_regress(3, 4, &mut worst) }, PwfStatus::Ok);
    assert!(worst < 1e-10);
    let v = unsafe { CStr::from_ptr(pwf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}


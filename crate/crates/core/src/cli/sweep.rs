// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps classifying where each rule gives probabilities.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::input::{InputError, KeyValues, Range};
use crate::conditions::{def2a_residuals, nondisturbance_check, WignerFriendParams};
use crate::error::{Error, Result};
use crate::histories::{decoherence_functional, HistoryFamily};
use crate::linalg::C64;
use crate::rules::{evaluate, Rule};
use crate::scenarios::WignerFriendSetup;
use crate::tol;

pub const SPEC_KEYS: [&str; 7] = ["alpha", "phi", "a", "a_over_alpha", "phi_SF", "out", "tol"];

/// Column layout of the sweep CSV, shown in `--help`.
pub const CSV_COLUMNS_HELP: &str = "\
CSV columns, in order:
  alpha,beta,a,b,phi,phi_S,phi_SF
  def1_fwd_<f>_<w>, def1_rev_<f>_<w>        collapse rule, P(w|f) then P(f|w)
  def2a_fwd_<f>_<w>                         normalized two-time unitary rule, P(w|f)
  def2b_fwd_<f>_<w>, def2b_rev_<f>_<w>      one-time unitary rule
  def3_fwd_<f>_<w>_re/_im, def3_rev_<f>_<w>_re/_im
                                            consistency-rule candidates (complex)
  def2a_normalized,def3_valid,nondisturbance,consistent,weakly_consistent,rules_coincide
                                            flags, 0 or 1
  r1,r2,commutator,nd_distance,offdiag,offdiag_re
                                            residuals
(f,w) pairs run up_yes, up_no, down_yes, down_no. Entries conditioned on a
null event are NaN. Rows are ordered by alpha, then phi, then a.";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AmplitudeAxis {
    Direct(Range),
    RatioToAlpha(Range),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub alpha: Range,
    pub phi: Range,
    pub amplitude: AmplitudeAxis,
    pub phi_sf: f64,
    pub out: Option<String>,
    pub tol: f64,
}

fn partner(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).sqrt()
}

impl SweepSpec {
    pub fn parse(kv: &KeyValues) -> std::result::Result<Self, InputError> {
        kv.restrict(&SPEC_KEYS)?;
        let alpha = kv.range("alpha")?.ok_or_else(|| InputError("missing required key 'alpha'".into()))?;
        let phi = kv.range("phi")?.unwrap_or(Range::single(0.0));
        let amplitude = match (kv.range("a")?, kv.range("a_over_alpha")?) {
            (Some(r), None) => AmplitudeAxis::Direct(r),
            (None, Some(r)) => AmplitudeAxis::RatioToAlpha(r),
            _ => return Err(InputError("exactly one of 'a' and 'a_over_alpha' must be given".into())),
        };
        let phi_sf = kv.number("phi_SF")?.unwrap_or(0.0);
        let tol = kv.number("tol")?.unwrap_or(tol::OPERATOR);
        if tol <= 0.0 {
            return Err(InputError(format!("line {}: tol must be positive", kv.line("tol").unwrap_or(0))));
        }
        let spec = Self { alpha, phi, amplitude, phi_sf, out: kv.raw("out").map(str::to_string), tol };
        spec.check_domain()?;
        Ok(spec)
    }

    fn check_domain(&self) -> std::result::Result<(), InputError> {
        let unit = |name: &str, r: &Range| {
            if r.min < 0.0 || r.max > 1.0 {
                Err(InputError(format!("{name} range [{}, {}] leaves [0, 1]", r.min, r.max)))
            } else {
                Ok(())
            }
        };
        unit("alpha", &self.alpha)?;
        match &self.amplitude {
            AmplitudeAxis::Direct(r) => unit("a", r)?,
            AmplitudeAxis::RatioToAlpha(r) => {
                if r.min < 0.0 || r.max * self.alpha.max > 1.0 + tol::PARAM_NORM {
                    return Err(InputError(format!(
                        "a_over_alpha up to {} with alpha up to {} gives a > 1",
                        r.max, self.alpha.max
                    )));
                }
            }
        }
        Ok(())
    }

    /// Grid points in row order.
    pub fn points(&self) -> Result<Vec<WignerFriendParams>> {
        let mut out = Vec::new();
        for al in self.alpha.values() {
            for phi in self.phi.values() {
                let amps = match &self.amplitude {
                    AmplitudeAxis::Direct(r) => r.values(),
                    AmplitudeAxis::RatioToAlpha(r) => r.values().into_iter().map(|x| (x * al).min(1.0)).collect(),
                };
                for a in amps {
                    out.push(WignerFriendParams::new(a, partner(a), phi + self.phi_sf, al, partner(al), self.phi_sf)?);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub def2a_normalized: bool,
    pub def3_valid: bool,
    pub nondisturbance: bool,
    pub consistent: bool,
    pub weakly_consistent: bool,
    pub rules_coincide: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals {
    pub r1: f64,
    pub r2: f64,
    /// Max commutation residual over the four outcome pairs.
    pub commutator: f64,
    pub nd_distance: f64,
    pub offdiag: f64,
    pub offdiag_re: f64,
}

/// Everything the sweep reports about one parameter point. Rule arrays are
/// in `(f, w)` order up_yes, up_no, down_yes, down_no.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionRecord {
    pub params: WignerFriendParams,
    pub def1_fwd: [f64; 4],
    pub def1_rev: [f64; 4],
    pub def2a_fwd: [f64; 4],
    pub def2b_fwd: [f64; 4],
    pub def2b_rev: [f64; 4],
    pub def3_fwd: [C64; 4],
    pub def3_rev: [C64; 4],
    pub flags: Flags,
    pub residuals: Residuals,
}

const PAIRS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];
const PAIR_NAMES: [&str; 4] = ["up_yes", "up_no", "down_yes", "down_no"];

fn nan_c() -> C64 {
    C64::new(f64::NAN, f64::NAN)
}

/// Agreement of two tables, with undefined entries required in the same places.
fn agree(x: &[f64; 4], y: &[f64; 4], tol: f64) -> bool {
    x.iter().zip(y).all(|(a, b)| (a.is_nan() && b.is_nan()) || (a - b).abs() < tol)
}

pub fn record_point(p: &WignerFriendParams, tol: f64) -> Result<RegionRecord> {
    let setup = WignerFriendSetup::new(p)?;
    let h = setup.history()?;
    let mut fwd = [[nan_c(); 4]; 4];
    let mut rev = [[nan_c(); 4]; 4];
    let mut valid = [[None; 4]; 4];
    let mut commutator: f64 = 0.0;
    for (k, &(f, w)) in PAIRS.iter().enumerate() {
        let fe = setup.friend_event(f, p.t_1);
        let we = setup.wigner_event(w, p.t_2);
        for (ri, rule) in Rule::ALL.into_iter().enumerate() {
            match evaluate(rule, &h, &fe, &we, tol) {
                Ok(v) => {
                    fwd[ri][k] = v.raw;
                    valid[ri][k] = Some(v.valid);
                    if let Some(c) = v.diagnostic("commutator") {
                        commutator = commutator.max(c);
                    }
                }
                Err(Error::NullCondition(_)) => {}
                Err(e) => return Err(e),
            }
            if rule == Rule::UnitaryNormalized {
                continue;
            }
            match evaluate(rule, &h, &we, &fe, tol) {
                Ok(v) => rev[ri][k] = v.raw,
                Err(Error::NullCondition(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let re = |row: &[C64; 4]| row.map(|z| z.re);
    let all_valid = |ri: usize| valid[ri].iter().flatten().all(|&v| v) && valid[ri].iter().any(Option::is_some);
    let (r1, r2) = match def2a_residuals(p, tol) {
        Ok(rep) => (rep.residual("r1").unwrap_or(f64::NAN), rep.residual("r2").unwrap_or(f64::NAN)),
        Err(Error::Degenerate(_)) => (f64::NAN, f64::NAN),
        Err(e) => return Err(e),
    };
    let nd = nondisturbance_check(p, tol);
    let family = HistoryFamily::wigner_friend(&setup, &h)?;
    let dec = decoherence_functional(&family, &h, tol)?;
    let (def1_fwd, def2a_fwd, def2b_fwd) = (re(&fwd[0]), re(&fwd[1]), re(&fwd[2]));
    let flags = Flags {
        def2a_normalized: all_valid(1),
        def3_valid: all_valid(3),
        nondisturbance: nd.satisfied,
        consistent: dec.consistent,
        weakly_consistent: dec.weakly_consistent,
        rules_coincide: agree(&def1_fwd, &def2a_fwd, tol) && agree(&def1_fwd, &def2b_fwd, tol) && agree(&def2a_fwd, &def2b_fwd, tol),
    };
    Ok(RegionRecord {
        params: *p,
        def1_fwd,
        def1_rev: re(&rev[0]),
        def2a_fwd,
        def2b_fwd,
        def2b_rev: re(&rev[2]),
        def3_fwd: fwd[3],
        def3_rev: rev[3],
        flags,
        residuals: Residuals {
            r1,
            r2,
            commutator,
            nd_distance: nd.max_residual(),
            offdiag: dec.max_off_diagonal(),
            offdiag_re: dec.max_off_diagonal_real(),
        },
    })
}

pub fn csv_header() -> String {
    let mut cols: Vec<String> = ["alpha", "beta", "a", "b", "phi", "phi_S", "phi_SF"].iter().map(|s| s.to_string()).collect();
    for prefix in ["def1_fwd", "def1_rev", "def2a_fwd", "def2b_fwd", "def2b_rev"] {
        cols.extend(PAIR_NAMES.iter().map(|p| format!("{prefix}_{p}")));
    }
    for prefix in ["def3_fwd", "def3_rev"] {
        for p in PAIR_NAMES {
            cols.push(format!("{prefix}_{p}_re"));
            cols.push(format!("{prefix}_{p}_im"));
        }
    }
    cols.extend(
        ["def2a_normalized", "def3_valid", "nondisturbance", "consistent", "weakly_consistent", "rules_coincide"]
            .iter()
            .map(|s| s.to_string()),
    );
    cols.extend(["r1", "r2", "commutator", "nd_distance", "offdiag", "offdiag_re"].iter().map(|s| s.to_string()));
    cols.join(",")
}

fn num(s: &mut String, x: f64) {
    if x.is_nan() {
        s.push_str("NaN,");
    } else {
        let _ = write!(s, "{x:.16e},");
    }
}

impl RegionRecord {
    pub fn csv_row(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        for x in [p.alpha, p.beta, p.a, p.b, p.phi(), p.phi_s, p.phi_sf] {
            num(&mut s, x);
        }
        for row in [&self.def1_fwd, &self.def1_rev, &self.def2a_fwd, &self.def2b_fwd, &self.def2b_rev] {
            for &x in row {
                num(&mut s, x);
            }
        }
        for row in [&self.def3_fwd, &self.def3_rev] {
            for z in row {
                num(&mut s, z.re);
                num(&mut s, z.im);
            }
        }
        let f = &self.flags;
        for b in [f.def2a_normalized, f.def3_valid, f.nondisturbance, f.consistent, f.weakly_consistent, f.rules_coincide] {
            s.push_str(if b { "1," } else { "0," });
        }
        let r = &self.residuals;
        for x in [r.r1, r.r2, r.commutator, r.nd_distance, r.offdiag, r.offdiag_re] {
            num(&mut s, x);
        }
        s.pop();
        s
    }
}

/// Evaluates every grid point (in parallel) and returns the records in row order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<RegionRecord>> {
    let points = spec.points()?;
    points.par_iter().map(|p| record_point(p, spec.tol)).collect()
}

pub fn to_csv(records: &[RegionRecord]) -> String {
    let mut out = csv_header();
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-time conditional-probability rules on a history state.
//!
//! Every rule answers "probability of `query` given `cond`". The conditioning
//! event may be earlier or later than the query; rules without a reversed
//! form say so with [`Error::Unsupported`].

use serde::{Deserialize, Serialize};

use crate::conditions::def3_commutator_residual;
use crate::error::{Error, Result};
use crate::history::{HistoryState, TimeStamp};
use crate::linalg::{HilbertSpace, LinearOperator, C64};
use crate::tol;

/// A projective outcome read at a clock time.
#[derive(Clone, Debug)]
pub struct OutcomeEvent {
    pub label: String,
    pub time: TimeStamp,
    /// Projector on any set of factors of the history's space.
    pub projector: LinearOperator,
}

impl OutcomeEvent {
    pub fn new(label: impl Into<String>, time: TimeStamp, projector: LinearOperator) -> Result<Self> {
        projector.ensure_projector(tol::OPERATOR)?;
        Ok(Self { label: label.into(), time, projector })
    }

    /// The projector extended by the identity to `space`.
    pub fn projector_in(&self, space: &HilbertSpace) -> Result<LinearOperator> {
        self.projector.embed(space)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Projection of the conditional state at the conditioning time, then
    /// unitary transport to the query time.
    Collapse,
    /// Joint probability read at the later time, normalized by the one-time
    /// probability of the conditioning outcome at its own time.
    UnitaryNormalized,
    /// Both outcomes read from the memories at the later time.
    OneTimeUnitary,
    /// Amplitude-level rule; a probability only when the two-time history
    /// family is consistent.
    UnitaryConsistent,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::Collapse, Rule::UnitaryNormalized, Rule::OneTimeUnitary, Rule::UnitaryConsistent];

    /// Short identifier used in CSV headers and on the command line.
    pub fn code(self) -> &'static str {
        match self {
            Rule::Collapse => "def1",
            Rule::UnitaryNormalized => "def2a",
            Rule::OneTimeUnitary => "def2b",
            Rule::UnitaryConsistent => "def3",
        }
    }

    pub fn from_code(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.code() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleResult {
    pub rule: Rule,
    /// Reported value. Real-valued rules have a zero imaginary part; a valid
    /// consistency-rule value is clamped to `[0, 1]`.
    pub value: C64,
    /// Value before any clamping.
    pub raw: C64,
    pub valid: bool,
    pub diagnostics: Vec<(String, f64)>,
}

impl RuleResult {
    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `⟨φ(t)|Π|φ(t)⟩`, with the null-event guard.
fn condition_weight(h: &HistoryState, p: &LinearOperator, t: TimeStamp) -> Result<f64> {
    let phi = h.conditional_state(t)?;
    let w = p.expval(&phi)?.re;
    if w < tol::NULL_EVENT {
        return Err(Error::NullCondition(w));
    }
    Ok(w)
}

/// `‖Π^q 𝒰(t_q, t_c) Π^c φ(t_c)‖² / ⟨φ(t_c)|Π^c|φ(t_c)⟩`.
pub fn collapse(h: &HistoryState, cond: &OutcomeEvent, query: &OutcomeEvent) -> Result<RuleResult> {
    let space = h.space();
    let pc = cond.projector_in(space)?;
    let pq = query.projector_in(space)?;
    let den = condition_weight(h, &pc, cond.time)?;
    let projected = pc.apply(&h.conditional_state(cond.time)?)?;
    let moved = h.propagate(cond.time, query.time, &projected)?;
    let num = pq.apply(&moved)?.norm().powi(2);
    let raw = num / den;
    Ok(RuleResult {
        rule: Rule::Collapse,
        value: real(raw.clamp(0.0, 1.0)),
        raw: real(raw),
        valid: true,
        diagnostics: Vec::new(),
    })
}

/// `⟨φ(t_2)|Π^q Π^c|φ(t_2)⟩ / ⟨φ(t_1)|Π^c|φ(t_1)⟩` for `t_1 < t_2`.
///
/// Diagnostics `norm_cond` and `norm_complement` are the normalization
/// residuals of this rule for the conditioning outcome and for its complement:
/// `⟨φ(t_2)|Π^c|φ(t_2)⟩ / ⟨φ(t_1)|Π^c|φ(t_1)⟩ − 1` and the same ratio for
/// `1 − Π^c`. They assume the query family exhausts the state at `t_2`. The
/// complement residual is reported as zero when the complement is a null event.
pub fn unitary_normalized(h: &HistoryState, cond: &OutcomeEvent, query: &OutcomeEvent, tol: f64) -> Result<RuleResult> {
    if cond.time >= query.time {
        return Err(Error::Unsupported(
            "the normalized two-time unitary rule needs the conditioning event before the query event".into(),
        ));
    }
    let space = h.space();
    let pc = cond.projector_in(space)?;
    let pq = query.projector_in(space)?;
    let den = condition_weight(h, &pc, cond.time)?;
    let phi2 = h.conditional_state(query.time)?;
    let projected = pc.apply(&phi2)?;
    let num = pq.expval(&projected)?.re;
    let later = pc.expval(&phi2)?.re;
    let norm_cond = later / den - 1.0;
    let norm_complement = if 1.0 - den < tol::NULL_EVENT { 0.0 } else { (1.0 - later) / (1.0 - den) - 1.0 };
    let valid = norm_cond.abs() < tol && norm_complement.abs() < tol;
    let raw = num / den;
    Ok(RuleResult {
        rule: Rule::UnitaryNormalized,
        value: real(raw),
        raw: real(raw),
        valid,
        diagnostics: vec![("norm_cond".into(), norm_cond), ("norm_complement".into(), norm_complement)],
    })
}

/// `⟨φ(t)|Π^c Π^q Π^c|φ(t)⟩ / ⟨φ(t)|Π^c|φ(t)⟩` at the later of the two times.
pub fn one_time_unitary(h: &HistoryState, cond: &OutcomeEvent, query: &OutcomeEvent) -> Result<RuleResult> {
    let space = h.space();
    let pc = cond.projector_in(space)?;
    let pq = query.projector_in(space)?;
    let t = if cond.time >= query.time { cond.time } else { query.time };
    let den = condition_weight(h, &pc, t)?;
    let projected = pc.apply(&h.conditional_state(t)?)?;
    let raw = pq.expval(&projected)?.re / den;
    Ok(RuleResult {
        rule: Rule::OneTimeUnitary,
        value: real(raw.clamp(0.0, 1.0)),
        raw: real(raw),
        valid: true,
        diagnostics: Vec::new(),
    })
}

/// `⟨φ(t_q)|Π^q 𝒰(t_q, t_c) Π^c|φ(t_c)⟩ / ⟨φ(t_c)|Π^c|φ(t_c)⟩`.
///
/// Valid when the value is real, lies in `[0, 1]` and the commutation residual
/// of the pair vanishes, all within `tol`. Diagnostics: `imag`, `negativity`,
/// `excess` and `commutator`.
pub fn unitary_consistent(h: &HistoryState, cond: &OutcomeEvent, query: &OutcomeEvent, tol: f64) -> Result<RuleResult> {
    let space = h.space();
    let pc = cond.projector_in(space)?;
    let pq = query.projector_in(space)?;
    let den = condition_weight(h, &pc, cond.time)?;
    let projected = pc.apply(&h.conditional_state(cond.time)?)?;
    let moved = h.propagate(cond.time, query.time, &projected)?;
    let bra = pq.apply(&h.conditional_state(query.time)?)?;
    let raw = bra.inner(&moved)? / den;
    let commutator = def3_commutator_residual(h, cond, query)?;
    let imag = raw.im.abs();
    let negativity = (-raw.re).max(0.0);
    let excess = (raw.re - 1.0).max(0.0);
    let valid = imag < tol && negativity <= tol && excess <= tol && commutator < tol;
    let value = if valid { real(raw.re.clamp(0.0, 1.0)) } else { raw };
    Ok(RuleResult {
        rule: Rule::UnitaryConsistent,
        value,
        raw,
        valid,
        diagnostics: vec![
            ("imag".into(), imag),
            ("negativity".into(), negativity),
            ("excess".into(), excess),
            ("commutator".into(), commutator),
        ],
    })
}

pub fn evaluate(rule: Rule, h: &HistoryState, cond: &OutcomeEvent, query: &OutcomeEvent, tol: f64) -> Result<RuleResult> {
    match rule {
        Rule::Collapse => collapse(h, cond, query),
        Rule::UnitaryNormalized => unitary_normalized(h, cond, query, tol),
        Rule::OneTimeUnitary => one_time_unitary(h, cond, query),
        Rule::UnitaryConsistent => unitary_consistent(h, cond, query, tol),
    }
}

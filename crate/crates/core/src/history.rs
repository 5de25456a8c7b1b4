// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! Clock-conditioned history states.
//!
//! With a momentum clock and delta-kick interactions the history state is
//! exactly piecewise in clock time: between two interaction times the
//! conditional state only evolves under the free Hamiltonian, and at each
//! interaction time it is hit by the corresponding measurement unitary. A
//! [`HistoryState`] therefore stores the breakpoints and one anchored state
//! per region instead of a discretized clock register. Clock normalization
//! factors cancel between the numerator and the denominator of every
//! probability this crate computes, so conditional states are kept at unit norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{HilbertSpace, Label, LinearOperator, StateVector};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct TimeStamp(f64);

impl TimeStamp {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParams(format!("time {value} is not finite")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// How a measurement isometry defined on the ready sector is completed to a unitary.
///
/// Every convention agrees on states whose pointer is in the ready state, so
/// no probability computed from a ready initial state depends on the choice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointerExtension {
    /// Outcome `k` shifts the pointer basis cyclically by `k + 1`.
    #[default]
    CyclicShift,
    /// Outcome `k` swaps the ready state with pointer state `k + 1`.
    Transposition,
}

impl PointerExtension {
    fn pointer_unitary(self, space: &HilbertSpace, outcome: usize) -> Result<LinearOperator> {
        let d = space.dim();
        let target = outcome + 1;
        if target >= d {
            return Err(Error::DimensionMismatch(format!("pointer of dimension {d} cannot record outcome {outcome}")));
        }
        let mut m = LinearOperator::zero(space);
        for j in 0..d {
            let image = match self {
                PointerExtension::CyclicShift => (j + target) % d,
                PointerExtension::Transposition if j == 0 => target,
                PointerExtension::Transposition if j == target => 0,
                PointerExtension::Transposition => j,
            };
            m = m.add(&LinearOperator::ket_bra(space, image, j)?)?;
        }
        Ok(m)
    }
}

/// Unitary `Σ_k Π_k ⊗ V_k` of a von Neumann measurement recording outcome `k`
/// of the projective family `projectors` into pointer state `k + 1` of `memory`
/// (pointer state 0 is the ready state).
///
/// The projectors may act on any factors of `space` other than `memory`; the
/// family must be complete on the factors it acts on.
pub fn von_neumann_unitary(
    space: &HilbertSpace,
    projectors: &[LinearOperator],
    memory: Label,
    extension: PointerExtension,
) -> Result<LinearOperator> {
    let mdim = space
        .factor_dim(memory)
        .ok_or_else(|| Error::FactorMismatch(format!("memory {memory} not in {space}")))?;
    let mspace = HilbertSpace::elementary(memory, mdim)?;
    let first = projectors.first().ok_or_else(|| Error::InvalidParams("empty projector family".into()))?;
    if first.space().position(memory).is_some() {
        return Err(Error::FactorMismatch(format!("measured projectors act on the memory {memory}")));
    }
    let mut sum = LinearOperator::zero(first.space());
    for p in projectors {
        p.ensure_projector(tol::OPERATOR)?;
        sum = sum.add(p)?;
    }
    let completeness = sum.max_abs_diff(&LinearOperator::identity(first.space()))?;
    if completeness >= tol::OPERATOR {
        return Err(Error::InvalidParams(format!("projector family is not complete (residual {completeness:.3e})")));
    }
    let mut u = LinearOperator::zero(space);
    for (k, p) in projectors.iter().enumerate() {
        let v = extension.pointer_unitary(&mspace, k)?;
        u = u.add(&p.tensor(&v)?.embed(space)?)?;
    }
    u.ensure_unitary(tol::OPERATOR)?;
    Ok(u)
}

#[derive(Clone, Debug)]
pub struct Event {
    pub time: TimeStamp,
    pub unitary: LinearOperator,
    /// Memory written by this event, if it is a von Neumann measurement.
    pub memory: Option<Label>,
}

/// Interaction times with their unitaries, plus optional free evolution.
#[derive(Clone, Debug)]
pub struct EventSchedule {
    space: HilbertSpace,
    events: Vec<Event>,
    hamiltonian: Option<LinearOperator>,
    /// The Hamiltonian on its own factors; exponentiated there and then embedded.
    local_hamiltonian: Option<LinearOperator>,
    /// Clock time at which the initial state is specified.
    origin: Option<TimeStamp>,
}

impl EventSchedule {
    pub fn new(space: HilbertSpace) -> Self {
        Self { space, events: Vec::new(), hamiltonian: None, local_hamiltonian: None, origin: None }
    }

    /// Appends an event; times must be strictly increasing.
    pub fn push(&mut self, time: TimeStamp, unitary: LinearOperator, memory: Option<Label>) -> Result<()> {
        if let Some(last) = self.events.last() {
            if time <= last.time {
                return Err(Error::UnorderedSchedule);
            }
        }
        let unitary = unitary.embed(&self.space)?;
        unitary.ensure_unitary(tol::OPERATOR)?;
        if let Some(m) = memory {
            if self.space.position(m).is_none() {
                return Err(Error::FactorMismatch(format!("memory {m} not in {}", self.space)));
            }
        }
        self.events.push(Event { time, unitary, memory });
        Ok(())
    }

    pub fn with_event(mut self, time: TimeStamp, unitary: LinearOperator, memory: Option<Label>) -> Result<Self> {
        self.push(time, unitary, memory)?;
        Ok(self)
    }

    /// Free Hamiltonian acting between events; `origin` is the clock time at
    /// which the initial state of the history is given.
    pub fn with_hamiltonian(mut self, hamiltonian: LinearOperator, origin: TimeStamp) -> Result<Self> {
        let h = hamiltonian.embed(&self.space)?;
        let r = h.hermiticity_residual();
        if r >= tol::OPERATOR {
            return Err(Error::NotHermitian(r));
        }
        self.hamiltonian = Some(h);
        self.local_hamiltonian = Some(hamiltonian);
        self.origin = Some(origin);
        Ok(self)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn hamiltonian(&self) -> Option<&LinearOperator> {
        self.hamiltonian.as_ref()
    }

    pub fn breakpoints(&self) -> Vec<TimeStamp> {
        self.events.iter().map(|e| e.time).collect()
    }

    fn free(&self, dt: f64) -> Result<LinearOperator> {
        match &self.local_hamiltonian {
            Some(h) if dt != 0.0 => h.evolve(dt)?.embed(&self.space),
            _ => Ok(LinearOperator::identity(&self.space)),
        }
    }
}

/// Piecewise representation of a history state.
///
/// `anchors[k]` is the conditional state in region `k` (after `k` events) at
/// clock time `anchor_times[k]`; inside the region it only evolves freely.
#[derive(Clone, Debug)]
pub struct HistoryState {
    schedule: EventSchedule,
    initial: StateVector,
    anchors: Vec<StateVector>,
    anchor_times: Vec<f64>,
}

/// Builds the history state generated by `schedule` from `initial`.
pub fn build_history(initial: StateVector, schedule: EventSchedule) -> Result<HistoryState> {
    HistoryState::build(initial, schedule)
}

impl HistoryState {
    pub fn build(initial: StateVector, schedule: EventSchedule) -> Result<Self> {
        if initial.space() != schedule.space() {
            return Err(Error::FactorMismatch(format!("initial state on {} but schedule on {}", initial.space(), schedule.space())));
        }
        let n = initial.norm();
        if (n - 1.0).abs() >= tol::NORM {
            return Err(Error::NotNormalized(n));
        }
        for e in &schedule.events {
            if let Some(m) = e.memory {
                check_ready(&initial, m)?;
            }
        }
        let origin = match (schedule.origin, schedule.events.first()) {
            (Some(o), Some(first)) if o >= first.time => {
                return Err(Error::TimeOrder(format!(
                    "initial state given at {} but the first event is at {}",
                    o.value(),
                    first.time.value()
                )))
            }
            (Some(o), _) => o.value(),
            (None, Some(first)) => first.time.value(),
            (None, None) => 0.0,
        };
        let mut anchors = vec![initial.clone()];
        let mut anchor_times = vec![origin];
        for e in &schedule.events {
            let prev = anchors.last().expect("at least one anchor");
            let t_prev = *anchor_times.last().expect("at least one anchor time");
            let evolved = schedule.free(e.time.value() - t_prev)?.apply(prev)?;
            anchors.push(e.unitary.apply(&evolved)?);
            anchor_times.push(e.time.value());
        }
        Ok(Self { schedule, initial, anchors, anchor_times })
    }

    pub fn schedule(&self) -> &EventSchedule {
        &self.schedule
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn space(&self) -> &HilbertSpace {
        self.schedule.space()
    }

    /// Number of events strictly before `t`; rejects event times.
    pub fn region(&self, t: TimeStamp) -> Result<usize> {
        let tv = t.value();
        let mut k = 0;
        for e in &self.schedule.events {
            let te = e.time.value();
            if (tv - te).abs() <= 1e-12 * te.abs().max(1.0) {
                return Err(Error::AtEventTime(tv));
            }
            if te < tv {
                k += 1;
            }
        }
        Ok(k)
    }

    /// Conditional state of system and memories when the clock reads `t`.
    pub fn conditional_state(&self, t: TimeStamp) -> Result<StateVector> {
        let k = self.region(t)?;
        self.schedule.free(t.value() - self.anchor_times[k])?.apply(&self.anchors[k])
    }

    /// Evolution map `𝒰(t2, t1)` carrying conditional states from `t1` to `t2 > t1`.
    pub fn evolution_map(&self, t1: TimeStamp, t2: TimeStamp) -> Result<LinearOperator> {
        if t2 <= t1 {
            return Err(Error::TimeOrder(format!("evolution map needs t1 < t2, got {} and {}", t1.value(), t2.value())));
        }
        let k1 = self.region(t1)?;
        let k2 = self.region(t2)?;
        let mut u = LinearOperator::identity(self.space());
        let mut now = t1.value();
        for e in &self.schedule.events[k1..k2] {
            u = self.schedule.free(e.time.value() - now)?.matmul(&u)?;
            u = e.unitary.matmul(&u)?;
            now = e.time.value();
        }
        self.schedule.free(t2.value() - now)?.matmul(&u)
    }

    /// Map from `from` to `to` in either direction; the backward map is the adjoint.
    pub fn transport(&self, from: TimeStamp, to: TimeStamp) -> Result<LinearOperator> {
        if from == to {
            self.region(from)?;
            Ok(LinearOperator::identity(self.space()))
        } else if from < to {
            self.evolution_map(from, to)
        } else {
            Ok(self.evolution_map(to, from)?.adjoint())
        }
    }

    /// `transport(from, to)` applied to `v`, without forming the operator.
    pub fn propagate(&self, from: TimeStamp, to: TimeStamp, v: &StateVector) -> Result<StateVector> {
        let k1 = self.region(from)?;
        let k2 = self.region(to)?;
        if v.space() != self.space() {
            return Err(Error::FactorMismatch(format!("vector on {} but history on {}", v.space(), self.space())));
        }
        let mut out = v.clone();
        if from <= to {
            let mut now = from.value();
            for e in &self.schedule.events[k1..k2] {
                out = e.unitary.apply(&self.schedule.free(e.time.value() - now)?.apply(&out)?)?;
                now = e.time.value();
            }
            self.schedule.free(to.value() - now)?.apply(&out)
        } else {
            let mut now = from.value();
            for e in self.schedule.events[k2..k1].iter().rev() {
                out = e.unitary.adjoint().apply(&self.schedule.free(e.time.value() - now)?.apply(&out)?)?;
                now = e.time.value();
            }
            self.schedule.free(to.value() - now)?.apply(&out)
        }
    }

    /// Born probability of the projector `p` when the clock reads `t`.
    pub fn one_time_prob(&self, t: TimeStamp, p: &LinearOperator) -> Result<f64> {
        let p = p.embed(self.space())?;
        p.ensure_projector(tol::OPERATOR)?;
        let phi = self.conditional_state(t)?;
        Ok(p.expval(&phi)?.re.clamp(0.0, 1.0))
    }
}

/// Rejects states whose `memory` factor has weight outside the ready state.
fn check_ready(state: &StateVector, memory: Label) -> Result<()> {
    let space = state.space();
    let mdim = space.factor_dim(memory).unwrap_or(1);
    let ready = StateVector::basis(&HilbertSpace::elementary(memory, mdim)?, 0)?.projector();
    let weight = ready.embed(space)?.expval(state)?.re;
    if (weight - 1.0).abs() >= tol::NORM {
        return Err(Error::InvalidParams(format!("memory {memory} is not in its ready state (weight {weight})")));
    }
    Ok(())
}

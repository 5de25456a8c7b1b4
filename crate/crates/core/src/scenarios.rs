// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! The Wigner's-friend experiment and the plain two-measurement experiment.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::conditions::WignerFriendParams;
use crate::error::{Error, Result};
use crate::history::{build_history, von_neumann_unitary, EventSchedule, HistoryState, PointerExtension, TimeStamp};
use crate::linalg::{reduced_state, trace_distance, HilbertSpace, Label, LinearOperator, StateVector, C64};
use crate::rules::{evaluate, OutcomeEvent, Rule};
use crate::tol;

/// `S(2) ⊗ F(3) ⊗ W(3)`; memory basis `{R, ↑/yes, ↓/no}`.
pub fn wigner_friend_space() -> HilbertSpace {
    HilbertSpace::composite(&[(Label::S, 2), (Label::F, 3), (Label::W, 3)]).expect("fixed dimensions")
}

fn system_friend_space() -> HilbertSpace {
    HilbertSpace::composite(&[(Label::S, 2), (Label::F, 3)]).expect("fixed dimensions")
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Measurement choices that do not change any probability computed from a
/// ready initial state, plus an optional replacement for Wigner's basis.
#[derive(Clone, Debug, Default)]
pub struct WignerFriendOptions {
    pub extension: PointerExtension,
    /// Projector on `S ⊗ F` replacing `|yes⟩⟨yes|`; "no" is its complement.
    /// Closed-form tables do not describe such setups.
    pub yes_projector: Option<LinearOperator>,
}

#[derive(Clone, Debug)]
pub struct WignerFriendSetup {
    params: WignerFriendParams,
    options: WignerFriendOptions,
    yes: LinearOperator,
}

impl WignerFriendSetup {
    pub fn new(p: &WignerFriendParams) -> Result<Self> {
        Self::with_options(p, WignerFriendOptions::default())
    }

    pub fn with_options(p: &WignerFriendParams, options: WignerFriendOptions) -> Result<Self> {
        p.validate()?;
        let yes = match &options.yes_projector {
            Some(y) => {
                if y.space() != &system_friend_space() {
                    return Err(Error::FactorMismatch(format!("Wigner projector on {}, expected S(2)⊗F(3)", y.space())));
                }
                y.ensure_projector(tol::OPERATOR)?;
                y.clone()
            }
            None => {
                let sf = system_friend_space();
                let mut amps = vec![C64::new(0.0, 0.0); 6];
                amps[1] = c(p.alpha, 0.0);
                amps[5] = C64::from_polar(p.beta, p.phi_sf);
                StateVector::new(sf, amps)?.projector()
            }
        };
        Ok(Self { params: *p, options, yes })
    }

    pub fn params(&self) -> &WignerFriendParams {
        &self.params
    }

    /// True when Wigner measures the standard `{yes, no}` basis.
    pub fn is_standard(&self) -> bool {
        self.options.yes_projector.is_none()
    }

    pub fn space(&self) -> HilbertSpace {
        wigner_friend_space()
    }

    /// Flat index of `|s⟩|f⟩|w⟩`.
    pub fn index(&self, s: usize, f: usize, w: usize) -> usize {
        (s * 3 + f) * 3 + w
    }

    pub fn system_state(&self) -> StateVector {
        let p = &self.params;
        let s = HilbertSpace::elementary(Label::S, 2).expect("fixed dimension");
        StateVector::new(s, vec![c(p.a, 0.0), C64::from_polar(p.b, p.phi_s)]).expect("finite amplitudes")
    }

    pub fn initial_state(&self) -> StateVector {
        let p = &self.params;
        let mut amps = vec![C64::new(0.0, 0.0); 18];
        amps[self.index(0, 0, 0)] = c(p.a, 0.0);
        amps[self.index(1, 0, 0)] = C64::from_polar(p.b, p.phi_s);
        StateVector::new(wigner_friend_space(), amps).expect("finite amplitudes")
    }

    /// `|k⟩⟨k|` on S, `k = 0` for ↑.
    pub fn system_projector(&self, k: usize) -> LinearOperator {
        let s = HilbertSpace::elementary(Label::S, 2).expect("fixed dimension");
        LinearOperator::ket_bra(&s, k, k).expect("outcome 0 or 1")
    }

    /// Wigner's "yes" projector on `S ⊗ F`.
    pub fn yes_projector(&self) -> &LinearOperator {
        &self.yes
    }

    pub fn no_projector(&self) -> LinearOperator {
        LinearOperator::identity(self.yes.space()).sub(&self.yes).expect("same space")
    }

    /// Friend's memory reads outcome `k` (0: ↑, 1: ↓).
    ///
    /// # Panics
    /// If `k > 1`.
    pub fn friend_record(&self, k: usize) -> LinearOperator {
        record(Label::F, k)
    }

    /// Wigner's memory reads outcome `k` (0: yes, 1: no).
    ///
    /// # Panics
    /// If `k > 1`.
    pub fn wigner_record(&self, k: usize) -> LinearOperator {
        record(Label::W, k)
    }

    pub fn friend_event(&self, k: usize, time: TimeStamp) -> OutcomeEvent {
        let label = if k == 0 { "F=up" } else { "F=down" };
        OutcomeEvent::new(label, time, self.friend_record(k)).expect("memory projector")
    }

    pub fn wigner_event(&self, k: usize, time: TimeStamp) -> OutcomeEvent {
        let label = if k == 0 { "W=yes" } else { "W=no" };
        OutcomeEvent::new(label, time, self.wigner_record(k)).expect("memory projector")
    }

    pub fn history(&self) -> Result<HistoryState> {
        let space = wigner_friend_space();
        let ext = self.options.extension;
        let friend = von_neumann_unitary(&space, &[self.system_projector(0), self.system_projector(1)], Label::F, ext)?;
        let wigner = von_neumann_unitary(&space, &[self.yes.clone(), self.no_projector()], Label::W, ext)?;
        let schedule = EventSchedule::new(space)
            .with_event(self.params.t_f, friend, Some(Label::F))?
            .with_event(self.params.t_w, wigner, Some(Label::W))?;
        build_history(self.initial_state(), schedule)
    }

    /// Trace distance between the Friend memory's reduced states at `t_1` and `t_2`.
    pub fn friend_memory_disturbance(&self, h: &HistoryState) -> Result<f64> {
        let before = reduced_state(&h.conditional_state(self.params.t_1)?, Label::F)?;
        let after = reduced_state(&h.conditional_state(self.params.t_2)?, Label::F)?;
        trace_distance(&before, &after)
    }
}

fn record(memory: Label, k: usize) -> LinearOperator {
    assert!(k < 2, "binary outcome index {k} out of range");
    let m = HilbertSpace::elementary(memory, 3).expect("fixed dimension");
    LinearOperator::ket_bra(&m, k + 1, k + 1).expect("in range")
}

/// History state of the Wigner's-friend experiment with no free dynamics.
pub fn build_wigner_friend(p: &WignerFriendParams) -> Result<HistoryState> {
    WignerFriendSetup::new(p)?.history()
}

pub fn build_wigner_friend_with(p: &WignerFriendParams, options: WignerFriendOptions) -> Result<HistoryState> {
    WignerFriendSetup::with_options(p, options)?.history()
}

/// Two successive measurements of a single system, recorded in memories M and N.
#[derive(Clone, Debug)]
pub struct NonWignerParams {
    /// System state at `t_0`.
    pub initial: StateVector,
    /// Free Hamiltonian on S.
    pub hamiltonian: LinearOperator,
    pub m_family: Vec<LinearOperator>,
    pub n_family: Vec<LinearOperator>,
    pub t_0: TimeStamp,
    pub t_m: TimeStamp,
    /// Readout time of the first record, between the two measurements.
    pub t_1: TimeStamp,
    pub t_n: TimeStamp,
    /// Readout time of the second record.
    pub t_2: TimeStamp,
}

impl NonWignerParams {
    pub fn validate(&self) -> Result<()> {
        let s = self.initial.space();
        if s.factors().len() != 1 || s.factors()[0].label != Label::S {
            return Err(Error::FactorMismatch(format!("initial state on {s}, expected a single S factor")));
        }
        let n = self.initial.norm();
        if (n - 1.0).abs() >= tol::NORM {
            return Err(Error::NotNormalized(n));
        }
        if self.hamiltonian.space() != s {
            return Err(Error::FactorMismatch(format!("Hamiltonian on {}, expected {s}", self.hamiltonian.space())));
        }
        let r = self.hamiltonian.hermiticity_residual();
        if r >= tol::OPERATOR {
            return Err(Error::NotHermitian(r));
        }
        for fam in [&self.m_family, &self.n_family] {
            if fam.is_empty() {
                return Err(Error::InvalidParams("empty measurement family".into()));
            }
            let mut sum = LinearOperator::zero(s);
            for p in fam {
                if p.space() != s {
                    return Err(Error::FactorMismatch(format!("projector on {}, expected {s}", p.space())));
                }
                p.ensure_projector(tol::OPERATOR)?;
                sum = sum.add(p)?;
            }
            let res = sum.max_abs_diff(&LinearOperator::identity(s))?;
            if res >= tol::OPERATOR {
                return Err(Error::InvalidParams(format!("measurement family is not complete (residual {res:.3e})")));
            }
        }
        let t = [self.t_0, self.t_m, self.t_1, self.t_n, self.t_2];
        if t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams("times must satisfy t_0 < t_M < t_1 < t_N < t_2".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    /// Random instance on a `dim`-dimensional system: GUE-like Hamiltonian,
    /// Haar-random rank-one bases and initial state, random ordered times.
    pub fn random<R: Rng>(rng: &mut R, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParams("system dimension must be at least 2".into()));
        }
        let s = HilbertSpace::elementary(Label::S, dim)?;
        let g = ginibre(rng, dim);
        let hamiltonian = LinearOperator::new(s.clone(), (&g + g.adjoint()).scale(0.5))?;
        let basis = |rng: &mut R| -> Result<Vec<LinearOperator>> {
            let u = haar_unitary(rng, dim);
            (0..dim)
                .map(|k| {
                    let col: Vec<C64> = u.column(k).iter().copied().collect();
                    Ok(StateVector::new(s.clone(), col)?.projector())
                })
                .collect()
        };
        let m_family = basis(rng)?;
        let n_family = basis(rng)?;
        let amps: Vec<C64> = (0..dim).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let initial = StateVector::new(s, amps)?.normalized()?;
        let mut t = 0.0;
        let mut times = [TimeStamp::new(0.0)?; 5];
        for slot in times.iter_mut() {
            *slot = TimeStamp::new(t)?;
            t += rng.random_range(0.1..1.0);
        }
        let p = Self {
            initial,
            hamiltonian,
            m_family,
            n_family,
            t_0: times[0],
            t_m: times[1],
            t_1: times[2],
            t_n: times[3],
            t_2: times[4],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::composite(&[(Label::S, self.dim()), (Label::M, self.m_family.len() + 1), (Label::N, self.n_family.len() + 1)])
    }

    /// Record of outcome `k` in memory M, read at `t_1`.
    pub fn m_event(&self, k: usize) -> Result<OutcomeEvent> {
        self.memory_event(Label::M, self.m_family.len(), k, self.t_1)
    }

    /// Record of outcome `k` in memory N, read at `t_2`.
    pub fn n_event(&self, k: usize) -> Result<OutcomeEvent> {
        self.memory_event(Label::N, self.n_family.len(), k, self.t_2)
    }

    fn memory_event(&self, memory: Label, outcomes: usize, k: usize, time: TimeStamp) -> Result<OutcomeEvent> {
        if k >= outcomes {
            return Err(Error::OutOfFamily(format!("outcome {k} of a {outcomes}-outcome measurement")));
        }
        let m = HilbertSpace::elementary(memory, outcomes + 1)?;
        OutcomeEvent::new(format!("{memory}={k}"), time, LinearOperator::ket_bra(&m, k + 1, k + 1)?)
    }
}

/// History state of the two-measurement experiment.
pub fn build_non_wigner(p: &NonWignerParams) -> Result<HistoryState> {
    build_non_wigner_with(p, PointerExtension::default())
}

pub fn build_non_wigner_with(p: &NonWignerParams, extension: PointerExtension) -> Result<HistoryState> {
    p.validate()?;
    let space = p.space()?;
    let um = von_neumann_unitary(&space, &p.m_family, Label::M, extension)?;
    let un = von_neumann_unitary(&space, &p.n_family, Label::N, extension)?;
    let schedule = EventSchedule::new(space.clone())
        .with_hamiltonian(p.hamiltonian.clone(), p.t_0)?
        .with_event(p.t_m, um, Some(Label::M))?
        .with_event(p.t_n, un, Some(Label::N))?;
    let ready = |l: Label, d: usize| StateVector::basis(&HilbertSpace::elementary(l, d)?, 0);
    let initial = p
        .initial
        .tensor(&ready(Label::M, p.m_family.len() + 1)?)?
        .tensor(&ready(Label::N, p.n_family.len() + 1)?)?;
    build_history(initial, schedule)
}

/// Textbook two-time probability of `n` given `m`, computed on the system alone:
/// `‖Π_n U_S(t_N, t_M) Π_m ψ(t_M)‖² / ‖Π_m ψ(t_M)‖²`.
pub fn born_two_time(p: &NonWignerParams, m: usize, n: usize) -> Result<f64> {
    let pm = p.m_family.get(m).ok_or_else(|| Error::OutOfFamily(format!("m = {m}")))?;
    let pn = p.n_family.get(n).ok_or_else(|| Error::OutOfFamily(format!("n = {n}")))?;
    let psi = p.hamiltonian.evolve(p.t_m.value() - p.t_0.value())?.apply(&p.initial)?;
    let projected = pm.apply(&psi)?;
    let den = projected.norm().powi(2);
    if den < tol::NULL_EVENT {
        return Err(Error::NullCondition(den));
    }
    let u = p.hamiltonian.evolve(p.t_n.value() - p.t_m.value())?;
    Ok(pn.apply(&u.apply(&projected)?)?.norm().powi(2) / den)
}

fn ginibre<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q.
pub fn haar_unitary<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    let qr = ginibre(rng, dim).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..dim {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Largest deviations found by [`regress`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub seed: u64,
    pub trials: usize,
    /// `(rule code, max |rule − Born|)` in rule order.
    pub max_deviation: Vec<(String, f64)>,
    /// Max `|⟨φ(t_2)|Π^m|φ(t_2)⟩ − ⟨φ(t_1)|Π^m|φ(t_1)⟩|`.
    pub max_denominator_shift: f64,
    /// Outcome pairs skipped because the conditioning outcome had zero weight.
    pub skipped: usize,
}

impl RegressionReport {
    pub fn worst(&self) -> f64 {
        self.max_deviation.iter().fold(self.max_denominator_shift, |acc, (_, d)| acc.max(*d))
    }
}

/// Checks every rule against [`born_two_time`] on `trials` random instances,
/// cycling the system dimension through 2, 3, 4.
pub fn regress(seed: u64, trials: usize) -> Result<RegressionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0_f64; 4];
    let mut shift = 0.0_f64;
    let mut skipped = 0;
    for trial in 0..trials {
        let p = NonWignerParams::random(&mut rng, 2 + trial % 3)?;
        let r = regress_instance(&p)?;
        for (w, d) in worst.iter_mut().zip(r.max_deviation.iter()) {
            *w = w.max(d.1);
        }
        shift = shift.max(r.max_denominator_shift);
        skipped += r.skipped;
    }
    Ok(RegressionReport {
        seed,
        trials,
        max_deviation: Rule::ALL.iter().zip(worst).map(|(r, w)| (r.code().to_string(), w)).collect(),
        max_denominator_shift: shift,
        skipped,
    })
}

/// Deviations of every rule from the Born probability on one instance.
pub fn regress_instance(p: &NonWignerParams) -> Result<RegressionReport> {
    let h = build_non_wigner(p)?;
    let space = h.space().clone();
    let mut worst = [0.0_f64; 4];
    let mut shift = 0.0_f64;
    let mut skipped = 0;
    for m in 0..p.m_family.len() {
        let cond = p.m_event(m)?;
        let pm = cond.projector_in(&space)?;
        let w1 = pm.expval(&h.conditional_state(p.t_1)?)?.re;
        let w2 = pm.expval(&h.conditional_state(p.t_2)?)?.re;
        shift = shift.max((w1 - w2).abs());
        for n in 0..p.n_family.len() {
            let born = match born_two_time(p, m, n) {
                Ok(b) => b,
                Err(Error::NullCondition(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let query = p.n_event(n)?;
            for (k, rule) in Rule::ALL.into_iter().enumerate() {
                let v = evaluate(rule, &h, &cond, &query, tol::OPERATOR)?;
                worst[k] = worst[k].max((v.raw - c(born, 0.0)).norm());
            }
        }
    }
    Ok(RegressionReport {
        seed: 0,
        trials: 1,
        max_deviation: Rule::ALL.iter().zip(worst).map(|(r, w)| (r.code().to_string(), w)).collect(),
        max_denominator_shift: shift,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::Branch;

    #[test]
    fn wigner_friend_after_wigner_event() {
        // α = 1: yes = |↑↑⟩, so after t_W the W memory is never ready.
        let p = WignerFriendParams::new(0.6, 0.8, 0.0, 1.0, 0.0, 0.0).unwrap();
        let setup = WignerFriendSetup::new(&p).unwrap();
        let h = setup.history().unwrap();
        let phi = h.conditional_state(p.t_2).unwrap();
        for s in 0..2 {
            for f in 0..3 {
                assert!(phi.amps()[setup.index(s, f, 0)].norm() < 1e-15);
            }
        }
        assert!((phi.amps()[setup.index(0, 1, 1)].re - 0.6).abs() < 1e-15);
        assert!((phi.amps()[setup.index(1, 2, 2)].re - 0.8).abs() < 1e-15);
    }

    #[test]
    fn friend_memory_disturbance() {
        let generic = WignerFriendSetup::new(&WignerFriendParams::canonical_generic()).unwrap();
        let d = generic.friend_memory_disturbance(&generic.history().unwrap()).unwrap();
        assert!(d > 1e-6, "{d}");
        for branch in [Branch::Nd1, Branch::Nd2] {
            let s = WignerFriendSetup::new(&WignerFriendParams::non_disturbing(0.6, 0.8, branch).unwrap()).unwrap();
            let d = s.friend_memory_disturbance(&s.history().unwrap()).unwrap();
            assert!(d < 1e-10, "{branch:?} {d}");
        }
    }

    #[test]
    fn custom_wigner_projector() {
        let p = WignerFriendParams::canonical_generic();
        let sf = system_friend_space();
        // measuring the Friend's record again: never disturbs
        let yes = LinearOperator::ket_bra(&sf, 1, 1).unwrap().add(&LinearOperator::ket_bra(&sf, 4, 4).unwrap()).unwrap();
        let opts = WignerFriendOptions { yes_projector: Some(yes), ..Default::default() };
        let s = WignerFriendSetup::with_options(&p, opts).unwrap();
        assert!(!s.is_standard());
        let d = s.friend_memory_disturbance(&s.history().unwrap()).unwrap();
        assert!(d < 1e-12);
        let bad = WignerFriendOptions {
            yes_projector: Some(LinearOperator::identity(&sf).scale(c(0.5, 0.0))),
            ..Default::default()
        };
        assert!(WignerFriendSetup::with_options(&p, bad).is_err());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 2..=4 {
            let u = haar_unitary(&mut rng, d);
            let e = u.adjoint() * &u - DMatrix::<C64>::identity(d, d);
            assert!(e.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn repeated_measurement_without_dynamics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut p = NonWignerParams::random(&mut rng, 3).unwrap();
        p.hamiltonian = LinearOperator::zero(p.initial.space());
        p.n_family = p.m_family.clone();
        let h = build_non_wigner(&p).unwrap();
        for m in 0..3 {
            for n in 0..3 {
                for rule in Rule::ALL {
                    let v = evaluate(rule, &h, &p.m_event(m).unwrap(), &p.n_event(n).unwrap(), 1e-9).unwrap();
                    let expect = if m == n { 1.0 } else { 0.0 };
                    assert!((v.raw.re - expect).abs() < 1e-12 && v.raw.im.abs() < 1e-12, "{rule:?} {m}{n}");
                }
            }
        }
    }

    #[test]
    fn rank_one_born_matches_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = NonWignerParams::random(&mut rng, 2).unwrap();
        let u = p.hamiltonian.evolve(p.t_n.value() - p.t_m.value()).unwrap();
        for m in 0..2 {
            for n in 0..2 {
                // |⟨n|U|m⟩|² = tr(Π_n U Π_m U†) for rank-one projectors
                let x = p.n_family[n].matmul(&u).unwrap().matmul(&p.m_family[m]).unwrap().matmul(&u.adjoint()).unwrap();
                assert!((born_two_time(&p, m, n).unwrap() - x.trace().re).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn small_regression() {
        let r = regress(1, 6).unwrap();
        assert!(r.worst() < 1e-10, "{r:?}");
        assert_eq!(r, regress(1, 6).unwrap());
    }

    #[test]
    fn non_wigner_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut p = NonWignerParams::random(&mut rng, 2).unwrap();
        p.t_1 = p.t_n;
        assert!(p.validate().is_err());
        let mut q = NonWignerParams::random(&mut rng, 2).unwrap();
        q.m_family.pop();
        assert!(build_non_wigner(&q).is_err());
        assert!(matches!(q.n_event(7), Err(Error::OutOfFamily(_))));
    }
}

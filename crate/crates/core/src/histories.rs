// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! Chain operators and the decoherence functional of a family of histories.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::{HistoryState, TimeStamp};
use crate::linalg::{LinearOperator, StateVector, C64};
use crate::scenarios::WignerFriendSetup;
use crate::tol;

/// A pure initial state at `t0` and one projective family per later time.
///
/// Families only need to be complete on the support of the evolving state:
/// memory-record families leave out the ready outcome, which never occurs.
#[derive(Clone, Debug)]
pub struct HistoryFamily {
    initial: StateVector,
    t0: TimeStamp,
    steps: Vec<(TimeStamp, Vec<LinearOperator>)>,
}

impl HistoryFamily {
    pub fn new(initial: StateVector, t0: TimeStamp, steps: Vec<(TimeStamp, Vec<LinearOperator>)>) -> Result<Self> {
        let n = initial.norm();
        if (n - 1.0).abs() >= tol::NORM {
            return Err(Error::NotNormalized(n));
        }
        let mut prev = t0;
        for (t, fam) in &steps {
            if *t <= prev {
                return Err(Error::TimeOrder("history times must increase from t0".into()));
            }
            prev = *t;
            if fam.is_empty() {
                return Err(Error::InvalidParams("empty projector family".into()));
            }
            for p in fam {
                p.ensure_projector(tol::OPERATOR)?;
            }
        }
        let steps = steps
            .into_iter()
            .map(|(t, fam)| Ok((t, fam.iter().map(|p| p.embed(initial.space())).collect::<Result<Vec<_>>>()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { initial, t0, steps })
    }

    /// `ρ₀ = |φ(t0)⟩⟨φ(t0)|` taken from the history itself.
    pub fn from_history(h: &HistoryState, t0: TimeStamp, steps: Vec<(TimeStamp, Vec<LinearOperator>)>) -> Result<Self> {
        Self::new(h.conditional_state(t0)?, t0, steps)
    }

    /// Friend's record at `t_1` and Wigner's record at `t_2`, starting one
    /// time unit before the Friend's measurement.
    pub fn wigner_friend(setup: &WignerFriendSetup, h: &HistoryState) -> Result<Self> {
        let p = setup.params();
        let t0 = TimeStamp::new(p.t_f.value() - 1.0)?;
        Self::wigner_friend_from(setup, h, t0)
    }

    pub fn wigner_friend_from(setup: &WignerFriendSetup, h: &HistoryState, t0: TimeStamp) -> Result<Self> {
        let p = setup.params();
        Self::from_history(
            h,
            t0,
            vec![
                (p.t_1, vec![setup.friend_record(0), setup.friend_record(1)]),
                (p.t_2, vec![setup.wigner_record(0), setup.wigner_record(1)]),
            ],
        )
    }

    pub fn rho0(&self) -> LinearOperator {
        self.initial.projector()
    }

    pub fn t0(&self) -> TimeStamp {
        self.t0
    }

    pub fn times(&self) -> Vec<TimeStamp> {
        self.steps.iter().map(|(t, _)| *t).collect()
    }

    /// Every outcome tuple, lexicographic with the earliest time slowest.
    pub fn outcomes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for (_, fam) in &self.steps {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..fam.len()).map(move |k| {
                        let mut v = prefix.clone();
                        v.push(k);
                        v
                    })
                })
                .collect();
        }
        out
    }

    fn heisenberg(&self, h: &HistoryState) -> Result<Vec<Vec<LinearOperator>>> {
        self.steps
            .iter()
            .map(|(t, fam)| {
                let u = h.evolution_map(self.t0, *t)?;
                let ud = u.adjoint();
                fam.iter().map(|p| ud.matmul(p)?.matmul(&u)).collect()
            })
            .collect()
    }
}

fn chain(heis: &[Vec<LinearOperator>], i: &[usize], h: &HistoryState) -> Result<LinearOperator> {
    if i.len() != heis.len() {
        return Err(Error::OutOfFamily(format!("outcome tuple of length {} for {} times", i.len(), heis.len())));
    }
    let mut k = LinearOperator::identity(h.space());
    for (fam, &ix) in heis.iter().zip(i) {
        let p = fam.get(ix).ok_or_else(|| Error::OutOfFamily(format!("outcome {ix} of a {}-outcome family", fam.len())))?;
        k = k.matmul(p)?;
    }
    Ok(k)
}

/// `K = P_H^{i₁} ⋯ P_H^{i_n}` with Heisenberg projectors
/// `P_H = 𝒰(t_k, t0)† P 𝒰(t_k, t0)`, earliest time leftmost.
pub fn chain_operator(family: &HistoryFamily, h: &HistoryState, i: &[usize]) -> Result<LinearOperator> {
    if family.initial.space() != h.space() {
        return Err(Error::FactorMismatch("history family and history state live on different spaces".into()));
    }
    chain(&family.heisenberg(h)?, i, h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceFunctional {
    pub outcomes: Vec<Vec<usize>>,
    /// `D[i][j] = tr(K_i ρ₀ K_j†)`.
    pub matrix: Vec<Vec<C64>>,
    pub consistent: bool,
    pub weakly_consistent: bool,
}

impl DecoherenceFunctional {
    pub fn max_off_diagonal(&self) -> f64 {
        self.off_diagonal().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_off_diagonal_real(&self) -> f64 {
        self.off_diagonal().map(|z| z.re.abs()).fold(0.0, f64::max)
    }

    pub fn to_matrix(&self) -> DMatrix<C64> {
        let n = self.matrix.len();
        DMatrix::from_fn(n, n, |i, j| self.matrix[i][j])
    }

    fn off_diagonal(&self) -> impl Iterator<Item = C64> + '_ {
        self.matrix
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(move |(j, _)| *j != i).map(|(_, z)| *z))
    }
}

/// Decoherence functional with consistency verdicts at `tol`.
///
/// Fails if the families do not resolve the initial state, that is if the
/// chain operators do not sum to the identity on it.
pub fn decoherence_functional(family: &HistoryFamily, h: &HistoryState, tol: f64) -> Result<DecoherenceFunctional> {
    if family.initial.space() != h.space() {
        return Err(Error::FactorMismatch("history family and history state live on different spaces".into()));
    }
    let heis = family.heisenberg(h)?;
    let outcomes = family.outcomes();
    let branches = outcomes
        .iter()
        .map(|i| chain(&heis, i, h)?.apply(&family.initial))
        .collect::<Result<Vec<StateVector>>>()?;
    let mut total = StateVector::new(h.space().clone(), vec![C64::new(0.0, 0.0); h.space().dim()])?;
    for b in &branches {
        total = total.add(b)?;
    }
    let gap = total.max_abs_diff(&family.initial)?;
    if gap >= tol::OPERATOR {
        return Err(Error::InvalidParams(format!("projector families do not resolve the initial state (residual {gap:.3e})")));
    }
    // tr(K_i ρ₀ K_j†) = ⟨K_j ψ₀|K_i ψ₀⟩
    let matrix: Vec<Vec<C64>> = branches
        .iter()
        .map(|bi| branches.iter().map(|bj| bj.inner(bi)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut d = DecoherenceFunctional { outcomes, matrix, consistent: false, weakly_consistent: false };
    d.consistent = d.max_off_diagonal() < tol;
    d.weakly_consistent = d.max_off_diagonal_real() < tol;
    Ok(d)
}

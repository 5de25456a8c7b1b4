// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! Validity conditions for the normalized two-time unitary rule and the
//! consistency-conditioned two-time unitary rule.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::{HistoryState, TimeStamp};
use crate::linalg::{LinearOperator, StateVector};
use crate::rules::{OutcomeEvent, Rule};
use crate::tol;

/// Parameters of the Wigner's-friend setup.
///
/// The system starts in `a|↑⟩ + b e^{iφ_S}|↓⟩`; Wigner's "yes" outcome is
/// `α|↑↑⟩ + β e^{iφ_SF}|↓↓⟩` on system and Friend memory. Amplitudes are
/// non-negative; relative signs live in the phases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerFriendParams {
    pub a: f64,
    pub b: f64,
    pub phi_s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub phi_sf: f64,
    pub t_f: TimeStamp,
    pub t_w: TimeStamp,
    pub t_1: TimeStamp,
    pub t_2: TimeStamp,
}

impl WignerFriendParams {
    /// Parameters with the default schedule `t_F = 0 < t_1 = 1 < t_W = 2 < t_2 = 3`.
    pub fn new(a: f64, b: f64, phi_s: f64, alpha: f64, beta: f64, phi_sf: f64) -> Result<Self> {
        let p = Self {
            a,
            b,
            phi_s,
            alpha,
            beta,
            phi_sf,
            t_f: TimeStamp::new(0.0)?,
            t_1: TimeStamp::new(1.0)?,
            t_w: TimeStamp::new(2.0)?,
            t_2: TimeStamp::new(3.0)?,
        };
        p.validate()?;
        Ok(p)
    }

    /// Amplitudes from angles: `a = cos θ_a`, `α = cos θ_α`; relative phase `phi`
    /// carried entirely by the system state.
    pub fn from_angles(theta_a: f64, theta_alpha: f64, phi: f64) -> Result<Self> {
        Self::new(theta_a.cos(), theta_a.sin(), phi, theta_alpha.cos(), theta_alpha.sin(), 0.0)
    }

    pub fn with_times(mut self, t_f: f64, t_1: f64, t_w: f64, t_2: f64) -> Result<Self> {
        self.t_f = TimeStamp::new(t_f)?;
        self.t_1 = TimeStamp::new(t_1)?;
        self.t_w = TimeStamp::new(t_w)?;
        self.t_2 = TimeStamp::new(t_2)?;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.a, self.b, self.phi_s, self.alpha, self.beta, self.phi_sf];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.a < 0.0 || self.b < 0.0 || self.alpha < 0.0 || self.beta < 0.0 {
            return Err(Error::InvalidParams("amplitudes a, b, alpha, beta must be non-negative".into()));
        }
        let n1 = self.a * self.a + self.b * self.b;
        if (n1 - 1.0).abs() > tol::PARAM_NORM {
            return Err(Error::InvalidParams(format!("a² + b² = {n1}, expected 1")));
        }
        let n2 = self.alpha * self.alpha + self.beta * self.beta;
        if (n2 - 1.0).abs() > tol::PARAM_NORM {
            return Err(Error::InvalidParams(format!("alpha² + beta² = {n2}, expected 1")));
        }
        if !(self.t_f < self.t_1 && self.t_1 < self.t_w && self.t_w < self.t_2) {
            return Err(Error::InvalidParams("times must satisfy t_F < t_1 < t_W < t_2".into()));
        }
        Ok(())
    }

    /// Relative phase `φ_S − φ_SF`.
    pub fn phi(&self) -> f64 {
        self.phi_s - self.phi_sf
    }

    /// `a = 0.9, b = √0.19, α = β = 1/√2, φ = 0`: neither normalized nor non-disturbing.
    pub fn canonical_generic() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(0.9, 0.19_f64.sqrt(), 0.0, h, h, 0.0).expect("valid constants")
    }

    /// Uniform system state against `|yes⟩ = α|↑↑⟩ + iβ|↓↓⟩`.
    pub fn consistency_counterexample(alpha: f64, beta: f64) -> Result<Self> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(h, h, 0.0, alpha, beta, PI / 2.0)
    }

    /// Non-disturbing point for Wigner's basis `(α, β)`: the system state equals
    /// `|yes⟩` (first branch) or is orthogonal to it (second branch).
    pub fn non_disturbing(alpha: f64, beta: f64, branch: Branch) -> Result<Self> {
        match branch {
            Branch::Nd1 => Self::new(alpha, beta, 0.0, alpha, beta, 0.0),
            Branch::Nd2 => Self::new(beta, alpha, PI, alpha, beta, 0.0),
            _ => Err(Error::InvalidParams("non-disturbing branch must be ND1 or ND2".into())),
        }
    }
}

/// Which solution of a condition a parameter point matches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
    /// System state aligned with Wigner's "yes" state.
    Nd1,
    /// System state orthogonal to Wigner's "yes" state.
    Nd2,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
            Branch::Nd1 => "ND1",
            Branch::Nd2 => "ND2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub rule: Rule,
    pub satisfied: bool,
    pub residuals: Vec<(String, f64)>,
    pub branch: Option<Branch>,
}

impl ConditionReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0_f64, |acc, (_, r)| acc.max(r.abs()))
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|(n, _)| n == name).map(|(_, r)| *r)
    }
}

/// Normalization residuals of the two-time unitary rule for the two Friend
/// outcomes, from the closed-form conditions in the amplitude ratios.
pub fn def2a_residuals(p: &WignerFriendParams, tol: f64) -> Result<ConditionReport> {
    if p.a == 0.0 || p.b == 0.0 {
        return Err(Error::Degenerate("normalization conditions need a·b ≠ 0".into()));
    }
    let (al, be) = (p.alpha, p.beta);
    let c = p.phi().cos();
    let base = al.powi(4) + be.powi(4);
    let cross = 2.0 * c * (al.powi(3) * be - al * be.powi(3));
    let quad = 2.0 * al * al * be * be;
    let ba = p.b / p.a;
    let ab = p.a / p.b;
    let r1 = base + cross * ba + quad * ba * ba - 1.0;
    let r2 = base - cross * ab + quad * ab * ab - 1.0;
    let satisfied = r1.abs() < tol && r2.abs() < tol;
    let branch = if satisfied && al * be != 0.0 {
        let roots = def2a_solve_ratios(al, be, p.phi())?;
        let dp = (roots.b_over_a.0 - ba).abs();
        let dm = (roots.b_over_a.1 - ba).abs();
        Some(if dp <= dm { Branch::Plus } else { Branch::Minus })
    } else {
        None
    };
    Ok(ConditionReport {
        rule: Rule::UnitaryNormalized,
        satisfied,
        residuals: vec![("r1".into(), r1), ("r2".into(), r2)],
        branch,
    })
}

/// Roots of the two normalization quadratics, as `(plus, minus)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRoots {
    pub b_over_a: (f64, f64),
    pub a_over_b: (f64, f64),
}

impl RatioRoots {
    /// Branch pairings `(b/a branch, a/b branch)` with `(b/a)·(a/b) = 1` within `tol`.
    pub fn reciprocal_pairings(&self, tol: f64) -> Vec<(Branch, Branch)> {
        let ba = [(Branch::Plus, self.b_over_a.0), (Branch::Minus, self.b_over_a.1)];
        let ab = [(Branch::Plus, self.a_over_b.0), (Branch::Minus, self.a_over_b.1)];
        let mut out = Vec::new();
        for (bb, x) in ba {
            for (ab_branch, y) in ab {
                if (x * y - 1.0).abs() < tol {
                    out.push((bb, ab_branch));
                }
            }
        }
        out
    }
}

pub fn def2a_solve_ratios(alpha: f64, beta: f64, phi: f64) -> Result<RatioRoots> {
    if alpha * beta == 0.0 {
        return Err(Error::Degenerate("root formulas need alpha·beta ≠ 0".into()));
    }
    let d = alpha * alpha - beta * beta;
    let s = phi.sin();
    // 1 − sin²φ (α²−β²)² ≥ 0 since |α²−β²| ≤ 1.
    let disc = (1.0 - s * s * d * d).max(0.0).sqrt();
    let c = phi.cos() * d;
    let den = 2.0 * alpha * beta;
    Ok(RatioRoots {
        b_over_a: ((-c + disc) / den, (-c - disc) / den),
        a_over_b: ((c + disc) / den, (c - disc) / den),
    })
}

/// The earlier event's projector transported to the later time,
/// `A = 𝒰 Π^m 𝒰†`, as a map on vectors, with the later projector and the
/// conditional state at the later time.
struct Transported<'a> {
    h: &'a HistoryState,
    early: &'a OutcomeEvent,
    late: &'a OutcomeEvent,
    pm: LinearOperator,
    pn: LinearOperator,
    phi: StateVector,
}

impl<'a> Transported<'a> {
    fn new(h: &'a HistoryState, cond: &'a OutcomeEvent, query: &'a OutcomeEvent) -> Result<Self> {
        let (early, late) = if cond.time <= query.time { (cond, query) } else { (query, cond) };
        let space = h.space();
        Ok(Self {
            h,
            early,
            late,
            pm: early.projector_in(space)?,
            pn: late.projector_in(space)?,
            phi: h.conditional_state(late.time)?,
        })
    }

    fn apply_a(&self, v: &StateVector) -> Result<StateVector> {
        let back = self.h.propagate(self.late.time, self.early.time, v)?;
        self.h.propagate(self.early.time, self.late.time, &self.pm.apply(&back)?)
    }
}

/// Commutation residual between the earlier projector, transported to the
/// later time, and the later projector, evaluated on the physical state.
///
/// The commutator `C = [𝒰Π^m𝒰†, Π^n]` is compressed onto the two-dimensional
/// span of `Π^n φ` and `(1−Π^n) φ`, with `φ` the conditional state at the later
/// time; the result is the Frobenius norm of that 2×2 compression,
/// `√2 |⟨φ|Π^n 𝒰Π^m𝒰† (1−Π^n)|φ⟩|`. It vanishes exactly when the
/// interference terms between the later outcome and its complement vanish,
/// which is what the consistency of the two-time history family requires.
/// The uncompressed vector norm `‖Cφ‖` is available as
/// [`def3_commutator_norm`]; it does not vanish for entangling later
/// measurements even when the Friend's record is undisturbed.
pub fn def3_commutator_residual(h: &HistoryState, cond: &OutcomeEvent, query: &OutcomeEvent) -> Result<f64> {
    let t = Transported::new(h, cond, query)?;
    let in_branch = t.pn.apply(&t.phi)?;
    let out_branch = t.phi.sub(&in_branch)?;
    let z = in_branch.inner(&t.apply_a(&out_branch)?)?;
    Ok(std::f64::consts::SQRT_2 * z.norm())
}

/// `‖[𝒰Π^m𝒰†, Π^n] φ‖` with `φ` the conditional state at the later time.
pub fn def3_commutator_norm(h: &HistoryState, cond: &OutcomeEvent, query: &OutcomeEvent) -> Result<f64> {
    let t = Transported::new(h, cond, query)?;
    let first = t.apply_a(&t.pn.apply(&t.phi)?)?;
    let second = t.pn.apply(&t.apply_a(&t.phi)?)?;
    Ok(first.sub(&second)?.norm())
}

/// Distance of `phi` to the nearest multiple of `target` modulo 2π.
fn phase_distance(phi: f64, target: f64) -> f64 {
    let d = (phi - target).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Non-disturbance: relative phase at 0 with `(a, b) = (α, β)`, or at π with
/// `(a, b) = (β, α)` (the second solution with its sign carried by the phase).
pub fn nondisturbance_check(p: &WignerFriendParams, tol: f64) -> ConditionReport {
    let phi = p.phi();
    let nd1 = phase_distance(phi, 0.0).max((p.a - p.alpha).abs()).max((p.b - p.beta).abs());
    let nd2 = phase_distance(phi, PI).max((p.a - p.beta).abs()).max((p.b - p.alpha).abs());
    let distance = nd1.min(nd2);
    let satisfied = distance < tol;
    let branch = satisfied.then_some(if nd1 <= nd2 { Branch::Nd1 } else { Branch::Nd2 });
    ConditionReport {
        rule: Rule::UnitaryConsistent,
        satisfied,
        residuals: vec![("distance".into(), distance)],
        branch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{build_wigner_friend, WignerFriendSetup};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn params_validation() {
        assert!(WignerFriendParams::new(0.6, 0.8, 0.0, 0.6, 0.8, 0.0).is_ok());
        assert!(WignerFriendParams::new(0.6, 0.7, 0.0, 0.6, 0.8, 0.0).is_err());
        assert!(WignerFriendParams::new(-0.6, 0.8, 0.0, 0.6, 0.8, 0.0).is_err());
        let p = WignerFriendParams::new(0.6, 0.8, 0.0, 0.6, 0.8, 0.0).unwrap();
        assert!(p.with_times(0.0, 2.0, 1.0, 3.0).is_err());
        assert!(p.with_times(-1.0, 0.5, 0.7, 9.0).is_ok());
    }

    #[test]
    fn residuals_vanish_at_aligned_point() {
        let p = WignerFriendParams::new(0.6, 0.8, 0.0, 0.6, 0.8, 0.0).unwrap();
        let r = def2a_residuals(&p, tol::OPERATOR).unwrap();
        assert!(r.satisfied, "{r:?}");
        assert!(r.max_residual() < 1e-15);
        assert_eq!(r.branch, Some(Branch::Plus));
    }

    #[test]
    fn residuals_vanish_at_quarter_phase() {
        let p = WignerFriendParams::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, PI / 2.0, 0.6, 0.8, 0.0).unwrap();
        assert!(def2a_residuals(&p, tol::OPERATOR).unwrap().satisfied);
    }

    #[test]
    fn residuals_nonzero_at_generic_point() {
        let r = def2a_residuals(&WignerFriendParams::canonical_generic(), tol::OPERATOR).unwrap();
        assert!(!r.satisfied);
        // α = β = 1/√2, φ = 0: r1 = 1/2 + (b/a)²/2 − 1, r2 = 1/2 + (a/b)²/2 − 1
        let ba2 = 0.19 / 0.81;
        assert!((r.residual("r1").unwrap() - (0.5 * ba2 - 0.5)).abs() < 1e-14);
        assert!((r.residual("r2").unwrap() - (0.5 / ba2 - 0.5)).abs() < 1e-13);
    }

    #[test]
    fn residuals_reject_degenerate_amplitudes() {
        let p = WignerFriendParams::new(1.0, 0.0, 0.0, 0.6, 0.8, 0.0).unwrap();
        assert!(matches!(def2a_residuals(&p, tol::OPERATOR), Err(Error::Degenerate(_))));
    }

    #[test]
    fn roots_at_reference_point() {
        let r = def2a_solve_ratios(0.6, 0.8, 0.0).unwrap();
        assert!((r.b_over_a.0 - 4.0 / 3.0).abs() < 1e-12);
        assert!((r.b_over_a.1 + 0.75).abs() < 1e-12);
        assert_eq!(r.reciprocal_pairings(1e-9), vec![(Branch::Plus, Branch::Plus), (Branch::Minus, Branch::Minus)]);
    }

    #[test]
    fn roots_balanced_basis() {
        for phi in [0.0, 0.4, 1.3, 2.9] {
            let r = def2a_solve_ratios(FRAC_1_SQRT_2, FRAC_1_SQRT_2, phi).unwrap();
            assert!((r.b_over_a.0 - 1.0).abs() < 1e-12);
            assert!((r.b_over_a.1 + 1.0).abs() < 1e-12);
        }
        assert!(def2a_solve_ratios(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn nondisturbance_branches() {
        let nd1 = nondisturbance_check(&WignerFriendParams::new(0.6, 0.8, 0.0, 0.6, 0.8, 0.0).unwrap(), 1e-9);
        assert!(nd1.satisfied);
        assert_eq!(nd1.branch, Some(Branch::Nd1));
        let nd2 = nondisturbance_check(&WignerFriendParams::new(0.8, 0.6, PI, 0.6, 0.8, 0.0).unwrap(), 1e-9);
        assert!(nd2.satisfied);
        assert_eq!(nd2.branch, Some(Branch::Nd2));
        let no = nondisturbance_check(&WignerFriendParams::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.6, 0.8, 0.0).unwrap(), 1e-9);
        assert!(!no.satisfied);
        assert_eq!(no.branch, None);
        // phase carried by φ_SF, and the full-turn representative
        let shifted = WignerFriendParams::new(0.6, 0.8, 1.0 + TAU, 0.6, 0.8, 1.0).unwrap();
        assert!(nondisturbance_check(&shifted, 1e-9).satisfied);
        // aligned amplitudes at φ = π are not a solution
        let wrong = WignerFriendParams::new(0.6, 0.8, PI, 0.6, 0.8, 0.0).unwrap();
        assert!(!nondisturbance_check(&wrong, 1e-9).satisfied);
    }

    fn max_commutator(p: &WignerFriendParams) -> f64 {
        let setup = WignerFriendSetup::new(p).unwrap();
        let h = build_wigner_friend(p).unwrap();
        let mut worst: f64 = 0.0;
        for f in 0..2 {
            for w in 0..2 {
                let r = def3_commutator_residual(&h, &setup.friend_event(f, p.t_1), &setup.wigner_event(w, p.t_2)).unwrap();
                worst = worst.max(r);
            }
        }
        worst
    }

    #[test]
    fn commutator_residual_cases() {
        assert!(max_commutator(&WignerFriendParams::new(0.6, 0.8, 0.0, 0.6, 0.8, 0.0).unwrap()) < 1e-12);
        assert!(max_commutator(&WignerFriendParams::new(0.8, 0.6, PI, 0.6, 0.8, 0.0).unwrap()) < 1e-12);
        let off = WignerFriendParams::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.6, 0.8, 0.0).unwrap();
        assert!(max_commutator(&off) > 1e-3);

        // identity as the earlier projector always commutes
        let setup = WignerFriendSetup::new(&off).unwrap();
        let h = build_wigner_friend(&off).unwrap();
        let id = OutcomeEvent::new("any", off.t_1, LinearOperator::identity(h.space())).unwrap();
        let r = def3_commutator_residual(&h, &id, &setup.wigner_event(0, off.t_2)).unwrap();
        assert!(r < 1e-15);
    }

    #[test]
    fn strict_commutator_norm_is_nonzero_at_nondisturbance() {
        // Wigner's entangling measurement moves the counterfactual Friend branch
        // even when the actual state is an eigenstate of it.
        let p = WignerFriendParams::new(0.6, 0.8, 0.0, 0.6, 0.8, 0.0).unwrap();
        let setup = WignerFriendSetup::new(&p).unwrap();
        let h = build_wigner_friend(&p).unwrap();
        let n = def3_commutator_norm(&h, &setup.friend_event(0, p.t_1), &setup.wigner_event(0, p.t_2)).unwrap();
        assert!((n - 0.48).abs() < 1e-12, "{n}");
    }
}

// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! Page-Wootters history states for Wigner's-friend experiments.
//!
//! The crate builds clock-conditioned history states for sequences of
//! von Neumann measurements, evaluates four two-time conditional-probability
//! rules on them, checks the validity conditions of each rule, and compares
//! everything against closed-form tables.
//!
//! Module map:
//!
//! * [`linalg`]: dense complex vectors and operators on labelled tensor-product spaces.
//! * [`history`]: history states, conditional states, evolution maps, one-time probabilities.
//! * [`rules`]: the collapse, two-time unitary (normalized), one-time unitary and
//!   two-time unitary (consistency) rules.
//! * [`conditions`]: normalization roots, commutation residuals, non-disturbance.
//! * [`histories`]: chain operators and the decoherence functional.
//! * [`tables`]: closed-form tables evaluated directly from parameters.
//! * [`scenarios`]: the Wigner's-friend and plain two-measurement setups.
//! * [`cli`]: the batch front-end behind the `pwfriend` binary.
//!
//! ```
//! use pwfriend::conditions::WignerFriendParams;
//! use pwfriend::rules::{evaluate, Rule};
//! use pwfriend::scenarios::WignerFriendSetup;
//!
//! let p = WignerFriendParams::new(0.6, 0.8, 0.0, 0.6, 0.8, 0.0)?;
//! let setup = WignerFriendSetup::new(&p)?;
//! let h = setup.history()?;
//! let up = setup.friend_event(0, p.t_1);
//! let yes = setup.wigner_event(0, p.t_2);
//! let r = evaluate(Rule::UnitaryConsistent, &h, &up, &yes, 1e-9)?;
//! assert!(r.valid && (r.value.re - 1.0).abs() < 1e-10);
//! # Ok::<(), pwfriend::Error>(())
//! ```

pub mod cli;
pub mod conditions;
pub mod error;
pub mod histories;
pub mod history;
pub mod linalg;
pub mod rules;
pub mod scenarios;
pub mod tables;

pub use error::{Error, Result};

/// Shared numeric tolerances.
pub mod tol {
    /// Operator identities (projector, unitary, Hermitian) and condition verdicts.
    pub const OPERATOR: f64 = 1e-9;
    /// Denominators below this are treated as conditioning on a null event.
    pub const NULL_EVENT: f64 = 1e-12;
    /// Normalization of states handed to the history builder.
    pub const NORM: f64 = 1e-10;
    /// Parameter normalization `a² + b² = 1`.
    pub const PARAM_NORM: f64 = 1e-12;
}

// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form conditional-probability tables of the Wigner's-friend setup.
//!
//! Every table is indexed `[f][w]` with `f ∈ {↑, ↓}` and `w ∈ {yes, no}`.
//! Forward tables hold `P(w | f)`, reversed tables `P(f | w)`. The formulas
//! are kept in their expanded ratio forms rather than simplified, so they
//! stay an independent check on the operator-level rules.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::conditions::{def2a_residuals, nondisturbance_check, Branch, WignerFriendParams};
use crate::error::{Error, Result};
use crate::history::HistoryState;
use crate::linalg::C64;
use crate::rules::{evaluate, Rule};
use crate::scenarios::WignerFriendSetup;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableId {
    /// Collapse rule, both directions.
    Collapse,
    /// Normalized two-time unitary rule on the normalized branches.
    Normalized,
    /// One-time unitary rule, both directions.
    OneTime,
    /// Consistency rule at the two non-disturbing points.
    NonDisturbing,
    /// Normalized two-time unitary ratio at arbitrary parameters.
    NormalizedRatio,
    /// Consistency-rule candidates at arbitrary parameters, both directions.
    Candidates,
}

impl TableId {
    pub const ALL: [TableId; 6] = [
        TableId::Collapse,
        TableId::Normalized,
        TableId::OneTime,
        TableId::NonDisturbing,
        TableId::NormalizedRatio,
        TableId::Candidates,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::Collapse => "collapse",
            TableId::Normalized => "normalized",
            TableId::OneTime => "one-time",
            TableId::NonDisturbing => "non-disturbing",
            TableId::NormalizedRatio => "normalized-ratio",
            TableId::Candidates => "candidates",
        }
    }

    pub fn from_name(s: &str) -> Option<TableId> {
        TableId::ALL.into_iter().find(|t| t.name() == s)
    }

    /// The operator-level rule the table describes.
    pub fn rule(self) -> Rule {
        match self {
            TableId::Collapse => Rule::Collapse,
            TableId::Normalized | TableId::NormalizedRatio => Rule::UnitaryNormalized,
            TableId::OneTime => Rule::OneTimeUnitary,
            TableId::NonDisturbing | TableId::Candidates => Rule::UnitaryConsistent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `P(w at t_2 | f at t_1)`.
    Forward,
    /// `P(f at t_1 | w at t_2)`.
    Reversed,
}

/// `[f][w]`; `None` where the entry conditions on a null event.
pub type Grid = [[Option<C64>; 2]; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableValue {
    pub table: TableId,
    pub f: usize,
    pub w: usize,
    pub direction: Direction,
    pub value: Option<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub id: TableId,
    pub forward: Grid,
    /// `None` when the rule has no reversed form.
    pub reversed: Option<Grid>,
    pub branch: Option<Branch>,
}

impl Table {
    pub fn entries(&self) -> Vec<TableValue> {
        let mut out = Vec::new();
        let mut push = |grid: &Grid, direction| {
            for f in 0..2 {
                for w in 0..2 {
                    out.push(TableValue { table: self.id, f, w, direction, value: grid[f][w] });
                }
            }
        };
        push(&self.forward, Direction::Forward);
        if let Some(r) = &self.reversed {
            push(r, Direction::Reversed);
        }
        out
    }

    pub fn get(&self, direction: Direction, f: usize, w: usize) -> Option<C64> {
        match direction {
            Direction::Forward => self.forward[f][w],
            Direction::Reversed => self.reversed.and_then(|r| r[f][w]),
        }
    }

    /// Sum over Wigner outcomes of each forward row.
    pub fn forward_row_sums(&self) -> [Option<C64>; 2] {
        [0, 1].map(|f| Some(self.forward[f][0]? + self.forward[f][1]?))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let branch = self.branch.map(|b| format!(" [{}]", b.name())).unwrap_or_default();
        let _ = writeln!(s, "{}{}", self.id.name(), branch);
        let mut block = |title: &str, g: &Grid| {
            let _ = writeln!(s, "  {title}");
            let _ = writeln!(s, "  {:>6} {:>28} {:>28}", "", "yes", "no");
            for (f, name) in ["up", "down"].iter().enumerate() {
                let _ = writeln!(s, "  {:>6} {:>28} {:>28}", name, fmt_entry(g[f][0]), fmt_entry(g[f][1]));
            }
        };
        block("P(w | f)", &self.forward);
        if let Some(r) = &self.reversed {
            block("P(f | w)", r);
        }
        s
    }
}

fn fmt_entry(z: Option<C64>) -> String {
    match z {
        None => "undefined".into(),
        Some(z) if z.im == 0.0 => format!("{:.12}", z.re),
        Some(z) => format!("{:.12}{:+.12}i", z.re, z.im),
    }
}

fn r(x: f64) -> Option<C64> {
    Some(C64::new(x, 0.0))
}

fn ratio_guard(p: &WignerFriendParams, id: TableId) -> Result<()> {
    if p.a * p.b * p.alpha * p.beta < tol::NULL_EVENT {
        return Err(Error::Degenerate(format!(
            "table {} needs a·b·alpha·beta ≠ 0; evaluate the operator-level rule instead",
            id.name()
        )));
    }
    Ok(())
}

/// Evaluates a table from its closed form. `branch` selects the sign of the
/// normalized table (default [`Branch::Plus`]) and is ignored elsewhere.
pub fn eval_table(id: TableId, p: &WignerFriendParams, branch: Option<Branch>) -> Result<Table> {
    p.validate()?;
    let (a, b, al, be, phi) = (p.a, p.b, p.alpha, p.beta, p.phi());
    let (a2, b2, al2, be2) = (a * a, b * b, al * al, be * be);
    let swap = [[r(al2), r(be2)], [r(be2), r(al2)]];
    let table = match id {
        TableId::Collapse => Table { id, forward: swap, reversed: Some(swap), branch: None },
        TableId::Normalized => {
            let branch = branch.unwrap_or(Branch::Plus);
            let sign = match branch {
                Branch::Plus => 1.0,
                Branch::Minus => -1.0,
                _ => return Err(Error::InvalidParams("normalized table branch must be plus or minus".into())),
            };
            let d = al2 - be2;
            let chi = 2.0 * phi.cos() * (1.0 - d * d * phi.sin().powi(2)).max(0.0).sqrt();
            let c2 = (2.0 * phi).cos();
            let x = (be2 * be2 - al2 * al2) * c2;
            let forward = [
                [r((1.0 + 2.0 * al2 + x + sign * chi) / 4.0), r((1.0 + 2.0 * be2 - x - sign * chi) / 4.0)],
                [r((1.0 + 2.0 * be2 - x + sign * chi) / 4.0), r((1.0 + 2.0 * al2 + x - sign * chi) / 4.0)],
            ];
            Table { id, forward, reversed: None, branch: Some(branch) }
        }
        TableId::OneTime => {
            ratio_guard(p, id)?;
            let c = phi.cos();
            let n_up = al2 / be2 + be2 / al2 + 2.0 * (b / a) * c * (al / be - be / al) + 2.0 * b2 / a2;
            let n_down = al2 / be2 + be2 / al2 + 2.0 * (a / b) * c * (be / al - al / be) + 2.0 * a2 / b2;
            let forward = [
                [
                    r((al2 / be2 + 2.0 * (b * al) / (a * be) * c + b2 / a2) / n_up),
                    r((be2 / al2 - 2.0 * (b * be) / (a * al) * c + b2 / a2) / n_up),
                ],
                [
                    r((be2 / al2 + 2.0 * (a * be) / (b * al) * c + a2 / b2) / n_down),
                    r((al2 / be2 - 2.0 * (a * al) / (b * be) * c + a2 / b2) / n_down),
                ],
            ];
            Table { id, forward, reversed: Some(swap), branch: None }
        }
        TableId::NonDisturbing => {
            let nd = nondisturbance_check(p, tol::OPERATOR);
            match nd.branch {
                Some(Branch::Nd1) => Table {
                    id,
                    forward: [[r(1.0), r(0.0)], [r(1.0), r(0.0)]],
                    reversed: Some([[r(al2), None], [r(be2), None]]),
                    branch: nd.branch,
                },
                Some(Branch::Nd2) => Table {
                    id,
                    forward: [[r(0.0), r(1.0)], [r(0.0), r(1.0)]],
                    reversed: Some([[None, r(be2)], [None, r(al2)]]),
                    branch: nd.branch,
                },
                _ => {
                    return Err(Error::InvalidParams(format!(
                        "not a non-disturbing point (distance {:.3e})",
                        nd.max_residual()
                    )))
                }
            }
        }
        TableId::NormalizedRatio => {
            ratio_guard(p, id)?;
            let c = phi.cos();
            let forward = [
                [
                    r((a2 * al2 * al2 + 2.0 * a * b * al2 * al * be * c + b2 * al2 * be2) / a2),
                    r((a2 * be2 * be2 - 2.0 * a * b * al * be2 * be * c + b2 * al2 * be2) / a2),
                ],
                [
                    r((b2 * be2 * be2 + 2.0 * a * b * al * be2 * be * c + a2 * al2 * be2) / b2),
                    r((b2 * al2 * al2 - 2.0 * a * b * al2 * al * be * c + a2 * al2 * be2) / b2),
                ],
            ];
            Table { id, forward, reversed: None, branch: None }
        }
        TableId::Candidates => {
            ratio_guard(p, id)?;
            let e_m = C64::from_polar(1.0, -phi);
            let e_p = C64::from_polar(1.0, phi);
            let ab = al * be;
            let forward = [
                [Some(al2 + e_m * (b / a) * ab), Some(be2 - e_m * (b / a) * ab)],
                // Phase e^{+iφ} on the ↓ row: the joint amplitude there is
                // bβe^{iφ}(aα + bβe^{−iφ}).
                [Some(be2 + e_p * (a / b) * ab), Some(al2 - e_p * (a / b) * ab)],
            ];
            // The yes column conditions on P(yes) = |aα + bβe^{−iφ}|², the no
            // column on P(no) = a²β² + b²α² − 2abαβ cos φ.
            let yes_den = a * al + e_m * (b * be);
            let yes_den2 = b * be + e_p * (a * al);
            let no_den = a2 * be2 + b2 * al2 - 2.0 * a * b * ab * phi.cos();
            let yes_ok = yes_den.norm_sqr() >= tol::NULL_EVENT;
            let no_ok = no_den >= tol::NULL_EVENT;
            let reversed = [
                [
                    yes_ok.then(|| C64::new(a * al, 0.0) / yes_den),
                    no_ok.then(|| (C64::new(a2 * be2, 0.0) - e_p * (a * b * ab)) / no_den),
                ],
                [
                    yes_ok.then(|| C64::new(b * be, 0.0) / yes_den2),
                    no_ok.then(|| (C64::new(b2 * al2, 0.0) - e_m * (a * b * ab)) / no_den),
                ],
            ];
            Table { id, forward, reversed: Some(reversed), branch: None }
        }
    };
    Ok(table)
}

/// Result of comparing a closed-form table against the operator-level rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub id: TableId,
    /// Max over entries of `|table − operator|`; infinite when the table
    /// leaves an entry undefined that the operator rule defines.
    pub max_deviation: f64,
    /// Branch of the normalized table that matched.
    pub branch: Option<Branch>,
    pub entries: usize,
    /// Entries the table defines but the operator rule does not, because
    /// they condition on a null event. They are not compared.
    pub null_entries: usize,
}

fn operator_grid(h: &HistoryState, setup: &WignerFriendSetup, rule: Rule, direction: Direction) -> Result<[[Option<C64>; 2]; 2]> {
    let p = setup.params();
    let mut g = [[None; 2]; 2];
    for (f, row) in g.iter_mut().enumerate() {
        for (w, slot) in row.iter_mut().enumerate() {
            let fe = setup.friend_event(f, p.t_1);
            let we = setup.wigner_event(w, p.t_2);
            let res = match direction {
                Direction::Forward => evaluate(rule, h, &fe, &we, tol::OPERATOR),
                Direction::Reversed => evaluate(rule, h, &we, &fe, tol::OPERATOR),
            };
            *slot = match res {
                Ok(v) => Some(v.raw),
                Err(Error::NullCondition(_)) => None,
                Err(e) => return Err(e),
            };
        }
    }
    Ok(g)
}

/// `(max deviation, entries where only the table is defined)`.
fn grid_deviation(t: &Grid, o: &Grid) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut nulls = 0;
    for f in 0..2 {
        for w in 0..2 {
            match (t[f][w], o[f][w]) {
                (Some(x), Some(y)) => worst = worst.max((x - y).norm()),
                (Some(_), None) => nulls += 1,
                (None, None) => {}
                (None, Some(_)) => worst = f64::INFINITY,
            }
        }
    }
    (worst, nulls)
}

/// Compares table `id` at `p` with the corresponding rule evaluated on `h`,
/// which must be the history of the standard setup at `p`.
pub fn crosscheck(id: TableId, p: &WignerFriendParams, h: &HistoryState) -> Result<CrossCheck> {
    let setup = WignerFriendSetup::new(p)?;
    let rule = id.rule();
    let compare = |t: &Table| -> Result<(f64, usize)> {
        let (mut d, mut n) = grid_deviation(&t.forward, &operator_grid(h, &setup, rule, Direction::Forward)?);
        if let Some(rev) = &t.reversed {
            let (dr, nr) = grid_deviation(rev, &operator_grid(h, &setup, rule, Direction::Reversed)?);
            d = d.max(dr);
            n += nr;
        }
        Ok((d, n))
    };
    if id == TableId::Normalized {
        let rep = def2a_residuals(p, tol::OPERATOR)?;
        if !rep.satisfied {
            return Err(Error::InvalidParams(format!(
                "normalized table presupposes the normalization conditions (max residual {:.3e})",
                rep.max_residual()
            )));
        }
        let plus = compare(&eval_table(id, p, Some(Branch::Plus))?)?;
        let minus = compare(&eval_table(id, p, Some(Branch::Minus))?)?;
        let ((max_deviation, null_entries), branch) = if plus.0 <= minus.0 { (plus, Branch::Plus) } else { (minus, Branch::Minus) };
        return Ok(CrossCheck { id, max_deviation, branch: Some(branch), entries: 4, null_entries });
    }
    let t = eval_table(id, p, None)?;
    let entries = t.entries().len();
    let (max_deviation, null_entries) = compare(&t)?;
    Ok(CrossCheck { id, max_deviation, branch: t.branch, entries, null_entries })
}

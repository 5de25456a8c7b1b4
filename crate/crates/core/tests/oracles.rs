// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! Frozen reference values. Operator-level numbers at the generic point were
//! computed once and cross-checked against hand derivations where noted.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64 as C64;
use pwfriend::conditions::{def2a_residuals, def2a_solve_ratios, Branch, WignerFriendParams};
use pwfriend::histories::{decoherence_functional, HistoryFamily};
use pwfriend::rules::{evaluate, Rule};
use pwfriend::scenarios::WignerFriendSetup;
use pwfriend::tables::{eval_table, Direction, TableId};
use pwfriend::Error;

const TOL: f64 = 1e-12;

fn grid(p: &WignerFriendParams, rule: Rule, reversed: bool) -> [[Result<C64, Error>; 2]; 2] {
    let s = WignerFriendSetup::new(p).unwrap();
    let h = s.history().unwrap();
    [0, 1].map(|f| {
        [0, 1].map(|w| {
            let (fe, we) = (s.friend_event(f, p.t_1), s.wigner_event(w, p.t_2));
            let r = if reversed { evaluate(rule, &h, &we, &fe, 1e-9) } else { evaluate(rule, &h, &fe, &we, 1e-9) };
            r.map(|v| v.raw)
        })
    })
}

fn assert_grid(got: &[[Result<C64, Error>; 2]; 2], want: [[f64; 2]; 2], what: &str) {
    for f in 0..2 {
        for w in 0..2 {
            let z = got[f][w].as_ref().unwrap_or_else(|e| panic!("{what}[{f}][{w}]: {e}"));
            assert!((z - want[f][w]).norm() < TOL, "{what}[{f}][{w}] = {z}, want {}", want[f][w]);
        }
    }
}

#[test]
fn generic_point_rule_values() {
    // a = 0.9, α = β = 1/√2, φ = 0.
    let p = WignerFriendParams::canonical_generic();
    let (a, b) = (p.a, p.b);

    assert_grid(&grid(&p, Rule::Collapse, false), [[0.5, 0.5], [0.5, 0.5]], "def1 fwd");
    assert_grid(&grid(&p, Rule::Collapse, true), [[0.5, 0.5], [0.5, 0.5]], "def1 rev");

    assert_grid(
        &grid(&p, Rule::UnitaryNormalized, false),
        [[5.508_030_277_275_684e-1, 6.648_092_288_971_558e-2], [2.348_160_276_101_739, 2.834_186_712_666_831e-1]],
        "def2a fwd",
    );
    for row in grid(&p, Rule::UnitaryNormalized, true) {
        for z in row {
            assert!(matches!(z, Err(Error::Unsupported(_))));
        }
    }

    // (a + b)²/2 for yes; the F=↑ weight at the late time is 1/2.
    let yes = (a + b).powi(2) / 2.0;
    assert_grid(&grid(&p, Rule::OneTimeUnitary, false), [[yes, 1.0 - yes], [yes, 1.0 - yes]], "def2b fwd");
    assert_grid(&grid(&p, Rule::OneTimeUnitary, true), [[0.5, 0.5], [0.5, 0.5]], "def2b rev");

    assert_grid(
        &grid(&p, Rule::UnitaryConsistent, false),
        [[7.421_610_524_189_265e-1, 2.578_389_475_810_737e-1], [1.532_370_802_417_529, -5.323_708_024_175_281e-1]],
        "def3 fwd",
    );
    assert_grid(
        &grid(&p, Rule::UnitaryConsistent, true),
        [[6.737_082_178_731_281e-1, 1.939_195_007_933_324], [3.262_917_821_268_720e-1, -9.391_950_079_333_234e-1]],
        "def3 rev",
    );
}

#[test]
fn generic_point_residuals_and_functional() {
    let p = WignerFriendParams::canonical_generic();
    let rep = def2a_residuals(&p, 1e-9).unwrap();
    assert!(!rep.satisfied);
    assert!((rep.residual("r1").unwrap() + 0.382_716_049_382_715_75).abs() < TOL);
    assert!((rep.residual("r2").unwrap() - 1.631_578_947_368_422).abs() < TOL);

    let s = WignerFriendSetup::new(&p).unwrap();
    let h = s.history().unwrap();
    let d = decoherence_functional(&HistoryFamily::wigner_friend(&s, &h).unwrap(), &h, 1e-10).unwrap();
    assert_eq!(d.outcomes, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    let (x, y, z) = (4.461_504_524_593_308e-1, 1.55e-1, 5.384_954_754_066_970e-2);
    let want = [[x, y, 0.0, 0.0], [y, z, 0.0, 0.0], [0.0, 0.0, x, -y], [0.0, 0.0, -y, z]];
    for i in 0..4 {
        for j in 0..4 {
            assert!((d.matrix[i][j] - want[i][j]).norm() < TOL, "D[{i}][{j}] = {}", d.matrix[i][j]);
        }
    }
    assert!(!d.weakly_consistent);
}

#[test]
fn counterexample_functional() {
    let p = WignerFriendParams::consistency_counterexample(0.6, 0.8).unwrap();
    let s = WignerFriendSetup::new(&p).unwrap();
    let h = s.history().unwrap();
    let d = decoherence_functional(&HistoryFamily::wigner_friend(&s, &h).unwrap(), &h, 1e-10).unwrap();
    // Off-diagonal entries couple the two Wigner outcomes at fixed Friend outcome.
    assert!((d.matrix[0][1] - C64::new(0.0, 0.24)).norm() < TOL || (d.matrix[0][1] - C64::new(0.0, -0.24)).norm() < TOL);
    assert!((d.matrix[0][1] + d.matrix[2][3]).norm() < TOL || (d.matrix[0][1] - d.matrix[2][3]).norm() < TOL);
    assert!(d.matrix[0][2].norm() < TOL && d.matrix[1][3].norm() < TOL);
    assert!(d.weakly_consistent && !d.consistent);
}

#[test]
fn normalization_roots() {
    let r = def2a_solve_ratios(0.6, 0.8, 0.0).unwrap();
    assert!((r.b_over_a.0 - 4.0 / 3.0).abs() < TOL);
    assert!((r.b_over_a.1 + 0.75).abs() < TOL);
    let r = def2a_solve_ratios(0.3, 0.91_f64.sqrt(), 1.0).unwrap();
    assert!((r.b_over_a.0 - 2.038_654_277_983_32).abs() < TOL);
    assert!((r.b_over_a.1 + 0.490_519_658_384_265_64).abs() < TOL);
    assert!((r.a_over_b.0 * r.b_over_a.0 - 1.0).abs() < TOL);
    assert!(matches!(def2a_solve_ratios(1.0, 0.0, 0.3), Err(Error::Degenerate(_))));
}

#[test]
fn closed_form_tables_at_reference_points() {
    let p = WignerFriendParams::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.6, 0.8, 0.0).unwrap();
    let t = eval_table(TableId::Candidates, &p, None).unwrap();
    let want = [[0.84, 0.16], [1.12, -0.12]];
    for f in 0..2 {
        for w in 0..2 {
            assert!((t.get(Direction::Forward, f, w).unwrap() - want[f][w]).norm() < TOL);
        }
    }

    let nd = WignerFriendParams::non_disturbing(0.6, 0.8, Branch::Nd1).unwrap();
    let t = eval_table(TableId::NonDisturbing, &nd, None).unwrap();
    assert_eq!(t.branch, Some(Branch::Nd1));
    assert!((t.get(Direction::Forward, 1, 0).unwrap() - 1.0).norm() < TOL);
    assert!((t.get(Direction::Reversed, 1, 0).unwrap() - 0.64).norm() < TOL);
    assert!(t.get(Direction::Reversed, 1, 1).is_none());

    // Coincidence point: the normalized rule reduces to α², β².
    let p = WignerFriendParams::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_PI_2, 0.6, 0.8, 0.0).unwrap();
    let t = eval_table(TableId::Normalized, &p, Some(Branch::Minus)).unwrap();
    assert!((t.get(Direction::Forward, 0, 0).unwrap() - 0.36).norm() < TOL);
    assert!((t.get(Direction::Forward, 1, 1).unwrap() - 0.36).norm() < TOL);
}

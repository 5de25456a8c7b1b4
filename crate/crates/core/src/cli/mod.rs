// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! Batch front-end: tables, sweeps, condition checks and the reduction regression.
//!
//! Exit codes: 0 success, 2 input error, 3 a check failed.

pub mod input;
pub mod sweep;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::conditions::{def2a_residuals, def3_commutator_residual, nondisturbance_check, WignerFriendParams};
use crate::error::Error;
use crate::histories::{decoherence_functional, HistoryFamily};
use crate::history::PointerExtension;
use crate::scenarios::{regress, WignerFriendOptions, WignerFriendSetup};
use crate::tables::{crosscheck, eval_table, TableId};
use crate::tol;

use input::{wigner_params, InputError, KeyValues};
use sweep::{run_sweep, to_csv, SweepSpec, CSV_COLUMNS_HELP};

// Output goes to stdout best effort: a closed pipe (`| head`) is not an error.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! say_raw {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CHECK: u8 = 3;

const PARAMS_HELP: &str = "\
Parameter files hold one `key = value` per line; `#` starts a comment.
Values are expressions such as `pi/2` or `1/sqrt(2)`.
Keys: a, b, phi_S, alpha, beta, phi_SF, t_F, t_1, t_W, t_2, extension.
b and beta default to the non-negative value completing the normalization;
phases default to 0, times to 0, 1, 2, 3; extension is cyclic or transposition.";

#[derive(Parser, Debug)]
#[command(name = "pwfriend", version, about = "Two-time conditional probabilities for Wigner's friend on clock-conditioned history states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print every closed-form table next to the operator-level rule it describes.
    #[command(after_help = PARAMS_HELP)]
    Tables {
        #[arg(long)]
        params: PathBuf,
        /// Write a JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Max allowed deviation between table and operator values.
        #[arg(long, default_value_t = tol::OPERATOR)]
        tol: f64,
    },
    /// Evaluate every rule on a parameter grid and write one CSV row per point.
    #[command(after_help = format!("Spec keys: alpha, phi, a or a_over_alpha, phi_SF, out, tol.\nRanges are written min:max:steps; phi is the relative phase phi_S - phi_SF.\n\n{CSV_COLUMNS_HELP}"))]
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// CSV path; overrides `out` in the spec. Without either the CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `tol` in the spec.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the validity checks at one parameter point.
    #[command(after_help = format!("{PARAMS_HELP}\n\nChecks: def2a-normalized, def3-valid, nondisturbance, consistent, weakly-consistent.\nThe exit status is 3 if any required check fails."))]
    Check {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = tol::OPERATOR)]
        tol: f64,
        /// Comma-separated checks that must pass; `all` (default) or `none`.
        #[arg(long, default_value = "all")]
        require: String,
    },
    /// Compare every rule with textbook two-time probabilities on random
    /// two-measurement experiments (system dimension cycling through 2, 3, 4).
    Regress {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            EXIT_INPUT
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            EXIT_CHECK
        }
    }
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Tables { params, out, tol } => cmd_tables(&params, out.as_deref(), tol),
        Command::Sweep { spec, out, tol } => cmd_sweep(&spec, out.as_deref(), tol),
        Command::Check { params, out, tol, require } => cmd_check(&params, out.as_deref(), tol, &require),
        Command::Regress { seed, trials, out, tol } => cmd_regress(seed, trials, out.as_deref(), tol),
    }
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::Input(format!("tolerance {tol} must be positive")))
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn write_json(path: Option<&Path>, v: &Value) -> Result<(), Failure> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Input(e.to_string()))?;
        write_file(p, &(text + "\n"))?;
    }
    Ok(())
}

fn load_params(path: &Path) -> Result<(WignerFriendParams, PointerExtension), Failure> {
    Ok(wigner_params(&KeyValues::read(path)?)?)
}

fn params_json(p: &WignerFriendParams) -> Value {
    json!({
        "a": p.a, "b": p.b, "phi_S": p.phi_s, "alpha": p.alpha, "beta": p.beta, "phi_SF": p.phi_sf,
        "t_F": p.t_f.value(), "t_1": p.t_1.value(), "t_W": p.t_w.value(), "t_2": p.t_2.value(),
    })
}

fn cmd_tables(path: &Path, out: Option<&Path>, tol: f64) -> Result<(), Failure> {
    check_tol(tol)?;
    let (p, ext) = load_params(path)?;
    let setup = WignerFriendSetup::with_options(&p, WignerFriendOptions { extension: ext, yes_projector: None })?;
    let h = setup.history()?;
    let mut reports = Vec::new();
    let mut worst: f64 = 0.0;
    for id in TableId::ALL {
        let table = match eval_table(id, &p, None) {
            Ok(t) => t,
            Err(e @ (Error::Degenerate(_) | Error::InvalidParams(_))) => {
                say!("{}: skipped ({e})\n", id.name());
                reports.push(json!({ "table": id.name(), "skipped": e.to_string() }));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        match crosscheck(id, &p, &h) {
            Ok(c) => {
                let table = if id == TableId::Normalized { eval_table(id, &p, c.branch)? } else { table };
                say_raw!("{}", table.render());
                if c.null_entries > 0 {
                    say!("  {} entries condition on a null event and have no operator value", c.null_entries);
                }
                say!("  max deviation from operator rule: {:.3e}\n", c.max_deviation);
                worst = worst.max(c.max_deviation);
                reports.push(json!({ "table": id.name(), "values": table, "crosscheck": c }));
            }
            Err(e @ (Error::Degenerate(_) | Error::InvalidParams(_))) => {
                say_raw!("{}", table.render());
                say!("  operator comparison skipped ({e})\n");
                reports.push(json!({ "table": id.name(), "values": table, "crosscheck_skipped": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    write_json(out, &json!({ "params": params_json(&p), "tables": reports, "max_deviation": worst }))?;
    if worst > tol {
        return Err(Failure::Check(format!("closed-form and operator values differ by {worst:.3e}")));
    }
    Ok(())
}

fn cmd_sweep(path: &Path, out: Option<&Path>, tol: Option<f64>) -> Result<(), Failure> {
    let mut spec = SweepSpec::parse(&KeyValues::read(path)?)?;
    if let Some(t) = tol {
        check_tol(t)?;
        spec.tol = t;
    }
    let records = run_sweep(&spec)?;
    let csv = to_csv(&records);
    let target = out.map(Path::to_path_buf).or_else(|| spec.out.as_ref().map(PathBuf::from));
    match target {
        Some(p) => {
            write_file(&p, &csv)?;
            let count = |f: fn(&sweep::Flags) -> bool| records.iter().filter(|r| f(&r.flags)).count();
            say!(
                "{} points -> {}: def2a-normalized {}, def3-valid {}, nondisturbance {}, consistent {}",
                records.len(),
                p.display(),
                count(|f| f.def2a_normalized),
                count(|f| f.def3_valid),
                count(|f| f.nondisturbance),
                count(|f| f.consistent),
            );
        }
        None => say_raw!("{csv}"),
    }
    Ok(())
}

const CHECKS: [&str; 5] = ["def2a-normalized", "def3-valid", "nondisturbance", "consistent", "weakly-consistent"];

fn cmd_check(path: &Path, out: Option<&Path>, tol: f64, require: &str) -> Result<(), Failure> {
    check_tol(tol)?;
    let required: Vec<&str> = match require.trim() {
        "all" => CHECKS.to_vec(),
        "none" => Vec::new(),
        list => {
            let v: Vec<&str> = list.split(',').map(str::trim).collect();
            if let Some(bad) = v.iter().find(|c| !CHECKS.contains(c)) {
                return Err(Failure::Input(format!("unknown check '{bad}' (expected {})", CHECKS.join(", "))));
            }
            v
        }
    };
    let (p, ext) = load_params(path)?;
    let setup = WignerFriendSetup::with_options(&p, WignerFriendOptions { extension: ext, yes_projector: None })?;
    let h = setup.history()?;
    let record = sweep::record_point(&p, tol)?;
    let mut commutators = Vec::new();
    for (f, w) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let r = def3_commutator_residual(&h, &setup.friend_event(f, p.t_1), &setup.wigner_event(w, p.t_2))?;
        commutators.push(json!({ "f": f, "w": w, "residual": r }));
    }
    let def2a = match def2a_residuals(&p, tol) {
        Ok(r) => json!(r),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let nd = nondisturbance_check(&p, tol);
    let dec = decoherence_functional(&HistoryFamily::wigner_friend(&setup, &h)?, &h, tol)?;
    let f = record.flags;
    let flags = [
        ("def2a-normalized", f.def2a_normalized),
        ("def3-valid", f.def3_valid),
        ("nondisturbance", f.nondisturbance),
        ("consistent", f.consistent),
        ("weakly-consistent", f.weakly_consistent),
    ];
    for (name, v) in flags {
        say!("{name:<18} {}", if v { "yes" } else { "no" });
    }
    let res = record.residuals;
    say!("normalization residuals r1 = {:.3e}, r2 = {:.3e}", res.r1, res.r2);
    say!("max commutation residual   {:.3e}", res.commutator);
    say!("non-disturbance distance   {:.3e}", res.nd_distance);
    say!("decoherence off-diagonal   {:.3e} (real part {:.3e})", res.offdiag, res.offdiag_re);
    let report = json!({
        "params": params_json(&p),
        "tol": tol,
        "flags": flags.iter().map(|(k, v)| ((*k).to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "def2a_residuals": def2a,
        "def3_commutator": commutators,
        "nondisturbance": nd,
        "decoherence_functional": {
            "outcomes": dec.outcomes,
            "matrix": dec.matrix.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "consistent": dec.consistent,
            "weakly_consistent": dec.weakly_consistent,
        },
    });
    write_json(out, &report)?;
    let failed: Vec<&str> = flags.iter().filter(|(k, v)| !v && required.contains(k)).map(|(k, _)| *k).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed.join(", ")))
    }
}

fn cmd_regress(seed: u64, trials: usize, out: Option<&Path>, tol: f64) -> Result<(), Failure> {
    check_tol(tol)?;
    if trials == 0 {
        return Err(Failure::Input("trials must be at least 1".into()));
    }
    let report = regress(seed, trials)?;
    say!("seed {seed}, {trials} trials");
    for (rule, d) in &report.max_deviation {
        say!("  {rule:<6} max deviation {d:.3e}  {}", if *d <= tol { "pass" } else { "FAIL" });
    }
    say!("  denominator shift between readout times {:.3e}", report.max_denominator_shift);
    write_json(out, &json!(report))?;
    let worst = report.worst();
    if worst > tol {
        return Err(Failure::Check(format!("max deviation {worst:.3e} exceeds {tol:.1e}")));
    }
    Ok(())
}

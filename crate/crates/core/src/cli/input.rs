// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

//! `key = value` input files.
//!
//! One assignment per line, `#` starts a comment. Values are arithmetic
//! expressions (`pi/2`, `1/sqrt(2)`); ranges are written `min:max:steps`.

use std::collections::BTreeMap;

use crate::conditions::WignerFriendParams;
use crate::history::PointerExtension;

#[derive(Clone, Debug, PartialEq)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug)]
struct Entry {
    raw: String,
    line: usize,
}

#[derive(Clone, Debug, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, Entry>,
}

/// Inclusive linear grid; one step means just `min`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Range {
    pub fn single(v: f64) -> Self {
        Self { min: v, max: v, steps: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.min + (self.max - self.min) * i as f64 / n).collect()
    }
}

fn eval(expr: &str) -> Result<f64, String> {
    let v = meval::eval_str(expr).map_err(|e| format!("cannot evaluate '{expr}': {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{expr}' is not finite"))
    }
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| InputError(format!("line {n}: expected 'key = value'")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(InputError(format!("line {n}: empty key or value")));
            }
            if let Some(prev) = entries.insert(k.to_string(), Entry { raw: v.to_string(), line: n }) {
                return Err(InputError(format!("line {n}: '{k}' already set on line {}", prev.line)));
            }
        }
        Ok(Self { entries })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Rejects keys outside `allowed`.
    pub fn restrict(&self, allowed: &[&str]) -> Result<(), InputError> {
        for (k, e) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(InputError(format!("line {}: unknown key '{k}' (expected one of {})", e.line, allowed.join(", "))));
            }
        }
        Ok(())
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.raw.as_str())
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>, InputError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => eval(&e.raw).map(Some).map_err(|m| InputError(format!("line {}: {key}: {m}", e.line))),
        }
    }

    /// A range `min:max:steps` or a single value.
    pub fn range(&self, key: &str) -> Result<Option<Range>, InputError> {
        let Some(e) = self.entries.get(key) else { return Ok(None) };
        let err = |m: String| InputError(format!("line {}: {key}: {m}", e.line));
        let parts: Vec<&str> = e.raw.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [v] => Ok(Some(Range::single(eval(v).map_err(err)?))),
            [lo, hi, steps] => {
                let min = eval(lo).map_err(err)?;
                let max = eval(hi).map_err(err)?;
                let steps: usize = steps.parse().map_err(|_| err(format!("steps '{steps}' is not a positive integer")))?;
                if steps == 0 {
                    return Err(err("steps must be at least 1".into()));
                }
                if max < min {
                    return Err(err(format!("max {max} below min {min}")));
                }
                Ok(Some(Range { min, max, steps }))
            }
            _ => Err(err("expected a value or min:max:steps".into())),
        }
    }

    pub fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }
}

pub const PARAM_KEYS: [&str; 11] = ["a", "b", "phi_S", "alpha", "beta", "phi_SF", "t_F", "t_1", "t_W", "t_2", "extension"];

/// `√(1 − x²)` for a missing partner amplitude.
fn partner(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).sqrt()
}

/// Wigner's-friend parameters from a parameter file. `b` and `beta` default
/// to the non-negative value completing the normalization, phases to 0.
pub fn wigner_params(kv: &KeyValues) -> Result<(WignerFriendParams, PointerExtension), InputError> {
    kv.restrict(&PARAM_KEYS)?;
    let need = |k: &str| kv.number(k)?.ok_or_else(|| InputError(format!("missing required key '{k}'")));
    let a = need("a")?;
    let alpha = need("alpha")?;
    let b = kv.number("b")?.unwrap_or_else(|| partner(a));
    let beta = kv.number("beta")?.unwrap_or_else(|| partner(alpha));
    let phi_s = kv.number("phi_S")?.unwrap_or(0.0);
    let phi_sf = kv.number("phi_SF")?.unwrap_or(0.0);
    let p = WignerFriendParams::new(a, b, phi_s, alpha, beta, phi_sf).map_err(|e| InputError(e.to_string()))?;
    let p = if ["t_F", "t_1", "t_W", "t_2"].iter().any(|k| kv.has(k)) {
        let t = |k: &str, d: f64| kv.number(k).map(|v| v.unwrap_or(d));
        p.with_times(t("t_F", 0.0)?, t("t_1", 1.0)?, t("t_W", 2.0)?, t("t_2", 3.0)?)
            .map_err(|e| InputError(e.to_string()))?
    } else {
        p
    };
    let ext = match kv.raw("extension") {
        None | Some("cyclic") => PointerExtension::CyclicShift,
        Some("transposition") => PointerExtension::Transposition,
        Some(other) => {
            return Err(InputError(format!(
                "line {}: extension '{other}' (expected cyclic or transposition)",
                kv.line("extension").unwrap_or(0)
            )))
        }
    };
    Ok((p, ext))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_expressions_and_comments() {
        let kv = KeyValues::parse("# header\na = 1/sqrt(2)  # inline\n\nalpha=0.6\nphi_S = pi/2\n").unwrap();
        let (p, ext) = wigner_params(&kv).unwrap();
        assert!((p.a - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((p.b - p.a).abs() < 1e-15);
        assert!((p.beta - 0.8).abs() < 1e-15);
        assert!((p.phi_s - PI / 2.0).abs() < 1e-15);
        assert_eq!(ext, PointerExtension::CyclicShift);
    }

    #[test]
    fn reports_line_numbers() {
        let e = KeyValues::parse("a = 0.6\nalpha 0.6\n").unwrap_err();
        assert!(e.0.starts_with("line 2"), "{e}");
        let kv = KeyValues::parse("a = 0.6\nalpha = 0.6\ngamma = 1\n").unwrap();
        assert!(wigner_params(&kv).unwrap_err().0.starts_with("line 3"));
        let kv = KeyValues::parse("a = 0.6\nalpha = foo(\n").unwrap();
        assert!(wigner_params(&kv).unwrap_err().0.starts_with("line 2"));
        assert!(KeyValues::parse("a = 1\na = 2\n").unwrap_err().0.contains("already set on line 1"));
    }

    #[test]
    fn rejects_invalid_params() {
        let kv = KeyValues::parse("a = 0.6\nb = 0.6\nalpha = 0.6\n").unwrap();
        assert!(wigner_params(&kv).is_err());
        let kv = KeyValues::parse("alpha = 0.6\n").unwrap();
        assert!(wigner_params(&kv).unwrap_err().0.contains("missing"));
    }

    #[test]
    fn ranges() {
        let kv = KeyValues::parse("x = 0:1:5\ny = pi\nz = 0:1:0\nw = 1:0:3\n").unwrap();
        assert_eq!(kv.range("x").unwrap().unwrap().values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(kv.range("y").unwrap().unwrap().values(), vec![PI]);
        assert!(kv.range("z").is_err());
        assert!(kv.range("w").is_err());
        assert_eq!(kv.range("missing").unwrap(), None);
    }
}

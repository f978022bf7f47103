use std::path::PathBuf;

use serde::{Deserialize, Serialize};

/// Fully resolved description of one run. Replaying a spec reproduces the
/// payload of the report that embeds it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ExperimentSpec {
    Analyze {
        arch: PathBuf,
        eps: Vec<f64>,
    },
    HardInstance {
        d: usize,
        r: f64,
        c0: f64,
        nstar: Option<usize>,
        n: Option<u64>,
        beta: f64,
        c_tilde1: f64,
        c_tilde2: f64,
        pairs: usize,
        members: usize,
        holder_pairs: usize,
        seed: u64,
    },
    Verify {
        suites: Vec<String>,
        arch: Option<PathBuf>,
        seed: u64,
    },
    Bounds {
        r: f64,
        d: usize,
        n: u64,
        depth: usize,
        radius: f64,
        d_max: usize,
        ledger: (f64, f64),
        beta: f64,
        c_tilde1: f64,
        c_tilde2: f64,
        c0: f64,
    },
    Gap {
        r: f64,
        d: usize,
        depth: usize,
        n_values: Vec<u64>,
        radius: f64,
        d_max: usize,
        ledger: (f64, f64),
    },
}

impl ExperimentSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentSpec::Analyze { .. } => "analyze",
            ExperimentSpec::HardInstance { .. } => "hard-instance",
            ExperimentSpec::Verify { .. } => "verify",
            ExperimentSpec::Bounds { .. } => "bounds",
            ExperimentSpec::Gap { .. } => "gap",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentSpec::HardInstance { seed, .. } | ExperimentSpec::Verify { seed, .. } => *seed,
            _ => 0,
        }
    }

    /// Files whose contents feed the run.
    pub fn input_files(&self) -> Vec<PathBuf> {
        match self {
            ExperimentSpec::Analyze { arch, .. } => vec![arch.clone()],
            ExperimentSpec::Verify { arch: Some(a), .. } => vec![a.clone()],
            _ => Vec::new(),
        }
    }
}

/// `"0.5,0.25"` → `[0.5, 0.25]`; every value must be a positive finite number.
pub fn parse_eps_list(text: &str) -> Result<Vec<f64>, String> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err("ε list is empty".into());
    }
    items
        .iter()
        .map(|s| match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(format!("ε value {s:?} is not a positive number")),
        })
        .collect()
}

/// `A:B` → `A, 2A, 4A, ...` up to `B`; a bare `A` is a single value.
pub fn parse_n_range(text: &str) -> Result<Vec<u64>, String> {
    let (a, b) = match text.split_once(':') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text.trim(), text.trim()),
    };
    let parse = |s: &str| s.parse::<u64>().map_err(|_| format!("{s:?} is not a positive integer"));
    let (lo, hi) = (parse(a)?, parse(b)?);
    if lo < 2 || hi < lo {
        return Err(format!("n range {text} must satisfy 2 <= A <= B"));
    }
    let mut out = vec![lo];
    while let Some(next) = out.last().unwrap().checked_mul(2).filter(|&v| v <= hi) {
        out.push(next);
    }
    Ok(out)
}

/// `"c,c1"` → `(c, c1)`.
pub fn parse_ledger(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("{s:?} is not a number")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [c, c1] => Ok((c, c1)),
        _ => Err(format!("ledger {text:?} must be two numbers c,c1")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_eps_list("1, 0.5").unwrap(), vec![1.0, 0.5]);
        assert!(parse_eps_list("").is_err());
        assert!(parse_eps_list("0.5,-1").is_err());
        assert_eq!(parse_n_range("16:100").unwrap(), vec![16, 32, 64]);
        assert_eq!(parse_n_range("50").unwrap(), vec![50]);
        assert!(parse_n_range("9:3").is_err());
        assert_eq!(parse_ledger("1,0.25").unwrap(), (1.0, 0.25));
        assert!(parse_ledger("1").is_err());
    }
}

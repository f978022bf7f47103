//! Verification suites behind `netcap verify`.

use std::path::Path;

use netcap::capacity::MAX_NET_PARAMS;
use netcap::hard::boundary_pairs;
use netcap::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::{load_architecture, parse_architecture, to_value};
use crate::error::{CliError, CliResult};
use crate::report::Outcome;

pub const SUITES: [&str; 6] = ["codes", "uniform-bound", "packing", "epsilon-net", "separation", "membership"];

const FIXTURES: [(&str, &str); 2] = [
    ("tiny_1_1_1.json", include_str!("../fixtures/tiny_1_1_1.json")),
    ("shared_d2.json", include_str!("../fixtures/shared_d2.json")),
];

const DRAWS: usize = 200;
const PACKING_DRAWS: usize = 600;
const NET_SAMPLES: usize = 300;
const NET_EPS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
const REL_TOL: f64 = 1e-3;

#[derive(Serialize)]
struct SuiteResult {
    name: String,
    /// `None` when the suite had nothing it could check.
    pass: Option<bool>,
    detail: String,
    witness: Option<Value>,
}

impl SuiteResult {
    fn new(name: &str, pass: Option<bool>, detail: String, witness: Option<Value>) -> Self {
        Self { name: name.into(), pass, detail, witness }
    }
}

pub fn run(names: &[String], arch: Option<&Path>, seed: u64) -> CliResult<Outcome> {
    for n in names {
        if !SUITES.contains(&n.as_str()) {
            return Err(CliError::input(format!("unknown suite {n:?}; known: {}", SUITES.join(", "))));
        }
    }
    let archs: Vec<(String, Architecture)> = match arch {
        Some(p) => vec![(p.display().to_string(), load_architecture(p)?)],
        None => FIXTURES
            .iter()
            .map(|(name, text)| Ok((name.to_string(), parse_architecture(text, name)?)))
            .collect::<CliResult<_>>()?,
    };
    let mut results = Vec::new();
    for name in SUITES.iter().filter(|s| names.iter().any(|n| n == *s)) {
        let r = match *name {
            "codes" => codes(seed)?,
            "uniform-bound" => uniform_bound(&archs, seed)?,
            "packing" => packing(&archs, seed)?,
            "epsilon-net" => epsilon_net(&archs, seed)?,
            "separation" => separation(seed)?,
            "membership" => membership(seed)?,
            _ => unreachable!("names checked above"),
        };
        results.push(r);
    }
    let pass = results.iter().all(|r| r.pass != Some(false));
    Ok(Outcome {
        payload: json!({ "suites": to_value(&results) }),
        pass: Some(pass),
        tables: Vec::new(),
    })
}

fn random_params(arch: &Architecture, rng: &mut ChaCha8Rng) -> CliResult<ParamAssignment> {
    let r = arch.radius();
    let v = (0..arch.num_params()).map(|_| rng.gen_range(-r..=r)).collect();
    Ok(ParamAssignment::new(arch, v)?)
}

fn codes(seed: u64) -> CliResult<SuiteResult> {
    let mut notes = Vec::new();
    for m in [4usize, 8, 16, 32] {
        let code = gv_code(m, m as f64 / 2.0, seed)?;
        let need = 2f64.powf(m as f64 / 16.0).ceil() as usize;
        if code.len() < need {
            return Ok(SuiteResult::new("codes", Some(false), format!("m={m}: {} words < {need}", code.len()), None));
        }
        for i in 0..code.len() {
            for j in i + 1..code.len() {
                if 2 * code.l1(i, j) < m {
                    let w = json!({ "m": m, "pair": [i, j], "l1": code.l1(i, j) });
                    return Ok(SuiteResult::new("codes", Some(false), format!("m={m}: pair below m/2"), Some(w)));
                }
            }
        }
        notes.push(format!("m={m}: {} words", code.len()));
    }
    Ok(SuiteResult::new("codes", Some(true), notes.join("; "), None))
}

fn uniform_bound(archs: &[(String, Architecture)], seed: u64) -> CliResult<SuiteResult> {
    let mut worst = 0.0f64;
    for (name, arch) in archs {
        let grid = QuadratureGrid::default_for(arch.input_dim())?;
        let bounds: Vec<f64> = (1..=arch.depth()).map(|l| arch.uniform_output_bound(l)).collect::<Result<_>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..DRAWS {
            let p = random_params(arch, &mut rng)?;
            let net = arch.materialize(&p);
            let outs: Vec<Vec<Vec<f64>>> = grid.nodes().map(|x| net.layer_outputs(x)).collect();
            for (l, bound) in bounds.iter().enumerate() {
                for i in 0..outs[0][l].len() {
                    let norm: f64 = outs.iter().zip(grid.weights()).map(|(o, w)| w * o[l][i].abs()).sum();
                    if norm > *bound {
                        let w = json!({ "arch": name, "layer": l + 1, "neuron": i, "norm": norm, "bound": bound, "params": p.values() });
                        return Ok(SuiteResult::new("uniform-bound", Some(false), format!("{name}: norm above bound"), Some(w)));
                    }
                    worst = worst.max(norm / bound);
                }
            }
        }
    }
    Ok(SuiteResult::new(
        "uniform-bound",
        Some(true),
        format!("{} draws per architecture; max norm/bound {worst:.3e}", DRAWS),
        None,
    ))
}

fn packing(archs: &[(String, Architecture)], seed: u64) -> CliResult<SuiteResult> {
    let mut notes = Vec::new();
    for (name, arch) in archs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<ParamAssignment> = (0..PACKING_DRAWS).map(|_| random_params(arch, &mut rng)).collect::<CliResult<_>>()?;
        let grid = QuadratureGrid::default_for(arch.input_dim())?;
        let report = packing_vs_bound_report(arch, &[0.5, 0.25], &samples, &grid)?;
        if report.any_violation() {
            return Ok(SuiteResult::new("packing", Some(false), format!("{name}: packing exceeds bound"), Some(json_report(&report.to_json()))));
        }
        for row in &report.rows {
            notes.push(format!("{name} eps={}: {} <= 2^{:.1}", row.epsilon, row.empirical_packing, row.log2_tight));
        }
    }
    Ok(SuiteResult::new("packing", Some(true), notes.join("; "), None))
}

fn json_report(text: &str) -> Value {
    serde_json::from_str(text).expect("library JSON parses")
}

fn epsilon_net(archs: &[(String, Architecture)], seed: u64) -> CliResult<SuiteResult> {
    let mut notes = Vec::new();
    let mut checked = 0;
    for (name, arch) in archs {
        if arch.num_params() > MAX_NET_PARAMS {
            notes.push(format!("{name}: skipped, {} parameters", arch.num_params()));
            continue;
        }
        let Some((eps, mut net)) = NET_EPS
            .iter()
            .find_map(|&e| EpsilonNet::build(arch, e).ok().map(|n| (e, n)))
        else {
            notes.push(format!("{name}: skipped, net too large at every ε"));
            continue;
        };
        let grid = QuadratureGrid::default_for(arch.input_dim())?;
        let v = net.validate(&grid, NET_SAMPLES, seed)?.clone();
        let bound = network_covering_bound(arch, eps)?;
        let size_ok = (net.len() as f64).log2() <= bound.log2_tight;
        if !(v.pass && size_ok) {
            let w = json!({ "arch": name, "epsilon": eps, "points": net.len(), "validation": to_value(&v), "log2_tight": bound.log2_tight });
            return Ok(SuiteResult::new("epsilon-net", Some(false), format!("{name}: net check failed"), Some(w)));
        }
        checked += 1;
        notes.push(format!("{name}: eps={eps}, {} points, worst {:.3}", net.len(), v.max_distance));
    }
    let pass = (checked > 0).then_some(true);
    Ok(SuiteResult::new("epsilon-net", pass, notes.join("; "), None))
}

/// Small families: `(d, r, N*, c0)`, with `c0 = None` meaning the minimal admissible value.
const FAMILIES: [(usize, f64, usize, Option<f64>); 2] = [(1, 1.0, 2, Some(8.0)), (2, 1.0, 2, None)];

fn family(d: usize, r: f64, n_star: usize, c0: Option<f64>, seed: u64) -> CliResult<HardFamily> {
    let bump = match c0 {
        Some(c) => make_bump(d, r, c)?,
        None => match make_bump(d, r, f64::MIN_POSITIVE) {
            Err(Error::BumpInfeasible { minimal, .. }) => make_bump(d, r, minimal)?,
            other => other?,
        },
    };
    Ok(build_family(n_star, &bump, seed)?)
}

fn separation(seed: u64) -> CliResult<SuiteResult> {
    let mut notes = Vec::new();
    for (d, r, n_star, c0) in FAMILIES {
        let fam = family(d, r, n_star, c0, seed)?;
        let rep = verify_separation(&fam, 200, &fam.default_grid()?)?;
        let ok = !rep.violation
            && rep.est_tolerance < REL_TOL * rep.min_distance
            && rep.closed_form_rel_error < REL_TOL;
        if !ok {
            return Ok(SuiteResult::new("separation", Some(false), format!("d={d} r={r} N*={n_star}"), Some(to_value(&rep))));
        }
        notes.push(format!("d={d} r={r} N*={n_star}: min {:.4e} >= {:.4e}", rep.min_distance, rep.bound));
    }
    Ok(SuiteResult::new("separation", Some(true), notes.join("; "), None))
}

fn membership(seed: u64) -> CliResult<SuiteResult> {
    let mut notes = Vec::new();
    for (d, r, n_star, c0) in FAMILIES {
        let fam = family(d, r, n_star, c0, seed)?;
        let rep = verify_class_membership(&fam, 2, 1000)?;
        if !rep.pass {
            return Ok(SuiteResult::new("membership", Some(false), format!("d={d} r={r} N*={n_star}"), Some(to_value(&rep))));
        }
        let straddle = boundary_pairs(&fam, 50, 1e-4, seed)
            .iter()
            .filter(|(x, y)| fam.partition.locate(x) != fam.partition.locate(y))
            .count();
        notes.push(format!(
            "d={d} r={r} N*={n_star}: max ratio {:.3} vs c0 {:.3}, {straddle}/50 boundary pairs straddle",
            rep.max_ratio, rep.c0
        ));
    }
    Ok(SuiteResult::new("membership", Some(true), notes.join("; "), None))
}

use std::fs;
use std::path::Path;

use netcap::capacity::ConstantLedger;
use netcap::hard::uniform_points;
use netcap::*;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::report::Outcome;
use crate::spec::ExperimentSpec;
use crate::suites;

pub fn parse_architecture(text: &str, origin: &str) -> CliResult<Architecture> {
    serde_json::from_str(text).map_err(|e| {
        let kind = match e.classify() {
            serde_json::error::Category::Data => "validation error",
            _ => "parse error",
        };
        CliError::input(format!("{kind} in {origin}: {e}"))
    })
}

pub fn load_architecture(path: &Path) -> CliResult<Architecture> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    parse_architecture(&text, &path.display().to_string())
}

pub(crate) fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn json_text(text: &str) -> Value {
    serde_json::from_str(text).expect("library JSON parses")
}

pub fn run(spec: &ExperimentSpec) -> CliResult<Outcome> {
    match spec {
        ExperimentSpec::Analyze { arch, eps } => analyze(arch, eps),
        ExperimentSpec::HardInstance { .. } => hard_instance(spec),
        ExperimentSpec::Verify { suites, arch, seed } => suites::run(suites, arch.as_deref(), *seed),
        ExperimentSpec::Bounds { .. } => bounds(spec),
        ExperimentSpec::Gap { r, d, depth, n_values, radius, d_max, ledger } => {
            let params = RateParams {
                depth: *depth,
                radius: *radius,
                d_max: *d_max,
                ledger: constant_ledger(ledger.0, ledger.1, *d)?,
                ..RateParams::new(*depth, *d)?
            };
            let report = gap_report(*r, *d, n_values, params)?;
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            Ok(Outcome {
                payload: json_text(&report.to_json()),
                pass: None,
                tables: vec![("gap".into(), String::from_utf8(csv).expect("CSV is UTF-8"))],
            })
        }
    }
}

fn analyze(path: &Path, eps: &[f64]) -> CliResult<Outcome> {
    if eps.is_empty() {
        return Err(CliError::input("validation error: ε list is empty"));
    }
    let arch = load_architecture(path)?;
    let uniform: Vec<f64> = (1..=arch.depth())
        .map(|l| arch.uniform_output_bound(l))
        .collect::<Result<_>>()?;
    let bounds: Vec<CoveringBound> = eps
        .iter()
        .map(|&e| network_covering_bound(&arch, e))
        .collect::<Result<_>>()?;
    let mut csv = String::from("epsilon,log2_tight,log2_relaxed,log2_chain\n");
    for b in &bounds {
        let chain = b.log2_chain.map(|v| v.to_string()).unwrap_or_default();
        csv.push_str(&format!("{},{},{},{chain}\n", b.epsilon, b.log2_tight, b.log2_relaxed));
    }
    let payload = json!({
        "architecture": {
            "input_dim": arch.input_dim(),
            "depth": arch.depth(),
            "widths": arch.widths(),
            "radius": arch.radius(),
            "d_max": arch.d_max(),
            "num_params": arch.num_params(),
            "free_param_count": arch.free_param_count(),
        },
        "ledger": to_value(&ConstantLedger::for_architecture(&arch)?),
        "uniform_output_bounds": uniform,
        "covering": to_value(&bounds),
    });
    Ok(Outcome { payload, pass: None, tables: vec![("covering".into(), csv)] })
}

fn hard_instance(spec: &ExperimentSpec) -> CliResult<Outcome> {
    let ExperimentSpec::HardInstance {
        d, r, c0, nstar, n, beta, c_tilde1, c_tilde2, pairs, members, holder_pairs, seed,
    } = *spec
    else {
        unreachable!("dispatched on the variant")
    };
    let n_star = match (nstar, n) {
        (Some(k), _) => k,
        (None, Some(n)) => {
            let k = choose_nstar(n, d, r, beta, c_tilde1, c_tilde2)?;
            usize::try_from(k).map_err(|_| CliError::input(format!("N* = {k} does not fit in memory")))?
        }
        (None, None) => return Err(CliError::input("one of --nstar or --n is required")),
    };
    if n_star == 0 {
        return Err(CliError::input("N* must be at least 1"));
    }
    let bump = make_bump(d, r, c0)?;
    let family = build_family(n_star, &bump, seed)?;
    let grid = family.default_grid()?;
    let separation = verify_separation(&family, pairs, &grid)?;
    let membership = verify_class_membership(&family, members, holder_pairs)?;
    let localization = verify_localization(&family, &uniform_points(d, 2000, -1.0, 1.0, seed));
    let pass = !separation.violation && membership.pass && localization.pass;
    let payload = json!({
        "n_star": n_star,
        "members": family.len(),
        "family": json_text(&family.to_json()),
        "separation": to_value(&separation),
        "membership": to_value(&membership),
        "localization": to_value(&localization),
    });
    Ok(Outcome { payload, pass: Some(pass), tables: Vec::new() })
}

fn bounds(spec: &ExperimentSpec) -> CliResult<Outcome> {
    let ExperimentSpec::Bounds { r, d, n, depth, radius, d_max, ledger, beta, c_tilde1, c_tilde2, c0 } = *spec else {
        unreachable!("dispatched on the variant")
    };
    let ledger = constant_ledger(ledger.0, ledger.1, d)?;
    let deep = deep_net_lower_bound(n, depth, radius, d_max, r, d, &ledger)?;
    let relation = relation_lower_bound(RelationInputs { c_tilde1, c_tilde2, beta, n, r, d, c0 })?;
    let payload = json!({
        "deep_net": to_value(&deep),
        "relation": to_value(&relation),
    });
    Ok(Outcome { payload, pass: None, tables: Vec::new() })
}

//! Shared inputs for the criterion benches.

use netcap::net::presets;
use netcap::{ActivationSpec, Architecture, Error, HardFamily, Result};

/// Fully connected logistic network with the given widths and `R = 1`.
pub fn dense(widths: &[usize]) -> Architecture {
    presets::dense(widths, ActivationSpec::logistic(), 1.0).expect("valid widths")
}

/// Hard family at the smallest admissible smoothness constant.
pub fn tight_family(d: usize, r: f64, n_star: usize) -> Result<HardFamily> {
    let bump = match netcap::make_bump(d, r, f64::MIN_POSITIVE) {
        Err(Error::BumpInfeasible { minimal, .. }) => netcap::make_bump(d, r, minimal)?,
        other => other?,
    };
    netcap::build_family(n_star, &bump, 0)
}

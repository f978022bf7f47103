use std::io::Write;

use serde::{Deserialize, Serialize};

use super::bound::network_covering_bound;
use crate::error::{Error, Result};
use crate::net::{Architecture, ParamAssignment};
use crate::numerics::{greedy_packing_by, QuadratureGrid, SampledSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingRow {
    pub epsilon: f64,
    /// Greedy packing count of the sampled functions at separation `2ε`.
    pub empirical_packing: usize,
    pub log2_tight: f64,
    pub log2_relaxed: f64,
    /// Set when `log2(empirical_packing) > log2_tight`.
    pub violation: bool,
}

/// Empirical packing counts against the covering bound, one row per scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub n: usize,
    pub depth: usize,
    pub radius: f64,
    pub samples: usize,
    pub rows: Vec<PackingRow>,
}

impl PackingReport {
    pub fn any_violation(&self) -> bool {
        self.rows.iter().any(|r| r.violation)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["epsilon", "empirical_packing", "log2_tight", "log2_relaxed"])?;
        for r in &self.rows {
            w.write_record([
                r.epsilon.to_string(),
                r.empirical_packing.to_string(),
                r.log2_tight.to_string(),
                r.log2_relaxed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// For each `ε`, greedily pack the sampled network functions at `2ε` (in
/// sample order) and compare the count with the covering bound at `ε`.
pub fn packing_vs_bound_report(
    arch: &Architecture,
    epsilons: &[f64],
    param_samples: &[ParamAssignment],
    grid: &QuadratureGrid,
) -> Result<PackingReport> {
    if grid.dim() != arch.input_dim() {
        return Err(Error::Parameter("grid dimension differs from the input dimension".into()));
    }
    let values: Vec<Vec<f64>> = param_samples
        .iter()
        .map(|p| {
            let net = arch.materialize(p);
            grid.sample(|x| net.eval(x))
        })
        .collect();
    let labels = (0..values.len()).map(|i| format!("sample{i}")).collect();
    let set = SampledSet::from_values(labels, values, grid)?;
    let rows = epsilons
        .iter()
        .map(|&eps| {
            let bound = network_covering_bound(arch, eps)?;
            let count = greedy_packing_by(set.len(), 2.0 * eps, |i, j| set.distance(i, j)).len();
            Ok(PackingRow {
                epsilon: eps,
                empirical_packing: count,
                log2_tight: bound.log2_tight,
                log2_relaxed: bound.log2_relaxed,
                violation: (count as f64).log2() > bound.log2_tight,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PackingReport {
        n: arch.free_param_count(),
        depth: arch.depth(),
        radius: arch.radius(),
        samples: param_samples.len(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{presets, ActivationSpec};

    #[test]
    fn singleton_and_csv() {
        let arch = presets::dense(&[1, 1], ActivationSpec::logistic(), 1.0).unwrap();
        let grid = QuadratureGrid::default_for(1).unwrap();
        let p = ParamAssignment::new(&arch, vec![0.5, 0.0, 1.0]).unwrap();
        let rep = packing_vs_bound_report(&arch, &[0.1, 0.5], &[p], &grid).unwrap();
        assert!(rep.rows.iter().all(|r| r.empirical_packing == 1 && !r.violation));
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("epsilon,empirical_packing,log2_tight,log2_relaxed\n"));
        assert_eq!(text.lines().count(), 3);
    }
}

use serde::{Deserialize, Serialize};

use crate::capacity::ConstantLedger;
use crate::error::{Error, Result};
use crate::hard::choose_nstar;

/// Hypothesis `N(ε, V) <= C̃1 (C̃2 n^β / ε)^n` of the covering-to-lower-bound
/// transfer, together with the smoothness class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationInputs {
    pub c_tilde1: f64,
    pub c_tilde2: f64,
    pub beta: f64,
    pub n: u64,
    pub r: f64,
    pub d: usize,
    pub c0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeepNetInputs {
    pub n: u64,
    pub depth: usize,
    pub radius: f64,
    pub d_max: usize,
    pub r: f64,
    pub d: usize,
    pub ledger: ConstantLedger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Relation,
    DeepNet,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertificateInputs {
    Relation(RelationInputs),
    DeepNet(DeepNetInputs),
}

/// One named intermediate quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrailEntry {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCertificate {
    pub kind: CertificateKind,
    pub inputs: CertificateInputs,
    /// `C'` for the relation bound, `C` for the deep-net bound.
    pub constant: f64,
    pub trail: Vec<TrailEntry>,
    pub value: f64,
    pub n_star: Option<u64>,
}

impl LowerBoundCertificate {
    /// Recompute from the recorded inputs.
    pub fn recompute(&self) -> Result<Self> {
        match self.inputs {
            CertificateInputs::Relation(i) => relation_lower_bound(i),
            CertificateInputs::DeepNet(i) => deep_net_inputs_bound(i),
        }
    }

    pub fn trail_value(&self, name: &str) -> Option<f64> {
        self.trail.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

struct Trail(Vec<TrailEntry>);

impl Trail {
    fn push(&mut self, name: &str, value: f64) -> f64 {
        self.0.push(TrailEntry {
            name: name.to_string(),
            value,
        });
        value
    }
}

fn check_smoothness(r: f64, d: usize) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) || d == 0 {
        return Err(Error::Parameter(format!("need r > 0 and d >= 1, got r = {r}, d = {d}")));
    }
    Ok(())
}

/// `C' (n log2(n+1))^{-r/d}` with
/// `C' = ¼ d^{-d/2} [32 (1+β+3r/d) (log2(2C̃1 + 8 d^{d/2} (1+β+3r/d+C̃2)) + 1)]^{-r/d}`.
pub fn relation_lower_bound(inputs: RelationInputs) -> Result<LowerBoundCertificate> {
    let RelationInputs {
        c_tilde1,
        c_tilde2,
        beta,
        n,
        r,
        d,
        ..
    } = inputs;
    check_smoothness(r, d)?;
    if n == 0 || !(c_tilde1 > 0.0) || !(c_tilde2 > 0.0) || !(beta >= 0.0) {
        return Err(Error::Parameter("need n >= 1, C̃1 > 0, C̃2 > 0 and β >= 0".into()));
    }
    let df = d as f64;
    let rd = r / df;
    let mut t = Trail(Vec::new());
    let a = t.push("1 + beta + 3r/d", 1.0 + beta + 3.0 * rd);
    let dd = t.push("d^(d/2)", df.powf(df / 2.0));
    let inner = t.push("2 C1~ + 8 d^(d/2) (1 + beta + 3r/d + C2~)", 2.0 * c_tilde1 + 8.0 * dd * (a + c_tilde2));
    let log_inner = t.push("log2(inner)", inner.log2());
    let bracket = t.push("32 (1 + beta + 3r/d) (log2(inner) + 1)", 32.0 * a * (log_inner + 1.0));
    let constant = t.push("C'", 0.25 / dd * bracket.powf(-rd));
    let nf = n as f64;
    let size = t.push("n log2(n + 1)", nf * (nf + 1.0).log2());
    let value = t.push("value", constant * size.powf(-rd));
    let n_star = match choose_nstar(n, d, r, beta, c_tilde1, c_tilde2) {
        Ok(k) => Some(k),
        Err(Error::Size(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(LowerBoundCertificate {
        kind: CertificateKind::Relation,
        inputs: CertificateInputs::Relation(inputs),
        constant,
        trail: t.0,
        value,
        n_star,
    })
}

/// `C [L² n log2 n log2(R D_max)]^{-r/d}` with `C = 3^{-r/d} C̄1'` and
/// `C̄1' = ½ [128 (1 + 3r/d) (log2(48 d^{d/2} c3) + 1)]^{-r/d}`.
pub fn deep_net_lower_bound(
    n: u64,
    depth: usize,
    radius: f64,
    d_max: usize,
    r: f64,
    d: usize,
    ledger: &ConstantLedger,
) -> Result<LowerBoundCertificate> {
    deep_net_inputs_bound(DeepNetInputs {
        n,
        depth,
        radius,
        d_max,
        r,
        d,
        ledger: *ledger,
    })
}

fn deep_net_inputs_bound(inputs: DeepNetInputs) -> Result<LowerBoundCertificate> {
    let DeepNetInputs {
        n,
        depth,
        radius,
        d_max,
        r,
        d,
        ledger,
    } = inputs;
    check_smoothness(r, d)?;
    if n < 2 {
        return Err(Error::Domain(format!("n = {n}: log2 n must be positive, need n >= 2")));
    }
    if depth == 0 {
        return Err(Error::Parameter("depth must be >= 1".into()));
    }
    if !(radius * d_max as f64 >= 2.0) {
        return Err(Error::Domain(format!(
            "R D_max = {} must be at least 2",
            radius * d_max as f64
        )));
    }
    let df = d as f64;
    let rd = r / df;
    let mut t = Trail(Vec::new());
    let c3 = t.push("c3", ledger.c3);
    let log_term = t.push("log2(48 d^(d/2) c3)", (48.0 * df.powf(df / 2.0) * c3).log2());
    let bracket = t.push("128 (1 + 3r/d) (log2(48 d^(d/2) c3) + 1)", 128.0 * (1.0 + 3.0 * rd) * (log_term + 1.0));
    let c_bar = t.push("C1'bar", 0.5 * bracket.powf(-rd));
    let three = t.push("3^(-r/d)", 3f64.powf(-rd));
    let constant = t.push("C", three * c_bar);
    let nf = n as f64;
    let size = t.push(
        "L^2 n log2(n) log2(R D_max)",
        (depth * depth) as f64 * nf * nf.log2() * (radius * d_max as f64).log2(),
    );
    let value = t.push("value", constant * size.powf(-rd));
    Ok(LowerBoundCertificate {
        kind: CertificateKind::DeepNet,
        inputs: CertificateInputs::DeepNet(inputs),
        constant,
        trail: t.0,
        value,
        n_star: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::constant_ledger;

    fn rel(n: u64, r: f64) -> RelationInputs {
        RelationInputs {
            c_tilde1: 1.0,
            c_tilde2: 10.0,
            beta: 0.0,
            n,
            r,
            d: 1,
            c0: 1.0,
        }
    }

    #[test]
    fn relation_constant() {
        let c = relation_lower_bound(rel(4, 1.0)).unwrap();
        let expect = 0.25 / (128.0 * (114f64.log2() + 1.0));
        assert!((c.constant - expect).abs() <= 1e-15 * expect);
        assert!((c.constant - 2.493_492_180_367_697e-4).abs() < 1e-12 * 2.5e-4);
        assert_eq!(c.n_star, Some(3524));
        let v: Vec<f64> = [2, 4, 8].iter().map(|&n| relation_lower_bound(rel(n, 1.0)).unwrap().value).collect();
        assert!(v[0] > v[1] && v[1] > v[2]);
        assert!(relation_lower_bound(rel(4, 2.0)).unwrap().constant < c.constant);
    }

    #[test]
    fn deep_constant() {
        let ledger = constant_ledger(1.0, 1.0, 1).unwrap();
        let c = deep_net_lower_bound(16, 1, 1.0, 2, 1.0, 1, &ledger).unwrap();
        let c_bar = c.trail_value("C1'bar").unwrap();
        assert!((c_bar - 7.817595135560241e-5).abs() < 1e-12 * 7.8e-5);
        assert!((c.constant - 2.605865045186747e-5).abs() < 1e-12 * 2.6e-5);
        let c4 = deep_net_lower_bound(16, 4, 1.0, 2, 1.0, 1, &ledger).unwrap();
        assert!((c.value / c4.value - 16.0).abs() < 1e-12);
        assert!(matches!(deep_net_lower_bound(1, 1, 1.0, 2, 1.0, 1, &ledger), Err(Error::Domain(_))));
        assert!(deep_net_lower_bound(4, 1, 1.0, 1, 1.0, 1, &ledger).is_err());
    }

    #[test]
    fn recompute_is_bit_exact() {
        let ledger = constant_ledger(2.0, 0.5, 3).unwrap();
        let c = deep_net_lower_bound(1000, 3, 1.5, 7, 2.5, 3, &ledger).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: LowerBoundCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back.recompute().unwrap().value.to_bits(), c.value.to_bits());
        let c = relation_lower_bound(rel(77, 0.7)).unwrap();
        let back: LowerBoundCertificate = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back.recompute().unwrap(), c);
    }
}

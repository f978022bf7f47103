use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::lower::deep_net_lower_bound;
use crate::capacity::{constant_ledger, ConstantLedger};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateCurveId {
    /// `n^{-r/d}`
    ShallowUpper,
    /// `n^{-r/d} ln n`
    ReluDeepUpper,
    /// The deep-net lower bound with its explicit constant.
    DeepLower,
    /// `log2 N ∝ n log2(R/ε)` for one hidden layer.
    ShallowCovering,
    /// `log2 N ∝ L n log2(R/ε)` for piecewise-linear activations.
    VcCovering,
}

impl RateCurveId {
    pub const ALL: [RateCurveId; 5] = [
        RateCurveId::ShallowUpper,
        RateCurveId::ReluDeepUpper,
        RateCurveId::DeepLower,
        RateCurveId::ShallowCovering,
        RateCurveId::VcCovering,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RateCurveId::ShallowUpper => "shallow-upper",
            RateCurveId::ReluDeepUpper => "relu-deep-upper",
            RateCurveId::DeepLower => "deep-lower",
            RateCurveId::ShallowCovering => "shallow-covering",
            RateCurveId::VcCovering => "vc-covering",
        }
    }
}

impl fmt::Display for RateCurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RateCurveId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RateCurveId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown rate curve '{s}'")))
    }
}

/// Network-side parameters shared by the curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub depth: usize,
    pub radius: f64,
    pub d_max: usize,
    /// Scale for the covering curves.
    pub epsilon: f64,
    /// Supplies `c3` for the deep-net lower bound.
    pub ledger: ConstantLedger,
}

impl RateParams {
    /// `R = 1`, `D_max = 2`, `ε = 0.1`, `c = c1 = 1`.
    pub fn new(depth: usize, d: usize) -> Result<Self> {
        Ok(Self {
            depth,
            radius: 1.0,
            d_max: 2,
            epsilon: 0.1,
            ledger: constant_ledger(1.0, 1.0, d)?,
        })
    }
}

/// An evaluable rate. Curves without a known constant are meaningful only up
/// to scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub id: RateCurveId,
    pub r: f64,
    pub d: usize,
    /// Power of `n`.
    pub exponent: f64,
    /// Power of the logarithmic factor in `n` (0 if none).
    pub log_power: f64,
    pub constant_known: bool,
    pub params: RateParams,
}

pub fn rate_curve(id: RateCurveId, r: f64, d: usize, params: RateParams) -> Result<RateCurve> {
    if !(r > 0.0) || d == 0 {
        return Err(Error::Parameter(format!("need r > 0 and d >= 1, got r = {r}, d = {d}")));
    }
    let rd = r / d as f64;
    let (exponent, log_power, constant_known) = match id {
        RateCurveId::ShallowUpper => (-rd, 0.0, false),
        RateCurveId::ReluDeepUpper => (-rd, 1.0, false),
        RateCurveId::DeepLower => (-rd, -rd, true),
        RateCurveId::ShallowCovering | RateCurveId::VcCovering => (1.0, 0.0, false),
    };
    Ok(RateCurve {
        id,
        r,
        d,
        exponent,
        log_power,
        constant_known,
        params,
    })
}

impl RateCurve {
    pub fn eval(&self, n: u64) -> Result<f64> {
        let nf = n as f64;
        let p = &self.params;
        if n == 0 {
            return Err(Error::Parameter("n must be >= 1".into()));
        }
        Ok(match self.id {
            RateCurveId::ShallowUpper => nf.powf(self.exponent),
            RateCurveId::ReluDeepUpper => nf.powf(self.exponent) * nf.ln(),
            RateCurveId::DeepLower => {
                deep_net_lower_bound(n, p.depth, p.radius, p.d_max, self.r, self.d, &p.ledger)?.value
            }
            RateCurveId::ShallowCovering => nf * (p.radius / p.epsilon).log2(),
            RateCurveId::VcCovering => p.depth as f64 * nf * (p.radius / p.epsilon).log2(),
        })
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    crate::util::linear_fit(&lx, &ly).0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub curve: RateCurveId,
    /// Absolute when the constant is known, otherwise normalized to 1 at the
    /// smallest `n`.
    pub value: f64,
    pub constant_known: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub n: u64,
    pub entries: Vec<GapEntry>,
    /// Normalized shallow upper rate over normalized deep lower bound.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub r: f64,
    pub d: usize,
    pub params: RateParams,
    pub rows: Vec<GapRow>,
}

/// Upper rates against the deep-net lower bound over `n_values` (sorted and
/// deduplicated; each must be at least 2).
pub fn gap_report(r: f64, d: usize, n_values: &[u64], params: RateParams) -> Result<GapReport> {
    let mut ns = n_values.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let Some(&n0) = ns.first() else {
        return Err(Error::Parameter("n range is empty".into()));
    };
    let curves = RateCurveId::ALL
        .into_iter()
        .map(|id| rate_curve(id, r, d, params))
        .collect::<Result<Vec<_>>>()?;
    let base = curves.iter().map(|c| c.eval(n0)).collect::<Result<Vec<_>>>()?;
    let shallow = curves.iter().position(|c| c.id == RateCurveId::ShallowUpper).expect("present");
    let lower = curves.iter().position(|c| c.id == RateCurveId::DeepLower).expect("present");
    let rows = ns
        .iter()
        .map(|&n| {
            let raw = curves.iter().map(|c| c.eval(n)).collect::<Result<Vec<_>>>()?;
            let ratio = (raw[shallow] / base[shallow]) / (raw[lower] / base[lower]);
            let entries = curves
                .iter()
                .zip(raw.iter().zip(&base))
                .map(|(c, (&v, &b))| GapEntry {
                    curve: c.id,
                    value: if c.constant_known { v } else { v / b },
                    constant_known: c.constant_known,
                })
                .collect();
            Ok(GapRow { n, entries, ratio })
        })
        .collect::<Result<_>>()?;
    Ok(GapReport { r, d, params, rows })
}

impl GapReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Long format: `n, curve_id, value_or_normalized, constant_known`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "curve_id", "value_or_normalized", "constant_known"])?;
        for row in &self.rows {
            for e in &row.entries {
                w.write_record([
                    row.n.to_string(),
                    e.curve.to_string(),
                    e.value.to_string(),
                    e.constant_known.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

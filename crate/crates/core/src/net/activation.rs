use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The univariate nonlinearity applied componentwise in a layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationRule {
    Logistic,
    /// `(tanh(t) + 1) / 2`
    TanhSigmoid,
    /// `arctan(t) / π + 1/2`
    ArctanSigmoid,
    /// `exp(-a exp(-b t))`
    Gompertz { a: f64, b: f64 },
    Relu,
    /// `exp(-t²)`
    Gaussian,
    /// Piecewise-linear interpolation through `points` (sorted by abscissa),
    /// extended linearly beyond the first and last point.
    CustomTable { points: Vec<(f64, f64)> },
}

/// An activation together with the two constants that bound it:
/// `|σ(t) - σ(t')| <= lipschitz_c1 |t - t'|` and `|σ(t)| <= growth_c (|t| + 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ActivationRule", into = "ActivationRule")]
pub struct ActivationSpec {
    pub name: String,
    pub lipschitz_c1: f64,
    pub growth_c: f64,
    pub rule: ActivationRule,
}

/// Outcome of a sampled check of the two activation constants.
#[derive(Clone, Debug, Serialize)]
pub struct ActivationCertificate {
    pub name: String,
    pub max_lipschitz_ratio: f64,
    pub max_growth_ratio: f64,
    pub pass: bool,
}

impl ActivationSpec {
    pub fn logistic() -> Self {
        Self::from_rule(ActivationRule::Logistic).unwrap()
    }

    pub fn relu() -> Self {
        Self::from_rule(ActivationRule::Relu).unwrap()
    }

    pub fn tanh_sigmoid() -> Self {
        Self::from_rule(ActivationRule::TanhSigmoid).unwrap()
    }

    pub fn arctan_sigmoid() -> Self {
        Self::from_rule(ActivationRule::ArctanSigmoid).unwrap()
    }

    pub fn gaussian() -> Self {
        Self::from_rule(ActivationRule::Gaussian).unwrap()
    }

    pub fn gompertz(a: f64, b: f64) -> Result<Self> {
        Self::from_rule(ActivationRule::Gompertz { a, b })
    }

    pub fn custom_table(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::from_rule(ActivationRule::CustomTable { points })
    }

    /// All parameter-free built-in activations.
    pub fn builtins() -> Vec<Self> {
        vec![
            Self::logistic(),
            Self::tanh_sigmoid(),
            Self::arctan_sigmoid(),
            Self::gompertz(1.0, 1.0).unwrap(),
            Self::relu(),
            Self::gaussian(),
        ]
    }

    /// Attach the declared constants to a rule.
    ///
    /// Built-ins use `c1 = 1, c = 1` except the logistic function (`c1 = 1/4`)
    /// and Gompertz curves with `b > e`, whose slope reaches `b / e`.
    pub fn from_rule(rule: ActivationRule) -> Result<Self> {
        let (name, c1, c) = match &rule {
            ActivationRule::Logistic => ("logistic".to_string(), 0.25, 1.0),
            ActivationRule::TanhSigmoid => ("tanh-sigmoid".to_string(), 1.0, 1.0),
            ActivationRule::ArctanSigmoid => ("arctan-sigmoid".to_string(), 1.0, 1.0),
            ActivationRule::Gompertz { a, b } => {
                if !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(Error::Parameter(format!(
                        "gompertz parameters must be positive, got a = {a}, b = {b}"
                    )));
                }
                (
                    format!("gompertz({a},{b})"),
                    f64::max(1.0, b / std::f64::consts::E),
                    1.0,
                )
            }
            ActivationRule::Relu => ("relu".to_string(), 1.0, 1.0),
            ActivationRule::Gaussian => ("gaussian".to_string(), 1.0, 1.0),
            ActivationRule::CustomTable { points } => {
                let (c1, c) = table_constants(points)?;
                ("custom-table".to_string(), c1, c)
            }
        };
        Ok(Self {
            name,
            lipschitz_c1: c1,
            growth_c: c,
            rule,
        })
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match &self.rule {
            ActivationRule::Logistic => logistic(t),
            ActivationRule::TanhSigmoid => 0.5 * (t.tanh() + 1.0),
            ActivationRule::ArctanSigmoid => t.atan() / std::f64::consts::PI + 0.5,
            ActivationRule::Gompertz { a, b } => (-a * (-b * t).exp()).exp(),
            ActivationRule::Relu => t.max(0.0),
            ActivationRule::Gaussian => (-t * t).exp(),
            ActivationRule::CustomTable { points } => interpolate(points, t),
        }
    }

    /// True when `σ(t) -> 0` as `t -> -∞` and `σ(t) -> 1` as `t -> +∞`.
    pub fn is_sigmoidal(&self) -> bool {
        match &self.rule {
            ActivationRule::Logistic
            | ActivationRule::TanhSigmoid
            | ActivationRule::ArctanSigmoid
            | ActivationRule::Gompertz { .. } => true,
            ActivationRule::Relu | ActivationRule::Gaussian => false,
            ActivationRule::CustomTable { points } => {
                let n = points.len();
                n >= 2
                    && points[0].1 == 0.0
                    && points[1].1 == 0.0
                    && points[n - 1].1 == 1.0
                    && points[n - 2].1 == 1.0
            }
        }
    }

    /// Sample `n_pairs` pairs in `[-t_max, t_max]` and compare the observed
    /// Lipschitz and growth ratios against the declared constants.
    pub fn certify(&self, t_max: f64, n_pairs: usize, seed: u64) -> ActivationCertificate {
        let mut rng = crate::util::rng(seed);
        let mut lip = 0.0f64;
        let mut growth = 0.0f64;
        for i in 0..n_pairs {
            let t = rng.gen_range(-t_max..=t_max);
            // every fourth pair is a close pair, where slopes are resolved
            let t2 = if i % 4 == 0 {
                t + rng.gen_range(-1e-3..=1e-3)
            } else {
                rng.gen_range(-t_max..=t_max)
            };
            let (s, s2) = (self.eval(t), self.eval(t2));
            if t != t2 {
                lip = lip.max((s - s2).abs() / (t - t2).abs());
            }
            growth = growth
                .max(s.abs() / (t.abs() + 1.0))
                .max(s2.abs() / (t2.abs() + 1.0));
        }
        // one ulp-scale allowance for the difference quotient
        let pass = lip <= self.lipschitz_c1 * (1.0 + 1e-9) && growth <= self.growth_c;
        ActivationCertificate {
            name: self.name.clone(),
            max_lipschitz_ratio: lip,
            max_growth_ratio: growth,
            pass,
        }
    }
}

impl TryFrom<ActivationRule> for ActivationSpec {
    type Error = Error;

    fn try_from(rule: ActivationRule) -> Result<Self> {
        Self::from_rule(rule)
    }
}

impl From<ActivationSpec> for ActivationRule {
    fn from(spec: ActivationSpec) -> Self {
        spec.rule
    }
}

#[inline]
fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn interpolate(points: &[(f64, f64)], t: f64) -> f64 {
    let n = points.len();
    let seg = match points.iter().position(|&(x, _)| x > t) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => n - 2,
    };
    let (x0, y0) = points[seg];
    let (x1, y1) = points[seg + 1];
    y0 + (y1 - y0) * (t - x0) / (x1 - x0)
}

fn table_constants(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Parameter(
            "custom activation table needs at least two points".into(),
        ));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Parameter("custom activation table has non-finite entries".into()));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Parameter(
            "custom activation table abscissae must be strictly increasing".into(),
        ));
    }
    let slopes: Vec<f64> = points
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let c1 = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if c1 == 0.0 {
        return Err(Error::Parameter("custom activation table is constant".into()));
    }
    // |σ(t)|/(|t|+1) on a linear piece peaks at a breakpoint or at infinity
    // breakpoints plus t = 0, where |t| + 1 has its kink
    let at_points = points
        .iter()
        .copied()
        .chain(std::iter::once((0.0, interpolate(points, 0.0))))
        .fold(0.0f64, |m, (x, y)| m.max(y.abs() / (x.abs() + 1.0)));
    let tails = slopes[0].abs().max(slopes[slopes.len() - 1].abs());
    Ok((c1, 1.0f64.max(at_points).max(tails)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_constants_hold_on_samples() {
        for act in ActivationSpec::builtins() {
            let cert = act.certify(1e3, 10_000, 7);
            assert!(cert.pass, "{cert:?}");
        }
    }

    #[test]
    fn logistic_is_half_at_zero() {
        assert_eq!(ActivationSpec::logistic().eval(0.0), 0.5);
        assert_eq!(ActivationSpec::logistic().lipschitz_c1, 0.25);
    }

    #[test]
    fn steep_gompertz_gets_larger_slope_constant() {
        let act = ActivationSpec::gompertz(2.0, 10.0).unwrap();
        assert!((act.lipschitz_c1 - 10.0 / std::f64::consts::E).abs() < 1e-12);
        assert!(act.certify(50.0, 20_000, 3).pass);
    }

    #[test]
    fn custom_table_constants() {
        let act = ActivationSpec::custom_table(vec![(-1.0, 0.0), (0.0, 0.0), (2.0, 4.0)]).unwrap();
        assert_eq!(act.lipschitz_c1, 2.0);
        assert_eq!(act.growth_c, 2.0);
        assert_eq!(act.eval(3.0), 6.0);
        assert_eq!(act.eval(-5.0), 0.0);
        assert!(act.certify(100.0, 5_000, 1).pass);
        assert!(ActivationSpec::custom_table(vec![(0.0, 1.0)]).is_err());
        assert!(ActivationSpec::custom_table(vec![(0.0, 1.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn sigmoidal_classification() {
        assert!(ActivationSpec::logistic().is_sigmoidal());
        assert!(!ActivationSpec::relu().is_sigmoidal());
        assert!(!ActivationSpec::gaussian().is_sigmoidal());
        let step = ActivationSpec::custom_table(vec![(-2.0, 0.0), (-1.0, 0.0), (1.0, 1.0), (2.0, 1.0)])
            .unwrap();
        assert!(step.is_sigmoidal());
    }

    #[test]
    fn json_uses_rule_only() {
        let act = ActivationSpec::gompertz(1.0, 2.0).unwrap();
        let s = serde_json::to_string(&act).unwrap();
        assert_eq!(s, r#"{"gompertz":{"a":1.0,"b":2.0}}"#);
        let back: ActivationSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, act);
        let relu: ActivationSpec = serde_json::from_str(r#""relu""#).unwrap();
        assert_eq!(relu.name, "relu");
    }
}

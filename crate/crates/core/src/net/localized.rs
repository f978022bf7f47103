use super::activation::ActivationSpec;
use super::arch::{Architecture, EntrySpec, LayerStructure, ParamAssignment};
use crate::error::{Error, Result};

/// Two-hidden-layer network with `2d + 1` neurons approximating the indicator
/// of the box `[lower, upper] ⊂ [-1, 1]^d`.
///
/// Layer 1 computes `σ(K(x_j - a_j))` and `σ(K(b_j - x_j))` for every
/// coordinate; layer 2 computes `σ(K(Σ h - (2d - 1/2)))`. All nonzero entries
/// are free parameters, and `R` is the smallest radius containing them.
pub fn localized_net(
    lower: &[f64],
    upper: &[f64],
    sharpness: f64,
    activation: ActivationSpec,
) -> Result<(Architecture, ParamAssignment)> {
    let d = lower.len();
    if !activation.is_sigmoidal() {
        return Err(Error::Unsupported(format!(
            "localized approximation needs a sigmoidal activation, got {}",
            activation.name
        )));
    }
    if d == 0 || upper.len() != d {
        return Err(Error::Parameter("box corners must have equal, positive dimension".into()));
    }
    if lower.iter().zip(upper).any(|(a, b)| !(a < b)) {
        return Err(Error::Parameter("box must satisfy lower < upper componentwise".into()));
    }
    if lower.iter().chain(upper).any(|v| !(-1.0..=1.0).contains(v)) {
        return Err(Error::Parameter("box must lie inside [-1, 1]^d".into()));
    }
    if !(sharpness > 0.0 && sharpness.is_finite()) {
        return Err(Error::Parameter(format!("sharpness must be positive, got {sharpness}")));
    }

    let k = sharpness;
    let threshold = 2.0 * d as f64 - 0.5;
    let mut values = Vec::new();
    let mut free = |v: f64| {
        values.push(v);
        EntrySpec::Free(values.len() - 1)
    };

    let mut w1 = Vec::with_capacity(2 * d);
    let mut b1 = Vec::with_capacity(2 * d);
    for j in 0..d {
        for (sign, offset) in [(1.0, -k * lower[j]), (-1.0, k * upper[j])] {
            let row = (0..d)
                .map(|c| if c == j { free(sign * k) } else { EntrySpec::Fixed(0.0) })
                .collect();
            w1.push(row);
            b1.push(free(offset));
        }
    }
    let w2 = vec![(0..2 * d).map(|_| free(k)).collect()];
    let b2 = vec![free(-k * threshold)];
    let output = vec![free(1.0)];

    let radius = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let arch = Architecture::new(
        d,
        radius,
        vec![
            LayerStructure {
                d_in: d,
                d_out: 2 * d,
                activation: activation.clone(),
                weights: w1,
                biases: b1,
            },
            LayerStructure {
                d_in: 2 * d,
                d_out: 1,
                activation,
                weights: w2,
                biases: b2,
            },
        ],
        output,
    )?;
    let params = ParamAssignment::new(&arch, values)?;
    Ok((arch, params))
}

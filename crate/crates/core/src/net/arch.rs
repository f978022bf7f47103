use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::activation::ActivationSpec;
use crate::error::{Error, Result};

/// One weight, bias or output coefficient: either a constant or a reference
/// into the flat free-parameter vector. Several entries may share an index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntrySpec {
    Fixed(f64),
    Free(usize),
}

impl EntrySpec {
    #[inline]
    pub fn resolve(&self, params: &[f64]) -> f64 {
        match *self {
            EntrySpec::Fixed(v) => v,
            EntrySpec::Free(i) => params[i],
        }
    }

    fn free_index(&self) -> Option<usize> {
        match *self {
            EntrySpec::Free(i) => Some(i),
            EntrySpec::Fixed(_) => None,
        }
    }
}

fn distinct_free<'a>(entries: impl IntoIterator<Item = &'a EntrySpec>) -> BTreeSet<usize> {
    entries.into_iter().filter_map(EntrySpec::free_index).collect()
}

/// A layer `h_k = σ_k(W_k h_{k-1} + b_k)` with structured `W_k` and `b_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerStructure {
    pub d_in: usize,
    pub d_out: usize,
    pub activation: ActivationSpec,
    /// `d_out` rows of `d_in` entries.
    pub weights: Vec<Vec<EntrySpec>>,
    pub biases: Vec<EntrySpec>,
}

impl LayerStructure {
    /// Number of distinct free indices among the weights.
    pub fn free_w(&self) -> usize {
        distinct_free(self.weights.iter().flatten()).len()
    }

    /// Number of distinct free indices among the biases.
    pub fn free_b(&self) -> usize {
        distinct_free(&self.biases).len()
    }

    /// Largest number of free entries in a single weight row.
    pub(crate) fn max_free_per_row(&self) -> usize {
        self.weights
            .iter()
            .map(|row| row.iter().filter(|e| matches!(e, EntrySpec::Free(_))).count())
            .max()
            .unwrap_or(0)
    }

    /// Upper bound on `Σ_j |W_ij|` over all rows, for any admissible parameters.
    pub(crate) fn max_row_abs_sum(&self, radius: f64) -> f64 {
        self.weights
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| match *e {
                        EntrySpec::Fixed(v) => v.abs(),
                        EntrySpec::Free(_) => radius,
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// A deep network with fixed structure: `x ↦ a · h_L(x)`.
///
/// Constructed only through [`Architecture::new`] (or deserialization, which
/// goes through the same checks), so every value of this type is well formed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArchitecture")]
pub struct Architecture {
    input_dim: usize,
    radius: f64,
    layers: Vec<LayerStructure>,
    output: Vec<EntrySpec>,
    #[serde(skip)]
    num_params: usize,
}

#[derive(Deserialize)]
struct RawArchitecture {
    input_dim: usize,
    radius: f64,
    layers: Vec<LayerStructure>,
    output: Vec<EntrySpec>,
}

impl TryFrom<RawArchitecture> for Architecture {
    type Error = Error;

    fn try_from(raw: RawArchitecture) -> Result<Self> {
        Architecture::new(raw.input_dim, raw.radius, raw.layers, raw.output)
    }
}

impl Architecture {
    /// Validate and assemble an architecture. Every violation found is
    /// reported, one per line, in a single [`Error::Structure`].
    pub fn new(
        input_dim: usize,
        radius: f64,
        layers: Vec<LayerStructure>,
        output: Vec<EntrySpec>,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        if input_dim == 0 {
            problems.push("input_dim must be positive".to_string());
        }
        if !(radius >= 1.0 && radius.is_finite()) {
            problems.push(format!("radius must be a finite number >= 1, got {radius}"));
        }
        if layers.is_empty() {
            problems.push("at least one layer is required".to_string());
        }
        let mut prev = input_dim;
        for (k, layer) in layers.iter().enumerate() {
            let k = k + 1;
            if layer.d_in != prev {
                problems.push(format!(
                    "layer {k}: d_in = {} but previous width is {prev}",
                    layer.d_in
                ));
            }
            if layer.d_out == 0 {
                problems.push(format!("layer {k}: d_out must be positive"));
            }
            if layer.weights.len() != layer.d_out {
                problems.push(format!(
                    "layer {k}: weights has {} rows, expected d_out = {}",
                    layer.weights.len(),
                    layer.d_out
                ));
            }
            for (i, row) in layer.weights.iter().enumerate() {
                if row.len() != layer.d_in {
                    problems.push(format!(
                        "layer {k}: weight row {i} has {} entries, expected d_in = {}",
                        row.len(),
                        layer.d_in
                    ));
                }
            }
            if layer.biases.len() != layer.d_out {
                problems.push(format!(
                    "layer {k}: biases has {} entries, expected d_out = {}",
                    layer.biases.len(),
                    layer.d_out
                ));
            }
            check_fixed(
                layer.weights.iter().flatten().chain(&layer.biases),
                radius,
                &format!("layer {k}"),
                &mut problems,
            );
            prev = layer.d_out;
        }
        if output.len() != prev {
            problems.push(format!(
                "output has {} entries, expected d_L = {prev}",
                output.len()
            ));
        }
        check_fixed(&output, radius, "output", &mut problems);

        let all: BTreeSet<usize> = distinct_free(
            layers
                .iter()
                .flat_map(|l| l.weights.iter().flatten().chain(&l.biases))
                .chain(&output),
        );
        let num_params = all.len();
        if let Some(&max) = all.iter().next_back() {
            if max + 1 != num_params {
                let missing: Vec<usize> = (0..=max).filter(|i| !all.contains(i)).collect();
                problems.push(format!(
                    "free indices must cover 0..{num_params} without gaps; missing {missing:?}"
                ));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Structure(problems.join("\n")));
        }
        Ok(Self {
            input_dim,
            radius,
            layers,
            output,
            num_params,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("architecture serializes")
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn layers(&self) -> &[LayerStructure] {
        &self.layers
    }

    pub fn output(&self) -> &[EntrySpec] {
        &self.output
    }

    /// Depth `L`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Size of the flat parameter index space.
    pub fn num_params(&self) -> usize {
        self.num_params
    }

    /// Number of distinct free indices in the output vector.
    pub fn free_a(&self) -> usize {
        distinct_free(&self.output).len()
    }

    /// `n = Σ_k (F_{k,w} + F_{k,b}) + F_{L,a}`, with distinct indices counted
    /// per block. Equals [`num_params`](Self::num_params) unless an index is
    /// shared between blocks.
    pub fn free_param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.free_w() + l.free_b())
            .sum::<usize>()
            + self.free_a()
    }

    /// Widths `d_0, ..., d_L`.
    pub fn widths(&self) -> Vec<usize> {
        std::iter::once(self.input_dim)
            .chain(self.layers.iter().map(|l| l.d_out))
            .collect()
    }

    /// `D_max = max_ℓ d_ℓ`.
    pub fn d_max(&self) -> usize {
        self.widths().into_iter().max().unwrap_or(0)
    }

    /// `D_ℓ = d_ℓ ⋯ d_0`.
    pub fn d_prod(&self, ell: usize) -> f64 {
        crate::util::product(self.widths().into_iter().take(ell + 1))
    }

    /// Largest growth constant `c` over layers `1..=ell`.
    pub fn growth_c(&self, ell: usize) -> f64 {
        self.layers[..ell]
            .iter()
            .map(|l| l.activation.growth_c)
            .fold(1.0, f64::max)
    }

    /// Largest Lipschitz constant `c1` over all layers.
    pub fn lipschitz_c1(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| l.activation.lipschitz_c1)
            .fold(0.0, f64::max)
    }

    /// Resolve every entry against `params`.
    pub fn materialize(&self, params: &ParamAssignment) -> DenseNet {
        let p = params.values();
        let layers = self
            .layers
            .iter()
            .map(|l| DenseLayer {
                d_in: l.d_in,
                d_out: l.d_out,
                weights: l.weights.iter().flatten().map(|e| e.resolve(p)).collect(),
                biases: l.biases.iter().map(|e| e.resolve(p)).collect(),
                activation: l.activation.clone(),
            })
            .collect();
        DenseNet {
            layers,
            output: self.output.iter().map(|e| e.resolve(p)).collect(),
        }
    }

    fn check_point(&self, params: &ParamAssignment, x: &[f64]) -> Result<()> {
        if params.len() != self.num_params {
            return Err(Error::Parameter(format!(
                "expected {} parameters, got {}",
                self.num_params,
                params.len()
            )));
        }
        if x.len() != self.input_dim {
            return Err(Error::Domain(format!(
                "input has dimension {}, expected {}",
                x.len(),
                self.input_dim
            )));
        }
        if let Some(v) = x.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("input coordinate {v} outside [-1, 1]")));
        }
        Ok(())
    }

    /// `a · h_L(x)` for `x ∈ [-1, 1]^d`.
    pub fn evaluate(&self, params: &ParamAssignment, x: &[f64]) -> Result<f64> {
        self.check_point(params, x)?;
        Ok(self.materialize(params).eval(x))
    }

    /// The hidden-layer vectors `h_1, ..., h_L` at `x`.
    pub fn layer_outputs(&self, params: &ParamAssignment, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_point(params, x)?;
        Ok(self.materialize(params).layer_outputs(x))
    }

    /// Uniform bound on `max_i ‖h_ℓ^i‖_{L1([-1,1]^d)}`:
    /// `(c (1 + 2^{d+1}) R)^ℓ · d_{ℓ-1} ⋯ d_0`, with `c` the largest growth
    /// constant among layers `1..=ℓ`.
    pub fn uniform_output_bound(&self, ell: usize) -> Result<f64> {
        if ell == 0 || ell > self.depth() {
            return Err(Error::Parameter(format!(
                "layer index {ell} outside 1..={}",
                self.depth()
            )));
        }
        let c = self.growth_c(ell);
        let base = c * (1.0 + 2f64.powi(self.input_dim as i32 + 1)) * self.radius;
        Ok(base.powi(ell as i32) * self.d_prod(ell - 1))
    }
}

fn check_fixed<'a>(
    entries: impl IntoIterator<Item = &'a EntrySpec>,
    radius: f64,
    place: &str,
    problems: &mut Vec<String>,
) {
    for e in entries {
        if let EntrySpec::Fixed(v) = *e {
            if !v.is_finite() || v.abs() > radius {
                problems.push(format!("{place}: fixed entry {v} outside [-R, R] with R = {radius}"));
            }
        }
    }
}

/// `𝓐_L = d_L + Σ_k (d_{k-1} d_k + d_k)`: free parameters of a fully
/// connected network with the given widths `d_0, ..., d_L`.
pub fn dense_param_count(widths: &[usize]) -> Result<usize> {
    if widths.len() < 2 {
        return Err(Error::Parameter(
            "need at least d_0 and d_1 (one layer)".into(),
        ));
    }
    let hidden: usize = widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
    Ok(hidden + widths[widths.len() - 1])
}

/// Values for the free parameters of an [`Architecture`], each in `[-R, R]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamAssignment {
    values: Vec<f64>,
}

impl ParamAssignment {
    pub fn new(arch: &Architecture, values: Vec<f64>) -> Result<Self> {
        if values.len() != arch.num_params() {
            return Err(Error::Parameter(format!(
                "expected {} parameters, got {}",
                arch.num_params(),
                values.len()
            )));
        }
        let r = arch.radius();
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || v.abs() > r)
        {
            return Err(Error::Domain(format!(
                "parameter {i} = {v} outside [-R, R] with R = {r}"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct DenseLayer {
    pub d_in: usize,
    pub d_out: usize,
    /// Row-major `d_out × d_in`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub activation: ActivationSpec,
}

impl DenseLayer {
    fn forward(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for (row, b) in self.weights.chunks_exact(self.d_in).zip(&self.biases) {
            let z: f64 = row.iter().zip(input).map(|(w, h)| w * h).sum::<f64>() + b;
            out.push(self.activation.eval(z));
        }
    }
}

/// A network with every entry resolved to a number; cheap to evaluate.
#[derive(Clone, Debug)]
pub struct DenseNet {
    pub layers: Vec<DenseLayer>,
    pub output: Vec<f64>,
}

impl DenseNet {
    /// Evaluate without domain checks.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut h = x.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers {
            layer.forward(&h, &mut next);
            std::mem::swap(&mut h, &mut next);
        }
        self.output.iter().zip(&h).map(|(a, v)| a * v).sum()
    }

    pub fn layer_outputs(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut outs: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let input = outs.last().map(|v| v.as_slice()).unwrap_or(x);
            let mut next = Vec::with_capacity(layer.d_out);
            layer.forward(input, &mut next);
            outs.push(next);
        }
        outs
    }
}

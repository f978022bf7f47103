use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bound::build_interval_net;
use crate::error::{Error, Result};
use crate::net::{Architecture, EntrySpec, ParamAssignment};
use crate::numerics::QuadratureGrid;
use crate::util::rng;

/// Enumeration guards for explicit nets.
pub const MAX_NET_PARAMS: usize = 6;
pub const MAX_POINTS_PER_PARAM: usize = 32;
pub const MAX_NET_POINTS: usize = 1 << 20;
pub const DEFAULT_VALIDATION_SAMPLES: usize = 1000;

/// Per-layer terms of the perturbation estimate, all per unit parameter step:
/// `e_ℓ <= weight + bias + propagation · e_{ℓ-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSensitivity {
    pub layer: usize,
    /// `c1 · (free entries per row) · U_{ℓ-1}`
    pub weight: f64,
    /// `c1 · 2^d` when the layer has free biases
    pub bias: f64,
    /// `c1 · max_i Σ_j |W_ij|`
    pub propagation: f64,
    /// Bound on `max_i ‖h_ℓ^i − h̃_ℓ^i‖_{L1}` per unit step.
    pub e: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    pub layers: Vec<LayerSensitivity>,
    /// `(free output entries) · U_L`
    pub output_weight: f64,
    /// `Σ_i |a_i| · e_L`
    pub output_propagation: f64,
    /// `S`: L1 distance between the two network functions per unit step.
    pub total: f64,
}

/// Lipschitz constant of the parameter-to-function map, from `∞`-norm on
/// parameters to L1 on `[-1, 1]^d`.
pub fn sensitivity(arch: &Architecture) -> Result<Sensitivity> {
    let d = arch.input_dim();
    let r = arch.radius();
    // ‖x_j‖_{L1([-1,1]^d)} = 2^{d-1}
    let mut u_prev = 2f64.powi(d as i32 - 1);
    let mut e_prev = 0.0;
    let mut layers = Vec::with_capacity(arch.depth());
    for (k, layer) in arch.layers().iter().enumerate() {
        let c1 = layer.activation.lipschitz_c1;
        let weight = c1 * layer.max_free_per_row() as f64 * u_prev;
        let bias = if layer.free_b() > 0 { c1 * 2f64.powi(d as i32) } else { 0.0 };
        let propagation = c1 * layer.max_row_abs_sum(r);
        let e = weight + bias + propagation * e_prev;
        layers.push(LayerSensitivity {
            layer: k + 1,
            weight,
            bias,
            propagation,
            e,
        });
        e_prev = e;
        u_prev = arch.uniform_output_bound(k + 1)?;
    }
    let free_out = arch.output().iter().filter(|e| matches!(e, EntrySpec::Free(_))).count();
    let out_abs: f64 = arch
        .output()
        .iter()
        .map(|e| match *e {
            EntrySpec::Fixed(v) => v.abs(),
            EntrySpec::Free(_) => r,
        })
        .sum();
    let output_weight = free_out as f64 * u_prev;
    let output_propagation = out_abs * e_prev;
    Ok(Sensitivity {
        layers,
        output_weight,
        output_propagation,
        total: output_weight + output_propagation,
    })
}

/// Outcome of checking an explicit net against random parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetValidation {
    pub samples: usize,
    pub seed: u64,
    pub max_distance: f64,
    /// Quadrature tolerance of the worst distance.
    pub est_tolerance: f64,
    pub pass: bool,
}

/// A product grid over parameter space whose image is an `ε`-net in L1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsilonNet {
    pub architecture: Architecture,
    pub epsilon: f64,
    /// Certified L1 covering radius.
    pub radius: f64,
    /// Per-parameter covering radius `δ = ε / S`.
    pub spacing: f64,
    pub sensitivity: Sensitivity,
    /// Values used on every parameter axis.
    pub axis: Vec<f64>,
    pub points: Vec<ParamAssignment>,
    pub validation: Option<NetValidation>,
}

/// Build the explicit net and validate it on `grid` with
/// [`DEFAULT_VALIDATION_SAMPLES`] random parameter draws.
pub fn enumerate_epsilon_net(arch: &Architecture, eps: f64, grid: &QuadratureGrid) -> Result<EpsilonNet> {
    let mut net = EpsilonNet::build(arch, eps)?;
    net.validate(grid, DEFAULT_VALIDATION_SAMPLES, 0)?;
    Ok(net)
}

impl EpsilonNet {
    pub fn build(arch: &Architecture, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Parameter(format!("epsilon must be positive, got {eps}")));
        }
        let n = arch.num_params();
        if n > MAX_NET_PARAMS {
            return Err(Error::Size(format!(
                "{n} free parameters exceed the enumeration limit of {MAX_NET_PARAMS}"
            )));
        }
        let sens = sensitivity(arch)?;
        let r = arch.radius();
        let spacing = if sens.total > 0.0 { eps / sens.total } else { f64::INFINITY };
        let axis = if spacing.is_finite() {
            build_interval_net(r, spacing)?
        } else {
            vec![0.0]
        };
        if axis.len() > MAX_POINTS_PER_PARAM {
            return Err(Error::Size(format!(
                "{} grid points per parameter exceed the limit of {MAX_POINTS_PER_PARAM}; increase epsilon",
                axis.len()
            )));
        }
        let total = (axis.len() as f64).powi(n as i32);
        if total > MAX_NET_POINTS as f64 {
            return Err(Error::Size(format!(
                "{total} net points exceed the limit of {MAX_NET_POINTS}"
            )));
        }
        let total = total as usize;
        let mut points = Vec::with_capacity(total);
        for mut code in 0..total {
            let values = (0..n)
                .map(|_| {
                    let v = axis[code % axis.len()];
                    code /= axis.len();
                    v
                })
                .collect();
            points.push(ParamAssignment::new(arch, values)?);
        }
        Ok(Self {
            architecture: arch.clone(),
            epsilon: eps,
            radius: eps,
            spacing,
            sensitivity: sens,
            axis,
            points,
            validation: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nearest net point, coordinate by coordinate.
    pub fn nearest(&self, params: &[f64]) -> Vec<f64> {
        params
            .iter()
            .map(|&t| {
                *self
                    .axis
                    .iter()
                    .min_by(|a, b| (*a - t).abs().total_cmp(&(*b - t).abs()))
                    .expect("axis is never empty")
            })
            .collect()
    }

    /// Draw random parameters, snap each to the net, and record the largest
    /// L1 distance between the two network functions.
    pub fn validate(&mut self, grid: &QuadratureGrid, samples: usize, seed: u64) -> Result<&NetValidation> {
        let arch = &self.architecture;
        let n = arch.num_params();
        let r = arch.radius();
        let mut rng = rng(seed);
        let draws: Vec<Vec<f64>> = (0..samples)
            .map(|_| (0..n).map(|_| rng.gen_range(-r..=r)).collect())
            .collect();
        let pairs: Vec<(ParamAssignment, ParamAssignment)> = draws
            .into_iter()
            .map(|p| {
                let q = self.nearest(&p);
                Ok((ParamAssignment::new(arch, p)?, ParamAssignment::new(arch, q)?))
            })
            .collect::<Result<_>>()?;
        let dists: Vec<f64> = pairs
            .par_iter()
            .map(|(p, q)| {
                let (f, g) = (arch.materialize(p), arch.materialize(q));
                grid.integrate(|x| (f.eval(x) - g.eval(x)).abs())
            })
            .collect();
        let (worst, max_distance) = dists
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
        let est_tolerance = match pairs.get(worst) {
            Some((p, q)) => {
                let (f, g) = (arch.materialize(p), arch.materialize(q));
                grid.estimate(|x| (f.eval(x) - g.eval(x)).abs())?.est_tolerance
            }
            None => 0.0,
        };
        self.validation = Some(NetValidation {
            samples,
            seed,
            max_distance,
            est_tolerance,
            pass: max_distance <= self.radius + est_tolerance,
        });
        Ok(self.validation.as_ref().expect("just set"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::network_covering_bound;
    use crate::net::{presets, ActivationSpec, LayerStructure};

    fn output_only() -> Architecture {
        let layer = LayerStructure {
            d_in: 1,
            d_out: 1,
            activation: ActivationSpec::logistic(),
            weights: vec![vec![EntrySpec::Fixed(1.0)]],
            biases: vec![EntrySpec::Fixed(0.0)],
        };
        Architecture::new(1, 1.0, vec![layer], vec![EntrySpec::Free(0)]).unwrap()
    }

    #[test]
    fn single_output_weight() {
        let arch = output_only();
        let grid = QuadratureGrid::default_for(1).unwrap();
        let eps = 0.5;
        let net = enumerate_epsilon_net(&arch, eps, &grid).unwrap();
        let s = net.sensitivity.total;
        assert!(net.len() as f64 <= 2.0 * s / eps);
        assert!(net.validation.as_ref().unwrap().pass);
        let bound = network_covering_bound(&arch, eps).unwrap();
        assert!((net.len() as f64).log2() <= bound.log2_tight);
    }

    #[test]
    fn huge_epsilon_gives_one_point() {
        let arch = presets::dense(&[1, 1], ActivationSpec::logistic(), 1.0).unwrap();
        let grid = QuadratureGrid::default_for(1).unwrap();
        let net = enumerate_epsilon_net(&arch, 1e6, &grid).unwrap();
        assert_eq!(net.len(), 1);
    }

    #[test]
    fn guards() {
        let wide = presets::dense(&[1, 2, 1], ActivationSpec::logistic(), 1.0).unwrap();
        assert!(matches!(EpsilonNet::build(&wide, 1.0), Err(Error::Size(_))));
        let small = presets::dense(&[1, 1], ActivationSpec::logistic(), 1.0).unwrap();
        assert!(matches!(EpsilonNet::build(&small, 1e-6), Err(Error::Size(_))));
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable that overrides the default number of nodes per axis.
pub const QUAD_NODES_ENV: &str = "NETCAP_QUAD_NODES";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureScheme {
    MidpointTensor,
    GaussLegendreTensor,
}

/// Tensor-product quadrature rule on `[-1, 1]^d`.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    dim: usize,
    nodes_per_axis: usize,
    scheme: QuadratureScheme,
    /// Flattened `len() × dim` node coordinates.
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// A quadrature value with `|value(m) - value(2m)|` as its error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub est_tolerance: f64,
}

impl QuadratureGrid {
    pub fn new(dim: usize, nodes_per_axis: usize, scheme: QuadratureScheme) -> Result<Self> {
        if dim == 0 || nodes_per_axis == 0 {
            return Err(Error::Parameter(
                "quadrature needs positive dimension and node count".into(),
            ));
        }
        let total = nodes_per_axis
            .checked_pow(dim as u32)
            .filter(|&t| t <= 1 << 26)
            .ok_or_else(|| {
                Error::Size(format!("{nodes_per_axis}^{dim} quadrature nodes is too many"))
            })?;
        let (x1, w1) = match scheme {
            QuadratureScheme::MidpointTensor => midpoint_1d(nodes_per_axis),
            QuadratureScheme::GaussLegendreTensor => gauss_legendre_1d(nodes_per_axis),
        };
        let mut nodes = Vec::with_capacity(total * dim);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let mut w = 1.0;
            for &i in &idx {
                nodes.push(x1[i]);
                w *= w1[i];
            }
            weights.push(w);
            // odometer, last axis fastest
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < nodes_per_axis {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(Self {
            dim,
            nodes_per_axis,
            scheme,
            nodes,
            weights,
        })
    }

    /// Gauss–Legendre with 64 nodes per axis for `d <= 2`, 16 for `d = 3`,
    /// 8 beyond; `NETCAP_QUAD_NODES` overrides the node count.
    pub fn default_for(dim: usize) -> Result<Self> {
        let m = nodes_from_env()?.unwrap_or(match dim {
            0..=2 => 64,
            3 => 16,
            _ => 8,
        });
        Self::new(dim, m, QuadratureScheme::GaussLegendreTensor)
    }

    /// Midpoint rule whose cells nest inside the partition of `[0, 1]^d` into
    /// `cells_per_unit^d` subcubes. The node count is the smallest multiple of
    /// `2 · cells_per_unit` that is at least `min_nodes`.
    pub fn partition_aligned(dim: usize, cells_per_unit: usize, min_nodes: usize) -> Result<Self> {
        let step = 2 * cells_per_unit.max(1);
        let m = min_nodes.max(step).div_ceil(step) * step;
        Self::new(dim, m, QuadratureScheme::MidpointTensor)
    }

    /// The same scheme with twice as many nodes per axis.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.dim, 2 * self.nodes_per_axis, self.scheme)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.dim)
    }

    /// `Σ_i w_i g(x_i)` summed in node order.
    pub fn integrate(&self, g: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes()
            .zip(&self.weights)
            .map(|(x, w)| w * g(x))
            .sum()
    }

    /// Values of `g` at every node.
    pub fn sample(&self, g: impl Fn(&[f64]) -> f64 + Sync + Send) -> Vec<f64> {
        use rayon::prelude::*;
        self.nodes.par_chunks_exact(self.dim).map(g).collect()
    }

    /// `Σ_i w_i |a_i - b_i|` for sampled values on this grid.
    pub fn weighted_l1(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (x, y))| w * (x - y).abs())
            .sum()
    }

    /// Integrate on this grid and its refinement.
    pub fn estimate(&self, g: impl Fn(&[f64]) -> f64) -> Result<Estimate> {
        let coarse = self.integrate(&g);
        let fine = self.refined()?.integrate(&g);
        Ok(Estimate {
            value: coarse,
            est_tolerance: (coarse - fine).abs(),
        })
    }
}

pub(crate) fn nodes_from_env() -> Result<Option<usize>> {
    match std::env::var(QUAD_NODES_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&m| m > 0)
            .map(Some)
            .ok_or_else(|| Error::Parameter(format!("{QUAD_NODES_ENV}={s} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

fn midpoint_1d(m: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 / m as f64;
    let x = (0..m).map(|i| -1.0 + (i as f64 + 0.5) * h).collect();
    (x, vec![h; m])
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_m`.
pub(crate) fn gauss_legendre_1d(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let n = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

/// `(P_m(z), P_m'(z))` by the three-term recurrence.
fn legendre(m: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

use serde::{Deserialize, Serialize};

use super::ledger::ConstantLedger;
use crate::error::{Error, Result};
use crate::net::Architecture;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Parameter(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// `log2` of the covering number of the set of `d_out × d_in` matrices with
/// `free_count` free entries in `[-R, R]`: `F log2(2 d_out d_in R / ε)`,
/// or 0 once a single point suffices.
pub fn matrix_net_size(d_out: usize, d_in: usize, free_count: usize, radius: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let scale = 2.0 * d_out as f64 * d_in as f64 * radius;
    if free_count == 0 || eps >= scale {
        return Ok(0.0);
    }
    Ok(free_count as f64 * (scale / eps).log2())
}

/// Midpoints of a partition of `[-R, R]` into cells of width `2ε`:
/// `-R + ε, -R + 3ε, ...`, `ceil(R / ε)` points, clamped into `[-R, R]`.
/// Every `t ∈ [-R, R]` lies within `ε` of some point.
pub fn build_interval_net(radius: f64, eps: f64) -> Result<Vec<f64>> {
    check_eps(eps)?;
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!("radius must be positive, got {radius}")));
    }
    if eps >= radius {
        return Ok(vec![0.0]);
    }
    let count = (radius / eps).ceil() as usize;
    Ok((0..count)
        .map(|k| (-radius + (2 * k + 1) as f64 * eps).min(radius))
        .collect())
}

/// `log2` bound on the covering number of the ℓ-th hidden-layer map class,
/// obtained by unrolling the layer recursion down to the first layer.
/// Each layer contributes `F_ℓ [ℓ log2(c1' R) + 2 log2 D_ℓ − log2 ε]`,
/// clamped at zero, and passes `ε / ((c1' R)^{ℓ−1} D_ℓ)` downward.
pub fn layer_recursion_bound(arch: &Architecture, ell: usize, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if ell == 0 || ell > arch.depth() {
        return Err(Error::Parameter(format!("layer index {ell} outside 1..={}", arch.depth())));
    }
    let ledger = ConstantLedger::for_architecture(arch)?;
    let log_cr = (ledger.c1_prime * arch.radius()).log2();
    let mut total = 0.0;
    let mut log_eps = eps.log2();
    for k in (1..=ell).rev() {
        let layer = &arch.layers()[k - 1];
        let f = (layer.free_w() + layer.free_b()) as f64;
        let log_d = arch.d_prod(k).log2();
        let term = if k == 1 {
            f * (log_cr + arch.d_prod(1).log2() - log_eps)
        } else {
            f * (k as f64 * log_cr + 2.0 * log_d - log_eps)
        };
        total += term.max(0.0);
        log_eps -= (k as f64 - 1.0) * log_cr + log_d;
    }
    Ok(total)
}

/// The quantities the covering bound depends on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringInputs {
    pub n: usize,
    pub depth: usize,
    pub radius: f64,
    pub d_max: usize,
    /// `D_L = d_L ⋯ d_0`
    pub d_l: f64,
}

impl CoveringInputs {
    pub fn of(arch: &Architecture) -> Self {
        Self {
            n: arch.free_param_count(),
            depth: arch.depth(),
            radius: arch.radius(),
            d_max: arch.d_max(),
            d_l: arch.d_prod(arch.depth()),
        }
    }
}

/// Covering-number bounds in `log2`, at one scale `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringBound {
    pub epsilon: f64,
    /// `log2 [((c3 R)^{L+1} D_L^3)^{(L+1) n} ε^{-n}]`
    pub log2_tight: f64,
    /// `log2 [(c3 R D_max)^{3 (L+1)^2 n} ε^{-n}]`
    pub log2_relaxed: f64,
    /// `log2` of the product `B_{L+1}^{F_{L,a}} Π_ℓ B_ℓ^{F_ℓ + Σ_{j≤ℓ} F_j} ε^{-n}`
    /// before the `B_ℓ <= B_{L+1} D_L` relaxation; present when computed from
    /// an architecture.
    pub log2_chain: Option<f64>,
    pub ledger: ConstantLedger,
    pub inputs: CoveringInputs,
}

impl CoveringBound {
    pub fn from_inputs(inputs: CoveringInputs, ledger: ConstantLedger, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let n = inputs.n as f64;
        let l1 = (inputs.depth + 1) as f64;
        let log_cr = (ledger.c3 * inputs.radius).log2();
        let log2_tight = l1 * n * (l1 * log_cr + 3.0 * inputs.d_l.log2()) - n * eps.log2();
        let log2_relaxed =
            3.0 * l1 * l1 * n * (log_cr + (inputs.d_max as f64).log2()) - n * eps.log2();
        Ok(Self {
            epsilon: eps,
            log2_tight,
            log2_relaxed,
            log2_chain: None,
            ledger,
            inputs,
        })
    }
}

pub fn network_covering_bound(arch: &Architecture, eps: f64) -> Result<CoveringBound> {
    let ledger = ConstantLedger::for_architecture(arch)?;
    let mut bound = CoveringBound::from_inputs(CoveringInputs::of(arch), ledger, eps)?;
    let depth = arch.depth();
    let f: Vec<f64> = arch
        .layers()
        .iter()
        .map(|l| (l.free_w() + l.free_b()) as f64)
        .collect();
    let mut chain = arch.free_a() as f64 * ledger.log2_b_ell(arch, depth + 1)?;
    let mut prefix = 0.0;
    for ell in 1..=depth {
        prefix += f[ell - 1];
        chain += (f[ell - 1] + prefix) * ledger.log2_b_ell(arch, ell)?;
    }
    chain -= arch.free_param_count() as f64 * eps.log2();
    bound.log2_chain = Some(chain);
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{presets, ActivationSpec};

    #[test]
    fn matrix_sizes() {
        let v = matrix_net_size(2, 3, 4, 1.0, 0.5).unwrap();
        assert!((v - 4.0 * 24f64.log2()).abs() < 1e-12);
        assert!((v - 18.3398).abs() < 1e-3);
        assert_eq!(matrix_net_size(2, 3, 0, 1.0, 0.5).unwrap(), 0.0);
        assert_eq!(matrix_net_size(2, 3, 4, 1.0, 12.0).unwrap(), 0.0);
        let doubled = matrix_net_size(2, 3, 4, 2.0, 0.5).unwrap();
        assert!((doubled - v - 4.0).abs() < 1e-12);
        assert!(matrix_net_size(2, 3, 4, 1.0, 0.0).is_err());
    }

    #[test]
    fn interval_nets() {
        assert_eq!(build_interval_net(1.0, 0.5).unwrap(), vec![-0.5, 0.5]);
        assert_eq!(build_interval_net(1.0, 1.0).unwrap(), vec![0.0]);
        for &(r, e) in &[(1.0, 0.3), (2.5, 0.07), (1.0, 0.999), (3.0, 0.5)] {
            let net = build_interval_net(r, e).unwrap();
            assert!(net.len() as f64 <= 2.0 * r / e);
            for i in 0..=1000 {
                let t = -r + 2.0 * r * i as f64 / 1000.0;
                assert!(net.iter().any(|p| (p - t).abs() <= e + 1e-12), "{t} {r} {e}");
            }
            assert!(net.iter().all(|p| p.abs() <= r));
        }
    }

    #[test]
    fn tight_example() {
        let arch = presets::dense(&[1, 1, 1], ActivationSpec::relu(), 1.0).unwrap();
        assert_eq!(arch.free_param_count(), 5);
        let b = network_covering_bound(&arch, 1.0).unwrap();
        assert!((b.log2_tight - 45.0 * 60f64.log2()).abs() < 1e-9);
        assert!((b.log2_tight - 265.8).abs() < 0.05);
        assert!(b.log2_relaxed >= b.log2_tight);
        assert!(b.log2_chain.unwrap() <= b.log2_tight);
        let half = network_covering_bound(&arch, 0.5).unwrap();
        assert!((half.log2_tight - b.log2_tight - 5.0).abs() < 1e-9);
        assert!((half.log2_relaxed - b.log2_relaxed - 5.0).abs() < 1e-9);
    }

    #[test]
    fn recursion_base_case() {
        // one layer with c1' R D_1 = 30 and two free parameters
        let arch = presets::dense(&[1, 1], ActivationSpec::relu(), 1.0).unwrap();
        let v = layer_recursion_bound(&arch, 1, 1.0).unwrap();
        assert!((v - 2.0 * 30f64.log2()).abs() < 1e-12);
        assert_eq!(layer_recursion_bound(&arch, 1, 30.0).unwrap(), 0.0);
        let deep = presets::dense(&[1, 2, 2], ActivationSpec::relu(), 1.0).unwrap();
        for eps in [0.01, 0.1, 1.0, 10.0] {
            let one = layer_recursion_bound(&deep, 1, eps).unwrap();
            let two = layer_recursion_bound(&deep, 2, eps).unwrap();
            assert!(two >= one);
        }
    }
}

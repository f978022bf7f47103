use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::Architecture;

/// Derived constants of the covering-number argument for inputs in `[-1, 1]^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantLedger {
    pub c: f64,
    pub c1: f64,
    pub d: usize,
    /// `6 c1 c (1 + 2^{d+1})`
    pub c1_prime: f64,
    /// `2 c (1 + 2^{d+1})`
    pub c2_prime: f64,
    /// `2 max(c1', c2')`
    pub c3: f64,
}

pub fn constant_ledger(c: f64, c1: f64, d: usize) -> Result<ConstantLedger> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("growth constant c must be >= 1, got {c}")));
    }
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(Error::Parameter(format!("Lipschitz constant c1 must be > 0, got {c1}")));
    }
    if d == 0 {
        return Err(Error::Parameter("input dimension must be >= 1".into()));
    }
    let k = 1.0 + 2f64.powi(d as i32 + 1);
    let c1_prime = 6.0 * c1 * c * k;
    let c2_prime = 2.0 * c * k;
    Ok(ConstantLedger {
        c,
        c1,
        d,
        c1_prime,
        c2_prime,
        c3: 2.0 * c1_prime.max(c2_prime),
    })
}

impl ConstantLedger {
    /// Ledger for an architecture: `c` and `c1` are the largest over its layers.
    pub fn for_architecture(arch: &Architecture) -> Result<Self> {
        constant_ledger(arch.growth_c(arch.depth()), arch.lipschitz_c1(), arch.input_dim())
    }

    /// `log2 B_ℓ` for `1 <= ℓ <= L + 1`:
    /// `B_ℓ = 2 (max(c1', c2') R)^ℓ D_ℓ^2 D_{ℓ+1}` for `ℓ < L`,
    /// `B_L = 2 (max R)^L D_L^2`, `B_{L+1} = 2 (max R)^{L+1} D_L^2`.
    pub fn log2_b_ell(&self, arch: &Architecture, ell: usize) -> Result<f64> {
        let depth = arch.depth();
        if ell == 0 || ell > depth + 1 {
            return Err(Error::Parameter(format!("B index {ell} outside 1..={}", depth + 1)));
        }
        let m = self.c1_prime.max(self.c2_prime) * arch.radius();
        let d = |k: usize| arch.d_prod(k).log2();
        let tail = if ell < depth {
            2.0 * d(ell) + d(ell + 1)
        } else {
            2.0 * d(depth)
        };
        Ok(1.0 + ell as f64 * m.log2() + tail)
    }
}

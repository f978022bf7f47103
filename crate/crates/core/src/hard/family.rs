use serde::{Deserialize, Serialize};

use super::bump::BumpSpec;
use super::code::{gv_code, SignCode};
use crate::error::{Error, Result};
use crate::numerics::{FunctionHandle, QuadratureGrid};

/// Largest number of cells a family may have.
pub const MAX_CELLS: usize = 1 << 16;

/// `(N*)^d` subcubes of side `1/N*` tiling `[0, 1]^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPartition {
    pub n_star: usize,
    pub d: usize,
}

impl GridPartition {
    pub fn new(n_star: usize, d: usize) -> Result<Self> {
        if n_star == 0 || d == 0 {
            return Err(Error::Parameter("N* and d must be >= 1".into()));
        }
        let cells = (n_star as f64).powi(d as i32);
        if cells > MAX_CELLS as f64 {
            return Err(Error::Size(format!(
                "(N*)^d = {cells:e} cells exceed the limit of {MAX_CELLS}"
            )));
        }
        Ok(Self { n_star, d })
    }

    pub fn cells(&self) -> usize {
        self.n_star.pow(self.d as u32)
    }

    /// Per-axis indices of cell `k` (axis 0 varies fastest).
    pub fn digits(&self, mut k: usize) -> Vec<usize> {
        (0..self.d)
            .map(|_| {
                let i = k % self.n_star;
                k /= self.n_star;
                i
            })
            .collect()
    }

    /// `ξ_k`, the centre of cell `k`.
    pub fn center(&self, k: usize) -> Vec<f64> {
        let n = self.n_star as f64;
        self.digits(k).into_iter().map(|i| (i as f64 + 0.5) / n).collect()
    }

    /// Cell containing `x`, or `None` outside `[0, 1]^d`. Points on a shared
    /// face belong to the cell on the upper side.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let n = self.n_star;
        let mut k = 0;
        for &t in x.iter().rev() {
            if !(0.0..=1.0).contains(&t) {
                return None;
            }
            let i = ((t * n as f64).floor() as usize).min(n - 1);
            k = k * n + i;
        }
        Some(k)
    }
}

/// Sign-coded sums of scaled bumps, `f_ε = Σ_k ε_k (N*)^{-r} g(N*(x − ξ_k))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardFamily {
    pub d: usize,
    pub r: f64,
    pub c0: f64,
    pub n_star: usize,
    pub seed: u64,
    pub bump: BumpSpec,
    pub partition: GridPartition,
    pub code: SignCode,
}

/// ℓ1 distance the code must reach so that distinct members are at least
/// `½ d^{-d/2} (N*)^{-r}` apart: `max(m/2, m d^{-d/2} / (2‖g‖₁))`, rounded
/// up to an even integer.
pub fn required_code_distance(m: usize, bump: &BumpSpec) -> f64 {
    let d = bump.d as f64;
    let from_norm = m as f64 * d.powf(-d / 2.0) / (2.0 * bump.l1_norm());
    let target = (m as f64 / 2.0).max(from_norm);
    2.0 * (target / 2.0).ceil()
}

pub fn build_family(n_star: usize, bump: &BumpSpec, seed: u64) -> Result<HardFamily> {
    let partition = GridPartition::new(n_star, bump.d)?;
    let m = partition.cells();
    let code = gv_code(m, required_code_distance(m, bump), seed)?;
    HardFamily::new(bump.clone(), partition, code, seed)
}

impl HardFamily {
    pub fn new(bump: BumpSpec, partition: GridPartition, code: SignCode, seed: u64) -> Result<Self> {
        if partition.d != bump.d || code.m() != partition.cells() {
            return Err(Error::Parameter(
                "code length, partition and bump dimension disagree".into(),
            ));
        }
        Ok(Self {
            d: bump.d,
            r: bump.r,
            c0: bump.c0,
            n_star: partition.n_star,
            seed,
            bump,
            partition,
            code,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: HardFamily = serde_json::from_str(text)?;
        HardFamily::new(f.bump, f.partition, f.code, f.seed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family serializes")
    }

    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }

    /// `(N*)^{-r}`, the sup-norm of every member.
    pub fn amplitude(&self) -> f64 {
        (self.n_star as f64).powf(-self.r)
    }

    /// `g_k(x) = (N*)^{-r} g(N*(x − ξ_k))`.
    pub fn g_k(&self, k: usize, x: &[f64]) -> f64 {
        let n = self.n_star as f64;
        let local: Vec<f64> = x
            .iter()
            .zip(self.partition.center(k))
            .map(|(t, c)| n * (t - c))
            .collect();
        self.amplitude() * self.bump.eval(&local)
    }

    /// Member value for an explicit sign vector, using only the cell of `x`.
    pub fn eval_signs(&self, signs: &[i8], x: &[f64]) -> f64 {
        match self.partition.locate(x) {
            Some(k) => signs[k] as f64 * self.g_k(k, x),
            None => 0.0,
        }
    }

    /// `∂^α` of a member in closed form.
    pub fn partial_signs(&self, signs: &[i8], alpha: &[usize], x: &[f64]) -> f64 {
        let Some(k) = self.partition.locate(x) else {
            return 0.0;
        };
        let n = self.n_star as f64;
        let order: usize = alpha.iter().sum();
        let local: Vec<f64> = x
            .iter()
            .zip(self.partition.center(k))
            .map(|(t, c)| n * (t - c))
            .collect();
        signs[k] as f64 * n.powf(order as f64 - self.r) * self.bump.partial(alpha, &local)
    }

    pub fn member_signs(&self, signs: Vec<i8>, label: String) -> FunctionHandle {
        let fam = self.clone();
        FunctionHandle::new(label, self.d, move |x| fam.eval_signs(&signs, x))
    }

    /// Member for code word `i`.
    pub fn member(&self, i: usize) -> FunctionHandle {
        self.member_signs(self.code.signs(i), format!("member{i}"))
    }

    /// Closed-form `‖f_i − f_j‖_{L1} = (N*)^{-r-d} ‖g‖₁ Σ_k |ε_k − ε'_k|`.
    pub fn closed_form_distance(&self, i: usize, j: usize) -> f64 {
        (self.n_star as f64).powf(-self.r - self.d as f64) * self.bump.l1_norm() * self.code.l1(i, j) as f64
    }

    /// Midpoint grid aligned with the cells: 64 nodes per cell and axis for
    /// `d <= 2`, 8 beyond.
    pub fn default_grid(&self) -> Result<QuadratureGrid> {
        let per_cell = if self.d <= 2 { 64 } else { 8 };
        QuadratureGrid::partition_aligned(self.d, self.n_star, 2 * self.n_star * per_cell)
    }

    /// `½ d^{-d/2} (N*)^{-r}`.
    pub fn separation_bound(&self) -> f64 {
        let d = self.d as f64;
        0.5 * d.powf(-d / 2.0) * self.amplitude()
    }
}

/// Smallest `N*` with `(N*)^d >= ⌈32 (1 + β + 3r/d) n log2(2 C̃1 + 8 d^{d/2} (1 + β + 3r/d + C̃2) + n)⌉`.
pub fn choose_nstar(n: u64, d: usize, r: f64, beta: f64, c_tilde1: f64, c_tilde2: f64) -> Result<u64> {
    if n == 0 || d == 0 || !(r > 0.0) || !(beta >= 0.0) || !(c_tilde1 > 0.0) || !(c_tilde2 > 0.0) {
        return Err(Error::Parameter(
            "choose_nstar needs n, d, r, C̃1, C̃2 > 0 and β >= 0".into(),
        ));
    }
    let df = d as f64;
    let a = 1.0 + beta + 3.0 * r / df;
    let inner = 2.0 * c_tilde1 + 8.0 * df.powf(df / 2.0) * (a + c_tilde2) + n as f64;
    let target = (32.0 * a * n as f64 * inner.log2()).ceil();
    if !target.is_finite() {
        return Err(Error::Parameter("N* target overflows".into()));
    }
    // beyond 2^53 consecutive integers are no longer representable
    if target >= 9.007_199_254_740_992e15 {
        return Err(Error::Size(format!("N* target {target:e} exceeds 2^53")));
    }
    let pow_ge = |k: f64| k.powi(d as i32) >= target;
    let mut k = target.powf(1.0 / df).floor().max(1.0);
    while !pow_ge(k) {
        k += 1.0;
    }
    while k > 1.0 && pow_ge(k - 1.0) {
        k -= 1.0;
    }
    Ok(k as u64)
}

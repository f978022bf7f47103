use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{multi_indices, split_order, FunctionHandle};

const SCAN_POINTS: usize = 4096;

/// Univariate polynomial, ascending coefficients.
fn poly_deriv(coef: &[f64], k: usize) -> Vec<f64> {
    coef.iter()
        .enumerate()
        .skip(k)
        .map(|(i, &c)| c * ((i - k + 1)..=i).map(|t| t as f64).product::<f64>())
        .collect()
}

fn poly_eval(coef: &[f64], u: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Smoothstep of degree `2q + 1`: rises from 0 to 1 on `[0, 1]` with
/// derivatives up to order `q` vanishing at both ends.
pub fn smoothstep(q: usize) -> Vec<f64> {
    let mut coef = vec![0.0; 2 * q + 2];
    for n in 0..=q {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        coef[q + 1 + n] = sign * binomial(q + n, n) * binomial(2 * q + 1, q - n);
    }
    coef
}

/// Rigorous upper bound of `sup_{[0,1]} |p|`: dense scan plus a Lipschitz
/// margin from the absolute coefficient sum of `p'`.
fn sup_abs(coef: &[f64]) -> f64 {
    let scan = (0..=SCAN_POINTS)
        .map(|i| poly_eval(coef, i as f64 / SCAN_POINTS as f64).abs())
        .fold(0.0, f64::max);
    let lip: f64 = poly_deriv(coef, 1).iter().map(|c| c.abs()).sum();
    scan + lip / (2.0 * SCAN_POINTS as f64)
}

/// Tensor-product bump `g(x) = Π_j φ(x_j)` with `φ = 1` on `[-p, p]`, `φ = 0`
/// outside `[-s, s]` and a smoothstep shoulder in between.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub d: usize,
    pub r: f64,
    pub s_order: usize,
    pub v: f64,
    pub c0: f64,
    /// Smoothstep coefficients (ascending) of the shoulder.
    pub profile: Vec<f64>,
    /// Plateau half-width `p`.
    pub plateau: f64,
    /// Support half-width `s`.
    pub support: f64,
    /// `sup |φ^{(k)}|` for `k = 0..=q`.
    pub derivative_bounds: Vec<f64>,
    /// Certified upper bound on the Hölder constant of the order-`s` partials.
    pub holder_constant: f64,
    /// Smallest class constant for which the family built from this bump
    /// is certified, `holder_constant · 2^{1-v}`.
    pub minimal_c0: f64,
}

/// Shape of the bump on `[-1/2, 1/2]^d`: support half-width
/// `min(1/2, 1/√d)`, plateau half-width `1/(2√d)` (`1/4` when `d = 1`).
pub fn bump_geometry(d: usize) -> (f64, f64) {
    let root = (d as f64).sqrt();
    let support = (1.0 / root).min(0.5);
    let plateau = if d == 1 { 0.25 } else { 0.5 / root };
    (plateau, support)
}

pub fn make_bump(d: usize, r: f64, c0: f64) -> Result<BumpSpec> {
    if d == 0 {
        return Err(Error::Parameter("dimension must be >= 1".into()));
    }
    let (s_order, v) = split_order(r)?;
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::Parameter(format!("c0 must be positive, got {c0}")));
    }
    let q = s_order + 1;
    let profile = smoothstep(q);
    let (plateau, support) = bump_geometry(d);
    let w = support - plateau;
    let derivative_bounds: Vec<f64> = (0..=q)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                sup_abs(&poly_deriv(&profile, k)) / w.powi(k as i32)
            }
        })
        .collect();
    let m = &derivative_bounds;
    let holder_constant = multi_indices(d, s_order)
        .iter()
        .map(|alpha| {
            let lip = (0..d)
                .map(|i| {
                    let t: f64 = (0..d)
                        .map(|j| if j == i { m[alpha[j] + 1] } else { m[alpha[j]] })
                        .product();
                    t * t
                })
                .sum::<f64>()
                .sqrt();
            if v >= 1.0 {
                lip
            } else {
                let osc = if alpha.iter().all(|&a| a == 0) {
                    1.0
                } else {
                    2.0 * alpha.iter().map(|&a| m[a]).product::<f64>()
                };
                lip.powf(v) * osc.powf(1.0 - v)
            }
        })
        .fold(0.0, f64::max);
    let minimal_c0 = holder_constant * 2f64.powf(1.0 - v);
    if c0 < minimal_c0 {
        return Err(Error::BumpInfeasible {
            requested: c0,
            minimal: minimal_c0,
        });
    }
    Ok(BumpSpec {
        d,
        r,
        s_order,
        v,
        c0,
        profile,
        plateau,
        support,
        derivative_bounds,
        holder_constant,
        minimal_c0,
    })
}

impl BumpSpec {
    /// `k`-th derivative of the univariate profile.
    pub fn phi_deriv(&self, k: usize, t: f64) -> f64 {
        let a = t.abs();
        if a >= self.support {
            return 0.0;
        }
        if a <= self.plateau {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        let w = self.support - self.plateau;
        let u = (a - self.plateau) / w;
        if k == 0 {
            return 1.0 - poly_eval(&self.profile, u);
        }
        let sign = if t < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        -sign * poly_eval(&poly_deriv(&self.profile, k), u) / w.powi(k as i32)
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.phi_deriv(0, t)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut out = 1.0;
        for &t in x {
            out *= self.phi(t);
            if out == 0.0 {
                break;
            }
        }
        out
    }

    /// `∂^α g(x)` in closed form, for `|α_j| <= q`.
    pub fn partial(&self, alpha: &[usize], x: &[f64]) -> f64 {
        x.iter().zip(alpha).map(|(&t, &k)| self.phi_deriv(k, t)).product()
    }

    /// `‖g‖_{L1} = (p + s)^d` (the shoulder integrates to half its width).
    pub fn l1_norm(&self) -> f64 {
        (self.plateau + self.support).powi(self.d as i32)
    }

    pub fn as_function(&self) -> FunctionHandle {
        let b = self.clone();
        FunctionHandle::new(format!("bump(d={}, r={})", self.d, self.r), self.d, move |x| b.eval(x))
    }
}

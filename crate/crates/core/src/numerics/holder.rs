//! Finite-difference check of the Hölder-type smoothness class: all partials
//! of order `s` are `v`-Hölder with constant `c0`, where `r = s + v`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::function::FunctionHandle;
use crate::error::{Error, Result};
use crate::util::rng;

/// Relative slack applied to `c0` when deciding pass/fail.
pub const HOLDER_SLACK: f64 = 0.05;
pub const DEFAULT_FD_STEP: f64 = 1e-4;
const MIN_PAIR_DISTANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub alpha: Vec<usize>,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub label: String,
    pub r: f64,
    pub s: usize,
    pub v: f64,
    pub c0: f64,
    pub slack: f64,
    pub max_ratio: f64,
    pub pass: bool,
    pub witness: Option<HolderWitness>,
    pub pairs_checked: usize,
}

/// Split `r > 0` into `s = ceil(r) - 1` and `v = r - s ∈ (0, 1]`.
pub fn split_order(r: f64) -> Result<(usize, f64)> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Parameter(format!("smoothness r must be positive, got {r}")));
    }
    let s = r.ceil() as usize - 1;
    Ok((s, r - s as f64))
}

/// All multi-indices of length `dim` with entries summing to `order`.
pub fn multi_indices(dim: usize, order: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[pos] = k;
            rec(pos + 1, left - k, cur, out);
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(0, order, &mut vec![0; dim], &mut out);
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Central difference estimate of `∂^α f(x)` with step `h`.
pub fn central_partial(f: &FunctionHandle, x: &[f64], alpha: &[usize], h: f64) -> f64 {
    let axes: Vec<(usize, usize)> = alpha
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| (i, k))
        .collect();
    if axes.is_empty() {
        return f.eval(x);
    }
    let mut point = x.to_vec();
    let mut total = 0.0;
    let mut js = vec![0usize; axes.len()];
    loop {
        let mut coef = 1.0;
        for (&(axis, k), &j) in axes.iter().zip(&js) {
            coef *= if j % 2 == 0 { 1.0 } else { -1.0 } * binomial(k, j);
            point[axis] = x[axis] + (k as f64 / 2.0 - j as f64) * h;
        }
        total += coef * f.eval(&point);
        // odometer over the stencil offsets
        let mut p = 0;
        loop {
            if p == axes.len() {
                let order: usize = axes.iter().map(|a| a.1).sum();
                return total / h.powi(order as i32);
            }
            js[p] += 1;
            if js[p] <= axes[p].1 {
                break;
            }
            js[p] = 0;
            p += 1;
        }
    }
}

/// Configurable Hölder check.
#[derive(Clone, Debug)]
pub struct HolderCheck {
    r: f64,
    c0: f64,
    n_pairs: usize,
    fd_step: f64,
    seed: u64,
    lo: f64,
    hi: f64,
    extra: Vec<(Vec<f64>, Vec<f64>)>,
}

impl HolderCheck {
    pub fn new(r: f64, c0: f64) -> Self {
        Self {
            r,
            c0,
            n_pairs: 2000,
            fd_step: DEFAULT_FD_STEP,
            seed: 0,
            lo: -1.0,
            hi: 1.0,
            extra: Vec::new(),
        }
    }

    pub fn pairs(mut self, n: usize) -> Self {
        self.n_pairs = n;
        self
    }

    pub fn fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Restrict sampling to the cube `[lo, hi]^d` (default `[-1, 1]^d`).
    pub fn region(mut self, lo: f64, hi: f64) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    /// Pairs checked in addition to the random ones.
    pub fn extra_pairs(mut self, pairs: Vec<(Vec<f64>, Vec<f64>)>) -> Self {
        self.extra = pairs;
        self
    }

    pub fn run(&self, f: &FunctionHandle) -> Result<HolderReport> {
        let (s, v) = split_order(self.r)?;
        if !(self.fd_step > 0.0) {
            return Err(Error::Parameter(format!("fd_step must be positive, got {}", self.fd_step)));
        }
        if self.fd_step * s.max(1) as f64 > 0.05 {
            return Err(Error::Parameter(format!(
                "fd_step {} is too large for derivatives of order {s} on the unit cube",
                self.fd_step
            )));
        }
        if !(self.c0 > 0.0) {
            return Err(Error::Parameter(format!("c0 must be positive, got {}", self.c0)));
        }
        if !(self.lo < self.hi) {
            return Err(Error::Parameter("empty sampling region".into()));
        }
        let dim = f.dim();
        let margin = s as f64 * self.fd_step / 2.0;
        let (lo, hi) = (self.lo.max(-1.0) + margin, self.hi.min(1.0) - margin);
        if lo >= hi {
            return Err(Error::Parameter("sampling region vanishes after the stencil margin".into()));
        }
        let pairs = self.sample_pairs(dim, lo, hi);
        let alphas = multi_indices(dim, s);
        let h = self.fd_step;
        let best = pairs
            .par_iter()
            .filter_map(|(x, y)| {
                let dist = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                if dist < MIN_PAIR_DISTANCE {
                    return None;
                }
                let denom = dist.powf(v);
                alphas
                    .iter()
                    .map(|alpha| {
                        let diff = central_partial(f, x, alpha, h) - central_partial(f, y, alpha, h);
                        (diff.abs() / denom, alpha)
                    })
                    .max_by(|a, b| a.0.total_cmp(&b.0))
                    .map(|(ratio, alpha)| HolderWitness {
                        x: x.clone(),
                        y: y.clone(),
                        alpha: alpha.clone(),
                        ratio,
                    })
            })
            .collect::<Vec<_>>();
        let pairs_checked = best.len();
        let witness = best.into_iter().reduce(|a, b| if b.ratio > a.ratio { b } else { a });
        let max_ratio = witness.as_ref().map_or(0.0, |w| w.ratio);
        Ok(HolderReport {
            label: f.label().to_string(),
            r: self.r,
            s,
            v,
            c0: self.c0,
            slack: HOLDER_SLACK,
            max_ratio,
            pass: max_ratio <= self.c0 * (1.0 + HOLDER_SLACK),
            witness,
            pairs_checked,
        })
    }

    /// Uniform pairs, near pairs at log-uniform distance, and axis-aligned
    /// pairs in proportion 2:1:1, followed by the caller's extra pairs.
    fn sample_pairs(&self, dim: usize, lo: f64, hi: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
        let mut rng = rng(self.seed);
        let clamp = |t: f64| t.clamp(lo, hi);
        let point = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            (0..dim).map(|_| rng.gen_range(lo..hi)).collect()
        };
        let mut pairs = Vec::with_capacity(self.n_pairs + self.extra.len());
        let n_near = self.n_pairs / 4;
        let n_axis = self.n_pairs / 4;
        let n_uniform = self.n_pairs - n_near - n_axis;
        for _ in 0..n_uniform {
            let x = point(&mut rng);
            let y = point(&mut rng);
            pairs.push((x, y));
        }
        for _ in 0..n_near {
            let x = point(&mut rng);
            let dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|t| t * t).sum::<f64>().sqrt().max(1e-12);
            let t = 10f64.powf(rng.gen_range(-3.0..-0.5));
            let y = x.iter().zip(&dir).map(|(a, u)| clamp(a + t * u / norm)).collect();
            pairs.push((x, y));
        }
        for _ in 0..n_axis {
            let x = point(&mut rng);
            let mut y = x.clone();
            let axis = rng.gen_range(0..dim);
            y[axis] = rng.gen_range(lo..hi);
            pairs.push((x, y));
        }
        for (x, y) in &self.extra {
            if x.len() == dim && y.len() == dim {
                pairs.push((x.iter().map(|&t| clamp(t)).collect(), y.iter().map(|&t| clamp(t)).collect()));
            }
        }
        pairs
    }
}

/// Check that `f` has order-`s` partials `v`-Hölder with constant `c0`.
pub fn holder_check(f: &FunctionHandle, r: f64, c0: f64, n_pairs: usize, fd_step: f64) -> Result<HolderReport> {
    HolderCheck::new(r, c0).pairs(n_pairs).fd_step(fd_step).run(f)
}

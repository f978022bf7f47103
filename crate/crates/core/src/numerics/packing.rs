//! Packing and covering of finite sets under a precomputed metric.
//!
//! Packings require pairwise distance `>= ε`; covers use open balls, i.e. a
//! point is covered when its distance to a centre is `< ε`. With these
//! conventions `M(2ε) <= N(ε) <= M(ε)` holds on every finite set.

use super::function::{DistanceMatrix, FunctionHandle, SampledSet};
use super::quadrature::QuadratureGrid;
use crate::error::{Error, Result};

/// Largest candidate set handled by the exhaustive routines.
pub const MAX_EXACT: usize = 25;

/// Relative tolerance absorbing quadrature roundoff in distance comparisons.
pub const DIST_RTOL: f64 = 1e-12;

/// `d < eps` up to roundoff; "far" is the negation, so both notions stay
/// consistent with each other.
#[inline]
fn close(d: f64, eps: f64) -> bool {
    d < eps * (1.0 - DIST_RTOL)
}

/// Scan in order, keeping each point at distance `>= eps` from all kept ones.
pub fn greedy_packing_by(n: usize, eps: f64, dist: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..n {
        if kept.iter().all(|&k| !close(dist(i, k), eps)) {
            kept.push(i);
        }
    }
    kept
}

/// Scan in order, opening a centre at each point not yet within `< eps` of one.
pub fn greedy_covering_by(n: usize, eps: f64, dist: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut centres: Vec<usize> = Vec::new();
    for i in 0..n {
        if !centres.iter().any(|&c| close(dist(i, c), eps)) {
            centres.push(i);
        }
    }
    centres
}

fn check_exact(n: usize) -> Result<()> {
    if n > MAX_EXACT {
        return Err(Error::Size(format!(
            "{n} candidates exceed the exhaustive limit of {MAX_EXACT}; use the greedy routine"
        )));
    }
    Ok(())
}

/// Conflict masks: bit `j` of `masks[i]` is set when `dist(i, j) < eps`.
fn close_masks(n: usize, eps: f64, dist: &impl Fn(usize, usize) -> f64) -> Vec<u32> {
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| i == j || close(dist(i, j), eps))
                .fold(0u32, |m, j| m | (1 << j))
        })
        .collect()
}

/// Exact packing number by branch and bound (maximum independent set in the
/// graph joining points closer than `eps`).
pub fn exact_packing_by(n: usize, eps: f64, dist: impl Fn(usize, usize) -> f64) -> Result<usize> {
    check_exact(n)?;
    let conflicts = close_masks(n, eps, &dist);
    fn search(candidates: u32, size: usize, best: &mut usize, conflicts: &[u32]) {
        if candidates == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + candidates.count_ones() as usize <= *best {
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        // take v
        search(candidates & !conflicts[v], size + 1, best, conflicts);
        // skip v
        search(candidates & !(1 << v), size, best, conflicts);
    }
    let mut best = 0;
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    search(all, 0, &mut best, &conflicts);
    Ok(best)
}

/// Exact size of the smallest subset whose open `eps`-balls cover the set.
pub fn exact_covering_by(n: usize, eps: f64, dist: impl Fn(usize, usize) -> f64) -> Result<usize> {
    check_exact(n)?;
    if n == 0 {
        return Ok(0);
    }
    let covers = close_masks(n, eps, &dist);
    let all = (1u32 << n) - 1;
    fn search(covered: u32, all: u32, depth: usize, limit: usize, covers: &[u32]) -> bool {
        if covered == all {
            return true;
        }
        if depth == limit {
            return false;
        }
        let u = (!covered & all).trailing_zeros() as usize;
        // some centre must cover u; centres covering u are exactly covers[u]
        let mut options = covers[u];
        while options != 0 {
            let c = options.trailing_zeros() as usize;
            options &= options - 1;
            if search(covered | covers[c], all, depth + 1, limit, covers) {
                return true;
            }
        }
        false
    }
    Ok((1..=n)
        .find(|&k| search(0, all, 0, k, &covers))
        .expect("n singletons always cover"))
}

fn sampled<'g>(candidates: &[FunctionHandle], grid: &'g QuadratureGrid) -> Result<SampledSet<'g>> {
    SampledSet::new(candidates, grid)
}

/// Greedy `eps`-packing of the candidates (indices, in input order).
pub fn greedy_packing(candidates: &[FunctionHandle], eps: f64, grid: &QuadratureGrid) -> Result<Vec<usize>> {
    let set = sampled(candidates, grid)?;
    Ok(greedy_packing_by(set.len(), eps, |i, j| set.distance(i, j)))
}

/// Greedy `eps`-cover of the candidates by candidates (indices of centres).
pub fn greedy_covering(candidates: &[FunctionHandle], eps: f64, grid: &QuadratureGrid) -> Result<Vec<usize>> {
    let set = sampled(candidates, grid)?;
    Ok(greedy_covering_by(set.len(), eps, |i, j| set.distance(i, j)))
}

pub fn exact_packing_number(candidates: &[FunctionHandle], eps: f64, grid: &QuadratureGrid) -> Result<usize> {
    check_exact(candidates.len())?;
    let m = sampled(candidates, grid)?.distance_matrix();
    exact_packing_by(m.len(), eps, |i, j| m.get(i, j))
}

pub fn exact_covering_number(candidates: &[FunctionHandle], eps: f64, grid: &QuadratureGrid) -> Result<usize> {
    check_exact(candidates.len())?;
    let m = sampled(candidates, grid)?.distance_matrix();
    exact_covering_by(m.len(), eps, |i, j| m.get(i, j))
}

impl DistanceMatrix {
    pub fn greedy_packing(&self, eps: f64) -> Vec<usize> {
        greedy_packing_by(self.len(), eps, |i, j| self.get(i, j))
    }

    pub fn greedy_covering(&self, eps: f64) -> Vec<usize> {
        greedy_covering_by(self.len(), eps, |i, j| self.get(i, j))
    }

    pub fn exact_packing(&self, eps: f64) -> Result<usize> {
        exact_packing_by(self.len(), eps, |i, j| self.get(i, j))
    }

    pub fn exact_covering(&self, eps: f64) -> Result<usize> {
        exact_covering_by(self.len(), eps, |i, j| self.get(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn constants(vals: &[f64]) -> Vec<FunctionHandle> {
        vals.iter()
            .map(|&v| FunctionHandle::constant(format!("{v}"), 1, v))
            .collect()
    }

    /// Brute force over all subsets.
    fn brute_packing(m: &DistanceMatrix, eps: f64) -> usize {
        let n = m.len();
        (0u32..1 << n)
            .filter(|s| {
                (0..n).all(|i| {
                    (0..n).all(|j| i == j || s & (1 << i) == 0 || s & (1 << j) == 0 || m.get(i, j) >= eps)
                })
            })
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap()
    }

    fn brute_covering(m: &DistanceMatrix, eps: f64) -> usize {
        let n = m.len();
        (1u32..1 << n)
            .filter(|s| (0..n).all(|i| (0..n).any(|c| s & (1 << c) != 0 && m.get(i, c) < eps)))
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn spec_examples() {
        let g = QuadratureGrid::default_for(1).unwrap();
        let two = constants(&[0.0, 1.0]);
        assert_eq!(exact_packing_number(&two, 1.0, &g).unwrap(), 2);
        assert_eq!(exact_packing_number(&two, 3.0, &g).unwrap(), 1);
        let three = constants(&[0.0, 1.0, 2.0]);
        assert_eq!(exact_packing_number(&three, 2.0, &g).unwrap(), 3);
        let same = constants(&[0.5; 6]);
        assert_eq!(greedy_packing(&same, 0.1, &g).unwrap(), vec![0]);
        assert_eq!(greedy_covering(&same, 0.1, &g).unwrap(), vec![0]);
        let spread = constants(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(greedy_packing(&spread, 2.0, &g).unwrap().len(), 4);
        assert_eq!(greedy_covering(&spread, 2.0, &g).unwrap().len(), 4);
    }

    #[test]
    fn too_many_for_exact() {
        let g = QuadratureGrid::default_for(1).unwrap();
        let many = constants(&[0.0; 26]);
        assert!(matches!(exact_packing_number(&many, 1.0, &g), Err(Error::Size(_))));
        assert!(matches!(exact_covering_number(&many, 1.0, &g), Err(Error::Size(_))));
    }

    fn matrix_from_points(points: &[(f64, f64)]) -> DistanceMatrix {
        let values = points
            .iter()
            .map(|a| points.iter().map(|b| (a.0 - b.0).abs() + (a.1 - b.1).abs()).collect())
            .collect();
        DistanceMatrix {
            labels: (0..points.len()).map(|i| i.to_string()).collect(),
            values,
            tolerance: None,
        }
    }

    proptest! {
        #[test]
        fn exact_routines_match_brute_force(
            points in prop::collection::vec((0.0..4.0f64, 0.0..4.0f64), 1..=10),
            eps in 0.2..3.0f64,
        ) {
            let m = matrix_from_points(&points);
            let pack = m.exact_packing(eps).unwrap();
            let cover = m.exact_covering(eps).unwrap();
            prop_assert_eq!(pack, brute_packing(&m, eps));
            prop_assert_eq!(cover, brute_covering(&m, eps));
            // M(2ε) <= N(ε) <= M(ε)
            prop_assert!(m.exact_packing(2.0 * eps).unwrap() <= cover);
            prop_assert!(cover <= pack);
            let greedy = m.greedy_packing(eps);
            prop_assert!(greedy.len() <= pack);
            // maximal: every rejected point is close to a kept one
            for i in 0..m.len() {
                prop_assert!(greedy.contains(&i) || greedy.iter().any(|&k| m.get(i, k) < eps));
            }
            let gc = m.greedy_covering(eps);
            prop_assert!(gc.len() >= cover && gc.len() <= pack);
            for i in 0..m.len() {
                prop_assert!(gc.iter().any(|&c| m.get(i, c) < eps));
            }
        }
    }
}

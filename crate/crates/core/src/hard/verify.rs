use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::HardFamily;
use crate::error::{Error, Result};
use crate::numerics::{HolderCheck, HolderReport, QuadratureGrid, DEFAULT_FD_STEP};
use crate::util::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub points_checked: usize,
    pub pass: bool,
    /// A point where several `g_k` are nonzero, with those `k`.
    pub witness: Option<(Vec<f64>, Vec<usize>)>,
}

/// At every sample point at most one `g_k` may be nonzero (checked over all `k`).
pub fn verify_localization(family: &HardFamily, points: &[Vec<f64>]) -> LocalizationReport {
    let cells = family.partition.cells();
    let witness = points
        .par_iter()
        .find_map_first(|x| {
            let active: Vec<usize> = (0..cells).filter(|&k| family.g_k(k, x) != 0.0).collect();
            (active.len() > 1).then(|| (x.clone(), active))
        });
    LocalizationReport {
        points_checked: points.len(),
        pass: witness.is_none(),
        witness,
    }
}

/// `count` uniform points in `[lo, hi]^d`.
pub fn uniform_points(d: usize, count: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..count).map(|_| (0..d).map(|_| r.gen_range(lo..=hi)).collect()).collect()
}

/// Pairs on opposite sides of a cell face (interior faces and the faces of
/// `[0,1]^d`), each point within a short distance of the face.
pub fn boundary_pairs(family: &HardFamily, count: usize, fd_step: f64, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = family.n_star;
    let d = family.d;
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let axis = r.gen_range(0..d);
            let face = r.gen_range(0..=n) as f64 / n as f64;
            // half the pairs hug the face within 2·fd_step, the rest reach further
            let reach = if i % 2 == 0 { 2.0 * fd_step } else { 0.5 / n as f64 };
            let lo = (fd_step * 1e-2).min(reach);
            let mut x: Vec<f64> = (0..d).map(|_| r.gen_range(0.0..=1.0)).collect();
            let mut y: Vec<f64> = x
                .iter()
                .map(|&t| (t + r.gen_range(-0.2..0.2) / n as f64).clamp(0.0, 1.0))
                .collect();
            x[axis] = face - r.gen_range(lo..=reach);
            y[axis] = face + r.gen_range(lo..=reach);
            (x, y)
        })
        .collect()
}

/// Run the Hölder check at `(r, c0)` on `n_members` members (spread over the
/// code), each with `n_pairs` random pairs plus boundary-straddling pairs.
/// Returns the report with the largest ratio; `pass` holds only if every
/// member passed.
pub fn verify_class_membership(family: &HardFamily, n_members: usize, n_pairs: usize) -> Result<HolderReport> {
    if family.is_empty() {
        return Err(Error::Parameter("family has no members".into()));
    }
    let count = n_members.clamp(1, family.len());
    let members: Vec<usize> = (0..count).map(|i| i * family.len() / count).collect();
    let reports = members
        .iter()
        .map(|&i| {
            HolderCheck::new(family.r, family.c0)
                .pairs(n_pairs)
                .seed(i as u64)
                .region(-0.05, 1.05)
                .extra_pairs(boundary_pairs(family, n_pairs / 2, DEFAULT_FD_STEP, 1 + i as u64))
                .run(&family.member(i))
        })
        .collect::<Result<Vec<_>>>()?;
    let all_pass = reports.iter().all(|r| r.pass);
    let total: usize = reports.iter().map(|r| r.pairs_checked).sum();
    let mut worst = reports
        .into_iter()
        .reduce(|a, b| if b.max_ratio > a.max_ratio { b } else { a })
        .expect("at least one member");
    worst.pass = all_pass;
    worst.pairs_checked = total;
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub pairs_checked: usize,
    pub min_distance: f64,
    /// Code words realising the minimum.
    pub min_pair: (usize, usize),
    /// `½ d^{-d/2} (N*)^{-r}`
    pub bound: f64,
    /// Quadrature tolerance at the minimal pair.
    pub est_tolerance: f64,
    /// Largest `|quadrature − closed form| / closed form` over checked pairs.
    pub closed_form_rel_error: f64,
    pub violation: bool,
}

/// L1 distances between members for up to `pair_budget` code pairs, closest
/// pairs (by code distance) first.
pub fn verify_separation(family: &HardFamily, pair_budget: usize, grid: &QuadratureGrid) -> Result<SeparationReport> {
    let words = family.len();
    if words < 2 {
        return Err(Error::Parameter("separation needs at least two code words".into()));
    }
    if grid.dim() != family.d {
        return Err(Error::Parameter("grid dimension differs from the family".into()));
    }
    let mut pairs: Vec<(usize, usize, usize)> = (0..words)
        .flat_map(|i| (i + 1..words).map(move |j| (i, j)))
        .map(|(i, j)| (family.code.l1(i, j), i, j))
        .collect();
    let budget = pair_budget.max(1).min(pairs.len());
    if budget < pairs.len() {
        pairs.select_nth_unstable(budget - 1);
        pairs.truncate(budget);
    }
    pairs.sort_unstable();

    let mut needed: Vec<usize> = pairs.iter().flat_map(|&(_, i, j)| [i, j]).collect();
    needed.sort_unstable();
    needed.dedup();
    let sampled: HashMap<usize, Vec<f64>> = needed
        .par_iter()
        .map(|&i| {
            let f = family.member(i);
            (i, grid.sample(|x| f.eval(x)))
        })
        .collect();

    let dists: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(_, i, j)| {
            let q = grid.weighted_l1(&sampled[&i], &sampled[&j]);
            let exact = family.closed_form_distance(i, j);
            (q, (q - exact).abs() / exact)
        })
        .collect();
    let (k_min, min_distance) = dists
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, &(q, _))| if q < acc.1 { (k, q) } else { acc });
    let closed_form_rel_error = dists.iter().map(|d| d.1).fold(0.0, f64::max);
    let (_, i, j) = pairs[k_min];
    let (fi, fj) = (family.member(i), family.member(j));
    let est_tolerance = grid.estimate(|x| (fi.eval(x) - fj.eval(x)).abs())?.est_tolerance;
    let bound = family.separation_bound();
    Ok(SeparationReport {
        pairs_checked: pairs.len(),
        min_distance,
        min_pair: (i, j),
        bound,
        est_tolerance,
        closed_form_rel_error,
        violation: min_distance < bound - est_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hard::{build_family, make_bump};

    #[test]
    fn localization_scan() {
        let bump = make_bump(2, 1.0, 100.0).unwrap();
        let fam = build_family(3, &bump, 0).unwrap();
        let pts = uniform_points(2, 10_000, -0.2, 1.2, 5);
        let rep = verify_localization(&fam, &pts);
        assert!(rep.pass, "{rep:?}");
        let centre = fam.partition.center(4);
        let active: Vec<usize> = (0..9).filter(|&k| fam.g_k(k, &centre) != 0.0).collect();
        assert_eq!(active, vec![4]);
        assert!((0..9).all(|k| fam.g_k(k, &[1.2, 0.5]) == 0.0));
    }

    #[test]
    fn one_dimensional_separation() {
        let bump = make_bump(1, 1.0, 8.0).unwrap();
        let fam = build_family(2, &bump, 0).unwrap();
        assert!((fam.separation_bound() - 0.25).abs() < 1e-15);
        let grid = QuadratureGrid::partition_aligned(1, 2, 256).unwrap();
        let rep = verify_separation(&fam, 100, &grid).unwrap();
        assert!(!rep.violation, "{rep:?}");
        assert!(rep.closed_form_rel_error < 1e-3, "{rep:?}");
        let f = fam.member_signs(vec![1, 1], "a".into());
        let g = fam.member_signs(vec![1, -1], "b".into());
        let d = grid.integrate(|x| (f.eval(x) - g.eval(x)).abs());
        assert!((d - 2.0 * 0.25 * bump.l1_norm()).abs() < 1e-3);
        assert!(d >= 0.25);
    }

    #[test]
    fn membership_small() {
        let bump = make_bump(1, 1.0, 8.0).unwrap();
        let fam = build_family(4, &bump, 0).unwrap();
        let rep = verify_class_membership(&fam, 3, 2000).unwrap();
        assert!(rep.pass, "{rep:?}");
        let single = build_family(1, &bump, 0).unwrap();
        assert!(verify_class_membership(&single, 2, 1000).unwrap().pass);
    }
}

use approx::assert_relative_eq;
use netcap::capacity::CoveringInputs;
use netcap::capacity::CoveringBound;
use netcap::net::presets;
use netcap::*;
use proptest::prelude::*;

fn activation() -> impl Strategy<Value = ActivationSpec> {
    prop_oneof![
        Just(ActivationSpec::logistic()),
        Just(ActivationSpec::tanh_sigmoid()),
        Just(ActivationSpec::arctan_sigmoid()),
        Just(ActivationSpec::relu()),
        Just(ActivationSpec::gaussian()),
    ]
}

fn dense_with_params() -> impl Strategy<Value = (Architecture, ParamAssignment, Vec<f64>)> {
    (prop::collection::vec(1usize..4, 2..5), activation(), 1.0..3.0f64)
        .prop_flat_map(|(widths, act, radius)| {
            let arch = presets::dense(&widths, act, radius).unwrap();
            let n = arch.num_params();
            let d = arch.input_dim();
            (
                Just(arch),
                prop::collection::vec(-radius..=radius, n),
                prop::collection::vec(-1.0..=1.0f64, d),
            )
        })
        .prop_map(|(arch, values, x)| {
            let p = ParamAssignment::new(&arch, values).unwrap();
            (arch, p, x)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dense_counts_agree(widths in prop::collection::vec(1usize..6, 2..6)) {
        let arch = presets::dense(&widths, ActivationSpec::logistic(), 1.0).unwrap();
        let expect = dense_param_count(&widths).unwrap();
        prop_assert_eq!(arch.num_params(), expect);
        prop_assert_eq!(arch.free_param_count(), expect);
    }

    #[test]
    fn evaluate_matches_layer_outputs((arch, p, x) in dense_with_params()) {
        let value = arch.evaluate(&p, &x).unwrap();
        let layers = arch.layer_outputs(&p, &x).unwrap();
        let a: Vec<f64> = arch.output().iter().map(|e| e.resolve(p.values())).collect();
        let direct: f64 = a.iter().zip(layers.last().unwrap()).map(|(a, h)| a * h).sum();
        prop_assert!(value.is_finite());
        prop_assert_eq!(value, direct);
    }

    #[test]
    fn uniform_bound_nondecreasing((arch, _p, _x) in dense_with_params()) {
        for l in 1..arch.depth() {
            prop_assert!(arch.uniform_output_bound(l + 1).unwrap() >= arch.uniform_output_bound(l).unwrap());
        }
    }

    #[test]
    fn covering_bound_monotone(
        n in 1usize..50, depth in 1usize..6, radius in 1.0..10.0f64, d_max in 1usize..20,
        eps in 1e-3..10.0f64, c in 1.0..3.0f64, c1 in 0.1..3.0f64, d in 1usize..5,
    ) {
        let ledger = constant_ledger(c, c1, d).unwrap();
        let d_l = (d_max as f64).powi(depth as i32 + 1);
        let base = CoveringInputs { n, depth, radius, d_max, d_l };
        let b = CoveringBound::from_inputs(base, ledger, eps).unwrap();
        prop_assert!(b.log2_tight <= b.log2_relaxed + 1e-9 * b.log2_relaxed.abs());
        let bigger = [
            CoveringInputs { n: n + 1, ..base },
            CoveringInputs { depth: depth + 1, d_l: d_l * d_max as f64, ..base },
            CoveringInputs { radius: radius * 1.5, ..base },
            CoveringInputs { d_max: d_max + 1, d_l: ((d_max + 1) as f64).powi(depth as i32 + 1), ..base },
        ];
        for inputs in bigger {
            let nb = CoveringBound::from_inputs(inputs, ledger, eps).unwrap();
            prop_assert!(nb.log2_tight >= b.log2_tight && nb.log2_relaxed >= b.log2_relaxed);
        }
        let smaller_eps = CoveringBound::from_inputs(base, ledger, eps / 2.0).unwrap();
        prop_assert!(smaller_eps.log2_tight > b.log2_tight);
        assert_relative_eq!(smaller_eps.log2_tight - b.log2_tight, n as f64, max_relative = 1e-9);
        assert_relative_eq!(smaller_eps.log2_relaxed - b.log2_relaxed, n as f64, max_relative = 1e-9);
    }

    #[test]
    fn ledger_ordering(c in 1.0..5.0f64, c1 in 0.01..5.0f64, d in 1usize..8) {
        let l = constant_ledger(c, c1, d).unwrap();
        prop_assert!(l.c3 >= 2.0 && l.c1_prime > 0.0 && l.c2_prime > 0.0);
        prop_assert_eq!(l.c1_prime >= l.c2_prime, c1 >= 1.0 / 3.0);
    }

    #[test]
    fn matrix_net_log_law(d_out in 1usize..5, d_in in 1usize..5, f in 0usize..10, r in 1.0..4.0f64, eps in 0.01..1.0f64) {
        let a = capacity::matrix_net_size(d_out, d_in, f, r, eps).unwrap();
        let b = capacity::matrix_net_size(d_out, d_in, f, 2.0 * r, eps).unwrap();
        assert_relative_eq!(b - a, f as f64, epsilon = 1e-9);
    }

    #[test]
    fn interval_net_covers(r in 0.5..4.0f64, eps in 0.01..3.0f64, t in 0.0..1.0f64) {
        let net = build_interval_net(r, eps).unwrap();
        let x = -r + 2.0 * r * t;
        prop_assert!(net.iter().any(|p| (p - x).abs() <= eps * (1.0 + 1e-12)));
        prop_assert!(net.iter().all(|p| p.abs() <= r));
        prop_assert!(net.len() == 1 || net.len() as f64 <= 2.0 * r / eps);
    }

    #[test]
    fn nstar_monotone_in_n(n in 1u64..10_000, d in 1usize..4, r in 0.1..3.0f64, beta in 0.0..2.0f64) {
        let a = choose_nstar(n, d, r, beta, 1.0, 5.0).unwrap();
        let b = choose_nstar(n + 1, d, r, beta, 1.0, 5.0).unwrap();
        prop_assert!(b >= a);
        let target = |k: u64| (k as f64).powi(d as i32);
        prop_assert!(a == 1 || target(a - 1) < target(a));
    }

    #[test]
    fn deep_bound_decreasing(n in 2u64..100_000, depth in 1usize..8, radius in 1.0..4.0f64, d_max in 2usize..16, r in 0.2..3.0f64, d in 1usize..5) {
        let ledger = constant_ledger(1.0, 1.0, d).unwrap();
        let v = |n, l, rad, dm| deep_net_lower_bound(n, l, rad, dm, r, d, &ledger).unwrap().value;
        let base = v(n, depth, radius, d_max);
        prop_assert!(base > 0.0);
        prop_assert!(v(n + 1, depth, radius, d_max) < base);
        prop_assert!(v(n, depth + 1, radius, d_max) < base);
        prop_assert!(v(n, depth, radius * 1.5, d_max) < base);
        prop_assert!(v(n, depth, radius, d_max + 1) < base);
    }

    #[test]
    fn certificates_replay_exactly(n in 2u64..1_000_000, r in 0.1..4.0f64, d in 1usize..6, beta in 0.0..3.0f64) {
        let cert = relation_lower_bound(RelationInputs { c_tilde1: 1.5, c_tilde2: 4.0, beta, n, r, d, c0: 1.0 }).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: LowerBoundCertificate = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.recompute().unwrap().value.to_bits(), cert.value.to_bits());
        prop_assert!(cert.value > 0.0);
    }

    #[test]
    fn short_codes_meet_targets(m in 1usize..=14, frac in 0.1..0.6f64) {
        let target = (m as f64 * frac).floor().max(1.0);
        let code = gv_code(m, target, 0).unwrap();
        prop_assert!(code.len() >= 2);
        prop_assert!(code.min_l1() as f64 >= target);
    }
}

fn poly(coef: Vec<f64>, dim: usize) -> FunctionHandle {
    FunctionHandle::new("poly", dim, move |x| {
        x.iter()
            .enumerate()
            .map(|(j, &t)| coef.iter().rev().fold(0.0, |acc, c| acc * t + c) * (j as f64 + 1.0))
            .sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn metric_axioms(a in prop::collection::vec(-2.0..2.0f64, 4), b in prop::collection::vec(-2.0..2.0f64, 4), c in prop::collection::vec(-2.0..2.0f64, 4), dim in 1usize..3) {
        let grid = QuadratureGrid::default_for(dim).unwrap();
        let (f, g, h) = (poly(a, dim), poly(b, dim), poly(c, dim));
        let fg = l1_distance(&f, &g, &grid).unwrap();
        let gf = l1_distance(&g, &f, &grid).unwrap();
        let gh = l1_distance(&g, &h, &grid).unwrap();
        let fh = l1_distance(&f, &h, &grid).unwrap();
        prop_assert_eq!(fg.value, gf.value);
        prop_assert!(fg.value >= 0.0);
        let tol = fg.est_tolerance + gh.est_tolerance + fh.est_tolerance + 1e-12;
        prop_assert!(fh.value <= fg.value + gh.value + tol);
    }

    #[test]
    fn cubic_quadrature_converges(coef in prop::collection::vec(-3.0..3.0f64, 4), dim in 1usize..4) {
        // a sign-definite cubic so |f| is itself a polynomial
        let shift: f64 = coef.iter().map(|c| c.abs()).sum::<f64>() + 1.0;
        let f = FunctionHandle::new("cubic", dim, move |x| {
            shift + x.iter().map(|&t| coef.iter().rev().fold(0.0, |acc, c| acc * t + c)).sum::<f64>() / dim as f64
        });
        let grid = QuadratureGrid::new(dim, 8, QuadratureScheme::GaussLegendreTensor).unwrap();
        let est = l1_norm(&f, &grid).unwrap();
        prop_assert!(est.est_tolerance <= 1e-6 * est.value);
    }

    #[test]
    fn family_negation_is_exact(seed in 0u64..100, x in prop::collection::vec(-1.0..1.0f64, 2), r in prop::sample::select(vec![0.5, 1.0, 2.0])) {
        let bump = make_bump(2, r, 1e6).unwrap();
        let fam = build_family(3, &bump, seed).unwrap();
        let i = (seed as usize) % fam.len();
        let signs = fam.code.signs(i);
        let neg: Vec<i8> = signs.iter().map(|s| -s).collect();
        let f = fam.member_signs(signs, "f".into());
        let g = fam.member_signs(neg, "g".into());
        prop_assert_eq!(f.eval(&x), -g.eval(&x));
        if x.iter().any(|t| *t < 0.0) {
            prop_assert_eq!(f.eval(&x), 0.0);
        }
    }
}

/// Relation bound with the covering hypothesis instantiated from the
/// network covering bound, divided by the deep-net bound.
fn relation_over_deep(n: u64, depth: usize, radius: f64, d_max: usize, r: f64, d: usize) -> f64 {
    let ledger = constant_ledger(1.0, 1.0, d).unwrap();
    let c_tilde2 = (ledger.c3 * radius * d_max as f64).powi((2 * (depth + 1) * depth) as i32);
    let rel = relation_lower_bound(RelationInputs { c_tilde1: 1.0, c_tilde2, beta: 0.0, n, r, d, c0: 1.0 }).unwrap();
    let deep = deep_net_lower_bound(n, depth, radius, d_max, r, d, &ledger).unwrap();
    rel.value / deep.value
}

const CONSISTENCY_TUPLES: [(u64, usize, f64, usize, f64); 10] = [
    (100, 1, 1.0, 2, 1.0),
    (100, 2, 1.0, 2, 1.0),
    (100, 1, 1.0, 2, 0.5),
    (1000, 3, 1.0, 4, 2.0),
    (5, 1, 1.0, 2, 1.0),
    (1_000_000, 4, 2.0, 8, 1.0),
    (50, 2, 1.5, 3, 1.5),
    (10_000, 1, 1.0, 16, 0.25),
    (300, 5, 1.0, 2, 3.0),
    (20, 2, 3.0, 2, 0.75),
];

#[test]
fn relation_and_deep_bounds_share_rate() {
    // The two bounds differ only through log2(n + 1) versus log2 n, so their
    // ratio settles to a constant as n grows.
    for d in 1..=3usize {
        for (n, depth, radius, d_max, r) in CONSISTENCY_TUPLES {
            let a = relation_over_deep(n * 1000, depth, radius, d_max, r, d);
            let b = relation_over_deep(n * 1_000_000, depth, radius, d_max, r, d);
            assert!(a.is_finite() && a > 0.0);
            assert!((a / b - 1.0).abs() < 0.05, "d={d} {n}: {a} vs {b}");
        }
    }
}

#[test]
fn relation_bound_does_not_dominate_everywhere() {
    // Dominance holds on most one-dimensional tuples but not uniformly.
    let ratios: Vec<f64> = CONSISTENCY_TUPLES
        .iter()
        .map(|&(n, l, rad, dm, r)| relation_over_deep(n, l, rad, dm, r, 1))
        .collect();
    assert!(ratios.iter().filter(|&&x| x >= 1.0).count() >= 9);
    assert_relative_eq!(relation_over_deep(100, 1, 1.0, 2, 1.0, 1), 2.3647, max_relative = 1e-4);
    assert!(relation_over_deep(100, 1, 1.0, 2, 1.0, 3) < 1.0);
}

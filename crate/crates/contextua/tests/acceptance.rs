//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (run with `--nocapture` to see them).

mod common;

use std::time::Instant;

use common::{grid_search_ft_value, in_ball};
use contextua::bloch::{outcome_grid, trine_vectors};
use contextua::classical::{
    compatibility_check, feasible_triple_oracle, mc_verify_lsw_bound, sample_hidden_state,
};
use contextua::lsw::{
    counterexample_check, find_critical_sharpness, max_r3_numeric, r3_quantum_bound,
    violation_scan, Regime, REGIME_SWITCH_ETA_SQ,
};
use contextua::triplewise::{
    fermat_torricelli, orthogonal_case_check, orthogonal_ft_vector, triplewise_compat,
    LambdaSystem, TriplewiseJoint,
};
use contextua::{Vec3, DEFAULT_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_runtime(start: Instant, limit_s: f64, name: &str) {
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < limit_s,
        "{name} exceeded the {limit_s} s budget: {elapsed:.2} s"
    );
}

/// Criterion 1: the critical sharpness and the peak quantum value.
#[test]
fn criterion_1_critical_point() {
    let start = Instant::now();
    let critical = find_critical_sharpness(1e-6);
    assert!(
        (critical.eta_c - 0.456619).abs() <= 1e-4,
        "eta_c = {}",
        critical.eta_c
    );
    assert!(
        (critical.r3 - 0.937439).abs() <= 1e-4,
        "r3 = {}",
        critical.r3
    );
    check_runtime(start, 1.0, "criterion 1");
    println!(
        "criterion 1 PASS: eta_c = {:.6}, R3 = {:.6}, delta = {:.6}",
        critical.eta_c, critical.r3, critical.delta
    );
}

/// Criterion 2: the trine triplewise boundary sits at sharpness 2/3.
#[test]
fn criterion_2_trine_boundary() {
    let start = Instant::now();
    let mut lo = 0.5;
    let mut hi = 0.8;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        let t = trine_vectors(mid);
        if triplewise_compat(t[0], t[1], t[2], DEFAULT_TOL)
            .unwrap()
            .measurable
        {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let boundary = 0.5 * (lo + hi);
    assert!(
        (boundary - 2.0 / 3.0).abs() <= 1e-6,
        "trine boundary = {boundary}"
    );
    check_runtime(start, 1.0, "criterion 2");
    println!("criterion 2 PASS: trine boundary eta = {boundary:.9}");
}

/// Criterion 3: the orthogonal-triple boundary sits at unit norm-square sum,
/// via both the closed form and the Fermat-Torricelli criterion.
#[test]
fn criterion_3_orthogonal_boundary() {
    let start = Instant::now();
    let mut summary = Vec::new();
    for fractions in [[1.0, 1.0, 1.0], [0.5, 0.6, 0.4]] {
        let vectors = |scale: f64| {
            [
                Vec3::new(fractions[0] * scale, 0.0, 0.0),
                Vec3::new(0.0, fractions[1] * scale, 0.0),
                Vec3::new(0.0, 0.0, fractions[2] * scale),
            ]
        };
        let norm_sq_sum: f64 = fractions.iter().map(|f| f * f).sum();
        let s_max = (1.0 / fractions.iter().cloned().fold(0.0, f64::max)).min(1.9);

        let bisect = |measurable: &dyn Fn(f64) -> bool| {
            let mut lo = 0.1;
            let mut hi = s_max;
            assert!(measurable(lo) && !measurable(hi));
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if measurable(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };

        let s_closed = bisect(&|s: f64| {
            let v = vectors(s);
            orthogonal_case_check(v[0], v[1], v[2], DEFAULT_TOL).unwrap()
        });
        let s_ft = bisect(&|s: f64| {
            let v = vectors(s);
            triplewise_compat(v[0], v[1], v[2], DEFAULT_TOL)
                .unwrap()
                .measurable
        });

        assert!(
            (s_closed - s_ft).abs() <= 1e-6,
            "closed form and criterion disagree: {s_closed} vs {s_ft}"
        );
        for s in [s_closed, s_ft] {
            let total = norm_sq_sum * s * s;
            assert!(
                (total - 1.0).abs() <= 1e-6,
                "norm-square sum at boundary = {total}"
            );
        }
        summary.push(format!(
            "fractions {:?}: norm-square sum {:.9}",
            fractions,
            norm_sq_sum * s_ft * s_ft
        ));
    }
    check_runtime(start, 1.0, "criterion 3");
    println!(
        "criterion 3 PASS: closed form and criterion agree at the boundary ({})",
        summary.join("; ")
    );
}

/// Criterion 4: the pairwise-measurable but not triplewise-measurable
/// configuration that cannot violate the LSW inequality.
#[test]
fn criterion_4_counterexample() {
    let start = Instant::now();
    let report = counterexample_check();
    assert!(report.pairwise_measurable.iter().all(|&m| m));
    assert!(!report.triplewise_measurable);
    assert!(
        (report.r3_max - (3.0 + 2f64.sqrt()) / 6.0).abs() <= 1e-9,
        "R3 = {}",
        report.r3_max
    );
    assert!(report.r3_max < report.classical_bound);
    assert!(report.ok);
    check_runtime(start, 1.0, "criterion 4");
    println!(
        "criterion 4 PASS: R3 = {:.9} < classical bound {:.9}, margin = {:.6}",
        report.r3_max, report.classical_bound, report.margin
    );
}

/// Criterion 5: Monte Carlo over 10^5 random hidden models never exceeds the
/// LSW bound.
#[test]
fn criterion_5_lsw_monte_carlo() {
    let start = Instant::now();
    let report = mc_verify_lsw_bound(100_000, 7);
    assert_eq!(report.violations, 0, "violations = {}", report.violations);
    assert!(report.max_slack <= 1e-9);
    check_runtime(start, 30.0, "criterion 5");
    println!(
        "criterion 5 PASS: {} trials, {} violations, max slack {:.3e}",
        report.trials, report.violations, report.max_slack
    );
}

/// Criterion 6: the compatibility criterion agrees with the brute-force
/// feasibility oracle on 10^4 random hidden states.
#[test]
fn criterion_6_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut compatible = 0u32;
    for trial in 0..10_000 {
        let state = sample_hidden_state(&mut rng);
        let by_criterion = compatibility_check(&state, 1e-6);
        let by_oracle = feasible_triple_oracle(&state, 1e-6);
        assert_eq!(
            by_criterion, by_oracle,
            "disagreement at trial {trial}: {state:?}"
        );
        if by_criterion {
            compatible += 1;
        }
    }
    check_runtime(start, 60.0, "criterion 6");
    println!("criterion 6 PASS: 10000 states, 0 disagreements ({compatible} compatible)");
}

/// Criterion 7: the numerical maximum matches the closed form on a sharpness
/// grid, with the regime switch at eta^2 = 0.3 and continuous branches.
#[test]
fn criterion_7_quantum_bound() {
    let start = Instant::now();
    for i in 1..=19 {
        let eta = 0.05 * i as f64;
        let (value, x_star) = max_r3_numeric(eta, 1000);
        let closed = r3_quantum_bound(eta);
        assert!(
            (value - closed.value).abs() <= 1e-9,
            "eta {eta}: numeric {value} vs closed {}",
            closed.value
        );
        let eta_sq = eta * eta;
        if eta_sq < REGIME_SWITCH_ETA_SQ - 0.01 {
            assert!((x_star + 0.5).abs() <= 1e-6, "eta {eta}: x* = {x_star}");
            assert_eq!(closed.regime, Regime::Trine);
        } else if eta_sq > REGIME_SWITCH_ETA_SQ + 0.01 {
            assert!((x_star + 1.0).abs() <= 1e-6, "eta {eta}: x* = {x_star}");
            assert_eq!(closed.regime, Regime::Parallel);
        }
    }
    let switch = REGIME_SWITCH_ETA_SQ.sqrt();
    let eta_sq = switch * switch;
    let trine = 0.5 + eta_sq / 4.0 + 0.5 * (1.0 - 2.0 * eta_sq + eta_sq * eta_sq / 4.0).sqrt();
    let parallel = 1.0 - eta_sq / 3.0;
    assert!((trine - parallel).abs() < 1e-12, "branch gap at the switch");
    check_runtime(start, 5.0, "criterion 7");
    println!(
        "criterion 7 PASS: 19 grid values within 1e-9, branch gap {:.2e}",
        (trine - parallel).abs()
    );
}

/// Criterion 8: the eight-effect construction is sound on 10^3 random
/// measurable triples: positive effects, exact marginals, saturated
/// mixed-sign constraints.
#[test]
fn criterion_8_construction_soundness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let labels = outcome_grid(3);
    let mut built = 0;
    while built < 1000 {
        let v = [
            in_ball(&mut rng, 1.0),
            in_ball(&mut rng, 1.0),
            in_ball(&mut rng, 1.0),
        ];
        if !triplewise_compat(v[0], v[1], v[2], DEFAULT_TOL)
            .unwrap()
            .measurable
        {
            continue;
        }
        let joint = TriplewiseJoint::build(v[0], v[1], v[2], DEFAULT_TOL).unwrap();

        for effect in &joint.effects {
            assert!(effect.min_eigenvalue() >= -1e-10);
        }

        // single marginals reproduce the observables componentwise
        let povm = joint.povm();
        for (axis, &lambda) in v.iter().enumerate() {
            let marginal = povm.marginalize(axis).unwrap();
            for (effect, sign) in marginal.effects.iter().zip([1.0, -1.0]) {
                assert!((effect.a - 0.5).abs() <= 1e-12);
                let expected = lambda * (0.5 * sign);
                assert!((effect.b.x - expected.x).abs() <= 1e-12);
                assert!((effect.b.y - expected.y).abs() <= 1e-12);
                assert!((effect.b.z - expected.z).abs() <= 1e-12);
            }
        }

        // pairwise marginals land in the pairwise family at correlation Z_ij
        for (pair, &(i, j)) in contextua::triplewise::PAIR_INDICES.iter().enumerate() {
            for mu in [1.0f64, -1.0] {
                for nu in [1.0f64, -1.0] {
                    let mut a_sum = 0.0;
                    let mut b_sum = Vec3::ZERO;
                    for (idx, label) in labels.iter().enumerate() {
                        if f64::from(label[i]) == mu && f64::from(label[j]) == nu {
                            a_sum += joint.effects[idx].a;
                            b_sum = b_sum + joint.effects[idx].b;
                        }
                    }
                    let expected_a = (1.0 + mu * nu * joint.corr[pair]) / 4.0;
                    let expected_b = (v[i] * mu + v[j] * nu) * 0.25;
                    assert!((a_sum - expected_a).abs() <= 1e-12);
                    assert!((b_sum - expected_b).norm() <= 1e-12);
                }
            }
        }

        // mixed-sign outcomes saturate their positivity constraints
        for (idx, label) in labels.iter().enumerate() {
            let uniform = label.iter().all(|&s| s == label[0]);
            if !uniform {
                assert!(
                    joint.effects[idx].min_eigenvalue().abs() <= 1e-8,
                    "mixed-sign effect {idx} not saturated: {}",
                    joint.effects[idx].min_eigenvalue()
                );
            }
        }
        built += 1;
    }
    check_runtime(start, 10.0, "criterion 8");
    println!("criterion 8 PASS: 1000 random measurable triples built and verified");
}

/// Criterion 9: the Weiszfeld solver agrees with a three-level grid-search
/// oracle, and the orthogonal-case closed form is reproduced to 1e-9.
#[test]
fn criterion_9_ft_solver() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut vertex_cases = 0;
    for _ in 0..1000 {
        let points: Vec<Vec3> = (0..4).map(|_| in_ball(&mut rng, 2.0)).collect();
        let ft = fermat_torricelli(&points).unwrap();
        let oracle = grid_search_ft_value(&points, 41, 3);
        // The solver value is an exact objective evaluation, so it can never
        // fall below the true minimum; the informative direction is that it
        // never exceeds what brute force can find.
        assert!(
            ft.total_distance <= oracle + 1e-6,
            "solver {} above oracle {}",
            ft.total_distance,
            oracle
        );
        assert!(oracle - ft.total_distance <= 1e-4, "oracle sanity band");
        if ft.at_vertex.is_some() {
            // Vertex optima are located exactly by both sides.
            assert!((ft.total_distance - oracle).abs() <= 1e-9);
            vertex_cases += 1;
        }
    }
    assert!(vertex_cases > 50, "vertex optima undersampled");

    // closed-form orthogonal-case vector
    let l1 = Vec3::new(0.3, 0.2, 0.0);
    let l2 = Vec3::new(-0.1, 0.4, 0.0);
    let l3 = Vec3::new(0.0, 0.0, 0.5);
    let closed = orthogonal_ft_vector(l1, l2, l3);
    let system = LambdaSystem::new(l1, l2, l3);
    let ft = fermat_torricelli(&system.points()).unwrap();
    assert!(
        (ft.point - closed).norm() <= 1e-9,
        "closed form {:?} vs solver {:?}",
        closed,
        ft.point
    );
    check_runtime(start, 60.0, "criterion 9");
    println!(
        "criterion 9 PASS: 1000 grid-oracle comparisons ({vertex_cases} vertex optima), closed form matched to 1e-9"
    );
}

/// Criterion 10: the emitted violation curve is byte-identical to the golden
/// file.
#[test]
fn criterion_10_scan_golden_file() {
    let start = Instant::now();
    let scan = violation_scan(0.0, 1.0, 200);
    assert_eq!(scan.rows.len(), 200);
    let golden = include_str!("golden/lsw_scan_200.csv");
    let produced = scan.to_csv();
    assert_eq!(produced, golden, "scan CSV deviates from the golden file");
    check_runtime(start, 2.0, "criterion 10");
    println!("criterion 10 PASS: 200-row scan byte-identical to the golden file");
}

/// Regenerates the golden scan file; run explicitly with
/// `cargo test -p contextua --test acceptance regenerate_golden -- --ignored`.
#[test]
#[ignore]
fn regenerate_golden() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/lsw_scan_200.csv");
    std::fs::write(path, violation_scan(0.0, 1.0, 200).to_csv()).unwrap();
}

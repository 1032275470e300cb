use dsgs::linalg::{
    dot, min_nonzero_eig_gram, norm, norm_sq, scaled_condition_number, sub, DenseMatrix, GramSide,
    DEFAULT_RANK_THRESHOLD,
};
use dsgs::problems::{example1_system, gen_conditioned, gen_gaussian_consistent, gen_rank_deficient, LinearSystem};
use dsgs::sampling::{build_pair_distribution, Rng64};
use dsgs::solvers::{
    dsgs_solve, dsgs_step, rek_solve, rek_step, rgs_solve, rgs_step, rk_solve, rk_step, solve_linear, sor_solve,
    sor_variant_step, unlocked_gs_solve, unlocked_gs_step, LinearSolver, SolverState, SorVariant, StepsizePolicy,
    UnlockedCase,
};
use dsgs::stats::fit_log_slope;
use dsgs::trace::{InitialPoint, Termination, TerminationMetric};
use proptest::prelude::*;

fn state(system: &LinearSystem<f64>, x: Vec<f64>) -> SolverState<f64> {
    SolverState::new(&system.a, &system.b, x, Rng64::new(0)).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Diagonally dominant square system with a planted solution.
fn dominant_system(n: usize, seed: u64) -> LinearSystem<f64> {
    let mut rng = Rng64::new(seed);
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if i != j {
                let v = rng.normal();
                off += f64::abs(v);
                a.set(i, j, v);
            }
        }
        a.set(i, i, off + 1.0);
    }
    let x: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let b = a.mul_vec(&x);
    LinearSystem::new(a, b).unwrap().with_solution(x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_step_fixes_a_solution(m in 2usize..10, n in 2usize..10, seed in 0u64..1000) {
        let sys = gen_gaussian_consistent::<f64>(m, n, seed).unwrap();
        let xs = sys.solution.clone().unwrap();
        for i in 0..m {
            for j in 0..n {
                let mut s = state(&sys, xs.clone());
                dsgs_step(&mut s, &sys.a, (i, j), 0.7).unwrap();
                prop_assert!(max_diff(&s.x, &xs) <= 1e-12);
            }
            let mut s = state(&sys, xs.clone());
            rk_step(&mut s, &sys.a, &sys.b, i).unwrap();
            prop_assert!(max_diff(&s.x, &xs) <= 1e-12);
            for j in 0..n {
                // z = 0 is the extended method's limit on a consistent system
                let mut s = state(&sys, xs.clone());
                s.aux = Some(vec![0.0; m]);
                rek_step(&mut s, &sys.a, &sys.b, i, j).unwrap();
                prop_assert!(max_diff(&s.x, &xs) <= 1e-12);
            }
        }
        for j in 0..n {
            let mut s = state(&sys, xs.clone());
            rgs_step(&mut s, &sys.a, j).unwrap();
            prop_assert!(max_diff(&s.x, &xs) <= 1e-12);
        }
    }

    #[test]
    fn relaxation_steps_fix_a_solution(n in 2usize..8, seed in 0u64..1000, alpha in 0.05f64..1.9) {
        let sys = dominant_system(n, seed);
        let xs = sys.solution.clone().unwrap();
        let mut rng = Rng64::new(seed);
        for variant in SorVariant::all(n) {
            let mut x = xs.clone();
            sor_variant_step(&mut x, &sys.a, &sys.b, alpha, &variant, &mut rng).unwrap();
            prop_assert!(max_diff(&x, &xs) <= 1e-12);
        }
        for i in 0..n {
            for j in 0..n {
                let mut x = xs.clone();
                unlocked_gs_step(&mut x, &sys.a, &sys.b, alpha, UnlockedCase::Pair(i, j), &mut rng).unwrap();
                prop_assert!(max_diff(&x, &xs) <= 1e-12);
            }
        }
    }

    #[test]
    fn cached_residual_matches_recompute(m in 2usize..12, n in 2usize..12, seed in 0u64..1000) {
        let sys = gen_gaussian_consistent::<f64>(m, n, seed).unwrap();
        let mut s = state(&sys, vec![0.0; n]);
        let dist = build_pair_distribution(&sys.a).unwrap();
        let mut rng = Rng64::new(seed);
        let pair = dist.sample_pair(&mut rng);
        dsgs_step(&mut s, &sys.a, pair, 1.0 / n as f64).unwrap();
        let fresh = sys.a.residual(&s.x, &sys.b);
        prop_assert!(max_diff(&s.residual, &fresh) <= 1e-12);
        for _ in 0..200 * n {
            let pair = dist.sample_pair(&mut rng);
            dsgs_step(&mut s, &sys.a, pair, 1.0 / n as f64).unwrap();
        }
        let (drift, _) = s.residual_drift(&sys.a, &sys.b);
        prop_assert!(drift <= 1e-9);
    }
}

#[test]
fn column_steps_keep_the_residual_cache_exact() {
    let sys = gen_gaussian_consistent::<f64>(8, 5, 4).unwrap();
    let mut s = state(&sys, vec![0.3; 5]);
    for j in 0..5 {
        rgs_step(&mut s, &sys.a, j).unwrap();
        assert!(max_diff(&s.residual, &sys.a.residual(&s.x, &sys.b)) <= 1e-12);
    }
}

#[test]
fn long_runs_need_no_residual_refresh() {
    let sys = gen_gaussian_consistent::<f64>(40, 20, 1).unwrap();
    let term = Termination::new(TerminationMetric::XError, 1e-10);
    let trace = dsgs_solve(
        &sys,
        StepsizePolicy::FullColumnRank,
        &term,
        &InitialPoint::Zeros,
        Rng64::split(1),
    )
    .unwrap();
    assert!(trace.converged);
    assert_eq!(trace.residual_refreshes, 0);
}

#[test]
fn projection_steps_satisfy_their_equations() {
    let sys = gen_gaussian_consistent::<f64>(6, 4, 9).unwrap();
    let mut s = state(&sys, vec![1.0, -2.0, 0.5, 3.0]);
    rk_step(&mut s, &sys.a, &sys.b, 2).unwrap();
    assert!((dot(sys.a.row(2), &s.x) - sys.b[2]).abs() < 1e-12);

    let mut s = state(&sys, vec![0.0; 4]);
    rek_step(&mut s, &sys.a, &sys.b, 1, 3).unwrap();
    let z = s.aux.clone().unwrap();
    assert!(dot(&sys.a.column(3), &z).abs() < 1e-12);
}

/// Exact `E‖Δ⁺‖²` and `E‖β⁺‖²` over the pair distribution.
fn expected_step(sys: &LinearSystem<f64>, x: &[f64], alpha: f64) -> (f64, f64) {
    let xs = sys.solution.as_ref().unwrap();
    let dist = build_pair_distribution(&sys.a).unwrap();
    let (mut e_delta, mut e_beta) = (0.0, 0.0);
    for i in 0..sys.rows() {
        for j in 0..sys.cols() {
            let p = dist.probability(i, j);
            if p == 0.0 {
                continue;
            }
            let mut s = state(sys, x.to_vec());
            dsgs_step(&mut s, &sys.a, (i, j), alpha).unwrap();
            e_delta += p * norm_sq(&sub(&s.x, xs));
            e_beta += p * norm_sq(&sys.a.residual(&s.x, &sys.b));
        }
    }
    (e_delta, e_beta)
}

#[test]
fn expected_error_contracts_for_full_column_rank() {
    let sys = gen_gaussian_consistent::<f64>(10, 6, 3).unwrap();
    let xs = sys.solution.clone().unwrap();
    let n = 6.0;
    let kappa = scaled_condition_number(&sys.a).unwrap();
    let rate = 1.0 - 1.0 / (n * kappa * kappa);
    let mut rng = Rng64::new(17);
    for _ in 0..20 {
        let x: Vec<f64> = (0..6).map(|_| rng.normal()).collect();
        let (e_delta, _) = expected_step(&sys, &x, 1.0 / n);
        let before = norm_sq(&sub(&x, &xs));
        assert!(
            e_delta <= rate * before * (1.0 + 1e-12),
            "{e_delta} > {rate} * {before}"
        );
    }
}

#[test]
fn expected_residual_contracts_for_any_matrix() {
    let sys = gen_rank_deficient::<f64>(20, 10, 5, 2).unwrap();
    let lambda = min_nonzero_eig_gram(&sys.a, GramSide::Row, DEFAULT_RANK_THRESHOLD).unwrap();
    let fro = sys.a.frobenius_norm_sq();
    let alpha = StepsizePolicy::RankDeficient.resolve(&sys.a).unwrap();
    assert!((alpha - lambda / fro).abs() < 1e-15);
    let rate = 1.0 - (lambda / fro).powi(2);
    let mut rng = Rng64::new(23);
    for _ in 0..20 {
        let x: Vec<f64> = (0..10).map(|_| rng.normal()).collect();
        let (_, e_beta) = expected_step(&sys, &x, alpha);
        let before = norm_sq(&sys.a.residual(&x, &sys.b));
        assert!(e_beta <= rate * before * (1.0 + 1e-12), "{e_beta} > {rate} * {before}");
    }
}

#[test]
fn starting_at_the_solution_stops_at_epoch_zero() {
    let sys = gen_gaussian_consistent::<f64>(12, 7, 5).unwrap();
    let init = InitialPoint::Given(sys.solution.clone().unwrap());
    let term = Termination::new(TerminationMetric::XError, 1e-10);
    for solver in [
        LinearSolver::Dsgs(StepsizePolicy::FullColumnRank),
        LinearSolver::Rk,
        LinearSolver::Rgs,
        LinearSolver::Rek,
    ] {
        let trace = solve_linear(&sys, solver, &term, &init, Rng64::split(5)).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.epochs(), 0);
        assert_eq!(trace.points.len(), 1);
    }
}

#[test]
fn baselines_converge() {
    let over = gen_gaussian_consistent::<f64>(30, 10, 8).unwrap();
    let term = Termination::new(TerminationMetric::XError, 1e-8);
    assert!(
        rk_solve(&over, &term, &InitialPoint::Zeros, Rng64::split(8))
            .unwrap()
            .converged
    );
    assert!(
        rgs_solve(&over, &term, &InitialPoint::Zeros, Rng64::split(8))
            .unwrap()
            .converged
    );
    let under = gen_gaussian_consistent::<f64>(10, 30, 8).unwrap();
    let term = Termination::new(TerminationMetric::Residual, 1e-8);
    assert!(
        rek_solve(&under, &term, &InitialPoint::Zeros, Rng64::split(8))
            .unwrap()
            .converged
    );
    assert!(
        dsgs_solve(
            &under,
            StepsizePolicy::FullColumnRank,
            &term,
            &InitialPoint::Zeros,
            Rng64::split(8)
        )
        .unwrap()
        .converged
    );
}

#[test]
fn rank_deficient_residual_decays_linearly() {
    let sys = gen_rank_deficient::<f64>(20, 10, 5, 6).unwrap();
    let term = Termination::new(TerminationMetric::Residual, 1e-10);
    let trace = dsgs_solve(
        &sys,
        StepsizePolicy::RankDeficient,
        &term,
        &InitialPoint::Zeros,
        Rng64::split(6),
    )
    .unwrap();
    assert!(trace.converged);
    let slope = fit_log_slope(&trace.series(TerminationMetric::Residual));
    assert!(slope < 0.0, "slope {slope}");
}

#[test]
fn column_step_minimizes_the_residual() {
    let sys = gen_gaussian_consistent::<f64>(7, 4, 12).unwrap();
    let x = vec![0.5, -1.0, 2.0, 0.25];
    for j in 0..4 {
        let mut s = state(&sys, x.clone());
        rgs_step(&mut s, &sys.a, j).unwrap();
        let ours = norm(&sys.a.residual(&s.x, &sys.b));
        // grid search over the coordinate, then refine around the best cell
        let eval = |t: f64| {
            let mut y = x.clone();
            y[j] = t;
            norm(&sys.a.residual(&y, &sys.b))
        };
        let (mut lo, mut hi) = (-20.0, 20.0);
        for _ in 0..6 {
            let step = (hi - lo) / 400.0;
            let best = (0..=400)
                .map(|k| lo + k as f64 * step)
                .min_by(|a, b| eval(*a).total_cmp(&eval(*b)))
                .unwrap();
            lo = best - step;
            hi = best + step;
        }
        let brute = eval((lo + hi) / 2.0);
        assert!(ours <= brute + 1e-9, "column {j}: {ours} vs {brute}");
        assert!((ours - brute).abs() < 1e-6);
    }
}

#[test]
fn update_cap_truncates() {
    let sys = gen_conditioned::<f64>(40, 20, 100.0, 1).unwrap();
    let term = Termination::new(TerminationMetric::XError, 1e-10).with_cap(20 * 50);
    let trace = dsgs_solve(
        &sys,
        StepsizePolicy::FullColumnRank,
        &term,
        &InitialPoint::Zeros,
        Rng64::split(1),
    )
    .unwrap();
    assert!(trace.truncated);
    assert!(!trace.converged);
    assert!(trace.coordinate_updates() <= 1000);
}

#[test]
fn every_solver_counts_n_updates_per_epoch() {
    let sys = gen_gaussian_consistent::<f64>(15, 6, 2).unwrap();
    let term = Termination::new(TerminationMetric::XError, 1e-6).with_cap(6 * 500);
    for solver in [
        LinearSolver::Dsgs(StepsizePolicy::FullColumnRank),
        LinearSolver::Rk,
        LinearSolver::Rgs,
        LinearSolver::Rek,
    ] {
        let trace = solve_linear(&sys, solver, &term, &InitialPoint::Zeros, Rng64::split(2)).unwrap();
        let mut last = None;
        for p in &trace.points {
            assert_eq!(p.coordinate_updates, p.epoch * 6, "{solver:?}");
            if let Some(e) = last {
                assert!(p.epoch > e);
            }
            last = Some(p.epoch);
        }
    }
}

#[test]
fn traces_are_bit_identical_under_a_seed() {
    let sys = gen_gaussian_consistent::<f64>(20, 8, 31).unwrap();
    let term = Termination::new(TerminationMetric::XError, 1e-10);
    let init = InitialPoint::Gaussian { scale: 1.0 };
    for solver in [
        LinearSolver::Dsgs(StepsizePolicy::FullColumnRank),
        LinearSolver::Rk,
        LinearSolver::Rgs,
        LinearSolver::Rek,
    ] {
        let run = || solve_linear(&sys, solver, &term, &init, Rng64::split(31)).unwrap();
        let (a, b) = (run(), run());
        let strip = |t: &dsgs::Trace| t.points.iter().map(|p| p.without_time()).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(
            a.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }
}

#[test]
fn sor_variants_solve_dominant_systems() {
    let sys = dominant_system(6, 40);
    let term = Termination::new(TerminationMetric::XError, 1e-9).with_cap(1_000_000);
    for variant in SorVariant::all(6) {
        let trace = sor_solve(&sys, &variant, 1.0, &term, &InitialPoint::Zeros, Rng64::split(40)).unwrap();
        assert!(trace.converged, "{}", variant.name());
    }
}

#[test]
fn sor_diverges_or_stalls_on_the_indefinite_example() {
    let sys = example1_system(2.0f64);
    let term = Termination::new(TerminationMetric::Residual, 1e-10).with_cap(2_000);
    for variant in SorVariant::all(2) {
        let trace = sor_solve(
            &sys,
            &variant,
            0.5,
            &term,
            &InitialPoint::Given(vec![1.0, 1.0]),
            Rng64::split(0),
        )
        .unwrap();
        assert!(!trace.converged, "{}", variant.name());
    }
    let trace = unlocked_gs_solve(&sys, 0.5, &term, &InitialPoint::Given(vec![1.0, 1.0]), Rng64::split(0)).unwrap();
    assert!(trace.truncated && !trace.converged);
}

#[test]
fn single_precision_dsgs_converges() {
    let sys = gen_gaussian_consistent::<f32>(30, 10, 2).unwrap();
    let term = Termination::new(TerminationMetric::XError, 1e-4);
    let trace = dsgs_solve(
        &sys,
        StepsizePolicy::FullColumnRank,
        &term,
        &InitialPoint::Zeros,
        Rng64::split(2),
    )
    .unwrap();
    assert!(trace.converged);
}

use slog_core::bench::*;
use slog_core::simdata::{generate, SimulationSpec};
use slog_core::{solve_slog, SlogError, SolverConfig};

fn small_grid(algorithms: Vec<Algorithm>) -> ExperimentGrid {
    let mut g = ExperimentGrid::new(vec![0.3, 0.7], vec![0.2], vec![30], vec![20], algorithms);
    g.replicates = 2;
    g
}

#[test]
fn grid_emits_one_record_per_cell_replicate_and_algorithm() {
    let mut grid = small_grid(vec![Algorithm::Slog, Algorithm::Rslog, Algorithm::Cd]);
    grid.mode = ComparisonMode::MatchReference { bound: 1e-3 };
    let records = run_grid(&grid).unwrap();
    assert_eq!(records.len(), 2 * 2 * 3);
    for r in &records {
        assert!(r.error.is_none(), "{:?}", r.error);
        assert!(r.dist_to_ref <= 1e-3, "{:?}", r);
        assert_eq!(r.csv_row().split(',').count(), RUNS_CSV_HEADER.split(',').count());
    }
    // Algorithms on the same replicate share data and penalty.
    for chunk in records.chunks(3) {
        assert!(chunk.iter().all(|r| r.seed == chunk[0].seed && r.lambda == chunk[0].lambda));
    }
    let mut seeds: Vec<u64> = records.iter().map(|r| r.seed).collect();
    seeds.dedup();
    assert_eq!(seeds.len(), 4);
}

#[test]
fn every_algorithm_runs_free() {
    let mut grid = small_grid(Algorithm::ALL.to_vec());
    grid.s = vec![0.5];
    grid.replicates = 1;
    grid.mode = ComparisonMode::FreeRunning;
    let records = run_grid(&grid).unwrap();
    assert_eq!(records.len(), Algorithm::ALL.len());
    for r in &records {
        assert!(r.error.is_none(), "{}: {:?}", r.algorithm, r.error);
        assert!(r.iterations > 0);
    }
}

#[test]
fn parallel_and_serial_grids_agree_on_counts() {
    let mut grid = small_grid(vec![Algorithm::Slog, Algorithm::Cd]);
    let serial = run_grid(&grid).unwrap();
    grid.jobs = 2;
    let parallel = run_grid(&grid).unwrap();
    let key = |r: &RunRecord| (r.seed, r.algorithm, r.iterations, r.nonzeros);
    assert_eq!(serial.iter().map(key).collect::<Vec<_>>(), parallel.iter().map(key).collect::<Vec<_>>());
}

#[test]
fn invalid_grids_are_rejected() {
    let mut grid = small_grid(vec![Algorithm::Slog]);
    grid.replicates = 0;
    assert!(run_grid(&grid).is_err());
    let grid = ExperimentGrid::new(vec![1.5], vec![0.2], vec![30], vec![20], vec![Algorithm::Slog]);
    assert!(run_grid(&grid).is_err());
}

#[test]
fn algorithm_names_round_trip() {
    for a in Algorithm::ALL {
        assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        assert_eq!(a.to_string().to_uppercase().parse::<Algorithm>().unwrap(), a);
    }
    assert!("lars".parse::<Algorithm>().is_err());
}

#[test]
fn folds_are_balanced_and_reproducible() {
    let a = fold_assignment(23, 5, 3);
    assert_eq!(a, fold_assignment(23, 5, 3));
    let mut sizes = [0usize; 5];
    for f in &a {
        sizes[*f] += 1;
    }
    assert!(sizes.iter().all(|s| *s == 4 || *s == 5));
}

#[test]
fn cross_validation_scores_every_level() {
    let prob = generate(&SimulationSpec::new(60, 15, 0.3, 2)).unwrap().problem;
    let grid = [0.2, 0.6, 1.0];
    let points = cross_validate(&prob, &grid, 4, 7).unwrap();
    assert_eq!(points.len(), 3);
    for (pt, s) in points.iter().zip(grid) {
        assert_eq!(pt.s, s);
        assert_eq!(pt.fold_mse.len(), 4);
        let mean = pt.fold_mse.iter().sum::<f64>() / 4.0;
        assert!((pt.mean_mse - mean).abs() < 1e-12 * mean);
        assert!(pt.mean_mse.is_finite() && pt.mean_mse > 0.0);
    }
    assert!(cross_validate(&prob, &grid, 1, 7).is_err());
    assert!(cross_validate(&prob, &grid, 61, 7).is_err());
}

#[test]
fn effective_zeros_need_snapshots() {
    let prob = generate(&SimulationSpec::new(40, 30, 0.5, 1)).unwrap().problem;
    let lambda = 5.0;
    let plain = solve_slog(&prob, lambda, &SolverConfig::default()).unwrap();
    assert!(matches!(effective_zero_counts(&plain), Err(SlogError::TraceNotRetained)));

    let cfg = SolverConfig {
        retain_snapshots: true,
        ..SolverConfig::default().with_threshold(0.0)
    };
    let kept = solve_slog(&prob, lambda, &cfg).unwrap();
    let counts = effective_zero_counts(&kept).unwrap();
    assert_eq!(counts.len(), kept.snapshots.as_ref().unwrap().len());
    assert!(counts.iter().all(|(_, c)| *c <= 30));
}

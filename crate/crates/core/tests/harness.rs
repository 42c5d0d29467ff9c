use hamiltonian_cs::harness::{
    grid_values, pair_reports, read_sweep_csv, run_heatmap, run_sweep, speedup_reports, sweep_csv, ExperimentConfig,
    MeasurementSpec, SparsitySpec,
};
use hamiltonian_cs::pipeline::Protocol;

fn small_sweep() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        2,
        0.1,
        SparsitySpec::List(vec![1, 2]),
        MeasurementSpec::Range {
            min: 1,
            max: 15,
            step: 2,
        },
    );
    cfg.trials = 6;
    cfg.seed = 17;
    cfg.circuit_length = Some(200);
    cfg
}

#[test]
fn worker_count_does_not_change_the_csv() {
    let cfg = small_sweep();
    let one = sweep_csv(&cfg, &run_sweep(&cfg, 1).unwrap()).unwrap();
    let eight = sweep_csv(&cfg, &run_sweep(&cfg, 8).unwrap()).unwrap();
    assert_eq!(one, eight);
    assert!(run_sweep(&cfg, 0).is_err());
}

#[test]
fn config_json_round_trip_and_strictness() {
    let mut cfg = small_sweep();
    cfg.fixed_hamiltonian = true;
    let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
    assert_eq!(back, cfg);

    let text = r#"{"n": 3, "eta_beta": 0.1, "sparsity": {"single": 2}, "measurements": {"grid": 4}}"#;
    let parsed = ExperimentConfig::from_json(text).unwrap();
    assert_eq!(parsed.trials, 100);
    assert_eq!(parsed.measurement_counts(), vec![16, 32, 47, 63]);
    let unknown = r#"{"n": 3, "eta_beta": 0.1, "sparsity": {"single": 2}, "measurements": {"grid": 4}, "colour": 1}"#;
    assert!(ExperimentConfig::from_json(unknown).is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        ExperimentConfig::new(3, 0.1, SparsitySpec::Single(64), MeasurementSpec::List(vec![10])),
        ExperimentConfig::new(3, 0.1, SparsitySpec::Single(2), MeasurementSpec::List(vec![10, 5])),
        ExperimentConfig::new(3, 0.1, SparsitySpec::Single(2), MeasurementSpec::List(vec![64])),
        ExperimentConfig::new(
            3,
            0.1,
            SparsitySpec::Single(2),
            MeasurementSpec::Range { min: 1, max: 5, step: 0 },
        ),
        ExperimentConfig::new(3, 0.1, SparsitySpec::Grid(1), MeasurementSpec::Grid(4)),
        ExperimentConfig::new(3, -1.0, SparsitySpec::Single(2), MeasurementSpec::List(vec![10])),
    ];
    for cfg in bad {
        assert!(cfg.validate().is_err(), "{cfg:?}");
    }
}

#[test]
fn range_spec_for_five_qubits() {
    let cfg = ExperimentConfig::new(
        5,
        0.1,
        SparsitySpec::Single(2),
        MeasurementSpec::Range {
            min: 11,
            max: 31,
            step: 10,
        },
    );
    assert_eq!(cfg.measurement_counts(), vec![11, 21, 31]);
    assert!(cfg.validate().is_ok());
    assert_eq!(grid_values(63, 16)[..4], [4, 8, 12, 16]);
    assert_eq!(*grid_values(63, 16).last().unwrap(), 63);
}

#[test]
fn single_trial_median_is_that_trial() {
    let mut cfg = small_sweep();
    cfg.trials = 1;
    cfg.measurements = MeasurementSpec::List(vec![15]);
    cfg.sparsity = SparsitySpec::Single(2);
    let pairs = run_sweep(&cfg, 1).unwrap();
    for curve in [&pairs[0].cs, &pairs[0].nocs] {
        let p = &curve.points[0];
        assert_eq!(p.trials, 1);
        assert_eq!(p.median_err, p.q1_err);
        assert_eq!(p.median_err, p.q3_err);
    }
    // every string measured: both protocols are exact
    assert_eq!(pairs[0].cs.points[0].success_rate, 1.0);
    assert_eq!(pairs[0].nocs.points[0].success_rate, 1.0);
}

#[test]
fn heatmap_marks_infeasible_cells() {
    let mut cfg = ExperimentConfig::new(2, 1e-4, SparsitySpec::Grid(4), MeasurementSpec::Grid(4));
    cfg.trials = 4;
    cfg.circuit_length = Some(200);
    let grid = run_heatmap(&cfg, 1).unwrap();
    assert_eq!(grid.s_values, vec![4, 8, 11, 15]);
    assert_eq!(grid.m_values, grid.s_values);
    for cell in &grid.cells {
        assert_eq!(cell.success_rate.is_none(), cell.s > cell.m, "{cell:?}");
    }
    // the full-measurement column always succeeds
    for r in 0..grid.s_values.len() {
        assert_eq!(grid.cell(r, grid.m_values.len() - 1).success_rate, Some(1.0));
    }
}

#[test]
fn report_from_csv_matches_the_in_memory_report() {
    let cfg = small_sweep();
    let pairs = run_sweep(&cfg, 1).unwrap();
    let rows = read_sweep_csv(&sweep_csv(&cfg, &pairs).unwrap()).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 8);
    assert!(rows.iter().any(|r| r.protocol == Protocol::NoCs));
    let from_csv = speedup_reports(&rows, cfg.threshold).unwrap();
    let direct = pair_reports(cfg.n, cfg.policy.as_str(), cfg.eta_beta, &pairs, cfg.threshold);
    assert_eq!(from_csv.len(), direct.len());
    for (a, b) in from_csv.iter().zip(&direct) {
        assert_eq!(a.s, b.s);
        assert_eq!(a.speedup, b.speedup);
    }
}

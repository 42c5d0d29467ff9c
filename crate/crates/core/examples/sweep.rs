//! Median error against M for both protocols, written as CSV and SVG.

use hamiltonian_cs::harness::{run_sweep, sweep_csv, sweep_svg, ExperimentConfig, MeasurementSpec, SparsitySpec};

fn main() -> hamiltonian_cs::Result<()> {
    let mut cfg = ExperimentConfig::new(
        3,
        0.1,
        SparsitySpec::List(vec![1, 2]),
        MeasurementSpec::Range {
            min: 2,
            max: 62,
            step: 4,
        },
    );
    cfg.trials = 10;
    cfg.seed = 42;
    cfg.validate()?;

    let pairs = run_sweep(&cfg, 1)?;
    print!("{}", sweep_csv(&cfg, &pairs)?);

    let path = std::env::temp_dir().join("sweep_example.svg");
    std::fs::write(&path, sweep_svg(&pairs, cfg.threshold))?;
    eprintln!("plot written to {}", path.display());
    Ok(())
}

//! Success rate over a coarse (s, M) grid.

use hamiltonian_cs::harness::{heatmap_csv, run_heatmap, ExperimentConfig, MeasurementSpec, SparsitySpec};

fn main() -> hamiltonian_cs::Result<()> {
    let mut cfg = ExperimentConfig::new(3, 1e-4, SparsitySpec::Grid(6), MeasurementSpec::Grid(6));
    cfg.trials = 8;
    cfg.seed = 3;
    let grid = run_heatmap(&cfg, 1)?;

    print!("  s\\M");
    for m in &grid.m_values {
        print!("{m:>6}");
    }
    println!();
    for (r, s) in grid.s_values.iter().enumerate() {
        print!("{s:>5}");
        for cell in grid.row(r) {
            match cell.success_rate {
                Some(p) => print!("{p:>6.2}"),
                None => print!("{:>6}", "NA"),
            }
        }
        println!();
    }
    eprintln!("{} CSV lines", heatmap_csv(&cfg, &grid)?.lines().count());
    Ok(())
}

//! Entropy of the g2g1 field state over amplitude and interaction time,
//! written as CSV with a metadata sidecar.

use reciprocation::sweep::{parse_values, run_transfer_sweep, SweepGrid};

fn main() -> reciprocation::error::Result<()> {
    let grid = SweepGrid::new(parse_values("0.25:5:0.25")?, parse_values("0:pi:pi/64")?, vec![0.1]);
    let out = std::env::temp_dir().join("entropy_surface.csv");
    let s = run_transfer_sweep(&grid, &out, 4)?;
    println!("{} rows, entropy in [{:.4}, {:.4}], written to {}", s.rows, s.min_entropy, s.max_entropy, out.display());
    Ok(())
}

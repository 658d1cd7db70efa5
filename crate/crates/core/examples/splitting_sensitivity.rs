//! How much the stored entanglement at a quarter period depends on the
//! ground splitting, for small and large amplitudes.

use reciprocation::sweep::{parse_values, run_grid, SweepGrid};

fn main() -> reciprocation::error::Result<()> {
    let grid = SweepGrid::new(vec![1.0, 3.0, 5.0], parse_values("pi/2")?, parse_values("0:1:0.05")?);
    let rows = run_grid(&grid, 2)?;
    for a in &grid.alpha_values {
        let e: Vec<f64> = rows.iter().filter(|r| r.alpha == *a).map(|r| r.entropy_bits).collect();
        let (lo, hi) = e.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let curve: Vec<String> = e.iter().step_by(4).map(|x| format!("{x:.3}")).collect();
        println!("alpha = {a}: spread {:.4}  E = [{}]", hi - lo, curve.join(", "));
    }
    Ok(())
}

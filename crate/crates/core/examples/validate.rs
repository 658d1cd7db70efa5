//! Run the built-in consistency checks for every preset.

use reciprocation::sweep::{run_validate, PRESETS};

fn main() -> reciprocation::error::Result<()> {
    for preset in PRESETS {
        let report = run_validate(preset, None)?;
        print!("{}", report.render());
        println!();
    }
    Ok(())
}

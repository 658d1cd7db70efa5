//! Store a singlet in two coherent cavity fields and look at each
//! measurement outcome.

use reciprocation::hamiltonians::SystemParams;
use reciprocation::hilbert::FockSpace;
use reciprocation::numerics::C64;
use reciprocation::protocol::{initial_transfer_state, measure_atoms, transfer_evolve, ComputePath};

fn main() -> reciprocation::error::Result<()> {
    let p = SystemParams::paper_regime();
    let alpha = C64::new(2.0, 0.0);
    let space = FockSpace::for_amplitude(2.0);
    let initial = initial_transfer_state(alpha, space)?;
    println!("initial atom entropy: {:.6} bits", initial.atom1_entropy()?);

    for l0t in [0.25, 0.5, 1.0, std::f64::consts::FRAC_PI_2] {
        let state = transfer_evolve(&initial, p.time_from_lambda0_t(l0t), &p, ComputePath::ClosedForm)?;
        let m = measure_atoms(&state)?;
        println!("lambda0 t = {l0t:.4}");
        for o in &m.outcomes {
            println!("  {}: p = {:.5}  E = {:.5} bits", o.outcome, o.probability, o.entropy()?);
        }
    }
    Ok(())
}

//! Compare the closed form, the numeric effective Hamiltonian and the full
//! three-level Hamiltonian on the same transfer.

use reciprocation::hamiltonians::SystemParams;
use reciprocation::hilbert::FockSpace;
use reciprocation::numerics::C64;
use reciprocation::protocol::{composite_fidelity, excited_bound, initial_transfer_state, transfer_evolve, ComputePath};

fn main() -> reciprocation::error::Result<()> {
    let p = SystemParams::paper_regime();
    for (alpha, l0t) in [(0.5, 0.3), (1.0, 1.2), (2.0, 2.0), (3.0, 2.9)] {
        let space = FockSpace::for_amplitude(alpha);
        let initial = initial_transfer_state(C64::new(alpha, 0.0), space)?;
        let t = p.time_from_lambda0_t(l0t);
        let closed = transfer_evolve(&initial, t, &p, ComputePath::ClosedForm)?;
        let eff = transfer_evolve(&initial, t, &p, ComputePath::EffectiveNumeric)?;
        let full = transfer_evolve(&initial, t, &p, ComputePath::Full)?;
        println!(
            "alpha {alpha}, lambda0 t {l0t}: 1-F(closed, eff) = {:.2e}  1-F(eff, full) = {:.2e}  |e> = {:.2e} (bound {:.2e})",
            1.0 - composite_fidelity(&closed, &eff)?,
            1.0 - composite_fidelity(&eff, &full)?,
            full.max_atom_excited_population(),
            excited_bound(&p, C64::new(alpha, 0.0))
        );
    }
    Ok(())
}

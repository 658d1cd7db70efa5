//! The closed-form branch states for a single atom and cavity, their norm
//! defect and the comparison with exact evolution under the effective
//! Hamiltonian.

use reciprocation::closed_form::evolve_closed_form;
use reciprocation::hamiltonians::{effective_hamiltonian, SystemParams};
use reciprocation::hilbert::{coherent_state, FockSpace, Ground};
use reciprocation::numerics::{basis, evolve, fidelity, tensor, C64};

fn main() -> reciprocation::error::Result<()> {
    let alpha = C64::new(1.5, 0.0);
    let space = FockSpace::for_amplitude(1.5);
    for x in [0.0, 0.05, 0.1, 0.2] {
        let p = SystemParams::dispersive(100.0, x)?;
        let t = p.time_from_lambda0_t(1.3);
        let closed = evolve_closed_form(Ground::G1, alpha, t, &p, space)?;
        let start = tensor(&basis(2, Ground::G1.index()), &coherent_state(alpha, space)?);
        let exact = evolve(&effective_hamiltonian(&p, space), t, &start)?;
        println!(
            "delta/lambda0 = {x}: norm^2 = {:.8}  1-F vs exact = {:.3e}",
            closed.norm_sqr(),
            1.0 - fidelity(&closed.assemble(Ground::G1), &exact)?
        );
    }
    Ok(())
}

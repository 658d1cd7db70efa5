//! Give the stored g1g1 field state to two fresh atoms in g1 and recover
//! the singlet by projecting the cavities back onto coherent states.

use std::f64::consts::FRAC_PI_2;

use reciprocation::hamiltonians::SystemParams;
use reciprocation::hilbert::{FockSpace, Outcome};
use reciprocation::numerics::C64;
use reciprocation::protocol::{freely_rotated, prepare_c11, project_cavities, retrieve_c11_closed_form, retrieve_evolve, ComputePath};

fn main() -> reciprocation::error::Result<()> {
    let p = SystemParams::paper_regime();
    let alpha = C64::new(2.0, 0.0);
    let space = FockSpace::for_amplitude(2.0);
    let ti = p.time_from_lambda0_t(FRAC_PI_2);
    let stored = prepare_c11(alpha, ti, &p, space)?;

    for l0t in [0.4, 1.0, 2.3, 4.0] {
        let tr = p.time_from_lambda0_t(l0t);
        let target = freely_rotated(alpha, ti + tr, &p);
        let numeric = project_cavities(&retrieve_evolve(&stored, tr, &p, ComputePath::EffectiveNumeric)?, target, target)?;
        let closed = project_cavities(&retrieve_c11_closed_form(alpha, ti, tr, &p, space)?, target, target)?;
        println!(
            "lambda0 t_r = {l0t}: weight {:.3e}, singlet fidelity {:.12} (numeric) {:.12} (closed), |g1g1| {:.1e}",
            numeric.weight,
            numeric.singlet_fidelity()?,
            closed.singlet_fidelity()?,
            numeric.amplitude(Outcome::G1G1).norm()
        );
    }
    Ok(())
}

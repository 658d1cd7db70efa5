//! Schmidt structure of the field state left behind by the g2g1 outcome.

use std::f64::consts::PI;

use reciprocation::closed_form::c21_entanglement;
use reciprocation::hamiltonians::SystemParams;
use reciprocation::hilbert::FockSpace;
use reciprocation::numerics::C64;

fn main() -> reciprocation::error::Result<()> {
    let p = SystemParams::paper_regime();
    let space = FockSpace::for_amplitude(5.0);
    println!("{:>6} {:>8} {:>10} {:>10} {:>10}", "alpha", "l0t/pi", "mu+", "mu-", "E");
    for alpha in [0.5, 1.0, 2.0, 5.0] {
        for k in 0..=8 {
            let l0t = PI * k as f64 / 8.0;
            let a = c21_entanglement(C64::new(alpha, 0.0), p.time_from_lambda0_t(l0t), &p, space)?;
            println!("{alpha:>6} {:>8.3} {:>10.6} {:>10.6} {:>10.6}", l0t / PI, a.mu_plus, a.mu_minus, a.entropy);
        }
    }
    Ok(())
}

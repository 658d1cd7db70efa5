//! Check the effective Hamiltonian against a Schrieffer-Wolff rotation of
//! the full one, doubling the detuning at fixed coupling.

use reciprocation::hamiltonians::{degenerate_raman_hamiltonian, effective_hamiltonian, verify_dispersive_reduction, SystemParams};
use reciprocation::hilbert::FockSpace;

fn main() -> reciprocation::error::Result<()> {
    let space = FockSpace::new(30)?;
    let base = SystemParams::paper_regime();
    let mut last = None;
    for scale in [1.0, 2.0, 4.0, 8.0] {
        let p = SystemParams::new(0.0, 0.0, base.splitting, scale * base.detuning, base.g1, base.g1)?;
        let p = p.with_couplings(p.g1, p.matched_g2());
        let r = verify_dispersive_reduction(&p, space)?;
        let ratio = last.map(|l: f64| l / r.relative_residual);
        println!(
            "Delta/g1 = {:>5}: relative residual {:.4e}  leakage {:.4e}  ratio {}",
            p.detuning / p.g1,
            r.relative_residual,
            r.leakage,
            ratio.map_or("-".into(), |x| format!("{x:.3}"))
        );
        last = Some(r.relative_residual);
    }

    let raman = SystemParams::degenerate_raman(100.0)?;
    let same = effective_hamiltonian(&raman, space) == degenerate_raman_hamiltonian(raman.g1, raman.detuning, raman.omega, raman.e_g1, space);
    println!("degenerate Raman limit reproduced exactly: {same}");
    Ok(())
}

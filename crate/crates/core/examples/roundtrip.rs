//! Store, measure and retrieve with each computation path.

use reciprocation::hamiltonians::SystemParams;
use reciprocation::protocol::{roundtrip, ComputePath, RoundTripConfig};

fn main() -> reciprocation::error::Result<()> {
    for path in ComputePath::ALL {
        let mut cfg = RoundTripConfig::new(1.5, std::f64::consts::FRAC_PI_2, SystemParams::paper_regime());
        cfg.retrieve_lambda0_t = 0.8;
        cfg.path = path;
        let r = roundtrip(&cfg)?;
        println!(
            "{:>9}: E0 = {:.6}  E_stored = {:.6}  p = {:?}  p_e = {:.2e}  F = {:.9}",
            path.to_string(), r.e_initial, r.e_stored, r.outcome_probs.map(|x| (x * 1e4).round() / 1e4), r.excited_probability, r.retrieval_fidelity
        );
    }
    Ok(())
}

//! Truncated coherent and chi states, compared with their analytic overlaps.

use reciprocation::hilbert::{chi_overlap, chi_state, coherent_overlap, coherent_state, required_dim, FockSpace};
use reciprocation::numerics::{inner, C64};

fn main() -> reciprocation::error::Result<()> {
    for a in [0.5, 2.0, 5.0] {
        let space = FockSpace::for_amplitude(a);
        println!("|alpha| = {a}: dim {} (required {}), tail weight {:.2e}", space.dim(), required_dim(a), space.tail_weight(a));
    }

    let space = FockSpace::for_amplitude(3.0);
    let (a, b) = (C64::new(2.0, 0.5), C64::from_polar(2.0, 1.1));
    let coh = inner(&coherent_state(a, space)?, &coherent_state(b, space)?);
    let chi = inner(&chi_state(a, space)?, &chi_state(b, space)?);
    println!("<a|b>     truncated {coh:.12}  analytic {:.12}", coherent_overlap(a, b));
    println!("<chi|chi> truncated {chi:.12}  analytic {:.12}", chi_overlap(a, b));
    Ok(())
}

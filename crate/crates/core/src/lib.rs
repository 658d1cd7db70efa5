//! Transfer of two-atom entanglement into coherent cavity fields and back.
//!
//! Two Lambda-type atoms (ground levels `g1`, `g2`, excited `e`) start in
//! the singlet, each inside its own cavity holding a coherent field. A
//! dispersive interaction swaps which ground level goes with which field
//! phase; measuring the atoms leaves an entangled two-mode field, and a
//! second pair of atoms can read it back out.
//!
//! Three ways of computing the same evolution are provided and cross-checked
//! ([`protocol::ComputePath`]): the full three-level Hamiltonian, the
//! effective Hamiltonian after adiabatic elimination, and its closed-form
//! solution. Units are `hbar = 1`; times are usually given as `lambda0 t`
//! with `lambda0 = g1^2 / Delta`.
//!
//! ```
//! use reciprocation::hamiltonians::SystemParams;
//! use reciprocation::hilbert::{FockSpace, Outcome};
//! use reciprocation::numerics::C64;
//! use reciprocation::protocol::{initial_transfer_state, measure_atoms, transfer_evolve, ComputePath};
//!
//! let p = SystemParams::paper_regime();
//! let space = FockSpace::for_amplitude(2.0);
//! let start = initial_transfer_state(C64::new(2.0, 0.0), space).unwrap();
//! let t = p.time_from_lambda0_t(std::f64::consts::FRAC_PI_2);
//! let m = measure_atoms(&transfer_evolve(&start, t, &p, ComputePath::ClosedForm).unwrap()).unwrap();
//! assert!((m.get(Outcome::G1G1).entropy().unwrap() - 1.0).abs() < 1e-9);
//! ```

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod hamiltonians;
pub mod hilbert;
pub mod numerics;
pub mod protocol;
pub mod sweep;

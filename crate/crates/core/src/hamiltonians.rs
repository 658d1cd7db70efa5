//! Lambda-atom / single-mode Hamiltonians (hbar = 1).
//!
//! Operators act on `atom ⊗ field`, atom index slowest. The three-level
//! basis is `{g1, g2, e}`; the effective model lives on `{g1, g2}`. With
//! atom-major ordering the ground block of a three-level operator is its
//! leading `2F x 2F` corner, which is exactly the effective-model space.

use crate::error::{Error, Result};
use crate::hilbert::{atom_projector, ladder_ops, AtomBasis, FockSpace, Level};
use crate::numerics::{exp_anti_hermitian, hermitian_eig, CMatrix, Tensor, C64};

/// Physical constants of one atom-cavity pair.
///
/// `splitting` is the ground splitting `delta = E_g2 - E_g1` and `detuning`
/// is `Delta = E_e - E_g1 - omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    pub omega: f64,
    pub e_g1: f64,
    pub splitting: f64,
    pub detuning: f64,
    pub g1: f64,
    pub g2: f64,
}

/// Dispersive-regime diagnostics. Reported, never enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Validity {
    /// `Delta / g1 >= 20` and `Delta / g2 >= 20`.
    pub large_detuning: bool,
    /// `delta / Delta <= 0.05`.
    pub close_ground_states: bool,
    /// `delta / lambda0 <= 0.5`: the first-order closed form keeps
    /// corrections of relative size `delta / (4 lambda0 n)`.
    pub first_order_splitting: bool,
}

impl Validity {
    pub fn all(&self) -> bool {
        self.large_detuning && self.close_ground_states && self.first_order_splitting
    }
}

impl SystemParams {
    pub fn new(omega: f64, e_g1: f64, splitting: f64, detuning: f64, g1: f64, g2: f64) -> Result<Self> {
        let p = Self {
            omega,
            e_g1,
            splitting,
            detuning,
            g1,
            g2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters in units of `lambda0 = g1^2 / Delta = 1`, with
    /// `g2 = g1 / sqrt(1 + eps)`, `omega = 0` and `E_g1 = 0`.
    pub fn dispersive(detuning_over_g1: f64, splitting_over_lambda0: f64) -> Result<Self> {
        if !(detuning_over_g1 > 0.0) || !splitting_over_lambda0.is_finite() {
            return Err(Error::InvalidParams(format!(
                "Delta/g1 = {detuning_over_g1}, delta/lambda0 = {splitting_over_lambda0}"
            )));
        }
        let g1 = detuning_over_g1;
        let detuning = detuning_over_g1 * detuning_over_g1;
        let splitting = splitting_over_lambda0;
        let eps = splitting / detuning;
        Self::new(0.0, 0.0, splitting, detuning, g1, g1 / (1.0 + eps).sqrt())
    }

    /// `Delta/g1 = 100`, `delta/lambda0 = 0.1`.
    pub fn paper_regime() -> Self {
        Self::dispersive(100.0, 0.1).expect("preset is valid")
    }

    /// `delta = 0`, `g1 = g2`.
    pub fn degenerate_raman(detuning_over_g1: f64) -> Result<Self> {
        Self::dispersive(detuning_over_g1, 0.0)
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_e_g1(mut self, e_g1: f64) -> Self {
        self.e_g1 = e_g1;
        self
    }

    pub fn with_couplings(mut self, g1: f64, g2: f64) -> Self {
        self.g1 = g1;
        self.g2 = g2;
        self
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.omega, self.e_g1, self.splitting, self.detuning, self.g1, self.g2]
            .iter()
            .all(|x| x.is_finite());
        if !finite || !(self.detuning > 0.0) || self.g1 < 0.0 || self.g2 < 0.0 {
            return Err(Error::InvalidParams(format!("{self:?}")));
        }
        Ok(())
    }

    /// `eps = delta / Delta`.
    pub fn epsilon(&self) -> f64 {
        self.splitting / self.detuning
    }

    /// `gamma = g2 / g1`.
    pub fn gamma(&self) -> f64 {
        self.g2 / self.g1
    }

    /// `lambda0 = g1^2 / Delta`.
    pub fn lambda0(&self) -> f64 {
        self.g1 * self.g1 / self.detuning
    }

    /// Effective Raman coupling `lambda = -g1 g2 (2 + eps) / (2 Delta)`.
    pub fn lambda(&self) -> f64 {
        -(self.g1 * self.g2) * (2.0 + self.epsilon()) / (2.0 * self.detuning)
    }

    pub fn e_g2(&self) -> f64 {
        self.e_g1 + self.splitting
    }

    pub fn e_e(&self) -> f64 {
        self.e_g1 + self.detuning + self.omega
    }

    /// Converts a dimensionless `lambda0 t` into a time.
    pub fn time_from_lambda0_t(&self, lambda0_t: f64) -> f64 {
        lambda0_t / self.lambda0()
    }

    /// `g1 / sqrt(1 + eps)`, the coupling the closed-form evolution assumes.
    pub fn matched_g2(&self) -> f64 {
        self.g1 / (1.0 + self.epsilon()).sqrt()
    }

    pub fn validity(&self) -> Validity {
        let gmax = self.g1.max(self.g2);
        Validity {
            large_detuning: gmax == 0.0 || self.detuning / gmax >= 20.0,
            close_ground_states: self.epsilon().abs() <= 0.05,
            first_order_splitting: self.lambda0() > 0.0 && (self.splitting / self.lambda0()).abs() <= 0.5,
        }
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn sigma(basis: AtomBasis, j: Level, k: Level) -> CMatrix {
    atom_projector(basis, j, k).expect("levels belong to the basis")
}

/// Bare atomic/field energies `omega a^dag a + sum_j E_j sigma_jj` on the
/// given atomic basis.
pub fn free_hamiltonian(p: &SystemParams, basis: AtomBasis, space: FockSpace) -> CMatrix {
    let ops = ladder_ops(space);
    let id_atom = CMatrix::identity(basis.dim(), basis.dim());
    let id_field = CMatrix::identity(space.dim(), space.dim());
    let mut h = id_atom.tensor(&ops.number) * re(p.omega)
        + sigma(basis, Level::G1, Level::G1).tensor(&id_field) * re(p.e_g1)
        + sigma(basis, Level::G2, Level::G2).tensor(&id_field) * re(p.e_g2());
    if basis == AtomBasis::ThreeLevel {
        h += sigma(basis, Level::E, Level::E).tensor(&id_field) * re(p.e_e());
    }
    h
}

/// `H = H0 + H1` on `{g1, g2, e} ⊗ Fock`.
pub fn full_hamiltonian(p: &SystemParams, space: FockSpace) -> CMatrix {
    let b = AtomBasis::ThreeLevel;
    let ops = ladder_ops(space);
    let coupling = |g: f64, lower: Level| -> CMatrix {
        (sigma(b, Level::E, lower).tensor(&ops.a) + sigma(b, lower, Level::E).tensor(&ops.a_dag)) * re(g)
    };
    free_hamiltonian(p, b, space) + coupling(p.g1, Level::G1) + coupling(p.g2, Level::G2)
}

/// First-order-in-eps effective Hamiltonian on `{g1, g2} ⊗ Fock`.
pub fn effective_hamiltonian(p: &SystemParams, space: FockSpace) -> CMatrix {
    let b = AtomBasis::TwoLevel;
    let ops = ladder_ops(space);
    let id_field = CMatrix::identity(space.dim(), space.dim());
    let n = &ops.number;
    let stark1 = p.lambda0();
    let stark2 = p.g2 * p.g2 / p.detuning * (1.0 + p.epsilon());
    let h0 = CMatrix::identity(2, 2).tensor(n) * re(p.omega)
        + sigma(b, Level::G1, Level::G1).tensor(&(&id_field * re(p.e_g1) - n * re(stark1)))
        + sigma(b, Level::G2, Level::G2).tensor(&(&id_field * re(p.e_g1 + p.splitting) - n * re(stark2)));
    let flip = sigma(b, Level::G2, Level::G1) + sigma(b, Level::G1, Level::G2);
    let h1 = flip.tensor(n) * re(p.lambda());
    h0 + h1
}

/// Degenerate Raman Hamiltonian
/// `omega a^dag a + E_g1 - (g^2/Delta) a^dag a (1 + sigma_x)` on
/// `{g1, g2} ⊗ Fock`.
pub fn degenerate_raman_hamiltonian(g: f64, detuning: f64, omega: f64, e_g1: f64, space: FockSpace) -> CMatrix {
    let b = AtomBasis::TwoLevel;
    let ops = ladder_ops(space);
    let id_field = CMatrix::identity(space.dim(), space.dim());
    let n = &ops.number;
    let k = g * g / detuning;
    let diag = &id_field * re(e_g1) - n * re(k);
    let h0 = CMatrix::identity(2, 2).tensor(n) * re(omega)
        + sigma(b, Level::G1, Level::G1).tensor(&diag)
        + sigma(b, Level::G2, Level::G2).tensor(&diag);
    let flip = sigma(b, Level::G2, Level::G1) + sigma(b, Level::G1, Level::G2);
    h0 + flip.tensor(n) * re(-k)
}

/// Anti-Hermitian generator `S` of the dispersive transformation
/// `H' = e^S H e^{-S}`.
pub fn sw_generator(p: &SystemParams, space: FockSpace) -> Result<CMatrix> {
    if p.detuning == p.splitting {
        return Err(Error::SingularGenerator);
    }
    let b = AtomBasis::ThreeLevel;
    let ops = ladder_ops(space);
    let term = |coef: f64, lower: Level| -> CMatrix {
        (sigma(b, Level::E, lower).tensor(&ops.a) - sigma(b, lower, Level::E).tensor(&ops.a_dag)) * re(coef)
    };
    Ok(term(p.g1 / p.detuning, Level::G1) + term(p.g2 / (p.detuning - p.splitting), Level::G2))
}

/// Residuals of the dispersive reduction (Frobenius norms).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionReport {
    /// `||P H' P - H_e||`.
    pub ground_residual: f64,
    /// `||H_e - H_free||`, the size of the Stark and Raman terms.
    pub interaction_scale: f64,
    /// `ground_residual / interaction_scale` (0 when both vanish).
    pub relative_residual: f64,
    /// `||Q H' P||`, coupling left between the ground block and `|e>`.
    pub leakage: f64,
    /// `||H_e^1||`, the Raman part of the effective Hamiltonian.
    pub raman_scale: f64,
}

/// Conjugates the full Hamiltonian with `e^S` and compares its ground block
/// against the effective Hamiltonian.
pub fn verify_dispersive_reduction(p: &SystemParams, space: FockSpace) -> Result<ReductionReport> {
    let h = full_hamiltonian(p, space);
    let s = sw_generator(p, space)?;
    let u = exp_anti_hermitian(&s)?;
    let h_prime = &u * h * u.adjoint();
    let f = space.dim();
    let ground = h_prime.view((0, 0), (2 * f, 2 * f));
    let off = h_prime.view((2 * f, 0), (f, 2 * f));
    let h_e = effective_hamiltonian(p, space);
    let h_free = free_hamiltonian(p, AtomBasis::TwoLevel, space);
    let ground_residual = (ground - &h_e).norm();
    let interaction_scale = (&h_e - h_free).norm();
    let relative_residual = if ground_residual == 0.0 {
        0.0
    } else {
        ground_residual / interaction_scale
    };
    let ops = ladder_ops(space);
    let flip = sigma(AtomBasis::TwoLevel, Level::G2, Level::G1) + sigma(AtomBasis::TwoLevel, Level::G1, Level::G2);
    let raman_scale = flip.tensor(&ops.number).norm() * p.lambda().abs();
    Ok(ReductionReport {
        ground_residual,
        interaction_scale,
        relative_residual,
        leakage: off.norm(),
        raman_scale,
    })
}

/// Closed forms for the `n`-photon block of `H_e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedEigen {
    pub energy_plus: f64,
    pub energy_minus: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Exact diagonalization of the `n`-photon block. The `plus` branch is the
/// upper eigenvalue. Vectors are `(g1, g2)` amplitudes with the sign fixed so
/// that `phi_plus[1] >= 0` and `phi_minus[0] >= 0`, matching
/// `phi_+ = -c1 g1 + c2 g2`, `phi_- = c2 g1 + c1 g2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactEigen {
    pub energy_plus: f64,
    pub energy_minus: f64,
    pub phi_plus: [f64; 2],
    pub phi_minus: [f64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveEigensystem {
    pub n: usize,
    /// Absent for `n = 0`, where the coefficient formulas divide by `n`.
    pub closed: Option<ClosedEigen>,
    pub exact: ExactEigen,
}

pub fn effective_eigensystem(p: &SystemParams, n: usize) -> Result<EffectiveEigensystem> {
    let nf = n as f64;
    let eps = p.epsilon();
    let gamma = p.gamma();
    let g2s = gamma * gamma;
    let base = p.omega * nf + p.e_g1;

    let block = CMatrix::from_row_slice(
        2,
        2,
        &[
            re(base - p.lambda0() * nf),
            re(p.lambda() * nf),
            re(p.lambda() * nf),
            re(base + p.splitting - p.g2 * p.g2 / p.detuning * (1.0 + eps) * nf),
        ],
    );
    let eig = hermitian_eig(&block)?;
    let column = |k: usize| [eig.vectors[(0, k)].re, eig.vectors[(1, k)].re];
    let mut phi_plus = column(1);
    let mut phi_minus = column(0);
    if phi_plus[1] < 0.0 {
        phi_plus = [-phi_plus[0], -phi_plus[1]];
    }
    if phi_minus[0] < 0.0 {
        phi_minus = [-phi_minus[0], -phi_minus[1]];
    }
    let exact = ExactEigen {
        energy_plus: eig.values[1],
        energy_minus: eig.values[0],
        phi_plus,
        phi_minus,
    };

    let closed = (n > 0).then(|| {
        let scale = gamma / (1.0 + g2s).sqrt();
        let detuned = p.splitting * p.detuning / (p.g1 * p.g1 * nf * (1.0 + g2s).powi(2));
        ClosedEigen {
            energy_plus: base + p.splitting / (1.0 + g2s),
            energy_minus: base - p.g1 * p.g1 * nf / p.detuning * (1.0 + g2s * (1.0 + eps))
                + p.splitting * g2s / (1.0 + g2s),
            c1: scale * (1.0 + eps / (2.0 * (1.0 + g2s)) - detuned),
            c2: scale * (1.0 / gamma - gamma * eps / (2.0 * (1.0 + g2s)) + gamma * detuned),
        }
    });

    Ok(EffectiveEigensystem { n, closed, exact })
}

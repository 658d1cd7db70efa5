//! Atom-to-field transfer with atomic measurement, field-to-atom retrieval
//! with coherent projection, and the round trip chaining both.
//!
//! Composite states are ordered `(atom 1, atom 2, cavity a, cavity b)`.
//! Atom 1 interacts only with cavity a and atom 2 only with cavity b, so
//! evolution is `U (x) U` applied pairwise.

use std::fmt;
use std::str::FromStr;

use crate::closed_form::{aux_states, special_states, ClosedFormMap};
use crate::error::{Error, Result};
use crate::hamiltonians::{effective_hamiltonian, full_hamiltonian, SystemParams};
use crate::hilbert::{coherent_state, FockSpace, Ground, Level, Outcome};
use crate::numerics::{
    apply_local, bipartite_entropy, fidelity, norm_sqr, tensor, CMatrix, CVector, DensityOperator, Propagator, C64, I, ONE,
};

/// Born probabilities below this are reported as zero outcomes.
pub const ZERO_OUTCOME: f64 = 1e-14;

/// Smallest accepted coherent-projection weight.
pub const PROJECTION_FLOOR: f64 = 1e-14;

/// Smallest accepted norm of a prepared cavity state.
pub const STATE_NORM_FLOOR: f64 = 1e-12;

const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComputePath {
    /// Three-level atoms under the full Hamiltonian.
    Full,
    /// Numeric propagation under the effective Hamiltonian.
    EffectiveNumeric,
    /// Analytic first-order evolution.
    ClosedForm,
}

impl ComputePath {
    pub const ALL: [ComputePath; 3] = [ComputePath::Full, ComputePath::EffectiveNumeric, ComputePath::ClosedForm];

    pub fn atom_dim(self) -> usize {
        match self {
            ComputePath::Full => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for ComputePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComputePath::Full => "full",
            ComputePath::EffectiveNumeric => "effective",
            ComputePath::ClosedForm => "closed",
        })
    }
}

impl FromStr for ComputePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(ComputePath::Full),
            "effective" | "effective_numeric" | "effective-numeric" => Ok(ComputePath::EffectiveNumeric),
            "closed" | "closed_form" | "closed-form" => Ok(ComputePath::ClosedForm),
            other => Err(Error::Parse(format!("unknown path `{other}` (expected full, effective or closed)"))),
        }
    }
}

/// State of two atoms and two cavities.
#[derive(Clone, Debug)]
pub struct CompositeState {
    vector: CVector,
    dims: [usize; 4],
}

impl CompositeState {
    pub fn new(vector: CVector, dims: [usize; 4]) -> Result<Self> {
        let size: usize = dims.iter().product();
        if size != vector.len() {
            return Err(Error::InconsistentDims { dims: dims.to_vec(), size: vector.len() });
        }
        if dims[0] != dims[1] || !(2..=3).contains(&dims[0]) || dims[2] != dims[3] {
            return Err(Error::InvalidParams(format!("unsupported composite dims {dims:?}")));
        }
        Ok(Self { vector, dims })
    }

    /// `|a, b>` for the given atomic vector (on atom 1 (x) atom 2).
    pub fn from_parts(atoms: &CVector, cav_a: &CVector, cav_b: &CVector) -> Result<Self> {
        let d = (atoms.len() as f64).sqrt().round() as usize;
        if d * d != atoms.len() {
            return Err(Error::InconsistentDims { dims: vec![d, d], size: atoms.len() });
        }
        let f = cav_a.len();
        if cav_b.len() != f {
            return Err(Error::DimensionMismatch { expected: f, found: cav_b.len() });
        }
        Self::new(tensor(atoms, &tensor(cav_a, cav_b)), [d, d, f, f])
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn atom_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn fock_dim(&self) -> usize {
        self.dims[2]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.vector)
    }

    fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0) {
            return Err(Error::ZeroVector);
        }
        self.vector /= C64::new(n, 0.0);
        Ok(self)
    }

    /// Injects two-level atoms into the three-level space with zero `|e>`.
    pub fn to_three_level(&self) -> Self {
        if self.atom_dim() == 3 {
            return self.clone();
        }
        let cav = self.fock_dim() * self.fock_dim();
        let mut out = CVector::zeros(9 * cav);
        for i in 0..2 {
            for j in 0..2 {
                let src = (i * 2 + j) * cav;
                let dst = (i * 3 + j) * cav;
                out.rows_mut(dst, cav).copy_from(&self.vector.rows(src, cav));
            }
        }
        Self { vector: out, dims: [3, 3, self.fock_dim(), self.fock_dim()] }
    }

    /// Components with both atoms in their ground manifold, two-level form.
    pub fn ground_part(&self) -> Self {
        if self.atom_dim() == 2 {
            return self.clone();
        }
        let cav = self.fock_dim() * self.fock_dim();
        let mut out = CVector::zeros(4 * cav);
        for i in 0..2 {
            for j in 0..2 {
                let src = (i * 3 + j) * cav;
                let dst = (i * 2 + j) * cav;
                out.rows_mut(dst, cav).copy_from(&self.vector.rows(src, cav));
            }
        }
        Self { vector: out, dims: [2, 2, self.fock_dim(), self.fock_dim()] }
    }

    /// Probability that at least one atom is in `|e>`.
    pub fn excited_population(&self) -> f64 {
        if self.atom_dim() == 2 {
            return 0.0;
        }
        (self.norm_sqr() - self.ground_part().norm_sqr()).max(0.0)
    }

    /// `|e>` population of one atom (0 or 1).
    pub fn atom_excited_population(&self, atom: usize) -> f64 {
        let d = self.atom_dim();
        if d == 2 {
            return 0.0;
        }
        let cav = self.fock_dim() * self.fock_dim();
        (0..d * d)
            .filter(|k| if atom == 0 { k / d == 2 } else { k % d == 2 })
            .map(|k| self.vector.rows(k * cav, cav).norm_squared())
            .sum()
    }

    /// Larger of the two single-atom `|e>` populations.
    pub fn max_atom_excited_population(&self) -> f64 {
        self.atom_excited_population(0).max(self.atom_excited_population(1))
    }

    /// Unnormalized field state of both cavities for one atomic label pair.
    pub fn cavity_component(&self, outcome: Outcome) -> CVector {
        let cav = self.fock_dim() * self.fock_dim();
        let d = self.atom_dim();
        let k = outcome.0.index() * d + outcome.1.index();
        self.vector.rows(k * cav, cav).into_owned()
    }

    pub fn atom_density(&self) -> Result<DensityOperator> {
        DensityOperator::reduced_from_pure(&self.vector, &self.dims, &[0, 1])
    }

    pub fn cavity_density(&self) -> Result<DensityOperator> {
        DensityOperator::reduced_from_pure(&self.vector, &self.dims, &[2, 3])
    }

    /// Entropy in bits of the two atoms against the two cavities.
    pub fn atoms_vs_cavities_entropy(&self) -> Result<f64> {
        let d = self.atom_dim();
        bipartite_entropy(&self.vector, d * d, self.fock_dim() * self.fock_dim())
    }

    /// Entropy in bits of atom 1 against everything else.
    pub fn atom1_entropy(&self) -> Result<f64> {
        let rest = self.vector.len() / self.atom_dim();
        bipartite_entropy(&self.vector, self.atom_dim(), rest)
    }
}

/// Phase-insensitive fidelity of two composite states computed on possibly
/// different paths. Two-level states are embedded in three levels.
pub fn composite_fidelity(a: &CompositeState, b: &CompositeState) -> Result<f64> {
    if a.atom_dim() == b.atom_dim() {
        return fidelity(&a.vector, &b.vector);
    }
    fidelity(&a.to_three_level().vector, &b.to_three_level().vector)
}

/// `(|g1 g2> - |g2 g1>)/sqrt(2)` on two atoms of dimension `atom_dim`.
pub fn singlet(atom_dim: usize) -> CVector {
    let mut v = CVector::zeros(atom_dim * atom_dim);
    let (g1, g2) = (Level::G1.index(), Level::G2.index());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    v[g1 * atom_dim + g2] = C64::new(s, 0.0);
    v[g2 * atom_dim + g1] = C64::new(-s, 0.0);
    v
}

fn ground_pair(a: Ground, b: Ground) -> CVector {
    let mut v = CVector::zeros(4);
    v[a.index() * 2 + b.index()] = ONE;
    v
}

/// `|alpha>_a |alpha>_b` with the atoms in the singlet.
pub fn initial_transfer_state(alpha: C64, space: FockSpace) -> Result<CompositeState> {
    let coh = coherent_state(alpha, space)?;
    CompositeState::from_parts(&singlet(2), &coh, &coh)
}

/// `|e>` population bound `4 (g1/Delta)^2 (nbar + 1)` for coherent input.
pub fn excited_bound(p: &SystemParams, alpha: C64) -> f64 {
    4.0 * (p.g1 / p.detuning).powi(2) * (alpha.norm_sqr() + 1.0)
}

/// Single-pair propagator on `atom (x) field`.
fn pair_operator(t: f64, p: &SystemParams, path: ComputePath, space: FockSpace) -> Result<CMatrix> {
    match path {
        ComputePath::Full => Ok(Propagator::new(&full_hamiltonian(p, space))?.unitary(t)),
        ComputePath::EffectiveNumeric => Ok(Propagator::new(&effective_hamiltonian(p, space))?.unitary(t)),
        ComputePath::ClosedForm => Ok(ClosedFormMap::new(t, p, space)?.matrix()),
    }
}

/// Evolves each atom with its own cavity for time `t`.
///
/// The full path lifts two-level input to three levels. Closed-form
/// output is renormalized.
pub fn transfer_evolve(state: &CompositeState, t: f64, p: &SystemParams, path: ComputePath) -> Result<CompositeState> {
    let state = match path {
        ComputePath::Full => state.to_three_level(),
        _ if state.atom_dim() == 3 => {
            if state.excited_population() > NORM_TOL {
                return Err(Error::InvalidParams(format!("{path} path needs ground-state atoms")));
            }
            state.ground_part()
        }
        _ => state.clone(),
    };
    if t == 0.0 {
        return Ok(state);
    }
    let space = FockSpace::new(state.fock_dim())?;
    let u = pair_operator(t, p, path, space)?;
    let dims = state.dims;
    let v = apply_local(&u, &[0, 2], &state.vector, &dims)?;
    let v = apply_local(&u, &[1, 3], &v, &dims)?;
    let out = CompositeState { vector: v, dims };
    match path {
        ComputePath::ClosedForm => out.normalized(),
        _ => Ok(out),
    }
}

/// One atomic measurement result.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub outcome: Outcome,
    pub probability: f64,
    /// Normalized state of cavities a (x) b; `None` for a zero outcome.
    pub cavity_state: Option<CVector>,
}

impl MeasurementOutcome {
    pub fn is_zero(&self) -> bool {
        self.cavity_state.is_none()
    }

    /// Entanglement between the two cavities; zero outcomes give 0.
    pub fn entropy(&self) -> Result<f64> {
        match &self.cavity_state {
            Some(v) => {
                let f = (v.len() as f64).sqrt().round() as usize;
                bipartite_entropy(v, f, f)
            }
            None => Ok(0.0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Measurement {
    /// In the order of [`Outcome::ALL`].
    pub outcomes: Vec<MeasurementOutcome>,
    /// Weight left in `|e>`; zero except on the full path.
    pub excited_probability: f64,
}

impl Measurement {
    pub fn get(&self, outcome: Outcome) -> &MeasurementOutcome {
        self.outcomes.iter().find(|o| o.outcome == outcome).expect("all outcomes present")
    }

    pub fn probabilities(&self) -> [f64; 4] {
        let mut p = [0.0; 4];
        for (slot, o) in p.iter_mut().zip(&self.outcomes) {
            *slot = o.probability;
        }
        p
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum::<f64>() + self.excited_probability
    }
}

/// Projects the atoms onto the four ground label pairs.
pub fn measure_atoms(state: &CompositeState) -> Result<Measurement> {
    let total = state.norm_sqr();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(total));
    }
    let outcomes = Outcome::ALL
        .into_iter()
        .map(|outcome| {
            let v = state.cavity_component(outcome);
            let probability = norm_sqr(&v);
            let cavity_state = (probability >= ZERO_OUTCOME).then(|| &v / C64::new(probability.sqrt(), 0.0));
            MeasurementOutcome { outcome, probability, cavity_state }
        })
        .collect();
    Ok(Measurement { outcomes, excited_probability: state.excited_population() })
}

/// Normalized `|xi+>|alpha-> - |alpha->|xi+>` at storage time `t_i`.
pub fn prepare_c11(alpha: C64, t_i: f64, p: &SystemParams, space: FockSpace) -> Result<CVector> {
    let s = special_states(alpha, t_i, p, space)?;
    let v = tensor(&s.xi_plus, &s.alpha_minus) - tensor(&s.alpha_minus, &s.xi_plus);
    let n = norm_sqr(&v).sqrt();
    if !(n > STATE_NORM_FLOOR) {
        return Err(Error::DegenerateState(format!("C_11 has norm {n:e} at this storage time")));
    }
    Ok(v / C64::new(n, 0.0))
}

/// Attaches fresh atoms in `|g1 g1>` and evolves each with its cavity.
pub fn retrieve_evolve(cavities: &CVector, t: f64, p: &SystemParams, path: ComputePath) -> Result<CompositeState> {
    let n = norm_sqr(cavities);
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    let f = (cavities.len() as f64).sqrt().round() as usize;
    if f * f != cavities.len() {
        return Err(Error::InconsistentDims { dims: vec![f, f], size: cavities.len() });
    }
    let start = CompositeState::new(tensor(&ground_pair(Ground::G1, Ground::G1), cavities), [2, 2, f, f])?;
    transfer_evolve(&start, t, p, path)
}

/// Closed-form retrieval from `C_11` built from the auxiliary states.
pub fn retrieve_c11_closed_form(alpha: C64, t_i: f64, t: f64, p: &SystemParams, space: FockSpace) -> Result<CompositeState> {
    prepare_c11(alpha, t_i, p, space)?;
    let aux = aux_states(alpha, t_i, t, p, space)?;
    let half = C64::new(0.5, 0.0);
    let (a1, a2) = (&aux.aux1 * half, &aux.aux2 * half);
    let (same, flip) = (&aux.difference.same_branch, &aux.difference.flip_branch);
    let anti = |x: &CVector, y: &CVector, u: &CVector, w: &CVector| tensor(x, y) - tensor(u, w);
    let blocks = [
        anti(&a1, same, same, &a1),
        anti(&a1, flip, same, &a2),
        anti(&a2, same, flip, &a1),
        anti(&a2, flip, flip, &a2),
    ];
    let cav = blocks[0].len();
    let mut v = CVector::zeros(4 * cav);
    for (k, b) in blocks.iter().enumerate() {
        v.rows_mut(k * cav, cav).copy_from(b);
    }
    CompositeState::new(v, [2, 2, space.dim(), space.dim()])?.normalized()
}

/// Result of contracting both cavities with coherent bras.
#[derive(Clone, Debug)]
pub struct Projection {
    pub weight: f64,
    /// Normalized two-atom state.
    pub atomic_state: CVector,
}

impl Projection {
    pub fn singlet_fidelity(&self) -> Result<f64> {
        let d = (self.atomic_state.len() as f64).sqrt().round() as usize;
        fidelity(&self.atomic_state, &singlet(d))
    }

    /// `|<label pair|state>|` for a two-atom ground label.
    pub fn amplitude(&self, outcome: Outcome) -> C64 {
        let d = (self.atomic_state.len() as f64).sqrt().round() as usize;
        self.atomic_state[outcome.0.index() * d + outcome.1.index()]
    }
}

/// Contracts cavities a and b with `<alpha_a| (x) <alpha_b|`.
pub fn project_cavities(state: &CompositeState, alpha_a: C64, alpha_b: C64) -> Result<Projection> {
    let space = FockSpace::new(state.fock_dim())?;
    let bra = tensor(&coherent_state(alpha_a, space)?, &coherent_state(alpha_b, space)?).map(|z| z.conj());
    let cav = bra.len();
    let d = state.atom_dim();
    let atoms = CVector::from_fn(d * d, |k, _| {
        state.vector.rows(k * cav, cav).iter().zip(bra.iter()).map(|(x, b)| x * b).sum::<C64>()
    });
    let weight = norm_sqr(&atoms);
    if !(weight >= PROJECTION_FLOOR) {
        return Err(Error::ProjectionAnnihilated(weight));
    }
    Ok(Projection { weight, atomic_state: atoms / C64::new(weight.sqrt(), 0.0) })
}

/// Free rotation `alpha e^{-i w t}` of a coherent amplitude.
pub fn freely_rotated(alpha: C64, t: f64, p: &SystemParams) -> C64 {
    alpha * (-I * p.omega * t).exp()
}

/// Parameters of one storage-and-retrieval run.
#[derive(Clone, Debug)]
pub struct RoundTripConfig {
    pub alpha: C64,
    pub params: SystemParams,
    /// `lambda0 t` of the transfer stage.
    pub lambda0_t: f64,
    /// `lambda0 t` of the retrieval stage.
    pub retrieve_lambda0_t: f64,
    pub outcome: Outcome,
    pub path: ComputePath,
    pub fock_dim: Option<usize>,
}

impl RoundTripConfig {
    pub fn new(alpha: f64, lambda0_t: f64, params: SystemParams) -> Self {
        Self {
            alpha: C64::new(alpha, 0.0),
            params,
            lambda0_t,
            retrieve_lambda0_t: lambda0_t,
            outcome: Outcome::G1G1,
            path: ComputePath::ClosedForm,
            fock_dim: None,
        }
    }

    pub fn space(&self) -> Result<FockSpace> {
        match self.fock_dim {
            Some(d) => {
                let s = FockSpace::new(d)?;
                s.check_adequate(self.alpha)?;
                Ok(s)
            }
            None => Ok(FockSpace::for_amplitude(self.alpha.norm())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundTripReport {
    /// Entanglement of the atoms with everything else before transfer.
    pub e_initial: f64,
    /// Entanglement between the cavities after the selected outcome.
    pub e_stored: f64,
    /// Born probabilities in the order of [`Outcome::ALL`].
    pub outcome_probs: [f64; 4],
    pub excited_probability: f64,
    pub projection_weight: f64,
    pub retrieval_fidelity: f64,
    /// Why the chain stopped early, if it did.
    pub degenerate: Option<String>,
}

/// Transfer, measurement, retrieval and coherent projection.
pub fn roundtrip(cfg: &RoundTripConfig) -> Result<RoundTripReport> {
    let p = &cfg.params;
    let space = cfg.space()?;
    let t_i = p.time_from_lambda0_t(cfg.lambda0_t);
    let t_r = p.time_from_lambda0_t(cfg.retrieve_lambda0_t);

    let initial = initial_transfer_state(cfg.alpha, space)?;
    let e_initial = initial.atom1_entropy()?;
    let stored = transfer_evolve(&initial, t_i, p, cfg.path)?;
    let measurement = measure_atoms(&stored)?;
    let selected = measurement.get(cfg.outcome);
    let mut report = RoundTripReport {
        e_initial,
        e_stored: selected.entropy()?,
        outcome_probs: measurement.probabilities(),
        excited_probability: measurement.excited_probability,
        projection_weight: 0.0,
        retrieval_fidelity: 0.0,
        degenerate: None,
    };
    let Some(cavities) = &selected.cavity_state else {
        report.degenerate = Some(format!("outcome {} has probability {:e}", cfg.outcome, selected.probability));
        return Ok(report);
    };

    let retrieved = match (cfg.path, cfg.outcome) {
        (ComputePath::ClosedForm, Outcome::G1G1) => retrieve_c11_closed_form(cfg.alpha, t_i, t_r, p, space)?,
        _ => retrieve_evolve(cavities, t_r, p, cfg.path)?,
    };
    let target = freely_rotated(cfg.alpha, t_i + t_r, p);
    match project_cavities(&retrieved, target, target) {
        Ok(proj) => {
            report.projection_weight = proj.weight;
            report.retrieval_fidelity = proj.singlet_fidelity()?;
        }
        Err(Error::ProjectionAnnihilated(w)) => {
            report.degenerate = Some(format!("coherent projection weight {w:e}"));
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Entropy of the cavity state for `outcome` after a transfer of duration
/// `lambda0 t`, normalized regardless of the Born weight.
pub fn stored_entropy(alpha: C64, lambda0_t: f64, p: &SystemParams, outcome: Outcome, path: ComputePath, space: FockSpace) -> Result<(f64, f64)> {
    let t = p.time_from_lambda0_t(lambda0_t);
    let state = transfer_evolve(&initial_transfer_state(alpha, space)?, t, p, path)?;
    let m = measure_atoms(&state)?;
    let o = m.get(outcome);
    Ok((o.entropy()?, o.probability))
}

/// Helper for tests and examples: `|label1 label2>` (x) cavities.
pub fn labelled_state(outcome: Outcome, cav_a: &CVector, cav_b: &CVector) -> Result<CompositeState> {
    CompositeState::from_parts(&ground_pair(outcome.0, outcome.1), cav_a, cav_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{c21_entanglement, conditional_state};
    use crate::hamiltonians::effective_hamiltonian;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn regime() -> SystemParams {
        SystemParams::paper_regime()
    }

    fn transferred(alpha: f64, l0t: f64, p: &SystemParams, path: ComputePath) -> CompositeState {
        let space = FockSpace::for_amplitude(alpha);
        let s = initial_transfer_state(c(alpha), space).unwrap();
        transfer_evolve(&s, p.time_from_lambda0_t(l0t), p, path).unwrap()
    }

    #[test]
    fn path_names_round_trip() {
        for path in ComputePath::ALL {
            assert_eq!(path.to_string().parse::<ComputePath>().unwrap(), path);
        }
        assert_eq!("effective_numeric".parse::<ComputePath>().unwrap(), ComputePath::EffectiveNumeric);
        assert!("exact".parse::<ComputePath>().is_err());
    }

    #[test]
    fn initial_state_marginals() {
        let s = initial_transfer_state(c(1.5), FockSpace::for_amplitude(1.5)).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        let rho = s.atom_density().unwrap();
        let m = rho.matrix();
        for (k, expected) in [0.0, 0.5, 0.5, 0.0].into_iter().enumerate() {
            assert!((m[(k, k)].re - expected).abs() < 1e-12);
        }
        assert!(rho.von_neumann_entropy().unwrap().abs() < 1e-10);
        let atom1 = rho.partial_trace(&[0]).unwrap().von_neumann_entropy().unwrap();
        assert!((atom1 - 1.0).abs() < 1e-10);
        assert!((s.atom1_entropy().unwrap() - 1.0).abs() < 1e-12);
        assert!(s.cavity_density().unwrap().von_neumann_entropy().unwrap().abs() < 1e-10);
        assert!(s.atoms_vs_cavities_entropy().unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_time_is_identity() {
        let space = FockSpace::for_amplitude(1.0);
        let s = initial_transfer_state(c(1.0), space).unwrap();
        for path in [ComputePath::EffectiveNumeric, ComputePath::ClosedForm] {
            let out = transfer_evolve(&s, 0.0, &regime(), path).unwrap();
            assert_eq!(out.vector(), s.vector());
        }
        let m = measure_atoms(&s).unwrap();
        for (got, want) in m.probabilities().into_iter().zip([0.0, 0.5, 0.5, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(m.get(Outcome::G1G1).is_zero() && m.get(Outcome::G2G2).is_zero());
    }

    #[test]
    fn full_path_zero_time_embeds_atoms() {
        let space = FockSpace::new(10).unwrap();
        let s = initial_transfer_state(c(0.5), space).unwrap();
        let out = transfer_evolve(&s, 0.0, &regime(), ComputePath::Full).unwrap();
        assert_eq!(out.atom_dim(), 3);
        assert_eq!(out.ground_part().vector(), s.vector());
    }

    #[test]
    fn single_atom_excitation_stays_below_bound() {
        let p = regime();
        let space = FockSpace::for_amplitude(1.5);
        let s = initial_transfer_state(c(1.5), space).unwrap();
        for k in 1..=40 {
            let out = transfer_evolve(&s, p.time_from_lambda0_t(0.013 * k as f64), &p, ComputePath::Full).unwrap();
            let (e1, e2) = (out.atom_excited_population(0), out.atom_excited_population(1));
            assert!(e1.max(e2) <= excited_bound(&p, c(1.5)));
            assert!(out.excited_population() <= e1 + e2 + 1e-15);
        }
    }

    #[test]
    fn closed_path_tracks_effective_path() {
        let p = regime();
        let a = transferred(2.0, 1.1, &p, ComputePath::ClosedForm);
        let b = transferred(2.0, 1.1, &p, ComputePath::EffectiveNumeric);
        assert!(composite_fidelity(&a, &b).unwrap() >= 1.0 - 1e-4);
        assert!((b.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn effective_path_tracks_full_path() {
        let p = regime();
        let a = transferred(1.0, PI / 2.0, &p, ComputePath::EffectiveNumeric);
        let b = transferred(1.0, PI / 2.0, &p, ComputePath::Full);
        assert!((b.norm_sqr() - 1.0).abs() < 1e-9);
        assert!(composite_fidelity(&a, &b).unwrap() >= 0.99);
        assert!(b.excited_population() <= excited_bound(&p, c(1.0)));
        let m = measure_atoms(&b).unwrap();
        assert!((m.total_probability() - 1.0).abs() < 1e-9);
        assert!(m.excited_probability > 0.0);
    }

    #[test]
    fn full_path_agrees_with_direct_integration() {
        // Independent oracle: RK4 on the full pair Hamiltonian.
        let p = SystemParams::dispersive(10.0, 0.1).unwrap();
        let space = FockSpace::new(8).unwrap();
        let h = full_hamiltonian(&p, space);
        let t = p.time_from_lambda0_t(0.6);
        let mut psi = CVector::zeros(24);
        psi[1] = C64::new(0.6, 0.0);
        psi[8 + 2] = C64::new(0.0, 0.8);
        let steps = 20_000;
        let dt = t / steps as f64;
        let f = |v: &CVector| (&h * v) * (-I);
        let mut y = psi.clone();
        for _ in 0..steps {
            let k1 = f(&y);
            let k2 = f(&(&y + &k1 * C64::new(dt / 2.0, 0.0)));
            let k3 = f(&(&y + &k2 * C64::new(dt / 2.0, 0.0)));
            let k4 = f(&(&y + &k3 * C64::new(dt, 0.0)));
            y += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * C64::new(dt / 6.0, 0.0);
        }
        let u = pair_operator(t, &p, ComputePath::Full, space).unwrap();
        assert!((&u * &psi - y).camax() < 1e-8);
    }

    #[test]
    fn c11_and_c22_carry_one_ebit() {
        let p = regime();
        for path in [ComputePath::ClosedForm, ComputePath::EffectiveNumeric] {
            let m = measure_atoms(&transferred(2.0, 0.8, &p, path)).unwrap();
            for o in [Outcome::G1G1, Outcome::G2G2] {
                assert!((m.get(o).entropy().unwrap() - 1.0).abs() < 1e-6, "{path} {o}");
            }
        }
    }

    #[test]
    fn c21_outcome_matches_closed_form_entropy() {
        let p = regime();
        let m = measure_atoms(&transferred(3.0, PI / 2.0, &p, ComputePath::ClosedForm)).unwrap();
        let e = c21_entanglement(c(3.0), p.time_from_lambda0_t(PI / 2.0), &p, FockSpace::for_amplitude(3.0)).unwrap();
        assert!((m.get(Outcome::G2G1).entropy().unwrap() - e.entropy).abs() < 1e-6);
    }

    #[test]
    fn measured_states_are_the_conditional_states() {
        let p = regime();
        let space = FockSpace::for_amplitude(1.5);
        let t = p.time_from_lambda0_t(0.9);
        let m = measure_atoms(&transferred(1.5, 0.9, &p, ComputePath::ClosedForm)).unwrap();
        for o in Outcome::ALL {
            let expected = conditional_state(o, c(1.5), t, &p, space).unwrap();
            let got = m.get(o).cavity_state.clone().unwrap();
            assert!(fidelity(&expected, &got).unwrap() > 1.0 - 1e-12, "{o}");
        }
    }

    #[test]
    fn c11_preparation() {
        let p = regime();
        let space = FockSpace::for_amplitude(2.0);
        let v = prepare_c11(c(2.0), p.time_from_lambda0_t(PI / 2.0), &p, space).unwrap();
        let f = space.dim();
        assert!((bipartite_entropy(&v, f, f).unwrap() - 1.0).abs() < 1e-6);
        let swapped = crate::numerics::permute_subsystems(&v, &[f, f], &[1, 0]).unwrap();
        assert!((swapped + &v).camax() < 1e-14);
        let raman = SystemParams::degenerate_raman(100.0).unwrap();
        let err = prepare_c11(c(2.0), raman.time_from_lambda0_t(PI), &raman, space).unwrap_err();
        assert!(matches!(err, Error::DegenerateState(_)));
    }

    #[test]
    fn retrieval_at_zero_time_is_trivial() {
        let p = regime();
        let space = FockSpace::for_amplitude(1.0);
        let cav = prepare_c11(c(1.0), p.time_from_lambda0_t(1.0), &p, space).unwrap();
        let r = retrieve_evolve(&cav, 0.0, &p, ComputePath::EffectiveNumeric).unwrap();
        assert_eq!(r.cavity_component(Outcome::G1G1), cav);
        assert!((r.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aux_retrieval_tracks_numeric_retrieval() {
        let p = regime();
        let space = FockSpace::for_amplitude(2.0);
        let (ti, tr) = (p.time_from_lambda0_t(PI / 2.0), p.time_from_lambda0_t(0.9));
        let cav = prepare_c11(c(2.0), ti, &p, space).unwrap();
        let numeric = retrieve_evolve(&cav, tr, &p, ComputePath::EffectiveNumeric).unwrap();
        let aux = retrieve_c11_closed_form(c(2.0), ti, tr, &p, space).unwrap();
        let mapped = retrieve_evolve(&cav, tr, &p, ComputePath::ClosedForm).unwrap();
        assert!((numeric.norm_sqr() - 1.0).abs() < 1e-9);
        assert!(composite_fidelity(&aux, &numeric).unwrap() >= 1.0 - 1e-4);
        assert!(composite_fidelity(&mapped, &numeric).unwrap() >= 1.0 - 1e-4);
    }

    #[test]
    fn projection_of_product_state() {
        let space = FockSpace::for_amplitude(1.0);
        let coh = coherent_state(c(1.0), space).unwrap();
        let s = labelled_state(Outcome::G1G1, &coh, &coh).unwrap();
        let proj = project_cavities(&s, c(1.0), c(1.0)).unwrap();
        assert!((proj.weight - 1.0).abs() < 1e-12);
        assert!((proj.amplitude(Outcome::G1G1).norm() - 1.0).abs() < 1e-12);
        let far = project_cavities(&s, c(12.0), c(12.0));
        assert!(matches!(far, Err(Error::ProjectionAnnihilated(_))) || far.is_err());
    }

    #[test]
    fn retrieval_restores_singlet_at_any_time() {
        let p = regime();
        let space = FockSpace::for_amplitude(2.0);
        let ti = p.time_from_lambda0_t(PI / 2.0);
        let cav = prepare_c11(c(2.0), ti, &p, space).unwrap();
        for l0t in [0.4, 1.0, 2.3, 4.0, 5.5] {
            let tr = p.time_from_lambda0_t(l0t);
            let target = freely_rotated(c(2.0), ti + tr, &p);
            for state in [
                retrieve_evolve(&cav, tr, &p, ComputePath::EffectiveNumeric).unwrap(),
                retrieve_c11_closed_form(c(2.0), ti, tr, &p, space).unwrap(),
            ] {
                let proj = project_cavities(&state, target, target).unwrap();
                assert!((proj.singlet_fidelity().unwrap() - 1.0).abs() < 1e-6);
                assert!(proj.amplitude(Outcome::G1G1).norm() < 1e-6);
                assert!(proj.amplitude(Outcome::G2G2).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn roundtrip_examples() {
        let p = regime();
        let r = roundtrip(&RoundTripConfig::new(2.0, PI / 2.0, p)).unwrap();
        assert!((r.e_initial - 1.0).abs() < 1e-10);
        assert!((r.e_stored - 1.0).abs() < 1e-6);
        assert!((r.retrieval_fidelity - 1.0).abs() < 1e-6);
        assert!(r.degenerate.is_none() && r.projection_weight > 0.0);

        let mut cfg = RoundTripConfig::new(3.0, PI / 2.0, p);
        cfg.outcome = Outcome::G2G1;
        assert!(roundtrip(&cfg).unwrap().e_stored >= 0.98);

        let mut cfg = RoundTripConfig::new(2.0, PI / 2.0, p);
        cfg.outcome = Outcome::G2G2;
        cfg.path = ComputePath::EffectiveNumeric;
        assert!((roundtrip(&cfg).unwrap().e_stored - 1.0).abs() < 1e-6);

        let raman = SystemParams::degenerate_raman(100.0).unwrap();
        let r = roundtrip(&RoundTripConfig::new(2.0, PI, raman)).unwrap();
        assert_eq!(r.e_stored, 0.0);
        assert!(r.degenerate.is_some());
    }

    #[test]
    fn results_do_not_depend_on_frame() {
        let base = regime();
        let rotated = base.with_omega(10.0 * base.lambda0());
        for path in [ComputePath::ClosedForm, ComputePath::EffectiveNumeric] {
            let mut a = RoundTripConfig::new(1.5, 1.2, base);
            a.retrieve_lambda0_t = 0.7;
            a.path = path;
            let mut b = a.clone();
            b.params = rotated;
            let (ra, rb) = (roundtrip(&a).unwrap(), roundtrip(&b).unwrap());
            assert!((ra.e_stored - rb.e_stored).abs() < 1e-9);
            assert!((ra.retrieval_fidelity - rb.retrieval_fidelity).abs() < 1e-9);
            assert!((ra.projection_weight - rb.projection_weight).abs() < 1e-9);
            for (x, y) in ra.outcome_probs.iter().zip(rb.outcome_probs) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ground_energy_offset_is_a_global_phase() {
        let p = regime();
        let q = p.with_e_g1(3.7);
        let a = transferred(1.2, 0.9, &p, ComputePath::EffectiveNumeric);
        let b = transferred(1.2, 0.9, &q, ComputePath::EffectiveNumeric);
        assert!(composite_fidelity(&a, &b).unwrap() > 1.0 - 1e-12);
        let _ = effective_hamiltonian(&q, FockSpace::new(4).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn born_totality_and_one_ebit(amp in 0.3..3.0f64, l0t in 0.05..3.1f64) {
            let p = regime();
            for path in [ComputePath::ClosedForm, ComputePath::EffectiveNumeric] {
                let m = measure_atoms(&transferred(amp, l0t, &p, path)).unwrap();
                prop_assert!((m.total_probability() - 1.0).abs() < 1e-9);
                for o in [Outcome::G1G1, Outcome::G2G2] {
                    let out = m.get(o);
                    if out.probability > 1e-10 {
                        prop_assert!((out.entropy().unwrap() - 1.0).abs() < 1e-6);
                    }
                }
            }
        }
    }
}

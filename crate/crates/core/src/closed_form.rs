//! Analytic evolution of the effective model in the matched-coupling regime.
//!
//! With `g2 = g1 / sqrt(1 + eps)` the per-photon-number blocks of `H_e`
//! share a common Stark shift and the evolution of `|alpha, g1>` and
//! `|alpha, g2>` reduces, to first order in `delta / lambda0`, to
//! superpositions of the rotated coherent states `|alpha'>`, `|alpha''>`,
//! the vacuum and the auxiliary `|chi>` states.
//!
//! Phases are quoted relative to `e^{-i (E_g1 + delta/2) t}`, which is
//! dropped throughout.

use crate::error::{Error, Result};
use crate::hamiltonians::SystemParams;
use crate::hilbert::{chi_state, chi_overlap, coherent_chi_overlap, coherent_overlap, coherent_state, FockSpace, Ground, Outcome};
use crate::numerics::{entropy_bits, inner, norm_sqr, tensor, CMatrix, CVector, C64, I, ONE, ZERO};

/// Relative tolerance on `g2 = g1 / sqrt(1 + eps)`.
pub const MATCHED_COUPLING_TOL: f64 = 1e-6;

/// Smallest normalization accepted for `|C_21>`.
pub const C21_NORM_FLOOR: f64 = 1e-12;

/// Field branches of `e^{-i H_e t} |alpha, label>`.
#[derive(Clone, Debug)]
pub struct BranchPair {
    /// Field state attached to the unchanged atomic label.
    pub same_branch: CVector,
    /// Field state attached to the flipped label, `-1/2` already applied.
    pub flip_branch: CVector,
}

impl BranchPair {
    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.same_branch) + norm_sqr(&self.flip_branch)
    }

    /// Two-level atom-field vector (atom index slowest) for input `label`.
    pub fn assemble(&self, label: Ground) -> CVector {
        let f = self.same_branch.len();
        let mut out = CVector::zeros(2 * f);
        let (same, flip) = match label {
            Ground::G1 => (0, f),
            Ground::G2 => (f, 0),
        };
        out.rows_mut(same, f).copy_from(&self.same_branch);
        out.rows_mut(flip, f).copy_from(&self.flip_branch);
        out
    }
}

/// `(alpha', alpha'') = (e^{-i w t} alpha, e^{2 i lambda0 t} alpha')`.
pub fn rotated_amplitudes(alpha: C64, t: f64, p: &SystemParams) -> (C64, C64) {
    let prime = alpha * (-I * p.omega * t).exp();
    let dprime = prime * (I * 2.0 * p.lambda0() * t).exp();
    (prime, dprime)
}

/// `delta / (4 lambda0)`, the first-order weight of the `chi` states.
fn chi_weight(p: &SystemParams) -> Result<f64> {
    if p.splitting == 0.0 {
        return Ok(0.0);
    }
    let l0 = p.lambda0();
    if l0 == 0.0 {
        return Err(Error::InvalidParams("closed form needs g1 > 0 when delta != 0".into()));
    }
    Ok(p.splitting / (4.0 * l0))
}

/// Checks the matched-coupling condition the closed form relies on.
pub fn check_closed_form(p: &SystemParams) -> Result<()> {
    let expected = p.matched_g2();
    let scale = expected.abs().max(f64::MIN_POSITIVE);
    if p.g1 <= 0.0 || ((p.g2 - expected) / scale).abs() > MATCHED_COUPLING_TOL {
        return Err(Error::ClosedFormInvalid { g2: p.g2, expected });
    }
    Ok(())
}

/// Building block of the special states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Primitive {
    Coherent(C64),
    Chi(C64),
    Vacuum,
}

impl Primitive {
    pub fn overlap(&self, other: &Primitive) -> C64 {
        use Primitive::*;
        match (*self, *other) {
            (Coherent(a), Coherent(b)) => coherent_overlap(a, b),
            (Coherent(a), Chi(b)) => coherent_chi_overlap(a, b),
            (Chi(a), Coherent(b)) => coherent_chi_overlap(b, a).conj(),
            (Chi(a), Chi(b)) => chi_overlap(a, b),
            (Vacuum, Vacuum) => ONE,
            (Vacuum, Coherent(b)) => C64::new((-0.5 * b.norm_sqr()).exp(), 0.0),
            (Coherent(a), Vacuum) => C64::new((-0.5 * a.norm_sqr()).exp(), 0.0),
            (Vacuum, Chi(_)) | (Chi(_), Vacuum) => ZERO,
        }
    }

    pub fn to_vector(&self, space: FockSpace) -> Result<CVector> {
        match *self {
            Primitive::Coherent(a) => coherent_state(a, space),
            Primitive::Chi(a) => chi_state(a, space),
            Primitive::Vacuum => {
                let mut v = CVector::zeros(space.dim());
                v[0] = ONE;
                Ok(v)
            }
        }
    }
}

/// Finite linear combination of primitives, evaluated either analytically
/// (untruncated overlaps) or as a truncated vector.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FieldExpr {
    pub terms: Vec<(C64, Primitive)>,
}

impl FieldExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, coeff: C64, prim: Primitive) -> Self {
        if coeff != ZERO {
            self.terms.push((coeff, prim));
        }
        self
    }

    pub fn plus(mut self, other: &FieldExpr, scale: C64) -> Self {
        for &(c, p) in &other.terms {
            self = self.term(c * scale, p);
        }
        self
    }

    pub fn scaled(&self, scale: C64) -> Self {
        FieldExpr::new().plus(self, scale)
    }

    /// Analytic `<self|other>`.
    pub fn overlap(&self, other: &FieldExpr) -> C64 {
        let mut acc = ZERO;
        for (c, p) in &self.terms {
            for (d, q) in &other.terms {
                acc += c.conj() * d * p.overlap(q);
            }
        }
        acc
    }

    pub fn to_vector(&self, space: FockSpace) -> Result<CVector> {
        let mut out = CVector::zeros(space.dim());
        for (c, p) in &self.terms {
            out += p.to_vector(space)? * *c;
        }
        Ok(out)
    }
}

/// Symbolic special states at one `(alpha, t)`.
#[derive(Clone, Debug)]
pub struct SpecialExprs {
    pub alpha_minus: FieldExpr,
    pub alpha_plus: FieldExpr,
    pub chi_minus: FieldExpr,
    pub chi_plus: FieldExpr,
    pub xi_plus: FieldExpr,
    pub xi_minus: FieldExpr,
}

impl SpecialExprs {
    pub fn new(alpha: C64, t: f64, p: &SystemParams) -> Result<Self> {
        let k = chi_weight(p)?;
        let (a1, a2) = rotated_amplitudes(alpha, t, p);
        let pm = |s: f64, x: Primitive, y: Primitive| FieldExpr::new().term(ONE, x).term(C64::new(s, 0.0), y);
        let alpha_minus = pm(-1.0, Primitive::Coherent(a1), Primitive::Coherent(a2));
        let alpha_plus = pm(1.0, Primitive::Coherent(a1), Primitive::Coherent(a2));
        let chi_minus = pm(-1.0, Primitive::Chi(a1), Primitive::Chi(a2));
        let chi_plus = pm(1.0, Primitive::Chi(a1), Primitive::Chi(a2));
        let vac = (-0.5 * alpha.norm_sqr()).exp();
        let xi = |sign: f64| {
            let c0 = ((I * sign * p.splitting * t / 2.0).exp() - 1.0) * vac;
            FieldExpr::new()
                .plus(&alpha_plus, C64::new(0.5, 0.0))
                .term(c0, Primitive::Vacuum)
                .plus(&chi_minus, C64::new(-sign * k, 0.0))
        };
        Ok(Self {
            xi_plus: xi(1.0),
            xi_minus: xi(-1.0),
            alpha_minus,
            alpha_plus,
            chi_minus,
            chi_plus,
        })
    }

    pub fn to_vectors(&self, space: FockSpace) -> Result<SpecialStates> {
        Ok(SpecialStates {
            alpha_minus: self.alpha_minus.to_vector(space)?,
            alpha_plus: self.alpha_plus.to_vector(space)?,
            chi_minus: self.chi_minus.to_vector(space)?,
            chi_plus: self.chi_plus.to_vector(space)?,
            xi_plus: self.xi_plus.to_vector(space)?,
            xi_minus: self.xi_minus.to_vector(space)?,
        })
    }
}

/// Truncated, unnormalized special states.
#[derive(Clone, Debug)]
pub struct SpecialStates {
    pub alpha_minus: CVector,
    pub alpha_plus: CVector,
    pub chi_minus: CVector,
    pub chi_plus: CVector,
    pub xi_plus: CVector,
    pub xi_minus: CVector,
}

pub fn special_states(alpha: C64, t: f64, p: &SystemParams, space: FockSpace) -> Result<SpecialStates> {
    space.check_adequate(alpha)?;
    SpecialExprs::new(alpha, t, p)?.to_vectors(space)
}

/// `e^{-i H_e t}|alpha, label>` in closed form.
pub fn evolve_closed_form(label: Ground, alpha: C64, t: f64, p: &SystemParams, space: FockSpace) -> Result<BranchPair> {
    check_closed_form(p)?;
    let s = special_states(alpha, t, p, space)?;
    let same_branch = match label {
        Ground::G1 => s.xi_plus,
        Ground::G2 => s.xi_minus,
    };
    Ok(BranchPair { same_branch, flip_branch: s.alpha_minus * C64::new(-0.5, 0.0) })
}

/// The closed-form evolution extended linearly to arbitrary field states.
///
/// It is diagonal in photon number: `|g, n>` maps to
/// `same[g][n] |g, n> + flip[n] |g', n>`.
#[derive(Clone, Debug)]
pub struct ClosedFormMap {
    pub same_g1: Vec<C64>,
    pub same_g2: Vec<C64>,
    pub flip: Vec<C64>,
}

impl ClosedFormMap {
    pub fn new(t: f64, p: &SystemParams, space: FockSpace) -> Result<Self> {
        check_closed_form(p)?;
        let k = chi_weight(p)?;
        let f = space.dim();
        let (mut same_g1, mut same_g2, mut flip) = (Vec::with_capacity(f), Vec::with_capacity(f), Vec::with_capacity(f));
        let half = p.splitting * t / 2.0;
        same_g1.push((I * half).exp());
        same_g2.push((-I * half).exp());
        flip.push(ZERO);
        for n in 1..f {
            let nf = n as f64;
            let free = (-I * p.omega * nf * t).exp();
            let e = (I * 2.0 * p.lambda0() * nf * t).exp();
            let avg = (e + 1.0) * 0.5;
            let dif = (e - 1.0) * (k / nf);
            same_g1.push(free * (avg + dif));
            same_g2.push(free * (avg - dif));
            flip.push(free * (e - 1.0) * 0.5);
        }
        Ok(Self { same_g1, same_g2, flip })
    }

    pub fn fock_dim(&self) -> usize {
        self.flip.len()
    }

    /// Image of `|label> (x) field`.
    pub fn apply(&self, label: Ground, field: &CVector) -> Result<BranchPair> {
        if field.len() != self.fock_dim() {
            return Err(Error::DimensionMismatch { expected: self.fock_dim(), found: field.len() });
        }
        let same = match label {
            Ground::G1 => &self.same_g1,
            Ground::G2 => &self.same_g2,
        };
        Ok(BranchPair {
            same_branch: CVector::from_iterator(field.len(), field.iter().zip(same).map(|(x, m)| x * m)),
            flip_branch: CVector::from_iterator(field.len(), field.iter().zip(&self.flip).map(|(x, m)| x * m)),
        })
    }

    /// Dense `2F x 2F` matrix on the two-level atom-field space.
    pub fn matrix(&self) -> CMatrix {
        let f = self.fock_dim();
        let mut m = CMatrix::zeros(2 * f, 2 * f);
        for n in 0..f {
            m[(n, n)] = self.same_g1[n];
            m[(f + n, f + n)] = self.same_g2[n];
            m[(f + n, n)] = self.flip[n];
            m[(n, f + n)] = self.flip[n];
        }
        m
    }
}

/// Bipartite state `|x1>|y1> + |x2>|y2>` kept in factored form.
#[derive(Clone, Debug)]
pub struct TwoBranch {
    pub x1: CVector,
    pub y1: CVector,
    pub x2: CVector,
    pub y2: CVector,
}

impl TwoBranch {
    pub fn vector(&self) -> CVector {
        tensor(&self.x1, &self.y1) + tensor(&self.x2, &self.y2)
    }

    pub fn norm_sqr(&self) -> f64 {
        let gx = inner(&self.x1, &self.x2);
        let gy = inner(&self.y1, &self.y2);
        norm_sqr(&self.x1) * norm_sqr(&self.y1) + norm_sqr(&self.x2) * norm_sqr(&self.y2) + 2.0 * (gx * gy).re
    }

    /// Schmidt probabilities `(mu+, mu-)` from the two 2x2 Gram matrices.
    ///
    /// The nonzero reduced eigenvalues are those of `G_y^T G_x`, whose
    /// trace is the squared norm and whose determinant is
    /// `det G_x det G_y`.
    pub fn schmidt(&self) -> Result<(f64, f64)> {
        let tr = self.norm_sqr();
        if !(tr > 0.0) {
            return Err(Error::DegenerateState("two-branch state has zero norm".into()));
        }
        let det = |a: &CVector, b: &CVector| (norm_sqr(a) * norm_sqr(b) - inner(a, b).norm_sqr()).max(0.0);
        let q = (4.0 * det(&self.x1, &self.x2) * det(&self.y1, &self.y2) / (tr * tr)).clamp(0.0, 1.0);
        Ok(split_mu(q))
    }

    pub fn entropy(&self) -> Result<f64> {
        let (p, m) = self.schmidt()?;
        Ok(entropy_bits([p, m]))
    }
}

/// `mu = 1/2 +- 1/2 sqrt(1 - q)`, with the small root taken in a
/// cancellation-free form.
fn split_mu(q: f64) -> (f64, f64) {
    let r = (1.0 - q).max(0.0).sqrt();
    let minus = 0.5 * q / (1.0 + r);
    (1.0 - minus, minus)
}

/// Unnormalized conditional cavity state for a two-atom outcome, as two
/// product branches over (cavity a, cavity b).
pub fn conditional_branches(outcome: Outcome, s: &SpecialStates) -> TwoBranch {
    let q = C64::new(0.25, 0.0);
    let neg = |v: &CVector| -v.clone();
    match outcome {
        Outcome::G1G1 => TwoBranch {
            x1: s.xi_plus.clone(),
            y1: s.alpha_minus.clone(),
            x2: neg(&s.alpha_minus),
            y2: s.xi_plus.clone(),
        },
        Outcome::G2G2 => TwoBranch {
            x1: s.alpha_minus.clone(),
            y1: s.xi_minus.clone(),
            x2: neg(&s.xi_minus),
            y2: s.alpha_minus.clone(),
        },
        Outcome::G2G1 => TwoBranch {
            x1: &s.alpha_minus * q,
            y1: s.alpha_minus.clone(),
            x2: neg(&s.xi_minus),
            y2: s.xi_plus.clone(),
        },
        Outcome::G1G2 => TwoBranch {
            x1: s.xi_plus.clone(),
            y1: s.xi_minus.clone(),
            x2: &s.alpha_minus * -q,
            y2: s.alpha_minus.clone(),
        },
    }
}

/// `|C_ij>` on cavities a (x) b, unnormalized.
pub fn conditional_state(outcome: Outcome, alpha: C64, t: f64, p: &SystemParams, space: FockSpace) -> Result<CVector> {
    let s = special_states(alpha, t, p, space)?;
    Ok(conditional_branches(outcome, &s).vector())
}

/// Overlaps entering the Schmidt analysis of `|C_21>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct C21Overlaps {
    pub alpha_minus_norm: f64,
    pub xi_plus_norm: f64,
    pub xi_minus_norm: f64,
    /// `<xi-|alpha->`
    pub xi_minus_alpha_minus: C64,
    /// `<xi+|alpha->`
    pub xi_plus_alpha_minus: C64,
}

impl C21Overlaps {
    pub fn from_vectors(s: &SpecialStates) -> Self {
        Self {
            alpha_minus_norm: norm_sqr(&s.alpha_minus),
            xi_plus_norm: norm_sqr(&s.xi_plus),
            xi_minus_norm: norm_sqr(&s.xi_minus),
            xi_minus_alpha_minus: inner(&s.xi_minus, &s.alpha_minus),
            xi_plus_alpha_minus: inner(&s.xi_plus, &s.alpha_minus),
        }
    }

    pub fn analytic(e: &SpecialExprs) -> Self {
        Self {
            alpha_minus_norm: e.alpha_minus.overlap(&e.alpha_minus).re,
            xi_plus_norm: e.xi_plus.overlap(&e.xi_plus).re,
            xi_minus_norm: e.xi_minus.overlap(&e.xi_minus).re,
            xi_minus_alpha_minus: e.xi_minus.overlap(&e.alpha_minus),
            xi_plus_alpha_minus: e.xi_plus.overlap(&e.alpha_minus),
        }
    }
}

/// Schmidt decomposition data of `|C_21>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct C21Analysis {
    pub norm: f64,
    pub coeff_a: C64,
    pub coeff_d: C64,
    pub n1: f64,
    pub n2: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub entropy: f64,
}

impl C21Analysis {
    /// Schmidt data from precomputed overlaps.
    ///
    /// The cross term of the normalization uses the overlaps of the
    /// normalized states, which is what makes `|C_21>` a unit vector.
    pub fn from_overlaps(o: &C21Overlaps) -> Result<Self> {
        let big_a = o.alpha_minus_norm / 4.0;
        let big_d = (o.xi_minus_norm * o.xi_plus_norm).max(0.0).sqrt();
        // <alpha~-|xi~->, <alpha~-|xi~+>
        let normalized = |ov: C64, xi_norm: f64| {
            let den = (o.alpha_minus_norm * xi_norm).sqrt();
            if den > 0.0 {
                ov.conj() / den
            } else {
                ZERO
            }
        };
        let s1 = normalized(o.xi_minus_alpha_minus, o.xi_minus_norm);
        let s2 = normalized(o.xi_plus_alpha_minus, o.xi_plus_norm);
        let n_sq = big_a * big_a + big_d * big_d - 2.0 * big_a * big_d * (s1 * s2).re;
        let norm = n_sq.max(0.0).sqrt();
        if !(norm > C21_NORM_FLOOR) {
            return Err(Error::DegenerateState(format!("|C_21> normalization {norm:e}")));
        }
        let a = big_a / norm;
        let d = -big_d / norm;
        let n1 = (1.0 - s1.norm_sqr()).max(0.0).sqrt();
        let n2 = (1.0 - s2.norm_sqr()).max(0.0).sqrt();
        let q = (4.0 * (a * d * n1 * n2).powi(2)).clamp(0.0, 1.0);
        let (mu_plus, mu_minus) = split_mu(q);
        Ok(Self {
            norm,
            coeff_a: C64::new(a, 0.0),
            coeff_d: C64::new(d, 0.0),
            n1,
            n2,
            mu_plus,
            mu_minus,
            entropy: entropy_bits([mu_plus, mu_minus]),
        })
    }
}

/// Entanglement of `|C_21>` from vector overlaps.
pub fn c21_entanglement(alpha: C64, t: f64, p: &SystemParams, space: FockSpace) -> Result<C21Analysis> {
    let s = special_states(alpha, t, p, space)?;
    C21Analysis::from_overlaps(&C21Overlaps::from_vectors(&s))
}

/// Field states for retrieving a `C_11`-type cavity state.
///
/// `stored` holds the rotated amplitudes `(beta1, beta2) = (alpha', alpha'')`
/// at the storage time `t_stored`; the cavity then carries
/// `|xi+> = 1/2(|beta1> + |beta2>) + c|0> - k(|chi_beta1> - |chi_beta2>)`
/// and `|alpha-> = |beta1> - |beta2>`.
#[derive(Clone, Debug)]
pub struct AuxStates {
    /// Same-branch field of `2 e^{-iH_e t}|g1>|xi+>`.
    pub aux1: CVector,
    /// Flip-branch field of `2 e^{-iH_e t}|g1>|xi+>`.
    pub aux2: CVector,
    /// `e^{-iH_e t}|g1>|alpha->`.
    pub difference: BranchPair,
}

pub fn aux_states(alpha: C64, t_stored: f64, t: f64, p: &SystemParams, space: FockSpace) -> Result<AuxStates> {
    check_closed_form(p)?;
    let k = chi_weight(p)?;
    let (b1, b2) = rotated_amplitudes(alpha, t_stored, p);
    let s1 = special_states(b1, t, p, space)?;
    let s2 = special_states(b2, t, p, space)?;
    let vac = (-0.5 * alpha.norm_sqr()).exp();
    let c0 = ((I * p.splitting * t_stored / 2.0).exp() - 1.0) * (I * p.splitting * t / 2.0).exp() * (2.0 * vac);
    let kc = C64::new(k, 0.0);
    let mut aux1 = &s1.xi_plus + &s2.xi_plus - (&s1.chi_plus - &s2.chi_plus) * kc;
    aux1[0] += c0;
    let aux2 = (&s1.alpha_minus + &s2.alpha_minus) * C64::new(-0.5, 0.0) + (&s1.chi_minus - &s2.chi_minus) * kc;
    let difference = BranchPair {
        same_branch: &s1.xi_plus - &s2.xi_plus,
        flip_branch: (&s1.alpha_minus - &s2.alpha_minus) * C64::new(-0.5, 0.0),
    };
    Ok(AuxStates { aux1, aux2, difference })
}

//! Atomic and truncated Fock bases, ladder operators, and the coherent-type
//! field states used by the protocol.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector, C64, ONE, ZERO};

/// Largest Poisson tail weight a truncated coherent state may discard.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Relative cutoff for the scalar series in the analytic overlaps.
pub const SERIES_CUTOFF: f64 = 1e-14;

/// Number states `|0>, ..., |dim-1>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::FockTooSmall(dim));
        }
        Ok(Self { dim })
    }

    /// Default size for amplitude `|alpha|`: `ceil(|a|^2 + 8|a| + 12)`,
    /// at least 16.
    pub fn for_amplitude(alpha_abs: f64) -> Self {
        let a = alpha_abs.abs();
        let dim = (a * a + 8.0 * a + 12.0).ceil() as usize;
        Self { dim: dim.max(16) }
    }

    /// Default rule applied to the largest of several amplitudes.
    pub fn for_amplitudes<I: IntoIterator<Item = f64>>(alphas: I) -> Self {
        let largest = alphas.into_iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        Self::for_amplitude(largest)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Poisson weight `sum_{n >= dim} e^{-x} x^n / n!` with `x = |alpha|^2`.
    pub fn tail_weight(&self, alpha_abs: f64) -> f64 {
        poisson_tail(alpha_abs * alpha_abs, self.dim)
    }

    pub fn check_adequate(&self, alpha: C64) -> Result<()> {
        let a = alpha.norm();
        let tail = self.tail_weight(a);
        if tail > TAIL_TOLERANCE {
            return Err(Error::TruncationInadequate {
                alpha: a,
                dim: self.dim,
                required: required_dim(a),
                tail,
            });
        }
        Ok(())
    }
}

fn poisson_tail(x: f64, from: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    // log p_from, then walk the ratio x/(n+1) forward
    let ln_fact: f64 = (1..=from).map(|k| (k as f64).ln()).sum();
    let mut term = (-x + from as f64 * x.ln() - ln_fact).exp();
    let mut sum = 0.0;
    let mut n = from;
    loop {
        sum += term;
        n += 1;
        term *= x / n as f64;
        if (n as f64 > x && term < 1e-30 * sum.max(1e-300)) || term == 0.0 {
            break;
        }
    }
    sum
}

/// Smallest Fock dimension whose coherent tail for `|alpha|` is within
/// [`TAIL_TOLERANCE`].
pub fn required_dim(alpha_abs: f64) -> usize {
    let x = alpha_abs * alpha_abs;
    let mut d = 2;
    while poisson_tail(x, d) > TAIL_TOLERANCE {
        d += 1;
    }
    d
}

/// Atomic levels, in basis order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    G1,
    G2,
    E,
}

impl Level {
    pub fn index(self) -> usize {
        match self {
            Level::G1 => 0,
            Level::G2 => 1,
            Level::E => 2,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::G1 => "g1",
            Level::G2 => "g2",
            Level::E => "e",
        })
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "g1" => Ok(Level::G1),
            "g2" => Ok(Level::G2),
            "e" => Ok(Level::E),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// Ground-state label of one atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ground {
    G1,
    G2,
}

impl Ground {
    pub fn level(self) -> Level {
        match self {
            Ground::G1 => Level::G1,
            Ground::G2 => Level::G2,
        }
    }

    pub fn index(self) -> usize {
        self.level().index()
    }
}

impl fmt::Display for Ground {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.level().fmt(f)
    }
}

/// Joint ground label `(atom 1, atom 2)` of the two-atom register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Outcome(pub Ground, pub Ground);

impl Outcome {
    pub const G1G1: Outcome = Outcome(Ground::G1, Ground::G1);
    pub const G1G2: Outcome = Outcome(Ground::G1, Ground::G2);
    pub const G2G1: Outcome = Outcome(Ground::G2, Ground::G1);
    pub const G2G2: Outcome = Outcome(Ground::G2, Ground::G2);
    /// Canonical order: g1g1, g1g2, g2g1, g2g2.
    pub const ALL: [Outcome; 4] = [Self::G1G1, Self::G1G2, Self::G2G1, Self::G2G2];
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Outcome::ALL
            .into_iter()
            .find(|o| o.to_string() == lower)
            .ok_or(Error::UnknownLabel(lower))
    }
}

/// Three-level lambda atom `{g1, g2, e}` or its ground doublet `{g1, g2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomBasis {
    ThreeLevel,
    TwoLevel,
}

impl AtomBasis {
    pub fn dim(self) -> usize {
        match self {
            AtomBasis::ThreeLevel => 3,
            AtomBasis::TwoLevel => 2,
        }
    }

    pub fn index(self, level: Level) -> Result<usize> {
        if level == Level::E && self == AtomBasis::TwoLevel {
            return Err(Error::UnknownLabel(format!("{level} (two-level basis)")));
        }
        Ok(level.index())
    }

    pub fn ket(self, level: Level) -> Result<CVector> {
        Ok(crate::numerics::basis(self.dim(), self.index(level)?))
    }
}

/// `sigma_jk = |j><k|`.
pub fn atom_projector(basis: AtomBasis, j: Level, k: Level) -> Result<CMatrix> {
    let n = basis.dim();
    let mut m = CMatrix::zeros(n, n);
    m[(basis.index(j)?, basis.index(k)?)] = ONE;
    Ok(m)
}

/// Annihilation, creation and number operators on a truncated Fock space.
#[derive(Clone, Debug)]
pub struct Ladder {
    pub a: CMatrix,
    pub a_dag: CMatrix,
    pub number: CMatrix,
}

pub fn ladder_ops(space: FockSpace) -> Ladder {
    let d = space.dim();
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let a_dag = a.adjoint();
    let mut number = CMatrix::zeros(d, d);
    for n in 0..d {
        number[(n, n)] = C64::new(n as f64, 0.0);
    }
    Ladder { a, a_dag, number }
}

/// Amplitudes `alpha^n / sqrt(n!)` for `n < len`, without the Gaussian
/// prefactor.
fn poisson_amplitudes(alpha: C64, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut term = ONE;
    for n in 0..len {
        if n > 0 {
            term *= alpha / (n as f64).sqrt();
        }
        out.push(term);
    }
    out
}

/// Coherent state `e^{-|a|^2/2} sum a^n/sqrt(n!) |n>`.
pub fn coherent_state(alpha: C64, space: FockSpace) -> Result<CVector> {
    space.check_adequate(alpha)?;
    let pref = (-0.5 * alpha.norm_sqr()).exp();
    let amps = poisson_amplitudes(alpha, space.dim());
    Ok(CVector::from_iterator(space.dim(), amps.into_iter().map(|z| z * pref)))
}

/// Unnormalized `|chi_a> = sum_{n>=1} e^{-|a|^2/2} a^n / (n sqrt(n!)) |n>`.
pub fn chi_state(alpha: C64, space: FockSpace) -> Result<CVector> {
    space.check_adequate(alpha)?;
    let pref = (-0.5 * alpha.norm_sqr()).exp();
    let amps = poisson_amplitudes(alpha, space.dim());
    Ok(CVector::from_iterator(
        space.dim(),
        amps.into_iter()
            .enumerate()
            .map(|(n, z)| if n == 0 { ZERO } else { z * pref / n as f64 }),
    ))
}

/// Analytic `<alpha|beta> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)`.
pub fn coherent_overlap(alpha: C64, beta: C64) -> C64 {
    (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr() + alpha.conj() * beta).exp()
}

/// `sum_{n>=1} x^n / (n^p n!)`, stopped once terms fall below
/// [`SERIES_CUTOFF`] relative to the running sum.
fn weighted_exp_series(x: C64, p: i32) -> C64 {
    let mut sum = ZERO;
    let mut pow_over_fact = ONE;
    let mut n = 0usize;
    loop {
        n += 1;
        pow_over_fact *= x / n as f64;
        let term = pow_over_fact / (n as f64).powi(p);
        sum += term;
        if (n as f64) > x.norm() && term.norm() <= SERIES_CUTOFF * sum.norm().max(f64::MIN_POSITIVE) {
            break;
        }
        if n > 10_000 {
            break;
        }
    }
    sum
}

/// Analytic `<alpha|chi_beta>` by scalar series.
pub fn coherent_chi_overlap(alpha: C64, beta: C64) -> C64 {
    let pref = (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr()).exp();
    pref * weighted_exp_series(alpha.conj() * beta, 1)
}

/// Analytic `<chi_alpha|chi_beta>` by scalar series.
pub fn chi_overlap(alpha: C64, beta: C64) -> C64 {
    let pref = (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr()).exp();
    pref * weighted_exp_series(alpha.conj() * beta, 2)
}

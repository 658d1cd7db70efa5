//! Parameter-grid sweeps, CSV output and the validation suite.
//!
//! Grid points are independent and evaluated in parallel; records are
//! always emitted alpha-major, then `lambda0 t`, then `delta / lambda0`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::closed_form::{c21_entanglement, check_closed_form, conditional_branches, evolve_closed_form, special_states};
use crate::error::{Error, Result};
use crate::hamiltonians::{degenerate_raman_hamiltonian, effective_hamiltonian, verify_dispersive_reduction, SystemParams};
use crate::hilbert::{FockSpace, Ground, Outcome};
use crate::numerics::{max_abs, C64};
use crate::protocol::{
    composite_fidelity, excited_bound, initial_transfer_state, measure_atoms, prepare_c11, project_cavities, freely_rotated,
    retrieve_c11_closed_form, transfer_evolve, ComputePath, CompositeState,
};

pub const CSV_HEADER: &str = "alpha,lambda0_t,delta_over_lambda0,entropy_bits,outcome_probability,path_residual,warning";

/// Parses one scalar: a decimal number or a product/quotient of numbers
/// and `pi`, e.g. `pi`, `3*pi/4`, `pi/64`, `2pi`.
pub fn parse_scalar(token: &str) -> Result<f64> {
    let t = token.trim().to_ascii_lowercase();
    if t.is_empty() {
        return Err(Error::Parse("empty value".into()));
    }
    let factor = |f: &str| -> Result<f64> {
        let f = f.trim();
        if f == "pi" {
            return Ok(std::f64::consts::PI);
        }
        if let Some(num) = f.strip_suffix("pi") {
            return Ok(parse_plain(num)? * std::f64::consts::PI);
        }
        parse_plain(f)
    };
    let mut value = 1.0;
    let mut op = '*';
    let mut start = 0;
    for (i, ch) in t.char_indices().chain(std::iter::once((t.len(), '*'))) {
        if ch == '*' || ch == '/' {
            let v = factor(&t[start..i]).map_err(|_| Error::Parse(format!("bad number `{token}`")))?;
            value = if op == '*' { value * v } else { value / v };
            op = ch;
            start = i + 1;
        }
    }
    if !value.is_finite() {
        return Err(Error::Parse(format!("non-finite value `{token}`")));
    }
    Ok(value)
}

fn parse_plain(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}`")))
}

/// Parses a comma-separated list whose items are scalars or inclusive
/// `start:stop:step` ranges.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',') {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.len() {
            1 => out.push(parse_scalar(parts[0])?),
            3 => out.extend(range(parse_scalar(parts[0])?, parse_scalar(parts[1])?, parse_scalar(parts[2])?)?),
            _ => return Err(Error::Parse(format!("expected value or start:stop:step, got `{item}`"))),
        }
    }
    Ok(out)
}

/// Inclusive range; the end point is kept when it lies within a relative
/// `1e-9` step of the grid.
pub fn range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || stop < start {
        return Err(Error::InvalidGrid(format!("range {start}:{stop}:{step} is empty or has nonpositive step")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(Error::InvalidGrid("range has more than a million points".into()));
    }
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

/// `%.12g`-style formatting.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if !(-5..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mant.to_string()), sign, exp.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim(format!("{:.*}", decimals, x))
    }
}

#[derive(Clone, Debug)]
pub struct SweepGrid {
    pub alpha_values: Vec<f64>,
    pub lambda0_t_values: Vec<f64>,
    pub delta_over_lambda0_values: Vec<f64>,
    pub detuning_over_g1: f64,
    pub outcome: Outcome,
    pub path: ComputePath,
    pub fock_dim: Option<usize>,
    /// Second path to measure `path_residual` against.
    pub cross_check: Option<ComputePath>,
}

impl SweepGrid {
    pub fn new(alpha_values: Vec<f64>, lambda0_t_values: Vec<f64>, delta_over_lambda0_values: Vec<f64>) -> Self {
        Self {
            alpha_values,
            lambda0_t_values,
            delta_over_lambda0_values,
            detuning_over_g1: 100.0,
            outcome: Outcome::G2G1,
            path: ComputePath::ClosedForm,
            fock_dim: None,
            cross_check: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lists = [
            ("alpha", &self.alpha_values),
            ("lambda0_t", &self.lambda0_t_values),
            ("delta_over_lambda0", &self.delta_over_lambda0_values),
        ];
        for (name, list) in lists {
            if list.is_empty() {
                return Err(Error::InvalidGrid(format!("{name} list is empty")));
            }
            if list.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidGrid(format!("{name} values must be finite and >= 0")));
            }
        }
        if !(self.detuning_over_g1.is_finite() && self.detuning_over_g1 > 0.0) {
            return Err(Error::InvalidGrid("Delta/g1 must be positive".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut pts = Vec::with_capacity(self.alpha_values.len() * self.lambda0_t_values.len() * self.delta_over_lambda0_values.len());
        for &a in &self.alpha_values {
            for &t in &self.lambda0_t_values {
                for &x in &self.delta_over_lambda0_values {
                    pts.push((a, t, x));
                }
            }
        }
        pts
    }

    /// One Fock space large enough for every amplitude in the grid.
    pub fn space(&self) -> Result<FockSpace> {
        let amax = self.alpha_values.iter().copied().fold(0.0, f64::max);
        match self.fock_dim {
            Some(d) => {
                let s = FockSpace::new(d)?;
                s.check_adequate(C64::new(amax, 0.0))?;
                Ok(s)
            }
            None => Ok(FockSpace::for_amplitude(amax)),
        }
    }

    pub fn params(&self, delta_over_lambda0: f64) -> Result<SystemParams> {
        SystemParams::dispersive(self.detuning_over_g1, delta_over_lambda0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub alpha: f64,
    pub lambda0_t: f64,
    pub delta_over_lambda0: f64,
    pub entropy_bits: f64,
    pub outcome_probability: f64,
    pub path_residual: f64,
    pub warning: bool,
}

impl SweepRecord {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            format_number(self.alpha),
            format_number(self.lambda0_t),
            format_number(self.delta_over_lambda0),
            format_number(self.entropy_bits),
            format_number(self.outcome_probability),
            format_number(self.path_residual),
            u8::from(self.warning)
        )
    }
}

/// Entropy and Born probability of `outcome` from the closed-form
/// conditional states, without building the composite state.
fn closed_form_point(alpha: f64, t: f64, p: &SystemParams, outcome: Outcome, space: FockSpace) -> Result<(f64, f64)> {
    check_closed_form(p)?;
    let s = special_states(C64::new(alpha, 0.0), t, p, space)?;
    // |psi> = 1/sqrt2 [ -1/2 C11, C12, C21, -1/2 C22 ] over (g1g1, g1g2, g2g1, g2g2)
    let weight = |o: Outcome| {
        let w = if o.0 == o.1 { 0.25 } else { 1.0 };
        0.5 * w * conditional_branches(o, &s).norm_sqr()
    };
    let total: f64 = Outcome::ALL.into_iter().map(weight).sum();
    let prob = weight(outcome) / total;
    if prob < crate::protocol::ZERO_OUTCOME {
        return Ok((0.0, prob));
    }
    let entropy = if outcome == Outcome::G2G1 {
        c21_entanglement(C64::new(alpha, 0.0), t, p, space)?.entropy
    } else {
        conditional_branches(outcome, &s).entropy()?
    };
    Ok((entropy, prob))
}

fn composite_after_transfer(alpha: f64, t: f64, p: &SystemParams, path: ComputePath, space: FockSpace) -> Result<CompositeState> {
    transfer_evolve(&initial_transfer_state(C64::new(alpha, 0.0), space)?, t, p, path)
}

/// Evaluates one grid point.
pub fn evaluate_point(grid: &SweepGrid, space: FockSpace, alpha: f64, lambda0_t: f64, delta_over_lambda0: f64) -> Result<SweepRecord> {
    let p = grid.params(delta_over_lambda0)?;
    let t = p.time_from_lambda0_t(lambda0_t);
    let (entropy_bits, outcome_probability) = match grid.path {
        ComputePath::ClosedForm => closed_form_point(alpha, t, &p, grid.outcome, space)?,
        path => {
            let m = measure_atoms(&composite_after_transfer(alpha, t, &p, path, space)?)?;
            let o = m.get(grid.outcome);
            (o.entropy()?, o.probability)
        }
    };
    let path_residual = match grid.cross_check {
        Some(other) if other != grid.path => {
            let a = composite_after_transfer(alpha, t, &p, grid.path, space)?;
            let b = composite_after_transfer(alpha, t, &p, other, space)?;
            1.0 - composite_fidelity(&a, &b)?
        }
        _ => 0.0,
    };
    Ok(SweepRecord {
        alpha,
        lambda0_t,
        delta_over_lambda0,
        entropy_bits,
        outcome_probability,
        path_residual,
        warning: !p.validity().all(),
    })
}

/// Evaluates the whole grid on `workers` threads, in canonical order.
pub fn run_grid(grid: &SweepGrid, workers: usize) -> Result<Vec<SweepRecord>> {
    grid.validate()?;
    let space = grid.space()?;
    let points = grid.points();
    let eval = || points.par_iter().map(|&(a, t, x)| evaluate_point(grid, space, a, t, x)).collect::<Result<Vec<_>>>();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    pool.install(eval)
}

pub fn write_csv<W: Write>(records: &[SweepRecord], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_line())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a sweep CSV back into records.
pub fn read_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse("unexpected CSV header".into()));
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(Error::Parse(format!("bad CSV row `{line}`")));
            }
            let num = |i: usize| parse_plain(f[i]);
            Ok(SweepRecord {
                alpha: num(0)?,
                lambda0_t: num(1)?,
                delta_over_lambda0: num(2)?,
                entropy_bits: num(3)?,
                outcome_probability: num(4)?,
                path_residual: num(5)?,
                warning: f[6] == "1",
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub rows: usize,
    pub min_entropy: f64,
    pub max_entropy: f64,
    pub warnings: usize,
}

impl SweepSummary {
    pub fn of(records: &[SweepRecord]) -> Self {
        Self {
            rows: records.len(),
            min_entropy: records.iter().map(|r| r.entropy_bits).fold(f64::INFINITY, f64::min),
            max_entropy: records.iter().map(|r| r.entropy_bits).fold(f64::NEG_INFINITY, f64::max),
            warnings: records.iter().filter(|r| r.warning).count(),
        }
    }
}

/// Path of the metadata sidecar for a CSV file.
pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn write_outputs(command: &str, grid: &SweepGrid, workers: usize, records: &[SweepRecord], out: &Path) -> Result<SweepSummary> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    fs::write(out, buf)?;
    let summary = SweepSummary::of(records);
    let mut meta = String::new();
    let stamp = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let _ = writeln!(meta, "command = {command}");
    let _ = writeln!(meta, "version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(meta, "generated_unix = {stamp}");
    let _ = writeln!(meta, "Delta_over_g1 = {}", format_number(grid.detuning_over_g1));
    let _ = writeln!(meta, "outcome = {}", grid.outcome);
    let _ = writeln!(meta, "path = {}", grid.path);
    let _ = writeln!(meta, "cross_check = {}", grid.cross_check.map(|p| p.to_string()).unwrap_or_else(|| "none".into()));
    let _ = writeln!(meta, "fock_dim = {}", grid.space()?.dim());
    let _ = writeln!(meta, "workers = {workers}");
    let _ = writeln!(meta, "rows = {}", summary.rows);
    let _ = writeln!(meta, "min_entropy = {}", format_number(summary.min_entropy));
    let _ = writeln!(meta, "max_entropy = {}", format_number(summary.max_entropy));
    let _ = writeln!(meta, "warnings = {}", summary.warnings);
    fs::write(meta_path(out), meta)?;
    Ok(summary)
}

/// Entropy surface over `(alpha, lambda0 t)`, written as CSV.
pub fn run_transfer_sweep(grid: &SweepGrid, out: &Path, workers: usize) -> Result<SweepSummary> {
    let records = run_grid(grid, workers)?;
    write_outputs("transfer-sweep", grid, workers, &records, out)
}

/// Entropy versus `delta / lambda0` at fixed `lambda0 t`.
pub fn run_delta_sweep(grid: &SweepGrid, out: &Path, workers: usize) -> Result<SweepSummary> {
    if grid.lambda0_t_values.len() != 1 {
        return Err(Error::InvalidGrid("delta sweep takes a single lambda0 t".into()));
    }
    let records = run_grid(grid, workers)?;
    write_outputs("delta-sweep", grid, workers, &records, out)
}

/// One line of a validation report.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: value <= threshold, value, threshold, detail: detail.into() }
    }

    fn at_least(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: value >= threshold, value, threshold, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} value={} threshold={} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            format_number(self.value),
            format_number(self.threshold),
            self.detail
        )
        .trim_end()
        .to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub preset: String,
    pub params: SystemParams,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "# preset {} Delta/g1={} delta/lambda0={}\n",
            self.preset,
            format_number(self.params.detuning / self.params.g1),
            format_number(self.params.splitting / self.params.lambda0())
        );
        for c in &self.checks {
            s.push_str(&c.line());
            s.push('\n');
        }
        s.push_str(if self.passed() { "RESULT PASS\n" } else { "RESULT FAIL\n" });
        s
    }
}

/// Named parameter sets for `validate`.
pub fn preset_params(name: &str) -> Result<SystemParams> {
    match name {
        "paper-regime" => Ok(SystemParams::paper_regime()),
        "degenerate-raman" => SystemParams::degenerate_raman(100.0),
        "strong-coupling" => SystemParams::dispersive(5.0, 0.1),
        other => Err(Error::UnknownPreset(other.into())),
    }
}

pub const PRESETS: [&str; 3] = ["paper-regime", "degenerate-raman", "strong-coupling"];

/// Runs the invariant suites for a preset, optionally overriding `Delta/g1`.
pub fn run_validate(preset: &str, detuning_over_g1: Option<f64>) -> Result<ValidationReport> {
    let mut p = preset_params(preset)?;
    if let Some(r) = detuning_over_g1 {
        let x = if p.lambda0() > 0.0 { p.splitting / p.lambda0() } else { 0.0 };
        let matched = p.g2 != p.g1 || p.splitting != 0.0;
        p = if matched { SystemParams::dispersive(r, x)? } else { SystemParams::degenerate_raman(r)? };
    }
    let mut checks = Vec::new();
    let v = p.validity();
    checks.push(Check::at_least(
        "validity",
        if v.all() { 1.0 } else { 0.0 },
        1.0,
        format!("large_detuning={} close_ground_states={} first_order_splitting={}", v.large_detuning, v.close_ground_states, v.first_order_splitting),
    ));

    let red_space = FockSpace::new(30)?;
    let rep = verify_dispersive_reduction(&p, red_space)?;
    checks.push(Check::at_most(
        "dispersive_reduction",
        rep.relative_residual,
        0.01,
        format!("ground_residual={} leakage={}", format_number(rep.ground_residual), format_number(rep.leakage)),
    ));
    let doubled = SystemParams::new(p.omega, p.e_g1, p.splitting, 2.0 * p.detuning, p.g1, p.g2)?;
    let doubled = doubled.with_couplings(p.g1, if p.g2 == p.g1 { p.g1 } else { doubled.matched_g2() });
    let rep2 = verify_dispersive_reduction(&doubled, red_space)?;
    let ratio = if rep2.relative_residual > 0.0 { rep.relative_residual / rep2.relative_residual } else { 4.0 };
    checks.push(Check::at_most("reduction_scaling", (ratio - 4.0).abs() / 4.0, 0.3, format!("ratio={}", format_number(ratio))));

    if p.splitting == 0.0 && p.g1 == p.g2 {
        let space = FockSpace::new(20)?;
        let diff = max_abs(&(effective_hamiltonian(&p, space) - degenerate_raman_hamiltonian(p.g1, p.detuning, p.omega, p.e_g1, space)));
        checks.push(Check::at_most("degenerate_raman_elementwise", diff, 0.0, ""));
    }

    if check_closed_form(&p).is_ok() {
        let x = p.splitting / p.lambda0();
        let bound = x * x / 4.0 + 1e-9;
        let mut worst: f64 = 0.0;
        for amp in [0.5, 1.0, 2.0, 3.0] {
            let space = FockSpace::for_amplitude(amp);
            for k in 0..=16 {
                let t = p.time_from_lambda0_t(2.0 * std::f64::consts::PI * k as f64 / 16.0);
                for label in [Ground::G1, Ground::G2] {
                    let n = evolve_closed_form(label, C64::new(amp, 0.0), t, &p, space)?.norm_sqr();
                    worst = worst.max((n - 1.0).abs());
                }
            }
        }
        checks.push(Check::at_most("closed_form_norm", worst, bound, "bound (delta/lambda0)^2/4"));

        let mut worst_ce: f64 = 0.0;
        let mut worst_ef: f64 = 0.0;
        let mut worst_e: f64 = 0.0;
        for (amp, l0t) in [(0.5, 0.4), (1.0, 1.1), (1.5, 2.0), (2.0, std::f64::consts::FRAC_PI_2), (1.0, 2.9)] {
            let space = FockSpace::for_amplitude(amp);
            let t = p.time_from_lambda0_t(l0t);
            let closed = composite_after_transfer(amp, t, &p, ComputePath::ClosedForm, space)?;
            let eff = composite_after_transfer(amp, t, &p, ComputePath::EffectiveNumeric, space)?;
            let full = composite_after_transfer(amp, t, &p, ComputePath::Full, space)?;
            worst_ce = worst_ce.max(1.0 - composite_fidelity(&closed, &eff)?);
            worst_ef = worst_ef.max(1.0 - composite_fidelity(&eff, &full)?);
            worst_e = worst_e.max(full.max_atom_excited_population() / excited_bound(&p, C64::new(amp, 0.0)));
        }
        checks.push(Check::at_most("closed_vs_effective", worst_ce, 1e-4, "1 - fidelity"));
        checks.push(Check::at_most("effective_vs_full", worst_ef, 0.01, "1 - fidelity"));
        checks.push(Check::at_most("excited_population", worst_e, 1.0, "single-atom fraction of 4(g1/Delta)^2(nbar+1)"));

        let space = FockSpace::for_amplitude(2.0);
        let t = p.time_from_lambda0_t(0.8);
        let m = measure_atoms(&composite_after_transfer(2.0, t, &p, ComputePath::ClosedForm, space)?)?;
        let ebit = [Outcome::G1G1, Outcome::G2G2]
            .into_iter()
            .map(|o| m.get(o).entropy().map(|e| (e - 1.0).abs()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        checks.push(Check::at_most("one_ebit_storage", ebit, 1e-6, "|E - 1| for g1g1, g2g2"));

        let ti = p.time_from_lambda0_t(std::f64::consts::FRAC_PI_2);
        prepare_c11(C64::new(2.0, 0.0), ti, &p, space)?;
        let mut worst_r: f64 = 0.0;
        for l0t in [0.4, 1.0, 2.3, 4.0] {
            let tr = p.time_from_lambda0_t(l0t);
            let target = freely_rotated(C64::new(2.0, 0.0), ti + tr, &p);
            let proj = project_cavities(&retrieve_c11_closed_form(C64::new(2.0, 0.0), ti, tr, &p, space)?, target, target)?;
            worst_r = worst_r.max(1.0 - proj.singlet_fidelity()?);
        }
        checks.push(Check::at_most("retrieval_singlet", worst_r, 1e-6, "1 - fidelity"));
    } else {
        checks.push(Check::at_least("closed_form_applicable", 0.0, 1.0, "g2 does not satisfy the matched-coupling condition"));
    }
    Ok(ValidationReport { preset: preset.into(), params: p, checks })
}

//! The `recip` command line.
//!
//! Every flag may also be given in a `key = value` config file passed with
//! `--config`; keys are the long flag names without the leading dashes
//! (`-` and `_` are interchangeable). Flags on the command line win.
//!
//! Exit codes: 0 success, 1 validation failure, 2 invalid arguments,
//! 3 numeric-contract violation.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::hamiltonians::SystemParams;
use crate::hilbert::Outcome;
use crate::protocol::{roundtrip, RoundTripConfig, RoundTripReport};
use crate::sweep::{format_number, parse_scalar, parse_values, run_delta_sweep, run_transfer_sweep, run_validate, SweepGrid, PRESETS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "recip", version, about = "Entanglement transfer between atoms and cavity fields")]
pub struct Cli {
    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Entropy of a conditional cavity state over an (alpha, lambda0 t) grid.
    TransferSweep(SweepArgs),
    /// Entropy versus delta/lambda0 at one interaction time.
    DeltaSweep(SweepArgs),
    /// Run the invariant suites for a parameter preset.
    Validate(ValidateArgs),
    /// Store an atomic singlet in the cavities and retrieve it.
    Roundtrip(RoundtripArgs),
}

#[derive(Args, Debug, Default)]
pub struct SweepArgs {
    /// Amplitudes: value, list `1,3,5` or range `start:stop:step`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Interaction times in units of 1/lambda0; accepts `pi`, `pi/64`, ...
    #[arg(long = "lambda0-t")]
    pub lambda0_t: Option<String>,
    /// Ground-state splitting delta/lambda0.
    #[arg(long = "delta-ratio")]
    pub delta_ratio: Option<String>,
    /// Detuning in units of g1 (default 100).
    #[arg(long = "Delta-over-g1")]
    pub detuning_over_g1: Option<String>,
    /// g1g1, g1g2, g2g1 or g2g2.
    #[arg(long)]
    pub outcome: Option<String>,
    /// full, effective or closed.
    #[arg(long)]
    pub path: Option<String>,
    /// Second path whose fidelity gap fills `path_residual`.
    #[arg(long = "cross-check")]
    pub cross_check: Option<String>,
    /// Fock truncation per cavity; chosen from the largest amplitude if omitted.
    #[arg(long = "fock-dim")]
    pub fock_dim: Option<String>,
    /// Worker threads. Output does not depend on this.
    #[arg(long)]
    pub workers: Option<String>,
    /// CSV output; a `.meta` sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct ValidateArgs {
    /// paper-regime, degenerate-raman or strong-coupling.
    #[arg(long)]
    pub preset: Option<String>,
    /// Override the preset detuning.
    #[arg(long = "Delta-over-g1")]
    pub detuning_over_g1: Option<String>,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct RoundtripArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    /// Storage interaction time.
    #[arg(long = "lambda0-t")]
    pub lambda0_t: Option<String>,
    /// Retrieval interaction time (defaults to the storage time).
    #[arg(long = "retrieve-lambda0-t")]
    pub retrieve_lambda0_t: Option<String>,
    #[arg(long = "delta-ratio")]
    pub delta_ratio: Option<String>,
    #[arg(long = "Delta-over-g1")]
    pub detuning_over_g1: Option<String>,
    #[arg(long)]
    pub outcome: Option<String>,
    #[arg(long)]
    pub path: Option<String>,
    #[arg(long = "fock-dim")]
    pub fock_dim: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parsed config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    values: HashMap<String, String>,
}

fn normalize_key(k: &str) -> String {
    k.trim().trim_start_matches("--").replace('_', "-").to_ascii_lowercase()
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected `key = value`", lineno + 1)))?;
            values.insert(normalize_key(k), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(&normalize_key(key)).map(String::as_str)
    }
}

struct Resolver<'a> {
    config: &'a Config,
}

impl Resolver<'_> {
    fn raw(&self, flag: &Option<String>, key: &str, default: &str) -> String {
        flag.clone().or_else(|| self.config.get(key).map(str::to_string)).unwrap_or_else(|| default.to_string())
    }

    fn opt(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.config.get(key).map(str::to_string))
    }

    fn path(&self, flag: &Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.clone().or_else(|| self.config.get(key).map(PathBuf::from))
    }
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Parse(format!("{what} must be a positive integer, got `{s}`")))
}

fn single(s: &str, what: &str) -> Result<f64> {
    let v = parse_scalar(s)?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::Parse(format!("{what} must be >= 0")));
    }
    Ok(v)
}

fn build_grid(a: &SweepArgs, r: &Resolver, delta_mode: bool) -> Result<(SweepGrid, usize, PathBuf)> {
    let (alpha_d, time_d, ratio_d, out_d) = if delta_mode {
        ("1,3,5", "pi/2", "0:1:0.05", "delta_sweep.csv")
    } else {
        ("0.25:5:0.25", "0:pi:pi/64", "0.1", "transfer_sweep.csv")
    };
    let mut grid = SweepGrid::new(
        parse_values(&r.raw(&a.alpha, "alpha", alpha_d))?,
        parse_values(&r.raw(&a.lambda0_t, "lambda0-t", time_d))?,
        parse_values(&r.raw(&a.delta_ratio, "delta-ratio", ratio_d))?,
    );
    grid.detuning_over_g1 = single(&r.raw(&a.detuning_over_g1, "Delta-over-g1", "100"), "Delta-over-g1")?;
    grid.outcome = r.raw(&a.outcome, "outcome", "g2g1").parse()?;
    grid.path = r.raw(&a.path, "path", "closed").parse()?;
    grid.cross_check = r.opt(&a.cross_check, "cross-check").map(|s| s.parse()).transpose()?;
    grid.fock_dim = r.opt(&a.fock_dim, "fock-dim").map(|s| parse_usize(&s, "fock-dim")).transpose()?;
    let workers = parse_usize(&r.raw(&a.workers, "workers", "1"), "workers")?.max(1);
    let out = r.path(&a.out, "out").unwrap_or_else(|| PathBuf::from(out_d));
    grid.validate()?;
    Ok((grid, workers, out))
}

/// Renders a round-trip report as `key = value` lines.
pub fn render_report(cfg: &RoundTripConfig, r: &RoundTripReport) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(&v);
        s.push('\n');
    };
    kv("alpha", format_number(cfg.alpha.re));
    kv("lambda0_t", format_number(cfg.lambda0_t));
    kv("retrieve_lambda0_t", format_number(cfg.retrieve_lambda0_t));
    kv("outcome", cfg.outcome.to_string());
    kv("path", cfg.path.to_string());
    kv("e_initial", format_number(r.e_initial));
    for (o, p) in Outcome::ALL.iter().zip(r.outcome_probs) {
        kv(&format!("p_{o}"), format_number(p));
    }
    kv("p_excited", format_number(r.excited_probability));
    kv("e_stored", format_number(r.e_stored));
    kv("projection_weight", format_number(r.projection_weight));
    kv("retrieval_fidelity", format_number(r.retrieval_fidelity));
    kv("degenerate", r.degenerate.clone().unwrap_or_else(|| "none".into()));
    s
}

fn exit_for(err: &Error) -> i32 {
    if err.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_USAGE
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let r = Resolver { config: &config };
    match cli.command {
        Command::TransferSweep(a) => {
            let (grid, workers, out) = build_grid(&a, &r, false)?;
            let s = run_transfer_sweep(&grid, &out, workers)?;
            writeln!(stdout, "rows = {}\nmin_entropy = {}\nmax_entropy = {}\nwarnings = {}\nout = {}", s.rows, format_number(s.min_entropy), format_number(s.max_entropy), s.warnings, out.display())?;
            Ok(EXIT_OK)
        }
        Command::DeltaSweep(a) => {
            let (grid, workers, out) = build_grid(&a, &r, true)?;
            let s = run_delta_sweep(&grid, &out, workers)?;
            writeln!(stdout, "rows = {}\nmin_entropy = {}\nmax_entropy = {}\nwarnings = {}\nout = {}", s.rows, format_number(s.min_entropy), format_number(s.max_entropy), s.warnings, out.display())?;
            Ok(EXIT_OK)
        }
        Command::Validate(a) => {
            let preset = r.raw(&a.preset, "preset", "paper-regime");
            if !PRESETS.contains(&preset.as_str()) {
                return Err(Error::UnknownPreset(preset));
            }
            let over = r.opt(&a.detuning_over_g1, "Delta-over-g1").map(|s| single(&s, "Delta-over-g1")).transpose()?;
            let report = run_validate(&preset, over)?;
            let text = report.render();
            stdout.write_all(text.as_bytes())?;
            if let Some(out) = r.path(&a.out, "out") {
                fs::write(out, &text)?;
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_VALIDATION })
        }
        Command::Roundtrip(a) => {
            let x = single(&r.raw(&a.delta_ratio, "delta-ratio", "0.1"), "delta-ratio")?;
            let d = single(&r.raw(&a.detuning_over_g1, "Delta-over-g1", "100"), "Delta-over-g1")?;
            let l0t = single(&r.raw(&a.lambda0_t, "lambda0-t", "pi/2"), "lambda0-t")?;
            let mut cfg = RoundTripConfig::new(single(&r.raw(&a.alpha, "alpha", "2"), "alpha")?, l0t, SystemParams::dispersive(d, x)?);
            cfg.retrieve_lambda0_t = match r.opt(&a.retrieve_lambda0_t, "retrieve-lambda0-t") {
                Some(s) => single(&s, "retrieve-lambda0-t")?,
                None => l0t,
            };
            cfg.outcome = r.raw(&a.outcome, "outcome", "g1g1").parse()?;
            cfg.path = r.raw(&a.path, "path", "closed").parse()?;
            cfg.fock_dim = r.opt(&a.fock_dim, "fock-dim").map(|s| parse_usize(&s, "fock-dim")).transpose()?;
            let report = roundtrip(&cfg)?;
            let text = render_report(&cfg, &report);
            stdout.write_all(text.as_bytes())?;
            if let Some(out) = r.path(&a.out, "out") {
                fs::write(out, &text)?;
            }
            Ok(if report.degenerate.is_some() { EXIT_NUMERIC } else { EXIT_OK })
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            exit_for(&err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("recip").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_parsing() {
        let c = Config::parse("# comment\nalpha = 1,2  # trailing\n\nDelta_over_g1=50\n").unwrap();
        assert_eq!(c.get("alpha"), Some("1,2"));
        assert_eq!(c.get("Delta-over-g1"), Some("50"));
        assert!(Config::parse("alpha 3").is_err());
    }

    #[test]
    fn bad_arguments_exit_two() {
        assert_eq!(call(&["transfer-sweep", "--alpha", "x"]).0, EXIT_USAGE);
        assert_eq!(call(&["transfer-sweep", "--outcome", "g1e"]).0, EXIT_USAGE);
        assert_eq!(call(&["validate", "--preset", "nope"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn roundtrip_output_and_degenerate_exit() {
        let (code, out, _) = call(&["roundtrip", "--alpha", "2", "--lambda0-t", "pi/2"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("retrieval_fidelity = 1"), "{out}");
        let (code, out, _) = call(&["roundtrip", "--lambda0-t", "pi", "--delta-ratio", "0"]);
        assert_eq!(code, EXIT_NUMERIC);
        assert!(out.contains("e_stored = 0"));
    }

    #[test]
    fn config_file_supplies_defaults_and_flags_override() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.conf");
        let out = dir.path().join("s.csv");
        fs::write(&cfg, format!("alpha = 1\nlambda0-t = 0:1:0.5\nout = {}\n", out.display())).unwrap();
        let (code, stdout, _) = call(&["transfer-sweep", "--config", cfg.to_str().unwrap(), "--alpha", "1,2"]);
        assert_eq!(code, EXIT_OK);
        assert!(stdout.contains("rows = 6"), "{stdout}");
        assert!(crate::sweep::meta_path(&out).exists());
    }

    #[test]
    fn validate_exit_codes() {
        assert_eq!(call(&["validate", "--preset", "degenerate-raman"]).0, EXIT_OK);
        let (code, out, _) = call(&["validate", "--preset", "strong-coupling"]);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(out.contains("FAIL dispersive_reduction"));
    }
}

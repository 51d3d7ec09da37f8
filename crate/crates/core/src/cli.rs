//! Command-line front end: single evaluations, sweeps and figure datasets as CSV or JSON.
//!
//! Exit codes: 0 success, 1 numeric failure (or failed verification), 2 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::discord::{c_delta, c_delta_via_qmi, h_bits, mic_tilde, weak_limit_coefficient};
use crate::error::MacromicError;
use crate::fragility::{
    distillable_after_dephasing, ef_decay_bound_check, ef_micro_macro, environment_mi, KrausChannel,
};
use crate::io::{self, format_number, OutputFormat, RunManifest, Table};
use crate::mutual_info::{mic, mutual_information};
use crate::peaks::{peaks_mi, PeaksFamily};
use crate::pointers::{PointerKind, PointerModel};
use crate::roof::{
    mic_prime_with, pure_mic_2peak, qfi_size_bound, quantum_fisher_information, roof_mic_2peak, BlochStateXZ,
    SearchOptions,
};
use crate::spectra::{superposition_state, BranchEnsemble, DensityMatrix, MicroMacroState, ObservableSpectrum};
use crate::verify::{self, VerifyReport, SUITES};

/// Peak count used as the k → ∞ stand-in in the `fig2` dataset.
pub const INF_PROXY_K: usize = 512;

#[derive(Debug, Parser)]
#[command(name = "macromic", version, about = "Sizes of quantum superpositions from pointer information")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write results here instead of stdout; a manifest goes to `<output>.manifest.json`.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Seed for randomized searches and verification trials.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pointer mutual information I_Δ(A:ℓ) over a width or ratio grid.
    Mi(MiArgs),
    /// Largest pointer width reaching b bits.
    Mic(MicArgs),
    /// Convex-roof sizes of a mixed state, with the Fisher-information bound.
    Roof(RoofArgs),
    /// Discord-type measure C_Δ and its size.
    Discord(DiscordArgs),
    /// Entanglement decay of a micro-macro state under Gaussian dephasing.
    Fragility(FragilityArgs),
    /// Dataset of information against r = Δ/(2N) for peak families.
    Fig2(Fig2Args),
    /// Dataset of rescaled convex-roof sizes over the XZ Bloch disk.
    Fig3(Fig3Args),
    /// Randomized invariant suites with a JSON report.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mi(_) => "mi",
            Command::Mic(_) => "mic",
            Command::Roof(_) => "roof",
            Command::Discord(_) => "discord",
            Command::Fragility(_) => "fragility",
            Command::Fig2(_) => "fig2",
            Command::Fig3(_) => "fig3",
            Command::Verify(_) => "verify",
        }
    }
}

/// Branch ensemble: `--peaks k=K N=SPAN` (or `K,SPAN`), or inline `--weights` / `--levels`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleArgs {
    #[arg(long, num_args = 1..=2, value_name = "k=K N=SPAN", conflicts_with_all = ["weights", "levels"])]
    pub peaks: Option<Vec<String>>,
    /// Comma-separated weights; uniform when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub weights: Option<String>,
    /// Comma-separated increasing levels; `0,1,…` when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub levels: Option<String>,
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct PointerArgs {
    /// Square (top-hat) pointer.
    #[arg(long, conflicts_with = "gauss")]
    pub square: bool,
    /// Gaussian pointer (default).
    #[arg(long, alias = "gaussian")]
    pub gauss: bool,
}

impl PointerArgs {
    fn kind(&self) -> PointerKind {
        if self.square { PointerKind::Square } else { PointerKind::Gaussian }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MiArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub pointer: PointerArgs,
    /// Pointer widths: list `a,b,c` or range `start:stop:count`.
    #[arg(long, required_unless_present = "ratio", conflicts_with = "ratio")]
    pub delta: Option<String>,
    /// Ratios r = Δ/(2N) with N the spectral span.
    #[arg(long)]
    pub ratio: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MicArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub pointer: PointerArgs,
    /// Information targets in bits; fractions such as `1/3` are accepted.
    #[arg(long)]
    pub b: String,
}

/// A state: `--rho` JSON file, `--bloch x,z` qubit, or the superposition of an ensemble.
#[derive(Debug, Clone, Args, Serialize)]
pub struct StateArgs {
    /// JSON file with a row-major list of `[re, im]` pairs.
    #[arg(long, conflicts_with_all = ["bloch", "peaks", "weights"])]
    pub rho: Option<PathBuf>,
    /// Qubit Bloch coordinates `x,z` (y = 0).
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["peaks", "weights"])]
    pub bloch: Option<String>,
    /// Qubit level separation for `--bloch`.
    #[arg(long, default_value_t = 1.0)]
    pub span: f64,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RoofArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub pointer: PointerArgs,
    #[arg(long, default_value = "0.082,1/3")]
    pub b: String,
    /// Multistarts for the roof search on three- and four-level states.
    #[arg(long, default_value_t = SearchOptions::default().starts)]
    pub starts: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiscordArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Pointer widths.
    #[arg(long, required_unless_present = "b")]
    pub delta: Option<String>,
    /// Report the size for these targets instead of C_Δ on a width grid.
    #[arg(long, conflicts_with = "delta")]
    pub b: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FragilityArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Dephasing widths.
    #[arg(long)]
    pub delta: String,
    /// Gauss–Hermite nodes of the discretized pointer.
    #[arg(long, default_value_t = crate::fragility::DEFAULT_NODES)]
    pub nodes: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Fig2Args {
    /// Peak counts k (k + 1 peaks).
    #[arg(long, default_value = "1,3,7")]
    pub k: String,
    /// Ratio grid r = Δ/(2N).
    #[arg(long, default_value = "0.05:2:40")]
    pub r: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Fig3Args {
    #[arg(long, default_value = "0.082,1/3")]
    pub b: String,
    #[arg(long, default_value = "0:1:21", allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value = "-1:1:21", allow_hyphen_values = true)]
    pub z: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, required_unless_present = "list")]
    pub suite: Option<String>,
    /// Trials per suite; each suite has its own default.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Print the available suites.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("--{flag}: {message}")]
    Usage { flag: &'static str, message: String },
    #[error(transparent)]
    Library(#[from] MacromicError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Library(MacromicError::Numeric { .. } | MacromicError::Io(_)) => 1,
            CliError::Library(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

fn usage(flag: &'static str, message: impl std::fmt::Display) -> CliError {
    CliError::Usage { flag, message: message.to_string() }
}

/// Result of a command: the rendered text, an exit status and warnings for stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub warnings: Vec<String>,
    pub success: bool,
}

/// Parses `1.5`, `-2`, `1e-3` or `a/b`.
pub fn parse_number(token: &str) -> Result<f64, String> {
    let token = token.trim();
    let value = match token.split_once('/') {
        Some((num, den)) => {
            let (n, d): (f64, f64) = (
                num.trim().parse().map_err(|_| format!("bad number {token:?}"))?,
                den.trim().parse().map_err(|_| format!("bad number {token:?}"))?,
            );
            n / d
        }
        None => token.parse().map_err(|_| format!("bad number {token:?}"))?,
    };
    if value.is_finite() { Ok(value) } else { Err(format!("{token:?} is not a finite number")) }
}

/// Parses a comma list, or `start:stop:count` for `count` evenly spaced points.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty grid".into());
    }
    if let Some((start, rest)) = spec.split_once(':') {
        let (stop, count) = rest.split_once(':').ok_or("range must read start:stop:count")?;
        let (start, stop) = (parse_number(start)?, parse_number(stop)?);
        let count: usize = count.trim().parse().map_err(|_| format!("bad point count {count:?}"))?;
        return match count {
            0 => Err("empty grid".into()),
            1 => Ok(vec![start]),
            n => Ok((0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect()),
        };
    }
    spec.split(',').map(parse_number).collect()
}

fn grid(flag: &'static str, spec: &str) -> Result<Vec<f64>, CliError> {
    parse_grid(spec).map_err(|m| usage(flag, m))
}

fn positive_grid(flag: &'static str, spec: &str) -> Result<Vec<f64>, CliError> {
    let values = grid(flag, spec)?;
    match values.iter().find(|v| **v <= 0.0) {
        Some(v) => Err(usage(flag, format!("values must be positive, got {v}"))),
        None => Ok(values),
    }
}

/// `(k, N)` from tokens such as `k=1 N=1`, `1,1` or `k=1,N=1`.
pub fn parse_peaks(tokens: &[String]) -> Result<(usize, f64), String> {
    let joined = tokens.join(",");
    let (mut k, mut span) = (None, None);
    let mut positional = Vec::new();
    for part in joined.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('=') {
            Some(("k" | "K", v)) => k = Some(v.trim().to_owned()),
            Some(("N" | "n" | "span", v)) => span = Some(v.trim().to_owned()),
            Some((key, _)) => return Err(format!("unknown key {key:?}; expected k or N")),
            None => positional.push(part.to_owned()),
        }
    }
    let mut positional = positional.into_iter();
    let k = k.or_else(|| positional.next()).ok_or("missing k")?;
    let span = span.or_else(|| positional.next()).unwrap_or_else(|| "1".into());
    if positional.next().is_some() {
        return Err("too many values; expected k and N".into());
    }
    let k = k.parse().map_err(|_| format!("k must be a non-negative integer, got {k:?}"))?;
    let span = parse_number(&span)?;
    if span <= 0.0 {
        return Err(format!("N must be positive, got {span}"));
    }
    Ok((k, span))
}

impl EnsembleArgs {
    fn is_given(&self) -> bool {
        self.peaks.is_some() || self.weights.is_some() || self.levels.is_some()
    }

    fn build(&self) -> Result<BranchEnsemble, CliError> {
        if let Some(tokens) = &self.peaks {
            let (k, span) = parse_peaks(tokens).map_err(|m| usage("peaks", m))?;
            let spectrum = if k == 0 {
                ObservableSpectrum::new(vec![0.0]).map_err(|e| usage("peaks", e))?
            } else {
                PeaksFamily::new(k, span).and_then(|f| f.ensemble()).map_err(|e| usage("peaks", e))?.spectrum().clone()
            };
            return Ok(BranchEnsemble::uniform(spectrum));
        }
        let weights = self.weights.as_deref().map(|w| grid("weights", w)).transpose()?;
        let levels = self.levels.as_deref().map(|l| grid("levels", l)).transpose()?;
        let levels = match (levels, &weights) {
            (Some(l), _) => l,
            (None, Some(w)) => (0..w.len()).map(|i| i as f64).collect(),
            (None, None) => return Err(usage("peaks", "give --peaks or --weights/--levels")),
        };
        let spectrum = ObservableSpectrum::new(levels).map_err(|e| usage("levels", e))?;
        match weights {
            Some(w) => BranchEnsemble::new(w, spectrum).map_err(|e| usage("weights", e)),
            None => Ok(BranchEnsemble::uniform(spectrum)),
        }
    }
}

impl StateArgs {
    fn build(&self) -> Result<(DensityMatrix, ObservableSpectrum), CliError> {
        if let Some(path) = &self.rho {
            let rho = io::read_density_matrix(path).map_err(|e| usage("rho", e))?;
            let levels = match &self.ensemble.levels {
                Some(l) => grid("levels", l)?,
                None => (0..rho.dim()).map(|i| i as f64).collect(),
            };
            let spectrum = ObservableSpectrum::new(levels).map_err(|e| usage("levels", e))?;
            if spectrum.len() != rho.dim() {
                return Err(usage("levels", format!("{} levels for a {}-dimensional state", spectrum.len(), rho.dim())));
            }
            return Ok((rho, spectrum));
        }
        if let Some(bloch) = &self.bloch {
            let xz = grid("bloch", bloch)?;
            let [x, z] = xz[..] else {
                return Err(usage("bloch", "expected x,z"));
            };
            let rho = DensityMatrix::from_bloch(x, 0.0, z).map_err(|e| usage("bloch", e))?;
            let spectrum = ObservableSpectrum::new(vec![0.0, self.span]).map_err(|e| usage("span", e))?;
            return Ok((rho, spectrum));
        }
        if self.ensemble.is_given() {
            let ens = self.ensemble.build()?;
            return Ok((superposition_state(&ens).density_matrix(), ens.spectrum().clone()));
        }
        Err(usage("rho", "give --rho, --bloch or an ensemble"))
    }
}

fn num(x: f64) -> String {
    format_number(x)
}

/// Runs rows in parallel and keeps their order.
fn rows<T: Sync>(items: &[T], f: impl Fn(&T) -> crate::error::Result<Vec<String>> + Sync + Send) -> Result<Vec<Vec<String>>, CliError> {
    let out: Vec<_> = items.par_iter().map(f).collect();
    out.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

fn cmd_mi(args: &MiArgs) -> Result<Table, CliError> {
    let ens = args.ensemble.build()?;
    let params = match (&args.delta, &args.ratio) {
        (Some(d), _) => positive_grid("delta", d)?,
        (None, Some(r)) => positive_grid("ratio", r)?,
        (None, None) => return Err(usage("delta", "a width grid is required")),
    };
    let to_delta = |p: f64| if args.ratio.is_some() { 2.0 * ens.spectrum().span().max(f64::MIN_POSITIVE) * p } else { p };
    let kind = args.pointer.kind();
    let mut table = Table::new(["param", "mi_bits", "method", "abs_err"]);
    table.extend(rows(&params, |&p| {
        let r = mutual_information(&ens, &PointerModel::new(kind, to_delta(p))?)?;
        Ok(vec![num(p), num(r.bits), r.method.to_string(), num(r.est_abs_error)])
    })?);
    Ok(table)
}

fn cmd_mic(args: &MicArgs) -> Result<Table, CliError> {
    let ens = args.ensemble.build()?;
    let targets = positive_grid("b", &args.b)?;
    let kind = args.pointer.kind();
    let mut table = Table::new(["b", "mic", "capped"]);
    table.extend(rows(&targets, |&b| {
        let m = mic(&ens, kind, b)?;
        Ok(vec![num(b), num(m.delta), m.capped.to_string()])
    })?);
    Ok(table)
}

/// Bloch `(x⊥, z)` of a qubit, with `x⊥ = 2|ρ₀₁|`.
fn transverse_xz(rho: &DensityMatrix) -> (f64, f64) {
    let m = rho.entries();
    ((2.0 * m[(0, 1)].norm()).min(1.0), (m[(0, 0)] - m[(1, 1)]).re)
}

fn cmd_roof(args: &RoofArgs, seed: u64) -> Result<Table, CliError> {
    let (rho, spectrum) = args.state.build()?;
    let targets = positive_grid("b", &args.b)?;
    if args.starts == 0 {
        return Err(usage("starts", "at least one start is needed"));
    }
    let opts = SearchOptions { starts: args.starts, seed, ..SearchOptions::default() };
    let kind = args.pointer.kind();
    let fisher = quantum_fisher_information(&rho, &spectrum)?;
    let mut table = Table::new(["b", "mic_prime", "capped", "qfi_bound", "roof_mic_2peak"]);
    for &b in &targets {
        let m = mic_prime_with(&rho, &spectrum, kind, b, opts)?;
        let analytic = if rho.dim() == 2 {
            let (x, z) = transverse_xz(&rho);
            num(roof_mic_2peak(&BlochStateXZ::new(x, z, spectrum.span())?, b)?)
        } else {
            String::new()
        };
        table.push(vec![num(b), num(m.delta), m.capped.to_string(), num(qfi_size_bound(fisher, b)), analytic]);
    }
    Ok(table)
}

fn cmd_discord(args: &DiscordArgs) -> Result<Table, CliError> {
    let (rho, spectrum) = args.state.build()?;
    if let Some(b) = &args.b {
        let targets = positive_grid("b", b)?;
        let mut table = Table::new(["b", "mic_tilde", "capped"]);
        table.extend(rows(&targets, |&b| {
            let m = mic_tilde(&rho, &spectrum, b)?;
            Ok(vec![num(b), num(m.delta), m.capped.to_string()])
        })?);
        return Ok(table);
    }
    let widths = positive_grid("delta", args.delta.as_deref().unwrap_or_default())?;
    let coefficient = weak_limit_coefficient(&rho, &spectrum)?;
    let mut table = Table::new(["delta", "c_delta", "c_delta_qmi", "weak_limit"]);
    table.extend(rows(&widths, |&d| {
        let direct = c_delta(&rho, &spectrum, d)?;
        let qmi = c_delta_via_qmi(&rho, &spectrum, d)?;
        Ok(vec![num(d), num(direct), num(qmi), num(coefficient * h_bits(d.powi(-2)))])
    })?);
    Ok(table)
}

fn cmd_fragility(args: &FragilityArgs) -> Result<Table, CliError> {
    let state = MicroMacroState::from_ensemble(args.ensemble.build()?);
    let widths = positive_grid("delta", &args.delta)?;
    if args.nodes == 0 {
        return Err(usage("nodes", "at least one node is needed"));
    }
    let ef = ef_micro_macro(&state);
    let mut table =
        Table::new(["delta", "ef", "environment_mi", "avg_branch_entropy", "bound", "holds", "distillable"]);
    table.extend(rows(&widths, |&d| {
        let channel = KrausChannel::gaussian_dephasing(state.spectrum(), d, args.nodes)?;
        let check = ef_decay_bound_check(&state, &channel)?;
        Ok(vec![
            num(d),
            num(ef),
            num(environment_mi(&state, &channel)?),
            num(check.avg_branch_entropy),
            num(check.bound),
            check.holds.to_string(),
            num(distillable_after_dephasing(&state, d)?),
        ])
    })?);
    Ok(table)
}

fn cmd_fig2(args: &Fig2Args) -> Result<Table, CliError> {
    let ks = grid("k", &args.k)?
        .into_iter()
        .map(|k| if k >= 1.0 && k.fract() == 0.0 { Ok(k as usize) } else { Err(usage("k", format!("k must be a positive integer, got {k}"))) })
        .collect::<Result<Vec<_>, _>>()?;
    let ratios = positive_grid("r", &args.r)?;
    let mut labelled: Vec<(String, usize)> = ks.iter().map(|k| (k.to_string(), *k)).collect();
    labelled.push(("inf_proxy".into(), INF_PROXY_K));
    let points: Vec<(&str, usize, f64)> =
        labelled.iter().flat_map(|(label, k)| ratios.iter().map(move |&r| (label.as_str(), *k, r))).collect();
    let mut table = Table::new(["k", "r", "mi_bits"]);
    table.extend(rows(&points, |&(label, k, r)| Ok(vec![label.to_owned(), num(r), num(peaks_mi(2.0 * r, 1.0, k))]))?);
    Ok(table)
}

fn cmd_fig3(args: &Fig3Args) -> Result<(Table, Vec<String>), CliError> {
    let targets = positive_grid("b", &args.b)?;
    let xs = grid("x", &args.x)?;
    let zs = grid("z", &args.z)?;
    let mut points: Vec<(f64, &'static str, f64, f64)> = Vec::new();
    let mut skipped = 0usize;
    for &b in &targets {
        for &x in &xs {
            for &z in &zs {
                if x * x + z * z <= 1.0 + 1e-12 {
                    points.push((b, "grid", x, z));
                } else {
                    skipped += 1;
                }
            }
        }
        for &x in xs.iter().filter(|x| x.abs() <= 1.0) {
            points.push((b, "pure", x, (1.0 - x * x).max(0.0).sqrt()));
            points.push((b, "z0", x, 0.0));
        }
    }
    let mut table = Table::new(["b", "series", "x_rho", "z_rho", "rescaled_size"]);
    table.extend(rows(&points, |&(b, series, x, z)| {
        let size = if series == "pure" {
            pure_mic_2peak(x, b, 1.0)?
        } else {
            roof_mic_2peak(&BlochStateXZ::new(x, z, 1.0)?, b)?
        };
        Ok(vec![num(b), series.to_owned(), num(x), num(z), num(size)])
    })?);
    let warnings = if skipped > 0 { vec![format!("skipped {skipped} grid points outside the Bloch disk")] } else { vec![] };
    Ok((table, warnings))
}

fn cmd_verify(args: &VerifyArgs, seed: u64) -> Result<(String, bool), CliError> {
    if args.list {
        let lines: String = SUITES.iter().map(|s| format!("{}\t{}\t{}\n", s.name, s.default_trials, s.about)).collect();
        return Ok((lines, true));
    }
    let name = args.suite.as_deref().unwrap_or_default();
    let reports: Vec<VerifyReport> = if name == "all" {
        SUITES.iter().map(|s| verify::run_suite(s, args.trials.unwrap_or(s.default_trials), seed)).collect()
    } else {
        let suite = verify::find_suite(name).ok_or_else(|| {
            let known: Vec<_> = SUITES.iter().map(|s| s.name).collect();
            usage("suite", format!("unknown suite {name:?}; known: all, {}", known.join(", ")))
        })?;
        vec![verify::run_suite(suite, args.trials.unwrap_or(suite.default_trials), seed)]
    };
    let passed = reports.iter().all(VerifyReport::passed);
    let text = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    }
    .map_err(MacromicError::from)?;
    Ok((text + "\n", passed))
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&table.to_json()).expect("table serializes") + "\n",
    }
}

/// Runs a parsed command and renders its output without touching the filesystem.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let tabled = |t: Table| Output { text: render(&t, cli.format), warnings: vec![], success: true };
    Ok(match &cli.command {
        Command::Mi(a) => tabled(cmd_mi(a)?),
        Command::Mic(a) => tabled(cmd_mic(a)?),
        Command::Roof(a) => tabled(cmd_roof(a, cli.seed)?),
        Command::Discord(a) => tabled(cmd_discord(a)?),
        Command::Fragility(a) => tabled(cmd_fragility(a)?),
        Command::Fig2(a) => tabled(cmd_fig2(a)?),
        Command::Fig3(a) => {
            let (t, warnings) = cmd_fig3(a)?;
            Output { warnings, ..tabled(t) }
        }
        Command::Verify(a) => {
            let (text, success) = cmd_verify(a, cli.seed)?;
            Output { text, warnings: vec![], success }
        }
    })
}

fn flatten_parameters(value: serde_json::Value, prefix: &str, out: &mut BTreeMap<String, String>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
                flatten_parameters(v, &key, out);
            }
        }
        serde_json::Value::Null => {}
        serde_json::Value::String(s) => {
            out.insert(prefix.to_owned(), s);
        }
        other => {
            out.insert(prefix.to_owned(), other.to_string());
        }
    }
}

/// Manifest describing `cli`; parameters are the subcommand's flags, flattened.
pub fn manifest(cli: &Cli, output: &std::path::Path) -> RunManifest {
    let value = match &cli.command {
        Command::Mi(a) => serde_json::to_value(a),
        Command::Mic(a) => serde_json::to_value(a),
        Command::Roof(a) => serde_json::to_value(a),
        Command::Discord(a) => serde_json::to_value(a),
        Command::Fragility(a) => serde_json::to_value(a),
        Command::Fig2(a) => serde_json::to_value(a),
        Command::Fig3(a) => serde_json::to_value(a),
        Command::Verify(a) => serde_json::to_value(a),
    }
    .expect("arguments serialize");
    let mut parameters = BTreeMap::new();
    flatten_parameters(value, "", &mut parameters);
    RunManifest {
        command: cli.command.name().to_owned(),
        parameters,
        seed: cli.seed,
        output_path: output.display().to_string(),
        format: match cli.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        },
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("MACROMIC_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| usage("threads", format!("MACROMIC_THREADS must be a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Failed(format!("cannot start worker threads: {e}")))
}

fn run_parsed(cli: &Cli) -> Result<bool, CliError> {
    let output = thread_pool()?.install(|| execute(cli))?;
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    match &cli.output {
        Some(path) => {
            std::fs::write(path, &output.text).map_err(MacromicError::from)?;
            manifest(cli, path).write()?;
        }
        None => print!("{}", output.text),
    }
    Ok(output.success)
}

/// Parses `args` and runs the command, mapping errors to exit codes.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run_parsed(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn main() -> ExitCode {
    run(std::env::args_os())
}

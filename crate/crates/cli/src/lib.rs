//! Command-line front end for `phasedamp`.
//!
//! Every flag has an environment override named `PHASEDAMP_<FLAG>` with the
//! flag upper-cased and dashes replaced by underscores (`--rank-tol` is
//! `PHASEDAMP_RANK_TOL`). Paths may be `-` for stdin or stdout.

pub mod report;
mod text;

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use phasedamp::channel::{self, ChannelError, ChannelMatrix, DEFAULT_RANK_TOL, DEFAULT_VALIDATION_TOL};
use phasedamp::extremal::{self, ExtremalityError, ExtremalityOptions, DEFAULT_VOLUME_TOL};
use phasedamp::io::{self, Format, ParseError};
use phasedamp::markov::{self, MarkovError, MarkovOptions, MarkovVerdict, DEFAULT_NU_MAX, DEFAULT_PSD_TOL};
use phasedamp::symmetry::{self, SymmetryError, DEFAULT_DFS_TOL};
use phasedamp::Warning;

pub use report::{analyze, AnalysisReport, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

/// Settings shared by all subcommands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Settings {
    /// Validation tolerance (Hermiticity, unit diagonal, eigenvalue floor).
    #[arg(long, global = true, env = "PHASEDAMP_TOL", default_value_t = DEFAULT_VALIDATION_TOL)]
    pub tol: f64,
    /// Relative pivot threshold for the rank-revealing Cholesky.
    #[arg(long, global = true, env = "PHASEDAMP_RANK_TOL", default_value_t = DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    /// Relative threshold below which a Bloch volume counts as zero.
    #[arg(long, global = true, env = "PHASEDAMP_VOLUME_TOL", default_value_t = DEFAULT_VOLUME_TOL)]
    pub volume_tol: f64,
    /// Tolerance for `|D[m][n] − 1|` inside a decoherence-free block.
    #[arg(long, global = true, env = "PHASEDAMP_DFS_TOL", default_value_t = DEFAULT_DFS_TOL)]
    pub dfs_tol: f64,
    /// Eigenvalue tolerance of the positivity tests, relative to the spectral norm.
    #[arg(long, global = true, env = "PHASEDAMP_PSD_TOL", default_value_t = DEFAULT_PSD_TOL)]
    pub psd_tol: f64,
    /// Largest Hadamard root order tested.
    #[arg(long, global = true, env = "PHASEDAMP_NU_MAX", default_value_t = DEFAULT_NU_MAX)]
    pub nu_max: usize,
    /// Seed for every random choice.
    #[arg(long, global = true, env = "PHASEDAMP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, env = "PHASEDAMP_OUTPUT", value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Also group basis states whose coherence has modulus one.
    #[arg(long, global = true, env = "PHASEDAMP_PHASE_TOLERANT")]
    pub phase_tolerant: bool,
    /// Project invalid inputs onto the channel set instead of failing.
    #[arg(long, global = true, env = "PHASEDAMP_REPAIR")]
    pub repair: bool,
    /// Output path.
    #[arg(long, short = 'o', global = true, env = "PHASEDAMP_OUT", default_value = "-")]
    #[serde(skip)]
    pub out: String,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol: DEFAULT_VALIDATION_TOL,
            rank_tol: DEFAULT_RANK_TOL,
            volume_tol: DEFAULT_VOLUME_TOL,
            dfs_tol: DEFAULT_DFS_TOL,
            psd_tol: DEFAULT_PSD_TOL,
            nu_max: DEFAULT_NU_MAX,
            seed: 0,
            output: OutputFormat::Json,
            phase_tolerant: false,
            repair: false,
            out: "-".into(),
        }
    }
}

impl Settings {
    pub fn check(&self) -> Result<(), CliError> {
        for (name, v) in [
            ("--tol", self.tol),
            ("--rank-tol", self.rank_tol),
            ("--volume-tol", self.volume_tol),
            ("--dfs-tol", self.dfs_tol),
            ("--psd-tol", self.psd_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.nu_max < 2 {
            return Err(CliError::Config(format!("--nu-max must be at least 2, got {}", self.nu_max)));
        }
        Ok(())
    }

    pub fn markov_options(&self) -> MarkovOptions {
        MarkovOptions { nu_max: self.nu_max, psd_tol: self.psd_tol, rank_tol: self.rank_tol, ..Default::default() }
    }

    pub fn extremality_options(&self) -> ExtremalityOptions {
        ExtremalityOptions { rank_tol: self.rank_tol, volume_tol: self.volume_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the channel invariants and print the measured defects.
    Validate { input: String },
    /// Dynamical vectors and diagonal Kraus operators.
    Factor { input: String },
    /// Markov compatibility through Hadamard divisibility.
    Markov { input: String },
    /// Extremality through the Bloch-vector volume criterion.
    Extremal { input: String },
    /// Decoherence-free block partition.
    Dfs {
        input: String,
        /// Also test invariance under all permutations of this many qubits.
        #[arg(long)]
        qubits: Option<usize>,
    },
    /// Permutation-symmetric multi-qubit channel from one vector per excitation number.
    Symmetric { spec: String },
    /// Channel of a controlled-unitary environment model, with its extremality verdict.
    Simulate {
        /// Model file; omit with --example.
        model: Option<String>,
        /// Use the built-in two-qubit model.
        #[arg(long, conflicts_with = "model")]
        example: bool,
    },
    /// Lindblad data from a channel, or a channel from Lindblad data.
    Lindblad {
        input: String,
        /// Snapshot time when the input is Lindblad data.
        #[arg(long, default_value_t = 1.0)]
        time: f64,
    },
    /// Random channels of a given dimension and rank.
    Generate {
        #[arg(long)]
        dimension: usize,
        #[arg(long)]
        rank: usize,
        /// Number of channels; more than one requires --out-dir.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Full pipeline over files and directories of channels.
    Analyze {
        #[arg(required = true)]
        inputs: Vec<String>,
    },
}

#[derive(Debug, Clone, Parser)]
#[command(name = "phasedamp", version, about = "Analysis and synthesis of phase-damping channels")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {error}")]
    Parse { path: String, error: ParseError },
    #[error("{path}: invalid channel: {error}")]
    Validation { path: String, error: ChannelError },
    #[error("{0}")]
    Analysis(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Analysis(_) => 1,
            CliError::Config(_) => 2,
            CliError::Parse { .. } => 3,
            CliError::Validation { .. } => 4,
        }
    }
}

macro_rules! analysis_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Analysis(e.to_string())
            }
        }
    )*};
}

analysis_error!(MarkovError, ExtremalityError, SymmetryError);

/// Rendered output and the process exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub status: u8,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self { output, status: 0 }
    }
}

pub fn read_input(path: &str) -> Result<String, CliError> {
    let io_err = |source| CliError::Io { path: path.to_string(), source };
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

pub fn write_output(path: &str, text: &str) -> Result<(), CliError> {
    if path == "-" {
        print!("{text}");
        Ok(())
    } else {
        fs::write(path, text).map_err(|source| CliError::Io { path: path.to_string(), source })
    }
}

fn format_of(path: &str, text: &str) -> Format {
    if path == "-" {
        Format::sniff(text)
    } else {
        Format::from_path(path)
    }
}

pub fn parse_matrix(path: &str, text: &str) -> Result<phasedamp::CMatrix, CliError> {
    io::parse_channel(text, format_of(path, text)).map_err(|error| CliError::Parse { path: path.into(), error })
}

/// Validates `m`, or repairs it when `settings.repair` is set.
pub fn checked_channel(
    path: &str,
    m: &phasedamp::CMatrix,
    settings: &Settings,
) -> Result<(ChannelMatrix, Vec<Warning>), CliError> {
    match channel::validate_channel(m, settings.tol) {
        Ok(d) => Ok((d, Vec::new())),
        Err(error) if settings.repair && !matches!(error, ChannelError::NotSquare { .. } | ChannelError::NonFinite { .. }) => {
            let fixed = channel::repair_channel(m).map_err(|error| CliError::Validation { path: path.into(), error })?;
            Ok((fixed.channel, vec![Warning::Repaired { distance: fixed.distance }]))
        }
        Err(error) => Err(CliError::Validation { path: path.into(), error }),
    }
}

pub fn load_channel(path: &str, settings: &Settings) -> Result<(ChannelMatrix, Vec<Warning>), CliError> {
    let text = read_input(path)?;
    let m = parse_matrix(path, &text)?;
    checked_channel(path, &m, settings)
}

fn parsed<T>(path: &str, r: Result<T, ParseError>) -> Result<T, CliError> {
    r.map_err(|error| CliError::Parse { path: path.into(), error })
}

pub fn markov_to_value(v: &MarkovVerdict) -> Value {
    json!({
        "verdict": v.verdict,
        "failing_nu": v.failing_nu,
        "min_eigenvalue": v.min_eigenvalue,
        "limit_min_eigenvalue": v.limit_min_eigenvalue,
        "generator": v.generator.as_ref().map(|g| io::matrix_to_value(g.matrix())),
        "zero_entries": v.zero_entries,
        "warnings": v.warnings,
    })
}

fn with_warnings(mut v: Value, extra: Vec<Warning>) -> Value {
    if extra.is_empty() {
        return v;
    }
    let obj = v.as_object_mut().expect("report objects");
    let list = obj.entry("warnings").or_insert_with(|| json!([]));
    let list = list.as_array_mut().expect("warnings is an array");
    let mut all: Vec<Value> = extra.iter().map(|w| serde_json::to_value(w).expect("serializable")).collect();
    all.append(list);
    *list = all;
    v
}

fn render(v: &Value, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("finite values serialize");
            s.push('\n');
            s
        }
        OutputFormat::Text => text::render(v),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Executes one subcommand and renders its result.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let s = &config.settings;
    s.check()?;
    let value = match &config.command {
        Command::Validate { input } => {
            let text = read_input(input)?;
            let m = parse_matrix(input, &text)?;
            let summary = channel::inspect_channel(&m).map_err(|error| CliError::Validation { path: input.clone(), error });
            let summary = summary?;
            return match checked_channel(input, &m, s) {
                Ok((d, warnings)) => {
                    let mut v = json!({"valid": true, "summary": summary});
                    if s.repair && !warnings.is_empty() {
                        v["channel"] = io::channel_to_value(d.matrix());
                    }
                    Ok(Outcome::ok(render(&with_warnings(v, warnings), s.output)))
                }
                Err(CliError::Validation { error, .. }) => {
                    let v = json!({"valid": false, "summary": summary, "error": error.to_string()});
                    Ok(Outcome { output: render(&v, s.output), status: 4 })
                }
                Err(e) => Err(e),
            };
        }
        Command::Factor { input } => {
            let (d, warnings) = load_channel(input, s)?;
            let v = channel::cholesky_vectors(&d, s.rank_tol).map_err(|error| CliError::Validation { path: input.clone(), error })?;
            let a = v.components();
            let value = json!({
                "dimension": d.dimension(),
                "rank": v.ambient_dimension(),
                "rank_tol": s.rank_tol,
                "normalization_residual": v.normalization_residual(),
                "vectors": v.vectors().map(|x| io::vector_to_value(&x)).collect::<Vec<_>>(),
                "kraus_diagonals": (0..a.nrows()).map(|i| io::vector_to_value(&a.row(i).transpose())).collect::<Vec<_>>(),
            });
            with_warnings(value, warnings)
        }
        Command::Markov { input } => {
            let (d, warnings) = load_channel(input, s)?;
            with_warnings(markov_to_value(&markov::divisibility_test(&d, &s.markov_options())), warnings)
        }
        Command::Extremal { input } => {
            let (d, warnings) = load_channel(input, s)?;
            let verdict = extremal::extremality_test(&d, &s.extremality_options())?;
            let mut v = to_value(&verdict);
            v["abs_volume"] = json!(verdict.volume.map(f64::abs));
            with_warnings(v, warnings)
        }
        Command::Dfs { input, qubits } => {
            let (d, warnings) = load_channel(input, s)?;
            let report = symmetry::detect_dfs(&d, s.dfs_tol, s.phase_tolerant);
            let mut v = to_value(&report);
            if let Some(q) = qubits {
                v["permutation_invariant"] = json!(symmetry::permutation_invariance_check(&d, *q, s.dfs_tol)?);
            }
            with_warnings(v, warnings)
        }
        Command::Symmetric { spec } => {
            let text = read_input(spec)?;
            let spec_value = parsed(spec, io::parse_symmetry_spec(&text))?;
            io::channel_to_value(symmetry::symmetric_channel(&spec_value)?.matrix())
        }
        Command::Simulate { model, example } => {
            let m = match (model, example) {
                (_, true) => extremal::EnvironmentModel::qubit_example(),
                (Some(path), false) => parsed(path, io::parse_environment_model(&read_input(path)?))?,
                (None, false) => return Err(CliError::Config("simulate needs a model file or --example".into())),
            };
            let (d, vectors) = extremal::build_controlled_unitary_model(&m)?;
            let verdict = extremal::extremality_test(&d, &s.extremality_options())?;
            json!({
                "channel": io::channel_to_value(d.matrix()),
                "vectors": vectors.vectors().map(|x| io::vector_to_value(&x)).collect::<Vec<_>>(),
                "extremality": verdict,
            })
        }
        Command::Lindblad { input, time } => {
            let text = read_input(input)?;
            let is_data = serde_json::from_str::<Value>(&text).ok().is_some_and(|v| v.get("frequencies").is_some());
            if is_data {
                let data = parsed(input, io::parse_lindblad(&text))?;
                let z = markov::generator_from_lindblad(&data);
                let d = markov::snapshot(&z, *time)?;
                let states = markov::coherent_states_from_lindblad(&data, *time)?;
                json!({
                    "time": time,
                    "generator": io::matrix_to_value(z.matrix()),
                    "channel": io::channel_to_value(d.matrix()),
                    "coherent_states": states.labels.iter().map(|l| json!({
                        "phase": io::complex_to_value(l.phase),
                        "centroid": io::vector_to_value(&l.centroid),
                    })).collect::<Vec<_>>(),
                })
            } else {
                let m = parse_matrix(input, &text)?;
                let (d, warnings) = checked_channel(input, &m, s)?;
                let data = markov::lindblad_from_channel(&d, &s.markov_options())?;
                with_warnings(io::lindblad_to_value(&data), warnings)
            }
        }
        Command::Generate { dimension, rank, count, out_dir } => {
            let make = |i: u64| {
                channel::random_channel(*dimension, *rank, s.seed.wrapping_add(i))
                    .map_err(|e| CliError::Config(e.to_string()))
            };
            match (count, out_dir) {
                (1, None) => io::channel_to_value(make(0)?.matrix()),
                (_, Some(dir)) => {
                    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
                    let width = count.to_string().len().max(3);
                    let mut written = Vec::new();
                    for i in 0..*count {
                        let path = dir.join(format!("channel-{i:0width$}.json"));
                        let body = io::write_channel(make(i as u64)?.matrix());
                        fs::write(&path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
                        written.push(path.display().to_string());
                    }
                    json!({"written": written})
                }
                (_, None) => return Err(CliError::Config("--count above 1 needs --out-dir".into())),
            }
        }
        Command::Analyze { inputs } => {
            let files = expand_inputs(inputs)?;
            let report = report::analyze(&files, s);
            let status = if report.records.iter().any(|r| r.error.is_some()) { 4 } else { 0 };
            return Ok(Outcome { output: render(&to_value(&report), s.output), status });
        }
    };
    Ok(Outcome::ok(render(&value, s.output)))
}

/// Files as given; directories contribute their `.json` and `.csv` entries
/// sorted by file name.
pub fn expand_inputs(inputs: &[String]) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for input in inputs {
        let p = Path::new(input);
        if input != "-" && p.is_dir() {
            let io_err = |source| CliError::Io { path: input.clone(), source };
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .map_err(io_err)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|path| {
                    path.is_file()
                        && path.extension().and_then(|e| e.to_str()).is_some_and(|e| {
                            e.eq_ignore_ascii_case("json") || e.eq_ignore_ascii_case("csv")
                        })
                })
                .collect();
            entries.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
            out.extend(entries.into_iter().map(|e| e.display().to_string()));
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

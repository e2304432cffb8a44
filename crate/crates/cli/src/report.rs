//! The `analyze` pipeline: validate, factor, Markov test, extremality, DFS.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use phasedamp::channel::{self, ValidationSummary};
use phasedamp::extremal::{self, ExtremalityVerdict};
use phasedamp::markov;
use phasedamp::symmetry::{self, DfsReport};
use phasedamp::Warning;

use crate::{checked_channel, markov_to_value, parse_matrix, read_input, CliError, Settings};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub input: String,
    /// First failure; later stages are absent when set.
    pub error: Option<String>,
    pub validation: Option<ValidationSummary>,
    pub rank: Option<usize>,
    pub markov: Option<Value>,
    pub extremality: Option<ExtremalityVerdict>,
    pub dfs: Option<DfsReport>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub version: &'static str,
    pub config: Settings,
    /// One record per input, in input order.
    pub records: Vec<Record>,
}

fn analyze_one(path: &str, settings: &Settings) -> Record {
    let mut record = Record {
        input: path.to_string(),
        error: None,
        validation: None,
        rank: None,
        markov: None,
        extremality: None,
        dfs: None,
        warnings: Vec::new(),
    };
    if let Err(e) = pipeline(path, settings, &mut record) {
        record.error = Some(e.to_string());
    }
    record
}

fn pipeline(path: &str, s: &Settings, record: &mut Record) -> Result<(), CliError> {
    let m = parse_matrix(path, &read_input(path)?)?;
    record.validation =
        Some(channel::inspect_channel(&m).map_err(|error| CliError::Validation { path: path.into(), error })?);
    let (d, warnings) = checked_channel(path, &m, s)?;
    record.warnings.extend(warnings);

    let vectors = channel::cholesky_vectors(&d, s.rank_tol).map_err(|error| CliError::Validation { path: path.into(), error })?;
    record.rank = Some(vectors.ambient_dimension());

    let verdict = markov::divisibility_test(&d, &s.markov_options());
    record.warnings.extend(verdict.warnings.iter().cloned());
    record.markov = Some(markov_to_value(&verdict));

    let ext = extremal::extremality_test(&d, &s.extremality_options())?;
    record.warnings.extend(ext.warnings.iter().cloned());
    record.extremality = Some(ext);

    let dfs = symmetry::detect_dfs(&d, s.dfs_tol, s.phase_tolerant);
    record.warnings.extend(dfs.warnings.iter().cloned());
    record.dfs = Some(dfs);
    Ok(())
}

/// Runs the pipeline on every input concurrently; records keep input order.
pub fn analyze(inputs: &[String], settings: &Settings) -> AnalysisReport {
    let records = inputs.par_iter().map(|p| analyze_one(p, settings)).collect();
    AnalysisReport { version: env!("CARGO_PKG_VERSION"), config: settings.clone(), records }
}

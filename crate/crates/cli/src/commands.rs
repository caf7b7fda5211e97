use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use tfd_core::bipartite::StateFile;
use tfd_core::{
    hermitian_eig, purify, reduced_density, schmidt_decompose, thermal_spectrum,
    thermofield_double, verify_equivalence, Beta, BipartitePureState, DensityMatrix, ModelSpec,
    Operator, ThermalReport,
};

use crate::config::{indexed_path, read_matrix, resolve_observable, OutputFormat};
use crate::report::{to_json, CsvTable};

/// Process exit status: 0 success, 1 residual above tolerance, 2 bad input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    ToleranceExceeded = 1,
}

pub struct Outcome {
    pub body: Vec<u8>,
    pub status: Status,
}

impl Outcome {
    fn ok(body: Vec<u8>) -> Self {
        Self {
            body,
            status: Status::Ok,
        }
    }
}

#[derive(Serialize)]
struct SpectrumOutput<'a> {
    model: &'a ModelSpec,
    dim: usize,
    eigenvalues: Vec<f64>,
}

pub fn spectrum(model: &ModelSpec, format: OutputFormat) -> Result<Outcome> {
    let h = model.build()?;
    let eigenvalues = hermitian_eig(&h)?.eigenvalues;
    let body = match format {
        OutputFormat::Json => to_json(&SpectrumOutput {
            model,
            dim: h.dim(),
            eigenvalues,
        })?,
        OutputFormat::Csv => {
            let mut t = CsvTable::default();
            t.list(None, "eigenvalue", &eigenvalues);
            t.to_bytes()?
        }
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    model: &'a ModelSpec,
    tolerance: f64,
    within_tolerance: bool,
    reports: Vec<ThermalReport>,
}

pub fn verify(
    model: &ModelSpec,
    observable: &str,
    betas: &[Beta],
    tolerance: f64,
    format: OutputFormat,
) -> Result<Outcome> {
    let h = model.build()?;
    let f = resolve_observable(observable, &h)?;
    let reports = betas
        .iter()
        .map(|&beta| verify_equivalence(&h, beta, &f, observable))
        .collect::<tfd_core::Result<Vec<_>>>()?;
    let within_tolerance = reports.iter().all(|r| r.residual <= tolerance);
    for r in reports.iter().filter(|r| r.residual > tolerance) {
        eprintln!(
            "residual {:e} at beta {} exceeds tolerance {:e}",
            r.residual, r.beta, tolerance
        );
    }

    let body = match format {
        OutputFormat::Json => to_json(&VerifyOutput {
            model,
            tolerance,
            within_tolerance,
            reports,
        })?,
        OutputFormat::Csv => {
            let mut t = CsvTable::default();
            for r in &reports {
                let b = Some(r.beta);
                t.scalar(b, "trace_average", r.trace_average);
                t.scalar(b, "doubled_expectation", r.doubled_expectation);
                t.scalar(b, "residual", r.residual);
                t.scalar(b, "entropy", r.entropy);
                t.list(b, "schmidt_coefficient", &r.schmidt_coefficients);
            }
            t.to_bytes()?
        }
    };
    Ok(Outcome {
        body,
        status: if within_tolerance {
            Status::Ok
        } else {
            Status::ToleranceExceeded
        },
    })
}

#[derive(Serialize)]
struct TfdEntry {
    beta: f64,
    log_partition: f64,
    entropy: f64,
    schmidt_coefficients: Vec<f64>,
}

#[derive(Serialize)]
struct TfdOutput<'a> {
    model: &'a ModelSpec,
    reports: Vec<TfdEntry>,
}

pub fn tfd(
    model: &ModelSpec,
    betas: &[Beta],
    emit_state: Option<&Path>,
    format: OutputFormat,
) -> Result<Outcome> {
    let h = model.build()?;
    let mut entries = Vec::with_capacity(betas.len());
    for (index, &beta) in betas.iter().enumerate() {
        let state = thermofield_double(&h, beta)?;
        let schmidt = schmidt_decompose(&state)?;
        if let Some(base) = emit_state {
            write_state(&indexed_path(base, index, betas.len()), &state)?;
        }
        entries.push(TfdEntry {
            beta: beta.value(),
            log_partition: thermal_spectrum(&h, beta)?.log_partition,
            entropy: schmidt.entropy(),
            schmidt_coefficients: schmidt.coefficients,
        });
    }
    let body = match format {
        OutputFormat::Json => to_json(&TfdOutput {
            model,
            reports: entries,
        })?,
        OutputFormat::Csv => {
            let mut t = CsvTable::default();
            for e in &entries {
                let b = Some(e.beta);
                t.scalar(b, "log_partition", e.log_partition);
                t.scalar(b, "entropy", e.entropy);
                t.list(b, "schmidt_coefficient", &e.schmidt_coefficients);
            }
            t.to_bytes()?
        }
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct PurifyOutput {
    dim: usize,
    roundtrip_residual: f64,
    tolerance: f64,
    entropy: f64,
    schmidt_coefficients: Vec<f64>,
    state: StateFile,
}

pub fn purify_file(
    input: &Path,
    tolerance: f64,
    emit_state: Option<&Path>,
    format: OutputFormat,
) -> Result<Outcome> {
    let matrix = read_matrix(input)?;
    let rho = DensityMatrix::new(Operator::new(matrix)?)
        .with_context(|| format!("{} is not a valid density matrix", input.display()))?;
    let state = purify(&rho)?;
    let roundtrip_residual = reduced_density(&state)?.distance(&rho);
    let schmidt = schmidt_decompose(&state)?;
    if let Some(path) = emit_state {
        write_state(path, &state)?;
    }
    let status = if roundtrip_residual <= tolerance {
        Status::Ok
    } else {
        eprintln!("round-trip residual {roundtrip_residual:e} exceeds tolerance {tolerance:e}");
        Status::ToleranceExceeded
    };

    let body = match format {
        OutputFormat::Json => to_json(&PurifyOutput {
            dim: rho.dim(),
            roundtrip_residual,
            tolerance,
            entropy: schmidt.entropy(),
            schmidt_coefficients: schmidt.coefficients,
            state: state.into(),
        })?,
        OutputFormat::Csv => {
            let mut t = CsvTable::default();
            t.scalar(None, "roundtrip_residual", roundtrip_residual);
            t.scalar(None, "entropy", schmidt.entropy());
            t.list(None, "schmidt_coefficient", &schmidt.coefficients);
            t.to_bytes()?
        }
    };
    Ok(Outcome { body, status })
}

#[derive(Serialize)]
struct SchmidtOutput {
    dim_a: usize,
    dim_b: usize,
    rank: usize,
    entropy: f64,
    coefficients: Vec<f64>,
}

pub fn schmidt_file(input: &Path, format: OutputFormat) -> Result<Outcome> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let state: BipartitePureState = serde_json::from_str(&text)
        .with_context(|| format!("parsing state file {}", input.display()))?;
    let r = schmidt_decompose(&state)?;
    let entropy = r.entropy();
    let body = match format {
        OutputFormat::Json => to_json(&SchmidtOutput {
            dim_a: state.dim_a(),
            dim_b: state.dim_b(),
            rank: r.rank,
            entropy,
            coefficients: r.coefficients,
        })?,
        OutputFormat::Csv => {
            let mut t = CsvTable::default();
            t.scalar(None, "rank", r.rank as f64);
            t.scalar(None, "entropy", entropy);
            t.list(None, "schmidt_coefficient", &r.coefficients);
            t.to_bytes()?
        }
    };
    Ok(Outcome::ok(body))
}

fn write_state(path: &Path, state: &BipartitePureState) -> Result<()> {
    let body = to_json(state)?;
    fs::write(path, body).with_context(|| format!("writing state to {}", path.display()))
}

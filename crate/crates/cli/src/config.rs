use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use tfd_core::models::{pauli_x, pauli_z, site_operator, total_magnetization};
use tfd_core::{Beta, ComplexMatrix, ModelSpec, Operator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// `--model` accepts either inline JSON or a path to a JSON file.
pub fn load_model(arg: &str, seed: Option<u64>) -> Result<ModelSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading model file {arg}"))?
    };
    let spec = ModelSpec::from_json(&text).context("parsing model spec")?;
    Ok(match seed {
        Some(seed) => spec.with_seed(seed),
        None => spec,
    })
}

/// Parses a comma-separated list of inverse temperatures.
pub fn parse_betas(arg: &str, allow_negative: bool) -> Result<Vec<Beta>> {
    let mut betas = Vec::new();
    for piece in arg.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let value: f64 = piece
            .parse()
            .with_context(|| format!("beta value {piece:?} is not a number"))?;
        let beta = if allow_negative {
            Beta::allow_negative(value)
        } else {
            Beta::new(value)
        };
        betas.push(beta.with_context(|| format!("beta value {piece}"))?);
    }
    if betas.is_empty() {
        bail!("--beta needs at least one value");
    }
    Ok(betas)
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let m: ComplexMatrix = serde_json::from_str(&text)
        .with_context(|| format!("parsing matrix file {}", path.display()))?;
    Ok(m)
}

/// Resolves a named observable for the given model, or loads a matrix file.
///
/// Names: `identity`, `energy`, `number`, `magnetization`, `site_z:<k>`, `site_x:<k>`.
pub fn resolve_observable(name: &str, h: &Operator) -> Result<Operator> {
    let dim = h.dim();
    let qubits = || -> Result<usize> {
        if !dim.is_power_of_two() {
            bail!("observable {name:?} needs a spin chain, model dimension {dim} is not a power of two");
        }
        Ok(dim.trailing_zeros() as usize)
    };
    let site = |spec: &str| -> Result<usize> {
        spec.parse()
            .with_context(|| format!("site index {spec:?} in observable {name:?}"))
    };
    let op = match name {
        "identity" => Operator::identity(dim),
        "energy" => h.clone(),
        "number" => Operator::from_real_diagonal(&(0..dim).map(|n| n as f64).collect::<Vec<_>>()),
        "magnetization" => total_magnetization(qubits()?)?,
        _ => {
            if let Some(k) = name.strip_prefix("site_z:") {
                site_operator(qubits()?, site(k)?, &pauli_z())?
            } else if let Some(k) = name.strip_prefix("site_x:") {
                site_operator(qubits()?, site(k)?, &pauli_x())?
            } else {
                let path = Path::new(name);
                if !path.exists() {
                    bail!("unknown observable {name:?} (not a builder name and no such file)");
                }
                Operator::new(read_matrix(path)?)?
            }
        }
    };
    Ok(op)
}

/// Destination of the `index`-th emitted state out of `count`.
pub fn indexed_path(base: &Path, index: usize, count: usize) -> PathBuf {
    if count == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("state");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{index}.{ext}"),
        None => format!("{stem}_{index}"),
    };
    base.with_file_name(name)
}

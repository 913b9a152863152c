//! Problem files: a small TOML document with the point labels, the
//! Lagrangian rows, the multiplier and optional potential/initial data.
//! Parsing yields positioned errors; rendering uses 17 significant digits so
//! values round-trip exactly.

use cvp_core::{
    InitialData, LagrangianMatrix, Measure, PointSpace, Potential, ProblemInstance,
};
use nalgebra::DVector;
use serde::Deserialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    labels: Vec<String>,
    lagrangian: Vec<Vec<f64>>,
    s: Option<f64>,
    potential: Option<Vec<f64>>,
    initial_measure: Option<Vec<f64>>,
    initial_set: Option<Vec<String>>,
}

/// Parse failure with source position, or a validation failure from the
/// domain types.
#[derive(Debug)]
pub enum ParseError {
    Syntax { line: usize, column: usize, message: String },
    Validation(String),
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Syntax { line, column, message } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            Self::Validation(message) => write!(f, "validation error: {message}"),
        }
    }
}

impl std::error::Error for ParseError {}

fn position(input: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut column = 1;
    for (i, ch) in input.char_indices() {
        if i >= offset {
            break;
        }
        if ch == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

/// Parses and validates a problem file.
pub fn parse_problem(bytes: &[u8]) -> Result<ProblemInstance, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseError::Syntax {
        line: 1,
        column: 1,
        message: format!("file is not valid UTF-8: {e}"),
    })?;
    let file: ProblemFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|span| position(text, span.start))
            .unwrap_or((1, 1));
        let message = e.message().to_string();
        ParseError::Syntax { line, column, message }
    })?;
    build_instance(file).map_err(|e| ParseError::Validation(e.to_string()))
}

fn build_instance(file: ProblemFile) -> cvp_core::Result<ProblemInstance> {
    let space = PointSpace::new(file.labels)?;
    let lagrangian = LagrangianMatrix::from_rows(&file.lagrangian)?;
    let mut instance = ProblemInstance::new(space, lagrangian, file.s.unwrap_or(1.0))?;
    if let Some(values) = file.potential {
        instance = instance.with_potential(Potential::new(DVector::from_vec(values))?)?;
    }
    let has_initial = file.initial_measure.is_some() || file.initial_set.is_some();
    if has_initial {
        let n = instance.n();
        let rho0 = match file.initial_measure {
            Some(values) => Measure::new(DVector::from_vec(values))?,
            None => Measure::zeros(n),
        };
        if rho0.n() != n {
            return Err(cvp_core::Error::DimensionMismatch {
                what: "initial measure",
                expected: n,
                found: rho0.n(),
            });
        }
        let mut set = Vec::new();
        for label in file.initial_set.unwrap_or_default() {
            let idx = instance.space().index_of(&label).ok_or(
                cvp_core::Error::DuplicateLabel(format!("unknown initial-set label {label}")),
            )?;
            set.push(idx);
        }
        instance = instance.with_initial(InitialData::new(rho0, &set)?)?;
    }
    Ok(instance)
}

/// 17 significant digits; round-trips every finite f64.
pub fn fmt17(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v }; // normalize -0.0
    format!("{v:.16e}")
}

fn fmt_list(values: impl Iterator<Item = f64>) -> String {
    let parts: Vec<String> = values.map(fmt17).collect();
    format!("[{}]", parts.join(", "))
}

/// Renders an instance as a problem file. `parse_problem ∘ render_problem`
/// is the identity.
pub fn render_problem(instance: &ProblemInstance) -> String {
    let mut out = String::new();
    let labels: Vec<String> = instance
        .space()
        .labels()
        .iter()
        .map(|l| format!("{l:?}"))
        .collect();
    out.push_str(&format!("labels = [{}]\n", labels.join(", ")));
    out.push_str("lagrangian = [\n");
    let l = instance.lagrangian().entries();
    for i in 0..instance.n() {
        out.push_str(&format!(
            "  {},\n",
            fmt_list((0..instance.n()).map(|j| l[(i, j)]))
        ));
    }
    out.push_str("]\n");
    out.push_str(&format!("s = {}\n", fmt17(instance.s())));
    if let Some(phi) = instance.potential() {
        out.push_str(&format!(
            "potential = {}\n",
            fmt_list(phi.values().iter().copied())
        ));
    }
    if let Some(initial) = instance.initial() {
        out.push_str(&format!(
            "initial_measure = {}\n",
            fmt_list(initial.rho0().weights().iter().copied())
        ));
        if !initial.set().is_empty() {
            let labels: Vec<String> = initial
                .set()
                .iter()
                .map(|&i| format!("{:?}", instance.space().labels()[i]))
                .collect();
            out.push_str(&format!("initial_set = [{}]\n", labels.join(", ")));
        }
    }
    out
}

/// Content hash of the input bytes, for result provenance.
pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let mut hex = String::with_capacity(64);
    for b in hash {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

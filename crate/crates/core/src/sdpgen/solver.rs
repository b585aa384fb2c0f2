//! External solver subprocess protocol: command templates with {input} and
//! {output} placeholders, per-family output parsing, and solution recovery
//! for the bundled driver's format.

use crate::sosmodel::VarId;
use std::collections::HashMap;
use std::path::Path;
use std::process::Command;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver executable not found: {0}")]
    NotFound(String),
    #[error("solver did not converge: status {0}")]
    Nonconvergence(String),
    #[error("could not parse solver output: {0}")]
    Unparsable(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Solver output dialects understood by the client.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverFamily {
    /// the bundled driver: `status = ...`, `objective_primal/dual = ...`,
    /// plus `y <block> <i> <j> <value>` solution lines in the output file
    Internal,
    /// CSDP stdout: `Primal objective value:` / `Dual objective value:`
    Csdp,
    /// SDPA output file: `objValPrimal = ` / `objValDual = ` / `phase.value`
    Sdpa,
}

#[derive(Clone, Debug)]
pub struct SolverSpec {
    /// e.g. "/path/to/sdpsolve {input} {output}" or "csdp {input} {output}"
    pub command: String,
    pub family: SolverFamily,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Inaccurate,
}

/// Recovered variable values from the bundled driver (absent for external
/// solver families).
#[derive(Clone, Default)]
pub struct SolutionDump {
    pub entries: HashMap<VarId, f64>,
}

impl SolutionDump {
    pub fn get(&self, v: &VarId) -> f64 {
        self.entries.get(v).copied().unwrap_or(0.0)
    }
}

#[derive(Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// multiplier-side objective (upper side at optimum)
    pub primal: f64,
    /// block-variable-side objective: the safe bound for our maximization
    pub dual: f64,
    pub iterations: Option<u32>,
    pub solution: Option<SolutionDump>,
    pub raw_log: String,
}

impl SolveOutcome {
    /// The value to report as the relaxation bound.
    pub fn bound(&self) -> f64 {
        self.dual
    }
}

/// Runs the solver on an emitted problem file and parses the result.
pub fn solve_external(
    input: &Path,
    output: &Path,
    spec: &SolverSpec,
) -> Result<SolveOutcome, SolverError> {
    let parts: Vec<String> = spec
        .command
        .split_whitespace()
        .map(|tok| {
            tok.replace("{input}", &input.to_string_lossy())
                .replace("{output}", &output.to_string_lossy())
        })
        .collect();
    if parts.is_empty() {
        return Err(SolverError::NotFound(String::new()));
    }
    let out = Command::new(&parts[0]).args(&parts[1..]).output().map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            SolverError::NotFound(parts[0].clone())
        } else {
            SolverError::Io(e)
        }
    })?;
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    let stderr = String::from_utf8_lossy(&out.stderr).to_string();
    let file_text = std::fs::read_to_string(output).unwrap_or_default();
    let log = format!("{}\n{}\n{}", stdout, stderr, file_text);
    match spec.family {
        SolverFamily::Internal => parse_internal(&file_text, log),
        SolverFamily::Csdp => parse_csdp(&stdout, log),
        SolverFamily::Sdpa => parse_sdpa(&file_text, log),
    }
}

fn grab_value(text: &str, key: &str) -> Option<f64> {
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix(key) {
            let rest = rest.trim_start_matches([' ', '=', ':']);
            if let Ok(v) = rest.trim().parse::<f64>() {
                return Some(v);
            }
        }
    }
    None
}

fn parse_internal(text: &str, raw_log: String) -> Result<SolveOutcome, SolverError> {
    let status_line = text
        .lines()
        .find_map(|l| l.trim().strip_prefix("status ="))
        .ok_or_else(|| SolverError::Unparsable("missing status".into()))?
        .trim()
        .to_string();
    let status = match status_line.as_str() {
        "OPTIMAL" => SolveStatus::Optimal,
        "OPTIMAL_INACCURATE" => SolveStatus::Inaccurate,
        other => return Err(SolverError::Nonconvergence(other.to_string())),
    };
    let primal = grab_value(text, "objective_primal")
        .ok_or_else(|| SolverError::Unparsable("missing objective_primal".into()))?;
    let dual = grab_value(text, "objective_dual")
        .ok_or_else(|| SolverError::Unparsable("missing objective_dual".into()))?;
    let iterations = grab_value(text, "iterations").map(|v| v as u32);
    let mut entries = HashMap::new();
    for line in text.lines() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() == 5 && toks[0] == "y" {
            let parse = |t: &str| -> Result<usize, SolverError> {
                t.parse().map_err(|_| SolverError::Unparsable(line.into()))
            };
            let var = VarId {
                block: parse(toks[1])? - 1,
                i: parse(toks[2])? - 1,
                j: parse(toks[3])? - 1,
            };
            let v: f64 = toks[4]
                .parse()
                .map_err(|_| SolverError::Unparsable(line.into()))?;
            entries.insert(var, v);
        }
    }
    Ok(SolveOutcome {
        status,
        primal,
        dual,
        iterations,
        solution: Some(SolutionDump { entries }),
        raw_log,
    })
}

fn parse_csdp(stdout: &str, raw_log: String) -> Result<SolveOutcome, SolverError> {
    // CSDP's primal (max tr(CX)) is the block-variable side of our program
    let primal_side = grab_value(stdout, "Primal objective value")
        .ok_or_else(|| SolverError::Unparsable("missing primal value".into()))?;
    let dual_side = grab_value(stdout, "Dual objective value")
        .ok_or_else(|| SolverError::Unparsable("missing dual value".into()))?;
    let ok = stdout.contains("SDP solved");
    if !ok {
        return Err(SolverError::Nonconvergence("csdp did not report success".into()));
    }
    let iterations = stdout
        .lines()
        .filter(|l| l.trim_start().starts_with("Iter:"))
        .count() as u32;
    Ok(SolveOutcome {
        status: SolveStatus::Optimal,
        primal: dual_side,
        dual: primal_side,
        iterations: Some(iterations),
        solution: None,
        raw_log,
    })
}

fn parse_sdpa(text: &str, raw_log: String) -> Result<SolveOutcome, SolverError> {
    let phase = text
        .lines()
        .find_map(|l| l.trim().strip_prefix("phase.value"))
        .map(|s| s.trim_start_matches([' ', '=']).trim().to_string())
        .ok_or_else(|| SolverError::Unparsable("missing phase.value".into()))?;
    let status = match phase.as_str() {
        "pdOPT" => SolveStatus::Optimal,
        "pdFEAS" | "pFEAS" | "dFEAS" => SolveStatus::Inaccurate,
        other => return Err(SolverError::Nonconvergence(other.to_string())),
    };
    let primal = grab_value(text, "objValPrimal")
        .ok_or_else(|| SolverError::Unparsable("missing objValPrimal".into()))?;
    let dual = grab_value(text, "objValDual")
        .ok_or_else(|| SolverError::Unparsable("missing objValDual".into()))?;
    Ok(SolveOutcome {
        status,
        primal,
        dual,
        iterations: grab_value(text, "iteration").map(|v| v as u32),
        solution: None,
        raw_log,
    })
}

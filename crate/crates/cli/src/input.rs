use std::fs;
use std::path::Path;

use entanglia::numkernel::{CMatrix, MatrixDoc, C64};
use entanglia::qstate::{PureState, StateDoc};

use crate::CliError;

/// Comma-separated decimals, e.g. `.4,.4,.2`.
pub fn parse_vec(s: &str) -> Result<Vec<f64>, CliError> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::Usage(format!("cannot parse vector {s:?}: expected comma-separated decimals"))),
    }
}

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let v = parse_vec(s)?;
    match v.as_slice() {
        [re] => Ok(C64::new(*re, 0.0)),
        [re, im] => Ok(C64::new(*re, *im)),
        _ => Err(CliError::Usage(format!("cannot parse complex number {s:?}: expected re or re,im"))),
    }
}

pub fn parse_cut(s: &str) -> Result<Vec<usize>, CliError> {
    let v: Result<Vec<usize>, _> = s.split(',').map(|t| t.trim().parse::<usize>()).collect();
    v.map_err(|_| CliError::Usage(format!("cannot parse cut {s:?}: expected comma-separated subsystem indices")))
}

#[derive(Debug, Clone)]
pub enum Loaded {
    Pure(PureState),
    Mixed(CMatrix),
}

impl Loaded {
    pub fn density(&self) -> CMatrix {
        match self {
            Loaded::Pure(p) => p.density(),
            Loaded::Mixed(m) => m.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Loaded::Pure(p) => p.amps().len(),
            Loaded::Mixed(m) => m.rows(),
        }
    }
}

/// Reads a state document (`amp`) or a density matrix document (`re`/`im`).
pub fn load_state(path: &Path, max_dim: usize) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{} is not valid JSON: {e}", path.display())))?;
    let loaded = if value.get("amp").is_some() {
        let doc: StateDoc = serde_json::from_value(value)
            .map_err(|e| CliError::Usage(format!("{}: bad state document: {e}", path.display())))?;
        Loaded::Pure(PureState::from_doc(&doc).map_err(|e| CliError::Numeric(e.to_string()))?)
    } else {
        let doc: MatrixDoc = serde_json::from_value(value)
            .map_err(|e| CliError::Usage(format!("{}: bad matrix document: {e}", path.display())))?;
        Loaded::Mixed(CMatrix::from_json(&doc).map_err(|e| CliError::Numeric(e.to_string()))?)
    };
    if loaded.dim() > max_dim {
        return Err(CliError::Numeric(format!("dimension {} exceeds --max-dim {max_dim}", loaded.dim())));
    }
    Ok(loaded)
}

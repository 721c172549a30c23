//! Entropies and entanglement measures, all in bits.

use thiserror::Error;

use crate::numkernel::{
    eig_hermitian, kron, partial_trace, partial_transpose, pauli_y, psd_sqrt, trace_norm, CMatrix,
    KernelError, PSD_CLAMP,
};
use crate::qstate::{schmidt, PureState, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("parameter out of range: {0}")]
    BadParam(String),
    #[error("not a joint probability table: {0}")]
    BadDistribution(String),
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    #[error("expected a two-qubit (4x4) matrix")]
    BadDims,
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn xlog2x(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

pub fn shannon(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

pub fn binary_entropy(x: f64) -> Result<f64, MeasureError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(MeasureError::BadParam(format!("binary entropy argument {x}")));
    }
    Ok(-xlog2x(x) - xlog2x(1.0 - x))
}

/// `Σ p log2(p/q)`; infinite when `p` has mass outside the support of `q`.
pub fn relative_entropy_classical(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let mut s = 0.0;
    for i in 0..n {
        let pi = p.get(i).copied().unwrap_or(0.0);
        let qi = q.get(i).copied().unwrap_or(0.0);
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return f64::INFINITY;
        }
        s += pi * (pi / qi).log2();
    }
    s
}

pub fn mutual_information(joint: &[Vec<f64>]) -> Result<f64, MeasureError> {
    let rows = joint.len();
    let cols = joint.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 || joint.iter().any(|r| r.len() != cols) {
        return Err(MeasureError::BadDistribution("empty or ragged table".into()));
    }
    let mut total = 0.0;
    for r in joint {
        for &x in r {
            if x < -1e-12 || !x.is_finite() {
                return Err(MeasureError::BadDistribution(format!("entry {x}")));
            }
            total += x;
        }
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(MeasureError::BadDistribution(format!("total {total}")));
    }
    let px: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let py: Vec<f64> = (0..cols).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    Ok((shannon(&px) + shannon(&py) - shannon(&flat)).max(0.0))
}

/// Spectrum of a density matrix with small negative noise clamped to zero.
pub fn density_spectrum(rho: &CMatrix) -> Result<Vec<f64>, MeasureError> {
    if !rho.is_square() {
        return Err(MeasureError::NotDensity("not square".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(MeasureError::NotDensity(format!("trace {tr}")));
    }
    let vals = eig_hermitian(rho).map_err(|e| MeasureError::NotDensity(e.to_string()))?.values;
    if let Some(&m) = vals.last() {
        if m < -PSD_CLAMP {
            return Err(MeasureError::NotDensity(format!("eigenvalue {m}")));
        }
    }
    Ok(vals.into_iter().map(|x| x.max(0.0)).collect())
}

pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64, MeasureError> {
    Ok(shannon(&density_spectrum(rho)?).max(0.0))
}

/// Entropy of entanglement across `split`, in ebits.
pub fn entanglement_entropy(psi: &PureState, split: &[usize]) -> Result<f64, MeasureError> {
    Ok(shannon(&schmidt(psi, split)?.coefficients).max(0.0))
}

/// `sqrt(2(1 - tr ρ_S²))` for the reduced state on `split`.
pub fn concurrence_pure(psi: &PureState, split: &[usize]) -> Result<f64, MeasureError> {
    let s = schmidt(psi, split)?;
    let purity: f64 = s.coefficients.iter().map(|x| x * x).sum();
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

fn check_2q(rho: &CMatrix) -> Result<(), MeasureError> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(MeasureError::BadDims);
    }
    density_spectrum(rho)?;
    Ok(())
}

/// Two-qubit concurrence from the spectrum of `sqrt(sqrt(ρ) ρ̃ sqrt(ρ))`.
pub fn concurrence_2q(rho: &CMatrix) -> Result<f64, MeasureError> {
    check_2q(rho)?;
    let yy = kron(&pauli_y(), &pauli_y());
    let tilde = &(&yy * &rho.conj()) * &yy;
    let s = psd_sqrt(rho)?;
    let inner = &(&s * &tilde) * &s;
    let r = psd_sqrt(&hermitize(&inner))?;
    let l = eig_hermitian(&r)?.values;
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + &m.dagger()).scale_real(0.5)
}

/// Entanglement of formation from the concurrence.
pub fn eof_2q(rho: &CMatrix) -> Result<f64, MeasureError> {
    let cc = concurrence_2q(rho)?;
    eof_from_concurrence(cc)
}

pub fn eof_from_concurrence(cc: f64) -> Result<f64, MeasureError> {
    let x = (1.0 + (1.0 - cc * cc).max(0.0).sqrt()) / 2.0;
    binary_entropy(x.clamp(0.0, 1.0))
}

/// `‖ρ^{T_cut}‖₁` for a state with subsystem dimensions.
fn pt_norm(rho: &CMatrix, cut: &[usize]) -> Result<f64, MeasureError> {
    let pt = partial_transpose(rho, cut)?;
    Ok(trace_norm(&pt)?)
}

pub fn negativity(rho: &CMatrix, cut: &[usize]) -> Result<f64, MeasureError> {
    Ok(((pt_norm(rho, cut)? - 1.0) / 2.0).max(0.0))
}

pub fn log_negativity(rho: &CMatrix, cut: &[usize]) -> Result<f64, MeasureError> {
    Ok(pt_norm(rho, cut)?.log2().max(0.0))
}

/// Reduced density of a pure state on `keep`.
pub fn reduced(psi: &PureState, keep: &[usize]) -> Result<CMatrix, MeasureError> {
    Ok(partial_trace(&psi.density(), keep)?)
}

//! Majorization of real vectors and its matrix counterparts.

use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numkernel::{eig_hermitian, CMatrix, KernelError, C64};

/// Slack used in every partial-sum comparison.
pub const MAJ_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MajError {
    #[error("vector totals differ ({0} vs {1})")]
    TraceMismatch(f64, f64),
    #[error("x is not majorized by y")]
    NotMajorized,
    #[error("projectors do not resolve the identity")]
    BadResolution,
    #[error("invalid probability vector: {0}")]
    BadVector(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A nonnegative real vector, stored in the order given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Accepts components `>= -1e-12` (clamped to zero) summing to 1 within `MAJ_TOL`.
    pub fn new(values: Vec<f64>) -> Result<Self, MajError> {
        let v = Self::nonnegative(values)?;
        let s: f64 = v.0.iter().sum();
        if (s - 1.0).abs() > MAJ_TOL {
            return Err(MajError::BadVector(format!("sum is {s}, expected 1")));
        }
        Ok(v)
    }

    /// Accepts any vector with components `>= -1e-12`; totals are unconstrained.
    pub fn nonnegative(values: Vec<f64>) -> Result<Self, MajError> {
        let mut out = Vec::with_capacity(values.len());
        for x in values {
            if !x.is_finite() || x < -1e-12 {
                return Err(MajError::BadVector(format!("component {x} is negative or not finite")));
            }
            out.push(x.max(0.0));
        }
        Ok(ProbVector(out))
    }

    pub fn uniform(d: usize) -> Self {
        ProbVector(vec![1.0 / d as f64; d])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn sorted_desc(&self) -> Vec<f64> {
        sorted_desc(&self.0)
    }

    /// Number of entries above `1e-10`.
    pub fn rank(&self) -> usize {
        self.0.iter().filter(|&&x| x > 1e-10).count()
    }
}

impl Deref for ProbVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MajVerdict {
    XPrecY,
    YPrecX,
    Equal,
    Incomparable,
}

pub fn sorted_desc(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Both vectors sorted descending and zero-padded to a common length.
pub fn aligned(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len().max(y.len());
    let mut a = sorted_desc(x);
    let mut b = sorted_desc(y);
    a.resize(n, 0.0);
    b.resize(n, 0.0);
    (a, b)
}

pub fn partial_sums(x: &[f64]) -> Vec<f64> {
    x.iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

fn check_totals(x: &[f64], y: &[f64]) -> Result<(), MajError> {
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    if (sx - sy).abs() > MAJ_TOL {
        return Err(MajError::TraceMismatch(sx, sy));
    }
    Ok(())
}

/// `x ≺ y`: every descending partial sum of `x` is at most that of `y`.
pub fn majorizes(x: &[f64], y: &[f64]) -> Result<bool, MajError> {
    check_totals(x, y)?;
    let (a, b) = aligned(x, y);
    let (pa, pb) = (partial_sums(&a), partial_sums(&b));
    Ok(pa.iter().zip(&pb).all(|(u, v)| *u <= v + MAJ_TOL))
}

/// Ascending formulation: every ascending partial sum of `x` is at least that of `y`.
pub fn majorizes_ascending(x: &[f64], y: &[f64]) -> Result<bool, MajError> {
    check_totals(x, y)?;
    let (mut a, mut b) = aligned(x, y);
    a.reverse();
    b.reverse();
    let (pa, pb) = (partial_sums(&a), partial_sums(&b));
    Ok(pa.iter().zip(&pb).all(|(u, v)| *u + MAJ_TOL >= *v))
}

/// Subset formulation: for every index set `I` there is `J` with `|J| = |I|` and
/// `sum_I x <= sum_J y`. Exhaustive, so only meant for short vectors.
pub fn majorizes_by_subsets(x: &[f64], y: &[f64]) -> Result<bool, MajError> {
    check_totals(x, y)?;
    let n = x.len().max(y.len());
    assert!(n <= 16, "subset enumeration limited to 16 entries");
    let mut a = x.to_vec();
    let mut b = y.to_vec();
    a.resize(n, 0.0);
    b.resize(n, 0.0);
    let mut best = vec![f64::NEG_INFINITY; n + 1];
    for mask in 0u32..(1 << n) {
        let k = mask.count_ones() as usize;
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| b[i]).sum();
        best[k] = best[k].max(s);
    }
    for mask in 0u32..(1 << n) {
        let k = mask.count_ones() as usize;
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).sum();
        if s > best[k] + MAJ_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn compare(x: &[f64], y: &[f64]) -> Result<MajVerdict, MajError> {
    let xy = majorizes(x, y)?;
    let yx = majorizes(y, x)?;
    let (a, b) = aligned(x, y);
    let same = a.iter().zip(&b).all(|(u, v)| (u - v).abs() <= MAJ_TOL);
    Ok(match (same, xy, yx) {
        (true, _, _) => MajVerdict::Equal,
        (false, true, _) => MajVerdict::XPrecY,
        (false, false, true) => MajVerdict::YPrecX,
        (false, false, false) => MajVerdict::Incomparable,
    })
}

pub fn is_doubly_stochastic(a: &CMatrix) -> bool {
    if !a.is_square() {
        return false;
    }
    let n = a.rows();
    if a.data().iter().any(|z| z.im.abs() >= 1e-12 || z.re < -1e-9) {
        return false;
    }
    (0..n).all(|i| {
        let r: f64 = (0..n).map(|j| a[(i, j)].re).sum();
        let cl: f64 = (0..n).map(|j| a[(j, i)].re).sum();
        (r - 1.0).abs() <= 1e-9 && (cl - 1.0).abs() <= 1e-9
    })
}

/// Doubly stochastic `A` with `A·y↓ = x↓`, built as a product of T-transforms.
pub fn ds_witness(x: &[f64], y: &[f64]) -> Result<CMatrix, MajError> {
    if !majorizes(x, y)? {
        return Err(MajError::NotMajorized);
    }
    let (xs, ys) = aligned(x, y);
    let n = xs.len();
    let mut a = CMatrix::identity(n);
    let mut z = ys.clone();
    for _ in 0..2 * n {
        let Some(j) = (0..n).rev().find(|&i| z[i] > xs[i] + 1e-15) else { break };
        let Some(k) = (j + 1..n).find(|&i| z[i] < xs[i] - 1e-15) else { break };
        let delta = (z[j] - xs[j]).min(xs[k] - z[k]);
        let gap = z[j] - z[k];
        if gap <= 0.0 {
            break;
        }
        let t = 1.0 - delta / gap;
        let mut tm = CMatrix::identity(n);
        tm[(j, j)] = C64::new(t, 0.0);
        tm[(k, k)] = C64::new(t, 0.0);
        tm[(j, k)] = C64::new(1.0 - t, 0.0);
        tm[(k, j)] = C64::new(1.0 - t, 0.0);
        let zj = z[j];
        let zk = z[k];
        z[j] = t * zj + (1.0 - t) * zk;
        z[k] = t * zk + (1.0 - t) * zj;
        a = &tm * &a;
    }
    Ok(a)
}

/// Applies a real matrix to a real vector.
pub fn apply_real(a: &CMatrix, v: &[f64]) -> Vec<f64> {
    (0..a.rows()).map(|i| (0..a.cols()).map(|j| a[(i, j)].re * v[j]).sum()).collect()
}

/// `spectrum(rho) ≺ spectrum(sigma)`.
pub fn spectra_majorized(rho: &CMatrix, sigma: &CMatrix) -> Result<bool, MajError> {
    let a = eig_hermitian(rho)?.values;
    let b = eig_hermitian(sigma)?.values;
    majorizes(&a, &b)
}

/// `Σ_j P_j ρ P_j` for an orthogonal resolution of the identity.
pub fn dephase(rho: &CMatrix, projectors: &[CMatrix]) -> Result<CMatrix, MajError> {
    let n = rho.rows();
    if projectors.is_empty() || projectors.iter().any(|p| p.rows() != n || p.cols() != n) {
        return Err(MajError::BadResolution);
    }
    let mut sum = CMatrix::zeros(n, n);
    for p in projectors {
        sum = &sum + p;
    }
    if sum.max_abs_diff(&CMatrix::identity(n)) > 1e-9 {
        return Err(MajError::BadResolution);
    }
    for (i, p) in projectors.iter().enumerate() {
        for q in &projectors[i + 1..] {
            if (p * q).max_abs() > 1e-9 {
                return Err(MajError::BadResolution);
            }
        }
    }
    let mut out = CMatrix::zeros(n, n);
    for p in projectors {
        out = &out + &(&(p * rho) * p);
    }
    if let Some(d) = rho.dims() {
        out = out.with_dims(d).map_err(MajError::Kernel)?;
    }
    Ok(out)
}

/// Rank-one projectors onto the computational basis of dimension `n`.
pub fn computational_projectors(n: usize) -> Vec<CMatrix> {
    (0..n)
        .map(|i| {
            let mut p = CMatrix::zeros(n, n);
            p[(i, i)] = C64::new(1.0, 0.0);
            p
        })
        .collect()
}

/// Whether a pure-state ensemble with weights `p` can realize a state of spectrum `lambda`.
pub fn ensemble_exists(p: &[f64], lambda: &[f64]) -> Result<bool, MajError> {
    majorizes(p, lambda)
}

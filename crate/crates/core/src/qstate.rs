//! Pure states, Schmidt decomposition and a few standard states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::majorize::ProbVector;
use crate::numkernel::{c, eig_hermitian, CMatrix, KernelError, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("state is not normalized (norm {0})")]
    BadNorm(f64),
    #[error("dimensions {0:?} do not match {1} amplitudes")]
    BadDims(Vec<usize>, usize),
    #[error("split must be a nonempty proper subset of the subsystems")]
    BadSplit,
    #[error("parameter out of range: {0}")]
    BadParam(String),
    #[error("Bloch vector longer than 1 (|n| = {0})")]
    BadBloch(f64),
    #[error("bad state document: {0}")]
    Format(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amps: Vec<C64>, dims: &[usize]) -> Result<Self, StateError> {
        let p: usize = dims.iter().product();
        if dims.is_empty() || p != amps.len() {
            return Err(StateError::BadDims(dims.to_vec(), amps.len()));
        }
        let n = norm(&amps);
        if (n - 1.0).abs() > 1e-9 {
            return Err(StateError::BadNorm(n));
        }
        Ok(PureState { amps, dims: dims.to_vec() })
    }

    /// Normalizes `amps` before validating.
    pub fn normalized(amps: Vec<C64>, dims: &[usize]) -> Result<Self, StateError> {
        let n = norm(&amps);
        if n == 0.0 || !n.is_finite() {
            return Err(StateError::BadNorm(n));
        }
        Self::new(amps.into_iter().map(|z| z / n).collect(), dims)
    }

    pub fn from_real(amps: &[f64], dims: &[usize]) -> Result<Self, StateError> {
        Self::normalized(amps.iter().map(|&x| c(x, 0.0)).collect(), dims)
    }

    /// Bipartite state `Σ sqrt(λ_i) |i>|i>` on `d × d`.
    pub fn from_schmidt(lambda: &[f64]) -> Result<Self, StateError> {
        let d = lambda.len();
        let mut amps = vec![C64::new(0.0, 0.0); d * d];
        for (i, &l) in lambda.iter().enumerate() {
            if l < -1e-12 {
                return Err(StateError::BadParam(format!("negative coefficient {l}")));
            }
            amps[i * d + i] = c(l.max(0.0).sqrt(), 0.0);
        }
        Self::new(amps, &[d, d])
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn density(&self) -> CMatrix {
        CMatrix::projector(&self.amps).with_dims(&self.dims).expect("state dims")
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let amps = crate::numkernel::kron_vec(&self.amps, &other.amps);
        let dims: Vec<usize> = self.dims.iter().chain(&other.dims).copied().collect();
        PureState { amps, dims }
    }

    /// Applies a matrix acting on the whole register.
    pub fn apply(&self, op: &CMatrix) -> Result<PureState, StateError> {
        if op.cols() != self.dim() || op.rows() != self.dim() {
            return Err(StateError::BadDims(self.dims.clone(), op.cols()));
        }
        Ok(PureState { amps: op.matvec(&self.amps), dims: self.dims.clone() })
    }

    /// Multiplies by a global phase so the largest-magnitude amplitude is real and positive.
    pub fn fix_global_phase(&self) -> PureState {
        let mut best = C64::new(0.0, 0.0);
        for z in &self.amps {
            if z.norm() > best.norm() + 1e-12 {
                best = *z;
            }
        }
        let ph = if best.norm() > 0.0 { best.conj() / best.norm() } else { c(1.0, 0.0) };
        PureState { amps: self.amps.iter().map(|z| z * ph).collect(), dims: self.dims.clone() }
    }

    pub fn to_doc(&self) -> StateDoc {
        StateDoc { dims: self.dims.clone(), amp: self.amps.iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn from_doc(doc: &StateDoc) -> Result<Self, StateError> {
        let amps = doc.amp.iter().map(|p| c(p[0], p[1])).collect();
        PureState::new(amps, &doc.dims)
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// On-disk state document: `{"dims": [...], "amp": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StateDoc {
    pub dims: Vec<usize>,
    pub amp: Vec<[f64; 2]>,
}

#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Squared Schmidt coefficients, descending.
    pub coefficients: ProbVector,
    /// Columns `|i_A>` for the retained terms.
    pub left_basis: CMatrix,
    /// Columns `|i_B>` for the retained terms.
    pub right_basis: CMatrix,
    pub rank: usize,
    pub left_dims: Vec<usize>,
    pub right_dims: Vec<usize>,
}

impl SchmidtDecomposition {
    /// `Σ sqrt(λ_i) |i_A>|i_B>` in the split ordering (left factors first).
    pub fn reconstruct(&self) -> Vec<C64> {
        let da = self.left_basis.rows();
        let db = self.right_basis.rows();
        let mut out = vec![C64::new(0.0, 0.0); da * db];
        for i in 0..self.rank {
            let s = self.coefficients[i].sqrt();
            for a in 0..da {
                for b in 0..db {
                    out[a * db + b] += self.left_basis[(a, i)] * self.right_basis[(b, i)] * s;
                }
            }
        }
        out
    }
}

fn check_split(dims: &[usize], split: &[usize]) -> Result<(Vec<usize>, Vec<usize>), StateError> {
    let mut mask = vec![false; dims.len()];
    for &s in split {
        if s >= dims.len() || mask[s] {
            return Err(StateError::BadSplit);
        }
        mask[s] = true;
    }
    let left: Vec<usize> = (0..dims.len()).filter(|k| mask[*k]).collect();
    let right: Vec<usize> = (0..dims.len()).filter(|k| !mask[*k]).collect();
    if left.is_empty() || right.is_empty() {
        return Err(StateError::BadSplit);
    }
    Ok((left, right))
}

/// Coefficient matrix `M[a][b]` with rows over `left` subsystems and columns over `right`.
pub fn coefficient_matrix(psi: &PureState, split: &[usize]) -> Result<CMatrix, StateError> {
    let dims = psi.dims();
    let (left, right) = check_split(dims, split)?;
    let da: usize = left.iter().map(|&k| dims[k]).product();
    let db: usize = right.iter().map(|&k| dims[k]).product();
    let mut m = CMatrix::zeros(da, db);
    let mut dig = vec![0usize; dims.len()];
    for (idx, z) in psi.amps().iter().enumerate() {
        let mut r = idx;
        for k in (0..dims.len()).rev() {
            dig[k] = r % dims[k];
            r /= dims[k];
        }
        let a = left.iter().fold(0, |acc, &k| acc * dims[k] + dig[k]);
        let b = right.iter().fold(0, |acc, &k| acc * dims[k] + dig[k]);
        m[(a, b)] = *z;
    }
    Ok(m)
}

pub fn schmidt(psi: &PureState, split: &[usize]) -> Result<SchmidtDecomposition, StateError> {
    let dims = psi.dims();
    let (left, right) = check_split(dims, split)?;
    let m = coefficient_matrix(psi, split)?;
    let (da, db) = (m.rows(), m.cols());
    let left_dims: Vec<usize> = left.iter().map(|&k| dims[k]).collect();
    let right_dims: Vec<usize> = right.iter().map(|&k| dims[k]).collect();

    let small_left = da <= db;
    let reduced = if small_left { &m * &m.dagger() } else { &m.transpose() * &m.conj() };
    let e = eig_hermitian(&reduced)?;
    let coeffs: Vec<f64> = e.values.iter().map(|&x| x.max(0.0)).collect();
    let rank = coeffs.iter().filter(|&&x| x > 1e-10).count();

    let mut lb = CMatrix::zeros(da, rank);
    let mut rb = CMatrix::zeros(db, rank);
    for i in 0..rank {
        let s = coeffs[i].sqrt();
        let v = e.vector(i);
        if small_left {
            for a in 0..da {
                lb[(a, i)] = v[a];
            }
            for b in 0..db {
                let z: C64 = (0..da).map(|a| v[a].conj() * m[(a, b)]).sum();
                rb[(b, i)] = z / s;
            }
        } else {
            for b in 0..db {
                rb[(b, i)] = v[b];
            }
            for a in 0..da {
                let z: C64 = (0..db).map(|b| m[(a, b)] * v[b].conj()).sum();
                lb[(a, i)] = z / s;
            }
        }
    }
    let total: f64 = coeffs.iter().sum();
    let coeffs: Vec<f64> = coeffs.iter().map(|x| x / total).collect();
    Ok(SchmidtDecomposition {
        coefficients: ProbVector::nonnegative(coeffs).map_err(|e| StateError::BadParam(e.to_string()))?,
        left_basis: lb,
        right_basis: rb,
        rank,
        left_dims,
        right_dims,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus];
}

pub fn bell(kind: BellKind) -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a = match kind {
        BellKind::PhiPlus => [h, 0.0, 0.0, h],
        BellKind::PhiMinus => [h, 0.0, 0.0, -h],
        BellKind::PsiPlus => [0.0, h, h, 0.0],
        BellKind::PsiMinus => [0.0, h, -h, 0.0],
    };
    PureState { amps: a.iter().map(|&x| c(x, 0.0)).collect(), dims: vec![2, 2] }
}

/// `p |Ψ⁻><Ψ⁻| + (1 - p) I/4`.
pub fn werner(p: f64) -> Result<CMatrix, StateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StateError::BadParam(format!("werner weight {p} outside [0, 1]")));
    }
    let s = bell(BellKind::PsiMinus).density().scale_real(p);
    let m = CMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    Ok((&s + &m).with_dims(&[2, 2])?)
}

/// `(I + n·σ)/2`.
pub fn bloch_to_qubit(n: [f64; 3]) -> Result<CMatrix, StateError> {
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len > 1.0 + 1e-9 {
        return Err(StateError::BadBloch(len));
    }
    let m = CMatrix::from_rows(&[
        vec![c((1.0 + n[2]) / 2.0, 0.0), c(n[0] / 2.0, -n[1] / 2.0)],
        vec![c(n[0] / 2.0, n[1] / 2.0), c((1.0 - n[2]) / 2.0, 0.0)],
    ]);
    Ok(m.with_dims(&[2])?)
}

pub fn qubit_to_bloch(rho: &CMatrix) -> Result<[f64; 3], StateError> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(StateError::BadDims(vec![rho.rows(), rho.cols()], 4));
    }
    Ok([2.0 * rho[(0, 1)].re, -2.0 * rho[(0, 1)].im, (rho[(0, 0)] - rho[(1, 1)]).re])
}

/// Qubit ket with Bloch vector along the unit vector `n`.
pub fn qubit_ket(n: [f64; 3]) -> [C64; 2] {
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let (x, y, z) = (n[0] / len, n[1] / len, n[2] / len);
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x);
    [c((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)]
}

/// Gaussian amplitudes, normalized; deterministic per seed.
pub fn random_pure(dim: usize, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pure_with(&[dim], &mut rng)
}

pub fn random_pure_with<R: rand::Rng>(dims: &[usize], rng: &mut R) -> PureState {
    let d: usize = dims.iter().product();
    loop {
        let amps: Vec<C64> = (0..d)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                c(re, im)
            })
            .collect();
        if norm(&amps) > 1e-8 {
            return PureState::normalized(amps, dims).expect("nonzero gaussian vector");
        }
    }
}

/// Random density matrix `G G† / tr` with complex Gaussian `G` of size `d × k`.
pub fn random_density<R: rand::Rng>(dims: &[usize], k: usize, rng: &mut R) -> CMatrix {
    let d: usize = dims.iter().product();
    let g = CMatrix::from_fn(d, k, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    });
    let m = &g * &g.dagger();
    let t = m.trace().re;
    m.scale_real(1.0 / t).with_dims(dims).expect("random density dims")
}

/// Haar-ish random unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary<R: rand::Rng>(d: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                c(re, im)
            })
            .collect();
        for u in &cols {
            let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= p * y);
        }
        let n = norm(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    CMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Random probability vector of length `d` (normalized exponentials).
pub fn random_prob<R: rand::Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

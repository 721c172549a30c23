//! Entanglement criteria: PPT, CHSH, reduction, entangled fraction, rank-two distillability.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::numkernel::{
    c, eig_hermitian, kron, partial_trace, partial_transpose, paulis, permute_subsystems, CMatrix,
    KernelError, C64,
};
use crate::qstate::{random_pure_with, random_unitary, PureState};

pub const PPT_TOL: f64 = 1e-9;
pub const FMAX_RESTARTS: usize = 16;
pub const FMAX_ITERS: usize = 50;
const RANK2_RESTARTS: usize = 8;
const RANK2_ITERS: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("expected a two-qubit (4x4) matrix")]
    BadDims,
    #[error("expected a d x d bipartite state")]
    NotBipartite,
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct PptResult {
    pub ppt: bool,
    pub min_eigenvalue: f64,
}

pub fn is_ppt(rho: &CMatrix, cut: &[usize]) -> Result<PptResult, WitnessError> {
    let pt = partial_transpose(rho, cut)?;
    let vals = eig_hermitian(&pt)?.values;
    let m = *vals.last().unwrap_or(&0.0);
    Ok(PptResult { ppt: m >= -PPT_TOL, min_eigenvalue: m })
}

/// Correlation matrix `Γ_ij = tr(ρ σ_i⊗σ_j)` for `i, j ∈ {x, y, z}`.
pub fn correlation_matrix(rho: &CMatrix) -> Result<[[f64; 3]; 3], WitnessError> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(WitnessError::BadDims);
    }
    let p = paulis();
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = (rho * &kron(&p[i + 1], &p[j + 1])).trace().re;
        }
    }
    Ok(g)
}

/// Sum of the two largest eigenvalues of `ΓᵀΓ`; values above 1 violate CHSH.
pub fn chsh_m(rho: &CMatrix) -> Result<f64, WitnessError> {
    let g = correlation_matrix(rho)?;
    let gtg = CMatrix::from_fn(3, 3, |i, j| c((0..3).map(|k| g[k][i] * g[k][j]).sum(), 0.0));
    let v = eig_hermitian(&gtg)?.values;
    Ok(v[0] + v[1])
}

/// Moves the subsystems in `cut` to the front and merges each side into one factor.
pub fn as_bipartite(rho: &CMatrix, cut: &[usize]) -> Result<(CMatrix, usize, usize), WitnessError> {
    let dims = rho.dims().ok_or(KernelError::MissingDims)?.to_vec();
    let mut mask = vec![false; dims.len()];
    for &k in cut {
        if k >= dims.len() || mask[k] {
            return Err(KernelError::BadSubset.into());
        }
        mask[k] = true;
    }
    if cut.is_empty() || cut.len() == dims.len() {
        return Err(KernelError::BadSubset.into());
    }
    let mut perm: Vec<usize> = (0..dims.len()).filter(|k| mask[*k]).collect();
    perm.extend((0..dims.len()).filter(|k| !mask[*k]));
    let p = permute_subsystems(rho, &perm)?;
    let da: usize = (0..dims.len()).filter(|k| mask[*k]).map(|k| dims[k]).product();
    let db = dims.iter().product::<usize>() / da;
    let p = CMatrix::from_vec(p.rows(), p.cols(), p.data().to_vec())?.with_dims(&[da, db])?;
    Ok((p, da, db))
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct ReductionResult {
    pub violated: bool,
    pub min_eig_b_side: f64,
    pub min_eig_a_side: f64,
}

/// Checks `I⊗ρ_B - ρ ≥ 0` and `ρ_A⊗I - ρ ≥ 0`.
pub fn reduction_check(rho: &CMatrix, cut: &[usize]) -> Result<ReductionResult, WitnessError> {
    let (r, da, db) = as_bipartite(rho, cut)?;
    let ra = partial_trace(&r, &[0])?;
    let rb = partial_trace(&r, &[1])?;
    let m1 = &kron(&CMatrix::identity(da), &rb) - &r;
    let m2 = &kron(&ra, &CMatrix::identity(db)) - &r;
    let e1 = *eig_hermitian(&m1)?.values.last().unwrap();
    let e2 = *eig_hermitian(&m2)?.values.last().unwrap();
    Ok(ReductionResult { violated: e1 < -PPT_TOL || e2 < -PPT_TOL, min_eig_b_side: e1, min_eig_a_side: e2 })
}

#[derive(Debug, Clone, Serialize)]
pub struct FmaxResult {
    /// Best overlap found; a lower bound on the true maximum.
    pub value: f64,
    pub lower_bound: bool,
    pub restarts: usize,
    pub seed: u64,
    pub entangled: bool,
}

/// Unitary factor of the polar decomposition of `g`.
pub fn polar_unitary(g: &CMatrix) -> Result<CMatrix, KernelError> {
    let d = g.rows();
    let e = eig_hermitian(&(&g.dagger() * g))?;
    let scale = e.values[0].max(0.0).sqrt();
    let mut ws: Vec<Vec<C64>> = Vec::new();
    let mut vs: Vec<Vec<C64>> = Vec::new();
    for k in 0..d {
        let s = e.values[k].max(0.0).sqrt();
        let v = e.vector(k);
        if s > 1e-12 * scale.max(1e-300) {
            let w: Vec<C64> = g.matvec(&v).into_iter().map(|z| z / s).collect();
            ws.push(w);
            vs.push(v);
        }
    }
    // complete the left basis for rank-deficient g
    let mut k = vs.len();
    let mut basis_idx = 0;
    while ws.len() < d {
        let mut cand = vec![C64::new(0.0, 0.0); d];
        cand[basis_idx % d] = c(1.0, 0.0);
        basis_idx += 1;
        for w in &ws {
            let p: C64 = w.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
            cand.iter_mut().zip(w).for_each(|(x, y)| *x -= p * y);
        }
        let n = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            ws.push(cand.into_iter().map(|z| z / n).collect());
            vs.push(e.vector(k));
            k += 1;
        }
    }
    Ok(CMatrix::from_fn(d, d, |i, j| (0..d).map(|m| ws[m][i] * vs[m][j].conj()).sum()))
}

fn fidelity_with(rho: &CMatrix, u: &CMatrix, d: usize) -> f64 {
    let v: Vec<C64> = u.data().iter().map(|z| z / (d as f64).sqrt()).collect();
    rho.expectation(&v).re
}

/// Maximal overlap with states `(U⊗I)|Φ_d⁺>` by polar seesaw from seeded random starts.
pub fn max_entangled_fraction(rho: &CMatrix, restarts: usize, seed: u64) -> Result<FmaxResult, WitnessError> {
    let dims = rho.dims().ok_or(KernelError::MissingDims)?;
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(WitnessError::NotBipartite);
    }
    let d = dims[0];
    let mut best = f64::NEG_INFINITY;
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let mut u = random_unitary(d, &mut rng);
        let mut f = fidelity_with(rho, &u, d);
        for _ in 0..FMAX_ITERS {
            let g = rho.matvec(u.data());
            let gm = CMatrix::from_vec(d, d, g)?;
            let nu = polar_unitary(&gm)?;
            let nf = fidelity_with(rho, &nu, d);
            let done = (nf - f).abs() <= 1e-10 * f.abs().max(1e-300);
            if nf >= f {
                u = nu;
                f = nf;
            }
            if done {
                break;
            }
        }
        best = best.max(f);
    }
    Ok(FmaxResult {
        value: best,
        lower_bound: true,
        restarts: restarts.max(1),
        seed,
        entangled: best > 1.0 / d as f64 + 1e-9,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Rank2Result {
    pub copies: usize,
    pub found: bool,
    pub value: f64,
    #[serde(skip)]
    pub witness: Option<PureState>,
    /// "distillable" when a negative value was found, otherwise "inconclusive".
    pub verdict: &'static str,
}

fn orthonormal_pair(m: &CMatrix) -> [Vec<C64>; 2] {
    // leading two left singular vectors of m
    let e = eig_hermitian(&(m * &m.dagger())).expect("hermitian");
    [e.vector(0), e.vector(1)]
}

fn restrict(x: &CMatrix, basis: &[Vec<C64>]) -> CMatrix {
    let cols: Vec<Vec<C64>> = basis.iter().map(|b| x.matvec(b)).collect();
    CMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        basis[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum()
    })
}

/// Seesaw minimization of `<ψ|(ρ^{T_A})^{⊗k}|ψ>` over Schmidt-rank-two `ψ`.
pub fn distillable_rank2(rho: &CMatrix, cut: &[usize], k: usize, seed: u64) -> Result<Rank2Result, WitnessError> {
    let dims = rho.dims().ok_or(KernelError::MissingDims)?;
    let total: usize = dims.iter().product();
    if k == 0 || (k as f64) * (total as f64).log2() > 12.0 + 1e-12 {
        return Err(WitnessError::TooLarge(format!("{k} copies of a {total}-dimensional state")));
    }
    let (r, da, db) = as_bipartite(rho, cut)?;
    let t = partial_transpose(&r, &[0])?;
    // k copies ordered A1..Ak B1..Bk
    let mut x = t.clone();
    for _ in 1..k {
        x = kron(&x, &t);
    }
    let perm: Vec<usize> = (0..k).map(|i| 2 * i).chain((0..k).map(|i| 2 * i + 1)).collect();
    let x = permute_subsystems(&x, &perm)?;
    let (na, nb) = (da.pow(k as u32), db.pow(k as u32));

    let mut best = f64::INFINITY;
    let mut best_psi: Option<Vec<C64>> = None;
    for rs in 0..RANK2_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(rs as u64);
        let a0 = random_pure_with(&[na], &mut rng).amps().to_vec();
        let a1 = random_pure_with(&[na], &mut rng).amps().to_vec();
        let mut left = gram_schmidt(&[a0, a1]);
        let mut val = f64::INFINITY;
        let mut psi = Vec::new();
        for _ in 0..RANK2_ITERS {
            // left fixed: ψ ∈ span(left) ⊗ C^nb
            let basis: Vec<Vec<C64>> = left
                .iter()
                .flat_map(|l| (0..nb).map(move |b| unit_tensor(l, b, nb, true)))
                .collect();
            let (v1, p1) = min_in_span(&x, &basis)?;
            let right = orthonormal_pair(&coeffs(&p1, na, nb).transpose());
            // right fixed: ψ ∈ C^na ⊗ span(right)
            let basis: Vec<Vec<C64>> = right
                .iter()
                .flat_map(|rv| (0..na).map(move |a| unit_tensor(rv, a, na, false)))
                .collect();
            let (v2, p2) = min_in_span(&x, &basis)?;
            left = orthonormal_pair(&coeffs(&p2, na, nb)).to_vec();
            let nv = v1.min(v2);
            psi = if v2 <= v1 { p2 } else { p1 };
            if (val - nv).abs() < 1e-13 {
                val = nv;
                break;
            }
            val = nv;
        }
        if val < best {
            best = val;
            best_psi = Some(psi);
        }
    }
    let found = best < -PPT_TOL;
    let witness = best_psi.and_then(|v| PureState::normalized(v, &[na, nb]).ok());
    Ok(Rank2Result { copies: k, found, value: best, witness, verdict: if found { "distillable" } else { "inconclusive" } })
}

fn gram_schmidt(vs: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for u in &out {
            let p: C64 = u.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            w.iter_mut().zip(u).for_each(|(x, y)| *x -= p * y);
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        out.push(w.into_iter().map(|z| z / n).collect());
    }
    out
}

/// `|l>⊗|e_b>` when `left_factor`, otherwise `|e_b>⊗|r>`.
fn unit_tensor(v: &[C64], b: usize, other: usize, left_factor: bool) -> Vec<C64> {
    let mut e = vec![C64::new(0.0, 0.0); other];
    e[b] = c(1.0, 0.0);
    if left_factor {
        crate::numkernel::kron_vec(v, &e)
    } else {
        crate::numkernel::kron_vec(&e, v)
    }
}

fn min_in_span(x: &CMatrix, basis: &[Vec<C64>]) -> Result<(f64, Vec<C64>), KernelError> {
    let h = restrict(x, basis);
    let h = (&h + &h.dagger()).scale_real(0.5);
    let e = eig_hermitian(&h)?;
    let n = basis.len();
    let coef = e.vector(n - 1);
    let dim = basis[0].len();
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    for (cf, b) in coef.iter().zip(basis) {
        psi.iter_mut().zip(b).for_each(|(p, v)| *p += cf * v);
    }
    Ok((e.values[n - 1], psi))
}

fn coeffs(psi: &[C64], na: usize, nb: usize) -> CMatrix {
    CMatrix::from_fn(na, nb, |a, b| psi[a * nb + b])
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub cut: Vec<usize>,
    pub ppt: bool,
    pub min_pt_eigenvalue: f64,
    pub entangled: bool,
    pub chsh_m: Option<f64>,
    pub reduction_violated: bool,
    pub fmax: Option<FmaxResult>,
    pub distillable_rank2: Vec<Rank2Result>,
    pub seed: u64,
}

/// Runs every applicable criterion on `rho` across `cut`.
pub fn witness_report(rho: &CMatrix, cut: &[usize], seed: u64) -> Result<WitnessReport, WitnessError> {
    let ppt = is_ppt(rho, cut)?;
    let dims = rho.dims().ok_or(KernelError::MissingDims)?.to_vec();
    let chsh = if dims == [2, 2] { Some(chsh_m(rho)?) } else { None };
    let red = reduction_check(rho, cut)?;
    let fmax = if dims.len() == 2 && dims[0] == dims[1] {
        Some(max_entangled_fraction(rho, FMAX_RESTARTS, seed)?)
    } else {
        None
    };
    let total: usize = dims.iter().product();
    let mut dist = Vec::new();
    for k in 1..=2usize {
        if (k as f64) * (total as f64).log2() <= 12.0 {
            dist.push(distillable_rank2(rho, cut, k, seed)?);
        }
    }
    let entangled = !ppt.ppt
        || chsh.is_some_and(|m| m > 1.0 + 1e-9)
        || red.violated
        || fmax.as_ref().is_some_and(|f| f.entangled);
    Ok(WitnessReport {
        cut: cut.to_vec(),
        ppt: ppt.ppt,
        min_pt_eigenvalue: ppt.min_eigenvalue,
        entangled,
        chsh_m: chsh,
        reduction_violated: red.violated,
        fmax,
        distillable_rank2: dist,
        seed,
    })
}

//! Dense complex linear algebra sized for small quantum systems.

use std::f64::consts::PI;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Hermiticity gate for eigensolver inputs.
pub const HERM_TOL: f64 = 1e-9;
/// Reconstruction residual gate.
pub const RESID_TOL: f64 = 1e-9;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as zero.
pub const PSD_CLAMP: f64 = 1e-9;

const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("matrix has no subsystem dimensions")]
    MissingDims,
    #[error("subsystem index set is empty or out of range")]
    BadSubset,
    #[error("matrix is not hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("cubic has complex roots (H^2 - 4G^3 = {0:e})")]
    ComplexRoots(f64),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("bad matrix document: {0}")]
    Format(String),
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
    dims: Option<Vec<usize>>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols], dims: None }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, KernelError> {
        if data.len() != rows * cols {
            return Err(KernelError::Shape(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(CMatrix { rows, cols, data, dims: None })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data, dims: None }
    }

    /// Builds a matrix from nested rows of real numbers.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let cl = rows.first().map_or(0, |x| x.len());
        Self::from_fn(r, cl, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let cl = rows.first().map_or(0, |x| x.len());
        Self::from_fn(r, cl, |i, j| rows[i][j])
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// `|v><v|` for a column vector `v`.
    pub fn projector(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn column(v: &[C64]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| v[i])
    }

    pub fn with_dims(mut self, dims: &[usize]) -> Result<Self, KernelError> {
        let p: usize = dims.iter().product();
        if self.rows != self.cols || p != self.rows || dims.is_empty() {
            return Err(KernelError::Shape(format!(
                "dims {:?} do not factor a {}x{} matrix",
                dims, self.rows, self.cols
            )));
        }
        self.dims = Some(dims.to_vec());
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> Option<&[usize]> {
        self.dims.as_deref()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn require_square(&self) -> Result<(), KernelError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(KernelError::NotSquare(self.rows, self.cols))
        }
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj());
        m.dims = self.dims.clone();
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|z| *z = z.conj());
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)]);
        m.dims = self.dims.clone();
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|z| *z *= s);
        m
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matvec length mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `<v| self |v>` for a square matrix.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let w = self.matvec(v);
        v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum()
    }

    /// `self * M * self^dagger`.
    pub fn conjugate(&self, m: &CMatrix) -> CMatrix {
        let mut out = &(self * m) * &self.dagger();
        out.dims = m.dims.clone();
        out
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_json(&self) -> MatrixDoc {
        MatrixDoc {
            dims: self.dims.clone().unwrap_or_else(|| vec![self.rows]),
            re: (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)].re).collect()).collect(),
            im: (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)].im).collect()).collect(),
        }
    }

    pub fn from_json(doc: &MatrixDoc) -> Result<Self, KernelError> {
        let rows = doc.re.len();
        if doc.im.len() != rows {
            return Err(KernelError::Format("re and im row counts differ".into()));
        }
        let cols = doc.re.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows * cols);
        for (r, i) in doc.re.iter().zip(&doc.im) {
            if r.len() != cols || i.len() != cols {
                return Err(KernelError::Format("ragged rows".into()));
            }
            data.extend(r.iter().zip(i).map(|(&a, &b)| C64::new(a, b)));
        }
        let m = CMatrix::from_vec(rows, cols, data)?;
        if rows == cols && !doc.dims.is_empty() {
            m.with_dims(&doc.dims).map_err(|e| KernelError::Format(e.to_string()))
        } else {
            Ok(m)
        }
    }
}

/// On-disk matrix document: `{"dims": [...], "re": [[...]], "im": [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixDoc {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        if self.dims.is_some() && self.dims == rhs.dims {
            out.dims = self.dims.clone();
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "add shape mismatch");
        let mut out = self.clone();
        out.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a += b);
        out
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "sub shape mismatch");
        let mut out = self.clone();
        out.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a -= b);
        out
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = CMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a[(i, j)];
            if s.re == 0.0 && s.im == 0.0 {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = s * b[(k, l)];
                }
            }
        }
    }
    if let (Some(da), Some(db)) = (&a.dims, &b.dims) {
        out.dims = Some(da.iter().chain(db).copied().collect());
    }
    out
}

/// Tensor product of amplitude vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn checked_subset(dims: &[usize], set: &[usize]) -> Result<Vec<bool>, KernelError> {
    let mut mask = vec![false; dims.len()];
    for &s in set {
        if s >= dims.len() || mask[s] {
            return Err(KernelError::BadSubset);
        }
        mask[s] = true;
    }
    Ok(mask)
}

fn digits(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

fn compose(d: &[usize], dims: &[usize]) -> usize {
    d.iter().zip(dims).fold(0, |acc, (&x, &n)| acc * n + x)
}

/// Traces out every subsystem not listed in `keep`; kept subsystems retain their order.
pub fn partial_trace(rho: &CMatrix, keep: &[usize]) -> Result<CMatrix, KernelError> {
    let dims = rho.dims.as_ref().ok_or(KernelError::MissingDims)?;
    if keep.is_empty() {
        return Err(KernelError::BadSubset);
    }
    let mask = checked_subset(dims, keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !mask[*k]).collect();
    let kdims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let tdims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = kdims.iter().product();
    let dt: usize = tdims.iter().product();

    // full index of (kept digits, traced digits)
    let mut full_index = vec![0usize; dk * dt];
    let mut full = vec![0usize; dims.len()];
    let mut kd = vec![0usize; kept.len()];
    let mut td = vec![0usize; traced.len()];
    for a in 0..dk {
        digits(a, &kdims, &mut kd);
        for t in 0..dt {
            digits(t, &tdims, &mut td);
            for (p, &k) in kept.iter().enumerate() {
                full[k] = kd[p];
            }
            for (p, &k) in traced.iter().enumerate() {
                full[k] = td[p];
            }
            full_index[a * dt + t] = compose(&full, dims);
        }
    }
    let mut out = CMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut s = C64::new(0.0, 0.0);
            for t in 0..dt {
                s += rho[(full_index[a * dt + t], full_index[b * dt + t])];
            }
            out[(a, b)] = s;
        }
    }
    out.dims = Some(kdims);
    Ok(out)
}

/// Transposes the listed subsystems.
pub fn partial_transpose(rho: &CMatrix, part: &[usize]) -> Result<CMatrix, KernelError> {
    let dims = rho.dims.as_ref().ok_or(KernelError::MissingDims)?;
    let mask = checked_subset(dims, part)?;
    let n = rho.rows;
    let mut out = CMatrix::zeros(n, n);
    out.dims = Some(dims.clone());
    let mut ri = vec![0usize; dims.len()];
    let mut ci = vec![0usize; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut ri);
        for j in 0..n {
            digits(j, dims, &mut ci);
            let mut r2 = ri.clone();
            let mut c2 = ci.clone();
            for k in 0..dims.len() {
                if mask[k] {
                    r2[k] = ci[k];
                    c2[k] = ri[k];
                }
            }
            out[(compose(&r2, dims), compose(&c2, dims))] = rho[(i, j)];
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EigResult {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Columns are the eigenvectors matching `values`.
    pub vectors: CMatrix,
}

impl EigResult {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }

    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::diag_real(&self.values);
        self.vectors.conjugate(&d)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eig_hermitian(h: &CMatrix) -> Result<EigResult, KernelError> {
    h.require_square()?;
    let dev = h.hermitian_deviation();
    if dev > HERM_TOL {
        return Err(KernelError::NotHermitian(dev));
    }
    let n = h.rows;
    let mut a = h.clone();
    a.dims = None;
    // symmetrize away sub-tolerance noise
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let m = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = m;
            a[(j, i)] = m.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let tol = JACOBI_OFF_TOL * a.frobenius().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += a[(i, j)].norm_sqr();
                    }
                }
            }
            s.sqrt()
        };
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // W = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on (p, q)
                let wpq = phase * sn;
                let wqp = -phase.conj() * sn;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs + akq * wqp;
                    a[(k, q)] = akp * wpq + akq * cs;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs + aqk * wqp.conj();
                    a[(q, k)] = apk * wpq.conj() + aqk * cs;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(app - t * mag, 0.0);
                a[(q, q)] = C64::new(aqq + t * mag, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs + vkq * wqp;
                    v[(k, q)] = vkp * wpq + vkq * cs;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));
    let values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut vec = v.col(k);
        normalize_phase(&mut vec);
        for (i, z) in vec.into_iter().enumerate() {
            vectors[(i, col)] = z;
        }
    }
    Ok(EigResult { values, vectors })
}

/// Makes the first non-negligible component real and positive.
pub fn normalize_phase(v: &mut [C64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-10 * scale.max(1e-300)) {
        let ph = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= ph);
    }
}

pub fn eigvals_hermitian(h: &CMatrix) -> Result<Vec<f64>, KernelError> {
    Ok(eig_hermitian(h)?.values)
}

/// Sum of singular values.
pub fn trace_norm(a: &CMatrix) -> Result<f64, KernelError> {
    a.require_square()?;
    if a.is_hermitian(HERM_TOL) {
        return Ok(eig_hermitian(a)?.values.iter().map(|x| x.abs()).sum());
    }
    let g = &a.dagger() * a;
    Ok(eig_hermitian(&g)?.values.iter().map(|x| x.max(0.0).sqrt()).sum())
}

/// Principal square root of a PSD matrix.
pub fn psd_sqrt(a: &CMatrix) -> Result<CMatrix, KernelError> {
    let e = eig_hermitian(a)?;
    let mut roots = Vec::with_capacity(e.values.len());
    for &l in &e.values {
        if l < -PSD_CLAMP {
            return Err(KernelError::NotPsd(l));
        }
        roots.push(l.max(0.0).sqrt());
    }
    let mut out = e.vectors.conjugate(&CMatrix::diag_real(&roots));
    out.dims = a.dims.clone();
    Ok(out)
}

/// Roots of `x^3 - 3Gx + H = 0` in trigonometric form, ordered as
/// `2sqrt(G)cos(2pi/3 + a)`, `2sqrt(G)cos(a)`, `2sqrt(G)cos(2pi/3 - a)` with `cos 3a = -H / (2 G^{3/2})`.
pub fn cardan_roots(g: f64, h: f64) -> Result<[f64; 3], KernelError> {
    let disc = h * h - 4.0 * g * g * g;
    if disc > 1e-12 {
        return Err(KernelError::ComplexRoots(disc));
    }
    let g = g.max(0.0);
    if g == 0.0 {
        return Ok([0.0; 3]);
    }
    let cos3 = (-h / (2.0 * g.powf(1.5))).clamp(-1.0, 1.0);
    let alpha = cos3.acos() / 3.0;
    let r = 2.0 * g.sqrt();
    Ok([
        r * (2.0 * PI / 3.0 + alpha).cos(),
        r * alpha.cos(),
        r * (2.0 * PI / 3.0 - alpha).cos(),
    ])
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]])
}

/// `[I, X, Y, Z]`.
pub fn paulis() -> [CMatrix; 4] {
    [CMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()]
}

/// Embeds a single-site operator at `site` of a register with local dimensions `dims`.
pub fn embed(op: &CMatrix, site: usize, dims: &[usize]) -> CMatrix {
    let mut out = CMatrix::identity(1);
    for (k, &d) in dims.iter().enumerate() {
        let f = if k == site { op.clone() } else { CMatrix::identity(d) };
        out = kron(&out, &f);
    }
    out.with_dims(dims).expect("embed dims")
}

/// Reorders the tensor factors of a state: output factor `k` is input factor `perm[k]`.
pub fn permute_subsystems(rho: &CMatrix, perm: &[usize]) -> Result<CMatrix, KernelError> {
    let dims = rho.dims.as_ref().ok_or(KernelError::MissingDims)?;
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() {
        return Err(KernelError::BadSubset);
    }
    for &p in perm {
        if p >= dims.len() || seen[p] {
            return Err(KernelError::BadSubset);
        }
        seen[p] = true;
    }
    let ndims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let n = rho.rows;
    let mut map = vec![0usize; n];
    let mut d = vec![0usize; dims.len()];
    let mut nd = vec![0usize; dims.len()];
    for (i, slot) in map.iter_mut().enumerate() {
        digits(i, dims, &mut d);
        for k in 0..perm.len() {
            nd[k] = d[perm[k]];
        }
        *slot = compose(&nd, &ndims);
    }
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(map[i], map[j])] = rho[(i, j)];
        }
    }
    out.dims = Some(ndims);
    Ok(out)
}

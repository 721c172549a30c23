//! Tripartite probe states that expose impossible local operations through incomparability.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::majorize::{compare, MajVerdict};
use crate::measures::shannon;
use crate::numkernel::{c, cardan_roots, eig_hermitian, partial_trace, CMatrix, KernelError, C64};
use crate::qstate::{qubit_ket, PureState};

pub type Ket = [C64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GadgetError {
    #[error("parameter out of range: {0}")]
    BadParam(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GadgetVerdict {
    Incomparable,
    EntanglementIncreased,
    NoViolation,
}

#[derive(Debug, Clone, Serialize)]
pub struct GadgetResult {
    pub initial_schmidt: Vec<f64>,
    pub final_schmidt: Vec<f64>,
    pub verdict: GadgetVerdict,
    pub a_initial: f64,
    pub b_initial: f64,
    pub a_final: f64,
    pub b_final: f64,
    pub entropy_initial: f64,
    pub entropy_final: f64,
    /// Cardan spectra from `(A, B)`, descending.
    pub closed_initial: Vec<f64>,
    pub closed_final: Vec<f64>,
    /// Largest gap between Cardan and numerical spectra.
    pub cardan_residual: f64,
    /// Norm of the post-operation ket.
    pub final_norm: f64,
    /// Diagnostic label for the closed-form case analysis.
    pub region: String,
    /// `ρ_A` change under the plain unitary leg, when one is run.
    pub plain_unitary_deviation: Option<f64>,
}

/// `(1/√3) Σ_i |i>_A |u_i>|v_i>` with phases on each branch.
pub fn probe_state(terms: &[(Ket, Ket); 3], phases: [f64; 3]) -> PureState {
    let mut amps = Vec::with_capacity(12);
    let s = 1.0 / 3f64.sqrt();
    for (i, (u, v)) in terms.iter().enumerate() {
        let ph = C64::from_polar(s, phases[i]);
        for x in u {
            for y in v {
                amps.push(ph * x * y);
            }
        }
    }
    PureState::normalized(amps, &[3, 2, 2]).expect("probe state")
}

/// Reduced state on the qutrit and the unnormalized norm of the ket.
fn qutrit_reduction(terms: &[(Ket, Ket); 3], phases: [f64; 3]) -> Result<(CMatrix, f64), GadgetError> {
    let mut amps = Vec::with_capacity(12);
    let s = 1.0 / 3f64.sqrt();
    for (i, (u, v)) in terms.iter().enumerate() {
        let ph = C64::from_polar(s, phases[i]);
        for x in u {
            for y in v {
                amps.push(ph * x * y);
            }
        }
    }
    let nrm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let rho = CMatrix::projector(&amps).with_dims(&[3, 2, 2])?;
    Ok((partial_trace(&rho, &[0])?, nrm))
}

/// `(A, B)` of `x³ - 3Ax + B = 0` with `x = 1 - 3λ`, read from the off-diagonal entries.
pub fn cubic_coefficients(rho: &CMatrix) -> (f64, f64) {
    let p = rho[(0, 1)] * 3.0;
    let q = rho[(0, 2)] * 3.0;
    let r = rho[(1, 2)] * 3.0;
    let a = (p.norm_sqr() + q.norm_sqr() + r.norm_sqr()) / 3.0;
    let b = 2.0 * (p * r * q.conj()).re;
    (a, b)
}

/// Spectrum `(1 - x)/3` over the Cardan roots, descending.
pub fn cardan_spectrum(a: f64, b: f64) -> Result<Vec<f64>, GadgetError> {
    let x = cardan_roots(a, b)?;
    let mut l: Vec<f64> = x.iter().map(|r| (1.0 - r) / 3.0).collect();
    l.sort_by(|p, q| q.total_cmp(p));
    Ok(l)
}

fn verdict_for(initial: &[f64], fin: &[f64]) -> Result<GadgetVerdict, GadgetError> {
    let v = compare(initial, fin).map_err(|e| GadgetError::BadParam(e.to_string()))?;
    Ok(match v {
        MajVerdict::Incomparable => GadgetVerdict::Incomparable,
        _ if shannon(fin) - shannon(initial) > 1e-9 => GadgetVerdict::EntanglementIncreased,
        _ => GadgetVerdict::NoViolation,
    })
}

fn evaluate(
    initial: &[(Ket, Ket); 3],
    fin: &[(Ket, Ket); 3],
    final_phases: [f64; 3],
    region: impl FnOnce(f64, f64, f64, f64) -> String,
) -> Result<GadgetResult, GadgetError> {
    let (ri, _) = qutrit_reduction(initial, [0.0; 3])?;
    let (rf, nf) = qutrit_reduction(fin, final_phases)?;
    let si: Vec<f64> = eig_hermitian(&ri)?.values.iter().map(|x| x.max(0.0)).collect();
    let sf: Vec<f64> = eig_hermitian(&rf)?.values.iter().map(|x| x.max(0.0)).collect();
    let (ai, bi) = cubic_coefficients(&ri);
    let (af, bf) = cubic_coefficients(&rf);
    let ci = cardan_spectrum(ai, bi)?;
    let cf = cardan_spectrum(af, bf)?;
    let resid = ci
        .iter()
        .zip(&si)
        .chain(cf.iter().zip(&sf))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let verdict = verdict_for(&si, &sf)?;
    Ok(GadgetResult {
        entropy_initial: shannon(&si),
        entropy_final: shannon(&sf),
        region: region(ai, bi, af, bf),
        initial_schmidt: si,
        final_schmidt: sf,
        verdict,
        a_initial: ai,
        b_initial: bi,
        a_final: af,
        b_final: bf,
        closed_initial: ci,
        closed_final: cf,
        cardan_residual: resid,
        final_norm: nf,
        plain_unitary_deviation: None,
    })
}

/// `α|0> + β|1> ↦ β*|0> - α*|1>`.
pub fn flip(k: Ket) -> Ket {
    [k[1].conj(), -k[0].conj()]
}

const KET0: Ket = [C64 { re: 1.0, im: 0.0 }, C64 { re: 0.0, im: 0.0 }];

/// Flip gadget over an arbitrary triple `(k0, k1, k2)`; the flip phases land on the three branches.
pub fn flip_gadget_kets(k: [Ket; 3], phases: [f64; 3]) -> Result<GadgetResult, GadgetError> {
    let initial = [(k[0], k[0]), (k[1], k[2]), (k[2], k[1])];
    let fin = [(k[0], flip(k[0])), (k[1], flip(k[2])), (k[2], flip(k[1]))];
    let mut r = evaluate(&initial, &fin, phases, |_, bi, _, bf| {
        format!("B={bi:.6e}, B'={bf:.6e}, gap={:.6e}", bi - bf)
    })?;
    r.region = format!("{} ({})", r.region, if (r.b_initial - r.b_final).abs() > 1e-12 { "B != B'" } else { "B = B'" });
    Ok(r)
}

fn check_unit(x: f64, y: f64, what: &str) -> Result<(), GadgetError> {
    if (x * x + y * y - 1.0).abs() > 1e-9 {
        return Err(GadgetError::BadParam(format!("{what}: squares sum to {}", x * x + y * y)));
    }
    Ok(())
}

/// Flip gadget on `|0>, a|0> + b|1>, c|0> + d e^{iθ}|1>` with flip phases `μ` (on `ψ`) and `ν` (on `φ`).
pub fn flip_gadget(a: f64, b: f64, cc: f64, d: f64, theta: f64, mu: f64, nu: f64) -> Result<GadgetResult, GadgetError> {
    check_unit(a, b, "a, b")?;
    check_unit(cc, d, "c, d")?;
    if !(0.0..=PI).contains(&theta) {
        return Err(GadgetError::BadParam(format!("theta {theta} outside [0, pi]")));
    }
    let psi: Ket = [c(a, 0.0), c(b, 0.0)];
    let phi: Ket = [c(cc, 0.0), C64::from_polar(d, theta)];
    flip_gadget_kets([KET0, psi, phi], [0.0, nu, mu])
}

/// Closed forms `(A, B, B')` of the flip gadget.
pub fn flip_closed_form(a: f64, b: f64, cc: f64, d: f64, theta: f64) -> (f64, f64, f64) {
    let ov = c(a * cc, 0.0) + C64::from_polar(b * d, theta);
    let a2c2 = a * a * cc * cc;
    let big_a = (2.0 * a2c2 + ov.norm_sqr().powi(2)) / 3.0;
    let big_b = 2.0 * a2c2 * ov.norm_sqr();
    let big_bp = 2.0 * a2c2 * (ov.conj() * ov.conj()).re;
    (big_a, big_b, big_bp)
}

/// `B - B' = 4a²b²c²d² sin²θ`.
pub fn coplanarity_gap(a: f64, b: f64, cc: f64, d: f64, theta: f64) -> f64 {
    4.0 * a * a * b * b * cc * cc * d * d * theta.sin().powi(2)
}

pub fn ket_x() -> Ket {
    [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]
}

pub fn ket_y() -> Ket {
    [c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]
}

pub fn ket_z() -> Ket {
    KET0
}

fn orth_x() -> Ket {
    [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]
}

fn orth_y() -> Ket {
    [c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)]
}

fn orth_z() -> Ket {
    [c(0.0, 0.0), c(1.0, 0.0)]
}

fn apply2(u: &CMatrix, k: Ket) -> Ket {
    let v = u.matvec(&k);
    [v[0], v[1]]
}

/// `[[cos θ, e^{iα} sin θ], [-e^{iβ} sin θ, e^{i(α+β)} cos θ]]`.
pub fn general_unitary(theta: f64, alpha: f64, beta: f64) -> CMatrix {
    let (s, co) = theta.sin_cos();
    CMatrix::from_rows(&[
        vec![c(co, 0.0), C64::from_polar(s, alpha)],
        vec![-C64::from_polar(s, beta), C64::from_polar(co, alpha + beta)],
    ])
}

/// Anti-unitary `Γ = C·U` applied to the last qubit of the `x, y, z` probe.
pub fn antiunitary_gadget(theta: f64, alpha: f64, beta: f64) -> Result<GadgetResult, GadgetError> {
    let u = general_unitary(theta, alpha, beta);
    let gamma = |k: Ket| {
        let v = apply2(&u, k);
        [v[0].conj(), v[1].conj()]
    };
    let (x, y, z) = (ket_x(), ket_y(), ket_z());
    let initial = [(z, z), (x, y), (y, x)];
    let fin = [(z, gamma(z)), (x, gamma(y)), (y, gamma(x))];
    let plain = [(z, apply2(&u, z)), (x, apply2(&u, y)), (y, apply2(&u, x))];
    let mut r = evaluate(&initial, &fin, [0.0; 3], |_, _, af, bf| format!("A={af:.6e}, B={bf:.6e}"))?;
    let (ri, _) = qutrit_reduction(&initial, [0.0; 3])?;
    let (rp, _) = qutrit_reduction(&plain, [0.0; 3])?;
    r.plain_unitary_deviation = Some(ri.max_abs_diff(&rp));
    Ok(r)
}

/// Map `|0_n> ↦ α|0_n> + β|1_n>` on the `x, y, z` probe with parallel pairs.
pub fn angle_preserving_gadget(alpha: C64, beta: C64) -> Result<GadgetResult, GadgetError> {
    let n = alpha.norm_sqr() + beta.norm_sqr();
    if (n - 1.0).abs() > 1e-9 {
        return Err(GadgetError::BadParam(format!("|alpha|^2 + |beta|^2 = {n}")));
    }
    let comb = |k0: Ket, k1: Ket| [alpha * k0[0] + beta * k1[0], alpha * k0[1] + beta * k1[1]];
    let (x, y, z) = (ket_x(), ket_y(), ket_z());
    let initial = [(z, z), (x, x), (y, y)];
    let fin = [(z, comb(z, orth_z())), (x, comb(x, orth_x())), (y, comb(y, orth_y()))];
    evaluate(&initial, &fin, [0.0; 3], |_, _, af, bf| angle_region(af, bf))
}

fn angle_region(a: f64, b: f64) -> String {
    let sb = if b > 1e-12 {
        "B>0"
    } else if b < -1e-12 {
        "B<0"
    } else {
        "B=0"
    };
    let sa = if (a - 0.25).abs() <= 1e-12 {
        "A=1/4"
    } else if a < 0.25 {
        "A<1/4"
    } else {
        "A>1/4"
    };
    format!("{sb}, {sa}")
}

/// Verdict from the closed-form extreme eigenvalues alone.
pub fn closed_form_verdict(initial: &[f64], a: f64, b: f64) -> Result<GadgetVerdict, GadgetError> {
    let f = cardan_spectrum(a, b)?;
    let (imax, imin) = (initial[0], initial[2]);
    let (fmax, fmin) = (f[0], f[2]);
    let tol = 1e-9;
    let i_prec_f = imax <= fmax + tol && imin >= fmin - tol;
    let f_prec_i = fmax <= imax + tol && fmin >= imin - tol;
    Ok(match (i_prec_f, f_prec_i) {
        (false, false) => GadgetVerdict::Incomparable,
        (true, true) => GadgetVerdict::NoViolation,
        (false, true) => GadgetVerdict::EntanglementIncreased,
        (true, false) => GadgetVerdict::NoViolation,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub verdict: GadgetVerdict,
}

/// Real `(α, β) = (cos t, sin t)` over `t ∈ [0, 2π)`.
pub fn angle_sweep(points: usize) -> Result<Vec<SweepRow>, GadgetError> {
    (0..points)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / points as f64;
            let (s, co) = t.sin_cos();
            let r = angle_preserving_gadget(c(co, 0.0), c(s, 0.0))?;
            Ok(SweepRow { t, alpha: co, beta: s, a: r.a_final, b: r.b_final, verdict: r.verdict })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MixedFlipReport {
    pub direction: [f64; 3],
    pub bloch_psi: [f64; 3],
    pub bloch_phi: [f64; 3],
    pub lambda_psi: Vec<f64>,
    pub lambda_phi: Vec<f64>,
    pub pair_incomparable: bool,
}

/// Single-qubit marginals of the two incomparable qutrit states in a composite basis along `n`.
pub fn mixed_flip_demo(n: [f64; 3]) -> Result<MixedFlipReport, GadgetError> {
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len < 1e-12 {
        return Err(GadgetError::BadParam("zero direction".into()));
    }
    let dir = [n[0] / len, n[1] / len, n[2] / len];
    let psi = qubit_ket(dir);
    let bar = flip(psi);
    let basis: [(Ket, Ket); 3] = [(psi, psi), (bar, psi), (bar, bar)];
    let marg = |lambda: &[f64]| -> Result<[f64; 3], GadgetError> {
        let mut amps = vec![C64::new(0.0, 0.0); 12];
        for (i, (u, v)) in basis.iter().enumerate() {
            let s = lambda[i].sqrt();
            for (j, x) in u.iter().enumerate() {
                for (k, y) in v.iter().enumerate() {
                    amps[i * 4 + j * 2 + k] += x * y * s;
                }
            }
        }
        let rho = CMatrix::projector(&amps).with_dims(&[3, 2, 2])?;
        let r1 = partial_trace(&rho, &[1])?;
        crate::qstate::qubit_to_bloch(&r1).map_err(|e| GadgetError::BadParam(e.to_string()))
    };
    let lp = vec![0.51, 0.30, 0.19];
    let lf = vec![0.49, 0.36, 0.15];
    let bp = marg(&lp)?;
    let bf = marg(&lf)?;
    let inc = compare(&lp, &lf).map_err(|e| GadgetError::BadParam(e.to_string()))? == MajVerdict::Incomparable;
    Ok(MixedFlipReport { direction: dir, bloch_psi: bp, bloch_phi: bf, lambda_psi: lp, lambda_phi: lf, pair_incomparable: inc })
}

fn random_unit<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `n₁ · (n₂ × n₃)`; zero iff the three directions share a great circle.
pub fn triple_product(n: &[[f64; 3]; 3]) -> f64 {
    dot(n[0], cross(n[1], n[2]))
}

/// Three random points on a random great circle.
pub fn random_coplanar_triple<R: Rng>(rng: &mut R) -> [[f64; 3]; 3] {
    let m = random_unit(rng);
    let mut e1 = cross(m, random_unit(rng));
    while dot(e1, e1) < 1e-3 {
        e1 = cross(m, random_unit(rng));
    }
    let l = dot(e1, e1).sqrt();
    let e1 = e1.map(|x| x / l);
    let e2 = cross(m, e1);
    std::array::from_fn(|_| {
        let t = rng.gen_range(0.0..2.0 * PI);
        let (s, co) = t.sin_cos();
        [co * e1[0] + s * e2[0], co * e1[1] + s * e2[1], co * e1[2] + s * e2[2]]
    })
}

/// Three random directions with `|n₁·(n₂×n₃)| ≥ margin`.
pub fn random_noncoplanar_triple<R: Rng>(rng: &mut R, margin: f64) -> [[f64; 3]; 3] {
    loop {
        let t: [[f64; 3]; 3] = std::array::from_fn(|_| random_unit(rng));
        if triple_product(&t).abs() >= margin {
            return t;
        }
    }
}

pub fn kets_for(dirs: &[[f64; 3]; 3]) -> [Ket; 3] {
    dirs.map(qubit_ket)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip_is_orthogonal() {
        let k: Ket = [c(0.6, 0.1), C64::from_polar(0.79, 1.2)];
        let f = flip(k);
        let ip = k[0].conj() * f[0] + k[1].conj() * f[1];
        assert!(ip.norm() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized_params() {
        assert!(flip_gadget(0.5, 0.5, 1.0, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(angle_preserving_gadget(c(1.0, 0.0), c(1.0, 0.0)).is_err());
    }
}

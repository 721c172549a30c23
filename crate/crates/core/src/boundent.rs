//! Bound entangled constructions: the Smolin-type family on even qubit counts, the
//! Horodecki 3x3 state and the Tiles unextendible product basis.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::numkernel::{
    c, eig_hermitian, eigvals_hermitian, kron, partial_trace, partial_transpose, pauli_x, pauli_z,
    permute_subsystems, CMatrix, KernelError, C64,
};
use crate::qstate::{bell, random_pure_with, BellKind, PureState};

/// Largest qubit count accepted; counts above `FULL_VERIFY_MAX` get reduced verification.
pub const MAX_QUBITS: usize = 10;
pub const FULL_VERIFY_MAX: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("qubit count {0} must be even and at least 4")]
    OddN(usize),
    #[error("qubit count {0} exceeds the limit of {MAX_QUBITS}")]
    TooLarge(usize),
    #[error("unknown state label {0:?}")]
    BadLabel(String),
    #[error("parameter out of range: {0}")]
    BadParam(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Labels of the four family members, in codebook order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BeLabel {
    RhoPlus,
    RhoMinus,
    SigmaPlus,
    SigmaMinus,
}

impl BeLabel {
    pub const ALL: [BeLabel; 4] = [BeLabel::RhoPlus, BeLabel::RhoMinus, BeLabel::SigmaPlus, BeLabel::SigmaMinus];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> BeLabel {
        Self::ALL[i & 3]
    }

    /// Parity family: 0 for ρ, 1 for σ.
    pub fn family_bit(self) -> usize {
        self.index() >> 1
    }

    /// Superposition sign: 0 for +, 1 for -.
    pub fn sign_bit(self) -> usize {
        self.index() & 1
    }

    pub fn name(self) -> &'static str {
        match self {
            BeLabel::RhoPlus => "rho+",
            BeLabel::RhoMinus => "rho-",
            BeLabel::SigmaPlus => "sigma+",
            BeLabel::SigmaMinus => "sigma-",
        }
    }

    pub fn parse(s: &str) -> Result<BeLabel, BoundError> {
        match s {
            "rho+" | "rho_plus" | "0" => Ok(BeLabel::RhoPlus),
            "rho-" | "rho_minus" | "1" => Ok(BeLabel::RhoMinus),
            "sigma+" | "sigma_plus" | "2" => Ok(BeLabel::SigmaPlus),
            "sigma-" | "sigma_minus" | "3" => Ok(BeLabel::SigmaMinus),
            _ => Err(BoundError::BadLabel(s.to_string())),
        }
    }
}

/// Bell state paired with measured label `k` inside member `l`: bits combine by XOR.
pub fn pairing(l: BeLabel, k: BeLabel) -> BellKind {
    BellKind::ALL[l.index() ^ k.index()]
}

#[derive(Debug, Clone)]
pub struct BEFamily {
    pub n_qubits: usize,
    /// `[ρ⁺, ρ⁻, σ⁺, σ⁻]`.
    pub states: [CMatrix; 4],
    pub support_vectors: [Vec<PureState>; 4],
}

impl BEFamily {
    pub fn state(&self, l: BeLabel) -> &CMatrix {
        &self.states[l.index()]
    }
}

fn check_n(n: usize) -> Result<(), BoundError> {
    if n < 4 || n % 2 == 1 {
        return Err(BoundError::OddN(n));
    }
    if n > MAX_QUBITS {
        return Err(BoundError::TooLarge(n));
    }
    Ok(())
}

fn bell_projectors() -> [CMatrix; 4] {
    BellKind::ALL.map(|k| bell(k).density())
}

/// Support sets by first-bit and parity: strings start with 0, ρ-members have an even count of ones.
pub fn support_strings(n: usize, l: BeLabel) -> Vec<usize> {
    let half = 1usize << (n - 1);
    (0..half).filter(|x| (x.count_ones() as usize) % 2 == l.family_bit()).collect()
}

fn support_vectors(n: usize, l: BeLabel) -> Vec<PureState> {
    let dim = 1usize << n;
    let mask = dim - 1;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if l.sign_bit() == 0 { h } else { -h };
    support_strings(n, l)
        .into_iter()
        .map(|x| {
            let mut amps = vec![c(0.0, 0.0); dim];
            amps[x] = c(h, 0.0);
            amps[x ^ mask] = c(sign, 0.0);
            PureState::new(amps, &vec![2; n]).expect("support vector")
        })
        .collect()
}

fn all_supports(n: usize) -> [Vec<PureState>; 4] {
    BeLabel::ALL.map(|l| support_vectors(n, l))
}

/// Direct construction as uniform mixtures over the parity-partitioned supports.
pub fn be_family_direct(n: usize) -> Result<BEFamily, BoundError> {
    check_n(n)?;
    let dim = 1usize << n;
    let mask = dim - 1;
    let w = 1.0 / (1usize << (n - 2)) as f64;
    let states = BeLabel::ALL.map(|l| {
        let mut m = CMatrix::zeros(dim, dim);
        let s = if l.sign_bit() == 0 { 1.0 } else { -1.0 };
        for x in support_strings(n, l) {
            let y = x ^ mask;
            m[(x, x)] += c(w / 2.0, 0.0);
            m[(y, y)] += c(w / 2.0, 0.0);
            m[(x, y)] += c(s * w / 2.0, 0.0);
            m[(y, x)] += c(s * w / 2.0, 0.0);
        }
        m.with_dims(&vec![2; n]).expect("dims")
    });
    Ok(BEFamily { n_qubits: n, states, support_vectors: all_supports(n) })
}

fn recursive_states(n: usize) -> [CMatrix; 4] {
    if n == 2 {
        return bell_projectors();
    }
    let prev = recursive_states(n - 2);
    let bells = bell_projectors();
    BeLabel::ALL.map(|l| {
        let dim = 1usize << n;
        let mut acc = CMatrix::zeros(dim, dim);
        for k in BeLabel::ALL {
            let b = &bells[pairing(l, k) as usize];
            acc = &acc + &kron(&prev[k.index()], b);
        }
        acc.scale_real(0.25).with_dims(&vec![2; n]).expect("dims")
    })
}

/// Recursive Bell-correlated construction starting from the Bell projectors.
pub fn be_family(n: usize) -> Result<BEFamily, BoundError> {
    check_n(n)?;
    Ok(BEFamily { n_qubits: n, states: recursive_states(n), support_vectors: all_supports(n) })
}

/// Uniform mixture over a set of pure states.
pub fn uniform_mixture(vs: &[PureState]) -> CMatrix {
    let d = vs[0].dim();
    let mut m = CMatrix::zeros(d, d);
    for v in vs {
        m = &m + &v.density();
    }
    m.scale_real(1.0 / vs.len() as f64)
}

/// Each member as a weighted list of Bell-projector products, pair by pair.
pub fn bell_expansion(n: usize, l: BeLabel) -> Vec<(Vec<BellKind>, f64)> {
    if n == 2 {
        return vec![(vec![BellKind::ALL[l.index()]], 1.0)];
    }
    let mut out = Vec::new();
    for k in BeLabel::ALL {
        for (mut word, w) in bell_expansion(n - 2, k) {
            word.push(pairing(l, k));
            out.push((word, w / 4.0));
        }
    }
    out
}

pub fn from_bell_expansion(terms: &[(Vec<BellKind>, f64)]) -> CMatrix {
    let n = terms[0].0.len() * 2;
    let dim = 1usize << n;
    let bells = bell_projectors();
    let mut m = CMatrix::zeros(dim, dim);
    for (word, w) in terms {
        let mut p = CMatrix::identity(1);
        for &b in word {
            p = kron(&p, &bells[b as usize]);
        }
        m = &m + &p.scale_real(*w);
    }
    m.with_dims(&vec![2; n]).expect("dims")
}

/// Four-qubit `ρ⁺` rebuilt as `¼ Σ P[B]⊗P[B]` in the pairings AB:CD, AC:BD, AD:BC.
pub fn smolin_pairing_residuals() -> [f64; 3] {
    let target = recursive_states(4)[0].clone();
    let bells = bell_projectors();
    let mut sum = CMatrix::zeros(16, 16);
    for b in &bells {
        sum = &sum + &kron(b, b);
    }
    let base = sum.scale_real(0.25).with_dims(&[2, 2, 2, 2]).expect("dims");
    [[0, 1, 2, 3], [0, 2, 1, 3], [0, 2, 3, 1]].map(|perm| {
        let m = permute_subsystems(&base, &perm).expect("perm");
        m.max_abs_diff(&target)
    })
}

/// `(U on qubit k) ρ (U on qubit k)†` without forming the full operator.
pub fn conjugate_qubit(rho: &CMatrix, u: &CMatrix, k: usize, n: usize) -> CMatrix {
    let dim = rho.rows();
    let bit = 1usize << (n - 1 - k);
    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let ib = usize::from(i & bit != 0);
        for j in 0..dim {
            let jb = usize::from(j & bit != 0);
            let mut s = C64::new(0.0, 0.0);
            for a in 0..2 {
                let ia = if a == 1 { i | bit } else { i & !bit };
                for b in 0..2 {
                    let jb2 = if b == 1 { j | bit } else { j & !bit };
                    s += u[(ib, a)] * rho[(ia, jb2)] * u[(jb, b)].conj();
                }
            }
            out[(i, j)] = s;
        }
    }
    match rho.dims() {
        Some(d) => out.with_dims(d).expect("dims"),
        None => out,
    }
}

/// `[I, σ_z, σ_x, iσ_y]`, mapping `ρ⁺` onto `ρ⁺, ρ⁻, σ⁺, σ⁻` on any single qubit.
pub fn pauli_generators() -> [CMatrix; 4] {
    let iy = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
    [CMatrix::identity(2), pauli_z(), pauli_x(), iy]
}

#[derive(Debug, Clone, Serialize)]
pub struct CutEvidence {
    pub part: Vec<usize>,
    /// Minimum eigenvalue of the partial transpose, per member.
    pub min_eigenvalue: [f64; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub n_qubits: usize,
    pub orthogonal: bool,
    pub permutation_symmetric: bool,
    pub even_cut_ppt: bool,
    pub single_vs_rest_npt: bool,
    pub pauli_connected: bool,
    pub reduced_max_mixed: bool,
    pub unlock_ok: bool,
    pub max_overlap: f64,
    pub max_permutation_deviation: f64,
    pub max_pauli_deviation: f64,
    pub max_marginal_deviation: f64,
    pub even_cuts: Vec<CutEvidence>,
    pub single_cuts: Vec<CutEvidence>,
    /// False when only a subset of cuts was examined.
    pub full: bool,
}

impl FamilyReport {
    pub fn all_pass(&self) -> bool {
        self.orthogonal
            && self.permutation_symmetric
            && self.even_cut_ppt
            && self.single_vs_rest_npt
            && self.pauli_connected
            && self.reduced_max_mixed
            && self.unlock_ok
    }
}

fn min_pt_eig(rho: &CMatrix, part: &[usize]) -> Result<f64, BoundError> {
    let pt = partial_transpose(rho, part)?;
    Ok(*eigvals_hermitian(&pt)?.last().unwrap_or(&0.0))
}

/// Bipartitions containing qubit 0 with an even number of qubits on both sides.
pub fn even_cuts(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << (n - 1)) {
        let part: Vec<usize> = std::iter::once(0).chain((1..n).filter(|k| mask & (1 << (k - 1)) != 0)).collect();
        if part.len() % 2 == 0 && part.len() < n {
            out.push(part);
        }
    }
    out
}

fn cut_evidence(fam: &BEFamily, part: Vec<usize>) -> Result<CutEvidence, BoundError> {
    let mut mins = [0.0; 4];
    for (i, s) in fam.states.iter().enumerate() {
        mins[i] = min_pt_eig(s, &part)?;
    }
    Ok(CutEvidence { part, min_eigenvalue: mins })
}

/// Checks orthogonality, symmetry, cut structure, Pauli connection, marginals and unlocking.
pub fn verify_family(fam: &BEFamily) -> Result<FamilyReport, BoundError> {
    let n = fam.n_qubits;
    check_n(n)?;
    let full = n <= FULL_VERIFY_MAX;
    let dim = 1usize << n;

    let mut max_overlap: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                let ov = (&fam.states[i] * &fam.states[j]).trace().norm();
                max_overlap = max_overlap.max(ov);
            }
        }
    }

    let mut perm_dev: f64 = 0.0;
    for k in 0..n - 1 {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(k, k + 1);
        for s in &fam.states {
            perm_dev = perm_dev.max(permute_subsystems(s, &perm)?.max_abs_diff(s));
        }
    }

    let cuts: Vec<Vec<usize>> = if full { even_cuts(n) } else { (1..n / 2).map(|k| (0..2 * k).collect()).collect() };
    let even: Vec<CutEvidence> = cuts.into_iter().map(|p| cut_evidence(fam, p)).collect::<Result<_, _>>()?;
    let singles: Vec<usize> = if full { (0..n).collect() } else { vec![0] };
    let single: Vec<CutEvidence> = singles.into_iter().map(|k| cut_evidence(fam, vec![k])).collect::<Result<_, _>>()?;
    let even_ppt = even.iter().all(|e| e.min_eigenvalue.iter().all(|&x| x >= -1e-9));
    let single_npt = single.iter().all(|e| e.min_eigenvalue.iter().all(|&x| x < -1e-9));

    let gens = pauli_generators();
    let mut pauli_dev: f64 = 0.0;
    for (i, g) in gens.iter().enumerate() {
        let m = conjugate_qubit(&fam.states[0], g, 0, n);
        pauli_dev = pauli_dev.max(m.max_abs_diff(&fam.states[i]));
    }

    let target = CMatrix::identity(dim / 2).scale_real(2.0 / dim as f64);
    let mut marg_dev: f64 = 0.0;
    let sites: Vec<usize> = if full { (0..n).collect() } else { vec![0, n - 1] };
    for s in &fam.states {
        for &k in &sites {
            let keep: Vec<usize> = (0..n).filter(|&j| j != k).collect();
            marg_dev = marg_dev.max(partial_trace(s, &keep)?.max_abs_diff(&target));
        }
    }

    let mut unlock_ok = true;
    for l in BeLabel::ALL {
        let u = unlock(fam, l)?;
        unlock_ok &= u.outcomes.iter().all(|o| (o.probability - 0.25).abs() < 1e-9 && o.fidelity >= 1.0 - 1e-9);
    }

    Ok(FamilyReport {
        n_qubits: n,
        orthogonal: max_overlap <= 1e-12,
        permutation_symmetric: perm_dev <= 1e-12,
        even_cut_ppt: even_ppt,
        single_vs_rest_npt: single_npt,
        pauli_connected: pauli_dev <= 1e-12,
        reduced_max_mixed: marg_dev <= 1e-12,
        unlock_ok,
        max_overlap,
        max_permutation_deviation: perm_dev,
        max_pauli_deviation: pauli_dev,
        max_marginal_deviation: marg_dev,
        even_cuts: even,
        single_cuts: single,
        full,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct UnlockOutcome {
    /// Label of the projector measured on the first `n-2` qubits.
    pub measured: String,
    pub probability: f64,
    pub predicted: BellKind,
    pub fidelity: f64,
    #[serde(skip)]
    pub conditional: CMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnlockResult {
    pub n_qubits: usize,
    pub label: BeLabel,
    pub outcomes: Vec<UnlockOutcome>,
}

fn bell_name(b: BellKind) -> &'static str {
    match b {
        BellKind::PhiPlus => "Phi+",
        BellKind::PhiMinus => "Phi-",
        BellKind::PsiPlus => "Psi+",
        BellKind::PsiMinus => "Psi-",
    }
}

/// The first `n-2` qubits measure their support projectors; the last pair is left in a Bell state.
pub fn unlock(fam: &BEFamily, l: BeLabel) -> Result<UnlockResult, BoundError> {
    let n = fam.n_qubits;
    check_n(n)?;
    let (projectors, names): (Vec<CMatrix>, Vec<String>) = if n == 4 {
        (bell_projectors().to_vec(), BellKind::ALL.iter().map(|&b| bell_name(b).to_string()).collect())
    } else {
        let scale = (1usize << (n - 4)) as f64;
        (
            recursive_states(n - 2).iter().map(|s| s.scale_real(scale)).collect(),
            BeLabel::ALL.iter().map(|k| k.name().to_string()).collect(),
        )
    };
    let rho = fam.state(l);
    let id4 = CMatrix::identity(4);
    let mut outcomes = Vec::with_capacity(4);
    for (k, p) in projectors.iter().enumerate() {
        let big = kron(p, &id4).with_dims(&vec![2; n])?;
        let m = (&(&big * rho) * &big).with_dims(&vec![2; n])?;
        let prob = m.trace().re;
        let cond = partial_trace(&m, &[n - 2, n - 1])?.scale_real(1.0 / prob);
        let predicted = pairing(l, BeLabel::from_index(k));
        let fidelity = bell(predicted).density().data().iter().zip(cond.data()).map(|(a, b)| (a.conj() * b).re).sum();
        outcomes.push(UnlockOutcome { measured: names[k].clone(), probability: prob, predicted, fidelity, conditional: cond });
    }
    Ok(UnlockResult { n_qubits: n, label: l, outcomes })
}

/// Marginal on the last two qubits after tracing out all others.
pub fn last_pair_marginal(rho: &CMatrix, n: usize) -> Result<CMatrix, BoundError> {
    Ok(partial_trace(rho, &[n - 2, n - 1])?)
}

fn ket3(v: [f64; 3]) -> Vec<C64> {
    v.iter().map(|&x| c(x, 0.0)).collect()
}

fn product3(a: [f64; 3], b: [f64; 3]) -> PureState {
    PureState::normalized(crate::numkernel::kron_vec(&ket3(a), &ket3(b)), &[3, 3]).expect("product")
}

/// The `a`-independent NPT part of the Horodecki state.
pub fn horodecki_insep() -> CMatrix {
    let mut m = CMatrix::identity(9);
    let mut ghz = vec![c(0.0, 0.0); 9];
    for k in 0..3 {
        ghz[4 * k] = c(1.0, 0.0);
    }
    m = &m + &CMatrix::projector(&ghz);
    for idx in [0, 4, 8, 6] {
        m[(idx, idx)] -= c(1.0, 0.0);
    }
    m.scale_real(1.0 / 8.0).with_dims(&[3, 3]).expect("dims")
}

/// `(8a ρ_ins + |φ_a><φ_a|)/(8a + 1)`.
pub fn horodecki_state(a: f64) -> Result<CMatrix, BoundError> {
    if !(0.0..=1.0).contains(&a) {
        return Err(BoundError::BadParam(format!("a = {a} outside [0, 1]")));
    }
    let phi = product3([0.0, 0.0, 1.0], [((1.0 + a) / 2.0).sqrt(), 0.0, ((1.0 - a) / 2.0).sqrt()]);
    let m = &horodecki_insep().scale_real(8.0 * a) + &phi.density();
    Ok(m.scale_real(1.0 / (8.0 * a + 1.0)).with_dims(&[3, 3])?)
}

/// The five Tiles product states.
pub fn tiles_upb() -> Vec<PureState> {
    vec![
        product3([1.0, 0.0, 0.0], [1.0, -1.0, 0.0]),
        product3([1.0, -1.0, 0.0], [0.0, 0.0, 1.0]),
        product3([0.0, 0.0, 1.0], [0.0, 1.0, -1.0]),
        product3([0.0, 1.0, -1.0], [1.0, 0.0, 0.0]),
        product3([1.0, 1.0, 1.0], [1.0, 1.0, 1.0]),
    ]
}

/// Projector onto the complement of a product set.
pub fn complement_projector(set: &[PureState]) -> CMatrix {
    let d = set[0].dim();
    let mut m = CMatrix::identity(d);
    for s in set {
        m = &m - &s.density();
    }
    m
}

/// `(I - Σ|ψ_j><ψ_j|)/(9 - 5)`.
pub fn upb_complement() -> CMatrix {
    let set = tiles_upb();
    complement_projector(&set).scale_real(1.0 / (9 - set.len()) as f64).with_dims(&[3, 3]).expect("dims")
}

fn top_vector(m: &CMatrix) -> Result<(f64, Vec<C64>), BoundError> {
    let e = eig_hermitian(m)?;
    Ok((e.values[0], e.vector(0)))
}

/// Seesaw maximization of `<u⊗v|Π|u⊗v>` over 3x3 product states.
fn seesaw(pi: &CMatrix, start: Vec<C64>) -> Result<f64, BoundError> {
    let mut u = start;
    let mut best = 0.0;
    for _ in 0..500 {
        let mv = CMatrix::from_fn(3, 3, |j, l| {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..3 {
                for k in 0..3 {
                    s += u[i].conj() * pi[(i * 3 + j, k * 3 + l)] * u[k];
                }
            }
            s
        });
        let (_, v) = top_vector(&mv)?;
        let mu = CMatrix::from_fn(3, 3, |i, k| {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..3 {
                for l in 0..3 {
                    s += v[j].conj() * pi[(i * 3 + j, k * 3 + l)] * v[l];
                }
            }
            s
        });
        let (val, nu) = top_vector(&mu)?;
        u = nu;
        if val - best < 1e-14 {
            best = f64::max(best, val);
            break;
        }
        best = val;
    }
    Ok(best)
}

/// Running best seesaw value over `trials` random restarts.
pub fn product_overlap_scores(set: &[PureState], trials: usize, seed: u64) -> Result<Vec<f64>, BoundError> {
    if trials == 0 {
        return Err(BoundError::BadParam("trials must be at least 1".into()));
    }
    let pi = complement_projector(set);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let start = random_pure_with(&[3], &mut rng).amps().to_vec();
        best = best.max(seesaw(&pi, start)?);
        out.push(best);
    }
    Ok(out)
}

/// Best product-state weight on the Tiles complement; strictly below 1 for an unextendible set.
pub fn upb_unextendibility_score(trials: usize, seed: u64) -> Result<f64, BoundError> {
    Ok(*product_overlap_scores(&tiles_upb(), trials, seed)?.last().expect("nonempty"))
}

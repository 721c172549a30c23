//! Deterministic LOCC convertibility of pure bipartite states and its assisted variants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::majorize::{aligned, compare, majorizes, partial_sums, sorted_desc, MajError, MajVerdict, ProbVector, MAJ_TOL};
use crate::measures::{binary_entropy, shannon};

pub const CATALYST_STEP: f64 = 1e-3;
pub const COOP_SAMPLES: usize = 100_000;
pub const MULTICOPY_LIMIT: f64 = 1e6;
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoccError {
    #[error(transparent)]
    Maj(#[from] MajError),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("Schmidt ranks differ or are below 3 ({0} vs {1})")]
    RankMismatch(usize, usize),
    #[error("pair is not an incomparable pair of rank-3 vectors")]
    NotIncomparable3x3,
    #[error("no auxiliary pair found")]
    NoPlanFound,
    #[error("no admissible parameter range")]
    EmptyRange,
    #[error("source vector has tied Schmidt coefficients")]
    Degenerate,
    #[error("plan rejected: {0}")]
    InvalidPlan(String),
}

/// Entries above this are counted towards the Schmidt rank.
pub const RANK_TOL: f64 = 1e-10;

fn stripped(x: &[f64]) -> Vec<f64> {
    sorted_desc(x).into_iter().filter(|&v| v > RANK_TOL).collect()
}

/// Sorted outer product of two vectors.
pub fn tensor(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    sorted_desc(&out)
}

pub fn tensor_power(a: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..k {
        out = tensor(&out, a);
    }
    out
}

/// Descending vectors and partial sums behind a Nielsen check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MajTable {
    pub source: Vec<f64>,
    pub target: Vec<f64>,
    pub source_partial: Vec<f64>,
    pub target_partial: Vec<f64>,
    pub holds: bool,
}

pub fn maj_table(source: &[f64], target: &[f64]) -> Result<MajTable, LoccError> {
    let holds = majorizes(source, target)?;
    let (s, t) = aligned(source, target);
    Ok(MajTable { source_partial: partial_sums(&s), target_partial: partial_sums(&t), source: s, target: t, holds })
}

/// `a → b` under deterministic LOCC.
pub fn nielsen(a: &[f64], b: &[f64]) -> Result<bool, LoccError> {
    Ok(majorizes(a, b)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pattern3 {
    /// `a₁ > b₁ > b₂ > a₂ > a₃ > b₃`
    AType,
    /// `b₁ > a₁ > a₂ > b₂ > b₃ > a₃`
    BType,
    Unmatched,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PairClass {
    pub verdict: MajVerdict,
    pub pattern_3x3: Option<Pattern3>,
    pub strong: bool,
    pub catalysis_possible: bool,
}

fn chain(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1] - TIE_TOL)
}

pub fn classify(a: &[f64], b: &[f64]) -> Result<PairClass, LoccError> {
    let verdict = compare(a, b)?;
    let (x, y) = aligned(a, b);
    let ra = stripped(a).len();
    let rb = stripped(b).len();
    let d = ra.max(rb).max(1);
    let (a1, ad, b1, bd) = (x[0], x[d - 1], y[0], y[d - 1]);
    let incomparable = verdict == MajVerdict::Incomparable;
    let strong = incomparable && ((a1 < b1 - TIE_TOL && ad < bd - TIE_TOL) || (a1 > b1 + TIE_TOL && ad > bd + TIE_TOL));
    let catalysis_possible = a1 <= b1 + TIE_TOL && ad >= bd - TIE_TOL;
    let pattern_3x3 = if ra == 3 && rb == 3 && incomparable {
        if chain(&[x[0], y[0], y[1], x[1], x[2], y[2]]) {
            Some(Pattern3::AType)
        } else if chain(&[y[0], x[0], x[1], y[1], y[2], x[2]]) {
            Some(Pattern3::BType)
        } else {
            Some(Pattern3::Unmatched)
        }
    } else {
        None
    };
    Ok(PairClass { verdict, pattern_3x3, strong, catalysis_possible })
}

/// `a^{⊗k} → b^{⊗k}`.
pub fn multicopy(a: &[f64], b: &[f64], k: usize) -> Result<bool, LoccError> {
    let ra = stripped(a);
    let rb = stripped(b);
    let size = ((ra.len() * rb.len()) as f64).powi(k as i32);
    if size > MULTICOPY_LIMIT {
        return Err(LoccError::TooLarge(format!("(rank product)^{k} = {size}")));
    }
    nielsen(&tensor_power(&ra, k), &tensor_power(&rb, k))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CatalystResult {
    pub c: f64,
    pub catalyst: Vec<f64>,
    /// Grid interval of working catalysts `[first, last]`.
    pub interval: (f64, f64),
    pub table: MajTable,
}

/// Scans `c ∈ [1/2, 1)` for a two-qubit catalyst `(c, 1 - c)`.
pub fn find_catalyst_2x2(a: &[f64], b: &[f64], grid_step: f64) -> Result<Option<CatalystResult>, LoccError> {
    if !classify(a, b)?.catalysis_possible || grid_step <= 0.0 {
        return Ok(None);
    }
    let mut first: Option<f64> = None;
    let mut last = 0.0;
    let mut i = 0usize;
    loop {
        let c = 0.5 + i as f64 * grid_step;
        if c >= 1.0 - 1e-15 {
            break;
        }
        let cat = [c, 1.0 - c];
        if nielsen(&tensor(a, &cat), &tensor(b, &cat))? {
            if first.is_none() {
                first = Some(c);
            }
            last = c;
        } else if first.is_some() {
            break;
        }
        i += 1;
    }
    match first {
        None => Ok(None),
        Some(c) => {
            let cat = vec![c, 1.0 - c];
            let table = maj_table(&tensor(a, &cat), &tensor(b, &cat))?;
            Ok(Some(CatalystResult { c, catalyst: cat, interval: (c, last), table }))
        }
    }
}

fn equal_rank(a: &[f64], b: &[f64]) -> Result<(Vec<f64>, Vec<f64>), LoccError> {
    let x = stripped(a);
    let y = stripped(b);
    if x.len() != y.len() || x.len() < 3 {
        return Err(LoccError::RankMismatch(x.len(), y.len()));
    }
    Ok((x, y))
}

/// `a ⊗ Φ_{d-1} → b ⊗ |00>` via `k a₁/(d-1) ≤ Σ_{i≤k} b_i`.
pub fn assist_max_entangled(a: &[f64], b: &[f64]) -> Result<bool, LoccError> {
    let (x, y) = equal_rank(a, b)?;
    let d = x.len();
    let ps = partial_sums(&y);
    Ok((1..d).all(|k| k as f64 * x[0] / (d - 1) as f64 <= ps[k - 1] + MAJ_TOL))
}

/// The same question answered by an explicit majorization of the product vectors.
pub fn assist_max_entangled_direct(a: &[f64], b: &[f64]) -> Result<bool, LoccError> {
    let (x, y) = equal_rank(a, b)?;
    let d = x.len();
    nielsen(&tensor(&x, &ProbVector::uniform(d - 1)), &y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AssistKind {
    MaxEntangledLowerRank,
    TwoByTwo,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AssistPlan {
    pub kind: AssistKind,
    pub resource: Vec<f64>,
    pub consumed: bool,
    pub c0: Option<f64>,
    pub e0: Option<f64>,
    pub table: MajTable,
}

pub fn assist_plan_max_entangled(a: &[f64], b: &[f64]) -> Result<AssistPlan, LoccError> {
    let (x, y) = equal_rank(a, b)?;
    let r = ProbVector::uniform(x.len() - 1).into_vec();
    let table = maj_table(&tensor(&x, &r), &y)?;
    if !table.holds {
        return Err(LoccError::InvalidPlan("maximally entangled resource of rank d-1 is insufficient".into()));
    }
    Ok(AssistPlan { kind: AssistKind::MaxEntangledLowerRank, resource: r, consumed: true, c0: None, e0: None, table })
}

/// Least-entangled two-qubit resource `(c₀, 1 - c₀)` enabling `a ⊗ χ → b ⊗ |00>`.
pub fn min_assist_3x3(a: &[f64], b: &[f64]) -> Result<AssistPlan, LoccError> {
    let x = stripped(a);
    let y = stripped(b);
    if x.len() != 3 || y.len() != 3 || compare(&x, &y)? != MajVerdict::Incomparable {
        return Err(LoccError::NotIncomparable3x3);
    }
    let c0 = if x[0] < y[0] && x[0] + x[1] > y[0] + y[1] {
        (y[0] + y[1]) / (x[0] + x[1])
    } else {
        y[0] / x[0]
    };
    let resource = vec![c0, 1.0 - c0];
    let table = maj_table(&tensor(&x, &resource), &y)?;
    if !table.holds {
        return Err(LoccError::InvalidPlan(format!("resource ({c0}, {}) fails the direct check", 1.0 - c0)));
    }
    let e0 = binary_entropy(c0.clamp(0.0, 1.0)).ok();
    Ok(AssistPlan { kind: AssistKind::TwoByTwo, resource, consumed: true, c0: Some(c0), e0, table })
}

/// Two-qubit states `((d-i)/(d-i+1), 1/(d-i+1))` for `i = 1..d-1`.
pub fn maxent_ladder(d: usize) -> Vec<ProbVector> {
    (1..d.max(2))
        .map(|i| {
            let m = (d - i + 1) as f64;
            ProbVector::new(vec![(m - 1.0) / m, 1.0 / m]).expect("ladder rung")
        })
        .collect()
}

/// Checks that the ladder's product converts into a maximally entangled state of rank `d`.
pub fn maxent_ladder_certified(d: usize) -> Result<bool, LoccError> {
    let mut prod = vec![1.0];
    for r in maxent_ladder(d) {
        prod = tensor(&prod, &r);
    }
    nielsen(&prod, &ProbVector::uniform(d))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CoopPlan {
    pub chi: Vec<f64>,
    pub eta: Vec<f64>,
    /// `ψ↮φ, χ↮η, ψ↮η, χ↮φ`.
    pub cross_incomparable: [bool; 4],
    pub source: &'static str,
    pub table: MajTable,
}

fn incomparable(x: &[f64], y: &[f64]) -> Result<bool, LoccError> {
    Ok(compare(x, y)? == MajVerdict::Incomparable)
}

/// Certifies `ψ⊗χ → φ⊗η` with `χ↮η`.
pub fn validate_coop(a: &[f64], b: &[f64], chi: &[f64], eta: &[f64]) -> Result<CoopPlan, LoccError> {
    plan_if_valid(a, b, chi, eta, "given")?.ok_or_else(|| LoccError::InvalidPlan("joint check or χ↮η fails".into()))
}

fn plan_if_valid(a: &[f64], b: &[f64], chi: &[f64], eta: &[f64], source: &'static str) -> Result<Option<CoopPlan>, LoccError> {
    let table = maj_table(&tensor(a, chi), &tensor(b, eta))?;
    if !table.holds || !incomparable(chi, eta)? {
        return Ok(None);
    }
    let cross = [incomparable(a, b)?, true, incomparable(a, eta)?, incomparable(chi, b)?];
    Ok(Some(CoopPlan { chi: sorted_desc(chi), eta: sorted_desc(eta), cross_incomparable: cross, source, table }))
}

fn distinct3(x: &[f64]) -> bool {
    x.len() == 3 && x[0] > x[1] + TIE_TOL && x[1] > x[2] + TIE_TOL
}

/// Auxiliary incomparable pair `(χ, η)` with `ψ⊗χ → φ⊗η`.
pub fn coop_construct(a: &[f64], b: &[f64], seed: u64) -> Result<CoopPlan, LoccError> {
    let x = stripped(a);
    let y = stripped(b);
    if x.len() != 3 || y.len() != 3 || !incomparable(&x, &y)? {
        return Err(LoccError::NotIncomparable3x3);
    }
    if !distinct3(&x) || !distinct3(&y) {
        return Err(LoccError::Degenerate);
    }
    let recipe = if x[0] > y[0] { coop_case1(&x, &y)? } else { coop_case2(&x, &y)? };
    if let Some(p) = recipe {
        if p.cross_incomparable.iter().all(|&v| v) {
            return Ok(p);
        }
        return Ok(coop_search(&x, &y, seed)?.filter(|s| s.cross_incomparable.iter().all(|&v| v)).unwrap_or(p));
    }
    coop_search(&x, &y, seed)?.ok_or(LoccError::NoPlanFound)
}

/// `χ = (β₁, β₁, β₂)`, `η = (α₁, α₂, α₂)` for `a₁ > b₁`.
fn coop_case1(a: &[f64], b: &[f64]) -> Result<Option<CoopPlan>, LoccError> {
    let (a1, a2, a3) = (a[0], a[1], a[2]);
    let (b1, b2, b3) = (b[0], b[1], b[2]);
    let r0 = (a1 / a2).max(b1 / b3);
    let hi = a3 / (2.0 * a1 + a3);
    for i in 1..=400 {
        let r = r0 * (1.0 + 0.01 * i as f64);
        let alpha2 = 1.0 / (r + 2.0);
        let alpha1 = r * alpha2;
        let lo = (alpha2 * b3 / a3)
            .max(alpha2 * (b2 + 2.0 * b3))
            .max((alpha2 * (2.0 - b1) - a3) / (1.0 - a3))
            .max(1.0 - alpha1 * (b1 + b2) / a1);
        let top = hi.min(1.0 / 3.0);
        if lo >= top {
            continue;
        }
        for f in [1e-3, 0.1, 0.5, 0.9] {
            let beta2 = lo + f * (top - lo);
            let beta1 = (1.0 - beta2) / 2.0;
            let chi = [beta1, beta1, beta2];
            let eta = [alpha1, alpha2, alpha2];
            if let Some(p) = plan_if_valid(a, b, &chi, &eta, "recipe")? {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}

/// `χ = (β₁, β₂, β₃)`, `η = (α₁, α₁, α₂)` for `a₁ < b₁`.
fn coop_case2(a: &[f64], b: &[f64]) -> Result<Option<CoopPlan>, LoccError> {
    let (a1, a2, a3) = (a[0], a[1], a[2]);
    let (b1, b2, b3) = (b[0], b[1], b[2]);
    const N: usize = 80;
    let mut fallback: Option<CoopPlan> = None;
    for i in 1..N {
        let beta1 = if a1 >= 0.5 { 0.5 } else { 1.0 / 3.0 + (2.0 / 3.0) * i as f64 / N as f64 };
        for j in 1..N {
            let beta2 = beta1 * j as f64 / N as f64;
            let beta3 = 1.0 - beta1 - beta2;
            if !(beta1 > beta2 && beta2 > beta3 && beta3 > 0.0) {
                continue;
            }
            let lower = if a1 >= 0.5 {
                (a1 / (2.0 * b1))
                    .max((a1 + a2 + 2.0 * a1 * beta2) / (2.0 * (2.0 * b1 + b2)))
                    .max((0.5 + beta2) * (1.0 - a3) / (2.0 * (1.0 - b3)))
                    .max((2.0 * a1 + a2) / (4.0 * (b1 + b2)))
                    .max((a1 + a2 - a2 * beta3) / (2.0 - b3))
            } else {
                (beta1 * a1 / b1)
                    .max((beta1 * (a1 + a2) + a1 * beta2) / (2.0 * b1 + b2))
                    .max((1.0 - beta3) * (1.0 - a3) / (2.0 * (1.0 - b3)))
            };
            let lower = lower.max(a1 * beta3 / b3).max(1.0 / 3.0);
            let upper = beta1.min((beta1 + beta2) / 2.0).min(0.5);
            if lower >= upper || a1 * beta3 <= beta1 * a3 {
                continue;
            }
            for f in [1e-3, 0.1, 0.5] {
                let alpha1 = lower + f * (upper - lower);
                let eta = [alpha1, alpha1, 1.0 - 2.0 * alpha1];
                let chi = [beta1, beta2, beta3];
                if let Some(p) = plan_if_valid(a, b, &chi, &eta, "recipe")? {
                    if p.cross_incomparable.iter().all(|&v| v) {
                        return Ok(Some(p));
                    }
                    fallback.get_or_insert(p);
                }
            }
        }
        if a1 >= 0.5 {
            break;
        }
    }
    Ok(fallback)
}

fn sample3<R: Rng>(rng: &mut R) -> [f64; 3] {
    let v: [f64; 3] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln());
    let s: f64 = v.iter().sum();
    let mut out = v.map(|x| x / s);
    out.sort_by(|p, q| q.total_cmp(p));
    out
}

/// Seeded random search; prefers plans whose four cross pairs are all incomparable.
fn coop_search(a: &[f64], b: &[f64], seed: u64) -> Result<Option<CoopPlan>, LoccError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first: Option<CoopPlan> = None;
    for _ in 0..COOP_SAMPLES {
        let chi = sample3(&mut rng);
        let eta = sample3(&mut rng);
        if let Some(p) = plan_if_valid(a, b, &chi, &eta, "search")? {
            if p.cross_incomparable.iter().all(|&v| v) {
                return Ok(Some(p));
            }
            first.get_or_insert(p);
        }
    }
    Ok(first)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SplitCase {
    /// `a₁ < b₁`: `η = (α₁, α₁, 1 - 2α₁)`, parameter `α₁`.
    EqualLeading,
    /// `a₁ > b₁`: `η = (1 - 2α₂, α₂, α₂)`, parameter `α₂`.
    EqualTrailing,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SplitRange {
    pub case: SplitCase,
    /// Open interval from the closed-form bounds.
    pub bound_interval: (f64, f64),
    /// Grid points inside the bound interval that pass the direct checks, `[first, last]`.
    pub certified: (f64, f64),
    pub midpoint_eta: Vec<f64>,
    pub table: MajTable,
}

impl SplitRange {
    pub fn eta_at(&self, t: f64) -> Vec<f64> {
        split_eta(self.case, t)
    }
}

fn split_eta(case: SplitCase, t: f64) -> Vec<f64> {
    match case {
        SplitCase::EqualLeading => vec![t, t, 1.0 - 2.0 * t],
        SplitCase::EqualTrailing => vec![1.0 - 2.0 * t, t, t],
    }
}

/// Admissible `η` with `ψ⊗ψ → χ⊗η` and `ψ↮η`, given the target `χ = b`.
pub fn split_two_copies(a: &[f64], b: &[f64]) -> Result<SplitRange, LoccError> {
    let x = stripped(a);
    let y = stripped(b);
    if x.len() != 3 {
        return Err(LoccError::NotIncomparable3x3);
    }
    if !distinct3(&x) {
        return Err(LoccError::Degenerate);
    }
    if y.len() != 3 || !incomparable(&x, &y)? {
        return Err(LoccError::NotIncomparable3x3);
    }
    let (a1, a2, a3) = (x[0], x[1], x[2]);
    let (b1, b2, b3) = (y[0], y[1], y[2]);
    let (case, lo, hi) = if a1 < b1 {
        let common = (a1 - (a1 * a1 - a2 * a2) / 2.0).max(a1 * a1 / b1).max(a1 * (a1 + 2.0 * a2) / (2.0 * b1 + b2));
        let bound = if a2 * a2 > a1 * a3 {
            common.max((a1 + a2).powi(2) / (2.0 * (b1 + b2)))
        } else {
            common.max(a1 * (2.0 - a1) / (2.0 - b3))
        };
        (SplitCase::EqualLeading, bound.max((a1 + a2) / 2.0), a1.min(0.5))
    } else {
        let common = (a3 * a3 / b3).min(a3 * (2.0 * a2 + a3) / (b2 + 2.0 * b3));
        let bound = if a2 * a2 > a1 * a3 {
            common.min(a1 * a3 / b1)
        } else {
            common.min(a3 + (a2 * a2 - a3 * a3) / 2.0)
        };
        (SplitCase::EqualTrailing, a3, bound.min((1.0 - a1) / 2.0))
    };
    if lo >= hi {
        return Err(LoccError::EmptyRange);
    }
    const GRID: usize = 2000;
    let mut first: Option<f64> = None;
    let mut last = 0.0;
    let src = tensor(&x, &x);
    for i in 1..GRID {
        let t = lo + (hi - lo) * i as f64 / GRID as f64;
        let eta = split_eta(case, t);
        if nielsen(&src, &tensor(&y, &eta))? && incomparable(&x, &eta)? {
            first.get_or_insert(t);
            last = t;
        }
    }
    let Some(f) = first else { return Err(LoccError::EmptyRange) };
    let mid = 0.5 * (f + last);
    let eta = split_eta(case, mid);
    let table = maj_table(&src, &tensor(&y, &eta))?;
    if !table.holds || !incomparable(&x, &eta)? {
        return Err(LoccError::EmptyRange);
    }
    Ok(SplitRange { case, bound_interval: (lo, hi), certified: (f, last), midpoint_eta: eta, table })
}

/// Shannon entropy of a Schmidt vector, for reports.
pub fn schmidt_entropy(x: &[f64]) -> f64 {
    shannon(x)
}

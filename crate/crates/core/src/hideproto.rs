//! Two-bit data hiding in the bound entangled family, with the attacks and decoders used to probe it.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::boundent::{be_family, support_strings, unlock, BEFamily, BeLabel, BoundError};
use crate::numkernel::{partial_trace, trace_norm, CMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HideError {
    #[error("secret {0} outside 0..=3")]
    BadSecret(u8),
    #[error("party {0} outside 0..{1}")]
    BadParty(usize, usize),
    #[error("shots and trials must be at least 1")]
    BadCount,
    #[error(transparent)]
    Bound(#[from] BoundError),
}

impl HideError {
    fn from_family(e: BoundError) -> HideError {
        HideError::Bound(e)
    }
}

/// Codebook `0 ↦ ρ⁺, 1 ↦ ρ⁻, 2 ↦ σ⁺, 3 ↦ σ⁻`.
#[derive(Debug, Clone)]
pub struct HiddenState {
    pub n_qubits: usize,
    pub secret: u8,
    pub state: CMatrix,
}

impl HiddenState {
    pub fn label(&self) -> BeLabel {
        BeLabel::from_index(self.secret as usize)
    }
}

pub fn hide_in(fam: &BEFamily, secret: u8) -> Result<HiddenState, HideError> {
    if secret > 3 {
        return Err(HideError::BadSecret(secret));
    }
    Ok(HiddenState { n_qubits: fam.n_qubits, secret, state: fam.states[secret as usize].clone() })
}

pub fn hide(secret: u8, n: usize) -> Result<HiddenState, HideError> {
    if secret > 3 {
        return Err(HideError::BadSecret(secret));
    }
    let fam = be_family(n).map_err(HideError::from_family)?;
    hide_in(&fam, secret)
}

/// Overlaps `Tr(ρ_label · state)` for the four codebook states.
pub fn overlaps(fam: &BEFamily, state: &CMatrix) -> [f64; 4] {
    std::array::from_fn(|i| (&fam.states[i] * state).trace().re)
}

/// Global decoding by the largest codebook overlap.
pub fn decode_global_with(fam: &BEFamily, state: &CMatrix) -> u8 {
    let ov = overlaps(fam, state);
    (0..4).max_by(|&a, &b| ov[a].total_cmp(&ov[b])).unwrap_or(0) as u8
}

pub fn decode_global(h: &HiddenState) -> Result<u8, HideError> {
    let fam = be_family(h.n_qubits)?;
    Ok(decode_global_with(&fam, &h.state))
}

/// `(1 - ε)ρ + ε I/2ⁿ`.
pub fn depolarize(rho: &CMatrix, eps: f64) -> CMatrix {
    let d = rho.rows();
    let m = &rho.scale_real(1.0 - eps) + &CMatrix::identity(d).scale_real(eps / d as f64);
    match rho.dims() {
        Some(dims) => m.with_dims(dims).expect("dims"),
        None => m,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParityAttack {
    pub shots: usize,
    /// 0 when every sampled string had even zero-count, 1 when every one was odd.
    pub family_bit: u8,
    pub even_count: usize,
    pub odd_count: usize,
    /// Fraction of shots guessing the sign bit correctly from the observed strings.
    pub sign_bit_rate: f64,
    pub histogram: BTreeMap<String, usize>,
}

fn zeros_parity(x: usize, n: usize) -> usize {
    (n - x.count_ones() as usize) % 2
}

/// Computational-basis strings drawn from a codebook state.
pub fn sample_strings(label: BeLabel, n: usize, shots: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let support = support_strings(n, label);
    let mask = (1usize << n) - 1;
    (0..shots)
        .map(|_| {
            let x = support[rng.gen_range(0..support.len())];
            if rng.gen_bool(0.5) {
                x
            } else {
                x ^ mask
            }
        })
        .collect()
}

/// Sign-bit guess from one observed string. The strings carry no sign information, so any rule works
/// as well as any other; this one uses the parity of the leading half.
fn sign_guess(x: usize, n: usize) -> u8 {
    ((x >> (n / 2)).count_ones() % 2) as u8
}

/// Parity-checking attack by computational-basis sampling.
pub fn parity_attack(h: &HiddenState, seed: u64, shots: usize) -> Result<ParityAttack, HideError> {
    if shots == 0 {
        return Err(HideError::BadCount);
    }
    let n = h.n_qubits;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strings = sample_strings(h.label(), n, shots, &mut rng);
    let mut even = 0;
    let mut hist = BTreeMap::new();
    let sign = h.label().sign_bit() as u8;
    let mut sign_hits = 0;
    for &x in &strings {
        if zeros_parity(x, n) == 0 {
            even += 1;
        }
        if sign_guess(x, n) == sign {
            sign_hits += 1;
        }
        *hist.entry(format!("{x:0n$b}")).or_insert(0) += 1;
    }
    let odd = shots - even;
    Ok(ParityAttack {
        shots,
        family_bit: u8::from(even < odd),
        even_count: even,
        odd_count: odd,
        sign_bit_rate: sign_hits as f64 / shots as f64,
        histogram: hist,
    })
}

/// Exact computational-basis distribution `<x|ρ|x>` of a codebook state.
pub fn string_distribution(state: &CMatrix) -> Vec<f64> {
    state.diagonal_real()
}

/// Trace distance between the marginal without `excluded` and the maximally mixed state.
pub fn trace_security(h: &HiddenState, excluded: usize) -> Result<f64, HideError> {
    let n = h.n_qubits;
    if excluded >= n {
        return Err(HideError::BadParty(excluded, n));
    }
    let keep: Vec<usize> = (0..n).filter(|&k| k != excluded).collect();
    let m = partial_trace(&h.state, &keep).map_err(BoundError::from)?;
    let d = m.rows();
    let diff = &m - &CMatrix::identity(d).scale_real(1.0 / d as f64);
    Ok(0.5 * trace_norm(&diff).map_err(BoundError::from)?)
}

/// Decoding by grouping the first `n-2` parties: the measured label and the Bell state left behind fix the secret.
pub fn decode_by_unlock(fam: &BEFamily, h: &HiddenState, rng: &mut ChaCha8Rng) -> Result<u8, HideError> {
    let u = unlock(fam, h.label())?;
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    let mut k = u.outcomes.len() - 1;
    for (i, o) in u.outcomes.iter().enumerate() {
        acc += o.probability;
        if r < acc {
            k = i;
            break;
        }
    }
    let o = &u.outcomes[k];
    // the receiver identifies the Bell state on the last pair, then inverts the pairing
    let bell_idx = crate::qstate::BellKind::ALL
        .iter()
        .enumerate()
        .max_by(|a, b| {
            let fa = crate::qstate::bell(*a.1).density().data().iter().zip(o.conditional.data()).map(|(x, y)| (x.conj() * y).re).sum::<f64>();
            let fb = crate::qstate::bell(*b.1).density().data().iter().zip(o.conditional.data()).map(|(x, y)| (x.conj() * y).re).sum::<f64>();
            fa.total_cmp(&fb)
        })
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok((bell_idx ^ k) as u8)
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoSummary {
    pub n_qubits: usize,
    pub trials: usize,
    pub seed: u64,
    pub unlock_rate: f64,
    pub family_leak_rate: f64,
    pub pm_bit_rate: f64,
    pub trace_security_max: f64,
}

/// Random secrets through hiding, the parity attack, marginal checks and authorized decoding.
pub fn run_demo(n: usize, trials: usize, seed: u64) -> Result<DemoSummary, HideError> {
    if trials == 0 {
        return Err(HideError::BadCount);
    }
    let fam = be_family(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut unlocked, mut leaked, mut pm_hits, mut pm_total) = (0usize, 0usize, 0usize, 0usize);
    let mut sec_max: f64 = 0.0;
    for _ in 0..trials {
        let secret: u8 = rng.gen_range(0..4);
        let h = hide_in(&fam, secret)?;
        let attack = parity_attack(&h, rng.gen(), 64)?;
        if attack.family_bit as usize == h.label().family_bit() {
            leaked += 1;
        }
        pm_hits += (attack.sign_bit_rate * attack.shots as f64).round() as usize;
        pm_total += attack.shots;
        let party = rng.gen_range(0..n);
        sec_max = sec_max.max(trace_security(&h, party)?);
        if decode_by_unlock(&fam, &h, &mut rng)? == secret {
            unlocked += 1;
        }
    }
    Ok(DemoSummary {
        n_qubits: n,
        trials,
        seed,
        unlock_rate: unlocked as f64 / trials as f64,
        family_leak_rate: leaked as f64 / trials as f64,
        pm_bit_rate: pm_hits as f64 / pm_total as f64,
        trace_security_max: sec_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_inputs() {
        assert_eq!(hide(4, 4).unwrap_err(), HideError::BadSecret(4));
        assert!(matches!(hide(0, 5), Err(HideError::Bound(BoundError::OddN(5)))));
        let h = hide(0, 4).unwrap();
        assert_eq!(trace_security(&h, 4).unwrap_err(), HideError::BadParty(4, 4));
        assert_eq!(parity_attack(&h, 1, 0).unwrap_err(), HideError::BadCount);
    }
}

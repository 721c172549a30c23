use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entanglia::boundent::{be_family, BeLabel};
use entanglia::hideproto::{
    decode_by_unlock, decode_global, decode_global_with, depolarize, hide, hide_in, overlaps, parity_attack,
    run_demo, sample_strings, string_distribution, trace_security, HideError,
};

#[test]
fn codebook_maps_secrets_to_family() {
    let fam = be_family(4).unwrap();
    for s in 0..4u8 {
        let h = hide(s, 4).unwrap();
        assert_eq!(h.label(), BeLabel::from_index(s as usize));
        assert!(h.state.max_abs_diff(&fam.states[s as usize]) < 1e-15);
    }
    assert_eq!(hide(4, 4).unwrap_err(), HideError::BadSecret(4));
    assert_eq!(hide_in(&fam, 9).unwrap_err(), HideError::BadSecret(9));
    assert!(matches!(hide(0, 5), Err(HideError::Bound(_))));
}

#[test]
fn global_decoding_recovers_secret() {
    for n in [4, 6] {
        let fam = be_family(n).unwrap();
        for s in 0..4u8 {
            let h = hide_in(&fam, s).unwrap();
            assert_eq!(decode_global(&h).unwrap(), s);
            let ov = overlaps(&fam, &h.state);
            // orthogonal supports: only the own overlap is nonzero
            for (i, v) in ov.iter().enumerate() {
                if i != s as usize {
                    assert!(v.abs() < 1e-12);
                }
            }
            assert_eq!(decode_global_with(&fam, &depolarize(&h.state, 0.3)), s);
        }
    }
}

#[test]
fn depolarize_keeps_trace() {
    let h = hide(2, 4).unwrap();
    let m = depolarize(&h.state, 0.25);
    assert!((m.trace().re - 1.0).abs() < 1e-12);
    assert_eq!(m.dims(), h.state.dims());
}

#[test]
fn strings_reveal_family_but_not_sign() {
    for n in [4, 6] {
        let fam = be_family(n).unwrap();
        let dist: Vec<Vec<f64>> = fam.states.iter().map(string_distribution).collect();
        for (a, b) in [(0, 1), (2, 3)] {
            assert!(dist[a].iter().zip(&dist[b]).all(|(x, y)| (x - y).abs() < 1e-12));
        }
        for x in 0..(1usize << n) {
            assert!(dist[0][x] * dist[2][x] < 1e-15);
            let even = x.count_ones() % 2 == 0;
            if dist[0][x] > 1e-12 {
                assert!(even);
            }
            if dist[2][x] > 1e-12 {
                assert!(!even);
            }
        }
    }
}

#[test]
fn sampled_strings_lie_in_support() {
    let fam = be_family(6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for l in 0..4 {
        let d = string_distribution(&fam.states[l]);
        for x in sample_strings(BeLabel::from_index(l), 6, 200, &mut rng) {
            assert!(d[x] > 1e-12);
        }
    }
}

#[test]
fn parity_attack_reads_family_bit_only() {
    for n in [4, 6] {
        for s in 0..4u8 {
            let h = hide(s, n).unwrap();
            let a = parity_attack(&h, 11, 4000).unwrap();
            assert_eq!(a.family_bit as usize, h.label().family_bit());
            assert_eq!(a.even_count + a.odd_count, 4000);
            assert!(a.even_count == 0 || a.odd_count == 0);
            assert!((a.sign_bit_rate - 0.5).abs() < 0.05, "rate {}", a.sign_bit_rate);
            assert_eq!(a.histogram.values().sum::<usize>(), 4000);
        }
    }
    assert_eq!(parity_attack(&hide(0, 4).unwrap(), 1, 0).unwrap_err(), HideError::BadCount);
}

#[test]
fn parity_attack_is_deterministic() {
    let h = hide(3, 6).unwrap();
    let a = serde_json::to_string(&parity_attack(&h, 5, 100).unwrap()).unwrap();
    let b = serde_json::to_string(&parity_attack(&h, 5, 100).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn marginals_are_maximally_mixed() {
    for n in [4, 6] {
        for s in 0..4u8 {
            let h = hide(s, n).unwrap();
            for k in 0..n {
                assert!(trace_security(&h, k).unwrap() < 1e-9, "n={n} s={s} k={k}");
            }
        }
    }
    assert_eq!(trace_security(&hide(0, 4).unwrap(), 4).unwrap_err(), HideError::BadParty(4, 4));
}

#[test]
fn unlock_decoding_is_exact() {
    for n in [4, 6] {
        let fam = be_family(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..25 {
            for s in 0..4u8 {
                let h = hide_in(&fam, s).unwrap();
                assert_eq!(decode_by_unlock(&fam, &h, &mut rng).unwrap(), s);
            }
        }
    }
}

#[test]
fn demo_summary() {
    let d = run_demo(4, 40, 7).unwrap();
    assert_eq!((d.n_qubits, d.trials, d.seed), (4, 40, 7));
    assert_eq!(d.unlock_rate, 1.0);
    assert_eq!(d.family_leak_rate, 1.0);
    assert!((d.pm_bit_rate - 0.5).abs() < 0.1);
    assert!(d.trace_security_max < 1e-9);
    let again = run_demo(4, 40, 7).unwrap();
    assert_eq!(serde_json::to_string(&d).unwrap(), serde_json::to_string(&again).unwrap());
    assert_eq!(run_demo(4, 0, 7).unwrap_err(), HideError::BadCount);
}

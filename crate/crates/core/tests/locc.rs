use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entanglia::majorize::{compare, majorizes, MajVerdict};
use entanglia::measures::{binary_entropy, shannon};
use entanglia::locc::{
    assist_max_entangled, assist_max_entangled_direct, assist_plan_max_entangled, classify, coop_construct,
    find_catalyst_2x2, maj_table, maxent_ladder, maxent_ladder_certified, min_assist_3x3, multicopy, nielsen,
    split_two_copies, tensor, tensor_power, validate_coop, AssistKind, LoccError, Pattern3, SplitCase,
};
use entanglia::qstate::random_prob;

const THIRD: f64 = 1.0 / 3.0;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
}

/// Independent Nielsen oracle: sort both vectors, pad, compare running sums.
fn oracle_converts(a: &[f64], b: &[f64]) -> bool {
    let n = a.len().max(b.len());
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| q.partial_cmp(p).unwrap());
    y.sort_by(|p, q| q.partial_cmp(p).unwrap());
    x.resize(n, 0.0);
    y.resize(n, 0.0);
    let (mut sx, mut sy) = (0.0, 0.0);
    for i in 0..n {
        sx += x[i];
        sy += y[i];
        if sx > sy + 1e-9 {
            return false;
        }
    }
    true
}

fn outer(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

#[test]
fn nielsen_corollaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for d in 2..6 {
        let u = vec![1.0 / d as f64; d];
        for _ in 0..10 {
            let b = random_prob(d, &mut rng);
            assert!(nielsen(&u, &b).unwrap());
            let mut prod = vec![0.0; d];
            prod[0] = 1.0;
            assert!(nielsen(&b, &prod).unwrap());
        }
    }
    assert!(!nielsen(&[0.4, 0.4, 0.1, 0.1], &[0.5, 0.25, 0.25, 0.0]).unwrap());
    assert!(matches!(nielsen(&[0.5, 0.5], &[0.5, 0.4]), Err(LoccError::Maj(_))));
}

#[test]
fn classify_examples() {
    let c = classify(&[0.4, 0.4, 0.2], &[0.48, 0.26, 0.26]).unwrap();
    assert_eq!(c.verdict, MajVerdict::Incomparable);
    assert_eq!(c.pattern_3x3, Some(Pattern3::BType));
    assert!(c.strong && !c.catalysis_possible);

    let c = classify(&[0.4, 0.4, 0.1, 0.1], &[0.5, 0.25, 0.25, 0.0]).unwrap();
    assert_eq!(c.verdict, MajVerdict::Incomparable);
    assert!(c.catalysis_possible && !c.strong);
    assert_eq!(c.pattern_3x3, None);

    let c = classify(&[0.5, 0.4, 0.1], &[0.6, 0.2, 0.2]).unwrap();
    assert_eq!(c.verdict, MajVerdict::Incomparable);
    assert!(c.strong && !c.catalysis_possible);
    assert_eq!(c.pattern_3x3, Some(Pattern3::BType));

    let c = classify(&[0.6, 0.2, 0.2], &[0.5, 0.4, 0.1]).unwrap();
    assert_eq!(c.pattern_3x3, Some(Pattern3::AType));

    let c = classify(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
    assert_eq!(c.verdict, MajVerdict::XPrecY);
    assert!(!c.strong && c.pattern_3x3.is_none());
}

#[test]
fn multicopy_examples() {
    let a = [0.4, 0.4, 0.1, 0.1];
    let b = [0.5, 0.25, 0.25, 0.0];
    assert_eq!(multicopy(&a, &b, 1).unwrap(), nielsen(&a, &b).unwrap());
    assert!(!multicopy(&a, &b, 2).unwrap());
    assert!(multicopy(&a, &b, 3).unwrap());
    // independent oracle on raw outer products
    let a3 = outer(&outer(&a, &a), &a);
    let b3 = outer(&outer(&b, &b), &b);
    assert!(oracle_converts(&a3, &b3));
    assert!(!oracle_converts(&outer(&a, &a), &outer(&b, &b)));
    assert!(matches!(multicopy(&[0.1; 10], &[0.1; 10], 4), Err(LoccError::TooLarge(_))));
}

#[test]
fn tensor_helpers() {
    assert!(close(&tensor(&[0.6, 0.4], &[0.5, 0.5]), &[0.3, 0.3, 0.2, 0.2], 1e-15));
    let p = tensor_power(&[0.7, 0.3], 3);
    assert_eq!(p.len(), 8);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((p[0] - 0.343).abs() < 1e-12);
}

#[test]
fn catalyst_search() {
    let a = [0.4, 0.4, 0.1, 0.1];
    let b = [0.5, 0.25, 0.25, 0.0];
    let r = find_catalyst_2x2(&a, &b, 1e-3).unwrap().unwrap();
    assert!(r.interval.0 <= 0.6 + 1e-9 && 0.6 <= r.interval.1 + 1e-9);
    assert!(r.table.holds);
    for t in [r.interval.0, 0.6, r.interval.1] {
        let cat = [t, 1.0 - t];
        assert!(oracle_converts(&outer(&a, &cat), &outer(&b, &cat)));
    }
    assert!(shannon(&a) >= shannon(&b));
    // every 3x3 incomparable pair is strong
    assert!(find_catalyst_2x2(&[0.4, 0.4, 0.2], &[0.48, 0.26, 0.26], 1e-3).unwrap().is_none());
    // fails the necessary condition
    assert!(find_catalyst_2x2(&[0.5, 0.4, 0.1], &[0.6, 0.2, 0.2], 1e-3).unwrap().is_none());
}

#[test]
fn assist_with_lower_rank_maximally_entangled() {
    let a = [0.4, 0.4, 0.2];
    let b = [0.48, 0.26, 0.26];
    assert!(assist_max_entangled(&a, &b).unwrap());
    assert!(assist_max_entangled_direct(&a, &b).unwrap());
    let u = [THIRD; 3];
    assert!(assist_max_entangled(&[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], &u).unwrap());
    assert!(!assist_max_entangled(&[0.9, 0.05, 0.05], &u).unwrap());
    assert!(!assist_max_entangled_direct(&[0.9, 0.05, 0.05], &u).unwrap());
    assert_eq!(assist_max_entangled(&[0.5, 0.5], &[0.6, 0.4]).unwrap_err(), LoccError::RankMismatch(2, 2));
    assert_eq!(assist_max_entangled(&[0.5, 0.3, 0.2], &[0.6, 0.4]).unwrap_err(), LoccError::RankMismatch(3, 2));
    let plan = assist_plan_max_entangled(&a, &b).unwrap();
    assert_eq!(plan.kind, AssistKind::MaxEntangledLowerRank);
    assert!(close(&plan.resource, &[0.5, 0.5], 1e-15) && plan.table.holds);
}

#[test]
fn minimal_two_qubit_resource() {
    let a = [0.4, 0.4, 0.2];
    let b = [0.48, 0.26, 0.26];
    let p = min_assist_3x3(&a, &b).unwrap();
    let c0 = p.c0.unwrap();
    assert!((c0 - 0.74 / 0.8).abs() < 1e-12 && (c0 - 0.925).abs() < 1e-12);
    let h = -0.925f64 * 0.925f64.log2() - 0.075f64 * 0.075f64.log2();
    assert!((p.e0.unwrap() - h).abs() < 1e-12 && (h - 0.3843).abs() < 1e-3);
    assert!(oracle_converts(&outer(&a, &[c0, 1.0 - c0]), &b));
    let c1 = c0 + 1e-3;
    assert!(!oracle_converts(&outer(&a, &[c1, 1.0 - c1]), &b));

    let a = [0.51, 0.30, 0.19];
    let b = [0.49, 0.36, 0.15];
    let p = min_assist_3x3(&a, &b).unwrap();
    let c0 = p.c0.unwrap();
    assert!((c0 - 0.49 / 0.51).abs() < 1e-12 && (c0 - 0.96078).abs() < 1e-5);
    assert_eq!(p.e0.unwrap(), binary_entropy(c0).unwrap());
    assert!(oracle_converts(&outer(&a, &[c0, 1.0 - c0]), &b));
    let c1 = c0 + 1e-3;
    assert!(!oracle_converts(&outer(&a, &[c1, 1.0 - c1]), &b));

    assert_eq!(min_assist_3x3(&[0.5, 0.3, 0.2], &[0.6, 0.3, 0.1]).unwrap_err(), LoccError::NotIncomparable3x3);
}

#[test]
fn maxent_ladders() {
    let l = maxent_ladder(3);
    assert_eq!(l.len(), 2);
    assert!(close(l[0].values(), &[2.0 / 3.0, THIRD], 1e-15));
    assert!(close(l[1].values(), &[0.5, 0.5], 1e-15));
    let prod = tensor(l[0].values(), l[1].values());
    assert!(close(&prod, &[THIRD, THIRD, 1.0 / 6.0, 1.0 / 6.0], 1e-15));
    assert!(oracle_converts(&prod, &[THIRD, THIRD, THIRD, 0.0]));
    let l2 = maxent_ladder(2);
    assert_eq!(l2.len(), 1);
    assert!(close(l2[0].values(), &[0.5, 0.5], 1e-15));
    assert_eq!(maxent_ladder(4).len(), 3);
    for d in 2..=6 {
        assert!(maxent_ladder_certified(d).unwrap());
    }
}

#[test]
fn cooperation_examples_validate() {
    let plan = validate_coop(&[0.4, 0.4, 0.2], &[0.48, 0.26, 0.26], &[0.49, 0.255, 0.255], &[0.41, 0.41, 0.18]).unwrap();
    assert!(plan.table.holds && plan.cross_incomparable[1]);

    let plan = validate_coop(&[0.41, 0.38, 0.21], &[0.4, 0.4, 0.2], &[0.45, 0.34, 0.21], &[0.48, 0.309, 0.211]).unwrap();
    assert!(plan.cross_incomparable.iter().all(|&v| v));

    let a = [0.4, 0.3, 0.2, 0.1];
    let b = [0.45, 0.29, 0.14, 0.12];
    let chi = [0.5, 0.25, 0.2, 0.05];
    let eta = [0.48, 0.36, 0.12, 0.04];
    validate_coop(&a, &b, &chi, &eta).unwrap();
    assert!(oracle_converts(&outer(&a, &chi), &outer(&b, &eta)));

    assert!(matches!(
        validate_coop(&[0.4, 0.4, 0.2], &[0.48, 0.26, 0.26], &[0.5, 0.3, 0.2], &[0.5, 0.3, 0.2]),
        Err(LoccError::InvalidPlan(_))
    ));
}

#[test]
fn cooperation_construction_certifies_itself() {
    for (a, b) in [
        ([0.41, 0.38, 0.21], [0.4, 0.395, 0.205]),
        ([0.5, 0.4, 0.1], [0.6, 0.25, 0.15]),
        ([0.51, 0.30, 0.19], [0.49, 0.36, 0.15]),
    ] {
        let y = b;
        match coop_construct(&a, &y, 7) {
            Ok(p) => {
                assert!(oracle_converts(&outer(&a, &p.chi), &outer(&y, &p.eta)));
                assert_eq!(compare(&p.chi, &p.eta).unwrap(), MajVerdict::Incomparable);
            }
            Err(e) => assert_eq!(e, LoccError::NoPlanFound, "{a:?} {y:?}"),
        }
    }
    assert_eq!(coop_construct(&[0.4, 0.4, 0.2], &[0.48, 0.26, 0.26], 7).unwrap_err(), LoccError::Degenerate);
    assert_eq!(coop_construct(&[0.41, 0.38, 0.21], &[0.4, 0.4, 0.2], 7).unwrap_err(), LoccError::Degenerate);
    assert_eq!(coop_construct(&[0.5, 0.3, 0.2], &[0.6, 0.3, 0.1], 7).unwrap_err(), LoccError::NotIncomparable3x3);
}

#[test]
fn two_copy_split() {
    let a = [0.5, 0.3, 0.2];
    let b = [0.55, 0.24, 0.21];
    let r = split_two_copies(&a, &b).unwrap();
    assert_eq!(r.case, SplitCase::EqualLeading);
    assert!(r.bound_interval.0 < r.bound_interval.1);
    assert!(r.certified.0 <= r.certified.1);
    let eta = r.midpoint_eta.clone();
    assert!(oracle_converts(&outer(&a, &a), &outer(&b, &eta)));
    assert_eq!(compare(&a, &eta).unwrap(), MajVerdict::Incomparable);
    assert!(close(&r.eta_at(0.3), &[0.3, 0.3, 0.4], 1e-15));
    assert!(maj_table(&tensor(&a, &a), &tensor(&b, &eta)).unwrap().holds);

    assert_eq!(split_two_copies(&[0.4, 0.4, 0.2], &[0.48, 0.26, 0.26]).unwrap_err(), LoccError::Degenerate);
}

#[test]
fn two_copy_split_entropy_guard() {
    // every certified η keeps the joint entropy ordering required by conversion
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut seen = 0;
    for _ in 0..400 {
        let a = random_prob(3, &mut rng);
        let b = random_prob(3, &mut rng);
        match split_two_copies(&a, &b) {
            Ok(r) => {
                seen += 1;
                assert!(r.midpoint_eta.iter().all(|&v| v >= 0.0));
                let e_src = 2.0 * shannon(&a);
                let e_dst = shannon(&b) + shannon(&r.midpoint_eta);
                assert!(e_src >= e_dst - 1e-9, "{a:?} {b:?} {:?} {e_src} {e_dst}", r.midpoint_eta);
            }
            Err(LoccError::EmptyRange | LoccError::NotIncomparable3x3 | LoccError::Degenerate) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(seen > 0);
}

#[test]
fn conversion_lowers_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let d = 2 + (rand::Rng::gen_range(&mut rng, 0..4));
        let a = random_prob(d, &mut rng);
        let b = random_prob(d, &mut rng);
        if nielsen(&a, &b).unwrap() {
            assert!(shannon(&a) >= shannon(&b) - 1e-12);
        }
        assert_eq!(nielsen(&a, &b).unwrap(), oracle_converts(&a, &b));
    }
}

#[test]
fn incomparability_theorem() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = 0;
    for d in 3..=6 {
        for _ in 0..300 {
            let a = random_prob(d, &mut rng);
            let b = random_prob(d, &mut rng);
            if classify(&a, &b).unwrap().verdict == MajVerdict::Incomparable {
                seen += 1;
                let mut x = a.clone();
                let mut y = b.clone();
                x.sort_by(|p, q| q.total_cmp(p));
                y.sort_by(|p, q| q.total_cmp(p));
                assert!(x[0] + y[d - 1] < 1.0 && y[0] + x[d - 1] < 1.0);
                assert!(assist_max_entangled(&a, &b).unwrap());
            }
        }
    }
    assert!(seen > 100);
}

#[test]
fn no_incomparable_qubit_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..500 {
        let a = random_prob(2, &mut rng);
        let b = random_prob(2, &mut rng);
        assert_ne!(compare(&a, &b).unwrap(), MajVerdict::Incomparable);
    }
}

#[test]
fn strong_pairs_resist_catalysis_and_copies() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = 0;
    while seen < 20 {
        let a = random_prob(3, &mut rng);
        let b = random_prob(3, &mut rng);
        let c = classify(&a, &b).unwrap();
        if c.verdict != MajVerdict::Incomparable {
            continue;
        }
        seen += 1;
        assert!(c.strong);
        assert!(find_catalyst_2x2(&a, &b, 1e-2).unwrap().is_none());
        for k in 1..=4 {
            assert!(!multicopy(&a, &b, k).unwrap());
        }
    }
}

#[test]
fn nielsen_agrees_with_majorize() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let a = random_prob(4, &mut rng);
        let b = random_prob(4, &mut rng);
        assert_eq!(nielsen(&a, &b).unwrap(), majorizes(&a, &b).unwrap());
    }
}

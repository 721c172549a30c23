use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entanglia::majorize::spectra_majorized;
use entanglia::measures::{
    binary_entropy, concurrence_2q, concurrence_pure, entanglement_entropy, eof_2q, eof_from_concurrence,
    log_negativity, mutual_information, negativity, relative_entropy_classical, shannon, von_neumann_entropy,
    MeasureError,
};
use entanglia::numkernel::{kron, partial_trace, CMatrix};
use entanglia::qstate::{
    bell, random_density, random_prob, random_pure_with, random_unitary, schmidt, werner, BellKind, PureState,
};

fn from_lambda(l: &[f64]) -> PureState {
    PureState::from_schmidt(l).unwrap()
}

#[test]
fn shannon_values() {
    assert_eq!(shannon(&[1.0, 0.0]), 0.0);
    for k in 1..9 {
        let u = vec![1.0 / k as f64; k];
        assert!((shannon(&u) - (k as f64).log2()).abs() < 1e-12);
    }
    assert!((shannon(&[0.4, 0.4, 0.2]) - 1.521928).abs() < 1e-6);
}

#[test]
fn binary_entropy_values() {
    assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
    assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
    assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
    let x: f64 = 0.925;
    let oracle = -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
    assert!((binary_entropy(x).unwrap() - oracle).abs() < 1e-15);
    assert!((binary_entropy(x).unwrap() - 0.3843).abs() < 1e-3);
    for k in 1..20 {
        let t = k as f64 / 20.0;
        assert!((binary_entropy(t).unwrap() - binary_entropy(1.0 - t).unwrap()).abs() < 1e-14);
    }
    assert!(matches!(binary_entropy(-0.1), Err(MeasureError::BadParam(_))));
}

#[test]
fn relative_entropy_values() {
    let p = [0.2, 0.3, 0.5];
    assert_eq!(relative_entropy_classical(&p, &p), 0.0);
    assert_eq!(relative_entropy_classical(&[1.0, 0.0], &[0.0, 1.0]), f64::INFINITY);
    let oracle = 0.5 * (0.5f64 / 0.75).log2() + 0.5 * (0.5f64 / 0.25).log2();
    let d = relative_entropy_classical(&[0.5, 0.5], &[0.75, 0.25]);
    assert!((d - oracle).abs() < 1e-15 && (d - 0.2075).abs() < 1e-4);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        assert!(relative_entropy_classical(&random_prob(4, &mut rng), &random_prob(4, &mut rng)) >= 0.0);
    }
}

#[test]
fn mutual_information_values() {
    let prod = vec![vec![0.12, 0.28], vec![0.18, 0.42]];
    assert!(mutual_information(&prod).unwrap().abs() < 1e-12);
    let diag = vec![vec![0.5, 0.0], vec![0.0, 0.5]];
    assert!((mutual_information(&diag).unwrap() - 1.0).abs() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let flat = random_prob(6, &mut rng);
        let t: Vec<Vec<f64>> = flat.chunks(3).map(|r| r.to_vec()).collect();
        let tt: Vec<Vec<f64>> = (0..3).map(|j| t.iter().map(|r| r[j]).collect()).collect();
        assert!((mutual_information(&t).unwrap() - mutual_information(&tt).unwrap()).abs() < 1e-12);
    }
    assert!(matches!(mutual_information(&[vec![0.5, 0.6]]), Err(MeasureError::BadDistribution(_))));
    assert!(matches!(mutual_information(&[vec![0.5], vec![0.2, 0.3]]), Err(MeasureError::BadDistribution(_))));
}

#[test]
fn von_neumann_values() {
    assert!(von_neumann_entropy(&bell(BellKind::PsiMinus).density()).unwrap().abs() < 1e-12);
    for d in 2..6 {
        let m = CMatrix::identity(d).scale_real(1.0 / d as f64);
        assert!((von_neumann_entropy(&m).unwrap() - (d as f64).log2()).abs() < 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let rho = random_density(&[3], 3, &mut rng);
        let u = random_unitary(3, &mut rng);
        let rot = &(&u * &rho) * &u.dagger();
        assert!((von_neumann_entropy(&rot).unwrap() - von_neumann_entropy(&rho).unwrap()).abs() < 1e-9);
    }
    assert!(matches!(von_neumann_entropy(&CMatrix::identity(2)), Err(MeasureError::NotDensity(_))));
}

#[test]
fn entanglement_entropy_values() {
    assert!((entanglement_entropy(&bell(BellKind::PhiMinus), &[0]).unwrap() - 1.0).abs() < 1e-12);
    let chi = entanglement_entropy(&from_lambda(&[0.49, 0.255, 0.255]), &[0]).unwrap();
    assert!((chi - 1.5097).abs() < 1e-4);
    let eta = entanglement_entropy(&from_lambda(&[0.41, 0.41, 0.18]), &[0]).unwrap();
    assert!((eta - 1.5001).abs() < 1e-4);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let psi = random_pure_with(&[2, 3], &mut rng);
    let a = entanglement_entropy(&psi, &[0]).unwrap();
    let b = entanglement_entropy(&psi, &[1]).unwrap();
    assert!((a - b).abs() < 1e-10 && a <= 1.0 + 1e-9);
}

#[test]
fn concurrence_of_pure_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let prod = random_pure_with(&[2], &mut rng).tensor(&random_pure_with(&[2], &mut rng));
    assert!(concurrence_pure(&prod, &[0]).unwrap() < 1e-7);
    assert!((concurrence_pure(&bell(BellKind::PhiPlus), &[0]).unwrap() - 1.0).abs() < 1e-12);
    for _ in 0..20 {
        let psi = random_pure_with(&[2, 2], &mut rng);
        let l = schmidt(&psi, &[0]).unwrap().coefficients.into_vec();
        let oracle = 2.0 * (l[0] * l[1]).sqrt();
        assert!((concurrence_pure(&psi, &[0]).unwrap() - oracle).abs() < 1e-9);
        assert!((concurrence_2q(&psi.density()).unwrap() - oracle).abs() < 1e-6);
    }
}

#[test]
fn concurrence_of_mixed_states() {
    assert!((concurrence_2q(&bell(BellKind::PsiPlus).density()).unwrap() - 1.0).abs() < 1e-6);
    assert!(concurrence_2q(&CMatrix::identity(4).scale_real(0.25)).unwrap().abs() < 1e-9);
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        let want = ((3.0 * p - 1.0) / 2.0).max(0.0);
        assert!((concurrence_2q(&werner(p).unwrap()).unwrap() - want).abs() < 1e-6, "p = {p}");
    }
    assert_eq!(concurrence_2q(&CMatrix::identity(3).scale_real(1.0 / 3.0)).unwrap_err(), MeasureError::BadDims);
}

#[test]
fn entanglement_of_formation() {
    assert!((eof_from_concurrence(1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!(eof_from_concurrence(0.0).unwrap().abs() < 1e-15);
    let mut last = 0.0;
    for k in 1..=10 {
        let e = eof_from_concurrence(k as f64 / 10.0).unwrap();
        assert!(e > last);
        last = e;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let psi = random_pure_with(&[2, 2], &mut rng);
        let e = eof_2q(&psi.density()).unwrap();
        assert!((e - entanglement_entropy(&psi, &[0]).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn negativity_values() {
    let sep = CMatrix::identity(4).scale_real(0.25).with_dims(&[2, 2]).unwrap();
    assert_eq!(negativity(&sep, &[1]).unwrap(), 0.0);
    assert_eq!(log_negativity(&sep, &[1]).unwrap(), 0.0);
    let singlet = bell(BellKind::PsiMinus).density();
    assert!((negativity(&singlet, &[1]).unwrap() - 0.5).abs() < 1e-12);
    assert!((log_negativity(&singlet, &[1]).unwrap() - 1.0).abs() < 1e-12);
    assert!(negativity(&CMatrix::identity(4).scale_real(0.25), &[1]).is_err());
}

#[test]
fn log_negativity_is_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let rho = random_density(&[2, 2], 2, &mut rng);
        let two = kron(&rho, &rho);
        let e1 = log_negativity(&rho, &[1]).unwrap();
        let e2 = log_negativity(&two, &[1, 3]).unwrap();
        assert!((e2 - 2.0 * e1).abs() < 1e-8);
    }
}

#[test]
fn entropy_inequalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for dims in [[2usize, 2], [3, 3]] {
        for _ in 0..10 {
            let rho = random_density(&dims, 3, &mut rng);
            let s = von_neumann_entropy(&rho).unwrap();
            let sa = von_neumann_entropy(&partial_trace(&rho, &[0]).unwrap()).unwrap();
            let sb = von_neumann_entropy(&partial_trace(&rho, &[1]).unwrap()).unwrap();
            assert!(s <= sa + sb + 1e-9);
            assert!(s >= (sa - sb).abs() - 1e-9);
        }
    }
}

#[test]
fn concavity_of_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let w = random_prob(3, &mut rng);
        let rhos: Vec<CMatrix> = (0..3).map(|_| random_density(&[3], 2, &mut rng)).collect();
        let mut mix = CMatrix::zeros(3, 3);
        let mut avg = 0.0;
        for (wk, r) in w.iter().zip(&rhos) {
            mix = &mix + &r.scale_real(*wk);
            avg += wk * von_neumann_entropy(r).unwrap();
        }
        assert!(von_neumann_entropy(&mix).unwrap() >= avg - 1e-9);
    }
}

#[test]
fn measurement_entropy_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let rho = random_density(&[4], 2, &mut rng);
        let u = random_unitary(4, &mut rng);
        let rot = &(&u.dagger() * &rho) * &u;
        assert!(shannon(&rot.diagonal_real()) >= von_neumann_entropy(&rho).unwrap() - 1e-9);
    }
}

#[test]
fn strong_subadditivity_spot_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = |m: &CMatrix| von_neumann_entropy(m).unwrap();
    for _ in 0..10 {
        let rho = random_density(&[2, 2, 2], 4, &mut rng);
        let abc = s(&rho);
        let ab = s(&partial_trace(&rho, &[0, 1]).unwrap());
        let bc = s(&partial_trace(&rho, &[1, 2]).unwrap());
        let b = s(&partial_trace(&rho, &[1]).unwrap());
        assert!(abc + b <= ab + bc + 1e-8);
    }
}

#[test]
fn majorized_spectra_order_entropies() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut seen = 0;
    for _ in 0..200 {
        let a = random_density(&[3], 3, &mut rng);
        let b = random_density(&[3], 3, &mut rng);
        if spectra_majorized(&a, &b).unwrap() {
            seen += 1;
            assert!(von_neumann_entropy(&a).unwrap() >= von_neumann_entropy(&b).unwrap() - 1e-9);
        }
    }
    assert!(seen > 0);
}

use proptest::prelude::*;

use entanglia::locc::{nielsen, tensor};
use entanglia::majorize::{
    apply_real, compare, ds_witness, is_doubly_stochastic, majorizes, majorizes_ascending, majorizes_by_subsets,
    MajVerdict,
};
use entanglia::measures::shannon;
use entanglia::numkernel::CMatrix;

fn prob(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, d).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

fn prob_any() -> impl Strategy<Value = Vec<f64>> {
    (2usize..=6).prop_flat_map(prob)
}

/// Convex mixture of permutation matrices.
fn birkhoff(d: usize) -> impl Strategy<Value = CMatrix> {
    let term = (prop::collection::vec(any::<prop::sample::Index>(), d), 0.05f64..1.0);
    prop::collection::vec(term, 1..4).prop_map(move |terms| {
        let total: f64 = terms.iter().map(|t| t.1).sum();
        let mut rows = vec![vec![0.0; d]; d];
        for (idx, w) in terms {
            let mut perm: Vec<usize> = (0..d).collect();
            for (i, ix) in idx.iter().enumerate() {
                let j = i + ix.index(d - i);
                perm.swap(i, j);
            }
            for (i, &j) in perm.iter().enumerate() {
                rows[i][j] += w / total;
            }
        }
        CMatrix::from_real_rows(&rows)
    })
}

fn vec_and_ds() -> impl Strategy<Value = (Vec<f64>, CMatrix)> {
    (2usize..=6).prop_flat_map(|d| (prob(d), birkhoff(d)))
}

proptest! {
    #[test]
    fn reflexive(x in prob_any()) {
        prop_assert!(majorizes(&x, &x).unwrap());
        prop_assert_eq!(compare(&x, &x).unwrap(), MajVerdict::Equal);
    }

    #[test]
    fn uniform_and_pure_bound_everything(x in prob_any()) {
        let d = x.len();
        let u = vec![1.0 / d as f64; d];
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        prop_assert!(majorizes(&u, &x).unwrap());
        prop_assert!(majorizes(&x, &e).unwrap());
    }

    #[test]
    fn doubly_stochastic_image_is_majorized((v, a) in vec_and_ds()) {
        prop_assert!(is_doubly_stochastic(&a));
        let w = apply_real(&a, &v);
        prop_assert!(majorizes(&w, &v).unwrap());
        prop_assert!(shannon(&w) >= shannon(&v) - 1e-12);
    }

    #[test]
    fn transitive_along_chains((v, a, b) in (2usize..=6).prop_flat_map(|d| (prob(d), birkhoff(d), birkhoff(d)))) {
        let y = apply_real(&a, &v);
        let x = apply_real(&b, &y);
        prop_assert!(majorizes(&x, &y).unwrap() && majorizes(&y, &v).unwrap());
        prop_assert!(majorizes(&x, &v).unwrap());
    }

    #[test]
    fn formulations_agree((x, y) in (2usize..=6).prop_flat_map(|d| (prob(d), prob(d)))) {
        let m = majorizes(&x, &y).unwrap();
        prop_assert_eq!(m, majorizes_ascending(&x, &y).unwrap());
        prop_assert_eq!(m, majorizes_by_subsets(&x, &y).unwrap());
        let rev = majorizes(&y, &x).unwrap();
        let expected = match (m, rev) {
            (true, true) => MajVerdict::Equal,
            (true, false) => MajVerdict::XPrecY,
            (false, true) => MajVerdict::YPrecX,
            (false, false) => MajVerdict::Incomparable,
        };
        prop_assert_eq!(compare(&x, &y).unwrap(), expected);
        if m {
            prop_assert!(shannon(&x) >= shannon(&y) - 1e-12);
        }
    }

    #[test]
    fn witness_reproduces_target((v, a) in vec_and_ds()) {
        let x = apply_real(&a, &v);
        let w = ds_witness(&x, &v).unwrap();
        prop_assert!(is_doubly_stochastic(&w));
        let mut vs = v.clone();
        vs.sort_by(|p, q| q.total_cmp(p));
        let mut xs = x.clone();
        xs.sort_by(|p, q| q.total_cmp(p));
        let got = apply_real(&w, &vs);
        for (g, t) in got.iter().zip(&xs) {
            prop_assert!((g - t).abs() < 1e-9);
        }
    }

    #[test]
    fn conversion_survives_ancilla((v, a, c) in (2usize..=4).prop_flat_map(|d| (prob(d), birkhoff(d), prob_any()))) {
        let w = apply_real(&a, &v);
        prop_assert!(nielsen(&w, &v).unwrap());
        prop_assert!(nielsen(&tensor(&w, &c), &tensor(&v, &c)).unwrap());
    }
}

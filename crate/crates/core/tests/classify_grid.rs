//! Every factor multiset from {A1, A2, A3, B1, B2, B3, C2, D2, D3, G2} of
//! total rank at most 4 and every subgroup S of the fundamental group:
//! classify against a brute-force oracle, then verify each certificate.

mod common;

use cayley_lattice::classify::{classify, verify_certificate, Certificate};
use cayley_lattice::rootdata::DynkinType;
use common::{grid, oracle, subgroups};

#[test]
fn grid_matches_oracle_and_certificates_verify() {
    let mut instances = 0;
    let mut positives = 0;
    let mut sha = 0;
    let mut cited = 0;
    for f in grid() {
        for gens in subgroups(&f) {
            let v = classify(&f, &gens).unwrap_or_else(|e| panic!("{f:?} {gens:?}: {e}"));
            let expected = oracle(&f, &gens);
            assert_eq!(v.is_quasi_permutation(), expected, "{f:?} {gens:?}");
            let report = verify_certificate(&v);
            assert!(report.ok, "{f:?} {gens:?}: {:?}", report.log);
            match &v.certificate {
                Certificate::NegativeSha { witness, .. } => {
                    assert!(witness.is_nonzero());
                    sha += 1;
                }
                Certificate::NegativeByReduction { .. } => cited += 1,
                _ => positives += 1,
            }
            instances += 1;
        }
    }
    println!(
        "{instances} instances: {positives} positive, {sha} Sha witnesses, {cited} cited leaves"
    );
    assert!(instances > 500);
}

#[test]
fn spot_anchors() {
    let a1 = DynkinType::a(1);
    let a2 = DynkinType::a(2);
    assert!(classify(&[a1, a1], &[vec![1, 1]])
        .unwrap()
        .is_quasi_permutation());
    assert!(!classify(&[a2, a2], &[vec![1, 1]])
        .unwrap()
        .is_quasi_permutation());
    assert!(classify(&[DynkinType::d(3)], &[vec![2]])
        .unwrap()
        .is_quasi_permutation());
    let b1 = DynkinType::b(1);
    let v = classify(&[b1, b1, b1, b1], &[vec![1, 1, 1, 1]]).unwrap();
    assert!(!v.is_quasi_permutation());
    assert!(verify_certificate(&v).ok);
}

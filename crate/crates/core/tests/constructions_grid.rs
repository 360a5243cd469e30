mod common;

use cayley_lattice::constructions::*;
use cayley_lattice::intmat::{self, int};
use cayley_lattice::rootdata::Family;
use common::{lnu_grid, section2_grid};

#[test]
fn section2_lattices_have_index_two() {
    let grid = section2_grid();
    assert!(grid.len() > 40);
    for spec in &grid {
        assert!(spec.total_rank() <= 6);
        let s = section2_lattice(spec).unwrap();
        assert_eq!(s.index(), int(2), "{spec:?}");
        assert_eq!(s.rank(), spec.total_rank());
        // 2v ∈ L′ (vectors are stored doubled, so 2v is 2·(stored v))
        let two_v: Vec<_> = s.v.iter().map(|x| x * int(2)).collect();
        assert!(intmat::solve_row(&s.l_prime_basis, &two_v).is_some());
        assert!(intmat::solve_row(&s.l_prime_basis, &s.v).is_none());
    }
}

#[test]
fn section2_analysis_on_grid() {
    let mut analyzed = 0;
    for spec in section2_grid() {
        if spec.check_hypotheses().is_err() {
            assert!(analyze_section2(&spec).is_err());
            continue;
        }
        let r = analyze_section2(&spec).unwrap();
        assert!(r.orbit_sums_to_zero, "{spec:?}");
        assert!(r.pair_sums_ok, "{spec:?}");
        assert!(r.l0_iso_j_gamma, "{spec:?}");
        assert!(r.l0_map.is_injective());
        assert!(r.decomposition_ok, "{spec:?}");
        assert_eq!(r.rank_l1, r.rank_formula, "{spec:?}");
        assert_eq!(r.sha2.factors_i64(), vec![2], "{spec:?}");
        assert!(r.partition.satisfies_parity(&spec));
        let nonempty = if spec.mu() >= 1 { 1 } else { 3 };
        assert!(r.partition.unions[..nonempty].iter().all(|u| !u.is_empty()));
        analyzed += 1;
    }
    assert!(analyzed > 30);
}

#[test]
fn klein_images_lie_in_weyl_group_of_d_factors() {
    for spec in section2_grid() {
        let Ok(p) = partition(&spec) else { continue };
        let e = klein_embedding(&spec, &p).unwrap();
        let mut o = 0;
        for f in &spec.bd_factors {
            if f.family == Family::D {
                for j in &e.j {
                    let neg = (o..o + f.l).filter(|&c| j.get(c, c) == &int(-1)).count();
                    assert_eq!(neg % 2, 0);
                }
            }
            o += f.l;
        }
    }
}

#[test]
fn lnu_grid_checks() {
    let grid = lnu_grid();
    assert!(grid.len() > 20);
    for spec in &grid {
        let l = l_nu(spec).unwrap();
        assert_eq!(l.index_over_q(), int(spec.d as i64), "{spec:?}");
        let r = verify_lemma_3_6(spec).unwrap();
        assert!(r.all_ok(), "{spec:?}: {r:?}");
        let lam = lambda_and_n(spec).unwrap();
        assert!(lam.phi_image_ok, "{spec:?}");
        assert!(lam.mu_description_ok, "{spec:?}");
        assert!(lam.quotient_ok(spec.r()), "{spec:?}");
    }
}

#[test]
fn w_nu_matches_residue_lift() {
    // w_ν lies in L_ν and has order d modulo Q.
    for spec in lnu_grid() {
        let l = l_nu(&spec).unwrap();
        let w = w_nu(&spec).unwrap();
        assert!(l.coordinates(&w).is_some());
        let q = l.q_rows();
        for k in 1..spec.d {
            let kw: Vec<_> = w.iter().map(|x| x * int(k as i64)).collect();
            assert!(intmat::solve_row(&q, &kw).is_none());
        }
        let dw: Vec<_> = w.iter().map(|x| x * int(spec.d as i64)).collect();
        assert!(intmat::solve_row(&q, &dw).is_some());
    }
}

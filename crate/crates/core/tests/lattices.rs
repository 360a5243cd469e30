use std::sync::Arc;

use cayley_lattice::glattice::{close_group, permutation_matrix, SumMode};
use cayley_lattice::intmat::{int, IntMatrix};
use cayley_lattice::rootdata::{intermediate_from_types, DynkinType};
use cayley_lattice::GLattice;

fn perm_group(gens: &[Vec<usize>]) -> Arc<cayley_lattice::FinGroup> {
    let mats: Vec<IntMatrix> = gens.iter().map(|g| permutation_matrix(g)).collect();
    Arc::new(close_group(&mats, 64).unwrap())
}

#[test]
fn regular_lattices_have_their_standard_permutation_basis() {
    let groups = [
        perm_group(&[vec![1, 2, 0]]),
        perm_group(&[vec![1, 0, 2, 3], vec![0, 1, 3, 2]]),
        perm_group(&[vec![1, 2, 3, 4, 5, 0], vec![0, 5, 4, 3, 2, 1]]),
        perm_group(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]]),
        perm_group(&[vec![1, 2, 3, 0], vec![1, 0, 2, 3]]),
        perm_group(&[vec![1, 2, 3, 4, 5, 6, 7, 0]]),
    ];
    let orders: Vec<usize> = groups.iter().map(|g| g.order()).collect();
    assert_eq!(orders, [3, 4, 12, 12, 24, 8]);
    for g in groups {
        let reg = GLattice::regular(g.clone());
        assert!(reg
            .verify_permutation_basis(&IntMatrix::identity(g.order()))
            .is_ok());
    }
}

/// Searches a basis change `T` (entries in `[−b, b]`) and a matching of
/// generators with `A_i·T = T·B_{π(i)}`.
fn isomorphic(a: &[IntMatrix], b: &[IntMatrix], bound: i64) -> bool {
    let n = a.first().map(IntMatrix::rows).unwrap_or(0);
    if a.len() != b.len() || b.iter().any(|m| m.rows() != n) {
        return false;
    }
    let k = a.len();
    let mut perms = vec![vec![]];
    for _ in 0..k {
        perms = perms
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..k)
                    .filter(|i| !p.contains(i))
                    .map(|i| [p.clone(), vec![i]].concat())
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let width = (2 * bound + 1) as usize;
    let cells = n * n;
    let total = width.pow(cells as u32);
    for code in 0..total {
        let mut c = code;
        let mut t = IntMatrix::zeros(n, n);
        for idx in 0..cells {
            t.set(idx / n, idx % n, int((c % width) as i64 - bound));
            c /= width;
        }
        if !t.is_unimodular() {
            continue;
        }
        if perms
            .iter()
            .any(|p| (0..k).all(|i| a[i].mul(&t) == t.mul(&b[p[i]])))
        {
            return true;
        }
    }
    false
}

fn actions(types: &[DynkinType], s: &[Vec<i64>]) -> Vec<IntMatrix> {
    intermediate_from_types(types, s)
        .unwrap()
        .lattice()
        .unwrap()
        .generator_actions()
        .to_vec()
}

#[test]
fn exceptional_isomorphisms() {
    let (a1, b1, a3, d2, d3) = (
        DynkinType::a(1),
        DynkinType::b(1),
        DynkinType::a(3),
        DynkinType::d(2),
        DynkinType::d(3),
    );
    // Q and P of B1 and A1
    assert!(isomorphic(&actions(&[b1], &[]), &actions(&[a1], &[]), 1));
    assert!(isomorphic(
        &actions(&[b1], &[vec![1]]),
        &actions(&[a1], &[vec![1]]),
        1
    ));
    // D2 and A1 ⊕ A1, with the product group acting blockwise
    let q1 = intermediate_from_types(&[a1], &[])
        .unwrap()
        .lattice()
        .unwrap();
    let sum = q1.direct_sum(&q1, SumMode::ProductGroup).unwrap();
    assert!(isomorphic(&actions(&[d2], &[]), sum.generator_actions(), 1));
    assert!(isomorphic(
        &actions(&[d2], &[]),
        &actions(&[a1, a1], &[]),
        1
    ));
    assert!(isomorphic(
        &actions(&[d2], &[vec![1], vec![3]]),
        &actions(&[a1, a1], &[vec![1, 0], vec![0, 1]]),
        1
    ));
    // D3 and A3: Q, P, and the index-2 lattice
    assert!(isomorphic(&actions(&[d3], &[]), &actions(&[a3], &[]), 1));
    assert!(isomorphic(
        &actions(&[d3], &[vec![1]]),
        &actions(&[a3], &[vec![1]]),
        2
    ));
    assert!(isomorphic(
        &actions(&[d3], &[vec![2]]),
        &actions(&[a3], &[vec![2]]),
        1
    ));
    // and not with the wrong intermediate lattice
    assert!(!isomorphic(
        &actions(&[d3], &[vec![2]]),
        &actions(&[a3], &[]),
        1
    ));
}

//! Grids and the independent classification oracle shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use cayley_lattice::constructions::*;
use cayley_lattice::rootdata::{DynkinType, Family};

/// Atom orders and D2 handling kept separate from the library: a D2 factor
/// contributes two Z/2 atoms, with label 1 ↦ (0,1), 2 ↦ (1,1), 3 ↦ (1,0).
pub fn atom_moduli(f: &[DynkinType]) -> Vec<i64> {
    let mut m = Vec::new();
    for t in f {
        match (t.family, t.n) {
            (Family::D, 2) => m.extend([2, 2]),
            (Family::A, n) => m.push(n as i64 + 1),
            (Family::B | Family::C, _) => m.push(2),
            (Family::D, _) => m.push(4),
            _ => m.push(1),
        }
    }
    m
}

pub fn to_atoms(f: &[DynkinType], g: &[i64]) -> Vec<i64> {
    let mut out = Vec::new();
    for (t, &r) in f.iter().zip(g) {
        if t.family == Family::D && t.n == 2 {
            out.extend(match r {
                0 => [0, 0],
                1 => [0, 1],
                2 => [1, 1],
                _ => [1, 0],
            });
        } else {
            out.push(r);
        }
    }
    out
}

pub fn closure(moduli: &[i64], gens: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
    let mut set = BTreeSet::from([vec![0; moduli.len()]]);
    loop {
        let mut grown = set.clone();
        for a in &set {
            for g in gens {
                grown.insert(
                    a.iter()
                        .zip(g)
                        .zip(moduli)
                        .map(|((x, y), m)| (x + y) % m)
                        .collect(),
                );
            }
        }
        if grown.len() == set.len() {
            return set;
        }
        set = grown;
    }
}

/// All subgroups of the factor-level fundamental group, each with a
/// generating set in factor residues.
pub fn subgroups(f: &[DynkinType]) -> Vec<Vec<Vec<i64>>> {
    let orders: Vec<i64> = f.iter().map(|t| t.fundamental_order() as i64).collect();
    let mut elements = vec![vec![]];
    for &o in &orders {
        elements = elements
            .into_iter()
            .flat_map(|e: Vec<i64>| {
                (0..o).map(move |r| {
                    let mut x = e.clone();
                    x.push(r);
                    x
                })
            })
            .collect();
    }
    let moduli = atom_moduli(f);
    let atomize = |g: &Vec<i64>| to_atoms(f, g);
    let mut seen: BTreeSet<BTreeSet<Vec<i64>>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<Vec<i64>>> = vec![vec![]];
    seen.insert(closure(&moduli, &[]));
    out.push(vec![]);
    while let Some(gens) = frontier.pop() {
        for e in &elements {
            let mut next = gens.clone();
            next.push(e.clone());
            let set = closure(&moduli, &next.iter().map(atomize).collect::<Vec<_>>());
            if seen.insert(set) {
                out.push(next.clone());
                frontier.push(next);
            }
        }
    }
    out
}

/// Allowed `S ∩ F` for a single atom, by hand.
pub fn allowed_single(t: DynkinType, s: &BTreeSet<i64>) -> bool {
    let set: Vec<i64> = s.iter().copied().collect();
    match (t.family, t.n) {
        (_, 1) | (Family::A, 2) | (Family::B, 2) | (Family::C, 2) | (Family::G2, _) => true,
        (Family::A, 3) | (Family::D, 3) => set == [0] || set == [0, 2],
        (Family::B, 3) => set == [0],
        _ => panic!("atom {t} outside the grid"),
    }
}

pub fn oracle(f: &[DynkinType], gens: &[Vec<i64>]) -> bool {
    let moduli = atom_moduli(f);
    let mut types = Vec::new();
    for t in f {
        if t.family == Family::D && t.n == 2 {
            types.extend([DynkinType::a(1), DynkinType::a(1)]);
        } else {
            types.push(*t);
        }
    }
    let s = closure(
        &moduli,
        &gens.iter().map(|g| to_atoms(f, g)).collect::<Vec<_>>(),
    );
    let n = types.len();
    let restrict = |part: &[usize]| -> BTreeSet<Vec<i64>> {
        s.iter()
            .filter(|e| {
                e.iter()
                    .enumerate()
                    .all(|(i, &r)| r == 0 || part.contains(&i))
            })
            .map(|e| part.iter().map(|&i| e[i]).collect())
            .collect()
    };
    // partitions into singletons and pairs
    fn partitions(rest: Vec<usize>) -> Vec<Vec<Vec<usize>>> {
        let Some((&first, others)) = rest.split_first() else {
            return vec![vec![]];
        };
        let mut out = Vec::new();
        for mut p in partitions(others.to_vec()) {
            p.push(vec![first]);
            out.push(p);
        }
        for (k, &j) in others.iter().enumerate() {
            let mut r = others.to_vec();
            r.remove(k);
            for mut p in partitions(r) {
                p.push(vec![first, j]);
                out.push(p);
            }
        }
        out
    }
    partitions((0..n).collect()).into_iter().any(|parts| {
        let product: usize = parts.iter().map(|p| restrict(p).len()).product();
        if product != s.len() {
            return false;
        }
        parts.iter().all(|p| {
            let r = restrict(p);
            if p.len() == 1 {
                allowed_single(types[p[0]], &r.iter().map(|e| e[0]).collect())
            } else {
                types[p[0]].rank() == 1
                    && types[p[1]].rank() == 1
                    && r == BTreeSet::from([vec![0, 0], vec![1, 1]])
            }
        })
    })
}

pub fn grid() -> Vec<Vec<DynkinType>> {
    let items = [
        DynkinType::a(1),
        DynkinType::a(2),
        DynkinType::a(3),
        DynkinType::b(1),
        DynkinType::b(2),
        DynkinType::b(3),
        DynkinType::c(2),
        DynkinType::d(2),
        DynkinType::d(3),
        DynkinType::g2(),
    ];
    let mut out = Vec::new();
    fn go(
        items: &[DynkinType],
        start: usize,
        rank: usize,
        cur: &mut Vec<DynkinType>,
        out: &mut Vec<Vec<DynkinType>>,
    ) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for i in start..items.len() {
            if rank + items[i].rank() <= 4 {
                cur.push(items[i]);
                go(items, i, rank + items[i].rank(), cur, out);
                cur.pop();
            }
        }
    }
    go(&items, 0, 0, &mut Vec::new(), &mut out);
    out
}

pub fn section2_grid() -> Vec<Section2Spec> {
    Section2Spec::enumerate(6)
}

pub fn lnu_grid() -> Vec<LnuSpec> {
    LnuSpec::enumerate(8)
}

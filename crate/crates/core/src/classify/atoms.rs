//! Atoms of a product of simple factors and subgroups of its fundamental group.
//!
//! A `D₂` factor is two `A₁` atoms; every other supported factor is one atom.
//! Residues of a `D₂` label split as `1 ↦ (0,1)`, `2 ↦ (1,1)`, `3 ↦ (1,0)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootdata::{DynkinType, Family};

/// Largest number of atoms in one support component that the exact
/// splitting search accepts.
pub const MAX_COMPONENT_ATOMS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    /// Index of the input factor.
    pub factor: usize,
    /// 0, or 1 for the second atom of a `D₂` factor.
    pub part: usize,
    /// Type used to realize the atom (`A₁` for a `D₂` atom).
    pub dynkin: DynkinType,
}

fn is_d2(t: &DynkinType) -> bool {
    t.family == Family::D && t.n == 2
}

pub fn expand_atoms(factors: &[DynkinType]) -> Result<Vec<Atom>> {
    if factors.is_empty() {
        return Err(Error::InvalidInput("no factors".into()));
    }
    let mut atoms = Vec::new();
    for (i, t) in factors.iter().enumerate() {
        t.validate()?;
        if !t.is_supported() {
            return Err(Error::UnsupportedType(t.to_string()));
        }
        if is_d2(t) {
            atoms.push(Atom {
                factor: i,
                part: 0,
                dynkin: DynkinType::a(1),
            });
            atoms.push(Atom {
                factor: i,
                part: 1,
                dynkin: DynkinType::a(1),
            });
        } else {
            atoms.push(Atom {
                factor: i,
                part: 0,
                dynkin: *t,
            });
        }
    }
    Ok(atoms)
}

fn d2_split(label: i64) -> (i64, i64) {
    match label.rem_euclid(4) {
        0 => (0, 0),
        1 => (0, 1),
        2 => (1, 1),
        _ => (1, 0),
    }
}

fn d2_join(a: i64, b: i64) -> i64 {
    match (a.rem_euclid(2), b.rem_euclid(2)) {
        (0, 0) => 0,
        (0, _) => 1,
        (1, 1) => 2,
        _ => 3,
    }
}

/// Factor residue tuple to atom residue tuple.
pub fn to_atom_residues(factors: &[DynkinType], tuple: &[i64]) -> Result<Vec<i64>> {
    if tuple.len() != factors.len() {
        return Err(Error::InvalidResidue(format!(
            "residue tuple {tuple:?} has {} entries for {} factors",
            tuple.len(),
            factors.len()
        )));
    }
    let mut out = Vec::new();
    for (t, &r) in factors.iter().zip(tuple) {
        if is_d2(t) {
            let (a, b) = d2_split(r);
            out.extend([a, b]);
        } else {
            out.push(t.reduce_residue(r));
        }
    }
    Ok(out)
}

/// Inverse of [`to_atom_residues`].
pub fn to_factor_residues(factors: &[DynkinType], atoms: &[i64]) -> Vec<i64> {
    let mut out = Vec::new();
    let mut k = 0;
    for t in factors {
        if is_d2(t) {
            out.push(d2_join(atoms[k], atoms[k + 1]));
            k += 2;
        } else {
            out.push(atoms[k]);
            k += 1;
        }
    }
    out
}

/// A subgroup of `⊕ F_i`, stored as its full element set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueGroup {
    pub types: Vec<DynkinType>,
    pub elements: BTreeSet<Vec<i64>>,
}

impl ResidueGroup {
    pub fn generated(types: &[DynkinType], gens: &[Vec<i64>], cap: usize) -> Result<ResidueGroup> {
        let zero = vec![0i64; types.len()];
        let mut elements = BTreeSet::from([zero]);
        for g in gens {
            if g.len() != types.len() {
                return Err(Error::InvalidResidue(format!("{g:?} has the wrong length")));
            }
            let g: Vec<i64> = g
                .iter()
                .zip(types)
                .map(|(&r, t)| t.reduce_residue(r))
                .collect();
            if elements.contains(&g) {
                continue;
            }
            // adjoin g: elements + k·g until it cycles back
            let mut acc = elements.clone();
            let mut shift = g.clone();
            while !elements.contains(&shift) {
                for e in &elements {
                    acc.insert(add(types, e, &shift));
                }
                if acc.len() > cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                shift = add(types, &shift, &g);
            }
            elements = acc;
        }
        Ok(ResidueGroup {
            types: types.to_vec(),
            elements,
        })
    }

    pub fn trivial(types: &[DynkinType]) -> ResidueGroup {
        ResidueGroup {
            types: types.to_vec(),
            elements: BTreeSet::from([vec![0; types.len()]]),
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// `S ∩ F_A`, in the coordinates of `A`.
    pub fn restrict(&self, subset: &[usize]) -> ResidueGroup {
        let inside: BTreeSet<usize> = subset.iter().copied().collect();
        let elements = self
            .elements
            .iter()
            .filter(|e| {
                e.iter()
                    .enumerate()
                    .all(|(i, &r)| r == 0 || inside.contains(&i))
            })
            .map(|e| subset.iter().map(|&i| e[i]).collect())
            .collect();
        ResidueGroup {
            types: subset.iter().map(|&i| self.types[i]).collect(),
            elements,
        }
    }

    /// `π_A(S)`, in the coordinates of `A`.
    pub fn project(&self, subset: &[usize]) -> ResidueGroup {
        let elements = self
            .elements
            .iter()
            .map(|e| subset.iter().map(|&i| e[i]).collect())
            .collect();
        ResidueGroup {
            types: subset.iter().map(|&i| self.types[i]).collect(),
            elements,
        }
    }

    /// `π_A(S) ⊆ S`, i.e. `S = (S ∩ F_A) ⊕ (S ∩ F_{A^c})`.
    pub fn splits(&self, subset: &[usize]) -> bool {
        self.project(subset).order() == self.restrict(subset).order()
    }

    /// A generating set, built greedily.
    pub fn generators(&self) -> Vec<Vec<i64>> {
        let mut gens: Vec<Vec<i64>> = Vec::new();
        let mut current = ResidueGroup::trivial(&self.types);
        // prefer elements of large order so cyclic groups get one generator
        let mut candidates: Vec<&Vec<i64>> = self.elements.iter().collect();
        candidates.sort_by_key(|e| std::cmp::Reverse(self.element_order(e)));
        for e in candidates {
            if current.elements.contains(e) {
                continue;
            }
            gens.push(e.clone());
            current =
                ResidueGroup::generated(&self.types, &gens, usize::MAX).expect("subgroup of S");
        }
        gens
    }

    pub fn element_order(&self, e: &[i64]) -> usize {
        let mut k = 1;
        let mut x = e.to_vec();
        while x.iter().any(|&r| r != 0) {
            x = add(&self.types, &x, e);
            k += 1;
        }
        k
    }

    /// Union of the supports of the elements.
    pub fn support(&self) -> BTreeSet<usize> {
        self.elements
            .iter()
            .flat_map(|e| {
                e.iter()
                    .enumerate()
                    .filter(|(_, &r)| r != 0)
                    .map(|(i, _)| i)
            })
            .collect()
    }
}

fn add(types: &[DynkinType], a: &[i64], b: &[i64]) -> Vec<i64> {
    types
        .iter()
        .zip(a.iter().zip(b))
        .map(|(t, (&x, &y))| t.add_residues(x, y))
        .collect()
}

/// Connected components of the graph joining atoms that share the support of
/// some element of `S`.
fn support_components(s: &ResidueGroup) -> Vec<Vec<usize>> {
    let n = s.types.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in &s.elements {
        let sup: Vec<usize> = (0..n).filter(|&i| e[i] != 0).collect();
        for w in sup.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_of[r] == usize::MAX {
            root_of[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[root_of[r]].push(i);
    }
    comps
}

/// The finest decomposition `S = ⊕ S ∩ F_B` over blocks of atoms (the atoms
/// of the Boolean algebra of splitting sets), blocks sorted by first atom.
pub fn finest_blocks(s: &ResidueGroup) -> Result<Vec<Vec<usize>>> {
    let mut blocks = Vec::new();
    for comp in support_components(s) {
        let mut rest = comp;
        while !rest.is_empty() {
            if rest.len() > MAX_COMPONENT_ATOMS {
                return Err(Error::BudgetExceeded {
                    needed: 1u128 << rest.len(),
                    cap: 1u128 << MAX_COMPONENT_ATOMS,
                });
            }
            let block = minimal_splitting_set(s, &rest);
            rest.retain(|i| !block.contains(i));
            blocks.push(block);
        }
    }
    blocks.sort();
    Ok(blocks)
}

/// Smallest splitting subset of `within` that contains `within[0]`.
/// `within` is itself splitting, so the search always succeeds.
fn minimal_splitting_set(s: &ResidueGroup, within: &[usize]) -> Vec<usize> {
    let first = within[0];
    let others = &within[1..];
    let k = others.len();
    let mut masks: Vec<u32> = (0..(1u32 << k)).collect();
    masks.sort_by_key(|m| m.count_ones());
    for m in masks {
        let mut subset = vec![first];
        subset.extend((0..k).filter(|b| m >> b & 1 == 1).map(|b| others[b]));
        subset.sort();
        if s.splits(&subset) {
            return subset;
        }
    }
    within.to_vec()
}

/// Whether the single atom `t` with `S ∩ F = s` gives a quasi-permutation
/// lattice.
pub fn atom_allowed(t: DynkinType, s: &ResidueGroup) -> bool {
    let order = s.order();
    if t.rank() <= 2 {
        return true;
    }
    match t.family {
        Family::A => order == 1 || (t.n == 3 && order == 2),
        Family::B => order == 1,
        Family::C => order == 2,
        Family::D => {
            (order == 2 && (t.n == 4 || s.elements.contains(&vec![2]))) || (t.n == 3 && order == 1)
        }
        _ => false,
    }
}

/// Two rank-one atoms with `S = ⟨(1,1)⟩`.
pub fn is_so4_pair(types: &[DynkinType], s: &ResidueGroup) -> bool {
    types.len() == 2
        && types.iter().all(|t| t.rank() == 1)
        && s.elements == BTreeSet::from([vec![0, 0], vec![1, 1]])
}

/// Whether `S` over a block of atoms is quasi-permutation, given that the
/// block admits no proper splitting.
pub fn block_allowed(s: &ResidueGroup) -> bool {
    match s.types.len() {
        1 => atom_allowed(s.types[0], s),
        2 => is_so4_pair(&s.types, s),
        _ => false,
    }
}

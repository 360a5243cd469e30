//! Sha-two witnesses: a subgroup `Γ ⊂ W` with `Ш²(Γ, L) ≠ 0`.
//!
//! Everything is expressed in the atom realization of a lattice (one simple
//! type per atom, residues per atom). Klein four-groups from the one-vector
//! construction are carried into that realization atom by atom.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cohomology::{sha2_with, Method};
use crate::constructions::{
    elementary_abelian_subgroup, klein_embedding, partition, BdFactor, LnuSpec, Section2Spec,
};
use crate::error::{Error, Result};
use crate::glattice::{as_permutation, as_signed_permutation, close_group};
use crate::intmat::{int, AbelianInvariants, IntMatrix};
use crate::rootdata::{build_factor, intermediate_from_types, DynkinType, Family};

use super::atoms::ResidueGroup;
use super::Budget;

/// Element evaluations of the generic subgroup search.
const SEARCH_EVALUATIONS: usize = 400;
/// Candidate elements considered by the generic search.
const SEARCH_CANDIDATES: usize = 400;
/// Largest subgroup tried by the generic search.
const SEARCH_SUBGROUP_ORDER: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShaWitness {
    pub types: Vec<DynkinType>,
    pub s_generators: Vec<Vec<i64>>,
    /// Generators of `Γ` as ambient matrices.
    pub gamma: Vec<IntMatrix>,
    pub group_order: usize,
    /// The generators acting on the Hermite basis of `L`.
    pub restricted: Vec<IntMatrix>,
    pub sha2: AbelianInvariants,
}

impl ShaWitness {
    /// Computes `Ш²(Γ, L)` for the given data (the value may be zero).
    pub fn compute(
        types: &[DynkinType],
        s_generators: &[Vec<i64>],
        gamma: Vec<IntMatrix>,
        budget: &Budget,
    ) -> Result<ShaWitness> {
        if let Some(bad) = gamma.iter().find(|g| !weyl_contains(types, g)) {
            return Err(Error::NotASubgroupElement(format!(
                "{bad:?} is not in the Weyl group"
            )));
        }
        let lat = intermediate_from_types(types, s_generators)?;
        let l = lat.lattice_over(&gamma, budget.max_group_order)?;
        let sha2 = sha2_with(l.group(), &l, Method::CrossedHom, budget.max_cells)?;
        Ok(ShaWitness {
            types: types.to_vec(),
            s_generators: s_generators.to_vec(),
            group_order: l.group().order(),
            restricted: l.generator_actions().to_vec(),
            gamma,
            sha2,
        })
    }

    pub fn is_nonzero(&self) -> bool {
        !self.sha2.is_trivial()
    }

    /// Recomputes everything from `types`, `s_generators` and `gamma`.
    pub fn recheck(&self, budget: &Budget) -> std::result::Result<(), String> {
        let again =
            ShaWitness::compute(&self.types, &self.s_generators, self.gamma.clone(), budget)
                .map_err(|e| format!("recomputation failed: {e}"))?;
        if again.group_order != self.group_order {
            return Err(format!(
                "Γ has order {}, recorded {}",
                again.group_order, self.group_order
            ));
        }
        if again.restricted != self.restricted {
            return Err("restricted action differs from the recorded one".into());
        }
        if again.sha2 != self.sha2 {
            return Err(format!(
                "Ш² recomputes to {}, recorded {}",
                again.sha2, self.sha2
            ));
        }
        Ok(())
    }
}

/// Whether a block-diagonal ambient matrix lies in the product Weyl group.
pub fn weyl_contains(types: &[DynkinType], m: &IntMatrix) -> bool {
    let dim: usize = types.iter().map(|t| t.ambient_dim()).sum();
    if m.rows() != dim || m.cols() != dim {
        return false;
    }
    let mut start = 0;
    for t in types {
        let end = start + t.ambient_dim();
        for i in 0..dim {
            for j in 0..dim {
                let crossing = (start..end).contains(&i) != (start..end).contains(&j);
                if crossing && !m.get(i, j).is_zero() {
                    return false;
                }
            }
        }
        let idx: Vec<usize> = (start..end).collect();
        let block = m.select_rows(&idx).select_cols(&idx);
        if !factor_weyl_contains(*t, &block) {
            return false;
        }
        start = end;
    }
    true
}

fn factor_weyl_contains(t: DynkinType, m: &IntMatrix) -> bool {
    match t.family {
        Family::A => as_permutation(m).is_some(),
        Family::B | Family::C => as_signed_permutation(m).is_some(),
        Family::D => as_signed_permutation(m)
            .is_some_and(|(_, s)| s.iter().filter(|&&x| x < 0).count() % 2 == 0),
        Family::G2 => build_factor(t)
            .and_then(|f| f.weyl_group())
            .is_ok_and(|w| w.index_of(m).is_some()),
        Family::E | Family::F => false,
    }
}

/// Searches small subgroups of `W` (generated by two elements of prime-power
/// order, of order at most 16) for a nonzero `Ш²`. Deterministic: elements
/// are taken in the closure order of `W`.
pub fn search(
    types: &[DynkinType],
    s: &ResidueGroup,
    budget: &Budget,
) -> Result<Option<ShaWitness>> {
    let order: u128 = types.iter().map(|t| t.weyl_order()).product();
    if order > budget.max_group_order as u128 {
        return Ok(None);
    }
    let s_gens = s.generators();
    let lat = intermediate_from_types(types, &s_gens)?;
    let w = close_group(&lat.weyl_generators(), budget.max_group_order)?;
    let candidates: Vec<usize> = (1..w.order())
        .filter(|&g| {
            let k = w.element_order(g);
            k <= 4 && prime_power(k)
        })
        .take(SEARCH_CANDIDATES)
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut evaluations = 0;
    for (ai, &a) in candidates.iter().enumerate() {
        for &b in &candidates[ai + 1..] {
            let elems = w.subgroup_elements(&[a, b]);
            if elems.len() > SEARCH_SUBGROUP_ORDER || !prime_power(elems.len()) || elems.len() < 4 {
                continue;
            }
            if !seen.insert(elems) {
                continue;
            }
            evaluations += 1;
            let found =
                ShaWitness::compute(types, &s_gens, vec![w.element(a), w.element(b)], budget)?;
            if found.is_nonzero() {
                return Ok(Some(found));
            }
            if evaluations >= SEARCH_EVALUATIONS {
                return Ok(None);
            }
        }
    }
    Ok(None)
}

fn prime_power(k: usize) -> bool {
    if k < 2 {
        return false;
    }
    let p = (2..=k).find(|d| k % d == 0).expect("k ≥ 2");
    let mut x = k;
    while x % p == 0 {
        x /= p;
    }
    x == 1
}

/// How one unit of the one-vector construction sits in the atom realization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unit {
    /// Block-local atom indices (two for a pair).
    pub atoms: Vec<usize>,
    pub role: Role,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// A factor of type `B_l` or `D_l` with `π(L) = P` and `L ∩ P` of index 2.
    Bd { family: Family, l: usize },
    /// A factor of type `A_{2n−1}` with `L ∩ P = Q`.
    A { n: usize },
}

impl Role {
    pub fn bd_factor(&self) -> Option<BdFactor> {
        match *self {
            Role::Bd { family, l } => Some(BdFactor { family, l }),
            Role::A { .. } => None,
        }
    }
}

/// `2H`, `H` the orthogonal matrix of a triality automorphism of `D₄`
/// carrying the spin class `ω₄` to the vector class.
fn two_h() -> IntMatrix {
    IntMatrix::from_i64(&[
        vec![1, 1, 1, 1],
        vec![1, 1, -1, -1],
        vec![1, -1, 1, -1],
        vec![1, -1, -1, 1],
    ])
}

/// Columns `2e_k` of `D₃` in the ambient coordinates of `A₃`.
fn a3_d3() -> IntMatrix {
    IntMatrix::from_i64(&[
        vec![1, 1, 1],
        vec![1, -1, -1],
        vec![-1, 1, -1],
        vec![-1, -1, 1],
    ])
}

fn conj_exact(t: &IntMatrix, j: &IntMatrix, t_inv: &IntMatrix, denom: i64) -> Result<IntMatrix> {
    t.mul(j)
        .mul(t_inv)
        .div_exact(&int(denom))
        .ok_or_else(|| Error::ConstructionFailed("transported element is not integral".into()))
}

/// The nontrivial Weyl element of a rank-one atom.
fn rank_one_reflection(t: DynkinType) -> IntMatrix {
    if t.ambient_dim() == 2 {
        IntMatrix::from_i64(&[vec![0, 1], vec![1, 0]])
    } else {
        IntMatrix::from_i64(&[vec![-1]])
    }
}

/// Carries the restriction `j` of a one-vector Weyl element to one unit into
/// the ambient coordinates of the unit's atoms (in order).
fn transport(
    unit: &Unit,
    types: &[DynkinType],
    s: &ResidueGroup,
    j: &IntMatrix,
) -> Result<Vec<IntMatrix>> {
    let first = unit.atoms[0];
    let t = types[first];
    let restricted = s.restrict(&[first]);
    let label = restricted.elements.iter().map(|e| e[0]).find(|&r| r != 0);
    match unit.role {
        Role::Bd {
            family: Family::D,
            l: 2,
        } if unit.atoms.len() == 2 => {
            let minus = if j == &IntMatrix::scalar(2, -1) {
                true
            } else if j.is_identity() {
                false
            } else {
                return Err(Error::ConstructionFailed(format!(
                    "{j:?} on a D2 unit is not ±1"
                )));
            };
            Ok(unit
                .atoms
                .iter()
                .map(|&a| {
                    if minus {
                        rank_one_reflection(types[a])
                    } else {
                        IntMatrix::identity(types[a].ambient_dim())
                    }
                })
                .collect())
        }
        _ if t.rank() == 1 => Ok(vec![if j.get(0, 0) == &int(-1) {
            rank_one_reflection(t)
        } else {
            IntMatrix::identity(t.ambient_dim())
        }]),
        Role::Bd { .. } => match (t.family, t.n, label) {
            (Family::B, _, _) => Ok(vec![j.clone()]),
            (Family::C, 2, _) => {
                let tm = IntMatrix::from_i64(&[vec![1, 1], vec![1, -1]]);
                Ok(vec![conj_exact(&tm, j, &tm, 2)?])
            }
            (Family::D, _, Some(2)) => Ok(vec![j.clone()]),
            (Family::D, 4, Some(1)) => {
                let h = two_h();
                Ok(vec![conj_exact(&h, j, &h, 4)?])
            }
            (Family::D, 4, Some(3)) => {
                let d = IntMatrix::from_i64(&[
                    vec![1, 0, 0, 0],
                    vec![0, 1, 0, 0],
                    vec![0, 0, 1, 0],
                    vec![0, 0, 0, -1],
                ]);
                let h = two_h();
                Ok(vec![conj_exact(&d.mul(&h), j, &h.mul(&d), 4)?])
            }
            (Family::A, 3, Some(2)) => {
                let c = a3_d3();
                let ones = IntMatrix::from_rows(vec![vec![int(1); 4]; 4], 4);
                let m = c.mul(j).mul(&c.transpose()).add(&ones);
                Ok(vec![m.div_exact(&int(4)).ok_or_else(|| {
                    Error::ConstructionFailed("A3 transport not integral".into())
                })?])
            }
            _ => Err(Error::ConstructionFailed(format!(
                "atom {t} with residue {label:?} has no B/D role"
            ))),
        },
        Role::A { .. } => match t.family {
            Family::A => Ok(vec![j.clone()]),
            Family::D if t.n == 3 => {
                let c = a3_d3();
                Ok(vec![conj_exact(&c.transpose(), j, &c, 4)?])
            }
            _ => Err(Error::ConstructionFailed(format!("atom {t} has no A role"))),
        },
    }
}

fn block_diag(parts: Vec<IntMatrix>) -> IntMatrix {
    parts
        .iter()
        .fold(IntMatrix::zeros(0, 0), |acc, m| acc.block_diag(m))
}

/// The spec of the one-vector construction matching the units (B/D units
/// first, in order, then A units).
pub fn unit_spec(units: &[Unit]) -> Result<Section2Spec> {
    let bd = units.iter().filter_map(|u| u.role.bd_factor()).collect();
    let a = units
        .iter()
        .filter_map(|u| match u.role {
            Role::A { n } => Some(n),
            Role::Bd { .. } => None,
        })
        .collect();
    Section2Spec::new(bd, a)
}

/// The Klein four-group of the one-vector construction, carried into the
/// realization `types` (block-local atoms), with its `Ш²`.
pub fn klein_witness(
    types: &[DynkinType],
    s: &ResidueGroup,
    units: &[Unit],
    budget: &Budget,
) -> Result<ShaWitness> {
    let spec = unit_spec(units)?;
    let part = partition(&spec)?;
    let emb = klein_embedding(&spec, &part)?;
    // B/D-family coordinate range of each unit
    let mut ranges = Vec::new();
    let mut offset = 0;
    for u in units.iter().filter(|u| matches!(u.role, Role::Bd { .. })) {
        let l = u.role.bd_factor().expect("B/D unit").l;
        ranges.push((u, offset..offset + l));
        offset += l;
    }
    for u in units.iter().filter(|u| matches!(u.role, Role::A { .. })) {
        let Role::A { n } = u.role else {
            unreachable!()
        };
        ranges.push((u, offset..offset + 2 * n));
        offset += 2 * n;
    }
    let mut gens = Vec::new();
    for j in &emb.j[..2] {
        let mut per_atom: Vec<Option<IntMatrix>> = vec![None; types.len()];
        for (u, r) in &ranges {
            let idx: Vec<usize> = r.clone().collect();
            let block = j.select_rows(&idx).select_cols(&idx);
            for (a, m) in u.atoms.iter().zip(transport(u, types, s, &block)?) {
                per_atom[*a] = Some(m);
            }
        }
        let parts = per_atom
            .into_iter()
            .zip(types)
            .map(|(m, t)| m.unwrap_or_else(|| IntMatrix::identity(t.ambient_dim())))
            .collect();
        gens.push(block_diag(parts));
    }
    ShaWitness::compute(types, &s.generators(), gens, budget)
}

/// `Ш²` on the elementary abelian subgroup `(Z/p)^{n/p}` of a cyclic
/// diagonal all-`A` block (`D₃` atoms read as `A₃`), `p` the smallest prime
/// dividing `d`.
pub fn lnu_probe(
    types: &[DynkinType],
    s: &ResidueGroup,
    spec: &LnuSpec,
    budget: &Budget,
) -> Result<ShaWitness> {
    let p = (2..=spec.d).find(|q| spec.d % q == 0).expect("d ≥ 2");
    let gens = elementary_abelian_subgroup(spec, p)?;
    let c = a3_d3();
    let mut out = Vec::new();
    for g in gens {
        let mut parts = Vec::new();
        let mut start = 0;
        for t in types {
            let n = if t.family == Family::D { 4 } else { t.n + 1 };
            let idx: Vec<usize> = (start..start + n).collect();
            let block = g.select_rows(&idx).select_cols(&idx);
            parts.push(if t.family == Family::D {
                conj_exact(&c.transpose(), &block, &c, 4)?
            } else {
                block
            });
            start += n;
        }
        out.push(block_diag(parts));
    }
    ShaWitness::compute(types, &s.generators(), out, budget)
}

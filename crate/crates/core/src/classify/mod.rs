//! Deciding whether an intermediate lattice `Q ⊆ L ⊆ P` is quasi-permutation
//! under the Weyl group, with a certificate for the answer.
//!
//! `L` is quasi-permutation exactly when `S = L/Q` splits over the atoms
//! into single atoms on the positive list and `SO₄` pairs of rank-one atoms.
//! Negative answers follow the reduction of the proof: pass to a failing
//! block or a failing intersection `L ∩ P_A`, then either exhibit a nonzero
//! `Ш²` or stop at a leaf that rests on a cited theorem. The two kinds of
//! leaf are kept apart in the certificate.

pub mod atoms;
pub mod verify;
pub mod witness;

use serde::{Deserialize, Serialize};

use crate::constructions::{LnuSpec, Section2Spec};
use crate::error::{Error, Result};
use crate::json::ResolutionDoc;
use crate::resolutions::block_resolution;
use crate::rootdata::{intermediate_from_types, DynkinType, Family};
use crate::{DEFAULT_MAX_CELLS, DEFAULT_MAX_GROUP_ORDER};

pub use atoms::{Atom, ResidueGroup};
pub use verify::{verify_certificate, verify_certificate_with, VerifyReport};
pub use witness::{Role, ShaWitness, Unit};

use atoms::{atom_allowed, block_allowed, expand_atoms, finest_blocks, to_atom_residues};

/// Cap on `|S|`.
const SUBGROUP_CAP: usize = 1 << 20;

/// Resource caps for group closures and cochain matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_group_order: usize,
    pub max_cells: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_group_order: DEFAULT_MAX_GROUP_ORDER,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    QuasiPermutation,
    NotQuasiPermutation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub factors: Vec<DynkinType>,
    pub subgroup: Vec<Vec<i64>>,
    pub certificate: Certificate,
}

impl Verdict {
    pub fn is_quasi_permutation(&self) -> bool {
        self.status == Status::QuasiPermutation
    }

    /// True when the certificate does not rest on a cited theorem.
    pub fn machine_verifiable(&self) -> bool {
        !matches!(self.certificate, Certificate::NegativeByReduction { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// One resolution of the whole lattice.
    PositiveResolution { resolution: ResolutionDoc },
    /// `L = ⊕ L ∩ P_B` over blocks, each with its own resolution.
    PositiveDecomposition { blocks: Vec<PositiveBlock> },
    /// `trace` leads from `L` to the lattice of `witness`, which has a
    /// nonzero `Ш²`.
    NegativeSha {
        trace: Vec<Step>,
        witness: ShaWitness,
    },
    /// `trace` leads to a lattice covered by a cited theorem.
    NegativeByReduction { trace: Vec<Step>, leaf: CitedLeaf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockTag {
    So4Pair,
    Simple,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositiveBlock {
    pub kind: BlockTag,
    /// Input factors touched by the block.
    pub indices: Vec<usize>,
    /// Atoms of the block.
    pub atoms: Vec<usize>,
    pub types: Vec<DynkinType>,
    pub s_generators: Vec<Vec<i64>>,
    pub resolution: ResolutionDoc,
}

/// One reduction step; atom indices refer to the current lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    /// Pass to `L ∩ P_A`, which is quasi-permutation whenever `L` is.
    Restrict { atoms: Vec<usize>, reason: Reason },
    /// The current lattice is the one-vector lattice of `spec`; `units[0]`
    /// holds the distinguished first factor.
    OneVector {
        units: Vec<Unit>,
        spec: Section2Spec,
    },
    /// The current lattice is `L_ν` for `spec`.
    CyclicDiagonal { spec: LnuSpec },
    /// Rank-one atoms and their `SO₄` pair conditions.
    RankOnePairs {
        pairs: Vec<[usize; 2]>,
        consistent: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// A block of the finest splitting.
    Split,
    /// A single atom whose intersection is off the positive list.
    Projection,
    /// The complement of the first factor.
    Complement,
    /// A minimal set of atoms on which `S` has nonzero intersection.
    MinimalSupport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitedLeaf {
    pub claim: Claim,
    /// `Ш²` computed on the natural candidate subgroup, when in budget; it
    /// vanishes (a nonzero value would have produced a `NegativeSha`).
    pub probe: Option<ShaWitness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    OffListAtom,
    CyclicDiagonal,
    RankOneAtoms,
    OneVector,
}

impl Claim {
    pub fn statement(&self) -> &'static str {
        match self {
            Claim::OffListAtom => "a simple intermediate lattice off the positive list is not quasi-permutation",
            Claim::CyclicDiagonal => {
                "L_nu (all factors A_{n-1} with n >= 3, S cyclic and diagonal) is not quasi-permutation"
            }
            Claim::RankOneAtoms => {
                "an unsplittable lattice over at least three rank-one factors is not quasi-permutation"
            }
            Claim::OneVector => "the one-vector lattice <L', v> is not quasi-permutation",
        }
    }
}

enum Leaf {
    Sha(ShaWitness),
    Cited(CitedLeaf),
}

/// Rank-one atoms `{i, j}` with `S ∩ F_i = S ∩ F_j = 0 ≠ S ∩ (F_i ⊕ F_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMatching {
    pub pairs: Vec<[usize; 2]>,
    /// No index occurs in two pairs.
    pub consistent: bool,
}

fn pairs_of(s: &ResidueGroup) -> PairMatching {
    let n = s.types.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if s.restrict(&[i]).is_trivial()
                && s.restrict(&[j]).is_trivial()
                && !s.restrict(&[i, j]).is_trivial()
            {
                pairs.push([i, j]);
            }
        }
    }
    let mut used = vec![false; n];
    let mut consistent = true;
    for p in &pairs {
        for &k in p {
            consistent &= !std::mem::replace(&mut used[k], true);
        }
    }
    PairMatching { pairs, consistent }
}

/// The pair set of a lattice over rank-one factors (`A₁`/`B₁`).
pub fn pair_matching(factors: &[DynkinType], s_generators: &[Vec<i64>]) -> Result<PairMatching> {
    if let Some(t) = factors.iter().find(|t| t.rank() != 1) {
        return Err(Error::InvalidInput(format!(
            "pair matching needs rank-one factors, found {t}"
        )));
    }
    let (_, s) = atom_group(factors, s_generators)?;
    Ok(pairs_of(&s))
}

fn atom_group(
    factors: &[DynkinType],
    s_generators: &[Vec<i64>],
) -> Result<(Vec<Atom>, ResidueGroup)> {
    let atoms = expand_atoms(factors)?;
    let types: Vec<DynkinType> = atoms.iter().map(|a| a.dynkin).collect();
    let gens = s_generators
        .iter()
        .map(|g| to_atom_residues(factors, g))
        .collect::<Result<Vec<_>>>()?;
    let s = ResidueGroup::generated(&types, &gens, SUBGROUP_CAP)?;
    Ok((atoms, s))
}

/// Whether the lattice cut out by `s` is quasi-permutation.
pub fn is_quasi_permutation(s: &ResidueGroup) -> Result<bool> {
    Ok(finest_blocks(s)?
        .iter()
        .all(|b| block_allowed(&s.restrict(b))))
}

pub fn classify(factors: &[DynkinType], s_generators: &[Vec<i64>]) -> Result<Verdict> {
    classify_with(factors, s_generators, &Budget::default())
}

pub fn classify_with(
    factors: &[DynkinType],
    s_generators: &[Vec<i64>],
    budget: &Budget,
) -> Result<Verdict> {
    let (atoms, s) = atom_group(factors, s_generators)?;
    let blocks = finest_blocks(&s)?;
    let positive = blocks.iter().all(|b| block_allowed(&s.restrict(b)));
    let (status, certificate) = if positive {
        (
            Status::QuasiPermutation,
            positive_certificate(factors, &atoms, &s, &blocks)?,
        )
    } else {
        let (trace, leaf) = certify_negative(&s, budget)?;
        let cert = match leaf {
            Leaf::Sha(witness) => Certificate::NegativeSha { trace, witness },
            Leaf::Cited(leaf) => Certificate::NegativeByReduction { trace, leaf },
        };
        (Status::NotQuasiPermutation, cert)
    };
    Ok(Verdict {
        status,
        factors: factors.to_vec(),
        subgroup: s_generators.to_vec(),
        certificate,
    })
}

fn positive_certificate(
    factors: &[DynkinType],
    atoms: &[Atom],
    s: &ResidueGroup,
    blocks: &[Vec<usize>],
) -> Result<Certificate> {
    let mut out = Vec::new();
    for b in blocks {
        let sub = s.restrict(b);
        let gens = sub.generators();
        let lat = intermediate_from_types(&sub.types, &gens)?;
        let res = block_resolution(&lat)?;
        let mut indices: Vec<usize> = b.iter().map(|&a| atoms[a].factor).collect();
        indices.dedup();
        out.push(PositiveBlock {
            kind: if b.len() == 2 {
                BlockTag::So4Pair
            } else {
                BlockTag::Simple
            },
            indices,
            atoms: b.clone(),
            types: sub.types.clone(),
            s_generators: gens,
            resolution: ResolutionDoc::from_resolution(&res),
        });
    }
    if factors.len() == 1 && atoms.len() == 1 {
        let block = out.pop().expect("one block");
        return Ok(Certificate::PositiveResolution {
            resolution: block.resolution,
        });
    }
    Ok(Certificate::PositiveDecomposition { blocks: out })
}

fn prepend(step: Step, (mut trace, leaf): (Vec<Step>, Leaf)) -> (Vec<Step>, Leaf) {
    trace.insert(0, step);
    (trace, leaf)
}

/// Trace and leaf for a lattice that is not quasi-permutation.
fn certify_negative(s: &ResidueGroup, budget: &Budget) -> Result<(Vec<Step>, Leaf)> {
    let blocks = finest_blocks(s)?;
    if blocks.len() > 1 {
        let b = blocks
            .iter()
            .find(|b| !block_allowed(&s.restrict(b)))
            .ok_or_else(|| Error::InvalidInput("lattice is quasi-permutation".into()))?;
        let inner = certify_negative(&s.restrict(b), budget)?;
        return Ok(prepend(
            Step::Restrict {
                atoms: b.clone(),
                reason: Reason::Split,
            },
            inner,
        ));
    }
    let n = s.types.len();
    if n == 1 {
        return off_list_leaf(s, budget);
    }
    if let Some(i) = (0..n).find(|&i| !atom_allowed(s.types[i], &s.restrict(&[i]))) {
        let inner = off_list_leaf(&s.restrict(&[i]), budget)?;
        return Ok(prepend(
            Step::Restrict {
                atoms: vec![i],
                reason: Reason::Projection,
            },
            inner,
        ));
    }
    if s.types.iter().all(|t| t.rank() == 1) {
        return rank_one_case(s, budget);
    }
    if (0..n).all(|i| a_role(s.types[i], &s.restrict(&[i]))) {
        return a_case(s, budget);
    }
    mixed_case(s, budget)
}

fn off_list_leaf(s: &ResidueGroup, budget: &Budget) -> Result<(Vec<Step>, Leaf)> {
    let leaf = match witness::search(&s.types, s, budget)? {
        Some(w) => Leaf::Sha(w),
        None => Leaf::Cited(CitedLeaf {
            claim: Claim::OffListAtom,
            probe: None,
        }),
    };
    Ok((Vec::new(), leaf))
}

fn rank_one_case(s: &ResidueGroup, budget: &Budget) -> Result<(Vec<Step>, Leaf)> {
    let m = pairs_of(s);
    let step = Step::RankOnePairs {
        pairs: m.pairs,
        consistent: m.consistent,
    };
    let leaf = match witness::search(&s.types, s, budget)? {
        Some(w) => Leaf::Sha(w),
        None => Leaf::Cited(CitedLeaf {
            claim: Claim::RankOneAtoms,
            probe: None,
        }),
    };
    Ok((vec![step], leaf))
}

/// `A_{n−1}` with `n ≥ 3` (or `D₃ = A₃`) meeting `S` trivially.
fn a_role(t: DynkinType, sub: &ResidueGroup) -> bool {
    sub.is_trivial() && ((t.family == Family::A && t.n >= 2) || (t.family == Family::D && t.n == 3))
}

/// `n` with the atom read as `A_{n−1}`.
fn a_order(t: DynkinType) -> usize {
    if t.family == Family::D {
        4
    } else {
        t.n + 1
    }
}

fn a_case(s: &ResidueGroup, budget: &Budget) -> Result<(Vec<Step>, Leaf)> {
    let n = s.types.len();
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let subset: Vec<usize> = masks
        .iter()
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
        .find(|a| !s.restrict(a).is_trivial())
        .ok_or_else(|| Error::InvalidInput("S is trivial".into()))?;
    let sub = s.restrict(&subset);
    let n_list: Vec<usize> = sub.types.iter().map(|&t| a_order(t)).collect();
    let d = sub.order();
    let g = sub
        .elements
        .iter()
        .find(|e| sub.element_order(e) == d && e[0] as usize == n_list[0] / d)
        .ok_or_else(|| Error::ConstructionFailed("S on a minimal support is not cyclic".into()))?;
    let nu: Vec<usize> = g
        .iter()
        .zip(&n_list)
        .map(|(&r, &ni)| r as usize * d / ni)
        .collect();
    let spec = LnuSpec::new(n_list, d, nu)?;
    let mut trace = Vec::new();
    if subset.len() < n {
        trace.push(Step::Restrict {
            atoms: subset.clone(),
            reason: Reason::MinimalSupport,
        });
    }
    trace.push(Step::CyclicDiagonal { spec: spec.clone() });
    let probe = match witness::lnu_probe(&sub.types, &sub, &spec, budget) {
        Ok(w) => Some(w),
        Err(Error::BudgetExceeded { .. } | Error::GroupTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let leaf = match probe {
        Some(w) if w.is_nonzero() => Leaf::Sha(w),
        probe => Leaf::Cited(CitedLeaf {
            claim: Claim::CyclicDiagonal,
            probe,
        }),
    };
    Ok((trace, leaf))
}

/// Role of an atom as the first factor of the one-vector construction.
fn first_role(t: DynkinType, sub: &ResidueGroup) -> Option<Role> {
    let order = sub.order();
    match t.family {
        _ if t.rank() == 1 && order == 1 => Some(Role::Bd {
            family: Family::B,
            l: 1,
        }),
        Family::B if order == 1 => Some(Role::Bd {
            family: Family::B,
            l: t.n,
        }),
        Family::C if t.n == 2 && order == 1 => Some(Role::Bd {
            family: Family::B,
            l: 2,
        }),
        Family::D if t.n >= 3 && order == 2 => Some(Role::Bd {
            family: Family::D,
            l: t.n,
        }),
        Family::A if t.n == 3 && order == 2 => Some(Role::Bd {
            family: Family::D,
            l: 3,
        }),
        _ => None,
    }
}

/// Role of a simple summand of `L′` other than the first factor.
fn summand_role(t: DynkinType, sub: &ResidueGroup) -> Option<Role> {
    first_role(t, sub).or_else(|| {
        let n = a_order(t);
        (a_role(t, sub) && n % 2 == 0).then_some(Role::A { n: n / 2 })
    })
}

fn mixed_case(s: &ResidueGroup, budget: &Budget) -> Result<(Vec<Step>, Leaf)> {
    let n = s.types.len();
    let roles: Vec<Option<Role>> = (0..n)
        .map(|i| first_role(s.types[i], &s.restrict(&[i])))
        .collect();
    let first = (0..n)
        .find(|&i| roles[i].is_some() && s.types[i].rank() > 1)
        .or_else(|| (0..n).find(|&i| roles[i].is_some()));
    let Some(first) = first else {
        return generic_leaf(s, Vec::new(), budget);
    };
    let comp: Vec<usize> = (0..n).filter(|&i| i != first).collect();
    let sc = s.restrict(&comp);
    if !is_quasi_permutation(&sc)? {
        let inner = certify_negative(&sc, budget)?;
        return Ok(prepend(
            Step::Restrict {
                atoms: comp,
                reason: Reason::Complement,
            },
            inner,
        ));
    }
    let mut units = vec![Unit {
        atoms: vec![first],
        role: roles[first].expect("chosen for its role"),
    }];
    for b in finest_blocks(&sc)? {
        let atoms: Vec<usize> = b.iter().map(|&k| comp[k]).collect();
        let role = if atoms.len() == 2 {
            Some(Role::Bd {
                family: Family::D,
                l: 2,
            })
        } else {
            summand_role(s.types[atoms[0]], &s.restrict(&atoms))
        };
        match role {
            Some(role) => units.push(Unit { atoms, role }),
            None => return generic_leaf(s, Vec::new(), budget),
        }
    }
    let Ok(spec) = witness::unit_spec(&units) else {
        return generic_leaf(s, Vec::new(), budget);
    };
    if spec.check_hypotheses().is_err() {
        return generic_leaf(s, Vec::new(), budget);
    }
    let step = Step::OneVector {
        units: units.clone(),
        spec,
    };
    match witness::klein_witness(&s.types, s, &units, budget) {
        Ok(w) if w.is_nonzero() => Ok((vec![step], Leaf::Sha(w))),
        Ok(_)
        | Err(
            Error::ConstructionFailed(_) | Error::HypothesesViolated(_) | Error::ParityViolation(_),
        ) => generic_leaf(s, vec![step], budget),
        Err(e) => Err(e),
    }
}

fn generic_leaf(s: &ResidueGroup, trace: Vec<Step>, budget: &Budget) -> Result<(Vec<Step>, Leaf)> {
    let leaf = match witness::search(&s.types, s, budget)? {
        Some(w) => Leaf::Sha(w),
        None => Leaf::Cited(CitedLeaf {
            claim: Claim::OneVector,
            probe: None,
        }),
    };
    Ok((trace, leaf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: usize) -> DynkinType {
        DynkinType::a(n)
    }

    #[test]
    fn so4_pair_is_positive() {
        let v = classify(&[a(1), a(1)], &[vec![1, 1]]).unwrap();
        assert!(v.is_quasi_permutation());
        let Certificate::PositiveDecomposition { blocks } = &v.certificate else {
            panic!()
        };
        assert_eq!((blocks.len(), blocks[0].kind), (1, BlockTag::So4Pair));
        let v = classify(&[a(3)], &[]).unwrap();
        assert!(matches!(
            v.certificate,
            Certificate::PositiveResolution { .. }
        ));
        let v = classify(&[a(1), a(1), a(2)], &[vec![1, 1, 0]]).unwrap();
        let Certificate::PositiveDecomposition { blocks } = &v.certificate else {
            panic!()
        };
        assert_eq!(blocks[0].kind, BlockTag::So4Pair);
        assert_eq!(blocks[0].indices, vec![0, 1]);
        assert_eq!(blocks[1].kind, BlockTag::Simple);
    }

    #[test]
    fn diagonal_a2_pair_is_cited() {
        let v = classify(&[a(2), a(2)], &[vec![1, 1]]).unwrap();
        assert!(!v.is_quasi_permutation());
        let Certificate::NegativeByReduction { trace, leaf } = &v.certificate else {
            panic!("{v:?}")
        };
        assert_eq!(leaf.claim, Claim::CyclicDiagonal);
        let probe = leaf.probe.as_ref().unwrap();
        assert_eq!(probe.group_order, 9);
        assert!(probe.sha2.is_trivial());
        assert!(matches!(trace[0], Step::CyclicDiagonal { .. }));
    }

    #[test]
    fn g2_and_x_so6() {
        assert!(classify(&[DynkinType::g2()], &[])
            .unwrap()
            .is_quasi_permutation());
        assert!(classify(&[DynkinType::d(3)], &[vec![2]])
            .unwrap()
            .is_quasi_permutation());
        assert!(classify(&[DynkinType::d(3)], &[])
            .unwrap()
            .is_quasi_permutation());
        assert!(!classify(&[DynkinType::d(3)], &[vec![1]])
            .unwrap()
            .is_quasi_permutation());
    }

    #[test]
    fn b2_b1_gets_klein_witness() {
        let v = classify(&[DynkinType::b(2), DynkinType::b(1)], &[vec![1, 1]]).unwrap();
        let Certificate::NegativeSha { trace, witness } = &v.certificate else {
            panic!("{v:?}")
        };
        assert_eq!(witness.sha2.factors_i64(), vec![2]);
        assert!(matches!(trace[0], Step::OneVector { .. }));
    }

    #[test]
    fn rank_one_overlap() {
        let f = [a(1), a(1), a(1)];
        let s = [vec![1, 1, 0], vec![0, 1, 1]];
        let m = pair_matching(&f, &s).unwrap();
        assert_eq!(m.pairs, vec![[0, 1], [0, 2], [1, 2]]);
        assert!(!m.consistent);
        assert!(!classify(&f, &s).unwrap().is_quasi_permutation());
        assert_eq!(
            pair_matching(&f, &[]).unwrap().pairs,
            Vec::<[usize; 2]>::new()
        );
        assert!(pair_matching(&[a(2)], &[]).is_err());
    }

    #[test]
    fn exceptional_rejected() {
        let e6 = DynkinType {
            family: Family::E,
            n: 6,
        };
        assert!(matches!(
            classify(&[e6], &[]),
            Err(Error::UnsupportedType(_))
        ));
    }
}

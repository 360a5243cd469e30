//! Lattices with finite group actions and equivariant maps between them.
//!
//! Lattice vectors are rows and the group acts on the right: `x ↦ x·ρ(g)`,
//! with `ρ(g)ρ(h) = ρ(gh)`.

mod group;

use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

pub use group::{close_group, FinGroup};

use crate::error::{Error, Result};
use crate::intmat::{self, AbelianInvariants, Int, IntMatrix};
use crate::DEFAULT_MAX_GROUP_ORDER;

pub(crate) use group::is_prime;

/// A finite group together with an integral representation on `Z^rank`.
#[derive(Clone)]
pub struct GLattice {
    group: Arc<FinGroup>,
    rank: usize,
    gen_action: Vec<IntMatrix>,
    actions: Arc<OnceLock<Vec<IntMatrix>>>,
}

impl std::fmt::Debug for GLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GLattice")
            .field("rank", &self.rank)
            .field("group", &self.group)
            .field("generator_action", &self.gen_action)
            .finish()
    }
}

impl PartialEq for GLattice {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank
            && same_group(&self.group, &other.group)
            && self.gen_action == other.gen_action
    }
}

impl Eq for GLattice {}

pub(crate) fn same_group(a: &Arc<FinGroup>, b: &Arc<FinGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// How `direct_sum` combines the acting groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumMode {
    /// Both summands carry the same group, acting diagonally.
    SameGroup,
    /// The direct product of the two groups acts blockwise.
    ProductGroup,
}

/// Structure of a quotient lattice together with whether the group acts
/// trivially on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientInfo {
    pub invariants: AbelianInvariants,
    pub trivial_action: bool,
}

impl GLattice {
    /// Lattice whose action is given on the generators of `group`. Checks that
    /// the images extend to a homomorphism (every Cayley-graph edge).
    pub fn from_generator_images(group: Arc<FinGroup>, images: Vec<IntMatrix>) -> Result<GLattice> {
        let l = Self::build(group, images)?;
        l.check_homomorphism()?;
        Ok(l)
    }

    /// As `from_generator_images` without the homomorphism check. Only for
    /// images known to come from a representation (conjugates or
    /// restrictions of one).
    pub fn from_generator_images_unchecked(
        group: Arc<FinGroup>,
        images: Vec<IntMatrix>,
    ) -> Result<GLattice> {
        Self::build(group, images)
    }

    fn build(group: Arc<FinGroup>, images: Vec<IntMatrix>) -> Result<GLattice> {
        if images.len() != group.generators().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} generator images for {} generators",
                images.len(),
                group.generators().len()
            )));
        }
        let rank = images.first().map(|m| m.rows()).unwrap_or(0);
        for m in &images {
            if !m.is_square() || m.rows() != rank {
                return Err(Error::DimensionMismatch(
                    "generator images of different shapes".into(),
                ));
            }
            if !m.is_unimodular() {
                return Err(Error::NotUnimodular(format!("{m:?}")));
            }
        }
        Ok(GLattice {
            group,
            rank,
            gen_action: images,
            actions: Arc::new(OnceLock::new()),
        })
    }

    /// Rank-0 lattice or trivial action on `Z^rank`.
    pub fn trivial(group: Arc<FinGroup>, rank: usize) -> GLattice {
        let images = vec![IntMatrix::identity(rank); group.generators().len()];
        GLattice {
            group,
            rank,
            gen_action: images,
            actions: Arc::new(OnceLock::new()),
        }
    }

    /// The defining representation: `ρ(g)` is the matrix of `g`.
    pub fn natural(group: Arc<FinGroup>) -> GLattice {
        let images = group.generator_matrices();
        let rank = group.dim();
        GLattice {
            group,
            rank,
            gen_action: images,
            actions: Arc::new(OnceLock::new()),
        }
    }

    /// The regular lattice `Z[Γ]` with basis `e_h`, `e_h·g = e_{hg}`.
    pub fn regular(group: Arc<FinGroup>) -> GLattice {
        let n = group.order();
        let images = group
            .generators()
            .iter()
            .map(|&g| permutation_matrix(&(0..n).map(|h| group.mul(h, g)).collect::<Vec<_>>()))
            .collect();
        GLattice {
            group,
            rank: n,
            gen_action: images,
            actions: Arc::new(OnceLock::new()),
        }
    }

    /// The permutation lattice `Z[H\Γ]` on right cosets `Hx`, for a subgroup
    /// given by its sorted element list.
    pub fn cosets(group: Arc<FinGroup>, subgroup: &[usize]) -> GLattice {
        let n = group.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for x in 0..n {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(x);
            for &h in subgroup {
                coset_of[group.mul(h, x)] = c;
            }
        }
        let images = group
            .generators()
            .iter()
            .map(|&g| {
                permutation_matrix(
                    &reps
                        .iter()
                        .map(|&x| coset_of[group.mul(x, g)])
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        GLattice {
            group,
            rank: reps.len(),
            gen_action: images,
            actions: Arc::new(OnceLock::new()),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn group(&self) -> &Arc<FinGroup> {
        &self.group
    }

    /// Action matrices of the group generators, in generator order.
    pub fn generator_actions(&self) -> &[IntMatrix] {
        &self.gen_action
    }

    /// Action matrices of every element, indexed like the group.
    pub fn actions(&self) -> &[IntMatrix] {
        self.actions.get_or_init(|| {
            let g = &self.group;
            let mut out: Vec<IntMatrix> = Vec::with_capacity(g.order());
            out.push(IntMatrix::identity(self.rank));
            for i in 1..g.order() {
                let (p, gi) = g
                    .tree_edge(i)
                    .expect("non-identity element without tree edge");
                let m = out[p].mul(&self.gen_action[gi]);
                out.push(m);
            }
            out
        })
    }

    pub fn action(&self, g: usize) -> &IntMatrix {
        &self.actions()[g]
    }

    fn check_homomorphism(&self) -> Result<()> {
        let acts = self.actions();
        for e in 0..self.group.order() {
            for (gi, &g) in self.group.generators().iter().enumerate() {
                if acts[e].mul(&self.gen_action[gi]) != acts[self.group.mul(e, g)] {
                    return Err(Error::InvalidInput(
                        "generator images do not define a homomorphism".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Exhaustive check of `ρ(g)ρ(h) = ρ(gh)` over all pairs.
    pub fn is_homomorphism(&self) -> bool {
        let acts = self.actions();
        let n = self.group.order();
        acts[0].is_identity()
            && (0..n).all(|a| (0..n).all(|b| acts[a].mul(&acts[b]) == acts[self.group.mul(a, b)]))
    }

    pub fn is_trivial_action(&self) -> bool {
        self.gen_action.iter().all(IntMatrix::is_identity)
    }

    /// Direct sum. In `SameGroup` mode the groups must agree; in
    /// `ProductGroup` mode the product of the two groups acts blockwise.
    pub fn direct_sum(&self, other: &GLattice, mode: SumMode) -> Result<GLattice> {
        match mode {
            SumMode::SameGroup => {
                if !same_group(&self.group, &other.group) {
                    return Err(Error::GroupMismatch);
                }
                let images = self
                    .gen_action
                    .iter()
                    .zip(&other.gen_action)
                    .map(|(a, b)| a.block_diag(b))
                    .collect();
                Self::build(self.group.clone(), images)
            }
            SumMode::ProductGroup => {
                let prod = Arc::new(self.group.product(&other.group, DEFAULT_MAX_GROUP_ORDER)?);
                let mut images = Vec::new();
                for a in &self.gen_action {
                    images.push(a.block_diag(&IntMatrix::identity(other.rank)));
                }
                for b in &other.gen_action {
                    images.push(IntMatrix::identity(self.rank).block_diag(b));
                }
                Self::build(prod, images)
            }
        }
    }

    /// Direct sum of several lattices over one group.
    pub fn direct_sum_all(parts: &[GLattice]) -> Result<GLattice> {
        let mut it = parts.iter();
        let first = it
            .next()
            .ok_or_else(|| Error::InvalidInput("empty direct sum".into()))?;
        let mut acc = first.clone();
        for p in it {
            acc = acc.direct_sum(p, SumMode::SameGroup)?;
        }
        Ok(acc)
    }

    /// Dual lattice `Hom(L, Z)` with `ρ*(g) = ρ(g⁻¹)ᵀ`.
    pub fn dual(&self) -> GLattice {
        let images = self
            .gen_action
            .iter()
            .map(|a| {
                a.inverse_unimodular()
                    .expect("action matrix is unimodular")
                    .transpose()
            })
            .collect();
        GLattice {
            group: self.group.clone(),
            rank: self.rank,
            gen_action: images,
            actions: Arc::new(OnceLock::new()),
        }
    }

    /// Restriction to the subgroup generated by the given element indices.
    pub fn restrict(&self, subgroup_generators: &[usize]) -> Result<GLattice> {
        let sub = Arc::new(self.group.subgroup(subgroup_generators)?);
        let images = if subgroup_generators.is_empty() {
            Vec::new()
        } else {
            // subgroup generators keep their order
            subgroup_generators
                .iter()
                .map(|&g| self.action_of_element(g))
                .collect()
        };
        Self::build(sub, images)
    }

    /// Restriction to the subgroup generated by the given group matrices.
    pub fn restrict_to_matrices(&self, gens: &[IntMatrix]) -> Result<GLattice> {
        let idx = gens
            .iter()
            .map(|m| {
                self.group
                    .index_of(m)
                    .ok_or_else(|| Error::NotASubgroupElement(format!("{m:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.restrict(&idx)
    }

    /// Action of one element, computed along the spanning tree without
    /// filling the full action cache.
    pub fn action_of_element(&self, g: usize) -> IntMatrix {
        if let Some(all) = self.actions.get() {
            return all[g].clone();
        }
        let mut path = Vec::new();
        let mut x = g;
        while let Some((p, gi)) = self.group.tree_edge(x) {
            path.push(gi);
            x = p;
        }
        let mut m = IntMatrix::identity(self.rank);
        for gi in path.into_iter().rev() {
            m = m.mul(&self.gen_action[gi]);
        }
        m
    }

    /// The sublattice spanned by `rows` (independent, in this lattice's
    /// coordinates) with the induced action in that basis.
    pub fn invariant_sublattice(&self, rows: &IntMatrix) -> Result<GLattice> {
        if rows.cols() != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "rows of length {} in rank {}",
                rows.cols(),
                self.rank
            )));
        }
        if intmat::rank(rows) != rows.rows() {
            return Err(Error::InvalidInput(
                "sublattice rows are not independent".into(),
            ));
        }
        let mut images = Vec::with_capacity(self.gen_action.len());
        for a in &self.gen_action {
            let moved = rows.mul(a);
            let c = intmat::solve_rows(rows, &moved)
                .ok_or_else(|| Error::NotInvariant(format!("span of {rows:?} is not stable")))?;
            images.push(c);
        }
        if images.is_empty() {
            return Ok(GLattice::trivial(self.group.clone(), rows.rows()));
        }
        Self::build(self.group.clone(), images)
    }

    /// Same lattice in a new basis: the rows of `basis` (unimodular) are the
    /// new basis vectors written in the old coordinates.
    pub fn change_basis(&self, basis: &IntMatrix) -> Result<GLattice> {
        if !basis.is_square() || basis.rows() != self.rank || !basis.is_unimodular() {
            return Err(Error::NotUnimodular(format!("{basis:?}")));
        }
        let inv = basis.inverse_unimodular().expect("unimodular");
        let images = self
            .gen_action
            .iter()
            .map(|a| basis.mul(a).mul(&inv))
            .collect();
        Self::build(self.group.clone(), images)
    }

    /// Structure of `L / span(rows)` and whether the group acts trivially on
    /// it. `rows` must span an invariant sublattice.
    pub fn quotient_by(&self, rows: &IntMatrix) -> Result<QuotientInfo> {
        if rows.cols() != self.rank {
            return Err(Error::DimensionMismatch("quotient rows".into()));
        }
        let sub = intmat::hnf_rows(rows);
        let in_sub = |v: &[Int]| -> bool {
            if v.iter().all(Zero::is_zero) {
                return true;
            }
            if sub.rows() == 0 {
                return false;
            }
            intmat::solve_row(&sub, v).is_some()
        };
        for a in &self.gen_action {
            for i in 0..sub.rows() {
                if !in_sub(&a.apply_row(sub.row(i))) {
                    return Err(Error::NotInvariant(
                        "quotient by a non-invariant sublattice".into(),
                    ));
                }
            }
        }
        let invariants = intmat::row_cokernel_invariants(&sub);
        let trivial_action = self.gen_action.iter().all(|a| {
            let d = a.sub(&IntMatrix::identity(self.rank));
            (0..self.rank).all(|i| in_sub(d.row(i)))
        });
        Ok(QuotientInfo {
            invariants,
            trivial_action,
        })
    }

    /// Checks that in the basis given by the rows of `basis` every generator
    /// acts by a permutation matrix.
    pub fn verify_permutation_basis(&self, basis: &IntMatrix) -> Result<PermutationWitness> {
        let moved = self.change_basis(basis)?;
        let mut perms = Vec::with_capacity(moved.gen_action.len());
        for a in &moved.gen_action {
            perms.push(as_permutation(a).ok_or(Error::NotPermutationInThisBasis)?);
        }
        Ok(PermutationWitness {
            basis: basis.clone(),
            generator_permutations: perms,
        })
    }

    /// Signed-permutation structure of the action in the current basis.
    pub fn is_sign_permutation(&self) -> Option<SignedPermutationWitness> {
        let mut perms = Vec::new();
        let mut signs = Vec::new();
        for a in &self.gen_action {
            let (p, s) = as_signed_permutation(a)?;
            perms.push(p);
            signs.push(s);
        }
        Some(SignedPermutationWitness {
            generator_permutations: perms,
            generator_signs: signs,
        })
    }
}

/// Permutation matrix with `e_i ↦ e_{p[i]}` (row `i` has its 1 in column `p[i]`).
pub fn permutation_matrix(p: &[usize]) -> IntMatrix {
    let n = p.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, &j) in p.iter().enumerate() {
        m.set(i, j, Int::one());
    }
    m
}

/// Signed permutation matrix with `e_i ↦ s[i]·e_{p[i]}`.
pub fn signed_permutation_matrix(p: &[usize], s: &[i8]) -> IntMatrix {
    let n = p.len();
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, p[i], Int::from(s[i]));
    }
    m
}

pub(crate) fn as_signed_permutation(a: &IntMatrix) -> Option<(Vec<usize>, Vec<i8>)> {
    let n = a.rows();
    let mut p = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for i in 0..n {
        let mut hit = None;
        for j in 0..n {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            if hit.is_some() {
                return None;
            }
            let sign = if x.is_one() {
                1
            } else if *x == Int::from(-1) {
                -1
            } else {
                return None;
            };
            hit = Some((j, sign));
        }
        let (j, sign) = hit?;
        if used[j] {
            return None;
        }
        used[j] = true;
        p.push(j);
        s.push(sign);
    }
    Some((p, s))
}

pub(crate) fn as_permutation(a: &IntMatrix) -> Option<Vec<usize>> {
    let (p, s) = as_signed_permutation(a)?;
    s.iter().all(|&x| x == 1).then_some(p)
}

/// Evidence that a lattice is a permutation lattice: the rows of `basis`
/// (old coordinates) form a basis permuted by every generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationWitness {
    pub basis: IntMatrix,
    /// For generator `k`, basis vector `i` goes to basis vector `generator_permutations[k][i]`.
    pub generator_permutations: Vec<Vec<usize>>,
}

impl PermutationWitness {
    /// Permutation of the basis induced by an arbitrary group element.
    pub fn element_permutation(&self, group: &FinGroup, g: usize) -> Vec<usize> {
        let n = self.basis.rows();
        let mut path = Vec::new();
        let mut x = g;
        while let Some((p, gi)) = group.tree_edge(x) {
            path.push(gi);
            x = p;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for gi in path.into_iter().rev() {
            let step = &self.generator_permutations[gi];
            perm = perm.iter().map(|&i| step[i]).collect();
        }
        perm
    }
}

/// The current basis is permuted up to sign by every generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPermutationWitness {
    pub generator_permutations: Vec<Vec<usize>>,
    pub generator_signs: Vec<Vec<i8>>,
}

/// A group-equivariant homomorphism `x ↦ x·matrix` from `source` to `target`.
#[derive(Clone, Debug)]
pub struct EquivariantMap {
    pub source: GLattice,
    pub target: GLattice,
    pub matrix: IntMatrix,
}

impl EquivariantMap {
    /// Checks `M·ρ_t(g) = ρ_s(g)·M` on generators.
    pub fn new(source: GLattice, target: GLattice, matrix: IntMatrix) -> Result<EquivariantMap> {
        if !same_group(&source.group, &target.group) {
            return Err(Error::GroupMismatch);
        }
        if matrix.rows() != source.rank || matrix.cols() != target.rank {
            return Err(Error::DimensionMismatch(format!(
                "map of shape {}x{} between ranks {} and {}",
                matrix.rows(),
                matrix.cols(),
                source.rank,
                target.rank
            )));
        }
        for (k, (s, t)) in source.gen_action.iter().zip(&target.gen_action).enumerate() {
            if matrix.mul(t) != s.mul(&matrix) {
                return Err(Error::NotEquivariant(format!("fails on generator {k}")));
            }
        }
        Ok(EquivariantMap {
            source,
            target,
            matrix,
        })
    }

    /// Basis (source coordinates) of the kernel.
    pub fn kernel_rows(&self) -> IntMatrix {
        intmat::kernel_basis(&self.matrix)
    }

    /// The kernel with its induced action; saturated by construction.
    pub fn kernel_lattice(&self) -> Result<GLattice> {
        self.source.invariant_sublattice(&self.kernel_rows())
    }

    /// Canonical basis (target coordinates) of the image.
    pub fn image_rows(&self) -> IntMatrix {
        intmat::hnf_rows(&self.matrix)
    }

    pub fn image_lattice(&self) -> Result<GLattice> {
        self.target.invariant_sublattice(&self.image_rows())
    }

    /// Structure of `target / image` and triviality of the action on it.
    pub fn quotient_invariants(&self) -> Result<QuotientInfo> {
        self.target.quotient_by(&self.image_rows())
    }

    pub fn is_injective(&self) -> bool {
        intmat::rank(&self.matrix) == self.source.rank
    }

    pub fn is_surjective(&self) -> bool {
        let q = intmat::row_cokernel_invariants(&self.matrix);
        q.is_trivial()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn sign_group() -> Arc<FinGroup> {
        Arc::new(close_group(&[m(&[vec![-1]])], 10).unwrap())
    }

    fn klein() -> Arc<FinGroup> {
        Arc::new(
            close_group(
                &[m(&[vec![-1, 0], vec![0, 1]]), m(&[vec![1, 0], vec![0, -1]])],
                10,
            )
            .unwrap(),
        )
    }

    #[test]
    fn regular_and_cosets() {
        let g = klein();
        let reg = GLattice::regular(g.clone());
        assert_eq!(reg.rank(), 4);
        assert!(reg.is_homomorphism());
        assert!(reg
            .verify_permutation_basis(&IntMatrix::identity(4))
            .is_ok());
        let h = g.subgroup_elements(&[g.generators()[0]]);
        let c = GLattice::cosets(g, &h);
        assert_eq!(c.rank(), 2);
        assert!(c.is_homomorphism());
    }

    #[test]
    fn sign_lattice_is_not_permutation() {
        let l = GLattice::natural(sign_group());
        assert_eq!(
            l.verify_permutation_basis(&IntMatrix::identity(1)),
            Err(Error::NotPermutationInThisBasis)
        );
        assert!(l.is_sign_permutation().is_some());
        assert_eq!(l.dual(), l);
    }

    #[test]
    fn dual_twice() {
        let r = m(&[vec![0, -1], vec![1, -1]]);
        let g = Arc::new(close_group(&[r], 10).unwrap());
        assert_eq!(g.order(), 3);
        let l = GLattice::natural(g);
        assert!(l.is_sign_permutation().is_none());
        assert_eq!(l.dual().dual(), l);
        assert!(l.dual().is_homomorphism());
    }

    #[test]
    fn product_sum() {
        let a = GLattice::natural(sign_group());
        let s = a.direct_sum(&a, SumMode::ProductGroup).unwrap();
        assert_eq!(s.rank(), 2);
        assert_eq!(s.group().order(), 4);
        assert!(a.direct_sum(&s, SumMode::SameGroup).is_err());
    }

    #[test]
    fn invariant_sublattice_and_quotient() {
        let g = klein();
        let l = GLattice::natural(g);
        let sub = l
            .invariant_sublattice(&m(&[vec![2, 0], vec![0, 1]]))
            .unwrap();
        assert!(sub.is_homomorphism());
        assert!(matches!(
            l.invariant_sublattice(&m(&[vec![1, 1]])),
            Err(Error::NotInvariant(_))
        ));
        let q = l.quotient_by(&m(&[vec![2, 0], vec![0, 1]])).unwrap();
        assert_eq!(q.invariants.factors_i64(), vec![2]);
        assert!(q.trivial_action);
    }

    #[test]
    fn equivariant_maps() {
        let g = sign_group();
        let reg = GLattice::regular(g.clone());
        let triv = GLattice::trivial(g.clone(), 1);
        // augmentation Z[C2] -> Z
        let aug = EquivariantMap::new(reg.clone(), triv.clone(), m(&[vec![1], vec![1]])).unwrap();
        assert!(aug.is_surjective());
        let k = aug.kernel_lattice().unwrap();
        assert_eq!(k.rank(), 1);
        assert_eq!(k.generator_actions()[0], m(&[vec![-1]]));
        assert!(EquivariantMap::new(reg.clone(), triv, m(&[vec![1], vec![0]])).is_err());
        let id = EquivariantMap::new(reg.clone(), reg, IntMatrix::identity(2)).unwrap();
        assert_eq!(id.kernel_rows().rows(), 0);
    }

    #[test]
    fn restriction() {
        let g = klein();
        let l = GLattice::regular(g.clone());
        let r = l.restrict(&[]).unwrap();
        assert!(r.is_trivial_action());
        let r = l.restrict(&[g.generators()[0]]).unwrap();
        assert_eq!(r.group().order(), 2);
        assert!(r.is_homomorphism());
    }
}

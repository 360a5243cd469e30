//! Quasi-permutation resolutions, built explicitly and then verified.
//!
//! A resolution of `L` is either *right*, `0 → L → P → P′ → 0`, or *left*,
//! `0 → P′ → P → L → 0`, with `P` and `P′` permutation lattices. Nothing
//! constructed here is returned without passing [`PositiveResolution::check`].

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glattice::{
    close_group, permutation_matrix, EquivariantMap, GLattice, PermutationWitness,
};
use crate::intmat::{self, int, Int, IntMatrix};
use crate::rootdata::{Family, IntermediateLattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `0 → L → P → P′ → 0`; `iota : L → P`, `pi : P → P′`.
    Right,
    /// `0 → P′ → P → L → 0`; `iota : P′ → P`, `pi : P → L`.
    Left,
}

#[derive(Clone, Debug)]
pub struct PositiveResolution {
    pub shape: Shape,
    pub lattice: GLattice,
    pub p: GLattice,
    pub p_prime: GLattice,
    pub iota: IntMatrix,
    pub pi: IntMatrix,
    pub p_witness: PermutationWitness,
    pub p_prime_witness: PermutationWitness,
}

fn witness_ok(l: &GLattice, w: &PermutationWitness) -> bool {
    match l.verify_permutation_basis(&w.basis) {
        Ok(found) => found.generator_permutations == w.generator_permutations,
        Err(_) => false,
    }
}

/// `image(a) = kernel(b)` with `a` injective and `b` surjective, where
/// `a : X → Y` and `b : Y → Z` are given as row maps.
fn short_exact(a: &IntMatrix, b: &IntMatrix, y_rank: usize) -> std::result::Result<(), String> {
    if a.cols() != y_rank || b.rows() != y_rank {
        return Err("shapes do not compose".into());
    }
    if intmat::rank(a) != a.rows() {
        return Err("first map is not injective".into());
    }
    if !a.mul(b).is_zero() {
        return Err("composite is not zero".into());
    }
    if !intmat::row_cokernel_invariants(b).is_trivial() {
        return Err("second map is not surjective".into());
    }
    let img = intmat::hnf_rows(a);
    let ker = intmat::kernel_basis(b);
    if img != intmat::hnf_rows(&ker) {
        return Err("image differs from kernel (image not saturated?)".into());
    }
    Ok(())
}

impl PositiveResolution {
    /// Full verification; the error names the first failing condition.
    pub fn check(&self) -> std::result::Result<(), String> {
        let g = self.lattice.group();
        if !crate::glattice::same_group(g, self.p.group())
            || !crate::glattice::same_group(g, self.p_prime.group())
        {
            return Err("modules over different groups".into());
        }
        if !witness_ok(&self.p, &self.p_witness) {
            return Err("P is not permuted by its witness basis".into());
        }
        if !witness_ok(&self.p_prime, &self.p_prime_witness) {
            return Err("P′ is not permuted by its witness basis".into());
        }
        let (first_src, first_dst, second_dst) = match self.shape {
            Shape::Right => (&self.lattice, &self.p, &self.p_prime),
            Shape::Left => (&self.p_prime, &self.p, &self.lattice),
        };
        EquivariantMap::new(first_src.clone(), first_dst.clone(), self.iota.clone())
            .map_err(|e| format!("ι: {e}"))?;
        EquivariantMap::new(self.p.clone(), second_dst.clone(), self.pi.clone())
            .map_err(|e| format!("π: {e}"))?;
        short_exact(&self.iota, &self.pi, self.p.rank())
    }

    pub fn verify(&self) -> bool {
        self.check().is_ok()
    }

    fn checked(self) -> Result<PositiveResolution> {
        self.check().map_err(Error::ConstructionFailed)?;
        Ok(self)
    }

    /// Dual sequence: a left resolution of `L` becomes a right resolution
    /// of `L^∨` and vice versa.
    pub fn dual(&self) -> Result<PositiveResolution> {
        let dual_witness = |w: &PermutationWitness| -> PermutationWitness {
            let inv = w
                .basis
                .inverse_unimodular()
                .expect("witness basis is unimodular");
            PermutationWitness {
                basis: inv.transpose(),
                generator_permutations: w.generator_permutations.clone(),
            }
        };
        PositiveResolution {
            shape: match self.shape {
                Shape::Right => Shape::Left,
                Shape::Left => Shape::Right,
            },
            lattice: self.lattice.dual(),
            p: self.p.dual(),
            p_prime: self.p_prime.dual(),
            iota: self.pi.transpose(),
            pi: self.iota.transpose(),
            p_witness: dual_witness(&self.p_witness),
            p_prime_witness: dual_witness(&self.p_prime_witness),
        }
        .checked()
    }

    /// The same resolution for `L` written in another basis: `basis` rows
    /// are the basis of `self.lattice` in the coordinates of `target`.
    fn transport(self, target: &GLattice, basis: &IntMatrix) -> Result<PositiveResolution> {
        let inv = basis
            .inverse_unimodular()
            .ok_or_else(|| Error::NotUnimodular(format!("{basis:?}")))?;
        let (iota, pi) = match self.shape {
            Shape::Right => (inv.mul(&self.iota), self.pi),
            Shape::Left => (self.iota, self.pi.mul(basis)),
        };
        PositiveResolution {
            lattice: target.clone(),
            iota,
            pi,
            ..self
        }
        .checked()
    }
}

fn identity_witness(l: &GLattice) -> Result<PermutationWitness> {
    l.verify_permutation_basis(&IntMatrix::identity(l.rank()))
}

/// `0 → L → L → 0 → 0` for a lattice already permuted by its basis.
pub fn permutation_resolution(l: &GLattice) -> Result<PositiveResolution> {
    let zero = GLattice::trivial(l.group().clone(), 0);
    PositiveResolution {
        shape: Shape::Right,
        lattice: l.clone(),
        p: l.clone(),
        p_prime: zero.clone(),
        iota: IntMatrix::identity(l.rank()),
        pi: IntMatrix::zeros(l.rank(), 0),
        p_witness: identity_witness(l)?,
        p_prime_witness: identity_witness(&zero)?,
    }
    .checked()
}

/// `0 → L → Z[±b_i] → Z[{±b_i}] → 0` for a lattice whose basis is permuted
/// up to sign: `ι(b) = [b] − [−b]`, `π([±b]) = [line of b]`.
pub fn sign_perm_resolution(l: &GLattice) -> Result<PositiveResolution> {
    let w = l
        .is_sign_permutation()
        .ok_or_else(|| Error::InvalidInput("basis is not permuted up to sign".into()))?;
    let r = l.rank();
    let group = l.group().clone();
    // Index 2i is +b_i, 2i+1 is −b_i.
    let p_images: Vec<IntMatrix> = w
        .generator_permutations
        .iter()
        .zip(&w.generator_signs)
        .map(|(perm, signs)| {
            let mut q = vec![0; 2 * r];
            for i in 0..r {
                let flip = usize::from(signs[i] < 0);
                q[2 * i] = 2 * perm[i] + flip;
                q[2 * i + 1] = 2 * perm[i] + 1 - flip;
            }
            permutation_matrix(&q)
        })
        .collect();
    let line_images: Vec<IntMatrix> = w
        .generator_permutations
        .iter()
        .map(|p| permutation_matrix(p))
        .collect();
    let p = GLattice::from_generator_images(group.clone(), p_images)?;
    let p_prime = GLattice::from_generator_images(group, line_images)?;
    let mut iota = IntMatrix::zeros(r, 2 * r);
    let mut pi = IntMatrix::zeros(2 * r, r);
    for i in 0..r {
        iota.set(i, 2 * i, Int::one());
        iota.set(i, 2 * i + 1, -Int::one());
        pi.set(2 * i, i, Int::one());
        pi.set(2 * i + 1, i, Int::one());
    }
    PositiveResolution {
        shape: Shape::Right,
        lattice: l.clone(),
        p_witness: identity_witness(&p)?,
        p_prime_witness: identity_witness(&p_prime)?,
        p,
        p_prime,
        iota,
        pi,
    }
    .checked()
}

/// `0 → Q(A_m) → Z^{m+1} → Z → 0` (inclusion and coordinate sum).
fn augmentation_resolution(lat: &IntermediateLattice) -> Result<PositiveResolution> {
    let f = &lat.factors[0];
    let l = lat.lattice()?;
    let group = l.group().clone();
    let p = GLattice::natural(group.clone());
    let p_prime = GLattice::trivial(group, 1);
    let iota = lat.basis.div_exact(&int(f.scale)).ok_or_else(|| {
        Error::ConstructionFailed("root lattice not in scaled coordinates".into())
    })?;
    let pi = IntMatrix::from_rows(vec![vec![Int::one()]; f.ambient_dim], 1);
    PositiveResolution {
        shape: Shape::Right,
        lattice: l,
        p_witness: identity_witness(&p)?,
        p_prime_witness: identity_witness(&p_prime)?,
        p,
        p_prime,
        iota,
        pi,
    }
    .checked()
}

/// For odd `n ≥ 3`: the left resolution `0 → M′ → M → P(A_{n−1}) → 0` under
/// `S_n × S_2` (the `S_2` acting by `−1`), and its dual, a right resolution
/// of `P^∨ ≅ Q(A_{n−1})`.
pub fn pgl_odd_outer_resolution(n: usize) -> Result<(PositiveResolution, PositiveResolution)> {
    if n % 2 == 0 {
        return Err(Error::EvenN(n));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} must be at least 3"
        )));
    }
    let m = 2 * n + 1;
    // M basis: s_0..s_{n−1}, t_0..t_{n−1}, u.
    let mut gens_m = Vec::new();
    let mut gens_p = Vec::new();
    for i in 0..n - 1 {
        let mut q: Vec<usize> = (0..m).collect();
        q.swap(i, i + 1);
        q.swap(n + i, n + i + 1);
        gens_m.push(permutation_matrix(&q));
        // P basis e_0..e_{n−2}, e_{n−1} = −Σ.
        let mut a = IntMatrix::zeros(n - 1, n - 1);
        for k in 0..n - 1 {
            let target = if k == i {
                i + 1
            } else if k == i + 1 {
                i
            } else {
                k
            };
            if target == n - 1 {
                for c in 0..n - 1 {
                    a.set(k, c, -Int::one());
                }
            } else {
                a.set(k, target, Int::one());
            }
        }
        gens_p.push(a);
    }
    let mut q: Vec<usize> = (0..m).collect();
    for i in 0..n {
        q.swap(i, n + i);
    }
    gens_m.push(permutation_matrix(&q));
    gens_p.push(IntMatrix::scalar(n - 1, -1));

    let cap = 2 * (1..=n).product::<usize>() + 1;
    let group = Arc::new(close_group(&gens_m, cap)?);
    let mm = GLattice::from_generator_images(group.clone(), gens_m)?;
    let p = GLattice::from_generator_images(group, gens_p)?;

    let e = |i: usize| -> Vec<Int> {
        if i + 1 == n {
            vec![-Int::one(); n - 1]
        } else {
            let mut v = vec![Int::zero(); n - 1];
            v[i] = Int::one();
            v
        }
    };
    let mut pi_rows = Vec::with_capacity(m);
    for i in 0..n {
        pi_rows.push(e(i));
    }
    for i in 0..n {
        pi_rows.push(e(i).into_iter().map(|x| -x).collect());
    }
    pi_rows.push(vec![Int::zero(); n - 1]);
    let pi = IntMatrix::from_rows(pi_rows, n - 1);
    let pi_map = EquivariantMap::new(mm.clone(), p.clone(), pi.clone())?;
    let ker = pi_map.kernel_rows();
    let m_prime = mm.invariant_sublattice(&ker)?;

    // ρ̃_i = s_i + t_i + u, σ̃ = Σs + ((n−1)/2)u, τ̃ = Σt + ((n−1)/2)u.
    let half = int(((n - 1) / 2) as i64);
    let mut nice = Vec::with_capacity(n + 2);
    for i in 0..n {
        let mut v = vec![Int::zero(); m];
        v[i] = Int::one();
        v[n + i] = Int::one();
        v[2 * n] = Int::one();
        nice.push(v);
    }
    for off in [0, n] {
        let mut v = vec![Int::zero(); m];
        for i in 0..n {
            v[off + i] = Int::one();
        }
        v[2 * n] = half.clone();
        nice.push(v);
    }
    let nice = IntMatrix::from_rows(nice, m);
    let nice_coords = intmat::solve_rows(&ker, &nice)
        .ok_or_else(|| Error::ConstructionFailed("ρ̃, σ̃, τ̃ not in M′".into()))?;
    let left = PositiveResolution {
        shape: Shape::Left,
        lattice: p,
        p_witness: identity_witness(&mm)?,
        p_prime_witness: m_prime.verify_permutation_basis(&nice_coords)?,
        p: mm,
        p_prime: m_prime,
        iota: ker,
        pi,
    }
    .checked()?;
    let right = left.dual()?;
    Ok((left, right))
}

/// Searches unimodular `T` with entries in `[−bound, bound]` such that
/// `T·ρ(g)·T⁻¹` satisfies `accept` for every generator.
fn conjugating_basis(
    l: &GLattice,
    bound: i64,
    accept: impl Fn(&IntMatrix) -> bool,
) -> Option<IntMatrix> {
    let range: Vec<i64> = (-bound..=bound).collect();
    for &a in &range {
        for &b in &range {
            for &c in &range {
                for &d in &range {
                    let det = a * d - b * c;
                    if det.abs() != 1 {
                        continue;
                    }
                    let t = IntMatrix::from_i64(&[vec![a, b], vec![c, d]]);
                    let inv = t.inverse_unimodular().expect("det ±1");
                    if l.generator_actions()
                        .iter()
                        .all(|g| accept(&t.mul(g).mul(&inv)))
                    {
                        return Some(t);
                    }
                }
            }
        }
    }
    None
}

const CONJUGATION_BOUND: i64 = 3;

/// Resolution of a lattice of rank 1 or 2 via a maximal finite subgroup of
/// `GL_r(Z)`: signed permutations (`{±1}`, `D₈`) or the hexagonal `D₁₂`.
pub fn rank_le2_resolution(l: &GLattice) -> Result<PositiveResolution> {
    match l.rank() {
        0 | 1 => {
            if l.is_trivial_action() {
                permutation_resolution(l)
            } else {
                sign_perm_resolution(l)
            }
        }
        2 => {
            if l.is_trivial_action() {
                return permutation_resolution(l);
            }
            let signed = |m: &IntMatrix| crate::glattice::as_signed_permutation(m).is_some();
            if let Some(t) = conjugating_basis(l, CONJUGATION_BOUND, signed) {
                let moved = l.change_basis(&t)?;
                return sign_perm_resolution(&moved)?.transport(l, &t);
            }
            let (_, hex) = pgl_odd_outer_resolution(3)?;
            let hex_actions = hex.lattice.actions().to_vec();
            let in_hex = |m: &IntMatrix| hex_actions.contains(m);
            let t = conjugating_basis(l, CONJUGATION_BOUND, in_hex).ok_or_else(|| {
                Error::ConstructionFailed(
                    "no conjugation into D8 or D12 within the search bound".into(),
                )
            })?;
            let moved = l.change_basis(&t)?;
            pull_back(&hex, &moved)?.transport(l, &t)
        }
        r => Err(Error::InvalidRank(format!("rank {r} > 2"))),
    }
}

/// Restricts a resolution over a group `A` along the homomorphism given by
/// matching the action of `target`'s generators with elements of `A`.
fn pull_back(res: &PositiveResolution, target: &GLattice) -> Result<PositiveResolution> {
    let acts = res.lattice.actions();
    let mut elems = Vec::new();
    for g in target.generator_actions() {
        let a = acts.iter().position(|m| m == g).ok_or_else(|| {
            Error::ConstructionFailed("generator action outside the model group".into())
        })?;
        elems.push(a);
    }
    let group = target.group().clone();
    let along = |m: &GLattice| -> Result<GLattice> {
        GLattice::from_generator_images(
            group.clone(),
            elems.iter().map(|&a| m.action(a).clone()).collect(),
        )
    };
    let p = along(&res.p)?;
    let p_prime = along(&res.p_prime)?;
    let witness = |m: &GLattice, w: &PermutationWitness| m.verify_permutation_basis(&w.basis);
    PositiveResolution {
        shape: res.shape,
        lattice: target.clone(),
        p_witness: witness(&p, &res.p_witness)?,
        p_prime_witness: witness(&p_prime, &res.p_prime_witness)?,
        p,
        p_prime,
        iota: res.iota.clone(),
        pi: res.pi.clone(),
    }
    .checked()
}

/// Looks for a basis permuted up to sign by the group: a single orbit of
/// `2·rank` short vectors closed under negation whose halves form a basis.
pub fn signed_basis_search(l: &GLattice) -> Option<IntMatrix> {
    let r = l.rank();
    if r == 0 {
        return Some(IntMatrix::zeros(0, 0));
    }
    let bound: i64 = if r <= 4 { 2 } else { 1 };
    let acts = l.actions();
    let total = (2 * bound + 1).checked_pow(r as u32)?;
    if total > 200_000 {
        return None;
    }
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    for code in 0..total {
        let mut c = code;
        let v: Vec<i64> = (0..r)
            .map(|_| {
                let x = c % (2 * bound + 1);
                c /= 2 * bound + 1;
                x - bound
            })
            .collect();
        if v.iter().all(|&x| x == 0) || seen.contains(&v) {
            continue;
        }
        let vi = intmat::ints(&v);
        let mut orbit: BTreeSet<Vec<Int>> = BTreeSet::new();
        for a in acts {
            orbit.insert(a.apply_row(&vi));
            if orbit.len() > 2 * r {
                break;
            }
        }
        for w in &orbit {
            if let Some(w64) = w
                .iter()
                .map(num_traits::ToPrimitive::to_i64)
                .collect::<Option<Vec<_>>>()
            {
                seen.insert(w64);
            }
        }
        if orbit.len() != 2 * r {
            continue;
        }
        let neg_closed = orbit
            .iter()
            .all(|w| orbit.contains(&w.iter().map(|x| -x).collect::<Vec<_>>()));
        if !neg_closed {
            continue;
        }
        let mut rows: Vec<Vec<Int>> = Vec::new();
        for w in &orbit {
            let neg: Vec<Int> = w.iter().map(|x| -x).collect();
            if !rows.contains(&neg) {
                rows.push(w.clone());
            }
        }
        let b = IntMatrix::from_rows(rows, r);
        if b.is_unimodular() {
            return Some(b);
        }
    }
    None
}

/// `0 → L → Z[O] → Z → 0` where `O` is an orbit of `rank + 1` functionals
/// on `L` summing to zero, `ι(x) = (f(x))_{f∈O}` and `π` the coordinate sum.
pub fn functional_orbit_resolution(l: &GLattice) -> Result<PositiveResolution> {
    let r = l.rank();
    let dual = l.dual();
    let acts = dual.actions();
    let bound = 2i64;
    let total = (2 * bound + 1).pow(r as u32);
    for code in 0..total {
        let mut c = code;
        let f: Vec<Int> = (0..r)
            .map(|_| {
                let x = c % (2 * bound + 1);
                c /= 2 * bound + 1;
                int(x - bound)
            })
            .collect();
        if f.iter().all(Zero::is_zero) {
            continue;
        }
        let mut orbit: Vec<Vec<Int>> = Vec::new();
        for a in acts {
            let g = a.apply_row(&f);
            if !orbit.contains(&g) {
                orbit.push(g);
                if orbit.len() > r + 1 {
                    break;
                }
            }
        }
        if orbit.len() != r + 1 {
            continue;
        }
        if (0..r).any(|k| !orbit.iter().map(|g| &g[k]).sum::<Int>().is_zero()) {
            continue;
        }
        orbit.sort();
        let iota = IntMatrix::from_rows(orbit.clone(), r).transpose();
        let mut images = Vec::new();
        for g in l.generator_actions() {
            let gt = g.transpose();
            let mut q = vec![0usize; r + 1];
            for (i, fi) in orbit.iter().enumerate() {
                let moved = gt.apply_row(fi);
                let j = orbit
                    .iter()
                    .position(|x| *x == moved)
                    .expect("orbit is stable");
                q[j] = i;
            }
            images.push(permutation_matrix(&q));
        }
        let Ok(p) = GLattice::from_generator_images(l.group().clone(), images) else {
            continue;
        };
        let p_prime = GLattice::trivial(l.group().clone(), 1);
        let res = PositiveResolution {
            shape: Shape::Right,
            lattice: l.clone(),
            p_witness: identity_witness(&p)?,
            p_prime_witness: identity_witness(&p_prime)?,
            p,
            p_prime,
            iota,
            pi: IntMatrix::from_rows(vec![vec![Int::one()]; r + 1], 1),
        };
        if res.verify() {
            return Ok(res);
        }
    }
    Err(Error::ConstructionFailed(
        "no functional orbit gives an augmentation sequence".into(),
    ))
}

/// Which entry of the positive list a simple block (or an `SO₄` pair) is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    /// Any lattice of rank 1 or 2.
    RankAtMost2,
    /// `Q(A_n)`.
    RootA,
    /// `Q(B_n)`, `P(C_n)`, `X(SO_{2n})` (and its triality images for `D₄`,
    /// and `X(SO₆)` seen as an `A₃` lattice).
    SignedPermutation,
}

/// Residues of `F` hit by the lattice, for a single-factor lattice.
fn residue_subgroup(lat: &IntermediateLattice) -> Option<BTreeSet<i64>> {
    let f = &lat.factors[0];
    let mut s: BTreeSet<i64> = BTreeSet::from([0]);
    for i in 0..lat.basis.rows() {
        let r = f.residue_of(lat.basis.row(i))?;
        s.insert(r);
    }
    loop {
        let mut grown = s.clone();
        for &a in &s {
            for &b in &s {
                grown.insert(f.dynkin.add_residues(a, b));
            }
        }
        if grown == s {
            return Some(s);
        }
        s = grown;
    }
}

/// Classifies a block against the positive list, `None` if it is not on it.
pub fn positive_list_entry(lat: &IntermediateLattice) -> Option<BlockKind> {
    if lat.rank() <= 2 {
        return Some(BlockKind::RankAtMost2);
    }
    if lat.factors.len() != 1 {
        return None;
    }
    let t = lat.factors[0].dynkin;
    let s = residue_subgroup(lat)?;
    let order = s.len();
    let full = t.fundamental_order();
    match t.family {
        Family::A if order == 1 => Some(BlockKind::RootA),
        Family::D if t.n == 3 && order == 1 => Some(BlockKind::RootA),
        Family::A if t.n == 3 && order == 2 => Some(BlockKind::SignedPermutation),
        Family::B if order == 1 => Some(BlockKind::SignedPermutation),
        Family::C if order == full => Some(BlockKind::SignedPermutation),
        Family::D if order == 2 && (s.contains(&2) || t.n == 4) => {
            Some(BlockKind::SignedPermutation)
        }
        Family::G2 => Some(BlockKind::RankAtMost2),
        _ => None,
    }
}

/// Verified resolution of a block on the positive list.
pub fn block_resolution(lat: &IntermediateLattice) -> Result<PositiveResolution> {
    let kind = positive_list_entry(lat).ok_or_else(|| {
        Error::NotOnPositiveList(format!("{:?} with basis {:?}", lat.types(), lat.basis))
    })?;
    let l = lat.lattice()?;
    match kind {
        BlockKind::RankAtMost2 => rank_le2_resolution(&l),
        BlockKind::RootA if lat.factors[0].dynkin.family == Family::A => {
            augmentation_resolution(lat)
        }
        BlockKind::RootA => functional_orbit_resolution(&l),
        BlockKind::SignedPermutation => {
            if l.is_sign_permutation().is_some() {
                return sign_perm_resolution(&l);
            }
            let b = signed_basis_search(&l).ok_or_else(|| {
                Error::ConstructionFailed("no signed permutation basis found".into())
            })?;
            sign_perm_resolution(&l.change_basis(&b)?)?.transport(&l, &b)
        }
    }
}

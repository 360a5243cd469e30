//! The one-vector family `L = ⟨L′, v⟩` over factors of type `B`/`D` and
//! `A_{2n−1}`, with the Klein four-group analysis showing `L ⊇ L₀ ≅ J_Γ` as
//! a direct summand of a sublattice equivalent to `L`.
//!
//! Coordinates are doubled so that `v` is integral: the ambient space is
//! `Z^S` (one coordinate per `B`/`D` basis vector) followed by `Z^{2n_ι}` per
//! `A_{2n_ι−1}` factor, and every vector is stored as twice its true value.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cohomology;
use crate::error::{Error, Result};
use crate::glattice::{close_group, EquivariantMap, FinGroup, GLattice};
use crate::intmat::{self, int, AbelianInvariants, Int, IntMatrix};
use crate::rootdata::{build_factor, DynkinType, Family};

use super::j_gamma;

/// One factor of type `B_l` (`l ≥ 1`) or `D_l` (`l ≥ 2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BdFactor {
    pub family: Family,
    pub l: usize,
}

impl BdFactor {
    pub fn b(l: usize) -> BdFactor {
        BdFactor {
            family: Family::B,
            l,
        }
    }
    pub fn d(l: usize) -> BdFactor {
        BdFactor {
            family: Family::D,
            l,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section2Spec {
    pub bd_factors: Vec<BdFactor>,
    /// `n_ι` for each factor of type `A_{2n_ι−1}`.
    pub a_factors: Vec<usize>,
}

impl Section2Spec {
    pub fn new(bd_factors: Vec<BdFactor>, a_factors: Vec<usize>) -> Result<Section2Spec> {
        let s = Section2Spec {
            bd_factors,
            a_factors,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bd_factors.is_empty() {
            return Err(Error::InvalidSpec("need at least one B or D factor".into()));
        }
        for f in &self.bd_factors {
            match f.family {
                Family::B if f.l >= 1 => {}
                Family::D if f.l >= 2 => {}
                _ => {
                    return Err(Error::InvalidSpec(format!(
                        "bad factor {}{}",
                        f.family.name(),
                        f.l
                    )))
                }
            }
        }
        if let Some(n) = self.a_factors.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidSpec(format!("A-factor needs n ≥ 2, got {n}")));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.bd_factors.len()
    }

    pub fn mu(&self) -> usize {
        self.a_factors.len()
    }

    /// `|S| = Σ l_i`.
    pub fn s_count(&self) -> usize {
        self.bd_factors.iter().map(|f| f.l).sum()
    }

    pub fn ambient_dim(&self) -> usize {
        self.s_count() + self.a_factors.iter().map(|n| 2 * n).sum::<usize>()
    }

    /// Sum of the ranks of all factors.
    pub fn total_rank(&self) -> usize {
        self.s_count() + self.a_factors.iter().map(|n| 2 * n - 1).sum::<usize>()
    }

    /// Hypotheses under which `L` is not quasi-invertible.
    pub fn check_hypotheses(&self) -> Result<()> {
        self.validate()?;
        if self.m() + self.mu() < 2 {
            return Err(Error::HypothesesViolated("need m + μ ≥ 2".into()));
        }
        if self.mu() == 0
            && self
                .bd_factors
                .iter()
                .all(|f| (f.family == Family::B && f.l == 1) || (f.family == Family::D && f.l == 2))
        {
            return Err(Error::HypothesesViolated(
                "μ = 0 and every factor is B1 or D2".into(),
            ));
        }
        Ok(())
    }

    /// The types of all factors, `B`/`D` first.
    pub fn types(&self) -> Vec<DynkinType> {
        let mut t: Vec<DynkinType> = self
            .bd_factors
            .iter()
            .map(|f| DynkinType {
                family: f.family,
                n: f.l,
            })
            .collect();
        t.extend(self.a_factors.iter().map(|&n| DynkinType::a(2 * n - 1)));
        t
    }

    fn s_offset(&self, i: usize) -> usize {
        self.bd_factors[..i].iter().map(|f| f.l).sum()
    }

    fn a_offset(&self, iota: usize) -> usize {
        self.s_count() + self.a_factors[..iota].iter().map(|n| 2 * n).sum::<usize>()
    }

    /// Every spec of total rank at most `max_rank`, factors taken as a
    /// multiset (`B_l` before `D_l` before `A`, each sorted by size). Specs
    /// violating the non-quasi-invertibility hypotheses are included.
    pub fn enumerate(max_rank: usize) -> Vec<Section2Spec> {
        #[derive(Clone, Copy)]
        enum Item {
            Bd(BdFactor),
            A(usize),
        }
        let mut items = Vec::new();
        items.extend((1..=max_rank).map(|l| (Item::Bd(BdFactor::b(l)), l)));
        items.extend((2..=max_rank).map(|l| (Item::Bd(BdFactor::d(l)), l)));
        items.extend(
            (2..)
                .take_while(|n| 2 * n - 1 <= max_rank)
                .map(|n| (Item::A(n), 2 * n - 1)),
        );
        fn go(
            items: &[(Item, usize)],
            start: usize,
            budget: usize,
            acc: &mut Vec<Item>,
            out: &mut Vec<Section2Spec>,
        ) {
            let bd: Vec<BdFactor> = acc
                .iter()
                .filter_map(|i| if let Item::Bd(f) = i { Some(*f) } else { None })
                .collect();
            if !bd.is_empty() {
                let a = acc
                    .iter()
                    .filter_map(|i| if let Item::A(n) = i { Some(*n) } else { None })
                    .collect();
                out.push(Section2Spec {
                    bd_factors: bd,
                    a_factors: a,
                });
            }
            for k in start..items.len() {
                if items[k].1 <= budget {
                    acc.push(items[k].0);
                    go(items, k, budget - items[k].1, acc, out);
                    acc.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(&items, 0, max_rank, &mut Vec::new(), &mut out);
        out
    }
}

/// Splitting of each `S_i` into three parts; indices are global positions
/// in `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition3 {
    pub parts: Vec<[Vec<usize>; 3]>,
    pub unions: [Vec<usize>; 3],
}

impl Partition3 {
    fn from_parts(parts: Vec<[Vec<usize>; 3]>) -> Partition3 {
        let mut unions: [Vec<usize>; 3] = Default::default();
        for p in &parts {
            for k in 0..3 {
                unions[k].extend(&p[k]);
            }
        }
        Partition3 { parts, unions }
    }

    /// The parity condition on `D` factors.
    pub fn satisfies_parity(&self, spec: &Section2Spec) -> bool {
        spec.bd_factors
            .iter()
            .zip(&self.parts)
            .all(|(f, p)| f.family != Family::D || p.iter().all(|part| part.len() % 2 == f.l % 2))
    }
}

/// Deterministic partition: odd `D` factors split `1+1+(l−2)`; then an
/// even `D_{l≥4}` split `2+(l−2)`; then a `B_{l≥2}` split `1+(l−1)`.
pub fn partition(spec: &Section2Spec) -> Result<Partition3> {
    spec.check_hypotheses()?;
    let ranges: Vec<Vec<usize>> = (0..spec.m())
        .map(|i| {
            let o = spec.s_offset(i);
            (o..o + spec.bd_factors[i].l).collect()
        })
        .collect();
    let odd_d = |f: &BdFactor| f.family == Family::D && f.l % 2 == 1;
    let split = |r: &Vec<usize>, a: usize, b: usize| -> [Vec<usize>; 3] {
        [r[..a].to_vec(), r[a..a + b].to_vec(), r[a + b..].to_vec()]
    };
    let whole = |r: &Vec<usize>, k: usize| -> [Vec<usize>; 3] {
        let mut p: [Vec<usize>; 3] = Default::default();
        p[k] = r.clone();
        p
    };
    let parts: Vec<[Vec<usize>; 3]> = if spec.mu() >= 1 {
        spec.bd_factors
            .iter()
            .zip(&ranges)
            .map(|(f, r)| {
                if odd_d(f) {
                    split(r, 1, 1)
                } else {
                    whole(r, 0)
                }
            })
            .collect()
    } else if spec.bd_factors.iter().any(odd_d) {
        spec.bd_factors
            .iter()
            .zip(&ranges)
            .map(|(f, r)| {
                if odd_d(f) {
                    split(r, 1, 1)
                } else {
                    whole(r, 2)
                }
            })
            .collect()
    } else {
        let pick = spec
            .bd_factors
            .iter()
            .position(|f| f.family == Family::D && f.l >= 4)
            .map(|i| (i, 2))
            .or_else(|| {
                spec.bd_factors
                    .iter()
                    .position(|f| f.family == Family::B && f.l >= 2)
                    .map(|i| (i, 1))
            })
            .ok_or_else(|| Error::HypothesesViolated("no factor can be split".into()))?;
        ranges
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if i == pick.0 {
                    split(r, pick.1, r.len() - pick.1)
                } else {
                    whole(r, 2)
                }
            })
            .collect()
    };
    let p = Partition3::from_parts(parts);
    debug_assert!(p.satisfies_parity(spec));
    Ok(p)
}

/// The images `j(γ₁), j(γ₂), j(γ₃)` as ambient matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KleinEmbedding {
    pub j: [IntMatrix; 3],
}

/// Builds `j : Γ → W` from a partition and checks that it is an embedding
/// of the Klein four-group into `W`.
pub fn klein_embedding(spec: &Section2Spec, partition: &Partition3) -> Result<KleinEmbedding> {
    spec.validate()?;
    if partition.parts.len() != spec.m() {
        return Err(Error::InvalidInput(
            "partition does not match the spec".into(),
        ));
    }
    let dim = spec.ambient_dim();
    let s = spec.s_count();
    // Which A-blocks get τ^{(12)} and τ^{>2}.
    let swaps = [(true, true), (true, false), (false, true)];
    let mut j = Vec::with_capacity(3);
    for k in 0..3 {
        for (i, f) in spec.bd_factors.iter().enumerate() {
            let flips = f.l - partition.parts[i][k].len();
            if f.family == Family::D && flips % 2 == 1 {
                return Err(Error::ParityViolation(format!(
                    "factor D{} gets {flips} sign changes for γ{}",
                    f.l,
                    k + 1
                )));
            }
        }
        let mut perm: Vec<usize> = (0..dim).collect();
        let mut signs = vec![-1i8; s];
        signs.resize(dim, 1);
        for &u in &partition.unions[k] {
            signs[u] = 1;
        }
        for (iota, &n) in spec.a_factors.iter().enumerate() {
            let o = spec.a_offset(iota);
            if swaps[k].0 {
                perm.swap(o, o + 1);
            }
            if swaps[k].1 {
                for lam in 1..n {
                    perm.swap(o + 2 * lam, o + 2 * lam + 1);
                }
            }
        }
        j.push(crate::glattice::signed_permutation_matrix(&perm, &signs));
    }
    let j: [IntMatrix; 3] = j.try_into().expect("three images");
    let id = IntMatrix::identity(dim);
    if j.iter().any(|m| m.is_identity()) {
        return Err(Error::HypothesesViolated("j is not injective".into()));
    }
    let ok = j.iter().all(|m| m.mul(m) == id)
        && j[0].mul(&j[1]) == j[1].mul(&j[0])
        && j[0].mul(&j[1]) == j[2]
        && j[0] != j[1];
    if !ok {
        return Err(Error::ConstructionFailed(
            "j(γ) do not form a Klein four-group".into(),
        ));
    }
    Ok(KleinEmbedding { j })
}

/// `L′`, `v` and `L` in doubled ambient coordinates.
#[derive(Clone, Debug)]
pub struct Section2Lattice {
    pub spec: Section2Spec,
    /// HNF rows of `L′ = ⊕ Z^{l_i} ⊕ Q_Δ` (doubled).
    pub l_prime_basis: IntMatrix,
    /// `2v`.
    pub v: Vec<Int>,
    /// HNF rows of `L = ⟨L′, v⟩` (doubled).
    pub l_basis: IntMatrix,
}

/// Builds `L = ⟨L′, v⟩`.
pub fn section2_lattice(spec: &Section2Spec) -> Result<Section2Lattice> {
    spec.validate()?;
    let dim = spec.ambient_dim();
    let s = spec.s_count();
    let mut rows = Vec::new();
    for c in 0..s {
        let mut r = vec![Int::zero(); dim];
        r[c] = int(2);
        rows.push(r);
    }
    for (iota, &n) in spec.a_factors.iter().enumerate() {
        let o = spec.a_offset(iota);
        for k in 0..2 * n - 1 {
            let mut r = vec![Int::zero(); dim];
            r[o + k] = int(2);
            r[o + k + 1] = int(-2);
            rows.push(r);
        }
    }
    let l_prime_basis = intmat::hnf_rows(&IntMatrix::from_rows(rows.clone(), dim));
    let mut v = vec![Int::one(); dim];
    for (iota, &n) in spec.a_factors.iter().enumerate() {
        let o = spec.a_offset(iota);
        for k in 0..2 * n {
            if k % 2 == 1 {
                v[o + k] = int(-1);
            }
        }
    }
    rows.push(v.clone());
    let l_basis = intmat::hnf_rows(&IntMatrix::from_rows(rows, dim));
    Ok(Section2Lattice {
        spec: spec.clone(),
        l_prime_basis,
        v,
        l_basis,
    })
}

impl Section2Lattice {
    pub fn rank(&self) -> usize {
        self.l_basis.rows()
    }

    /// `[L : L′]`.
    pub fn index(&self) -> Int {
        intmat::sublattice_index(&self.l_basis, &self.l_prime_basis).expect("L′ ⊆ L")
    }

    /// Simple reflections of all factors on the ambient coordinates.
    pub fn weyl_generators(&self) -> Result<Vec<IntMatrix>> {
        let dim = self.spec.ambient_dim();
        let mut out = Vec::new();
        let mut offset = 0;
        for t in self.spec.types() {
            let f = build_factor(t)?;
            for w in &f.weyl_generators {
                let mut m = IntMatrix::identity(dim);
                for a in 0..f.ambient_dim {
                    for b in 0..f.ambient_dim {
                        m.set(offset + a, offset + b, w.get(a, b).clone());
                    }
                }
                out.push(m);
            }
            offset += f.ambient_dim;
        }
        Ok(out)
    }

    /// `L` under the group generated by `generators` (ambient matrices).
    pub fn lattice_over(&self, generators: &[IntMatrix], cap: usize) -> Result<GLattice> {
        over(&self.l_basis, generators, cap, self.spec.ambient_dim())
    }

    /// `L′` under the group generated by `generators`.
    pub fn l_prime_over(&self, generators: &[IntMatrix], cap: usize) -> Result<GLattice> {
        over(
            &self.l_prime_basis,
            generators,
            cap,
            self.spec.ambient_dim(),
        )
    }
}

fn over(basis: &IntMatrix, generators: &[IntMatrix], cap: usize, dim: usize) -> Result<GLattice> {
    let g = if generators.is_empty() {
        FinGroup::trivial(dim)
    } else {
        close_group(generators, cap)?
    };
    GLattice::natural(Arc::new(g)).invariant_sublattice(basis)
}

/// Everything computed along the proof that `L` is not quasi-invertible.
#[derive(Clone, Debug)]
pub struct Section2Report {
    pub lattice: Section2Lattice,
    pub partition: Partition3,
    pub embedding: KleinEmbedding,
    /// `L` as a `Γ`-lattice in the HNF basis.
    pub l_gamma: GLattice,
    /// `2v_κ = 2v·j(γ_κ)`.
    pub v_kappa: [Vec<Int>; 3],
    pub orbit_sums_to_zero: bool,
    /// `v + v_κ` matches the closed forms in terms of `U_κ`, `ξ′`, `ξ″`.
    pub pair_sums_ok: bool,
    /// `L₀` in the basis `v·g` (`g ≠ 1`, group order), ambient rows.
    pub l0_rows: IntMatrix,
    pub l0: GLattice,
    /// `J_Γ → L` sending `[g]` to `v·g`, in `L`-coordinates.
    pub l0_map: EquivariantMap,
    pub l0_iso_j_gamma: bool,
    /// `φ : L → Z^{n′}` in `L`-coordinates.
    pub phi: IntMatrix,
    /// `L₁ = ker φ` as HNF ambient rows.
    pub l1_rows: IntMatrix,
    /// `u₁` (and `u₂`, `u₃` when `μ = 0`).
    pub chosen: Vec<usize>,
    /// `(label, ambient row)` for each rank-one complement.
    pub complements: Vec<(String, Vec<Int>)>,
    pub decomposition_ok: bool,
    pub rank_l1: usize,
    pub rank_formula: usize,
    pub sha2: AbelianInvariants,
}

impl Section2Report {
    /// All structural checks passed and `Ш²(Γ, L) = Z/2`.
    pub fn all_ok(&self) -> bool {
        self.orbit_sums_to_zero
            && self.pair_sums_ok
            && self.l0_iso_j_gamma
            && self.decomposition_ok
            && self.rank_l1 == self.rank_formula
            && self.sha2.factors_i64() == vec![2]
            && self.sha2.free_rank == 0
    }
}

fn doubled_unit(dim: usize, i: usize, c: i64) -> Vec<Int> {
    let mut v = vec![Int::zero(); dim];
    v[i] = int(c);
    v
}

/// Runs the full analysis for a spec satisfying the hypotheses.
pub fn analyze_section2(spec: &Section2Spec) -> Result<Section2Report> {
    spec.check_hypotheses()?;
    let lat = section2_lattice(spec)?;
    let part = partition(spec)?;
    let emb = klein_embedding(spec, &part)?;
    let dim = spec.ambient_dim();
    let gamma = Arc::new(close_group(&emb.j[..2], 8)?);
    if gamma.order() != 4 {
        return Err(Error::ConstructionFailed(format!(
            "Γ has order {}",
            gamma.order()
        )));
    }
    let l_gamma = GLattice::natural(gamma.clone()).invariant_sublattice(&lat.l_basis)?;

    let v = &lat.v;
    let row = IntMatrix::row_vector(v);
    let v_kappa: [Vec<Int>; 3] = std::array::from_fn(|k| row.mul(&emb.j[k]).row(0).to_vec());
    let orbit_sums_to_zero =
        (0..dim).all(|c| (&v[c] + &v_kappa[0][c] + &v_kappa[1][c] + &v_kappa[2][c]).is_zero());

    // Closed forms for 2(v + v_κ).
    let mut expect: [Vec<Int>; 3] = std::array::from_fn(|_| vec![Int::zero(); dim]);
    for k in 0..3 {
        for &u in &part.unions[k] {
            expect[k][u] = int(2);
        }
    }
    for (iota, &n) in spec.a_factors.iter().enumerate() {
        let o = spec.a_offset(iota);
        // ξ″ for κ = 2, ξ′ for κ = 3.
        for lam in 1..n {
            expect[1][o + 2 * lam] = int(2);
            expect[1][o + 2 * lam + 1] = int(-2);
        }
        expect[2][o] = int(2);
        expect[2][o + 1] = int(-2);
    }
    let pair_sums_ok = (0..3).all(|k| (0..dim).all(|c| &v[c] + &v_kappa[k][c] == expect[k][c]));

    // L₀ with basis v·g for g ≠ 1 in group order.
    let l0_rows = IntMatrix::from_rows(
        (1..gamma.order())
            .map(|g| row.mul(&gamma.element(g)).row(0).to_vec())
            .collect(),
        dim,
    );
    let l0_coords = intmat::solve_rows(&lat.l_basis, &l0_rows)
        .ok_or_else(|| Error::ConstructionFailed("v·g ∉ L".into()))?;
    let l0 = l_gamma.invariant_sublattice(&l0_coords)?;
    let jg = j_gamma(gamma.clone());
    let l0_iso_j_gamma =
        EquivariantMap::new(jg.clone(), l0.clone(), IntMatrix::identity(3)).is_ok();
    let l0_map = EquivariantMap::new(jg, l_gamma.clone(), l0_coords)?;

    // φ and L₁.
    let n_prime: usize = spec.a_factors.iter().map(|n| n - 1).sum();
    let mut phi_amb = IntMatrix::zeros(dim, n_prime);
    let mut col = 0;
    for (iota, &n) in spec.a_factors.iter().enumerate() {
        let o = spec.a_offset(iota);
        for lam in 1..n {
            phi_amb.set(o + 2 * lam, col, Int::one());
            phi_amb.set(o + 2 * lam + 1, col, Int::one());
            col += 1;
        }
    }
    let phi = lat
        .l_basis
        .mul(&phi_amb)
        .div_exact(&int(2))
        .ok_or_else(|| Error::ConstructionFailed("φ is not integral on L".into()))?;
    let phi_map = EquivariantMap::new(
        l_gamma.clone(),
        GLattice::trivial(gamma.clone(), n_prime),
        phi.clone(),
    )?;
    if !phi_map.is_surjective() {
        return Err(Error::ConstructionFailed("φ is not surjective".into()));
    }
    let l1_rows = intmat::hnf_rows(&phi_map.kernel_rows().mul(&lat.l_basis));

    // Complements.
    let s_count = spec.s_count();
    let chosen: Vec<usize> = if spec.mu() >= 1 {
        vec![part.unions[0][0]]
    } else {
        part.unions
            .iter()
            .map(|u| *u.iter().min().expect("nonempty"))
            .collect()
    };
    let mut complements = Vec::new();
    for s in 0..s_count {
        if !chosen.contains(&s) {
            complements.push((format!("X_{s}"), doubled_unit(dim, s, 2)));
        }
    }
    for (iota, &n) in spec.a_factors.iter().enumerate() {
        let o = spec.a_offset(iota);
        for lam in 0..n {
            if iota == 0 && lam < 2 {
                continue;
            }
            let mut r = doubled_unit(dim, o + 2 * lam, 2);
            r[o + 2 * lam + 1] = int(-2);
            complements.push((format!("Xi_{},{}", iota + 1, lam + 1), r));
        }
    }
    let mut sum_rows = l0_rows.to_rows();
    sum_rows.extend(complements.iter().map(|(_, r)| r.clone()));
    let count = sum_rows.len();
    let sum = IntMatrix::from_rows(sum_rows, dim);
    let decomposition_ok = intmat::rank(&sum) == count && intmat::hnf_rows(&sum) == l1_rows;
    let rank_l1 = l1_rows.rows();
    let rank_formula = if spec.mu() >= 1 {
        s_count + spec.a_factors.iter().map(|n| 2 * n - 1).sum::<usize>() - n_prime
    } else {
        s_count
    };

    let sha2 = cohomology::sha2(&gamma, &l_gamma)?;
    Ok(Section2Report {
        lattice: lat,
        partition: part,
        embedding: emb,
        l_gamma,
        v_kappa,
        orbit_sums_to_zero,
        pair_sums_ok,
        l0_rows,
        l0,
        l0_map,
        l0_iso_j_gamma,
        phi,
        l1_rows,
        chosen,
        complements,
        decomposition_ok,
        rank_l1,
        rank_formula,
        sha2,
    })
}

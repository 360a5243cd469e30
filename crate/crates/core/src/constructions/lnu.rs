//! The lattices `L_ν` between `Q` and `P` for a product of `A_{n_i−1}`
//! factors, and the comparison with the single big lattice `Λ_n(d)`.

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glattice::{is_prime, permutation_matrix, QuotientInfo};
use crate::intmat::{self, int, AbelianInvariants, Int, IntMatrix};
use crate::rootdata::{intermediate_from_types, DynkinType, IntermediateLattice};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LnuSpec {
    pub n_list: Vec<usize>,
    pub d: usize,
    pub nu_list: Vec<usize>,
}

impl LnuSpec {
    pub fn new(n_list: Vec<usize>, d: usize, nu_list: Vec<usize>) -> Result<LnuSpec> {
        let s = LnuSpec { n_list, d, nu_list };
        s.validate()?;
        Ok(s)
    }

    /// `ν = (1, …, 1)`.
    pub fn trivial_nu(n_list: Vec<usize>, d: usize) -> Result<LnuSpec> {
        let r = n_list.len();
        LnuSpec::new(n_list, d, vec![1; r])
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.n_list.is_empty() {
            return bad("empty n_list".into());
        }
        if self.n_list.iter().any(|&n| n < 2) {
            return bad(format!("every n_i must be ≥ 2: {:?}", self.n_list));
        }
        if self.d < 2 || self.n_list.iter().any(|n| n % self.d != 0) {
            return bad(format!("d = {} must be > 1 and divide every n_i", self.d));
        }
        if self.nu_list.len() != self.n_list.len() {
            return bad("nu_list and n_list differ in length".into());
        }
        if self.nu_list[0] != 1 {
            return bad("ν₁ must be 1".into());
        }
        if self
            .nu_list
            .iter()
            .any(|&v| v == 0 || v >= self.d || v.gcd(&self.d) != 1)
        {
            return bad(format!("each ν_i must be a unit in 1..{}", self.d));
        }
        Ok(())
    }

    pub fn r(&self) -> usize {
        self.n_list.len()
    }

    pub fn n_total(&self) -> usize {
        self.n_list.iter().sum()
    }

    pub fn types(&self) -> Vec<DynkinType> {
        self.n_list.iter().map(|&n| DynkinType::a(n - 1)).collect()
    }

    fn offset(&self, i: usize) -> usize {
        self.n_list[..i].iter().sum()
    }

    /// Every valid spec with `Σ n_i ≤ max_total`: ordered lists `n_i ≥ 2`,
    /// every divisor `d > 1` of their gcd, every unit vector `ν` with `ν₁ = 1`.
    pub fn enumerate(max_total: usize) -> Vec<LnuSpec> {
        fn compositions(total: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if !acc.is_empty() {
                out.push(acc.clone());
            }
            for n in 2..=total {
                acc.push(n);
                compositions(total - n, acc, out);
                acc.pop();
            }
        }
        let mut lists = Vec::new();
        compositions(max_total, &mut Vec::new(), &mut lists);
        let mut out = Vec::new();
        for ns in lists {
            let c = ns.iter().fold(0, |g, &n| g.gcd(&n));
            for d in (2..=c).filter(|d| c % d == 0) {
                let units: Vec<usize> = (1..d).filter(|v| v.gcd(&d) == 1).collect();
                let mut nus = vec![vec![1usize]];
                for _ in 1..ns.len() {
                    nus = nus
                        .into_iter()
                        .flat_map(|p| units.iter().map(move |&u| [p.clone(), vec![u]].concat()))
                        .collect();
                }
                out.extend(nus.into_iter().map(|nu| LnuSpec {
                    n_list: ns.clone(),
                    d,
                    nu_list: nu,
                }));
            }
        }
        out
    }
}

/// Simple roots `α_{k,i}` in the scaled coordinates of the intermediate
/// lattice (block `i` scaled by `n_i`), factor-major.
fn roots(spec: &LnuSpec) -> Vec<Vec<Int>> {
    let n = spec.n_total();
    let mut out = Vec::new();
    for (i, &ni) in spec.n_list.iter().enumerate() {
        let o = spec.offset(i);
        for k in 0..ni - 1 {
            let mut v = vec![Int::zero(); n];
            v[o + k] = int(ni as i64);
            v[o + k + 1] = int(-(ni as i64));
            out.push(v);
        }
    }
    out
}

/// `w_ν = (1/d) Σ ν_i [(n_i−1)α_{1,i} + … + α_{n_i−1,i}]` in scaled
/// coordinates.
pub fn w_nu(spec: &LnuSpec) -> Result<Vec<Int>> {
    spec.validate()?;
    let n = spec.n_total();
    let al = roots(spec);
    let mut acc = vec![Int::zero(); n];
    let mut idx = 0;
    for (i, &ni) in spec.n_list.iter().enumerate() {
        for k in 1..ni {
            let c = int((spec.nu_list[i] * (ni - k)) as i64);
            for (a, b) in acc.iter_mut().zip(&al[idx]) {
                *a += &c * b;
            }
            idx += 1;
        }
    }
    let d = int(spec.d as i64);
    if acc.iter().any(|x| !x.is_multiple_of(&d)) {
        return Err(Error::ConstructionFailed(
            "d·w_ν is not divisible by d".into(),
        ));
    }
    Ok(acc.into_iter().map(|x| x / &d).collect())
}

/// `L_ν`: the preimage of `S_ν = ⟨ν̄⟩ ⊆ F`, checked against `⟨Q, w_ν⟩`.
pub fn l_nu(spec: &LnuSpec) -> Result<IntermediateLattice> {
    spec.validate()?;
    let residue: Vec<i64> = spec
        .n_list
        .iter()
        .zip(&spec.nu_list)
        .map(|(&n, &v)| (v * n / spec.d) as i64)
        .collect();
    let lat = intermediate_from_types(&spec.types(), &[residue])?;
    let mut rows = roots(spec);
    rows.push(w_nu(spec)?);
    let gen_basis = intmat::hnf_rows(&IntMatrix::from_rows(rows, spec.n_total()));
    if gen_basis != lat.basis {
        return Err(Error::ConstructionFailed(
            "preimage of S_ν differs from ⟨Q, w_ν⟩".into(),
        ));
    }
    Ok(lat)
}

/// Quotient `sup/sub` of ambient row lattices under ambient generators,
/// without enumerating the group.
fn quotient_under(sup: &IntMatrix, sub: &IntMatrix, gens: &[IntMatrix]) -> Result<QuotientInfo> {
    let sup = intmat::hnf_rows(sup);
    let sub_c =
        intmat::solve_rows(&sup, sub).ok_or_else(|| Error::NotInvariant("sub ⊄ sup".into()))?;
    let sub_h = intmat::hnf_rows(&sub_c);
    let in_sub = |v: &[Int]| {
        v.iter().all(Zero::is_zero) || (sub_h.rows() > 0 && intmat::solve_row(&sub_h, v).is_some())
    };
    let mut trivial = true;
    for g in gens {
        let moved = sup.mul(g);
        let c = intmat::solve_rows(&sup, &moved)
            .ok_or_else(|| Error::NotInvariant("sup not stable".into()))?;
        for i in 0..sub_h.rows() {
            if !in_sub(&c.apply_row(sub_h.row(i))) {
                return Err(Error::NotInvariant("sub not stable".into()));
            }
        }
        let d = c.sub(&IntMatrix::identity(sup.rows()));
        trivial &= (0..sup.rows()).all(|i| in_sub(d.row(i)));
    }
    Ok(QuotientInfo {
        invariants: intmat::row_cokernel_invariants(&sub_h),
        trivial_action: trivial,
    })
}

/// Checks of the isomorphism `L_ν/T_νL₁ ≅ Q/T_νQ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientReport {
    /// `L_ν / T_ν L₁`.
    pub l_quotient: QuotientInfo,
    /// `Q / T_ν Q`.
    pub q_quotient: QuotientInfo,
    /// `⊕_{i≥2} (Z/ν_i)^{n_i−1}`.
    pub expected: AbelianInvariants,
    /// `B_ν` (roots and `w_ν` minus `α_{n₁−1,1}`) is a basis of `L_ν`.
    pub b_basis_ok: bool,
    /// `B′_ν` is a basis of `T_ν L₁`.
    pub b_prime_basis_ok: bool,
    /// The map `Q/T_νQ → L_ν/T_νL₁` induced by `Q ⊆ L_ν` is bijective
    /// (`Q + T_νL₁ = L_ν` and `Q ∩ T_νL₁ = T_νQ`).
    pub natural_map_iso: bool,
}

impl QuotientReport {
    pub fn all_ok(&self) -> bool {
        self.l_quotient.invariants == self.expected
            && self.q_quotient.invariants == self.expected
            && self.natural_map_iso
            && self.b_basis_ok
            && self.b_prime_basis_ok
    }
}

fn is_basis_of(rows: Vec<Vec<Int>>, basis: &IntMatrix) -> bool {
    let count = rows.len();
    let m = IntMatrix::from_rows(rows, basis.cols());
    count == basis.rows() && intmat::hnf_rows(&m) == *basis
}

pub fn verify_lemma_3_6(spec: &LnuSpec) -> Result<QuotientReport> {
    let lat = l_nu(spec)?;
    let al = roots(spec);
    let w = w_nu(spec)?;
    let n = spec.n_total();
    let mut scaled = Vec::with_capacity(al.len());
    let mut idx = 0;
    for (i, &ni) in spec.n_list.iter().enumerate() {
        let c = int(spec.nu_list[i] as i64);
        for _ in 1..ni {
            scaled.push(al[idx].iter().map(|x| x * &c).collect::<Vec<_>>());
            idx += 1;
        }
    }
    let last1 = spec.n_list[0] - 2;
    let mut t_l1 = scaled.clone();
    t_l1.push(w.clone());
    let t_l1 = IntMatrix::from_rows(t_l1, n);
    let t_l1_basis = intmat::hnf_rows(&t_l1);

    let mut b = al.clone();
    b.remove(last1);
    b.push(w.clone());
    let b_basis_ok = is_basis_of(b, &lat.basis);
    let mut bp = scaled.clone();
    bp.remove(last1);
    bp.push(w);
    let b_prime_basis_ok = is_basis_of(bp, &t_l1_basis);

    let gens = lat.weyl_generators();
    let l_quotient = quotient_under(&lat.basis, &t_l1, &gens)?;
    let q = IntMatrix::from_rows(al, n);
    let t_q = IntMatrix::from_rows(scaled, n);
    let q_quotient = quotient_under(&q, &t_q, &gens)?;
    let natural_map_iso = intmat::hnf_rows(&q.vstack(&t_l1)) == lat.basis
        && intmat::intersect_rows(&q, &t_l1) == intmat::hnf_rows(&t_q);
    let mut expected = AbelianInvariants {
        factors: Vec::new(),
        free_rank: 0,
    };
    for i in 1..spec.r() {
        let part = AbelianInvariants {
            factors: if spec.nu_list[i] > 1 {
                vec![int(spec.nu_list[i] as i64); spec.n_list[i] - 1]
            } else {
                vec![]
            },
            free_rank: 0,
        };
        expected = expected.direct_sum(&part);
    }
    Ok(QuotientReport {
        l_quotient,
        q_quotient,
        expected,
        b_basis_ok,
        b_prime_basis_ok,
        natural_map_iso,
    })
}

/// `Λ_n(d)`, `N = φ(V) ∩ Λ_n(d)` and the checks relating them to `L = L_1`.
///
/// Coordinates: `Z^n` with `n = Σ n_i`, every vector multiplied by `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaReport {
    pub n: usize,
    /// HNF rows of `Λ_n(d) = ⟨Q̄, w̄⟩`.
    pub lambda_basis: IntMatrix,
    /// HNF rows of `N`.
    pub n_basis: IntMatrix,
    /// HNF rows of `φ(L)`.
    pub phi_l_basis: IntMatrix,
    /// `φ(L) = N`.
    pub phi_image_ok: bool,
    /// `N = ⟨ᾱ_j (j ∈ J), μ⟩`.
    pub mu_description_ok: bool,
    /// `Λ_n(d)/N` under the block Weyl group.
    pub quotient: QuotientInfo,
    /// Transpositions generating `S_n` on `Z^n`.
    pub sn_generators: Vec<IntMatrix>,
    /// Transpositions generating `W = ∏ S_{n_i}`.
    pub w_generators: Vec<IntMatrix>,
}

impl LambdaReport {
    /// `Λ_n(d)/N ≅ Z^{r−1}` with trivial action.
    pub fn quotient_ok(&self, r: usize) -> bool {
        self.quotient.invariants.factors.is_empty()
            && self.quotient.invariants.free_rank == r - 1
            && self.quotient.trivial_action
    }

    /// `Λ_n(d)` as an `S_n`-lattice.
    pub fn lambda_lattice(&self) -> Result<crate::glattice::GLattice> {
        let cap = (1..=self.n).product::<usize>() + 1;
        let g = crate::glattice::close_group(&self.sn_generators, cap)?;
        crate::glattice::GLattice::natural(std::sync::Arc::new(g))
            .invariant_sublattice(&self.lambda_basis)
    }

    /// `N` as a `W`-lattice.
    pub fn n_lattice(&self) -> Result<crate::glattice::GLattice> {
        let cap = (1..=self.n).product::<usize>() + 1;
        let g = if self.w_generators.is_empty() {
            crate::glattice::FinGroup::trivial(self.n)
        } else {
            crate::glattice::close_group(&self.w_generators, cap)?
        };
        crate::glattice::GLattice::natural(std::sync::Arc::new(g))
            .invariant_sublattice(&self.n_basis)
    }
}

fn transposition(n: usize, i: usize) -> IntMatrix {
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(i, i + 1);
    permutation_matrix(&p)
}

pub fn lambda_and_n(spec: &LnuSpec) -> Result<LambdaReport> {
    spec.validate()?;
    let lat = l_nu(&LnuSpec::trivial_nu(spec.n_list.clone(), spec.d)?)?;
    let n = spec.n_total();
    let d = spec.d as i64;
    let bar_root = |j: usize| {
        let mut v = vec![Int::zero(); n];
        v[j] = int(d);
        v[j + 1] = int(-d);
        v
    };
    let mut rows: Vec<Vec<Int>> = (0..n - 1).map(bar_root).collect();
    let mut w_bar = vec![int(-1); n];
    w_bar[0] = int(n as i64 - 1);
    rows.push(w_bar.clone());
    let lambda_basis = intmat::hnf_rows(&IntMatrix::from_rows(rows, n));

    let boundaries: Vec<usize> = (1..spec.r()).map(|i| spec.offset(i)).collect();
    let j_set: Vec<usize> = (0..n - 1)
        .filter(|j| !boundaries.contains(&(j + 1)))
        .collect();
    let v_span = IntMatrix::from_rows(j_set.iter().map(|&j| bar_root(j)).collect(), n);
    let n_basis = intmat::intersect_with_span(&lambda_basis, &v_span);

    // φ(L): rescale block i from n_i to d.
    let mut phi_rows = lat.basis.to_rows();
    for row in &mut phi_rows {
        for (i, &ni) in spec.n_list.iter().enumerate() {
            for x in &mut row[spec.offset(i)..spec.offset(i) + ni] {
                let y = &*x * int(d);
                if !y.is_multiple_of(&int(ni as i64)) {
                    return Err(Error::ConstructionFailed("L is not in (1/d)Q".into()));
                }
                *x = y / int(ni as i64);
            }
        }
    }
    let phi_l_basis = intmat::hnf_rows(&IntMatrix::from_rows(phi_rows, n));
    let phi_image_ok = phi_l_basis == n_basis;

    // μ = w̄ − Σ ((n − j_i)/d) ᾱ_{j_i}, with j_i the 1-based block ends.
    let mut mu = w_bar;
    for &b in &boundaries {
        let c = int((n - b) as i64 / d);
        for (m, a) in mu.iter_mut().zip(bar_root(b - 1)) {
            *m -= &c * a;
        }
    }
    let mut mu_rows: Vec<Vec<Int>> = j_set.iter().map(|&j| bar_root(j)).collect();
    mu_rows.push(mu);
    let mu_description_ok = intmat::hnf_rows(&IntMatrix::from_rows(mu_rows, n)) == n_basis;

    let sn_generators: Vec<IntMatrix> = (0..n - 1).map(|j| transposition(n, j)).collect();
    let w_generators: Vec<IntMatrix> = j_set.iter().map(|&j| transposition(n, j)).collect();
    let quotient = quotient_under(&lambda_basis, &n_basis, &w_generators)?;
    Ok(LambdaReport {
        n,
        lambda_basis,
        n_basis,
        phi_l_basis,
        phi_image_ok,
        mu_description_ok,
        quotient,
        sn_generators,
        w_generators,
    })
}

/// `(Z/p)^{n/p}` inside `W`: disjoint `p`-cycles on consecutive indices of
/// each block, as permutation matrices on `Z^n`.
pub fn elementary_abelian_subgroup(spec: &LnuSpec, p: usize) -> Result<Vec<IntMatrix>> {
    if !is_prime(p) {
        return Err(Error::InvalidPrime(format!("{p} is not prime")));
    }
    if spec.n_list.iter().any(|n| n % p != 0) {
        return Err(Error::InvalidPrime(format!(
            "{p} does not divide every n_i in {:?}",
            spec.n_list
        )));
    }
    let n = spec.n_total();
    let mut gens = Vec::new();
    for start in (0..n).step_by(p) {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..p {
            perm[start + k] = start + (k + 1) % p;
        }
        gens.push(permutation_matrix(&perm));
    }
    Ok(gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glattice::close_group;

    #[test]
    fn rank_one_gives_weight_lattice() {
        let l = l_nu(&LnuSpec::trivial_nu(vec![3], 3).unwrap()).unwrap();
        assert_eq!(l.basis, l.p_rows());
        assert_eq!(l.index_over_q(), int(3));
    }

    #[test]
    fn indices_over_q() {
        for (ns, d) in [(vec![3, 3], 3), (vec![4, 4], 2), (vec![4, 2], 2)] {
            let l = l_nu(&LnuSpec::trivial_nu(ns, d).unwrap()).unwrap();
            assert_eq!(l.index_over_q(), int(d as i64));
        }
        let l = l_nu(&LnuSpec::new(vec![3, 3], 3, vec![1, 2]).unwrap()).unwrap();
        assert_eq!(l.rank(), 4);
        assert_eq!(l.index_over_q(), int(3));
    }

    #[test]
    fn bad_specs() {
        assert!(LnuSpec::new(vec![3, 4], 3, vec![1, 1]).is_err());
        assert!(LnuSpec::new(vec![3, 3], 3, vec![2, 1]).is_err());
        assert!(LnuSpec::new(vec![4, 4], 4, vec![1, 2]).is_err());
        assert!(LnuSpec::new(vec![4], 1, vec![1]).is_err());
    }

    #[test]
    fn quotient_examples() {
        let r = verify_lemma_3_6(&LnuSpec::trivial_nu(vec![3, 3], 3).unwrap()).unwrap();
        assert!(r.l_quotient.invariants.is_trivial() && r.all_ok());
        let r = verify_lemma_3_6(&LnuSpec::new(vec![3, 3], 3, vec![1, 2]).unwrap()).unwrap();
        assert_eq!(r.l_quotient.invariants.factors_i64(), vec![2, 2]);
        assert!(r.all_ok(), "{r:?}");
        // Q₂/2Q₂ for A₂ is not a trivial S₃-module
        assert!(!r.q_quotient.trivial_action);
    }

    #[test]
    fn lambda_examples() {
        let s = LnuSpec::trivial_nu(vec![6], 3).unwrap();
        let r = lambda_and_n(&s).unwrap();
        assert_eq!(r.n_basis, r.lambda_basis);
        assert!(r.phi_image_ok && r.quotient_ok(1));
        for (ns, d) in [(vec![2, 2], 2), (vec![3, 3], 3)] {
            let s = LnuSpec::trivial_nu(ns, d).unwrap();
            let r = lambda_and_n(&s).unwrap();
            assert!(
                r.phi_image_ok && r.mu_description_ok && r.quotient_ok(2),
                "{r:?}"
            );
        }
        let s = LnuSpec::trivial_nu(vec![2, 2], 2).unwrap();
        let r = lambda_and_n(&s).unwrap();
        assert_eq!(r.lambda_lattice().unwrap().group().order(), 24);
        assert_eq!(r.n_lattice().unwrap().group().order(), 4);
    }

    #[test]
    fn elementary_abelian() {
        let order = |ns: Vec<usize>, p| {
            let s = LnuSpec::trivial_nu(ns, 2.max(p)).ok();
            let s = s.unwrap();
            close_group(&elementary_abelian_subgroup(&s, p).unwrap(), 1000)
                .unwrap()
                .elementary_abelian()
        };
        assert_eq!(order(vec![2, 2], 2), Some((2, 2)));
        assert_eq!(order(vec![3, 3], 3), Some((3, 2)));
        assert_eq!(order(vec![4, 4], 2), Some((2, 4)));
        let s = LnuSpec::trivial_nu(vec![4, 4], 2).unwrap();
        assert!(matches!(
            elementary_abelian_subgroup(&s, 3),
            Err(Error::InvalidPrime(_))
        ));
        assert!(matches!(
            elementary_abelian_subgroup(&s, 4),
            Err(Error::InvalidPrime(_))
        ));
    }
}

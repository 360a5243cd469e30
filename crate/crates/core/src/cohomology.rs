//! Group cohomology `Hⁿ(Γ, L)` of finite groups with lattice coefficients,
//! and the Sha-two obstruction
//! `Ш²(Γ, L) = ker(H²(Γ, L) → ∏_C H²(C, L))` over cyclic subgroups `C`.
//!
//! A lattice with right action `x ↦ x·ρ(g)` is turned into a left module by
//! `g·x = x·ρ(g⁻¹)`.
//!
//! Three engines are available:
//!
//! * the normalized bar complex (any degree up to 3; cochain spaces grow like
//!   `|Γ|ⁿ`, so only for small cases),
//! * a periodic tensor resolution for elementary abelian groups,
//! * crossed homomorphisms (degrees 1 and 2). A crossed homomorphism is fixed
//!   by its values on the generators, and for `N = |Γ|` the sequence
//!   `0 → L → L → L/NL → 0` gives
//!   `H²(Γ, L) ≅ Z̃ / (Z¹(L) + N·Z^{kr})`, where `Z̃` is the set of generator
//!   values that define crossed homomorphisms modulo `N`. Matrices stay of
//!   size about `k·r` (`k` generators, rank `r`), and restriction to a
//!   subgroup is evaluation of the crossed homomorphism on its generator.

use std::collections::BTreeSet;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glattice::{FinGroup, GLattice};
use crate::intmat::{self, AbelianInvariants, Int, IntMatrix};
use crate::DEFAULT_MAX_CELLS;

/// Canonical structure `⊕ Z/dᵢ ⊕ Z^free` of a cohomology group.
pub type AbGroupStructure = AbelianInvariants;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Normalized bar complex.
    Bar,
    /// Tensor product of periodic resolutions of the cyclic factors.
    PeriodicTensor,
    /// Crossed homomorphisms on generators, degree 2 through `L/NL`.
    CrossedHom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyResult {
    pub degree: usize,
    pub group: AbGroupStructure,
    pub method: Method,
    /// Basis of the cocycles (rows) when the engine produces one.
    pub cocycles: Option<IntMatrix>,
}

fn check_group(group: &FinGroup, l: &GLattice) -> Result<()> {
    if *l.group().as_ref() == *group {
        Ok(())
    } else {
        Err(Error::GroupMismatch)
    }
}

fn check_cells(rows: usize, cols: usize, cap: u128) -> Result<()> {
    let needed = rows as u128 * cols as u128;
    if needed > cap {
        Err(Error::BudgetExceeded { needed, cap })
    } else {
        Ok(())
    }
}

/// Matrices of the left action `g·x = x·A(g)`, `A(g) = ρ(g⁻¹)`.
fn left_actions(l: &GLattice) -> Vec<IntMatrix> {
    let g = l.group();
    let acts = l.actions();
    (0..g.order()).map(|i| acts[g.inv(i)].clone()).collect()
}

/// `Z^k / (row span of sub)` where `sub` lies inside the row span of `sup`
/// (full row rank).
fn quotient(sup: &IntMatrix, sub: &IntMatrix) -> AbelianInvariants {
    if sup.rows() == 0 {
        return AbelianInvariants::default();
    }
    if sub.rows() == 0 {
        return AbelianInvariants {
            factors: Vec::new(),
            free_rank: sup.rows(),
        };
    }
    let coords = intmat::solve_rows(sup, sub).expect("sublattice is contained in the lattice");
    intmat::row_cokernel_invariants(&coords)
}

/// `{u : u·x ∈ row span of t}` as HNF rows.
fn preimage(x: &IntMatrix, t: &IntMatrix) -> IntMatrix {
    let a = x.rows();
    if t.rows() == 0 {
        return intmat::kernel_basis(x);
    }
    let k = intmat::kernel_basis(&x.vstack(t));
    let idx: Vec<usize> = (0..a).collect();
    intmat::hnf_rows(&k.select_cols(&idx))
}

// ---------------------------------------------------------------------------
// bar complex

fn pow_usize(b: usize, e: usize) -> usize {
    (0..e).fold(1usize, |acc, _| acc.saturating_mul(b))
}

fn bar_dim(n_elems: usize, degree: usize, rank: usize) -> usize {
    pow_usize(n_elems.saturating_sub(1), degree).saturating_mul(rank)
}

/// Matrix of the normalized bar differential `δⁿ: Cⁿ → Cⁿ⁺¹`, so that
/// `f·δ = δf` on row vectors.
fn bar_differential(group: &FinGroup, left: &[IntMatrix], rank: usize, degree: usize) -> IntMatrix {
    let n = group.order();
    let m = n - 1;
    let rows = pow_usize(m, degree) * rank;
    let cols = pow_usize(m, degree + 1) * rank;
    let mut d = IntMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return d;
    }
    let encode = |t: &[usize]| t.iter().fold(0usize, |acc, &g| acc * m + (g - 1));
    let mut tuple = vec![1usize; degree + 1];
    let one = Int::from(1);
    let add_block =
        |d: &mut IntMatrix, t: &[usize], s_idx: usize, block: Option<&IntMatrix>, sign: i64| {
            let t_idx = encode(t);
            for a in 0..rank {
                for b in 0..rank {
                    let v = match block {
                        Some(mat) => mat.get(a, b).clone(),
                        None => {
                            if a == b {
                                one.clone()
                            } else {
                                continue;
                            }
                        }
                    };
                    if v.is_zero() {
                        continue;
                    }
                    let cur = d.get(t_idx * rank + a, s_idx * rank + b).clone();
                    d.set(t_idx * rank + a, s_idx * rank + b, cur + v * sign);
                }
            }
        };
    loop {
        let s_idx = encode(&tuple);
        // g₁·f(g₂,…)
        add_block(&mut d, &tuple[1..], s_idx, Some(&left[tuple[0]]), 1);
        for i in 0..degree {
            let prod = group.mul(tuple[i], tuple[i + 1]);
            if prod == 0 {
                continue;
            }
            let mut t = Vec::with_capacity(degree);
            t.extend_from_slice(&tuple[..i]);
            t.push(prod);
            t.extend_from_slice(&tuple[i + 2..]);
            let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
            add_block(&mut d, &t, s_idx, None, sign);
        }
        let sign = if (degree + 1) % 2 == 0 { 1 } else { -1 };
        add_block(&mut d, &tuple[..degree], s_idx, None, sign);
        // next tuple
        let mut pos = degree + 1;
        loop {
            if pos == 0 {
                return d;
            }
            pos -= 1;
            if tuple[pos] + 1 < n {
                tuple[pos] += 1;
                break;
            }
            tuple[pos] = 1;
        }
    }
}

/// `ker δⁿ / im δⁿ⁻¹` with the cocycle basis.
fn cohomology_of(d_prev: Option<&IntMatrix>, d_next: &IntMatrix) -> (AbelianInvariants, IntMatrix) {
    let z = intmat::kernel_basis(d_next);
    let b = match d_prev {
        Some(p) => intmat::hnf_rows(p),
        None => IntMatrix::zeros(0, d_next.rows()),
    };
    (quotient(&z, &b), z)
}

fn bar_h_n(
    group: &FinGroup,
    l: &GLattice,
    degree: usize,
    max_cells: u128,
) -> Result<CohomologyResult> {
    let r = l.rank();
    let n = group.order();
    let c_lo = if degree == 0 {
        0
    } else {
        bar_dim(n, degree - 1, r)
    };
    let c_mid = bar_dim(n, degree, r);
    let c_hi = bar_dim(n, degree + 1, r);
    check_cells(c_mid, c_hi, max_cells)?;
    check_cells(c_lo, c_mid, max_cells)?;
    let left = left_actions(l);
    let d_next = bar_differential(group, &left, r, degree);
    let d_prev = (degree > 0).then(|| bar_differential(group, &left, r, degree - 1));
    let (inv, z) = cohomology_of(d_prev.as_ref(), &d_next);
    Ok(CohomologyResult {
        degree,
        group: inv,
        method: Method::Bar,
        cocycles: Some(z),
    })
}

// ---------------------------------------------------------------------------
// periodic tensor resolution

/// A basis `g₁,…,g_m` of an elementary abelian group.
fn elementary_basis(group: &FinGroup) -> Result<(usize, Vec<usize>)> {
    let (p, m) = group
        .elementary_abelian()
        .ok_or(Error::NotElementaryAbelian)?;
    let mut basis = Vec::new();
    let mut span = vec![0usize];
    for x in 1..group.order() {
        if basis.len() == m {
            break;
        }
        if span.binary_search(&x).is_ok() {
            continue;
        }
        basis.push(x);
        span = group.subgroup_elements(&basis);
    }
    Ok((p, basis))
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

fn periodic_differential(
    left_gens: &[IntMatrix],
    norms: &[IntMatrix],
    rank: usize,
    degree: usize,
) -> IntMatrix {
    let m = left_gens.len();
    let lo = compositions(degree, m);
    let hi = compositions(degree + 1, m);
    let mut d = IntMatrix::zeros(lo.len() * rank, hi.len() * rank);
    let id = IntMatrix::identity(rank);
    for (si, k) in hi.iter().enumerate() {
        let mut prefix = 0usize;
        for j in 0..m {
            if k[j] >= 1 {
                let mut t = k.clone();
                t[j] -= 1;
                let ti = lo
                    .iter()
                    .position(|x| *x == t)
                    .expect("composition present");
                let block = if k[j] % 2 == 1 {
                    left_gens[j].sub(&id)
                } else {
                    norms[j].clone()
                };
                let sign = if prefix % 2 == 0 { 1 } else { -1 };
                for a in 0..rank {
                    for b in 0..rank {
                        let v = block.get(a, b);
                        if !v.is_zero() {
                            let cur = d.get(ti * rank + a, si * rank + b).clone();
                            d.set(ti * rank + a, si * rank + b, cur + v * sign);
                        }
                    }
                }
            }
            prefix += k[j];
        }
    }
    d
}

/// `Hⁿ` for an elementary abelian `(Z/p)^m` via the tensor product of
/// periodic resolutions.
pub fn periodic_resolution_h_n(
    group: &FinGroup,
    l: &GLattice,
    degree: usize,
) -> Result<CohomologyResult> {
    periodic_resolution_h_n_with(group, l, degree, DEFAULT_MAX_CELLS)
}

pub fn periodic_resolution_h_n_with(
    group: &FinGroup,
    l: &GLattice,
    degree: usize,
    max_cells: u128,
) -> Result<CohomologyResult> {
    check_group(group, l)?;
    let (p, basis) = elementary_basis(group)?;
    let r = l.rank();
    let m = basis.len();
    let dim = |n: usize| compositions(n, m).len() * r;
    check_cells(dim(degree), dim(degree + 1), max_cells)?;
    let left = left_actions(l);
    let left_gens: Vec<IntMatrix> = basis.iter().map(|&g| left[g].clone()).collect();
    let norms: Vec<IntMatrix> = left_gens
        .iter()
        .map(|a| {
            let mut acc = IntMatrix::zeros(r, r);
            let mut pw = IntMatrix::identity(r);
            for _ in 0..p {
                acc = acc.add(&pw);
                pw = pw.mul(a);
            }
            acc
        })
        .collect();
    let d_next = periodic_differential(&left_gens, &norms, r, degree);
    let d_prev = (degree > 0).then(|| periodic_differential(&left_gens, &norms, r, degree - 1));
    let (inv, z) = cohomology_of(d_prev.as_ref(), &d_next);
    Ok(CohomologyResult {
        degree,
        group: inv,
        method: Method::PeriodicTensor,
        cocycles: Some(z),
    })
}

// ---------------------------------------------------------------------------
// crossed homomorphisms

/// Data of the crossed-homomorphism description of `H¹` and `H²`.
struct CrossedHom {
    n: Int,
    k: usize,
    r: usize,
    /// `f(e) = u·t[e]` for the crossed homomorphism with generator values `u`.
    t: Vec<IntMatrix>,
    /// Basis of the column lattice of the cocycle equations.
    cols: IntMatrix,
    left: Vec<IntMatrix>,
}

impl CrossedHom {
    fn new(group: &FinGroup, l: &GLattice, max_cells: u128) -> Result<CrossedHom> {
        let k = group.generators().len();
        let r = l.rank();
        let n_elems = group.order();
        let edges = n_elems * k;
        check_cells(k * r, edges.saturating_mul(r), max_cells)?;
        let left = left_actions(l);
        let kr = k * r;
        let mut t: Vec<IntMatrix> = Vec::with_capacity(n_elems);
        t.push(IntMatrix::zeros(kr, r));
        let place = |m: &mut IntMatrix, j: usize, a: &IntMatrix, sign: i64| {
            for x in 0..r {
                for y in 0..r {
                    let v = a.get(x, y);
                    if !v.is_zero() {
                        let cur = m.get(j * r + x, y).clone();
                        m.set(j * r + x, y, cur + v * sign);
                    }
                }
            }
        };
        for e in 1..n_elems {
            let (p, j) = group.tree_edge(e).expect("tree edge");
            let mut m = t[p].clone();
            place(&mut m, j, &left[p], 1);
            t.push(m);
        }
        // non-tree edges: t[e·x_j] = t[e] + J_j·A(e)
        let mut eq_cols: Vec<Vec<Int>> = Vec::new();
        for e in 0..n_elems {
            for (j, &x) in group.generators().iter().enumerate() {
                let target = group.mul(e, x);
                if group.tree_edge(target) == Some((e, j)) {
                    continue;
                }
                let mut m = t[e].sub(&t[target]);
                place(&mut m, j, &left[e], 1);
                if m.is_zero() {
                    continue;
                }
                for c in 0..r {
                    eq_cols.push((0..kr).map(|i| m.get(i, c).clone()).collect());
                }
            }
        }
        let cols = if eq_cols.is_empty() {
            IntMatrix::zeros(kr, 0)
        } else {
            intmat::hnf_rows(&IntMatrix::from_rows(eq_cols, kr)).transpose()
        };
        Ok(CrossedHom {
            n: Int::from(n_elems),
            k,
            r,
            t,
            cols,
            left,
        })
    }

    fn kr(&self) -> usize {
        self.k * self.r
    }

    /// Integral crossed homomorphisms (generator values).
    fn z1(&self) -> IntMatrix {
        if self.cols.cols() == 0 {
            return IntMatrix::identity(self.kr());
        }
        intmat::kernel_basis(&self.cols)
    }

    /// Principal crossed homomorphisms `g ↦ g·m − m`.
    fn b1(&self, group: &FinGroup) -> IntMatrix {
        let r = self.r;
        let id = IntMatrix::identity(r);
        let mut b = IntMatrix::zeros(r, 0);
        for &x in group.generators() {
            b = b.hstack(&self.left[x].sub(&id));
        }
        intmat::hnf_rows(&b)
    }

    /// Generator values of crossed homomorphisms modulo `N`.
    fn z_tilde(&self) -> IntMatrix {
        let kr = self.kr();
        if self.cols.cols() == 0 {
            return IntMatrix::identity(kr);
        }
        let rho = self.cols.cols();
        preimage(&self.cols, &IntMatrix::scalar(rho, 1).scale(&self.n))
    }

    /// `Z¹(L) + N·Z^{kr}`.
    fn trivial_part(&self) -> IntMatrix {
        let kr = self.kr();
        intmat::hnf_rows(&self.z1().vstack(&IntMatrix::scalar(kr, 1).scale(&self.n)))
    }

    /// `H²(Γ, L) ≅ ⊕ Z/gcd(N, dᵢ)` over the invariant factors of the
    /// equations.
    fn h2(&self) -> AbelianInvariants {
        if self.cols.cols() == 0 {
            return AbelianInvariants::default();
        }
        let ds = intmat::invariant_factors(&self.cols);
        let mut diag = IntMatrix::zeros(ds.len(), ds.len());
        for (i, d) in ds.iter().enumerate() {
            diag.set(i, i, num_integer::Integer::gcd(d, &self.n));
        }
        intmat::cokernel_invariants(&diag)
    }

    /// Preimage in generator values of the classes restricting to zero on
    /// the cyclic subgroup generated by `c`.
    fn restriction_kernel(&self, group: &FinGroup, l: &GLattice, c: usize) -> IntMatrix {
        let r = self.r;
        let acts = l.actions();
        let mut norm = IntMatrix::zeros(r, r);
        let mut x = 0usize;
        loop {
            norm = norm.add(&acts[x]);
            x = group.mul(x, c);
            if x == 0 {
                break;
            }
        }
        let z1c = intmat::kernel_basis(&norm);
        let kc = intmat::hnf_rows(&z1c.vstack(&IntMatrix::scalar(r, 1).scale(&self.n)));
        preimage(&self.t[c], &kc)
    }
}

/// Generators of the maximal cyclic subgroups. Restriction to every cyclic
/// subgroup factors through one of these.
pub fn maximal_cyclic_generators(group: &FinGroup) -> Vec<usize> {
    let gens = group.cyclic_subgroup_generators();
    let sets: Vec<BTreeSet<usize>> = gens
        .iter()
        .map(|&g| group.subgroup_elements(&[g]).into_iter().collect())
        .collect();
    gens.iter()
        .enumerate()
        .filter(|(i, _)| {
            !sets
                .iter()
                .enumerate()
                .any(|(j, s)| j != *i && s.len() > sets[*i].len() && sets[*i].is_subset(s))
        })
        .map(|(_, &g)| g)
        .collect()
}

fn crossed_h_n(
    group: &FinGroup,
    l: &GLattice,
    degree: usize,
    max_cells: u128,
) -> Result<CohomologyResult> {
    if group.generators().is_empty() {
        let inv = if degree == 0 {
            AbelianInvariants {
                factors: vec![],
                free_rank: l.rank(),
            }
        } else {
            AbelianInvariants::default()
        };
        return Ok(CohomologyResult {
            degree,
            group: inv,
            method: Method::CrossedHom,
            cocycles: None,
        });
    }
    let ch = CrossedHom::new(group, l, max_cells)?;
    match degree {
        1 => {
            let z = ch.z1();
            let b = ch.b1(group);
            Ok(CohomologyResult {
                degree,
                group: quotient(&z, &b),
                method: Method::CrossedHom,
                cocycles: Some(z),
            })
        }
        2 => Ok(CohomologyResult {
            degree,
            group: ch.h2(),
            method: Method::CrossedHom,
            cocycles: None,
        }),
        _ => Err(Error::InvalidParameter(format!(
            "crossed homomorphisms cover degrees 1 and 2, not {degree}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// public entry points

/// `Hⁿ(Γ, L)` for `n ∈ {0,…,3}`, choosing an engine automatically.
pub fn h_n(group: &FinGroup, l: &GLattice, degree: usize) -> Result<CohomologyResult> {
    h_n_with(group, l, degree, None, DEFAULT_MAX_CELLS)
}

/// `Hⁿ(Γ, L)` with an explicit engine (`None` chooses: crossed
/// homomorphisms for degrees 1 and 2, the periodic resolution for degree 3
/// over elementary abelian groups, the bar complex otherwise).
pub fn h_n_with(
    group: &FinGroup,
    l: &GLattice,
    degree: usize,
    method: Option<Method>,
    max_cells: u128,
) -> Result<CohomologyResult> {
    check_group(group, l)?;
    if degree > 3 {
        return Err(Error::InvalidParameter(format!("degree {degree} > 3")));
    }
    let method = method.unwrap_or(match degree {
        1 | 2 => Method::CrossedHom,
        3 if group.elementary_abelian().is_some() => Method::PeriodicTensor,
        _ => Method::Bar,
    });
    match method {
        Method::Bar => bar_h_n(group, l, degree, max_cells),
        Method::PeriodicTensor => periodic_resolution_h_n_with(group, l, degree, max_cells),
        Method::CrossedHom if degree == 0 => bar_h_n(group, l, 0, max_cells),
        Method::CrossedHom => crossed_h_n(group, l, degree, max_cells),
    }
}

/// `Ш²(Γ, L)`.
pub fn sha2(group: &FinGroup, l: &GLattice) -> Result<AbGroupStructure> {
    sha2_with(group, l, Method::CrossedHom, DEFAULT_MAX_CELLS)
}

/// `Ш²(Γ, L)` with a chosen engine (`CrossedHom` or `Bar`).
pub fn sha2_with(
    group: &FinGroup,
    l: &GLattice,
    method: Method,
    max_cells: u128,
) -> Result<AbGroupStructure> {
    check_group(group, l)?;
    if group.generators().is_empty() {
        return Ok(AbelianInvariants::default());
    }
    match method {
        Method::CrossedHom => sha2_crossed(group, l, max_cells),
        Method::Bar => sha2_bar(group, l, max_cells),
        Method::PeriodicTensor => Err(Error::InvalidParameter(
            "Sha-two needs restriction maps; use the crossed-hom or bar engine".into(),
        )),
    }
}

fn sha2_crossed(group: &FinGroup, l: &GLattice, max_cells: u128) -> Result<AbelianInvariants> {
    let ch = CrossedHom::new(group, l, max_cells)?;
    if ch.h2().is_trivial() {
        return Ok(AbelianInvariants::default());
    }
    let cyclic = maximal_cyclic_generators(group);
    let kernels: Vec<IntMatrix> = cyclic
        .par_iter()
        .map(|&c| ch.restriction_kernel(group, l, c))
        .collect();
    let mut pre = ch.z_tilde();
    for k in &kernels {
        pre = intmat::intersect_rows(&pre, k);
    }
    Ok(quotient(&pre, &ch.trivial_part()))
}

/// Bar-complex Ш²: restriction is precomposition with the inclusion of
/// tuples from the subgroup.
fn sha2_bar(group: &FinGroup, l: &GLattice, max_cells: u128) -> Result<AbelianInvariants> {
    let r = l.rank();
    let n = group.order();
    check_cells(bar_dim(n, 2, r), bar_dim(n, 3, r), max_cells)?;
    let left = left_actions(l);
    let d1 = bar_differential(group, &left, r, 1);
    let d2 = bar_differential(group, &left, r, 2);
    let z = intmat::kernel_basis(&d2);
    let b = intmat::hnf_rows(&d1);
    if z.rows() == 0 {
        return Ok(AbelianInvariants::default());
    }
    let b_coords = if b.rows() == 0 {
        IntMatrix::zeros(0, z.rows())
    } else {
        intmat::solve_rows(&z, &b).expect("coboundaries are cocycles")
    };
    let m = n - 1;
    let cyclic = maximal_cyclic_generators(group);
    let kernels: Vec<IntMatrix> = cyclic
        .par_iter()
        .map(|&c| {
            // sorted element list of ⟨c⟩ without the identity
            let sub: Vec<usize> = group
                .subgroup_elements(&[c])
                .into_iter()
                .filter(|&x| x != 0)
                .collect();
            let ms = sub.len();
            // columns of C²(Γ) that belong to tuples in ⟨c⟩
            let mut cols = Vec::with_capacity(ms * ms * r);
            for &a in &sub {
                for &b2 in &sub {
                    let t = (a - 1) * m + (b2 - 1);
                    for x in 0..r {
                        cols.push(t * r + x);
                    }
                }
            }
            let restricted = z.select_cols(&cols);
            // coboundaries of the subgroup, written in the same column order
            let mut d1c = IntMatrix::zeros(ms * r, ms * ms * r);
            for (ia, &a) in sub.iter().enumerate() {
                for (ib, &b2) in sub.iter().enumerate() {
                    let s = ia * ms + ib;
                    let prod = group.mul(a, b2);
                    // (δf)(a,b) = a·f(b) − f(ab) + f(a)
                    for x in 0..r {
                        for y in 0..r {
                            let v = left[a].get(x, y);
                            if !v.is_zero() {
                                let cur = d1c.get(ib * r + x, s * r + y).clone();
                                d1c.set(ib * r + x, s * r + y, cur + v);
                            }
                        }
                        if prod != 0 {
                            let ip = sub.binary_search(&prod).expect("closed subgroup");
                            let cur = d1c.get(ip * r + x, s * r + x).clone();
                            d1c.set(ip * r + x, s * r + x, cur - Int::from(1));
                        }
                        let cur = d1c.get(ia * r + x, s * r + x).clone();
                        d1c.set(ia * r + x, s * r + x, cur + Int::from(1));
                    }
                }
            }
            preimage(&restricted, &intmat::hnf_rows(&d1c))
        })
        .collect();
    let mut pre = IntMatrix::identity(z.rows());
    for k in &kernels {
        pre = intmat::intersect_rows(&pre, k);
    }
    Ok(quotient(&pre, &b_coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glattice::close_group;
    use std::sync::Arc;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows)
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
    fn h1_sign_lattice() {
        let g = Arc::new(close_group(&[m(&[vec![-1]])], 10).unwrap());
        let l = GLattice::natural(g.clone());
        for method in [Method::Bar, Method::CrossedHom, Method::PeriodicTensor] {
            let h = h_n_with(&g, &l, 1, Some(method), DEFAULT_MAX_CELLS).unwrap();
            assert_eq!(h.group.factors_i64(), vec![2], "{method:?}");
            assert_eq!(h.group.free_rank, 0);
        }
        // H²(Z/2, Z⁻) = 0, H²(Z/2, Z) = Z/2
        for method in [Method::Bar, Method::CrossedHom, Method::PeriodicTensor] {
            assert!(h_n_with(&g, &l, 2, Some(method), DEFAULT_MAX_CELLS)
                .unwrap()
                .group
                .is_trivial());
            let t = GLattice::trivial(g.clone(), 1);
            assert_eq!(
                h_n_with(&g, &t, 2, Some(method), DEFAULT_MAX_CELLS)
                    .unwrap()
                    .group
                    .factors_i64(),
                vec![2]
            );
        }
    }

    #[test]
    fn engines_agree_on_klein_group() {
        let g = klein();
        let lattices = vec![
            GLattice::natural(g.clone()),
            GLattice::trivial(g.clone(), 1),
            GLattice::regular(g.clone()),
            GLattice::natural(g.clone()).dual(),
        ];
        for l in &lattices {
            for degree in 1..=2 {
                let a = h_n_with(&g, l, degree, Some(Method::Bar), DEFAULT_MAX_CELLS)
                    .unwrap()
                    .group;
                let b = h_n_with(&g, l, degree, Some(Method::CrossedHom), DEFAULT_MAX_CELLS)
                    .unwrap()
                    .group;
                let c = h_n_with(
                    &g,
                    l,
                    degree,
                    Some(Method::PeriodicTensor),
                    DEFAULT_MAX_CELLS,
                )
                .unwrap()
                .group;
                assert_eq!(a, b, "degree {degree}");
                assert_eq!(a, c, "degree {degree}");
            }
            let a = h_n_with(&g, l, 3, Some(Method::Bar), DEFAULT_MAX_CELLS)
                .unwrap()
                .group;
            let c = h_n_with(&g, l, 3, Some(Method::PeriodicTensor), DEFAULT_MAX_CELLS)
                .unwrap()
                .group;
            assert_eq!(a, c, "degree 3");
        }
    }

    #[test]
    fn trivial_coefficients_klein() {
        // H¹(V, Z) = 0, H²(V, Z) = (Z/2)², H³(V, Z) = Z/2
        let g = klein();
        let t = GLattice::trivial(g.clone(), 1);
        assert!(h_n(&g, &t, 1).unwrap().group.is_trivial());
        assert_eq!(h_n(&g, &t, 2).unwrap().group.factors_i64(), vec![2, 2]);
        assert_eq!(h_n(&g, &t, 3).unwrap().group.factors_i64(), vec![2]);
    }

    #[test]
    fn regular_is_acyclic() {
        let g = klein();
        let l = GLattice::regular(g.clone());
        for d in 1..=3 {
            assert!(h_n(&g, &l, d).unwrap().group.is_trivial());
        }
        assert!(sha2(&g, &l).unwrap().is_trivial());
    }

    #[test]
    fn sha2_vanishes_for_cyclic() {
        let r = m(&[vec![0, -1], vec![1, -1]]);
        let g = Arc::new(close_group(&[r], 10).unwrap());
        let l = GLattice::natural(g.clone());
        assert!(sha2(&g, &l).unwrap().is_trivial());
        assert!(sha2_with(&g, &l, Method::Bar, DEFAULT_MAX_CELLS)
            .unwrap()
            .is_trivial());
    }

    #[test]
    fn budget_is_enforced() {
        let g = klein();
        let l = GLattice::regular(g.clone());
        assert!(matches!(
            h_n_with(&g, &l, 3, Some(Method::Bar), 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}

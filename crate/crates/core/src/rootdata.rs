//! Simple root systems realized in integer coordinates, their Weyl groups,
//! fundamental groups and the intermediate lattices `Q ⊆ L ⊆ P`.
//!
//! Each factor lives in ambient coordinates scaled by a denominator so that
//! the weight lattice is integral:
//!
//! | type      | ambient              | scale |
//! |-----------|----------------------|-------|
//! | `A_{n-1}` | zero-sum part of `Z^n` | `n` |
//! | `B_n`     | `Z^n`                | 2     |
//! | `C_n`     | `Z^n`                | 1     |
//! | `D_n`     | `Z^n`                | 2     |
//! | `G2`      | zero-sum part of `Z^3` | 1   |
//!
//! Weyl groups act by signed permutation matrices on the ambient
//! coordinates.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glattice::{close_group, signed_permutation_matrix, FinGroup, GLattice};
use crate::intmat::{self, Int, IntMatrix};
use crate::DEFAULT_MAX_GROUP_ORDER;

/// Hard ceiling for enumerating a full product Weyl group.
const WEYL_ENUMERATION_LIMIT: u128 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    G2,
    E,
    F,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            "G2" | "G" | "g2" | "g" => Ok(Family::G2),
            "E" | "e" => Ok(Family::E),
            "F" | "f" | "F4" => Ok(Family::F),
            other => Err(Error::InvalidInput(format!("unknown family {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::G2 => "G2",
            Family::E => "E",
            Family::F => "F",
        }
    }
}

/// A simple Dynkin type; `n` is the rank (`A_n` has rank `n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DynkinType {
    pub family: Family,
    pub n: usize,
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::G2 => write!(f, "G2"),
            fam => write!(f, "{}{}", fam.name(), self.n),
        }
    }
}

/// Parses `A2`, `b3`, `G2`, `E6`, ...
impl std::str::FromStr for DynkinType {
    type Err = Error;

    fn from_str(s: &str) -> Result<DynkinType> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("g2") {
            return Ok(DynkinType::g2());
        }
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (fam, n) = s.split_at(split);
        let n: usize = n
            .parse()
            .map_err(|_| Error::InvalidInput(format!("type {s:?} needs a rank, as in A2")))?;
        DynkinType::new(Family::parse(fam)?, n)
    }
}

impl DynkinType {
    pub fn new(family: Family, n: usize) -> Result<DynkinType> {
        let t = DynkinType {
            family,
            n: if family == Family::G2 { 2 } else { n },
        };
        t.validate()?;
        Ok(t)
    }

    pub fn a(n: usize) -> DynkinType {
        DynkinType {
            family: Family::A,
            n,
        }
    }
    pub fn b(n: usize) -> DynkinType {
        DynkinType {
            family: Family::B,
            n,
        }
    }
    pub fn c(n: usize) -> DynkinType {
        DynkinType {
            family: Family::C,
            n,
        }
    }
    pub fn d(n: usize) -> DynkinType {
        DynkinType {
            family: Family::D,
            n,
        }
    }
    pub fn g2() -> DynkinType {
        DynkinType {
            family: Family::G2,
            n: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.family {
            Family::A | Family::B => self.n >= 1,
            Family::C | Family::D => self.n >= 2,
            Family::G2 => self.n == 2,
            Family::E => (6..=8).contains(&self.n),
            Family::F => self.n == 4,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidRank(format!(
                "{}{}",
                self.family.name(),
                self.n
            )))
        }
    }

    pub fn is_supported(&self) -> bool {
        !matches!(self.family, Family::E | Family::F)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        match self.family {
            Family::A => self.n + 1,
            Family::G2 => 3,
            _ => self.n,
        }
    }

    /// Order of the fundamental group `P/Q`.
    pub fn fundamental_order(&self) -> usize {
        match self.family {
            Family::A => self.n + 1,
            Family::B | Family::C => 2,
            Family::D => 4,
            Family::G2 => 1,
            Family::E => 9 - self.n,
            Family::F => 1,
        }
    }

    /// `P/Q` is `Z/2 × Z/2` exactly for `D_n` with `n` even.
    pub fn fundamental_is_klein(&self) -> bool {
        self.family == Family::D && self.n % 2 == 0
    }

    pub fn weyl_order(&self) -> u128 {
        let fact = |k: usize| (1..=k as u128).product::<u128>();
        match self.family {
            Family::A => fact(self.n + 1),
            Family::B | Family::C => (1u128 << self.n) * fact(self.n),
            Family::D => (1u128 << (self.n - 1)) * fact(self.n),
            Family::G2 => 12,
            Family::E => match self.n {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            Family::F => 1152,
        }
    }

    /// Reduces a residue to its canonical representative.
    pub fn reduce_residue(&self, r: i64) -> i64 {
        if self.fundamental_is_klein() {
            r.rem_euclid(4)
        } else {
            r.rem_euclid(self.fundamental_order() as i64)
        }
    }

    /// Group law on residues (XOR of labels for `D_even`).
    pub fn add_residues(&self, a: i64, b: i64) -> i64 {
        if self.fundamental_is_klein() {
            self.reduce_residue(a) ^ self.reduce_residue(b)
        } else {
            self.reduce_residue(a + b)
        }
    }
}

/// A simple factor with its lattices in scaled ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootFactor {
    pub dynkin: DynkinType,
    pub ambient_dim: usize,
    /// Ambient coordinates are multiplied by this to make `P` integral.
    pub scale: i64,
    /// Simple roots (rows).
    pub q_basis: IntMatrix,
    /// Fundamental weights (rows).
    pub p_basis: IntMatrix,
    /// Simple reflections acting on ambient coordinates.
    pub weyl_generators: Vec<IntMatrix>,
    /// Invariant factors of `P/Q`.
    pub fundamental_group: Vec<i64>,
}

fn unit(n: usize, i: usize, c: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = c;
    v
}

fn swap_reflection(n: usize, i: usize, j: usize) -> IntMatrix {
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(i, j);
    signed_permutation_matrix(&p, &vec![1; n])
}

fn sign_flip(n: usize, i: usize) -> IntMatrix {
    let mut s = vec![1i8; n];
    s[i] = -1;
    signed_permutation_matrix(&(0..n).collect::<Vec<_>>(), &s)
}

/// Reflection in `e_i + e_j`: `x_i ↦ −x_j`, `x_j ↦ −x_i`.
fn plus_reflection(n: usize, i: usize, j: usize) -> IntMatrix {
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(i, j);
    let mut s = vec![1i8; n];
    s[i] = -1;
    s[j] = -1;
    signed_permutation_matrix(&p, &s)
}

/// Builds the standard realization of a simple factor.
pub fn build_factor(t: DynkinType) -> Result<RootFactor> {
    t.validate()?;
    if !t.is_supported() {
        return Err(Error::UnsupportedType(format!(
            "{t}: only families A, B, C, D and G2 are handled"
        )));
    }
    let n = t.n;
    let (dim, scale, q, p, w) = match t.family {
        Family::A => {
            let m = n + 1;
            let s = m as i64;
            let q: Vec<Vec<i64>> = (0..n)
                .map(|i| {
                    let mut v = vec![0; m];
                    v[i] = s;
                    v[i + 1] = -s;
                    v
                })
                .collect();
            let p: Vec<Vec<i64>> = (1..=n)
                .map(|k| {
                    (0..m)
                        .map(|i| if i < k { s - k as i64 } else { -(k as i64) })
                        .collect()
                })
                .collect();
            let w = (0..n).map(|i| swap_reflection(m, i, i + 1)).collect();
            (m, s, q, p, w)
        }
        Family::B => {
            let mut q: Vec<Vec<i64>> = (0..n - 1)
                .map(|i| {
                    let mut v = vec![0; n];
                    v[i] = 2;
                    v[i + 1] = -2;
                    v
                })
                .collect();
            q.push(unit(n, n - 1, 2));
            let mut p: Vec<Vec<i64>> = (1..n)
                .map(|k| (0..n).map(|i| if i < k { 2 } else { 0 }).collect())
                .collect();
            p.push(vec![1; n]);
            let mut w: Vec<IntMatrix> = (0..n - 1).map(|i| swap_reflection(n, i, i + 1)).collect();
            w.push(sign_flip(n, n - 1));
            (n, 2, q, p, w)
        }
        Family::C => {
            let mut q: Vec<Vec<i64>> = (0..n - 1)
                .map(|i| {
                    let mut v = vec![0; n];
                    v[i] = 1;
                    v[i + 1] = -1;
                    v
                })
                .collect();
            q.push(unit(n, n - 1, 2));
            let p: Vec<Vec<i64>> = (1..=n)
                .map(|k| (0..n).map(|i| i64::from(i < k)).collect())
                .collect();
            let mut w: Vec<IntMatrix> = (0..n - 1).map(|i| swap_reflection(n, i, i + 1)).collect();
            w.push(sign_flip(n, n - 1));
            (n, 1, q, p, w)
        }
        Family::D => {
            let mut q: Vec<Vec<i64>> = (0..n - 1)
                .map(|i| {
                    let mut v = vec![0; n];
                    v[i] = 2;
                    v[i + 1] = -2;
                    v
                })
                .collect();
            let mut last = vec![0; n];
            last[n - 2] = 2;
            last[n - 1] = 2;
            q.push(last);
            let mut p: Vec<Vec<i64>> = (1..n - 1)
                .map(|k| (0..n).map(|i| if i < k { 2 } else { 0 }).collect())
                .collect();
            // ω_{n−1} = ½(ε₁+…+ε_{n−1}−ε_n), ω_n = ½(ε₁+…+ε_n)
            let mut wm = vec![1; n];
            wm[n - 1] = -1;
            p.push(wm);
            p.push(vec![1; n]);
            let mut w: Vec<IntMatrix> = (0..n - 1).map(|i| swap_reflection(n, i, i + 1)).collect();
            w.push(plus_reflection(n, n - 2, n - 1));
            (n, 2, q, p, w)
        }
        Family::G2 => {
            let q = vec![vec![1, -1, 0], vec![-2, 1, 1]];
            // ω₁ = 2α₁+α₂, ω₂ = 3α₁+2α₂
            let p = vec![vec![0, -1, 1], vec![-1, -1, 2]];
            let s2 = {
                let mut p3: Vec<usize> = (0..3).collect();
                p3.swap(1, 2);
                signed_permutation_matrix(&p3, &[-1, -1, -1])
            };
            (3, 1, q, p, vec![swap_reflection(3, 0, 1), s2])
        }
        Family::E | Family::F => unreachable!(),
    };
    let q_basis = IntMatrix::from_i64(&q);
    let p_basis = IntMatrix::from_i64(&p);
    let fundamental_group = intmat::sublattice_index(&p_basis, &q_basis)
        .map(|_| {
            let coords =
                intmat::solve_rows(&intmat::hnf_rows(&p_basis), &q_basis).expect("Q inside P");
            intmat::cokernel_invariants(&coords.transpose()).factors_i64()
        })
        .ok_or_else(|| {
            Error::ConstructionFailed(format!("{t}: Q is not a full sublattice of P"))
        })?;
    Ok(RootFactor {
        dynkin: t,
        ambient_dim: dim,
        scale,
        q_basis,
        p_basis,
        weyl_generators: w,
        fundamental_group,
    })
}

impl RootFactor {
    /// `[P:Q]`.
    pub fn fundamental_order(&self) -> usize {
        self.dynkin.fundamental_order()
    }

    /// Lift to `P` (scaled ambient coordinates) of a residue in `F`.
    ///
    /// Encodings: `A_{n−1}`: `r·ω₁`; `B_n`: `r·½Σε`; `C_n`: `r·ε₁`;
    /// `D_n` odd: `r·ω_n`; `D_n` even: labels `1 = ω_n`, `2 = ε₁`,
    /// `3 = ω_{n−1}`, added by XOR; `G2`: only 0.
    pub fn residue_lift(&self, r: i64) -> Vec<Int> {
        let t = self.dynkin;
        let r = t.reduce_residue(r);
        let d = self.ambient_dim;
        let v: Vec<i64> = match t.family {
            Family::A => {
                let s = self.scale;
                (0..d)
                    .map(|i| r * (if i == 0 { s - 1 } else { -1 }))
                    .collect()
            }
            Family::B => vec![r; d],
            Family::C => unit(d, 0, r),
            Family::D if t.n % 2 == 1 => vec![r; d],
            Family::D => match r {
                0 => vec![0; d],
                1 => vec![1; d],
                2 => unit(d, 0, 2),
                _ => {
                    let mut v = vec![1; d];
                    v[d - 1] = -1;
                    v
                }
            },
            Family::G2 => vec![0; d],
            Family::E | Family::F => unreachable!(),
        };
        intmat::ints(&v)
    }

    /// Residue of a vector of `P`, or `None` if it is not in `P`.
    pub fn residue_of(&self, v: &[Int]) -> Option<i64> {
        let q = intmat::hnf_rows(&self.q_basis);
        (0..self.fundamental_order() as i64).find(|&r| {
            let lift = self.residue_lift(r);
            let diff: Vec<Int> = v.iter().zip(&lift).map(|(a, b)| a - b).collect();
            diff.iter().all(|x| x == &Int::from(0)) || intmat::solve_row(&q, &diff).is_some()
        })
    }

    /// The Weyl group acting on ambient coordinates.
    pub fn weyl_group(&self) -> Result<FinGroup> {
        close_group(
            &self.weyl_generators,
            DEFAULT_MAX_GROUP_ORDER.max(self.dynkin.weyl_order() as usize + 1),
        )
    }

    /// `Q` as a Weyl lattice in the simple-root basis.
    pub fn q_lattice_simple_roots(&self) -> Result<GLattice> {
        GLattice::natural(Arc::new(self.weyl_group()?)).invariant_sublattice(&self.q_basis)
    }

    /// `P` as a Weyl lattice in the fundamental-weight basis.
    pub fn p_lattice_fundamental_weights(&self) -> Result<GLattice> {
        GLattice::natural(Arc::new(self.weyl_group()?)).invariant_sublattice(&self.p_basis)
    }
}

/// `Q ⊆ L ⊆ P` for a product of simple factors, cut out by a subgroup `S`
/// of `F = ⊕ F_i` given by generators (one residue per factor).
#[derive(Clone, Debug)]
pub struct IntermediateLattice {
    pub factors: Vec<RootFactor>,
    pub s_generators: Vec<Vec<i64>>,
    /// HNF rows in the concatenated scaled ambient coordinates.
    pub basis: IntMatrix,
    lattice: Arc<OnceLock<Result<GLattice>>>,
}

impl PartialEq for IntermediateLattice {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors && self.basis == other.basis
    }
}

/// Builds `L = Q + ⟨lifts of S⟩`.
pub fn intermediate(
    factors: &[RootFactor],
    s_generators: &[Vec<i64>],
) -> Result<IntermediateLattice> {
    if factors.is_empty() {
        return Err(Error::InvalidInput("no factors".into()));
    }
    let mut gens = Vec::with_capacity(s_generators.len());
    for g in s_generators {
        if g.len() != factors.len() {
            return Err(Error::InvalidResidue(format!(
                "residue tuple {g:?} has {} entries for {} factors",
                g.len(),
                factors.len()
            )));
        }
        gens.push(
            g.iter()
                .zip(factors)
                .map(|(&r, f)| f.dynkin.reduce_residue(r))
                .collect::<Vec<_>>(),
        );
    }
    let q = combined_q(factors);
    let dim = q.cols();
    let mut rows = q.to_rows();
    for g in &gens {
        let mut v = Vec::with_capacity(dim);
        for (f, &r) in factors.iter().zip(g) {
            v.extend(f.residue_lift(r));
        }
        rows.push(v);
    }
    let basis = intmat::hnf_rows(&IntMatrix::from_rows(rows, dim));
    Ok(IntermediateLattice {
        factors: factors.to_vec(),
        s_generators: gens,
        basis,
        lattice: Arc::new(OnceLock::new()),
    })
}

/// Builds the factors and then the intermediate lattice.
pub fn intermediate_from_types(
    types: &[DynkinType],
    s_generators: &[Vec<i64>],
) -> Result<IntermediateLattice> {
    let factors = types
        .iter()
        .map(|&t| build_factor(t))
        .collect::<Result<Vec<_>>>()?;
    intermediate(&factors, s_generators)
}

fn block_diag_all(blocks: &[IntMatrix]) -> IntMatrix {
    let mut acc = IntMatrix::zeros(0, 0);
    for b in blocks {
        acc = acc.block_diag(b);
    }
    acc
}

fn combined_q(factors: &[RootFactor]) -> IntMatrix {
    block_diag_all(
        &factors
            .iter()
            .map(|f| f.q_basis.clone())
            .collect::<Vec<_>>(),
    )
}

fn combined_p(factors: &[RootFactor]) -> IntMatrix {
    block_diag_all(
        &factors
            .iter()
            .map(|f| f.p_basis.clone())
            .collect::<Vec<_>>(),
    )
}

impl IntermediateLattice {
    pub fn ambient_dim(&self) -> usize {
        self.factors.iter().map(|f| f.ambient_dim).sum()
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn types(&self) -> Vec<DynkinType> {
        self.factors.iter().map(|f| f.dynkin).collect()
    }

    /// Ambient column range of factor `i`.
    pub fn block(&self, i: usize) -> std::ops::Range<usize> {
        let start: usize = self.factors[..i].iter().map(|f| f.ambient_dim).sum();
        start..start + self.factors[i].ambient_dim
    }

    pub fn q_rows(&self) -> IntMatrix {
        intmat::hnf_rows(&combined_q(&self.factors))
    }

    pub fn p_rows(&self) -> IntMatrix {
        intmat::hnf_rows(&combined_p(&self.factors))
    }

    /// Simple reflections of every factor, embedded block-diagonally.
    pub fn weyl_generators(&self) -> Vec<IntMatrix> {
        let dim = self.ambient_dim();
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            let r = self.block(i);
            for w in &f.weyl_generators {
                let mut m = IntMatrix::identity(dim);
                for a in 0..f.ambient_dim {
                    for b in 0..f.ambient_dim {
                        m.set(r.start + a, r.start + b, w.get(a, b).clone());
                    }
                }
                out.push(m);
            }
        }
        out
    }

    pub fn weyl_order(&self) -> u128 {
        self.factors.iter().map(|f| f.dynkin.weyl_order()).product()
    }

    /// `L` under the full product Weyl group, in the HNF basis.
    pub fn lattice(&self) -> Result<GLattice> {
        self.lattice
            .get_or_init(|| {
                let order = self.weyl_order();
                if order > WEYL_ENUMERATION_LIMIT {
                    return Err(Error::GroupTooLarge {
                        cap: WEYL_ENUMERATION_LIMIT as usize,
                    });
                }
                self.lattice_over(&self.weyl_generators(), order as usize + 1)
            })
            .clone()
    }

    /// `L` under the group generated by the given ambient matrices (which
    /// must preserve `L`), in the HNF basis.
    pub fn lattice_over(&self, generators: &[IntMatrix], cap: usize) -> Result<GLattice> {
        let g = if generators.is_empty() {
            FinGroup::trivial(self.ambient_dim())
        } else {
            close_group(generators, cap)?
        };
        GLattice::natural(Arc::new(g)).invariant_sublattice(&self.basis)
    }

    /// Coordinates of `v` (ambient) in the lattice basis, if `v ∈ L`.
    pub fn coordinates(&self, v: &[Int]) -> Option<Vec<Int>> {
        intmat::solve_row(&self.basis, v)
    }

    /// Index `[L:Q]`.
    pub fn index_over_q(&self) -> Int {
        intmat::sublattice_index(&self.basis, &self.q_rows()).expect("Q ⊆ L")
    }

    /// Index `[P:L]`.
    pub fn index_in_p(&self) -> Int {
        intmat::sublattice_index(&self.p_rows(), &self.basis).expect("L ⊆ P")
    }

    /// `L ∩ P_i` for the factor subset `subset`, as ambient rows.
    pub fn intersect_factors(&self, subset: &[usize]) -> IntMatrix {
        let dim = self.ambient_dim();
        let mut cols = Vec::new();
        for &i in subset {
            cols.extend(self.block(i));
        }
        let mut coord = IntMatrix::zeros(cols.len(), dim);
        for (k, &c) in cols.iter().enumerate() {
            coord.set(k, c, Int::from(1));
        }
        intmat::intersect_rows(&self.basis, &coord)
    }
}

/// Named character lattices of classical groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedGroup {
    /// `SO(m)`; `m ≥ 3`.
    SO(usize),
    /// `Sp(2n)`; the parameter is `2n`.
    Sp(usize),
    /// `PGL(n)` with inner Weyl action: `Q(A_{n−1})`.
    PGL(usize),
    /// `SL(n)`: `P(A_{n−1})`.
    SL(usize),
}

impl NamedGroup {
    pub fn parse(name: &str, param: usize) -> Result<NamedGroup> {
        match name.trim().to_ascii_uppercase().as_str() {
            "SO" => Ok(NamedGroup::SO(param)),
            "SP" => Ok(NamedGroup::Sp(param)),
            "PGL" => Ok(NamedGroup::PGL(param)),
            "SL" => Ok(NamedGroup::SL(param)),
            other => Err(Error::InvalidParameter(format!("unknown group {other}"))),
        }
    }
}

/// The character lattice of a named group as an intermediate lattice.
pub fn char_lattice(name: NamedGroup) -> Result<IntermediateLattice> {
    let bad = |s: String| Err(Error::InvalidParameter(s));
    match name {
        NamedGroup::SO(m) if m >= 3 && m % 2 == 1 => {
            intermediate_from_types(&[DynkinType::b((m - 1) / 2)], &[])
        }
        NamedGroup::SO(m) if m >= 4 && m % 2 == 0 => {
            intermediate_from_types(&[DynkinType::d(m / 2)], &[vec![2]])
        }
        NamedGroup::SO(m) => bad(format!("SO({m})")),
        NamedGroup::Sp(2) => intermediate_from_types(&[DynkinType::a(1)], &[vec![1]]),
        NamedGroup::Sp(m) if m >= 4 && m % 2 == 0 => {
            intermediate_from_types(&[DynkinType::c(m / 2)], &[vec![1]])
        }
        NamedGroup::Sp(m) => bad(format!("Sp({m})")),
        NamedGroup::PGL(n) if n >= 2 => intermediate_from_types(&[DynkinType::a(n - 1)], &[]),
        NamedGroup::SL(n) if n >= 2 => intermediate_from_types(&[DynkinType::a(n - 1)], &[vec![1]]),
        NamedGroup::PGL(n) | NamedGroup::SL(n) => bad(format!("n = {n}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn parses_type_names() {
        assert_eq!("A2".parse::<DynkinType>().unwrap(), DynkinType::a(2));
        assert_eq!(" d4".parse::<DynkinType>().unwrap(), DynkinType::d(4));
        assert_eq!("G2".parse::<DynkinType>().unwrap(), DynkinType::g2());
        assert_eq!("E6".parse::<DynkinType>().unwrap().family, Family::E);
        assert!("C1".parse::<DynkinType>().is_err());
        assert!("X3".parse::<DynkinType>().is_err());
        assert!("B".parse::<DynkinType>().is_err());
    }

    fn all_small_types() -> Vec<DynkinType> {
        let mut v = Vec::new();
        for n in 1..=6 {
            v.push(DynkinType::a(n));
            v.push(DynkinType::b(n));
            if n >= 2 {
                v.push(DynkinType::c(n));
                v.push(DynkinType::d(n));
            }
        }
        v.push(DynkinType::g2());
        v
    }

    #[test]
    fn fundamental_group_orders() {
        for t in all_small_types() {
            let f = build_factor(t).unwrap();
            let order: i64 = f.fundamental_group.iter().product();
            assert_eq!(order as usize, t.fundamental_order(), "{t}");
            if t.family == Family::D {
                let expect = if t.n % 2 == 0 { vec![2, 2] } else { vec![4] };
                assert_eq!(f.fundamental_group, expect, "{t}");
            }
        }
    }

    #[test]
    fn weyl_generators_are_reflections_preserving_lattices() {
        for t in all_small_types() {
            let f = build_factor(t).unwrap();
            let q = intmat::hnf_rows(&f.q_basis);
            let p = intmat::hnf_rows(&f.p_basis);
            for w in &f.weyl_generators {
                assert!(w.mul(w).is_identity(), "{t}");
                assert!(!w.is_identity());
                assert!(intmat::solve_rows(&q, &q.mul(w)).is_some(), "{t} Q");
                assert!(intmat::solve_rows(&p, &p.mul(w)).is_some(), "{t} P");
                // trivial on P/Q
                let d = p.mul(w).sub(&p);
                for i in 0..d.rows() {
                    let row = d.row(i);
                    assert!(
                        row.iter().all(|x| x == &Int::from(0))
                            || intmat::solve_row(&q, row).is_some()
                    );
                }
            }
        }
    }

    #[test]
    fn weyl_orders_by_closure() {
        for t in all_small_types().into_iter().filter(|t| t.rank() <= 4) {
            let f = build_factor(t).unwrap();
            assert_eq!(
                f.weyl_group().unwrap().order() as u128,
                t.weyl_order(),
                "{t}"
            );
        }
    }

    #[test]
    fn residue_lifts_round_trip() {
        for t in all_small_types() {
            let f = build_factor(t).unwrap();
            for r in 0..t.fundamental_order() as i64 {
                assert_eq!(f.residue_of(&f.residue_lift(r)), Some(r), "{t} {r}");
            }
        }
    }

    #[test]
    fn d3_vector_subgroup() {
        let l = intermediate_from_types(&[DynkinType::d(3)], &[vec![2]]).unwrap();
        assert_eq!(l.index_over_q().to_i64(), Some(2));
        assert_eq!(l.index_in_p().to_i64(), Some(2));
        let so6 = char_lattice(NamedGroup::SO(6)).unwrap();
        assert_eq!(so6.basis, l.basis);
        assert_eq!(so6.basis, IntMatrix::scalar(3, 2));
    }

    #[test]
    fn so4_pair() {
        let l =
            intermediate_from_types(&[DynkinType::a(1), DynkinType::a(1)], &[vec![1, 1]]).unwrap();
        assert_eq!(l.index_over_q().to_i64(), Some(2));
        assert_eq!(l.rank(), 2);
        let g = l.lattice().unwrap();
        assert_eq!(g.group().order(), 4);
    }

    #[test]
    fn trivial_s_is_q() {
        let l = intermediate_from_types(&[DynkinType::a(2)], &[]).unwrap();
        assert_eq!(l.basis, l.q_rows());
        let p = intermediate_from_types(&[DynkinType::a(2)], &[vec![1]]).unwrap();
        assert_eq!(p.basis, p.p_rows());
        assert_eq!(p.index_over_q().to_i64(), Some(3));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            build_factor(DynkinType {
                family: Family::E,
                n: 6
            }),
            Err(Error::UnsupportedType(_))
        ));
        assert!(matches!(
            DynkinType::new(Family::C, 1),
            Err(Error::InvalidRank(_))
        ));
        assert!(matches!(
            intermediate_from_types(&[DynkinType::a(1)], &[vec![1, 0]]),
            Err(Error::InvalidResidue(_))
        ));
    }

    #[test]
    fn q_a2_simple_roots_not_signed() {
        let f = build_factor(DynkinType::a(2)).unwrap();
        assert!(f
            .q_lattice_simple_roots()
            .unwrap()
            .is_sign_permutation()
            .is_none());
        let so7 = char_lattice(NamedGroup::SO(7)).unwrap().lattice().unwrap();
        assert!(so7.is_sign_permutation().is_some());
    }
}

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::intmat::{Int, IntMatrix};

const TABLE_LIMIT: usize = 1024;

type Flat = Box<[i64]>;

fn to_flat(m: &IntMatrix) -> Result<Flat> {
    m.data()
        .iter()
        .map(|x| {
            x.to_i64()
                .ok_or_else(|| Error::InvalidInput(format!("group matrix entry {x} too large")))
        })
        .collect()
}

fn flat_mul(a: &[i64], b: &[i64], d: usize) -> Option<Flat> {
    let mut out = vec![0i64; d * d];
    for i in 0..d {
        for k in 0..d {
            let x = a[i * d + k];
            if x == 0 {
                continue;
            }
            for j in 0..d {
                let y = b[k * d + j];
                if y != 0 {
                    out[i * d + j] = out[i * d + j].checked_add(x.checked_mul(y)?)?;
                }
            }
        }
    }
    Some(out.into_boxed_slice())
}

fn flat_identity(d: usize) -> Flat {
    let mut v = vec![0i64; d * d];
    for i in 0..d {
        v[i * d + i] = 1;
    }
    v.into_boxed_slice()
}

/// A finite group given by a faithful integral matrix representation.
///
/// Elements are indexed; index 0 is always the identity. The product is the
/// matrix product, `mul(a, b) = element(a) · element(b)`. Entries of elements
/// of a finite matrix group are small, so they are stored as `i64` with
/// checked arithmetic.
#[derive(Clone)]
pub struct FinGroup {
    dim: usize,
    elements: Vec<Flat>,
    index: HashMap<Flat, usize>,
    generators: Vec<usize>,
    /// Full multiplication table for small groups.
    table: Option<Vec<u32>>,
    inverse: Vec<usize>,
    order_of: Vec<usize>,
    /// Spanning tree of the right Cayley graph: `element(i) = element(parent) · generator`.
    tree: Vec<Option<(usize, usize)>>,
}

impl fmt::Debug for FinGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinGroup(order {}, dim {}, {} generators)",
            self.order(),
            self.dim,
            self.generators.len()
        )
    }
}

impl PartialEq for FinGroup {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.elements == other.elements
            && self.generators == other.generators
    }
}

impl Eq for FinGroup {}

/// Closure of `generators` under multiplication, capped at `cap` elements.
pub fn close_group(generators: &[IntMatrix], cap: usize) -> Result<FinGroup> {
    FinGroup::close(generators, cap)
}

impl FinGroup {
    pub fn close(generators: &[IntMatrix], cap: usize) -> Result<FinGroup> {
        let dim = match generators.first() {
            Some(g) => g.rows(),
            None => return Err(Error::InvalidInput(
                "at least one generator is needed (use FinGroup::trivial for the trivial group)"
                    .into(),
            )),
        };
        for g in generators {
            if !g.is_square() || g.rows() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "generator of shape {}x{} in dimension {dim}",
                    g.rows(),
                    g.cols()
                )));
            }
            if !g.is_unimodular() {
                return Err(Error::NotUnimodular(format!("{g:?}")));
            }
        }
        let gens: Vec<Flat> = generators.iter().map(to_flat).collect::<Result<_>>()?;
        let id = flat_identity(dim);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0usize);
        let mut tree = vec![None];
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for (gi, g) in gens.iter().enumerate() {
                let prod = flat_mul(&elements[e], g, dim)
                    .ok_or_else(|| Error::InvalidInput("group element entries overflow".into()))?;
                if index.contains_key(&prod) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                index.insert(prod.clone(), elements.len());
                elements.push(prod);
                tree.push(Some((e, gi)));
                queue.push_back(elements.len() - 1);
            }
        }
        let gen_idx = gens.iter().map(|g| index[g]).collect();
        Ok(Self::finish(dim, elements, index, gen_idx, tree))
    }

    /// The trivial group acting on `Z^dim`.
    pub fn trivial(dim: usize) -> FinGroup {
        let id = flat_identity(dim);
        let mut index = HashMap::new();
        index.insert(id.clone(), 0);
        Self::finish(dim, vec![id], index, Vec::new(), vec![None])
    }

    fn finish(
        dim: usize,
        elements: Vec<Flat>,
        index: HashMap<Flat, usize>,
        generators: Vec<usize>,
        tree: Vec<Option<(usize, usize)>>,
    ) -> FinGroup {
        let n = elements.len();
        let mut g = FinGroup {
            dim,
            elements,
            index,
            generators,
            table: None,
            inverse: Vec::new(),
            order_of: Vec::new(),
            tree,
        };
        if n <= TABLE_LIMIT {
            let mut t = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = g.mul_slow(a, b) as u32;
                }
            }
            g.table = Some(t);
        }
        let mut inverse = vec![0; n];
        let mut order_of = vec![1; n];
        for a in 1..n {
            let mut k = 1;
            let mut x = a;
            loop {
                let next = g.mul(x, a);
                k += 1;
                if next == 0 {
                    inverse[a] = x;
                    break;
                }
                x = next;
            }
            order_of[a] = k;
        }
        g.inverse = inverse;
        g.order_of = order_of;
        g
    }

    fn mul_slow(&self, a: usize, b: usize) -> usize {
        let p = flat_mul(&self.elements[a], &self.elements[b], self.dim)
            .expect("product of group elements overflowed");
        self.index[&p]
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Matrix of element `i`.
    pub fn element(&self, i: usize) -> IntMatrix {
        let d = self.dim;
        IntMatrix::from_flat(
            d,
            d,
            self.elements[i].iter().map(|&x| Int::from(x)).collect(),
        )
    }

    pub fn element_matrices(&self) -> Vec<IntMatrix> {
        (0..self.order()).map(|i| self.element(i)).collect()
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn generator_matrices(&self) -> Vec<IntMatrix> {
        self.generators.iter().map(|&g| self.element(g)).collect()
    }

    pub fn index_of(&self, m: &IntMatrix) -> Option<usize> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return None;
        }
        let f = to_flat(m).ok()?;
        self.index.get(&f).copied()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.order() + b] as usize,
            None => self.mul_slow(a, b),
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.order_of[a]
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    /// `Some((parent, generator_position))` with `element(i) = element(parent) · generator`.
    /// Every parent index is smaller than its child.
    pub fn tree_edge(&self, i: usize) -> Option<(usize, usize)> {
        self.tree[i]
    }

    pub fn is_abelian(&self) -> bool {
        let gens = &self.generators;
        gens.iter()
            .all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Element set of the subgroup generated by `gens` (sorted indices).
    pub fn subgroup_elements(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for &g in gens {
                let p = self.mul(e, g);
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// One generator per nontrivial cyclic subgroup, deduplicated, in
    /// increasing index order.
    pub fn cyclic_subgroup_generators(&self) -> Vec<usize> {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut out = Vec::new();
        for a in 1..self.order() {
            let mut s = vec![0usize];
            let mut x = a;
            while x != 0 {
                s.push(x);
                x = self.mul(x, a);
            }
            s.sort_unstable();
            if seen.insert(s) {
                out.push(a);
            }
        }
        out
    }

    /// All subgroups as sorted element lists. Exponential in general; meant
    /// for small groups.
    pub fn all_subgroups(&self) -> Vec<Vec<usize>> {
        let mut subs: BTreeSet<Vec<usize>> = BTreeSet::new();
        subs.insert(vec![0]);
        for a in self.cyclic_subgroup_generators() {
            subs.insert(self.subgroup_elements(&[a]));
        }
        let mut frontier: Vec<Vec<usize>> = subs.iter().cloned().collect();
        let cyclic: Vec<usize> = self.cyclic_subgroup_generators();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in &frontier {
                for &c in &cyclic {
                    if s.binary_search(&c).is_ok() {
                        continue;
                    }
                    let mut gens = s.clone();
                    gens.push(c);
                    let joined = self.subgroup_elements(&gens);
                    if subs.insert(joined.clone()) {
                        next.push(joined);
                    }
                }
            }
            frontier = next;
        }
        subs.into_iter().collect()
    }

    /// The subgroup generated by `gens` as a group in its own right.
    pub fn subgroup(&self, gens: &[usize]) -> Result<FinGroup> {
        if gens.iter().any(|&g| g >= self.order()) {
            return Err(Error::NotASubgroupElement(format!("{gens:?}")));
        }
        let mats: Vec<IntMatrix> = gens.iter().map(|&g| self.element(g)).collect();
        if mats.is_empty() {
            return Ok(FinGroup::trivial(self.dim));
        }
        FinGroup::close(&mats, self.order() + 1)
    }

    /// Direct product acting block-diagonally.
    pub fn product(&self, other: &FinGroup, cap: usize) -> Result<FinGroup> {
        if (self.order() as u128) * (other.order() as u128) > cap as u128 {
            return Err(Error::GroupTooLarge { cap });
        }
        let mut gens = Vec::new();
        for g in self.generator_matrices() {
            gens.push(g.block_diag(&IntMatrix::identity(other.dim)));
        }
        for g in other.generator_matrices() {
            gens.push(IntMatrix::identity(self.dim).block_diag(&g));
        }
        if gens.is_empty() {
            return Ok(FinGroup::trivial(self.dim + other.dim));
        }
        FinGroup::close(&gens, cap)
    }

    /// Is the group elementary abelian `(Z/p)^m`? Returns `(p, m)`.
    pub fn elementary_abelian(&self) -> Option<(usize, usize)> {
        let n = self.order();
        if n == 1 || !self.is_abelian() {
            return None;
        }
        let p = self.order_of[1];
        if !is_prime(p) || self.order_of[1..].iter().any(|&k| k != p) {
            return None;
        }
        let mut m = 0;
        let mut x = 1;
        while x < n {
            x *= p;
            m += 1;
        }
        (x == n).then_some((p, m))
    }
}

pub(crate) fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_group() {
        let g = close_group(&[IntMatrix::from_i64(&[vec![-1]])], 100).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.inv(1), 1);
        assert_eq!(g.element_order(1), 2);
        assert_eq!(g.elementary_abelian(), Some((2, 1)));
    }

    #[test]
    fn rejects_non_unimodular_and_caps() {
        assert!(matches!(
            close_group(&[IntMatrix::from_i64(&[vec![2]])], 10),
            Err(Error::NotUnimodular(_))
        ));
        let rot = IntMatrix::from_i64(&[vec![0, -1], vec![1, 0]]);
        assert!(matches!(
            close_group(&[rot], 3),
            Err(Error::GroupTooLarge { cap: 3 })
        ));
    }

    #[test]
    fn dihedral_subgroups() {
        // symmetries of the square
        let r = IntMatrix::from_i64(&[vec![0, -1], vec![1, 0]]);
        let s = IntMatrix::from_i64(&[vec![1, 0], vec![0, -1]]);
        let g = close_group(&[r, s], 100).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.all_subgroups().len(), 10);
        // cyclic: trivial excluded; 5 of order 2, 1 of order 4
        assert_eq!(g.cyclic_subgroup_generators().len(), 6);
        for a in 0..8 {
            assert_eq!(g.mul(a, g.inv(a)), 0);
        }
    }
}

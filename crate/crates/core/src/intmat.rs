//! Exact integer matrices and their canonical forms.
//!
//! Everything here is arbitrary precision. The project-wide convention is
//! that lattices are row spans: a sublattice of `Z^n` is stored as the rows
//! of its (row-style) Hermite normal form, so lattice equality is equality
//! of HNFs.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    pub fn scalar(n: usize, c: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::from(c);
        }
        m
    }

    /// Builds a matrix from small integer rows. All rows must have equal length.
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Int::from(x)).collect())
                .collect(),
            cols,
        )
    }

    /// `cols` is needed to describe `0 x n` matrices.
    pub fn from_rows(rows: Vec<Vec<Int>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        IntMatrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<Int>) -> Self {
        assert_eq!(data.len(), rows * cols);
        IntMatrix { rows, cols, data }
    }

    pub fn row_vector(v: &[Int]) -> Self {
        IntMatrix {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Int] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries as `i64`, panicking on overflow. Intended for small matrices
    /// such as group elements and permutation data.
    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.to_i64().expect("entry exceeds i64"))
                    .collect()
            })
            .collect()
    }

    pub fn data(&self) -> &[Int] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let base = i * other.cols;
                for (j, b) in orow.iter().enumerate() {
                    if !b.is_zero() {
                        out.data[base + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Int::zero(); self.cols];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in self.row(k).iter().enumerate() {
                if !b.is_zero() {
                    out[j] += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, c: &Int) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Exact division of every entry; `None` if some entry is not divisible.
    pub fn div_exact(&self, c: &Int) -> Option<IntMatrix> {
        let mut data = Vec::with_capacity(self.data.len());
        for a in &self.data {
            let (q, r) = a.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            data.push(q);
        }
        Some(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend(self.row(i).iter().cloned());
            data.extend(other.row(i).iter().cloned());
        }
        IntMatrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        IntMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            for &j in idx {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Int {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.to_rows();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().abs().is_one()
    }

    /// Inverse of a unimodular matrix, `None` otherwise.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let h = hnf(self);
        if h.rank != n || !h.h.is_identity() {
            return None;
        }
        // U·A = I
        Some(h.transform)
    }

    pub fn max_abs(&self) -> Int {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(Int::zero)
    }
}

/// Smith normal form `U·A·V = D`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<Int> {
        let k = self.d.rows().min(self.d.cols());
        (0..k)
            .map(|i| self.d.get(i, i).clone())
            .filter(|x| !x.is_zero())
            .collect()
    }
}

/// Row-style Hermite normal form.
///
/// The first `rank` rows of `transform · A` equal `h`; the remaining rows of
/// `transform · A` are zero, so the trailing rows of `transform` form a
/// basis of the left kernel.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub h: IntMatrix,
    pub transform: IntMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

fn row_axpy(rows: &mut [Vec<Int>], target: usize, src: usize, q: &Int, from: usize) {
    // rows[target] -= q * rows[src]
    let (t, s) = if target < src {
        let (a, b) = rows.split_at_mut(src);
        (&mut a[target], &b[0])
    } else {
        let (a, b) = rows.split_at_mut(target);
        (&mut b[0], &a[src])
    };
    for j in from..s.len() {
        if !s[j].is_zero() {
            t[j] -= q * &s[j];
        }
    }
}

fn hnf_in_place(
    rows: &mut Vec<Vec<Int>>,
    ncols: usize,
    mut u: Option<&mut Vec<Vec<Int>>>,
) -> Vec<usize> {
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut p = 0;
    for c in 0..ncols {
        if p == m {
            break;
        }
        let mut found = false;
        loop {
            let mut best: Option<usize> = None;
            for r in p..m {
                if !rows[r][c].is_zero() {
                    let better = match best {
                        None => true,
                        Some(b) => rows[r][c].magnitude() < rows[b][c].magnitude(),
                    };
                    if better {
                        best = Some(r);
                    }
                }
            }
            let Some(b) = best else { break };
            found = true;
            if b != p {
                rows.swap(b, p);
                if let Some(u) = u.as_deref_mut() {
                    u.swap(b, p);
                }
            }
            let mut clean = true;
            for r in p + 1..m {
                if rows[r][c].is_zero() {
                    continue;
                }
                let q = rows[r][c].div_floor(&rows[p][c]);
                row_axpy(rows, r, p, &q, c);
                if let Some(u) = u.as_deref_mut() {
                    row_axpy(u, r, p, &q, 0);
                }
                if !rows[r][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        if rows[p][c].is_negative() {
            for x in rows[p].iter_mut() {
                *x = -std::mem::take(x);
            }
            if let Some(u) = u.as_deref_mut() {
                for x in u[p].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
        }
        for r in 0..p {
            if rows[r][c].is_zero() {
                continue;
            }
            let q = rows[r][c].div_floor(&rows[p][c]);
            if !q.is_zero() {
                row_axpy(rows, r, p, &q, c);
                if let Some(u) = u.as_deref_mut() {
                    row_axpy(u, r, p, &q, 0);
                }
            }
        }
        pivots.push(c);
        p += 1;
    }
    pivots
}

/// Row-style HNF with transform.
pub fn hnf(a: &IntMatrix) -> HermiteForm {
    let m = a.rows();
    let mut rows = a.to_rows();
    let mut u = IntMatrix::identity(m).to_rows();
    let pivots = hnf_in_place(&mut rows, a.cols(), Some(&mut u));
    let rank = pivots.len();
    rows.truncate(rank);
    HermiteForm {
        h: IntMatrix::from_rows(rows, a.cols()),
        transform: IntMatrix::from_rows(u, m),
        rank,
        pivots,
    }
}

/// Canonical basis (HNF rows, zero rows dropped) of the row span of `a`.
pub fn hnf_rows(a: &IntMatrix) -> IntMatrix {
    let mut rows = a.to_rows();
    let pivots = hnf_in_place(&mut rows, a.cols(), None);
    rows.truncate(pivots.len());
    IntMatrix::from_rows(rows, a.cols())
}

/// Rank over the rationals.
pub fn rank(a: &IntMatrix) -> usize {
    let mut rows = a.to_rows();
    hnf_in_place(&mut rows, a.cols(), None).len()
}

/// Smith normal form with both transforms.
pub fn snf(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.to_rows();
    let mut u = IntMatrix::identity(m).to_rows();
    // V is kept transposed so that column operations become row operations.
    let mut vt = IntMatrix::identity(n).to_rows();
    snf_in_place(&mut d, m, n, Some((&mut u, &mut vt)));
    SmithForm {
        d: IntMatrix::from_rows(d, n),
        u: IntMatrix::from_rows(u, m),
        v: IntMatrix::from_rows(vt, n).transpose(),
    }
}

fn col_axpy(d: &mut [Vec<Int>], target: usize, src: usize, q: &Int) {
    for row in d.iter_mut() {
        if !row[src].is_zero() {
            let t = q * &row[src];
            row[target] -= t;
        }
    }
}

fn snf_in_place(
    d: &mut [Vec<Int>],
    m: usize,
    n: usize,
    mut tr: Option<(&mut Vec<Vec<Int>>, &mut Vec<Vec<Int>>)>,
) {
    let k = m.min(n);
    for t in 0..k {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[i][j].is_zero() {
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => d[i][j].magnitude() < d[bi][bj].magnitude(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
        }
        let Some((bi, bj)) = best else { return };
        swap_rc(d, t, bi, bj, &mut tr);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                row_axpy(d, i, t, &q, t);
                if let Some((u, _)) = tr.as_mut() {
                    row_axpy(u, i, t, &q, 0);
                }
                if !d[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                col_axpy(d, j, t, &q);
                if let Some((_, vt)) = tr.as_mut() {
                    row_axpy(vt, j, t, &q, 0);
                }
                if !d[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // bring the smallest entry of row t / column t to the pivot
                let mut bi = t;
                let mut bj = t;
                for i in t..m {
                    if !d[i][t].is_zero()
                        && (d[bi][bj].is_zero() || d[i][t].magnitude() < d[bi][bj].magnitude())
                    {
                        bi = i;
                        bj = t;
                    }
                }
                for j in t..n {
                    if !d[t][j].is_zero()
                        && (d[bi][bj].is_zero() || d[t][j].magnitude() < d[bi][bj].magnitude())
                    {
                        bi = t;
                        bj = j;
                    }
                }
                swap_rc(d, t, bi, bj, &mut tr);
                continue;
            }
            // divisibility condition on the trailing block
            let mut offender = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !d[i][j].is_zero() && !d[i][j].is_multiple_of(&d[t][t]) {
                        offender = Some(i);
                        break 'outer;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let minus_one = -Int::one();
                    row_axpy(d, t, i, &minus_one, t);
                    if let Some((u, _)) = tr.as_mut() {
                        row_axpy(u, t, i, &minus_one, 0);
                    }
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -std::mem::take(x);
            }
            if let Some((u, _)) = tr.as_mut() {
                for x in u[t].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
        }
    }
}

fn swap_rc(
    d: &mut [Vec<Int>],
    t: usize,
    i: usize,
    j: usize,
    tr: &mut Option<(&mut Vec<Vec<Int>>, &mut Vec<Vec<Int>>)>,
) {
    if i != t {
        d.swap(i, t);
        if let Some((u, _)) = tr.as_mut() {
            u.swap(i, t);
        }
    }
    if j != t {
        for row in d.iter_mut() {
            row.swap(j, t);
        }
        if let Some((_, vt)) = tr.as_mut() {
            vt.swap(j, t);
        }
    }
}

/// Nonzero invariant factors of `a` (no transforms are tracked).
pub fn invariant_factors(a: &IntMatrix) -> Vec<Int> {
    let h = hnf_rows(a);
    let (m, n) = (h.rows(), h.cols());
    let mut d = h.to_rows();
    snf_in_place(&mut d, m, n, None);
    (0..m.min(n))
        .map(|i| d[i][i].clone())
        .filter(|x| !x.is_zero())
        .collect()
}

/// Basis (canonical HNF rows) of the saturated left kernel `{x : x·A = 0}`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let h = hnf(a);
    let idx: Vec<usize> = (h.rank..a.rows()).collect();
    hnf_rows(&h.transform.select_rows(&idx))
}

/// Structure of a finitely generated abelian group: `⊕ Z/dᵢ ⊕ Z^free_rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AbelianInvariants {
    /// Torsion invariant factors, each `> 1`, in divisibility order.
    pub factors: Vec<Int>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty() && self.free_rank == 0
    }

    pub fn order(&self) -> Option<Int> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.factors.iter().fold(Int::one(), |acc, d| acc * d))
    }

    pub fn factors_i64(&self) -> Vec<i64> {
        self.factors
            .iter()
            .map(|d| d.to_i64().expect("invariant factor exceeds i64"))
            .collect()
    }

    /// Canonical invariants of a direct sum.
    pub fn direct_sum(&self, other: &AbelianInvariants) -> AbelianInvariants {
        let all: Vec<Int> = self.factors.iter().chain(&other.factors).cloned().collect();
        let n = all.len();
        let mut diag = IntMatrix::zeros(n, n);
        for (i, d) in all.into_iter().enumerate() {
            diag.set(i, i, d);
        }
        let mut inv = cokernel_invariants(&diag);
        inv.free_rank = self.free_rank + other.free_rank;
        inv
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `Z^rows / (column span of A)`.
pub fn cokernel_invariants(a: &IntMatrix) -> AbelianInvariants {
    let inv = invariant_factors(&a.transpose());
    let free_rank = a.rows() - inv.len();
    AbelianInvariants {
        factors: inv.into_iter().filter(|d| !d.is_one()).collect(),
        free_rank,
    }
}

/// `Z^cols / (row span of A)`: the row-convention counterpart.
pub fn row_cokernel_invariants(a: &IntMatrix) -> AbelianInvariants {
    cokernel_invariants(&a.transpose())
}

/// Solves `c · B = x` for an integer row vector `c`, where `B` has full row
/// rank. Returns `None` when `x` is not in the integer row span of `B`.
pub fn solve_row(b: &IntMatrix, x: &[Int]) -> Option<Vec<Int>> {
    let h = hnf(b);
    if h.rank != b.rows() {
        return None;
    }
    let c = solve_echelon(&h.h, &h.pivots, x)?;
    // c · H = x and H = T_top · B
    let top: Vec<usize> = (0..h.rank).collect();
    Some(h.transform.select_rows(&top).apply_row(&c))
}

/// Solves `c · H = x` where `H` is in row echelon form with the given pivot
/// columns.
pub fn solve_echelon(h: &IntMatrix, pivots: &[usize], x: &[Int]) -> Option<Vec<Int>> {
    assert_eq!(x.len(), h.cols());
    let mut rem = x.to_vec();
    let mut c = vec![Int::zero(); h.rows()];
    for (i, &p) in pivots.iter().enumerate() {
        if rem[p].is_zero() {
            continue;
        }
        let (q, r) = rem[p].div_rem(h.get(i, p));
        if !r.is_zero() {
            return None;
        }
        for j in p..h.cols() {
            let hij = h.get(i, j);
            if !hij.is_zero() {
                rem[j] -= &q * hij;
            }
        }
        c[i] = q;
    }
    if rem.iter().all(Zero::is_zero) {
        Some(c)
    } else {
        None
    }
}

/// Solves `C · B = X` row by row.
pub fn solve_rows(b: &IntMatrix, x: &IntMatrix) -> Option<IntMatrix> {
    let h = hnf(b);
    if h.rank != b.rows() {
        return None;
    }
    let top: Vec<usize> = (0..h.rank).collect();
    let t = h.transform.select_rows(&top);
    let mut out = Vec::with_capacity(x.rows());
    for i in 0..x.rows() {
        let c = solve_echelon(&h.h, &h.pivots, x.row(i))?;
        out.push(t.apply_row(&c));
    }
    Some(IntMatrix::from_rows(out, b.rows()))
}

/// Intersection of two row lattices in the same ambient space.
pub fn intersect_rows(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    // x = s·A = t·B  <=>  (s, t)·[A; -B] = 0
    let stacked = a.vstack(&b.neg());
    let k = kernel_basis(&stacked);
    let idx: Vec<usize> = (0..a.rows()).collect();
    let s = k.select_cols(&idx);
    hnf_rows(&s.mul(a))
}

/// Integer vectors of the row lattice `a` lying in the rational span of `v`.
pub fn intersect_with_span(a: &IntMatrix, v: &IntMatrix) -> IntMatrix {
    if v.rows() == 0 {
        return IntMatrix::zeros(0, a.cols());
    }
    // normal vectors of span(v)
    let normals = kernel_basis(&v.transpose()).transpose();
    if normals.cols() == 0 {
        return hnf_rows(a);
    }
    let k = kernel_basis(&a.mul(&normals));
    hnf_rows(&k.mul(a))
}

/// Saturation of the row span of `a` in `Z^cols`.
pub fn saturate(a: &IntMatrix) -> IntMatrix {
    let normals = kernel_basis(&a.transpose()).transpose();
    if normals.cols() == 0 {
        return IntMatrix::identity(a.cols());
    }
    kernel_basis(&normals)
}

/// Index of a full-rank sublattice (`sub` rows inside the lattice spanned by
/// `sup` rows); `None` if `sub` is not contained in `sup` or ranks differ.
pub fn sublattice_index(sup: &IntMatrix, sub: &IntMatrix) -> Option<Int> {
    let sup_b = hnf_rows(sup);
    let sub_b = hnf_rows(sub);
    if sup_b.rows() != sub_b.rows() {
        return None;
    }
    let coords = solve_rows(&sup_b, &sub_b)?;
    Some(coords.det().abs())
}

pub fn int(x: i64) -> Int {
    Int::from(x)
}

pub fn ints(xs: &[i64]) -> Vec<Int> {
    xs.iter().map(|&x| Int::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn snf_small_example() {
        let a = m(&[&[2, 4], &[6, 8]]);
        let s = snf(&a);
        assert_eq!(s.invariant_factors(), ints(&[2, 4]));
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
    }

    #[test]
    fn snf_identity_and_zero() {
        let s = snf(&IntMatrix::identity(3));
        assert_eq!(s.invariant_factors(), ints(&[1, 1, 1]));
        let z = IntMatrix::zeros(2, 3);
        let s = snf(&z);
        assert!(s.invariant_factors().is_empty());
        assert!(s.d.is_zero());
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(hnf(&IntMatrix::identity(2)).h, IntMatrix::identity(2));
        let h = hnf(&m(&[&[2, 0], &[1, 1]]));
        assert_eq!(h.h, m(&[&[1, 1], &[0, 2]]));
        let h = hnf(&m(&[&[0, 0]]));
        assert_eq!(h.rank, 0);
        assert_eq!(h.h.rows(), 0);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&m(&[&[1], &[1]]));
        assert_eq!(k.rows(), 1);
        assert_eq!(k.row(0)[0].clone() + k.row(0)[1].clone(), Int::zero());
        assert!(k.row(0)[0].abs().is_one());
        assert_eq!(kernel_basis(&IntMatrix::identity(3)).rows(), 0);
        assert_eq!(kernel_basis(&m(&[&[2, 0], &[0, 0]])), m(&[&[0, 1]]));
    }

    #[test]
    fn cokernel_examples() {
        let a = m(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 0]]);
        let c = cokernel_invariants(&a);
        assert_eq!(c.factors, ints(&[2]));
        assert_eq!(c.free_rank, 1);
        let c = cokernel_invariants(&IntMatrix::scalar(2, 2));
        assert_eq!(c.factors, ints(&[2, 2]));
        assert_eq!(c.free_rank, 0);
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.det(), int(1));
        let inv = a.inverse_unimodular().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(m(&[&[2, 0], &[0, 1]]).inverse_unimodular().is_none());
    }

    #[test]
    fn solve_and_intersect() {
        let b = m(&[&[2, 0], &[1, 1]]);
        let c = solve_row(&b, &ints(&[3, 1])).unwrap();
        assert_eq!(IntMatrix::row_vector(&c).mul(&b).row(0), &ints(&[3, 1])[..]);
        assert!(solve_row(&b, &ints(&[1, 0])).is_none());
        let i = intersect_rows(&m(&[&[2, 0], &[0, 1]]), &m(&[&[1, 0], &[0, 3]]));
        assert_eq!(i, m(&[&[2, 0], &[0, 3]]));
        let s = intersect_with_span(&m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), &m(&[&[2, 2, 0]]));
        assert_eq!(s, m(&[&[1, 1, 0]]));
        assert_eq!(
            sublattice_index(&IntMatrix::identity(2), &m(&[&[1, 1], &[0, 2]])),
            Some(int(2))
        );
    }
}

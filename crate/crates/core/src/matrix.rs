//! Dense square matrices over a [`FieldCtx`] and the scalar functions the
//! census needs: permanent (Laplace and Ryser), determinant, rank and the
//! permanental compound.
//!
//! The slice-level functions (`per_laplace_slice`, `det_slice`, ...) work on
//! a row-major `n*n` buffer and never allocate; the census hot loops call
//! them directly.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx};

/// Largest supported dimension.
pub const MAX_DIM: usize = 12;

/// Permanent algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerAlgo {
    /// Laplace below [`RYSER_CROSSOVER`], Ryser from there on.
    #[default]
    Auto,
    Laplace,
    Ryser,
}

/// First dimension at which `PerAlgo::Auto` switches to Ryser. Chosen from
/// `permcensus bench` timings.
pub const RYSER_CROSSOVER: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FMatrix {
    n: usize,
    entries: Vec<Fe>,
}

impl FMatrix {
    /// Builds an `n x n` matrix from row-major entries, checking that every
    /// entry belongs to `f`.
    pub fn new(f: &FieldCtx, n: usize, entries: Vec<Fe>) -> Result<Self> {
        check_dim(n)?;
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|e| !f.contains(**e)) {
            return Err(Error::PreconditionViolated(format!(
                "entry index {} is outside GF({})",
                bad.index(),
                f.q()
            )));
        }
        Ok(FMatrix { n, entries })
    }

    pub(crate) fn from_raw(n: usize, entries: Vec<Fe>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        FMatrix { n, entries }
    }

    pub fn from_ints(f: &FieldCtx, rows: &[&[i64]]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            entries.extend(r.iter().map(|&v| f.from_int(v)));
        }
        FMatrix::new(f, n, entries)
    }

    pub fn zeros(n: usize) -> Self {
        FMatrix {
            n,
            entries: vec![Fe::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = FMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    /// `I_r ⊕ 0_{n-r}`.
    pub fn rank_canonical(n: usize, r: usize) -> Self {
        let mut m = FMatrix::zeros(n);
        for i in 0..r.min(n) {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Fe] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// `A_ij`: delete row `i` and column `j`.
    pub fn minor(&self, i: usize, j: usize) -> FMatrix {
        self.delete(&[i], &[j])
    }

    /// Deletes the given rows and columns (which must be equal in number).
    pub fn delete(&self, rows: &[usize], cols: &[usize]) -> FMatrix {
        assert_eq!(rows.len(), cols.len(), "non-square deletion");
        let m = self.n - rows.len();
        let mut entries = Vec::with_capacity(m * m);
        for i in (0..self.n).filter(|i| !rows.contains(i)) {
            for j in (0..self.n).filter(|j| !cols.contains(j)) {
                entries.push(self.get(i, j));
            }
        }
        FMatrix { n: m, entries }
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &FMatrix) -> FMatrix {
        let n = self.n + other.n;
        let mut m = FMatrix::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                m.set(self.n + i, self.n + j, other.get(i, j));
            }
        }
        m
    }

    pub fn transpose(&self) -> FMatrix {
        let mut m = FMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    pub fn scale_row(&self, f: &FieldCtx, i: usize, by: Fe) -> FMatrix {
        let mut m = self.clone();
        for j in 0..self.n {
            m.set(i, j, f.mul(by, self.get(i, j)));
        }
        m
    }

    pub fn mul(&self, f: &FieldCtx, other: &FMatrix) -> FMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut m = FMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Fe::ZERO;
                for t in 0..n {
                    acc = f.add(acc, f.mul(self.get(i, t), other.get(t, j)));
                }
                m.set(i, j, acc);
            }
        }
        m
    }

    /// Parses `"1,2,0;0,1,1;2,2,1"`. Extension-field entries may be written
    /// as coefficient tuples, e.g. `"(1,2),0;1,(0,1)"`.
    pub fn parse(f: &FieldCtx, s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.trim().split(';').collect();
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            let cells = split_top_level(row);
            if cells.len() != n {
                return Err(Error::Parse(format!(
                    "row {row:?} has {} entries, expected {n}",
                    cells.len()
                )));
            }
            for c in cells {
                entries.push(f.parse_element(c)?);
            }
        }
        FMatrix::new(f, n, entries)
    }

    pub fn display<'a>(&'a self, f: &'a FieldCtx) -> MatrixDisplay<'a> {
        MatrixDisplay { m: self, f }
    }
}

fn split_top_level(row: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in row.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(row[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(row[start..].trim());
    out
}

/// Formats a matrix in the literal syntax accepted by [`FMatrix::parse`].
pub struct MatrixDisplay<'a> {
    m: &'a FMatrix,
    f: &'a FieldCtx,
}

impl fmt::Display for MatrixDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.m.n {
            if i > 0 {
                write!(out, ";")?;
            }
            for j in 0..self.m.n {
                if j > 0 {
                    write!(out, ",")?;
                }
                write!(out, "{}", self.f.format(self.m.get(i, j)))?;
            }
        }
        Ok(())
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::PreconditionViolated(format!(
            "dimension {n} outside 1..={MAX_DIM}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Permanent
// ---------------------------------------------------------------------------

/// Laplace expansion along the first remaining row. Rows in `skip_row` and
/// columns set in `used` are treated as deleted; the permanent of the empty
/// matrix is 1.
fn laplace(f: &FieldCtx, a: &[Fe], n: usize, row: usize, skip_row: usize, used: u32) -> Fe {
    let row = if row == skip_row { row + 1 } else { row };
    if row >= n {
        return Fe::ONE;
    }
    let mut acc = Fe::ZERO;
    for j in 0..n {
        if used & (1 << j) != 0 {
            continue;
        }
        let x = a[row * n + j];
        if x.is_zero() {
            continue;
        }
        let sub = laplace(f, a, n, row + 1, skip_row, used | (1 << j));
        acc = f.add(acc, f.mul(x, sub));
    }
    acc
}

pub fn per_laplace_slice(f: &FieldCtx, a: &[Fe], n: usize) -> Fe {
    laplace(f, a, n, 0, usize::MAX, 0)
}

/// `per A_ij` without materialising the minor.
pub fn per_minor_slice(f: &FieldCtx, a: &[Fe], n: usize, i: usize, j: usize) -> Fe {
    laplace(f, a, n, 0, i, 1 << j)
}

/// Ryser's inclusion-exclusion formula, visiting column subsets in Gray
/// code order so each step adds or removes a single column from the row
/// sums. The `(-1)^(n-|S|)` weight becomes a field negation.
pub fn per_ryser_slice(f: &FieldCtx, a: &[Fe], n: usize) -> Fe {
    debug_assert!((1..=MAX_DIM).contains(&n));
    let mut sums = [Fe::ZERO; MAX_DIM];
    let mut acc = Fe::ZERO;
    let mut gray = 0u32;
    for g in 1u32..(1 << n) {
        let j = g.trailing_zeros() as usize;
        gray ^= 1 << j;
        let adding = gray & (1 << j) != 0;
        for (i, s) in sums[..n].iter_mut().enumerate() {
            let x = a[i * n + j];
            *s = if adding { f.add(*s, x) } else { f.sub(*s, x) };
        }
        let mut prod = sums[0];
        for s in &sums[1..n] {
            if prod.is_zero() {
                break;
            }
            prod = f.mul(prod, *s);
        }
        if (n - gray.count_ones() as usize) % 2 == 1 {
            acc = f.sub(acc, prod);
        } else {
            acc = f.add(acc, prod);
        }
    }
    acc
}

pub fn per_slice(f: &FieldCtx, a: &[Fe], n: usize, algo: PerAlgo) -> Fe {
    match algo {
        PerAlgo::Laplace => per_laplace_slice(f, a, n),
        PerAlgo::Ryser => per_ryser_slice(f, a, n),
        PerAlgo::Auto if n < RYSER_CROSSOVER => per_laplace_slice(f, a, n),
        PerAlgo::Auto => per_ryser_slice(f, a, n),
    }
}

pub fn per_laplace(f: &FieldCtx, a: &FMatrix) -> Fe {
    per_laplace_slice(f, &a.entries, a.n)
}

pub fn per_ryser(f: &FieldCtx, a: &FMatrix) -> Fe {
    per_ryser_slice(f, &a.entries, a.n)
}

pub fn per(f: &FieldCtx, a: &FMatrix) -> Fe {
    per_slice(f, &a.entries, a.n, PerAlgo::Auto)
}

/// Permanental compound: entry `(i, j)` is `per A_ij`. A `1 x 1` matrix has
/// compound `[1]`, the permanent of the empty minor.
pub fn per_compound(f: &FieldCtx, a: &FMatrix) -> FMatrix {
    let n = a.n;
    let mut out = vec![Fe::ZERO; n * n];
    per_compound_into(f, &a.entries, n, &mut out);
    FMatrix::from_raw(n, out)
}

pub fn per_compound_into(f: &FieldCtx, a: &[Fe], n: usize, out: &mut [Fe]) {
    if n <= RYSER_CROSSOVER {
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = per_minor_slice(f, a, n, i, j);
            }
        }
        return;
    }
    let m = n - 1;
    let mut buf = [Fe::ZERO; MAX_DIM * MAX_DIM];
    for i in 0..n {
        for j in 0..n {
            let mut t = 0;
            for r in (0..n).filter(|&r| r != i) {
                for c in (0..n).filter(|&c| c != j) {
                    buf[t] = a[r * n + c];
                    t += 1;
                }
            }
            out[i * n + j] = per_ryser_slice(f, &buf[..m * m], m);
        }
    }
}

// ---------------------------------------------------------------------------
// Determinant and rank
// ---------------------------------------------------------------------------

/// Gaussian elimination, pivoting on the first nonzero entry of each column.
pub fn det_slice(f: &FieldCtx, a: &[Fe], n: usize) -> Fe {
    let mut m = [Fe::ZERO; MAX_DIM * MAX_DIM];
    m[..n * n].copy_from_slice(&a[..n * n]);
    let mut negate = false;
    let mut acc = Fe::ONE;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !m[r * n + c].is_zero()) else {
            return Fe::ZERO;
        };
        if r != c {
            for t in c..n {
                m.swap(r * n + t, c * n + t);
            }
            negate = !negate;
        }
        let pivot = m[c * n + c];
        acc = f.mul(acc, pivot);
        let pinv = f.inv_nonzero(pivot);
        for r in c + 1..n {
            let x = m[r * n + c];
            if x.is_zero() {
                continue;
            }
            let factor = f.mul(x, pinv);
            for t in c..n {
                let v = f.sub(m[r * n + t], f.mul(factor, m[c * n + t]));
                m[r * n + t] = v;
            }
        }
    }
    if negate {
        f.neg(acc)
    } else {
        acc
    }
}

pub fn det(f: &FieldCtx, a: &FMatrix) -> Fe {
    det_slice(f, &a.entries, a.n)
}

/// Row-echelon rank of a `rows x cols` row-major buffer.
pub fn rank_rect(f: &FieldCtx, a: &[Fe], rows: usize, cols: usize) -> usize {
    assert_eq!(a.len(), rows * cols);
    let mut m = a.to_vec();
    rank_in_place(f, &mut m, rows, cols)
}

fn rank_in_place(f: &FieldCtx, m: &mut [Fe], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(r) = (rank..rows).find(|&r| !m[r * cols + c].is_zero()) else {
            continue;
        };
        if r != rank {
            for t in 0..cols {
                m.swap(r * cols + t, rank * cols + t);
            }
        }
        let pinv = f.inv_nonzero(m[rank * cols + c]);
        for r in rank + 1..rows {
            let x = m[r * cols + c];
            if x.is_zero() {
                continue;
            }
            let factor = f.mul(x, pinv);
            for t in c..cols {
                let v = f.sub(m[r * cols + t], f.mul(factor, m[rank * cols + t]));
                m[r * cols + t] = v;
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of a square `n x n` buffer without allocating.
pub fn rank_square_slice(f: &FieldCtx, a: &[Fe], n: usize) -> usize {
    let mut m = [Fe::ZERO; MAX_DIM * MAX_DIM];
    m[..n * n].copy_from_slice(&a[..n * n]);
    rank_in_place(f, &mut m[..n * n], n, n)
}

pub fn rank(f: &FieldCtx, a: &FMatrix) -> usize {
    rank_square_slice(f, &a.entries, a.n)
}

/// `x^T A y = 0`?
pub fn bilinear_zero(f: &FieldCtx, x: &[Fe], a: &FMatrix, y: &[Fe]) -> Result<bool> {
    for v in [x, y] {
        if v.len() != a.n {
            return Err(Error::DimensionMismatch {
                expected: a.n,
                found: v.len(),
            });
        }
    }
    Ok(bilinear_form(f, x, &a.entries, y).is_zero())
}

pub(crate) fn bilinear_form(f: &FieldCtx, x: &[Fe], a: &[Fe], y: &[Fe]) -> Fe {
    let k = x.len();
    let mut acc = Fe::ZERO;
    for (i, &xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let mut row = Fe::ZERO;
        for (j, &yj) in y.iter().enumerate() {
            row = f.add(row, f.mul(a[i * k + j], yj));
        }
        acc = f.add(acc, f.mul(xi, row));
    }
    acc
}

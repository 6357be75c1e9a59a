use std::fmt;

use serde::{Deserialize, Serialize};

use crate::int::Int;

static ZERO: Int = Int::ZERO;

/// Integer matrix stored as sorted sparse rows. Acts on column vectors: an
/// `r × c` matrix is a map `ℤ^c → ℤ^r`.
///
/// Rows never hold explicit zeros, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Int)>>,
}

/// `a += k·b` on sorted sparse rows.
pub(crate) fn axpy_row(a: &mut Vec<(usize, Int)>, k: &Int, b: &[(usize, Int)]) {
    if k.is_zero() || b.is_empty() {
        return;
    }
    let old = std::mem::take(a);
    let mut out = Vec::with_capacity(old.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < old.len() || j < b.len() {
        if j == b.len() || (i < old.len() && old[i].0 < b[j].0) {
            out.push(old[i].clone());
            i += 1;
        } else if i == old.len() || b[j].0 < old[i].0 {
            out.push((b[j].0, &b[j].1 * k));
            j += 1;
        } else {
            let v = &old[i].1 + &(&b[j].1 * k);
            if !v.is_zero() {
                out.push((old[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    *a = out;
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix { rows: n, cols: n, data: (0..n).map(|i| vec![(i, Int::ONE)]).collect() }
    }

    /// From dense row-major entries.
    pub fn from_rows<T: Into<Int> + Copy>(rows: usize, cols: usize, entries: &[T]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows * cols");
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let v: Int = entries[r * cols + c].into();
                if !v.is_zero() {
                    m.data[r].push((c, v));
                }
            }
        }
        m
    }

    /// From nested dense rows; `cols` is needed to express `r × 0` shapes.
    pub fn from_nested(rows: &[Vec<Int>], cols: usize) -> Option<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let data = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.clone())).collect())
            .collect();
        Some(IntMatrix { rows: rows.len(), cols, data })
    }

    /// From `(row, col, value)` triples; repeated positions are summed.
    pub fn from_triplets(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, Int)>) -> Self {
        let mut buckets: Vec<Vec<(usize, Int)>> = vec![Vec::new(); rows];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            if !v.is_zero() {
                buckets[r].push((c, v));
            }
        }
        let data = buckets
            .into_iter()
            .map(|mut row| {
                row.sort_by_key(|e| e.0);
                let mut out: Vec<(usize, Int)> = Vec::with_capacity(row.len());
                for (c, v) in row {
                    match out.last_mut() {
                        Some(last) if last.0 == c => last.1 += &v,
                        _ => out.push((c, v)),
                    }
                }
                out.retain(|e| !e.1.is_zero());
                out
            })
            .collect();
        IntMatrix { rows, cols, data }
    }

    /// From sorted sparse rows without explicit zeros.
    pub(crate) fn from_sparse_rows(cols: usize, data: Vec<Vec<(usize, Int)>>) -> Self {
        debug_assert!(data.iter().all(|r| r.windows(2).all(|w| w[0].0 < w[1].0)));
        debug_assert!(data.iter().flatten().all(|e| e.0 < cols && !e.1.is_zero()));
        IntMatrix { rows: data.len(), cols, data }
    }

    pub fn diag(entries: &[Int]) -> Self {
        let n = entries.len();
        let data = entries.iter().enumerate().map(|(i, e)| if e.is_zero() { vec![] } else { vec![(i, e.clone())] }).collect();
        IntMatrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &Int {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) outside {}x{}", self.rows, self.cols);
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(k) => &self.data[r][k].1,
            Err(_) => &ZERO,
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: Int) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) outside {}x{}", self.rows, self.cols);
        let row = &mut self.data[r];
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(k) => {
                if v.is_zero() {
                    row.remove(k);
                } else {
                    row[k].1 = v;
                }
            }
            Err(k) => {
                if !v.is_zero() {
                    row.insert(k, (c, v));
                }
            }
        }
    }

    /// `self[r, c] += v`.
    pub fn add_at(&mut self, r: usize, c: usize, v: &Int) {
        if v.is_zero() {
            return;
        }
        let cur = self.get(r, c) + v;
        self.set(r, c, cur);
    }

    /// Nonzero entries of row `r`, sorted by column.
    pub fn row_entries(&self, r: usize) -> &[(usize, Int)] {
        &self.data[r]
    }

    pub(crate) fn into_sparse_rows(self) -> Vec<Vec<(usize, Int)>> {
        self.data
    }

    /// All nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Int)> + '_ {
        self.data.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn row_dense(&self, r: usize) -> Vec<Int> {
        let mut v = vec![Int::ZERO; self.cols];
        for (c, x) in &self.data[r] {
            v[*c] = x.clone();
        }
        v
    }

    pub fn column(&self, c: usize) -> Vec<Int> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_nested(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|r| self.row_dense(r)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<Vec<(usize, Int)>> = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                data[*c].push((r, v.clone()));
            }
        }
        IntMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn neg(&self) -> Self {
        self.map_entries(|x| -x)
    }

    pub fn scale(&self, k: &Int) -> Self {
        if k.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        self.map_entries(|x| x * k)
    }

    fn map_entries(&self, f: impl Fn(&Int) -> Int) -> Self {
        let data = self.data.iter().map(|row| row.iter().map(|(c, v)| (*c, f(v))).collect()).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in add");
        let mut out = self.clone();
        for (r, row) in other.data.iter().enumerate() {
            axpy_row(&mut out.data[r], &Int::ONE, row);
        }
        out
    }

    pub fn sub(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sub");
        let mut out = self.clone();
        let m1 = -Int::ONE;
        for (r, row) in other.data.iter().enumerate() {
            axpy_row(&mut out.data[r], &m1, row);
        }
        out
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul: {:?} · {:?}", self.shape(), other.shape());
        let mut acc: Vec<Int> = vec![Int::ZERO; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; other.cols];
        let mut data = Vec::with_capacity(self.rows);
        for row in &self.data {
            for (k, a) in row {
                for (j, b) in &other.data[*k] {
                    if !mark[*j] {
                        mark[*j] = true;
                        touched.push(*j);
                    }
                    let p = a * b;
                    acc[*j] += &p;
                }
            }
            touched.sort_unstable();
            let mut out = Vec::with_capacity(touched.len());
            for &j in &touched {
                let v = std::mem::take(&mut acc[j]);
                mark[j] = false;
                if !v.is_zero() {
                    out.push((j, v));
                }
            }
            touched.clear();
            data.push(out);
        }
        IntMatrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        self.data
            .iter()
            .map(|row| {
                let mut acc = Int::ZERO;
                for (c, a) in row {
                    if !v[*c].is_zero() {
                        acc += &(a * &v[*c]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Sub-matrix with the given row and column index lists (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut pos: Vec<Vec<usize>> = vec![Vec::new(); self.cols];
        for (j, &c) in cols.iter().enumerate() {
            pos[c].push(j);
        }
        let data = rows
            .iter()
            .map(|&r| {
                let mut out: Vec<(usize, Int)> = Vec::new();
                for (c, v) in &self.data[r] {
                    for &j in &pos[*c] {
                        out.push((j, v.clone()));
                    }
                }
                out.sort_by_key(|e| e.0);
                out
            })
            .collect();
        IntMatrix { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let all: Vec<usize> = (0..self.rows).collect();
        self.select(&all, cols)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let data = rows.iter().map(|&r| self.data[r].clone()).collect();
        IntMatrix { rows: rows.len(), cols: self.cols, data }
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, d: &IntMatrix) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        Self::vstack(&Self::hstack(a, b), &Self::hstack(c, d))
    }

    pub fn hstack(a: &IntMatrix, b: &IntMatrix) -> Self {
        assert_eq!(a.rows, b.rows);
        let data = a
            .data
            .iter()
            .zip(&b.data)
            .map(|(ra, rb)| ra.iter().cloned().chain(rb.iter().map(|(c, v)| (c + a.cols, v.clone()))).collect())
            .collect();
        IntMatrix { rows: a.rows, cols: a.cols + b.cols, data }
    }

    pub fn vstack(a: &IntMatrix, b: &IntMatrix) -> Self {
        assert_eq!(a.cols, b.cols);
        let data = a.data.iter().chain(&b.data).cloned().collect();
        IntMatrix { rows: a.rows + b.rows, cols: a.cols, data }
    }

    /// Adds `src` into `self` with top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, src: &IntMatrix) {
        assert!(r0 + src.rows <= self.rows && c0 + src.cols <= self.cols);
        for (r, row) in src.data.iter().enumerate() {
            let shifted: Vec<(usize, Int)> = row.iter().map(|(c, v)| (c + c0, v.clone())).collect();
            axpy_row(&mut self.data[r0 + r], &Int::ONE, &shifted);
        }
    }

    /// Kronecker product.
    pub fn kron(a: &IntMatrix, b: &IntMatrix) -> Self {
        let mut data = Vec::with_capacity(a.rows * b.rows);
        for ra in &a.data {
            for rb in &b.data {
                let mut out = Vec::with_capacity(ra.len() * rb.len());
                for (j, x) in ra {
                    for (l, y) in rb {
                        out.push((j * b.cols + l, x * y));
                    }
                }
                data.push(out);
            }
        }
        IntMatrix { rows: a.rows * b.rows, cols: a.cols * b.cols, data }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    /// `row[dst] += k · row[src]`.
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, k: &Int) {
        assert_ne!(dst, src);
        let s = std::mem::take(&mut self.data[src]);
        axpy_row(&mut self.data[dst], k, &s);
        self.data[src] = s;
    }

    pub fn negate_row(&mut self, r: usize) {
        for e in &mut self.data[r] {
            e.1 = -&e.1;
        }
    }

    /// Replaces rows `(i, j)` by `(a·ri + b·rj, c·ri + d·rj)`.
    pub fn combine_rows(&mut self, i: usize, j: usize, coef: [&Int; 4]) {
        let [a, b, c, d] = coef;
        let ri = std::mem::take(&mut self.data[i]);
        let rj = std::mem::take(&mut self.data[j]);
        let mut ni = Vec::new();
        axpy_row(&mut ni, a, &ri);
        axpy_row(&mut ni, b, &rj);
        let mut nj = Vec::new();
        axpy_row(&mut nj, c, &ri);
        axpy_row(&mut nj, d, &rj);
        self.data[i] = ni;
        self.data[j] = nj;
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::ONE;
        }
        let mut a = self.to_nested();
        let mut sign = Int::ONE;
        let mut prev = Int::ONE;
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Int::ZERO,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = v.div_exact(&prev);
                }
            }
            prev = a[k][k].clone();
        }
        &sign * &a[n - 1][n - 1]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for (c, v) in self.row_dense(r).iter().enumerate() {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v}")?;
            }
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Int>>,
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr { rows: self.rows, cols: self.cols, entries: self.to_nested() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        if r.entries.len() != r.rows {
            return Err(serde::de::Error::custom(format!("matrix declares {} rows, found {}", r.rows, r.entries.len())));
        }
        IntMatrix::from_nested(&r.entries, r.cols)
            .ok_or_else(|| serde::de::Error::custom(format!("every row must have {} entries", r.cols)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = IntMatrix::from_rows(2, 3, &[1, 2, 3, 4, 5, 6]);
        let b = IntMatrix::from_rows(3, 1, &[1, 0, -1]);
        assert_eq!(a.mul(&b), IntMatrix::from_rows(2, 1, &[-2, -2]));
        assert_eq!(a.transpose().transpose(), a);
        let z = IntMatrix::zeros(2, 0).mul(&IntMatrix::zeros(0, 4));
        assert_eq!(z, IntMatrix::zeros(2, 4));
        let c = IntMatrix::from_rows(2, 2, &[1, -1, 1, 1]);
        assert_eq!(c.mul(&c), IntMatrix::from_rows(2, 2, &[0, -2, 2, 0]));
    }

    #[test]
    fn sparse_edits() {
        let mut m = IntMatrix::zeros(2, 3);
        m.set(1, 2, Int::from(5));
        m.add_at(1, 2, &Int::from(-5));
        assert!(m.is_zero());
        assert_eq!(m, IntMatrix::zeros(2, 3));
        let t = IntMatrix::from_triplets(2, 2, [(0, 1, Int::from(2)), (0, 1, Int::from(-2)), (1, 0, Int::from(3))]);
        assert_eq!(t, IntMatrix::from_rows(2, 2, &[0, 0, 3, 0]));
        let s = IntMatrix::from_rows(2, 3, &[1, 2, 3, 4, 5, 6]).select(&[1], &[2, 0]);
        assert_eq!(s, IntMatrix::from_rows(1, 2, &[6, 4]));
    }

    #[test]
    fn determinants() {
        assert_eq!(IntMatrix::from_rows(2, 2, &[2, 1, 7, 4]).determinant(), Int::from(1));
        assert_eq!(IntMatrix::from_rows(3, 3, &[0, 1, 2, 1, 0, 3, 4, -3, 8]).determinant(), Int::from(-2));
        assert_eq!(IntMatrix::from_rows(2, 2, &[2, 4, 4, 8]).determinant(), Int::ZERO);
    }
}

//! Smith normal form with optional transform tracking.
//!
//! Elimination runs on sparse rows with logical pivots: a pivot `(i, j)` is
//! never moved, its row and column are cleared and retired. Pivots found this
//! way need not form a divisibility chain; a final pass replaces offending
//! pairs `(a, b)` by `(gcd, lcm)` with explicit 2×2 unimodular transforms.

use crate::int::Int;
use crate::intlin::matrix::{axpy_row, IntMatrix};

/// Which change-of-basis matrices to accumulate during reduction.
#[derive(Clone, Copy, Debug, Default)]
pub struct Track {
    pub u: bool,
    pub u_inv: bool,
    pub v: bool,
}

impl Track {
    pub const NONE: Track = Track { u: false, u_inv: false, v: false };
    pub const ALL: Track = Track { u: true, u_inv: true, v: true };
}

/// Result of a reduction `U·A·V = D`.
///
/// Untracked transforms are left as empty `0 × 0` matrices.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    /// Nonzero diagonal entries `d_1 | d_2 | … | d_r`, all positive.
    pub diag: Vec<Int>,
    pub rows: usize,
    pub cols: usize,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn d(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.rows, self.cols);
        for (i, x) in self.diag.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }
}

type Row = Vec<(usize, Int)>;

fn lookup(row: &Row, c: usize) -> Option<&Int> {
    row.binary_search_by_key(&c, |e| e.0).ok().map(|k| &row[k].1)
}

fn identity_rows(n: usize) -> Vec<Row> {
    (0..n).map(|i| vec![(i, Int::ONE)]).collect()
}

struct Reducer {
    a: Vec<Row>,
    /// Rows of `U`.
    u: Option<Vec<Row>>,
    /// Rows of `U⁻¹ᵀ`.
    ut: Option<Vec<Row>>,
    /// Rows of `Vᵀ`.
    vt: Option<Vec<Row>>,
    col_active: Vec<bool>,
    active_rows: Vec<usize>,
}

fn row_axpy(rows: &mut [Row], dst: usize, src: usize, q: &Int) {
    let s = std::mem::take(&mut rows[src]);
    axpy_row(&mut rows[dst], q, &s);
    rows[src] = s;
}

impl Reducer {
    /// `row[dst] += q·row[src]`.
    fn row_add(&mut self, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        row_axpy(&mut self.a, dst, src, q);
        if let Some(u) = &mut self.u {
            row_axpy(u, dst, src, q);
        }
        if let Some(ut) = &mut self.ut {
            row_axpy(ut, src, dst, &-q);
        }
    }

    /// `col[dst] += q·col[src]` where column `src` is zero outside row `i`.
    fn col_add_clean(&mut self, dst: usize, src: usize, i: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        let v = lookup(&self.a[i], src).expect("pivot entry") * q;
        axpy_row(&mut self.a[i], &Int::ONE, &[(dst, v)]);
        if let Some(vt) = &mut self.vt {
            row_axpy(vt, dst, src, q);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for e in &mut self.a[i] {
            e.1 = -&e.1;
        }
        if let Some(u) = &mut self.u {
            for e in &mut u[i] {
                e.1 = -&e.1;
            }
        }
        if let Some(ut) = &mut self.ut {
            for e in &mut ut[i] {
                e.1 = -&e.1;
            }
        }
    }

    /// Smallest-magnitude active entry; ties go to the lowest row, then column.
    fn find_pivot(&mut self) -> Option<(usize, usize)> {
        let a = &self.a;
        self.active_rows.retain(|&r| !a[r].is_empty());
        let mut best: Option<(usize, usize, &Int)> = None;
        for &r in &self.active_rows {
            for (c, x) in &a[r] {
                if !self.col_active[*c] {
                    continue;
                }
                if x.is_unit() {
                    return Some((r, *c));
                }
                match best {
                    Some((br, bc, bx)) => {
                        let ord = x.cmp_abs(bx);
                        if ord.is_lt() || (ord.is_eq() && (r, *c) < (br, bc)) {
                            best = Some((r, *c, x));
                        }
                    }
                    None => best = Some((r, *c, x)),
                }
            }
        }
        best.map(|(r, c, _)| (r, c))
    }

    /// Clears row `i` and column `j` around the pivot; returns the final pivot position.
    fn clear_cross(&mut self, mut i: usize, mut j: usize) -> (usize, usize) {
        loop {
            let p = lookup(&self.a[i], j).expect("pivot entry").clone();
            let mut dirty = false;
            let rows: Vec<usize> = self.active_rows.clone();
            for r in rows {
                if r == i {
                    continue;
                }
                let Some(x) = lookup(&self.a[r], j) else { continue };
                let (q, rem) = x.div_mod_floor(&p);
                self.row_add(r, i, &-q);
                if !rem.is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                i = self.smallest_in_col(j);
                continue;
            }
            let entries: Vec<(usize, Int)> = self.a[i].iter().filter(|e| e.0 != j).cloned().collect();
            for (l, x) in entries {
                debug_assert!(self.col_active[l]);
                let (q, rem) = x.div_mod_floor(&p);
                self.col_add_clean(l, j, i, &-q);
                if !rem.is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                j = self.smallest_in_row(i);
                continue;
            }
            return (i, j);
        }
    }

    fn smallest_in_col(&self, j: usize) -> usize {
        let mut best: Option<(usize, &Int)> = None;
        for &r in &self.active_rows {
            if let Some(x) = lookup(&self.a[r], j) {
                match best {
                    Some((br, bx)) if !(x.cmp_abs(bx).is_lt() || (x.cmp_abs(bx).is_eq() && r < br)) => {}
                    _ => best = Some((r, x)),
                }
            }
        }
        best.expect("column has a nonzero entry").0
    }

    fn smallest_in_row(&self, i: usize) -> usize {
        let mut best: Option<(usize, &Int)> = None;
        for (c, x) in &self.a[i] {
            match best {
                Some((_, bx)) if !x.cmp_abs(bx).is_lt() => {}
                _ => best = Some((*c, x)),
            }
        }
        best.expect("row has a nonzero entry").0
    }
}

/// Full reduction with the requested transforms tracked.
pub fn snf_with(a: &IntMatrix, track: Track) -> Snf {
    let (r, c) = a.shape();
    let mut red = Reducer {
        a: a.clone().into_sparse_rows(),
        u: track.u.then(|| identity_rows(r)),
        ut: track.u_inv.then(|| identity_rows(r)),
        vt: track.v.then(|| identity_rows(c)),
        col_active: vec![true; c],
        active_rows: (0..r).collect(),
    };
    let mut pivots: Vec<(usize, usize, Int)> = Vec::new();
    while let Some((i0, j0)) = red.find_pivot() {
        let (i, j) = red.clear_cross(i0, j0);
        if lookup(&red.a[i], j).expect("pivot entry").is_negative() {
            red.negate_row(i);
        }
        let p = lookup(&red.a[i], j).expect("pivot entry").clone();
        pivots.push((i, j, p));
        red.col_active[j] = false;
        red.active_rows.retain(|&x| x != i);
    }

    // Units first, then the divisibility pass over the rest.
    let (mut order, rest): (Vec<_>, Vec<_>) = pivots.into_iter().partition(|p| p.2.is_one());
    let start = order.len();
    order.extend(rest);
    for x in start..order.len() {
        for y in x + 1..order.len() {
            let (a, b) = (order[x].2.clone(), order[y].2.clone());
            if b.is_multiple_of(&a) {
                continue;
            }
            let (g, s, t) = a.ext_gcd(&b);
            let alpha = a.div_exact(&g);
            let beta = b.div_exact(&g);
            let (i1, j1, i2, j2) = (order[x].0, order[x].1, order[y].0, order[y].1);
            let tb = &t * &beta;
            // row i1 += row i2; (col j1, col j2) ← (s·c1 + t·c2, −β·c1 + α·c2); row i2 −= tβ·row i1
            if let Some(u) = &mut red.u {
                row_axpy(u, i1, i2, &Int::ONE);
                row_axpy(u, i2, i1, &-&tb);
            }
            if let Some(ut) = &mut red.ut {
                row_axpy(ut, i2, i1, &-Int::ONE);
                row_axpy(ut, i1, i2, &tb);
            }
            if let Some(vt) = &mut red.vt {
                let (r1, r2) = (std::mem::take(&mut vt[j1]), std::mem::take(&mut vt[j2]));
                let mut n1 = Vec::new();
                axpy_row(&mut n1, &s, &r1);
                axpy_row(&mut n1, &t, &r2);
                let mut n2 = Vec::new();
                axpy_row(&mut n2, &-&beta, &r1);
                axpy_row(&mut n2, &alpha, &r2);
                vt[j1] = n1;
                vt[j2] = n2;
            }
            order[x].2 = g;
            order[y].2 = &alpha * &b;
        }
    }

    let mut row_order: Vec<usize> = order.iter().map(|p| p.0).collect();
    let mut col_order: Vec<usize> = order.iter().map(|p| p.1).collect();
    let mut used_r = vec![false; r];
    let mut used_c = vec![false; c];
    row_order.iter().for_each(|&i| used_r[i] = true);
    col_order.iter().for_each(|&j| used_c[j] = true);
    row_order.extend((0..r).filter(|&i| !used_r[i]));
    col_order.extend((0..c).filter(|&j| !used_c[j]));

    let permute = |rows: Vec<Row>, ord: &[usize], width: usize| {
        let mut rows: Vec<Option<Row>> = rows.into_iter().map(Some).collect();
        let picked: Vec<Row> = ord.iter().map(|&k| rows[k].take().expect("permutation")).collect();
        IntMatrix::from_sparse_rows(width, picked)
    };
    let empty = || IntMatrix::zeros(0, 0);
    Snf {
        u: red.u.map_or_else(empty, |u| permute(u, &row_order, r)),
        u_inv: red.ut.map_or_else(empty, |ut| permute(ut, &row_order, r).transpose()),
        v: red.vt.map_or_else(empty, |vt| permute(vt, &col_order, c).transpose()),
        diag: order.into_iter().map(|p| p.2).collect(),
        rows: r,
        cols: c,
    }
}

/// Returns `(U, D, V)` with `U·A·V = D`, `U` and `V` unimodular, `D` diagonal with
/// each diagonal entry dividing the next.
pub fn smith_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let s = snf_with(a, Track { u: true, u_inv: false, v: true });
    let d = s.d();
    (s.u, d, s.v)
}

/// Nonzero invariant factors only.
pub fn invariant_factors(a: &IntMatrix) -> Vec<Int> {
    if a.is_zero() {
        return Vec::new();
    }
    snf_with(a, Track::NONE).diag
}

pub fn rank(a: &IntMatrix) -> usize {
    invariant_factors(a).len()
}

/// Basis of `ker A ⊆ ℤ^cols`, as the columns of the returned matrix.
pub fn kernel(a: &IntMatrix) -> IntMatrix {
    let s = snf_with(a, Track { u: false, u_inv: false, v: true });
    let idx: Vec<usize> = (s.rank()..a.cols()).collect();
    s.v.select_cols(&idx)
}

/// Basis of the saturation of `im A ⊆ ℤ^rows`, as columns.
pub fn saturated_image(a: &IntMatrix) -> IntMatrix {
    let s = snf_with(a, Track { u: false, u_inv: true, v: false });
    let idx: Vec<usize> = (0..s.rank()).collect();
    s.u_inv.select_cols(&idx)
}

/// An integer solution of `A·x = b`, if one exists.
pub fn solve(a: &IntMatrix, b: &[Int]) -> Option<Vec<Int>> {
    let s = snf_with(a, Track { u: true, u_inv: false, v: true });
    solve_with(&s, b)
}

/// Solves against a precomputed reduction (needs `u` and `v` tracked).
pub fn solve_with(s: &Snf, b: &[Int]) -> Option<Vec<Int>> {
    assert_eq!(b.len(), s.rows);
    let y = s.u.mul_vec(b);
    let mut z = vec![Int::ZERO; s.cols];
    for (i, yi) in y.iter().enumerate() {
        if i < s.rank() {
            if !yi.is_multiple_of(&s.diag[i]) {
                return None;
            }
            z[i] = yi.div_exact(&s.diag[i]);
        } else if !yi.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&z))
}

/// Solves `A·X = B`.
pub fn solve_matrix(a: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(a.rows(), b.rows());
    let s = snf_with(a, Track { u: true, u_inv: false, v: true });
    solve_matrix_with(&s, b)
}

pub fn solve_matrix_with(s: &Snf, b: &IntMatrix) -> Option<IntMatrix> {
    // Y = U·B, then Z = Y / D row-wise, X = V·Z.
    let y = s.u.mul(b);
    let mut z_rows: Vec<Vec<(usize, Int)>> = Vec::with_capacity(s.cols);
    for i in 0..y.rows() {
        let row = y.row_entries(i);
        if i < s.rank() {
            let d = &s.diag[i];
            let mut out = Vec::with_capacity(row.len());
            for (c, v) in row {
                if !v.is_multiple_of(d) {
                    return None;
                }
                out.push((*c, v.div_exact(d)));
            }
            z_rows.push(out);
        } else if !row.is_empty() {
            return None;
        }
    }
    z_rows.resize(s.cols, Vec::new());
    let z = IntMatrix::from_sparse_rows(b.cols(), z_rows);
    Some(s.v.mul(&z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntMatrix) -> IntMatrix {
        let s = snf_with(a, Track::ALL);
        let d = s.d();
        assert_eq!(s.u.mul(a).mul(&s.v), d);
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(a.rows()));
        assert!(s.u.determinant().is_unit());
        assert!(s.v.determinant().is_unit());
        for w in s.diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        d
    }

    #[test]
    fn small_cases() {
        let d = check(&IntMatrix::from_rows(2, 2, &[2, 0, 0, 3]));
        assert_eq!(d, IntMatrix::from_rows(2, 2, &[1, 0, 0, 6]));
        let d = check(&IntMatrix::identity(2));
        assert_eq!(d, IntMatrix::identity(2));
        let d = check(&IntMatrix::from_rows(2, 2, &[2, 4, 4, 8]));
        assert_eq!(d, IntMatrix::from_rows(2, 2, &[2, 0, 0, 0]));
        let d = check(&IntMatrix::from_rows(3, 3, &[4, 0, 0, 0, 6, 0, 0, 0, 10]));
        assert_eq!(d, IntMatrix::from_rows(3, 3, &[2, 0, 0, 0, 2, 0, 0, 0, 60]));
        check(&IntMatrix::from_rows(3, 4, &[3, 5, 7, 0, -2, 4, 6, 8, 9, 0, 3, 1]));
    }

    #[test]
    fn kernel_image_solve() {
        let a = IntMatrix::from_rows(2, 3, &[2, 4, 6, 0, 2, 4]);
        let k = kernel(&a);
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).is_zero());
        let sat = saturated_image(&IntMatrix::from_rows(2, 1, &[2, 4]));
        assert_eq!(sat.cols(), 1);
        let col = sat.column(0);
        assert_eq!(col[0].abs(), Int::from(1));
        assert_eq!(col[1].abs(), Int::from(2));
        let x = solve(&a, &[Int::from(2), Int::from(2)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![Int::from(2), Int::from(2)]);
        assert!(solve(&a, &[Int::from(1), Int::from(0)]).is_none());
        let b = IntMatrix::from_rows(2, 2, &[2, 4, 2, 0]);
        let x = solve_matrix(&a, &b).unwrap();
        assert_eq!(a.mul(&x), b);
    }
}

//! Dense linear algebra over the packed finite fields of [`crate::ff`].
//!
//! Vectors are row vectors and matrices act on the right (v -> v * M), the
//! usual convention for spinning algorithms. All entries are packed field
//! elements of a single [`Field`].

use crate::ff::Field;

/// Dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq)]
pub struct FMat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for FMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "FMat {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl FMat {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> FMat {
        FMat { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> FMat {
        let mut m = FMat::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<u64>>) -> FMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            assert_eq!(row.len(), c, "ragged matrix");
            for &x in row {
                debug_assert!(x < field.q());
                data.push(x);
            }
        }
        FMat { field: field.clone(), rows: r, cols: c, data }
    }

    pub fn from_fn(field: &Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> FMat {
        let mut m = FMat::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn nrows(&self) -> usize {
        self.rows
    }
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        debug_assert!(v < self.field.q());
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn add(&self, rhs: &FMat) -> FMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let f = &self.field;
        let data = self.data.iter().zip(rhs.data.iter()).map(|(&a, &b)| f.add(a, b)).collect();
        FMat { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &FMat) -> FMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let f = &self.field;
        let data = self.data.iter().zip(rhs.data.iter()).map(|(&a, &b)| f.sub(a, b)).collect();
        FMat { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: u64) -> FMat {
        let f = &self.field;
        let data = self.data.iter().map(|&a| f.mul(a, c)).collect();
        FMat { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn matmul(&self, rhs: &FMat) -> FMat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let f = &self.field;
        let mut out = FMat::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                let rr = k * rhs.cols;
                let or = i * rhs.cols;
                for j in 0..rhs.cols {
                    let b = rhs.data[rr + j];
                    if b != 0 {
                        out.data[or + j] = f.add(out.data[or + j], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> FMat {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = FMat::identity(&self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base);
            }
            base = base.matmul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn transpose(&self) -> FMat {
        let mut out = FMat::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn trace(&self) -> u64 {
        assert_eq!(self.rows, self.cols);
        let f = &self.field;
        let mut t = 0;
        for i in 0..self.rows {
            t = f.add(t, self.data[i * self.cols + i]);
        }
        t
    }

    /// Kronecker product: (A kron B)[(i*rB + k), (j*cB + l)] = A[i,j] B[k,l].
    pub fn kron(&self, rhs: &FMat) -> FMat {
        let f = &self.field;
        let (ra, ca) = (self.rows, self.cols);
        let (rb, cb) = (rhs.rows, rhs.cols);
        let mut out = FMat::zeros(f, ra * rb, ca * cb);
        for i in 0..ra {
            for j in 0..ca {
                let a = self.data[i * ca + j];
                if a == 0 {
                    continue;
                }
                for k in 0..rb {
                    for l in 0..cb {
                        let b = rhs.data[k * cb + l];
                        if b != 0 {
                            out.data[(i * rb + k) * (ca * cb) + (j * cb + l)] = f.mul(a, b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Row-reduce in place to reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (m, n) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut prow = 0usize;
        for col in 0..n {
            let Some(sel) = (prow..m).find(|&r| self.data[r * n + col] != 0) else {
                continue;
            };
            self.data.swap_with_slice_rows(prow, sel, n);
            let pin = f.inv(self.data[prow * n + col]).unwrap();
            for j in col..n {
                self.data[prow * n + j] = f.mul(self.data[prow * n + j], pin);
            }
            for r in 0..m {
                if r != prow {
                    let fac = self.data[r * n + col];
                    if fac != 0 {
                        for j in col..n {
                            let t = f.mul(fac, self.data[prow * n + j]);
                            self.data[r * n + j] = f.sub(self.data[r * n + j], t);
                        }
                    }
                }
            }
            pivots.push(col);
            prow += 1;
            if prow == m {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut c = self.clone();
        c.rref().len()
    }

    /// Basis of {x : M x = 0} (column vectors returned as rows).
    pub fn right_nullspace(&self) -> Vec<Vec<u64>> {
        let f = &self.field;
        let mut r = self.clone();
        let pivots = r.rref();
        let n = self.cols;
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..n {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![0u64; n];
            v[free] = 1;
            for (prow, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.data[prow * n + free]);
            }
            basis.push(v);
        }
        basis
    }

    /// Basis of {v : v M = 0} as row vectors.
    pub fn left_nullspace(&self) -> Vec<Vec<u64>> {
        self.transpose().right_nullspace()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Horizontal concatenation [A | B | ...]; all blocks share row count.
    pub fn hstack(blocks: &[&FMat]) -> FMat {
        assert!(!blocks.is_empty());
        let f = blocks[0].field.clone();
        let rows = blocks[0].rows;
        assert!(blocks.iter().all(|b| b.rows == rows && b.field == f));
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = FMat::zeros(&f, rows, cols);
        for i in 0..rows {
            let mut off = 0;
            for b in blocks {
                for j in 0..b.cols {
                    out.data[i * cols + off + j] = b.data[i * b.cols + j];
                }
                off += b.cols;
            }
        }
        out
    }

    /// Vertical concatenation; all blocks share column count.
    pub fn vstack(blocks: &[&FMat]) -> FMat {
        assert!(!blocks.is_empty());
        let f = blocks[0].field.clone();
        let cols = blocks[0].cols;
        assert!(blocks.iter().all(|b| b.cols == cols && b.field == f));
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        FMat {
            field: f,
            rows,
            cols,
            data,
        }
    }

    /// Exact solution X of self * X = rhs, or None when inconsistent. With a
    /// rank-deficient left side the free coordinates are set to zero.
    pub fn solve(&self, rhs: &FMat) -> Option<FMat> {
        assert_eq!(self.rows, rhs.rows);
        let n = self.cols;
        let k = rhs.cols;
        let mut aug = FMat::hstack(&[self, rhs]);
        let pivots = aug.rref();
        // a pivot inside the right block certifies inconsistency
        if pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut x = FMat::zeros(&self.field, n, k);
        for (prow, &pc) in pivots.iter().enumerate() {
            for j in 0..k {
                x.data[pc * k + j] = aug.data[prow * (n + k) + n + j];
            }
        }
        Some(x)
    }

    /// Inverse of a square matrix; panics if singular (internal use on
    /// known-invertible base changes).
    pub fn inverse(&self) -> FMat {
        assert_eq!(self.rows, self.cols);
        let f = self.field.clone();
        let n = self.rows;
        let mut aug = FMat::zeros(&f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.data[i * n + j];
            }
            aug.data[i * 2 * n + n + i] = 1;
        }
        let pivots = aug.rref();
        assert!(
            pivots.len() == n && pivots.iter().enumerate().all(|(i, &c)| c == i),
            "matrix is singular"
        );
        let mut out = FMat::zeros(&f, n, n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = aug.data[i * 2 * n + n + j];
            }
        }
        out
    }

    /// Characteristic polynomial det(xI - M), monic, little-endian
    /// coefficients of length n+1. Hessenberg reduction by similarity
    /// transforms followed by the standard determinant recurrence.
    pub fn char_poly(&self) -> Vec<u64> {
        assert_eq!(self.rows, self.cols);
        let f = self.field.clone();
        let n = self.rows;
        if n == 0 {
            return vec![1];
        }
        let mut h = self.clone();
        // reduce to upper Hessenberg form with similarity operations
        for j in 0..n.saturating_sub(2) {
            let Some(sel) = (j + 1..n).find(|&r| h.get(r, j) != 0) else {
                continue;
            };
            if sel != j + 1 {
                // swap rows and matching columns
                for c in 0..n {
                    let a = h.get(j + 1, c);
                    let b = h.get(sel, c);
                    h.set(j + 1, c, b);
                    h.set(sel, c, a);
                }
                for r in 0..n {
                    let a = h.get(r, j + 1);
                    let b = h.get(r, sel);
                    h.set(r, j + 1, b);
                    h.set(r, sel, a);
                }
            }
            let pinv = f.inv(h.get(j + 1, j)).unwrap();
            for r in j + 2..n {
                let fac = f.mul(h.get(r, j), pinv);
                if fac == 0 {
                    continue;
                }
                // row_r -= fac * row_{j+1}; col_{j+1} += fac * col_r
                for c in 0..n {
                    let t = f.mul(fac, h.get(j + 1, c));
                    h.set(r, c, f.sub(h.get(r, c), t));
                }
                for r2 in 0..n {
                    let t = f.mul(fac, h.get(r2, r));
                    h.set(r2, j + 1, f.add(h.get(r2, j + 1), t));
                }
            }
        }
        // p_0 = 1; p_m = (x - h[m-1][m-1]) p_{m-1}
        //            - sum_{i=1..m-1} h[m-1-i][m-1] * (prod of subdiagonals) * p_{m-1-i}
        let mut polys: Vec<Vec<u64>> = vec![vec![1]];
        for m in 1..=n {
            let mut p = poly_shift_mul_sub(&f, &polys[m - 1], h.get(m - 1, m - 1));
            let mut beta = 1u64; // product of subdiagonal entries
            for i in 1..m {
                beta = f.mul(beta, h.get(m - i, m - i - 1));
                if beta == 0 {
                    break;
                }
                let coeff = f.mul(h.get(m - 1 - i, m - 1), beta);
                if coeff == 0 {
                    continue;
                }
                for (d, &c) in polys[m - 1 - i].iter().enumerate() {
                    if c != 0 {
                        p[d] = f.sub(p[d], f.mul(coeff, c));
                    }
                }
            }
            polys.push(p);
        }
        polys.pop().unwrap()
    }
}

/// (x - a) * p, little-endian.
fn poly_shift_mul_sub(f: &Field, p: &[u64], a: u64) -> Vec<u64> {
    let mut out = vec![0u64; p.len() + 1];
    for (d, &c) in p.iter().enumerate() {
        out[d + 1] = f.add(out[d + 1], c);
        out[d] = f.sub(out[d], f.mul(a, c));
    }
    out
}

/// Multiplicity of lambda as a root of a polynomial (little-endian coeffs).
pub fn root_multiplicity(f: &Field, poly: &[u64], lambda: u64) -> usize {
    let mut cur = poly.to_vec();
    let mut mult = 0;
    loop {
        // synthetic division by (x - lambda): remainder is cur(lambda)
        let mut quot = vec![0u64; cur.len().saturating_sub(1)];
        let mut carry = 0u64; // running coefficient, top down
        for d in (0..cur.len()).rev() {
            let val = f.add(cur[d], f.mul(carry, lambda));
            if d == 0 {
                if val != 0 {
                    return mult;
                }
            } else {
                quot[d - 1] = val;
                carry = val;
            }
        }
        mult += 1;
        cur = quot;
        if cur.is_empty() {
            return mult;
        }
    }
}

/// v * M for a row vector.
pub fn apply_row(f: &Field, v: &[u64], m: &FMat) -> Vec<u64> {
    assert_eq!(v.len(), m.nrows());
    let cols = m.ncols();
    let mut out = vec![0u64; cols];
    for (k, &a) in v.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let row = m.row(k);
        for j in 0..cols {
            if row[j] != 0 {
                out[j] = f.add(out[j], f.mul(a, row[j]));
            }
        }
    }
    out
}

/// A growing semi-echelonized row basis, for spinning and membership tests.
pub struct RowBasis {
    field: Field,
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl RowBasis {
    pub fn new(field: &Field, cols: usize) -> RowBasis {
        RowBasis { field: field.clone(), cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduce v against the basis; returns the residue (zero iff contained).
    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        let f = &self.field;
        for (row, &p) in self.rows.iter().zip(self.pivots.iter()) {
            let c = v[p];
            if c != 0 {
                for j in 0..self.cols {
                    if row[j] != 0 {
                        v[j] = f.sub(v[j], f.mul(c, row[j]));
                    }
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v.to_vec()).iter().all(|&x| x == 0)
    }

    /// Insert a vector; returns true if it enlarged the basis.
    pub fn insert(&mut self, v: Vec<u64>) -> bool {
        assert_eq!(v.len(), self.cols);
        let f = self.field.clone();
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let pin = f.inv(v[p]).unwrap();
        for x in v.iter_mut() {
            *x = f.mul(*x, pin);
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    /// The basis as a dim x cols matrix.
    pub fn as_matrix(&self) -> FMat {
        FMat::from_rows(&self.field, self.rows.clone())
    }
}

// helper used by rref: swap two rows inside the flat buffer
trait SwapRows {
    fn swap_with_slice_rows(&mut self, a: usize, b: usize, n: usize);
}
impl SwapRows for Vec<u64> {
    fn swap_with_slice_rows(&mut self, a: usize, b: usize, n: usize) {
        if a == b {
            return;
        }
        for j in 0..n {
            self.swap(a * n + j, b * n + j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;

    fn f(p: u64, k: u32) -> Field {
        Field::new(p, k).unwrap()
    }

    /// Reference char poly by cofactor expansion of det(xI - M) with
    /// polynomial entries; exponential, for tiny test matrices only.
    fn naive_char_poly(m: &FMat) -> Vec<u64> {
        let fd = m.field().clone();
        let n = m.nrows();
        // entries as little-endian polys in x
        let entries: Vec<Vec<Vec<u64>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            vec![fd.neg(m.get(i, j)), 1]
                        } else {
                            vec![fd.neg(m.get(i, j))]
                        }
                    })
                    .collect()
            })
            .collect();
        fn pmul(fd: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
            let mut out = vec![0u64; a.len() + b.len() - 1];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    out[i + j] = fd.add(out[i + j], fd.mul(x, y));
                }
            }
            out
        }
        fn padd(fd: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
            let mut out = vec![0u64; a.len().max(b.len())];
            for (i, &x) in a.iter().enumerate() {
                out[i] = x;
            }
            for (i, &y) in b.iter().enumerate() {
                out[i] = fd.add(out[i], y);
            }
            out
        }
        fn det(fd: &Field, e: &[Vec<Vec<u64>>], rows: &[usize], cols: &[usize]) -> Vec<u64> {
            if rows.len() == 1 {
                return e[rows[0]][cols[0]].clone();
            }
            let mut acc = vec![0u64];
            for (idx, &c) in cols.iter().enumerate() {
                let sub_rows = &rows[1..];
                let sub_cols: Vec<usize> =
                    cols.iter().copied().filter(|&x| x != c).collect();
                let minor = det(fd, e, sub_rows, &sub_cols);
                let mut term = pmul(fd, &e[rows[0]][c], &minor);
                if idx % 2 == 1 {
                    for x in term.iter_mut() {
                        *x = fd.neg(*x);
                    }
                }
                acc = padd(fd, &acc, &term);
            }
            acc
        }
        let idx: Vec<usize> = (0..n).collect();
        let mut out = det(&fd, &entries, &idx, &idx);
        out.truncate(n + 1);
        while out.len() < n + 1 {
            out.push(0);
        }
        out
    }

    #[test]
    fn matmul_identity_and_inverse() {
        let fd = f(7, 1);
        let m = FMat::from_rows(&fd, vec![vec![1, 2, 0], vec![3, 1, 5], vec![0, 6, 2]]);
        let id = FMat::identity(&fd, 3);
        assert_eq!(m.matmul(&id), m);
        let mi = m.inverse();
        assert_eq!(m.matmul(&mi), id);
        assert_eq!(mi.matmul(&m), id);
    }

    #[test]
    fn rref_rank_nullspace() {
        let fd = f(5, 1);
        // rank 2: third row is the sum of the first two
        let m = FMat::from_rows(
            &fd,
            vec![vec![1, 0, 2, 1], vec![0, 1, 1, 3], vec![1, 1, 3, 4]],
        );
        assert_eq!(m.rank(), 2);
        let ns = m.right_nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            // M v = 0
            for i in 0..3 {
                let mut acc = 0;
                for j in 0..4 {
                    acc = fd.add(acc, fd.mul(m.get(i, j), v[j]));
                }
                assert_eq!(acc, 0);
            }
        }
        let lns = m.left_nullspace();
        assert_eq!(lns.len(), 1);
        for v in &lns {
            let prod = apply_row(&fd, v, &m);
            assert!(prod.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn char_poly_matches_naive_expansion() {
        // deterministic pseudo-random matrices over several fields
        for (p, k) in [(2u64, 1u32), (3, 1), (5, 1), (3, 2), (2, 2)] {
            let fd = f(p, k);
            let q = fd.q();
            let mut seed = 12345u64;
            let mut next = || {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (seed >> 33) % q
            };
            for n in 1..=4usize {
                for _ in 0..8 {
                    let m = FMat::from_fn(&fd, n, n, |_, _| next());
                    assert_eq!(m.char_poly(), naive_char_poly(&m), "{fd} n={n}");
                }
            }
        }
    }

    #[test]
    fn char_poly_of_companion_matrix() {
        // companion matrix of x^3 + 2x + 1 over F_5 (acting on columns)
        let fd = f(5, 1);
        let m = FMat::from_rows(
            &fd,
            vec![vec![0, 0, fd.neg(1)], vec![1, 0, fd.neg(2)], vec![0, 1, 0]],
        );
        assert_eq!(m.char_poly(), vec![1, 2, 0, 1]);
    }

    #[test]
    fn root_multiplicities() {
        let fd = f(7, 1);
        // (x - 2)^2 (x - 3) = x^3 - 7x^2 + 16x - 12 = x^3 + 2x + 2 mod 7
        let poly = vec![fd.neg(12 % 7), 16 % 7, fd.neg(0), 1];
        assert_eq!(root_multiplicity(&fd, &poly, 2), 2);
        assert_eq!(root_multiplicity(&fd, &poly, 3), 1);
        assert_eq!(root_multiplicity(&fd, &poly, 5), 0);
    }

    #[test]
    fn kron_dimensions_and_mixed_product() {
        let fd = f(3, 1);
        let a = FMat::from_rows(&fd, vec![vec![1, 2], vec![0, 1]]);
        let b = FMat::from_rows(&fd, vec![vec![2, 1], vec![1, 1]]);
        let c = FMat::from_rows(&fd, vec![vec![1, 1], vec![2, 0]]);
        let d = FMat::from_rows(&fd, vec![vec![0, 2], vec![1, 2]]);
        // (A kron B)(C kron D) = (AC) kron (BD)
        let lhs = a.kron(&b).matmul(&c.kron(&d));
        let rhs = a.matmul(&c).kron(&b.matmul(&d));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn row_basis_spins_independents() {
        let fd = f(5, 1);
        let mut basis = RowBasis::new(&fd, 3);
        assert!(basis.insert(vec![1, 2, 3]));
        assert!(basis.insert(vec![0, 1, 4]));
        // dependent: 2*(1,2,3) + (0,1,4) = (2, 0, 0)...
        assert!(!basis.insert(vec![2, 4, 1])); // = 2*(1,2,3)
        assert_eq!(basis.dim(), 2);
        assert!(basis.contains(&[1, 3, 2])); // (1,2,3)+(0,1,4) = (1,3,7)=(1,3,2)
        assert!(!basis.contains(&[0, 0, 1]));
        assert!(basis.insert(vec![0, 0, 1]));
        assert_eq!(basis.dim(), 3);
    }

    #[test]
    fn pow_and_trace() {
        let fd = f(7, 1);
        let m = FMat::from_rows(&fd, vec![vec![2, 1], vec![0, 3]]);
        let m3 = m.matmul(&m).matmul(&m);
        assert_eq!(m.pow(3), m3);
        assert_eq!(m.pow(0), FMat::identity(&fd, 2));
        assert_eq!(m.trace(), 5);
    }

    #[test]
    fn stack_and_solve() {
        let fd = f(5, 1);
        let a = FMat::from_rows(&fd, vec![vec![1, 2], vec![0, 1], vec![3, 0]]);
        let b = FMat::from_rows(&fd, vec![vec![4], vec![2], vec![1]]);
        let h = FMat::hstack(&[&a, &b]);
        assert_eq!((h.nrows(), h.ncols()), (3, 3));
        assert_eq!(h.get(2, 2), 1);
        let v = FMat::vstack(&[&a, &a]);
        assert_eq!((v.nrows(), v.ncols()), (6, 2));
        assert_eq!(v.get(5, 0), 3);

        // consistent system with unique solution: x = (2, 1)
        let rhs = FMat::from_rows(&fd, vec![vec![4], vec![1], vec![1]]);
        let x = a.solve(&rhs).unwrap();
        assert_eq!(a.matmul(&x), rhs);
        assert_eq!((x.get(0, 0), x.get(1, 0)), (2, 1));

        // inconsistent system
        let bad = FMat::from_rows(&fd, vec![vec![0], vec![0], vec![1]]);
        let a2 = FMat::from_rows(&fd, vec![vec![1, 0], vec![2, 0], vec![0, 0]]);
        assert!(a2.solve(&bad).is_none());

        // rank-deficient but consistent
        let rhs2 = FMat::from_rows(&fd, vec![vec![1], vec![2], vec![0]]);
        let x2 = a2.solve(&rhs2).unwrap();
        assert_eq!(a2.matmul(&x2), rhs2);
    }
}

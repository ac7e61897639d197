//! Compressed sparse row matrices with a fixed summation order.
//!
//! Every product and sum visits terms in a deterministic order, so algebraic
//! identities that hold term by term (a block that is structurally zero, two
//! products whose terms differ only in sign) come out exactly zero.

/// Real CSR matrix. Column indices are strictly increasing within a row.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl Csr {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), data: Vec::new() }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: diag.to_vec(),
        }
    }

    /// Build from `(row, col, value)` triplets. Duplicates are summed in the
    /// order they appear.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for &(i, j, v) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) outside {nrows}x{ncols}");
            match rows[i].iter_mut().find(|(c, _)| *c == j) {
                Some(entry) => entry.1 += v,
                None => rows[i].push((j, v)),
            }
        }
        Self::from_rows(ncols, rows)
    }

    fn from_rows(ncols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let nrows = rows.len();
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                indices.push(c);
                data.push(v);
            }
            indptr.push(indices.len());
        }
        Self { nrows, ncols, indptr, indices, data }
    }

    /// Symmetric tridiagonal matrix from its diagonal and off-diagonal.
    pub fn tridiagonal(diag: &[f64], off: &[f64]) -> Self {
        let n = diag.len();
        assert_eq!(off.len() + 1, n.max(1));
        let mut t = Vec::with_capacity(3 * n);
        for k in 0..n {
            if k > 0 {
                t.push((k, k - 1, off[k - 1]));
            }
            t.push((k, k, diag[k]));
            if k + 1 < n {
                t.push((k, k + 1, off[k]));
            }
        }
        Self::from_triplets(n, n, &t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()].iter().copied().zip(self.data[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// `selfᵀ x`
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            for (j, v) in self.row(i) {
                y[j] += v * xi;
            }
        }
        y
    }

    pub fn matmul(&self, rhs: &Csr) -> Csr {
        assert_eq!(self.ncols, rhs.nrows, "inner dimensions differ");
        let mut acc = vec![0.0; rhs.ncols];
        let mut seen = vec![false; rhs.ncols];
        let mut rows = Vec::with_capacity(self.nrows);
        for i in 0..self.nrows {
            let mut touched = Vec::new();
            for (k, a) in self.row(i) {
                for (j, b) in rhs.row(k) {
                    if !seen[j] {
                        seen[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            let row: Vec<_> = touched
                .into_iter()
                .map(|j| {
                    let v = acc[j];
                    acc[j] = 0.0;
                    seen[j] = false;
                    (j, v)
                })
                .collect();
            rows.push(row);
        }
        Self::from_rows(rhs.ncols, rows)
    }

    fn combine(&self, rhs: &Csr, f: impl Fn(f64, f64) -> f64) -> Csr {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols), "shape mismatch");
        let mut rows = Vec::with_capacity(self.nrows);
        for i in 0..self.nrows {
            let mut a = self.row(i).peekable();
            let mut b = rhs.row(i).peekable();
            let mut row = Vec::new();
            loop {
                match (a.peek().copied(), b.peek().copied()) {
                    (Some((ja, va)), Some((jb, vb))) if ja == jb => {
                        row.push((ja, f(va, vb)));
                        a.next();
                        b.next();
                    }
                    (Some((ja, va)), Some((jb, _))) if ja < jb => {
                        row.push((ja, f(va, 0.0)));
                        a.next();
                    }
                    (Some(_), Some((jb, vb))) => {
                        row.push((jb, f(0.0, vb)));
                        b.next();
                    }
                    (Some((ja, va)), None) => {
                        row.push((ja, f(va, 0.0)));
                        a.next();
                    }
                    (None, Some((jb, vb))) => {
                        row.push((jb, f(0.0, vb)));
                        b.next();
                    }
                    (None, None) => break,
                }
            }
            rows.push(row);
        }
        Self::from_rows(self.ncols, rows)
    }

    pub fn add(&self, rhs: &Csr) -> Csr {
        self.combine(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Csr) -> Csr {
        self.combine(rhs, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Csr {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `diag(d) · self`
    pub fn scale_rows(&self, d: &[f64]) -> Csr {
        assert_eq!(d.len(), self.nrows);
        let mut out = self.clone();
        for (i, &di) in d.iter().enumerate() {
            for v in &mut out.data[self.indptr[i]..self.indptr[i + 1]] {
                *v *= di;
            }
        }
        out
    }

    /// `self · diag(d)`
    pub fn scale_cols(&self, d: &[f64]) -> Csr {
        assert_eq!(d.len(), self.ncols);
        let mut out = self.clone();
        for (v, &j) in out.data.iter_mut().zip(&self.indices) {
            *v *= d[j];
        }
        out
    }

    pub fn transpose(&self) -> Csr {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.ncols];
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                rows[j].push((i, v));
            }
        }
        Self::from_rows(self.nrows, rows)
    }

    /// Assemble `[[a, b], [c, d]]`; `None` is a zero block. Each block row and
    /// column must have a consistent size, given by `sizes`.
    pub fn block2x2(
        sizes: (usize, usize),
        blocks: [[Option<&Csr>; 2]; 2],
    ) -> Csr {
        let (n0, n1) = sizes;
        let dims = [n0, n1];
        let offsets = [0, n0];
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n0 + n1];
        for (bi, block_row) in blocks.iter().enumerate() {
            for (bj, block) in block_row.iter().enumerate() {
                let Some(b) = block else { continue };
                assert_eq!((b.nrows, b.ncols), (dims[bi], dims[bj]), "block ({bi},{bj}) has wrong shape");
                for i in 0..b.nrows {
                    rows[offsets[bi] + i].extend(b.row(i).map(|(j, v)| (offsets[bj] + j, v)));
                }
            }
        }
        Self::from_rows(n0 + n1, rows)
    }

    /// Largest absolute entry; 0 for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// True when every stored entry is exactly zero.
    pub fn is_exact_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn is_symmetric_exact(&self) -> bool {
        self.nrows == self.ncols && self.sub(&self.transpose()).is_exact_zero()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small() -> Csr {
        Csr::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, -3.0), (0, 0, 0.5)])
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = small();
        assert_eq!(m.get(0, 0), 1.5);
        assert_eq!(m.get(1, 2), 0.0);
        assert_eq!(m.nnz(), 3);
    }

    #[test]
    fn matvec_and_transpose_agree() {
        let m = small();
        assert_eq!(m.matvec(&[1.0, 2.0, 3.0]), vec![7.5, -6.0]);
        assert_eq!(m.matvec_transpose(&[1.0, 1.0]), m.transpose().matvec(&[1.0, 1.0]));
    }

    #[test]
    fn block_assembly_places_blocks() {
        let a = Csr::from_diag(&[1.0, 2.0]);
        let b = Csr::from_triplets(2, 1, &[(1, 0, 5.0)]);
        let m = Csr::block2x2((2, 1), [[Some(&a), Some(&b)], [None, None]]);
        assert_eq!(m.to_dense(), vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 5.0], vec![0.0, 0.0, 0.0]]);
    }

    #[test]
    fn tridiagonal_is_symmetric() {
        let t = Csr::tridiagonal(&[1.0, 2.0, 3.0], &[0.5, -0.25]);
        assert!(t.is_symmetric_exact());
        assert_eq!(t.get(2, 1), -0.25);
    }

    proptest! {
        #[test]
        fn matmul_matches_dense(
            a in prop::collection::vec(-4i32..4, 12),
            b in prop::collection::vec(-4i32..4, 12),
        ) {
            let tri = |v: &[i32], r: usize, c: usize| {
                let t: Vec<_> = (0..r * c)
                    .filter(|&k| v[k] != 0)
                    .map(|k| (k / c, k % c, v[k] as f64))
                    .collect();
                Csr::from_triplets(r, c, &t)
            };
            let ma = tri(&a, 3, 4);
            let mb = tri(&b, 4, 3);
            let prod = ma.matmul(&mb).to_dense();
            for i in 0..3 {
                for j in 0..3 {
                    let expected: f64 = (0..4).map(|k| (a[i * 4 + k] * b[k * 3 + j]) as f64).sum();
                    prop_assert_eq!(prod[i][j], expected);
                }
            }
        }

        #[test]
        fn add_sub_roundtrip(v in prop::collection::vec(-100.0f64..100.0, 9)) {
            let t: Vec<_> = (0..9).map(|k| (k / 3, k % 3, v[k])).collect();
            let m = Csr::from_triplets(3, 3, &t);
            let s = m.scale(2.0);
            prop_assert!(s.sub(&m).sub(&m).is_exact_zero());
            prop_assert_eq!(m.transpose().transpose(), m);
        }
    }
}

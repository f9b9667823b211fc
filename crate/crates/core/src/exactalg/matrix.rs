use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::field::{FieldCtx, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("entries do not share the field {0}")]
    FieldMismatch(FieldCtx),
}

/// Row-major dense matrix over a single field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    ctx: FieldCtx,
    data: Vec<Scalar>,
}

/// Reduced row echelon form: `rows[r]` has a leading one in column `pivots[r]`, and every
/// pivot column is zero outside its pivot row. Only the nonzero rows are kept.
#[derive(Debug, Clone)]
pub struct Rref {
    pub pivots: Vec<usize>,
    pub rows: Vec<Vec<Scalar>>,
    pub cols: usize,
}

/// A successful [`solve`]: one particular solution and the kernel of the matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<Scalar>,
    pub kernel: Vec<Vec<Scalar>>,
}

impl DenseMatrix {
    pub fn zeros(ctx: FieldCtx, rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            ctx,
            data: vec![Scalar::zero(ctx); rows * cols],
        }
    }

    pub fn identity(ctx: FieldCtx, n: usize) -> Self {
        let mut m = DenseMatrix::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one(ctx));
        }
        m
    }

    pub fn from_rows(ctx: FieldCtx, rows: Vec<Vec<Scalar>>) -> Result<Self, LinAlgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(LinAlgError::Dimension(format!(
                    "row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            for s in row {
                if s.ctx() != ctx {
                    return Err(LinAlgError::FieldMismatch(ctx));
                }
                data.push(s);
            }
        }
        Ok(DenseMatrix {
            rows: nrows,
            cols: ncols,
            ctx,
            data,
        })
    }

    /// Builds a matrix from row-major integer entries.
    pub fn from_i64(ctx: FieldCtx, rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        DenseMatrix {
            rows,
            cols,
            ctx,
            data: entries.iter().map(|&e| Scalar::from_i64(ctx, e)).collect(),
        }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(ctx: FieldCtx, rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = DenseMatrix::zeros(ctx, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, s) in c.iter().enumerate() {
                m.set(i, j, s.clone());
            }
        }
        m
    }

    /// Side-by-side concatenation; every block must have `rows` rows.
    pub fn hstack(ctx: FieldCtx, rows: usize, blocks: &[DenseMatrix]) -> Self {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = DenseMatrix::zeros(ctx, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "block row count");
            for i in 0..rows {
                for j in 0..b.cols {
                    m.data[i * cols + off + j] = b.get(i, j).clone();
                }
            }
            off += b.cols;
        }
        m
    }

    /// Stacks blocks vertically; every block must have `cols` columns.
    pub fn vstack(ctx: FieldCtx, cols: usize, blocks: &[DenseMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            assert_eq!(b.cols, cols, "block column count");
            data.extend(b.data.iter().cloned());
        }
        DenseMatrix { rows, cols, ctx, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        debug_assert_eq!(value.ctx(), self.ctx);
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Scalar::zero(self.ctx);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * other.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinAlgError> {
        if v.len() != self.cols {
            return Err(LinAlgError::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Scalar::zero(self.ctx), |acc, (a, b)| &acc + &(a * b))
            })
            .collect())
    }

    pub fn scale(&self, c: &Scalar) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            ctx: self.ctx,
            data: self.data.iter().map(|s| s * c).collect(),
        }
    }

    /// Determinant of a square matrix by exact elimination.
    pub fn det(&self) -> Result<Scalar, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut det = Scalar::one(self.ctx);
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(Scalar::zero(self.ctx));
            };
            if p != col {
                a.swap(p, col);
                det = -&det;
            }
            let pivot = a[col][col].clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("nonzero pivot");
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] * &inv;
                for c in col..n {
                    let v = &a[r][c] - &(&factor * &a[col][c]);
                    a[r][c] = v;
                }
            }
        }
        Ok(det)
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<DenseMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = DenseMatrix::zeros(self.ctx, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one(self.ctx));
        }
        let r = rref(&aug);
        if r.pivots.len() < n || r.pivots[n - 1] >= n {
            return None;
        }
        let mut inv = DenseMatrix::zeros(self.ctx, n, n);
        for (i, row) in r.rows.iter().enumerate() {
            for j in 0..n {
                inv.set(i, j, row[n + j].clone());
            }
        }
        Some(inv)
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

fn rational_rows(m: &DenseMatrix) -> Vec<Vec<BigInt>> {
    // Clear denominators row by row so the elimination can run over the integers.
    (0..m.rows)
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, s| {
                let r = s.as_rational().expect("rational entry");
                acc.lcm(r.denom())
            });
            row.iter()
                .map(|s| {
                    let r = s.as_rational().expect("rational entry");
                    r.numer() * (&lcm / r.denom())
                })
                .collect()
        })
        .collect()
}

/// Fraction-free forward elimination; returns the pivot columns and the integer echelon form.
fn bareiss_echelon(mut a: Vec<Vec<BigInt>>, cols: usize) -> (Vec<usize>, Vec<Vec<BigInt>>) {
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut k = 0;
    for col in 0..cols {
        if k >= nrows {
            break;
        }
        let Some(p) = (k..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(p, k);
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = pivot_row[col].clone();
        for row in bottom.iter_mut() {
            let lead = row[col].clone();
            for j in col + 1..cols {
                let num = &pivot * &row[j] - &lead * &pivot_row[j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[col] = BigInt::zero();
            // Columns left of the pivot are already zero in this row, rescale is implicit.
        }
        prev = pivot;
        pivots.push(col);
        k += 1;
    }
    a.truncate(k);
    (pivots, a)
}

fn residue_rows(m: &DenseMatrix) -> Vec<Vec<u64>> {
    (0..m.rows)
        .map(|i| {
            m.row(i)
                .iter()
                .map(|s| match s {
                    Scalar::Residue { value, .. } => *value,
                    Scalar::Rational(_) => unreachable!("prime-field matrix"),
                })
                .collect()
        })
        .collect()
}

fn inv_mod(a: u64, q: u64) -> u64 {
    Scalar::Residue { value: a, modulus: q }
        .inv()
        .and_then(|s| s.to_i64())
        .expect("invertible residue") as u64
}

/// Gauss-Jordan elimination mod `q`. With `reduce == false` only the forward pass runs.
fn modular_echelon(mut a: Vec<Vec<u64>>, cols: usize, q: u64, reduce: bool) -> (Vec<usize>, Vec<Vec<u64>>) {
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut k = 0;
    for col in 0..cols {
        if k >= nrows {
            break;
        }
        let Some(p) = (k..nrows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(p, k);
        let inv = inv_mod(a[k][col], q);
        for j in col..cols {
            a[k][j] = (a[k][j] as u128 * inv as u128 % q as u128) as u64;
        }
        let pivot_row = a[k].clone();
        let start = if reduce { 0 } else { k + 1 };
        for (r, row) in a.iter_mut().enumerate().skip(start) {
            if r == k || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for j in col..cols {
                let sub = (factor as u128 * pivot_row[j] as u128 % q as u128) as u64;
                row[j] = (row[j] + q - sub) % q;
            }
        }
        pivots.push(col);
        k += 1;
    }
    a.truncate(k);
    (pivots, a)
}

/// Exact rank; fraction-free over Q, plain pivoting over a prime field.
pub fn rank(m: &DenseMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    match m.ctx {
        FieldCtx::Rationals => bareiss_echelon(rational_rows(m), m.cols).0.len(),
        FieldCtx::Prime(q) => modular_echelon(residue_rows(m), m.cols, q, false).0.len(),
    }
}

/// Reduced row echelon form with first-nonzero pivoting in column order.
pub fn rref(m: &DenseMatrix) -> Rref {
    let ctx = m.ctx;
    if m.rows == 0 || m.cols == 0 {
        return Rref {
            pivots: Vec::new(),
            rows: Vec::new(),
            cols: m.cols,
        };
    }
    match ctx {
        FieldCtx::Rationals => {
            let (pivots, ech) = bareiss_echelon(rational_rows(m), m.cols);
            let mut rows: Vec<Vec<BigRational>> = ech
                .into_iter()
                .zip(&pivots)
                .map(|(row, &pc)| {
                    let lead = row[pc].clone();
                    row.into_iter()
                        .map(|v| BigRational::new(v, lead.clone()))
                        .collect()
                })
                .collect();
            for k in (0..pivots.len()).rev() {
                let pc = pivots[k];
                let pivot_row = rows[k].clone();
                for row in rows.iter_mut().take(k) {
                    if row[pc].is_zero() {
                        continue;
                    }
                    let factor = row[pc].clone();
                    for j in pc..m.cols {
                        if !pivot_row[j].is_zero() {
                            row[j] = &row[j] - &factor * &pivot_row[j];
                        }
                    }
                }
            }
            Rref {
                pivots,
                rows: rows
                    .into_iter()
                    .map(|r| r.into_iter().map(Scalar::Rational).collect())
                    .collect(),
                cols: m.cols,
            }
        }
        FieldCtx::Prime(q) => {
            let (pivots, ech) = modular_echelon(residue_rows(m), m.cols, q, true);
            Rref {
                pivots,
                rows: ech
                    .into_iter()
                    .map(|r| {
                        r.into_iter()
                            .map(|value| Scalar::Residue { value, modulus: q })
                            .collect()
                    })
                    .collect(),
                cols: m.cols,
            }
        }
    }
}

impl Rref {
    fn kernel(&self, ctx: FieldCtx) -> Vec<Vec<Scalar>> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Scalar::zero(ctx); self.cols];
                v[free] = Scalar::one(ctx);
                for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                    v[pc] = -&row[free];
                }
                v
            })
            .collect()
    }
}

/// Basis of the right null space, one vector per free column.
pub fn kernel_basis(m: &DenseMatrix) -> Vec<Vec<Scalar>> {
    rref(m).kernel(m.ctx)
}

/// Solves `m x = b`; `Ok(None)` when `b` is outside the column span.
pub fn solve(m: &DenseMatrix, b: &[Scalar]) -> Result<Option<Solution>, LinAlgError> {
    if b.len() != m.rows {
        return Err(LinAlgError::Dimension(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            m.rows
        )));
    }
    let ctx = m.ctx;
    let mut aug = DenseMatrix::zeros(ctx, m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, m.cols, b[i].clone());
    }
    let r = rref(&aug);
    if r.pivots.last() == Some(&m.cols) {
        return Ok(None);
    }
    let mut particular = vec![Scalar::zero(ctx); m.cols];
    for (row, &pc) in r.rows.iter().zip(&r.pivots) {
        particular[pc] = row[m.cols].clone();
    }
    Ok(Some(Solution {
        particular,
        kernel: kernel_basis(m),
    }))
}

/// Indices `j` such that the standard vectors `e_j` complete the column span of `m` to
/// the whole space, independently.
pub fn column_span_complement(m: &DenseMatrix) -> Vec<usize> {
    if m.cols == 0 {
        return (0..m.rows).collect();
    }
    let r = rref(&m.transpose());
    let mut is_pivot = vec![false; m.rows];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    (0..m.rows).filter(|&i| !is_pivot[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldCtx {
        FieldCtx::Rationals
    }

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_i64(q(), x)).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&DenseMatrix::identity(q(), 3)), 3);
        assert_eq!(rank(&DenseMatrix::zeros(q(), 2, 2)), 0);
        assert_eq!(rank(&DenseMatrix::from_i64(q(), 2, 2, &[1, 2, 2, 4])), 1);
        assert_eq!(rank(&DenseMatrix::zeros(q(), 0, 4)), 0);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&DenseMatrix::identity(q(), 2)).is_empty());
        let k = kernel_basis(&DenseMatrix::from_i64(q(), 1, 2, &[1, -1]));
        assert_eq!(k, vec![ints(&[1, 1])]);
        let k = kernel_basis(&DenseMatrix::from_i64(q(), 2, 2, &[1, 2, 2, 4]));
        assert_eq!(k.len(), 1);
        // proportional to (2, -1)
        let v = &k[0];
        assert_eq!(&v[0] + &(&v[1] * &Scalar::from_i64(q(), 2)), Scalar::zero(q()));
    }

    #[test]
    fn empty_matrices_are_legal() {
        let m = DenseMatrix::zeros(q(), 0, 3);
        assert_eq!(kernel_basis(&m).len(), 3);
        let m = DenseMatrix::zeros(q(), 3, 0);
        assert_eq!(rank(&m), 0);
        assert!(kernel_basis(&m).is_empty());
    }

    #[test]
    fn solve_examples() {
        let s = solve(&DenseMatrix::identity(q(), 2), &ints(&[1, 2])).unwrap().unwrap();
        assert_eq!(s.particular, ints(&[1, 2]));
        assert!(s.kernel.is_empty());

        let s = solve(&DenseMatrix::from_i64(q(), 1, 2, &[1, -1]), &ints(&[0])).unwrap().unwrap();
        assert_eq!(s.particular, ints(&[0, 0]));
        assert_eq!(s.kernel, vec![ints(&[1, 1])]);

        let m = DenseMatrix::from_i64(q(), 2, 2, &[1, 2, 2, 4]);
        assert_eq!(solve(&m, &ints(&[1, 3])).unwrap(), None);
        assert!(matches!(solve(&m, &ints(&[1])), Err(LinAlgError::Dimension(_))));
    }

    #[test]
    fn bareiss_handles_skipped_columns() {
        let m = DenseMatrix::from_i64(q(), 3, 4, &[0, 2, 4, 1, 0, 1, 2, 3, 0, 3, 6, 4]);
        assert_eq!(rank(&m), 2);
        for v in kernel_basis(&m) {
            assert!(m.mul_vec(&v).unwrap().iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn det_and_inverse() {
        let m = DenseMatrix::from_i64(q(), 3, 3, &[2, 1, 0, 0, 1, 3, 1, 0, 1]);
        assert_eq!(m.det().unwrap(), Scalar::from_i64(q(), 5));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), DenseMatrix::identity(q(), 3));
        let f7 = FieldCtx::Prime(7);
        let m7 = DenseMatrix::from_i64(f7, 2, 2, &[1, 2, 3, 6]);
        assert!(m7.inverse().is_none());
    }

    #[test]
    fn complement_completes_span() {
        let m = DenseMatrix::from_i64(q(), 3, 1, &[0, 1, 1]);
        let c = column_span_complement(&m);
        assert_eq!(c, vec![0, 2]);
    }

    fn arb_int_matrix() -> impl proptest::strategy::Strategy<Value = (usize, usize, Vec<i64>)> {
        use proptest::prelude::*;
        (0usize..6, 0usize..6).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec(-9i64..=9, r * c))
        })
    }

    proptest::proptest! {
        #[test]
        fn rank_nullity((r, c, v) in arb_int_matrix()) {
            for ctx in [q(), FieldCtx::Prime(7)] {
                let m = DenseMatrix::from_i64(ctx, r, c, &v);
                let k = kernel_basis(&m);
                proptest::prop_assert_eq!(rank(&m) + k.len(), c);
                for v in &k {
                    proptest::prop_assert!(m.mul_vec(v).unwrap().iter().all(Scalar::is_zero));
                }
            }
        }

        #[test]
        fn solve_is_exact((r, c, v) in arb_int_matrix(), b in proptest::collection::vec(-9i64..=9, 6)) {
            let m = DenseMatrix::from_i64(q(), r, c, &v);
            let b: Vec<Scalar> = b[..r].iter().map(|&x| Scalar::from_i64(q(), x)).collect();
            if let Some(sol) = solve(&m, &b).unwrap() {
                proptest::prop_assert_eq!(m.mul_vec(&sol.particular).unwrap(), b);
            } else {
                proptest::prop_assert!(rank(&m) < r);
            }
        }
    }

    #[test]
    fn rational_rank_agrees_with_large_primes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut disagreements = 0;
        for _ in 0..100 {
            let (r, c) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
            let v: Vec<i64> = (0..r * c).map(|_| rng.gen_range(-9..=9)).collect();
            let rq = rank(&DenseMatrix::from_i64(q(), r, c, &v));
            for p in [101, 10007] {
                if rank(&DenseMatrix::from_i64(FieldCtx::Prime(p), r, c, &v)) != rq {
                    disagreements += 1;
                }
            }
        }
        assert_eq!(disagreements, 0);
    }
}

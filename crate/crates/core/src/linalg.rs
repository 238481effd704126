//! Exact rational scalars, dense matrices, and the elimination kernel
//! (reduced row echelon form, rank, nullspace, linear solve) the rest of
//! the crate is built on.
//!
//! All operations are deterministic: pivots are chosen as the first
//! nonzero entry in column order, so the same input always yields a
//! bit-identical result regardless of thread count.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::par;

/// Arbitrary-precision rational number. Always stored reduced with a
/// positive denominator; zero is `0/1`.
pub type Rational = num_rational::BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// The integer `n` as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Dense row-major matrix over the rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows * cols");
        Matrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Convenience constructor from integer literals.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| rat_int(n)).collect())
                .collect(),
        )
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Rational>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn scale(&self, k: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length must match cols");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack needs equal row counts");
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                other.at(i, j - self.cols).clone()
            }
        })
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |i, j| self.at(r0 + i, c0 + j).clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, m: &Matrix) {
        for i in 0..m.rows {
            for j in 0..m.cols {
                self.set(r0 + i, c0 + j, m.at(i, j).clone());
            }
        }
    }

    /// Build a matrix from its columns.
    pub fn from_cols(rows: usize, cols: Vec<Vec<Rational>>) -> Matrix {
        let c = cols.len();
        assert!(cols.iter().all(|v| v.len() == rows), "ragged columns");
        Matrix::from_fn(rows, c, |i, j| cols[j][i].clone())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl std::ops::Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl std::ops::Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let data = par::map_indexed(n, |i| {
            let mut row = vec![Rational::zero(); m];
            for p in 0..k {
                let a = self.at(i, p);
                if a.is_zero() {
                    continue;
                }
                for (j, cell) in row.iter_mut().enumerate() {
                    let b = rhs.at(p, j);
                    if !b.is_zero() {
                        *cell += a * b;
                    }
                }
            }
            row
        })
        .into_iter()
        .flatten()
        .collect();
        Matrix {
            rows: n,
            cols: m,
            data,
        }
    }
}

/// Reduced row echelon form together with the pivot column list.
///
/// Plain rational Gauss-Jordan with immediate reduction; pivot = first
/// nonzero entry below the current row, so the output is canonical.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    if rows == 0 || cols == 0 {
        return (a, pivots);
    }
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a.at(i, c).is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                a.data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = a.at(r, c).recip();
        if !inv.is_one() {
            for j in c..cols {
                let v = a.at(r, j) * &inv;
                a.set(r, j, v);
            }
        }
        let pivot_row: Vec<Rational> = a.row(r).to_vec();
        par::for_each_row(&mut a.data, cols, |i, row| {
            if i == r || row[c].is_zero() {
                return;
            }
            let factor = row[c].clone();
            for j in c..cols {
                if !pivot_row[j].is_zero() {
                    row[j] -= &factor * &pivot_row[j];
                }
            }
            row[c] = Rational::zero();
        });
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Number of pivots of `rref(m)`.
pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// Canonical basis of `ker m` as the columns of the returned matrix.
///
/// Free columns are taken in increasing index order and each basis vector
/// carries a `1` in its free slot, so `m * nullspace(m) = 0` exactly and
/// the basis is reproducible.
pub fn nullspace(m: &Matrix) -> Matrix {
    nullspace_free(m).0
}

/// Like [`nullspace`] but also returns the free column indices, one per
/// basis vector in matching order.
pub fn nullspace_free(m: &Matrix) -> (Matrix, Vec<usize>) {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Matrix::zero(m.cols, free.len());
    for (j, &fc) in free.iter().enumerate() {
        out.set(fc, j, Rational::one());
        for (k, &pc) in pivots.iter().enumerate() {
            let v = r.at(k, fc);
            if !v.is_zero() {
                out.set(pc, j, -v);
            }
        }
    }
    (out, free)
}

/// One exact solution of `m x = b` with free variables set to zero, or
/// `None` when the system is inconsistent.
pub fn solve(m: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(b.len(), m.rows, "rhs length must match rows");
    let rhs = Matrix::from_cols(m.rows, vec![b.to_vec()]);
    solve_matrix(m, &rhs).map(|x| x.col(0))
}

/// Simultaneous solve for every column of `b`; `None` if any column is
/// inconsistent.
pub fn solve_matrix(m: &Matrix, b: &Matrix) -> Option<Matrix> {
    assert_eq!(b.rows, m.rows, "rhs rows must match");
    let (r, pivots) = rref(&m.hstack(b));
    // A pivot inside the augmented block marks an inconsistent column.
    if pivots.iter().any(|&c| c >= m.cols) {
        return None;
    }
    let mut x = Matrix::zero(m.cols, b.cols);
    for (k, &pc) in pivots.iter().enumerate() {
        for j in 0..b.cols {
            x.set(pc, j, r.at(k, m.cols + j).clone());
        }
    }
    Some(x)
}

/// Exact inverse of a square matrix, or `None` when singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    if m.rows != m.cols {
        return None;
    }
    let x = solve_matrix(m, &Matrix::identity(m.rows))?;
    if (m * &x) == Matrix::identity(m.rows) {
        Some(x)
    } else {
        None
    }
}

/// Largest absolute value among the entries (zero for an empty slice).
pub fn max_abs(values: &[Rational]) -> Rational {
    values
        .iter()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rref_rank_one() {
        let m = Matrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        let (r, pivots) = rref(&m);
        assert_eq!(r, Matrix::from_int_rows(&[&[1, 2], &[0, 0]]));
        assert_eq!(pivots, vec![0]);
    }

    #[test]
    fn rref_identity() {
        let m = Matrix::identity(3);
        let (r, pivots) = rref(&m);
        assert_eq!(r, Matrix::identity(3));
        assert_eq!(pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_zero() {
        let m = Matrix::zero(2, 2);
        let (r, pivots) = rref(&m);
        assert_eq!(r, Matrix::zero(2, 2));
        assert!(pivots.is_empty());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Matrix::identity(4)), 4);
        assert_eq!(rank(&Matrix::zero(5, 3)), 0);
        assert_eq!(rank(&Matrix::from_int_rows(&[&[1, 2], &[2, 4], &[3, 6]])), 1);
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(nullspace(&Matrix::identity(2)).cols(), 0);
        assert_eq!(nullspace(&Matrix::zero(2, 2)), Matrix::identity(2));
        // Canonical form: 1 in the free slot.
        let n = nullspace(&Matrix::from_int_rows(&[&[1, 1]]));
        assert_eq!(n, Matrix::from_int_rows(&[&[-1], &[1]]));
    }

    #[test]
    fn solve_examples() {
        let id = Matrix::identity(2);
        assert_eq!(
            solve(&id, &[rat_int(3), rat_int(5)]),
            Some(vec![rat_int(3), rat_int(5)])
        );
        // Free variable zeroed.
        assert_eq!(
            solve(&Matrix::from_int_rows(&[&[1, 1]]), &[rat_int(2)]),
            Some(vec![rat_int(2), rat_int(0)])
        );
        // Inconsistent.
        assert_eq!(
            solve(&Matrix::from_int_rows(&[&[1], &[1]]), &[rat_int(1), rat_int(2)]),
            None
        );
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_int_rows(&[&[3, 5], &[0, 7]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(&m * &inv, Matrix::identity(2));
        assert!(inverse(&Matrix::from_int_rows(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn empty_shapes() {
        let m = Matrix::zero(0, 3);
        assert_eq!(rank(&m), 0);
        assert_eq!(nullspace(&m), Matrix::identity(3));
        let n = Matrix::zero(3, 0);
        assert_eq!(rank(&n), 0);
        assert_eq!(nullspace(&n).cols(), 0);
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-9i64..=9, 1i64..=9).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(arb_rational(), r * c)
                .prop_map(move |data| Matrix::new(r, c, data))
        })
    }

    proptest! {
        #[test]
        fn rank_bounds_and_nullity(m in arb_matrix()) {
            let rk = rank(&m);
            prop_assert!(rk <= m.rows().min(m.cols()));
            prop_assert_eq!(rk + nullspace(&m).cols(), m.cols());
        }

        #[test]
        fn nullspace_is_exact_kernel(m in arb_matrix()) {
            let n = nullspace(&m);
            if n.cols() > 0 {
                prop_assert!((&m * &n).is_zero());
            }
        }

        #[test]
        fn rref_idempotent(m in arb_matrix()) {
            let (r, _) = rref(&m);
            let (rr, _) = rref(&r);
            prop_assert_eq!(r, rr);
        }

        #[test]
        fn deterministic(m in arb_matrix()) {
            prop_assert_eq!(rref(&m), rref(&m.clone()));
        }

        #[test]
        fn solve_satisfies_system(m in arb_matrix(), seed in proptest::collection::vec(arb_rational(), 1..5)) {
            // Build a consistent rhs from a known preimage.
            let x: Vec<Rational> = (0..m.cols()).map(|j| seed[j % seed.len()].clone()).collect();
            let b = m.mul_vec(&x);
            let sol = solve(&m, &b).expect("consistent by construction");
            prop_assert_eq!(m.mul_vec(&sol), b);
        }
    }
}

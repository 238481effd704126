//! Dense coordinate storage for multilinear maps `L^arity -> V`.
//!
//! Index layout is lexicographic with the output coordinate fastest:
//! `idx(a_1,..,a_q, o) = ((a_1 * dim + a_2) * dim + ...) * out_dim + o`.

use num_traits::Zero;

use crate::linalg::{Matrix, Rational};

/// A multilinear map stored as a coordinate tensor: the value on a basis
/// tuple `(e_{a_1},...,e_{a_q})` is the `out_dim`-vector at that tuple.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorMap {
    arity: usize,
    dim: usize,
    out_dim: usize,
    data: Vec<Rational>,
}

impl TensorMap {
    pub fn zero(arity: usize, dim: usize, out_dim: usize) -> Self {
        let len = dim.pow(arity as u32) * out_dim;
        TensorMap {
            arity,
            dim,
            out_dim,
            data: vec![Rational::zero(); len],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// Number of stored coordinates, `dim^arity * out_dim`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.data
    }

    pub fn coords_mut(&mut self) -> &mut [Rational] {
        &mut self.data
    }

    pub fn from_coords(arity: usize, dim: usize, out_dim: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), dim.pow(arity as u32) * out_dim);
        TensorMap {
            arity,
            dim,
            out_dim,
            data,
        }
    }

    /// Flat index of the value block for an argument tuple.
    pub fn tuple_index(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        let mut idx = 0usize;
        for &a in args {
            debug_assert!(a < self.dim);
            idx = idx * self.dim + a;
        }
        idx * self.out_dim
    }

    /// Output vector on a basis tuple.
    pub fn value(&self, args: &[usize]) -> &[Rational] {
        let base = self.tuple_index(args);
        &self.data[base..base + self.out_dim]
    }

    pub fn get(&self, args: &[usize], out: usize) -> &Rational {
        &self.data[self.tuple_index(args) + out]
    }

    pub fn set(&mut self, args: &[usize], out: usize, v: Rational) {
        let i = self.tuple_index(args) + out;
        self.data[i] = v;
    }

    pub fn add_at(&mut self, args: &[usize], out: usize, v: &Rational) {
        let i = self.tuple_index(args) + out;
        self.data[i] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn add(&self, other: &TensorMap) -> TensorMap {
        assert_eq!(self.shape(), other.shape());
        TensorMap {
            arity: self.arity,
            dim: self.dim,
            out_dim: self.out_dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &TensorMap) -> TensorMap {
        assert_eq!(self.shape(), other.shape());
        TensorMap {
            arity: self.arity,
            dim: self.dim,
            out_dim: self.out_dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> TensorMap {
        TensorMap {
            arity: self.arity,
            dim: self.dim,
            out_dim: self.out_dim,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    pub fn neg(&self) -> TensorMap {
        TensorMap {
            arity: self.arity,
            dim: self.dim,
            out_dim: self.out_dim,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }

    fn shape(&self) -> (usize, usize, usize) {
        (self.arity, self.dim, self.out_dim)
    }

    /// Iterate over argument tuples in lexicographic order, yielding the
    /// tuple and the flat base index of its value block.
    pub fn tuples(&self) -> TupleIter {
        TupleIter::new(self.arity, self.dim, self.out_dim)
    }

    /// Nonzero entries as `(args, out, value)`.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (Vec<usize>, usize, &Rational)> + '_ {
        self.tuples().flat_map(move |(args, base)| {
            (0..self.out_dim).filter_map(move |o| {
                let v = &self.data[base + o];
                if v.is_zero() {
                    None
                } else {
                    Some((args.clone(), o, v))
                }
            })
        })
    }

    /// An arity-1 tensor as the matrix sending `e_a` to its value block.
    pub fn to_matrix(&self) -> Matrix {
        assert_eq!(self.arity, 1);
        Matrix::from_fn(self.out_dim, self.dim, |s, a| self.data[a * self.out_dim + s].clone())
    }

    /// A linear map matrix (`out_dim x dim`) as an arity-1 tensor.
    pub fn from_matrix(m: &Matrix) -> TensorMap {
        let (out_dim, dim) = (m.rows(), m.cols());
        let mut t = TensorMap::zero(1, dim, out_dim);
        for a in 0..dim {
            for s in 0..out_dim {
                t.data[a * out_dim + s] = m.at(s, a).clone();
            }
        }
        t
    }
}

/// Lexicographic iterator over `dim^arity` tuples.
pub struct TupleIter {
    arity: usize,
    dim: usize,
    out_dim: usize,
    i: usize,
    n: usize,
}

impl TupleIter {
    fn new(arity: usize, dim: usize, out_dim: usize) -> Self {
        let n = dim.pow(arity as u32);
        TupleIter {
            arity,
            dim,
            out_dim,
            i: 0,
            n,
        }
    }
}

impl Iterator for TupleIter {
    type Item = (Vec<usize>, usize);

    fn next(&mut self) -> Option<Self::Item> {
        if self.i == self.n {
            return None;
        }
        let args = unrank(self.i, self.arity, self.dim);
        let item = (args, self.i * self.out_dim);
        self.i += 1;
        Some(item)
    }
}

/// Decode a flat tuple rank into its argument list.
pub fn unrank(mut idx: usize, arity: usize, dim: usize) -> Vec<usize> {
    let mut args = vec![0usize; arity];
    for slot in (0..arity).rev() {
        args[slot] = idx % dim;
        idx /= dim;
    }
    args
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_int;

    #[test]
    fn index_round_trip() {
        let t = TensorMap::zero(3, 4, 2);
        let args = [1usize, 3, 2];
        let base = t.tuple_index(&args);
        assert_eq!(base, ((4 + 3) * 4 + 2) * 2);
        assert_eq!(unrank(base / 2, 3, 4), vec![1, 3, 2]);
    }

    #[test]
    fn matrix_round_trip() {
        let m = Matrix::from_int_rows(&[&[1, 2, 3], &[4, 5, 6]]);
        let t = TensorMap::from_matrix(&m);
        assert_eq!(t.to_matrix(), m);
        assert_eq!(t.get(&[1], 0), &rat_int(2));
    }
}

//! Deterministic sampling of small rationals for seeded property-style
//! checks. A SplitMix64 stream keeps runs reproducible across platforms.

use crate::linalg::{rat, Matrix, Rational};
use crate::tensor::TensorMap;

/// Seeded generator producing rationals with numerators in `[-9, 9]` and
/// denominators in `[1, 9]`.
pub struct Sampler {
    state: u64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn rational(&mut self) -> Rational {
        let n = (self.next_u64() % 19) as i64 - 9;
        let d = (self.next_u64() % 9) as i64 + 1;
        rat(n, d)
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| self.rational())
    }

    pub fn vector(&mut self, len: usize) -> Vec<Rational> {
        (0..len).map(|_| self.rational()).collect()
    }

    pub fn tensor(&mut self, arity: usize, dim: usize, out_dim: usize) -> TensorMap {
        let len = dim.pow(arity as u32) * out_dim;
        TensorMap::from_coords(arity, dim, out_dim, self.vector(len))
    }
}

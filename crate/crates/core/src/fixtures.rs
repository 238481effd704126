//! Small example systems used across the test suites and shipped as JSON
//! files under `fixtures/` at the repository root.

use crate::linalg::{rat_int, Matrix};
use crate::lts::{LieAlgebra, Mdlts, ModifiedDifferential, TripleSystem};

/// Two-dimensional system with `[u1, u2, u2] = u1` and the operator
/// `d = [[k, k1], [0, k2]]` of weight `-2 k2` (valid for every choice of
/// `k`, `k1`, `k2`).
pub fn two_dim(k: i64, k1: i64, k2: i64) -> Mdlts {
    let lts = TripleSystem::new(2, [([0, 1, 1], 0, rat_int(1))], true).unwrap();
    let d = Matrix::from_int_rows(&[&[k, k1], &[0, k2]]);
    Mdlts::new(lts, ModifiedDifferential::new(d, rat_int(-2 * k2))).unwrap()
}

/// Four-dimensional system with `[u1, u2, u1] = u4` and the operator
/// `d = [[1,0,k1,0],[0,1,k2,0],[0,0,k3,0],[0,0,k4,k]]` of weight `k - 3`.
///
/// The operator satisfies the modified Leibniz rule only when `k1 = k2 = 0`
/// (the image of `u3` must stay inside span{u3, u4}, otherwise the triple
/// `(u1, u2, u3)` produces an uncancelled `[u1, u2, u1]` term); `k3`, `k4`
/// and `k` are free. The triple system itself is valid for all parameters.
pub fn four_dim(k: i64, ks: [i64; 4]) -> Mdlts {
    let [k1, k2, k3, k4] = ks;
    let lts = TripleSystem::new(4, [([0, 1, 0], 3, rat_int(1))], true).unwrap();
    let d = Matrix::from_int_rows(&[
        &[1, 0, k1, 0],
        &[0, 1, k2, 0],
        &[0, 0, k3, 0],
        &[0, 0, k4, k],
    ]);
    Mdlts::new(lts, ModifiedDifferential::new(d, rat_int(k - 3))).unwrap()
}

/// Zero bracket, zero differential, zero weight.
pub fn abelian(dim: usize) -> Mdlts {
    Mdlts::new(
        TripleSystem::abelian(dim),
        ModifiedDifferential::new(Matrix::zero(dim, dim), rat_int(0)),
    )
    .unwrap()
}

/// Two-dimensional Lie algebra `[e1, e2] = e1` with `d = [[p, q], [0, r]]`
/// of weight `-r`; inducing a triple system from it reproduces [`two_dim`]
/// with doubled weight.
pub fn lie_two_dim(p: i64, q: i64, r: i64) -> LieAlgebra {
    LieAlgebra::new(
        2,
        [([0, 1], 0, rat_int(1))],
        Matrix::from_int_rows(&[&[p, q], &[0, r]]),
        rat_int(-r),
    )
    .unwrap()
}

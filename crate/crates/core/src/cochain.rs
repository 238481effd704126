//! Odd-degree cochain spaces over constrained bases, the coboundary
//! `delta`, the weight map `phi`, and the pair differential `partial`.
//!
//! A degree-`2n-1` cochain is a multilinear map `L^(2n-1) -> V` stored as a
//! coordinate tensor. For degree >= 3 the space is cut out by two linear
//! constraint families acting on the final three arguments:
//! skew-symmetry in the first two of them and a vanishing cyclic sum over
//! all three. Degree 1 is the full space `Hom(L, V)`.
//!
//! The basis of a constrained space is the canonical nullspace of the
//! stacked constraint matrix over the full tensor space, ordered by
//! increasing free coordinate. Because every constraint touches a fixed
//! block of argument slots, that nullspace factors as a tensor product of
//! small per-block nullspaces; the builder exploits this instead of
//! eliminating the full stacked matrix, and the unit tests pin the result
//! against the dense computation.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{nullspace_free, Matrix, Rational};
use crate::lts::{ModifiedDifferential, Representation, TripleSystem};
use crate::par;
use crate::tensor::{unrank, TensorMap};

/// Which cochain space the complex is built over.
///
/// `Minimal` constrains only the final three arguments. `Strengthened`
/// additionally imposes skew-symmetry in each leading argument pair
/// `(a_1,a_2), (a_3,a_4), ...`; it is the fallback when a coboundary image
/// leaves the minimal span at higher degrees. The two spaces agree at
/// degrees 1 and 3.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CochainSpace {
    Minimal,
    Strengthened,
}

impl fmt::Display for CochainSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CochainSpace::Minimal => f.write_str("minimal"),
            CochainSpace::Strengthened => f.write_str("strengthened"),
        }
    }
}

/// Size budget for cochain computations.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Maximum number of tensor coordinates `dim^degree * vdim`.
    pub max_coords: usize,
    /// Maximum cochain degree.
    pub max_degree: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_coords: 200_000,
            max_degree: 7,
        }
    }
}

/// Basis of a constrained cochain space. Columns are stored sparsely; each
/// column carries a `1` at its free coordinate and zeros at every other
/// free coordinate, so expressing a member in the basis is a lookup.
#[derive(Clone, Debug)]
pub struct CochainBasis {
    degree: usize,
    dim: usize,
    out_dim: usize,
    space: CochainSpace,
    free: Vec<usize>,
    cols: Vec<Vec<(usize, Rational)>>,
}

impl CochainBasis {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn space(&self) -> CochainSpace {
        self.space
    }

    /// Dimension of the constrained space.
    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    /// Dimension of the ambient tensor space.
    pub fn ambient(&self) -> usize {
        self.dim.pow(self.degree as u32) * self.out_dim
    }

    /// Dense expansion of one basis column as a cochain.
    pub fn member(&self, j: usize) -> TensorMap {
        let mut data = vec![Rational::zero(); self.ambient()];
        for (pos, v) in &self.cols[j] {
            data[*pos] = v.clone();
        }
        TensorMap::from_coords(self.degree, self.dim, self.out_dim, data)
    }

    /// Coordinates of a dense tensor in this basis, assuming membership.
    pub fn coords_unchecked(&self, dense: &[Rational]) -> Vec<Rational> {
        self.free.iter().map(|&p| dense[p].clone()).collect()
    }

    /// Coordinates of a dense tensor, or `None` when it lies outside the
    /// span (the closure test).
    pub fn coords_of(&self, dense: &[Rational]) -> Option<Vec<Rational>> {
        let coords = self.coords_unchecked(dense);
        let mut recon = vec![Rational::zero(); self.ambient()];
        for (c, col) in coords.iter().zip(&self.cols) {
            if c.is_zero() {
                continue;
            }
            for (pos, v) in col {
                recon[*pos] += c * v;
            }
        }
        if recon == dense {
            Some(coords)
        } else {
            None
        }
    }

    /// Dense tensor from basis coordinates.
    pub fn reconstruct(&self, coords: &[Rational]) -> TensorMap {
        assert_eq!(coords.len(), self.len());
        let mut data = vec![Rational::zero(); self.ambient()];
        for (c, col) in coords.iter().zip(&self.cols) {
            if c.is_zero() {
                continue;
            }
            for (pos, v) in col {
                data[*pos] += c * v;
            }
        }
        TensorMap::from_coords(self.degree, self.dim, self.out_dim, data)
    }

    /// All columns expanded into a dense matrix (ambient x len).
    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zero(self.ambient(), self.len());
        for (j, col) in self.cols.iter().enumerate() {
            for (pos, v) in col {
                m.set(*pos, j, v.clone());
            }
        }
        m
    }
}

/// One factor of the tensor-product structure of a constraint system.
struct Factor {
    size: usize,
    free: Vec<usize>,
    cols: Vec<Vec<(usize, Rational)>>,
}

impl Factor {
    fn identity(size: usize) -> Factor {
        Factor {
            size,
            free: (0..size).collect(),
            cols: (0..size).map(|i| vec![(i, Rational::one())]).collect(),
        }
    }

    fn from_constraints(size: usize, constraints: Matrix) -> Factor {
        let (basis, free) = nullspace_free(&constraints);
        let cols = (0..basis.cols())
            .map(|j| {
                (0..size)
                    .filter(|&i| !basis.at(i, j).is_zero())
                    .map(|i| (i, basis.at(i, j).clone()))
                    .collect()
            })
            .collect();
        Factor { size, free, cols }
    }
}

/// Skew + cyclic constraints on a trilinear scalar block of size `dim^3`.
fn tail_factor(dim: usize) -> Factor {
    let cube = dim * dim * dim;
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(2 * cube);
    let flat = |a: usize, b: usize, c: usize| (a * dim + b) * dim + c;
    for t in 0..cube {
        let abc = unrank(t, 3, dim);
        let (a, b, c) = (abc[0], abc[1], abc[2]);
        let mut skew = vec![Rational::zero(); cube];
        skew[flat(a, b, c)] += Rational::one();
        skew[flat(b, a, c)] += Rational::one();
        rows.push(skew);
        let mut cyc = vec![Rational::zero(); cube];
        cyc[flat(a, b, c)] += Rational::one();
        cyc[flat(c, a, b)] += Rational::one();
        cyc[flat(b, c, a)] += Rational::one();
        rows.push(cyc);
    }
    Factor::from_constraints(cube, Matrix::from_rows(rows))
}

/// Skew constraint on a bilinear scalar block of size `dim^2`.
fn pair_factor(dim: usize) -> Factor {
    let sq = dim * dim;
    let mut rows = Vec::with_capacity(sq);
    for t in 0..sq {
        let (a, b) = (t / dim, t % dim);
        let mut row = vec![Rational::zero(); sq];
        row[a * dim + b] += Rational::one();
        row[b * dim + a] += Rational::one();
        rows.push(row);
    }
    Factor::from_constraints(sq, Matrix::from_rows(rows))
}

fn check_limits(dim: usize, out_dim: usize, degree: usize, limits: &Limits) -> Result<(), Error> {
    if degree > limits.max_degree {
        return Err(Error::DegreeLimit {
            degree,
            max: limits.max_degree,
        });
    }
    let required = dim
        .checked_pow(degree as u32)
        .and_then(|n| n.checked_mul(out_dim))
        .ok_or(Error::ResourceLimit {
            required: usize::MAX,
            limit: limits.max_coords,
        })?;
    if required > limits.max_coords {
        return Err(Error::ResourceLimit {
            required,
            limit: limits.max_coords,
        });
    }
    Ok(())
}

/// Canonical basis of the constrained cochain space of the given odd degree.
pub fn cochain_basis(
    dim: usize,
    out_dim: usize,
    degree: usize,
    space: CochainSpace,
    limits: &Limits,
) -> Result<CochainBasis, Error> {
    if degree.is_multiple_of(2) || degree == 0 {
        return Err(Error::InvalidInput(format!(
            "cochain degree must be odd and positive, got {degree}"
        )));
    }
    check_limits(dim, out_dim, degree, limits)?;

    let mut factors: Vec<Factor> = Vec::new();
    if degree == 1 {
        factors.push(Factor::identity(dim));
    } else {
        let leading_pairs = (degree - 3) / 2;
        for _ in 0..leading_pairs {
            match space {
                CochainSpace::Minimal => factors.push(Factor::identity(dim * dim)),
                CochainSpace::Strengthened => factors.push(pair_factor(dim)),
            }
        }
        factors.push(tail_factor(dim));
    }
    factors.push(Factor::identity(out_dim));

    // Cartesian product of factor columns, outermost factor slowest, which
    // lists global free coordinates in increasing order.
    let counts: Vec<usize> = factors.iter().map(|f| f.cols.len()).collect();
    let total: usize = counts.iter().product();
    let mut free = Vec::with_capacity(total);
    let mut cols = Vec::with_capacity(total);
    for rank in 0..total {
        let mut idx = rank;
        let mut combo = vec![0usize; factors.len()];
        for k in (0..factors.len()).rev() {
            combo[k] = idx % counts[k];
            idx /= counts[k];
        }
        let mut pos = 0usize;
        let mut entries: Vec<(usize, Rational)> = vec![(0, Rational::one())];
        for (f, &j) in factors.iter().zip(&combo) {
            pos = pos * f.size + f.free[j];
            let mut next = Vec::with_capacity(entries.len() * f.cols[j].len());
            for (p, v) in &entries {
                for (p2, v2) in &f.cols[j] {
                    next.push((p * f.size + p2, v * v2));
                }
            }
            entries = next;
        }
        free.push(pos);
        cols.push(entries);
    }

    Ok(CochainBasis {
        degree,
        dim,
        out_dim,
        space,
        free,
        cols,
    })
}

/// Convenience wrapper: minimal space, default limits.
pub fn constrained_basis(
    t: &TripleSystem,
    r: &Representation,
    degree: usize,
) -> Result<CochainBasis, Error> {
    cochain_basis(
        t.dim(),
        r.vdim(),
        degree,
        CochainSpace::Minimal,
        &Limits::default(),
    )
}

/// Direct membership test for the constraint families of a space.
pub fn in_space(f: &TensorMap, space: CochainSpace) -> bool {
    let q = f.arity();
    if q == 1 {
        return true;
    }
    let out = f.out_dim();
    for (args, base) in f.tuples() {
        // Tail skew: swap the two slots before the last.
        let mut swapped = args.clone();
        swapped.swap(q - 3, q - 2);
        let sbase = f.tuple_index(&swapped);
        for o in 0..out {
            if !(&f.coords()[base + o] + &f.coords()[sbase + o]).is_zero() {
                return false;
            }
        }
        // Tail cyclic sum over the last three slots.
        let mut rot1 = args.clone();
        rot1[q - 3] = args[q - 1];
        rot1[q - 2] = args[q - 3];
        rot1[q - 1] = args[q - 2];
        let mut rot2 = args.clone();
        rot2[q - 3] = args[q - 2];
        rot2[q - 2] = args[q - 1];
        rot2[q - 1] = args[q - 3];
        let b1 = f.tuple_index(&rot1);
        let b2 = f.tuple_index(&rot2);
        for o in 0..out {
            let sum = &(&f.coords()[base + o] + &f.coords()[b1 + o]) + &f.coords()[b2 + o];
            if !sum.is_zero() {
                return false;
            }
        }
        if space == CochainSpace::Strengthened {
            for i in 0..(q - 3) / 2 {
                let mut sw = args.clone();
                sw.swap(2 * i, 2 * i + 1);
                let sb = f.tuple_index(&sw);
                for o in 0..out {
                    if !(&f.coords()[base + o] + &f.coords()[sb + o]).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn mat_vec_add(buf: &mut [Rational], m: &Matrix, v: &[Rational], negate: bool) {
    for (i, cell) in buf.iter_mut().enumerate() {
        let mut acc = Rational::zero();
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let a = m.at(i, j);
            if !a.is_zero() {
                acc += a * vj;
            }
        }
        if negate {
            *cell -= acc;
        } else {
            *cell += acc;
        }
    }
}

fn vec_all_zero(v: &[Rational]) -> bool {
    v.iter().all(Rational::is_zero)
}

/// Coboundary raising the degree by two.
///
/// For input degree `2n-1` and arguments `a_1, ..., a_{2n+1}`:
///
/// ```text
/// delta f = theta(a_{2n}, a_{2n+1}) f(a_1,..,a_{2n-1})
///         - theta(a_{2n-1}, a_{2n+1}) f(a_1,..,a_{2n-2}, a_{2n})
///         + sum_{i=1..n} (-1)^{i+n} D(a_{2i-1}, a_{2i}) f(.. without the pair ..)
///         + sum_{i=1..n} sum_{j=2i+1..2n+1} (-1)^{i+n+1}
///               f(.. without the pair, a_j replaced by [a_{2i-1}, a_{2i}, a_j] ..)
/// ```
pub fn delta(t: &TripleSystem, r: &Representation, f: &TensorMap) -> TensorMap {
    let q_in = f.arity();
    assert!(q_in % 2 == 1, "cochain degree must be odd");
    assert_eq!(f.dim(), t.dim());
    assert_eq!(f.out_dim(), r.vdim());
    let n = q_in.div_ceil(2);
    let q_out = q_in + 2;
    let dim = t.dim();
    let vdim = r.vdim();
    let sparse = t.bracket_sparse();
    let flat = |a: usize, b: usize, c: usize| (a * dim + b) * dim + c;
    let tuples = dim.pow(q_out as u32);

    let blocks = par::map_indexed(tuples, |rank| {
        let args = unrank(rank, q_out, dim);
        let mut buf = vec![Rational::zero(); vdim];

        // theta(a_{2n}, a_{2n+1}) f(a_1..a_{2n-1})
        let v1 = f.value(&args[..q_in]);
        if !vec_all_zero(v1) {
            mat_vec_add(&mut buf, r.theta(args[q_out - 2], args[q_out - 1]), v1, false);
        }

        // -theta(a_{2n-1}, a_{2n+1}) f(a_1..a_{2n-2}, a_{2n})
        let mut args2: Vec<usize> = args[..q_out - 3].to_vec();
        args2.push(args[q_out - 2]);
        let v2 = f.value(&args2);
        if !vec_all_zero(v2) {
            mat_vec_add(&mut buf, r.theta(args[q_out - 3], args[q_out - 1]), v2, true);
        }

        for i in 1..=n {
            let positive = (i + n).is_multiple_of(2);
            let (p, q) = (args[2 * i - 2], args[2 * i - 1]);
            let mut reduced: Vec<usize> = Vec::with_capacity(q_in);
            reduced.extend_from_slice(&args[..2 * i - 2]);
            reduced.extend_from_slice(&args[2 * i..]);

            // D-term.
            let v = f.value(&reduced);
            if !vec_all_zero(v) {
                mat_vec_add(&mut buf, &r.d_action(p, q), v, !positive);
            }

            // Bracket substitution terms, opposite sign.
            for j in (2 * i + 1)..=q_out {
                let target = j - 1; // 0-indexed original slot
                let outputs = &sparse[flat(p, q, args[target])];
                if outputs.is_empty() {
                    continue;
                }
                let reduced_slot = target - 2;
                let mut sub = reduced.clone();
                for (m_idx, w) in outputs {
                    sub[reduced_slot] = *m_idx;
                    let v = f.value(&sub);
                    if vec_all_zero(v) {
                        continue;
                    }
                    for (cell, vj) in buf.iter_mut().zip(v) {
                        if vj.is_zero() {
                            continue;
                        }
                        let term = w * vj;
                        if positive {
                            *cell -= term;
                        } else {
                            *cell += term;
                        }
                    }
                }
            }
        }
        buf
    });

    TensorMap::from_coords(q_out, dim, vdim, blocks.into_iter().flatten().collect())
}

/// Degree-preserving weight map:
/// `phi f = sum_i f(.., d(a_i), ..) + (n-1) lambda f - d_V (f)` for a
/// degree-`2n-1` cochain.
pub fn phi(m: &ModifiedDifferential, r: &Representation, f: &TensorMap) -> TensorMap {
    let q = f.arity();
    assert!(q % 2 == 1, "cochain degree must be odd");
    let n = q.div_ceil(2);
    let dim = f.dim();
    let vdim = f.out_dim();
    assert_eq!(vdim, r.vdim());
    let weight = &m.lambda * Rational::from_integer(((n as i64) - 1).into());
    let tuples = dim.pow(q as u32);

    let blocks = par::map_indexed(tuples, |rank| {
        let args = unrank(rank, q, dim);
        let mut buf = vec![Rational::zero(); vdim];
        let base = f.value(&args);
        if !vec_all_zero(base) {
            if !weight.is_zero() {
                for (cell, v) in buf.iter_mut().zip(base) {
                    *cell += &weight * v;
                }
            }
            mat_vec_add(&mut buf, r.dv(), base, true);
        }
        let mut sub = args.clone();
        for slot in 0..q {
            for p in 0..dim {
                let w = m.d.at(p, args[slot]);
                if w.is_zero() {
                    continue;
                }
                sub[slot] = p;
                let v = f.value(&sub);
                for (cell, vj) in buf.iter_mut().zip(v) {
                    if !vj.is_zero() {
                        *cell += w * vj;
                    }
                }
            }
            sub[slot] = args[slot];
        }
        buf
    });

    TensorMap::from_coords(q, dim, vdim, blocks.into_iter().flatten().collect())
}

/// Element of the pair complex at level `n`: a degree-`2n-1` cochain `f`
/// together with a degree-`2n-3` cochain `g` (absent at level 1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CochainPair {
    pub level: usize,
    pub f: TensorMap,
    pub g: Option<TensorMap>,
}

impl CochainPair {
    pub fn new(level: usize, f: TensorMap, g: Option<TensorMap>) -> Self {
        assert!(level >= 1);
        assert_eq!(f.arity(), 2 * level - 1, "f degree must be 2*level - 1");
        match (&g, level) {
            (None, 1) => {}
            (Some(g), l) if l >= 2 => assert_eq!(g.arity(), 2 * l - 3),
            _ => panic!("pair component g must be present exactly when level >= 2"),
        }
        CochainPair { level, f, g }
    }

    pub fn zero(level: usize, dim: usize, out_dim: usize) -> Self {
        let f = TensorMap::zero(2 * level - 1, dim, out_dim);
        let g = (level >= 2).then(|| TensorMap::zero(2 * level - 3, dim, out_dim));
        CochainPair { level, f, g }
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero() && self.g.as_ref().is_none_or(TensorMap::is_zero)
    }

    pub fn add(&self, other: &CochainPair) -> CochainPair {
        assert_eq!(self.level, other.level);
        CochainPair {
            level: self.level,
            f: self.f.add(&other.f),
            g: self
                .g
                .as_ref()
                .map(|g| g.add(other.g.as_ref().expect("same level"))),
        }
    }

    pub fn sub(&self, other: &CochainPair) -> CochainPair {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> CochainPair {
        CochainPair {
            level: self.level,
            f: self.f.scale(k),
            g: self.g.as_ref().map(|g| g.scale(k)),
        }
    }

    /// Largest absolute coordinate across both components.
    pub fn max_abs(&self) -> Rational {
        let mut best = crate::linalg::max_abs(self.f.coords());
        if let Some(g) = &self.g {
            let gb = crate::linalg::max_abs(g.coords());
            if gb > best {
                best = gb;
            }
        }
        best
    }
}

/// Pair differential: level `n` maps to level `n+1` by
/// `(f, g) -> (delta f, delta g + (-1)^n phi f)`, with the `delta g` term
/// absent at level 1.
pub fn partial(
    t: &TripleSystem,
    m: &ModifiedDifferential,
    r: &Representation,
    x: &CochainPair,
) -> CochainPair {
    let n = x.level;
    let df = delta(t, r, &x.f);
    let mut second = phi(m, r, &x.f);
    if n % 2 == 1 {
        second = second.neg();
    }
    if let Some(g) = &x.g {
        second = delta(t, r, g).add(&second);
    }
    CochainPair::new(n + 1, df, Some(second))
}

/// Matrix of `delta` from one constrained basis to the one two degrees up.
/// Fails closure when some image leaves the target span.
pub fn delta_matrix(
    t: &TripleSystem,
    r: &Representation,
    src: &CochainBasis,
    dst: &CochainBasis,
) -> Result<Matrix, Error> {
    assert_eq!(dst.degree(), src.degree() + 2);
    let cols: Vec<Result<Vec<Rational>, Error>> = par::map_indexed(src.len(), |j| {
        let image = delta(t, r, &src.member(j));
        dst.coords_of(image.coords()).ok_or(Error::ClosureFailure {
            degree: dst.degree(),
            space: dst.space(),
        })
    });
    let cols = cols.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_cols(dst.len(), cols))
}

/// Matrix of `phi` on a constrained basis (degree-preserving).
pub fn phi_matrix(
    m: &ModifiedDifferential,
    r: &Representation,
    basis: &CochainBasis,
) -> Result<Matrix, Error> {
    let cols: Vec<Result<Vec<Rational>, Error>> = par::map_indexed(basis.len(), |j| {
        let image = phi(m, r, &basis.member(j));
        basis.coords_of(image.coords()).ok_or(Error::ClosureFailure {
            degree: basis.degree(),
            space: basis.space(),
        })
    });
    let cols = cols.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_cols(basis.len(), cols))
}

/// Matrix of the pair differential relative to constrained bases.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub level: usize,
    pub space: CochainSpace,
    pub matrix: Matrix,
    pub src_f: usize,
    pub src_g: usize,
    pub dst_f: usize,
    pub dst_g: usize,
}

/// Assemble the operator matrix at `level` in the given space.
///
/// Block structure: `[[delta_f, 0], [(-1)^level phi_f, delta_g]]`, the
/// `delta_g` column block being absent at level 1. Failure to express an
/// image in the target bases is a closure failure.
pub fn operator_matrix_in(
    t: &TripleSystem,
    m: &ModifiedDifferential,
    r: &Representation,
    level: usize,
    space: CochainSpace,
    limits: &Limits,
) -> Result<OperatorMatrix, Error> {
    assert!(level >= 1);
    let dim = t.dim();
    let vdim = r.vdim();
    let deg_f = 2 * level - 1;
    let bf = cochain_basis(dim, vdim, deg_f, space, limits)?;
    let bg = if level >= 2 {
        Some(cochain_basis(dim, vdim, deg_f - 2, space, limits)?)
    } else {
        None
    };
    let tf = cochain_basis(dim, vdim, deg_f + 2, space, limits)?;
    // The second target basis has the same degree and space as `bf`.
    let tg = &bf;

    let src_f = bf.len();
    let src_g = bg.as_ref().map_or(0, CochainBasis::len);
    let dst_f = tf.len();
    let dst_g = tg.len();

    let delta_f = delta_matrix(t, r, &bf, &tf)?;
    let mut phi_f = phi_matrix(m, r, &bf)?;
    if level % 2 == 1 {
        phi_f = -&phi_f;
    }

    let mut matrix = Matrix::zero(dst_f + dst_g, src_f + src_g);
    matrix.set_block(0, 0, &delta_f);
    matrix.set_block(dst_f, 0, &phi_f);
    if let Some(bg) = &bg {
        let delta_g = delta_matrix(t, r, bg, tg)?;
        matrix.set_block(dst_f, src_f, &delta_g);
    }

    Ok(OperatorMatrix {
        level,
        space,
        matrix,
        src_f,
        src_g,
        dst_f,
        dst_g,
    })
}

/// Assemble the operator matrix, retrying in the strengthened space when
/// the minimal space fails to close.
pub fn operator_matrix(
    t: &TripleSystem,
    m: &ModifiedDifferential,
    r: &Representation,
    level: usize,
) -> Result<OperatorMatrix, Error> {
    let limits = Limits::default();
    match operator_matrix_in(t, m, r, level, CochainSpace::Minimal, &limits) {
        Err(Error::ClosureFailure { .. }) => {
            operator_matrix_in(t, m, r, level, CochainSpace::Strengthened, &limits)
        }
        other => other,
    }
}

/// Express a pair cochain in the level bases, or fail closure.
pub fn pair_coords(
    x: &CochainPair,
    bf: &CochainBasis,
    bg: Option<&CochainBasis>,
) -> Result<Vec<Rational>, Error> {
    let mut coords = bf.coords_of(x.f.coords()).ok_or(Error::ClosureFailure {
        degree: x.f.arity(),
        space: bf.space(),
    })?;
    if let Some(g) = &x.g {
        let bg = bg.expect("level >= 2 needs a second basis");
        coords.extend(bg.coords_of(g.coords()).ok_or(Error::ClosureFailure {
            degree: g.arity(),
            space: bg.space(),
        })?);
    }
    Ok(coords)
}

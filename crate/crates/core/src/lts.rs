//! Lie triple systems, modified differentials, representations, their
//! validators, and the standard constructions.
//!
//! Conventions fixed once for the whole crate:
//! - structure constants: `[e_i, e_j, e_k] = sum_l c[i][j][k][l] e_l`;
//! - operator matrices act on coordinate columns: `d(e_j) = sum_i d[i][j] e_i`;
//! - the pair action `theta(e_i, e_j)` is a `vdim x vdim` matrix on the
//!   module, and `D(x,y) = theta(y,x) - theta(x,y)` is always derived,
//!   never stored.

use std::fmt;

use num_traits::Zero;

use crate::error::Error;
use crate::linalg::{rank, rat, Matrix, Rational};
use crate::par;
use crate::tensor::{unrank, TensorMap};

/// Whether a validator stops at the first violation or collects all.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CheckMode {
    FirstFailure,
    Exhaustive,
}

/// Identities a validator can report against.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Identity {
    /// Skew-symmetry of the bracket in its first two slots.
    Skew,
    /// Ternary cyclic identity.
    Cyclic,
    /// Five-argument derivation identity of the triple bracket.
    FiveTerm,
    /// Modified Leibniz rule for the differential on the triple bracket.
    ModifiedLeibniz,
    /// Pair-action compatibility of a representation.
    ActionPair,
    /// Commutator compatibility of a representation.
    ActionCommutator,
    /// Module differential compatibility.
    ActionDifferential,
    /// Derived commutator form of the module differential compatibility.
    ActionDifferentialDerived,
    /// Skew-symmetry of a binary Lie bracket.
    LieSkew,
    /// Jacobi identity of a binary Lie bracket.
    LieJacobi,
    /// Modified Leibniz rule on a binary Lie bracket.
    LieLeibniz,
    /// A linear map fails to intertwine the triple brackets.
    BracketMap,
    /// A linear map fails to intertwine the differentials.
    DifferentialMap,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Identity::Skew => "skew symmetry",
            Identity::Cyclic => "ternary cyclic identity",
            Identity::FiveTerm => "five-term derivation identity",
            Identity::ModifiedLeibniz => "modified Leibniz rule",
            Identity::ActionPair => "pair-action compatibility",
            Identity::ActionCommutator => "commutator compatibility",
            Identity::ActionDifferential => "module differential compatibility",
            Identity::ActionDifferentialDerived => "derived module differential compatibility",
            Identity::LieSkew => "Lie bracket skew symmetry",
            Identity::LieJacobi => "Jacobi identity",
            Identity::LieLeibniz => "modified Leibniz rule (binary)",
            Identity::BracketMap => "bracket intertwining",
            Identity::DifferentialMap => "differential intertwining",
        };
        f.write_str(s)
    }
}

/// One violated identity with the witness basis tuple and both sides'
/// coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub identity: Identity,
    pub tuple: Vec<usize>,
    pub lhs: Vec<Rational>,
    pub rhs: Vec<Rational>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated at tuple {:?}: lhs = [{}], rhs = [{}]",
            self.identity,
            self.tuple,
            self.lhs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "),
            self.rhs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "),
        )
    }
}

/// Outcome of a validator run.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(mut self, mut other: ValidationReport) -> ValidationReport {
        self.violations.append(&mut other.violations);
        self
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pass() {
            return f.write_str("pass");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Scan an index space for violations, honoring the check mode.
fn scan<F>(n: usize, mode: CheckMode, f: F) -> ValidationReport
where
    F: Fn(usize) -> Option<Violation> + Sync + Send,
{
    let violations = match mode {
        CheckMode::FirstFailure => par::find_first(n, f).into_iter().collect(),
        CheckMode::Exhaustive => par::map_indexed(n, f).into_iter().flatten().collect(),
    };
    ValidationReport { violations }
}

fn vec_zero(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}

fn vec_add_scaled(dst: &mut [Rational], src: &[Rational], k: &Rational) {
    if k.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d += k * s;
        }
    }
}

fn vec_is_zero(v: &[Rational]) -> bool {
    v.iter().all(Rational::is_zero)
}

// ---------------------------------------------------------------------------
// Core types
// ---------------------------------------------------------------------------

/// Finite-dimensional triple system given by its structure constants.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TripleSystem {
    dim: usize,
    bracket: TensorMap,
}

impl TripleSystem {
    /// Build from sparse entries `([i, j, k], l, value)`.
    ///
    /// With `complete_skew` the image of each entry under the slot swap
    /// `(i,j) -> (j,i)` is filled in with the opposite sign; explicitly
    /// contradictory entries are rejected.
    pub fn new(
        dim: usize,
        entries: impl IntoIterator<Item = ([usize; 3], usize, Rational)>,
        complete_skew: bool,
    ) -> Result<Self, Error> {
        let mut bracket = TensorMap::zero(3, dim, dim);
        let mut seen = std::collections::BTreeSet::new();
        for ([i, j, k], l, v) in entries {
            if i >= dim || j >= dim || k >= dim || l >= dim {
                return Err(Error::InvalidInput(format!(
                    "bracket index ({i},{j},{k} -> {l}) out of range for dimension {dim}"
                )));
            }
            if !seen.insert((i, j, k, l)) {
                return Err(Error::InvalidInput(format!(
                    "duplicate bracket entry ({i},{j},{k} -> {l})"
                )));
            }
            bracket.set(&[i, j, k], l, v);
        }
        if complete_skew {
            let mut completed = bracket.clone();
            for ([i, j, k], l, v) in bracket
                .iter_nonzero()
                .map(|(args, o, v)| ([args[0], args[1], args[2]], o, v.clone()))
                .collect::<Vec<_>>()
            {
                if i == j {
                    return Err(Error::InvalidInput(format!(
                        "skew completion: diagonal bracket ({i},{i},{k}) must be zero"
                    )));
                }
                let mirror = completed.get(&[j, i, k], l).clone();
                if seen.contains(&(j, i, k, l)) {
                    if mirror != -&v {
                        return Err(Error::InvalidInput(format!(
                            "skew completion: entries ({i},{j},{k}) and ({j},{i},{k}) conflict"
                        )));
                    }
                } else {
                    completed.set(&[j, i, k], l, -&v);
                }
            }
            bracket = completed;
        }
        Ok(TripleSystem { dim, bracket })
    }

    pub fn from_tensor(bracket: TensorMap) -> Result<Self, Error> {
        if bracket.arity() != 3 || bracket.dim() != bracket.out_dim() {
            return Err(Error::InvalidInput(
                "triple system tensor must be trilinear with matching output dimension".into(),
            ));
        }
        Ok(TripleSystem {
            dim: bracket.dim(),
            bracket,
        })
    }

    pub fn abelian(dim: usize) -> Self {
        TripleSystem {
            dim,
            bracket: TensorMap::zero(3, dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bracket(&self) -> &TensorMap {
        &self.bracket
    }

    /// Coordinates of `[e_i, e_j, e_k]`.
    pub fn bracket_at(&self, i: usize, j: usize, k: usize) -> &[Rational] {
        self.bracket.value(&[i, j, k])
    }

    /// Per-triple nonzero outputs, indexed by the flat rank of `(i,j,k)`.
    pub fn bracket_sparse(&self) -> Vec<Vec<(usize, Rational)>> {
        let d = self.dim;
        (0..d * d * d)
            .map(|t| {
                let args = unrank(t, 3, d);
                self.bracket
                    .value(&args)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(l, v)| (l, v.clone()))
                    .collect()
            })
            .collect()
    }

    /// Trilinear extension of the bracket to arbitrary coordinate vectors.
    #[allow(clippy::needless_range_loop)] // indexing by basis index reads clearer here
    pub fn bracket_vec(&self, x: &[Rational], y: &[Rational], z: &[Rational]) -> Vec<Rational> {
        let d = self.dim;
        let mut out = vec_zero(d);
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for k in 0..d {
                    if z[k].is_zero() {
                        continue;
                    }
                    let coeff = &xy * &z[k];
                    vec_add_scaled(&mut out, self.bracket_at(i, j, k), &coeff);
                }
            }
        }
        out
    }
}

/// A linear operator `d` with its weight.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModifiedDifferential {
    pub d: Matrix,
    pub lambda: Rational,
}

impl ModifiedDifferential {
    pub fn new(d: Matrix, lambda: Rational) -> Self {
        assert_eq!(d.rows(), d.cols(), "differential must be square");
        ModifiedDifferential { d, lambda }
    }
}

/// A triple system paired with a modified differential.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mdlts {
    pub lts: TripleSystem,
    pub mdo: ModifiedDifferential,
}

impl Mdlts {
    pub fn new(lts: TripleSystem, mdo: ModifiedDifferential) -> Result<Self, Error> {
        if mdo.d.rows() != lts.dim() {
            return Err(Error::Dimension {
                context: "modified differential",
                expected: lts.dim(),
                found: mdo.d.rows(),
            });
        }
        Ok(Mdlts { lts, mdo })
    }

    pub fn dim(&self) -> usize {
        self.lts.dim()
    }

    /// Run both component validators, short-circuiting.
    pub fn validate(&self) -> ValidationReport {
        let r = validate_lts(&self.lts);
        if !r.is_pass() {
            return r;
        }
        validate_mdo(&self.lts, &self.mdo)
    }
}

/// A module with a pair action and a module differential.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Representation {
    dim: usize,
    vdim: usize,
    theta: Vec<Matrix>,
    dv: Matrix,
}

impl Representation {
    pub fn new(dim: usize, vdim: usize, theta: Vec<Matrix>, dv: Matrix) -> Result<Self, Error> {
        if theta.len() != dim * dim {
            return Err(Error::Dimension {
                context: "pair action grid",
                expected: dim * dim,
                found: theta.len(),
            });
        }
        for m in &theta {
            if m.rows() != vdim || m.cols() != vdim {
                return Err(Error::Dimension {
                    context: "pair action matrix",
                    expected: vdim,
                    found: m.rows(),
                });
            }
        }
        if dv.rows() != vdim || dv.cols() != vdim {
            return Err(Error::Dimension {
                context: "module differential",
                expected: vdim,
                found: dv.rows(),
            });
        }
        Ok(Representation {
            dim,
            vdim,
            theta,
            dv,
        })
    }

    /// The zero action on a `vdim`-dimensional module.
    pub fn trivial(dim: usize, vdim: usize, dv: Matrix) -> Self {
        Representation::new(dim, vdim, vec![Matrix::zero(vdim, vdim); dim * dim], dv)
            .expect("shapes are consistent by construction")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vdim(&self) -> usize {
        self.vdim
    }

    pub fn theta(&self, i: usize, j: usize) -> &Matrix {
        &self.theta[i * self.dim + j]
    }

    pub fn dv(&self) -> &Matrix {
        &self.dv
    }

    /// Derived commutator action `D(e_i, e_j) = theta(e_j, e_i) - theta(e_i, e_j)`.
    pub fn d_action(&self, i: usize, j: usize) -> Matrix {
        self.theta(j, i) - self.theta(i, j)
    }
}

/// A binary Lie algebra with a weighted differential.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieAlgebra {
    pub dim: usize,
    pub bracket: TensorMap,
    pub d: Matrix,
    pub lambda: Rational,
}

impl LieAlgebra {
    pub fn new(
        dim: usize,
        entries: impl IntoIterator<Item = ([usize; 2], usize, Rational)>,
        d: Matrix,
        lambda: Rational,
    ) -> Result<Self, Error> {
        let mut bracket = TensorMap::zero(2, dim, dim);
        for ([i, j], l, v) in entries {
            if i >= dim || j >= dim || l >= dim {
                return Err(Error::InvalidInput("Lie bracket index out of range".into()));
            }
            bracket.set(&[i, j], l, v.clone());
            if i != j {
                bracket.set(&[j, i], l, -&v);
            }
        }
        if d.rows() != dim || d.cols() != dim {
            return Err(Error::Dimension {
                context: "Lie algebra differential",
                expected: dim,
                found: d.rows(),
            });
        }
        Ok(LieAlgebra {
            dim,
            bracket,
            d,
            lambda,
        })
    }
}

// ---------------------------------------------------------------------------
// Validators
// ---------------------------------------------------------------------------

/// Check the three defining identities of a triple system on every basis
/// tuple (multilinearity makes basis tuples sufficient). Short-circuits.
pub fn validate_lts(t: &TripleSystem) -> ValidationReport {
    validate_lts_with(t, CheckMode::FirstFailure)
}

pub fn validate_lts_with(t: &TripleSystem, mode: CheckMode) -> ValidationReport {
    let d = t.dim();
    let cube = d * d * d;

    // Skew symmetry in the first two slots.
    let skew = scan(cube, mode, |idx| {
        let args = unrank(idx, 3, d);
        let (i, j, k) = (args[0], args[1], args[2]);
        let lhs = t.bracket_at(i, j, k);
        let rhs: Vec<Rational> = t.bracket_at(j, i, k).iter().map(|v| -v).collect();
        if lhs != rhs.as_slice() {
            Some(Violation {
                identity: Identity::Skew,
                tuple: vec![i, j, k],
                lhs: lhs.to_vec(),
                rhs,
            })
        } else {
            None
        }
    });
    if mode == CheckMode::FirstFailure && !skew.is_pass() {
        return skew;
    }

    // Ternary cyclic identity.
    let cyclic = scan(cube, mode, |idx| {
        let args = unrank(idx, 3, d);
        let (i, j, k) = (args[0], args[1], args[2]);
        let mut sum = t.bracket_at(i, j, k).to_vec();
        for (p, q, r) in [(k, i, j), (j, k, i)] {
            for (s, v) in sum.iter_mut().zip(t.bracket_at(p, q, r)) {
                *s += v;
            }
        }
        if !vec_is_zero(&sum) {
            Some(Violation {
                identity: Identity::Cyclic,
                tuple: vec![i, j, k],
                lhs: sum,
                rhs: vec_zero(d),
            })
        } else {
            None
        }
    });
    if mode == CheckMode::FirstFailure && !cyclic.is_pass() {
        return cyclic;
    }

    // Five-term identity: [a,b,[x,y,z]] = [[a,b,x],y,z] + [x,[a,b,y],z] + [x,y,[a,b,z]].
    let sparse = t.bracket_sparse();
    let flat = |i: usize, j: usize, k: usize| (i * d + j) * d + k;
    let five = scan(cube * d * d, mode, |idx| {
        let args = unrank(idx, 5, d);
        let (a, b, x, y, z) = (args[0], args[1], args[2], args[3], args[4]);
        let mut lhs = vec_zero(d);
        for (m, w) in &sparse[flat(x, y, z)] {
            vec_add_scaled(&mut lhs, t.bracket_at(a, b, *m), w);
        }
        let mut rhs = vec_zero(d);
        for (m, w) in &sparse[flat(a, b, x)] {
            vec_add_scaled(&mut rhs, t.bracket_at(*m, y, z), w);
        }
        for (m, w) in &sparse[flat(a, b, y)] {
            vec_add_scaled(&mut rhs, t.bracket_at(x, *m, z), w);
        }
        for (m, w) in &sparse[flat(a, b, z)] {
            vec_add_scaled(&mut rhs, t.bracket_at(x, y, *m), w);
        }
        if lhs != rhs {
            Some(Violation {
                identity: Identity::FiveTerm,
                tuple: vec![a, b, x, y, z],
                lhs,
                rhs,
            })
        } else {
            None
        }
    });

    match mode {
        CheckMode::FirstFailure => five,
        CheckMode::Exhaustive => skew.merge(cyclic).merge(five),
    }
}

/// Check the modified Leibniz rule on every basis triple.
pub fn validate_mdo(t: &TripleSystem, m: &ModifiedDifferential) -> ValidationReport {
    validate_mdo_with(t, m, CheckMode::FirstFailure)
}

pub fn validate_mdo_with(t: &TripleSystem, m: &ModifiedDifferential, mode: CheckMode) -> ValidationReport {
    let d = t.dim();
    assert_eq!(m.d.rows(), d, "differential must be dim x dim");
    scan(d * d * d, mode, |idx| {
        let args = unrank(idx, 3, d);
        let (i, j, k) = (args[0], args[1], args[2]);
        // lhs: d applied to [e_i, e_j, e_k].
        let lhs = m.d.mul_vec(t.bracket_at(i, j, k));
        // rhs: bracket with d in each slot plus the weight term.
        let mut rhs = t.bracket_at(i, j, k).iter().map(|v| v * &m.lambda).collect::<Vec<_>>();
        for p in 0..d {
            let dpi = m.d.at(p, i);
            if !dpi.is_zero() {
                vec_add_scaled(&mut rhs, t.bracket_at(p, j, k), dpi);
            }
            let dpj = m.d.at(p, j);
            if !dpj.is_zero() {
                vec_add_scaled(&mut rhs, t.bracket_at(i, p, k), dpj);
            }
            let dpk = m.d.at(p, k);
            if !dpk.is_zero() {
                vec_add_scaled(&mut rhs, t.bracket_at(i, j, p), dpk);
            }
        }
        if lhs != rhs {
            Some(Violation {
                identity: Identity::ModifiedLeibniz,
                tuple: vec![i, j, k],
                lhs,
                rhs,
            })
        } else {
            None
        }
    })
}

/// Check the two pair-action identities on all basis 4-tuples and the
/// module differential compatibility (plus its derived commutator form)
/// on all basis pairs.
pub fn validate_rep(t: &TripleSystem, m: &ModifiedDifferential, r: &Representation) -> ValidationReport {
    validate_rep_with(t, m, r, CheckMode::FirstFailure)
}

pub fn validate_rep_with(
    t: &TripleSystem,
    m: &ModifiedDifferential,
    r: &Representation,
    mode: CheckMode,
) -> ValidationReport {
    let d = t.dim();
    assert_eq!(r.dim(), d, "representation base dimension mismatch");
    let v = r.vdim();
    let quad = d * d * d * d;

    // theta(a,b) theta(x,y) - theta(y,b) theta(x,a) - theta(x, [y,a,b]) + D(y,a) theta(x,b) = 0
    let pair = scan(quad, mode, |idx| {
        let args = unrank(idx, 4, d);
        let (x, y, a, b) = (args[0], args[1], args[2], args[3]);
        let mut acc = r.theta(a, b) * r.theta(x, y);
        acc = &acc - &(r.theta(y, b) * r.theta(x, a));
        for (mth, w) in t.bracket_at(y, a, b).iter().enumerate() {
            if !w.is_zero() {
                acc = &acc - &r.theta(x, mth).scale(w);
            }
        }
        acc = &acc + &(&r.d_action(y, a) * r.theta(x, b));
        if !acc.is_zero() {
            Some(Violation {
                identity: Identity::ActionPair,
                tuple: vec![x, y, a, b],
                lhs: flatten(&acc),
                rhs: vec_zero(v * v),
            })
        } else {
            None
        }
    });
    if mode == CheckMode::FirstFailure && !pair.is_pass() {
        return pair;
    }

    // theta(a,b) D(x,y) - D(x,y) theta(a,b) + theta([x,y,a], b) + theta(a, [x,y,b]) = 0
    let comm = scan(quad, mode, |idx| {
        let args = unrank(idx, 4, d);
        let (x, y, a, b) = (args[0], args[1], args[2], args[3]);
        let dxy = r.d_action(x, y);
        let mut acc = r.theta(a, b) * &dxy;
        acc = &acc - &(&dxy * r.theta(a, b));
        for (mth, w) in t.bracket_at(x, y, a).iter().enumerate() {
            if !w.is_zero() {
                acc = &acc + &r.theta(mth, b).scale(w);
            }
        }
        for (mth, w) in t.bracket_at(x, y, b).iter().enumerate() {
            if !w.is_zero() {
                acc = &acc + &r.theta(a, mth).scale(w);
            }
        }
        if !acc.is_zero() {
            Some(Violation {
                identity: Identity::ActionCommutator,
                tuple: vec![x, y, a, b],
                lhs: flatten(&acc),
                rhs: vec_zero(v * v),
            })
        } else {
            None
        }
    });
    if mode == CheckMode::FirstFailure && !comm.is_pass() {
        return comm;
    }

    // dv theta(x,y) = theta(dx,y) + theta(x,dy) + theta(x,y) dv + lambda theta(x,y),
    // checked as a matrix identity per basis pair, plus the derived form on D.
    let diff = scan(d * d, mode, |idx| {
        let (x, y) = (idx / d, idx % d);
        diff_compat(t, m, r, x, y, false)
    });
    if mode == CheckMode::FirstFailure && !diff.is_pass() {
        return diff;
    }
    let diff_derived = scan(d * d, mode, |idx| {
        let (x, y) = (idx / d, idx % d);
        diff_compat(t, m, r, x, y, true)
    });
    match mode {
        CheckMode::FirstFailure => diff_derived,
        CheckMode::Exhaustive => pair.merge(comm).merge(diff).merge(diff_derived),
    }
}

fn diff_compat(
    _t: &TripleSystem,
    m: &ModifiedDifferential,
    r: &Representation,
    x: usize,
    y: usize,
    derived: bool,
) -> Option<Violation> {
    let d = r.dim();
    let op = |i: usize, j: usize| -> Matrix {
        if derived {
            r.d_action(i, j)
        } else {
            r.theta(i, j).clone()
        }
    };
    let base = op(x, y);
    let lhs = r.dv() * &base;
    let mut rhs = &(&base * r.dv()) + &base.scale(&m.lambda);
    for p in 0..d {
        let dpx = m.d.at(p, x);
        if !dpx.is_zero() {
            rhs = &rhs + &op(p, y).scale(dpx);
        }
        let dpy = m.d.at(p, y);
        if !dpy.is_zero() {
            rhs = &rhs + &op(x, p).scale(dpy);
        }
    }
    if lhs != rhs {
        Some(Violation {
            identity: if derived {
                Identity::ActionDifferentialDerived
            } else {
                Identity::ActionDifferential
            },
            tuple: vec![x, y],
            lhs: flatten(&lhs),
            rhs: flatten(&rhs),
        })
    } else {
        None
    }
}

fn flatten(m: &Matrix) -> Vec<Rational> {
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        out.extend_from_slice(m.row(i));
    }
    out
}

/// Validate a binary Lie algebra with a weighted differential.
pub fn validate_lie(g: &LieAlgebra) -> ValidationReport {
    let d = g.dim;
    let at = |i: usize, j: usize| g.bracket.value(&[i, j]);

    let skew = scan(d * d, CheckMode::FirstFailure, |idx| {
        let (i, j) = (idx / d, idx % d);
        let lhs = at(i, j);
        let rhs: Vec<Rational> = at(j, i).iter().map(|v| -v).collect();
        (lhs != rhs.as_slice()).then(|| Violation {
            identity: Identity::LieSkew,
            tuple: vec![i, j],
            lhs: lhs.to_vec(),
            rhs,
        })
    });
    if !skew.is_pass() {
        return skew;
    }

    let jacobi = scan(d * d * d, CheckMode::FirstFailure, |idx| {
        let args = unrank(idx, 3, d);
        let (i, j, k) = (args[0], args[1], args[2]);
        let mut sum = vec_zero(d);
        for (p, q, rr) in [(i, j, k), (j, k, i), (k, i, j)] {
            for (m, w) in at(p, q).iter().enumerate() {
                if !w.is_zero() {
                    vec_add_scaled(&mut sum, at(m, rr), w);
                }
            }
        }
        (!vec_is_zero(&sum)).then(|| Violation {
            identity: Identity::LieJacobi,
            tuple: vec![i, j, k],
            lhs: sum,
            rhs: vec_zero(d),
        })
    });
    if !jacobi.is_pass() {
        return jacobi;
    }

    scan(d * d, CheckMode::FirstFailure, |idx| {
        let (i, j) = (idx / d, idx % d);
        let lhs = g.d.mul_vec(at(i, j));
        let mut rhs: Vec<Rational> = at(i, j).iter().map(|v| v * &g.lambda).collect();
        for p in 0..d {
            let dpi = g.d.at(p, i);
            if !dpi.is_zero() {
                vec_add_scaled(&mut rhs, at(p, j), dpi);
            }
            let dpj = g.d.at(p, j);
            if !dpj.is_zero() {
                vec_add_scaled(&mut rhs, at(i, p), dpj);
            }
        }
        (lhs != rhs).then(|| Violation {
            identity: Identity::LieLeibniz,
            tuple: vec![i, j],
            lhs,
            rhs,
        })
    })
}

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------

/// The system acting on itself: `theta(e_i, e_j)` sends `x` to `[x, e_i, e_j]`,
/// with the system differential as module differential.
pub fn adjoint_rep(t: &TripleSystem, m: &ModifiedDifferential) -> Representation {
    let d = t.dim();
    let mut theta = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            theta.push(Matrix::from_fn(d, d, |l, k| t.bracket.get(&[k, i, j], l).clone()));
        }
    }
    Representation::new(d, d, theta, m.d.clone()).expect("adjoint shapes are consistent")
}

/// `d + (lambda/2) id`, which satisfies the plain Leibniz rule exactly when
/// `(d, lambda)` satisfies the modified one.
pub fn shift_to_derivation(m: &ModifiedDifferential) -> Matrix {
    let half = &m.lambda * rat(1, 2);
    &m.d + &Matrix::identity(m.d.rows()).scale(&half)
}

/// Induce a triple system from a binary Lie algebra via `[a,b,c] = [[a,b],c]`;
/// the differential carries over with doubled weight.
pub fn lts_from_lie_algebra(g: &LieAlgebra) -> Result<Mdlts, Error> {
    let report = validate_lie(g);
    if !report.is_pass() {
        return Err(Error::InvalidInput(format!(
            "input is not a valid weighted Lie algebra: {}",
            report.violations[0]
        )));
    }
    let d = g.dim;
    let mut bracket = TensorMap::zero(3, d, d);
    for i in 0..d {
        for j in 0..d {
            let inner = g.bracket.value(&[i, j]).to_vec();
            for k in 0..d {
                let mut out = vec_zero(d);
                for (m, w) in inner.iter().enumerate() {
                    if !w.is_zero() {
                        vec_add_scaled(&mut out, g.bracket.value(&[m, k]), w);
                    }
                }
                for (l, v) in out.into_iter().enumerate() {
                    if !v.is_zero() {
                        bracket.set(&[i, j, k], l, v);
                    }
                }
            }
        }
    }
    let lts = TripleSystem::from_tensor(bracket)?;
    let mdo = ModifiedDifferential::new(g.d.clone(), &g.lambda * rat(2, 1));
    Mdlts::new(lts, mdo)
}

/// Semidirect product on `L (+) V`:
/// `[x+u, y+v, z+w] = [x,y,z] + D(x,y)w - theta(x,z)v + theta(y,z)u`,
/// with block-diagonal differential.
pub fn semidirect_product(
    t: &TripleSystem,
    m: &ModifiedDifferential,
    r: &Representation,
) -> Result<Mdlts, Error> {
    if r.dim() != t.dim() {
        return Err(Error::Dimension {
            context: "semidirect product",
            expected: t.dim(),
            found: r.dim(),
        });
    }
    let d = t.dim();
    let v = r.vdim();
    let n = d + v;
    let mut bracket = TensorMap::zero(3, n, n);
    // Pure base triples keep the base bracket.
    for (args, _base) in t.bracket.tuples() {
        for (l, w) in t.bracket.value(&args).iter().enumerate() {
            if !w.is_zero() {
                bracket.set(&[args[0], args[1], args[2]], l, w.clone());
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            // Module element in the third slot: D(e_i, e_j) w.
            let dm = r.d_action(i, j);
            for ww in 0..v {
                for l in 0..v {
                    let val = dm.at(l, ww);
                    if !val.is_zero() {
                        bracket.set(&[i, j, d + ww], d + l, val.clone());
                    }
                }
            }
            // Second slot: -theta(e_i, e_k) v.
            let th = r.theta(i, j);
            for tt in 0..v {
                for l in 0..v {
                    let val = th.at(l, tt);
                    if !val.is_zero() {
                        bracket.set(&[i, d + tt, j], d + l, -val);
                    }
                }
            }
            // First slot: theta(e_j, e_k) u.
            for tt in 0..v {
                for l in 0..v {
                    let val = th.at(l, tt);
                    if !val.is_zero() {
                        bracket.set(&[d + tt, i, j], d + l, val.clone());
                    }
                }
            }
        }
    }
    let mut dmat = Matrix::zero(n, n);
    dmat.set_block(0, 0, &m.d);
    dmat.set_block(d, d, r.dv());
    let lts = TripleSystem::from_tensor(bracket)?;
    Mdlts::new(lts, ModifiedDifferential::new(dmat, m.lambda.clone()))
}

/// Dual representation on the dual module: pair action
/// `theta'(e_i, e_j) = theta(e_j, e_i)^T`, module differential `-dv^T`.
pub fn dual_rep(r: &Representation) -> Representation {
    let d = r.dim();
    let mut theta = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            theta.push(r.theta(j, i).transpose());
        }
    }
    Representation::new(d, r.vdim(), theta, -&r.dv().transpose())
        .expect("dual shapes are consistent")
}

/// Scale the differential and its weight by the same factor.
pub fn scale_mdo(m: &ModifiedDifferential, k: &Rational) -> ModifiedDifferential {
    ModifiedDifferential::new(m.d.scale(k), &m.lambda * k)
}

/// Result of a homomorphism check.
#[derive(Clone, Debug)]
pub struct HomomorphismReport {
    pub report: ValidationReport,
    /// Whether the map is an invertible linear map (so an isomorphism
    /// whenever the intertwining conditions pass).
    pub invertible: bool,
}

impl HomomorphismReport {
    pub fn is_homomorphism(&self) -> bool {
        self.report.is_pass()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_homomorphism() && self.invertible
    }
}

/// Check that `zeta` intertwines brackets and differentials.
pub fn check_homomorphism(src: &Mdlts, dst: &Mdlts, zeta: &Matrix) -> Result<HomomorphismReport, Error> {
    let (ds, dd) = (src.dim(), dst.dim());
    if zeta.rows() != dd || zeta.cols() != ds {
        return Err(Error::Dimension {
            context: "homomorphism matrix",
            expected: dd,
            found: zeta.rows(),
        });
    }
    let cols: Vec<Vec<Rational>> = (0..ds).map(|j| zeta.col(j)).collect();
    let bracket = scan(ds * ds * ds, CheckMode::FirstFailure, |idx| {
        let args = unrank(idx, 3, ds);
        let (i, j, k) = (args[0], args[1], args[2]);
        let lhs = zeta.mul_vec(src.lts.bracket_at(i, j, k));
        let rhs = dst.lts.bracket_vec(&cols[i], &cols[j], &cols[k]);
        (lhs != rhs).then(|| Violation {
            identity: Identity::BracketMap,
            tuple: vec![i, j, k],
            lhs,
            rhs,
        })
    });
    if !bracket.is_pass() {
        return Ok(HomomorphismReport {
            report: bracket,
            invertible: false,
        });
    }
    let lhs = zeta * &src.mdo.d;
    let rhs = &dst.mdo.d * zeta;
    let mut report = ValidationReport::default();
    if lhs != rhs {
        report.violations.push(Violation {
            identity: Identity::DifferentialMap,
            tuple: vec![],
            lhs: flatten(&lhs),
            rhs: flatten(&rhs),
        });
    }
    let invertible = ds == dd && rank(zeta) == ds;
    Ok(HomomorphismReport { report, invertible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::rat_int;

    #[test]
    fn two_dim_fixture_validates() {
        let sys = fixtures::two_dim(3, 5, 7);
        assert!(validate_lts(&sys.lts).is_pass());
        assert!(validate_mdo(&sys.lts, &sys.mdo).is_pass());
        assert_eq!(sys.mdo.lambda, rat_int(-14));
    }

    #[test]
    fn two_dim_fixture_fails_at_wrong_weight() {
        let sys = fixtures::two_dim(3, 5, 7);
        let wrong = ModifiedDifferential::new(sys.mdo.d.clone(), rat_int(-13));
        let report = validate_mdo(&sys.lts, &wrong);
        assert!(!report.is_pass());
        assert_eq!(report.violations[0].identity, Identity::ModifiedLeibniz);
    }

    // The four-dimensional family is a valid triple system for every
    // parameter choice, but its printed operator satisfies the modified
    // Leibniz rule only when the third basis vector maps into the span of
    // the last two, i.e. k1 = k2 = 0.
    #[test]
    fn four_dim_fixture_validates_when_k1_k2_vanish() {
        let sys = fixtures::four_dim(2, [0, 0, 1, 1]);
        assert!(validate_lts(&sys.lts).is_pass());
        assert!(validate_mdo(&sys.lts, &sys.mdo).is_pass());
        assert_eq!(sys.mdo.lambda, rat_int(-1));
    }

    #[test]
    fn four_dim_fixture_fails_with_nonzero_k1() {
        let sys = fixtures::four_dim(2, [1, 1, 1, 1]);
        assert!(validate_lts(&sys.lts).is_pass());
        let report = validate_mdo(&sys.lts, &sys.mdo);
        assert!(!report.is_pass());
        // Witness: d(u3) has a u1 component, so [u1,u2,d(u3)] hits [u1,u2,u1].
        assert_eq!(report.violations[0].tuple, vec![0, 1, 2]);
    }

    #[test]
    fn abelian_validates_in_any_dimension() {
        for dim in [1, 2, 5] {
            let sys = fixtures::abelian(dim);
            assert!(sys.validate().is_pass());
        }
    }

    #[test]
    fn missing_skew_term_fails_first_identity() {
        let t = TripleSystem::new(2, [([0, 1, 1], 0, rat_int(1))], false).unwrap();
        let report = validate_lts(&t);
        assert!(!report.is_pass());
        assert_eq!(report.violations[0].identity, Identity::Skew);
    }

    #[test]
    fn half_weight_multiple_of_identity_always_passes() {
        for sys in [fixtures::two_dim(3, 5, 7), fixtures::four_dim(2, [0, 0, 1, 1])] {
            for lambda in [rat_int(0), rat_int(4), rat(-3, 2)] {
                let d = Matrix::identity(sys.dim()).scale(&(-&lambda * rat(1, 2)));
                let m = ModifiedDifferential::new(d, lambda.clone());
                assert!(validate_mdo(&sys.lts, &m).is_pass());
            }
        }
    }

    #[test]
    fn adjoint_rep_of_two_dim_fixture() {
        let sys = fixtures::two_dim(3, 5, 7);
        let r = adjoint_rep(&sys.lts, &sys.mdo);
        assert_eq!(r.theta(1, 1), &Matrix::from_int_rows(&[&[1, 0], &[0, 0]]));
        assert!(validate_rep(&sys.lts, &sys.mdo, &r).is_pass());
    }

    #[test]
    fn adjoint_rep_of_abelian_is_zero() {
        let sys = fixtures::abelian(3);
        let r = adjoint_rep(&sys.lts, &sys.mdo);
        for i in 0..3 {
            for j in 0..3 {
                assert!(r.theta(i, j).is_zero());
            }
        }
    }

    #[test]
    fn adjoint_rep_of_four_dim_fixture() {
        let sys = fixtures::four_dim(2, [0, 0, 1, 1]);
        let r = adjoint_rep(&sys.lts, &sys.mdo);
        // theta(u2, u1) sends u1 to u4 because [u1, u2, u1] = u4.
        let th = r.theta(1, 0);
        assert_eq!(th.at(3, 0), &rat_int(1));
        let mut expected = Matrix::zero(4, 4);
        expected.set(3, 0, rat_int(1));
        assert_eq!(th, &expected);
        assert!(validate_rep(&sys.lts, &sys.mdo, &r).is_pass());
    }

    #[test]
    fn trivial_rep_over_abelian_passes() {
        let sys = fixtures::abelian(2);
        let r = Representation::trivial(2, 3, Matrix::from_int_rows(&[&[1, 2, 0], &[0, 3, 0], &[0, 0, 4]]));
        assert!(validate_rep(&sys.lts, &sys.mdo, &r).is_pass());
    }

    #[test]
    fn identity_module_differential_over_scaled_identity() {
        // (V; theta, id) is a representation of (L, k id) at weight -2k.
        let base = fixtures::two_dim(3, 5, 7);
        for k in [1i64, 2] {
            let m = ModifiedDifferential::new(Matrix::identity(2).scale(&rat_int(k)), rat_int(-2 * k));
            assert!(validate_mdo(&base.lts, &m).is_pass());
            let theta = adjoint_rep(&base.lts, &m).theta.clone();
            let r = Representation::new(2, 2, theta, Matrix::identity(2)).unwrap();
            assert!(validate_rep(&base.lts, &m, &r).is_pass());
        }
    }

    #[test]
    fn shift_to_derivation_examples() {
        let sys = fixtures::two_dim(3, 5, 7);
        let shifted = shift_to_derivation(&sys.mdo);
        assert_eq!(shifted, Matrix::from_int_rows(&[&[-4, 5], &[0, 0]]));
        // Shifting produces a plain derivation (weight zero).
        let zero_weight = ModifiedDifferential::new(shifted, rat_int(0));
        assert!(validate_mdo(&sys.lts, &zero_weight).is_pass());

        // lambda = 0 leaves d unchanged.
        let plain = ModifiedDifferential::new(sys.mdo.d.clone(), rat_int(0));
        assert_eq!(shift_to_derivation(&plain), sys.mdo.d);

        // d = -(lambda/2) id shifts to zero.
        let half = ModifiedDifferential::new(Matrix::identity(2).scale(&rat_int(3)), rat_int(-6));
        assert!(shift_to_derivation(&half).is_zero());
    }

    #[test]
    fn shift_biconditional_on_fixtures() {
        // validate(d, lambda) holds iff validate(d + lambda/2 id, 0) holds,
        // on valid and invalid instances alike.
        let sys = fixtures::two_dim(3, 5, 7);
        for lambda in [rat_int(-14), rat_int(-13), rat_int(2)] {
            let m = ModifiedDifferential::new(sys.mdo.d.clone(), lambda);
            let shifted = ModifiedDifferential::new(shift_to_derivation(&m), rat_int(0));
            assert_eq!(
                validate_mdo(&sys.lts, &m).is_pass(),
                validate_mdo(&sys.lts, &shifted).is_pass()
            );
        }
    }

    #[test]
    fn rep_shift_biconditional_on_fixtures() {
        let sys = fixtures::two_dim(1, 0, 1);
        let r = adjoint_rep(&sys.lts, &sys.mdo);
        let half = &sys.mdo.lambda * rat(1, 2);
        let shifted_m = ModifiedDifferential::new(shift_to_derivation(&sys.mdo), rat_int(0));
        let shifted_r = Representation::new(
            2,
            2,
            (0..4).map(|i| r.theta(i / 2, i % 2).clone()).collect(),
            &r.dv().clone() + &Matrix::identity(2).scale(&half),
        )
        .unwrap();
        assert_eq!(
            validate_rep(&sys.lts, &sys.mdo, &r).is_pass(),
            validate_rep(&sys.lts, &shifted_m, &shifted_r).is_pass()
        );
        assert!(validate_rep(&sys.lts, &shifted_m, &shifted_r).is_pass());

        // Break the module differential and check both sides fail together.
        let bad = Representation::new(2, 2, (0..4).map(|i| r.theta(i / 2, i % 2).clone()).collect(),
            Matrix::from_int_rows(&[&[1, 1], &[1, 1]])).unwrap();
        let bad_shifted = Representation::new(2, 2, (0..4).map(|i| bad.theta(i / 2, i % 2).clone()).collect(),
            &bad.dv().clone() + &Matrix::identity(2).scale(&half)).unwrap();
        assert_eq!(
            validate_rep(&sys.lts, &sys.mdo, &bad).is_pass(),
            validate_rep(&sys.lts, &shifted_m, &bad_shifted).is_pass()
        );
        assert!(!validate_rep(&sys.lts, &sys.mdo, &bad).is_pass());
    }

    #[test]
    fn lie_algebra_induction_matches_two_dim_fixture() {
        let g = fixtures::lie_two_dim(3, 5, 7);
        let sys = lts_from_lie_algebra(&g).unwrap();
        let expected = fixtures::two_dim(3, 5, 7);
        assert_eq!(sys.lts, expected.lts);
        assert_eq!(sys.mdo.lambda, rat_int(-14)); // doubled weight
        assert!(sys.validate().is_pass());
    }

    #[test]
    fn lie_algebra_induction_trivial_cases() {
        // Abelian Lie algebra induces the abelian triple system.
        let g = LieAlgebra::new(3, [], Matrix::identity(3), rat_int(0)).unwrap();
        let sys = lts_from_lie_algebra(&g).unwrap();
        assert!(sys.lts.bracket().is_zero());

        // One-dimensional: zero bracket, weight doubles.
        let g1 = LieAlgebra::new(1, [], Matrix::from_int_rows(&[&[5]]), rat_int(3)).unwrap();
        let sys1 = lts_from_lie_algebra(&g1).unwrap();
        assert_eq!(sys1.mdo.lambda, rat_int(6));
        assert!(sys1.validate().is_pass());
    }

    #[test]
    fn semidirect_product_with_adjoint_rep() {
        let sys = fixtures::two_dim(3, 5, 7);
        let r = adjoint_rep(&sys.lts, &sys.mdo);
        let prod = semidirect_product(&sys.lts, &sys.mdo, &r).unwrap();
        assert_eq!(prod.dim(), 4);
        assert_eq!(prod.mdo.lambda, rat_int(-14));
        assert!(prod.validate().is_pass());
    }

    #[test]
    fn semidirect_product_trivial_action_is_abelian() {
        let sys = fixtures::abelian(2);
        let r = Representation::trivial(2, 3, Matrix::zero(3, 3));
        let prod = semidirect_product(&sys.lts, &sys.mdo, &r).unwrap();
        assert!(prod.lts.bracket().is_zero());
        assert_eq!(prod.dim(), 5);
    }

    #[test]
    fn projection_onto_base_is_homomorphism() {
        let sys = fixtures::two_dim(3, 5, 7);
        let r = adjoint_rep(&sys.lts, &sys.mdo);
        let prod = semidirect_product(&sys.lts, &sys.mdo, &r).unwrap();
        let proj = Matrix::from_fn(2, 4, |i, j| {
            if i == j {
                rat_int(1)
            } else {
                rat_int(0)
            }
        });
        let rep = check_homomorphism(&prod, &sys, &proj).unwrap();
        assert!(rep.is_homomorphism());
        assert!(!rep.invertible);
    }

    #[test]
    fn dual_rep_properties() {
        let sys = fixtures::two_dim(3, 5, 7);
        let r = adjoint_rep(&sys.lts, &sys.mdo);
        let dual = dual_rep(&r);
        assert!(validate_rep(&sys.lts, &sys.mdo, &dual).is_pass());
        // Double dual returns the original matrices.
        assert_eq!(dual_rep(&dual), r);

        // Trivial action dualizes to the negated transpose differential.
        let triv = Representation::trivial(2, 2, sys.mdo.d.clone());
        let dt = dual_rep(&triv);
        assert_eq!(dt.dv(), &-&sys.mdo.d.transpose());
    }

    #[test]
    fn scaling_preserves_validity() {
        let sys = fixtures::two_dim(3, 5, 7);
        for k in [rat_int(-2), rat_int(-1), rat_int(0), rat_int(1), rat_int(2), rat(1, 2)] {
            let scaled = scale_mdo(&sys.mdo, &k);
            assert!(validate_mdo(&sys.lts, &scaled).is_pass(), "k = {k}");
        }
        let doubled = scale_mdo(&sys.mdo, &rat_int(2));
        assert_eq!(doubled.lambda, rat_int(-28));
        assert_eq!(scale_mdo(&sys.mdo, &rat_int(1)), sys.mdo);
        let zeroed = scale_mdo(&sys.mdo, &rat_int(0));
        assert!(zeroed.d.is_zero());
        assert!(zeroed.lambda.is_zero());
    }

    #[test]
    fn identity_is_isomorphism() {
        let sys = fixtures::two_dim(3, 5, 7);
        let rep = check_homomorphism(&sys, &sys, &Matrix::identity(2)).unwrap();
        assert!(rep.is_isomorphism());
    }

    #[test]
    fn zero_map_to_abelian_target() {
        let src = fixtures::two_dim(3, 5, 7);
        let dst = fixtures::abelian(2);
        let rep = check_homomorphism(&src, &dst, &Matrix::zero(2, 2)).unwrap();
        assert!(rep.is_homomorphism());
        assert!(!rep.is_isomorphism());
    }

    #[test]
    fn skew_completion_conflict_is_rejected() {
        let bad = TripleSystem::new(
            2,
            [([0, 1, 1], 0, rat_int(1)), ([1, 0, 1], 0, rat_int(1))],
            true,
        );
        assert!(bad.is_err());
    }
}

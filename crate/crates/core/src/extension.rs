//! Abelian extensions: building a total system from a degree-3 cocycle,
//! extracting the induced action and cocycle from a section, and deciding
//! equivalence through the degree-3 cohomology class.
//!
//! An extension is stored with explicit injection, projection, and section
//! matrices; the canonical presentation puts the base coordinates first
//! and the fiber coordinates last, with `inject = [0; I]`,
//! `project = [I 0]`, and `section = [I; 0]`.

use num_traits::Zero;

use crate::cochain::{
    cochain_basis, in_space, operator_matrix, pair_coords, CochainPair, CochainSpace, Limits,
};
use crate::cohomology::is_cocycle;
use crate::error::Error;
use crate::linalg::{inverse, rank, solve, solve_matrix, Matrix, Rational};
use crate::lts::{
    check_homomorphism, validate_rep, Mdlts, ModifiedDifferential, Representation, TripleSystem,
};
use crate::tensor::TensorMap;

/// The datum classified by degree-3 cohomology: a trilinear map into the
/// fiber together with a linear correction of the differential.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtensionCocycle {
    /// Trilinear map `L^3 -> V`.
    pub varsigma: TensorMap,
    /// Linear map `L -> V` (`vdim x dim`).
    pub varpi: Matrix,
}

impl ExtensionCocycle {
    pub fn new(varsigma: TensorMap, varpi: Matrix) -> Result<Self, Error> {
        if varsigma.arity() != 3 || varpi.rows() != varsigma.out_dim() || varpi.cols() != varsigma.dim()
        {
            return Err(Error::InvalidInput(
                "extension cocycle shapes are inconsistent".into(),
            ));
        }
        Ok(ExtensionCocycle { varsigma, varpi })
    }

    pub fn zero(dim: usize, vdim: usize) -> Self {
        ExtensionCocycle {
            varsigma: TensorMap::zero(3, dim, vdim),
            varpi: Matrix::zero(vdim, dim),
        }
    }

    /// Package as a level-2 element of the pair complex.
    pub fn as_pair(&self) -> CochainPair {
        CochainPair::new(
            2,
            self.varsigma.clone(),
            Some(TensorMap::from_matrix(&self.varpi)),
        )
    }

    pub fn from_pair(pair: &CochainPair) -> Self {
        assert_eq!(pair.level, 2);
        ExtensionCocycle {
            varsigma: pair.f.clone(),
            varpi: pair.g.as_ref().expect("level 2").to_matrix(),
        }
    }
}

/// A short exact sequence presented by explicit structure maps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianExtension {
    pub base: Mdlts,
    /// Differential of the fiber (`vdim x vdim`).
    pub fiber_d: Matrix,
    pub total: Mdlts,
    /// `V -> total`, full column rank.
    pub inject: Matrix,
    /// `total -> L`, surjective with kernel the image of `inject`.
    pub project: Matrix,
    /// Right inverse of `project`.
    pub section: Matrix,
}

impl AbelianExtension {
    pub fn fiber_dim(&self) -> usize {
        self.inject.cols()
    }

    /// Same extension presented through a different section.
    pub fn with_section(&self, section: Matrix) -> Result<AbelianExtension, Error> {
        if &self.project * &section != Matrix::identity(self.base.dim()) {
            return Err(Error::InvalidInput(
                "section must be a right inverse of the projection".into(),
            ));
        }
        let mut out = self.clone();
        out.section = section;
        Ok(out)
    }

    /// Structural invariants: exactness, the abelian-ideal law, and the
    /// homomorphism conditions for injection and projection.
    pub fn validate(&self) -> Result<(), Error> {
        let dim = self.base.dim();
        let v = self.fiber_dim();
        let n = self.total.dim();
        if n != dim + v {
            return Err(Error::Dimension {
                context: "extension total dimension",
                expected: dim + v,
                found: n,
            });
        }
        if !(&self.project * &self.inject).is_zero() {
            return Err(Error::InvalidInput("projection does not kill the fiber".into()));
        }
        if &self.project * &self.section != Matrix::identity(dim) {
            return Err(Error::InvalidInput("section is not a right inverse".into()));
        }
        if rank(&self.inject) != v || rank(&self.project) != dim {
            return Err(Error::InvalidInput("sequence is not exact".into()));
        }
        // Abelian ideal: brackets with two fiber slots vanish.
        let icols: Vec<Vec<Rational>> = (0..v).map(|s| self.inject.col(s)).collect();
        for s in 0..v {
            for t in 0..v {
                for x in 0..n {
                    let ex: Vec<Rational> = (0..n)
                        .map(|i| {
                            if i == x {
                                Rational::from_integer(1.into())
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect();
                    for tripled in [
                        self.total.lts.bracket_vec(&icols[s], &icols[t], &ex),
                        self.total.lts.bracket_vec(&icols[s], &ex, &icols[t]),
                        self.total.lts.bracket_vec(&ex, &icols[s], &icols[t]),
                    ] {
                        if tripled.iter().any(|c| !c.is_zero()) {
                            return Err(Error::InvalidInput(
                                "fiber is not an abelian ideal".into(),
                            ));
                        }
                    }
                }
            }
        }
        // Differential legs of the commutative ladder.
        if &self.total.mdo.d * &self.inject != &self.inject * &self.fiber_d {
            return Err(Error::InvalidInput(
                "injection does not intertwine the differentials".into(),
            ));
        }
        if &self.project * &self.total.mdo.d != &self.base.mdo.d * &self.project {
            return Err(Error::InvalidInput(
                "projection does not intertwine the differentials".into(),
            ));
        }
        if self.total.mdo.lambda != self.base.mdo.lambda {
            return Err(Error::InvalidInput("weights disagree".into()));
        }
        Ok(())
    }
}

/// Build the extension of the base by the module along a cocycle:
/// the semidirect bracket plus `varsigma` on pure-base triples, and the
/// differential corrected by `varpi`. Rejects non-cocycles: the total is
/// a valid system exactly when the pair is closed.
pub fn build_extension(
    t: &TripleSystem,
    m: &ModifiedDifferential,
    r: &Representation,
    c: &ExtensionCocycle,
) -> Result<AbelianExtension, Error> {
    let dim = t.dim();
    let v = r.vdim();
    if c.varsigma.dim() != dim || c.varsigma.out_dim() != v {
        return Err(Error::Dimension {
            context: "extension cocycle",
            expected: dim,
            found: c.varsigma.dim(),
        });
    }
    if !in_space(&c.varsigma, CochainSpace::Minimal) {
        return Err(Error::NotACocycle {
            residual: "trilinear component violates the cochain symmetry constraints".into(),
        });
    }
    let check = is_cocycle(t, m, r, &c.as_pair());
    if !check.is_cocycle {
        return Err(Error::NotACocycle {
            residual: check.residual.to_string(),
        });
    }

    let product = crate::lts::semidirect_product(t, m, r)?;
    let mut bracket = product.lts.bracket().clone();
    for (args, o, w) in c.varsigma.iter_nonzero() {
        bracket.add_at(&[args[0], args[1], args[2]], dim + o, w);
    }
    let mut dtot = product.mdo.d.clone();
    for a in 0..dim {
        for s in 0..v {
            let w = c.varpi.at(s, a);
            if !w.is_zero() {
                dtot.set(dim + s, a, w.clone());
            }
        }
    }
    let total = Mdlts::new(
        TripleSystem::from_tensor(bracket)?,
        ModifiedDifferential::new(dtot, m.lambda.clone()),
    )?;

    let mut inject = Matrix::zero(dim + v, v);
    inject.set_block(dim, 0, &Matrix::identity(v));
    let mut project = Matrix::zero(dim, dim + v);
    project.set_block(0, 0, &Matrix::identity(dim));
    let mut section = Matrix::zero(dim + v, dim);
    section.set_block(0, 0, &Matrix::identity(dim));

    Ok(AbelianExtension {
        base: Mdlts::new(t.clone(), m.clone())?,
        fiber_d: r.dv().clone(),
        total,
        inject,
        project,
        section,
    })
}

/// Exact left inverse of a full-column-rank matrix.
fn left_inverse(m: &Matrix) -> Result<Matrix, Error> {
    let mt = m.transpose();
    let gram = &mt * m;
    let inv = inverse(&gram).ok_or_else(|| {
        Error::InvalidInput("injection matrix does not have full column rank".into())
    })?;
    Ok(&inv * &mt)
}

/// Extract the induced action and cocycle through the stored section.
pub fn extract(e: &AbelianExtension) -> Result<(Representation, ExtensionCocycle), Error> {
    extract_with_section(e, &e.section)
}

/// Extract through an arbitrary section of the projection.
#[allow(clippy::needless_range_loop)] // indexing by basis index reads clearer here
pub fn extract_with_section(
    e: &AbelianExtension,
    section: &Matrix,
) -> Result<(Representation, ExtensionCocycle), Error> {
    e.validate()?;
    let dim = e.base.dim();
    let v = e.fiber_dim();
    if &e.project * section != Matrix::identity(dim) {
        return Err(Error::InvalidInput(
            "section must be a right inverse of the projection".into(),
        ));
    }
    let linv = left_inverse(&e.inject)?;
    let pull = |w: &[Rational]| -> Result<Vec<Rational>, Error> {
        let coords = linv.mul_vec(w);
        let back = e.inject.mul_vec(&coords);
        if back.as_slice() == w {
            Ok(coords)
        } else {
            Err(Error::Inconsistent(
                "vector expected in the fiber lies outside it".into(),
            ))
        }
    };

    let sigma_cols: Vec<Vec<Rational>> = (0..dim).map(|a| section.col(a)).collect();
    let inj_cols: Vec<Vec<Rational>> = (0..v).map(|s| e.inject.col(s)).collect();

    // Induced action: theta(a, b) u = [u, sigma(a), sigma(b)] pulled back.
    let mut theta = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            let cols: Vec<Vec<Rational>> = (0..v)
                .map(|s| {
                    pull(&e
                        .total
                        .lts
                        .bracket_vec(&inj_cols[s], &sigma_cols[a], &sigma_cols[b]))
                })
                .collect::<Result<_, _>>()?;
            theta.push(Matrix::from_cols(v, cols));
        }
    }
    let rep = Representation::new(dim, v, theta, e.fiber_d.clone())?;
    let rep_report = validate_rep(&e.base.lts, &e.base.mdo, &rep);
    if !rep_report.is_pass() {
        return Err(Error::InvalidInput(format!(
            "induced action is not a representation: {}",
            rep_report.violations[0]
        )));
    }

    // varsigma(a,b,c) = [sigma a, sigma b, sigma c] - sigma([a,b,c]).
    let mut varsigma = TensorMap::zero(3, dim, v);
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let mut w = e
                    .total
                    .lts
                    .bracket_vec(&sigma_cols[a], &sigma_cols[b], &sigma_cols[c]);
                let through = section.mul_vec(e.base.lts.bracket_at(a, b, c));
                for (wi, ti) in w.iter_mut().zip(&through) {
                    *wi -= ti;
                }
                for (s, val) in pull(&w)?.into_iter().enumerate() {
                    if !val.is_zero() {
                        varsigma.set(&[a, b, c], s, val);
                    }
                }
            }
        }
    }

    // varpi(a) = d_total(sigma a) - sigma(d a).
    let mut varpi = Matrix::zero(v, dim);
    for a in 0..dim {
        let mut w = e.total.mdo.d.mul_vec(&sigma_cols[a]);
        let through = section.mul_vec(&e.base.mdo.d.col(a));
        for (wi, ti) in w.iter_mut().zip(&through) {
            *wi -= ti;
        }
        for (s, val) in pull(&w)?.into_iter().enumerate() {
            varpi.set(s, a, val);
        }
    }

    let cocycle = ExtensionCocycle::new(varsigma, varpi)?;
    let check = is_cocycle(&e.base.lts, &e.base.mdo, &rep, &cocycle.as_pair());
    if !check.is_cocycle {
        return Err(Error::Inconsistent(format!(
            "extracted pair is not closed (residual {})",
            check.residual
        )));
    }
    Ok((rep, cocycle))
}

/// Conjugate the total system onto canonical coordinates through
/// `T = [section | inject]`; returns the standardized extension and `T`.
pub fn standardize(e: &AbelianExtension) -> Result<(AbelianExtension, Matrix), Error> {
    let dim = e.base.dim();
    let v = e.fiber_dim();
    let n = dim + v;
    let mut t_mat = Matrix::zero(n, n);
    t_mat.set_block(0, 0, &e.section);
    t_mat.set_block(0, dim, &e.inject);
    let t_inv = inverse(&t_mat)
        .ok_or_else(|| Error::InvalidInput("section and injection do not span the total".into()))?;

    let t_cols: Vec<Vec<Rational>> = (0..n).map(|j| t_mat.col(j)).collect();
    let mut bracket = TensorMap::zero(3, n, n);
    for p in 0..n {
        for q in 0..n {
            for s in 0..n {
                let w = e.total.lts.bracket_vec(&t_cols[p], &t_cols[q], &t_cols[s]);
                for (l, val) in t_inv.mul_vec(&w).into_iter().enumerate() {
                    if !val.is_zero() {
                        bracket.set(&[p, q, s], l, val);
                    }
                }
            }
        }
    }
    let d_std = &(&t_inv * &e.total.mdo.d) * &t_mat;
    let total = Mdlts::new(
        TripleSystem::from_tensor(bracket)?,
        ModifiedDifferential::new(d_std, e.total.mdo.lambda.clone()),
    )?;

    let mut inject = Matrix::zero(n, v);
    inject.set_block(dim, 0, &Matrix::identity(v));
    let mut project = Matrix::zero(dim, n);
    project.set_block(0, 0, &Matrix::identity(dim));
    let mut section = Matrix::zero(n, dim);
    section.set_block(0, 0, &Matrix::identity(dim));

    Ok((
        AbelianExtension {
            base: e.base.clone(),
            fiber_d: e.fiber_d.clone(),
            total,
            inject,
            project,
            section,
        },
        t_mat,
    ))
}

/// Outcome of the equivalence decision.
#[derive(Clone, Debug)]
pub struct ExtensionEquivalence {
    pub equivalent: bool,
    /// Verified isomorphism between the totals when equivalent.
    pub witness: Option<Matrix>,
}

/// Two extensions of the same base by the same fiber are equivalent
/// exactly when their extracted cocycles fall in one class; the witness
/// `a + u -> a + xi(a) + u` is solved from the class difference and
/// verified against both structure ladders.
pub fn are_equivalent(
    e1: &AbelianExtension,
    e2: &AbelianExtension,
) -> Result<ExtensionEquivalence, Error> {
    if e1.base != e2.base {
        return Err(Error::InvalidInput("extensions have different bases".into()));
    }
    if e1.fiber_dim() != e2.fiber_dim() || e1.fiber_d != e2.fiber_d {
        return Err(Error::InvalidInput("extensions have different fibers".into()));
    }

    let (s1, t1) = standardize(e1)?;
    let (s2, t2) = standardize(e2)?;
    let (r1, c1) = extract(&s1)?;
    let (r2, c2) = extract(&s2)?;
    if r1 != r2 {
        // Different induced actions cannot be intertwined by a map fixing
        // the fiber and covering the identity.
        return Ok(ExtensionEquivalence {
            equivalent: false,
            witness: None,
        });
    }

    let base = &e1.base;
    let dim = base.dim();
    let v = e1.fiber_dim();
    let diff = c1.as_pair().sub(&c2.as_pair());
    let op = operator_matrix(&base.lts, &base.mdo, &r1, 1)?;
    let limits = Limits::default();
    let bf = cochain_basis(dim, v, 3, op.space, &limits)?;
    let bg = cochain_basis(dim, v, 1, op.space, &limits)?;
    let target = pair_coords(&diff, &bf, Some(&bg))?;
    let Some(x) = solve(&op.matrix, &target) else {
        return Ok(ExtensionEquivalence {
            equivalent: false,
            witness: None,
        });
    };
    let xi = TensorMap::from_coords(1, dim, v, x).to_matrix();

    // Standard-coordinate witness [[I, 0], [xi, I]], conjugated back.
    let mut zeta_std = Matrix::identity(dim + v);
    zeta_std.set_block(dim, 0, &xi);
    let t1_inv = inverse(&t1).expect("standardization is invertible");
    let zeta = &(&t2 * &zeta_std) * &t1_inv;

    // Verify the witness: isomorphism of totals commuting with both legs.
    let hom = check_homomorphism(&e1.total, &e2.total, &zeta)?;
    if !hom.is_isomorphism() {
        return Err(Error::Inconsistent(
            "solved witness fails the isomorphism check".into(),
        ));
    }
    if &zeta * &e1.inject != e2.inject || &e2.project * &zeta != e1.project {
        return Err(Error::Inconsistent(
            "solved witness does not commute with the structure maps".into(),
        ));
    }
    Ok(ExtensionEquivalence {
        equivalent: true,
        witness: Some(zeta),
    })
}

/// Solve a change of section sending cocycle representative `from` to
/// `to`: used by tests to realize section-shift coboundaries.
pub fn section_shift(e: &AbelianExtension, xi: &Matrix) -> Result<Matrix, Error> {
    let dim = e.base.dim();
    if xi.rows() != e.fiber_dim() || xi.cols() != dim {
        return Err(Error::Dimension {
            context: "section shift",
            expected: e.fiber_dim(),
            found: xi.rows(),
        });
    }
    Ok(&e.section + &(&e.inject * xi))
}

/// Convenience: derive the fiber differential of a presented total system,
/// solving `d_total . inject = inject . d_V`.
pub fn induced_fiber_differential(
    total_d: &Matrix,
    inject: &Matrix,
) -> Result<Matrix, Error> {
    let image = total_d * inject;
    solve_matrix(inject, &image).ok_or_else(|| {
        Error::InvalidInput("total differential does not preserve the fiber".into())
    })
}

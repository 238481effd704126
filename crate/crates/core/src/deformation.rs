//! Truncated one-parameter deformations of a system: order-by-order
//! verification, infinitesimals, formal isomorphisms, and rigidity
//! certification through the degree-3 cohomology with adjoint
//! coefficients.
//!
//! A deformation truncated at order `N` is a pair of coefficient lists
//! `nu_0..nu_N` (trilinear maps, `nu_0` the base bracket) and `d_0..d_N`
//! (matrices, `d_0` the base differential). The weight is not deformed.

use num_traits::Zero;

use crate::cochain::CochainPair;
use crate::cohomology::{cohomology_class, cohomology_with, CohomologyOptions};
use crate::error::Error;
use crate::linalg::{solve, Matrix, Rational};
use crate::lts::{adjoint_rep, Identity, Mdlts, Violation};
use crate::par;
use crate::tensor::{unrank, TensorMap};

/// A one-parameter deformation truncated at a fixed order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedDeformation {
    order: usize,
    /// `nu[n]` is the order-`n` trilinear coefficient; `nu[0]` is the base
    /// bracket.
    pub nu: Vec<TensorMap>,
    /// `dmaps[n]` is the order-`n` operator coefficient; `dmaps[0]` is the
    /// base differential.
    pub dmaps: Vec<Matrix>,
    pub lambda: Rational,
}

/// Largest supported truncation order; convolution cost grows with it.
pub const MAX_ORDER: usize = 6;

impl TruncatedDeformation {
    /// The constant deformation: all higher coefficients vanish. The
    /// working truncation order is typically 2.
    pub fn constant(base: &Mdlts, order: usize) -> Self {
        assert!((1..=MAX_ORDER).contains(&order), "order must be 1..=6");
        let dim = base.dim();
        let mut nu = vec![base.lts.bracket().clone()];
        let mut dmaps = vec![base.mdo.d.clone()];
        for _ in 0..order {
            nu.push(TensorMap::zero(3, dim, dim));
            dmaps.push(Matrix::zero(dim, dim));
        }
        TruncatedDeformation {
            order,
            nu,
            dmaps,
            lambda: base.mdo.lambda.clone(),
        }
    }

    /// Build from the higher-order coefficients `nu_1.., d_1..`.
    pub fn from_terms(
        base: &Mdlts,
        nu_higher: Vec<TensorMap>,
        d_higher: Vec<Matrix>,
    ) -> Result<Self, Error> {
        if nu_higher.len() != d_higher.len() || nu_higher.is_empty() {
            return Err(Error::InvalidInput(
                "deformation needs matching, nonempty coefficient lists".into(),
            ));
        }
        if nu_higher.len() > MAX_ORDER {
            return Err(Error::InvalidInput(format!(
                "truncation order {} exceeds the maximum {MAX_ORDER}",
                nu_higher.len()
            )));
        }
        let dim = base.dim();
        for t in &nu_higher {
            if t.arity() != 3 || t.dim() != dim || t.out_dim() != dim {
                return Err(Error::Dimension {
                    context: "deformation bracket coefficient",
                    expected: dim,
                    found: t.dim(),
                });
            }
        }
        for m in &d_higher {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::Dimension {
                    context: "deformation operator coefficient",
                    expected: dim,
                    found: m.rows(),
                });
            }
        }
        let order = nu_higher.len();
        let mut nu = vec![base.lts.bracket().clone()];
        nu.extend(nu_higher);
        let mut dmaps = vec![base.mdo.d.clone()];
        dmaps.extend(d_higher);
        Ok(TruncatedDeformation {
            order,
            nu,
            dmaps,
            lambda: base.mdo.lambda.clone(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.nu[0].dim()
    }
}

/// Per-order verification outcome.
#[derive(Clone, Debug)]
pub struct OrderCheck {
    pub order: usize,
    pub violations: Vec<Violation>,
}

/// Verification report; stops at the first failing order.
#[derive(Clone, Debug)]
pub struct DeformationReport {
    pub orders: Vec<OrderCheck>,
}

impl DeformationReport {
    pub fn is_pass(&self) -> bool {
        self.orders.iter().all(|o| o.violations.is_empty())
    }

    pub fn first_violation(&self) -> Option<(usize, &Violation)> {
        self.orders
            .iter()
            .find_map(|o| o.violations.first().map(|v| (o.order, v)))
    }
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

/// Check the coefficient identities of every order up to the truncation:
/// skew and cyclic symmetry of each `nu_n`, the convolved five-term
/// identity on all basis 5-tuples, and the convolved modified Leibniz rule
/// (with the weight attached to `nu_n`) on all basis triples.
pub fn verify_deformation(base: &Mdlts, def: &TruncatedDeformation) -> Result<DeformationReport, Error> {
    if def.nu[0] != *base.lts.bracket() || def.dmaps[0] != base.mdo.d || def.lambda != base.mdo.lambda {
        return Err(Error::InvalidInput(
            "deformation order-0 coefficients must equal the base system".into(),
        ));
    }
    let dim = base.dim();
    let mut orders = Vec::new();
    for n in 0..=def.order {
        let violations = check_order(def, dim, n);
        let failed = !violations.is_empty();
        orders.push(OrderCheck {
            order: n,
            violations,
        });
        if failed {
            break;
        }
    }
    Ok(DeformationReport { orders })
}

fn check_order(def: &TruncatedDeformation, dim: usize, n: usize) -> Vec<Violation> {
    let nu_n = &def.nu[n];
    let cube = dim * dim * dim;

    // Skew symmetry of the order-n bracket coefficient.
    let skew = par::find_first(cube, |idx| {
        let args = unrank(idx, 3, dim);
        let (a, b, c) = (args[0], args[1], args[2]);
        let lhs = nu_n.value(&[a, b, c]);
        let rhs: Vec<Rational> = nu_n.value(&[b, a, c]).iter().map(|v| -v).collect();
        (lhs != rhs.as_slice()).then(|| Violation {
            identity: Identity::Skew,
            tuple: vec![a, b, c],
            lhs: lhs.to_vec(),
            rhs,
        })
    });
    if let Some(v) = skew {
        return vec![v];
    }

    // Cyclic identity of the order-n coefficient.
    let cyclic = par::find_first(cube, |idx| {
        let args = unrank(idx, 3, dim);
        let (a, b, c) = (args[0], args[1], args[2]);
        let mut sum = nu_n.value(&[a, b, c]).to_vec();
        for (p, q, r) in [(c, a, b), (b, c, a)] {
            for (s, v) in sum.iter_mut().zip(nu_n.value(&[p, q, r])) {
                *s += v;
            }
        }
        sum.iter().any(|v| !v.is_zero()).then(|| Violation {
            identity: Identity::Cyclic,
            tuple: vec![a, b, c],
            lhs: sum,
            rhs: vec![Rational::zero(); dim],
        })
    });
    if let Some(v) = cyclic {
        return vec![v];
    }

    // Convolved five-term identity:
    // sum_{i+j=n} nu_i(x,y,nu_j(a,b,c)) =
    // sum_{i+j=n} nu_i(nu_j(x,y,a),b,c) + nu_i(a,nu_j(x,y,b),c) + nu_i(a,b,nu_j(x,y,c)).
    let five = par::find_first(cube * dim * dim, |idx| {
        let args = unrank(idx, 5, dim);
        let (x, y, a, b, c) = (args[0], args[1], args[2], args[3], args[4]);
        let mut lhs = vec![Rational::zero(); dim];
        let mut rhs = vec![Rational::zero(); dim];
        for i in 0..=n {
            let j = n - i;
            let (ni, nj) = (&def.nu[i], &def.nu[j]);
            for (m, w) in nj.value(&[a, b, c]).iter().enumerate() {
                if !w.is_zero() {
                    vec_add_scaled(&mut lhs, ni.value(&[x, y, m]), w);
                }
            }
            for (m, w) in nj.value(&[x, y, a]).iter().enumerate() {
                if !w.is_zero() {
                    vec_add_scaled(&mut rhs, ni.value(&[m, b, c]), w);
                }
            }
            for (m, w) in nj.value(&[x, y, b]).iter().enumerate() {
                if !w.is_zero() {
                    vec_add_scaled(&mut rhs, ni.value(&[a, m, c]), w);
                }
            }
            for (m, w) in nj.value(&[x, y, c]).iter().enumerate() {
                if !w.is_zero() {
                    vec_add_scaled(&mut rhs, ni.value(&[a, b, m]), w);
                }
            }
        }
        (lhs != rhs).then(|| Violation {
            identity: Identity::FiveTerm,
            tuple: vec![x, y, a, b, c],
            lhs,
            rhs,
        })
    });
    if let Some(v) = five {
        return vec![v];
    }

    // Convolved modified Leibniz rule:
    // sum_{i+j=n} d_i(nu_j(a,b,c)) =
    // sum_{i+j=n} nu_i(d_j a, b, c) + nu_i(a, d_j b, c) + nu_i(a, b, d_j c)
    //   + lambda nu_n(a,b,c).
    let leibniz = par::find_first(cube, |idx| {
        let args = unrank(idx, 3, dim);
        let (a, b, c) = (args[0], args[1], args[2]);
        let mut lhs = vec![Rational::zero(); dim];
        let mut rhs: Vec<Rational> = nu_n.value(&[a, b, c]).iter().map(|v| v * &def.lambda).collect();
        for i in 0..=n {
            let j = n - i;
            let (di, nj) = (&def.dmaps[i], &def.nu[j]);
            let image = di.mul_vec(nj.value(&[a, b, c]));
            for (s, v) in lhs.iter_mut().zip(&image) {
                *s += v;
            }
            let (ni, dj) = (&def.nu[i], &def.dmaps[j]);
            for p in 0..dim {
                let dpa = dj.at(p, a);
                if !dpa.is_zero() {
                    vec_add_scaled(&mut rhs, ni.value(&[p, b, c]), dpa);
                }
                let dpb = dj.at(p, b);
                if !dpb.is_zero() {
                    vec_add_scaled(&mut rhs, ni.value(&[a, p, c]), dpb);
                }
                let dpc = dj.at(p, c);
                if !dpc.is_zero() {
                    vec_add_scaled(&mut rhs, ni.value(&[a, b, p]), dpc);
                }
            }
        }
        (lhs != rhs).then(|| Violation {
            identity: Identity::ModifiedLeibniz,
            tuple: vec![a, b, c],
            lhs,
            rhs,
        })
    });
    leibniz.into_iter().collect()
}

/// The order-1 coefficient pair packaged as a level-2 cochain.
pub fn infinitesimal(def: &TruncatedDeformation) -> CochainPair {
    assert!(def.order >= 1);
    CochainPair::new(
        2,
        def.nu[1].clone(),
        Some(TensorMap::from_matrix(&def.dmaps[1])),
    )
}

/// A truncated formal isomorphism `id + phi_1 t + ... + phi_N t^N`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormalIsomorphism {
    pub order: usize,
    /// `phis[k]` is the coefficient of `t^(k+1)`.
    pub phis: Vec<Matrix>,
}

impl FormalIsomorphism {
    pub fn new(phis: Vec<Matrix>) -> Self {
        let order = phis.len();
        assert!(order >= 1);
        FormalIsomorphism { order, phis }
    }

    pub fn identity(dim: usize, order: usize) -> Self {
        FormalIsomorphism::new(vec![Matrix::zero(dim, dim); order])
    }

    fn dim(&self) -> usize {
        self.phis[0].rows()
    }

    /// Coefficient of `t^k` (identity at `k = 0`, zero beyond the order).
    pub fn coeff(&self, k: usize) -> Matrix {
        if k == 0 {
            Matrix::identity(self.dim())
        } else if k <= self.order {
            self.phis[k - 1].clone()
        } else {
            Matrix::zero(self.dim(), self.dim())
        }
    }

    /// Coefficients of the truncated inverse series up to `up_to`:
    /// `psi_0 = id`, `psi_n = -sum_{k=1..n} phi_k psi_{n-k}`.
    pub fn inverse_coeffs(&self, up_to: usize) -> Vec<Matrix> {
        let dim = self.dim();
        let mut psi = vec![Matrix::identity(dim)];
        for n in 1..=up_to {
            let mut acc = Matrix::zero(dim, dim);
            for k in 1..=n {
                acc = &acc + &(&self.coeff(k) * &psi[n - k]);
            }
            psi.push(-&acc);
        }
        psi
    }

    /// Series composition `(self . other)_n = sum_{i+j=n} self_i other_j`,
    /// truncated at `order`.
    pub fn compose(&self, other: &FormalIsomorphism, order: usize) -> FormalIsomorphism {
        let dim = self.dim();
        let mut phis = Vec::with_capacity(order);
        for n in 1..=order {
            let mut acc = Matrix::zero(dim, dim);
            for i in 0..=n {
                acc = &acc + &(&self.coeff(i) * &other.coeff(n - i));
            }
            phis.push(acc);
        }
        FormalIsomorphism::new(phis)
    }
}

/// Precompose an argument slot of a trilinear tensor with a matrix:
/// `t'(.., e_a at slot, ..) = sum_p m[p][a] t(.., e_p, ..)`.
fn contract_slot(t: &TensorMap, slot: usize, m: &Matrix) -> TensorMap {
    let dim = t.dim();
    let out = t.out_dim();
    let mut result = TensorMap::zero(3, dim, out);
    for (args, base) in t.tuples() {
        let block = &t.coords()[base..base + out];
        if block.iter().all(Rational::is_zero) {
            continue;
        }
        for a in 0..dim {
            let w = m.at(args[slot], a);
            if w.is_zero() {
                continue;
            }
            let mut target = args.clone();
            target[slot] = a;
            for (o, v) in block.iter().enumerate() {
                if !v.is_zero() {
                    result.add_at(&target, o, &(w * v));
                }
            }
        }
    }
    result
}

fn map_output(t: &TensorMap, m: &Matrix) -> TensorMap {
    let dim = t.dim();
    let out = m.rows();
    let mut result = TensorMap::zero(3, dim, out);
    for (args, base) in t.tuples() {
        let block = &t.coords()[base..base + t.out_dim()];
        if block.iter().all(Rational::is_zero) {
            continue;
        }
        let image = m.mul_vec(block);
        for (o, v) in image.into_iter().enumerate() {
            if !v.is_zero() {
                result.set(&args, o, v);
            }
        }
    }
    result
}

/// Transport a deformation along a formal isomorphism:
/// `nu'_t = phi_t^{-1} . nu_t . (phi_t x phi_t x phi_t)` and
/// `d'_t = phi_t^{-1} . d_t . phi_t`, truncated at the deformation order.
/// `phi` is then a formal isomorphism from the result to the input.
#[allow(clippy::needless_range_loop)] // series coefficients are indexed by order
pub fn apply_isomorphism(
    base: &Mdlts,
    def: &TruncatedDeformation,
    phi: &FormalIsomorphism,
) -> TruncatedDeformation {
    let dim = base.dim();
    let order = def.order;
    let psi = phi.inverse_coeffs(order);
    let ident = Matrix::identity(dim);

    let mut nu = Vec::with_capacity(order + 1);
    let mut dmaps = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let mut acc = TensorMap::zero(3, dim, dim);
        for p in 0..=n {
            for i in 0..=n - p {
                if def.nu[i].is_zero() {
                    continue;
                }
                for j in 0..=n - p - i {
                    for k in 0..=n - p - i - j {
                        let l = n - p - i - j - k;
                        let mut term = def.nu[i].clone();
                        if j > 0 {
                            term = contract_slot(&term, 0, &phi.coeff(j));
                        }
                        if k > 0 {
                            term = contract_slot(&term, 1, &phi.coeff(k));
                        }
                        if l > 0 {
                            term = contract_slot(&term, 2, &phi.coeff(l));
                        }
                        if p > 0 || psi[p] != ident {
                            term = map_output(&term, &psi[p]);
                        }
                        acc = acc.add(&term);
                    }
                }
            }
        }
        nu.push(acc);

        let mut dacc = Matrix::zero(dim, dim);
        for p in 0..=n {
            for i in 0..=n - p {
                let j = n - p - i;
                dacc = &dacc + &(&(&psi[p] * &def.dmaps[i]) * &phi.coeff(j));
            }
        }
        dmaps.push(dacc);
    }

    TruncatedDeformation {
        order,
        nu,
        dmaps,
        lambda: def.lambda.clone(),
    }
}

/// Check the formal-isomorphism equations `phi_t . nu'_t = nu_t . phi_t^x3`
/// and `phi_t . d'_t = d_t . phi_t` coefficient-wise up to `up_to`.
/// `from` carries the primed coefficients.
pub fn check_formal_isomorphism(
    from: &TruncatedDeformation,
    to: &TruncatedDeformation,
    phi: &FormalIsomorphism,
    up_to: usize,
) -> bool {
    let dim = from.dim();
    for n in 0..=up_to {
        // Bracket equation at order n.
        let mut lhs = TensorMap::zero(3, dim, dim);
        for i in 0..=n {
            let j = n - i;
            if j < from.nu.len() && !from.nu[j].is_zero() {
                lhs = lhs.add(&map_output(&from.nu[j], &phi.coeff(i)));
            }
        }
        let mut rhs = TensorMap::zero(3, dim, dim);
        for i in 0..=n {
            if i >= to.nu.len() || to.nu[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                for k in 0..=n - i - j {
                    let l = n - i - j - k;
                    let mut term = to.nu[i].clone();
                    if j > 0 {
                        term = contract_slot(&term, 0, &phi.coeff(j));
                    }
                    if k > 0 {
                        term = contract_slot(&term, 1, &phi.coeff(k));
                    }
                    if l > 0 {
                        term = contract_slot(&term, 2, &phi.coeff(l));
                    }
                    rhs = rhs.add(&term);
                }
            }
        }
        if lhs != rhs {
            return false;
        }

        // Operator equation at order n.
        let mut dl = Matrix::zero(dim, dim);
        let mut dr = Matrix::zero(dim, dim);
        for i in 0..=n {
            let j = n - i;
            if j < from.dmaps.len() {
                dl = &dl + &(&phi.coeff(i) * &from.dmaps[j]);
            }
            if i < to.dmaps.len() {
                dr = &dr + &(&to.dmaps[i] * &phi.coeff(j));
            }
        }
        if dl != dr {
            return false;
        }
    }
    true
}

/// Decide whether the infinitesimals of two deformations fall in the same
/// degree-3 class with adjoint coefficients; `phi` must satisfy the formal
/// isomorphism equations from `d2` to `d1` at order 1.
pub fn equivalent_infinitesimals_check(
    base: &Mdlts,
    d1: &TruncatedDeformation,
    d2: &TruncatedDeformation,
    phi: &FormalIsomorphism,
) -> Result<bool, Error> {
    if !check_formal_isomorphism(d2, d1, phi, 1) {
        return Err(Error::InvalidInput(
            "map fails the formal isomorphism equations at order 1".into(),
        ));
    }
    let r = adjoint_rep(&base.lts, &base.mdo);
    let c1 = cohomology_class(&base.lts, &base.mdo, &r, &infinitesimal(d1))?;
    let c2 = cohomology_class(&base.lts, &base.mdo, &r, &infinitesimal(d2))?;
    Ok(c1 == c2)
}

/// Rigidity certificate through the degree-3 group with adjoint
/// coefficients.
#[derive(Clone, Debug)]
pub struct RigidityReport {
    pub dim_h3: usize,
    /// True when the degree-3 group vanishes, certifying that every
    /// truncated deformation's infinitesimal is a coboundary.
    pub rigid_certified: bool,
    /// A nonzero cocycle representative witnessing a nontrivial
    /// infinitesimal when certification fails.
    pub candidate: Option<CochainPair>,
}

pub fn rigidity_report(base: &Mdlts) -> Result<RigidityReport, Error> {
    rigidity_report_with(base, &CohomologyOptions::default())
}

pub fn rigidity_report_with(base: &Mdlts, opts: &CohomologyOptions) -> Result<RigidityReport, Error> {
    let r = adjoint_rep(&base.lts, &base.mdo);
    let h3 = cohomology_with(&base.lts, &base.mdo, &r, 3, opts)?;
    Ok(RigidityReport {
        dim_h3: h3.dim_cohomology,
        rigid_certified: h3.dim_cohomology == 0,
        candidate: h3.representatives.first().map(|c| c.pair.clone()),
    })
}

/// Solve the first elimination step: a linear preimage `phi_1` with
/// `partial(phi_1) = infinitesimal(def)`, when one exists.
pub fn eliminate_infinitesimal(base: &Mdlts, def: &TruncatedDeformation) -> Result<Option<Matrix>, Error> {
    let r = adjoint_rep(&base.lts, &base.mdo);
    let op = crate::cochain::operator_matrix(&base.lts, &base.mdo, &r, 1)?;
    let dim = base.dim();
    let limits = crate::cochain::Limits::default();
    let bf = crate::cochain::cochain_basis(dim, dim, 3, op.space, &limits)?;
    let bg = crate::cochain::cochain_basis(dim, dim, 1, op.space, &limits)?;
    let target = crate::cochain::pair_coords(&infinitesimal(def), &bf, Some(&bg))?;
    Ok(solve(&op.matrix, &target)
        .map(|x| TensorMap::from_coords(1, dim, dim, x).to_matrix()))
}

//! Subcategory handles, membership evidence and approximations.
//!
//! A handle is either `add(S)` for a finite generator list `S` or a formal
//! extension `X * Y` of two handles. Left approximations into `X * Y` follow
//! the pushout construction: approximate `M` into `Y`, cover the result by a
//! projective, approximate the kernel of the combined map into `X`, and push
//! out.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::matrix::Matrix;
use crate::quiver::Quiver;
use crate::rep::{
    direct_sum, ext1_basis, extension_from_cocycle, hom_basis, image, iso_test, kernel,
    projective_epi, pushout, pushout_factor, subreps, Budget, DirectSum, Pushout, Rep, RepMorphism,
    ShortExactSeq,
};

/// `add(S)` for a finite list of generators over one quiver and field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddCategory {
    quiver: Arc<Quiver>,
    field: FieldSpec,
    generators: Vec<Rep>,
}

impl AddCategory {
    pub fn new(quiver: &Arc<Quiver>, field: FieldSpec, generators: Vec<Rep>) -> Result<Self> {
        let probe = Rep::zero(quiver.clone(), field);
        for g in &generators {
            probe.check_compatible(g)?;
        }
        Ok(AddCategory {
            quiver: quiver.clone(),
            field,
            generators,
        })
    }

    /// `add(S)` for a nonempty generator list, taking the quiver and field
    /// from the first generator.
    pub fn of(generators: Vec<Rep>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidInput("empty generator list".into()))?;
        let (q, f) = (first.quiver().clone(), first.field());
        AddCategory::new(&q, f, generators)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn generators(&self) -> &[Rep] {
        &self.generators
    }

    /// `⊕_i S_i^{mults[i]}` with the copies of each generator adjacent, in
    /// generator order.
    pub fn sum(&self, mults: &[usize]) -> Result<DirectSum> {
        if mults.len() != self.generators.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} multiplicities for {} generators",
                mults.len(),
                self.generators.len()
            )));
        }
        let parts: Vec<Rep> = self
            .generators
            .iter()
            .zip(mults)
            .flat_map(|(g, &c)| std::iter::repeat_n(g.clone(), c))
            .collect();
        direct_sum(&self.quiver, self.field, &parts)
    }

    /// The same generators over a larger quiver; see [`Rep::rebase`].
    pub fn rebase(&self, quiver: &Arc<Quiver>) -> Result<AddCategory> {
        let generators = self
            .generators
            .iter()
            .map(|g| g.rebase(quiver))
            .collect::<Result<_>>()?;
        AddCategory::new(quiver, self.field, generators)
    }

    fn check(&self, m: &Rep) -> Result<()> {
        Rep::zero(self.quiver.clone(), self.field).check_compatible(m)
    }
}

/// A finite description of a subcategory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubcatHandle {
    Add(AddCategory),
    Ext(Box<ExtCategory>),
}

/// The extension category `left * right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtCategory {
    pub left: SubcatHandle,
    pub right: SubcatHandle,
}

impl From<AddCategory> for SubcatHandle {
    fn from(a: AddCategory) -> Self {
        SubcatHandle::Add(a)
    }
}

impl SubcatHandle {
    pub fn ext(left: SubcatHandle, right: SubcatHandle) -> SubcatHandle {
        SubcatHandle::Ext(Box::new(ExtCategory { left, right }))
    }

    /// `X * X * ... * X` with `r` factors, nested to the left.
    pub fn filt(x: &AddCategory, r: usize) -> Result<SubcatHandle> {
        if r == 0 {
            return Err(Error::InvalidInput(
                "filtration length must be positive".into(),
            ));
        }
        let mut h = SubcatHandle::Add(x.clone());
        for _ in 1..r {
            h = SubcatHandle::ext(h, SubcatHandle::Add(x.clone()));
        }
        Ok(h)
    }

    pub fn rebase(&self, quiver: &Arc<Quiver>) -> Result<SubcatHandle> {
        Ok(match self {
            SubcatHandle::Add(a) => SubcatHandle::Add(a.rebase(quiver)?),
            SubcatHandle::Ext(e) => {
                SubcatHandle::ext(e.left.rebase(quiver)?, e.right.rebase(quiver)?)
            }
        })
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        match self {
            SubcatHandle::Add(a) => a.quiver(),
            SubcatHandle::Ext(e) => e.left.quiver(),
        }
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            SubcatHandle::Add(a) => a.field(),
            SubcatHandle::Ext(e) => e.left.field(),
        }
    }
}

/// Evidence that a representation lies in `add(S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AddMembership {
    /// An isomorphism onto `⊕ S_i^{c_i}`.
    Sum {
        multiplicities: Vec<usize>,
        iso: RepMorphism,
    },
    /// A split monomorphism into `⊕ S_i^{c_i}` with its retraction.
    Summand {
        multiplicities: Vec<usize>,
        embedding: RepMorphism,
        retraction: RepMorphism,
    },
}

impl AddMembership {
    pub fn multiplicities(&self) -> &[usize] {
        match self {
            AddMembership::Sum { multiplicities, .. }
            | AddMembership::Summand { multiplicities, .. } => multiplicities,
        }
    }

    pub fn rebase(&self, quiver: &Arc<Quiver>) -> Result<AddMembership> {
        Ok(match self {
            AddMembership::Sum {
                multiplicities,
                iso,
            } => AddMembership::Sum {
                multiplicities: multiplicities.clone(),
                iso: iso.rebase(quiver)?,
            },
            AddMembership::Summand {
                multiplicities,
                embedding,
                retraction,
            } => AddMembership::Summand {
                multiplicities: multiplicities.clone(),
                embedding: embedding.rebase(quiver)?,
                retraction: retraction.rebase(quiver)?,
            },
        })
    }

    pub fn verify(&self, m: &Rep, s: &AddCategory) -> Result<()> {
        let bad = |msg: &str| Err(Error::CertificateInvalid(msg.into()));
        let sum = s.sum(self.multiplicities())?;
        match self {
            AddMembership::Sum { iso, .. } => {
                if iso.source() != m || iso.target() != &sum.rep {
                    return bad("isomorphism has the wrong ends");
                }
                if !iso.is_natural() || !iso.is_iso() {
                    return bad("claimed isomorphism is not invertible");
                }
            }
            AddMembership::Summand {
                embedding,
                retraction,
                ..
            } => {
                if embedding.source() != m || embedding.target() != &sum.rep {
                    return bad("embedding has the wrong ends");
                }
                if !embedding.is_natural() || !retraction.is_natural() {
                    return bad("embedding or retraction is not a morphism");
                }
                if retraction.after(embedding)? != RepMorphism::identity(m) {
                    return bad("retraction does not split the embedding");
                }
            }
        }
        Ok(())
    }
}

/// Evidence that a representation lies in a handle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Add(AddMembership),
    Ext {
        ses: ShortExactSeq,
        sub: Box<Membership>,
        quotient: Box<Membership>,
    },
}

impl Membership {
    pub fn rebase(&self, quiver: &Arc<Quiver>) -> Result<Membership> {
        Ok(match self {
            Membership::Add(a) => Membership::Add(a.rebase(quiver)?),
            Membership::Ext { ses, sub, quotient } => Membership::Ext {
                ses: ses.rebase(quiver)?,
                sub: Box::new(sub.rebase(quiver)?),
                quotient: Box::new(quotient.rebase(quiver)?),
            },
        })
    }

    pub fn verify(&self, m: &Rep, handle: &SubcatHandle) -> Result<()> {
        match (self, handle) {
            (Membership::Add(a), SubcatHandle::Add(s)) => a.verify(m, s),
            (Membership::Ext { ses, sub, quotient }, SubcatHandle::Ext(e)) => {
                if ses.middle() != m {
                    return Err(Error::CertificateInvalid(
                        "sequence does not have the object in the middle".into(),
                    ));
                }
                if !ses.verify() {
                    return Err(Error::CertificateInvalid("sequence is not exact".into()));
                }
                sub.verify(ses.left(), &e.left)?;
                quotient.verify(ses.right(), &e.right)
            }
            _ => Err(Error::CertificateInvalid(
                "evidence does not match the shape of the handle".into(),
            )),
        }
    }
}

/// Dimension-feasible multiplicity vectors `c` with `Σ c_i dims(S_i) = dims`.
fn multiplicity_candidates(dims: &[usize], gens: &[Rep]) -> Vec<Vec<usize>> {
    fn go(
        k: usize,
        rest: &mut Vec<usize>,
        gens: &[Rep],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == gens.len() {
            if rest.iter().all(|&d| d == 0) {
                out.push(cur.clone());
            }
            return;
        }
        let g = gens[k].dims();
        let max = if gens[k].is_zero() {
            0
        } else {
            g.iter()
                .zip(rest.iter())
                .filter(|(&gd, _)| gd > 0)
                .map(|(&gd, &r)| r / gd)
                .min()
                .unwrap_or(0)
        };
        for c in 0..=max {
            for (r, &gd) in rest.iter_mut().zip(g) {
                *r -= c * gd;
            }
            cur.push(c);
            go(k + 1, rest, gens, cur, out);
            cur.pop();
            for (r, &gd) in rest.iter_mut().zip(g) {
                *r += c * gd;
            }
        }
    }
    let mut out = Vec::new();
    go(0, &mut dims.to_vec(), gens, &mut Vec::new(), &mut out);
    out
}

/// Membership in `S^⊕`: an isomorphism onto some `⊕ S_i^{c_i}`, searching
/// every dimension-feasible multiplicity vector.
pub fn member_sum(m: &Rep, s: &AddCategory) -> Result<Option<AddMembership>> {
    s.check(m)?;
    for mults in multiplicity_candidates(m.dims(), s.generators()) {
        let sum = s.sum(&mults)?;
        if let Some(iso) = iso_test(m, &sum.rep)? {
            return Ok(Some(AddMembership::Sum {
                multiplicities: mults,
                iso,
            }));
        }
    }
    Ok(None)
}

/// Membership in `add(S)`. Direct sums of generators are tried first; a
/// summand of such a sum is then detected by the left `add(S)`-approximation
/// being a split monomorphism.
pub fn member_add(m: &Rep, s: &AddCategory) -> Result<Option<AddMembership>> {
    if let Some(found) = member_sum(m, s)? {
        return Ok(Some(found));
    }
    let cert = left_approx_add(m, s)?;
    let z = &cert.approximation;
    if !z.is_injective() {
        return Ok(None);
    }
    let Some(retraction) = retraction_of(z)? else {
        return Ok(None);
    };
    let multiplicities = cert.membership_multiplicities();
    Ok(Some(AddMembership::Summand {
        multiplicities,
        embedding: z.clone(),
        retraction,
    }))
}

/// `r` with `r ∘ z = id`, if `z` is a split monomorphism.
fn retraction_of(z: &RepMorphism) -> Result<Option<RepMorphism>> {
    let id = RepMorphism::identity(z.source());
    factor_through(&id, z)
}

/// Membership in an arbitrary handle. Extension handles need an exhaustive
/// subrepresentation search and therefore a finite field.
pub fn member(m: &Rep, handle: &SubcatHandle, budget: &Budget) -> Result<Option<Membership>> {
    match handle {
        SubcatHandle::Add(s) => Ok(member_add(m, s)?.map(Membership::Add)),
        SubcatHandle::Ext(e) => crate::extfilt::member_ext(m, &e.left, &e.right, budget),
    }
}

/// Coefficients `c` with `Σ c_j cols[j] = target`, all flattened to columns.
fn combination(field: FieldSpec, target: &Matrix, cols: &[Matrix]) -> Result<Option<Vec<Scalar>>> {
    let refs: Vec<&Matrix> = cols.iter().collect();
    let system = Matrix::hstack(field, target.rows(), &refs)?;
    Ok(system
        .solve(target)?
        .map(|x| (0..x.rows()).map(|r| x.entry(r, 0)).collect()))
}

/// `h: N -> Z` with `h ∘ z = f`, for `f: M -> Z` and `z: M -> N`.
pub fn factor_through(f: &RepMorphism, z: &RepMorphism) -> Result<Option<RepMorphism>> {
    if f.source() != z.source() {
        return Err(Error::NotComposable(
            "factorization needs a common source".into(),
        ));
    }
    let (n, t) = (z.target(), f.target());
    let basis = hom_basis(n, t)?;
    let cols = basis
        .iter()
        .map(|b| b.after(z).map(|c| c.flatten()))
        .collect::<Result<Vec<_>>>()?;
    let Some(coeffs) = combination(f.field(), &f.flatten(), &cols)? else {
        return Ok(None);
    };
    Ok(Some(RepMorphism::linear_combination(
        n, t, &coeffs, &basis,
    )?))
}

/// `h: T -> N` with `z ∘ h = f`, for `f: T -> M` and `z: N -> M`.
pub fn lift_through(f: &RepMorphism, z: &RepMorphism) -> Result<Option<RepMorphism>> {
    if f.target() != z.target() {
        return Err(Error::NotComposable("lifting needs a common target".into()));
    }
    let (t, n) = (f.source(), z.source());
    let basis = hom_basis(t, n)?;
    let cols = basis
        .iter()
        .map(|b| z.after(b).map(|c| c.flatten()))
        .collect::<Result<Vec<_>>>()?;
    let Some(coeffs) = combination(f.field(), &f.flatten(), &cols)? else {
        return Ok(None);
    };
    Ok(Some(RepMorphism::linear_combination(
        t, n, &coeffs, &basis,
    )?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// An approximation together with evidence that its far end lies in the
/// handle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxCertificate {
    pub side: Side,
    /// `M -> X_M` for left approximations, `X_M -> M` for right ones.
    pub approximation: RepMorphism,
    pub handle: SubcatHandle,
    pub membership: Membership,
}

impl ApproxCertificate {
    /// The approximated representation `M`.
    pub fn object(&self) -> &Rep {
        match self.side {
            Side::Left => self.approximation.source(),
            Side::Right => self.approximation.target(),
        }
    }

    /// The approximating representation `X_M` in the handle.
    pub fn approximant(&self) -> &Rep {
        match self.side {
            Side::Left => self.approximation.target(),
            Side::Right => self.approximation.source(),
        }
    }

    fn membership_multiplicities(&self) -> Vec<usize> {
        match &self.membership {
            Membership::Add(a) => a.multiplicities().to_vec(),
            Membership::Ext { .. } => Vec::new(),
        }
    }

    /// Re-checks the membership evidence and the universal property against
    /// the handle's test objects. For `add(S)` handles these are the
    /// generators and the check is complete. For `X * Y` they are the test
    /// objects of both sides together with the middle terms of basis
    /// extensions between them, so a pass is necessary but not sufficient.
    pub fn verify(&self) -> Result<()> {
        if !self.approximation.is_natural() {
            return Err(Error::CertificateInvalid(
                "approximation is not a morphism".into(),
            ));
        }
        self.membership.verify(self.approximant(), &self.handle)?;
        let tests = test_objects(&self.handle)?;
        if !has_approximation_property(&self.approximation, self.side, &tests)? {
            return Err(Error::CertificateInvalid(
                "some morphism to a test object does not factor".into(),
            ));
        }
        Ok(())
    }
}

/// Members of the handle that any approximation must see.
pub fn test_objects(handle: &SubcatHandle) -> Result<Vec<Rep>> {
    match handle {
        SubcatHandle::Add(s) => Ok(s.generators().to_vec()),
        SubcatHandle::Ext(e) => {
            let subs = test_objects(&e.left)?;
            let quots = test_objects(&e.right)?;
            let mut out = subs.clone();
            out.extend(quots.iter().cloned());
            for y in &quots {
                for x in &subs {
                    for c in ext1_basis(y, x)? {
                        out.push(extension_from_cocycle(y, x, &c)?.middle().clone());
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Whether every morphism between `M` and a test object factors through `z`.
fn has_approximation_property(z: &RepMorphism, side: Side, tests: &[Rep]) -> Result<bool> {
    for g in tests {
        match side {
            Side::Left => {
                for b in hom_basis(z.source(), g)? {
                    if factor_through(&b, z)?.is_none() {
                        return Ok(false);
                    }
                }
            }
            Side::Right => {
                for b in hom_basis(g, z.target())? {
                    if lift_through(&b, z)?.is_none() {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// The left `add(S)`-approximation `M -> ⊕ S_i^{d_i}`, `d_i = dim Hom(M, S_i)`,
/// whose components into the copies of `S_i` run through a basis of
/// `Hom(M, S_i)`.
pub fn left_approx_add(m: &Rep, s: &AddCategory) -> Result<ApproxCertificate> {
    s.check(m)?;
    let bases = s
        .generators()
        .iter()
        .map(|g| hom_basis(m, g))
        .collect::<Result<Vec<_>>>()?;
    let mults: Vec<usize> = bases.iter().map(Vec::len).collect();
    let sum = s.sum(&mults)?;
    let mut z = RepMorphism::zero(m, &sum.rep)?;
    for (b, inj) in bases.iter().flatten().zip(&sum.injections) {
        z = z.add(&inj.after(b)?)?;
    }
    Ok(ApproxCertificate {
        side: Side::Left,
        approximation: z,
        handle: SubcatHandle::Add(s.clone()),
        membership: Membership::Add(AddMembership::Sum {
            multiplicities: mults,
            iso: RepMorphism::identity(&sum.rep),
        }),
    })
}

/// The right `add(S)`-approximation `⊕ S_i^{d_i} -> M`, dual to
/// [`left_approx_add`].
pub fn right_approx_add(m: &Rep, s: &AddCategory) -> Result<ApproxCertificate> {
    s.check(m)?;
    let bases = s
        .generators()
        .iter()
        .map(|g| hom_basis(g, m))
        .collect::<Result<Vec<_>>>()?;
    let mults: Vec<usize> = bases.iter().map(Vec::len).collect();
    let sum = s.sum(&mults)?;
    let mut z = RepMorphism::zero(&sum.rep, m)?;
    for (b, proj) in bases.iter().flatten().zip(&sum.projections) {
        z = z.add(&b.after(proj)?)?;
    }
    Ok(ApproxCertificate {
        side: Side::Right,
        approximation: z,
        handle: SubcatHandle::Add(s.clone()),
        membership: Membership::Add(AddMembership::Sum {
            multiplicities: mults,
            iso: RepMorphism::identity(&sum.rep),
        }),
    })
}

/// Left approximation into any handle: `add(S)` directly, extension handles
/// by the pushout construction.
pub fn left_approx(m: &Rep, handle: &SubcatHandle) -> Result<ApproxCertificate> {
    match handle {
        SubcatHandle::Add(s) => left_approx_add(m, s),
        SubcatHandle::Ext(e) => Ok(gt_left_approx(m, &e.left, &e.right)?.certificate),
    }
}

/// Greedily removes generator copies from an `add(S)` approximation while
/// the approximation property survives. Copies of larger generators are
/// tried first, and among equal sizes the later ones.
pub fn minimize_approx(cert: &ApproxCertificate) -> Result<ApproxCertificate> {
    let SubcatHandle::Add(s) = &cert.handle else {
        return Err(Error::InvalidInput(
            "only add(S) approximations can be minimized".into(),
        ));
    };
    let Membership::Add(AddMembership::Sum {
        multiplicities,
        iso,
    }) = &cert.membership
    else {
        return Err(Error::InvalidInput(
            "minimization needs a direct-sum target".into(),
        ));
    };
    // move the approximation onto the canonical sum
    let mut z = match cert.side {
        Side::Left => iso.after(&cert.approximation)?,
        Side::Right => {
            let inv = iso.inverse().ok_or_else(|| {
                Error::CertificateInvalid("claimed isomorphism is not invertible".into())
            })?;
            cert.approximation.after(&inv)?
        }
    };
    let mut mults = multiplicities.clone();
    let mut copies: Vec<(usize, usize)> = Vec::new();
    let mut order: Vec<usize> = (0..s.generators().len()).collect();
    order.sort_by_key(|&i| {
        (
            std::cmp::Reverse(s.generators()[i].total_dim()),
            std::cmp::Reverse(i),
        )
    });
    for &i in &order {
        for c in (0..mults[i]).rev() {
            copies.push((i, c));
        }
    }
    for (gen, _) in copies {
        let sum = s.sum(&mults)?;
        // the last copy of `gen` in the current canonical sum
        let offset: usize = mults[..=gen].iter().sum::<usize>() - 1;
        let mut fewer = mults.clone();
        fewer[gen] -= 1;
        let smaller = s.sum(&fewer)?;
        let keep: Vec<usize> = (0..sum.injections.len()).filter(|&k| k != offset).collect();
        let candidate = match cert.side {
            Side::Left => {
                let mut acc = RepMorphism::zero(z.source(), &smaller.rep)?;
                for (new, &old) in keep.iter().enumerate() {
                    acc =
                        acc.add(&smaller.injections[new].after(&sum.projections[old].after(&z)?)?)?;
                }
                acc
            }
            Side::Right => {
                let mut acc = RepMorphism::zero(&smaller.rep, z.target())?;
                for (new, &old) in keep.iter().enumerate() {
                    acc = acc.add(
                        &z.after(&sum.injections[old])?
                            .after(&smaller.projections[new])?,
                    )?;
                }
                acc
            }
        };
        if has_approximation_property(&candidate, cert.side, s.generators())? {
            z = candidate;
            mults = fewer;
        }
    }
    let sum = s.sum(&mults)?;
    Ok(ApproxCertificate {
        side: cert.side,
        approximation: z,
        handle: cert.handle.clone(),
        membership: Membership::Add(AddMembership::Sum {
            multiplicities: mults,
            iso: RepMorphism::identity(&sum.rep),
        }),
    })
}

/// Every intermediate object of the pushout construction, for auditing.
#[derive(Clone, Debug)]
pub struct GtApprox {
    /// The resulting left approximation `z_M: M -> Z_M` with its sequence
    /// `0 -> X_K -> Z_M -> Y_M -> 0` as membership evidence.
    pub certificate: ApproxCertificate,
    /// `y_M: M -> Y_M`.
    pub y_approx: ApproxCertificate,
    /// `π: P -> Y_M`, with `P` projective (zero in the subobject-closed case).
    pub cover: RepMorphism,
    /// `K -> M ⊕ P`, the kernel of `(y_M, π)`.
    pub kernel: RepMorphism,
    /// `x_K: K -> X_K`.
    pub x_approx: ApproxCertificate,
    pub pushout: Pushout,
}

/// Left approximation of `m` into `x * y`.
///
/// Needs enough projectives, so the quiver must be acyclic; otherwise
/// [`Error::NonAcyclicQuiver`] is returned.
pub fn gt_left_approx(m: &Rep, x: &SubcatHandle, y: &SubcatHandle) -> Result<GtApprox> {
    m.check_compatible(&Rep::zero(x.quiver().clone(), x.field()))?;
    if !m.quiver().is_acyclic() {
        return Err(Error::NonAcyclicQuiver);
    }
    let y_approx = left_approx(m, y)?;
    let (_, cover) = projective_epi(y_approx.approximant())?;
    finish_gt(m, x, y, y_approx, cover)
}

/// Left approximation of `m` into `x * y` for a handle `y` closed under
/// subobjects: the `Y`-approximation is replaced by its image, which makes it
/// epic, so no projective cover is needed and cyclic quivers are allowed.
///
/// Closure under subobjects is the caller's claim. It is spot-checked over
/// finite fields on the subrepresentations of the generators of an `add(S)`
/// handle, and the image of the approximation must itself lie in `y`;
/// either failure gives [`Error::SubobjectClosureViolation`].
pub fn gt_left_approx_subobject_closed(
    m: &Rep,
    x: &SubcatHandle,
    y: &SubcatHandle,
    budget: &Budget,
) -> Result<GtApprox> {
    m.check_compatible(&Rep::zero(y.quiver().clone(), y.field()))?;
    spot_check_subobject_closed(y, budget)?;
    let full = left_approx(m, y)?;
    let im = image(&full.approximation);
    let membership = member(&im.rep, y, budget)?.ok_or_else(|| {
        Error::SubobjectClosureViolation(format!(
            "image {:?} of the approximation lies outside the subcategory",
            im.rep.dims()
        ))
    })?;
    let y_approx = ApproxCertificate {
        side: Side::Left,
        approximation: im.projection,
        handle: y.clone(),
        membership,
    };
    let zero = Rep::zero(m.quiver().clone(), m.field());
    let cover = RepMorphism::zero(&zero, y_approx.approximant())?;
    finish_gt(m, x, y, y_approx, cover)
}

fn spot_check_subobject_closed(y: &SubcatHandle, budget: &Budget) -> Result<()> {
    let SubcatHandle::Add(s) = y else {
        return Ok(());
    };
    if !s.field().is_finite() {
        return Ok(());
    }
    for g in s.generators() {
        let subs = match subreps(g, budget) {
            Ok(subs) => subs,
            Err(Error::BudgetExceeded { .. }) => continue,
            Err(e) => return Err(e),
        };
        for inc in subs {
            if member_add(inc.source(), s)?.is_none() {
                return Err(Error::SubobjectClosureViolation(format!(
                    "subrepresentation {:?} of generator {:?} lies outside add(S)",
                    inc.source().dims(),
                    g.dims()
                )));
            }
        }
    }
    Ok(())
}

/// Steps (3) to (6) of the construction, given `y_M` and a cover `π` of its
/// target.
fn finish_gt(
    m: &Rep,
    x: &SubcatHandle,
    y: &SubcatHandle,
    y_approx: ApproxCertificate,
    cover: RepMorphism,
) -> Result<GtApprox> {
    let y_m = &y_approx.approximation;
    let target = y_m.target();
    let sum = direct_sum(m.quiver(), m.field(), &[m.clone(), cover.source().clone()])?;
    let combined = y_m
        .after(&sum.projections[0])?
        .add(&cover.after(&sum.projections[1])?)?;
    let (_, k_inc) = kernel(&combined);
    let x_approx = left_approx(k_inc.source(), x)?;
    let po = pushout(&k_inc, &x_approx.approximation)?;
    let z_m = po.from_left.after(&sum.injections[0])?;
    let to_y = RepMorphism::zero(x_approx.approximant(), target)?;
    let q = pushout_factor(&po, &combined, &to_y)?.ok_or_else(|| {
        Error::CertificateInvalid("the combined map does not factor through the pushout".into())
    })?;
    let ses = ShortExactSeq::new(po.from_right.clone(), q)?;
    let certificate = ApproxCertificate {
        side: Side::Left,
        approximation: z_m,
        handle: SubcatHandle::ext(x.clone(), y.clone()),
        membership: Membership::Ext {
            ses,
            sub: Box::new(x_approx.membership.clone()),
            quotient: Box::new(y_approx.membership.clone()),
        },
    };
    Ok(GtApprox {
        certificate,
        y_approx,
        cover,
        kernel: k_inc,
        x_approx,
        pushout: po,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::projective;

    const F2: FieldSpec = FieldSpec::Prime(2);

    fn a2() -> (Arc<Quiver>, Rep, Rep, Rep) {
        let q = Quiver::a2();
        let s1 = Rep::simple(q.clone(), F2, 0);
        let s2 = Rep::simple(q.clone(), F2, 1);
        let p1 = projective(&q, F2, 0).unwrap();
        (q, s1, s2, p1)
    }

    #[test]
    fn left_approx_of_s1_into_add_p1_is_zero() {
        let (_, s1, _, p1) = a2();
        let cert = left_approx_add(&s1, &AddCategory::of(vec![p1]).unwrap()).unwrap();
        assert!(cert.approximant().is_zero());
        cert.verify().unwrap();
    }

    #[test]
    fn members_approximate_by_split_monos() {
        let (_, s1, s2, p1) = a2();
        let s = AddCategory::of(vec![s1.clone(), p1.clone()]).unwrap();
        let m = direct_sum(s.quiver(), F2, &[p1.clone(), s1.clone()])
            .unwrap()
            .rep;
        let cert = left_approx_add(&m, &s).unwrap();
        assert!(retraction_of(&cert.approximation).unwrap().is_some());
        assert!(member_add(&s2, &s).unwrap().is_none());
    }

    #[test]
    fn right_approximations_are_covers() {
        let (q, s1, s2, p1) = a2();
        let p2 = projective(&q, F2, 1).unwrap();
        let s = AddCategory::of(vec![p1.clone(), p2.clone()]).unwrap();
        let c1 = right_approx_add(&s1, &s).unwrap();
        assert_eq!(c1.membership_multiplicities(), vec![1, 0]);
        assert!(c1.approximation.is_surjective());
        let c2 = right_approx_add(&s2, &s).unwrap();
        assert_eq!(c2.membership_multiplicities(), vec![0, 1]);
        assert!(c2.approximation.is_iso());
        assert_eq!(minimize_approx(&c2).unwrap(), c2);
    }

    #[test]
    fn minimize_drops_the_redundant_generator() {
        let (q, s1, _, p1) = a2();
        let p2 = projective(&q, F2, 1).unwrap();
        let both = direct_sum(&q, F2, &[p1.clone(), p2]).unwrap().rep;
        let s = AddCategory::of(vec![p1, both]).unwrap();
        let cert = right_approx_add(&s1, &s).unwrap();
        assert_eq!(cert.membership_multiplicities(), vec![1, 1]);
        let min = minimize_approx(&cert).unwrap();
        assert_eq!(min.membership_multiplicities(), vec![1, 0]);
        assert_eq!(minimize_approx(&min).unwrap(), min);
    }

    #[test]
    fn factor_through_basics() {
        let (_, _, s2, p1) = a2();
        let f = hom_basis(&s2, &p1).unwrap().remove(0);
        assert_eq!(
            factor_through(&f, &RepMorphism::identity(&s2)).unwrap(),
            Some(f.clone())
        );
        let zero = RepMorphism::zero(&s2, &s2).unwrap();
        assert!(factor_through(&f, &zero).unwrap().is_none());
    }

    #[test]
    fn gt_on_p1_gives_s1() {
        let (_, s1, s2, p1) = a2();
        let x = SubcatHandle::from(AddCategory::of(vec![s1.clone()]).unwrap());
        let y = SubcatHandle::from(AddCategory::of(vec![s2]).unwrap());
        let gt = gt_left_approx(&p1, &x, &y).unwrap();
        assert!(gt.y_approx.approximant().is_zero());
        assert!(iso_test(gt.certificate.approximant(), &s1)
            .unwrap()
            .is_some());
        gt.certificate.verify().unwrap();

        let mut forged = gt.certificate.clone();
        forged.approximation = RepMorphism::zero(&p1, forged.approximation.target()).unwrap();
        assert!(matches!(forged.verify(), Err(Error::CertificateInvalid(_))));
    }

    #[test]
    fn extension_test_objects_include_middle_terms() {
        let (_, s1, s2, p1) = a2();
        let h = SubcatHandle::ext(
            AddCategory::of(vec![s2]).unwrap().into(),
            AddCategory::of(vec![s1]).unwrap().into(),
        );
        let tests = test_objects(&h).unwrap();
        assert_eq!(tests.len(), 3);
        assert!(iso_test(&tests[2], &p1).unwrap().is_some());
    }

    #[test]
    fn gt_on_s2_gives_socle_inclusion() {
        let (q, s1, s2, p1) = a2();
        let x = SubcatHandle::from(AddCategory::of(vec![s1]).unwrap());
        let y = SubcatHandle::from(AddCategory::of(vec![p1.clone()]).unwrap());
        let gt = gt_left_approx(&s2, &x, &y).unwrap();
        assert!(gt.x_approx.approximant().is_zero());
        // dims(M ⊕ P) - dims(Y_M) = (0, 1) + (1, 2) - (1, 1)
        assert_eq!(gt.kernel.source().dims(), &[0, 2]);
        // P = P(1) ⊕ P(2) covers Y_M = P(1) through its basis at both vertices
        let p2 = projective(&q, F2, 1).unwrap();
        let cover = direct_sum(&q, F2, &[p1.clone(), p2]).unwrap().rep;
        assert_eq!(gt.cover.source(), &cover);
        let z = &gt.certificate.approximation;
        assert!(iso_test(z.target(), &p1).unwrap().is_some());
        assert!(z.is_injective());
        gt.certificate.verify().unwrap();
    }

    #[test]
    fn gt_refuses_cyclic_quivers() {
        let q = Quiver::one_loop();
        let s = Rep::simple(q, F2, 0);
        let h = SubcatHandle::from(AddCategory::of(vec![s.clone()]).unwrap());
        assert_eq!(
            gt_left_approx(&s, &h, &h).unwrap_err(),
            Error::NonAcyclicQuiver
        );
        let gt = gt_left_approx_subobject_closed(&s, &h, &h, &Budget::default()).unwrap();
        gt.certificate.verify().unwrap();
    }
}

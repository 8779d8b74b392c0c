use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::{cokernel, hom_basis, Rep, RepMorphism};

/// A short exact sequence `0 -> X -i-> Z -p-> Y -> 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortExactSeq {
    pub inclusion: RepMorphism,
    pub projection: RepMorphism,
}

impl ShortExactSeq {
    /// Checked constructor; fails unless the pair is exact.
    pub fn new(inclusion: RepMorphism, projection: RepMorphism) -> Result<ShortExactSeq> {
        let s = ShortExactSeq {
            inclusion,
            projection,
        };
        if !s.verify() {
            return Err(Error::CertificateInvalid(
                "pair of morphisms is not a short exact sequence".into(),
            ));
        }
        Ok(s)
    }

    pub(crate) fn new_unchecked(inclusion: RepMorphism, projection: RepMorphism) -> ShortExactSeq {
        ShortExactSeq {
            inclusion,
            projection,
        }
    }

    /// The split sequence `0 -> X -> X ⊕ Y -> Y -> 0`.
    pub fn split(x: &Rep, y: &Rep) -> Result<ShortExactSeq> {
        let sum = super::direct_sum(x.quiver(), x.field(), &[x.clone(), y.clone()])?;
        Ok(ShortExactSeq {
            inclusion: sum.injections[0].clone(),
            projection: sum.projections[1].clone(),
        })
    }

    pub fn rebase(&self, quiver: &std::sync::Arc<crate::quiver::Quiver>) -> Result<ShortExactSeq> {
        Ok(ShortExactSeq {
            inclusion: self.inclusion.rebase(quiver)?,
            projection: self.projection.rebase(quiver)?,
        })
    }

    pub fn left(&self) -> &Rep {
        self.inclusion.source()
    }

    pub fn middle(&self) -> &Rep {
        self.inclusion.target()
    }

    pub fn right(&self) -> &Rep {
        self.projection.target()
    }

    /// Naturality of both maps, `p ∘ i = 0`, injectivity of `i`, surjectivity
    /// of `p` and additivity of dimensions, checked at every vertex. Together
    /// these force `im i = ker p`.
    pub fn verify(&self) -> bool {
        let (i, p) = (&self.inclusion, &self.projection);
        if i.target() != p.source() || !i.is_natural() || !p.is_natural() {
            return false;
        }
        let dims_add = (0..self.middle().dims().len())
            .all(|v| self.middle().dim(v) == self.left().dim(v) + self.right().dim(v));
        dims_add
            && i.is_injective()
            && p.is_surjective()
            && p.after(i).map(|c| c.is_zero()).unwrap_or(false)
    }

    /// A section `σ` of the projection (`p ∘ σ = id_Y`), found by solving the
    /// linear system over `Hom(Y, Z)`, or `None` when the sequence does not
    /// split.
    pub fn is_split(&self) -> Result<Option<RepMorphism>> {
        let (y, z) = (self.right(), self.middle());
        let basis = hom_basis(y, z)?;
        let field = y.field();
        let id = RepMorphism::identity(y).flatten();
        let cols: Vec<Matrix> = basis
            .iter()
            .map(|b| self.projection.after(b).map(|c| c.flatten()))
            .collect::<Result<_>>()?;
        let refs: Vec<&Matrix> = cols.iter().collect();
        let system = Matrix::hstack(field, id.rows(), &refs)?;
        let Some(coeffs) = system.solve(&id)? else {
            return Ok(None);
        };
        let coeffs: Vec<_> = (0..coeffs.rows()).map(|r| coeffs.entry(r, 0)).collect();
        Ok(Some(RepMorphism::linear_combination(
            y, z, &coeffs, &basis,
        )?))
    }
}

/// A chain of subrepresentations `0 = M_0 ⊆ M_1 ⊆ ... ⊆ M_r`, stored as the
/// inclusions `M_{k-1} -> M_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    steps: Vec<RepMorphism>,
}

impl Filtration {
    pub fn new(steps: Vec<RepMorphism>) -> Result<Filtration> {
        let first = steps
            .first()
            .ok_or_else(|| Error::InvalidInput("a filtration needs at least one step".into()))?;
        if !first.source().is_zero() {
            return Err(Error::InvalidInput("a filtration starts at zero".into()));
        }
        for w in steps.windows(2) {
            if w[0].target() != w[1].source() {
                return Err(Error::NotComposable("filtration steps do not chain".into()));
            }
        }
        for s in &steps {
            if !s.is_natural() || !s.is_injective() {
                return Err(Error::InvalidInput(
                    "filtration steps must be injective morphisms".into(),
                ));
            }
        }
        Ok(Filtration { steps })
    }

    /// Builds the steps from nested subobjects `e_k: M_k -> M` for
    /// `k = 1..=r`; `M_0 = 0` is implicit.
    pub fn from_chain(top: &Rep, chain: &[RepMorphism]) -> Result<Filtration> {
        let zero = Rep::zero(top.quiver().clone(), top.field());
        let mut prev = RepMorphism::zero(&zero, top)?;
        let mut steps = Vec::with_capacity(chain.len());
        for e in chain {
            if e.target() != top {
                return Err(Error::NotComposable(
                    "chain member is not a subobject of the top".into(),
                ));
            }
            let comps = (0..top.dims().len())
                .map(|v| {
                    e.component(v)
                        .solve(prev.component(v))?
                        .ok_or_else(|| Error::InvalidInput("chain is not increasing".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            steps.push(RepMorphism::new(
                prev.source().clone(),
                e.source().clone(),
                comps,
            )?);
            prev = e.clone();
        }
        Filtration::new(steps)
    }

    pub fn steps(&self) -> &[RepMorphism] {
        &self.steps
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn top(&self) -> &Rep {
        self.steps.last().expect("nonempty").target()
    }

    /// `M_k` for `k = 0..=depth`.
    pub fn term(&self, k: usize) -> &Rep {
        if k == 0 {
            self.steps[0].source()
        } else {
            self.steps[k - 1].target()
        }
    }

    /// Factor `M_{k+1} / M_k` (zero-based `k`) with its projection from `M_{k+1}`.
    pub fn factor(&self, k: usize) -> (Rep, RepMorphism) {
        cokernel(&self.steps[k])
    }

    pub fn factors(&self) -> Vec<Rep> {
        (0..self.depth()).map(|k| self.factor(k).0).collect()
    }

    /// Inclusions `M_k -> M_r` for `k = 0..=depth`.
    pub fn inclusions_into_top(&self) -> Vec<RepMorphism> {
        let r = self.depth();
        let mut out = vec![RepMorphism::identity(self.top())];
        for k in (0..r).rev() {
            let next = out
                .last()
                .expect("nonempty")
                .after(&self.steps[k])
                .expect("chained");
            out.push(next);
        }
        out.reverse();
        out
    }
}

//! A category without enough projectives in which `add{S1} * add{M}` has no
//! left approximation of `S2`.
//!
//! The quiver has vertices `0` and `1`, loops `alpha1, ..., alphaN` at `0` and
//! one arrow `beta: 0 -> 1`. Loop indices are 1-based, matching the arrow
//! names. For a candidate `φ: S2 -> V` with `V` in the extension category,
//! the witness `W(i0)` (an extension of `M` by `S1` along a loop that `V`
//! does not use) receives a nonzero map from `S2`, while every composite
//! `S2 -> V -> W(i0)` vanishes.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::{AddCategory, AddMembership, Membership, SubcatHandle};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::matrix::Matrix;
use crate::quiver::Quiver;
use crate::rep::{
    ext1_basis, extension_from_cocycle, hom_basis, hom_dim, Cocycle, Rep, RepMorphism,
    ShortExactSeq,
};

pub const BETA: &str = "beta";

pub fn loop_id(i: usize) -> String {
    format!("alpha{i}")
}

/// The loop quiver truncated to `n_loops` loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopQuiverConfig {
    pub n_loops: usize,
    pub field: FieldSpec,
}

/// `S1`, `S2` and `M` for one truncation level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardReps {
    pub s1: Rep,
    pub s2: Rep,
    pub m: Rep,
}

impl LoopQuiverConfig {
    pub fn new(n_loops: usize, field: FieldSpec) -> Result<Self> {
        if n_loops == 0 {
            return Err(Error::InvalidInput("at least one loop is needed".into()));
        }
        Ok(LoopQuiverConfig { n_loops, field })
    }

    pub fn quiver(&self) -> Arc<Quiver> {
        let arrows =
            (1..=self.n_loops)
                .map(|i| (loop_id(i), 0, 0))
                .chain([(BETA.to_string(), 0, 1)]);
        Quiver::new(2, arrows).expect("valid quiver")
    }

    /// Recovers the configuration from a quiver of the expected shape.
    pub fn detect(quiver: &Quiver, field: FieldSpec) -> Result<Self> {
        let cfg = LoopQuiverConfig::new(quiver.arrows().len().saturating_sub(1), field)?;
        if *cfg.quiver() != *quiver {
            return Err(Error::InvalidInput(
                "quiver is not a truncated loop quiver with arrows alpha1.., beta".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn escalated(&self) -> Self {
        LoopQuiverConfig {
            n_loops: self.n_loops + 1,
            field: self.field,
        }
    }

    /// `Z = add{S1} * add{M}`.
    pub fn z_handle(&self) -> SubcatHandle {
        let StandardReps { s1, m, .. } = build_standard(self);
        let q = self.quiver();
        SubcatHandle::ext(
            AddCategory::new(&q, self.field, vec![s1])
                .expect("same quiver")
                .into(),
            AddCategory::new(&q, self.field, vec![m])
                .expect("same quiver")
                .into(),
        )
    }
}

pub fn build_standard(cfg: &LoopQuiverConfig) -> StandardReps {
    let q = cfg.quiver();
    let f = cfg.field;
    let s1 = Rep::simple(q.clone(), f, 0);
    let s2 = Rep::simple(q.clone(), f, 1);
    let mut maps: Vec<Matrix> = (0..cfg.n_loops).map(|_| Matrix::zeros(f, 1, 1)).collect();
    maps.push(Matrix::identity(f, 1));
    let m = Rep::new(q, f, vec![1, 1], maps).expect("shapes");
    StandardReps { s1, s2, m }
}

/// `W(i0)`: dimensions `(2, 1)`, `alpha_{i0} = [[0,0],[1,0]]`, other loops
/// zero, `beta = [1, 0]`.
pub fn build_w(cfg: &LoopQuiverConfig, i0: usize) -> Result<Rep> {
    if i0 == 0 || i0 > cfg.n_loops {
        return Err(Error::InvalidInput(format!(
            "loop index {i0} outside 1..={}",
            cfg.n_loops
        )));
    }
    let f = cfg.field;
    let mut maps: Vec<Matrix> = (1..=cfg.n_loops)
        .map(|i| {
            if i == i0 {
                Matrix::from_rows(f, &[&[0, 0], &[1, 0]])
            } else {
                Matrix::zeros(f, 2, 2)
            }
        })
        .collect();
    maps.push(Matrix::from_rows(f, &[&[1, 0]]));
    Rep::new(cfg.quiver(), f, vec![2, 1], maps)
}

/// `0 -> S1 -> W(i0) -> M -> 0`, with `S1` the second coordinate of `W_0`.
pub fn standard_ses(cfg: &LoopQuiverConfig, i0: usize) -> Result<ShortExactSeq> {
    let StandardReps { s1, m, .. } = build_standard(cfg);
    let w = build_w(cfg, i0)?;
    let f = cfg.field;
    let inc = RepMorphism::new(
        s1,
        w.clone(),
        vec![Matrix::from_rows(f, &[&[0], &[1]]), Matrix::zeros(f, 1, 0)],
    )?;
    let proj = RepMorphism::new(
        w,
        m,
        vec![Matrix::from_rows(f, &[&[1, 0]]), Matrix::identity(f, 1)],
    )?;
    ShortExactSeq::new(inc, proj)
}

/// Whether `beta` maps onto vertex `1`, for a representation certified to
/// lie in `Z`. Refuses without valid evidence.
pub fn beta_surjectivity_check(z: &Rep, cert: &Membership, cfg: &LoopQuiverConfig) -> Result<bool> {
    cert.verify(z, &cfg.z_handle())?;
    let beta = z
        .map_by_id(BETA)
        .ok_or_else(|| Error::InvalidInput("representation has no beta arrow".into()))?;
    Ok(beta.rank() == z.dim(1))
}

/// The smallest 1-based index of a loop acting by zero on `v`.
pub fn choose_i0(v: &Rep) -> Result<usize> {
    let q = v.quiver();
    let mut i = 1;
    while let Some(a) = q.arrow_index(&loop_id(i)) {
        if v.map(a).is_zero() {
            return Ok(i);
        }
        i += 1;
    }
    Err(Error::NoFreeLoop)
}

/// Proof that `candidate: S2 -> V` is not a left `Z`-approximation:
/// `unreachable: S2 -> W(i0)` is nonzero, but `h ∘ candidate = 0` for every
/// `h` in `hom_basis`, a basis of `Hom(V, W(i0))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefutationWitness {
    /// Truncation level at which the witness lives.
    pub config: LoopQuiverConfig,
    /// Whether the level had to be raised by one to find a free loop.
    pub escalated: bool,
    pub i0: usize,
    pub candidate: RepMorphism,
    /// Evidence that the target of the candidate lies in `Z`.
    pub membership: Membership,
    pub w: Rep,
    pub unreachable: RepMorphism,
    pub hom_basis: Vec<RepMorphism>,
}

impl RefutationWitness {
    pub fn verify(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::CertificateInvalid(m.into()));
        let std = build_standard(&self.config);
        if self.w != build_w(&self.config, self.i0)? {
            return bad("witness is not W(i0)");
        }
        let v = self.candidate.target();
        if self.candidate.source() != &std.s2 || !self.candidate.is_natural() {
            return bad("candidate is not a morphism out of S2");
        }
        self.membership.verify(v, &self.config.z_handle())?;
        if self.unreachable.source() != &std.s2
            || self.unreachable.target() != &self.w
            || !self.unreachable.is_natural()
            || self.unreachable.is_zero()
        {
            return bad("unreachable map must be a nonzero morphism S2 -> W");
        }
        if self.hom_basis.len() != hom_dim(v, &self.w)? {
            return bad("listed maps do not have the size of a basis of Hom(V, W)");
        }
        for h in &self.hom_basis {
            if h.source() != v || h.target() != &self.w || !h.is_natural() {
                return bad("listed map is not a morphism V -> W");
            }
            if !h.after(&self.candidate)?.is_zero() {
                return bad("a composite with the candidate is nonzero");
            }
        }
        if !self.hom_basis.is_empty() {
            let cols: Vec<Matrix> = self.hom_basis.iter().map(|h| h.flatten()).collect();
            let refs: Vec<&Matrix> = cols.iter().collect();
            let stacked = Matrix::hstack(v.field(), cols[0].rows(), &refs)?;
            if stacked.rank() != cols.len() {
                return bad("listed maps are linearly dependent");
            }
        }
        Ok(())
    }
}

/// Refutes `phi: S2 -> V` as a left `Z`-approximation, given evidence that
/// `V` lies in `Z`. When every loop of the truncation acts on `V`, the level
/// is raised by one (new loops act by zero) and the search repeated once.
pub fn refute(
    phi: &RepMorphism,
    cert: &Membership,
    cfg: &LoopQuiverConfig,
) -> Result<RefutationWitness> {
    let v = phi.target();
    cert.verify(v, &cfg.z_handle())?;
    if phi.source() != &build_standard(cfg).s2 || !phi.is_natural() {
        return Err(Error::CertificateInvalid(
            "candidate must be a morphism S2 -> V".into(),
        ));
    }
    let (cfg, phi, membership, escalated) = match choose_i0(v) {
        Ok(_) => (*cfg, phi.clone(), cert.clone(), false),
        Err(Error::NoFreeLoop) => {
            let up = cfg.escalated();
            let q = up.quiver();
            (up, phi.rebase(&q)?, cert.rebase(&q)?, true)
        }
        Err(e) => return Err(e),
    };
    let v = phi.target();
    let i0 = choose_i0(v)?;
    let w = build_w(&cfg, i0)?;
    let basis = hom_basis(v, &w)?;
    for h in &basis {
        if !h.after(&phi)?.is_zero() {
            return Err(Error::CertificateInvalid(
                "candidate reaches W(i0); no refutation exists".into(),
            ));
        }
    }
    let s2 = build_standard(&cfg).s2;
    let unreachable = hom_basis(&s2, &w)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::CertificateInvalid("Hom(S2, W) vanishes".into()))?;
    let witness = RefutationWitness {
        config: cfg,
        escalated,
        i0,
        candidate: phi,
        membership,
        w,
        unreachable,
        hom_basis: basis,
    };
    witness.verify()?;
    Ok(witness)
}

/// A member of `Z`: the middle term of a random extension of `M^b` by
/// `S1^a`, with its evidence. The same seed gives the same member.
pub fn random_member(
    cfg: &LoopQuiverConfig,
    a: usize,
    b: usize,
    seed: u64,
) -> Result<(Rep, Membership)> {
    let SubcatHandle::Ext(z) = cfg.z_handle() else {
        unreachable!("Z is an extension handle")
    };
    let (SubcatHandle::Add(x), SubcatHandle::Add(y)) = (&z.left, &z.right) else {
        unreachable!("both ends of Z are additive")
    };
    let sub = x.sum(&[a])?.rep;
    let quot = y.sum(&[b])?.rep;
    let basis = ext1_basis(&quot, &sub)?;
    let elements = cfg
        .field
        .elements()
        .ok_or(Error::RationalFieldUnsupported)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<Scalar> = basis
        .iter()
        .map(|_| elements[rng.gen_range(0..elements.len())].clone())
        .collect();
    let c = Cocycle::combine(&quot, &sub, &coeffs, &basis)?;
    let ses = extension_from_cocycle(&quot, &sub, &c)?;
    let evidence = |s: &Rep, n: usize| {
        Membership::Add(AddMembership::Sum {
            multiplicities: vec![n],
            iso: RepMorphism::identity(s),
        })
    };
    let v = ses.middle().clone();
    Ok((
        v,
        Membership::Ext {
            ses,
            sub: Box::new(evidence(&sub, a)),
            quotient: Box::new(evidence(&quot, b)),
        },
    ))
}

/// Every element of `Hom(S2, v)` over a prime field.
pub fn all_candidates(cfg: &LoopQuiverConfig, v: &Rep) -> Result<Vec<RepMorphism>> {
    let s2 = build_standard(cfg).s2;
    let basis = hom_basis(&s2, v)?;
    let elements = cfg
        .field
        .elements()
        .ok_or(Error::RationalFieldUnsupported)?;
    let mut out = Vec::new();
    let mut digits = vec![0usize; basis.len()];
    loop {
        let coeffs: Vec<Scalar> = digits.iter().map(|&d| elements[d].clone()).collect();
        out.push(RepMorphism::linear_combination(&s2, v, &coeffs, &basis)?);
        let mut k = 0;
        while k < digits.len() {
            digits[k] += 1;
            if digits[k] < elements.len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == digits.len() {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::member;
    use crate::rep::{cokernel, direct_sum, ext1_dim, iso_test, projective_epi, Budget};

    const F2: FieldSpec = FieldSpec::Prime(2);

    fn cfg(n: usize) -> LoopQuiverConfig {
        LoopQuiverConfig::new(n, F2).unwrap()
    }

    #[test]
    fn standard_shapes() {
        let c = cfg(3);
        let StandardReps { s1, s2, m } = build_standard(&c);
        assert_eq!(m.dims(), &[1, 1]);
        assert!((1..=3).all(|i| m.map_by_id(&loop_id(i)).unwrap().is_zero()));
        assert_eq!(s2.map_by_id(BETA).unwrap().shape(), (1, 0));
        assert_eq!(s1.dims(), &[1, 0]);
        assert!(!c.quiver().is_acyclic());
        assert_eq!(projective_epi(&m).unwrap_err(), Error::NonAcyclicQuiver);
    }

    #[test]
    fn w_is_a_nonsplit_extension() {
        let c = cfg(2);
        let ses = standard_ses(&c, 2).unwrap();
        assert!(ses.verify());
        assert!(ses.is_split().unwrap().is_none());
        let std = build_standard(&c);
        assert_eq!(hom_basis(&std.s2, ses.middle()).unwrap().len(), 1);
        let (q, _) = cokernel(&ses.inclusion);
        assert!(iso_test(&q, &std.m).unwrap().is_some());
        let sum = direct_sum(&c.quiver(), F2, &[std.s1.clone(), std.m.clone()]).unwrap();
        assert!(iso_test(ses.middle(), &sum.rep).unwrap().is_none());
        assert_eq!(ext1_dim(&std.m, &std.s1).unwrap(), 2);
    }

    #[test]
    fn random_members_are_certified_and_refuted() {
        let c = cfg(2);
        for seed in 0..6 {
            let (v, ev) = random_member(&c, 1, 2, seed).unwrap();
            assert_eq!(v.dims(), &[3, 2]);
            assert!(beta_surjectivity_check(&v, &ev, &c).unwrap());
            let cands = all_candidates(&c, &v).unwrap();
            assert_eq!(cands.len(), 4);
            for phi in cands {
                refute(&phi, &ev, &c).unwrap().verify().unwrap();
            }
        }
        assert_eq!(
            random_member(&c, 1, 2, 7).unwrap(),
            random_member(&c, 1, 2, 7).unwrap()
        );
    }

    #[test]
    fn loop_choice() {
        let c = cfg(2);
        assert_eq!(choose_i0(&build_standard(&c).m).unwrap(), 1);
        assert_eq!(choose_i0(&build_w(&c, 1).unwrap()).unwrap(), 2);
        let busy = Rep::from_i64(c.quiver(), F2, vec![1, 0], &[&[1], &[1], &[]]).unwrap();
        assert_eq!(choose_i0(&busy).unwrap_err(), Error::NoFreeLoop);
    }

    #[test]
    fn refutes_the_canonical_candidate() {
        let c = cfg(2);
        let std = build_standard(&c);
        let phi = hom_basis(&std.s2, &std.m).unwrap().remove(0);
        let cert = member(&std.m, &c.z_handle(), &Budget::default())
            .unwrap()
            .unwrap();
        assert!(beta_surjectivity_check(&std.m, &cert, &c).unwrap());
        let w = refute(&phi, &cert, &c).unwrap();
        assert_eq!(w.i0, 1);
        assert!(!w.escalated);
    }

    #[test]
    fn zero_candidate_into_zero() {
        let c = cfg(1);
        let std = build_standard(&c);
        let zero = Rep::zero(c.quiver(), F2);
        let phi = RepMorphism::zero(&std.s2, &zero).unwrap();
        let z = c.z_handle();
        let SubcatHandle::Ext(e) = &z else {
            unreachable!()
        };
        let SubcatHandle::Add(x) = &e.left else {
            unreachable!()
        };
        let SubcatHandle::Add(y) = &e.right else {
            unreachable!()
        };
        let ev = |s: &AddCategory| {
            Membership::Add(AddMembership::Sum {
                multiplicities: vec![0],
                iso: RepMorphism::identity(&s.sum(&[0]).unwrap().rep),
            })
        };
        let id = RepMorphism::identity(&zero);
        let cert = Membership::Ext {
            ses: ShortExactSeq::new(id.clone(), id).unwrap(),
            sub: Box::new(ev(x)),
            quotient: Box::new(ev(y)),
        };
        let w = refute(&phi, &cert, &c).unwrap();
        assert!(w.hom_basis.is_empty());
    }

    #[test]
    fn escalates_once_when_all_loops_act() {
        let c = cfg(1);
        let w1 = build_w(&c, 1).unwrap();
        let cert = Membership::Ext {
            ses: standard_ses(&c, 1).unwrap(),
            sub: Box::new(
                member(
                    &build_standard(&c).s1,
                    &{
                        let SubcatHandle::Ext(e) = c.z_handle() else {
                            unreachable!()
                        };
                        e.left
                    },
                    &Budget::default(),
                )
                .unwrap()
                .unwrap(),
            ),
            quotient: Box::new(
                member(
                    &build_standard(&c).m,
                    &{
                        let SubcatHandle::Ext(e) = c.z_handle() else {
                            unreachable!()
                        };
                        e.right
                    },
                    &Budget::default(),
                )
                .unwrap()
                .unwrap(),
            ),
        };
        let phi = hom_basis(&build_standard(&c).s2, &w1).unwrap().remove(0);
        let wit = refute(&phi, &cert, &c).unwrap();
        assert!(wit.escalated);
        assert_eq!((wit.config.n_loops, wit.i0), (2, 2));
        wit.verify().unwrap();
    }
}

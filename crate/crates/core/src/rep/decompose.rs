//! Krull–Schmidt decomposition over finite fields.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};

use super::{hom_basis, image, kernel, Rep, RepMorphism};

/// Largest endomorphism space enumerated when looking for a splitting.
pub const ENDOMORPHISM_BUDGET: u128 = 1 << 20;

/// An endomorphism that is neither nilpotent nor invertible, if one exists.
///
/// The representation is indecomposable iff its endomorphism ring is local,
/// i.e. iff every endomorphism is nilpotent or invertible, so `None` means
/// indecomposable. Basis elements are tried first; the full space is
/// enumerated only when they are all nilpotent or invertible.
fn splitting_endomorphism(rep: &Rep) -> Result<Option<RepMorphism>> {
    let FieldSpec::Prime(p) = rep.field() else {
        return Err(Error::RationalFieldUnsupported);
    };
    let basis = hom_basis(rep, rep)?;
    let d = rep.total_dim() as u32;
    let splits =
        |f: &RepMorphism| !f.is_iso() && f.components().iter().any(|c| !c.pow(d).is_zero());
    if let Some(f) = basis.iter().find(|f| splits(f)) {
        return Ok(Some(f.clone()));
    }
    let needed = (p as u128)
        .checked_pow(basis.len() as u32)
        .unwrap_or(u128::MAX);
    if needed > ENDOMORPHISM_BUDGET {
        return Err(Error::budget(
            "endomorphism space",
            needed,
            ENDOMORPHISM_BUDGET,
        ));
    }
    let mut digits = vec![0u32; basis.len()];
    loop {
        let mut k = 0;
        while k < digits.len() {
            digits[k] += 1;
            if digits[k] < p {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == digits.len() {
            return Ok(None);
        }
        let coeffs: Vec<Scalar> = digits.iter().map(|&c| Scalar::Modular(c)).collect();
        let f = RepMorphism::linear_combination(rep, rep, &coeffs, &basis)?;
        if splits(&f) {
            return Ok(Some(f));
        }
    }
}

/// Indecomposable direct summands of `rep`, each with a split inclusion into
/// `rep`, found by Fitting decompositions `rep = ker φ^d ⊕ im φ^d`.
pub fn indecomposable_summands(rep: &Rep) -> Result<Vec<(Rep, RepMorphism)>> {
    if rep.is_zero() {
        return Ok(Vec::new());
    }
    let Some(phi) = splitting_endomorphism(rep)? else {
        return Ok(vec![(rep.clone(), RepMorphism::identity(rep))]);
    };
    let d = rep.total_dim() as u32;
    let comps = phi.components().iter().map(|c| c.pow(d)).collect();
    let power = RepMorphism::from_parts(rep.clone(), rep.clone(), comps)?;
    let (_, ker_inc) = kernel(&power);
    let im = image(&power);
    let mut out = Vec::new();
    for inc in [ker_inc, im.inclusion] {
        for (s, j) in indecomposable_summands(inc.source())? {
            out.push((s, inc.after(&j)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Quiver;
    use crate::rep::{direct_sum, iso_test, projective};

    const F2: FieldSpec = FieldSpec::Prime(2);

    #[test]
    fn projective_is_indecomposable() {
        let q = Quiver::a2();
        let p1 = projective(&q, F2, 0).unwrap();
        let parts = indecomposable_summands(&p1).unwrap();
        assert_eq!(parts.len(), 1);
    }

    #[test]
    fn sum_splits_into_its_pieces() {
        let q = Quiver::a2();
        let p1 = projective(&q, F2, 0).unwrap();
        let s1 = Rep::simple(q.clone(), F2, 0);
        let s2 = Rep::simple(q.clone(), F2, 1);
        let sum = direct_sum(&q, F2, &[p1.clone(), s1.clone(), s2.clone()]).unwrap();
        let parts = indecomposable_summands(&sum.rep).unwrap();
        assert_eq!(parts.len(), 3);
        for want in [&p1, &s1, &s2] {
            assert!(parts
                .iter()
                .any(|(r, _)| iso_test(r, want).unwrap().is_some()));
        }
        let total: usize = parts.iter().map(|(r, _)| r.total_dim()).sum();
        assert_eq!(total, sum.rep.total_dim());
        assert!(parts
            .iter()
            .all(|(_, j)| j.is_injective() && j.is_natural()));
    }

    #[test]
    fn jordan_blocks() {
        let q = Quiver::one_loop();
        let j2 = Rep::from_i64(q.clone(), F2, vec![2], &[&[0, 1, 0, 0]]).unwrap();
        assert_eq!(indecomposable_summands(&j2).unwrap().len(), 1);
        let id2 = Rep::from_i64(q, F2, vec![2], &[&[1, 0, 0, 1]]).unwrap();
        assert_eq!(indecomposable_summands(&id2).unwrap().len(), 2);
    }
}

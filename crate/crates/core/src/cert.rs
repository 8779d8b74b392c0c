//! JSON documents for certificates, and re-verification from the serialized
//! form alone.
//!
//! Every document is an object `{"format": 1, "kind": ..., "quiver": ...,
//! "field": ..., ...}`. Representations inside a document are bodies
//! (`{"dims", "maps"}`) over the top-level quiver and field; morphisms whose
//! ends are determined by context carry only their `components`.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::approx::{
    AddCategory, AddMembership, ApproxCertificate, Membership, Side, SubcatHandle,
};
use crate::counterex::{LoopQuiverConfig, RefutationWitness};
use crate::error::{Error, Result};
use crate::extfilt::FiltrationCertificate;
use crate::field::FieldSpec;
use crate::quiver::Quiver;
use crate::rep::{Filtration, Rep, RepMorphism, ShortExactSeq};

pub const FORMAT: u64 = 1;

pub const KIND_APPROX: &str = "approximation";
pub const KIND_MEMBERSHIP: &str = "membership";
pub const KIND_FILTRATION: &str = "filtration";
pub const KIND_REFUTATION: &str = "refutation";
pub const KIND_REPORT: &str = "report";

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| invalid(format!("missing \"{key}\"")))
}

fn get_array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    get(v, key)?
        .as_array()
        .ok_or_else(|| invalid(format!("\"{key}\" must be an array")))
}

fn get_usize(v: &Value, key: &str) -> Result<usize> {
    get(v, key)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| invalid(format!("\"{key}\" must be a non-negative integer")))
}

fn usizes(v: &Value, key: &str) -> Result<Vec<usize>> {
    get_array(v, key)?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| invalid(format!("\"{key}\" must hold non-negative integers")))
        })
        .collect()
}

/// A document skeleton with the header filled in.
pub fn header(kind: &str, quiver: &Quiver, field: FieldSpec) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("format".into(), json!(FORMAT));
    m.insert("kind".into(), json!(kind));
    m.insert("quiver".into(), quiver.to_json());
    m.insert("field".into(), json!(field.to_string()));
    m
}

/// Checks the format version and returns the kind, quiver and field.
pub fn parse_header(v: &Value) -> Result<(String, Arc<Quiver>, FieldSpec)> {
    match v.get("format").and_then(Value::as_u64) {
        Some(FORMAT) => {}
        other => return Err(invalid(format!("unsupported format {other:?}"))),
    }
    let kind = get(v, "kind")?
        .as_str()
        .ok_or_else(|| invalid("\"kind\" must be a string"))?
        .to_string();
    let quiver = Quiver::from_json(get(v, "quiver")?)?;
    let field: FieldSpec = get(v, "field")?
        .as_str()
        .ok_or_else(|| invalid("\"field\" must be a string"))?
        .parse()?;
    Ok((kind, quiver, field))
}

pub fn handle_to_json(h: &SubcatHandle) -> Value {
    match h {
        SubcatHandle::Add(a) => {
            json!({ "add": a.generators().iter().map(Rep::to_json_body).collect::<Vec<_>>() })
        }
        SubcatHandle::Ext(e) => {
            json!({ "ext": [handle_to_json(&e.left), handle_to_json(&e.right)] })
        }
    }
}

pub fn handle_from_json(v: &Value, quiver: &Arc<Quiver>, field: FieldSpec) -> Result<SubcatHandle> {
    if let Some(gens) = v.get("add") {
        let gens = gens
            .as_array()
            .ok_or_else(|| invalid("\"add\" must be an array"))?
            .iter()
            .map(|g| Rep::from_json_body(g, quiver.clone(), field))
            .collect::<Result<Vec<_>>>()?;
        return Ok(AddCategory::new(quiver, field, gens)?.into());
    }
    if let Some(pair) = v.get("ext").and_then(Value::as_array) {
        if let [l, r] = pair.as_slice() {
            return Ok(SubcatHandle::ext(
                handle_from_json(l, quiver, field)?,
                handle_from_json(r, quiver, field)?,
            ));
        }
    }
    Err(invalid(
        "a handle is {\"add\": [...]} or {\"ext\": [handle, handle]}",
    ))
}

pub fn add_membership_to_json(a: &AddMembership) -> Value {
    match a {
        AddMembership::Sum {
            multiplicities,
            iso,
        } => json!({ "sum": {
            "multiplicities": multiplicities,
            "iso": iso.to_json_components(),
        }}),
        AddMembership::Summand {
            multiplicities,
            embedding,
            retraction,
        } => json!({ "summand": {
            "multiplicities": multiplicities,
            "embedding": embedding.to_json_components(),
            "retraction": retraction.to_json_components(),
        }}),
    }
}

/// Parses evidence that `object` lies in `add(s)`. Naturality of the maps is
/// checked; the remaining conditions are left to `verify`.
pub fn add_membership_from_json(v: &Value, object: &Rep, s: &AddCategory) -> Result<AddMembership> {
    if let Some(b) = v.get("sum") {
        let multiplicities = usizes(b, "multiplicities")?;
        let sum = s.sum(&multiplicities)?;
        let iso = RepMorphism::from_json_components(get(b, "iso")?, object, &sum.rep)?;
        return Ok(AddMembership::Sum {
            multiplicities,
            iso,
        });
    }
    if let Some(b) = v.get("summand") {
        let multiplicities = usizes(b, "multiplicities")?;
        let sum = s.sum(&multiplicities)?;
        let embedding = RepMorphism::from_json_components(get(b, "embedding")?, object, &sum.rep)?;
        let retraction =
            RepMorphism::from_json_components(get(b, "retraction")?, &sum.rep, object)?;
        return Ok(AddMembership::Summand {
            multiplicities,
            embedding,
            retraction,
        });
    }
    Err(invalid(
        "add(S) evidence is {\"sum\": ...} or {\"summand\": ...}",
    ))
}

pub fn membership_to_json(m: &Membership) -> Value {
    match m {
        Membership::Add(a) => add_membership_to_json(a),
        Membership::Ext { ses, sub, quotient } => json!({ "ext": {
            "sub": ses.left().to_json_body(),
            "quotient": ses.right().to_json_body(),
            "inclusion": ses.inclusion.to_json_components(),
            "projection": ses.projection.to_json_components(),
            "sub_evidence": membership_to_json(sub),
            "quotient_evidence": membership_to_json(quotient),
        }}),
    }
}

/// Parses evidence that `object` lies in `handle`, following the shape of the
/// handle.
pub fn membership_from_json(v: &Value, object: &Rep, handle: &SubcatHandle) -> Result<Membership> {
    match handle {
        SubcatHandle::Add(s) => Ok(Membership::Add(add_membership_from_json(v, object, s)?)),
        SubcatHandle::Ext(e) => {
            let b = get(v, "ext")?;
            let (q, f) = (object.quiver().clone(), object.field());
            let sub = Rep::from_json_body(get(b, "sub")?, q.clone(), f)?;
            let quotient = Rep::from_json_body(get(b, "quotient")?, q, f)?;
            let inclusion = RepMorphism::from_json_components(get(b, "inclusion")?, &sub, object)?;
            let projection =
                RepMorphism::from_json_components(get(b, "projection")?, object, &quotient)?;
            let sub_ev = membership_from_json(get(b, "sub_evidence")?, &sub, &e.left)?;
            let quot_ev = membership_from_json(get(b, "quotient_evidence")?, &quotient, &e.right)?;
            Ok(Membership::Ext {
                ses: ShortExactSeq::new_unchecked(inclusion, projection),
                sub: Box::new(sub_ev),
                quotient: Box::new(quot_ev),
            })
        }
    }
}

impl ApproxCertificate {
    pub fn to_document(&self) -> Value {
        let m = self.object();
        let mut d = header(KIND_APPROX, m.quiver(), m.field());
        d.insert("side".into(), json!(self.side.as_str()));
        d.insert("object".into(), m.to_json_body());
        d.insert("approximant".into(), self.approximant().to_json_body());
        d.insert(
            "approximation".into(),
            self.approximation.to_json_components(),
        );
        d.insert("handle".into(), handle_to_json(&self.handle));
        d.insert("membership".into(), membership_to_json(&self.membership));
        Value::Object(d)
    }

    pub fn from_document(v: &Value) -> Result<ApproxCertificate> {
        let (q, f) = expect_kind(v, KIND_APPROX)?;
        let side = match get(v, "side")?.as_str() {
            Some("left") => Side::Left,
            Some("right") => Side::Right,
            _ => return Err(invalid("\"side\" is \"left\" or \"right\"")),
        };
        let object = Rep::from_json_body(get(v, "object")?, q.clone(), f)?;
        let approximant = Rep::from_json_body(get(v, "approximant")?, q.clone(), f)?;
        let (src, tgt) = match side {
            Side::Left => (&object, &approximant),
            Side::Right => (&approximant, &object),
        };
        let approximation = RepMorphism::from_json_components(get(v, "approximation")?, src, tgt)?;
        let handle = handle_from_json(get(v, "handle")?, &q, f)?;
        let membership = membership_from_json(get(v, "membership")?, &approximant, &handle)?;
        Ok(ApproxCertificate {
            side,
            approximation,
            handle,
            membership,
        })
    }
}

/// A membership claim: `object` lies in `handle`, with evidence.
pub fn membership_document(object: &Rep, handle: &SubcatHandle, ev: &Membership) -> Value {
    let mut d = header(KIND_MEMBERSHIP, object.quiver(), object.field());
    d.insert("object".into(), object.to_json_body());
    d.insert("handle".into(), handle_to_json(handle));
    d.insert("membership".into(), membership_to_json(ev));
    Value::Object(d)
}

pub fn membership_from_document(v: &Value) -> Result<(Rep, SubcatHandle, Membership)> {
    let (q, f) = expect_kind(v, KIND_MEMBERSHIP)?;
    let object = Rep::from_json_body(get(v, "object")?, q.clone(), f)?;
    let handle = handle_from_json(get(v, "handle")?, &q, f)?;
    let ev = membership_from_json(get(v, "membership")?, &object, &handle)?;
    Ok((object, handle, ev))
}

impl FiltrationCertificate {
    pub fn to_document(&self) -> Value {
        let top = self.top();
        let mut d = header(KIND_FILTRATION, top.quiver(), top.field());
        d.insert(
            "generators".into(),
            json!(self
                .generators
                .generators()
                .iter()
                .map(Rep::to_json_body)
                .collect::<Vec<_>>()),
        );
        d.insert(
            "steps".into(),
            json!(self
                .filtration
                .steps()
                .iter()
                .map(RepMorphism::to_json_body)
                .collect::<Vec<_>>()),
        );
        d.insert(
            "factors".into(),
            json!(self
                .factors
                .iter()
                .map(add_membership_to_json)
                .collect::<Vec<_>>()),
        );
        Value::Object(d)
    }

    pub fn from_document(v: &Value) -> Result<FiltrationCertificate> {
        let (q, f) = expect_kind(v, KIND_FILTRATION)?;
        let gens = get_array(v, "generators")?
            .iter()
            .map(|g| Rep::from_json_body(g, q.clone(), f))
            .collect::<Result<Vec<_>>>()?;
        let generators = AddCategory::new(&q, f, gens)?;
        let steps = get_array(v, "steps")?
            .iter()
            .map(|s| RepMorphism::from_json_body(s, &q, f))
            .collect::<Result<Vec<_>>>()?;
        let filtration = Filtration::new(steps)?;
        let raw = get_array(v, "factors")?;
        if raw.len() != filtration.depth() {
            return Err(invalid("one piece of factor evidence is needed per step"));
        }
        let factors = raw
            .iter()
            .enumerate()
            .map(|(k, ev)| add_membership_from_json(ev, &filtration.factor(k).0, &generators))
            .collect::<Result<Vec<_>>>()?;
        Ok(FiltrationCertificate {
            filtration,
            generators,
            factors,
        })
    }
}

impl RefutationWitness {
    pub fn to_document(&self) -> Value {
        let q = self.config.quiver();
        let mut d = header(KIND_REFUTATION, &q, self.config.field);
        d.insert("n_loops".into(), json!(self.config.n_loops));
        d.insert("escalated".into(), json!(self.escalated));
        d.insert("i0".into(), json!(self.i0));
        d.insert("candidate".into(), self.candidate.to_json_body());
        d.insert("membership".into(), membership_to_json(&self.membership));
        d.insert("w".into(), self.w.to_json_body());
        d.insert(
            "nonzero_target_map".into(),
            self.unreachable.to_json_components(),
        );
        d.insert(
            "hom_basis".into(),
            json!(self
                .hom_basis
                .iter()
                .map(RepMorphism::to_json_components)
                .collect::<Vec<_>>()),
        );
        Value::Object(d)
    }

    pub fn from_document(v: &Value) -> Result<RefutationWitness> {
        let (q, f) = expect_kind(v, KIND_REFUTATION)?;
        let config = LoopQuiverConfig::new(get_usize(v, "n_loops")?, f)?;
        if *config.quiver() != *q {
            return Err(invalid("quiver does not match the stated number of loops"));
        }
        let escalated = get(v, "escalated")?
            .as_bool()
            .ok_or_else(|| invalid("\"escalated\" must be a boolean"))?;
        let candidate = RepMorphism::from_json_body(get(v, "candidate")?, &q, f)?;
        let membership = membership_from_json(
            get(v, "membership")?,
            candidate.target(),
            &config.z_handle(),
        )?;
        let w = Rep::from_json_body(get(v, "w")?, q, f)?;
        let unreachable = RepMorphism::from_json_components(
            get(v, "nonzero_target_map")?,
            candidate.source(),
            &w,
        )?;
        let hom_basis = get_array(v, "hom_basis")?
            .iter()
            .map(|h| RepMorphism::from_json_components(h, candidate.target(), &w))
            .collect::<Result<Vec<_>>>()?;
        Ok(RefutationWitness {
            config,
            escalated,
            i0: get_usize(v, "i0")?,
            candidate,
            membership,
            w,
            unreachable,
            hom_basis,
        })
    }
}

fn expect_kind(v: &Value, kind: &str) -> Result<(Arc<Quiver>, FieldSpec)> {
    let (k, q, f) = parse_header(v)?;
    if k != kind {
        return Err(invalid(format!("expected a {kind} document, found {k}")));
    }
    Ok((q, f))
}

/// A report wrapping certificates of any kind, under `"certificates"`.
pub fn report_document(
    name: &str,
    passed: bool,
    summary: Value,
    certificates: Vec<Value>,
) -> Value {
    json!({
        "format": FORMAT,
        "kind": KIND_REPORT,
        "name": name,
        "passed": passed,
        "summary": summary,
        "certificates": certificates,
    })
}

/// Parses and re-checks any certificate document. Returns a one-line
/// description of what was verified.
pub fn verify_document(v: &Value) -> Result<String> {
    let kind = get(v, "kind")?
        .as_str()
        .ok_or_else(|| invalid("\"kind\" must be a string"))?;
    match kind {
        KIND_APPROX => {
            let c = ApproxCertificate::from_document(v)?;
            c.verify()?;
            Ok(format!(
                "{} approximation {:?} -> {:?} verified",
                c.side.as_str(),
                c.object().dims(),
                c.approximant().dims()
            ))
        }
        KIND_MEMBERSHIP => {
            let (obj, handle, ev) = membership_from_document(v)?;
            ev.verify(&obj, &handle)?;
            Ok(format!("membership of {:?} verified", obj.dims()))
        }
        KIND_FILTRATION => {
            let c = FiltrationCertificate::from_document(v)?;
            c.verify()?;
            Ok(format!(
                "filtration of {:?} with {} factors verified",
                c.top().dims(),
                c.depth()
            ))
        }
        KIND_REFUTATION => {
            let w = RefutationWitness::from_document(v)?;
            w.verify()?;
            Ok(format!(
                "refutation at loop {} of {} verified",
                w.i0, w.config.n_loops
            ))
        }
        KIND_REPORT => {
            if v.get("format").and_then(Value::as_u64) != Some(FORMAT) {
                return Err(invalid("unsupported report format"));
            }
            let certs = get_array(v, "certificates")?;
            for c in certs {
                verify_document(c)?;
            }
            Ok(format!("report with {} certificates verified", certs.len()))
        }
        other => Err(invalid(format!("unknown document kind {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{gt_left_approx, left_approx_add, member, right_approx_add};
    use crate::counterex::{build_standard, refute};
    use crate::extfilt::member_filt;
    use crate::rep::{hom_basis, projective, Budget};

    const F2: FieldSpec = FieldSpec::Prime(2);

    fn a2() -> (Arc<Quiver>, Rep, Rep, Rep) {
        let q = Quiver::a2();
        let s1 = Rep::simple(q.clone(), F2, 0);
        let s2 = Rep::simple(q.clone(), F2, 1);
        let p1 = projective(&q, F2, 0).unwrap();
        (q, s1, s2, p1)
    }

    #[test]
    fn approximation_round_trip() {
        let (q, s1, s2, p1) = a2();
        let p2 = projective(&q, F2, 1).unwrap();
        let s = AddCategory::of(vec![p1.clone(), p2]).unwrap();
        for c in [
            right_approx_add(&s1, &s).unwrap(),
            left_approx_add(&p1, &s).unwrap(),
        ] {
            let doc = c.to_document();
            assert_eq!(ApproxCertificate::from_document(&doc).unwrap(), c);
            verify_document(&doc).unwrap();
        }
        let x = SubcatHandle::from(AddCategory::of(vec![s1]).unwrap());
        let y = SubcatHandle::from(AddCategory::of(vec![s2]).unwrap());
        let gt = gt_left_approx(&p1, &x, &y).unwrap().certificate;
        let doc = gt.to_document();
        assert_eq!(ApproxCertificate::from_document(&doc).unwrap(), gt);
        verify_document(&doc).unwrap();
    }

    #[test]
    fn tampering_is_detected() {
        let (_, s1, s2, p1) = a2();
        let x = SubcatHandle::from(AddCategory::of(vec![s1]).unwrap());
        let y = SubcatHandle::from(AddCategory::of(vec![s2]).unwrap());
        // P1 is an extension of S1 by its socle S2
        let z = SubcatHandle::ext(y, x);
        let ev = member(&p1, &z, &Budget::default()).unwrap().unwrap();
        let mut doc = membership_document(&p1, &z, &ev);
        verify_document(&doc).unwrap();
        doc["membership"]["ext"]["projection"] = json!([[[0]], [[0]]]);
        assert!(verify_document(&doc).is_err());
    }

    #[test]
    fn filtration_round_trip() {
        let q = Quiver::one_loop();
        let s1 = Rep::simple(q.clone(), F2, 0);
        let j2 = Rep::from_i64(q, F2, vec![2], &[&[0, 0, 1, 0]]).unwrap();
        let s = AddCategory::of(vec![s1]).unwrap();
        let c = member_filt(&j2, &s, 2, &Budget::default())
            .unwrap()
            .unwrap();
        let doc = c.to_document();
        assert_eq!(FiltrationCertificate::from_document(&doc).unwrap(), c);
        assert!(verify_document(&doc).unwrap().contains("2 factors"));
    }

    #[test]
    fn refutation_round_trip() {
        let cfg = LoopQuiverConfig::new(2, F2).unwrap();
        let std = build_standard(&cfg);
        let phi = hom_basis(&std.s2, &std.m).unwrap().remove(0);
        let ev = member(&std.m, &cfg.z_handle(), &Budget::default())
            .unwrap()
            .unwrap();
        let w = refute(&phi, &ev, &cfg).unwrap();
        let doc = w.to_document();
        assert_eq!(RefutationWitness::from_document(&doc).unwrap(), w);
        let report = report_document("t", true, json!({}), vec![doc.clone()]);
        assert!(verify_document(&report).unwrap().contains("1 certificates"));
        let mut bad = doc;
        bad["i0"] = json!(2);
        assert!(verify_document(&bad).is_err());
    }

    #[test]
    fn rejects_other_formats() {
        let (_, s1, _, _) = a2();
        let s = AddCategory::of(vec![s1.clone()]).unwrap();
        let mut doc = left_approx_add(&s1, &s).unwrap().to_document();
        doc["format"] = json!(2);
        assert!(matches!(verify_document(&doc), Err(Error::InvalidInput(_))));
    }
}

//! Workspace files: one quiver and field, named representations and named
//! subcategory handles.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use approxcat::approx::{AddCategory, SubcatHandle};
use approxcat::{Error, FieldSpec, Quiver, Rep, Result};
use serde_json::Value;

#[derive(Debug)]
pub struct Workspace {
    pub quiver: Arc<Quiver>,
    pub field: FieldSpec,
    reps: BTreeMap<String, Rep>,
    handles: BTreeMap<String, SubcatHandle>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

impl Workspace {
    pub fn load(paths: &[impl AsRef<Path>]) -> Result<Workspace> {
        let mut merged: Option<Workspace> = None;
        for p in paths {
            let p = p.as_ref();
            let text = std::fs::read_to_string(p)
                .map_err(|e| invalid(format!("cannot read {}: {e}", p.display())))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| invalid(format!("{} is not JSON: {e}", p.display())))?;
            let ws = Workspace::from_json(&v)?;
            merged = Some(match merged {
                None => ws,
                Some(acc) => acc.merge(ws)?,
            });
        }
        merged.ok_or_else(|| invalid("no workspace given"))
    }

    pub fn from_json(v: &Value) -> Result<Workspace> {
        if v.get("format").and_then(Value::as_u64) != Some(1) {
            return Err(invalid("workspace needs \"format\": 1"));
        }
        let quiver = Quiver::from_json(
            v.get("quiver")
                .ok_or_else(|| invalid("workspace without \"quiver\""))?,
        )?;
        let field: FieldSpec = v
            .get("field")
            .and_then(Value::as_str)
            .ok_or_else(|| invalid("workspace without \"field\""))?
            .parse()?;
        let mut reps = BTreeMap::new();
        if let Some(obj) = v.get("reps") {
            let obj = obj
                .as_object()
                .ok_or_else(|| invalid("\"reps\" must be an object"))?;
            for (name, body) in obj {
                let r = Rep::from_json_body(body, quiver.clone(), field)
                    .map_err(|e| invalid(format!("representation {name}: {e}")))?;
                reps.insert(name.clone(), r);
            }
        }
        let mut ws = Workspace {
            quiver,
            field,
            reps,
            handles: BTreeMap::new(),
        };
        if let Some(obj) = v.get("handles") {
            let obj = obj
                .as_object()
                .ok_or_else(|| invalid("\"handles\" must be an object"))?;
            // handles may refer to each other in any order
            let mut pending: Vec<(&String, &Value)> = obj.iter().collect();
            while !pending.is_empty() {
                let before = pending.len();
                let mut stuck = Vec::new();
                for (name, body) in pending {
                    match ws.parse_handle(body) {
                        Ok(h) => ws.insert_handle(name, h)?,
                        Err(_) if depends_on_pending(body, obj, &ws) => stuck.push((name, body)),
                        Err(e) => return Err(invalid(format!("handle {name}: {e}"))),
                    }
                }
                if stuck.len() == before {
                    return Err(invalid(format!(
                        "handles with circular references: {}",
                        stuck
                            .iter()
                            .map(|(n, _)| n.as_str())
                            .collect::<Vec<_>>()
                            .join(", ")
                    )));
                }
                pending = stuck;
            }
        }
        Ok(ws)
    }

    fn insert_handle(&mut self, name: &str, h: SubcatHandle) -> Result<()> {
        if self.reps.contains_key(name) || self.handles.contains_key(name) {
            return Err(invalid(format!("name {name} is defined twice")));
        }
        self.handles.insert(name.to_string(), h);
        Ok(())
    }

    fn merge(mut self, other: Workspace) -> Result<Workspace> {
        if *self.quiver != *other.quiver || self.field != other.field {
            return Err(invalid("workspaces disagree on quiver or field"));
        }
        for (name, r) in other.reps {
            if self.reps.contains_key(&name) || self.handles.contains_key(&name) {
                return Err(invalid(format!("name {name} is defined twice")));
            }
            // rebuild over the shared quiver allocation
            self.reps.insert(name, r.rebase(&self.quiver)?);
        }
        for (name, h) in other.handles {
            let h = h.rebase(&self.quiver)?;
            self.insert_handle(&name, h)?;
        }
        Ok(self)
    }

    /// `{"add": [rep names]}`, `{"ext": [handle, handle]}` where each part is
    /// a handle name or an inline handle.
    fn parse_handle(&self, v: &Value) -> Result<SubcatHandle> {
        if let Value::String(name) = v {
            return self.handle(name).cloned();
        }
        if let Some(names) = v.get("add") {
            let gens = names
                .as_array()
                .ok_or_else(|| invalid("\"add\" must list representation names"))?
                .iter()
                .map(|n| {
                    let n = n
                        .as_str()
                        .ok_or_else(|| invalid("\"add\" must list representation names"))?;
                    self.rep(n).cloned()
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(AddCategory::new(&self.quiver, self.field, gens)?.into());
        }
        if let Some([l, r]) = v.get("ext").and_then(Value::as_array).map(Vec::as_slice) {
            return Ok(SubcatHandle::ext(
                self.parse_handle(l)?,
                self.parse_handle(r)?,
            ));
        }
        Err(invalid("a handle is {\"add\": [...]} or {\"ext\": [h, h]}"))
    }

    pub fn rep(&self, name: &str) -> Result<&Rep> {
        self.reps
            .get(name)
            .ok_or_else(|| invalid(format!("no representation named {name}")))
    }

    pub fn handle(&self, name: &str) -> Result<&SubcatHandle> {
        self.handles
            .get(name)
            .ok_or_else(|| invalid(format!("no handle named {name}")))
    }

    pub fn add_handle(&self, name: &str) -> Result<&AddCategory> {
        match self.handle(name)? {
            SubcatHandle::Add(a) => Ok(a),
            SubcatHandle::Ext(_) => Err(invalid(format!("{name} is not an add(S) handle"))),
        }
    }
}

fn depends_on_pending(body: &Value, all: &serde_json::Map<String, Value>, ws: &Workspace) -> bool {
    match body {
        Value::String(n) => all.contains_key(n) && !ws.handles.contains_key(n),
        Value::Object(o) => o
            .get("ext")
            .and_then(Value::as_array)
            .is_some_and(|parts| parts.iter().any(|p| depends_on_pending(p, all, ws))),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn a2_doc() -> Value {
        json!({
            "format": 1,
            "quiver": {"vertices": 2, "arrows": [{"id": "b", "source": 0, "target": 1}]},
            "field": "F2",
            "reps": {
                "S1": {"dims": [1, 0]},
                "S2": {"dims": [0, 1]},
                "P1": {"dims": [1, 1], "maps": {"b": [[1]]}}
            },
            "handles": {
                "Z": {"ext": ["addS1", "addS2"]},
                "addS1": {"add": ["S1"]},
                "addS2": {"add": ["S2"]}
            }
        })
    }

    #[test]
    fn loads_handles_in_any_order() {
        let ws = Workspace::from_json(&a2_doc()).unwrap();
        assert!(matches!(ws.handle("Z").unwrap(), SubcatHandle::Ext(_)));
        assert_eq!(ws.rep("P1").unwrap().dims(), &[1, 1]);
        assert!(ws.add_handle("Z").is_err());
    }

    #[test]
    fn rejects_collisions_and_cycles() {
        let mut doc = a2_doc();
        doc["handles"]["S1"] = json!({"add": ["S2"]});
        assert!(Workspace::from_json(&doc).is_err());
        let mut doc = a2_doc();
        doc["handles"]["A"] = json!({"ext": ["B", "addS1"]});
        doc["handles"]["B"] = json!({"ext": ["A", "addS1"]});
        assert!(Workspace::from_json(&doc).is_err());
        let mut doc = a2_doc();
        doc["format"] = json!(2);
        assert!(Workspace::from_json(&doc).is_err());
    }
}

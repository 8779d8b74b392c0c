use std::collections::HashSet;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

/// A finite quiver. Vertices are `0..vertex_count`; loops and parallel arrows
/// are allowed. Acyclicity is computed once at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quiver {
    vertex_count: usize,
    arrows: Vec<Arrow>,
    acyclic: bool,
}

impl Quiver {
    pub fn new<S: Into<String>>(
        vertex_count: usize,
        arrows: impl IntoIterator<Item = (S, usize, usize)>,
    ) -> Result<Arc<Quiver>> {
        if vertex_count == 0 {
            return Err(Error::InvalidInput(
                "a quiver needs at least one vertex".into(),
            ));
        }
        let arrows: Vec<Arrow> = arrows
            .into_iter()
            .map(|(id, source, target)| Arrow {
                id: id.into(),
                source,
                target,
            })
            .collect();
        let mut seen = HashSet::new();
        for a in &arrows {
            if a.source >= vertex_count || a.target >= vertex_count {
                return Err(Error::InvalidInput(format!(
                    "arrow {} has an endpoint outside 0..{vertex_count}",
                    a.id
                )));
            }
            if !seen.insert(a.id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate arrow id {}", a.id)));
            }
        }
        let acyclic = is_acyclic(vertex_count, &arrows);
        Ok(Arc::new(Quiver {
            vertex_count,
            arrows,
            acyclic,
        }))
    }

    /// The quiver `0 -> 1` with a single arrow `a`.
    pub fn a2() -> Arc<Quiver> {
        Quiver::new(2, [("a", 0, 1)]).expect("valid quiver")
    }

    /// One vertex with one loop `alpha`.
    pub fn one_loop() -> Arc<Quiver> {
        Quiver::new(1, [("alpha", 0, 0)]).expect("valid quiver")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, index: usize) -> &Arrow {
        &self.arrows[index]
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.id == id)
    }

    pub fn is_acyclic(&self) -> bool {
        self.acyclic
    }

    /// All paths starting at `vertex`, as arrow-index sequences, ordered by
    /// length and then lexicographically by arrow index. The trivial path is
    /// the empty sequence.
    pub fn paths_from(&self, vertex: usize) -> Result<Vec<Vec<usize>>> {
        if !self.acyclic {
            return Err(Error::NonAcyclicQuiver);
        }
        let mut all = vec![Vec::new()];
        let mut frontier: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), vertex)];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (path, end) in &frontier {
                for (i, a) in self.arrows.iter().enumerate() {
                    if a.source == *end {
                        let mut p = path.clone();
                        p.push(i);
                        next.push((p, a.target));
                    }
                }
            }
            all.extend(next.iter().map(|(p, _)| p.clone()));
            frontier = next;
        }
        Ok(all)
    }

    /// Terminal vertex of a path starting at `start`.
    pub fn path_end(&self, start: usize, path: &[usize]) -> usize {
        path.last().map_or(start, |&a| self.arrows[a].target)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertex_count,
            "arrows": self.arrows.iter().map(|a| json!({
                "id": a.id,
                "source": a.source,
                "target": a.target,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Arc<Quiver>> {
        let bad = |m: &str| Error::InvalidInput(format!("quiver: {m}"));
        let n = v
            .get("vertices")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing integer field \"vertices\""))? as usize;
        let arrows = v
            .get("arrows")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing array field \"arrows\""))?;
        let mut parsed = Vec::with_capacity(arrows.len());
        for a in arrows {
            let id = a
                .get("id")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("arrow without string \"id\""))?;
            let s = a
                .get("source")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("arrow without integer \"source\""))?;
            let t = a
                .get("target")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("arrow without integer \"target\""))?;
            parsed.push((id.to_string(), s as usize, t as usize));
        }
        Quiver::new(n, parsed)
    }
}

fn is_acyclic(n: usize, arrows: &[Arrow]) -> bool {
    // Kahn's algorithm; a loop contributes to its own in-degree and never clears.
    let mut indeg = vec![0usize; n];
    for a in arrows {
        indeg[a.target] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = stack.pop() {
        removed += 1;
        for a in arrows.iter().filter(|a| a.source == v) {
            indeg[a.target] -= 1;
            if indeg[a.target] == 0 {
                stack.push(a.target);
            }
        }
    }
    removed == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acyclicity() {
        assert!(Quiver::a2().is_acyclic());
        assert!(!Quiver::one_loop().is_acyclic());
        let cyc = Quiver::new(2, [("a", 0, 1), ("b", 1, 0)]).unwrap();
        assert!(!cyc.is_acyclic());
        let kronecker = Quiver::new(2, [("a", 0, 1), ("b", 0, 1)]).unwrap();
        assert!(kronecker.is_acyclic());
    }

    #[test]
    fn rejects_bad_arrows() {
        assert!(Quiver::new(2, [("a", 0, 2)]).is_err());
        assert!(Quiver::new(2, [("a", 0, 1), ("a", 1, 0)]).is_err());
    }

    #[test]
    fn paths_on_a3() {
        let q = Quiver::new(3, [("a", 0, 1), ("b", 1, 2)]).unwrap();
        assert_eq!(q.paths_from(0).unwrap(), vec![vec![], vec![0], vec![0, 1]]);
        assert_eq!(q.paths_from(2).unwrap(), vec![Vec::<usize>::new()]);
        assert!(matches!(
            Quiver::one_loop().paths_from(0),
            Err(Error::NonAcyclicQuiver)
        ));
    }

    #[test]
    fn json_round_trip() {
        let q = Quiver::new(3, [("a", 0, 1), ("b", 1, 2), ("c", 2, 2)]).unwrap();
        assert_eq!(Quiver::from_json(&q.to_json()).unwrap(), q);
    }
}

//! Finite-dimensional quiver representations and their morphisms.

mod construct;
mod decompose;
mod hom;
mod ses;
mod subspace;

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::matrix::Matrix;
use crate::quiver::Quiver;

pub use construct::{
    cokernel, direct_sum, image, kernel, preimage, projective, projective_epi, pushout,
    pushout_factor, DirectSum, Image, Pushout,
};
pub use decompose::indecomposable_summands;
pub use hom::{
    euler_form, ext1_basis, ext1_dim, ext_class, extension_from_cocycle, hom_basis, hom_dim,
    iso_test, yoneda_dim_check, Cocycle,
};
pub use ses::{Filtration, ShortExactSeq};
pub use subspace::{all_reps, subreps, subspace_count, subspaces, Budget};

/// A representation: one vector space `k^dims[v]` per vertex and one matrix
/// of shape `dims[target] x dims[source]` per arrow.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rep {
    quiver: Arc<Quiver>,
    field: FieldSpec,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

impl Rep {
    pub fn new(
        quiver: Arc<Quiver>,
        field: FieldSpec,
        dims: Vec<usize>,
        maps: Vec<Matrix>,
    ) -> Result<Rep> {
        if dims.len() != quiver.vertex_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} dimensions for {} vertices",
                dims.len(),
                quiver.vertex_count()
            )));
        }
        if maps.len() != quiver.arrows().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} maps for {} arrows",
                maps.len(),
                quiver.arrows().len()
            )));
        }
        for (a, m) in quiver.arrows().iter().zip(&maps) {
            field.check_same(&m.field())?;
            if m.shape() != (dims[a.target], dims[a.source]) {
                return Err(Error::DimensionMismatch(format!(
                    "arrow {} needs a {}x{} matrix, got {}x{}",
                    a.id,
                    dims[a.target],
                    dims[a.source],
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Rep {
            quiver,
            field,
            dims,
            maps,
        })
    }

    /// Builds a representation from integer arrow matrices given row-major.
    pub fn from_i64(
        quiver: Arc<Quiver>,
        field: FieldSpec,
        dims: Vec<usize>,
        maps: &[&[i64]],
    ) -> Result<Rep> {
        let mats = quiver
            .arrows()
            .iter()
            .zip(maps)
            .map(|(a, data)| {
                let shape = (dims[a.target], dims[a.source]);
                if data.len() != shape.0 * shape.1 {
                    return Err(Error::DimensionMismatch(format!(
                        "arrow {} needs {} entries",
                        a.id,
                        shape.0 * shape.1
                    )));
                }
                Ok(Matrix::from_i64(field, shape.0, shape.1, data))
            })
            .collect::<Result<Vec<_>>>()?;
        Rep::new(quiver, field, dims, mats)
    }

    pub fn zero(quiver: Arc<Quiver>, field: FieldSpec) -> Rep {
        let dims = vec![0; quiver.vertex_count()];
        Rep::with_zero_maps(quiver, field, dims)
    }

    /// Representation with the given dimensions and all arrow maps zero.
    pub fn with_zero_maps(quiver: Arc<Quiver>, field: FieldSpec, dims: Vec<usize>) -> Rep {
        let maps = quiver
            .arrows()
            .iter()
            .map(|a| Matrix::zeros(field, dims[a.target], dims[a.source]))
            .collect();
        Rep {
            quiver,
            field,
            dims,
            maps,
        }
    }

    /// The simple representation at `vertex`.
    pub fn simple(quiver: Arc<Quiver>, field: FieldSpec, vertex: usize) -> Rep {
        let mut dims = vec![0; quiver.vertex_count()];
        dims[vertex] = 1;
        Rep::with_zero_maps(quiver, field, dims)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, vertex: usize) -> usize {
        self.dims[vertex]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn map(&self, arrow: usize) -> &Matrix {
        &self.maps[arrow]
    }

    pub fn map_by_id(&self, id: &str) -> Option<&Matrix> {
        self.quiver.arrow_index(id).map(|i| &self.maps[i])
    }

    /// Fails unless `other` lives over the same quiver and field.
    pub fn check_compatible(&self, other: &Rep) -> Result<()> {
        if !Arc::ptr_eq(&self.quiver, &other.quiver) && self.quiver != other.quiver {
            return Err(Error::QuiverMismatch);
        }
        self.field.check_same(&other.field)
    }

    /// The same representation over a quiver containing every arrow of this
    /// one (matched by id) and possibly more; new arrows act by zero.
    pub fn rebase(&self, quiver: &Arc<Quiver>) -> Result<Rep> {
        if quiver.vertex_count() != self.quiver.vertex_count() {
            return Err(Error::QuiverMismatch);
        }
        for a in self.quiver.arrows() {
            match quiver.arrow_index(&a.id).map(|i| quiver.arrow(i)) {
                Some(b) if b.source == a.source && b.target == a.target => {}
                _ => return Err(Error::QuiverMismatch),
            }
        }
        let maps = quiver
            .arrows()
            .iter()
            .map(|a| match self.map_by_id(&a.id) {
                Some(m) => m.clone(),
                None => Matrix::zeros(self.field, self.dims[a.target], self.dims[a.source]),
            })
            .collect();
        Rep::new(quiver.clone(), self.field, self.dims.clone(), maps)
    }

    /// JSON with the quiver and field inlined.
    pub fn to_json(&self) -> Value {
        let mut body = self.to_json_body();
        let obj = body.as_object_mut().expect("object");
        obj.insert("quiver".into(), self.quiver.to_json());
        obj.insert("field".into(), json!(self.field.to_string()));
        body
    }

    /// JSON with only `dims` and `maps`, for documents that state the quiver
    /// and field once at top level.
    pub fn to_json_body(&self) -> Value {
        let mut maps = Map::new();
        for (a, m) in self.quiver.arrows().iter().zip(&self.maps) {
            maps.insert(a.id.clone(), m.to_json());
        }
        json!({ "dims": self.dims, "maps": maps })
    }

    pub fn from_json(v: &Value) -> Result<Rep> {
        let quiver = Quiver::from_json(
            v.get("quiver")
                .ok_or_else(|| Error::InvalidInput("representation without \"quiver\"".into()))?,
        )?;
        let field: FieldSpec = v
            .get("field")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidInput("representation without \"field\"".into()))?
            .parse()?;
        Rep::from_json_body(v, quiver, field)
    }

    /// Parses `{"dims": [...], "maps": {id: matrix}}`. Arrows missing from
    /// `maps` get the zero matrix.
    pub fn from_json_body(v: &Value, quiver: Arc<Quiver>, field: FieldSpec) -> Result<Rep> {
        let dims: Vec<usize> = v
            .get("dims")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("representation without \"dims\" array".into()))?
            .iter()
            .map(|d| {
                d.as_u64()
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::InvalidInput(format!("bad dimension {d}")))
            })
            .collect::<Result<_>>()?;
        if dims.len() != quiver.vertex_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} dimensions for {} vertices",
                dims.len(),
                quiver.vertex_count()
            )));
        }
        let empty = Map::new();
        let maps_obj = match v.get("maps") {
            None => &empty,
            Some(m) => m
                .as_object()
                .ok_or_else(|| Error::InvalidInput("\"maps\" must be an object".into()))?,
        };
        for key in maps_obj.keys() {
            if quiver.arrow_index(key).is_none() {
                return Err(Error::InvalidInput(format!("map for unknown arrow {key}")));
            }
        }
        let maps = quiver
            .arrows()
            .iter()
            .map(|a| {
                let (r, c) = (dims[a.target], dims[a.source]);
                match maps_obj.get(&a.id) {
                    Some(m) => Matrix::from_json(m, field, r, c),
                    None => Ok(Matrix::zeros(field, r, c)),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Rep::new(quiver, field, dims, maps)
    }
}

impl fmt::Debug for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rep{:?}", self.dims)?;
        for (a, m) in self.quiver.arrows().iter().zip(&self.maps) {
            write!(f, " {}={}", a.id, m)?;
        }
        Ok(())
    }
}

/// A morphism of representations: one matrix per vertex, commuting with the
/// arrow maps.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RepMorphism {
    source: Rep,
    target: Rep,
    components: Vec<Matrix>,
}

impl RepMorphism {
    /// Checked constructor: shapes and naturality are verified.
    pub fn new(source: Rep, target: Rep, components: Vec<Matrix>) -> Result<RepMorphism> {
        let f = RepMorphism::from_parts(source, target, components)?;
        if !f.is_natural() {
            return Err(Error::InvalidInput(
                "components do not commute with the arrow maps".into(),
            ));
        }
        Ok(f)
    }

    /// Shape-checked constructor that skips the naturality check; for callers
    /// whose construction guarantees it.
    pub(crate) fn from_parts(
        source: Rep,
        target: Rep,
        components: Vec<Matrix>,
    ) -> Result<RepMorphism> {
        source.check_compatible(&target)?;
        if components.len() != source.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} components for {} vertices",
                components.len(),
                source.dims.len()
            )));
        }
        for (v, c) in components.iter().enumerate() {
            source.field.check_same(&c.field())?;
            if c.shape() != (target.dims[v], source.dims[v]) {
                return Err(Error::DimensionMismatch(format!(
                    "component at vertex {v} must be {}x{}, got {}x{}",
                    target.dims[v],
                    source.dims[v],
                    c.rows(),
                    c.cols()
                )));
            }
        }
        Ok(RepMorphism {
            source,
            target,
            components,
        })
    }

    pub fn identity(rep: &Rep) -> RepMorphism {
        let components = rep
            .dims
            .iter()
            .map(|&d| Matrix::identity(rep.field, d))
            .collect();
        RepMorphism {
            source: rep.clone(),
            target: rep.clone(),
            components,
        }
    }

    pub fn zero(source: &Rep, target: &Rep) -> Result<RepMorphism> {
        source.check_compatible(target)?;
        let components = (0..source.dims.len())
            .map(|v| Matrix::zeros(source.field, target.dims[v], source.dims[v]))
            .collect();
        Ok(RepMorphism {
            source: source.clone(),
            target: target.clone(),
            components,
        })
    }

    pub fn source(&self) -> &Rep {
        &self.source
    }

    pub fn target(&self) -> &Rep {
        &self.target
    }

    pub fn components(&self) -> &[Matrix] {
        &self.components
    }

    pub fn component(&self, vertex: usize) -> &Matrix {
        &self.components[vertex]
    }

    pub fn field(&self) -> FieldSpec {
        self.source.field
    }

    /// `f_t * source_a == target_a * f_s` for every arrow `a: s -> t`.
    pub fn is_natural(&self) -> bool {
        self.source
            .quiver
            .arrows()
            .iter()
            .enumerate()
            .all(|(i, a)| {
                &self.components[a.target] * &self.source.maps[i]
                    == &self.target.maps[i] * &self.components[a.source]
            })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Matrix::is_zero)
    }

    pub fn is_injective(&self) -> bool {
        self.components.iter().all(Matrix::is_injective)
    }

    pub fn is_surjective(&self) -> bool {
        self.components.iter().all(Matrix::is_surjective)
    }

    pub fn is_iso(&self) -> bool {
        self.components.iter().all(Matrix::is_invertible)
    }

    pub fn inverse(&self) -> Option<RepMorphism> {
        let comps = self
            .components
            .iter()
            .map(Matrix::inverse)
            .collect::<Option<Vec<_>>>()?;
        Some(RepMorphism {
            source: self.target.clone(),
            target: self.source.clone(),
            components: comps,
        })
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &RepMorphism) -> Result<RepMorphism> {
        if f.target != self.source {
            return Err(Error::NotComposable(format!(
                "target {:?} differs from source {:?}",
                f.target.dims, self.source.dims
            )));
        }
        let components = self
            .components
            .iter()
            .zip(&f.components)
            .map(|(g, f)| g * f)
            .collect();
        Ok(RepMorphism {
            source: f.source.clone(),
            target: self.target.clone(),
            components,
        })
    }

    fn same_ends(&self, other: &RepMorphism) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::NotComposable(
                "morphisms with different source or target".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &RepMorphism) -> Result<RepMorphism> {
        self.same_ends(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a + b)
            .collect();
        Ok(RepMorphism {
            components,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &RepMorphism) -> Result<RepMorphism> {
        self.same_ends(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a - b)
            .collect();
        Ok(RepMorphism {
            components,
            ..self.clone()
        })
    }

    pub fn scale(&self, s: &Scalar) -> RepMorphism {
        RepMorphism {
            components: self.components.iter().map(|c| c.scale(s)).collect(),
            ..self.clone()
        }
    }

    /// `sum_i coeffs[i] * basis[i]`; an empty basis needs explicit ends.
    pub fn linear_combination(
        source: &Rep,
        target: &Rep,
        coeffs: &[Scalar],
        basis: &[RepMorphism],
    ) -> Result<RepMorphism> {
        let mut acc = RepMorphism::zero(source, target)?;
        for (c, b) in coeffs.iter().zip(basis) {
            if !c.is_zero() {
                acc = acc.add(&b.scale(c))?;
            }
        }
        Ok(acc)
    }

    /// All components flattened row-major into one column vector.
    pub fn flatten(&self) -> Matrix {
        let scalars: Vec<Scalar> = self
            .components
            .iter()
            .flat_map(Matrix::to_scalars)
            .collect();
        Matrix::column(self.field(), &scalars)
    }

    /// Inverse of [`RepMorphism::flatten`], without a naturality check.
    pub(crate) fn unflatten(source: &Rep, target: &Rep, v: &[Scalar]) -> RepMorphism {
        let mut offset = 0;
        let components = (0..source.dims.len())
            .map(|i| {
                let (r, c) = (target.dims[i], source.dims[i]);
                let m = Matrix::from_scalars(source.field, r, c, &v[offset..offset + r * c]);
                offset += r * c;
                m
            })
            .collect();
        RepMorphism {
            source: source.clone(),
            target: target.clone(),
            components,
        }
    }

    /// Both ends moved to a larger quiver with [`Rep::rebase`].
    pub fn rebase(&self, quiver: &Arc<Quiver>) -> Result<RepMorphism> {
        RepMorphism::from_parts(
            self.source.rebase(quiver)?,
            self.target.rebase(quiver)?,
            self.components.clone(),
        )
    }

    pub fn to_json_components(&self) -> Value {
        Value::Array(self.components.iter().map(Matrix::to_json).collect())
    }

    /// `{"source": rep, "target": rep, "components": [...]}` with rep bodies.
    pub fn to_json_body(&self) -> Value {
        json!({
            "source": self.source.to_json_body(),
            "target": self.target.to_json_body(),
            "components": self.to_json_components(),
        })
    }

    /// Parses `{"components": [...]}` between known ends, checking
    /// naturality.
    pub fn from_json_components(v: &Value, source: &Rep, target: &Rep) -> Result<RepMorphism> {
        let comps =
            v.get("components").unwrap_or(v).as_array().ok_or_else(|| {
                Error::InvalidInput("morphism needs a \"components\" array".into())
            })?;
        if comps.len() != source.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} components for {} vertices",
                comps.len(),
                source.dims.len()
            )));
        }
        let components = comps
            .iter()
            .enumerate()
            .map(|(i, c)| Matrix::from_json(c, source.field, target.dims[i], source.dims[i]))
            .collect::<Result<Vec<_>>>()?;
        RepMorphism::new(source.clone(), target.clone(), components)
    }

    pub fn from_json_body(
        v: &Value,
        quiver: &Arc<Quiver>,
        field: FieldSpec,
    ) -> Result<RepMorphism> {
        let get = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::InvalidInput(format!("morphism without \"{k}\"")))
        };
        let source = Rep::from_json_body(get("source")?, quiver.clone(), field)?;
        let target = Rep::from_json_body(get("target")?, quiver.clone(), field)?;
        RepMorphism::from_json_components(v, &source, &target)
    }
}

impl fmt::Debug for RepMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RepMorphism{:?}->{:?} ",
            self.source.dims, self.target.dims
        )?;
        f.debug_list()
            .entries(self.components.iter().map(|c| c.to_string()))
            .finish()
    }
}

/// `g ∘ f`.
pub fn compose(g: &RepMorphism, f: &RepMorphism) -> Result<RepMorphism> {
    g.after(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    const F2: FieldSpec = FieldSpec::Prime(2);

    #[test]
    fn shape_checks() {
        let q = Quiver::a2();
        assert!(Rep::from_i64(q.clone(), F2, vec![1, 1], &[&[1]]).is_ok());
        assert!(Rep::from_i64(q.clone(), F2, vec![1, 2], &[&[1]]).is_err());
        assert!(Rep::new(q.clone(), F2, vec![1], vec![]).is_err());
    }

    #[test]
    fn naturality_is_enforced() {
        let q = Quiver::a2();
        let p1 = Rep::from_i64(q.clone(), F2, vec![1, 1], &[&[1]]).unwrap();
        let s2 = Rep::simple(q.clone(), F2, 1);
        // f_2 * 1 = 0 * f_1 forces f_2 = 0
        let bad = RepMorphism::new(
            p1.clone(),
            s2.clone(),
            vec![Matrix::zeros(F2, 0, 1), Matrix::identity(F2, 1)],
        );
        assert!(bad.is_err());
        let s1 = Rep::simple(q, F2, 0);
        let good = RepMorphism::new(
            p1,
            s1,
            vec![Matrix::identity(F2, 1), Matrix::zeros(F2, 0, 1)],
        );
        assert!(good.is_ok());
    }

    #[test]
    fn rep_json_round_trip() {
        let q = Quiver::a2();
        let r = Rep::from_i64(q, FieldSpec::Rationals, vec![2, 1], &[&[1, -3]]).unwrap();
        assert_eq!(Rep::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn composition_and_identity() {
        let q = Quiver::a2();
        let r = Rep::from_i64(q, F2, vec![2, 1], &[&[1, 1]]).unwrap();
        let id = RepMorphism::identity(&r);
        assert_eq!(id.after(&id).unwrap(), id);
        assert!(id.is_iso());
        assert_eq!(id.inverse().unwrap(), id);
    }
}

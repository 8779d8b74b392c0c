//! Kernels, cokernels, images, direct sums, pushouts and projectives.
//!
//! Induced arrow maps on kernels, cokernels and images are obtained by solving
//! the defining linear equation rather than by an explicit formula; the
//! equations are solvable by naturality of the input morphism.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::Matrix;
use crate::quiver::Quiver;

use super::{Rep, RepMorphism};

fn solved(x: Result<Option<Matrix>>, what: &str) -> Matrix {
    x.expect("well-shaped system")
        .unwrap_or_else(|| panic!("{what}: induced map must exist by naturality"))
}

/// Kernel of `f` with its inclusion into `f.source()`.
pub fn kernel(f: &RepMorphism) -> (Rep, RepMorphism) {
    let src = f.source();
    let field = src.field();
    let bases: Vec<Matrix> = f.components().iter().map(Matrix::kernel_basis).collect();
    let maps = src
        .quiver()
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let rhs = src.map(i) * &bases[a.source];
            solved(bases[a.target].solve(&rhs), "kernel")
        })
        .collect();
    let dims = bases.iter().map(Matrix::cols).collect();
    let k = Rep::new(src.quiver().clone(), field, dims, maps).expect("kernel shapes");
    let inc = RepMorphism::from_parts(k.clone(), src.clone(), bases).expect("kernel inclusion");
    (k, inc)
}

/// Cokernel of `f` with the projection from `f.target()`. The projection at
/// each vertex is the canonical basis of the left annihilator of the image.
pub fn cokernel(f: &RepMorphism) -> (Rep, RepMorphism) {
    let tgt = f.target();
    let field = tgt.field();
    let projections: Vec<Matrix> = f
        .components()
        .iter()
        .map(|c| c.image_basis().transpose().kernel_basis().transpose())
        .collect();
    let maps = tgt
        .quiver()
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let rhs = &projections[a.target] * tgt.map(i);
            solved(projections[a.source].solve_left(&rhs), "cokernel")
        })
        .collect();
    let dims = projections.iter().map(Matrix::rows).collect();
    let c = Rep::new(tgt.quiver().clone(), field, dims, maps).expect("cokernel shapes");
    let q = RepMorphism::from_parts(tgt.clone(), c.clone(), projections).expect("cokernel map");
    (c, q)
}

/// Image factorisation `f = inclusion ∘ projection`.
#[derive(Clone, Debug)]
pub struct Image {
    pub rep: Rep,
    pub inclusion: RepMorphism,
    pub projection: RepMorphism,
}

pub fn image(f: &RepMorphism) -> Image {
    let tgt = f.target();
    let bases: Vec<Matrix> = f.components().iter().map(Matrix::image_basis).collect();
    let maps = tgt
        .quiver()
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let rhs = tgt.map(i) * &bases[a.source];
            solved(bases[a.target].solve(&rhs), "image")
        })
        .collect();
    let dims = bases.iter().map(Matrix::cols).collect();
    let rep = Rep::new(tgt.quiver().clone(), tgt.field(), dims, maps).expect("image shapes");
    let proj = bases
        .iter()
        .zip(f.components())
        .map(|(b, c)| solved(b.solve(c), "image projection"))
        .collect();
    let projection =
        RepMorphism::from_parts(f.source().clone(), rep.clone(), proj).expect("image projection");
    let inclusion =
        RepMorphism::from_parts(rep.clone(), tgt.clone(), bases).expect("image inclusion");
    Image {
        rep,
        inclusion,
        projection,
    }
}

/// A direct sum with its canonical injections and projections.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub rep: Rep,
    pub injections: Vec<RepMorphism>,
    pub projections: Vec<RepMorphism>,
}

pub fn direct_sum(quiver: &Arc<Quiver>, field: FieldSpec, reps: &[Rep]) -> Result<DirectSum> {
    let zero = Rep::zero(quiver.clone(), field);
    for r in reps {
        zero.check_compatible(r)?;
    }
    let n = quiver.vertex_count();
    let dims: Vec<usize> = (0..n)
        .map(|v| reps.iter().map(|r| r.dim(v)).sum())
        .collect();
    let maps = (0..quiver.arrows().len())
        .map(|i| {
            let blocks: Vec<&Matrix> = reps.iter().map(|r| r.map(i)).collect();
            Matrix::block_diag(field, &blocks)
        })
        .collect::<Result<Vec<_>>>()?;
    let sum = Rep::new(quiver.clone(), field, dims.clone(), maps)?;
    let mut offsets = vec![0usize; n];
    let mut injections = Vec::with_capacity(reps.len());
    let mut projections = Vec::with_capacity(reps.len());
    for r in reps {
        let inj: Vec<Matrix> = (0..n)
            .map(|v| {
                Matrix::from_fn(field, dims[v], r.dim(v), |row, col| {
                    if row == offsets[v] + col {
                        field.one()
                    } else {
                        field.zero()
                    }
                })
            })
            .collect();
        let proj: Vec<Matrix> = inj.iter().map(Matrix::transpose).collect();
        injections.push(RepMorphism::from_parts(r.clone(), sum.clone(), inj)?);
        projections.push(RepMorphism::from_parts(sum.clone(), r.clone(), proj)?);
        #[allow(clippy::needless_range_loop)]
        for v in 0..n {
            offsets[v] += r.dim(v);
        }
    }
    Ok(DirectSum {
        rep: sum,
        injections,
        projections,
    })
}

/// The pushout of a span `A <-f- K -g-> B`, computed as the cokernel of
/// `(f, -g): K -> A ⊕ B`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub rep: Rep,
    /// `A -> Z`
    pub from_left: RepMorphism,
    /// `B -> Z`
    pub from_right: RepMorphism,
    pub sum: DirectSum,
    /// `A ⊕ B -> Z`
    pub projection: RepMorphism,
    left_leg: RepMorphism,
    right_leg: RepMorphism,
}

pub fn pushout(f: &RepMorphism, g: &RepMorphism) -> Result<Pushout> {
    if f.source() != g.source() {
        return Err(Error::NotComposable(
            "pushout legs must share their source".into(),
        ));
    }
    let a = f.target();
    let b = g.target();
    let sum = direct_sum(a.quiver(), a.field(), &[a.clone(), b.clone()])?;
    let d = sum.injections[0]
        .after(f)?
        .sub(&sum.injections[1].after(g)?)?;
    let (z, q) = cokernel(&d);
    let from_left = q.after(&sum.injections[0])?;
    let from_right = q.after(&sum.injections[1])?;
    Ok(Pushout {
        rep: z,
        from_left,
        from_right,
        sum,
        projection: q,
        left_leg: f.clone(),
        right_leg: g.clone(),
    })
}

/// The unique `h: Z -> T` with `h ∘ from_left = c_left` and
/// `h ∘ from_right = c_right`, or `None` when `(c_left, c_right)` is not a
/// cocone over the span.
pub fn pushout_factor(
    po: &Pushout,
    c_left: &RepMorphism,
    c_right: &RepMorphism,
) -> Result<Option<RepMorphism>> {
    if c_left.source() != po.left_leg.target() || c_right.source() != po.right_leg.target() {
        return Err(Error::NotComposable(
            "cocone legs do not match the span".into(),
        ));
    }
    if c_left.target() != c_right.target() {
        return Err(Error::NotComposable(
            "cocone legs have different targets".into(),
        ));
    }
    if c_left.after(&po.left_leg)? != c_right.after(&po.right_leg)? {
        return Ok(None);
    }
    let t = c_left.target();
    let mut comps = Vec::with_capacity(t.dims().len());
    for v in 0..t.dims().len() {
        let rhs = Matrix::hstack(
            t.field(),
            t.dim(v),
            &[c_left.component(v), c_right.component(v)],
        )?;
        match po.projection.component(v).solve_left(&rhs)? {
            Some(h) => comps.push(h),
            None => return Ok(None),
        }
    }
    let h = RepMorphism::from_parts(po.rep.clone(), t.clone(), comps)?;
    Ok(Some(h))
}

/// Preimage of the subrepresentation `sub ↪ Q` under `pi: M -> Q`, with its
/// inclusion into `M`.
pub fn preimage(pi: &RepMorphism, sub: &RepMorphism) -> Result<(Rep, RepMorphism)> {
    if pi.target() != sub.target() {
        return Err(Error::NotComposable(
            "subobject and map have different targets".into(),
        ));
    }
    let (_, q) = cokernel(sub);
    Ok(kernel(&q.after(pi)?))
}

/// The indecomposable projective at `vertex`: its basis at `v` is the set of
/// paths from `vertex` to `v`, and arrows act by extending paths.
pub fn projective(quiver: &Arc<Quiver>, field: FieldSpec, vertex: usize) -> Result<Rep> {
    let paths = quiver.paths_from(vertex)?;
    let n = quiver.vertex_count();
    let mut by_end: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); n];
    for p in &paths {
        by_end[quiver.path_end(vertex, p)].push(p);
    }
    let dims: Vec<usize> = by_end.iter().map(Vec::len).collect();
    let maps = quiver
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            Matrix::from_fn(field, dims[a.target], dims[a.source], |r, c| {
                let mut extended = by_end[a.source][c].clone();
                extended.push(i);
                if *by_end[a.target][r] == extended {
                    field.one()
                } else {
                    field.zero()
                }
            })
        })
        .collect();
    Rep::new(quiver.clone(), field, dims, maps)
}

/// A projective cover-style epimorphism `⊕_i P(i)^{dims[i]} -> m`, the copy
/// of `P(i)` for the basis vector `e_j` of `m_i` sending a path `p` to
/// `m_p(e_j)`.
pub fn projective_epi(m: &Rep) -> Result<(Rep, RepMorphism)> {
    let quiver = m.quiver();
    if !quiver.is_acyclic() {
        return Err(Error::NonAcyclicQuiver);
    }
    let field = m.field();
    let n = quiver.vertex_count();
    let mut summands = Vec::new();
    let mut blocks: Vec<Vec<Matrix>> = vec![Vec::new(); n];
    for i in 0..n {
        let p = projective(quiver, field, i)?;
        let paths = quiver.paths_from(i)?;
        for j in 0..m.dim(i) {
            let mut per_vertex: Vec<Vec<Matrix>> = vec![Vec::new(); n];
            for path in &paths {
                let mut image = Matrix::unit_column(field, m.dim(i), j);
                for &arrow in path {
                    image = m.map(arrow) * &image;
                }
                per_vertex[quiver.path_end(i, path)].push(image);
            }
            for v in 0..n {
                let cols: Vec<&Matrix> = per_vertex[v].iter().collect();
                blocks[v].push(Matrix::hstack(field, m.dim(v), &cols)?);
            }
            summands.push(p.clone());
        }
    }
    let sum = direct_sum(quiver, field, &summands)?;
    let comps = (0..n)
        .map(|v| {
            let refs: Vec<&Matrix> = blocks[v].iter().collect();
            Matrix::hstack(field, m.dim(v), &refs)
        })
        .collect::<Result<Vec<_>>>()?;
    let pi = RepMorphism::new(sum.rep.clone(), m.clone(), comps)?;
    Ok((sum.rep, pi))
}

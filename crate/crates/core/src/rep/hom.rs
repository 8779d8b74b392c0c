//! Hom and Ext¹ spaces, extensions from cocycles, and isomorphism testing.
//!
//! Path algebras without relations are hereditary, so for representations
//! `V`, `W` the two-term complex
//!
//! ```text
//! ⊕_v Hom(V_v, W_v)  --δ-->  ⊕_{a: s -> t} Hom(V_s, W_t),   δ(f)_a = f_t V_a - W_a f_s
//! ```
//!
//! computes `Hom(V, W) = ker δ` and `Ext¹(V, W) = coker δ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::matrix::Matrix;
use crate::quiver::Quiver;

use super::{construct::projective, Rep, RepMorphism, ShortExactSeq};

const ISO_RANDOM_TRIALS: usize = 16;
const ISO_SEED: u64 = 0x5eed_1507;
/// Largest grid searched by [`iso_test`] before giving up with a budget error.
pub const ISO_GRID_BUDGET: u128 = 1 << 20;

/// The matrix of `δ`, with Hom coordinates ordered vertex-major and cocycle
/// coordinates arrow-major, each block vectorised row-major.
fn coboundary_matrix(v: &Rep, w: &Rep) -> Result<Matrix> {
    v.check_compatible(w)?;
    let field = v.field();
    let quiver = v.quiver();
    let n = quiver.vertex_count();
    let col_sizes: Vec<usize> = (0..n).map(|x| w.dim(x) * v.dim(x)).collect();
    let row_sizes: Vec<usize> = quiver
        .arrows()
        .iter()
        .map(|a| w.dim(a.target) * v.dim(a.source))
        .collect();
    let mut blocks: Vec<Vec<Option<Matrix>>> = vec![vec![None; n]; row_sizes.len()];
    for (i, a) in quiver.arrows().iter().enumerate() {
        let left = Matrix::identity(field, w.dim(a.target)).kron(&v.map(i).transpose())?;
        let right = w.map(i).kron(&Matrix::identity(field, v.dim(a.source)))?;
        let mut add = |col: usize, m: Matrix| {
            blocks[i][col] = Some(match blocks[i][col].take() {
                Some(b) => &b + &m,
                None => m,
            });
        };
        add(a.target, left);
        add(a.source, -&right);
    }
    Matrix::from_blocks(field, &row_sizes, &col_sizes, &blocks)
}

/// A basis of `Hom(v, w)`: the canonical kernel basis of the naturality
/// system, in a deterministic order.
pub fn hom_basis(v: &Rep, w: &Rep) -> Result<Vec<RepMorphism>> {
    let d = coboundary_matrix(v, w)?;
    let k = d.kernel_basis();
    Ok((0..k.cols())
        .map(|j| {
            let col: Vec<Scalar> = (0..k.rows()).map(|r| k.entry(r, j)).collect();
            RepMorphism::unflatten(v, w, &col)
        })
        .collect())
}

pub fn hom_dim(v: &Rep, w: &Rep) -> Result<usize> {
    let d = coboundary_matrix(v, w)?;
    Ok(d.cols() - d.rank())
}

/// A family of matrices `g_a: V_s -> W_t`, one per arrow, representing a
/// class in `Ext¹(V, W)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cocycle {
    pub components: Vec<Matrix>,
}

impl Cocycle {
    pub fn zero(v: &Rep, w: &Rep) -> Cocycle {
        Cocycle {
            components: v
                .quiver()
                .arrows()
                .iter()
                .map(|a| Matrix::zeros(v.field(), w.dim(a.target), v.dim(a.source)))
                .collect(),
        }
    }

    fn flatten(&self) -> Vec<Scalar> {
        self.components
            .iter()
            .flat_map(Matrix::to_scalars)
            .collect()
    }

    fn unflatten(v: &Rep, w: &Rep, data: &[Scalar]) -> Cocycle {
        let mut off = 0;
        let components = v
            .quiver()
            .arrows()
            .iter()
            .map(|a| {
                let (r, c) = (w.dim(a.target), v.dim(a.source));
                let m = Matrix::from_scalars(v.field(), r, c, &data[off..off + r * c]);
                off += r * c;
                m
            })
            .collect();
        Cocycle { components }
    }

    fn check_shape(&self, v: &Rep, w: &Rep) -> Result<()> {
        let arrows = v.quiver().arrows();
        if self.components.len() != arrows.len() {
            return Err(Error::DimensionMismatch(format!(
                "cocycle has {} components for {} arrows",
                self.components.len(),
                arrows.len()
            )));
        }
        for (a, m) in arrows.iter().zip(&self.components) {
            v.field().check_same(&m.field())?;
            if m.shape() != (w.dim(a.target), v.dim(a.source)) {
                return Err(Error::DimensionMismatch(format!(
                    "cocycle component for {} must be {}x{}",
                    a.id,
                    w.dim(a.target),
                    v.dim(a.source)
                )));
            }
        }
        Ok(())
    }

    /// Linear combination of cocycles of one shape.
    pub fn combine(v: &Rep, w: &Rep, coeffs: &[Scalar], basis: &[Cocycle]) -> Result<Cocycle> {
        let mut out = Cocycle::zero(v, w);
        for (c, b) in coeffs.iter().zip(basis) {
            for (o, m) in out.components.iter_mut().zip(&b.components) {
                *o = o.try_add(&m.scale(c))?;
            }
        }
        Ok(out)
    }
}

/// Row-reduced coboundary space and the coordinates complementary to it.
struct ExtComplement {
    reduced: Matrix,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl ExtComplement {
    fn new(v: &Rep, w: &Rep) -> Result<ExtComplement> {
        let d = coboundary_matrix(v, w)?;
        let (reduced, pivots) = d.transpose().rref();
        let free = (0..d.rows()).filter(|c| !pivots.contains(c)).collect();
        Ok(ExtComplement {
            reduced,
            pivots,
            free,
        })
    }

    /// Coordinates of a cocycle in the unit-cocycle basis of the complement.
    fn coordinates(&self, field: FieldSpec, mut c: Vec<Scalar>) -> Result<Vec<Scalar>> {
        let n = c.len();
        for (k, &p) in self.pivots.iter().enumerate() {
            let coeff = c[p].clone();
            if coeff.is_zero() {
                continue;
            }
            let row = self.reduced.submatrix(k, k + 1, 0, n);
            let cur = Matrix::from_scalars(field, 1, n, &c);
            c = cur.try_sub(&row.scale(&coeff))?.to_scalars();
        }
        Ok(self.free.iter().map(|&j| c[j].clone()).collect())
    }
}

/// A basis of `Ext¹(v, w)`, as unit cocycles supported on the coordinates
/// complementary to the coboundaries.
pub fn ext1_basis(v: &Rep, w: &Rep) -> Result<Vec<Cocycle>> {
    let ec = ExtComplement::new(v, w)?;
    let n = ec.reduced.cols();
    let field = v.field();
    Ok(ec
        .free
        .iter()
        .map(|&j| {
            let mut data = vec![field.zero(); n];
            data[j] = field.one();
            Cocycle::unflatten(v, w, &data)
        })
        .collect())
}

pub fn ext1_dim(v: &Rep, w: &Rep) -> Result<usize> {
    let d = coboundary_matrix(v, w)?;
    Ok(d.rows() - d.rank())
}

/// The extension `0 -> w -> E -> v -> 0` with arrow matrices
/// `[[w_a, c_a], [0, v_a]]`.
pub fn extension_from_cocycle(v: &Rep, w: &Rep, c: &Cocycle) -> Result<ShortExactSeq> {
    v.check_compatible(w)?;
    c.check_shape(v, w)?;
    let field = v.field();
    let quiver = v.quiver();
    let n = quiver.vertex_count();
    let dims: Vec<usize> = (0..n).map(|x| w.dim(x) + v.dim(x)).collect();
    let maps = quiver
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            Matrix::from_blocks(
                field,
                &[w.dim(a.target), v.dim(a.target)],
                &[w.dim(a.source), v.dim(a.source)],
                &[
                    vec![Some(w.map(i).clone()), Some(c.components[i].clone())],
                    vec![None, Some(v.map(i).clone())],
                ],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let e = Rep::new(quiver.clone(), field, dims, maps)?;
    let inc = (0..n)
        .map(|x| {
            Matrix::from_blocks(
                field,
                &[w.dim(x), v.dim(x)],
                &[w.dim(x)],
                &[vec![Some(Matrix::identity(field, w.dim(x)))], vec![None]],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let proj = (0..n)
        .map(|x| {
            Matrix::from_blocks(
                field,
                &[v.dim(x)],
                &[w.dim(x), v.dim(x)],
                &[vec![None, Some(Matrix::identity(field, v.dim(x)))]],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let i = RepMorphism::new(w.clone(), e.clone(), inc)?;
    let p = RepMorphism::new(e, v.clone(), proj)?;
    Ok(ShortExactSeq::new_unchecked(i, p))
}

/// Coordinates of the class of `0 -> X -> Z -> Y -> 0` with respect to
/// [`ext1_basis`]`(Y, X)`.
pub fn ext_class(ses: &ShortExactSeq) -> Result<Vec<Scalar>> {
    if !ses.verify() {
        return Err(Error::CertificateInvalid("sequence is not exact".into()));
    }
    let (i, p) = (&ses.inclusion, &ses.projection);
    let (x, z, y) = (i.source(), i.target(), p.target());
    let field = z.field();
    let sections: Vec<Matrix> = (0..z.dims().len())
        .map(|v| {
            p.component(v)
                .solve(&Matrix::identity(field, y.dim(v)))
                .map(|s| s.expect("surjective component"))
        })
        .collect::<Result<_>>()?;
    let mut comps = Vec::new();
    for (k, a) in z.quiver().arrows().iter().enumerate() {
        let d = &(z.map(k) * &sections[a.source]) - &(&sections[a.target] * y.map(k));
        let c = i
            .component(a.target)
            .solve(&d)?
            .ok_or_else(|| Error::CertificateInvalid("cocycle outside the kernel".into()))?;
        comps.push(c);
    }
    let cocycle = Cocycle { components: comps };
    ExtComplement::new(y, x)?.coordinates(field, cocycle.flatten())
}

/// `Σ_v dim V_v dim W_v − Σ_{a: s -> t} dim V_s dim W_t`, which equals
/// `dim Hom(V, W) − dim Ext¹(V, W)` for path algebras.
pub fn euler_form(v: &Rep, w: &Rep) -> i64 {
    let verts: i64 = (0..v.dims().len())
        .map(|x| (v.dim(x) * w.dim(x)) as i64)
        .sum();
    let arrows: i64 = v
        .quiver()
        .arrows()
        .iter()
        .map(|a| (v.dim(a.source) * w.dim(a.target)) as i64)
        .sum();
    verts - arrows
}

/// `dim Hom(P(i), m) == dim m_i`.
pub fn yoneda_dim_check(quiver: &std::sync::Arc<Quiver>, vertex: usize, m: &Rep) -> Result<bool> {
    let p = projective(quiver, m.field(), vertex)?;
    Ok(hom_dim(&p, m)? == m.dim(vertex))
}

/// Searches `Hom(v, w)` for an isomorphism.
///
/// Cheap invariants (ranks of arrow maps, Hom dimensions against the simples
/// and between `v` and `w`) reject most non-isomorphic pairs. Surviving pairs
/// get a few seeded random combinations of the Hom basis, then a complete
/// search: with `D` the total dimension, the polynomial
/// `c ↦ Π_v det(Σ_j c_j f_j,v)` has degree at most `D` in each variable, so
/// it is nonzero iff it is nonzero somewhere on `S^d` for any `|S| > D`
/// (or on all of `F_p^d`). `None` is returned only after that search.
pub fn iso_test(v: &Rep, w: &Rep) -> Result<Option<RepMorphism>> {
    v.check_compatible(w)?;
    if v.dims() != w.dims() {
        return Ok(None);
    }
    if v == w {
        return Ok(Some(RepMorphism::identity(v)));
    }
    if v.maps()
        .iter()
        .zip(w.maps())
        .any(|(a, b)| a.rank() != b.rank())
    {
        return Ok(None);
    }
    let quiver = v.quiver();
    let field = v.field();
    for x in 0..quiver.vertex_count() {
        let s = Rep::simple(quiver.clone(), field, x);
        if hom_dim(&s, v)? != hom_dim(&s, w)? || hom_dim(v, &s)? != hom_dim(w, &s)? {
            return Ok(None);
        }
    }
    let basis = hom_basis(v, w)?;
    let d = basis.len();
    if hom_dim(v, v)? != d || hom_dim(w, w)? != d || hom_dim(w, v)? != d {
        return Ok(None);
    }
    let try_coeffs = |coeffs: &[Scalar]| -> Result<Option<RepMorphism>> {
        let f = RepMorphism::linear_combination(v, w, coeffs, &basis)?;
        Ok(f.is_iso().then_some(f))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(ISO_SEED);
    for _ in 0..ISO_RANDOM_TRIALS {
        let coeffs: Vec<Scalar> = (0..d)
            .map(|_| match field {
                FieldSpec::Prime(p) => Scalar::Modular(rng.gen_range(0..p)),
                FieldSpec::Rationals => field.from_i64(rng.gen_range(-9..=9)),
            })
            .collect();
        if let Some(f) = try_coeffs(&coeffs)? {
            return Ok(Some(f));
        }
    }

    let degree = v.total_dim();
    let grid: Vec<Scalar> = match field {
        FieldSpec::Prime(p) if (p as usize) <= degree + 1 => field.elements().expect("finite"),
        _ => (0..=degree as i64).map(|k| field.from_i64(k)).collect(),
    };
    let needed = (grid.len() as u128)
        .checked_pow(d as u32)
        .unwrap_or(u128::MAX);
    if needed > ISO_GRID_BUDGET {
        return Err(Error::budget(
            "isomorphism search grid",
            needed,
            ISO_GRID_BUDGET,
        ));
    }
    let mut idx = vec![0usize; d];
    loop {
        // odometer increment; the all-zero point is skipped
        let mut k = 0;
        while k < d {
            idx[k] += 1;
            if idx[k] < grid.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            return Ok(None);
        }
        let coeffs: Vec<Scalar> = idx.iter().map(|&i| grid[i].clone()).collect();
        if let Some(f) = try_coeffs(&coeffs)? {
            return Ok(Some(f));
        }
    }
}

//! Exhaustive enumeration of subspaces and subrepresentations over prime fields.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::matrix::Matrix;

use super::{Rep, RepMorphism};

/// Limits on exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Upper bound on the number of vertexwise subspace tuples examined.
    pub max_subspaces: u128,
    /// Upper bound on the total dimension of a searched representation.
    pub max_total_dim: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_subspaces: 1_000_000,
            max_total_dim: 8,
        }
    }
}

impl Budget {
    pub const MAX_SUBSPACES_VAR: &'static str = "APPROXCAT_MAX_SUBSPACES";
    pub const MAX_TOTAL_DIM_VAR: &'static str = "APPROXCAT_MAX_TOTAL_DIM";

    /// Defaults, overridden by the environment variables named above when
    /// they hold valid integers.
    pub fn from_env() -> Budget {
        let mut b = Budget::default();
        if let Some(v) = std::env::var(Self::MAX_SUBSPACES_VAR)
            .ok()
            .and_then(|s| s.parse().ok())
        {
            b.max_subspaces = v;
        }
        if let Some(v) = std::env::var(Self::MAX_TOTAL_DIM_VAR)
            .ok()
            .and_then(|s| s.parse().ok())
        {
            b.max_total_dim = v;
        }
        b
    }

    pub(crate) fn check_dim(&self, rep: &Rep) -> Result<()> {
        let d = rep.total_dim();
        if d > self.max_total_dim {
            return Err(Error::budget(
                "total dimension",
                d as u128,
                self.max_total_dim as u128,
            ));
        }
        Ok(())
    }
}

/// Number of subspaces of `F_p^n` (the sum of Gaussian binomials),
/// saturating at `u128::MAX`.
pub fn subspace_count(p: u32, n: usize) -> u128 {
    // Galois numbers satisfy G(n+1) = 2 G(n) + (p^n - 1) G(n-1).
    let p = p as u128;
    let (mut prev, mut cur) = (1u128, 2u128);
    if n == 0 {
        return 1;
    }
    let mut pk = p;
    for _ in 1..n {
        let next = cur
            .saturating_mul(2)
            .saturating_add(pk.saturating_sub(1).saturating_mul(prev));
        prev = cur;
        cur = next;
        pk = pk.saturating_mul(p);
    }
    cur
}

type Cache = Mutex<HashMap<(u32, usize), Arc<Vec<Matrix>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Every subspace of `F_p^n`, each as an `n x k` matrix whose columns are the
/// rows of its reduced echelon basis. Ordered by dimension, then by pivot
/// set, then by the free entries.
pub fn subspaces(field: FieldSpec, n: usize) -> Result<Arc<Vec<Matrix>>> {
    let FieldSpec::Prime(p) = field else {
        return Err(Error::RationalFieldUnsupported);
    };
    if let Some(hit) = cache().lock().expect("cache lock").get(&(p, n)) {
        return Ok(hit.clone());
    }
    let count = subspace_count(p, n);
    if count > 1 << 24 {
        return Err(Error::budget(
            "subspaces of one vertex space",
            count,
            1 << 24,
        ));
    }
    let mut out = Vec::with_capacity(count as usize);
    for k in 0..=n {
        for pivots in combinations(n, k) {
            // free slots: (row, col) with col > pivot[row] and col not a pivot
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|r| {
                    let pv = &pivots;
                    ((pv[r] + 1)..n)
                        .filter(move |c| !pv.contains(c))
                        .map(move |c| (r, c))
                })
                .collect();
            let mut digits = vec![0u32; free.len()];
            loop {
                let mut m = vec![0u32; k * n];
                for (r, &c) in pivots.iter().enumerate() {
                    m[r * n + c] = 1;
                }
                for (d, &(r, c)) in digits.iter().zip(&free) {
                    m[r * n + c] = *d;
                }
                let scalars: Vec<Scalar> = m.into_iter().map(Scalar::Modular).collect();
                out.push(Matrix::from_scalars(field, k, n, &scalars).transpose());
                if !odometer(&mut digits, p) {
                    break;
                }
            }
        }
    }
    let out = Arc::new(out);
    cache()
        .lock()
        .expect("cache lock")
        .insert((p, n), out.clone());
    Ok(out)
}

fn odometer(digits: &mut [u32], base: u32) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every subrepresentation of `rep`, as inclusions, sorted by total
/// dimension and otherwise in canonical subspace order.
pub fn subreps(rep: &Rep, budget: &Budget) -> Result<Vec<RepMorphism>> {
    let FieldSpec::Prime(p) = rep.field() else {
        return Err(Error::RationalFieldUnsupported);
    };
    budget.check_dim(rep)?;
    let n = rep.dims().len();
    let needed = rep
        .dims()
        .iter()
        .fold(1u128, |acc, &d| acc.saturating_mul(subspace_count(p, d)));
    if needed > budget.max_subspaces {
        return Err(Error::budget(
            "subspace tuples",
            needed,
            budget.max_subspaces,
        ));
    }
    let per_vertex: Vec<Arc<Vec<Matrix>>> = rep
        .dims()
        .iter()
        .map(|&d| subspaces(rep.field(), d))
        .collect::<Result<_>>()?;
    let quiver = rep.quiver();
    // arrows checked once both endpoints are chosen
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, a) in quiver.arrows().iter().enumerate() {
        closing[a.source.max(a.target)].push(i);
    }

    let mut found = Vec::new();
    let mut choice: Vec<&Matrix> = Vec::with_capacity(n);
    search(rep, &per_vertex, &closing, &mut choice, &mut found);
    let mut out: Vec<RepMorphism> = found
        .into_iter()
        .map(|bases| {
            let maps = quiver
                .arrows()
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let rhs = rep.map(i) * &bases[a.source];
                    bases[a.target]
                        .solve(&rhs)
                        .expect("shapes")
                        .expect("arrow-stable subspace")
                })
                .collect();
            let dims = bases.iter().map(Matrix::cols).collect();
            let sub = Rep::new(quiver.clone(), rep.field(), dims, maps).expect("sub shapes");
            RepMorphism::from_parts(sub, rep.clone(), bases).expect("inclusion shapes")
        })
        .collect();
    out.sort_by_key(|f| f.source().total_dim());
    Ok(out)
}

/// Every representation over a prime field whose dimension vector is
/// bounded by `bound`, ordered by dimension vector and then by the entries
/// of the arrow maps.
pub fn all_reps(
    quiver: &Arc<crate::quiver::Quiver>,
    field: FieldSpec,
    bound: &[usize],
    budget: &Budget,
) -> Result<Vec<Rep>> {
    let FieldSpec::Prime(p) = field else {
        return Err(Error::RationalFieldUnsupported);
    };
    if bound.len() != quiver.vertex_count() {
        return Err(Error::DimensionMismatch(
            "bound needs one entry per vertex".into(),
        ));
    }
    let mut dim_vectors = vec![Vec::new()];
    for &b in bound {
        dim_vectors = dim_vectors
            .into_iter()
            .flat_map(|d: Vec<usize>| {
                (0..=b).map(move |x| {
                    let mut d = d.clone();
                    d.push(x);
                    d
                })
            })
            .collect();
    }
    let entries = |d: &[usize]| -> usize {
        quiver
            .arrows()
            .iter()
            .map(|a| d[a.source] * d[a.target])
            .sum()
    };
    let total = dim_vectors.iter().fold(0u128, |acc, d| {
        acc.saturating_add(
            (p as u128)
                .checked_pow(entries(d) as u32)
                .unwrap_or(u128::MAX),
        )
    });
    if total > budget.max_subspaces {
        return Err(Error::budget(
            "representations",
            total,
            budget.max_subspaces,
        ));
    }
    let mut out = Vec::with_capacity(total as usize);
    for d in dim_vectors {
        let mut digits = vec![0u32; entries(&d)];
        loop {
            let mut rest = digits.as_slice();
            let maps = quiver
                .arrows()
                .iter()
                .map(|a| {
                    let (r, c) = (d[a.target], d[a.source]);
                    let (head, tail) = rest.split_at(r * c);
                    rest = tail;
                    let scalars: Vec<Scalar> = head.iter().map(|&x| Scalar::Modular(x)).collect();
                    Matrix::from_scalars(field, r, c, &scalars)
                })
                .collect();
            out.push(Rep::new(quiver.clone(), field, d.clone(), maps)?);
            if !odometer(&mut digits, p) {
                break;
            }
        }
    }
    Ok(out)
}

fn search<'a>(
    rep: &Rep,
    per_vertex: &'a [Arc<Vec<Matrix>>],
    closing: &[Vec<usize>],
    choice: &mut Vec<&'a Matrix>,
    found: &mut Vec<Vec<Matrix>>,
) {
    let v = choice.len();
    if v == per_vertex.len() {
        found.push(choice.iter().map(|m| (*m).clone()).collect());
        return;
    }
    for u in per_vertex[v].iter() {
        choice.push(u);
        let stable = closing[v].iter().all(|&i| {
            let a = rep.quiver().arrow(i);
            let (us, ut) = (choice[a.source], choice[a.target]);
            let image = rep.map(i) * us;
            Matrix::hstack(rep.field(), ut.rows(), &[ut, &image])
                .expect("shapes")
                .rank()
                == ut.cols()
        });
        if stable {
            search(rep, per_vertex, closing, choice, found);
        }
        choice.pop();
    }
}

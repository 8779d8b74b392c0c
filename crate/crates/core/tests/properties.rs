use std::sync::Arc;

use approxcat::approx::{left_approx_add, AddCategory, ApproxCertificate};
use approxcat::cert::verify_document;
use approxcat::counterex::{
    all_candidates, beta_surjectivity_check, build_standard, build_w, random_member, refute,
    LoopQuiverConfig,
};
use approxcat::rep::{
    ext1_basis, ext1_dim, ext_class, extension_from_cocycle, hom_dim, iso_test, Cocycle,
};
use approxcat::{FieldSpec, Matrix, Quiver, Rep, RepMorphism, Scalar};
use proptest::prelude::*;

const F2: FieldSpec = FieldSpec::Prime(2);
const F3: FieldSpec = FieldSpec::Prime(3);

fn fp_matrix(field: FieldSpec, max: usize) -> impl Strategy<Value = Matrix> {
    let p = field.modulus().unwrap();
    (0..=max, 0..=max).prop_flat_map(move |(r, c)| {
        prop::collection::vec(0..p, r * c).prop_map(move |v| {
            let data: Vec<Scalar> = v.into_iter().map(Scalar::Modular).collect();
            Matrix::from_scalars(field, r, c, &data)
        })
    })
}

fn q_matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c)
            .prop_map(move |v| Matrix::from_i64(FieldSpec::Rationals, r, c, &v))
    })
}

fn quivers() -> Vec<Arc<Quiver>> {
    vec![
        Quiver::a2(),
        Quiver::new(2, [("a", 0, 1), ("b", 0, 1)]).unwrap(),
        Quiver::new(3, [("a", 0, 1), ("b", 2, 1)]).unwrap(),
        Quiver::one_loop(),
    ]
}

/// A representation of one of the small test quivers with every vertex
/// dimension at most `max`.
fn rep(field: FieldSpec, max: usize, acyclic_only: bool) -> impl Strategy<Value = Rep> {
    let count: usize = if acyclic_only { 3 } else { 4 };
    (0..count).prop_flat_map(move |k: usize| {
        let q = quivers()[k].clone();
        let n = q.vertex_count();
        let p = field.modulus().unwrap();
        prop::collection::vec(0..=max, n).prop_flat_map(move |dims| {
            let q = q.clone();
            let entries: usize = q
                .arrows()
                .iter()
                .map(|a| dims[a.source] * dims[a.target])
                .sum();
            prop::collection::vec(0..p, entries).prop_map(move |v| {
                let mut rest = v.as_slice();
                let maps = q
                    .arrows()
                    .iter()
                    .map(|a| {
                        let (r, c) = (dims[a.target], dims[a.source]);
                        let (head, tail) = rest.split_at(r * c);
                        rest = tail;
                        let data: Vec<Scalar> = head.iter().map(|&x| Scalar::Modular(x)).collect();
                        Matrix::from_scalars(field, r, c, &data)
                    })
                    .collect();
                Rep::new(q.clone(), field, dims.clone(), maps).unwrap()
            })
        })
    })
}

fn vectors(field: FieldSpec, n: usize) -> Vec<Matrix> {
    let p = field.modulus().unwrap();
    let mut out = Vec::new();
    let mut digits = vec![0u32; n];
    loop {
        let data: Vec<Scalar> = digits.iter().map(|&d| Scalar::Modular(d)).collect();
        out.push(Matrix::from_scalars(field, n, 1, &data));
        let mut k = 0;
        while k < n {
            digits[k] += 1;
            if digits[k] < p {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == n {
            return out;
        }
    }
}

fn invertible(field: FieldSpec, n: usize, seed: Vec<u32>) -> Matrix {
    let p = field.modulus().unwrap();
    // unit lower times unit upper triangular, both read from the seed
    let mut l = Matrix::identity(field, n);
    let mut u = Matrix::identity(field, n);
    let mut it = seed.into_iter().cycle();
    for i in 0..n {
        for j in 0..n {
            let x = Scalar::Modular(it.next().unwrap_or(0) % p);
            let unit_at = |r, c| {
                Matrix::from_scalars(field, n, n, &{
                    let mut d = vec![Scalar::Modular(0); n * n];
                    d[r * n + c] = x.clone();
                    d
                })
            };
            if i > j {
                l = l.try_add(&unit_at(i, j)).unwrap();
            } else if i < j {
                u = u.try_add(&unit_at(i, j)).unwrap();
            }
        }
    }
    &l * &u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_matches_exhaustive_count(a in fp_matrix(F2, 6)) {
        let zeros = vectors(F2, a.cols()).iter().filter(|x| (&a * *x).is_zero()).count();
        let k = a.kernel_basis();
        prop_assert_eq!(k.cols() + a.rank(), a.cols());
        prop_assert_eq!(zeros, 1usize << k.cols());
        prop_assert!((&a * &k).is_zero());
    }

    #[test]
    fn solve_succeeds_iff_solvable(a in fp_matrix(F3, 4), seed in prop::collection::vec(0u32..3, 4)) {
        let data: Vec<Scalar> = (0..a.rows()).map(|i| Scalar::Modular(seed[i % 4])).collect();
        let b = Matrix::from_scalars(F3, a.rows(), 1, &data);
        let reachable = vectors(F3, a.cols()).iter().any(|x| &a * x == b);
        match a.solve(&b).unwrap() {
            Some(x) => prop_assert_eq!(&a * &x, b.clone()),
            None => prop_assert!(!reachable),
        }
        if reachable {
            prop_assert!(a.solve(&b).unwrap().is_some());
        }
    }

    #[test]
    fn rref_is_idempotent(a in fp_matrix(F3, 5)) {
        let (r, pivots) = a.rref();
        let (rr, pivots2) = r.rref();
        prop_assert_eq!(&r, &rr);
        prop_assert_eq!(pivots.len(), a.rank());
        prop_assert_eq!(pivots, pivots2);
    }

    #[test]
    fn rational_rank_and_inverse(a in q_matrix(4)) {
        prop_assert_eq!(a.rank(), a.transpose().rank());
        prop_assert_eq!(a.kernel_basis().cols() + a.rank(), a.cols());
        if let Some(inv) = a.inverse() {
            prop_assert_eq!(&a * &inv, Matrix::identity(FieldSpec::Rationals, a.rows()));
        }
    }

    #[test]
    fn extension_classes_round_trip(
        v in rep(F2, 2, false),
        seed in prop::collection::vec(0u32..2, 16),
    ) {
        let q = v.quiver().clone();
        let w = Rep::simple(q.clone(), F2, 0);
        let basis = ext1_basis(&v, &w).unwrap();
        let coeffs: Vec<Scalar> = (0..basis.len()).map(|k| Scalar::Modular(seed[k % 16])).collect();
        let c = Cocycle::combine(&v, &w, &coeffs, &basis).unwrap();
        let ses = extension_from_cocycle(&v, &w, &c).unwrap();
        prop_assert!(ses.verify());
        prop_assert_eq!(ext_class(&ses).unwrap(), coeffs.clone());
        let split = coeffs.iter().all(Scalar::is_zero);
        prop_assert_eq!(ses.is_split().unwrap().is_some(), split);
    }

    #[test]
    fn euler_form_on_acyclic_quivers(v in rep(F3, 2, true), k in 0usize..3) {
        let q = v.quiver().clone();
        let w = Rep::simple(q.clone(), F3, k % q.vertex_count());
        for (x, y) in [(&v, &w), (&w, &v), (&v, &v)] {
            let verts: i64 = (0..q.vertex_count()).map(|i| (x.dim(i) * y.dim(i)) as i64).sum();
            let arrows: i64 = q.arrows().iter().map(|a| (x.dim(a.source) * y.dim(a.target)) as i64).sum();
            let lhs = hom_dim(x, y).unwrap() as i64 - ext1_dim(x, y).unwrap() as i64;
            prop_assert_eq!(lhs, verts - arrows);
        }
    }

    #[test]
    fn base_change_is_detected_as_isomorphism(
        v in rep(F2, 3, false),
        seed in prop::collection::vec(0u32..2, 9),
    ) {
        let q = v.quiver().clone();
        let g: Vec<Matrix> = v.dims().iter().map(|&d| invertible(F2, d, seed.clone())).collect();
        let maps = q
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, a)| &(&g[a.target] * v.map(k)) * &g[a.source].inverse().unwrap())
            .collect();
        let w = Rep::new(q, F2, v.dims().to_vec(), maps).unwrap();
        let iso = iso_test(&v, &w).unwrap().expect("conjugate representations are isomorphic");
        prop_assert!(iso.is_iso() && iso.is_natural());
        prop_assert_eq!(iso.source(), &v);
    }

    #[test]
    fn hom_dimension_matches_brute_force(v in rep(F2, 2, false), k in 0usize..3) {
        let q = v.quiver().clone();
        let w = Rep::simple(q.clone(), F2, k % q.vertex_count());
        let entries: usize = v.dims().iter().zip(w.dims()).map(|(a, b)| a * b).sum();
        let mut natural = 0;
        for bits in 0u32..1 << entries {
            let mut shift = 0;
            let comps: Vec<Matrix> = (0..q.vertex_count())
                .map(|x| {
                    let (r, c) = (w.dim(x), v.dim(x));
                    let data: Vec<Scalar> = (0..r * c)
                        .map(|i| Scalar::Modular((bits >> (shift + i)) & 1))
                        .collect();
                    shift += r * c;
                    Matrix::from_scalars(F2, r, c, &data)
                })
                .collect();
            natural += RepMorphism::new(v.clone(), w.clone(), comps).is_ok() as usize;
        }
        prop_assert_eq!(natural, 1usize << hom_dim(&v, &w).unwrap());
    }

    #[test]
    fn representations_and_certificates_survive_json(v in rep(F3, 2, false)) {
        prop_assert_eq!(Rep::from_json(&v.to_json()).unwrap(), v.clone());
        let q = v.quiver().clone();
        let s = AddCategory::of((0..q.vertex_count()).map(|x| Rep::simple(q.clone(), F3, x)).collect()).unwrap();
        let cert = left_approx_add(&v, &s).unwrap();
        let doc = cert.to_document();
        let text = serde_json::to_string(&doc).unwrap();
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(ApproxCertificate::from_document(&back).unwrap(), cert);
        prop_assert!(verify_document(&back).is_ok());
    }

    #[test]
    fn witness_has_one_dimensional_hom_from_s2(n in 1usize..6, i in 0usize..6) {
        let cfg = LoopQuiverConfig::new(n, F2).unwrap();
        let i0 = i % n + 1;
        let w = build_w(&cfg, i0).unwrap();
        prop_assert_eq!(hom_dim(&build_standard(&cfg).s2, &w).unwrap(), 1);
    }

    #[test]
    fn random_members_refute_every_candidate(seed in any::<u64>(), a in 0usize..3, b in 1usize..3, n in 1usize..4) {
        let cfg = LoopQuiverConfig::new(n, F2).unwrap();
        let (v, ev) = random_member(&cfg, a, b, seed).unwrap();
        prop_assert!(beta_surjectivity_check(&v, &ev, &cfg).unwrap());
        for phi in all_candidates(&cfg, &v).unwrap() {
            let wit = refute(&phi, &ev, &cfg).unwrap();
            prop_assert!(wit.verify().is_ok());
            prop_assert!(wit.config.n_loops <= n + 1);
        }
    }
}

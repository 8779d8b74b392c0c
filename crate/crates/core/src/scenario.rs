//! Scripted end-to-end checks, each producing a deterministic report with a
//! transcript and re-verifiable certificates.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::approx::{
    factor_through, gt_left_approx, left_approx_add, member_add, minimize_approx, right_approx_add,
    AddCategory, SubcatHandle,
};
use crate::cert::report_document;
use crate::counterex::{
    all_candidates, beta_surjectivity_check, build_standard, build_w, random_member, refute,
    standard_ses, LoopQuiverConfig,
};
use crate::error::{Error, Result};
use crate::extfilt::{add_closure, filt_normalize, fr_enumerate, member_ext, member_filt};
use crate::field::FieldSpec;
use crate::matrix::Matrix;
use crate::quiver::Quiver;
use crate::rep::{all_reps, hom_basis, indecomposable_summands, iso_test, projective, Budget, Rep};

pub const SCENARIOS: [&str; 5] = [
    "example-1.3",
    "ringel-a2",
    "nilpotent-loop",
    "krause-solberg-a2",
    "gt-exhaustive-a2",
];

const F2: FieldSpec = FieldSpec::Prime(2);

/// Outcome of one scenario.
#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub name: String,
    pub passed: bool,
    pub transcript: Vec<String>,
    pub summary: Value,
    pub certificates: Vec<Value>,
}

impl ScenarioReport {
    pub fn to_document(&self) -> Value {
        let mut d = report_document(
            &self.name,
            self.passed,
            self.summary.clone(),
            self.certificates.clone(),
        );
        d["transcript"] = json!(self.transcript);
        d
    }
}

struct Log {
    lines: Vec<String>,
    ok: bool,
    start: Instant,
}

impl Log {
    fn new() -> Log {
        Log {
            lines: Vec::new(),
            ok: true,
            start: Instant::now(),
        }
    }

    fn check(&mut self, what: &str, ok: bool) {
        self.ok &= ok;
        self.lines
            .push(format!("[{}] {what}", if ok { "ok" } else { "FAIL" }));
    }

    fn note(&mut self, what: String) {
        self.lines.push(what);
    }

    fn finish(mut self, name: &str, summary: Value, certificates: Vec<Value>) -> ScenarioReport {
        self.lines.push(format!(
            "elapsed {:.2}s",
            self.start.elapsed().as_secs_f64()
        ));
        ScenarioReport {
            name: name.to_string(),
            passed: self.ok,
            transcript: self.lines,
            summary,
            certificates,
        }
    }
}

pub fn run(name: &str, budget: &Budget) -> Result<ScenarioReport> {
    match name {
        "example-1.3" => loop_counterexample(),
        "ringel-a2" => ringel_a2(budget),
        "nilpotent-loop" => nilpotent_loop(budget),
        "krause-solberg-a2" => projective_closure_a2(budget),
        "gt-exhaustive-a2" => gt_exhaustive_a2(budget),
        other => Err(Error::InvalidInput(format!(
            "unknown scenario {other}; expected one of {}",
            SCENARIOS.join(", ")
        ))),
    }
}

/// Number of random members of `Z` in the refutation sweep.
pub const REFUTATION_SAMPLES: u64 = 120;
/// Truncation level of the sweep.
pub const SWEEP_LOOPS: usize = 2;

/// Multiplicity pairs `(a, b)` for members `S1^a` by `M^b` with total
/// dimension at most 6.
pub fn sweep_shapes() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for b in 0..=3 {
        for a in 0..=6 - 2 * b {
            if a + b > 0 {
                out.push((a, b));
            }
        }
    }
    out
}

/// The loop-quiver counterexample: exact values, then refutation of every
/// candidate out of `S2` for a seeded sample of members of `Z`.
pub fn loop_counterexample() -> Result<ScenarioReport> {
    let mut log = Log::new();
    let cfg = LoopQuiverConfig::new(SWEEP_LOOPS, F2)?;
    let std = build_standard(&cfg);
    let w = build_w(&cfg, 1)?;
    let hom = hom_basis(&std.s2, &w)?.len();
    log.check(&format!("dim Hom(S2, W(1)) = {hom}, expected 1"), hom == 1);
    let ses = standard_ses(&cfg, 1)?;
    log.check("0 -> S1 -> W(1) -> M -> 0 is exact", ses.verify());
    log.check("the sequence has no section", ses.is_split()?.is_none());
    let cyclic = crate::rep::projective_epi(&std.m);
    log.check(
        "projective cover of M is refused on the loop quiver",
        cyclic == Err(Error::NonAcyclicQuiver),
    );
    log.note(
        "truncation: new loops act by zero; refute raises the level by one at most once"
            .to_string(),
    );

    let shapes = sweep_shapes();
    let results: Vec<Result<(usize, usize, bool, Value)>> = (0..REFUTATION_SAMPLES)
        .into_par_iter()
        .map(|seed| {
            let (a, b) = shapes[seed as usize % shapes.len()];
            let (v, ev) = random_member(&cfg, a, b, seed)?;
            let beta = beta_surjectivity_check(&v, &ev, &cfg)?;
            let mut escalations = 0;
            let mut count = 0;
            let mut doc = Value::Null;
            for phi in all_candidates(&cfg, &v)? {
                let wit = refute(&phi, &ev, &cfg)?;
                wit.verify()?;
                escalations += wit.escalated as usize;
                count += 1;
                if doc.is_null() || !phi.is_zero() {
                    doc = wit.to_document();
                }
            }
            Ok((count, escalations, beta, doc))
        })
        .collect();
    let mut refutations = 0;
    let mut escalations = 0;
    let mut failures = 0;
    let mut beta_ok = true;
    let mut certificates = Vec::new();
    for r in results {
        match r {
            Ok((c, e, b, doc)) => {
                refutations += c;
                escalations += e;
                beta_ok &= b;
                certificates.push(doc);
            }
            Err(e) => {
                failures += 1;
                log.note(format!("sample failed: {e}"));
            }
        }
    }
    log.check(
        &format!("beta is onto vertex 1 for all {REFUTATION_SAMPLES} members"),
        beta_ok,
    );
    log.check(
        &format!(
            "{refutations} candidates refuted, {failures} failures, {escalations} escalations"
        ),
        failures == 0 && refutations >= 100,
    );
    let summary = json!({
        "n_loops": SWEEP_LOOPS,
        "field": F2.to_string(),
        "dim_hom_s2_w": hom,
        "members": REFUTATION_SAMPLES,
        "refutations": refutations,
        "escalations": escalations,
        "failures": failures,
    });
    Ok(log.finish("example-1.3", summary, certificates))
}

/// The ordered family `(S2, S1)` on `1 -> 2`: every filtration found with
/// at most four factors normalizes to at most two, and lengths two and four
/// agree.
pub fn ringel_a2(budget: &Budget) -> Result<ScenarioReport> {
    let mut log = Log::new();
    let q = Quiver::a2();
    let family = AddCategory::new(
        &q,
        F2,
        vec![Rep::simple(q.clone(), F2, 1), Rep::simple(q.clone(), F2, 0)],
    )?;
    let reps = all_reps(&q, F2, &[3, 3], budget)?;
    let rows: Vec<Result<(bool, bool, usize, usize)>> = reps
        .par_iter()
        .map(|v| {
            let short = member_filt(v, &family, 2, budget)?;
            let long = member_filt(v, &family, 4, budget)?;
            let mut normalized = 0;
            let mut deepest = 0;
            for c in [&short, &long].into_iter().flatten() {
                let n = filt_normalize(c, &family)?;
                n.verify()?;
                if n.depth() > 2 {
                    return Err(Error::CertificateInvalid("normal form too long".into()));
                }
                deepest = deepest.max(n.depth());
                normalized += 1;
            }
            Ok((short.is_some(), long.is_some(), normalized, deepest))
        })
        .collect();
    let (mut agree, mut normalized, mut deepest, mut errors) = (0, 0, 0, 0);
    for r in rows {
        match r {
            Ok((s, l, n, d)) => {
                agree += (s == l) as usize;
                normalized += n;
                deepest = deepest.max(d);
            }
            Err(e) => {
                errors += 1;
                log.note(format!("instance failed: {e}"));
            }
        }
    }
    log.check(
        &format!(
            "lengths 2 and 4 agree on {agree} of {} representations",
            reps.len()
        ),
        agree == reps.len() && errors == 0,
    );
    log.check(
        &format!("{normalized} certificates normalized, longest normal form {deepest}"),
        errors == 0 && deepest <= 2,
    );
    let summary = json!({
        "instances": reps.len(),
        "agreements": agree,
        "normalized": normalized,
        "max_normal_depth": deepest,
        "errors": errors,
    });
    let sample = reps
        .iter()
        .rev()
        .find_map(|v| member_filt(v, &family, 4, budget).ok().flatten())
        .map(|c| filt_normalize(&c, &family))
        .transpose()?
        .map(|c| vec![c.to_document()])
        .unwrap_or_default();
    Ok(log.finish("ringel-a2", summary, sample))
}

/// The index `r` with `a^r = 0`, `a^{r-1} != 0`.
pub fn nilpotency_index(a: &Matrix) -> Option<usize> {
    let n = a.rows();
    let mut power = Matrix::identity(a.field(), n);
    for r in 0..=n {
        if power.is_zero() {
            return Some(r);
        }
        power = &power * a;
    }
    None
}

/// On the one-loop quiver: `V` has a filtration of length `r` by copies of
/// the simple iff the loop acts with `a^r = 0`.
pub fn nilpotent_loop(budget: &Budget) -> Result<ScenarioReport> {
    let mut log = Log::new();
    let q = Quiver::one_loop();
    let s = AddCategory::new(&q, F2, vec![Rep::simple(q.clone(), F2, 0)])?;
    let reps = all_reps(&q, F2, &[4], budget)?;
    const R: usize = 4;
    let rows: Vec<Result<[(bool, bool); R]>> = reps
        .par_iter()
        .map(|v| {
            let index = nilpotency_index(v.map(0));
            let mut row = [(false, false); R];
            for (k, cell) in row.iter_mut().enumerate() {
                let r = k + 1;
                let filt = member_filt(v, &s, r, budget)?;
                if let Some(c) = &filt {
                    c.verify()?;
                }
                *cell = (filt.is_some(), index.is_some_and(|i| i <= r));
            }
            Ok(row)
        })
        .collect();
    let mut table = [[0usize; 3]; R];
    let mut errors = 0;
    for row in rows {
        match row {
            Ok(row) => {
                for (k, (filt, nil)) in row.into_iter().enumerate() {
                    table[k][0] += filt as usize;
                    table[k][1] += nil as usize;
                    table[k][2] += (filt != nil) as usize;
                }
            }
            Err(e) => {
                errors += 1;
                log.note(format!("instance failed: {e}"));
            }
        }
    }
    log.note(format!(
        "{} representations of dimension at most 4",
        reps.len()
    ));
    log.note(" r | filtered | a^r = 0 | disagreements".to_string());
    for (k, [f, n, d]) in table.iter().enumerate() {
        log.note(format!("{:>2} | {f:>8} | {n:>7} | {d:>13}", k + 1));
    }
    log.check(
        "filtration length agrees with nilpotency everywhere",
        errors == 0 && table.iter().all(|t| t[2] == 0),
    );
    let summary = json!({
        "instances": reps.len(),
        "table": table.iter().enumerate().map(|(k, [f, n, d])| json!({
            "r": k + 1, "filtered": f, "nilpotent": n, "disagreements": d,
        })).collect::<Vec<_>>(),
        "errors": errors,
    });
    let j4 = Rep::from_i64(
        q,
        F2,
        vec![4],
        &[&[0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0]],
    )?;
    let certs = member_filt(&j4, &s, 4, budget)?
        .map(|c| vec![c.to_document()])
        .unwrap_or_default();
    Ok(log.finish("nilpotent-loop", summary, certs))
}

/// Right approximations of the simples of `1 -> 2` by the projectives give
/// `S = {P1, P2}`; two-fold extensions of `S` stay in `add{P1, P2}`, and
/// every small representation has a left approximation there.
pub fn projective_closure_a2(budget: &Budget) -> Result<ScenarioReport> {
    let mut log = Log::new();
    let q = Quiver::a2();
    let p1 = projective(&q, F2, 0)?;
    let p2 = projective(&q, F2, 1)?;
    let proj = AddCategory::new(&q, F2, vec![p1.clone(), p2.clone()])?;
    let mut certs = Vec::new();
    let mut s_reps: Vec<Rep> = Vec::new();
    for v in 0..2 {
        let simple = Rep::simple(q.clone(), F2, v);
        let min = minimize_approx(&right_approx_add(&simple, &proj)?)?;
        min.verify()?;
        log.check(
            &format!(
                "minimal right approximation of S{} is {:?} -> {:?}, onto",
                v + 1,
                min.approximant().dims(),
                simple.dims()
            ),
            min.approximation.is_surjective(),
        );
        for (piece, _) in indecomposable_summands(min.approximant())? {
            if !s_reps
                .iter()
                .any(|r| iso_test(r, &piece).ok().flatten().is_some())
            {
                s_reps.push(piece);
            }
        }
        certs.push(min.to_document());
    }
    let is_proj = |r: &Rep| -> bool {
        [&p1, &p2]
            .iter()
            .any(|p| iso_test(r, p).ok().flatten().is_some())
    };
    log.check(
        &format!("S consists of {} projectives", s_reps.len()),
        s_reps.len() == 2 && s_reps.iter().all(is_proj),
    );
    let s = AddCategory::new(&q, F2, s_reps)?;
    let bound = [3, 3];
    let f2 = fr_enumerate(&s, 2, &bound, budget)?;
    let closure = add_closure(&f2, &bound)?;
    let mut forward = 0;
    for r in &closure {
        forward += member_add(r, &proj)?.is_some() as usize;
    }
    log.check(
        &format!(
            "{forward} of {} members of add F_2(S) lie in add{{P1, P2}}",
            closure.len()
        ),
        forward == closure.len(),
    );
    let pieces: Vec<Rep> = closure
        .iter()
        .filter(|r| !r.is_zero())
        .map(indecomposable_summands)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .map(|(p, _)| p)
        .collect();
    let generated = AddCategory::new(&q, F2, pieces)?;
    let backward = [&p1, &p2]
        .iter()
        .filter(|p| member_add(p, &generated).ok().flatten().is_some())
        .count();
    log.check("P1 and P2 lie in add F_2(S)", backward == 2);
    let small = all_reps(&q, F2, &[2, 2], budget)?;
    let mut approximated = 0;
    for m in &small {
        let c = left_approx_add(m, &proj)?;
        if c.verify().is_ok() {
            approximated += 1;
        }
    }
    log.check(
        &format!(
            "{approximated} of {} representations have a left approximation",
            small.len()
        ),
        approximated == small.len(),
    );
    let summary = json!({
        "s_dims": s.generators().iter().map(|g| g.dims().to_vec()).collect::<Vec<_>>(),
        "f2_classes": f2.len(),
        "closure_classes": closure.len(),
        "in_add_projectives": forward,
        "left_approximations": approximated,
    });
    Ok(log.finish("krause-solberg-a2", summary, certs))
}

/// Extension objects `add{S1} * add{S2}` on `1 -> 2` with dimensions at most
/// `(3, 3)`, found by exhaustive search.
pub fn a2_extension_family(budget: &Budget) -> Result<Vec<Rep>> {
    let q = Quiver::a2();
    let (x, y) = a2_simple_handles();
    let all = all_reps(&q, F2, &[3, 3], budget)?;
    let found: Vec<Result<Option<Rep>>> = all
        .par_iter()
        .map(|z| Ok(member_ext(z, &x, &y, budget)?.map(|_| z.clone())))
        .collect();
    found.into_iter().filter_map(Result::transpose).collect()
}

/// `add{S1}` and `add{S2}` on `1 -> 2` over F_2.
pub fn a2_simple_handles() -> (SubcatHandle, SubcatHandle) {
    let q = Quiver::a2();
    let x = AddCategory::new(&q, F2, vec![Rep::simple(q.clone(), F2, 0)]).expect("same quiver");
    let y = AddCategory::new(&q, F2, vec![Rep::simple(q.clone(), F2, 1)]).expect("same quiver");
    (x.into(), y.into())
}

/// Left approximations into `add{S1} * add{S2}` for every representation of
/// `1 -> 2` with dimensions at most `(2, 2)`, checked against every morphism
/// into the exhaustively enumerated extension family.
pub fn gt_exhaustive_a2(budget: &Budget) -> Result<ScenarioReport> {
    let mut log = Log::new();
    let q = Quiver::a2();
    let (x, y) = a2_simple_handles();
    let targets = a2_extension_family(budget)?;
    log.note(format!(
        "{} extension objects with dimensions at most (3, 3)",
        targets.len()
    ));
    let objects = all_reps(&q, F2, &[2, 2], budget)?;
    let rows: Vec<Result<(usize, usize, Value)>> = objects
        .par_iter()
        .map(|m| {
            let gt = gt_left_approx(m, &x, &y)?;
            gt.certificate.verify()?;
            let z = &gt.certificate.approximation;
            let (mut checked, mut failed) = (0, 0);
            for t in &targets {
                for f in hom_basis(m, t)? {
                    checked += 1;
                    match factor_through(&f, z)? {
                        Some(h) if h.after(z)? == f => {}
                        _ => failed += 1,
                    }
                }
            }
            Ok((checked, failed, gt.certificate.to_document()))
        })
        .collect();
    let (mut checked, mut failed, mut errors) = (0, 0, 0);
    let mut certs = Vec::new();
    for r in rows {
        match r {
            Ok((c, f, doc)) => {
                checked += c;
                failed += f;
                certs.push(doc);
            }
            Err(e) => {
                errors += 1;
                log.note(format!("object failed: {e}"));
            }
        }
    }
    log.check(
        &format!(
            "{} approximations, {checked} basis morphisms factor, {failed} failures",
            objects.len()
        ),
        failed == 0 && errors == 0,
    );
    let summary = json!({
        "objects": objects.len(),
        "targets": targets.len(),
        "checked_morphisms": checked,
        "failures": failed,
        "errors": errors,
    });
    Ok(log.finish("gt-exhaustive-a2", summary, certs))
}

//! The ten acceptance criteria, run in order inside one test so timings are
//! not distorted by parallel test threads. Prints one PASS/FAIL line each.

use std::time::{Duration, Instant};

use hteo::dieudonne::{presentation, SearchMode, StratumPresentation};
use hteo::lemmas::{check_p2_corner, check_sharp_reduction, check_wilson_units, default_sharp_precision, Report};
use hteo::rational::q;
use hteo::resfield::ff_make;
use hteo::strata::classify;
use hteo::suites::{
    case1_instance, case1_sweep, check_case1, check_case2, fiber_coherence, iso_separation, period_product,
    point_with_ord, superspecial_equiv,
};
use hteo::tilt::{check_residue_congruence, solve_case2, PuiseuxSeries};
use hteo::{Result, Val};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn from_report(r: &Report) -> Outcome {
    let failed: Vec<&str> = r.assertions.iter().filter(|a| !a.ok).map(|a| a.name.as_str()).collect();
    Outcome {
        ok: failed.is_empty() && !r.assertions.is_empty(),
        detail: format!("{} assertions, {} failed {:?}", r.assertions.len(), failed.len(), failed),
    }
}

fn merge(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        ok: parts.iter().all(|o| o.ok),
        detail: parts.iter().map(|o| o.detail.as_str()).collect::<Vec<_>>().join("; "),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Result<Outcome>) -> Outcome {
    let start = Instant::now();
    let out = f().unwrap_or_else(|e| Outcome { ok: false, detail: format!("error: {e}") });
    let took = start.elapsed();
    match limit {
        Some(l) if took > l => Outcome {
            ok: false,
            detail: format!("{} (took {took:?}, limit {l:?})", out.detail),
        },
        _ => Outcome { detail: format!("{} [{took:.2?}]", out.detail), ..out },
    }
}

fn census() -> Result<Outcome> {
    let expected = ["LowerSS", "LowerSS", "LowerSS", "LowerFamily", "MiddleSS", "UpperFamily", "UpperSS", "UpperSS"];
    let mut bad = Vec::new();
    for p in [3u64, 5] {
        let pi = p as i64;
        let lo = q(1, pi + 1);
        let hi = q(pi, pi + 1);
        let grid = [
            Val::NegInf,
            Val::Finite(q(0, 1)),
            Val::Finite(q(1, 8)),
            Val::Finite(lo),
            Val::Finite((lo + hi) / q(2, 1)),
            Val::Finite(hi),
            Val::Finite(q(1, 1)),
            Val::PosInf,
        ];
        for (ord, want) in grid.iter().zip(expected) {
            let report = classify(&point_with_ord(p, 2, *ord, 8)?)?;
            if report.label.name() != want || report.ord_tau != *ord {
                bad.push(format!("p={p} ord={ord}: {}", report.label.name()));
            }
        }
    }
    Ok(Outcome { ok: bad.is_empty(), detail: format!("16 points, mismatches {bad:?}") })
}

fn case1() -> Result<Outcome> {
    let mut report = Report::new("case1", serde_json::json!({}));
    let sweep = case1_sweep();
    for (i, (p, o0, o1)) in sweep.iter().enumerate() {
        let k = ff_make(*p, 2, 0)?;
        let (t0, t1) = case1_instance(&k, *o0, *o1)?;
        check_case1(&mut report, &format!("pair{i}_"), &t0, &t1)?;
    }
    let mut out = from_report(&report);
    out.ok &= sweep.len() == 25;
    out.detail = format!("{} pairs, {}", sweep.len(), out.detail);
    Ok(out)
}

fn case2() -> Result<Outcome> {
    let k = ff_make(3, 2, 0)?;
    let t = PuiseuxSeries::monomial(&k.one(), q(1, 3));
    let mut report = Report::new("case2", serde_json::json!({}));
    check_case2(&mut report, "unit_", &t, &PuiseuxSeries::constant(&k.generator()))?;
    check_case2(&mut report, "half_", &t, &PuiseuxSeries::monomial(&k.one(), q(1, 2)))?;
    // at ord(s) = 1/4 the leading coefficient c of a0 solves c^9 − c = r, r ≠ 0,
    // which has no solution in F_9; its Artin-Schreier extension is F_{3^6}
    let big = ff_make(3, 6, 0)?;
    let t_big = PuiseuxSeries::monomial(&big.one(), q(1, 3));
    let s_big = PuiseuxSeries::monomial(&big.one(), q(1, 4));
    check_case2(&mut report, "quarter_", &t_big, &s_big)?;
    Ok(from_report(&report))
}

fn congruence() -> Result<Outcome> {
    let k = ff_make(3, 2, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0;
    for _ in 0..20 {
        let t = PuiseuxSeries::monomial(&k.one(), q(1, 3))
            .try_add(&PuiseuxSeries::monomial(&k.random(&mut rng), q(2, 3)))?;
        let s = PuiseuxSeries::constant(&k.random_unit(&mut rng))
            .try_add(&PuiseuxSeries::monomial(&k.random(&mut rng), q(1, 2)))?;
        let sol = solve_case2(&t, &s)?;
        if !check_residue_congruence(&sol.a0, &sol.b1, &s, &t)?.equal {
            failures += 1;
        }
    }
    Ok(Outcome { ok: failures == 0, detail: format!("20 instances, {failures} failures") })
}

fn cyclotomic() -> Result<Outcome> {
    let mut parts = Vec::new();
    for (p, l) in [(3, 1), (3, 2), (5, 1), (7, 1)] {
        parts.push(from_report(&check_sharp_reduction(p, l, default_sharp_precision(p, l))?));
    }
    for p in [3, 5, 7] {
        parts.push(from_report(&check_wilson_units(p, 6)?));
    }
    Ok(merge(parts))
}

fn superspecial() -> Result<Outcome> {
    let k = ff_make(3, 2, 0)?;
    let mut out = from_report(&superspecial_equiv(3, 2, 1000, 7)?);
    let ss = [StratumPresentation::MiddleSS, StratumPresentation::LowerSS, StratumPresentation::UpperSS];
    let ss_true = ss.iter().all(|l| presentation(l, &k).map(|d| d.is_superspecial_v2()).unwrap_or(false));
    let fam_false = k.units().all(|u| {
        [StratumPresentation::LowerFamily(u.clone()), StratumPresentation::UpperFamily(u)]
            .iter()
            .all(|l| presentation(l, &k).map(|d| !d.is_superspecial_v2() && !d.is_superspecial_fv()).unwrap_or(false))
    });
    out.ok &= ss_true && fam_false;
    Ok(out)
}

fn separation() -> Result<Outcome> {
    Ok(merge(vec![
        from_report(&iso_separation(3, 2, Some(SearchMode::exhaustive()))?),
        from_report(&iso_separation(3, 4, Some(SearchMode::StructuredForm))?),
    ]))
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs;
    let results = [
        ("1 threshold census", timed(Some(secs(1)), census)),
        (
            "2 period product",
            timed(None, || Ok(merge(vec![from_report(&period_product(3, 100, 1)?), from_report(&period_product(5, 100, 2)?)]))),
        ),
        ("3 valuation lemmas, case 1", timed(None, case1)),
        ("4 valuation lemma, case 2", timed(None, case2)),
        ("5 residue congruence", timed(None, congruence)),
        ("6 cyclotomic lemma", timed(Some(secs(10)), cyclotomic)),
        ("7 superspecial equivalence", timed(None, superspecial)),
        ("8 isomorphism separation", timed(Some(secs(30)), separation)),
        ("9 fiber coherence", timed(None, || Ok(from_report(&fiber_coherence(3, 10, 9)?)))),
        ("10 p = 2 corner", timed(None, || Ok(from_report(&check_p2_corner()?)))),
    ];
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<_> = results.iter().filter(|(_, o)| !o.ok).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

//! End-to-end acceptance checks. Each test writes one PASS/FAIL line to
//! stdout (uncaptured, so it shows up in the test log) before asserting.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;

use cubic_span::census::{self, Family, Interpretation};
use cubic_span::gf::Field;
use cubic_span::parallel::{self, ALL_CORES};
use cubic_span::proj::{self, Point};
use cubic_span::span::{Order, SpanContext};
use cubic_span::surface::{intersection_pattern_ok, StrictBudget};
use cubic_span::CubicSurface;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: &str, ok: bool, detail: String) {
    let line = format!("{} {id}: {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
}

fn random_surface(field: &Arc<Field>, rng: &mut ChaCha8Rng) -> Option<CubicSurface> {
    let q = field.q();
    let codes: Vec<u32> = (0..20).map(|_| rng.random_range(0..q)).collect();
    CubicSurface::from_codes(field.clone(), &codes).ok()
}

#[test]
fn f2_census() {
    let r = census::census_f2();
    let ok = r.total == 65536 && r.total == r.smooth + r.singular && r.counterexamples.is_empty();
    verdict(
        "f2-census",
        ok,
        format!(
            "{} models, {} smooth, {} with an Eckardt-free line, {} verified, {} counterexamples; \
             {} of all smooth models have a generator on the line ({} ms)",
            r.total,
            r.smooth,
            r.eligible,
            r.verified,
            r.counterexamples.len(),
            r.bucket("generator-on-line"),
            r.elapsed_ms
        ),
    );
    assert!(ok, "{r:?}");
}

#[test]
fn f3_family_census() {
    let mut ok = true;
    let mut parts = Vec::new();
    for interp in [Interpretation::EYW, Interpretation::Printed] {
        let r = census::census_f3_family(interp);
        let failures =
            r.bucket("failure-second-eckardt") + r.bucket("failure-without-second-eckardt");
        let this = r.total == 2187
            && r.counterexamples.is_empty()
            && r.eligible == r.verified
            && r.bucket("failure-without-second-eckardt") == 0;
        ok &= this;
        parts.push(format!(
            "{}: {} smooth, {} with one Eckardt point and a skew line, {} verified, \
             {failures} failures all with a second Eckardt point",
            interp.as_str(),
            r.smooth,
            r.eligible,
            r.verified
        ));
    }
    verdict("f3-family-census", ok, parts.join("; "));
    assert!(ok);
}

#[test]
fn f3_superset_census() {
    let r = census::census_f3_superset();
    // The family sits inside the superset under either reading of the fifth term.
    let f3 = Family::F3Superset.field();
    let superset: BTreeSet<String> = (0..r.total)
        .filter_map(|i| Family::F3Superset.model(&f3, i))
        .map(|s| s.to_string())
        .collect();
    let contained = [Interpretation::EYW, Interpretation::Printed]
        .iter()
        .all(|&interp| {
            let fam = Family::F3Family(interp);
            (0..fam.total()).all(|i| superset.contains(&fam.model(&f3, i).unwrap().to_string()))
        });
    let ok = r.total == 59049
        && r.counterexamples.is_empty()
        && contained
        && r.bucket("failure-without-second-eckardt") == 0;
    verdict(
        "f3-superset-census",
        ok,
        format!(
            "{} models, {} smooth, {} eligible, {} verified, {} counterexamples, family contained: {contained} ({} ms)",
            r.total,
            r.smooth,
            r.eligible,
            r.verified,
            r.counterexamples.len(),
            r.elapsed_ms
        ),
    );
    assert!(ok);
}

#[test]
fn single_point_generation_sampled() {
    let mut ok = true;
    let mut parts = Vec::new();
    for q in census::THEOREM_FIELDS {
        let r = census::verify_main_theorem(q, 100, 2024, ALL_CORES).unwrap();
        ok &= r.eligible == 100 && r.verified == 100 && r.counterexamples.is_empty();
        parts.push(format!(
            "q={q}: {}/{} ({} attempts)",
            r.verified, r.eligible, r.total
        ));
    }
    verdict("single-point-generation", ok, parts.join(", "));
    assert!(ok);
}

#[test]
fn parabolic_counts_on_lines() {
    let mut ok = true;
    let mut parts = Vec::new();
    for q in [2, 4, 3, 5, 7, 11] {
        let r = census::lemma_suite(q, 50, 7, ALL_CORES).unwrap();
        let t = r.checks["line-parabolic-count"];
        ok &= r.eligible == 50 && t.applicable == 50 && t.passed == 50;
        let kinds: Vec<String> = r
            .buckets
            .iter()
            .filter(|(k, _)| k.starts_with("line-parabolic-"))
            .map(|(k, v)| format!("{}={v}", &k["line-parabolic-".len()..]))
            .collect();
        parts.push(format!(
            "q={q}: {}/{} surfaces [{}]",
            t.passed,
            t.applicable,
            kinds.join(" ")
        ));
    }
    verdict("line-parabolic-counts", ok, parts.join(", "));
    assert!(ok);
}

#[test]
fn structural_checks_hold() {
    let mut bad = Vec::new();
    let mut ran = 0;
    for q in census::SUITE_FIELDS {
        let r = census::lemma_suite(q, 40, 99, ALL_CORES).unwrap();
        for (name, t) in &r.checks {
            ran += t.applicable;
            if t.passed != t.applicable {
                bad.push(format!("q={q} {name}"));
            }
        }
        if r.has_counterexamples() {
            bad.push(format!("q={q}: {:?}", r.counterexamples));
        }
    }
    assert!(bad.is_empty(), "{bad:?}");
    assert!(ran > 0);
}

#[test]
fn line_counts_over_extensions() {
    let f2 = Family::F2.field();
    let mut checked = 0;
    let mut full: Option<(u32, bool)> = None;
    let mut monotone = true;
    let mut bounded = true;
    for i in 0..Family::F2.total() {
        if checked >= 5 && full.is_some() || checked >= 200 {
            break;
        }
        let Some(s) = Family::F2.model(&f2, i) else {
            continue;
        };
        if !s.is_smooth() {
            continue;
        }
        let counts: Vec<usize> = (1..=6)
            .map(|m| s.lines_over_extension(m).unwrap().len())
            .collect();
        bounded &= counts.iter().all(|&c| c <= 27);
        for a in 1..=6 {
            for b in (2 * a..=6).step_by(a) {
                monotone &= counts[a - 1] <= counts[b - 1];
            }
        }
        if full.is_none() {
            if let Some(m) = (1..=6u32).find(|&m| counts[m as usize - 1] == 27) {
                let ext = Field::new(2, m).unwrap();
                let lines = s.lines_over_extension(m).unwrap();
                full = Some((m, intersection_pattern_ok(&ext, &lines)));
            }
        }
        checked += 1;
    }
    let pattern = full.is_some_and(|(_, ok)| ok);
    let ok = checked >= 5 && bounded && monotone && pattern;
    verdict(
        "extension-line-counts",
        ok,
        format!(
            "{checked} smooth surfaces, counts ≤ 27: {bounded}, nondecreasing: {monotone}, \
             27 lines with the intersection pattern: {full:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn rank_test_matches_point_search() {
    let budget = StrictBudget {
        max_degree: 4,
        max_field_size: u64::MAX,
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [2u32, 3] {
        let field = Arc::new(Field::prime(p).unwrap());
        let results = parallel::map_range(0..1000, ALL_CORES, |i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            rng.set_stream(i);
            let s = loop {
                if let Some(s) = random_surface(&field, &mut rng) {
                    break s;
                }
            };
            let rank = s.is_smooth();
            let search = s.singular_point_search(budget).is_none();
            (rank, search)
        });
        let disagree = results.iter().filter(|(a, b)| a != b).count();
        let smooth = results.iter().filter(|(a, _)| *a).count();
        ok &= disagree == 0;
        parts.push(format!(
            "F{p}: {smooth}/1000 smooth, {disagree} disagreements"
        ));
    }
    verdict("smoothness-oracle", ok, parts.join(", "));
    assert!(ok);
}

/// Every split line with two of its three points in `members` has the third there too.
fn saturated(s: &CubicSurface, members: &BTreeSet<Point>) -> bool {
    let f = s.field();
    proj::lines_of_space(f).iter().all(|l| {
        let cubic = s.restrict_to_line(l);
        if cubic.is_zero() {
            return true;
        }
        let mut divisor = Vec::new();
        for ((a, b), m) in cubic.rational_roots(f) {
            divisor.extend(std::iter::repeat_n(l.point_at(f, a, b), m));
        }
        divisor.len() != 3
            || (0..3).all(|k| {
                let rest = (0..3)
                    .filter(|&j| j != k)
                    .all(|j| members.contains(&divisor[j]));
                !rest || members.contains(&divisor[k])
            })
    })
}

#[test]
fn closure_operator_laws() {
    let fields = [
        Arc::new(Field::new(2, 1).unwrap()),
        Arc::new(Field::new(3, 1).unwrap()),
        Arc::new(Field::new(2, 2).unwrap()),
    ];
    let violations = parallel::map_range(0..200, ALL_CORES, |i| {
        let field = &fields[(i % 3) as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(0xc105);
        rng.set_stream(i);
        let s = loop {
            if let Some(s) = random_surface(field, &mut rng).filter(|s| s.is_smooth()) {
                break s;
            }
        };
        let ctx = SpanContext::new(&s);
        let n = ctx.len() as u32;
        let mut v = Vec::new();
        if n == 0 {
            return v;
        }
        let b: Vec<u32> = (0..rng.random_range(1..=3))
            .map(|_| rng.random_range(0..n))
            .collect();
        let mut bigger = b.clone();
        bigger.extend((0..rng.random_range(1..=3)).map(|_| rng.random_range(0..n)));
        let c = ctx.closure(&b);
        if !b.iter().all(|&x| c.contains(x as usize)) {
            v.push("extensive");
        }
        if !c.is_subset(&ctx.closure(&bigger)) {
            v.push("monotone");
        }
        let members: Vec<u32> = c.ones().map(|x| x as u32).collect();
        if ctx.closure(&members) != c {
            v.push("idempotent");
        }
        let pts: BTreeSet<Point> = members.iter().map(|&x| ctx.points()[x as usize]).collect();
        if !saturated(&s, &pts) {
            v.push("saturated");
        }
        for order in [Order::Lifo, Order::Shuffled(i), Order::Shuffled(!i)] {
            if ctx.closure_with(&b, order).members != c {
                v.push("order-independent");
            }
        }
        v
    });
    let total: usize = violations.iter().map(Vec::len).sum();
    let ok = total == 0;
    verdict(
        "closure-operator-laws",
        ok,
        format!("200 instances over q=2,3,4, {total} violations"),
    );
    assert!(ok, "{violations:?}");
}

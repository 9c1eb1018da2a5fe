//! Exhaustive enumerations of normal forms and sampled property runs.
//!
//! Every surface in a census contains the line ℓ: X = Y = 0, so it can be
//! written F = X·Q₁(X,Y,Z,W) + Y·Q₂(Y,Z,W). A model index is read as base-q
//! digits, least significant first, filling the free coefficients of the
//! family in a fixed order. Models are evaluated independently and merged in
//! index order, so a report does not depend on the worker count or on how
//! the index range was split.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::forms;
use crate::gf::{Field, FieldElem, SUPPORTED_PRIMES};
use crate::parallel;
use crate::proj::{self, Line, Meet, Point};
use crate::span::SpanContext;
use crate::surface::{CubicSurface, PointClass, PointKind, StrictBudget};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("field size {0} is not supported here")]
    UnsupportedField(u32),
    #[error("index range {0}..{1} exceeds the family size {2}")]
    Range(u64, u64, u64),
    #[error("checkpoint {path}: {source}")]
    Checkpoint { path: PathBuf, source: io::Error },
    #[error("checkpoint {0} belongs to a different run")]
    CheckpointMismatch(PathBuf),
}

/// How the fifth term of the F₃ normal form is read.
///
/// As printed the term is `e·Y` inside a quadric, which is not homogeneous;
/// `Printed` drops it (so `e` has no effect), `EYW` reads it as `e·Y·W`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Interpretation {
    #[serde(rename = "printed")]
    Printed,
    #[default]
    #[serde(rename = "eYW")]
    EYW,
}

impl Interpretation {
    pub fn as_str(self) -> &'static str {
        match self {
            Interpretation::Printed => "printed",
            Interpretation::EYW => "eYW",
        }
    }
}

impl std::str::FromStr for Interpretation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "printed" | "eY" => Ok(Interpretation::Printed),
            "eYW" | "corrected" => Ok(Interpretation::EYW),
            _ => Err(format!(
                "unknown interpretation {s:?} (expected printed or eYW)"
            )),
        }
    }
}

/// An enumerated family of models containing ℓ: X = Y = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// All X·Q₁ + Y·Q₂ over F₂: 10 + 6 free coefficients.
    F2,
    /// X(aX² + bXY + cXZ + dY² + e·YW + fZ² + gW²) + Y²Z + YZ² over F₃.
    F3Family(Interpretation),
    /// Q₁ free over F₃, Q₂ = YZ + Z².
    F3Superset,
    /// All X·Q₁ + Y·Q₂ over F₃ (3¹⁶ models; long).
    F3Full,
}

/// ℓ: X = Y = 0.
pub fn base_line(f: &Field) -> Line {
    let e = |i: usize| {
        let mut v = [FieldElem::ZERO; 4];
        v[i] = FieldElem::ONE;
        v
    };
    Line::from_rows(f, e(2), e(3)).expect("independent")
}

/// Cubic coefficient index of X·m for each quadric monomial m in 4 variables.
fn xq1_slots() -> [usize; 10] {
    let b = forms::basis(4, 2);
    std::array::from_fn(|i| {
        forms::cubic_basis().index(&forms::add_exps(&[1, 0, 0, 0], &b.exps()[i]))
    })
}

/// Cubic coefficient index of Y·m for each quadric monomial m in Y, Z, W.
fn yq2_slots() -> [usize; 6] {
    let b = forms::basis(3, 2);
    std::array::from_fn(|i| {
        let e = b.exps()[i];
        forms::cubic_basis().index(&[0, e[0] + 1, e[1], e[2]])
    })
}

fn slot_of(e: [u8; 4]) -> usize {
    forms::cubic_basis().index(&e)
}

/// F = X·Q₁ + Y·Q₂ from coefficient codes in monomial-basis order.
pub fn xq1_yq2(field: &Arc<Field>, q1: &[u32; 10], q2: &[u32; 6]) -> Option<CubicSurface> {
    let mut c = [0u32; 20];
    for (slot, v) in xq1_slots().into_iter().zip(q1) {
        c[slot] = *v;
    }
    for (slot, v) in yq2_slots().into_iter().zip(q2) {
        c[slot] = *v;
    }
    CubicSurface::from_codes(field.clone(), &c).ok()
}

fn digits<const N: usize>(mut index: u64, q: u64) -> [u32; N] {
    std::array::from_fn(|_| {
        let d = (index % q) as u32;
        index /= q;
        d
    })
}

impl Family {
    pub fn id(&self) -> String {
        match self {
            Family::F2 => "f2".into(),
            Family::F3Family(i) => format!("f3-family-{}", i.as_str()),
            Family::F3Superset => "f3-superset".into(),
            Family::F3Full => "f3-full".into(),
        }
    }

    pub fn q(&self) -> u32 {
        match self {
            Family::F2 => 2,
            _ => 3,
        }
    }

    pub fn total(&self) -> u64 {
        match self {
            Family::F2 => 1 << 16,
            Family::F3Family(_) => 3u64.pow(7),
            Family::F3Superset => 3u64.pow(10),
            Family::F3Full => 3u64.pow(16),
        }
    }

    pub fn field(&self) -> Arc<Field> {
        Arc::new(Field::prime(self.q()).expect("supported prime"))
    }

    /// The model with the given index, or `None` for the zero form.
    pub fn model(&self, field: &Arc<Field>, index: u64) -> Option<CubicSurface> {
        match self {
            Family::F2 | Family::F3Full => {
                let d: [u32; 16] = digits(index, self.q() as u64);
                xq1_yq2(
                    field,
                    d[..10].try_into().unwrap(),
                    d[10..].try_into().unwrap(),
                )
            }
            Family::F3Superset => {
                let d: [u32; 10] = digits(index, 3);
                xq1_yq2(field, &d, &[0, 1, 0, 1, 0, 0])
            }
            Family::F3Family(interp) => {
                let [a, b, c, d, e, f, g]: [u32; 7] = digits(index, 3);
                let mut co = [0u32; 20];
                co[slot_of([3, 0, 0, 0])] = a;
                co[slot_of([2, 1, 0, 0])] = b;
                co[slot_of([2, 0, 1, 0])] = c;
                co[slot_of([1, 2, 0, 0])] = d;
                if *interp == Interpretation::EYW {
                    co[slot_of([1, 1, 0, 1])] = e;
                }
                co[slot_of([1, 0, 2, 0])] = f;
                co[slot_of([1, 0, 0, 2])] = g;
                co[slot_of([0, 2, 1, 0])] = 1;
                co[slot_of([0, 1, 2, 0])] = 1;
                CubicSurface::from_codes(field.clone(), &co).ok()
            }
        }
    }
}

/// How often a check applied and how often it held, counted per surface.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckTally {
    pub applicable: u64,
    pub passed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub index: u64,
    pub surface: String,
    pub diagnostics: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub family: String,
    pub q: u32,
    /// Models (or sampling attempts) examined.
    pub total: u64,
    pub smooth: u64,
    pub singular: u64,
    /// Smooth models meeting the hypothesis under test.
    pub eligible: u64,
    pub verified: u64,
    pub counterexamples: Vec<Counterexample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub elapsed_ms: u64,
    /// Next unprocessed index of an enumeration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[u64; 2]>,
    #[serde(default)]
    pub buckets: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub checks: BTreeMap<String, CheckTally>,
}

impl CensusReport {
    fn empty(family: String, q: u32) -> CensusReport {
        CensusReport {
            family,
            q,
            total: 0,
            smooth: 0,
            singular: 0,
            eligible: 0,
            verified: 0,
            counterexamples: Vec::new(),
            seed: None,
            elapsed_ms: 0,
            checkpoint: None,
            range: None,
            buckets: BTreeMap::new(),
            checks: BTreeMap::new(),
        }
    }

    pub fn has_counterexamples(&self) -> bool {
        !self.counterexamples.is_empty()
    }

    pub fn bucket(&self, key: &str) -> u64 {
        self.buckets.get(key).copied().unwrap_or(0)
    }

    /// The report with wall-clock time zeroed, for comparing runs.
    pub fn without_timing(&self) -> CensusReport {
        CensusReport {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    /// Append the report of the index range that immediately follows.
    pub fn merge(mut self, next: CensusReport) -> CensusReport {
        self.total += next.total;
        self.smooth += next.smooth;
        self.singular += next.singular;
        self.eligible += next.eligible;
        self.verified += next.verified;
        self.counterexamples.extend(next.counterexamples);
        self.elapsed_ms += next.elapsed_ms;
        self.checkpoint = next.checkpoint.or(self.checkpoint);
        self.range = match (self.range, next.range) {
            (Some([a, _]), Some([_, d])) => Some([a, d]),
            (a, b) => a.or(b),
        };
        for (k, v) in next.buckets {
            *self.buckets.entry(k).or_default() += v;
        }
        for (k, v) in next.checks {
            let t = self.checks.entry(k).or_default();
            t.applicable += v.applicable;
            t.passed += v.passed;
        }
        self
    }

    fn absorb(&mut self, index: u64, o: Outcome) {
        self.total += 1;
        if !o.smooth {
            self.singular += 1;
            return;
        }
        self.smooth += 1;
        self.eligible += u64::from(o.eligible);
        self.verified += u64::from(o.verified);
        for b in o.buckets {
            *self.buckets.entry(b).or_default() += 1;
        }
        for (k, ok) in o.checks {
            let t = self.checks.entry(k.to_string()).or_default();
            t.applicable += 1;
            t.passed += u64::from(ok);
        }
        if let Some((surface, diagnostics)) = o.failure {
            self.counterexamples.push(Counterexample {
                index,
                surface,
                diagnostics,
            });
        }
    }
}

/// Result of evaluating one model.
#[derive(Default)]
struct Outcome {
    smooth: bool,
    eligible: bool,
    verified: bool,
    buckets: Vec<String>,
    checks: Vec<(&'static str, bool)>,
    failure: Option<(String, Value)>,
}

impl Outcome {
    fn singular() -> Outcome {
        Outcome::default()
    }

    fn smooth() -> Outcome {
        Outcome {
            smooth: true,
            ..Outcome::default()
        }
    }

    fn bucket(&mut self, b: impl Into<String>) {
        self.buckets.push(b.into());
    }

    /// Record a failure, unless the strict smoothness re-check shows the
    /// surface is in fact singular.
    fn fail(&mut self, s: &CubicSurface, diagnostics: Value) {
        if s.is_smooth_strict(StrictBudget::default()) {
            self.failure = Some((s.to_string(), diagnostics));
        } else {
            self.bucket("strict-check-singular");
        }
    }
}

/// Run-time knobs for enumerations.
#[derive(Clone, Debug)]
pub struct CensusOptions {
    /// 1 runs on the calling thread, 0 uses every core.
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    /// Models between checkpoint writes.
    pub stride: u64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            workers: parallel::ALL_CORES,
            checkpoint: None,
            stride: 1 << 12,
        }
    }
}

fn read_checkpoint(path: &Path) -> Result<Option<CensusReport>, CensusError> {
    match fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|_| CensusError::CheckpointMismatch(path.to_path_buf())),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(source) => Err(CensusError::Checkpoint {
            path: path.to_path_buf(),
            source,
        }),
    }
}

fn write_checkpoint(path: &Path, r: &CensusReport) -> Result<(), CensusError> {
    let io_err = |source| CensusError::Checkpoint {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec_pretty(r).expect("serializable")).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

/// Enumerate `range` of a family, resuming from a checkpoint if one matches.
pub fn run_census(
    family: Family,
    range: Range<u64>,
    opts: &CensusOptions,
) -> Result<CensusReport, CensusError> {
    if range.start > range.end || range.end > family.total() {
        return Err(CensusError::Range(range.start, range.end, family.total()));
    }
    let field = family.field();
    let mut report = CensusReport::empty(family.id(), family.q());
    report.range = Some([range.start, range.end]);
    report.checkpoint = Some(range.start);
    if let Some(path) = &opts.checkpoint {
        if let Some(saved) = read_checkpoint(path)? {
            let ok = saved.family == report.family
                && saved.range == report.range
                && saved
                    .checkpoint
                    .is_some_and(|c| range.contains(&c) || c == range.end);
            if !ok {
                return Err(CensusError::CheckpointMismatch(path.clone()));
            }
            report = saved;
        }
    }
    let stride = opts.stride.max(1);
    let mut cursor = report.checkpoint.unwrap_or(range.start);
    while cursor < range.end {
        let start = Instant::now();
        let end = (cursor + stride).min(range.end);
        let outcomes = parallel::map_range(cursor..end, opts.workers, |i| {
            evaluate_model(family, &field, i)
        });
        for (i, o) in (cursor..end).zip(outcomes) {
            report.absorb(i, o);
        }
        cursor = end;
        report.checkpoint = Some(cursor);
        report.elapsed_ms += start.elapsed().as_millis() as u64;
        if let Some(path) = &opts.checkpoint {
            write_checkpoint(path, &report)?;
        }
    }
    Ok(report)
}

fn run_full(family: Family) -> CensusReport {
    run_census(family, 0..family.total(), &CensusOptions::default())
        .expect("no checkpoint, full range")
}

/// Every X·Q₁ + Y·Q₂ over F₂; checks that an Eckardt-free ℓ carries a generator.
pub fn census_f2() -> CensusReport {
    run_full(Family::F2)
}

/// The 3⁷ models of the F₃ normal form.
pub fn census_f3_family(interp: Interpretation) -> CensusReport {
    run_full(Family::F3Family(interp))
}

/// The 3¹⁰ models with Q₂ = YZ + Z².
pub fn census_f3_superset() -> CensusReport {
    run_full(Family::F3Superset)
}

/// All 3¹⁶ models over F₃. Takes hours; pass a checkpoint to make it resumable.
pub fn census_f3_full(opts: &CensusOptions) -> Result<CensusReport, CensusError> {
    run_census(Family::F3Full, 0..Family::F3Full.total(), opts)
}

fn evaluate_model(family: Family, field: &Arc<Field>, index: u64) -> Outcome {
    let Some(s) = family.model(field, index) else {
        return Outcome::singular();
    };
    if !s.is_smooth() {
        return Outcome::singular();
    }
    match family {
        Family::F2 => f2_outcome(&s),
        _ => f3_outcome(&s),
    }
}

fn point_strings(pts: &[Point]) -> Vec<String> {
    pts.iter().map(|p| p.to_string()).collect()
}

/// Span size of each point of ℓ(K), with its Eckardt flag.
fn line_profile(g: &Geometry, line: usize) -> Value {
    let rows: Vec<Value> = g.on_line[line]
        .iter()
        .map(|&i| {
            json!({
                "point": g.point(i).to_string(),
                "eckardt": g.is_eckardt(i),
                "span_size": g.ctx.span_size(&[i]),
            })
        })
        .collect();
    json!(rows)
}

fn f2_outcome(s: &CubicSurface) -> Outcome {
    let mut o = Outcome::smooth();
    let g = Geometry::new(s);
    let l = g.base_line();
    let eck = g.eckardt_on(l);
    let gen = g.on_line[l].iter().any(|&i| g.ctx.is_generator(i));
    if gen {
        o.bucket("generator-on-line");
    }
    if eck.is_empty() {
        o.eligible = true;
        o.bucket("eckardt-free-line");
        o.verified = gen;
        if !gen {
            o.fail(
                s,
                json!({ "points": g.ctx.len(), "line": line_profile(&g, l) }),
            );
        }
    } else {
        o.bucket("eckardt-on-line");
        o.bucket(if gen {
            "eckardt-on-line-generator"
        } else {
            "eckardt-on-line-no-generator"
        });
    }
    o
}

fn f3_outcome(s: &CubicSurface) -> Outcome {
    let mut o = Outcome::smooth();
    let g = Geometry::new(s);
    let l = g.base_line();
    let eck = g.eckardt_on(l);
    let skew = g.skew_to(l);
    let gen = g.on_line[l]
        .iter()
        .any(|&i| !g.is_eckardt(i) && g.ctx.is_generator(i));
    o.bucket(format!("eckardt-on-line-{}", eck.len()));
    o.bucket(if skew.is_empty() {
        "no-skew-line"
    } else {
        "skew-line"
    });
    let tag = if gen { "generator" } else { "no-generator" };
    o.bucket(format!(
        "{}-eckardt-{}-{tag}",
        eck.len(),
        if skew.is_empty() { "no-skew" } else { "skew" }
    ));
    if !gen {
        o.bucket(if eck.len() >= 2 {
            "failure-second-eckardt"
        } else {
            "failure-without-second-eckardt"
        });
    }
    if eck.len() == 1 && !skew.is_empty() {
        o.eligible = true;
        o.verified = gen;
        if !gen {
            o.fail(
                s,
                json!({
                    "points": g.ctx.len(),
                    "eckardt_on_line": point_strings(&eck.iter().map(|&i| g.point(i)).collect::<Vec<_>>()),
                    "line": line_profile(&g, l),
                }),
            );
        }
    }
    o
}

// ---------------------------------------------------------------------------
// Sampled runs.

/// GF(q) for a supported prime power q.
pub fn field_of_size(q: u32) -> Result<Arc<Field>, CensusError> {
    for p in SUPPORTED_PRIMES {
        let mut k = 1;
        let mut n = p;
        while n < q {
            n = n.saturating_mul(p);
            k += 1;
        }
        if n == q {
            return Field::new(p, k)
                .map(Arc::new)
                .map_err(|_| CensusError::UnsupportedField(q));
        }
    }
    Err(CensusError::UnsupportedField(q))
}

/// Field sizes accepted by [`verify_main_theorem`].
pub const THEOREM_FIELDS: [u32; 6] = [4, 5, 7, 8, 9, 11];
/// Field sizes accepted by [`lemma_suite`].
pub const SUITE_FIELDS: [u32; 8] = [2, 3, 4, 5, 7, 8, 9, 11];

/// Attempts evaluated per batch; fixed so results do not depend on workers.
const BATCH: u64 = 64;
/// Give up after this many attempts per requested sample.
const ATTEMPTS_PER_SAMPLE: u64 = 500;

/// Random X·Q₁ + Y·Q₂ for attempt `i`: ChaCha8 keyed by the seed, one
/// stream per attempt.
pub fn sample_surface(field: &Arc<Field>, seed: u64, attempt: u64) -> Option<CubicSurface> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt);
    let q = field.q();
    let q1: [u32; 10] = std::array::from_fn(|_| rng.random_range(0..q));
    let q2: [u32; 6] = std::array::from_fn(|_| rng.random_range(0..q));
    xq1_yq2(field, &q1, &q2)
}

/// Evaluate attempts until `n` are eligible, in attempt order.
fn sample_run<F>(
    family: String,
    field: &Arc<Field>,
    n: u64,
    seed: u64,
    workers: usize,
    eval: F,
) -> CensusReport
where
    F: Fn(&CubicSurface) -> Outcome + Sync + Send,
{
    let start = Instant::now();
    let mut report = CensusReport::empty(family, field.q());
    report.seed = Some(seed);
    let limit = n.saturating_mul(ATTEMPTS_PER_SAMPLE).max(BATCH);
    let mut next = 0;
    while report.eligible < n && next < limit {
        let end = (next + BATCH).min(limit);
        let outcomes = parallel::map_range(next..end, workers, |i| {
            match sample_surface(field, seed, i) {
                Some(s) if s.is_smooth() => eval(&s),
                _ => Outcome::singular(),
            }
        });
        for (i, o) in (next..end).zip(outcomes) {
            if report.eligible == n {
                break;
            }
            report.absorb(i, o);
        }
        next = end;
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

/// Sample smooth surfaces containing ℓ that also contain a K-line skew to
/// ℓ, and check that every non-Eckardt K-point on ℓ or on a skew K-line
/// generates S(K).
pub fn verify_main_theorem(
    q: u32,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<CensusReport, CensusError> {
    if !THEOREM_FIELDS.contains(&q) {
        return Err(CensusError::UnsupportedField(q));
    }
    let field = field_of_size(q)?;
    Ok(sample_run(
        format!("main-theorem-q{q}"),
        &field,
        n,
        seed,
        workers,
        |s| {
            let mut o = Outcome::smooth();
            let g = Geometry::new(s);
            let l = g.base_line();
            let skew = g.skew_to(l);
            if skew.is_empty() {
                o.bucket("no-skew-line");
                return o;
            }
            o.eligible = true;
            let mut bad = Vec::new();
            let mut tested = 0;
            for &m in std::iter::once(&l).chain(&skew) {
                for &i in &g.on_line[m] {
                    if g.is_eckardt(i) {
                        continue;
                    }
                    tested += 1;
                    let size = g.ctx.span_size(&[i]);
                    if size != g.ctx.len() {
                        bad.push(json!({ "line": g.lines[m].to_string(), "point": g.point(i).to_string(), "span_size": size }));
                    }
                }
            }
            o.bucket(format!("skew-lines-{}", skew.len()));
            if tested == 0 {
                o.bucket("no-non-eckardt-point");
            }
            o.verified = bad.is_empty();
            if !bad.is_empty() {
                o.fail(s, json!({ "points": g.ctx.len(), "failures": bad }));
            }
            o
        },
    ))
}

/// Sample `n` smooth surfaces containing ℓ and run every structural check
/// whose hypotheses hold on them. A surface counts as verified when all
/// applicable checks pass.
pub fn lemma_suite(q: u32, n: u64, seed: u64, workers: usize) -> Result<CensusReport, CensusError> {
    if !SUITE_FIELDS.contains(&q) {
        return Err(CensusError::UnsupportedField(q));
    }
    let field = field_of_size(q)?;
    Ok(sample_run(
        format!("lemma-suite-q{q}"),
        &field,
        n,
        seed,
        workers,
        |s| {
            let mut o = Outcome::smooth();
            o.eligible = true;
            let g = Geometry::new(s);
            let mut failures = Vec::new();
            for (name, ok, diag) in suite_checks(&g) {
                o.checks.push((name, ok));
                if !ok {
                    failures.push(json!({ "check": name, "detail": diag }));
                }
            }
            o.bucket(format!("k-lines-{}", g.lines.len()));
            o.buckets.extend(parabolic_buckets(&g));
            o.verified = failures.is_empty();
            if !failures.is_empty() {
                o.fail(s, json!(failures));
            }
            o
        },
    ))
}

// ---------------------------------------------------------------------------
// Shared geometry of one smooth surface.

struct Geometry<'a> {
    s: &'a CubicSurface,
    ctx: SpanContext,
    lines: Vec<Line>,
    /// Indices of ℓ(K) for each K-line.
    on_line: Vec<Vec<u32>>,
    /// Classification of every point on some K-line.
    class: HashMap<u32, PointClass>,
}

impl<'a> Geometry<'a> {
    fn new(s: &'a CubicSurface) -> Geometry<'a> {
        let f = s.field();
        let ctx = SpanContext::new(s);
        let mut lines = s.k_lines_on_surface();
        let base = base_line(f);
        if !lines.contains(&base) {
            lines.push(base);
        }
        let on_line: Vec<Vec<u32>> = lines
            .iter()
            .map(|l| {
                let mut v = ctx.indices_of(&l.points(f)).expect("line lies on S");
                v.sort_unstable();
                v
            })
            .collect();
        let mut class = HashMap::new();
        for &i in on_line.iter().flatten() {
            class.entry(i).or_insert_with(|| {
                s.classify_point(&ctx.points()[i as usize])
                    .expect("smooth point")
            });
        }
        Geometry {
            s,
            ctx,
            lines,
            on_line,
            class,
        }
    }

    fn f(&self) -> &Field {
        self.s.field()
    }

    fn point(&self, i: u32) -> Point {
        self.ctx.points()[i as usize]
    }

    fn base_line(&self) -> usize {
        let b = base_line(self.f());
        self.lines
            .iter()
            .position(|l| *l == b)
            .expect("ℓ is on every model")
    }

    fn is_eckardt(&self, i: u32) -> bool {
        self.class[&i].kind == PointKind::Eckardt
    }

    fn lines_through(&self, i: u32) -> usize {
        self.class[&i].lines_through
    }

    fn eckardt_on(&self, l: usize) -> Vec<u32> {
        self.on_line[l]
            .iter()
            .copied()
            .filter(|&i| self.is_eckardt(i))
            .collect()
    }

    fn skew_to(&self, l: usize) -> Vec<usize> {
        (0..self.lines.len())
            .filter(|&m| proj::are_skew(self.f(), &self.lines[l], &self.lines[m]))
            .collect()
    }

    fn skew_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.lines.len();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| proj::are_skew(self.f(), &self.lines[a], &self.lines[b]))
            .collect()
    }

    /// Γ_P(K): points of S in the tangent plane at P.
    fn gamma(&self, i: u32) -> Vec<u32> {
        let plane = self.s.tangent_plane(&self.point(i)).expect("smooth point");
        (0..self.ctx.len() as u32)
            .filter(|&j| plane.contains(self.f(), &self.point(j)))
            .collect()
    }

    /// Π_P · ℓ′ for a line not in the tangent plane at P.
    fn pierce(&self, i: u32, m: usize) -> Option<u32> {
        let plane = self.s.tangent_plane(&self.point(i)).expect("smooth point");
        match proj::meet_plane_line(self.f(), &plane, &self.lines[m]) {
            Meet::Point(p) => self.ctx.index_of(&p),
            Meet::Contained => None,
        }
    }

    fn line_span(&self, ls: &[usize]) -> FixedBitSet {
        let seeds: Vec<u32> = ls
            .iter()
            .flat_map(|&l| self.on_line[l].iter().copied())
            .collect();
        self.ctx.closure(&seeds)
    }

    /// Non-Eckardt with Γ_P = ℓ ∪ (irreducible conic).
    fn isolated(&self, i: u32) -> bool {
        !self.is_eckardt(i) && self.lines_through(i) == 1
    }
}

fn contains_all(set: &FixedBitSet, idx: &[u32]) -> bool {
    idx.iter().all(|&i| set.contains(i as usize))
}

type CheckResult = (&'static str, bool, Value);

/// Accumulates instances of one check on one surface.
struct Check {
    name: &'static str,
    seen: bool,
    bad: Vec<Value>,
}

impl Check {
    fn new(name: &'static str) -> Check {
        Check {
            name,
            seen: false,
            bad: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.seen = true;
        if !ok {
            self.bad.push(detail());
        }
    }

    fn finish(self, out: &mut Vec<CheckResult>) {
        if self.seen {
            let ok = self.bad.is_empty();
            out.push((self.name, ok, json!(self.bad)));
        }
    }
}

/// Per-line parabolic counts: 2, 1, or every point (`None`).
fn parabolic_buckets(g: &Geometry) -> Vec<String> {
    g.lines
        .iter()
        .map(|l| {
            match g
                .s
                .gauss_on_line(l)
                .expect("line on S")
                .parabolic_count(g.s)
            {
                Some(n) => format!("line-parabolic-{n}"),
                None => "line-parabolic-all".to_string(),
            }
        })
        .collect()
}

fn suite_checks(g: &Geometry) -> Vec<CheckResult> {
    let f = g.f();
    let q = f.q();
    let n = g.ctx.len();
    let mut out = Vec::new();
    let pairs = g.skew_pairs();
    let ordered: Vec<(usize, usize)> = pairs.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();

    // Parabolic points on every K-line.
    let mut c = Check::new("line-parabolic-count");
    for (li, l) in g.lines.iter().enumerate() {
        let gauss = g.s.gauss_on_line(l).expect("line on S");
        let count = gauss.parabolic_count(g.s);
        let ok = match (f.p(), count) {
            (2, Some(1)) => true,
            (2, None) => gauss.eckardt_count(g.s) == 5,
            (_, Some(2)) => true,
            _ => false,
        };
        c.record(
            ok,
            || json!({ "line": g.lines[li].to_string(), "parabolic": count }),
        );
    }
    c.finish(&mut out);

    if q >= 4 {
        let mut iso = Check::new("gamma-in-span-isolated-point");
        let mut non = Check::new("gamma-in-span-non-eckardt");
        for (li, pts) in g.on_line.iter().enumerate() {
            for &p in pts {
                if g.is_eckardt(p) {
                    continue;
                }
                let gamma = g.gamma(p);
                let span = g.ctx.closure(&[p]);
                let ok = contains_all(&span, &gamma) && pts.iter().all(|i| gamma.contains(i));
                let detail =
                    || json!({ "line": g.lines[li].to_string(), "point": g.point(p).to_string() });
                if g.isolated(p) {
                    iso.record(ok, detail);
                }
                non.record(ok, detail);
            }
        }
        iso.finish(&mut out);
        non.finish(&mut out);

        let mut pierce = Check::new("skew-line-via-pierce-point");
        for &(a, b) in &ordered {
            let hyp = g.on_line[a]
                .iter()
                .any(|&p| !g.is_eckardt(p) && g.pierce(p, b).is_some_and(|e| !g.is_eckardt(e)));
            if hyp {
                let ok = contains_all(&g.line_span(&[a]), &g.on_line[b]);
                pierce.record(
                    ok,
                    || json!({ "from": g.lines[a].to_string(), "to": g.lines[b].to_string() }),
                );
            }
        }
        pierce.finish(&mut out);
    }

    let mut conic = Check::new("conic-pierce-point-not-eckardt");
    for &(a, b) in &ordered {
        for &p in &g.on_line[a] {
            if g.isolated(p) {
                let e = g.pierce(p, b);
                let ok = e.is_some_and(|e| !g.is_eckardt(e));
                conic.record(
                    ok,
                    || json!({ "point": g.point(p).to_string(), "other": g.lines[b].to_string() }),
                );
            }
        }
    }
    conic.finish(&mut out);

    if q >= 7 && f.p() != 2 {
        let mut c = Check::new("skew-line-in-line-span-odd");
        for &(a, b) in &ordered {
            let ok = contains_all(&g.line_span(&[a]), &g.on_line[b]);
            c.record(
                ok,
                || json!({ "from": g.lines[a].to_string(), "to": g.lines[b].to_string() }),
            );
        }
        c.finish(&mut out);
    }

    if [4, 5, 8].contains(&q) && !pairs.is_empty() {
        let ok = ordered
            .iter()
            .any(|&(a, b)| contains_all(&g.line_span(&[a]), &g.on_line[b]));
        let mut c = Check::new("skew-pair-in-span-small-fields");
        c.record(ok, || json!({ "skew_pairs": pairs.len() }));
        c.finish(&mut out);
    }

    if q >= 4 {
        let mut two = Check::new("two-line-span-is-everything");
        let mut single = Check::new("single-point-generator");
        for &(a, b) in &pairs {
            let has_plain = g.on_line[a]
                .iter()
                .chain(&g.on_line[b])
                .any(|&p| !g.is_eckardt(p));
            if q != 4 || has_plain {
                let ok = g.line_span(&[a, b]).count_ones(..) == n;
                two.record(
                    ok,
                    || json!({ "lines": [g.lines[a].to_string(), g.lines[b].to_string()] }),
                );
            }
            for &p in g.on_line[a].iter().chain(&g.on_line[b]) {
                if !g.is_eckardt(p) {
                    let size = g.ctx.span_size(&[p]);
                    single.record(
                        size == n,
                        || json!({ "point": g.point(p).to_string(), "span_size": size }),
                    );
                }
            }
        }
        two.finish(&mut out);
        single.finish(&mut out);
    }

    if q == 3 {
        f3_checks(g, &pairs, &ordered, &mut out);
    }

    if q == 2 {
        let mut c = Check::new("f2-eckardt-free-line-generator");
        for (li, pts) in g.on_line.iter().enumerate() {
            if pts.iter().all(|&p| !g.is_eckardt(p)) {
                let ok = pts.iter().any(|&p| g.ctx.is_generator(p));
                c.record(ok, || json!({ "line": g.lines[li].to_string() }));
            }
        }
        c.finish(&mut out);
    }
    out
}

fn f3_checks(
    g: &Geometry,
    pairs: &[(usize, usize)],
    ordered: &[(usize, usize)],
    out: &mut Vec<CheckResult>,
) {
    let n = g.ctx.len();
    let eck_free = |l: usize| g.on_line[l].iter().all(|&p| !g.is_eckardt(p));
    let gamma_ok = |l: usize, p: u32| {
        let gamma = g.gamma(p);
        contains_all(&g.ctx.closure(&[p]), &gamma) && g.on_line[l].iter().all(|i| gamma.contains(i))
    };

    let mut c = Check::new("f3-line-has-four-points");
    for (li, pts) in g.on_line.iter().enumerate() {
        c.record(
            pts.len() == 4,
            || json!({ "line": g.lines[li].to_string(), "points": pts.len() }),
        );
    }
    c.finish(out);

    let mut c = Check::new("f3-gamma-in-span-isolated");
    for (li, pts) in g.on_line.iter().enumerate() {
        if !eck_free(li) {
            continue;
        }
        for &p in pts {
            if g.lines_through(p) == 1 {
                c.record(
                    gamma_ok(li, p),
                    || json!({ "point": g.point(p).to_string() }),
                );
            }
        }
    }
    c.finish(out);

    let mut unique = Check::new("f3-unique-eckardt-generator");
    let mut some = Check::new("f3-some-gamma-in-span");
    let mut skew = Check::new("f3-skew-line-in-line-span");
    for &(a, b) in ordered {
        let ecks = g.on_line[a].iter().filter(|&&p| g.is_eckardt(p)).count();
        if ecks == 1 {
            let ok = g.on_line[a]
                .iter()
                .any(|&p| !g.is_eckardt(p) && g.ctx.is_generator(p));
            unique.record(ok, || json!({ "line": g.lines[a].to_string() }));
        }
        if eck_free(a) && eck_free(b) {
            let ok = g.on_line[a].iter().any(|&p| gamma_ok(a, p));
            some.record(ok, || json!({ "line": g.lines[a].to_string() }));
            let ok = contains_all(&g.line_span(&[a]), &g.on_line[b]);
            skew.record(
                ok,
                || json!({ "from": g.lines[a].to_string(), "to": g.lines[b].to_string() }),
            );
        }
    }
    unique.finish(out);
    some.finish(out);
    skew.finish(out);

    let mut two = Check::new("f3-two-line-span");
    let mut gen = Check::new("f3-skew-pair-generator");
    for &(a, b) in pairs {
        if eck_free(a) && eck_free(b) {
            let ok = g.line_span(&[a, b]).count_ones(..) == n;
            two.record(
                ok,
                || json!({ "lines": [g.lines[a].to_string(), g.lines[b].to_string()] }),
            );
        }
        let at_most_one = |l: usize| g.on_line[l].iter().filter(|&&p| g.is_eckardt(p)).count() <= 1;
        if at_most_one(a) && at_most_one(b) {
            let ok = g.on_line[a]
                .iter()
                .chain(&g.on_line[b])
                .any(|&p| g.ctx.is_generator(p));
            gen.record(
                ok,
                || json!({ "lines": [g.lines[a].to_string(), g.lines[b].to_string()] }),
            );
        }
    }
    two.finish(out);
    gen.finish(out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_layouts() {
        let f2 = Family::F2.field();
        // Digit 0 is X³ (X·X²), digit 10 is Y³ (Y·Y²).
        let s = Family::F2.model(&f2, 1 | 1 << 10).unwrap();
        assert_eq!(s.coeffs()[0], FieldElem::ONE);
        assert_eq!(s.coeffs()[10], FieldElem::ONE);
        assert_eq!(s.coeffs().iter().filter(|c| !c.is_zero()).count(), 2);
        assert!(Family::F2.model(&f2, 0).is_none());

        let f3 = Family::F3Superset.field();
        for interp in [Interpretation::Printed, Interpretation::EYW] {
            let fam = Family::F3Family(interp);
            for i in (0..fam.total()).step_by(37) {
                let s = fam.model(&f3, i).unwrap();
                assert!(s.line_on_surface(&base_line(&f3)));
                // Every family model is a superset model.
                let mut idx = 0u64;
                for (k, slot) in xq1_slots().iter().enumerate() {
                    idx += s.coeffs()[*slot].0 as u64 * 3u64.pow(k as u32);
                }
                assert_eq!(Family::F3Superset.model(&f3, idx).unwrap(), s);
            }
        }
        // The printed reading ignores e.
        let fam = Family::F3Family(Interpretation::Printed);
        assert_eq!(fam.model(&f3, 0), fam.model(&f3, 81));
        let fam = Family::F3Family(Interpretation::EYW);
        assert_ne!(fam.model(&f3, 0), fam.model(&f3, 81));
    }

    #[test]
    fn field_sizes() {
        for q in SUITE_FIELDS {
            assert_eq!(field_of_size(q).unwrap().q(), q);
        }
        assert!(field_of_size(6).is_err());
        assert!(verify_main_theorem(3, 1, 0, 1).is_err());
    }

    #[test]
    fn ranges_merge_and_resume() {
        let opts = CensusOptions {
            workers: 1,
            checkpoint: None,
            stride: 100,
        };
        let whole = run_census(Family::F2, 0..600, &opts).unwrap();
        let a = run_census(Family::F2, 0..250, &opts).unwrap();
        let b = run_census(Family::F2, 250..600, &opts).unwrap();
        assert_eq!(a.merge(b).without_timing(), whole.without_timing());
        let par = run_census(
            Family::F2,
            0..600,
            &CensusOptions {
                workers: 3,
                ..opts.clone()
            },
        )
        .unwrap();
        assert_eq!(par.without_timing(), whole.without_timing());
        assert_eq!(whole.total, whole.smooth + whole.singular);

        let dir = std::env::temp_dir().join(format!("census-ckpt-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("f2.json");
        let _ = fs::remove_file(&path);
        let with_ckpt = CensusOptions {
            checkpoint: Some(path.clone()),
            ..opts.clone()
        };
        // Simulate an interrupted run: a checkpoint covering only part of the range.
        let mut partial = run_census(Family::F2, 0..200, &opts).unwrap();
        partial.range = Some([0, 600]);
        write_checkpoint(&path, &partial).unwrap();
        let resumed = run_census(Family::F2, 0..600, &with_ckpt).unwrap();
        assert_eq!(resumed.without_timing(), whole.without_timing());
        assert!(run_census(Family::F3Superset, 0..600, &with_ckpt).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = verify_main_theorem(5, 3, 11, 1).unwrap();
        let b = verify_main_theorem(5, 3, 11, 4).unwrap();
        assert_eq!(a.without_timing(), b.without_timing());
        assert_eq!(a.eligible, 3);
        assert!(!a.has_counterexamples());
        let s = lemma_suite(3, 4, 2, 2).unwrap();
        assert_eq!(s.eligible, 4);
        assert_eq!(s.checks["line-parabolic-count"].applicable, 4);
    }
}

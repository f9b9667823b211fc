//! The verify-paper suite: every acceptance check, with machine-readable results.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::exactalg::FieldCtx;
use crate::families::{kaneyama_normalized_splitting, random_c1_zero, FamilySpec};
use crate::groupact::{
    invariance_report, invariant_under, transitive_witness, GeomObject, InvarianceVerdict, Subgroup,
};
use crate::jumploci::{scan, theorem61_check, Classification, ScanMode, Theorem61};
use crate::presentation::{Colength, Presentation, Stability};
use crate::projgeom::{enumerate_lines, incidence, random_line, LineP2, PointP2};
use crate::splitting::{restrict, splitting_on, splitting_type, splitting_type_h0, SplittingType};

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub quick: bool,
    pub seed: u64,
    /// Id of a check whose expectations are deliberately corrupted, to exercise the
    /// failure path of the harness.
    pub mutate: Option<String>,
    pub timings: bool,
}

impl SuiteOptions {
    fn mutated(&self, id: &str) -> bool {
        self.mutate.as_deref() == Some(id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub command: &'static str,
    pub quick: bool,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

pub struct Check {
    pub id: &'static str,
    pub title: &'static str,
    /// Target wall-clock time for the full (non-quick) run.
    pub limit_seconds: f64,
    run: fn(&SuiteOptions) -> (bool, Value),
}

impl Check {
    pub fn run(&self, opts: &SuiteOptions) -> CheckResult {
        let start = Instant::now();
        let (passed, detail) = (self.run)(opts);
        CheckResult {
            id: self.id,
            title: self.title,
            passed,
            detail,
            seconds: opts.timings.then(|| start.elapsed().as_secs_f64()),
        }
    }
}

pub const CHECKS: [Check; 11] = [
    Check {
        id: "tangent-uniform",
        title: "E_1 splits as (1,0) on all 31 lines of F_5",
        limit_seconds: 1.0,
        run: tangent_uniform,
    },
    Check {
        id: "stability-ladder",
        title: "E_1 stable, E_2 properly semistable, E_3..E_6 unstable",
        limit_seconds: 1.0,
        run: stability_ladder,
    },
    Check {
        id: "kaneyama-table",
        title: "E(a,b,c), a<=b<=c<=4, matches the closed-form splitting on every line of F_7",
        limit_seconds: 30.0,
        run: kaneyama_table,
    },
    Check {
        id: "e3-jumping-pencil",
        title: "E_3 over F_5 jumps exactly on the 6 lines through (1:0:0), order 1, generic (0,-1)",
        limit_seconds: 2.0,
        run: e3_pencil,
    },
    Check {
        id: "ex61-pencils",
        title: "ex61 bundles: pencil((0:0:1), r) over F_7 and the predicted stability",
        limit_seconds: 10.0,
        run: ex61_pencils,
    },
    Check {
        id: "ex62-pencils",
        title: "ex62 bundles: Chern classes, stability, pencil and zero-scheme colength",
        limit_seconds: 10.0,
        run: ex62_pencils,
    },
    Check {
        id: "borel-invariance",
        title: "E(a,b,c), a<=b<=c<=3, is B-invariant on samples exactly when a=b=1",
        limit_seconds: 60.0,
        run: borel_invariance,
    },
    Check {
        id: "parabolic-invariance",
        title: "E_3 is invariant under G_p((1:0:0)) and B, not under a G_L element moving (1:0:0)",
        limit_seconds: 10.0,
        run: parabolic_invariance,
    },
    Check {
        id: "pencil-theorem",
        title: "no stable c1=0 bundle has a full pencil of jumping lines (catalog(3) and random, F_5)",
        limit_seconds: 120.0,
        run: pencil_theorem,
    },
    Check {
        id: "oracle-equivalence",
        title: "syzygy and cohomology splitting algorithms agree",
        limit_seconds: 60.0,
        run: oracle_equivalence,
    },
    Check {
        id: "determinism",
        title: "seeded checks give identical reports on reruns",
        limit_seconds: 60.0,
        run: determinism,
    },
];

pub fn check_ids() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.id)
}

pub fn find_check(id: &str) -> Option<&'static Check> {
    CHECKS.iter().find(|c| c.id == id)
}

pub fn verify_paper(opts: &SuiteOptions) -> SuiteReport {
    let checks: Vec<CheckResult> = CHECKS.iter().map(|c| c.run(opts)).collect();
    SuiteReport {
        schema: 1,
        command: "verify-paper",
        quick: opts.quick,
        seed: opts.seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

pub fn render_text(report: &SuiteReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let time = c.seconds.map(|s| format!("  {s:.2}s")).unwrap_or_default();
        out.push_str(&format!("{status}  {:<22} {}{time}\n", c.id, c.title));
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!(
        "{} of {} checks passed\n",
        report.checks.len() - failed,
        report.checks.len()
    ));
    out
}

const F5: FieldCtx = FieldCtx::Prime(5);
const F7: FieldCtx = FieldCtx::Prime(7);
const Q: FieldCtx = FieldCtx::Rationals;

fn build(spec: &FamilySpec, ctx: FieldCtx) -> Presentation {
    spec.build(ctx).expect("suite families are valid")
}

fn en(n: i64) -> FamilySpec {
    FamilySpec::En { n }
}

fn kan(a: i64, b: i64, c: i64) -> FamilySpec {
    FamilySpec::Kaneyama { a, b, c }
}

fn pt(ctx: FieldCtx, v: [i64; 3]) -> PointP2 {
    PointP2::from_i64(ctx, v).expect("nonzero")
}

fn ln(ctx: FieldCtx, v: [i64; 3]) -> LineP2 {
    LineP2::from_i64(ctx, v).expect("nonzero")
}

fn class_json(c: &Classification) -> Value {
    serde_json::to_value(c).expect("serializable")
}

fn tangent_uniform(opts: &SuiteOptions) -> (bool, Value) {
    let want = if opts.mutated("tangent-uniform") {
        SplittingType::new(2, -1)
    } else {
        SplittingType::new(1, 0)
    };
    let p = build(&en(1), F5);
    let lines: Vec<LineP2> = enumerate_lines(F5).expect("prime field").collect();
    let bad = lines
        .iter()
        .filter(|l| splitting_on(&p, l).expect("locally free") != want)
        .count();
    let report = scan(&p, ScanMode::Exhaustive).expect("prime field");
    let ok = bad == 0 && lines.len() == 31 && report.classification == Classification::Uniform;
    (
        ok,
        json!({"lines": lines.len(), "mismatches": bad, "classification": class_json(&report.classification)}),
    )
}

fn stability_ladder(opts: &SuiteOptions) -> (bool, Value) {
    let mut ladder = vec![Stability::Stable, Stability::ProperlySemistable];
    ladder.extend([Stability::Unstable; 4]);
    if opts.mutated("stability-ladder") {
        ladder[1] = Stability::Stable;
    }
    let got: Vec<Stability> = (1..=6).map(|n| build(&en(n), Q).stability_class()).collect();
    (got == ladder, json!({"computed": got, "expected": ladder}))
}

fn kaneyama_table(opts: &SuiteOptions) -> (bool, Value) {
    let bound = if opts.quick { 3 } else { 4 };
    let mutated = opts.mutated("kaneyama-table");
    let lines: Vec<LineP2> = enumerate_lines(F7).expect("prime field").collect();
    let mut bundles = 0;
    let mut mismatches = Vec::new();
    for a in 1..=bound {
        for b in a..=bound {
            for c in b..=bound {
                bundles += 1;
                let raw = build(&kan(a, b, c), F7);
                let p = if mutated { raw } else { raw.normalize().0 };
                for l in &lines {
                    let got = splitting_on(&p, l).expect("locally free");
                    let want = kaneyama_normalized_splitting(a, b, c, l);
                    if got != want {
                        mismatches.push(json!({"abc": [a, b, c], "line": l, "computed": got, "closed_form": want}));
                    }
                }
            }
        }
    }
    let first: Vec<Value> = mismatches.iter().take(5).cloned().collect();
    (
        mismatches.is_empty(),
        json!({"bundles": bundles, "lines_each": lines.len(), "mismatches": mismatches.len(), "first_mismatches": first}),
    )
}

fn e3_pencil(opts: &SuiteOptions) -> (bool, Value) {
    let p = build(&en(3), F5);
    let report = scan(&p, ScanMode::Exhaustive).expect("prime field");
    let centre = if opts.mutated("e3-jumping-pencil") {
        pt(F5, [0, 1, 0])
    } else {
        pt(F5, [1, 0, 0])
    };
    let through: Vec<LineP2> = enumerate_lines(F5)
        .expect("prime field")
        .filter(|l| incidence(&centre, l))
        .collect();
    let jump_lines: Vec<LineP2> = report.jumps.iter().map(|j| j.line.clone()).collect();
    let ok = report.generic == SplittingType::new(0, -1)
        && report.jumps.len() == 6
        && report.jumps.iter().all(|j| j.order == 1)
        && jump_lines == through
        && report.classification == Classification::Pencil { point: centre, order: 1 };
    (
        ok,
        json!({"generic": report.generic, "jumps": report.jumps.len(), "classification": class_json(&report.classification)}),
    )
}

fn ex61_pencils(opts: &SuiteOptions) -> (bool, Value) {
    let shift = i64::from(opts.mutated("ex61-pencils"));
    let p0 = pt(F7, [0, 0, 1]);
    let mut ok = true;
    let mut rows = Vec::new();
    for (r, k, c1) in [(1, 0, 0), (2, 1, 0), (1, 1, -1)] {
        let p = build(&FamilySpec::Example61 { r, k, c1, f: None }, F7);
        let report = scan(&p, ScanMode::Exhaustive).expect("prime field");
        let want_class = Classification::Pencil {
            point: p0.clone(),
            order: r + shift,
        };
        let want_stab = if c1 == 0 && k == 0 {
            Stability::ProperlySemistable
        } else {
            Stability::Unstable
        };
        let stab = p.stability_class();
        let row_ok = report.classification == want_class && stab == want_stab;
        ok &= row_ok;
        rows.push(json!({"r": r, "k": k, "c1": c1, "classification": class_json(&report.classification), "stability": stab, "ok": row_ok}));
    }
    (ok, json!({"cases": rows}))
}

fn ex62_pencils(opts: &SuiteOptions) -> (bool, Value) {
    let extra = i64::from(opts.mutated("ex62-pencils"));
    let p0 = pt(F7, [0, 0, 1]);
    let mut ok = true;
    let mut rows = Vec::new();
    for r in [1, 2] {
        let p = build(&FamilySpec::Example62 { r, f: None }, F7);
        let ch = p.chern();
        let stab = p.stability_class();
        let report = scan(&p, ScanMode::Exhaustive).expect("prime field");
        let zs = p
            .section_zero_scheme(&p.canonical_section())
            .expect("canonical section is valid");
        let sq = (r + 1) * (r + 1);
        let row_ok = ch.c1 == -1
            && ch.c2 == sq + extra
            && stab == Stability::Stable
            && report.classification == Classification::Pencil { point: p0.clone(), order: r }
            && zs.colength == Colength::Finite(sq as usize);
        ok &= row_ok;
        rows.push(json!({
            "r": r,
            "chern": ch,
            "stability": stab,
            "classification": class_json(&report.classification),
            "colength": zs.colength,
            "ok": row_ok,
        }));
    }
    (ok, json!({"cases": rows}))
}

fn borel_invariance(opts: &SuiteOptions) -> (bool, Value) {
    let samples = if opts.quick { 10 } else { 20 };
    let mutated = opts.mutated("borel-invariance");
    let group = Subgroup::borel(pt(Q, [0, 0, 1]), ln(Q, [0, 1, 0])).expect("incident flag");
    let mut ok = true;
    let mut rows = Vec::new();
    for a in 1..=3 {
        for b in a..=3 {
            for c in b..=3 {
                let p = build(&kan(a, b, c), Q);
                let report = invariance_report(&p, &group, samples, opts.seed).expect("enough samples");
                let invariant = matches!(report.verdict, InvarianceVerdict::Invariant { sampled: true, .. });
                let want = if mutated { a == 1 } else { a == 1 && b == 1 };
                let t1 = report
                    .transvections
                    .iter()
                    .find(|t| t.name == "(x+y,y,z)")
                    .expect("the transvection lies in B");
                let t1_ok = b == 1 || (!t1.invariant && t1.certified == Some(true));
                let row_ok = invariant == want && t1_ok;
                ok &= row_ok;
                rows.push(json!({"abc": [a, b, c], "invariant": invariant, "transvection": t1, "ok": row_ok}));
            }
        }
    }
    (ok, json!({"group": group.to_string(), "samples": samples, "cases": rows}))
}

fn parabolic_invariance(opts: &SuiteOptions) -> (bool, Value) {
    let samples = if opts.quick { 10 } else { 20 };
    let p = build(&en(3), Q);
    let e1 = pt(Q, [1, 0, 0]);
    let gp = Subgroup::Gp(e1.clone());
    let b = Subgroup::borel(e1.clone(), ln(Q, [0, 0, 1])).expect("incident flag");
    let gl = Subgroup::GL(ln(Q, [0, 0, 1]));
    let rp = invariance_report(&p, &gp, samples, opts.seed).expect("enough samples");
    let rb = invariance_report(&p, &b, samples, opts.seed).expect("enough samples");
    let mover = transitive_witness(&gl, &GeomObject::Point(e1.clone()), &GeomObject::Point(pt(Q, [0, 1, 0])))
        .expect("both points lie on z=0");
    let gl_yes = invariant_under(&p, &mover).is_yes();
    let want_gl = opts.mutated("parabolic-invariance");
    let inv = |v: &InvarianceVerdict| matches!(v, InvarianceVerdict::Invariant { .. });
    let ok = inv(&rp.verdict) && inv(&rb.verdict) && gl_yes == want_gl;
    (
        ok,
        json!({
            "g_p": inv(&rp.verdict),
            "borel": inv(&rb.verdict),
            "g_l_element": mover,
            "g_l_invariant": gl_yes,
        }),
    )
}

fn pencil_theorem(opts: &SuiteOptions) -> (bool, Value) {
    let n_random = if opts.quick { 20 } else { 100 };
    let mut corpus: Vec<(String, Presentation)> = crate::families::catalog(3)
        .into_iter()
        .map(|s| (s.to_string(), build(&s, F5)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for i in 0..n_random {
        corpus.push((format!("random {i}"), random_c1_zero(F5, &mut rng)));
    }
    let verdicts: Vec<Theorem61> = {
        use rayon::prelude::*;
        corpus
            .par_iter()
            .map(|(_, p)| theorem61_check(p, ScanMode::Exhaustive).expect("locally free over F_5"))
            .collect()
    };
    let count = |v: Theorem61| verdicts.iter().filter(|&&x| x == v).count();
    let violations: Vec<&str> = corpus
        .iter()
        .zip(&verdicts)
        .filter(|(_, &v)| v == Theorem61::Violation)
        .map(|((name, _), _)| name.as_str())
        .collect();
    let ok = if opts.mutated("pencil-theorem") {
        count(Theorem61::Vacuous) == 0
    } else {
        violations.is_empty()
    };
    (
        ok,
        json!({
            "bundles": corpus.len(),
            "confirmed": count(Theorem61::Confirmed),
            "vacuous": count(Theorem61::Vacuous),
            "violations": violations,
        }),
    )
}

/// The twelve bundles of the oracle comparison.
pub fn oracle_catalog() -> Vec<FamilySpec> {
    let ex61 = |r, k, c1| FamilySpec::Example61 { r, k, c1, f: None };
    vec![
        en(1),
        en(2),
        en(3),
        kan(1, 1, 2),
        kan(1, 2, 3),
        kan(2, 2, 2),
        FamilySpec::NearlyFree { a: 1, b: 2 },
        ex61(1, 0, 0),
        ex61(2, 1, 0),
        ex61(1, 1, -1),
        FamilySpec::Example62 { r: 1, f: None },
        FamilySpec::Example62 { r: 2, f: None },
    ]
}

fn oracle_equivalence(opts: &SuiteOptions) -> (bool, Value) {
    use rayon::prelude::*;
    let n_rational = if opts.quick { 20 } else { 200 };
    let mutated = opts.mutated("oracle-equivalence");
    let specs = oracle_catalog();
    let compare = |p: &Presentation, lines: &[LineP2]| -> usize {
        lines
            .par_iter()
            .enumerate()
            .filter(|(i, l)| {
                let q = restrict(p, l).expect("locally free");
                let other = if mutated { &lines[(i + 1) % lines.len()] } else { l };
                let q2 = restrict(p, other).expect("locally free");
                splitting_type(&q) != splitting_type_h0(&q2)
            })
            .count()
    };
    let f5_lines: Vec<LineP2> = enumerate_lines(F5).expect("prime field").collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let q_lines: Vec<LineP2> = (0..n_rational).map(|_| random_line(Q, &mut rng)).collect();
    let mut mismatches = 0;
    for s in &specs {
        mismatches += compare(&build(s, F5), &f5_lines);
        mismatches += compare(&build(s, Q), &q_lines);
    }
    (
        mismatches == 0,
        json!({
            "bundles": specs.len(),
            "f5_lines": f5_lines.len(),
            "rational_lines": q_lines.len(),
            "mismatches": mismatches,
        }),
    )
}

fn determinism(opts: &SuiteOptions) -> (bool, Value) {
    let quick = SuiteOptions {
        quick: true,
        seed: opts.seed,
        mutate: None,
        timings: false,
    };
    let seeded = [borel_invariance, pencil_theorem, oracle_equivalence];
    let first: Vec<Value> = seeded.iter().map(|f| f(&quick).1).collect();
    let mut second: Vec<Value> = seeded.iter().map(|f| f(&quick).1).collect();
    if opts.mutated("determinism") {
        second[0] = json!("perturbed");
    }
    let a = serde_json::to_string(&first).expect("serializable");
    let b = serde_json::to_string(&second).expect("serializable");
    (a == b, json!({"reruns": seeded.len(), "identical": a == b}))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique() {
        let mut ids: Vec<&str> = check_ids().collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), CHECKS.len());
    }

    #[test]
    fn mutation_fails_the_named_check_only() {
        let opts = SuiteOptions {
            quick: true,
            mutate: Some("stability-ladder".into()),
            ..Default::default()
        };
        assert!(!find_check("stability-ladder").unwrap().run(&opts).passed);
        assert!(find_check("tangent-uniform").unwrap().run(&opts).passed);
    }
}

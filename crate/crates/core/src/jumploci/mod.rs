//! Whole-plane jumping-line scans and classification of the jumping locus.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::FieldCtx;
use crate::presentation::{Presentation, Stability};
use crate::projgeom::{enumerate_lines, incidence, intersection, random_line, LineP2, PointP2};
use crate::splitting::{order_between, splitting_on, SplittingError, SplittingType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JumpError {
    #[error("exhaustive scans need a prime field, got {0}")]
    ExhaustiveOverRationals(FieldCtx),
    #[error("a scan needs at least one line")]
    EmptyScan,
    #[error(transparent)]
    Splitting(#[from] SplittingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanMode {
    /// Every line of the plane over the prime field.
    Exhaustive,
    /// `n` seeded random lines.
    Sampled { n: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Jump {
    pub line: LineP2,
    pub splitting: SplittingType,
    pub order: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Uniform,
    Pencil { point: PointP2, order: i64 },
    PencilNonconstant { point: PointP2 },
    FiniteSet,
    Other,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::Uniform => "uniform",
            Classification::Pencil { .. } => "pencil",
            Classification::PencilNonconstant { .. } => "pencil_nonconstant",
            Classification::FiniteSet => "finite_set",
            Classification::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeReport {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JumpingReport {
    pub generic: SplittingType,
    pub mode: ModeSummary,
    pub lines_scanned: usize,
    pub jumps: Vec<Jump>,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModeSummary {
    pub kind: ModeReport,
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem61 {
    Confirmed,
    Vacuous,
    Violation,
}

fn scan_lines(ctx: FieldCtx, mode: ScanMode) -> Result<Vec<LineP2>, JumpError> {
    let lines: Vec<LineP2> = match mode {
        ScanMode::Exhaustive => enumerate_lines(ctx)
            .map_err(|_| JumpError::ExhaustiveOverRationals(ctx))?
            .collect(),
        ScanMode::Sampled { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut seen = BTreeSet::new();
            (0..n)
                .map(|_| random_line(ctx, &mut rng))
                .filter(|l| seen.insert(l.clone()))
                .collect()
        }
    };
    if lines.is_empty() {
        return Err(JumpError::EmptyScan);
    }
    Ok(lines)
}

fn classify(lines: &[LineP2], jumps: &[Jump]) -> Classification {
    if jumps.is_empty() {
        return Classification::Uniform;
    }
    let jump_set: BTreeSet<&LineP2> = jumps.iter().map(|j| &j.line).collect();
    // Lines of the scan through q, and whether all of them jump.
    let full_pencil_at = |q: &PointP2| {
        let through: Vec<&LineP2> = lines.iter().filter(|l| incidence(q, l)).collect();
        (through.len(), through.iter().all(|l| jump_set.contains(l)))
    };
    if jumps.len() >= 2 {
        let p = intersection(&jumps[0].line, &jumps[1].line).expect("distinct lines meet");
        if jumps.iter().all(|j| incidence(&p, &j.line)) && full_pencil_at(&p).1 {
            let r = jumps[0].order;
            return if jumps.iter().all(|j| j.order == r) {
                Classification::Pencil { point: p, order: r }
            } else {
                Classification::PencilNonconstant { point: p }
            };
        }
    }
    let mut candidates = BTreeSet::new();
    for (i, a) in jumps.iter().enumerate() {
        for b in &jumps[i + 1..] {
            candidates.insert(intersection(&a.line, &b.line).expect("distinct lines meet"));
        }
    }
    let contains_pencil = candidates.iter().any(|q| {
        let (count, all) = full_pencil_at(q);
        count >= 3 && all
    });
    if contains_pencil {
        Classification::Other
    } else {
        Classification::FiniteSet
    }
}

pub fn scan(p: &Presentation, mode: ScanMode) -> Result<JumpingReport, JumpError> {
    let ctx = p.ctx();
    let lines = scan_lines(ctx, mode)?;
    let splits: Vec<SplittingType> = lines
        .par_iter()
        .map(|l| splitting_on(p, l))
        .collect::<Result<_, _>>()?;
    let generic = *splits.iter().min_by_key(|s| s.gap()).expect("nonempty scan");
    let mut jumps: Vec<Jump> = lines
        .iter()
        .zip(&splits)
        .filter_map(|(l, &s)| {
            let order = order_between(s, generic);
            (order > 0).then(|| Jump {
                line: l.clone(),
                splitting: s,
                order,
            })
        })
        .collect();
    jumps.sort_by(|a, b| a.line.cmp(&b.line));
    let classification = classify(&lines, &jumps);
    let mode = match mode {
        ScanMode::Exhaustive => ModeSummary {
            kind: ModeReport::Exhaustive,
            field: ctx.to_string(),
            samples: None,
            seed: None,
        },
        ScanMode::Sampled { n, seed } => ModeSummary {
            kind: ModeReport::Sampled,
            field: ctx.to_string(),
            samples: Some(n),
            seed: Some(seed),
        },
    };
    Ok(JumpingReport {
        generic,
        mode,
        lines_scanned: lines.len(),
        jumps,
        classification,
    })
}

pub fn almost_uniform(p: &Presentation, mode: ScanMode) -> Result<Option<(PointP2, i64)>, JumpError> {
    Ok(match scan(p, mode)?.classification {
        Classification::Pencil { point, order } => Some((point, order)),
        _ => None,
    })
}

/// Instance check of the pencil theorem: a bundle with `c1 = 0` whose jumping lines are
/// exactly the lines through one point is not stable.
pub fn theorem61_check(p: &Presentation, mode: ScanMode) -> Result<Theorem61, JumpError> {
    let report = scan(p, mode)?;
    Ok(theorem61_verdict(p, &report))
}

pub fn theorem61_verdict(p: &Presentation, report: &JumpingReport) -> Theorem61 {
    let (norm, _) = p.normalize();
    let full_pencil = matches!(
        report.classification,
        Classification::Pencil { .. } | Classification::PencilNonconstant { .. }
    );
    if norm.chern().c1 != 0 || !full_pencil {
        return Theorem61::Vacuous;
    }
    if p.stability_class() == Stability::Stable {
        Theorem61::Violation
    } else {
        Theorem61::Confirmed
    }
}

pub fn render_text(report: &JumpingReport) -> String {
    let mut out = String::new();
    let mode = match report.mode.kind {
        ModeReport::Exhaustive => format!("exhaustive over {}", report.mode.field),
        ModeReport::Sampled => format!(
            "sampled over {} ({} lines, seed {})",
            report.mode.field,
            report.mode.samples.unwrap_or(0),
            report.mode.seed.unwrap_or(0)
        ),
    };
    let _ = writeln!(out, "mode:           {mode}");
    let _ = writeln!(out, "lines scanned:  {}", report.lines_scanned);
    let _ = writeln!(out, "generic:        {}", report.generic);
    let class = match &report.classification {
        Classification::Pencil { point, order } => format!("pencil through {point}, order {order}"),
        Classification::PencilNonconstant { point } => format!("pencil through {point}, nonconstant order"),
        c => c.name().to_string(),
    };
    let _ = writeln!(out, "classification: {class}");
    if !report.jumps.is_empty() {
        let _ = writeln!(out, "{:<20} {:<12} order", "line", "splitting");
        for j in &report.jumps {
            let _ = writeln!(out, "{:<20} {:<12} {}", j.line.to_string(), j.splitting.to_string(), j.order);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilySpec;

    const F5: FieldCtx = FieldCtx::Prime(5);
    const F7: FieldCtx = FieldCtx::Prime(7);

    fn build(s: &str, ctx: FieldCtx) -> Presentation {
        FamilySpec::parse(s).unwrap().build(ctx).unwrap()
    }

    fn pt(ctx: FieldCtx, v: [i64; 3]) -> PointP2 {
        PointP2::from_i64(ctx, v).unwrap()
    }

    #[test]
    fn e3_pencil_over_f5() {
        let r = scan(&build("en:3", F5), ScanMode::Exhaustive).unwrap();
        assert_eq!(r.lines_scanned, 31);
        assert_eq!(r.generic, SplittingType { a: 0, b: -1 });
        assert_eq!(r.jumps.len(), 6);
        assert!(r.jumps.iter().all(|j| j.order == 1));
        assert_eq!(r.classification, Classification::Pencil { point: pt(F5, [1, 0, 0]), order: 1 });
    }

    #[test]
    fn e1_uniform() {
        let r = scan(&build("en:1", F5), ScanMode::Exhaustive).unwrap();
        assert_eq!(r.classification, Classification::Uniform);
        assert_eq!(r.generic, SplittingType { a: 1, b: 0 });
        assert_eq!(almost_uniform(&build("en:1", F5), ScanMode::Exhaustive).unwrap(), None);
        assert_eq!(theorem61_check(&build("en:1", F5), ScanMode::Exhaustive).unwrap(), Theorem61::Vacuous);
    }

    #[test]
    fn example_pencils() {
        let r = scan(&build("ex61:r=2,k=1,c1=0", F7), ScanMode::Exhaustive).unwrap();
        assert_eq!(r.classification, Classification::Pencil { point: pt(F7, [0, 0, 1]), order: 2 });
        let au = almost_uniform(&build("ex62:r=1", F7), ScanMode::Exhaustive).unwrap();
        assert_eq!(au, Some((pt(F7, [0, 0, 1]), 1)));
        let k222 = scan(&build("kaneyama:2,2,2", F7), ScanMode::Exhaustive).unwrap();
        assert_eq!(k222.classification, Classification::Other);
    }

    #[test]
    fn theorem61_examples() {
        let c = |s| theorem61_check(&build(s, F7), ScanMode::Exhaustive).unwrap();
        assert_eq!(c("ex61:r=1,k=0,c1=0"), Theorem61::Confirmed);
        assert_eq!(c("ex61:r=1,k=1,c1=0"), Theorem61::Confirmed);
        assert_eq!(c("ex62:r=1"), Theorem61::Vacuous);
    }

    #[test]
    fn exhaustive_over_q_is_rejected() {
        let p = build("en:2", FieldCtx::Rationals);
        assert!(matches!(scan(&p, ScanMode::Exhaustive), Err(JumpError::ExhaustiveOverRationals(_))));
        assert!(matches!(scan(&p, ScanMode::Sampled { n: 0, seed: 0 }), Err(JumpError::EmptyScan)));
        let r = scan(&p, ScanMode::Sampled { n: 30, seed: 1 }).unwrap();
        assert_eq!(r.mode.kind, ModeReport::Sampled);
        assert_eq!(r.classification, Classification::Uniform);
    }

    #[test]
    fn finite_jump_sets() {
        // A stable c1 = -1 bundle whose jumping lines do not fill a pencil.
        let p = build("kaneyama:2,3,4", F5);
        let r = scan(&p, ScanMode::Exhaustive).unwrap();
        assert_ne!(r.classification, Classification::Uniform);
        let lines: Vec<LineP2> = enumerate_lines(F5).unwrap().collect();
        let one = [r.jumps[0].clone()];
        assert_eq!(classify(&lines, &one), Classification::FiniteSet);
    }

    #[test]
    fn json_keys_are_stable() {
        let r = scan(&build("en:3", F5), ScanMode::Exhaustive).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["generic", "mode", "jumps", "classification"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["classification"]["kind"], "pencil");
        assert_eq!(v["classification"]["point"], "(1:0:0)");
        assert!(render_text(&r).contains("pencil through (1:0:0), order 1"));
    }
}

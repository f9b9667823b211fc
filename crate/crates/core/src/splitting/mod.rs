//! Splitting types of a presented bundle on lines.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::{rank, DenseMatrix, FieldCtx};
use crate::homopoly::{gcd_binary, graded_dim, graded_mult_matrix, restrict_to_line, HomPoly};
use crate::presentation::Presentation;
use crate::projgeom::{enumerate_lines, parametrize, random_line, LineP2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplittingError {
    #[error("restriction to {line} is not locally free (entries share the factor {gcd})")]
    NotLocallyFree { line: String, gcd: String },
}

/// `F|_l ≅ O(a) ⊕ O(b)` with `a ≥ b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SplittingType {
    pub a: i64,
    pub b: i64,
}

impl SplittingType {
    /// Orders the pair so that `a ≥ b`.
    pub fn new(a: i64, b: i64) -> Self {
        SplittingType { a: a.max(b), b: a.min(b) }
    }

    pub fn gap(&self) -> i64 {
        self.a - self.b
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// The restricted sequence `0 → O(-d0) → ⊕O(-d_i) → F|_l → 0` on the line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P1Presentation {
    pub d0: i64,
    pub d: [i64; 3],
    pub entries: [HomPoly; 3],
    pub line: LineP2,
}

impl P1Presentation {
    pub fn c1(&self) -> i64 {
        self.d0 - self.d.iter().sum::<i64>()
    }

    fn weights(&self) -> [i64; 3] {
        self.d.map(|di| self.d0 - di)
    }

    /// Matrix of `(h_i) ↦ Σ h_i g_i` from `⊕ S_{m - w_i}` to `S_m`.
    fn syzygy_map(&self, m: i64) -> DenseMatrix {
        let w = self.weights();
        let blocks: Vec<DenseMatrix> = (0..3).map(|i| graded_mult_matrix(&self.entries[i], m - w[i])).collect();
        DenseMatrix::hstack(self.line.ctx(), graded_dim(2, m), &blocks)
    }
}

pub fn restrict(p: &Presentation, l: &LineP2) -> Result<P1Presentation, SplittingError> {
    assert_eq!(p.ctx(), l.ctx(), "field mismatch");
    let param = parametrize(l);
    let entries = p
        .entries()
        .clone()
        .map(|f| restrict_to_line(&f, &param).expect("parametrize returns rank 2"));
    let nonzero: Vec<&HomPoly> = entries.iter().filter(|g| !g.is_zero()).collect();
    let bad = |gcd: &HomPoly| SplittingError::NotLocallyFree {
        line: l.to_string(),
        gcd: gcd.to_string(),
    };
    let Some(first) = nonzero.first() else {
        return Err(bad(&HomPoly::zero(l.ctx(), 2, 0)));
    };
    let mut g = gcd_binary(first, first).expect("nonzero");
    for h in &nonzero[1..] {
        g = gcd_binary(&g, h).expect("nonzero");
    }
    if g.degree() > 0 {
        return Err(bad(&g));
    }
    Ok(P1Presentation {
        d0: p.d0(),
        d: p.d(),
        entries,
        line: l.clone(),
    })
}

/// Splitting type from the least degree of a syzygy among the restricted entries.
pub fn splitting_type(q: &P1Presentation) -> SplittingType {
    let w = q.weights();
    let lo = *w.iter().min().unwrap();
    let hi: i64 = w.iter().sum();
    for m in lo..=hi {
        let map = q.syzygy_map(m);
        if map.cols() > rank(&map) {
            let b = m - q.d0;
            return SplittingType::new(q.c1() - b, b);
        }
    }
    panic!(
        "internal error: no syzygy up to degree {hi} on {}; the presentation is not locally free",
        q.line
    );
}

fn h0_line(m: i64) -> i64 {
    graded_dim(2, m) as i64
}

/// `h^0(F|_l(k))`, with the connecting map realized through duality on the line.
pub fn restricted_h0(q: &P1Presentation, k: i64) -> i64 {
    let free = q.d.iter().map(|&di| h0_line(k - di)).sum::<i64>() - h0_line(k - q.d0);
    // H^1(O(k-d0)) → ⊕H^1(O(k-d_i)) is the transpose of ⊕S_{d_i-k-2} → S_{d0-k-2}.
    let target = q.d0 - k - 2;
    let blocks: Vec<DenseMatrix> = (0..3)
        .map(|i| graded_mult_matrix(&q.entries[i], q.d[i] - k - 2))
        .collect();
    let mult = DenseMatrix::hstack(q.line.ctx(), graded_dim(2, target), &blocks);
    let connecting = mult.transpose();
    let kernel = connecting.cols() - rank(&connecting);
    free + kernel as i64
}

/// Independent splitting computation from the section profile `k ↦ h^0(F|_l(k))`.
pub fn splitting_type_h0(q: &P1Presentation) -> SplittingType {
    let mut k = q.d0;
    assert!(restricted_h0(q, k) > 0, "F|_l(d0) always has sections");
    while restricted_h0(q, k - 1) > 0 {
        k -= 1;
    }
    let a = -k;
    SplittingType::new(a, q.c1() - a)
}

pub fn splitting_on(p: &Presentation, l: &LineP2) -> Result<SplittingType, SplittingError> {
    Ok(splitting_type(&restrict(p, l)?))
}

/// Minimal-gap splitting: over all lines when the field is small enough, otherwise over
/// `trials` seeded random lines.
pub fn generic_splitting(p: &Presentation, trials: usize, seed: u64) -> Result<SplittingType, SplittingError> {
    assert!(trials >= 5, "at least 5 trials");
    let ctx = p.ctx();
    let lines: Vec<LineP2> = match ctx {
        FieldCtx::Prime(q) if q * q + q < 4 * trials as u64 => enumerate_lines(ctx).expect("prime field").collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..trials).map(|_| random_line(ctx, &mut rng)).collect()
        }
    };
    let mut best: Option<SplittingType> = None;
    for l in &lines {
        let s = splitting_on(p, l)?;
        if best.is_none_or(|b| s.gap() < b.gap()) {
            best = Some(s);
        }
    }
    Ok(best.expect("at least one line"))
}

pub fn jump_order(p: &Presentation, l: &LineP2, generic: SplittingType) -> Result<i64, SplittingError> {
    let s = splitting_on(p, l)?;
    Ok(order_between(s, generic))
}

/// `(δ(l) - δ)/2`.
pub fn order_between(s: SplittingType, generic: SplittingType) -> i64 {
    let diff = s.gap() - generic.gap();
    debug_assert!(diff >= 0 && diff % 2 == 0, "gap {s} below or off-parity from generic {generic}");
    diff / 2
}

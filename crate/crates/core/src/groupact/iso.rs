//! Graded isomorphisms between presentations and invariance verdicts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{pullback, sample_indexed, transvections, GroupElement, GroupError, Subgroup};
use crate::exactalg::{kernel_basis, DenseMatrix, FieldCtx, Scalar};
use crate::homopoly::{graded_dim, graded_mult_matrix, HomPoly};
use crate::presentation::Presentation;

/// Largest kernel dimension searched on the exhaustive grid `{0,1,2,3}^k`.
const GRID_MAX_DIM: usize = 6;
const RANDOM_TRIALS: usize = 10;

/// A commutative diagram between two presentations: `N·entries₂ = λ·entries₁`, where
/// `N[i][j]` has degree `d_j − d_i` and `det N` is a nonzero constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoWitness {
    pub n: [[HomPoly; 3]; 3],
    pub lambda: Scalar,
    pub det_value: Scalar,
}

impl IsoWitness {
    /// Checks the defining identity and the determinant exactly.
    pub fn verify(&self, p1: &Presentation, p2: &Presentation) -> bool {
        let (e1, e2) = (p1.entries(), p2.entries());
        let rows_ok = (0..3).all(|r| {
            let lhs = (0..3)
                .map(|c| &self.n[r][c] * &e2[c])
                .reduce(|a, b| &a + &b)
                .expect("three terms");
            lhs == e1[r].scale(&self.lambda)
        });
        rows_ok && !self.det_value.is_zero() && det_poly(&self.n).coeff(&[0, 0, 0]) == self.det_value
    }
}

impl Serialize for IsoWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Shown {
            n: Vec<Vec<String>>,
            lambda: String,
            det: String,
        }
        Shown {
            n: self.n.iter().map(|r| r.iter().map(|f| f.to_string()).collect()).collect(),
            lambda: self.lambda.to_string(),
            det: self.det_value.to_string(),
        }
        .serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsoOutcome {
    Witness(IsoWitness),
    /// `certified` is false when the determinant search was randomized.
    NotIsomorphic { certified: bool },
}

impl IsoOutcome {
    pub fn witness(&self) -> Option<&IsoWitness> {
        match self {
            IsoOutcome::Witness(w) => Some(w),
            IsoOutcome::NotIsomorphic { .. } => None,
        }
    }
}

fn det_poly(n: &[[HomPoly; 3]; 3]) -> HomPoly {
    const PERMS: [([usize; 3], bool); 6] = [
        ([0, 1, 2], true),
        ([1, 2, 0], true),
        ([2, 0, 1], true),
        ([0, 2, 1], false),
        ([2, 1, 0], false),
        ([1, 0, 2], false),
    ];
    PERMS
        .iter()
        .map(|(s, even)| {
            let t = &(&n[0][s[0]] * &n[1][s[1]]) * &n[2][s[2]];
            if *even {
                t
            } else {
                -&t
            }
        })
        .reduce(|a, b| &a + &b)
        .expect("six terms")
}

fn det3(m: &[[Scalar; 3]; 3]) -> Scalar {
    let t = |a: usize, b: usize, c: usize| &(&m[0][a] * &m[1][b]) * &m[2][c];
    &(&(&t(0, 1, 2) + &t(1, 2, 0)) + &t(2, 0, 1)) - &(&(&t(0, 2, 1) + &t(2, 1, 0)) + &t(1, 0, 2))
}

/// The permutation `perm` with `p2.permuted(perm).d() == p1.d()`, if the multisets agree.
fn matching_permutation(p1: &Presentation, p2: &Presentation) -> Option<[usize; 3]> {
    const ALL: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    ALL.into_iter()
        .find(|perm| (0..3).all(|i| p2.d()[perm[i]] == p1.d()[i]))
}

struct System {
    ctx: FieldCtx,
    degs: [[i64; 3]; 3],
    /// Offset of each `N[i][j]` block among the unknowns; `λ` comes last.
    offsets: [[usize; 3]; 3],
    unknowns: usize,
}

impl System {
    fn new(p1: &Presentation) -> System {
        let d = p1.d();
        let mut degs = [[0; 3]; 3];
        let mut offsets = [[0; 3]; 3];
        let mut at = 0;
        for i in 0..3 {
            for j in 0..3 {
                degs[i][j] = d[j] - d[i];
                offsets[i][j] = at;
                at += graded_dim(3, degs[i][j]);
            }
        }
        System {
            ctx: p1.ctx(),
            degs,
            offsets,
            unknowns: at + 1,
        }
    }

    /// Rows: coefficients of `Σ_j N[i][j]·e2_j − λ·e1_i`, block by block.
    fn matrix(&self, p1: &Presentation, e2: &[HomPoly; 3]) -> DenseMatrix {
        let target_deg = |i: usize| p1.d0() - p1.d()[i];
        let heights: Vec<usize> = (0..3).map(|i| graded_dim(3, target_deg(i))).collect();
        let total: usize = heights.iter().sum();
        let mut m = DenseMatrix::zeros(self.ctx, total, self.unknowns);
        let mut row0 = 0;
        for i in 0..3 {
            for j in 0..3 {
                if self.degs[i][j] < 0 {
                    continue;
                }
                let block = graded_mult_matrix(&e2[j], self.degs[i][j]);
                for r in 0..block.rows() {
                    for c in 0..block.cols() {
                        let v = block.get(r, c);
                        if !v.is_zero() {
                            m.set(row0 + r, self.offsets[i][j] + c, v.clone());
                        }
                    }
                }
            }
            let lam = self.unknowns - 1;
            for (r, c) in p1.entries()[i].coeff_vector().into_iter().enumerate() {
                m.set(row0 + r, lam, -&c);
            }
            row0 += heights[i];
        }
        m
    }

    fn polys(&self, v: &[Scalar]) -> [[HomPoly; 3]; 3] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let deg = self.degs[i][j];
                let len = graded_dim(3, deg);
                let off = self.offsets[i][j];
                if len == 0 {
                    HomPoly::zero(self.ctx, 3, deg)
                } else {
                    HomPoly::from_coeff_vector(self.ctx, 3, deg, &v[off..off + len])
                }
            })
        })
    }

    /// `N` evaluated at a fixed point. The determinant is constant, so any point gives it.
    fn at_point(&self, v: &[Scalar]) -> [[Scalar; 3]; 3] {
        let pt = [1, 2, 3].map(|c| Scalar::from_i64(self.ctx, c));
        let n = self.polys(v);
        std::array::from_fn(|i| std::array::from_fn(|j| n[i][j].eval(&pt)))
    }

    fn is_n_zero(&self, v: &[Scalar]) -> bool {
        v[..self.unknowns - 1].iter().all(Scalar::is_zero)
    }
}

fn combine(ctx: FieldCtx, basis: &[Vec<Scalar>], t: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(ctx); basis[0].len()];
    for (b, c) in basis.iter().zip(t) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(b) {
            *o = &*o + &(x * c);
        }
    }
    out
}

fn combine_mats(ctx: FieldCtx, mats: &[[[Scalar; 3]; 3]], t: &[Scalar]) -> [[Scalar; 3]; 3] {
    let mut out: [[Scalar; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| Scalar::zero(ctx)));
    for (m, c) in mats.iter().zip(t) {
        if c.is_zero() {
            continue;
        }
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = &out[i][j] + &(&m[i][j] * c);
            }
        }
    }
    out
}

/// Searches for `N` with `N·entries(p2) = λ·entries(p1)` and `det N ≠ 0`.
pub fn isomorphic(p1: &Presentation, p2: &Presentation) -> IsoOutcome {
    let certified_no = IsoOutcome::NotIsomorphic { certified: true };
    if p1.ctx() != p2.ctx() || p1.d0() != p2.d0() {
        return certified_no;
    }
    let Some(perm) = matching_permutation(p1, p2) else {
        return certified_no;
    };
    let ctx = p1.ctx();
    let e2: [HomPoly; 3] = std::array::from_fn(|i| p2.entries()[perm[i]].clone());
    let sys = System::new(p1);

    // Entry-wise proportional presentations need no search.
    let ratios: Option<Vec<Scalar>> = (0..3)
        .map(|i| {
            let (a, b) = (&p1.entries()[i], &e2[i]);
            let (e, c) = b.leading()?;
            let r = &a.coeff(e) / c;
            (b.scale(&r) == *a && !r.is_zero()).then_some(r)
        })
        .collect();
    let solution = if let Some(r) = ratios {
        let mut v = vec![Scalar::zero(ctx); sys.unknowns];
        for i in 0..3 {
            v[sys.offsets[i][i]] = r[i].clone();
        }
        v[sys.unknowns - 1] = Scalar::one(ctx);
        Some(v)
    } else {
        let kernel = kernel_basis(&sys.matrix(p1, &e2));
        if kernel.iter().all(|v| sys.is_n_zero(v)) {
            return certified_no;
        }
        let mats: Vec<[[Scalar; 3]; 3]> = kernel.iter().map(|v| sys.at_point(v)).collect();
        let k = kernel.len();
        let grid_exact = k <= GRID_MAX_DIM && ctx.modulus().is_none_or(|q| q >= 4);
        let found = if grid_exact {
            grid_search(ctx, &mats)
        } else {
            random_search(ctx, &mats)
        };
        match found {
            Some(t) => Some(combine(ctx, &kernel, &t)),
            None => return IsoOutcome::NotIsomorphic { certified: grid_exact },
        }
    };
    let v = solution.expect("set above");
    let n_perm = sys.polys(&v);
    // Back to the slot order of p2: column perm[i] of N is column i of the permuted N.
    let mut n: [[HomPoly; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|c| n_perm[r][c].clone()));
    for r in 0..3 {
        for i in 0..3 {
            n[r][perm[i]] = n_perm[r][i].clone();
        }
    }
    let det_value = det_poly(&n).coeff(&[0, 0, 0]);
    let w = IsoWitness {
        n,
        lambda: v[sys.unknowns - 1].clone(),
        det_value,
    };
    debug_assert!(w.verify(p1, p2), "solver produced an invalid witness");
    IsoOutcome::Witness(w)
}

fn grid_search(ctx: FieldCtx, mats: &[[[Scalar; 3]; 3]]) -> Option<Vec<Scalar>> {
    let k = mats.len();
    let digits: Vec<Scalar> = (0..4).map(|c| Scalar::from_i64(ctx, c)).collect();
    for code in 1..4usize.pow(k as u32) {
        let t: Vec<Scalar> = (0..k).map(|i| digits[(code >> (2 * i)) & 3].clone()).collect();
        if !det3(&combine_mats(ctx, mats, &t)).is_zero() {
            return Some(t);
        }
    }
    None
}

fn random_search(ctx: FieldCtx, mats: &[[[Scalar; 3]; 3]]) -> Option<Vec<Scalar>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    (0..RANDOM_TRIALS).find_map(|_| {
        let t: Vec<Scalar> = mats
            .iter()
            .map(|_| match ctx.modulus() {
                Some(q) => Scalar::from_i64(ctx, rng.gen_range(0..q) as i64),
                None => Scalar::from_i64(ctx, rng.gen_range(-1000..=1000)),
            })
            .collect();
        (!det3(&combine_mats(ctx, mats, &t)).is_zero()).then_some(t)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Invariance {
    Yes(IsoWitness),
    No { certified: bool },
}

impl Invariance {
    pub fn is_yes(&self) -> bool {
        matches!(self, Invariance::Yes(_))
    }
}

/// Whether `g*F ≅ F`.
pub fn invariant_under(p: &Presentation, g: &GroupElement) -> Invariance {
    match isomorphic(p, &pullback(p, g)) {
        IsoOutcome::Witness(w) => Invariance::Yes(w),
        IsoOutcome::NotIsomorphic { certified } => Invariance::No { certified },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransvectionCheck {
    pub name: String,
    pub invariant: bool,
    /// Set for negative answers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvarianceVerdict {
    /// Every tested element preserves the bundle. Never a proof of invariance.
    Invariant { sampled: bool, elements_checked: usize },
    NotInvariant {
        element: GroupElement,
        origin: String,
        certified: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub group: String,
    pub samples: usize,
    pub seed: u64,
    pub transvections: Vec<TransvectionCheck>,
    pub verdict: InvarianceVerdict,
}

/// Tests the elementary transvections lying in the subgroup, then `n_samples` seeded
/// random elements. The first failure in that order is reported.
pub fn invariance_report(
    p: &Presentation,
    group: &Subgroup,
    n_samples: usize,
    seed: u64,
) -> Result<InvarianceReport, GroupError> {
    if n_samples < 10 {
        return Err(GroupError::TooFewSamples(n_samples));
    }
    let ctx = p.ctx();
    let mut failure = None;
    let mut checks = Vec::new();
    let mut checked = 0;
    for (name, m) in transvections(ctx) {
        if !group.contains(&m) {
            continue;
        }
        let g = GroupElement::new(m, group.clone())?;
        let verdict = invariant_under(p, &g);
        checked += 1;
        let certified = match verdict {
            Invariance::Yes(_) => None,
            Invariance::No { certified } => Some(certified),
        };
        if let (None, Some(c)) = (&failure, certified) {
            failure = Some((g, name.to_string(), c));
        }
        checks.push(TransvectionCheck {
            name: name.to_string(),
            invariant: certified.is_none(),
            certified,
        });
    }
    let sampled: Vec<(GroupElement, Invariance)> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let g = sample_indexed(group, ctx, seed, i);
            let v = invariant_under(p, &g);
            (g, v)
        })
        .collect();
    checked += sampled.len();
    if failure.is_none() {
        failure = sampled.into_iter().enumerate().find_map(|(i, (g, v))| match v {
            Invariance::No { certified } => Some((g, format!("sample {i}"), certified)),
            Invariance::Yes(_) => None,
        });
    }
    let verdict = match failure {
        Some((element, origin, certified)) => InvarianceVerdict::NotInvariant {
            element,
            origin,
            certified,
        },
        None => InvarianceVerdict::Invariant {
            sampled: true,
            elements_checked: checked,
        },
    };
    Ok(InvarianceReport {
        group: group.to_string(),
        samples: n_samples,
        seed,
        transvections: checks,
        verdict,
    })
}

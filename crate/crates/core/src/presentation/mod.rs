//! Rank-2 bundles `0 → O(-d0) → O(-d1)⊕O(-d2)⊕O(-d3) → F → 0` given by a row of forms.

mod file;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::{column_span_complement, DenseMatrix, FieldCtx, Scalar};
use crate::homopoly::{graded_dim, graded_mult_matrix, monomial_basis, quotient_dim, HomPoly, PolyError};

pub use file::{parse_bundle, write_bundle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("entry {index} has degree {found}, expected d0 - d{index} = {expected}")]
    EntryDegree { index: usize, expected: i64, found: i64 },
    #[error("entry {index} has degree {degree}; entries must have degree at least 1")]
    ReducibleEntry { index: usize, degree: i64 },
    #[error("entry {0} is the zero polynomial")]
    ZeroEntry(usize),
    #[error("entries must be ternary forms over {0}")]
    WrongRing(FieldCtx),
    #[error("entries have a common zero: the quotient is still {deficiency}-dimensional in degree {degree}")]
    NotLocallyFree { degree: i64, deficiency: usize },
    #[error("H^0(F({0})) is zero, so there is no section basis")]
    EmptyBasis(i64),
    #[error("the section is zero")]
    ZeroSection,
    #[error("section representative {index} has degree {found}, expected {expected}")]
    SectionDegree { index: usize, expected: i64, found: i64 },
    #[error("bundle file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("polynomial error: {0}")]
    Poly(#[from] PolyError),
}

/// A bundle presented by one row `(f1, f2, f3)` of forms of degrees `d0 - d_i`.
///
/// Constructed only through [`Presentation::new`], which runs [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    d0: i64,
    d: [i64; 3],
    entries: [HomPoly; 3],
    ctx: FieldCtx,
    certificate: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ChernPair {
    pub c1: i64,
    pub c2: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    ProperlySemistable,
    Unstable,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::ProperlySemistable => "properly_semistable",
            Stability::Unstable => "unstable",
        })
    }
}

/// A class in `H^0(F(k))`, represented by forms `g_i` of degree `k - d_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionVector {
    pub twist: i64,
    pub reps: [HomPoly; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Colength {
    Finite(usize),
    NotFinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroScheme {
    pub generators: Vec<HomPoly>,
    pub colength: Colength,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposability {
    /// A nowhere-vanishing section of `F(twist)`.
    Yes(SectionVector),
    NoEvidence,
}

/// `h^0(O(m))` on the plane.
pub fn h0_plane(m: i64) -> i64 {
    graded_dim(3, m) as i64
}

/// Certifies that the forms have no common zero; returns `dim (S/I)_m` for
/// `m = 0..=Σdeg - 1`, whose last value must vanish.
pub fn validate(entries: &[HomPoly; 3]) -> Result<Vec<usize>, PresentationError> {
    let top: i64 = entries.iter().map(HomPoly::degree).sum::<i64>() - 1;
    let hf: Vec<usize> = (0..=top).map(|m| quotient_dim(3, entries, m)).collect();
    match hf.last() {
        Some(&0) => Ok(hf),
        Some(&deficiency) => Err(PresentationError::NotLocallyFree {
            degree: top,
            deficiency,
        }),
        None => unreachable!("entries have positive degree"),
    }
}

impl Presentation {
    pub fn new(ctx: FieldCtx, d0: i64, d: [i64; 3], entries: [HomPoly; 3]) -> Result<Self, PresentationError> {
        for (i, f) in entries.iter().enumerate() {
            if f.ctx() != ctx || f.nvars() != 3 {
                return Err(PresentationError::WrongRing(ctx));
            }
            if f.is_zero() {
                return Err(PresentationError::ZeroEntry(i));
            }
            let expected = d0 - d[i];
            if f.degree() != expected {
                return Err(PresentationError::EntryDegree {
                    index: i,
                    expected,
                    found: f.degree(),
                });
            }
            if expected < 1 {
                return Err(PresentationError::ReducibleEntry { index: i, degree: expected });
            }
        }
        let certificate = validate(&entries)?;
        Ok(Presentation {
            d0,
            d,
            entries,
            ctx,
            certificate,
        })
    }

    /// Reuses the certificate of `self`: the new entries must come from an invertible
    /// linear change of coordinates or a rescaling, which preserve local freeness.
    pub(crate) fn with_transformed_entries(&self, entries: [HomPoly; 3]) -> Presentation {
        debug_assert!(entries.iter().zip(&self.entries).all(|(a, b)| a.degree() == b.degree()));
        Presentation {
            entries,
            ..self.clone()
        }
    }

    pub fn d0(&self) -> i64 {
        self.d0
    }

    pub fn d(&self) -> [i64; 3] {
        self.d
    }

    pub fn entries(&self) -> &[HomPoly; 3] {
        &self.entries
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    /// Quotient Hilbert function stored by [`validate`].
    pub fn certificate(&self) -> &[usize] {
        &self.certificate
    }

    pub fn weights(&self) -> [i64; 3] {
        self.d.map(|di| self.d0 - di)
    }

    /// Reorders the summands: slot `i` of the result is slot `perm[i]` of `self`.
    pub fn permuted(&self, perm: [usize; 3]) -> Presentation {
        Presentation {
            d0: self.d0,
            d: perm.map(|i| self.d[i]),
            entries: perm.map(|i| self.entries[i].clone()),
            ctx: self.ctx,
            certificate: self.certificate.clone(),
        }
    }

    pub fn scaled(&self, factors: &[Scalar; 3]) -> Presentation {
        assert!(factors.iter().all(|c| !c.is_zero()), "scaling factors must be nonzero");
        let entries = [0, 1, 2].map(|i| self.entries[i].scale(&factors[i]));
        self.with_transformed_entries(entries)
    }

    pub fn chern(&self) -> ChernPair {
        let [a, b, c] = self.d;
        let e1 = -(a + b + c);
        let e2 = a * b + a * c + b * c;
        ChernPair {
            c1: self.d0 + e1,
            c2: e2 + e1 * self.d0 + self.d0 * self.d0,
        }
    }

    /// Degrees shifted by `-m`, i.e. `F(m)`.
    pub fn twist(&self, m: i64) -> Presentation {
        Presentation {
            d0: self.d0 - m,
            d: self.d.map(|di| di - m),
            ..self.clone()
        }
    }

    pub fn h0(&self, k: i64) -> i64 {
        self.d.iter().map(|&di| h0_plane(k - di)).sum::<i64>() - h0_plane(k - self.d0)
    }

    /// The twist with `c1 ∈ {-1, 0}` and the shift used.
    pub fn normalize(&self) -> (Presentation, i64) {
        let m = (-self.chern().c1).div_euclid(2);
        (self.twist(m), m)
    }

    pub fn stability_class(&self) -> Stability {
        let (n, _) = self.normalize();
        if n.h0(0) == 0 {
            return Stability::Stable;
        }
        if n.chern().c1 == 0 && n.h0(-1) == 0 {
            Stability::ProperlySemistable
        } else {
            Stability::Unstable
        }
    }

    /// Matrix of `h ↦ (h f1, h f2, h f3)` from `S_{k-d0}` to `⊕ S_{k-d_i}`.
    fn image_map(&self, k: i64) -> DenseMatrix {
        let blocks: Vec<DenseMatrix> = (0..3).map(|i| graded_mult_matrix(&self.entries[i], k - self.d0)).collect();
        DenseMatrix::vstack(self.ctx, graded_dim(3, k - self.d0), &blocks)
    }

    pub fn section_basis(&self, k: i64) -> Result<Vec<SectionVector>, PresentationError> {
        if self.h0(k) == 0 {
            return Err(PresentationError::EmptyBasis(k));
        }
        let dims: Vec<usize> = self.d.iter().map(|&di| graded_dim(3, k - di)).collect();
        let picks = column_span_complement(&self.image_map(k));
        debug_assert_eq!(picks.len() as i64, self.h0(k));
        let out = picks
            .into_iter()
            .map(|mut j| {
                let mut reps = self.d.map(|di| HomPoly::zero(self.ctx, 3, k - di));
                for (i, &dim) in dims.iter().enumerate() {
                    if j < dim {
                        let e = monomial_basis(3, k - self.d[i])[j];
                        reps[i] = HomPoly::monomial(self.ctx, 3, Scalar::one(self.ctx), e);
                        break;
                    }
                    j -= dim;
                }
                SectionVector { twist: k, reps }
            })
            .collect();
        Ok(out)
    }

    /// The first basis section at the least twist with sections.
    pub fn canonical_section(&self) -> SectionVector {
        let k = (self.d.iter().min().copied().unwrap()..)
            .find(|&k| self.h0(k) > 0)
            .expect("h0 grows without bound");
        self.section_basis(k).expect("positive h0").remove(0)
    }

    fn check_section(&self, s: &SectionVector) -> Result<(), PresentationError> {
        for (i, g) in s.reps.iter().enumerate() {
            let expected = s.twist - self.d[i];
            if !g.is_zero() && g.degree() != expected {
                return Err(PresentationError::SectionDegree {
                    index: i,
                    expected,
                    found: g.degree(),
                });
            }
        }
        if s.reps.iter().all(HomPoly::is_zero) {
            return Err(PresentationError::ZeroSection);
        }
        Ok(())
    }

    /// Zero scheme of a section, cut out by the 2×2 minors of the matrix with rows
    /// `(f1,f2,f3)` and `(g1,g2,g3)`.
    pub fn section_zero_scheme(&self, s: &SectionVector) -> Result<ZeroScheme, PresentationError> {
        self.check_section(s)?;
        let k = s.twist;
        let f = &self.entries;
        let g: Vec<HomPoly> = (0..3).map(|i| s.reps[i].clone().with_degree(k - self.d[i])).collect();
        let mut generators = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let m = &(&f[i] * &g[j]) - &(&f[j] * &g[i]);
            if !m.is_zero() {
                generators.push(m);
            }
        }
        if generators.is_empty() {
            return Err(PresentationError::ZeroSection);
        }
        let mut degs: Vec<i64> = generators.iter().map(HomPoly::degree).collect();
        degs.sort_unstable_by(|a, b| b.cmp(a));
        let two_largest = degs[0] + degs.get(1).copied().unwrap_or(0);
        // Regularity bound from the Hilbert-Burch resolution of the minor ideal.
        let shift = self.d0 + k - self.d.iter().sum::<i64>();
        let reg = (shift + self.d0).max(shift + k) - 2;
        let bound = two_largest.max(reg).max(0);
        let a = quotient_dim(3, &generators, bound);
        let b = quotient_dim(3, &generators, bound + 1);
        let colength = if a == b { Colength::Finite(a) } else { Colength::NotFinite };
        Ok(ZeroScheme { generators, colength })
    }

    /// Looks for a nowhere-vanishing section of `F(-a)`, `a` the larger generic exponent.
    pub fn is_decomposable(&self, generic_a: i64) -> Decomposability {
        let k = -generic_a;
        let Ok(basis) = self.section_basis(k) else {
            return Decomposability::NoEvidence;
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let combos = (0..20).map(|_| {
            let mut reps = self.d.map(|di| HomPoly::zero(self.ctx, 3, k - di));
            for b in &basis {
                let c = Scalar::from_i64(self.ctx, rng.gen_range(-5..=5));
                for i in 0..3 {
                    reps[i] = &reps[i] + &b.reps[i].scale(&c);
                }
            }
            SectionVector { twist: k, reps }
        });
        for s in basis.iter().cloned().chain(combos) {
            if let Ok(z) = self.section_zero_scheme(&s) {
                if z.colength == Colength::Finite(0) {
                    return Decomposability::Yes(s);
                }
            }
        }
        Decomposability::NoEvidence
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_bundle(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homopoly::parse;
    use proptest::prelude::*;

    const Q: FieldCtx = FieldCtx::Rationals;

    pub(crate) fn pres(ctx: FieldCtx, d0: i64, d: [i64; 3], e: [&str; 3]) -> Presentation {
        Presentation::new(ctx, d0, d, e.map(|s| parse(s, 3, ctx).unwrap())).unwrap()
    }

    fn e_n(n: i64) -> Presentation {
        let xn = format!("x^{n}");
        pres(Q, n, [n - 1, n - 1, 0], ["y", "z", &xn])
    }

    fn ex62(r: i64) -> Presentation {
        let f = format!("z^{}", 2 * r + 1);
        let g = format!("x^{}", r + 1);
        let h = format!("y^{}", r + 1);
        pres(Q, 2 * r + 2, [1, r + 1, r + 1], [&f, &g, &h])
    }

    #[test]
    fn validation_certificates() {
        assert_eq!(pres(Q, 1, [0, 0, 0], ["x", "y", "z"]).certificate(), &[1, 0, 0]);
        assert_eq!(e_n(3).certificate(), &[1, 1, 1, 0, 0]);
        let bad = ["x", "x*y", "x*z"].map(|s| parse(s, 3, Q).unwrap());
        assert!(matches!(
            Presentation::new(Q, 2, [1, 0, 0], bad),
            Err(PresentationError::NotLocallyFree { degree: 4, .. })
        ));
        let bad = ["x^2", "y^2", "x*y"].map(|s| parse(s, 3, Q).unwrap());
        assert!(matches!(
            Presentation::new(Q, 2, [0, 0, 0], bad),
            Err(PresentationError::NotLocallyFree { .. })
        ));
    }

    #[test]
    fn construction_errors() {
        let e = ["x", "y", "z"].map(|s| parse(s, 3, Q).unwrap());
        assert!(matches!(
            Presentation::new(Q, 1, [0, 0, 1], e.clone()),
            Err(PresentationError::EntryDegree { index: 2, .. })
        ));
        let e = ["x", "y", "1"].map(|s| parse(s, 3, Q).unwrap());
        assert!(matches!(
            Presentation::new(Q, 1, [0, 0, 1], e),
            Err(PresentationError::ReducibleEntry { index: 2, .. })
        ));
        let e = [parse("x", 3, Q).unwrap(), parse("y", 3, Q).unwrap(), HomPoly::zero(Q, 3, 1)];
        assert!(matches!(Presentation::new(Q, 1, [0, 0, 0], e), Err(PresentationError::ZeroEntry(2))));
    }

    #[test]
    fn chern_examples() {
        for n in 1..7 {
            assert_eq!(e_n(n).chern(), ChernPair { c1: 2 - n, c2: 1 });
        }
        assert_eq!(ex62(1).chern(), ChernPair { c1: -1, c2: 4 });
        let ex61 = pres(Q, 5, [-1, 3, 3], ["z^6", "x^2", "y^2"]);
        assert_eq!(ex61.chern(), ChernPair { c1: 0, c2: 3 });
    }

    #[test]
    fn twists_and_normalization() {
        let p = e_n(3);
        assert_eq!(p.twist(0), p);
        assert_eq!(p.twist(2).chern().c1, p.chern().c1 + 4);
        assert_eq!(p.normalize().1, 0);
        let (n4, m) = e_n(4).normalize();
        assert_eq!((m, n4.chern().c1), (1, 0));
        let k = pres(Q, 0, [-1, -2, -3], ["x", "y^2", "z^3"]);
        let (kn, m) = k.normalize();
        assert_eq!((m, kn.chern().c1), (-3, 0));
        // E(1,1,n) twisted by -n has the degree profile of E_n up to order.
        for n in 1..5 {
            let kn = pres(Q, 0, [-1, -1, -n], ["x", "y", &format!("z^{n}")]).twist(-n);
            let mut d = kn.d();
            d.sort_unstable();
            assert_eq!((kn.d0(), d), (n, [0, n - 1, n - 1]));
        }
    }

    #[test]
    fn section_counts() {
        assert_eq!(e_n(3).h0(0), 1);
        let ex61 = pres(Q, 5, [-1, 3, 3], ["z^6", "x^2", "y^2"]);
        assert_eq!(ex61.h0(0), 3);
        assert_eq!(ex61.h0(-2), 0);
    }

    #[test]
    fn stability_ladder() {
        assert_eq!(e_n(1).stability_class(), Stability::Stable);
        assert_eq!(e_n(2).stability_class(), Stability::ProperlySemistable);
        for n in 3..7 {
            assert_eq!(e_n(n).stability_class(), Stability::Unstable);
        }
        assert_eq!(ex62(1).stability_class(), Stability::Stable);
    }

    #[test]
    fn section_bases() {
        let b = e_n(3).section_basis(0).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b[0].reps[0].is_zero() && b[0].reps[1].is_zero());
        assert_eq!(b[0].reps[2], HomPoly::one(Q, 3));

        let ex61 = pres(Q, 5, [-1, 3, 3], ["z^6", "x^2", "y^2"]);
        let b = ex61.section_basis(0).unwrap();
        let firsts: Vec<HomPoly> = b.iter().map(|s| s.reps[0].clone()).collect();
        assert_eq!(firsts, ["x", "y", "z"].map(|s| parse(s, 3, Q).unwrap()).to_vec());
        assert!(b.iter().all(|s| s.reps[1].is_zero() && s.reps[2].is_zero()));
        assert!(matches!(ex61.section_basis(-3), Err(PresentationError::EmptyBasis(-3))));

        // More sections than the free part: the quotient by the image must be taken.
        let p = e_n(2);
        for k in 0..5 {
            assert_eq!(p.section_basis(k).unwrap().len() as i64, p.h0(k));
        }
    }

    #[test]
    fn zero_schemes() {
        let p = e_n(3);
        let s = p.canonical_section();
        let z = p.section_zero_scheme(&s).unwrap();
        assert_eq!(z.colength, Colength::Finite(1));
        let pt = [1, 0, 0].map(|c| Scalar::from_i64(Q, c));
        assert!(z.generators.iter().all(|g| g.eval(&pt).is_zero()));

        for r in 1..3 {
            let p = ex62(r);
            let s = p.canonical_section();
            assert_eq!(s.twist, 1);
            assert_eq!(s.reps[0], HomPoly::one(Q, 3));
            let z = p.section_zero_scheme(&s).unwrap();
            let want = [format!("x^{}", r + 1), format!("y^{}", r + 1)].map(|t| parse(&t, 3, Q).unwrap());
            assert_eq!(z.generators.len(), 2);
            for g in &z.generators {
                assert!(want.iter().any(|w| w == g || *w == -g));
            }
            let c2 = p.twist(1).chern().c2;
            assert_eq!(z.colength, Colength::Finite(((r + 1) * (r + 1)) as usize));
            assert_eq!(c2, (r + 1) * (r + 1));
        }
    }

    #[test]
    fn colength_matches_c2_on_bases() {
        let ex61 = pres(Q, 5, [-1, 3, 3], ["z^6", "x^2", "y^2"]);
        for p in [e_n(2), e_n(4), ex62(1), ex61] {
            for k in p.d().iter().copied().min().unwrap()..p.d0() + 1 {
                let Ok(basis) = p.section_basis(k) else { continue };
                for s in basis.iter().take(4) {
                    if let Colength::Finite(c) = p.section_zero_scheme(s).unwrap().colength {
                        assert_eq!(c as i64, p.twist(k).chern().c2, "twist {k} of {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn decomposability_probe() {
        assert_eq!(e_n(3).is_decomposable(0), Decomposability::NoEvidence);
        let k222 = pres(Q, 0, [-2, -2, -2], ["x^2", "y^2", "z^2"]);
        assert_eq!(k222.is_decomposable(3), Decomposability::NoEvidence);
        // (x, y, z^2) with d = (2,2,1) is E_2(-1) up to order: c1 = -2, c2 = 2 has no split form.
        let twisted_e2 = pres(Q, 3, [2, 2, 1], ["x", "y", "z^2"]);
        assert_eq!(twisted_e2.is_decomposable(0), Decomposability::NoEvidence);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn invariants_under_permutation_and_scaling(
            n in 1i64..5, perm in Just([0usize, 1, 2]).prop_shuffle(), sc in prop::array::uniform3(1i64..6), k in -3i64..6, m in -4i64..4
        ) {
            let p = e_n(n);
            let perm: [usize; 3] = perm;
            let q = p.permuted(perm).scaled(&sc.map(|c| Scalar::from_i64(Q, c)));
            prop_assert_eq!(q.chern(), p.chern());
            prop_assert_eq!(q.h0(k), p.h0(k));
            prop_assert!(p.h0(k) <= p.h0(k + 1));
            prop_assert_eq!(p.twist(m).chern().c1, p.chern().c1 + 2 * m);
        }
    }
}

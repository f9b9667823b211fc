//! Constructors for the explicit bundle families.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::exactalg::{FieldCtx, Scalar};
use crate::homopoly::{graded_dim, parse, HomPoly, PolyError};
use crate::presentation::{Presentation, PresentationError};
use crate::projgeom::{incidence, LineP2, PointP2};
use crate::splitting::SplittingType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("{family}: {condition}")]
    Invalid { family: &'static str, condition: String },
    #[error("cannot parse family spec {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("polynomial f: {0}")]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// One member of a family. `f` is the free form of the pencil examples, kept as text;
/// `None` selects the canonical power of `z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FamilySpec {
    Kaneyama { a: i64, b: i64, c: i64 },
    NearlyFree { a: i64, b: i64 },
    En { n: i64 },
    Example61 { r: i64, k: i64, c1: i64, f: Option<String> },
    Example62 { r: i64, f: Option<String> },
}

fn invalid(family: &'static str, condition: impl Into<String>) -> FamilyError {
    FamilyError::Invalid {
        family,
        condition: condition.into(),
    }
}

fn power(ctx: FieldCtx, var: usize, n: i64) -> HomPoly {
    HomPoly::var(ctx, 3, var).pow(n as u32)
}

fn free_form(family: &'static str, ctx: FieldCtx, f: &Option<String>, degree: i64) -> Result<HomPoly, FamilyError> {
    let f = match f {
        Some(text) => parse(text, 3, ctx)?,
        None => power(ctx, 2, degree),
    };
    if f.is_zero() || f.degree() != degree {
        return Err(invalid(family, format!("f must be a nonzero form of degree {degree}, got degree {}", f.degree())));
    }
    let p = [0, 0, 1].map(|c| Scalar::from_i64(ctx, c));
    if f.eval(&p).is_zero() {
        return Err(invalid(family, "f must not vanish at p = (0:0:1)"));
    }
    Ok(f)
}

impl FamilySpec {
    pub fn build(&self, ctx: FieldCtx) -> Result<Presentation, FamilyError> {
        let x = |n| power(ctx, 0, n);
        let y = |n| power(ctx, 1, n);
        let z = |n| power(ctx, 2, n);
        let p = match *self {
            FamilySpec::Kaneyama { a, b, c } => {
                if a < 1 || b < 1 || c < 1 {
                    return Err(invalid("kaneyama", "exponents a, b, c must be positive integers"));
                }
                Presentation::new(ctx, 0, [-a, -b, -c], [x(a), y(b), z(c)])?
            }
            FamilySpec::NearlyFree { a, b } => {
                if !(1 <= a && a <= b) {
                    return Err(invalid("nf", "exponents must satisfy 1 <= a <= b"));
                }
                Presentation::new(ctx, b + 1, [a, b, b], [z(b - a + 1), x(1), y(1)])?
            }
            FamilySpec::En { n } => {
                if n < 1 {
                    return Err(invalid("en", "n must be at least 1"));
                }
                Presentation::new(ctx, n, [n - 1, n - 1, 0], [y(1), z(1), x(n)])?
            }
            FamilySpec::Example61 { r, k, c1, ref f } => {
                if r < 1 || k < 0 || !(c1 == -1 || c1 == 0) {
                    return Err(invalid("ex61", "need r >= 1, k >= 0 and c1 in {-1, 0}"));
                }
                let f = free_form("ex61", ctx, f, 2 * r + 2 * k - c1)?;
                let e = r + k - c1;
                Presentation::new(ctx, 2 * r + k - c1, [-k, e, e], [f, x(r), y(r)])?
            }
            FamilySpec::Example62 { r, ref f } => {
                if r < 1 {
                    return Err(invalid("ex62", "need r >= 1"));
                }
                let f = free_form("ex62", ctx, f, 2 * r + 1)?;
                Presentation::new(ctx, 2 * r + 2, [1, r + 1, r + 1], [f, x(r + 1), y(r + 1)])?
            }
        };
        Ok(p)
    }

    /// Parses the CLI syntax, e.g. `en:3`, `kaneyama:1,2,3`, `nf:2,4`,
    /// `ex61:r=2,k=1,c1=0,f=z^6`, `ex62:r=1,f=z^3`.
    pub fn parse(text: &str) -> Result<FamilySpec, FamilyError> {
        let err = |reason: &str| FamilyError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let (name, args) = text.trim().split_once(':').ok_or_else(|| err("expected `<family>:<parameters>`"))?;
        let ints = |want: usize| -> Result<Vec<i64>, FamilyError> {
            let v: Vec<i64> = args
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| err("parameters must be integers"))?;
            if v.len() != want {
                return Err(err(&format!("expected {want} parameter(s)")));
            }
            Ok(v)
        };
        let keyed = |allowed: &[&str]| -> Result<std::collections::BTreeMap<String, String>, FamilyError> {
            let mut out = std::collections::BTreeMap::new();
            for part in args.split(',') {
                let (k, v) = part.split_once('=').ok_or_else(|| err("expected key=value parameters"))?;
                let k = k.trim();
                if !allowed.contains(&k) {
                    return Err(err(&format!("unknown parameter {k:?}")));
                }
                if out.insert(k.to_string(), v.trim().to_string()).is_some() {
                    return Err(err(&format!("duplicate parameter {k:?}")));
                }
            }
            Ok(out)
        };
        let int_of = |m: &std::collections::BTreeMap<String, String>, k: &str| -> Result<i64, FamilyError> {
            m.get(k)
                .ok_or_else(|| err(&format!("missing parameter {k:?}")))?
                .parse()
                .map_err(|_| err(&format!("parameter {k:?} must be an integer")))
        };
        match name.trim() {
            "kaneyama" => {
                let v = ints(3)?;
                Ok(FamilySpec::Kaneyama { a: v[0], b: v[1], c: v[2] })
            }
            "nf" => {
                let v = ints(2)?;
                Ok(FamilySpec::NearlyFree { a: v[0], b: v[1] })
            }
            "en" => Ok(FamilySpec::En { n: ints(1)?[0] }),
            "ex61" => {
                let m = keyed(&["r", "k", "c1", "f"])?;
                Ok(FamilySpec::Example61 {
                    r: int_of(&m, "r")?,
                    k: int_of(&m, "k")?,
                    c1: int_of(&m, "c1")?,
                    f: m.get("f").cloned(),
                })
            }
            "ex62" => {
                let m = keyed(&["r", "f"])?;
                Ok(FamilySpec::Example62 {
                    r: int_of(&m, "r")?,
                    f: m.get("f").cloned(),
                })
            }
            other => Err(err(&format!("unknown family {other:?}"))),
        }
    }

    /// The jumping point singled out by the family, when there is one.
    pub fn distinguished_point(&self, ctx: FieldCtx) -> Option<PointP2> {
        match self {
            FamilySpec::En { .. } => Some(PointP2::from_i64(ctx, [1, 0, 0]).unwrap()),
            FamilySpec::NearlyFree { .. } | FamilySpec::Example61 { .. } | FamilySpec::Example62 { .. } => {
                Some(PointP2::from_i64(ctx, [0, 0, 1]).unwrap())
            }
            FamilySpec::Kaneyama { .. } => None,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Kaneyama { a, b, c } => write!(fm, "kaneyama:{a},{b},{c}"),
            FamilySpec::NearlyFree { a, b } => write!(fm, "nf:{a},{b}"),
            FamilySpec::En { n } => write!(fm, "en:{n}"),
            FamilySpec::Example61 { r, k, c1, f } => {
                let f = f.clone().unwrap_or_else(|| format!("z^{}", 2 * r + 2 * k - c1));
                write!(fm, "ex61:r={r},k={k},c1={c1},f={f}")
            }
            FamilySpec::Example62 { r, f } => {
                let f = f.clone().unwrap_or_else(|| format!("z^{}", 2 * r + 1));
                write!(fm, "ex62:r={r},f={f}")
            }
        }
    }
}

/// Every family member with parameters up to `bound`, canonical `f`.
pub fn catalog(bound: i64) -> Vec<FamilySpec> {
    assert!(bound >= 1, "catalog bound must be positive");
    let mut out = Vec::new();
    for a in 1..=bound {
        for b in a..=bound {
            for c in b..=bound {
                out.push(FamilySpec::Kaneyama { a, b, c });
            }
        }
    }
    out.extend((1..=bound).map(|n| FamilySpec::En { n }));
    for a in 1..=bound {
        for b in a..=bound {
            out.push(FamilySpec::NearlyFree { a, b });
        }
    }
    for r in 1..=bound {
        for k in 0..=bound {
            for c1 in [-1, 0] {
                out.push(FamilySpec::Example61 { r, k, c1, f: None });
            }
        }
    }
    out.extend((1..=bound).map(|r| FamilySpec::Example62 { r, f: None }));
    out
}

/// A random presentation with `c1 = 0`: weights in `1..=3` with even sum and
/// `d0 = Σw/2`, random entries, resampled until locally free.
pub fn random_c1_zero<R: Rng + ?Sized>(ctx: FieldCtx, rng: &mut R) -> Presentation {
    loop {
        let w: [i64; 3] = std::array::from_fn(|_| rng.gen_range(1..=3));
        let total: i64 = w.iter().sum();
        if total % 2 != 0 {
            continue;
        }
        let d0 = total / 2;
        let entries = w.map(|deg| {
            let coeffs: Vec<Scalar> = (0..graded_dim(3, deg))
                .map(|_| match ctx.modulus() {
                    Some(q) => Scalar::from_i64(ctx, rng.gen_range(0..q) as i64),
                    None => Scalar::from_i64(ctx, rng.gen_range(-5..=5)),
                })
                .collect();
            HomPoly::from_coeff_vector(ctx, 3, deg, &coeffs)
        });
        if let Ok(p) = Presentation::new(ctx, d0, w.map(|wi| d0 - wi), entries) {
            return p;
        }
    }
}

/// Closed-form splitting of the normalized twist of `E(a,b,c)`, `a ≤ b ≤ c`, on `l`.
pub fn kaneyama_normalized_splitting(a: i64, b: i64, c: i64, l: &LineP2) -> SplittingType {
    assert!(1 <= a && a <= b && b <= c, "need 1 <= a <= b <= c");
    let ctx = l.ctx();
    let c1 = -(a + b + c).rem_euclid(2);
    let pt = |v| PointP2::from_i64(ctx, v).unwrap();
    let (p1, p2, p3) = (pt([1, 0, 0]), pt([0, 1, 0]), pt([0, 0, 1]));
    let l1 = LineP2::from_i64(ctx, [1, 0, 0]).unwrap();
    let l2 = LineP2::from_i64(ctx, [0, 1, 0]).unwrap();
    let half = |v: i64| v / 2;
    if *l == l1 {
        return SplittingType::new(half(a - b - c + c1), half(b + c - a + c1));
    }
    if incidence(&p3, l) {
        return SplittingType::new(half(b - a - c + c1), half(a + c - b + c1));
    }
    if (incidence(&p1, l) || incidence(&p2, l)) && *l != l2 {
        return SplittingType::new(half(c - a - b + c1), half(a + b - c + c1));
    }
    let k = if c < a + b { 0 } else { half(c - a - b + c1) };
    SplittingType::new(k, c1 - k)
}

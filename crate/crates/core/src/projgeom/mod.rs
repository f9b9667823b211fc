//! Points and lines of the projective plane over a [`FieldCtx`].

use std::fmt;

use num_integer::Integer;
use rand::Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactalg::{DenseMatrix, FieldCtx, Scalar};

/// Bound on rational line coefficients drawn by [`random_line`].
pub const RATIONAL_SAMPLE_BOUND: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("the zero vector is not a projective point or line")]
    ZeroVector,
    #[error("the two {0} coincide, so they do not determine a unique {1}")]
    Coincident(&'static str, &'static str),
    #[error("exhaustive enumeration needs a prime field, got {0}")]
    UnsupportedEnumeration(FieldCtx),
    #[error("cannot parse {what} literal {text:?}: {reason}")]
    Parse {
        what: &'static str,
        text: String,
        reason: String,
    },
}

fn normalize(v: [Scalar; 3]) -> Result<[Scalar; 3], GeomError> {
    let Some(lead) = v.iter().find(|c| !c.is_zero()) else {
        return Err(GeomError::ZeroVector);
    };
    let inv = lead.inv().expect("nonzero lead");
    Ok([&v[0] * &inv, &v[1] * &inv, &v[2] * &inv])
}

fn cross(a: &[Scalar; 3], b: &[Scalar; 3]) -> [Scalar; 3] {
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

fn dot(a: &[Scalar; 3], b: &[Scalar; 3]) -> Scalar {
    &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
}

fn parse_triple(
    ctx: FieldCtx,
    what: &'static str,
    text: &str,
    inner: &str,
    sep: char,
) -> Result<[Scalar; 3], GeomError> {
    let err = |reason: String| GeomError::Parse {
        what,
        text: text.to_string(),
        reason,
    };
    let parts: Vec<&str> = inner.split(sep).map(str::trim).collect();
    if parts.len() != 3 {
        return Err(err(format!("expected 3 coordinates, found {}", parts.len())));
    }
    let mut out = Vec::with_capacity(3);
    for part in parts {
        let n: num_bigint::BigInt = part
            .parse()
            .map_err(|_| err(format!("{part:?} is not an integer")))?;
        out.push(Scalar::from_bigint(ctx, &n));
    }
    let arr: [Scalar; 3] = out.try_into().expect("three coordinates");
    normalize(arr).map_err(|e| err(e.to_string()))
}

macro_rules! projective_type {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name {
            v: [Scalar; 3],
        }

        impl $name {
            pub fn new(v: [Scalar; 3]) -> Result<Self, GeomError> {
                let ctx = v[0].ctx();
                assert!(v.iter().all(|c| c.ctx() == ctx), "field mismatch");
                Ok($name { v: normalize(v)? })
            }

            pub fn from_i64(ctx: FieldCtx, v: [i64; 3]) -> Result<Self, GeomError> {
                $name::new(v.map(|c| Scalar::from_i64(ctx, c)))
            }

            pub fn coords(&self) -> &[Scalar; 3] {
                &self.v
            }

            pub fn ctx(&self) -> FieldCtx {
                self.v[0].ctx()
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }
    };
}

projective_type!(PointP2, "A point of the plane with first nonzero coordinate equal to 1.");
projective_type!(LineP2, "A line given by its normalized linear form.");

impl PointP2 {
    /// The line whose coefficients are this point's coordinates.
    pub fn dual(&self) -> LineP2 {
        LineP2 { v: self.v.clone() }
    }

    /// Parses `"a:b:c"`.
    pub fn parse(text: &str, ctx: FieldCtx) -> Result<Self, GeomError> {
        let v = parse_triple(ctx, "point", text, text.trim(), ':')?;
        Ok(PointP2 { v })
    }

    pub fn column(&self) -> Vec<Scalar> {
        self.v.to_vec()
    }
}

impl LineP2 {
    pub fn dual(&self) -> PointP2 {
        PointP2 { v: self.v.clone() }
    }

    /// Parses `"[a,b,c]"` (brackets optional).
    pub fn parse(text: &str, ctx: FieldCtx) -> Result<Self, GeomError> {
        let t = text.trim();
        let inner = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')).unwrap_or(t);
        let v = parse_triple(ctx, "line", text, inner, ',')?;
        Ok(LineP2 { v })
    }

    pub fn contains(&self, p: &PointP2) -> bool {
        incidence(p, self)
    }
}

impl fmt::Display for PointP2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{}:{})", self.v[0], self.v[1], self.v[2])
    }
}

impl fmt::Display for LineP2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.v[0], self.v[1], self.v[2])
    }
}

pub fn incidence(p: &PointP2, l: &LineP2) -> bool {
    dot(&p.v, &l.v).is_zero()
}

pub fn line_through(p: &PointP2, q: &PointP2) -> Result<LineP2, GeomError> {
    LineP2::new(cross(&p.v, &q.v)).map_err(|_| GeomError::Coincident("points", "line"))
}

pub fn intersection(l: &LineP2, m: &LineP2) -> Result<PointP2, GeomError> {
    PointP2::new(cross(&l.v, &m.v)).map_err(|_| GeomError::Coincident("lines", "point"))
}

/// Two normalized vectors spanning the kernel of the form `v`. The candidates are
/// `(v1,-v0,0)`, `(0,v2,-v1)`, `(v2,0,-v0)`, taken in that order and skipping
/// zero or repeated ones.
fn kernel_pair(v: &[Scalar; 3]) -> ([Scalar; 3], [Scalar; 3]) {
    let z = Scalar::zero(v[0].ctx());
    let a = [v[1].clone(), -&v[0], z.clone()];
    let b = [z.clone(), v[2].clone(), -&v[1]];
    let c = [v[2].clone(), z, -&v[0]];
    let c_norm = normalize(c).ok();
    let first = normalize(a).ok().or_else(|| c_norm.clone()).expect("nonzero form");
    let second = match normalize(b) {
        Ok(b) if b != first => b,
        _ => c_norm.expect("independent second point"),
    };
    (first, second)
}

/// A 3×2 matrix whose columns are two normalized points spanning `l`.
pub fn parametrize(l: &LineP2) -> DenseMatrix {
    let (u, v) = kernel_pair(&l.v);
    DenseMatrix::from_columns(l.ctx(), 3, &[u.to_vec(), v.to_vec()])
}

/// The points `param·(s,t)` for a chart from [`parametrize`].
pub fn point_on(l: &LineP2, s: &Scalar, t: &Scalar) -> PointP2 {
    let (u, v) = kernel_pair(&l.v);
    PointP2::new([0, 1, 2].map(|i| &(&u[i] * s) + &(&v[i] * t))).expect("nonzero combination")
}

/// Coprime slope pairs `(s, t)` with `s ≥ 1`, `t ≠ 0`, ordered by `max(|s|,|t|)`.
struct Spiral {
    h: i64,
    queue: std::collections::VecDeque<(i64, i64)>,
}

impl Spiral {
    fn new() -> Self {
        Spiral {
            h: 0,
            queue: Default::default(),
        }
    }
}

impl Iterator for Spiral {
    type Item = (i64, i64);

    fn next(&mut self) -> Option<(i64, i64)> {
        while self.queue.is_empty() {
            self.h += 1;
            let h = self.h;
            for s in 1..h {
                if s.gcd(&h) == 1 {
                    self.queue.push_back((s, -h));
                    self.queue.push_back((s, h));
                }
            }
            for t in 1..=h {
                if t.gcd(&h) == 1 {
                    self.queue.push_back((h, -t));
                    self.queue.push_back((h, t));
                }
            }
        }
        self.queue.pop_front()
    }
}

/// Lines through `p`: finite (q+1 lines) over `F_q`, unbounded over `Q`.
pub struct Pencil {
    u: [Scalar; 3],
    v: [Scalar; 3],
    ctx: FieldCtx,
    emitted: u64,
    spiral: Spiral,
}

impl Iterator for Pencil {
    type Item = LineP2;

    fn next(&mut self) -> Option<LineP2> {
        let (s, t) = match (self.emitted, self.ctx) {
            (0, _) => (1, 0),
            (1, _) => (0, 1),
            (k, FieldCtx::Prime(q)) if k <= q => (1, (k - 1) as i64),
            (_, FieldCtx::Prime(_)) => return None,
            (_, FieldCtx::Rationals) => self.spiral.next().expect("unbounded spiral"),
        };
        self.emitted += 1;
        let (s, t) = (Scalar::from_i64(self.ctx, s), Scalar::from_i64(self.ctx, t));
        let v = [0, 1, 2].map(|i| &(&self.u[i] * &s) + &(&self.v[i] * &t));
        Some(LineP2::new(v).expect("independent pencil generators"))
    }
}

pub fn pencil_through(p: &PointP2, field: FieldCtx) -> Pencil {
    assert_eq!(p.ctx(), field, "field mismatch");
    let (u, v) = kernel_pair(&p.v);
    Pencil {
        u,
        v,
        ctx: field,
        emitted: 0,
        spiral: Spiral::new(),
    }
}

fn enumerate_triples(q: u64) -> impl Iterator<Item = [i64; 3]> {
    let q = q as i64;
    std::iter::once([0, 0, 1])
        .chain((0..q).map(|c| [0, 1, c]))
        .chain((0..q).flat_map(move |b| (0..q).map(move |c| [1, b, c])))
}

/// All `q²+q+1` lines over `F_q`.
pub fn enumerate_lines(field: FieldCtx) -> Result<impl Iterator<Item = LineP2>, GeomError> {
    let FieldCtx::Prime(q) = field else {
        return Err(GeomError::UnsupportedEnumeration(field));
    };
    Ok(enumerate_triples(q).map(move |v| LineP2::from_i64(field, v).expect("nonzero")))
}

/// All `q²+q+1` points over `F_q`.
pub fn enumerate_points(field: FieldCtx) -> Result<impl Iterator<Item = PointP2>, GeomError> {
    let FieldCtx::Prime(q) = field else {
        return Err(GeomError::UnsupportedEnumeration(field));
    };
    Ok(enumerate_triples(q).map(move |v| PointP2::from_i64(field, v).expect("nonzero")))
}

fn random_scalar<R: Rng + ?Sized>(field: FieldCtx, rng: &mut R) -> Scalar {
    match field {
        FieldCtx::Prime(q) => Scalar::from_i64(field, rng.gen_range(0..q) as i64),
        FieldCtx::Rationals => Scalar::from_i64(
            field,
            rng.gen_range(-RATIONAL_SAMPLE_BOUND..=RATIONAL_SAMPLE_BOUND),
        ),
    }
}

pub fn random_line<R: Rng + ?Sized>(field: FieldCtx, rng: &mut R) -> LineP2 {
    loop {
        let v = [(); 3].map(|_| random_scalar(field, rng));
        if let Ok(l) = LineP2::new(v) {
            return l;
        }
    }
}

pub fn random_point<R: Rng + ?Sized>(field: FieldCtx, rng: &mut R) -> PointP2 {
    random_line(field, rng).dual()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    const Q: FieldCtx = FieldCtx::Rationals;
    const F5: FieldCtx = FieldCtx::Prime(5);

    fn pt(ctx: FieldCtx, v: [i64; 3]) -> PointP2 {
        PointP2::from_i64(ctx, v).unwrap()
    }

    fn ln(ctx: FieldCtx, v: [i64; 3]) -> LineP2 {
        LineP2::from_i64(ctx, v).unwrap()
    }

    #[test]
    fn lines_through_points() {
        assert_eq!(line_through(&pt(Q, [1, 0, 0]), &pt(Q, [0, 1, 0])).unwrap(), ln(Q, [0, 0, 1]));
        assert_eq!(line_through(&pt(Q, [1, 0, 0]), &pt(Q, [0, 0, 1])).unwrap(), ln(Q, [0, 1, 0]));
        assert_eq!(line_through(&pt(Q, [1, 1, 1]), &pt(Q, [1, 0, 0])).unwrap(), ln(Q, [0, 1, -1]));
        assert!(matches!(
            line_through(&pt(Q, [2, 0, 0]), &pt(Q, [1, 0, 0])),
            Err(GeomError::Coincident(..))
        ));
    }

    #[test]
    fn parametrizations() {
        let cols = |l: [i64; 3]| {
            let m = parametrize(&ln(Q, l));
            (m.column(0), m.column(1))
        };
        let s = |v: [i64; 3]| v.map(|c| Scalar::from_i64(Q, c)).to_vec();
        assert_eq!(cols([0, 0, 1]), (s([1, 0, 0]), s([0, 1, 0])));
        assert_eq!(cols([1, 0, 0]), (s([0, 1, 0]), s([0, 0, 1])));
        assert_eq!(cols([1, 1, 1]), (s([1, -1, 0]), s([0, 1, -1])));
        assert_eq!(cols([0, 1, 0]), (s([1, 0, 0]), s([0, 0, 1])));
        assert_eq!(cols([1, 0, 1]), (s([0, 1, 0]), s([1, 0, -1])));
    }

    #[test]
    fn pencils() {
        let p = pt(F5, [1, 0, 0]);
        let lines: Vec<_> = pencil_through(&p, F5).collect();
        assert_eq!(lines.len(), 6);
        assert!(lines.iter().all(|l| l.contains(&p)));
        assert_eq!(lines.iter().collect::<HashSet<_>>().len(), 6);

        let p = pt(Q, [1, 0, 0]);
        let first: Vec<_> = pencil_through(&p, Q).take(3).collect();
        assert_eq!(first, vec![ln(Q, [0, 1, 0]), ln(Q, [0, 0, 1]), ln(Q, [0, 1, -1])]);
        let many: Vec<_> = pencil_through(&pt(Q, [2, -3, 5]), Q).take(200).collect();
        assert_eq!(many.iter().collect::<HashSet<_>>().len(), 200);
        assert!(many.iter().all(|l| l.contains(&pt(Q, [2, -3, 5]))));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_lines(F5).unwrap().count(), 31);
        assert_eq!(enumerate_lines(FieldCtx::Prime(7)).unwrap().count(), 57);
        assert!(matches!(enumerate_lines(Q), Err(GeomError::UnsupportedEnumeration(_))));
        let lines: Vec<_> = enumerate_lines(F5).unwrap().collect();
        for (i, a) in lines.iter().enumerate() {
            for b in &lines[i + 1..] {
                let p = intersection(a, b).unwrap();
                assert!(a.contains(&p) && b.contains(&p));
            }
        }
        for p in enumerate_points(F5).unwrap() {
            assert_eq!(lines.iter().filter(|l| l.contains(&p)).count(), 6);
        }
    }

    #[test]
    fn sampling() {
        let a = random_line(Q, &mut ChaCha8Rng::seed_from_u64(42));
        let b = random_line(Q, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
        let f101 = FieldCtx::Prime(101);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let distinct: HashSet<_> = (0..1000).map(|_| random_line(f101, &mut rng)).collect();
        assert!(distinct.len() >= 950, "only {} distinct", distinct.len());
    }

    #[test]
    fn literals_and_duality() {
        assert_eq!(PointP2::parse("2:0:-4", Q).unwrap(), pt(Q, [1, 0, -2]));
        assert_eq!(LineP2::parse("[0, 1, 0]", Q).unwrap(), ln(Q, [0, 1, 0]));
        assert!(PointP2::parse("0:0:0", Q).is_err());
        assert!(LineP2::parse("[1,2]", Q).is_err());
        assert!(LineP2::parse("[a,1,2]", Q).is_err());
        let p = pt(F5, [1, 3, 4]);
        assert_eq!(p.dual().dual(), p);
        assert_eq!(p.to_string(), "(1:3:4)");
        assert_eq!(p.dual().to_string(), "[1,3,4]");
    }

    proptest::proptest! {
        #[test]
        fn join_contains_both(a in proptest::array::uniform3(-5i64..=5), b in proptest::array::uniform3(-5i64..=5)) {
            let (Ok(p), Ok(q)) = (PointP2::from_i64(Q, a), PointP2::from_i64(Q, b)) else { return Ok(()); };
            proptest::prop_assume!(p != q);
            let l = line_through(&p, &q).unwrap();
            proptest::prop_assert!(l.contains(&p) && l.contains(&q));
            let m = parametrize(&l);
            proptest::prop_assert_eq!(crate::exactalg::rank(&m), 2);
            for j in 0..2 {
                proptest::prop_assert!(l.contains(&PointP2::new(m.column(j).try_into().unwrap()).unwrap()));
            }
        }
    }
}

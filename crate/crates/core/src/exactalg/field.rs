use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is too small (need at least 5)")]
    TooSmall(u64),
    #[error("modulus {0} is too large (must fit in 32 bits)")]
    TooLarge(u64),
    #[error("cannot parse field descriptor {0:?} (expected \"Q\" or \"Fp:<prime>\")")]
    BadDescriptor(String),
}

/// The ambient field of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldCtx {
    Rationals,
    Prime(u64),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    pub fn prime(q: u64) -> Result<Self, FieldError> {
        if q < 5 {
            return Err(FieldError::TooSmall(q));
        }
        if q > u32::MAX as u64 {
            return Err(FieldError::TooLarge(q));
        }
        if !is_prime(q) {
            return Err(FieldError::NotPrime(q));
        }
        Ok(FieldCtx::Prime(q))
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            FieldCtx::Rationals => None,
            FieldCtx::Prime(q) => Some(*q),
        }
    }

    pub fn is_prime_field(&self) -> bool {
        matches!(self, FieldCtx::Prime(_))
    }

    /// Parses `Q` or `Fp:<prime>` (also accepts `Fp <prime>` as used in bundle files).
    pub fn parse(text: &str) -> Result<Self, FieldError> {
        let t = text.trim();
        if t == "Q" {
            return Ok(FieldCtx::Rationals);
        }
        let rest = t
            .strip_prefix("Fp")
            .ok_or_else(|| FieldError::BadDescriptor(text.to_string()))?;
        let rest = rest.trim_start_matches([':', ' ']).trim();
        let q: u64 = rest
            .parse()
            .map_err(|_| FieldError::BadDescriptor(text.to_string()))?;
        FieldCtx::prime(q)
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldCtx::Rationals => write!(f, "Q"),
            FieldCtx::Prime(q) => write!(f, "Fp:{q}"),
        }
    }
}

/// An exact element of a [`FieldCtx`].
///
/// Rationals are kept in lowest terms with a positive denominator (guaranteed by
/// `BigRational`); residues are kept in `[0, modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

impl Scalar {
    pub fn zero(ctx: FieldCtx) -> Self {
        Scalar::from_i64(ctx, 0)
    }

    pub fn one(ctx: FieldCtx) -> Self {
        Scalar::from_i64(ctx, 1)
    }

    pub fn from_i64(ctx: FieldCtx, n: i64) -> Self {
        match ctx {
            FieldCtx::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            FieldCtx::Prime(q) => Scalar::Residue {
                value: n.rem_euclid(q as i64) as u64,
                modulus: q,
            },
        }
    }

    pub fn from_bigint(ctx: FieldCtx, n: &BigInt) -> Self {
        match ctx {
            FieldCtx::Rationals => Scalar::Rational(BigRational::from_integer(n.clone())),
            FieldCtx::Prime(q) => {
                let r = n.mod_floor_u64(q);
                Scalar::Residue { value: r, modulus: q }
            }
        }
    }

    /// `num / den` in the field; `None` when `den` vanishes in the field.
    pub fn from_fraction(ctx: FieldCtx, num: &BigInt, den: &BigInt) -> Option<Self> {
        let d = Scalar::from_bigint(ctx, den);
        if d.is_zero() {
            return None;
        }
        Some(&Scalar::from_bigint(ctx, num) / &d)
    }

    pub fn from_rational(ctx: FieldCtx, r: &BigRational) -> Option<Self> {
        Scalar::from_fraction(ctx, r.numer(), r.denom())
    }

    pub fn ctx(&self) -> FieldCtx {
        match self {
            Scalar::Rational(_) => FieldCtx::Rationals,
            Scalar::Residue { modulus, .. } => FieldCtx::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: mod_pow(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        let mut acc = Scalar::one(self.ctx());
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// The rational value, if this is a rational scalar.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Residue { .. } => None,
        }
    }

    /// Small integer value, if the scalar is an integer that fits (residues report their
    /// representative in `[0, q)`).
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(r) if r.is_integer() => r.to_integer().to_i64(),
            Scalar::Rational(_) => None,
            Scalar::Residue { value, .. } => Some(*value as i64),
        }
    }

    /// Whether the scalar is an integer (always true for residues).
    pub fn is_integral(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_integer(),
            Scalar::Residue { .. } => true,
        }
    }

    /// True for a negative rational; residues are never negative.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_negative(),
            Scalar::Residue { .. } => false,
        }
    }

    fn check_same(&self, other: &Scalar) {
        if self.ctx() != other.ctx() {
            panic!("field mismatch: {} vs {}", self.ctx(), other.ctx());
        }
    }
}

trait ModFloor {
    fn mod_floor_u64(&self, q: u64) -> u64;
}

impl ModFloor for BigInt {
    fn mod_floor_u64(&self, q: u64) -> u64 {
        let m = BigInt::from(q);
        let r = ((self % &m) + &m) % &m;
        r.to_u64().expect("residue fits in u64")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Canonical total order: numeric order for rationals, representative order for residues.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            (
                Scalar::Residue { value: a, modulus: m },
                Scalar::Residue { value: b, modulus: n },
            ) => (m, a).cmp(&(n, b)),
            (Scalar::Rational(_), Scalar::Residue { .. }) => Ordering::Less,
            (Scalar::Residue { .. }, Scalar::Rational(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: (a + b) % modulus,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: (a + modulus - b) % modulus,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: ((*a as u128 * *b as u128) % *modulus as u128) as u64,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero.
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero scalar");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

//! Homogeneous polynomials in `k[x,y,z]` and `k[s,t]`.
//!
//! Monomials are ordered lexicographically with `x > y > z` (and `s > t`). Graded pieces
//! are listed in descending order, so the basis of degree `d` starts at `x^d` (or `s^d`).

mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::exactalg::{rank, DenseMatrix, FieldCtx, Scalar};

pub use parse::parse;

/// Exponent vector; the third slot is unused (always 0) for two-variable polynomials.
pub type Exps = [u32; 3];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("inhomogeneous polynomial: monomials of degree {first} and {second}")]
    Inhomogeneous { first: u32, second: u32 },
    #[error("unknown variable {name:?} at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(i64, i64),
    #[error("variable count mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("degenerate line parametrization (rank below 2)")]
    DegenerateLine,
    #[error("gcd of two zero polynomials is undefined")]
    UndefinedGcd,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomPoly {
    nvars: usize,
    degree: i64,
    ctx: FieldCtx,
    terms: BTreeMap<Exps, Scalar>,
}

/// Dimension of the space of degree-`d` forms in `nvars` variables (0 for negative `d`).
pub fn graded_dim(nvars: usize, d: i64) -> usize {
    if d < 0 {
        return 0;
    }
    let d = d as usize;
    match nvars {
        2 => d + 1,
        3 => (d + 1) * (d + 2) / 2,
        _ => panic!("only 2 or 3 variables are supported"),
    }
}

/// Monomials of degree `d` in descending lex order.
pub fn monomial_basis(nvars: usize, d: i64) -> Vec<Exps> {
    if d < 0 {
        return Vec::new();
    }
    let d = d as u32;
    match nvars {
        2 => (0..=d).map(|j| [d - j, j, 0]).collect(),
        3 => {
            let mut out = Vec::with_capacity(graded_dim(3, d as i64));
            for a in (0..=d).rev() {
                for b in (0..=d - a).rev() {
                    out.push([a, b, d - a - b]);
                }
            }
            out
        }
        _ => panic!("only 2 or 3 variables are supported"),
    }
}

/// Position of a monomial inside [`monomial_basis`] of its degree.
pub fn monomial_index(nvars: usize, e: Exps) -> usize {
    match nvars {
        2 => e[1] as usize,
        3 => {
            let rest = (e[1] + e[2]) as usize;
            rest * (rest + 1) / 2 + e[2] as usize
        }
        _ => panic!("only 2 or 3 variables are supported"),
    }
}

fn exps_degree(e: &Exps) -> u32 {
    e[0] + e[1] + e[2]
}

fn add_exps(a: &Exps, b: &Exps) -> Exps {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn var_names(nvars: usize) -> &'static [char] {
    match nvars {
        2 => &['s', 't'],
        _ => &['x', 'y', 'z'],
    }
}

impl HomPoly {
    pub fn zero(ctx: FieldCtx, nvars: usize, degree: i64) -> Self {
        assert!(nvars == 2 || nvars == 3, "only 2 or 3 variables are supported");
        HomPoly {
            nvars,
            degree,
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: FieldCtx, nvars: usize, c: Scalar) -> Self {
        HomPoly::monomial(ctx, nvars, c, [0, 0, 0])
    }

    pub fn one(ctx: FieldCtx, nvars: usize) -> Self {
        HomPoly::constant(ctx, nvars, Scalar::one(ctx))
    }

    pub fn monomial(ctx: FieldCtx, nvars: usize, c: Scalar, e: Exps) -> Self {
        assert!(nvars == 3 || e[2] == 0, "two-variable monomial uses a third exponent");
        let mut p = HomPoly::zero(ctx, nvars, exps_degree(&e) as i64);
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    /// The variable with index `i` (x, y, z or s, t).
    pub fn var(ctx: FieldCtx, nvars: usize, i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        HomPoly::monomial(ctx, nvars, Scalar::one(ctx), e)
    }

    /// Linear form `Σ c_i v_i`.
    pub fn linear(ctx: FieldCtx, coeffs: &[Scalar]) -> Self {
        let nvars = coeffs.len();
        let mut p = HomPoly::zero(ctx, nvars, 1);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = [0; 3];
                e[i] = 1;
                p.terms.insert(e, c.clone());
            }
        }
        p
    }

    /// Builds a polynomial from terms that must all have total degree `degree`.
    pub fn from_terms(
        ctx: FieldCtx,
        nvars: usize,
        degree: i64,
        terms: impl IntoIterator<Item = (Exps, Scalar)>,
    ) -> Result<Self, PolyError> {
        let mut p = HomPoly::zero(ctx, nvars, degree);
        for (e, c) in terms {
            if exps_degree(&e) as i64 != degree {
                return Err(PolyError::DegreeMismatch(degree, exps_degree(&e) as i64));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exps, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&e) {
            Some(old) => old + &c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, sum);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &Exps) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(|| Scalar::zero(self.ctx))
    }

    /// Terms in descending lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Scalar)> {
        self.terms.iter().rev()
    }

    /// Leading term in lex order.
    pub fn leading(&self) -> Option<(&Exps, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Same polynomial with a different degree tag; only legal for the zero polynomial
    /// or when the tag already matches.
    pub fn with_degree(mut self, degree: i64) -> Self {
        assert!(self.is_zero() || self.degree == degree, "cannot retag a nonzero form");
        self.degree = degree;
        self
    }

    fn check_compatible(&self, other: &HomPoly) -> Result<(), PolyError> {
        assert_eq!(self.ctx, other.ctx, "field mismatch");
        if self.nvars != other.nvars {
            return Err(PolyError::ArityMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(PolyError::DegreeMismatch(self.degree, other.degree));
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        self.add(&other.neg_ref())
    }

    pub fn multiply(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        self.check_compatible(other)?;
        let mut out = HomPoly::zero(self.ctx, self.nvars, self.degree + other.degree);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(add_exps(ea, eb), ca * cb);
            }
        }
        Ok(out)
    }

    fn neg_ref(&self) -> HomPoly {
        HomPoly {
            nvars: self.nvars,
            degree: self.degree,
            ctx: self.ctx,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> HomPoly {
        if c.is_zero() {
            return HomPoly::zero(self.ctx, self.nvars, self.degree);
        }
        HomPoly {
            nvars: self.nvars,
            degree: self.degree,
            ctx: self.ctx,
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> HomPoly {
        let mut acc = HomPoly::one(self.ctx, self.nvars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .fold(Scalar::zero(self.ctx), |acc, (e, c)| {
                let mut v = c.clone();
                for (i, x) in point.iter().enumerate() {
                    if e[i] > 0 {
                        v = &v * &x.pow(e[i]);
                    }
                }
                &acc + &v
            })
    }

    /// Replace variable `i` by `forms[i]`; all forms must be linear in a common ring.
    pub fn compose_linear(&self, forms: &[HomPoly]) -> HomPoly {
        assert_eq!(forms.len(), self.nvars);
        let target = forms[0].nvars;
        let mut powers: Vec<Vec<HomPoly>> = forms.iter().map(|f| vec![HomPoly::one(self.ctx, target), f.clone()]).collect();
        let mut out = HomPoly::zero(self.ctx, target, self.degree);
        for (e, c) in &self.terms {
            let mut term = HomPoly::constant(self.ctx, target, c.clone());
            for i in 0..self.nvars {
                let k = e[i] as usize;
                while powers[i].len() <= k {
                    let next = &powers[i][powers[i].len() - 1] * &forms[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    term = &term * &powers[i][k];
                }
            }
            for (te, tc) in term.terms {
                out.add_term(te, tc);
            }
        }
        out
    }

    /// Coefficients in the descending basis of the polynomial's degree.
    pub fn coeff_vector(&self) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(self.ctx); graded_dim(self.nvars, self.degree)];
        for (e, c) in &self.terms {
            v[monomial_index(self.nvars, *e)] = c.clone();
        }
        v
    }

    pub fn from_coeff_vector(ctx: FieldCtx, nvars: usize, degree: i64, v: &[Scalar]) -> HomPoly {
        let basis = monomial_basis(nvars, degree);
        assert_eq!(basis.len(), v.len(), "coefficient vector length");
        let mut p = HomPoly::zero(ctx, nvars, degree);
        for (e, c) in basis.into_iter().zip(v) {
            p.add_term(e, c.clone());
        }
        p
    }

    /// The exponent of the largest power of variable `i` dividing a nonzero polynomial.
    pub fn var_valuation(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).min().unwrap_or(0)
    }
}

impl Add for &HomPoly {
    type Output = HomPoly;
    fn add(self, rhs: &HomPoly) -> HomPoly {
        HomPoly::add(self, rhs).expect("incompatible forms in addition")
    }
}

impl Sub for &HomPoly {
    type Output = HomPoly;
    fn sub(self, rhs: &HomPoly) -> HomPoly {
        HomPoly::sub(self, rhs).expect("incompatible forms in subtraction")
    }
}

impl Mul for &HomPoly {
    type Output = HomPoly;
    fn mul(self, rhs: &HomPoly) -> HomPoly {
        self.multiply(rhs).expect("incompatible forms in multiplication")
    }
}

impl Neg for &HomPoly {
    type Output = HomPoly;
    fn neg(self) -> HomPoly {
        self.neg_ref()
    }
}

/// `p(g·v)`: variable `i` is replaced by the linear form given by row `i` of `g`.
pub fn substitute_linear(p: &HomPoly, g: &DenseMatrix) -> HomPoly {
    assert_eq!(p.nvars, 3, "substitution acts on three-variable forms");
    assert!(g.rows() == 3 && g.cols() == 3, "substitution matrix must be 3x3");
    let forms: Vec<HomPoly> = (0..3).map(|i| HomPoly::linear(p.ctx, g.row(i))).collect();
    p.compose_linear(&forms)
}

/// Pullback of a ternary form along `(s,t) ↦ param·(s,t)`.
pub fn restrict_to_line(p: &HomPoly, param: &DenseMatrix) -> Result<HomPoly, PolyError> {
    assert_eq!(p.nvars, 3, "restriction acts on three-variable forms");
    assert!(param.rows() == 3 && param.cols() == 2, "parametrization must be 3x2");
    if rank(param) < 2 {
        return Err(PolyError::DegenerateLine);
    }
    let forms: Vec<HomPoly> = (0..3).map(|i| HomPoly::linear(p.ctx, param.row(i))).collect();
    Ok(p.compose_linear(&forms))
}

/// Matrix of multiplication by `f` from degree `from_degree` to `from_degree + deg f`.
pub fn graded_mult_matrix(f: &HomPoly, from_degree: i64) -> DenseMatrix {
    let src = monomial_basis(f.nvars, from_degree);
    let rows = graded_dim(f.nvars, from_degree + f.degree);
    let mut m = DenseMatrix::zeros(f.ctx, rows, src.len());
    for (j, e) in src.iter().enumerate() {
        for (fe, c) in &f.terms {
            m.set(monomial_index(f.nvars, add_exps(fe, e)), j, c.clone());
        }
    }
    m
}

/// `dim (S/I)_m` for the ideal `I` generated by `gens`, all in the same ring.
pub fn quotient_dim(nvars: usize, gens: &[HomPoly], m: i64) -> usize {
    let target = graded_dim(nvars, m);
    if target == 0 {
        return 0;
    }
    let blocks: Vec<DenseMatrix> = gens
        .iter()
        .filter(|g| !g.is_zero() && g.degree <= m)
        .map(|g| graded_mult_matrix(g, m - g.degree))
        .collect();
    if blocks.is_empty() {
        return target;
    }
    let big = DenseMatrix::hstack(gens[0].ctx, target, &blocks);
    target - rank(&big)
}

// Univariate helpers, coefficients from low to high degree.
fn uni_trim(mut v: Vec<Scalar>) -> Vec<Scalar> {
    while v.last().is_some_and(Scalar::is_zero) {
        v.pop();
    }
    v
}

fn uni_rem(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut r = a.to_vec();
    let lead_inv = b.last().expect("nonzero divisor").inv().expect("nonzero lead");
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() * &lead_inv;
        for (i, c) in b.iter().enumerate() {
            let v = &r[shift + i] - &(&factor * c);
            r[shift + i] = v;
        }
        r = uni_trim(r);
    }
    r
}

fn uni_gcd(a: Vec<Scalar>, b: Vec<Scalar>) -> Vec<Scalar> {
    let (mut a, mut b) = (uni_trim(a), uni_trim(b));
    while !b.is_empty() {
        let r = uni_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// A gcd of two binary forms, monic in `s` (the pure `t`-power part has coefficient 1).
pub fn gcd_binary(p: &HomPoly, q: &HomPoly) -> Result<HomPoly, PolyError> {
    assert!(p.nvars == 2 && q.nvars == 2, "gcd_binary needs binary forms");
    assert_eq!(p.ctx, q.ctx, "field mismatch");
    let ctx = p.ctx;
    if p.is_zero() && q.is_zero() {
        return Err(PolyError::UndefinedGcd);
    }
    let dehom = |f: &HomPoly| -> Vec<Scalar> {
        if f.is_zero() {
            return Vec::new();
        }
        let top = f.terms.keys().map(|e| e[0]).max().unwrap() as usize;
        let mut v = vec![Scalar::zero(ctx); top + 1];
        for (e, c) in &f.terms {
            v[e[0] as usize] = c.clone();
        }
        v
    };
    let tpow = match (p.is_zero(), q.is_zero()) {
        (false, false) => p.var_valuation(1).min(q.var_valuation(1)),
        (false, true) => p.var_valuation(1),
        _ => q.var_valuation(1),
    };
    let g = uni_gcd(dehom(p), dehom(q));
    let lead_inv = g.last().expect("nonzero gcd").inv().expect("nonzero lead");
    let sdeg = (g.len() - 1) as u32;
    let degree = (sdeg + tpow) as i64;
    let terms = g
        .iter()
        .enumerate()
        .map(|(i, c)| ([i as u32, degree as u32 - i as u32, 0], c * &lead_inv));
    Ok(HomPoly::from_terms(ctx, 2, degree, terms).expect("homogenized gcd"))
}

fn fmt_coeff(c: &Scalar) -> String {
    match c {
        Scalar::Rational(r) if !r.is_integer() => format!("({r})"),
        _ => c.to_string(),
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = var_names(self.nvars);
        for (k, (e, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors = Vec::new();
            if !mag.is_one() || exps_degree(e) == 0 {
                factors.push(fmt_coeff(&mag));
            }
            for (i, &n) in e.iter().take(self.nvars).enumerate() {
                match n {
                    0 => {}
                    1 => factors.push(names[i].to_string()),
                    _ => factors.push(format!("{}^{}", names[i], n)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: FieldCtx = FieldCtx::Rationals;

    fn p3(s: &str) -> HomPoly {
        parse(s, 3, Q).unwrap()
    }

    fn p2(s: &str) -> HomPoly {
        parse(s, 2, Q).unwrap()
    }

    #[test]
    fn ring_operations() {
        assert_eq!(&p3("x") * &p3("x"), p3("x^2"));
        assert_eq!(&p3("x+y") * &p3("x-y"), p3("x^2-y^2"));
        assert_eq!(p3("x+y").pow(3), p3("x^3+3*x^2*y+3*x*y^2+y^3"));
        assert!(matches!(p3("x").add(&p3("y^2")), Err(PolyError::DegreeMismatch(1, 2))));
    }

    #[test]
    fn substitution_examples() {
        let g = DenseMatrix::from_i64(Q, 3, 3, &[1, 1, 0, 0, 1, 0, 0, 0, 1]);
        assert_eq!(substitute_linear(&p3("x"), &g), p3("x+y"));
        assert_eq!(substitute_linear(&p3("z^4"), &g), p3("z^4"));
        assert_eq!(substitute_linear(&p3("x^2"), &DenseMatrix::identity(Q, 3)), p3("x^2"));
    }

    #[test]
    fn restriction_examples() {
        let y0 = DenseMatrix::from_i64(Q, 3, 2, &[1, 0, 0, 0, 0, 1]);
        let r = restrict_to_line(&p3("y"), &y0).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.degree(), 1);
        assert_eq!(restrict_to_line(&p3("x^3"), &y0).unwrap(), p2("s^3"));
        let x0 = DenseMatrix::from_i64(Q, 3, 2, &[0, 0, 1, 0, 0, 1]);
        assert_eq!(restrict_to_line(&p3("x^2+y*z"), &x0).unwrap(), p2("s*t"));
        let bad = DenseMatrix::from_i64(Q, 3, 2, &[1, 2, 0, 0, 0, 0]);
        assert_eq!(restrict_to_line(&p3("x"), &bad), Err(PolyError::DegenerateLine));
    }

    #[test]
    fn graded_matrices() {
        assert_eq!(graded_mult_matrix(&HomPoly::one(Q, 3), 2), DenseMatrix::identity(Q, 6));
        let m = graded_mult_matrix(&p2("s"), 1);
        assert_eq!(m, DenseMatrix::from_i64(Q, 3, 2, &[1, 0, 0, 1, 0, 0]));
        let m = graded_mult_matrix(&p2("s*t"), 0);
        assert_eq!(m, DenseMatrix::from_i64(Q, 3, 1, &[0, 1, 0]));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_binary(&p2("s^2*t"), &p2("s*t^3")).unwrap(), p2("s*t"));
        assert_eq!(gcd_binary(&p2("s+t"), &p2("s-t")).unwrap(), p2("1"));
        assert_eq!(gcd_binary(&p2("s^2-t^2"), &p2("s^2+2*s*t+t^2")).unwrap(), p2("s+t"));
        assert_eq!(gcd_binary(&p2("2*t^2"), &HomPoly::zero(Q, 2, 3)).unwrap(), p2("t^2"));
        assert_eq!(
            gcd_binary(&HomPoly::zero(Q, 2, 1), &HomPoly::zero(Q, 2, 1)),
            Err(PolyError::UndefinedGcd)
        );
    }

    #[test]
    fn graded_dimensions_match_enumeration() {
        for d in 0..8 {
            assert_eq!(monomial_basis(3, d).len(), graded_dim(3, d));
            assert_eq!(monomial_basis(2, d).len(), graded_dim(2, d));
            for (i, e) in monomial_basis(3, d).into_iter().enumerate() {
                assert_eq!(monomial_index(3, e), i);
            }
        }
        assert_eq!(monomial_basis(3, 1), vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
    }

    #[test]
    fn quotient_dimensions() {
        let gens = [p3("y"), p3("z"), p3("x^3")];
        let hf: Vec<usize> = (0..5).map(|m| quotient_dim(3, &gens, m)).collect();
        assert_eq!(hf, vec![1, 1, 1, 0, 0]);
        let gens = [p3("x^2"), p3("y^2")];
        assert_eq!(quotient_dim(3, &gens, 6), 4);
        assert_eq!(quotient_dim(3, &[], 2), 6);
    }

    #[test]
    fn display_forms() {
        assert_eq!(p3("x^2 + y*z").to_string(), "x^2 + y*z");
        assert_eq!(p3("-x*y + 3*z^2 - 2*x^2").to_string(), "-2*x^2 - x*y + 3*z^2");
        assert_eq!(p2("5").to_string(), "5");
        let f7 = FieldCtx::Prime(7);
        assert_eq!(parse("-y", 3, f7).unwrap().to_string(), "6*y");
    }

    fn arb_form(nvars: usize, degree: i64) -> impl Strategy<Value = HomPoly> {
        let n = graded_dim(nvars, degree);
        prop::collection::vec(-4i64..=4, n).prop_map(move |cs| {
            let v: Vec<Scalar> = cs.into_iter().map(|c| Scalar::from_i64(Q, c)).collect();
            HomPoly::from_coeff_vector(Q, nvars, degree, &v)
        })
    }

    fn arb_matrix() -> impl Strategy<Value = DenseMatrix> {
        prop::collection::vec(-3i64..=3, 9).prop_map(|v| DenseMatrix::from_i64(Q, 3, 3, &v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn substitution_composes(p in (0i64..4).prop_flat_map(|d| arb_form(3, d)), g in arb_matrix(), h in arb_matrix()) {
            let lhs = substitute_linear(&substitute_linear(&p, &g), &h);
            let rhs = substitute_linear(&p, &g.mul(&h).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn restriction_is_multiplicative(p in arb_form(3, 2), q in arb_form(3, 1), m in prop::collection::vec(-3i64..=3, 6)) {
            let param = DenseMatrix::from_i64(Q, 3, 2, &m);
            prop_assume!(rank(&param) == 2);
            let lhs = restrict_to_line(&(&p * &q), &param).unwrap();
            let rhs = &restrict_to_line(&p, &param).unwrap() * &restrict_to_line(&q, &param).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mult_matrix_matches_product(f in arb_form(3, 2), g in arb_form(3, 2)) {
            let m = graded_mult_matrix(&f, 2);
            prop_assert_eq!(m.mul_vec(&g.coeff_vector()).unwrap(), (&f * &g).coeff_vector());
        }

        #[test]
        fn print_parse_round_trip(p in (0i64..5).prop_flat_map(|d| arb_form(3, d))) {
            prop_assume!(!p.is_zero());
            prop_assert_eq!(parse(&p.to_string(), 3, Q).unwrap(), p);
        }

        #[test]
        fn gcd_divides_both(a in arb_form(2, 2), b in arb_form(2, 2), c in arb_form(2, 1)) {
            prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
            let (pa, pb) = (&a * &c, &b * &c);
            let g = gcd_binary(&pa, &pb).unwrap();
            prop_assert!(g.degree() >= 1);
            // c divides the gcd: the gcd of g and c is c up to scale
            let gc = gcd_binary(&g, &c).unwrap();
            prop_assert_eq!(gc.degree(), 1);
        }
    }
}

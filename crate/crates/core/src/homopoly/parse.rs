use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::{exps_degree, var_names, Exps, HomPoly, PolyError};
use crate::exactalg::{FieldCtx, Scalar};

const MAX_EXPONENT: u32 = 4096;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((pos, Tok::Int(s.parse().expect("digit run"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|&(_, c)| c).collect())));
        } else if "+-*^()".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(PolyError::Syntax {
                pos,
                msg: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

/// Possibly inhomogeneous intermediate. `hint` remembers the largest monomial degree
/// produced so a cancelled expression keeps a sensible degree tag.
#[derive(Clone)]
struct Gen {
    terms: BTreeMap<Exps, Scalar>,
    hint: u32,
}

impl Gen {
    fn constant(c: Scalar) -> Gen {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0, 0, 0], c);
        }
        Gen { terms, hint: 0 }
    }

    fn add(mut self, other: Gen, sign: &Scalar) -> Gen {
        for (e, c) in other.terms {
            let add = &c * sign;
            let sum = match self.terms.get(&e) {
                Some(old) => old + &add,
                None => add,
            };
            if sum.is_zero() {
                self.terms.remove(&e);
            } else {
                self.terms.insert(e, sum);
            }
        }
        self.hint = self.hint.max(other.hint);
        self
    }

    fn mul(&self, other: &Gen) -> Gen {
        let mut out = Gen {
            terms: BTreeMap::new(),
            hint: self.hint + other.hint,
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                let prod = ca * cb;
                let sum = match out.terms.get(&e) {
                    Some(old) => old + &prod,
                    None => prod,
                };
                if sum.is_zero() {
                    out.terms.remove(&e);
                } else {
                    out.terms.insert(e, sum);
                }
            }
        }
        out
    }

    fn pow(&self, n: u32, ctx: FieldCtx) -> Gen {
        let mut acc = Gen::constant(Scalar::one(ctx));
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    idx: usize,
    end: usize,
    nvars: usize,
    ctx: FieldCtx,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Gen, PolyError> {
        let negate = if self.peek() == Some(&Tok::Sym('-')) {
            self.idx += 1;
            true
        } else {
            false
        };
        let first = self.term()?;
        let one = Scalar::one(self.ctx);
        let minus = -&one;
        let mut acc = Gen::constant(Scalar::zero(self.ctx)).add(first, if negate { &minus } else { &one });
        loop {
            let sign = match self.peek() {
                Some(Tok::Sym('+')) => &one,
                Some(Tok::Sym('-')) => &minus,
                _ => break,
            };
            self.idx += 1;
            let t = self.term()?;
            acc = acc.add(t, sign);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Gen, PolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Sym('*')) {
            self.idx += 1;
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Gen, PolyError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Sym('^')) {
            return Ok(base);
        }
        self.idx += 1;
        let Some(Tok::Int(n)) = self.peek().cloned() else {
            return self.err("expected a natural-number exponent after '^'");
        };
        let n: u32 = match u32::try_from(&n) {
            Ok(n) if n <= MAX_EXPONENT => n,
            _ => return self.err(format!("exponent exceeds {MAX_EXPONENT}")),
        };
        self.idx += 1;
        Ok(base.pow(n, self.ctx))
    }

    fn atom(&mut self) -> Result<Gen, PolyError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.idx += 1;
                Ok(Gen::constant(Scalar::from_bigint(self.ctx, &n)))
            }
            Some(Tok::Ident(name)) => {
                let names = var_names(self.nvars);
                let mut chars = name.chars();
                let idx = match (chars.next(), chars.next()) {
                    (Some(c), None) => names.iter().position(|&v| v == c),
                    _ => None,
                };
                let Some(i) = idx else {
                    return Err(PolyError::UnknownVariable { name, pos });
                };
                self.idx += 1;
                let mut e = [0; 3];
                e[i] = 1;
                let mut terms = BTreeMap::new();
                terms.insert(e, Scalar::one(self.ctx));
                Ok(Gen { terms, hint: 1 })
            }
            Some(Tok::Sym('(')) => {
                self.idx += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::Sym(')')) {
                    return self.err("expected ')'");
                }
                self.idx += 1;
                Ok(inner)
            }
            Some(Tok::Sym(c)) => self.err(format!("unexpected {c:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a homogeneous form in `nvars` variables (`x,y,z` or `s,t`).
pub fn parse(text: &str, nvars: usize, ctx: FieldCtx) -> Result<HomPoly, PolyError> {
    assert!(nvars == 2 || nvars == 3, "only 2 or 3 variables are supported");
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks: &toks,
        idx: 0,
        end: text.len(),
        nvars,
        ctx,
    };
    let g = p.expr()?;
    if p.idx < toks.len() {
        return p.err("expected an operator");
    }
    let mut degrees = g.terms.keys().map(exps_degree);
    let degree = match degrees.next() {
        Some(first) => {
            if let Some(second) = degrees.find(|&d| d != first) {
                let (lo, hi) = (first.min(second), first.max(second));
                return Err(PolyError::Inhomogeneous { first: lo, second: hi });
            }
            first
        }
        None => g.hint,
    };
    Ok(HomPoly::from_terms(ctx, nvars, degree as i64, g.terms).expect("homogeneous terms"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldCtx = FieldCtx::Rationals;

    #[test]
    fn parses_expansions() {
        let p = parse("(x+y)^3", 3, Q).unwrap();
        let q = parse("x^3 + 3*x^2*y + 3*x*y^2 + y^3", 3, Q).unwrap();
        assert_eq!(p, q);
        assert_eq!(parse("x^2 + y*z", 3, Q).unwrap().num_terms(), 2);
        assert_eq!(parse(" - s*t + t ^ 2 ", 2, Q).unwrap().degree(), 2);
    }

    #[test]
    fn rejects_inhomogeneous() {
        assert_eq!(
            parse("x + y^2", 3, Q),
            Err(PolyError::Inhomogeneous { first: 1, second: 2 })
        );
        assert_eq!(
            parse("z^3 + 1", 3, Q),
            Err(PolyError::Inhomogeneous { first: 0, second: 3 })
        );
    }

    #[test]
    fn reports_positions() {
        assert!(matches!(parse("2x", 3, Q), Err(PolyError::Syntax { pos: 1, .. })));
        assert!(matches!(parse("2 x", 3, Q), Err(PolyError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("x + ", 3, Q), Err(PolyError::Syntax { pos: 4, .. })));
        assert!(matches!(parse("(x + y", 3, Q), Err(PolyError::Syntax { pos: 6, .. })));
        assert!(matches!(parse("x # y", 3, Q), Err(PolyError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("x^y", 3, Q), Err(PolyError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn unknown_variables() {
        assert_eq!(
            parse("x + w", 3, Q),
            Err(PolyError::UnknownVariable { name: "w".into(), pos: 4 })
        );
        assert_eq!(
            parse("s + x", 2, Q),
            Err(PolyError::UnknownVariable { name: "x".into(), pos: 4 })
        );
    }

    #[test]
    fn cancelled_expression_keeps_degree() {
        let p = parse("x*y - y*x", 3, Q).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), 2);
    }
}

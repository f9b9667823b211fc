use super::{Presentation, PresentationError};
use crate::exactalg::FieldCtx;
use crate::homopoly::parse;

fn perr(line: usize, msg: impl Into<String>) -> PresentationError {
    PresentationError::Parse { line, msg: msg.into() }
}

fn parse_ints(line: usize, text: &str, want: usize) -> Result<Vec<i64>, PresentationError> {
    let v: Vec<i64> = text
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| perr(line, format!("{t:?} is not an integer"))))
        .collect::<Result<_, _>>()?;
    if v.len() != want {
        return Err(perr(line, format!("expected {want} integer(s), found {}", v.len())));
    }
    Ok(v)
}

/// Reads the line-oriented bundle format:
///
/// ```text
/// field: Fp 7
/// sub: 3
/// quotients: 2 2 0
/// entries: y | z | x^3
/// ```
///
/// A missing `field` line defaults to `default_field`.
pub fn parse_bundle(text: &str, default_field: FieldCtx) -> Result<(Presentation, bool), PresentationError> {
    let mut field = None;
    let mut sub = None;
    let mut quotients = None;
    let mut entries: Option<(usize, String)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once(':') else {
            return Err(perr(line, "expected `key: value`"));
        };
        let value = value.trim();
        let dup = || perr(line, format!("duplicate key {:?}", key.trim()));
        match key.trim() {
            "field" => {
                let ctx = FieldCtx::parse(value).map_err(|e| perr(line, e.to_string()))?;
                if field.replace(ctx).is_some() {
                    return Err(dup());
                }
            }
            "sub" => {
                let v = parse_ints(line, value, 1)?;
                if sub.replace(v[0]).is_some() {
                    return Err(dup());
                }
            }
            "quotients" => {
                let v = parse_ints(line, value, 3)?;
                if quotients.replace([v[0], v[1], v[2]]).is_some() {
                    return Err(dup());
                }
            }
            "entries" => {
                if entries.replace((line, value.to_string())).is_some() {
                    return Err(dup());
                }
            }
            other => return Err(perr(line, format!("unknown key {other:?}"))),
        }
    }
    let end = text.lines().count();
    let explicit = field.is_some();
    let ctx = field.unwrap_or(default_field);
    let d0 = sub.ok_or_else(|| perr(end, "missing `sub:` line"))?;
    let d = quotients.ok_or_else(|| perr(end, "missing `quotients:` line"))?;
    let (eline, etext) = entries.ok_or_else(|| perr(end, "missing `entries:` line"))?;
    let parts: Vec<&str> = etext.split('|').collect();
    if parts.len() != 3 {
        return Err(perr(eline, format!("expected 3 entries separated by '|', found {}", parts.len())));
    }
    let mut polys = Vec::with_capacity(3);
    for (i, part) in parts.iter().enumerate() {
        let p = parse(part, 3, ctx).map_err(|e| perr(eline, format!("entry {}: {e}", i + 1)))?;
        polys.push(p);
    }
    let polys: [_; 3] = polys.try_into().expect("three entries");
    Ok((Presentation::new(ctx, d0, d, polys)?, explicit))
}

pub fn write_bundle(p: &Presentation) -> String {
    let field = match p.ctx() {
        FieldCtx::Rationals => "Q".to_string(),
        FieldCtx::Prime(q) => format!("Fp {q}"),
    };
    let [a, b, c] = p.d();
    let [f, g, h] = p.entries();
    format!("field: {field}\nsub: {}\nquotients: {a} {b} {c}\nentries: {f} | {g} | {h}\n", p.d0())
}

//! Projective linear group elements, the parabolic and Borel subgroups, pullbacks of
//! presentations and the graded isomorphism solver.
//!
//! Matrices act on points by `q ↦ g·q` and on forms by substituting row `i` of `g` for
//! variable `i`, so `pullback(F, g)` restricted to a line `l` is `F` restricted to
//! `g(l)`.

mod iso;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::{column_span_complement, DenseMatrix, FieldCtx, Scalar};
use crate::homopoly::substitute_linear;
use crate::presentation::Presentation;
use crate::projgeom::{incidence, parametrize, LineP2, PointP2};

pub use iso::{invariance_report, invariant_under, isomorphic, Invariance, InvarianceReport, InvarianceVerdict, IsoOutcome, IsoWitness, TransvectionCheck};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("matrix is not invertible")]
    Singular,
    #[error("the point {point} does not lie on the line {line}")]
    NotIncident { point: String, line: String },
    #[error("matrix does not belong to {0}")]
    NotMember(String),
    #[error("no element of {group} maps {from} to {target}")]
    NoWitness { group: String, from: String, target: String },
    #[error("invariance reports need at least 10 samples, got {0}")]
    TooFewSamples(usize),
    #[error("bad group element literal {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// A subgroup of `PGL(3)`. The parabolic and Borel subgroups carry their flag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Subgroup {
    Full,
    /// Stabilizer of a point.
    Gp(PointP2),
    /// Stabilizer of a line.
    GL(LineP2),
    /// Stabilizer of the flag `p ∈ L`.
    Borel(PointP2, LineP2),
    /// Diagonal matrices.
    Torus,
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subgroup::Full => write!(f, "PGL(3)"),
            Subgroup::Gp(p) => write!(f, "G_p({p})"),
            Subgroup::GL(l) => write!(f, "G_L({l})"),
            Subgroup::Borel(p, l) => write!(f, "B({p}, {l})"),
            Subgroup::Torus => write!(f, "T"),
        }
    }
}

impl Subgroup {
    pub fn borel(p: PointP2, l: LineP2) -> Result<Subgroup, GroupError> {
        if !incidence(&p, &l) {
            return Err(GroupError::NotIncident {
                point: p.to_string(),
                line: l.to_string(),
            });
        }
        Ok(Subgroup::Borel(p, l))
    }

    /// The columns `C` such that the subgroup is `C·H·C⁻¹` for the standard shape `H`
    /// with `p = (1:0:0)` and `L = {z=0}`.
    pub fn adapted_basis(&self, ctx: FieldCtx) -> DenseMatrix {
        match self {
            Subgroup::Full | Subgroup::Torus => DenseMatrix::identity(ctx, 3),
            Subgroup::Gp(p) => complete_basis(ctx, vec![p.column()]),
            Subgroup::GL(l) => {
                let param = parametrize(l);
                complete_basis(ctx, vec![param.column(0), param.column(1)])
            }
            Subgroup::Borel(p, l) => {
                let param = parametrize(l);
                let second = [param.column(0), param.column(1)]
                    .into_iter()
                    .find(|c| PointP2::new(to_arr(c.clone())).ok().as_ref() != Some(p))
                    .expect("a line has two distinct basis points");
                complete_basis(ctx, vec![p.column(), second])
            }
        }
    }

    /// Whether `g`, read in the adapted basis, has the subgroup's shape up to a scalar.
    pub fn contains(&self, g: &DenseMatrix) -> bool {
        if g.inverse().is_none() {
            return false;
        }
        let c = self.adapted_basis(g.ctx());
        let h = conjugate_into_frame(&c, g);
        let z = |i: usize, j: usize| h.get(i, j).is_zero();
        match self {
            Subgroup::Full => true,
            Subgroup::Gp(_) => z(1, 0) && z(2, 0),
            Subgroup::GL(_) => z(2, 0) && z(2, 1),
            Subgroup::Borel(..) => z(1, 0) && z(2, 0) && z(2, 1),
            Subgroup::Torus => (0..3).all(|i| (0..3).all(|j| i == j || z(i, j))),
        }
    }
}

fn to_arr(v: Vec<Scalar>) -> [Scalar; 3] {
    v.try_into().expect("three coordinates")
}

/// `[given | standard vectors]`, a basis of the whole space.
fn complete_basis(ctx: FieldCtx, mut cols: Vec<Vec<Scalar>>) -> DenseMatrix {
    let span = DenseMatrix::from_columns(ctx, 3, &cols);
    for j in column_span_complement(&span) {
        let mut e = vec![Scalar::zero(ctx); 3];
        e[j] = Scalar::one(ctx);
        cols.push(e);
    }
    DenseMatrix::from_columns(ctx, 3, &cols)
}

/// `C⁻¹·g·C`.
fn conjugate_into_frame(c: &DenseMatrix, g: &DenseMatrix) -> DenseMatrix {
    let ci = c.inverse().expect("adapted basis is invertible");
    ci.mul(g).and_then(|m| m.mul(c)).expect("3x3 products")
}

/// `C·h·C⁻¹`.
fn conjugate_out_of_frame(c: &DenseMatrix, h: &DenseMatrix) -> DenseMatrix {
    let ci = c.inverse().expect("adapted basis is invertible");
    c.mul(h).and_then(|m| m.mul(&ci)).expect("3x3 products")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    matrix: DenseMatrix,
    group: Subgroup,
}

impl GroupElement {
    pub fn new(matrix: DenseMatrix, group: Subgroup) -> Result<Self, GroupError> {
        if matrix.rows() != 3 || matrix.cols() != 3 || matrix.inverse().is_none() {
            return Err(GroupError::Singular);
        }
        if !group.contains(&matrix) {
            return Err(GroupError::NotMember(group.to_string()));
        }
        Ok(GroupElement { matrix, group })
    }

    /// Nine comma-separated integers, row-major.
    pub fn parse_literal(text: &str, ctx: FieldCtx) -> Result<Self, GroupError> {
        let err = |reason: &str| GroupError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let v: Vec<i64> = text
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| err("entries must be integers"))?;
        if v.len() != 9 {
            return Err(err("expected nine entries"));
        }
        GroupElement::new(DenseMatrix::from_i64(ctx, 3, 3, &v), Subgroup::Full)
    }

    pub fn identity(ctx: FieldCtx) -> Self {
        GroupElement {
            matrix: DenseMatrix::identity(ctx, 3),
            group: Subgroup::Full,
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn group(&self) -> &Subgroup {
        &self.group
    }

    pub fn ctx(&self) -> FieldCtx {
        self.matrix.ctx()
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            matrix: self.matrix.inverse().expect("group elements are invertible"),
            group: self.group.clone(),
        }
    }

    /// `self · other`, tagged with `self`'s group when both share it.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let matrix = self.matrix.mul(&other.matrix).expect("3x3 product");
        let group = if self.group == other.group {
            self.group.clone()
        } else {
            Subgroup::Full
        };
        GroupElement { matrix, group }
    }

    pub fn apply_point(&self, q: &PointP2) -> PointP2 {
        let v = self.matrix.mul_vec(&q.column()).expect("3x3 times vector");
        PointP2::new(to_arr(v)).expect("invertible image is nonzero")
    }

    /// The image line `g(l)`, with coordinates `g⁻ᵀ·l`.
    pub fn apply_line(&self, l: &LineP2) -> LineP2 {
        let inv_t = self.matrix.inverse().expect("group elements are invertible").transpose();
        let v = inv_t.mul_vec(l.coords()).expect("3x3 times vector");
        LineP2::new(to_arr(v)).expect("invertible image is nonzero")
    }

    /// Rows as strings, for reports.
    pub fn rows_display(&self) -> Vec<Vec<String>> {
        self.matrix
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|c| c.to_string()).collect())
            .collect()
    }
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows_display().serialize(s)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows_display().iter().map(|r| r.join(",")).collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// The three elementary transvections `(x+y,y,z)`, `(x+z,y,z)` and `(x,y,y+z)`.
pub fn transvections(ctx: FieldCtx) -> [(&'static str, DenseMatrix); 3] {
    [
        ("(x+y,y,z)", DenseMatrix::from_i64(ctx, 3, 3, &[1, 1, 0, 0, 1, 0, 0, 0, 1])),
        ("(x+z,y,z)", DenseMatrix::from_i64(ctx, 3, 3, &[1, 0, 1, 0, 1, 0, 0, 0, 1])),
        ("(x,y,y+z)", DenseMatrix::from_i64(ctx, 3, 3, &[1, 0, 0, 0, 1, 0, 0, 1, 1])),
    ]
}

fn random_scalar<R: Rng + ?Sized>(ctx: FieldCtx, rng: &mut R) -> Scalar {
    match ctx.modulus() {
        Some(q) => Scalar::from_i64(ctx, rng.gen_range(0..q) as i64),
        None => Scalar::from_i64(ctx, rng.gen_range(-9..=9)),
    }
}

/// A random element of the subgroup: the standard shape with random entries, rejected
/// until invertible, conjugated into the adapted basis.
pub fn sample_with<R: Rng + ?Sized>(group: &Subgroup, ctx: FieldCtx, rng: &mut R) -> GroupElement {
    let c = group.adapted_basis(ctx);
    loop {
        let mut h = DenseMatrix::zeros(ctx, 3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let free = match group {
                    Subgroup::Full => true,
                    Subgroup::Gp(_) => j > 0 || i == 0,
                    Subgroup::GL(_) => i < 2 || j == 2,
                    Subgroup::Borel(..) => j >= i,
                    Subgroup::Torus => i == j,
                };
                if free {
                    h.set(i, j, random_scalar(ctx, rng));
                }
            }
        }
        match group {
            Subgroup::Gp(_) => h.set(0, 0, Scalar::one(ctx)),
            Subgroup::GL(_) => h.set(2, 2, Scalar::one(ctx)),
            _ => {}
        }
        if h.det().map(|d| d.is_zero()).unwrap_or(true) {
            continue;
        }
        return GroupElement {
            matrix: conjugate_out_of_frame(&c, &h),
            group: group.clone(),
        };
    }
}

pub fn sample(group: &Subgroup, ctx: FieldCtx, seed: u64) -> GroupElement {
    sample_with(group, ctx, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Sample number `index` of the stream for `seed`; streams are independent per index.
pub fn sample_indexed(group: &Subgroup, ctx: FieldCtx, seed: u64, index: u64) -> GroupElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    sample_with(group, ctx, &mut rng)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeomObject {
    Point(PointP2),
    Line(LineP2),
}

impl fmt::Display for GeomObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomObject::Point(p) => p.fmt(f),
            GeomObject::Line(l) => l.fmt(f),
        }
    }
}

/// An invertible matrix `[a | b | c]` completed with standard vectors after the given
/// leading columns.
fn with_columns(ctx: FieldCtx, cols: Vec<Vec<Scalar>>) -> DenseMatrix {
    complete_basis(ctx, cols)
}

fn e(ctx: FieldCtx, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(ctx); 3];
    v[i] = Scalar::one(ctx);
    v
}

/// A point of `l` other than `p`.
fn other_point(l: &LineP2, p: &PointP2) -> Vec<Scalar> {
    let param = parametrize(l);
    [param.column(0), param.column(1)]
        .into_iter()
        .find(|c| PointP2::new(to_arr(c.clone())).ok().as_ref() != Some(p))
        .expect("a line has two distinct basis points")
}

/// For an object in the standard frame, its orbit label and an element of the standard
/// subgroup carrying the orbit representative to it.
fn orbit_chart(group: &Subgroup, ctx: FieldCtx, obj: &GeomObject) -> Option<(u8, DenseMatrix)> {
    let p = PointP2::from_i64(ctx, [1, 0, 0]).expect("nonzero");
    let l_inf = LineP2::from_i64(ctx, [0, 0, 1]).expect("nonzero");
    let on_l = |q: &PointP2| incidence(q, &l_inf);
    Some(match (group, obj) {
        (Subgroup::Full, GeomObject::Point(q)) => (0, with_columns(ctx, vec![q.column()])),
        (Subgroup::Full, GeomObject::Line(l)) => {
            let param = parametrize(l);
            (1, with_columns(ctx, vec![param.column(0), param.column(1)]))
        }
        (Subgroup::Gp(_), GeomObject::Point(q)) if *q == p => return None,
        (Subgroup::Gp(_), GeomObject::Point(q)) => (0, with_columns(ctx, vec![e(ctx, 0), q.column()])),
        (Subgroup::Gp(_), GeomObject::Line(l)) if incidence(&p, l) => {
            (1, with_columns(ctx, vec![e(ctx, 0), other_point(l, &p)]))
        }
        (Subgroup::Gp(_), GeomObject::Line(l)) => {
            let param = parametrize(l);
            (2, DenseMatrix::from_columns(ctx, 3, &[e(ctx, 0), param.column(0), param.column(1)]))
        }
        (Subgroup::GL(_), GeomObject::Point(q)) if on_l(q) => {
            let second = other_point(&l_inf, q);
            (0, DenseMatrix::from_columns(ctx, 3, &[q.column(), second, e(ctx, 2)]))
        }
        (Subgroup::GL(_), GeomObject::Point(q)) => {
            (1, DenseMatrix::from_columns(ctx, 3, &[e(ctx, 0), e(ctx, 1), scaled_to_one(q, 2)]))
        }
        (Subgroup::GL(_), GeomObject::Line(l)) if *l == l_inf => return None,
        (Subgroup::GL(_), GeomObject::Line(l)) => {
            let a = crate::projgeom::intersection(l, &l_inf).expect("distinct lines");
            let b = off_line_point(l, &l_inf);
            let a2 = other_point(&l_inf, &a);
            (2, DenseMatrix::from_columns(ctx, 3, &[a.column(), a2, b]))
        }
        (Subgroup::Borel(..), GeomObject::Point(q)) if *q == p => return None,
        (Subgroup::Borel(..), GeomObject::Point(q)) if on_l(q) => {
            (0, DenseMatrix::from_columns(ctx, 3, &[e(ctx, 0), scaled_to_one(q, 1), e(ctx, 2)]))
        }
        (Subgroup::Borel(..), GeomObject::Point(q)) => {
            (1, DenseMatrix::from_columns(ctx, 3, &[e(ctx, 0), e(ctx, 1), scaled_to_one(q, 2)]))
        }
        (Subgroup::Borel(..), GeomObject::Line(l)) if *l == l_inf => return None,
        (Subgroup::Borel(..), GeomObject::Line(l)) if incidence(&p, l) => {
            (2, DenseMatrix::from_columns(ctx, 3, &[e(ctx, 0), e(ctx, 1), off_line_point(l, &l_inf)]))
        }
        (Subgroup::Borel(..), GeomObject::Line(l)) => {
            let a = crate::projgeom::intersection(l, &l_inf).expect("distinct lines");
            (3, DenseMatrix::from_columns(ctx, 3, &[e(ctx, 0), a.column(), off_line_point(l, &l_inf)]))
        }
        (Subgroup::Torus, _) => return None,
    })
}

/// Coordinates of `q` rescaled so that coordinate `i`, which must be nonzero, is 1.
fn scaled_to_one(q: &PointP2, i: usize) -> Vec<Scalar> {
    let inv = q.coords()[i].inv().expect("nonzero coordinate");
    q.coords().iter().map(|c| c * &inv).collect()
}

/// A point of `l` not on `m`, for distinct lines.
fn off_line_point(l: &LineP2, m: &LineP2) -> Vec<Scalar> {
    let param = parametrize(l);
    [param.column(0), param.column(1)]
        .into_iter()
        .find(|c| !incidence(&PointP2::new(to_arr(c.clone())).expect("nonzero"), m))
        .expect("distinct lines share one point")
}

fn to_frame(c: &DenseMatrix, obj: &GeomObject) -> GeomObject {
    match obj {
        GeomObject::Point(q) => {
            let v = c.inverse().expect("invertible").mul_vec(&q.column()).expect("3x3");
            GeomObject::Point(PointP2::new(to_arr(v)).expect("nonzero"))
        }
        GeomObject::Line(l) => {
            let v = c.transpose().mul_vec(l.coords()).expect("3x3");
            GeomObject::Line(LineP2::new(to_arr(v)).expect("nonzero"))
        }
    }
}

/// An element of the subgroup mapping `source` to `target`, built from the orbit
/// representatives of the point and line orbits of the subgroup.
pub fn transitive_witness(
    group: &Subgroup,
    source: &GeomObject,
    target: &GeomObject,
) -> Result<GroupElement, GroupError> {
    let ctx = match source {
        GeomObject::Point(q) => q.ctx(),
        GeomObject::Line(l) => l.ctx(),
    };
    let no = || GroupError::NoWitness {
        group: group.to_string(),
        from: source.to_string(),
        target: target.to_string(),
    };
    let c = group.adapted_basis(ctx);
    let (src_orbit, h_src) = orbit_chart(group, ctx, &to_frame(&c, source)).ok_or_else(no)?;
    let (tgt_orbit, h_tgt) = orbit_chart(group, ctx, &to_frame(&c, target)).ok_or_else(no)?;
    if src_orbit != tgt_orbit {
        return Err(no());
    }
    let h = h_tgt
        .mul(&h_src.inverse().expect("charts are invertible"))
        .expect("3x3 product");
    GroupElement::new(conjugate_out_of_frame(&c, &h), group.clone())
}

/// `g*F`: every entry composed with the linear substitution `g`.
pub fn pullback(p: &Presentation, g: &GroupElement) -> Presentation {
    let entries = p.entries().clone().map(|f| substitute_linear(&f, g.matrix()));
    p.with_transformed_entries(entries)
}

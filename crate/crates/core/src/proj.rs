//! Points, lines and planes of P³(F_q) in canonical form.
//!
//! Points and planes are normalised so the first nonzero coordinate is 1.
//! Lines are stored by the reduced row-echelon form of a 2×4 basis, so two
//! descriptions of the same line always compare equal.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Field, FieldElem};
use crate::linalg;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjError {
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("a line needs two distinct points")]
    SamePoint,
    #[error("the point lies on the line")]
    PointOnLine,
    #[error("rows do not span a line")]
    NotALine,
    #[error("cannot parse {0:?}")]
    Parse(String),
}

pub type Coords = [FieldElem; 4];

fn normalize(f: &Field, v: Coords) -> Result<Coords, ProjError> {
    let lead = v
        .iter()
        .find(|c| !c.is_zero())
        .ok_or(ProjError::ZeroVector)?;
    let inv = f.inv_nonzero(*lead);
    Ok(v.map(|c| f.mul(c, inv)))
}

/// The points (1:x) for x ∈ F followed by (0:1).
pub fn projective_line(f: &Field) -> Vec<(FieldElem, FieldElem)> {
    f.elements()
        .map(|x| (FieldElem::ONE, x))
        .chain(std::iter::once((FieldElem::ZERO, FieldElem::ONE)))
        .collect()
}

/// `s·a + t·b` coordinatewise.
pub fn combine(f: &Field, s: FieldElem, a: &Coords, t: FieldElem, b: &Coords) -> Coords {
    std::array::from_fn(|i| f.add(f.mul(s, a[i]), f.mul(t, b[i])))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(Coords);

impl Point {
    pub fn new(f: &Field, coords: Coords) -> Result<Point, ProjError> {
        normalize(f, coords).map(Point)
    }

    pub fn from_codes(f: &Field, codes: [u32; 4]) -> Result<Point, ProjError> {
        let mut c = [FieldElem::ZERO; 4];
        for (slot, &code) in c.iter_mut().zip(&codes) {
            *slot = f
                .elem(code as u64)
                .map_err(|e| ProjError::Parse(e.to_string()))?;
        }
        Point::new(f, c)
    }

    /// Parse `"a:b:c:d"` with element codes.
    pub fn parse(f: &Field, s: &str) -> Result<Point, ProjError> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 4 {
            return Err(ProjError::Parse(s.to_string()));
        }
        let mut codes = [0u32; 4];
        for (slot, part) in codes.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| ProjError::Parse(s.to_string()))?;
        }
        Point::from_codes(f, codes)
    }

    #[inline]
    pub fn coords(&self) -> &Coords {
        &self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a}:{b}:{c}:{d}")
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let parts: Result<Vec<u32>, _> = s.split(':').map(|p| p.trim().parse()).collect();
        match parts.ok().and_then(|v| <[u32; 4]>::try_from(v).ok()) {
            Some(c) if c.iter().any(|&x| x != 0) => Ok(Point(c.map(FieldElem))),
            _ => Err(serde::de::Error::custom(format!("bad point {s:?}"))),
        }
    }
}

/// A plane, stored by its normalised covector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plane(Coords);

impl Plane {
    pub fn new(f: &Field, covector: Coords) -> Result<Plane, ProjError> {
        normalize(f, covector).map(Plane)
    }

    #[inline]
    pub fn covector(&self) -> &Coords {
        &self.0
    }

    pub fn contains(&self, f: &Field, p: &Point) -> bool {
        linalg::dot(f, &self.0, &p.0).is_zero()
    }

    /// Three independent vectors spanning the plane, in echelon form.
    pub fn basis(&self, f: &Field) -> Vec<Coords> {
        linalg::kernel(f, &[self.0.to_vec()], 4)
            .into_iter()
            .map(|v| [v[0], v[1], v[2], v[3]])
            .collect()
    }

    pub fn points(&self, f: &Field) -> Vec<Point> {
        let b = self.basis(f);
        let mut out = Vec::new();
        for (s, t) in projective_line(f) {
            let base = combine(f, s, &b[0], t, &b[1]);
            out.push(Point::new(f, base).unwrap());
        }
        for x in f.elements() {
            for y in f.elements() {
                let v = combine(f, x, &b[0], y, &b[1]);
                let v: Coords = std::array::from_fn(|i| f.add(v[i], b[2][i]));
                out.push(Point::new(f, v).unwrap());
            }
        }
        out
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "[{a},{b},{c},{d}]")
    }
}

impl Serialize for Plane {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A line, stored by the reduced row-echelon form of a basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line([Coords; 2]);

impl Line {
    /// Canonical line spanned by two vectors.
    pub fn from_rows(f: &Field, a: Coords, b: Coords) -> Result<Line, ProjError> {
        let mut rows = vec![a.to_vec(), b.to_vec()];
        let pivots = linalg::rref(f, &mut rows);
        if pivots.len() != 2 {
            return Err(ProjError::NotALine);
        }
        Ok(Line([
            [rows[0][0], rows[0][1], rows[0][2], rows[0][3]],
            [rows[1][0], rows[1][1], rows[1][2], rows[1][3]],
        ]))
    }

    /// The line through two distinct points.
    pub fn through(f: &Field, p: &Point, q: &Point) -> Result<Line, ProjError> {
        if p == q {
            return Err(ProjError::SamePoint);
        }
        Line::from_rows(f, p.0, q.0)
    }

    /// The reduced basis (A, B); points are sA + tB.
    #[inline]
    pub fn basis(&self) -> &[Coords; 2] {
        &self.0
    }

    /// Point with parameter (s:t).
    pub fn point_at(&self, f: &Field, s: FieldElem, t: FieldElem) -> Point {
        Point::new(f, combine(f, s, &self.0[0], t, &self.0[1])).expect("nonzero parameter")
    }

    /// The q+1 points, in parameter order (1:x) then (0:1).
    pub fn points(&self, f: &Field) -> Vec<Point> {
        projective_line(f)
            .into_iter()
            .map(|(s, t)| self.point_at(f, s, t))
            .collect()
    }

    pub fn contains(&self, f: &Field, p: &Point) -> bool {
        let rows = vec![self.0[0].to_vec(), self.0[1].to_vec(), p.0.to_vec()];
        linalg::rank(f, &rows) == 2
    }

    /// Parameter (s:t) of a point on the line, normalised like a P¹ point.
    pub fn parameter_of(&self, f: &Field, p: &Point) -> Option<(FieldElem, FieldElem)> {
        let (i, j) = self.pivots();
        let (s, t) = (p.0[i], p.0[j]);
        let st = if s.is_zero() {
            (FieldElem::ZERO, FieldElem::ONE)
        } else {
            (FieldElem::ONE, f.div(t, s).ok()?)
        };
        (!t.is_zero() || !s.is_zero())
            .then_some(st)
            .filter(|&(s, t)| self.point_at(f, s, t) == *p)
    }

    /// Pivot columns of the two basis rows.
    pub fn pivots(&self) -> (usize, usize) {
        let lead = |r: &Coords| r.iter().position(|c| !c.is_zero()).unwrap();
        (lead(&self.0[0]), lead(&self.0[1]))
    }

    /// The two covectors cutting out the line, in echelon form.
    pub fn annihilator(&self, f: &Field) -> [Coords; 2] {
        let k = linalg::kernel(f, &[self.0[0].to_vec(), self.0[1].to_vec()], 4);
        [
            [k[0][0], k[0][1], k[0][2], k[0][3]],
            [k[1][0], k[1][1], k[1][2], k[1][3]],
        ]
    }

    pub fn lies_in(&self, f: &Field, plane: &Plane) -> bool {
        self.0.iter().all(|r| linalg::dot(f, &plane.0, r).is_zero())
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = Point(self.0[0]);
        let b = Point(self.0[1]);
        write!(f, "{a}|{b}")
    }
}

impl Serialize for Line {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&Point(self.0[0]))?;
        seq.serialize_element(&Point(self.0[1]))?;
        seq.end()
    }
}

/// All points of P³(F_q), each once.
pub fn points_of_space(f: &Field) -> Vec<Point> {
    let q = f.q() as u64;
    let mut out = Vec::with_capacity((q * q * q + q * q + q + 1) as usize);
    for lead in 0..4 {
        let free = 3 - lead;
        for n in 0..q.pow(free as u32) {
            let mut c = [FieldElem::ZERO; 4];
            c[lead] = FieldElem::ONE;
            let mut rest = n;
            for i in (lead + 1..4).rev() {
                c[i] = FieldElem((rest % q) as u32);
                rest /= q;
            }
            out.push(Point(c));
        }
    }
    out
}

/// Position of a point in the order of [`points_of_space`].
pub fn space_index(f: &Field, p: &Point) -> usize {
    let q = f.q() as usize;
    let c = &p.0;
    let lead = c.iter().position(|x| !x.is_zero()).expect("nonzero point");
    let offset: usize = (0..lead).map(|l| q.pow(3 - l as u32)).sum();
    offset
        + c[lead + 1..]
            .iter()
            .fold(0, |acc, x| acc * q + x.0 as usize)
}

/// Number of points of P³(F_q).
pub fn space_size(f: &Field) -> usize {
    let q = f.q() as usize;
    q * q * q + q * q + q + 1
}

/// All lines of P³(F_q), each once, by enumerating reduced echelon bases.
pub fn lines_of_space(f: &Field) -> Vec<Line> {
    let q = f.q() as u64;
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            // free slots: row 0 after i except j; row 1 after j
            let slots: Vec<(usize, usize)> = ((i + 1)..4)
                .filter(|&c| c != j)
                .map(|c| (0, c))
                .chain(((j + 1)..4).map(|c| (1, c)))
                .collect();
            for n in 0..q.pow(slots.len() as u32) {
                let mut rows = [[FieldElem::ZERO; 4]; 2];
                rows[0][i] = FieldElem::ONE;
                rows[1][j] = FieldElem::ONE;
                let mut rest = n;
                for &(r, c) in slots.iter().rev() {
                    rows[r][c] = FieldElem((rest % q) as u32);
                    rest /= q;
                }
                out.push(Line(rows));
            }
        }
    }
    out
}

/// True iff the lines have no common point (stacked bases have rank 4).
pub fn are_skew(f: &Field, a: &Line, b: &Line) -> bool {
    let rows: Vec<_> = a.0.iter().chain(b.0.iter()).map(|r| r.to_vec()).collect();
    linalg::rank(f, &rows) == 4
}

/// Common point of two distinct coplanar lines.
pub fn meet_lines(f: &Field, a: &Line, b: &Line) -> Option<Point> {
    if a == b || are_skew(f, a, b) {
        return None;
    }
    let n = b.annihilator(f);
    let plane = Plane::new(f, n[0]).ok()?;
    match meet_plane_line(f, &plane, a) {
        Meet::Point(p) if b.contains(f, &p) => Some(p),
        _ => {
            let plane = Plane::new(f, n[1]).ok()?;
            match meet_plane_line(f, &plane, a) {
                Meet::Point(p) => Some(p),
                Meet::Contained => None,
            }
        }
    }
}

/// The q+1 planes containing a line.
pub fn pencil_of_planes(f: &Field, line: &Line) -> Vec<Plane> {
    let [n0, n1] = line.annihilator(f);
    projective_line(f)
        .into_iter()
        .map(|(s, t)| Plane::new(f, combine(f, s, &n0, t, &n1)).expect("independent covectors"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Meet {
    Point(Point),
    Contained,
}

pub fn meet_plane_line(f: &Field, plane: &Plane, line: &Line) -> Meet {
    let [a, b] = &line.0;
    let na = linalg::dot(f, &plane.0, a);
    let nb = linalg::dot(f, &plane.0, b);
    if na.is_zero() && nb.is_zero() {
        return Meet::Contained;
    }
    // (n·B) A − (n·A) B lies on the plane
    let v = combine(f, nb, a, f.neg(na), b);
    Meet::Point(Point::new(f, v).expect("nonzero"))
}

/// The unique plane containing a line and a point off it.
pub fn plane_through(f: &Field, line: &Line, p: &Point) -> Result<Plane, ProjError> {
    let rows = vec![line.0[0].to_vec(), line.0[1].to_vec(), p.0.to_vec()];
    let k = linalg::kernel(f, &rows, 4);
    if k.len() != 1 {
        return Err(ProjError::PointOnLine);
    }
    Plane::new(f, [k[0][0], k[0][1], k[0][2], k[0][3]])
}

/// The line in which two distinct planes meet.
pub fn meet_planes(f: &Field, a: &Plane, b: &Plane) -> Option<Line> {
    let k = linalg::kernel(f, &[a.0.to_vec(), b.0.to_vec()], 4);
    if k.len() != 2 {
        return None;
    }
    Line::from_rows(
        f,
        [k[0][0], k[0][1], k[0][2], k[0][3]],
        [k[1][0], k[1][1], k[1][2], k[1][3]],
    )
    .ok()
}

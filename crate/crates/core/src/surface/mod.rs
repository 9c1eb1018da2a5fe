//! The cubic surface S = V(F) ⊂ P³ and its tangent geometry.
//!
//! `F` is stored as 20 coefficients in the order of [`forms::cubic_basis`].
//! The text format is `q=<p>^<k>; F=<c0>,<c1>,…,<c19>` with element codes.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::forms::{self, Exps};
use crate::gf::{Embedding, Field, FieldElem, FieldError};
use crate::proj::{self, Coords, Line, Plane, Point, ProjError};
use crate::upoly::BinaryForm;

mod lines;
mod local;
mod smooth;

pub use lines::intersection_pattern_ok;
pub use local::{GaussOnLine, PointClass, PointKind};
pub use smooth::{SingularSearch, StrictBudget};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("the zero form does not define a surface")]
    ZeroForm,
    #[error("expected 20 coefficients, got {0}")]
    CoefficientCount(usize),
    #[error("malformed surface string: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Proj(#[from] ProjError),
    #[error("point {0} is not on the surface")]
    NotOnSurface(Point),
    #[error("the surface is singular at {0}")]
    SingularPoint(Point),
    #[error("the line lies on the surface")]
    LineOnSurface,
    #[error("the line does not lie on the surface")]
    LineNotOnSurface,
    #[error("point {0} is not on the line")]
    PointNotOnLine(Point),
    #[error("the given points are not contained in the intersection divisor")]
    MultiplicityShortfall,
}

struct CubicTables {
    /// For each cubic monomial: a variable dividing it and the quadratic cofactor.
    split: [(usize, usize); 20],
    /// For each quadratic monomial: its two variables.
    quad_vars: [(usize, usize); 10],
}

fn tables() -> &'static CubicTables {
    static T: OnceLock<CubicTables> = OnceLock::new();
    T.get_or_init(|| {
        let cubic = forms::cubic_basis();
        let quad = forms::basis(4, 2);
        let mut split = [(0, 0); 20];
        for (i, e) in cubic.exps().iter().enumerate() {
            let v = e.iter().position(|&x| x > 0).unwrap();
            let mut rest: Exps = *e;
            rest[v] -= 1;
            split[i] = (v, quad.index(&rest));
        }
        let mut quad_vars = [(0, 0); 10];
        for (i, e) in quad.exps().iter().enumerate() {
            let u = e.iter().position(|&x| x > 0).unwrap();
            let v = if e[u] == 2 {
                u
            } else {
                (u + 1..4).find(|&w| e[w] > 0).unwrap()
            };
            quad_vars[i] = (u, v);
        }
        CubicTables { split, quad_vars }
    })
}

#[derive(Clone)]
pub struct CubicSurface {
    field: Arc<Field>,
    coeffs: [FieldElem; 20],
    /// ∂ⱼF as quadratic forms.
    partials: [[FieldElem; 10]; 4],
}

impl PartialEq for CubicSurface {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.coeffs == other.coeffs
    }
}

impl Eq for CubicSurface {}

impl fmt::Debug for CubicSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CubicSurface({self})")
    }
}

impl fmt::Display for CubicSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={}^{}; F=", self.field.p(), self.field.k())?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for CubicSurface {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CubicSurface::parse(s)
    }
}

fn parse_q(s: &str) -> Result<(u32, u32), SurfaceError> {
    let bad = || SurfaceError::Parse(format!("bad field size {s:?}"));
    if let Some((p, k)) = s.split_once('^') {
        Ok((
            p.trim().parse().map_err(|_| bad())?,
            k.trim().parse().map_err(|_| bad())?,
        ))
    } else {
        let q: u32 = s.trim().parse().map_err(|_| bad())?;
        for p in crate::gf::SUPPORTED_PRIMES {
            let mut k = 1;
            let mut pk = p;
            while pk < q {
                pk = pk.saturating_mul(p);
                k += 1;
            }
            if pk == q {
                return Ok((p, k));
            }
        }
        Err(bad())
    }
}

impl CubicSurface {
    pub fn new(field: Arc<Field>, coeffs: [FieldElem; 20]) -> Result<CubicSurface, SurfaceError> {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(SurfaceError::ZeroForm);
        }
        for c in &coeffs {
            field.elem(c.0 as u64)?;
        }
        let cubic = forms::cubic_basis();
        let partials = std::array::from_fn(|j| {
            let d = forms::derivative(&field, cubic, &coeffs, j);
            std::array::from_fn(|i| d[i])
        });
        Ok(CubicSurface {
            field,
            coeffs,
            partials,
        })
    }

    pub fn from_codes(field: Arc<Field>, codes: &[u32]) -> Result<CubicSurface, SurfaceError> {
        let coeffs: [u32; 20] = codes
            .try_into()
            .map_err(|_| SurfaceError::CoefficientCount(codes.len()))?;
        CubicSurface::new(field, coeffs.map(FieldElem))
    }

    /// Parse `q=<p>^<k>; F=<20 codes>`.
    pub fn parse(s: &str) -> Result<CubicSurface, SurfaceError> {
        let mut q = None;
        let mut codes = None;
        for part in s.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| SurfaceError::Parse(part.to_string()))?;
            match key.trim() {
                "q" => q = Some(parse_q(value)?),
                "F" => {
                    let v: Result<Vec<u32>, _> =
                        value.split(',').map(|c| c.trim().parse::<u32>()).collect();
                    codes = Some(v.map_err(|_| SurfaceError::Parse(value.to_string()))?);
                }
                other => return Err(SurfaceError::Parse(format!("unknown key {other:?}"))),
            }
        }
        let (p, k) = q.ok_or_else(|| SurfaceError::Parse("missing q".into()))?;
        let codes = codes.ok_or_else(|| SurfaceError::Parse("missing F".into()))?;
        CubicSurface::from_codes(Arc::new(Field::new(p, k)?), &codes)
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<Field> {
        &self.field
    }

    #[inline]
    pub fn coeffs(&self) -> &[FieldElem; 20] {
        &self.coeffs
    }

    /// ∂ⱼF as a quadratic form in the order of `forms::basis(4, 2)`.
    pub fn partial(&self, j: usize) -> &[FieldElem; 10] {
        &self.partials[j]
    }

    #[inline]
    fn quad_values(&self, x: &Coords) -> [FieldElem; 10] {
        let f = &*self.field;
        tables().quad_vars.map(|(u, v)| f.mul(x[u], x[v]))
    }

    /// F at an arbitrary coordinate vector.
    pub fn eval_coords(&self, x: &Coords) -> FieldElem {
        let f = &*self.field;
        let qv = self.quad_values(x);
        let t = tables();
        let mut acc = FieldElem::ZERO;
        for (c, &(v, qi)) in self.coeffs.iter().zip(&t.split) {
            if !c.is_zero() {
                acc = f.mul_add(acc, *c, f.mul(x[v], qv[qi]));
            }
        }
        acc
    }

    pub fn evaluate(&self, p: &Point) -> FieldElem {
        self.eval_coords(p.coords())
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.evaluate(p).is_zero()
    }

    /// Formal gradient at an arbitrary coordinate vector.
    pub fn gradient_coords(&self, x: &Coords) -> Coords {
        let f = &*self.field;
        let qv = self.quad_values(x);
        self.partials.map(|d| {
            d.iter()
                .zip(&qv)
                .fold(FieldElem::ZERO, |acc, (&c, &m)| f.mul_add(acc, c, m))
        })
    }

    pub fn gradient(&self, p: &Point) -> Coords {
        self.gradient_coords(p.coords())
    }

    pub fn is_singular_at(&self, p: &Point) -> bool {
        self.contains(p) && self.gradient(p).iter().all(|c| c.is_zero())
    }

    /// Π_P, the plane with covector ∇F(P).
    pub fn tangent_plane(&self, p: &Point) -> Result<Plane, SurfaceError> {
        if !self.contains(p) {
            return Err(SurfaceError::NotOnSurface(*p));
        }
        Plane::new(&self.field, self.gradient(p)).map_err(|_| SurfaceError::SingularPoint(*p))
    }

    /// F(s·a + t·b) as a binary cubic (coefficients of s³, s²t, st², t³).
    pub fn restrict_to_points(&self, a: &Coords, b: &Coords) -> BinaryForm {
        let f = &*self.field;
        let t = tables();
        let quads: [[FieldElem; 3]; 10] = t.quad_vars.map(|(u, v)| {
            [
                f.mul(a[u], a[v]),
                f.add(f.mul(a[u], b[v]), f.mul(b[u], a[v])),
                f.mul(b[u], b[v]),
            ]
        });
        let mut out = [FieldElem::ZERO; 4];
        for (c, &(v, qi)) in self.coeffs.iter().zip(&t.split) {
            if c.is_zero() {
                continue;
            }
            let qd = &quads[qi];
            let (la, lb) = (f.mul(*c, a[v]), f.mul(*c, b[v]));
            out[0] = f.mul_add(out[0], la, qd[0]);
            out[1] = f.add(out[1], f.add(f.mul(la, qd[1]), f.mul(lb, qd[0])));
            out[2] = f.add(out[2], f.add(f.mul(la, qd[2]), f.mul(lb, qd[1])));
            out[3] = f.mul_add(out[3], lb, qd[2]);
        }
        BinaryForm::new(out.to_vec())
    }

    /// Restriction of F to the stored basis (A, B) of the line.
    pub fn restrict_to_line(&self, line: &Line) -> BinaryForm {
        let [a, b] = line.basis();
        self.restrict_to_points(a, b)
    }

    pub fn line_on_surface(&self, line: &Line) -> bool {
        self.restrict_to_line(line).is_zero()
    }

    /// All K-lines of P³ lying on S, by filtering every line of the space.
    pub fn k_lines_by_filter(&self) -> Vec<Line> {
        proj::lines_of_space(&self.field)
            .into_iter()
            .filter(|l| self.line_on_surface(l))
            .collect()
    }

    /// The residual point R with ℓ·S = P + Q + R.
    pub fn third_intersection(
        &self,
        line: &Line,
        p: &Point,
        q: &Point,
    ) -> Result<Point, SurfaceError> {
        let f = &*self.field;
        let cubic = self.restrict_to_line(line);
        if cubic.is_zero() {
            return Err(SurfaceError::LineOnSurface);
        }
        let sp = line
            .parameter_of(f, p)
            .ok_or(SurfaceError::PointNotOnLine(*p))?;
        let sq = line
            .parameter_of(f, q)
            .ok_or(SurfaceError::PointNotOnLine(*q))?;
        let rest = cubic
            .divide_root(f, sp)
            .and_then(|c| c.divide_root(f, sq))
            .ok_or(SurfaceError::MultiplicityShortfall)?;
        let (g0, g1) = (rest.coeff(0), rest.coeff(1));
        Ok(line.point_at(f, f.neg(g1), g0))
    }

    /// All K-points of S, in the enumeration order of `points_of_space`.
    pub fn points(&self) -> Vec<Point> {
        proj::points_of_space(&self.field)
            .into_iter()
            .filter(|p| self.contains(p))
            .collect()
    }

    /// The same form over an extension field.
    pub fn base_change(&self, target: &Arc<Field>) -> Result<CubicSurface, SurfaceError> {
        let emb = Embedding::new(&self.field, target)?;
        CubicSurface::new(target.clone(), self.coeffs.map(|c| emb.apply(c)))
    }
}

//! Local geometry at a point (Γ_P, Eckardt points) and the Gauss map on a
//! line of the surface.

use serde::Serialize;

use super::{CubicSurface, SurfaceError};
use crate::forms;
use crate::gf::FieldElem;
use crate::linalg;
use crate::proj::{self, Coords, Line, Plane, Point};
use crate::upoly::BinaryForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PointKind {
    Eckardt,
    ParabolicCusp,
    Node,
}

/// Shape of Γ_P = S ∩ Π_P at P.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointClass {
    pub kind: PointKind,
    /// Points `uA + vB` spanning the rational asymptotic lines with P.
    /// Empty for an Eckardt point, where every direction is asymptotic.
    pub asymptotic_dirs: Vec<Point>,
    /// Coefficients of u², uv, v² in the local expansion λ·q(u, v) + c(u, v).
    pub quadratic: [FieldElem; 3],
    /// Number of lines of S through P over the algebraic closure.
    pub lines_through: usize,
}

/// Two vectors completing P to a basis of Π_P, chosen canonically from the
/// echelon kernel of the tangent covector.
fn plane_frame(s: &CubicSurface, p: &Point, grad: &Coords) -> (Coords, Coords) {
    let f = s.field();
    let k = linalg::kernel(f, &[grad.to_vec()], 4);
    for i in 0..k.len() {
        for j in i + 1..k.len() {
            let rows = vec![p.coords().to_vec(), k[i].clone(), k[j].clone()];
            if linalg::rank(f, &rows) == 3 {
                let c = |v: &Vec<FieldElem>| [v[0], v[1], v[2], v[3]];
                return (c(&k[i]), c(&k[j]));
            }
        }
    }
    unreachable!("tangent plane has dimension 3 and contains P")
}

impl CubicSurface {
    /// Classify a smooth point of S by the quadratic part of Γ_P at P.
    pub fn classify_point(&self, p: &Point) -> Result<PointClass, SurfaceError> {
        let f = self.field();
        if !self.contains(p) {
            return Err(SurfaceError::NotOnSurface(*p));
        }
        let grad = self.gradient(p);
        if grad.iter().all(|c| c.is_zero()) {
            return Err(SurfaceError::SingularPoint(*p));
        }
        let (a, b) = plane_frame(self, p, &grad);
        let local = forms::pullback(f, forms::cubic_basis(), self.coeffs(), &[*p.coords(), a, b]);
        // basis(3,3): λ³, λ²u, λ²v, λu², λuv, λv², u³, u²v, uv², v³
        debug_assert!(local[..3].iter().all(|c| c.is_zero()));
        let quadratic = [local[3], local[4], local[5]];
        let qform = BinaryForm::new(quadratic.to_vec());
        let cform = BinaryForm::new(local[6..10].to_vec());
        let kind = if qform.is_zero() {
            PointKind::Eckardt
        } else {
            let [c20, c11, c02] = quadratic;
            let repeated = if f.p() == 2 {
                c11.is_zero()
            } else {
                let disc = f.sub(f.mul(c11, c11), f.mul(f.from_int(4), f.mul(c20, c02)));
                disc.is_zero()
            };
            if repeated {
                PointKind::ParabolicCusp
            } else {
                PointKind::Node
            }
        };
        let asymptotic_dirs = if kind == PointKind::Eckardt {
            Vec::new()
        } else {
            qform
                .rational_roots(f)
                .into_iter()
                .map(|((u, v), _)| Point::new(f, proj::combine(f, u, &a, v, &b)).unwrap())
                .collect()
        };
        let lines_through = BinaryForm::common_distinct_roots(f, &qform, &cform).unwrap_or(0);
        Ok(PointClass {
            kind,
            asymptotic_dirs,
            quadratic,
            lines_through,
        })
    }

    pub fn is_eckardt(&self, p: &Point) -> bool {
        matches!(self.classify_point(p), Ok(c) if c.kind == PointKind::Eckardt)
    }

    /// The Gauss map γ_ℓ of a line ℓ ⊂ S.
    pub fn gauss_on_line(&self, line: &Line) -> Result<GaussOnLine, SurfaceError> {
        let f = self.field();
        if !self.line_on_surface(line) {
            return Err(SurfaceError::LineNotOnSurface);
        }
        let [a, b] = *line.basis();
        // Complete (A, B) to a basis with standard vectors C, D placed first.
        let mut cols: Vec<Coords> = Vec::new();
        for e in 0..4 {
            let mut v = [FieldElem::ZERO; 4];
            v[e] = FieldElem::ONE;
            let mut rows: Vec<Vec<FieldElem>> = vec![a.to_vec(), b.to_vec()];
            rows.extend(cols.iter().map(|c| c.to_vec()));
            rows.push(v.to_vec());
            if linalg::rank(f, &rows) == rows.len() {
                cols.push(v);
            }
            if cols.len() == 2 {
                break;
            }
        }
        cols.push(a);
        cols.push(b);
        let frame: Vec<Vec<FieldElem>> = (0..4)
            .map(|i| (0..4).map(|j| cols[j][i]).collect())
            .collect();
        let inv = linalg::inverse(f, &frame).expect("frame is a basis");
        let pencil = [
            [inv[0][0], inv[0][1], inv[0][2], inv[0][3]],
            [inv[1][0], inv[1][1], inv[1][2], inv[1][3]],
        ];
        let b4 = forms::cubic_basis();
        let g = forms::pullback(f, b4, self.coeffs(), &cols);
        let at = |e: [u8; 4]| g[b4.index(&e)];
        let quad = |x0: u8, x1: u8| {
            BinaryForm::new(vec![
                at([x0, x1, 2, 0]),
                at([x0, x1, 1, 1]),
                at([x0, x1, 0, 2]),
            ])
        };
        let lin = |x0: u8, x1: u8| BinaryForm::new(vec![at([x0, x1, 1, 0]), at([x0, x1, 0, 1])]);
        let alpha = quad(1, 0);
        let beta = quad(0, 1);
        let e1 = beta.mul(f, &alpha.ds(f)).sub(f, &alpha.mul(f, &beta.ds(f)));
        debug_assert!(e1.coeff(0).is_zero());
        let parabolic = BinaryForm::new(e1.coeffs[1..].to_vec());
        let bb = beta.mul(f, &beta);
        let ab = alpha.mul(f, &beta);
        let aa = alpha.mul(f, &alpha);
        let eckardt_form = bb
            .mul(f, &lin(2, 0))
            .sub(f, &ab.mul(f, &lin(1, 1)))
            .add(f, &aa.mul(f, &lin(0, 2)));
        Ok(GaussOnLine {
            line: *line,
            separable: !parabolic.is_zero(),
            u: alpha,
            v: beta,
            pencil,
            parabolic,
            eckardt_form,
        })
    }

    /// K-rational Eckardt points on a line of S.
    pub fn eckardt_points_on_line(&self, line: &Line) -> Result<Vec<Point>, SurfaceError> {
        Ok(self.gauss_on_line(line)?.rational_eckardt_points(self))
    }
}

/// γ_ℓ(s:t) = (u(s,t) : v(s,t)) in the pencil basis `pencil`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussOnLine {
    pub line: Line,
    pub u: BinaryForm,
    pub v: BinaryForm,
    /// Two covectors spanning the planes through the line.
    pub pencil: [Coords; 2],
    /// Binary quadratic whose roots are the parabolic points; identically
    /// zero exactly when γ_ℓ is inseparable.
    pub parabolic: BinaryForm,
    /// Binary quintic that, together with `parabolic`, cuts out the Eckardt
    /// points on the line.
    pub eckardt_form: BinaryForm,
    pub separable: bool,
}

impl GaussOnLine {
    /// Tangent plane at the point with parameter (s:t).
    pub fn tangent_plane_at(&self, s: &CubicSurface, st: (FieldElem, FieldElem)) -> Plane {
        let f = s.field();
        let (a, b) = (self.u.eval(f, st.0, st.1), self.v.eval(f, st.0, st.1));
        Plane::new(f, proj::combine(f, a, &self.pencil[0], b, &self.pencil[1]))
            .expect("smooth along the line")
    }

    /// Distinct parabolic points over the closure; `None` when every point is parabolic.
    pub fn parabolic_count(&self, s: &CubicSurface) -> Option<usize> {
        self.parabolic.distinct_root_count(s.field())
    }

    /// Distinct Eckardt points on the line over the closure.
    pub fn eckardt_count(&self, s: &CubicSurface) -> usize {
        BinaryForm::common_distinct_roots(s.field(), &self.parabolic, &self.eckardt_form)
            .unwrap_or(usize::MAX)
    }

    fn rational_matching(&self, s: &CubicSurface, eckardt: bool) -> Vec<Point> {
        let f = s.field();
        proj::projective_line(f)
            .into_iter()
            .filter(|&(a, b)| {
                self.parabolic.eval(f, a, b).is_zero()
                    && (!eckardt || self.eckardt_form.eval(f, a, b).is_zero())
            })
            .map(|(a, b)| self.line.point_at(f, a, b))
            .collect()
    }

    pub fn rational_parabolic_points(&self, s: &CubicSurface) -> Vec<Point> {
        self.rational_matching(s, false)
    }

    pub fn rational_eckardt_points(&self, s: &CubicSurface) -> Vec<Point> {
        self.rational_matching(s, true)
    }
}

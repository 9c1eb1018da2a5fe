//! Lines on the surface, found chart by chart.
//!
//! A line with echelon pivots (i, j) is spanned by A with A_i = 1, A_j = 0
//! and zeros before i, and B with B_j = 1 and zeros before j. It lies on S
//! iff F(A) = F(B) = 0 and both mixed terms ∇F(A)·B, ∇F(B)·A vanish, so
//! it suffices to pair up points of two plane sections.

use std::sync::Arc;

use super::{CubicSurface, SurfaceError};
use crate::gf::{Field, FieldElem};
use crate::linalg;
use crate::proj::{self, Coords, Line};

impl CubicSurface {
    /// Zeros of F among vectors with a 1 at `lead`, zeros before it and a
    /// zero at `zero` (if given).
    fn chart_points(&self, lead: usize, zero: Option<usize>) -> Vec<Coords> {
        let f = self.field();
        let free: Vec<usize> = (lead + 1..4).filter(|&c| Some(c) != zero).collect();
        let q = f.q() as u64;
        let mut out = Vec::new();
        for n in 0..q.pow(free.len() as u32) {
            let mut v = [FieldElem::ZERO; 4];
            v[lead] = FieldElem::ONE;
            let mut rest = n;
            for &c in &free {
                v[c] = FieldElem((rest % q) as u32);
                rest /= q;
            }
            if self.eval_coords(&v).is_zero() {
                out.push(v);
            }
        }
        out
    }

    /// All K-lines on S.
    pub fn k_lines_on_surface(&self) -> Vec<Line> {
        let f = self.field();
        let mut out = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                let a_side: Vec<(Coords, Coords)> = self
                    .chart_points(i, Some(j))
                    .into_iter()
                    .map(|a| (a, self.gradient_coords(&a)))
                    .collect();
                let b_side: Vec<(Coords, Coords)> = self
                    .chart_points(j, None)
                    .into_iter()
                    .map(|b| (b, self.gradient_coords(&b)))
                    .collect();
                for (a, ga) in &a_side {
                    for (b, gb) in &b_side {
                        if linalg::dot(f, ga, b).is_zero() && linalg::dot(f, gb, a).is_zero() {
                            out.push(Line::from_rows(f, *a, *b).expect("independent rows"));
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Lines of S defined over GF(q^m).
    pub fn lines_over_extension(&self, m: u32) -> Result<Vec<Line>, SurfaceError> {
        let f = self.field();
        let ext = Arc::new(Field::new(f.p(), f.k() * m)?);
        Ok(self.base_change(&ext)?.k_lines_on_surface())
    }
}

/// For a full set of 27 lines: every line meets exactly ten others, and
/// those ten split into five pairs, each pair coplanar with the line.
pub fn intersection_pattern_ok(f: &Field, lines: &[Line]) -> bool {
    let n = lines.len();
    let meets: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && !proj::are_skew(f, &lines[i], &lines[j]))
                .collect()
        })
        .collect();
    (0..n).all(|i| {
        let nbrs: Vec<usize> = (0..n).filter(|&j| meets[i][j]).collect();
        if nbrs.len() != 10 {
            return false;
        }
        nbrs.iter().all(|&a| {
            let partners: Vec<usize> = nbrs.iter().copied().filter(|&b| meets[a][b]).collect();
            if partners.len() != 1 {
                return false;
            }
            let b = partners[0];
            let rows: Vec<Vec<FieldElem>> = [&lines[i], &lines[a], &lines[b]]
                .iter()
                .flat_map(|l| l.basis().iter().map(|r| r.to_vec()))
                .collect();
            linalg::rank(f, &rows) == 3
        })
    })
}

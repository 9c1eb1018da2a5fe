//! Exact smoothness.
//!
//! S is smooth iff F and its four partials have no common zero over the
//! algebraic closure. For five forms of degrees 3, 2, 2, 2, 2 in four
//! variables that happens iff the degree-8 piece of the ideal they generate
//! is all of the 165-dimensional space of octics, which is a rank test on a
//! 392 × 165 matrix. An independent search for singular points over
//! extension fields serves as an oracle and as a strict re-check.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use super::CubicSurface;
use crate::forms;
use crate::gf::{Field, FieldElem};
use crate::linalg::{self, Gf3Row};
use crate::proj;
use crate::upoly::UPoly;

/// Degree of the graded piece used by the rank test.
pub const MACAULAY_DEGREE: usize = 8;
const OCTICS: usize = 165;
/// Above this many points of P³(K) the rational pre-check is skipped.
const CHEAP_CHECK_LIMIT: usize = 20_000;

struct Layout {
    /// Columns hit by F · m for each quintic m.
    cubic_rows: Vec<[u8; 20]>,
    /// Columns hit by ∂F · m for each sextic m.
    quad_rows: Vec<[u8; 10]>,
}

fn layout() -> &'static Layout {
    static L: OnceLock<Layout> = OnceLock::new();
    L.get_or_init(|| {
        let target = forms::basis(4, MACAULAY_DEGREE);
        let shift = |deg: usize, gen: &'static forms::MonomialBasis| {
            forms::basis(4, deg)
                .exps()
                .iter()
                .map(|m| {
                    gen.exps()
                        .iter()
                        .map(|e| target.index(&forms::add_exps(e, m)) as u8)
                        .collect::<Vec<u8>>()
                })
                .collect::<Vec<_>>()
        };
        let cubic_rows = shift(5, forms::cubic_basis())
            .into_iter()
            .map(|v| v.try_into().unwrap())
            .collect();
        let quad_rows = shift(6, forms::basis(4, 2))
            .into_iter()
            .map(|v| v.try_into().unwrap())
            .collect();
        Layout {
            cubic_rows,
            quad_rows,
        }
    })
}

/// Budget for the strict extension-field search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StrictBudget {
    /// Largest extension degree m searched.
    pub max_degree: u32,
    /// Extensions with more than this many elements are skipped.
    pub max_field_size: u64,
}

impl Default for StrictBudget {
    fn default() -> Self {
        StrictBudget {
            max_degree: 6,
            max_field_size: 1024,
        }
    }
}

/// A singular point found by [`CubicSurface::singular_point_search`].
///
/// `fiber` holds codes `(a, b, c)` in GF(q^m): the point is `(a:b:c:w)` for a
/// root `w` of `gcd_degree`-many candidates. `None` stands for `(0:0:0:1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularSearch {
    pub degree: u32,
    pub fiber: Option<[u32; 3]>,
    pub gcd_degree: Option<usize>,
}

impl CubicSurface {
    /// Sparse rows of the Macaulay matrix: F times quintics, then each ∂ⱼF
    /// times sextics.
    fn for_each_macaulay_row(
        &self,
        mut emit: impl FnMut(&mut dyn Iterator<Item = (u8, FieldElem)>),
    ) {
        let l = layout();
        for cols in &l.cubic_rows {
            emit(&mut cols.iter().copied().zip(self.coeffs().iter().copied()));
        }
        for j in 0..4 {
            let d = self.partial(j);
            if d.iter().all(|c| c.is_zero()) {
                continue;
            }
            for cols in &l.quad_rows {
                emit(&mut cols.iter().copied().zip(d.iter().copied()));
            }
        }
    }

    /// Rank of the degree-8 Macaulay matrix (165 means smooth).
    pub fn macaulay_rank(&self) -> usize {
        let f = self.field();
        match (f.p(), f.k()) {
            (2, 1) => {
                let mut rows: Vec<[u64; 3]> = Vec::with_capacity(392);
                self.for_each_macaulay_row(|it| {
                    let mut w = [0u64; 3];
                    for (c, v) in it {
                        if !v.is_zero() {
                            w[c as usize / 64] |= 1 << (c % 64);
                        }
                    }
                    rows.push(w);
                });
                linalg::rank_gf2(&mut rows, OCTICS)
            }
            (3, 1) => {
                let mut rows: Vec<Gf3Row<3>> = Vec::with_capacity(392);
                self.for_each_macaulay_row(|it| {
                    let mut row = ([0u64; 3], [0u64; 3]);
                    for (c, v) in it {
                        let (w, bit) = (c as usize / 64, 1u64 << (c % 64));
                        match v.0 {
                            1 => row.0[w] |= bit,
                            2 => row.1[w] |= bit,
                            _ => {}
                        }
                    }
                    rows.push(row);
                });
                linalg::rank_gf3(&mut rows, OCTICS, OCTICS)
            }
            (p, 1) => {
                let mut rows: Vec<Vec<u8>> = Vec::with_capacity(392);
                self.for_each_macaulay_row(|it| {
                    let mut row = vec![0u8; OCTICS];
                    for (c, v) in it {
                        row[c as usize] = v.0 as u8;
                    }
                    rows.push(row);
                });
                linalg::rank_prime(&mut rows, OCTICS, p as u8, OCTICS)
            }
            _ => {
                let mut rows: Vec<Vec<FieldElem>> = Vec::with_capacity(392);
                self.for_each_macaulay_row(|it| {
                    let mut row = vec![FieldElem::ZERO; OCTICS];
                    for (c, v) in it {
                        row[c as usize] = v;
                    }
                    rows.push(row);
                });
                linalg::rank_generic(f, &mut rows, OCTICS, OCTICS)
            }
        }
    }

    /// A K-rational singular point, if any.
    pub fn rational_singular_point(&self) -> Option<proj::Point> {
        proj::points_of_space(self.field())
            .into_iter()
            .find(|p| self.is_singular_at(p))
    }

    /// Exact smoothness over the algebraic closure.
    pub fn is_smooth(&self) -> bool {
        let q = self.field().q() as usize;
        if q * q * q <= CHEAP_CHECK_LIMIT && self.rational_singular_point().is_some() {
            return false;
        }
        self.macaulay_rank() == OCTICS
    }

    /// Search for singular points whose projection from (0:0:0:1) is
    /// rational over GF(q^m), for every m ≤ `max_degree` with
    /// q^m ≤ `max_field_size`.
    pub fn singular_point_search(&self, budget: StrictBudget) -> Option<SingularSearch> {
        let f = self.field();
        let c = self.coeffs();
        // (0:0:0:1): F and all partials reduce to their x₃-pure coefficients.
        if [c[19], c[9], c[15], c[18]].iter().all(|x| x.is_zero()) {
            return Some(SingularSearch {
                degree: 1,
                fiber: None,
                gcd_degree: None,
            });
        }
        let allowed: Vec<u32> = (1..=budget.max_degree)
            .filter(|&m| {
                (f.q() as u64)
                    .checked_pow(m)
                    .is_some_and(|n| n <= budget.max_field_size)
            })
            .collect();
        // Subfields are covered by any multiple in range.
        let maximal: Vec<u32> = allowed
            .iter()
            .copied()
            .filter(|&m| !allowed.iter().any(|&n| n > m && n % m == 0))
            .collect();
        for m in maximal {
            let ext = if m == 1 {
                self.field_arc().clone()
            } else {
                match Field::new(f.p(), f.k() * m) {
                    Ok(e) => Arc::new(e),
                    Err(_) => continue,
                }
            };
            let s = if m == 1 {
                self.clone()
            } else {
                self.base_change(&ext).expect("extension of the base field")
            };
            if let Some((fiber, g)) = fiber_search(&s) {
                return Some(SingularSearch {
                    degree: m,
                    fiber: Some(fiber.map(|x| x.0)),
                    gcd_degree: g,
                });
            }
        }
        None
    }

    /// Rank test confirmed by the extension search within `budget`.
    pub fn is_smooth_strict(&self, budget: StrictBudget) -> bool {
        self.is_smooth() && self.singular_point_search(budget).is_none()
    }
}

/// Scan the fibres (a:b:c:w) over P²(E); returns the first fibre where F
/// and its partials share a root in w (`None` degree: all vanish identically).
fn fiber_search(s: &CubicSurface) -> Option<([FieldElem; 3], Option<usize>)> {
    let f = s.field();
    let cubic = forms::cubic_basis().exps();
    let quad = forms::basis(4, 2).exps();
    let partials: Vec<&[FieldElem; 10]> = (0..4).map(|j| s.partial(j)).collect();
    let check = |v: [FieldElem; 3]| -> Option<Option<usize>> {
        let mut pw = [[FieldElem::ONE; 4]; 3];
        for i in 0..3 {
            for d in 1..4 {
                pw[i][d] = f.mul(pw[i][d - 1], v[i]);
            }
        }
        let weight = |e: &[u8; 4]| {
            f.mul(
                pw[0][e[0] as usize],
                f.mul(pw[1][e[1] as usize], pw[2][e[2] as usize]),
            )
        };
        let mut fw = vec![FieldElem::ZERO; 4];
        for (c, e) in s.coeffs().iter().zip(cubic) {
            if !c.is_zero() {
                fw[e[3] as usize] = f.mul_add(fw[e[3] as usize], *c, weight(e));
            }
        }
        let mut g = UPoly::new(fw);
        for d in &partials {
            if g.degree() == Some(0) {
                return None;
            }
            let mut dw = vec![FieldElem::ZERO; 3];
            for (c, e) in d.iter().zip(quad) {
                if !c.is_zero() {
                    dw[e[3] as usize] = f.mul_add(dw[e[3] as usize], *c, weight(e));
                }
            }
            g = g.gcd(f, &UPoly::new(dw));
        }
        match g.degree() {
            None => Some(None),
            Some(0) => None,
            Some(d) => Some(Some(d)),
        }
    };
    let zero = FieldElem::ZERO;
    let one = FieldElem::ONE;
    for b in f.elements() {
        for c in f.elements() {
            if let Some(g) = check([one, b, c]) {
                return Some(([one, b, c], g));
            }
        }
    }
    for c in f.elements() {
        if let Some(g) = check([zero, one, c]) {
            return Some(([zero, one, c], g));
        }
    }
    check([zero, zero, one]).map(|g| ([zero, zero, one], g))
}

#[cfg(test)]
mod tests {
    use super::super::tests::fermat;
    use super::*;

    fn surface(p: u32, k: u32, codes: &[u32]) -> CubicSurface {
        CubicSurface::from_codes(Arc::new(Field::new(p, k).unwrap()), codes).unwrap()
    }

    #[test]
    fn layout_shape() {
        let l = layout();
        assert_eq!(l.cubic_rows.len(), 56);
        assert_eq!(l.quad_rows.len(), 84);
        assert_eq!(forms::basis(4, MACAULAY_DEGREE).len(), OCTICS);
    }

    #[test]
    fn known_examples() {
        assert!(fermat(7).is_smooth());
        assert!(fermat(5).is_smooth());
        assert!(fermat(2).is_smooth());
        // X³+Y³+Z³ is a cone over a plane cubic
        let mut c = [0u32; 20];
        c[0] = 1;
        c[10] = 1;
        c[16] = 1;
        let cone = surface(7, 1, &c);
        assert!(!cone.is_smooth());
        assert!(cone.is_singular_at(&proj::Point::from_codes(cone.field(), [0, 0, 0, 1]).unwrap()));
        assert_ne!(cone.macaulay_rank(), OCTICS);
        // Cayley's nodal cubic XYZ + XYW + XZW + YZW
        let b = forms::cubic_basis();
        let mut c = [0u32; 20];
        for e in [[1, 1, 1, 0], [1, 1, 0, 1], [1, 0, 1, 1], [0, 1, 1, 1]] {
            c[b.index(&e)] = 1;
        }
        let cayley = surface(5, 1, &c);
        assert!(!cayley.is_smooth());
        assert_ne!(cayley.macaulay_rank(), OCTICS);
        for e in 0..4 {
            let mut x = [0u32; 4];
            x[e] = 1;
            let p = proj::Point::from_codes(cayley.field(), x).unwrap();
            assert!(cayley.is_singular_at(&p));
        }
    }

    #[test]
    fn fermat_in_characteristic_three_is_singular() {
        // X³+Y³+Z³+W³ = (X+Y+Z+W)³ in characteristic 3
        let s = fermat(3);
        assert!(!s.is_smooth());
        assert_ne!(s.macaulay_rank(), OCTICS);
        assert!(s.singular_point_search(StrictBudget::default()).is_some());
    }

    #[test]
    fn rank_kernels_agree() {
        // the same integer-coefficient surfaces through all four kernels
        let mut state = 99u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 33) as u32
        };
        for _ in 0..40 {
            let codes: Vec<u32> = (0..20).map(|_| next()).collect();
            for (p, k) in [(2, 1), (3, 1), (5, 1)] {
                let q = p;
                let c: Vec<u32> = codes.iter().map(|x| x % q).collect();
                if c.iter().all(|&x| x == 0) {
                    continue;
                }
                let s = surface(p, k, &c);
                let fast = s.macaulay_rank();
                let mut rows: Vec<Vec<FieldElem>> = Vec::new();
                s.for_each_macaulay_row(|it| {
                    let mut row = vec![FieldElem::ZERO; OCTICS];
                    for (col, v) in it {
                        row[col as usize] = v;
                    }
                    rows.push(row);
                });
                assert_eq!(fast, linalg::rank(s.field(), &rows));
            }
        }
    }

    #[test]
    fn search_agrees_with_rank_on_small_samples() {
        let mut state = 7u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as u32
        };
        let budget = StrictBudget {
            max_degree: 4,
            max_field_size: 1 << 12,
        };
        for _ in 0..60 {
            let c: Vec<u32> = (0..20).map(|_| next() % 2).collect();
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            let s = surface(2, 1, &c);
            assert_eq!(
                s.is_smooth(),
                s.singular_point_search(budget).is_none(),
                "{s}"
            );
        }
    }
}

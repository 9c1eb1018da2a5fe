//! Monomial bases in up to four variables and dense homogeneous forms.
//!
//! Every basis lists its monomials in descending lexicographic order of the
//! exponent tuple. For cubics in four variables this is the coefficient order
//! of the surface file format: x₀³, x₀²x₁, …, x₂x₃², x₃³.

use std::sync::OnceLock;

use crate::gf::{Field, FieldElem};

pub type Exps = [u8; 4];

const MAX_DEGREE: usize = 8;

pub struct MonomialBasis {
    nvars: usize,
    degree: usize,
    exps: Vec<Exps>,
    /// Packed exponents (4 bits per variable) to position.
    lookup: Vec<u16>,
}

#[inline]
fn pack(e: &Exps) -> usize {
    e[0] as usize | (e[1] as usize) << 4 | (e[2] as usize) << 8 | (e[3] as usize) << 12
}

fn fill(nvars: usize, var: usize, left: u8, cur: &mut Exps, out: &mut Vec<Exps>) {
    if var + 1 == nvars {
        cur[var] = left;
        out.push(*cur);
        cur[var] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[var] = e;
        fill(nvars, var + 1, left - e, cur, out);
    }
    cur[var] = 0;
}

impl MonomialBasis {
    fn build(nvars: usize, degree: usize) -> MonomialBasis {
        let mut exps = Vec::new();
        fill(nvars, 0, degree as u8, &mut [0; 4], &mut exps);
        let mut lookup = vec![u16::MAX; 1 << 16];
        for (i, e) in exps.iter().enumerate() {
            lookup[pack(e)] = i as u16;
        }
        MonomialBasis {
            nvars,
            degree,
            exps,
            lookup,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self) -> &[Exps] {
        &self.exps
    }

    /// Position of a monomial of this degree.
    #[inline]
    pub fn index(&self, e: &Exps) -> usize {
        let i = self.lookup[pack(e)];
        debug_assert!(i != u16::MAX, "monomial {e:?} not in basis");
        i as usize
    }
}

/// The cached basis of degree `degree` forms in `nvars` variables.
pub fn basis(nvars: usize, degree: usize) -> &'static MonomialBasis {
    static CACHE: [[OnceLock<MonomialBasis>; MAX_DEGREE + 1]; 4] =
        [const { [const { OnceLock::new() }; MAX_DEGREE + 1] }; 4];
    assert!((1..=4).contains(&nvars) && degree <= MAX_DEGREE);
    CACHE[nvars - 1][degree].get_or_init(|| MonomialBasis::build(nvars, degree))
}

pub fn cubic_basis() -> &'static MonomialBasis {
    basis(4, 3)
}

pub fn add_exps(a: &Exps, b: &Exps) -> Exps {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// Evaluate a dense form at `x`.
pub fn eval(f: &Field, b: &MonomialBasis, coeffs: &[FieldElem], x: &[FieldElem]) -> FieldElem {
    let mut powers = [[FieldElem::ONE; MAX_DEGREE + 1]; 4];
    for (v, pw) in powers.iter_mut().enumerate().take(b.nvars) {
        for d in 1..=b.degree {
            pw[d] = f.mul(pw[d - 1], x[v]);
        }
    }
    let mut acc = FieldElem::ZERO;
    for (c, e) in coeffs.iter().zip(&b.exps) {
        if c.is_zero() {
            continue;
        }
        let mut m = *c;
        for v in 0..b.nvars {
            m = f.mul(m, powers[v][e[v] as usize]);
        }
        acc = f.add(acc, m);
    }
    acc
}

/// Formal partial derivative with respect to variable `var`.
pub fn derivative(
    f: &Field,
    b: &MonomialBasis,
    coeffs: &[FieldElem],
    var: usize,
) -> Vec<FieldElem> {
    let target = basis(b.nvars, b.degree - 1);
    let mut out = vec![FieldElem::ZERO; target.len()];
    for (c, e) in coeffs.iter().zip(&b.exps) {
        if c.is_zero() || e[var] == 0 {
            continue;
        }
        let mut d = *e;
        d[var] -= 1;
        let i = target.index(&d);
        out[i] = f.add(out[i], f.mul(f.from_int(e[var] as i64), *c));
    }
    out
}

/// Substitute `x = Σ_r y_r · cols[r]` into a four-variable form, giving a
/// form of the same degree in `cols.len()` variables.
pub fn pullback(
    f: &Field,
    b: &MonomialBasis,
    coeffs: &[FieldElem],
    cols: &[[FieldElem; 4]],
) -> Vec<FieldElem> {
    assert_eq!(b.nvars, 4);
    let k = cols.len();
    let target = basis(k, b.degree);
    // Running expansion, one factor at a time, keyed by monomials of the
    // partial degree.
    let mut out = vec![FieldElem::ZERO; target.len()];
    for (c, e) in coeffs.iter().zip(&b.exps) {
        if c.is_zero() {
            continue;
        }
        let mut terms: Vec<(Exps, FieldElem)> = vec![([0; 4], *c)];
        for (v, &mult) in e.iter().enumerate() {
            for _ in 0..mult {
                let mut next = Vec::with_capacity(terms.len() * k);
                for (ex, val) in &terms {
                    for (r, col) in cols.iter().enumerate() {
                        if col[v].is_zero() {
                            continue;
                        }
                        let mut ne = *ex;
                        ne[r] += 1;
                        next.push((ne, f.mul(*val, col[v])));
                    }
                }
                terms = next;
            }
        }
        for (ex, val) in terms {
            let i = target.index(&ex);
            out[i] = f.add(out[i], val);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn basis_sizes_and_order() {
        for n in 1..=4 {
            for d in 0..=MAX_DEGREE {
                let b = basis(n, d);
                assert_eq!(b.len(), binom(n + d - 1, d));
                for w in b.exps().windows(2) {
                    assert!(w[0] > w[1]);
                }
                for (i, e) in b.exps().iter().enumerate() {
                    assert_eq!(b.index(e), i);
                }
            }
        }
        let c = cubic_basis();
        assert_eq!(c.exps()[0], [3, 0, 0, 0]);
        assert_eq!(c.exps()[1], [2, 1, 0, 0]);
        assert_eq!(c.exps()[9], [1, 0, 0, 2]);
        assert_eq!(c.exps()[10], [0, 3, 0, 0]);
        assert_eq!(c.exps()[16], [0, 0, 3, 0]);
        assert_eq!(c.exps()[19], [0, 0, 0, 3]);
    }

    #[test]
    fn pullback_matches_evaluation() {
        let f = Field::prime(5).unwrap();
        let b = cubic_basis();
        let coeffs: Vec<FieldElem> = (0..20).map(|i| f.from_int(i * 7 + 3)).collect();
        let cols = [
            [1, 2, 0, 4].map(|x| f.from_int(x)),
            [0, 1, 3, 1].map(|x| f.from_int(x)),
            [2, 0, 1, 1].map(|x| f.from_int(x)),
        ];
        let pulled = pullback(&f, b, &coeffs, &cols);
        let b3 = basis(3, 3);
        for y0 in 0..5 {
            for y1 in 0..5 {
                for y2 in 0..5 {
                    let y = [y0, y1, y2].map(|x| f.from_int(x));
                    let x: Vec<FieldElem> = (0..4)
                        .map(|j| {
                            (0..3).fold(f.zero(), |acc, r| f.add(acc, f.mul(y[r], cols[r][j])))
                        })
                        .collect();
                    assert_eq!(eval(&f, b3, &pulled, &y), eval(&f, b, &coeffs, &x));
                }
            }
        }
    }

    #[test]
    fn derivative_is_formal() {
        let f = Field::prime(3).unwrap();
        let b = cubic_basis();
        let mut coeffs = vec![FieldElem::ZERO; 20];
        coeffs[0] = f.one(); // x0^3
        coeffs[1] = f.one(); // x0^2 x1
        let d0 = derivative(&f, b, &coeffs, 0);
        let q = basis(4, 2);
        // 3x0^2 vanishes, 2 x0 x1 survives
        assert!(d0[q.index(&[2, 0, 0, 0])].is_zero());
        assert_eq!(d0[q.index(&[1, 1, 0, 0])], f.from_int(2));
    }
}

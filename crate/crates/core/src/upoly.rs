//! Univariate polynomials and binary forms over a [`Field`].
//!
//! Only what the geometry needs: gcds, exact division, rational roots with
//! multiplicity and the number of distinct roots over the algebraic closure.

use crate::gf::{Field, FieldElem};

/// Polynomial with coefficients from the constant term upward; never has
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(Vec<FieldElem>);

impl UPoly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> UPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub fn zero() -> UPoly {
        UPoly(Vec::new())
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> FieldElem {
        self.0.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn eval(&self, f: &Field, x: FieldElem) -> FieldElem {
        self.0
            .iter()
            .rev()
            .fold(FieldElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn monic(&self, f: &Field) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = f.inv_nonzero(self.lead());
        UPoly(self.0.iter().map(|&c| f.mul(c, inv)).collect())
    }

    pub fn derivative(&self, f: &Field) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
                .collect(),
        )
    }

    /// Quotient and remainder; `divisor` must be nonzero.
    pub fn divrem(&self, f: &Field, divisor: &UPoly) -> (UPoly, UPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let inv = f.inv_nonzero(divisor.lead());
        let mut quot = vec![FieldElem::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = f.mul(rem[i], inv);
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c;
            for (j, &d) in divisor.0.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = f.sub(rem[idx], f.mul(c, d));
            }
        }
        (UPoly::new(quot), UPoly::new(rem))
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, f: &Field, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Undo the Frobenius on a polynomial in x^p.
    fn pth_root(&self, f: &Field) -> UPoly {
        let p = f.p() as usize;
        debug_assert!(self
            .0
            .iter()
            .enumerate()
            .all(|(i, c)| i % p == 0 || c.is_zero()));
        UPoly::new(self.0.iter().step_by(p).map(|&c| f.pth_root(c)).collect())
    }

    /// Number of distinct roots in the algebraic closure (nonzero input).
    pub fn distinct_root_count(&self, f: &Field) -> usize {
        match self.degree() {
            None => panic!("zero polynomial has infinitely many roots"),
            Some(0) => return 0,
            _ => {}
        }
        let d = self.derivative(f);
        if d.is_zero() {
            return self.pth_root(f).distinct_root_count(f);
        }
        let g = self.gcd(f, &d);
        let (w, _) = self.divrem(f, &g);
        // strip the factors of w out of g; what is left is a p-th power
        let mut h = g;
        loop {
            let z = h.gcd(f, &w);
            if z.degree() == Some(0) {
                break;
            }
            h = h.divrem(f, &z).0;
        }
        let rest = if h.degree() == Some(0) {
            0
        } else {
            h.pth_root(f).distinct_root_count(f)
        };
        w.degree().unwrap() + rest
    }

    /// Multiplicity of `x` as a root.
    pub fn root_multiplicity(&self, f: &Field, x: FieldElem) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = UPoly::new(vec![f.neg(x), FieldElem::ONE]);
        let mut cur = self.clone();
        let mut m = 0;
        loop {
            let (qt, r) = cur.divrem(f, &lin);
            if !r.is_zero() {
                return m;
            }
            m += 1;
            cur = qt;
        }
    }
}

/// Binary form of degree `d`, coefficients of s^d, s^(d-1)t, …, t^d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryForm {
    pub coeffs: Vec<FieldElem>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<FieldElem>) -> BinaryForm {
        assert!(!coeffs.is_empty());
        BinaryForm { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, f: &Field, s: FieldElem, t: FieldElem) -> FieldElem {
        // Horner in the ratio, homogenised.
        let d = self.degree();
        let mut acc = FieldElem::ZERO;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let term = f.mul(c, f.mul(f.pow(s, (d - i) as u64), f.pow(t, i as u64)));
            acc = f.add(acc, term);
        }
        acc
    }

    /// f(1, x) as a polynomial in x.
    pub fn dehomogenize(&self) -> UPoly {
        UPoly::new(self.coeffs.clone())
    }

    /// Multiplicity of the root (0:1), i.e. how many trailing s-free terms vanish.
    fn multiplicity_at_infinity(&self) -> usize {
        self.degree() - self.dehomogenize().degree().unwrap_or(0)
    }

    /// Distinct roots in P¹ over the algebraic closure; `None` for the zero form.
    pub fn distinct_root_count(&self, f: &Field) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let g = self.dehomogenize();
        let at_inf = usize::from(self.multiplicity_at_infinity() > 0);
        Some(g.distinct_root_count(f) + at_inf)
    }

    /// Distinct common roots of two forms over the closure (one may be zero).
    pub fn common_distinct_roots(f: &Field, a: &BinaryForm, b: &BinaryForm) -> Option<usize> {
        match (a.is_zero(), b.is_zero()) {
            (true, true) => None,
            (true, false) => b.distinct_root_count(f),
            (false, true) => a.distinct_root_count(f),
            (false, false) => {
                let g = a.dehomogenize().gcd(f, &b.dehomogenize());
                let finite = if g.degree().unwrap_or(0) == 0 {
                    0
                } else {
                    g.distinct_root_count(f)
                };
                let inf = a.multiplicity_at_infinity() > 0 && b.multiplicity_at_infinity() > 0;
                Some(finite + usize::from(inf))
            }
        }
    }

    pub fn zero(degree: usize) -> BinaryForm {
        BinaryForm::new(vec![FieldElem::ZERO; degree + 1])
    }

    /// Coefficient of s^(d-i) t^i.
    #[inline]
    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs[i]
    }

    pub fn mul(&self, f: &Field, other: &BinaryForm) -> BinaryForm {
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.mul_add(out[i + j], a, b);
            }
        }
        BinaryForm::new(out)
    }

    /// Sum of two forms of the same degree.
    pub fn add(&self, f: &Field, other: &BinaryForm) -> BinaryForm {
        assert_eq!(self.degree(), other.degree());
        BinaryForm::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, f: &Field, other: &BinaryForm) -> BinaryForm {
        self.add(f, &other.scale(f, f.neg(FieldElem::ONE)))
    }

    pub fn scale(&self, f: &Field, c: FieldElem) -> BinaryForm {
        BinaryForm::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Formal derivative in s (degree drops by one).
    pub fn ds(&self, f: &Field) -> BinaryForm {
        let d = self.degree();
        if d == 0 {
            return BinaryForm::zero(0);
        }
        BinaryForm::new(
            (0..d)
                .map(|i| f.mul(f.from_int((d - i) as i64), self.coeffs[i]))
                .collect(),
        )
    }

    /// Formal derivative in t.
    pub fn dt(&self, f: &Field) -> BinaryForm {
        let d = self.degree();
        if d == 0 {
            return BinaryForm::zero(0);
        }
        BinaryForm::new(
            (1..=d)
                .map(|i| f.mul(f.from_int(i as i64), self.coeffs[i]))
                .collect(),
        )
    }

    /// Exact quotient by the linear form vanishing at `(s0:t0)`, or `None`
    /// when that point is not a root.
    pub fn divide_root(&self, f: &Field, (s0, t0): (FieldElem, FieldElem)) -> Option<BinaryForm> {
        // divisor a·s + b·t with a = t0, b = -s0
        let (a, b) = (t0, f.neg(s0));
        let d = self.degree();
        if d == 0 {
            return None;
        }
        let mut g = vec![FieldElem::ZERO; d];
        if !a.is_zero() {
            let ia = f.inv_nonzero(a);
            for k in 0..d {
                let prev = if k == 0 { FieldElem::ZERO } else { g[k - 1] };
                g[k] = f.mul(f.sub(self.coeffs[k], f.mul(b, prev)), ia);
            }
            (self.coeffs[d] == f.mul(b, g[d - 1])).then(|| BinaryForm::new(g))
        } else {
            if !self.coeffs[0].is_zero() {
                return None;
            }
            let ib = f.inv_nonzero(b);
            for k in 1..=d {
                g[k - 1] = f.mul(self.coeffs[k], ib);
            }
            Some(BinaryForm::new(g))
        }
    }

    /// Rational roots in P¹(F_q) as normalised `(s, t)` pairs with multiplicity.
    pub fn rational_roots(&self, f: &Field) -> Vec<((FieldElem, FieldElem), usize)> {
        let mut out = Vec::new();
        if self.is_zero() {
            return out;
        }
        let g = self.dehomogenize();
        for x in f.elements() {
            let m = g.root_multiplicity(f, x);
            if m > 0 {
                out.push(((FieldElem::ONE, x), m));
            }
        }
        let inf = self.multiplicity_at_infinity();
        if inf > 0 {
            out.push(((FieldElem::ZERO, FieldElem::ONE), inf));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(f: &Field, c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&x| f.from_int(x)).collect())
    }

    #[test]
    fn gcd_and_division() {
        let f = Field::prime(7).unwrap();
        // (x-1)(x-2) and (x-2)(x-3)
        let a = poly(&f, &[2, -3, 1]);
        let b = poly(&f, &[6, -5, 1]);
        assert_eq!(a.gcd(&f, &b), poly(&f, &[-2, 1]));
        let (q, r) = a.divrem(&f, &poly(&f, &[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(q, poly(&f, &[-2, 1]));
    }

    #[test]
    fn distinct_roots_in_characteristic_p() {
        let f2 = Field::prime(2).unwrap();
        // x^2 + 1 = (x+1)^2 over GF(2)
        assert_eq!(poly(&f2, &[1, 0, 1]).distinct_root_count(&f2), 1);
        // x^2 + x + 1 is irreducible but separable
        assert_eq!(poly(&f2, &[1, 1, 1]).distinct_root_count(&f2), 2);
        // x^4 + x^2 = x^2 (x+1)^2
        assert_eq!(poly(&f2, &[0, 0, 1, 0, 1]).distinct_root_count(&f2), 2);
        let f3 = Field::prime(3).unwrap();
        // (x^3 - x)^3 has three distinct roots
        let c = poly(&f3, &[0, -1, 0, 1]);
        let cube = {
            let mut v = vec![FieldElem::ZERO; 10];
            v[3] = f3.from_int(-1);
            v[9] = FieldElem::ONE;
            UPoly::new(v)
        };
        assert_eq!(c.distinct_root_count(&f3), 3);
        assert_eq!(cube.distinct_root_count(&f3), 3);
        // x^3 (x - 1)^4 (x^2+1)
        let mut p = poly(&f3, &[0, 0, 0, 1]);
        for _ in 0..4 {
            p = mul(&f3, &p, &poly(&f3, &[-1, 1]));
        }
        p = mul(&f3, &p, &poly(&f3, &[1, 0, 1]));
        assert_eq!(p.distinct_root_count(&f3), 4);
    }

    fn mul(f: &Field, a: &UPoly, b: &UPoly) -> UPoly {
        let mut out = vec![FieldElem::ZERO; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            for (j, &y) in b.0.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        UPoly::new(out)
    }

    #[test]
    fn binary_form_roots() {
        let f = Field::prime(7).unwrap();
        // 3 s^2 t + 4 s t^2 = s t (3 s + 4 t)
        let b = BinaryForm::new(vec![f.zero(), f.from_int(3), f.from_int(4), f.zero()]);
        let roots = b.rational_roots(&f);
        assert_eq!(roots.len(), 3);
        assert!(roots.contains(&((f.one(), f.zero()), 1)));
        assert!(roots.contains(&((f.zero(), f.one()), 1)));
        assert!(roots.contains(&((f.one(), f.one()), 1)));
        assert_eq!(b.distinct_root_count(&f), Some(3));
        // s t^2 has (1:0) double and (0:1) simple
        let c = BinaryForm::new(vec![f.zero(), f.zero(), f.one(), f.zero()]);
        assert_eq!(
            c.rational_roots(&f),
            vec![((f.one(), f.zero()), 2), ((f.zero(), f.one()), 1)]
        );
        assert_eq!(c.distinct_root_count(&f), Some(2));
    }

    #[test]
    fn form_arithmetic() {
        let f = Field::prime(5).unwrap();
        let e = |v: &[i64]| BinaryForm::new(v.iter().map(|&x| f.from_int(x)).collect());
        let a = e(&[1, 2, 3]);
        let b = e(&[4, 0, 1]);
        let prod = a.mul(&f, &b);
        for s in 0..5 {
            for t in 0..5 {
                let (s, t) = (f.from_int(s), f.from_int(t));
                assert_eq!(
                    prod.eval(&f, s, t),
                    f.mul(a.eval(&f, s, t), b.eval(&f, s, t))
                );
            }
        }
        // Euler: s·f_s + t·f_t = d·f
        let ds = a.ds(&f).mul(&f, &e(&[1, 0]));
        let dt = a.dt(&f).mul(&f, &e(&[0, 1]));
        assert_eq!(ds.add(&f, &dt), a.scale(&f, f.from_int(2)));
        // divide s t (3s + 4t) by -t and then by s
        let c = e(&[0, 3, 4, 0]);
        let g = c.divide_root(&f, (f.one(), f.zero())).unwrap();
        assert_eq!(g, e(&[2, 1, 0]));
        let g = g.divide_root(&f, (f.zero(), f.one())).unwrap();
        assert_eq!(g, e(&[2, 1]));
        assert!(g.divide_root(&f, (f.one(), f.one())).is_none());
        let h = g.divide_root(&f, (f.one(), f.from_int(3))).unwrap();
        assert_eq!(h.degree(), 0);
        assert!(c.divide_root(&f, (f.one(), f.from_int(2))).is_none());
    }
}

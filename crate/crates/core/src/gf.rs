//! Exact arithmetic in GF(p^k) for the small primes used by the census.
//!
//! Elements are integer codes `0..q`: the base-`p` digits of a code are the
//! coefficients of the polynomial representative, least significant digit
//! first. Code 0 is the additive identity and code 1 the multiplicative one.
//!
//! Each field is fixed by a monic primitive modulus chosen deterministically:
//! the first primitive polynomial in Conway order (coefficients compared with
//! alternating signs, highest degree first). This reproduces the classical
//! choices x²+x+1 for GF(4), x³+x+1 for GF(8) and x²+2x+2 for GF(9), and the
//! Conway polynomials x−g for prime fields. Fields with at most 2¹⁶ elements
//! use log/antilog tables; larger ones fall back to polynomial arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Primes accepted by [`Field::new`].
pub const SUPPORTED_PRIMES: [u32; 5] = [2, 3, 5, 7, 11];
/// Largest extension degree accepted by [`Field::new`].
pub const MAX_DEGREE: u32 = 12;
/// Fields up to this size get log/antilog tables.
pub const TABLE_LIMIT: u64 = 1 << 16;
const ADD_TABLE_LIMIT: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("prime {0} is not supported (expected one of 2, 3, 5, 7, 11)")]
    UnsupportedPrime(u32),
    #[error("unsupported field size {p}^{k}")]
    UnsupportedSize { p: u32, k: u32 },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("cannot embed GF({src_p}^{src_k}) into GF({dst_p}^{dst_k})")]
    Incompatible {
        src_p: u32,
        src_k: u32,
        dst_p: u32,
        dst_k: u32,
    },
    #[error("element code {code} out of range for a field with {q} elements")]
    OutOfRange { code: u64, q: u32 },
}

/// A field element, stored as its integer code.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    /// `log[code]` for nonzero codes.
    log: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2(q-1)`, so sums of two logs need no reduction.
    exp: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u16>>,
}

/// Arithmetic context for GF(p^k). Immutable after construction.
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, coefficients from x^0 up to x^k.
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.k)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k
    }
}

impl Eq for Field {}

fn is_prime(n: u32) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Multiply two residues modulo the monic `modulus` over GF(p).
fn polymulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let k = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for deg in (k..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        for (i, &m) in modulus[..k].iter().enumerate() {
            let idx = deg - k + i;
            prod[idx] = (prod[idx] + (p - c) * m) % p;
        }
    }
    prod.truncate(k);
    prod
}

fn polypowmod(base: &[u32], mut e: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let k = modulus.len() - 1;
    let mut result = vec![0u32; k];
    result[0] = 1;
    let mut b = base.to_vec();
    b.resize(k, 0);
    while e > 0 {
        if e & 1 == 1 {
            result = polymulmod(&result, &b, modulus, p);
        }
        b = polymulmod(&b, &b, modulus, p);
        e >>= 1;
    }
    result
}

fn x_is_primitive(modulus: &[u32], p: u32, q: u64) -> bool {
    let k = modulus.len() - 1;
    let mut x = vec![0u32; k];
    if k == 1 {
        // x ≡ -m0 in GF(p)[x]/(x + m0)
        x[0] = (p - modulus[0]) % p;
    } else {
        x[1] = 1;
    }
    let mut one = vec![0u32; k];
    one[0] = 1;
    if polypowmod(&x, q - 1, modulus, p) != one {
        return false;
    }
    prime_factors(q - 1)
        .into_iter()
        .all(|r| polypowmod(&x, (q - 1) / r, modulus, p) != one)
}

/// First primitive monic polynomial of degree `k` over GF(p) in Conway order.
fn conway_order_primitive(p: u32, k: u32) -> Vec<u32> {
    let q = (p as u64).pow(k);
    for n in 0..q {
        // c[k-1] is the most significant digit of n.
        let mut c = vec![0u32; k as usize];
        let mut rest = n;
        for i in 0..k as usize {
            c[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        if c[0] == 0 {
            continue;
        }
        let mut f: Vec<u32> = (0..k as usize)
            .map(|i| {
                if (k as usize - i).is_multiple_of(2) {
                    c[i]
                } else {
                    (p - c[i]) % p
                }
            })
            .collect();
        f.push(1);
        if x_is_primitive(&f, p, q) {
            return f;
        }
    }
    unreachable!("a primitive polynomial exists for every degree")
}

impl Field {
    /// Build GF(p^k).
    pub fn new(p: u32, k: u32) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if !SUPPORTED_PRIMES.contains(&p) {
            return Err(FieldError::UnsupportedPrime(p));
        }
        if k == 0 || k > MAX_DEGREE {
            return Err(FieldError::UnsupportedSize { p, k });
        }
        let q64 = (p as u64).pow(k);
        if q64 >= u32::MAX as u64 {
            return Err(FieldError::UnsupportedSize { p, k });
        }
        let q = q64 as u32;
        let modulus = conway_order_primitive(p, k);
        let mut field = Field {
            p,
            k,
            q,
            modulus,
            tables: None,
        };
        if q64 <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    pub fn prime(p: u32) -> Result<Field, FieldError> {
        Field::new(p, 1)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut exp = vec![0u32; 2 * (q - 1)];
        let mut log = vec![0u32; q];
        let g = self.generator_poly();
        let mut cur = vec![0u32; self.k as usize];
        cur[0] = 1;
        for i in 0..q - 1 {
            let code = self.encode(&cur);
            exp[i] = code;
            exp[i + q - 1] = code;
            log[code as usize] = i as u32;
            cur = polymulmod(&cur, &g, &self.modulus, self.p);
        }
        let neg = (0..self.q).map(|a| self.neg_digits(a)).collect();
        let add = if self.p != 2 && self.k > 1 && self.q <= ADD_TABLE_LIMIT {
            let mut t = vec![0u16; q * q];
            for a in 0..self.q {
                for b in 0..self.q {
                    t[a as usize * q + b as usize] = self.add_digits(a, b) as u16;
                }
            }
            Some(t)
        } else {
            None
        };
        Tables { log, exp, neg, add }
    }

    /// Residue class of x (for k = 1 this is the root of x − g, i.e. g).
    fn generator_poly(&self) -> Vec<u32> {
        let mut g = vec![0u32; self.k as usize];
        if self.k == 1 {
            g[0] = (self.p - self.modulus[0]) % self.p;
        } else {
            g[1] = 1;
        }
        g
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = vec![0u32; self.k as usize];
        for slot in d.iter_mut() {
            *slot = a % self.p;
            a /= self.p;
        }
        d
    }

    fn encode(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn neg_digits(&self, mut a: u32) -> u32 {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Monic modulus, coefficients of x^0..x^k.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_tabled(&self) -> bool {
        self.tables.is_some()
    }

    #[inline]
    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// Validate an element code.
    pub fn elem(&self, code: u64) -> Result<FieldElem, FieldError> {
        if code < self.q as u64 {
            Ok(FieldElem(code as u32))
        } else {
            Err(FieldError::OutOfRange { code, q: self.q })
        }
    }

    /// Image of an integer in the prime subfield.
    #[inline]
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p as i64) as u32)
    }

    /// The generator used for the log tables (the class of x).
    pub fn primitive_element(&self) -> FieldElem {
        FieldElem(self.encode(&self.generator_poly()))
    }

    /// All elements in ascending code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.q).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        if self.k == 1 {
            let s = a.0 + b.0;
            return FieldElem(if s >= self.p { s - self.p } else { s });
        }
        if let Some(t) = &self.tables {
            if let Some(add) = &t.add {
                return FieldElem(add[a.0 as usize * self.q as usize + b.0 as usize] as u32);
            }
        }
        FieldElem(self.add_digits(a.0, b.0))
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.p == 2 {
            return a;
        }
        if self.k == 1 {
            return FieldElem(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        match &self.tables {
            Some(t) => FieldElem(t.neg[a.0 as usize]),
            None => FieldElem(self.neg_digits(a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        if self.k == 1 {
            return FieldElem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        match &self.tables {
            Some(t) => FieldElem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => {
                let prod = polymulmod(&self.digits(a.0), &self.digits(b.0), &self.modulus, self.p);
                FieldElem(self.encode(&prod))
            }
        }
    }

    /// `a + b·c`, the inner step of every elimination loop.
    #[inline]
    pub fn mul_add(&self, a: FieldElem, b: FieldElem, c: FieldElem) -> FieldElem {
        self.add(a, self.mul(b, c))
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.inv_nonzero(a))
    }

    /// Inverse of an element the caller knows to be nonzero.
    #[inline]
    pub(crate) fn inv_nonzero(&self, a: FieldElem) -> FieldElem {
        debug_assert!(a.0 != 0);
        match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize];
                FieldElem(t.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
            }
            None => self.pow(a, self.q as u64 - 2),
        }
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        if let Some(t) = &self.tables {
            let l = t.log[a.0 as usize] as u64;
            return FieldElem(
                t.exp[((l * (e % (self.q as u64 - 1))) % (self.q as u64 - 1)) as usize],
            );
        }
        let mut result = FieldElem::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    /// The Frobenius map x ↦ x^p.
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.p as u64)
    }

    /// Inverse Frobenius x ↦ x^(q/p), the unique p-th root.
    pub fn pth_root(&self, a: FieldElem) -> FieldElem {
        self.pow(a, (self.q / self.p) as u64)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElem) -> Result<u64, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let n = self.q as u64 - 1;
        let mut ord = n;
        for r in prime_factors(n) {
            while ord.is_multiple_of(r) && self.pow(a, ord / r) == FieldElem::ONE {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// Element count as a usize, for indexing.
    #[inline]
    pub fn size(&self) -> usize {
        self.q as usize
    }

    /// Evaluate a polynomial with prime-field integer coefficients (low degree first).
    pub fn eval_int_poly(&self, coeffs: &[u32], x: FieldElem) -> FieldElem {
        coeffs.iter().rev().fold(FieldElem::ZERO, |acc, &c| {
            self.add(self.mul(acc, x), FieldElem(c % self.p))
        })
    }
}

/// A fixed injective homomorphism GF(p^a) → GF(p^b), a | b.
///
/// The class of x in the source is sent to the smallest-code root of the
/// source modulus in the target, so the map is the same on every run.
pub struct Embedding {
    image: Vec<FieldElem>,
}

impl Embedding {
    pub fn new(src: &Field, dst: &Field) -> Result<Embedding, FieldError> {
        let incompatible = || FieldError::Incompatible {
            src_p: src.p,
            src_k: src.k,
            dst_p: dst.p,
            dst_k: dst.k,
        };
        if src.p != dst.p || !dst.k.is_multiple_of(src.k) {
            return Err(incompatible());
        }
        let root = if src.k == 1 {
            None
        } else {
            let r = dst
                .elements()
                .find(|&x| dst.eval_int_poly(&src.modulus, x).is_zero())
                .ok_or_else(incompatible)?;
            Some(r)
        };
        let image = src
            .elements()
            .map(|x| match root {
                None => x,
                Some(r) => {
                    let digits = src.digits(x.0);
                    digits.iter().rev().fold(FieldElem::ZERO, |acc, &d| {
                        dst.add(dst.mul(acc, r), FieldElem(d))
                    })
                }
            })
            .collect();
        Ok(Embedding { image })
    }

    #[inline]
    pub fn apply(&self, x: FieldElem) -> FieldElem {
        self.image[x.0 as usize]
    }
}

/// Image of `x` under the fixed embedding `src → dst`.
pub fn embed(src: &Field, dst: &Field, x: FieldElem) -> Result<FieldElem, FieldError> {
    if x.0 >= src.q {
        return Err(FieldError::OutOfRange {
            code: x.0 as u64,
            q: src.q,
        });
    }
    Ok(Embedding::new(src, dst)?.apply(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_small_fields() -> Vec<Field> {
        [
            (2, 1),
            (2, 2),
            (2, 3),
            (3, 1),
            (3, 2),
            (5, 1),
            (7, 1),
            (11, 1),
        ]
        .iter()
        .map(|&(p, k)| Field::new(p, k).unwrap())
        .collect()
    }

    #[test]
    fn fixed_moduli() {
        assert_eq!(Field::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Field::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(Field::new(3, 2).unwrap().modulus(), &[2, 2, 1]);
        // prime fields: x - g with g the least primitive root
        assert_eq!(Field::new(5, 1).unwrap().modulus(), &[3, 1]);
        assert_eq!(Field::new(7, 1).unwrap().modulus(), &[4, 1]);
        assert_eq!(Field::new(11, 1).unwrap().modulus(), &[9, 1]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(
            Field::new(13, 1).unwrap_err(),
            FieldError::UnsupportedPrime(13)
        );
        assert!(matches!(
            Field::new(2, 0),
            Err(FieldError::UnsupportedSize { .. })
        ));
        assert!(matches!(
            Field::new(2, 13),
            Err(FieldError::UnsupportedSize { .. })
        ));
        assert!(matches!(
            Field::new(11, 12),
            Err(FieldError::UnsupportedSize { .. })
        ));
    }

    #[test]
    fn gf4_generator_relation() {
        let f = Field::new(2, 2).unwrap();
        let g = FieldElem(2);
        assert_eq!(f.mul(g, g), FieldElem(3));
        assert_eq!(f.frobenius(g), FieldElem(3));
    }

    #[test]
    fn gf7_inverse() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.inv(FieldElem(3)).unwrap(), FieldElem(5));
        assert_eq!(f.inv(FieldElem(0)), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn char_two_doubling_vanishes() {
        for k in 1..=4 {
            let f = Field::new(2, k).unwrap();
            assert!(f.elements().all(|a| f.add(a, a).is_zero()));
        }
    }

    #[test]
    fn gf9_orders_divide_eight() {
        let f = Field::new(3, 2).unwrap();
        for a in f.elements().skip(1) {
            assert_eq!(8 % f.order(a).unwrap(), 0);
        }
        assert_eq!(f.order(f.primitive_element()).unwrap(), 8);
        assert!(f.elements().all(|a| f.frobenius(f.frobenius(a)) == a));
    }

    #[test]
    fn gf2_frobenius_is_identity() {
        let f = Field::prime(2).unwrap();
        assert!(f.elements().all(|a| f.frobenius(a) == a));
    }

    #[test]
    fn element_listing() {
        let f2 = Field::prime(2).unwrap();
        assert_eq!(
            f2.elements().collect::<Vec<_>>(),
            vec![FieldElem(0), FieldElem(1)]
        );
        assert_eq!(Field::new(3, 2).unwrap().elements().count(), 9);
        let f5 = Field::prime(5).unwrap();
        let prod = f5
            .elements()
            .skip(1)
            .fold(f5.one(), |acc, x| f5.mul(acc, x));
        assert_eq!(prod, FieldElem(4));
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in all_small_fields() {
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                assert_eq!(f.mul(a, f.one()), a);
                assert_eq!(f.pow(a, f.q() as u64), a, "{f:?}");
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(
                        f.frobenius(f.add(a, b)),
                        f.add(f.frobenius(a), f.frobenius(b))
                    );
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn polynomial_mode_agrees_with_definition() {
        // 3^11 exceeds the table budget.
        let f = Field::new(3, 11).unwrap();
        assert!(!f.is_tabled());
        let a = FieldElem(123_456);
        let b = FieldElem(77_777);
        let ab = f.mul(a, b);
        assert_eq!(f.div(ab, b).unwrap(), a);
        assert_eq!(f.pow(a, f.q() as u64), a);
        assert_eq!(f.sub(f.add(a, b), b), a);
    }

    #[test]
    fn embeddings_fix_prime_subfield() {
        let f2 = Field::prime(2).unwrap();
        let f64 = Field::new(2, 6).unwrap();
        assert_eq!(embed(&f2, &f64, FieldElem(1)).unwrap(), FieldElem(1));
        let f3 = Field::prime(3).unwrap();
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(embed(&f3, &f9, FieldElem(2)).unwrap(), FieldElem(2));
        assert!(embed(&f9, &Field::new(3, 3).unwrap(), FieldElem(1)).is_err());
        assert!(embed(&f2, &f9, FieldElem(1)).is_err());
    }

    #[test]
    fn gf4_into_gf16_preserves_minimal_polynomial() {
        let f4 = Field::new(2, 2).unwrap();
        let f16 = Field::new(2, 4).unwrap();
        let g = embed(&f4, &f16, FieldElem(2)).unwrap();
        // brute force: g satisfies x^2 + x + 1 and is not in GF(2)
        let val = f16.add(f16.add(f16.mul(g, g), g), f16.one());
        assert!(val.is_zero());
        assert!(g.0 > 1);
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        for (src, dst) in [
            ((2, 2), (2, 4)),
            ((2, 3), (2, 6)),
            ((3, 2), (3, 4)),
            ((2, 1), (2, 5)),
        ] {
            let s = Field::new(src.0, src.1).unwrap();
            let d = Field::new(dst.0, dst.1).unwrap();
            let e = Embedding::new(&s, &d).unwrap();
            let mut seen = std::collections::HashSet::new();
            for a in s.elements() {
                assert!(seen.insert(e.apply(a)), "injective");
                for b in s.elements() {
                    assert_eq!(e.apply(s.add(a, b)), d.add(e.apply(a), e.apply(b)));
                    assert_eq!(e.apply(s.mul(a, b)), d.mul(e.apply(a), e.apply(b)));
                }
            }
            // deterministic across constructions
            let e2 = Embedding::new(&s, &d).unwrap();
            assert!(s.elements().all(|a| e.apply(a) == e2.apply(a)));
        }
    }
}

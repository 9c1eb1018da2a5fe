//! The secant-and-tangent closure Span(B) ⊆ S(K).
//!
//! A [`SpanContext`] indexes S(K) densely and precomputes, for every pair of
//! points, the third point of the secant line (or [`NONE`] when the line lies
//! on S) and, for every point, the residual points of its tangent lines.
//! Closures are then plain worklist runs over a bitset.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::gf::{Field, FieldElem};
use crate::linalg;
use crate::proj::{self, Coords, Point};
use crate::surface::CubicSurface;

/// Marker for "no third point" in the secant table.
pub const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpanError {
    #[error("point {0} is not on the surface")]
    NotOnSurface(Point),
}

/// R with ℓ·S = P + Q + R on the line through P ≠ Q, or `None` when the
/// line lies on S. Both points must be on S.
fn secant_coords(f: &Field, p: &Coords, gp: &Coords, q: &Coords, gq: &Coords) -> Option<Coords> {
    let c1 = linalg::dot(f, gq, p);
    let c2 = linalg::dot(f, gp, q);
    if c1.is_zero() && c2.is_zero() {
        return None;
    }
    Some(proj::combine(f, c1, p, f.neg(c2), q))
}

/// Two vectors completing P to a basis of the plane with covector `g`.
fn tangent_frame(f: &Field, p: &Coords, g: &Coords) -> (Coords, Coords) {
    let k = linalg::kernel(f, &[g.to_vec()], 4);
    let c = |v: &Vec<FieldElem>| [v[0], v[1], v[2], v[3]];
    for i in 0..k.len() {
        for j in i + 1..k.len() {
            if linalg::rank(f, &[p.to_vec(), k[i].clone(), k[j].clone()]) == 3 {
                return (c(&k[i]), c(&k[j]));
            }
        }
    }
    unreachable!("P lies in its tangent plane")
}

/// Residual points R with ℓ·S = 2P + R over the K-lines ℓ through P in Π_P
/// that do not lie on S. Empty at a singular point.
fn tangent_coords(s: &CubicSurface, p: &Coords, g: &Coords) -> Vec<Coords> {
    let f = s.field();
    if g.iter().all(|c| c.is_zero()) {
        return Vec::new();
    }
    let (a, b) = tangent_frame(f, p, g);
    let mut out = Vec::new();
    for (x, y) in proj::projective_line(f) {
        let q = proj::combine(f, x, &a, y, &b);
        let c0 = s.eval_coords(&q);
        let c1 = linalg::dot(f, &s.gradient_coords(&q), p);
        if c0.is_zero() && c1.is_zero() {
            continue;
        }
        out.push(proj::combine(f, c0, p, f.neg(c1), &q));
    }
    out
}

/// The secant step: third point on the line through two distinct points of S.
pub fn secant_candidates(
    s: &CubicSurface,
    p: &Point,
    q: &Point,
) -> Result<Option<Point>, SpanError> {
    for x in [p, q] {
        if !s.contains(x) {
            return Err(SpanError::NotOnSurface(*x));
        }
    }
    let f = s.field();
    let r = secant_coords(f, p.coords(), &s.gradient(p), q.coords(), &s.gradient(q));
    Ok(r.map(|r| Point::new(f, r).expect("nonzero")))
}

/// The tangent step at P, as a sorted set.
pub fn tangent_candidates(s: &CubicSurface, p: &Point) -> Result<Vec<Point>, SpanError> {
    if !s.contains(p) {
        return Err(SpanError::NotOnSurface(*p));
    }
    let f = s.field();
    let mut out: Vec<Point> = tangent_coords(s, p.coords(), &s.gradient(p))
        .into_iter()
        .map(|r| Point::new(f, r).expect("nonzero"))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Order in which the worklist is drained. The closure does not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Fifo,
    Lifo,
    Shuffled(u64),
}

/// Precomputed secant and tangent tables over an indexed S(K).
pub struct SpanContext {
    surface: CubicSurface,
    points: Vec<Point>,
    /// Index in `points_of_space` order to surface index (or NONE).
    index: Vec<u32>,
    third: Vec<u32>,
    tangent: Vec<Vec<u32>>,
}

impl SpanContext {
    pub fn new(surface: &CubicSurface) -> SpanContext {
        let f = surface.field();
        let points = surface.points();
        let n = points.len();
        let mut index = vec![NONE; proj::space_size(f)];
        for (i, p) in points.iter().enumerate() {
            index[proj::space_index(f, p)] = i as u32;
        }
        let lookup = |c: Coords| {
            let p = Point::new(f, c).expect("nonzero");
            let i = index[proj::space_index(f, &p)];
            debug_assert!(i != NONE, "residual point off the surface");
            i
        };
        let grads: Vec<Coords> = points.iter().map(|p| surface.gradient(p)).collect();
        let mut third = vec![NONE; n * n];
        for i in 0..n {
            for j in i + 1..n {
                if let Some(r) = secant_coords(
                    f,
                    points[i].coords(),
                    &grads[i],
                    points[j].coords(),
                    &grads[j],
                ) {
                    let r = lookup(r);
                    third[i * n + j] = r;
                    third[j * n + i] = r;
                }
            }
        }
        let tangent = (0..n)
            .map(|i| {
                let mut t: Vec<u32> = tangent_coords(surface, points[i].coords(), &grads[i])
                    .into_iter()
                    .map(lookup)
                    .collect();
                t.sort_unstable();
                t.dedup();
                t
            })
            .collect();
        SpanContext {
            surface: surface.clone(),
            points,
            index,
            third,
            tangent,
        }
    }

    pub fn surface(&self) -> &CubicSurface {
        &self.surface
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn index_of(&self, p: &Point) -> Option<u32> {
        let i = self.index[proj::space_index(self.surface.field(), p)];
        (i != NONE).then_some(i)
    }

    /// Secant table entry for two distinct indices.
    #[inline]
    pub fn third(&self, i: u32, j: u32) -> u32 {
        self.third[i as usize * self.len() + j as usize]
    }

    pub fn tangent(&self, i: u32) -> &[u32] {
        &self.tangent[i as usize]
    }

    pub fn indices_of(&self, pts: &[Point]) -> Result<Vec<u32>, SpanError> {
        pts.iter()
            .map(|p| self.index_of(p).ok_or(SpanError::NotOnSurface(*p)))
            .collect()
    }

    /// Span of the seed indices, drained in the given order.
    pub fn closure_with(&self, seeds: &[u32], order: Order) -> SpanState {
        let mut st = SpanState::new(self.len(), order);
        for &s in seeds {
            st.add(s);
        }
        let n = self.len();
        let full = |st: &SpanState| st.members.count_ones(..) == n;
        while !full(&st) {
            let Some(i) = st.next() else { break };
            for &r in self.tangent(i) {
                st.add(r);
            }
            let row = &self.third[i as usize * n..(i as usize + 1) * n];
            for k in 0..st.processed.len() {
                let r = row[st.processed[k] as usize];
                if r != NONE {
                    st.add(r);
                }
            }
            st.processed.push(i);
        }
        st
    }

    pub fn closure(&self, seeds: &[u32]) -> FixedBitSet {
        self.closure_with(seeds, Order::Fifo).members
    }

    pub fn closure_points(&self, seeds: &[Point]) -> Result<Vec<Point>, SpanError> {
        let idx = self.indices_of(seeds)?;
        Ok(self.closure(&idx).ones().map(|i| self.points[i]).collect())
    }

    pub fn span_size(&self, seeds: &[u32]) -> usize {
        self.closure(seeds).count_ones(..)
    }

    pub fn is_generator(&self, i: u32) -> bool {
        self.span_size(&[i]) == self.len()
    }

    pub fn generates(&self, seeds: &[u32]) -> bool {
        self.span_size(seeds) == self.len()
    }

    /// Singletons first, then pairs when `cap ≥ 2` and no point generates.
    pub fn generator_report(&self, cap: usize) -> GeneratorReport {
        let n = self.len() as u32;
        let verdicts: Vec<PointVerdict> = (0..n)
            .map(|i| {
                let size = self.span_size(&[i]);
                PointVerdict {
                    point: self.points[i as usize],
                    span_size: size,
                    generates: size == n as usize,
                }
            })
            .collect();
        let mut witnesses: Vec<Vec<Point>> = verdicts
            .iter()
            .filter(|v| v.generates)
            .map(|v| vec![v.point])
            .collect();
        let minimal_size = if !witnesses.is_empty() {
            MinimalSize::One
        } else if cap >= 2 {
            'outer: for i in 0..n {
                for j in i + 1..n {
                    if self.generates(&[i, j]) {
                        witnesses.push(vec![self.points[i as usize], self.points[j as usize]]);
                        break 'outer;
                    }
                }
            }
            if witnesses.is_empty() {
                MinimalSize::Capped
            } else {
                MinimalSize::Two
            }
        } else {
            MinimalSize::Capped
        };
        let witnesses_verified = witnesses.iter().all(|w| {
            let idx = self.indices_of(w).expect("witness on surface");
            SpanContext::new(&self.surface).generates(&idx)
        });
        GeneratorReport {
            surface: self.surface.to_string(),
            points: n as usize,
            verdicts,
            minimal_size,
            witnesses,
            witnesses_verified,
        }
    }
}

/// Worklist state of one closure run.
pub struct SpanState {
    pub members: FixedBitSet,
    pub(crate) work: VecDeque<u32>,
    pub(crate) processed: Vec<u32>,
    order: Order,
    rng: Option<ChaCha8Rng>,
}

impl SpanState {
    fn new(n: usize, order: Order) -> SpanState {
        let rng = match order {
            Order::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        SpanState {
            members: FixedBitSet::with_capacity(n),
            work: VecDeque::new(),
            processed: Vec::new(),
            order,
            rng,
        }
    }

    fn add(&mut self, i: u32) {
        if !self.members.put(i as usize) {
            self.work.push_back(i);
        }
    }

    fn next(&mut self) -> Option<u32> {
        match self.order {
            Order::Fifo => self.work.pop_front(),
            Order::Lifo => self.work.pop_back(),
            Order::Shuffled(_) => {
                if self.work.is_empty() {
                    return None;
                }
                let k = self.rng.as_mut().unwrap().random_range(0..self.work.len());
                self.work.swap_remove_back(k)
            }
        }
    }

    /// Number of points taken off the worklist so far.
    pub fn processed(&self) -> usize {
        self.processed.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinimalSize {
    One,
    Two,
    Capped,
}

impl Serialize for MinimalSize {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MinimalSize::One => s.serialize_u8(1),
            MinimalSize::Two => s.serialize_u8(2),
            MinimalSize::Capped => s.serialize_str(">2 (capped)"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointVerdict {
    pub point: Point,
    pub span_size: usize,
    pub generates: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorReport {
    pub surface: String,
    pub points: usize,
    pub verdicts: Vec<PointVerdict>,
    pub minimal_size: MinimalSize,
    pub witnesses: Vec<Vec<Point>>,
    pub witnesses_verified: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use std::sync::Arc;

    fn fermat7() -> CubicSurface {
        let mut c = [0u32; 20];
        for i in [0, 10, 16, 19] {
            c[i] = 1;
        }
        CubicSurface::from_codes(Arc::new(Field::prime(7).unwrap()), &c).unwrap()
    }

    fn pt(s: &CubicSurface, c: [u32; 4]) -> Point {
        Point::from_codes(s.field(), c).unwrap()
    }

    #[test]
    fn secant_examples() {
        let s = fermat7();
        let a = pt(&s, [1, 6, 0, 0]);
        let c = pt(&s, [0, 1, 0, 6]);
        assert_eq!(
            secant_candidates(&s, &a, &c).unwrap(),
            Some(pt(&s, [1, 0, 0, 6]))
        );
        assert_eq!(
            secant_candidates(&s, &c, &a).unwrap(),
            Some(pt(&s, [1, 0, 0, 6]))
        );
        assert_eq!(
            secant_candidates(&s, &a, &pt(&s, [0, 0, 1, 6])).unwrap(),
            None
        );
        assert!(secant_candidates(&s, &a, &pt(&s, [1, 0, 0, 0])).is_err());
    }

    #[test]
    fn tables_match_direct_steps() {
        let s = fermat7();
        let ctx = SpanContext::new(&s);
        let n = ctx.len() as u32;
        for i in (0..n).step_by(5) {
            for j in (0..n).step_by(3) {
                if i == j {
                    continue;
                }
                let direct =
                    secant_candidates(&s, &ctx.points()[i as usize], &ctx.points()[j as usize])
                        .unwrap();
                let table = ctx.third(i, j);
                assert_eq!(
                    direct.map(|p| ctx.index_of(&p).unwrap()),
                    (table != NONE).then_some(table)
                );
            }
            let t: Vec<Point> = ctx
                .tangent(i)
                .iter()
                .map(|&r| ctx.points()[r as usize])
                .collect();
            let mut direct = tangent_candidates(&s, &ctx.points()[i as usize]).unwrap();
            direct.sort();
            let mut t = t;
            t.sort();
            assert_eq!(t, direct);
            assert!(t.len() <= 8);
        }
    }

    #[test]
    fn orders_agree_and_span_is_extensive() {
        let s = fermat7();
        let ctx = SpanContext::new(&s);
        let seeds = [0u32, 5];
        let fifo = ctx.closure_with(&seeds, Order::Fifo).members;
        assert_eq!(ctx.closure_with(&seeds, Order::Lifo).members, fifo);
        for seed in 0..5 {
            assert_eq!(
                ctx.closure_with(&seeds, Order::Shuffled(seed)).members,
                fifo
            );
        }
        assert!(fifo.contains(0) && fifo.contains(5));
        let all: Vec<u32> = (0..ctx.len() as u32).collect();
        assert_eq!(ctx.span_size(&all), ctx.len());
    }

    #[test]
    fn span_from_fermat_point_contains_secant_point() {
        let s = fermat7();
        let ctx = SpanContext::new(&s);
        let members = ctx
            .closure_points(&[pt(&s, [1, 6, 0, 0]), pt(&s, [0, 1, 0, 6])])
            .unwrap();
        assert!(members.contains(&pt(&s, [1, 0, 0, 6])));
        assert!(ctx.closure_points(&[pt(&s, [1, 0, 0, 0])]).is_err());
    }

    #[test]
    fn generator_report_on_fermat() {
        let s = fermat7();
        let ctx = SpanContext::new(&s);
        let r = ctx.generator_report(2);
        assert!(r.witnesses_verified);
        assert_eq!(r.points, ctx.len());
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["verdicts"].as_array().unwrap().len() == ctx.len());
    }
}

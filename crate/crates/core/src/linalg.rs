//! Dense linear algebra over a [`Field`]: row reduction, rank, kernels,
//! inverses, plus the specialised rank kernels used by the smoothness test.

use crate::gf::{Field, FieldElem};

pub type Row = Vec<FieldElem>;

/// Reduce `rows` to reduced row-echelon form in place, dropping zero rows.
/// Returns the pivot column of each remaining row.
pub fn rref(f: &Field, rows: &mut Vec<Row>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = f.inv_nonzero(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = f.neg(rows[i][c]);
            for j in c..ncols {
                let v = f.mul_add(rows[i][j], factor, rows[r][j]);
                rows[i][j] = v;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(f: &Field, rows: &[Row]) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m).len()
}

/// Basis of {x : row·x = 0 for every row}, in reduced echelon form.
pub fn kernel(f: &Field, rows: &[Row], ncols: usize) -> Vec<Row> {
    let mut m = rows.to_vec();
    let pivots = rref(f, &mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis: Vec<Row> = free
        .iter()
        .map(|&fc| {
            let mut v = vec![FieldElem::ZERO; ncols];
            v[fc] = FieldElem::ONE;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = f.neg(row[fc]);
            }
            v
        })
        .collect();
    rref(f, &mut basis);
    basis
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(f: &Field, m: &[Row]) -> Option<Vec<Row>> {
    let n = m.len();
    let mut aug: Vec<Row> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| {
                if i == j {
                    FieldElem::ONE
                } else {
                    FieldElem::ZERO
                }
            }));
            row
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn dot(f: &Field, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
    a.iter()
        .zip(b)
        .fold(FieldElem::ZERO, |acc, (&x, &y)| f.mul_add(acc, x, y))
}

/// Rank of a GF(2) matrix whose rows are packed into `W` words.
pub fn rank_gf2<const W: usize>(rows: &mut [[u64; W]], ncols: usize) -> usize {
    let mut r = 0;
    for c in 0..ncols {
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][w] & bit != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let pivot = rows[r];
        for row in rows[r + 1..].iter_mut() {
            if row[w] & bit != 0 {
                for k in w..W {
                    row[k] ^= pivot[k];
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Bit-sliced GF(3) row: `W` words of "value is 1" bits followed by `W`
/// words of "value is 2" bits.
pub type Gf3Row<const W: usize> = ([u64; W], [u64; W]);

#[inline]
fn gf3_add_into<const W: usize>(x: &mut Gf3Row<W>, y: &Gf3Row<W>, from: usize) {
    for k in from..W {
        let (x1, x2, y1, y2) = (x.0[k], x.1[k], y.0[k], y.1[k]);
        let xz = !(x1 | x2);
        let yz = !(y1 | y2);
        x.0[k] = (x1 & yz) | (y1 & xz) | (x2 & y2);
        x.1[k] = (x2 & yz) | (y2 & xz) | (x1 & y1);
    }
}

/// Rank over GF(3) of bit-sliced rows, stopping once `target` pivots are found.
pub fn rank_gf3<const W: usize>(rows: &mut [Gf3Row<W>], ncols: usize, target: usize) -> usize {
    let mut r = 0;
    for c in 0..ncols {
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let Some(pr) = (r..rows.len()).find(|&i| (rows[i].0[w] | rows[i].1[w]) & bit != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let mut pivot = rows[r];
        if pivot.1[w] & bit != 0 {
            std::mem::swap(&mut pivot.0, &mut pivot.1);
        }
        let neg = (pivot.1, pivot.0);
        for row in rows[r + 1..].iter_mut() {
            if row.0[w] & bit != 0 {
                gf3_add_into(row, &neg, w);
            } else if row.1[w] & bit != 0 {
                gf3_add_into(row, &pivot, w);
            }
        }
        r += 1;
        if r == target || r == rows.len() {
            break;
        }
    }
    r
}

/// Rank over a prime field GF(p) with small residues stored as bytes.
/// Stops early once `target` pivots are found.
pub fn rank_prime(rows: &mut [Vec<u8>], ncols: usize, p: u8, target: usize) -> usize {
    let p16 = p as u16;
    let inv: Vec<u8> = (0..p)
        .map(|a| {
            (1..p)
                .find(|&b| (a as u16 * b as u16) % p16 == 1)
                .unwrap_or(0)
        })
        .collect();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot = &mut head[r];
        let s = inv[pivot[c] as usize] as u16;
        for x in pivot[c..].iter_mut() {
            *x = ((*x as u16 * s) % p16) as u8;
        }
        for row in tail.iter_mut() {
            let lead = row[c];
            if lead == 0 {
                continue;
            }
            let factor = p16 - lead as u16;
            for (x, &y) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x = ((*x as u16 + factor * y as u16) % p16) as u8;
            }
        }
        r += 1;
        if r == target || r == rows.len() {
            break;
        }
    }
    r
}

/// Rank over an arbitrary field, stopping once `target` pivots are found.
pub fn rank_generic(f: &Field, rows: &mut [Row], ncols: usize, target: usize) -> usize {
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot = &mut head[r];
        let s = f.inv_nonzero(pivot[c]);
        for x in pivot[c..].iter_mut() {
            *x = f.mul(*x, s);
        }
        for row in tail.iter_mut() {
            let lead = row[c];
            if lead.is_zero() {
                continue;
            }
            let factor = f.neg(lead);
            for (x, &y) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x = f.mul_add(*x, factor, y);
            }
        }
        r += 1;
        if r == target || r == rows.len() {
            break;
        }
    }
    r
}

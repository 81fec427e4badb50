//! Sparse exact row echelon form.
//!
//! Rows are integer vectors sorted by column. A row's pivot is its first column. Insertion
//! reduces the new row against existing pivots in increasing column order with fraction-free
//! updates and strips the content, so that the stored form depends only on the insertion
//! order. Reduction of rational vectors removes every pivot column; the remainder is unique.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::coeff::Q;

pub type SparseRow = Vec<(usize, BigInt)>;

#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    rows: BTreeMap<usize, SparseRow>,
}

fn content(row: &SparseRow) -> BigInt {
    let mut g = BigInt::zero();
    for (_, x) in row {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    g
}

/// `a*x - b*y` on sorted sparse rows.
fn combine(a: &BigInt, x: &SparseRow, b: &BigInt, y: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push((x[i].0, a * &x[i].1));
            i += 1;
        } else if take_y {
            out.push((y[j].0, -(b * &y[j].1)));
            j += 1;
        } else {
            let v = a * &x[i].1 - b * &y[j].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn normalize(mut row: SparseRow) -> SparseRow {
    if row.is_empty() {
        return row;
    }
    let g = content(&row);
    let flip = row[0].1.is_negative();
    for (_, x) in row.iter_mut() {
        *x = &*x / &g;
        if flip {
            *x = -&*x;
        }
    }
    row
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&usize, &SparseRow)> {
        self.rows.iter()
    }

    pub fn from_rows(ncols: usize, rows: impl IntoIterator<Item = SparseRow>) -> Self {
        let mut e = Echelon::new(ncols);
        for r in rows {
            if let Some(&(p, _)) = r.first() {
                e.rows.insert(p, r);
            }
        }
        e
    }

    /// Non-pivot columns, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.rows.contains_key(c)).collect()
    }

    /// Adds a row (entries sorted by column, nonzero). Returns true if the rank grew.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut row = normalize(row);
        loop {
            let Some(&(lead, _)) = row.first() else { return false };
            match self.rows.get(&lead) {
                None => {
                    self.rows.insert(lead, row);
                    return true;
                }
                Some(p) => {
                    // p[0] is positive after normalization
                    let a = &p[0].1;
                    let b = &row[0].1;
                    let g = a.gcd(b);
                    let (ma, mb) = (a / &g, b / &g);
                    row = normalize(combine(&ma, &row, &mb, p));
                }
            }
        }
    }

    /// Removes pivot columns from a rational vector. Entries are (column, value), any order.
    pub fn reduce(&self, v: impl IntoIterator<Item = (usize, Q)>) -> BTreeMap<usize, Q> {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (c, x) in v {
            let e = acc.entry(c).or_insert_with(Q::zero);
            *e += x;
        }
        acc.retain(|_, x| !x.is_zero());
        let mut out = BTreeMap::new();
        while let Some((c, x)) = acc.pop_first() {
            match self.rows.get(&c) {
                None => {
                    out.insert(c, x);
                }
                Some(p) => {
                    let f = x / Q::from_integer(p[0].1.clone());
                    for (col, y) in p.iter().skip(1) {
                        let e = acc.entry(*col).or_insert_with(Q::zero);
                        *e -= &f * Q::from_integer(y.clone());
                        if e.is_zero() {
                            acc.remove(col);
                        }
                    }
                }
            }
        }
        out
    }
}

/// A rational vector scaled to an integer row (sorted, zero entries dropped).
pub fn integer_row(v: &BTreeMap<usize, Q>) -> SparseRow {
    let l = v.values().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().filter(|(_, x)| !x.is_zero()).map(|(&i, x)| (i, (x * Q::from_integer(l.clone())).to_integer())).collect()
}

/// Rank of a family of rational vectors.
pub fn rank(rows: &[BTreeMap<usize, Q>]) -> usize {
    let ncols = rows.iter().filter_map(|r| r.keys().next_back()).max().map_or(0, |m| m + 1);
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(integer_row(r));
    }
    e.rank()
}

/// Inverse of a square dense rational matrix by Gauss-Jordan elimination; `None` if singular.
pub fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut inv: Vec<Vec<Q>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let f = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &f;
            inv[col][j] = &inv[col][j] / &f;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let g = a[r][col].clone();
            for j in 0..n {
                let (x, y) = (&a[col][j] * &g, &inv[col][j] * &g);
                a[r][j] -= x;
                inv[r][j] -= y;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{q, qi};

    fn row(v: &[(usize, i64)]) -> SparseRow {
        v.iter().map(|&(c, x)| (c, BigInt::from(x))).collect()
    }

    #[test]
    fn rank_and_reduction() {
        let mut e = Echelon::new(4);
        assert!(e.insert(row(&[(0, 2), (1, -2)])));
        assert!(e.insert(row(&[(1, 3), (2, 3)])));
        assert!(!e.insert(row(&[(0, 1), (2, 1)])));
        assert_eq!(e.rank(), 2);
        assert_eq!(e.free_columns(), vec![2, 3]);
        // x0 = x1 = -x2
        let r = e.reduce([(0, qi(1))]);
        assert_eq!(r.get(&2), Some(&qi(-1)));
        let r = e.reduce([(0, q(1, 2)), (2, q(1, 2)), (3, qi(5))]);
        assert_eq!(r.len(), 1);
        assert_eq!(r[&3], qi(5));
    }

    #[test]
    fn rational_rank() {
        let row = |v: &[(usize, Q)]| v.iter().cloned().collect::<BTreeMap<usize, Q>>();
        let half = Q::new(1.into(), 2.into());
        let a = row(&[(0, half.clone()), (2, Q::from_integer(3.into()))]);
        let b = row(&[(0, Q::from_integer(1.into())), (2, Q::from_integer(6.into()))]);
        let c = row(&[(1, half)]);
        assert_eq!(rank(&[a.clone(), b.clone()]), 1);
        assert_eq!(rank(&[a, b, c]), 2);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn dense_inverse() {
        let m = vec![vec![qi(2), qi(1)], vec![qi(1), qi(1)]];
        let inv = invert(&m).unwrap();
        assert_eq!(inv, vec![vec![qi(1), qi(-1)], vec![qi(-1), qi(2)]]);
        assert!(invert(&[vec![qi(1), qi(2)], vec![qi(2), qi(4)]]).is_none());
    }

    #[test]
    fn content_is_removed() {
        let mut e = Echelon::new(2);
        e.insert(row(&[(0, -6), (1, 4)]));
        let (_, r) = e.rows().next().unwrap();
        assert_eq!(r, &row(&[(0, 3), (1, -2)]));
    }
}

//! Exact linear algebra over the rationals.
//!
//! [`linear_solve`] is fraction-free: rows are scaled to integers and
//! combined by cross-multiplication, with the row content divided out
//! after every step. [`Echelon`] is the incremental reduced row echelon
//! form used by the miner.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ring::poly::GenPoly;
use crate::Q;

/// A left null vector `y` of the coefficient matrix with `y·b ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub y: Vec<Q>,
    pub residual: GenPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    Unique(Vec<GenPoly>),
    /// Consistent, with `rank` below the number of unknowns.
    Underdetermined { rank: usize },
    Inconsistent(Vec<Certificate>),
}

fn to_integers(row: &[Q]) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for c in row {
        den = den.lcm(c.denom());
    }
    row.iter().map(|c| c.numer() * (&den / c.denom())).collect()
}

fn remove_content(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for c in row.iter() {
        if !c.is_zero() {
            g = g.gcd(c);
            if g.is_one() {
                return;
            }
        }
    }
    if !g.is_zero() && !g.is_one() {
        for c in row.iter_mut() {
            *c = &*c / &g;
        }
    }
}

/// Solve `A x = b` for `x` with generator-polynomial right-hand sides.
///
/// Pivots are the first nonzero entry in column order. When the system is
/// inconsistent every returned certificate satisfies `y·A = 0` exactly,
/// and `y` is scaled so its first nonzero entry is positive.
pub fn linear_solve(a: &[Vec<Q>], b: &[GenPoly]) -> Solution {
    assert_eq!(a.len(), b.len(), "one right-hand side per row");
    let m = a.len();
    let k = a.first().map_or(0, |r| r.len());
    // augmented integer rows [A | I]
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    for (i, r) in a.iter().enumerate() {
        assert_eq!(r.len(), k, "ragged matrix");
        let mut full: Vec<Q> = r.clone();
        full.extend((0..m).map(|j| if i == j { Q::one() } else { Q::zero() }));
        rows.push(to_integers(&full));
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for col in 0..k {
        let Some(p) = (next..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let prow = rows[next].clone();
        let pv = prow[col].clone();
        for r in 0..m {
            if r == next || rows[r][col].is_zero() {
                continue;
            }
            let f = rows[r][col].clone();
            for (x, y) in rows[r].iter_mut().zip(prow.iter()) {
                *x = &*x * &pv - &f * y;
            }
            remove_content(&mut rows[r]);
        }
        pivots.push((next, col));
        next += 1;
    }
    let combine = |row: &[BigInt]| -> (Vec<Q>, GenPoly) {
        let y: Vec<Q> = row[k..].iter().map(|c| Q::from_integer(c.clone())).collect();
        let mut rhs = GenPoly::zero();
        for (yi, bi) in y.iter().zip(b) {
            rhs.add_assign_scaled(bi, yi);
        }
        (y, rhs)
    };
    let mut certificates = Vec::new();
    for row in rows.iter().skip(next) {
        let (mut y, mut residual) = combine(row);
        if !residual.is_zero() {
            if y.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
                y.iter_mut().for_each(|c| *c = -c.clone());
                residual = residual.neg();
            }
            certificates.push(Certificate { y, residual });
        }
    }
    if !certificates.is_empty() {
        return Solution::Inconsistent(certificates);
    }
    if next < k {
        return Solution::Underdetermined { rank: next };
    }
    let mut x = vec![GenPoly::zero(); k];
    for &(r, col) in &pivots {
        let (_, rhs) = combine(&rows[r]);
        x[col] = rhs.scale(&(Q::one() / Q::from_integer(rows[r][col].clone())));
    }
    Solution::Unique(x)
}

/// What happened to a row offered to an [`Echelon`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert {
    /// Reduced to zero.
    Dependent,
    /// Became a new pivot row at this column.
    Pivot(usize),
}

/// Dense reduced row echelon form, grown one row at a time. Every pivot
/// is 1 and every pivot column is zero outside its pivot row.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    width: usize,
    rows: Vec<Vec<Q>>,
    row_pivot: Vec<usize>,
    col_row: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(width: usize) -> Self {
        Echelon {
            width,
            rows: Vec::new(),
            row_pivot: Vec::new(),
            col_row: vec![None; width],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of pivots in columns `range`.
    pub fn rank_in(&self, range: std::ops::Range<usize>) -> usize {
        self.row_pivot.iter().filter(|c| range.contains(c)).count()
    }

    pub fn pivot_row(&self, col: usize) -> Option<&[Q]> {
        self.col_row[col].map(|r| self.rows[r].as_slice())
    }

    /// `(pivot column, row)` pairs in insertion order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &[Q])> {
        self.row_pivot.iter().copied().zip(self.rows.iter().map(|r| r.as_slice()))
    }

    /// Subtract pivot rows so that `row` is zero in every pivot column.
    pub fn reduce(&self, row: &mut [Q]) {
        debug_assert_eq!(row.len(), self.width);
        for col in 0..self.width {
            if row[col].is_zero() {
                continue;
            }
            if let Some(r) = self.col_row[col] {
                let f = row[col].clone();
                let prow = &self.rows[r];
                for j in col..self.width {
                    if !prow[j].is_zero() {
                        row[j] -= &f * &prow[j];
                    }
                }
            }
        }
    }

    /// Reduce `row`; if something survives, normalize it and keep it.
    /// Returns the outcome and the reduced row.
    pub fn insert(&mut self, mut row: Vec<Q>) -> (Insert, Vec<Q>) {
        self.reduce(&mut row);
        let Some(col) = row.iter().position(|c| !c.is_zero()) else {
            return (Insert::Dependent, row);
        };
        let inv = Q::one() / &row[col];
        for c in row[col..].iter_mut() {
            if !c.is_zero() {
                *c *= &inv;
            }
        }
        for other in self.rows.iter_mut() {
            if other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for j in col..self.width {
                if !row[j].is_zero() {
                    other[j] -= &f * &row[j];
                }
            }
        }
        self.col_row[col] = Some(self.rows.len());
        self.row_pivot.push(col);
        self.rows.push(row.clone());
        (Insert::Pivot(col), row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, qi};

    fn row(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| qi(x)).collect()
    }

    fn p(s: &str) -> GenPoly {
        GenPoly::parse(s, 32).unwrap()
    }

    #[test]
    fn unique_solution() {
        let a = vec![row(&[1, 1]), row(&[1, -1])];
        let b = vec![p("a3"), p("a5")];
        match linear_solve(&a, &b) {
            Solution::Unique(x) => {
                assert_eq!(x[0], p("1/2*a3 + 1/2*a5"));
                assert_eq!(x[1], p("1/2*a3 - 1/2*a5"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inconsistent_certificate() {
        let a = vec![row(&[1, 1]), row(&[1, 1])];
        let b = vec![p("a3"), p("a5")];
        match linear_solve(&a, &b) {
            Solution::Inconsistent(c) => {
                assert_eq!(c.len(), 1);
                assert_eq!(c[0].residual, p("a3 - a5"));
                let ya: Vec<Q> = (0..2)
                    .map(|j| c[0].y.iter().zip(&a).map(|(y, r)| y * &r[j]).sum())
                    .collect();
                assert!(ya.iter().all(|x| x.is_zero()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reference_system() {
        // -4x - 4y = rhs1, -x + y = a16
        let a = vec![row(&[-4, -4]), row(&[-1, 1])];
        let b = vec![p("-2*a3*a8 - 4*a4*a7 - 2/3*a5*a6"), p("a16")];
        match linear_solve(&a, &b) {
            Solution::Unique(x) => {
                assert_eq!(x[0], p("1/12*a5*a6 + 1/2*a4*a7 + 1/4*a3*a8 - 1/2*a16"));
                assert_eq!(x[1], p("1/12*a5*a6 + 1/2*a4*a7 + 1/4*a3*a8 + 1/2*a16"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn echelon_rref() {
        let mut e = Echelon::new(3);
        assert_eq!(e.insert(row(&[2, 4, 6])).0, Insert::Pivot(0));
        assert_eq!(e.insert(row(&[1, 2, 4])).0, Insert::Pivot(2));
        assert_eq!(e.insert(row(&[3, 6, 1])).0, Insert::Dependent);
        assert_eq!(e.pivot_row(0).unwrap(), &[qi(1), qi(2), qi(0)][..]);
        assert_eq!(e.rank_in(0..2), 1);
        let _ = q(1, 2);
    }
}

//! Exact linear algebra over Q and Q(zeta_M).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::CycScalar;

pub trait Field: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(a: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(a: i64) -> Self {
        BigRational::from_integer(BigInt::from(a))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Field for CycScalar {
    fn zero() -> Self {
        CycScalar::zero(1)
    }
    fn one() -> Self {
        CycScalar::one(1)
    }
    fn from_i64(a: i64) -> Self {
        CycScalar::from_i64(1, a)
    }
    fn is_zero(&self) -> bool {
        CycScalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        self.inverse()
    }
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref<F: Field>(rows: &[Vec<F>]) -> (Vec<Vec<F>>, Vec<usize>) {
    let mut a: Vec<Vec<F>> = rows.to_vec();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot is invertible");
        for x in a[r].iter_mut().skip(c) {
            *x = x.mul(&inv);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank<F: Field>(rows: &[Vec<F>]) -> usize {
    rref(rows).1.len()
}

/// Reduces `v` against a reduced echelon basis; zero result means membership.
pub fn reduce_against<F: Field>(basis: &[Vec<F>], pivots: &[usize], v: &[F]) -> Vec<F> {
    let mut v = v.to_vec();
    for (row, &c) in basis.iter().zip(pivots) {
        if v[c].is_zero() {
            continue;
        }
        let f = v[c].clone();
        for (x, y) in v.iter_mut().zip(row) {
            if !y.is_zero() {
                *x = x.sub(&f.mul(y));
            }
        }
    }
    v
}

pub fn in_row_space<F: Field>(rows: &[Vec<F>], v: &[F]) -> bool {
    let (basis, piv) = rref(rows);
    reduce_against(&basis, &piv, v).iter().all(|x| x.is_zero())
}

/// Coefficients x with sum x_i * cols[i] = rhs, if any.
pub fn solve_columns<F: Field>(cols: &[Vec<F>], rhs: &[F]) -> Option<Vec<F>> {
    let n = cols.len();
    let m = rhs.len();
    // augmented system rows: [A | b]
    let rows: Vec<Vec<F>> = (0..m)
        .map(|i| {
            let mut r: Vec<F> = cols.iter().map(|c| c[i].clone()).collect();
            r.push(rhs[i].clone());
            r
        })
        .collect();
    let (red, piv) = rref(&rows);
    if piv.contains(&n) {
        return None;
    }
    let mut x = vec![F::zero(); n];
    for (row, &c) in red.iter().zip(&piv) {
        x[c] = row[n].clone();
    }
    Some(x)
}

/// Basis of {x : A x = 0} for A given by rows.
pub fn nullspace<F: Field>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let (red, piv) = rref(rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![F::zero(); ncols];
            x[f] = F::one();
            for (row, &c) in red.iter().zip(&piv) {
                x[c] = row[f].neg();
            }
            x
        })
        .collect()
}

pub fn mat_mul<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter().zip(b).fold(F::zero(), |acc, (x, brow)| {
                        if x.is_zero() || brow[j].is_zero() {
                            acc
                        } else {
                            acc.add(&x.mul(&brow[j]))
                        }
                    })
                })
                .collect()
        })
        .collect()
}

/// Characteristic polynomial det(xI - A), coefficients from constant term upward
/// (Faddeev-LeVerrier).
pub fn charpoly<F: Field>(a: &[Vec<F>]) -> Vec<F> {
    let n = a.len();
    let mut coeffs = vec![F::zero(); n + 1];
    coeffs[n] = F::one();
    let identity: Vec<Vec<F>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
        .collect();
    let mut mk: Vec<Vec<F>> = vec![vec![F::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = mat_mul(a, &mk);
        for i in 0..n {
            next[i][i] = next[i][i].add(&coeffs[n - k + 1].mul(&identity[i][i]));
        }
        mk = next;
        let am = mat_mul(a, &mk);
        let tr = (0..n).fold(F::zero(), |acc, i| acc.add(&am[i][i]));
        let kinv = F::from_i64(k as i64).inv().expect("k invertible");
        coeffs[n - k] = tr.mul(&kinv).neg();
    }
    coeffs
}
